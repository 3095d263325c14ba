//! Reachability analysis for populations of a finite-level system coupled to a
//! heat bath through elementary two-level thermalizations.
//!
//! The library answers three questions about a population vector `p` relaxing
//! towards a Gibbs distribution `γ` when the allowed controls are exponential
//! resets of level pairs:
//!
//! * which populations are reachable from `p` ([`reach::build_reach_set`],
//!   [`reach::is_reachable`]),
//! * which entropy-production monotones certify or refute a claimed
//!   trajectory ([`gep::verify_monotone`], [`majorization::sigma_a_dominates`]),
//! * which explicit control sequence realizes a reachable target
//!   ([`reach::same_order_descent`], returned by [`reach::is_reachable`]).
//!
//! On top of the engine sit case-study drivers ([`apps`]) for work
//! extraction, cooling, catalysis, algorithmic cooling rounds and
//! photoisomerization yields, plus a thin command-line front end ([`cli`]).
//!
//! All core decisions run either in exact rational arithmetic (the default
//! for reachability) or in `f64` with an explicit comparison tolerance; the
//! backend is fixed per [`GibbsContext`].
//!
//! The `examples/` directory contains one runnable program per capability;
//! start with `cargo run --example reach_set_d3`.

pub mod apps;
pub mod cli;
pub mod context;
pub mod gep;
pub mod io;
pub mod majorization;
pub mod reach;
pub mod scalar;
pub mod thermalization;

mod error;

pub use context::{make_gibbs_context, validate_population, GibbsContext, Population};
pub use error::{Error, Result};
pub use majorization::{BetaOrder, ThermoCurve};
pub use reach::{ReachDecision, ReachSet, Reachability};
pub use scalar::{rationalize, ArithmeticMode, Scalar};
pub use thermalization::{ControlSequence, ElementaryControl, MtpGenerator, Trajectory};
