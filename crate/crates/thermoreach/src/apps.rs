//! Case-study drivers built on the reach engine: deterministic work
//! extraction, one-round algorithmic cooling, catalytic cooling, heat-bath
//! algorithmic cooling with a qubit ancilla, and photoisomerization
//! yields. Each driver sweeps a parameter grid and returns a table; every
//! feasibility claim in the table carries a replayable protocol.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::context::{CompositeContext, GibbsContext, Population};
use crate::error::{Error, Result};
use crate::io::protocol_to_json;
use crate::majorization::thermomajorizes;
use crate::reach::{
    build_reach_set, curve_maximize_linear, is_reachable, maximize_along_line, maximize_linear,
    ReachDecision, ReachOptions, ReachSet,
};
use crate::scalar::{ArithmeticMode, Scalar};
use crate::thermalization::{
    random_detailed_balance_generator, sample_control_sequence, ControlSequence,
};

/// One sweep sample: an axis coordinate, the outputs at that coordinate
/// (aligned with the parent's column names), exact forms of those outputs
/// where the arithmetic provides them, and replayable protocols backing
/// every feasibility claim.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub axis: f64,
    pub label: String,
    pub values: Vec<f64>,
    pub exact: Vec<Option<Scalar>>,
    pub protocols: Vec<(String, ControlSequence)>,
}

/// A parameter sweep's full output: the axis, named value columns, the
/// sampled points, and enough metadata to rerun it.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub name: &'static str,
    pub axis_label: &'static str,
    pub columns: Vec<&'static str>,
    pub points: Vec<SweepPoint>,
    pub mode: ArithmeticMode,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub notes: Vec<(String, String)>,
}

impl SweepResult {
    pub fn csv_header(&self) -> Vec<String> {
        let mut header = vec![self.axis_label.to_string()];
        header.extend(self.columns.iter().map(|c| c.to_string()));
        header
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|pt| {
                let mut row = vec![format_axis(pt.axis)];
                row.extend(pt.values.iter().map(|v| format_axis(*v)));
                row
            })
            .collect()
    }

    /// The artifact bundle: metadata, every point's outputs, and the
    /// protocols backing feasible claims.
    pub fn to_json(&self) -> Value {
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|pt| {
                let values: Vec<Value> = self
                    .columns
                    .iter()
                    .zip(&pt.values)
                    .map(|(c, v)| json!({"column": c, "value": v}))
                    .collect();
                let exact: Vec<Value> = pt
                    .exact
                    .iter()
                    .map(|e| match e {
                        Some(s) => json!(s.to_string()),
                        None => Value::Null,
                    })
                    .collect();
                let protocols: Vec<Value> = pt
                    .protocols
                    .iter()
                    .map(|(label, seq)| json!({"label": label, "protocol": protocol_to_json(seq)}))
                    .collect();
                json!({
                    "axis": pt.axis,
                    "label": pt.label,
                    "values": values,
                    "exact": exact,
                    "protocols": protocols,
                })
            })
            .collect();
        let notes: Vec<Value> = self
            .notes
            .iter()
            .map(|(k, v)| json!({"key": k, "value": v}))
            .collect();
        json!({
            "name": self.name,
            "axis": self.axis_label,
            "columns": self.columns,
            "mode": self.mode.to_string(),
            "tolerance": self.tolerance,
            "seed": self.seed,
            "notes": notes,
            "points": points,
        })
    }
}

fn format_axis(v: f64) -> String {
    let mut s = format!("{v}");
    if !s.contains(['.', 'e', 'n', 'i']) {
        s.push_str(".0");
    }
    s
}

/// Smallest parameter in `[lo, hi]` satisfying a rising feasibility
/// predicate, located to absolute width `tol`. The upper endpoint must be
/// feasible (checked); a feasible lower endpoint short-circuits. Returns
/// the feasible end of the final bracket, so the answer itself is always
/// feasible.
pub fn bisect_min_feasible(
    mut feasible: impl FnMut(f64) -> Result<bool>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    if !feasible(hi)? {
        return Err(Error::BisectionBracket(format!(
            "upper endpoint {hi} is infeasible; the predicate is not bracketed"
        )));
    }
    if feasible(lo)? {
        return Ok(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Largest parameter at or above `lo` satisfying a falling feasibility
/// predicate. The lower endpoint must be feasible (checked); the upper
/// bracket starts at `hi` and expands geometrically until infeasible.
/// Returns the feasible end of the final bracket.
pub fn bisect_max_feasible(
    mut feasible: impl FnMut(f64) -> Result<bool>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    if !feasible(lo)? {
        return Err(Error::BisectionBracket(format!(
            "lower endpoint {lo} is infeasible; the predicate is not bracketed"
        )));
    }
    let (mut lo, mut hi) = (lo, hi.max(lo + tol));
    let mut expansions = 0;
    while feasible(hi)? {
        lo = hi;
        hi += 2.0 * (hi - lo).max(tol).max(hi * 0.5);
        expansions += 1;
        if expansions > 100 {
            return Err(Error::BisectionBracket(
                "no infeasible upper bracket found after 100 expansions".into(),
            ));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Turns a reach query into a yes/no answer, treating a depth-bound hit as
/// an abort rather than a silent no.
fn decided_reachable(rs: &ReachSet, target: &Population) -> Result<bool> {
    match is_reachable(rs, target)?.decision {
        ReachDecision::Reachable => Ok(true),
        ReachDecision::Unreachable => Ok(false),
        ReachDecision::Unknown => Err(Error::DepthBoundHit),
    }
}

fn exact_pair(x: &Scalar) -> (f64, Option<Scalar>) {
    (x.to_f64(), Some(x.clone()))
}

/// A qubit population `(g, 1 - g)` in the context's arithmetic; dyadic
/// floats convert exactly in rational mode.
fn qubit_population(mode: ArithmeticMode, ground: f64) -> Result<Population> {
    let g = Scalar::from_f64(ground, mode)?;
    let one = Scalar::one(mode);
    let rest = &one - &g;
    Ok(vec![g, rest])
}

pub const DEFAULT_BISECTION_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct WorkExtractionParams {
    /// System splitting times the source inverse temperature.
    pub beta_s_delta: f64,
    /// System splitting times the bath inverse temperature.
    pub beta_e_delta: f64,
    /// Battery splittings, in units of the system splitting.
    pub w_grid: Vec<f64>,
    /// Absolute width of the error bisection.
    pub eps_tol: f64,
    pub mode: ArithmeticMode,
    pub reach: ReachOptions,
}

impl Default for WorkExtractionParams {
    fn default() -> Self {
        WorkExtractionParams {
            beta_s_delta: 2.0,
            beta_e_delta: 1.0,
            w_grid: (1..=50).map(|k| k as f64 / 50.0).collect(),
            eps_tol: DEFAULT_BISECTION_TOL,
            mode: ArithmeticMode::Rational,
            reach: ReachOptions::default(),
        }
    }
}

/// Builds the battery-charging composite for one battery splitting `w`:
/// system qubit tensor battery qubit, bath-thermal weights, the source
/// `p_S (x) (1, 0)`, and the system's thermal marginal.
fn battery_stage(
    params: &WorkExtractionParams,
    w: f64,
) -> Result<(CompositeContext, Population, Population)> {
    let mode = params.mode;
    let ctx_s = GibbsContext::from_energies(&[0.0, 1.0], params.beta_e_delta, mode)?;
    let ctx_b = GibbsContext::from_energies(&[0.0, w], params.beta_e_delta, mode)?;
    let comp = ctx_s.tensor(&ctx_b)?;
    let p_s = ctx_s.thermal_at(params.beta_s_delta)?;
    let battery = vec![Scalar::one(mode), Scalar::zero(mode)];
    let source = comp.kron(&p_s, &battery)?;
    let gamma_s = ctx_s.thermal_population();
    Ok((comp, source, gamma_s))
}

/// Minimal failure probabilities for charging a sharp battery by `w` while
/// the system relaxes to equilibrium, under unrestricted thermal processes
/// and under memoryless ones. The battery is the fast tensor index.
pub fn work_extraction_curve(params: &WorkExtractionParams) -> Result<SweepResult> {
    let points: Vec<SweepPoint> = params
        .w_grid
        .par_iter()
        .map(|&w| -> Result<SweepPoint> {
            let (comp, source, gamma_s) = battery_stage(params, w)?;
            let ctx = &comp.context;
            let target = |eps: f64| -> Result<Population> {
                comp.kron(&gamma_s, &qubit_population(params.mode, eps)?)
            };
            let eps_tp = bisect_min_feasible(
                |eps| thermomajorizes(ctx, &source, &target(eps)?),
                0.0,
                1.0,
                params.eps_tol,
            )?;
            let rs = build_reach_set(ctx, &source, params.reach.clone())?;
            let eps_mtp = bisect_min_feasible(
                |eps| decided_reachable(&rs, &target(eps)?),
                0.0,
                1.0,
                params.eps_tol,
            )?;
            let witness = is_reachable(&rs, &target(eps_mtp)?)?;
            let mut protocols = Vec::new();
            if let Some(seq) = witness.protocol {
                protocols.push(("mtp".to_string(), seq));
            }
            Ok(SweepPoint {
                axis: w,
                label: format!("w={w}"),
                values: vec![eps_tp, eps_mtp],
                exact: vec![None, None],
                protocols,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        name: "work-extraction",
        axis_label: "w_over_delta",
        columns: vec!["eps_tp", "eps_mtp"],
        points,
        mode: params.mode,
        tolerance: params.eps_tol,
        seed: None,
        notes: vec![
            (
                "composite-order".into(),
                "system first, battery second (fast index)".into(),
            ),
            (
                "beta_s_delta".into(),
                format!("{}", params.beta_s_delta),
            ),
            (
                "beta_e_delta".into(),
                format!("{}", params.beta_e_delta),
            ),
        ],
    })
}

#[derive(Debug, Clone)]
pub struct CoolingParams {
    /// Inverse temperature times the ladder spacing, one entry per point.
    pub beta_grid: Vec<f64>,
    pub reach: ReachOptions,
}

impl Default for CoolingParams {
    fn default() -> Self {
        CoolingParams {
            beta_grid: (1..=20).map(|k| k as f64 * 0.15).collect(),
            reach: ReachOptions::default(),
        }
    }
}

/// One round of inversion cooling on a four-level ladder: start thermal,
/// invert the populations, then relax optimally. Reports the best ground
/// population gain under unrestricted thermal processes and under
/// memoryless ones. Exact arithmetic throughout.
pub fn cooling_curve(params: &CoolingParams) -> Result<SweepResult> {
    let mode = ArithmeticMode::Rational;
    let points: Vec<SweepPoint> = params
        .beta_grid
        .par_iter()
        .map(|&beta| -> Result<SweepPoint> {
            let ctx = GibbsContext::from_energies(&[0.0, 1.0, 2.0, 3.0], beta, mode)?;
            let gamma = ctx.thermal_population();
            let mut inverted = gamma.clone();
            inverted.reverse();
            let ground = gamma[0].clone();
            let mut objective = vec![Scalar::zero(mode); 4];
            objective[0] = Scalar::one(mode);
            let (tp_max, _) = curve_maximize_linear(&ctx, &inverted, &objective)?;
            let rs = build_reach_set(&ctx, &inverted, params.reach.clone())?;
            let (mtp_max, mtp_point) = maximize_linear(&rs, &objective)?;
            let dp_tp = &tp_max - &ground;
            let dp_mtp = &mtp_max - &ground;
            let witness = is_reachable(&rs, &mtp_point)?;
            let mut protocols = Vec::new();
            if let Some(seq) = witness.protocol {
                protocols.push(("mtp".to_string(), seq));
            }
            let (tp_f, tp_e) = exact_pair(&dp_tp);
            let (mtp_f, mtp_e) = exact_pair(&dp_mtp);
            Ok(SweepPoint {
                axis: beta,
                label: format!("beta_delta={beta}"),
                values: vec![tp_f, mtp_f],
                exact: vec![tp_e, mtp_e],
                protocols,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        name: "cooling",
        axis_label: "beta_delta",
        columns: vec!["dp0_tp", "dp0_mtp"],
        points,
        mode,
        tolerance: 0.0,
        seed: None,
        notes: vec![(
            "ladder".into(),
            "four equidistant levels, unit spacing".into(),
        )],
    })
}

#[derive(Debug, Clone)]
pub struct CatalysisParams {
    /// Bath inverse temperatures (unit system splitting), one per point.
    pub beta_e_grid: Vec<f64>,
    /// Catalyst qubit splitting, in units of the system splitting.
    pub catalyst_gap: f64,
    /// Catalyst preparation inverse temperature; bath temperature if unset.
    pub catalyst_beta: Option<f64>,
    /// Absolute width of the final-temperature bisections.
    pub fin_tol: f64,
    pub reach: ReachOptions,
}

impl Default for CatalysisParams {
    fn default() -> Self {
        CatalysisParams {
            beta_e_grid: vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            catalyst_gap: 1.0,
            catalyst_beta: None,
            fin_tol: DEFAULT_BISECTION_TOL,
            reach: ReachOptions::default(),
        }
    }
}

/// Cooling a qubit that starts at half the bath's inverse temperature.
/// Reports the coldest reachable thermal state alone, with a thermal qubit
/// catalyst that must return unchanged and uncorrelated, and under
/// unrestricted thermal processes.
pub fn catalysis_curve(params: &CatalysisParams) -> Result<SweepResult> {
    let mode = ArithmeticMode::Rational;
    let points: Vec<SweepPoint> = params
        .beta_e_grid
        .par_iter()
        .map(|&beta_e| -> Result<SweepPoint> {
            let ctx_s = GibbsContext::from_energies(&[0.0, 1.0], beta_e, mode)?;
            let p_s = ctx_s.thermal_at(beta_e / 2.0)?;
            let lo = beta_e / 2.0;
            let hi0 = beta_e * 1.5 + 0.5;

            let rs2 = build_reach_set(&ctx_s, &p_s, params.reach.clone())?;
            let beta_mtp = bisect_max_feasible(
                |b| decided_reachable(&rs2, &ctx_s.thermal_at(b)?),
                lo,
                hi0,
                params.fin_tol,
            )?;

            let ctx_c =
                GibbsContext::from_energies(&[0.0, params.catalyst_gap], beta_e, mode)?;
            let catalyst = ctx_c.thermal_at(params.catalyst_beta.unwrap_or(beta_e))?;
            let comp = ctx_s.tensor(&ctx_c)?;
            let source = comp.kron(&p_s, &catalyst)?;
            let target = |b: f64| -> Result<Population> {
                comp.kron(&ctx_s.thermal_at(b)?, &catalyst)
            };

            let rs4 = build_reach_set(&comp.context, &source, params.reach.clone())?;
            let beta_cat = bisect_max_feasible(
                |b| decided_reachable(&rs4, &target(b)?),
                lo,
                hi0,
                params.fin_tol,
            )?;
            let witness = is_reachable(&rs4, &target(beta_cat)?)?;

            let beta_tp = bisect_max_feasible(
                |b| thermomajorizes(&comp.context, &source, &target(b)?),
                lo,
                hi0,
                params.fin_tol,
            )?;

            let mut protocols = Vec::new();
            if let Some(seq) = witness.protocol {
                protocols.push(("catalyst".to_string(), seq));
            }
            Ok(SweepPoint {
                axis: beta_e,
                label: format!("beta_e={beta_e}"),
                values: vec![beta_mtp, beta_cat, beta_tp],
                exact: vec![None, None, None],
                protocols,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        name: "catalysis",
        axis_label: "beta_e",
        columns: vec!["beta_fin_mtp", "beta_fin_cat", "beta_fin_tp"],
        points,
        mode,
        tolerance: params.fin_tol,
        seed: None,
        notes: vec![
            ("catalyst-gap".into(), format!("{}", params.catalyst_gap)),
            (
                "catalyst-beta".into(),
                params
                    .catalyst_beta
                    .map_or("bath".into(), |b| format!("{b}")),
            ),
        ],
    })
}

#[derive(Debug, Clone)]
pub struct HbacParams {
    /// Bath inverse temperature times the (shared) qubit splitting.
    pub beta_delta: f64,
    /// Target-qubit input for the round; defaults to thermal at twice the
    /// bath's inverse temperature, a generic mid-cooling round state.
    pub round_input: Option<Population>,
    pub reach: ReachOptions,
}

impl Default for HbacParams {
    fn default() -> Self {
        HbacParams {
            beta_delta: 1.0,
            round_input: None,
            reach: ReachOptions::default(),
        }
    }
}

/// Exact output of one permutation branch: the best ground population of
/// the target marginal subject to the ancilla resetting exactly.
#[derive(Debug, Clone)]
pub struct HbacBranch {
    pub permutation: [usize; 4],
    pub best_ground: Scalar,
    pub protocol: Option<ControlSequence>,
}

/// One round of two-qubit heat-bath cooling: permute the four populations
/// of target tensor ancilla, then find the memoryless relaxation that
/// maximizes the target's ground population while returning the ancilla
/// exactly thermal and uncorrelated. All 24 permutations are scored
/// exactly, so ties are genuine.
pub fn hbac_branches(params: &HbacParams) -> Result<Vec<HbacBranch>> {
    let mode = ArithmeticMode::Rational;
    let ctx_q = GibbsContext::from_energies(&[0.0, 1.0], params.beta_delta, mode)?;
    let comp = ctx_q.tensor(&ctx_q)?;
    let gamma_anc = ctx_q.thermal_population();
    let round_input = match &params.round_input {
        Some(p) => {
            ctx_q.validate_population(p)?;
            p.clone()
        }
        None => ctx_q.thermal_at(2.0 * params.beta_delta)?,
    };
    let joint = comp.kron(&round_input, &gamma_anc)?;

    // The ancilla-reset targets (g, 1-g) (x) gamma form a line through the
    // joint thermal state; its direction moves weight from the excited
    // target branch to the ground branch.
    let ground_branch = comp.kron(&qubit_population(mode, 1.0)?, &gamma_anc)?;
    let excited_branch = comp.kron(&qubit_population(mode, 0.0)?, &gamma_anc)?;
    let dir: Vec<Scalar> = ground_branch
        .iter()
        .zip(&excited_branch)
        .map(|(a, b)| a - b)
        .collect();
    let base = comp.kron(&ctx_q.thermal_population(), &gamma_anc)?;
    let gamma_ground = ctx_q.thermal_population()[0].clone();

    let perms = all_permutations_of_four();
    let branches: Vec<HbacBranch> = perms
        .par_iter()
        .map(|perm| -> Result<HbacBranch> {
            let permuted: Population = (0..4).map(|k| joint[perm[k]].clone()).collect();
            let rs = build_reach_set(&comp.context, &permuted, params.reach.clone())?;
            let line = maximize_along_line(&rs, &base, &dir)?;
            let Some((t, point)) = line else {
                return Err(Error::Internal(
                    "the joint thermal state must be reachable".into(),
                ));
            };
            let best_ground = &gamma_ground + &t;
            let witness = is_reachable(&rs, &point)?;
            Ok(HbacBranch {
                permutation: *perm,
                best_ground,
                protocol: witness.protocol,
            })
        })
        .collect::<Result<_>>()?;
    Ok(branches)
}

/// All permutations of four levels in lexicographic order.
fn all_permutations_of_four() -> Vec<[usize; 4]> {
    use itertools::Itertools;
    (0..4usize)
        .permutations(4)
        .map(|p| [p[0], p[1], p[2], p[3]])
        .collect()
}

/// The permutation that flips the ancilla bit: levels are ordered
/// `(t, a) -> 2 t + a`, so it swaps 0 with 1 and 2 with 3.
pub const ANCILLA_FLIP: [usize; 4] = [1, 0, 3, 2];

/// The sweep wrapper around [`hbac_branches`]: one point per permutation,
/// optimal branches carrying their protocols, and the exact tie structure
/// noted in the metadata.
pub fn hbac_optimize(params: &HbacParams) -> Result<SweepResult> {
    let branches = hbac_branches(params)?;
    let best = branches
        .iter()
        .map(|b| &b.best_ground)
        .max_by(|a, b| a.cmp_total(b))
        .expect("24 branches")
        .clone();
    let optimal: Vec<String> = branches
        .iter()
        .filter(|b| b.best_ground == best)
        .map(|b| format!("{:?}", b.permutation))
        .collect();
    let points: Vec<SweepPoint> = branches
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let is_best = b.best_ground == best;
            let mut protocols = Vec::new();
            if is_best {
                if let Some(seq) = &b.protocol {
                    protocols.push(("optimal".to_string(), seq.clone()));
                }
            }
            let (g_f, g_e) = exact_pair(&b.best_ground);
            SweepPoint {
                axis: k as f64,
                label: format!("perm={:?}", b.permutation),
                values: vec![g_f, if is_best { 1.0 } else { 0.0 }],
                exact: vec![g_e, None],
                protocols,
            }
        })
        .collect();
    Ok(SweepResult {
        name: "hbac",
        axis_label: "permutation_index",
        columns: vec!["best_ground", "optimal"],
        points,
        mode: ArithmeticMode::Rational,
        tolerance: 0.0,
        seed: None,
        notes: vec![
            ("beta_delta".into(), format!("{}", params.beta_delta)),
            ("optimal-count".into(), format!("{}", optimal.len())),
            ("optimal-permutations".into(), optimal.join("; ")),
        ],
    })
}

#[derive(Debug, Clone)]
pub struct PhotoisomerizationParams {
    /// Initial stable-configuration population; the rest starts excited.
    pub p00: f64,
    /// Energies of the stable ground, switched ground, and excited levels.
    pub levels: [f64; 3],
    pub beta: f64,
    /// Random endpoints for the Monte Carlo lower bound; zero skips it.
    pub mc_samples: usize,
    pub seed: u64,
    pub reach: ReachOptions,
}

impl Default for PhotoisomerizationParams {
    fn default() -> Self {
        PhotoisomerizationParams {
            p00: 0.2,
            levels: [0.0, 0.4, 1.0],
            beta: 2.0,
            mc_samples: 0,
            seed: 7,
            reach: ReachOptions::default(),
        }
    }
}

/// Best probability of landing in the switched configuration (the middle
/// level) before full rethermalization, under unrestricted thermal
/// processes and under memoryless ones, plus an optional Monte Carlo lower
/// bound on the memoryless side.
pub fn photoisomerization_yield(params: &PhotoisomerizationParams) -> Result<SweepResult> {
    let mode = ArithmeticMode::Rational;
    let ctx = GibbsContext::from_energies(&params.levels, params.beta, mode)?;
    let p0 = ctx.population_from_f64(&[params.p00, 0.0, 1.0 - params.p00])?;
    let objective = vec![Scalar::zero(mode), Scalar::one(mode), Scalar::zero(mode)];
    let (tp_max, _) = curve_maximize_linear(&ctx, &p0, &objective)?;
    let rs = build_reach_set(&ctx, &p0, params.reach.clone())?;
    let (mtp_max, mtp_point) = maximize_linear(&rs, &objective)?;
    let witness = is_reachable(&rs, &mtp_point)?;

    let mut columns = vec!["yield_tp", "yield_mtp"];
    let (tp_f, tp_e) = exact_pair(&tp_max);
    let (mtp_f, mtp_e) = exact_pair(&mtp_max);
    let mut values = vec![tp_f, mtp_f];
    let mut exact = vec![tp_e, mtp_e];
    if params.mc_samples > 0 {
        columns.push("yield_mc");
        values.push(monte_carlo_switch_bound(params)?);
        exact.push(None);
    }
    let mut protocols = Vec::new();
    if let Some(seq) = witness.protocol {
        protocols.push(("mtp".to_string(), seq));
    }
    Ok(SweepResult {
        name: "photoisomerization",
        axis_label: "beta",
        columns,
        points: vec![SweepPoint {
            axis: params.beta,
            label: format!("p00={}", params.p00),
            values,
            exact,
            protocols,
        }],
        mode,
        tolerance: 0.0,
        seed: (params.mc_samples > 0).then_some(params.seed),
        notes: vec![(
            "levels".into(),
            format!(
                "{}, {}, {}",
                params.levels[0], params.levels[1], params.levels[2]
            ),
        )],
    })
}

/// Monte Carlo lower bound on the best switched-level population under
/// memoryless dynamics: random schedules of elementary moves and random
/// fixed-rate evolutions, tracking the best intermediate value seen.
fn monte_carlo_switch_bound(params: &PhotoisomerizationParams) -> Result<f64> {
    let ctx = GibbsContext::from_energies(&params.levels, params.beta, ArithmeticMode::Float)?;
    let p0 = ctx.population_from_f64(&[params.p00, 0.0, 1.0 - params.p00])?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best = p0[1].to_f64();
    for sample in 0..params.mc_samples {
        if sample % 2 == 0 {
            let seq = sample_control_sequence(&ctx, &mut rng, 12);
            let traj =
                crate::thermalization::Trajectory::sample(&ctx, &p0, &seq, 4)?;
            for state in traj.states() {
                best = best.max(state[1].to_f64());
            }
        } else {
            let generator = random_detailed_balance_generator(&ctx, &mut rng, 0.7)?;
            let mut state = p0.clone();
            for _ in 0..6 {
                use rand::Rng;
                let t = rng.gen_range(0.01..1.5);
                state = generator.evolve(&ctx, &state, t)?;
                best = best.max(state[1].to_f64());
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::{canonical_beta_order, ThermoCurve};
    use crate::thermalization::apply_sequence as apply;

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d, ArithmeticMode::Rational)
    }

    #[test]
    fn bisection_demands_a_bracket() {
        let err = bisect_min_feasible(|_| Ok(false), 0.0, 1.0, 1e-6).unwrap_err();
        assert!(matches!(err, Error::BisectionBracket(_)));
        let err = bisect_max_feasible(|_| Ok(false), 0.0, 1.0, 1e-6).unwrap_err();
        assert!(matches!(err, Error::BisectionBracket(_)));
    }

    #[test]
    fn bisection_finds_a_known_threshold() {
        let x = bisect_min_feasible(|v| Ok(v >= 0.37), 0.0, 1.0, 1e-9).unwrap();
        assert!((x - 0.37).abs() <= 1e-9);
        assert!(x >= 0.37);
        let x = bisect_max_feasible(|v| Ok(v <= 0.37), 0.0, 0.1, 1e-9).unwrap();
        assert!((x - 0.37).abs() <= 1e-9);
        assert!(x <= 0.37);
    }

    #[test]
    fn cooling_at_the_dyadic_point_matches_the_curve_oracle() {
        let params = CoolingParams {
            beta_grid: vec![std::f64::consts::LN_2],
            ..CoolingParams::default()
        };
        let result = cooling_curve(&params).unwrap();
        let point = &result.points[0];
        // Independent oracle: evaluate the inverted state's comparison
        // curve at the equilibrium ground weight.
        let ctx = GibbsContext::from_energies(
            &[0.0, 1.0, 2.0, 3.0],
            std::f64::consts::LN_2,
            ArithmeticMode::Rational,
        )
        .unwrap();
        let gamma = ctx.thermal_population();
        let mut inverted = gamma.clone();
        inverted.reverse();
        let order = canonical_beta_order(&ctx, &inverted).unwrap();
        let curve = ThermoCurve::from_order(&ctx, &inverted, &order).unwrap();
        let oracle = &curve.value_at(&gamma[0]).unwrap() - &gamma[0];
        assert_eq!(oracle, rat(49, 120));
        assert_eq!(point.exact[0].as_ref().unwrap(), &oracle);
        // The memoryless optimum cannot beat the unrestricted one.
        assert!(point.values[1] <= point.values[0]);
        assert!(point.values[1] >= 0.0);
        // The claimed optimum replays.
        let seq = &point.protocols[0].1;
        let replayed = apply(&ctx, &inverted, seq).unwrap();
        let reached = &replayed[0] - &gamma[0];
        assert_eq!(reached, *point.exact[1].as_ref().unwrap());
    }

    #[test]
    fn hbac_flip_branch_resets_the_ancilla_with_full_moves() {
        let params = HbacParams::default();
        let branches = hbac_branches(&params).unwrap();
        let best = branches
            .iter()
            .map(|b| b.best_ground.clone())
            .max_by(|a, b| a.cmp_total(b))
            .unwrap();
        let flip = branches
            .iter()
            .find(|b| b.permutation == ANCILLA_FLIP)
            .unwrap();
        assert_eq!(flip.best_ground, best, "the ancilla flip is optimal");
        let seq = flip.protocol.as_ref().unwrap().simplified();
        for step in seq.iter() {
            assert_eq!(step.lambda(), &Scalar::one(ArithmeticMode::Rational));
        }
    }

    #[test]
    fn photoisomerization_without_excitation_has_closed_form_yields() {
        // From a sharp ground start the optima have closed forms. The
        // unrestricted bound is the comparison curve's value at the middle
        // weight, gamma_1 / gamma_0; the memoryless optimum is the
        // pair-equilibrium share gamma_1 / (gamma_0 + gamma_1), because
        // every elementary move from the sharp state only drains the
        // ground level toward pair equilibrium.
        let params = PhotoisomerizationParams {
            p00: 1.0,
            ..PhotoisomerizationParams::default()
        };
        let result = photoisomerization_yield(&params).unwrap();
        let point = &result.points[0];
        let ctx = GibbsContext::from_energies(
            &params.levels,
            params.beta,
            ArithmeticMode::Rational,
        )
        .unwrap();
        let gamma = ctx.thermal_population();
        let tp_oracle = &gamma[1] / &gamma[0];
        let mtp_oracle = &gamma[1] / &(&gamma[0] + &gamma[1]);
        assert_eq!(point.exact[0].as_ref().unwrap(), &tp_oracle);
        assert_eq!(point.exact[1].as_ref().unwrap(), &mtp_oracle);
        assert!(point.values[0] > point.values[1]);
    }

    #[test]
    fn sweep_tables_have_one_row_per_point() {
        let params = CoolingParams {
            beta_grid: vec![0.5, 1.0],
            ..CoolingParams::default()
        };
        let result = cooling_curve(&params).unwrap();
        assert_eq!(result.csv_header(), vec!["beta_delta", "dp0_tp", "dp0_mtp"]);
        assert_eq!(result.csv_rows().len(), 2);
        let bundle = result.to_json();
        assert_eq!(bundle["points"].as_array().unwrap().len(), 2);
    }
}
