//! The reach engine: which populations can the elementary moves produce?
//!
//! Full two-level thermalizations generate a finite set of corner states
//! from any source population; every reachable population is dominated by
//! one of those corners inside a shared ordering cone. [`build_reach_set`]
//! closes the source under all full thermalizations with a breadth-first
//! search, keeping per-order antichains of undominated corners.
//! [`is_reachable`] then answers membership queries exactly (in rational
//! mode) and, for positive answers, [`same_order_descent`] synthesizes an
//! explicit protocol: the corner's full-thermalization prefix followed by
//! partial moves on adjacent pairs that walk the corner down onto the
//! target without ever leaving its cone.
//!
//! The same per-corner polytopes support exact optimization:
//! [`extreme_points`], [`maximize_linear`] and [`maximize_along_line`] work
//! on the closure under elementary moves, and the `curve_*` variants on the
//! larger set of everything the source's thermal curve dominates, which is
//! what an unrestricted thermal process could reach.

use std::collections::{BTreeMap, VecDeque};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::context::{GibbsContext, Population};
use crate::error::{Error, Result};
use crate::majorization::{
    all_compatible_orders, all_orders, cumulative_sums, dominates_in_order, is_compatible,
    BetaOrder, ThermoCurve,
};
use crate::scalar::{ArithmeticMode, Scalar};
use crate::thermalization::{
    apply_sequence, full_thermalize, partial_thermalize, ControlSequence, ElementaryControl,
};

/// Residual (largest entry difference) below which a synthesized protocol
/// counts as having hit its target.
pub const DEFAULT_DESCENT_EPS: f64 = 1e-12;

/// Safety cap on descent sweeps; convergence is geometric, so hitting this
/// means something is wrong.
const MAX_DESCENT_SWEEPS: usize = 10_000;

/// Search depth at which the closure gives up: enough full thermalizations
/// to revisit every pair `2d` times.
pub fn default_depth_bound(d: usize) -> usize {
    d * d * (d - 1)
}

/// Tuning knobs for [`build_reach_set`] and the queries on its result.
#[derive(Debug, Clone)]
pub struct ReachOptions {
    /// Maximum number of full thermalizations per explored path; `None`
    /// means [`default_depth_bound`].
    pub depth_bound: Option<usize>,
    /// Residual at which protocol synthesis stops.
    pub descent_eps: f64,
}

impl Default for ReachOptions {
    fn default() -> Self {
        ReachOptions {
            depth_bound: None,
            descent_eps: DEFAULT_DESCENT_EPS,
        }
    }
}

/// One undominated corner of the reach set: a state produced by full
/// thermalizations only, with the path that produced it.
#[derive(Debug, Clone)]
pub struct FrontierMember {
    state: Population,
    path: ControlSequence,
    cums: Vec<Scalar>,
}

impl FrontierMember {
    pub fn state(&self) -> &Population {
        &self.state
    }

    /// Full-thermalization prefix leading from the source to this corner.
    pub fn path(&self) -> &ControlSequence {
        &self.path
    }

    /// Cumulative sums of the state along the owning order.
    pub fn cums(&self) -> &[Scalar] {
        &self.cums
    }
}

/// Search counters reported alongside a closed reach set.
#[derive(Debug, Clone, Default)]
pub struct ReachDiagnostics {
    /// States popped from the queue and expanded.
    pub expansions: usize,
    /// States that entered at least one antichain and were enqueued.
    pub states_enqueued: usize,
    /// Per-order antichain insertions.
    pub inserts: usize,
    /// Candidate states discarded because an existing corner dominated them.
    pub discards: usize,
    /// Longest path among enqueued states.
    pub max_depth: usize,
    /// True when the depth bound stopped the search before the closure was
    /// certified complete; queries then degrade negative answers to
    /// "unknown".
    pub bound_hit: bool,
}

/// The closed (or bounded) forward orbit of one source population.
#[derive(Debug, Clone)]
pub struct ReachSet {
    ctx: GibbsContext,
    source: Population,
    frontier: BTreeMap<BetaOrder, Vec<FrontierMember>>,
    diagnostics: ReachDiagnostics,
    options: ReachOptions,
}

impl ReachSet {
    pub fn context(&self) -> &GibbsContext {
        &self.ctx
    }

    pub fn source(&self) -> &Population {
        &self.source
    }

    pub fn diagnostics(&self) -> &ReachDiagnostics {
        &self.diagnostics
    }

    pub fn options(&self) -> &ReachOptions {
        &self.options
    }

    /// Orders with a non-empty antichain, each with its corners.
    pub fn frontier(&self) -> impl Iterator<Item = (&BetaOrder, &[FrontierMember])> {
        self.frontier.iter().map(|(o, m)| (o, m.as_slice()))
    }

    pub fn order_count(&self) -> usize {
        self.frontier.len()
    }

    pub fn member_count(&self) -> usize {
        self.frontier.values().map(Vec::len).sum()
    }
}

/// Outcome of a membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReachDecision {
    Reachable,
    Unreachable,
    /// The closure hit its depth bound, so a missing certificate does not
    /// prove unreachability.
    Unknown,
}

impl std::fmt::Display for ReachDecision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReachDecision::Reachable => write!(f, "reachable"),
            ReachDecision::Unreachable => write!(f, "unreachable"),
            ReachDecision::Unknown => write!(f, "unknown"),
        }
    }
}

/// A membership answer, with a replayed protocol when the answer is yes.
#[derive(Debug, Clone)]
pub struct Reachability {
    pub decision: ReachDecision,
    /// Elementary moves from the source to the target (within the descent
    /// residual), present only for reachable targets.
    pub protocol: Option<ControlSequence>,
    /// State actually produced by replaying `protocol` from the source.
    pub achieved: Option<Population>,
    /// Largest entry difference between `achieved` and the target.
    pub residual: Option<f64>,
    /// The ordering cone in which domination was found.
    pub via_order: Option<BetaOrder>,
}

fn lex_cmp(a: &[Scalar], b: &[Scalar]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let c = x.cmp_total(y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

/// Inserts a candidate into one order's antichain unless an existing corner
/// already dominates it; corners the candidate dominates are evicted.
fn antichain_insert(
    members: &mut Vec<FrontierMember>,
    state: &Population,
    path: &ControlSequence,
    cums: Vec<Scalar>,
    eta: f64,
    diagnostics: &mut ReachDiagnostics,
) -> bool {
    for member in members.iter() {
        if dominates_in_order(&member.cums, &cums, eta) {
            diagnostics.discards += 1;
            return false;
        }
    }
    members.retain(|member| !dominates_in_order(&cums, &member.cums, eta));
    members.push(FrontierMember {
        state: state.clone(),
        path: path.clone(),
        cums,
    });
    diagnostics.inserts += 1;
    true
}

/// Closes `source` under all full two-level thermalizations.
///
/// The search is breadth first and fully deterministic: pairs are expanded
/// in lexicographic order and antichains keep their insertion order, so two
/// runs produce identical frontiers, paths included.
pub fn build_reach_set(
    ctx: &GibbsContext,
    source: &Population,
    options: ReachOptions,
) -> Result<ReachSet> {
    ctx.validate_population(source)?;
    let d = ctx.dim();
    let bound = options.depth_bound.unwrap_or_else(|| default_depth_bound(d));
    let eta = ctx.eta();
    let mut diagnostics = ReachDiagnostics::default();
    let mut frontier: BTreeMap<BetaOrder, Vec<FrontierMember>> = BTreeMap::new();

    let empty = ControlSequence::default();
    for order in all_compatible_orders(ctx, source)? {
        let cums = cumulative_sums(source, &order);
        antichain_insert(
            frontier.entry(order).or_default(),
            source,
            &empty,
            cums,
            eta,
            &mut diagnostics,
        );
    }
    let mut queue: VecDeque<(Population, ControlSequence)> = VecDeque::new();
    queue.push_back((source.clone(), empty));
    diagnostics.states_enqueued = 1;

    while let Some((state, path)) = queue.pop_front() {
        diagnostics.expansions += 1;
        for i in 0..d {
            for j in (i + 1)..d {
                let child = full_thermalize(ctx, &state, i, j)?;
                let mut child_path = path.clone();
                child_path.push(
                    ElementaryControl::full(i, j, ctx.mode())
                        .expect("distinct in-range levels"),
                );
                let mut inserted = false;
                for order in all_compatible_orders(ctx, &child)? {
                    let cums = cumulative_sums(&child, &order);
                    if antichain_insert(
                        frontier.entry(order).or_default(),
                        &child,
                        &child_path,
                        cums,
                        eta,
                        &mut diagnostics,
                    ) {
                        inserted = true;
                    }
                }
                if inserted {
                    diagnostics.max_depth = diagnostics.max_depth.max(child_path.len());
                    if child_path.len() < bound {
                        diagnostics.states_enqueued += 1;
                        queue.push_back((child, child_path));
                    } else {
                        diagnostics.bound_hit = true;
                    }
                }
            }
        }
    }
    // Eviction can leave an order empty; drop it so queries skip it cheaply.
    frontier.retain(|_, members| !members.is_empty());
    Ok(ReachSet {
        ctx: ctx.clone(),
        source: source.clone(),
        frontier,
        diagnostics,
        options,
    })
}

/// Decides whether `target` is reachable from the set's source, and if so
/// synthesizes and replays a protocol.
///
/// The corner used as a starting point is chosen deterministically: the
/// shortest path wins, then the lexicographically smallest corner state,
/// then the smallest order.
pub fn is_reachable(rs: &ReachSet, target: &Population) -> Result<Reachability> {
    rs.ctx.validate_population(target)?;
    let eta = rs.ctx.eta();
    let mut best: Option<(&BetaOrder, &FrontierMember)> = None;
    for (order, members) in &rs.frontier {
        if !is_compatible(&rs.ctx, target, order)? {
            continue;
        }
        let target_cums = cumulative_sums(target, order);
        for member in members {
            if !dominates_in_order(&member.cums, &target_cums, eta) {
                continue;
            }
            let better = match &best {
                None => true,
                Some((border, bmember)) => {
                    match member.path.len().cmp(&bmember.path.len()) {
                        std::cmp::Ordering::Less => true,
                        std::cmp::Ordering::Greater => false,
                        std::cmp::Ordering::Equal => {
                            match lex_cmp(&member.state, &bmember.state) {
                                std::cmp::Ordering::Less => true,
                                std::cmp::Ordering::Greater => false,
                                std::cmp::Ordering::Equal => order < *border,
                            }
                        }
                    }
                }
            };
            if better {
                best = Some((order, member));
            }
        }
    }
    let Some((order, member)) = best else {
        let decision = if rs.diagnostics.bound_hit {
            ReachDecision::Unknown
        } else {
            ReachDecision::Unreachable
        };
        return Ok(Reachability {
            decision,
            protocol: None,
            achieved: None,
            residual: None,
            via_order: None,
        });
    };
    let descent = same_order_descent(
        &rs.ctx,
        &member.state,
        target,
        order,
        rs.options.descent_eps,
    )?;
    let mut protocol = member.path.clone();
    for step in &descent.sequence {
        protocol.push(step.clone());
    }
    let protocol = protocol.simplified();
    // Replay from scratch; the reported endpoint is never taken on trust.
    let achieved = apply_sequence(&rs.ctx, &rs.source, &protocol)?;
    let residual = linf_distance(&achieved, target);
    Ok(Reachability {
        decision: ReachDecision::Reachable,
        protocol: Some(protocol),
        achieved: Some(achieved),
        residual: Some(residual),
        via_order: Some(order.clone()),
    })
}

/// Result of walking a dominating state down onto a target.
#[derive(Debug, Clone)]
pub struct DescentOutcome {
    pub sequence: ControlSequence,
    pub final_state: Population,
    /// Largest entry difference from the target at termination.
    pub residual: f64,
    pub sweeps: usize,
}

fn linf_distance(a: &Population, b: &Population) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs().to_f64())
        .fold(0.0, f64::max)
}

/// Walks `start` down onto `target` with partial moves on pairs adjacent in
/// `order`, never leaving the order's cone and never crossing below the
/// target's cumulative sums.
///
/// Preconditions: both states are compatible with `order` and `start`
/// dominates `target` along it. Each sweep visits the `d - 1` adjacent
/// pairs top-down and closes as much of the cumulative-sum gap as a single
/// move allows; the remaining gap contracts geometrically, so the loop
/// terminates well before the safety cap.
pub fn same_order_descent(
    ctx: &GibbsContext,
    start: &Population,
    target: &Population,
    order: &BetaOrder,
    eps: f64,
) -> Result<DescentOutcome> {
    ctx.validate_population(start)?;
    ctx.validate_population(target)?;
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::BadTolerance(eps));
    }
    if !is_compatible(ctx, start, order)? {
        return Err(Error::DescentPrecondition("start not compatible with order"));
    }
    if !is_compatible(ctx, target, order)? {
        return Err(Error::DescentPrecondition(
            "target not compatible with order",
        ));
    }
    let eta = ctx.eta();
    let target_cums = cumulative_sums(target, order);
    if !dominates_in_order(&cumulative_sums(start, order), &target_cums, eta) {
        return Err(Error::DescentPrecondition(
            "start does not dominate target along order",
        ));
    }

    let one = Scalar::one(ctx.mode());
    let zero = Scalar::zero(ctx.mode());
    // Cumulative-sum gaps at or below this threshold are left alone; two of
    // them bound one entry difference, so the final residual stays within
    // eps. Skipping them keeps move fractions off microscopic values.
    let gap_floor = eps / 4.0;
    let grid_bits = lambda_grid_bits(eps);
    let mut state = start.clone();
    let mut sequence = ControlSequence::default();
    for sweep in 0..MAX_DESCENT_SWEEPS {
        let residual = linf_distance(&state, target);
        if residual <= eps {
            return Ok(DescentOutcome {
                sequence,
                final_state: state,
                residual,
                sweeps: sweep,
            });
        }
        let mut moved = false;
        for k in 1..order.len() {
            let (a, b) = (order.as_slice()[k - 1], order.as_slice()[k]);
            // Thermalizing (a, b) only changes the k-th cumulative sum,
            // pulling it from its current value toward the pair-equilibrium
            // value; pick the fraction that lands on the target's sum,
            // capped at a full move.
            let head: Scalar = order.as_slice()[..k - 1]
                .iter()
                .fold(zero.clone(), |acc, &i| &acc + &state[i]);
            let current = &head + &state[a];
            let equilibrated = full_thermalize(ctx, &state, a, b)?;
            let floor = &head + &equilibrated[a];
            let room = &current - &floor;
            let gap = &current - &target_cums[k - 1];
            if gap.to_f64() <= gap_floor
                || room.cmp_total(&zero) != std::cmp::Ordering::Greater
            {
                continue;
            }
            let mut lambda = if gap.cmp_total(&room) == std::cmp::Ordering::Less {
                &gap / &room
            } else {
                one.clone()
            };
            lambda = cap_denominator(lambda, grid_bits);
            if lambda.cmp_total(&zero) != std::cmp::Ordering::Greater {
                continue;
            }
            state = partial_thermalize(ctx, &state, a, b, &lambda)?;
            sequence.push(ElementaryControl::new(a, b, lambda)?);
            moved = true;
        }
        if !moved {
            return Err(Error::NoProgress {
                residual: linf_distance(&state, target),
            });
        }
    }
    Err(Error::NoProgress {
        residual: linf_distance(&state, target),
    })
}

/// Grid resolution for rounded move fractions: fine enough that any move
/// worth making (gap above `eps / 4`, room at most one) floors to a nonzero
/// multiple, coarse enough to bound denominators.
fn lambda_grid_bits(eps: f64) -> u32 {
    let needed = (4.0 / eps).log2().ceil() as u32 + 1;
    needed.max(34)
}

/// Keeps exact move fractions from accumulating huge denominators: a
/// fraction whose reduced denominator exceeds 2^40 is floored onto the
/// dyadic grid. Flooring can only undershoot, never overshoot, and loses at
/// most half the move; the next sweep mops up the remainder.
fn cap_denominator(lambda: Scalar, grid_bits: u32) -> Scalar {
    match &lambda {
        Scalar::Float(_) => lambda,
        Scalar::Rational(l) => {
            if l.denom().bits() <= 40 {
                return lambda;
            }
            let grid = BigInt::one() << grid_bits;
            let floored = (l * BigRational::from(grid.clone())).floor().to_integer();
            if floored.is_positive() {
                Scalar::Rational(BigRational::new(floored, grid))
            } else {
                Scalar::Rational(BigRational::zero())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Exact polytope machinery (rational mode only).
// ---------------------------------------------------------------------------

fn to_rationals(p: &[Scalar]) -> Result<Vec<BigRational>> {
    p.iter()
        .map(|x| {
            x.as_rational()
                .cloned()
                .ok_or(Error::WrongMode("rational"))
        })
        .collect()
}

fn from_rationals(p: Vec<BigRational>) -> Population {
    p.into_iter().map(Scalar::Rational).collect()
}

/// One cell of the reach set in half-space form: rows `a . q <= b` over the
/// hyperplane `sum q = 1`.
struct Cell {
    rows: Vec<(Vec<BigRational>, BigRational)>,
    dim: usize,
}

impl Cell {
    /// The cone of `order` (ratios non-increasing, last entry non-negative)
    /// cut by upper bounds on the cumulative sums along `order`.
    fn new(ctx: &GibbsContext, order: &BetaOrder, bounds: &[BigRational]) -> Result<Cell> {
        let d = ctx.dim();
        let gamma = to_rationals(ctx.gamma())?;
        let mut rows = Vec::with_capacity(2 * d - 1);
        for w in order.as_slice().windows(2) {
            // q_a / gamma_a >= q_b / gamma_b, written as a "<=" row.
            let (a, b) = (w[0], w[1]);
            let mut coeff = vec![BigRational::zero(); d];
            coeff[a] = -gamma[b].clone();
            coeff[b] = gamma[a].clone();
            rows.push((coeff, BigRational::zero()));
        }
        let last = *order.as_slice().last().expect("non-empty order");
        let mut coeff = vec![BigRational::zero(); d];
        coeff[last] = -BigRational::one();
        rows.push((coeff, BigRational::zero()));
        for (k, bound) in bounds.iter().take(d - 1).enumerate() {
            let mut coeff = vec![BigRational::zero(); d];
            for &i in &order.as_slice()[..=k] {
                coeff[i] = BigRational::one();
            }
            rows.push((coeff, bound.clone()));
        }
        Ok(Cell { rows, dim: d })
    }

    fn contains(&self, q: &[BigRational]) -> bool {
        self.rows.iter().all(|(coeff, rhs)| {
            let lhs: BigRational = coeff.iter().zip(q).map(|(c, x)| c * x).sum();
            lhs <= *rhs
        })
    }

    /// All vertices, by brute-force activation of `d - 1` rows at a time
    /// against the normalization hyperplane.
    fn vertices(&self) -> Vec<Vec<BigRational>> {
        let d = self.dim;
        let mut found: Vec<Vec<BigRational>> = Vec::new();
        for active in (0..self.rows.len()).combinations(d - 1) {
            let mut matrix = Vec::with_capacity(d);
            let mut rhs = Vec::with_capacity(d);
            for &r in &active {
                matrix.push(self.rows[r].0.clone());
                rhs.push(self.rows[r].1.clone());
            }
            matrix.push(vec![BigRational::one(); d]);
            rhs.push(BigRational::one());
            let Some(solution) = solve_exact(matrix, rhs) else {
                continue;
            };
            if self.contains(&solution) && !found.contains(&solution) {
                found.push(solution);
            }
        }
        found
    }

    /// The (possibly empty) interval of `t` with `base + t * dir` inside
    /// the cell. `None` marks an empty intersection; an unbounded side is
    /// impossible because the cell is compact, and is reported as an error
    /// by the callers that would notice.
    fn line_interval(
        &self,
        base: &[BigRational],
        dir: &[BigRational],
    ) -> Option<(Option<BigRational>, Option<BigRational>)> {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for (coeff, rhs) in &self.rows {
            let slope: BigRational = coeff.iter().zip(dir).map(|(c, x)| c * x).sum();
            let offset: BigRational = coeff.iter().zip(base).map(|(c, x)| c * x).sum();
            let margin = rhs - &offset;
            if slope.is_zero() {
                if margin.is_negative() {
                    return None;
                }
                continue;
            }
            let crossing = &margin / &slope;
            if slope.is_positive() {
                if hi.as_ref().is_none_or(|h| crossing < *h) {
                    hi = Some(crossing);
                }
            } else if lo.as_ref().is_none_or(|l| crossing > *l) {
                lo = Some(crossing);
            }
        }
        if let (Some(l), Some(h)) = (&lo, &hi) {
            if l > h {
                return None;
            }
        }
        Some((lo, hi))
    }
}

/// Gaussian elimination over the rationals; `None` when singular.
#[allow(clippy::needless_range_loop)]
fn solve_exact(
    mut matrix: Vec<Vec<BigRational>>,
    mut rhs: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !matrix[r][col].is_zero())?;
        matrix.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = matrix[col][col].recip();
        for x in matrix[col].iter_mut() {
            *x *= &inv;
        }
        rhs[col] *= &inv;
        for r in 0..n {
            if r == col || matrix[r][col].is_zero() {
                continue;
            }
            let factor = matrix[r][col].clone();
            for c in col..n {
                let sub = &factor * &matrix[col][c];
                matrix[r][c] -= sub;
            }
            let sub = &factor * &rhs[col];
            rhs[r] -= sub;
        }
    }
    Some(rhs)
}

fn member_cell(rs: &ReachSet, order: &BetaOrder, member: &FrontierMember) -> Result<Cell> {
    let bounds = to_rationals(member.cums())?;
    Cell::new(&rs.ctx, order, &bounds)
}

/// Cells of the curve-dominated set: for every order, the cone cut by the
/// source's thermal curve evaluated at that order's weight prefixes.
fn curve_cells(ctx: &GibbsContext, source: &Population) -> Result<Vec<(BetaOrder, Cell)>> {
    if ctx.mode() != ArithmeticMode::Rational {
        return Err(Error::WrongMode("rational"));
    }
    ctx.validate_population(source)?;
    let curve = ThermoCurve::new(ctx, source)?;
    let gamma = ctx.gamma();
    let mut cells = Vec::new();
    for order in all_orders(ctx.dim()) {
        let mut x = Scalar::zero(ctx.mode());
        let mut bounds = Vec::with_capacity(ctx.dim() - 1);
        for &i in &order.as_slice()[..ctx.dim() - 1] {
            x = &x + &gamma[i];
            bounds.push(
                curve
                    .value_at(&x)?
                    .as_rational()
                    .cloned()
                    .expect("rational-mode curve"),
            );
        }
        cells.push((order.clone(), Cell::new(ctx, &order, &bounds)?));
    }
    Ok(cells)
}

/// All vertices of the reach set's cells, deduplicated. Rational mode only.
pub fn extreme_points(rs: &ReachSet) -> Result<Vec<Population>> {
    if rs.ctx.mode() != ArithmeticMode::Rational {
        return Err(Error::WrongMode("rational"));
    }
    let mut all: Vec<Vec<BigRational>> = Vec::new();
    for (order, members) in &rs.frontier {
        for member in members {
            for v in member_cell(rs, order, member)?.vertices() {
                if !all.contains(&v) {
                    all.push(v);
                }
            }
        }
    }
    all.sort();
    Ok(all.into_iter().map(from_rationals).collect())
}

fn best_vertex(
    cells: &[Cell],
    objective: &[BigRational],
) -> Option<(BigRational, Vec<BigRational>)> {
    let mut best: Option<(BigRational, Vec<BigRational>)> = None;
    for cell in cells {
        for v in cell.vertices() {
            let value: BigRational = objective.iter().zip(&v).map(|(c, x)| c * x).sum();
            let better = match &best {
                None => true,
                Some((bv, bp)) => value > *bv || (value == *bv && v < *bp),
            };
            if better {
                best = Some((value, v));
            }
        }
    }
    best
}

/// Exact maximum of a linear objective over the reach set, with the
/// lexicographically smallest maximizer. Rational mode only.
pub fn maximize_linear(rs: &ReachSet, objective: &[Scalar]) -> Result<(Scalar, Population)> {
    if rs.ctx.mode() != ArithmeticMode::Rational {
        return Err(Error::WrongMode("rational"));
    }
    if objective.len() != rs.ctx.dim() {
        return Err(Error::LengthMismatch {
            got: objective.len(),
            want: rs.ctx.dim(),
        });
    }
    let c = to_rationals(objective)?;
    let mut cells = Vec::new();
    for (order, members) in &rs.frontier {
        for member in members {
            cells.push(member_cell(rs, order, member)?);
        }
    }
    let (value, point) = best_vertex(&cells, &c)
        .ok_or_else(|| Error::Internal("reach set has no vertices".into()))?;
    Ok((Scalar::Rational(value), from_rationals(point)))
}

/// Exact maximum of the same objective over everything the source's curve
/// dominates: the optimum an unrestricted thermal process could deliver.
pub fn curve_maximize_linear(
    ctx: &GibbsContext,
    source: &Population,
    objective: &[Scalar],
) -> Result<(Scalar, Population)> {
    if objective.len() != ctx.dim() {
        return Err(Error::LengthMismatch {
            got: objective.len(),
            want: ctx.dim(),
        });
    }
    let c = to_rationals(objective)?;
    let cells: Vec<Cell> = curve_cells(ctx, source)?
        .into_iter()
        .map(|(_, cell)| cell)
        .collect();
    let (value, point) = best_vertex(&cells, &c)
        .ok_or_else(|| Error::Internal("curve set has no vertices".into()))?;
    Ok((Scalar::Rational(value), from_rationals(point)))
}

fn line_maximum(
    cells: &[Cell],
    base: &[BigRational],
    dir: &[BigRational],
) -> Result<Option<BigRational>> {
    let mut best: Option<BigRational> = None;
    for cell in cells {
        let Some((lo, hi)) = cell.line_interval(base, dir) else {
            continue;
        };
        let lo = lo.unwrap_or_else(BigRational::zero).max(BigRational::zero());
        let Some(hi) = hi else {
            return Err(Error::Internal(
                "unbounded direction inside a compact cell".into(),
            ));
        };
        if hi < lo {
            continue;
        }
        if best.as_ref().is_none_or(|b| hi > *b) {
            best = Some(hi);
        }
    }
    Ok(best)
}

fn check_line(
    ctx: &GibbsContext,
    base: &Population,
    dir: &[Scalar],
) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
    if ctx.mode() != ArithmeticMode::Rational {
        return Err(Error::WrongMode("rational"));
    }
    ctx.validate_population(base)?;
    if dir.len() != ctx.dim() {
        return Err(Error::LengthMismatch {
            got: dir.len(),
            want: ctx.dim(),
        });
    }
    let base = to_rationals(base)?;
    let dir = to_rationals(dir)?;
    let drift: BigRational = dir.iter().sum();
    if !drift.is_zero() || dir.iter().all(BigRational::is_zero) {
        return Err(Error::Schema(
            "line direction must be nonzero and sum to zero".into(),
        ));
    }
    Ok((base, dir))
}

/// Exact largest `t >= 0` with `base + t * dir` in the reach set, and the
/// point attaining it. `None` when no point of the ray is reachable.
/// Rational mode only; `dir` must sum to zero.
pub fn maximize_along_line(
    rs: &ReachSet,
    base: &Population,
    dir: &[Scalar],
) -> Result<Option<(Scalar, Population)>> {
    let (base_r, dir_r) = check_line(&rs.ctx, base, dir)?;
    let mut cells = Vec::new();
    for (order, members) in &rs.frontier {
        for member in members {
            cells.push(member_cell(rs, order, member)?);
        }
    }
    let Some(t) = line_maximum(&cells, &base_r, &dir_r)? else {
        return Ok(None);
    };
    let point: Vec<BigRational> = base_r
        .iter()
        .zip(&dir_r)
        .map(|(b, d)| b + &t * d)
        .collect();
    Ok(Some((Scalar::Rational(t), from_rationals(point))))
}

/// Exact largest `t >= 0` with `base + t * dir` dominated by the source's
/// curve: what an unrestricted thermal process could attain along the ray.
pub fn curve_maximize_along_line(
    ctx: &GibbsContext,
    source: &Population,
    base: &Population,
    dir: &[Scalar],
) -> Result<Option<(Scalar, Population)>> {
    let (base_r, dir_r) = check_line(ctx, base, dir)?;
    let cells: Vec<Cell> = curve_cells(ctx, source)?
        .into_iter()
        .map(|(_, cell)| cell)
        .collect();
    let Some(t) = line_maximum(&cells, &base_r, &dir_r)? else {
        return Ok(None);
    };
    let point: Vec<BigRational> = base_r
        .iter()
        .zip(&dir_r)
        .map(|(b, d)| b + &t * d)
        .collect();
    Ok(Some((Scalar::Rational(t), from_rationals(point))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::make_gibbs_context;
    use crate::majorization::thermomajorizes;
    use crate::thermalization::sample_control_sequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d, ArithmeticMode::Rational)
    }

    fn qubit_ctx() -> GibbsContext {
        GibbsContext::from_gamma_f64(&[2.0, 1.0], ArithmeticMode::Rational).unwrap()
    }

    fn qutrit_ctx() -> GibbsContext {
        GibbsContext::from_gamma_f64(&[3.0, 2.0, 1.0], ArithmeticMode::Rational).unwrap()
    }

    #[test]
    fn two_level_reach_set_is_the_segment_down_to_equilibrium() {
        let ctx = qubit_ctx();
        let p = vec![rat(9, 10), rat(1, 10)];
        let rs = build_reach_set(&ctx, &p, ReachOptions::default()).unwrap();
        assert!(!rs.diagnostics().bound_hit);

        // Ground population between equilibrium (2/3) and the start (9/10)
        // is reachable; a single partial move with an exact fraction lands
        // on it with zero residual.
        let q = vec![rat(69, 100), rat(31, 100)];
        let result = is_reachable(&rs, &q).unwrap();
        assert_eq!(result.decision, ReachDecision::Reachable);
        let protocol = result.protocol.unwrap();
        assert_eq!(protocol.len(), 1);
        assert_eq!(protocol.steps[0].levels(), (0, 1));
        assert_eq!(protocol.steps[0].lambda(), &rat(9, 10));
        assert_eq!(result.achieved.unwrap(), q);
        assert_eq!(result.residual.unwrap(), 0.0);

        // Below equilibrium and above the start are both unreachable.
        for q0 in [rat(6, 10), rat(95, 100)] {
            let q = vec![q0.clone(), &rat(1, 1) - &q0];
            let result = is_reachable(&rs, &q).unwrap();
            assert_eq!(result.decision, ReachDecision::Unreachable, "q0 = {q0}");
            assert!(result.protocol.is_none());
        }

        // Equilibrium itself arrives via one full move.
        let result = is_reachable(&rs, &ctx.thermal_population()).unwrap();
        assert_eq!(result.decision, ReachDecision::Reachable);
        let protocol = result.protocol.unwrap();
        assert_eq!(protocol.len(), 1);
        assert_eq!(protocol.steps[0].lambda(), &rat(1, 1));
        assert_eq!(result.residual.unwrap(), 0.0);

        // The source is reachable with the empty protocol.
        let result = is_reachable(&rs, &p).unwrap();
        assert_eq!(result.decision, ReachDecision::Reachable);
        assert!(result.protocol.unwrap().is_empty());
    }

    #[test]
    fn two_level_extreme_points_are_the_segment_ends() {
        let ctx = qubit_ctx();
        let p = vec![rat(9, 10), rat(1, 10)];
        let rs = build_reach_set(&ctx, &p, ReachOptions::default()).unwrap();
        let points = extreme_points(&rs).unwrap();
        assert_eq!(
            points,
            vec![
                vec![rat(2, 3), rat(1, 3)],
                vec![rat(9, 10), rat(1, 10)],
            ]
        );
    }

    #[test]
    fn line_maxima_agree_between_elementary_and_curve_relaxations() {
        // With two levels the elementary moves already exhaust everything
        // the curve dominates, so both optimizers see the same segment.
        let ctx = qubit_ctx();
        let p = vec![rat(9, 10), rat(1, 10)];
        let rs = build_reach_set(&ctx, &p, ReachOptions::default()).unwrap();
        let gamma = ctx.thermal_population();
        let dir = vec![rat(1, 1), rat(-1, 1)];
        let (t, point) = maximize_along_line(&rs, &gamma, &dir).unwrap().unwrap();
        assert_eq!(t, rat(7, 30));
        assert_eq!(point, p);
        let (tc, pc) = curve_maximize_along_line(&ctx, &p, &gamma, &dir)
            .unwrap()
            .unwrap();
        assert_eq!(tc, t);
        assert_eq!(pc, point);

        let down = vec![rat(-1, 1), rat(1, 1)];
        let (t, point) = maximize_along_line(&rs, &gamma, &down).unwrap().unwrap();
        assert_eq!(t, rat(0, 1));
        assert_eq!(point, gamma);

        let (value, argmax) = maximize_linear(&rs, &[rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(value, rat(9, 10));
        assert_eq!(argmax, p);
    }

    #[test]
    fn frontier_paths_replay_exactly_and_respect_their_orders() {
        let ctx = qutrit_ctx();
        let source = vec![rat(7, 10), rat(1, 5), rat(1, 10)];
        let rs = build_reach_set(&ctx, &source, ReachOptions::default()).unwrap();
        assert!(!rs.diagnostics().bound_hit);
        assert!(rs.member_count() > 0);
        for (order, members) in rs.frontier() {
            for member in members {
                ctx.validate_population(member.state()).unwrap();
                assert!(is_compatible(&ctx, member.state(), order).unwrap());
                let replayed = apply_sequence(&ctx, &source, member.path()).unwrap();
                assert_eq!(&replayed, member.state());
                assert_eq!(
                    member.cums().to_vec(),
                    cumulative_sums(member.state(), order)
                );
            }
        }
    }

    #[test]
    fn realizable_targets_are_recognized_and_replayed() {
        let ctx = qutrit_ctx();
        let source = vec![rat(7, 10), rat(1, 5), rat(1, 10)];
        let rs = build_reach_set(&ctx, &source, ReachOptions::default()).unwrap();
        for seed in 0..40u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seq = sample_control_sequence(&ctx, &mut rng, 10);
            let target = apply_sequence(&ctx, &source, &seq).unwrap();
            let result = is_reachable(&rs, &target).unwrap();
            assert_eq!(
                result.decision,
                ReachDecision::Reachable,
                "seed {seed} produced an unrecognized realizable target"
            );
            assert!(result.residual.unwrap() <= DEFAULT_DESCENT_EPS);
            // Reachability by elementary moves implies curve domination.
            assert!(thermomajorizes(&ctx, &source, &target).unwrap());
        }
    }

    #[test]
    fn moving_population_up_the_ladder_is_refused() {
        let ctx = qutrit_ctx();
        let source = vec![rat(7, 10), rat(1, 5), rat(1, 10)];
        let rs = build_reach_set(&ctx, &source, ReachOptions::default()).unwrap();
        let inverted = vec![rat(1, 10), rat(1, 5), rat(7, 10)];
        let result = is_reachable(&rs, &inverted).unwrap();
        assert_eq!(result.decision, ReachDecision::Unreachable);
        let sharp_top = vec![rat(0, 1), rat(0, 1), rat(1, 1)];
        let result = is_reachable(&rs, &sharp_top).unwrap();
        assert_eq!(result.decision, ReachDecision::Unreachable);
    }

    #[test]
    fn a_tiny_depth_bound_downgrades_negatives_to_unknown() {
        let ctx = qutrit_ctx();
        let source = vec![rat(1, 1), rat(0, 1), rat(0, 1)];
        let options = ReachOptions {
            depth_bound: Some(1),
            ..ReachOptions::default()
        };
        let truncated = build_reach_set(&ctx, &source, options).unwrap();
        assert!(truncated.diagnostics().bound_hit);
        let full = build_reach_set(&ctx, &source, ReachOptions::default()).unwrap();
        assert!(!full.diagnostics().bound_hit);
        // The inverted sharp state is genuinely unreachable, but only the
        // completed closure is entitled to say so.
        let inverted = vec![rat(0, 1), rat(0, 1), rat(1, 1)];
        let result = is_reachable(&truncated, &inverted).unwrap();
        assert_eq!(result.decision, ReachDecision::Unknown);
        let result = is_reachable(&full, &inverted).unwrap();
        assert_eq!(result.decision, ReachDecision::Unreachable);
    }

    #[test]
    fn descent_requires_domination_in_the_shared_order() {
        let ctx = qubit_ctx();
        let lower = vec![rat(7, 10), rat(3, 10)];
        let higher = vec![rat(9, 10), rat(1, 10)];
        let order = BetaOrder(vec![0, 1]);
        let err = same_order_descent(&ctx, &lower, &higher, &order, 1e-12);
        assert!(matches!(err, Err(Error::DescentPrecondition(_))));
        let ok = same_order_descent(&ctx, &higher, &lower, &order, 1e-12).unwrap();
        assert_eq!(ok.final_state, lower);
        assert_eq!(ok.residual, 0.0);
    }

    #[test]
    fn descent_caps_exploding_denominators() {
        let ctx = qutrit_ctx();
        // A target with a large prime denominator forces fractions the
        // cap must flatten without stalling.
        let source = vec![rat(7, 10), rat(1, 5), rat(1, 10)];
        let rs = build_reach_set(&ctx, &source, ReachOptions::default()).unwrap();
        let huge = 1_099_511_627_791i64; // prime just above 2^40
        let tweak = rat(171, huge);
        let target = vec![
            &rat(1, 2) + &tweak,
            rat(1, 3),
            &rat(1, 6) - &tweak,
        ];
        let total = target.iter().fold(rat(0, 1), |a, b| &a + b);
        assert_eq!(total, rat(1, 1));
        let result = is_reachable(&rs, &target).unwrap();
        assert_eq!(result.decision, ReachDecision::Reachable);
        assert!(result.residual.unwrap() <= DEFAULT_DESCENT_EPS);
        // Exact fractions keep denominators under 2^40; rounded ones land
        // on the dyadic grid sized for the default tolerance.
        let cap_bits = 1 + lambda_grid_bits(DEFAULT_DESCENT_EPS).max(40) as u64;
        for step in result.protocol.unwrap().iter() {
            if let Scalar::Rational(l) = step.lambda() {
                assert!(
                    l.denom().bits() <= cap_bits,
                    "denominator escaped the cap: {} bits",
                    l.denom().bits()
                );
            }
        }
    }

    #[test]
    fn float_mode_reproduces_the_rational_decision() {
        let rational = qutrit_ctx();
        let float =
            GibbsContext::from_gamma_f64(&[3.0, 2.0, 1.0], ArithmeticMode::Float).unwrap();
        let source_r = vec![rat(7, 10), rat(1, 5), rat(1, 10)];
        let source_f = float.population_from_f64(&[0.7, 0.2, 0.1]).unwrap();
        let rs_r = build_reach_set(&rational, &source_r, ReachOptions::default()).unwrap();
        let rs_f = build_reach_set(&float, &source_f, ReachOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let raw: Vec<f64> = {
                let mut v: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..1.0)).collect();
                let s: f64 = v.iter().sum();
                v.iter_mut().for_each(|x| *x /= s);
                v
            };
            let q_r = rational.population_from_f64(&raw).unwrap();
            let q_f = float.population_from_f64(&raw).unwrap();
            let dec_r = is_reachable(&rs_r, &q_r).unwrap().decision;
            let dec_f = is_reachable(&rs_f, &q_f).unwrap().decision;
            assert_eq!(dec_r, dec_f, "disagreement on {raw:?}");
        }
    }

    #[test]
    fn curve_relaxation_strictly_contains_the_elementary_set_in_three_levels() {
        // The curve-dominated set admits ground populations the elementary
        // moves cannot deliver; the gap is the whole point of tracking both.
        let ctx = make_gibbs_context(
            &[0.0, 1.0, 2.0],
            std::f64::consts::LN_2,
            ArithmeticMode::Rational,
        )
        .unwrap();
        let source = vec![rat(0, 1), rat(1, 1), rat(0, 1)];
        let rs = build_reach_set(&ctx, &source, ReachOptions::default()).unwrap();
        let objective = vec![rat(1, 1), rat(0, 1), rat(0, 1)];
        let (mtp_best, _) = maximize_linear(&rs, &objective).unwrap();
        let (tp_best, _) = curve_maximize_linear(&ctx, &source, &objective).unwrap();
        assert!(
            tp_best.cmp_total(&mtp_best) == std::cmp::Ordering::Greater,
            "expected a strict gap, got {tp_best} vs {mtp_best}"
        );
    }
}
