//! The elementary dynamics: two-level thermalizations and their generators.
//!
//! The only primitive the control model allows is coupling one pair of
//! levels to the bath. Running that coupling for relaxation time `tau`
//! moves the pair a fraction `lambda = 1 - exp(-tau)` of the way to its
//! mutual equilibrium and leaves every other level untouched. A protocol is
//! a finite [`ControlSequence`] of such moves; a [`Trajectory`] samples the
//! states it passes through. [`MtpGenerator`] covers the other face of the
//! same dynamics: an arbitrary fixed rate matrix in detailed balance with
//! the stationary weights, integrated in continuous time.

use rand::Rng;

use crate::context::{GibbsContext, Population};
use crate::error::{Error, Result};
use crate::scalar::{ArithmeticMode, Scalar};

/// One elementary move: drive the level pair `(i, j)` a fraction `lambda`
/// of the way to mutual equilibrium, `0 < lambda <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryControl {
    levels: (usize, usize),
    lambda: Scalar,
}

impl ElementaryControl {
    pub fn new(i: usize, j: usize, lambda: Scalar) -> Result<Self> {
        if i == j {
            return Err(Error::EqualLevels);
        }
        let mode = lambda.mode();
        let zero = Scalar::zero(mode);
        let one = Scalar::one(mode);
        if lambda.cmp_total(&zero) != std::cmp::Ordering::Greater
            || lambda.cmp_total(&one) == std::cmp::Ordering::Greater
        {
            return Err(Error::LambdaOutOfRange(lambda.to_f64()));
        }
        let levels = if i < j { (i, j) } else { (j, i) };
        Ok(ElementaryControl { levels, lambda })
    }

    /// Full thermalization of the pair (`lambda = 1`, infinite dwell time).
    pub fn full(i: usize, j: usize, mode: ArithmeticMode) -> Result<Self> {
        Self::new(i, j, Scalar::one(mode))
    }

    pub fn levels(&self) -> (usize, usize) {
        self.levels
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    /// Dwell time in units of the pair's relaxation time; infinite for a
    /// full thermalization.
    pub fn tau_rel(&self) -> f64 {
        let l = self.lambda.to_f64();
        if l >= 1.0 {
            f64::INFINITY
        } else {
            -(1.0 - l).ln()
        }
    }

    /// Folds a second move on the same pair into this one:
    /// dwell times add, so `1 - lambda` multiplies.
    fn compose(&self, other: &ElementaryControl) -> ElementaryControl {
        debug_assert_eq!(self.levels, other.levels);
        let one = Scalar::one(self.lambda.mode());
        let residual = &(&one - &self.lambda) * &(&one - &other.lambda);
        ElementaryControl {
            levels: self.levels,
            lambda: &one - &residual,
        }
    }
}

/// A finite protocol: elementary moves applied left to right.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlSequence {
    pub steps: Vec<ElementaryControl>,
}

impl ControlSequence {
    pub fn new(steps: Vec<ElementaryControl>) -> Self {
        ControlSequence { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: ElementaryControl) {
        self.steps.push(step);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ElementaryControl> {
        self.steps.iter()
    }

    /// Total dwell time in relaxation-time units; infinite if any step is a
    /// full thermalization.
    pub fn total_tau(&self) -> f64 {
        self.steps.iter().map(ElementaryControl::tau_rel).sum()
    }

    /// Merges consecutive moves on the same pair. The result drives the
    /// same endpoint with fewer steps.
    pub fn simplified(&self) -> ControlSequence {
        let mut steps: Vec<ElementaryControl> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            match steps.last_mut() {
                Some(prev) if prev.levels == step.levels => {
                    *prev = prev.compose(step);
                }
                _ => steps.push(step.clone()),
            }
        }
        ControlSequence { steps }
    }
}

impl<'a> IntoIterator for &'a ControlSequence {
    type Item = &'a ElementaryControl;
    type IntoIter = std::slice::Iter<'a, ElementaryControl>;
    fn into_iter(self) -> Self::IntoIter {
        self.steps.iter()
    }
}

fn check_pair(ctx: &GibbsContext, i: usize, j: usize) -> Result<()> {
    let d = ctx.dim();
    if i >= d {
        return Err(Error::IndexOutOfRange(i, d));
    }
    if j >= d {
        return Err(Error::IndexOutOfRange(j, d));
    }
    if i == j {
        return Err(Error::EqualLevels);
    }
    Ok(())
}

/// Fully thermalizes the pair `(i, j)`: both entries jump to their mutual
/// equilibrium shares while the pair total is conserved.
pub fn full_thermalize(
    ctx: &GibbsContext,
    p: &Population,
    i: usize,
    j: usize,
) -> Result<Population> {
    check_pair(ctx, i, j)?;
    let g = ctx.gamma();
    let pair_total = &p[i] + &p[j];
    let pair_weight = &g[i] + &g[j];
    let mut out = p.clone();
    out[i] = &(&g[i] * &pair_total) / &pair_weight;
    out[j] = &(&g[j] * &pair_total) / &pair_weight;
    Ok(out)
}

/// Moves the pair `(i, j)` a fraction `lambda` toward mutual equilibrium:
/// the state after dwelling `-ln(1 - lambda)` relaxation times.
pub fn partial_thermalize(
    ctx: &GibbsContext,
    p: &Population,
    i: usize,
    j: usize,
    lambda: &Scalar,
) -> Result<Population> {
    let control = ElementaryControl::new(i, j, lambda.clone())?;
    apply_control(ctx, p, &control)
}

/// Applies a single elementary move.
pub fn apply_control(
    ctx: &GibbsContext,
    p: &Population,
    control: &ElementaryControl,
) -> Result<Population> {
    let (i, j) = control.levels();
    check_pair(ctx, i, j)?;
    if control.lambda().mode() != ctx.mode() {
        return Err(Error::ModeMismatch("control vs context"));
    }
    let target = full_thermalize(ctx, p, i, j)?;
    let mut out = p.clone();
    let lambda = control.lambda();
    out[i] = &p[i] + &(lambda * &(&target[i] - &p[i]));
    out[j] = &p[j] + &(lambda * &(&target[j] - &p[j]));
    Ok(out)
}

/// Applies a whole protocol left to right.
pub fn apply_sequence(
    ctx: &GibbsContext,
    p: &Population,
    seq: &ControlSequence,
) -> Result<Population> {
    let mut state = p.clone();
    for step in seq {
        state = apply_control(ctx, &state, step)?;
    }
    Ok(state)
}

/// States visited while running a protocol, with a dimensionless time
/// coordinate: integer part counts completed steps, fractional part is the
/// fraction of the current step's `lambda` already applied. This keeps the
/// coordinate finite even across full thermalizations, whose dwell time is
/// infinite.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<Scalar>,
    states: Vec<Population>,
}

impl Trajectory {
    /// Samples `samples_per_step` evenly spaced intermediate states inside
    /// every step (in the `lambda` parametrization), plus the initial state.
    pub fn sample(
        ctx: &GibbsContext,
        p0: &Population,
        seq: &ControlSequence,
        samples_per_step: usize,
    ) -> Result<Trajectory> {
        if samples_per_step == 0 {
            return Err(Error::TooFewSamples(1));
        }
        ctx.validate_population(p0)?;
        let mode = ctx.mode();
        let m = samples_per_step as i64;
        let mut times = vec![Scalar::zero(mode)];
        let mut states = vec![p0.clone()];
        let mut current = p0.clone();
        for (k, step) in seq.iter().enumerate() {
            let (i, j) = step.levels();
            for sample in 1..=samples_per_step {
                let frac = Scalar::ratio(sample as i64, m, mode);
                let partial = &frac * step.lambda();
                let state = if sample == samples_per_step {
                    apply_control(ctx, &current, step)?
                } else {
                    partial_thermalize(ctx, &current, i, j, &partial)?
                };
                times.push(Scalar::ratio(k as i64 * m + sample as i64, m, mode));
                states.push(state);
            }
            current = states.last().unwrap().clone();
        }
        Ok(Trajectory { times, states })
    }

    /// Rebuilds a trajectory from stored samples, e.g. a parsed CSV. Times
    /// must be non-decreasing and paired one-to-one with states.
    pub fn from_parts(times: Vec<Scalar>, states: Vec<Population>) -> Result<Trajectory> {
        if times.len() != states.len() {
            return Err(Error::LengthMismatch {
                got: times.len(),
                want: states.len(),
            });
        }
        if states.is_empty() {
            return Err(Error::TooFewSamples(0));
        }
        for pair in times.windows(2) {
            if pair[0].cmp_total(&pair[1]) == std::cmp::Ordering::Greater {
                return Err(Error::BadTime(pair[1].to_f64()));
            }
        }
        Ok(Trajectory { times, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> &[Scalar] {
        &self.times
    }

    pub fn states(&self) -> &[Population] {
        &self.states
    }

    pub fn final_state(&self) -> &Population {
        self.states.last().expect("trajectory has an initial state")
    }
}

/// A fixed rate matrix `Q` in detailed balance with the stationary weights:
/// `dp/dt = Q p`, with `Q[i][j]` the rate from level `j` into level `i`.
/// Such generators describe simultaneous, possibly many-level couplings to
/// the bath; every finite-time evolution they produce stays inside the set
/// the elementary moves can reach.
#[derive(Debug, Clone)]
pub struct MtpGenerator {
    d: usize,
    /// Row-major `d x d` rates.
    q: Vec<f64>,
}

impl MtpGenerator {
    /// Validates off-diagonal non-negativity, zero column sums and detailed
    /// balance against the context's stationary weights.
    pub fn new(ctx: &GibbsContext, rates: Vec<Vec<f64>>) -> Result<Self> {
        let d = ctx.dim();
        if rates.len() != d || rates.iter().any(|row| row.len() != d) {
            return Err(Error::Generator(format!("rate matrix must be {d} x {d}")));
        }
        let gamma = ctx.gamma_f64();
        let scale = rates
            .iter()
            .flatten()
            .fold(0.0f64, |m, &x| m.max(x.abs()))
            .max(1.0);
        let tol = ctx.eta() * scale;
        for (i, row) in rates.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::Generator(format!("rate [{i}][{j}] is not finite")));
                }
                if i != j && x < -tol {
                    return Err(Error::Generator(format!(
                        "off-diagonal rate [{i}][{j}] = {x} is negative"
                    )));
                }
            }
        }
        let mut col_sums = vec![0.0f64; d];
        for row in &rates {
            for (j, x) in row.iter().enumerate() {
                col_sums[j] += x;
            }
        }
        for (j, col_sum) in col_sums.into_iter().enumerate() {
            if col_sum.abs() > tol {
                return Err(Error::Generator(format!(
                    "column {j} sums to {col_sum}, expected 0"
                )));
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let forward = rates[i][j] * gamma[j];
                let backward = rates[j][i] * gamma[i];
                if (forward - backward).abs() > tol {
                    return Err(Error::Generator(format!(
                        "detailed balance fails on pair ({i}, {j}): {forward} vs {backward}"
                    )));
                }
            }
        }
        let q = rates.into_iter().flatten().collect();
        Ok(MtpGenerator { d, q })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.d + j]
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.q
            .chunks_exact(self.d)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Integrates `dp/dt = Q p` for time `t` by uniformization: the
    /// evolution is written as a Poisson mixture of powers of the
    /// substochastic jump matrix, which keeps every partial sum a true
    /// population. Only supported in float mode. Long horizons are split
    /// into moderate chunks to avoid Poisson-weight underflow.
    pub fn evolve(&self, ctx: &GibbsContext, p: &Population, t: f64) -> Result<Population> {
        if ctx.mode() != ArithmeticMode::Float {
            return Err(Error::WrongMode("float"));
        }
        if ctx.dim() != self.d {
            return Err(Error::LengthMismatch {
                got: self.d,
                want: ctx.dim(),
            });
        }
        ctx.validate_population(p)?;
        if !t.is_finite() || t < 0.0 {
            return Err(Error::BadTime(t));
        }
        let mut v: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
        let uniform_rate = (0..self.d)
            .map(|i| self.rate(i, i).abs())
            .fold(0.0f64, f64::max);
        if uniform_rate * t == 0.0 {
            return Ok(v.into_iter().map(Scalar::Float).collect());
        }
        let chunks = (uniform_rate * t / 40.0).ceil().max(1.0);
        let dt = t / chunks;
        for _ in 0..chunks as usize {
            v = self.evolve_chunk(&v, uniform_rate, dt);
        }
        Ok(v.into_iter().map(Scalar::Float).collect())
    }

    fn evolve_chunk(&self, p: &[f64], rate: f64, t: f64) -> Vec<f64> {
        // P = I + Q / rate is stochastic; e^{tQ} p = sum_k Pois(rate t; k) P^k p.
        let a = rate * t;
        let mut weight = (-a).exp();
        let mut weight_sum = weight;
        let mut power = p.to_vec();
        let mut acc: Vec<f64> = power.iter().map(|x| x * weight).collect();
        let mut k = 1.0f64;
        while weight_sum < 1.0 - 1e-14 && k < 1e6 {
            let qv = self.apply(&power);
            for (x, dq) in power.iter_mut().zip(&qv) {
                *x += dq / rate;
            }
            weight *= a / k;
            weight_sum += weight;
            for (out, x) in acc.iter_mut().zip(&power) {
                *out += weight * x;
            }
            k += 1.0;
        }
        // Renormalize away the truncated Poisson tail.
        let total: f64 = acc.iter().sum();
        acc.iter_mut().for_each(|x| *x /= total);
        acc
    }
}

/// Draws a random generator in detailed balance with the context: each level
/// pair is included with probability `density` and given rates proportional
/// to the stationary weights of its endpoints.
pub fn random_detailed_balance_generator(
    ctx: &GibbsContext,
    rng: &mut impl Rng,
    density: f64,
) -> Result<MtpGenerator> {
    let d = ctx.dim();
    let gamma = ctx.gamma_f64();
    let mut rates = vec![vec![0.0; d]; d];
    let mut any_edge = false;
    for i in 0..d {
        for j in (i + 1)..d {
            if rng.gen_bool(density.clamp(0.0, 1.0)) {
                let strength = rng.gen_range(0.25..4.0);
                rates[i][j] = strength * gamma[i];
                rates[j][i] = strength * gamma[j];
                any_edge = true;
            }
        }
    }
    if !any_edge {
        let i = rng.gen_range(0..d - 1);
        let j = rng.gen_range(i + 1..d);
        rates[i][j] = gamma[i];
        rates[j][i] = gamma[j];
    }
    let mut col_sums = vec![0.0f64; d];
    for row in &rates {
        for (j, x) in row.iter().enumerate() {
            col_sums[j] += x;
        }
    }
    for (j, row) in rates.iter_mut().enumerate() {
        row[j] = -col_sums[j];
    }
    MtpGenerator::new(ctx, rates)
}

/// Draws a random protocol of up to `max_steps` elementary moves. The
/// `lambda` values live on a coarse dyadic grid so rational-mode replays of
/// the same protocol are cheap and exact.
pub fn sample_control_sequence(
    ctx: &GibbsContext,
    rng: &mut impl Rng,
    max_steps: usize,
) -> ControlSequence {
    let d = ctx.dim();
    let mode = ctx.mode();
    let steps = rng.gen_range(1..=max_steps.max(1));
    let mut seq = ControlSequence::default();
    for _ in 0..steps {
        let i = rng.gen_range(0..d - 1);
        let j = rng.gen_range(i + 1..d);
        let k = rng.gen_range(1..=1024i64);
        let lambda = Scalar::ratio(k, 1024, mode);
        seq.push(ElementaryControl::new(i, j, lambda).expect("grid lambda is valid"));
    }
    seq
}
