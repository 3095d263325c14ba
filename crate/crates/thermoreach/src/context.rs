//! Gibbs contexts: the fixed thermal environment every computation runs in.
//!
//! A [`GibbsContext`] bundles the stationary distribution `gamma`, the
//! arithmetic mode, and the numeric tolerances. Populations are plain vectors
//! of scalars validated against a context. Composite systems (system plus
//! battery, system plus ancilla) are built by [`GibbsContext::tensor`], which
//! multiplies the stationary weights exactly and sorts levels by total
//! energy while remembering where each product level came from.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{parse_exact_rational, rationalize, ArithmeticMode, Scalar};

/// A population is one scalar per level, in the owning context's mode.
pub type Population = Vec<Scalar>;

/// Default slack for float-mode comparisons.
pub const DEFAULT_ETA: f64 = 1e-9;
/// Default relative tolerance when converting floats to rationals.
pub const DEFAULT_RATIONALIZATION_TOL: f64 = 1e-15;

/// The thermal environment: stationary weights, arithmetic mode, tolerances.
#[derive(Debug, Clone)]
pub struct GibbsContext {
    mode: ArithmeticMode,
    gamma: Vec<Scalar>,
    energies: Option<Vec<f64>>,
    beta: Option<f64>,
    eta: f64,
    rationalization_tol: f64,
}

impl GibbsContext {
    /// Builds the context for an energy ladder at inverse temperature `beta`.
    ///
    /// Energies must be non-decreasing. In rational mode each Boltzmann
    /// weight is converted to a nearby small-denominator rational (relative
    /// tolerance [`DEFAULT_RATIONALIZATION_TOL`]) before exact normalization,
    /// so e.g. `beta = ln 2` with unit gaps yields exact dyadic weights.
    pub fn from_energies(energies: &[f64], beta: f64, mode: ArithmeticMode) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::TooFewLevels(energies.len()));
        }
        if energies.windows(2).any(|w| w[0] > w[1]) || energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::EnergiesNotAscending);
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::BadBeta(beta));
        }
        let tol = DEFAULT_RATIONALIZATION_TOL;
        let weights = boltzmann_weights(energies, beta);
        let gamma = normalize_weights(&weights, mode, tol)?;
        Ok(GibbsContext {
            mode,
            gamma,
            energies: Some(energies.to_vec()),
            beta: Some(beta),
            eta: DEFAULT_ETA,
            rationalization_tol: tol,
        })
    }

    /// Builds a context directly from stationary weights (need not be
    /// normalized; normalization happens exactly). No energy ladder is
    /// attached, so thermal-state helpers are unavailable.
    pub fn from_gamma_f64(gamma: &[f64], mode: ArithmeticMode) -> Result<Self> {
        if gamma.len() < 2 {
            return Err(Error::TooFewLevels(gamma.len()));
        }
        if gamma.iter().any(|g| !g.is_finite() || *g <= 0.0) {
            return Err(Error::BadGamma);
        }
        let gamma = normalize_weights(gamma, mode, DEFAULT_RATIONALIZATION_TOL)?;
        Ok(GibbsContext {
            mode,
            gamma,
            energies: None,
            beta: None,
            eta: DEFAULT_ETA,
            rationalization_tol: DEFAULT_RATIONALIZATION_TOL,
        })
    }

    /// Builds a rational-mode context from exact stationary weights.
    pub fn from_gamma_exact(gamma: Vec<BigRational>) -> Result<Self> {
        if gamma.len() < 2 {
            return Err(Error::TooFewLevels(gamma.len()));
        }
        if gamma.iter().any(|g| !g.is_positive()) {
            return Err(Error::BadGamma);
        }
        let total: BigRational = gamma.iter().sum();
        let gamma = gamma
            .into_iter()
            .map(|g| Scalar::Rational(g / &total))
            .collect();
        Ok(GibbsContext {
            mode: ArithmeticMode::Rational,
            gamma,
            energies: None,
            beta: None,
            eta: DEFAULT_ETA,
            rationalization_tol: DEFAULT_RATIONALIZATION_TOL,
        })
    }

    /// Overrides the float-mode comparison slack.
    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 {
            return Err(Error::BadTolerance(eta));
        }
        self.eta = eta;
        Ok(self)
    }

    /// Overrides the float-to-rational conversion tolerance. Only affects
    /// populations built after the call, not the stored `gamma`.
    pub fn with_rationalization_tol(mut self, tol: f64) -> Result<Self> {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(Error::BadTolerance(tol));
        }
        self.rationalization_tol = tol;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode
    }

    pub fn gamma(&self) -> &[Scalar] {
        &self.gamma
    }

    pub fn gamma_f64(&self) -> Vec<f64> {
        self.gamma.iter().map(Scalar::to_f64).collect()
    }

    /// Smallest stationary weight; the normalization anchor of the complete
    /// monotone family.
    pub fn min_gamma(&self) -> Scalar {
        self.gamma
            .iter()
            .cloned()
            .reduce(Scalar::min)
            .expect("context has at least two levels")
    }

    pub fn energies(&self) -> Option<&[f64]> {
        self.energies.as_deref()
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn rationalization_tol(&self) -> f64 {
        self.rationalization_tol
    }

    /// Checks mode, length, non-negativity and normalization. Rational mode
    /// is exact; float mode allows slack `eta`.
    pub fn validate_population(&self, p: &Population) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::LengthMismatch {
                got: p.len(),
                want: self.dim(),
            });
        }
        if p.iter().any(|x| x.mode() != self.mode) {
            return Err(Error::ModeMismatch("population vs context"));
        }
        let zero = Scalar::zero(self.mode);
        for (i, x) in p.iter().enumerate() {
            if !x.ge_with(&zero, self.eta) {
                return Err(Error::NegativeEntry {
                    index: i,
                    value: x.to_f64(),
                });
            }
        }
        let sum = p.iter().fold(zero, |acc, x| &acc + x);
        if !sum.eq_with(&Scalar::one(self.mode), self.eta) {
            return Err(Error::BadNormalization(sum.to_f64()));
        }
        Ok(())
    }

    /// Converts raw floats into a valid population. Entries within `eta` of
    /// zero from below are clamped; in rational mode each entry is
    /// rationalized and the sum renormalized exactly.
    pub fn population_from_f64(&self, p: &[f64]) -> Result<Population> {
        if p.len() != self.dim() {
            return Err(Error::LengthMismatch {
                got: p.len(),
                want: self.dim(),
            });
        }
        let mut clamped = Vec::with_capacity(p.len());
        for (i, &x) in p.iter().enumerate() {
            if !x.is_finite() || x < -self.eta {
                return Err(Error::NegativeEntry { index: i, value: x });
            }
            clamped.push(x.max(0.0));
        }
        let total: f64 = clamped.iter().sum();
        if (total - 1.0).abs() > self.eta {
            return Err(Error::BadNormalization(total));
        }
        match self.mode {
            ArithmeticMode::Float => {
                Ok(clamped.into_iter().map(|x| Scalar::Float(x / total)).collect())
            }
            ArithmeticMode::Rational => {
                let rats: Vec<BigRational> = clamped
                    .iter()
                    .map(|&x| rationalize(x, self.rationalization_tol))
                    .collect::<Result<_>>()?;
                let sum: BigRational = rats.iter().sum();
                if !sum.is_positive() {
                    return Err(Error::BadNormalization(0.0));
                }
                Ok(rats.into_iter().map(|r| Scalar::Rational(r / &sum)).collect())
            }
        }
    }

    /// Parses populations from strings. In rational mode every entry is read
    /// exactly (`"0.2"` means one fifth, `"1/3"` means a third); a sum within
    /// `eta` of one is renormalized exactly, anything further off is refused.
    pub fn population_from_strs<S: AsRef<str>>(&self, entries: &[S]) -> Result<Population> {
        if entries.len() != self.dim() {
            return Err(Error::LengthMismatch {
                got: entries.len(),
                want: self.dim(),
            });
        }
        match self.mode {
            ArithmeticMode::Float => {
                let vals: Vec<f64> = entries
                    .iter()
                    .map(|s| crate::scalar::parse_scalar(s.as_ref(), ArithmeticMode::Float))
                    .map(|r| r.map(|s| s.to_f64()))
                    .collect::<Result<_>>()?;
                self.population_from_f64(&vals)
            }
            ArithmeticMode::Rational => {
                let rats: Vec<BigRational> = entries
                    .iter()
                    .map(|s| parse_exact_rational(s.as_ref()))
                    .collect::<Result<_>>()?;
                for (i, r) in rats.iter().enumerate() {
                    if r.is_negative() {
                        return Err(Error::NegativeEntry {
                            index: i,
                            value: crate::scalar::rational_to_f64(r),
                        });
                    }
                }
                let sum: BigRational = rats.iter().sum();
                let sum_f = crate::scalar::rational_to_f64(&sum);
                if (sum_f - 1.0).abs() > self.eta || !sum.is_positive() {
                    return Err(Error::BadNormalization(sum_f));
                }
                Ok(rats.into_iter().map(|r| Scalar::Rational(r / &sum)).collect())
            }
        }
    }

    /// The stationary population itself.
    pub fn thermal_population(&self) -> Population {
        self.gamma.clone()
    }

    /// Thermal population of the stored ladder at a different inverse
    /// temperature. Fails if the context was built from raw weights.
    pub fn thermal_at(&self, beta: f64) -> Result<Population> {
        let energies = self.energies.as_ref().ok_or(Error::MissingEnergies)?;
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::BadBeta(beta));
        }
        let weights = boltzmann_weights(energies, beta);
        normalize_weights(&weights, self.mode, self.rationalization_tol)
    }

    /// Tensor product with another context at the same temperature and in
    /// the same mode. Stationary weights multiply exactly; levels are sorted
    /// by total energy (stable in the flat row-major index, so degenerate
    /// levels keep a deterministic order).
    pub fn tensor(&self, other: &GibbsContext) -> Result<CompositeContext> {
        if self.mode != other.mode {
            return Err(Error::ContextMismatch("arithmetic modes differ"));
        }
        let (ea, eb) = match (self.energies.as_ref(), other.energies.as_ref()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::MissingEnergies),
        };
        if self.beta != other.beta {
            return Err(Error::ContextMismatch("temperatures differ"));
        }
        let (da, db) = (self.dim(), other.dim());
        let mut levels: Vec<(f64, usize)> = Vec::with_capacity(da * db);
        for (i, a) in ea.iter().enumerate() {
            for (j, b) in eb.iter().enumerate() {
                levels.push((a + b, i * db + j));
            }
        }
        levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let index_map: Vec<usize> = levels.iter().map(|&(_, flat)| flat).collect();
        let energies: Vec<f64> = levels.iter().map(|&(e, _)| e).collect();
        let gamma: Vec<Scalar> = index_map
            .iter()
            .map(|&flat| &self.gamma[flat / db] * &other.gamma[flat % db])
            .collect();
        let context = GibbsContext {
            mode: self.mode,
            gamma,
            energies: Some(energies),
            beta: self.beta,
            eta: self.eta,
            rationalization_tol: self.rationalization_tol,
        };
        Ok(CompositeContext {
            context,
            index_map,
            dims: (da, db),
        })
    }
}

/// A tensor-product context plus the bookkeeping to move populations in and
/// out of the sorted level order.
#[derive(Debug, Clone)]
pub struct CompositeContext {
    /// The product context, levels sorted by total energy.
    pub context: GibbsContext,
    /// `index_map[k]` is the row-major index `i * dim_b + j` of sorted level `k`.
    pub index_map: Vec<usize>,
    /// Dimensions of the two factors.
    pub dims: (usize, usize),
}

impl CompositeContext {
    /// Factor indices `(i, j)` of sorted composite level `k`.
    pub fn factors_of(&self, k: usize) -> (usize, usize) {
        let flat = self.index_map[k];
        (flat / self.dims.1, flat % self.dims.1)
    }

    /// Sorted composite level holding factor pair `(i, j)`.
    pub fn level_of(&self, i: usize, j: usize) -> usize {
        let flat = i * self.dims.1 + j;
        self.index_map
            .iter()
            .position(|&f| f == flat)
            .expect("index map is a permutation")
    }

    /// Product population `pa (x) pb`, in sorted composite order.
    pub fn kron(&self, pa: &Population, pb: &Population) -> Result<Population> {
        if pa.len() != self.dims.0 || pb.len() != self.dims.1 {
            return Err(Error::LengthMismatch {
                got: pa.len() * pb.len(),
                want: self.dims.0 * self.dims.1,
            });
        }
        Ok(self
            .index_map
            .iter()
            .map(|&flat| &pa[flat / self.dims.1] * &pb[flat % self.dims.1])
            .collect())
    }

    /// Marginal populations of the two factors.
    pub fn marginals(&self, p: &Population) -> Result<(Population, Population)> {
        self.context.validate_population(p)?;
        let mode = self.context.mode();
        let mut first = vec![Scalar::zero(mode); self.dims.0];
        let mut second = vec![Scalar::zero(mode); self.dims.1];
        for (k, x) in p.iter().enumerate() {
            let (i, j) = self.factors_of(k);
            first[i] = &first[i] + x;
            second[j] = &second[j] + x;
        }
        Ok((first, second))
    }
}

/// Shorthand constructor used throughout the examples.
pub fn make_gibbs_context(
    energies: &[f64],
    beta: f64,
    mode: ArithmeticMode,
) -> Result<GibbsContext> {
    GibbsContext::from_energies(energies, beta, mode)
}

/// Checks a population against a context; see
/// [`GibbsContext::validate_population`].
pub fn validate_population(ctx: &GibbsContext, p: &Population) -> Result<()> {
    ctx.validate_population(p)
}

fn boltzmann_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    // Shift by the ground energy so the largest weight is exactly one.
    let e0 = energies[0];
    energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect()
}

fn normalize_weights(weights: &[f64], mode: ArithmeticMode, tol: f64) -> Result<Population> {
    match mode {
        ArithmeticMode::Float => {
            let total: f64 = weights.iter().sum();
            if !total.is_finite() || total <= 0.0 {
                return Err(Error::BadGamma);
            }
            Ok(weights.iter().map(|&w| Scalar::Float(w / total)).collect())
        }
        ArithmeticMode::Rational => {
            let rats: Vec<BigRational> = weights
                .iter()
                .map(|&w| rationalize(w, tol))
                .collect::<Result<_>>()?;
            if rats.iter().any(|r| !r.is_positive() && !r.is_zero()) {
                return Err(Error::BadGamma);
            }
            let total: BigRational = rats.iter().sum();
            if !total.is_positive() {
                return Err(Error::BadGamma);
            }
            Ok(rats.into_iter().map(|r| Scalar::Rational(r / &total)).collect())
        }
    }
}
