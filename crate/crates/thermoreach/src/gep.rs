//! Scalar monotones built from convex functions of the rescaled population.
//!
//! For any convex `h`, the quantity `-sum_i gamma_i h(p_i / gamma_i)` never
//! decreases under the elementary dynamics, so a recorded trajectory along
//! which some member of this family drops is provably not realizable. The
//! module evaluates the standard instances (Shannon, order-`alpha` Renyi,
//! Tsallis, vacancy, and the absolute-value family that is jointly
//! complete), checks monotonicity along sampled trajectories, and converts
//! population histories into cumulative entropy production.
//!
//! Transcendental families are always evaluated in `f64`, whatever the
//! context mode; only the absolute-value family is exact in rational mode,
//! where it coincides with [`sigma_a`] by definition.

use std::fmt;

use crate::context::{GibbsContext, Population};
use crate::error::{Error, Result};
use crate::majorization::sigma_a;
use crate::scalar::{parse_scalar, ArithmeticMode, Scalar};
use crate::thermalization::Trajectory;

/// One scalar monotone. All variants are oriented so the value is
/// non-decreasing along every realizable trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum DivergenceFamily {
    /// `-sum_i p_i ln(p_i / gamma_i)`; minus the relative entropy.
    Shannon,
    /// `-sgn(alpha)/(alpha - 1) * ln sum_i p_i^alpha gamma_i^(1 - alpha)`.
    ///
    /// With `signed` (the default) the prefactor keeps the value finite and
    /// monotone for negative orders; without it the bare `1/(alpha - 1)`
    /// normalization of the non-negative orders is used throughout.
    Renyi { alpha: f64, signed: bool },
    /// The same expression without the logarithm:
    /// `-sgn(alpha)/(alpha - 1) * sum_i p_i^alpha gamma_i^(1 - alpha)`.
    RenyiPowerSum { alpha: f64 },
    /// `-sgn(q)/(1 - q) * (1 - sum_i p_i^q gamma_i^(1 - q))`.
    Tsallis { q: f64 },
    /// `sum_i gamma_i ln(p_i / gamma_i)`; minus the reverse relative
    /// entropy. Dives to `-inf` whenever a level empties completely.
    Vacancy,
    /// One member of the complete absolute-value family, exact in rational
    /// mode; see [`sigma_a`].
    Absolute { a: Scalar },
}

impl DivergenceFamily {
    pub fn renyi(alpha: f64) -> Self {
        DivergenceFamily::Renyi {
            alpha,
            signed: true,
        }
    }

    /// The fixed instances the stress tests and the command line run by
    /// default: Shannon, Renyi at orders 1/2, 2 and -1, Tsallis at 1/2 and
    /// 2, vacancy, and the absolute family at `a = 1/2`.
    pub fn standard_set(mode: ArithmeticMode) -> Vec<DivergenceFamily> {
        vec![
            DivergenceFamily::Shannon,
            DivergenceFamily::renyi(0.5),
            DivergenceFamily::renyi(2.0),
            DivergenceFamily::renyi(-1.0),
            DivergenceFamily::Tsallis { q: 0.5 },
            DivergenceFamily::Tsallis { q: 2.0 },
            DivergenceFamily::Vacancy,
            DivergenceFamily::Absolute {
                a: Scalar::ratio(1, 2, mode),
            },
        ]
    }

    /// Parses `shannon`, `vacancy`, `renyi:A`, `renyi-sum:A`, `tsallis:Q` or
    /// `absolute:A`.
    pub fn parse(s: &str, mode: ArithmeticMode) -> Result<Self> {
        let bad = || Error::Schema(format!("unknown divergence family '{s}'"));
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let float_param = || -> Result<f64> {
            param
                .ok_or_else(bad)?
                .parse::<f64>()
                .map_err(|_| bad())
        };
        match name {
            "shannon" if param.is_none() => Ok(DivergenceFamily::Shannon),
            "vacancy" if param.is_none() => Ok(DivergenceFamily::Vacancy),
            "renyi" => Ok(DivergenceFamily::renyi(float_param()?)),
            "renyi-sum" => Ok(DivergenceFamily::RenyiPowerSum {
                alpha: float_param()?,
            }),
            "tsallis" => Ok(DivergenceFamily::Tsallis { q: float_param()? }),
            "absolute" => Ok(DivergenceFamily::Absolute {
                a: parse_scalar(param.ok_or_else(bad)?, mode)?,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for DivergenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceFamily::Shannon => write!(f, "shannon"),
            DivergenceFamily::Renyi { alpha, signed: true } => write!(f, "renyi:{alpha}"),
            DivergenceFamily::Renyi {
                alpha,
                signed: false,
            } => write!(f, "renyi-unsigned:{alpha}"),
            DivergenceFamily::RenyiPowerSum { alpha } => write!(f, "renyi-sum:{alpha}"),
            DivergenceFamily::Tsallis { q } => write!(f, "tsallis:{q}"),
            DivergenceFamily::Vacancy => write!(f, "vacancy"),
            DivergenceFamily::Absolute { a } => write!(f, "absolute:{a}"),
        }
    }
}

fn check_param(x: f64) -> Result<f64> {
    if !x.is_finite() || x == 0.0 || x == 1.0 {
        return Err(Error::SingularDivergenceParam(x));
    }
    Ok(x)
}

/// `sum_i p_i^a gamma_i^(1 - a)` with infinity sentinels for negative
/// orders on emptied levels.
fn power_sum(p: &[f64], gamma: &[f64], a: f64) -> f64 {
    p.iter()
        .zip(gamma)
        .map(|(&pi, &gi)| {
            if pi == 0.0 {
                // 0^a is 0 for positive orders and +inf for negative ones.
                if a > 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                pi.powf(a) * gi.powf(1.0 - a)
            }
        })
        .sum()
}

/// Evaluates one family member. Transcendental families return a float
/// scalar regardless of the context mode (with `+/-inf` sentinels where the
/// underlying expression diverges); the absolute family stays in the
/// context's arithmetic.
pub fn h_divergence(
    ctx: &GibbsContext,
    p: &Population,
    family: &DivergenceFamily,
) -> Result<Scalar> {
    if p.len() != ctx.dim() {
        return Err(Error::LengthMismatch {
            got: p.len(),
            want: ctx.dim(),
        });
    }
    if let DivergenceFamily::Absolute { a } = family {
        return sigma_a(ctx, p, a);
    }
    let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
    let gf = ctx.gamma_f64();
    let value = match family {
        DivergenceFamily::Shannon => -pf
            .iter()
            .zip(&gf)
            .map(|(&pi, &gi)| if pi == 0.0 { 0.0 } else { pi * (pi / gi).ln() })
            .sum::<f64>(),
        DivergenceFamily::Renyi { alpha, signed } => {
            let a = check_param(*alpha)?;
            let sign = if *signed { a.signum() } else { 1.0 };
            -sign / (a - 1.0) * power_sum(&pf, &gf, a).ln()
        }
        DivergenceFamily::RenyiPowerSum { alpha } => {
            let a = check_param(*alpha)?;
            -a.signum() / (a - 1.0) * power_sum(&pf, &gf, a)
        }
        DivergenceFamily::Tsallis { q } => {
            let q = check_param(*q)?;
            -q.signum() / (1.0 - q) * (1.0 - power_sum(&pf, &gf, q))
        }
        DivergenceFamily::Vacancy => pf
            .iter()
            .zip(&gf)
            .map(|(&pi, &gi)| {
                if pi == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    gi * (pi / gi).ln()
                }
            })
            .sum::<f64>(),
        DivergenceFamily::Absolute { .. } => unreachable!("handled above"),
    };
    Ok(Scalar::Float(value))
}

/// Result of a monotonicity check along a sampled trajectory.
#[derive(Debug, Clone)]
pub struct MonotoneCheck {
    /// Whether the family value never dropped by more than `tol`.
    pub ok: bool,
    /// The largest observed drop between consecutive samples (0 if none).
    pub worst_drop: f64,
    /// Index of the sample where the worst drop ended, if any drop exceeded
    /// the tolerance.
    pub violation_index: Option<usize>,
    /// The family values at every sample.
    pub values: Vec<Scalar>,
}

/// Evaluates `family` on every sampled state and confirms it never drops.
/// Rational-mode values of the absolute family are compared exactly; floats
/// are allowed to dip by at most `tol` between consecutive samples.
pub fn verify_monotone(
    ctx: &GibbsContext,
    states: &[Population],
    family: &DivergenceFamily,
    tol: f64,
) -> Result<MonotoneCheck> {
    if states.len() < 2 {
        return Err(Error::TooFewSamples(2));
    }
    let values: Vec<Scalar> = states
        .iter()
        .map(|s| h_divergence(ctx, s, family))
        .collect::<Result<_>>()?;
    let mut worst_drop = 0.0f64;
    let mut violation_index = None;
    for (k, pair) in values.windows(2).enumerate() {
        let ok_here = match (&pair[0], &pair[1]) {
            (Scalar::Rational(a), Scalar::Rational(b)) => b >= a,
            (prev, next) => {
                let (a, b) = (prev.to_f64(), next.to_f64());
                if a.is_nan() || b.is_nan() {
                    return Err(Error::Internal(format!(
                        "family {family} produced NaN at sample {k}"
                    )));
                }
                b >= a - tol || (a == f64::NEG_INFINITY) || (b == f64::INFINITY)
            }
        };
        if !ok_here {
            let drop = (pair[0].to_f64() - pair[1].to_f64()).max(0.0);
            if drop > worst_drop {
                worst_drop = drop;
                violation_index = Some(k + 1);
            }
        }
    }
    Ok(MonotoneCheck {
        ok: violation_index.is_none(),
        worst_drop,
        violation_index,
        values,
    })
}

/// Cumulative entropy production along a trajectory: entropy gained by the
/// system minus `beta` times the heat absorbed, summed from the start. The
/// context must carry an energy ladder. The series starts at zero and is
/// non-decreasing for any realizable trajectory; its increments equal those
/// of the Shannon family, since the partition function cancels in
/// differences.
pub fn entropy_production_series(ctx: &GibbsContext, traj: &Trajectory) -> Result<Vec<f64>> {
    let energies = ctx.energies().ok_or(Error::MissingEnergies)?;
    let beta = ctx.beta().expect("contexts with energies carry beta");
    if traj.is_empty() {
        return Err(Error::TooFewSamples(1));
    }
    let free_energy_term = |p: &Population| -> f64 {
        let pf: Vec<f64> = p.iter().map(Scalar::to_f64).collect();
        let entropy: f64 = -pf
            .iter()
            .map(|&x| if x == 0.0 { 0.0 } else { x * x.ln() })
            .sum::<f64>();
        let mean_energy: f64 = pf.iter().zip(energies).map(|(&x, &e)| x * e).sum();
        entropy - beta * mean_energy
    };
    let base = free_energy_term(&traj.states()[0]);
    Ok(traj
        .states()
        .iter()
        .map(|p| free_energy_term(p) - base)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::make_gibbs_context;
    use crate::thermalization::{
        apply_sequence, sample_control_sequence, ControlSequence, ElementaryControl,
    };
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Scalar {
        Scalar::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    #[test]
    fn renyi_two_matches_hand_computation() {
        // gamma = (2/3, 1/3), p = (1/2, 1/2):
        // sum p^2 / gamma = 3/8 + 3/4 = 9/8, so the monotone is -ln(9/8).
        let ctx = GibbsContext::from_gamma_f64(&[2.0, 1.0], ArithmeticMode::Float).unwrap();
        let p = ctx.population_from_f64(&[0.5, 0.5]).unwrap();
        let v = h_divergence(&ctx, &p, &DivergenceFamily::renyi(2.0))
            .unwrap()
            .to_f64();
        assert!((v - -(9.0f64 / 8.0).ln()).abs() < 1e-14);
        // The power-sum variant skips the logarithm: -(9/8).
        let v = h_divergence(&ctx, &p, &DivergenceFamily::RenyiPowerSum { alpha: 2.0 })
            .unwrap()
            .to_f64();
        assert!((v - -9.0 / 8.0).abs() < 1e-14);
    }

    #[test]
    fn every_family_is_maximal_at_the_stationary_state() {
        let ctx =
            make_gibbs_context(&[0.0, 1.0, 2.0], 0.9, ArithmeticMode::Float).unwrap();
        let gamma = ctx.thermal_population();
        let other = ctx.population_from_f64(&[0.5, 0.3, 0.2]).unwrap();
        for family in DivergenceFamily::standard_set(ArithmeticMode::Float) {
            let at_gamma = h_divergence(&ctx, &gamma, &family).unwrap().to_f64();
            let at_other = h_divergence(&ctx, &other, &family).unwrap().to_f64();
            assert!(
                at_gamma >= at_other - 1e-12,
                "{family}: {at_gamma} < {at_other}"
            );
        }
    }

    #[test]
    fn emptied_levels_produce_infinite_sentinels() {
        let ctx = GibbsContext::from_gamma_f64(&[2.0, 1.0], ArithmeticMode::Float).unwrap();
        let edge = vec![Scalar::Float(1.0), Scalar::Float(0.0)];
        let vac = h_divergence(&ctx, &edge, &DivergenceFamily::Vacancy).unwrap();
        assert_eq!(vac.to_f64(), f64::NEG_INFINITY);
        let neg = h_divergence(&ctx, &edge, &DivergenceFamily::renyi(-1.0)).unwrap();
        assert_eq!(neg.to_f64(), f64::NEG_INFINITY);
        let shan = h_divergence(&ctx, &edge, &DivergenceFamily::Shannon).unwrap();
        assert!(shan.to_f64().is_finite());
    }

    #[test]
    fn singular_parameters_are_rejected() {
        let ctx = GibbsContext::from_gamma_f64(&[2.0, 1.0], ArithmeticMode::Float).unwrap();
        let p = ctx.thermal_population();
        for family in [
            DivergenceFamily::renyi(1.0),
            DivergenceFamily::renyi(0.0),
            DivergenceFamily::Tsallis { q: 1.0 },
        ] {
            assert!(h_divergence(&ctx, &p, &family).is_err());
        }
    }

    #[test]
    fn absolute_family_is_exact_in_rational_mode() {
        let ctx = GibbsContext::from_gamma_f64(&[3.0, 2.0, 1.0], ArithmeticMode::Rational)
            .unwrap();
        let p = vec![rat(1, 2), rat(1, 4), rat(1, 4)];
        let a = rat(1, 3);
        let via_family = h_divergence(
            &ctx,
            &p,
            &DivergenceFamily::Absolute { a: a.clone() },
        )
        .unwrap();
        assert_eq!(via_family, sigma_a(&ctx, &p, &a).unwrap());
        assert!(via_family.as_rational().is_some());
    }

    #[test]
    fn random_protocols_never_decrease_any_standard_family() {
        let ctx =
            make_gibbs_context(&[0.0, 0.6, 1.4, 2.0], 1.1, ArithmeticMode::Float).unwrap();
        let p0 = ctx.population_from_f64(&[0.6, 0.25, 0.1, 0.05]).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seq = sample_control_sequence(&ctx, &mut rng, 12);
            let traj = Trajectory::sample(&ctx, &p0, &seq, 3).unwrap();
            for family in DivergenceFamily::standard_set(ArithmeticMode::Float) {
                let check =
                    verify_monotone(&ctx, traj.states(), &family, 1e-9).unwrap();
                assert!(check.ok, "{family} dropped by {}", check.worst_drop);
            }
        }
    }

    #[test]
    fn monotone_check_flags_a_reversed_trajectory() {
        let ctx =
            make_gibbs_context(&[0.0, 1.0], 1.0, ArithmeticMode::Float).unwrap();
        let seq = ControlSequence::new(vec![
            ElementaryControl::new(0, 1, Scalar::Float(0.8)).unwrap()
        ]);
        let start = ctx.population_from_f64(&[0.95, 0.05]).unwrap();
        let end = apply_sequence(&ctx, &start, &seq).unwrap();
        let forward = vec![start.clone(), end.clone()];
        let backward = vec![end, start];
        let fam = DivergenceFamily::Shannon;
        assert!(verify_monotone(&ctx, &forward, &fam, 1e-12).unwrap().ok);
        let rev = verify_monotone(&ctx, &backward, &fam, 1e-12).unwrap();
        assert!(!rev.ok);
        assert_eq!(rev.violation_index, Some(1));
        assert!(rev.worst_drop > 0.1);
    }

    #[test]
    fn entropy_production_matches_shannon_differences() {
        let ctx =
            make_gibbs_context(&[0.0, 0.7, 1.9], 1.3, ArithmeticMode::Float).unwrap();
        let p0 = ctx.population_from_f64(&[0.7, 0.2, 0.1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seq = sample_control_sequence(&ctx, &mut rng, 8);
        let traj = Trajectory::sample(&ctx, &p0, &seq, 5).unwrap();
        let series = entropy_production_series(&ctx, &traj).unwrap();
        assert_eq!(series.len(), traj.len());
        assert_eq!(series[0], 0.0);
        for pair in series.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12, "entropy production dropped");
        }
        let shannon: Vec<f64> = traj
            .states()
            .iter()
            .map(|s| {
                h_divergence(&ctx, s, &DivergenceFamily::Shannon)
                    .unwrap()
                    .to_f64()
            })
            .collect();
        for (k, s) in series.iter().enumerate() {
            assert!((s - (shannon[k] - shannon[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn family_names_round_trip_through_the_parser() {
        for family in DivergenceFamily::standard_set(ArithmeticMode::Rational) {
            let name = family.to_string();
            if name.starts_with("renyi-unsigned") {
                continue;
            }
            let parsed = DivergenceFamily::parse(&name, ArithmeticMode::Rational).unwrap();
            assert_eq!(parsed, family, "{name}");
        }
        assert!(DivergenceFamily::parse("nonsense", ArithmeticMode::Float).is_err());
        assert!(DivergenceFamily::parse("renyi:abc", ArithmeticMode::Float).is_err());
    }
}
