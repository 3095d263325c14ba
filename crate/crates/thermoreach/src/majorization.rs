//! Orderings and curves that decide when one population dominates another.
//!
//! A population `p` is compared against the stationary weights through its
//! rescaled entries `p_i / gamma_i`. Sorting levels by that ratio gives the
//! [`BetaOrder`]; plotting cumulative population against cumulative weight
//! along that order gives the concave [`ThermoCurve`]. One population can be
//! continuously cooled into another precisely when its curve lies nowhere
//! below the other's, which [`thermomajorizes`] checks at the elbows of the
//! dominated curve.
//!
//! The same ordering admits a one-parameter family of scalar monotones
//! ([`sigma_a`]), each non-decreasing along every realizable evolution and
//! maximal at the stationary state. Curve domination is equivalent to the
//! whole family being no larger on the dominating state, which
//! [`sigma_a_dominates`] verifies on the finite kink grid where both
//! family members are non-smooth.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;

use crate::context::{GibbsContext, Population};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A permutation of level indices, most-excited level first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BetaOrder(pub Vec<usize>);

impl BetaOrder {
    pub fn identity(d: usize) -> Self {
        BetaOrder((0..d).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for BetaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in &self.0 {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        Ok(())
    }
}

/// Compares `p_i / gamma_i` against `p_j / gamma_j` by cross-multiplication,
/// so rational mode never divides.
fn cmp_ratio(pi: &Scalar, gi: &Scalar, pj: &Scalar, gj: &Scalar) -> Ordering {
    (pi * gj).cmp_total(&(pj * gi))
}

/// The order sorting `p_i / gamma_i` descending, ties broken toward the
/// smaller level index. Deterministic for any valid population.
pub fn canonical_beta_order(ctx: &GibbsContext, p: &Population) -> Result<BetaOrder> {
    check_len(ctx, p)?;
    let g = ctx.gamma();
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&i, &j| cmp_ratio(&p[j], &g[j], &p[i], &g[i]).then(i.cmp(&j)));
    Ok(BetaOrder(idx))
}

/// Whether `p`'s rescaled entries are non-increasing along `order`, i.e.
/// whether `p` lies in the closed cone of populations sorted by `order`.
/// Float mode allows the context's slack.
pub fn is_compatible(ctx: &GibbsContext, p: &Population, order: &BetaOrder) -> Result<bool> {
    check_len(ctx, p)?;
    if order.len() != p.len() {
        return Err(Error::LengthMismatch {
            got: order.len(),
            want: p.len(),
        });
    }
    let g = ctx.gamma();
    let eta = ctx.eta();
    Ok(order.0.windows(2).all(|w| {
        let (i, j) = (w[0], w[1]);
        (&p[i] * &g[j]).ge_with(&(&p[j] * &g[i]), eta)
    }))
}

/// Every order compatible with `p`: the canonical order with each group of
/// tied ratios permuted freely. Tied means exactly equal in rational mode
/// and within the context's slack in float mode.
pub fn all_compatible_orders(ctx: &GibbsContext, p: &Population) -> Result<Vec<BetaOrder>> {
    let canonical = canonical_beta_order(ctx, p)?;
    let g = ctx.gamma();
    let eta = ctx.eta();
    // Split the canonical order into maximal runs of tied ratios.
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &i in &canonical.0 {
        let tied = blocks.last().is_some_and(|block| {
            let j = *block.last().unwrap();
            (&p[i] * &g[j]).eq_with(&(&p[j] * &g[i]), eta)
        });
        if tied {
            blocks.last_mut().unwrap().push(i);
        } else {
            blocks.push(vec![i]);
        }
    }
    let mut orders = vec![Vec::with_capacity(p.len())];
    for block in &blocks {
        let mut extended = Vec::new();
        for perm in block.iter().copied().permutations(block.len()) {
            for prefix in &orders {
                let mut o = prefix.clone();
                o.extend_from_slice(&perm);
                extended.push(o);
            }
        }
        orders = extended;
    }
    let mut orders: Vec<BetaOrder> = orders.into_iter().map(BetaOrder).collect();
    orders.sort();
    Ok(orders)
}

/// All `d!` orders of `d` levels, in lexicographic order.
pub fn all_orders(d: usize) -> Vec<BetaOrder> {
    (0..d).permutations(d).map(BetaOrder).collect()
}

/// Partial sums of `p` along `order` (length `d`, last entry is the total).
pub fn cumulative_sums(p: &Population, order: &BetaOrder) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(order.len());
    let mut acc: Option<Scalar> = None;
    for &i in &order.0 {
        let next = match acc {
            Some(a) => &a + &p[i],
            None => p[i].clone(),
        };
        out.push(next.clone());
        acc = Some(next);
    }
    out
}

/// Componentwise comparison of two cumulative-sum vectors over the same
/// order: does the first lie nowhere below the second?
pub fn dominates_in_order(p_cums: &[Scalar], q_cums: &[Scalar], eta: f64) -> bool {
    p_cums
        .iter()
        .zip(q_cums)
        .all(|(a, b)| a.ge_with(b, eta))
}

/// The concave, piecewise-linear curve of cumulative population against
/// cumulative stationary weight, taken along a fixed order.
#[derive(Debug, Clone)]
pub struct ThermoCurve {
    xs: Vec<Scalar>,
    ys: Vec<Scalar>,
}

impl ThermoCurve {
    /// Curve of `p` along its canonical order.
    pub fn new(ctx: &GibbsContext, p: &Population) -> Result<Self> {
        let order = canonical_beta_order(ctx, p)?;
        Self::from_order(ctx, p, &order)
    }

    /// Curve of `p` along an explicit order (concave only if compatible).
    pub fn from_order(ctx: &GibbsContext, p: &Population, order: &BetaOrder) -> Result<Self> {
        check_len(ctx, p)?;
        let mode = ctx.mode();
        let mut xs = vec![Scalar::zero(mode)];
        let mut ys = vec![Scalar::zero(mode)];
        for &i in &order.0 {
            xs.push(xs.last().unwrap() + &ctx.gamma()[i]);
            ys.push(ys.last().unwrap() + &p[i]);
        }
        Ok(ThermoCurve { xs, ys })
    }

    /// The `d + 1` vertices, from `(0, 0)` to `(1, 1)`.
    pub fn points(&self) -> impl Iterator<Item = (&Scalar, &Scalar)> {
        self.xs.iter().zip(self.ys.iter())
    }

    pub fn xs(&self) -> &[Scalar] {
        &self.xs
    }

    pub fn ys(&self) -> &[Scalar] {
        &self.ys
    }

    /// Piecewise-linear interpolation at `x` in `[0, 1]`; exact in rational
    /// mode.
    pub fn value_at(&self, x: &Scalar) -> Result<Scalar> {
        let first = self.xs.first().unwrap();
        let last = self.xs.last().unwrap();
        if x.cmp_total(first) == Ordering::Less || x.cmp_total(last) == Ordering::Greater {
            return Err(Error::CurveArgOutOfRange);
        }
        // The xs are non-decreasing; find the first vertex at or past x.
        let k = self
            .xs
            .iter()
            .position(|xi| xi.cmp_total(x) != Ordering::Less)
            .expect("x is within the curve's span");
        if self.xs[k].cmp_total(x) == Ordering::Equal {
            return Ok(self.ys[k].clone());
        }
        let (x0, x1) = (&self.xs[k - 1], &self.xs[k]);
        let (y0, y1) = (&self.ys[k - 1], &self.ys[k]);
        let run = x1 - x0;
        Ok(y0 + &(&(&(y1 - y0) * &(x - x0)) / &run))
    }
}

/// Whether `p`'s curve lies nowhere below `q`'s.
///
/// Both curves are concave, so the difference restricted to one segment of
/// `q`'s curve is concave and its minimum sits at a vertex of `q`; checking
/// the vertices is therefore exact, not a discretization.
pub fn thermomajorizes(ctx: &GibbsContext, p: &Population, q: &Population) -> Result<bool> {
    let pc = ThermoCurve::new(ctx, p)?;
    let qc = ThermoCurve::new(ctx, q)?;
    let eta = ctx.eta();
    for (x, y) in qc.points() {
        if !pc.value_at(x)?.ge_with(y, eta) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One member of the complete family of scalar monotones:
/// `sigma_a(p) = -sum_i |p_i - a * gamma_i / gamma_min|` for `a` in `[0, 1]`.
///
/// At `a = 0` this is minus the total population; at `a = 1` it measures the
/// overlap deficit with the scaled stationary profile. Each member is
/// non-decreasing under every thermalization step, and jointly the family
/// decides domination (see [`sigma_a_dominates`]).
pub fn sigma_a(ctx: &GibbsContext, p: &Population, a: &Scalar) -> Result<Scalar> {
    check_len(ctx, p)?;
    let zero = Scalar::zero(ctx.mode());
    let one = Scalar::one(ctx.mode());
    if a.cmp_total(&zero) == Ordering::Less || a.cmp_total(&one) == Ordering::Greater {
        return Err(Error::SigmaParamOutOfRange);
    }
    let gmin = ctx.min_gamma();
    let mut total = zero;
    for (pi, gi) in p.iter().zip(ctx.gamma()) {
        let target = &(a * gi) / &gmin;
        total = &total + &(pi - &target).abs();
    }
    Ok(-total)
}

/// The parameter values where `sigma_a(p)` or `sigma_a(q)` has a kink,
/// together with the endpoints of `[0, 1]`.
pub fn sigma_kink_grid(ctx: &GibbsContext, p: &Population, q: &Population) -> Result<Vec<Scalar>> {
    check_len(ctx, p)?;
    check_len(ctx, q)?;
    let gmin = ctx.min_gamma();
    let zero = Scalar::zero(ctx.mode());
    let one = Scalar::one(ctx.mode());
    let mut grid = vec![zero.clone(), one.clone()];
    for pop in [p, q] {
        for (xi, gi) in pop.iter().zip(ctx.gamma()) {
            // sigma_a is non-smooth where a = x_i * gamma_min / gamma_i.
            let a = &(xi * &gmin) / gi;
            if a.cmp_total(&zero) != Ordering::Less && a.cmp_total(&one) != Ordering::Greater {
                grid.push(a);
            }
        }
    }
    grid.sort_by(Scalar::cmp_total);
    grid.dedup_by(|a, b| a.cmp_total(b) == Ordering::Equal);
    Ok(grid)
}

/// Whether the whole family leaves room for `p` to evolve into `q`: every
/// member is non-decreasing along realizable evolutions, so `p` dominates
/// `q` exactly when no member evaluates larger on `p` than on `q`. Both
/// sides are piecewise linear in the parameter, so checking the joint kink
/// grid decides the whole continuum.
pub fn sigma_a_dominates(ctx: &GibbsContext, p: &Population, q: &Population) -> Result<bool> {
    let eta = ctx.eta();
    for a in sigma_kink_grid(ctx, p, q)? {
        if !sigma_a(ctx, p, &a)?.le_with(&sigma_a(ctx, q, &a)?, eta) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_len(ctx: &GibbsContext, p: &Population) -> Result<()> {
    if p.len() != ctx.dim() {
        return Err(Error::LengthMismatch {
            got: p.len(),
            want: ctx.dim(),
        });
    }
    Ok(())
}
