//! Numeric probes of the two open claims about `W_2`-type sums: the
//! tensor `b`-basis expansion of `d_n^{(2)}`, and the common denominator
//! `Π_i w_{n+m}(…|ρq^i)` of mixed `h`/`t` generating functions.

use num_traits::Zero;
use serde::Serialize;

use super::coeffs::{d2_expsum, product_series};
use super::first_kind::tn_family;
use super::{b_polys, h_polys, in_var, QContext};
use crate::denominator::build_w;
use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::rational::{self, Rational};

pub const BETA_MAX: usize = 10;
const EXPONENT_SEARCH: i64 = 80;

/// Exponents `e(n, j)` of the reference `β_{n,j}` (`n = 2, 3, 4`).
fn printed_exponents(n: usize) -> Option<&'static [i64]> {
    match n {
        2 => Some(&[0, 0]),
        3 => Some(&[0, 2]),
        4 => Some(&[0, 4, 5]),
        _ => None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaReport {
    pub q: String,
    pub n: usize,
    /// `REPRESENTED` or `UNREPRESENTABLE`.
    pub verdict: String,
    /// Exact `β_{n,0}..β_{n,⌊n/2⌋}`.
    pub betas: Vec<String>,
    /// Terms left over after the triangular solve.
    pub residual_terms: usize,
    /// `e` with `β_{n,j} = (−1)^j q^e (q)_n / ((q)_j (q)_{n−2j})`, if one exists.
    pub exponents: Vec<Option<i64>>,
    /// Agreement with the reference coefficients, where there are any.
    pub printed_match: Option<bool>,
    /// Every exponent equals `2jn − j(3j+5)/2`, the pattern the fits follow.
    pub exponent_pattern_holds: bool,
}

/// `2jn − j(3j+5)/2`: fits every represented case probed so far.
pub fn exponent_pattern(n: usize, j: usize) -> i64 {
    let (n, j) = (n as i64, j as i64);
    2 * j * n - j * (3 * j + 5) / 2
}

/// Solves `(−1)^n q^{C(n,2)} d_n^{(2)} = Σ_j β_{n,j} b_{n−2j}(x) b_{n−2j}(y)`
/// exactly: each `β` is read off the `x^m y^m` coefficient, top down.
pub fn beta_probe(ctx: &QContext, n: usize) -> Result<BetaReport> {
    if n > BETA_MAX {
        return Err(Error::Scale(format!("the beta probe runs for n <= {BETA_MAX}")));
    }
    if ctx.q().is_zero() {
        return Err(Error::Domain("the b-basis degenerates at q = 0".into()));
    }
    let c2 = (n * n.saturating_sub(1) / 2) as u64;
    let mut scale = ctx.pow_nonneg(c2);
    if n % 2 == 1 {
        scale = -scale;
    }
    let mut rest = d2_expsum(ctx, n)?.scale(&scale);
    let b = b_polys(ctx.q(), n);
    let mut betas = Vec::new();
    for j in 0..=n / 2 {
        let m = n - 2 * j;
        let bb = &b[m] * &in_var(&b[m], 2);
        let lead = bb.coeff_of(&[(Var::X(1), m as u16), (Var::X(2), m as u16)]);
        let top = rest.coeff_of(&[(Var::X(1), m as u16), (Var::X(2), m as u16)]);
        let beta = top / lead;
        rest = rest - bb.scale(&beta);
        betas.push(beta);
    }
    let represented = rest.is_zero();
    let exponents: Vec<Option<i64>> = betas
        .iter()
        .enumerate()
        .map(|(j, beta)| fit_exponent(ctx, n, j, beta))
        .collect();
    let printed_match = printed_exponents(n)
        .map(|es| represented && es.iter().zip(&exponents).all(|(e, f)| Some(*e) == *f));
    Ok(BetaReport {
        q: ctx.label(),
        n,
        verdict: if represented { "REPRESENTED" } else { "UNREPRESENTABLE" }.into(),
        betas: betas.iter().map(rational::format).collect(),
        residual_terms: rest.len(),
        exponent_pattern_holds: represented
            && exponents.iter().enumerate().all(|(j, e)| *e == Some(exponent_pattern(n, j))),
        exponents,
        printed_match,
    })
}

fn fit_exponent(ctx: &QContext, n: usize, j: usize, beta: &Rational) -> Option<i64> {
    let mut base = ctx.qq(n) / (ctx.qq(j) * ctx.qq(n - 2 * j));
    if j % 2 == 1 {
        base = -base;
    }
    if beta.is_zero() {
        return None;
    }
    let ratio = beta / base;
    (-EXPONENT_SEARCH..=EXPONENT_SEARCH).find(|&e| ctx.pow(e).map(|p| p == ratio).unwrap_or(false))
}

#[derive(Clone, Debug, Serialize)]
pub struct CommonDenominatorReport {
    pub q: String,
    /// Number of `h` factors and of `t` factors.
    pub n_h: usize,
    pub n_t: usize,
    pub shifts: Vec<i64>,
    pub order: usize,
    /// `ρ`-orders `r <= order` at which `S·W` has a nonzero coefficient.
    pub nonzero_orders: Vec<usize>,
    /// Largest absolute coefficient at each order.
    pub max_abs_by_order: Vec<f64>,
    /// Nonzero orders of `S·W / (ρ²;q)_∞`.
    pub over_rho2_nonzero_orders: Vec<usize>,
}

/// Multiplies `S = Σ_j ρ^j/(q)_j Π_k h_{j+l_k}(x_k) Π_i t_{j+l_{n+i}}(x_{n+i})`
/// by `W = Π_{i≥0} w_{n+m}(x|ρq^i)`, both exact through `ρ^order`.  The `t_n`
/// carry the truncated constants of their weight.
pub fn common_denominator_probe(
    ctx: &QContext,
    n_h: usize,
    n_t: usize,
    shifts: &[i64],
    order: usize,
) -> Result<CommonDenominatorReport> {
    let p = n_h + n_t;
    if !(1..=2).contains(&p) {
        return Err(Error::Scale("the probe covers n + m in 1..=2".into()));
    }
    if order > 12 {
        return Err(Error::Scale("the probe covers rho-order <= 12".into()));
    }
    if shifts.len() != p {
        return Err(Error::Arity { expected: p, got: shifts.len() });
    }
    let top = order as i64 + shifts.iter().copied().max().unwrap_or(0).max(0);
    let h = h_polys(ctx.q(), top as usize);
    let t = if n_t > 0 { tn_family(ctx, top as usize)?.polys } else { Vec::new() };
    let pick = |table: &[Poly], idx: i64, var: u8| -> Poly {
        if idx < 0 {
            Poly::zero()
        } else {
            in_var(&table[idx as usize], var)
        }
    };
    let s: Vec<Poly> = (0..=order)
        .map(|j| {
            let mut acc = Poly::constant(ctx.qq(j).recip());
            for (k, &l) in shifts.iter().enumerate() {
                let table = if k < n_h { &h } else { &t };
                acc = acc * pick(table, j as i64 + l, k as u8 + 1);
            }
            acc
        })
        .collect();
    let w = product_series(ctx, &build_w(p)?.poly, order);
    let sw = convolve(&s, &w, order);
    // 1/(ρ²;q)_∞ = Σ_k ρ^{2k}/(q)_k
    let inv: Vec<Poly> = (0..=order)
        .map(|r| if r % 2 == 0 { Poly::constant(ctx.qq(r / 2).recip()) } else { Poly::zero() })
        .collect();
    let over = convolve(&sw, &inv, order);
    let nonzero = |v: &[Poly]| (0..v.len()).filter(|&r| !v[r].is_zero()).collect::<Vec<_>>();
    Ok(CommonDenominatorReport {
        q: ctx.label(),
        n_h,
        n_t,
        shifts: shifts.to_vec(),
        order,
        nonzero_orders: nonzero(&sw),
        max_abs_by_order: sw.iter().map(|c| rational::to_f64(&c.max_abs_coeff())).collect(),
        over_rho2_nonzero_orders: nonzero(&over),
    })
}

fn convolve(a: &[Poly], b: &[Poly], order: usize) -> Vec<Poly> {
    (0..=order)
        .map(|r| {
            (0..=r)
                .filter(|&i| i < a.len() && r - i < b.len())
                .map(|i| &a[i] * &b[r - i])
                .fold(Poly::zero(), |x, y| x + y)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use num_traits::One;

    #[test]
    fn printed_betas() {
        for q in [rat(1, 2), rat(1, 3), rat(2, 5)] {
            let c = QContext::new(q).unwrap();
            let r2 = beta_probe(&c, 2).unwrap();
            assert_eq!(r2.verdict, "REPRESENTED");
            let want = -(Rational::one() - c.pow(2).unwrap());
            assert_eq!(r2.betas[1], rational::format(&want));
            assert_eq!(r2.betas[0], "1/1");
            for n in 3..=6 {
                let r = beta_probe(&c, n).unwrap();
                assert_eq!(r.verdict, "REPRESENTED");
                assert!(r.exponent_pattern_holds, "{r:?}");
                assert_eq!(r.printed_match, (n <= 4).then_some(true));
            }
        }
    }

    #[test]
    fn one_variable_denominator() {
        // Σ ρ^j/(q)_j h_j = 1/W_1, so S·W = 1.
        let c = QContext::new(rat(1, 3)).unwrap();
        let r = common_denominator_probe(&c, 1, 0, &[0], 8).unwrap();
        assert_eq!(r.nonzero_orders, vec![0]);
        // Σ ρ^j/(q)_j h_j(x) h_j(y) = (ρ²;q)_∞ / W_2.
        let r = common_denominator_probe(&c, 2, 0, &[0, 0], 8).unwrap();
        assert_eq!(r.over_rho2_nonzero_orders, vec![0]);
    }
}
