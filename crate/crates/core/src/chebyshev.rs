//! Chebyshev polynomials of both kinds (negative indices included), the
//! `U_n U_m` linearization, and geometric / multi-geometric trig sums.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::poly::trig::TrigKind;
use crate::poly::{Exps, Monomial, Poly, Var, VarSet};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChebKind {
    T,
    U,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChebIndex {
    pub kind: ChebKind,
    pub index: i64,
}

impl ChebIndex {
    pub fn t(index: i64) -> Self {
        ChebIndex { kind: ChebKind::T, index }
    }

    pub fn u(index: i64) -> Self {
        ChebIndex { kind: ChebKind::U, index }
    }

    /// `(sign, n)` with the polynomial equal to `sign * P_n`, or `None` for
    /// the zero polynomial (`U_{-1}`). `T_{-i} = T_i`, `U_{-i} = -U_{i-2}`.
    pub fn normalized(self) -> Option<(i8, u64)> {
        let i = self.index;
        match self.kind {
            ChebKind::T => Some((1, i.unsigned_abs())),
            ChebKind::U if i >= 0 => Some((1, i as u64)),
            ChebKind::U if i == -1 => None,
            ChebKind::U => Some((-1, (-i - 2) as u64)),
        }
    }
}

/// Minimal ring interface for the recurrence.
pub trait ChebRing: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn two_x_times(x: &Self, p: &Self) -> Self;
    fn sub(a: &Self, b: &Self) -> Self;
    fn neg(a: &Self) -> Self;
}

impl ChebRing for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn two_x_times(x: &Self, p: &Self) -> Self {
        2.0 * x * p
    }
    fn sub(a: &Self, b: &Self) -> Self {
        a - b
    }
    fn neg(a: &Self) -> Self {
        -a
    }
}

impl ChebRing for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn two_x_times(x: &Self, p: &Self) -> Self {
        x * p * Rational::from_integer(2.into())
    }
    fn sub(a: &Self, b: &Self) -> Self {
        a - b
    }
    fn neg(a: &Self) -> Self {
        -a
    }
}

impl ChebRing for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn two_x_times(x: &Self, p: &Self) -> Self {
        (x * p) * 2
    }
    fn sub(a: &Self, b: &Self) -> Self {
        a - b
    }
    fn neg(a: &Self) -> Self {
        -a
    }
}

/// Three-term recurrence after mapping negative indices.
pub fn cheb_eval<R: ChebRing>(c: ChebIndex, x: &R) -> R {
    let Some((sign, n)) = c.normalized() else {
        return R::zero();
    };
    let p0 = R::one();
    let p1 = match c.kind {
        ChebKind::T => x.clone(),
        ChebKind::U => R::two_x_times(x, &R::one()),
    };
    let v = match n {
        0 => p0,
        _ => {
            let (mut a, mut b) = (p0, p1);
            for _ in 1..n {
                let next = R::sub(&R::two_x_times(x, &b), &a);
                a = b;
                b = next;
            }
            b
        }
    };
    if sign < 0 {
        R::neg(&v)
    } else {
        v
    }
}

/// `T_0..T_n` and `U_0..U_n` values at `x`, one recurrence pass each.
pub fn cheb_table(kind: ChebKind, n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(match kind {
        ChebKind::T => x,
        ChebKind::U => 2.0 * x,
    });
    for i in 2..=n {
        let v = 2.0 * x * out[i - 1] - out[i - 2];
        out.push(v);
    }
    out
}

/// Integer coefficients (ascending powers) of the normalized polynomial.
pub fn cheb_coeffs(c: ChebIndex) -> Vec<BigInt> {
    let Some((sign, n)) = c.normalized() else {
        return Vec::new();
    };
    let n = n as usize;
    let mut a: Vec<BigInt> = vec![BigInt::one()];
    let mut b: Vec<BigInt> = match c.kind {
        ChebKind::T => vec![BigInt::zero(), BigInt::one()],
        ChebKind::U => vec![BigInt::zero(), BigInt::from(2)],
    };
    let v = if n == 0 {
        a
    } else {
        for _ in 1..n {
            let mut next = vec![BigInt::zero(); b.len() + 1];
            for (i, coef) in b.iter().enumerate() {
                next[i + 1] += coef * 2;
            }
            for (i, coef) in a.iter().enumerate() {
                next[i] -= coef;
            }
            a = b;
            b = next;
        }
        b
    };
    if sign < 0 {
        v.into_iter().map(|x| -x).collect()
    } else {
        v
    }
}

/// Chebyshev polynomial in the variable `x_1`.
pub fn cheb_poly(c: ChebIndex) -> Poly {
    cheb_poly_in(c, Var::X(1))
}

pub fn cheb_poly_in(c: ChebIndex, v: Var) -> Poly {
    let coeffs = cheb_coeffs(c);
    let vars = VarSet::new([v]);
    if vars.len() != 1 {
        // A marker variable drags its cosine partner along; build generically.
        return coeffs
            .iter()
            .enumerate()
            .fold(Poly::zero(), |acc, (e, k)| {
                acc + Poly::monomial(Rational::from_integer(k.clone()), &[(v, e as u16)])
            });
    }
    Poly::from_terms(
        vars,
        coeffs.into_iter().enumerate().map(|(e, k)| {
            let mut x = Exps::new();
            x.push(e as u16);
            (Monomial(x), Rational::from_integer(k))
        }),
    )
}

/// `U_n U_m = Σ_{j=0}^{min(n,m)} U_{n+m-2j}`: the indices on the right.
pub fn cheb_linearize_uu(n: u64, m: u64) -> Vec<u64> {
    (0..=n.min(m)).map(|j| n + m - 2 * j).collect()
}

/// `Σ_{n≥0} ρ^n f(nα + β)` for `f` = sin or cos.
pub fn geom_trig_sum(kind: TrigKind, rho: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(rho.abs() < 1.0) {
        return Err(Error::Domain(format!("|rho| = {} must be < 1", rho.abs())));
    }
    let den = 1.0 - 2.0 * rho * alpha.cos() + rho * rho;
    let num = match kind {
        TrigKind::Sin => beta.sin() - rho * (beta - alpha).sin(),
        TrigKind::Cos => beta.cos() - rho * (beta - alpha).cos(),
    };
    Ok(num / den)
}

pub const MULTI_TRIG_MAX: usize = 24;
const GRAY_BLOCK_BITS: usize = 10;

/// `Σ_{k ∈ N^n} Π ρ_i^{k_i} f(β + Σ k_i α_i)` as a subset sum over the
/// numerator of `Π 1/(1 - ρ_i e^{iα_i})`, divided by `Π (1 - 2ρ_i cos α_i + ρ_i²)`.
pub fn multi_trig_sum(kind: TrigKind, rhos: &[f64], alphas: &[f64], beta: f64) -> Result<f64> {
    multi_trig_sum_with(kind, rhos, alphas, beta, Exec::Sequential)
}

pub fn multi_trig_sum_with(
    kind: TrigKind,
    rhos: &[f64],
    alphas: &[f64],
    beta: f64,
    exec: Exec,
) -> Result<f64> {
    let num = multi_trig_numerator(kind, rhos, alphas, beta, exec)?;
    let den: f64 = rhos
        .iter()
        .zip(alphas)
        .map(|(r, a)| 1.0 - 2.0 * r * a.cos() + r * r)
        .product();
    Ok(num / den)
}

/// `Σ_{M ⊆ {1..n}} (-1)^{|M|} (Π_{k∈M} ρ_k) f(β - Σ_{k∈M} α_k)`.
pub fn multi_trig_numerator(
    kind: TrigKind,
    rhos: &[f64],
    alphas: &[f64],
    beta: f64,
    exec: Exec,
) -> Result<f64> {
    let n = rhos.len();
    if alphas.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: alphas.len(),
        });
    }
    if n == 0 {
        return Err(Error::Arity { expected: 1, got: 0 });
    }
    if n > MULTI_TRIG_MAX {
        return Err(Error::Scale(format!(
            "{n} directions exceed the subset-sum cap of {MULTI_TRIG_MAX}"
        )));
    }
    if let Some(r) = rhos.iter().find(|r| !(r.abs() < 1.0)) {
        return Err(Error::Domain(format!("|rho| = {} must be < 1", r.abs())));
    }
    let low = n.min(GRAY_BLOCK_BITS);
    let high = n - low;
    let f = |theta: f64| match kind {
        TrigKind::Cos => theta.cos(),
        TrigKind::Sin => theta.sin(),
    };
    let block = |hb: usize| -> f64 {
        // Fixed high bits: exact recomputation of the block's base point.
        let mut base_angle = beta;
        let mut base_weight = 1.0;
        for j in 0..high {
            if hb >> j & 1 == 1 {
                base_angle -= alphas[low + j];
                base_weight *= -rhos[low + j];
            }
        }
        if base_weight == 0.0 {
            return 0.0;
        }
        // Gray-code walk over the low bits, tracking the nonzero weight
        // product separately from the number of zero ratios present.
        let mut angle = base_angle;
        let mut weight = base_weight;
        let mut zeros = 0usize;
        let mut gray = 0usize;
        let mut acc = f(angle);
        for step in 1usize..(1 << low) {
            let bit = step.trailing_zeros() as usize;
            gray ^= 1 << bit;
            let r = -rhos[bit];
            if gray >> bit & 1 == 1 {
                angle -= alphas[bit];
                if r == 0.0 {
                    zeros += 1;
                } else {
                    weight *= r;
                }
            } else {
                angle += alphas[bit];
                if r == 0.0 {
                    zeros -= 1;
                } else {
                    weight /= r;
                }
            }
            if zeros == 0 {
                acc += weight * f(angle);
            }
        }
        acc
    };
    let parts = exec.map_range(1 << high, block);
    Ok(parts.into_iter().sum())
}

/// First-kind Gauss–Chebyshev nodes `cos((2k-1)π/(2m))`; each weight is `π/m`.
pub fn gauss_chebyshev_nodes(m: usize) -> Vec<f64> {
    (1..=m)
        .map(|k| ((2 * k - 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn small_values() {
        assert_eq!(cheb_eval(ChebIndex::t(3), &rat(1, 2)), int(-1));
        assert_eq!(cheb_eval(ChebIndex::u(2), &rat(1, 2)), int(0));
        let x = Poly::x(1);
        assert_eq!(cheb_eval(ChebIndex::u(-3), &x), -2 * &x);
        assert_eq!(cheb_eval(ChebIndex::u(-1), &x), Poly::zero());
    }

    #[test]
    fn polys() {
        let x = Poly::x(1);
        assert_eq!(cheb_poly(ChebIndex::t(2)), 2 * &x * &x - 1);
        assert_eq!(cheb_poly(ChebIndex::u(3)), 8 * x.pow(3) - 4 * &x);
        assert_eq!(cheb_poly(ChebIndex::t(-2)), cheb_poly(ChebIndex::t(2)));
        assert_eq!(cheb_poly(ChebIndex::u(5)), cheb_eval(ChebIndex::u(5), &x));
    }

    #[test]
    fn linearization_indices() {
        assert_eq!(cheb_linearize_uu(0, 5), vec![5]);
        assert_eq!(cheb_linearize_uu(2, 2), vec![4, 2, 0]);
        assert_eq!(cheb_linearize_uu(3, 1), vec![4, 2]);
    }

    #[test]
    fn geometric_sums() {
        let r = 0.3;
        assert!((geom_trig_sum(TrigKind::Cos, r, 0.0, 0.0).unwrap() - 1.0 / (1.0 - r)).abs() < 1e-15);
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!((geom_trig_sum(TrigKind::Sin, r, 0.0, half_pi).unwrap() - 1.0 / (1.0 - r)).abs() < 1e-15);
        assert!(geom_trig_sum(TrigKind::Cos, 1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn multi_sum_errors() {
        assert!(matches!(
            multi_trig_sum(TrigKind::Cos, &[0.1, 0.2], &[0.3], 0.0),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            multi_trig_sum(TrigKind::Cos, &[0.1, 1.2], &[0.3, 0.1], 0.0),
            Err(Error::Domain(_))
        ));
    }
}
