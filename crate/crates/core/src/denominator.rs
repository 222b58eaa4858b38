//! The common denominators `w_n(x_1..x_n | ρ)`.
//!
//! Two independent constructions: the product over sign vectors of
//! `1 - 2ρ cos(Σ i_s α_s) + ρ²` (one representative per pair `±i`, since
//! both members give the same factor), and the recursion that replaces the last
//! cosine of `w_{n-1}` by `cos(α+β)` in one factor and `cos(α-β)` in the other.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::poly::trig::cos_sin_poly;
use crate::poly::{product_tree, Poly, Var};
use crate::rational::Rational;

pub const W_MAX: usize = 5;

/// `w_n` as a polynomial in `x_1..x_n, ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WPoly {
    pub n: usize,
    pub poly: Poly,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("w_n needs n >= 1".into()));
    }
    if n > W_MAX {
        return Err(Error::Scale(format!("w_{n}: n is capped at {W_MAX}")));
    }
    Ok(())
}

fn assert_marker_free(p: &Poly) {
    assert!(
        p.vars().as_slice().iter().all(|v| !matches!(v, Var::S(_))),
        "sine markers survived in a denominator"
    );
}

/// `1 - 2ρ c + ρ²`.
pub fn w1_of(c: &Poly) -> Poly {
    let r = Poly::rho();
    1 - 2 * &r * c + &r * &r
}

/// Sign-vector product, uncached.
pub fn build_w_with(n: usize, exec: Exec) -> Result<WPoly> {
    check_n(n)?;
    let factors: Vec<Poly> = exec.map_range(1 << (n - 1), |mask| {
        let coeffs: Vec<i64> = (0..n)
            .map(|s| if s > 0 && mask >> (s - 1) & 1 == 1 { -1 } else { 1 })
            .collect();
        let (cos, _) = cos_sin_poly(&coeffs);
        w1_of(&cos)
    });
    let poly = product_tree(factors, exec);
    assert_marker_free(&poly);
    Ok(WPoly { n, poly })
}

static CACHE: [OnceLock<WPoly>; W_MAX] = [const { OnceLock::new() }; W_MAX];

/// Memoized sign-vector product.
pub fn build_w(n: usize) -> Result<WPoly> {
    check_n(n)?;
    Ok(CACHE[n - 1]
        .get_or_init(|| build_w_with(n, Exec::default()).expect("checked"))
        .clone())
}

/// Recursive construction from `w_{n-1}`.
pub fn build_w_recursive(n: usize) -> Result<WPoly> {
    build_w_recursive_with(n, Exec::default())
}

pub fn build_w_recursive_with(n: usize, exec: Exec) -> Result<WPoly> {
    check_n(n)?;
    let mut w = w1_of(&Poly::x(1));
    for m in 2..=n {
        let a = (m - 1) as u8;
        let b = m as u8;
        let (plus, _) = cos_sin_poly(&unit_pair(m, 1));
        let (minus, _) = cos_sin_poly(&unit_pair(m, -1));
        let (left, right) = exec.join(
            || w.substitute(Var::X(a), &plus),
            || w.substitute(Var::X(a), &minus),
        );
        debug_assert!(plus.vars().index(Var::X(b)).is_some());
        w = left.mul_with(&right, exec);
    }
    assert_marker_free(&w);
    Ok(WPoly { n, poly: w })
}

/// Multipliers for `α_{m-1} ± α_m`.
fn unit_pair(m: usize, sign: i64) -> Vec<i64> {
    let mut c = vec![0; m];
    c[m - 2] = 1;
    c[m - 1] = sign;
    c
}

/// `w_n` with `x_1 = 1`; equals `w_{n-1}(x_2..x_n)²`.
pub fn w_specialize_one(n: usize) -> Result<Poly> {
    if n < 2 {
        return Err(Error::Domain("specialization needs n >= 2".into()));
    }
    Ok(build_w(n)?.poly.substitute_value(Var::X(1), &Rational::from_integer(1.into())))
}

/// `w_n(x_1..x_n|ρ)` with the variables shifted to `x_{1+off}..x_{n+off}`.
pub fn shifted(w: &Poly, off: u8) -> Poly {
    w.rename(|v| match v {
        Var::X(i) => Var::X(i + off),
        other => other,
    })
}

/// Reference closed forms of the first three denominators.
pub mod printed {
    use crate::poly::Poly;

    pub fn w1() -> Poly {
        let (x, r) = (Poly::x(1), Poly::rho());
        1 - 2 * &r * &x + &r * &r
    }

    pub fn w2() -> Poly {
        let (x, y, r) = (Poly::x(1), Poly::x(2), Poly::rho());
        let r2 = &r * &r;
        (1 - &r2).pow(2) - 4 * &x * &y * &r * (1 + &r2) + 4 * &r2 * (&x * &x + &y * &y)
    }

    /// Transcribed with `x, y, z` read as `x_1, x_2, x_3`.
    pub fn w3() -> Poly {
        let (x, y, z, r) = (Poly::x(1), Poly::x(2), Poly::x(3), Poly::rho());
        let r2 = &r * &r;
        let sq = |p: &Poly| p * p;
        let s2 = sq(&x) + sq(&y) + sq(&z);
        let s4 = x.pow(4) + y.pow(4) + z.pow(4);
        let pairs = sq(&x) * sq(&y) + sq(&x) * sq(&z) + sq(&y) * sq(&z);
        let xyz = &x * &y * &z;
        16 * r.pow(4) * s4 - 8 * &r2 * (1 + &r2).pow(2) * &s2
            + 16 * &r2 * (1 + r.pow(4)) * pairs
            + 64 * r.pow(4) * sq(&xyz)
            - 32 * r.pow(3) * (1 + &r2) * &xyz * &s2
            - 8 * &r * (1 + &r2) * (1 + r.pow(4) - 6 * &r2) * &xyz
            + (1 + &r2).pow(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Assignment;
    use crate::rational::{int, rat};

    #[test]
    fn small_denominators_match_print() {
        assert_eq!(build_w(1).unwrap().poly, printed::w1());
        assert_eq!(build_w(2).unwrap().poly, printed::w2());
    }

    #[test]
    fn recursion_from_w1() {
        assert_eq!(build_w_recursive(2).unwrap().poly, printed::w2());
    }

    #[test]
    fn specialization() {
        let s = w_specialize_one(2).unwrap();
        let w1 = shifted(&printed::w1(), 1);
        assert_eq!(s, &w1 * &w1);
        let at = Assignment::new().with(Var::X(2), int(1)).with(Var::Rho, rat(1, 2));
        assert_eq!(s.eval(&at).unwrap(), rat(1, 16));
    }

    #[test]
    fn scale_limits() {
        assert!(matches!(build_w(6), Err(Error::Scale(_))));
        assert!(matches!(build_w_recursive(0), Err(Error::Domain(_))));
    }

    #[test]
    fn w2_at_one() {
        let at = Assignment::new()
            .with(Var::X(1), int(1))
            .with(Var::X(2), int(1))
            .with(Var::Rho, rat(1, 2));
        assert_eq!(printed::w2().eval(&at).unwrap(), rat(1, 16));
    }
}
