//! The q-deformation: q-symbols, q-Hermite polynomials `h_n(x|q)` and their
//! reversals `b_n(x|q)`, Taylor coefficients of the infinite products
//! `W_1 = Π v(x|ρq^j)` and `W_2 = Π w_2(x,y|ρq^j)`, the first-kind analogue
//! `t_n`, and probes of the two conjectured structures.
//!
//! Polynomials are ordinary [`Poly`] values in `x_1` (and `x_2`) with exact
//! rational coefficients; `q` is a fixed rational carried by [`QContext`].

pub mod coeffs;
pub mod conjecture;
pub mod first_kind;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::rational::{self, Rational};

pub use coeffs::{
    chi1t_check, d2_coeff, d2_printed, d_coeff, d_via_product, final_identity_exact, final_identity_numeric,
    idb_check, Chi1tReport, D2Report, DReport, FinalIdentityReport, IdbReport,
};
pub use conjecture::{beta_probe, common_denominator_probe, BetaReport, CommonDenominatorReport};
pub use first_kind::{
    fh_normalization, ft_moment_u, ft_moment_u_quadrature, hu_expand, tn_construct, tn_family, tn_lower_products,
    FhReport, GramReport, Moment, TnFamily, TnReport,
};

/// Largest polynomial index handled exactly.
pub const QN_MAX: usize = 64;

/// A fixed `q` with `|q| < 1` and cached `(q;q)_n`, `n <= QN_MAX`.
#[derive(Clone, Debug)]
pub struct QContext {
    q: Rational,
    qq: Vec<Rational>,
}

impl QContext {
    pub fn new(q: Rational) -> Result<Self> {
        if !(q.abs() < Rational::one()) {
            return Err(Error::Domain(format!("|q| = {} must be < 1", rational::format(&q.abs()))));
        }
        let mut qq = Vec::with_capacity(QN_MAX + 1);
        qq.push(Rational::one());
        let mut qk = Rational::one();
        for k in 1..=QN_MAX {
            qk *= &q;
            let next = &qq[k - 1] * (Rational::one() - &qk);
            qq.push(next);
        }
        Ok(QContext { q, qq })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(rational::parse(s)?)
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn q_f64(&self) -> f64 {
        rational::to_f64(&self.q)
    }

    pub fn label(&self) -> String {
        rational::format(&self.q)
    }

    /// `q^e`; negative exponents need `q != 0`.
    pub fn pow(&self, e: i64) -> Result<Rational> {
        if e < 0 && self.q.is_zero() {
            return Err(Error::Domain("negative power of q = 0".into()));
        }
        Ok(rational::powi(&self.q, e))
    }

    fn pow_nonneg(&self, e: u64) -> Rational {
        rational::powi(&self.q, e as i64)
    }

    /// `[n]_q = 1 + q + … + q^{n-1}`, `[0]_q = 0`.
    pub fn bracket(&self, n: usize) -> Rational {
        (0..n).map(|k| self.pow_nonneg(k as u64)).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn factorial(&self, n: usize) -> Rational {
        (1..=n).map(|j| self.bracket(j)).fold(Rational::one(), |a, b| a * b)
    }

    /// `(q;q)_n`.
    pub fn qq(&self, n: usize) -> Rational {
        if n <= QN_MAX {
            return self.qq[n].clone();
        }
        self.pochhammer(&self.q, n)
    }

    /// `(a;q)_n = Π_{j<n} (1 - a q^j)`, `(a;q)_0 = 1`.
    pub fn pochhammer(&self, a: &Rational, n: usize) -> Rational {
        let mut acc = Rational::one();
        let mut t = a.clone();
        for _ in 0..n {
            acc *= Rational::one() - &t;
            t *= &self.q;
        }
        acc
    }

    /// Gaussian binomial, zero outside `0 <= k <= n`.
    pub fn binomial(&self, n: i64, k: i64) -> Rational {
        if n < 0 || k < 0 || k > n {
            return Rational::zero();
        }
        let (n, k) = (n as usize, k as usize);
        self.qq(n) / (self.qq(k) * self.qq(n - k))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QSymbol {
    Bracket,
    Factorial,
    Binomial,
    Pochhammer,
}

/// Uniform access to the q-symbols. `Bracket`/`Factorial` take `[n]`,
/// `Binomial` takes `[n, k]`, `Pochhammer` takes `[a, n]`.
pub fn q_symbol(ctx: &QContext, which: QSymbol, args: &[Rational]) -> Result<Rational> {
    let want = match which {
        QSymbol::Bracket | QSymbol::Factorial => 1,
        QSymbol::Binomial | QSymbol::Pochhammer => 2,
    };
    if args.len() != want {
        return Err(Error::Arity {
            expected: want,
            got: args.len(),
        });
    }
    let integer = |r: &Rational| -> Result<i64> {
        use num_traits::ToPrimitive;
        if !r.is_integer() {
            return Err(Error::Domain(format!("{} is not an integer", rational::format(r))));
        }
        r.to_integer().to_i64().ok_or_else(|| Error::Scale("argument too large".into()))
    };
    let count = |r: &Rational| -> Result<usize> {
        let v = integer(r)?;
        usize::try_from(v).map_err(|_| Error::Domain(format!("{v} must be nonnegative")))
    };
    Ok(match which {
        QSymbol::Bracket => ctx.bracket(count(&args[0])?),
        QSymbol::Factorial => ctx.factorial(count(&args[0])?),
        QSymbol::Binomial => ctx.binomial(integer(&args[0])?, integer(&args[1])?),
        QSymbol::Pochhammer => ctx.pochhammer(&args[0], count(&args[1])?),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HbKind {
    H,
    B,
}

fn check_index(n: usize) -> Result<()> {
    if n > QN_MAX {
        return Err(Error::Scale(format!("index {n} exceeds {QN_MAX}")));
    }
    Ok(())
}

/// `h_0..h_n` in `x_1` for an arbitrary rational `q` (also `|q| >= 1`), from
/// `h_{k+1} = 2x h_k - (1 - q^k) h_{k-1}`.
pub fn h_polys(q: &Rational, n: usize) -> Vec<Poly> {
    let x = Poly::x(1);
    let mut out = vec![Poly::one()];
    if n >= 1 {
        out.push(2 * &x);
    }
    for k in 1..n {
        let c = Rational::one() - rational::powi(q, k as i64);
        let next = 2 * &x * &out[k] - out[k - 1].scale(&c);
        out.push(next);
    }
    out
}

/// `b_0..b_n` from `b_{k+1} = -2q^k x b_k + q^{k-1}(1 - q^k) b_{k-1}`,
/// `b_0 = 1`, `b_1 = -2x`.
pub fn b_polys(q: &Rational, n: usize) -> Vec<Poly> {
    let x = Poly::x(1);
    let mut out = vec![Poly::one()];
    if n >= 1 {
        out.push(-2 * &x);
    }
    for k in 1..n {
        let a = rational::int(-2) * rational::powi(q, k as i64);
        let c = rational::powi(q, k as i64 - 1) * (Rational::one() - rational::powi(q, k as i64));
        let next = (&x * &out[k]).scale(&a) + out[k - 1].scale(&c);
        out.push(next);
    }
    out
}

/// `h_n(x|q)` or `b_n(x|q)` in `x_1`.
pub fn hb_poly(ctx: &QContext, kind: HbKind, n: usize) -> Result<Poly> {
    check_index(n)?;
    Ok(match kind {
        HbKind::H => h_polys(ctx.q(), n).pop().expect("nonempty"),
        HbKind::B => b_polys(ctx.q(), n).pop().expect("nonempty"),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub q: String,
    pub n_max: usize,
    pub failures: Vec<usize>,
    pub holds: bool,
}

/// `b_n(x|q) = (-1)^n q^{C(n,2)} h_n(x|1/q)` for `n <= n_max`, exactly.
pub fn duality_check(ctx: &QContext, n_max: usize) -> Result<DualityReport> {
    check_index(n_max)?;
    if ctx.q().is_zero() {
        return Err(Error::Domain("duality needs q != 0".into()));
    }
    let inv = ctx.q().recip();
    let hs = h_polys(&inv, n_max);
    let bs = b_polys(ctx.q(), n_max);
    let failures: Vec<usize> = (0..=n_max)
        .filter(|&n| {
            let mut c = ctx.pow_nonneg((n * n.saturating_sub(1) / 2) as u64);
            if n % 2 == 1 {
                c = -c;
            }
            bs[n] != hs[n].scale(&c)
        })
        .collect();
    Ok(DualityReport {
        q: ctx.label(),
        n_max,
        holds: failures.is_empty(),
        failures,
    })
}

/// `h_0(x|q)..h_n(x|q)` in double precision.
pub fn h_table_f64(q: f64, n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(2.0 * x);
    }
    let mut qk = 1.0;
    for k in 1..n {
        qk *= q;
        let next = 2.0 * x * out[k] - (1.0 - qk) * out[k - 1];
        out.push(next);
    }
    out
}

/// `(q;q)_0..(q;q)_n` in double precision.
pub fn qq_table_f64(q: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    let mut qk = 1.0;
    for k in 1..=n {
        qk *= q;
        out.push(out[k - 1] * (1.0 - qk));
    }
    out
}

/// Rows `0..=n` of Gaussian binomials in double precision.
pub fn qbinomial_table_f64(q: f64, n: usize) -> Vec<Vec<f64>> {
    let qq = qq_table_f64(q, n);
    (0..=n)
        .map(|m| (0..=m).map(|k| qq[m] / (qq[k] * qq[m - k])).collect())
        .collect()
}

/// Rename `x_1` to `x_i`.
pub(crate) fn in_var(p: &Poly, i: u8) -> Poly {
    if i == 1 {
        return p.clone();
    }
    p.rename(|v| if v == Var::X(1) { Var::X(i) } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{cheb_poly, ChebIndex};
    use crate::rational::{int, rat};

    fn ctx(n: i64, d: i64) -> QContext {
        QContext::new(rat(n, d)).unwrap()
    }

    #[test]
    fn symbols() {
        let c = ctx(1, 2);
        assert_eq!(c.bracket(3), rat(7, 4));
        assert_eq!(c.bracket(0), int(0));
        assert_eq!(c.pochhammer(&rat(3, 5), 0), int(1));
        let c3 = ctx(1, 3);
        let direct = c3.qq(4) / (c3.qq(2) * c3.qq(2));
        let via_factorials = c3.factorial(4) / (c3.factorial(2) * c3.factorial(2));
        assert_eq!(c3.binomial(4, 2), direct);
        assert_eq!(direct, via_factorials);
        assert_eq!(c3.binomial(2, 3), int(0));
        for n in 0..10 {
            let lhs = c3.qq(n);
            let rhs = rational::powi(&(int(1) - rat(1, 3)), n as i64) * c3.factorial(n);
            assert_eq!(lhs, rhs);
        }
        assert_eq!(q_symbol(&c, QSymbol::Bracket, &[int(3)]).unwrap(), rat(7, 4));
        assert!(matches!(q_symbol(&c, QSymbol::Binomial, &[int(3)]), Err(Error::Arity { .. })));
        assert!(QContext::new(int(1)).is_err());
    }

    #[test]
    fn low_order_polynomials() {
        let c = ctx(1, 3);
        let (x, q) = (Poly::x(1), Poly::constant(rat(1, 3)));
        assert_eq!(hb_poly(&c, HbKind::H, 2).unwrap(), 4 * &x * &x - 1 + &q);
        assert_eq!(hb_poly(&c, HbKind::B, 2).unwrap(), 4 * &q * &x * &x + 1 - &q);
        let z = QContext::new(int(0)).unwrap();
        for n in 0..8 {
            assert_eq!(hb_poly(&z, HbKind::H, n).unwrap(), cheb_poly(ChebIndex::u(n as i64)));
        }
        assert!(matches!(hb_poly(&c, HbKind::H, 65), Err(Error::Scale(_))));
    }

    #[test]
    fn duality() {
        for (n, d) in [(1, 2), (-1, 3), (3, 5)] {
            assert!(duality_check(&ctx(n, d), 12).unwrap().holds);
        }
        assert!(duality_check(&QContext::new(int(0)).unwrap(), 3).is_err());
    }

    #[test]
    fn float_tables_match_exact() {
        let c = ctx(2, 5);
        let exact = h_polys(c.q(), 9);
        let t = h_table_f64(0.4, 9, 0.3);
        for (p, v) in exact.iter().zip(&t) {
            let at = crate::poly::Assignment::new().with(Var::X(1), 0.3);
            assert!((p.eval_f64(&at).unwrap() - v).abs() < 1e-12);
        }
    }
}
