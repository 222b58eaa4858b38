//! Taylor coefficients of `W_1` and `W_2` and the identities built on them.
//!
//! `d_n = (q)_n [ρ^n] W_1` and `d_n^{(2)} = (q)_n [ρ^n] W_2` are each obtained
//! two ways: from the q-binomial expansion of `(ρe^{iφ})_∞(ρe^{-iφ})_∞`
//! (paired into cosines), and from the functional equation
//! `W(ρ) = w(ρ) W(ρq)`, which gives
//! `(1 - q^k) a_k = Σ_{i≥1} [ρ^i]w · q^{k-i} a_{k-i}` for `W = Σ a_k ρ^k`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{b_polys, check_index, h_polys, h_table_f64, in_var, qbinomial_table_f64, qq_table_f64, QContext};
use crate::chebyshev::{cheb_poly_in, ChebIndex};
use crate::denominator::{build_w, w1_of};
use crate::error::{Error, Result};
use crate::poly::trig::cos_sin_poly;
use crate::poly::{Poly, Var};
use crate::rational::Rational;

pub const D_MAX: usize = 32;
pub const D2_MAX: usize = 16;

fn c2(n: usize) -> u64 {
    (n * n.saturating_sub(1) / 2) as u64
}

fn sign(n: usize) -> Rational {
    if n % 2 == 1 {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Coefficients of `d_n(cos β) = Σ_j c_j cos((2j - n)β)`; the exponent
/// `C(n,2) - j(n-j)` is never negative, so `q = 0` needs no special case.
fn d_cos_coeffs(ctx: &QContext, n: usize) -> Vec<(i64, Rational)> {
    (0..=n)
        .map(|j| {
            let e = c2(n) - (j * (n - j)) as u64;
            let c = sign(n) * ctx.binomial(n as i64, j as i64) * ctx.pow_nonneg(e);
            (2 * j as i64 - n as i64, c)
        })
        .collect()
}

/// `d_n` from the q-binomial exponential sum, in the `T`-basis of `x_1`.
pub fn d_expsum(ctx: &QContext, n: usize) -> Poly {
    d_cos_coeffs(ctx, n)
        .into_iter()
        .map(|(k, c)| cheb_poly_in(ChebIndex::t(k), Var::X(1)).scale(&c))
        .fold(Poly::zero(), |a, b| a + b)
}

/// Exact Taylor coefficients `a_0..a_n` of `Π_{j≥0} w(ρ q^j)` for a
/// polynomial factor `w` with `w(0) = 1`.
pub(crate) fn product_series(ctx: &QContext, w: &Poly, n: usize) -> Vec<Poly> {
    let e: Vec<Poly> = (0..=w.degree_in(Var::Rho) as usize).map(|i| w.rho_coeff(i)).collect();
    debug_assert!(e[0] == Poly::one());
    let mut a = vec![Poly::one()];
    for k in 1..=n {
        let mut acc = Poly::zero();
        for (i, ei) in e.iter().enumerate().skip(1) {
            if i > k || ei.is_zero() {
                continue;
            }
            acc = acc + (ei * &a[k - i]).scale(&ctx.pow_nonneg((k - i) as u64));
        }
        let denom = Rational::one() - ctx.pow_nonneg(k as u64);
        a.push(acc.scale(&denom.recip()));
    }
    a
}

/// `d_0..d_n` from the functional equation of `W_1`.
pub fn d_via_product(ctx: &QContext, n: usize) -> Vec<Poly> {
    let a = product_series(ctx, &w1_of(&Poly::x(1)), n);
    a.into_iter().enumerate().map(|(k, p)| p.scale(&ctx.qq(k))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DReport {
    pub q: String,
    pub n: usize,
    /// Exponential sum equals `b_n`.
    pub lemma_holds: bool,
    /// Exponential sum equals the functional-equation coefficient.
    pub routes_agree: bool,
    /// `(factors N, max |(q)_n [ρ^n] Π_{j<N} v(x|ρq^j) - d_n(x)|` over a grid).
    pub truncated_products: Vec<(usize, f64)>,
    #[serde(skip)]
    pub poly: Poly,
}

/// `d_n(x|q)`, checked against `b_n` and against the product side.
pub fn d_coeff(ctx: &QContext, n: usize) -> Result<DReport> {
    if n > D_MAX {
        return Err(Error::Scale(format!("d_n is built for n <= {D_MAX}")));
    }
    let poly = d_expsum(ctx, n);
    let b = b_polys(ctx.q(), n).pop().expect("nonempty");
    let prod = d_via_product(ctx, n).pop().expect("nonempty");
    let truncated_products = [n.max(1), n + 40]
        .into_iter()
        .map(|nf| (nf, truncated_product_deviation(ctx, &poly, n, nf)))
        .collect();
    Ok(DReport {
        q: ctx.label(),
        n,
        lemma_holds: poly == b,
        routes_agree: poly == prod,
        truncated_products,
        poly,
    })
}

fn truncated_product_deviation(ctx: &QContext, d: &Poly, n: usize, factors: usize) -> f64 {
    let q = ctx.q_f64();
    let qq = qq_table_f64(q, n)[n];
    let mut worst: f64 = 0.0;
    for g in 0..=20 {
        let x = -1.0 + g as f64 / 10.0;
        // Truncated power series in ρ of Π_{j<N} (1 - 2x q^j ρ + q^{2j} ρ²).
        let mut c = vec![0.0; n + 1];
        c[0] = 1.0;
        let mut qj = 1.0;
        for _ in 0..factors {
            let (a1, a2) = (-2.0 * x * qj, qj * qj);
            for k in (1..=n).rev() {
                c[k] += a1 * c[k - 1] + if k >= 2 { a2 * c[k - 2] } else { 0.0 };
            }
            qj *= q;
        }
        let at = crate::poly::Assignment::new().with(Var::X(1), x);
        let exact = d.eval_f64(&at).unwrap_or(f64::NAN);
        worst = worst.max((qq * c[n] - exact).abs());
    }
    worst
}

/// `d_n^{(2)} = Σ_m [n m]_q d_m(cos(θ+ψ)) d_{n-m}(cos(θ-ψ))` with
/// `x_1 = cos θ`, `x_2 = cos ψ`.
pub fn d2_expsum(ctx: &QContext, n: usize) -> Result<Poly> {
    let mut angles: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
    for m in 0..=n {
        let bin = ctx.binomial(n as i64, m as i64);
        let plus = d_cos_coeffs(ctx, m);
        let minus = d_cos_coeffs(ctx, n - m);
        for (k, ck) in &plus {
            for (l, cl) in &minus {
                // cos(kA) cos(lB), A = θ+ψ, B = θ-ψ
                let w = &bin * ck * cl / Rational::from_integer(2.into());
                for (a, b) in [(k + l, k - l), (k - l, k + l)] {
                    let key = if (a, b) < (0, 0) { (-a, -b) } else { (a, b) };
                    *angles.entry(key).or_insert_with(Rational::zero) += &w;
                }
            }
        }
    }
    let mut total = Poly::zero();
    for ((a, b), c) in angles {
        if c.is_zero() {
            continue;
        }
        total = total + cos_sin_poly(&[a, b]).0.scale(&c);
    }
    if total.vars().as_slice().iter().any(|v| matches!(v, Var::S(_))) {
        return Err(Error::Domain("sine markers survived in d2".into()));
    }
    Ok(total)
}

/// `d_0^{(2)}..d_n^{(2)}` from the functional equation of `W_2`.
pub fn d2_via_product(ctx: &QContext, n: usize) -> Result<Vec<Poly>> {
    let w2 = build_w(2)?.poly;
    let a = product_series(ctx, &w2, n);
    Ok(a.into_iter().enumerate().map(|(k, p)| p.scale(&ctx.qq(k))).collect())
}

/// Reference closed forms of `d_1^{(2)}..d_4^{(2)}` in the `b`-basis.
pub fn d2_printed(ctx: &QContext, n: usize) -> Result<Option<Poly>> {
    if n > 4 {
        return Ok(None);
    }
    let b = b_polys(ctx.q(), n);
    let bb = |k: usize| &b[k] * &in_var(&b[k], 2);
    let qq = |k: usize| ctx.qq(k);
    Ok(Some(match n {
        0 => Poly::one(),
        1 => -bb(1),
        2 => (bb(2) - Poly::constant(Rational::one() - ctx.pow(2)?)).scale(&ctx.pow(-1)?),
        3 => {
            let c = ctx.pow(2)? * qq(3) / (qq(1) * qq(1));
            (bb(3) - bb(1).scale(&c)).scale(&-ctx.pow(-3)?)
        }
        _ => {
            let c1 = ctx.pow(4)? * qq(4) / (qq(1) * qq(2));
            let c2 = ctx.pow(5)? * qq(4) / qq(2);
            (bb(4) - bb(2).scale(&c1) + Poly::constant(c2)).scale(&ctx.pow(-6)?)
        }
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct D2Report {
    pub q: String,
    pub n: usize,
    pub routes_agree: bool,
    /// `None` when no reference form exists for this `n`.
    pub printed_match: Option<bool>,
    #[serde(skip)]
    pub poly: Poly,
}

pub fn d2_coeff(ctx: &QContext, n: usize) -> Result<D2Report> {
    if n > D2_MAX {
        return Err(Error::Scale(format!("d2_n is built for n <= {D2_MAX}")));
    }
    let poly = d2_expsum(ctx, n)?;
    let prod = d2_via_product(ctx, n)?.pop().expect("nonempty");
    let printed = if ctx.q().is_zero() && n >= 2 {
        None
    } else {
        d2_printed(ctx, n)?
    };
    Ok(D2Report {
        q: ctx.label(),
        n,
        routes_agree: poly == prod,
        printed_match: printed.map(|p| p == poly),
        poly,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdbReport {
    pub q: String,
    pub n: usize,
    pub k: usize,
    /// With the sum taken from `j = 0`.
    pub holds: bool,
    pub residual_terms: usize,
    /// With the sum started at `j = 1`.
    pub from_one_holds: bool,
}

/// `Σ_{j=0}^n [n j]_q b_{n-j} h_{j+k} = (-1)^n q^{C(n,2)} (q)_k/(q)_{k-n} h_{k-n}`
/// for `k >= n`, and `0` otherwise.
pub fn idb_check(ctx: &QContext, n: usize, k: usize) -> Result<IdbReport> {
    if n > 12 || k > 12 {
        return Err(Error::Scale("idb is checked for n, k <= 12".into()));
    }
    let b = b_polys(ctx.q(), n);
    let h = h_polys(ctx.q(), n + k);
    let term = |j: usize| (&b[n - j] * &h[j + k]).scale(&ctx.binomial(n as i64, j as i64));
    let from_one = (1..=n).map(term).fold(Poly::zero(), |a, t| a + t);
    let full = &from_one + &term(0);
    let rhs = if k < n {
        Poly::zero()
    } else {
        let c = sign(n) * ctx.pow_nonneg(c2(n)) * ctx.qq(k) / ctx.qq(k - n);
        h[k - n].scale(&c)
    };
    let residual = &full - &rhs;
    Ok(IdbReport {
        q: ctx.label(),
        n,
        k,
        holds: residual.is_zero(),
        residual_terms: residual.len(),
        from_one_holds: from_one == rhs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Chi1tReport {
    pub t: usize,
    pub x: f64,
    pub rho: f64,
    pub q: f64,
    pub terms: usize,
    pub factors: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
    pub series_tail_bound: f64,
    pub product_tail_bound: f64,
}

/// `(−|q|;|q|)_∞ / (|q|;|q|)_∞²` bounds every `|[n k]_q|`; also returns
/// `1/(|q|;|q|)_∞`, which bounds every `1/|(q)_j|`.
fn qbinomial_envelope(q: f64) -> (f64, f64) {
    let a = q.abs();
    let (mut num, mut den) = (1.0, 1.0);
    let mut ak = a;
    while ak > 1e-18 {
        num *= 1.0 + ak;
        den *= 1.0 - ak;
        ak *= a;
    }
    (num / (den * den), 1.0 / den)
}

/// `Σ_{j≥0} ρ^j/(q)_j h_{t+j}(x|q)` summed directly (`terms` + 1 terms)
/// against `(1/W_1) Σ_{j≤t} [t j]_q (−ρ)^j q^{C(j,2)} h_{t−j}(x|q)` with `W_1`
/// truncated at `factors` factors.
pub fn chi1t_check(t: usize, x: f64, rho: f64, q: f64, terms: usize, factors: usize) -> Result<Chi1tReport> {
    if !(rho.abs() < 1.0) || !(q.abs() < 1.0) {
        return Err(Error::Domain("chi1t needs |rho| < 1 and |q| < 1".into()));
    }
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!("|x| = {} exceeds 1", x.abs())));
    }
    let h = h_table_f64(q, t + terms, x);
    let qq = qq_table_f64(q, terms.max(t));
    let mut lhs = 0.0;
    let mut pw = 1.0;
    for j in 0..=terms {
        lhs += pw / qq[j] * h[t + j];
        pw *= rho;
    }
    let bins = qbinomial_table_f64(q, t);
    let mut num = 0.0;
    for j in 0..=t {
        num += bins[t][j] * (-rho).powi(j as i32) * q.powi(c2(j) as i32) * h[t - j];
    }
    let mut w = 1.0;
    let mut qj = 1.0;
    for _ in 0..factors {
        w *= 1.0 - 2.0 * rho * qj * x + rho * rho * qj * qj;
        qj *= q;
    }
    let rhs = num / w;
    let (env, inv) = qbinomial_envelope(q);
    // Σ_{j>J} (t+j+1) r^j
    let r = rho.abs();
    let jj = terms as f64 + 1.0;
    let tail = if r == 0.0 {
        0.0
    } else {
        r.powf(jj) * ((t as f64 + jj + 1.0) / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)))
    };
    let qa = q.abs();
    let eps = (2.0 * r * qa.powi(factors as i32) / (1.0 - qa) + r * r * qa.powi(2 * factors as i32) / (1.0 - qa * qa))
        .exp_m1();
    Ok(Chi1tReport {
        t,
        x,
        rho,
        q,
        terms,
        factors,
        lhs,
        rhs,
        difference: (lhs - rhs).abs(),
        series_tail_bound: env * inv * tail,
        product_tail_bound: rhs.abs() * eps / (1.0 - eps).max(f64::MIN_POSITIVE),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FinalIdentityReport {
    pub x: f64,
    pub y: f64,
    pub rho: f64,
    pub q: f64,
    pub terms: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
}

/// `Σ_j ρ^j/(q)_j Σ_m [j m]_q d_m^{(2)}(x,y) h_{j-m}(x) h_{j-m}(y) = (ρ²;q)_∞`
/// in double precision, `d^{(2)}` from the exponential sums.
pub fn final_identity_numeric(x: f64, y: f64, rho: f64, q: f64, terms: usize) -> Result<FinalIdentityReport> {
    if !(rho.abs() < 1.0) || !(q.abs() < 1.0) || !(x.abs() <= 1.0) || !(y.abs() <= 1.0) {
        return Err(Error::Domain("need |x|, |y| <= 1 and |rho|, |q| < 1".into()));
    }
    let n = terms;
    let bins = qbinomial_table_f64(q, n);
    let qq = qq_table_f64(q, n);
    let (theta, psi) = (x.acos(), y.acos());
    let d_at = |beta: f64| -> Vec<f64> {
        (0..=n)
            .map(|k| {
                let s = if k % 2 == 1 { -1.0 } else { 1.0 };
                (0..=k)
                    .map(|j| {
                        let e = (c2(k) - (j * (k - j)) as u64) as i32;
                        bins[k][j] * q.powi(e) * ((2 * j as i64 - k as i64) as f64 * beta).cos()
                    })
                    .sum::<f64>()
                    * s
            })
            .collect()
    };
    let dp = d_at(theta + psi);
    let dm = d_at(theta - psi);
    let d2: Vec<f64> = (0..=n)
        .map(|m| (0..=m).map(|i| bins[m][i] * dp[i] * dm[m - i]).sum())
        .collect();
    let hx = h_table_f64(q, n, x);
    let hy = h_table_f64(q, n, y);
    let mut lhs = 0.0;
    let mut pw = 1.0;
    for j in 0..=n {
        let inner: f64 = (0..=j).map(|m| bins[j][m] * d2[m] * hx[j - m] * hy[j - m]).sum();
        lhs += pw / qq[j] * inner;
        pw *= rho;
    }
    let mut rhs = 0.0;
    let mut k = 0usize;
    let mut qk = 1.0; // (q)_k
    loop {
        let s = if k % 2 == 1 { -1.0 } else { 1.0 };
        let t = s * q.powi(c2(k) as i32) * rho.powi(2 * k as i32) / qk;
        rhs += t;
        if t.abs() < 1e-300 || k > 10_000 {
            break;
        }
        k += 1;
        qk *= 1.0 - q.powi(k as i32);
    }
    Ok(FinalIdentityReport {
        x,
        y,
        rho,
        q,
        terms,
        lhs,
        rhs,
        difference: (lhs - rhs).abs(),
    })
}

/// Coefficientwise form of the same identity, exactly, through `ρ^order`.
pub fn final_identity_exact(ctx: &QContext, order: usize) -> Result<bool> {
    check_index(order)?;
    let h = h_polys(ctx.q(), order);
    let hy: Vec<Poly> = h.iter().map(|p| in_var(p, 2)).collect();
    let d2 = d2_via_product(ctx, order)?;
    for j in 0..=order {
        let lhs = (0..=j)
            .map(|m| (&d2[m] * &h[j - m] * &hy[j - m]).scale(&ctx.binomial(j as i64, m as i64)))
            .fold(Poly::zero(), |a, b| a + b);
        let rhs = if j % 2 == 0 {
            let k = j / 2;
            Poly::constant(sign(k) * ctx.pow_nonneg(c2(k)) * ctx.qq(j) / ctx.qq(k))
        } else {
            Poly::zero()
        };
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ctx(n: i64, d: i64) -> QContext {
        QContext::new(rat(n, d)).unwrap()
    }

    #[test]
    fn first_coefficients() {
        let c = ctx(1, 2);
        assert_eq!(d_coeff(&c, 0).unwrap().poly, Poly::one());
        assert_eq!(d_coeff(&c, 1).unwrap().poly, -2 * Poly::x(1));
        let r = d_coeff(&c, 5).unwrap();
        assert!(r.lemma_holds && r.routes_agree, "{r:?}");
        // N = n factors is short of the infinite product; N = n + 40 is not.
        assert!(r.truncated_products[1].1 < 1e-11, "{r:?}");
    }

    #[test]
    fn bivariate_first_coefficients() {
        let c = ctx(1, 3);
        let r1 = d2_coeff(&c, 1).unwrap();
        assert_eq!(r1.poly, -4 * Poly::x(1) * Poly::x(2));
        for n in 0..=4 {
            let r = d2_coeff(&c, n).unwrap();
            assert!(r.routes_agree, "{r:?}");
        }
    }

    #[test]
    fn idb_small_cases() {
        let c = ctx(2, 5);
        let r10 = idb_check(&c, 1, 0).unwrap();
        assert!(r10.holds && !r10.from_one_holds);
        assert!(idb_check(&c, 1, 1).unwrap().holds);
        assert!(idb_check(&c, 2, 5).unwrap().holds);
    }

    #[test]
    fn chi1t_examples() {
        let r = chi1t_check(0, 0.3, 0.4, 0.25, 80, 60).unwrap();
        assert!(r.difference < 1e-9, "{r:?}");
        let r = chi1t_check(3, 0.5, 0.3, 1.0 / 3.0, 80, 60).unwrap();
        assert!(r.difference < 1e-9, "{r:?}");
        // q = 0: Σ ρ^j U_j = 1/w_1.
        let r = chi1t_check(0, 0.3, 0.4, 0.0, 80, 1).unwrap();
        assert!((r.rhs - 1.0 / (1.0 - 0.8 * 0.3 + 0.16)).abs() < 1e-15);
        assert!(r.difference < 1e-12);
    }

    #[test]
    fn final_identity() {
        assert!(final_identity_exact(&ctx(1, 3), 8).unwrap());
        assert!(final_identity_exact(&QContext::new(int(0)).unwrap(), 6).unwrap());
        let r = final_identity_numeric(0.3, -0.6, 0.45, 0.5, 120).unwrap();
        assert!(r.difference < 1e-10, "{r:?}");
    }
}
