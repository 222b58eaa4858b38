//! The density `f_t`, its `U`-moments, and the polynomials
//! `t_n = h_n − χ_{n−2} h_{n−2}` built against it ("ortho-χ" constants).
//!
//! Every infinite sum in `q^{C(k,2)}` is cut at the first `K` with
//! `|q|^{C(K+1,2)} < 1e-30`; its tail is bounded by
//! `|q|^{C(K+1,2)} / (1 − |q|^{K+1})`.

use num_traits::{One, Zero};
use serde::Serialize;

use super::{h_polys, qq_table_f64, QContext};
use crate::chebyshev::{cheb_poly, cheb_table, gauss_chebyshev_nodes, ChebIndex, ChebKind};
use crate::error::{Error, Result};
use crate::poly::{Poly, Var};
use crate::rational::{self, Rational};

pub const TN_MAX: usize = 16;
pub const MOMENT_MAX: usize = 32;
const TAIL_TARGET: f64 = 1e-30;
const TERMS_CAP: usize = 128;

fn c2(k: usize) -> u64 {
    (k * k.saturating_sub(1) / 2) as u64
}

fn alt(k: usize) -> Rational {
    if k % 2 == 0 {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Truncation of `Σ_{k≥1} (−1)^{k−1} q^{C(k,2)} (…)`.
#[derive(Clone, Debug, Serialize)]
pub struct Truncation {
    pub terms: usize,
    /// Bound on `Σ_{k>terms} |q|^{C(k,2)}`.
    pub tail: f64,
}

pub fn truncation(q: f64) -> Result<Truncation> {
    let a = q.abs();
    if a == 0.0 {
        return Ok(Truncation { terms: 1, tail: 0.0 });
    }
    for k in 1..=TERMS_CAP {
        let next = a.powf(c2(k + 1) as f64);
        if next < TAIL_TARGET {
            return Ok(Truncation {
                terms: k,
                tail: next / (1.0 - a.powi(k as i32 + 1)),
            });
        }
    }
    Err(Error::Convergence(format!(
        "|q| = {a} needs more than {TERMS_CAP} terms of the q^C(k,2) series"
    )))
}

/// `f_t(x|q) = c/(π√(1−x²)) Σ_{k=1}^K (−1)^{k−1} q^{C(k,2)} U_{2k−2}(x)`,
/// `c = 1/d_K(q)`, truncated.
#[derive(Clone, Debug)]
pub struct FtWeight {
    pub truncation: Truncation,
    /// `(−1)^{k−1} q^{C(k,2)}` for `k = 1..=K`.
    pub coeffs: Vec<Rational>,
    /// Truncated `d(q)`.
    pub d: Rational,
}

impl FtWeight {
    pub fn new(ctx: &QContext) -> Result<Self> {
        let truncation = truncation(ctx.q_f64())?;
        let coeffs: Vec<Rational> = (1..=truncation.terms)
            .map(|k| alt(k) * ctx.pow_nonneg(c2(k)))
            .collect();
        let d = coeffs.iter().fold(Rational::zero(), |a, b| a + b);
        if d.is_zero() {
            return Err(Error::Domain("d(q) vanishes".into()));
        }
        Ok(FtWeight { truncation, coeffs, d })
    }

    /// `c Σ_k coeff_k U_{2k−2}(x)`, the density without `1/(π√(1−x²))`.
    pub fn series_f64(&self, x: f64) -> f64 {
        let k = self.coeffs.len();
        let u = cheb_table(ChebKind::U, 2 * k - 2, x);
        let s: f64 = self.coeffs.iter().enumerate().map(|(i, a)| rational::to_f64(a) * u[2 * i]).sum();
        s / rational::to_f64(&self.d)
    }

    fn moment(&self, n: usize) -> Moment {
        if n % 2 == 1 {
            return Moment {
                n,
                value: Rational::zero(),
                value_f64: 0.0,
                tail_bound: 0.0,
                terms: self.truncation.terms,
            };
        }
        let num = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * rational::int(1 + n.min(2 * i) as i64))
            .fold(Rational::zero(), |a, b| a + b);
        let value = num / &self.d;
        let v = rational::to_f64(&value);
        let dk = rational::to_f64(&self.d).abs();
        let e_d = self.truncation.tail;
        let e_n = (1 + n) as f64 * e_d;
        let tail_bound = if e_d == 0.0 { 0.0 } else { (e_n + v.abs() * e_d) / (dk - e_d) };
        Moment {
            n,
            value_f64: v,
            value,
            tail_bound,
            terms: self.truncation.terms,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Moment {
    pub n: usize,
    #[serde(skip)]
    pub value: Rational,
    pub value_f64: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// `∫ f_t U_n dx = c Σ_{k≥1} (−1)^{k−1} (1 + min(n, 2k−2)) q^{C(k,2)}` for even
/// `n`, `0` for odd `n`.
pub fn ft_moment_u(ctx: &QContext, n: usize) -> Result<Moment> {
    if n > MOMENT_MAX {
        return Err(Error::Scale(format!("moments are built for n <= {MOMENT_MAX}")));
    }
    Ok(FtWeight::new(ctx)?.moment(n))
}

/// `∫ f_t U_n` by Gauss–Chebyshev quadrature of the truncated series; exact
/// up to rounding once `nodes` exceeds half the combined degree.
pub fn ft_moment_u_quadrature(ctx: &QContext, n: usize, nodes: usize) -> Result<f64> {
    let w = FtWeight::new(ctx)?;
    let s: f64 = gauss_chebyshev_nodes(nodes)
        .into_iter()
        .map(|x| cheb_table(ChebKind::U, n, x)[n] * w.series_f64(x))
        .sum();
    Ok(s / nodes as f64)
}

/// `(q^k − q^{n−k+1})/(1 − q^{n−k+1}) [n k]_q`, the `U_{n−2k}` coefficient of `h_n`.
pub fn hu_coeff(ctx: &QContext, n: usize, k: usize) -> Rational {
    let top = ctx.pow_nonneg((n - k + 1) as u64);
    (ctx.pow_nonneg(k as u64) - &top) / (Rational::one() - top) * ctx.binomial(n as i64, k as i64)
}

/// `h_n` rebuilt from its `U`-expansion.
pub fn hu_expand(ctx: &QContext, n: usize) -> Poly {
    (0..=n / 2)
        .map(|k| cheb_poly(ChebIndex::u((n - 2 * k) as i64)).scale(&hu_coeff(ctx, n, k)))
        .fold(Poly::zero(), |a, b| a + b)
}

/// `γ_n = ∫ f_t h_n` through the `U`-expansion and the moments.
fn gammas(ctx: &QContext, w: &FtWeight, n_max: usize) -> Vec<(Rational, f64)> {
    (0..=n_max)
        .map(|n| {
            if n % 2 == 1 {
                return (Rational::zero(), 0.0);
            }
            let mut v = Rational::zero();
            let mut bound = 0.0;
            for k in 0..=n / 2 {
                let c = hu_coeff(ctx, n, k);
                let m = w.moment(n - 2 * k);
                bound += rational::to_f64(&c).abs() * m.tail_bound;
                v += c * m.value;
            }
            (v, bound)
        })
        .collect()
}

/// `t_0..t_{n_max}` over a shared weight.
#[derive(Clone, Debug)]
pub struct TnFamily {
    pub weight: FtWeight,
    pub polys: Vec<Poly>,
    pub gammas: Vec<Rational>,
    pub gamma_bounds: Vec<f64>,
    /// `(i, χ_i)` such that `t_{i+2} = h_{i+2} − χ_i h_i`.
    pub ortho_chi: Vec<(usize, Rational)>,
    /// `n` whose defining condition had a zero pivot (`χ` set to 0).
    pub degenerate: Vec<usize>,
}

pub fn tn_family(ctx: &QContext, n_max: usize) -> Result<TnFamily> {
    if n_max > TN_MAX {
        return Err(Error::Scale(format!("t_n is built for n <= {TN_MAX}")));
    }
    let weight = FtWeight::new(ctx)?;
    let gb = gammas(ctx, &weight, n_max + 1);
    let g: Vec<Rational> = gb.iter().map(|(v, _)| v.clone()).collect();
    let h = h_polys(ctx.q(), n_max);
    let mut polys = Vec::with_capacity(n_max + 1);
    let mut ortho_chi = Vec::new();
    let mut degenerate = Vec::new();
    for n in 0..=n_max {
        if n < 2 {
            polys.push(h[n].clone());
            continue;
        }
        let (num, den) = if n % 2 == 0 {
            // ∫ t_n f_t = γ_n − χ γ_{n−2} = 0
            (g[n].clone(), g[n - 2].clone())
        } else {
            // ∫ 2x t_{2k+1} f_t
            // = γ_{2k+2} + (1−q^{2k+1})γ_{2k} − χ(γ_{2k} + (1−q^{2k−1})γ_{2k−2}) = 0
            let one = Rational::one();
            let num = &g[n + 1] + (&one - ctx.pow_nonneg(n as u64)) * &g[n - 1];
            let den = &g[n - 1] + (&one - ctx.pow_nonneg(n as u64 - 2)) * &g[n - 3];
            (num, den)
        };
        let chi = if den.is_zero() {
            degenerate.push(n);
            Rational::zero()
        } else {
            num / den
        };
        polys.push(&h[n] - &h[n - 2].scale(&chi));
        ortho_chi.push((n - 2, chi));
    }
    Ok(TnFamily {
        weight,
        polys,
        gammas: g[..=n_max].to_vec(),
        gamma_bounds: gb[..=n_max].iter().map(|(_, b)| *b).collect(),
        ortho_chi,
        degenerate,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthoChi {
    pub index: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TnReport {
    pub q: String,
    pub n: usize,
    pub truncation: Truncation,
    /// `γ_0..γ_n`.
    pub gammas: Vec<f64>,
    pub gamma_bounds: Vec<f64>,
    pub ortho_chi: Vec<OrthoChi>,
    pub degenerate: Vec<usize>,
    /// The `U`-expansion of every `h_k` with `k <= n` is exact.
    pub hu_holds: bool,
    /// Ascending power coefficients of `t_n` in `x`.
    pub coefficients: Vec<f64>,
    pub gram: GramReport,
    #[serde(skip)]
    pub poly: Poly,
}

/// `t_n` with its constants and the orthogonality check of `t_0..t_n`.
pub fn tn_construct(ctx: &QContext, n: usize) -> Result<TnReport> {
    let fam = tn_family(ctx, n)?;
    let h = h_polys(ctx.q(), n);
    let hu_holds = (0..=n).all(|k| hu_expand(ctx, k) == h[k]);
    let gram = gram_of(&fam, n);
    let poly = fam.polys[n].clone();
    Ok(TnReport {
        q: ctx.label(),
        n,
        truncation: fam.weight.truncation.clone(),
        gammas: fam.gammas.iter().map(rational::to_f64).collect(),
        gamma_bounds: fam.gamma_bounds.clone(),
        ortho_chi: fam
            .ortho_chi
            .iter()
            .map(|(i, v)| OrthoChi { index: *i, value: rational::to_f64(v) })
            .collect(),
        degenerate: fam.degenerate.clone(),
        hu_holds,
        coefficients: coeffs_f64(&poly),
        gram,
        poly,
    })
}

pub(crate) fn coeffs_f64(p: &Poly) -> Vec<f64> {
    let d = p.degree_in(Var::X(1)) as u16;
    (0..=d).map(|e| rational::to_f64(&p.coeff_of(&[(Var::X(1), e)]))).collect()
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |a, &b| a * x + b)
}

#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    pub nodes: usize,
    /// `∫ t_i t_j f_t` for `i, j <= n`.
    pub matrix: Vec<Vec<f64>>,
    pub max_off_diagonal: f64,
    /// Largest `|G_ij| / √(|G_ii G_jj|)` off the diagonal.
    pub max_off_diagonal_relative: f64,
}

fn gram_of(fam: &TnFamily, n: usize) -> GramReport {
    let k = fam.weight.coeffs.len();
    let nodes = (2 * n + 2 * k).max(64);
    let xs = gauss_chebyshev_nodes(nodes);
    let cs: Vec<Vec<f64>> = fam.polys[..=n].iter().map(coeffs_f64).collect();
    let mut matrix = vec![vec![0.0; n + 1]; n + 1];
    for &x in &xs {
        let w = fam.weight.series_f64(x);
        let v: Vec<f64> = cs.iter().map(|c| horner(c, x)).collect();
        for i in 0..=n {
            for j in 0..=n {
                matrix[i][j] += v[i] * v[j] * w;
            }
        }
    }
    let (mut abs, mut rel) = (0.0f64, 0.0f64);
    for row in matrix.iter_mut() {
        for g in row.iter_mut() {
            *g /= nodes as f64;
        }
    }
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                abs = abs.max(matrix[i][j].abs());
                rel = rel.max(matrix[i][j].abs() / (matrix[i][i] * matrix[j][j]).abs().sqrt());
            }
        }
    }
    GramReport {
        nodes,
        matrix,
        max_off_diagonal: abs,
        max_off_diagonal_relative: rel,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FhReport {
    pub q: f64,
    pub nodes: usize,
    pub terms: usize,
    /// `∫ f_h` by second-kind Gauss–Chebyshev quadrature of the series.
    pub integral: f64,
    /// Largest gap between the `U`-series and the product form of `f_h`.
    pub max_product_deviation: f64,
}

/// The `U_{2k−2}` expansion of the `h_n` density: its integral, and its
/// agreement with `2(q)_∞√(1−x²)/π Π_{k≥1} ((1+q^k)² − 4x² q^k)`.
pub fn fh_normalization(q: f64, nodes: usize) -> Result<FhReport> {
    if !(q.abs() < 1.0) {
        return Err(Error::Domain("f_h needs |q| < 1".into()));
    }
    let tr = truncation(q)?;
    let k = tr.terms;
    let a: Vec<f64> = (1..=k)
        .map(|i| if i % 2 == 1 { 1.0 } else { -1.0 } * q.powi(c2(i) as i32))
        .collect();
    let series = |x: f64| -> f64 {
        let u = cheb_table(ChebKind::U, 2 * k - 2, x);
        let s: f64 = a.iter().enumerate().map(|(i, c)| c * u[2 * i]).sum();
        2.0 * (1.0 - x * x).max(0.0).sqrt() / std::f64::consts::PI * s
    };
    // ∫ √(1−x²) g = π/(M+1) Σ sin²θ_i g(cos θ_i); `series` carries the √ and 2/π.
    let m = nodes;
    let mut integral = 0.0;
    for i in 1..=m {
        let th = i as f64 * std::f64::consts::PI / (m + 1) as f64;
        let s = th.sin();
        integral += s * std::f64::consts::PI / (m + 1) as f64 * series(th.cos());
    }
    let factors = ((60.0 / -q.abs().max(1e-300).ln()).ceil() as usize).clamp(1, 100_000);
    let qinf = *qq_table_f64(q, factors).last().expect("nonempty");
    let product = |x: f64| -> f64 {
        let mut p = 1.0;
        let mut qk = q;
        for _ in 0..factors {
            p *= (1.0 + qk) * (1.0 + qk) - 4.0 * x * x * qk;
            qk *= q;
        }
        2.0 * qinf * (1.0 - x * x).max(0.0).sqrt() / std::f64::consts::PI * p
    };
    let max_product_deviation = (0..=40)
        .map(|g| {
            let x = -1.0 + g as f64 / 20.0;
            (series(x) - product(x)).abs()
        })
        .fold(0.0, f64::max);
    Ok(FhReport {
        q,
        nodes,
        terms: k,
        integral,
        max_product_deviation,
    })
}

/// Nonzero `∫ t_i U_j f_t` for `j < i <= n_max`, exactly in the truncated
/// weight; empty means the family is orthogonal there.
pub fn tn_lower_products(ctx: &QContext, n_max: usize) -> Result<Vec<(usize, usize, f64)>> {
    let fam = tn_family(ctx, n_max)?;
    let mut out = Vec::new();
    for (i, t) in fam.polys.iter().enumerate() {
        for j in 0..i {
            let prod = t * &cheb_poly(ChebIndex::u(j as i64));
            let v = integrate_exact(&fam.weight, &prod);
            if !v.is_zero() {
                out.push((i, j, rational::to_f64(&v)));
            }
        }
    }
    Ok(out)
}

/// `∫ p f_t` exactly for the truncated weight, by peeling `U`-coefficients
/// from the top.
fn integrate_exact(w: &FtWeight, p: &Poly) -> Rational {
    let mut rest = p.clone();
    let mut total = Rational::zero();
    while !rest.is_zero() {
        let d = rest.degree_in(Var::X(1));
        let lead = rest.coeff_of(&[(Var::X(1), d as u16)]);
        // U_d has leading coefficient 2^d
        let c = lead / rational::int(1i64 << d);
        total += &c * w.moment(d as usize).value;
        rest = rest - cheb_poly(ChebIndex::u(d as i64)).scale(&c);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn ctx(n: i64, d: i64) -> QContext {
        QContext::new(rat(n, d)).unwrap()
    }

    #[test]
    fn moments() {
        let c = ctx(1, 2);
        assert_eq!(ft_moment_u(&c, 3).unwrap().value, int(0));
        assert_eq!(ft_moment_u(&c, 0).unwrap().value, int(1));
        let m2 = ft_moment_u(&c, 2).unwrap();
        let quad = ft_moment_u_quadrature(&c, 2, 64).unwrap();
        assert!((m2.value_f64 - quad).abs() < 1e-10, "{m2:?} vs {quad}");
        assert!(m2.tail_bound < 1e-25);
    }

    #[test]
    fn hu_expansion() {
        for c in [ctx(1, 2), ctx(-1, 3), ctx(3, 5), QContext::new(int(0)).unwrap()] {
            let h = h_polys(c.q(), 10);
            for (n, hn) in h.iter().enumerate() {
                assert_eq!(&hu_expand(&c, n), hn, "n = {n}");
            }
        }
    }

    #[test]
    fn first_kind_limit() {
        let c = QContext::new(int(0)).unwrap();
        let r = tn_construct(&c, 8).unwrap();
        assert!(r.ortho_chi.iter().all(|o| o.value == 1.0), "{:?}", r.ortho_chi);
        for n in 1..=8 {
            let t = tn_family(&c, 8).unwrap().polys[n].clone();
            assert_eq!(t, 2 * cheb_poly(ChebIndex::t(n as i64)));
        }
        assert!(r.gram.max_off_diagonal < 1e-12);
    }

    #[test]
    fn gammas_basic() {
        let r = tn_construct(&ctx(1, 3), 6).unwrap();
        assert!((r.gammas[0] - 1.0).abs() < 1e-15);
        assert!(r.gammas.iter().skip(1).step_by(2).all(|g| *g == 0.0));
        assert!(r.hu_holds);
    }

    #[test]
    fn fh_series() {
        let r = fh_normalization(0.5, 64).unwrap();
        assert!((r.integral - 1.0).abs() < 1e-9, "{r:?}");
        assert!(r.max_product_deviation < 1e-9, "{r:?}");
    }
}
