//! Multivariate Chebyshev generating functions
//! `χ_{k,n}^{(t)}(x|ρ) = Σ_j ρ^j Π_{s≤k} T_{j+t_s}(x_s) Π_{s>k} U_{j+t_s}(x_s)`,
//! their numerators over `w_{k+n}`, and three independent evaluation paths.

use serde::{Deserialize, Serialize};

use crate::chebyshev::{cheb_poly_in, cheb_table, geom_trig_sum, ChebIndex, ChebKind};
use crate::denominator::build_w;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::poly::trig::TrigKind;
use crate::poly::{Poly, Var};
use crate::ratfn::RationalFn;

/// Largest `k + n` handled symbolically.
pub const L_MAX: usize = 4;
/// `|sin α|` below this is treated as zero by the angle formula.
pub const SINGULAR_SIN: f64 = 1e-14;

/// `k` first-kind slots followed by `n` second-kind slots, with shifts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    pub k: usize,
    pub n: usize,
    pub t: Vec<i64>,
}

impl GenSpec {
    pub fn new(k: usize, n: usize, t: Vec<i64>) -> Result<Self> {
        if k + n == 0 {
            return Err(Error::Domain("k + n must be at least 1".into()));
        }
        if t.len() != k + n {
            return Err(Error::Arity {
                expected: k + n,
                got: t.len(),
            });
        }
        Ok(GenSpec { k, n, t })
    }

    pub fn unshifted(k: usize, n: usize) -> Result<Self> {
        GenSpec::new(k, n, vec![0; k + n])
    }

    pub fn arity(&self) -> usize {
        self.k + self.n
    }

    /// Kind of the 0-based slot `s`.
    pub fn kind(&self, s: usize) -> ChebKind {
        if s < self.k {
            ChebKind::T
        } else {
            ChebKind::U
        }
    }

    pub fn label(&self) -> String {
        let t: Vec<String> = self.t.iter().map(|v| v.to_string()).collect();
        format!("k={},n={},t={}", self.k, self.n, t.join(","))
    }

    /// Drops the first first-kind slot.
    pub fn without_first_t(&self) -> Result<GenSpec> {
        if self.k == 0 {
            return Err(Error::Domain("spec has no first-kind slot".into()));
        }
        GenSpec::new(self.k - 1, self.n, self.t[1..].to_vec())
    }
}

/// `P_i = Π_s C_{i+t_s}(x_s)`.
pub fn cheb_product(spec: &GenSpec, i: i64) -> Poly {
    (0..spec.arity()).fold(Poly::one(), |acc, s| {
        let c = ChebIndex {
            kind: spec.kind(s),
            index: i + spec.t[s],
        };
        acc * cheb_poly_in(c, Var::X((s + 1) as u8))
    })
}

fn check_scale(spec: &GenSpec) -> Result<()> {
    if spec.arity() > L_MAX {
        return Err(Error::Scale(format!(
            "k + n = {} exceeds the symbolic cap {L_MAX}",
            spec.arity()
        )));
    }
    Ok(())
}

pub fn numerator_l(spec: &GenSpec) -> Result<Poly> {
    numerator_l_with(spec, Exec::default())
}

/// `l = Σ_{j<2^N} ρ^j Σ_{m≤j} [ρ^m]w_N · P_{j-m}`, regrouped as
/// `Σ_i ρ^i P_i · (w_N truncated below ρ^{2^N - i})`.
pub fn numerator_l_with(spec: &GenSpec, exec: Exec) -> Result<Poly> {
    check_scale(spec)?;
    let w = build_w(spec.arity())?.poly;
    let top = 1usize << spec.arity();
    let parts = exec.map_range(top, |i| {
        let head = w.truncated_in(Var::Rho, (top - i) as u16);
        let shift = Poly::monomial(crate::rational::int(1), &[(Var::Rho, i as u16)]);
        cheb_product(spec, i as i64).mul_with(&(head * shift), Exec::Sequential)
    });
    Ok(parts.into_iter().fold(Poly::zero(), |acc, p| acc + p))
}

/// `l / w_{k+n}`.
pub fn chi_closed(spec: &GenSpec) -> Result<RationalFn> {
    Ok(RationalFn::new(numerator_l(spec)?, build_w(spec.arity())?.poly))
}

/// Coefficients of `ρ^j` in `w·χ - l` for `j = 2^N ..= 2^N + extra`; all
/// lower orders agree by construction.
pub fn series_residuals(spec: &GenSpec, extra: usize) -> Result<Vec<Poly>> {
    check_scale(spec)?;
    let w = build_w(spec.arity())?.poly;
    let wc = w.coeffs_in(Var::Rho);
    let top = 1usize << spec.arity();
    let l = numerator_l(spec)?;
    let lc = l.coeffs_in(Var::Rho);
    let products: Vec<Poly> = (0..=top + extra).map(|i| cheb_product(spec, i as i64)).collect();
    let residual = |j: usize| -> Poly {
        let mut acc = Poly::zero();
        for (m, wm) in wc.iter().enumerate().take(j + 1) {
            acc = acc + wm * &products[j - m];
        }
        match lc.get(j) {
            Some(lj) => acc - lj,
            None => acc,
        }
    };
    Ok((top..=top + extra).map(residual).collect())
}

/// A truncated sum with a bound on the neglected tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// `Σ_{j>J} |ρ|^j Π_s (|j + t_s| + 1)`, using `|T_i| ≤ 1 ≤ |U_i| ≤ |i| + 1`
/// on `[-1, 1]` and the eventually-decreasing term ratio.
pub fn series_tail_bound(shifts: &[i64], rho: f64, order: usize) -> f64 {
    let r = rho.abs();
    if r == 0.0 {
        return 0.0;
    }
    let term = |j: usize| -> f64 {
        let base = r.powi(j as i32);
        shifts
            .iter()
            .fold(base, |acc, &t| acc * ((j as i64 + t).unsigned_abs() as f64 + 1.0))
    };
    let mut sum = 0.0;
    let mut j = order + 1;
    loop {
        let a = term(j);
        let b = term(j + 1);
        sum += a;
        let ratio = if a > 0.0 { b / a } else { 0.0 };
        let min_j = shifts.iter().map(|t| -t).max().unwrap_or(0).max(0) as usize;
        if a < 1e-300 || (ratio < 1.0 && j > min_j + 2) {
            let rest = if ratio < 1.0 { b / (1.0 - ratio) } else { f64::INFINITY };
            return sum + rest;
        }
        j += 1;
        if j > order + 100_000 {
            return f64::INFINITY;
        }
    }
}

fn table_value(table: &[f64], kind: ChebKind, index: i64) -> f64 {
    match (ChebIndex { kind, index }).normalized() {
        None => 0.0,
        Some((sign, n)) => sign as f64 * table[n as usize],
    }
}

/// Direct partial sum through order `J`.
pub fn chi_series_oracle(spec: &GenSpec, xs: &[f64], rho: f64, order: usize) -> Result<SeriesValue> {
    if xs.len() != spec.arity() {
        return Err(Error::Arity {
            expected: spec.arity(),
            got: xs.len(),
        });
    }
    if !(rho.abs() < 1.0) {
        return Err(Error::Domain(format!("|rho| = {} must be < 1", rho.abs())));
    }
    if let Some(x) = xs.iter().find(|x| !(x.abs() <= 1.0)) {
        return Err(Error::Domain(format!("|x| = {} exceeds 1", x.abs())));
    }
    let reach = spec.t.iter().map(|t| t.unsigned_abs()).max().unwrap_or(0) as usize + order + 2;
    let tables: Vec<Vec<f64>> = (0..spec.arity())
        .map(|s| cheb_table(spec.kind(s), reach, xs[s]))
        .collect();
    let mut value = 0.0;
    let mut pw = 1.0;
    for j in 0..=order as i64 {
        let mut p = pw;
        for s in 0..spec.arity() {
            p *= table_value(&tables[s], spec.kind(s), j + spec.t[s]);
        }
        value += p;
        pw *= rho;
    }
    Ok(SeriesValue {
        value,
        tail_bound: series_tail_bound(&spec.t, rho, order),
    })
}

/// Sign-vector closed form at `x_s = cos α_s`: product-to-sum on the
/// Chebyshev product, then the one-dimensional geometric sum per vector.
pub fn chi_angle_eval(spec: &GenSpec, alphas: &[f64], rho: f64) -> Result<f64> {
    let nn = spec.arity();
    if alphas.len() != nn {
        return Err(Error::Arity {
            expected: nn,
            got: alphas.len(),
        });
    }
    if !(rho.abs() < 1.0) {
        return Err(Error::Domain(format!("|rho| = {} must be < 1", rho.abs())));
    }
    if nn > 30 {
        return Err(Error::Scale(format!("{nn} slots")));
    }
    let mut sin_prod = 1.0;
    for s in spec.k..nn {
        let v = alphas[s].sin();
        if v.abs() < SINGULAR_SIN {
            return Err(Error::SingularAngle { slot: s + 1 });
        }
        sin_prod *= v;
    }
    let m = spec.n;
    let (kind, global) = if m % 2 == 1 {
        (TrigKind::Sin, if m.div_ceil(2) % 2 == 1 { -1.0 } else { 1.0 })
    } else {
        (TrigKind::Cos, if (m / 2) % 2 == 1 { -1.0 } else { 1.0 })
    };
    let mut acc = 0.0;
    for mask in 0u64..(1u64 << nn) {
        let mut a = 0.0;
        let mut b = 0.0;
        let mut plus_on_u = 0usize;
        for s in 0..nn {
            let sign = if mask >> s & 1 == 1 { -1.0 } else { 1.0 };
            let shift = spec.t[s] as f64 + if s >= spec.k { 1.0 } else { 0.0 };
            a += sign * alphas[s];
            b += sign * shift * alphas[s];
            if s >= spec.k && sign > 0.0 {
                plus_on_u += 1;
            }
        }
        let w = if plus_on_u % 2 == 1 { -1.0 } else { 1.0 };
        acc += w * geom_trig_sum(kind, rho, a, b)?;
    }
    Ok(global * acc / ((1u64 << nn) as f64 * sin_prod))
}

pub mod registry;
pub use registry::{compare_known, known_form, registry_ids, KnownComparison, KnownForm};

pub mod marginal;
pub use marginal::{marginal_check, MarginalReport};

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k: usize, n: usize, t: &[i64]) -> GenSpec {
        GenSpec::new(k, n, t.to_vec()).unwrap()
    }

    #[test]
    fn one_variable_numerators() {
        assert_eq!(numerator_l(&spec(0, 1, &[0])).unwrap(), Poly::one());
        let x = Poly::x(1);
        assert_eq!(numerator_l(&spec(1, 0, &[0])).unwrap(), 1 - Poly::rho() * &x);
        let r2 = Poly::rho().pow(2);
        assert_eq!(numerator_l(&spec(0, 2, &[0, 0])).unwrap(), 1 - r2);
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(GenSpec::new(0, 0, vec![]), Err(Error::Domain(_))));
        assert!(matches!(GenSpec::new(1, 1, vec![0]), Err(Error::Arity { .. })));
        assert!(matches!(
            numerator_l(&spec(3, 2, &[0; 5])),
            Err(Error::Scale(_))
        ));
    }

    #[test]
    fn oracle_rho_zero_and_reference() {
        let s = spec(1, 1, &[2, 1]);
        let v = chi_series_oracle(&s, &[0.3, 0.7], 0.0, 10).unwrap();
        let expect = (2.0 * 0.3 * 0.3 - 1.0) * (2.0 * 0.7);
        assert!((v.value - expect).abs() < 1e-15);
        let v = chi_series_oracle(&spec(0, 1, &[0]), &[0.5], 0.5, 60).unwrap();
        assert!((v.value - 4.0 / 3.0).abs() < 1e-12);
        assert!(v.tail_bound < 1e-12);
    }

    #[test]
    fn angle_first_kind() {
        let a = 1.0f64;
        let r = 0.4;
        let v = chi_angle_eval(&spec(1, 0, &[0]), &[a], r).unwrap();
        let expect = (1.0 - r * a.cos()) / (1.0 - 2.0 * r * a.cos() + r * r);
        assert!((v - expect).abs() < 1e-14);
        assert!(matches!(
            chi_angle_eval(&spec(0, 1, &[0]), &[0.0], r),
            Err(Error::SingularAngle { slot: 1 })
        ));
    }

    #[test]
    fn residuals_vanish_bivariate() {
        for r in series_residuals(&spec(1, 1, &[1, -2]), 8).unwrap() {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn closed_form_matches_angles() {
        let s = spec(1, 2, &[1, -1, 2]);
        let f = chi_closed(&s).unwrap().compile();
        let alphas = [0.4f64, 1.3, 2.2];
        let mut at = crate::poly::Assignment::new().with(Var::Rho, 0.35);
        for (i, a) in alphas.iter().enumerate() {
            at.set(Var::X(i as u8 + 1), a.cos());
        }
        let closed = f.value_f64(&at).unwrap();
        let angle = chi_angle_eval(&s, &alphas, 0.35).unwrap();
        assert!((closed - angle).abs() < 1e-10, "{closed} vs {angle}");
    }
}
