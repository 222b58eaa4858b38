//! Chebyshev analogues of the Kibble–Slepian sum,
//! `f_P(x | K) = Σ_S Π_{i<j} ρ_ij^{s_ij} Π_m P_{s_m}(x_m)` with `s_m` the row
//! sums of the symmetric, zero-diagonal exponent matrix `S`.
//!
//! The closed forms come from expanding `Π_m cos(s_m α_m)` (or the sine
//! product for `U`) over sign vectors: the angle `Σ i_m s_m α_m` regroups as
//! `Σ_{j<m} s_jm (i_j α_j + i_m α_m)`, which turns every sign vector into a
//! multi-directional geometric trig sum over the pairs.

use serde::Serialize;

use crate::chebyshev::{cheb_table, multi_trig_sum, ChebKind};
use crate::denominator::build_w;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::poly::trig::{cos_sin_poly, TrigKind};
use crate::poly::{Monomial, Poly, Var};
use crate::ratfn::RationalFn;
use crate::rational::{self, Rational};

/// Dimension cap for the symbolic constructions.
pub const KIBBLE_MAX: usize = 5;
/// Default cap on the number of lattice points the oracle may visit.
pub const ORACLE_BUDGET: u128 = 100_000_000;

/// Symmetric correlation matrix with zero diagonal, stored as the
/// upper-triangular entries `ρ_12, ρ_13, …, ρ_{n-1,n}` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrMatrix {
    pub n: usize,
    pub values: Vec<f64>,
    #[serde(skip)]
    exact: Vec<Rational>,
}

/// Leading principal minors of `K + I`.
#[derive(Clone, Debug, Serialize)]
pub struct DefinitenessReport {
    pub minors: Vec<String>,
    pub positive_definite: bool,
}

/// All pairs `(i, j)`, `1 <= i < j <= n`, in storage order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            out.push((i, j));
        }
    }
    out
}

impl CorrMatrix {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        let exact = values
            .iter()
            .map(|&v| rational::from_f64(v))
            .collect::<Result<Vec<_>>>()?;
        Self::checked(n, values, exact)
    }

    pub fn from_rationals(n: usize, exact: Vec<Rational>) -> Result<Self> {
        let values = exact.iter().map(rational::to_f64).collect();
        Self::checked(n, values, exact)
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; n * n.saturating_sub(1) / 2])
    }

    fn checked(n: usize, values: Vec<f64>, exact: Vec<Rational>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("a correlation matrix needs n >= 2, got {n}")));
        }
        let want = n * (n - 1) / 2;
        if values.len() != want {
            return Err(Error::Arity {
                expected: want,
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(v.abs() < 1.0)) {
            return Err(Error::Domain(format!("|rho_ij| = {} must be < 1", v.abs())));
        }
        Ok(CorrMatrix { n, values, exact })
    }

    /// Parses `12=0.6,13=0.8,23=0.9` (or `1_2=…` for indices above 9); every
    /// pair not mentioned is zero and `n` is the largest index seen.
    pub fn parse(s: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, val) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `ij=value`, got `{item}`")))?;
            let Var::RhoPair(i, j) = Var::parse(&format!("rho{}", key.trim()))? else {
                unreachable!("rho prefix parses to a pair");
            };
            entries.push((i as usize, j as usize, rational::parse(val.trim())?));
        }
        let n = entries.iter().map(|e| e.1).max().unwrap_or(0);
        let mut exact = vec![Rational::from_integer(0.into()); n * n.saturating_sub(1) / 2];
        for (i, j, v) in entries {
            exact[pair_index(n, i, j)] = v;
        }
        Self::from_rationals(n, exact)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.values[pair_index(self.n, a, b)]
    }

    pub fn exact(&self) -> &[Rational] {
        &self.exact
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Relabels coordinate `perm[i]` as `i` (0-based permutation).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let exact = pairs(self.n)
            .into_iter()
            .map(|(i, j)| {
                let (a, b) = (perm[i - 1] + 1, perm[j - 1] + 1);
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                self.exact[pair_index(self.n, a, b)].clone()
            })
            .collect();
        Self::from_rationals(self.n, exact)
    }

    /// Exact leading principal minors of `K + I` (reported, never enforced:
    /// definiteness does not make `f_U` positive).
    pub fn definiteness(&self) -> DefinitenessReport {
        let n = self.n;
        let one = Rational::from_integer(1.into());
        let full: Vec<Vec<Rational>> = (1..=n)
            .map(|i| {
                (1..=n)
                    .map(|j| {
                        if i == j {
                            one.clone()
                        } else {
                            let (a, b) = if i < j { (i, j) } else { (j, i) };
                            self.exact[pair_index(n, a, b)].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        let minors: Vec<Rational> = (1..=n)
            .map(|k| determinant(full[..k].iter().map(|r| r[..k].to_vec()).collect()))
            .collect();
        let positive_definite = minors.iter().all(|m| *m > Rational::from_integer(0.into()));
        DefinitenessReport {
            minors: minors.iter().map(rational::format).collect(),
            positive_definite,
        }
    }
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(1 <= i && i < j && j <= n);
    (i - 1) * (2 * n - i) / 2 + (j - i - 1)
}

fn determinant(mut a: Vec<Vec<Rational>>) -> Rational {
    use num_traits::Zero;
    let n = a.len();
    let mut det = Rational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let pivot = a[c][c].clone();
        det *= &pivot;
        for r in c + 1..n {
            let f = &a[r][c] / &pivot;
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let d = &f * &a[c][k];
                a[r][k] -= d;
            }
        }
    }
    det
}

/// Sign vector with its pair angles `β_jm = i_j α_j + i_m α_m` and
/// `B = Σ i_j α_j`.
#[derive(Clone, Debug)]
pub struct PairAngles {
    pub signs: Vec<i8>,
    pub betas: Vec<f64>,
    pub b: f64,
}

impl PairAngles {
    pub fn new(signs: &[i8], alphas: &[f64]) -> Self {
        let n = signs.len();
        let sa = |j: usize| signs[j - 1] as f64 * alphas[j - 1];
        PairAngles {
            signs: signs.to_vec(),
            betas: pairs(n).into_iter().map(|(j, m)| sa(j) + sa(m)).collect(),
            b: (1..=n).map(sa).sum(),
        }
    }

    /// Sign vector number `mask`: bit `s` set means `i_{s+1} = -1`.
    pub fn from_mask(mask: usize, alphas: &[f64]) -> Self {
        let signs: Vec<i8> = (0..alphas.len())
            .map(|s| if mask >> s & 1 == 1 { -1 } else { 1 })
            .collect();
        Self::new(&signs, alphas)
    }

    fn plus_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }
}

/// Global sign and trig kind of the product of `m` sines.
fn sine_parity(m: usize) -> (TrigKind, f64) {
    if m % 2 == 1 {
        (TrigKind::Sin, if m.div_ceil(2) % 2 == 1 { -1.0 } else { 1.0 })
    } else {
        (TrigKind::Cos, if (m / 2) % 2 == 1 { -1.0 } else { 1.0 })
    }
}

fn check_arity(alphas: &[f64], k: &CorrMatrix) -> Result<()> {
    if alphas.len() != k.n {
        return Err(Error::Arity {
            expected: k.n,
            got: alphas.len(),
        });
    }
    Ok(())
}

fn sine_product(alphas: &[f64]) -> Result<f64> {
    let mut p = 1.0;
    for (s, a) in alphas.iter().enumerate() {
        let v = a.sin();
        if v.abs() < crate::genfun::SINGULAR_SIN {
            return Err(Error::SingularAngle { slot: s + 1 });
        }
        p *= v;
    }
    Ok(p)
}

/// `f_T` or `f_U` at `x_j = cos α_j`.
pub fn kibble_closed_eval(kind: ChebKind, alphas: &[f64], k: &CorrMatrix) -> Result<f64> {
    kibble_closed_eval_with(kind, alphas, k, Exec::default())
}

pub fn kibble_closed_eval_with(kind: ChebKind, alphas: &[f64], k: &CorrMatrix, exec: Exec) -> Result<f64> {
    match kind {
        ChebKind::T => {
            check_arity(alphas, k)?;
            let n = k.n;
            let parts = exec.map_range(1 << n, |mask| {
                let pa = PairAngles::from_mask(mask, alphas);
                multi_trig_sum(TrigKind::Cos, &k.values, &pa.betas, 0.0)
            });
            let total = parts.into_iter().sum::<Result<f64>>()?;
            Ok(total / (1u64 << n) as f64)
        }
        ChebKind::U => {
            let (trig, _) = sine_parity(k.n);
            kibble_u_with_branch(trig, alphas, k, exec)
        }
    }
}

/// `f_U` assembled with an explicitly chosen trig kind for the
/// sign-vector sum. The sine product forces `Sin` for odd `n` and `Cos` for
/// even `n`; the other choice is kept to show that it fails.
pub fn kibble_u_with_branch(trig: TrigKind, alphas: &[f64], k: &CorrMatrix, exec: Exec) -> Result<f64> {
    check_arity(alphas, k)?;
    let n = k.n;
    let sp = sine_product(alphas)?;
    let (_, global) = sine_parity(n);
    let parts = exec.map_range(1 << n, |mask| {
        let pa = PairAngles::from_mask(mask, alphas);
        let w = if pa.plus_count() % 2 == 1 { -1.0 } else { 1.0 };
        Ok(w * multi_trig_sum(trig, &k.values, &pa.betas, pa.b)?)
    });
    let total = parts.into_iter().sum::<Result<f64>>()?;
    Ok(global * total / ((1u64 << n) as f64 * sp))
}

/// Which exponent matrices the oracle visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeBound {
    /// Every `s_ij <= cutoff`.
    Box,
    /// `Σ s_ij <= cutoff`.
    Simplex,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleConfig {
    pub cutoff: usize,
    pub bound: LatticeBound,
    pub budget: u128,
}

impl OracleConfig {
    pub fn boxed(cutoff: usize) -> Self {
        OracleConfig {
            cutoff,
            bound: LatticeBound::Box,
            budget: ORACLE_BUDGET,
        }
    }

    pub fn simplex(cutoff: usize) -> Self {
        OracleConfig {
            cutoff,
            bound: LatticeBound::Simplex,
            budget: ORACLE_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    /// Number of lattice points visited for `p` pair directions.
    pub fn points(&self, p: usize) -> u128 {
        let c = self.cutoff as u128;
        match self.bound {
            LatticeBound::Box => (0..p).try_fold(1u128, |a, _| a.checked_mul(c + 1)).unwrap_or(u128::MAX),
            LatticeBound::Simplex => {
                // C(c + p, p)
                let mut acc = 1u128;
                for i in 1..=p as u128 {
                    acc = match acc.checked_mul(c + i) {
                        Some(v) => v / i,
                        None => return u128::MAX,
                    };
                }
                acc
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KibbleSeries {
    pub value: f64,
    pub tail_bound: f64,
    pub points: u128,
}

/// Truncated lattice sum of the defining series.
pub fn kibble_series_oracle(kind: ChebKind, xs: &[f64], k: &CorrMatrix, cfg: OracleConfig) -> Result<KibbleSeries> {
    kibble_series_oracle_with(kind, xs, k, cfg, Exec::default())
}

pub fn kibble_series_oracle_with(
    kind: ChebKind,
    xs: &[f64],
    k: &CorrMatrix,
    cfg: OracleConfig,
    exec: Exec,
) -> Result<KibbleSeries> {
    let n = k.n;
    if xs.len() != n {
        return Err(Error::Arity {
            expected: n,
            got: xs.len(),
        });
    }
    if let Some(x) = xs.iter().find(|x| !(x.abs() <= 1.0)) {
        return Err(Error::Domain(format!("|x| = {} exceeds 1", x.abs())));
    }
    let prs = pairs(n);
    let p = prs.len();
    let points = cfg.points(p);
    if points > cfg.budget {
        return Err(Error::Scale(format!(
            "{points} lattice points exceed the oracle budget of {}",
            cfg.budget
        )));
    }
    let c = cfg.cutoff;
    let reach = match cfg.bound {
        LatticeBound::Box => (n - 1) * c,
        LatticeBound::Simplex => c,
    };
    let tables: Vec<Vec<f64>> = xs.iter().map(|&x| cheb_table(kind, reach + 1, x)).collect();
    let walker = Walker {
        n,
        pairs: &prs,
        rhos: &k.values,
        tables: &tables,
        cfg,
    };
    let firsts: Vec<usize> = (0..=c).collect();
    let parts = exec.map(&firsts, |&s0| {
        let mut rows = vec![0usize; n];
        let (a, b) = prs[0];
        rows[a - 1] = s0;
        rows[b - 1] = s0;
        let w = k.values[0].powi(s0 as i32);
        if p == 1 {
            return w * tables[0][s0] * tables[1][s0];
        }
        walker.level(1, &mut rows, w, s0)
    });
    let value = parts.into_iter().sum();
    Ok(KibbleSeries {
        value,
        tail_bound: oracle_tail_bound(kind, xs, k, cfg),
        points,
    })
}

struct Walker<'a> {
    n: usize,
    pairs: &'a [(usize, usize)],
    rhos: &'a [f64],
    tables: &'a [Vec<f64>],
    cfg: OracleConfig,
}

impl Walker<'_> {
    fn limit(&self, used: usize) -> usize {
        match self.cfg.bound {
            LatticeBound::Box => self.cfg.cutoff,
            LatticeBound::Simplex => self.cfg.cutoff - used,
        }
    }

    /// Sum over the exponents of pairs `q..`, with `rows` the partial row
    /// sums and `w` the accumulated weight.
    fn level(&self, q: usize, rows: &mut [usize], w: f64, used: usize) -> f64 {
        let (a, b) = self.pairs[q];
        let r = self.rhos[q];
        let lim = self.limit(used);
        if q + 1 == self.pairs.len() {
            // The last pair (n-1, n): all other rows are final.
            let fixed: f64 = (0..self.n)
                .filter(|&m| m != a - 1 && m != b - 1)
                .map(|m| self.tables[m][rows[m]])
                .product();
            let (ta, tb) = (&self.tables[a - 1], &self.tables[b - 1]);
            let (ra, rb) = (rows[a - 1], rows[b - 1]);
            let mut acc = 0.0;
            let mut pw = 1.0;
            for s in 0..=lim {
                acc += pw * ta[ra + s] * tb[rb + s];
                pw *= r;
            }
            return w * fixed * acc;
        }
        if w == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut pw = w;
        for s in 0..=lim {
            rows[a - 1] += s;
            rows[b - 1] += s;
            acc += self.level(q + 1, rows, pw, used + s);
            rows[a - 1] -= s;
            rows[b - 1] -= s;
            if r == 0.0 {
                break;
            }
            pw *= r;
        }
        acc
    }
}

/// Geometric domination by `r = max |ρ_ij|`, times a bound on the
/// polynomial product (`1` for `T`, `Π 1/sin α_m` for `U`).
pub fn oracle_tail_bound(kind: ChebKind, xs: &[f64], k: &CorrMatrix, cfg: OracleConfig) -> f64 {
    let r = k.max_abs();
    if r == 0.0 {
        return 0.0;
    }
    let poly_bound = match kind {
        ChebKind::T => 1.0,
        ChebKind::U => {
            let mut b = 1.0;
            for x in xs {
                let s2 = 1.0 - x * x;
                if s2 <= 0.0 {
                    return f64::INFINITY;
                }
                b /= s2.sqrt();
            }
            b
        }
    };
    let p = k.values.len() as i32;
    let c = cfg.cutoff as i32;
    let tail = match cfg.bound {
        // Some entry exceeds the cutoff (union bound over the entries).
        LatticeBound::Box => p as f64 * r.powi(c + 1) / (1.0 - r).powi(p),
        // Σ_{D > c} C(D + p - 1, p - 1) r^D.
        LatticeBound::Simplex => {
            let mut d = c as f64 + 1.0;
            let mut term = (1..p).fold(r.powi(c + 1), |t, i| t * (d + i as f64) / i as f64);
            let mut sum = 0.0;
            loop {
                sum += term;
                let ratio = r * (d + p as f64) / (d + 1.0);
                if ratio < 1.0 && term < sum * 1e-17 {
                    break sum + term * ratio / (1.0 - ratio);
                }
                term *= ratio;
                d += 1.0;
                if d > 1e7 {
                    break f64::INFINITY;
                }
            }
        }
    };
    poly_bound * tail
}

fn rho_var(i: usize, j: usize) -> Poly {
    Poly::var(Var::RhoPair(i as u8, j as u8))
}

/// `V_n = Π_{i<j} w_2(x_i, x_j | ρ_ij)`, symbolic in the `ρ_ij`.
pub fn kibble_denominator_symbolic(n: usize) -> Result<Poly> {
    check_n(n)?;
    let w2 = build_w(2)?.poly;
    let factors = pairs(n)
        .into_iter()
        .map(|(i, j)| {
            w2.rename(|v| match v {
                Var::X(1) => Var::X(i as u8),
                Var::X(2) => Var::X(j as u8),
                Var::Rho => Var::RhoPair(i as u8, j as u8),
                other => other,
            })
        })
        .collect();
    Ok(crate::poly::product_tree(factors, Exec::default()))
}

/// `V_n` with the entries of `K` substituted as exact rationals.
pub fn kibble_denominator(k: &CorrMatrix) -> Result<Poly> {
    let mut v = kibble_denominator_symbolic(k.n)?;
    for ((i, j), r) in pairs(k.n).into_iter().zip(k.exact()) {
        v = v.substitute_value(Var::RhoPair(i as u8, j as u8), r);
    }
    Ok(v)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("Kibble sums need n >= 2, got {n}")));
    }
    if n > KIBBLE_MAX {
        return Err(Error::Scale(format!("n = {n} exceeds the cap of {KIBBLE_MAX}")));
    }
    Ok(())
}

/// `p / s_i` for a polynomial odd in the marker `s_i`.
fn divide_by_sine(p: &Poly, i: u8) -> Result<Poly> {
    let vars = p.vars().clone();
    let Some(at) = vars.index(Var::S(i)) else {
        return if p.is_zero() {
            Ok(Poly::zero())
        } else {
            Err(Error::Domain(format!("numerator is not divisible by s{i}")))
        };
    };
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        if m.0[at] != 1 {
            return Err(Error::Domain(format!("numerator is not divisible by s{i}")));
        }
        let mut e = m.0.clone();
        e[at] = 0;
        terms.push((Monomial(e), c.clone()));
    }
    Ok(Poly::from_terms(vars, terms))
}

/// Exact closed form of `f_T` or `f_U` as a numerator over `V_n`, symbolic
/// in `x_1..x_n` and the `ρ_ij`.
///
/// For each sign vector, the lattice sum over a pair direction is
/// `(Σ_S (-1)^|S| ρ_S trig(β₀ - b_S)) / Π F(β_jm)` with
/// `F(θ) = 1 - 2ρ cos θ + ρ²`; multiplying through by the partner factors
/// `F(i_j α_j - i_m α_m)` lands every sign vector on the shared denominator.
pub fn kibble_closed_form(kind: ChebKind, n: usize) -> Result<RationalFn> {
    kibble_closed_form_with(kind, n, Exec::default())
}

pub fn kibble_closed_form_with(kind: ChebKind, n: usize, exec: Exec) -> Result<RationalFn> {
    check_n(n)?;
    if n > 4 {
        return Err(Error::Scale("symbolic Kibble forms are built for n <= 4".into()));
    }
    let prs = pairs(n);
    let p = prs.len();
    let (trig, global) = match kind {
        ChebKind::T => (TrigKind::Cos, 1.0),
        ChebKind::U => sine_parity(n),
    };
    let parts = exec.map_range(1 << n, |mask| {
        let signs: Vec<i64> = (0..n).map(|s| if mask >> s & 1 == 1 { -1 } else { 1 }).collect();
        let mut base = vec![0i64; n];
        if kind == ChebKind::U {
            base.clone_from(&signs);
        }
        let mut numer = Poly::zero();
        for subset in 0usize..(1 << p) {
            let mut angle = base.clone();
            let mut weight = Poly::one();
            for (q, &(a, b)) in prs.iter().enumerate() {
                if subset >> q & 1 == 1 {
                    angle[a - 1] -= signs[a - 1];
                    angle[b - 1] -= signs[b - 1];
                    weight = -(weight * rho_var(a, b));
                }
            }
            let (c, s) = cos_sin_poly(&angle);
            let t = if trig == TrigKind::Cos { c } else { s };
            numer = numer + weight * t;
        }
        let partners: Vec<Poly> = prs
            .iter()
            .map(|&(a, b)| {
                let mut d = vec![0i64; n];
                d[a - 1] = signs[a - 1];
                d[b - 1] = -signs[b - 1];
                let (c, _) = cos_sin_poly(&d);
                let r = rho_var(a, b);
                1 - 2 * &r * c + &r * &r
            })
            .collect();
        let mut term = numer * crate::poly::product_tree(partners, Exec::Sequential);
        if kind == ChebKind::U {
            let plus = signs.iter().filter(|&&s| s > 0).count();
            if plus % 2 == 1 {
                term = -term;
            }
        }
        term
    });
    let mut total = parts.into_iter().fold(Poly::zero(), |a, b| a + b);
    let mut scale = Rational::new(1.into(), (1u64 << n).into());
    if global < 0.0 {
        scale = -scale;
    }
    total = total.scale(&scale);
    if kind == ChebKind::U {
        for i in 1..=n as u8 {
            total = divide_by_sine(&total, i)?;
        }
    }
    if total.vars().as_slice().iter().any(|v| matches!(v, Var::S(_))) {
        return Err(Error::Domain("sine markers survived the sign-vector sum".into()));
    }
    Ok(RationalFn::new(total, kibble_denominator_symbolic(n)?))
}

/// The reference numerator of `f_U(x, y, z)`, kept exactly as
/// given (typo included), with `x, y, z = x_1, x_2, x_3`.
pub fn f_u3_printed_numerator() -> Poly {
    let (x, y, z) = (Poly::x(1), Poly::x(2), Poly::x(3));
    let (r12, r13, r23) = (rho_var(1, 2), rho_var(1, 3), rho_var(2, 3));
    let sq = |p: &Poly| p * p;
    let p = &r12 * &r13 * &r23;
    4 * &r12 * &r13 * (&r23 - &r12 * &r13) * (1 - sq(&r23)) * sq(&x)
        + 4 * &r12 * &r23 * (&r13 - &r12 * &r23) * (1 - sq(&r13)) * sq(&y)
        + 4 * &r13 * &r23 * (&r12 - &r12 * &r23) * (1 - sq(&r12)) * sq(&z)
        - 4 * (&r13 - &r12 * &r23) * (&r23 - &r12 * &r13) * (1 + &p) * &x * &y
        - 4 * (&r12 - &r13 * &r23) * (&r23 - &r12 * &r13) * (1 + &p) * &x * &z
        - 4 * (&r13 - &r12 * &r23) * (&r12 - &r23 * &r13) * (1 + &p) * &y * &z
        + (1 - sq(&r12)) * (1 - sq(&r13)) * (1 - sq(&r23)) * (1 - &p)
}

/// The reference `f_U(x, y, z)` as a rational function over `V_3`.
pub fn f_u3_printed() -> Result<RationalFn> {
    Ok(RationalFn::new(f_u3_printed_numerator(), kibble_denominator_symbolic(3)?))
}

/// Evaluates the reference `f_U(x, y, z | ρ_12, ρ_13, ρ_23)`.
pub fn f_u3_closed(x: f64, y: f64, z: f64, r12: f64, r13: f64, r23: f64) -> Result<f64> {
    if let Some(r) = [r12, r13, r23].iter().find(|r| !(r.abs() < 1.0)) {
        return Err(Error::Domain(format!("|rho| = {} must be < 1", r.abs())));
    }
    let p = r12 * r13 * r23;
    let num = 4.0 * r12 * r13 * (r23 - r12 * r13) * (1.0 - r23 * r23) * x * x
        + 4.0 * r12 * r23 * (r13 - r12 * r23) * (1.0 - r13 * r13) * y * y
        + 4.0 * r13 * r23 * (r12 - r12 * r23) * (1.0 - r12 * r12) * z * z
        - 4.0 * (r13 - r12 * r23) * (r23 - r12 * r13) * (1.0 + p) * x * y
        - 4.0 * (r12 - r13 * r23) * (r23 - r12 * r13) * (1.0 + p) * x * z
        - 4.0 * (r13 - r12 * r23) * (r12 - r23 * r13) * (1.0 + p) * y * z
        + (1.0 - r12 * r12) * (1.0 - r13 * r13) * (1.0 - r23 * r23) * (1.0 - p);
    let w2 = |a: f64, b: f64, r: f64| {
        let r2 = r * r;
        (1.0 - r2).powi(2) - 4.0 * a * b * r * (1.0 + r2) + 4.0 * r2 * (a * a + b * b)
    };
    Ok(num / (w2(x, y, r12) * w2(x, z, r13) * w2(y, z, r23)))
}

/// Exact difference `kibble_closed_form(U, 3) − reference` of the numerators.
pub fn f_u3_discrepancy() -> Result<Poly> {
    Ok(&kibble_closed_form(ChebKind::U, 3)?.numerator - &f_u3_printed_numerator())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3(a: f64, b: f64, c: f64) -> CorrMatrix {
        CorrMatrix::new(3, vec![a, b, c]).unwrap()
    }

    #[test]
    fn storage_order() {
        assert_eq!(pairs(4), vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]);
        for (q, (i, j)) in pairs(5).into_iter().enumerate() {
            assert_eq!(pair_index(5, i, j), q);
        }
        let k = CorrMatrix::parse("12=0.6,13=0.8,23=0.9").unwrap();
        assert_eq!(k.values, vec![0.6, 0.8, 0.9]);
        assert_eq!(k.get(3, 2), 0.9);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(CorrMatrix::new(2, vec![1.0]), Err(Error::Domain(_))));
        assert!(matches!(CorrMatrix::new(3, vec![0.1]), Err(Error::Arity { .. })));
        let k = k3(0.1, 0.2, 0.3);
        assert!(matches!(
            kibble_closed_eval(ChebKind::U, &[0.0, 1.0, 2.0], &k),
            Err(Error::SingularAngle { slot: 1 })
        ));
    }

    #[test]
    fn zero_correlations_give_one() {
        let k = CorrMatrix::zero(3).unwrap();
        let a = [0.3, 1.1, 2.5];
        assert!((kibble_closed_eval(ChebKind::T, &a, &k).unwrap() - 1.0).abs() < 1e-14);
        assert!((kibble_closed_eval(ChebKind::U, &a, &k).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(kibble_denominator(&k).unwrap(), Poly::one());
        assert!((f_u3_closed(0.2, 0.3, 0.4, 0.0, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn definiteness_of_the_counterexample() {
        let k = k3(0.6, 0.8, 0.9);
        let r = k.definiteness();
        assert!(r.positive_definite, "{r:?}");
        assert_eq!(r.minors[0], "1/1");
    }

    #[test]
    fn closed_matches_lattice_sum() {
        let k = k3(0.21, -0.13, 0.27);
        let alphas = [0.7f64, 1.9, 2.6];
        let xs: Vec<f64> = alphas.iter().map(|a| a.cos()).collect();
        for kind in [ChebKind::T, ChebKind::U] {
            let c = kibble_closed_eval(kind, &alphas, &k).unwrap();
            let o = kibble_series_oracle(kind, &xs, &k, OracleConfig::boxed(40)).unwrap();
            assert!((c - o.value).abs() < 1e-9, "{kind:?}: {c} vs {o:?}");
        }
    }

    #[test]
    fn symbolic_form_agrees_with_angles() {
        let k = k3(0.31, 0.12, -0.4);
        let alphas = [0.5f64, 1.4, 2.9];
        for kind in [ChebKind::T, ChebKind::U] {
            let f = kibble_closed_form(kind, 3).unwrap().compile();
            let mut at = crate::poly::Assignment::new();
            for (q, (i, j)) in pairs(3).into_iter().enumerate() {
                at.set(Var::RhoPair(i as u8, j as u8), k.values[q]);
            }
            for (i, a) in alphas.iter().enumerate() {
                at.set(Var::X(i as u8 + 1), a.cos());
            }
            let sym = f.value_f64(&at).unwrap();
            let ang = kibble_closed_eval(kind, &alphas, &k).unwrap();
            assert!((sym - ang).abs() < 1e-11, "{kind:?}: {sym} vs {ang}");
        }
    }

    #[test]
    fn oracle_budget() {
        let k = CorrMatrix::zero(5).unwrap();
        let xs = [0.0; 5];
        assert!(matches!(
            kibble_series_oracle(ChebKind::T, &xs, &k, OracleConfig::boxed(25)),
            Err(Error::Scale(_))
        ));
        assert_eq!(OracleConfig::simplex(2).points(3), 10);
    }

    #[test]
    fn printed_trivariate_form_differs_in_one_coefficient() {
        let (r12, r13, r23) = (rho_var(1, 2), rho_var(1, 3), rho_var(2, 3));
        let z = Poly::x(3);
        let expected = 4 * &r13 * &r23 * &r23 * (&r12 - &r13) * (1 - &r12 * &r12) * &z * &z;
        assert_eq!(f_u3_discrepancy().unwrap(), expected);

        let (x, y, z) = (-0.9, -0.95, 0.94);
        let printed = f_u3_closed(x, y, z, 0.6, 0.8, 0.9).unwrap();
        let alphas: Vec<f64> = [x, y, z].iter().map(|v: &f64| v.acos()).collect();
        let closed = kibble_closed_eval(ChebKind::U, &alphas, &k3(0.6, 0.8, 0.9)).unwrap();
        assert!((closed + 0.0912121).abs() < 1e-6);
        assert!((printed + 0.0578972).abs() < 1e-6);
    }
}
