//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are the cosines `x_i`, the sine markers `s_i`, the series
//! parameter `rho` and, for the Kibble-type sums, the pair parameters
//! `rho_ij`. Every product applies `s_i^2 = 1 - x_i^2`, so stored marker
//! exponents are 0 or 1. Terms are kept in graded lexicographic order with
//! `x_1 < x_2 < ... < s_1 < ... < rho`, which makes every rendering of a
//! polynomial byte-stable.

mod eval;
mod json;
mod kernel;
pub mod trig;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

pub use eval::{Assignment, Evaluator};
pub use json::PolyJson;

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// `x_i = cos(alpha_i)`, 1-based.
    X(u8),
    /// `s_i = sin(alpha_i)`.
    S(u8),
    Rho,
    /// `rho_ij` with `i < j`.
    RhoPair(u8, u8),
}

impl Var {
    pub fn name(&self) -> String {
        match *self {
            Var::X(i) => format!("x{i}"),
            Var::S(i) => format!("s{i}"),
            Var::Rho => "rho".to_string(),
            Var::RhoPair(i, j) if i < 10 && j < 10 => format!("rho{i}{j}"),
            Var::RhoPair(i, j) => format!("rho{i}_{j}"),
        }
    }

    pub fn parse(s: &str) -> Result<Var> {
        let bad = || Error::Parse(format!("unknown variable `{s}`"));
        let index = |t: &str| t.parse::<u8>().ok().filter(|&i| i > 0);
        if s == "rho" {
            return Ok(Var::Rho);
        }
        if let Some(rest) = s.strip_prefix("rho") {
            let (i, j) = match rest.split_once('_') {
                Some((i, j)) => (index(i), index(j)),
                None if rest.len() == 2 => (index(&rest[..1]), index(&rest[1..])),
                None => (None, None),
            };
            return match (i, j) {
                (Some(i), Some(j)) if i < j => Ok(Var::RhoPair(i, j)),
                _ => Err(bad()),
            };
        }
        if let Some(rest) = s.strip_prefix('x') {
            return index(rest).map(Var::X).ok_or_else(bad);
        }
        if let Some(rest) = s.strip_prefix('s') {
            return index(rest).map(Var::S).ok_or_else(bad);
        }
        Err(bad())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Sorted, duplicate-free variable list. Every marker `s_i` is accompanied
/// by its cosine `x_i` so products can always be reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarSet(Arc<[Var]>);

impl VarSet {
    pub fn new<I: IntoIterator<Item = Var>>(vars: I) -> Self {
        let mut v: Vec<Var> = vars.into_iter().collect();
        let partners: Vec<Var> = v
            .iter()
            .filter_map(|var| match var {
                Var::S(i) => Some(Var::X(*i)),
                _ => None,
            })
            .collect();
        v.extend(partners);
        v.sort_unstable();
        v.dedup();
        VarSet(v.into())
    }

    pub fn empty() -> Self {
        VarSet(Arc::from(Vec::new()))
    }

    pub fn as_slice(&self) -> &[Var] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index(&self, v: Var) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        if self == other {
            return self.clone();
        }
        VarSet::new(self.0.iter().chain(other.0.iter()).copied())
    }

    /// `(position of s_i, position of x_i)` for every marker present.
    pub(crate) fn markers(&self) -> SmallVec<[(usize, usize); 6]> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(p, v)| match v {
                Var::S(i) => Some((p, self.index(Var::X(*i)).expect("partner"))),
                _ => None,
            })
            .collect()
    }
}

pub type Exps = SmallVec<[u16; 12]>;

/// Exponent vector aligned with a [`VarSet`]. Ordered by total degree, then
/// by the exponent of the highest variable downwards.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Exps);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    vars: VarSet,
    terms: Vec<(Monomial, Rational)>,
}

impl Default for Poly {
    fn default() -> Self {
        Poly::zero()
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            vars: VarSet::empty(),
            terms: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            vars: VarSet::empty(),
            terms: vec![(Monomial(Exps::new()), c)],
        }
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(rational::int(c))
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(Rational::one(), &[(v, 1)])
    }

    pub fn x(i: u8) -> Self {
        Poly::var(Var::X(i))
    }

    pub fn rho() -> Self {
        Poly::var(Var::Rho)
    }

    /// `c * prod v^e`; marker powers are reduced.
    pub fn monomial(c: Rational, powers: &[(Var, u16)]) -> Self {
        let vars = VarSet::new(powers.iter().map(|(v, _)| *v));
        let mut e = Exps::from_elem(0, vars.len());
        for (v, p) in powers {
            e[vars.index(*v).unwrap()] += p;
        }
        Poly::from_terms(vars, [(Monomial(e), c)])
    }

    /// Builds a canonical polynomial from arbitrary (possibly repeated,
    /// possibly unreduced) terms over `vars`.
    pub fn from_terms<I>(vars: VarSet, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let markers = vars.markers();
        let mut map: FxHashMap<Monomial, Rational> = FxHashMap::default();
        for (mut m, c) in terms {
            assert_eq!(m.0.len(), vars.len(), "exponent vector arity");
            if c.is_zero() {
                continue;
            }
            // s^e -> s^(e mod 2) (1 - x^2)^(e div 2)
            let mut expansions = vec![(m.clone(), c.clone())];
            for &(sp, xp) in markers.iter() {
                let half = m.0[sp] / 2;
                if half == 0 {
                    continue;
                }
                m.0[sp] %= 2;
                let mut next = Vec::with_capacity(expansions.len() * (half as usize + 1));
                for (em, ec) in expansions {
                    for k in 0..=half {
                        let mut e = em.clone();
                        e.0[sp] %= 2;
                        e.0[xp] += 2 * k;
                        let b = Rational::from_integer(rational::binomial(half as u64, k as u64));
                        let sign = if k % 2 == 1 { -b } else { b };
                        next.push((e, &ec * sign));
                    }
                }
                expansions = next;
            }
            for (em, ec) in expansions {
                *map.entry(em).or_insert_with(Rational::zero) += ec;
            }
        }
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Poly::pruned(vars, terms)
    }

    /// Drops variables that no longer occur.
    fn pruned(vars: VarSet, terms: Vec<(Monomial, Rational)>) -> Self {
        let n = vars.len();
        let mut used = vec![false; n];
        for (m, _) in &terms {
            for (u, &e) in used.iter_mut().zip(m.0.iter()) {
                *u |= e > 0;
            }
        }
        for (sp, xp) in vars.markers() {
            if used[sp] {
                used[xp] = true;
            }
        }
        if used.iter().all(|&u| u) {
            return Poly { vars, terms };
        }
        let keep: Vec<usize> = (0..n).filter(|&i| used[i]).collect();
        let new_vars = VarSet::new(keep.iter().map(|&i| vars.as_slice()[i]));
        let terms = terms
            .into_iter()
            .map(|(m, c)| (Monomial(keep.iter().map(|&i| m.0[i]).collect()), c))
            .collect();
        Poly {
            vars: new_vars,
            terms,
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        match self.terms.first() {
            Some((m, c)) if m.degree() == 0 => c.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        match self.vars.index(v) {
            Some(p) => self.terms.iter().map(|(m, _)| m.0[p] as u32).max().unwrap_or(0),
            None => 0,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.last().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn coeff_of(&self, powers: &[(Var, u16)]) -> Rational {
        let mut e = Exps::from_elem(0, self.vars.len());
        for (v, p) in powers {
            match self.vars.index(*v) {
                Some(i) => e[i] += p,
                None if *p == 0 => {}
                None => return Rational::zero(),
            }
        }
        let m = Monomial(e);
        self.terms
            .binary_search_by(|t| t.0.cmp(&m))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }

    fn embedded(&self, target: &VarSet) -> Vec<(Monomial, Rational)> {
        if &self.vars == target {
            return self.terms.clone();
        }
        let pos: Vec<usize> = self
            .vars
            .as_slice()
            .iter()
            .map(|v| target.index(*v).expect("target contains every variable"))
            .collect();
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut e = Exps::from_elem(0, target.len());
                for (&p, &x) in pos.iter().zip(m.0.iter()) {
                    e[p] = x;
                }
                (Monomial(e), c.clone())
            })
            .collect()
    }

    fn add_signed(&self, other: &Poly, negate: bool) -> Poly {
        let vars = self.vars.union(&other.vars);
        let a = self.embedded(&vars);
        let b = other.embedded(&vars);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut ia = a.into_iter().peekable();
        let mut ib = b.into_iter().map(|(m, c)| (m, if negate { -c } else { c })).peekable();
        loop {
            let ord = match (ia.peek(), ib.peek()) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => break,
            };
            match ord {
                Ordering::Less => out.push(ia.next().unwrap()),
                Ordering::Greater => out.push(ib.next().unwrap()),
                Ordering::Equal => {
                    let (m, c) = ia.next().unwrap();
                    let (_, d) = ib.next().unwrap();
                    let s = c + d;
                    if !s.is_zero() {
                        out.push((m, s));
                    }
                }
            }
        }
        Poly::pruned(vars, out)
    }

    /// Product, parallelized over the terms of `self` when the work is large.
    pub fn mul_with(&self, other: &Poly, exec: Exec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let vars = self.vars.union(&other.vars);
        let a = self.embedded(&vars);
        let b = other.embedded(&vars);
        let terms = kernel::mul_terms(&vars, &a, &b, exec);
        Poly::pruned(vars, terms)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Polynomial coefficients of `v^0, v^1, ..., v^deg` (free of `v`).
    pub fn coeffs_in(&self, v: Var) -> Vec<Poly> {
        let Some(p) = self.vars.index(v) else {
            return vec![self.clone()];
        };
        let deg = self.degree_in(v) as usize;
        let rest = VarSet::new(self.vars.as_slice().iter().copied().filter(|&w| w != v));
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[p] as usize;
            let mut r = m.0.clone();
            r.remove(p);
            buckets[e].push((Monomial(r), c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                t.sort_unstable_by(|a, b| a.0.cmp(&b.0));
                Poly::pruned(rest.clone(), t)
            })
            .collect()
    }

    /// Coefficient of `rho^m`, i.e. `(1/m!) d^m/drho^m` at `rho = 0`.
    pub fn rho_coeff(&self, m: usize) -> Poly {
        self.coeffs_in(Var::Rho).into_iter().nth(m).unwrap_or_default()
    }

    /// Replaces `v` by `sub` (Horner over the powers of `v`).
    pub fn substitute(&self, v: Var, sub: &Poly) -> Poly {
        if self.vars.index(v).is_none() {
            return self.clone();
        }
        let coeffs = self.coeffs_in(v);
        let mut acc = Poly::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * sub) + c;
        }
        acc
    }

    /// Terms whose `v`-exponent is below `bound`.
    pub fn truncated_in(&self, v: Var, bound: u16) -> Poly {
        let Some(p) = self.vars.index(v) else {
            return if bound > 0 { self.clone() } else { Poly::zero() };
        };
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[p] < bound)
            .cloned()
            .collect();
        Poly::pruned(self.vars.clone(), terms)
    }

    /// `∂/∂v`; markers are treated as independent symbols.
    pub fn derivative(&self, v: Var) -> Poly {
        let Some(p) = self.vars.index(v) else {
            return Poly::zero();
        };
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[p] > 0)
            .map(|(m, c)| {
                let mut e = m.clone();
                e.0[p] -= 1;
                (e, c * Rational::from_integer(BigInt::from(m.0[p])))
            });
        Poly::from_terms(self.vars.clone(), terms)
    }

    pub fn substitute_value(&self, v: Var, value: &Rational) -> Poly {
        self.substitute(v, &Poly::constant(value.clone()))
    }

    /// Applies a variable renaming (collisions multiply).
    pub fn rename<F: Fn(Var) -> Var>(&self, f: F) -> Poly {
        let mapped: Vec<Var> = self.vars.as_slice().iter().map(|&v| f(v)).collect();
        let vars = VarSet::new(mapped.iter().copied());
        let pos: Vec<usize> = mapped.iter().map(|v| vars.index(*v).unwrap()).collect();
        Poly::from_terms(
            vars.clone(),
            self.terms.iter().map(|(m, c)| {
                let mut e = Exps::from_elem(0, vars.len());
                for (&p, &x) in pos.iter().zip(m.0.iter()) {
                    e[p] += x;
                }
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Swaps two variables.
    pub fn swap(&self, a: Var, b: Var) -> Poly {
        self.rename(|v| {
            if v == a {
                b
            } else if v == b {
                a
            } else {
                v
            }
        })
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .iter()
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Exact value; every variable that occurs must be assigned.
    pub fn eval(&self, point: &Assignment<Rational>) -> Result<Rational> {
        let vals = point.aligned(&self.vars)?;
        Ok(Evaluator::new(self).eval_exact(&vals))
    }

    pub fn eval_f64(&self, point: &Assignment<f64>) -> Result<f64> {
        let vals = point.aligned(&self.vars)?;
        Ok(Evaluator::new(self).eval_f64(&vals))
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson::from_poly(self)
    }

    pub fn from_json(j: &PolyJson) -> Result<Poly> {
        j.to_poly()
    }

    pub(crate) fn integer_content(&self) -> Option<BigInt> {
        self.terms
            .iter()
            .map(|(_, c)| c.denom().clone())
            .reduce(|a, b| num_integer::Integer::lcm(&a, &b))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let vars = self.vars.as_slice();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if c.is_integer() {
                write!(f, "{}", c.numer())?;
            } else {
                write!(f, "{}/{}", c.numer(), c.denom())?;
            }
            for (v, &e) in vars.iter().zip(m.0.iter()) {
                match e {
                    0 => {}
                    1 => write!(f, " * {v}")?,
                    _ => write!(f, " * {v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                let f: fn(&Poly, &Poly) -> Poly = $body;
                f(self, rhs)
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
        impl $tr<i64> for Poly {
            type Output = Poly;
            fn $method(self, rhs: i64) -> Poly {
                (&self).$method(&Poly::int(rhs))
            }
        }
        impl $tr<i64> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: i64) -> Poly {
                self.$method(&Poly::int(rhs))
            }
        }
        impl $tr<Poly> for i64 {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&Poly::int(self)).$method(&rhs)
            }
        }
        impl $tr<&Poly> for i64 {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&Poly::int(self)).$method(rhs)
            }
        }
    };
}

const AUTO_PARALLEL_WORK: usize = 1 << 16;

poly_binop!(Add, add, |a, b| a.add_signed(b, false));
poly_binop!(Sub, sub, |a, b| a.add_signed(b, true));
poly_binop!(Mul, mul, |a, b| {
    let exec = if a.len() * b.len() >= AUTO_PARALLEL_WORK {
        Exec::Parallel
    } else {
        Exec::Sequential
    };
    a.mul_with(b, exec)
});

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Poly::int(c)
    }
}

/// Product of many polynomials as a balanced binary tree.
pub fn product_tree(mut factors: Vec<Poly>, exec: Exec) -> Poly {
    if factors.is_empty() {
        return Poly::one();
    }
    if factors.len() == 1 {
        return factors.pop().unwrap();
    }
    let right = factors.split_off(factors.len() / 2);
    let (l, r) = exec.join(|| product_tree(factors, exec), || product_tree(right, exec));
    l.mul_with(&r, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn x1() -> Poly {
        Poly::x(1)
    }

    #[test]
    fn additive_inverse_is_zero() {
        assert!((x1() + (-x1())).is_zero());
        assert_eq!((x1() - x1()).vars().len(), 0);
    }

    #[test]
    fn marker_squares_reduce() {
        let s = Poly::var(Var::S(1));
        assert_eq!(&s * &s, 1 - x1() * x1());
        let s_cubed = Poly::monomial(int(1), &[(Var::S(1), 3)]);
        assert_eq!(s_cubed, &s * &(1 - x1() * x1()));
    }

    #[test]
    fn multiplicative_identity() {
        let r = Poly::rho();
        let w1 = 1 - 2 * &r * x1() + &r * &r;
        assert_eq!(&w1 * &Poly::one(), w1);
    }

    #[test]
    fn rho_coefficients() {
        let r = Poly::rho();
        let w1 = 1 - 2 * &r * x1() + &r * &r;
        assert_eq!(w1.rho_coeff(1), -2 * x1());
        assert_eq!(w1.rho_coeff(2), Poly::one());
        assert!(w1.rho_coeff(5).is_zero());
    }

    #[test]
    fn eval_substitution() {
        let r = Poly::rho();
        let w1 = 1 - 2 * &r * x1() + &r * &r;
        let p = Assignment::new().with(Var::X(1), rat(1, 2)).with(Var::Rho, rat(1, 2));
        assert_eq!(w1.eval(&p).unwrap(), rat(3, 4));
        assert_eq!(Poly::zero().eval(&Assignment::new()).unwrap(), int(0));
        let missing = Assignment::new().with(Var::X(1), rat(1, 2));
        assert!(matches!(w1.eval(&missing), Err(Error::MissingAssignment(_))));
    }

    #[test]
    fn canonical_order_is_graded_lex() {
        let r = Poly::rho();
        let p = &r + x1() * x1() + Poly::x(2) + 1;
        assert_eq!(p.to_string(), "1 + 1 * x2 + 1 * rho + 1 * x1^2");
    }

    #[test]
    fn var_names_round_trip() {
        for v in [Var::X(3), Var::S(2), Var::Rho, Var::RhoPair(1, 3), Var::RhoPair(2, 11)] {
            assert_eq!(Var::parse(&v.name()).unwrap(), v);
        }
        assert!(Var::parse("rho31").is_err());
        assert!(Var::parse("z").is_err());
    }

    #[test]
    fn substitution_composes() {
        // (x1 + 1)^2 with x1 -> x2 * rho
        let p = (x1() + 1).pow(2);
        let q = p.substitute(Var::X(1), &(Poly::x(2) * Poly::rho()));
        let expect = (Poly::x(2) * Poly::rho() + 1).pow(2);
        assert_eq!(q, expect);
    }

    #[test]
    fn parallel_and_sequential_products_agree() {
        let a = (x1() + Poly::x(2) * 3 - Poly::rho() + Poly::var(Var::S(1))).pow(6);
        let b = (x1() - Poly::var(Var::S(2)) + Poly::constant(rat(1, 3))).pow(5);
        assert_eq!(a.mul_with(&b, Exec::Sequential), a.mul_with(&b, Exec::Parallel));
    }
}
