//! Linear combinations of `cos`/`sin` of integer angle combinations, and the
//! passage between products of sines/cosines and such sums.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Poly, Var};
use crate::chebyshev::{cheb_poly_in, ChebIndex};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Cos,
    Sin,
}

/// `weight * kind(Σ c_i α_i)`, with `coeffs[i]` the multiplier of `α_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigTerm {
    pub kind: TrigKind,
    pub coeffs: Vec<i64>,
    pub weight: Rational,
}

impl TrigTerm {
    pub fn new(kind: TrigKind, coeffs: Vec<i64>, weight: Rational) -> Self {
        let mut t = TrigTerm { kind, coeffs, weight };
        t.canonicalize();
        t
    }

    /// Makes the first nonzero multiplier positive (cos even, sin odd) and
    /// trims trailing zeros.
    fn canonicalize(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        if let Some(&first) = self.coeffs.iter().find(|&&c| c != 0) {
            if first < 0 {
                self.coeffs.iter_mut().for_each(|c| *c = -*c);
                if self.kind == TrigKind::Sin {
                    self.weight = -self.weight.clone();
                }
            }
        } else if self.kind == TrigKind::Sin {
            self.weight = Rational::zero();
        }
    }

    pub fn angle(&self, alphas: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 * alphas.get(i).copied().unwrap_or(0.0))
            .sum()
    }

    pub fn eval_f64(&self, alphas: &[f64]) -> f64 {
        let a = self.angle(alphas);
        let w = rational::to_f64(&self.weight);
        match self.kind {
            TrigKind::Cos => w * a.cos(),
            TrigKind::Sin => w * a.sin(),
        }
    }

    pub fn to_poly(&self) -> Poly {
        trig_to_poly(self)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrigSum {
    terms: Vec<TrigTerm>,
}

impl TrigSum {
    pub fn from_terms<I: IntoIterator<Item = TrigTerm>>(iter: I) -> Self {
        let mut map: BTreeMap<(TrigKind, Vec<i64>), Rational> = BTreeMap::new();
        for mut t in iter {
            t.canonicalize();
            if t.weight.is_zero() {
                continue;
            }
            *map.entry((t.kind, t.coeffs)).or_insert_with(Rational::zero) += t.weight;
        }
        TrigSum {
            terms: map
                .into_iter()
                .filter(|(_, w)| !w.is_zero())
                .map(|((kind, coeffs), weight)| TrigTerm { kind, coeffs, weight })
                .collect(),
        }
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn eval_f64(&self, alphas: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval_f64(alphas)).sum()
    }

    pub fn to_poly(&self) -> Poly {
        self.terms
            .iter()
            .fold(Poly::zero(), |acc, t| acc + trig_to_poly(t))
    }
}

/// `Π_{l ∈ sines} sin α_l · Π_{k ∈ cosines} cos α_k` as a sum over sign
/// vectors. Indices are 1-based.
pub fn trig_product_to_sum(sines: &[usize], cosines: &[usize]) -> Result<TrigSum> {
    for &s in sines {
        if cosines.contains(&s) {
            return Err(Error::Overlap(s));
        }
    }
    let mut all: Vec<usize> = sines.iter().chain(cosines).copied().collect();
    if let Some(&z) = all.iter().find(|&&i| i == 0) {
        return Err(Error::Domain(format!("angle index {z}; indices are 1-based")));
    }
    all.sort_unstable();
    if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Overlap(w[0]));
    }
    let len = all.iter().copied().max().unwrap_or(0);
    let m = sines.len();
    let total = all.len();
    let (kind, global) = if m % 2 == 1 {
        (TrigKind::Sin, if m.div_ceil(2) % 2 == 1 { -1 } else { 1 })
    } else {
        (TrigKind::Cos, if (m / 2) % 2 == 1 { -1 } else { 1 })
    };
    let base = Rational::new(global.into(), num_traits::pow(2u32.into(), total));
    let mut raw = Vec::with_capacity(1 << total);
    for mask in 0u64..(1u64 << total) {
        let mut coeffs = vec![0i64; len];
        let mut plus_on_sines = 0usize;
        for (bit, &idx) in all.iter().enumerate() {
            let sign = if mask >> bit & 1 == 1 { -1 } else { 1 };
            coeffs[idx - 1] = sign;
            if sign == 1 && sines.contains(&idx) {
                plus_on_sines += 1;
            }
        }
        let w = if plus_on_sines % 2 == 1 { -base.clone() } else { base.clone() };
        raw.push(TrigTerm { kind, coeffs, weight: w });
    }
    Ok(TrigSum::from_terms(raw))
}

/// Polynomial image with `x_i = cos α_i`, `s_i = sin α_i`.
pub fn trig_to_poly(t: &TrigTerm) -> Poly {
    let (c, s) = cos_sin_poly(&t.coeffs);
    let p = match t.kind {
        TrigKind::Cos => c,
        TrigKind::Sin => s,
    };
    p.scale(&t.weight)
}

/// `(cos θ, sin θ)` for `θ = Σ c_i α_i` via angle addition.
pub fn cos_sin_poly(coeffs: &[i64]) -> (Poly, Poly) {
    let mut cos = Poly::one();
    let mut sin = Poly::zero();
    for (i, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let slot = (i + 1) as u8;
        let a = c.unsigned_abs() as i64;
        let cc = cheb_poly_in(ChebIndex::t(a), Var::X(slot));
        let mut sc = Poly::var(Var::S(slot)) * cheb_poly_in(ChebIndex::u(a - 1), Var::X(slot));
        if c < 0 {
            sc = -sc;
        }
        let next_cos = &cos * &cc - &sin * &sc;
        let next_sin = &sin * &cc + &cos * &sc;
        cos = next_cos;
        sin = next_sin;
    }
    (cos, sin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn single_cosine_collapses() {
        let s = trig_product_to_sum(&[], &[1]).unwrap();
        assert_eq!(s.terms(), &[TrigTerm::new(TrigKind::Cos, vec![1], int(1))]);
    }

    #[test]
    fn sine_cosine_product() {
        let s = trig_product_to_sum(&[1], &[2]).unwrap();
        let expect = TrigSum::from_terms([
            TrigTerm::new(TrigKind::Sin, vec![1, 1], rat(1, 2)),
            TrigTerm::new(TrigKind::Sin, vec![1, -1], rat(1, 2)),
        ]);
        assert_eq!(s, expect);
    }

    #[test]
    fn overlap_rejected() {
        assert_eq!(trig_product_to_sum(&[1], &[1, 2]), Err(Error::Overlap(1)));
    }

    #[test]
    fn images() {
        let x1 = Poly::x(1);
        let cos2 = TrigTerm::new(TrigKind::Cos, vec![2], int(1));
        assert_eq!(trig_to_poly(&cos2), 2 * &x1 * &x1 - 1);
        let add = TrigTerm::new(TrigKind::Cos, vec![1, 1], int(1));
        assert_eq!(
            trig_to_poly(&add),
            &x1 * Poly::x(2) - Poly::var(Var::S(1)) * Poly::var(Var::S(2))
        );
        let sin3 = TrigTerm::new(TrigKind::Sin, vec![3], int(1));
        assert_eq!(trig_to_poly(&sin3), Poly::var(Var::S(1)) * (4 * &x1 * &x1 - 1));
        let neg = TrigTerm::new(TrigKind::Sin, vec![-1], int(1));
        assert_eq!(neg.weight, int(-1));
        assert_eq!(neg.coeffs, vec![1]);
        assert!(TrigTerm::new(TrigKind::Sin, vec![0, 0], int(3)).weight.is_zero());
    }
}
