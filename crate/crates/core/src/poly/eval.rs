//! Evaluation: nested Horner over the variables in declaration order.
//!
//! Exact evaluation is homogenized: with `v_i = p_i / q_i` every power table
//! holds `p_i^e q_i^(D_i - e)`, so the whole sum runs in integers and a single
//! division happens at the end.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Poly, Var, VarSet};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Values for named variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assignment<T> {
    values: Vec<(Var, T)>,
}

impl<T: Clone> Assignment<T> {
    pub fn new() -> Self {
        Assignment { values: Vec::new() }
    }

    pub fn with(mut self, v: Var, value: T) -> Self {
        self.set(v, value);
        self
    }

    pub fn set(&mut self, v: Var, value: T) {
        match self.values.iter_mut().find(|(w, _)| *w == v) {
            Some(slot) => slot.1 = value,
            None => self.values.push((v, value)),
        }
    }

    pub fn get(&self, v: Var) -> Option<&T> {
        self.values.iter().find(|(w, _)| *w == v).map(|(_, t)| t)
    }

    /// Values in the order of `vars`.
    pub fn aligned(&self, vars: &VarSet) -> Result<Vec<T>> {
        vars.as_slice()
            .iter()
            .map(|v| {
                self.get(*v)
                    .cloned()
                    .ok_or_else(|| Error::MissingAssignment(v.name()))
            })
            .collect()
    }
}

/// A polynomial prepared for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Evaluator {
    vars: VarSet,
    nvars: usize,
    /// Exponents, lexicographically sorted, flattened row-major.
    exps: Vec<u16>,
    ints: Vec<BigInt>,
    denom: BigInt,
    floats: Vec<f64>,
    max_deg: Vec<u16>,
}

trait Acc: Sized {
    fn zero() -> Self;
    fn fma(acc: &mut Self, g: Self, p: &Self);
}

impl Acc for f64 {
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn fma(acc: &mut Self, g: Self, p: &Self) {
        *acc += g * p;
    }
}

impl Acc for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn fma(acc: &mut Self, g: Self, p: &Self) {
        *acc += g * p;
    }
}

impl Evaluator {
    pub fn new(p: &Poly) -> Self {
        let nvars = p.vars().len();
        let mut rows: Vec<(&[u16], &Rational)> =
            p.terms().iter().map(|(m, c)| (&m.0[..], c)).collect();
        rows.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let denom = p.integer_content().unwrap_or_else(BigInt::one);
        let mut exps = Vec::with_capacity(rows.len() * nvars);
        let mut max_deg = vec![0u16; nvars];
        for (e, _) in &rows {
            exps.extend_from_slice(e);
            for (m, &x) in max_deg.iter_mut().zip(e.iter()) {
                *m = (*m).max(x);
            }
        }
        let ints = rows
            .iter()
            .map(|(_, c)| c.numer() * (&denom / c.denom()))
            .collect();
        let floats = rows
            .iter()
            .map(|(_, c)| crate::rational::to_f64(c))
            .collect();
        Evaluator {
            vars: p.vars().clone(),
            nvars,
            exps,
            ints,
            denom,
            floats,
            max_deg,
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    fn nterms(&self) -> usize {
        self.floats.len()
    }

    fn group<T: Acc + Clone>(
        &self,
        lo: usize,
        hi: usize,
        level: usize,
        pw: &[Vec<T>],
        coeff: &impl Fn(usize) -> T,
    ) -> T {
        if level == self.nvars {
            debug_assert_eq!(hi - lo, 1);
            return coeff(lo);
        }
        let n = self.nvars;
        let mut acc = T::zero();
        let mut i = lo;
        while i < hi {
            let e = self.exps[i * n + level];
            let mut j = i + 1;
            while j < hi && self.exps[j * n + level] == e {
                j += 1;
            }
            let g = self.group(i, j, level + 1, pw, coeff);
            T::fma(&mut acc, g, &pw[level][e as usize]);
            i = j;
        }
        acc
    }

    /// Values aligned with [`Evaluator::vars`].
    pub fn eval_f64(&self, vals: &[f64]) -> f64 {
        assert_eq!(vals.len(), self.nvars, "evaluation arity");
        if self.nterms() == 0 {
            return 0.0;
        }
        let pw: Vec<Vec<f64>> = vals
            .iter()
            .zip(&self.max_deg)
            .map(|(&v, &d)| {
                let mut t = Vec::with_capacity(d as usize + 1);
                let mut p = 1.0;
                for _ in 0..=d {
                    t.push(p);
                    p *= v;
                }
                t
            })
            .collect();
        self.group(0, self.nterms(), 0, &pw, &|i| self.floats[i])
    }

    pub fn eval_exact(&self, vals: &[Rational]) -> Rational {
        assert_eq!(vals.len(), self.nvars, "evaluation arity");
        if self.nterms() == 0 {
            return Rational::zero();
        }
        let mut scale = self.denom.clone();
        let pw: Vec<Vec<BigInt>> = vals
            .iter()
            .zip(&self.max_deg)
            .map(|(v, &d)| {
                let (p, q) = (v.numer(), v.denom());
                let mut qs = Vec::with_capacity(d as usize + 1);
                let mut acc = BigInt::one();
                for _ in 0..=d {
                    qs.push(acc.clone());
                    acc *= q;
                }
                scale *= &qs[d as usize];
                let mut t = Vec::with_capacity(d as usize + 1);
                let mut pp = BigInt::one();
                for e in 0..=d as usize {
                    t.push(&pp * &qs[d as usize - e]);
                    pp *= p;
                }
                t
            })
            .collect();
        let num = self.group(0, self.nterms(), 0, &pw, &|i| self.ints[i].clone());
        Rational::new(num, scale)
    }

    pub fn eval_exact_at(&self, point: &Assignment<Rational>) -> Result<Rational> {
        Ok(self.eval_exact(&point.aligned(&self.vars)?))
    }

    pub fn eval_f64_at(&self, point: &Assignment<f64>) -> Result<f64> {
        Ok(self.eval_f64(&point.aligned(&self.vars)?))
    }

    /// Largest coefficient magnitude as a double (for error bounds).
    pub fn max_abs_coeff_f64(&self) -> f64 {
        self.floats.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `Σ |c| Π |v|^e`, a bound on rounding error scale.
    pub fn abs_eval_f64(&self, vals: &[f64]) -> f64 {
        let abs: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
        let pw: Vec<Vec<f64>> = abs
            .iter()
            .zip(&self.max_deg)
            .map(|(&v, &d)| (0..=d as i32).map(|e| v.powi(e)).collect())
            .collect();
        if self.nterms() == 0 {
            return 0.0;
        }
        self.group(0, self.nterms(), 0, &pw, &|i| self.floats[i].abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn exact_and_float_agree() {
        let x = Poly::x(1);
        let y = Poly::x(2);
        let p = (&x * &x * 3 - &y * &x + Poly::constant(rat(1, 7))).pow(3);
        let e = Evaluator::new(&p);
        let exact = e.eval_exact(&[rat(1, 3), rat(-2, 5)]);
        let float = e.eval_f64(&[1.0 / 3.0, -0.4]);
        assert!((crate::rational::to_f64(&exact) - float).abs() < 1e-12);
    }
}
