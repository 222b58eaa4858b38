//! Quotients of polynomials with a certified floating-point evaluator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Assignment, Evaluator, Poly, PolyJson, VarSet};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn {
    pub numerator: Poly,
    pub denominator: Poly,
}

#[derive(Clone, Debug, Serialize)]
pub struct RationalFnJson {
    pub numerator: PolyJson,
    pub denominator: PolyJson,
}

impl RationalFn {
    pub fn new(numerator: Poly, denominator: Poly) -> Self {
        RationalFn {
            numerator,
            denominator,
        }
    }

    pub fn vars(&self) -> VarSet {
        self.numerator.vars().union(self.denominator.vars())
    }

    pub fn eval(&self, at: &Assignment<Rational>) -> Result<Rational> {
        let d = self.denominator.eval(at)?;
        if num_traits::Zero::is_zero(&d) {
            return Err(Error::Domain("denominator vanishes".into()));
        }
        Ok(self.numerator.eval(at)? / d)
    }

    pub fn to_json(&self) -> RationalFnJson {
        RationalFnJson {
            numerator: self.numerator.to_json(),
            denominator: self.denominator.to_json(),
        }
    }

    pub fn compile(&self) -> CompiledFn {
        CompiledFn::new(self)
    }
}

/// Prepared evaluator: double precision with a running rounding bound,
/// falling back to exact arithmetic (on the exact binary value of every
/// input) when the bound is not below `certify`.
#[derive(Clone, Debug)]
pub struct CompiledFn {
    num: Evaluator,
    den: Evaluator,
    num_depth: f64,
    den_depth: f64,
    pub certify: f64,
}

/// Horner-style error constant for a nested evaluation of that depth.
fn depth(p: &Poly) -> f64 {
    (2 * (p.total_degree() as usize + p.vars().len()) + 4) as f64
}

impl CompiledFn {
    pub fn new(f: &RationalFn) -> Self {
        CompiledFn {
            num: Evaluator::new(&f.numerator),
            den: Evaluator::new(&f.denominator),
            num_depth: depth(&f.numerator),
            den_depth: depth(&f.denominator),
            certify: 1e-13,
        }
    }

    /// Value and a bound on its absolute error.
    pub fn eval_f64(&self, at: &Assignment<f64>) -> Result<(f64, f64)> {
        let nv = at.aligned(self.num.vars())?;
        let dv = at.aligned(self.den.vars())?;
        let u = f64::EPSILON / 2.0;
        let (n, d) = (self.num.eval_f64(&nv), self.den.eval_f64(&dv));
        let dn = self.num_depth * u * self.num.abs_eval_f64(&nv);
        let dd = self.den_depth * u * self.den.abs_eval_f64(&dv);
        let q = n / d;
        let bound = if d.abs() > dd {
            (dn + q.abs() * dd) / (d.abs() - dd) + q.abs() * u
        } else {
            f64::INFINITY
        };
        if bound <= self.certify && q.is_finite() {
            return Ok((q, bound));
        }
        let exact = |vals: &[f64]| -> Result<Vec<Rational>> {
            vals.iter().map(|&v| rational::from_f64(v)).collect()
        };
        let nd = self.den.eval_exact(&exact(&dv)?);
        if num_traits::Zero::is_zero(&nd) {
            return Err(Error::Domain("denominator vanishes".into()));
        }
        let value = self.num.eval_exact(&exact(&nv)?) / nd;
        let v = rational::to_f64(&value);
        Ok((v, v.abs() * u))
    }

    pub fn value_f64(&self, at: &Assignment<f64>) -> Result<f64> {
        Ok(self.eval_f64(at)?.0)
    }
}
