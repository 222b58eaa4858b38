use serde::{Deserialize, Serialize};

use super::{Exps, Monomial, Poly, Var, VarSet};
use crate::error::{Error, Result};
use crate::rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exps: Vec<u16>,
}

/// Wire form of a [`Poly`]: variable names plus terms in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl PolyJson {
    pub fn from_poly(p: &Poly) -> Self {
        PolyJson {
            vars: p.vars().as_slice().iter().map(Var::name).collect(),
            terms: p
                .terms()
                .iter()
                .map(|(m, c)| TermJson {
                    coeff: rational::format(c),
                    exps: m.0.to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<Poly> {
        let declared: Vec<Var> = self
            .vars
            .iter()
            .map(|s| Var::parse(s))
            .collect::<Result<_>>()?;
        let vars = VarSet::new(declared.iter().copied());
        let pos: Vec<usize> = declared.iter().map(|v| vars.index(*v).unwrap()).collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exps.len() != declared.len() {
                return Err(Error::Arity {
                    expected: declared.len(),
                    got: t.exps.len(),
                });
            }
            let mut e = Exps::from_elem(0, vars.len());
            for (&p, &x) in pos.iter().zip(&t.exps) {
                e[p] += x;
            }
            terms.push((Monomial(e), rational::parse(&t.coeff)?));
        }
        Ok(Poly::from_terms(vars, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let p = (Poly::x(1) - Poly::var(Var::S(2)) * Poly::rho() + 1).pow(3);
        let j = serde_json::to_string(&p.to_json()).unwrap();
        let back: PolyJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.to_poly().unwrap(), p);
        assert!(j.starts_with(r#"{"vars":["x1","x2","s2","rho"],"terms":[{"coeff":"1/1""#));
    }
}
