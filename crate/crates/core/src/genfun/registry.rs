//! Reference closed forms, entered term by term over explicit slot maps, as
//! regression targets for the synthesized numerators.

use serde::Serialize;

use super::{numerator_l, GenSpec};
use crate::chebyshev::{cheb_poly_in, ChebIndex};
use crate::denominator::build_w;
use crate::error::{Error, Result};
use crate::poly::{Poly, PolyJson};
use crate::ratfn::RationalFn;

#[derive(Clone, Debug)]
pub struct KnownForm {
    pub id: String,
    pub spec: GenSpec,
    pub closed: RationalFn,
}

/// `(id, number of integer parameters)`.
pub fn registry_ids() -> &'static [(&'static str, usize)] {
    &[
        ("chi01", 0),
        ("chi10", 0),
        ("_2", 0),
        ("_3", 0),
        ("_4", 0),
        ("2wym_i_T", 1),
        ("2wym_i_U", 1),
        ("2wym_ii", 2),
        ("2wym_ii_swapped", 2),
        ("2wym_iii", 2),
        ("2wym_iii_swapped", 2),
        ("2wym_iv", 2),
        ("tri_TTT", 0),
        ("tri_UUU", 0),
        ("tri_TUU", 0),
        ("tri_TTU", 0),
    ]
}

fn t(i: i64, v: &Poly) -> Poly {
    cheb_in(ChebIndex::t(i), v)
}

fn u(i: i64, v: &Poly) -> Poly {
    cheb_in(ChebIndex::u(i), v)
}

fn cheb_in(c: ChebIndex, v: &Poly) -> Poly {
    let var = v.vars().as_slice()[0];
    cheb_poly_in(c, var)
}

fn sq(p: &Poly) -> Poly {
    p * p
}

/// First kind: `Σ ρ^i T_{i+m}(x) = (T_m - ρ T_{m-1})/w_1`.
fn i_t(m: i64) -> Poly {
    let x = Poly::x(1);
    t(m, &x) - Poly::rho() * t(m - 1, &x)
}

fn i_u(m: i64) -> Poly {
    let x = Poly::x(1);
    u(m, &x) - Poly::rho() * u(m - 1, &x)
}

/// `Σ ρ^k T_{k+n}(x) T_{k+m}(y)` as given, `x = x_1`, `y = x_2`.
fn ii(n: i64, m: i64) -> Poly {
    let (x, y, r) = (Poly::x(1), Poly::x(2), Poly::rho());
    let r2 = sq(&r);
    (1 - &r2 + 2 * &r2 * (sq(&x) + sq(&y)) - (&r2 + 3) * &r * &x * &y) * t(m, &x) * t(n, &y)
        + &r * (&r2 * &x + &x - 2 * &r * &y) * t(m, &x) * (t(n + 1, &y) - t(n - 1, &y))
        + &r * (-2 * &r * &x + &r2 * &y + &y) * (t(m + 1, &x) - t(m - 1, &x)) * t(n, &y)
        + &r * (1 - &r2) * (t(m - 1, &x) - t(m + 1, &x)) * (t(n - 1, &y) - t(n + 1, &y))
}

/// `Σ ρ^j U_{j+n}(x) U_{j+m}(y)` as given, `x = x_1`, `y = x_2`.
fn iii(n: i64, m: i64) -> Poly {
    let (x, y, r) = (Poly::x(1), Poly::x(2), Poly::rho());
    let r2 = sq(&r);
    (&r2 * &x + &x - 2 * &r * &y) * u(m - 1, &x) * t(n, &y)
        + (-(r.pow(3)) + &r - 2 * &r * sq(&x) + 3 * &r2 * &x * &y + &x * &y - 2 * &r * sq(&y))
            * u(n - 1, &y)
            * u(m - 1, &x)
        + t(m, &x) * (-2 * &r * &x + &r2 * &y + &y) * u(n - 1, &y)
        + (1 - &r2) * t(m, &x) * t(n, &y)
}

/// `Σ ρ^j U_{m+j}(x) T_{n+j}(y)` as given; the first-kind `y` is our
/// slot 1 (`x_1`), the second-kind `x` is slot 2 (`x_2`).
fn iv(n: i64, m: i64) -> Poly {
    let (y, x, r) = (Poly::x(1), Poly::x(2), Poly::rho());
    let r2 = sq(&r);
    t(m, &x) * t(n, &y) * (1 - &r2 - 2 * &r * &x * &y + 2 * &r2 * sq(&y))
        - 2 * t(m, &x) * u(n - 1, &y) * &r * (sq(&y) - 1) * (&x - &r * &y)
        + u(m - 1, &x) * t(n, &y) * (&x - &r * &y) * (1 + &r2 - 2 * &r * &x * &y)
        + u(m - 1, &x) * u(n - 1, &y) * (sq(&y) - 1) * &r * (1 - &r2 + 2 * &r * &x * &y - 2 * sq(&x))
}

fn xyz() -> (Poly, Poly, Poly, Poly) {
    (Poly::x(1), Poly::x(2), Poly::x(3), Poly::rho())
}

fn tri_ttt() -> Poly {
    let (x, y, z, r) = xyz();
    let r2 = sq(&r);
    let s2 = sq(&x) + sq(&y) + sq(&z);
    let p = &x * &y * &z;
    (1 + &r2).pow(3) + 8 * r.pow(4) * (x.pow(4) + y.pow(4) + z.pow(4))
        + 32 * r.pow(4) * sq(&p)
        - 2 * (&r2 + 1) * (&r2 + 3) * &r2 * &s2
        + 4 * (r.pow(4) + 3) * &r2 * (sq(&x) * sq(&y) + sq(&x) * sq(&z) + sq(&y) * sq(&z))
        - 4 * (3 * &r2 + 5) * r.pow(3) * &p * &s2
        - (r.pow(6) - 15 * r.pow(4) - 25 * &r2 + 7) * &r * &p
}

fn tri_uuu() -> Poly {
    let (x, y, z, r) = xyz();
    let r2 = sq(&r);
    (1 + &r2).pow(3) + 16 * r.pow(3) * &x * &y * &z
        - 4 * &r2 * (1 + &r2) * (sq(&x) + sq(&y) + sq(&z))
}

/// First-kind `x`, second-kind `y, z`.
fn tri_tuu() -> Poly {
    let (x, y, z, r) = xyz();
    let r2 = sq(&r);
    (&r2 + 1).pow(3) + 8 * r.pow(4) * x.pow(4) - 16 * r.pow(3) * x.pow(3) * &y * &z
        - 2 * (&r2 + 1) * (&r2 + 3) * &r2 * sq(&x)
        + 8 * &r2 * sq(&x) * (sq(&y) + sq(&z))
        - 4 * &r * (5 - sq(&(&r2 + 2))) * &x * &y * &z
        - 4 * (&r2 + 1) * &r2 * (sq(&y) + sq(&z))
}

/// First-kind `x, y`, second-kind `z`.
fn tri_ttu() -> Poly {
    let (x, y, z, r) = xyz();
    let r2 = sq(&r);
    let p = &x * &y * &z;
    (&r2 + 1).pow(3) + 8 * r.pow(4) * (x.pow(4) + y.pow(4))
        - 2 * (&r2 + 1) * (&r2 + 3) * &r2 * (sq(&x) + sq(&y))
        + 4 * (r.pow(4) + 3) * &r2 * sq(&x) * sq(&y)
        + 16 * r.pow(4) * sq(&x) * sq(&y) * sq(&z)
        + 8 * &r2 * sq(&z) * (sq(&x) + sq(&y))
        - 8 * (&r2 + 2) * r.pow(3) * &p * (sq(&x) + sq(&y))
        - 8 * r.pow(3) * &x * &y * z.pow(3)
        - 2 * (-5 * r.pow(4) - 10 * &r2 + 3) * &r * &p
        - 4 * (&r2 + 1) * &r2 * sq(&z)
}

fn param(params: &[i64], i: usize, id: &str) -> Result<i64> {
    params
        .get(i)
        .copied()
        .ok_or_else(|| Error::Domain(format!("`{id}` needs {} integer parameter(s)", i + 1)))
}

/// The reference numerator of `id` and the spec it claims to sum.
fn lookup(id: &str, params: &[i64]) -> Result<(GenSpec, Poly)> {
    let p = |i| param(params, i, id);
    let spec = |k, n, t: Vec<i64>| GenSpec::new(k, n, t);
    Ok(match id {
        "chi01" => (spec(0, 1, vec![0])?, Poly::one()),
        "chi10" => (spec(1, 0, vec![0])?, 1 - Poly::rho() * Poly::x(1)),
        "_2" => (spec(0, 2, vec![0, 0])?, 1 - sq(&Poly::rho())),
        "_3" => (spec(2, 0, vec![0, 0])?, ii(0, 0)),
        "_4" => (spec(1, 1, vec![0, 0])?, iv(0, 0)),
        "2wym_i_T" => (spec(1, 0, vec![p(0)?])?, i_t(p(0)?)),
        "2wym_i_U" => (spec(0, 1, vec![p(0)?])?, i_u(p(0)?)),
        "2wym_ii" => (spec(2, 0, vec![p(0)?, p(1)?])?, ii(p(0)?, p(1)?)),
        "2wym_ii_swapped" => (spec(2, 0, vec![p(0)?, p(1)?])?, ii(p(1)?, p(0)?)),
        "2wym_iii" => (spec(0, 2, vec![p(0)?, p(1)?])?, iii(p(0)?, p(1)?)),
        "2wym_iii_swapped" => (spec(0, 2, vec![p(0)?, p(1)?])?, iii(p(1)?, p(0)?)),
        "2wym_iv" => (spec(1, 1, vec![p(0)?, p(1)?])?, iv(p(0)?, p(1)?)),
        "tri_TTT" => (spec(3, 0, vec![0; 3])?, tri_ttt()),
        "tri_UUU" => (spec(0, 3, vec![0; 3])?, tri_uuu()),
        "tri_TUU" => (spec(1, 2, vec![0; 3])?, tri_tuu()),
        "tri_TTU" => (spec(2, 1, vec![0; 3])?, tri_ttu()),
        _ => return Err(Error::UnknownId(id.to_string())),
    })
}

/// `"_3"` and `"_4"` are entered as their own standalone expressions, which coincide with the `n = m = 0` cases of ii and iv; the
/// exact equality is asserted in the tests.
pub fn known_form(id: &str, params: &[i64]) -> Result<KnownForm> {
    let (spec, numerator) = lookup(id, params)?;
    let numerator = match id {
        "_3" => {
            let (x, y, r) = (Poly::x(1), Poly::x(2), Poly::rho());
            let r2 = sq(&r);
            1 - &r2 + 2 * &r2 * (sq(&x) + sq(&y)) - (&r2 + 3) * &r * &x * &y
        }
        "_4" => {
            // U in x, T in y: x -> x_2, y -> x_1.
            let (y, x, r) = (Poly::x(1), Poly::x(2), Poly::rho());
            let r2 = sq(&r);
            1 - &r2 - 2 * &r * &x * &y + 2 * &r2 * sq(&y)
        }
        _ => numerator,
    };
    let w = build_w(spec.arity())?.poly;
    Ok(KnownForm {
        id: id.to_string(),
        spec,
        closed: RationalFn::new(numerator, w),
    })
}

/// Synthesized minus reference numerator (both over `w_{k+n}`).
#[derive(Clone, Debug, Serialize)]
pub struct KnownComparison {
    pub id: String,
    pub params: Vec<i64>,
    pub spec: GenSpec,
    pub matches: bool,
    pub difference_terms: usize,
    pub difference: PolyJson,
    #[serde(skip)]
    pub difference_poly: Poly,
}

pub fn compare_known(id: &str, params: &[i64]) -> Result<KnownComparison> {
    let form = known_form(id, params)?;
    let l = numerator_l(&form.spec)?;
    let diff = &l - &form.closed.numerator;
    Ok(KnownComparison {
        id: id.to_string(),
        params: params.to_vec(),
        spec: form.spec,
        matches: diff.is_zero(),
        difference_terms: diff.len(),
        difference: diff.to_json(),
        difference_poly: diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_forms_agree_with_parametric_forms() {
        assert_eq!(known_form("_3", &[]).unwrap().closed.numerator, ii(0, 0));
        assert_eq!(known_form("_4", &[]).unwrap().closed.numerator, iv(0, 0));
        assert_eq!(iii(0, 0), 1 - sq(&Poly::rho()));
    }

    #[test]
    fn unknown_ids() {
        assert!(matches!(known_form("nope", &[]), Err(Error::UnknownId(_))));
        assert!(matches!(known_form("2wym_ii", &[1]), Err(Error::Domain(_))));
    }
}
