//! Multiplication kernel.
//!
//! Both operands are scaled to integer coefficients; products accumulate in
//! checked `i128` and fall back to `BigInt` on the first overflow. Marker
//! reduction `s^2 = 1 - x^2` happens while accumulating.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::{Exps, Monomial, VarSet};
use crate::par::Exec;
use crate::rational::Rational;

type Terms = Vec<(Monomial, Rational)>;

trait Coef: Clone + Send + Sync + Sized {
    fn add_scaled(acc: &mut Self, a: &Self, b: &Self, negate: bool) -> bool;
    fn merge(acc: &mut Self, other: Self) -> bool;
    fn is_zero(&self) -> bool;
    fn into_big(self) -> BigInt;
    fn zero() -> Self;
}

impl Coef for i128 {
    #[inline]
    fn add_scaled(acc: &mut Self, a: &Self, b: &Self, negate: bool) -> bool {
        let Some(p) = a.checked_mul(*b) else {
            return false;
        };
        let r = if negate { acc.checked_sub(p) } else { acc.checked_add(p) };
        match r {
            Some(v) => {
                *acc = v;
                true
            }
            None => false,
        }
    }
    fn merge(acc: &mut Self, other: Self) -> bool {
        match acc.checked_add(other) {
            Some(v) => {
                *acc = v;
                true
            }
            None => false,
        }
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn into_big(self) -> BigInt {
        BigInt::from(self)
    }
    fn zero() -> Self {
        0
    }
}

impl Coef for BigInt {
    fn add_scaled(acc: &mut Self, a: &Self, b: &Self, negate: bool) -> bool {
        let p = a * b;
        if negate {
            *acc -= p;
        } else {
            *acc += p;
        }
        true
    }
    fn merge(acc: &mut Self, other: Self) -> bool {
        *acc += other;
        true
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn into_big(self) -> BigInt {
        self
    }
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
}

fn integerize(t: &[(Monomial, Rational)]) -> (Vec<BigInt>, BigInt) {
    let l = t
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let ints = t
        .iter()
        .map(|(_, c)| c.numer() * (&l / c.denom()))
        .collect();
    (ints, l)
}

/// Expands a raw exponent sum into reduced monomials, `(exps, negate)`:
/// each marker at exponent 2 becomes `1 - x^2`.
#[inline]
fn reduce_into(e: &Exps, markers: &[(usize, usize)], out: &mut Vec<(Exps, bool)>) {
    out.clear();
    out.push((e.clone(), false));
    for &(sp, xp) in markers {
        if e[sp] < 2 {
            continue;
        }
        let n = out.len();
        for i in 0..n {
            out[i].0[sp] -= 2;
            let mut other = out[i].clone();
            other.0[xp] += 2;
            other.1 = !other.1;
            out.push(other);
        }
    }
}

fn convolve<C: Coef>(
    n: usize,
    am: &[(Monomial, Rational)],
    ac: &[C],
    bm: &[(Monomial, Rational)],
    bc: &[C],
    markers: &[(usize, usize)],
) -> Option<FxHashMap<Exps, C>> {
    let mut map: FxHashMap<Exps, C> = FxHashMap::default();
    map.reserve(am.len().max(bm.len()) * 2);
    let mut buf = Vec::with_capacity(8);
    let mut e = Exps::from_elem(0, n);
    for (ta, ca) in am.iter().zip(ac) {
        for (tb, cb) in bm.iter().zip(bc) {
            let mut needs_reduce = false;
            for i in 0..n {
                e[i] = ta.0 .0[i] + tb.0 .0[i];
            }
            for &(sp, _) in markers {
                needs_reduce |= e[sp] >= 2;
            }
            if !needs_reduce {
                let slot = map.entry(e.clone()).or_insert_with(C::zero);
                if !C::add_scaled(slot, ca, cb, false) {
                    return None;
                }
            } else {
                reduce_into(&e, markers, &mut buf);
                for (r, neg) in buf.drain(..) {
                    let slot = map.entry(r).or_insert_with(C::zero);
                    if !C::add_scaled(slot, ca, cb, neg) {
                        return None;
                    }
                }
            }
        }
    }
    Some(map)
}

fn run<C: Coef>(
    vars: &VarSet,
    a: &[(Monomial, Rational)],
    ac: &[C],
    b: &[(Monomial, Rational)],
    bc: &[C],
    exec: Exec,
) -> Option<Vec<(Exps, C)>> {
    let n = vars.len();
    let markers: Vec<(usize, usize)> = vars.markers().into_vec();
    let chunks = if exec.is_parallel() && a.len() * b.len() >= 1 << 14 {
        (a.len()).min(64)
    } else {
        1
    };
    let maps: Vec<Option<FxHashMap<Exps, C>>> = if chunks <= 1 {
        vec![convolve(n, a, ac, b, bc, &markers)]
    } else {
        let size = a.len().div_ceil(chunks);
        let ranges: Vec<(usize, usize)> = (0..a.len())
            .step_by(size)
            .map(|s| (s, (s + size).min(a.len())))
            .collect();
        exec.map(&ranges, |&(s, t)| {
            convolve(n, &a[s..t], &ac[s..t], b, bc, &markers)
        })
    };
    let mut iter = maps.into_iter();
    let mut acc = iter.next()??;
    for m in iter {
        for (k, v) in m? {
            match acc.entry(k) {
                std::collections::hash_map::Entry::Occupied(mut o) => {
                    if !C::merge(o.get_mut(), v) {
                        return None;
                    }
                }
                std::collections::hash_map::Entry::Vacant(slot) => {
                    slot.insert(v);
                }
            }
        }
    }
    Some(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect())
}

pub(super) fn mul_terms(vars: &VarSet, a: &Terms, b: &Terms, exec: Exec) -> Terms {
    let (ia, la) = integerize(a);
    let (ib, lb) = integerize(b);
    let scale = la * lb;
    let small = |v: &[BigInt]| -> Option<Vec<i128>> { v.iter().map(|c| c.to_i64().map(i128::from)).collect() };
    let raw: Vec<(Exps, BigInt)> = match (small(&ia), small(&ib)) {
        (Some(sa), Some(sb)) => match run(vars, a, &sa, b, &sb, exec) {
            Some(v) => v.into_iter().map(|(e, c)| (e, c.into_big())).collect(),
            None => run(vars, a, &ia, b, &ib, exec).expect("bigint path is total"),
        },
        _ => run(vars, a, &ia, b, &ib, exec).expect("bigint path is total"),
    };
    let one = scale.is_one();
    let mut out: Terms = raw
        .into_iter()
        .map(|(e, c)| {
            let r = if one {
                Rational::from_integer(c)
            } else {
                Rational::new(c, scale.clone())
            };
            (Monomial(e), r)
        })
        .collect();
    out.sort_unstable_by(|x, y| x.0.cmp(&y.0));
    out
}
