//! Exact dyadic piecewise-linear self-homeomorphisms of [0,1]: the
//! independent word-problem oracle for F.
//!
//! Everything here is exact integer arithmetic; no floating point.

use crate::words::{Letter, Word};
use num_bigint::BigInt;
use num_traits_shim::*;
use std::cmp::Ordering;
use std::fmt;

// num-bigint re-exports the handful of traits we need through its methods;
// this tiny shim keeps the dependency list to num-bigint alone.
mod num_traits_shim {
    use num_bigint::BigInt;

    pub fn is_zero(n: &BigInt) -> bool {
        n.sign() == num_bigint::Sign::NoSign
    }

    pub fn is_even(n: &BigInt) -> bool {
        !n.bit(0)
    }
}

/// A dyadic rational `num / 2^exp` in canonical form: `num` odd, or zero
/// with `exp = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    exp: u32,
}

impl Dyadic {
    pub fn new(num: BigInt, exp: u32) -> Dyadic {
        let mut d = Dyadic { num, exp };
        d.canonicalize();
        d
    }

    pub fn from_int(n: i64) -> Dyadic {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn zero() -> Dyadic {
        Dyadic::from_int(0)
    }

    pub fn one() -> Dyadic {
        Dyadic::from_int(1)
    }

    /// `1 - 2^{-k}` as a dyadic.
    pub fn one_minus_pow2_neg(k: u32) -> Dyadic {
        Dyadic::new((BigInt::from(1) << k) - 1, k)
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.num)
    }

    fn canonicalize(&mut self) {
        if is_zero(&self.num) {
            self.exp = 0;
            return;
        }
        while self.exp > 0 && is_even(&self.num) {
            self.num >>= 1;
            self.exp -= 1;
        }
    }

    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u32) {
        let e = self.exp.max(other.exp);
        let a = &self.num << (e - self.exp);
        let b = &other.num << (e - other.exp);
        (a, b, e)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a - b, e)
    }

    /// Multiply by `2^k` (k may be negative).
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        if k >= 0 {
            let k = k as u32;
            if k >= self.exp {
                Dyadic::new(&self.num << (k - self.exp), 0)
            } else {
                Dyadic::new(self.num.clone(), self.exp - k)
            }
        } else {
            Dyadic::new(self.num.clone(), self.exp + (-k) as u32)
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exponent `t` with `dy/dx = 2^t`, for positive dyadics whose ratio is a
/// power of two. Panics otherwise — slopes of maps in F always are.
fn slope_exponent(dy: &Dyadic, dx: &Dyadic) -> i64 {
    let (a, b, _) = dy.aligned(dx);
    debug_assert!(!is_zero(&a) && !is_zero(&b));
    let (abits, bbits) = (a.bits(), b.bits());
    if abits >= bbits {
        let s = (abits - bbits) as i64;
        assert_eq!(a, &b << (s as u64), "segment slope is not a power of 2");
        s
    } else {
        let s = (bbits - abits) as i64;
        assert_eq!(&a << (s as u64), b, "segment slope is not a power of 2");
        -s
    }
}

/// A PL homeomorphism of [0,1], stored as its canonical breakpoint list:
/// endpoints (0,0) and (1,1) present, coordinates strictly increasing, and
/// no interior point where the slope does not change.
#[derive(Clone, PartialEq, Eq)]
pub struct PlMap {
    bps: Vec<(Dyadic, Dyadic)>,
}

impl PlMap {
    pub fn identity() -> PlMap {
        PlMap {
            bps: vec![
                (Dyadic::zero(), Dyadic::zero()),
                (Dyadic::one(), Dyadic::one()),
            ],
        }
    }

    /// Canonicalize a strictly increasing breakpoint list spanning
    /// (0,0)..(1,1): drop interior points where the slope is unchanged.
    fn from_points(points: Vec<(Dyadic, Dyadic)>) -> PlMap {
        assert!(points.len() >= 2);
        assert_eq!(points.first().unwrap().0, Dyadic::zero());
        assert_eq!(points.last().unwrap().0, Dyadic::one());
        let mut out: Vec<(Dyadic, Dyadic)> = Vec::with_capacity(points.len());
        for pt in points {
            if let Some(prev) = out.last() {
                assert!(prev.0 < pt.0, "breakpoints not strictly increasing");
                assert!(prev.1 < pt.1, "breakpoint images not strictly increasing");
            }
            while out.len() >= 2 {
                let a = &out[out.len() - 2];
                let b = &out[out.len() - 1];
                let s1 = slope_exponent(&b.1.sub(&a.1), &b.0.sub(&a.0));
                let s2 = slope_exponent(&pt.1.sub(&b.1), &pt.0.sub(&b.0));
                if s1 == s2 {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(pt);
        }
        PlMap { bps: out }
    }

    pub fn breakpoints(&self) -> &[(Dyadic, Dyadic)] {
        &self.bps
    }

    pub fn is_identity(&self) -> bool {
        self.bps.len() == 2
    }

    /// Largest denominator exponent over all breakpoint coordinates.
    pub fn max_exponent(&self) -> u32 {
        self.bps
            .iter()
            .map(|(x, y)| x.exponent().max(y.exponent()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &Dyadic) -> Dyadic {
        debug_assert!(*x >= Dyadic::zero() && *x <= Dyadic::one());
        let mut seg = self.bps.len() - 2;
        for i in 0..self.bps.len() - 1 {
            if *x < self.bps[i + 1].0 {
                seg = i;
                break;
            }
        }
        let (x0, y0) = &self.bps[seg];
        let (x1, y1) = &self.bps[seg + 1];
        if x == x0 {
            return y0.clone();
        }
        let t = slope_exponent(&y1.sub(y0), &x1.sub(x0));
        y0.add(&x.sub(x0).mul_pow2(t))
    }

    pub fn inverse(&self) -> PlMap {
        PlMap {
            bps: self.bps.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
        }
    }

    /// Composition `self ∘ other`: `x -> self(other(x))`.
    pub fn compose(&self, other: &PlMap) -> PlMap {
        let other_inv = other.inverse();
        let mut xs: Vec<Dyadic> = other.bps.iter().map(|(x, _)| x.clone()).collect();
        xs.extend(self.bps.iter().map(|(u, _)| other_inv.eval(u)));
        xs.sort();
        xs.dedup();
        let points = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&other.eval(&x));
                (x, y)
            })
            .collect();
        PlMap::from_points(points)
    }
}

impl fmt::Debug for PlMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlMap[")?;
        for (i, (x, y)) in self.bps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({x},{y})")?;
        }
        write!(f, "]")
    }
}

/// The PL map realizing the generator `x_i`.
///
/// `x_0` is the standard map with slopes 1/2, 1, 2 on [0,1/2], [1/2,3/4],
/// [3/4,1]; `x_i` is the identity on [0, 1-2^{-i}] and a rescaled copy of
/// `x_0` on the remaining interval. With composition applying the rightmost
/// letter of a word first, every relator `x_i^{-1} x_j x_i x_{j+1}^{-1}`
/// evaluates to the identity; a test pins this convention.
pub fn generator(i: u32) -> PlMap {
    let a = Dyadic::one_minus_pow2_neg(i);
    // Rescaled x_0 breakpoints inside [a, 1]: a + p * 2^{-i} for p among the
    // x_0 breakpoints (0,0),(1/2,1/4),(3/4,1/2),(1,1).
    let scale = |num: i64, exp: u32| -> Dyadic {
        a.add(&Dyadic::new(BigInt::from(num), exp).mul_pow2(-(i as i64)))
    };
    let mut points = Vec::new();
    if i > 0 {
        points.push((Dyadic::zero(), Dyadic::zero()));
    }
    points.push((scale(0, 0), scale(0, 0)));
    points.push((scale(1, 1), scale(1, 2)));
    points.push((scale(3, 2), scale(1, 1)));
    points.push((scale(1, 0), scale(1, 0)));
    PlMap::from_points(points)
}

fn letter_map(l: Letter) -> PlMap {
    let g = generator(l.index());
    if l.is_positive() {
        g
    } else {
        g.inverse()
    }
}

/// Evaluate a word as a PL map. The rightmost letter acts first:
/// `eval(uv) = eval(u) ∘ eval(v)`.
pub fn eval_word(w: &Word) -> PlMap {
    let mut acc = PlMap::identity();
    for &l in w.letters() {
        acc = acc.compose(&letter_map(l));
    }
    acc
}

/// Exact equality of canonical breakpoint sequences.
pub fn pl_equal(a: &PlMap, b: &PlMap) -> bool {
    a == b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn half() -> Dyadic {
        Dyadic::new(BigInt::from(1), 1)
    }

    #[test]
    fn generator_zero_values() {
        let g = generator(0);
        assert_eq!(g.eval(&half()), Dyadic::new(BigInt::from(1), 2));
        assert_eq!(g.eval(&Dyadic::zero()), Dyadic::zero());
        assert_eq!(g.eval(&Dyadic::one()), Dyadic::one());
    }

    #[test]
    fn generator_fixes_left_interval() {
        for i in 1..6u32 {
            let g = generator(i);
            let a = Dyadic::one_minus_pow2_neg(i);
            assert_eq!(g.eval(&a), a);
            let mid = a.mul_pow2(-1); // halfway into the fixed part
            assert_eq!(g.eval(&mid), mid);
        }
    }

    #[test]
    fn generators_distinct() {
        assert!(!pl_equal(&generator(0), &generator(1)));
        assert!(!pl_equal(&generator(1), &generator(2)));
        assert!(!generator(0).is_identity());
    }

    #[test]
    fn relators_evaluate_to_identity() {
        // Pins the composition-order convention: x_j^{x_i} = x_{j+1} for all
        // 0 < j - i <= 5, j <= 20.
        for j in 1..=20u32 {
            for i in j.saturating_sub(5)..j {
                let rel = Word::from_letters(vec![
                    Letter::neg(i),
                    Letter::pos(j),
                    Letter::pos(i),
                    Letter::neg(j + 1),
                ]);
                assert!(
                    eval_word(&rel).is_identity(),
                    "relator ({i},{j}) not identity"
                );
            }
        }
    }

    #[test]
    fn conjugation_relation_example() {
        let lhs = eval_word(&w("x0^-1 x1 x0"));
        let rhs = eval_word(&w("x2"));
        assert!(pl_equal(&lhs, &rhs));
    }

    #[test]
    fn inverse_composition_is_identity() {
        for s in ["x0 x1 x2^-1", "x3 x0^-1 x0^-1 x1", "x5"] {
            let v = w(s);
            let m = eval_word(&Word::concat(&[&v, &v.inverse()]));
            assert!(m.is_identity());
        }
        assert!(eval_word(&Word::empty()).is_identity());
    }

    #[test]
    fn exponent_growth_is_linear() {
        let v = w("x0 x1^-1 x0 x2 x1^-1 x0^-1 x1 x0 x2^-1 x1");
        let m = eval_word(&v);
        assert!(m.max_exponent() as usize <= v.len() + 3);
    }
}
