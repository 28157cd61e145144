//! Outward-rounded interval arithmetic on f64 endpoints.
//!
//! Every operation returns an interval that contains the exact real result
//! for all point inputs drawn from the operands. Directed rounding is done
//! without touching the FPU rounding mode: each endpoint is computed in
//! round-to-nearest and then nudged one ulp outward with `next_down` /
//! `next_up` unless an error-free transformation (2Sum for sums, an FMA
//! residual for products, quotients and square roots) proves the computed
//! endpoint exact. IEEE 754 guarantees the nearest-rounded result is within
//! one ulp of the true value, so the nudge is always sufficient.
//!
//! Empty and unbounded intervals are not representable; operations that
//! would need them (division by an interval containing zero, square roots
//! of negative ranges) return an error instead.

mod linalg;
mod trig;

pub use linalg::{
    numeric_rank, precond_solve, symmetric_eigenvalues, IntervalMatrix, IntervalVector,
    PrecondSolve,
};
pub(crate) use linalg::invert_midpoint;

use crate::{Error, Result};

/// Closed interval `[lo, hi]` with finite outward-rounded endpoints.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl std::fmt::Debug for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

// ---- directed endpoint arithmetic -----------------------------------------

// Below roughly 1e-300 the FMA residual trick is no longer exact, so fall
// back to a blind one-ulp nudge there. Nearest rounding is within one ulp
// of the true result, which keeps the nudged endpoint valid.
const EFT_FLOOR: f64 = 1e-300;

#[inline]
fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.abs() < EFT_FLOOR {
        return p.next_down();
    }
    let e = a.mul_add(b, -p);
    if e < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.abs() < EFT_FLOOR {
        return p.next_up();
    }
    let e = a.mul_add(b, -p);
    if e > 0.0 {
        p.next_up()
    } else {
        p
    }
}

#[inline]
fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q.abs() < EFT_FLOOR {
        return q.next_down();
    }
    // e = q*b - a exactly; true - q = -e/b.
    let e = q.mul_add(b, -a);
    let true_below = (e > 0.0) == (b > 0.0);
    if e != 0.0 && true_below {
        q.next_down()
    } else {
        q
    }
}

#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q.abs() < EFT_FLOOR {
        return q.next_up();
    }
    let e = q.mul_add(b, -a);
    let true_above = (e > 0.0) != (b > 0.0);
    if e != 0.0 && true_above {
        q.next_up()
    } else {
        q
    }
}

#[inline]
fn sqrt_down(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let r = x.sqrt();
    if x < EFT_FLOOR {
        return r.next_down().max(0.0);
    }
    let e = r.mul_add(r, -x);
    if e > 0.0 {
        r.next_down()
    } else {
        r
    }
}

#[inline]
fn sqrt_up(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let r = x.sqrt();
    if x < EFT_FLOOR {
        return r.next_up();
    }
    let e = r.mul_add(r, -x);
    if e < 0.0 {
        r.next_up()
    } else {
        r
    }
}

// ---- construction and accessors --------------------------------------------

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    /// Enclosure of π (the f64 nearest π lies below it).
    pub const PI: Interval = Interval {
        lo: std::f64::consts::PI,
        hi: 3.141_592_653_589_793_6,
    };
    /// Enclosure of π/2.
    pub const FRAC_PI_2: Interval = Interval {
        lo: std::f64::consts::FRAC_PI_2,
        hi: 1.570_796_326_794_896_8,
    };

    /// Interval from ordered finite endpoints. Panics on a malformed pair;
    /// that is a programming error, not a data error.
    #[inline]
    pub fn new(lo: f64, hi: f64) -> Interval {
        assert!(lo <= hi && lo.is_finite() && hi.is_finite(), "bad interval [{lo}, {hi}]");
        // normalize -0.0 so bit-exact encodings round-trip predictably
        Interval { lo: lo + 0.0, hi: hi + 0.0 }
    }

    /// Degenerate interval `[x, x]`.
    #[inline]
    pub fn point(x: f64) -> Interval {
        Interval::new(x, x)
    }

    /// Hull of two endpoints given in any order.
    #[inline]
    pub fn from_endpoints(a: f64, b: f64) -> Interval {
        Interval::new(a.min(b), a.max(b))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Midpoint, clamped into the interval.
    #[inline]
    pub fn mid(&self) -> f64 {
        let m = 0.5 * (self.lo + self.hi);
        if m.is_finite() {
            m.clamp(self.lo, self.hi)
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    /// Upper bound on the width `hi - lo`.
    #[inline]
    pub fn width(&self) -> f64 {
        add_up(self.hi, -self.lo)
    }

    /// Upper bound on max(|x - mid|) over the interval.
    #[inline]
    pub fn rad(&self) -> f64 {
        let m = self.mid();
        add_up(self.hi, -m).max(add_up(m, -self.lo))
    }

    /// Largest absolute value contained.
    #[inline]
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value contained (0 if the interval straddles 0).
    #[inline]
    pub fn mig(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    #[inline]
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    #[inline]
    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strict containment in the interior of `other`.
    #[inline]
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    #[inline]
    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    #[inline]
    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then(|| Interval::new(lo, hi))
    }

    #[inline]
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    /// Symmetric inflation by `r ≥ 0` in both directions (outward-rounded).
    pub fn inflate(&self, r: f64) -> Interval {
        debug_assert!(r >= 0.0);
        Interval::new(add_down(self.lo, -r), add_up(self.hi, r))
    }

    /// Distance of the interval from zero: positive iff 0 is excluded.
    #[inline]
    pub fn margin_from_zero(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.mig()
        }
    }

    // ---- arithmetic beyond the std operators ----

    /// Division, requiring `0 ∉ rhs`.
    pub fn try_div(&self, rhs: &Interval) -> Result<Interval> {
        if rhs.contains_zero() {
            return Err(Error::Domain);
        }
        let (p, q, r, s) = (self.lo, self.hi, rhs.lo, rhs.hi);
        let iv = if r > 0.0 {
            if p >= 0.0 {
                Interval::new(div_down(p, s), div_up(q, r))
            } else if q <= 0.0 {
                Interval::new(div_down(p, r), div_up(q, s))
            } else {
                Interval::new(div_down(p, r), div_up(q, r))
            }
        } else {
            // s < 0
            if p >= 0.0 {
                Interval::new(div_down(q, s), div_up(p, r))
            } else if q <= 0.0 {
                Interval::new(div_down(q, r), div_up(p, s))
            } else {
                Interval::new(div_down(q, s), div_up(p, s))
            }
        };
        Ok(iv)
    }

    /// Reciprocal, requiring `0 ∉ self`.
    pub fn recip(&self) -> Result<Interval> {
        Interval::ONE.try_div(self)
    }

    /// Square root, requiring `lo ≥ 0`.
    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo < 0.0 {
            return Err(Error::Domain);
        }
        Ok(Interval::new(sqrt_down(self.lo), sqrt_up(self.hi)))
    }

    /// Tight enclosure of `x²` (never negative even when `0 ∈ self`).
    pub fn square(&self) -> Interval {
        let lo = if self.contains_zero() {
            0.0
        } else {
            let m = self.mig();
            mul_down(m, m)
        };
        let m = self.mag();
        Interval::new(lo, mul_up(m, m))
    }

    /// Integer power by monotonicity/parity analysis on the endpoints.
    pub fn powi(&self, k: i32) -> Result<Interval> {
        fn pow_nn_down(x: f64, k: u32) -> f64 {
            (1..k).fold(x, |acc, _| mul_down(acc, x))
        }
        fn pow_nn_up(x: f64, k: u32) -> f64 {
            (1..k).fold(x, |acc, _| mul_up(acc, x))
        }
        if k < 0 {
            return self.powi(-k)?.recip();
        }
        let k = k as u32;
        Ok(match k {
            0 => Interval::ONE,
            1 => *self,
            _ if k % 2 == 0 => {
                let m = self.mig();
                let big = self.mag();
                Interval::new(pow_nn_down(m, k), pow_nn_up(big, k))
            }
            _ => {
                // odd powers are monotone
                let lo = if self.lo >= 0.0 {
                    pow_nn_down(self.lo, k)
                } else {
                    -pow_nn_up(-self.lo, k)
                };
                let hi = if self.hi >= 0.0 {
                    pow_nn_up(self.hi, k)
                } else {
                    -pow_nn_down(-self.hi, k)
                };
                Interval::new(lo, hi)
            }
        })
    }

    /// Enclosure of `t^(-3/2)` for `t` in a strictly positive interval.
    ///
    /// This is the Newtonian kernel `r⁻³` computed from the enclosure of
    /// `r² = |q_i - q_j|²`; a nonpositive lower bound means the box may
    /// contain a collision.
    pub fn inv_r_cubed(&self) -> Result<Interval> {
        if self.lo <= 0.0 {
            return Err(Error::CollisionPossible);
        }
        let r = self.sqrt().expect("positive by check above");
        (*self * r).recip().map_err(|_| Error::CollisionPossible)
    }

    /// Enclosure of the exact decimal denoted by `s` (e.g. "0.21", "1e-4",
    /// "2", "-0.125"). The result is the tightest representable interval
    /// around the exact rational value mantissa·10^exp.
    pub fn enclosing_decimal(s: &str) -> Option<Interval> {
        let s = s.trim();
        let (s, neg) = match s.strip_prefix('-') {
            Some(rest) => (rest, true),
            None => (s.strip_prefix('+').unwrap_or(s), false),
        };
        let (mant_str, exp10) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().ok()?),
            None => (s, 0),
        };
        let (int_part, frac_part) = match mant_str.split_once('.') {
            Some((i, f)) => (i, f),
            None => (mant_str, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits: String = [int_part, frac_part].concat();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 30 {
            return None;
        }
        let mant: i128 = digits.parse().ok()?;
        let mant = if neg { -mant } else { mant };
        let exp = exp10 - frac_part.len() as i32;
        Some(Interval::from_decimal_parts(mant, exp))
    }

    /// Tight enclosure of `mant · 10^exp`.
    pub fn from_decimal_parts(mant: i128, exp: i32) -> Interval {
        let m = Interval::from_i128(mant);
        let ten = Interval::point(10.0);
        let p = ten.powi(exp.unsigned_abs() as i32).expect("positive base");
        if exp >= 0 {
            m * p
        } else {
            m.try_div(&p).expect("10^k > 0")
        }
    }

    /// Tight enclosure of an i128 (exact when the value fits in 53 bits).
    pub fn from_i128(v: i128) -> Interval {
        let f = v as f64;
        let back = f as i128;
        if back == v {
            Interval::point(f)
        } else if back < v {
            Interval::new(f, f.next_up())
        } else {
            Interval::new(f.next_down(), f)
        }
    }
}

// ---- operators --------------------------------------------------------------

impl std::ops::Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval::new(add_down(self.lo, rhs.lo), add_up(self.hi, rhs.hi))
    }
}

impl std::ops::Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval::new(add_down(self.lo, -rhs.hi), add_up(self.hi, -rhs.lo))
    }
}

impl std::ops::Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }
}

impl std::ops::Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let (p, q, r, s) = (self.lo, self.hi, rhs.lo, rhs.hi);
        if p >= 0.0 {
            if r >= 0.0 {
                Interval::new(mul_down(p, r), mul_up(q, s))
            } else if s <= 0.0 {
                Interval::new(mul_down(q, r), mul_up(p, s))
            } else {
                Interval::new(mul_down(q, r), mul_up(q, s))
            }
        } else if q <= 0.0 {
            if r >= 0.0 {
                Interval::new(mul_down(p, s), mul_up(q, r))
            } else if s <= 0.0 {
                Interval::new(mul_down(q, s), mul_up(p, r))
            } else {
                Interval::new(mul_down(p, s), mul_up(p, r))
            }
        } else if r >= 0.0 {
            Interval::new(mul_down(p, s), mul_up(q, s))
        } else if s <= 0.0 {
            Interval::new(mul_down(q, r), mul_up(p, r))
        } else {
            Interval::new(
                mul_down(p, s).min(mul_down(q, r)),
                mul_up(p, r).max(mul_up(q, s)),
            )
        }
    }
}

/// Panicking division; use [`Interval::try_div`] when the divisor may
/// contain zero.
impl std::ops::Div for Interval {
    type Output = Interval;
    #[inline]
    fn div(self, rhs: Interval) -> Interval {
        self.try_div(&rhs).expect("division by interval containing zero")
    }
}

impl std::ops::Mul<f64> for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: f64) -> Interval {
        self * Interval::point(rhs)
    }
}

impl std::ops::Add<f64> for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl std::ops::Sub<f64> for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b)
    }

    #[test]
    fn exact_endpoint_arithmetic_stays_exact() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        assert_eq!(iv(-1.0, 1.0) * iv(-1.0, 1.0), iv(-1.0, 1.0));
        assert_eq!(iv(1.0, 2.0) - iv(0.5, 0.5), iv(0.5, 1.5));
        assert_eq!(iv(2.0, 2.0) * iv(4.0, 4.0), iv(8.0, 8.0));
    }

    #[test]
    fn division_encloses_endpoint_quotients() {
        // [1,2] / [0.5,1] ⊇ [1,4]; endpoints here are exact dyadics
        let q = iv(1.0, 2.0).try_div(&iv(0.5, 1.0)).unwrap();
        assert!(q.lo <= 1.0 && 4.0 <= q.hi);
        assert!(q.width() <= 3.0 + 1e-15);
        assert_eq!(iv(4.0, 4.0).try_div(&iv(2.0, 2.0)).unwrap(), iv(2.0, 2.0));
        assert_eq!(iv(1.0, 2.0).try_div(&iv(-1.0, 1.0)), Err(Error::Domain));
    }

    #[test]
    fn sqrt_monotone_exact_endpoints() {
        assert_eq!(iv(4.0, 9.0).sqrt().unwrap(), iv(2.0, 3.0));
        assert!(iv(-1.0, 1.0).sqrt().is_err());
    }

    #[test]
    fn inv_r_cubed_cases() {
        assert_eq!(iv(1.0, 1.0).inv_r_cubed().unwrap(), iv(1.0, 1.0));
        // [0.25,4] -> t^(-3/2) at endpoints: 4^(-3/2)=0.125, 0.25^(-3/2)=8
        let e = iv(0.25, 4.0).inv_r_cubed().unwrap();
        assert!(e.lo <= 0.125 && 8.0 <= e.hi);
        assert!(e.lo >= 0.125 * (1.0 - 1e-14) && e.hi <= 8.0 * (1.0 + 1e-14));
        assert_eq!(iv(0.0, 1.0).inv_r_cubed(), Err(Error::CollisionPossible));
        assert_eq!(iv(-1.0, 1.0).inv_r_cubed(), Err(Error::CollisionPossible));
    }

    #[test]
    fn square_straddling_zero() {
        assert_eq!(iv(-2.0, 1.0).square(), iv(0.0, 4.0));
        assert_eq!(iv(-3.0, -2.0).square(), iv(4.0, 9.0));
        assert_eq!(iv(2.0, 3.0).powi(2).unwrap(), iv(4.0, 9.0));
        assert_eq!(iv(-2.0, 1.0).powi(3).unwrap(), iv(-8.0, 1.0));
    }

    #[test]
    fn decimal_enclosures() {
        let x = Interval::enclosing_decimal("0.21").unwrap();
        assert!(x.contains(0.21) && x.width() <= 2.0 * f64::EPSILON);
        assert!(x.lo <= 0.21 && 0.21 <= x.hi);
        let y = Interval::enclosing_decimal("2").unwrap();
        assert_eq!(y, Interval::point(2.0));
        let z = Interval::enclosing_decimal("1e-4").unwrap();
        assert!(z.contains(1e-4) && z.width() < 1e-18);
        let w = Interval::enclosing_decimal("-0.125").unwrap();
        assert_eq!(w, Interval::point(-0.125));
        assert!(Interval::enclosing_decimal("x").is_none());
        // sum of enclosures of 0.21+0.21+0.19+0.19+0.2 contains exactly 1
        let masses = ["0.21", "0.21", "0.19", "0.19", "0.2"];
        let s: Interval = masses
            .iter()
            .map(|m| Interval::enclosing_decimal(m).unwrap())
            .sum();
        assert!(s.contains(1.0));
    }

    #[test]
    fn pi_enclosure_sane() {
        assert!(Interval::PI.lo < Interval::PI.hi);
        assert!(Interval::PI.width() < 1e-15);
        // 355/113 > π > 3.14159265358979
        assert!(Interval::PI.hi < 355.0 / 113.0);
        assert!(Interval::PI.lo > 3.14159265358978);
    }

    fn rand_interval(rng: &mut ChaCha8Rng) -> Interval {
        let scale = 10f64.powi(rng.gen_range(-3..4));
        let a = rng.gen_range(-scale..scale);
        let w = rng.gen_range(0.0..scale * 0.1);
        Interval::new(a, a + w)
    }

    fn sample(rng: &mut ChaCha8Rng, x: &Interval) -> f64 {
        if x.is_point() {
            x.lo
        } else {
            rng.gen_range(x.lo..=x.hi)
        }
    }

    /// Containment fuzzing: point arithmetic results must land inside the
    /// interval results, for every operation (10^5 random pairs).
    #[test]
    fn containment_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
        for _ in 0..100_000 {
            let a = rand_interval(&mut rng);
            let b = rand_interval(&mut rng);
            let x = sample(&mut rng, &a);
            let y = sample(&mut rng, &b);
            assert!((a + b).contains(x + y), "add {a:?} {b:?}");
            assert!((a - b).contains(x - y), "sub {a:?} {b:?}");
            assert!((a * b).contains(x * y), "mul {a:?} {b:?}");
            if !b.contains_zero() {
                assert!(a.try_div(&b).unwrap().contains(x / y), "div {a:?} {b:?}");
            }
            if a.lo >= 0.0 {
                assert!(a.sqrt().unwrap().contains(x.sqrt()), "sqrt {a:?}");
            }
            if a.lo > 0.0 {
                assert!(
                    a.inv_r_cubed().unwrap().contains(x.powf(-1.5)),
                    "inv_r_cubed {a:?}"
                );
            }
            assert!(a.square().contains(x * x), "square {a:?}");
            assert!(a.powi(3).unwrap().contains(x * x * x), "powi3 {a:?}");
        }
    }

    /// The same fuzz at extreme magnitudes where the EFT guard kicks in.
    #[test]
    fn containment_fuzz_extreme_scales() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xBADCAB);
        for _ in 0..20_000 {
            let scale = 10f64.powi(rng.gen_range(-160..150));
            let a0 = rng.gen_range(-scale..scale);
            let a = Interval::new(a0, a0 + scale * rng.gen_range(0.0..1e-3));
            let b0 = rng.gen_range(-scale..scale);
            let b = Interval::new(b0, b0 + scale * rng.gen_range(0.0..1e-3));
            let x = sample(&mut rng, &a);
            let y = sample(&mut rng, &b);
            assert!((a + b).contains(x + y));
            assert!((a - b).contains(x - y));
            assert!((a * b).contains(x * y));
            if !b.contains_zero() {
                assert!(a.try_div(&b).unwrap().contains(x / y));
            }
        }
    }
}
