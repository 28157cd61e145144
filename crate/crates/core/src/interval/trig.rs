//! Interval sine and cosine via Taylor series with an explicit Lagrange
//! remainder, so no trust in the platform libm is required.
//!
//! For an interval argument the series is evaluated at the midpoint and
//! widened by the radius (|sin'| and |cos'| are bounded by 1). Arguments
//! are expected in [-16, 16]; anything wider falls back to [-1, 1], which
//! is always a valid enclosure. Rotation angles in this crate come from
//! atan2-like constructions and stay within [-π, π].

use super::Interval;

const MAX_ARG: f64 = 16.0;

/// Enclosure of sin over a point argument: Σ (-1)^k x^(2k+1)/(2k+1)! ± R.
fn sin_point(x: f64) -> Interval {
    let xi = Interval::point(x);
    let x2 = xi.square();
    let mut term = xi;
    let mut sum = xi;
    let mut k = 1u32;
    loop {
        // term_{k} = term_{k-1} * (-x²) / ((2k)(2k+1))
        let denom = Interval::point((2 * k) as f64 * (2 * k + 1) as f64);
        term = (term * -x2).try_div(&denom).expect("positive denominator");
        sum = sum + term;
        k += 1;
        // Lagrange remainder bound: |x|^(2k+1)/(2k+1)!
        let bound = term.mag();
        if bound < 1e-19 || k > 40 {
            return sum + Interval::new(-bound, bound);
        }
    }
}

fn cos_point(x: f64) -> Interval {
    let x2 = Interval::point(x).square();
    let mut term = Interval::ONE;
    let mut sum = Interval::ONE;
    let mut k = 1u32;
    loop {
        let denom = Interval::point((2 * k - 1) as f64 * (2 * k) as f64);
        term = (term * -x2).try_div(&denom).expect("positive denominator");
        sum = sum + term;
        k += 1;
        let bound = term.mag();
        if bound < 1e-19 || k > 40 {
            return sum + Interval::new(-bound, bound);
        }
    }
}

fn clamp_unit(x: Interval) -> Interval {
    x.intersection(&Interval::new(-1.0, 1.0))
        .unwrap_or(Interval::new(-1.0, 1.0))
}

impl Interval {
    /// Rigorous enclosure of sin over the interval.
    pub fn sin(&self) -> Interval {
        if self.mag() > MAX_ARG {
            return Interval::new(-1.0, 1.0);
        }
        let r = self.rad();
        clamp_unit(sin_point(self.mid()).inflate(r))
    }

    /// Rigorous enclosure of cos over the interval.
    pub fn cos(&self) -> Interval {
        if self.mag() > MAX_ARG {
            return Interval::new(-1.0, 1.0);
        }
        let r = self.rad();
        clamp_unit(cos_point(self.mid()).inflate(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sin_cos_contain_libm_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31337);
        for _ in 0..20_000 {
            let a = rng.gen_range(-12.0..12.0);
            let w = rng.gen_range(0.0..0.3);
            let x = Interval::new(a, a + w);
            let t = rng.gen_range(a..=a + w.max(1e-300));
            // libm sin is within a couple of ulps of the true value, so a
            // tiny tolerance isolates the check from libm's own error.
            let (s, c) = (x.sin(), x.cos());
            assert!(s.inflate(1e-12).contains(t.sin()), "sin {x:?} at {t}");
            assert!(c.inflate(1e-12).contains(t.cos()), "cos {x:?} at {t}");
        }
    }

    #[test]
    fn special_values() {
        assert!(Interval::point(0.0).sin().contains(0.0));
        assert!(Interval::point(0.0).cos().contains(1.0));
        // sin over an enclosure of π contains 0; cos contains -1
        assert!(Interval::PI.sin().contains(0.0));
        assert!(Interval::PI.cos().contains(-1.0));
        assert!(Interval::FRAC_PI_2.sin().contains(1.0));
        assert!(Interval::FRAC_PI_2.cos().contains(0.0));
        // width of sin around a point stays tiny
        assert!(Interval::point(1.0).sin().width() < 1e-13);
    }

    #[test]
    fn wide_argument_falls_back() {
        let x = Interval::new(-100.0, 100.0);
        assert_eq!(x.sin(), Interval::new(-1.0, 1.0));
    }
}
