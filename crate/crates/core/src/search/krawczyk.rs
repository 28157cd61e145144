//! Krawczyk certification of zeros of square interval systems.
//!
//! For a box X with midpoint m and a preconditioner C (the floating-point
//! inverse of the midpoint Jacobian), the operator
//!
//! ```text
//! K(X) = m - C·F(m) + (I - C·F'(X)) (X - m)
//! ```
//!
//! satisfies: every zero of F in X lies in K(X); if K(X) is contained in
//! the interior of X the system has exactly one zero in X; if K(X) and X
//! are disjoint there is no zero in X.

use crate::interval::{invert_midpoint, IntervalMatrix, IntervalVector};
use crate::Result;

/// A square system of interval equations with an interval Jacobian.
pub trait IntervalSystem {
    fn dim(&self) -> usize;
    fn eval(&self, x: &IntervalVector) -> Result<IntervalVector>;
    fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix>;
}

/// Outcome of one Krawczyk evaluation.
#[derive(Clone, Debug)]
pub struct KrawczykStep {
    pub image: IntervalVector,
    pub verdict: KrawczykVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KrawczykVerdict {
    /// K(X) ⊂ int X: existence and uniqueness of a zero in X.
    Certified,
    /// K(X) ∩ X = ∅: no zero in X.
    Excluded,
    Undecided,
}

/// One application of the Krawczyk operator to `x`.
pub fn krawczyk_step(sys: &dyn IntervalSystem, x: &IntervalVector) -> Result<KrawczykStep> {
    let n = sys.dim();
    debug_assert_eq!(x.len(), n);
    let mid = IntervalVector::from_points(&x.mid());
    let f_mid = sys.eval(&mid)?;
    let jac = sys.jacobian(x)?;
    let c = invert_midpoint(&jac)?;
    let ci = IntervalMatrix::from_point_matrix(&c);

    let c_f = ci.mul_vec(&f_mid);
    let residual = IntervalMatrix::identity(n).sub(&ci.mul_mat(&jac));
    let dx = x - &mid;
    let spread = residual.mul_vec(&dx);
    let mut image = IntervalVector::zeros(n);
    for i in 0..n {
        image[i] = mid[i] - c_f[i] + spread[i];
    }

    let verdict = if image.interior_of(x) {
        KrawczykVerdict::Certified
    } else if !image.intersects(x) {
        KrawczykVerdict::Excluded
    } else {
        KrawczykVerdict::Undecided
    };
    Ok(KrawczykStep { image, verdict })
}

/// Result of certify-and-refine on a box.
#[derive(Clone, Debug)]
pub enum Certification {
    /// Unique zero in the (possibly inflated) box; the payload is the
    /// refined enclosure and the last Krawczyk image.
    Unique { refined: IntervalVector, image: IntervalVector },
    /// No zero in the inspected box.
    Empty,
    Inconclusive,
}

/// Certifies a box, inflating it slightly first so zeros sitting on the
/// boundary of `x` are still captured, then refines the enclosure by
/// iterating `X ← K(X) ∩ X` down to `tol`.
pub fn certify_and_refine(
    sys: &dyn IntervalSystem,
    x: &IntervalVector,
    inflation: f64,
    tol: f64,
) -> Result<Certification> {
    let inflated = IntervalVector::from_vec(
        x.iter()
            .map(|c| c.inflate(inflation * c.width() + 1e-14))
            .collect(),
    );
    let step = krawczyk_step(sys, &inflated)?;
    match step.verdict {
        KrawczykVerdict::Excluded => return Ok(Certification::Empty),
        KrawczykVerdict::Undecided => return Ok(Certification::Inconclusive),
        KrawczykVerdict::Certified => {}
    }
    let mut cur = step
        .image
        .intersection(&inflated)
        .expect("certified image intersects its box");
    let mut image = step.image;
    for _ in 0..64 {
        if cur.max_width() <= tol {
            break;
        }
        let next = krawczyk_step(sys, &cur)?;
        let narrowed = match next.image.intersection(&cur) {
            Some(nv) => nv,
            None => break,
        };
        // quadratic convergence stalls once rounding noise dominates
        if narrowed.max_width() >= cur.max_width() * 0.9 {
            image = next.image;
            cur = narrowed;
            break;
        }
        image = next.image;
        cur = narrowed;
    }
    // floor the widths so the zero stays strictly interior; secondary
    // sub-system certifications need room above their rounding noise
    let floored = IntervalVector::from_vec(
        cur.iter().map(|c| c.inflate(REFINED_WIDTH_FLOOR)).collect(),
    );
    Ok(Certification::Unique { refined: floored, image })
}

/// Half-width floor applied to refined enclosures.
const REFINED_WIDTH_FLOOR: f64 = 1e-13;
