//! Interval-system adapters: the reduced system over a box's free
//! coordinates, and the 1D collinear subsystem used to certify collinear
//! solutions and planarity claims.

use super::krawczyk::IntervalSystem;
use crate::interval::{Interval, IntervalMatrix, IntervalVector};
use crate::model::{eval_full_red, eval_rs, jacobian_full_red, jacobian_rs, Dim, Masses, ReducedBox};
use crate::Result;

/// The reduced system as a function of the free coordinate vector; the
/// template supplies dimension, masses and permutation.
pub struct RsSystem {
    template: ReducedBox,
}

impl RsSystem {
    pub fn new(template: ReducedBox) -> RsSystem {
        RsSystem { template }
    }

    pub fn boxed(&self, x: &IntervalVector) -> ReducedBox {
        self.template.with_free(x.as_slice().to_vec())
    }
}

impl IntervalSystem for RsSystem {
    fn dim(&self) -> usize {
        self.template.free().len()
    }

    fn eval(&self, x: &IntervalVector) -> Result<IntervalVector> {
        eval_rs(&self.boxed(x))
    }

    fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix> {
        jacobian_rs(&self.boxed(x))
    }
}

/// The collinear subsystem on the OX-axis: variables are the x-coordinates
/// of the first n-1 bodies, equations are the x-components of `F^red`
/// with all transverse coordinates pinned to zero. At a Moulton
/// configuration this square system is non-degenerate.
pub struct CollinearSystem {
    masses: Masses,
}

impl CollinearSystem {
    pub fn new(masses: Masses) -> CollinearSystem {
        CollinearSystem { masses }
    }

    fn reduced_positions(&self, x: &IntervalVector) -> Vec<Interval> {
        let n = self.masses.n();
        let mut pos = vec![Interval::ZERO; (n - 1) * 2];
        for i in 0..n - 1 {
            pos[i * 2] = x[i];
        }
        pos
    }
}

impl IntervalSystem for CollinearSystem {
    fn dim(&self) -> usize {
        self.masses.n() - 1
    }

    fn eval(&self, x: &IntervalVector) -> Result<IntervalVector> {
        let pos = self.reduced_positions(x);
        let f = eval_full_red(&pos, &self.masses, Dim::Two)?;
        let n = self.masses.n();
        Ok(IntervalVector::from_vec(
            (0..n - 1).map(|i| f[i * 2]).collect(),
        ))
    }

    fn jacobian(&self, x: &IntervalVector) -> Result<IntervalMatrix> {
        let pos = self.reduced_positions(x);
        let jac = jacobian_full_red(&pos, &self.masses, Dim::Two)?;
        let n = self.masses.n();
        let mut out = IntervalMatrix::zeros(n - 1, n - 1);
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                out[(i, j)] = jac[(i * 2, j * 2)];
            }
        }
        Ok(out)
    }
}

/// The planar restriction of a 3D box: the 2D reduced system over the
/// same bodies with every z pinned to zero. The free vector of the 3D box
/// minus its z-components is exactly the 2D free vector.
pub fn planar_restriction(bx: &ReducedBox) -> Option<ReducedBox> {
    if bx.dim != Dim::Three {
        return None;
    }
    let coords = bx.free_index_map();
    let free2: Vec<Interval> = coords
        .iter()
        .zip(bx.free())
        .filter(|&(&(_, c), _)| c != 2)
        .map(|(_, v)| *v)
        .collect();
    Some(ReducedBox::new(
        Dim::Two,
        bx.masses.clone(),
        free2,
        bx.perm.clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::krawczyk::{certify_and_refine, Certification};

    #[test]
    fn collinear_system_certifies_euler_equal_masses() {
        // symmetric Euler solution: x = (-a, 0) with the third body at +a,
        // a = 0.74690079109286 (frozen from an independent bisection)
        let m = Masses::from_points(&[1.0 / 3.0; 3]).unwrap();
        let sys = CollinearSystem::new(m);
        let a = 0.746_900_791_092_860_8;
        let x = IntervalVector::from_vec(vec![
            Interval::point(-a).inflate(1e-3),
            Interval::point(0.0).inflate(1e-3),
        ]);
        match certify_and_refine(&sys, &x, 0.1, 1e-13).unwrap() {
            Certification::Unique { refined, .. } => {
                assert!(refined[0].contains(-a));
                assert!(refined[1].contains(0.0));
                assert!(refined[0].width() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn planar_restriction_layout() {
        let m = Masses::from_points(&[0.25; 4]).unwrap();
        let free: Vec<Interval> = (0..6).map(|k| Interval::point(k as f64)).collect();
        let bx = ReducedBox::identity_perm(Dim::Three, m, free);
        let flat = planar_restriction(&bx).unwrap();
        // 3D free: (x0,y0,z0, x1,y1, x2) -> 2D free: (x0,y0, x1,y1, x2)
        assert_eq!(flat.free().len(), 5);
        assert_eq!(flat.free()[0], Interval::point(0.0));
        assert_eq!(flat.free()[1], Interval::point(1.0));
        assert_eq!(flat.free()[2], Interval::point(3.0));
        assert_eq!(flat.free()[3], Interval::point(4.0));
        assert_eq!(flat.free()[4], Interval::point(5.0));
    }
}
