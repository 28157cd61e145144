//! Enclosure evaluation of the central-configuration equations.
//!
//! `F_i(q) = q_i - Σ_{j≠i} m_j (q_i - q_j) / r_ij³` vanishes exactly at
//! normalized central configurations (λ = 1, center of mass at the
//! origin). `f_i = m_i (q_i - F_i(q)) + …` bookkeeping follows the same
//! convention: `f_i = Σ_{j≠i} m_i m_j (q_i - q_j)/r_ij³` and
//! `R_i = m_i F_i`. Squared distances are evaluated first and fed to the
//! `r⁻³` kernel, avoiding the cancellation of computing `r` itself.

use super::{rs_coords, Configuration, Dim, Masses, ReducedBox};
use crate::interval::{Interval, IntervalVector};
use crate::{Error, Result};

/// All pairwise `r⁻³` enclosures; index (i,j), i<j at `i*n + j`.
pub(crate) struct Kernels {
    n: usize,
    k3: Vec<Interval>,
}

impl Kernels {
    pub(crate) fn compute(dim: Dim, n: usize, positions: &[Interval]) -> Result<Kernels> {
        let d = dim.d();
        let mut k3 = vec![Interval::ZERO; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let r2: Interval = (0..d)
                    .map(|c| (positions[i * d + c] - positions[j * d + c]).square())
                    .sum();
                let k = r2.inv_r_cubed().map_err(|_| Error::CollisionPossible)?;
                k3[i * n + j] = k;
                k3[j * n + i] = k;
            }
        }
        Ok(Kernels { n, k3 })
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> Interval {
        self.k3[i * self.n + j]
    }
}

/// Pairwise kernels where they exist; `None` marks a pair whose box may
/// contain a collision.
struct PartialKernels {
    n: usize,
    k3: Vec<Option<Interval>>,
}

impl PartialKernels {
    fn compute(dim: Dim, n: usize, positions: &[Interval]) -> PartialKernels {
        let d = dim.d();
        let mut k3 = vec![None; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let r2: Interval = (0..d)
                    .map(|c| (positions[i * d + c] - positions[j * d + c]).square())
                    .sum();
                let k = r2.inv_r_cubed().ok();
                k3[i * n + j] = k;
                k3[j * n + i] = k;
            }
        }
        PartialKernels { n, k3 }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> Option<Interval> {
        self.k3[i * self.n + j]
    }

    fn body_evaluable(&self, i: usize) -> bool {
        (0..self.n).all(|j| j == i || self.k3[i * self.n + j].is_some())
    }
}

/// Reduced-system residual rows that remain evaluable on a box where some
/// pairs may collide; rows of a body whose kernels are all finite come
/// back as `Some`. A box is certainly solution-free if any evaluable row
/// excludes zero.
pub fn eval_rs_partial(bx: &ReducedBox) -> Vec<Option<Interval>> {
    let (n, d) = (bx.n(), bx.dim.d());
    let mut pos = bx.reduced_positions();
    pos.extend(qn_from_com(&pos, &bx.masses, bx.dim));
    let kernels = PartialKernels::compute(bx.dim, n, &pos);
    let rows = rs_coords(bx.dim, n);
    let mut out = vec![None; rows.len()];
    for i in 0..n - 1 {
        if !kernels.body_evaluable(i) {
            continue;
        }
        let mut g = vec![Interval::ZERO; d];
        for j in 0..n {
            if j == i {
                continue;
            }
            let k = kernels.get(i, j).expect("checked evaluable") * bx.masses.get(j);
            for c in 0..d {
                g[c] = g[c] + k * (pos[i * d + c] - pos[j * d + c]);
            }
        }
        for (row, &(slot, c)) in rows.iter().enumerate() {
            if slot == i {
                out[row] = Some(pos[i * d + c] - g[c]);
            }
        }
    }
    out
}

/// `g_i = Σ_{j≠i} m_j k_ij (q_i - q_j)`, so that `F_i = q_i - g_i`.
fn accel_terms(
    dim: Dim,
    n: usize,
    positions: &[Interval],
    masses: &Masses,
    kernels: &Kernels,
    i: usize,
) -> Vec<Interval> {
    let d = dim.d();
    let mut g = vec![Interval::ZERO; d];
    for j in 0..n {
        if j == i {
            continue;
        }
        let k = kernels.get(i, j) * masses.get(j);
        for c in 0..d {
            g[c] = g[c] + k * (positions[i * d + c] - positions[j * d + c]);
        }
    }
    g
}

/// Position of the eliminated body from the center-of-mass condition:
/// `q_n = -(1/m_n) Σ_{i<n} m_i q_i`. `reduced` holds the first n-1 bodies.
pub fn qn_from_com(reduced: &[Interval], masses: &Masses, dim: Dim) -> Vec<Interval> {
    let d = dim.d();
    let n = masses.n();
    debug_assert_eq!(reduced.len(), (n - 1) * d);
    let mn = masses.get(n - 1);
    (0..d)
        .map(|c| {
            let s: Interval = (0..n - 1).map(|i| reduced[i * d + c] * masses.get(i)).sum();
            (-s).try_div(&mn).expect("positive mass")
        })
        .collect()
}

/// Enclosure of the full system `F` (dn components, body-major).
pub fn eval_full(cfg: &Configuration) -> Result<IntervalVector> {
    let (n, d) = (cfg.n(), cfg.dim.d());
    let kernels = Kernels::compute(cfg.dim, n, cfg.positions())?;
    let mut out = Vec::with_capacity(n * d);
    for i in 0..n {
        let g = accel_terms(cfg.dim, n, cfg.positions(), &cfg.masses, &kernels, i);
        for (c, gc) in g.into_iter().enumerate() {
            out.push(cfg.body(i)[c] - gc);
        }
    }
    Ok(IntervalVector::from_vec(out))
}

/// Enclosures of the force terms `f_i = m_i m_j Σ …` per body.
pub fn eval_f(cfg: &Configuration) -> Result<Vec<Vec<Interval>>> {
    let (n, d) = (cfg.n(), cfg.dim.d());
    let kernels = Kernels::compute(cfg.dim, n, cfg.positions())?;
    Ok((0..n)
        .map(|i| {
            let g = accel_terms(cfg.dim, n, cfg.positions(), &cfg.masses, &kernels, i);
            (0..d).map(|c| g[c] * cfg.masses.get(i)).collect()
        })
        .collect())
}

/// Exterior product of two d-vectors: one component in 2D, three in 3D.
pub fn wedge(dim: Dim, u: &[Interval], v: &[Interval]) -> Vec<Interval> {
    match dim {
        Dim::Two => vec![u[0] * v[1] - u[1] * v[0]],
        Dim::Three => vec![
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ],
    }
}

/// `Σ f_i` and `Σ f_i ∧ q_i`; both enclose zero for every collision-free
/// configuration whatsoever.
pub fn eval_f_sums(cfg: &Configuration) -> Result<(Vec<Interval>, Vec<Interval>)> {
    let d = cfg.dim.d();
    let f = eval_f(cfg)?;
    let mut sum_f = vec![Interval::ZERO; d];
    let wlen = if cfg.dim == Dim::Two { 1 } else { 3 };
    let mut sum_w = vec![Interval::ZERO; wlen];
    for (i, fi) in f.iter().enumerate() {
        for c in 0..d {
            sum_f[c] = sum_f[c] + fi[c];
        }
        let w = wedge(cfg.dim, fi, cfg.body(i));
        for c in 0..wlen {
            sum_w[c] = sum_w[c] + w[c];
        }
    }
    Ok((sum_f, sum_w))
}

/// `F^red` on the first n-1 bodies: the full system with the last body
/// substituted from the center-of-mass condition.
pub fn eval_full_red(
    reduced: &[Interval],
    masses: &Masses,
    dim: Dim,
) -> Result<IntervalVector> {
    let (n, d) = (masses.n(), dim.d());
    let mut pos = reduced.to_vec();
    pos.extend(qn_from_com(reduced, masses, dim));
    let kernels = Kernels::compute(dim, n, &pos)?;
    let mut out = Vec::with_capacity((n - 1) * d);
    for i in 0..n - 1 {
        let g = accel_terms(dim, n, &pos, masses, &kernels, i);
        for (c, gc) in g.into_iter().enumerate() {
            out.push(pos[i * d + c] - gc);
        }
    }
    Ok(IntervalVector::from_vec(out))
}

/// `R^red_i = m_i F^red_i`, exposed because the collinear theory is
/// phrased for `R`.
pub fn eval_r_red(reduced: &[Interval], masses: &Masses, dim: Dim) -> Result<IntervalVector> {
    let f = eval_full_red(reduced, masses, dim)?;
    let d = dim.d();
    let out = f
        .iter()
        .enumerate()
        .map(|(k, v)| *v * masses.get(k / d))
        .collect();
    Ok(IntervalVector::from_vec(out))
}

/// The reduced-system residual over a box: `F^red` with the rows matching
/// the pinned coordinates dropped (one row in 2D, three in 3D).
pub fn eval_rs(bx: &ReducedBox) -> Result<IntervalVector> {
    let (n, d) = (bx.n(), bx.dim.d());
    let reduced = bx.reduced_positions();
    let f = eval_full_red(&reduced, &bx.masses, bx.dim)?;
    let rows = rs_coords(bx.dim, n);
    Ok(IntervalVector::from_vec(
        rows.iter().map(|&(slot, c)| f[slot * d + c]).collect(),
    ))
}

/// The angular-momentum identity of the reduced equations:
/// `Σ_{i<n} (q_i - q_n) ∧ R^red_i` encloses zero for arbitrary positions,
/// not only solutions.
pub fn com_wedge_identity(
    reduced: &[Interval],
    masses: &Masses,
    dim: Dim,
) -> Result<Vec<Interval>> {
    let (n, d) = (masses.n(), dim.d());
    let qn = qn_from_com(reduced, masses, dim);
    let r = eval_r_red(reduced, masses, dim)?;
    let wlen = if dim == Dim::Two { 1 } else { 3 };
    let mut acc = vec![Interval::ZERO; wlen];
    for i in 0..n - 1 {
        let rel: Vec<Interval> = (0..d).map(|c| reduced[i * d + c] - qn[c]).collect();
        let ri: Vec<Interval> = (0..d).map(|c| r[i * d + c]).collect();
        let w = wedge(dim, &rel, &ri);
        for c in 0..wlen {
            acc[c] = acc[c] + w[c];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equilateral(masses: &[f64]) -> Configuration {
        let m = Masses::from_points(masses).unwrap();
        let verts = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
        let cx: f64 = verts.iter().zip(masses).map(|(v, m)| v[0] * m).sum();
        let cy: f64 = verts.iter().zip(masses).map(|(v, m)| v[1] * m).sum();
        let pts: Vec<f64> = verts.iter().flat_map(|v| [v[0] - cx, v[1] - cy]).collect();
        Configuration::from_points(Dim::Two, &pts, m)
    }

    #[test]
    fn two_body_forces() {
        let m = Masses::from_points(&[0.5, 0.5]).unwrap();
        let cfg = Configuration::from_points(Dim::Two, &[-0.5, 0.0, 0.5, 0.0], m);
        let f = eval_f(&cfg).unwrap();
        // f_1 = m1 m2 (q1-q2)/r³ = (−¼, 0), f_2 = (¼, 0)
        assert!(f[0][0].contains(-0.25) && f[0][0].width() < 1e-14);
        assert!(f[0][1].contains_zero());
        assert!(f[1][0].contains(0.25));
    }

    #[test]
    fn equilateral_is_ncc_for_any_masses() {
        for masses in [[1.0 / 3.0; 3], [0.5, 0.3, 0.2]] {
            let cfg = equilateral(&masses);
            let f = eval_full(&cfg).unwrap();
            for k in 0..6 {
                // the f64 center-of-mass shift leaves a ~1e-17 offset
                assert!(
                    f[k].inflate(1e-14).contains_zero(),
                    "component {k} for {masses:?}: {:?}",
                    f[k]
                );
                assert!(f[k].width() < 1e-13);
            }
        }
    }

    #[test]
    fn scaled_equilateral_is_not() {
        let cfg0 = equilateral(&[0.4, 0.35, 0.25]);
        let scaled: Vec<Interval> = cfg0.positions().iter().map(|x| *x * 2.0).collect();
        let cfg = Configuration::new(Dim::Two, scaled, cfg0.masses.clone());
        let f = eval_full(&cfg).unwrap();
        let some_nonzero = (0..6).any(|k| !f[k].contains_zero());
        assert!(some_nonzero);
    }

    #[test]
    fn momentum_identities_hold_for_arbitrary_positions() {
        let m = Masses::from_points(&[0.3, 0.3, 0.2, 0.2]).unwrap();
        let pts = [0.3, -0.9, 1.2, 0.4, -0.8, 0.1, 0.2, 1.1];
        let cfg = Configuration::from_points(Dim::Two, &pts, m);
        let (sf, sw) = eval_f_sums(&cfg).unwrap();
        for c in &sf {
            assert!(c.contains_zero() && c.width() < 1e-12);
        }
        for c in &sw {
            assert!(c.contains_zero() && c.width() < 1e-12);
        }
    }

    #[test]
    fn com_reconstruction() {
        // equal masses, q1=(1,0), q2=(0,1) -> q3 = (-1,-1)
        let m = Masses::from_points(&[1.0 / 3.0; 3]).unwrap();
        let red: Vec<Interval> =
            [1.0, 0.0, 0.0, 1.0].iter().map(|&x| Interval::point(x)).collect();
        let q3 = qn_from_com(&red, &m, Dim::Two);
        assert!(q3[0].contains(-1.0) && q3[0].width() < 1e-14);
        assert!(q3[1].contains(-1.0));
        // n=2, m=(3/4, 1/4), q1=(1,0) -> q2=(-3,0)
        let m2 = Masses::from_points(&[0.75, 0.25]).unwrap();
        let red2: Vec<Interval> = [1.0, 0.0].iter().map(|&x| Interval::point(x)).collect();
        let q2 = qn_from_com(&red2, &m2, Dim::Two);
        assert!(q2[0].contains(-3.0) && q2[1].contains_zero());
    }

    #[test]
    fn com_wedge_identity_holds_off_solution() {
        let m = Masses::from_points(&[0.4, 0.35, 0.25]).unwrap();
        let red: Vec<Interval> =
            [0.7, 0.2, -0.3, 0.9].iter().map(|&x| Interval::point(x)).collect();
        let w = com_wedge_identity(&red, &m, Dim::Two).unwrap();
        assert!(w[0].contains_zero() && w[0].width() < 1e-12);
        // 3D
        let m3 = Masses::from_points(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let red3: Vec<Interval> = [0.7, 0.2, -0.3, 0.9, -0.5, 0.4, 0.1, -0.2, 0.8]
            .iter()
            .map(|&x| Interval::point(x))
            .collect();
        let w3 = com_wedge_identity(&red3, &m3, Dim::Three).unwrap();
        for c in &w3 {
            assert!(c.contains_zero() && c.width() < 1e-12);
        }
    }

    #[test]
    fn rs_residual_at_equilateral() {
        // equal masses, body 2 rotated to the positive OX axis
        let m = Masses::from_points(&[1.0 / 3.0; 3]).unwrap();
        let r = 1.0 / 3f64.sqrt();
        // vertices at angles 90°+120°k from the center have one body on +OX
        // after rotating by -90°: angles 0°, 120°, 240°
        let pts: Vec<f64> = [0.0f64, 120.0, 240.0]
            .iter()
            .flat_map(|a| {
                let t = a.to_radians();
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        // slots: body on OX must be slot n-2 = 1; eliminated slot 2
        let free = vec![
            Interval::point(pts[2]), // x of slot 0 (the 120° vertex)
            Interval::point(pts[3]),
            Interval::point(pts[0]), // x_{n-1} of the OX body
        ];
        let bx = ReducedBox::identity_perm(Dim::Two, m, free);
        let rs = eval_rs(&bx).unwrap();
        for k in 0..3 {
            assert!(rs[k].inflate(1e-12).contains_zero(), "rs[{k}] = {:?}", rs[k]);
        }
    }

    #[test]
    fn collision_is_reported() {
        let m = Masses::from_points(&[0.5, 0.5]).unwrap();
        let mut pos: Vec<Interval> =
            [0.0, 0.0, 0.1, 0.0].iter().map(|&x| Interval::point(x)).collect();
        pos[2] = Interval::new(-0.05, 0.1);
        let cfg = Configuration::new(Dim::Two, pos, m);
        assert!(matches!(eval_full(&cfg), Err(Error::CollisionPossible)));
    }
}
