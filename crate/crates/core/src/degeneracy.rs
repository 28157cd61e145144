//! Detection and repair of reduced-system degeneracies.
//!
//! A non-degenerate central configuration can still be a degenerate zero
//! of a particular reduced system when the normalization is unlucky: the
//! OX-pinned body sits at the origin or shares its x-coordinate with the
//! eliminated body, or (in 3D) the OXY-pinned body lies on the OX-axis,
//! the three special bodies have collinear OXY-projections, or the
//! collinear z-block loses rank. Each condition is tested on intervals
//! with a margin δ; repairs re-normalize by permuting bodies and rotating
//! the frame so that every configuration in the input box keeps a
//! congruent representative in the output box. Output boxes grow: that is
//! the wrapping effect of rotating axis-aligned boxes.
//!
//! Alignment rotations are built directly from coordinate enclosures
//! (`cos = x/r`, `sin = y/r`), so the pinned coordinates of the output
//! are exact zeros and no trigonometric evaluation is involved. The
//! public [`rotate_enclosure`] operation, in contrast, takes an interval
//! angle.

use crate::interval::{Interval, IntervalMatrix};
use crate::model::{rs_coords, Dim, Masses, ReducedBox};
use crate::{Error, Result};

/// Which coordinate axis a rotation spins around.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Interval margins of each degeneracy condition; a flag is raised when
/// the corresponding quantity fails to exclude zero by at least δ.
#[derive(Clone, Debug, Default)]
pub struct DegeneracyReport {
    /// x of the OX-pinned body near 0.
    pub d1_x_near_zero: bool,
    /// x of the OX-pinned body near x of the eliminated body.
    pub d2_x_near_xn: bool,
    /// 3D: y of the OXY-pinned body near 0 (non-collinear boxes only).
    pub d3_y_near_zero: bool,
    /// 3D: projection determinant of the three special bodies near 0.
    pub d4_det_near_zero: bool,
    /// 3D, collinear candidates: det of the z-block of D RS near 0.
    pub d5_z_block_det_near_zero: bool,
    /// The box looks collinear (all transverse coordinates contain 0).
    pub collinear_candidate: bool,
    pub margins: Margins,
    pub delta: f64,
}

/// Certified distance of each degeneracy quantity from zero.
#[derive(Clone, Debug, Default)]
pub struct Margins {
    pub x_pinned: f64,
    pub x_diff: f64,
    pub y_plane: f64,
    pub proj_det: f64,
    pub z_block_det: f64,
}

impl DegeneracyReport {
    pub fn any(&self) -> bool {
        self.d1_x_near_zero
            || self.d2_x_near_xn
            || self.d3_y_near_zero
            || self.d4_det_near_zero
            || self.d5_z_block_det_near_zero
    }
}

/// Default margin: shrinking boxes eventually either clear a condition or
/// trigger its repair.
pub fn default_delta(bx: &ReducedBox) -> f64 {
    10.0 * bx.max_width() + 1e-12
}

/// Cofactor determinant enclosure for small interval matrices.
pub fn det_enclosure(m: &IntervalMatrix) -> Interval {
    let n = m.rows();
    assert_eq!(n, m.cols());
    match n {
        0 => Interval::ONE,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => {
            let mut acc = Interval::ZERO;
            for j in 0..n {
                let mut minor = IntervalMatrix::zeros(n - 1, n - 1);
                for r in 1..n {
                    let mut cc = 0;
                    for c in 0..n {
                        if c == j {
                            continue;
                        }
                        minor[(r - 1, cc)] = m[(r, c)];
                        cc += 1;
                    }
                }
                let term = m[(0, j)] * det_enclosure(&minor);
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// z-block of the reduced-system Jacobian (3D): the sub-matrix over the
/// free z-coordinates. Size (n-3)×(n-3).
pub fn z_block(bx: &ReducedBox) -> Result<IntervalMatrix> {
    assert_eq!(bx.dim, Dim::Three);
    let jac = crate::model::jacobian_rs(bx)?;
    let coords = rs_coords(bx.dim, bx.n());
    let zidx: Vec<usize> = coords
        .iter()
        .enumerate()
        .filter(|&(_, &(_, c))| c == 2)
        .map(|(k, _)| k)
        .collect();
    let mut out = IntervalMatrix::zeros(zidx.len(), zidx.len());
    for (r, &i) in zidx.iter().enumerate() {
        for (c, &j) in zidx.iter().enumerate() {
            out[(r, c)] = jac[(i, j)];
        }
    }
    Ok(out)
}

/// Evaluates the degeneracy conditions over a box with margin δ.
pub fn check_degeneracy(bx: &ReducedBox, delta: f64) -> DegeneracyReport {
    let n = bx.n();
    let d = bx.dim.d();
    let mut rep = DegeneracyReport { delta, ..Default::default() };

    let x_pinned = bx.x_pinned();
    rep.margins.x_pinned = x_pinned.margin_from_zero();
    rep.d1_x_near_zero = rep.margins.x_pinned < delta;

    let cfg = bx.configuration();
    let xn = cfg.body(n - 1)[0];
    rep.margins.x_diff = (x_pinned - xn).margin_from_zero();
    rep.d2_x_near_xn = rep.margins.x_diff < delta;

    if bx.dim == Dim::Three {
        let reduced = bx.reduced_positions();
        rep.collinear_candidate = (0..n - 1)
            .all(|i| (1..d).all(|c| reduced[i * d + c].contains_zero()))
            && (1..d).all(|c| cfg.body(n - 1)[c].contains_zero());

        let y_plane = reduced[(n - 3) * d + 1];
        rep.margins.y_plane = y_plane.margin_from_zero();

        // det [[y_oxy - y_n, y_ox - y_n], [x_oxy - x_n, x_ox - x_n]] with
        // y_ox pinned to zero
        let yn = cfg.body(n - 1)[1];
        let det = (y_plane - yn) * (x_pinned - xn) - (-yn) * (reduced[(n - 3) * d] - xn);
        rep.margins.proj_det = det.margin_from_zero();

        if rep.collinear_candidate {
            if let Ok(zb) = z_block(bx) {
                rep.margins.z_block_det = det_enclosure(&zb).margin_from_zero();
                rep.d5_z_block_det_near_zero = rep.margins.z_block_det < delta;
            }
        } else {
            rep.d3_y_near_zero = rep.margins.y_plane < delta;
            rep.d4_det_near_zero = rep.margins.proj_det < delta;
        }
    }
    rep
}

// ---- rotations ----------------------------------------------------------------

/// Rigorous enclosure of rotating position enclosures by an interval
/// angle about `axis` (2D rotations use `Axis::Z`).
pub fn rotate_enclosure(
    positions: &[Interval],
    dim: Dim,
    axis: Axis,
    angle: Interval,
) -> Vec<Interval> {
    rotate_with(positions, dim, axis, angle.cos(), angle.sin())
}

/// Rotation by explicit (cos, sin) enclosures. For alignment rotations
/// the pair comes from coordinate ratios, so cos²+sin² = 1 holds for each
/// point selection even though the enclosures cannot express it.
fn rotate_with(
    positions: &[Interval],
    dim: Dim,
    axis: Axis,
    c: Interval,
    s: Interval,
) -> Vec<Interval> {
    let d = dim.d();
    let n = positions.len() / d;
    let mut out = positions.to_vec();
    let (ia, ib) = match (dim, axis) {
        (Dim::Two, _) | (Dim::Three, Axis::Z) => (0, 1),
        (Dim::Three, Axis::X) => (1, 2),
        (Dim::Three, Axis::Y) => (2, 0),
    };
    for i in 0..n {
        let a = positions[i * d + ia];
        let b = positions[i * d + ib];
        out[i * d + ia] = c * a - s * b;
        out[i * d + ib] = s * a + c * b;
    }
    out
}

/// (cos, sin) of an angle t with cos t = a/r and sin t = b/r, r = |(a,b)|.
/// Fails when the enclosure of r² reaches zero.
fn align_cos_sin(a: Interval, b: Interval) -> Result<(Interval, Interval)> {
    let r2 = a.square() + b.square();
    if r2.lo() <= 0.0 {
        return Err(Error::NoRepairAvailable);
    }
    let r = r2.sqrt().expect("positive");
    Ok((a.try_div(&r).unwrap(), b.try_div(&r).unwrap()))
}

/// Enclosure of all rotations about OX by arbitrary angles: each body's
/// transverse coordinates are replaced by the disc hull, and the target
/// body's z is exactly zero in some rotation of every configuration.
fn arbitrary_x_rotation(positions: &[Interval], n: usize) -> Vec<Interval> {
    let d = 3;
    let mut out = positions.to_vec();
    for i in 0..n {
        let rho2 = positions[i * d + 1].square() + positions[i * d + 2].square();
        let rho = rho2.sqrt().expect("nonnegative").hi();
        out[i * d + 1] = Interval::new(-rho, rho);
        out[i * d + 2] = Interval::new(-rho, rho);
    }
    out
}

// ---- renormalization ------------------------------------------------------------

/// Builds a `ReducedBox` from full position enclosures given in slot
/// order, pinning the normalization coordinates to exact zero. The pinned
/// enclosures must already contain zero.
fn reduced_from_positions(
    dim: Dim,
    masses: Masses,
    positions: &[Interval],
    perm: Vec<usize>,
) -> Result<ReducedBox> {
    let n = masses.n();
    let d = dim.d();
    let pins: &[(usize, usize)] = match dim {
        Dim::Two => &[(n - 2, 1)],
        Dim::Three => &[(n - 2, 1), (n - 2, 2), (n - 3, 2)],
    };
    for &(slot, c) in pins {
        if !positions[slot * d + c].contains_zero() {
            return Err(Error::Precondition("pinned coordinate does not contain zero"));
        }
    }
    let free: Vec<Interval> = rs_coords(dim, n)
        .iter()
        .map(|&(slot, c)| positions[slot * d + c])
        .collect();
    Ok(ReducedBox::new(dim, masses, free, perm))
}

/// Re-normalizes a box: the body currently in slot `ox_cur` is rotated
/// onto the positive OX-axis and moved to the OX slot, `oxy_cur` (3D)
/// goes to the OXY slot, and `el_cur` becomes the eliminated body. Slots
/// refer to the box's current labeling; remaining bodies keep their
/// relative order. Every configuration in the input box has a congruent
/// image in the output box.
pub fn renormalize_to(
    bx: &ReducedBox,
    ox_cur: usize,
    oxy_cur: Option<usize>,
    el_cur: usize,
) -> Result<ReducedBox> {
    let n = bx.n();
    let d = bx.dim.d();
    if ox_cur == el_cur || oxy_cur == Some(ox_cur) || oxy_cur == Some(el_cur) {
        return Err(Error::Precondition("normalization slots must be distinct"));
    }
    if bx.dim == Dim::Three && oxy_cur.is_none() {
        return Err(Error::Precondition("3D normalization needs an OXY body"));
    }

    // new slot order: ordinary bodies in increasing old order, then the
    // OXY body (3D), the OX body, and the eliminated body
    let special = [oxy_cur.unwrap_or(usize::MAX), ox_cur, el_cur];
    let mut order: Vec<usize> = (0..n).filter(|s| !special.contains(s)).collect();
    if let Some(o) = oxy_cur {
        order.push(o);
    }
    order.push(ox_cur);
    order.push(el_cur);
    debug_assert_eq!(order.len(), n);

    let cfg = bx.configuration();
    let mut positions: Vec<Interval> = Vec::with_capacity(n * d);
    for &old in &order {
        positions.extend_from_slice(cfg.body(old));
    }
    let masses = bx.masses.permuted(&order);
    let perm: Vec<usize> = order.iter().map(|&old| bx.perm[old]).collect();

    // rotate the OX body (now in slot n-2) onto the positive OX-axis
    let ox = n - 2;
    match bx.dim {
        Dim::Two => {
            let (x, y) = (positions[ox * d], positions[ox * d + 1]);
            let (c, s) = align_cos_sin(x, y)?;
            positions = rotate_with(&positions, bx.dim, Axis::Z, c, -s);
        }
        Dim::Three => {
            let (x, y) = (positions[ox * d], positions[ox * d + 1]);
            let rxy2 = x.square() + y.square();
            if rxy2.lo() > 0.0 {
                let (c, s) = align_cos_sin(x, y)?;
                positions = rotate_with(&positions, bx.dim, Axis::Z, c, -s);
            } else if !(y.is_point() && y.lo() == 0.0) {
                // body may sit on the OZ-axis; no rotation about OZ can be
                // anchored, so give up unless y is already exactly zero
                return Err(Error::NoRepairAvailable);
            }
            let (x1, z1) = (positions[ox * d], positions[ox * d + 2]);
            let (c2, s2) = align_cos_sin(x1, z1)?;
            positions = rotate_with(&positions, bx.dim, Axis::Y, c2, s2);
        }
    }
    positions[ox * d + 1] = Interval::ZERO;
    if d == 3 {
        positions[ox * d + 2] = Interval::ZERO;
    }

    // 3D: rotate about OX so the OXY body's z vanishes
    if bx.dim == Dim::Three {
        let oxy = n - 3;
        let (y, z) = (positions[oxy * d + 1], positions[oxy * d + 2]);
        match align_cos_sin(y, z) {
            Ok((c, s)) => {
                positions = rotate_with(&positions, bx.dim, Axis::X, c, -s);
            }
            Err(_) => {
                // near-axis body: admit every rotation about OX
                positions = arbitrary_x_rotation(&positions, n);
            }
        }
        positions[oxy * d + 2] = Interval::ZERO;
    }

    reduced_from_positions(bx.dim, masses, &positions, perm)
}

/// Slot holding the body farthest from the origin (largest guaranteed
/// |q|²; deterministic tie-break by slot index).
fn farthest_slot(bx: &ReducedBox) -> usize {
    let cfg = bx.configuration();
    let mut best = 0usize;
    let mut best_lo = -1.0f64;
    for i in 0..bx.n() {
        let lo = cfg.norm2(i).lo();
        if lo > best_lo {
            best_lo = lo;
            best = i;
        }
    }
    best
}

/// Slot (≠ `ox`, ≠ eliminated) with the largest guaranteed distance from
/// the line through the origin and the `ox` body; `None` when no body
/// certainly leaves that line.
fn farthest_from_axis_through(bx: &ReducedBox, ox: usize) -> Option<usize> {
    let cfg = bx.configuration();
    let d = bx.dim.d();
    let axis_norm2 = cfg.norm2(ox);
    if axis_norm2.lo() <= 0.0 {
        return None;
    }
    let mut best: Option<(usize, f64)> = None;
    for i in 0..bx.n() - 1 {
        if i == ox {
            continue;
        }
        let dot: Interval = (0..d).map(|c| cfg.body(i)[c] * cfg.body(ox)[c]).sum();
        let t2 = cfg.norm2(i) - dot.square().try_div(&axis_norm2).unwrap();
        let lo = t2.lo();
        if lo > 0.0 && best.map_or(true, |(_, b)| lo > b) {
            best = Some((i, lo));
        }
    }
    best.map(|(i, _)| i)
}

/// An ordinary slot whose OXY-projection certainly misses the line
/// through the projections of the OX and OXY bodies.
fn off_projection_line_slot(bx: &ReducedBox) -> Option<usize> {
    let n = bx.n();
    let cfg = bx.configuration();
    let (ax, ay) = (cfg.body(n - 2)[0], cfg.body(n - 2)[1]);
    let (bxx, by) = (cfg.body(n - 3)[0], cfg.body(n - 3)[1]);
    let (ux, uy) = (bxx - ax, by - ay);
    let mut best: Option<(usize, f64)> = None;
    for i in 0..n - 3 {
        let (px, py) = (cfg.body(i)[0], cfg.body(i)[1]);
        let cross = (px - ax) * uy - (py - ay) * ux;
        let lo = cross.margin_from_zero();
        if lo > 0.0 && best.map_or(true, |(_, b)| lo > b) {
            best = Some((i, lo));
        }
    }
    best.map(|(i, _)| i)
}

/// Repairs a degenerate normalization per the flags in `report`: selects
/// a new OX body (farthest from the origin), a new OXY body, or a new
/// eliminated body, following which condition fired. Returns the
/// re-normalized box, or `NoRepairAvailable` when every allowed
/// permutation still trips a flag; the caller bisects then.
pub fn renormalize(bx: &ReducedBox, report: &DegeneracyReport) -> Result<ReducedBox> {
    let n = bx.n();
    if report.d1_x_near_zero || report.d2_x_near_xn {
        let far = farthest_slot(bx);
        let el = if far == n - 1 { n - 2 } else { n - 1 };
        return match bx.dim {
            Dim::Two => renormalize_to(bx, far, None, el),
            Dim::Three => {
                let oxy = farthest_from_axis_through(bx, far)
                    .filter(|&s| s != el)
                    .or_else(|| (0..n).find(|&s| s != far && s != el))
                    .ok_or(Error::NoRepairAvailable)?;
                renormalize_to(bx, far, Some(oxy), el)
            }
        };
    }
    if report.d3_y_near_zero {
        let oxy =
            farthest_from_axis_through(bx, n - 2).ok_or(Error::NoRepairAvailable)?;
        return renormalize_to(bx, n - 2, Some(oxy), n - 1);
    }
    if report.d4_det_near_zero {
        let cand = off_projection_line_slot(bx).ok_or(Error::NoRepairAvailable)?;
        return renormalize_to(bx, n - 2, Some(n - 3), cand);
    }
    if report.d5_z_block_det_near_zero {
        for cand in 0..n - 2 {
            if cand == n - 3 {
                continue;
            }
            if let Ok(repaired) = renormalize_to(bx, n - 2, Some(cand), n - 1) {
                let rep = check_degeneracy(&repaired, report.delta);
                if !rep.d5_z_block_det_near_zero {
                    return Ok(repaired);
                }
            }
        }
        return Err(Error::NoRepairAvailable);
    }
    Err(Error::Precondition("renormalize called without any flag set"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_rs;

    fn equilateral_box() -> ReducedBox {
        let m = Masses::from_points(&[1.0 / 3.0; 3]).unwrap();
        let r = 1.0 / 3f64.sqrt();
        let t = 120f64.to_radians();
        let free = vec![
            Interval::point(r * t.cos()),
            Interval::point(r * t.sin()),
            Interval::point(r),
        ];
        ReducedBox::identity_perm(Dim::Two, m, free)
    }

    #[test]
    fn no_flags_on_healthy_box() {
        let bx = equilateral_box();
        let rep = check_degeneracy(&bx, default_delta(&bx));
        assert!(!rep.any(), "{rep:?}");
    }

    #[test]
    fn d1_fires_when_pinned_body_at_origin() {
        let m = Masses::from_points(&[0.4, 0.3, 0.3]).unwrap();
        let free = vec![
            Interval::point(0.7),
            Interval::point(0.4),
            Interval::point(0.0),
        ];
        let bx = ReducedBox::identity_perm(Dim::Two, m, free);
        let rep = check_degeneracy(&bx, 1e-6);
        assert!(rep.d1_x_near_zero);
    }

    #[test]
    fn rotation_enclosure_contains_sampled_rotations() {
        let pts = vec![Interval::point(1.0), Interval::point(0.0)];
        let rot = rotate_enclosure(&pts, Dim::Two, Axis::Z, Interval::FRAC_PI_2);
        assert!(rot[0].contains(0.0), "{rot:?}");
        assert!(rot[1].contains(1.0), "{rot:?}");
        // quarter arc: angle [0, π/2] covers the corner values
        let arc = rotate_enclosure(
            &pts,
            Dim::Two,
            Axis::Z,
            Interval::new(0.0, Interval::FRAC_PI_2.hi()),
        );
        for t in [0.0, 0.3, 0.7, 1.0, 1.5, std::f64::consts::FRAC_PI_2] {
            assert!(arc[0].contains(t.cos()) && arc[1].contains(t.sin()), "t={t}");
        }
        let id = rotate_enclosure(&pts, Dim::Two, Axis::Z, Interval::ZERO);
        assert!(id[0].contains(1.0) && id[0].width() < 1e-14);
    }

    #[test]
    fn repair_moves_farthest_body_onto_ox() {
        let m = Masses::from_points(&[0.5, 0.3, 0.2]).unwrap();
        // OX slot body essentially at the origin -> D1
        let free = vec![
            Interval::point(0.9),
            Interval::point(0.2),
            Interval::point(1e-14),
        ];
        let bx = ReducedBox::identity_perm(Dim::Two, m, free);
        let rep = check_degeneracy(&bx, 1e-6);
        assert!(rep.d1_x_near_zero);
        let fixed = renormalize(&bx, &rep).unwrap();
        assert!(fixed.x_pinned().lo() > 0.5);
        let rep2 = check_degeneracy(&fixed, 1e-9);
        assert!(!rep2.d1_x_near_zero && !rep2.d2_x_near_xn, "{rep2:?}");
    }

    #[test]
    fn renormalize_keeps_rs_zero() {
        // re-pin the equilateral onto a different body; the rotated box
        // still encloses the (relabeled) solution
        let bx = equilateral_box();
        let moved = renormalize_to(&bx, 0, None, 2).unwrap();
        let rs = eval_rs(&moved).unwrap();
        for k in 0..rs.len() {
            assert!(rs[k].inflate(1e-10).contains_zero(), "rs[{k}] = {:?}", rs[k]);
        }
        assert_eq!(moved.perm.len(), 3);
        assert!(moved.x_pinned().lo() > 0.0);
    }

    #[test]
    fn renormalize_3d_alignment() {
        // a 4-body 3D point box; re-normalize onto body 0 and check pins
        let m = Masses::from_points(&[0.3, 0.3, 0.2, 0.2]).unwrap();
        let free = vec![
            Interval::point(0.4),  // slot0 x,y,z
            Interval::point(-0.3),
            Interval::point(0.5),
            Interval::point(0.8), // slot1 (OXY) x, y
            Interval::point(0.6),
            Interval::point(0.9), // slot2 (OX) x
        ];
        let bx = ReducedBox::identity_perm(Dim::Three, m, free);
        let out = renormalize_to(&bx, 0, Some(1), 3).unwrap();
        // the new OX body is the old slot 0: |q| = sqrt(.16+.09+.25)
        let r = (0.4f64 * 0.4 + 0.09 + 0.25).sqrt();
        assert!(out.x_pinned().contains(r), "{:?} vs {r}", out.x_pinned());
        // rigid motion preserves pairwise distances: spot-check one pair
        let before = bx.configuration();
        let after = out.configuration();
        let d_before = before.r2(0, 1);
        let d_after = after.r2(bx_to_out_slot(0), bx_to_out_slot(1));
        assert!(d_before.intersects(&d_after));

        fn bx_to_out_slot(_old: usize) -> usize {
            // order built by renormalize_to: ordinary slots ascending (2),
            // then OXY (1), OX (0), eliminated (3)
            // old 2 -> 0, old 1 -> 1, old 0 -> 2, old 3 -> 3
            match _old {
                2 => 0,
                1 => 1,
                0 => 2,
                _ => 3,
            }
        }
    }
}
