//! The testing stage: merge certified solutions into equivalence classes
//! and label their shapes.
//!
//! Classes are counted under rotations about the origin with body labels
//! fixed, matching the convention behind the collinear count n!/2: under
//! SO(2) mirror images stay distinct, under SO(3) planar mirror pairs
//! merge (the flip is a rotation in space). Runs restricted by symmetry
//! find one representative per orbit of the equal-mass permutation group;
//! the labeled class count is recovered through orbit sizes
//! (|G| / |stabilizer|), never by a floating "distance threshold": two
//! solutions are identified only when an explicit rotation (and allowed
//! permutation) maps one refined enclosure onto the other with overlap.

use crate::interval::Interval;
use crate::model::{Dim, Masses};
use crate::search::CertifiedSolution;
use crate::search::Planarity;
use serde::Serialize;

/// Group under which solutions are identified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassGroup {
    /// Planar counting: rotations only, reflections distinct.
    SO2,
    /// Spatial counting: mirror images of planar configurations merge.
    SO3,
}

/// Shape labels of a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    Collinear,
    Concave,
    Convex,
    SpatialNonPlanar,
    Unresolved,
}

/// Rotation-invariant identification signature: the sorted multiset of
/// (mass pair, mutual distance enclosure) entries.
#[derive(Clone, Debug)]
pub struct Signature {
    entries: Vec<(u64, u64, Interval)>,
}

impl Signature {
    /// Conservative overlap test; a necessary condition for equivalence.
    pub fn matches(&self, other: &Signature) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| a.0 == b.0 && a.1 == b.1 && a.2.intersects(&b.2))
    }
}

/// One equivalence class of certified solutions.
#[derive(Clone, Debug)]
pub struct EquivalenceClass {
    /// Index into the input solution list.
    pub representative: usize,
    /// All input solutions merged into this class.
    pub members: Vec<usize>,
    /// Number of labeled classes in the permutation orbit of the
    /// representative: |G| / |stabilizer|.
    pub labeled_count: u64,
    pub stabilizer_size: u64,
    pub shape: Shape,
}

/// Classification of a certified solution set.
#[derive(Clone, Debug)]
pub struct Classification {
    pub classes: Vec<EquivalenceClass>,
    pub table: CountTable,
}

/// Per-shape labeled class counts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub collinear: u64,
    pub concave: u64,
    pub convex: u64,
    pub spatial: u64,
    pub unresolved: u64,
    pub total: u64,
}

impl CountTable {
    /// Planar non-collinear classes (3D table row).
    pub fn planar_noncollinear(&self) -> u64 {
        self.concave + self.convex
    }
}

// ---- positions in original labels ------------------------------------------------

fn positions_by_label(sol: &CertifiedSolution) -> Vec<Vec<Interval>> {
    let cfg = sol.configuration();
    let n = cfg.n();
    let d = cfg.dim.d();
    let mut out = vec![vec![Interval::ZERO; d]; n];
    for slot in 0..n {
        let label = sol.bx.perm[slot];
        out[label] = cfg.body(slot).to_vec();
    }
    out
}

fn apply_perm(positions: &[Vec<Interval>], sigma: &[usize]) -> Vec<Vec<Interval>> {
    // sigma maps label -> new label; the body previously labeled l is
    // re-labeled sigma[l]
    let mut out = positions.to_vec();
    for (l, pos) in positions.iter().enumerate() {
        out[sigma[l]] = pos.clone();
    }
    out
}

fn mirror_y(positions: &[Vec<Interval>]) -> Vec<Vec<Interval>> {
    positions
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q[1] = -q[1];
            q
        })
        .collect()
}

/// Signature of a solution (independent of labeling and frame).
pub fn signature(sol: &CertifiedSolution) -> Signature {
    let cfg = sol.configuration();
    let n = cfg.n();
    let mut entries = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (mi, mj) = (cfg.masses.get(i), cfg.masses.get(j));
            let key = (mi.lo().to_bits().min(mj.lo().to_bits()),
                       mi.lo().to_bits().max(mj.lo().to_bits()));
            let r = cfg.r2(i, j).sqrt().expect("nonnegative");
            entries.push((key.0, key.1, r));
        }
    }
    entries.sort_by(|a, b| {
        (a.0, a.1)
            .cmp(&(b.0, b.1))
            .then(a.2.mid().partial_cmp(&b.2.mid()).unwrap())
    });
    Signature { entries }
}

// ---- explicit rotation matching ---------------------------------------------------

fn norm2(p: &[Interval]) -> Interval {
    p.iter().map(|c| c.square()).sum()
}

/// 2D: does some rotation about the origin map `a` onto `b` (overlap)?
fn match_rotation_2d(a: &[Vec<Interval>], b: &[Vec<Interval>]) -> bool {
    // anchor: the body best separated from the origin in both
    let mut anchor = None;
    let mut best = 0.0f64;
    for i in 0..a.len() {
        let lo = norm2(&a[i]).lo().min(norm2(&b[i]).lo());
        if lo > best {
            best = lo;
            anchor = Some(i);
        }
    }
    let Some(k) = anchor else { return false };
    let ra2 = norm2(&a[k]);
    let rb2 = norm2(&b[k]);
    let rr = (ra2 * rb2).sqrt().expect("positive");
    // rotation taking the direction of a_k to the direction of b_k
    let c = (a[k][0] * b[k][0] + a[k][1] * b[k][1]).try_div(&rr);
    let s = (a[k][0] * b[k][1] - a[k][1] * b[k][0]).try_div(&rr);
    let (Ok(c), Ok(s)) = (c, s) else { return false };
    a.iter().zip(b.iter()).all(|(p, q)| {
        let rx = c * p[0] - s * p[1];
        let ry = s * p[0] + c * p[1];
        rx.intersects(&q[0]) && ry.intersects(&q[1])
    })
}

/// Orthonormal interval frame from two positions; fails near-degenerate.
fn frame_3d(p1: &[Interval], p2: &[Interval]) -> Option<[Vec<Interval>; 3]> {
    let n1 = norm2(p1);
    if n1.lo() <= 0.0 {
        return None;
    }
    let r1 = n1.sqrt().ok()?;
    let e1: Vec<Interval> = p1.iter().map(|c| c.try_div(&r1).unwrap()).collect();
    let dot: Interval = (0..3).map(|c| p2[c] * e1[c]).sum();
    let u: Vec<Interval> = (0..3).map(|c| p2[c] - dot * e1[c]).collect();
    let nu = norm2(&u);
    if nu.lo() <= 0.0 {
        return None;
    }
    let ru = nu.sqrt().ok()?;
    let e2: Vec<Interval> = u.iter().map(|c| c.try_div(&ru).unwrap()).collect();
    let e3 = vec![
        e1[1] * e2[2] - e1[2] * e2[1],
        e1[2] * e2[0] - e1[0] * e2[2],
        e1[0] * e2[1] - e1[1] * e2[0],
    ];
    Some([e1, e2, e3])
}

/// 3D: does some rotation map `a` onto `b`? Anchored on the two bodies
/// best separated from the origin / the first anchor's axis.
fn match_rotation_3d(a: &[Vec<Interval>], b: &[Vec<Interval>]) -> bool {
    let n = a.len();
    let mut k1 = None;
    let mut best = 0.0f64;
    for i in 0..n {
        let lo = norm2(&a[i]).lo().min(norm2(&b[i]).lo());
        if lo > best {
            best = lo;
            k1 = Some(i);
        }
    }
    let Some(k1) = k1 else { return false };
    // second anchor: maximal transverse distance from the k1 axis in `a`
    let mut k2 = None;
    let mut best2 = 0.0f64;
    let n1 = norm2(&a[k1]);
    for i in 0..n {
        if i == k1 {
            continue;
        }
        let dot: Interval = (0..3).map(|c| a[i][c] * a[k1][c]).sum();
        let t2 = norm2(&a[i]) - dot.square().try_div(&n1).unwrap();
        if t2.lo() > best2 {
            best2 = t2.lo();
            k2 = Some(i);
        }
    }
    let Some(k2) = k2 else {
        return match_collinear_3d(a, b);
    };
    let (Some(fa), Some(fb)) = (frame_3d(&a[k1], &a[k2]), frame_3d(&b[k1], &b[k2])) else {
        return false;
    };
    // R = Fb^T-composed frame change: coordinates of each a_i in frame a,
    // re-expressed in frame b
    a.iter().zip(b.iter()).all(|(p, q)| {
        let coeffs: Vec<Interval> = (0..3)
            .map(|k| (0..3).map(|c| p[c] * fa[k][c]).sum())
            .collect();
        (0..3).all(|c| {
            let img: Interval = (0..3).map(|k| coeffs[k] * fb[k][c]).sum();
            img.intersects(&q[c])
        })
    })
}

/// Collinear 3D solutions: both lie on a line through the origin; match
/// the signed positions along it, allowing the orientation flip.
fn match_collinear_3d(a: &[Vec<Interval>], b: &[Vec<Interval>]) -> bool {
    // direction anchors: the farthest body defines the line
    let mut k = 0;
    let mut best = -1.0;
    for i in 0..a.len() {
        let lo = norm2(&a[i]).lo().min(norm2(&b[i]).lo());
        if lo > best {
            best = lo;
            k = i;
        }
    }
    if best <= 0.0 {
        return false;
    }
    let ra = norm2(&a[k]).sqrt().expect("positive");
    let rb = norm2(&b[k]).sqrt().expect("positive");
    let sa: Vec<Interval> = a
        .iter()
        .map(|p| ((0..3).map(|c| p[c] * a[k][c]).sum::<Interval>()).try_div(&ra).unwrap())
        .collect();
    let sb: Vec<Interval> = b
        .iter()
        .map(|p| ((0..3).map(|c| p[c] * b[k][c]).sum::<Interval>()).try_div(&rb).unwrap())
        .collect();
    let direct = sa.iter().zip(sb.iter()).all(|(x, y)| x.intersects(y));
    let flipped = sa.iter().zip(sb.iter()).all(|(x, y)| (-*x).intersects(y));
    direct || flipped
}

fn match_frames(a: &[Vec<Interval>], b: &[Vec<Interval>], dim: Dim, group: ClassGroup) -> bool {
    match dim {
        Dim::Two => {
            if match_rotation_2d(a, b) {
                return true;
            }
            if group == ClassGroup::SO3 {
                // in space the planar mirror is a rotation
                return match_rotation_2d(&mirror_y(a), b);
            }
            false
        }
        Dim::Three => match_rotation_3d(a, b),
    }
}

/// Mass-preserving permutations (as label maps) of the original masses.
pub fn mass_preserving_permutations(masses: &Masses) -> Vec<Vec<usize>> {
    let groups = masses.equal_groups();
    let mut perms: Vec<Vec<usize>> = vec![(0..masses.n()).collect()];
    for g in &groups {
        let g_perms = permutations_of(g);
        let mut next = Vec::with_capacity(perms.len() * g_perms.len());
        for base in &perms {
            for gp in &g_perms {
                let mut p = base.clone();
                for (slot, &dest) in g.iter().zip(gp.iter()) {
                    p[*slot] = dest;
                }
                next.push(p);
            }
        }
        perms = next;
    }
    perms
}

fn permutations_of(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let rest: Vec<usize> = items
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        for mut tail in permutations_of(&rest) {
            let mut p = vec![first];
            p.append(&mut tail);
            out.push(p);
        }
    }
    out
}

/// Explicit equivalence test between two certified solutions: some
/// allowed permutation followed by a rotation maps one onto the other.
pub fn equivalent(
    a: &CertifiedSolution,
    b: &CertifiedSolution,
    original_masses: &Masses,
    group: ClassGroup,
) -> bool {
    let dim = a.bx.dim;
    if dim != b.bx.dim {
        return false;
    }
    let pa = positions_by_label(a);
    let pb = positions_by_label(b);
    for sigma in mass_preserving_permutations(original_masses) {
        if match_frames(&apply_perm(&pa, &sigma), &pb, dim, group) {
            return true;
        }
    }
    false
}

/// Size of the rotational stabilizer of a solution inside the
/// mass-preserving permutation group.
fn stabilizer_size(
    sol: &CertifiedSolution,
    original_masses: &Masses,
    group: ClassGroup,
) -> u64 {
    let dim = sol.bx.dim;
    let p = positions_by_label(sol);
    mass_preserving_permutations(original_masses)
        .into_iter()
        .filter(|sigma| match_frames(&apply_perm(&p, sigma), &p, dim, group))
        .count() as u64
}

// ---- shape classification -----------------------------------------------------------

/// Certified shape of a refined solution.
pub fn classify_shape(sol: &CertifiedSolution) -> Shape {
    if sol.collinear {
        return Shape::Collinear;
    }
    let cfg = sol.configuration();
    let n = cfg.n();
    match sol.bx.dim {
        Dim::Two => planar_shape(&(0..n).map(|i| [cfg.body(i)[0], cfg.body(i)[1]]).collect::<Vec<_>>()),
        Dim::Three => match sol.planarity {
            Planarity::NonPlanar => Shape::SpatialNonPlanar,
            Planarity::Planar => planar_shape(
                &(0..n).map(|i| [cfg.body(i)[0], cfg.body(i)[1]]).collect::<Vec<_>>(),
            ),
            _ => Shape::Unresolved,
        },
    }
}

/// Convex / concave via hull membership with interval margins.
fn planar_shape(pts: &[[Interval; 2]]) -> Shape {
    let n = pts.len();
    let mids: Vec<(f64, f64)> = pts.iter().map(|p| (p[0].mid(), p[1].mid())).collect();
    let hull = convex_hull_indices(&mids);

    if hull.len() == n {
        // all bodies on the midpoint hull: certify strict convexity via
        // consecutive turns
        let ok = (0..n).all(|k| {
            let a = &pts[hull[k]];
            let b = &pts[hull[(k + 1) % n]];
            let c = &pts[hull[(k + 2) % n]];
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            cross.margin_from_zero() > 0.0 && cross.lo() > 0.0
        });
        return if ok { Shape::Convex } else { Shape::Unresolved };
    }

    // some body is off the midpoint hull: certify it strictly interior to
    // the hull of the others
    for i in 0..n {
        if hull.contains(&i) {
            continue;
        }
        let others: Vec<[Interval; 2]> = (0..n).filter(|&j| j != i).map(|j| pts[j]).collect();
        let omids: Vec<(f64, f64)> = others.iter().map(|p| (p[0].mid(), p[1].mid())).collect();
        let ohull = convex_hull_indices(&omids);
        let inside = (0..ohull.len()).all(|k| {
            let a = &others[ohull[k]];
            let b = &others[ohull[(k + 1) % ohull.len()]];
            let cross = (b[0] - a[0]) * (pts[i][1] - a[1]) - (b[1] - a[1]) * (pts[i][0] - a[0]);
            cross.lo() > 0.0
        });
        if inside {
            return Shape::Concave;
        }
    }
    Shape::Unresolved
}

/// Monotone-chain hull of midpoints, counterclockwise, general position
/// assumed only for the midpoints (certification happens on intervals).
fn convex_hull_indices(pts: &[(f64, f64)]) -> Vec<usize> {
    let n = pts.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| pts[a].partial_cmp(&pts[b]).unwrap());
    let cross =
        |o: usize, a: usize, b: usize| -> f64 {
            (pts[a].0 - pts[o].0) * (pts[b].1 - pts[o].1)
                - (pts[a].1 - pts[o].1) * (pts[b].0 - pts[o].0)
        };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], i) <= 0.0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], i) <= 0.0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

// ---- the merge ------------------------------------------------------------------------

/// Merges certified solutions into equivalence classes and counts labeled
/// classes per shape. `group` selects SO(2) or SO(3) identification.
pub fn classify(
    solutions: &[CertifiedSolution],
    original_masses: &Masses,
    group: ClassGroup,
) -> Classification {
    let n = solutions.len();
    let sigs: Vec<Signature> = solutions.iter().map(signature).collect();

    // union-find with signature pre-filter
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            if sigs[i].matches(&sigs[j])
                && equivalent(&solutions[i], &solutions[j], original_masses, group)
            {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }

    let mut members: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        members.entry(r).or_default().push(i);
    }

    // transitivity enforcement: merged members must pairwise match
    for group_members in members.values() {
        for (a, b) in group_members
            .iter()
            .zip(group_members.iter().skip(1))
        {
            debug_assert!(
                equivalent(&solutions[*a], &solutions[*b], original_masses, group),
                "union-find merged non-equivalent members"
            );
        }
    }

    let g_size = mass_preserving_permutations(original_masses).len() as u64;
    let mut classes: Vec<EquivalenceClass> = members
        .into_iter()
        .map(|(rep, mem)| {
            let stab = stabilizer_size(&solutions[rep], original_masses, group);
            let shape = classify_shape(&solutions[rep]);
            EquivalenceClass {
                representative: rep,
                members: mem,
                labeled_count: g_size / stab.max(1),
                stabilizer_size: stab,
                shape,
            }
        })
        .collect();
    classes.sort_by_key(|c| c.representative);

    let mut table = CountTable::default();
    for c in &classes {
        match c.shape {
            Shape::Collinear => table.collinear += c.labeled_count,
            Shape::Concave => table.concave += c.labeled_count,
            Shape::Convex => table.convex += c.labeled_count,
            Shape::SpatialNonPlanar => table.spatial += c.labeled_count,
            Shape::Unresolved => table.unresolved += c.labeled_count,
        }
        table.total += c.labeled_count;
    }
    Classification { classes, table }
}

/// The paper-style upper bound when only representative runs were
/// executed: Σ over equal-mass groups of |group| × (distinct classes
/// found by the group's run).
pub fn representative_upper_bound(
    runs: &[(usize, Vec<CertifiedSolution>)],
    original_masses: &Masses,
    group: ClassGroup,
    groups: &[Vec<usize>],
) -> u64 {
    let mut total = 0u64;
    for (run_index, sols) in runs {
        let grp = groups
            .iter()
            .find(|g| g.contains(run_index))
            .map(|g| g.len() as u64)
            .unwrap_or(1);
        let distinct = classify(sols, original_masses, group).classes.len() as u64;
        total += grp * distinct;
    }
    total
}
