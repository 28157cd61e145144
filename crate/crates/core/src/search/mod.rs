//! Branch-and-prune search over the a-priori-bounded reduced space.
//!
//! Every box ends as one of three outcomes: excluded (a rigorous proof
//! that it holds no admissible solution), certified (a Krawczyk proof of
//! a unique reduced-system zero, post-verified to be a normalized central
//! configuration satisfying the run's symmetry assumption), or undecided.
//! A run is conclusive exactly when nothing is left undecided.
//!
//! Each run pins one body as the farthest from the origin on the positive
//! OX-axis; for distinct masses one run per body is needed, while equal
//! masses share runs (one per group of equal-mass bodies). Within the run
//! the farthest-body assumption excludes the planar degeneracies
//! outright; the spatial ones are repaired on the fly by rotation and
//! permutation, after which symmetry-based pruning is switched off for
//! the repaired subtree (the repair changes the frame the constraints
//! were stated in).

mod checkpoint;
mod krawczyk;
mod systems;

pub use checkpoint::{job_fingerprint, CheckpointReader, CheckpointWriter, Record};
pub use krawczyk::{
    certify_and_refine, krawczyk_step, Certification, IntervalSystem, KrawczykStep,
    KrawczykVerdict,
};
pub use systems::{planar_restriction, CollinearSystem, RsSystem};

use std::collections::HashMap;
use std::sync::atomic::{AtomicI64, Ordering as AtomicOrdering};

use crate::degeneracy::{check_degeneracy, renormalize};
use crate::interval::{Interval, IntervalVector};
use crate::model::{eval_full, eval_rs_partial, Dim, Masses, ReducedBox};
use crate::Error;

/// Box width below which Krawczyk certification is attempted.
const KRAWCZYK_WIDTH_GATE: f64 = 0.5;
/// Relative inflation applied before a certification attempt, so zeros on
/// box boundaries are captured by one of the adjacent leaves.
const CERTIFY_INFLATION: f64 = 0.1;
/// Post-certification refinement tolerance.
const REFINE_TOL: f64 = 1e-12;
/// Narrowing must shrink the widest coordinate by at least this factor,
/// otherwise the box is bisected.
const NARROW_FACTOR: f64 = 0.7;
/// Repairs allowed along one path before bisection is forced.
const MAX_REPAIRS: u32 = 4;
/// Box width below which degeneracy repairs are attempted.
const REPAIR_WIDTH_GATE: f64 = 0.1;
/// Recursion depth up to which children are processed in parallel.
const PAR_DEPTH: u32 = 26;

/// Per-run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Normalized masses in the caller's labeling.
    pub masses: Masses,
    pub dim: Dim,
    /// Body pinned as the farthest on the positive OX-axis.
    pub run_index: usize,
    pub min_box_width: f64,
    pub max_boxes: u64,
    /// Additive floor of the degeneracy margin δ = 10·width + floor.
    pub delta_floor: f64,
    /// Outer half-width of the a-priori box.
    pub x_max: f64,
    /// Enable equal-mass ordering constraints inside the run.
    pub ordering_constraints: bool,
}

impl RunConfig {
    pub fn new(masses: Masses, dim: Dim, run_index: usize) -> RunConfig {
        assert!(masses.is_normalized(), "run masses must sum to 1");
        assert!(run_index < masses.n());
        RunConfig {
            masses,
            dim,
            run_index,
            min_box_width: 1e-10,
            max_boxes: u64::MAX,
            delta_floor: 1e-12,
            x_max: 2.5,
            ordering_constraints: true,
        }
    }
}

/// Why a box was excluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExclusionReason {
    /// Violates the farthest-body constraint everywhere.
    Symmetry,
    /// Violates an equal-mass ordering constraint everywhere.
    Ordering,
    /// Some pair is certainly closer than any admissible solution allows.
    Collision,
    /// The reduced-system residual excludes zero in a component.
    Residual,
    /// The Krawczyk image is disjoint from the box.
    KrawczykEmpty,
    /// A certified reduced-system zero that fails the run's symmetry
    /// assumption; its classes are found in other placements.
    OutOfSymmetry,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UndecidedReason {
    MinWidth,
    Budget,
    PostCheck,
}

/// Planarity verdict of a 3D certified solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Planarity {
    NotApplicable,
    Planar,
    NonPlanar,
    Unknown,
}

/// A reduced-system zero proven unique in its box and verified to be a
/// normalized central configuration.
#[derive(Clone, Debug)]
pub struct CertifiedSolution {
    /// Refined enclosure of the zero.
    pub bx: ReducedBox,
    /// Last Krawczyk image (strictly inside the certified box).
    pub image: IntervalVector,
    /// Certified collinearity (via the 1D subsystem).
    pub collinear: bool,
    /// Refined collinear x-coordinates when `collinear`.
    pub collinear_xs: Option<IntervalVector>,
    pub planarity: Planarity,
    pub run_index: usize,
    /// Canonical tree path of the leaf that certified it.
    pub path: String,
}

impl CertifiedSolution {
    /// Full configuration enclosure (eliminated body reconstructed).
    pub fn configuration(&self) -> crate::model::Configuration {
        self.bx.configuration()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub boxes: u64,
    pub bisections: u64,
    pub narrowings: u64,
    pub repairs: u64,
    pub repair_failures: u64,
    pub conjecture_probes: u64,
    pub excluded_symmetry: u64,
    pub excluded_ordering: u64,
    pub excluded_collision: u64,
    pub excluded_residual: u64,
    pub excluded_krawczyk: u64,
    pub out_of_symmetry: u64,
    pub certified: u64,
    pub undecided: u64,
    pub replay_hits: u64,
}

impl SearchStats {
    fn merge(mut self, o: SearchStats) -> SearchStats {
        self.boxes += o.boxes;
        self.bisections += o.bisections;
        self.narrowings += o.narrowings;
        self.repairs += o.repairs;
        self.repair_failures += o.repair_failures;
        self.conjecture_probes += o.conjecture_probes;
        self.excluded_symmetry += o.excluded_symmetry;
        self.excluded_ordering += o.excluded_ordering;
        self.excluded_collision += o.excluded_collision;
        self.excluded_residual += o.excluded_residual;
        self.excluded_krawczyk += o.excluded_krawczyk;
        self.excluded_residual += 0;
        self.out_of_symmetry += o.out_of_symmetry;
        self.certified += o.certified;
        self.undecided += o.undecided;
        self.replay_hits += o.replay_hits;
        self
    }

    pub fn excluded_total(&self) -> u64 {
        self.excluded_symmetry
            + self.excluded_ordering
            + self.excluded_collision
            + self.excluded_residual
            + self.excluded_krawczyk
            + self.out_of_symmetry
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub run_index: usize,
    pub certified: Vec<CertifiedSolution>,
    pub undecided: Vec<(ReducedBox, UndecidedReason)>,
    pub stats: SearchStats,
    /// A certified or undecided box touched the outer a-priori boundary,
    /// which invalidates the completeness claim for this run.
    pub boundary_touched: bool,
    pub budget_exhausted: bool,
}

impl SearchReport {
    /// Conclusive means finiteness is established for this run: no
    /// undecided boxes remain and the budget did not interfere.
    pub fn conclusive(&self) -> bool {
        self.undecided.is_empty() && !self.budget_exhausted && !self.boundary_touched
    }
}

/// A-priori search box for one run.
///
/// The run's body goes to the OX slot with `x ∈ [lb, x_max]`, where `lb`
/// is the rigorous farthest-body bound `(Σ_{i<j} m_i m_j / 2)^{1/3}`
/// (from `I = U` at normalized central configurations). Remaining bodies
/// keep ascending order in the ordinary slots; the largest remaining
/// label is eliminated. In 3D the OXY body's y is restricted to `y ≥ 0`
/// (a rotation by π about OX maps representatives onto this half-space).
pub fn a_priori_box(run: &RunConfig) -> ReducedBox {
    let n = run.masses.n();
    let mut rest: Vec<usize> = (0..n).filter(|&i| i != run.run_index).collect();
    let eliminated = rest.pop().expect("n >= 2");
    let mut perm = rest;
    perm.push(run.run_index);
    perm.push(eliminated);
    let masses = run.masses.permuted(&perm);

    let lb = farthest_lower_bound(&run.masses);
    let x = run.x_max;
    let coords = crate::model::rs_coords(run.dim, n);
    let free: Vec<Interval> = coords
        .iter()
        .map(|&(slot, c)| {
            if slot == n - 2 {
                Interval::new(lb, x)
            } else if run.dim == Dim::Three && slot == n - 3 && c == 1 {
                Interval::new(0.0, x)
            } else {
                Interval::new(-x, x)
            }
        })
        .collect();
    ReducedBox::new(run.dim, masses, free, perm)
}

/// Rigorous lower bound on the distance of the farthest body from the
/// origin, valid for any normalized central configuration.
pub fn farthest_lower_bound(masses: &Masses) -> f64 {
    let p = masses.pair_product_sum();
    let half = p.try_div(&Interval::point(2.0)).expect("positive");
    let mut lb = half.lo().cbrt();
    // certify lb³ ≤ P/2 by nudging down if needed
    while Interval::point(lb).powi(3).expect("cube").hi() > half.lo() {
        lb = lb.next_down();
    }
    lb.max(0.0)
}

/// Rigorous exclusion tests cheaper than a residual evaluation.
fn cheap_exclusion(
    bx: &ReducedBox,
    run: &RunConfig,
    symmetry_active: bool,
) -> Option<ExclusionReason> {
    let n = bx.n();
    let cfg = bx.configuration();
    if symmetry_active {
        let x2 = bx.x_pinned().square();
        for i in 0..n {
            if i == n - 2 {
                continue;
            }
            if cfg.norm2(i).lo() > x2.hi() {
                return Some(ExclusionReason::Symmetry);
            }
        }
        if run.ordering_constraints {
            // equal-mass ordering among ordinary slots: x ascending
            let d = bx.dim.d();
            let ordinary = match bx.dim {
                Dim::Two => n - 2,
                Dim::Three => n - 3,
            };
            let reduced = bx.reduced_positions();
            for i in 0..ordinary {
                for j in i + 1..ordinary {
                    if bx.masses.get(i) == bx.masses.get(j)
                        && reduced[i * d].lo() > reduced[j * d].hi()
                    {
                        return Some(ExclusionReason::Ordering);
                    }
                }
            }
        }
    }
    // Collision bound r_ij ≥ m_i m_j / sup(x_pinned)², from I = U and
    // I ≤ x_pinned² under the farthest-body assumption (with x_max as
    // the fallback once a repair has changed the frame).
    let xcap = if symmetry_active {
        bx.x_pinned().hi().min(run.x_max)
    } else {
        run.x_max
    };
    let x2 = Interval::point(xcap).square();
    for i in 0..n {
        for j in i + 1..n {
            let bound = (bx.masses.get(i) * bx.masses.get(j))
                .try_div(&x2)
                .expect("positive");
            if cfg.r2(i, j).hi() < bound.square().lo() {
                return Some(ExclusionReason::Collision);
            }
        }
    }

    // The moment of inertia equals the potential at every normalized
    // central configuration: Σ m_i |q_i|² = Σ_{i<j} m_i m_j / r_ij.
    // Disjoint enclosures of the two sides exclude the box. The potential
    // side stays evaluable one-sidedly even when a pair may collide.
    let inertia: Interval = (0..n).map(|i| cfg.norm2(i) * bx.masses.get(i)).sum();
    let mut pot_lo = 0.0f64;
    let mut pot_hi = Some(0.0f64);
    for i in 0..n {
        for j in i + 1..n {
            let r2 = cfg.r2(i, j);
            let mm = bx.masses.get(i) * bx.masses.get(j);
            let r_hi = Interval::point(r2.hi()).sqrt().expect("nonnegative");
            if r_hi.lo() > 0.0 {
                pot_lo += mm.try_div(&r_hi).expect("positive").lo();
            }
            match (pot_hi, r2.lo() > 0.0) {
                (Some(acc), true) => {
                    let r_lo = Interval::point(r2.lo()).sqrt().expect("positive");
                    pot_hi = Some(acc + mm.try_div(&r_lo).expect("positive").hi());
                }
                _ => pot_hi = None,
            }
        }
    }
    if pot_lo > inertia.hi() {
        return Some(ExclusionReason::Collision);
    }
    if let Some(hi) = pot_hi {
        if hi < inertia.lo() {
            return Some(ExclusionReason::Residual);
        }
    }
    None
}

/// Rigorous emptiness proof via the residual of the reduced system.
pub fn exclusion_test(bx: &ReducedBox, run: &RunConfig) -> bool {
    if cheap_exclusion(bx, run, true).is_some() {
        return true;
    }
    eval_rs_partial(bx)
        .iter()
        .any(|r| r.map_or(false, |c| !c.contains_zero()))
}

/// Bisects along the widest free coordinate at its midpoint.
pub fn bisect(bx: &ReducedBox) -> (ReducedBox, ReducedBox) {
    let k = bx.widest_coord();
    let c = bx.free()[k];
    let m = c.mid();
    let mut left = bx.free().to_vec();
    let mut right = bx.free().to_vec();
    left[k] = Interval::new(c.lo(), m);
    right[k] = Interval::new(m, c.hi());
    (bx.with_free(left), bx.with_free(right))
}

// ---- the per-run search ----------------------------------------------------------

struct Ctx<'a> {
    run: &'a RunConfig,
    budget: &'a AtomicI64,
    writer: Option<&'a CheckpointWriter>,
    replay: Option<&'a HashMap<String, checkpoint::Record>>,
}

struct Outcome {
    certified: Vec<CertifiedSolution>,
    undecided: Vec<(ReducedBox, UndecidedReason)>,
    stats: SearchStats,
    boundary_touched: bool,
    budget_exhausted: bool,
}

impl Outcome {
    fn empty() -> Outcome {
        Outcome {
            certified: Vec::new(),
            undecided: Vec::new(),
            stats: SearchStats::default(),
            boundary_touched: false,
            budget_exhausted: false,
        }
    }

    fn merge(mut self, other: Outcome) -> Outcome {
        self.certified.extend(other.certified);
        self.undecided.extend(other.undecided);
        self.stats = self.stats.merge(other.stats);
        self.boundary_touched |= other.boundary_touched;
        self.budget_exhausted |= other.budget_exhausted;
        self
    }

    fn leaf(stats: SearchStats) -> Outcome {
        Outcome { stats, ..Outcome::empty() }
    }
}

fn record_leaf(ctx: &Ctx, path: &str, rec: checkpoint::Record) {
    if let Some(w) = ctx.writer {
        w.append(path, &rec);
    }
}

fn touches_outer_boundary(bx: &ReducedBox, run: &RunConfig) -> bool {
    bx.free()
        .iter()
        .any(|c| c.hi() >= run.x_max || c.lo() <= -run.x_max)
}

/// Verifies a certified reduced-system zero is an admissible nCC:
/// full residual, reduced-to-full preconditions (including the planarity
/// branch in 3D), and the farthest-body assumption.
fn post_checks(
    ctx: &Ctx,
    refined: ReducedBox,
    image: IntervalVector,
    symmetry_active: bool,
    path: &str,
) -> std::result::Result<CertifiedSolution, Option<ExclusionReason>> {
    let run = ctx.run;
    let n = refined.n();
    let d = refined.dim.d();
    let cfg = refined.configuration();

    // residual of all dn full equations must enclose zero
    match eval_full(&cfg) {
        Ok(f) => {
            if !(0..f.len()).all(|k| f[k].contains_zero()) {
                return Err(Some(ExclusionReason::OutOfSymmetry)).map_err(|_| None);
            }
        }
        Err(_) => return Err(None),
    }

    let x_pinned = refined.x_pinned();
    let xn = cfg.body(n - 1)[0];
    if (x_pinned - xn).margin_from_zero() <= 0.0 {
        // reduced-to-full needs x_ox ≠ x_n
        return Err(None);
    }

    // Collinearity: all transverse coordinates contain zero and the 1D
    // subsystem certifies on exactly the x-part of this box. The embedded
    // 1D zero then lies inside this box and coincides, by uniqueness,
    // with the certified reduced-system zero.
    let mut collinear = false;
    let mut collinear_xs = None;
    let transverse_zero = (0..n).all(|i| (1..d).all(|c| cfg.body(i)[c].contains_zero()));
    if transverse_zero {
        let sys = CollinearSystem::new(refined.masses.clone());
        let xs = IntervalVector::from_vec(
            (0..n - 1).map(|i| cfg.body(i)[0]).collect(),
        );
        if let Ok(step) = krawczyk_step(&sys, &xs) {
            if step.verdict == KrawczykVerdict::Certified {
                collinear = true;
                collinear_xs = match certify_and_refine(&sys, &xs, 0.0, REFINE_TOL) {
                    Ok(Certification::Unique { refined: xs1d, .. }) => Some(xs1d),
                    _ => Some(step.image),
                };
            }
        }
    }

    // 3D: planarity verdict and the reduced-to-full case analysis
    let planarity = match refined.dim {
        Dim::Two => Planarity::NotApplicable,
        Dim::Three => {
            let z_all_zero = (0..n).all(|i| cfg.body(i)[2].contains_zero());
            if collinear {
                Planarity::Planar
            } else if !z_all_zero {
                Planarity::NonPlanar
            } else {
                // secondary certification inside the z ≡ 0 subspace, on
                // exactly the (x, y)-part of this box, so the certified
                // planar zero is the unique zero of this box
                let flat = planar_restriction(&refined).expect("3D box");
                let sys = RsSystem::new(flat.clone());
                match krawczyk_step(&sys, &flat.free_vector()) {
                    Ok(step) if step.verdict == KrawczykVerdict::Certified => Planarity::Planar,
                    _ => Planarity::Unknown,
                }
            }
        }
    };

    if refined.dim == Dim::Three {
        // Case 1: projections of (ox - n) and (oxy - n) linearly independent
        let yn = cfg.body(n - 1)[1];
        let det = (cfg.body(n - 3)[1] - yn) * (x_pinned - xn)
            - (-yn) * (cfg.body(n - 3)[0] - xn);
        let case1 = det.margin_from_zero() > 0.0;
        let case2 = planarity == Planarity::Planar;
        if !case1 && !case2 {
            return Err(None);
        }
    }

    // the run's symmetry assumption: certainly violated -> representative
    // lives in another placement
    if symmetry_active {
        let x2 = x_pinned.square();
        for i in 0..n {
            if i == n - 2 {
                continue;
            }
            if cfg.norm2(i).lo() > x2.hi() {
                return Err(Some(ExclusionReason::OutOfSymmetry));
            }
        }
    }

    Ok(CertifiedSolution {
        bx: refined,
        image,
        collinear,
        collinear_xs,
        planarity,
        run_index: run.run_index,
        path: path.to_string(),
    })
}

fn replay_certified(ctx: &Ctx, rec: &checkpoint::Record, path: &str) -> Option<Outcome> {
    let run = ctx.run;
    let free = rec.free_intervals()?;
    let perm = rec.perm.clone()?;
    if perm.len() != run.masses.n() {
        return None;
    }
    let masses = run.masses.permuted(&perm);
    let bx = ReducedBox::new(run.dim, masses, free, perm);
    let sys = RsSystem::new(bx.clone());
    match certify_and_refine(&sys, &bx.free_vector(), CERTIFY_INFLATION, REFINE_TOL) {
        Ok(Certification::Unique { refined, image }) => {
            let refined_box = sys.boxed(&refined);
            match post_checks(ctx, refined_box, image, true, path) {
                Ok(sol) => {
                    let mut stats = SearchStats::default();
                    stats.boxes += 1;
                    stats.replay_hits += 1;
                    stats.certified += 1;
                    let mut out = Outcome::leaf(stats);
                    out.certified.push(sol);
                    Some(out)
                }
                Err(_) => None,
            }
        }
        _ => None,
    }
}

fn process(ctx: &Ctx, bx: ReducedBox, path: String, symmetry_active: bool, repairs: u32, depth: u32) -> Outcome {
    let mut stats = SearchStats::default();
    stats.boxes = 1;

    // checkpoint replay
    if let Some(map) = ctx.replay {
        if let Some(rec) = map.get(&path) {
            match rec.kind {
                checkpoint::RecordKind::Excluded(code) => {
                    stats.replay_hits += 1;
                    bump_excluded(&mut stats, checkpoint::decode_exclusion(code));
                    return Outcome::leaf(stats);
                }
                checkpoint::RecordKind::Undecided => {
                    stats.replay_hits += 1;
                    stats.undecided += 1;
                    let mut out = Outcome::leaf(stats);
                    out.undecided.push((bx, UndecidedReason::MinWidth));
                    return out;
                }
                checkpoint::RecordKind::Certified => {
                    if let Some(out) = replay_certified(ctx, rec, &path) {
                        return out;
                    }
                    // fall through and recompute on a malformed record
                }
            }
        }
    }

    if ctx.budget.fetch_sub(1, AtomicOrdering::Relaxed) <= 0 {
        stats.undecided += 1;
        let mut out = Outcome::leaf(stats);
        out.budget_exhausted = true;
        out.undecided.push((bx, UndecidedReason::Budget));
        return out;
    }

    // cheap rigorous prunes
    if let Some(reason) = cheap_exclusion(&bx, ctx.run, symmetry_active) {
        bump_excluded(&mut stats, reason);
        record_leaf(ctx, &path, checkpoint::Record::excluded(reason));
        return Outcome::leaf(stats);
    }

    // residual exclusion: every evaluable row must contain zero, even on
    // boxes where some pair may collide
    let partial = eval_rs_partial(&bx);
    if partial.iter().any(|r| r.map_or(false, |c| !c.contains_zero())) {
        bump_excluded(&mut stats, ExclusionReason::Residual);
        record_leaf(ctx, &path, checkpoint::Record::excluded(ExclusionReason::Residual));
        return Outcome::leaf(stats);
    }
    let collision_free = partial.iter().all(|r| r.is_some());

    // Krawczyk first: the operator is self-validating, so near-degenerate
    // normalizations simply come back undecided. The degeneracy machinery
    // below is a completeness fallback for small boxes that refuse to
    // certify because the normalization itself is singular.
    if collision_free {
        if bx.max_width() <= KRAWCZYK_WIDTH_GATE {
            let sys = RsSystem::new(bx.clone());
            let inflated = IntervalVector::from_vec(
                bx.free()
                    .iter()
                    .map(|c| c.inflate(CERTIFY_INFLATION * c.width() + 1e-14))
                    .collect(),
            );
            match krawczyk_step(&sys, &inflated) {
                Ok(step) => match step.verdict {
                    KrawczykVerdict::Excluded => {
                        bump_excluded(&mut stats, ExclusionReason::KrawczykEmpty);
                        record_leaf(
                            ctx,
                            &path,
                            checkpoint::Record::excluded(ExclusionReason::KrawczykEmpty),
                        );
                        return Outcome::leaf(stats);
                    }
                    KrawczykVerdict::Certified => {
                        match certify_and_refine(
                            &sys,
                            &bx.free_vector(),
                            CERTIFY_INFLATION,
                            REFINE_TOL,
                        ) {
                            Ok(Certification::Unique { refined, image }) => {
                                // the inflated box holds exactly one zero; if
                                // it lies outside this box, this box holds none
                                if !refined.intersects(&bx.free_vector()) {
                                    bump_excluded(&mut stats, ExclusionReason::KrawczykEmpty);
                                    record_leaf(
                                        ctx,
                                        &path,
                                        checkpoint::Record::excluded(
                                            ExclusionReason::KrawczykEmpty,
                                        ),
                                    );
                                    return Outcome::leaf(stats);
                                }
                                let refined_box = sys.boxed(&refined);
                                let boundary = touches_outer_boundary(&bx, ctx.run);
                                match post_checks(ctx, refined_box, image, symmetry_active, &path)
                                {
                                    Ok(sol) => {
                                        stats.certified += 1;
                                        record_leaf(
                                            ctx,
                                            &path,
                                            checkpoint::Record::certified(&sol.bx),
                                        );
                                        let mut out = Outcome::leaf(stats);
                                        out.boundary_touched = boundary;
                                        out.certified.push(sol);
                                        return out;
                                    }
                                    Err(Some(reason)) => {
                                        bump_excluded(&mut stats, reason);
                                        record_leaf(
                                            ctx,
                                            &path,
                                            checkpoint::Record::excluded(reason),
                                        );
                                        let mut out = Outcome::leaf(stats);
                                        out.boundary_touched = boundary;
                                        return out;
                                    }
                                    Err(None) => {
                                        stats.undecided += 1;
                                        record_leaf(ctx, &path, checkpoint::Record::undecided());
                                        let mut out = Outcome::leaf(stats);
                                        out.boundary_touched = boundary;
                                        out.undecided.push((bx, UndecidedReason::PostCheck));
                                        return out;
                                    }
                                }
                            }
                            _ => { /* fall through to bisection */ }
                        }
                    }
                    KrawczykVerdict::Undecided => {
                        // narrow when the image cuts the box substantially
                        if let Some(narrowed) = step.image.intersection(&bx.free_vector()) {
                            if narrowed.max_width() <= NARROW_FACTOR * bx.max_width() {
                                stats.narrowings += 1;
                                let child = process(
                                    ctx,
                                    bx.with_free(narrowed.as_slice().to_vec()),
                                    format!("{path}N"),
                                    symmetry_active,
                                    repairs,
                                    depth + 1,
                                );
                                return Outcome::leaf(stats).merge(child);
                            }
                        } else {
                            // disjoint intersection of image and box
                            bump_excluded(&mut stats, ExclusionReason::KrawczykEmpty);
                            record_leaf(
                                ctx,
                                &path,
                                checkpoint::Record::excluded(ExclusionReason::KrawczykEmpty),
                            );
                            return Outcome::leaf(stats);
                        }
                    }
                },
                Err(_) => { /* singular midpoint or collision: bisect */ }
            }
        }

        // repair fallback: a small box that did not certify and trips a
        // degeneracy flag is re-normalized (2D in-run boxes cannot trip
        // genuine flags: the farthest-body constraint excludes both
        // planar conditions outright)
        let in_run_2d = ctx.run.dim == Dim::Two && symmetry_active;
        if !in_run_2d && bx.max_width() <= REPAIR_WIDTH_GATE && repairs < MAX_REPAIRS {
            let delta = 10.0 * bx.max_width() + ctx.run.delta_floor;
            let report = check_degeneracy(&bx, delta);
            if report.any() {
                match renormalize(&bx, &report) {
                    // descend into the repaired frame only when the repair
                    // actually cleared the flags; futile repairs fall back
                    // to bisection
                    Ok(repaired)
                        if !check_degeneracy(
                            &repaired,
                            10.0 * repaired.max_width() + ctx.run.delta_floor,
                        )
                        .any() =>
                    {
                        stats.repairs += 1;
                        let child = process(
                            ctx,
                            repaired,
                            format!("{path}P"),
                            false,
                            repairs + 1,
                            depth + 1,
                        );
                        return Outcome::leaf(stats).merge(child);
                    }
                    Ok(_) => stats.repair_failures += 1,
                    Err(Error::NoRepairAvailable) => {
                        stats.repair_failures += 1;
                        if report.d5_z_block_det_near_zero {
                            stats.conjecture_probes += 1;
                        }
                    }
                    Err(_) => stats.repair_failures += 1,
                }
            }
        }
    }

    // bisect
    if bx.max_width() < ctx.run.min_box_width {
        stats.undecided += 1;
        record_leaf(ctx, &path, checkpoint::Record::undecided());
        let mut out = Outcome::leaf(stats);
        out.boundary_touched = touches_outer_boundary(&bx, ctx.run);
        out.undecided.push((bx, UndecidedReason::MinWidth));
        return out;
    }
    stats.bisections += 1;
    let (left, right) = bisect(&bx);
    let (lp, rp) = (format!("{path}L"), format!("{path}R"));
    let (lo, ro) = if depth < PAR_DEPTH {
        rayon::join(
            || process(ctx, left, lp, symmetry_active, repairs, depth + 1),
            || process(ctx, right, rp, symmetry_active, repairs, depth + 1),
        )
    } else {
        (
            process(ctx, left, lp, symmetry_active, repairs, depth + 1),
            process(ctx, right, rp, symmetry_active, repairs, depth + 1),
        )
    };
    Outcome::leaf(stats).merge(lo).merge(ro)
}

fn bump_excluded(stats: &mut SearchStats, reason: ExclusionReason) {
    match reason {
        ExclusionReason::Symmetry => stats.excluded_symmetry += 1,
        ExclusionReason::Ordering => stats.excluded_ordering += 1,
        ExclusionReason::Collision => stats.excluded_collision += 1,
        ExclusionReason::Residual => stats.excluded_residual += 1,
        ExclusionReason::KrawczykEmpty => stats.excluded_krawczyk += 1,
        ExclusionReason::OutOfSymmetry => stats.out_of_symmetry += 1,
    }
}

/// Runs the branch-and-prune search for one placement.
pub fn run_search(run: &RunConfig) -> SearchReport {
    run_search_with_checkpoint(run, None, None)
}

/// As [`run_search`], with optional checkpoint replay and record sink.
pub fn run_search_with_checkpoint(
    run: &RunConfig,
    replay: Option<&HashMap<String, checkpoint::Record>>,
    writer: Option<&CheckpointWriter>,
) -> SearchReport {
    let budget = AtomicI64::new(run.max_boxes.min(i64::MAX as u64) as i64);
    let ctx = Ctx { run, budget: &budget, writer, replay };
    let root = a_priori_box(run);
    let out = process(&ctx, root, format!("{}:", run.run_index), true, 0, 0);

    let mut certified = merge_duplicates(out.certified);
    certified.sort_by(|a, b| canonical_key(a).partial_cmp(&canonical_key(b)).unwrap());
    SearchReport {
        run_index: run.run_index,
        certified,
        undecided: out.undecided,
        stats: out.stats,
        boundary_touched: out.boundary_touched,
        budget_exhausted: out.budget_exhausted,
    }
}

fn canonical_key(s: &CertifiedSolution) -> Vec<f64> {
    let mut k: Vec<f64> = s.bx.perm.iter().map(|&p| p as f64).collect();
    k.extend(s.bx.free().iter().map(|c| c.mid()));
    k
}

/// Two certified boxes in the same frame that overlap enclose the same
/// zero (uniqueness); merge them by intersection.
fn merge_duplicates(mut sols: Vec<CertifiedSolution>) -> Vec<CertifiedSolution> {
    let mut out: Vec<CertifiedSolution> = Vec::new();
    sols.sort_by(|a, b| canonical_key(a).partial_cmp(&canonical_key(b)).unwrap());
    'next: for s in sols {
        for kept in out.iter_mut() {
            if kept.bx.perm == s.bx.perm
                && kept
                    .bx
                    .free_vector()
                    .intersects(&s.bx.free_vector())
            {
                if let Some(meet) = kept.bx.free_vector().intersection(&s.bx.free_vector()) {
                    kept.bx = kept.bx.with_free(meet.as_slice().to_vec());
                    continue 'next;
                }
            }
        }
        out.push(s);
    }
    out
}

/// Options for the multi-run strategy.
#[derive(Clone, Debug)]
pub struct MultiRunOptions {
    pub selection: RunSelection,
    pub min_box_width: f64,
    pub max_boxes: u64,
    pub x_max: f64,
    pub ordering_constraints: bool,
}

impl Default for MultiRunOptions {
    fn default() -> Self {
        MultiRunOptions {
            selection: RunSelection::SymmetryReduced,
            min_box_width: 1e-10,
            max_boxes: u64::MAX,
            x_max: 2.5,
            ordering_constraints: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunSelection {
    /// One run per group of equal-mass bodies (lowest index represents).
    SymmetryReduced,
    /// One run per body.
    All,
    Explicit(Vec<usize>),
}

/// Aggregated result of the multi-run strategy.
#[derive(Clone, Debug)]
pub struct MultiRunReport {
    pub runs: Vec<SearchReport>,
    /// Equal-mass groups of the input masses.
    pub groups: Vec<Vec<usize>>,
    /// Run indices actually executed.
    pub executed: Vec<usize>,
}

impl MultiRunReport {
    pub fn conclusive(&self) -> bool {
        self.runs.iter().all(|r| r.conclusive())
    }

    pub fn all_certified(&self) -> Vec<&CertifiedSolution> {
        self.runs.iter().flat_map(|r| r.certified.iter()).collect()
    }
}

/// Executes one search per selected placement; with `SymmetryReduced`
/// selection, bodies of equal mass share a single representative run.
pub fn multi_run(masses: &Masses, dim: Dim, opts: &MultiRunOptions) -> MultiRunReport {
    multi_run_with_checkpoint(masses, dim, opts, None, None)
}

pub fn multi_run_with_checkpoint(
    masses: &Masses,
    dim: Dim,
    opts: &MultiRunOptions,
    replay: Option<&HashMap<String, checkpoint::Record>>,
    writer: Option<&CheckpointWriter>,
) -> MultiRunReport {
    let normalized = masses.normalize();
    let groups = normalized.equal_groups();
    let executed: Vec<usize> = match &opts.selection {
        RunSelection::SymmetryReduced => groups.iter().map(|g| g[0]).collect(),
        RunSelection::All => (0..normalized.n()).collect(),
        RunSelection::Explicit(v) => v.clone(),
    };
    let runs: Vec<SearchReport> = executed
        .iter()
        .map(|&idx| {
            let mut rc = RunConfig::new(normalized.clone(), dim, idx);
            rc.min_box_width = opts.min_box_width;
            rc.max_boxes = opts.max_boxes;
            rc.x_max = opts.x_max;
            rc.ordering_constraints = opts.ordering_constraints;
            run_search_with_checkpoint(&rc, replay, writer)
        })
        .collect();
    MultiRunReport { runs, groups, executed }
}
