//! Search-level behavior: scheduling invariance, checkpoint resume
//! equivalence, and a desk-scale spatial run.

mod common;

use std::collections::HashMap;

use cencon::classify::{classify, ClassGroup, Shape};
use cencon::model::{Dim, Masses};
use cencon::search::{
    job_fingerprint, multi_run, multi_run_with_checkpoint, CheckpointReader, CheckpointWriter,
    MultiRunOptions, RunConfig, RunSelection,
};

fn masses3() -> Masses {
    Masses::from_points(&[1.0; 3]).unwrap().normalize()
}

/// The certified set is identical across worker counts, bit for bit.
#[test]
fn deterministic_across_worker_counts() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let rc = RunConfig::new(masses3(), Dim::Two, 0);
            cencon::search::run_search(&rc)
        })
    };
    let a = run(1);
    let b = run(2);
    assert_eq!(a.certified.len(), b.certified.len());
    for (x, y) in a.certified.iter().zip(b.certified.iter()) {
        assert_eq!(x.bx.perm, y.bx.perm);
        for (p, q) in x.bx.free().iter().zip(y.bx.free().iter()) {
            assert_eq!(p.lo().to_bits(), q.lo().to_bits());
            assert_eq!(p.hi().to_bits(), q.hi().to_bits());
        }
    }
    assert_eq!(a.stats.boxes, b.stats.boxes);
}

/// A run interrupted by a box budget and resumed from its checkpoint
/// produces the identical class table as an uninterrupted run.
#[test]
fn resume_equivalence() {
    let dir = std::env::temp_dir().join(format!("cencon-resume-{}", std::process::id()));
    let _ = std::fs::remove_file(&dir);
    let masses = masses3();
    let fp = job_fingerprint(&masses, Dim::Two, 2.5, 1e-10, true);

    let mut opts = MultiRunOptions::default();
    opts.selection = RunSelection::SymmetryReduced;

    // uninterrupted reference
    let full = multi_run(&masses, Dim::Two, &opts);
    let full_sols: Vec<_> = full.all_certified().into_iter().cloned().collect();
    let full_table = classify(&full_sols, &masses, ClassGroup::SO2).table;

    // interrupted run: small budget, records leaf verdicts
    {
        let writer = CheckpointWriter::open(&dir, fp).unwrap();
        let mut small = opts.clone();
        small.max_boxes = 400;
        let partial =
            multi_run_with_checkpoint(&masses, Dim::Two, &small, None, Some(&writer));
        assert!(partial.runs.iter().any(|r| r.budget_exhausted));
        writer.flush().unwrap();
    }

    // resumed run with the full budget
    let replay: HashMap<_, _> = CheckpointReader::load(&dir, fp).unwrap();
    assert!(!replay.is_empty());
    let writer = CheckpointWriter::open(&dir, fp).unwrap();
    let resumed =
        multi_run_with_checkpoint(&masses, Dim::Two, &opts, Some(&replay), Some(&writer));
    assert!(resumed.conclusive());
    let resumed_sols: Vec<_> = resumed.all_certified().into_iter().cloned().collect();
    let resumed_table = classify(&resumed_sols, &masses, ClassGroup::SO2).table;
    assert_eq!(full_table, resumed_table);
    assert!(resumed.runs.iter().any(|r| r.stats.replay_hits > 0));
    let _ = std::fs::remove_file(&dir);
}

/// Three bodies in space: every solution is planar; under SO(3) the two
/// triangle orientations merge, total 3 collinear + 1 triangle.
#[test]
fn spatial_three_body_run() {
    let masses = masses3();
    let report = multi_run(&masses, Dim::Three, &MultiRunOptions::default());
    assert!(report.conclusive(), "3-body spatial run is conclusive");
    let sols: Vec<_> = report.all_certified().into_iter().cloned().collect();
    assert!(!sols.is_empty());
    for s in &sols {
        assert!(
            s.collinear || s.planarity == cencon::search::Planarity::Planar,
            "three bodies are always coplanar"
        );
    }
    let cls = classify(&sols, &masses, ClassGroup::SO3);
    assert_eq!(cls.table.collinear, 3);
    assert_eq!(cls.table.convex, 1, "triangle orientations merge under SO(3)");
    assert_eq!(cls.table.total, 4);
}

/// The farthest-body lower bound is rigorous and keeps every certified
/// solution strictly inside the a-priori box.
#[test]
fn a_priori_box_contains_all_solutions() {
    let masses = masses3();
    let report = multi_run(&masses, Dim::Two, &MultiRunOptions::default());
    for r in &report.runs {
        assert!(!r.boundary_touched, "no certified box touches the outer boundary");
        for s in &r.certified {
            assert!(s.bx.x_pinned().lo() > cencon::search::farthest_lower_bound(&masses));
        }
    }
    // shapes sanity: the equilateral classes are convex
    let sols: Vec<_> = report.all_certified().into_iter().cloned().collect();
    let cls = classify(&sols, &masses, ClassGroup::SO2);
    assert!(cls.classes.iter().any(|c| c.shape == Shape::Convex));
}
