use cencon::classify::{classify, ClassGroup};
use cencon::model::{Dim, Masses};
use cencon::search::{multi_run, MultiRunOptions};

fn main() {
    // unequal masses (0.5, 0.3, 0.2): 3 runs, expect 3 collinear + 2 convex
    let t0 = std::time::Instant::now();
    let masses = Masses::new(
        ["0.5", "0.3", "0.2"].iter().map(|s| cencon::interval::Interval::enclosing_decimal(s).unwrap()).collect()
    ).unwrap().normalize();
    let report = multi_run(&masses, Dim::Two, &MultiRunOptions::default());
    println!("elapsed: {:?} conclusive={}", t0.elapsed(), report.conclusive());
    for r in &report.runs {
        println!("run {}: certified={} undecided={} boxes={}", r.run_index, r.certified.len(), r.undecided.len(), r.stats.boxes);
    }
    let all: Vec<_> = report.all_certified().into_iter().cloned().collect();
    let cls = classify(&all, &masses, ClassGroup::SO2);
    println!("classes: {} table: {:?}", cls.classes.len(), cls.table);
    // 4-body equal masses: collinear must be 12
    let t0 = std::time::Instant::now();
    let m4 = Masses::from_points(&[1.0; 4]).unwrap().normalize();
    let report = multi_run(&m4, Dim::Two, &MultiRunOptions::default());
    println!("4-body equal elapsed: {:?} conclusive={}", t0.elapsed(), report.conclusive());
    for r in &report.runs {
        println!("run {}: certified={} undecided={} boxes={}", r.run_index, r.certified.len(), r.undecided.len(), r.stats.boxes);
    }
    let all: Vec<_> = report.all_certified().into_iter().cloned().collect();
    let cls = classify(&all, &m4, ClassGroup::SO2);
    println!("4-body classes: {} table: {:?}", cls.classes.len(), cls.table);
}
