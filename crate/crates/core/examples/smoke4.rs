use cencon::classify::{classify, ClassGroup};
use cencon::interval::Interval;
use cencon::model::{Dim, Masses};
use cencon::search::{multi_run, MultiRunOptions};

fn main() {
    let t0 = std::time::Instant::now();
    let masses = Masses::new(
        ["0.4", "0.3", "0.2", "0.1"].iter().map(|s| Interval::enclosing_decimal(s).unwrap()).collect()
    ).unwrap().normalize();
    let report = multi_run(&masses, Dim::Two, &MultiRunOptions::default());
    println!("4-body (0.4,0.3,0.2,0.1) elapsed: {:?} conclusive={}", t0.elapsed(), report.conclusive());
    for r in &report.runs {
        println!("run {}: certified={} undecided={} boxes={}", r.run_index, r.certified.len(), r.undecided.len(), r.stats.boxes);
    }
    let all: Vec<_> = report.all_certified().into_iter().cloned().collect();
    let cls = classify(&all, &masses, ClassGroup::SO2);
    println!("classes: {} table: {:?}", cls.classes.len(), cls.table);
}
