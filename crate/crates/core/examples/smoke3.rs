use cencon::model::{Dim, Masses};
use cencon::search::{multi_run, MultiRunOptions, RunSelection};

fn main() {
    let t0 = std::time::Instant::now();
    let m4 = Masses::from_points(&[1.0; 4]).unwrap().normalize();
    let mut opts = MultiRunOptions::default();
    opts.selection = RunSelection::Explicit(vec![0]);
    opts.max_boxes = 30_000_000;
    let report = multi_run(&m4, Dim::Two, &opts);
    println!("4-body equal elapsed: {:?}", t0.elapsed());
    for r in &report.runs {
        println!("run {}: certified={} undecided={} budget_exhausted={}\n  stats={:?}",
            r.run_index, r.certified.len(), r.undecided.len(), r.budget_exhausted, r.stats);
    }
}
