use cencon::model::{Dim, Masses};
use cencon::search::{multi_run, MultiRunOptions};

fn main() {
    let t0 = std::time::Instant::now();
    let masses = Masses::from_points(&[1.0; 3]).unwrap().normalize();
    let mut opts = MultiRunOptions::default();
    opts.max_boxes = 20_000_000;
    let report = multi_run(&masses, Dim::Three, &opts);
    println!("3-body 3D elapsed: {:?} conclusive={}", t0.elapsed(), report.conclusive());
    for r in &report.runs {
        println!("run {}: certified={} undecided={}\n  {:?}", r.run_index, r.certified.len(), r.undecided.len(), r.stats);
    }
}
