use cencon::classify::{classify, ClassGroup, Shape};
use cencon::model::{Dim, Masses};
use cencon::search::{multi_run, MultiRunOptions};

fn main() {
    let t0 = std::time::Instant::now();
    let masses = Masses::from_points(&[1.0, 1.0, 1.0]).unwrap().normalize();
    let report = multi_run(&masses, Dim::Two, &MultiRunOptions::default());
    println!("elapsed: {:?}", t0.elapsed());
    for r in &report.runs {
        println!(
            "run {}: certified={} undecided={} boxes={} stats={:?} conclusive={}",
            r.run_index, r.certified.len(), r.undecided.len(), r.stats.boxes, r.stats, r.conclusive()
        );
        for s in &r.certified {
            println!("  sol path={} collinear={} free={:?}", s.path, s.collinear,
                s.bx.free().iter().map(|c| c.mid()).collect::<Vec<_>>());
        }
    }
    let all: Vec<_> = report.all_certified().into_iter().cloned().collect();
    let cls = classify(&all, &masses, ClassGroup::SO2);
    println!("classes: {} table: {:?}", cls.classes.len(), cls.table);
    for c in &cls.classes {
        println!("  class rep={} members={:?} labeled={} stab={} shape={:?}",
            c.representative, c.members, c.labeled_count, c.stabilizer_size, c.shape);
    }
    let _ = Shape::Convex;
}
