use cencon::interval::{Interval, IntervalVector};
use cencon::search::{krawczyk_step, CollinearSystem, IntervalSystem};
use cencon::model::Masses;

fn main() {
    let m = Masses::from_points(&[1.0, 1.0, 1.0]).unwrap().normalize();
    let sys = CollinearSystem::new(m);
    let w = 1e-12;
    let xs = IntervalVector::from_vec(vec![
        Interval::new(-2.1e-17 - w, -2.1e-17 + w),
        Interval::new(0.7469007910928608 - w, 0.7469007910928608 + w),
    ]);
    match sys.eval(&xs) {
        Ok(v) => println!("eval: {:?} {:?}", v[0], v[1]),
        Err(e) => println!("eval err: {e}"),
    }
    match krawczyk_step(&sys, &xs) {
        Ok(step) => println!("verdict {:?} image {:?} {:?}", step.verdict, step.image[0], step.image[1]),
        Err(e) => println!("krawczyk err: {e}"),
    }
}
