use cencon::interval::{Interval, IntervalVector};
use cencon::model::{Dim, Masses, ReducedBox, eval_rs, jacobian_rs};
use cencon::search::{krawczyk_step, RsSystem};

fn main() {
    let m: [f64; 3] = [0.4, 0.3, 0.3];
    let y1 = (m[1] + m[2] / (1.0 + m[0] / m[2]).powi(2)).cbrt();
    println!("y1 = {y1}");
    let masses = Masses::from_points(&m).unwrap();
    let w = 1e-4;
    let free = vec![
        Interval::point(0.0).inflate(w),
        Interval::point(y1).inflate(w),
        Interval::point(0.0).inflate(w),
    ];
    let bx = ReducedBox::identity_perm(Dim::Two, masses, free);
    println!("rs(mid) = {:?}", eval_rs(&bx.midpoint_box()));
    let jac = jacobian_rs(&bx).unwrap();
    for i in 0..3 {
        println!("jac row {i}: {:?} {:?} {:?}", jac[(i,0)].mid(), jac[(i,1)].mid(), jac[(i,2)].mid());
    }
    let sys = RsSystem::new(bx.clone());
    match krawczyk_step(&sys, &bx.free_vector()) {
        Ok(s) => {
            println!("verdict {:?}", s.verdict);
            for i in 0..3 {
                println!("  image {:?} box {:?}", s.image[i], bx.free()[i]);
            }
        }
        Err(e) => println!("err {e}"),
    }
}
