use cencon::degeneracy::{check_degeneracy, renormalize};
use cencon::interval::{Interval, IntervalVector};
use cencon::model::{Dim, Masses, ReducedBox, eval_rs};
use cencon::search::{krawczyk_step, RsSystem};

fn main() {
    let (mc, m0): (f64, f64) = (0.2, 0.2);
    let s = (m0 + mc * (0.25 + 1.0 / 2f64.sqrt())).cbrt();
    println!("s = {s}");
    // D1 labeling: slots = corner(0,s), corner(0,-s), corner(s,0)... wait
    // order [1,3,0,4]: slots 0..3 = bodies (0,s), (0,-s), (s,0), center; eliminated (-s,0)
    let masses = [mc, mc, mc, m0, mc];
    let slots: [[f64;2];4] = [[0.0, s],[0.0,-s],[s,0.0],[0.0,0.0]];
    let m = Masses::from_points(&masses).unwrap();
    let mut free = Vec::new();
    for (i, p) in slots.iter().enumerate() {
        free.push(Interval::point(p[0]));
        if i < 3 { free.push(Interval::point(p[1])); }
    }
    let bx = ReducedBox::identity_perm(Dim::Two, m, free);
    println!("rs = {:?}", eval_rs(&bx).map(|v| (0..v.len()).map(|i| v[i].mid()).collect::<Vec<_>>()));
    let rep = check_degeneracy(&bx, 1e-9);
    println!("rep: d1={} d2={}", rep.d1_x_near_zero, rep.d2_x_near_xn);
    let repaired = renormalize(&bx, &rep).unwrap();
    println!("repaired free: {:?}", repaired.free().iter().map(|c| (c.lo(), c.hi())).collect::<Vec<_>>());
    println!("repaired perm: {:?}", repaired.perm);
    let rep2 = check_degeneracy(&repaired, 1e-9);
    println!("rep2 any: {}", rep2.any());
    println!("repaired rs: {:?}", eval_rs(&repaired).map(|v| (0..v.len()).map(|i| v[i].mid()).collect::<Vec<_>>()));
    let seed = IntervalVector::from_vec(repaired.free().iter().map(|c| c.inflate(1e-3)).collect());
    let sys = RsSystem::new(repaired.clone());
    match krawczyk_step(&sys, &seed) {
        Ok(st) => {
            println!("verdict {:?}", st.verdict);
            for i in 0..seed.len() {
                println!("  image {:?} box {:?}", st.image[i], seed[i]);
            }
        }
        Err(e) => println!("err {e}"),
    }
}
