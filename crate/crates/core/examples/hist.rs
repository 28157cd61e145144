use cencon::interval::IntervalVector;
use cencon::model::{Dim, Masses, eval_rs};
use cencon::search::{a_priori_box, bisect, exclusion_test, krawczyk_step, KrawczykVerdict, RsSystem, RunConfig};
use std::collections::HashMap;

fn main() {
    let m4 = Masses::from_points(&[1.0; 4]).unwrap().normalize();
    let rc = RunConfig::new(m4, Dim::Two, 0);
    let root = a_priori_box(&rc);
    let mut hist: HashMap<(i32, &'static str), u64> = HashMap::new();
    let mut stack = vec![root];
    let mut budget = 40_000_000u64;
    let mut processed = 0u64;
    while let Some(bx) = stack.pop() {
        if budget == 0 { println!("BUDGET OUT"); break; }
        budget -= 1; processed += 1;
        let w = bx.max_width();
        let bucket = w.log2().floor() as i32;
        if exclusion_test(&bx, &rc) {
            *hist.entry((bucket, "excl")).or_default() += 1;
            continue;
        }
        let collision_free = eval_rs(&bx).is_ok();
        let mut decided: &'static str = "";
        if collision_free && w <= 0.5 {
            let sys = RsSystem::new(bx.clone());
            let inflated = IntervalVector::from_vec(
                bx.free().iter().map(|c| c.inflate(0.1 * c.width() + 1e-14)).collect());
            match krawczyk_step(&sys, &inflated) {
                Ok(s) => match s.verdict {
                    KrawczykVerdict::Certified => decided = "CERT",
                    KrawczykVerdict::Excluded => decided = "kraw-x",
                    KrawczykVerdict::Undecided => {
                        if let Some(narrowed) = s.image.intersection(&bx.free_vector()) {
                            if narrowed.max_width() <= 0.7 * w {
                                stack.push(bx.with_free(narrowed.as_slice().to_vec()));
                                *hist.entry((bucket, "narrow")).or_default() += 1;
                                continue;
                            }
                        } else { decided = "kraw-x"; }
                    }
                },
                Err(_) => {}
            }
        }
        if !decided.is_empty() {
            *hist.entry((bucket, decided)).or_default() += 1;
            continue;
        }
        if w < rc.min_box_width {
            *hist.entry((bucket, "UNDECIDED")).or_default() += 1;
            continue;
        }
        *hist.entry((bucket, if collision_free { "bisect" } else { "bis-coll" })).or_default() += 1;
        let (a, b) = bisect(&bx);
        stack.push(a); stack.push(b);
    }
    println!("processed {processed}");
    let mut keys: Vec<_> = hist.keys().cloned().collect();
    keys.sort();
    for k in keys.iter().rev() { println!("w~2^{:>3} {:>10}: {}", k.0, k.1, hist[k]); }
}
