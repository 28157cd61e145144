//! Property-based invariants: inclusion monotonicity of the interval
//! arithmetic, equivariance of the vector field, the R = mF scaling, and
//! the rank drop under center-of-mass elimination.

mod common;

use cencon::interval::Interval;
use cencon::model::{
    eval_f, eval_full, eval_full_red, jacobian_full, jacobian_full_red, numeric_rank,
    Configuration, Dim, Masses, RANK_TOL,
};
use proptest::prelude::*;

fn tight_interval() -> impl Strategy<Value = Interval> {
    (-50.0f64..50.0, 0.0f64..5.0).prop_map(|(a, w)| Interval::new(a, a + w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// a ⊆ a' and b ⊆ b' implies op(a,b) ⊆ op(a',b').
    #[test]
    fn inclusion_monotonicity(
        a in tight_interval(),
        b in tight_interval(),
        grow in 0.0f64..2.0,
    ) {
        let a_big = a.inflate(grow);
        let b_big = b.inflate(0.5 * grow + 0.1);
        prop_assert!((a + b).subset_of(&(a_big + b_big)));
        prop_assert!((a - b).subset_of(&(a_big - b_big)));
        prop_assert!((a * b).subset_of(&(a_big * b_big)));
        if !b_big.contains_zero() {
            prop_assert!(a.try_div(&b).unwrap().subset_of(&a_big.try_div(&b_big).unwrap()));
        }
        if a.lo() >= 0.0 && a_big.lo() >= 0.0 {
            prop_assert!(a.sqrt().unwrap().subset_of(&a_big.sqrt().unwrap()));
        }
        prop_assert!(a.square().subset_of(&a_big.square()));
        prop_assert!(a.sin().subset_of(&a_big.sin()));
        prop_assert!(a.cos().subset_of(&a_big.cos()));
    }
}

fn random_config(rng: &mut common::Rng, n: usize, dim: Dim) -> Option<(Vec<f64>, Vec<f64>)> {
    let d = dim.d();
    let masses: Vec<f64> = (0..n).map(|_| rng.uniform(0.1, 1.0)).collect();
    let total: f64 = masses.iter().sum();
    let masses: Vec<f64> = masses.iter().map(|m| m / total).collect();
    let pts: Vec<f64> = (0..n * d).map(|_| rng.uniform(-1.2, 1.2)).collect();
    let separated = (0..n).all(|i| {
        (i + 1..n).all(|j| {
            (0..d).map(|c| (pts[i * d + c] - pts[j * d + c]).powi(2)).sum::<f64>() > 0.09
        })
    });
    separated.then_some((masses, pts))
}

/// F(Rq) = R F(q) for rotations, and relabeling equivariance, checked on
/// sampled point configurations.
#[test]
fn vector_field_equivariance() {
    let mut rng = common::Rng::new(0xE9);
    let mut done = 0;
    while done < 60 {
        let n = 3 + rng.pick(3);
        let Some((masses, pts)) = random_config(&mut rng, n, Dim::Two) else {
            continue;
        };
        done += 1;
        let m = Masses::from_points(&masses).unwrap();
        let cfg = Configuration::from_points(Dim::Two, &pts, m.clone());
        let f = eval_full(&cfg).unwrap();

        // rotation equivariance
        let t = rng.uniform(0.0, 6.28);
        let (c, s) = (t.cos(), t.sin());
        let rotated: Vec<f64> = (0..n)
            .flat_map(|i| {
                let (x, y) = (pts[2 * i], pts[2 * i + 1]);
                [c * x - s * y, s * x + c * y]
            })
            .collect();
        let cfg_r = Configuration::from_points(Dim::Two, &rotated, m.clone());
        let f_r = eval_full(&cfg_r).unwrap();
        for i in 0..n {
            let fx = c * f[2 * i].mid() - s * f[2 * i + 1].mid();
            let fy = s * f[2 * i].mid() + c * f[2 * i + 1].mid();
            assert!((fx - f_r[2 * i].mid()).abs() < 1e-12);
            assert!((fy - f_r[2 * i + 1].mid()).abs() < 1e-12);
        }

        // permutation equivariance: F_{σ(i)}(σq, σm) = F_i(q, m)
        let shift = 1 + rng.pick(n - 1);
        let sigma: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let mut pts_p = vec![0.0; 2 * n];
        let mut m_p = vec![0.0; n];
        for i in 0..n {
            pts_p[2 * sigma[i]] = pts[2 * i];
            pts_p[2 * sigma[i] + 1] = pts[2 * i + 1];
            m_p[sigma[i]] = masses[i];
        }
        let cfg_p = Configuration::from_points(
            Dim::Two,
            &pts_p,
            Masses::from_points(&m_p).unwrap(),
        );
        let f_p = eval_full(&cfg_p).unwrap();
        for i in 0..n {
            for cdx in 0..2 {
                let a = f[2 * i + cdx].mid();
                let b = f_p[2 * sigma[i] + cdx].mid();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

/// R_i = m_i F_i elementwise, on both the full and reduced systems.
#[test]
fn r_equals_mass_times_f() {
    let mut rng = common::Rng::new(0x5CA1E);
    let mut done = 0;
    while done < 40 {
        let n = 3 + rng.pick(3);
        let dim = if rng.pick(2) == 0 { Dim::Two } else { Dim::Three };
        let Some((masses, pts)) = random_config(&mut rng, n, dim) else {
            continue;
        };
        done += 1;
        let d = dim.d();
        let m = Masses::from_points(&masses).unwrap();
        let cfg = Configuration::from_points(dim, &pts, m.clone());
        let f = eval_full(&cfg).unwrap();
        let fv = eval_f(&cfg).unwrap();
        for i in 0..n {
            for c in 0..d {
                // f_i = m_i (q_i - F_i)
                let want = masses[i] * (pts[i * d + c] - f[i * d + c].mid());
                assert!((fv[i][c].mid() - want).abs() < 1e-12);
            }
        }
        let reduced: Vec<Interval> =
            pts[..(n - 1) * d].iter().map(|&x| Interval::point(x)).collect();
        let fr = eval_full_red(&reduced, &m, dim).unwrap();
        let rr = cencon::model::eval_r_red(&reduced, &m, dim).unwrap();
        for k in 0..fr.len() {
            let want = fr[k].mid() * masses[k / d];
            assert!((rr[k].mid() - want).abs() < 1e-12);
        }
    }
}

/// rank(DF^red) = rank(DF) - d at normalized central configurations
/// (the Schur-complement rank lemma), checked on synthetic nCCs with
/// random masses: side-1 equilateral triangles and unit tetrahedra.
#[test]
fn schur_rank_drop_at_nccs() {
    let mut rng = common::Rng::new(0x7A6);
    for _ in 0..25 {
        // planar equilateral with random masses
        let masses: Vec<f64> = (0..3).map(|_| rng.uniform(0.1, 1.0)).collect();
        let total: f64 = masses.iter().sum();
        let masses: Vec<f64> = masses.iter().map(|m| m / total).collect();
        let pts = common::equilateral_positions(&[masses[0], masses[1], masses[2]]);
        let m = Masses::from_points(&masses).unwrap();
        let cfg = Configuration::from_points(Dim::Two, &pts, m.clone());
        let df = jacobian_full(&cfg).unwrap().mid();
        let reduced: Vec<Interval> = pts[..4].iter().map(|&x| Interval::point(x)).collect();
        let dfred = jacobian_full_red(&reduced, &m, Dim::Two).unwrap().mid();
        let (r1, r2) = (numeric_rank(&df, RANK_TOL), numeric_rank(&dfred, RANK_TOL));
        assert_eq!(r1, 2 * 3 - 1, "non-degenerate planar nCC");
        assert_eq!(r1 - r2, 2, "reduction drops exactly d");

        // unit tetrahedron with random masses
        let masses: Vec<f64> = (0..4).map(|_| rng.uniform(0.1, 1.0)).collect();
        let total: f64 = masses.iter().sum();
        let masses: Vec<f64> = masses.iter().map(|m| m / total).collect();
        let v = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.5, 3f64.sqrt() / 2.0, 0.0],
            [0.5, 3f64.sqrt() / 6.0, 6f64.sqrt() / 3.0],
        ];
        let com: Vec<f64> = (0..3)
            .map(|c| v.iter().zip(&masses).map(|(p, w)| p[c] * w).sum())
            .collect();
        let pts: Vec<f64> = v.iter().flat_map(|p| [p[0] - com[0], p[1] - com[1], p[2] - com[2]]).collect();
        let m = Masses::from_points(&masses).unwrap();
        let cfg = Configuration::from_points(Dim::Three, &pts, m.clone());
        let df = jacobian_full(&cfg).unwrap().mid();
        let reduced: Vec<Interval> = pts[..9].iter().map(|&x| Interval::point(x)).collect();
        let dfred = jacobian_full_red(&reduced, &m, Dim::Three).unwrap().mid();
        let (r1, r2) = (numeric_rank(&df, RANK_TOL), numeric_rank(&dfred, RANK_TOL));
        assert_eq!(r1, 3 * 4 - 3, "non-degenerate spatial nCC");
        assert_eq!(r1 - r2, 3);
    }
}
