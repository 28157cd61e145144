//! Test-side oracles, independent of the interval implementation: plain
//! f64 Newton/bisection solvers whose outputs seed and cross-check the
//! rigorous machinery.

#![allow(dead_code)]

use cencon::interval::Interval;
use cencon::model::{Dim, Masses, ReducedBox};

/// Residual of the collinear normalized system in plain f64.
pub fn f_line(x: &[f64], m: &[f64]) -> Vec<f64> {
    let n = m.len();
    let mut f = x.to_vec();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = x[i] - x[j];
            f[i] -= m[j] * dx / (dx.abs().powi(3));
        }
    }
    f
}

/// Euler's quintic for three collinear bodies (ordering 1 < 2 < 3) in the
/// gap-ratio variable s = r12/r23; the unique positive root is found by
/// bisection. Independent of everything else in this crate.
pub fn euler_quintic_root(m1: f64, m2: f64, m3: f64) -> f64 {
    let p = |s: f64| -> f64 {
        (m2 + m3) * s.powi(5) + (2.0 * m2 + 3.0 * m3) * s.powi(4)
            + (m2 + 3.0 * m3) * s.powi(3)
            - (3.0 * m1 + m2) * s.powi(2)
            - (3.0 * m1 + 2.0 * m2) * s
            - (m1 + m2)
    };
    let (mut lo, mut hi) = (1e-9, 1e9);
    assert!(p(lo) < 0.0 && p(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Collinear normalized central configuration for the given ordering
/// (bodies placed left to right in index order): damped Newton with a
/// finite-difference Jacobian on the full line system plus the
/// center-of-mass anchor. Plain f64 throughout.
pub fn moulton_oracle(m: &[f64]) -> Vec<f64> {
    let n = m.len();
    let total: f64 = m.iter().sum();
    let mut x: Vec<f64> = (0..n).map(|i| -1.2 + 2.4 * i as f64 / (n - 1) as f64).collect();
    let com: f64 = x.iter().zip(m).map(|(a, b)| a * b).sum::<f64>() / total;
    x.iter_mut().for_each(|v| *v -= com);

    for _ in 0..400 {
        let f = f_line(&x, m);
        let com: f64 = x.iter().zip(m).map(|(a, b)| a * b).sum::<f64>() / total;
        let mut rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        rhs.push(-com);
        // finite-difference Jacobian of (f, com)
        let h = 1e-7;
        let rows = n + 1;
        let mut jac = vec![vec![0.0f64; n]; rows];
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = f_line(&xp, m);
            let fm = f_line(&xm, m);
            for i in 0..n {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
            jac[n][j] = m[j] / total;
        }
        let dx = solve_least_squares(&jac, &rhs);
        let mut step = 1.0;
        // keep the ordering while stepping
        loop {
            let cand: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + step * d).collect();
            if cand.windows(2).all(|w| w[0] < w[1]) {
                x = cand;
                break;
            }
            step *= 0.5;
            assert!(step > 1e-12, "Newton step broke the ordering");
        }
        if dx.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-14 {
            break;
        }
    }
    let resid = f_line(&x, m).iter().map(|v| v.abs()).fold(0.0, f64::max);
    assert!(resid < 1e-12, "oracle residual {resid}");
    x
}

fn solve_least_squares(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    // normal equations; the systems here are tiny and well-conditioned
    let rows = a.len();
    let cols = a[0].len();
    let mut ata = vec![vec![0.0f64; cols]; cols];
    let mut atb = vec![0.0f64; cols];
    for i in 0..cols {
        for j in 0..cols {
            for k in 0..rows {
                ata[i][j] += a[k][i] * a[k][j];
            }
        }
        for k in 0..rows {
            atb[i] += a[k][i] * b[k];
        }
    }
    gauss_solve(&mut ata, &mut atb);
    atb
}

fn gauss_solve(a: &mut [Vec<f64>], b: &mut [f64]) {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-14, "singular oracle system");
        for row in col + 1..n {
            let f = a[row][col] / d;
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * b[k];
        }
        b[col] = s / a[col][col];
    }
}

/// Side-1 equilateral nCC positions (x1,y1,...) for arbitrary masses,
/// center of mass at the origin.
pub fn equilateral_positions(m: &[f64; 3]) -> [f64; 6] {
    let v = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
    let total: f64 = m.iter().sum();
    let cx: f64 = v.iter().zip(m).map(|(p, w)| p[0] * w).sum::<f64>() / total;
    let cy: f64 = v.iter().zip(m).map(|(p, w)| p[1] * w).sum::<f64>() / total;
    [
        v[0][0] - cx,
        v[0][1] - cy,
        v[1][0] - cx,
        v[1][1] - cy,
        v[2][0] - cx,
        v[2][1] - cy,
    ]
}

/// Scale of the square-plus-center nCC: four corner masses `mc` at
/// distance s from a central mass `m0`, normalized so λ = 1.
pub fn square_center_scale(mc: f64, m0: f64) -> f64 {
    (m0 + mc * (0.25 + 1.0 / 2f64.sqrt())).cbrt()
}

/// Scale of the centered equilateral triangle nCC (three corner masses
/// `mc` at distance R, central mass `m0`).
pub fn triangle_center_scale(mc: f64, m0: f64) -> f64 {
    (m0 + mc / 3f64.sqrt()).cbrt()
}

/// Builds a 2D reduced box from explicit slot positions; the OX slot's y
/// must be exactly zero, and the eliminated slot's position is implied.
pub fn reduced_box_2d(masses: &[f64], slots: &[[f64; 2]], width: f64) -> ReducedBox {
    let n = masses.len();
    assert_eq!(slots.len(), n - 1);
    assert_eq!(slots[n - 2][1], 0.0, "OX slot body must be on the axis");
    let m = Masses::from_points(masses).unwrap();
    let mut free = Vec::new();
    for (i, p) in slots.iter().enumerate() {
        free.push(Interval::point(p[0]).inflate(width));
        if i < n - 2 {
            free.push(Interval::point(p[1]).inflate(width));
        }
    }
    ReducedBox::identity_perm(Dim::Two, m, free)
}

/// Builds a 3D reduced box from explicit slot positions (pinned
/// coordinates must be exactly zero).
pub fn reduced_box_3d(masses: &[f64], slots: &[[f64; 3]], width: f64) -> ReducedBox {
    let n = masses.len();
    assert_eq!(slots.len(), n - 1);
    assert_eq!(slots[n - 2][1], 0.0);
    assert_eq!(slots[n - 2][2], 0.0);
    assert_eq!(slots[n - 3][2], 0.0);
    let m = Masses::from_points(masses).unwrap();
    let mut free = Vec::new();
    for (i, p) in slots.iter().enumerate() {
        if i < n - 3 {
            free.push(Interval::point(p[0]).inflate(width));
            free.push(Interval::point(p[1]).inflate(width));
            free.push(Interval::point(p[2]).inflate(width));
        } else if i == n - 3 {
            free.push(Interval::point(p[0]).inflate(width));
            free.push(Interval::point(p[1]).inflate(width));
        } else {
            free.push(Interval::point(p[0]).inflate(width));
        }
    }
    ReducedBox::identity_perm(Dim::Three, m, free)
}

/// Deterministic xorshift generator so oracle sampling needs no crates.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + u * (hi - lo)
    }

    pub fn pick(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
