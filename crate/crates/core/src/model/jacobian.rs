//! Analytic interval Jacobians of `F`, `F^red` and `RS`.
//!
//! The pair kernel is `∂F_i/∂q_j = m_j (I/r³ - 3 u uᵀ/r⁵)` for `j ≠ i`
//! with `u = q_i - q_j`, and the diagonal block is `I` minus the sum of
//! the same kernels. The reduced Jacobian chains through the eliminated
//! body (`∂q_n/∂q_j = -(m_j/m_n) I`), and the RS Jacobian keeps exactly
//! the rows and columns of the free coordinates.

use super::{rs_coords, Configuration, Dim, Masses, ReducedBox};
use crate::interval::{Interval, IntervalMatrix, IntervalVector};
use crate::Result;

/// d×d pair kernel blocks P_ij = I/r³ - 3 u uᵀ/r⁵ for one configuration.
struct PairKernels {
    n: usize,
    d: usize,
    /// (i,j) block at [(i*n+j)*d*d ..], valid for i ≠ j; P_ij = P_ji.
    blocks: Vec<Interval>,
}

impl PairKernels {
    fn compute(dim: Dim, n: usize, positions: &[Interval]) -> Result<PairKernels> {
        let d = dim.d();
        let mut blocks = vec![Interval::ZERO; n * n * d * d];
        for i in 0..n {
            for j in i + 1..n {
                let u: Vec<Interval> =
                    (0..d).map(|c| positions[i * d + c] - positions[j * d + c]).collect();
                let r2: Interval = u.iter().map(|x| x.square()).sum();
                let k3 = r2.inv_r_cubed()?;
                let k5 = k3.try_div(&r2).map_err(|_| crate::Error::CollisionPossible)?;
                for a in 0..d {
                    for b in 0..d {
                        let mut v = u[a] * u[b] * k5 * -3.0;
                        if a == b {
                            v = v + k3;
                        }
                        blocks[(i * n + j) * d * d + a * d + b] = v;
                        blocks[(j * n + i) * d * d + a * d + b] = v;
                    }
                }
            }
        }
        Ok(PairKernels { n, d, blocks })
    }

    #[inline]
    fn block(&self, i: usize, j: usize, a: usize, b: usize) -> Interval {
        self.blocks[(i * self.n + j) * self.d * self.d + a * self.d + b]
    }
}

/// Jacobian of the full system `F`, dn×dn, body-major rows and columns.
pub fn jacobian_full(cfg: &Configuration) -> Result<IntervalMatrix> {
    let (n, d) = (cfg.n(), cfg.dim.d());
    let kernels = PairKernels::compute(cfg.dim, n, cfg.positions())?;
    let mut m = IntervalMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mj = cfg.masses.get(j);
            for a in 0..d {
                for b in 0..d {
                    let v = kernels.block(i, j, a, b) * mj;
                    m[(i * d + a, j * d + b)] = v;
                    // accumulate the diagonal block as I - Σ_j m_j P_ij
                    let cur = m[(i * d + a, i * d + b)];
                    m[(i * d + a, i * d + b)] = cur - v;
                }
            }
        }
        for a in 0..d {
            let cur = m[(i * d + a, i * d + a)];
            m[(i * d + a, i * d + a)] = cur + Interval::ONE;
        }
    }
    Ok(m)
}

/// Jacobian of `F^red` on the first n-1 bodies, (n-1)d square.
pub fn jacobian_full_red(
    reduced: &[Interval],
    masses: &Masses,
    dim: Dim,
) -> Result<IntervalMatrix> {
    let (n, d) = (masses.n(), dim.d());
    let mut pos = reduced.to_vec();
    pos.extend(super::qn_from_com(reduced, masses, dim));
    let cfg = Configuration::new(dim, pos, masses.clone());
    let full = jacobian_full(&cfg)?;
    let mn = masses.get(n - 1);
    let mut m = IntervalMatrix::zeros((n - 1) * d, (n - 1) * d);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let ratio = masses.get(j).try_div(&mn).expect("positive mass");
            for a in 0..d {
                for b in 0..d {
                    let direct = full[(i * d + a, j * d + b)];
                    let through_qn = full[(i * d + a, (n - 1) * d + b)] * ratio;
                    m[(i * d + a, j * d + b)] = direct - through_qn;
                }
            }
        }
    }
    Ok(m)
}

/// Jacobian of the reduced system over a box: `jacobian_full_red` with the
/// pinned rows and columns removed.
pub fn jacobian_rs(bx: &ReducedBox) -> Result<IntervalMatrix> {
    let (n, d) = (bx.n(), bx.dim.d());
    let reduced = bx.reduced_positions();
    let full_red = jacobian_full_red(&reduced, &bx.masses, bx.dim)?;
    let keep = rs_coords(bx.dim, n);
    let mut m = IntervalMatrix::zeros(keep.len(), keep.len());
    for (r, &(si, ci)) in keep.iter().enumerate() {
        for (c, &(sj, cj)) in keep.iter().enumerate() {
            m[(r, c)] = full_red[(si * d + ci, sj * d + cj)];
        }
    }
    Ok(m)
}

/// One vanishing row or column combination of `DF^red` at an nCC.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub combination: IntervalVector,
    pub encloses_zero: bool,
    pub max_width: f64,
}

/// Evaluates the six (two in 2D) linear combinations of rows and columns
/// of `DF^red` that vanish at a normalized central configuration. The
/// input should enclose an nCC; the report lists enclosure widths.
pub fn check_row_col_identities(bx: &ReducedBox) -> Result<Vec<IdentityCheck>> {
    let (n, d) = (bx.n(), bx.dim.d());
    let reduced = bx.reduced_positions();
    let masses = &bx.masses;
    let dim = bx.dim;
    let qn = super::qn_from_com(&reduced, masses, dim);
    let jac = jacobian_full_red(&reduced, masses, dim)?;
    let size = (n - 1) * d;
    let coord = |i: usize, c: usize| -> Interval {
        if c < d {
            reduced[i * d + c]
        } else {
            Interval::ZERO
        }
    };

    // row combinations: Σ_i m_i [ (α_i) DF^red_{i,cb} - (β_i) DF^red_{i,ca} ]
    let row_comb = |ca: usize, cb: usize| -> IntervalVector {
        let mut acc = IntervalVector::zeros(size);
        for i in 0..n - 1 {
            let alpha = (coord(i, ca) - qn[ca]) * masses.get(i);
            let beta = (coord(i, cb) - qn[cb]) * masses.get(i);
            for k in 0..size {
                acc[k] = acc[k] + alpha * jac[(i * d + cb, k)] - beta * jac[(i * d + ca, k)];
            }
        }
        acc
    };
    // column combinations: Σ_i [ -(col x_i)·coord_b + (col y_i)·coord_a ]
    let col_comb = |ca: usize, cb: usize| -> IntervalVector {
        let mut acc = IntervalVector::zeros(size);
        for i in 0..n - 1 {
            let (qa, qb) = (coord(i, ca), coord(i, cb));
            for k in 0..size {
                acc[k] = acc[k] - jac[(k, i * d + ca)] * qb + jac[(k, i * d + cb)] * qa;
            }
        }
        acc
    };

    let mut checks = vec![
        ("rows-xy", row_comb(0, 1)),
        ("cols-xy", col_comb(0, 1)),
    ];
    if dim == Dim::Three {
        checks.push(("rows-yz", row_comb(1, 2)));
        checks.push(("rows-zx", row_comb(2, 0)));
        checks.push(("cols-yz", col_comb(1, 2)));
        checks.push(("cols-zx", col_comb(2, 0)));
    }
    Ok(checks
        .into_iter()
        .map(|(name, combination)| IdentityCheck {
            name,
            encloses_zero: combination.contains_zero(),
            max_width: combination.max_width(),
            combination,
        })
        .collect())
}
