//! The equations of motion side of the problem: configurations, masses,
//! the full system `F`, its center-of-mass reduction `F^red`, the reduced
//! systems `RS` in 2D and 3D, analytic Jacobians, and the block matrices
//! of collinear configurations.
//!
//! Conventions. Bodies are 0-indexed slots. The last slot (`n-1`) is the
//! body eliminated by the center-of-mass condition; the slot before it is
//! the body pinned to the OX-axis; in 3D the slot before that is pinned to
//! the OXY-plane. A `ReducedBox` carries the permutation mapping slots to
//! the caller's original body labels.

mod collinear;
mod equations;
mod jacobian;

pub use collinear::{collinear_blocks, CollinearBlocks};
pub use equations::{
    com_wedge_identity, eval_f, eval_f_sums, eval_full, eval_full_red, eval_r_red, eval_rs,
    eval_rs_partial, qn_from_com, wedge,
};
pub use jacobian::{check_row_col_identities, jacobian_full, jacobian_full_red, jacobian_rs};

use crate::interval::{numeric_rank as iv_numeric_rank, Interval, IntervalVector};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Spatial dimension of the problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    #[inline]
    pub fn d(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Number of free coordinates of the reduced system for `n` bodies.
    pub fn rs_dim(self, n: usize) -> usize {
        match self {
            Dim::Two => 2 * (n - 1) - 1,
            Dim::Three => 3 * (n - 1) - 3,
        }
    }

    /// dim SO(d)·q for a collision-free configuration.
    pub fn so_orbit_dim(self, collinear: bool) -> usize {
        match self {
            Dim::Two => 1,
            Dim::Three => {
                if collinear {
                    2
                } else {
                    3
                }
            }
        }
    }
}

/// Positive masses, optionally normalized so that their sum encloses 1.
///
/// Masses are stored as intervals: exact inputs are degenerate intervals,
/// while masses derived from decimal strings or mass-relation roots carry
/// their enclosure widths through every downstream computation.
#[derive(Clone, Debug, PartialEq)]
pub struct Masses {
    vals: Vec<Interval>,
}

impl Masses {
    pub fn new(vals: Vec<Interval>) -> Result<Masses> {
        if vals.len() < 2 {
            return Err(Error::Precondition("need at least two bodies"));
        }
        if vals.iter().any(|m| m.lo() <= 0.0) {
            return Err(Error::Precondition("masses must be strictly positive"));
        }
        Ok(Masses { vals })
    }

    pub fn from_points(vals: &[f64]) -> Result<Masses> {
        Masses::new(vals.iter().map(|&m| Interval::point(m)).collect())
    }

    /// Rescale so the sum encloses exactly 1.
    pub fn normalize(&self) -> Masses {
        let total: Interval = self.vals.iter().copied().sum();
        let vals = self
            .vals
            .iter()
            .map(|m| m.try_div(&total).expect("positive total mass"))
            .collect();
        Masses { vals }
    }

    pub fn is_normalized(&self) -> bool {
        self.vals.iter().copied().sum::<Interval>().contains(1.0)
    }

    pub fn n(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Interval {
        self.vals[i]
    }

    pub fn as_slice(&self) -> &[Interval] {
        &self.vals
    }

    pub fn permuted(&self, perm: &[usize]) -> Masses {
        Masses { vals: perm.iter().map(|&i| self.vals[i]).collect() }
    }

    /// Groups of body indices with identical mass intervals. Bodies are
    /// interchangeable exactly when their parsed mass values are identical.
    pub fn equal_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<(Interval, Vec<usize>)> = Vec::new();
        for (i, m) in self.vals.iter().enumerate() {
            match groups.iter_mut().find(|(g, _)| g == m) {
                Some((_, idxs)) => idxs.push(i),
                None => groups.push((*m, vec![i])),
            }
        }
        groups.into_iter().map(|(_, idxs)| idxs).collect()
    }

    /// Σ_{i<j} m_i m_j, used by the a-priori farthest-body bound.
    pub fn pair_product_sum(&self) -> Interval {
        let n = self.n();
        let mut acc = Interval::ZERO;
        for i in 0..n {
            for j in i + 1..n {
                acc = acc + self.vals[i] * self.vals[j];
            }
        }
        acc
    }
}

/// `n` body position enclosures in R^d plus masses.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub dim: Dim,
    /// Body-major flat layout: positions[i*d + c].
    positions: Vec<Interval>,
    pub masses: Masses,
}

impl Configuration {
    pub fn new(dim: Dim, positions: Vec<Interval>, masses: Masses) -> Configuration {
        assert_eq!(positions.len(), masses.n() * dim.d(), "position/mass length mismatch");
        Configuration { dim, positions, masses }
    }

    pub fn from_points(dim: Dim, points: &[f64], masses: Masses) -> Configuration {
        Configuration::new(
            dim,
            points.iter().map(|&x| Interval::point(x)).collect(),
            masses,
        )
    }

    pub fn n(&self) -> usize {
        self.masses.n()
    }

    #[inline]
    pub fn body(&self, i: usize) -> &[Interval] {
        let d = self.dim.d();
        &self.positions[i * d..(i + 1) * d]
    }

    pub fn positions(&self) -> &[Interval] {
        &self.positions
    }

    /// Enclosure of the squared distance between bodies `i` and `j`.
    pub fn r2(&self, i: usize, j: usize) -> Interval {
        let (a, b) = (self.body(i), self.body(j));
        (0..self.dim.d()).map(|c| (a[c] - b[c]).square()).sum()
    }

    /// Enclosure of |q_i|².
    pub fn norm2(&self, i: usize) -> Interval {
        self.body(i).iter().map(|x| x.square()).sum()
    }

    /// True when every pairwise squared distance has a positive lower bound.
    pub fn certainly_collision_free(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (i + 1..n).all(|j| self.r2(i, j).lo() > 0.0))
    }
}

/// Interval box over the free coordinates of a reduced system.
///
/// Free layout, d=2: `(x_0, y_0, …, x_{n-3}, y_{n-3}, x_{n-2})` with
/// `y_{n-2} ≡ 0`; d=3: `(x_0, y_0, z_0, …, x_{n-4}, y_{n-4}, z_{n-4},
/// x_{n-3}, y_{n-3}, x_{n-2})` with `y_{n-2} = z_{n-2} = z_{n-3} ≡ 0`.
/// Slot `n-1` is eliminated via the center of mass. Pinned coordinates are
/// exact zeros, not thin intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedBox {
    pub dim: Dim,
    /// Masses in slot order (already permuted).
    pub masses: Masses,
    free: Vec<Interval>,
    /// perm[slot] = original body label.
    pub perm: Vec<usize>,
}

impl ReducedBox {
    pub fn new(dim: Dim, masses: Masses, free: Vec<Interval>, perm: Vec<usize>) -> ReducedBox {
        let n = masses.n();
        assert_eq!(free.len(), dim.rs_dim(n), "free coordinate count mismatch");
        assert_eq!(perm.len(), n);
        ReducedBox { dim, masses, free, perm }
    }

    pub fn identity_perm(dim: Dim, masses: Masses, free: Vec<Interval>) -> ReducedBox {
        let n = masses.n();
        ReducedBox::new(dim, masses, free, (0..n).collect())
    }

    pub fn n(&self) -> usize {
        self.masses.n()
    }

    pub fn free(&self) -> &[Interval] {
        &self.free
    }

    pub fn free_mut(&mut self) -> &mut [Interval] {
        &mut self.free
    }

    /// Map free-coordinate index -> (body slot, coordinate axis).
    pub fn free_index_map(&self) -> Vec<(usize, usize)> {
        rs_coords(self.dim, self.n())
    }

    /// The OX-pinned body's x-coordinate (the last free coordinate).
    pub fn x_pinned(&self) -> Interval {
        *self.free.last().expect("nonempty")
    }

    /// Positions of the first n-1 bodies with pins inserted, body-major.
    pub fn reduced_positions(&self) -> Vec<Interval> {
        let (n, d) = (self.n(), self.dim.d());
        let mut out = vec![Interval::ZERO; (n - 1) * d];
        for (k, &(slot, c)) in rs_coords(self.dim, n).iter().enumerate() {
            out[slot * d + c] = self.free[k];
        }
        out
    }

    /// Full configuration enclosure with the last body reconstructed from
    /// the center-of-mass condition.
    pub fn configuration(&self) -> Configuration {
        let (n, d) = (self.n(), self.dim.d());
        let mut pos = self.reduced_positions();
        let qn = qn_from_com(&pos, &self.masses, self.dim);
        pos.extend_from_slice(&qn);
        debug_assert_eq!(pos.len(), n * d);
        Configuration::new(self.dim, pos, self.masses.clone())
    }

    /// Largest free-coordinate width.
    pub fn max_width(&self) -> f64 {
        self.free.iter().map(|x| x.width()).fold(0.0, f64::max)
    }

    /// Index of the widest free coordinate (ties to the lowest index).
    pub fn widest_coord(&self) -> usize {
        let mut best = 0;
        let mut w = -1.0;
        for (k, x) in self.free.iter().enumerate() {
            let wk = x.width();
            if wk > w {
                w = wk;
                best = k;
            }
        }
        best
    }

    /// Midpoint box (degenerate intervals at each coordinate midpoint).
    pub fn midpoint_box(&self) -> ReducedBox {
        let free = self.free.iter().map(|x| Interval::point(x.mid())).collect();
        ReducedBox::new(self.dim, self.masses.clone(), free, self.perm.clone())
    }

    pub fn free_vector(&self) -> IntervalVector {
        IntervalVector::from_vec(self.free.clone())
    }

    pub fn with_free(&self, free: Vec<Interval>) -> ReducedBox {
        ReducedBox::new(self.dim, self.masses.clone(), free, self.perm.clone())
    }
}

/// Free coordinates of the reduced system as (body slot, axis) pairs, in
/// the order used by every flat `ReducedBox`, Jacobian row and column.
pub fn rs_coords(dim: Dim, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(dim.rs_dim(n));
    match dim {
        Dim::Two => {
            for slot in 0..n - 2 {
                out.push((slot, 0));
                out.push((slot, 1));
            }
            out.push((n - 2, 0));
        }
        Dim::Three => {
            for slot in 0..n - 3 {
                out.push((slot, 0));
                out.push((slot, 1));
                out.push((slot, 2));
            }
            out.push((n - 3, 0));
            out.push((n - 3, 1));
            out.push((n - 2, 0));
        }
    }
    out
}

/// Rank by singular-value thresholding. The default tolerance used across
/// the crate is `1e-8 × σ_max`; rank statements from the theory are exact
/// and are evaluated here at well-conditioned certified points.
pub fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    iv_numeric_rank(m, tol)
}

pub const RANK_TOL: f64 = 1e-8;
