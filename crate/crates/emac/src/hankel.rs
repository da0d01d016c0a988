//! Two-fold Hankel lifting: the enhanced matrix, its index groups and
//! multiplicities, averaging/projection back to the grid, and the
//! Vandermonde-style factorization of lifted signals.

use crate::error::{EmacError, Result};
use crate::signal::{pole_powers, DataGrid, SpectralSignal};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

/// Pencil parameters for the two-fold Hankel lift of an `n1 x n2` grid.
///
/// The lifted matrix has `k1*k2` rows and `(n1-k1+1)*(n2-k2+1)` columns: rows
/// are indexed by `(a1, a2)` with `0 <= a1 < k1`, `0 <= a2 < k2` and columns
/// by `(b1, b2)` with `0 <= b1 <= n1-k1`, `0 <= b2 <= n2-k2`; position
/// `((a1,a2),(b1,b2))` holds grid entry `(a1+b1, a2+b2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PencilShape {
    dims: (usize, usize),
    k1: usize,
    k2: usize,
}

impl PencilShape {
    pub fn new(dims: (usize, usize), k1: usize, k2: usize) -> Result<Self> {
        let (n1, n2) = dims;
        if n1 == 0 || n2 == 0 {
            return Err(EmacError::DimensionMismatch(format!("dims {dims:?} must be positive")));
        }
        if k1 == 0 || k1 > n1 || k2 == 0 || k2 > n2 {
            return Err(EmacError::DimensionMismatch(format!(
                "pencil ({k1}, {k2}) outside [1,{n1}] x [1,{n2}]"
            )));
        }
        Ok(PencilShape { dims, k1, k2 })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    /// Row count of the lifted matrix: `k1 * k2`.
    pub fn rows(&self) -> usize {
        self.k1 * self.k2
    }

    /// Column count of the lifted matrix: `(n1-k1+1) * (n2-k2+1)`.
    pub fn cols(&self) -> usize {
        let (n1, n2) = self.dims;
        (n1 - self.k1 + 1) * (n2 - self.k2 + 1)
    }
}

/// Pencil choice that makes the lifted matrix squarest (minimal aspect
/// penalty): `k = ceil((n+1)/2)` per axis.
pub fn default_pencil(n1: usize, n2: usize) -> Result<PencilShape> {
    PencilShape::new((n1, n2), (n1 + 2) / 2, (n2 + 2) / 2)
}

/// The lifted (block-of-blocks Hankel) matrix together with its shape.
///
/// Structure invariant: all positions of any one index group hold equal
/// values. Both constructors in this module guarantee it.
#[derive(Debug, Clone)]
pub struct EnhancedMatrix {
    pub shape: PencilShape,
    pub data: Array2<Complex64>,
}

impl EnhancedMatrix {
    /// Largest within-group spread, for checking the structure invariant on
    /// arbitrary data (0 for genuinely structured matrices).
    pub fn structure_defect(&self) -> f64 {
        let groups = IndexGroups::new(self.shape);
        let mut worst = 0.0f64;
        for g in 0..groups.group_count() {
            let slots = groups.group_slots(g);
            let first = self.data.as_slice().expect("standard layout")[slots[0]];
            for &s in slots {
                worst = worst.max((self.data.as_slice().unwrap()[s] - first).norm());
            }
        }
        worst
    }
}

/// Multiplicities `omega_{k,l}`: how many lifted positions hold copies of grid
/// entry `(k, l)`.
#[derive(Debug, Clone)]
pub struct MultiplicityMap {
    pub shape: PencilShape,
    pub omega: Array2<usize>,
}

/// Flattened index-group table for one shape, in CSR layout: group `k*n2 + l`
/// owns a contiguous slice of flat positions `row*cols + col` of the lifted
/// matrix. Built once and reused by the averaging, projection, and solver hot
/// loops.
#[derive(Debug, Clone)]
pub struct IndexGroups {
    shape: PencilShape,
    offsets: Vec<usize>,
    slots: Vec<usize>,
}

impl IndexGroups {
    pub fn new(shape: PencilShape) -> Self {
        let (n1, n2) = shape.dims();
        let (k1, k2) = (shape.k1(), shape.k2());
        let (c1, c2) = (n1 - k1 + 1, n2 - k2 + 1);
        let cols = shape.cols();
        let mut offsets = Vec::with_capacity(n1 * n2 + 1);
        let mut slots = Vec::with_capacity(shape.rows() * cols);
        offsets.push(0);
        for k in 0..n1 {
            // a1 ranges over row-block splits k = a1 + b1.
            let a1_lo = k.saturating_sub(c1 - 1);
            let a1_hi = k.min(k1 - 1);
            for l in 0..n2 {
                let a2_lo = l.saturating_sub(c2 - 1);
                let a2_hi = l.min(k2 - 1);
                for a1 in a1_lo..=a1_hi {
                    let b1 = k - a1;
                    for a2 in a2_lo..=a2_hi {
                        let b2 = l - a2;
                        let row = a1 * k2 + a2;
                        let col = b1 * c2 + b2;
                        slots.push(row * cols + col);
                    }
                }
                offsets.push(slots.len());
            }
        }
        IndexGroups { shape, offsets, slots }
    }

    pub fn shape(&self) -> PencilShape {
        self.shape
    }

    pub fn group_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Flat lifted-matrix positions (`row*cols + col`) of group `g = k*n2 + l`.
    pub fn group_slots(&self, g: usize) -> &[usize] {
        &self.slots[self.offsets[g]..self.offsets[g + 1]]
    }

    /// Group mean over arbitrary lifted data, exact when all copies are equal
    /// (computed as `first + sum(deviation)/count`, so equal copies return the
    /// common value bit-for-bit).
    fn group_mean(&self, data: &[Complex64], g: usize) -> Complex64 {
        let slots = self.group_slots(g);
        let first = data[slots[0]];
        if slots.len() == 1 {
            return first;
        }
        let mut dev = Complex64::new(0.0, 0.0);
        for &s in slots {
            dev += data[s] - first;
        }
        first + dev / slots.len() as f64
    }

    /// All group means as a grid (the averaging left-inverse of the lift).
    pub fn means(&self, data: &Array2<Complex64>) -> DataGrid {
        let (n1, n2) = self.shape.dims();
        let flat = data.as_slice().expect("standard layout");
        let mut out = Array2::zeros((n1, n2));
        for k in 0..n1 {
            for l in 0..n2 {
                out[[k, l]] = self.group_mean(flat, k * n2 + l);
            }
        }
        DataGrid::new(out)
    }

    /// Writes `value(k, l)` into every slot of each group, producing a
    /// structured matrix.
    pub fn fill(&self, mut value: impl FnMut(usize, usize) -> Complex64) -> EnhancedMatrix {
        let (_, n2) = self.shape.dims();
        let mut data = Array2::zeros((self.shape.rows(), self.shape.cols()));
        {
            let flat = data.as_slice_mut().expect("standard layout");
            for g in 0..self.group_count() {
                let v = value(g / n2, g % n2);
                for &s in self.group_slots(g) {
                    flat[s] = v;
                }
            }
        }
        EnhancedMatrix { shape: self.shape, data }
    }
}

/// All lifted-matrix positions holding copies of grid entry `(k, l)`.
pub fn index_group(k: usize, l: usize, shape: PencilShape) -> Result<Vec<(usize, usize)>> {
    let (n1, n2) = shape.dims();
    if k >= n1 || l >= n2 {
        return Err(EmacError::OutOfRange(k, l, n1, n2));
    }
    let groups = IndexGroups::new(shape);
    let cols = shape.cols();
    Ok(groups.group_slots(k * n2 + l).iter().map(|&s| (s / cols, s % cols)).collect())
}

/// Multiplicity table for a shape.
pub fn multiplicities(shape: PencilShape) -> MultiplicityMap {
    let (n1, n2) = shape.dims();
    let groups = IndexGroups::new(shape);
    let omega = Array2::from_shape_fn((n1, n2), |(k, l)| groups.group_slots(k * n2 + l).len());
    MultiplicityMap { shape, omega }
}

/// Lifts a grid to its enhanced (two-fold Hankel) matrix.
pub fn enhance(grid: &DataGrid, shape: PencilShape) -> Result<EnhancedMatrix> {
    if grid.dims() != shape.dims() {
        return Err(EmacError::DimensionMismatch(format!(
            "grid {:?} vs shape dims {:?}",
            grid.dims(),
            shape.dims()
        )));
    }
    let groups = IndexGroups::new(shape);
    Ok(groups.fill(|k, l| grid.values[[k, l]]))
}

/// Rank-revealing factorization of a lifted signal: returns `(L, d, R)` with
/// `L * diag(d) * R` equal to `enhance(synthesize(signal))`. `L` stacks the
/// per-row-block mode powers (`L[(a1,a2), i] = y_i^{a1} z_i^{a2}`), `R` the
/// per-column-block powers; the normalized factors of the subspace analysis
/// are `L/sqrt(rows)` and `R/sqrt(cols)`.
pub fn enhanced_factors(
    signal: &SpectralSignal,
    shape: PencilShape,
) -> Result<(Array2<Complex64>, Array1<Complex64>, Array2<Complex64>)> {
    let r = signal.sparsity();
    if r == 0 {
        return Err(EmacError::EmptySignal);
    }
    if signal.dims() != shape.dims() {
        return Err(EmacError::DimensionMismatch(format!(
            "signal {:?} vs shape dims {:?}",
            signal.dims(),
            shape.dims()
        )));
    }
    let (n1, n2) = shape.dims();
    let (k1, k2) = (shape.k1(), shape.k2());
    let (c1, c2) = (n1 - k1 + 1, n2 - k2 + 1);
    let mut left = Array2::zeros((shape.rows(), r));
    let mut right = Array2::zeros((r, shape.cols()));
    let mut d = Array1::zeros(r);
    for (i, mode) in signal.modes().iter().enumerate() {
        let y_pow = pole_powers(mode.freq[0], mode.damping[0], n1);
        let z_pow = pole_powers(mode.freq[1], mode.damping[1], n2);
        for a1 in 0..k1 {
            for a2 in 0..k2 {
                left[[a1 * k2 + a2, i]] = y_pow[a1] * z_pow[a2];
            }
        }
        for b1 in 0..c1 {
            for b2 in 0..c2 {
                right[[i, b1 * c2 + b2]] = y_pow[b1] * z_pow[b2];
            }
        }
        d[i] = mode.amplitude;
    }
    Ok((left, d, right))
}

/// Collapses a lifted matrix back to the grid by averaging each index group.
/// Exact left-inverse of [`enhance`].
pub fn dehankel_average(e: &EnhancedMatrix) -> DataGrid {
    IndexGroups::new(e.shape).means(&e.data)
}

/// Projects arbitrary lifted data onto the Hankel structure while pinning
/// observed grid entries: observed groups take the observed value, unobserved
/// groups take the mean of `q` over the group. With an empty observation list
/// this is the orthogonal projection onto the structure subspace.
pub fn structure_project(
    q: &Array2<Complex64>,
    observed: &[((usize, usize), Complex64)],
    shape: PencilShape,
) -> Result<EnhancedMatrix> {
    if q.dim() != (shape.rows(), shape.cols()) {
        return Err(EmacError::DimensionMismatch(format!(
            "lifted data {:?} vs shape {}x{}",
            q.dim(),
            shape.rows(),
            shape.cols()
        )));
    }
    let groups = IndexGroups::new(shape);
    let pinned = pin_observations(observed, shape)?;
    let flat = q.as_slice().expect("standard layout");
    let (_, n2) = shape.dims();
    Ok(groups.fill(|k, l| match pinned[k * n2 + l] {
        Some(v) => v,
        None => groups.group_mean(flat, k * n2 + l),
    }))
}

/// Validates an observation list against a shape and spreads it into a flat
/// `Option` table indexed by `k*n2 + l`.
pub(crate) fn pin_observations(
    observed: &[((usize, usize), Complex64)],
    shape: PencilShape,
) -> Result<Vec<Option<Complex64>>> {
    let (n1, n2) = shape.dims();
    let mut pinned = vec![None; n1 * n2];
    for &((k, l), v) in observed {
        if k >= n1 || l >= n2 {
            return Err(EmacError::OutOfRange(k, l, n1, n2));
        }
        let slot = &mut pinned[k * n2 + l];
        if slot.is_some() {
            return Err(EmacError::DuplicateObservation(k, l));
        }
        *slot = Some(v);
    }
    Ok(pinned)
}

/// Aspect penalty of the pencil: `max(n1 n2 / (k1 k2), n1 n2 / cols)`, equal
/// to 1 only in the impossible perfectly-square limit; smaller is better.
pub fn cs_factor(shape: PencilShape) -> f64 {
    let (n1, n2) = shape.dims();
    let total = (n1 * n2) as f64;
    (total / shape.rows() as f64).max(total / shape.cols() as f64)
}

/// Reverses the row order of a lifted matrix, converting block-Hankel to
/// block-Toeplitz. Involutive and singular-value preserving.
pub fn toeplitz_from_hankel(e: &EnhancedMatrix) -> Array2<Complex64> {
    let rows = e.data.nrows();
    let mut out = Array2::zeros(e.data.raw_dim());
    for r in 0..rows {
        out.row_mut(r).assign(&e.data.row(rows - 1 - r));
    }
    out
}
