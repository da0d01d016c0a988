//! Conditioning diagnostics for mode sets: Dirichlet-kernel Gram matrices,
//! the incoherence parameter `mu1`, order-of sample-complexity bounds, and the
//! grouped A-norms of lifted matrices.

use crate::error::{EmacError, Result};
use crate::hankel::{cs_factor, EnhancedMatrix, IndexGroups, PencilShape};
use ndarray::Array2;
use ndarray_linalg::{EigValsh, JobSvd, SVDDC, UPLO};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

/// Wraps a frequency difference into `[-1/2, 1/2)`.
pub fn wrap_half(f: f64) -> f64 {
    let mut r = f - f.round();
    if r >= 0.5 {
        r -= 1.0;
    }
    if r < -0.5 {
        r += 1.0;
    }
    r
}

/// Gram matrices of the mode set against the row-block (`G_L`) and
/// column-block (`G_R`) subspaces. Hermitian, PSD, unit diagonal.
#[derive(Debug, Clone)]
pub struct GramPair {
    pub g_l: Array2<Complex64>,
    pub g_r: Array2<Complex64>,
}

/// Scalar conditioning summary: least Gram singular values, `mu1`, the pencil
/// aspect penalty `cs`, and order-of sample bounds (universal constants
/// omitted — these are scalings, not certified thresholds).
#[derive(Debug, Clone, Serialize)]
pub struct IncoherenceReport {
    pub dims: (usize, usize),
    pub k1: usize,
    pub k2: usize,
    pub r: usize,
    pub sigma_min_l: f64,
    pub sigma_min_r: f64,
    /// `1 / min(sigma_min_l, sigma_min_r)`; `+inf` when a Gram is singular to
    /// working precision.
    pub mu1: f64,
    pub cs: f64,
    /// Order-of sample count for exact completion: `mu1 * cs * r * ln^4(n1 n2)`.
    pub bound_noiseless: f64,
    /// Order-of sample count with sparse corruptions: `mu1^2 * cs^2 * r^2 * ln^3(n1 n2)`.
    pub bound_robust: f64,
}

/// Normalized two-axis Dirichlet kernel: the product over axes of
/// `(1/k) * sum_{t=0}^{k-1} e^{-j 2 pi t f}`, evaluated in closed form with
/// the removable singularity at `f = 0` returning the limit 1.
pub fn dirichlet(k1: usize, k2: usize, f: (f64, f64)) -> Complex64 {
    axis_factor(k1, wrap_half(f.0)) * axis_factor(k2, wrap_half(f.1))
}

fn axis_factor(k: usize, f: f64) -> Complex64 {
    debug_assert!(k >= 1);
    if f.abs() < 1e-12 {
        return Complex64::new(1.0, 0.0);
    }
    let one = Complex64::new(1.0, 0.0);
    let num = one - Complex64::from_polar(1.0, -TAU * k as f64 * f);
    let den = one - Complex64::from_polar(1.0, -TAU * f);
    num / (den * k as f64)
}

/// Builds the Gram pair for a list of frequency tuples: entries are Dirichlet
/// kernels of pairwise wrapped differences, at pencil size (`G_L`) and
/// complement size (`G_R`).
pub fn gram_pair(freqs: &[[f64; 2]], shape: PencilShape) -> Result<GramPair> {
    if freqs.is_empty() {
        return Err(EmacError::EmptyFrequencies);
    }
    let (n1, n2) = shape.dims();
    let (k1, k2) = (shape.k1(), shape.k2());
    let (c1, c2) = (n1 - k1 + 1, n2 - k2 + 1);
    let r = freqs.len();
    let mut g_l = Array2::zeros((r, r));
    let mut g_r = Array2::zeros((r, r));
    for i in 0..r {
        for j in 0..r {
            let df = (wrap_half(freqs[i][0] - freqs[j][0]), wrap_half(freqs[i][1] - freqs[j][1]));
            g_l[[i, j]] = dirichlet(k1, k2, df);
            g_r[[i, j]] = dirichlet(c1, c2, df);
        }
    }
    Ok(GramPair { g_l, g_r })
}

/// Least eigenvalue of the symmetrized Gram, clamped at zero.
fn sigma_min_hermitian(g: &Array2<Complex64>) -> Result<f64> {
    let sym = (g + &g.t().mapv(|z| z.conj())).mapv(|z| 0.5 * z);
    let vals = sym.eigvalsh(UPLO::Lower)?;
    Ok(vals[0].max(0.0))
}

/// Full conditioning report for a mode set on a pencil.
pub fn incoherence_report(freqs: &[[f64; 2]], shape: PencilShape) -> Result<IncoherenceReport> {
    let grams = gram_pair(freqs, shape)?;
    let sigma_min_l = sigma_min_hermitian(&grams.g_l)?;
    let sigma_min_r = sigma_min_hermitian(&grams.g_r)?;
    let least = sigma_min_l.min(sigma_min_r);
    let mu1 = if least <= 1e-12 { f64::INFINITY } else { 1.0 / least };
    let (n1, n2) = shape.dims();
    let r = freqs.len();
    let cs = cs_factor(shape);
    let log_total = ((n1 * n2) as f64).ln();
    Ok(IncoherenceReport {
        dims: shape.dims(),
        k1: shape.k1(),
        k2: shape.k2(),
        r,
        sigma_min_l,
        sigma_min_r,
        mu1,
        cs,
        bound_noiseless: mu1 * cs * r as f64 * log_total.powi(4),
        bound_robust: mu1.powi(2) * cs.powi(2) * (r * r) as f64 * log_total.powi(3),
    })
}

/// Grouped norms of a lifted matrix: `a_inf` is the largest group-mean
/// magnitude, `a_two` the root sum of squared group means. They satisfy
/// `a_two <= sqrt(n1 n2) * a_inf`.
pub fn a_norms(m: &Array2<Complex64>, shape: PencilShape) -> Result<(f64, f64)> {
    if m.dim() != (shape.rows(), shape.cols()) {
        return Err(EmacError::DimensionMismatch(format!(
            "matrix {:?} vs lifted shape {}x{}",
            m.dim(),
            shape.rows(),
            shape.cols()
        )));
    }
    let groups = IndexGroups::new(shape);
    let means = groups.means(m);
    let mut a_inf = 0.0f64;
    let mut sum_sq = 0.0f64;
    for v in means.values.iter() {
        let mag = v.norm();
        a_inf = a_inf.max(mag);
        sum_sq += mag * mag;
    }
    Ok((a_inf, sum_sq.sqrt()))
}

/// Subspace-based incoherence diagnostic over an arbitrary lifted matrix: the
/// largest grouped energy of the rank-`r` singular subspaces, rescaled by
/// `n1 n2 / (cs r)`. Reported as computed — there is no procedure certifying
/// it as the minimal constant, so treat it as a lower-bound witness.
pub fn subspace_incoherence(e: &EnhancedMatrix, r: usize) -> Result<f64> {
    let (rows, cols) = e.data.dim();
    if r == 0 || r > rows.min(cols) {
        return Err(EmacError::DimensionMismatch(format!(
            "rank {r} outside [1, {}] for a {rows}x{cols} matrix",
            rows.min(cols)
        )));
    }
    let (u, _sv, vt) = e.data.svddc(JobSvd::Some)?;
    let u = u.ok_or_else(|| EmacError::Backend("svd returned no U".into()))?;
    let vt = vt.ok_or_else(|| EmacError::Backend("svd returned no V^T".into()))?;

    // Row energies of the leading r left/right singular vectors.
    let u_energy: Vec<f64> =
        (0..rows).map(|a| (0..r).map(|i| u[[a, i]].norm_sqr()).sum()).collect();
    let v_energy: Vec<f64> =
        (0..cols).map(|b| (0..r).map(|i| vt[[i, b]].norm_sqr()).sum()).collect();

    let groups = IndexGroups::new(e.shape);
    let mut worst = 0.0f64;
    for g in 0..groups.group_count() {
        let slots = groups.group_slots(g);
        let omega = slots.len() as f64;
        let mut left = 0.0;
        let mut right = 0.0;
        for &s in slots {
            left += u_energy[s / cols];
            right += v_energy[s % cols];
        }
        worst = worst.max(left / omega).max(right / omega);
    }
    let (n1, n2) = e.shape.dims();
    Ok(worst * (n1 * n2) as f64 / (cs_factor(e.shape) * r as f64))
}
