//! Mode retrieval from completed 1-D data via the matrix-pencil method.
//!
//! Once a data vector is fully known (observed or completed), the pole of each
//! mode — damping times a unit phasor — is recovered from the shift invariance
//! of the signal subspace of a Hankel matrix built from the samples. Poles in
//! hand, amplitudes follow from a Vandermonde least-squares fit. Model order
//! is a required input here; completion itself never needed it.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::{Eig, JobSvd, LeastSquaresSvd, SVDDC};
use num_complex::Complex64;

use crate::error::{EmacError, Result};

/// Poles, frequencies, dampings, and amplitudes of the retrieved modes,
/// sorted by frequency. `residual` is the relative misfit of the Vandermonde
/// least-squares reconstruction: re-synthesizing from these modes reproduces
/// the input vector to within `residual` in relative l2 norm.
#[derive(Debug, Clone)]
pub struct RetrievedModes {
    pub poles: Vec<Complex64>,
    pub freqs: Vec<f64>,
    pub dampings: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub residual: f64,
}

/// Wraps a pole's angle into a frequency in [0, 1).
fn pole_freq(pole: Complex64) -> f64 {
    let f = pole.arg() / std::f64::consts::TAU;
    let wrapped = f.rem_euclid(1.0);
    // rem_euclid can return exactly 1.0 when f is a tiny negative number.
    if wrapped >= 1.0 {
        0.0
    } else {
        wrapped
    }
}

/// Moore-Penrose pseudo-inverse via truncated SVD, dropping singular values
/// below `1e-12 * sigma_1`.
fn pinv(m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (u, sv, vt) = m.svddc(JobSvd::Some)?;
    let u = u.ok_or_else(|| EmacError::Backend("SVD returned no U factor".into()))?;
    let vt = vt.ok_or_else(|| EmacError::Backend("SVD returned no Vt factor".into()))?;
    let cutoff = 1e-12 * sv.iter().cloned().fold(0.0f64, f64::max);
    let mut out = Array2::<Complex64>::zeros((m.ncols(), m.nrows()));
    for (i, &s) in sv.iter().enumerate() {
        if s > cutoff {
            let vi = vt.row(i).mapv(|z| z.conj());
            let ui = u.column(i).mapv(|z| z.conj() / s);
            for (a, &va) in vi.iter().enumerate() {
                for (b, &ub) in ui.iter().enumerate() {
                    out[[a, b]] += va * ub;
                }
            }
        }
    }
    Ok(out)
}

/// Estimates `r` mode poles from a length-`n` complex vector using the shift
/// invariance of the rank-`r` signal subspace of its `k x (n-k+1)` Hankel
/// matrix, then fits amplitudes by least squares.
///
/// `r` must satisfy `1 <= r <= min(k, n-k+1) - 1`; a singular-value ratio
/// `sigma_r / sigma_1 < 1e-12` is rejected as an overestimated model order.
pub fn matrix_pencil_1d(samples: &[Complex64], k: usize, r: usize) -> Result<RetrievedModes> {
    let n = samples.len();
    let cols = if k >= 1 && k <= n { n - k + 1 } else { 0 };
    let max_r = k.min(cols).saturating_sub(1);
    if r < 1 || r > max_r {
        return Err(EmacError::OrderTooLarge { r, k, n, max: max_r });
    }

    let hankel = Array2::from_shape_fn((k, cols), |(i, j)| samples[i + j]);
    let (u, sv, _) = hankel.svddc(JobSvd::Some)?;
    let u = u.ok_or_else(|| EmacError::Backend("SVD returned no U factor".into()))?;
    if sv[0] <= 0.0 || sv[r - 1] / sv[0] < 1e-12 {
        let ratio = if sv[0] > 0.0 { sv[r - 1] / sv[0] } else { 0.0 };
        return Err(EmacError::RankDeficient { r, ratio });
    }

    let u_r = u.slice(s![.., ..r]);
    let top = u_r.slice(s![..k - 1, ..]).to_owned();
    let bottom = u_r.slice(s![1.., ..]).to_owned();
    // The shift operator maps the subspace spanned by the first k-1 rows onto
    // the last k-1 rows; its eigenvalues are the mode poles.
    let shift = pinv(&top)?.dot(&bottom);
    let (eigs, _) = shift.eig()?;

    let mut poles: Vec<Complex64> = eigs.to_vec();
    poles.sort_by(|a, b| {
        pole_freq(*a)
            .partial_cmp(&pole_freq(*b))
            .unwrap()
            .then(a.norm().partial_cmp(&b.norm()).unwrap())
    });

    let (amplitudes, residual) = fit_amplitudes(samples, &poles)?;
    Ok(RetrievedModes {
        freqs: poles.iter().map(|&p| pole_freq(p)).collect(),
        dampings: poles.iter().map(|p| p.norm()).collect(),
        poles,
        amplitudes,
        residual,
    })
}

/// Least-squares fit of mode amplitudes given poles: minimizes
/// `|| V(poles) d - samples ||_2` over `d`, where `V[t, i] = poles[i]^t`.
/// Returns the amplitudes and the relative residual norm.
pub fn fit_amplitudes(
    samples: &[Complex64],
    poles: &[Complex64],
) -> Result<(Vec<Complex64>, f64)> {
    for i in 0..poles.len() {
        for j in i + 1..poles.len() {
            let dist = (poles[i] - poles[j]).norm();
            if dist < 1e-10 {
                return Err(EmacError::DegeneratePoles { i, j, dist });
            }
        }
    }
    let n = samples.len();
    let rhs = Array1::from(samples.to_vec());
    let sample_norm = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if poles.is_empty() {
        return Ok((Vec::new(), if sample_norm > 0.0 { 1.0 } else { 0.0 }));
    }

    let mut vander = Array2::<Complex64>::zeros((n, poles.len()));
    for (i, &p) in poles.iter().enumerate() {
        let mut power = Complex64::new(1.0, 0.0);
        for t in 0..n {
            vander[[t, i]] = power;
            power *= p;
        }
    }
    let solution = vander.least_squares(&rhs)?.solution;

    let fit = vander.dot(&solution);
    let misfit = (&fit - &rhs).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let residual = if sample_norm > 0.0 { misfit / sample_norm } else { 0.0 };
    Ok((solution.to_vec(), residual))
}
