//! Spectrally sparse signals: mode lists, grid synthesis, and the Vandermonde
//! factorization used by structural cross-checks downstream.

use crate::error::{EmacError, Result};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// One complex sinusoid: normalized frequency per axis, complex amplitude,
/// per-axis damping magnitude (1.0 = undamped, on the unit circle).
///
/// Axis 1 is meaningful only for 2-D signals; 1-D modes carry `freq[1] = 0.0`
/// and `damping[1] = 1.0` so that the tuple compares cleanly.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    /// Normalized frequency per axis, each in `[0, 1)` (cycles/sample).
    pub freq: [f64; 2],
    /// Complex amplitude `d_i`; must be nonzero.
    pub amplitude: Complex64,
    /// Per-axis pole magnitude; must be positive.
    pub damping: [f64; 2],
}

impl Mode {
    /// Undamped 2-D mode.
    pub fn new(freq: [f64; 2], amplitude: Complex64) -> Self {
        Mode { freq, amplitude, damping: [1.0, 1.0] }
    }

    /// Undamped 1-D mode (axis 1 trivial).
    pub fn new_1d(f: f64, amplitude: Complex64) -> Self {
        Mode { freq: [f, 0.0], amplitude, damping: [1.0, 1.0] }
    }

    /// The pole along `axis`: `damping * e^{j 2 pi freq}`.
    pub fn pole(&self, axis: usize) -> Complex64 {
        Complex64::from_polar(self.damping[axis], TAU * self.freq[axis])
    }

    fn validate(&self, k_axes: usize) -> Result<()> {
        for axis in 0..2 {
            let f = self.freq[axis];
            if !(f >= 0.0 && f < 1.0) {
                return Err(EmacError::InvalidSignal(format!(
                    "frequency component {f} outside [0, 1)"
                )));
            }
            let d = self.damping[axis];
            if !(d > 0.0 && d.is_finite()) {
                return Err(EmacError::InvalidSignal(format!("damping {d} must be positive")));
            }
        }
        if self.amplitude == Complex64::new(0.0, 0.0) || !self.amplitude.is_finite() {
            return Err(EmacError::InvalidSignal("amplitude must be nonzero and finite".into()));
        }
        if k_axes == 1 && (self.freq[1] != 0.0 || self.damping[1] != 1.0) {
            return Err(EmacError::InvalidSignal(
                "1-D signal modes must have freq[1] = 0 and damping[1] = 1".into(),
            ));
        }
        Ok(())
    }
}

/// A sum of [`Mode`]s together with the grid dimensions it is sampled on.
#[derive(Debug, Clone)]
pub struct SpectralSignal {
    dims: (usize, usize),
    modes: Vec<Mode>,
}

impl SpectralSignal {
    /// Validates invariants: positive dims, per-mode ranges, pairwise-distinct
    /// frequency tuples. The number of active axes is inferred from dims
    /// (`n2 = 1` means a 1-D line spectrum).
    pub fn new(dims: (usize, usize), modes: Vec<Mode>) -> Result<Self> {
        let (n1, n2) = dims;
        if n1 == 0 || n2 == 0 {
            return Err(EmacError::InvalidSignal(format!("dims {dims:?} must be positive")));
        }
        let k_axes = if n2 > 1 { 2 } else { 1 };
        for mode in &modes {
            mode.validate(k_axes)?;
        }
        for i in 0..modes.len() {
            for j in (i + 1)..modes.len() {
                if modes[i].freq == modes[j].freq {
                    return Err(EmacError::InvalidSignal(format!(
                        "modes {i} and {j} share frequency {:?}",
                        modes[i].freq
                    )));
                }
            }
        }
        Ok(SpectralSignal { dims, modes })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Number of modes (spectral sparsity r).
    pub fn sparsity(&self) -> usize {
        self.modes.len()
    }

    /// Number of active frequency axes: 1 for line spectra (n2 = 1), else 2.
    pub fn k_axes(&self) -> usize {
        if self.dims.1 > 1 {
            2
        } else {
            1
        }
    }
}

/// Dense complex sample grid; entry `(k, l)` holds `X_{k,l}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataGrid {
    pub values: Array2<Complex64>,
}

impl DataGrid {
    pub fn new(values: Array2<Complex64>) -> Self {
        DataGrid { values }
    }

    pub fn zeros(dims: (usize, usize)) -> Self {
        DataGrid { values: Array2::zeros(dims) }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn norm_fro(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Vandermonde factorization `X = Y D Z^T`: `Y` is n1 x r with columns
/// `y_i^k`, `Z` is n2 x r with columns `z_i^l`, `D = diag(amplitudes)`.
#[derive(Debug, Clone)]
pub struct VandermondeFactors {
    pub y: Array2<Complex64>,
    pub z: Array2<Complex64>,
    pub d: Array1<Complex64>,
}

impl VandermondeFactors {
    /// Multiplies the factors back into a dense grid.
    pub fn reconstruct(&self) -> DataGrid {
        let scaled = &self.y * &self.d.view().insert_axis(ndarray::Axis(0)); // column i scaled by d_i
        DataGrid::new(scaled.dot(&self.z.t()))
    }
}

/// `pole^k` for `k = 0..n`, computed per entry from polar form so that phases
/// stay accurate for large `k` (no cumulative product drift).
pub(crate) fn pole_powers(freq: f64, damping: f64, n: usize) -> Array1<Complex64> {
    Array1::from_shape_fn(n, |k| {
        let mag = damping.powi(k as i32);
        let turns = (k as f64 * freq).fract();
        Complex64::from_polar(mag, TAU * turns)
    })
}

/// Evaluates the mode sum on the full grid: `X_{k,l} = sum_i d_i y_i^k z_i^l`.
/// Zero modes yield the all-zero grid.
pub fn synthesize(signal: &SpectralSignal) -> DataGrid {
    let (n1, n2) = signal.dims();
    let r = signal.sparsity();
    if r == 0 {
        return DataGrid::zeros((n1, n2));
    }
    let factors = vandermonde_factors(signal).expect("nonempty by the branch above");
    factors.reconstruct()
}

/// Builds the `X = Y D Z^T` factorization. Errors with [`EmacError::EmptySignal`]
/// when the signal has no modes.
pub fn vandermonde_factors(signal: &SpectralSignal) -> Result<VandermondeFactors> {
    let (n1, n2) = signal.dims();
    let r = signal.sparsity();
    if r == 0 {
        return Err(EmacError::EmptySignal);
    }
    let mut y = Array2::zeros((n1, r));
    let mut z = Array2::zeros((n2, r));
    let mut d = Array1::zeros(r);
    for (i, mode) in signal.modes().iter().enumerate() {
        y.column_mut(i).assign(&pole_powers(mode.freq[0], mode.damping[0], n1));
        z.column_mut(i).assign(&pole_powers(mode.freq[1], mode.damping[1], n2));
        d[i] = mode.amplitude;
    }
    Ok(VandermondeFactors { y, z, d })
}

/// Relative Frobenius error `||candidate - truth||_F / ||truth||_F`.
pub fn nmse(candidate: &DataGrid, truth: &DataGrid) -> Result<f64> {
    if candidate.dims() != truth.dims() {
        return Err(EmacError::DimensionMismatch(format!(
            "candidate {:?} vs truth {:?}",
            candidate.dims(),
            truth.dims()
        )));
    }
    let denom = truth.norm_fro();
    if denom == 0.0 {
        return Err(EmacError::ZeroReference);
    }
    let diff = (&candidate.values - &truth.values).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(diff / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent brute-force synthesis straight from the definition,
    /// powering poles with `powi` rather than polar tables.
    fn synthesize_bruteforce(signal: &SpectralSignal) -> DataGrid {
        let (n1, n2) = signal.dims();
        let mut values = Array2::zeros((n1, n2));
        for k in 0..n1 {
            for l in 0..n2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for mode in signal.modes() {
                    acc += mode.amplitude
                        * mode.pole(0).powi(k as i32)
                        * mode.pole(1).powi(l as i32);
                }
                values[[k, l]] = acc;
            }
        }
        DataGrid::new(values)
    }

    fn random_test_signal(seed: u64, dims: (usize, usize), r: usize) -> SpectralSignal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes: Vec<Mode> = Vec::new();
        while modes.len() < r {
            let f1: f64 = rng.gen();
            let f2: f64 = if dims.1 > 1 { rng.gen() } else { 0.0 };
            if modes.iter().any(|m| m.freq == [f1, f2]) {
                continue;
            }
            let phase: f64 = rng.gen::<f64>() * TAU;
            modes.push(Mode {
                freq: [f1, f2],
                amplitude: Complex64::from_polar(1.0, phase),
                damping: [1.0, 1.0],
            });
        }
        SpectralSignal::new(dims, modes).unwrap()
    }

    #[test]
    fn empty_signal_synthesizes_to_zero() {
        let sig = SpectralSignal::new((3, 3), vec![]).unwrap();
        let grid = synthesize(&sig);
        assert_eq!(grid.dims(), (3, 3));
        assert!(grid.values.iter().all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn dc_mode_gives_all_ones() {
        let sig = SpectralSignal::new((2, 2), vec![Mode::new([0.0, 0.0], c(1.0, 0.0))]).unwrap();
        let grid = synthesize(&sig);
        for z in grid.values.iter() {
            assert!((z - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn quarter_cycle_mode_walks_the_unit_circle() {
        // f = 0.25 on a length-4 line: powers of e^{j pi/2} = (1, j, -1, -j).
        let sig = SpectralSignal::new((4, 1), vec![Mode::new_1d(0.25, c(1.0, 0.0))]).unwrap();
        let grid = synthesize(&sig);
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (k, want) in expect.iter().enumerate() {
            assert!(
                (grid.values[[k, 0]] - want).norm() < 1e-14,
                "entry {k}: {} vs {want}",
                grid.values[[k, 0]]
            );
        }
        // Cross-check the whole grid against the brute-force evaluation.
        let brute = synthesize_bruteforce(&sig);
        assert!(nmse(&grid, &brute).unwrap() < 1e-14);
    }

    #[test]
    fn vandermonde_trivial_factors() {
        let sig = SpectralSignal::new((3, 2), vec![Mode::new([0.0, 0.0], c(2.0, 0.0))]).unwrap();
        let f = vandermonde_factors(&sig).unwrap();
        assert!(f.y.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));
        assert!(f.z.iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));
        assert_eq!(f.d[0], c(2.0, 0.0));
    }

    #[test]
    fn vandermonde_half_frequency_alternates() {
        let sig = SpectralSignal::new((3, 1), vec![Mode::new_1d(0.5, c(1.0, 0.0))]).unwrap();
        let f = vandermonde_factors(&sig).unwrap();
        let col: Vec<Complex64> = f.y.column(0).to_vec();
        assert!((col[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((col[1] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((col[2] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn vandermonde_row_zero_is_ones() {
        let sig = random_test_signal(11, (8, 8), 3);
        let f = vandermonde_factors(&sig).unwrap();
        for i in 0..3 {
            assert_eq!(f.y[[0, i]], c(1.0, 0.0));
            assert_eq!(f.z[[0, i]], c(1.0, 0.0));
        }
    }

    #[test]
    fn factorization_reconstructs_synthesis() {
        let sig = random_test_signal(42, (8, 8), 3);
        let grid = synthesize(&sig);
        let rebuilt = vandermonde_factors(&sig).unwrap().reconstruct();
        assert!(nmse(&rebuilt, &grid).unwrap() <= 1e-12);
    }

    #[test]
    fn vandermonde_empty_errors() {
        let sig = SpectralSignal::new((4, 4), vec![]).unwrap();
        assert!(matches!(vandermonde_factors(&sig), Err(EmacError::EmptySignal)));
    }

    #[test]
    fn nmse_basics() {
        let sig = random_test_signal(7, (5, 5), 2);
        let truth = synthesize(&sig);
        assert_eq!(nmse(&truth, &truth).unwrap(), 0.0);

        let double = DataGrid::new(&truth.values * c(2.0, 0.0));
        assert!((nmse(&double, &truth).unwrap() - 1.0).abs() < 1e-12);

        // Perturbing one entry by ||truth||_F moves the relative error to exactly 1.
        let mut bumped = truth.clone();
        bumped.values[[0, 0]] += c(truth.norm_fro(), 0.0);
        assert!((nmse(&bumped, &truth).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nmse_zero_reference_rejected() {
        let zero = DataGrid::zeros((3, 3));
        let other = DataGrid::zeros((3, 3));
        assert!(matches!(nmse(&other, &zero), Err(EmacError::ZeroReference)));
    }

    #[test]
    fn nmse_dimension_mismatch_rejected() {
        let a = DataGrid::zeros((3, 3));
        let sig = random_test_signal(1, (4, 4), 1);
        let b = synthesize(&sig);
        assert!(matches!(nmse(&a, &b), Err(EmacError::DimensionMismatch(_))));
    }

    #[test]
    fn validation_rejects_bad_modes() {
        let out_of_range = Mode::new([1.0, 0.0], c(1.0, 0.0));
        assert!(SpectralSignal::new((4, 4), vec![out_of_range]).is_err());

        let zero_amp = Mode::new([0.1, 0.2], c(0.0, 0.0));
        assert!(SpectralSignal::new((4, 4), vec![zero_amp]).is_err());

        let neg_damp = Mode { freq: [0.1, 0.2], amplitude: c(1.0, 0.0), damping: [-0.5, 1.0] };
        assert!(SpectralSignal::new((4, 4), vec![neg_damp]).is_err());

        let dup = vec![Mode::new([0.3, 0.4], c(1.0, 0.0)), Mode::new([0.3, 0.4], c(2.0, 0.0))];
        assert!(SpectralSignal::new((4, 4), dup).is_err());

        // 1-D signals must keep axis 1 trivial.
        let bad_1d = Mode { freq: [0.3, 0.2], amplitude: c(1.0, 0.0), damping: [1.0, 1.0] };
        assert!(SpectralSignal::new((4, 1), vec![bad_1d]).is_err());
    }

    #[test]
    fn synthesis_is_linear_in_modes() {
        let a = random_test_signal(100, (6, 6), 2);
        let b = random_test_signal(200, (6, 6), 2);
        // Disjoint frequencies with probability 1; union signal must synthesize
        // to the entrywise sum.
        let mut modes = a.modes().to_vec();
        modes.extend_from_slice(b.modes());
        let union = SpectralSignal::new((6, 6), modes).unwrap();
        let sum = DataGrid::new(&synthesize(&a).values + &synthesize(&b).values);
        let direct = synthesize(&union);
        assert!(nmse(&direct, &sum).unwrap() <= 1e-14);
    }

    #[test]
    fn conjugation_symmetry() {
        // Negating frequencies (f -> 1-f for f != 0) and conjugating amplitudes
        // conjugates the grid, in the undamped case.
        let sig = random_test_signal(321, (7, 5), 3);
        let reflected: Vec<Mode> = sig
            .modes()
            .iter()
            .map(|m| Mode {
                freq: [
                    if m.freq[0] == 0.0 { 0.0 } else { 1.0 - m.freq[0] },
                    if m.freq[1] == 0.0 { 0.0 } else { 1.0 - m.freq[1] },
                ],
                amplitude: m.amplitude.conj(),
                damping: m.damping,
            })
            .collect();
        let refl = SpectralSignal::new(sig.dims(), reflected).unwrap();
        let conj_grid = DataGrid::new(synthesize(&sig).values.mapv(|z| z.conj()));
        assert!(nmse(&synthesize(&refl), &conj_grid).unwrap() <= 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prop_factorization_identity(seed in 0u64..1000, r in 1usize..5) {
            let sig = random_test_signal(seed, (8, 8), r);
            let grid = synthesize(&sig);
            let rebuilt = vandermonde_factors(&sig).unwrap().reconstruct();
            prop_assert!(nmse(&rebuilt, &grid).unwrap() <= 1e-12);
        }

        #[test]
        fn prop_synthesis_matches_bruteforce(seed in 0u64..1000, r in 1usize..4) {
            let sig = random_test_signal(seed, (6, 5), r);
            let grid = synthesize(&sig);
            let brute = synthesize_bruteforce(&sig);
            prop_assert!(nmse(&grid, &brute).unwrap() <= 1e-12);
        }
    }
}
