//! File formats: signal JSON, grid/mask CSV, solver traces, and experiment
//! summaries.
//!
//! Parsers are strict — exact headers, exact row order, finite numbers — and
//! never panic on malformed bytes; every failure is a typed error. Grid
//! allocation is capped so a corrupt header cannot request absurd memory.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{EmacError, Result};
use crate::signal::{DataGrid, Mode, SpectralSignal};
use crate::solvers::IterationStat;

/// Upper bound on `n1*n2` accepted from any parsed header.
pub const MAX_GRID_CELLS: usize = 1 << 22;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalWire {
    dims: [usize; 2],
    modes: Vec<ModeWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeWire {
    f: [f64; 2],
    amp: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    damp: Option<[f64; 2]>,
}

/// Renders a signal as JSON: `{"dims":[n1,n2],"modes":[{"f":..,"amp":..,"damp":..}]}`.
/// An undamped mode omits `"damp"`.
pub fn signal_to_json(signal: &SpectralSignal) -> String {
    let wire = SignalWire {
        dims: [signal.dims().0, signal.dims().1],
        modes: signal
            .modes()
            .iter()
            .map(|m| ModeWire {
                f: m.freq,
                amp: [m.amplitude.re, m.amplitude.im],
                damp: if m.damping == [1.0, 1.0] { None } else { Some(m.damping) },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&wire).expect("signal serialization cannot fail")
}

/// Parses and validates a signal from JSON text.
pub fn signal_from_json(text: &str) -> Result<SpectralSignal> {
    let wire: SignalWire = serde_json::from_str(text)?;
    let modes = wire
        .modes
        .into_iter()
        .map(|m| Mode {
            freq: m.f,
            amplitude: Complex64::new(m.amp[0], m.amp[1]),
            damping: m.damp.unwrap_or([1.0, 1.0]),
        })
        .collect();
    SpectralSignal::new((wire.dims[0], wire.dims[1]), modes)
}

pub fn read_signal_json(path: &Path) -> Result<SpectralSignal> {
    signal_from_json(&fs::read_to_string(path)?)
}

pub fn write_signal_json(path: &Path, signal: &SpectralSignal) -> Result<()> {
    Ok(fs::write(path, signal_to_json(signal))?)
}

/// Renders a grid as CSV: header `n1,n2`, then one `k,l,re,im` row per entry
/// in row-major order.
pub fn grid_to_csv(grid: &DataGrid) -> String {
    let (n1, n2) = grid.dims();
    let mut out = String::with_capacity(32 * n1 * n2 + 16);
    out.push_str(&format!("{n1},{n2}\n"));
    for k in 0..n1 {
        for l in 0..n2 {
            let v = grid.values[[k, l]];
            out.push_str(&format!("{k},{l},{},{}\n", v.re, v.im));
        }
    }
    out
}

fn parse_finite(field: &str, line_no: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| EmacError::Format(format!("line {line_no}: bad number {field:?}")))?;
    if !v.is_finite() {
        return Err(EmacError::Format(format!("line {line_no}: non-finite value {field:?}")));
    }
    Ok(v)
}

fn parse_index(field: &str, line_no: usize) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| EmacError::Format(format!("line {line_no}: bad index {field:?}")))
}

/// Parses a grid from CSV text. The header must state the dimensions, every
/// entry must be present exactly once, and rows must arrive in row-major
/// order with finite values.
pub fn grid_from_csv(text: &str) -> Result<DataGrid> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| EmacError::Format("empty grid file".into()))?;
    let dims: Vec<&str> = header.split(',').collect();
    if dims.len() != 2 {
        return Err(EmacError::Format(format!("grid header must be \"n1,n2\", got {header:?}")));
    }
    let n1 = parse_index(dims[0], 1)?;
    let n2 = parse_index(dims[1], 1)?;
    if n1 == 0 || n2 == 0 {
        return Err(EmacError::Format("grid dimensions must be positive".into()));
    }
    let cells = n1
        .checked_mul(n2)
        .filter(|&c| c <= MAX_GRID_CELLS)
        .ok_or_else(|| EmacError::Format(format!("grid {n1}x{n2} exceeds size cap")))?;

    let mut values = Array2::<Complex64>::zeros((n1, n2));
    let mut seen = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(EmacError::Format(format!(
                "line {line_no}: expected \"k,l,re,im\", got {line:?}"
            )));
        }
        if seen >= cells {
            return Err(EmacError::Format(format!("line {line_no}: more rows than {n1}x{n2}")));
        }
        let k = parse_index(fields[0], line_no)?;
        let l = parse_index(fields[1], line_no)?;
        if (k, l) != (seen / n2, seen % n2) {
            return Err(EmacError::Format(format!(
                "line {line_no}: expected entry ({}, {}) in row-major order, got ({k}, {l})",
                seen / n2,
                seen % n2
            )));
        }
        values[[k, l]] =
            Complex64::new(parse_finite(fields[2], line_no)?, parse_finite(fields[3], line_no)?);
        seen += 1;
    }
    if seen != cells {
        return Err(EmacError::Format(format!("grid has {seen} rows, expected {cells}")));
    }
    Ok(DataGrid::new(values))
}

pub fn read_grid_csv(path: &Path) -> Result<DataGrid> {
    grid_from_csv(&fs::read_to_string(path)?)
}

pub fn write_grid_csv(path: &Path, grid: &DataGrid) -> Result<()> {
    Ok(fs::write(path, grid_to_csv(grid))?)
}

/// Renders a sample mask as CSV: header `k,l`, one index pair per row.
pub fn mask_to_csv(cells: &[(usize, usize)]) -> String {
    let mut out = String::with_capacity(8 * cells.len() + 4);
    out.push_str("k,l\n");
    for &(k, l) in cells {
        out.push_str(&format!("{k},{l}\n"));
    }
    out
}

/// Parses a sample mask from CSV text. Range and duplicate checks happen at
/// the point of use, where the grid dimensions are known.
pub fn mask_from_csv(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| EmacError::Format("empty mask file".into()))?;
    if header.trim() != "k,l" {
        return Err(EmacError::Format(format!("mask header must be \"k,l\", got {header:?}")));
    }
    let mut cells = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(EmacError::Format(format!(
                "line {line_no}: expected \"k,l\", got {line:?}"
            )));
        }
        if cells.len() >= MAX_GRID_CELLS {
            return Err(EmacError::Format("mask exceeds size cap".into()));
        }
        cells.push((parse_index(fields[0], line_no)?, parse_index(fields[1], line_no)?));
    }
    Ok(cells)
}

pub fn read_mask_csv(path: &Path) -> Result<Vec<(usize, usize)>> {
    mask_from_csv(&fs::read_to_string(path)?)
}

pub fn write_mask_csv(path: &Path, cells: &[(usize, usize)]) -> Result<()> {
    Ok(fs::write(path, mask_to_csv(cells))?)
}

/// Pairs mask cells with grid values, bounds-checking each index.
pub fn select_observed(
    grid: &DataGrid,
    cells: &[(usize, usize)],
) -> Result<Vec<((usize, usize), Complex64)>> {
    let (n1, n2) = grid.dims();
    cells
        .iter()
        .map(|&(k, l)| {
            if k >= n1 || l >= n2 {
                Err(EmacError::OutOfRange(k, l, n1, n2))
            } else {
                Ok(((k, l), grid.values[[k, l]]))
            }
        })
        .collect()
}

/// Writes a solver trace as CSV with columns `t,tau,residual,rank`.
pub fn write_trace_csv(path: &Path, trace: &[IterationStat]) -> Result<()> {
    let mut out = String::from("t,tau,residual,rank\n");
    for (i, st) in trace.iter().enumerate() {
        out.push_str(&format!("{},{},{},{}\n", i + 1, st.tau, st.residual, st.rank));
    }
    Ok(fs::write(path, out)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn sample_signal() -> SpectralSignal {
        SpectralSignal::new(
            (8, 4),
            vec![
                Mode::new([0.125, 0.75], Complex64::new(1.0, -2.0)),
                Mode {
                    freq: [0.5, 0.25],
                    amplitude: Complex64::new(0.0, 1.0),
                    damping: [0.9, 1.0],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn signal_json_round_trip() {
        let sig = sample_signal();
        let text = signal_to_json(&sig);
        let back = signal_from_json(&text).unwrap();
        assert_eq!(back.dims(), sig.dims());
        assert_eq!(back.modes(), sig.modes());
    }

    #[test]
    fn signal_json_damp_omitted_means_undamped() {
        let sig = signal_from_json(
            r#"{"dims":[4,1],"modes":[{"f":[0.3,0.0],"amp":[1.0,0.0]}]}"#,
        )
        .unwrap();
        assert_eq!(sig.modes()[0].damping, [1.0, 1.0]);
        // The rendered form of an undamped mode omits the field again.
        assert!(!signal_to_json(&sig).contains("damp"));
    }

    #[test]
    fn signal_json_rejects_malformed() {
        for bad in [
            "",
            "{}",
            r#"{"dims":[4,1]}"#,
            r#"{"dims":[4,1],"modes":[],"extra":1}"#,
            r#"{"dims":[4,1],"modes":[{"f":[2.0,0.0],"amp":[1.0,0.0]}]}"#,
            r#"{"dims":[4,1],"modes":[{"f":[0.5,0.0],"amp":[0.0,0.0]}]}"#,
        ] {
            assert!(signal_from_json(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn grid_csv_round_trip() {
        let grid = DataGrid::new(array![
            [Complex64::new(1.5, -0.25), Complex64::new(0.0, 0.0)],
            [Complex64::new(-3.0, 1e-17), Complex64::new(2.0, 7.0)],
            [Complex64::new(0.1, 0.2), Complex64::new(-0.3, -0.4)],
        ]);
        let text = grid_to_csv(&grid);
        assert!(text.starts_with("3,2\n0,0,1.5,-0.25\n"));
        let back = grid_from_csv(&text).unwrap();
        assert_eq!(back.values, grid.values);
    }

    #[test]
    fn grid_csv_rejects_malformed() {
        for bad in [
            "",
            "2\n",
            "0,2\n",
            "1,1\n",                          // missing row
            "1,1\n0,0,1,2\n0,0,1,2\n",        // extra row
            "1,2\n0,1,1,2\n0,0,1,2\n",        // out of order
            "1,1\n0,0,1,inf\n",               // non-finite
            "1,1\n0,0,1\n",                   // short row
            "99999999,99999999\n",            // over cap
        ] {
            assert!(grid_from_csv(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn mask_csv_round_trip() {
        let cells = vec![(0usize, 3usize), (5, 1), (2, 2)];
        let text = mask_to_csv(&cells);
        assert_eq!(text, "k,l\n0,3\n5,1\n2,2\n");
        assert_eq!(mask_from_csv(&text).unwrap(), cells);
    }

    #[test]
    fn mask_csv_rejects_malformed() {
        for bad in ["", "x,y\n", "k,l\n1\n", "k,l\n1,2,3\n", "k,l\n-1,2\n", "k,l\na,b\n"] {
            assert!(mask_from_csv(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn select_observed_bounds_checked() {
        let grid = DataGrid::new(Array2::from_elem((2, 2), Complex64::new(1.0, 0.0)));
        assert!(select_observed(&grid, &[(0, 0), (1, 1)]).is_ok());
        assert!(matches!(
            select_observed(&grid, &[(2, 0)]),
            Err(EmacError::OutOfRange(2, 0, 2, 2))
        ));
    }

    #[test]
    fn trace_csv_columns() {
        let trace = vec![
            IterationStat { tau: 1.0, residual: 0.5, rank: 3 },
            IterationStat { tau: 0.5, residual: 0.25, rank: 2 },
        ];
        let dir = std::env::temp_dir().join("emac-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("trace.csv");
        write_trace_csv(&path, &trace).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,tau,residual,rank\n1,1,0.5,3\n2,0.5,0.25,2\n"));
    }
}
