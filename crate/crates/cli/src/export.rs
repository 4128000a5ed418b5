//! File formats for grids, vectors and revival reports.
//!
//! Every float is written in scientific notation with 17 significant digits
//! (`{:.16e}`), which round-trips through `f64` and gives byte-identical
//! output across platforms. Grid CSV and JSON keep the core orientation
//! (rows `x`, columns `kappa`); the PPM heatmap is transposed so that `x`
//! runs left to right and `kappa` increases upward.

use std::io::{self, Write};

use qwps_core::{CycleConfig, Method, RevivalScan, WignerGrid};
use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Ppm,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Ppm => "ppm",
        }
    }
}

#[inline]
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// serde_json formatter that writes floats with 17 significant digits.
struct FixedDigits(CompactFormatter);

impl Formatter for FixedDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits(CompactFormatter));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// JSON shape of a [`WignerGrid`]. Non-finite `t` (the long-time limit) is
/// written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub n: usize,
    pub j: usize,
    pub gamma: f64,
    pub t: Option<f64>,
    pub method: String,
    pub max_imag_residue: f64,
    pub values: Vec<f64>,
}

impl From<&WignerGrid> for GridRecord {
    fn from(grid: &WignerGrid) -> Self {
        GridRecord {
            n: grid.config.n,
            j: grid.config.j,
            gamma: grid.config.gamma,
            t: grid.t.is_finite().then_some(grid.t),
            method: grid.method.as_str().to_string(),
            max_imag_residue: grid.max_imag_residue,
            values: grid.values.clone(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ImportError {
    #[error("malformed grid json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("inconsistent grid: {0}")]
    Invalid(String),
}

impl TryFrom<GridRecord> for WignerGrid {
    type Error = ImportError;

    fn try_from(rec: GridRecord) -> Result<Self, ImportError> {
        let config = CycleConfig::with_gamma(rec.n, rec.j, rec.gamma)
            .map_err(|e| ImportError::Invalid(e.to_string()))?;
        if rec.values.len() != rec.n * rec.n {
            return Err(ImportError::Invalid(format!(
                "expected {} values for n = {}, found {}",
                rec.n * rec.n,
                rec.n,
                rec.values.len()
            )));
        }
        let method: Method = rec
            .method
            .parse()
            .map_err(|e: qwps_core::WalkError| ImportError::Invalid(e.to_string()))?;
        Ok(WignerGrid {
            values: rec.values,
            config,
            t: rec.t.unwrap_or(f64::INFINITY),
            method,
            max_imag_residue: rec.max_imag_residue,
        })
    }
}

pub fn grid_to_json(grid: &WignerGrid) -> Vec<u8> {
    to_json_bytes(&GridRecord::from(grid)).expect("grid serializes")
}

pub fn grid_from_json(bytes: &[u8]) -> Result<WignerGrid, ImportError> {
    let rec: GridRecord = serde_json::from_slice(bytes)?;
    rec.try_into()
}

pub fn grid_to_csv(grid: &WignerGrid) -> Vec<u8> {
    let n = grid.n();
    let mut out = String::with_capacity(n * n * 24 + 16);
    out.push_str("x\\kappa");
    for kappa in 0..n {
        out.push(',');
        out.push_str(&kappa.to_string());
    }
    out.push('\n');
    for (x, row) in grid.rows().enumerate() {
        out.push_str(&x.to_string());
        for v in row {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// Diverging map: 0 is white, `+scale` saturated red, `-scale` saturated blue.
pub fn diverging_rgb(value: f64, scale: f64) -> [u8; 3] {
    if scale.is_nan() || scale <= 0.0 {
        return [255, 255, 255];
    }
    let s = (value / scale).clamp(-1.0, 1.0);
    let fade = |f: f64| (255.0 * (1.0 - f)).round() as u8;
    if s >= 0.0 {
        [255, fade(s), fade(s)]
    } else {
        [fade(-s), fade(-s), 255]
    }
}

/// Binary P6 image, one pixel per cell, colour scale anchored at the grid's
/// own `max |W|`. Column `x`, row `N - 1 - kappa`.
pub fn grid_to_ppm(grid: &WignerGrid) -> Vec<u8> {
    let n = grid.n();
    let scale = grid.max_abs();
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    out.reserve(3 * n * n);
    for kappa in (0..n).rev() {
        for x in 0..n {
            out.extend_from_slice(&diverging_rgb(grid.get(x, kappa), scale));
        }
    }
    out
}

/// Two-column CSV `index,value`.
pub fn vector_to_csv(index_name: &str, value_name: &str, values: &[f64]) -> Vec<u8> {
    let mut out = format!("{index_name},{value_name}\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", fmt_f64(*v)));
    }
    out.into_bytes()
}

#[derive(Debug, Serialize)]
pub struct VectorRecord<'a> {
    pub n: usize,
    pub j: usize,
    pub gamma: f64,
    pub t: Option<f64>,
    pub quantity: &'a str,
    pub values: &'a [f64],
}

#[derive(Debug, Serialize)]
struct ScanSample {
    t: f64,
    fidelity: f64,
    l1_distance: f64,
}

#[derive(Debug, Serialize)]
struct ScanPeak {
    t: f64,
    fidelity: f64,
}

#[derive(Debug, Serialize)]
struct ScanRecord {
    n: usize,
    j: usize,
    gamma: f64,
    t_r_estimate: f64,
    argmax: ScanPeak,
    peaks: Vec<ScanPeak>,
    samples: Vec<ScanSample>,
}

pub fn scan_to_json(scan: &RevivalScan) -> Vec<u8> {
    let best = scan.argmax();
    let rec = ScanRecord {
        n: scan.config.n,
        j: scan.config.j,
        gamma: scan.config.gamma,
        t_r_estimate: scan.t_r_estimate,
        argmax: ScanPeak {
            t: best.t,
            fidelity: best.fidelity,
        },
        peaks: scan
            .peaks
            .iter()
            .map(|p| ScanPeak {
                t: p.t,
                fidelity: p.fidelity,
            })
            .collect(),
        samples: scan
            .times
            .iter()
            .zip(&scan.fidelities)
            .zip(&scan.l1_distances)
            .map(|((&t, &fidelity), &l1_distance)| ScanSample {
                t,
                fidelity,
                l1_distance,
            })
            .collect(),
    };
    to_json_bytes(&rec).expect("scan serializes")
}

/// Peak table, highest fidelity first. When the scan has no interior peak
/// the global maximum is listed with rank 0.
pub fn scan_to_csv(scan: &RevivalScan, max_peaks: usize) -> Vec<u8> {
    let mut out = String::from("rank,t,fidelity,l1_distance\n");
    let l1_at = |t: f64| {
        let i = scan
            .times
            .iter()
            .position(|&s| s == t)
            .expect("peak on grid");
        scan.l1_distances[i]
    };
    if scan.peaks.is_empty() {
        let best = scan.argmax();
        out.push_str(&format!(
            "0,{},{},{}\n",
            fmt_f64(best.t),
            fmt_f64(best.fidelity),
            fmt_f64(l1_at(best.t))
        ));
    }
    for (rank, p) in scan.peaks.iter().take(max_peaks).enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            rank + 1,
            fmt_f64(p.t),
            fmt_f64(p.fidelity),
            fmt_f64(l1_at(p.t))
        ));
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qwps_core::{wigner_direct, WaveFunction};

    fn odd_zero_grid() -> WignerGrid {
        let c = CycleConfig::new(3, 1).unwrap();
        wigner_direct(&WaveFunction::localized(c)).unwrap()
    }

    #[test]
    fn csv_layout() {
        let text = String::from_utf8(grid_to_csv(&odd_zero_grid())).unwrap();
        let third = fmt_f64(1.0 / 3.0);
        let zero = fmt_f64(0.0);
        let want = format!(
            "x\\kappa,0,1,2\n0,{zero},{zero},{zero}\n1,{third},{third},{third}\n2,{zero},{zero},{zero}\n"
        );
        assert_eq!(text, want);
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.02), "2.0000000000000000e-2");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        for v in [1.0 / 3.0, -2.5e-17, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let c = CycleConfig::new(9, 4).unwrap();
        let grid = qwps_core::wigner_fft(&c, 3.7).unwrap();
        let bytes = grid_to_json(&grid);
        let back = grid_from_json(&bytes).unwrap();
        assert_eq!(back, grid);
        assert_eq!(grid_to_json(&back), bytes);
    }

    #[test]
    fn json_limit_grid_uses_null_time() {
        let c = CycleConfig::new(5, 0).unwrap();
        let grid = qwps_core::limiting_wigner(&c).unwrap().to_grid();
        let bytes = grid_to_json(&grid);
        assert!(String::from_utf8_lossy(&bytes).contains("\"t\":null"));
        assert_eq!(grid_from_json(&bytes).unwrap(), grid);
    }

    #[test]
    fn json_rejects_wrong_shape() {
        let bad = br#"{"n":3,"j":0,"gamma":1.0,"t":0.0,"method":"fft","max_imag_residue":0.0,"values":[1.0]}"#;
        assert!(matches!(grid_from_json(bad), Err(ImportError::Invalid(_))));
    }

    #[test]
    fn colour_map() {
        assert_eq!(diverging_rgb(0.0, 1.0), [255, 255, 255]);
        assert_eq!(diverging_rgb(1.0, 1.0), [255, 0, 0]);
        assert_eq!(diverging_rgb(-1.0, 1.0), [0, 0, 255]);
        assert_eq!(diverging_rgb(0.5, 1.0), [255, 128, 128]);
        assert_eq!(diverging_rgb(0.3, 0.0), [255, 255, 255]);
    }

    #[test]
    fn ppm_revival_column_is_red() {
        let c = CycleConfig::new(6, 0).unwrap();
        let grid = qwps_core::wigner_fft(&c, 2.0 * std::f64::consts::PI).unwrap();
        let bytes = grid_to_ppm(&grid);
        let header = b"P6\n6 6\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        let pixels = &bytes[header.len()..];
        assert_eq!(pixels.len(), 6 * 6 * 3);
        for row in 0..6 {
            let px = &pixels[(row * 6) * 3..(row * 6) * 3 + 3];
            assert_eq!(px, &[255, 0, 0]);
        }
    }
}
