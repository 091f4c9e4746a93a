//! Orbit artifacts on disk.
//!
//! A solved orbit is stored as two files: a CSV of the uniform samples
//! (columns `t,u,u_prime`, one header row) and a JSON header carrying the
//! equation family with its parameters, the energy, the period, the orbit
//! extrema, and the sample count. The pair round-trips: floats are written
//! with 17 significant digits, which reproduces every `f64` bit-exactly on
//! read-back, so a reloaded orbit rebuilds the same motion-law-backed factor
//! the solver produced.
//!
//! Writers emit `\n` line endings and fixed field orders unconditionally;
//! rewriting the same orbit yields byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::{build_factor, OrbitFamily, PeriodicOrbit};
use crate::periodic::PeriodicScalar;

/// Version tag carried by every artifact this module writes.
pub const SCHEMA_VERSION: &str = "1";

/// Expected CSV header row for orbit sample files.
pub const ORBIT_CSV_HEADER: &str = "t,u,u_prime";

/// Expected CSV header row for period-table files.
pub const PERIOD_TABLE_CSV_HEADER: &str = "E,T";

/// Format a float with 17 significant digits — enough to reproduce the exact
/// `f64` on parsing, and a fixed width-independent form for byte-stable
/// artifacts.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON header of an orbit artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitHeader {
    /// Artifact format version.
    pub schema_version: String,
    /// Equation family and parameters (tagged by `family`).
    #[serde(flatten)]
    pub family: OrbitFamily,
    /// Orbit energy.
    #[serde(rename = "E")]
    pub energy: f64,
    /// Orbit period.
    #[serde(rename = "T")]
    pub period: f64,
    /// Minimum of the solution over one period.
    pub u_min: f64,
    /// Maximum of the solution over one period.
    pub u_max: f64,
    /// Number of sample rows in the companion CSV.
    pub samples: usize,
}

impl OrbitHeader {
    /// Header describing a solved orbit.
    pub fn of(orbit: &PeriodicOrbit) -> Self {
        OrbitHeader {
            schema_version: SCHEMA_VERSION.to_string(),
            family: orbit.family(),
            energy: orbit.energy(),
            period: orbit.period(),
            u_min: orbit.q_min(),
            u_max: orbit.q_max(),
            samples: orbit.t_samples().len(),
        }
    }
}

/// Write an orbit as a CSV sample file plus a JSON header.
pub fn write_orbit(orbit: &PeriodicOrbit, csv_path: &Path, json_path: &Path) -> Result<()> {
    let mut csv = String::new();
    csv.push_str(ORBIT_CSV_HEADER);
    csv.push('\n');
    for ((&t, &u), &v) in orbit
        .t_samples()
        .iter()
        .zip(orbit.q_samples())
        .zip(orbit.v_samples())
    {
        csv.push_str(&format_float(t));
        csv.push(',');
        csv.push_str(&format_float(u));
        csv.push(',');
        csv.push_str(&format_float(v));
        csv.push('\n');
    }
    write_atomically(csv_path, csv.as_bytes())?;

    let header = OrbitHeader::of(orbit);
    let mut json = serde_json::to_string_pretty(&header)?;
    json.push('\n');
    write_atomically(json_path, json.as_bytes())
}

/// Write a period-table CSV (columns `E,T`).
pub fn write_period_table(path: &Path, rows: &[(f64, f64)]) -> Result<()> {
    let mut csv = String::new();
    csv.push_str(PERIOD_TABLE_CSV_HEADER);
    csv.push('\n');
    for &(energy, period) in rows {
        csv.push_str(&format_float(energy));
        csv.push(',');
        csv.push_str(&format_float(period));
        csv.push('\n');
    }
    write_atomically(path, csv.as_bytes())
}

/// Write through a sibling temporary file and rename, so readers never see a
/// half-written artifact.
fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// An orbit read back from its two artifact files, validated against the
/// header and ready to rebuild its periodic factor.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    header: OrbitHeader,
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl OrbitRecord {
    /// Read and cross-validate an orbit artifact pair.
    pub fn read(csv_path: &Path, json_path: &Path) -> Result<Self> {
        let header: OrbitHeader = serde_json::from_str(&fs::read_to_string(json_path)?)?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(Error::MalformedOrbitFile(format!(
                "unsupported schema version {:?} (expected {SCHEMA_VERSION:?})",
                header.schema_version
            )));
        }
        if !(header.period > 0.0) {
            return Err(Error::MalformedOrbitFile(format!(
                "header period {} is not positive",
                header.period
            )));
        }

        let csv = fs::read_to_string(csv_path)?;
        let mut lines = csv.lines();
        match lines.next() {
            Some(first) if first.trim_end() == ORBIT_CSV_HEADER => {}
            other => {
                return Err(Error::MalformedOrbitFile(format!(
                    "expected header row {ORBIT_CSV_HEADER:?}, found {other:?}"
                )))
            }
        }

        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut slopes = Vec::new();
        for (idx, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = idx + 2; // 1-based, counting the header row
            let mut fields = line.split(',');
            let mut next = |name: &str| -> Result<f64> {
                let raw = fields.next().ok_or_else(|| {
                    Error::MalformedOrbitFile(format!("row {row}: missing column {name}"))
                })?;
                let value: f64 = raw.trim().parse().map_err(|_| {
                    Error::MalformedOrbitFile(format!("row {row}: cannot parse {name} from {raw:?}"))
                })?;
                if !value.is_finite() {
                    return Err(Error::MalformedOrbitFile(format!(
                        "row {row}: non-finite {name}"
                    )));
                }
                Ok(value)
            };
            let t = next("t")?;
            let u = next("u")?;
            let v = next("u_prime")?;
            if fields.next().is_some() {
                return Err(Error::MalformedOrbitFile(format!(
                    "row {row}: more than three columns"
                )));
            }
            if !(u > 0.0) {
                return Err(Error::MalformedOrbitFile(format!(
                    "row {row}: solution value {u} is not positive"
                )));
            }
            if let Some(&prev) = times.last() {
                if !(t > prev) {
                    return Err(Error::MalformedOrbitFile(format!(
                        "row {row}: time {t} does not increase past {prev}"
                    )));
                }
            }
            times.push(t);
            values.push(u);
            slopes.push(v);
        }

        if times.len() != header.samples {
            return Err(Error::MalformedOrbitFile(format!(
                "header promises {} samples, CSV has {}",
                header.samples,
                times.len()
            )));
        }
        if times.is_empty() {
            return Err(Error::MalformedOrbitFile("no sample rows".to_string()));
        }
        let spread = |measured: f64, declared: f64| {
            (measured - declared).abs() > 1e-8 * declared.abs().max(1.0)
        };
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| {
                (lo.min(u), hi.max(u))
            });
        if spread(lo, header.u_min) || spread(hi, header.u_max) {
            return Err(Error::MalformedOrbitFile(format!(
                "sample range [{lo}, {hi}] disagrees with header extrema [{}, {}]",
                header.u_min, header.u_max
            )));
        }

        Ok(OrbitRecord {
            header,
            times,
            values,
            slopes,
        })
    }

    /// The JSON header.
    pub fn header(&self) -> &OrbitHeader {
        &self.header
    }

    /// Equation family and parameters.
    pub fn family(&self) -> OrbitFamily {
        self.header.family
    }

    /// Orbit period.
    pub fn period(&self) -> f64 {
        self.header.period
    }

    /// Orbit energy.
    pub fn energy(&self) -> f64 {
        self.header.energy
    }

    /// Sample times.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Sample values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sample derivatives.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Rebuild the motion-law-backed periodic factor from the stored samples,
    /// exactly as the solver built it.
    pub fn factor(&self) -> Result<PeriodicScalar> {
        build_factor(self.header.family, self.header.period, &self.values)
    }
}
