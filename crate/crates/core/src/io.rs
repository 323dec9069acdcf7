//! File formats: the JSON settings file and scan exports (CSV and JSON).
//!
//! Settings file:
//!
//! ```json
//! {"schema": 1, "n": 2, "phases": [[0.0, 1.5707963267948966], [-0.7853981633974483, 0.7853981633974483]]}
//! ```
//!
//! Angles are radians. Scan CSV has the header `theta1,theta2,prediction`
//! and one row per grid node in row-major order, every number written with
//! 17 significant digits so that it parses back to the same `f64`.

use serde::{Deserialize, Serialize};
use serde_json::json;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::optimize::ScanResult;
use crate::quantum::MeasurementSettings;

pub const SETTINGS_SCHEMA: u32 = 1;

pub const SCAN_CSV_HEADER: &str = "theta1,theta2,prediction";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsFile {
    pub schema: u32,
    pub n: usize,
    pub phases: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct RawSettings {
    schema: Option<serde_json::Value>,
    n: Option<serde_json::Value>,
    phases: Option<Vec<Vec<serde_json::Value>>>,
}

impl SettingsFile {
    pub fn from_settings(settings: &MeasurementSettings) -> Self {
        Self {
            schema: SETTINGS_SCHEMA,
            n: settings.n(),
            phases: settings.phases().to_vec(),
        }
    }

    /// Parses and structurally validates a settings document. Error messages
    /// name the offending field and index.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSettings = serde_json::from_str(text)
            .map_err(|e| Error::validation(format!("settings file is not valid JSON: {e}")))?;
        let schema = match raw.schema {
            None => return Err(Error::validation("settings field `schema` is missing")),
            Some(v) => v.as_u64().ok_or_else(|| {
                Error::validation(format!(
                    "settings field `schema` must be an integer, got {v}"
                ))
            })?,
        };
        if schema != u64::from(SETTINGS_SCHEMA) {
            return Err(Error::validation(format!(
                "settings field `schema` is {schema}, only {SETTINGS_SCHEMA} is supported"
            )));
        }
        let n = match raw.n {
            None => return Err(Error::validation("settings field `n` is missing")),
            Some(v) => v.as_u64().filter(|&n| n >= 1).ok_or_else(|| {
                Error::validation(format!(
                    "settings field `n` must be a positive integer, got {v}"
                ))
            })? as usize,
        };
        let rows = raw
            .phases
            .ok_or_else(|| Error::validation("settings field `phases` is missing"))?;
        if rows.len() != n {
            return Err(Error::validation(format!(
                "settings field `phases` has {} entries but `n` is {n}",
                rows.len()
            )));
        }
        let mut phases = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != 2 {
                return Err(Error::validation(format!(
                    "settings field `phases[{i}]` has {} entries, expected 2",
                    row.len()
                )));
            }
            let mut pair = [0.0; 2];
            for (j, v) in row.iter().enumerate() {
                pair[j] = v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| {
                    Error::validation(format!(
                        "settings field `phases[{i}][{j}]` must be a finite number, got {v}"
                    ))
                })?;
            }
            phases.push(pair);
        }
        Ok(Self {
            schema: SETTINGS_SCHEMA,
            n,
            phases,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("settings serialize")
    }

    /// Converts to settings; `degrees` interprets the stored angles as
    /// degrees.
    pub fn to_settings(&self, degrees: bool) -> Result<MeasurementSettings> {
        let conv = |x: f64| if degrees { x.to_radians() } else { x };
        MeasurementSettings::new(
            self.phases
                .iter()
                .map(|p| [conv(p[0]), conv(p[1])])
                .collect(),
        )
    }
}

pub fn write_scan_csv<W: Write>(result: &ScanResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SCAN_CSV_HEADER}")?;
    for (t1, t2, v) in result.cells() {
        writeln!(out, "{t1:.16e},{t2:.16e},{v:.16e}")?;
    }
    out.flush()
}

/// Reads a scan CSV back into `(θ1, θ2, prediction)` rows.
pub fn read_scan_csv<R: BufRead>(input: R) -> Result<Vec<(f64, f64, f64)>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::validation(e.to_string()))?;
    if header.as_deref().map(str::trim) != Some(SCAN_CSV_HEADER) {
        return Err(Error::validation(format!(
            "scan CSV must start with `{SCAN_CSV_HEADER}`"
        )));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::validation(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::validation(format!("scan CSV row {}: {e}", lineno + 1)))?;
        if fields.len() != 3 {
            return Err(Error::validation(format!(
                "scan CSV row {} has {} fields, expected 3",
                lineno + 1,
                fields.len()
            )));
        }
        rows.push((fields[0], fields[1], fields[2]));
    }
    Ok(rows)
}

/// JSON form of a scan: axes, the row-major matrix and the argmax.
pub fn scan_to_json(result: &ScanResult, n: usize, l: usize) -> serde_json::Value {
    let values: Vec<&[f64]> = (0..result.rows()).map(|r| result.row(r)).collect();
    json!({
        "n": n,
        "l": l,
        "theta1": result.grid.theta1.nodes(),
        "theta2": result.grid.theta2.nodes(),
        "values": values,
        "argmax": {
            "theta1": result.argmax.theta1,
            "theta2": result.argmax.theta2,
            "value": result.argmax.value,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ghz::GhzParams;
    use crate::optimize::{scan_two_angle, Axis, ScanGrid};

    #[test]
    fn settings_round_trip() {
        let s = MeasurementSettings::new(vec![[0.1, 0.2], [-3.0, 1e-17]]).unwrap();
        let file = SettingsFile::from_settings(&s);
        let back = SettingsFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back.to_settings(false).unwrap(), s);
    }

    #[test]
    fn degrees_are_converted() {
        let f = SettingsFile::from_json(r#"{"schema":1,"n":1,"phases":[[0, 90]]}"#).unwrap();
        let s = f.to_settings(true).unwrap();
        assert_eq!(s.phases()[0], [0.0, std::f64::consts::FRAC_PI_2]);
    }

    #[test]
    fn settings_errors_name_the_field() {
        let cases = [
            (r#"{"n":1,"phases":[[0,1]]}"#, "`schema`"),
            (r#"{"schema":2,"n":1,"phases":[[0,1]]}"#, "`schema`"),
            (r#"{"schema":1,"phases":[[0,1]]}"#, "`n`"),
            (r#"{"schema":1,"n":2,"phases":[[0,1]]}"#, "`phases`"),
            (
                r#"{"schema":1,"n":2,"phases":[[0,1],[0,1,2]]}"#,
                "`phases[1]`",
            ),
            (r#"{"schema":1,"n":1,"phases":[[0,"x"]]}"#, "`phases[0][1]`"),
            (r#"{"schema":1,"#, "not valid JSON"),
        ];
        for (text, needle) in cases {
            let msg = SettingsFile::from_json(text).unwrap_err().to_string();
            assert!(msg.contains(needle), "{text}: {msg}");
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let p = GhzParams::balanced(3).unwrap();
        let grid = ScanGrid {
            theta1: Axis::new(0.0, 1.0, 7).unwrap(),
            theta2: Axis::new(-0.3, 2.0, 5).unwrap(),
        };
        let r = scan_two_angle(&p, 1, &grid).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&r, &mut buf).unwrap();
        let rows = read_scan_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 35);
        for (row, cell) in rows.iter().zip(r.cells()) {
            assert_eq!(*row, cell);
        }
        assert!(read_scan_csv("a,b,c\n".as_bytes()).is_err());
    }

    #[test]
    fn scan_json_shape() {
        let p = GhzParams::balanced(4).unwrap();
        let r = scan_two_angle(&p, 1, &ScanGrid::figure_default()).unwrap();
        let j = scan_to_json(&r, 4, 1);
        assert_eq!(j["values"].as_array().unwrap().len(), 181);
        assert_eq!(j["values"][0].as_array().unwrap().len(), 91);
        assert_eq!(j["argmax"]["value"].as_f64().unwrap(), r.argmax.value);
    }
}
