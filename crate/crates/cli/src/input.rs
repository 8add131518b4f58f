//! Parsing of spectra files and CI-state records.
//!
//! Spectra come either as delimited text, one spectrum per line, fields
//! separated by commas, semicolons or whitespace, with an optional leading
//! non-numeric label; or as JSON records `{"label": …, "lambda": [...]}`.
//! Blank lines and lines starting with `#` are ignored. CI states are JSON
//! records `{"occupied": [1,2,3], "re": 0.7, "im": 0.0}`, one per line.

use std::io::Read;

use qpin_core::selection::CIRecord;
use qpin_core::Setting;
use serde::Deserialize;

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSpectrum {
    pub label: String,
    pub values: Vec<f64>,
}

/// Reads a path, or standard input for `-`.
pub fn read_source(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| format!("reading stdin: {e}"))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

#[derive(Deserialize)]
struct SpectrumRecord {
    #[serde(default)]
    label: Option<serde_json::Value>,
    lambda: Vec<f64>,
}

/// Parses one data line; `ordinal` is the 1-based position among data lines
/// and serves as the default label.
pub fn parse_spectrum_line(line: &str, ordinal: usize) -> Result<LabeledSpectrum, String> {
    if line.starts_with('{') {
        let rec: SpectrumRecord = serde_json::from_str(line).map_err(|e| format!("invalid spectrum record: {e}"))?;
        let label = match rec.label {
            None => ordinal.to_string(),
            Some(serde_json::Value::String(s)) => s,
            Some(v) => v.to_string(),
        };
        return Ok(LabeledSpectrum { label, values: rec.lambda });
    }
    let fields: Vec<&str> = line.split(|c: char| c == ',' || c == ';' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
    let (label, numbers) = match fields.first() {
        Some(f) if f.parse::<f64>().is_err() => (f.to_string(), &fields[1..]),
        _ => (ordinal.to_string(), &fields[..]),
    };
    let values = numbers
        .iter()
        .map(|f| f.parse::<f64>().map_err(|_| format!("`{f}` is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("no occupation numbers on line".into());
    }
    Ok(LabeledSpectrum { label, values })
}

/// Every data line with its source line number and parse result.
pub fn parse_spectra(text: &str) -> Vec<(usize, Result<LabeledSpectrum, String>)> {
    data_lines(text).enumerate().map(|(k, (ln, l))| (ln, parse_spectrum_line(l, k + 1))).collect()
}

/// True when the first data line is a CI amplitude record.
pub fn looks_like_ci(text: &str) -> bool {
    data_lines(text).next().is_some_and(|(_, l)| {
        l.starts_with('{') && serde_json::from_str::<serde_json::Value>(l).is_ok_and(|v| v.get("occupied").is_some())
    })
}

pub fn parse_ci(text: &str) -> Result<Vec<CIRecord>, String> {
    data_lines(text)
        .map(|(ln, l)| serde_json::from_str::<CIRecord>(l).map_err(|e| format!("line {ln}: invalid CI record: {e}")))
        .collect()
}

/// `d` from the length and `N = round(Σλ)` when `|Σλ − N| ≤ tol`.
pub fn infer_setting(values: &[f64], tol: f64) -> Result<Setting, String> {
    let sum: f64 = values.iter().sum();
    let n = sum.round();
    if (sum - n).abs() > tol || n < 1.0 {
        return Err(format!("cannot infer N: entries sum to {sum}, not an integer within tolerance; pass --setting"));
    }
    Setting::new(n as usize, values.len()).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delimited_and_json_lines() {
        let text = "# header\n1,1,1,0,0,0\n\nfoo 0.5 0.5 0.5 0.5 0.5 0.5\n{\"label\": 7, \"lambda\": [1,0.5,0.5,0.5,0.5,0]}\nbar x 1\n";
        let rows = parse_spectra(text);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].1.as_ref().unwrap().label, "1");
        assert_eq!(rows[1].1.as_ref().unwrap().label, "foo");
        assert_eq!(rows[2].1.as_ref().unwrap().label, "7");
        assert_eq!(rows[2].0, 5);
        assert!(rows[3].1.is_err());
    }

    #[test]
    fn ci_detection_and_setting_inference() {
        let ci = "{\"occupied\": [1,2,3], \"re\": 1.0, \"im\": 0.0}\n";
        assert!(looks_like_ci(ci));
        assert_eq!(parse_ci(ci).unwrap()[0].occupied, vec![1, 2, 3]);
        assert!(!looks_like_ci("1,1,1,0,0,0"));
        assert_eq!(infer_setting(&[1., 1., 1., 0., 0., 0.], 1e-10).unwrap(), Setting::BORLAND_DENNIS);
        assert!(infer_setting(&[0.5, 0.2], 1e-10).is_err());
    }
}
