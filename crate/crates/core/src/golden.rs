//! Golden reference files: high-precision values of `ln H_ν`, `ln D_ν` and
//! `ln R_ν`, and their comparison against this crate.
//!
//! ```json
//! {"meta": {"precision_digits": 40, "generator": "..."},
//!  "entries": [{"fn": "H", "nu": -1, "x": 0, "log_value": -0.1207822376352452}]}
//! ```
//!
//! `log_value` is canonical; `value` alone is accepted when it is positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::ratio::ratio_hermite;
use crate::specfun::{dnu, hermite, Order};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GoldenFn {
    H,
    D,
    R,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenMeta {
    pub precision_digits: u32,
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenEntry {
    #[serde(rename = "fn")]
    pub func: GoldenFn,
    pub nu: f64,
    pub x: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl GoldenEntry {
    /// Reference value of the natural log.
    pub fn reference_log(&self) -> Result<f64> {
        match (self.log_value, self.value) {
            (Some(l), _) if l.is_finite() => Ok(l),
            (None, Some(v)) if v > 0.0 && v.is_finite() => Ok(v.ln()),
            _ => Err(Error::Golden(format!(
                "entry {:?} nu={} x={} has no usable log_value or positive value",
                self.func, self.nu, self.x
            ))),
        }
    }

    /// The same quantity computed by this crate.
    pub fn compute_log(&self, cfg: &QuadratureConfig) -> Result<f64> {
        let nu = Order::new(self.nu)?;
        Ok(match self.func {
            GoldenFn::H => hermite(nu, self.x, cfg)?.log_mag(),
            GoldenFn::D => dnu(nu, self.x, cfg)?.log_mag(),
            GoldenFn::R => ratio_hermite(nu, self.x, cfg)?.r.ln(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenFile {
    pub meta: GoldenMeta,
    pub entries: Vec<GoldenEntry>,
}

impl GoldenFile {
    /// Parses and validates a golden file.
    pub fn parse(text: &str) -> Result<Self> {
        let file: GoldenFile =
            serde_json::from_str(text).map_err(|e| Error::Golden(e.to_string()))?;
        for e in &file.entries {
            e.reference_log()?;
            if !(e.nu < 0.0 && e.x.is_finite()) {
                return Err(Error::Golden(format!(
                    "entry needs nu < 0 and finite x, got nu={} x={}",
                    e.nu, e.x
                )));
            }
        }
        Ok(file)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Golden(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenCheck {
    pub func: GoldenFn,
    pub nu: f64,
    pub x: f64,
    pub reference_log: f64,
    pub computed_log: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

/// Compares every entry; an entry passes when
/// `|computed - reference| <= rel_tol * max(1, |reference|)` in log space.
pub fn compare(
    file: &GoldenFile,
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<GoldenCheck>> {
    file.entries
        .iter()
        .map(|e| {
            let reference_log = e.reference_log()?;
            let computed_log = e.compute_log(cfg)?;
            let abs_diff = (computed_log - reference_log).abs();
            Ok(GoldenCheck {
                func: e.func,
                nu: e.nu,
                x: e.x,
                reference_log,
                computed_log,
                abs_diff,
                pass: abs_diff <= rel_tol * reference_log.abs().max(1.0),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{"meta":{"precision_digits":30,"generator":"closed forms"},
        "entries":[
          {"fn":"D","nu":-1,"x":0,"log_value":0.22579135264472743},
          {"fn":"H","nu":-2,"x":0,"value":0.5},
          {"fn":"R","nu":-1,"x":0,"value":1.2732395447351628}
        ]}"#;

    #[test]
    fn parses_and_matches_closed_forms() {
        let f = GoldenFile::parse(SMALL).unwrap();
        assert_eq!(f.entries.len(), 3);
        let checks = compare(&f, 1e-12, &QuadratureConfig::default()).unwrap();
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
    }

    #[test]
    fn perturbed_entry_fails() {
        let mut f = GoldenFile::parse(SMALL).unwrap();
        let l = f.entries[0].log_value.unwrap();
        f.entries[0].log_value = Some(l + 1e-6);
        let checks = compare(&f, 1e-10, &QuadratureConfig::default()).unwrap();
        assert!(!checks[0].pass);
        assert!(checks[1].pass && checks[2].pass);
    }

    #[test]
    fn malformed_files_are_rejected() {
        for bad in [
            "not json",
            r#"{"meta":{"precision_digits":1,"generator":"g"},"entries":[{"fn":"Q","nu":-1,"x":0,"value":1}]}"#,
            r#"{"meta":{"precision_digits":1,"generator":"g"},"entries":[{"fn":"H","nu":-1,"x":0}]}"#,
            r#"{"meta":{"precision_digits":1,"generator":"g"},"entries":[{"fn":"H","nu":1,"x":0,"value":1}]}"#,
            r#"{"meta":{"precision_digits":1,"generator":"g"},"entries":[{"fn":"H","nu":-1,"x":0,"value":-2}]}"#,
            r#"{"entries":[]}"#,
        ] {
            assert!(
                matches!(GoldenFile::parse(bad), Err(Error::Golden(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn empty_entries_are_valid() {
        let f =
            GoldenFile::parse(r#"{"meta":{"precision_digits":1,"generator":"g"},"entries":[]}"#)
                .unwrap();
        assert!(compare(&f, 1e-10, &QuadratureConfig::default())
            .unwrap()
            .is_empty());
    }
}
