//! Report schema and serialization.
//!
//! Every harness emits one [`SweepReport`]: a JSON document (schema-versioned,
//! with the exact config text and seed that produced it) plus a sibling CSV
//! with one row per `(eps, quantity)` and full-precision scientific notation.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub quantity: String,
    pub norm_spec: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitRow {
    pub quantity: String,
    pub norm_spec: String,
    pub target_exponent: Option<f64>,
    pub fitted_slope: f64,
    pub stderr: f64,
    pub residual: f64,
    pub sample_count: usize,
    /// measured slope further than the tolerance from the target
    pub flagged: bool,
    /// no simulation behind this row, exponent lookup only
    pub analytical_only: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub name: String,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub samples: usize,
    /// one entry per grid used for the resolution-stability scan
    pub per_grid: Vec<f64>,
    /// whether the statement's hypotheses hold for the tested data
    pub hypothesis_met: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub kind: String,
    pub code_version: String,
    pub seed: u64,
    pub config_hash: String,
    pub config_echo: String,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<FitRow>,
    pub ratios: Vec<RatioRow>,
    pub notes: Vec<String>,
}

impl SweepReport {
    pub fn new(kind: &str, config_echo: String, seed: u64) -> Self {
        SweepReport {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_hash: hash_text(&config_echo),
            config_echo,
            rows: Vec::new(),
            fits: Vec::new(),
            ratios: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// CSV with columns
    /// `eps,quantity,norm_spec,value,target_exponent,fitted_slope,stderr`;
    /// fit columns repeat on each row of the matching quantity.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,quantity,norm_spec,value,target_exponent,fitted_slope,stderr\n");
        for row in &self.rows {
            let fit = self.fits.iter().find(|f| f.quantity == row.quantity);
            let (target, slope, stderr) = match fit {
                Some(f) => (
                    f.target_exponent.map_or(String::new(), fmt_full),
                    fmt_full(f.fitted_slope),
                    fmt_full(f.stderr),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_full(row.eps),
                row.quantity.replace(',', ";"),
                row.norm_spec.replace(',', ";"),
                fmt_full(row.value),
                target,
                slope,
                stderr
            ));
        }
        out
    }

    pub fn write(&self, out_dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create {}", out_dir.display()))?;
        let json_path = out_dir.join(format!("{stem}.json"));
        std::fs::write(&json_path, self.to_json())
            .with_context(|| format!("cannot write {}", json_path.display()))?;
        let csv_path = out_dir.join(format!("{stem}.csv"));
        std::fs::write(&csv_path, self.to_csv())
            .with_context(|| format!("cannot write {}", csv_path.display()))?;
        Ok(())
    }
}

/// Full-precision scientific notation (17 significant digits round-trips f64).
pub fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn hash_text(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_nothing_and_keeps_precision() {
        let mut r = SweepReport::new("limit-sweep", "[grid]\n".into(), 7);
        r.rows.push(SweepRow {
            eps: 0.125,
            quantity: "b@6".into(),
            norm_spec: "Ltilde[rho=6]B[s=-0.5000;p=6;r=1]".into(),
            value: 1.0 / 3.0,
        });
        r.fits.push(FitRow {
            quantity: "b@6".into(),
            norm_spec: "Ltilde[rho=6]B[s=-0.5000;p=6;r=1]".into(),
            target_exponent: Some(1.0 / 6.0),
            fitted_slope: 0.1666,
            stderr: 0.001,
            residual: 0.0,
            sample_count: 6,
            flagged: false,
            analytical_only: false,
        });
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "eps,quantity,norm_spec,value,target_exponent,fitted_slope,stderr"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("1.2500000000000000e-1,b@6,"));
        assert!(row.contains("3.3333333333333331e-1"));
        // the parsed value round-trips exactly
        let value: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(value, 1.0 / 3.0);
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(hash_text("abc").len(), 64);
        assert_eq!(hash_text("abc"), hash_text("abc"));
        assert_ne!(hash_text("abc"), hash_text("abd"));
    }
}
