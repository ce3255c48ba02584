//! Distribution files and JSON output formatting.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::prob::Distribution;

/// On-disk form of a distribution: `{"p": [...], "name": "..."}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    pub p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

/// Parses a JSON document when the first non-blank character is `{`, and
/// one number per line otherwise. In the line format `#` starts a comment.
pub fn parse_values(text: &str) -> Result<DistributionFile, String> {
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(text).map_err(|e| format!("bad JSON distribution: {e}"));
    }
    let mut p = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let x = body
            .parse::<f64>()
            .map_err(|e| format!("line {}: {body:?}: {e}", k + 1))?;
        p.push(x);
    }
    Ok(DistributionFile { p, name: None })
}

/// Reads and validates a distribution. With `renormalize` any nonnegative
/// weight vector is accepted and rescaled; otherwise the sum must already be
/// within the normalization slack of 1.
pub fn read_distribution(path: &Path, renormalize: bool) -> Result<Distribution, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = parse_values(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let built = if renormalize {
        Distribution::from_weights(file.p)
    } else {
        Distribution::new(file.p)
    };
    built.map_err(|e: Error| format!("{}: {e}", path.display()))
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Applies [`round12`] to every floating-point number in `value`.
pub fn round_numbers(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round12(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}
