//! Run configuration: a flat key-value text format with `[section]` headers,
//! `#` comments, and comma-separated numeric lists. Parseable with no
//! dependencies; every parse error carries its line number.
//!
//! ```text
//! [model]
//! b = 1.0
//! alpha = 0.0
//! rho1 = 0.6
//! rho2 = 0.8
//!
//! [grid]
//! m = 1
//! t = 1.0, 1.0
//! u = 0.5, -0.3
//!
//! [run]
//! n_list = 200, 400, 800
//! num_samples = 10000
//! seed = 42
//! ```

use crate::{CliError, Result};
use hardwall::model::{ModelParams, ObservableGrid};
use std::collections::BTreeMap;

/// Raw sectioned key-value view of a config text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

/// Parse the raw section/key/value structure. Duplicate keys within a
/// section and text outside any section are errors.
pub fn parse_raw(text: &str) -> std::result::Result<RawConfig, String> {
    let mut raw = RawConfig::default();
    let mut current: Option<String> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match line.find('#') {
            Some(p) => &line[..p],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| format!("line {lineno}: unterminated section header"))?
                .trim();
            if name.is_empty() {
                return Err(format!("line {lineno}: empty section name"));
            }
            let name = name.to_ascii_lowercase();
            if raw.sections.contains_key(&name) {
                return Err(format!("line {lineno}: duplicate section [{name}]"));
            }
            raw.sections.insert(name.clone(), BTreeMap::new());
            current = Some(name);
            continue;
        }
        let section = current
            .as_ref()
            .ok_or_else(|| format!("line {lineno}: key-value pair before any [section]"))?;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {lineno}: expected 'key = value'"))?;
        let key = key.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(format!("line {lineno}: empty key"));
        }
        let entry = raw.sections.get_mut(section).expect("section exists");
        if entry
            .insert(key.clone(), value.trim().to_string())
            .is_some()
        {
            return Err(format!(
                "line {lineno}: duplicate key '{key}' in [{section}]"
            ));
        }
    }
    Ok(raw)
}

fn get<'a>(raw: &'a RawConfig, section: &str, key: &str) -> std::result::Result<&'a str, String> {
    raw.sections
        .get(section)
        .ok_or_else(|| format!("missing section [{section}]"))?
        .get(key)
        .map(|s| s.as_str())
        .ok_or_else(|| format!("missing key '{key}' in [{section}]"))
}

fn parse_f64(section: &str, key: &str, s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("[{section}] {key}: '{s}' is not a number"))
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("[{section}] {key}: '{s}' is not finite"))
            }
        })
}

fn parse_list_f64(section: &str, key: &str, s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| parse_f64(section, key, p.trim()))
        .collect()
}

/// Parse a comma-separated strictly increasing list of positive sizes.
pub fn parse_n_list(s: &str) -> std::result::Result<Vec<u64>, String> {
    let items: Vec<u64> = s
        .split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<u64>()
                .map_err(|_| format!("'{p}' is not a positive integer"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if items.is_empty() || items.contains(&0) {
        return Err("n_list must contain positive integers".into());
    }
    for w in items.windows(2) {
        if w[0] >= w[1] {
            return Err(format!(
                "n_list must be strictly increasing, got {} >= {}",
                w[0], w[1]
            ));
        }
    }
    Ok(items)
}

/// Fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelParams,
    pub grid: ObservableGrid,
    pub n_list: Vec<u64>,
    pub num_samples: usize,
    pub seed: u64,
}

/// Parse and validate a config text into a runnable configuration.
pub fn config_from_text(text: &str) -> Result<RunConfig> {
    let raw = parse_raw(text).map_err(CliError::Config)?;
    build_config(&raw).map_err(CliError::Config)
}

fn build_config(raw: &RawConfig) -> std::result::Result<RunConfig, String> {
    let b = parse_f64("model", "b", get(raw, "model", "b")?)?;
    let alpha = parse_f64("model", "alpha", get(raw, "model", "alpha")?)?;
    let rho1 = parse_f64("model", "rho1", get(raw, "model", "rho1")?)?;
    let rho2 = parse_f64("model", "rho2", get(raw, "model", "rho2")?)?;
    let model = ModelParams::new(b, alpha, rho1, rho2).map_err(|e| e.to_string())?;

    let m: usize = get(raw, "grid", "m")?
        .parse()
        .map_err(|_| "[grid] m: not a positive integer".to_string())?;
    let t = parse_list_f64("grid", "t", get(raw, "grid", "t")?)?;
    let u = parse_list_f64("grid", "u", get(raw, "grid", "u")?)?;
    let grid = ObservableGrid::new(m, t, u).map_err(|e| e.to_string())?;

    let n_list = parse_n_list(get(raw, "run", "n_list")?)?;
    let num_samples: usize = match raw.sections.get("run").and_then(|s| s.get("num_samples")) {
        Some(s) => s
            .parse()
            .map_err(|_| "[run] num_samples: not a nonnegative integer".to_string())?,
        None => 10_000,
    };
    let seed: u64 = match raw.sections.get("run").and_then(|s| s.get("seed")) {
        Some(s) => s
            .parse()
            .map_err(|_| "[run] seed: not a nonnegative integer".to_string())?,
        None => 0,
    };
    Ok(RunConfig {
        model,
        grid,
        n_list,
        num_samples,
        seed,
    })
}

/// Canonical full-precision echo of a configuration; parsing it back yields
/// an identical configuration (manifests embed this text for replay).
pub fn canonical_text(cfg: &RunConfig) -> String {
    let join = |xs: &[f64]| {
        xs.iter()
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let n_join = cfg
        .n_list
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        "[model]\nb = {:?}\nalpha = {:?}\nrho1 = {:?}\nrho2 = {:?}\n\n\
         [grid]\nm = {}\nt = {}\nu = {}\n\n\
         [run]\nn_list = {}\nnum_samples = {}\nseed = {}\n",
        cfg.model.b,
        cfg.model.alpha,
        cfg.model.rho1,
        cfg.model.rho2,
        cfg.grid.m(),
        join(cfg.grid.t()),
        join(cfg.grid.u()),
        n_join,
        cfg.num_samples,
        cfg.seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# comment
[model]
b = 1.0
alpha = 0.0
rho1 = 0.6
rho2 = 0.8

[grid]
m = 1
t = 1.0, 1.0
u = 0.5, -0.3

[run]
n_list = 200, 400
num_samples = 500
seed = 7
";

    #[test]
    fn parses_reference_config() {
        let cfg = config_from_text(GOOD).unwrap();
        assert_eq!(cfg.n_list, vec![200, 400]);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.grid.m(), 1);
        assert_eq!(cfg.model.rho2, 0.8);
    }

    #[test]
    fn canonical_roundtrip() {
        let cfg = config_from_text(GOOD).unwrap();
        let echo = canonical_text(&cfg);
        let cfg2 = config_from_text(&echo).unwrap();
        assert_eq!(canonical_text(&cfg2), echo);
        assert_eq!(cfg2.grid.u(), cfg.grid.u());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "[model\nb = 1.0\n";
        let err = parse_raw(bad).unwrap_err();
        assert!(err.contains("line 1"), "{err}");

        let bad = "b = 1.0\n";
        assert!(parse_raw(bad).unwrap_err().contains("before any"));

        let bad = "[model]\nb 1.0\n";
        assert!(parse_raw(bad).unwrap_err().contains("line 2"));

        let bad = "[model]\nb = 1.0\nb = 2.0\n";
        assert!(parse_raw(bad).unwrap_err().contains("duplicate key"));
    }

    #[test]
    fn rejects_invalid_values() {
        let bad = GOOD.replace("rho2 = 0.8", "rho2 = 0.5"); // rho2 < rho1
        assert!(config_from_text(&bad).is_err());
        let bad = GOOD.replace("n_list = 200, 400", "n_list = 400, 200");
        assert!(config_from_text(&bad).is_err());
        let bad = GOOD.replace("b = 1.0", "b = nan");
        assert!(config_from_text(&bad).is_err());
        let bad = GOOD.replace("t = 1.0, 1.0", "t = 1.0");
        assert!(config_from_text(&bad).is_err());
    }

    #[test]
    fn n_list_parser() {
        assert_eq!(parse_n_list("1, 2,3").unwrap(), vec![1, 2, 3]);
        assert!(parse_n_list("").is_err());
        assert!(parse_n_list("0").is_err());
        assert!(parse_n_list("5, 5").is_err());
        assert!(parse_n_list("a").is_err());
    }
}
