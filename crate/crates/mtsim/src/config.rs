//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

/// Every recognised key with its default and unit.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("e_j", "1.0", "ueV"),
    ("e_c", "0.005", "ueV"),
    ("n_g", "0", "2e"),
    ("w", "3.0", "ueV"),
    ("w_f", "12.0", "ueV"),
    ("mu", "0", "ueV"),
    ("t_hop", "auto", "ueV; auto = w_f"),
    ("delta", "auto", "ueV; auto = w_f"),
    ("length", "2", "sites"),
    ("cutoff", "2.5", "2e, half-integer multiple"),
    ("charge_offset", "omitted", "omitted | included"),
    ("alpha", "0, 0.03", "1/ueV, list"),
    ("t_start_ns", "0", "ns"),
    ("t_end_ns", "auto", "ns; auto = two Rabi periods"),
    ("points", "801", "samples"),
    ("gate_periods", "1", "Rabi periods"),
    ("check_convergence", "true", "bool"),
    ("cutoff_check", "true", "bool"),
    ("ej_over_ec", "1", "list"),
    ("kappa_points", "101", "samples"),
    ("band_cutoff", "20", "integer charges"),
    ("theta_points", "201", "samples"),
    ("lengths", "2-12", "sites, list or range"),
    ("detunings", "0:12", "mu:w_f pairs in ueV"),
    ("noise", "white", "white | path to two-column omega,S table"),
    ("f_max", "12", "transmon label"),
    ("w1", "0", "ueV"),
    ("w2", "0", "ueV"),
    ("w12", "3.0", "ueV"),
    ("two_qubit_cutoff", "1.5", "2e"),
    ("leakage_cutoff", "8.5", "2e"),
    ("full_model", "false", "bool"),
    ("frame_cutoff", "4.5", "2e"),
    (
        "corrupt_jw_string",
        "false",
        "bool, negative control for verify",
    ),
];

pub const EXPERIMENTS: &[&str] = &[
    "bands",
    "junction-spectrum",
    "rabi",
    "gate",
    "leakage",
    "two-qubit",
    "verify",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: String,
    values: BTreeMap<String, String>,
    /// Where each value came from: `default`, `file:<line>` or `--set`.
    origin: BTreeMap<String, String>,
}

fn config_err(line: Option<usize>, key: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        line,
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    Some((k.trim(), v.trim()))
}

impl RunConfig {
    pub fn defaults(experiment: &str) -> Result<Self, CliError> {
        if !EXPERIMENTS.contains(&experiment) {
            return Err(config_err(
                None,
                "experiment",
                format!(
                    "unknown experiment `{experiment}`, expected one of {}",
                    EXPERIMENTS.join(", ")
                ),
            ));
        }
        Ok(Self {
            experiment: experiment.to_string(),
            values: KEYS
                .iter()
                .map(|(k, v, _)| (k.to_string(), v.to_string()))
                .collect(),
            origin: KEYS
                .iter()
                .map(|(k, _, _)| (k.to_string(), "default".into()))
                .collect(),
        })
    }

    /// Defaults, then the file, then `--set` overrides; every value is
    /// type-checked before returning.
    pub fn load(experiment: &str, file: Option<&Path>, sets: &[String]) -> Result<Self, CliError> {
        let mut cfg = Self::defaults(experiment)?;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| {
                config_err(
                    None,
                    "--config",
                    format!("cannot read {}: {e}", path.display()),
                )
            })?;
            cfg.apply_text(&text)?;
        }
        for s in sets {
            let (k, v) =
                split_pair(s).ok_or_else(|| config_err(None, s, "--set expects key=value"))?;
            cfg.set(k, v, None)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = split_pair(body)
                .ok_or_else(|| config_err(Some(line), body, "expected `key = value`"))?;
            if let Some(prev) = seen.insert(k.to_string(), line) {
                return Err(config_err(
                    Some(line),
                    k,
                    format!("duplicate key, first set on line {prev}"),
                ));
            }
            self.set(k, v, Some(line))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), CliError> {
        if !self.values.contains_key(key) {
            return Err(config_err(line, key, "unknown key"));
        }
        if value.is_empty() {
            return Err(config_err(line, key, "empty value"));
        }
        self.values.insert(key.to_string(), value.to_string());
        let origin = line.map_or_else(|| "--set".to_string(), |l| format!("file:{l}"));
        self.origin.insert(key.to_string(), origin);
        Ok(())
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.origin
            .get(key)
            .and_then(|o| o.strip_prefix("file:"))
            .and_then(|l| l.parse().ok())
    }

    fn err(&self, key: &str, msg: impl Into<String>) -> CliError {
        config_err(self.line_of(key), key, msg)
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("config key `{key}` is not in the schema"))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v: f64 = self
            .raw(key)
            .parse()
            .map_err(|_| self.err(key, format!("`{}` is not a number", self.raw(key))))?;
        if !v.is_finite() {
            return Err(self.err(key, "must be finite"));
        }
        Ok(v)
    }

    /// `auto` maps to `None`.
    pub fn f64_or_auto(&self, key: &str) -> Result<Option<f64>, CliError> {
        if self.raw(key) == "auto" {
            Ok(None)
        } else {
            self.f64(key).map(Some)
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.raw(key).parse().map_err(|_| {
            self.err(
                key,
                format!("`{}` is not a non-negative integer", self.raw(key)),
            )
        })
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key) {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(self.err(key, format!("`{other}` is not a boolean"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.raw(key)
            .split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.err(key, format!("`{s}` is not a finite number")))
            })
            .collect()
    }

    /// Comma-separated integers or inclusive `a-b` ranges.
    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, CliError> {
        let mut out = Vec::new();
        for part in self.raw(key).split(',') {
            let part = part.trim();
            let bad = || self.err(key, format!("`{part}` is not an integer or range"));
            match part.split_once('-') {
                Some((a, b)) => {
                    let a: usize = a.trim().parse().map_err(|_| bad())?;
                    let b: usize = b.trim().parse().map_err(|_| bad())?;
                    if b < a {
                        return Err(bad());
                    }
                    out.extend(a..=b);
                }
                None => out.push(part.parse().map_err(|_| bad())?),
            }
        }
        Ok(out)
    }

    /// `mu:w_f` pairs.
    pub fn pair_list(&self, key: &str) -> Result<Vec<(f64, f64)>, CliError> {
        self.raw(key)
            .split(',')
            .map(|p| {
                let p = p.trim();
                let (a, b) = p
                    .split_once(':')
                    .ok_or_else(|| self.err(key, format!("`{p}` is not mu:w_f")))?;
                match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
                    (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => Ok((a, b)),
                    _ => Err(self.err(key, format!("`{p}` is not mu:w_f"))),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        for key in [
            "e_j",
            "e_c",
            "n_g",
            "w",
            "w_f",
            "mu",
            "cutoff",
            "t_start_ns",
            "gate_periods",
            "w1",
            "w2",
            "w12",
            "two_qubit_cutoff",
            "leakage_cutoff",
            "frame_cutoff",
        ] {
            self.f64(key)?;
        }
        for key in ["t_hop", "delta", "t_end_ns"] {
            self.f64_or_auto(key)?;
        }
        for key in [
            "length",
            "points",
            "kappa_points",
            "band_cutoff",
            "theta_points",
            "f_max",
        ] {
            self.usize(key)?;
        }
        for key in [
            "check_convergence",
            "cutoff_check",
            "full_model",
            "corrupt_jw_string",
        ] {
            self.bool(key)?;
        }
        self.f64_list("alpha")?;
        self.f64_list("ej_over_ec")?;
        self.usize_list("lengths")?;
        self.pair_list("detunings")?;
        if !matches!(self.raw("charge_offset"), "omitted" | "included") {
            return Err(self.err("charge_offset", "expected `omitted` or `included`"));
        }
        if self.usize("points")? < 2 {
            return Err(self.err("points", "need at least 2 samples"));
        }
        Ok(())
    }

    /// Resolved values, for the manifest.
    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn origins(&self) -> &BTreeMap<String, String> {
        &self.origin
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut c = RunConfig::defaults("rabi").unwrap();
        c.apply_text("# comment\nw = 2.5  # trailing\n\nalpha = 0, 0.01\n")
            .unwrap();
        assert_eq!(c.f64("w").unwrap(), 2.5);
        assert_eq!(c.f64_list("alpha").unwrap(), vec![0.0, 0.01]);
        assert_eq!(c.origins()["w"], "file:2");
        c.set("w", "1", None).unwrap();
        assert_eq!(c.f64("w").unwrap(), 1.0);
    }

    #[test]
    fn diagnostics_name_line_and_key() {
        let mut c = RunConfig::defaults("rabi").unwrap();
        let e = c.apply_text("w = 1\nbogus = 3\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: Some(2), ref key, .. } if key == "bogus"));
        let e = c.apply_text("w = 1\nw = 2\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: Some(2), .. }));
        let mut c = RunConfig::defaults("rabi").unwrap();
        c.apply_text("\n\nw = fast\n").unwrap();
        assert!(matches!(
            c.validate(),
            Err(CliError::Config { line: Some(3), .. })
        ));
        assert!(RunConfig::defaults("nonsense").is_err());
    }

    #[test]
    fn lists_and_ranges() {
        let mut c = RunConfig::defaults("leakage").unwrap();
        c.set("lengths", "2-4, 7", None).unwrap();
        assert_eq!(c.usize_list("lengths").unwrap(), vec![2, 3, 4, 7]);
        c.set("detunings", "0:12, 8:12", None).unwrap();
        assert_eq!(
            c.pair_list("detunings").unwrap(),
            vec![(0.0, 12.0), (8.0, 12.0)]
        );
        c.set("lengths", "5-3", None).unwrap();
        assert!(c.usize_list("lengths").is_err());
    }
}
