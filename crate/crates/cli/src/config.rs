//! Run configuration: `key = value` file entries overlaid by flags.
//!
//! Every value a command reads is recorded with its resolved form, so the
//! output headers list defaults as well as explicit settings.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Keys accepted in configuration files and as `--key` flags.
pub const KEYS: &[&str] = &[
    "j", "kappa", "omega", "delta", "nmax", "moments", "tol", "grid-theta", "grid-phi", "t-max", "times", "seeds", "seed", "out",
    "e-target", "count", "mode", "points", "kernel", "sigma", "renorm", "samples", "theta", "phi", "q", "p", "classical", "raw-time",
    "dump-state", "disc", "window", "method",
];

#[derive(Debug, Default)]
pub struct RunConfig {
    command: String,
    values: BTreeMap<String, String>,
    used: RefCell<BTreeMap<String, String>>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn parse_file_text(text: &str) -> CliResult<Self> {
        let mut cfg = Self::default();
        for (no, line) in text.lines().enumerate() {
            let t = line.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            let (k, v) = t.split_once('=').ok_or_else(|| usage(format!("config line {}: expected `key = value`", no + 1)))?;
            let k = k.trim().replace('_', "-");
            if !KEYS.contains(&k.as_str()) {
                return Err(usage(format!("config line {}: unknown key `{k}`", no + 1)));
            }
            cfg.values.insert(k, v.trim().to_string());
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
                Self::parse_file_text(&text)
            }
        }
    }

    /// Flag values take precedence over file values.
    pub fn overlay(&mut self, flags: impl IntoIterator<Item = (&'static str, String)>) {
        for (k, v) in flags {
            self.values.insert(k.to_string(), v);
        }
    }

    pub fn set_command(&mut self, name: &str) {
        self.command = name.to_string();
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    fn record(&self, key: &str, value: String) {
        self.used.borrow_mut().insert(key.to_string(), value);
    }

    /// Resolved settings read so far, sorted by key.
    pub fn provenance(&self) -> Vec<(String, String)> {
        self.used.borrow().iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    pub fn raw(&self, key: &str) -> Option<String> {
        let v = self.values.get(key).cloned();
        if let Some(v) = &v {
            self.record(key, v.clone());
        }
        v
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, v: &str) -> CliResult<T> {
        v.parse().map_err(|_| usage(format!("`{key}`: cannot parse `{v}`")))
    }

    pub fn f64_opt(&self, key: &str) -> CliResult<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let x: f64 = self.parse(key, &v)?;
                if !x.is_finite() {
                    return Err(usage(format!("`{key}` must be finite")));
                }
                Ok(Some(x))
            }
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        match self.f64_opt(key)? {
            Some(x) => Ok(x),
            None => {
                self.record(key, dicke_core::io::fmt_f64(default));
                Ok(default)
            }
        }
    }

    pub fn f64_req(&self, key: &str) -> CliResult<f64> {
        self.f64_opt(key)?.ok_or_else(|| usage(format!("`--{key}` is required")))
    }

    pub fn positive(&self, key: &str, default: f64) -> CliResult<f64> {
        let x = self.f64_or(key, default)?;
        if x <= 0.0 {
            return Err(usage(format!("`{key}` must be > 0, got {x}")));
        }
        Ok(x)
    }

    pub fn usize_opt(&self, key: &str) -> CliResult<Option<usize>> {
        self.raw(key).map(|v| self.parse(key, &v)).transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> CliResult<usize> {
        match self.usize_opt(key)? {
            Some(x) => Ok(x),
            None => {
                self.record(key, default.to_string());
                Ok(default)
            }
        }
    }

    pub fn string_or(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or_else(|| {
            self.record(key, default.to_string());
            default.to_string()
        })
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.raw(key).as_deref() {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(usage(format!("`{key}` expects true or false, got `{v}`"))),
        }
    }

    /// Comma-separated list of numbers.
    pub fn list_opt(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let items: CliResult<Vec<f64>> = v.split(',').map(|s| self.parse::<f64>(key, s.trim())).collect();
        let items = items?;
        if items.is_empty() || items.iter().any(|x| !x.is_finite()) {
            return Err(usage(format!("`{key}` must be a list of finite numbers")));
        }
        Ok(Some(items))
    }

    /// `a:b:n` (inclusive, `n` points) or a single value.
    pub fn range_or(&self, key: &str, default: (f64, f64, usize)) -> CliResult<Vec<f64>> {
        let (a, b, n) = match self.raw(key) {
            None => {
                self.record(key, format!("{}:{}:{}", default.0, default.1, default.2));
                default
            }
            Some(v) => {
                let parts: Vec<&str> = v.split(':').collect();
                match parts.as_slice() {
                    [x] => {
                        let x: f64 = self.parse(key, x.trim())?;
                        (x, x, 1)
                    }
                    [a, b, n] => (self.parse(key, a.trim())?, self.parse(key, b.trim())?, self.parse(key, n.trim())?),
                    _ => return Err(usage(format!("`{key}` expects `a:b:n` or a single value, got `{v}`"))),
                }
            }
        };
        if !(a.is_finite() && b.is_finite()) || n == 0 || (n == 1 && a != b) || b < a {
            return Err(usage(format!("`{key}`: invalid range {a}:{b}:{n}")));
        }
        if n == 1 {
            return Ok(vec![a]);
        }
        let m = (n - 1) as f64;
        // weighted form keeps interior grid points such as 1.0 exact
        Ok((0..n).map(|i| (a * (m - i as f64) + b * i as f64) / m).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut c = RunConfig::parse_file_text("# model\nkappa = 0.5\nj=10 # spin\n\ngrid_theta = 91\n").unwrap();
        c.overlay([("kappa", "2".to_string())]);
        assert_eq!(c.f64_req("kappa").unwrap(), 2.0);
        assert_eq!(c.f64_req("j").unwrap(), 10.0);
        assert_eq!(c.usize_or("grid-theta", 181).unwrap(), 91);
        assert_eq!(c.f64_or("omega", 1.0).unwrap(), 1.0);
        let p = c.provenance();
        assert_eq!(p.iter().map(|x| x.0.as_str()).collect::<Vec<_>>(), ["grid-theta", "j", "kappa", "omega"]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::parse_file_text("bogus = 1").is_err());
        assert!(RunConfig::parse_file_text("kappa 1").is_err());
        let c = RunConfig::parse_file_text("kappa = abc\nomega = -1\nclassical = maybe").unwrap();
        assert!(c.f64_req("kappa").is_err());
        assert!(c.positive("omega", 1.0).is_err());
        assert!(c.flag("classical").is_err());
        assert!(c.f64_req("j").is_err());
    }

    #[test]
    fn ranges() {
        let c = RunConfig::parse_file_text("kappa = 0:2:201\ntimes = 0, 0.5,1").unwrap();
        let k = c.range_or("kappa", (0.0, 1.0, 2)).unwrap();
        assert_eq!(k.len(), 201);
        assert_eq!(k[100], 1.0);
        assert_eq!(k[200], 2.0);
        assert_eq!(c.list_opt("times").unwrap().unwrap(), vec![0.0, 0.5, 1.0]);
        let bad = RunConfig::parse_file_text("kappa = 2:0:5").unwrap();
        assert!(bad.range_or("kappa", (0.0, 1.0, 2)).is_err());
    }
}
