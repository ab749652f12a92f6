//! Flag values merged over an optional `key=value` configuration file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use ehcap::{Battery, ChannelParams, EnergyModel, NetworkParams};

/// Keys accepted both as `--key` flags and in configuration files.
pub const KEYS: [&str; 12] = [
    "lambda", "p", "q", "B", "alpha", "theta", "d", "L", "trials", "slots", "seed", "window-radius",
];

pub const DEFAULTS: [(&str, &str); 11] = [
    ("lambda", "0.1"),
    ("p", "0.5"),
    ("B", "inf"),
    ("alpha", "3"),
    ("theta", "2"),
    ("d", "2"),
    ("L", "1"),
    ("trials", "100000"),
    ("slots", "1000000"),
    ("seed", "42"),
    ("points", "200"),
];

#[derive(Debug)]
pub enum CliError {
    /// Bad flag, value or configuration; exit code 2.
    Usage(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<ehcap::Error> for CliError {
    fn from(e: ehcap::Error) -> Self {
        match e {
            ehcap::Error::InvalidParameter { field, value, requirement } => {
                CliError::Usage(format!("invalid --{field} {value}: must satisfy {requirement}"))
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Resolved `key -> raw value`, flags taking precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new(flags: &[(&str, Option<String>)], config: Option<&Path>) -> Result<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read --config {}: {e}", path.display())))?;
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
                let key = key.trim();
                if !KEYS.contains(&key) && key != "points" {
                    return Err(CliError::Usage(format!("{}:{}: unknown key `{key}`", path.display(), n + 1)));
                }
                values.insert(key.to_string(), value.trim().to_string());
            }
        }
        for (key, value) in flags {
            if let Some(v) = value {
                values.insert((*key).to_string(), v.clone());
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .or_else(|| DEFAULTS.iter().find(|(k, _)| *k == key).map(|(_, v)| *v))
    }

    /// Uses `value` for `key` unless a flag or the config file set it.
    pub fn or_default(mut self, key: &str, value: &str) -> Self {
        self.values.entry(key.to_string()).or_insert_with(|| value.to_string());
        self
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.raw(key).ok_or_else(|| CliError::Usage(format!("missing --{key}")))
    }

    pub fn real(&self, key: &str) -> Result<f64> {
        let raw = self.required(key)?;
        if raw.contains(',') {
            return Err(CliError::Usage(format!("--{key} takes a single value, got `{raw}`")));
        }
        parse_real(key, raw)
    }

    pub fn real_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.raw(key).is_some() {
            self.real(key)
        } else {
            Ok(default)
        }
    }

    /// Comma-separated list; empty lists are rejected.
    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.required(key)?;
        let items: Vec<&str> = raw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if items.is_empty() {
            return Err(CliError::Usage(format!("--{key} needs at least one value")));
        }
        items.iter().map(|s| parse_real(key, s)).collect()
    }

    pub fn count(&self, key: &str) -> Result<u64> {
        let raw = self.required(key)?;
        let parsed = raw
            .parse::<f64>()
            .ok()
            .filter(|v| v.fract() == 0.0 && *v >= 0.0 && *v <= u64::MAX as f64)
            .map(|v| v as u64)
            .or_else(|| raw.parse::<u64>().ok());
        parsed.ok_or_else(|| CliError::Usage(format!("invalid --{key} `{raw}`: expected a non-negative integer")))
    }

    pub fn probability(&self, key: &str) -> Result<f64> {
        let v = self.real(key)?;
        if (0.0..=1.0).contains(&v) {
            Ok(v)
        } else {
            Err(CliError::Usage(format!("invalid --{key} {v}: must lie in [0, 1]")))
        }
    }

    pub fn battery(&self) -> Result<Battery> {
        let raw = self.required("B")?;
        raw.parse::<Battery>()
            .map_err(|_| CliError::Usage(format!("invalid --B `{raw}`: expected a positive integer or `inf`")))
    }

    pub fn channel(&self) -> Result<ChannelParams<f64>> {
        Ok(ChannelParams::new(self.real("alpha")?, self.real("theta")?, self.real("d")?)?)
    }

    pub fn energy(&self) -> Result<EnergyModel<f64>> {
        let p = self.probability("p")?;
        Ok(EnergyModel::new(p, self.battery()?)?)
    }

    pub fn network(&self, lambda: f64) -> Result<NetworkParams<f64>> {
        Ok(NetworkParams::new(lambda, self.channel()?, self.energy()?)?)
    }

    pub fn packet_len(&self) -> Result<u32> {
        let l = self.count("L")?;
        u32::try_from(l)
            .ok()
            .filter(|&l| l >= 1)
            .ok_or_else(|| CliError::Usage(format!("invalid --L {l}: must be a positive integer")))
    }

    /// Every resolved key, for output headers.
    pub fn resolved(&self) -> Vec<(String, String)> {
        let mut out: BTreeMap<String, String> =
            DEFAULTS.iter().map(|(k, v)| ((*k).to_string(), (*v).to_string())).collect();
        out.extend(self.values.iter().map(|(k, v)| (k.clone(), v.clone())));
        out.into_iter().collect()
    }
}

fn parse_real(key: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("invalid --{key} `{raw}`: expected a finite number")))
}
