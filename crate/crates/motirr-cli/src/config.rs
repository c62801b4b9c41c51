//! Flat key=value configuration files with namespaced keys.
//!
//! Precedence: command-line flags override config keys, which override
//! built-in defaults. Unknown keys are rejected before any computation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// CLI failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit 2).
    Config(String),
    /// Numerical non-convergence or no solution (exit 3).
    Numeric(String),
    /// I/O failure (exit 4).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<motirr::Error> for CliError {
    fn from(e: motirr::Error) -> Self {
        match e {
            motirr::Error::InvalidArgument(m) => CliError::Config(m),
            motirr::Error::NoEvanescentField | motirr::Error::SubcriticalAngle => {
                CliError::Config(e.to_string())
            }
            motirr::Error::NoSolution(m) | motirr::Error::Numerical(m) => CliError::Numeric(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Every key a config file may contain.
const KNOWN_KEYS: &[&str] = &[
    "command",
    "output",
    "seed",
    "R",
    "alpha",
    "n_max",
    "trials",
    "efficiency",
    "bomb",
    "records",
    "source.kind",
    "source.a",
    "grid.points",
    "grid.span_sigmas",
    "spectrum.points",
    "spectrum.psi_min",
    "spectrum.psi_max",
    "coupler.lambda0_nm",
    "coupler.n1",
    "coupler.n2",
    "coupler.n_gap",
    "coupler.theta1_deg",
    "sweep.x_max_nm",
    "sweep.points",
    "scenario.schedule",
    "scenario.duration_ns",
    "scenario.rate_per_ns",
    "scenario.round_trip_ns",
    "scenario.pockels_reaction_ns",
    "scenario.info_delay_ns",
    "threshold.epsilon",
];

/// Parsed key=value document.
#[derive(Debug, Default, Clone)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Config(format!("unknown key \"{key}\"")));
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::Config(format!("duplicate key \"{key}\"")));
            }
        }
        Ok(Self { map })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        debug_assert!(KNOWN_KEYS.contains(&key), "unregistered key {key}");
        self.map.get(key).map(String::as_str)
    }

    fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Config(format!("key \"{key}\": cannot parse \"{raw}\""))
            }),
        }
    }

    /// flag > config > default.
    pub fn real(&self, flag: Option<f64>, key: &str, default: Option<f64>) -> CliResult<f64> {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(v) = self.get_parsed::<f64>(key)? {
            return Ok(v);
        }
        default.ok_or_else(|| CliError::Config(format!("missing required key \"{key}\"")))
    }

    pub fn integer(&self, flag: Option<u64>, key: &str, default: Option<u64>) -> CliResult<u64> {
        if let Some(v) = flag {
            return Ok(v);
        }
        if let Some(v) = self.get_parsed::<u64>(key)? {
            return Ok(v);
        }
        default.ok_or_else(|| CliError::Config(format!("missing required key \"{key}\"")))
    }

    pub fn boolean(&self, flag: Option<bool>, key: &str, default: bool) -> CliResult<bool> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.get_parsed::<bool>(key)?.unwrap_or(default))
    }

    pub fn string(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.get(key).map(str::to_string))
    }
}

/// Validates a probability-like value, naming the offending key.
pub fn check_range(key: &str, value: f64, lo: f64, hi_exclusive: f64) -> CliResult<f64> {
    if value >= lo && value < hi_exclusive {
        Ok(value)
    } else {
        Err(CliError::Config(format!(
            "key \"{key}\": value {value} outside [{lo}, {hi_exclusive})"
        )))
    }
}
