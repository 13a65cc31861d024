//! Run configuration. Values are resolved in precedence order: command-line
//! flags, then the config file, then the `RK_SEED` environment variable (seed
//! only), then built-in defaults. Every malformed input surfaces as a plain
//! `Err(String)` which `main` maps to exit code 2 before any work starts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rk_core::appendix::IdentityId;

/// Tolerance names that do not belong to an appendix identity.
pub const TOL_KEYS_FIXED: &[&str] = &["closed_form", "reciprocity", "bump_slope"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Appendix,
    Chain,
    ClosedForm,
    Reciprocity,
    Bump,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Appendix => "appendix",
            Suite::Chain => "chain",
            Suite::ClosedForm => "closed_form",
            Suite::Reciprocity => "reciprocity",
            Suite::Bump => "bump",
            Suite::All => "all",
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "appendix" => Ok(Suite::Appendix),
            "chain" => Ok(Suite::Chain),
            "closed_form" | "closed-form" => Ok(Suite::ClosedForm),
            "reciprocity" => Ok(Suite::Reciprocity),
            "bump" => Ok(Suite::Bump),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    JsonLines,
    Csv,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::JsonLines => "json_lines",
            Format::Csv => "csv",
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "json" | "jsonl" | "json_lines" => Ok(Format::JsonLines),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (expected json or csv)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub suite: Suite,
    pub seed: u64,
    /// None means "use the suite default" (20 for appendix, 50 for reciprocity).
    pub samples: Option<u64>,
    pub tol_overrides: BTreeMap<String, f64>,
    pub parallelism: usize,
    pub output_dir: PathBuf,
    pub format: Format,
    pub hard: bool,
    pub t_values: Vec<f64>,
}

impl RunConfig {
    pub fn samples_or(&self, default: u64) -> u64 {
        self.samples.unwrap_or(default)
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tol_overrides.get(name).copied().unwrap_or(default)
    }
}

/// Flag values as parsed by clap; `None` means the flag was absent.
#[derive(Debug, Default)]
pub struct FlagInputs {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    pub tol: Vec<String>,
    pub parallelism: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub hard: bool,
    pub config: Option<PathBuf>,
    pub t_values: Option<Vec<f64>>,
}

#[derive(Debug, Default)]
struct Partial {
    seed: Option<u64>,
    samples: Option<u64>,
    parallelism: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    hard: Option<bool>,
    t_values: Option<Vec<f64>>,
    tols: BTreeMap<String, f64>,
}

fn parse_num<T: std::str::FromStr>(key: &str, val: &str) -> Result<T, String> {
    val.parse()
        .map_err(|_| format!("config key `{key}`: cannot parse `{val}`"))
}

fn parse_t_values(val: &str) -> Result<Vec<f64>, String> {
    val.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| format!("t value `{s}` is not a number"))
        })
        .collect()
}

/// Flat `key=value` file, `#` starts a comment, no sections or nesting.
fn parse_file(path: &Path) -> Result<Partial, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut p = Partial::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
        let (key, val) = (key.trim(), val.trim());
        match key {
            // Validated so typos fail loudly, but the subcommand decides the suite.
            "suite" => {
                Suite::parse(val)?;
            }
            "seed" => p.seed = Some(parse_num(key, val)?),
            "samples" => p.samples = Some(parse_num(key, val)?),
            "parallelism" => p.parallelism = Some(parse_num(key, val)?),
            "out" | "output_dir" => p.out = Some(PathBuf::from(val)),
            "format" => p.format = Some(Format::parse(val)?),
            "hard" => p.hard = Some(parse_num(key, val)?),
            "t_values" => p.t_values = Some(parse_t_values(val)?),
            _ => match key.strip_prefix("tol.") {
                Some(name) => {
                    let v: f64 = parse_num(key, val)?;
                    p.tols.insert(name.to_string(), v);
                }
                None => return Err(format!("config line {}: unknown key `{key}`", lineno + 1)),
            },
        }
    }
    Ok(p)
}

fn env_seed() -> Result<Option<u64>, String> {
    match std::env::var("RK_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("RK_SEED must be an unsigned integer, got `{v}`")),
        Err(_) => Ok(None),
    }
}

fn valid_tol_key(key: &str) -> bool {
    TOL_KEYS_FIXED.contains(&key) || IdentityId::all().iter().any(|id| id.as_str() == key)
}

pub fn resolve(suite: Suite, flags: FlagInputs) -> Result<RunConfig, String> {
    let file = match &flags.config {
        Some(path) => parse_file(path)?,
        None => Partial::default(),
    };

    let seed = match flags.seed.or(file.seed) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };

    let samples = flags.samples.or(file.samples);
    if samples == Some(0) {
        return Err("samples must be at least 1".into());
    }

    let parallelism = flags.parallelism.or(file.parallelism).unwrap_or(1);
    if parallelism == 0 {
        return Err("parallelism must be at least 1".into());
    }

    let output_dir = flags.out.or(file.out).unwrap_or_else(|| PathBuf::from("."));
    let format = flags.format.or(file.format).unwrap_or(match suite {
        Suite::Bump => Format::Csv,
        _ => Format::JsonLines,
    });
    let hard = flags.hard || file.hard.unwrap_or(false);

    let t_values = flags
        .t_values
        .or(file.t_values)
        .unwrap_or_else(|| vec![8.0, 16.0, 32.0, 64.0]);
    if matches!(suite, Suite::Bump | Suite::All) {
        if t_values.len() < 2 {
            return Err("bump sweep needs at least two t values to fit a slope".into());
        }
        for &t in &t_values {
            if !t.is_finite() || t < 4.0 {
                return Err(format!("bump scale t = {t} is out of range (need t >= 4)"));
            }
        }
    }

    let mut tol_overrides = file.tols;
    for entry in &flags.tol {
        let (name, val) = entry
            .split_once('=')
            .ok_or_else(|| format!("--tol `{entry}`: expected name=value"))?;
        let v: f64 = val
            .trim()
            .parse()
            .map_err(|_| format!("--tol `{entry}`: cannot parse value"))?;
        tol_overrides.insert(name.trim().to_string(), v);
    }
    for (name, &v) in &tol_overrides {
        if !valid_tol_key(name) {
            return Err(format!("unknown tolerance name `{name}`"));
        }
        if !(v > 0.0) {
            return Err(format!("tolerance `{name}` must be positive, got {v}"));
        }
    }

    Ok(RunConfig {
        suite,
        seed,
        samples,
        tol_overrides,
        parallelism,
        output_dir,
        format,
        hard,
        t_values,
    })
}
