//! Run configuration: one table of keys shared by config files, `key=value`
//! arguments and `--key value` flags.
//!
//! Energies are given in absolute units; `beta` sets the unit used in output.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use jch_core::ed::Boundary;
use serde::Serialize;

pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

pub const KEYS: &[KeySpec] = &[
    KeySpec { key: "command", default: "band", help: "band | phase | mf | ed | doped | verify" },
    KeySpec { key: "format", default: "csv", help: "csv | json" },
    KeySpec { key: "output", default: "-", help: "output file, - for stdout" },
    KeySpec { key: "threads", default: "0", help: "worker threads, 0 for all cores" },
    KeySpec { key: "beta", default: "1", help: "atom-cavity coupling; energy unit of the output" },
    KeySpec { key: "omega", default: "0", help: "cavity frequency" },
    KeySpec { key: "delta", default: "0", help: "detuning omega - epsilon of the uniform chain" },
    KeySpec { key: "delta0", default: "0", help: "detuning of sublattice 0 (doped)" },
    KeySpec { key: "delta1", default: "1", help: "detuning of sublattice 1 (doped)" },
    KeySpec { key: "kappa", default: "0.01", help: "photon hopping (band, doped bands)" },
    KeySpec { key: "mu_minus_omega", default: "-0.5", help: "chemical potential relative to omega (band)" },
    KeySpec { key: "k_points", default: "101", help: "momenta per band" },
    KeySpec { key: "gap_k_points", default: "65", help: "momenta sampled for band minima" },
    KeySpec { key: "fillings", default: "0,1,2,3", help: "background fillings for band" },
    KeySpec { key: "kappa_min", default: "0", help: "hopping axis start" },
    KeySpec { key: "kappa_max", default: "0.15", help: "hopping axis end" },
    KeySpec { key: "kappa_count", default: "200", help: "hopping axis points" },
    KeySpec { key: "mu_min", default: "-1.2", help: "mu - omega axis start" },
    KeySpec { key: "mu_max", default: "-0.2", help: "mu - omega axis end" },
    KeySpec { key: "mu_count", default: "200", help: "mu - omega axis points" },
    KeySpec { key: "z", default: "2", help: "mean-field coordination number" },
    KeySpec { key: "n_max", default: "25", help: "mean-field photon cutoff" },
    KeySpec { key: "cavities_min", default: "2", help: "smallest chain (ed)" },
    KeySpec { key: "cavities_max", default: "5", help: "largest chain (ed)" },
    KeySpec { key: "boundary", default: "open", help: "open | ring (ed)" },
    KeySpec { key: "target", default: "1", help: "mean excitation of the ed plateau" },
    KeySpec { key: "intersection_kappa_max", default: "0.001", help: "largest hopping in the doped intersection check" },
];

pub fn key_spec(key: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.key == key)
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    File { path: String, line: usize },
    Argument(String),
    Flag(String),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::File { path, line } => write!(f, "{path}:{line}"),
            Origin::Argument(a) => write!(f, "argument `{a}`"),
            Origin::Flag(k) => write!(f, "flag --{k}"),
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { key: String, origin: Origin },
    #[error("{origin}: expected `key = value`, got `{text}`")]
    Syntax { text: String, origin: Origin },
    #[error("{origin}: cannot read `{value}` for `{key}`: {reason}")]
    Malformed {
        key: String,
        value: String,
        origin: Origin,
        reason: String,
    },
    #[error("{origin}: `{key}` {reason}")]
    Range {
        key: String,
        origin: Origin,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Band,
    Phase,
    Mf,
    Ed,
    Doped,
    Verify,
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "band" => Command::Band,
            "phase" => Command::Phase,
            "mf" => Command::Mf,
            "ed" => Command::Ed,
            "doped" => Command::Doped,
            "verify" => Command::Verify,
            _ => return Err("expected band, phase, mf, ed, doped or verify".into()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    /// Evenly spaced points, both ends included.
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.max } else { self.min + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub threads: usize,
    pub beta: f64,
    pub omega: f64,
    pub delta: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub kappa: f64,
    pub mu_minus_omega: f64,
    pub k_points: usize,
    pub gap_k_points: usize,
    pub fillings: Vec<u32>,
    pub kappa_axis: Axis,
    pub mu_axis: Axis,
    pub z: u32,
    pub n_max: u32,
    pub cavities: (usize, usize),
    pub boundary: Boundary,
    pub target: u32,
    pub intersection_kappa_max: f64,
    /// Every key with its resolved text, in table order.
    pub resolved: Vec<(&'static str, String)>,
}

/// Raw `key -> (value, origin)` assignments, later ones overriding earlier.
#[derive(Debug, Clone, Default)]
pub struct Assignments {
    values: BTreeMap<&'static str, (String, Origin)>,
}

impl Assignments {
    pub fn set(&mut self, key: &str, value: &str, origin: Origin) -> Result<(), ConfigError> {
        let spec = key_spec(key).ok_or_else(|| ConfigError::UnknownKey {
            key: key.to_string(),
            origin: origin.clone(),
        })?;
        self.values.insert(spec.key, (value.trim().to_string(), origin));
        Ok(())
    }

    /// `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn read_file(&mut self, path: &str, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let origin = Origin::File {
                path: path.to_string(),
                line: i + 1,
            };
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                text: line.to_string(),
                origin: origin.clone(),
            })?;
            self.set(key.trim(), value, origin)?;
        }
        Ok(())
    }

    /// A `key=value` command-line argument.
    pub fn read_argument(&mut self, arg: &str) -> Result<(), ConfigError> {
        let origin = Origin::Argument(arg.to_string());
        let (key, value) = arg.split_once('=').ok_or_else(|| ConfigError::Syntax {
            text: arg.to_string(),
            origin: origin.clone(),
        })?;
        self.set(key.trim(), value, origin)
    }

    fn get(&self, key: &'static str) -> (String, Origin) {
        self.values.get(key).cloned().unwrap_or_else(|| {
            let spec = key_spec(key).expect("key is in the table");
            (spec.default.to_string(), Origin::Default)
        })
    }

    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut r = Resolver { a: self };
        let command = r.parse("command")?;
        let format = match r.text("format").0.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            _ => return Err(r.malformed("format", "expected csv or json")),
        };
        let output = match r.text("output").0.as_str() {
            "-" | "" => None,
            p => Some(PathBuf::from(p)),
        };
        let threads = r.parse("threads")?;
        let beta: f64 = r.finite("beta")?;
        r.check(beta > 0.0, "beta", "must be > 0")?;
        let omega = r.finite("omega")?;
        let delta = r.finite("delta")?;
        let delta0 = r.finite("delta0")?;
        let delta1 = r.finite("delta1")?;
        let kappa: f64 = r.finite("kappa")?;
        r.check(kappa >= 0.0, "kappa", "must be >= 0")?;
        let mu_minus_omega = r.finite("mu_minus_omega")?;
        let k_points: usize = r.parse("k_points")?;
        r.check(k_points >= 2, "k_points", "must be >= 2")?;
        let gap_k_points: usize = r.parse("gap_k_points")?;
        r.check(gap_k_points >= 2, "gap_k_points", "must be >= 2")?;
        let fillings = r.list("fillings")?;
        r.check(!fillings.is_empty(), "fillings", "must list at least one filling")?;
        let kappa_axis = r.axis("kappa")?;
        r.check(kappa_axis.min >= 0.0, "kappa_min", "must be >= 0")?;
        let mu_axis = r.axis("mu")?;
        let z: u32 = r.parse("z")?;
        r.check(z >= 1, "z", "must be >= 1")?;
        let n_max: u32 = r.parse("n_max")?;
        r.check(n_max >= 1, "n_max", "must be >= 1")?;
        let c_min: usize = r.parse("cavities_min")?;
        let c_max: usize = r.parse("cavities_max")?;
        r.check(c_min >= 2, "cavities_min", "must be >= 2")?;
        r.check(c_max >= c_min, "cavities_max", "must be >= cavities_min")?;
        r.check(c_max <= 10, "cavities_max", "must be <= 10")?;
        let boundary = match r.text("boundary").0.as_str() {
            "open" => Boundary::Open,
            "ring" => Boundary::Ring,
            _ => return Err(r.malformed("boundary", "expected open or ring")),
        };
        let target: u32 = r.parse("target")?;
        r.check((1..=3).contains(&target), "target", "must be 1, 2 or 3")?;
        let intersection_kappa_max: f64 = r.finite("intersection_kappa_max")?;
        r.check(intersection_kappa_max >= 0.0, "intersection_kappa_max", "must be >= 0")?;

        let resolved = KEYS.iter().map(|k| (k.key, self.get(k.key).0)).collect();
        Ok(RunConfig {
            command,
            format,
            output,
            threads,
            beta,
            omega,
            delta,
            delta0,
            delta1,
            kappa,
            mu_minus_omega,
            k_points,
            gap_k_points,
            fillings,
            kappa_axis,
            mu_axis,
            z,
            n_max,
            cavities: (c_min, c_max),
            boundary,
            target,
            intersection_kappa_max,
            resolved,
        })
    }
}

struct Resolver<'a> {
    a: &'a Assignments,
}

impl Resolver<'_> {
    fn text(&mut self, key: &'static str) -> (String, Origin) {
        self.a.get(key)
    }

    fn malformed(&mut self, key: &'static str, reason: &str) -> ConfigError {
        let (value, origin) = self.text(key);
        ConfigError::Malformed {
            key: key.to_string(),
            value,
            origin,
            reason: reason.to_string(),
        }
    }

    fn parse<T: FromStr>(&mut self, key: &'static str) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        let (value, origin) = self.text(key);
        value.parse().map_err(|e: T::Err| ConfigError::Malformed {
            key: key.to_string(),
            value: value.clone(),
            origin,
            reason: e.to_string(),
        })
    }

    fn finite(&mut self, key: &'static str) -> Result<f64, ConfigError> {
        let x: f64 = self.parse(key)?;
        self.check(x.is_finite(), key, "must be finite")?;
        Ok(x)
    }

    fn list(&mut self, key: &'static str) -> Result<Vec<u32>, ConfigError> {
        let (value, origin) = self.text(key);
        value
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|e: std::num::ParseIntError| ConfigError::Malformed {
                    key: key.to_string(),
                    value: value.clone(),
                    origin: origin.clone(),
                    reason: e.to_string(),
                })
            })
            .collect()
    }

    fn axis(&mut self, prefix: &'static str) -> Result<Axis, ConfigError> {
        let (k_min, k_max, k_count) = match prefix {
            "kappa" => ("kappa_min", "kappa_max", "kappa_count"),
            _ => ("mu_min", "mu_max", "mu_count"),
        };
        let min = self.finite(k_min)?;
        let max = self.finite(k_max)?;
        let count: usize = self.parse(k_count)?;
        self.check(count >= 1, k_count, "must be >= 1")?;
        if count == 1 {
            self.check(max == min, k_max, "must equal the axis start when the count is 1")?;
        } else {
            self.check(max > min, k_max, "must exceed the axis start (ranges are strictly increasing)")?;
        }
        Ok(Axis { min, max, count })
    }

    fn check(&mut self, ok: bool, key: &'static str, reason: &str) -> Result<(), ConfigError> {
        if ok {
            return Ok(());
        }
        Err(ConfigError::Range {
            key: key.to_string(),
            origin: self.text(key).1,
            reason: reason.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: &[&str]) -> Result<RunConfig, ConfigError> {
        let mut a = Assignments::default();
        for arg in args {
            a.read_argument(arg)?;
        }
        a.resolve()
    }

    #[test]
    fn defaults_resolve() {
        let c = resolve(&[]).unwrap();
        assert_eq!(c.command, Command::Band);
        assert_eq!(c.fillings, [0, 1, 2, 3]);
        assert_eq!(c.resolved.len(), KEYS.len());
        assert_eq!(c.mu_axis.points().len(), 200);
    }

    #[test]
    fn band_example() {
        let c = resolve(&["command=band", "delta=0", "kappa=0.01", "mu_minus_omega=-0.5", "k_points=101"])
            .unwrap();
        assert_eq!(c.k_points, 101);
        assert_eq!(c.kappa, 0.01);
        assert_eq!(c.mu_minus_omega, -0.5);
    }

    #[test]
    fn doped_example() {
        let c = resolve(&["delta0=0", "delta1=1", "command=doped"]).unwrap();
        assert_eq!(c.command, Command::Doped);
        assert_eq!((c.delta0, c.delta1), (0.0, 1.0));
    }

    #[test]
    fn negative_hopping_is_a_range_error() {
        let e = resolve(&["kappa=-1"]).unwrap_err();
        assert!(matches!(e, ConfigError::Range { ref key, .. } if key == "kappa"), "{e}");
        assert!(e.to_string().contains("argument `kappa=-1`"));
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let mut a = Assignments::default();
        let e = a
            .read_file("run.cfg", "# comment\ncommand = phase\nkapa = 0.1\n")
            .unwrap_err();
        assert_eq!(e.to_string(), "run.cfg:3: unknown key `kapa`");
    }

    #[test]
    fn file_comments_and_overrides() {
        let mut a = Assignments::default();
        a.read_file("f", "kappa = 0.2   # trailing\n\nz = 4\n").unwrap();
        a.set("kappa", "0.3", Origin::Flag("kappa".into())).unwrap();
        let c = a.resolve().unwrap();
        assert_eq!(c.kappa, 0.3);
        assert_eq!(c.z, 4);
    }

    #[test]
    fn malformed_number() {
        let e = resolve(&["beta=one"]).unwrap_err();
        assert!(matches!(e, ConfigError::Malformed { .. }));
    }

    #[test]
    fn ranges_must_increase() {
        assert!(resolve(&["mu_min=0", "mu_max=-1"]).is_err());
        assert!(resolve(&["kappa_count=1", "kappa_min=0.1", "kappa_max=0.1"]).is_ok());
    }

    #[test]
    fn axis_hits_both_ends() {
        let a = Axis { min: -1.2, max: 0.2, count: 8 };
        let p = a.points();
        assert_eq!(p[0], -1.2);
        assert_eq!(p[7], 0.2);
    }
}
