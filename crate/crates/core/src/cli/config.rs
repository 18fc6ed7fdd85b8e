//! Run configuration: a flat `key = value` file overridden by flags.
//!
//! Recognised keys:
//!
//! | key | unit |
//! |---|---|
//! | `f0_ghz` | GHz |
//! | `sweep_from_ghz`, `sweep_to_ghz` | GHz |
//! | `sweep_points` | count |
//! | `temperature_mk` | mK |
//! | `material` | preset name (`ne`) |
//! | `epsilon` | relative permittivity |
//! | `rho_g_cm3` | g/cm^3 |
//! | `c_long_m_s` | m/s |
//! | `pressing_field_v_m` | V/m |
//! | `cavity` | same syntax as `--cavity` |
//! | `kernel` | `approx` or `exact` |
//! | `tol` | relative tolerance |
//! | `format` | `table`, `csv` or `json` |
//! | `output` | path |
//!
//! `#` starts a comment. Unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use thiserror::Error;

use crate::displacement::KernelMode;
use crate::numerics::NestedSpec;
use crate::report::{CavitySpec, Tuning};
use crate::units::{angular_from_mhz, statvolt_per_cm_to_volt_per_m, Material};

pub const KEYS: [&str; 15] = [
    "f0_ghz",
    "sweep_from_ghz",
    "sweep_to_ghz",
    "sweep_points",
    "temperature_mk",
    "material",
    "epsilon",
    "rho_g_cm3",
    "c_long_m_s",
    "pressing_field_v_m",
    "cavity",
    "kernel",
    "tol",
    "format",
    "output",
];

pub const DEFAULT_TEMPERATURE: f64 = 0.010;
pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kernel {
    Approx,
    Exact,
}

impl From<Kernel> for KernelMode {
    fn from(k: Kernel) -> Self {
        match k {
            Kernel::Approx => KernelMode::LogApprox,
            Kernel::Exact => KernelMode::ExactKernel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{path}:{line}:{column}: {message}")]
    File {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

/// One `key = value` entry with the position of its value.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub path: String,
    pub entries: BTreeMap<String, Entry>,
}

impl ConfigFile {
    pub fn parse(path: &str, text: &str) -> Result<Self, ConfigError> {
        let err = |line: usize, column: usize, message: String| ConfigError::File {
            path: path.to_string(),
            line,
            column,
            message,
        };
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                let col = content.len() - content.trim_start().len() + 1;
                return Err(err(line, col, "expected `key = value`".into()));
            };
            let key_part = &content[..eq];
            let key = key_part.trim();
            let key_col = key_part.len() - key_part.trim_start().len() + 1;
            if key.is_empty() {
                return Err(err(line, key_col, "missing key before `=`".into()));
            }
            if !KEYS.contains(&key) {
                return Err(err(line, key_col, format!("unknown key `{key}`")));
            }
            let value_part = &content[eq + 1..];
            let value = value_part.trim();
            let value_col = eq + 2 + (value_part.len() - value_part.trim_start().len());
            if value.is_empty() {
                return Err(err(line, value_col, format!("missing value for `{key}`")));
            }
            if let Some(prev) = entries.get(key) {
                let prev: &Entry = prev;
                return Err(err(line, key_col, format!("`{key}` already set on line {}", prev.line)));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                    column: value_col,
                },
            );
        }
        Ok(ConfigFile {
            path: path.to_string(),
            entries,
        })
    }

    fn error_at(&self, key: &str, message: impl fmt::Display) -> ConfigError {
        let e = &self.entries[key];
        ConfigError::File {
            path: self.path.clone(),
            line: e.line,
            column: e.column,
            message: format!("{key}: {message}"),
        }
    }

    fn get<T, F>(&self, key: &str, parse: F) -> Result<Option<T>, ConfigError>
    where
        F: Fn(&str) -> Result<T, String>,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).map_err(|m| self.error_at(key, m)),
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.parse::<usize>()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn parse_enum<T: ValueEnum>(s: &str) -> Result<T, String> {
    T::from_str(s, true).map_err(|_| {
        let names: Vec<String> = T::value_variants()
            .iter()
            .filter_map(|v| v.to_possible_value().map(|p| p.get_name().to_string()))
            .collect();
        format!("`{s}` is not one of {}", names.join(", "))
    })
}

/// Frequency with an optional `Hz`/`kHz`/`MHz`/`GHz` suffix, returned in Hz.
fn parse_frequency(s: &str, default_scale: f64) -> Result<f64, String> {
    let lower = s.trim().to_ascii_lowercase();
    let (num, scale) = [("ghz", 1e9), ("mhz", 1e6), ("khz", 1e3), ("hz", 1.0)]
        .iter()
        .find_map(|(suffix, scale)| lower.strip_suffix(suffix).map(|n| (n.trim().to_string(), *scale)))
        .unwrap_or((lower.clone(), default_scale));
    let v = num.parse::<f64>().map_err(|_| format!("`{s}` is not a frequency"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v * scale)
}

/// `g=5MHz,kappa=0.5MHz,detuning=500MHz` or `g=..,kappa=..,fr=5.9GHz`.
/// Values are ordinary frequencies; bare numbers are MHz (GHz for `fr`).
pub fn parse_cavity(s: &str) -> Result<CavitySpec, String> {
    let mut g = None;
    let mut kappa = None;
    let mut tuning = None;
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in `{part}`"))?;
        let k = k.trim().to_ascii_lowercase();
        let slot = match k.as_str() {
            "g" => &mut g,
            "kappa" => &mut kappa,
            "detuning" | "delta" => {
                if tuning.is_some() {
                    return Err("give either detuning or fr, once".into());
                }
                let hz = parse_frequency(v, 1e6)?;
                tuning = Some(Tuning::Detuning(angular_from_mhz(hz / 1e6)));
                continue;
            }
            "fr" | "f_r" => {
                if tuning.is_some() {
                    return Err("give either detuning or fr, once".into());
                }
                tuning = Some(Tuning::Resonator(parse_frequency(v, 1e9)? / 1e9));
                continue;
            }
            other => return Err(format!("unknown cavity parameter `{other}`")),
        };
        if slot.is_some() {
            return Err(format!("`{k}` given twice"));
        }
        *slot = Some(angular_from_mhz(parse_frequency(v, 1e6)? / 1e6));
    }
    Ok(CavitySpec {
        g: g.ok_or("cavity needs g")?,
        kappa: kappa.ok_or("cavity needs kappa")?,
        tuning: tuning.ok_or("cavity needs detuning or fr")?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepRange {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.from.is_finite() && self.to.is_finite() && self.from > 0.0) {
            return bad(format!("sweep range [{}, {}] must be positive", self.from, self.to));
        }
        if self.points == 0 {
            return bad("sweep needs at least one point".into());
        }
        if self.from > self.to {
            return bad(format!("reversed sweep range: from {} > to {}", self.from, self.to));
        }
        if self.from == self.to && self.points > 1 {
            return bad("empty sweep range with more than one point".into());
        }
        Ok(())
    }

    /// Evenly spaced, endpoints included.
    pub fn frequencies(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / n
                }
            })
            .collect()
    }
}

/// Flag values; `None` leaves the file value (or default) in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub f0_ghz: Option<f64>,
    pub sweep_from: Option<f64>,
    pub sweep_to: Option<f64>,
    pub sweep_points: Option<usize>,
    pub temperature_mk: Option<f64>,
    pub material: Option<String>,
    pub cavity: Option<String>,
    pub kernel: Option<Kernel>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub f0_ghz: Option<f64>,
    pub sweep: Option<SweepRange>,
    /// K
    pub temperature: f64,
    pub material: Material,
    /// statV/cm
    pub pressing_field: f64,
    pub cavity: Option<CavitySpec>,
    pub kernel: KernelMode,
    pub tol: f64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(file: &ConfigFile, flags: &Overrides) -> Result<Self, ConfigError> {
        let invalid = |m: String| ConfigError::Invalid(m);

        let f0_ghz = flags.f0_ghz.or(file.get("f0_ghz", parse_f64)?);
        let from = flags.sweep_from.or(file.get("sweep_from_ghz", parse_f64)?);
        let to = flags.sweep_to.or(file.get("sweep_to_ghz", parse_f64)?);
        let points = flags.sweep_points.or(file.get("sweep_points", parse_usize)?);
        let sweep = match (from, to, points) {
            (None, None, None) => None,
            (Some(from), Some(to), Some(points)) => Some(SweepRange { from, to, points }),
            _ => return Err(invalid("a sweep needs from, to and points together".into())),
        };
        if f0_ghz.is_some() && sweep.is_some() {
            return Err(invalid("f0 and a sweep range are mutually exclusive".into()));
        }
        if let Some(f) = f0_ghz {
            if !(f.is_finite() && f > 0.0) {
                return Err(invalid(format!("f0 must be positive, got {f} GHz")));
            }
        }
        if let Some(s) = &sweep {
            s.validate()?;
        }

        let temperature_mk = flags
            .temperature_mk
            .or(file.get("temperature_mk", parse_f64)?)
            .unwrap_or(DEFAULT_TEMPERATURE * 1e3);
        if !(temperature_mk.is_finite() && temperature_mk >= 0.0) {
            return Err(invalid(format!(
                "temperature must be non-negative, got {temperature_mk} mK"
            )));
        }

        let material_name = match &flags.material {
            Some(m) => Some(m.clone()),
            None => file.get("material", |s| Ok(s.to_string()))?,
        };
        let mut material = match material_name {
            None => Material::neon(),
            Some(name) => Material::preset(&name).filter(|m| m.epsilon.is_some()).ok_or_else(|| {
                match file.entries.get("material") {
                    Some(_) if flags.material.is_none() => {
                        file.error_at("material", format!("`{name}` is not a host material preset"))
                    }
                    _ => invalid(format!("`{name}` is not a host material preset")),
                }
            })?,
        };
        if let Some(eps) = file.get("epsilon", parse_f64)? {
            material.epsilon = Some(eps);
        }
        if let Some(rho) = file.get("rho_g_cm3", parse_f64)? {
            material.rho = Some(rho);
        }
        if let Some(c) = file.get("c_long_m_s", parse_f64)? {
            material.c_long = c * 100.0;
        }
        material.validate().map_err(|e| invalid(e.to_string()))?;

        let pressing_field = file
            .get("pressing_field_v_m", parse_f64)?
            .map(|v| v / statvolt_per_cm_to_volt_per_m(1.0))
            .unwrap_or(0.0);
        if !pressing_field.is_finite() {
            return Err(invalid("pressing field must be finite".into()));
        }

        let cavity = match &flags.cavity {
            Some(s) => Some(parse_cavity(s).map_err(|m| invalid(format!("--cavity: {m}")))?),
            None => file.get("cavity", parse_cavity)?,
        };
        if let Some(c) = &cavity {
            if !(c.g > 0.0 && c.kappa >= 0.0) {
                return Err(invalid("cavity needs g > 0 and kappa >= 0".into()));
            }
        }

        let kernel = flags
            .kernel
            .or(file.get("kernel", parse_enum::<Kernel>)?)
            .unwrap_or(Kernel::Approx)
            .into();
        let tol = flags.tol.or(file.get("tol", parse_f64)?).unwrap_or(DEFAULT_TOL);
        NestedSpec::from_rel_tol(tol).map_err(|e| invalid(format!("tol: {e}")))?;
        let format = flags
            .format
            .or(file.get("format", parse_enum::<Format>)?)
            .unwrap_or(Format::Table);
        let output = match &flags.output {
            Some(p) => Some(p.clone()),
            None => file.get("output", |s| Ok(PathBuf::from(s)))?,
        };

        Ok(RunConfig {
            f0_ghz,
            sweep,
            temperature: temperature_mk * 1e-3,
            material,
            pressing_field,
            cavity,
            kernel,
            tol,
            format,
            output,
        })
    }

    pub fn spec(&self) -> NestedSpec {
        NestedSpec::from_rel_tol(self.tol).expect("validated in resolve")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_entries_with_positions() {
        let f = ConfigFile::parse("c", "# header\nf0_ghz = 6.4\n  kernel=exact # trailing\n").unwrap();
        assert_eq!(f.entries["f0_ghz"].value, "6.4");
        assert_eq!((f.entries["f0_ghz"].line, f.entries["f0_ghz"].column), (2, 10));
        assert_eq!((f.entries["kernel"].line, f.entries["kernel"].column), (3, 10));
    }

    #[test]
    fn reports_line_and_column() {
        let e = ConfigFile::parse("run.cfg", "f0_ghz = 6.4\n  colour = red\n").unwrap_err();
        assert_eq!(e.to_string(), "run.cfg:2:3: unknown key `colour`");
        let e = ConfigFile::parse("run.cfg", "f0_ghz\n").unwrap_err();
        assert!(e.to_string().starts_with("run.cfg:1:1:"));
        let e = ConfigFile::parse("run.cfg", "tol = 1e-7\ntol = 1e-6\n").unwrap_err();
        assert!(e.to_string().contains("already set on line 1"));
        let f = ConfigFile::parse("run.cfg", "f0_ghz =   six\n").unwrap();
        let e = RunConfig::resolve(&f, &Overrides::default()).unwrap_err();
        assert_eq!(e.to_string(), "run.cfg:1:12: f0_ghz: `six` is not a number");
    }

    #[test]
    fn flags_override_file() {
        let f = ConfigFile::parse("c", "f0_ghz = 5\nformat = csv\ntemperature_mk = 20\n").unwrap();
        let flags = Overrides {
            f0_ghz: Some(6.4),
            ..Overrides::default()
        };
        let c = RunConfig::resolve(&f, &flags).unwrap();
        assert_eq!(c.f0_ghz, Some(6.4));
        assert_eq!(c.format, Format::Csv);
        assert!((c.temperature - 0.020).abs() < 1e-15);
    }

    #[test]
    fn f0_and_sweep_exclusive() {
        let f = ConfigFile::parse(
            "c",
            "f0_ghz = 5\nsweep_from_ghz = 1\nsweep_to_ghz = 2\nsweep_points = 2\n",
        )
        .unwrap();
        assert!(RunConfig::resolve(&f, &Overrides::default()).is_err());
    }

    #[test]
    fn cavity_syntax() {
        let c = parse_cavity("g=5MHz,kappa=0.5MHz,detuning=500MHz").unwrap();
        assert!((c.g - angular_from_mhz(5.0)).abs() < 1e-6);
        assert_eq!(c.tuning, Tuning::Detuning(angular_from_mhz(500.0)));
        let c = parse_cavity("g=5,kappa=500kHz,fr=5.9GHz").unwrap();
        assert!((c.kappa / angular_from_mhz(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(c.tuning, Tuning::Resonator(5.9));
        assert!(parse_cavity("g=5MHz,kappa=0.5MHz").is_err());
        assert!(parse_cavity("g=5MHz,kappa=0.5MHz,fr=5.9,detuning=1").is_err());
        assert!(parse_cavity("g=5MHz,q=2").is_err());
    }

    #[test]
    fn sweep_grid() {
        let s = SweepRange {
            from: 1.0,
            to: 10.0,
            points: 10,
        };
        assert_eq!(s.frequencies(), (1..=10).map(f64::from).collect::<Vec<_>>());
        let one = SweepRange {
            from: 6.4,
            to: 6.4,
            points: 1,
        };
        assert_eq!(one.frequencies(), vec![6.4]);
        assert!(SweepRange {
            from: 10.0,
            to: 1.0,
            points: 10
        }
        .validate()
        .is_err());
        assert!(SweepRange {
            from: 1.0,
            to: 2.0,
            points: 0
        }
        .validate()
        .is_err());
    }
}
