//! Run configuration: a flat key=value map layered from a config file, the
//! environment and command-line flags, then parsed into typed parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use lattice_resonance::lattice::{Geometry, LatticeConfig, STABILITY_LIMIT};
use lattice_resonance::transforms::LoadSpec;
use num_complex::Complex64;
use thiserror::Error;

/// Prefix for environment overrides: `LATRES_T_MAX=200` sets `t-max`.
pub const ENV_PREFIX: &str = "LATRES_";

/// Every key accepted in a config file, the environment or on the command
/// line.
pub const KEYS: &[&str] = &[
    "s", "s-grid", "eps", "q0", "p", "qx", "n", "sites", "t-max", "dt", "extent", "probes",
    "stride", "geometry", "rel-tol", "abs-tol",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("malformed line {line} in config file: `{text}`")]
    MalformedLine { line: usize, text: String },
    #[error("invalid value for `{key}`: `{value}` ({reason})")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },
}

fn invalid(key: &str, value: &str, reason: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        value: value.into(),
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    BasicIntegral,
    Pieces,
    TransformCheck,
    Simulate,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::BasicIntegral => "basic-integral",
            Command::Pieces => "pieces",
            Command::TransformCheck => "transform-check",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
        }
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "basic-integral" => Command::BasicIntegral,
            "pieces" => Command::Pieces,
            "transform-check" => Command::TransformCheck,
            "simulate" => Command::Simulate,
            "verify" => Command::Verify,
            other => return Err(ConfigError::UnknownCommand(other.into())),
        })
    }
}

/// Layered raw key/value settings, later layers winning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.into()));
        }
        self.0.insert(key.into(), value.trim().into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// `key = value` lines; blank lines and `#` comments are skipped.
    pub fn merge_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::MalformedLine {
                    line: i + 1,
                    text: raw.into(),
                })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    /// Applies `LATRES_*` variables from `vars`.
    pub fn merge_env<I>(&mut self, vars: I) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        for (name, value) in vars {
            if let Some(rest) = name.strip_prefix(ENV_PREFIX) {
                let key = rest.to_ascii_lowercase().replace('_', "-");
                self.set(&key, &value)
                    .map_err(|_| ConfigError::UnknownKey(name.clone()))?;
            }
        }
        Ok(())
    }

    /// Serializes back into config-file text.
    pub fn to_file_text(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.0
    }
}

/// Fully parsed and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub s: Option<f64>,
    pub s_grid: Vec<f64>,
    pub eps: f64,
    pub q0: f64,
    pub p: Complex64,
    pub qx: f64,
    pub n: i64,
    pub sites: Vec<(i64, i64)>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub lattice: LatticeConfig,
    /// Settings that produced this configuration, with defaults filled in.
    pub settings: Settings,
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| invalid(key, value, e))
}

fn parse_positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_num(key, value)?;
    if !(x > 0.0 && x.is_finite()) {
        return Err(invalid(key, value, "must be positive and finite"));
    }
    Ok(x)
}

fn parse_list<T, F>(key: &str, value: &str, sep: char, item: F) -> Result<Vec<T>, ConfigError>
where
    F: Fn(&str) -> Result<T, ConfigError>,
{
    let out: Vec<T> = value
        .split(sep)
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(item)
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(invalid(key, value, "empty list"));
    }
    Ok(out)
}

/// `"0,0;1,0"` into site pairs.
fn parse_sites(key: &str, value: &str) -> Result<Vec<(i64, i64)>, ConfigError> {
    parse_list(key, value, ';', |pair| {
        let (m, n) = pair
            .split_once(',')
            .ok_or_else(|| invalid(key, value, "expected m,n pairs separated by ';'"))?;
        Ok((parse_num(key, m)?, parse_num(key, n)?))
    })
}

fn parse_complex(key: &str, value: &str) -> Result<Complex64, ConfigError> {
    value
        .replace(' ', "")
        .parse::<Complex64>()
        .map_err(|_| invalid(key, value, "expected a complex number such as 1+0.5i"))
}

const DEFAULTS: &[(&str, &str)] = &[
    ("s-grid", "1e-2,1e-3,1e-4,1e-5"),
    ("eps", "0.1"),
    ("q0", "1"),
    ("p", "1+0.5i"),
    ("qx", "0.7"),
    ("n", "2"),
    ("sites", "0,0;1,1;2,0;1,0"),
    ("t-max", "100"),
    ("dt", "0.05"),
    ("probes", "0,0;1,0;1,1;2,0;2,1"),
    ("stride", "1"),
    ("geometry", "octant"),
    ("rel-tol", "1e-9"),
    ("abs-tol", "1e-12"),
];

impl RunConfig {
    /// Fills defaults and validates every parameter before anything runs.
    pub fn from_settings(command: Command, mut settings: Settings) -> Result<Self, ConfigError> {
        for (k, v) in DEFAULTS {
            if settings.get(k).is_none() {
                settings.set(k, v)?;
            }
        }
        let t_max = parse_positive("t-max", settings.get("t-max").expect("defaulted"))?;
        if settings.get("extent").is_none() {
            settings.set("extent", &LatticeConfig::min_half_extent(t_max).to_string())?;
        }
        let get = |k: &str| settings.get(k).expect("defaulted");

        let s = settings
            .get("s")
            .map(|v| parse_positive("s", v))
            .transpose()?;
        let s_grid = parse_list("s-grid", get("s-grid"), ',', |x| {
            parse_positive("s-grid", x)
        })?;
        let eps = parse_positive("eps", get("eps"))?;
        if eps >= std::f64::consts::FRAC_PI_2 {
            return Err(invalid("eps", get("eps"), "must lie in (0, pi/2)"));
        }
        let q0: f64 = parse_num("q0", get("q0"))?;
        if !(q0.is_finite() && q0 != 0.0) {
            return Err(invalid("q0", get("q0"), "must be finite and nonzero"));
        }
        let p = parse_complex("p", get("p"))?;
        if p.re <= 0.0 {
            return Err(invalid("p", get("p"), "Re p must be positive"));
        }
        let qx: f64 = parse_num("qx", get("qx"))?;
        let n: i64 = parse_num("n", get("n"))?;
        let sites = parse_sites("sites", get("sites"))?;
        let rel_tol = parse_positive("rel-tol", get("rel-tol"))?;
        let abs_tol = parse_positive("abs-tol", get("abs-tol"))?;

        let dt = parse_positive("dt", get("dt"))?;
        if dt >= STABILITY_LIMIT {
            return Err(invalid(
                "dt",
                get("dt"),
                "stability requires dt < 1/sqrt(2)",
            ));
        }
        let extent = parse_num("extent", get("extent"))?;
        let stride: usize = parse_num("stride", get("stride"))?;
        let geometry = match get("geometry") {
            "octant" => Geometry::Octant,
            "full" => Geometry::Full,
            other => return Err(invalid("geometry", other, "expected octant or full")),
        };
        let lattice = LatticeConfig {
            half_extent: extent,
            dt,
            t_max,
            load: LoadSpec::resonant(q0),
            probes: parse_sites("probes", get("probes"))?,
            sample_stride: stride,
            geometry,
        };
        if command == Command::Simulate {
            lattice.validate().map_err(|e| {
                let key = match e {
                    lattice_resonance::lattice::LatticeError::TooSmall { .. } => "extent",
                    lattice_resonance::lattice::LatticeError::ProbeOutOfRange { .. } => "probes",
                    lattice_resonance::lattice::LatticeError::BadStride => "stride",
                    _ => "t-max",
                };
                invalid(key, get(key), e)
            })?;
        }

        Ok(Self {
            command,
            s,
            s_grid,
            eps,
            q0,
            p,
            qx,
            n,
            sites,
            rel_tol,
            abs_tol,
            lattice,
            settings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(command: Command, pairs: &[(&str, &str)]) -> Result<RunConfig, ConfigError> {
        let mut s = Settings::default();
        for (k, v) in pairs {
            s.set(k, v)?;
        }
        RunConfig::from_settings(command, s)
    }

    #[test]
    fn s_grid_parses() {
        let cfg = parse(
            Command::Verify,
            &[("s-grid", "1e-2,1e-3,1e-4"), ("eps", "0.1")],
        )
        .unwrap();
        assert_eq!(cfg.s_grid, vec![1e-2, 1e-3, 1e-4]);
        assert_eq!(cfg.eps, 0.1);
    }

    #[test]
    fn extent_follows_duration() {
        let cfg = parse(
            Command::Simulate,
            &[
                ("t-max", "400"),
                ("dt", "0.05"),
                ("probes", "0,0;1,0;1,1;2,0"),
            ],
        )
        .unwrap();
        assert_eq!(cfg.lattice.probes.len(), 4);
        assert_eq!(cfg.lattice.half_extent, 610);
        assert_eq!(cfg.settings.get("extent"), Some("610"));
    }

    #[test]
    fn unstable_dt_names_the_key() {
        let err = parse(Command::Simulate, &[("dt", "0.8")]).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { key, .. } if key == "dt"));
        assert!(err.to_string().contains("1/sqrt(2)"));
    }

    #[test]
    fn small_extent_is_rejected() {
        let err = parse(Command::Simulate, &[("t-max", "100"), ("extent", "50")]).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { key, .. } if key == "extent"));
    }

    #[test]
    fn unknown_key_and_command() {
        let mut s = Settings::default();
        assert_eq!(
            s.set("bogus", "1"),
            Err(ConfigError::UnknownKey("bogus".into()))
        );
        assert!(s.merge_file_text("eps = 0.2\nfoo = 1\n").is_err());
        assert!("integrate".parse::<Command>().is_err());
    }

    #[test]
    fn complex_and_sites() {
        let cfg = parse(
            Command::TransformCheck,
            &[("p", "1+0.5i"), ("sites", "0,0; 2,-1")],
        )
        .unwrap();
        assert_eq!(cfg.p, Complex64::new(1.0, 0.5));
        assert_eq!(cfg.sites, vec![(0, 0), (2, -1)]);
        assert!(parse(Command::TransformCheck, &[("p", "-1+i")]).is_err());
        assert!(parse(Command::TransformCheck, &[("sites", "0;1")]).is_err());
    }

    #[test]
    fn layering_order() {
        let mut s = Settings::default();
        s.merge_file_text("# comment\neps = 0.05\nq0 = 3\n")
            .unwrap();
        s.merge_env([
            ("LATRES_EPS".to_string(), "0.2".to_string()),
            ("HOME".into(), "/".into()),
        ])
        .unwrap();
        assert_eq!(s.get("eps"), Some("0.2"));
        assert_eq!(s.get("q0"), Some("3"));
        assert!(s
            .merge_env([("LATRES_NOPE".to_string(), "1".to_string())])
            .is_err());
    }

    #[test]
    fn file_text_round_trips() {
        let cfg = parse(Command::Simulate, &[("t-max", "20"), ("probes", "0,0;1,0")]).unwrap();
        let mut again = Settings::default();
        again.merge_file_text(&cfg.settings.to_file_text()).unwrap();
        assert_eq!(
            RunConfig::from_settings(Command::Simulate, again).unwrap(),
            cfg
        );
    }
}
