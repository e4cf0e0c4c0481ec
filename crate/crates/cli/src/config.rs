//! INI-style experiment configuration: four sections (`[grid]`,
//! `[physics]`, `[solver]`, `[experiment]`) of `key = value` pairs.
//!
//! Parsing is strict — unknown sections or keys, duplicate keys, and
//! malformed values are rejected with the offending line — while the
//! schema is total: every experiment kind has a complete default, so an
//! empty file (or no file at all) runs.

use std::collections::BTreeMap;
use std::fmt;

/// Experiment selector, given as the positional CLI argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    LpCheck,
    BesovNorm,
    BonyCheck,
    ProbeEstimates,
    GreenDecay,
    HeatDecay,
    OscillationScaling,
    LinearConvection,
    Solve,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::LpCheck,
        Kind::BesovNorm,
        Kind::BonyCheck,
        Kind::ProbeEstimates,
        Kind::GreenDecay,
        Kind::HeatDecay,
        Kind::OscillationScaling,
        Kind::LinearConvection,
        Kind::Solve,
    ];

    pub fn parse(name: &str) -> Option<Kind> {
        Kind::ALL.iter().copied().find(|k| k.name() == name)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kind::LpCheck => "lp-check",
            Kind::BesovNorm => "besov-norm",
            Kind::BonyCheck => "bony-check",
            Kind::ProbeEstimates => "probe-estimates",
            Kind::GreenDecay => "green-decay",
            Kind::HeatDecay => "heat-decay",
            Kind::OscillationScaling => "oscillation-scaling",
            Kind::LinearConvection => "linear-convection",
            Kind::Solve => "solve",
        }
    }
}

/// Configuration or usage error; rendered to stderr and mapped to exit
/// code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type CResult<T> = Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> CResult<T> {
    Err(ConfigError(msg.into()))
}

/// Where a raw value came from, for error messages.
#[derive(Debug, Clone)]
enum Source {
    Line(usize),
    Set,
}

impl Source {
    fn describe(&self, section: &str, key: &str) -> String {
        match self {
            Source::Line(n) => format!("line {n}"),
            Source::Set => format!("--set {section}.{key}"),
        }
    }
}

const SECTIONS: [&str; 4] = ["grid", "physics", "solver", "experiment"];

fn known_keys(section: &str) -> &'static [&'static str] {
    match section {
        "grid" => &["dim", "N", "length"],
        "physics" => &["rho_bar", "mu", "lambda", "gamma"],
        "solver" => &["dt", "t_end", "dealias", "monitor_p", "monitor_r0", "monitor_stride"],
        "experiment" => &[
            "seed",
            "pairs",
            "p",
            "s",
            "sigma",
            "r0",
            "rings",
            "eps",
            "epsilon",
            "eta",
            "oscillation",
            "probe",
            "control",
        ],
        _ => &[],
    }
}

/// Raw `section.key -> value` table with provenance, before typing.
#[derive(Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<(String, String), (String, Source)>,
}

impl RawConfig {
    /// Parse INI text. Rejects unknown sections/keys and duplicate keys,
    /// naming the line.
    pub fn parse(text: &str) -> CResult<RawConfig> {
        let mut cfg = RawConfig::default();
        let mut section: Option<String> = None;
        for (i, raw_line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = match raw_line.find(['#', ';']) {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return err(format!("malformed section header (line {lineno}): `{line}`"));
                };
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return err(format!(
                        "unknown section `[{name}]` (line {lineno}); expected one of [grid], \
                         [physics], [solver], [experiment]"
                    ));
                }
                section = Some(name.to_string());
                continue;
            }
            let Some(section) = section.as_deref() else {
                return err(format!(
                    "key outside any section (line {lineno}): `{line}`; start with a \
                     [section] header"
                ));
            };
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("expected `key = value` (line {lineno}): `{line}`"));
            };
            let key = key.trim();
            let value = value.trim();
            cfg.insert(section, key, value, Source::Line(lineno))?;
        }
        Ok(cfg)
    }

    /// Apply one `--set section.key=value` override. Overrides replace
    /// file values (they are not duplicates).
    pub fn apply_set(&mut self, spec: &str) -> CResult<()> {
        let Some((path, value)) = spec.split_once('=') else {
            return err(format!("--set expects section.key=value, got `{spec}`"));
        };
        let Some((section, key)) = path.trim().split_once('.') else {
            return err(format!("--set expects section.key=value, got `{spec}`"));
        };
        let (section, key) = (section.trim(), key.trim());
        if !SECTIONS.contains(&section) {
            return err(format!("--set: unknown section `{section}` in `{spec}`"));
        }
        self.entries.remove(&(section.to_string(), key.to_string()));
        self.insert(section, key, value.trim(), Source::Set)
    }

    fn insert(&mut self, section: &str, key: &str, value: &str, source: Source) -> CResult<()> {
        if !known_keys(section).contains(&key) {
            return err(format!(
                "unknown key `{key}` in [{section}] ({}); known keys: {}",
                source.describe(section, key),
                known_keys(section).join(", ")
            ));
        }
        let map_key = (section.to_string(), key.to_string());
        if self.entries.contains_key(&map_key) {
            return err(format!(
                "duplicate key `{key}` in [{section}] ({})",
                source.describe(section, key)
            ));
        }
        self.entries.insert(map_key, (value.to_string(), source));
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&(String, Source)> {
        self.entries.get(&(section.to_string(), key.to_string()))
    }

    /// Resolve the raw table into a fully typed configuration for `kind`,
    /// filling kind-appropriate defaults for everything absent.
    pub fn resolve(&self, kind: Kind) -> CResult<Resolved> {
        let dim_default = match kind {
            Kind::GreenDecay | Kind::HeatDecay => 1,
            _ => 2,
        };
        let points_default = match kind {
            Kind::GreenDecay | Kind::OscillationScaling => 256,
            _ => 64,
        };
        let dt_default = match kind {
            Kind::LinearConvection => 0.02,
            _ => 0.05,
        };
        let t_end_default = match kind {
            Kind::Solve => 10.0,
            _ => 1.0,
        };
        let p_default = match kind {
            Kind::LinearConvection => 3.0,
            _ => 4.0,
        };
        let rings_default: Vec<i32> = match kind {
            Kind::GreenDecay => vec![4, 5, 6],
            _ => vec![1, 2, 3],
        };

        let dim = self.usize_in("grid", "dim", dim_default, 1, 3)?;
        let points = self.points("grid", "N", points_default)?;
        let length = self.positive("grid", "length", 2.0 * std::f64::consts::PI)?;

        let rho_bar = self.positive("physics", "rho_bar", 1.0)?;
        let mu = self.positive("physics", "mu", 0.5)?;
        let lambda = self.f64_key("physics", "lambda", 0.0)?;
        let gamma = self.positive("physics", "gamma", 1.4)?;

        let dt = self.positive("solver", "dt", dt_default)?;
        let t_end = self.positive("solver", "t_end", t_end_default)?;
        let dealias = self.bool_key("solver", "dealias", true)?;
        let monitor_p = self.positive("solver", "monitor_p", 3.0)?;
        let monitor_r0 = self.positive("solver", "monitor_r0", 2.0)?;
        let monitor_stride = self.usize_in("solver", "monitor_stride", 1, 1, usize::MAX)?;

        let seed = self.u64_key("experiment", "seed", 42)?;
        let pairs = self.usize_in("experiment", "pairs", 100, 1, 1_000_000)?;
        let p = self.positive("experiment", "p", p_default)?;
        let s = self.f64_key("experiment", "s", 1.0)?;
        let sigma = self.f64_key("experiment", "sigma", 0.5)?;
        let r0 = match self.get("experiment", "r0") {
            Some(_) => Some(self.positive("experiment", "r0", 0.0)?),
            None => None,
        };
        let rings = self.i32_list("experiment", "rings", rings_default)?;
        let eps = self.f64_list("experiment", "eps", vec![0.25, 0.125, 0.0625, 0.03125])?;
        let epsilon = self.positive("experiment", "epsilon", 0.25)?;
        let eta = self.positive("experiment", "eta", 1e-3)?;
        let oscillation = self.string("experiment", "oscillation", "planar_shear");
        let probe = self.string("experiment", "probe", "all");
        let control = self.bool_key("experiment", "control", true)?;

        Ok(Resolved {
            kind,
            dim,
            points,
            length,
            rho_bar,
            mu,
            lambda,
            gamma,
            dt,
            t_end,
            dealias,
            monitor_p,
            monitor_r0,
            monitor_stride,
            seed,
            pairs,
            p,
            s,
            sigma,
            r0,
            rings,
            eps,
            epsilon,
            eta,
            oscillation,
            probe,
            control,
        })
    }

    // -- typed getters ----------------------------------------------------

    fn string(&self, section: &str, key: &str, default: &str) -> String {
        match self.get(section, key) {
            Some((v, _)) => v.clone(),
            None => default.to_string(),
        }
    }

    fn f64_key(&self, section: &str, key: &str, default: f64) -> CResult<f64> {
        match self.get(section, key) {
            None => Ok(default),
            Some((v, src)) => v.parse::<f64>().map_err(|_| {
                ConfigError(format!(
                    "invalid value for `{key}` in [{section}] ({}): `{v}` is not a number",
                    src.describe(section, key)
                ))
            }),
        }
    }

    fn positive(&self, section: &str, key: &str, default: f64) -> CResult<f64> {
        let v = self.f64_key(section, key, default)?;
        if !(v > 0.0) || !v.is_finite() {
            let whence = match self.get(section, key) {
                Some((_, src)) => src.describe(section, key),
                None => "default".to_string(),
            };
            return err(format!(
                "`{key}` in [{section}] must be positive and finite ({whence}), got {v}"
            ));
        }
        Ok(v)
    }

    fn u64_key(&self, section: &str, key: &str, default: u64) -> CResult<u64> {
        match self.get(section, key) {
            None => Ok(default),
            Some((v, src)) => v.parse::<u64>().map_err(|_| {
                ConfigError(format!(
                    "invalid value for `{key}` in [{section}] ({}): `{v}` is not a \
                     nonnegative integer",
                    src.describe(section, key)
                ))
            }),
        }
    }

    fn usize_in(&self, section: &str, key: &str, default: usize, lo: usize, hi: usize) -> CResult<usize> {
        let v = match self.get(section, key) {
            None => default,
            Some((v, src)) => v.parse::<usize>().map_err(|_| {
                ConfigError(format!(
                    "invalid value for `{key}` in [{section}] ({}): `{v}` is not a \
                     nonnegative integer",
                    src.describe(section, key)
                ))
            })?,
        };
        if v < lo || v > hi {
            let whence = match self.get(section, key) {
                Some((_, src)) => src.describe(section, key),
                None => "default".to_string(),
            };
            return err(format!(
                "`{key}` in [{section}] must lie in [{lo}, {hi}] ({whence}), got {v}"
            ));
        }
        Ok(v)
    }

    fn points(&self, section: &str, key: &str, default: usize) -> CResult<usize> {
        let v = match self.get(section, key) {
            None => default,
            Some((v, src)) => {
                let parsed = v.parse::<usize>().map_err(|_| {
                    ConfigError(format!(
                        "invalid value for `{key}` in [{section}] ({}): `{v}` is not a \
                         nonnegative integer",
                        src.describe(section, key)
                    ))
                })?;
                if parsed < 4 || !parsed.is_power_of_two() {
                    return err(format!(
                        "N must be a power of two (at least 4), got {parsed} ({})",
                        src.describe(section, key)
                    ));
                }
                parsed
            }
        };
        Ok(v)
    }

    fn bool_key(&self, section: &str, key: &str, default: bool) -> CResult<bool> {
        match self.get(section, key) {
            None => Ok(default),
            Some((v, src)) => match v.as_str() {
                "true" | "yes" | "on" | "1" => Ok(true),
                "false" | "no" | "off" | "0" => Ok(false),
                _ => err(format!(
                    "invalid value for `{key}` in [{section}] ({}): `{v}` is not a boolean",
                    src.describe(section, key)
                )),
            },
        }
    }

    fn f64_list(&self, section: &str, key: &str, default: Vec<f64>) -> CResult<Vec<f64>> {
        match self.get(section, key) {
            None => Ok(default),
            Some((v, src)) => {
                let mut out = Vec::new();
                for part in v.split(',') {
                    let part = part.trim();
                    out.push(part.parse::<f64>().map_err(|_| {
                        ConfigError(format!(
                            "invalid value for `{key}` in [{section}] ({}): `{part}` is \
                             not a number",
                            src.describe(section, key)
                        ))
                    })?);
                }
                if out.is_empty() {
                    return err(format!(
                        "`{key}` in [{section}] must list at least one value ({})",
                        src.describe(section, key)
                    ));
                }
                Ok(out)
            }
        }
    }

    fn i32_list(&self, section: &str, key: &str, default: Vec<i32>) -> CResult<Vec<i32>> {
        match self.get(section, key) {
            None => Ok(default),
            Some((v, src)) => {
                let mut out = Vec::new();
                for part in v.split(',') {
                    let part = part.trim();
                    out.push(part.parse::<i32>().map_err(|_| {
                        ConfigError(format!(
                            "invalid value for `{key}` in [{section}] ({}): `{part}` is \
                             not an integer",
                            src.describe(section, key)
                        ))
                    })?);
                }
                if out.is_empty() {
                    return err(format!(
                        "`{key}` in [{section}] must list at least one value ({})",
                        src.describe(section, key)
                    ));
                }
                Ok(out)
            }
        }
    }
}

/// Fully typed configuration with every default filled in.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub kind: Kind,
    pub dim: usize,
    pub points: usize,
    pub length: f64,
    pub rho_bar: f64,
    pub mu: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub monitor_p: f64,
    pub monitor_r0: f64,
    pub monitor_stride: usize,
    pub seed: u64,
    pub pairs: usize,
    pub p: f64,
    pub s: f64,
    pub sigma: f64,
    pub r0: Option<f64>,
    pub rings: Vec<i32>,
    pub eps: Vec<f64>,
    pub epsilon: f64,
    pub eta: f64,
    pub oscillation: String,
    pub probe: String,
    pub control: bool,
}

impl Resolved {
    /// Rescaled total viscosity `(lambda + 2 mu) / rho_bar`, the damping
    /// coefficient of the potential velocity part.
    pub fn nu_bar(&self) -> f64 {
        (self.lambda + 2.0 * self.mu) / self.rho_bar
    }

    /// Deterministic `section.key = value` echo for the report.
    pub fn echo_lines(&self) -> Vec<String> {
        let fmt_list_f = |xs: &[f64]| {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        let fmt_list_i = |xs: &[i32]| {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        };
        vec![
            format!("grid.dim = {}", self.dim),
            format!("grid.N = {}", self.points),
            format!("grid.length = {}", self.length),
            format!("physics.rho_bar = {}", self.rho_bar),
            format!("physics.mu = {}", self.mu),
            format!("physics.lambda = {}", self.lambda),
            format!("physics.gamma = {}", self.gamma),
            format!("physics.nu_bar (derived) = {}", self.nu_bar()),
            format!("solver.dt = {}", self.dt),
            format!("solver.t_end = {}", self.t_end),
            format!("solver.dealias = {}", self.dealias),
            format!("solver.monitor_p = {}", self.monitor_p),
            format!("solver.monitor_r0 = {}", self.monitor_r0),
            format!("solver.monitor_stride = {}", self.monitor_stride),
            format!("experiment.seed = {}", self.seed),
            format!("experiment.pairs = {}", self.pairs),
            format!("experiment.p = {}", self.p),
            format!("experiment.s = {}", self.s),
            format!("experiment.sigma = {}", self.sigma),
            format!(
                "experiment.r0 = {}",
                self.r0.map(|v| v.to_string()).unwrap_or_else(|| "(kind default)".into())
            ),
            format!("experiment.rings = {}", fmt_list_i(&self.rings)),
            format!("experiment.eps = {}", fmt_list_f(&self.eps)),
            format!("experiment.epsilon = {}", self.epsilon),
            format!("experiment.eta = {}", self.eta),
            format!("experiment.oscillation = {}", self.oscillation),
            format!("experiment.probe = {}", self.probe),
            format!("experiment.control = {}", self.control),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_resolves_to_full_defaults_for_every_kind() {
        let raw = RawConfig::parse("").unwrap();
        for kind in Kind::ALL {
            let r = raw.resolve(kind).unwrap();
            assert!(r.points.is_power_of_two());
            assert!(r.dt > 0.0 && r.t_end > 0.0);
        }
    }

    #[test]
    fn non_power_of_two_points_name_the_line() {
        let raw = RawConfig::parse("[grid]\nN = 100\n").unwrap();
        let e = raw.resolve(Kind::LpCheck).unwrap_err();
        assert!(e.0.contains("N must be a power of two"), "{e}");
        assert!(e.0.contains("line 2"), "{e}");
    }

    #[test]
    fn duplicate_keys_are_rejected_with_the_line() {
        let e = RawConfig::parse("[grid]\nN = 64\nN = 32\n").unwrap_err();
        assert!(e.0.contains("duplicate key `N`"), "{e}");
        assert!(e.0.contains("line 3"), "{e}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_the_line() {
        let e = RawConfig::parse("[grid]\nresolution = 64\n").unwrap_err();
        assert!(e.0.contains("unknown key `resolution`"), "{e}");
        assert!(e.0.contains("line 2"), "{e}");
    }

    #[test]
    fn unknown_sections_are_rejected() {
        let e = RawConfig::parse("[plotting]\nstyle = line\n").unwrap_err();
        assert!(e.0.contains("unknown section `[plotting]`"), "{e}");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# header comment\n\n[grid]\nN = 32  ; inline comment\n";
        let raw = RawConfig::parse(text).unwrap();
        let r = raw.resolve(Kind::LpCheck).unwrap();
        assert_eq!(r.points, 32);
    }

    #[test]
    fn set_overrides_replace_file_values() {
        let mut raw = RawConfig::parse("[grid]\nN = 64\n").unwrap();
        raw.apply_set("grid.N=128").unwrap();
        assert_eq!(raw.resolve(Kind::LpCheck).unwrap().points, 128);
        let e = raw.apply_set("grid.width=5").unwrap_err();
        assert!(e.0.contains("unknown key `width`"), "{e}");
    }

    #[test]
    fn set_override_failures_name_the_flag() {
        let mut raw = RawConfig::parse("").unwrap();
        raw.apply_set("grid.N=100").unwrap();
        let e = raw.resolve(Kind::LpCheck).unwrap_err();
        assert!(e.0.contains("N must be a power of two"), "{e}");
        assert!(e.0.contains("--set grid.N"), "{e}");
    }

    #[test]
    fn kind_defaults_differ_where_the_experiment_needs_them() {
        let raw = RawConfig::parse("").unwrap();
        assert_eq!(raw.resolve(Kind::GreenDecay).unwrap().dim, 1);
        assert_eq!(raw.resolve(Kind::GreenDecay).unwrap().points, 256);
        assert_eq!(raw.resolve(Kind::OscillationScaling).unwrap().points, 256);
        assert_eq!(raw.resolve(Kind::Solve).unwrap().t_end, 10.0);
        assert_eq!(raw.resolve(Kind::LinearConvection).unwrap().p, 3.0);
        assert_eq!(raw.resolve(Kind::LpCheck).unwrap().points, 64);
    }
}
