//! Run configuration: presets, a flat JSON file and command-line flags,
//! merged in that order and resolved into a validated [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use hpsym_core::clipping::EntropyConvention;
use hpsym_core::{Purity, WidthConvention};
use hpsym_validate::BoundMode;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::grid::{parse_grid, parse_index_grid, to_index};

pub type ConfigMap = BTreeMap<String, Value>;

/// Every accepted key, equal to the long flag name.
pub const KEYS: &[&str] = &[
    "kind", "N", "k", "L", "L-grid", "lambda-grid", "dL-coeff", "dL-grid", "dL-scale", "width", "chi",
    "Delta", "sweep-N", "fit", "c", "entropy", "T", "ell", "ell-grid", "resolution", "samples", "seed",
    "delta", "epsilon", "mode", "d-th", "threads", "format", "out", "preset",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Bounds,
    Delay,
    /// `delay` over `--sweep-N`.
    Scaling,
    Clipping,
    Remnant,
    Qfunc,
    Validate,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Bounds => "bounds",
            Command::Delay => "delay",
            Command::Scaling => "scaling",
            Command::Clipping => "clipping",
            Command::Remnant => "remnant",
            Command::Qfunc => "qfunc",
            Command::Validate => "validate",
        })
    }
}

/// How `--dL-coeff` becomes `deltaL`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DlScale {
    /// `coeff * sqrt(N)`
    Sqrt,
    /// `coeff * N`
    Linear,
    /// `coeff`
    Absolute,
}

impl DlScale {
    pub fn apply(self, coeff: f64, n: usize) -> f64 {
        match self {
            DlScale::Sqrt => coeff * (n as f64).sqrt(),
            DlScale::Linear => coeff * n as f64,
            DlScale::Absolute => coeff,
        }
    }
}

impl FromStr for DlScale {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sqrt" => Ok(DlScale::Sqrt),
            "linear" => Ok(DlScale::Linear),
            "absolute" => Ok(DlScale::Absolute),
            other => Err(format!("unknown dL-scale {other:?} (sqrt, linear, absolute)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format {other:?} (csv, json, svg)")),
        }
    }
}

/// Fully resolved and validated configuration.
/// Serialized keys match the long flag names.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub command: Command,
    pub kind: Purity,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub k: usize,
    #[serde(rename = "L")]
    pub l_values: Vec<f64>,
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(rename = "dL-coeff")]
    pub dl_coeffs: Vec<f64>,
    #[serde(rename = "dL-scale")]
    pub dl_scale: DlScale,
    pub width: WidthConvention,
    pub chi: Option<String>,
    #[serde(rename = "Delta")]
    pub deltas: Vec<f64>,
    #[serde(rename = "sweep-N")]
    pub sweep_n: Option<Vec<usize>>,
    pub fit: bool,
    pub c: Vec<f64>,
    pub entropy: EntropyConvention,
    #[serde(rename = "T")]
    pub temperature: f64,
    pub ell: Option<usize>,
    pub ell_grid: Option<Vec<usize>>,
    pub resolution: usize,
    pub samples: usize,
    pub seed: u64,
    pub delta: f64,
    pub epsilon: Option<f64>,
    pub mode: BoundMode,
    pub d_th: Option<f64>,
    /// `None` means available parallelism, not echoed as a number so output
    /// bytes do not depend on the machine.
    pub threads: Option<usize>,
    pub format: Format,
    pub out: Option<String>,
    pub preset: Option<String>,
}

/// Named parameter sets for the reference parameter sets.
pub fn preset(name: &str) -> Option<ConfigMap> {
    if !PRESETS.contains(&name) {
        return None;
    }
    let s = |v: &str| Value::String(v.into());
    let n = |v: f64| Value::from(v);
    let mut m: ConfigMap = BTreeMap::new();
    let mut put = |k: &str, v: Value| {
        m.insert(k.to_string(), v);
    };
    match name {
        "kerr-pure" | "kerr-mixed" => {
            put("kind", s(if name == "kerr-pure" { "pure" } else { "mixed" }));
            put("N", n(500.0));
            put("k", n(5.0));
            put("L-grid", s("0:187.5:62.5"));
            put("dL-grid", s("0.1,0.5,0.9"));
            put("dL-scale", s("sqrt"));
        }
        "remnant-1000" => {
            put("N", n(1000.0));
            put("k", n(1.0));
            put("L", n(0.0));
            put("dL-scale", s("sqrt"));
        }
        "scaling-sqrt" | "scaling-linear" => {
            put("kind", s("pure"));
            put("k", n(1.0));
            put("L", n(0.0));
            put("sweep-N", s("100:500:50"));
            put("Delta", n(0.1));
            put("fit", Value::Bool(true));
            if name == "scaling-sqrt" {
                put("dL-coeff", n(0.5));
                put("dL-scale", s("sqrt"));
            } else {
                put("dL-coeff", n(0.3));
                put("dL-scale", s("linear"));
            }
        }
        _ => {
            let mut it = name.trim_start_matches("delay-").splitn(2, '-');
            let kind = it.next().unwrap();
            let delta = it.next().unwrap();
            let c = match (kind, delta) {
                ("pure", "0.005") => 3.4,
                ("pure", "0.05") => 2.6,
                ("pure", "0.5") => 1.6,
                ("mixed", "0.005") => 10.8,
                ("mixed", "0.05") => 8.7,
                _ => 6.2,
            };
            put("kind", s(kind));
            put("N", n(300.0));
            put("k", n(3.0));
            put("Delta", s(delta));
            put("c", n(c));
            put("lambda-grid", s("0:0.4:0.05"));
        }
    }
    Some(m)
}

pub const PRESETS: &[&str] = &[
    "kerr-pure", "kerr-mixed", "remnant-1000", "delay-pure-0.005", "delay-pure-0.05", "delay-pure-0.5", "delay-mixed-0.005",
    "delay-mixed-0.05", "delay-mixed-0.5", "scaling-sqrt", "scaling-linear",
];

/// Parses a flat JSON object whose keys are long flag names.
pub fn parse_config_json(text: &str) -> Result<ConfigMap, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
    let Value::Object(obj) = v else {
        return Err(CliError::Usage("config must be a JSON object".into()));
    };
    let mut out = ConfigMap::new();
    for (key, value) in obj {
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config: unknown key {key:?}")));
        }
        let ok = match &value {
            Value::String(_) | Value::Number(_) | Value::Bool(_) => true,
            Value::Array(items) => items.iter().all(Value::is_number),
            _ => false,
        };
        if !ok {
            return Err(CliError::Usage(format!("config: {key:?} must be a string, number, boolean or number list")));
        }
        out.insert(key, value);
    }
    Ok(out)
}

/// Presets, then `file`, then `flags`; later sources win key by key.
pub fn merge(file: ConfigMap, flags: ConfigMap) -> Result<ConfigMap, CliError> {
    let preset_name = flags.get("preset").or_else(|| file.get("preset")).cloned();
    let mut merged = match preset_name {
        Some(Value::String(name)) => preset(&name).ok_or_else(|| {
            CliError::Usage(format!("unknown preset {name:?}; known: {}", PRESETS.join(", ")))
        })?,
        Some(other) => return Err(CliError::Usage(format!("preset must be a string, got {other}"))),
        None => ConfigMap::new(),
    };
    if let Some(name) = flags.get("preset").or_else(|| file.get("preset")) {
        merged.insert("preset".into(), name.clone());
    }
    merged.extend(file);
    merged.extend(flags);
    Ok(merged)
}

struct Reader<'a>(&'a ConfigMap);

fn usage(key: &str, msg: impl fmt::Display) -> CliError {
    CliError::Usage(format!("--{key}: {msg}"))
}

impl Reader<'_> {
    fn text(&self, key: &str) -> Result<Option<String>, CliError> {
        Ok(match self.0.get(key) {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(Value::Number(n)) => Some(n.to_string()),
            Some(Value::Bool(b)) => Some(b.to_string()),
            Some(Value::Array(items)) => {
                let parts: Vec<String> = items.iter().map(Value::to_string).collect();
                Some(parts.join(","))
            }
            Some(other) => return Err(usage(key, format!("unsupported value {other}"))),
        })
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        self.text(key)?
            .map(|t| t.trim().parse::<T>().map_err(|e| usage(key, e)))
            .transpose()
    }

    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        let v: Option<f64> = self.parse(key)?;
        match v {
            Some(x) if !x.is_finite() => Err(usage(key, "must be finite")),
            _ => Ok(v),
        }
    }

    fn index(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.number(key)?.map(|x| to_index(x).map_err(|e| usage(key, e))).transpose()
    }

    fn grid(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.text(key)?.map(|t| parse_grid(&t).map_err(|e| usage(key, e))).transpose()
    }

    fn index_grid(&self, key: &str) -> Result<Option<Vec<usize>>, CliError> {
        self.text(key)?.map(|t| parse_index_grid(&t).map_err(|e| usage(key, e))).transpose()
    }

    fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.0.get(key) {
            None => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(other) => Err(usage(key, format!("expected a boolean, got {other}"))),
        }
    }
}

fn core_parse<T: FromStr<Err = hpsym_core::Error>>(r: &Reader, key: &str) -> Result<Option<T>, CliError> {
    r.text(key)?
        .map(|t| t.trim().parse::<T>().map_err(|e| usage(key, e)))
        .transpose()
}

impl RunConfig {
    pub fn resolve(command: Command, map: &ConfigMap) -> Result<RunConfig, CliError> {
        for key in map.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown key {key:?}")));
            }
        }
        let r = Reader(map);
        let single_or_grid = |single: &str, grid: &str| -> Result<Option<Vec<f64>>, CliError> {
            match (r.number(single)?, r.grid(grid)?) {
                (Some(_), Some(_)) => Err(CliError::Usage(format!("--{single} and --{grid} are exclusive"))),
                (Some(x), None) => Ok(Some(vec![x])),
                (None, g) => Ok(g),
            }
        };
        let mode = match r.text("mode")?.as_deref() {
            None | Some("smoothed-tail") => BoundMode::SmoothedTail,
            Some("refined-tail") => BoundMode::RefinedTail,
            Some(other) => return Err(usage("mode", format!("unknown mode {other:?} (smoothed-tail, refined-tail)"))),
        };
        let cfg = RunConfig {
            command,
            kind: core_parse(&r, "kind")?.unwrap_or(Purity::Pure),
            n: r.index("N")?,
            k: r.index("k")?.unwrap_or(1),
            l_values: single_or_grid("L", "L-grid")?.unwrap_or_else(|| vec![0.0]),
            lambda_grid: r.grid("lambda-grid")?,
            dl_coeffs: single_or_grid("dL-coeff", "dL-grid")?.unwrap_or_else(|| vec![0.0]),
            dl_scale: r.parse("dL-scale")?.unwrap_or(DlScale::Sqrt),
            width: core_parse(&r, "width")?.unwrap_or_default(),
            chi: r.text("chi")?,
            deltas: r.grid("Delta")?.unwrap_or_else(|| vec![0.1]),
            sweep_n: r.index_grid("sweep-N")?,
            fit: r.flag("fit")?,
            c: r.grid("c")?.unwrap_or_default(),
            entropy: core_parse(&r, "entropy")?.unwrap_or_default(),
            temperature: r.number("T")?.unwrap_or(1.0),
            ell: r.index("ell")?,
            ell_grid: r.index_grid("ell-grid")?,
            resolution: r.index("resolution")?.unwrap_or(128),
            samples: r.index("samples")?.unwrap_or(2000),
            seed: r.index("seed")?.unwrap_or(42) as u64,
            delta: r.number("delta")?.unwrap_or(0.1),
            epsilon: r.number("epsilon")?,
            mode,
            d_th: r.number("d-th")?,
            threads: r.index("threads")?,
            format: r.parse("format")?.unwrap_or(if command == Command::Validate { Format::Json } else { Format::Csv }),
            out: r.text("out")?,
            preset: r.text("preset")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(CliError::Usage(msg.to_string())) };
        let single = |len: usize, what: &str| need(len == 1, &format!("{} takes a single {what}", self.command));
        need(self.k >= 1, "--k must be at least 1")?;
        need(self.dl_coeffs.iter().all(|&c| c >= 0.0), "--dL-coeff must be non-negative")?;
        need(self.deltas.iter().all(|&d| d > 0.0 && d <= 2.0), "--Delta must lie in (0, 2]")?;
        need(self.c.iter().all(|&c| c >= 0.0), "--c must be non-negative")?;
        need(self.temperature > 0.0, "--T must be positive")?;
        need(self.threads != Some(0), "--threads must be at least 1")?;
        if !matches!(self.command, Command::Delay | Command::Scaling) {
            need(self.sweep_n.is_none(), "--sweep-N applies to delay and scaling only")?;
            need(self.n.is_some(), "missing required --N")?;
        }
        match self.command {
            Command::Bounds => {}
            Command::Delay | Command::Scaling => {
                need(self.command == Command::Delay || self.sweep_n.is_some(), "scaling needs --sweep-N")?;
                need(self.n.is_some() || self.sweep_n.is_some(), "delay needs --N or --sweep-N")?;
                need(!(self.n.is_some() && self.sweep_n.is_some()), "--N and --sweep-N are exclusive")?;
                need(
                    !(self.lambda_grid.is_some() && self.l_values != [0.0]),
                    "--lambda-grid and --L/--L-grid are exclusive",
                )?;
                need(!self.fit || self.sweep_n.is_some(), "--fit needs --sweep-N")?;
            }
            Command::Clipping => {
                need(!self.c.is_empty(), "clipping needs --c")?;
                need(self.lambda_grid.is_some(), "clipping needs --lambda-grid")?;
            }
            Command::Remnant | Command::Qfunc | Command::Validate => {
                single(self.l_values.len(), "L")?;
                single(self.dl_coeffs.len(), "dL-coeff")?;
            }
        }
        if self.command == Command::Qfunc {
            need(self.resolution >= 8 && self.resolution <= 4096, "--resolution must lie in 8..=4096")?;
        }
        if self.command == Command::Validate {
            need(self.ell.is_some(), "validate needs --ell")?;
            need(self.samples >= 1, "--samples must be at least 1")?;
            need(self.delta > 0.0 && self.delta < 1.0, "--delta must lie in (0, 1)")?;
            need(self.format != Format::Svg, "validate writes json or csv")?;
        }
        if let Some(l) = &self.lambda_grid {
            need(l.iter().all(|x| x.abs() <= 0.5), "--lambda-grid values must lie in [-0.5, 0.5]")?;
        }
        if self.chi.is_some() {
            need(self.sweep_n.is_none(), "--chi fixes N and cannot be swept")?;
            need(self.lambda_grid.is_none(), "--chi fixes the profile; drop --lambda-grid")?;
            need(self.l_values.len() == 1 && self.dl_coeffs.len() == 1, "--chi fixes the profile; use a single --L and --dL-coeff")?;
        }
        Ok(())
    }

    /// `deltaL` for coefficient `coeff` at size `n`.
    pub fn delta_l(&self, coeff: f64, n: usize) -> f64 {
        self.dl_scale.apply(coeff, n)
    }

    /// Resolved configuration as one line of JSON.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, Value)]) -> ConfigMap {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn flags_override_file_and_preset() {
        let file = parse_config_json(r#"{"preset": "delay-pure-0.05", "N": 200, "c": "1.6"}"#).unwrap();
        let flags = map(&[("c", Value::from(3.4))]);
        let merged = merge(file, flags).unwrap();
        let cfg = RunConfig::resolve(Command::Clipping, &merged).unwrap();
        assert_eq!(cfg.n, Some(200));
        assert_eq!(cfg.c, vec![3.4]);
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.deltas, vec![0.05]);
        assert_eq!(cfg.lambda_grid.as_ref().unwrap().len(), 9);
    }

    #[test]
    fn every_preset_resolves() {
        for name in PRESETS {
            let m = merge(ConfigMap::new(), map(&[("preset", Value::from(*name))])).unwrap();
            let command = if name.starts_with("delay-") || name.starts_with("scaling-") {
                Command::Delay
            } else if *name == "remnant-1000" {
                Command::Remnant
            } else {
                Command::Bounds
            };
            RunConfig::resolve(command, &m).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn rejects_bad_config() {
        assert!(parse_config_json("[1]").is_err());
        assert!(parse_config_json(r#"{"bogus": 1}"#).is_err());
        assert!(parse_config_json(r#"{"N": {"x": 1}}"#).is_err());
        let m = map(&[("N", Value::from(2.5))]);
        assert!(RunConfig::resolve(Command::Bounds, &m).is_err());
        let m = map(&[("k", Value::from(1))]);
        assert!(matches!(RunConfig::resolve(Command::Bounds, &m), Err(CliError::Usage(_))));
    }

    #[test]
    fn scales() {
        assert_eq!(DlScale::Sqrt.apply(0.5, 400), 10.0);
        assert_eq!(DlScale::Linear.apply(0.3, 1000), 300.0);
        assert_eq!(DlScale::Absolute.apply(7.0, 1000), 7.0);
    }
}
