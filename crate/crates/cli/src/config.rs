//! Flat `key = value` experiment configuration with dotted section prefixes.
//!
//! Lines starting with `#` are comments. Keys under `result.` are ignored so that a run
//! report can be fed back in as a config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use memheat_core::{Grid, Params};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("key `{key}`: cannot parse `{value}`: {reason}")]
    Value {
        key: String,
        value: String,
        reason: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq)]
pub enum InitData {
    Zero,
    Constant { value: f64 },
    /// `height · exp(-|x|²/width²)`
    Bump { height: f64, width: f64 },
    /// Sum of random low Fourier modes scaled to sup norm `amplitude`.
    Random { amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeKey {
    Subcritical,
    Memory,
    Critical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub gamma: f64,
    pub p: f64,
    pub half_width: f64,
    pub points: usize,
    pub dt0: f64,
    pub dt_min: f64,
    pub threshold: f64,
    pub t_end: f64,
    pub stride: usize,
    pub c_adapt: f64,
    /// 0 keeps the whole memory ledger.
    pub trim_ratio: f64,
    pub init: InitData,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub sweep_gamma: Vec<f64>,
    pub sweep_p: Vec<f64>,
    pub sweep_height: Vec<f64>,
    pub rate_a: f64,
    pub regime: RegimeKey,
    pub horizons: Vec<f64>,
    pub half_steps: usize,
    pub radius: f64,
    pub k: f64,
    /// 0 selects the minimal admissible exponent.
    pub sigma: f64,
    /// 0 selects the default bump power.
    pub ell: u32,
}

const KEYS: &[&str] = &[
    "params.n",
    "params.m",
    "params.gamma",
    "params.p",
    "grid.half_width",
    "grid.points",
    "solver.dt0",
    "solver.dt_min",
    "solver.threshold",
    "solver.t_end",
    "solver.stride",
    "solver.c_adapt",
    "solver.trim_ratio",
    "init.kind",
    "init.value",
    "init.height",
    "init.width",
    "init.amplitude",
    "output.dir",
    "seed",
    "sweep.gamma",
    "sweep.p",
    "sweep.height",
    "rate.a",
    "liouville.regime",
    "liouville.horizons",
    "liouville.half_steps",
    "liouville.radius",
    "liouville.k",
    "liouville.sigma",
    "liouville.ell",
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 1,
            m: 1,
            gamma: 0.5,
            p: 2.0,
            half_width: 20.0,
            points: 1024,
            dt0: 1e-3,
            dt_min: 1e-12,
            threshold: 1e8,
            t_end: 1.0,
            stride: 1,
            c_adapt: 0.1,
            trim_ratio: 0.0,
            init: InitData::Bump { height: 10.0, width: 3.0 },
            output_dir: PathBuf::from("out"),
            seed: 0,
            sweep_gamma: Vec::new(),
            sweep_p: Vec::new(),
            sweep_height: Vec::new(),
            rate_a: 1.0,
            regime: RegimeKey::Subcritical,
            horizons: vec![4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0],
            half_steps: 1024,
            radius: 1.0,
            k: 1.0,
            sigma: 0.0,
            ell: 0,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::Value {
        key: key.into(),
        value: value.into(),
        reason: e.to_string(),
    })
}

fn list(key: &str, value: &str) -> Result<Vec<f64>> {
    let items: Vec<&str> = value.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(ConfigError::Value {
            key: key.into(),
            value: value.into(),
            reason: "empty list entry".into(),
        });
    }
    items.iter().map(|s| num(key, s)).collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: line.into(),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1, text: line.into() });
            }
            if k.starts_with("result.") {
                continue;
            }
            if !KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey { line: i + 1, key: k.into() });
            }
            if pairs.iter().any(|(_, seen, _)| seen == k) {
                return Err(ConfigError::Duplicate { line: i + 1, key: k.into() });
            }
            pairs.push((i + 1, k.into(), v.into()));
        }

        let mut c = Self::default();
        let mut kind: Option<String> = None;
        let (mut value, mut height, mut width, mut amplitude) = (1.0, 10.0, 3.0, 1.0);
        if let InitData::Bump { height: h, width: w } = c.init {
            height = h;
            width = w;
        }
        for (_, k, v) in &pairs {
            let (k, v) = (k.as_str(), v.as_str());
            match k {
                "params.n" => c.n = num(k, v)?,
                "params.m" => c.m = num(k, v)?,
                "params.gamma" => c.gamma = num(k, v)?,
                "params.p" => c.p = num(k, v)?,
                "grid.half_width" => c.half_width = num(k, v)?,
                "grid.points" => c.points = num(k, v)?,
                "solver.dt0" => c.dt0 = num(k, v)?,
                "solver.dt_min" => c.dt_min = num(k, v)?,
                "solver.threshold" => c.threshold = num(k, v)?,
                "solver.t_end" => c.t_end = num(k, v)?,
                "solver.stride" => c.stride = num(k, v)?,
                "solver.c_adapt" => c.c_adapt = num(k, v)?,
                "solver.trim_ratio" => c.trim_ratio = num(k, v)?,
                "init.kind" => kind = Some(v.to_string()),
                "init.value" => value = num(k, v)?,
                "init.height" => height = num(k, v)?,
                "init.width" => width = num(k, v)?,
                "init.amplitude" => amplitude = num(k, v)?,
                "output.dir" => c.output_dir = PathBuf::from(v),
                "seed" => c.seed = num(k, v)?,
                "sweep.gamma" => c.sweep_gamma = list(k, v)?,
                "sweep.p" => c.sweep_p = list(k, v)?,
                "sweep.height" => c.sweep_height = list(k, v)?,
                "rate.a" => c.rate_a = num(k, v)?,
                "liouville.regime" => {
                    c.regime = match v {
                        "subcritical" => RegimeKey::Subcritical,
                        "memory" => RegimeKey::Memory,
                        "critical" => RegimeKey::Critical,
                        _ => {
                            return Err(ConfigError::Value {
                                key: k.into(),
                                value: v.into(),
                                reason: "expected subcritical, memory or critical".into(),
                            })
                        }
                    }
                }
                "liouville.horizons" => c.horizons = list(k, v)?,
                "liouville.half_steps" => c.half_steps = num(k, v)?,
                "liouville.radius" => c.radius = num(k, v)?,
                "liouville.k" => c.k = num(k, v)?,
                "liouville.sigma" => c.sigma = num(k, v)?,
                "liouville.ell" => c.ell = num(k, v)?,
                _ => unreachable!("key list and match arms out of sync: {k}"),
            }
        }
        c.init = match kind.as_deref().unwrap_or("bump") {
            "zero" => InitData::Zero,
            "constant" => InitData::Constant { value },
            "bump" => InitData::Bump { height, width },
            "random" => InitData::Random { amplitude },
            other => {
                return Err(ConfigError::Value {
                    key: "init.kind".into(),
                    value: other.into(),
                    reason: "expected zero, constant, bump or random".into(),
                })
            }
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.grid()?;
        let bad = |what: &str| Err(ConfigError::Invalid(what.into()));
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt0 && self.dt0.is_finite()) {
            return bad("need 0 < solver.dt_min <= solver.dt0");
        }
        if !(self.threshold > 0.0) {
            return bad("solver.threshold must be positive");
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad("solver.t_end must be positive and finite");
        }
        if self.stride < 1 {
            return bad("solver.stride must be at least 1");
        }
        if !(self.c_adapt > 0.0) {
            return bad("solver.c_adapt must be positive");
        }
        if !(self.trim_ratio >= 0.0) {
            return bad("solver.trim_ratio must be non-negative");
        }
        match self.init {
            InitData::Zero => {}
            InitData::Constant { value } if value.is_finite() => {}
            InitData::Bump { height, width } if height.is_finite() && width > 0.0 => {}
            InitData::Random { amplitude } if amplitude.is_finite() && amplitude >= 0.0 => {}
            _ => return bad("initial data descriptor out of range"),
        }
        for (name, v) in [("sweep.gamma", &self.sweep_gamma), ("sweep.p", &self.sweep_p)] {
            for &x in v.iter() {
                let probe = if name == "sweep.gamma" {
                    Params::new(self.n, self.m, x, self.p)
                } else {
                    Params::new(self.n, self.m, self.gamma, x)
                };
                probe.map_err(|e| ConfigError::Invalid(format!("{name}: {e}")))?;
            }
        }
        if self.horizons.is_empty() || self.horizons.iter().any(|t| !(*t > 0.0)) {
            return bad("liouville.horizons must be positive");
        }
        if self.half_steps < 4 || !(self.radius > 0.0) || !(self.k > 0.0) {
            return bad("liouville.half_steps >= 4, liouville.radius > 0 and liouville.k > 0 required");
        }
        if !(self.rate_a > 0.0) {
            return bad("rate.a must be positive");
        }
        Ok(())
    }

    pub fn params(&self) -> Result<Params> {
        Params::new(self.n, self.m, self.gamma, self.p).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.half_width, self.points).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// The fully resolved config in the input format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("params.n", self.n.to_string());
        put("params.m", self.m.to_string());
        put("params.gamma", self.gamma.to_string());
        put("params.p", self.p.to_string());
        put("grid.half_width", self.half_width.to_string());
        put("grid.points", self.points.to_string());
        put("solver.dt0", self.dt0.to_string());
        put("solver.dt_min", self.dt_min.to_string());
        put("solver.threshold", self.threshold.to_string());
        put("solver.t_end", self.t_end.to_string());
        put("solver.stride", self.stride.to_string());
        put("solver.c_adapt", self.c_adapt.to_string());
        put("solver.trim_ratio", self.trim_ratio.to_string());
        match &self.init {
            InitData::Zero => put("init.kind", "zero".into()),
            InitData::Constant { value } => {
                put("init.kind", "constant".into());
                put("init.value", value.to_string());
            }
            InitData::Bump { height, width } => {
                put("init.kind", "bump".into());
                put("init.height", height.to_string());
                put("init.width", width.to_string());
            }
            InitData::Random { amplitude } => {
                put("init.kind", "random".into());
                put("init.amplitude", amplitude.to_string());
            }
        }
        put("output.dir", self.output_dir.display().to_string());
        put("seed", self.seed.to_string());
        if !self.sweep_gamma.is_empty() {
            put("sweep.gamma", join(&self.sweep_gamma));
        }
        if !self.sweep_p.is_empty() {
            put("sweep.p", join(&self.sweep_p));
        }
        if !self.sweep_height.is_empty() {
            put("sweep.height", join(&self.sweep_height));
        }
        put("rate.a", self.rate_a.to_string());
        put(
            "liouville.regime",
            match self.regime {
                RegimeKey::Subcritical => "subcritical",
                RegimeKey::Memory => "memory",
                RegimeKey::Critical => "critical",
            }
            .into(),
        );
        put("liouville.horizons", join(&self.horizons));
        put("liouville.half_steps", self.half_steps.to_string());
        put("liouville.radius", self.radius.to_string());
        put("liouville.k", self.k.to_string());
        put("liouville.sigma", self.sigma.to_string());
        put("liouville.ell", self.ell.to_string());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn overrides_and_comments() {
        let c = ExperimentConfig::parse(
            "# run\nparams.p = 3\nsolver.dt0 = 2.5e-4\ninit.kind = constant\ninit.value = 0.1\nsweep.gamma = 0.25, 0.5\n",
        )
        .unwrap();
        assert_eq!(c.p, 3.0);
        assert_eq!(c.dt0, 2.5e-4);
        assert_eq!(c.init, InitData::Constant { value: 0.1 });
        assert_eq!(c.sweep_gamma, vec![0.25, 0.5]);
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn result_keys_are_ignored() {
        let c = ExperimentConfig::parse("params.p = 3\nresult.status = blew_up\n").unwrap();
        assert_eq!(c.p, 3.0);
    }

    #[test]
    fn rejections() {
        let cases = [
            "params.q = 1",
            "no equals sign",
            "params.p = 2\nparams.p = 3",
            "params.gamma = 1.5",
            "params.p = two",
            "sweep.p = 2,,3",
            "sweep.p = ",
            "init.kind = spiky",
            "solver.dt_min = 1",
            "grid.points = 0",
        ];
        for text in cases {
            assert!(ExperimentConfig::parse(text).is_err(), "accepted: {text}");
        }
    }

    #[test]
    fn float_text_is_exact() {
        let c = ExperimentConfig::parse("params.gamma = 0.30000000000000004").unwrap();
        assert_eq!(c.gamma, 0.1 + 0.2);
        assert!(c.to_text().contains("params.gamma = 0.30000000000000004"));
    }
}
