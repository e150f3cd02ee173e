//! Run configuration: a line-oriented `key = value` format with overrides.
//!
//! ```text
//! # comments start with '#'
//! seed = 7
//! np = 50
//! hidden = 10
//! method = CG-PR
//! ```
//!
//! Every key has a default except `seed`. [`RunConfig::render`] prints the
//! fully resolved configuration in the same format, so a rendered config
//! parses back to an identical value.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::local_search::{LocalSearchConfig, Method};
use crate::optimizer::CodelConfig;
use crate::signal::{DEFAULT_BUTTERWORTH_ORDER, DEFAULT_CUTOFF_HZ, DEFAULT_HAMPEL_SIGMAS};

/// Default number of cross-validation folds.
pub const DEFAULT_FOLDS: usize = 10;

/// Default sampling rate of raw signal input, in Hz.
pub const DEFAULT_FS: f64 = 100.0;

/// Default hidden-layer sizes.
pub const DEFAULT_HIDDEN: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Optimizer settings; `codel.seed` mirrors `seed`.
    pub codel: CodelConfig,
    pub hidden: Vec<usize>,
    /// Declared input width; `None` takes it from the data.
    pub inputs: Option<usize>,
    pub local: LocalSearchConfig,
    pub folds: usize,
    pub fs: f64,
    pub cutoff_hz: f64,
    pub filter_order: usize,
    pub hampel_sigmas: f64,
}

impl RunConfig {
    /// Defaults with the given seed.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            codel: CodelConfig { seed, ..CodelConfig::default() },
            hidden: vec![DEFAULT_HIDDEN],
            inputs: None,
            local: LocalSearchConfig::default(),
            folds: DEFAULT_FOLDS,
            fs: DEFAULT_FS,
            cutoff_hz: DEFAULT_CUTOFF_HZ,
            filter_order: DEFAULT_BUTTERWORTH_ORDER,
            hampel_sigmas: DEFAULT_HAMPEL_SIGMAS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.codel.validate()?;
        self.local.validate()?;
        if self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(Error::Config("hidden layer sizes must be nonempty and positive".into()));
        }
        if self.inputs == Some(0) {
            return Err(Error::Config("inputs must be positive".into()));
        }
        if self.folds < 2 {
            return Err(Error::Config(format!("k must be >= 2, got {}", self.folds)));
        }
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return Err(Error::Config(format!("fs must be positive, got {}", self.fs)));
        }
        if !(self.hampel_sigmas > 0.0) {
            return Err(Error::Config("hampel_sigmas must be positive".into()));
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let c = &mut self.codel;
        let l = &mut self.local;
        match key {
            "seed" => {
                self.seed = parse(key, value)?;
                c.seed = self.seed;
            }
            "np" => c.np = parse(key, value)?,
            "nfe" => c.nfe_max = parse(key, value)?,
            "f" => c.f = parse(key, value)?,
            "cr" => c.cr = parse(key, value)?,
            "jr" => c.jr = parse(key, value)?,
            "cp" => c.cp = parse(key, value)?,
            "lower" => c.lower = parse(key, value)?,
            "upper" => c.upper = parse(key, value)?,
            "hidden" => {
                self.hidden = value
                    .split(',')
                    .map(|v| parse(key, v.trim()))
                    .collect::<Result<Vec<usize>>>()?;
            }
            "inputs" => {
                self.inputs = if value == "auto" { None } else { Some(parse(key, value)?) };
            }
            "method" => l.method = Method::from_str(value).map_err(|e| Error::Config(format!("key `method`: {e}")))?,
            "epochs" => l.epochs = parse(key, value)?,
            "lr" => l.lr = parse(key, value)?,
            "momentum" => l.momentum = parse(key, value)?,
            "patience" => l.patience = parse(key, value)?,
            "rp_eta_plus" => l.rp.eta_plus = parse(key, value)?,
            "rp_eta_minus" => l.rp.eta_minus = parse(key, value)?,
            "rp_delta0" => l.rp.delta0 = parse(key, value)?,
            "rp_delta_min" => l.rp.delta_min = parse(key, value)?,
            "rp_delta_max" => l.rp.delta_max = parse(key, value)?,
            "gda_inc" => l.gda.inc = parse(key, value)?,
            "gda_dec" => l.gda.dec = parse(key, value)?,
            "gda_max_perf_inc" => l.gda.max_perf_inc = parse(key, value)?,
            "ls_c1" => l.line_search.c1 = parse(key, value)?,
            "ls_shrink" => l.line_search.shrink = parse(key, value)?,
            "ls_max_backtracks" => l.line_search.max_backtracks = parse(key, value)?,
            "k" => self.folds = parse(key, value)?,
            "fs" => self.fs = parse(key, value)?,
            "cutoff_hz" => self.cutoff_hz = parse(key, value)?,
            "filter_order" => self.filter_order = parse(key, value)?,
            "hampel_sigmas" => self.hampel_sigmas = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Resolved `(key, value)` pairs in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let c = &self.codel;
        let l = &self.local;
        let hidden: Vec<String> = self.hidden.iter().map(|h| h.to_string()).collect();
        vec![
            ("seed", self.seed.to_string()),
            ("np", c.np.to_string()),
            ("nfe", c.nfe_max.to_string()),
            ("f", c.f.to_string()),
            ("cr", c.cr.to_string()),
            ("jr", c.jr.to_string()),
            ("cp", c.cp.to_string()),
            ("lower", c.lower.to_string()),
            ("upper", c.upper.to_string()),
            ("hidden", hidden.join(",")),
            ("inputs", self.inputs.map_or_else(|| "auto".to_string(), |i| i.to_string())),
            ("method", l.method.name().to_string()),
            ("epochs", l.epochs.to_string()),
            ("lr", l.lr.to_string()),
            ("momentum", l.momentum.to_string()),
            ("patience", l.patience.to_string()),
            ("rp_eta_plus", l.rp.eta_plus.to_string()),
            ("rp_eta_minus", l.rp.eta_minus.to_string()),
            ("rp_delta0", l.rp.delta0.to_string()),
            ("rp_delta_min", l.rp.delta_min.to_string()),
            ("rp_delta_max", l.rp.delta_max.to_string()),
            ("gda_inc", l.gda.inc.to_string()),
            ("gda_dec", l.gda.dec.to_string()),
            ("gda_max_perf_inc", l.gda.max_perf_inc.to_string()),
            ("ls_c1", l.line_search.c1.to_string()),
            ("ls_shrink", l.line_search.shrink.to_string()),
            ("ls_max_backtracks", l.line_search.max_backtracks.to_string()),
            ("k", self.folds.to_string()),
            ("fs", self.fs.to_string()),
            ("cutoff_hz", self.cutoff_hz.to_string()),
            ("filter_order", self.filter_order.to_string()),
            ("hampel_sigmas", self.hampel_sigmas.to_string()),
        ]
    }

    /// The configuration in `key = value` form, one entry per line.
    pub fn render(&self) -> String {
        self.render_with_prefix("")
    }

    /// Like [`render`](Self::render) with every line prefixed, e.g. `"# "`.
    pub fn render_with_prefix(&self, prefix: &str) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(out, "{prefix}{k} = {v}");
        }
        out
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::Config(format!("key `{key}`: cannot parse `{value}` as {}", short_type_name::<T>()))
    })
}

fn short_type_name<T>() -> &'static str {
    match std::any::type_name::<T>() {
        "usize" | "u64" => "an unsigned integer",
        "f64" => "a number",
        other => other,
    }
}

/// Splits `key = value` lines, ignoring blank lines and `#` comments.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!("line {}: expected `key = value`, got `{line}`", n + 1)));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Resolves a configuration from optional file text and overrides.
///
/// Overrides win over the file; a later occurrence of a key wins over an
/// earlier one. `seed` must come from one of the two sources.
pub fn parse_config(file_text: Option<&str>, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut pairs = match file_text {
        Some(text) => parse_pairs(text)?,
        None => Vec::new(),
    };
    pairs.extend(overrides.iter().cloned());
    let mut config = RunConfig::with_seed(0);
    let mut seeded = false;
    for (key, value) in &pairs {
        config.set(key, value)?;
        seeded |= key == "seed";
    }
    if !seeded {
        return Err(Error::Config("missing mandatory key `seed`".into()));
    }
    config.validate()?;
    Ok(config)
}
