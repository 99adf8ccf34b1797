//! Flag and config-file resolution.
//!
//! Every experiment is described by the same handful of keys; flags override
//! the optional `KEY=VALUE` config file, and anything left unset falls back
//! to the defaults below.

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use freqloc_core::{Prefilter, TestSignal, Weight, Window};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Args, Clone, Default)]
pub struct CommonOpts {
    /// Optional KEY=VALUE config file; explicit flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Prefilter family: sinc | gauss | bspline | bspline-nc.
    #[arg(long)]
    pub prefilter: Option<String>,
    /// Bandwidth parameter of the sinc and gaussian families.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// B-spline order (2..=8).
    #[arg(long)]
    pub order: Option<u32>,
    /// Sampling interval; repeat the flag for sweeps.
    #[arg(long = "lambda", allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    /// Reconstruct at the B-spline resonance lambda = 1/ell with the limit
    /// kernel.
    #[arg(long = "limit-ell")]
    pub limit_ell: Option<u32>,
    /// Weight family: monomial | gaussexp | sincscaled.
    #[arg(long)]
    pub weight: Option<String>,
    /// Exponent of the monomial / sinc-scaled weights.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Rate of the exponential weight (defaults to 1/(2 beta^2)).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Test-signal family: random | bump | trig.
    #[arg(long)]
    pub signal: Option<String>,
    /// Seed for the random test signal.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Band of the random test signal.
    #[arg(long)]
    pub band: Option<f64>,
    /// Smoothness / tilt parameter of the random test signal.
    #[arg(long, allow_hyphen_values = true)]
    pub smoothness: Option<f64>,
    /// Evaluation window as x0:x1:points.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format: csv | json.
    #[arg(long)]
    pub format: Option<String>,
}

/// Fully resolved experiment configuration; embedded verbatim in JSON
/// reports.
#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub prefilter: String,
    pub beta: f64,
    pub order: u32,
    pub lambda: Vec<f64>,
    pub limit_ell: Option<u32>,
    pub weight: String,
    pub s: f64,
    pub a: f64,
    pub signal: String,
    pub seed: u64,
    pub band: f64,
    pub smoothness: f64,
    pub window: (f64, f64, usize),
    pub format: String,
}

const KNOWN_KEYS: &[&str] = &[
    "prefilter",
    "beta",
    "order",
    "lambda",
    "limit-ell",
    "weight",
    "s",
    "a",
    "signal",
    "seed",
    "band",
    "smoothness",
    "window",
    "format",
];

fn parse_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {} is not KEY=VALUE: {line}", idx + 1))?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            bail!("unknown config key '{key}' on line {}", idx + 1);
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_window(text: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("window must be x0:x1:points, got '{text}'");
    }
    Ok((
        parts[0].parse().context("window x0")?,
        parts[1].parse().context("window x1")?,
        parts[2].parse().context("window points")?,
    ))
}

impl CommonOpts {
    /// Merges flags over the config file over the defaults.
    pub fn resolve(&self) -> Result<Config> {
        let file = match &self.config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };
        let from_file = |key: &str| file.get(key).cloned();

        let prefilter = self
            .prefilter
            .clone()
            .or_else(|| from_file("prefilter"))
            .unwrap_or_else(|| "gauss".into());
        let beta = match self.beta {
            Some(v) => v,
            None => from_file("beta").map(|v| v.parse()).transpose()?.unwrap_or(2.0),
        };
        let order = match self.order {
            Some(v) => v,
            None => from_file("order").map(|v| v.parse()).transpose()?.unwrap_or(3),
        };
        let lambda = if !self.lambda.is_empty() {
            self.lambda.clone()
        } else if let Some(text) = from_file("lambda") {
            text.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse().context("lambda list entry"))
                .collect::<Result<Vec<f64>>>()?
        } else {
            vec![0.25]
        };
        let limit_ell = match self.limit_ell {
            Some(v) => Some(v),
            None => from_file("limit-ell").map(|v| v.parse()).transpose()?,
        };
        let weight = self
            .weight
            .clone()
            .or_else(|| from_file("weight"))
            .unwrap_or_else(|| "monomial".into());
        let s = match self.s {
            Some(v) => v,
            None => from_file("s").map(|v| v.parse()).transpose()?.unwrap_or(2.0),
        };
        let a = match self.a {
            Some(v) => v,
            None => from_file("a")
                .map(|v| v.parse())
                .transpose()?
                .unwrap_or(1.0 / (2.0 * beta * beta)),
        };
        let signal = self
            .signal
            .clone()
            .or_else(|| from_file("signal"))
            .unwrap_or_else(|| "random".into());
        let seed = match self.seed {
            Some(v) => v,
            None => from_file("seed").map(|v| v.parse()).transpose()?.unwrap_or(7),
        };
        let band = match self.band {
            Some(v) => v,
            None => from_file("band").map(|v| v.parse()).transpose()?.unwrap_or(10.0),
        };
        let smoothness = match self.smoothness {
            Some(v) => v,
            None => from_file("smoothness").map(|v| v.parse()).transpose()?.unwrap_or(1.0),
        };
        let window = match &self.window {
            Some(text) => parse_window(text)?,
            None => match from_file("window") {
                Some(text) => parse_window(&text)?,
                None => (-5.0, 5.0, 1001),
            },
        };
        let format = self
            .format
            .clone()
            .or_else(|| from_file("format"))
            .unwrap_or_else(|| "csv".into());
        if format != "csv" && format != "json" {
            bail!("format must be csv or json, got '{format}'");
        }

        Ok(Config {
            prefilter,
            beta,
            order,
            lambda,
            limit_ell,
            weight,
            s,
            a,
            signal,
            seed,
            band,
            smoothness,
            window,
            format,
        })
    }
}

impl Config {
    pub fn prefilter(&self) -> Result<Prefilter<f64>> {
        let p = match self.prefilter.as_str() {
            "sinc" => Prefilter::sinc(self.beta),
            "gauss" | "gaussian" => Prefilter::gaussian(self.beta),
            "bspline" => Prefilter::bspline(self.order),
            "bspline-nc" => Prefilter::bspline_noncentered(self.order),
            other => bail!("unknown prefilter '{other}' (expected sinc|gauss|bspline|bspline-nc)"),
        };
        Ok(p?)
    }

    pub fn weight(&self) -> Result<Weight<f64>> {
        let w = match self.weight.as_str() {
            "monomial" => Weight::Monomial { s: self.s },
            "gaussexp" => Weight::GaussExp { a: self.a },
            "sincscaled" => Weight::SincScaled { s: self.s, beta: self.beta },
            other => bail!("unknown weight '{other}' (expected monomial|gaussexp|sincscaled)"),
        };
        w.validate()?;
        Ok(w)
    }

    pub fn signal(&self) -> Result<TestSignal<f64>> {
        Ok(match self.signal.as_str() {
            "random" => TestSignal::RandomSpectrum {
                seed: self.seed,
                band: self.band,
                smoothness: self.smoothness,
            },
            "bump" => TestSignal::GaussianBump {
                center: 0.0,
                width: self.band / 4.0,
                amplitude: 1.0,
            },
            "trig" => TestSignal::TrigPolyEnvelope {
                coeffs: vec![1.0, 0.5, -0.25],
                envelope_width: self.band / 4.0,
            },
            other => bail!("unknown signal '{other}' (expected random|bump|trig)"),
        })
    }

    pub fn window_obj(&self) -> Result<Window<f64>> {
        Ok(Window::new(self.window.0, self.window.1, self.window.2)?)
    }
}
