//! Monte Carlo experiments: bias, MSE and interval coverage of the
//! estimators of `R` over repeated simulated data sets.
//!
//! Replicate `k` draws everything from `seeded(seed, k)`, so a row does not
//! depend on the number of worker threads or on the order replicates finish.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::censored::{censored_ci, censored_mle, generate_censored, CensoringScheme, SchemeKind};
use crate::common::{
    asymptotic_ci, asymptotic_variance, default_fit_config, fit_common, lindley_common, map_scale, observed_info,
    pseudo_posterior, CommonPriors,
};
use crate::error::{Error, Result};
use crate::general::{bayes_general, fit_general, r_integral, GeneralBayesOptions, GeneralPriors};
use crate::glfr::{sample, GlfrParams};
use crate::known::{exact_ci, lindley_estimate, mle_known, GammaPrior};
use crate::numerics::neumaier_sum;
use crate::stream::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    KnownScale,
    CommonScale,
    General,
    Censored,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::KnownScale => "known_scale",
            Scenario::CommonScale => "common_scale",
            Scenario::General => "general",
            Scenario::Censored => "censored",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "known_scale" | "known" => Ok(Scenario::KnownScale),
            "common_scale" | "common" => Ok(Scenario::CommonScale),
            "general" => Ok(Scenario::General),
            "censored" => Ok(Scenario::Censored),
            other => Err(Error::InvalidConfig {
                field: "scenario".into(),
                message: format!("unknown scenario `{other}`"),
            }),
        }
    }
}

/// Progressive type-II design for the two samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensoringDesign {
    pub m_x: usize,
    pub m_y: usize,
    pub kind_x: SchemeKind,
    pub kind_y: SchemeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSet {
    pub interval: bool,
    pub bayes: bool,
    /// posterior draws per replicate for the integral-form general Bayes
    /// estimate; 0 skips it
    pub integral_draws: usize,
}

impl Default for EstimatorSet {
    fn default() -> Self {
        Self {
            interval: true,
            bayes: true,
            integral_draws: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// strength law
    pub x: GlfrParams,
    /// stress law; shares the scale of `x` except in the general scenario
    pub y: GlfrParams,
    pub n_x: usize,
    pub n_y: usize,
    pub censoring: Option<CensoringDesign>,
    pub replications: usize,
    pub level: f64,
    pub estimators: EstimatorSet,
    pub seed: u64,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Complete-data config with the default 1000 replications and 95% level.
    pub fn new(scenario: Scenario, x: GlfrParams, y: GlfrParams, n_x: usize, n_y: usize, seed: u64) -> Self {
        Self {
            scenario,
            x,
            y,
            n_x,
            n_y,
            censoring: None,
            replications: 1000,
            level: 0.95,
            estimators: EstimatorSet::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(invalid("replications", "must be at least 1"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(invalid("level", format!("{} is not in (0, 1)", self.level)));
        }
        self.x.validate().map_err(|e| invalid("x", e.to_string()))?;
        self.y.validate().map_err(|e| invalid("y", e.to_string()))?;
        let shared = self.x.a == self.y.a && self.x.b == self.y.b;
        if self.scenario != Scenario::General && !shared {
            return Err(invalid(
                "y",
                format!("the {} scenario needs a common scale", self.scenario),
            ));
        }
        let min_n = match self.scenario {
            Scenario::KnownScale | Scenario::Censored => 1,
            Scenario::CommonScale => 2,
            Scenario::General => 3,
        };
        if self.n_x < min_n || self.n_y < min_n {
            return Err(invalid("n", format!("sample sizes must be at least {min_n}")));
        }
        match (self.scenario, self.censoring) {
            (Scenario::Censored, None) => return Err(invalid("censoring", "the censored scenario needs a design")),
            (Scenario::Censored, Some(c)) => {
                CensoringScheme::of_kind(c.kind_x, self.n_x, c.m_x).map_err(|e| invalid("m_x", e.to_string()))?;
                CensoringScheme::of_kind(c.kind_y, self.n_y, c.m_y).map_err(|e| invalid("m_y", e.to_string()))?;
            }
            (_, Some(_)) => {
                return Err(invalid(
                    "censoring",
                    format!("not used by the {} scenario", self.scenario),
                ))
            }
            (_, None) => {}
        }
        Ok(())
    }

    /// True value of `P(Y < X)`.
    pub fn true_r(&self) -> Result<f64> {
        match self.scenario {
            Scenario::General => r_integral(&self.x, &self.y),
            _ => Ok(self.x.alpha / (self.x.alpha + self.y.alpha)),
        }
    }
}

/// One table row: the config echo followed by aggregates over the
/// successful replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub scenario: Scenario,
    pub a_x: f64,
    pub b_x: f64,
    pub a_y: f64,
    pub b_y: f64,
    pub alpha: f64,
    pub beta: f64,
    pub n_x: usize,
    pub m_x: Option<usize>,
    pub n_y: usize,
    pub m_y: Option<usize>,
    pub scheme_x: Option<SchemeKind>,
    pub scheme_y: Option<SchemeKind>,
    pub replications: usize,
    pub level: f64,
    pub seed: u64,
    pub r: f64,
    pub mean_r_hat: f64,
    pub bias: f64,
    pub mse: f64,
    pub coverage: Option<f64>,
    pub mean_r_bayes: Option<f64>,
    pub mean_r_bayes_integral: Option<f64>,
    pub mean_lower: Option<f64>,
    pub mean_upper: Option<f64>,
    /// mean fitted `(a_x, b_x, alpha, beta)` where the scenario estimates them
    pub mean_a_hat: Option<f64>,
    pub mean_b_hat: Option<f64>,
    pub mean_alpha_hat: Option<f64>,
    pub mean_beta_hat: Option<f64>,
    pub failures: usize,
    /// more than 2% of replicates failed
    pub flagged: bool,
}

#[derive(Debug, Clone, Default)]
struct Replicate {
    r_hat: f64,
    interval: Option<(f64, f64)>,
    bayes: Option<f64>,
    bayes_integral: Option<f64>,
    params: Option<[f64; 4]>,
}

fn draw_pair<R: Rng + ?Sized>(cfg: &ExperimentConfig, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((sample(&cfg.x, cfg.n_x, rng)?, sample(&cfg.y, cfg.n_y, rng)?))
}

fn vague_shapes() -> (GammaPrior, GammaPrior) {
    (GammaPrior::noninformative(), GammaPrior::noninformative())
}

fn replicate(cfg: &ExperimentConfig, index: u64) -> Result<Replicate> {
    let mut rng = seeded(cfg.seed, index);
    let est = cfg.estimators;
    let mut out = Replicate::default();
    match cfg.scenario {
        Scenario::KnownScale => {
            let (x, y) = draw_pair(cfg, &mut rng)?;
            let fit = mle_known(&x, &y, (cfg.x.a, cfg.x.b))?;
            out.r_hat = fit.r_hat;
            out.params = Some([cfg.x.a, cfg.x.b, fit.alpha_hat, fit.beta_hat]);
            if est.interval {
                let ci = exact_ci(&fit, 1.0 - cfg.level)?;
                out.interval = Some((ci.lo, ci.hi));
            }
            if est.bayes {
                out.bayes = Some(lindley_estimate(fit.n, fit.m, fit.t1, fit.t2, vague_shapes())?);
            }
        }
        Scenario::CommonScale => {
            let (x, y) = draw_pair(cfg, &mut rng)?;
            let fit = fit_common(&x, &y, None, &default_fit_config())?;
            out.r_hat = fit.r_hat;
            out.params = Some(fit.theta());
            if est.interval {
                let info = observed_info(fit.theta(), &x, &y)?;
                let s2 = asymptotic_variance(&info, fit.alpha_hat, fit.beta_hat)?;
                let (ci, _) = asymptotic_ci(fit.r_hat, s2, info.n, cfg.level)?;
                out.interval = Some((ci.lo, ci.hi));
            }
            if est.bayes {
                let priors = CommonPriors::noninformative();
                let map = map_scale(&x, &y, &priors)?;
                let post = pseudo_posterior(&x, &y, map.a_hat, map.b_hat, priors.shapes())?;
                let u1 = priors.alpha.rate - post.alpha.rate;
                let u2 = priors.beta.rate - post.beta.rate;
                out.bayes = Some(lindley_common(x.len(), y.len(), u1, u2, priors.shapes())?);
            }
        }
        Scenario::General => {
            let (x, y) = draw_pair(cfg, &mut rng)?;
            let fit = fit_general(&x, &y, &default_fit_config())?;
            out.r_hat = fit.r_hat;
            out.params = Some([fit.px.a, fit.px.b, fit.px.alpha, fit.py.alpha]);
            if est.bayes {
                let opts = GeneralBayesOptions {
                    draws: 200,
                    integral_draws: est.integral_draws,
                    level: cfg.level,
                };
                let g = bayes_general(&x, &y, &GeneralPriors::noninformative(), &opts, &mut rng)?;
                out.bayes = Some(g.r_bayes);
                out.bayes_integral = g.r_bayes_integral;
            }
        }
        Scenario::Censored => {
            let c = cfg.censoring.expect("validated");
            let sx = CensoringScheme::of_kind(c.kind_x, cfg.n_x, c.m_x)?;
            let sy = CensoringScheme::of_kind(c.kind_y, cfg.n_y, c.m_y)?;
            let xs = generate_censored(&cfg.x, &sx, &mut rng)?;
            let ys = generate_censored(&cfg.y, &sy, &mut rng)?;
            let fit = censored_mle(&xs, &ys, (cfg.x.a, cfg.x.b))?;
            out.r_hat = fit.r_hat;
            out.params = Some([fit.a, fit.b, fit.alpha_hat, fit.beta_hat]);
            if est.interval {
                let ci = censored_ci(&xs, &ys, &fit, cfg.level)?;
                out.interval = Some((ci.lo, ci.hi));
            }
        }
    }
    Ok(out)
}

fn mean_of<I: IntoIterator<Item = f64>>(values: I, count: usize) -> f64 {
    neumaier_sum(values) / count as f64
}

/// Runs all replicates. Failed replicates are left out of the aggregates and
/// counted; an error is returned only when every replicate fails.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRow> {
    cfg.validate()?;
    let r = cfg.true_r()?;
    let results: Vec<Result<Replicate>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|k| replicate(cfg, k))
        .collect();
    let mut last_err = None;
    let mut ok = Vec::with_capacity(results.len());
    for res in results {
        match res {
            Ok(v) => ok.push(v),
            Err(e) => last_err = Some(e),
        }
    }
    let failures = cfg.replications - ok.len();
    if ok.is_empty() {
        return Err(last_err.expect("at least one replicate ran"));
    }
    let k = ok.len();
    let mean_r_hat = mean_of(ok.iter().map(|v| v.r_hat), k);
    let mse = mean_of(ok.iter().map(|v| (v.r_hat - r) * (v.r_hat - r)), k);
    let optional = |f: &dyn Fn(&Replicate) -> Option<f64>| -> Option<f64> {
        let vals: Option<Vec<f64>> = ok.iter().map(f).collect();
        vals.map(|v| mean_of(v, k))
    };
    let coverage = optional(&|v| v.interval.map(|(lo, hi)| f64::from(u8::from(lo <= r && r <= hi))));
    let param = |i: usize| optional(&|v: &Replicate| v.params.map(|p| p[i]));
    let design = cfg.censoring;
    Ok(ExperimentRow {
        scenario: cfg.scenario,
        a_x: cfg.x.a,
        b_x: cfg.x.b,
        a_y: cfg.y.a,
        b_y: cfg.y.b,
        alpha: cfg.x.alpha,
        beta: cfg.y.alpha,
        n_x: cfg.n_x,
        m_x: design.map(|c| c.m_x),
        n_y: cfg.n_y,
        m_y: design.map(|c| c.m_y),
        scheme_x: design.map(|c| c.kind_x),
        scheme_y: design.map(|c| c.kind_y),
        replications: cfg.replications,
        level: cfg.level,
        seed: cfg.seed,
        r,
        mean_r_hat,
        bias: mean_r_hat - r,
        mse,
        coverage,
        mean_r_bayes: optional(&|v| v.bayes),
        mean_r_bayes_integral: optional(&|v| v.bayes_integral),
        mean_lower: optional(&|v| v.interval.map(|i| i.0)),
        mean_upper: optional(&|v| v.interval.map(|i| i.1)),
        mean_a_hat: param(0),
        mean_b_hat: param(1),
        mean_alpha_hat: param(2),
        mean_beta_hat: param(3),
        failures,
        flagged: failures * 50 > cfg.replications,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(invalid("format", format!("unknown table format `{other}`"))),
        }
    }
}

/// Column order of the CSV document and of each JSON row object.
pub const COLUMNS: [&str; 31] = [
    "scenario",
    "a_x",
    "b_x",
    "a_y",
    "b_y",
    "alpha",
    "beta",
    "n_x",
    "m_x",
    "n_y",
    "m_y",
    "scheme_x",
    "scheme_y",
    "replications",
    "level",
    "seed",
    "r",
    "mean_r_hat",
    "bias",
    "mse",
    "coverage",
    "mean_r_bayes",
    "mean_r_bayes_integral",
    "mean_lower",
    "mean_upper",
    "mean_a_hat",
    "mean_b_hat",
    "mean_alpha_hat",
    "mean_beta_hat",
    "failures",
    "flagged",
];

/// JSON document wrapping the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDocument {
    pub schema: String,
    pub columns: Vec<String>,
    pub rows: Vec<ExperimentRow>,
}

pub const TABLE_SCHEMA_ID: &str = "glfr-experiment-table/v1";

pub fn emit_table(rows: &[ExperimentRow], format: TableFormat) -> Result<String> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(COLUMNS).map_err(csv_err)?;
            for row in rows {
                w.serialize(row).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Domain(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        TableFormat::Json => {
            let doc = TableDocument {
                schema: TABLE_SCHEMA_ID.into(),
                columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
                rows: rows.to_vec(),
            };
            serde_json::to_string_pretty(&doc).map_err(|e| Error::Domain(e.to_string()))
        }
    }
}

/// Reads rows back from a CSV document written by [`emit_table`].
pub fn parse_csv_table(doc: &str) -> Result<Vec<ExperimentRow>> {
    let mut r = csv::Reader::from_reader(doc.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    if header != COLUMNS {
        return Err(Error::Domain("unexpected table header".into()));
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Domain(format!("csv: {e}"))
}
