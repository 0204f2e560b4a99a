//! The general case: `X ~ GLFR(a1, b1, alpha)` and `Y ~ GLFR(a2, b2, beta)`
//! with all six parameters unknown. The likelihood separates, so each side
//! is a single-sample profile fit, and `R` is a one-dimensional integral.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::common::{fit_scale, map_scale_groups, sample_posterior_r, Boundary, MapScale};
use crate::error::{Error, Result};
use crate::glfr::{cdf, pdf, GlfrParams};
use crate::known::{lindley_estimate, GammaPrior, RPosterior};
use crate::numerics::{percentile_sorted, quad, Interval, RootConfig};

/// Single-sample GLFR maximum likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleFit {
    pub params: GlfrParams,
    pub loglik: f64,
    pub iterations: usize,
    /// max |score| in mean-scaled coordinates
    pub score_norm: f64,
    pub boundary: Option<Boundary>,
}

pub fn fit_single(data: &[f64], cfg: &RootConfig) -> Result<SingleFit> {
    if data.len() < 3 {
        return Err(Error::DegenerateSample(format!(
            "need at least 3 observations, got {}",
            data.len()
        )));
    }
    let f = fit_scale(&[data], None, cfg)?;
    Ok(SingleFit {
        params: GlfrParams::new(f.a, f.b, f.shapes[0])?,
        loglik: f.loglik,
        iterations: f.iterations,
        score_norm: f.score_norm,
        boundary: f.boundary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralFit {
    pub px: GlfrParams,
    pub py: GlfrParams,
    pub r_hat: f64,
    pub converged: bool,
    pub iterations: usize,
    pub score_norm: f64,
    pub boundary_x: Option<Boundary>,
    pub boundary_y: Option<Boundary>,
}

pub fn fit_general(x: &[f64], y: &[f64], cfg: &RootConfig) -> Result<GeneralFit> {
    let side = |data: &[f64], name: &str| {
        fit_single(data, cfg).map_err(|e| match e {
            Error::NonConvergence(msg) => Error::NonConvergence(format!("{name} side: {msg}")),
            other => other,
        })
    };
    let (fx, fy) = rayon::join(|| side(x, "x"), || side(y, "y"));
    let (fx, fy) = (fx?, fy?);
    Ok(GeneralFit {
        px: fx.params,
        py: fy.params,
        r_hat: r_integral(&fx.params, &fy.params)?,
        converged: true,
        iterations: fx.iterations + fy.iterations,
        score_norm: fx.score_norm.max(fy.score_norm),
        boundary_x: fx.boundary,
        boundary_y: fy.boundary,
    })
}

/// `P(Y < X) = integral of f_X(x) F_Y(x) dx` over `[0, inf)`.
pub fn r_integral(px: &GlfrParams, py: &GlfrParams) -> Result<f64> {
    px.validate()?;
    py.validate()?;
    let v = quad(
        |x| {
            let d = pdf(px, x).unwrap_or(0.0);
            if d == 0.0 || !d.is_finite() {
                return 0.0;
            }
            d * cdf(py, x).unwrap_or(0.0)
        },
        0.0,
        f64::INFINITY,
    )?;
    Ok(v.clamp(0.0, 1.0))
}

/// Gamma priors for the six parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralPriors {
    pub a1: GammaPrior,
    pub b1: GammaPrior,
    pub a2: GammaPrior,
    pub b2: GammaPrior,
    pub alpha: GammaPrior,
    pub beta: GammaPrior,
}

impl GeneralPriors {
    /// Same split as the common-scale preset: vague shapes, near-flat scales.
    pub fn noninformative() -> Self {
        let c = crate::common::CommonPriors::noninformative();
        Self {
            a1: c.a,
            b1: c.b,
            a2: c.a,
            b2: c.b,
            alpha: c.alpha,
            beta: c.beta,
        }
    }

    pub fn uniform(p: GammaPrior) -> Self {
        Self {
            a1: p,
            b1: p,
            a2: p,
            b2: p,
            alpha: p,
            beta: p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralBayesOptions {
    /// acceptance-rejection draws for the credible interval
    pub draws: usize,
    /// posterior draws of (alpha, beta) for the integral-form estimate; 0 skips it
    pub integral_draws: usize,
    pub level: f64,
}

impl Default for GeneralBayesOptions {
    fn default() -> Self {
        Self {
            draws: 10_000,
            integral_draws: 10_000,
            level: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralBayes {
    pub map_x: MapScale,
    pub map_y: MapScale,
    pub posterior: RPosterior,
    /// Lindley estimate of the posterior mean of alpha / (alpha + beta)
    pub r_bayes: f64,
    /// posterior mean of the integral form of R at the MAP scales
    pub r_bayes_integral: Option<f64>,
    /// acceptance-rejection interval for alpha / (alpha + beta)
    pub credible: Interval,
    /// percentile interval of the integral-form draws
    pub credible_integral: Option<Interval>,
    pub acceptance_rate: f64,
}

pub fn bayes_general<R: Rng + ?Sized>(
    x: &[f64],
    y: &[f64],
    priors: &GeneralPriors,
    opts: &GeneralBayesOptions,
    rng: &mut R,
) -> Result<GeneralBayes> {
    let cfg = crate::common::default_fit_config();
    let init = |d: &[f64]| fit_single(d, &cfg).ok().map(|f| (f.params.a, f.params.b));
    let map_x = map_scale_groups(&[(x, priors.alpha)], priors.a1, priors.b1, init(x))?;
    let map_y = map_scale_groups(&[(y, priors.beta)], priors.a2, priors.b2, init(y))?;
    let v1 = crate::known::log_transform_sum(x, map_x.a_hat, map_x.b_hat)?;
    let v2 = crate::known::log_transform_sum(y, map_y.a_hat, map_y.b_hat)?;
    let shapes = (priors.alpha, priors.beta);
    let posterior = RPosterior::from_sums(x.len(), y.len(), v1, v2, shapes);
    let r_bayes = lindley_estimate(x.len(), y.len(), v1, v2, shapes)?;
    let sampled = sample_posterior_r(&posterior, opts.draws, rng)?;

    let (mut r_bayes_integral, mut credible_integral) = (None, None);
    if opts.integral_draws > 0 {
        let mut values = Vec::with_capacity(opts.integral_draws);
        for _ in 0..opts.integral_draws {
            let al = posterior.alpha.sample(rng);
            let be = posterior.beta.sample(rng);
            let px = GlfrParams::new(map_x.a_hat, map_x.b_hat, al)?;
            let py = GlfrParams::new(map_y.a_hat, map_y.b_hat, be)?;
            values.push(r_integral(&px, &py)?);
        }
        r_bayes_integral = Some(crate::numerics::neumaier_sum(values.iter().copied()) / values.len() as f64);
        values.sort_by(f64::total_cmp);
        let tail = 0.5 * (1.0 - opts.level);
        credible_integral = Some(Interval::new(
            percentile_sorted(&values, tail),
            percentile_sorted(&values, 1.0 - tail),
            opts.level,
        )?);
    }
    Ok(GeneralBayes {
        map_x,
        map_y,
        posterior,
        r_bayes,
        r_bayes_integral,
        credible: sampled.interval(opts.level)?,
        credible_integral,
        acceptance_rate: sampled.acceptance_rate,
    })
}
