//! One function per subcommand; each returns the report or table text.

use serde_json::{json, Value};

use glfr_stress::censored::{censor_observed, censored_ci, censored_mle, censored_mle_unknown, CensoringScheme};
use glfr_stress::common::{
    asymptotic_ci, asymptotic_variance, bayes_common, bootstrap_ci, default_fit_config, fit_common, observed_info,
    sample_posterior_r, CommonPriors,
};
use glfr_stress::datasets::DataSet;
use glfr_stress::general::{bayes_general, fit_general, GeneralBayesOptions, GeneralPriors};
use glfr_stress::glfr::{cdf, sample};
use glfr_stress::known::{
    credible_interval, exact_ci, lindley_estimate, log_transform_sum, mle_known, posterior_params, GammaPrior,
    DEFAULT_SCALE,
};
use glfr_stress::numerics::ks_test;
use glfr_stress::sim::{emit_table, run_experiment};
use glfr_stress::stream::seeded;
use glfr_stress::{GlfrParams, Interval};

use crate::args::{BayesArgs, CensorArgs, CiMethod, DataArgs, FitArgs, Mode, SampleArgs, SimulateArgs};
use crate::config::RawConfig;
use crate::error::CliError;
use crate::ingest::ingest;

/// Identifier of the report layout in `schemas/report.schema.json`.
pub const REPORT_SCHEMA_ID: &str = "glfr-report/v1";

type Result<T> = std::result::Result<T, CliError>;

fn load(d: &DataArgs) -> Result<(DataSet, DataSet)> {
    let col = d.column.as_deref();
    Ok((ingest(&d.x, d.format, col)?, ingest(&d.y, d.format, col)?))
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--level must be in (0, 1), got {level}")))
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Known => "known",
        Mode::Common => "common",
        Mode::General => "general",
    }
}

fn envelope(command: &str, mode: Option<Mode>, seed: u64, x: &DataSet, y: &DataSet, result: Value) -> Value {
    json!({
        "schema": REPORT_SCHEMA_ID,
        "command": command,
        "mode": mode.map(mode_name),
        "seed": seed,
        "data": {
            "x": { "label": x.label, "n": x.len() },
            "y": { "label": y.label, "n": y.len() },
        },
        "result": result,
    })
}

fn law(p: &GlfrParams) -> Value {
    json!({ "a": p.a, "b": p.b, "shape": p.alpha })
}

fn interval(method: &str, i: &Interval) -> Value {
    json!({ "method": method, "lo": i.lo, "hi": i.hi, "level": i.level })
}

fn gof(data: &[f64], p: &GlfrParams) -> Result<Value> {
    let mut s = data.to_vec();
    s.sort_by(f64::total_cmp);
    let k = ks_test(&s, |v| cdf(p, v).unwrap_or(f64::NAN))?;
    Ok(json!({ "statistic": k.statistic, "p_value": k.p_value }))
}

fn unsupported(method: CiMethod, mode: Mode) -> CliError {
    let name = match method {
        CiMethod::Asymptotic => "asymptotic",
        CiMethod::Bootstrap => "bootstrap",
        CiMethod::Exact => "exact",
    };
    CliError::Usage(format!("--ci {name} is not available in mode {}", mode_name(mode)))
}

fn check_ci(methods: &[CiMethod], mode: Mode) -> Result<()> {
    for &m in methods {
        let ok = match mode {
            Mode::Known => m != CiMethod::Asymptotic,
            Mode::Common => m != CiMethod::Exact,
            Mode::General => false,
        };
        if !ok {
            return Err(unsupported(m, mode));
        }
    }
    Ok(())
}

pub fn fit(args: &FitArgs) -> Result<Value> {
    check_level(args.level)?;
    check_ci(&args.ci, args.mode)?;
    if args.scale.is_some() && args.mode != Mode::Known {
        return Err(CliError::Usage("--scale only applies to mode known".into()));
    }
    let (xd, yd) = load(&args.data)?;
    let (x, y) = (&xd.values, &yd.values);
    let seed = args.common.seed;
    let mut intervals = Vec::new();
    let (px, py, r_hat, diagnostics) = match args.mode {
        Mode::Known => {
            let scale = args.scale.unwrap_or(DEFAULT_SCALE);
            let f = mle_known(x, y, scale)?;
            for &m in &args.ci {
                match m {
                    CiMethod::Exact => intervals.push(interval("exact", &exact_ci(&f, args.level)?)),
                    CiMethod::Bootstrap => {
                        let b = bootstrap_ci(x, y, Some(scale), args.boot, args.level, &mut seeded(seed, 1))?;
                        intervals.push(interval("bootstrap", &b.interval));
                    }
                    CiMethod::Asymptotic => unreachable!("checked above"),
                }
            }
            let px = GlfrParams::new(scale.0, scale.1, f.alpha_hat)?;
            let py = GlfrParams::new(scale.0, scale.1, f.beta_hat)?;
            (px, py, f.r_hat, json!({ "t1": f.t1, "t2": f.t2 }))
        }
        Mode::Common => {
            let f = fit_common(x, y, None, &default_fit_config())?;
            for &m in &args.ci {
                match m {
                    CiMethod::Asymptotic => {
                        let info = observed_info(f.theta(), x, y)?;
                        let s2 = asymptotic_variance(&info, f.alpha_hat, f.beta_hat)?;
                        let (ci, clipped) = asymptotic_ci(f.r_hat, s2, info.n, args.level)?;
                        let mut v = interval("asymptotic", &ci);
                        v["sigma2"] = json!(s2);
                        v["clipped"] = json!(clipped);
                        intervals.push(v);
                    }
                    CiMethod::Bootstrap => {
                        let b = bootstrap_ci(x, y, None, args.boot, args.level, &mut seeded(seed, 1))?;
                        intervals.push(interval("bootstrap", &b.interval));
                    }
                    CiMethod::Exact => unreachable!("checked above"),
                }
            }
            let px = GlfrParams::new(f.a_hat, f.b_hat, f.alpha_hat)?;
            let py = GlfrParams::new(f.a_hat, f.b_hat, f.beta_hat)?;
            let d = json!({
                "loglik": f.loglik,
                "converged": f.converged,
                "iterations": f.iterations,
                "score_norm": f.score_norm,
                "boundary": f.boundary,
            });
            (px, py, f.r_hat, d)
        }
        Mode::General => {
            let f = fit_general(x, y, &default_fit_config())?;
            let d = json!({
                "converged": f.converged,
                "iterations": f.iterations,
                "score_norm": f.score_norm,
                "boundary_x": f.boundary_x,
                "boundary_y": f.boundary_y,
            });
            (f.px, f.py, f.r_hat, d)
        }
    };
    let mut result = json!({
        "x_law": law(&px),
        "y_law": law(&py),
        "r_hat": r_hat,
        "intervals": intervals,
        "diagnostics": diagnostics,
    });
    if args.gof {
        result["gof"] = json!({ "x": gof(x, &px)?, "y": gof(y, &py)? });
    }
    Ok(envelope("fit", Some(args.mode), seed, &xd, &yd, result))
}

fn gamma_pairs(values: &[f64]) -> Result<Vec<GammaPrior>> {
    if !values.len().is_multiple_of(2) {
        return Err(CliError::Usage("--prior takes shape,rate pairs".into()));
    }
    values
        .chunks(2)
        .map(|c| GammaPrior::new(c[0], c[1]).map_err(|e| CliError::Usage(format!("--prior: {e}"))))
        .collect()
}

fn posterior_json(post: &glfr_stress::RPosterior) -> Value {
    json!({
        "alpha": { "shape": post.alpha.shape, "rate": post.alpha.rate },
        "beta": { "shape": post.beta.shape, "rate": post.beta.rate },
    })
}

pub fn bayes(args: &BayesArgs) -> Result<Value> {
    check_level(args.level)?;
    if args.scale.is_some() && args.mode != Mode::Known {
        return Err(CliError::Usage("--scale only applies to mode known".into()));
    }
    let given = gamma_pairs(&args.prior)?;
    let allowed: &[usize] = match args.mode {
        Mode::Known => &[2],
        Mode::Common => &[2, 4],
        Mode::General => &[2, 6],
    };
    if !given.is_empty() && !allowed.contains(&given.len()) {
        return Err(CliError::Usage(format!(
            "mode {} takes {} prior pairs, got {}",
            mode_name(args.mode),
            allowed.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" or "),
            given.len()
        )));
    }
    let (xd, yd) = load(&args.data)?;
    let (x, y) = (&xd.values, &yd.values);
    let seed = args.common.seed;
    let mut rng = seeded(seed, 0);
    let result = match args.mode {
        Mode::Known => {
            let scale = args.scale.unwrap_or(DEFAULT_SCALE);
            let nonin = GammaPrior::noninformative();
            let shapes = if given.is_empty() {
                (nonin, nonin)
            } else {
                (given[0], given[1])
            };
            let post = posterior_params(x, y, scale, shapes)?;
            let t1 = log_transform_sum(x, scale.0, scale.1)?;
            let t2 = log_transform_sum(y, scale.0, scale.1)?;
            let r_bayes = lindley_estimate(x.len(), y.len(), t1, t2, shapes)?;
            let draws = sample_posterior_r(&post, args.draws, &mut rng)?;
            json!({
                "r_bayes": r_bayes,
                "posterior": posterior_json(&post),
                "credible": interval("acceptance_rejection", &draws.interval(args.level)?),
                "credible_exact": interval("quantile", &credible_interval(&post, args.level)?),
                "acceptance_rate": draws.acceptance_rate,
                "scale": { "a": scale.0, "b": scale.1 },
            })
        }
        Mode::Common => {
            let mut priors = CommonPriors::noninformative();
            if !given.is_empty() {
                (priors.alpha, priors.beta) = (given[0], given[1]);
            }
            if given.len() == 4 {
                (priors.a, priors.b) = (given[2], given[3]);
            }
            let b = bayes_common(x, y, &priors, args.draws, args.level, &mut rng)?;
            json!({
                "r_bayes": b.r_lindley,
                "r_mode": b.r_mode,
                "r_sample_mean": b.r_sample_mean,
                "posterior": posterior_json(&b.posterior),
                "credible": interval("acceptance_rejection", &b.credible),
                "acceptance_rate": b.acceptance_rate,
                "scale": { "a": b.map.a_hat, "b": b.map.b_hat },
            })
        }
        Mode::General => {
            let mut priors = GeneralPriors::noninformative();
            if !given.is_empty() {
                (priors.alpha, priors.beta) = (given[0], given[1]);
            }
            if given.len() == 6 {
                (priors.a1, priors.b1, priors.a2, priors.b2) = (given[2], given[3], given[4], given[5]);
            }
            let opts = GeneralBayesOptions {
                draws: args.draws,
                integral_draws: args.draws,
                level: args.level,
            };
            let g = bayes_general(x, y, &priors, &opts, &mut rng)?;
            json!({
                "r_bayes": g.r_bayes,
                "r_bayes_integral": g.r_bayes_integral,
                "posterior": posterior_json(&g.posterior),
                "credible": interval("acceptance_rejection", &g.credible),
                "credible_integral": g.credible_integral.map(|i| interval("percentile", &i)),
                "acceptance_rate": g.acceptance_rate,
                "scale_x": { "a": g.map_x.a_hat, "b": g.map_x.b_hat },
                "scale_y": { "a": g.map_y.a_hat, "b": g.map_y.b_hat },
            })
        }
    };
    Ok(envelope("bayes", Some(args.mode), seed, &xd, &yd, result))
}

pub fn censor(args: &CensorArgs) -> Result<Value> {
    check_level(args.level)?;
    let (xd, yd) = load(&args.data)?;
    let n = args.n.unwrap_or(xd.len().min(yd.len()));
    if n > xd.len() || n > yd.len() {
        return Err(CliError::Usage(format!(
            "--n {n} exceeds the sample sizes ({}, {})",
            xd.len(),
            yd.len()
        )));
    }
    if args.m == 0 || args.m > n {
        return Err(CliError::Usage(format!("--m must be in 1..={n}, got {}", args.m)));
    }
    let (x, y) = (&xd.values[..n], &yd.values[..n]);
    let scheme = CensoringScheme::of_kind(args.kind, n, args.m)?;
    let seed = args.common.seed;
    let xs = censor_observed(x, &scheme, &mut seeded(seed, 0))?;
    let ys = censor_observed(y, &scheme, &mut seeded(seed, 1))?;
    let (fit, source) = match args.scale {
        Some(s) => (censored_mle(&xs, &ys, s)?, "given"),
        None => {
            let full = fit_common(x, y, None, &default_fit_config())?;
            if args.unknown_scale {
                (
                    censored_mle_unknown(&xs, &ys, Some((full.a_hat, full.b_hat)))?,
                    "censored_fit",
                )
            } else {
                (censored_mle(&xs, &ys, (full.a_hat, full.b_hat))?, "complete_data_fit")
            }
        }
    };
    let ci = censored_ci(&xs, &ys, &fit, args.level)?;
    let result = json!({
        "scheme": { "kind": args.kind, "n": n, "m": args.m, "removals": scheme.removals() },
        "observed": { "x": xs.times(), "y": ys.times() },
        "scale": { "a": fit.a, "b": fit.b, "source": source },
        "alpha_hat": fit.alpha_hat,
        "beta_hat": fit.beta_hat,
        "r_hat": fit.r_hat,
        "loglik": fit.loglik,
        "intervals": [interval("asymptotic", &ci)],
    });
    Ok(envelope("censor", None, seed, &xd, &yd, result))
}

pub fn simulate(args: &SimulateArgs) -> Result<String> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    for entry in &args.set {
        raw.set(entry)?;
    }
    let cfg = raw.build(args.seed)?;
    let row = run_experiment(&cfg)?;
    Ok(emit_table(&[row], args.output_format)?)
}

/// The draws, one per line, and the self-test result when requested.
pub fn draw(args: &SampleArgs) -> Result<(String, Option<Value>)> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let p = GlfrParams::new(args.a, args.b, args.alpha)?;
    let xs = sample(&p, args.n, &mut seeded(args.seed, 0))?;
    let text: String = xs.iter().map(|v| format!("{v}\n")).collect();
    let test = if args.self_test {
        let k = gof(&xs, &p)?;
        if k["p_value"].as_f64().is_some_and(|pv| pv < 1e-3) {
            return Err(CliError::Estimation(glfr_stress::Error::Domain(format!(
                "self-test failed: KS {k}"
            ))));
        }
        Some(json!({ "self_test": k }))
    } else {
        None
    };
    Ok((text, test))
}
