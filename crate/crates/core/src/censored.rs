//! Progressive type-II censoring with a known common scale.
//!
//! A scheme `(n, m, P_1..P_m)` puts `n` items on test; at the i-th observed
//! failure `P_i` surviving items are withdrawn at random, until `m` failures
//! have been seen.

use std::fmt;
use std::str::FromStr;

use rand::distr::{Distribution, Open01};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glfr::{log1mexp, odds_weight, quantile_unchecked, GlfrParams};
use crate::numerics::{find_root, grow_bracket, nelder_mead, normal_quantile, Interval, RootConfig};

/// The three removal patterns used in the simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    /// all `n - m` survivors withdrawn at the last failure
    Type2,
    /// all `n - m` withdrawals at the first failure
    Type3,
    /// withdrawals spread evenly, remainder on the earliest failures
    Type4,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Type2 => "type2",
            SchemeKind::Type3 => "type3",
            SchemeKind::Type4 => "type4",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    /// Accepts `type2`, `2` or `ii` (any case), and likewise for 3 and 4.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "type2" | "2" | "ii" => Ok(SchemeKind::Type2),
            "type3" | "3" | "iii" => Ok(SchemeKind::Type3),
            "type4" | "4" | "iv" => Ok(SchemeKind::Type4),
            other => Err(Error::InvalidScheme(format!("unknown scheme kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensoringScheme {
    n: usize,
    removals: Vec<usize>,
}

impl CensoringScheme {
    /// Builds a scheme from its removal vector; `m` is `removals.len()`.
    pub fn new(n: usize, removals: Vec<usize>) -> Result<Self> {
        let m = removals.len();
        if m == 0 || m > n {
            return Err(Error::InvalidScheme(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
        }
        let total: usize = removals.iter().sum();
        if total != n - m {
            return Err(Error::InvalidScheme(format!(
                "removals sum to {total}, expected n - m = {}",
                n - m
            )));
        }
        Ok(Self { n, removals })
    }

    pub fn of_kind(kind: SchemeKind, n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidScheme(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
        }
        let k = n - m;
        let mut removals = vec![0; m];
        match kind {
            SchemeKind::Type2 => removals[m - 1] = k,
            SchemeKind::Type3 => removals[0] = k,
            SchemeKind::Type4 => {
                let (q, r) = (k / m, k % m);
                for (i, p) in removals.iter_mut().enumerate() {
                    *p = q + usize::from(i < r);
                }
            }
        }
        Self::new(n, removals)
    }

    /// `m` failures out of `m` items: an ordinary complete sample.
    pub fn complete(m: usize) -> Result<Self> {
        Self::new(m, vec![0; m])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.removals.len()
    }

    pub fn removals(&self) -> &[usize] {
        &self.removals
    }

    pub fn has_removals(&self) -> bool {
        self.removals.iter().any(|&p| p > 0)
    }
}

/// Observed failure times with the scheme that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensoredSample {
    times: Vec<f64>,
    scheme: CensoringScheme,
}

impl CensoredSample {
    pub fn new(times: Vec<f64>, scheme: CensoringScheme) -> Result<Self> {
        if times.len() != scheme.m() {
            return Err(Error::InvalidScheme(format!(
                "{} failure times for a scheme with m = {}",
                times.len(),
                scheme.m()
            )));
        }
        if times.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::Domain("failure times must be positive and finite".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Unsorted);
        }
        Ok(Self { times, scheme })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn scheme(&self) -> &CensoringScheme {
        &self.scheme
    }
}

/// Draws a progressively censored sample by the uniform-spacings method.
pub fn generate_censored<R: Rng + ?Sized>(
    p: &GlfrParams,
    scheme: &CensoringScheme,
    rng: &mut R,
) -> Result<CensoredSample> {
    p.validate()?;
    let m = scheme.m();
    let rem = scheme.removals();
    // ln(1 - U_i) = sum_{k=1..i} ln V_{m-k+1}, with V_j = W_j^(1/(j + P_{m-j+1} + ... + P_m))
    let mut times = Vec::with_capacity(m);
    let mut ln_surv = 0.0;
    let mut exps = vec![0.0; m + 1];
    let mut acc = 0usize;
    for j in 1..=m {
        acc += rem[m - j];
        exps[j] = (j + acc) as f64;
    }
    for i in 1..=m {
        let j = m - i + 1;
        let w: f64 = Open01.sample(rng);
        ln_surv += w.ln() / exps[j];
        let u = -ln_surv.exp_m1();
        times.push(quantile_unchecked(p, u));
    }
    CensoredSample::new(times, scheme.clone())
}

/// Applies a scheme to a complete sample: the smallest survivor fails next and
/// `P_i` survivors chosen uniformly at random are withdrawn after it.
pub fn censor_observed<R: Rng + ?Sized>(data: &[f64], scheme: &CensoringScheme, rng: &mut R) -> Result<CensoredSample> {
    if data.len() != scheme.n() {
        return Err(Error::InvalidScheme(format!(
            "scheme expects n = {} items, data has {}",
            scheme.n(),
            data.len()
        )));
    }
    let mut survivors = data.to_vec();
    survivors.sort_by(f64::total_cmp);
    survivors.reverse();
    let mut times = Vec::with_capacity(scheme.m());
    for &p in scheme.removals() {
        times.push(survivors.pop().expect("scheme sizes are consistent"));
        for _ in 0..p {
            let k = rng.random_range(0..survivors.len());
            survivors.remove(k);
        }
    }
    CensoredSample::new(times, scheme.clone())
}

fn check_scale(a: f64, b: f64) -> Result<()> {
    if !(a >= 0.0 && b >= 0.0) || (a == 0.0 && b == 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParams(format!("invalid scale ({a}, {b})")));
    }
    Ok(())
}

/// Per-observation pieces of one side at a fixed scale.
struct Side<'a> {
    /// `ln(1 - exp(-H(x_i)))`, all negative
    l: Vec<f64>,
    removals: &'a [usize],
    /// `sum ln(a + b x_i) - sum H(x_i)`
    base: f64,
}

impl<'a> Side<'a> {
    fn new(s: &'a CensoredSample, a: f64, b: f64) -> Result<Self> {
        let mut l = Vec::with_capacity(s.times.len());
        let mut base = 0.0;
        for &x in &s.times {
            let h = x * (a + 0.5 * b * x);
            let li = log1mexp(h);
            if !(li < 0.0) || !li.is_finite() {
                return Err(Error::DegenerateSample(format!("log transform of {x} is {li}")));
            }
            l.push(li);
            base += (a + b * x).ln() - h;
        }
        Ok(Self {
            l,
            removals: s.scheme.removals(),
            base,
        })
    }

    fn m(&self) -> f64 {
        self.l.len() as f64
    }

    fn loglik(&self, shape: f64) -> f64 {
        let mut v = self.m() * shape.ln() + self.base;
        for (&li, &p) in self.l.iter().zip(self.removals) {
            v += (shape - 1.0) * li;
            if p > 0 {
                v += p as f64 * log1mexp(-shape * li);
            }
        }
        v
    }

    fn score(&self, shape: f64) -> f64 {
        let mut v = self.m() / shape;
        for (&li, &p) in self.l.iter().zip(self.removals) {
            v += li;
            if p > 0 {
                v -= p as f64 * li * odds_weight(-shape * li);
            }
        }
        v
    }

    fn shape_hat(&self, cfg: &RootConfig) -> Result<f64> {
        let t: f64 = self.l.iter().sum();
        let guess = -self.m() / t;
        if !self.removals.iter().any(|&p| p > 0) {
            return Ok(guess);
        }
        // the score is strictly decreasing and the removal terms are positive,
        // so the root lies at or above the complete-data estimate
        let f = |s: f64| self.score(s);
        let bracket = grow_bracket(&f, guess, 2.0, 200)?;
        find_root(f, bracket, cfg)
    }
}

/// Censored log-likelihood without the normalizing constant.
pub fn censored_loglik(a: f64, b: f64, alpha: f64, beta: f64, xs: &CensoredSample, ys: &CensoredSample) -> Result<f64> {
    check_scale(a, b)?;
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "shapes must be positive, got ({alpha}, {beta})"
        )));
    }
    Ok(Side::new(xs, a, b)?.loglik(alpha) + Side::new(ys, a, b)?.loglik(beta))
}

/// Partial derivatives of the censored log-likelihood in the two shapes.
pub fn censored_score(
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
    xs: &CensoredSample,
    ys: &CensoredSample,
) -> Result<(f64, f64)> {
    check_scale(a, b)?;
    Ok((Side::new(xs, a, b)?.score(alpha), Side::new(ys, a, b)?.score(beta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensoredFit {
    pub a: f64,
    pub b: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub r_hat: f64,
    pub loglik: f64,
}

/// Shape MLEs at a known common scale `(a, b)`.
pub fn censored_mle(xs: &CensoredSample, ys: &CensoredSample, scale: (f64, f64)) -> Result<CensoredFit> {
    let (a, b) = scale;
    check_scale(a, b)?;
    let cfg = RootConfig::default();
    let (sx, sy) = (Side::new(xs, a, b)?, Side::new(ys, a, b)?);
    let alpha_hat = sx.shape_hat(&cfg)?;
    let beta_hat = sy.shape_hat(&cfg)?;
    Ok(CensoredFit {
        a,
        b,
        alpha_hat,
        beta_hat,
        r_hat: alpha_hat / (alpha_hat + beta_hat),
        loglik: sx.loglik(alpha_hat) + sy.loglik(beta_hat),
    })
}

/// Scale and shapes all unknown: maximizes the censored likelihood over
/// `(ln a, ln b)` with the shapes profiled out by their score roots.
pub fn censored_mle_unknown(xs: &CensoredSample, ys: &CensoredSample, init: Option<(f64, f64)>) -> Result<CensoredFit> {
    let (a0, b0) = match init {
        Some(s) => {
            check_scale(s.0, s.1)?;
            (s.0.max(1e-12), s.1.max(1e-12))
        }
        None => {
            let all: Vec<f64> = xs.times.iter().chain(&ys.times).copied().collect();
            let mean = all.iter().sum::<f64>() / all.len() as f64;
            let mean2 = all.iter().map(|v| v * v).sum::<f64>() / all.len() as f64;
            (1.0 / mean, 1.0 / mean2)
        }
    };
    let profile = |t: &[f64]| -> Option<CensoredFit> { censored_mle(xs, ys, (t[0].exp(), t[1].exp())).ok() };
    let neg = |t: &[f64]| profile(t).map_or(f64::INFINITY, |f| -f.loglik);
    let start = [a0.ln(), b0.ln()];
    let mut best = nelder_mead(neg, &start, &[0.5, 0.5], 1e-10, 5000);
    for _ in 0..2 {
        best = nelder_mead(neg, &best.x, &[0.05, 0.05], 1e-12, 5000);
    }
    if !best.value.is_finite() {
        return Err(Error::NonConvergence(
            "censored likelihood is not finite near the start".into(),
        ));
    }
    profile(&best.x).ok_or_else(|| Error::NonConvergence("profile failed at the optimum".into()))
}

/// Delta-method interval for `R` from the finite-difference observed
/// information of the censored likelihood in `(alpha, beta)`. Endpoints are
/// clipped to `[0, 1]`.
pub fn censored_ci(xs: &CensoredSample, ys: &CensoredSample, fit: &CensoredFit, level: f64) -> Result<Interval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidProbability(level));
    }
    let (sx, sy) = (Side::new(xs, fit.a, fit.b)?, Side::new(ys, fit.a, fit.b)?);
    let ll = |al: f64, be: f64| sx.loglik(al) + sy.loglik(be);
    let (al, be) = (fit.alpha_hat, fit.beta_hat);
    let (ha, hb) = (1e-3 * al, 1e-3 * be);
    let c = ll(al, be);
    let i11 = -(ll(al + ha, be) - 2.0 * c + ll(al - ha, be)) / (ha * ha);
    let i22 = -(ll(al, be + hb) - 2.0 * c + ll(al, be - hb)) / (hb * hb);
    let i12 =
        -(ll(al + ha, be + hb) - ll(al + ha, be - hb) - ll(al - ha, be + hb) + ll(al - ha, be - hb)) / (4.0 * ha * hb);
    let det = i11 * i22 - i12 * i12;
    if !(i11 > 0.0 && det > 0.0) || !det.is_finite() {
        return Err(Error::NotPositiveDefinite);
    }
    let s = al + be;
    let (g1, g2) = (be / (s * s), -al / (s * s));
    let var = (g1 * g1 * i22 - 2.0 * g1 * g2 * i12 + g2 * g2 * i11) / det;
    let z = normal_quantile(0.5 + 0.5 * level)?;
    let half = z * var.sqrt();
    Interval::new((fit.r_hat - half).max(0.0), (fit.r_hat + half).min(1.0), level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::common::loglik_common;
    use crate::glfr::{cdf, sample};
    use crate::known::mle_known;
    use crate::numerics::{beta_inc, kolmogorov_sf, ks_test};
    use crate::stream::seeded;

    fn gp(a: f64, b: f64, s: f64) -> GlfrParams {
        GlfrParams::new(a, b, s).unwrap()
    }

    fn scheme(kind: SchemeKind, n: usize, m: usize) -> CensoringScheme {
        CensoringScheme::of_kind(kind, n, m).unwrap()
    }

    /// Direct transcription of the censored log-likelihood, term by term.
    #[allow(clippy::too_many_arguments)]
    fn transcribed(a: f64, b: f64, al: f64, be: f64, x: &[f64], p: &[usize], y: &[f64], q: &[usize]) -> f64 {
        let h = |t: f64| a * t + b / 2.0 * t * t;
        let g = |t: f64| 1.0 - (-h(t)).exp();
        let mut v = x.len() as f64 * al.ln() + y.len() as f64 * be.ln();
        v += x.iter().map(|&t| (a + b * t).ln()).sum::<f64>();
        v += y.iter().map(|&t| (a + b * t).ln()).sum::<f64>();
        v += (al - 1.0) * x.iter().map(|&t| g(t).ln()).sum::<f64>();
        v += (be - 1.0) * y.iter().map(|&t| g(t).ln()).sum::<f64>();
        v += x
            .iter()
            .zip(p)
            .map(|(&t, &k)| k as f64 * (1.0 - g(t).powf(al)).ln())
            .sum::<f64>();
        v -= x.iter().map(|&t| h(t)).sum::<f64>();
        v += y
            .iter()
            .zip(q)
            .map(|(&t, &k)| k as f64 * (1.0 - g(t).powf(be)).ln())
            .sum::<f64>();
        v -= y.iter().map(|&t| h(t)).sum::<f64>();
        v
    }

    fn two_sample_ks(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (n, m) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < a.len() && j < b.len() {
            let t = a[i].min(b[j]);
            while i < a.len() && a[i] <= t {
                i += 1;
            }
            while j < b.len() && b[j] <= t {
                j += 1;
            }
            d = d.max((i as f64 / n - j as f64 / m).abs());
        }
        let ne = n * m / (n + m);
        kolmogorov_sf(d * (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()))
    }

    #[test]
    fn scheme_kinds() {
        assert_eq!(scheme(SchemeKind::Type2, 10, 5).removals(), &[0, 0, 0, 0, 5]);
        assert_eq!(scheme(SchemeKind::Type3, 20, 5).removals(), &[15, 0, 0, 0, 0]);
        assert_eq!(scheme(SchemeKind::Type4, 30, 15).removals(), &[1; 15]);
        assert_eq!(scheme(SchemeKind::Type4, 17, 5).removals(), &[3, 3, 2, 2, 2]);
        assert_eq!(scheme(SchemeKind::Type4, 5, 5).removals(), &[0; 5]);
        assert!(CensoringScheme::of_kind(SchemeKind::Type2, 4, 5).is_err());
        assert!(CensoringScheme::of_kind(SchemeKind::Type2, 4, 0).is_err());
        assert!(CensoringScheme::new(10, vec![1, 1]).is_err());
        assert_eq!("IV".parse::<SchemeKind>().unwrap(), SchemeKind::Type4);
        assert_eq!("type3".parse::<SchemeKind>().unwrap(), SchemeKind::Type3);
        assert!("type5".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn sample_validation() {
        let s = scheme(SchemeKind::Type2, 4, 2);
        assert!(CensoredSample::new(vec![1.0, 2.0], s.clone()).is_ok());
        assert_eq!(CensoredSample::new(vec![2.0, 1.0], s.clone()), Err(Error::Unsorted));
        assert!(CensoredSample::new(vec![1.0, 1.0], s.clone()).is_err());
        assert!(CensoredSample::new(vec![0.0, 1.0], s.clone()).is_err());
        assert!(CensoredSample::new(vec![1.0], s).is_err());
    }

    #[test]
    fn generated_samples_strictly_increase() {
        let p = gp(1.0, 1.5, 1.5);
        for (k, kind) in [SchemeKind::Type2, SchemeKind::Type3, SchemeKind::Type4]
            .into_iter()
            .enumerate()
        {
            let s = scheme(kind, 30, 15);
            for rep in 0..1000 {
                let c = generate_censored(&p, &s, &mut seeded(7 + k as u64, rep)).unwrap();
                assert!(c.times().windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn zero_removals_give_order_statistics() {
        // the k-th of n i.i.d. uniforms is Beta(k, n - k + 1)
        let p = gp(0.5, 2.0, 0.8);
        let (n, k) = (8usize, 3usize);
        let s = CensoringScheme::complete(n).unwrap();
        let mut xs: Vec<f64> = (0..5000)
            .map(|r| generate_censored(&p, &s, &mut seeded(11, r)).unwrap().times()[k - 1])
            .collect();
        xs.sort_by(f64::total_cmp);
        let ks = ks_test(&xs, |x| beta_inc(k as f64, (n - k + 1) as f64, cdf(&p, x).unwrap())).unwrap();
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn single_failure_is_a_minimum() {
        let p = gp(1.0, 1.5, 1.5);
        let n = 12;
        let s = CensoringScheme::new(n, vec![n - 1]).unwrap();
        let mut xs: Vec<f64> = (0..5000)
            .map(|r| generate_censored(&p, &s, &mut seeded(13, r)).unwrap().times()[0])
            .collect();
        xs.sort_by(f64::total_cmp);
        let ks = ks_test(&xs, |x| 1.0 - (1.0 - cdf(&p, x).unwrap()).powi(n as i32)).unwrap();
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn generation_matches_removal_simulation() {
        // drawing n i.i.d. lifetimes and withdrawing survivors at random must
        // give the same law as the spacings construction
        let p = gp(1.0, 1.5, 1.5);
        for kind in [SchemeKind::Type3, SchemeKind::Type4] {
            let s = scheme(kind, 12, 4);
            let reps = 4000;
            let fast: Vec<f64> = (0..reps)
                .map(|r| generate_censored(&p, &s, &mut seeded(17, r)).unwrap().times()[3])
                .collect();
            let slow: Vec<f64> = (0..reps)
                .map(|r| {
                    let mut rng = seeded(19, r);
                    let data = sample(&p, 12, &mut rng).unwrap();
                    censor_observed(&data, &s, &mut rng).unwrap().times()[3]
                })
                .collect();
            let pv = two_sample_ks(fast, slow);
            assert!(pv > 0.01, "{kind}: {pv}");
        }
    }

    #[test]
    fn censor_observed_is_deterministic_and_sized() {
        let data: Vec<f64> = (1..=20).map(|v| v as f64 * 0.37).collect();
        let s = scheme(SchemeKind::Type4, 20, 6);
        let a = censor_observed(&data, &s, &mut seeded(3, 0)).unwrap();
        let b = censor_observed(&data, &s, &mut seeded(3, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.times().len(), 6);
        assert_eq!(a.times()[0], 0.37);
        let full = censor_observed(&data, &CensoringScheme::complete(20).unwrap(), &mut seeded(3, 1)).unwrap();
        assert_eq!(full.times(), &data[..]);
        assert!(censor_observed(&data[..5], &s, &mut seeded(3, 0)).is_err());
    }

    #[test]
    fn loglik_matches_transcription() {
        for r in 0..50u64 {
            let mut rng = seeded(23, r);
            let a = 0.2 + 2.0 * rng.random::<f64>();
            let b = 3.0 * rng.random::<f64>();
            let al = 0.3 + 3.0 * rng.random::<f64>();
            let be = 0.3 + 3.0 * rng.random::<f64>();
            let sx = scheme(SchemeKind::Type4, 25, 9);
            let sy = scheme(SchemeKind::Type3, 14, 6);
            let xs = generate_censored(&gp(a, b, al), &sx, &mut rng).unwrap();
            let ys = generate_censored(&gp(a, b, be), &sy, &mut rng).unwrap();
            let (ta, tb, tal, tbe) = (a * 1.1, b * 0.9 + 0.1, al * 1.2, be * 0.8);
            let ours = censored_loglik(ta, tb, tal, tbe, &xs, &ys).unwrap();
            let oracle = transcribed(ta, tb, tal, tbe, xs.times(), sx.removals(), ys.times(), sy.removals());
            assert!(
                (ours - oracle).abs() <= 1e-12 * oracle.abs().max(1.0),
                "{ours} vs {oracle}"
            );
        }
    }

    #[test]
    fn zero_removals_reduce_to_complete_loglik() {
        for r in 0..100u64 {
            let mut rng = seeded(29, r);
            let a = 0.1 + 2.0 * rng.random::<f64>();
            let b = 2.0 * rng.random::<f64>();
            let al = 0.3 + 3.0 * rng.random::<f64>();
            let be = 0.3 + 3.0 * rng.random::<f64>();
            let mut x = sample(&gp(a, b, al), 10, &mut rng).unwrap();
            let mut y = sample(&gp(a, b, be), 7, &mut rng).unwrap();
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            let xs = CensoredSample::new(x.clone(), CensoringScheme::complete(10).unwrap()).unwrap();
            let ys = CensoredSample::new(y.clone(), CensoringScheme::complete(7).unwrap()).unwrap();
            let ours = censored_loglik(a, b, al, be, &xs, &ys).unwrap();
            let full = loglik_common([a, b, al, be], &x, &y);
            assert!((ours - full).abs() <= 1e-12 * full.abs().max(1.0), "{ours} vs {full}");
        }
    }

    fn pinned() -> (CensoredSample, CensoredSample) {
        let sx = scheme(SchemeKind::Type4, 30, 15);
        let xs = generate_censored(&gp(1.0, 1.5, 1.5), &sx, &mut seeded(31, 0)).unwrap();
        let ys = generate_censored(&gp(1.0, 1.5, 0.5), &sx, &mut seeded(31, 1)).unwrap();
        (xs, ys)
    }

    #[test]
    fn loglik_peaks_at_the_mle() {
        let (xs, ys) = pinned();
        let fit = censored_mle(&xs, &ys, (1.0, 1.5)).unwrap();
        let at = |al: f64| censored_loglik(1.0, 1.5, al, fit.beta_hat, &xs, &ys).unwrap();
        let top = at(fit.alpha_hat);
        for d in [1e-3, 0.01, 0.1] {
            assert!(at(fit.alpha_hat * (1.0 + d)) < top);
            assert!(at(fit.alpha_hat * (1.0 - d)) < top);
        }
        let (sa, sb) = censored_score(1.0, 1.5, fit.alpha_hat, fit.beta_hat, &xs, &ys).unwrap();
        assert!(sa.abs() < 1e-8 && sb.abs() < 1e-8);
    }

    #[test]
    fn mle_matches_grid_search() {
        let (xs, ys) = pinned();
        let fit = censored_mle(&xs, &ys, (1.0, 1.5)).unwrap();
        let ll = |al: f64, be: f64| censored_loglik(1.0, 1.5, al, be, &xs, &ys).unwrap();
        let (mut ca, mut cb, mut half) = (1.0, 1.0, 0.99);
        for _ in 0..40 {
            let mut best = (f64::NEG_INFINITY, ca, cb);
            for i in 0..=20 {
                for j in 0..=20 {
                    let al = ca + half * (i as f64 / 10.0 - 1.0);
                    let be = cb + half * (j as f64 / 10.0 - 1.0);
                    if al > 0.0 && be > 0.0 {
                        let v = ll(al, be);
                        if v > best.0 {
                            best = (v, al, be);
                        }
                    }
                }
            }
            (ca, cb) = (best.1, best.2);
            half *= 0.5;
        }
        assert!((fit.alpha_hat - ca).abs() < 1e-4, "{} vs {ca}", fit.alpha_hat);
        assert!((fit.beta_hat - cb).abs() < 1e-4, "{} vs {cb}", fit.beta_hat);
    }

    #[test]
    fn zero_removals_reduce_to_known_scale_mle() {
        let p = gp(1.0, 1.5, 1.5);
        let mut x = sample(&p, 20, &mut seeded(37, 0)).unwrap();
        let mut y = sample(&p.with_shape(0.5).unwrap(), 15, &mut seeded(37, 1)).unwrap();
        x.sort_by(f64::total_cmp);
        y.sort_by(f64::total_cmp);
        let xs = CensoredSample::new(x.clone(), CensoringScheme::complete(20).unwrap()).unwrap();
        let ys = CensoredSample::new(y.clone(), CensoringScheme::complete(15).unwrap()).unwrap();
        let c = censored_mle(&xs, &ys, (1.0, 1.5)).unwrap();
        let k = mle_known(&x, &y, (1.0, 1.5)).unwrap();
        assert!((c.alpha_hat - k.alpha_hat).abs() < 1e-8);
        assert!((c.beta_hat - k.beta_hat).abs() < 1e-8);
        assert!((c.r_hat - k.r_hat).abs() < 1e-8);
    }

    #[test]
    fn score_decreases_in_shape() {
        for r in 0..40u64 {
            let kind = [SchemeKind::Type2, SchemeKind::Type3, SchemeKind::Type4][r as usize % 3];
            let s = scheme(kind, 30, 10);
            let xs = generate_censored(&gp(1.0, 1.5, 1.5), &s, &mut seeded(41, r)).unwrap();
            let side = Side::new(&xs, 1.0, 1.5).unwrap();
            let mut prev = f64::INFINITY;
            for k in 0..400 {
                let shape = 0.01 * 1.03f64.powi(k);
                let v = side.score(shape);
                assert!(v < prev, "seed {r}, shape {shape}");
                prev = v;
            }
        }
    }

    #[test]
    fn interval_contains_estimate_and_shrinks_with_m() {
        let mut widths = Vec::new();
        for m in [5, 10, 15] {
            let mut total = 0.0;
            for rep in 0..200 {
                let s = scheme(SchemeKind::Type4, 30, m);
                let xs = generate_censored(&gp(1.0, 1.5, 1.5), &s, &mut seeded(43, 2 * rep)).unwrap();
                let ys = generate_censored(&gp(1.0, 1.5, 0.5), &s, &mut seeded(43, 2 * rep + 1)).unwrap();
                let fit = censored_mle(&xs, &ys, (1.0, 1.5)).unwrap();
                let ci = censored_ci(&xs, &ys, &fit, 0.95).unwrap();
                assert!(ci.contains(fit.r_hat));
                total += ci.width();
            }
            widths.push(total / 200.0);
        }
        assert!(widths[0] > widths[1] && widths[1] > widths[2], "{widths:?}");
    }

    #[test]
    fn interval_coverage() {
        let s = scheme(SchemeKind::Type4, 30, 15);
        let reps = 1000;
        let mut hits = 0;
        for rep in 0..reps {
            let xs = generate_censored(&gp(1.0, 1.5, 1.5), &s, &mut seeded(47, 2 * rep)).unwrap();
            let ys = generate_censored(&gp(1.0, 1.5, 0.5), &s, &mut seeded(47, 2 * rep + 1)).unwrap();
            let fit = censored_mle(&xs, &ys, (1.0, 1.5)).unwrap();
            hits += usize::from(censored_ci(&xs, &ys, &fit, 0.95).unwrap().contains(0.75));
        }
        let cp = hits as f64 / reps as f64;
        assert!((cp - 0.95).abs() < 0.05, "{cp}");
    }

    #[test]
    fn unknown_scale_recovers_known_fit_at_its_optimum() {
        let (xs, ys) = pinned();
        let fit = censored_mle_unknown(&xs, &ys, Some((1.0, 1.5))).unwrap();
        let at_truth = censored_mle(&xs, &ys, (1.0, 1.5)).unwrap();
        assert!(fit.loglik >= at_truth.loglik - 1e-9);
        let again = censored_mle(&xs, &ys, (fit.a, fit.b)).unwrap();
        assert!((again.alpha_hat - fit.alpha_hat).abs() < 1e-12);
        // no direction in (a, b) improves on the returned point
        for (da, db) in [(1.01, 1.0), (0.99, 1.0), (1.0, 1.01), (1.0, 0.99)] {
            let nb = censored_mle(&xs, &ys, (fit.a * da, fit.b * db)).unwrap();
            assert!(nb.loglik <= fit.loglik + 1e-9);
        }
        assert!(fit.r_hat > 0.0 && fit.r_hat < 1.0);
    }

    #[test]
    fn bad_inputs() {
        let (xs, ys) = pinned();
        assert!(censored_loglik(-1.0, 1.0, 1.0, 1.0, &xs, &ys).is_err());
        assert!(censored_loglik(1.0, 1.0, 0.0, 1.0, &xs, &ys).is_err());
        assert!(censored_mle(&xs, &ys, (0.0, 0.0)).is_err());
        let fit = censored_mle(&xs, &ys, (1.0, 1.5)).unwrap();
        assert!(censored_ci(&xs, &ys, &fit, 1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn schemes_sum_to_withdrawn(n in 1usize..200, frac in 0.0f64..1.0, k in 0usize..3) {
                let m = 1 + ((n - 1) as f64 * frac) as usize;
                let kind = [SchemeKind::Type2, SchemeKind::Type3, SchemeKind::Type4][k];
                let s = CensoringScheme::of_kind(kind, n, m).unwrap();
                prop_assert_eq!(s.m(), m);
                prop_assert_eq!(s.removals().iter().sum::<usize>(), n - m);
                if kind == SchemeKind::Type4 {
                    let (lo, hi) = (s.removals().iter().min().unwrap(), s.removals().iter().max().unwrap());
                    prop_assert!(hi - lo <= 1);
                    prop_assert!(s.removals().windows(2).all(|w| w[0] >= w[1]));
                }
            }
        }
    }
}
