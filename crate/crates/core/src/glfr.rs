//! The generalized linear failure rate distribution GLFR(a, b, alpha).
//!
//! With cumulative hazard of the base law `H(x) = a x + b x^2 / 2`, the
//! distribution function is `F(x) = (1 - exp(-H(x)))^alpha`. Setting `b = 0`
//! gives the generalized exponential law and `a = 0` the generalized Rayleigh
//! law; `alpha = 1` recovers the linear failure rate law.

use rand::distr::{Distribution, Open01};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of a GLFR law: scales `a` (per unit x) and `b` (per unit x^2),
/// and shape `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlfrParams {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
}

/// `ln(1 - exp(-h))` for `h > 0`, accurate at both ends.
#[inline]
pub fn log1mexp(h: f64) -> f64 {
    if h <= std::f64::consts::LN_2 {
        (-(-h).exp_m1()).ln()
    } else {
        (-(-h).exp()).ln_1p()
    }
}

/// `exp(-h) / (1 - exp(-h))`, the factor that appears in every score term.
#[inline]
pub fn odds_weight(h: f64) -> f64 {
    1.0 / h.exp_m1()
}

impl GlfrParams {
    pub fn new(a: f64, b: f64, alpha: f64) -> Result<Self> {
        let p = Self { a, b, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.a.is_finite() && self.b.is_finite() && self.alpha.is_finite();
        if !finite || self.alpha <= 0.0 || self.a < 0.0 || self.b < 0.0 {
            return Err(Error::InvalidParams(format!(
                "need a >= 0, b >= 0, alpha > 0; got ({}, {}, {})",
                self.a, self.b, self.alpha
            )));
        }
        if self.a == 0.0 && self.b == 0.0 {
            return Err(Error::InvalidParams("a and b cannot both be zero".into()));
        }
        Ok(())
    }

    /// Same scales, different shape.
    pub fn with_shape(&self, alpha: f64) -> Result<Self> {
        Self::new(self.a, self.b, alpha)
    }

    /// Base cumulative hazard `a x + b x^2 / 2`.
    #[inline]
    pub fn cum_hazard(&self, x: f64) -> f64 {
        x * (self.a + 0.5 * self.b * x)
    }

    /// `ln F(x)`; `-inf` at and below zero.
    pub fn ln_cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.alpha * log1mexp(self.cum_hazard(x))
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        if x == 0.0 {
            return self.pdf_at_zero().ln();
        }
        let h = self.cum_hazard(x);
        self.alpha.ln() + (self.a + self.b * x).ln() - h + (self.alpha - 1.0) * log1mexp(h)
    }

    fn pdf_at_zero(&self) -> f64 {
        // near zero F(x) ~ (a x)^alpha, or (b x^2 / 2)^alpha when a = 0
        if self.alpha < 1.0 {
            f64::INFINITY
        } else if self.alpha > 1.0 {
            0.0
        } else {
            self.a
        }
    }

    /// ln of the survival function `1 - F(x)`.
    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let ln_f = self.ln_cdf(x);
        if ln_f > -std::f64::consts::LN_2 {
            (-ln_f.exp_m1()).ln()
        } else {
            (-ln_f.exp()).ln_1p()
        }
    }
}

/// Density at `x`; zero for `x < 0`.
pub fn pdf(p: &GlfrParams, x: f64) -> Result<f64> {
    p.validate()?;
    if x < 0.0 {
        return Ok(0.0);
    }
    if x == 0.0 {
        return Ok(p.pdf_at_zero());
    }
    Ok(p.ln_pdf(x).exp())
}

/// Distribution function `(1 - exp(-(a x + b x^2/2)))^alpha`.
pub fn cdf(p: &GlfrParams, x: f64) -> Result<f64> {
    p.validate()?;
    Ok(p.ln_cdf(x).exp().clamp(0.0, 1.0))
}

/// Inverse distribution function.
pub fn quantile(p: &GlfrParams, u: f64) -> Result<f64> {
    p.validate()?;
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidProbability(u));
    }
    Ok(quantile_unchecked(p, u))
}

pub(crate) fn quantile_unchecked(p: &GlfrParams, u: f64) -> f64 {
    // c = -ln(1 - u^(1/alpha)) solves H(x) = c
    let ln_v = u.ln() / p.alpha;
    let c = if ln_v < -std::f64::consts::LN_2 {
        -(-ln_v.exp()).ln_1p()
    } else {
        -(-ln_v.exp_m1()).ln()
    };
    if p.b > 0.0 {
        2.0 * c / (p.a + (p.a * p.a + 2.0 * p.b * c).sqrt())
    } else {
        c / p.a
    }
}

/// `n` i.i.d. draws by inverse transform.
pub fn sample<R: Rng + ?Sized>(p: &GlfrParams, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    p.validate()?;
    if n == 0 {
        return Err(Error::InvalidParams("sample size must be at least 1".into()));
    }
    Ok((0..n)
        .map(|_| {
            let u: f64 = Open01.sample(rng);
            quantile_unchecked(p, u)
        })
        .collect())
}

/// Hazard rate `f(x) / (1 - F(x))`.
pub fn hazard(p: &GlfrParams, x: f64) -> Result<f64> {
    p.validate()?;
    if x < 0.0 {
        return Ok(0.0);
    }
    if x == 0.0 {
        return Ok(p.pdf_at_zero());
    }
    let ln_sf = p.ln_sf(x);
    if !ln_sf.is_finite() {
        return Err(Error::SaturatedCdf(x));
    }
    Ok((p.ln_pdf(x) - ln_sf).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad;
    use crate::stream::seeded;

    fn gp(a: f64, b: f64, alpha: f64) -> GlfrParams {
        GlfrParams::new(a, b, alpha).unwrap()
    }

    #[test]
    fn exponential_density_at_zero() {
        assert_eq!(pdf(&gp(1.0, 0.0, 1.0), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(GlfrParams::new(0.0, 0.0, 1.0).is_err());
        assert!(GlfrParams::new(1.0, 0.0, 0.0).is_err());
        assert!(GlfrParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(GlfrParams::new(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn pdf_integrates_to_one() {
        let p = gp(1.0, 2.0, 1.5);
        let total = quad(|x| pdf(&p, x).unwrap(), 0.0, f64::INFINITY).unwrap();
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    #[test]
    fn pdf_matches_cdf_derivative() {
        let p = gp(1.0, 0.4, 1.5);
        let h = 1e-5;
        let fd = (cdf(&p, 1.0 + h).unwrap() - cdf(&p, 1.0 - h).unwrap()) / (2.0 * h);
        assert!((pdf(&p, 1.0).unwrap() - fd).abs() < 1e-6);
    }

    #[test]
    fn cdf_values() {
        let p = gp(1.0, 2.0, 1.0);
        assert_eq!(cdf(&p, 0.0).unwrap(), 0.0);
        // x + x^2 = ln 2
        let x = (-1.0 + (1.0 + 4.0 * std::f64::consts::LN_2).sqrt()) / 2.0;
        assert!((cdf(&p, x).unwrap() - 0.5).abs() < 1e-14);
        let p = gp(1.0, 0.4, 1.5);
        let q = quad(|t| pdf(&p, t).unwrap(), 0.0, 1.0).unwrap();
        assert!((cdf(&p, 1.0).unwrap() - q).abs() < 1e-8);
    }

    #[test]
    fn quantile_round_trip_and_special_cases() {
        let p = gp(1.0, 2.0, 1.5);
        // x = 5 sits where 1 - F is ~1e-13, below what a double u can resolve
        for x in [1e-6, 0.1, 1.0, 2.0] {
            let u = cdf(&p, x).unwrap();
            let back = quantile(&p, u).unwrap();
            assert!(((back - x) / x).abs() < 1e-10, "{x} -> {back}");
        }
        let e = gp(1.0, 0.0, 1.0);
        let q = quantile(&e, 1.0 - (-1.0f64).exp()).unwrap();
        assert!((q - 1.0).abs() < 1e-14);
        assert!(quantile(&e, 0.0).is_err());
        assert!(quantile(&e, 1.0).is_err());
        // pure generalized Rayleigh branch
        let r = gp(0.0, 2.0, 2.0);
        let q = quantile(&r, 0.3).unwrap();
        assert!((cdf(&r, q).unwrap() - 0.3).abs() < 1e-14);
    }

    #[test]
    fn quantile_agrees_with_bisection() {
        let p = gp(1.0, 2.0, 1.5);
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(&p, mid).unwrap() < 0.9 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((quantile(&p, 0.9).unwrap() - 0.5 * (lo + hi)).abs() < 1e-8);
    }

    #[test]
    fn hazard_shapes() {
        let e = gp(0.7, 0.0, 1.0);
        for x in [0.0, 0.3, 2.0, 9.0] {
            assert!((hazard(&e, x).unwrap() - 0.7).abs() < 1e-10);
        }
        let lfr = gp(1.0, 2.0, 1.0);
        let grid: Vec<f64> = (0..200).map(|i| 0.02 * i as f64).collect();
        let h: Vec<f64> = grid.iter().map(|&x| hazard(&lfr, x).unwrap()).collect();
        assert!(h.windows(2).all(|w| w[1] >= w[0] - 1e-12));

        // alpha < 1, b > 0: bathtub, single interior minimum
        let ib = gp(1.0, 2.0, 0.5);
        let grid: Vec<f64> = (1..400).map(|i| 0.005 * i as f64).collect();
        let h: Vec<f64> = grid.iter().map(|&x| hazard(&ib, x).unwrap()).collect();
        let changes = h
            .windows(3)
            .filter(|w| (w[1] - w[0]).signum() != (w[2] - w[1]).signum())
            .count();
        let argmin = h.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(changes, 1);
        assert!(argmin > 0 && argmin < h.len() - 1);
    }

    #[test]
    fn hazard_saturates() {
        let p = gp(1.0, 2.0, 1.0);
        assert!(matches!(hazard(&p, 60.0), Err(Error::SaturatedCdf(_))));
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = gp(1.0, 2.0, 1.5);
        let a = sample(&p, 50, &mut seeded(9, 0)).unwrap();
        let b = sample(&p, 50, &mut seeded(9, 0)).unwrap();
        assert_eq!(a, b);
        assert!(sample(&p, 0, &mut seeded(9, 0)).is_err());
    }

    #[test]
    fn sample_mean_matches_quadrature_mean() {
        let p = gp(1.0, 0.0, 2.0);
        let xs = sample(&p, 5000, &mut seeded(2024, 0)).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4999.0).sqrt();
        let sf_int = quad(|x| 1.0 - cdf(&p, x).unwrap(), 0.0, f64::INFINITY).unwrap();
        assert!((mean - sf_int).abs() < 3.0 * sd / 5000f64.sqrt());
    }

    #[test]
    fn expm1_form_is_accurate_near_zero() {
        let p = gp(1.0, 0.0, 1.0);
        let x = 1e-12;
        let f = cdf(&p, x).unwrap();
        assert!(((f - x) / x).abs() < 1e-10);
    }
}
