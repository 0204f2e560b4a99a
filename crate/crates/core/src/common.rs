//! Inference on `R` when `X ~ GLFR(a, b, alpha)` and `Y ~ GLFR(a, b, beta)`
//! share an unknown scale `(a, b)`.
//!
//! The shapes are profiled out in closed form and the remaining score system
//! in `(a, b)` is solved by damped Newton. Solver coordinates are scaled by
//! the pooled sample mean `s` (`a' = a s`, `b' = b s^2`) so that the finite
//! difference steps and tolerances are meaningful whatever the data units.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glfr::{log1mexp, odds_weight, sample, GlfrParams};
use crate::known::{lindley_estimate, mle_known, posterior_params, GammaPrior, RPosterior};
use crate::numerics::{
    find_root, grow_bracket, nelder_mead, normal_quantile, percentile_sorted, solve_system2, Interval, RootConfig,
};
use crate::stream::seeded;

/// Per-sample sums that appear in the likelihood, its score and its Hessian.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct SideSums {
    pub n: f64,
    /// sum ln(1 - e^{-H})
    pub t: f64,
    /// sum ln(a + b x)
    pub ln_rate: f64,
    /// sum H(x)
    pub h: f64,
    /// sum 1/(a + b x), sum x/(a + b x)
    pub inv: f64,
    pub x_inv: f64,
    /// sum x w, sum x^2 w with w = e^{-H}/(1 - e^{-H})
    pub xw: f64,
    pub x2w: f64,
    pub sum_x: f64,
    pub sum_x2: f64,
}

impl SideSums {
    pub(crate) fn new(data: &[f64], a: f64, b: f64) -> Option<Self> {
        let mut s = SideSums {
            n: data.len() as f64,
            ..Default::default()
        };
        for &x in data {
            let rate = a + b * x;
            let h = a * x + 0.5 * b * x * x;
            if !(rate > 0.0) || !(h > 0.0) {
                return None;
            }
            let w = odds_weight(h);
            s.t += log1mexp(h);
            s.ln_rate += rate.ln();
            s.h += h;
            s.inv += 1.0 / rate;
            s.x_inv += x / rate;
            s.xw += x * w;
            s.x2w += x * x * w;
            s.sum_x += x;
            s.sum_x2 += x * x;
        }
        if !(s.t < 0.0) || !s.t.is_finite() || !s.xw.is_finite() {
            return None;
        }
        Some(s)
    }

    /// Closed-form shape MLE given the scale.
    pub(crate) fn shape_hat(&self) -> f64 {
        -self.n / self.t
    }

    pub(crate) fn loglik(&self, shape: f64) -> f64 {
        self.n * shape.ln() + self.ln_rate - self.h + (shape - 1.0) * self.t
    }

    /// (d/da, d/db) of the log-likelihood at the given shape.
    pub(crate) fn score(&self, shape: f64) -> (f64, f64) {
        (
            self.inv + (shape - 1.0) * self.xw - self.sum_x,
            self.x_inv + 0.5 * (shape - 1.0) * self.x2w - 0.5 * self.sum_x2,
        )
    }

    /// (dT/da, dT/db)
    pub(crate) fn t_grad(&self) -> (f64, f64) {
        (self.xw, 0.5 * self.x2w)
    }
}

/// Profile log-likelihood of a scale shared by several samples, each with its
/// own shape, and its gradient.
fn profile(groups: &[&[f64]], a: f64, b: f64) -> Option<(f64, (f64, f64), Vec<f64>)> {
    let mut value = 0.0;
    let (mut ga, mut gb) = (0.0, 0.0);
    let mut shapes = Vec::with_capacity(groups.len());
    for g in groups {
        let s = SideSums::new(g, a, b)?;
        let shape = s.shape_hat();
        value += s.loglik(shape);
        let (da, db) = s.score(shape);
        ga += da;
        gb += db;
        shapes.push(shape);
    }
    Some((value, (ga, gb), shapes))
}

/// Which face of the parameter quadrant a fit landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `b = 0`: generalized exponential
    BZero,
    /// `a = 0`: generalized Rayleigh
    AZero,
}

/// Profiled fit of a shared scale and per-sample shapes.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ScaleFit {
    pub a: f64,
    pub b: f64,
    pub shapes: Vec<f64>,
    pub loglik: f64,
    pub iterations: usize,
    /// max |score| in solver coordinates
    pub score_norm: f64,
    pub boundary: Option<Boundary>,
}

pub(crate) fn pooled_mean(groups: &[&[f64]]) -> f64 {
    let (sum, n) = groups
        .iter()
        .fold((0.0, 0usize), |(s, n), g| (s + g.iter().sum::<f64>(), n + g.len()));
    sum / n as f64
}

fn check_samples(groups: &[&[f64]], min_len: usize) -> Result<()> {
    for g in groups {
        if g.len() < min_len {
            return Err(Error::DegenerateSample(format!(
                "need at least {min_len} observations, got {}",
                g.len()
            )));
        }
        if let Some(bad) = g.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
            return Err(Error::DegenerateSample(format!("observation {bad} is not positive")));
        }
    }
    Ok(())
}

/// Score tolerance in solver coordinates.
pub fn default_fit_config() -> RootConfig {
    RootConfig {
        abs_tol: 1e-8,
        rel_tol: 1e-10,
        max_iter: 200,
    }
}

/// Maximizes a smooth objective over `a, b >= 0` in scaled coordinates.
/// `grad` returns the gradient in scaled coordinates (None off-domain);
/// `value` the objective. Interior stationary points that are local maxima
/// are preferred; faces are searched when there is none.
struct QuadrantMax<'a> {
    grad: &'a (dyn Fn(f64, f64) -> Option<(f64, f64)> + Sync),
    value: &'a (dyn Fn(f64, f64) -> Option<f64> + Sync),
    cfg: RootConfig,
}

struct QuadrantPoint {
    u: f64,
    v: f64,
    value: f64,
    iterations: usize,
    residual: f64,
    boundary: Option<Boundary>,
}

impl QuadrantMax<'_> {
    fn is_local_max(&self, u: f64, v: f64) -> bool {
        let g = |du: f64, dv: f64| (self.grad)(u + du, v + dv);
        let (hu, hv) = (1e-5f64.max(1e-5 * u), 1e-5f64.max(1e-5 * v));
        let (hu_lo, hv_lo) = (hu.min(0.5 * u), hv.min(0.5 * v));
        let col = |p: Option<(f64, f64)>, m: Option<(f64, f64)>, span: f64| {
            Some(((p?.0 - m?.0) / span, (p?.1 - m?.1) / span))
        };
        let Some(ca) = col(g(hu, 0.0), g(-hu_lo, 0.0), hu + hu_lo) else {
            return false;
        };
        let Some(cb) = col(g(0.0, hv), g(0.0, -hv_lo), hv + hv_lo) else {
            return false;
        };
        let h12 = 0.5 * (ca.1 + cb.0);
        ca.0 < 0.0 && ca.0 * cb.1 - h12 * h12 > 0.0
    }

    /// Best interior local maximum reached by Newton from the given starts.
    fn interior(&self, starts: &[(f64, f64)]) -> Option<QuadrantPoint> {
        let mut best: Option<QuadrantPoint> = None;
        for &(u0, v0) in starts {
            let Ok(sol) = solve_system2(
                |u, v| if u < 0.0 || v < 0.0 { None } else { (self.grad)(u, v) },
                (u0, v0),
                &self.cfg,
            ) else {
                continue;
            };
            let (u, v) = sol.point;
            if u <= 0.0 || v <= 0.0 || !self.is_local_max(u, v) {
                continue;
            }
            let Some(value) = (self.value)(u, v) else { continue };
            if best.as_ref().is_none_or(|b| value > b.value + 1e-9) {
                best = Some(QuadrantPoint {
                    u,
                    v,
                    value,
                    iterations: sol.iterations,
                    residual: sol.residual,
                    boundary: None,
                });
            }
        }
        best
    }

    /// 1-D maximization on a face; `Ok(None)` when the face maximum has a
    /// gradient pointing into the interior.
    fn face(&self, which: Boundary) -> Result<Option<QuadrantPoint>> {
        let along = |t: f64| -> f64 {
            let g = match which {
                Boundary::BZero => (self.grad)(t, 0.0).map(|g| g.0),
                Boundary::AZero => (self.grad)(0.0, t).map(|g| g.1),
            };
            g.unwrap_or(f64::NAN)
        };
        let bracket = grow_bracket(&along, 1.0, 2.0, 80)?;
        let t = find_root(along, bracket, &RootConfig::default())?;
        let (u, v) = match which {
            Boundary::BZero => (t, 0.0),
            Boundary::AZero => (0.0, t),
        };
        let g = (self.grad)(u, v).ok_or_else(|| Error::Domain(format!("face point ({u}, {v})")))?;
        let outward = match which {
            Boundary::BZero => g.1,
            Boundary::AZero => g.0,
        };
        if outward > 0.0 {
            return Ok(None);
        }
        let value = (self.value)(u, v).ok_or_else(|| Error::Domain(format!("face point ({u}, {v})")))?;
        let residual = match which {
            Boundary::BZero => g.0.abs(),
            Boundary::AZero => g.1.abs(),
        };
        Ok(Some(QuadrantPoint {
            u,
            v,
            value,
            iterations: 0,
            residual,
            boundary: Some(which),
        }))
    }

    /// Newton from each start; when none converges to a maximum, a simplex
    /// search on the objective supplies a start close enough for Newton.
    fn interior_robust(&self, starts: &[(f64, f64)]) -> Option<QuadrantPoint> {
        for &start in starts {
            if let Some(p) = self.interior(&[start]) {
                return Some(p);
            }
        }
        let neg = |p: &[f64]| {
            if p[0] < 0.0 || p[1] < 0.0 {
                return f64::INFINITY;
            }
            (self.value)(p[0], p[1]).map_or(f64::INFINITY, |v| -v)
        };
        let seed = starts
            .iter()
            .copied()
            .min_by(|p, q| neg(&[p.0, p.1]).total_cmp(&neg(&[q.0, q.1])))?;
        let m = nelder_mead(
            neg,
            &[seed.0, seed.1],
            &[0.5 * seed.0.max(0.1), 0.5 * seed.1.max(0.1)],
            1e-10,
            4000,
        );
        self.interior(&[(m.x[0], m.x[1])])
    }

    fn run(&self, starts: &[(f64, f64)]) -> Result<QuadrantPoint> {
        if let Some(p) = self.interior_robust(starts) {
            return Ok(p);
        }
        let faces = [self.face(Boundary::BZero), self.face(Boundary::AZero)];
        let collapsed = faces
            .iter()
            .all(|f| matches!(f, Err(Error::NoSignChange { lo, .. }) if *lo < 1e-8));
        let best = faces
            .into_iter()
            .filter_map(|f| f.ok().flatten())
            .max_by(|p, q| p.value.total_cmp(&q.value));
        match best {
            Some(p) => Ok(p),
            None if collapsed => Err(Error::BoundaryCollapse),
            None => Err(Error::NonConvergence(
                "no interior local maximum and no boundary maximum".into(),
            )),
        }
    }
}

fn default_starts(init: Option<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut starts = Vec::with_capacity(4);
    if let Some(p) = init {
        starts.push(p);
    }
    starts.extend([(1.0, 1.0), (0.25, 0.25), (4.0, 4.0)]);
    starts
}

/// Profile MLE of the shared scale; `init` is in data units.
pub(crate) fn fit_scale(groups: &[&[f64]], init: Option<(f64, f64)>, cfg: &RootConfig) -> Result<ScaleFit> {
    check_samples(groups, 2)?;
    let s = pooled_mean(groups);
    let grad = |u: f64, v: f64| {
        let (_, (ga, gb), _) = profile(groups, u / s, v / (s * s))?;
        Some((ga / s, gb / (s * s)))
    };
    let value = |u: f64, v: f64| profile(groups, u / s, v / (s * s)).map(|p| p.0);
    let init = init.map(|(a, b)| (a * s, b * s * s));
    let opt = QuadrantMax {
        grad: &grad,
        value: &value,
        cfg: *cfg,
    };
    let p = opt.run(&default_starts(init))?;
    let (a, b) = (p.u / s, p.v / (s * s));
    let (loglik, _, shapes) =
        profile(groups, a, b).ok_or_else(|| Error::Domain(format!("fit left the domain at ({a}, {b})")))?;
    Ok(ScaleFit {
        a,
        b,
        shapes,
        loglik,
        iterations: p.iterations,
        score_norm: p.residual,
        boundary: p.boundary,
    })
}

/// MLE with unknown common scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommonScaleFit {
    pub a_hat: f64,
    pub b_hat: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub r_hat: f64,
    pub converged: bool,
    pub iterations: usize,
    /// max |score| in mean-scaled coordinates
    pub score_norm: f64,
    pub loglik: f64,
    pub boundary: Option<Boundary>,
}

impl CommonScaleFit {
    pub fn theta(&self) -> [f64; 4] {
        [self.a_hat, self.b_hat, self.alpha_hat, self.beta_hat]
    }
}

pub fn fit_common(x: &[f64], y: &[f64], init: Option<(f64, f64)>, cfg: &RootConfig) -> Result<CommonScaleFit> {
    let f = fit_scale(&[x, y], init, cfg)?;
    let (alpha_hat, beta_hat) = (f.shapes[0], f.shapes[1]);
    Ok(CommonScaleFit {
        a_hat: f.a,
        b_hat: f.b,
        alpha_hat,
        beta_hat,
        r_hat: alpha_hat / (alpha_hat + beta_hat),
        converged: true,
        iterations: f.iterations,
        score_norm: f.score_norm,
        loglik: f.loglik,
        boundary: f.boundary,
    })
}

/// Joint log-likelihood at `theta = (a, b, alpha, beta)`.
pub fn loglik_common(theta: [f64; 4], x: &[f64], y: &[f64]) -> f64 {
    let [a, b, alpha, beta] = theta;
    if !(alpha > 0.0 && beta > 0.0 && a >= 0.0 && b >= 0.0) {
        return f64::NEG_INFINITY;
    }
    match (SideSums::new(x, a, b), SideSums::new(y, a, b)) {
        (Some(sx), Some(sy)) => sx.loglik(alpha) + sy.loglik(beta),
        _ => f64::NEG_INFINITY,
    }
}

/// Analytic score `(d/da, d/db, d/dalpha, d/dbeta)`.
pub fn score_common(theta: [f64; 4], x: &[f64], y: &[f64]) -> Result<[f64; 4]> {
    let [a, b, alpha, beta] = theta;
    let sx = SideSums::new(x, a, b).ok_or_else(|| Error::Domain(format!("scale ({a}, {b})")))?;
    let sy = SideSums::new(y, a, b).ok_or_else(|| Error::Domain(format!("scale ({a}, {b})")))?;
    let (xa, xb) = sx.score(alpha);
    let (ya, yb) = sy.score(beta);
    Ok([xa + ya, xb + yb, sx.n / alpha + sx.t, sy.n / beta + sy.t])
}

/// Observed information in the order (a, b, alpha, beta) and the quantities
/// of the asymptotic normal approximation built from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoMatrix {
    pub i: [[f64; 4]; 4],
    /// `D I D` with `D = diag(n, n, n, m)^{-1/2}`
    pub u: [[f64; 4]; 4],
    /// determinant of `u`
    pub k: f64,
    /// adjugate of `u` (`u^{-1} = adjugate / k`)
    pub adjugate: [[f64; 4]; 4],
    pub a33: f64,
    pub a34: f64,
    pub a44: f64,
    pub sigma2: f64,
    pub p: f64,
    pub n: usize,
    pub m: usize,
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn minor(u: &[[f64; 4]; 4], row: usize, col: usize) -> f64 {
    let mut m = [[0.0; 3]; 3];
    for (ri, r) in (0..4).filter(|&r| r != row).enumerate() {
        for (ci, c) in (0..4).filter(|&c| c != col).enumerate() {
            m[ri][ci] = u[r][c];
        }
    }
    det3(m)
}

/// Adjugate of a 4x4 matrix by cofactors.
pub fn adjugate4(u: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut adj = [[0.0; 4]; 4];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            *v = sign * minor(u, j, i);
        }
    }
    adj
}

/// Determinant of `U` written out for `u34 = u43 = 0`.
fn det_u(u: &[[f64; 4]; 4]) -> f64 {
    let e = |i: usize, j: usize| u[i - 1][j - 1];
    e(1, 1) * e(2, 2) * e(3, 3) * e(4, 4)
        + e(1, 2) * e(2, 3) * e(3, 1) * e(4, 4)
        + e(1, 2) * e(2, 4) * e(3, 3) * e(4, 1)
        + e(1, 3) * e(2, 1) * e(3, 2) * e(4, 4)
        + e(1, 3) * e(2, 4) * e(3, 1) * e(4, 2)
        + e(1, 4) * e(2, 1) * e(3, 3) * e(4, 2)
        + e(1, 4) * e(2, 3) * e(3, 2) * e(4, 1)
        - e(1, 1) * e(2, 3) * e(3, 2) * e(4, 4)
        - e(1, 1) * e(2, 4) * e(3, 3) * e(4, 2)
        - e(1, 2) * e(2, 1) * e(3, 3) * e(4, 4)
        - e(1, 3) * e(2, 2) * e(3, 1) * e(4, 4)
        - e(1, 3) * e(2, 4) * e(3, 2) * e(4, 1)
        - e(1, 4) * e(2, 2) * e(3, 3) * e(4, 1)
        - e(1, 4) * e(2, 3) * e(3, 1) * e(4, 2)
}

fn shape_cofactors(u: &[[f64; 4]; 4]) -> (f64, f64, f64) {
    let e = |i: usize, j: usize| u[i - 1][j - 1];
    let a33 = e(1, 1) * e(2, 2) * e(4, 4) + e(1, 2) * e(2, 4) * e(4, 1) + e(1, 4) * e(2, 1) * e(4, 2)
        - e(1, 1) * e(2, 4) * e(4, 2)
        - e(1, 2) * e(2, 1) * e(4, 4)
        - e(1, 4) * e(2, 2) * e(4, 1);
    let a34 = e(1, 1) * e(2, 4) * e(3, 2) + e(1, 4) * e(2, 2) * e(3, 1)
        - e(1, 2) * e(2, 4) * e(3, 1)
        - e(1, 4) * e(2, 1) * e(3, 2);
    let a44 = e(1, 1) * e(2, 2) * e(3, 3) + e(1, 2) * e(2, 3) * e(3, 1) + e(1, 3) * e(2, 1) * e(3, 2)
        - e(1, 1) * e(2, 3) * e(3, 2)
        - e(1, 2) * e(2, 1) * e(3, 3)
        - e(1, 3) * e(2, 2) * e(3, 1);
    (a33, a34, a44)
}

pub fn observed_info(theta: [f64; 4], x: &[f64], y: &[f64]) -> Result<InfoMatrix> {
    let [a, b, alpha, beta] = theta;
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "shapes must be positive: ({alpha}, {beta})"
        )));
    }
    check_samples(&[x, y], 1)?;
    let mut i = [[0.0f64; 4]; 4];
    for (data, shape, col) in [(x, alpha, 2usize), (y, beta, 3usize)] {
        let (mut s11, mut s12, mut s22, mut w1, mut w2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &v in data {
            let rate = a + b * v;
            let h = a * v + 0.5 * b * v * v;
            if !(rate > 0.0 && h > 0.0) {
                return Err(Error::Domain(format!("scale ({a}, {b}) at observation {v}")));
            }
            let w = odds_weight(h);
            // e^{-H}/(1-e^{-H})^2 = w (1 + w)
            let q = w * (1.0 + w);
            let v2 = v * v;
            s11 += 1.0 / (rate * rate) + (shape - 1.0) * v2 * q;
            s12 += v / (rate * rate) + 0.5 * (shape - 1.0) * v2 * v * q;
            s22 += v2 / (rate * rate) + 0.25 * (shape - 1.0) * v2 * v2 * q;
            w1 += v * w;
            w2 += v2 * w;
        }
        i[0][0] += s11;
        i[0][1] += s12;
        i[1][1] += s22;
        i[0][col] = -w1;
        i[1][col] = -0.5 * w2;
    }
    let (n, m) = (x.len(), y.len());
    i[2][2] = n as f64 / (alpha * alpha);
    i[3][3] = m as f64 / (beta * beta);
    for r in 0..4 {
        for c in 0..r {
            i[r][c] = i[c][r];
        }
    }
    let scale = [
        1.0 / (n as f64).sqrt(),
        1.0 / (n as f64).sqrt(),
        1.0 / (n as f64).sqrt(),
        1.0 / (m as f64).sqrt(),
    ];
    let mut u = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            u[r][c] = scale[r] * i[r][c] * scale[c];
        }
    }
    let k = det_u(&u);
    let (a33, a34, a44) = shape_cofactors(&u);
    let p = n as f64 / m as f64;
    let mut info = InfoMatrix {
        i,
        u,
        k,
        adjugate: adjugate4(&u),
        a33,
        a34,
        a44,
        sigma2: f64::NAN,
        p,
        n,
        m,
    };
    info.sigma2 = asymptotic_variance(&info, alpha, beta).unwrap_or(f64::NAN);
    Ok(info)
}

impl InfoMatrix {
    /// Leading principal minors of `i`, all positive at a proper maximum.
    pub fn leading_minors(&self) -> [f64; 4] {
        let m = &self.i;
        let d1 = m[0][0];
        let d2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let d3 = det3([
            [m[0][0], m[0][1], m[0][2]],
            [m[1][0], m[1][1], m[1][2]],
            [m[2][0], m[2][1], m[2][2]],
        ]);
        let d4 = (0..4)
            .map(|c| {
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * minor(m, 0, c)
            })
            .sum();
        [d1, d2, d3, d4]
    }
}

/// Asymptotic variance of `sqrt(n) (R_hat - R)`.
pub fn asymptotic_variance(info: &InfoMatrix, alpha: f64, beta: f64) -> Result<f64> {
    // det / product of the diagonal is invariant under diagonal rescaling
    let diag: f64 = (0..4).map(|i| info.u[i][i].abs()).product();
    if !info.k.is_finite() || !(diag > 0.0) || info.k.abs() <= 1e-14 * diag {
        return Err(Error::SingularMatrix);
    }
    let sp = info.p.sqrt();
    let s = alpha + beta;
    let sigma2 = (beta * beta * info.a33 - 2.0 * sp * alpha * beta * info.a34 + alpha * alpha * info.p * info.a44)
        / (info.k * s.powi(4));
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(sigma2)
}

/// Normal-approximation interval `r_hat -/+ z sqrt(sigma2 / n)`; the flag
/// reports whether it was clipped to [0, 1].
pub fn asymptotic_ci(r_hat: f64, sigma2: f64, n: usize, level: f64) -> Result<(Interval, bool)> {
    if !(sigma2 > 0.0) || n == 0 {
        return Err(Error::Domain(format!(
            "asymptotic interval needs sigma2 > 0 and n > 0 ({sigma2}, {n})"
        )));
    }
    let z = normal_quantile(0.5 + 0.5 * level)?;
    let half = z * (sigma2 / n as f64).sqrt();
    let (lo, hi) = (r_hat - half, r_hat + half);
    let clipped = lo < 0.0 || hi > 1.0;
    Ok((Interval::new(lo.max(0.0), hi.min(1.0), level)?, clipped))
}

/// Percentile bootstrap output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub r_hat: f64,
    pub r_star_mean: f64,
    pub interval: Interval,
    /// resample fits that failed and were redrawn
    pub failures: usize,
    /// sorted replicate estimates
    pub replicates: Vec<f64>,
}

impl BootstrapResult {
    /// Percentile interval at another level from the same replicates.
    pub fn interval_at(&self, level: f64) -> Result<Interval> {
        percentile_interval(&self.replicates, level)
    }
}

fn percentile_interval(sorted: &[f64], level: f64) -> Result<Interval> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidProbability(level));
    }
    let tail = 0.5 * (1.0 - level);
    Interval::new(
        percentile_sorted(sorted, tail),
        percentile_sorted(sorted, 1.0 - tail),
        level,
    )
}

const BOOT_MAX_ATTEMPTS: u64 = 50;

/// Parametric percentile bootstrap. With `scale_known` only the shapes are
/// refitted; otherwise the full common-scale model is.
pub fn bootstrap_ci<R: RngCore + ?Sized>(
    x: &[f64],
    y: &[f64],
    scale_known: Option<(f64, f64)>,
    replicates: usize,
    level: f64,
    rng: &mut R,
) -> Result<BootstrapResult> {
    if replicates < 100 {
        return Err(Error::InvalidConfig {
            field: "replicates".into(),
            message: format!("need at least 100, got {replicates}"),
        });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidProbability(level));
    }
    let cfg = default_fit_config();
    let fit = |x: &[f64], y: &[f64]| -> Result<(f64, f64, f64, f64)> {
        match scale_known {
            Some(scale) => {
                let f = mle_known(x, y, scale)?;
                Ok((scale.0, scale.1, f.alpha_hat, f.beta_hat))
            }
            None => {
                let f = fit_common(x, y, None, &cfg)?;
                Ok((f.a_hat, f.b_hat, f.alpha_hat, f.beta_hat))
            }
        }
    };
    let (a, b, alpha, beta) = fit(x, y)?;
    let px = GlfrParams::new(a, b, alpha)?;
    let py = GlfrParams::new(a, b, beta)?;
    let (n, m) = (x.len(), y.len());
    let base = rng.next_u64();
    let outcomes: Vec<(Option<f64>, usize)> = (0..replicates as u64)
        .into_par_iter()
        .map(|i| {
            let mut failed = 0;
            for attempt in 0..BOOT_MAX_ATTEMPTS {
                let mut r = seeded(base, (attempt << 32) | i);
                let draw = sample(&px, n, &mut r).and_then(|xs| Ok((xs, sample(&py, m, &mut r)?)));
                if let Ok((xs, ys)) = draw {
                    if let Ok((_, _, al, be)) = fit(&xs, &ys) {
                        return (Some(al / (al + be)), failed);
                    }
                }
                failed += 1;
            }
            (None, failed)
        })
        .collect();
    let failures: usize = outcomes.iter().map(|o| o.1).sum();
    if failures * 20 > replicates || outcomes.iter().any(|o| o.0.is_none()) {
        return Err(Error::BootstrapFailures {
            failed: failures,
            attempted: replicates + failures,
        });
    }
    let mut reps: Vec<f64> = outcomes.into_iter().filter_map(|o| o.0).collect();
    reps.sort_by(f64::total_cmp);
    let r_star_mean = crate::numerics::neumaier_sum(reps.iter().copied()) / reps.len() as f64;
    Ok(BootstrapResult {
        r_hat: alpha / (alpha + beta),
        r_star_mean,
        interval: percentile_interval(&reps, level)?,
        failures,
        replicates: reps,
    })
}

/// Gamma priors on the four parameters of the common-scale model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommonPriors {
    pub a: GammaPrior,
    pub b: GammaPrior,
    pub alpha: GammaPrior,
    pub beta: GammaPrior,
}

impl CommonPriors {
    /// Vague shapes, Gamma(1e-4, 1e-4); near-flat scales, Gamma(1, 1e-4).
    /// A shape below one on a scale prior sends the posterior mode of
    /// `(a, b)` to the boundary, so the scale priors keep shape one.
    pub fn noninformative() -> Self {
        let flat = GammaPrior { shape: 1.0, rate: 1e-4 };
        Self {
            a: flat,
            b: flat,
            alpha: GammaPrior::noninformative(),
            beta: GammaPrior::noninformative(),
        }
    }

    pub fn uniform(p: GammaPrior) -> Self {
        Self {
            a: p,
            b: p,
            alpha: p,
            beta: p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.a.validate()?;
        self.b.validate()?;
        self.alpha.validate()?;
        self.beta.validate()
    }

    pub fn shapes(&self) -> (GammaPrior, GammaPrior) {
        (self.alpha, self.beta)
    }
}

/// Log marginal posterior of a scale (up to a constant), the shapes having
/// been integrated out against their Gamma priors. `groups` pairs each
/// sample with its shape prior. Prior terms on a or b are skipped on the
/// corresponding face.
pub(crate) fn log_marginal_scale(
    groups: &[(&[f64], GammaPrior)],
    prior_a: GammaPrior,
    prior_b: GammaPrior,
    a: f64,
    b: f64,
) -> Option<(f64, (f64, f64))> {
    let mut value = 0.0;
    let (mut ga, mut gb) = (0.0, 0.0);
    for (data, prior) in groups {
        let s = SideSums::new(data, a, b)?;
        let rate = prior.rate - s.t;
        let shape = s.n + prior.shape;
        let (ta, tb) = s.t_grad();
        value += s.ln_rate - s.h - s.t - shape * rate.ln();
        ga += s.inv - s.sum_x - ta + shape * ta / rate;
        gb += s.x_inv - 0.5 * s.sum_x2 - tb + shape * tb / rate;
    }
    if a > 0.0 {
        value += (prior_a.shape - 1.0) * a.ln() - prior_a.rate * a;
        ga += (prior_a.shape - 1.0) / a - prior_a.rate;
    }
    if b > 0.0 {
        value += (prior_b.shape - 1.0) * b.ln() - prior_b.rate * b;
        gb += (prior_b.shape - 1.0) / b - prior_b.rate;
    }
    Some((value, (ga, gb)))
}

/// Posterior mode of the scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapScale {
    pub a_hat: f64,
    pub b_hat: f64,
    pub log_posterior: f64,
    /// max |gradient| in mean-scaled coordinates
    pub gradient_norm: f64,
    pub boundary: Option<Boundary>,
}

pub(crate) fn map_scale_groups(
    groups: &[(&[f64], GammaPrior)],
    prior_a: GammaPrior,
    prior_b: GammaPrior,
    init: Option<(f64, f64)>,
) -> Result<MapScale> {
    prior_a.validate()?;
    prior_b.validate()?;
    let data: Vec<&[f64]> = groups.iter().map(|g| g.0).collect();
    check_samples(&data, 1)?;
    let s = pooled_mean(&data);
    let grad = |u: f64, v: f64| {
        let (_, (ga, gb)) = log_marginal_scale(groups, prior_a, prior_b, u / s, v / (s * s))?;
        Some((ga / s, gb / (s * s)))
    };
    let value = |u: f64, v: f64| log_marginal_scale(groups, prior_a, prior_b, u / s, v / (s * s)).map(|r| r.0);
    let opt = QuadrantMax {
        grad: &grad,
        value: &value,
        cfg: default_fit_config(),
    };
    // every start runs so that competing local modes are compared
    let starts = default_starts(init.map(|(a, b)| (a * s, b * s * s)));
    let p = match opt.interior(&starts) {
        Some(p) => p,
        None => opt.run(&starts)?,
    };
    Ok(MapScale {
        a_hat: p.u / s,
        b_hat: p.v / (s * s),
        log_posterior: p.value,
        gradient_norm: p.residual,
        boundary: p.boundary,
    })
}

/// Maximum a posteriori estimate of `(a, b)`. Interior local maxima from
/// several starts compete on posterior value; when there is none the best
/// face maximum is returned with its boundary flag.
pub fn map_scale(x: &[f64], y: &[f64], priors: &CommonPriors) -> Result<MapScale> {
    priors.validate()?;
    let init = fit_common(x, y, None, &default_fit_config())
        .ok()
        .map(|f| (f.a_hat, f.b_hat));
    map_scale_groups(&[(x, priors.alpha), (y, priors.beta)], priors.a, priors.b, init)
}

/// Gamma pseudo-posteriors of the shapes with the scale fixed at an
/// estimate.
pub fn pseudo_posterior(
    x: &[f64],
    y: &[f64],
    a_hat: f64,
    b_hat: f64,
    priors: (GammaPrior, GammaPrior),
) -> Result<RPosterior> {
    posterior_params(x, y, (a_hat, b_hat), priors)
}

/// Posterior mode of `R` as the root of `H(r)` on `(1e-12, 1 - 1e-12)`.
pub fn posterior_mode_r(post: &RPosterior) -> Result<f64> {
    let (p1, p2) = (post.alpha.rate, post.beta.rate);
    if !(p1 > 0.0 && p2 > 0.0) {
        return Err(Error::Domain(format!("posterior rates must be positive: ({p1}, {p2})")));
    }
    let a1 = post.alpha.shape - 1.0;
    let a2 = post.beta.shape - 1.0;
    let a3 = post.alpha.shape + post.beta.shape;
    let h = |r: f64| (a1 * (1.0 - r) - a2 * r) * (p1 * r + p2 * (1.0 - r)) - a3 * (p1 - p2) * r * (1.0 - r);
    find_root(h, (1e-12, 1.0 - 1e-12), &RootConfig::default())
}

/// Draws from the marginal posterior of `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub draws: Vec<f64>,
    pub acceptance_rate: f64,
}

impl PosteriorDraws {
    pub fn mean(&self) -> f64 {
        crate::numerics::neumaier_sum(self.draws.iter().copied()) / self.draws.len() as f64
    }

    /// Equal-tailed interval from sample percentiles.
    pub fn interval(&self, level: f64) -> Result<Interval> {
        let mut s = self.draws.clone();
        s.sort_by(f64::total_cmp);
        percentile_interval(&s, level)
    }
}

/// Acceptance-rejection sampling under a uniform envelope at the height of
/// the posterior mode.
pub fn sample_posterior_r<R: Rng + ?Sized>(post: &RPosterior, count: usize, rng: &mut R) -> Result<PosteriorDraws> {
    if count == 0 {
        return Err(Error::InvalidConfig {
            field: "draws".into(),
            message: "need at least one draw".into(),
        });
    }
    let mode = posterior_mode_r(post)?;
    let top = post.density(mode)?;
    let mut draws = Vec::with_capacity(count);
    let mut proposals = 0usize;
    let cap = count.saturating_mul(100_000);
    while draws.len() < count {
        proposals += 1;
        if proposals > cap {
            return Err(Error::NonConvergence("acceptance rate too low".into()));
        }
        let r: f64 = rng.random();
        if r <= 0.0 || r >= 1.0 {
            continue;
        }
        let u: f64 = rng.random();
        if u * top <= post.density(r)? {
            draws.push(r);
        }
    }
    Ok(PosteriorDraws {
        draws,
        acceptance_rate: count as f64 / proposals as f64,
    })
}

/// Lindley approximation with the pseudo-posterior sums.
pub fn lindley_common(n: usize, m: usize, u1: f64, u2: f64, priors: (GammaPrior, GammaPrior)) -> Result<f64> {
    lindley_estimate(n, m, u1, u2, priors)
}

/// Everything the Bayesian pipeline produces for one data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonBayes {
    pub map: MapScale,
    pub posterior: RPosterior,
    pub r_lindley: f64,
    pub r_mode: f64,
    pub r_sample_mean: f64,
    pub credible: Interval,
    pub acceptance_rate: f64,
}

pub fn bayes_common<R: Rng + ?Sized>(
    x: &[f64],
    y: &[f64],
    priors: &CommonPriors,
    draws: usize,
    level: f64,
    rng: &mut R,
) -> Result<CommonBayes> {
    let map = map_scale(x, y, priors)?;
    let posterior = pseudo_posterior(x, y, map.a_hat, map.b_hat, priors.shapes())?;
    let u1 = priors.alpha.rate - posterior.alpha.rate;
    let u2 = priors.beta.rate - posterior.beta.rate;
    let r_lindley = lindley_common(x.len(), y.len(), u1, u2, priors.shapes())?;
    let r_mode = posterior_mode_r(&posterior)?;
    let sampled = sample_posterior_r(&posterior, draws, rng)?;
    Ok(CommonBayes {
        map,
        posterior,
        r_lindley,
        r_mode,
        r_sample_mean: sampled.mean(),
        credible: sampled.interval(level)?,
        acceptance_rate: sampled.acceptance_rate,
    })
}
