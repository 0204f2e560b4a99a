//! Numerical support shared by the estimators: special functions, F and
//! normal quantiles, scalar and planar root finding, adaptive quadrature,
//! a Nelder-Mead minimizer and the one-sample Kolmogorov-Smirnov test.

use serde::{Deserialize, Serialize};
use statrs::function::{beta, erf, gamma};

use crate::error::{Error, Result};

/// A two-sided interval estimate at a given confidence (or credibility) level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, level: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::Domain(format!("interval bounds out of order: [{lo}, {hi}]")));
        }
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::InvalidProbability(level));
        }
        Ok(Self { lo, hi, level })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Stopping rules for iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-14,
            max_iter: 200,
        }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParams(format!("bad solver config {self:?}")));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// special functions

pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(gamma::ln_gamma(x))
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    gamma::ln_gamma(a) + gamma::ln_gamma(b) - gamma::ln_gamma(a + b)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_inc(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    beta::beta_reg(a, b, x)
}

pub fn chi_square_cdf(x: f64, dof: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma::gamma_lr(0.5 * dof, 0.5 * x)
    }
}

pub fn f_cdf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = d1 * x / (d1 * x + d2);
    beta_inc(0.5 * d1, 0.5 * d2, z)
}

/// Inverse of `I_z(a, b)` in `z`, solved by safeguarded Newton iteration.
fn beta_inc_inv(a: f64, b: f64, p: f64) -> Result<f64> {
    let ln_b = ln_beta(a, b);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut z = a / (a + b);
    for _ in 0..300 {
        let resid = beta_inc(a, b, z) - p;
        if resid == 0.0 {
            return Ok(z);
        }
        if resid > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        let ln_dens = (a - 1.0) * z.ln() + (b - 1.0) * (-z).ln_1p() - ln_b;
        let mut next = z - resid / ln_dens.exp();
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - z).abs() <= 4.0 * f64::EPSILON * z.max(f64::MIN_POSITIVE) || hi - lo <= f64::EPSILON * z {
            return Ok(next);
        }
        z = next;
    }
    Err(Error::MaxIterations(300))
}

/// Quantile of the F(d1, d2) distribution.
pub fn f_quantile(p: f64, d1: f64, d2: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::Domain(format!(
            "F degrees of freedom must be positive: ({d1}, {d2})"
        )));
    }
    let (a, b) = (0.5 * d1, 0.5 * d2);
    if p <= 0.5 {
        let z = beta_inc_inv(a, b, p)?;
        Ok(d2 * z / (d1 * (1.0 - z)))
    } else {
        // work with the complementary variable to keep precision in the upper tail
        let w = beta_inc_inv(b, a, 1.0 - p)?;
        Ok(d2 * (1.0 - w) / (d1 * w))
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(if p < 0.5 {
        lower_normal_quantile(p)
    } else if p > 0.5 {
        -lower_normal_quantile(1.0 - p)
    } else {
        0.0
    })
}

fn lower_normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erf::erfc_inv(2.0 * p)
}

// ---------------------------------------------------------------------------
// root finding

/// Brent's method on a sign-changing bracket.
pub fn find_root<F>(f: F, bracket: (f64, f64), cfg: &RootConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let (mut a, mut b) = bracket;
    let (mut fa, mut fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) || fa * fb > 0.0 {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    if fa.abs() <= cfg.abs_tol && fa.abs() <= fb.abs() {
        return Ok(a);
    }
    if fb.abs() <= cfg.abs_tol {
        return Ok(b);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..cfg.max_iter {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * cfg.rel_tol * b.abs() + f64::MIN_POSITIVE;
        let xm = 0.5 * (c - b);
        if fb.abs() <= cfg.abs_tol || xm.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonConvergence(format!("non-finite function value at {b}")));
        }
    }
    Err(Error::MaxIterations(cfg.max_iter))
}

/// Expands `[lo, hi]` geometrically around a positive guess until `f`
/// changes sign, then returns the bracket.
pub fn grow_bracket<F>(f: &F, guess: f64, factor: f64, max_steps: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut lo = guess / factor;
    let mut hi = guess * factor;
    for _ in 0..max_steps {
        let (flo, fhi) = (f(lo), f(hi));
        if flo.is_finite() && fhi.is_finite() && flo * fhi <= 0.0 {
            return Ok((lo, hi));
        }
        if flo.is_finite() && fhi.is_finite() && flo.abs() < fhi.abs() {
            lo /= factor;
        } else {
            hi *= factor;
        }
    }
    Err(Error::NoSignChange { lo, hi })
}

/// Solution of a two-equation system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct System2Solution {
    pub point: (f64, f64),
    /// max(|g1|, |g2|) at `point`
    pub residual: f64,
    pub iterations: usize,
}

fn fd_step(x: f64) -> f64 {
    1e-6f64.max(1e-6 * x.abs())
}

/// Damped Newton iteration for `g(u, v) = 0` with a central-difference
/// Jacobian. `g` returns `None` outside its domain; trial points there are
/// treated like a failed residual decrease and the step is halved.
pub fn solve_system2<G>(g: G, start: (f64, f64), cfg: &RootConfig) -> Result<System2Solution>
where
    G: Fn(f64, f64) -> Option<(f64, f64)>,
{
    cfg.validate()?;
    let eval = |u: f64, v: f64| g(u, v).filter(|r| r.0.is_finite() && r.1.is_finite());
    let (mut u, mut v) = start;
    let mut r = eval(u, v).ok_or_else(|| Error::Domain(format!("start ({u}, {v}) outside domain")))?;
    let max_norm = |r: (f64, f64)| r.0.abs().max(r.1.abs());
    let norm2 = |r: (f64, f64)| r.0 * r.0 + r.1 * r.1;
    for iter in 0..cfg.max_iter {
        if max_norm(r) <= cfg.abs_tol {
            return Ok(System2Solution {
                point: (u, v),
                residual: max_norm(r),
                iterations: iter,
            });
        }
        let col = |du: f64, dv: f64| -> Option<(f64, f64)> {
            let h = if du != 0.0 { du } else { dv };
            match (eval(u + du, v + dv), eval(u - du, v - dv)) {
                (Some(p), Some(m)) => Some(((p.0 - m.0) / (2.0 * h), (p.1 - m.1) / (2.0 * h))),
                (Some(p), None) => Some(((p.0 - r.0) / h, (p.1 - r.1) / h)),
                (None, Some(m)) => Some(((r.0 - m.0) / h, (r.1 - m.1) / h)),
                (None, None) => None,
            }
        };
        let (j11, j21) = col(fd_step(u), 0.0).ok_or(Error::SingularJacobian(u, v))?;
        let (j12, j22) = col(0.0, fd_step(v)).ok_or(Error::SingularJacobian(u, v))?;
        let det = j11 * j22 - j12 * j21;
        let scale = (j11.abs() + j12.abs()) * (j21.abs() + j22.abs());
        if !det.is_finite() || det.abs() <= 1e-300 || det.abs() <= 1e-15 * scale {
            return Err(Error::SingularJacobian(u, v));
        }
        let du = -(j22 * r.0 - j12 * r.1) / det;
        let dv = -(-j21 * r.0 + j11 * r.1) / det;
        let current = norm2(r);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let (tu, tv) = (u + step * du, v + step * dv);
            if let Some(tr) = eval(tu, tv) {
                if norm2(tr) < current {
                    accepted = Some((tu, tv, tr));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((tu, tv, tr)) => {
                u = tu;
                v = tv;
                r = tr;
            }
            None => {
                return Err(Error::NonConvergence(format!(
                    "no residual decrease along Newton direction at ({u}, {v}), residual {}",
                    max_norm(r)
                )))
            }
        }
    }
    if max_norm(r) <= cfg.abs_tol {
        return Ok(System2Solution {
            point: (u, v),
            residual: max_norm(r),
            iterations: cfg.max_iter,
        });
    }
    Err(Error::MaxIterations(cfg.max_iter))
}

// ---------------------------------------------------------------------------
// quadrature

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Gauss-Kronrod panel: (estimate, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = kronrod * half;
    let resasc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1f64.min((200.0 * err / resasc).powf(1.5));
    }
    let resabs = abs_sum * half.abs();
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

const QUAD_ABS_TOL: f64 = 1e-10;
const QUAD_MAX_PANELS: usize = 4000;

/// Adaptive Gauss-Kronrod quadrature of `f` over `[lo, hi]`; `hi` may be
/// `f64::INFINITY` (mapped through `x = lo + t / (1 - t)`). Absolute
/// tolerance 1e-10.
pub fn quad<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    quad_tol(f, lo, hi, QUAD_ABS_TOL, 0.0)
}

pub fn quad_tol<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if !lo.is_finite() || hi.is_nan() || hi < lo {
        return Err(Error::Domain(format!("bad integration range [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(0.0);
    }
    if hi.is_infinite() {
        let g = |t: f64| {
            let s = 1.0 - t;
            let v = f(lo + t / s);
            if v == 0.0 {
                0.0
            } else {
                v / (s * s)
            }
        };
        adaptive(&g, 0.0, 1.0, abs_tol, rel_tol)
    } else {
        adaptive(&f, lo, hi, abs_tol, rel_tol)
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    // panels kept unsorted; the worst one is split each round
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (r, e) = gk15(f, a, b);
    panels.push((a, b, r, e));
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Quadrature {
                estimate: total,
                error: err,
            });
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= QUAD_MAX_PANELS {
            return Err(Error::Quadrature {
                estimate: total,
                error: err,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            let total: f64 = panels.iter().map(|p| p.2).sum();
            return Err(Error::Quadrature {
                estimate: total,
                error: err,
            });
        }
        let (r1, e1) = gk15(f, pa, mid);
        let (r2, e2) = gk15(f, mid, pb);
        panels.push((pa, mid, r1, e1));
        panels.push((mid, pb, r2, e2));
    }
}

// ---------------------------------------------------------------------------
// derivative-free minimization

/// Result of a Nelder-Mead run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Nelder-Mead simplex minimization with dimension-adaptive coefficients.
/// Stops when the simplex spread in both function value and coordinates
/// falls below `tol`.
pub fn nelder_mead<F>(f: F, start: &[f64], step: &[f64], tol: f64, max_iter: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    let nd = dim as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nd, 0.75 - 1.0 / (2.0 * nd), 1.0 - 1.0 / nd);
    let safe = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += step[i];
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| safe(p)).collect();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let fspread = (values[dim] - values[0]).abs();
        let xspread = simplex[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        if fspread <= tol && xspread <= tol {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|p| p[k]).sum::<f64>() / nd)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let reflected = along(alpha);
        let fr = safe(&reflected);
        if fr < values[0] {
            let expanded = along(alpha * gamma);
            let fe = safe(&expanded);
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
        } else if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
        } else {
            let (contracted, fc) = if fr < values[dim] {
                let c = along(alpha * rho);
                let v = safe(&c);
                (c, v)
            } else {
                let c = along(-rho);
                let v = safe(&c);
                (c, v)
            };
            if fc < values[dim].min(fr) {
                simplex[dim] = contracted;
                values[dim] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=dim {
                    let shrunk: Vec<f64> = simplex[i].iter().zip(&best).map(|(x, b)| b + sigma * (x - b)).collect();
                    values[i] = safe(&shrunk);
                    simplex[i] = shrunk;
                }
            }
        }
    }
    let best = (0..=dim).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
    }
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

/// One-sample Kolmogorov-Smirnov result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution, `P(K > t)`.
pub fn kolmogorov_sf(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t < 1.18 {
        // Jacobi theta form converges fast for small t
        let c = std::f64::consts::PI * std::f64::consts::PI / (8.0 * t * t);
        let s: f64 = (1..=20)
            .map(|k| {
                let odd = (2 * k - 1) as f64;
                (-odd * odd * c).exp()
            })
            .sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / t * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let kf = k as f64;
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * kf * kf * t * t).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// KS statistic of a sorted sample against `cdf`, with the asymptotic p-value
/// evaluated at `(sqrt(n) + 0.12 + 0.11/sqrt(n)) D`.
pub fn ks_test<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> Result<KsResult> {
    if sorted.is_empty() {
        return Err(Error::Domain("KS test needs at least one observation".into()));
    }
    if sorted.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Unsorted);
    }
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let i = i as f64;
            ((i + 1.0) / n - f).max(f - i / n)
        })
        .fold(0.0f64, f64::max);
    let rn = n.sqrt();
    let p_value = kolmogorov_sf((rn + 0.12 + 0.11 / rn) * statistic);
    Ok(KsResult { statistic, p_value })
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Percentile of sorted data with linear interpolation between order
/// statistics (the usual "type 7" rule).
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
