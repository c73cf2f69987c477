//! Slowly varying functions, the de Haan integral ell*, the a_N scaling
//! sequence, and numerical checks of Karamata-type limit statements.

use std::sync::Arc;

use thiserror::Error;

use crate::quad::{integrate, integrate_decaying, QuadConfig};

#[derive(Debug, Error)]
pub enum RvError {
    #[error("ell* is defined on (1, inf); got x = {0}")]
    Domain(f64),
    #[error("no sign change found when bracketing a_N for N = {0}")]
    NoBracket(u64),
    #[error("integral did not converge: {0}")]
    Quad(#[from] crate::quad::QuadError),
}

/// A slowly varying function with its validity range and, where known, a
/// closed form for ell*(x) = int_1^x ell(t)/t dt.
#[derive(Clone)]
pub enum SlowlyVarying {
    /// ell(x) = c
    Constant { c: f64 },
    /// ell(x) = c (log x)^(beta-1)
    LogPower { c: f64, beta: f64 },
    /// ell(x) = (1 + log x)^(-beta)
    ShiftedLogPower { beta: f64 },
    /// arbitrary evaluation handle, ell* by quadrature
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        x_min: f64,
    },
}

impl std::fmt::Debug for SlowlyVarying {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SlowlyVarying::Constant { c } => write!(f, "Constant({c})"),
            SlowlyVarying::LogPower { c, beta } => write!(f, "LogPower(c={c}, beta={beta})"),
            SlowlyVarying::ShiftedLogPower { beta } => write!(f, "ShiftedLogPower(beta={beta})"),
            SlowlyVarying::Custom { x_min, .. } => write!(f, "Custom(x_min={x_min})"),
        }
    }
}

impl SlowlyVarying {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SlowlyVarying::Constant { c } => *c,
            SlowlyVarying::LogPower { c, beta } => c * x.ln().powf(beta - 1.0),
            SlowlyVarying::ShiftedLogPower { beta } => (1.0 + x.ln()).powf(-beta),
            SlowlyVarying::Custom { f, .. } => f(x),
        }
    }

    /// ell(e^w); avoids forming x when only log x is representable.
    pub fn eval_log(&self, w: f64) -> f64 {
        match self {
            SlowlyVarying::Constant { c } => *c,
            SlowlyVarying::LogPower { c, beta } => c * w.powf(beta - 1.0),
            SlowlyVarying::ShiftedLogPower { beta } => (1.0 + w).powf(-beta),
            SlowlyVarying::Custom { f, .. } => f(w.exp()),
        }
    }

    pub fn x_min(&self) -> f64 {
        match self {
            SlowlyVarying::Custom { x_min, .. } => *x_min,
            _ => 1.0,
        }
    }
}

/// ell*(x) = int_1^x ell(t)/t dt, closed form where available.
pub fn ell_star(ell: &SlowlyVarying, x: f64) -> Result<f64, RvError> {
    if x <= 1.0 {
        return Err(RvError::Domain(x));
    }
    ell_star_log(ell, x.ln())
}

/// ell* evaluated at x = e^w (w > 0).
pub fn ell_star_log(ell: &SlowlyVarying, w: f64) -> Result<f64, RvError> {
    if w <= 0.0 {
        return Err(RvError::Domain(w.exp()));
    }
    match ell {
        SlowlyVarying::Constant { c } => Ok(c * w),
        SlowlyVarying::LogPower { c, beta } => Ok(c / beta * w.powf(*beta)),
        SlowlyVarying::ShiftedLogPower { beta } => {
            if (*beta - 1.0).abs() < 1e-12 {
                Ok((1.0 + w).ln())
            } else {
                Ok(((1.0 + w).powf(1.0 - beta) - 1.0) / (1.0 - beta))
            }
        }
        SlowlyVarying::Custom { .. } => {
            // substitute t = e^v: int_0^w ell(e^v) dv
            let f = |v: f64| ell.eval_log(v.max(1e-300));
            let r = integrate(&f, &[0.0, w.min(2.0), w], &QuadConfig::default())?;
            Ok(r.value)
        }
    }
}

/// (ell*(lambda x) - ell*(x)) / ell(x); converges to log(lambda) as x grows.
pub fn de_haan_check(ell: &SlowlyVarying, lambda: f64, x: f64) -> Result<f64, RvError> {
    assert!(lambda > 0.0);
    if lambda == 1.0 {
        return Ok(0.0);
    }
    let a = ell_star(ell, x)?;
    let b = ell_star(ell, lambda * x)?;
    Ok((b - a) / ell.eval(x))
}

/// Exact root a_N of ell*(a) = a/N, taken on the decreasing branch of
/// a -> ell*(a) N / a so that a_N is the large representative.
pub fn solve_a_n(ell: &SlowlyVarying, n_pop: u64) -> Result<f64, RvError> {
    assert!(n_pop >= 2);
    let n = n_pop as f64;
    let g = |ln_a: f64| -> Result<f64, RvError> {
        Ok(ell_star_log(ell, ln_a)? * n / ln_a.exp().min(f64::MAX) - 1.0)
    };
    // scan a geometric grid in log a for the last point with g > 0
    let mut lo = f64::NAN;
    let mut seen_positive = false;
    let mut scan = 0.1f64;
    while scan < 700.0 {
        if let Ok(v) = g(scan) {
            if v > 0.0 {
                seen_positive = true;
                lo = scan;
            } else if seen_positive {
                break;
            }
        }
        scan += 0.25;
    }
    if !seen_positive {
        return Err(RvError::NoBracket(n_pop));
    }
    // bracket above: first grid point past lo where g < 0
    let mut hi = lo + 0.25;
    while g(hi)? > 0.0 {
        hi += 0.25;
        if hi > 705.0 {
            return Err(RvError::NoBracket(n_pop));
        }
    }
    // bisection on log a
    let mut lo = lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        let a = (0.5 * (lo + hi)).exp();
        let resid = (ell_star(ell, a)? * n / a - 1.0).abs();
        if resid < 1e-12 {
            return Ok(a);
        }
    }
    let a = (0.5 * (lo + hi)).exp();
    let resid = (ell_star(ell, a)? * n / a - 1.0).abs();
    if resid < 1e-10 {
        Ok(a)
    } else {
        Err(RvError::NoBracket(n_pop))
    }
}

/// Ratio  int phi(x_N t) f_N(t) dt  /  ( phi(x_N) int t^gamma f_N(t) dt )
/// for phi regularly varying at 0 with index gamma; tends to 1 as x_N -> 0.
pub fn karamata_quadrature_check(
    phi: &dyn Fn(f64) -> f64,
    gamma: f64,
    f_n: &dyn Fn(f64) -> f64,
    x_n: f64,
) -> Result<f64, RvError> {
    let cfg = QuadConfig { rel_tol: 1e-10, ..Default::default() };
    let num_head = integrate(
        &|t: f64| if t > 0.0 { phi(x_n * t) * f_n(t) } else { 0.0 },
        &[0.0, 1e-12, 1e-6, 1e-3, 0.5, 1.0],
        &cfg,
    )?;
    let num_tail = integrate_decaying(&|t: f64| phi(x_n * t) * f_n(t), 1.0, 1.0, &cfg)?;
    let den_head = integrate(
        &|t: f64| if t > 0.0 { t.powf(gamma) * f_n(t) } else { 0.0 },
        &[0.0, 1e-12, 1e-6, 1e-3, 0.5, 1.0],
        &cfg,
    )?;
    let den_tail = integrate_decaying(&|t: f64| t.powf(gamma) * f_n(t), 1.0, 1.0, &cfg)?;
    let den = phi(x_n) * (den_head.value + den_tail.value);
    Ok((num_head.value + num_tail.value) / den)
}

/// Values x^(rho+1) g(x) / ell(x) along a grid; under the monotone density
/// theorem they converge to rho as x -> 0.
pub fn monotone_density_check(
    g: &dyn Fn(f64) -> f64,
    rho: f64,
    ell: &dyn Fn(f64) -> f64,
    x_grid: &[f64],
) -> Vec<f64> {
    x_grid
        .iter()
        .map(|&x| x.powf(rho + 1.0) * g(x) / ell(x))
        .collect()
}
