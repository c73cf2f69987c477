//! Deterministic evaluation of the transition functionals
//!
//!   Phi_j^(N)(k_1..k_j) = (N)_j E(W_1^{k_1} ... W_j^{k_j})
//!                       = (N)_j / Gamma(p) * int_0^inf u^{p-1}
//!                         psi(u)^{N-j} prod_i phi_{k_i}(u) du,   p = sum k_i,
//!
//! integrated in s = -log u coordinates. The integrand there is
//! exp((N-j) log psi) * prod_i [e^{-k_i s} phi_{k_i}(e^{-s})], a product of
//! O(1)-representable factors, so the boundary layer can sit arbitrarily
//! deep (u far below f64 range) without loss.
//!
//! The integral is split at u = delta. The part above delta is both bounded
//! by the geometric factor psi(delta)^(N-j) (reported as `tail_bound`) and
//! computed outright (`tail_beyond_delta`), so small-N values stay exact
//! while the bound documents why the split point stops mattering as N grows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Law, Model, ModelError};
use crate::quad::{integrate, integrate_decaying, QuadConfig, QuadError};
use crate::special::{ln_falling, ln_gamma};

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("invalid query: {0}")]
    BadQuery(String),
    #[error("quadrature failed for Phi_{j}^{{({n_pop})}}{ks:?}: {source}")]
    Quad {
        n_pop: u64,
        j: usize,
        ks: Vec<u32>,
        source: QuadError,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Truncation point and tolerances for the integral representation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Split point delta of the u-integral; must be finite and positive.
    pub delta: f64,
    pub rel_tol: f64,
    pub max_subdivisions: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            delta: 1.0,
            rel_tol: 1e-9,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), MomentError> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(MomentError::BadQuery(format!(
                "delta must be finite and positive, got {}",
                self.delta
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(MomentError::BadQuery("rel_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Integral,
    ClosedForm,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Integral => write!(f, "integral"),
            Method::ClosedForm => write!(f, "closed-form"),
            Method::MonteCarlo => write!(f, "monte-carlo"),
        }
    }
}

/// A computed functional value with its error estimate and query echo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentResult {
    pub value: f64,
    /// Estimated absolute error (quadrature + remainder extrapolation).
    pub error: f64,
    pub method: Method,
    pub n_pop: u64,
    pub group_sizes: Vec<u32>,
    /// Computed contribution of the region u > delta.
    pub tail_beyond_delta: f64,
    /// Geometric bound psi(delta)^(N-j) c1 (N)_j / Gamma(p) on that region.
    pub tail_bound: f64,
}

fn validate_query(n_pop: u64, ks: &[u32]) -> Result<(), MomentError> {
    if ks.is_empty() || ks.len() > 8 {
        return Err(MomentError::BadQuery(format!(
            "need 1..=8 group sizes, got {}",
            ks.len()
        )));
    }
    if ks.iter().any(|&k| k == 0 || k > 20) {
        return Err(MomentError::BadQuery(format!(
            "group sizes must be in 1..=20, got {ks:?}"
        )));
    }
    if n_pop == 0 {
        return Err(MomentError::BadQuery("population size must be >= 1".into()));
    }
    Ok(())
}

fn zero_result(n_pop: u64, ks: &[u32]) -> MomentResult {
    MomentResult {
        value: 0.0,
        error: 0.0,
        method: Method::Integral,
        n_pop,
        group_sizes: ks.to_vec(),
        tail_beyond_delta: 0.0,
        tail_bound: 0.0,
    }
}

/// Phi_j^(N)(k_1..k_j) through the integral representation.
pub fn phi_exact(
    model: &Model,
    n_pop: u64,
    ks: &[u32],
    cfg: &QuadratureConfig,
) -> Result<MomentResult, MomentError> {
    validate_query(n_pop, ks)?;
    cfg.validate()?;
    let j = ks.len();
    if j as u64 > n_pop {
        return Ok(zero_result(n_pop, ks));
    }
    let n = n_pop as f64;
    let p: f64 = ks.iter().map(|&k| k as f64).sum();
    let nm_j = n - j as f64;
    let ln_pref = ln_falling(n_pop, j as u32) - ln_gamma(p);

    // integrand in s = -log u; the (N-j) psi-power is skipped when N = j
    let f = |s: f64| -> f64 {
        let mut v = if nm_j > 0.0 {
            (nm_j * model.log_laplace_at_log(s)).exp()
        } else {
            1.0
        };
        for &k in ks {
            if v == 0.0 {
                return 0.0;
            }
            v *= model.scaled_mixed_moment(k, s);
        }
        v
    };

    let s_delta = -cfg.delta.ln();
    // locate the boundary layer: (N-j)(1 - psi) = 1
    let s_star = if nm_j > 0.0 {
        locate_layer(model, nm_j, s_delta)
    } else {
        s_delta
    };

    let quad_cfg = QuadConfig {
        rel_tol: cfg.rel_tol,
        abs_tol: 0.0,
        max_subdivisions: cfg.max_subdivisions,
    };

    // region u <= delta (s >= s_delta): dense points around the layer, then
    // doubling segments outward for the slowly decaying regimes
    let mut pts = vec![s_delta];
    let mut g = 1.0f64;
    while s_delta + g < s_star - 8.0 {
        pts.push(s_delta + g);
        g *= 2.0;
    }
    for off in [-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0, 16.0] {
        let s = s_star + off;
        if s > s_delta {
            pts.push(s);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let head = integrate(&f, &pts, &quad_cfg).map_err(|e| MomentError::Quad {
        n_pop,
        j,
        ks: ks.to_vec(),
        source: e,
    })?;
    // the layer sits inside the head panels, so the remaining pieces only
    // need accuracy relative to the head's scale
    let rest_cfg = QuadConfig {
        abs_tol: (0.05 * cfg.rel_tol * head.value.abs()).max(1e-300),
        ..quad_cfg
    };
    let far_start = *pts.last().unwrap();
    let far = integrate_decaying(&f, far_start, (0.5 * s_star).max(4.0), &rest_cfg).map_err(
        |e| MomentError::Quad {
            n_pop,
            j,
            ks: ks.to_vec(),
            source: e,
        },
    )?;
    let main = head.value + far.value;
    let main_err = head.error + far.error;

    // region u > delta (s < s_delta), integrated toward u = +inf
    let tail_fn = |t: f64| f(s_delta - t);
    let tail = integrate_decaying(&tail_fn, 0.0, 2.0, &rest_cfg).map_err(|e| MomentError::Quad {
        n_pop,
        j,
        ks: ks.to_vec(),
        source: e,
    })?;

    // geometric diagnostic bound on the same region: psi(delta)^(N-j) c1
    let c1_fn = |t: f64| -> f64 {
        let s = s_delta - t;
        let mut v = 1.0;
        for &k in ks {
            v *= model.scaled_mixed_moment(k, s);
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    };
    let loose = QuadConfig {
        rel_tol: 1e-4,
        abs_tol: 1e-280,
        max_subdivisions: 400,
    };
    let c1 = integrate_decaying(&c1_fn, 0.0, 2.0, &loose)
        .map(|r| r.value)
        .unwrap_or(f64::INFINITY);
    let ln_psi_delta = model.log_laplace_at_log(s_delta);
    let tail_bound = (ln_pref + nm_j * ln_psi_delta).exp() * c1;

    let pref = ln_pref.exp();
    Ok(MomentResult {
        value: pref * (main + tail.value),
        error: pref * (main_err + tail.error),
        method: Method::Integral,
        n_pop,
        group_sizes: ks.to_vec(),
        tail_beyond_delta: pref * tail.value,
        tail_bound,
    })
}

/// Bisect for the s where (N-j)(1 - psi(e^{-s})) = 1; one_minus is
/// decreasing in s, so the layer is unique.
fn locate_layer(model: &Model, nm_j: f64, s_floor: f64) -> f64 {
    let h = |s: f64| nm_j * model.one_minus_laplace_at_log(s) - 1.0;
    if h(s_floor) <= 0.0 {
        return s_floor;
    }
    let mut lo = s_floor;
    let mut hi = (s_floor + 2.0).max(2.0);
    let mut width = 2.0;
    while h(hi) > 0.0 {
        lo = hi;
        hi += width;
        width *= 2.0;
        if hi > 1e15 {
            return lo;
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Coalescence probability c_N = Phi_1^(N)(2).
pub fn cn_exact(
    model: &Model,
    n_pop: u64,
    cfg: &QuadratureConfig,
) -> Result<MomentResult, MomentError> {
    phi_exact(model, n_pop, &[2], cfg)
}

/// Closed-form Phi for the laws that admit one; the independent oracle for
/// the integral path.
pub fn phi_closed_form(model: &Model, n_pop: u64, ks: &[u32]) -> Option<MomentResult> {
    validate_query(n_pop, ks).ok()?;
    let j = ks.len();
    let p: u32 = ks.iter().sum();
    let result = |value: f64| MomentResult {
        value,
        error: 0.0,
        method: Method::ClosedForm,
        n_pop,
        group_sizes: ks.to_vec(),
        tail_beyond_delta: 0.0,
        tail_bound: 0.0,
    };
    if j as u64 > n_pop {
        return Some(result(0.0));
    }
    let n = n_pop as f64;
    match model.law {
        // weights are deterministically 1/N
        Law::Degenerate { .. } => Some(result(
            (ln_falling(n_pop, j as u32) - p as f64 * n.ln()).exp(),
        )),
        // symmetric Dirichlet(r) weights: (N)_j prod [r]_{k_i} / [rN]_p
        Law::Gamma { r } => {
            let mut v = (ln_falling(n_pop, j as u32)).exp();
            for &k in ks {
                v *= crate::special::rising(r, k);
            }
            v /= crate::special::rising(r * n, p);
            Some(result(v))
        }
        // condition on the count of 2s among the other N-j fitness values
        Law::TwoPoint => {
            let nm_j = n_pop - j as u64;
            let mut total = 0.0;
            let ln2 = 2f64.ln();
            for mask in 0..(1u32 << j) {
                let mut ln_num = 0.0;
                let mut s0 = 0.0;
                for (i, &k) in ks.iter().enumerate() {
                    let x_is_two = mask >> i & 1 == 1;
                    if x_is_two {
                        ln_num += k as f64 * ln2;
                        s0 += 2.0;
                    } else {
                        s0 += 1.0;
                    }
                }
                for m in 0..=nm_j {
                    let ln_w = ln_gamma(nm_j as f64 + 1.0)
                        - ln_gamma(m as f64 + 1.0)
                        - ln_gamma((nm_j - m) as f64 + 1.0)
                        - nm_j as f64 * ln2;
                    let s = s0 + (nm_j - m) as f64 + 2.0 * m as f64;
                    total += (ln_w + ln_num - p as f64 * s.ln()).exp();
                }
            }
            total *= (ln_falling(n_pop, j as u32) - j as f64 * ln2).exp();
            Some(result(total))
        }
        _ => None,
    }
}

/// Residual of the consistency relation
/// Phi_j(k) - Phi_{j+1}(k,1) - sum_i Phi_j(k + e_i), with the combined
/// error bound of the terms.
pub fn consistency_residual(
    model: &Model,
    n_pop: u64,
    ks: &[u32],
    cfg: &QuadratureConfig,
) -> Result<(f64, f64), MomentError> {
    let base = phi_exact(model, n_pop, ks, cfg)?;
    let mut extended = ks.to_vec();
    extended.push(1);
    let plus_one = phi_exact(model, n_pop, &extended, cfg)?;
    let mut residual = base.value - plus_one.value;
    let mut err = base.error + plus_one.error;
    for i in 0..ks.len() {
        let mut bumped = ks.to_vec();
        bumped[i] += 1;
        let r = phi_exact(model, n_pop, &bumped, cfg)?;
        residual -= r.value;
        err += r.error;
    }
    Ok((residual, err))
}
