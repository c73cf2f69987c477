//! Adaptive Gauss–Kronrod quadrature (7–15 pair) with interval subdivision,
//! plus a doubling-segment integrator for decaying integrands on half-lines.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge: error estimate {error:.3e} for value {value:.3e} after {subdivisions} subdivisions")]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: u32,
    },
    #[error("integrand returned a non-finite value near x = {at:.6e}")]
    NonFinite { at: f64 },
    #[error("integral appears divergent: partial sums keep growing on [{from:.3e}, inf)")]
    Divergent { from: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    pub evals: u64,
}

// 15-point Kronrod abscissae (positive half) and weights; embedded 7-point
// Gauss weights. Standard values, e.g. QUADPACK's dqk15.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// One Gauss–Kronrod 15 panel on [a, b]. Returns (value, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let raw_err = ((kronrod - gauss) * half).abs();
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = raw_err;
    if res_asc != 0.0 && raw_err != 0.0 {
        let scale = (200.0 * raw_err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (kronrod * half, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Adaptive integration over the union of [pts[i], pts[i+1]] panels.
///
/// `pts` must be non-decreasing; panels of zero width are skipped. The caller
/// is expected to place breakpoints around known boundary layers.
pub fn integrate<F: Fn(f64) -> f64>(
    f: &F,
    pts: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    assert!(pts.len() >= 2, "need at least one panel");
    let mut heap = BinaryHeap::new();
    let mut evals = 0u64;
    let mut value = 0.0;
    let mut error = 0.0;
    for w in pts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(f, w[0], w[1]);
        evals += 15;
        if !v.is_finite() {
            return Err(QuadError::NonFinite { at: 0.5 * (w[0] + w[1]) });
        }
        value += v;
        error += e;
        heap.push(Segment { a: w[0], b: w[1], value: v, error: e });
    }
    let mut subdivisions = 0u32;
    // error on intervals already at floating-point resolution; cannot shrink
    let mut stuck_error = 0.0;
    while error + stuck_error > cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
        if subdivisions >= cfg.max_subdivisions {
            return Err(QuadError::NonConvergence {
                value,
                error: error + stuck_error,
                subdivisions,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            error -= worst.error;
            stuck_error += worst.error;
            continue;
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        evals += 30;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(QuadError::NonFinite { at: mid });
        }
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        subdivisions += 1;
    }
    Ok(QuadResult { value, error: (error + stuck_error).max(0.0), evals })
}

/// Integrate f over [a, inf) for an integrand that eventually decays.
///
/// Successive segments [x, x+w] with doubling w are summed until two
/// consecutive segments fall below the termination threshold while
/// decreasing; the geometric remainder estimate is folded into the error.
pub fn integrate_decaying<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    first_width: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError> {
    assert!(first_width > 0.0);
    let mut x = a;
    let mut width = first_width;
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evals = 0u64;
    let mut prev_seg = f64::INFINITY;
    let mut small_streak = 0u32;
    let mut last_mag = 0.0f64;
    for _ in 0..64 {
        let seg = integrate(f, &[x, x + width], cfg)?;
        evals += seg.evals;
        total += seg.value;
        error += seg.error;
        let mag = seg.value.abs();
        let thresh = cfg.abs_tol.max(0.05 * cfg.rel_tol * total.abs());
        if mag < thresh && mag <= prev_seg {
            small_streak += 1;
            if small_streak >= 2 {
                let ratio = if last_mag > 0.0 { (mag / last_mag).clamp(0.0, 0.9) } else { 0.0 };
                error += mag * ratio / (1.0 - ratio);
                return Ok(QuadResult { value: total, error, evals });
            }
        } else {
            small_streak = 0;
        }
        last_mag = if mag > 0.0 { mag } else { last_mag };
        prev_seg = mag;
        x += width;
        width *= 2.0;
    }
    Err(QuadError::Divergent { from: a })
}
