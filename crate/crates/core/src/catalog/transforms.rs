//! Laplace transform psi(u) = E(e^(-uX)) and mixed moments
//! phi_p(u) = E(X^p e^(-uX)) for every catalog law.
//!
//! The moment engine works in s = -log u coordinates and consumes the
//! scaled quantities e^(-ks) phi_k(e^(-s)), which stay O(1)-representable
//! deep into the heavy-tail boundary layers where u itself underflows.

use super::{Law, Model, ModelError};
use crate::quad::{integrate, QuadConfig, QuadError};
use crate::special::{eulerian, falling, ln_gamma, rising, stirling2};

/// Best-effort adaptive quadrature: on non-convergence the partial value is
/// still the right order, and the caller's own error estimate governs.
fn quad_value(f: &dyn Fn(f64) -> f64, pts: &[f64], rel_tol: f64) -> f64 {
    let cfg = QuadConfig {
        rel_tol,
        abs_tol: 1e-280,
        max_subdivisions: 500,
    };
    match integrate(&f, pts, &cfg) {
        Ok(r) => r.value,
        Err(QuadError::NonConvergence { value, .. }) => value,
        Err(_) => f64::NAN,
    }
}

/// log(1 - e^(-u)) at u = e^(-s), asymptotically -s when u underflows.
fn ln_w_tilde(s: f64) -> f64 {
    if s > 500.0 {
        return -s;
    }
    let u = (-s).exp();
    (-(-u).exp_m1()).ln()
}

impl Model {
    /// psi(u) = E(e^(-uX)), u >= 0.
    pub fn laplace(&self, u: f64) -> f64 {
        assert!(u >= 0.0);
        if u == 0.0 {
            return 1.0;
        }
        1.0 - self.one_minus_laplace_at_log(-u.ln())
    }

    /// log psi(e^(-s)).
    pub fn log_laplace_at_log(&self, s: f64) -> f64 {
        (-self.one_minus_laplace_at_log(s)).ln_1p()
    }

    /// 1 - psi(e^(-s)), computed without cancellation.
    pub fn one_minus_laplace_at_log(&self, s: f64) -> f64 {
        let u = (-s).exp();
        match self.law {
            Law::Degenerate { c } => -(-c * u).exp_m1(),
            Law::Gamma { r } => -(-r * u.ln_1p()).exp_m1(),
            Law::TwoPoint => -0.5 * ((-u).exp_m1() + (-2.0 * u).exp_m1()),
            Law::Sibuya { alpha } => (alpha * ln_w_tilde(s)).exp(),
            Law::PgfFamily { alpha, b } => {
                let lw = ln_w_tilde(s);
                (b + 1.0) * lw.exp() - b * (alpha * lw).exp()
            }
            Law::PositiveStable { alpha } => -(-(-alpha * s).exp()).exp_m1(),
            Law::YuleSimon { alpha } => {
                // X | V ~ Geometric(V), V ~ Beta(alpha,1); substitute v = z^(1/alpha):
                // 1 - psi = int_0^1 w / (w + v(1-w)) dz
                let w = ln_w_tilde(s).exp();
                let omw = (-u).exp(); // 1 - w
                let f = move |z: f64| {
                    if z <= 0.0 {
                        return 1.0; // v = 0 limit
                    }
                    let v = z.powf(1.0 / alpha);
                    w / (w + v * omw)
                };
                let zb = (alpha * ln_w_tilde(s)).exp().clamp(0.0, 1.0);
                let pts = layer_points(zb, 1.0);
                quad_value(&f, &pts, 1e-11)
            }
            // tail-integral laws: 1 - psi(u) = int_0^inf e^(-y) P(X > y/u) dy
            Law::Pareto { .. } | Law::ParetoLog { .. } | Law::LogTail { .. } => {
                let f = move |y: f64| {
                    if y <= 0.0 {
                        return 0.0;
                    }
                    (-y).exp() * self.tail_log(y.ln() + s)
                };
                let mut pts = vec![0.0];
                if u.is_finite() && u > 1e-300 && u < 30.0 {
                    pts.extend([0.25 * u, u, 4.0 * u]);
                }
                pts.extend([0.5, 2.0, 8.0, 30.0, 90.0]);
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                quad_value(&f, &pts, 1e-11)
            }
        }
    }

    /// e^(-ks) phi_k(e^(-s)) for integer k >= 1.
    pub fn scaled_mixed_moment(&self, k: u32, s: f64) -> f64 {
        assert!(k >= 1 && k <= 20);
        let u = (-s).exp();
        let kf = k as f64;
        match self.law {
            Law::Degenerate { c } => (kf * (c.ln() - s) - c * u).exp(),
            Law::Gamma { r } => rising(r, k) * (-kf * s - (r + kf) * u.ln_1p()).exp(),
            Law::TwoPoint => {
                0.5 * ((-kf * s - u).exp() + (kf * (2f64.ln() - s) - 2.0 * u).exp())
            }
            Law::Sibuya { alpha } => {
                // E(X^k s^X) = sum_m S(k,m) s^m f^(m)(s), f = 1-(1-s)^alpha;
                // every term is positive for alpha in (0,1)
                let lw = ln_w_tilde(s);
                let mut total = 0.0;
                let mut ln_c = alpha.ln(); // log |alpha (alpha-1) ... (alpha-m+1)|
                for m in 1..=k {
                    let mf = m as f64;
                    if m > 1 {
                        ln_c += (mf - 1.0 - alpha).ln();
                    }
                    let ln_term = stirling2(k, m).ln() + ln_c - mf * u + (alpha - mf) * lw
                        - kf * s;
                    total += ln_term.exp();
                }
                total
            }
            Law::PgfFamily { alpha, b } => {
                let lw = ln_w_tilde(s);
                // m = 1: s_e (b+1 - b alpha w^(alpha-1))
                let bracket = (b + 1.0) - b * alpha * ((alpha - 1.0) * lw).exp();
                let mut total = stirling2(k, 1) * (-u - kf * s).exp() * bracket.max(0.0);
                // m >= 2: all positive, b |(alpha)_m| w^(alpha-m)
                let mut ln_c = alpha.ln() + (alpha - 1.0).ln();
                for m in 2..=k {
                    let mf = m as f64;
                    if m > 2 {
                        ln_c += (mf - 1.0 - alpha).ln();
                    }
                    let ln_term = stirling2(k, m).ln() + b.ln() + ln_c - mf * u
                        + (alpha - mf) * lw
                        - kf * s;
                    total += ln_term.exp();
                }
                total
            }
            Law::PositiveStable { alpha } => {
                // scaled derivatives D_m = u^m psi^(m)(u) via
                // D_{m+1} = sum_i C(m,i) G_{i+1} D_{m-i},  G_i = -(alpha)_i u^alpha
                let ua = (-alpha * s).exp();
                let mut d = vec![0.0f64; k as usize + 1];
                d[0] = (-ua).exp();
                let mut g = vec![0.0f64; k as usize + 1];
                for i in 1..=k as usize {
                    g[i] = -falling(alpha, i as u32) * ua;
                }
                for m in 0..k as usize {
                    let mut acc = 0.0;
                    for i in 0..=m {
                        acc += crate::special::binomial(m as u64, i as u64) * g[i + 1] * d[m - i];
                    }
                    d[m + 1] = acc;
                }
                let v = d[k as usize];
                if k % 2 == 0 {
                    v
                } else {
                    -v
                }
            }
            Law::YuleSimon { alpha } => {
                // E(X^k s^X | V=v) = v s sum_i A(k,i)(qs)^i / (1-qs)^(k+1), q = 1-v
                let w = ln_w_tilde(s).exp();
                let omw = (-u).exp(); // the pgf argument e^{-u}
                let f = move |z: f64| {
                    if z <= 0.0 {
                        return 0.0;
                    }
                    let v = z.powf(1.0 / alpha);
                    let denom = w + v * (1.0 - w);
                    let mut series = 0.0;
                    let qs = (1.0 - v) * omw;
                    for i in (0..k).rev() {
                        series = series * qs + eulerian(k, i);
                    }
                    // (v/denom) e^{-u} series (u/denom)^k, grouped against overflow
                    (v / denom) * omw * series * (kf * (u / denom).ln()).exp()
                };
                let zb = (alpha * ln_w_tilde(s)).exp().clamp(0.0, 1.0);
                let pts = layer_points(zb, 1.0);
                quad_value(&f, &pts, 1e-11)
            }
            Law::Pareto { .. } | Law::ParetoLog { .. } | Law::LogTail { .. } => {
                // u^k phi_k(u) = int (k y^(k-1) - y^k) e^(-y) [T(y e^s) - T(e^s)] dy;
                // the subtracted constant integrates to zero exactly and kills
                // the leading-order cancellation when T is slowly varying
                let t0 = self.tail_log(s);
                let f = move |y: f64| {
                    if y <= 0.0 {
                        return 0.0;
                    }
                    let d = self.tail_log(y.ln() + s) - t0;
                    (kf * y.powi(k as i32 - 1) - y.powi(k as i32)) * (-y).exp() * d
                };
                let top = 6.0 * kf + 90.0;
                let mut pts = vec![0.0];
                if u.is_finite() && u > 1e-300 && u < top {
                    pts.extend([0.25 * u, u, 4.0 * u]);
                }
                pts.extend([0.25 * kf, kf, 2.0 * kf, 4.0 * kf, 4.0 * kf + 30.0, top]);
                pts.retain(|&x| x <= top);
                pts.sort_by(f64::total_cmp);
                pts.dedup();
                quad_value(&f, &pts, 1e-11)
            }
        }
    }

    /// phi_p(u) = E(X^p e^(-uX)); u = 0 allowed only when E(X^p) is finite.
    pub fn mixed_moment(&self, p: f64, u: f64) -> Result<f64, ModelError> {
        assert!(p > 0.0 && u >= 0.0);
        if u == 0.0 {
            return self.moment_finite(p).ok_or(ModelError::DivergentMoment {
                model: self.spec_string(),
                p,
            });
        }
        match self.law {
            Law::Degenerate { c } => return Ok((p * c.ln() - c * u).exp()),
            Law::Gamma { r } => {
                return Ok((ln_gamma(r + p) - ln_gamma(r) - (r + p) * u.ln_1p()).exp())
            }
            Law::TwoPoint => {
                return Ok(0.5 * ((-u).exp() + (p * 2f64.ln() - 2.0 * u).exp()))
            }
            _ => {}
        }
        let s = -u.ln();
        if p.fract() == 0.0 && p <= 20.0 {
            let k = p as u32;
            return Ok(self.scaled_mixed_moment(k, s) * (p * s).exp());
        }
        // real p: tail-integral form with the same constant subtraction
        let t0 = self.tail_log(s);
        let f = move |y: f64| {
            if y <= 0.0 {
                return 0.0;
            }
            let d = self.tail_log(y.ln() + s) - t0;
            (p * y.powf(p - 1.0) - y.powf(p)) * (-y).exp() * d
        };
        let top = 6.0 * p + 90.0;
        let mut pts = vec![0.0];
        if u.is_finite() && u > 1e-300 && u < top {
            pts.extend([0.25 * u, u, 4.0 * u]);
        }
        pts.extend([0.25 * p, p, 2.0 * p, 4.0 * p + 30.0, top]);
        pts.retain(|&x| x <= top);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Ok(quad_value(&f, &pts, 1e-11) * (p * s).exp())
    }

    /// psi', psi'', psi''' at u (as many as `order` <= 3 requests).
    pub fn laplace_derivs(&self, u: f64, order: u32) -> Result<Vec<f64>, ModelError> {
        if order == 0 || order > 3 {
            return Err(ModelError::UnsupportedOrder(order));
        }
        let mut out = Vec::with_capacity(order as usize);
        for m in 1..=order {
            let phi = self.mixed_moment(m as f64, u)?;
            out.push(if m % 2 == 1 { -phi } else { phi });
        }
        Ok(out)
    }

    /// E(X^p) when finite, None when the moment diverges.
    pub fn moment_finite(&self, p: f64) -> Option<f64> {
        match self.law {
            Law::Degenerate { c } => Some(c.powf(p)),
            Law::Gamma { r } => Some((ln_gamma(r + p) - ln_gamma(r)).exp()),
            Law::TwoPoint => Some(0.5 * (1.0 + 2f64.powf(p))),
            Law::Pareto { alpha } => (p < alpha).then(|| alpha / (alpha - p)),
            Law::YuleSimon { alpha } | Law::Sibuya { alpha } | Law::PgfFamily { alpha, .. } => {
                (p < alpha).then(|| self.discrete_moment_series(p))
            }
            Law::ParetoLog { alpha, .. } | Law::PositiveStable { alpha } => {
                (p < alpha).then(|| self.numeric_moment(p))
            }
            Law::LogTail { .. } => None,
        }
    }

    /// E(X^p) for the integer-valued laws: partial pmf sum plus the
    /// power-law continuation of the remainder.
    fn discrete_moment_series(&self, p: f64) -> f64 {
        const K_MAX: usize = 1 << 16;
        let mut sum = 0.0;
        // c_as = lim k^{alpha+1} p_k closes the sum with
        // int_K^inf x^p c_as x^{-alpha-1} dx = c_as K^{p-alpha} / (alpha - p)
        let (alpha, c_as) = match self.law {
            Law::YuleSimon { alpha } => {
                // p_1 = alpha/(alpha+1), p_{k+1}/p_k = k/(k+alpha+1)
                let mut pk = alpha / (alpha + 1.0);
                for k in 1..=K_MAX {
                    let kf = k as f64;
                    sum += kf.powf(p) * pk;
                    pk *= kf / (kf + alpha + 1.0);
                }
                (alpha, alpha * ln_gamma(alpha + 1.0).exp())
            }
            Law::Sibuya { alpha } => {
                // p_1 = alpha, p_{k+1}/p_k = (k-alpha)/(k+1)
                let mut pk = alpha;
                for k in 1..=K_MAX {
                    let kf = k as f64;
                    sum += kf.powf(p) * pk;
                    pk *= (kf - alpha) / (kf + 1.0);
                }
                (alpha, alpha * (-ln_gamma(1.0 - alpha)).exp())
            }
            Law::PgfFamily { alpha, b } => {
                // atom p_1 = b+1-b*alpha; from k = 2: p_2 = b*alpha*(alpha-1)/2,
                // then the same ratio as Sibuya
                sum += b + 1.0 - b * alpha;
                let mut pk = b * alpha * (alpha - 1.0) / 2.0;
                for k in 2..=K_MAX {
                    let kf = k as f64;
                    sum += kf.powf(p) * pk;
                    pk *= (kf - alpha) / (kf + 1.0);
                }
                // b / Gamma(-alpha), written with positive gamma arguments
                let c = b * alpha * (alpha - 1.0) * (2.0 - alpha) / ln_gamma(3.0 - alpha).exp();
                (alpha, c)
            }
            _ => unreachable!("series path is for integer laws"),
        };
        sum + c_as * (K_MAX as f64).powf(p - alpha) / (alpha - p)
    }
}

/// Geometric breakpoints bracketing a boundary layer at `zb` inside (0, top].
fn layer_points(zb: f64, top: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    if zb > 1e-300 && zb < top {
        for m in [1e-3, 1e-1, 1.0, 1e1, 1e3] {
            let p = zb * m;
            if p > 0.0 && p < top {
                pts.push(p);
            }
        }
    }
    pts.push(top);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
