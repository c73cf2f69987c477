//! The fitness-distribution catalog: samplers, exact tails, Laplace
//! transforms and mixed moments for the concrete heavy-tailed laws.
//!
//! Each law carries its regular-variation metadata (tail index alpha, the
//! exact slowly varying factor ell, mean and second moment where finite),
//! which downstream regime classification reads instead of estimating.

mod transforms;

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Distribution;
use thiserror::Error;

use crate::slowly_varying::SlowlyVarying;
use crate::special::ln_gamma;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{family}: invalid parameter: {message}")]
    InvalidParameter {
        family: &'static str,
        message: String,
    },
    #[error("E(X^{p} e^(-uX)) diverges at u = 0 for {model}")]
    DivergentMoment { model: String, p: f64 },
    #[error("laplace derivatives supported up to order 3, got {0}")]
    UnsupportedOrder(u32),
    #[error("unknown model spec {0:?} (expected e.g. \"pareto:alpha=1.5\")")]
    UnknownModel(String),
}

/// Declared tail behaviour: either E(X^2) < inf, or the regular-variation
/// index of P(X > x) ~ x^(-alpha) ell(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailIndex {
    FiniteSecondMoment,
    Index(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Law {
    Pareto { alpha: f64 },
    ParetoLog { alpha: f64, c: f64, beta: f64, w_min: f64 },
    YuleSimon { alpha: f64 },
    Sibuya { alpha: f64 },
    PgfFamily { alpha: f64, b: f64 },
    LogTail { beta: f64 },
    Degenerate { c: f64 },
    Gamma { r: f64 },
    PositiveStable { alpha: f64 },
    TwoPoint,
}

/// A fitness law: sampler plus analytic handles.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub(crate) law: Law,
}

fn invalid(family: &'static str, message: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter {
        family,
        message: message.into(),
    }
}

impl Model {
    /// P(X > x) = x^(-alpha) for x > 1.
    pub fn pareto(alpha: f64) -> Result<Self, ModelError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(invalid("pareto", format!("alpha must be > 0, got {alpha}")));
        }
        Ok(Model { law: Law::Pareto { alpha } })
    }

    /// P(X > x) = c x^(-alpha) (log x)^(beta-1) beyond a cutoff x_min chosen
    /// so the expression is a valid non-increasing tail; the remaining mass
    /// sits in an atom at x_min.
    pub fn pareto_log(alpha: f64, c: f64, beta: f64) -> Result<Self, ModelError> {
        if !(alpha >= 0.0) || !(c > 0.0) || !(beta > 0.0) {
            return Err(invalid(
                "paretolog",
                format!("need alpha >= 0, c > 0, beta > 0; got alpha={alpha}, c={c}, beta={beta}"),
            ));
        }
        if alpha == 0.0 && beta >= 1.0 {
            return Err(invalid(
                "paretolog",
                "alpha = 0 requires beta < 1 so the tail decays",
            ));
        }
        // smallest w = log x where t(w) = exp(log c - alpha w + (beta-1) log w)
        // is both <= 1 and non-increasing
        let onset = if alpha > 0.0 {
            ((beta - 1.0) / alpha).max(1e-9)
        } else {
            1e-9
        };
        let h = |w: f64| c.ln() - alpha * w + (beta - 1.0) * w.ln();
        let mut w_min = onset;
        if h(w_min) > 0.0 {
            let mut hi = w_min.max(1.0);
            while h(hi) > 0.0 {
                hi *= 2.0;
                if hi > 1e12 {
                    return Err(invalid("paretolog", "tail never drops below 1"));
                }
            }
            let mut lo = w_min;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if h(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            w_min = hi;
        }
        Ok(Model {
            law: Law::ParetoLog { alpha, c, beta, w_min },
        })
    }

    /// P(X = k) = alpha B(alpha+1, k), k = 1, 2, ...
    pub fn yule_simon(alpha: f64) -> Result<Self, ModelError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(invalid("yulesimon", format!("alpha must be > 0, got {alpha}")));
        }
        Ok(Model { law: Law::YuleSimon { alpha } })
    }

    /// pgf f(s) = 1 - (1-s)^alpha, alpha in (0,1).
    pub fn sibuya(alpha: f64) -> Result<Self, ModelError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("sibuya", format!("alpha must be in (0,1), got {alpha}")));
        }
        Ok(Model { law: Law::Sibuya { alpha } })
    }

    /// pgf f(s) = (b+1)s + b((1-s)^alpha - 1), alpha in (1,2), 0 < b <= 1/(alpha-1).
    pub fn pgf_family(alpha: f64, b: f64) -> Result<Self, ModelError> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(invalid("pgf", format!("alpha must be in (1,2), got {alpha}")));
        }
        if !(b > 0.0 && b <= 1.0 / (alpha - 1.0)) {
            return Err(invalid(
                "pgf",
                format!("b must be in (0, 1/(alpha-1)] = (0, {}], got {b}", 1.0 / (alpha - 1.0)),
            ));
        }
        Ok(Model { law: Law::PgfFamily { alpha, b } })
    }

    /// P(X > x) = (1 + log x)^(-beta) for x >= 1.
    pub fn log_tail(beta: f64) -> Result<Self, ModelError> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(invalid("logtail", format!("beta must be > 0, got {beta}")));
        }
        Ok(Model { law: Law::LogTail { beta } })
    }

    /// P(X = c) = 1; the classical Wright-Fisher case.
    pub fn degenerate(c: f64) -> Result<Self, ModelError> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(invalid("degenerate", format!("c must be > 0, got {c}")));
        }
        Ok(Model { law: Law::Degenerate { c } })
    }

    /// Gamma(r, 1): density x^(r-1) e^(-x) / Gamma(r); Dirichlet weights.
    pub fn gamma(r: f64) -> Result<Self, ModelError> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(invalid("gamma", format!("r must be > 0, got {r}")));
        }
        Ok(Model { law: Law::Gamma { r } })
    }

    /// One-sided alpha-stable, Laplace transform exp(-u^alpha), alpha in (0,1).
    pub fn positive_stable(alpha: f64) -> Result<Self, ModelError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid("stable", format!("alpha must be in (0,1), got {alpha}")));
        }
        Ok(Model { law: Law::PositiveStable { alpha } })
    }

    /// P(X = 1) = P(X = 2) = 1/2; brute-force oracle fixture.
    pub fn two_point() -> Self {
        Model { law: Law::TwoPoint }
    }

    /// Parse a spec string, e.g. "pareto:alpha=1.5" or "twopoint".
    pub fn parse(spec: &str) -> Result<Self, ModelError> {
        let spec_trim = spec.trim();
        let (family, rest) = match spec_trim.split_once(':') {
            Some((f, r)) => (f.trim(), r.trim()),
            None => (spec_trim, ""),
        };
        let mut params = std::collections::BTreeMap::new();
        if !rest.is_empty() {
            for kv in rest.split(',') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| ModelError::UnknownModel(spec.to_string()))?;
                let val: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| ModelError::UnknownModel(spec.to_string()))?;
                params.insert(k.trim().to_string(), val);
            }
        }
        let get = |k: &str| -> Result<f64, ModelError> {
            params
                .get(k)
                .copied()
                .ok_or_else(|| ModelError::UnknownModel(format!("{spec} (missing {k})")))
        };
        match family.to_ascii_lowercase().as_str() {
            "pareto" => Model::pareto(get("alpha")?),
            "paretolog" => Model::pareto_log(get("alpha")?, get("c")?, get("beta")?),
            "yulesimon" => Model::yule_simon(get("alpha")?),
            "sibuya" => Model::sibuya(get("alpha")?),
            "pgf" => Model::pgf_family(get("alpha")?, get("b")?),
            "logtail" => Model::log_tail(get("beta")?),
            "degenerate" => Model::degenerate(get("c")?),
            "gamma" => Model::gamma(get("r")?),
            "stable" => Model::positive_stable(get("alpha")?),
            "twopoint" => Ok(Model::two_point()),
            _ => Err(ModelError::UnknownModel(spec.to_string())),
        }
    }

    pub fn family(&self) -> &'static str {
        match self.law {
            Law::Pareto { .. } => "pareto",
            Law::ParetoLog { .. } => "paretolog",
            Law::YuleSimon { .. } => "yulesimon",
            Law::Sibuya { .. } => "sibuya",
            Law::PgfFamily { .. } => "pgf",
            Law::LogTail { .. } => "logtail",
            Law::Degenerate { .. } => "degenerate",
            Law::Gamma { .. } => "gamma",
            Law::PositiveStable { .. } => "stable",
            Law::TwoPoint => "twopoint",
        }
    }

    /// Canonical spec string that `parse` accepts.
    pub fn spec_string(&self) -> String {
        match self.law {
            Law::Pareto { alpha } => format!("pareto:alpha={alpha}"),
            Law::ParetoLog { alpha, c, beta, .. } => {
                format!("paretolog:alpha={alpha},c={c},beta={beta}")
            }
            Law::YuleSimon { alpha } => format!("yulesimon:alpha={alpha}"),
            Law::Sibuya { alpha } => format!("sibuya:alpha={alpha}"),
            Law::PgfFamily { alpha, b } => format!("pgf:alpha={alpha},b={b}"),
            Law::LogTail { beta } => format!("logtail:beta={beta}"),
            Law::Degenerate { c } => format!("degenerate:c={c}"),
            Law::Gamma { r } => format!("gamma:r={r}"),
            Law::PositiveStable { alpha } => format!("stable:alpha={alpha}"),
            Law::TwoPoint => "twopoint".to_string(),
        }
    }

    pub fn tail_index(&self) -> TailIndex {
        match self.law {
            Law::Pareto { alpha } | Law::YuleSimon { alpha } => TailIndex::Index(alpha),
            Law::ParetoLog { alpha, .. } => TailIndex::Index(alpha),
            Law::Sibuya { alpha } | Law::PositiveStable { alpha } => TailIndex::Index(alpha),
            Law::PgfFamily { alpha, .. } => TailIndex::Index(alpha),
            Law::LogTail { .. } => TailIndex::Index(0.0),
            Law::Degenerate { .. } | Law::Gamma { .. } | Law::TwoPoint => {
                TailIndex::FiniteSecondMoment
            }
        }
    }

    /// E(X); None encodes an infinite mean.
    pub fn mean(&self) -> Option<f64> {
        match self.law {
            Law::Pareto { alpha } => (alpha > 1.0).then(|| alpha / (alpha - 1.0)),
            Law::ParetoLog { alpha, .. } => (alpha > 1.0).then(|| self.numeric_moment(1.0)),
            Law::YuleSimon { alpha } => (alpha > 1.0).then(|| alpha / (alpha - 1.0)),
            Law::Sibuya { .. } | Law::PositiveStable { .. } | Law::LogTail { .. } => None,
            Law::PgfFamily { b, .. } => Some(b + 1.0),
            Law::Degenerate { c } => Some(c),
            Law::Gamma { r } => Some(r),
            Law::TwoPoint => Some(1.5),
        }
    }

    /// E(X^2); None encodes an infinite second moment.
    pub fn second_moment(&self) -> Option<f64> {
        match self.law {
            Law::Pareto { alpha } => (alpha > 2.0).then(|| alpha / (alpha - 2.0)),
            Law::ParetoLog { alpha, .. } => (alpha > 2.0).then(|| self.numeric_moment(2.0)),
            Law::YuleSimon { alpha } => {
                (alpha > 2.0).then(|| alpha * alpha / ((alpha - 1.0) * (alpha - 2.0)))
            }
            Law::Sibuya { .. }
            | Law::PositiveStable { .. }
            | Law::LogTail { .. }
            | Law::PgfFamily { .. } => None,
            Law::Degenerate { c } => Some(c * c),
            Law::Gamma { r } => Some(r * (r + 1.0)),
            Law::TwoPoint => Some(2.5),
        }
    }

    /// The exact slowly varying factor ell in P(X>x) ~ x^(-alpha) ell(x),
    /// None for laws without a regularly varying tail.
    pub fn slowly_varying(&self) -> Option<SlowlyVarying> {
        match self.law {
            Law::Pareto { .. } => Some(SlowlyVarying::Constant { c: 1.0 }),
            Law::ParetoLog { c, beta, .. } => Some(SlowlyVarying::LogPower { c, beta }),
            Law::YuleSimon { alpha } => Some(SlowlyVarying::Constant {
                c: ln_gamma(alpha + 1.0).exp(),
            }),
            Law::Sibuya { alpha } | Law::PositiveStable { alpha } => {
                Some(SlowlyVarying::Constant {
                    c: (-ln_gamma(1.0 - alpha)).exp(),
                })
            }
            Law::PgfFamily { alpha, b } => Some(SlowlyVarying::Constant {
                c: b * (alpha - 1.0) / ln_gamma(2.0 - alpha).exp(),
            }),
            Law::LogTail { beta } => Some(SlowlyVarying::ShiftedLogPower { beta }),
            Law::Degenerate { .. } | Law::Gamma { .. } | Law::TwoPoint => None,
        }
    }

    /// P(X > x) for x >= 0.
    pub fn tail(&self, x: f64) -> f64 {
        assert!(x >= 0.0);
        if x == 0.0 {
            return 1.0;
        }
        self.tail_log(x.ln())
    }

    /// P(X > e^w). Accepting the log argument keeps extreme quantiles
    /// representable where x itself would overflow.
    pub fn tail_log(&self, w: f64) -> f64 {
        match self.law {
            Law::Pareto { alpha } => {
                if w <= 0.0 {
                    1.0
                } else {
                    (-alpha * w).exp()
                }
            }
            Law::ParetoLog { alpha, c, beta, w_min } => {
                if w < w_min {
                    1.0
                } else {
                    (c.ln() - alpha * w + (beta - 1.0) * w.ln()).exp()
                }
            }
            Law::YuleSimon { alpha } => discrete_tail_log(w, |k, lk| {
                // P(X > k) = Gamma(alpha+1) Gamma(k+1) / Gamma(k+alpha+1)
                if k <= 1e10 {
                    (ln_gamma(alpha + 1.0) + ln_gamma(k + 1.0) - ln_gamma(k + alpha + 1.0)).exp()
                } else {
                    (ln_gamma(alpha + 1.0) - alpha * lk).exp()
                }
            }),
            Law::Sibuya { alpha } => discrete_tail_log(w, |k, lk| {
                // P(X > k) = Gamma(k+1-alpha) / (Gamma(1-alpha) Gamma(k+1))
                if k <= 1e10 {
                    (ln_gamma(k + 1.0 - alpha) - ln_gamma(1.0 - alpha) - ln_gamma(k + 1.0)).exp()
                } else {
                    (-ln_gamma(1.0 - alpha) - alpha * lk).exp()
                }
            }),
            Law::PgfFamily { alpha, b } => discrete_tail_log(w, |k, lk| {
                // P(X > k) = b(alpha-1) Gamma(k+1-alpha) / (Gamma(2-alpha) Gamma(k+1))
                let c = (b * (alpha - 1.0)).ln();
                if k <= 1e10 {
                    (c + ln_gamma(k + 1.0 - alpha) - ln_gamma(2.0 - alpha) - ln_gamma(k + 1.0))
                        .exp()
                } else {
                    (c - ln_gamma(2.0 - alpha) - alpha * lk).exp()
                }
            }),
            Law::LogTail { beta } => {
                if w <= 0.0 {
                    1.0
                } else {
                    (1.0 + w).powf(-beta)
                }
            }
            Law::Degenerate { c } => {
                if w < c.ln() {
                    1.0
                } else {
                    0.0
                }
            }
            Law::Gamma { r } => {
                let x = w.exp();
                if x.is_infinite() {
                    0.0
                } else {
                    crate::special::regularized_gamma_q(r, x)
                }
            }
            Law::PositiveStable { alpha } => stable_tail_log(alpha, w),
            Law::TwoPoint => {
                if w < 0.0 {
                    1.0
                } else if w < 2f64.ln() {
                    0.5
                } else {
                    0.0
                }
            }
        }
    }

    /// Draw one fitness value; always strictly positive.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.law {
            Law::Pareto { .. } | Law::ParetoLog { .. } => self.sample_log(rng).exp(),
            Law::YuleSimon { alpha } => {
                // X | V ~ Geometric(V) on {1,2,...} with V ~ Beta(alpha, 1)
                let v = open_unit(rng).powf(1.0 / alpha);
                if v >= 1.0 {
                    return 1.0;
                }
                let g = (open_unit(rng).ln() / (-v).ln_1p()).ceil();
                g.max(1.0)
            }
            Law::Sibuya { alpha } => {
                let v = open_unit(rng);
                discrete_inverse_tail(v, |k| self.tail_log_at_k(k, alpha, Family::Sibuya))
            }
            Law::PgfFamily { alpha, .. } => {
                let v = open_unit(rng);
                discrete_inverse_tail(v, |k| self.tail_log_at_k(k, alpha, Family::Pgf))
            }
            Law::LogTail { .. } => self.sample_log(rng).exp(),
            Law::Degenerate { c } => c,
            Law::Gamma { r } => {
                let g = rand_distr::Gamma::new(r, 1.0).expect("validated at construction");
                loop {
                    let x = g.sample(rng);
                    if x > 0.0 {
                        return x;
                    }
                }
            }
            Law::PositiveStable { alpha } => {
                // Kanter's representation
                let u = open_unit(rng);
                let e = -open_unit(rng).ln();
                let a = (alpha * PI * u).sin().powf(alpha / (1.0 - alpha))
                    * ((1.0 - alpha) * PI * u).sin()
                    / (PI * u).sin().powf(1.0 / (1.0 - alpha));
                (a / e).powf((1.0 - alpha) / alpha)
            }
            Law::TwoPoint => {
                if rng.random::<bool>() {
                    2.0
                } else {
                    1.0
                }
            }
        }
    }

    /// log X for one draw; exact in log space for the laws whose values
    /// can exceed the f64 range (the alpha = 0 family in particular).
    pub fn sample_log<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.law {
            Law::Pareto { alpha } => -open_unit(rng).ln() / alpha,
            Law::ParetoLog { alpha, c, beta, w_min } => {
                let v = open_unit(rng);
                let t_min = (c.ln() - alpha * w_min + (beta - 1.0) * w_min.ln()).exp();
                if v >= t_min {
                    return w_min;
                }
                let ln_v = v.ln();
                let h = |w: f64| c.ln() - alpha * w + (beta - 1.0) * w.ln() - ln_v;
                let mut lo = w_min;
                let mut hi = (w_min * 2.0).max(2.0);
                while h(hi) > 0.0 {
                    hi *= 2.0;
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
            Law::LogTail { beta } => open_unit(rng).powf(-1.0 / beta) - 1.0,
            Law::Degenerate { c } => c.ln(),
            Law::PositiveStable { alpha } => {
                let u = open_unit(rng);
                let e = -open_unit(rng).ln();
                let ln_a = alpha / (1.0 - alpha) * (alpha * PI * u).sin().ln()
                    + ((1.0 - alpha) * PI * u).sin().ln()
                    - (PI * u).sin().ln() / (1.0 - alpha);
                (1.0 - alpha) / alpha * (ln_a - e.ln())
            }
            _ => self.sample(rng).ln(),
        }
    }

    fn tail_log_at_k(&self, k: f64, alpha: f64, fam: Family) -> f64 {
        match fam {
            Family::Sibuya => {
                if k <= 1e10 {
                    (ln_gamma(k + 1.0 - alpha) - ln_gamma(1.0 - alpha) - ln_gamma(k + 1.0)).exp()
                } else {
                    (-ln_gamma(1.0 - alpha) - alpha * k.ln()).exp()
                }
            }
            Family::Pgf => {
                let b = match self.law {
                    Law::PgfFamily { b, .. } => b,
                    _ => unreachable!(),
                };
                if k <= 1e10 {
                    ((b * (alpha - 1.0)).ln() + ln_gamma(k + 1.0 - alpha)
                        - ln_gamma(2.0 - alpha)
                        - ln_gamma(k + 1.0))
                    .exp()
                } else {
                    ((b * (alpha - 1.0)).ln() - ln_gamma(2.0 - alpha) - alpha * k.ln()).exp()
                }
            }
        }
    }

    /// E(X^p) by quadrature of p x^(p-1) P(X>x); used where no closed form
    /// exists and the moment is finite.
    pub(crate) fn numeric_moment(&self, p: f64) -> f64 {
        use crate::quad::{integrate, integrate_decaying, QuadConfig};
        let cfg = QuadConfig { rel_tol: 1e-11, ..Default::default() };
        // log substitution: E(X^p) = int p e^{pw} tail(e^w) dw over all w,
        // plus the x in (0,1] part handled by the same formula (w < 0)
        let f = |w: f64| p * (p * w).exp() * self.tail_log(w);
        let head = integrate(&f, &[-40.0, -1.0, 0.0, 1.0, 4.0], &cfg)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        let tail = integrate_decaying(&f, 4.0, 4.0, &cfg)
            .map(|r| r.value)
            .unwrap_or(f64::NAN);
        head + tail
    }
}

enum Family {
    Sibuya,
    Pgf,
}

/// Uniform draw in (0, 1]; avoids the zero that breaks inverse transforms.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Tail of an integer law at real argument: P(X > x) = T(floor(x)).
fn discrete_tail_log(w: f64, t_at: impl Fn(f64, f64) -> f64) -> f64 {
    if w < 0.0 {
        return 1.0;
    }
    let x = w.exp();
    if x < 1.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return t_at(1e200, w); // asymptotic branch, log k = w
    }
    // snap values that are integers up to round-off of exp(log x)
    let r = x.round();
    let k = if (x - r).abs() <= 1e-9 * x.max(1.0) { r } else { x.floor() };
    t_at(k, if k > 1.0 { k.ln() } else { w })
}

/// Smallest k >= 1 with T(k) <= v, by galloping then bisection; exact
/// inverse-CDF sampling for integer laws with closed-form tails.
fn discrete_inverse_tail(v: f64, t: impl Fn(f64) -> f64) -> f64 {
    if t(1.0) <= v {
        return 1.0;
    }
    let mut lo = 1.0f64; // invariant: T(lo) > v >= T(hi)
    let mut hi = 2.0f64;
    while t(hi) > v {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return hi;
        }
    }
    while hi - lo > 1.0 {
        let mid = (lo + 0.5 * (hi - lo)).floor();
        if mid <= lo || mid >= hi {
            break; // beyond integer resolution of f64
        }
        if t(mid) > v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// One-sided stable tail from Kanter's representation:
/// P(X > e^w) = int_0^1 (1 - exp(-a(u) e^{-w alpha/(1-alpha)})) du.
fn stable_tail_log(alpha: f64, w: f64) -> f64 {
    use crate::quad::{integrate, QuadConfig};
    if w > 40.0 {
        // asymptotic x^{-alpha} / Gamma(1-alpha); relative error O(x^{-alpha})
        return (-ln_gamma(1.0 - alpha) - alpha * w).exp();
    }
    let z = (-w * alpha / (1.0 - alpha)).exp();
    let f = |u: f64| {
        if u <= 0.0 || u >= 1.0 {
            return if u >= 1.0 { 1.0 } else { 0.0 };
        }
        let a = (alpha * PI * u).sin().powf(alpha / (1.0 - alpha))
            * ((1.0 - alpha) * PI * u).sin()
            / (PI * u).sin().powf(1.0 / (1.0 - alpha));
        let t = a * z;
        if t > 700.0 {
            1.0
        } else {
            -(-t).exp_m1()
        }
    };
    let cfg = QuadConfig { rel_tol: 1e-10, max_subdivisions: 400, ..Default::default() };
    integrate(&f, &[0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0], &cfg)
        .map(|r| r.value.clamp(0.0, 1.0))
        .unwrap_or(f64::NAN)
}

/// Representative catalog instances, one or more per family, used by the
/// CLI listing and the cross-model test sweeps.
pub fn demo_catalog() -> Vec<Model> {
    vec![
        Model::pareto(3.0).unwrap(),
        Model::pareto(2.0).unwrap(),
        Model::pareto(1.5).unwrap(),
        Model::pareto(1.0).unwrap(),
        Model::pareto(0.5).unwrap(),
        Model::pareto_log(1.0, 2.0, 2.0).unwrap(),
        Model::yule_simon(2.5).unwrap(),
        Model::sibuya(0.5).unwrap(),
        Model::pgf_family(1.5, 1.0).unwrap(),
        Model::log_tail(2.0).unwrap(),
        Model::degenerate(1.0).unwrap(),
        Model::gamma(1.0).unwrap(),
        Model::positive_stable(0.5).unwrap(),
        Model::two_point(),
    ]
}

#[cfg(test)]
mod tests;
