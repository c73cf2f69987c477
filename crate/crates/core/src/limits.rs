//! Limiting coalescent objects: Lambda-measure moment functionals for the
//! Kingman / beta / Bolthausen-Sznitman / star-shaped cases, the
//! discrete-time Poisson-Dirichlet(alpha, 0) transition probabilities, and
//! the six-branch prediction for the coalescence probability c_N.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Model, TailIndex};
use crate::slowly_varying::{ell_star, solve_a_n, RvError};
use crate::special::ln_gamma;

#[derive(Debug, Error)]
pub enum LimitError {
    #[error("lambda moments need k >= 2, got {0}")]
    MomentOrder(u32),
    #[error("Poisson-Dirichlet parameter must lie in (0,1), got {0}")]
    PdParameter(f64),
    #[error("group sizes must be >= 1")]
    GroupSizes,
    #[error("model metadata inconsistent: {0}")]
    Inconsistent(String),
    #[error("prediction needs {quantity} for {model}, which is not finite")]
    MissingMoment { model: String, quantity: &'static str },
    #[error("model {0} has no regularly varying tail data")]
    NoTailData(String),
    #[error(transparent)]
    Rv(#[from] RvError),
}

/// The Lambda measure of a multiple-merger coalescent limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LambdaSpec {
    /// Kingman: Dirac at 0.
    DiracAtZero,
    /// beta(2-alpha, alpha), alpha in (1,2).
    Beta { alpha: f64 },
    /// Bolthausen-Sznitman: uniform on [0,1].
    Uniform,
    /// Star-shaped: Dirac at 1.
    DiracAtOne,
}

/// Poisson-Dirichlet (alpha, 0) simultaneous-merger limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdSpec {
    pub alpha: f64,
}

impl PdSpec {
    pub fn new(alpha: f64) -> Result<Self, LimitError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(LimitError::PdParameter(alpha));
        }
        Ok(PdSpec { alpha })
    }
}

/// int x^(k-2) Lambda(dx) for k >= 2; the limit of Phi_1^(N)(k)/c_N.
pub fn lambda_moment(spec: LambdaSpec, k: u32) -> Result<f64, LimitError> {
    if k < 2 {
        return Err(LimitError::MomentOrder(k));
    }
    let kf = k as f64;
    Ok(match spec {
        LambdaSpec::DiracAtZero => {
            if k == 2 {
                1.0
            } else {
                0.0
            }
        }
        LambdaSpec::Beta { alpha } => {
            (ln_gamma(kf - alpha) - ln_gamma(kf) - ln_gamma(2.0 - alpha)).exp()
        }
        LambdaSpec::Uniform => 1.0 / (kf - 1.0),
        LambdaSpec::DiracAtOne => 1.0,
    })
}

/// Continuous-time Lambda-coalescent rate lambda_{b,k} =
/// int x^(k-2) (1-x)^(b-k) Lambda(dx), 2 <= k <= b; block-counting
/// diagnostics only.
pub fn lambda_rate(spec: LambdaSpec, b: u32, k: u32) -> Result<f64, LimitError> {
    if k < 2 || k > b {
        return Err(LimitError::MomentOrder(k));
    }
    let (bf, kf) = (b as f64, k as f64);
    Ok(match spec {
        LambdaSpec::DiracAtZero => {
            if k == 2 {
                1.0
            } else {
                0.0
            }
        }
        LambdaSpec::Beta { alpha } => (ln_gamma(kf - alpha) + ln_gamma(bf - kf + alpha)
            - ln_gamma(bf)
            - ln_gamma(2.0 - alpha)
            - ln_gamma(alpha))
        .exp(),
        LambdaSpec::Uniform => {
            (ln_gamma(kf - 1.0) + ln_gamma(bf - kf + 1.0) - ln_gamma(bf)).exp()
        }
        LambdaSpec::DiracAtOne => {
            if k == b {
                1.0
            } else {
                0.0
            }
        }
    })
}

/// One-step transition probability of the discrete-time PD(alpha, 0)
/// coalescent: phi_j(k_1..k_j) = alpha^(j-1) Gamma(j)/Gamma(k)
/// prod_i Gamma(k_i - alpha)/Gamma(1 - alpha), k = sum k_i.
pub fn pd_transition(alpha: f64, ks: &[u32]) -> Result<f64, LimitError> {
    let pd = PdSpec::new(alpha)?;
    if ks.is_empty() || ks.iter().any(|&k| k == 0) {
        return Err(LimitError::GroupSizes);
    }
    let j = ks.len() as f64;
    let k: u32 = ks.iter().sum();
    let mut ln = (j - 1.0) * pd.alpha.ln() + ln_gamma(j) - ln_gamma(k as f64);
    for &ki in ks {
        ln += ln_gamma(ki as f64 - alpha) - ln_gamma(1.0 - alpha);
    }
    Ok(ln.exp())
}

/// Residual of the consistency relation applied to the PD transition law
/// (the N-free analogue of the finite-N relation).
pub fn pd_consistency_check(alpha: f64, ks: &[u32]) -> Result<f64, LimitError> {
    let base = pd_transition(alpha, ks)?;
    let mut ext = ks.to_vec();
    ext.push(1);
    let mut sum = pd_transition(alpha, &ext)?;
    for i in 0..ks.len() {
        let mut bumped = ks.to_vec();
        bumped[i] += 1;
        sum += pd_transition(alpha, &bumped)?;
    }
    Ok(base - sum)
}

/// Theorem-1 regime labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Regime {
    /// E(X^2) < inf: Kingman, c_N ~ rho/(mu^2 N).
    KingmanMoment,
    /// alpha = 2 with infinite second moment: Kingman, c_N ~ 2 ell*(N)/(mu^2 N).
    KingmanAlpha2,
    /// alpha in (1,2): beta(2-alpha, alpha) coalescent.
    Beta { alpha: f64 },
    /// alpha = 1: Bolthausen-Sznitman.
    BolthausenSznitman,
    /// alpha in (0,1): discrete-time Poisson-Dirichlet(alpha, 0).
    PoissonDirichlet { alpha: f64 },
    /// alpha = 0: discrete-time star-shaped.
    StarShaped,
}

impl Regime {
    pub fn label(&self) -> String {
        match self {
            Regime::KingmanMoment => "kingman".into(),
            Regime::KingmanAlpha2 => "kingman-alpha2".into(),
            Regime::Beta { alpha } => format!("beta({},{alpha})", 2.0 - alpha),
            Regime::BolthausenSznitman => "bolthausen-sznitman".into(),
            Regime::PoissonDirichlet { alpha } => format!("poisson-dirichlet({alpha})"),
            Regime::StarShaped => "star-shaped".into(),
        }
    }

    /// The Lambda measure for the multiple-merger regimes; None for the
    /// simultaneous-merger limits (v) and (vi)'s discrete-time star case
    /// is still expressible, and for PD there is no Lambda.
    pub fn lambda(&self) -> Option<LambdaSpec> {
        match self {
            Regime::KingmanMoment | Regime::KingmanAlpha2 => Some(LambdaSpec::DiracAtZero),
            Regime::Beta { alpha } => Some(LambdaSpec::Beta { alpha: *alpha }),
            Regime::BolthausenSznitman => Some(LambdaSpec::Uniform),
            Regime::StarShaped => Some(LambdaSpec::DiracAtOne),
            Regime::PoissonDirichlet { .. } => None,
        }
    }
}

/// Classify a model into its Theorem-1 regime from declared metadata.
pub fn classify(model: &Model) -> Result<Regime, LimitError> {
    let rho_finite = model.second_moment().is_some();
    match model.tail_index() {
        TailIndex::FiniteSecondMoment => {
            if !rho_finite {
                return Err(LimitError::Inconsistent(format!(
                    "{} declares the finite-second-moment marker but no finite E(X^2)",
                    model.spec_string()
                )));
            }
            Ok(Regime::KingmanMoment)
        }
        TailIndex::Index(alpha) => {
            if rho_finite {
                if alpha < 2.0 {
                    return Err(LimitError::Inconsistent(format!(
                        "{}: alpha = {alpha} < 2 cannot have finite E(X^2)",
                        model.spec_string()
                    )));
                }
                return Ok(Regime::KingmanMoment);
            }
            if alpha > 2.0 {
                return Err(LimitError::Inconsistent(format!(
                    "{}: alpha = {alpha} > 2 forces a finite E(X^2)",
                    model.spec_string()
                )));
            }
            if alpha == 2.0 {
                Ok(Regime::KingmanAlpha2)
            } else if alpha > 1.0 {
                Ok(Regime::Beta { alpha })
            } else if alpha == 1.0 {
                Ok(Regime::BolthausenSznitman)
            } else if alpha > 0.0 {
                Ok(Regime::PoissonDirichlet { alpha })
            } else {
                Ok(Regime::StarShaped)
            }
        }
    }
}

/// Predicted coalescence probability per the six-branch asymptotic table.
pub fn predicted_cn(model: &Model, n_pop: u64) -> Result<(f64, Regime), LimitError> {
    let regime = classify(model)?;
    let n = n_pop as f64;
    let need_mu = || {
        model.mean().ok_or(LimitError::MissingMoment {
            model: model.spec_string(),
            quantity: "E(X)",
        })
    };
    let ell = || {
        model
            .slowly_varying()
            .ok_or_else(|| LimitError::NoTailData(model.spec_string()))
    };
    let value = match regime {
        Regime::KingmanMoment => {
            let mu = need_mu()?;
            let rho = model.second_moment().ok_or(LimitError::MissingMoment {
                model: model.spec_string(),
                quantity: "E(X^2)",
            })?;
            rho / (mu * mu * n)
        }
        Regime::KingmanAlpha2 => {
            let mu = need_mu()?;
            2.0 * ell_star(&ell()?, n)? / (mu * mu * n)
        }
        Regime::Beta { alpha } => {
            let mu = need_mu()?;
            (ln_gamma(2.0 - alpha) + ln_gamma(alpha + 1.0)).exp() * ell()?.eval(n)
                / (mu.powf(alpha) * n.powf(alpha - 1.0))
        }
        Regime::BolthausenSznitman => {
            let ell = ell()?;
            let a_n = solve_a_n(&ell, n_pop)?;
            ell.eval(a_n) / ell_star(&ell, a_n)?
        }
        Regime::PoissonDirichlet { alpha } => 1.0 - alpha,
        Regime::StarShaped => 1.0,
    };
    Ok((value, regime))
}
