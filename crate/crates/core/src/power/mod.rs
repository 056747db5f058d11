//! Probability of compelling evidence, Pr(BF01 ≤ k), as a function of n.
//!
//! The future estimate is predictively N(μ_d, τ_d² + σ²/n) under a design
//! prior N(μ_d, τ_d²). For evidence in favour of H0 (k > 1) the functions
//! return Pr(BF01 ≥ k), one minus the H1 probability at the same k.

mod ttest;

pub use ttest::{power_t, t_success_region, DesignDistribution, SuccessRegion, TTestKind};

use crate::error::{invalid, Error, Result};
use crate::model::{predictive_sd, AnalysisPrior, DesignPrior, Orientation, TestSpec};
use crate::numerics::{lambert_w0_exp, std_normal_cdf, std_normal_sf};
use crate::Scalar;

/// Everything needed to evaluate a closed-form power function.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerQuery<T> {
    pub test: TestSpec<T>,
    pub analysis: AnalysisPrior<T>,
    pub design: DesignPrior<T>,
    pub n: T,
}

impl<T: Scalar> PowerQuery<T> {
    pub fn new(test: TestSpec<T>, analysis: AnalysisPrior<T>, design: DesignPrior<T>, n: T) -> Self {
        Self {
            test,
            analysis,
            design,
            n,
        }
    }

    /// The same query at another sample size.
    pub fn at(&self, n: T) -> Self {
        Self { n, ..self.clone() }
    }

    fn check_n(&self) -> Result<()> {
        if self.n > T::zero() && !self.n.is_nan() {
            Ok(())
        } else {
            Err(invalid(format!("sample size must be positive, got {}", self.n)))
        }
    }
}

/// Quantities computed on the way to the probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intermediates<T> {
    /// Standardized boundary of the one-sided success region.
    Point { z: T },
    /// Standardized mean M and squared boundary X of the two-sided region.
    Normal { m: T, x: T },
    NormalMoment { y: T, a: T },
    /// Boundaries of the success region on the t scale.
    TTest { t_lo: T, t_hi: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerResult<T> {
    pub probability: T,
    /// Power as n → ∞, where known in closed form.
    pub limit: Option<T>,
    pub intermediates: Intermediates<T>,
}

impl<T: Scalar> PowerResult<T> {
    /// Probability of the complementary event at the same threshold.
    pub fn complement(&self) -> Self {
        Self {
            probability: T::one() - self.probability,
            limit: self.limit.map(|l| T::one() - l),
            intermediates: self.intermediates,
        }
    }

    fn oriented(self, orientation: Orientation) -> Self {
        match orientation {
            Orientation::EvidenceForH1 => self,
            Orientation::EvidenceForH0 => self.complement(),
        }
    }
}

/// Power for whichever closed form applies to the analysis prior.
pub fn power<T: Scalar>(query: &PowerQuery<T>) -> Result<PowerResult<T>> {
    match query.analysis {
        AnalysisPrior::Point { .. } => power_point_analysis(query),
        AnalysisPrior::Normal { .. } => power_normal_analysis(query),
        AnalysisPrior::NormalMoment { .. } => power_nm_analysis(query),
        AnalysisPrior::TruncatedT(_) => Err(invalid(
            "the t prior has no closed-form power; use power_t",
        )),
    }
}

/// Power when the analysis prior is a point mass at μ ≠ θ₀.
///
/// BF01 ≤ k is a one-sided condition on the estimate, so the power is
/// 1 − Φ(Z) for μ > θ₀ and Φ(Z) for μ < θ₀ with
/// Z = {σ² log k / (n(θ₀ − μ)) + (θ₀ + μ)/2 − μ_d} / √(τ_d² + σ²/n).
pub fn power_point_analysis<T: Scalar>(query: &PowerQuery<T>) -> Result<PowerResult<T>> {
    query.check_n()?;
    let mu = point_mean(query)?;
    let PowerQuery { test, design, n, .. } = query;
    let theta0 = test.null;
    let s = predictive_sd(design, *n, test.unit_variance);
    let z = (test.unit_variance * test.k().ln() / (*n * (theta0 - mu)) + T::of(0.5) * (theta0 + mu) - design.mean) / s;
    let probability = if mu > theta0 { std_normal_sf(z) } else { std_normal_cdf(z) };
    let limit = point_limit_h1(theta0, mu, design);
    Ok(PowerResult {
        probability,
        limit: Some(limit),
        intermediates: Intermediates::Point { z },
    }
    .oriented(test.orientation()))
}

/// Limiting power of [`power_point_analysis`] as n → ∞.
///
/// With τ_d > 0 this is 1 − Φ(Z_lim) (or Φ(Z_lim) for μ < θ₀) with
/// Z_lim = (θ₀ + μ − 2μ_d)/(2τ_d); a point design prior gives 1, ½ or 0
/// depending on which side of the midpoint (θ₀ + μ)/2 the design mean lies.
pub fn power_limit_point_analysis<T: Scalar>(test: &TestSpec<T>, analysis: &AnalysisPrior<T>, design: &DesignPrior<T>) -> Result<T> {
    let AnalysisPrior::Point { mean } = *analysis else {
        return Err(invalid("limiting power formula requires a point analysis prior"));
    };
    if mean == test.null {
        return Err(invalid("point analysis prior must differ from the null value"));
    }
    let limit = point_limit_h1(test.null, mean, design);
    Ok(match test.orientation() {
        Orientation::EvidenceForH1 => limit,
        Orientation::EvidenceForH0 => T::one() - limit,
    })
}

/// Power as n → ∞ for any analysis prior, in the test's orientation.
///
/// The normal, normal moment and t priors give consistent Bayes factors, so
/// the limit is one unless the design prior is the point null.
pub fn limiting_power<T: Scalar>(test: &TestSpec<T>, analysis: &AnalysisPrior<T>, design: &DesignPrior<T>) -> Result<T> {
    if let AnalysisPrior::Point { .. } = analysis {
        return power_limit_point_analysis(test, analysis, design);
    }
    let limit = consistent_limit_h1(test.null, design);
    Ok(match test.orientation() {
        Orientation::EvidenceForH1 => limit,
        Orientation::EvidenceForH0 => T::one() - limit,
    })
}

fn point_limit_h1<T: Scalar>(theta0: T, mu: T, design: &DesignPrior<T>) -> T {
    let half = T::of(0.5);
    if design.is_point() {
        let mid = half * (theta0 + mu);
        let above = if mu > theta0 { design.mean > mid } else { design.mean < mid };
        if design.mean == mid {
            half
        } else if above {
            T::one()
        } else {
            T::zero()
        }
    } else {
        let z = (theta0 + mu - T::of(2.0) * design.mean) / (T::of(2.0) * design.sd);
        if mu > theta0 {
            std_normal_sf(z)
        } else {
            std_normal_cdf(z)
        }
    }
}

fn point_mean<T: Scalar>(query: &PowerQuery<T>) -> Result<T> {
    let AnalysisPrior::Point { mean } = query.analysis else {
        return Err(invalid("expected a point analysis prior"));
    };
    if mean == query.test.null {
        return Err(invalid(
            "point analysis prior equals the null value; the power function is undefined",
        ));
    }
    Ok(mean)
}

/// Power when the analysis prior is N(μ, τ²):
/// Φ(−√X − M) + Φ(−√X + M) with
/// M = {μ_d − θ₀ − σ²(θ₀ − μ)/(nτ²)} / √(τ_d² + σ²/n) and
/// X = {log(1 + nτ²/σ²) + (θ₀ − μ)²/τ² − log k²}(1 + σ²/(nτ²)) σ²/(nτ_d² + σ²).
///
/// X < 0 means every estimate yields BF01 ≤ k, so the power is one.
pub fn power_normal_analysis<T: Scalar>(query: &PowerQuery<T>) -> Result<PowerResult<T>> {
    query.check_n()?;
    let AnalysisPrior::Normal { mean: mu, sd: tau } = query.analysis else {
        return Err(invalid("expected a normal analysis prior"));
    };
    let PowerQuery { test, design, n, .. } = query;
    let (theta0, s2, n) = (test.null, test.unit_variance, *n);
    let t2 = tau * tau;
    let ratio = s2 / (n * t2);
    let m = (design.mean - theta0 - ratio * (theta0 - mu)) / predictive_sd(design, n, s2);
    let x = ((n * t2 / s2).ln_1p() + (theta0 - mu).powi(2) / t2 - T::of(2.0) * test.k().ln())
        * (T::one() + ratio)
        * s2
        / (n * design.sd * design.sd + s2);
    let probability = two_sided(x, m);
    Ok(PowerResult {
        probability,
        limit: Some(consistent_limit_h1(theta0, design)),
        intermediates: Intermediates::Normal { m, x },
    }
    .oriented(test.orientation()))
}

/// Power when the analysis prior is the normal moment prior with spread τ:
/// Φ(−√Y − A) + Φ(−√Y + A) with A = (μ_d − θ₀)/√(τ_d² + σ²/n) and
/// Y = {2 W₀((1 + nτ²/σ²)^{3/2} √e / (2k)) − 1}(1 + σ²/(nτ²)) / (1 + nτ_d²/σ²).
///
/// A negative bracket means BF01 ≤ k for every estimate (BF01 is bounded by
/// (1 + nτ²/σ²)^{3/2} ≤ k), so the power is one.
pub fn power_nm_analysis<T: Scalar>(query: &PowerQuery<T>) -> Result<PowerResult<T>> {
    query.check_n()?;
    let AnalysisPrior::NormalMoment { spread: tau } = query.analysis else {
        return Err(invalid("expected a normal moment analysis prior"));
    };
    let PowerQuery { test, design, n, .. } = query;
    let (theta0, s2, n) = (test.null, test.unit_variance, *n);
    let t2 = tau * tau;
    let half = T::of(0.5);
    // W₀ of exp(L), formed in log space so large n cannot overflow
    let log_arg = T::of(1.5) * (n * t2 / s2).ln_1p() + half - (T::of(2.0) * test.k()).ln();
    let w = lambert_w0_exp(log_arg);
    let y = (T::of(2.0) * w - T::one()) * (T::one() + s2 / (n * t2)) / (T::one() + n * design.sd * design.sd / s2);
    let a = (design.mean - theta0) / predictive_sd(design, n, s2);
    let probability = two_sided(y, a);
    Ok(PowerResult {
        probability,
        limit: Some(consistent_limit_h1(theta0, design)),
        intermediates: Intermediates::NormalMoment { y, a },
    }
    .oriented(test.orientation()))
}

/// Pr(|W| ≥ √x) for W ~ N(m, 1); one when x ≤ 0.
fn two_sided<T: Scalar>(x: T, m: T) -> T {
    if !(x > T::zero()) {
        return T::one();
    }
    let r = x.sqrt();
    (std_normal_cdf(-r - m) + std_normal_cdf(-r + m)).min(T::one())
}

/// Limit of Pr(BF01 ≤ k) for the consistent normal and normal moment Bayes
/// factors: one unless the data come from the point null itself.
fn consistent_limit_h1<T: Scalar>(theta0: T, design: &DesignPrior<T>) -> T {
    if design.is_point_null(theta0) {
        T::zero()
    } else {
        T::one()
    }
}

/// Error for a power target that no finite sample size reaches.
pub(crate) fn infeasible<T: Scalar>(target: T, limit: T, reason: impl Into<String>) -> Error {
    Error::Infeasible {
        target: target.to_f64_lossy(),
        limit: limit.to_f64_lossy(),
        reason: reason.into(),
    }
}
