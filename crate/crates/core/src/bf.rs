//! Bayes factors BF01 for normal estimates and t statistics, in log space.

use std::fmt;

use crate::error::{invalid, Result};
use crate::model::{AnalysisPrior, TruncatedT};
use crate::numerics::{integrate_with, ln_nct_density, ln_t_density, Tolerance, DEFAULT_REL_TOL};
use crate::Scalar;

/// A parameter estimate with its standard error, given either directly or
/// as unit variance and effective sample size (se² = σ²/n).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateInput<T> {
    UnitVariance { estimate: T, unit_variance: T, n: T },
    StandardError { estimate: T, se: T },
}

impl<T: Scalar> EstimateInput<T> {
    pub fn estimate(&self) -> T {
        match *self {
            Self::UnitVariance { estimate, .. } | Self::StandardError { estimate, .. } => estimate,
        }
    }

    /// Squared standard error.
    pub fn variance(&self) -> Result<T> {
        let v = match *self {
            Self::UnitVariance { unit_variance, n, .. } => {
                if !(unit_variance > T::zero() && n > T::zero()) {
                    return Err(invalid(format!(
                        "unit variance and n must be positive, got {unit_variance} and {n}"
                    )));
                }
                unit_variance / n
            }
            Self::StandardError { se, .. } => {
                if !(se > T::zero()) {
                    return Err(invalid(format!("standard error must be positive, got {se}")));
                }
                se * se
            }
        };
        if !self.estimate().is_finite() || !v.is_finite() {
            return Err(invalid("estimate and standard error must be finite"));
        }
        Ok(v)
    }
}

/// A Bayes factor stored as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BayesFactor<T> {
    pub ln: T,
}

impl<T: Scalar> BayesFactor<T> {
    pub fn value(&self) -> T {
        self.ln.exp()
    }

    /// The reciprocal, BF10.
    pub fn inverse(&self) -> Self {
        Self { ln: -self.ln }
    }
}

impl<T: Scalar> fmt::Display for BayesFactor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// BF01 of H0: θ = θ₀ against a point or normal prior under H1.
///
/// The normal prior gives
/// √(1 + τ²/se²) · exp[−½{(θ̂ − θ₀)²/se² − (θ̂ − μ)²/(τ² + se²)}],
/// and the point prior its τ = 0 limit, the likelihood ratio.
pub fn bf01<T: Scalar>(input: &EstimateInput<T>, null: T, prior: &AnalysisPrior<T>) -> Result<BayesFactor<T>> {
    let v = input.variance()?;
    let est = input.estimate();
    let half = T::of(0.5);
    let ln = match *prior {
        AnalysisPrior::Point { mean } => -half * ((est - null).powi(2) - (est - mean).powi(2)) / v,
        AnalysisPrior::Normal { mean, sd } => {
            let t2 = sd * sd;
            half * (t2 / v).ln_1p() - half * ((est - null).powi(2) / v - (est - mean).powi(2) / (t2 + v))
        }
        AnalysisPrior::NormalMoment { spread } => return nmbf01(input, null, spread),
        AnalysisPrior::TruncatedT(_) => {
            return Err(invalid("the t prior needs a t statistic; use tbf01"));
        }
    };
    Ok(BayesFactor { ln })
}

/// Point-prior BF01 in its linear-exponent form
/// exp[{θ̂(θ₀ − μ) − (θ₀² − μ²)/2}/se²].
pub fn bf01_point_linear<T: Scalar>(input: &EstimateInput<T>, null: T, mean: T) -> Result<BayesFactor<T>> {
    let v = input.variance()?;
    let est = input.estimate();
    let ln = (est * (null - mean) - T::of(0.5) * (null - mean) * (null + mean)) / v;
    Ok(BayesFactor { ln })
}

/// BF01 against the normal moment prior N(θ; θ₀, τ²)(θ − θ₀)²/τ²:
/// (1 + τ²/se²)^{3/2} exp(−q/2)/(1 + q), q = (θ̂ − θ₀)²/{se²(1 + se²/τ²)}.
pub fn nmbf01<T: Scalar>(input: &EstimateInput<T>, null: T, spread: T) -> Result<BayesFactor<T>> {
    if !(spread > T::zero()) {
        return Err(invalid(format!("normal moment spread must be positive, got {spread}")));
    }
    let v = input.variance()?;
    let t2 = spread * spread;
    let q = (input.estimate() - null).powi(2) / (v * (T::one() + v / t2));
    let ln = T::of(1.5) * (t2 / v).ln_1p() - T::of(0.5) * q - q.ln_1p();
    Ok(BayesFactor { ln })
}

/// Sampling design of a t test. Sample sizes are per group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TTestDesign<T> {
    OneSample { n: T },
    /// `n` is the number of pairs.
    Paired { n: T },
    TwoSample { n1: T, n2: T },
}

impl<T: Scalar> TTestDesign<T> {
    /// n such that the t statistic's noncentrality is θ√n.
    pub fn effective_n(&self) -> T {
        match *self {
            Self::OneSample { n } | Self::Paired { n } => n,
            Self::TwoSample { n1, n2 } => n1 * n2 / (n1 + n2),
        }
    }

    pub fn df(&self) -> T {
        match *self {
            Self::OneSample { n } | Self::Paired { n } => n - T::one(),
            Self::TwoSample { n1, n2 } => n1 + n2 - T::of(2.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let sizes_ok = match *self {
            Self::OneSample { n } | Self::Paired { n } => n > T::zero() && n.is_finite(),
            Self::TwoSample { n1, n2 } => n1 > T::zero() && n2 > T::zero() && n1.is_finite() && n2.is_finite(),
        };
        if !sizes_ok || !(self.df() > T::zero()) {
            return Err(invalid(format!(
                "t test needs positive degrees of freedom, got {}",
                self.df()
            )));
        }
        Ok(())
    }
}

/// BF01 of H0: θ = 0 against a truncated t prior, from a t statistic.
///
/// The numerator is the central t density at `t`; the denominator
/// integrates the noncentral t density with noncentrality θ√n against the
/// prior.
pub fn tbf01<T: Scalar>(t: T, design: &TTestDesign<T>, prior: &TruncatedT<T>) -> Result<BayesFactor<T>> {
    tbf01_with(t, design, prior, T::of(DEFAULT_REL_TOL))
}

pub fn tbf01_with<T: Scalar>(t: T, design: &TTestDesign<T>, prior: &TruncatedT<T>, rel_tol: T) -> Result<BayesFactor<T>> {
    design.validate()?;
    if !t.is_finite() {
        return Err(invalid(format!("t statistic must be finite, got {t}")));
    }
    let density = prior.density()?;
    let df = design.df();
    let sqrt_n = design.effective_n().sqrt();
    let ln_num = ln_t_density(t, df);
    let ln_den = ln_marginal_t(t, df, sqrt_n, prior, &density, rel_tol)?;
    Ok(BayesFactor { ln: ln_num - ln_den })
}

/// ln ∫ NCT_ν(t | θ√n) p(θ) dθ over the prior support.
fn ln_marginal_t<T: Scalar>(
    t: T,
    df: T,
    sqrt_n: T,
    prior: &TruncatedT<T>,
    density: &crate::numerics::TruncatedTDensity<T>,
    rel_tol: T,
) -> Result<T> {
    let (a, b) = (prior.lower, prior.upper);
    // likelihood in θ peaks near t/√n with width about √(1 + t²/2ν)/√n
    let centre = t / sqrt_n;
    let width = (T::one() + t * t / (T::of(2.0) * df)).sqrt() / sqrt_n;
    let mut points = vec![
        prior.location - T::of(12.0) * prior.scale,
        prior.location,
        prior.location + T::of(12.0) * prior.scale,
        centre - T::of(15.0) * width,
        centre - T::of(3.0) * width,
        centre,
        centre + T::of(3.0) * width,
        centre + T::of(15.0) * width,
    ];
    // likelihood peak outside the support: the mass piles up against the
    // bound, decaying at rate ≈ √n |t − θ√n| / (1 + t²/2ν) per unit θ
    for (bound, outside, dir) in [(a, centre < a, T::one()), (b, centre > b, -T::one())] {
        if outside && bound.is_finite() {
            let rate = sqrt_n * (t - bound * sqrt_n).abs() / (T::one() + t * t / (T::of(2.0) * df));
            for m in [1.0, 5.0, 30.0] {
                points.push(bound + dir * T::of(m) / rate);
            }
        }
    }
    points.retain(|p| *p > a && *p < b);
    if a.is_finite() {
        points.push(a);
    }
    if b.is_finite() {
        points.push(b);
    }
    points.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    points.dedup();

    let log_integrand = |theta: T| -> T {
        match ln_nct_density(t, df, theta * sqrt_n) {
            Ok(v) => v + density.ln_pdf(theta),
            Err(_) => T::nan(),
        }
    };
    // scale by the largest of a few probe values so the integrand is O(1)
    let probe = [centre.max(a).min(b), prior.location.max(a).min(b)];
    let offset = probe
        .iter()
        .map(|&p| log_integrand(p))
        .filter(|v| v.is_finite())
        .fold(T::neg_infinity(), T::max);
    if !offset.is_finite() {
        return Err(invalid("t prior density vanishes at its own location"));
    }
    let mut failed = false;
    let mut integrand = |theta: T| {
        let v = log_integrand(theta);
        if v.is_nan() {
            failed = true;
            return T::zero();
        }
        (v - offset).exp()
    };

    let tol = Tolerance::relative(rel_tol);
    let mut central = T::zero();
    for w in points.windows(2) {
        central = central + integrate_with(&mut integrand, w[0], w[1], tol)?.value;
    }
    let tail_tol = Tolerance::relative(rel_tol).with_abs(rel_tol * central.abs());
    let mut tails = T::zero();
    if let (Some(&first), Some(&last)) = (points.first(), points.last()) {
        if a.is_infinite() {
            tails = tails + integrate_with(&mut integrand, a, first, tail_tol)?.value;
        }
        if b.is_infinite() {
            tails = tails + integrate_with(&mut integrand, last, b, tail_tol)?.value;
        }
    } else {
        // no breakpoint inside an all-infinite support cannot happen: the
        // prior location is always finite and inside or at the boundary
        tails = integrate_with(&mut integrand, a, b, tol)?.value;
    }
    if failed {
        return Err(invalid("noncentral t density evaluation failed"));
    }
    let total = central + tails;
    if !(total > T::zero()) {
        return Err(invalid("marginal likelihood underflowed"));
    }
    Ok(offset + total.ln())
}
