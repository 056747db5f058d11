//! Two-step power for the t-test Bayes factor: find the set of t statistics
//! giving compelling evidence, then integrate the design distribution of t
//! over it.

use std::str::FromStr;

use crate::bf::{tbf01, tbf01_with, TTestDesign};
use crate::error::{invalid, Error, Result};
use crate::model::{DesignPrior, Orientation, Threshold, TruncatedT};
use crate::numerics::{find_root_bracket, integrate, nct_density, std_normal_cdf, std_normal_sf, Bracket};
use crate::Scalar;

use super::{Intermediates, PowerResult};

const BASE_GRID: usize = 512;
const MAX_GRID: usize = 8192;
const ROOT_TOL: f64 = 1e-9;
// sign detection only; crossings are refined at the default tolerance
const SCAN_REL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TTestKind {
    OneSample,
    Paired,
    TwoSample,
}

impl TTestKind {
    /// Design with `n` observations per group (or pairs).
    pub fn design<T: Scalar>(self, n: T) -> TTestDesign<T> {
        match self {
            Self::OneSample => TTestDesign::OneSample { n },
            Self::Paired => TTestDesign::Paired { n },
            Self::TwoSample => TTestDesign::TwoSample { n1: n, n2: n },
        }
    }
}

impl FromStr for TTestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "one" | "one-sample" | "onesample" => Ok(Self::OneSample),
            "paired" => Ok(Self::Paired),
            "two" | "two-sample" | "twosample" => Ok(Self::TwoSample),
            other => Err(invalid(format!(
                "t test kind must be one-sample, paired or two-sample, got {other:?}"
            ))),
        }
    }
}

/// Distribution of the future t statistic at the design stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DesignDistribution {
    /// t ~ N(μ_d√n_eff, 1 + n_eff τ_d²), treating the data variance as known.
    #[default]
    NormalApprox,
    /// t ~ NCT_ν(μ_d√n_eff); point design priors only.
    ExactNct,
}

/// Set of t statistics that count as compelling evidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuccessRegion<T> {
    /// t ≤ lower or t ≥ upper; absent sides are ∓∞.
    Tails { lower: T, upper: T },
    /// lower ≤ t ≤ upper.
    Interval { lower: T, upper: T },
}

impl<T: Scalar> SuccessRegion<T> {
    pub fn contains(&self, t: T) -> bool {
        match *self {
            Self::Tails { lower, upper } => t <= lower || t >= upper,
            Self::Interval { lower, upper } => t >= lower && t <= upper,
        }
    }

    pub fn bounds(&self) -> (T, T) {
        match *self {
            Self::Tails { lower, upper } | Self::Interval { lower, upper } => (lower, upper),
        }
    }

    /// Probability of the region under N(mean, sd²).
    pub fn normal_probability(&self, mean: T, sd: T) -> T {
        match *self {
            Self::Tails { lower, upper } => {
                let p = std_normal_cdf((lower - mean) / sd) + std_normal_sf((upper - mean) / sd);
                p.min(T::one())
            }
            Self::Interval { lower, upper } => {
                let (a, b) = ((lower - mean) / sd, (upper - mean) / sd);
                // subtract within the smaller tail
                if a >= T::zero() {
                    std_normal_sf(a) - std_normal_sf(b)
                } else {
                    std_normal_cdf(b) - std_normal_cdf(a)
                }
            }
        }
    }
}

/// The t statistics for which the t-test Bayes factor reaches the threshold:
/// BF01 ≤ k for evidence in favour of H1, BF01 ≥ k for evidence in favour of H0.
///
/// log BF01(t) − log k is scanned on a grid spaced uniformly in asinh(t)
/// (dense near zero, where crossings live, and reaching well past the
/// largest plausible noncentrality). Sign changes are refined with Brent's
/// method. A grid point that comes close to zero without a sign change
/// triggers a denser scan, up to a fixed limit.
pub fn t_success_region<T: Scalar>(
    n: T,
    kind: TTestKind,
    prior: &TruncatedT<T>,
    threshold: &Threshold<T>,
) -> Result<SuccessRegion<T>> {
    let design = kind.design(n);
    let ln_k = threshold.k().ln();
    let sign = match threshold.orientation() {
        Orientation::EvidenceForH1 => T::one(),
        Orientation::EvidenceForH0 => -T::one(),
    };
    // success where g ≤ 0
    let g = |t: T| -> Result<T> { Ok(sign * (tbf01(t, &design, prior)?.ln - ln_k)) };
    let g_scan = |t: T| -> Result<T> { Ok(sign * (tbf01_with(t, &design, prior, T::of(SCAN_REL_TOL))?.ln - ln_k)) };

    let sqrt_n = design.effective_n().sqrt();
    let reach = T::of(10.0) + sqrt_n * (prior.location.abs() + T::of(5.0) * prior.scale);
    // With prior support on θ ≥ 0 every noncentral t density at t ≤ 0 lies
    // below the central one, so BF01 > 1 > k there and only t > 0 can hold
    // evidence for H1 (mirrored for θ ≤ 0).
    let for_h1 = threshold.orientation() == Orientation::EvidenceForH1;
    let span = if for_h1 && prior.lower >= T::zero() {
        Span::Positive
    } else if for_h1 && prior.upper <= T::zero() {
        Span::Negative
    } else if prior.is_symmetric() {
        Span::Mirrored
    } else {
        Span::Full
    };
    let symmetric = span == Span::Mirrored;

    let mut points = BASE_GRID;
    loop {
        let grid = asinh_grid(reach, points, span);
        let mut values = Vec::with_capacity(grid.len());
        for &t in &grid {
            values.push(g_scan(t)?);
        }
        let (grid, values) = if symmetric { mirror(grid, values) } else { (grid, values) };

        let mut brackets = Vec::new();
        let mut near_miss = false;
        for i in 0..grid.len() - 1 {
            let (a, b) = (values[i], values[i + 1]);
            if (a <= T::zero()) != (b <= T::zero()) {
                brackets.push(i);
            } else if i > 0 {
                let prev = values[i - 1];
                let same_side = (prev <= T::zero()) == (a <= T::zero());
                let dip = a.abs() < prev.abs() && a.abs() < b.abs();
                let step = (a - prev).abs().max((b - a).abs());
                if same_side && dip && a.abs() < step {
                    near_miss = true;
                }
            }
        }
        if brackets.len() > 2 {
            return Err(Error::TooManyCrossings { found: brackets.len() });
        }
        if near_miss && points < MAX_GRID {
            points *= 2;
            continue;
        }

        let mut roots = Vec::with_capacity(brackets.len());
        for &i in &brackets {
            let (lo, hi) = (grid[i], grid[i + 1]);
            roots.push(refine(&g, lo, hi, g(lo)?, g(hi)?, symmetric, &roots)?);
        }
        let left_success = values[0] <= T::zero();
        let inf = T::infinity();
        return Ok(match (roots.len(), left_success) {
            (0, true) => SuccessRegion::Interval { lower: -inf, upper: inf },
            (0, false) => SuccessRegion::Tails { lower: -inf, upper: inf },
            (1, true) => SuccessRegion::Tails { lower: roots[0], upper: inf },
            (1, false) => SuccessRegion::Tails { lower: -inf, upper: roots[0] },
            (_, true) => SuccessRegion::Tails { lower: roots[0], upper: roots[1] },
            (_, false) => SuccessRegion::Interval { lower: roots[0], upper: roots[1] },
        });
    }
}

fn refine<T: Scalar>(
    g: &impl Fn(T) -> Result<T>,
    lo: T,
    hi: T,
    f_lo: T,
    f_hi: T,
    symmetric: bool,
    found: &[T],
) -> Result<T> {
    // the mirror image of an earlier root of a symmetric function
    if symmetric {
        if let Some(&r) = found.first() {
            if -r >= lo && -r <= hi {
                return Ok(-r);
            }
        }
    }
    let mut failure = None;
    let root = find_root_bracket(
        |t| match g(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::nan()
            }
        },
        Bracket { lo, hi, f_lo, f_hi },
        T::of(ROOT_TOL),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root?)
}

/// Part of the t axis that has to be scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Span {
    Full,
    /// t ≥ 0, mirrored afterwards.
    Mirrored,
    Positive,
    Negative,
}

/// Grid uniform in asinh(t) over [−reach, reach] (or the half of it the
/// span needs), at the resolution of `points` over the full range.
fn asinh_grid<T: Scalar>(reach: T, points: usize, span: Span) -> Vec<T> {
    let top = reach.asinh();
    let half = points / 2;
    let positive = (0..=half).map(|i| (top * T::of(i as f64) / T::of(half as f64)).sinh());
    match span {
        Span::Full => (0..=points)
            .map(|i| (top * (T::of(2.0 * i as f64) / T::of(points as f64) - T::one())).sinh())
            .collect(),
        Span::Mirrored | Span::Positive => positive.collect(),
        Span::Negative => positive.rev().map(|t| -t).collect(),
    }
}

fn mirror<T: Scalar>(grid: Vec<T>, values: Vec<T>) -> (Vec<T>, Vec<T>) {
    let mut g: Vec<T> = grid.iter().skip(1).rev().map(|&t| -t).collect();
    let mut v: Vec<T> = values.iter().skip(1).rev().copied().collect();
    g.extend(grid);
    v.extend(values);
    (g, v)
}

/// Power of the t-test Bayes factor with `n` observations per group.
///
/// Under the default normal approximation the future t statistic is
/// N(μ_d√n_eff, 1 + n_eff τ_d²), with n_eff = n/2 for two groups and n
/// otherwise.
pub fn power_t<T: Scalar>(
    n: T,
    kind: TTestKind,
    prior: &TruncatedT<T>,
    design: &DesignPrior<T>,
    threshold: &Threshold<T>,
    distribution: DesignDistribution,
) -> Result<PowerResult<T>> {
    if distribution == DesignDistribution::ExactNct && !design.is_point() {
        return Err(invalid("the exact noncentral t design distribution needs a point design prior"));
    }
    let region = t_success_region(n, kind, prior, threshold)?;
    let d = kind.design(n);
    let n_eff = d.effective_n();
    let mean = design.mean * n_eff.sqrt();
    let probability = match distribution {
        DesignDistribution::NormalApprox => {
            let sd = (T::one() + n_eff * design.sd * design.sd).sqrt();
            region.normal_probability(mean, sd)
        }
        DesignDistribution::ExactNct => nct_region_probability(&region, d.df(), mean)?,
    };
    let (t_lo, t_hi) = region.bounds();
    Ok(PowerResult {
        probability: probability.max(T::zero()).min(T::one()),
        limit: None,
        intermediates: Intermediates::TTest { t_lo, t_hi },
    })
}

fn nct_region_probability<T: Scalar>(region: &SuccessRegion<T>, df: T, ncp: T) -> Result<T> {
    let tol = T::of(1e-10);
    let density = |x: T| nct_density(x, df, ncp).unwrap_or_else(|_| T::zero());
    let mass = |a: T, b: T| -> Result<T> {
        if a >= b {
            return Ok(T::zero());
        }
        // split at the mode region so the adaptive rule sees the peak
        let mid = ncp.max(a).min(b);
        let left = if mid > a { integrate(density, a, mid, tol)? } else { T::zero() };
        let right = if b > mid { integrate(density, mid, b, tol)? } else { T::zero() };
        Ok(left + right)
    };
    let inf = T::infinity();
    Ok(match *region {
        SuccessRegion::Tails { lower, upper } => mass(-inf, lower)? + mass(upper, inf)?,
        SuccessRegion::Interval { lower, upper } => mass(lower, upper)?,
    }
    .min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_prior_gives_symmetric_region() {
        let prior = TruncatedT::cauchy(1.0 / 2f64.sqrt()).unwrap();
        let th = Threshold::for_h1(1.0 / 3.0).unwrap();
        let region = t_success_region(30.0, TTestKind::TwoSample, &prior, &th).unwrap();
        let SuccessRegion::Tails { lower, upper } = region else { panic!("{region:?}") };
        assert_eq!(lower, -upper);
        let bf = tbf01(upper, &TTestKind::TwoSample.design(30.0), &prior).unwrap();
        assert!((bf.value() / th.k() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn one_sided_prior_has_one_boundary() {
        let prior = TruncatedT::half_cauchy(1.0 / 2f64.sqrt()).unwrap();
        let th = Threshold::for_h1(1.0 / 6.0).unwrap();
        let region = t_success_region(50.0, TTestKind::TwoSample, &prior, &th).unwrap();
        let SuccessRegion::Tails { lower, upper } = region else { panic!("{region:?}") };
        assert_eq!(lower, f64::NEG_INFINITY);
        assert!(upper > 0.0);
        let bf = tbf01(upper, &TTestKind::TwoSample.design(50.0), &prior).unwrap();
        assert!((bf.value() / th.k() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn positive_support_never_favours_h1_at_negative_t() {
        let prior = TruncatedT::half_cauchy(1.0 / 2f64.sqrt()).unwrap();
        for n in [3.0, 40.0, 5000.0] {
            for t in [0.0, -0.05, -1.0, -4.0, -30.0] {
                let bf = tbf01(t, &TTestKind::TwoSample.design(n), &prior).unwrap();
                assert!(bf.ln > 0.0, "n = {n}, t = {t}: {bf:?}");
            }
        }
        // evidence for H0 scans the whole axis; BF01 grows without bound as
        // t → −∞, so the region is a single lower tail
        let th = Threshold::for_h0(3.0).unwrap();
        let region = t_success_region(50.0, TTestKind::TwoSample, &prior, &th).unwrap();
        let SuccessRegion::Tails { lower, upper } = region else { panic!("{region:?}") };
        assert_eq!(upper, f64::INFINITY);
        let bf = tbf01(lower, &TTestKind::TwoSample.design(50.0), &prior).unwrap();
        assert!((bf.value() / 3.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn null_design_gives_type_one_error() {
        let prior = TruncatedT::cauchy(1.0 / 2f64.sqrt()).unwrap();
        let th = Threshold::for_h1(1.0 / 3.0).unwrap();
        let design = DesignPrior::point(0.0).unwrap();
        let r = power_t(40.0, TTestKind::TwoSample, &prior, &design, &th, DesignDistribution::NormalApprox).unwrap();
        let Intermediates::TTest { t_lo, .. } = r.intermediates else { panic!() };
        assert!((r.probability - 2.0 * std_normal_cdf(t_lo)).abs() < 1e-15);
    }

    #[test]
    fn evidence_for_null_is_an_interval() {
        let prior = TruncatedT::cauchy(1.0 / 2f64.sqrt()).unwrap();
        let th = Threshold::for_h0(3.0).unwrap();
        let region = t_success_region(100.0, TTestKind::OneSample, &prior, &th).unwrap();
        let SuccessRegion::Interval { lower, upper } = region else { panic!("{region:?}") };
        assert!(lower < 0.0 && upper > 0.0);
        // complementary to the H1 probability at the same k is not defined (k > 1),
        // but the region must contain zero and exclude large |t|
        assert!(region.contains(0.0) && !region.contains(10.0));
    }

    #[test]
    fn exact_design_requires_point_prior() {
        let prior = TruncatedT::cauchy(1.0).unwrap();
        let th = Threshold::for_h1(0.1).unwrap();
        let design = DesignPrior::normal(0.5, 0.1).unwrap();
        assert!(power_t(20.0, TTestKind::OneSample, &prior, &design, &th, DesignDistribution::ExactNct).is_err());
    }
}
