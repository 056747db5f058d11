//! Sample size determination: closed forms where they exist, a bracketed
//! root search on log n everywhere else.

use crate::error::{invalid, Error, Result};
use crate::model::{AnalysisPrior, DesignPrior, Orientation, TestSpec, Threshold, TruncatedT};
use crate::numerics::{find_root_bracket, lambert_w, std_normal_cdf, std_normal_quantile, Bracket, Branch};
use crate::power::{
    infeasible, limiting_power, power, power_limit_point_analysis, power_normal_analysis, power_t, DesignDistribution,
    PowerQuery, TTestKind,
};
use crate::Scalar;

/// How a sample size was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Point analysis prior, normal design prior.
    PointGeneral,
    /// Point analysis prior, point design prior.
    PointDesignPoint,
    /// Point analysis prior with the design prior fixed at the same value.
    PointMatched,
    /// Lambert-W approximation for a local normal prior.
    LocalNormal,
    RootSearch,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::PointGeneral => "closed form (point analysis, normal design)",
            Self::PointDesignPoint => "closed form (point analysis, point design)",
            Self::PointMatched => "closed form (point analysis, matched design)",
            Self::LocalNormal => "Lambert W approximation (local normal prior)",
            Self::RootSearch => "root search",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Feasibility<T> {
    Feasible { limit: Option<T> },
    /// For the Lambert-W formula `limit` is the smallest target in its domain.
    Infeasible { limit: T },
}

impl<T> Feasibility<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible { .. })
    }
}

/// Which root of the quadratic in √n to take for point analysis priors.
/// The minus root only matters for targets below 50% when the limiting
/// power exceeds 50%.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RootChoice {
    #[default]
    Plus,
    Minus,
}

/// Bounds and tolerance for the root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions<T> {
    pub lo: T,
    pub hi: T,
    /// Absolute tolerance on n.
    pub tol: T,
}

impl<T: Scalar> Default for SearchOptions<T> {
    fn default() -> Self {
        Self {
            lo: T::one(),
            hi: T::of(1e8),
            tol: T::of(1e-6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement<T> {
    pub n_real: T,
    pub n_integer: u64,
    pub achieved_power: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSizeResult<T> {
    pub n_real: T,
    /// Smallest integer at or above `n_real`, bumped when rounding noise
    /// leaves the achieved power short of the target.
    pub n_integer: u64,
    pub method: Method,
    pub target: T,
    /// Exact power at `n_integer`.
    pub achieved_power: T,
    pub limit: Option<T>,
    /// Lambert-W results: the exact-power root search answer.
    pub refined: Option<Refinement<T>>,
    /// Lambert-W results: the unit information sample size n_{k,β}.
    pub unit_information_n: Option<T>,
}

fn check_target<T: Scalar>(target: T) -> Result<()> {
    if target > T::zero() && target < T::one() {
        Ok(())
    } else {
        Err(invalid(format!("target power must lie in (0, 1), got {target}")))
    }
}

fn ceil_u64<T: Scalar>(n: T) -> u64 {
    n.to_f64_lossy().ceil().max(1.0) as u64
}

/// Feasibility of `target`: compares it with the limiting power.
pub fn feasibility<T: Scalar>(
    test: &TestSpec<T>,
    analysis: &AnalysisPrior<T>,
    design: &DesignPrior<T>,
    target: T,
) -> Result<Feasibility<T>> {
    check_target(target)?;
    let limit = limiting_power(test, analysis, design)?;
    Ok(if target < limit {
        Feasibility::Feasible { limit: Some(limit) }
    } else {
        Feasibility::Infeasible { limit }
    })
}

/// Domain check for the Lambert-W formula: −k² z²_{(1−β)/2} ≥ −1/e, i.e.
/// target ≥ 2Φ(−1/(k√e)).
pub fn local_normal_feasibility<T: Scalar>(k: T, target: T) -> Result<Feasibility<T>> {
    check_target(target)?;
    if !(k > T::zero() && k.is_finite()) {
        return Err(invalid(format!("threshold must be positive and finite, got {k}")));
    }
    let boundary = lambert_boundary(k);
    let z = std_normal_quantile(T::of(0.5) * target)?;
    Ok(if -(k * k * z * z) >= -(-T::one()).exp() {
        Feasibility::Feasible { limit: None }
    } else {
        Feasibility::Infeasible { limit: boundary }
    })
}

fn lambert_boundary<T: Scalar>(k: T) -> T {
    T::of(2.0) * std_normal_cdf(-(k * T::of(0.5).exp()).recip())
}

/// Frequentist per-group sample size n = 2σ²(z_{1−α/2} + z_{1−β})²/effect²
/// for a two-sided z-test.
pub fn freq_n<T: Scalar>(alpha: T, target: T, effect: T, sigma: T) -> Result<T> {
    check_target(target)?;
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if effect == T::zero() || !effect.is_finite() {
        return Err(invalid("effect size must be finite and non-zero"));
    }
    if !(sigma > T::zero() && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    let z = std_normal_quantile(T::one() - T::of(0.5) * alpha)? + std_normal_quantile(target)?;
    Ok(T::of(2.0) * sigma * sigma * z * z / (effect * effect))
}

/// Sample size for a point analysis prior.
///
/// For evidence in favour of H1 the closed-form solution of the quadratic
/// in √n is used and checked against the power function; evidence for H0
/// (and any closed-form failure) goes to the root search.
pub fn n_point_analysis<T: Scalar>(
    test: &TestSpec<T>,
    analysis: &AnalysisPrior<T>,
    design: &DesignPrior<T>,
    target: T,
    root: RootChoice,
) -> Result<SampleSizeResult<T>> {
    check_target(target)?;
    let limit = power_limit_point_analysis(test, analysis, design)?;
    if target >= limit {
        return Err(infeasible(target, limit, format!("limiting power is {}", limit.to_f64_lossy())));
    }
    let AnalysisPrior::Point { mean } = *analysis else { unreachable!() };
    let power_at = |n: T| -> Result<T> {
        Ok(power(&PowerQuery::new(test.clone(), analysis.clone(), *design, n))?.probability)
    };

    if test.orientation() == Orientation::EvidenceForH1 {
        if let Some((n_real, method)) = point_closed_form(test, mean, design, target, root)? {
            let p = power_at(n_real)?;
            let rising = power_at(n_real * T::of(1.0 + 1e-6))? >= p;
            let ok = (p - target).abs() <= T::of(1e-8) && (rising || root == RootChoice::Minus);
            if ok {
                let n_integer = ceil_u64(n_real);
                let mut result = SampleSizeResult {
                    n_real,
                    n_integer,
                    method,
                    target,
                    achieved_power: power_at(T::of(n_integer as f64))?,
                    limit: Some(limit),
                    refined: None,
                    unit_information_n: None,
                };
                bump_integer(&mut result, &power_at, T::of(1e8))?;
                return Ok(result);
            }
        }
    }
    search(power_at, target, &SearchOptions::default(), Some(limit))
}

/// n = [{z ± √(z² − Δ_d log k²/Δ + c²)}² − c²] σ² / (Δ_d² − 4z²τ_d²) with
/// Δ = μ − θ₀, Δ_d = 2μ_d − μ − θ₀ and c = τ_d log k²/Δ, after reflecting
/// so that μ > θ₀. `None` when the formula has no positive real solution.
fn point_closed_form<T: Scalar>(
    test: &TestSpec<T>,
    mean: T,
    design: &DesignPrior<T>,
    target: T,
    root: RootChoice,
) -> Result<Option<(T, Method)>> {
    let flip = if mean > test.null { T::one() } else { -T::one() };
    let (theta0, mu, mu_d, tau_d) = (flip * test.null, flip * mean, flip * design.mean, design.sd);
    let delta = mu - theta0;
    let delta_d = T::of(2.0) * mu_d - mu - theta0;
    let lk2 = T::of(2.0) * test.k().ln();
    let z = std_normal_quantile(target)?;
    let c = tau_d * lk2 / delta;
    let inner = z * z - delta_d * lk2 / delta + c * c;
    let denom = delta_d * delta_d - T::of(4.0) * z * z * tau_d * tau_d;
    if inner < T::zero() || denom <= T::zero() {
        return Ok(None);
    }
    let r = match root {
        RootChoice::Plus => z + inner.sqrt(),
        RootChoice::Minus => z - inner.sqrt(),
    };
    let n = (r * r - c * c) * test.unit_variance / denom;
    let method = if tau_d > T::zero() {
        Method::PointGeneral
    } else if mu_d == mu {
        Method::PointMatched
    } else {
        Method::PointDesignPoint
    };
    Ok((n > T::zero() && n.is_finite()).then_some((n, method)))
}

/// Lambert-W sample size for the local normal prior N(θ₀, τ²) with the
/// design prior equal to it:
/// n = (σ²/τ²) k² exp{−W₋₁(−k² z²_{(1−β)/2})}.
///
/// The formula replaces log(1 + nτ²/σ²) by log(nτ²/σ²); `refined` holds the
/// root-search answer under the exact power when k < 1.
pub fn n_local_normal<T: Scalar>(k: T, target: T, unit_variance: T, tau: T) -> Result<SampleSizeResult<T>> {
    if !(unit_variance > T::zero() && unit_variance.is_finite()) {
        return Err(invalid(format!("unit variance must be positive, got {unit_variance}")));
    }
    if !(tau > T::zero() && tau.is_finite()) {
        return Err(invalid(format!("prior standard deviation must be positive, got {tau}")));
    }
    if let Feasibility::Infeasible { limit } = local_normal_feasibility(k, target)? {
        let z = std_normal_quantile(T::of(0.5) * target)?;
        return Err(infeasible(
            target,
            limit,
            format!(
                "-k^2 z^2 = {} < -1/e; targets below {} are outside the domain of the approximation",
                (-(k * k * z * z)).to_f64_lossy(),
                limit.to_f64_lossy()
            ),
        ));
    }
    let z = std_normal_quantile(T::of(0.5) * target)?;
    let w = lambert_w(-(k * k * z * z), Branch::NonPrincipal)?;
    let unit_n = k * k * (-w).exp();
    let n_real = unit_variance / (tau * tau) * unit_n;
    let n_integer = ceil_u64(n_real);

    let threshold = Threshold::from_k(k).ok().filter(|t| t.orientation() == Orientation::EvidenceForH1);
    let (achieved_power, refined) = match threshold {
        Some(threshold) => {
            let test = TestSpec::new(T::zero(), threshold, unit_variance)?;
            let analysis = AnalysisPrior::normal(T::zero(), tau)?;
            let design = DesignPrior::normal(T::zero(), tau)?;
            let exact = |n: T| -> Result<T> {
                Ok(power_normal_analysis(&PowerQuery::new(test.clone(), analysis.clone(), design, n))?.probability)
            };
            let achieved = exact(T::of(n_integer as f64))?;
            let r = search(exact, target, &SearchOptions::default(), Some(T::one()))?;
            let refinement = Refinement {
                n_real: r.n_real,
                n_integer: r.n_integer,
                achieved_power: r.achieved_power,
            };
            (achieved, Some(refinement))
        }
        None => (T::nan(), None),
    };
    Ok(SampleSizeResult {
        n_real,
        n_integer,
        method: Method::LocalNormal,
        target,
        achieved_power,
        limit: None,
        refined,
        unit_information_n: Some(unit_n),
    })
}

/// Smallest n in `opts` bounds with power(n) ≥ target, for a power
/// function increasing in n.
///
/// Brent's method on log n locates the root, a second pass on n itself
/// polishes it to `opts.tol`.
pub fn n_search<T, F>(power: F, target: T, opts: &SearchOptions<T>) -> Result<SampleSizeResult<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<T>,
{
    search(power, target, opts, None)
}

fn search<T, F>(power: F, target: T, opts: &SearchOptions<T>, limit: Option<T>) -> Result<SampleSizeResult<T>>
where
    T: Scalar,
    F: Fn(T) -> Result<T>,
{
    check_target(target)?;
    let SearchOptions { lo, hi, tol } = *opts;
    if !(lo > T::zero() && hi > lo && hi.is_finite()) {
        return Err(invalid(format!("search bounds must satisfy 0 < lo < hi < inf, got [{lo}, {hi}]")));
    }
    let p_hi = power(hi)?;
    if p_hi < target {
        let (limit, reason) = match limit {
            Some(l) => (l, format!("power at n = {hi} is {}, limiting power is {}", p_hi.to_f64_lossy(), l.to_f64_lossy())),
            None => (p_hi, format!("power at n = {hi} is only {}", p_hi.to_f64_lossy())),
        };
        return Err(infeasible(target, limit, reason));
    }
    let p_lo = power(lo)?;
    if p_lo > p_hi + T::of(1e-9) {
        return Err(Error::NonMonotone {
            n_lo: lo.to_f64_lossy(),
            n_hi: hi.to_f64_lossy(),
            power_lo: p_lo.to_f64_lossy(),
            power_hi: p_hi.to_f64_lossy(),
        });
    }

    let n_real = if p_lo >= target {
        lo
    } else {
        let f = |n: T| -> Result<T> { Ok(power(n)? - target) };
        // power saturates at 0 and 1; on the probit scale it is close to
        // linear in log n, which keeps the interpolation steps useful
        let probit = |p: T| -> Result<T> {
            let eps = T::epsilon();
            Ok(std_normal_quantile(p.max(T::min_positive_value()).min(T::one() - eps))?)
        };
        let z_target = probit(target)?;
        // every evaluation is kept: the tightest sign change among them
        // seeds the polishing pass for free
        let seen = std::cell::RefCell::new(vec![(lo, p_lo - target), (hi, p_hi - target)]);
        solve(
            |u: T| {
                let n = u.exp();
                let p = power(n)?;
                seen.borrow_mut().push((n, p - target));
                Ok(probit(p)? - z_target)
            },
            Bracket {
                lo: lo.ln(),
                hi: hi.ln(),
                f_lo: probit(p_lo)? - z_target,
                f_hi: probit(p_hi)? - z_target,
            },
            T::of(1e-3),
        )?;
        let seen = seen.into_inner();
        let below = seen.iter().filter(|(_, v)| *v < T::zero()).fold((lo, p_lo - target), |m, &x| if x.0 > m.0 { x } else { m });
        let above = seen.iter().filter(|(_, v)| *v >= T::zero()).fold((hi, p_hi - target), |m, &x| if x.0 < m.0 { x } else { m });
        // polish on the linear scale, where the power is smooth near the root
        let bracket = if below.0 < above.0 {
            Bracket { lo: below.0, hi: above.0, f_lo: below.1, f_hi: above.1 }
        } else {
            Bracket { lo, hi, f_lo: p_lo - target, f_hi: p_hi - target }
        };
        if above.1 == T::zero() {
            above.0
        } else {
            solve(f, bracket, tol)?
        }
    };

    let n_integer = ceil_u64(n_real);
    let mut result = SampleSizeResult {
        n_real,
        n_integer,
        method: Method::RootSearch,
        target,
        achieved_power: power(T::of(n_integer as f64))?,
        limit,
        refined: None,
        unit_information_n: None,
    };
    bump_integer(&mut result, &power, hi)?;
    Ok(result)
}

/// Guards against a root that sits a hair below an integer.
fn bump_integer<T: Scalar>(result: &mut SampleSizeResult<T>, power: &impl Fn(T) -> Result<T>, hi: T) -> Result<()> {
    for _ in 0..3 {
        if result.achieved_power >= result.target - T::of(1e-9) || T::of(result.n_integer as f64) >= hi {
            break;
        }
        result.n_integer += 1;
        result.achieved_power = power(T::of(result.n_integer as f64))?;
    }
    Ok(())
}

fn solve<T: Scalar>(f: impl Fn(T) -> Result<T>, bracket: Bracket<T>, tol: T) -> Result<T> {
    let mut failure = None;
    let root = find_root_bracket(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::nan()
            }
        },
        bracket,
        tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root?)
}

/// Sample size for any analysis prior with a closed-form power function.
pub fn n_for<T: Scalar>(
    test: &TestSpec<T>,
    analysis: &AnalysisPrior<T>,
    design: &DesignPrior<T>,
    target: T,
) -> Result<SampleSizeResult<T>> {
    match analysis {
        AnalysisPrior::Point { .. } => n_point_analysis(test, analysis, design, target, RootChoice::Plus),
        AnalysisPrior::Normal { .. } | AnalysisPrior::NormalMoment { .. } => {
            check_target(target)?;
            // the limit only describes n → ∞: evidence for H0 under a design
            // off the null can reach the target long before decaying to 0, so
            // feasibility is decided by the power at the search bound
            let limit = limiting_power(test, analysis, design)?;
            let power_at = |n: T| -> Result<T> {
                Ok(power(&PowerQuery::new(test.clone(), analysis.clone(), *design, n))?.probability)
            };
            search(power_at, target, &SearchOptions::default(), Some(limit))
        }
        AnalysisPrior::TruncatedT(_) => Err(invalid("the t prior needs a t test design; use n_t")),
    }
}

/// Per-group sample size for the t-test Bayes factor via the two-step power.
pub fn n_t<T: Scalar>(
    kind: TTestKind,
    prior: &TruncatedT<T>,
    design: &DesignPrior<T>,
    threshold: &Threshold<T>,
    target: T,
    distribution: DesignDistribution,
    opts: &SearchOptions<T>,
) -> Result<SampleSizeResult<T>> {
    check_target(target)?;
    prior.validate()?;
    let test = TestSpec::new(T::zero(), *threshold, T::one())?;
    let limit = limiting_power(&test, &AnalysisPrior::TruncatedT(prior.clone()), design)?;
    let power_at = |n: T| -> Result<T> { Ok(power_t(n, kind, prior, design, threshold, distribution)?.probability) };
    // a t test needs at least two observations per group
    let opts = SearchOptions {
        lo: opts.lo.max(T::of(2.0)),
        ..*opts
    };
    search(power_at, target, &opts, Some(limit))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(null: f64, k: f64, s2: f64) -> TestSpec<f64> {
        TestSpec::new(null, Threshold::from_k(k).unwrap(), s2).unwrap()
    }

    #[test]
    fn h0_evidence_reachable_before_its_limit() {
        // the limit is 0 for a design off the null, but power exceeds 1/2 from n = 1
        let t = spec(0.0, 1.1, 2.0);
        let r = n_for(&t, &AnalysisPrior::normal(0.0, 1.3).unwrap(), &DesignPrior::point(-1e-4).unwrap(), 0.5).unwrap();
        assert_eq!(r.n_integer, 1);
        assert_eq!(r.limit, Some(0.0));
        assert!(r.achieved_power >= 0.5);
    }

    #[test]
    fn table_anchor_matched_design() {
        let r = n_for(&spec(0.0, 0.1, 2.0), &AnalysisPrior::point(1.0).unwrap(), &DesignPrior::point(1.0).unwrap(), 0.8).unwrap();
        assert_eq!(r.n_integer, 20);
        assert_eq!(r.method, Method::PointMatched);
    }

    #[test]
    fn mirtazapine() {
        let t = spec(0.0, 0.1, 450.0);
        let a = AnalysisPrior::point(-6.0).unwrap();
        let r = n_for(&t, &a, &DesignPrior::point(-6.0).unwrap(), 0.8).unwrap();
        assert_eq!((r.n_integer, r.method), (124, Method::PointMatched));
        let r = n_for(&t, &a, &DesignPrior::normal(-6.0, 2.0).unwrap(), 0.8).unwrap();
        assert_eq!((r.n_integer, r.method), (195, Method::PointGeneral));
        let p = power(&PowerQuery::new(t, a, DesignPrior::normal(-6.0, 2.0).unwrap(), r.n_real)).unwrap();
        assert!((p.probability - 0.8).abs() < 1e-8);
        assert_eq!(freq_n(0.05f64, 0.8, 6.0, 15.0).unwrap().ceil(), 99.0);
    }

    #[test]
    fn swapping_null_and_alternative() {
        let a = n_for(&spec(0.0, 0.1, 450.0), &AnalysisPrior::point(-6.0).unwrap(), &DesignPrior::point(-6.0).unwrap(), 0.8).unwrap();
        let b = n_for(&spec(-6.0, 0.1, 450.0), &AnalysisPrior::point(0.0).unwrap(), &DesignPrior::point(0.0).unwrap(), 0.8).unwrap();
        assert!((a.n_real - b.n_real).abs() < 1e-9 * a.n_real);
    }

    #[test]
    fn closed_form_agrees_with_search() {
        let t = spec(0.0, 1.0 / 3.0, 2.0);
        let a = AnalysisPrior::point(0.4).unwrap();
        for d in [DesignPrior::point(0.4).unwrap(), DesignPrior::point(0.6).unwrap(), DesignPrior::normal(0.5, 0.1).unwrap()] {
            let closed = n_for(&t, &a, &d, 0.9).unwrap();
            let q = PowerQuery::new(t.clone(), a.clone(), d, 1.0);
            let s = n_search(|n| Ok(power(&q.at(n))?.probability), 0.9, &SearchOptions::default()).unwrap();
            assert!((closed.n_real - s.n_real).abs() < 1e-5, "{closed:?} {s:?}");
        }
    }

    #[test]
    fn infeasible_reports_limit() {
        let t = spec(0.0, 0.1, 1.0);
        let err = n_for(&t, &AnalysisPrior::point(0.3).unwrap(), &DesignPrior::normal(0.3, 0.2).unwrap(), 0.8).unwrap_err();
        let Error::Infeasible { limit, .. } = err else { panic!("{err:?}") };
        assert!((limit - 0.773).abs() < 5e-4);
    }

    #[test]
    fn smd_point_design_normal_analysis() {
        let a = AnalysisPrior::normal(0.0, 0.5f64.sqrt()).unwrap();
        let r = n_for(&spec(0.0, 1.0 / 6.0, 2.0), &a, &DesignPrior::point(0.5).unwrap(), 0.95).unwrap();
        assert_eq!(r.n_integer, 153);
        let r = n_for(&spec(0.0, 1.0 / 6.0, 2.0), &a, &DesignPrior::normal(0.5, 0.1).unwrap(), 0.95).unwrap();
        assert_eq!(r.n_integer, 211);
        let r = n_for(&spec(0.0, 6.0, 2.0), &a, &DesignPrior::point(0.0).unwrap(), 0.95).unwrap();
        assert_eq!(r.n_integer, 6691);
    }

    #[test]
    fn local_normal_anchors() {
        let r = n_local_normal(0.1f64, 0.8, 1.0, 1.0).unwrap();
        assert_eq!(r.n_integer, 150);
        let refined = r.refined.unwrap();
        assert!((r.achieved_power - 0.8).abs() < 0.01);
        assert!(refined.achieved_power >= 0.8);
        assert_eq!(n_local_normal(1.0 / 3.0, 0.95, 1.0, 1.0).unwrap().n_integer, 2554);
        assert_eq!(n_local_normal(1.0 / 3.0, 0.5, 1.0, 1.0).unwrap().n_integer, 10);
        let quarter = n_local_normal(0.1, 0.8, 1.0, 2.0).unwrap();
        assert!((quarter.n_real * 4.0 / r.n_real - 1.0).abs() < 1e-12);
    }

    #[test]
    fn local_normal_domain() {
        assert!(matches!(n_local_normal(1.0, 0.5, 1.0, 1.0), Err(Error::Infeasible { .. })));
        assert!(!local_normal_feasibility(1.0, 0.5).unwrap().is_feasible());
        let edge = lambert_boundary(1.0);
        assert!(local_normal_feasibility(1.0, edge + 1e-9).unwrap().is_feasible());
    }

    #[test]
    fn wrong_orientation_is_flagged() {
        // power for evidence in favour of H1 falls with n under the null design
        let decreasing = |n: f64| Ok(1.0 / (1.0 + n));
        assert!(matches!(
            n_search(decreasing, 0.3, &SearchOptions { lo: 1.0, hi: 1e8, tol: 1e-6 }),
            Err(Error::Infeasible { .. })
        ));
        let dip = |n: f64| Ok(if n < 10.0 { 0.995 } else { 0.99 - 1.0 / n });
        assert!(matches!(
            n_search(dip, 0.95, &SearchOptions { lo: 1.0, hi: 1e8, tol: 1e-6 }),
            Err(Error::NonMonotone { .. })
        ));
    }

    #[test]
    fn frequentist_baseline() {
        let n: f64 = freq_n(0.05, 0.8, 1.0, 0.5f64.sqrt()).unwrap();
        assert!((n - 7.848_879_734).abs() < 1e-6);
        assert!((freq_n(0.05, 0.8, 2.0, 0.5f64.sqrt()).unwrap() * 4.0 - n).abs() < 1e-12);
    }
}
