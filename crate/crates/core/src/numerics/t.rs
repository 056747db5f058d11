use crate::Scalar;

use super::gamma::{ln_gamma_half_ratio, ln_gamma_half_ratio_excess, ln_gamma_stirling_excess, regularized_beta};
use super::quad::{integrate_with, Tolerance};
use super::{domain, NumericsError};

/// Smallest untruncated mass accepted for a truncation interval.
const MIN_TRUNCATION_MASS: f64 = 1e-300;

/// Past this many series terms the noncentral t switches to quadrature.
const MAX_SERIES_TERMS: f64 = 4000.0;

/// Log density of the standard Student t distribution with `df` degrees of freedom.
pub fn ln_t_density<T: Scalar>(x: T, df: T) -> T {
    let half = T::of(0.5);
    ln_gamma_half_ratio(half * df) - half * (T::PI() * df).ln() - half * (df + T::one()) * (x * x / df).ln_1p()
}

/// Lower tail P(X ≤ x) of the standard Student t distribution.
pub fn student_t_cdf<T: Scalar>(x: T, df: T) -> T {
    if x.is_infinite() {
        return if x > T::zero() { T::one() } else { T::zero() };
    }
    let tail = lower_tail_of_abs(x, df);
    if x <= T::zero() {
        tail
    } else {
        T::one() - tail
    }
}

/// Upper tail P(X > x), accurate for large positive x.
pub fn student_t_sf<T: Scalar>(x: T, df: T) -> T {
    student_t_cdf(-x, df)
}

/// P(X ≤ −|x|) computed without cancellation.
fn lower_tail_of_abs<T: Scalar>(x: T, df: T) -> T {
    let half = T::of(0.5);
    let x2 = x * x;
    let w = x2 / (df + x2);
    if w < half {
        // I_{ν/(ν+x²)}(ν/2, ½) = 1 − I_w(½, ν/2), with I_w small here
        half * (T::one() - regularized_beta(w, half, half * df))
    } else {
        half * regularized_beta(df / (df + x2), half * df, half)
    }
}

/// Location-scale t density truncated to [lower, upper].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedTDensity<T> {
    location: T,
    scale: T,
    df: T,
    lower: T,
    upper: T,
    ln_mass: T,
}

impl<T: Scalar> TruncatedTDensity<T> {
    pub fn new(location: T, scale: T, df: T, lower: T, upper: T) -> Result<Self, NumericsError> {
        if !(df > T::zero()) {
            return Err(domain("t_density", format!("degrees of freedom must be positive, got {df}")));
        }
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(domain("t_density", format!("scale must be positive, got {scale}")));
        }
        if !location.is_finite() {
            return Err(domain("t_density", format!("location must be finite, got {location}")));
        }
        if !(lower < upper) {
            return Err(domain(
                "t_density",
                format!("truncation requires lower < upper, got [{lower}, {upper}]"),
            ));
        }
        let zl = (lower - location) / scale;
        let zu = (upper - location) / scale;
        // subtract whichever pair of tails is small to keep relative accuracy
        let mass = if zl >= T::zero() {
            student_t_sf(zl, df) - student_t_sf(zu, df)
        } else {
            student_t_cdf(zu, df) - student_t_cdf(zl, df)
        };
        if !(mass.to_f64_lossy() >= MIN_TRUNCATION_MASS) {
            return Err(NumericsError::DegenerateTruncation {
                lower: lower.to_f64_lossy(),
                upper: upper.to_f64_lossy(),
            });
        }
        Ok(Self {
            location,
            scale,
            df,
            lower,
            upper,
            ln_mass: mass.ln(),
        })
    }

    pub fn ln_pdf(&self, x: T) -> T {
        if x < self.lower || x > self.upper {
            return T::neg_infinity();
        }
        let z = (x - self.location) / self.scale;
        ln_t_density(z, self.df) - self.scale.ln() - self.ln_mass
    }

    pub fn pdf(&self, x: T) -> T {
        self.ln_pdf(x).exp()
    }

    /// Probability the untruncated distribution assigns to [lower, upper].
    pub fn mass(&self) -> T {
        self.ln_mass.exp()
    }

    pub fn location(&self) -> T {
        self.location
    }
    pub fn scale(&self) -> T {
        self.scale
    }
    pub fn df(&self) -> T {
        self.df
    }
    pub fn lower(&self) -> T {
        self.lower
    }
    pub fn upper(&self) -> T {
        self.upper
    }
}

/// Density at `x` of a location-scale t distribution truncated to [lower, upper].
pub fn t_density<T: Scalar>(x: T, df: T, location: T, scale: T, lower: T, upper: T) -> Result<T, NumericsError> {
    Ok(TruncatedTDensity::new(location, scale, df, lower, upper)?.pdf(x))
}

/// Noncentral t density with `df` degrees of freedom and noncentrality `ncp`.
pub fn nct_density<T: Scalar>(x: T, df: T, ncp: T) -> Result<T, NumericsError> {
    ln_nct_density(x, df, ncp).map(T::exp)
}

/// Log of the noncentral t density.
///
/// Writes the density as the central t density times a correction
/// Σ r_j = ∫₀^∞ u^ν e^{−u² + yu} du / ∫₀^∞ u^ν e^{−u²} du, times e^{−λ²/2},
/// with y = √2·λx/√(ν + x²). For y ≥ 0 the correction is a series of
/// positive terms; otherwise (or when the series would be long) it is
/// integrated numerically around the log-concave integrand's mode, with
/// both the mode shift and the reference integral expressed as
/// differences so that nothing large cancels.
pub fn ln_nct_density<T: Scalar>(x: T, df: T, ncp: T) -> Result<T, NumericsError> {
    if !(df > T::zero()) {
        return Err(domain("nct_density", format!("degrees of freedom must be positive, got {df}")));
    }
    if x.is_nan() || ncp.is_nan() {
        return Err(domain("nct_density", "NaN argument"));
    }
    if x.is_infinite() {
        return Ok(T::neg_infinity());
    }
    let central = ln_t_density(x, df);
    if ncp == T::zero() {
        return Ok(central);
    }
    let y = T::of(2.0).sqrt() * ncp * x / (df + x * x).sqrt();
    let half = T::of(0.5);
    let correction = if y >= T::zero() && series_terms(y, df) < T::of(MAX_SERIES_TERMS) {
        ln_correction_series(y, df)
    } else {
        ln_correction_integral(y, df)?
    };
    Ok(central - half * ncp * ncp + correction)
}

/// Rough index of the largest series term.
fn series_terms<T: Scalar>(y: T, df: T) -> T {
    let a = T::of(0.5) * (df + T::one());
    let y2 = y * y;
    y2 / T::of(8.0) * (T::one() + (T::one() + T::of(16.0) * a / y2.max(T::min_positive_value())).sqrt())
}

fn ln_correction_series<T: Scalar>(y: T, df: T) -> T {
    let half = T::of(0.5);
    let a = half * (df + T::one());
    let b = half * df + T::one();
    let y2 = y * y;
    let big = T::max_value().sqrt();
    let mut even = T::one();
    let mut odd = y * half * df * (-ln_gamma_half_ratio(half * df)).exp();
    let mut sum = even + odd;
    let mut ln_scale = T::zero();
    let mut m = 0usize;
    loop {
        let mf = T::of(m as f64);
        let two_m = mf + mf;
        let re = (a + mf) * y2 / ((two_m + T::one()) * (two_m + T::of(2.0)));
        let ro = (b + mf) * y2 / ((two_m + T::of(2.0)) * (two_m + T::of(3.0)));
        even = even * re;
        odd = odd * ro;
        sum = sum + even + odd;
        if sum > big {
            even = even / big;
            odd = odd / big;
            sum = sum / big;
            ln_scale = ln_scale + big.ln();
        }
        m += 1;
        let past_peak = re < T::one() && ro < T::one();
        if past_peak && even + odd <= T::epsilon() * T::of(0.25) * sum {
            break;
        }
        if m > 1_000_000 {
            break;
        }
    }
    sum.ln() + ln_scale
}

fn ln_correction_integral<T: Scalar>(y: T, df: T) -> Result<T, NumericsError> {
    let half = T::of(0.5);
    let z = half * df;
    let root = (y * y + T::of(8.0) * df).sqrt();
    let root0 = (T::of(8.0) * df).sqrt();
    let u0 = z.sqrt();
    // mode u* of h(u) = ν ln u − u² + yu, and its shift from the y = 0 mode
    let shift = (y + y * y / (root + root0)) / T::of(4.0);
    let mode = u0 + shift;
    let h_diff = df * (shift / u0).ln_1p() - shift * (mode + u0) + y * mode;

    // integrate over the offset d = u − u*, which stays resolvable even when
    // u* is so large that u* + 1 rounds to u*
    let width = T::of(6.5);
    let curvature = df / (mode * mode) + T::of(2.0);
    let left = (-width * T::of(2.0).sqrt() / curvature.sqrt()).max(-mode);
    let integrand = |d: T| {
        if d <= -mode {
            return T::zero();
        }
        // h(u) − h(u*) with y − 2u* = −ν/u* substituted, so nothing of the
        // size of y·u* is ever cancelled
        (df * ln1p_minus_x(d / mode) - d * d).exp()
    };
    let tol = Tolerance::relative(T::of(1e-13).max(T::epsilon() * T::of(64.0)));
    let mid_pieces = [left, half * left, T::zero(), T::one(), width];
    let mut total = T::zero();
    for w in mid_pieces.windows(2) {
        if w[1] > w[0] {
            let piece = match integrate_with(integrand, w[0], w[1], tol) {
                Ok(r) => r.value,
                // extreme arguments: accept anything well inside the advertised accuracy
                Err(NumericsError::NoConvergence { estimate, error }) if error <= 1e-11 * estimate.abs() => {
                    T::of(estimate)
                }
                Err(e) => return Err(e),
            };
            total = total + piece;
        }
    }
    let ln_ref = ln_gamma_stirling_excess(z) + ln_gamma_half_ratio_excess(z) + half * T::TAU().ln() - T::LN_2();
    Ok(h_diff + total.ln() - ln_ref)
}

/// ln(1 + x) − x, without cancellation for small x.
fn ln1p_minus_x<T: Scalar>(x: T) -> T {
    if x.abs() > T::of(0.01) {
        return x.ln_1p() - x;
    }
    // −x²/2 + x³/3 − …
    let mut power = x * x;
    let mut sum = T::zero();
    for j in 2..30 {
        let term = power / T::of(j as f64);
        sum = if j % 2 == 0 { sum - term } else { sum + term };
        if term.abs() <= T::epsilon() * sum.abs() {
            break;
        }
        power = power * x;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn cauchy_mode() {
        let v = t_density(0.0, 1.0, 0.0, 1.0, -INF, INF).unwrap();
        assert!((v - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
    }

    #[test]
    fn truncation() {
        let full = t_density(0.7, 3.0, 0.0, 1.0, -INF, INF).unwrap();
        let half = t_density(0.7, 3.0, 0.0, 1.0, 0.0, INF).unwrap();
        assert!((half / full - 2.0).abs() < 1e-13);
        assert_eq!(t_density(-0.7, 3.0, 0.0, 1.0, 0.0, INF).unwrap(), 0.0);
        assert!(matches!(
            TruncatedTDensity::new(0.0, 1.0, 100.0, 1e4, INF),
            Err(NumericsError::DegenerateTruncation { .. })
        ));
        assert!(TruncatedTDensity::new(0.0, 1.0, 3.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn cdf_reference_values() {
        // Cauchy: F(x) = ½ + atan(x)/π
        for &x in &[-30.0f64, -2.0, -0.1, 0.0, 0.5, 4.0] {
            let expected = 0.5 + x.atan() / std::f64::consts::PI;
            assert!((student_t_cdf(x, 1.0) - expected).abs() < 1e-14, "x = {x}");
        }
        // ν = 2: F(x) = ½ + x / (2√(2 + x²))
        for &x in &[-3.0f64, -0.2, 0.9, 7.0] {
            let expected = 0.5 + x / (2.0 * (2.0 + x * x).sqrt());
            assert!((student_t_cdf(x, 2.0) - expected).abs() < 1e-14, "x = {x}");
        }
        // far tail keeps relative accuracy: ν = 1, x = −1e6
        let tail = student_t_cdf(-1e6f64, 1.0);
        let expected = (1e-6f64).atan() / std::f64::consts::PI;
        assert!((tail / expected - 1.0).abs() < 1e-10);
    }

    #[test]
    fn central_nct_reduces_to_t() {
        for &df in &[1.0f64, 5.0, 30.0] {
            for &x in &[-3.0, 0.0, 0.4, 2.5] {
                let a = nct_density(x, df, 0.0).unwrap();
                let b = ln_t_density(x, df).exp();
                assert!((a / b - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn series_and_integral_agree() {
        for &df in &[0.7f64, 3.0, 20.0, 284.0, 5000.0] {
            for &y in &[0.0f64, 0.3, 2.0, 9.0, 25.0] {
                let s = ln_correction_series(y, df);
                let i = ln_correction_integral(y, df).unwrap();
                assert!((s - i).abs() < 1e-11 * (1.0 + s.abs()), "df {df} y {y}: {s} vs {i}");
            }
        }
    }

    #[test]
    fn nct_reference_value() {
        // 30-digit evaluation of the defining integral
        let v = nct_density(2.0f64, 10.0, 1.5).unwrap();
        assert!((v / 0.314_605_918_450_196_143 - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn nct_normalizes() {
        for &(df, ncp) in &[(5.0f64, 2.0f64), (1.0, -3.0), (50.0, 10.0), (3.0, 40.0)] {
            let v = integrate(|x| nct_density(x, df, ncp).unwrap(), -INF, INF, 1e-10).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "df {df} ncp {ncp}: {v}");
        }
    }

    #[test]
    fn nct_reflection() {
        for &(x, df, ncp) in &[(1.3f64, 4.0f64, 2.0f64), (-0.2, 17.0, 5.0), (3.0, 2.5, -1.0)] {
            let a = ln_nct_density(x, df, ncp).unwrap();
            let b = ln_nct_density(-x, df, -ncp).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}
