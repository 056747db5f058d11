use crate::Scalar;

use super::{domain, NumericsError};

const MAX_HALLEY: usize = 50;

/// Real branch of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// W₀, the branch with W(y) ≥ −1, defined for y ≥ −1/e.
    Principal,
    /// W₋₁, the branch with W(y) ≤ −1, defined for −1/e ≤ y < 0.
    NonPrincipal,
}

/// Solves w·exp(w) = y on the requested branch.
///
/// Halley iteration from a branch-specific seed: the branch-point expansion
/// near −1/e, otherwise ln(1 + y) / the asymptotic log expansion for W₀ and
/// ln(−y) − ln(−ln(−y)) for W₋₁.
pub fn lambert_w<T: Scalar>(y: T, branch: Branch) -> Result<T, NumericsError> {
    let branch_point = -T::E().recip();
    if y.is_nan() || y < branch_point {
        return Err(domain(
            "lambert_w",
            format!("argument {y} is below the branch point -1/e"),
        ));
    }
    // distance to the branch point, p = sqrt(2(e·y + 1))
    let q = T::E() * y + T::one();
    if q <= T::zero() {
        return Ok(-T::one());
    }
    let p = (T::of(2.0) * q).sqrt();

    let seed = match branch {
        Branch::Principal => {
            if y == T::zero() {
                return Ok(T::zero());
            }
            if y.is_infinite() {
                return Ok(y);
            }
            if y < T::of(-0.25) {
                branch_series(p)
            } else if y < T::E() {
                y.ln_1p()
            } else {
                let l1 = y.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        Branch::NonPrincipal => {
            if y >= T::zero() {
                return Err(domain(
                    "lambert_w",
                    format!("non-principal branch requires -1/e <= y < 0, got {y}"),
                ));
            }
            if y < T::of(-0.25) {
                branch_series(-p)
            } else {
                let l1 = (-y).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    };
    Ok(halley(y, seed))
}

/// W₀(exp(log_y)), usable when exp(log_y) itself would overflow.
///
/// Solves w + ln w = log_y by Newton's method for large arguments and defers
/// to [`lambert_w`] otherwise.
pub fn lambert_w0_exp<T: Scalar>(log_y: T) -> T {
    if log_y < T::of(20.0) {
        // exp(log_y) > 0 is always in the principal domain
        return lambert_w(log_y.exp(), Branch::Principal).unwrap_or_else(|_| T::nan());
    }
    let mut w = log_y - log_y.ln();
    for _ in 0..MAX_HALLEY {
        let step = (w + w.ln() - log_y) / (T::one() + w.recip());
        w = w - step;
        if step.abs() <= T::epsilon() * w.abs() * T::of(4.0) {
            break;
        }
    }
    w
}

fn branch_series<T: Scalar>(p: T) -> T {
    // W = -1 + p - p²/3 + 11/72 p³ - 43/540 p⁴ around the branch point
    -T::one() + p * (T::one() + p * (-T::of(1.0 / 3.0) + p * (T::of(11.0 / 72.0) - p * T::of(43.0 / 540.0))))
}

fn halley<T: Scalar>(y: T, mut w: T) -> T {
    let two = T::of(2.0);
    for _ in 0..MAX_HALLEY {
        let ew = w.exp();
        let f = w * ew - y;
        if f == T::zero() {
            break;
        }
        let wp1 = w + T::one();
        if wp1 == T::zero() {
            break;
        }
        let denom = ew * wp1 - (w + two) * f / (two * wp1);
        if denom == T::zero() || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w = w - step;
        if step.abs() <= T::of(4.0) * T::epsilon() * (T::one() + w.abs()) {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(w: f64, y: f64) -> f64 {
        ((w * w.exp() - y) / y).abs()
    }

    #[test]
    fn fixed_points() {
        assert_eq!(lambert_w(0.0, Branch::Principal).unwrap(), 0.0);
        let bp = -(-1.0f64).exp();
        assert!((lambert_w(bp, Branch::NonPrincipal).unwrap() + 1.0).abs() < 1e-7);
        assert!((lambert_w(bp, Branch::Principal).unwrap() + 1.0).abs() < 1e-7);
        assert!((lambert_w(1.0f64, Branch::Principal).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!((lambert_w(std::f64::consts::E, Branch::Principal).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_principal_small_argument() {
        let y = -0.000642f64;
        let w = lambert_w(y, Branch::NonPrincipal).unwrap();
        // W₋₁(−0.000642) = −9.614159180796036 (50-digit reference)
        assert!((w + 9.614_159_180_796_036).abs() < 1e-12, "w = {w}");
        assert!(residual(w, y) < 1e-12);
        assert!(w < -1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w(-0.4, Branch::Principal).is_err());
        assert!(lambert_w(-0.4, Branch::NonPrincipal).is_err());
        assert!(lambert_w(0.0, Branch::NonPrincipal).is_err());
        assert!(lambert_w(0.5, Branch::NonPrincipal).is_err());
    }

    #[test]
    fn branches_straddle_minus_one() {
        for i in 1..200 {
            let y = -(-1.0f64).exp() * i as f64 / 200.0;
            let w0 = lambert_w(y, Branch::Principal).unwrap();
            let wm = lambert_w(y, Branch::NonPrincipal).unwrap();
            assert!(w0 >= -1.0 && wm <= -1.0, "y = {y}: {w0} {wm}");
            assert!(residual(w0, y) < 1e-11 && residual(wm, y) < 1e-11, "y = {y}");
        }
    }

    #[test]
    fn large_arguments_via_log() {
        for &l in &[20.0f64, 50.0, 700.0, 5000.0] {
            let w = lambert_w0_exp(l);
            assert!((w + w.ln() - l).abs() < 1e-12 * l, "log_y = {l}");
        }
        let direct = lambert_w(1e8f64, Branch::Principal).unwrap();
        assert!((lambert_w0_exp(1e8f64.ln()) - direct).abs() < 1e-13 * direct);
    }
}
