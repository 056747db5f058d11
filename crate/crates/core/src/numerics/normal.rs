use crate::Scalar;

use super::{domain, NumericsError};

/// Below this |z| the erf power series is used, above it the erfc continued fraction.
const SERIES_CUTOFF: f64 = 2.0;
const MAX_TERMS: usize = 500;

/// Standard normal density.
pub fn std_normal_pdf<T: Scalar>(x: T) -> T {
    ln_std_normal_pdf(x).exp()
}

pub fn ln_std_normal_pdf<T: Scalar>(x: T) -> T {
    -T::of(0.5) * x * x - T::of(0.5) * (T::TAU()).ln()
}

/// Standard normal distribution function Φ(x).
///
/// The lower tail is computed directly (no `1 - upper` cancellation), so the
/// relative accuracy of small probabilities is preserved down to underflow.
pub fn std_normal_cdf<T: Scalar>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x.is_infinite() {
        return if x > T::zero() { T::one() } else { T::zero() };
    }
    let z = x * T::FRAC_1_SQRT_2();
    if z.abs() < T::of(SERIES_CUTOFF) {
        T::of(0.5) + T::of(0.5) * erf_series(z)
    } else if z < T::zero() {
        T::of(0.5) * erfc_cf(-z)
    } else {
        T::one() - T::of(0.5) * erfc_cf(z)
    }
}

/// Upper tail 1 − Φ(x), accurate in the far right tail.
pub fn std_normal_sf<T: Scalar>(x: T) -> T {
    std_normal_cdf(-x)
}

/// Quantile function Φ⁻¹(p) for 0 < p < 1.
///
/// Wichura's AS241 rational approximation followed by one Newton step on the
/// lower tail. Probabilities above one half are reflected, which is exact
/// because `1 - p` is representable for `p >= 0.5`.
pub fn std_normal_quantile<T: Scalar>(p: T) -> Result<T, NumericsError> {
    if !(p > T::zero() && p < T::one()) {
        return Err(domain(
            "std_normal_quantile",
            format!("probability must lie in (0, 1), got {p}"),
        ));
    }
    if p > T::of(0.5) {
        return Ok(-lower_quantile(T::one() - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile<T: Scalar>(p: T) -> T {
    let x = as241(p);
    let density = std_normal_pdf(x);
    if density > T::zero() && density.is_finite() {
        x - (std_normal_cdf(x) - p) / density
    } else {
        x
    }
}

/// erf(z) = 2/√π · exp(−z²) · Σ 2ⁿ z^(2n+1) / (1·3···(2n+1)); all terms positive.
fn erf_series<T: Scalar>(z: T) -> T {
    let two_z2 = T::of(2.0) * z * z;
    let mut term = z;
    let mut sum = z;
    for n in 0..MAX_TERMS {
        term = term * two_z2 / T::of((2 * n + 3) as f64);
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() * T::of(0.25) {
            break;
        }
    }
    sum * (-z * z).exp() * T::FRAC_2_SQRT_PI()
}

/// erfc(z) for z ≥ 2 from its continued fraction (modified Lentz).
fn erfc_cf<T: Scalar>(z: T) -> T {
    let tiny = T::min_positive_value().sqrt();
    let mut f = z;
    let mut c = f;
    let mut d = T::zero();
    for j in 1..MAX_TERMS {
        let a = T::of(j as f64 * 0.5);
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = d.recip();
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (-z * z).exp() * T::of(0.5) * T::FRAC_2_SQRT_PI() / f
}

#[allow(clippy::excessive_precision)]
fn as241<T: Scalar>(p: T) -> T {
    const A: [f64; 8] = [
        3.3871328727963666080e0,
        1.3314166789178437745e+2,
        1.9715909503065514427e+3,
        1.3731693765509461125e+4,
        4.5921953931549871457e+4,
        6.7265770927008700853e+4,
        3.3430575583588128105e+4,
        2.5090809287301226727e+3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.2313330701600911252e+1,
        6.8718700749205790830e+2,
        5.3941960214247511077e+3,
        2.1213794301586595867e+4,
        3.9307895800092710610e+4,
        2.8729085735721942674e+4,
        5.2264952788528545610e+3,
    ];
    const C: [f64; 8] = [
        1.42343711074968357734e0,
        4.63033784615654529590e0,
        5.76949722146069140550e0,
        3.64784832476320460504e0,
        1.27045825245236838258e0,
        2.41780725177450611770e-1,
        2.27238449892691845833e-2,
        7.74545014278341407640e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.05319162663775882187e0,
        1.67638483018380384940e0,
        6.89767334985100004550e-1,
        1.48103976427480074590e-1,
        1.51986665636164571966e-2,
        5.47593808499534494600e-4,
        1.05075007164441684324e-9,
    ];
    const E: [f64; 8] = [
        6.65790464350110377720e0,
        5.46378491116411436990e0,
        1.78482653991729133580e0,
        2.96560571828504891230e-1,
        2.65321895265761230930e-2,
        1.24266094738807843860e-3,
        2.71155556874348757815e-5,
        2.01033439929228813265e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.99832206555887937690e-1,
        1.36929880922735805310e-1,
        1.48753612908506148525e-2,
        7.86869131145613259100e-4,
        1.84631831751005468180e-5,
        1.42151175831644588870e-7,
        2.04426310338993978564e-15,
    ];

    fn poly<T: Scalar>(coef: &[f64; 8], x: T) -> T {
        coef.iter().rev().fold(T::zero(), |acc, &c| acc * x + T::of(c))
    }

    let q = p - T::of(0.5);
    if q.abs() <= T::of(0.425) {
        let r = T::of(0.180625) - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    // p < 0.5 here
    let r = (-p.ln()).sqrt();
    let x = if r <= T::of(5.0) {
        let r = r - T::of(1.6);
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - T::of(5.0);
        poly(&E, r) / poly(&F, r)
    };
    -x
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 30-digit evaluations of Φ.
    #[test]
    fn cdf_reference_values() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_cdf(0.75f64) - 0.773372647623131800672937830617).abs() < 1e-15);
        assert!((std_normal_cdf(3.0f64) - 0.998650101968369905473348185232).abs() < 1e-15);
        assert!((std_normal_cdf(1.5f64) - 0.93319279873114193399550595902).abs() < 1e-15);
        let tail = std_normal_cdf(-8.0f64);
        assert!((tail / 6.22096057427178412351599517259e-16 - 1.0).abs() < 1e-12);
        let far = std_normal_cdf(-37.0f64);
        assert!((far / 5.72557122252457682268319254827e-300 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_is_monotone_and_clamped() {
        let mut prev = 0.0;
        for i in -4000..=4000 {
            let x = i as f64 * 0.01;
            let v = std_normal_cdf(x);
            assert!(v >= prev, "not monotone at {x}");
            assert!((0.0..=1.0).contains(&v));
            prev = v;
        }
        assert_eq!(std_normal_cdf(-60.0), 0.0);
        assert_eq!(std_normal_cdf(60.0), 1.0);
    }

    #[test]
    fn quantile_reference_values() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!((std_normal_quantile(0.8f64).unwrap() - 0.841621233572914205178706121363).abs() < 1e-14);
        assert!((std_normal_quantile(0.4f64).unwrap() + 0.253347103135799798798196181424).abs() < 1e-14);
    }

    #[test]
    fn quantile_rejects_boundary() {
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
        assert!(std_normal_quantile(-0.1).is_err());
        assert!(std_normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_inverts_cdf_in_probability() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = std_normal_quantile(p).unwrap();
            assert!((std_normal_cdf(x) - p).abs() < 1e-15, "p = {p}");
        }
        for e in 1..300 {
            let p = 10f64.powi(-e);
            let x = std_normal_quantile(p).unwrap();
            assert!((std_normal_cdf(x) / p - 1.0).abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn f32_smoke() {
        let x: f32 = std_normal_quantile(0.975f32).unwrap();
        assert!((x - 1.959964).abs() < 1e-5);
        assert!((std_normal_cdf(1.0f32) - 0.841_344_75).abs() < 1e-6);
    }
}
