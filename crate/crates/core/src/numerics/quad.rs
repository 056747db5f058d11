use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::Scalar;

use super::{NumericsError, DEFAULT_REL_TOL};

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Stopping rule for [`integrate_with`]: the run ends once the summed error
/// estimate is below `max(abs, rel * |integral|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub rel: T,
    pub abs: T,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl<T: Scalar> Default for Tolerance<T> {
    fn default() -> Self {
        Self::relative(T::of(DEFAULT_REL_TOL))
    }
}

impl<T: Scalar> Tolerance<T> {
    pub fn relative(rel: T) -> Self {
        Self {
            rel,
            abs: T::zero(),
            max_intervals: 1000,
        }
    }

    pub fn with_abs(mut self, abs: T) -> Self {
        self.abs = abs;
        self
    }
}

/// Integral value together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

/// ∫ f over [lower, upper] to relative accuracy `rel_tol`.
///
/// Either bound may be infinite; see [`integrate_with`].
pub fn integrate<T, F>(f: F, lower: T, upper: T, rel_tol: T) -> Result<T, NumericsError>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    integrate_with(f, lower, upper, Tolerance::relative(rel_tol)).map(|r| r.value)
}

/// Globally adaptive Gauss–Kronrod (21 point) quadrature.
///
/// Infinite ranges are mapped onto a finite one before subdivision:
/// `[a, ∞)` through x = a + s/(1−s), `(−∞, b]` through x = b − s/(1−s) and
/// the whole line through x = s/(1−s²). Kronrod nodes never touch the
/// endpoints, so the transformed integrand is never evaluated at the
/// singular end of the map.
pub fn integrate_with<T, F>(
    mut f: F,
    lower: T,
    upper: T,
    tol: Tolerance<T>,
) -> Result<Integral<T>, NumericsError>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    if lower.is_nan() || upper.is_nan() {
        return Err(super::domain("integrate", "NaN integration bound"));
    }
    if lower == upper {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    if lower > upper {
        let r = integrate_with(f, upper, lower, tol)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }

    let one = T::one();
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => adaptive(&mut f, lower, upper, tol),
        (true, false) => adaptive(
            &mut |s: T| {
                let x = lower + s / (one - s);
                let jac = (one - s).powi(2).recip();
                guarded(&mut f, x, jac)
            },
            T::zero(),
            one,
            tol,
        ),
        (false, true) => adaptive(
            &mut |s: T| {
                let x = upper - s / (one - s);
                let jac = (one - s).powi(2).recip();
                guarded(&mut f, x, jac)
            },
            T::zero(),
            one,
            tol,
        ),
        (false, false) => adaptive(
            &mut |s: T| {
                let d = one - s * s;
                let x = s / d;
                let jac = (one + s * s) / (d * d);
                guarded(&mut f, x, jac)
            },
            -one,
            one,
            tol,
        ),
    }
}

fn guarded<T: Scalar, F: FnMut(T) -> T>(f: &mut F, x: T, jac: T) -> T {
    if !x.is_finite() || !jac.is_finite() {
        return T::zero();
    }
    let v = f(x);
    if v == T::zero() {
        T::zero()
    } else {
        v * jac
    }
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Scalar> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Scalar> Eq for Segment<T> {}
impl<T: Scalar> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn adaptive<T, F>(f: &mut F, a: T, b: T, tol: Tolerance<T>) -> Result<Integral<T>, NumericsError>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let first = gauss_kronrod(f, a, b);
    if !first.value.is_finite() {
        return Err(super::domain("integrate", "integrand is not finite"));
    }
    let mut evaluations = 21;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    // intervals too short to split further; their error stays in the total
    let mut frozen_err = T::zero();
    heap.push(first);

    let target = |total: T| tol.abs.max(tol.rel * total.abs());
    while total_err > target(total) {
        if heap.len() >= tol.max_intervals {
            return Err(NumericsError::NoConvergence {
                estimate: total.to_f64_lossy(),
                error: total_err.to_f64_lossy(),
            });
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        let mid = T::of(0.5) * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if width <= T::of(100.0) * T::epsilon() * (worst.a.abs() + worst.b.abs()) || mid <= worst.a || mid >= worst.b {
            frozen_err = frozen_err + worst.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = gauss_kronrod(f, worst.a, mid);
        let right = gauss_kronrod(f, mid, worst.b);
        evaluations += 42;
        total = total - worst.value + left.value + right.value;
        total_err = total_err - worst.error + left.error + right.error;
        if !total.is_finite() {
            return Err(super::domain("integrate", "integrand is not finite"));
        }
        heap.push(left);
        heap.push(right);
    }

    // recompute the sums to shed accumulated update rounding
    let value = heap.iter().fold(T::zero(), |s, seg| s + seg.value);
    let live_err = heap.iter().fold(T::zero(), |s, seg| s + seg.error);
    let error = live_err + frozen_err;
    let value = if heap.is_empty() { total } else { value };
    if error > target(value) && frozen_err > T::zero() {
        return Err(NumericsError::NoConvergence {
            estimate: value.to_f64_lossy(),
            error: error.to_f64_lossy(),
        });
    }
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

fn gauss_kronrod<T, F>(f: &mut F, a: T, b: T) -> Segment<T>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let center = T::of(0.5) * (a + b);
    let half = T::of(0.5) * (b - a);
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    let fc = f(center);
    let mut res_k = fc * T::of(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    for j in 0..10 {
        let dx = half * T::of(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + T::of(WGK[j]) * (f1 + f2);
        res_abs = res_abs + T::of(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::of(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * T::of(0.5);
    let mut res_asc = T::of(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::of(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != T::zero() && err != T::zero() {
        err = res_asc * T::one().min((T::of(200.0) * err / res_asc).powf(T::of(1.5)));
    }
    if res_abs > T::min_positive_value() / (T::of(50.0) * T::epsilon()) {
        err = err.max(T::of(50.0) * T::epsilon() * res_abs);
    }
    Segment {
        a,
        b,
        value,
        error: err,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::std_normal_pdf;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x: f64| x, 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let v = integrate(|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-10).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let v = integrate(|x: f64| x.exp(), 1.0, 0.0, 1e-10).unwrap();
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn infinite_ranges() {
        let inf = f64::INFINITY;
        let v = integrate(std_normal_pdf, -inf, inf, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        let v = integrate(std_normal_pdf, 0.0, inf, 1e-10).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
        let v = integrate(std_normal_pdf, -inf, 1.5, 1e-10).unwrap();
        assert!((v - 0.933_192_798_731_141_9).abs() < 1e-10);
        // heavy tail: Cauchy
        let cauchy = |x: f64| 1.0 / (std::f64::consts::PI * (1.0 + x * x));
        let v = integrate(cauchy, -inf, inf, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        let v = integrate(cauchy, 3.0, inf, 1e-10).unwrap();
        assert!((v - (0.5 - 3f64.atan() / std::f64::consts::PI)).abs() < 1e-10);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^(-1/2) dx = 2
        let v = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-8).unwrap();
        assert!((v - 2.0).abs() < 1e-7);
    }

    #[test]
    fn non_convergence_reports_estimate() {
        let tol = Tolerance {
            rel: 1e-14,
            abs: 0.0,
            max_intervals: 4,
        };
        let err = integrate_with(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, tol).unwrap_err();
        match err {
            NumericsError::NoConvergence { estimate, .. } => assert!(estimate.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn f32_smoke() {
        let v = integrate(|x: f32| x * x, 0.0, 3.0, 1e-5).unwrap();
        assert!((v - 9.0).abs() < 1e-4);
    }
}
