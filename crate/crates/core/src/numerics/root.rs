use crate::Scalar;

use super::{domain, NumericsError};

const MAX_ITER: usize = 300;

/// A sign-changing interval with its endpoint function values, so callers
/// that already evaluated an expensive function need not repeat it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    pub f_lo: T,
    pub f_hi: T,
}

impl<T: Scalar> Bracket<T> {
    pub fn has_sign_change(&self) -> bool {
        self.f_lo == T::zero() || self.f_hi == T::zero() || (self.f_lo < T::zero()) != (self.f_hi < T::zero())
    }
}

/// Root of `f` on [lo, hi] by Brent's method.
///
/// Terminates when the bracket is narrower than `tol` (plus a relative
/// machine-precision term) or `f` hits zero exactly.
pub fn find_root<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<T, NumericsError>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    find_root_bracket(f, Bracket { lo, hi, f_lo, f_hi }, tol)
}

pub fn find_root_bracket<T, F>(mut f: F, bracket: Bracket<T>, tol: T) -> Result<T, NumericsError>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let Bracket {
        lo: mut a,
        hi: mut b,
        f_lo: mut fa,
        f_hi: mut fb,
    } = bracket;
    if fa.is_nan() || fb.is_nan() {
        return Err(domain("find_root", "function is NaN at a bracket endpoint"));
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !bracket.has_sign_change() {
        return Err(NumericsError::NoSignChange {
            lo: a.to_f64_lossy(),
            hi: b.to_f64_lossy(),
            f_lo: fa.to_f64_lossy(),
            f_hi: fb.to_f64_lossy(),
        });
    }

    let two = T::of(2.0);
    let half = T::of(0.5);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when only two points
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            if two * p < (T::of(3.0) * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else {
            b + tol1.copysign(xm)
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(domain("find_root", format!("function is NaN at {b}")));
        }
    }
    Err(NumericsError::NoConvergence {
        estimate: b.to_f64_lossy(),
        error: (c - b).abs().to_f64_lossy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_roots() {
        let r = find_root(|x: f64| x - 1.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let r = find_root(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
        let r = find_root(|x: f64| x.cos() - x, 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-13);
    }

    #[test]
    fn endpoint_root() {
        assert_eq!(find_root(|x: f64| x, 0.0, 1.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn missing_sign_change_reports_values() {
        match find_root(|x: f64| x * x + 1.0, -1.0, 2.0, 1e-10) {
            Err(NumericsError::NoSignChange { f_lo, f_hi, .. }) => {
                assert_eq!(f_lo, 2.0);
                assert_eq!(f_hi, 5.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn steep_function() {
        let r = find_root(|x: f64| (x - 0.3).powi(3) * 1e6 - 1e-3, -5.0, 5.0, 1e-12).unwrap();
        assert!((r - 0.301).abs() < 1e-9);
    }
}
