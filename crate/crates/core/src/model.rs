//! Priors, test specifications and unit-variance presets.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::numerics::TruncatedTDensity;
use crate::Scalar;

/// Prior on the parameter under H1, as used inside the Bayes factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalysisPrior<T> {
    /// All mass at `mean` (the τ = 0 case of the normal prior).
    Point { mean: T },
    Normal { mean: T, sd: T },
    TruncatedT(TruncatedT<T>),
    /// Normal moment prior N(θ; θ₀, τ²)(θ − θ₀)²/τ², centred on the null value.
    NormalMoment { spread: T },
}

impl<T: Scalar> AnalysisPrior<T> {
    pub fn point(mean: T) -> Result<Self> {
        finite("prior mean", mean)?;
        Ok(Self::Point { mean })
    }

    /// Normal prior; `sd = 0` gives the point prior.
    pub fn normal(mean: T, sd: T) -> Result<Self> {
        finite("prior mean", mean)?;
        if sd == T::zero() {
            return Ok(Self::Point { mean });
        }
        positive("prior sd", sd)?;
        Ok(Self::Normal { mean, sd })
    }

    pub fn normal_moment(spread: T) -> Result<Self> {
        positive("normal moment spread", spread)?;
        Ok(Self::NormalMoment { spread })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Point { mean } => finite("prior mean", mean),
            Self::Normal { mean, sd } => {
                finite("prior mean", mean)?;
                positive("prior sd", sd)
            }
            Self::TruncatedT(t) => t.validate(),
            Self::NormalMoment { spread } => positive("normal moment spread", spread),
        }
    }
}

impl<T: Scalar> fmt::Display for AnalysisPrior<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Point { mean } => write!(f, "point:{mean}"),
            Self::Normal { mean, sd } => write!(f, "normal:{mean},{sd}"),
            Self::TruncatedT(t) => write!(
                f,
                "t:{},{},{},{},{}",
                t.location, t.scale, t.df, t.lower, t.upper
            ),
            Self::NormalMoment { spread } => write!(f, "nm:{spread}"),
        }
    }
}

/// Split "family:a,b,…" into the family and its numeric arguments.
fn parse_spec<T: Scalar>(text: &str) -> Result<(String, Vec<T>)> {
    let (family, args) = text
        .trim()
        .split_once(':')
        .ok_or_else(|| invalid(format!("prior {text:?} must look like family:value[,value…]")))?;
    let values = args
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map(T::of)
                .map_err(|_| invalid(format!("malformed number {a:?} in prior {text:?}")))
        })
        .collect::<Result<Vec<T>>>()?;
    Ok((family.trim().to_ascii_lowercase(), values))
}

fn arity<T>(text: &str, values: &[T], n: usize) -> Result<()> {
    if values.len() == n {
        Ok(())
    } else {
        Err(invalid(format!("prior {text:?} needs {n} value(s), got {}", values.len())))
    }
}

/// Parses `point:MU`, `normal:MU,TAU`, `t:MU,TAU,KAPPA,A,B` and `nm:TAU`,
/// the same forms `Display` writes.
impl<T: Scalar> FromStr for AnalysisPrior<T> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (family, v) = parse_spec::<T>(text)?;
        match family.as_str() {
            "point" => {
                arity(text, &v, 1)?;
                Self::point(v[0])
            }
            "normal" => {
                arity(text, &v, 2)?;
                Self::normal(v[0], v[1])
            }
            "t" => {
                arity(text, &v, 5)?;
                Ok(Self::TruncatedT(TruncatedT::new(v[0], v[1], v[2], v[3], v[4])?))
            }
            "nm" => {
                arity(text, &v, 1)?;
                Self::normal_moment(v[0])
            }
            other => Err(invalid(format!(
                "unknown analysis prior {other:?}; expected point, normal, t or nm"
            ))),
        }
    }
}

/// Location-scale t prior with `df` degrees of freedom, truncated to
/// [lower, upper]. With `df = 1` this is a (possibly one-sided) Cauchy prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedT<T> {
    pub location: T,
    pub scale: T,
    pub df: T,
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> TruncatedT<T> {
    pub fn new(location: T, scale: T, df: T, lower: T, upper: T) -> Result<Self> {
        let t = Self {
            location,
            scale,
            df,
            lower,
            upper,
        };
        t.validate()?;
        Ok(t)
    }

    /// Two-sided Cauchy prior centred at zero.
    pub fn cauchy(scale: T) -> Result<Self> {
        Self::new(T::zero(), scale, T::one(), T::neg_infinity(), T::infinity())
    }

    /// Cauchy prior centred at zero restricted to positive values.
    pub fn half_cauchy(scale: T) -> Result<Self> {
        Self::new(T::zero(), scale, T::one(), T::zero(), T::infinity())
    }

    pub fn validate(&self) -> Result<()> {
        finite("t prior location", self.location)?;
        positive("t prior scale", self.scale)?;
        positive("t prior degrees of freedom", self.df)?;
        if self.lower.is_nan() || self.upper.is_nan() || !(self.lower < self.upper) {
            return Err(invalid(format!(
                "t prior truncation requires lower < upper, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        Ok(())
    }

    pub fn density(&self) -> Result<TruncatedTDensity<T>> {
        Ok(TruncatedTDensity::new(
            self.location,
            self.scale,
            self.df,
            self.lower,
            self.upper,
        )?)
    }

    /// Symmetric about zero, so that BF01(t) = BF01(−t).
    pub fn is_symmetric(&self) -> bool {
        self.location == T::zero() && self.lower == -self.upper
    }
}

/// Prior on the parameter used to generate future data at the design stage.
/// `sd = 0` is a point design prior (conditional power).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPrior<T> {
    pub mean: T,
    pub sd: T,
}

impl<T: Scalar> DesignPrior<T> {
    pub fn point(mean: T) -> Result<Self> {
        Self::normal(mean, T::zero())
    }

    pub fn normal(mean: T, sd: T) -> Result<Self> {
        finite("design prior mean", mean)?;
        if sd.is_nan() || sd < T::zero() || !sd.is_finite() {
            return Err(invalid(format!("design prior sd must be nonnegative, got {sd}")));
        }
        Ok(Self { mean, sd })
    }

    pub fn is_point(&self) -> bool {
        self.sd == T::zero()
    }

    /// Point mass at the null value.
    pub fn is_point_null(&self, null: T) -> bool {
        self.is_point() && self.mean == null
    }
}

impl<T: Scalar> fmt::Display for DesignPrior<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "point:{}", self.mean)
        } else {
            write!(f, "normal:{},{}", self.mean, self.sd)
        }
    }
}

/// Parses `point:MU` and `normal:MU,SD`.
impl<T: Scalar> FromStr for DesignPrior<T> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (family, v) = parse_spec::<T>(text)?;
        match family.as_str() {
            "point" => {
                arity(text, &v, 1)?;
                Self::point(v[0])
            }
            "normal" => {
                arity(text, &v, 2)?;
                Self::normal(v[0], v[1])
            }
            other => Err(invalid(format!("unknown design prior {other:?}; expected point or normal"))),
        }
    }
}

/// Which hypothesis compelling evidence is sought for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Success means BF01 ≤ k with k < 1.
    EvidenceForH1,
    /// Success means BF01 ≥ k with k > 1.
    EvidenceForH0,
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "h1" => Ok(Self::EvidenceForH1),
            "h0" => Ok(Self::EvidenceForH0),
            other => Err(invalid(format!("direction must be h1 or h0, got {other:?}"))),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EvidenceForH1 => "h1",
            Self::EvidenceForH0 => "h0",
        })
    }
}

/// Evidence threshold k together with the direction it applies to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold<T> {
    k: T,
    orientation: Orientation,
}

impl<T: Scalar> Threshold<T> {
    pub fn new(k: T, orientation: Orientation) -> Result<Self> {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(invalid(format!("threshold k must be positive, got {k}")));
        }
        match orientation {
            Orientation::EvidenceForH1 if !(k < T::one()) => Err(invalid(format!(
                "evidence for H1 requires k < 1, got {k}"
            ))),
            Orientation::EvidenceForH0 if !(k > T::one()) => Err(invalid(format!(
                "evidence for H0 requires k > 1, got {k}"
            ))),
            _ => Ok(Self { k, orientation }),
        }
    }

    pub fn for_h1(k: T) -> Result<Self> {
        Self::new(k, Orientation::EvidenceForH1)
    }

    pub fn for_h0(k: T) -> Result<Self> {
        Self::new(k, Orientation::EvidenceForH0)
    }

    /// Orientation implied by k: below one is evidence for H1, above one for H0.
    pub fn from_k(k: T) -> Result<Self> {
        if k > T::one() {
            Self::for_h0(k)
        } else {
            Self::for_h1(k)
        }
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }
}

/// One row of the unit-variance table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Mean,
    MeanDifference,
    StandardizedMeanDifference,
    ZCorrelation,
    ArcsineDifference,
    LogOddsRatio,
    LogHazardRatio,
    LogRateRatio,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Mean,
        Preset::MeanDifference,
        Preset::StandardizedMeanDifference,
        Preset::ZCorrelation,
        Preset::ArcsineDifference,
        Preset::LogOddsRatio,
        Preset::LogHazardRatio,
        Preset::LogRateRatio,
    ];

    /// Short name used on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Preset::Mean => "mean",
            Preset::MeanDifference => "meandiff",
            Preset::StandardizedMeanDifference => "smd",
            Preset::ZCorrelation => "zcor",
            Preset::ArcsineDifference => "arcsine",
            Preset::LogOddsRatio => "logor",
            Preset::LogHazardRatio => "loghr",
            Preset::LogRateRatio => "logrr",
        }
    }

    pub fn info(self) -> &'static UnitVariancePreset {
        &PRESETS[self as usize]
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Preset::ALL
            .into_iter()
            .find(|p| p.key() == key)
            .ok_or_else(|| {
                let keys: Vec<_> = Preset::ALL.iter().map(|p| p.key()).collect();
                invalid(format!("unknown estimate kind {s:?}, expected one of {}", keys.join(", ")))
            })
    }
}

/// How the unit variance follows from the per-observation sd σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitVarianceRule {
    /// σ²
    SigmaSquared,
    /// 2σ²
    TwiceSigmaSquared,
    Constant(f64),
}

impl fmt::Display for UnitVarianceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SigmaSquared => f.write_str("sigma^2"),
            Self::TwiceSigmaSquared => f.write_str("2*sigma^2"),
            Self::Constant(c) if *c == 0.5 => f.write_str("1/2"),
            Self::Constant(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVariancePreset {
    pub preset: Preset,
    pub outcome: &'static str,
    pub estimate: &'static str,
    pub n_interpretation: &'static str,
    pub rule: UnitVarianceRule,
}

pub static PRESETS: [UnitVariancePreset; 8] = [
    UnitVariancePreset {
        preset: Preset::Mean,
        outcome: "Continuous",
        estimate: "Mean",
        n_interpretation: "Sample size",
        rule: UnitVarianceRule::SigmaSquared,
    },
    UnitVariancePreset {
        preset: Preset::MeanDifference,
        outcome: "Continuous",
        estimate: "Mean difference",
        n_interpretation: "Sample size per group",
        rule: UnitVarianceRule::TwiceSigmaSquared,
    },
    UnitVariancePreset {
        preset: Preset::StandardizedMeanDifference,
        outcome: "Continuous",
        estimate: "Standardized mean difference",
        n_interpretation: "Sample size per group",
        rule: UnitVarianceRule::Constant(2.0),
    },
    UnitVariancePreset {
        preset: Preset::ZCorrelation,
        outcome: "Continuous",
        estimate: "z-transformed correlation",
        n_interpretation: "Sample size minus 3",
        rule: UnitVarianceRule::Constant(1.0),
    },
    UnitVariancePreset {
        preset: Preset::ArcsineDifference,
        outcome: "Binary",
        estimate: "Arcsine square root difference",
        n_interpretation: "Sample size per group",
        rule: UnitVarianceRule::Constant(0.5),
    },
    UnitVariancePreset {
        preset: Preset::LogOddsRatio,
        outcome: "Binary",
        estimate: "Log odds ratio",
        n_interpretation: "Total number of events",
        rule: UnitVarianceRule::Constant(4.0),
    },
    UnitVariancePreset {
        preset: Preset::LogHazardRatio,
        outcome: "Survival",
        estimate: "Log hazard ratio",
        n_interpretation: "Total number of events",
        rule: UnitVarianceRule::Constant(4.0),
    },
    UnitVariancePreset {
        preset: Preset::LogRateRatio,
        outcome: "Count",
        estimate: "Log rate ratio",
        n_interpretation: "Total count",
        rule: UnitVarianceRule::Constant(4.0),
    },
];

/// Unit variance σ²_θ̂ of one effective observation for a preset row.
///
/// `sigma` is the per-observation standard deviation and is required for the
/// mean and mean-difference rows only.
pub fn unit_variance_for<T: Scalar>(preset: Preset, sigma: Option<T>) -> Result<T> {
    let need_sigma = || -> Result<T> {
        let s = sigma.ok_or_else(|| {
            invalid(format!(
                "estimate kind {:?} needs the outcome standard deviation sigma",
                preset.key()
            ))
        })?;
        positive("sigma", s)?;
        Ok(s)
    };
    Ok(match preset.info().rule {
        UnitVarianceRule::SigmaSquared => need_sigma()?.powi(2),
        UnitVarianceRule::TwiceSigmaSquared => T::of(2.0) * need_sigma()?.powi(2),
        UnitVarianceRule::Constant(c) => T::of(c),
    })
}

/// What the parameter is, for reporting the meaning of n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ParameterKind {
    Preset(Preset),
    Custom(String),
}

impl ParameterKind {
    pub fn n_interpretation(&self) -> &str {
        match self {
            Self::Preset(p) => p.info().n_interpretation,
            Self::Custom(_) => "Effective sample size",
        }
    }
}

impl Default for ParameterKind {
    fn default() -> Self {
        Self::Custom(String::from("unspecified"))
    }
}

impl fmt::Display for ParameterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Preset(p) => f.write_str(p.info().estimate),
            Self::Custom(s) => f.write_str(s),
        }
    }
}

/// Null value, evidence threshold and unit variance of the planned test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSpec<T> {
    pub null: T,
    pub threshold: Threshold<T>,
    pub unit_variance: T,
    pub kind: ParameterKind,
}

impl<T: Scalar> TestSpec<T> {
    pub fn new(null: T, threshold: Threshold<T>, unit_variance: T) -> Result<Self> {
        finite("null value", null)?;
        positive("unit variance", unit_variance)?;
        Ok(Self {
            null,
            threshold,
            unit_variance,
            kind: ParameterKind::default(),
        })
    }

    pub fn with_kind(mut self, kind: ParameterKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn k(&self) -> T {
        self.threshold.k()
    }

    pub fn orientation(&self) -> Orientation {
        self.threshold.orientation()
    }
}

/// Standard deviation √(τ_d² + σ²/n) of the predictive distribution of the
/// future estimate under the design prior.
pub fn predictive_sd<T: Scalar>(design: &DesignPrior<T>, n: T, unit_variance: T) -> T {
    if n.is_infinite() {
        return design.sd;
    }
    (design.sd * design.sd + unit_variance / n).sqrt()
}

/// Parses a positive number written as a decimal ("0.1", "3") or a fraction
/// of decimals ("1/10").
pub fn parse_threshold<T: Scalar>(text: &str) -> Result<T> {
    let text = text.trim();
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| invalid(format!("malformed threshold {text:?}")))
    };
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let (num, den) = (parse(num)?, parse(den)?);
            if !(num > 0.0 && den > 0.0) {
                return Err(invalid(format!("threshold parts must be positive, got {text:?}")));
            }
            num / den
        }
        None => parse(text)?,
    };
    if !(value > 0.0) || !value.is_finite() {
        return Err(invalid(format!("threshold must be positive and finite, got {text:?}")));
    }
    Ok(T::of(value))
}

fn finite<T: Scalar>(what: &str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{what} must be finite, got {v}")))
    }
}

fn positive<T: Scalar>(what: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{what} must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prior_text_round_trips() {
        for text in ["point:-6", "normal:0,0.7071067811865476", "t:0,0.7071067811865476,1,0,inf", "nm:0.35355339059327373"] {
            let p: AnalysisPrior<f64> = text.parse().unwrap();
            assert_eq!(p.to_string(), text);
            assert_eq!(p.to_string().parse::<AnalysisPrior<f64>>().unwrap(), p);
        }
        assert_eq!("normal:1,0".parse::<AnalysisPrior<f64>>().unwrap(), AnalysisPrior::Point { mean: 1.0 });
        let d: DesignPrior<f64> = "normal:0.5,0.1".parse().unwrap();
        assert_eq!(d.to_string().parse::<DesignPrior<f64>>().unwrap(), d);
        for bad in ["normal:0", "cauchy:1", "point", "point:x", "nm:-1", "t:0,1,1,1,0"] {
            assert!(bad.parse::<AnalysisPrior<f64>>().is_err(), "{bad}");
        }
        assert!("normal:0,-1".parse::<DesignPrior<f64>>().is_err());
    }

    #[test]
    fn presets_match_table() {
        assert_eq!(unit_variance_for(Preset::MeanDifference, Some(15.0f64)).unwrap(), 450.0);
        assert_eq!(unit_variance_for(Preset::Mean, Some(3.0f64)).unwrap(), 9.0);
        assert_eq!(unit_variance_for::<f64>(Preset::StandardizedMeanDifference, None).unwrap(), 2.0);
        assert_eq!(unit_variance_for::<f64>(Preset::ZCorrelation, None).unwrap(), 1.0);
        assert_eq!(unit_variance_for::<f64>(Preset::ArcsineDifference, None).unwrap(), 0.5);
        for p in [Preset::LogOddsRatio, Preset::LogHazardRatio, Preset::LogRateRatio] {
            assert_eq!(unit_variance_for::<f64>(p, None).unwrap(), 4.0);
        }
        assert!(unit_variance_for::<f64>(Preset::MeanDifference, None).is_err());
        assert_eq!(PRESETS.len(), 8);
        for (i, p) in Preset::ALL.iter().enumerate() {
            assert_eq!(PRESETS[i].preset, *p);
            assert_eq!(p.key().parse::<Preset>().unwrap(), *p);
        }
        assert_eq!(Preset::ZCorrelation.info().n_interpretation, "Sample size minus 3");
    }

    #[test]
    fn predictive_sd_values() {
        let point = DesignPrior::point(0.0f64).unwrap();
        assert!((predictive_sd(&point, 4.0, 2.0) - 0.5f64.sqrt()).abs() < 1e-15);
        let d = DesignPrior::normal(-6.0f64, 2.0).unwrap();
        assert_eq!(predictive_sd(&d, f64::INFINITY, 450.0), 2.0);
        let d = DesignPrior::normal(0.0f64, 0.1).unwrap();
        assert!((predictive_sd(&d, 100.0, 2.0) - 0.03f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn thresholds() {
        assert_eq!(parse_threshold::<f64>("1/10").unwrap(), 0.1);
        assert_eq!(parse_threshold::<f64>("3").unwrap(), 3.0);
        assert!((parse_threshold::<f64>("1/6").unwrap() - 0.166_667).abs() < 1e-6);
        assert_eq!(parse_threshold::<f64>(" 0.5 / 2 ").unwrap(), 0.25);
        for bad in ["", "abc", "1/0", "-1", "0", "1/-3", "1/2/3", "inf"] {
            assert!(parse_threshold::<f64>(bad).is_err(), "{bad:?}");
        }
        assert!(Threshold::for_h1(0.1f64).is_ok());
        assert!(Threshold::for_h1(3.0f64).is_err());
        assert!(Threshold::for_h0(0.1f64).is_err());
        assert!(Threshold::for_h1(1.0f64).is_err());
    }

    #[test]
    fn prior_constructors() {
        assert_eq!(
            AnalysisPrior::normal(0.3f64, 0.0).unwrap(),
            AnalysisPrior::Point { mean: 0.3 }
        );
        assert!(AnalysisPrior::normal(0.0f64, -1.0).is_err());
        assert!(AnalysisPrior::normal_moment(0.0f64).is_err());
        assert!(TruncatedT::new(0.0f64, 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(TruncatedT::cauchy(0.5f64).unwrap().is_symmetric());
        assert!(!TruncatedT::half_cauchy(0.5f64).unwrap().is_symmetric());
        assert!(DesignPrior::normal(0.0f64, -0.1).is_err());
        assert!(DesignPrior::point(0.0f64).unwrap().is_point_null(0.0));
    }
}
