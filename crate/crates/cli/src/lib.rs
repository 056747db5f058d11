//! The `bfdesign` command line: Bayes factors, power, sample sizes, power
//! curves and Monte Carlo checks.
//!
//! Every run first echoes its fully resolved settings as `key = value`
//! lines (stdout in human mode, stderr in csv mode). Those lines are valid
//! configuration-file input and reproduce the run exactly.

mod config;
mod output;

use std::io::{self, Write};

use bfdesign::mc::{self, CellOutcome, Condition, McConfig};
use bfdesign::model::{parse_threshold, unit_variance_for, ParameterKind, PRESETS};
use bfdesign::power::{self as pw, Intermediates};
use bfdesign::ssd::{self, Refinement};
use bfdesign::{
    bf, AnalysisPrior, DesignDistribution, DesignPrior, EstimateInput, Orientation, Preset, RootChoice, SampleSizeResult,
    SearchOptions, TTestDesign, TTestKind, TestSpec, Threshold, TruncatedT,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use output::{significant, Format};
use output::{Table, Val};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] bfdesign::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Core(bfdesign::Error::InvalidInput(_)) => 2,
            CliError::Core(bfdesign::Error::Infeasible { .. }) => 3,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "bfdesign", version, about = "Bayes factor power and sample size calculations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bayes factor BF01 from an estimate or a t statistic.
    #[command(args_override_self = true)]
    Bf(BfArgs),
    /// Probability of compelling evidence at a given sample size.
    #[command(args_override_self = true)]
    Power(PowerArgs),
    /// Sample size reaching a target power.
    #[command(name = "n", args_override_self = true)]
    N(NArgs),
    /// Power over a range of sample sizes.
    #[command(args_override_self = true)]
    Curve(CurveArgs),
    /// Monte Carlo estimate of the power, or the validation grid.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// The unit-variance table.
    #[command(args_override_self = true)]
    Presets(PresetsArgs),
}

#[derive(Debug, Clone, Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// File of `key = value` settings; flags on the command line win.
    #[arg(long, value_name = "FILE")]
    config: Option<String>,
}

/// Unit variance σ², given directly or through an estimate kind.
#[derive(Debug, Clone, Args)]
struct Scale {
    /// Unit variance, so that se² = usd/n.
    #[arg(long, allow_hyphen_values = true)]
    usd: Option<f64>,
    /// Estimate kind from the `presets` table.
    #[arg(long = "usd-kind", value_name = "KIND")]
    usd_kind: Option<Preset>,
    /// Outcome standard deviation, for kinds whose unit variance depends on it.
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
}

struct UnitVariance {
    value: f64,
    kind: ParameterKind,
}

impl Scale {
    fn resolve(&self) -> Result<Option<UnitVariance>> {
        match (self.usd, self.usd_kind) {
            (Some(_), Some(_)) => Err(usage("give either --usd or --usd-kind, not both")),
            (Some(value), None) => {
                if self.sigma.is_some() {
                    return Err(usage("--sigma only applies together with --usd-kind"));
                }
                Ok(Some(UnitVariance {
                    value,
                    kind: ParameterKind::default(),
                }))
            }
            (None, Some(p)) => Ok(Some(UnitVariance {
                value: unit_variance_for(p, self.sigma)?,
                kind: ParameterKind::Preset(p),
            })),
            (None, None) => Ok(None),
        }
    }

    fn require(&self) -> Result<UnitVariance> {
        self.resolve()?
            .ok_or_else(|| usage("the unit variance is missing: give --usd or --usd-kind (with --sigma)"))
    }

    fn settings(&self, s: &mut Settings) {
        s.opt("usd", self.usd);
        s.opt("usd-kind", self.usd_kind.map(|p| p.key()));
        s.opt("sigma", self.sigma);
    }
}

fn parse_k(text: &str) -> Result<f64, String> {
    parse_threshold::<f64>(text).map_err(|e| e.to_string())
}

fn parse_root(text: &str) -> Result<RootChoice, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "plus" => Ok(RootChoice::Plus),
        "minus" => Ok(RootChoice::Minus),
        other => Err(format!("root must be plus or minus, got {other:?}")),
    }
}

fn root_key(r: RootChoice) -> &'static str {
    match r {
        RootChoice::Plus => "plus",
        RootChoice::Minus => "minus",
    }
}

fn kind_key(k: TTestKind) -> &'static str {
    match k {
        TTestKind::OneSample => "one",
        TTestKind::Paired => "paired",
        TTestKind::TwoSample => "two",
    }
}

/// Analysis prior, design prior, threshold and test setup shared by the
/// planning subcommands.
#[derive(Debug, Clone, Args)]
struct Model {
    /// Analysis prior: point:MU, normal:MU,TAU, t:MU,TAU,KAPPA,A,B or nm:TAU.
    #[arg(long, allow_hyphen_values = true)]
    prior: Option<AnalysisPrior>,
    /// Null value θ₀.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    null: f64,
    #[command(flatten)]
    scale: Scale,
    /// Design prior: point:MU or normal:MU,SD.
    #[arg(long, allow_hyphen_values = true)]
    design: Option<DesignPrior>,
    /// Evidence threshold; fractions such as 1/10 are accepted.
    #[arg(long, value_parser = parse_k)]
    k: Option<f64>,
    /// h1: success is BF01 ≤ k; h0: success is BF01 ≥ k. Implied by k if omitted.
    #[arg(long)]
    direction: Option<Orientation>,
    /// t test layout for the t prior: one, paired or two (n per group).
    #[arg(long)]
    test: Option<TTestKind>,
    /// Noncentral t distribution for the future t statistic (point designs).
    #[arg(long = "exact-nct", num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    exact_nct: bool,
}

/// A fully specified planning problem.
enum Plan {
    Z {
        test: TestSpec,
        analysis: AnalysisPrior,
        design: DesignPrior,
    },
    T {
        kind: TTestKind,
        prior: TruncatedT,
        design: DesignPrior,
        threshold: Threshold,
        distribution: DesignDistribution,
    },
}

impl Model {
    fn threshold(&self) -> Result<Threshold> {
        let k = self.k.ok_or_else(|| usage("the threshold --k is missing"))?;
        Ok(match self.direction {
            Some(d) => Threshold::new(k, d)?,
            None => Threshold::from_k(k)?,
        })
    }

    fn prior(&self) -> Result<AnalysisPrior> {
        self.prior.ok_or_else(|| usage("the analysis prior --prior is missing"))
    }

    fn design(&self) -> Result<DesignPrior> {
        self.design.ok_or_else(|| usage("the design prior --design is missing"))
    }

    fn plan(&self) -> Result<Plan> {
        let threshold = self.threshold()?;
        let design = self.design()?;
        match self.prior()? {
            AnalysisPrior::TruncatedT(prior) => {
                if self.null != 0.0 {
                    return Err(usage("the t-test Bayes factor tests θ = 0; --null must be 0"));
                }
                if self.scale.resolve()?.is_some() {
                    return Err(usage("the t prior is on the standardized effect; drop --usd/--usd-kind"));
                }
                Ok(Plan::T {
                    kind: self.test.unwrap_or(TTestKind::TwoSample),
                    prior,
                    design,
                    threshold,
                    distribution: if self.exact_nct {
                        DesignDistribution::ExactNct
                    } else {
                        DesignDistribution::NormalApprox
                    },
                })
            }
            analysis => {
                if self.test.is_some() || self.exact_nct {
                    return Err(usage("--test and --exact-nct apply to the t prior only"));
                }
                let uv = self.scale.require()?;
                let test = TestSpec::new(self.null, threshold, uv.value)?.with_kind(uv.kind);
                Ok(Plan::Z { test, analysis, design })
            }
        }
    }

    fn settings(&self, s: &mut Settings) {
        s.opt("prior", self.prior);
        s.set("null", self.null);
        self.scale.settings(s);
        s.opt("design", self.design);
        s.opt("k", self.k);
        if let Ok(t) = self.threshold() {
            s.set("direction", t.orientation());
        }
        if matches!(self.prior, Some(AnalysisPrior::TruncatedT(_))) {
            s.set("test", kind_key(self.test.unwrap_or(TTestKind::TwoSample)));
            s.set("exact-nct", self.exact_nct);
        }
    }

    fn notes(&self, s: &mut Settings) {
        if let Ok(Some(uv)) = self.scale.resolve() {
            s.note(format!("unit variance {} (n: {})", uv.value, uv.kind.n_interpretation()));
        }
        if let Ok(t) = self.threshold() {
            s.note(match t.orientation() {
                Orientation::EvidenceForH1 => format!("success: BF01 <= {} (compelling evidence for H1)", t.k()),
                Orientation::EvidenceForH0 => format!("success: BF01 >= {} (compelling evidence for H0)", t.k()),
            });
        }
        if matches!(self.prior, Some(AnalysisPrior::TruncatedT(_))) {
            s.note("n is per group (per pair for paired tests); effects are standardized");
        }
    }
}

impl Plan {
    fn power(&self, n: f64) -> Result<bfdesign::PowerResult> {
        Ok(match self {
            Plan::Z { test, analysis, design } => pw::power(&bfdesign::PowerQuery::new(test.clone(), *analysis, *design, n))?,
            Plan::T {
                kind,
                prior,
                design,
                threshold,
                distribution,
            } => pw::power_t(n, *kind, prior, design, threshold, *distribution)?,
        })
    }

    fn limit(&self) -> Result<f64> {
        Ok(match self {
            Plan::Z { test, analysis, design } => pw::limiting_power(test, analysis, design)?,
            Plan::T {
                prior, design, threshold, ..
            } => {
                let test = TestSpec::new(0.0, *threshold, 1.0)?;
                pw::limiting_power(&test, &AnalysisPrior::TruncatedT(*prior), design)?
            }
        })
    }

    /// The same problem with evidence for H0 at threshold 1/k.
    fn for_h0(&self) -> Result<Plan> {
        let flip = |t: &Threshold| -> Result<Threshold> {
            if t.orientation() != Orientation::EvidenceForH1 {
                return Err(usage("--with-h0 needs a threshold for evidence in favour of H1"));
            }
            Ok(Threshold::for_h0(1.0 / t.k())?)
        };
        Ok(match self {
            Plan::Z { test, analysis, design } => {
                let mut test = test.clone();
                test.threshold = flip(&test.threshold)?;
                Plan::Z {
                    test,
                    analysis: *analysis,
                    design: *design,
                }
            }
            Plan::T {
                kind,
                prior,
                design,
                threshold,
                distribution,
            } => Plan::T {
                kind: *kind,
                prior: *prior,
                design: *design,
                threshold: flip(threshold)?,
                distribution: *distribution,
            },
        })
    }
}

/// Resolved settings and explanatory notes, echoed before the results.
#[derive(Default)]
struct Settings {
    lines: Vec<String>,
}

impl Settings {
    fn set(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key} = {value}"));
    }

    fn opt<V: std::fmt::Display>(&mut self, key: &str, value: Option<V>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    fn note(&mut self, text: impl AsRef<str>) {
        self.lines.push(format!("# {}", text.as_ref()));
    }
}

#[derive(Debug, Clone, Args)]
struct BfArgs {
    /// Analysis prior: point:MU, normal:MU,TAU, t:MU,TAU,KAPPA,A,B or nm:TAU.
    #[arg(long, allow_hyphen_values = true)]
    prior: AnalysisPrior,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    null: f64,
    /// Parameter estimate θ̂.
    #[arg(long, allow_hyphen_values = true)]
    estimate: Option<f64>,
    /// Standard error of the estimate.
    #[arg(long)]
    se: Option<f64>,
    #[command(flatten)]
    scale: Scale,
    /// Effective sample size, with --usd or --usd-kind.
    #[arg(long)]
    n: Option<f64>,
    /// t statistic, for the t prior.
    #[arg(long, allow_hyphen_values = true)]
    tstat: Option<f64>,
    /// Sample size (first group).
    #[arg(long)]
    n1: Option<f64>,
    /// Second group size; implies a two-sample test.
    #[arg(long)]
    n2: Option<f64>,
    #[arg(long)]
    test: Option<TTestKind>,
    #[command(flatten)]
    common: Common,
}

impl BfArgs {
    fn settings(&self, s: &mut Settings) {
        s.set("prior", self.prior);
        s.set("null", self.null);
        s.opt("estimate", self.estimate);
        s.opt("se", self.se);
        self.scale.settings(s);
        s.opt("n", self.n);
        s.opt("tstat", self.tstat);
        s.opt("n1", self.n1);
        s.opt("n2", self.n2);
        s.opt("test", self.test.map(kind_key));
        if let Ok(Some(uv)) = self.scale.resolve() {
            s.note(format!("unit variance {} (n: {})", uv.value, uv.kind.n_interpretation()));
        }
        s.note("BF01 > 1 favours H0, BF01 < 1 favours H1");
    }

    fn t_design(&self) -> Result<TTestDesign> {
        let n1 = self.n1.ok_or_else(|| usage("the t path needs --n1"))?;
        Ok(match (self.n2, self.test) {
            (Some(n2), None | Some(TTestKind::TwoSample)) => TTestDesign::TwoSample { n1, n2 },
            (Some(_), Some(_)) => return Err(usage("--n2 implies a two-sample test")),
            (None, Some(TTestKind::TwoSample)) => TTestDesign::TwoSample { n1, n2: n1 },
            (None, Some(TTestKind::Paired)) => TTestDesign::Paired { n: n1 },
            (None, None | Some(TTestKind::OneSample)) => TTestDesign::OneSample { n: n1 },
        })
    }

    fn run(&self) -> Result<Table> {
        let factor = match (self.tstat, self.estimate) {
            (Some(_), Some(_)) => return Err(usage("give either --tstat or --estimate, not both")),
            (Some(t), None) => {
                let AnalysisPrior::TruncatedT(prior) = self.prior else {
                    return Err(usage("--tstat needs a t prior (t:MU,TAU,KAPPA,A,B)"));
                };
                if self.null != 0.0 {
                    return Err(usage("the t-test Bayes factor tests θ = 0; --null must be 0"));
                }
                bf::tbf01(t, &self.t_design()?, &prior)?
            }
            (None, Some(estimate)) => {
                let input = match (self.se, self.scale.resolve()?, self.n) {
                    (Some(se), None, None) => EstimateInput::StandardError { estimate, se },
                    (None, Some(uv), Some(n)) => EstimateInput::UnitVariance {
                        estimate,
                        unit_variance: uv.value,
                        n,
                    },
                    _ => return Err(usage("give either --se, or --usd/--usd-kind together with --n")),
                };
                bf::bf01(&input, self.null, &self.prior)?
            }
            (None, None) => return Err(usage("give --estimate (normal path) or --tstat (t path)")),
        };
        Ok(Table::record(vec![
            ("bf01", factor.value().into()),
            ("log_bf01", factor.ln.into()),
            ("bf10", factor.inverse().value().into()),
        ]))
    }
}

#[derive(Debug, Clone, Args)]
struct PowerArgs {
    #[command(flatten)]
    model: Model,
    /// Sample size (per group for the t prior).
    #[arg(long)]
    n: f64,
    #[command(flatten)]
    common: Common,
}

fn intermediate_columns(i: Option<Intermediates<f64>>) -> Vec<(&'static str, Val)> {
    let (mut z, mut m, mut x, mut y, mut a, mut lo, mut hi) = (None, None, None, None, None, None, None);
    match i {
        Some(Intermediates::Point { z: v }) => z = Some(v),
        Some(Intermediates::Normal { m: mv, x: xv }) => (m, x) = (Some(mv), Some(xv)),
        Some(Intermediates::NormalMoment { y: yv, a: av }) => (y, a) = (Some(yv), Some(av)),
        Some(Intermediates::TTest { t_lo, t_hi }) => (lo, hi) = (Some(t_lo), Some(t_hi)),
        None => {}
    }
    vec![
        ("z", z.into()),
        ("m", m.into()),
        ("x", x.into()),
        ("y", y.into()),
        ("a", a.into()),
        ("t_lo", lo.into()),
        ("t_hi", hi.into()),
    ]
}

impl PowerArgs {
    fn settings(&self, s: &mut Settings) {
        self.model.settings(s);
        s.set("n", self.n);
        self.model.notes(s);
    }

    fn run(&self) -> Result<Table> {
        let plan = self.model.plan()?;
        let r = plan.power(self.n)?;
        let limit = match r.limit {
            Some(l) => l,
            None => plan.limit()?,
        };
        let mut fields = vec![("n", self.n.into()), ("power", r.probability.into()), ("limit", limit.into())];
        fields.extend(intermediate_columns(Some(r.intermediates)));
        Ok(Table::record(fields))
    }
}

#[derive(Debug, Clone, Args)]
struct NArgs {
    #[command(flatten)]
    model: Model,
    /// Target power.
    #[arg(long = "power")]
    target: f64,
    /// Lambert-W approximation for a normal prior centred on the null, with
    /// the design prior equal to the analysis prior.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    lambert: bool,
    /// Also report the frequentist two-sided z-test sample size at this level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Root of the quadratic in √n for a point analysis prior.
    #[arg(long, value_parser = parse_root)]
    root: Option<RootChoice>,
    #[command(flatten)]
    common: Common,
}

fn method_key(m: ssd::Method) -> &'static str {
    match m {
        ssd::Method::PointGeneral => "point-general",
        ssd::Method::PointDesignPoint => "point-design-point",
        ssd::Method::PointMatched => "point-matched",
        ssd::Method::LocalNormal => "lambert",
        ssd::Method::RootSearch => "root-search",
    }
}

impl NArgs {
    fn settings(&self, s: &mut Settings) {
        self.model.settings(s);
        s.set("power", self.target);
        s.set("lambert", self.lambert);
        s.opt("alpha", self.alpha);
        s.opt("root", self.root.map(root_key));
        self.model.notes(s);
    }

    fn run(&self, format: Format) -> Result<Table> {
        let result = if self.lambert {
            self.lambert()?
        } else {
            match self.model.plan()? {
                Plan::Z { test, analysis, design } => match analysis {
                    AnalysisPrior::Point { .. } => ssd::n_point_analysis(
                        &test,
                        &analysis,
                        &design,
                        self.target,
                        self.root.unwrap_or_default(),
                    )?,
                    _ if self.root.is_some() => return Err(usage("--root applies to a point analysis prior only")),
                    _ => ssd::n_for(&test, &analysis, &design, self.target)?,
                },
                Plan::T {
                    kind,
                    prior,
                    design,
                    threshold,
                    distribution,
                } => {
                    if self.root.is_some() {
                        return Err(usage("--root applies to a point analysis prior only"));
                    }
                    ssd::n_t(
                        kind,
                        &prior,
                        &design,
                        &threshold,
                        self.target,
                        distribution,
                        &SearchOptions::default(),
                    )?
                }
            }
        };
        let freq = match self.alpha {
            Some(alpha) => {
                let uv = self.model.scale.require()?;
                let effect = self.model.design()?.mean - self.model.null;
                Some(ssd::freq_n(alpha, self.target, effect, (uv.value / 2.0).sqrt())?)
            }
            None => None,
        };
        Ok(Self::table(&result, freq, format))
    }

    fn lambert(&self) -> Result<SampleSizeResult> {
        if self.model.design.is_some() {
            return Err(usage("--lambert sets the design prior to the analysis prior; drop --design"));
        }
        if self.root.is_some() || self.model.test.is_some() || self.model.exact_nct {
            return Err(usage("--root, --test and --exact-nct do not apply with --lambert"));
        }
        let tau = match self.model.prior()? {
            AnalysisPrior::Normal { mean, sd } if mean == self.model.null => sd,
            _ => return Err(usage("--lambert needs a normal prior centred on the null, normal:NULL,TAU")),
        };
        let k = self.model.threshold()?.k();
        let uv = self.model.scale.require()?;
        Ok(ssd::n_local_normal(k, self.target, uv.value, tau)?)
    }

    fn table(r: &SampleSizeResult, freq: Option<f64>, format: Format) -> Table {
        let refined = r.refined.as_ref();
        let method: Val = match format {
            Format::Human => r.method.to_string().into(),
            Format::Csv => method_key(r.method).into(),
        };
        Table::record(vec![
            ("n_real", r.n_real.into()),
            ("n_integer", r.n_integer.into()),
            ("method", method),
            ("target", r.target.into()),
            ("achieved_power", r.achieved_power.into()),
            ("limit", r.limit.into()),
            ("unit_information_n", r.unit_information_n.into()),
            ("refined_n_real", refined.map(|x: &Refinement<f64>| x.n_real).into()),
            ("refined_n_integer", refined.map_or(Val::Empty, |x| x.n_integer.into())),
            ("refined_achieved_power", refined.map(|x| x.achieved_power).into()),
            ("freq_n_real", freq.into()),
            ("freq_n_integer", freq.map_or(Val::Empty, |f| (f.ceil() as u64).into())),
        ])
    }
}

#[derive(Debug, Clone, Args)]
struct CurveArgs {
    #[command(flatten)]
    model: Model,
    #[arg(long = "n-from")]
    n_from: f64,
    #[arg(long = "n-to")]
    n_to: f64,
    #[arg(long = "n-points", default_value_t = 50)]
    n_points: usize,
    /// Space the sample sizes evenly on the log scale.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    log: bool,
    /// Add Pr(BF01 ≥ 1/k), the probability of compelling evidence for H0.
    #[arg(long = "with-h0", num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    with_h0: bool,
    #[command(flatten)]
    common: Common,
}

impl CurveArgs {
    fn settings(&self, s: &mut Settings) {
        self.model.settings(s);
        s.set("n-from", self.n_from);
        s.set("n-to", self.n_to);
        s.set("n-points", self.n_points);
        s.set("log", self.log);
        s.set("with-h0", self.with_h0);
        self.model.notes(s);
    }

    fn grid(&self) -> Result<Vec<f64>> {
        let (a, b, m) = (self.n_from, self.n_to, self.n_points);
        if !(a > 0.0 && b >= a && b.is_finite()) {
            return Err(usage(format!("need 0 < n-from <= n-to, got {a} and {b}")));
        }
        if m == 0 || (m == 1 && a != b) {
            return Err(usage("n-points must be at least 2 for a range"));
        }
        let at = |i: usize| -> f64 {
            if i == 0 {
                return a;
            }
            if i == m - 1 {
                return b;
            }
            let f = i as f64 / (m - 1) as f64;
            if self.log {
                (a.ln() + f * (b.ln() - a.ln())).exp()
            } else {
                a + f * (b - a)
            }
        };
        Ok((0..m).map(at).collect())
    }

    fn run(&self) -> Result<Table> {
        let plan = self.model.plan()?;
        let h0 = if self.with_h0 { Some(plan.for_h0()?) } else { None };
        let mut columns = vec!["n", "power"];
        if h0.is_some() {
            columns.push("power_h0");
        }
        let mut table = Table::new(columns);
        for n in self.grid()? {
            let mut row = vec![n.into(), plan.power(n)?.probability.into()];
            if let Some(h0) = &h0 {
                row.push(h0.power(n)?.probability.into());
            }
            table.push(row);
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Grid {
    /// Analysis means {0, .2, .5, .8} × sds {0, .5}, design means {0, .2, .5, .8} × sds {0, .2}.
    Standard,
}

#[derive(Debug, Clone, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: Model,
    /// Sample size (per group for the t prior).
    #[arg(long)]
    n: Option<f64>,
    #[arg(long, default_value_t = mc::DEFAULT_REPLICATES)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// t prior: evaluate the Bayes factor for every simulated data set.
    #[arg(long = "per-draw", num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    per_draw: bool,
    /// Run a validation grid instead of a single condition.
    #[arg(long, value_enum)]
    grid: Option<Grid>,
    #[command(flatten)]
    common: Common,
}

impl SimulateArgs {
    fn settings(&self, s: &mut Settings) {
        match self.grid {
            Some(_) => s.set("grid", "standard"),
            None => {
                self.model.settings(s);
                s.opt("n", self.n);
                if matches!(self.model.prior, Some(AnalysisPrior::TruncatedT(_))) {
                    s.set("per-draw", self.per_draw);
                }
            }
        }
        s.set("reps", self.reps);
        s.set("seed", self.seed);
        s.set("threads", self.threads);
        if self.grid.is_none() {
            self.model.notes(s);
        } else {
            s.note("each feasible cell is simulated at its computed sample size; cell i uses seed + i");
        }
        s.note(format!("generator: {}", mc::GENERATOR));
    }

    fn run(&self, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
        if self.grid.is_some() {
            return self.run_grid(format, out, err);
        }
        let n = self.n.ok_or_else(|| usage("the sample size --n is missing"))?;
        let condition = match self.model.plan()? {
            Plan::Z { test, analysis, design } => {
                if self.per_draw {
                    return Err(usage("--per-draw applies to the t prior only"));
                }
                Condition::Z {
                    test,
                    analysis,
                    design,
                    n,
                }
            }
            Plan::T {
                kind,
                prior,
                design,
                threshold,
                distribution,
            } => {
                if n.fract() != 0.0 || n < 2.0 {
                    return Err(usage(format!("the t path simulates whole observations; --n must be an integer >= 2, got {n}")));
                }
                Condition::T {
                    kind,
                    prior,
                    design,
                    threshold,
                    n: n as u64,
                    per_draw: self.per_draw,
                    analytic: distribution,
                }
            }
        };
        let config = McConfig {
            threads: self.threads.max(1),
            ..McConfig::new(condition, self.reps, self.seed)
        };
        let r = mc::simulate_power(&config)?;
        Table::record(vec![
            ("n", n.into()),
            ("replicates", r.replicates.into()),
            ("successes", r.successes.into()),
            ("empirical", r.empirical.into()),
            ("standard_error", r.standard_error.into()),
            ("analytic", r.analytic.into()),
            ("discrepancy", r.discrepancy.into()),
            ("z_score", r.z_score().into()),
        ])
        .write(format, out)?;
        Ok(())
    }

    fn run_grid(&self, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
        let m = &self.model;
        if m.prior.is_some() || m.design.is_some() || m.k.is_some() || self.n.is_some() {
            return Err(usage("--grid fixes the priors, threshold and sample sizes; drop them"));
        }
        let summary = mc::mc_validate(&mc::standard_validation_grid(), self.reps, self.seed, self.threads.max(1))?;
        let mut table = Table::new(vec![
            "cell",
            "analysis",
            "design",
            "k",
            "target",
            "status",
            "n",
            "successes",
            "empirical",
            "analytic",
            "discrepancy",
        ]);
        for (i, (cell, outcome)) in summary.cells.iter().enumerate() {
            let mut row: Vec<Val> = vec![
                (i as u64).into(),
                cell.analysis.to_string().into(),
                cell.design.to_string().into(),
                cell.test.k().into(),
                cell.target.into(),
            ];
            match outcome {
                CellOutcome::Simulated { n, report } => row.extend([
                    "simulated".into(),
                    (*n).into(),
                    report.successes.into(),
                    report.empirical.into(),
                    report.analytic.into(),
                    report.discrepancy.into(),
                ]),
                CellOutcome::Skipped { .. } => {
                    row.extend(["skipped".into(), Val::Empty, Val::Empty, Val::Empty, Val::Empty, Val::Empty])
                }
            }
            table.push(row);
        }
        table.write(format, out)?;
        let lines = [
            format!("simulated cells: {} of {}", summary.simulated, summary.cells.len()),
            format!("max |discrepancy|: {}", significant(summary.max_abs_discrepancy, 6)),
            format!("median |discrepancy|: {}", significant(summary.median_abs_discrepancy, 6)),
        ];
        let sink: &mut dyn Write = match format {
            Format::Human => {
                writeln!(out)?;
                out
            }
            Format::Csv => err,
        };
        for l in lines {
            writeln!(sink, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Args)]
struct PresetsArgs {
    #[command(flatten)]
    common: Common,
}

fn presets_table() -> Table {
    let mut t = Table::new(vec!["kind", "outcome", "estimate", "unit_variance", "n_interpretation"]);
    for p in PRESETS.iter() {
        t.push(vec![
            p.preset.key().into(),
            p.outcome.into(),
            p.estimate.into(),
            p.rule.to_string().into(),
            p.n_interpretation.into(),
        ]);
    }
    t
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bf(_) => "bf",
            Command::Power(_) => "power",
            Command::N(_) => "n",
            Command::Curve(_) => "curve",
            Command::Simulate(_) => "simulate",
            Command::Presets(_) => "presets",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Bf(a) => &a.common,
            Command::Power(a) => &a.common,
            Command::N(a) => &a.common,
            Command::Curve(a) => &a.common,
            Command::Simulate(a) => &a.common,
            Command::Presets(a) => &a.common,
        }
    }

    fn settings(&self) -> Settings {
        let mut s = Settings::default();
        s.note(format!("bfdesign {}", self.name()));
        s.set("format", self.common().format.key());
        match self {
            Command::Bf(a) => a.settings(&mut s),
            Command::Power(a) => a.settings(&mut s),
            Command::N(a) => a.settings(&mut s),
            Command::Curve(a) => a.settings(&mut s),
            Command::Simulate(a) => a.settings(&mut s),
            Command::Presets(_) => {}
        }
        s
    }

    fn execute(&self, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
        let format = self.common().format;
        let echo: &mut dyn Write = match format {
            Format::Human => &mut *out,
            Format::Csv => &mut *err,
        };
        for line in &self.settings().lines {
            writeln!(echo, "{line}")?;
        }
        if format == Format::Human {
            writeln!(out)?;
        }
        let table = match self {
            Command::Bf(a) => a.run()?,
            Command::Power(a) => a.run()?,
            Command::N(a) => a.run(format)?,
            Command::Curve(a) => a.run()?,
            Command::Simulate(a) => return a.run(format, out, err),
            Command::Presets(_) => presets_table(),
        };
        table.write(format, out)?;
        Ok(())
    }
}

/// Run the command line `argv` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code: 0 on
/// success, 2 for usage errors, 3 for unattainable targets and 1 for
/// numerical failures.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => return report(&e, err),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match cli.command.execute(out, err) {
        Ok(()) => 0,
        Err(e) => report(&e, err),
    }
}

fn report(e: &CliError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    if let CliError::Core(bfdesign::Error::Infeasible { limit, .. }) = e {
        let _ = writeln!(err, "limiting power: {}", significant(*limit, 6));
    }
    e.exit_code()
}
