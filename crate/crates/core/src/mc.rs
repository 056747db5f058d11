//! Monte Carlo power: simulate estimates (or raw t-test data) under the
//! design prior and count how often the Bayes factor reaches the threshold.
//!
//! Replicates are split into fixed-size blocks, block `b` drawing from
//! ChaCha20 stream `b` of the seed, so counts do not depend on how blocks
//! are scheduled across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bf::{bf01, tbf01, EstimateInput};
use crate::error::{invalid, Error, Result};
use crate::model::{AnalysisPrior, DesignPrior, Orientation, TestSpec, Threshold, TruncatedT};
use crate::numerics::std_normal_quantile;
use crate::power::{power, power_t, t_success_region, DesignDistribution, PowerQuery, SuccessRegion, TTestKind};
use crate::ssd::n_for;

/// Recorded with every report so results can be regenerated elsewhere.
pub const GENERATOR: &str = "ChaCha20 (rand_chacha 0.3), seed_from_u64, one stream per 4096-replicate block; \
uniforms (u >> 11 + 0.5) / 2^53; normals by inverse CDF";

const BLOCK: u64 = 4096;
pub const DEFAULT_REPLICATES: u64 = 50_000;
pub const MIN_REPLICATES: u64 = 100;

/// A design to simulate.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    /// Normally distributed estimate with standard error √(σ²/n).
    Z {
        test: TestSpec<f64>,
        analysis: AnalysisPrior<f64>,
        design: DesignPrior<f64>,
        n: f64,
    },
    /// Raw unit-variance normal data, `n` per group, analysed with the t-test
    /// Bayes factor. The design prior is on the standardized effect.
    T {
        kind: TTestKind,
        prior: TruncatedT<f64>,
        design: DesignPrior<f64>,
        threshold: Threshold<f64>,
        n: u64,
        /// Evaluate the Bayes factor for every draw instead of classifying
        /// the t statistic against the precomputed success region.
        per_draw: bool,
        /// Design distribution of the analytic power the simulation is
        /// compared with: the normal approximation (so the discrepancy
        /// measures its error) or the exact noncentral t.
        analytic: DesignDistribution,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub replicates: u64,
    pub seed: u64,
    pub condition: Condition,
    /// Worker threads; the result is the same for any value.
    pub threads: usize,
}

impl McConfig {
    pub fn new(condition: Condition, replicates: u64, seed: u64) -> Self {
        Self {
            replicates,
            seed,
            condition,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub successes: u64,
    pub replicates: u64,
    pub empirical: f64,
    /// √(p̂(1 − p̂)/replicates), from the empirical power.
    pub standard_error: f64,
    pub analytic: f64,
    /// empirical − analytic
    pub discrepancy: f64,
}

impl McReport {
    /// |discrepancy| in units of the Monte Carlo standard error. A zero
    /// standard error counts as agreement only for an exact match.
    pub fn z_score(&self) -> f64 {
        if self.standard_error > 0.0 {
            self.discrepancy.abs() / self.standard_error
        } else if self.discrepancy == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, standard_errors: f64) -> bool {
        // an all-or-nothing sample says little when the truth is near 0 or 1
        let se = self.standard_error.max(1.0 / self.replicates as f64);
        self.discrepancy.abs() <= standard_errors * se
    }
}

struct Uniforms(ChaCha20Rng);

impl Uniforms {
    fn block(seed: u64, block: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(block);
        Self(rng)
    }

    fn uniform(&mut self) -> f64 {
        ((self.0.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    fn normal(&mut self) -> f64 {
        std_normal_quantile(self.uniform()).expect("uniform draws lie strictly inside (0, 1)")
    }
}

/// How one replicate is decided, prepared once per condition.
enum Decider<'a> {
    Z {
        test: &'a TestSpec<f64>,
        analysis: &'a AnalysisPrior<f64>,
        design: &'a DesignPrior<f64>,
        se: f64,
    },
    T {
        kind: TTestKind,
        prior: &'a TruncatedT<f64>,
        design: &'a DesignPrior<f64>,
        threshold: &'a Threshold<f64>,
        n: u64,
        region: Option<SuccessRegion<f64>>,
    },
}

impl Decider<'_> {
    fn success(&self, rng: &mut Uniforms) -> Result<bool> {
        match self {
            Self::Z { test, analysis, design, se } => {
                let theta = draw_parameter(design, rng);
                let estimate = theta + se * rng.normal();
                let bf = bf01(&EstimateInput::StandardError { estimate, se: *se }, test.null, analysis)?;
                Ok(decide(bf.ln, test.k(), test.orientation()))
            }
            Self::T {
                kind,
                prior,
                design,
                threshold,
                n,
                region,
            } => {
                let effect = draw_parameter(design, rng);
                let t = simulate_t(*kind, *n, effect, rng);
                match region {
                    Some(region) => Ok(region.contains(t)),
                    None => {
                        let bf = tbf01(t, &kind.design(*n as f64), prior)?;
                        Ok(decide(bf.ln, threshold.k(), threshold.orientation()))
                    }
                }
            }
        }
    }
}

fn decide(ln_bf: f64, k: f64, orientation: Orientation) -> bool {
    match orientation {
        Orientation::EvidenceForH1 => ln_bf <= k.ln(),
        Orientation::EvidenceForH0 => ln_bf >= k.ln(),
    }
}

fn draw_parameter(design: &DesignPrior<f64>, rng: &mut Uniforms) -> f64 {
    if design.is_point() {
        design.mean
    } else {
        design.mean + design.sd * rng.normal()
    }
}

/// t statistic from raw unit-variance data with mean difference `effect`.
fn simulate_t(kind: TTestKind, n: u64, effect: f64, rng: &mut Uniforms) -> f64 {
    let mut sample = |mean: f64| -> (f64, f64) {
        // Welford for mean and sum of squared deviations
        let (mut m, mut ss) = (0.0, 0.0);
        for i in 0..n {
            let x = mean + rng.normal();
            let d = x - m;
            m += d / (i + 1) as f64;
            ss += d * (x - m);
        }
        (m, ss)
    };
    let nf = n as f64;
    match kind {
        // paired data are simulated as their differences
        TTestKind::OneSample | TTestKind::Paired => {
            let (m, ss) = sample(effect);
            m / (ss / (nf - 1.0) / nf).sqrt()
        }
        TTestKind::TwoSample => {
            let (m1, ss1) = sample(effect);
            let (m2, ss2) = sample(0.0);
            let pooled = (ss1 + ss2) / (2.0 * nf - 2.0);
            (m1 - m2) / (pooled * 2.0 / nf).sqrt()
        }
    }
}

/// Empirical power for one condition, compared with the analytic value
/// (the closed form, or the normal-approximation t-test power).
pub fn simulate_power(config: &McConfig) -> Result<McReport> {
    if config.replicates < MIN_REPLICATES {
        return Err(invalid(format!(
            "at least {MIN_REPLICATES} replicates are needed, got {}",
            config.replicates
        )));
    }
    let (decider, analytic) = match &config.condition {
        Condition::Z {
            test,
            analysis,
            design,
            n,
        } => {
            let analytic = power(&PowerQuery::new(test.clone(), analysis.clone(), *design, *n))?.probability;
            let se = (test.unit_variance / n).sqrt();
            (
                Decider::Z {
                    test,
                    analysis,
                    design,
                    se,
                },
                analytic,
            )
        }
        Condition::T {
            kind,
            prior,
            design,
            threshold,
            n,
            per_draw,
            analytic: distribution,
        } => {
            if *n < 2 {
                return Err(invalid("t test simulation needs at least two observations per group"));
            }
            let nf = *n as f64;
            let analytic = power_t(nf, *kind, prior, design, threshold, *distribution)?.probability;
            let region = if *per_draw {
                None
            } else {
                Some(t_success_region(nf, *kind, prior, threshold)?)
            };
            (
                Decider::T {
                    kind: *kind,
                    prior,
                    design,
                    threshold,
                    n: *n,
                    region,
                },
                analytic,
            )
        }
    };

    let blocks = config.replicates.div_ceil(BLOCK);
    let run_block = |b: u64| -> Result<u64> {
        let mut rng = Uniforms::block(config.seed, b);
        let size = BLOCK.min(config.replicates - b * BLOCK);
        let mut hits = 0;
        for _ in 0..size {
            hits += u64::from(decider.success(&mut rng)?);
        }
        Ok(hits)
    };
    let threads = config.threads.max(1).min(blocks as usize);
    let successes = if threads <= 1 {
        (0..blocks).map(run_block).sum::<Result<u64>>()?
    } else {
        std::thread::scope(|scope| {
            let workers: Vec<_> = (0..threads as u64)
                .map(|w| {
                    let run_block = &run_block;
                    scope.spawn(move || {
                        (w..blocks)
                            .step_by(threads)
                            .map(run_block)
                            .sum::<Result<u64>>()
                    })
                })
                .collect();
            workers
                .into_iter()
                .map(|h| h.join().expect("simulation worker panicked"))
                .sum::<Result<u64>>()
        })?
    };

    let reps = config.replicates as f64;
    let empirical = successes as f64 / reps;
    Ok(McReport {
        successes,
        replicates: config.replicates,
        empirical,
        standard_error: (empirical * (1.0 - empirical) / reps).sqrt(),
        analytic,
        discrepancy: empirical - analytic,
    })
}

/// One design of a validation grid: the sample size is computed for
/// `target` and the power then simulated at it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub test: TestSpec<f64>,
    pub analysis: AnalysisPrior<f64>,
    pub design: DesignPrior<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Simulated { n: u64, report: McReport },
    /// No finite sample size reaches the target (or the analysis prior is
    /// degenerate); nothing simulated.
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSummary {
    pub cells: Vec<(GridCell, CellOutcome)>,
    pub max_abs_discrepancy: f64,
    pub median_abs_discrepancy: f64,
    pub simulated: usize,
}

/// Simulate every feasible cell of `grid` at its computed sample size.
/// Cell `i` uses seed `seed + i`.
pub fn mc_validate(grid: &[GridCell], replicates: u64, seed: u64, threads: usize) -> Result<ValidationSummary> {
    if grid.is_empty() {
        return Err(invalid("validation grid is empty"));
    }
    let mut cells = Vec::with_capacity(grid.len());
    let mut discrepancies = Vec::new();
    for (i, cell) in grid.iter().enumerate() {
        let n = match n_for(&cell.test, &cell.analysis, &cell.design, cell.target) {
            Ok(r) => r.n_integer,
            Err(e @ (Error::Infeasible { .. } | Error::InvalidInput(_))) => {
                cells.push((cell.clone(), CellOutcome::Skipped { reason: e.to_string() }));
                continue;
            }
            Err(e) => return Err(e),
        };
        let config = McConfig {
            replicates,
            seed: seed.wrapping_add(i as u64),
            condition: Condition::Z {
                test: cell.test.clone(),
                analysis: cell.analysis.clone(),
                design: cell.design,
                n: n as f64,
            },
            threads,
        };
        let report = simulate_power(&config)?;
        discrepancies.push(report.discrepancy.abs());
        cells.push((cell.clone(), CellOutcome::Simulated { n, report }));
    }
    discrepancies.sort_by(f64::total_cmp);
    let (max, median) = match discrepancies.len() {
        0 => (f64::NAN, f64::NAN),
        m => (
            discrepancies[m - 1],
            if m % 2 == 1 {
                discrepancies[m / 2]
            } else {
                0.5 * (discrepancies[m / 2 - 1] + discrepancies[m / 2])
            },
        ),
    };
    Ok(ValidationSummary {
        cells,
        max_abs_discrepancy: max,
        median_abs_discrepancy: median,
        simulated: discrepancies.len(),
    })
}

/// The standardized-mean-difference grid: analysis and design means in
/// {0, 0.2, 0.5, 0.8}, analysis sd in {0, 0.5}, design sd in {0, 0.2},
/// H0: θ = 0, k = 1/10, target 80%, unit variance 2.
pub fn standard_validation_grid() -> Vec<GridCell> {
    let means = [0.0, 0.2, 0.5, 0.8];
    let test = TestSpec::new(0.0, Threshold::for_h1(0.1).expect("k < 1"), 2.0).expect("valid test");
    let mut grid = Vec::new();
    for &am in &means {
        for &asd in &[0.0, 0.5] {
            for &dm in &means {
                for &dsd in &[0.0, 0.2] {
                    // sd 0 gives the point prior; a point prior at the null is degenerate but kept so it shows as skipped
                    let analysis = if asd > 0.0 {
                        AnalysisPrior::Normal { mean: am, sd: asd }
                    } else {
                        AnalysisPrior::Point { mean: am }
                    };
                    grid.push(GridCell {
                        test: test.clone(),
                        analysis,
                        design: DesignPrior { mean: dm, sd: dsd },
                        target: 0.8,
                    });
                }
            }
        }
    }
    grid
}
