//! Statistical kernels: tie-aware ranking, Spearman correlation with
//! p-values, and two-sample t-tests, all built on the special functions in
//! [`special`].

mod special;

pub use special::{ln_gamma, regularized_incomplete_beta, t_tail_two_sided};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("undefined correlation: input vector is constant")]
    ConstantInput,
    #[error("sample too small: need at least {need}, got {got}")]
    SampleTooSmall { need: usize, got: usize },
    #[error("degenerate variance: both groups constant with unequal means")]
    DegenerateVariance,
    #[error("domain error: {0}")]
    Domain(String),
}

/// Which p-value route a correlation took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    TApproximation,
    Permutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
    pub method: PValueMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
    pub mean_a: f64,
    pub mean_b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpearmanConfig {
    /// Use seeded Monte-Carlo permutation when n <= this; the
    /// t-approximation is unreliable at tiny n.
    pub permutation_threshold: usize,
    pub permutation_rounds: usize,
    pub seed: u64,
}

impl Default for SpearmanConfig {
    fn default() -> Self {
        SpearmanConfig {
            permutation_threshold: 10,
            permutation_rounds: 100_000,
            seed: 0,
        }
    }
}

/// Average ranks (1-based) with ties sharing the mean of their block's
/// positions. Ranks always sum to n(n+1)/2.
pub fn rank_average_ties(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    if values.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());

    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i+1 ..= j+1 share the block, average them.
        let rank = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    Ok(ranks)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance with n-1 denominator.
fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    let mx = mean(x);
    let my = mean(y);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(StatsError::ConstantInput);
    }
    Ok(cov / (vx * vy).sqrt())
}

/// Spearman rank correlation with a two-sided p-value.
///
/// Ties are handled by Pearson on average ranks, which stays exact where
/// the 6*sum(d^2) shortcut does not. For n above the permutation threshold
/// the p-value comes from the t-approximation with n-2 degrees of freedom;
/// at or below it, from seeded Monte-Carlo permutation of y.
pub fn spearman(x: &[f64], y: &[f64], config: &SpearmanConfig) -> Result<CorrelationResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::SampleTooSmall { need: 3, got: n });
    }
    let rx = rank_average_ties(x)?;
    let ry = rank_average_ties(y)?;
    let rho = pearson(&rx, &ry)?;

    let (p_value, method) = if n > config.permutation_threshold {
        (t_approximation_p(rho, n)?, PValueMethod::TApproximation)
    } else {
        (
            permutation_p(&rx, &ry, rho, config),
            PValueMethod::Permutation,
        )
    };

    Ok(CorrelationResult {
        rho,
        p_value,
        n,
        method,
    })
}

fn t_approximation_p(rho: f64, n: usize) -> Result<f64, StatsError> {
    // Clamp so |rho| = 1 stays finite.
    let r = rho.clamp(-(1.0 - 1e-15), 1.0 - 1e-15);
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    t_tail_two_sided(t, df)
}

fn permutation_p(rx: &[f64], ry: &[f64], observed: f64, config: &SpearmanConfig) -> f64 {
    let mut exceed = 0usize;
    let threshold = observed.abs() - 1e-12;
    let mut shuffled = ry.to_vec();
    for round in 0..config.permutation_rounds {
        // Per-round stream keeps the round -> randomness mapping fixed by
        // (seed, round) regardless of evaluation order.
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(round as u64);
        shuffled.copy_from_slice(ry);
        shuffled.shuffle(&mut rng);
        if let Ok(r) = pearson(rx, &shuffled) {
            if r.abs() >= threshold {
                exceed += 1;
            }
        }
    }
    (exceed + 1) as f64 / (config.permutation_rounds + 1) as f64
}

/// Pooled-variance alternative to Welch, for sensitivity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TTestVariant {
    Welch,
    StudentPooled,
}

/// Welch's unequal-variance two-sample t-test, two-sided.
pub fn welch_ttest(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    ttest(a, b, TTestVariant::Welch)
}

pub fn ttest(a: &[f64], b: &[f64], variant: TTestVariant) -> Result<TTestResult, StatsError> {
    if a.len() < 2 {
        return Err(StatsError::SampleTooSmall { need: 2, got: a.len() });
    }
    if b.len() < 2 {
        return Err(StatsError::SampleTooSmall { need: 2, got: b.len() });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (sample_variance(a), sample_variance(b));

    if va == 0.0 && vb == 0.0 {
        if ma == mb {
            // Declared convention for two identical constant groups.
            return Ok(TTestResult {
                t_statistic: 0.0,
                degrees_of_freedom: na + nb - 2.0,
                p_value: 1.0,
                mean_a: ma,
                mean_b: mb,
            });
        }
        return Err(StatsError::DegenerateVariance);
    }

    let (t, df) = match variant {
        TTestVariant::Welch => {
            let se2 = va / na + vb / nb;
            let t = (ma - mb) / se2.sqrt();
            // Welch-Satterthwaite degrees of freedom.
            let df = se2 * se2
                / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
            (t, df)
        }
        TTestVariant::StudentPooled => {
            let df = na + nb - 2.0;
            let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
            let t = (ma - mb) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
            (t, df)
        }
    };

    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: df,
        p_value: t_tail_two_sided(t, df)?,
        mean_a: ma,
        mean_b: mb,
    })
}
