//! Tail bounds for random graphs and the Monte Carlo harnesses that check
//! them: a two-form Chernoff bound for Bernoulli sums, a closed-form tail
//! bound on alpha*(G) over G(n,p), and sampling studies that measure how far
//! the observed quantities sit from those bounds.

use crate::graph::alpha::{alpha_star, AlphaStarError};
use crate::graph::gnp::sample_gnp;
use crate::graph::GraphError;
use crate::rng::{derive_seed, unit_rng};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Emitted with every report. The alpha* tail threshold 40 n ln n exceeds
/// the largest possible degree sum n(n-1) until n is around 240, so the
/// bound is vacuous below that scale; studies here target n in [256, 512]
/// with dense p, where independent sets stay small and exact alpha* by
/// branch and bound is cheap.
pub const REGIME_NOTE: &str = "tail threshold 40 n ln n only binds for n >= ~240; \
study runs use n in [256, 512] with dense p so exact alpha* stays cheap";

#[derive(Debug, Error, PartialEq)]
pub enum StudyError {
    #[error("threshold factor lambda must exceed 1, got {0}")]
    LambdaTooSmall(f64),
    #[error("mean must lie in [0,1], got {0}")]
    BadMean(f64),
    #[error("mean 0 makes the tail threshold 0 and the tail event vacuous")]
    DegenerateMean,
    #[error("need at least one trial or sample")]
    NoSamples,
    #[error(
        "lemma inapplicable: threshold {t} is below the floor 40 n ln n = {floor}; \
         pass force to evaluate the formula outside its stated range"
    )]
    LemmaInapplicable { t: f64, floor: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Alpha(#[from] AlphaStarError),
}

/// n independent variables in [0,1] with common mean mu, tail threshold
/// lambda * n * mu.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffParams {
    pub n: usize,
    pub mu: f64,
    pub lambda: f64,
}

impl ChernoffParams {
    pub fn new(n: usize, mu: f64, lambda: f64) -> Result<Self, StudyError> {
        if lambda <= 1.0 || lambda.is_nan() {
            return Err(StudyError::LambdaTooSmall(lambda));
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(StudyError::BadMean(mu));
        }
        Ok(ChernoffParams { n, mu, lambda })
    }

    pub fn threshold(&self) -> f64 {
        self.lambda * self.n as f64 * self.mu
    }
}

/// The tail bound in its tight and weak forms:
/// tight = exp(-n (lambda-1)^2 mu / (lambda+1)), weak = exp((3-lambda) n mu).
/// tight <= weak always, since (lambda-1)^2/(lambda+1) >= lambda-3 for
/// lambda > 1.
pub fn chernoff_bound(par: ChernoffParams) -> (f64, f64) {
    let nmu = par.n as f64 * par.mu;
    let l = par.lambda;
    let tight = (-nmu * (l - 1.0) * (l - 1.0) / (l + 1.0)).exp();
    let weak = ((3.0 - l) * nmu).exp();
    (tight, weak)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffCheck {
    pub params: ChernoffParams,
    pub trials: u64,
    pub empirical: f64,
    pub tight: f64,
    pub weak: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// Samples `trials` sums of n Bernoulli(mu) draws and tests the empirical
/// tail frequency against the tight bound plus five binomial standard
/// deviations. mu = 0 is rejected: the threshold is then 0 and every sum
/// reaches it, which the bound was never meant to cover.
pub fn chernoff_empirical_check(
    par: ChernoffParams,
    trials: u64,
    seed: u64,
) -> Result<ChernoffCheck, StudyError> {
    if par.mu == 0.0 {
        return Err(StudyError::DegenerateMean);
    }
    if trials == 0 {
        return Err(StudyError::NoSamples);
    }
    let threshold = par.threshold();
    let exceed = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = unit_rng(seed, i);
            let sum = (0..par.n).filter(|_| rng.random_bool(par.mu)).count();
            sum as f64 >= threshold
        })
        .count() as u64;
    let empirical = exceed as f64 / trials as f64;
    let (tight, weak) = chernoff_bound(par);
    let sigma = (tight * (1.0 - tight) / trials as f64).sqrt();
    Ok(ChernoffCheck {
        params: par,
        trials,
        empirical,
        tight,
        weak,
        sigma,
        pass: empirical <= tight + 5.0 * sigma,
    })
}

/// n^(-14n) + 2 exp(-t^2 / (200 n^2 p)), held in log10 because both terms
/// underflow f64 for every parameter setting anyone cares about.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub log10: f64,
    /// The plain value when it is representable, None on underflow.
    pub value: Option<f64>,
    /// Whether t cleared the 40 n ln n floor (false only under force).
    pub within_stated_range: bool,
}

pub fn tail_threshold_floor(n: usize) -> f64 {
    40.0 * n as f64 * (n as f64).ln()
}

pub fn alpha_star_tail_bound(
    n: usize,
    p: f64,
    t: f64,
    force: bool,
) -> Result<TailBound, StudyError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(GraphError::InvalidProbability(p).into());
    }
    let floor = tail_threshold_floor(n);
    let within = t >= floor;
    if !within && !force {
        return Err(StudyError::LemmaInapplicable { t, floor });
    }
    let ln10 = std::f64::consts::LN_10;
    let term_poly = -14.0 * n as f64 * (n as f64).log10();
    let term_exp = 2f64.log10() - t * t / (200.0 * n as f64 * n as f64 * p) / ln10;
    // log-sum-exp in base 10
    let (hi, lo) = if term_poly >= term_exp {
        (term_poly, term_exp)
    } else {
        (term_exp, term_poly)
    };
    let log10 = hi + (1.0 + 10f64.powf(lo - hi)).log10();
    let value = if log10 > -307.0 { Some(10f64.powf(log10)) } else { None };
    Ok(TailBound { log10, value, within_stated_range: within })
}

/// One sampled graph in a tail study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyRecord {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub alpha_star_value: u64,
    pub threshold: f64,
    pub exceeded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailStudyReport {
    pub n: usize,
    pub p: f64,
    pub threshold: f64,
    pub requested: u64,
    pub records: Vec<StudyRecord>,
    /// Index of the first sample whose alpha* solve exhausted the node
    /// budget; records stop just before it.
    pub aborted_at: Option<u64>,
    pub regime_note: &'static str,
}

impl TailStudyReport {
    pub fn completed(&self) -> bool {
        self.aborted_at.is_none()
    }

    pub fn exceed_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().filter(|r| r.exceeded).count() as f64
            / self.records.len() as f64
    }
}

/// (seed, alpha*) per completed sample, and the index the run aborted at if
/// the node budget ran out.
type SampledAlphas = (Vec<(u64, u64)>, Option<u64>);

fn sampled_alpha_stars(
    n: usize,
    p: f64,
    samples: u64,
    seed: u64,
    node_budget: u64,
) -> Result<SampledAlphas, StudyError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(GraphError::InvalidProbability(p).into());
    }
    if samples == 0 {
        return Err(StudyError::NoSamples);
    }
    let solved: Vec<(u64, Result<u64, AlphaStarError>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let sample_seed = derive_seed(seed, i);
            let g = sample_gnp(n, p, sample_seed).expect("p validated above");
            (sample_seed, alpha_star(&g, node_budget))
        })
        .collect();
    // Truncate at the first budget failure in index order, so the partial
    // report is the same one a sequential run would have produced.
    let mut out = Vec::with_capacity(solved.len());
    for (i, (sample_seed, res)) in solved.into_iter().enumerate() {
        match res {
            Ok(a) => out.push((sample_seed, a)),
            Err(_) => return Ok((out, Some(i as u64))),
        }
    }
    Ok((out, None))
}

/// Samples G(n,p), solves alpha* exactly per sample, and reports how many
/// reached the threshold. A budget-exhausted sample aborts the study; the
/// report then covers the samples before it.
pub fn alpha_star_tail_study(
    n: usize,
    p: f64,
    t: f64,
    samples: u64,
    seed: u64,
    node_budget: u64,
) -> Result<TailStudyReport, StudyError> {
    let (alphas, aborted_at) = sampled_alpha_stars(n, p, samples, seed, node_budget)?;
    let records = alphas
        .into_iter()
        .map(|(sample_seed, a)| StudyRecord {
            n,
            p,
            seed: sample_seed,
            alpha_star_value: a,
            threshold: t,
            exceeded: a as f64 >= t,
        })
        .collect();
    Ok(TailStudyReport {
        n,
        p,
        threshold: t,
        requested: samples,
        records,
        aborted_at,
        regime_note: REGIME_NOTE,
    })
}

pub fn records_csv(records: &[StudyRecord]) -> String {
    let mut out = String::from("n,p,seed,alpha_star,t,exceeded\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.p, r.seed, r.alpha_star_value, r.threshold, r.exceeded
        ));
    }
    out
}

/// Nearest-rank [min, q25, median, q75, max] of an ascending-sorted slice.
pub fn quantiles(sorted: &[f64]) -> [f64; 5] {
    let pick = |q: f64| sorted[((sorted.len() - 1) as f64 * q).round() as usize];
    [pick(0.0), pick(0.25), pick(0.5), pick(0.75), pick(1.0)]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub p: f64,
    pub samples: u64,
    /// Quantiles of alpha* / (n ln n).
    pub alpha_ratio: [f64; 5],
    /// Quantiles of (sqrt n + sqrt alpha*) / sqrt(n ln n).
    pub charge_ratio: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// (n, sample index) of the first budget-exhausted solve, if any; rows
    /// stop just before the one it belongs to.
    pub aborted_at: Option<(usize, u64)>,
    pub regime_note: &'static str,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,p,samples,alpha_ratio_min,alpha_ratio_q25,alpha_ratio_median,\
             alpha_ratio_q75,alpha_ratio_max,charge_ratio_min,charge_ratio_q25,\
             charge_ratio_median,charge_ratio_q75,charge_ratio_max\n",
        );
        for row in &self.rows {
            out.push_str(&format!("{},{},{}", row.n, row.p, row.samples));
            for v in row.alpha_ratio.iter().chain(row.charge_ratio.iter()) {
                out.push_str(&format!(",{:.6e}", v));
            }
            out.push('\n');
        }
        out
    }
}

/// How alpha* and the query-charge proxy sqrt(n) + sqrt(alpha*) scale
/// against n ln n over sampled G(n,p). Ratios are reported, never asserted
/// against invented constants.
pub fn corollary_scaling_report(
    n_list: &[usize],
    p: f64,
    samples: u64,
    seed: u64,
    node_budget: u64,
) -> Result<ScalingReport, StudyError> {
    let mut rows = Vec::with_capacity(n_list.len());
    let mut aborted_at = None;
    for (row_ix, &n) in n_list.iter().enumerate() {
        let row_seed = derive_seed(seed, row_ix as u64);
        let (alphas, aborted) = sampled_alpha_stars(n, p, samples, row_seed, node_budget)?;
        if let Some(i) = aborted {
            aborted_at = Some((n, i));
            break;
        }
        let norm = n as f64 * (n as f64).ln();
        let mut alpha_ratio: Vec<f64> =
            alphas.iter().map(|&(_, a)| a as f64 / norm).collect();
        let mut charge_ratio: Vec<f64> = alphas
            .iter()
            .map(|&(_, a)| ((n as f64).sqrt() + (a as f64).sqrt()) / norm.sqrt())
            .collect();
        alpha_ratio.sort_by(f64::total_cmp);
        charge_ratio.sort_by(f64::total_cmp);
        rows.push(ScalingRow {
            n,
            p,
            samples,
            alpha_ratio: quantiles(&alpha_ratio),
            charge_ratio: quantiles(&charge_ratio),
        });
    }
    Ok(ScalingReport { rows, aborted_at, regime_note: REGIME_NOTE })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::alpha::DEFAULT_NODE_BUDGET;
    use approx::assert_relative_eq;

    #[test]
    fn chernoff_forms() {
        // lambda = 3 collapses the weak form to 1 and the tight to exp(-n mu)
        let par = ChernoffParams::new(20, 0.3, 3.0).unwrap();
        let (tight, weak) = chernoff_bound(par);
        assert_eq!(weak, 1.0);
        assert_relative_eq!(tight, (-6.0f64).exp(), epsilon = 1e-14);

        let par = ChernoffParams::new(10, 0.1, 5.0).unwrap();
        let (tight, _) = chernoff_bound(par);
        assert_relative_eq!(tight, (-16.0f64 / 6.0).exp(), epsilon = 1e-14);
        assert!((tight - 0.0695).abs() < 1e-3);
    }

    #[test]
    fn tight_never_exceeds_weak() {
        for lambda in [1.01, 1.1, 2.0, 3.0, 10.0, 100.0] {
            for (n, mu) in [(5usize, 0.2), (50, 0.9), (500, 0.01)] {
                let (tight, weak) = chernoff_bound(ChernoffParams::new(n, mu, lambda).unwrap());
                assert!(tight <= weak * (1.0 + 1e-12), "lambda={lambda} n={n} mu={mu}");
            }
        }
    }

    #[test]
    fn chernoff_params_validate() {
        assert_eq!(
            ChernoffParams::new(5, 0.5, 1.0).unwrap_err(),
            StudyError::LambdaTooSmall(1.0)
        );
        assert!(ChernoffParams::new(5, 1.5, 2.0).is_err());
    }

    #[test]
    fn empirical_tail_within_bound() {
        let par = ChernoffParams::new(100, 0.5, 1.5).unwrap();
        let check = chernoff_empirical_check(par, 20_000, 11).unwrap();
        assert!(check.pass, "empirical {} tight {}", check.empirical, check.tight);
        assert!(check.empirical <= check.tight + 5.0 * check.sigma);
    }

    #[test]
    fn impossible_threshold_gives_zero_tail() {
        // lambda n mu > n: no 0/1 sum can reach the threshold
        let par = ChernoffParams::new(50, 0.9, 1.2).unwrap();
        let check = chernoff_empirical_check(par, 2_000, 3).unwrap();
        assert_eq!(check.empirical, 0.0);
        assert!(check.pass);
    }

    #[test]
    fn zero_mean_is_degenerate() {
        let par = ChernoffParams::new(10, 0.0, 2.0).unwrap();
        assert_eq!(
            chernoff_empirical_check(par, 100, 1).unwrap_err(),
            StudyError::DegenerateMean
        );
    }

    #[test]
    fn tail_bound_at_the_floor() {
        let t = tail_threshold_floor(10);
        assert_relative_eq!(t, 40.0 * 10.0 * 10f64.ln(), epsilon = 1e-12);
        let b = alpha_star_tail_bound(10, 1.0, t, false).unwrap();
        assert!(b.within_stated_range);
        // n^(-140) is invisible next to 2 exp(-t^2/20000)
        let expected = 2.0 * (-t * t / 20_000.0).exp();
        assert_relative_eq!(b.value.unwrap(), expected, max_relative = 1e-10);
        assert!((b.value.unwrap() - 7.6e-19).abs() < 1e-20);
    }

    #[test]
    fn tail_bound_below_floor_needs_force() {
        let err = alpha_star_tail_bound(10, 0.5, 100.0, false).unwrap_err();
        assert!(matches!(err, StudyError::LemmaInapplicable { .. }));
        let b = alpha_star_tail_bound(10, 0.5, 100.0, true).unwrap();
        assert!(!b.within_stated_range);
        assert!(b.log10 < 0.0);
    }

    #[test]
    fn tail_bound_desk_scale_value() {
        let n = 256;
        let t = tail_threshold_floor(n);
        let b = alpha_star_tail_bound(n, 0.5, t, false).unwrap();
        // t^2/(200 n^2 p) = 16 ln^2 n here, so log10 ~ log10 2 - 16 ln^2(256)/ln 10
        let expected = 2f64.log10() - 16.0 * (256f64).ln().powi(2) / std::f64::consts::LN_10;
        assert_relative_eq!(b.log10, expected, max_relative = 1e-9);
        assert!((b.log10 - -213.36).abs() < 0.01);
        assert!(b.value.is_some());
    }

    #[test]
    fn tail_bound_monotone() {
        // Non-strict per step: once the exponential term sinks below
        // n^(-14n), the sum stops moving at f64 resolution.
        let t_grid = [1000.0, 2000.0, 4000.0, 8000.0];
        let at_t: Vec<f64> = t_grid
            .iter()
            .map(|&t| alpha_star_tail_bound(16, 0.5, t, true).unwrap().log10)
            .collect();
        for w in at_t.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(*at_t.last().unwrap() < at_t[0]);

        let p_grid = [0.1, 0.3, 0.5, 0.9, 1.0];
        let at_p: Vec<f64> = p_grid
            .iter()
            .map(|&p| alpha_star_tail_bound(16, p, 5000.0, true).unwrap().log10)
            .collect();
        for w in at_p.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(*at_p.last().unwrap() > at_p[0]);
    }

    #[test]
    fn complete_graph_study_never_exceeds() {
        // p = 1: alpha* = n-1 on every sample, below any t >= n
        let rep = alpha_star_tail_study(30, 1.0, 30.0, 10, 5, DEFAULT_NODE_BUDGET).unwrap();
        assert!(rep.completed());
        assert_eq!(rep.records.len(), 10);
        assert_eq!(rep.exceed_fraction(), 0.0);
        for r in &rep.records {
            assert_eq!(r.alpha_star_value, 29);
            assert!(!r.exceeded);
        }
    }

    #[test]
    fn study_records_keep_the_exceed_invariant() {
        let rep = alpha_star_tail_study(12, 0.3, 20.0, 16, 9, DEFAULT_NODE_BUDGET).unwrap();
        for r in &rep.records {
            assert_eq!(r.exceeded, r.alpha_star_value as f64 >= r.threshold);
        }
        let again = alpha_star_tail_study(12, 0.3, 20.0, 16, 9, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(rep, again);
    }

    #[test]
    fn records_csv_shape() {
        let rep = alpha_star_tail_study(8, 0.5, 10.0, 3, 2, DEFAULT_NODE_BUDGET).unwrap();
        let csv = records_csv(&rep.records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,p,seed,alpha_star,t,exceeded");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("8,0.5,"));
    }

    #[test]
    fn scaling_report_quantiles_are_sorted() {
        let rep =
            corollary_scaling_report(&[16, 32], 0.9, 6, 17, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.aborted_at.is_none());
        for row in &rep.rows {
            for q in [&row.alpha_ratio, &row.charge_ratio] {
                for w in q.windows(2) {
                    assert!(w[0] <= w[1]);
                }
            }
        }
        let csv = rep.to_csv();
        assert!(csv.starts_with("n,p,samples,alpha_ratio_min"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn scaling_report_complete_graph_ratio() {
        let rep = corollary_scaling_report(&[20], 1.0, 4, 1, DEFAULT_NODE_BUDGET).unwrap();
        let expected = 19.0 / (20.0 * 20f64.ln());
        for q in rep.rows[0].alpha_ratio {
            assert_relative_eq!(q, expected, epsilon = 1e-12);
        }
    }
}
