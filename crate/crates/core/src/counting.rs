//! Approximate counting via the exact phase-estimation outcome law.
//!
//! A marked-fraction a = t/N maps to the eigenphase omega = arcsin(sqrt a)/pi
//! of the search operator; a P-point phase estimation measures an outcome m
//! whose distribution is a half/half mixture of discrete Fejer-type kernels
//! centered at +omega and -omega. Estimates are t~ = round(N sin^2(pi m/P)).
//! Nothing here touches state vectors: the distribution is evaluated in
//! closed form and, per cell, only the integer t matters. Query charging
//! follows the oracle-call count of the modeled routine: P per elementary
//! run, r*P for the boosted variant.

use crate::rng::{derive_seed, seeded_rng};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

/// Per-run success floor 8/pi^2 of the elementary counter.
pub const MIN_SUCCESS_PROBABILITY: f64 = 8.0 / (PI * PI);

#[derive(Debug, Error, PartialEq)]
pub enum CountingError {
    #[error("domain size must be at least 1")]
    EmptyDomain,
    #[error("precision must be at least 4, got {0}")]
    PrecisionTooSmall(u64),
    #[error("count {count} exceeds domain {domain}")]
    CountExceedsDomain { count: u64, domain: u64 },
    #[error("single-shot counting needs t <= N/2 (got t={count}, N={domain}); use the boosted variant")]
    CountAboveHalf { count: u64, domain: u64 },
    #[error("epsilon must lie in (0, 1/2), got {0}")]
    BadEpsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountingSpec {
    pub domain: u64,
    pub precision: u64,
    pub count: u64,
}

impl CountingSpec {
    pub fn new(domain: u64, precision: u64, count: u64) -> Result<Self, CountingError> {
        if domain < 1 {
            return Err(CountingError::EmptyDomain);
        }
        if precision < 4 {
            return Err(CountingError::PrecisionTooSmall(precision));
        }
        if count > domain {
            return Err(CountingError::CountExceedsDomain { count, domain });
        }
        Ok(CountingSpec { domain, precision, count })
    }

    pub fn amplitude(&self) -> f64 {
        self.count as f64 / self.domain as f64
    }

    pub fn theta(&self) -> f64 {
        self.amplitude().sqrt().asin()
    }

    /// Eigenphase in [0, 1/2].
    pub fn omega(&self) -> f64 {
        self.theta() / PI
    }
}

/// sin^2(P pi delta) / (P^2 sin^2(pi delta)), the P-point estimation kernel,
/// extended by continuity to 1 at integer delta. delta is reduced mod 1 to
/// the nearest-integer representative first; without that, sin(pi delta)
/// near a nonzero integer suffers catastrophic cancellation.
pub fn estimation_kernel(precision: u64, delta: f64) -> f64 {
    let p = precision as f64;
    let d = delta - delta.round();
    if d == 0.0 {
        return 1.0;
    }
    let num = (p * PI * d).sin();
    let den = p * (PI * d).sin();
    (num / den).powi(2)
}

/// Exact outcome distribution of the P-point phase estimation applied to the
/// equal mixture of eigenphases +omega and -omega.
pub fn phase_distribution(omega: f64, precision: u64) -> Vec<f64> {
    let p = precision as f64;
    (0..precision)
        .map(|m| {
            let grid = m as f64 / p;
            0.5 * estimation_kernel(precision, omega - grid)
                + 0.5 * estimation_kernel(precision, -omega - grid)
        })
        .collect()
}

pub fn outcome_distribution(spec: &CountingSpec) -> Vec<f64> {
    phase_distribution(spec.omega(), spec.precision)
}

/// Count estimate decoded from outcome m. Rounds half up; the result is an
/// integer in [0, N].
pub fn estimate_for_outcome(domain: u64, precision: u64, m: u64) -> u64 {
    let s = (PI * m as f64 / precision as f64).sin();
    (domain as f64 * s * s).round() as u64
}

/// The additive error guarantee: (2 pi / P) sqrt(tN) + (pi^2 / P^2) N for an
/// elementary run, and with doubled = true the boosted form
/// (2 sqrt2 pi / P) sqrt(tN) + (2 pi^2 / P^2) N, which equals the elementary
/// bound on the doubled domain 2N.
pub fn bound_value(domain: u64, precision: u64, count: u64, doubled: bool) -> f64 {
    let n = domain as f64;
    let p = precision as f64;
    let t = count as f64;
    if doubled {
        2.0 * std::f64::consts::SQRT_2 * PI / p * (t * n).sqrt() + 2.0 * PI * PI / (p * p) * n
    } else {
        2.0 * PI / p * (t * n).sqrt() + PI * PI / (p * p) * n
    }
}

/// Analytic probability that an elementary run lands within its bound:
/// the distribution mass on outcomes m with |t - t~(m)| < bound.
pub fn within_bound_mass(spec: &CountingSpec) -> f64 {
    let bound = bound_value(spec.domain, spec.precision, spec.count, false);
    outcome_distribution(spec)
        .iter()
        .enumerate()
        .filter(|(m, _)| {
            let est = estimate_for_outcome(spec.domain, spec.precision, *m as u64);
            ((spec.count as i64 - est as i64).abs() as f64) < bound
        })
        .map(|(_, pr)| pr)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoostMode {
    /// Median of the r estimates; inherits the interval guarantee whenever a
    /// majority of runs succeed.
    Median,
    /// Most frequent estimate, ties to the smallest. Provided for comparison;
    /// whether a plurality vote matches the median's guarantee for integer
    /// estimates is exactly the question the flag exists to probe.
    Plurality,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountingTranscript {
    pub spec: CountingSpec,
    /// True when the run used the doubled-domain reduction.
    pub doubled: bool,
    pub repetitions: u64,
    /// The per-run distribution actually sampled (over the doubled domain
    /// when `doubled`).
    pub distribution: Vec<f64>,
    pub estimates: Vec<u64>,
    pub estimate: u64,
    pub charged_queries: u64,
    pub within_bound: bool,
}

fn sample_outcome<R: Rng>(distribution: &[f64], rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (m, pr) in distribution.iter().enumerate() {
        acc += pr;
        if u < acc {
            return m as u64;
        }
    }
    distribution.len() as u64 - 1
}

pub fn count_once(spec: &CountingSpec, seed: u64) -> Result<CountingTranscript, CountingError> {
    if 2 * spec.count > spec.domain {
        return Err(CountingError::CountAboveHalf {
            count: spec.count,
            domain: spec.domain,
        });
    }
    let distribution = outcome_distribution(spec);
    let mut rng = seeded_rng(seed);
    let m = sample_outcome(&distribution, &mut rng);
    let estimate = estimate_for_outcome(spec.domain, spec.precision, m);
    let bound = bound_value(spec.domain, spec.precision, spec.count, false);
    let within_bound = ((spec.count as i64 - estimate as i64).abs() as f64) < bound;
    Ok(CountingTranscript {
        spec: *spec,
        doubled: false,
        repetitions: 1,
        distribution,
        estimates: vec![estimate],
        estimate,
        charged_queries: spec.precision,
        within_bound,
    })
}

/// Smallest odd r such that the probability of at least (r+1)/2 failures,
/// each failing independently with probability 1 - 8/pi^2, is at most
/// epsilon.
pub fn repetitions_for(epsilon: f64) -> Result<u64, CountingError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(CountingError::BadEpsilon(epsilon));
    }
    let q = 1.0 - MIN_SUCCESS_PROBABILITY;
    let mut r: u64 = 1;
    loop {
        let mut tail = 0.0;
        for j in r.div_ceil(2)..=r {
            let mut term = q.powi(j as i32) * (1.0 - q).powi((r - j) as i32);
            // binomial coefficient, exact in f64 at these sizes
            for i in 0..j.min(r - j) {
                term *= (r - i) as f64 / (i + 1) as f64;
            }
            tail += term;
        }
        if tail <= epsilon {
            return Ok(r);
        }
        r += 2;
    }
}

pub fn count_boosted(
    domain: u64,
    precision: u64,
    count: u64,
    epsilon: f64,
    seed: u64,
) -> Result<CountingTranscript, CountingError> {
    count_boosted_with_mode(domain, precision, count, epsilon, seed, BoostMode::Median)
}

/// Boosted counting for any t in [0, N]: each elementary run works on the
/// doubled domain 2N (where t <= N never exceeds half), with r repetitions
/// combined per `mode`. Charges r*P queries and is judged against the
/// doubled-domain bound.
pub fn count_boosted_with_mode(
    domain: u64,
    precision: u64,
    count: u64,
    epsilon: f64,
    seed: u64,
    mode: BoostMode,
) -> Result<CountingTranscript, CountingError> {
    let spec = CountingSpec::new(domain, precision, count)?;
    let run_spec = CountingSpec::new(2 * domain, precision, count)?;
    let r = repetitions_for(epsilon)?;
    let distribution = outcome_distribution(&run_spec);
    let mut estimates: Vec<u64> = (0..r)
        .map(|i| {
            let mut rng = seeded_rng(derive_seed(seed, i));
            let m = sample_outcome(&distribution, &mut rng);
            estimate_for_outcome(run_spec.domain, run_spec.precision, m)
        })
        .collect();
    let estimate = match mode {
        BoostMode::Median => {
            let mut sorted = estimates.clone();
            sorted.sort_unstable();
            sorted[sorted.len() / 2]
        }
        BoostMode::Plurality => {
            estimates.sort_unstable();
            let mut best = (0usize, estimates[0]);
            let mut i = 0;
            while i < estimates.len() {
                let mut j = i;
                while j < estimates.len() && estimates[j] == estimates[i] {
                    j += 1;
                }
                if j - i > best.0 {
                    best = (j - i, estimates[i]);
                }
                i = j;
            }
            best.1
        }
    };
    let bound = bound_value(domain, precision, count, true);
    let within_bound = ((count as i64 - estimate as i64).abs() as f64) < bound;
    Ok(CountingTranscript {
        spec,
        doubled: true,
        repetitions: r,
        distribution,
        estimates,
        estimate,
        charged_queries: r * precision,
        within_bound,
    })
}

/// CSV rows (N,P,t,bound,mass_within_bound) for a sweep of specs.
pub fn grid_csv(cells: &[CountingSpec]) -> String {
    let mut out = String::from("N,P,t,bound,mass_within_bound\n");
    for spec in cells {
        let bound = bound_value(spec.domain, spec.precision, spec.count, false);
        let mass = within_bound_mass(spec);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            spec.domain, spec.precision, spec.count, bound, mass
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_count_is_exact() {
        let spec = CountingSpec::new(16, 8, 0).unwrap();
        let dist = outcome_distribution(&spec);
        assert_relative_eq!(dist[0], 1.0, epsilon = 1e-12);
        for pr in &dist[1..] {
            assert!(pr.abs() < 1e-12);
        }
        let tr = count_once(&spec, 7).unwrap();
        assert_eq!(tr.estimate, 0);
        assert!(tr.within_bound);
    }

    #[test]
    fn aligned_phase_deterministic() {
        // N=4, t=2: omega = 1/4 sits exactly on the P=4 grid; outcomes 1 and
        // 3 each carry mass 1/2 and both decode to 2.
        let spec = CountingSpec::new(4, 4, 2).unwrap();
        let dist = outcome_distribution(&spec);
        assert_relative_eq!(dist[1], 0.5, epsilon = 1e-12);
        assert_relative_eq!(dist[3], 0.5, epsilon = 1e-12);
        assert!(dist[0].abs() < 1e-12 && dist[2].abs() < 1e-12);
        for seed in 0..32 {
            assert_eq!(count_once(&spec, seed).unwrap().estimate, 2);
        }
    }

    #[test]
    fn full_count_peaks_at_half_phase() {
        // omega = 1/2 with even P concentrates on m = P/2 and decodes to N.
        let dist = phase_distribution(0.5, 8);
        assert_relative_eq!(dist[4], 1.0, epsilon = 1e-12);
        assert_eq!(estimate_for_outcome(10, 8, 4), 10);
    }

    #[test]
    fn distribution_normalizes_and_mirrors() {
        for precision in [4u64, 8, 16, 64] {
            for num in 0..=20 {
                let omega = num as f64 / 40.0; // [0, 1/2]
                let dist = phase_distribution(omega, precision);
                let total: f64 = dist.iter().sum();
                assert_relative_eq!(total, 1.0, epsilon = 1e-12);

                let mirrored = phase_distribution(1.0 - omega, precision);
                for (m, d) in dist.iter().enumerate() {
                    let rev = (precision as usize - m) % precision as usize;
                    assert_relative_eq!(*d, mirrored[rev], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn bound_examples() {
        let single = bound_value(10_000, 220, 0, false);
        assert_relative_eq!(single, 2.039, epsilon = 1e-3);
        assert_relative_eq!(bound_value(10_000, 220, 0, true), 2.0 * single, epsilon = 1e-12);

        // doubled bound == elementary bound on domain 2N
        for (n, p, t) in [(100u64, 16u64, 30u64), (7, 4, 7), (250, 64, 1)] {
            assert_relative_eq!(
                bound_value(n, p, t, true),
                bound_value(2 * n, p, t, false),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn single_shot_mass_spot_checks() {
        for (n, p, t) in [(4u64, 4u64, 2u64), (100, 16, 13), (256, 64, 128), (37, 8, 5)] {
            let spec = CountingSpec::new(n, p, t).unwrap();
            let mass = within_bound_mass(&spec);
            assert!(
                mass >= MIN_SUCCESS_PROBABILITY - 1e-12,
                "mass {mass} below floor at N={n} P={p} t={t}"
            );
        }
    }

    #[test]
    fn count_once_needs_minority() {
        let spec = CountingSpec::new(10, 4, 6).unwrap();
        assert_eq!(
            count_once(&spec, 0).unwrap_err(),
            CountingError::CountAboveHalf { count: 6, domain: 10 }
        );
    }

    #[test]
    fn three_runs_suffice_for_one_sixth() {
        assert_eq!(repetitions_for(1.0 / 6.0).unwrap(), 3);
        // tighter targets need more
        assert!(repetitions_for(0.01).unwrap() > 3);
        assert_eq!(
            repetitions_for(0.5).unwrap_err(),
            CountingError::BadEpsilon(0.5)
        );
    }

    #[test]
    fn boosted_transcript_accounting() {
        let tr = count_boosted(36, 54, 30, 1.0 / 6.0, 99).unwrap();
        assert!(tr.doubled);
        assert_eq!(tr.repetitions, 3);
        assert_eq!(tr.estimates.len(), 3);
        assert_eq!(tr.charged_queries, 3 * 54);
        assert_eq!(tr.distribution.len(), 54);

        let zero = count_boosted(36, 54, 0, 1.0 / 6.0, 5).unwrap();
        assert_eq!(zero.estimate, 0);
        assert!(zero.within_bound);
    }

    #[test]
    fn boosted_is_seed_deterministic() {
        let a = count_boosted(100, 32, 41, 1.0 / 6.0, 1234).unwrap();
        let b = count_boosted(100, 32, 41, 1.0 / 6.0, 1234).unwrap();
        assert_eq!(a.estimates, b.estimates);
        assert_eq!(a.estimate, b.estimate);
    }

    #[test]
    fn plurality_breaks_ties_low() {
        // force all three estimates distinct via a phase between grid points,
        // then the plurality rule must return the smallest
        let tr = count_boosted_with_mode(97, 8, 11, 1.0 / 6.0, 3, BoostMode::Plurality).unwrap();
        let mut sorted = tr.estimates.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == tr.estimates.len() {
            assert_eq!(tr.estimate, sorted[0]);
        }
        let med = count_boosted_with_mode(97, 8, 11, 1.0 / 6.0, 3, BoostMode::Median).unwrap();
        assert_eq!(med.estimates, tr.estimates);
    }

    #[test]
    fn grid_csv_shape() {
        let cells = vec![
            CountingSpec::new(4, 4, 2).unwrap(),
            CountingSpec::new(16, 8, 0).unwrap(),
        ];
        let csv = grid_csv(&cells);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "N,P,t,bound,mass_within_bound");
        assert!(lines[1].starts_with("4,4,2,"));
    }
}
