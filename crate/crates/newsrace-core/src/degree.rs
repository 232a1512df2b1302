//! Degree sequences, limiting degree distributions and size-biased offspring
//! laws.
//!
//! The branching structure seen from a uniformly chosen vertex is governed by
//! `nu = E[D*] - 1`, the mean forward degree under the size-biased law `D*`.
//! Every survival classifier takes `nu` from here.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{exp, floor, log, pow};

use crate::rng::Stream;

#[derive(Debug, Clone, PartialEq)]
pub enum DegreeError {
    /// An entry of a raw degree sequence is zero. The model requires minimum
    /// degree one; isolated vertices must be removed by the caller.
    ZeroDegree { index: usize },
    /// Raw sequence was empty.
    EmptySequence,
    InvalidDistribution(String),
}

impl core::fmt::Display for DegreeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DegreeError::ZeroDegree { index } => {
                write!(f, "degree sequence entry {index} is zero")
            }
            DegreeError::EmptySequence => write!(f, "degree sequence is empty"),
            DegreeError::InvalidDistribution(msg) => write!(f, "invalid degree distribution: {msg}"),
        }
    }
}

impl core::error::Error for DegreeError {}

/// A normalized degree sequence: all entries at least one, even total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    total: u64,
    fix_applied: bool,
}

impl DegreeSequence {
    /// Validates a raw sequence and applies the odd-sum fix: when the raw sum
    /// is odd, the last entry is incremented by one.
    pub fn normalize(raw: &[u32]) -> Result<Self, DegreeError> {
        if raw.is_empty() {
            return Err(DegreeError::EmptySequence);
        }
        if let Some(index) = raw.iter().position(|&d| d == 0) {
            return Err(DegreeError::ZeroDegree { index });
        }
        let mut degrees = raw.to_vec();
        let mut total: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
        let fix_applied = total % 2 == 1;
        if fix_applied {
            *degrees.last_mut().expect("non-empty") += 1;
            total += 1;
        }
        Ok(DegreeSequence {
            degrees,
            total,
            fix_applied,
        })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Sum of degrees (the number of half-edges); always even.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn fix_applied(&self) -> bool {
        self.fix_applied
    }

    pub fn mean(&self) -> f64 {
        self.total as f64 / self.n() as f64
    }

    pub fn second_moment(&self) -> f64 {
        let s: f64 = self
            .degrees
            .iter()
            .map(|&d| (d as f64) * (d as f64))
            .sum();
        s / self.n() as f64
    }

    /// Empirical `nu = (m2 - m1) / m1`.
    pub fn nu(&self) -> f64 {
        let m1 = self.mean();
        (self.second_moment() - m1) / m1
    }
}

const PARETO_TABLE_MAX: u32 = 1 << 20;

/// Exact finite-support distribution internals.
#[derive(Debug, Clone, PartialEq)]
struct Finite {
    ks: Vec<u32>,
    probs: Vec<f64>,
    cum: Vec<f64>,
    /// Cumulative of the size-biased law `k p_k / m1`.
    sb_cum: Vec<f64>,
    m1: f64,
    m2: f64,
}

/// Pareto-tail internals: `P(D >= k) = (min/k)^{tau-1}` for `k >= min`.
#[derive(Debug, Clone, PartialEq)]
struct ParetoTail {
    tau: f64,
    min: u32,
    m1: f64,
    m2: f64,
    /// Cumulative of `j p_j / m1` for `j` in `min..=PARETO_TABLE_MAX`;
    /// beyond the table the asymptotic tail is inverted directly.
    sb_cum: Vec<f64>,
}

/// A limiting degree distribution on `{1, 2, ...}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    inner: Inner,
}

#[derive(Debug, Clone, PartialEq)]
enum Inner {
    Finite(Finite),
    ParetoTail(ParetoTail),
}

impl DegreeDistribution {
    /// Finite support from `(k, p_k)` pairs; probabilities must sum to one
    /// within 1e-12 and every `k` must be at least one.
    pub fn finite(pairs: &[(u32, f64)]) -> Result<Self, DegreeError> {
        if pairs.is_empty() {
            return Err(DegreeError::InvalidDistribution("empty support".into()));
        }
        let mut sorted: Vec<(u32, f64)> = pairs.to_vec();
        sorted.sort_unstable_by_key(|&(k, _)| k);
        let mut sum = 0.0;
        for window in sorted.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(DegreeError::InvalidDistribution(format!(
                    "duplicate support point {}",
                    window[0].0
                )));
            }
        }
        for &(k, p) in &sorted {
            if k < 1 {
                return Err(DegreeError::InvalidDistribution(
                    "support point 0 not allowed".into(),
                ));
            }
            if !(p.is_finite() && p >= 0.0) {
                return Err(DegreeError::InvalidDistribution(format!(
                    "probability of degree {k} is {p}"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(DegreeError::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        let ks: Vec<u32> = sorted.iter().map(|&(k, _)| k).collect();
        let probs: Vec<f64> = sorted.iter().map(|&(_, p)| p).collect();
        let m1: f64 = sorted.iter().map(|&(k, p)| k as f64 * p).sum();
        let m2: f64 = sorted.iter().map(|&(k, p)| (k as f64) * (k as f64) * p).sum();
        let mut cum = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cum.push(acc);
        }
        *cum.last_mut().expect("non-empty") = 1.0;
        let mut sb_cum = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for (&k, &p) in ks.iter().zip(&probs) {
            acc += k as f64 * p / m1;
            sb_cum.push(acc);
        }
        *sb_cum.last_mut().expect("non-empty") = 1.0;
        Ok(DegreeDistribution {
            inner: Inner::Finite(Finite {
                ks,
                probs,
                cum,
                sb_cum,
                m1,
                m2,
            }),
        })
    }

    /// Degenerate distribution at `r` (the r-regular limit).
    pub fn regular(r: u32) -> Result<Self, DegreeError> {
        Self::finite(&[(r, 1.0)])
    }

    /// Pareto-tail family `P(D >= k) = (min/k)^{tau-1}`, `k >= min`.
    ///
    /// Requires `tau > 2` so the mean degree is finite; the second moment is
    /// infinite exactly when `tau <= 3`.
    pub fn pareto_tail(tau: f64, min: u32) -> Result<Self, DegreeError> {
        if !(tau.is_finite() && tau > 2.0) {
            return Err(DegreeError::InvalidDistribution(format!(
                "pareto tail requires exponent tau > 2, got {tau}"
            )));
        }
        if min < 1 {
            return Err(DegreeError::InvalidDistribution(
                "pareto tail requires minimum degree >= 1".into(),
            ));
        }
        let a = tau - 1.0;
        let minf = min as f64;
        // E[D] = (min - 1) + sum_{k >= min} (min/k)^a, midpoint tail beyond K.
        let k_cut = 1_000_000u32.max(min + 1);
        let mut head = 0.0;
        for k in min..=k_cut {
            head += exp(-a * log(k as f64 / minf));
        }
        let tail = pow(minf, a) * pow(k_cut as f64 + 0.5, 1.0 - a) / (a - 1.0);
        let m1 = (minf - 1.0) + head + tail;
        let m2 = if tau <= 3.0 {
            f64::INFINITY
        } else {
            // E[D^2] = sum_{k>=1} (2k-1) P(D >= k)
            let mut head2 = 0.0;
            for k in min..=k_cut {
                head2 += (2.0 * k as f64 - 1.0) * exp(-a * log(k as f64 / minf));
            }
            let kc = k_cut as f64 + 0.5;
            let tail2 = pow(minf, a) * (2.0 * pow(kc, 2.0 - a) / (a - 2.0) - pow(kc, 1.0 - a) / (a - 1.0));
            (minf - 1.0) * (minf - 1.0) + head2 + tail2
        };
        // Size-biased cumulative table: C_j = sum_{i<=j} i p_i / m1.
        let table_max = PARETO_TABLE_MAX.max(min + 1);
        let mut sb_cum = Vec::with_capacity((table_max - min + 1) as usize);
        let mut acc = 0.0;
        let tail_prob = |k: u32| pow(minf / k as f64, a); // P(D >= k)
        for j in min..=table_max {
            let p_j = tail_prob(j) - tail_prob(j + 1);
            acc += j as f64 * p_j / m1;
            sb_cum.push(acc);
        }
        Ok(DegreeDistribution {
            inner: Inner::ParetoTail(ParetoTail {
                tau,
                min,
                m1,
                m2,
                sb_cum,
            }),
        })
    }

    pub fn mean(&self) -> f64 {
        match &self.inner {
            Inner::Finite(f) => f.m1,
            Inner::ParetoTail(p) => p.m1,
        }
    }

    /// Second moment; `+inf` for a Pareto tail with `tau <= 3`.
    pub fn second_moment(&self) -> f64 {
        match &self.inner {
            Inner::Finite(f) => f.m2,
            Inner::ParetoTail(p) => p.m2,
        }
    }

    /// `nu = (m2 - m1) / m1`, the mean forward branching factor.
    pub fn nu(&self) -> f64 {
        let m1 = self.mean();
        let m2 = self.second_moment();
        if m2.is_infinite() {
            f64::INFINITY
        } else {
            (m2 - m1) / m1
        }
    }

    /// Whether `E[D^2 log D]` is finite for the declared family.
    pub fn d2_log_d_finite(&self) -> bool {
        match &self.inner {
            Inner::Finite(_) => true,
            Inner::ParetoTail(p) => p.tau > 3.0,
        }
    }

    /// Smallest support point.
    pub fn min_degree(&self) -> u32 {
        match &self.inner {
            Inner::Finite(f) => f.ks[0],
            Inner::ParetoTail(p) => p.min,
        }
    }

    /// Probability of degree `k` under the declared law.
    pub fn prob(&self, k: u32) -> f64 {
        match &self.inner {
            Inner::Finite(f) => match f.ks.binary_search(&k) {
                Ok(i) => f.probs[i],
                Err(_) => 0.0,
            },
            Inner::ParetoTail(p) => {
                if k < p.min {
                    0.0
                } else {
                    let a = p.tau - 1.0;
                    let minf = p.min as f64;
                    pow(minf / k as f64, a) - pow(minf / (k + 1) as f64, a)
                }
            }
        }
    }

    /// Draws a degree from the root law `p_k`.
    pub fn sample(&self, stream: &mut Stream) -> u32 {
        match &self.inner {
            Inner::Finite(f) => {
                let u = stream.uniform();
                let i = f.cum.partition_point(|&c| c <= u);
                f.ks[i.min(f.ks.len() - 1)]
            }
            Inner::ParetoTail(p) => {
                // Inverse CDF: D = floor(min v^{-1/(tau-1)}) with v in (0,1].
                let v = 1.0 - stream.uniform();
                let a = p.tau - 1.0;
                let d = floor(p.min as f64 * exp(-log(v) / a));
                d.min(u32::MAX as f64 / 2.0) as u32
            }
        }
    }

    /// Draws a size-biased degree `D*`.
    fn sample_size_biased(&self, stream: &mut Stream) -> u32 {
        match &self.inner {
            Inner::Finite(f) => {
                let u = stream.uniform();
                let i = f.sb_cum.partition_point(|&c| c <= u);
                f.ks[i.min(f.ks.len() - 1)]
            }
            Inner::ParetoTail(p) => {
                let u = stream.uniform();
                let table_top = *p.sb_cum.last().expect("non-empty table");
                if u < table_top {
                    let i = p.sb_cum.partition_point(|&c| c <= u);
                    p.min + i as u32
                } else {
                    // Conditional tail inversion past the table: the
                    // size-biased tail decays like k^{1-a}, so
                    // P(D* >= k | D* > K) ~ ((k-1/2)/(K+1/2))^{1-a}.
                    let a = p.tau - 1.0;
                    let w = ((1.0 - u) / (1.0 - table_top)).max(f64::MIN_POSITIVE);
                    let k_top = p.sb_cum.len() as f64 + p.min as f64 - 0.5;
                    let k = 0.5 + k_top * exp(log(w) / (1.0 - a));
                    k.min(u32::MAX as f64 / 2.0) as u32
                }
            }
        }
    }

    /// Offspring draw for the unimodular tree: the root draws `D`, any other
    /// vertex draws `D* - 1` with `p*_k = (k+1) p_{k+1} / E[D]`.
    pub fn sample_offspring(&self, is_root: bool, stream: &mut Stream) -> u32 {
        if is_root {
            self.sample(stream)
        } else {
            self.sample_size_biased(stream) - 1
        }
    }
}

/// Comparison of an empirical degree sequence against a declared limit.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub empirical_mean: f64,
    pub empirical_second_moment: f64,
    pub declared_mean: f64,
    pub declared_second_moment: f64,
    pub mean_gap: f64,
    pub second_moment_gap: f64,
    /// All sequence entries at least two (the `F(1) = 0` requirement).
    pub min_degree_ok: bool,
    /// Declared family has a finite second moment.
    pub second_moment_finite: bool,
    /// Declared family has finite `E[D^2 log D]`.
    pub d2_log_d_finite: bool,
}

/// Reports empirical moments of `seq`, their gaps to the declared limit, the
/// minimum-degree flag and the declared-family finiteness flags.
///
/// Finiteness is always taken from the declared family, never estimated from
/// the sample.
pub fn regularity_report(seq: &DegreeSequence, declared: &DegreeDistribution) -> RegularityReport {
    let empirical_mean = seq.mean();
    let empirical_second_moment = seq.second_moment();
    let declared_mean = declared.mean();
    let declared_second_moment = declared.second_moment();
    let second_moment_finite = declared_second_moment.is_finite();
    RegularityReport {
        empirical_mean,
        empirical_second_moment,
        declared_mean,
        declared_second_moment,
        mean_gap: (empirical_mean - declared_mean).abs(),
        second_moment_gap: if second_moment_finite {
            (empirical_second_moment - declared_second_moment).abs()
        } else {
            f64::INFINITY
        },
        min_degree_ok: seq.degrees().iter().all(|&d| d >= 2),
        second_moment_finite,
        d2_log_d_finite: declared.d2_log_d_finite(),
    }
}
