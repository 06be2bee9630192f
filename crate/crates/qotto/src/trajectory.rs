//! Monte Carlo realization of full engine cycles.
//!
//! A cycle is sampled as: measure both qudits in the thermal state, apply
//! the permutation stroke (deterministic for permutation unitaries), then
//! re-thermalize by drawing fresh levels from each qudit's own Gibbs
//! marginal. The reset model is exact complete thermalization, so reservoir
//! microstates never need to be tracked; heats and entropy are booked on
//! the system side, the weak-coupling identification of the reservoir
//! energy changes.
//!
//! The generator is ChaCha12 seeded from a single `u64`; identical seeds and
//! parameters reproduce summaries bit for bit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::model::{gibbs_state, BasisPermutation, EngineParams};
use crate::statistics::{moments, JointWorkHeat};
use crate::{Error, Real, Result};

/// Measurement record of one cycle: initial levels, post-stroke levels, and
/// post-thermalization levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trajectory {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub s: usize,
    pub n_prime: usize,
    pub m_prime: usize,
}

impl Trajectory {
    pub fn delta_e_a<T: Real>(&self, params: &EngineParams<T>) -> T {
        T::from_i64(self.l as i64 - self.n as i64).unwrap() * params.omega_a()
    }

    pub fn delta_e_b<T: Real>(&self, params: &EngineParams<T>) -> T {
        T::from_i64(self.s as i64 - self.m as i64).unwrap() * params.omega_b()
    }

    /// Extracted work, defined as `-(dE_A + dE_B)` so the stochastic first
    /// law of the work stroke holds exactly, sample by sample.
    pub fn work<T: Real>(&self, params: &EngineParams<T>) -> T {
        -(self.delta_e_a(params) + self.delta_e_b(params))
    }

    /// Heat released by the hot reservoir during re-thermalization.
    pub fn heat_hot<T: Real>(&self, params: &EngineParams<T>) -> T {
        T::from_i64(self.n_prime as i64 - self.l as i64).unwrap() * params.omega_a()
    }

    /// Heat released by the cold reservoir during re-thermalization.
    pub fn heat_cold<T: Real>(&self, params: &EngineParams<T>) -> T {
        T::from_i64(self.m_prime as i64 - self.s as i64).unwrap() * params.omega_b()
    }

    /// Stochastic entropy production `beta_a dE_A + beta_b dE_B`.
    pub fn entropy<T: Real>(&self, params: &EngineParams<T>) -> T {
        params.beta_a() * self.delta_e_a(params) + params.beta_b() * self.delta_e_b(params)
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy)]
struct Online<T> {
    count: u64,
    mean: T,
    m2: T,
}

impl<T: Real> Online<T> {
    fn new() -> Self {
        Self { count: 0, mean: T::zero(), m2: T::zero() }
    }

    fn push(&mut self, value: T) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean = self.mean + delta / T::from_u64(self.count).unwrap();
        self.m2 = self.m2 + delta * (value - self.mean);
    }

    fn summary(&self) -> MomentSummary<T> {
        let n = T::from_u64(self.count).unwrap();
        let variance = if self.count > 1 {
            self.m2 / T::from_u64(self.count - 1).unwrap()
        } else {
            T::zero()
        };
        MomentSummary { mean: self.mean, variance, standard_error: (variance / n).sqrt() }
    }
}

/// Empirical mean, sample variance, and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary<T> {
    pub mean: T,
    pub variance: T,
    pub standard_error: T,
}

/// One bin of the empirical work/heat histogram, keyed like the exact atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin<T> {
    pub delta_n_a: i32,
    pub delta_n_b: i32,
    pub count: u64,
    pub mass: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary<T> {
    pub sample_count: u64,
    pub work: MomentSummary<T>,
    pub heat_hot: MomentSummary<T>,
    pub heat_cold: MomentSummary<T>,
    pub entropy: MomentSummary<T>,
    /// Per-sample `Q_H + Q_C - W`, which vanishes only in the mean.
    pub first_law_gap: MomentSummary<T>,
    /// Per-sample `e^{-Sigma}`; its mean is 1 by the fluctuation theorem.
    pub exp_neg_entropy: MomentSummary<T>,
    pub histogram: Vec<HistogramBin<T>>,
}

impl<T: Real> EmpiricalSummary<T> {
    /// True when every observed work/heat atom exists in the exact support.
    pub fn support_within(&self, exact: &JointWorkHeat<T>) -> bool {
        self.histogram.iter().all(|bin| exact.find(bin.delta_n_a, bin.delta_n_b).is_some())
    }

    /// Total-variation distance between the histogram and the exact law.
    pub fn total_variation_distance(&self, exact: &JointWorkHeat<T>) -> T {
        let mut distance = T::zero();
        let mut seen: Vec<(i32, i32)> = Vec::new();
        for bin in &self.histogram {
            let exact_mass = exact
                .find(bin.delta_n_a, bin.delta_n_b)
                .map(|a| a.probability)
                .unwrap_or_else(T::zero);
            distance = distance + (bin.mass - exact_mass).abs();
            seen.push((bin.delta_n_a, bin.delta_n_b));
        }
        for atom in exact.atoms() {
            if !seen.contains(&(atom.delta_n_a, atom.delta_n_b)) {
                distance = distance + atom.probability;
            }
        }
        distance / (T::one() + T::one())
    }
}

fn cumulative<T: Real>(weights: &[T]) -> Vec<T> {
    let mut acc = T::zero();
    weights
        .iter()
        .map(|&w| {
            acc = acc + w;
            acc
        })
        .collect()
}

fn draw<T: Real>(rng: &mut ChaCha12Rng, cumulative: &[T]) -> usize {
    let u = T::from_f64(rng.gen::<f64>()).unwrap();
    cumulative.iter().position(|&c| u < c).unwrap_or(cumulative.len() - 1)
}

/// Samples `count` engine cycles with the given stroke and seed.
///
/// Note the accumulated `e^{-Sigma}` is evaluated in the linear domain; for
/// thermal products beyond ~30 its sample fluctuations are astronomically
/// heavy-tailed and the estimator (like any direct sampler of it) stops
/// being informative.
pub fn sample_cycles<T: Real>(
    params: &EngineParams<T>,
    u: &BasisPermutation,
    count: u64,
    seed: u64,
) -> Result<EmpiricalSummary<T>> {
    if count == 0 {
        return Err(Error::EmptySample);
    }
    if u.dim() != params.hilbert_dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: params.hilbert_dim() });
    }
    let joint_cdf = cumulative(gibbs_state(params).probs());
    let marginal_a: Vec<T> = thermal_marginal(params.beta_omega_a(), params.dim_a());
    let marginal_b: Vec<T> = thermal_marginal(params.beta_omega_b(), params.dim_b());
    let cdf_a = cumulative(&marginal_a);
    let cdf_b = cumulative(&marginal_b);

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut work = Online::new();
    let mut heat_hot = Online::new();
    let mut heat_cold = Online::new();
    let mut entropy = Online::new();
    let mut first_law_gap = Online::new();
    let mut exp_neg_entropy = Online::new();
    let mut counts: BTreeMap<(i32, i32), u64> = BTreeMap::new();

    for _ in 0..count {
        let initial = draw(&mut rng, &joint_cdf);
        let (n, m) = params.levels(initial);
        let (l, s) = params.levels(u.image(initial));
        let n_prime = draw(&mut rng, &cdf_a);
        let m_prime = draw(&mut rng, &cdf_b);
        let traj = Trajectory { n, m, l, s, n_prime, m_prime };

        let w = traj.work(params);
        let qh = traj.heat_hot(params);
        let qc = traj.heat_cold(params);
        let sigma = traj.entropy(params);
        work.push(w);
        heat_hot.push(qh);
        heat_cold.push(qc);
        entropy.push(sigma);
        first_law_gap.push(qh + qc - w);
        exp_neg_entropy.push((-sigma).exp());
        *counts.entry((n as i32 - l as i32, m as i32 - s as i32)).or_insert(0) += 1;
    }

    let total = T::from_u64(count).unwrap();
    let histogram = counts
        .into_iter()
        .map(|((dn, dm), c)| HistogramBin {
            delta_n_a: dn,
            delta_n_b: dm,
            count: c,
            mass: T::from_u64(c).unwrap() / total,
        })
        .collect();

    Ok(EmpiricalSummary {
        sample_count: count,
        work: work.summary(),
        heat_hot: heat_hot.summary(),
        heat_cold: heat_cold.summary(),
        entropy: entropy.summary(),
        first_law_gap: first_law_gap.summary(),
        exp_neg_entropy: exp_neg_entropy.summary(),
        histogram,
    })
}

fn thermal_marginal<T: Real>(beta_omega: T, dim: usize) -> Vec<T> {
    let mut weights: Vec<T> = (0..dim)
        .map(|k| (-beta_omega * T::from_usize(k).unwrap()).exp())
        .collect();
    let total: T = weights.iter().copied().sum();
    for w in weights.iter_mut() {
        *w = *w / total;
    }
    weights
}

/// One deviation-from-zero check at four standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanIdentityCheck<T> {
    pub deviation: T,
    pub standard_error: T,
    pub within_four_sigma: bool,
}

fn identity_check<T: Real>(deviation: T, standard_error: T) -> MeanIdentityCheck<T> {
    let within = if standard_error == T::zero() {
        deviation == T::zero()
    } else {
        deviation.abs() <= T::from_u8(4).unwrap() * standard_error
    };
    MeanIdentityCheck { deviation, standard_error, within_four_sigma: within }
}

/// Statistical verification of the mean heat/energy identities
/// `<Q_H> = -<dE_A>`, `<Q_C> = -<dE_B>`, `<Q_H + Q_C - W> = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanIdentitiesReport<T> {
    pub heat_hot_vs_delta_e_a: MeanIdentityCheck<T>,
    pub heat_cold_vs_delta_e_b: MeanIdentityCheck<T>,
    pub first_law: MeanIdentityCheck<T>,
    pub pass: bool,
}

pub fn mean_identities_check<T: Real>(
    summary: &EmpiricalSummary<T>,
    exact: &JointWorkHeat<T>,
) -> MeanIdentitiesReport<T> {
    let exact_de_a = moments(exact, 0, 1);
    let exact_de_b = -moments(exact, 1, 0) - exact_de_a;
    let hot = identity_check(summary.heat_hot.mean + exact_de_a, summary.heat_hot.standard_error);
    let cold =
        identity_check(summary.heat_cold.mean + exact_de_b, summary.heat_cold.standard_error);
    let first =
        identity_check(summary.first_law_gap.mean, summary.first_law_gap.standard_error);
    let pass = hot.within_four_sigma && cold.within_four_sigma && first.within_four_sigma;
    MeanIdentitiesReport {
        heat_hot_vs_delta_e_a: hot,
        heat_cold_vs_delta_e_b: cold,
        first_law: first,
        pass,
    }
}
