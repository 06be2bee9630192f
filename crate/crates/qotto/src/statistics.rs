//! Exact joint and marginal work/heat statistics of a permutation stroke.
//!
//! Work values live on the lattice `dn*omega_a + dm*omega_b` with integer
//! level changes `(dn, dm)`, so atoms are keyed on those integers and merge
//! exactly even at degenerate frequency ratios. Log-probabilities are kept
//! alongside the linear ones so the fluctuation-theorem functionals stay
//! finite when thermal products are large enough for `exp` to underflow.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::model::{gibbs_log_probs, gibbs_state, log_sum_exp, BasisPermutation, EngineParams};
use crate::qutrit::RegimeLabel;
use crate::{lit, Error, Real, Result};

/// One merged outcome of the two-point measurement scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkHeatAtom<T> {
    /// Level change `n - l` of qudit A over the stroke.
    pub delta_n_a: i32,
    /// Level change `m - s` of qudit B over the stroke.
    pub delta_n_b: i32,
    /// Extracted work `dn*omega_a + dm*omega_b`.
    pub work: T,
    /// Energy change of qudit A, `-dn*omega_a`.
    pub delta_e_a: T,
    pub probability: T,
    /// Log of the probability, exact where the linear value underflows.
    pub log_probability: T,
}

impl<T: Real> WorkHeatAtom<T> {
    /// Energy change of qudit B; `W = -dE_A - dE_B` holds atom by atom.
    pub fn delta_e_b(&self, params: &EngineParams<T>) -> T {
        -T::from_i32(self.delta_n_b).unwrap() * params.omega_b()
    }

    /// Stochastic entropy production `(beta_a - beta_b) dE_A - beta_b W`.
    pub fn entropy(&self, params: &EngineParams<T>) -> T {
        (params.beta_a() - params.beta_b()) * self.delta_e_a - params.beta_b() * self.work
    }
}

/// Finite-support joint distribution of `(W, dE_A)`, atoms sorted by the
/// integer key `(delta_n_a, delta_n_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointWorkHeat<T> {
    atoms: Vec<WorkHeatAtom<T>>,
}

impl<T: Real> JointWorkHeat<T> {
    pub fn atoms(&self) -> &[WorkHeatAtom<T>] {
        &self.atoms
    }

    pub fn support_len(&self) -> usize {
        self.atoms.len()
    }

    pub fn find(&self, delta_n_a: i32, delta_n_b: i32) -> Option<&WorkHeatAtom<T>> {
        self.atoms
            .binary_search_by_key(&(delta_n_a, delta_n_b), |a| (a.delta_n_a, a.delta_n_b))
            .ok()
            .map(|i| &self.atoms[i])
    }

    pub fn total_probability(&self) -> T {
        self.atoms.iter().map(|a| a.probability).sum()
    }
}

/// Exact joint distribution of work and qudit-A energy change for a stroke.
pub fn joint_distribution<T: Real>(
    params: &EngineParams<T>,
    u: &BasisPermutation,
) -> Result<JointWorkHeat<T>> {
    if u.dim() != params.hilbert_dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: params.hilbert_dim() });
    }
    let state = gibbs_state(params);
    let log_probs = gibbs_log_probs(params);
    let mut merged: BTreeMap<(i32, i32), (T, Vec<T>)> = BTreeMap::new();
    for (i, &log_prob) in log_probs.iter().enumerate() {
        let (n, m) = params.levels(i);
        let (l, s) = params.levels(u.image(i));
        let key = (n as i32 - l as i32, m as i32 - s as i32);
        let entry = merged.entry(key).or_insert((T::zero(), Vec::new()));
        entry.0 = entry.0 + state.probs()[i];
        entry.1.push(log_prob);
    }
    let atoms = merged
        .into_iter()
        .map(|((dn, dm), (probability, logs))| WorkHeatAtom {
            delta_n_a: dn,
            delta_n_b: dm,
            // Adding zero folds -0.0 into +0.0.
            work: T::from_i32(dn).unwrap() * params.omega_a()
                + T::from_i32(dm).unwrap() * params.omega_b()
                + T::zero(),
            delta_e_a: -T::from_i32(dn).unwrap() * params.omega_a() + T::zero(),
            probability,
            log_probability: log_sum_exp(&logs),
        })
        .collect();
    Ok(JointWorkHeat { atoms })
}

/// Marginal work distribution, merged over `dE_A` (exactly, including work
/// values that coincide at degenerate frequency ratios) and sorted ascending.
pub fn work_marginal<T: Real>(joint: &JointWorkHeat<T>) -> Vec<(T, T)> {
    let mut rows: Vec<(T, T)> = Vec::new();
    for atom in joint.atoms() {
        let w = atom.work + T::zero(); // folds -0.0 into +0.0
        match rows.iter_mut().find(|(value, _)| *value == w) {
            Some((_, p)) => *p = *p + atom.probability,
            None => rows.push((w, atom.probability)),
        }
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rows
}

/// Exact moment `<W^j dE_A^k>` by summation over the atoms.
pub fn moments<T: Real>(joint: &JointWorkHeat<T>, j: u32, k: u32) -> T {
    assert!(j + k <= 8, "moment order capped at 8");
    joint
        .atoms()
        .iter()
        .map(|a| a.probability * a.work.powi(j as i32) * a.delta_e_a.powi(k as i32))
        .sum()
}

/// Mean work, work variance, mean energy change, entropy production, and
/// signal-to-noise ratio of one engine cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleStatistics<T> {
    pub mean_work: T,
    pub var_work: T,
    pub mean_delta_e_a: T,
    pub mean_entropy: T,
    /// `mean_work^2 / var_work`.
    pub snr: T,
}

/// Ensemble statistics of the cycle, with the mean entropy production
/// `(beta_a - beta_b) <dE_A> - beta_b <W>`.
pub fn entropy_production<T: Real>(
    params: &EngineParams<T>,
    joint: &JointWorkHeat<T>,
) -> CycleStatistics<T> {
    let mean_work = moments(joint, 1, 0);
    let second = moments(joint, 2, 0);
    let var_work = (second - mean_work * mean_work).max(T::zero());
    let mean_delta_e_a = moments(joint, 0, 1);
    // Adding zero folds a -0.0 (from sign-flipped exact zeros) into +0.0.
    let mean_entropy = (params.beta_a() - params.beta_b()) * mean_delta_e_a
        - params.beta_b() * mean_work
        + T::zero();
    CycleStatistics {
        mean_work,
        var_work,
        mean_delta_e_a,
        mean_entropy,
        snr: mean_work * mean_work / var_work,
    }
}

/// Largest admissible imaginary part of a counting parameter.
pub const COUNTING_IMAGINARY_CAP: f64 = 1e3;

/// Characteristic function `chi(lambda, mu) = <exp(i lambda W + i mu dE_A)>`
/// at complex counting parameters.
///
/// Exponents are combined with the atom log-probabilities before the final
/// `exp`, so thermal-product underflow cancels instead of propagating.
pub fn characteristic_function<T: Real>(
    params: &EngineParams<T>,
    u: &BasisPermutation,
    lambda: Complex<T>,
    mu: Complex<T>,
) -> Result<Complex<T>> {
    let cap = lit::<T>(COUNTING_IMAGINARY_CAP);
    if lambda.im.abs() > cap || mu.im.abs() > cap {
        return Err(Error::CountingParameterOverflow { cap: COUNTING_IMAGINARY_CAP });
    }
    let joint = joint_distribution(params, u)?;
    let i = Complex::new(T::zero(), T::one());
    let mut sum = Complex::new(T::zero(), T::zero());
    for atom in joint.atoms() {
        let exponent = i * (lambda * atom.work + mu * atom.delta_e_a)
            + Complex::new(atom.log_probability, T::zero());
        sum = sum + exponent.exp();
    }
    Ok(sum)
}

/// Statistics of the time-reversed protocol: the inverse stroke from the
/// same thermal state.
pub fn backward_joint<T: Real>(
    params: &EngineParams<T>,
    u: &BasisPermutation,
) -> Result<JointWorkHeat<T>> {
    joint_distribution(params, &u.inverse())
}

/// Maximum relative error of the detailed fluctuation theorem
/// `p(W, dE_A) = e^Sigma p_B(-W, -dE_A)` over the support.
///
/// An atom of one distribution with no mirror partner in the other counts as
/// infinite error, since it would falsify the theorem outright.
pub fn detailed_ft_check<T: Real>(params: &EngineParams<T>, u: &BasisPermutation) -> Result<T> {
    let forward = joint_distribution(params, u)?;
    let backward = backward_joint(params, u)?;
    let mut max_err = T::zero();
    for atom in forward.atoms().iter().filter(|a| a.probability > T::zero()) {
        match backward.find(-atom.delta_n_a, -atom.delta_n_b) {
            None => return Ok(T::infinity()),
            Some(mirror) => {
                let sigma = atom.entropy(params);
                let err = (T::one()
                    - (sigma + mirror.log_probability - atom.log_probability).exp())
                .abs();
                max_err = max_err.max(err);
            }
        }
    }
    for atom in backward.atoms().iter().filter(|a| a.probability > T::zero()) {
        if forward.find(-atom.delta_n_a, -atom.delta_n_b).is_none() {
            return Ok(T::infinity());
        }
    }
    Ok(max_err)
}

/// Residual `|<e^{-Sigma}> - 1|` of the integral fluctuation theorem,
/// accumulated in the log domain.
pub fn integral_ft_residual<T: Real>(params: &EngineParams<T>, u: &BasisPermutation) -> Result<T> {
    let joint = joint_distribution(params, u)?;
    let sum: T =
        joint.atoms().iter().map(|a| (a.log_probability - a.entropy(params)).exp()).sum();
    Ok((sum - T::one()).abs())
}

/// Closed-form mean entropy production of a named qutrit stroke.
pub fn closed_form_entropy<T: Real>(params: &EngineParams<T>, which: RegimeLabel) -> Result<T> {
    if !params.is_qutrit_pair() {
        return Err(Error::NotQutrit { dim_a: params.dim_a(), dim_b: params.dim_b() });
    }
    let two = T::one() + T::one();
    let a_a = params.beta_omega_a();
    let a_b = params.beta_omega_b();
    let denom = (T::one() + two * a_a.cosh()) * (T::one() + two * a_b.cosh());
    let value = match which {
        RegimeLabel::Passive => return Err(Error::PassiveClosedForm),
        // The frequency-gap prefactors of the work cancel against the
        // proportionality constants, leaving functions of the thermal
        // products alone.
        RegimeLabel::Swap => {
            two * (a_b - a_a) * (two * (a_b - a_a).sinh() + a_b.sinh() - a_a.sinh()) / denom
        }
        RegimeLabel::IdleSwapB => {
            two * (two * a_b - a_a) * (a_b.sinh() + (a_b - a_a).sinh()) / denom
        }
        RegimeLabel::IdleSwapA => {
            two * (two * a_a - a_b) * (a_a.sinh() + (a_a - a_b).sinh()) / denom
        }
        RegimeLabel::DoubleSwap => {
            two * (a_b * (a_a.sinh() + a_b.sinh())
                - a_a * (a_b.sinh() + (a_b - a_a).sinh()))
                / denom
        }
        RegimeLabel::DoubleSwapInverse => {
            return closed_form_entropy(&params.swapped(), RegimeLabel::DoubleSwap)
        }
    };
    Ok(value)
}

/// Closed-form relative work fluctuations `var(W) / <W>^2` of a named
/// qutrit stroke.
pub fn closed_form_relative_fluctuations<T: Real>(
    params: &EngineParams<T>,
    which: RegimeLabel,
) -> Result<T> {
    if !params.is_qutrit_pair() {
        return Err(Error::NotQutrit { dim_a: params.dim_a(), dim_b: params.dim_b() });
    }
    let one = T::one();
    let two = one + one;
    let four = two + two;
    let a_a = params.beta_omega_a();
    let a_b = params.beta_omega_b();
    let x = params.x();
    let prefactor = (one + two * a_a.cosh()) * (one + two * a_b.cosh());
    let value = match which {
        RegimeLabel::Passive => return Err(Error::PassiveClosedForm),
        RegimeLabel::Swap => {
            let num = a_a.cosh() + a_b.cosh() + four * (a_b - a_a).cosh();
            let den = two * (a_b.sinh() - a_a.sinh() + two * (a_b - a_a).sinh()).powi(2);
            prefactor * num / den - one
        }
        RegimeLabel::IdleSwapB => {
            let num = a_b.cosh() + (a_b - a_a).cosh();
            let den = two * (a_b.sinh() + (a_b - a_a).sinh()).powi(2);
            prefactor * num / den - one
        }
        RegimeLabel::IdleSwapA => {
            return closed_form_relative_fluctuations(&params.swapped(), RegimeLabel::IdleSwapB)
        }
        RegimeLabel::DoubleSwap => {
            let num = x * x * a_a.cosh() + (one - x) * (one - x) * a_b.cosh() + (a_b - a_a).cosh();
            let den = two
                * ((one - x) * a_b.sinh() - x * a_a.sinh() + (a_b - a_a).sinh()).powi(2);
            prefactor * num / den - one
        }
        RegimeLabel::DoubleSwapInverse => {
            return closed_form_relative_fluctuations(&params.swapped(), RegimeLabel::DoubleSwap)
        }
    };
    Ok(value)
}

/// Proportionality constant of the perfectly correlated statistics of a
/// number-conserving stroke: with `a*n_A + b*n_B` conserved, every atom obeys
/// `dE_A = alpha W` and hence `<W^j dE_A^k> = alpha^k <W^{j+k}>`.
///
/// `None` where `a*omega_b = b*omega_a`, the degenerate ratio at which the
/// stroke does no work.
pub fn conserved_alpha<T: Real>(params: &EngineParams<T>, pair: (u32, u32)) -> Option<T> {
    let (a, b) = pair;
    let num = T::from_u32(b).unwrap() * params.omega_a();
    let den = T::from_u32(a).unwrap() * params.omega_b() - T::from_u32(b).unwrap() * params.omega_a();
    if den == T::zero() {
        None
    } else {
        Some(num / den)
    }
}
