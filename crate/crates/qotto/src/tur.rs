//! Thermodynamic uncertainty bounds on the relative work fluctuations, and
//! sweeps that evaluate them across parameter ranges.
//!
//! Bounds are stated on `var(W)/<W>^2`; the equivalent entropy-scaled
//! presentation (`<Sigma> var(W)/<W>^2` against the constant 2, say) is the
//! product of the reported columns, no separate evaluation needed.

use crate::ergotropy::ergotropic_unitary;
use crate::model::{conserved_number_combination, BasisPermutation, EngineParams};
use crate::qutrit::{classify, RegimeLabel};
use crate::statistics::{backward_joint, entropy_production, joint_distribution, CycleStatistics};
use crate::{lit, Error, Real, Result};

/// Relative slack before a bound comparison counts as a violation, so float
/// noise never flags one.
pub const VIOLATION_TOLERANCE: f64 = 1e-12;

/// Below this entropy the tight bound is evaluated by series instead of
/// through the bisection root.
pub const TIGHT_BOUND_SERIES_THRESHOLD: f64 = 1e-8;

/// Inverse of `x tanh(x)` on the nonnegative axis, by bisection on
/// `[0, max(1, y + 1)]` (the function is increasing and exceeds `x - 1`).
pub fn inverse_x_tanh_x<T: Real>(y: T) -> Result<T> {
    if y < T::zero() {
        return Err(Error::NegativeEntropyArgument);
    }
    if y == T::zero() {
        return Ok(T::zero());
    }
    let f = |x: T| x * x.tanh() - y;
    let mut lo = T::zero();
    let mut hi = T::one().max(y + T::one());
    for _ in 0..200 {
        let half = lit::<T>(0.5);
        let mid = half * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lit::<T>(0.5) * (lo + hi))
}

/// Tight lower bound `csch^2[g(s/2)]` on the relative fluctuations of any
/// time-symmetric process with mean entropy production `s`.
///
/// For `s` below [`TIGHT_BOUND_SERIES_THRESHOLD`] the root is expanded as
/// `g^2 = y (1 + y/3)`, `csch^2(g) = 1/g^2 - 1/3`, which avoids the loss of
/// significance a bisection residual would cause there.
pub fn tight_bound<T: Real>(mean_entropy: T) -> T {
    let third = T::one() / lit::<T>(3.0);
    if mean_entropy <= T::zero() {
        return T::infinity();
    }
    let y = mean_entropy / lit::<T>(2.0);
    if mean_entropy < lit(TIGHT_BOUND_SERIES_THRESHOLD) {
        let g_squared = y * (T::one() + y * third);
        return g_squared.recip() - third;
    }
    let g = inverse_x_tanh_x(y).expect("nonnegative by construction");
    g.sinh().powi(2).recip()
}

/// Loose lower bound `2 / (e^s - 1)`.
pub fn loose_bound<T: Real>(mean_entropy: T) -> T {
    lit::<T>(2.0) / mean_entropy.exp_m1()
}

/// One evaluated bound and whether the statistics satisfy it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck<T> {
    pub value: T,
    pub satisfied: bool,
}

/// Evaluation of the six uncertainty bounds at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct TurReport<T> {
    /// False when the mean work vanishes; the relative fluctuations are then
    /// undefined and the forward bound flags are vacuous.
    pub operational: bool,
    /// `var(W) / <W>^2` (NaN when not operational).
    pub relative_fluctuations: T,
    pub mean_entropy: T,
    pub standard: BoundCheck<T>,
    pub swap: BoundCheck<T>,
    /// The swap-specific bound is proven only for number-conserving strokes;
    /// it is still reported for the others, with this flag cleared.
    pub swap_bound_applicable: bool,
    pub tight: BoundCheck<T>,
    pub loose: BoundCheck<T>,
    /// `(var + var_B) / (<W> + <W>_B)^2` (NaN when the sum of means is 0).
    pub generalized_lhs: T,
    pub generalized_tight: BoundCheck<T>,
    pub generalized_loose: BoundCheck<T>,
    /// Statistics of the time-reversed protocol the generalized bounds used.
    pub backward: CycleStatistics<T>,
}

fn check<T: Real>(lhs: T, bound: T) -> BoundCheck<T> {
    let satisfied = if lhs.is_nan() {
        true // non-operational point, nothing to bound
    } else {
        lhs >= bound - lit::<T>(VIOLATION_TOLERANCE) * bound.abs().max(T::one())
    };
    BoundCheck { value: bound, satisfied }
}

/// Evaluates the standard, swap, tight, loose, and both generalized bounds
/// against forward and backward cycle statistics.
pub fn evaluate_bounds<T: Real>(
    forward: &CycleStatistics<T>,
    backward: &CycleStatistics<T>,
    swap_bound_applicable: bool,
) -> TurReport<T> {
    let two = lit::<T>(2.0);
    let operational = forward.mean_work != T::zero();
    let relative_fluctuations = if operational {
        forward.var_work / (forward.mean_work * forward.mean_work)
    } else {
        T::nan()
    };
    let s = forward.mean_entropy;

    let sum_mean = forward.mean_work + backward.mean_work;
    let generalized_lhs = if sum_mean == T::zero() {
        T::nan()
    } else {
        (forward.var_work + backward.var_work) / (sum_mean * sum_mean)
    };
    let a = (forward.mean_entropy + backward.mean_entropy) / two;

    TurReport {
        operational,
        relative_fluctuations,
        mean_entropy: s,
        standard: check(relative_fluctuations, two / s),
        swap: check(relative_fluctuations, two / s - T::one()),
        swap_bound_applicable,
        tight: check(relative_fluctuations, tight_bound(s)),
        loose: check(relative_fluctuations, loose_bound(s)),
        generalized_lhs,
        generalized_tight: check(generalized_lhs, tight_bound(a) / two),
        // 1/(e^a - 1): for a time-symmetric process this reduces exactly to
        // the loose bound, and it stays below the generalized tight bound.
        generalized_loose: check(generalized_lhs, a.exp_m1().recip()),
        backward: *backward,
    }
}

/// Full per-point evaluation: statistics of the chosen stroke plus the bound
/// report against its backward process.
pub fn evaluate_point<T: Real>(
    params: &EngineParams<T>,
    u: &BasisPermutation,
) -> Result<(CycleStatistics<T>, TurReport<T>)> {
    let forward = entropy_production(params, &joint_distribution(params, u)?);
    let backward = entropy_production(params, &backward_joint(params, u)?);
    let applicable = conserved_number_combination(u, params).is_some();
    Ok((forward, evaluate_bounds(&forward, &backward, applicable)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Sweep the bare frequency `omega_b` at fixed inverse temperatures.
    OmegaB,
    /// Sweep the thermal product `beta_b * omega_b` at fixed `omega_b`.
    BetaBOmegaB,
}

impl std::str::FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "omega-b" => Ok(SweepParameter::OmegaB),
            "beta-b-omega-b" => Ok(SweepParameter::BetaBOmegaB),
            other => Err(format!("unknown sweep parameter {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScale {
    Linear,
    Log,
}

impl std::str::FromStr for SweepScale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" => Ok(SweepScale::Linear),
            "log" => Ok(SweepScale::Log),
            other => Err(format!("unknown sweep scale {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SweepSpec<T> {
    pub parameter: SweepParameter,
    pub from: T,
    pub to: T,
    pub steps: usize,
    pub scale: SweepScale,
}

impl<T: Real> SweepSpec<T> {
    pub fn values(&self) -> Result<Vec<T>> {
        if self.steps == 0 {
            return Err(Error::EmptySweep);
        }
        if self.steps == 1 {
            return Ok(vec![self.from]);
        }
        let count = T::from_usize(self.steps - 1).unwrap();
        let values = match self.scale {
            SweepScale::Linear => (0..self.steps)
                .map(|i| {
                    self.from + (self.to - self.from) * T::from_usize(i).unwrap() / count
                })
                .collect(),
            SweepScale::Log => {
                if self.from <= T::zero() || self.to <= T::zero() {
                    return Err(Error::InvalidParameter {
                        name: "sweep",
                        reason: "log-scale sweeps need positive endpoints".into(),
                    });
                }
                let (lf, lt) = (self.from.ln(), self.to.ln());
                (0..self.steps)
                    .map(|i| (lf + (lt - lf) * T::from_usize(i).unwrap() / count).exp())
                    .collect()
            }
        };
        Ok(values)
    }
}

/// How the stroke is chosen at each sweep point.
#[derive(Debug, Clone)]
pub enum UnitarySelection {
    /// Re-derive the work-optimal stroke per point.
    Auto,
    /// Evaluate a fixed permutation everywhere.
    Fixed(BasisPermutation),
}

#[derive(Debug, Clone)]
pub struct SweepRow<T> {
    pub sweep_value: T,
    pub regime: Option<RegimeLabel>,
    pub forward: CycleStatistics<T>,
    pub report: TurReport<T>,
}

/// Signal-to-noise and bound table across a one-parameter sweep.
pub fn snr_sweep<T: Real>(
    base: &EngineParams<T>,
    spec: &SweepSpec<T>,
    selection: &UnitarySelection,
) -> Result<Vec<SweepRow<T>>> {
    let mut rows = Vec::with_capacity(spec.steps);
    for value in spec.values()? {
        let params = match spec.parameter {
            SweepParameter::OmegaB => base.with_omega_b(value)?,
            SweepParameter::BetaBOmegaB => base.with_beta_b(value / base.omega_b())?,
        };
        let (unitary, regime) = match selection {
            UnitarySelection::Auto => {
                let result = ergotropic_unitary(&params);
                (result.unitary, result.regime)
            }
            UnitarySelection::Fixed(u) => {
                let regime = if params.hilbert_dim() == 9 { classify(u) } else { None };
                (u.clone(), regime)
            }
        };
        let (forward, report) = evaluate_point(&params, &unitary)?;
        rows.push(SweepRow { sweep_value: value, regime, forward, report });
    }
    Ok(rows)
}
