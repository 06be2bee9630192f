//! Engine parameters, Gibbs product states, energy tables, and permutations
//! of the product basis.
//!
//! The product basis is indexed lexicographically, `i = n * dim_b + m` for
//! the ket `|n m>`. All cycle-notation text uses 1-based labels `i + 1`.

use crate::{lit, Error, Real, Result};

/// Frequencies, inverse temperatures, and level counts of the two qudits.
///
/// Natural units (`hbar = k_B = 1`); frequencies are energy gaps. Zero
/// inverse temperature is allowed and describes the infinite-temperature
/// limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineParams<T> {
    omega_a: T,
    omega_b: T,
    beta_a: T,
    beta_b: T,
    dim_a: usize,
    dim_b: usize,
}

impl<T: Real> EngineParams<T> {
    pub fn new(
        omega_a: T,
        omega_b: T,
        beta_a: T,
        beta_b: T,
        dim_a: usize,
        dim_b: usize,
    ) -> Result<Self> {
        let checks: [(&'static str, T, bool); 4] = [
            ("omega-a", omega_a, true),
            ("omega-b", omega_b, true),
            ("beta-a", beta_a, false),
            ("beta-b", beta_b, false),
        ];
        for (name, value, strictly_positive) in checks {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {value:?}"),
                });
            }
            if strictly_positive && value <= T::zero() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be > 0, got {value:?}"),
                });
            }
            if !strictly_positive && value < T::zero() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be >= 0, got {value:?}"),
                });
            }
        }
        for (name, dim) in [("dim-a", dim_a), ("dim-b", dim_b)] {
            if dim < 2 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be at least 2, got {dim}"),
                });
            }
        }
        Ok(Self { omega_a, omega_b, beta_a, beta_b, dim_a, dim_b })
    }

    /// Two-qutrit engine, the configuration the named transformations act on.
    pub fn qutrit(omega_a: T, omega_b: T, beta_a: T, beta_b: T) -> Result<Self> {
        Self::new(omega_a, omega_b, beta_a, beta_b, 3, 3)
    }

    pub fn omega_a(&self) -> T {
        self.omega_a
    }

    pub fn omega_b(&self) -> T {
        self.omega_b
    }

    pub fn beta_a(&self) -> T {
        self.beta_a
    }

    pub fn beta_b(&self) -> T {
        self.beta_b
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Frequency ratio `x = omega_b / omega_a`.
    pub fn x(&self) -> T {
        self.omega_b / self.omega_a
    }

    /// Thermal product `beta_a * omega_a`.
    pub fn beta_omega_a(&self) -> T {
        self.beta_a * self.omega_a
    }

    /// Thermal product `beta_b * omega_b`.
    pub fn beta_omega_b(&self) -> T {
        self.beta_b * self.omega_b
    }

    pub fn hilbert_dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn is_qutrit_pair(&self) -> bool {
        self.dim_a == 3 && self.dim_b == 3
    }

    /// Same engine with the roles of the two qudits exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            omega_a: self.omega_b,
            omega_b: self.omega_a,
            beta_a: self.beta_b,
            beta_b: self.beta_a,
            dim_a: self.dim_b,
            dim_b: self.dim_a,
        }
    }

    pub fn with_omega_b(&self, omega_b: T) -> Result<Self> {
        Self::new(self.omega_a, omega_b, self.beta_a, self.beta_b, self.dim_a, self.dim_b)
    }

    pub fn with_beta_b(&self, beta_b: T) -> Result<Self> {
        Self::new(self.omega_a, self.omega_b, self.beta_a, beta_b, self.dim_a, self.dim_b)
    }

    /// Lexicographic index of `|n m>`.
    pub fn index(&self, n: usize, m: usize) -> usize {
        n * self.dim_b + m
    }

    /// Level pair `(n, m)` of a basis index.
    pub fn levels(&self, index: usize) -> (usize, usize) {
        (index / self.dim_b, index % self.dim_b)
    }

    pub fn energy_a(&self, n: usize) -> T {
        T::from_usize(n).unwrap() * self.omega_a
    }

    pub fn energy_b(&self, m: usize) -> T {
        T::from_usize(m).unwrap() * self.omega_b
    }
}

/// Occupation probabilities over the lexicographic product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState<T> {
    probs: Vec<T>,
}

impl<T: Real> DiagonalState<T> {
    /// Builds a state, checking nonnegativity and normalization to 1e-12.
    pub fn from_probs(probs: Vec<T>) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < T::zero()) {
            return Err(Error::InvalidParameter {
                name: "probs",
                reason: "entries must be finite and nonnegative".into(),
            });
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > lit(1e-12) {
            return Err(Error::InvalidParameter {
                name: "probs",
                reason: format!("entries must sum to 1, got {total:?}"),
            });
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Reindexes `|n m>` to `|m n>`, the state of the label-swapped engine.
    pub fn transposed(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != self.probs.len() {
            return Err(Error::DimensionMismatch { left: dim_a * dim_b, right: self.probs.len() });
        }
        let mut out = vec![T::zero(); self.probs.len()];
        for n in 0..dim_a {
            for m in 0..dim_b {
                out[m * dim_a + n] = self.probs[n * dim_b + m];
            }
        }
        Ok(Self { probs: out })
    }
}

/// Energies of the product basis, `entry(n * dim_b + m) = n*omega_a + m*omega_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTable<T> {
    energies: Vec<T>,
}

impl<T: Real> EnergyTable<T> {
    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn entry(&self, index: usize) -> T {
        self.energies[index]
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Thermal product state of the two qudits.
pub fn gibbs_state<T: Real>(params: &EngineParams<T>) -> DiagonalState<T> {
    let a_a = params.beta_omega_a();
    let a_b = params.beta_omega_b();
    let mut probs = Vec::with_capacity(params.hilbert_dim());
    for n in 0..params.dim_a() {
        for m in 0..params.dim_b() {
            let exponent = a_a * T::from_usize(n).unwrap() + a_b * T::from_usize(m).unwrap();
            probs.push((-exponent).exp());
        }
    }
    // Normalizing by the computed sum (not the analytic partition functions)
    // keeps the sums-to-one invariant at machine precision.
    let total: T = probs.iter().copied().sum();
    for p in probs.iter_mut() {
        *p = *p / total;
    }
    DiagonalState { probs }
}

/// Log-weights of the Gibbs state (numerically safe where the linear
/// probabilities underflow), normalized so that `logsumexp = 0`.
pub(crate) fn gibbs_log_probs<T: Real>(params: &EngineParams<T>) -> Vec<T> {
    let a_a = params.beta_omega_a();
    let a_b = params.beta_omega_b();
    let mut logs = Vec::with_capacity(params.hilbert_dim());
    for n in 0..params.dim_a() {
        for m in 0..params.dim_b() {
            logs.push(-(a_a * T::from_usize(n).unwrap() + a_b * T::from_usize(m).unwrap()));
        }
    }
    let log_z = log_sum_exp(&logs);
    for l in logs.iter_mut() {
        *l = *l - log_z;
    }
    logs
}

pub(crate) fn log_sum_exp<T: Real>(values: &[T]) -> T {
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    if !max.is_finite() {
        return max;
    }
    let sum: T = values.iter().map(|&v| (v - max).exp()).sum();
    max + sum.ln()
}

pub fn energy_table<T: Real>(params: &EngineParams<T>) -> EnergyTable<T> {
    let mut energies = Vec::with_capacity(params.hilbert_dim());
    for n in 0..params.dim_a() {
        for m in 0..params.dim_b() {
            energies.push(params.energy_a(n) + params.energy_b(m));
        }
    }
    EnergyTable { energies }
}

/// A bijection `sigma` on basis indices, representing the permutation
/// unitary `U |i> = |sigma(i)>`.
///
/// Phase decorations `e^{i phi} U e^{i psi}` (diagonal in the same basis)
/// act trivially on diagonal states and on every statistic computed here,
/// so they are not represented.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisPermutation {
    map: Vec<usize>,
}

impl BasisPermutation {
    pub fn identity(dim: usize) -> Self {
        Self { map: (0..dim).collect() }
    }

    /// Builds a permutation from `map[i] = sigma(i)`, checking bijectivity.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &target in &map {
            if target >= map.len() || seen[target] {
                return Err(Error::InvalidPermutation(format!(
                    "map {map:?} is not a bijection on 0..{}",
                    map.len()
                )));
            }
            seen[target] = true;
        }
        Ok(Self { map })
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn image(&self, index: usize) -> usize {
        self.map[index]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (source, &target) in self.map.iter().enumerate() {
            map[target] = source;
        }
        Self { map }
    }

    /// Multiplicative order: the least `k >= 1` with `sigma^k = id`.
    pub fn order(&self) -> usize {
        let mut order = 1usize;
        let mut seen = vec![false; self.map.len()];
        for start in 0..self.map.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0usize;
            let mut cursor = start;
            loop {
                seen[cursor] = true;
                len += 1;
                cursor = self.map[cursor];
                if cursor == start {
                    break;
                }
            }
            order = lcm(order, len);
        }
        order
    }

    /// Disjoint-cycle text with 1-based labels, smallest element first in
    /// each cycle, cycles ordered by smallest element, fixed points omitted.
    /// Labels are concatenated digits for dimensions up to 9 and
    /// space-separated otherwise. The identity yields an empty string.
    pub fn cycle_notation(&self) -> String {
        let mut seen = vec![false; self.map.len()];
        let mut out = String::new();
        for start in 0..self.map.len() {
            if seen[start] || self.map[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut cursor = start;
            loop {
                seen[cursor] = true;
                cycle.push(cursor + 1);
                cursor = self.map[cursor];
                if cursor == start {
                    break;
                }
            }
            out.push('(');
            let labels: Vec<String> = cycle.iter().map(|l| l.to_string()).collect();
            if self.map.len() <= 9 {
                out.push_str(&labels.concat());
            } else {
                out.push_str(&labels.join(" "));
            }
            out.push(')');
        }
        out
    }

    /// Parses disjoint-cycle text into a permutation on `0..dim`.
    ///
    /// For dimensions up to 9 each digit inside a parenthesis group is a
    /// 1-based label, as in `(24)(37)(68)`; for larger dimensions labels are
    /// digit runs separated by spaces or commas. Empty text is the identity.
    pub fn from_cycles(text: &str, dim: usize) -> Result<Self> {
        let mut map: Vec<usize> = (0..dim).collect();
        let mut used = vec![false; dim];
        let trimmed = text.trim();
        let mut rest = trimmed;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::CycleNotation(format!("expected '(' in {rest:?}")))?;
            if !rest[..open].trim().is_empty() {
                return Err(Error::CycleNotation(format!(
                    "unexpected text {:?} before cycle",
                    &rest[..open]
                )));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::CycleNotation("unbalanced parenthesis".into()))?;
            if close < open {
                return Err(Error::CycleNotation("unbalanced parenthesis".into()));
            }
            let body = &rest[open + 1..close];
            let labels = parse_cycle_labels(body, dim)?;
            if labels.len() < 2 {
                return Err(Error::CycleNotation(format!(
                    "cycle ({body}) must name at least two elements"
                )));
            }
            for window in 0..labels.len() {
                let from = labels[window] - 1;
                let to = labels[(window + 1) % labels.len()] - 1;
                if used[from] {
                    return Err(Error::CycleNotation(format!(
                        "element {} appears in more than one cycle",
                        from + 1
                    )));
                }
                used[from] = true;
                map[from] = to;
            }
            rest = &rest[close + 1..];
        }
        Self::from_map(map)
    }
}

fn parse_cycle_labels(body: &str, dim: usize) -> Result<Vec<usize>> {
    let mut labels = Vec::new();
    if dim <= 9 {
        for ch in body.chars() {
            if ch.is_ascii_whitespace() || ch == ',' {
                continue;
            }
            let digit = ch
                .to_digit(10)
                .ok_or_else(|| Error::CycleNotation(format!("invalid label character {ch:?}")))?;
            labels.push(digit as usize);
        }
    } else {
        for token in body.split(|c: char| !c.is_ascii_digit()) {
            if token.is_empty() {
                continue;
            }
            let label: usize = token
                .parse()
                .map_err(|_| Error::CycleNotation(format!("invalid label {token:?}")))?;
            labels.push(label);
        }
    }
    for &label in &labels {
        if label == 0 || label > dim {
            return Err(Error::CycleNotation(format!(
                "label {label} outside 1..={dim}"
            )));
        }
    }
    let mut dedup = labels.clone();
    dedup.sort_unstable();
    dedup.dedup();
    if dedup.len() != labels.len() {
        return Err(Error::CycleNotation(format!("repeated label in ({body})")));
    }
    Ok(labels)
}

/// Operator product `outer * inner`: `inner` acts first.
pub fn compose(outer: &BasisPermutation, inner: &BasisPermutation) -> BasisPermutation {
    assert_eq!(outer.dim(), inner.dim(), "permutation dimensions must match");
    let map = (0..inner.dim()).map(|i| outer.map[inner.map[i]]).collect();
    BasisPermutation { map }
}

/// Conjugation `U rho U^dagger` of a diagonal state by a permutation unitary.
pub fn apply_permutation<T: Real>(
    state: &DiagonalState<T>,
    p: &BasisPermutation,
) -> Result<DiagonalState<T>> {
    if state.len() != p.dim() {
        return Err(Error::DimensionMismatch { left: state.len(), right: p.dim() });
    }
    let mut probs = vec![T::zero(); state.len()];
    for (i, &prob) in state.probs().iter().enumerate() {
        probs[p.image(i)] = prob;
    }
    Ok(DiagonalState { probs })
}

/// Smallest coprime pair `(a, b) != (0, 0)` with `a, b <= 2*max(dim)` such
/// that the permutation preserves `a*n_A + b*n_B` on every orbit, ordered by
/// `a + b` then `a`. `None` if no such pair exists in the search range.
pub fn conserved_number_combination<T: Real>(
    p: &BasisPermutation,
    params: &EngineParams<T>,
) -> Option<(u32, u32)> {
    assert_eq!(p.dim(), params.hilbert_dim(), "permutation must act on the product basis");
    let bound = 2 * params.dim_a().max(params.dim_b()) as u32;
    for total in 1..=2 * bound {
        for a in 0..=total.min(bound) {
            let b = total - a;
            if b > bound || gcd(a as usize, b as usize) != 1 {
                continue;
            }
            let conserved = (0..p.dim()).all(|i| {
                let (n, m) = params.levels(i);
                let (l, s) = params.levels(p.image(i));
                a as usize * n + b as usize * m == a as usize * l + b as usize * s
            });
            if conserved {
                return Some((a, b));
            }
        }
    }
    None
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
