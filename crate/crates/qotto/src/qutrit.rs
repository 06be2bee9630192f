//! The named two-qutrit transformations and the regime labels they define.

use crate::model::BasisPermutation;

/// Standard swap `|n m> -> |m n>`, cycle notation `(24)(37)(68)`.
pub fn swap() -> BasisPermutation {
    BasisPermutation::from_map(vec![0, 3, 6, 1, 4, 7, 2, 5, 8]).unwrap()
}

/// Idle swap that treats qudit B's outer levels as a qubit, `(34)(67)`.
pub fn idle_swap_b() -> BasisPermutation {
    BasisPermutation::from_map(vec![0, 1, 3, 2, 4, 6, 5, 7, 8]).unwrap()
}

/// Mirror idle swap acting on qudit A's outer levels, `(27)(38)`.
pub fn idle_swap_a() -> BasisPermutation {
    BasisPermutation::from_map(vec![0, 6, 7, 3, 4, 5, 1, 2, 8]).unwrap()
}

/// Double swap, the order-six composition of idle swap and swap, `(236874)`.
pub fn double_swap() -> BasisPermutation {
    BasisPermutation::from_map(vec![0, 2, 5, 1, 4, 7, 3, 6, 8]).unwrap()
}

/// Inverse double swap, the mirror regime's optimal stroke.
pub fn double_swap_inverse() -> BasisPermutation {
    double_swap().inverse()
}

/// Which of the six qutrit work strokes a permutation is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeLabel {
    Passive,
    Swap,
    IdleSwapB,
    IdleSwapA,
    DoubleSwap,
    DoubleSwapInverse,
}

impl RegimeLabel {
    pub const ALL: [RegimeLabel; 6] = [
        RegimeLabel::Passive,
        RegimeLabel::Swap,
        RegimeLabel::IdleSwapB,
        RegimeLabel::IdleSwapA,
        RegimeLabel::DoubleSwap,
        RegimeLabel::DoubleSwapInverse,
    ];

    /// Label of the same transformation with the qudit roles exchanged.
    pub fn swapped(self) -> Self {
        match self {
            RegimeLabel::Passive => RegimeLabel::Passive,
            RegimeLabel::Swap => RegimeLabel::Swap,
            RegimeLabel::IdleSwapB => RegimeLabel::IdleSwapA,
            RegimeLabel::IdleSwapA => RegimeLabel::IdleSwapB,
            RegimeLabel::DoubleSwap => RegimeLabel::DoubleSwapInverse,
            RegimeLabel::DoubleSwapInverse => RegimeLabel::DoubleSwap,
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            RegimeLabel::Passive => "Passive",
            RegimeLabel::Swap => "Swap",
            RegimeLabel::IdleSwapB => "IdleSwapB",
            RegimeLabel::IdleSwapA => "IdleSwapA",
            RegimeLabel::DoubleSwap => "DoubleSwap",
            RegimeLabel::DoubleSwapInverse => "DoubleSwapInverse",
        };
        f.write_str(name)
    }
}

/// The permutation a label names.
pub fn named(label: RegimeLabel) -> BasisPermutation {
    match label {
        RegimeLabel::Passive => BasisPermutation::identity(9),
        RegimeLabel::Swap => swap(),
        RegimeLabel::IdleSwapB => idle_swap_b(),
        RegimeLabel::IdleSwapA => idle_swap_a(),
        RegimeLabel::DoubleSwap => double_swap(),
        RegimeLabel::DoubleSwapInverse => double_swap_inverse(),
    }
}

/// Matches a permutation against the six named transformations.
pub fn classify(p: &BasisPermutation) -> Option<RegimeLabel> {
    RegimeLabel::ALL.into_iter().find(|&label| named(label) == *p)
}
