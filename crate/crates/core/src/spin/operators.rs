use crate::linalg::{CMatrix, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    E,
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::E, Axis::X, Axis::Y, Axis::Z];

    /// Element ⟨a|I_axis|b⟩ for single-spin states (0 = ↑, 1 = ↓); `E` is the identity.
    #[inline]
    pub fn element(self, a: usize, b: usize) -> C64 {
        match (self, a, b) {
            (Axis::E, a, b) if a == b => C64::new(1.0, 0.0),
            (Axis::X, a, b) if a != b => C64::new(0.5, 0.0),
            (Axis::Y, 0, 1) => C64::new(0.0, -0.5),
            (Axis::Y, 1, 0) => C64::new(0.0, 0.5),
            (Axis::Z, 0, 0) => C64::new(0.5, 0.0),
            (Axis::Z, 1, 1) => C64::new(-0.5, 0.0),
            _ => ZERO,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Axis::E => 'e',
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

/// `I_{k,axis}` embedded in the full `2^n` space.
pub fn single_spin_operator(n_spins: usize, spin: usize, axis: Axis) -> CMatrix {
    let dim = 1 << n_spins;
    let shift = n_spins - 1 - spin;
    let mask = !(1usize << shift);
    CMatrix::from_fn(dim, dim, |a, b| {
        if a & mask != b & mask {
            ZERO
        } else {
            axis.element((a >> shift) & 1, (b >> shift) & 1)
        }
    })
}
