//! Computational-basis conventions.
//!
//! Basis states of `n` qubits are indexed by integers `0..2^n`. Qubit `a`
//! (1-based) occupies bit `n - a` of the index, so qubit 1 is the most
//! significant bit and states are ordered lexicographically in the spins.
//! A spin `z_a = +1` maps to bit value 0 and `z_a = -1` to bit value 1:
//!
//! ```text
//! index 0       <-> (+1, +1, ..., +1)
//! index 2^n - 1 <-> (-1, -1, ..., -1)
//! ```
//!
//! Every dense operator, probability table and projector in this crate uses
//! this ordering.

/// Spin of qubit `a` (1-based) in basis state `index`.
#[inline]
pub fn spin(index: usize, a: usize, n: usize) -> i8 {
    debug_assert!(a >= 1 && a <= n);
    if index >> (n - a) & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Basis index reached from `index` by flipping qubit `a` (1-based).
#[inline]
pub fn flip(index: usize, a: usize, n: usize) -> usize {
    debug_assert!(a >= 1 && a <= n);
    index ^ (1 << (n - a))
}

/// Basis index of the state with the given spins (`spins[0]` is qubit 1).
#[inline]
pub fn index_of(spins: &[i8]) -> usize {
    let n = spins.len();
    let mut index = 0;
    for (k, &s) in spins.iter().enumerate() {
        if s < 0 {
            index |= 1 << (n - 1 - k);
        }
    }
    index
}

/// Spins of basis state `index` (element 0 is qubit 1).
pub fn spins_of(index: usize, n: usize) -> Vec<i8> {
    (1..=n).map(|a| spin(index, a, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_one_is_most_significant() {
        // n = 2: index 0b10 = 2 has qubit 1 down, qubit 2 up
        assert_eq!(spin(2, 1, 2), -1);
        assert_eq!(spin(2, 2, 2), 1);
    }

    #[test]
    fn index_spin_round_trip() {
        let n = 4;
        for index in 0..1 << n {
            assert_eq!(index_of(&spins_of(index, n)), index);
        }
    }

    #[test]
    fn flip_toggles_one_spin() {
        let n = 3;
        for index in 0..1 << n {
            for a in 1..=n {
                let flipped = flip(index, a, n);
                assert_eq!(spin(flipped, a, n), -spin(index, a, n));
                for other in (1..=n).filter(|&b| b != a) {
                    assert_eq!(spin(flipped, other, n), spin(index, other, n));
                }
            }
        }
    }
}
