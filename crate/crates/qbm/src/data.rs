//! Synthetic training distributions: Bernoulli mixtures over spin vectors.
//!
//! A mixture draws `M` random mode centers `s^k ∈ {±1}^n` and assigns each
//! state `v` the mass
//!
//! ```text
//! P^data_v = (1/M) Σ_k p^(n - d_k) (1-p)^(d_k)
//! ```
//!
//! where `d_k` is the Hamming distance from `v` to center `k` and `p` is the
//! per-spin alignment probability. The full `2^n` probability table is
//! produced exactly — training consumes distributions, not samples — and is
//! bit-reproducible from the seed via [`crate::rng::SplitMix64`]. Center
//! collisions are allowed and simply merge mass.

use crate::error::{Error, Result};
use crate::model::{SpinVector, VisibleDistribution};
use crate::rng::SplitMix64;

/// Specification of a Bernoulli mixture distribution.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    /// Number of spin variables.
    pub n: usize,
    /// Number of modes.
    pub modes: usize,
    /// Per-spin alignment probability, strictly inside `(0, 1)`.
    pub p: f64,
    pub seed: u64,
}

impl MixtureSpec {
    fn validate(&self) -> Result<()> {
        if self.modes < 1 {
            return Err(Error::InvalidParameter("mixture needs at least one mode".into()));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alignment probability must lie in (0, 1), got {}",
                self.p
            )));
        }
        if self.n > crate::DEFAULT_SIZE_GUARD {
            return Err(Error::SizeGuardExceeded {
                n_qubits: self.n,
                guard: crate::DEFAULT_SIZE_GUARD,
            });
        }
        Ok(())
    }
}

/// The randomly drawn mode centers of a mixture.
#[derive(Debug, Clone)]
pub struct ModeCenters {
    centers: Vec<SpinVector>,
}

impl ModeCenters {
    pub fn centers(&self) -> &[SpinVector] {
        &self.centers
    }
}

/// Labeled variant: the mixture runs over inputs, and each mode is paired
/// deterministically with a binary label on the output bits.
#[derive(Debug, Clone)]
pub struct LabeledJointSpec {
    pub mixture: MixtureSpec,
    /// Number of output bits.
    pub label_width: usize,
    /// Label of each mode; defaults to the mode index when `None`.
    pub labels: Option<Vec<u64>>,
}

/// Number of positions where two equal-length spin vectors disagree.
pub fn hamming_distance(u: &SpinVector, v: &SpinVector) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    Ok(u.spins()
        .iter()
        .zip(v.spins())
        .filter(|(a, b)| a != b)
        .count())
}

/// Draws the mode centers: one spin per variable per mode, in mode-major
/// order, from a SplitMix64 stream seeded with `spec.seed`.
fn draw_centers(spec: &MixtureSpec) -> ModeCenters {
    let mut rng = SplitMix64::new(spec.seed);
    let centers = (0..spec.modes)
        .map(|_| {
            let spins: Vec<i8> = (0..spec.n).map(|_| rng.next_spin()).collect();
            SpinVector::new(spins).expect("spins are ±1 by construction")
        })
        .collect();
    ModeCenters { centers }
}

/// Builds the exact Bernoulli-mixture probability table and its centers.
pub fn bernoulli_mixture(spec: &MixtureSpec) -> Result<(VisibleDistribution, ModeCenters)> {
    spec.validate()?;
    let centers = draw_centers(spec);
    let dim = 1usize << spec.n;
    let mut probs = vec![0.0; dim];
    let weight = 1.0 / spec.modes as f64;
    for center in centers.centers() {
        for (index, slot) in probs.iter_mut().enumerate() {
            let v = SpinVector::from_index(index, spec.n);
            let d = hamming_distance(&v, center)?;
            *slot += weight * spec.p.powi((spec.n - d) as i32) * (1.0 - spec.p).powi(d as i32);
        }
    }
    Ok((VisibleDistribution::new(spec.n, probs)?, centers))
}

/// Spin encoding of a label: bit 1 maps to spin `+1`, bit 0 to `-1`, with
/// the most significant label bit on the lowest-numbered output qubit.
pub fn label_spins(label: u64, width: usize) -> SpinVector {
    let spins: Vec<i8> = (0..width)
        .map(|k| {
            if label >> (width - 1 - k) & 1 == 1 {
                1
            } else {
                -1
            }
        })
        .collect();
    SpinVector::new(spins).expect("spins are ±1 by construction")
}

/// Joint distribution over `[x, y]` pairing each mode's Bernoulli mass over
/// the inputs with its label's spin encoding on the outputs.
///
/// Marginalizing over the outputs recovers [`bernoulli_mixture`] of the
/// input spec exactly.
pub fn labeled_mixture(spec: &LabeledJointSpec) -> Result<(VisibleDistribution, ModeCenters)> {
    spec.mixture.validate()?;
    let n = spec.mixture.n;
    let width = spec.label_width;
    if n + width > crate::DEFAULT_SIZE_GUARD {
        return Err(Error::SizeGuardExceeded {
            n_qubits: n + width,
            guard: crate::DEFAULT_SIZE_GUARD,
        });
    }
    let labels: Vec<u64> = match &spec.labels {
        Some(labels) => {
            if labels.len() != spec.mixture.modes {
                return Err(Error::LengthMismatch {
                    expected: spec.mixture.modes,
                    got: labels.len(),
                });
            }
            labels.clone()
        }
        None => (0..spec.mixture.modes as u64).collect(),
    };
    for &label in &labels {
        if width < 64 && label >= 1u64 << width {
            return Err(Error::LabelWidthExceeded { label, width });
        }
    }
    let centers = draw_centers(&spec.mixture);
    let dim = 1usize << (n + width);
    let out_dim = 1usize << width;
    let mut probs = vec![0.0; dim];
    let weight = 1.0 / spec.mixture.modes as f64;
    for (center, &label) in centers.centers().iter().zip(&labels) {
        let y_index = label_spins(label, width).index();
        for x_index in 0..1usize << n {
            let v = SpinVector::from_index(x_index, n);
            let d = hamming_distance(&v, center)?;
            let mass =
                weight * spec.mixture.p.powi((n - d) as i32) * (1.0 - spec.mixture.p).powi(d as i32);
            probs[x_index * out_dim + y_index] += mass;
        }
    }
    Ok((VisibleDistribution::new(n + width, probs)?, centers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hamming_basics() {
        let u = SpinVector::new(vec![1, -1, 1]).unwrap();
        let v = SpinVector::new(vec![1, 1, 1]).unwrap();
        assert_eq!(hamming_distance(&u, &u).unwrap(), 0);
        assert_eq!(hamming_distance(&u, &v).unwrap(), 1);
        let w = SpinVector::new(vec![-1, 1, -1]).unwrap();
        assert_eq!(hamming_distance(&u, &w).unwrap(), 3);
        let short = SpinVector::new(vec![1]).unwrap();
        assert!(hamming_distance(&u, &short).is_err());
    }

    #[test]
    fn single_mode_product_table() {
        // center (+1,+1), p = 0.9: P = (0.81, 0.09, 0.09, 0.01)
        let spec = MixtureSpec {
            n: 2,
            modes: 1,
            p: 0.9,
            seed: 3,
        };
        let (dist, centers) = bernoulli_mixture(&spec).unwrap();
        let c = &centers.centers()[0];
        let expected_at_center = 0.81;
        assert_relative_eq!(dist.prob_of(c), expected_at_center, max_relative = 1e-12);
        assert_relative_eq!(dist.prob_of(&c.negated()), 0.01, max_relative = 1e-12);
        let sum: f64 = dist.probabilities().iter().sum();
        assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mass_concentrates_near_sharp_center() {
        let spec = MixtureSpec {
            n: 6,
            modes: 1,
            p: 0.999,
            seed: 11,
        };
        let (dist, centers) = bernoulli_mixture(&spec).unwrap();
        let at_center = dist.prob_of(&centers.centers()[0]);
        assert_relative_eq!(at_center, 0.999f64.powi(6), max_relative = 1e-12);
        assert!(at_center > 0.99);
    }

    #[test]
    fn tables_normalize_for_many_specs() {
        for seed in 0..20 {
            let spec = MixtureSpec {
                n: 5,
                modes: 8,
                p: 0.9,
                seed,
            };
            let (dist, _) = bernoulli_mixture(&spec).unwrap();
            let sum: f64 = dist.probabilities().iter().sum();
            assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn identical_seeds_identical_tables() {
        let spec = MixtureSpec {
            n: 6,
            modes: 4,
            p: 0.85,
            seed: 1234,
        };
        let (a, ca) = bernoulli_mixture(&spec).unwrap();
        let (b, cb) = bernoulli_mixture(&spec).unwrap();
        assert_eq!(a.probabilities(), b.probabilities());
        assert_eq!(ca.centers(), cb.centers());
    }

    #[test]
    fn exchangeability_under_index_permutation() {
        // permuting variables and centers identically permutes the table;
        // reversing the variable order is such a permutation
        let spec = MixtureSpec {
            n: 4,
            modes: 3,
            p: 0.8,
            seed: 77,
        };
        let (dist, centers) = bernoulli_mixture(&spec).unwrap();
        for index in 0..1usize << spec.n {
            let v = SpinVector::from_index(index, spec.n);
            let reversed: Vec<i8> = v.spins().iter().rev().copied().collect();
            let rev_index = SpinVector::new(reversed).unwrap().index();
            // recompute the reversed-center mixture mass by hand
            let mut mass = 0.0;
            for c in centers.centers() {
                let rev_c: Vec<i8> = c.spins().iter().rev().copied().collect();
                let d = hamming_distance(
                    &SpinVector::from_index(rev_index, spec.n),
                    &SpinVector::new(rev_c).unwrap(),
                )
                .unwrap();
                mass += spec.p.powi((spec.n - d) as i32) * (1.0 - spec.p).powi(d as i32)
                    / spec.modes as f64;
            }
            assert_relative_eq!(dist.prob(index), mass, max_relative = 1e-12);
        }
    }

    #[test]
    fn spin_flip_symmetry() {
        // flipping all centers mirrors the table under v -> -v
        let spec = MixtureSpec {
            n: 5,
            modes: 2,
            p: 0.9,
            seed: 5,
        };
        let (dist, centers) = bernoulli_mixture(&spec).unwrap();
        for index in 0..1usize << spec.n {
            let v = SpinVector::from_index(index, spec.n);
            let mut mass = 0.0;
            for c in centers.centers() {
                let d = hamming_distance(&v.negated(), &c.negated()).unwrap();
                mass += spec.p.powi((spec.n - d) as i32) * (1.0 - spec.p).powi(d as i32)
                    / spec.modes as f64;
            }
            assert_relative_eq!(dist.prob(index), mass, max_relative = 1e-12);
        }
    }

    #[test]
    fn label_spin_encoding() {
        // label 5 = 0b101 over width 3: qubit 1 (MSB) +1, qubit 2 -1, qubit 3 +1
        let spins = label_spins(5, 3);
        assert_eq!(spins.spins(), &[1, -1, 1]);
        assert_eq!(label_spins(0, 2).spins(), &[-1, -1]);
    }

    #[test]
    fn labeled_marginal_recovers_mixture() {
        let spec = LabeledJointSpec {
            mixture: MixtureSpec {
                n: 5,
                modes: 8,
                p: 0.9,
                seed: 21,
            },
            label_width: 3,
            labels: None,
        };
        let (joint, centers) = labeled_mixture(&spec).unwrap();
        let (plain, plain_centers) = bernoulli_mixture(&spec.mixture).unwrap();
        assert_eq!(centers.centers(), plain_centers.centers());
        let marginal = joint.marginal_over_leading(5);
        for i in 0..32 {
            assert_relative_eq!(marginal.prob(i), plain.prob(i), epsilon = 1e-12);
        }
    }

    #[test]
    fn labeled_conditional_concentrates_on_mode_label() {
        let spec = LabeledJointSpec {
            mixture: MixtureSpec {
                n: 6,
                modes: 2,
                p: 0.9,
                seed: 8,
            },
            label_width: 1,
            labels: Some(vec![0, 1]),
        };
        let (joint, centers) = labeled_mixture(&spec).unwrap();
        // P(y = label_0 | x = center_0) from Bayes on the mixture masses
        let c0 = &centers.centers()[0];
        let c1 = &centers.centers()[1];
        let n = 6;
        let p = 0.9;
        let d01 = hamming_distance(c0, c1).unwrap();
        let m0 = p.powi(n);
        let m1 = p.powi((n as i32) - d01 as i32) * (1.0 - p).powi(d01 as i32);
        let expected = m0 / (m0 + m1);
        let cond = joint.conditional_of_trailing(c0.index(), 6).unwrap();
        let y0 = label_spins(0, 1).index();
        assert_relative_eq!(cond.prob(y0), expected, max_relative = 1e-10);
        assert!(cond.prob(y0) >= p.powi(n) / (p.powi(n) + (1.0 - p).powi(n)));
    }

    #[test]
    fn single_mode_label_is_point_mass_for_every_input() {
        let spec = LabeledJointSpec {
            mixture: MixtureSpec {
                n: 4,
                modes: 1,
                p: 0.8,
                seed: 31,
            },
            label_width: 2,
            labels: Some(vec![3]),
        };
        let (joint, _) = labeled_mixture(&spec).unwrap();
        let y3 = label_spins(3, 2).index();
        for x in 0..16 {
            let cond = joint.conditional_of_trailing(x, 4).unwrap();
            assert_relative_eq!(cond.prob(y3), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn label_width_validation() {
        let spec = LabeledJointSpec {
            mixture: MixtureSpec {
                n: 3,
                modes: 5,
                p: 0.9,
                seed: 1,
            },
            label_width: 2,
            labels: None,
        };
        assert!(matches!(
            labeled_mixture(&spec),
            Err(Error::LabelWidthExceeded { label: 4, width: 2 })
        ));
    }
}
