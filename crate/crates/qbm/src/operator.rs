//! Dense real-symmetric operator algebra on `2^n`-dimensional spaces.
//!
//! Transverse-field Ising Hamiltonians contain only `σˣ` and `σᶻ` terms, so
//! every operator handled here — Hamiltonians, Gibbs operators `e^{-H}`,
//! density matrices, projectors and observables — is real and symmetric.
//! Working over the reals halves memory traffic and roughly doubles
//! eigensolver throughput compared to a complex Hermitian representation.
//!
//! The non-trivial pieces are [`gibbs_operator`], which exponentiates `-H`
//! through its spectral decomposition with an overflow-guarding spectral
//! shift, and [`frechet_gibbs_trace`], which evaluates directional
//! derivatives `Tr[Λ ∂e^{-H}]` in closed form through the divided-difference
//! (Loewner) kernel of the exponential. The latter is what makes exact
//! log-likelihood gradients possible: `∂e^{-H}` cannot be written as
//! `-e^{-H} ∂H` once `H` and `∂H` stop commuting.

use faer::{Mat, MatRef, Side};

use crate::basis;
use crate::error::{Error, Result};
use crate::model::SpinVector;
use crate::DEFAULT_SIZE_GUARD;

/// Relative asymmetry tolerance for [`DenseSymmetricOperator`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Eigenvalue-gap threshold below which the Loewner kernel switches from the
/// divided difference to its derivative limit.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// A dense real symmetric matrix on the `2^n`-dimensional state space.
///
/// Invariants enforced at construction: the matrix is square, its dimension
/// is a power of two, and the relative asymmetry
/// `max|A - Aᵀ| / max(1, max|A|)` is at most [`SYMMETRY_TOLERANCE`].
#[derive(Debug, Clone)]
pub struct DenseSymmetricOperator {
    mat: Mat<f64>,
}

impl DenseSymmetricOperator {
    /// Validates and wraps a dense matrix.
    pub fn from_matrix(mat: Mat<f64>) -> Result<Self> {
        let (rows, cols) = (mat.nrows(), mat.ncols());
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if !rows.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { dim: rows });
        }
        let mut max_abs = 0.0f64;
        let mut max_asym = 0.0f64;
        for j in 0..cols {
            for i in 0..=j {
                let a = mat[(i, j)];
                let b = mat[(j, i)];
                max_abs = max_abs.max(a.abs()).max(b.abs());
                max_asym = max_asym.max((a - b).abs());
            }
        }
        if max_asym > SYMMETRY_TOLERANCE * max_abs.max(1.0) {
            return Err(Error::NotSymmetric {
                asymmetry: max_asym / max_abs.max(1.0),
            });
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix that is symmetric by construction.
    pub(crate) fn from_symmetric_unchecked(mat: Mat<f64>) -> Self {
        debug_assert!(mat.nrows() == mat.ncols());
        Self { mat }
    }

    /// Identity on `n_qubits` qubits.
    pub fn identity(n_qubits: usize) -> Result<Self> {
        ensure_guard(n_qubits, DEFAULT_SIZE_GUARD)?;
        let dim = 1 << n_qubits;
        Ok(Self::from_symmetric_unchecked(Mat::identity(dim, dim)))
    }

    pub fn dimension(&self) -> usize {
        self.mat.nrows()
    }

    /// Number of qubits, `log2` of the dimension.
    pub fn n_qubits(&self) -> usize {
        self.mat.nrows().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.mat.as_ref()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dimension()).map(|i| self.mat[(i, i)]).sum()
    }

    /// `self * factor`.
    pub fn scale(&self, factor: f64) -> Self {
        Self::from_symmetric_unchecked(faer::Scale(factor) * &self.mat)
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        Ok(Self::from_symmetric_unchecked(&self.mat + &other.mat))
    }
}

fn ensure_guard(n_qubits: usize, guard: usize) -> Result<()> {
    if n_qubits > guard {
        return Err(Error::SizeGuardExceeded { n_qubits, guard });
    }
    Ok(())
}

/// The two Pauli flavors that occur in a transverse-field Ising model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliKind {
    X,
    Z,
}

/// `n`-fold tensor product with identity everywhere except qubit `a`
/// (1-based), which carries the chosen Pauli matrix.
///
/// `Z` gives the diagonal matrix of spins of qubit `a`; `X` gives the
/// symmetric permutation matrix that flips qubit `a`.
pub fn pauli_operator(kind: PauliKind, a: usize, n: usize) -> Result<DenseSymmetricOperator> {
    ensure_guard(n, DEFAULT_SIZE_GUARD)?;
    if a < 1 || a > n {
        return Err(Error::IndexOutOfRange {
            index: a,
            n_qubits: n,
        });
    }
    let dim = 1usize << n;
    let mut mat = Mat::<f64>::zeros(dim, dim);
    match kind {
        PauliKind::Z => {
            for i in 0..dim {
                mat[(i, i)] = basis::spin(i, a, n) as f64;
            }
        }
        PauliKind::X => {
            for i in 0..dim {
                mat[(i, basis::flip(i, a, n))] = 1.0;
            }
        }
    }
    Ok(DenseSymmetricOperator::from_symmetric_unchecked(mat))
}

/// Eigendecomposition of a symmetric operator.
///
/// Eigenvalues are ascending; eigenvector `j` is column `j` of
/// [`eigenvectors`](Self::eigenvectors). The decomposition is deterministic
/// for identical inputs and a fixed parallelism setting.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> MatRef<'_, f64> {
        self.eigenvectors.as_ref()
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(λ) Vᵀ`, for reconstruction checks.
    pub fn reconstruct(&self) -> Mat<f64> {
        let v = &self.eigenvectors;
        let scaled = scale_columns(v.as_ref(), &self.eigenvalues);
        &scaled * v.transpose()
    }
}

/// Column `j` of the result is `values[j]` times column `j` of `m`.
pub(crate) fn scale_columns(m: MatRef<'_, f64>, values: &[f64]) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * values[j])
}

/// Row `i` of the result is `values[i]` times row `i` of `m`.
pub(crate) fn scale_rows(m: MatRef<'_, f64>, values: &[f64]) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| values[i] * m[(i, j)])
}

/// Full eigendecomposition of a symmetric operator.
pub fn spectral_decompose(op: &DenseSymmetricOperator) -> Result<SpectralDecomposition> {
    let evd = op
        .matrix()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigensolverFailure)?;
    let eigenvalues: Vec<f64> = (0..op.dimension()).map(|i| evd.S()[i]).collect();
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigensolverFailure);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: evd.U().to_owned(),
    })
}

/// Eigenvalues only; cheaper than [`spectral_decompose`] when no expectation
/// values are needed (bound-loss line searches, partition functions).
pub fn spectral_values(op: &DenseSymmetricOperator) -> Result<Vec<f64>> {
    let values = op
        .matrix()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigensolverFailure)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigensolverFailure);
    }
    Ok(values)
}

/// The Gibbs operator `e^{-H}` in spectrally shifted form.
///
/// Trained parameter magnitudes push eigenvalues far enough that `e^{-λ}`
/// overflows, so the exponential is taken after subtracting the smallest
/// eigenvalue: `scaled = e^{-(H - λ_min I)}` with every entry magnitude at
/// most the dimension, and `e^{-H} = e^{-λ_min} · scaled`. The shift
/// `λ_min` is reported by [`spectral_shift`](Self::spectral_shift), and all
/// probability ratios can be formed from `scaled` alone.
#[derive(Debug, Clone)]
pub struct GibbsOperator {
    scaled: DenseSymmetricOperator,
    spectral_shift: f64,
    scaled_trace: f64,
}

impl GibbsOperator {
    pub(crate) fn from_decomposition(decomp: &SpectralDecomposition) -> Self {
        let shift = decomp
            .eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0);
        let weights: Vec<f64> = decomp
            .eigenvalues()
            .iter()
            .map(|l| (-(l - shift)).exp())
            .collect();
        let v = decomp.eigenvectors();
        let scaled = scale_columns(v, &weights);
        let mut mat = &scaled * v.transpose();
        // matmul round-off breaks exact symmetry at the 1e-16 level
        symmetrize(&mut mat);
        GibbsOperator {
            scaled: DenseSymmetricOperator::from_symmetric_unchecked(mat),
            spectral_shift: shift,
            scaled_trace: weights.iter().sum(),
        }
    }

    /// `e^{-(H - λ_min I)}`.
    pub fn scaled(&self) -> &DenseSymmetricOperator {
        &self.scaled
    }

    /// The subtracted eigenvalue `λ_min`.
    pub fn spectral_shift(&self) -> f64 {
        self.spectral_shift
    }

    /// `log Tr[e^{-H}]`, always finite.
    pub fn log_partition(&self) -> f64 {
        -self.spectral_shift + self.scaled_trace.ln()
    }

    /// `Z = Tr[e^{-H}]`; overflows to `+inf` when `log_partition > ~709`.
    pub fn partition(&self) -> f64 {
        self.log_partition().exp()
    }

    /// The unshifted `e^{-H}`; entries overflow for strongly shifted spectra.
    pub fn exp_neg_h(&self) -> Mat<f64> {
        faer::Scale((-self.spectral_shift).exp()) * self.scaled.matrix()
    }

    /// The density matrix `ρ = e^{-H} / Z`, shift-free.
    pub fn density(&self) -> DenseSymmetricOperator {
        self.scaled.scale(1.0 / self.scaled_trace)
    }
}

fn symmetrize(mat: &mut Mat<f64>) {
    let n = mat.nrows();
    for j in 0..n {
        for i in 0..j {
            let avg = 0.5 * (mat[(i, j)] + mat[(j, i)]);
            mat[(i, j)] = avg;
            mat[(j, i)] = avg;
        }
    }
}

/// Exponentiates `-H` through its spectral decomposition.
///
/// Returns the shifted Gibbs operator; `Tr ρ = 1` holds exactly up to
/// round-off for the density matrix formed from it.
pub fn gibbs_operator(h: &DenseSymmetricOperator) -> Result<GibbsOperator> {
    let decomp = spectral_decompose(h)?;
    Ok(GibbsOperator::from_decomposition(&decomp))
}

/// Diagonal 0/1 projector fixing a subset of qubits to definite spins.
///
/// As a matrix it is diagonal with entry 1 exactly on basis states that agree
/// with every clamped spin, hence idempotent with trace `2^(n - k)` for `k`
/// clamped qubits. The empty subset gives the identity.
#[derive(Debug, Clone)]
pub struct Projector {
    n_qubits: usize,
    clamps: Vec<(usize, i8)>,
}

impl Projector {
    /// Builds a projector from `(qubit, spin)` clamps (qubits 1-based).
    pub fn new(n_qubits: usize, clamps: &[(usize, i8)]) -> Result<Self> {
        let mut seen = vec![false; n_qubits + 1];
        for &(q, s) in clamps {
            if q < 1 || q > n_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    n_qubits,
                });
            }
            if s != 1 && s != -1 {
                return Err(Error::InvalidSpin { value: s as i64 });
            }
            if seen[q] {
                return Err(Error::DuplicateClamp { index: q });
            }
            seen[q] = true;
        }
        Ok(Self {
            n_qubits,
            clamps: clamps.to_vec(),
        })
    }

    /// Identity projector (empty clamp set).
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            clamps: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn clamps(&self) -> &[(usize, i8)] {
        &self.clamps
    }

    /// Whether basis state `index` survives the projection.
    #[inline]
    pub fn selects(&self, index: usize) -> bool {
        self.clamps
            .iter()
            .all(|&(q, s)| basis::spin(index, q, self.n_qubits) == s)
    }

    /// Trace of the projector: `2^(n - #clamps)`.
    pub fn trace(&self) -> usize {
        1 << (self.n_qubits - self.clamps.len())
    }

    /// The diagonal as a 0/1 vector.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..1usize << self.n_qubits)
            .map(|i| if self.selects(i) { 1.0 } else { 0.0 })
            .collect()
    }

    /// Dense matrix form.
    pub fn to_operator(&self) -> DenseSymmetricOperator {
        let dim = 1usize << self.n_qubits;
        let mut mat = Mat::<f64>::zeros(dim, dim);
        for i in 0..dim {
            if self.selects(i) {
                mat[(i, i)] = 1.0;
            }
        }
        DenseSymmetricOperator::from_symmetric_unchecked(mat)
    }

    /// `Tr[Λ M]` — the sum of selected diagonal entries of `m`.
    pub fn masked_trace(&self, m: MatRef<'_, f64>) -> f64 {
        (0..m.nrows())
            .filter(|&i| self.selects(i))
            .map(|i| m[(i, i)])
            .sum()
    }
}

/// Projector onto basis states whose leading qubits carry the spins of `v`.
///
/// Qubits `1..=v.len()` are clamped; trailing qubits are free. The empty
/// spin vector yields the identity.
pub fn visible_projector(v: &SpinVector, n: usize) -> Result<Projector> {
    if v.len() > n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let clamps: Vec<(usize, i8)> = v
        .spins()
        .iter()
        .enumerate()
        .map(|(k, &s)| (k + 1, s))
        .collect();
    Projector::new(n, &clamps)
}

/// Divided-difference (Loewner) kernel of `λ -> e^{-λ}` over shifted
/// exponentials `weights[i] = e^{-(λ_i - shift)}`:
///
/// ```text
/// Φ_ij = (w_i - w_j) / (λ_i - λ_j)    for separated eigenvalues,
/// Φ_ij = -w_i                          below the degeneracy threshold.
/// ```
///
/// The divided difference loses all significant digits as the gap closes, so
/// gaps under `1e-9 · max(1, |λ_i|)` use the derivative limit instead.
pub(crate) fn loewner_kernel(eigenvalues: &[f64], weights: &[f64]) -> Mat<f64> {
    let n = eigenvalues.len();
    Mat::from_fn(n, n, |i, j| {
        let gap = eigenvalues[i] - eigenvalues[j];
        if gap.abs() < DEGENERACY_THRESHOLD * eigenvalues[i].abs().max(1.0) {
            -weights[i]
        } else {
            (weights[i] - weights[j]) / gap
        }
    })
}

/// Shifted directional-derivative trace: given the decomposition of `H` and
/// weights `w_i = e^{-(λ_i - shift)}`, returns
/// `e^{shift} · Σ_k mask_k · [∂e^{-H}(E)]_kk`.
pub(crate) fn frechet_masked_trace_shifted(
    decomp: &SpectralDecomposition,
    weights: &[f64],
    direction: MatRef<'_, f64>,
    mask: &[f64],
) -> f64 {
    let v = decomp.eigenvectors();
    // direction in the eigenbasis
    let dir_eig = v.transpose() * &(direction * v);
    let kernel = loewner_kernel(decomp.eigenvalues(), weights);
    let prod = Mat::from_fn(dir_eig.nrows(), dir_eig.ncols(), |i, j| {
        dir_eig[(i, j)] * kernel[(i, j)]
    });
    // diag(V · prod · Vᵀ) restricted to the mask
    let m = v * &prod;
    let mut total = 0.0;
    for k in 0..m.nrows() {
        if mask[k] != 0.0 {
            let mut diag = 0.0;
            for j in 0..m.ncols() {
                diag += m[(k, j)] * v[(k, j)];
            }
            total += mask[k] * diag;
        }
    }
    total
}

/// Closed-form directional derivative trace `Tr[Λ ∂e^{-H}]` for the
/// perturbation `∂H = E`.
///
/// Works in the eigenbasis of `H`: the derivative of the exponential is the
/// Hadamard product of `Vᵀ E V` with the Loewner kernel of `e^{-λ}`, which
/// evaluates the imaginary-time integral
/// `∂e^{-H} = -∫₀¹ e^{-τH} E e^{-(1-τ)H} dτ` exactly. With `Λ = I` the
/// result collapses to the trace identity `-Tr[E e^{-H}]`.
pub fn frechet_gibbs_trace(
    h: &DenseSymmetricOperator,
    direction: &DenseSymmetricOperator,
    projector: &Projector,
) -> Result<f64> {
    if h.dimension() != direction.dimension() {
        return Err(Error::DimensionMismatch {
            left: h.dimension(),
            right: direction.dimension(),
        });
    }
    if 1usize << projector.n_qubits() != h.dimension() {
        return Err(Error::DimensionMismatch {
            left: h.dimension(),
            right: 1usize << projector.n_qubits(),
        });
    }
    let decomp = spectral_decompose(h)?;
    let shift = decomp.eigenvalues().first().copied().unwrap_or(0.0);
    let weights: Vec<f64> = decomp
        .eigenvalues()
        .iter()
        .map(|l| (-(l - shift)).exp())
        .collect();
    let mask = projector.diagonal();
    let shifted =
        frechet_masked_trace_shifted(&decomp, &weights, direction.matrix(), &mask);
    Ok((-shift).exp() * shifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use faer::Mat;

    fn operator_from(entries: &[&[f64]]) -> DenseSymmetricOperator {
        let n = entries.len();
        DenseSymmetricOperator::from_matrix(Mat::from_fn(n, n, |i, j| entries[i][j])).unwrap()
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let mat = Mat::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { 1.0 } else { 0.0 });
        assert!(matches!(
            DenseSymmetricOperator::from_matrix(mat),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn rejects_non_power_of_two() {
        let mat = Mat::<f64>::zeros(3, 3);
        assert!(matches!(
            DenseSymmetricOperator::from_matrix(mat),
            Err(Error::NotPowerOfTwo { dim: 3 })
        ));
    }

    #[test]
    fn pauli_z_single_qubit() {
        let z = pauli_operator(PauliKind::Z, 1, 1).unwrap();
        assert_eq!(z.entry(0, 0), 1.0);
        assert_eq!(z.entry(1, 1), -1.0);
        assert_eq!(z.entry(0, 1), 0.0);
    }

    #[test]
    fn pauli_z_on_first_of_two_qubits() {
        let z = pauli_operator(PauliKind::Z, 1, 2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| z.entry(i, i)).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn pauli_x_on_second_of_two_qubits() {
        // explicit 4x4 Kronecker product I ⊗ σx swaps 0<->1 and 2<->3
        let x = pauli_operator(PauliKind::X, 2, 2).unwrap();
        let mut expected = Mat::<f64>::zeros(4, 4);
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            expected[(i, j)] = 1.0;
        }
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(x.entry(i, j), expected[(i, j)], "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn pauli_index_out_of_range() {
        assert!(pauli_operator(PauliKind::X, 3, 2).is_err());
        assert!(pauli_operator(PauliKind::Z, 0, 2).is_err());
    }

    #[test]
    fn pauli_size_guard() {
        assert!(matches!(
            pauli_operator(PauliKind::Z, 1, 15),
            Err(Error::SizeGuardExceeded { .. })
        ));
    }

    #[test]
    fn paulis_anticommute_on_same_qubit_commute_across() {
        let n = 3;
        for a in 1..=n {
            let x = pauli_operator(PauliKind::X, a, n).unwrap();
            for b in 1..=n {
                let z = pauli_operator(PauliKind::Z, b, n).unwrap();
                let xz = x.matrix() * z.matrix();
                let zx = z.matrix() * x.matrix();
                for i in 0..1 << n {
                    for j in 0..1 << n {
                        let sum = xz[(i, j)] + zx[(i, j)];
                        let diff = xz[(i, j)] - zx[(i, j)];
                        if a == b {
                            assert!(sum.abs() < 1e-12, "anticommutator at ({i},{j})");
                        } else {
                            assert!(diff.abs() < 1e-12, "commutator at ({i},{j})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spectral_decompose_diagonal() {
        let op = operator_from(&[&[3.0, 0.0], &[0.0, 1.0]]);
        let d = spectral_decompose(&op).unwrap();
        assert_relative_eq!(d.eigenvalues()[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(d.eigenvalues()[1], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn spectral_decompose_pauli_x() {
        let x = pauli_operator(PauliKind::X, 1, 1).unwrap();
        let d = spectral_decompose(&x).unwrap();
        assert_relative_eq!(d.eigenvalues()[0], -1.0, max_relative = 1e-12);
        assert_relative_eq!(d.eigenvalues()[1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn spectral_decompose_single_qubit_closed_form() {
        // H = -3 σx - 4 σz has eigenvalues ∓sqrt(3² + 4²) = ∓5
        let h = operator_from(&[&[-4.0, -3.0], &[-3.0, 4.0]]);
        let d = spectral_decompose(&h).unwrap();
        assert_relative_eq!(d.eigenvalues()[0], -5.0, max_relative = 1e-12);
        assert_relative_eq!(d.eigenvalues()[1], 5.0, max_relative = 1e-12);
    }

    #[test]
    fn spectral_reconstruction_and_orthonormality() {
        let mut rng = crate::rng::SplitMix64::new(41);
        for _ in 0..20 {
            let dim = 8;
            let raw = Mat::from_fn(dim, dim, |_, _| rng.uniform(-2.0, 2.0));
            let sym = (&raw + raw.transpose()) * faer::Scale(0.5);
            let op = DenseSymmetricOperator::from_matrix(sym.clone()).unwrap();
            let d = spectral_decompose(&op).unwrap();
            let rec = d.reconstruct();
            let vtv = d.eigenvectors().transpose() * d.eigenvectors();
            let mut max_rec = 0.0f64;
            let mut max_orth = 0.0f64;
            let mut frob = 0.0f64;
            for i in 0..dim {
                for j in 0..dim {
                    max_rec = max_rec.max((rec[(i, j)] - sym[(i, j)]).abs());
                    frob += sym[(i, j)] * sym[(i, j)];
                    let id = if i == j { 1.0 } else { 0.0 };
                    max_orth = max_orth.max((vtv[(i, j)] - id).abs());
                }
            }
            assert!(max_rec / frob.sqrt() < 1e-10);
            assert!(max_orth < 1e-10);
        }
    }

    #[test]
    fn gibbs_of_zero_hamiltonian() {
        let h = DenseSymmetricOperator::from_matrix(Mat::<f64>::zeros(2, 2)).unwrap();
        let g = gibbs_operator(&h).unwrap();
        assert_relative_eq!(g.partition(), 2.0, max_relative = 1e-12);
        let e = g.exp_neg_h();
        assert_relative_eq!(e[(0, 0)], 1.0, max_relative = 1e-12);
        assert_relative_eq!(e[(1, 1)], 1.0, max_relative = 1e-12);
        assert!(e[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn gibbs_transverse_field_partition() {
        // H = -Γ σx with Γ = 1: Z = 2 cosh(1)
        let h = operator_from(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        let g = gibbs_operator(&h).unwrap();
        assert_relative_eq!(g.partition(), 2.0 * 1.0f64.cosh(), max_relative = 1e-12);
    }

    #[test]
    fn gibbs_classical_two_state() {
        // H = -b σz with b = 1: diagonal ρ = (e, e^{-1}) / (2 cosh 1)
        let h = operator_from(&[&[-1.0, 0.0], &[0.0, 1.0]]);
        let g = gibbs_operator(&h).unwrap();
        let z = 2.0 * 1.0f64.cosh();
        assert_relative_eq!(g.partition(), z, max_relative = 1e-12);
        let rho = g.density();
        assert_relative_eq!(rho.entry(0, 0), 1.0f64.exp() / z, max_relative = 1e-12);
        assert_relative_eq!(rho.entry(1, 1), (-1.0f64).exp() / z, max_relative = 1e-12);
        assert_relative_eq!(rho.trace(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn gibbs_shift_guards_overflow() {
        // eigenvalues near -1000 would overflow without the spectral shift
        let h = operator_from(&[&[-1000.0, 0.0], &[0.0, -998.0]]);
        let g = gibbs_operator(&h).unwrap();
        assert_eq!(g.spectral_shift(), -1000.0);
        let expected = 1000.0 + (1.0 + (-2.0f64).exp()).ln();
        assert_relative_eq!(g.log_partition(), expected, max_relative = 1e-12);
        assert!(g.scaled().entry(0, 0).is_finite());
    }

    #[test]
    fn density_trace_is_one_on_random_models() {
        let mut rng = crate::rng::SplitMix64::new(7);
        for _ in 0..200 {
            let dim = 16;
            let raw = Mat::from_fn(dim, dim, |_, _| rng.uniform(-3.0, 3.0));
            let sym = (&raw + raw.transpose()) * faer::Scale(0.5);
            let op = DenseSymmetricOperator::from_matrix(sym).unwrap();
            let g = gibbs_operator(&op).unwrap();
            assert_relative_eq!(g.density().trace(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn projector_from_leading_qubit() {
        let v = SpinVector::new(vec![1]).unwrap();
        let p = visible_projector(&v, 2).unwrap();
        assert_eq!(p.diagonal(), vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(p.trace(), 2);
    }

    #[test]
    fn projector_full_clamp_is_rank_one() {
        let v = SpinVector::new(vec![-1, 1, -1]).unwrap();
        let p = visible_projector(&v, 3).unwrap();
        assert_eq!(p.trace(), 1);
        let diag = p.diagonal();
        assert_eq!(diag.iter().sum::<f64>(), 1.0);
        let index = crate::basis::index_of(&[-1, 1, -1]);
        assert_eq!(diag[index], 1.0);
    }

    #[test]
    fn empty_projector_is_identity() {
        let v = SpinVector::new(vec![]).unwrap();
        let p = visible_projector(&v, 2).unwrap();
        assert_eq!(p.diagonal(), vec![1.0; 4]);
    }

    #[test]
    fn projector_idempotent() {
        let p = Projector::new(3, &[(2, -1)]).unwrap();
        let m = p.to_operator();
        let sq = m.matrix() * m.matrix();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(sq[(i, j)], m.entry(i, j));
            }
        }
    }

    #[test]
    fn projector_rejects_invalid_spin() {
        assert!(matches!(
            Projector::new(2, &[(1, 0)]),
            Err(Error::InvalidSpin { .. })
        ));
    }

    #[test]
    fn frechet_identity_projector_matches_trace_identity() {
        // Tr[∂e^{-H}] = -Tr[E e^{-H}]
        let mut rng = crate::rng::SplitMix64::new(13);
        for _ in 0..20 {
            let dim = 8;
            let raw_h = Mat::from_fn(dim, dim, |_, _| rng.uniform(-1.5, 1.5));
            let h = DenseSymmetricOperator::from_matrix(
                (&raw_h + raw_h.transpose()) * faer::Scale(0.5),
            )
            .unwrap();
            let raw_e = Mat::from_fn(dim, dim, |_, _| rng.uniform(-1.0, 1.0));
            let e = DenseSymmetricOperator::from_matrix(
                (&raw_e + raw_e.transpose()) * faer::Scale(0.5),
            )
            .unwrap();
            let lhs = frechet_gibbs_trace(&h, &e, &Projector::identity(3)).unwrap();
            let g = gibbs_operator(&h).unwrap();
            let prod = e.matrix() * g.exp_neg_h().as_ref();
            let rhs: f64 = -(0..dim).map(|i| prod[(i, i)]).sum::<f64>();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        }
    }

    #[test]
    fn frechet_zero_direction_is_zero() {
        let h = operator_from(&[&[-1.0, -0.5], &[-0.5, 1.0]]);
        let e = DenseSymmetricOperator::from_matrix(Mat::<f64>::zeros(2, 2)).unwrap();
        let r = frechet_gibbs_trace(&h, &e, &Projector::identity(1)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn frechet_matches_finite_differences() {
        let mut rng = crate::rng::SplitMix64::new(99);
        let n = 3;
        let dim = 1usize << n;
        for trial in 0..10 {
            let raw = Mat::from_fn(dim, dim, |_, _| rng.uniform(-1.0, 1.0));
            let h_mat = (&raw + raw.transpose()) * faer::Scale(0.5);
            let h = DenseSymmetricOperator::from_matrix(h_mat.clone()).unwrap();
            let e = pauli_operator(PauliKind::Z, 1, n).unwrap();
            let v = SpinVector::new(vec![1, -1]).unwrap();
            let proj = visible_projector(&v, n).unwrap();

            let lhs = frechet_gibbs_trace(&h, &e, &proj).unwrap();

            let eps = 1e-5;
            let trace_at = |sign: f64| -> f64 {
                let shifted = &h_mat + &(faer::Scale(sign * eps) * e.matrix());
                let op = DenseSymmetricOperator::from_matrix(shifted).unwrap();
                let g = gibbs_operator(&op).unwrap();
                proj.masked_trace(g.exp_neg_h().as_ref())
            };
            let fd = (trace_at(1.0) - trace_at(-1.0)) / (2.0 * eps);
            assert_relative_eq!(lhs, fd, max_relative = 1e-5, epsilon = 1e-12);
            let _ = trial;
        }
    }

    #[test]
    fn frechet_handles_degenerate_spectra() {
        // w σz σz only: eigenvalues {-w, w, w, -w} are doubly degenerate
        let n = 2;
        let mut mat = Mat::<f64>::zeros(4, 4);
        for i in 0..4 {
            let z1 = basis::spin(i, 1, n) as f64;
            let z2 = basis::spin(i, 2, n) as f64;
            mat[(i, i)] = -0.8 * z1 * z2;
        }
        let h = DenseSymmetricOperator::from_matrix(mat.clone()).unwrap();
        let e = pauli_operator(PauliKind::X, 1, n).unwrap();
        let v = SpinVector::new(vec![1]).unwrap();
        let proj = visible_projector(&v, n).unwrap();
        let lhs = frechet_gibbs_trace(&h, &e, &proj).unwrap();

        let eps = 1e-5;
        let trace_at = |sign: f64| -> f64 {
            let shifted = &mat + &(faer::Scale(sign * eps) * e.matrix());
            let op = DenseSymmetricOperator::from_matrix(shifted).unwrap();
            let g = gibbs_operator(&op).unwrap();
            proj.masked_trace(g.exp_neg_h().as_ref())
        };
        let fd = (trace_at(1.0) - trace_at(-1.0)) / (2.0 * eps);
        assert_relative_eq!(lhs, fd, max_relative = 1e-5, epsilon = 1e-12);
    }

    #[test]
    fn frechet_dimension_mismatch() {
        let h = operator_from(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        let e = pauli_operator(PauliKind::Z, 1, 2).unwrap();
        assert!(frechet_gibbs_trace(&h, &e, &Projector::identity(1)).is_err());
    }
}
