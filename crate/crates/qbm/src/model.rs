//! Transverse-field Ising model parameterization and exact Gibbs statistics.
//!
//! A model over `n = n_visible + n_hidden` qubits is specified by transverse
//! fields `Γ_a ≥ 0`, biases `b_a`, and symmetric couplings `w_ab` stored once
//! per unordered pair `a < b` behind a connectivity mask. The Hamiltonian is
//!
//! ```text
//! H = - Σ_a Γ_a σˣ_a - Σ_a b_a σᶻ_a - Σ_{a<b} w_ab σᶻ_a σᶻ_b
//! ```
//!
//! Qubits are 1-based; visible qubits come first (for supervised layouts the
//! inputs precede the outputs inside the visible block) and hidden qubits
//! last, matching the basis ordering of [`crate::basis`].
//!
//! Clamping a qubit to a data value is realized by removing it and folding
//! its couplings into effective biases of the remaining qubits, which is
//! exact and keeps matrices small, rather than by an infinite energy penalty.
//! The constant energy carried by the removed qubits is reported alongside
//! the reduced model so clamped partition functions stay exact.

use faer::Mat;

use crate::basis;
use crate::engine::GibbsSummary;
use crate::error::{Error, Result};
use crate::operator::DenseSymmetricOperator;
use crate::rng::SplitMix64;
use crate::DEFAULT_SIZE_GUARD;

/// A classical spin configuration with entries in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinVector {
    spins: Vec<i8>,
}

impl SpinVector {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        for &s in &spins {
            if s != 1 && s != -1 {
                return Err(Error::InvalidSpin { value: s as i64 });
            }
        }
        Ok(Self { spins })
    }

    /// Spins of basis state `index` over `n` qubits.
    pub fn from_index(index: usize, n: usize) -> Self {
        Self {
            spins: basis::spins_of(index, n),
        }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// Spin of qubit `a` (1-based).
    pub fn spin(&self, a: usize) -> i8 {
        self.spins[a - 1]
    }

    /// Basis index of this configuration.
    pub fn index(&self) -> usize {
        basis::index_of(&self.spins)
    }

    /// The configuration with every spin negated.
    pub fn negated(&self) -> Self {
        Self {
            spins: self.spins.iter().map(|s| -s).collect(),
        }
    }
}

/// Index into the upper-triangle coupling storage for pair `a < b`.
#[inline]
fn pair_index(a: usize, b: usize, n: usize) -> usize {
    debug_assert!(a >= 1 && a < b && b <= n);
    (a - 1) * n - a * (a - 1) / 2 + (b - a - 1)
}

/// Parameters of a transverse-field Ising model.
///
/// Couplings are stored once per unordered pair and sum as `Σ_{a<b}`; any
/// double-counting convention in the definition is absorbed into the learned
/// values. Mask-excluded pairs are pinned to exactly zero. In shared-Γ mode
/// all transverse fields are forced equal.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters {
    n_visible: usize,
    n_hidden: usize,
    gamma: Vec<f64>,
    shared_gamma: bool,
    bias: Vec<f64>,
    coupling: Vec<f64>,
    mask: Vec<bool>,
    restricted: bool,
    size_guard: usize,
}

impl ModelParameters {
    /// All-to-all connectivity over `n_visible + n_hidden` qubits.
    pub fn fully_connected(n_visible: usize, n_hidden: usize) -> Self {
        let n = n_visible + n_hidden;
        let pairs = n * (n - 1) / 2;
        Self {
            n_visible,
            n_hidden,
            gamma: vec![0.0; n],
            shared_gamma: false,
            bias: vec![0.0; n],
            coupling: vec![0.0; pairs],
            mask: vec![true; pairs],
            restricted: false,
            size_guard: DEFAULT_SIZE_GUARD,
        }
    }

    /// Semi-restricted topology: full visible-visible and visible-hidden
    /// connectivity, no hidden-hidden couplings.
    pub fn semi_restricted(n_visible: usize, n_hidden: usize) -> Self {
        let mut p = Self::fully_connected(n_visible, n_hidden);
        let n = p.n_qubits();
        for a in (n_visible + 1)..=n {
            for b in (a + 1)..=n {
                p.mask[pair_index(a, b, n)] = false;
            }
        }
        p.restricted = true;
        p
    }

    /// Raises or lowers the dense-construction ceiling for this model.
    pub fn with_size_guard(mut self, guard: usize) -> Self {
        self.size_guard = guard;
        self
    }

    pub fn n_visible(&self) -> usize {
        self.n_visible
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn n_qubits(&self) -> usize {
        self.n_visible + self.n_hidden
    }

    pub fn size_guard(&self) -> usize {
        self.size_guard
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    pub fn is_shared_gamma(&self) -> bool {
        self.shared_gamma
    }

    /// All transverse fields are zero: the model is a classical BM.
    pub fn is_classical(&self) -> bool {
        self.gamma.iter().all(|&g| g == 0.0)
    }

    pub fn gamma(&self, a: usize) -> f64 {
        self.gamma[a - 1]
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gamma
    }

    pub fn bias(&self, a: usize) -> f64 {
        self.bias[a - 1]
    }

    pub fn biases(&self) -> &[f64] {
        &self.bias
    }

    /// Coupling of the unordered pair `{a, b}`; zero for masked pairs.
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.coupling[pair_index(a, b, self.n_qubits())]
    }

    pub fn pair_enabled(&self, a: usize, b: usize) -> bool {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.mask[pair_index(a, b, self.n_qubits())]
    }

    /// Enabled pairs in lexicographic order as `(a, b, triangle index)`.
    pub fn enabled_pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.n_qubits();
        (1..=n).flat_map(move |a| {
            ((a + 1)..=n).filter_map(move |b| {
                let idx = pair_index(a, b, n);
                self.mask[idx].then_some((a, b, idx))
            })
        })
    }

    pub fn set_bias(&mut self, a: usize, value: f64) {
        self.bias[a - 1] = value;
    }

    pub fn set_biases(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.n_qubits() {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits(),
                got: values.len(),
            });
        }
        self.bias.copy_from_slice(values);
        Ok(())
    }

    /// Sets one transverse field; rejects negatives and shared-Γ models.
    pub fn set_gamma(&mut self, a: usize, value: f64) -> Result<()> {
        if value < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "transverse field must be non-negative, got {value}"
            )));
        }
        if self.shared_gamma {
            return Err(Error::InvalidParameter(
                "per-qubit gamma update on a shared-gamma model".into(),
            ));
        }
        self.gamma[a - 1] = value;
        Ok(())
    }

    /// Switches to shared-Γ mode with the given value on every qubit.
    pub fn set_shared_gamma(&mut self, value: f64) -> Result<()> {
        if value < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "transverse field must be non-negative, got {value}"
            )));
        }
        self.shared_gamma = true;
        self.gamma.fill(value);
        Ok(())
    }

    /// Shared transverse field value; meaningful in shared-Γ mode.
    pub fn shared_gamma_value(&self) -> f64 {
        self.gamma.first().copied().unwrap_or(0.0)
    }

    pub fn set_coupling(&mut self, a: usize, b: usize, value: f64) -> Result<()> {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let idx = pair_index(a, b, self.n_qubits());
        if !self.mask[idx] {
            if value == 0.0 {
                return Ok(());
            }
            return Err(Error::MaskedCoupling { a, b });
        }
        self.coupling[idx] = value;
        Ok(())
    }

    /// Draws biases, then enabled couplings in lexicographic pair order,
    /// uniformly from `[-half_width, half_width]`.
    pub fn randomize(&mut self, rng: &mut SplitMix64, half_width: f64) {
        for a in 0..self.n_qubits() {
            self.bias[a] = rng.uniform(-half_width, half_width);
        }
        let n = self.n_qubits();
        for a in 1..=n {
            for b in (a + 1)..=n {
                let idx = pair_index(a, b, n);
                if self.mask[idx] {
                    self.coupling[idx] = rng.uniform(-half_width, half_width);
                }
            }
        }
    }

    pub(crate) fn check_guard(&self) -> Result<()> {
        if self.n_qubits() > self.size_guard {
            return Err(Error::SizeGuardExceeded {
                n_qubits: self.n_qubits(),
                guard: self.size_guard,
            });
        }
        Ok(())
    }

    /// Classical diagonal energies `E_k` for all `2^n` basis states.
    pub(crate) fn classical_energies(&self) -> Vec<f64> {
        let n = self.n_qubits();
        let dim = 1usize << n;
        let mut energies = vec![0.0; dim];
        for a in 1..=n {
            let b = self.bias[a - 1];
            if b != 0.0 {
                for (k, e) in energies.iter_mut().enumerate() {
                    *e -= b * basis::spin(k, a, n) as f64;
                }
            }
        }
        for (a, b, idx) in self.enabled_pairs() {
            let w = self.coupling[idx];
            if w != 0.0 {
                for (k, e) in energies.iter_mut().enumerate() {
                    *e -= w * (basis::spin(k, a, n) * basis::spin(k, b, n)) as f64;
                }
            }
        }
        energies
    }
}

/// Assembles the dense transverse-field Ising Hamiltonian.
pub fn build_hamiltonian(p: &ModelParameters) -> Result<DenseSymmetricOperator> {
    p.check_guard()?;
    let n = p.n_qubits();
    let dim = 1usize << n;
    let energies = p.classical_energies();
    let mut mat = Mat::<f64>::zeros(dim, dim);
    for k in 0..dim {
        mat[(k, k)] = energies[k];
    }
    for a in 1..=n {
        let g = p.gamma(a);
        if g != 0.0 {
            for k in 0..dim {
                mat[(k, basis::flip(k, a, n))] = -g;
            }
        }
    }
    Ok(DenseSymmetricOperator::from_symmetric_unchecked(mat))
}

/// A clamped model: the surviving qubits plus the constant energy carried by
/// the removed ones, so that `Tr[e^{-H_v}] = e^{-offset} · Z(params)`.
#[derive(Debug, Clone)]
pub struct ClampedModel {
    pub params: ModelParameters,
    pub offset: f64,
}

/// Clamps the leading `k = spins.len()` visible qubits to data values.
///
/// The clamped qubits are removed; each surviving qubit `i` keeps its
/// transverse field and picks up the effective bias
/// `b_i + Σ_ν w_iν v_ν` over the clamped neighbors `ν`. Couplings among the
/// survivors are retained. The returned offset is the classical energy of
/// the clamped block, `-Σ_ν b_ν v_ν - Σ_{ν<μ} w_νμ v_ν v_μ`.
pub fn clamp_prefix(p: &ModelParameters, spins: &SpinVector) -> Result<ClampedModel> {
    let k = spins.len();
    if k > p.n_visible() {
        return Err(Error::LengthMismatch {
            expected: p.n_visible(),
            got: k,
        });
    }
    let n = p.n_qubits();
    let m = n - k;
    let mut reduced = ModelParameters {
        n_visible: p.n_visible() - k,
        n_hidden: p.n_hidden(),
        gamma: p.gamma[k..].to_vec(),
        shared_gamma: p.shared_gamma,
        bias: p.bias[k..].to_vec(),
        coupling: vec![0.0; m * m.saturating_sub(1) / 2],
        mask: vec![false; m * m.saturating_sub(1) / 2],
        restricted: p.restricted,
        size_guard: p.size_guard,
    };
    let mut offset = 0.0;
    for nu in 1..=k {
        offset -= p.bias(nu) * spins.spin(nu) as f64;
        for mu in (nu + 1)..=k {
            if p.pair_enabled(nu, mu) {
                offset -= p.coupling(nu, mu) * (spins.spin(nu) * spins.spin(mu)) as f64;
            }
        }
    }
    for i in 1..=m {
        let orig_i = k + i;
        for nu in 1..=k {
            if p.pair_enabled(nu, orig_i) {
                reduced.bias[i - 1] += p.coupling(nu, orig_i) * spins.spin(nu) as f64;
            }
        }
        for j in (i + 1)..=m {
            let orig_j = k + j;
            if p.pair_enabled(orig_i, orig_j) {
                let idx = pair_index(i, j, m);
                reduced.mask[idx] = true;
                reduced.coupling[idx] = p.coupling(orig_i, orig_j);
            }
        }
    }
    Ok(ClampedModel {
        params: reduced,
        offset,
    })
}

/// Clamps every visible qubit to the data vector `v`.
pub fn clamp_visible(p: &ModelParameters, v: &SpinVector) -> Result<ClampedModel> {
    if v.len() != p.n_visible() {
        return Err(Error::LengthMismatch {
            expected: p.n_visible(),
            got: v.len(),
        });
    }
    clamp_prefix(p, v)
}

/// An exact normalized probability table over all states of a variable
/// subset, indexed per the basis convention.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibleDistribution {
    n_vars: usize,
    probs: Vec<f64>,
}

impl VisibleDistribution {
    pub fn new(n_vars: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << n_vars {
            return Err(Error::LengthMismatch {
                expected: 1usize << n_vars,
                got: probs.len(),
            });
        }
        for (index, &p) in probs.iter().enumerate() {
            if p < 0.0 {
                return Err(Error::NegativeProbability { index, value: p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { n_vars, probs })
    }

    pub fn uniform(n_vars: usize) -> Self {
        let dim = 1usize << n_vars;
        Self {
            n_vars,
            probs: vec![1.0 / dim as f64; dim],
        }
    }

    pub fn point_mass(v: &SpinVector) -> Self {
        let dim = 1usize << v.len();
        let mut probs = vec![0.0; dim];
        probs[v.index()] = 1.0;
        Self {
            n_vars: v.len(),
            probs,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn prob_of(&self, v: &SpinVector) -> f64 {
        self.probs[v.index()]
    }

    /// Shannon entropy `-Σ p ln p` in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    /// Marginal over the leading `k` variables (sums out the trailing ones).
    pub fn marginal_over_leading(&self, k: usize) -> VisibleDistribution {
        assert!(k <= self.n_vars);
        let block = 1usize << (self.n_vars - k);
        let probs: Vec<f64> = (0..1usize << k)
            .map(|x| self.probs[x * block..(x + 1) * block].iter().sum())
            .collect();
        VisibleDistribution { n_vars: k, probs }
    }

    /// Conditional over the trailing variables given the leading block
    /// equals `prefix_index`.
    pub fn conditional_of_trailing(&self, prefix_index: usize, k: usize) -> Result<VisibleDistribution> {
        let block = 1usize << (self.n_vars - k);
        let slice = &self.probs[prefix_index * block..(prefix_index + 1) * block];
        let total: f64 = slice.iter().sum();
        if total < 1e-300 {
            return Err(Error::UndefinedConditional { px: total });
        }
        Ok(VisibleDistribution {
            n_vars: self.n_vars - k,
            probs: slice.iter().map(|p| p / total).collect(),
        })
    }
}

/// First and second σᶻ moments plus σˣ moments of a Gibbs state.
///
/// Pair moments are stored for every pair in triangle order; masked pairs
/// simply carry the Gibbs value of their (uncoupled) observable.
#[derive(Debug, Clone)]
pub struct MomentSet {
    z: Vec<f64>,
    zz: Vec<f64>,
    x: Vec<f64>,
}

impl MomentSet {
    pub(crate) fn new(z: Vec<f64>, zz: Vec<f64>, x: Vec<f64>) -> Self {
        Self { z, zz, x }
    }

    pub fn n_qubits(&self) -> usize {
        self.z.len()
    }

    /// `⟨σᶻ_a⟩`
    pub fn z(&self, a: usize) -> f64 {
        self.z[a - 1]
    }

    /// `⟨σᶻ_a σᶻ_b⟩`
    pub fn zz(&self, a: usize, b: usize) -> f64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.zz[pair_index(a, b, self.z.len())]
    }

    /// `⟨σˣ_a⟩`
    pub fn x(&self, a: usize) -> f64 {
        self.x[a - 1]
    }
}

/// Mean classical and quantum energy components of the Gibbs state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDecomposition {
    /// `-⟨Σ b_a σᶻ_a + Σ w_ab σᶻ_a σᶻ_b⟩`
    pub e_cl: f64,
    /// `-⟨Σ Γ_a σˣ_a⟩`
    pub e_q: f64,
}

/// Exact marginal distribution of the visible qubits, `P_v = Tr[Λ_v ρ]`.
pub fn visible_marginals(p: &ModelParameters) -> Result<VisibleDistribution> {
    let summary = GibbsSummary::for_model(p)?;
    let sums = summary.visible_block_sums(p.n_visible());
    let total = summary.trace_scaled();
    VisibleDistribution::new(p.n_visible(), sums.iter().map(|s| s / total).collect())
}

/// Gibbs expectations `⟨σᶻ_a⟩`, `⟨σᶻ_a σᶻ_b⟩`, `⟨σˣ_a⟩`.
pub fn gibbs_moments(p: &ModelParameters) -> Result<MomentSet> {
    let summary = GibbsSummary::for_model(p)?;
    Ok(summary.moments())
}

/// Splits the mean energy into classical (`σᶻ`) and quantum (`σˣ`) parts.
pub fn energy_decomposition(p: &ModelParameters) -> Result<EnergyDecomposition> {
    let summary = GibbsSummary::for_model(p)?;
    Ok(summary.energy_decomposition(p))
}

pub(crate) fn energy_from_moments(p: &ModelParameters, m: &MomentSet) -> EnergyDecomposition {
    let n = p.n_qubits();
    let mut e_cl = 0.0;
    for a in 1..=n {
        e_cl -= p.bias(a) * m.z(a);
    }
    for (a, b, _) in p.enabled_pairs() {
        e_cl -= p.coupling(a, b) * m.zz(a, b);
    }
    let mut e_q = 0.0;
    for a in 1..=n {
        let g = p.gamma(a);
        if g != 0.0 {
            e_q -= g * m.x(a);
        }
    }
    EnergyDecomposition { e_cl, e_q }
}

/// Exact conditional `P(y | x) = Tr[Λ_x Λ_y e^{-H}] / Tr[Λ_x e^{-H}]` where
/// `x` fixes the leading visible qubits and `y` ranges over the remaining
/// visible qubits.
pub fn conditional_distribution(p: &ModelParameters, x: &SpinVector) -> Result<VisibleDistribution> {
    let n_x = x.len();
    if n_x >= p.n_visible() {
        return Err(Error::InvalidParameter(format!(
            "input block of {n_x} spins leaves no output qubits among {} visible",
            p.n_visible()
        )));
    }
    let summary = GibbsSummary::for_model(p)?;
    let sums = summary.visible_block_sums(p.n_visible());
    let n_y = p.n_visible() - n_x;
    let base = x.index() << n_y;
    let block = &sums[base..base + (1 << n_y)];
    let t_x: f64 = block.iter().sum();
    let p_x = t_x / summary.trace_scaled();
    if p_x < 1e-300 {
        return Err(Error::UndefinedConditional { px: p_x });
    }
    VisibleDistribution::new(n_y, block.iter().map(|t| t / t_x).collect())
}

/// Clamped conditional `P_clamped(y | x) = Tr[Λ_y e^{-H_x}] / Tr[e^{-H_x}]`,
/// with `H_x` obtained by removing the input qubits and folding them into
/// effective biases.
///
/// Coincides with [`conditional_distribution`] exactly when the Hamiltonian
/// is classical (`Γ = 0`) and generally differs otherwise.
pub fn clamped_conditional_distribution(
    p: &ModelParameters,
    x: &SpinVector,
) -> Result<VisibleDistribution> {
    if x.len() >= p.n_visible() {
        return Err(Error::InvalidParameter(format!(
            "input block of {} spins leaves no output qubits among {} visible",
            x.len(),
            p.n_visible()
        )));
    }
    let clamped = clamp_prefix(p, x)?;
    visible_marginals(&clamped.params)
}

/// Parameters for discriminative learning: qubits for outputs and hiddens
/// only, plus real-valued coupling of every qubit to the input features.
///
/// Inputs never get qubits — a feature vector `x` enters purely as the
/// effective bias `b_a + Σ_μ w_aμ x_μ`, so features need not be binary.
#[derive(Debug, Clone)]
pub struct DiscriminativeParameters {
    qubits: ModelParameters,
    n_inputs: usize,
    input_weights: Vec<f64>,
}

impl DiscriminativeParameters {
    /// Fully connected output/hidden block with `n_inputs` feature weights
    /// per qubit. The qubit model's "visible" block is the outputs.
    pub fn new(n_outputs: usize, n_hidden: usize, n_inputs: usize) -> Self {
        let qubits = ModelParameters::fully_connected(n_outputs, n_hidden);
        let n = qubits.n_qubits();
        Self {
            qubits,
            n_inputs,
            input_weights: vec![0.0; n * n_inputs],
        }
    }

    /// Semi-restricted variant (no hidden-hidden couplings).
    pub fn semi_restricted(n_outputs: usize, n_hidden: usize, n_inputs: usize) -> Self {
        let qubits = ModelParameters::semi_restricted(n_outputs, n_hidden);
        let n = qubits.n_qubits();
        Self {
            qubits,
            n_inputs,
            input_weights: vec![0.0; n * n_inputs],
        }
    }

    pub fn qubits(&self) -> &ModelParameters {
        &self.qubits
    }

    pub fn qubits_mut(&mut self) -> &mut ModelParameters {
        &mut self.qubits
    }

    pub fn n_outputs(&self) -> usize {
        self.qubits.n_visible()
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    /// Input weight `w_aμ` (qubit `a` 1-based, feature `mu` 0-based).
    pub fn input_weight(&self, a: usize, mu: usize) -> f64 {
        self.input_weights[(a - 1) * self.n_inputs + mu]
    }

    pub fn set_input_weight(&mut self, a: usize, mu: usize, value: f64) {
        self.input_weights[(a - 1) * self.n_inputs + mu] = value;
    }

    pub fn input_weights(&self) -> &[f64] {
        &self.input_weights
    }

    /// Draws qubit biases/couplings and then input weights (by qubit, then
    /// feature) uniformly from `[-half_width, half_width]`.
    pub fn randomize(&mut self, rng: &mut SplitMix64, half_width: f64) {
        self.qubits.randomize(rng, half_width);
        for w in &mut self.input_weights {
            *w = rng.uniform(-half_width, half_width);
        }
    }
}

/// The qubit model seen once the input `x` is applied: biases become
/// `b_a + Σ_μ w_aμ x_μ`; fields and couplings are unchanged.
pub fn discriminative_hamiltonian(
    dp: &DiscriminativeParameters,
    x: &[f64],
) -> Result<ModelParameters> {
    if x.len() != dp.n_inputs {
        return Err(Error::LengthMismatch {
            expected: dp.n_inputs,
            got: x.len(),
        });
    }
    let mut p = dp.qubits.clone();
    for a in 1..=p.n_qubits() {
        let mut eff = p.bias(a);
        for (mu, &xv) in x.iter().enumerate() {
            eff += dp.input_weight(a, mu) * xv;
        }
        p.set_bias(a, eff);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pair_index_is_a_bijection() {
        let n = 6;
        let mut seen = vec![false; n * (n - 1) / 2];
        for a in 1..=n {
            for b in (a + 1)..=n {
                let idx = pair_index(a, b, n);
                assert!(!seen[idx]);
                seen[idx] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn spin_vector_rejects_bad_entries() {
        assert!(SpinVector::new(vec![1, 0]).is_err());
        assert!(SpinVector::new(vec![1, -1, 1]).is_ok());
    }

    #[test]
    fn hamiltonian_single_qubit_bias() {
        let mut p = ModelParameters::fully_connected(1, 0);
        p.set_bias(1, 1.0);
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.entry(0, 0), -1.0);
        assert_eq!(h.entry(1, 1), 1.0);
        assert_eq!(h.entry(0, 1), 0.0);
    }

    #[test]
    fn hamiltonian_single_qubit_transverse() {
        // Γ = 3, b = 4: H = -3σx - 4σz, eigenvalues ∓5
        let mut p = ModelParameters::fully_connected(1, 0);
        p.set_bias(1, 4.0);
        p.set_gamma(1, 3.0).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let d = crate::operator::spectral_decompose(&h).unwrap();
        assert_relative_eq!(d.eigenvalues()[0], -5.0, max_relative = 1e-12);
        assert_relative_eq!(d.eigenvalues()[1], 5.0, max_relative = 1e-12);
    }

    #[test]
    fn hamiltonian_coupling_only() {
        // w_12 = 1, b = Γ = 0: diag(-1, 1, 1, -1) from enumerating 4 states
        let mut p = ModelParameters::fully_connected(2, 0);
        p.set_coupling(1, 2, 1.0).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h.entry(i, i)).collect();
        assert_eq!(diag, vec![-1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn masked_coupling_rejected() {
        let mut p = ModelParameters::semi_restricted(2, 2);
        assert!(p.set_coupling(3, 4, 0.5).is_err());
        assert!(p.set_coupling(1, 2, 0.5).is_ok());
        assert!(p.set_coupling(1, 3, 0.5).is_ok());
        assert_eq!(p.coupling(3, 4), 0.0);
    }

    #[test]
    fn shared_gamma_mode() {
        let mut p = ModelParameters::fully_connected(3, 0);
        p.set_shared_gamma(0.7).unwrap();
        assert!(p.gammas().iter().all(|&g| g == 0.7));
        assert!(p.set_gamma(1, 0.5).is_err());
        assert!(p.set_shared_gamma(-1.0).is_err());
    }

    #[test]
    fn clamp_without_hidden_yields_classical_energy() {
        let mut p = ModelParameters::fully_connected(3, 0);
        p.set_biases(&[0.3, -0.2, 0.5]).unwrap();
        p.set_coupling(1, 2, 0.4).unwrap();
        p.set_coupling(2, 3, -0.6).unwrap();
        let v = SpinVector::new(vec![1, -1, 1]).unwrap();
        let clamped = clamp_visible(&p, &v).unwrap();
        assert_eq!(clamped.params.n_qubits(), 0);
        // offset equals the classical Ising energy of v
        let energies = p.classical_energies();
        assert_relative_eq!(clamped.offset, energies[v.index()], max_relative = 1e-14);
    }

    #[test]
    fn clamp_folds_couplings_into_biases() {
        // one hidden qubit i with w_i,nu = (1, -1), b_i = 0.5, v = (+1, +1)
        let mut p = ModelParameters::fully_connected(2, 1);
        p.set_bias(3, 0.5);
        p.set_coupling(1, 3, 1.0).unwrap();
        p.set_coupling(2, 3, -1.0).unwrap();
        let v = SpinVector::new(vec![1, 1]).unwrap();
        let clamped = clamp_visible(&p, &v).unwrap();
        assert_eq!(clamped.params.n_qubits(), 1);
        assert_relative_eq!(clamped.params.bias(1), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn clamp_semi_restricted_is_fully_factorized() {
        let mut p = ModelParameters::semi_restricted(3, 2);
        p.set_coupling(1, 4, 0.3).unwrap();
        p.set_coupling(2, 5, -0.7).unwrap();
        p.set_coupling(1, 2, 0.2).unwrap();
        let v = SpinVector::new(vec![1, -1, 1]).unwrap();
        let clamped = clamp_visible(&p, &v).unwrap();
        assert_eq!(clamped.params.n_qubits(), 2);
        assert!(clamped.params.enabled_pairs().next().is_none());
    }

    #[test]
    fn marginals_uniform_for_free_model() {
        let p = ModelParameters::fully_connected(2, 1);
        let m = visible_marginals(&p).unwrap();
        for i in 0..4 {
            assert_relative_eq!(m.prob(i), 0.25, max_relative = 1e-12);
        }
    }

    #[test]
    fn marginals_symmetric_single_qubit_transverse() {
        let mut p = ModelParameters::fully_connected(1, 0);
        p.set_gamma(1, 1.0).unwrap();
        let m = visible_marginals(&p).unwrap();
        assert_relative_eq!(m.prob(0), 0.5, max_relative = 1e-12);
        assert_relative_eq!(m.prob(1), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn moment_closed_form_single_qubit() {
        // Γ = 3, b = 4: ⟨σz⟩ = (4/5) tanh 5
        let mut p = ModelParameters::fully_connected(1, 0);
        p.set_bias(1, 4.0);
        p.set_gamma(1, 3.0).unwrap();
        let m = gibbs_moments(&p).unwrap();
        assert_relative_eq!(m.z(1), 0.8 * 5.0f64.tanh(), max_relative = 1e-12);
        assert_relative_eq!(m.x(1), 0.6 * 5.0f64.tanh(), max_relative = 1e-12);
    }

    #[test]
    fn moments_vanish_without_bias() {
        let mut p = ModelParameters::fully_connected(2, 0);
        p.set_gamma(1, 0.8).unwrap();
        p.set_gamma(2, 1.3).unwrap();
        p.set_coupling(1, 2, 0.5).unwrap();
        let m = gibbs_moments(&p).unwrap();
        assert!(m.z(1).abs() < 1e-12);
        assert!(m.z(2).abs() < 1e-12);
    }

    #[test]
    fn x_moments_vanish_classically() {
        let mut p = ModelParameters::fully_connected(2, 0);
        p.set_bias(1, 0.4);
        p.set_coupling(1, 2, -0.3).unwrap();
        let m = gibbs_moments(&p).unwrap();
        assert_eq!(m.x(1), 0.0);
        assert_eq!(m.x(2), 0.0);
    }

    #[test]
    fn energy_decomposition_closed_form() {
        // Γ = 1, b = 0: E_q = -tanh 1, E_cl = 0
        let mut p = ModelParameters::fully_connected(1, 0);
        p.set_gamma(1, 1.0).unwrap();
        let e = energy_decomposition(&p).unwrap();
        assert_relative_eq!(e.e_q, -(1.0f64.tanh()), max_relative = 1e-12);
        assert!(e.e_cl.abs() < 1e-12);
    }

    #[test]
    fn energy_decomposition_zero_model() {
        let p = ModelParameters::fully_connected(2, 1);
        let e = energy_decomposition(&p).unwrap();
        assert_eq!(e.e_cl, 0.0);
        assert_eq!(e.e_q, 0.0);
    }

    #[test]
    fn conditional_normalizes_and_ignores_decoupled_input() {
        let mut p = ModelParameters::fully_connected(3, 0);
        p.set_bias(3, 0.8);
        // no coupling across the (input=1 qubit | output=2 qubits) partition
        p.set_coupling(2, 3, 0.5).unwrap();
        let for_x = |s: i8| {
            conditional_distribution(&p, &SpinVector::new(vec![s]).unwrap()).unwrap()
        };
        let plus = for_x(1);
        let minus = for_x(-1);
        let total: f64 = plus.probabilities().iter().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
        for i in 0..4 {
            assert_relative_eq!(plus.prob(i), minus.prob(i), max_relative = 1e-10);
        }
    }

    #[test]
    fn clamped_conditional_equals_exact_for_factorized_couplings() {
        // no couplings across the partition: equality holds for any Γ
        let mut p = ModelParameters::fully_connected(3, 0);
        p.set_shared_gamma(1.2).unwrap();
        p.set_bias(1, 0.4);
        p.set_bias(2, -0.3);
        p.set_bias(3, 0.9);
        p.set_coupling(2, 3, 0.7).unwrap();
        p.set_coupling(1, 2, 0.0).unwrap();
        p.set_coupling(1, 3, 0.0).unwrap();
        let x = SpinVector::new(vec![-1]).unwrap();
        let exact = conditional_distribution(&p, &x).unwrap();
        let clamped = clamped_conditional_distribution(&p, &x).unwrap();
        for i in 0..4 {
            assert_relative_eq!(exact.prob(i), clamped.prob(i), epsilon = 1e-10);
        }
    }

    #[test]
    fn clamped_conditional_differs_for_quantum_coupled_model() {
        let mut p = ModelParameters::fully_connected(3, 0);
        p.set_shared_gamma(1.5).unwrap();
        p.set_bias(1, 0.3);
        p.set_bias(2, -0.4);
        p.set_bias(3, 0.6);
        p.set_coupling(1, 2, 0.9).unwrap();
        p.set_coupling(1, 3, -0.8).unwrap();
        p.set_coupling(2, 3, 0.5).unwrap();
        let x = SpinVector::new(vec![1]).unwrap();
        let exact = conditional_distribution(&p, &x).unwrap();
        let clamped = clamped_conditional_distribution(&p, &x).unwrap();
        let tv: f64 = (0..4)
            .map(|i| (exact.prob(i) - clamped.prob(i)).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv > 1e-6, "total variation {tv} unexpectedly small");
    }

    #[test]
    fn discriminative_bias_arithmetic() {
        let mut dp = DiscriminativeParameters::new(1, 0, 2);
        dp.qubits_mut().set_bias(1, 0.1);
        dp.set_input_weight(1, 0, 0.5);
        dp.set_input_weight(1, 1, -0.5);
        let p = discriminative_hamiltonian(&dp, &[1.0, -1.0]).unwrap();
        assert_relative_eq!(p.bias(1), 1.1, max_relative = 1e-14);
        // zero input leaves the bias untouched
        let p0 = discriminative_hamiltonian(&dp, &[0.0, 0.0]).unwrap();
        assert_relative_eq!(p0.bias(1), 0.1, max_relative = 1e-14);
    }

    #[test]
    fn distribution_validation() {
        assert!(VisibleDistribution::new(1, vec![0.4, 0.6]).is_ok());
        assert!(matches!(
            VisibleDistribution::new(1, vec![0.4, 0.7]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            VisibleDistribution::new(1, vec![-0.1, 1.1]),
            Err(Error::NegativeProbability { .. })
        ));
    }

    #[test]
    fn marginal_and_conditional_of_table() {
        let joint = VisibleDistribution::new(2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let mx = joint.marginal_over_leading(1);
        assert_relative_eq!(mx.prob(0), 0.5, max_relative = 1e-14);
        assert_relative_eq!(mx.prob(1), 0.5, max_relative = 1e-14);
        let cond = joint.conditional_of_trailing(0, 1).unwrap();
        assert_relative_eq!(cond.prob(0), 0.8, max_relative = 1e-14);
        assert_relative_eq!(cond.prob(1), 0.2, max_relative = 1e-14);
    }
}
