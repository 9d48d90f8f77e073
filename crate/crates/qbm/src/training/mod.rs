//! Losses, gradients and optimizers for Boltzmann-machine training.
//!
//! Two families of objectives are implemented over a data distribution
//! `P^data`:
//!
//! - the exact negative log-likelihood
//!   `L = -Σ_v P^data_v log( Tr[Λ_v e^{-H}] / Tr[e^{-H}] )`, whose gradient
//!   needs the Fréchet derivative of the matrix exponential because `∂_θ H`
//!   does not commute with `H`;
//! - its Golden–Thompson upper bound
//!   `L̃ = -Σ_v P^data_v log( Tr[e^{-H_v}] / Tr[e^{-H}] ) ≥ L`, built from
//!   clamped Hamiltonians `H_v`, whose gradient reduces to differences of
//!   clamped and free expectations exactly as in the classical algorithm.
//!
//! The two coincide when all transverse fields vanish. The bound's gradient
//! with respect to a visible transverse field is always negative — its
//! clamped `σˣ` average vanishes — so `Γ` is trainable only through the
//! exact loss; the bound-based `Γ` component is exposed solely to
//! demonstrate that artifact.
//!
//! Discriminative variants clamp a real-valued input vector into effective
//! biases in both gradient phases. All expectations are exact; nothing here
//! estimates anything by sampling.

mod optim;

pub use optim::{
    bfgs_minimize, bfgs_minimize_discriminative, gradient_descent,
    gradient_descent_discriminative, IterationRecord, Method, OptimizerConfig, TrainingOutcome,
    TrainingTrace,
};

use crate::engine::GibbsSummary;
use crate::error::{Error, Result};
use crate::model::{
    clamp_prefix, clamp_visible, conditional_distribution, discriminative_hamiltonian,
    visible_marginals, DiscriminativeParameters, ModelParameters, MomentSet, SpinVector,
    VisibleDistribution,
};
use crate::operator::{loewner_kernel, scale_rows};

/// Which objective a training run minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// Exact negative log-likelihood.
    Exact,
    /// Golden–Thompson upper bound with clamped-model diagonalization in the
    /// positive phase.
    Bound,
    /// Upper bound with the analytic semi-restricted positive phase.
    SemiRestricted(PositivePhase),
}

/// How the semi-restricted positive phase evaluates hidden expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositivePhase {
    /// `⟨σᶻ_i⟩_v = (b_eff / D) tanh D` with `D = sqrt(Γ² + b_eff²)`.
    Quantum,
    /// The classical limit `tanh b_eff`, deliberately inconsistent with a
    /// quantum negative phase.
    Classical,
}

/// Transverse-field block of a gradient.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaGradient {
    /// No Γ component was requested.
    None,
    /// Single tied component: `Σ_a ∂/∂Γ_a`.
    Shared(f64),
    /// One component per qubit.
    PerQubit(Vec<f64>),
}

/// Per-parameter derivatives aligned with the [`ModelParameters`] layout.
///
/// Mask-excluded couplings carry exactly zero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterGradient {
    n_qubits: usize,
    b: Vec<f64>,
    w: Vec<f64>,
    gamma: GammaGradient,
}

impl ParameterGradient {
    fn zeros(p: &ModelParameters, gamma: GammaGradient) -> Self {
        let n = p.n_qubits();
        Self {
            n_qubits: n,
            b: vec![0.0; n],
            w: vec![0.0; n * n.saturating_sub(1) / 2],
            gamma,
        }
    }

    /// `∂L/∂b_a` (1-based).
    pub fn bias(&self, a: usize) -> f64 {
        self.b[a - 1]
    }

    pub fn biases(&self) -> &[f64] {
        &self.b
    }

    /// `∂L/∂w_ab`; zero for masked pairs.
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let n = self.n_qubits;
        self.w[(a - 1) * n - a * (a - 1) / 2 + (b - a - 1)]
    }

    pub fn couplings(&self) -> &[f64] {
        &self.w
    }

    pub fn gamma(&self) -> &GammaGradient {
        &self.gamma
    }

    /// Largest absolute component across all blocks.
    pub fn norm_inf(&self) -> f64 {
        let mut m = 0.0f64;
        for v in self.b.iter().chain(self.w.iter()) {
            m = m.max(v.abs());
        }
        match &self.gamma {
            GammaGradient::None => {}
            GammaGradient::Shared(g) => m = m.max(g.abs()),
            GammaGradient::PerQubit(gs) => {
                for g in gs {
                    m = m.max(g.abs());
                }
            }
        }
        m
    }
}

fn check_data(p: &ModelParameters, data: &VisibleDistribution) -> Result<()> {
    if data.n_vars() != p.n_visible() {
        return Err(Error::LengthMismatch {
            expected: p.n_visible(),
            got: data.n_vars(),
        });
    }
    Ok(())
}

/// Exact negative log-likelihood `L`.
///
/// States with zero data mass contribute nothing; a data-supported state
/// whose model weight underflows to zero is an error rather than a NaN.
pub fn nll_exact(p: &ModelParameters, data: &VisibleDistribution) -> Result<f64> {
    check_data(p, data)?;
    let summary = GibbsSummary::for_model(p)?;
    exact_loss_with(&summary, p, data)
}

pub(crate) fn exact_loss_with(
    summary: &GibbsSummary,
    p: &ModelParameters,
    data: &VisibleDistribution,
) -> Result<f64> {
    let sums = summary.visible_block_sums(p.n_visible());
    let log_trace = summary.trace_scaled().ln();
    let mut loss = 0.0;
    for (v, &mass) in data.probabilities().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        if sums[v] == 0.0 {
            return Err(Error::ProbabilityUnderflow);
        }
        loss -= mass * (sums[v].ln() - log_trace);
    }
    Ok(loss)
}

/// Exact gradient of [`nll_exact`], including the `∂/∂Γ` block.
///
/// The free term is `-⟨∂_θ H⟩` by the trace identity
/// `Tr[∂_θ e^{-H}] = -Tr[∂_θ H e^{-H}]`; the clamped term contracts the
/// Fréchet derivative of `e^{-H}` against the diagonal weight
/// `W = Σ_v (P^data_v / Tr[Λ_v e^{-H}]) Λ_v`, evaluated in the eigenbasis
/// through one Loewner-kernel Hadamard product. This is the quantity that a
/// sampling-based trainer cannot estimate; exact diagonalization makes it a
/// few matrix products.
pub fn grad_exact(p: &ModelParameters, data: &VisibleDistribution) -> Result<ParameterGradient> {
    check_data(p, data)?;
    let summary = GibbsSummary::for_model(p)?;
    exact_grad_with(&summary, p, data)
}

pub(crate) fn exact_grad_with(
    summary: &GibbsSummary,
    p: &ModelParameters,
    data: &VisibleDistribution,
) -> Result<ParameterGradient> {
    let n = p.n_qubits();
    let dim = 1usize << n;
    let sums = summary.visible_block_sums(p.n_visible());
    let block = 1usize << p.n_hidden();

    // diagonal weight W_k = P^data_{v(k)} / Tr[Λ_{v(k)} B]
    let mut w_diag = vec![0.0; dim];
    for (v, &mass) in data.probabilities().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        if sums[v] == 0.0 {
            return Err(Error::ProbabilityUnderflow);
        }
        let weight = mass / sums[v];
        for k in v * block..(v + 1) * block {
            w_diag[k] = weight;
        }
    }

    let moments = summary.moments();
    let gamma_shape = if p.is_shared_gamma() {
        GammaGradient::Shared(0.0)
    } else {
        GammaGradient::PerQubit(vec![0.0; n])
    };
    let mut grad = ParameterGradient::zeros(p, gamma_shape);

    match summary.spectral() {
        None => {
            // classical path: the Fréchet contraction collapses to clamped
            // averages q_k = W_k * diag(B)_k
            let q: Vec<f64> = w_diag
                .iter()
                .zip(summary.diag())
                .map(|(w, d)| w * d)
                .collect();
            for a in 1..=n {
                let pos: f64 = q
                    .iter()
                    .enumerate()
                    .map(|(k, qk)| qk * crate::basis::spin(k, a, n) as f64)
                    .sum();
                grad.b[a - 1] = moments.z(a) - pos;
            }
            for (a, b, idx) in p.enabled_pairs() {
                let pos: f64 = q
                    .iter()
                    .enumerate()
                    .map(|(k, qk)| {
                        qk * (crate::basis::spin(k, a, n) * crate::basis::spin(k, b, n)) as f64
                    })
                    .sum();
                grad.w[idx] = moments.zz(a, b) - pos;
            }
            // ∂L/∂Γ_a = 0 at Γ = 0: the loss is even in each Γ_a
        }
        Some(spectral) => {
            let v = spectral.decomp.eigenvectors();
            // G_W = V (Vᵀ W V ∘ Φ) Vᵀ so that Tr[W ∂e^{-H}(A)] = <G_W, A>
            let w_eig = v.transpose() * &scale_rows(v, &w_diag);
            let kernel = loewner_kernel(spectral.decomp.eigenvalues(), &spectral.weights);
            let k_mat = faer::Mat::from_fn(dim, dim, |i, j| w_eig[(i, j)] * kernel[(i, j)]);
            let m = v * &k_mat;
            let mut diag_g = vec![0.0; dim];
            for j in 0..dim {
                for (k, d) in diag_g.iter_mut().enumerate() {
                    *d += m[(k, j)] * v[(k, j)];
                }
            }
            for a in 1..=n {
                let frechet: f64 = diag_g
                    .iter()
                    .enumerate()
                    .map(|(k, d)| d * crate::basis::spin(k, a, n) as f64)
                    .sum();
                grad.b[a - 1] = frechet + moments.z(a);
            }
            for (a, b, idx) in p.enabled_pairs() {
                let frechet: f64 = diag_g
                    .iter()
                    .enumerate()
                    .map(|(k, d)| {
                        d * (crate::basis::spin(k, a, n) * crate::basis::spin(k, b, n)) as f64
                    })
                    .sum();
                grad.w[idx] = frechet + moments.zz(a, b);
            }
            // σˣ directions touch off-diagonal entries of G_W
            let g_full = &m * v.transpose();
            let mut gamma_components = vec![0.0; n];
            for a in 1..=n {
                let mut frechet = 0.0;
                for k in 0..dim {
                    frechet += g_full[(k, crate::basis::flip(k, a, n))];
                }
                gamma_components[a - 1] = frechet + moments.x(a);
            }
            grad.gamma = if p.is_shared_gamma() {
                GammaGradient::Shared(gamma_components.iter().sum())
            } else {
                GammaGradient::PerQubit(gamma_components)
            };
        }
    }
    Ok(grad)
}

/// Golden–Thompson upper bound `L̃ ≥ L` on the negative log-likelihood.
pub fn nll_bound(p: &ModelParameters, data: &VisibleDistribution) -> Result<f64> {
    check_data(p, data)?;
    let summary = GibbsSummary::for_model(p)?;
    bound_loss_with(&summary, p, data)
}

pub(crate) fn bound_loss_with(
    summary: &GibbsSummary,
    p: &ModelParameters,
    data: &VisibleDistribution,
) -> Result<f64> {
    let log_z = summary.log_partition();
    let mut loss = 0.0;
    for (v_index, &mass) in data.probabilities().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let v = SpinVector::from_index(v_index, p.n_visible());
        let clamped = clamp_visible(p, &v)?;
        let log_clamped_trace = if clamped.params.n_qubits() == 0 {
            -clamped.offset
        } else {
            let hidden = GibbsSummary::for_model(&clamped.params)?;
            -clamped.offset + hidden.log_partition()
        };
        loss -= mass * (log_clamped_trace - log_z);
    }
    Ok(loss)
}

/// Bound loss evaluated with the semi-restricted positive phase.
///
/// In quantum mode this equals [`nll_bound`]. In classical mode the clamped
/// hidden partition functions are evaluated with `Γ_i = 0` — the objective
/// whose gradient is the deliberately inconsistent bQBM-CE rule.
pub fn nll_bound_semirestricted(
    p: &ModelParameters,
    data: &VisibleDistribution,
    mode: PositivePhase,
) -> Result<f64> {
    check_data(p, data)?;
    check_semirestricted(p)?;
    let summary = GibbsSummary::for_model(p)?;
    semirestricted_loss_with(&summary, p, data, mode)
}

pub(crate) fn semirestricted_loss_with(
    summary: &GibbsSummary,
    p: &ModelParameters,
    data: &VisibleDistribution,
    mode: PositivePhase,
) -> Result<f64> {
    let log_z = summary.log_partition();
    let n_v = p.n_visible();
    let mut loss = 0.0;
    for (v_index, &mass) in data.probabilities().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let v = SpinVector::from_index(v_index, n_v);
        let clamped = clamp_visible(p, &v)?;
        // factorized hidden block: log Z_h = Σ_i log 2 cosh D_i
        let mut log_zh = 0.0;
        for i in 1..=clamped.params.n_qubits() {
            let b_eff = clamped.params.bias(i);
            let d = match mode {
                PositivePhase::Quantum => clamped.params.gamma(i).hypot(b_eff),
                PositivePhase::Classical => b_eff.abs(),
            };
            // log(2 cosh d) without overflow
            log_zh += d + (1.0 + (-2.0 * d).exp()).ln();
        }
        loss -= mass * (-clamped.offset + log_zh - log_z);
    }
    Ok(loss)
}

fn check_semirestricted(p: &ModelParameters) -> Result<()> {
    let n_v = p.n_visible();
    for (a, b, _) in p.enabled_pairs() {
        if a > n_v && b > n_v {
            return Err(Error::RestrictionViolated { a, b });
        }
    }
    Ok(())
}

/// Positive-phase expectation record for one data vector.
struct ClampedAverages {
    /// `⟨σᶻ_a⟩_v` for every qubit (visible entries equal the data spins)
    z: Vec<f64>,
    /// `⟨σᶻ_a σᶻ_b⟩_v` per enabled pair index
    zz: Vec<f64>,
    /// `⟨σˣ_a⟩_v` (zero on visible qubits)
    x: Vec<f64>,
}

fn clamped_averages_exact(
    p: &ModelParameters,
    v: &SpinVector,
    with_x: bool,
) -> Result<ClampedAverages> {
    let n = p.n_qubits();
    let n_v = p.n_visible();
    let clamped = clamp_visible(p, v)?;
    let hidden_moments: Option<MomentSet> = if clamped.params.n_qubits() > 0 {
        Some(GibbsSummary::for_model(&clamped.params)?.moments())
    } else {
        None
    };
    let z: Vec<f64> = (1..=n)
        .map(|a| {
            if a <= n_v {
                v.spin(a) as f64
            } else {
                hidden_moments.as_ref().unwrap().z(a - n_v)
            }
        })
        .collect();
    let mut zz = vec![0.0; n * n.saturating_sub(1) / 2];
    for (a, b, idx) in p.enabled_pairs() {
        zz[idx] = if b <= n_v {
            (v.spin(a) * v.spin(b)) as f64
        } else if a <= n_v {
            v.spin(a) as f64 * hidden_moments.as_ref().unwrap().z(b - n_v)
        } else {
            hidden_moments.as_ref().unwrap().zz(a - n_v, b - n_v)
        };
    }
    let x: Vec<f64> = if with_x {
        (1..=n)
            .map(|a| {
                if a <= n_v {
                    0.0
                } else {
                    hidden_moments.as_ref().unwrap().x(a - n_v)
                }
            })
            .collect()
    } else {
        vec![0.0; n]
    };
    Ok(ClampedAverages { z, zz, x })
}

fn clamped_averages_analytic(
    p: &ModelParameters,
    v: &SpinVector,
    mode: PositivePhase,
) -> Result<ClampedAverages> {
    let n = p.n_qubits();
    let n_v = p.n_visible();
    let clamped = clamp_visible(p, v)?;
    let hidden_z: Vec<f64> = (1..=clamped.params.n_qubits())
        .map(|i| rqbm_hidden_expectation(clamped.params.gamma(i), clamped.params.bias(i), mode))
        .collect::<Result<_>>()?;
    let z: Vec<f64> = (1..=n)
        .map(|a| {
            if a <= n_v {
                v.spin(a) as f64
            } else {
                hidden_z[a - n_v - 1]
            }
        })
        .collect();
    let mut zz = vec![0.0; n * n.saturating_sub(1) / 2];
    for (a, b, idx) in p.enabled_pairs() {
        zz[idx] = if b <= n_v {
            (v.spin(a) * v.spin(b)) as f64
        } else {
            // semi-restricted: no hidden-hidden pairs are enabled
            v.spin(a) as f64 * hidden_z[b - n_v - 1]
        };
    }
    Ok(ClampedAverages {
        z,
        zz,
        x: vec![0.0; n],
    })
}

/// Gradient of [`nll_bound`]: free minus data-averaged clamped expectations.
///
/// Hidden-qubit clamped averages come from exact diagonalization of the
/// reduced clamped models. The `Γ` block is emitted only on request: the
/// clamped `⟨σˣ⟩` of a visible qubit is identically zero, so the update
/// `δΓ_ν = -η ∂` can only drive visible fields to zero — the documented
/// artifact of minimizing the bound.
pub fn grad_bound(
    p: &ModelParameters,
    data: &VisibleDistribution,
    include_gamma: bool,
) -> Result<ParameterGradient> {
    check_data(p, data)?;
    let summary = GibbsSummary::for_model(p)?;
    bound_grad_with(&summary, p, data, include_gamma)
}

pub(crate) fn bound_grad_with(
    summary: &GibbsSummary,
    p: &ModelParameters,
    data: &VisibleDistribution,
    include_gamma: bool,
) -> Result<ParameterGradient> {
    let averages = |v: &SpinVector| clamped_averages_exact(p, v, include_gamma);
    bound_grad_from_positive_phase(summary, p, data, include_gamma, averages)
}

fn bound_grad_from_positive_phase(
    summary: &GibbsSummary,
    p: &ModelParameters,
    data: &VisibleDistribution,
    include_gamma: bool,
    positive: impl Fn(&SpinVector) -> Result<ClampedAverages>,
) -> Result<ParameterGradient> {
    let n = p.n_qubits();
    let moments = summary.moments();
    let mut pos_z = vec![0.0; n];
    let mut pos_zz = vec![0.0; n * n.saturating_sub(1) / 2];
    let mut pos_x = vec![0.0; n];
    for (v_index, &mass) in data.probabilities().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let v = SpinVector::from_index(v_index, p.n_visible());
        let avg = positive(&v)?;
        for a in 0..n {
            pos_z[a] += mass * avg.z[a];
            pos_x[a] += mass * avg.x[a];
        }
        for (_, _, idx) in p.enabled_pairs() {
            pos_zz[idx] += mass * avg.zz[idx];
        }
    }
    let gamma_shape = if !include_gamma {
        GammaGradient::None
    } else if p.is_shared_gamma() {
        GammaGradient::Shared(0.0)
    } else {
        GammaGradient::PerQubit(vec![0.0; n])
    };
    let mut grad = ParameterGradient::zeros(p, gamma_shape);
    for a in 1..=n {
        grad.b[a - 1] = moments.z(a) - pos_z[a - 1];
    }
    for (a, b, idx) in p.enabled_pairs() {
        grad.w[idx] = moments.zz(a, b) - pos_zz[idx];
    }
    if include_gamma {
        let per_qubit: Vec<f64> = (1..=n).map(|a| moments.x(a) - pos_x[a - 1]).collect();
        grad.gamma = if p.is_shared_gamma() {
            GammaGradient::Shared(per_qubit.iter().sum())
        } else {
            GammaGradient::PerQubit(per_qubit)
        };
    }
    Ok(grad)
}

/// Exact clamped expectation `⟨σᶻ_i⟩_v` of one uncoupled hidden qubit.
///
/// Quantum mode evaluates `(b_eff / D) tanh D` with
/// `D = sqrt(Γ² + b_eff²)`, continuously extended to zero at `D = 0`;
/// classical mode evaluates the RBM limit `tanh b_eff`. The two agree at
/// `Γ = 0`.
pub fn rqbm_hidden_expectation(gamma: f64, b_eff: f64, mode: PositivePhase) -> Result<f64> {
    if gamma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "transverse field must be non-negative, got {gamma}"
        )));
    }
    match mode {
        PositivePhase::Classical => Ok(b_eff.tanh()),
        PositivePhase::Quantum => {
            let d = gamma.hypot(b_eff);
            if d == 0.0 {
                return Ok(0.0);
            }
            Ok(b_eff / d * d.tanh())
        }
    }
}

/// Bound gradient with the analytic semi-restricted positive phase.
///
/// No diagonalization happens in the positive phase: each hidden expectation
/// is the closed form of [`rqbm_hidden_expectation`] (quantum mode) or its
/// classical limit (the bQBM-CE ablation). The negative phase is exact in
/// both modes, which is precisely the inconsistency the ablation exposes.
/// Requires a mask without hidden-hidden pairs.
pub fn grad_bound_semirestricted(
    p: &ModelParameters,
    data: &VisibleDistribution,
    mode: PositivePhase,
) -> Result<ParameterGradient> {
    check_data(p, data)?;
    check_semirestricted(p)?;
    let summary = GibbsSummary::for_model(p)?;
    semirestricted_grad_with(&summary, p, data, mode)
}

pub(crate) fn semirestricted_grad_with(
    summary: &GibbsSummary,
    p: &ModelParameters,
    data: &VisibleDistribution,
    mode: PositivePhase,
) -> Result<ParameterGradient> {
    let averages = |v: &SpinVector| clamped_averages_analytic(p, v, mode);
    bound_grad_from_positive_phase(summary, p, data, false, averages)
}

/// `KL(data ‖ model) = Σ_v P^data_v log(P^data_v / P_v) ≥ 0`.
///
/// Equals the negative log-likelihood minus the data entropy. Model support
/// must cover the data support.
pub fn kl_divergence(model: &VisibleDistribution, data: &VisibleDistribution) -> Result<f64> {
    if model.n_vars() != data.n_vars() {
        return Err(Error::LengthMismatch {
            expected: data.n_vars(),
            got: model.n_vars(),
        });
    }
    let mut kl = 0.0;
    for (pd, pm) in data.probabilities().iter().zip(model.probabilities()) {
        if *pd == 0.0 {
            continue;
        }
        if *pm == 0.0 {
            return Err(Error::SupportViolation { data_mass: *pd });
        }
        kl += pd * (pd.ln() - pm.ln());
    }
    // round-off can leave a microscopic negative for near-identical tables
    if kl < 0.0 && kl > -1e-10 {
        kl = 0.0;
    }
    Ok(kl)
}

/// Generative supervised loss: the joint `[x, y]` block is treated as one
/// visible layer, so this is [`nll_exact`] on the joint data.
pub fn generative_supervised_loss(
    p: &ModelParameters,
    joint_data: &VisibleDistribution,
) -> Result<f64> {
    nll_exact(p, joint_data)
}

/// A finite set of weighted `(x, y)` samples with real-valued inputs.
#[derive(Debug, Clone)]
pub struct DiscriminativeDataset {
    n_inputs: usize,
    n_outputs: usize,
    samples: Vec<(Vec<f64>, SpinVector, f64)>,
}

impl DiscriminativeDataset {
    pub fn new(
        n_inputs: usize,
        n_outputs: usize,
        samples: Vec<(Vec<f64>, SpinVector, f64)>,
    ) -> Result<Self> {
        let mut total = 0.0;
        for (x, y, wt) in &samples {
            if x.len() != n_inputs {
                return Err(Error::LengthMismatch {
                    expected: n_inputs,
                    got: x.len(),
                });
            }
            if y.len() != n_outputs {
                return Err(Error::LengthMismatch {
                    expected: n_outputs,
                    got: y.len(),
                });
            }
            if *wt < 0.0 {
                return Err(Error::InvalidParameter(format!("negative weight {wt}")));
            }
            total += wt;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { sum: total });
        }
        Ok(Self {
            n_inputs,
            n_outputs,
            samples,
        })
    }

    /// Converts a joint spin distribution over `[x, y]` into weighted pairs,
    /// with input spins cast to `±1.0` features. Zero-mass states are
    /// dropped.
    pub fn from_joint(joint: &VisibleDistribution, n_inputs: usize) -> Result<Self> {
        if n_inputs >= joint.n_vars() {
            return Err(Error::InvalidParameter(format!(
                "{n_inputs} inputs leave no outputs in a {}-variable joint",
                joint.n_vars()
            )));
        }
        let n_outputs = joint.n_vars() - n_inputs;
        let mut samples = Vec::new();
        for (index, &wt) in joint.probabilities().iter().enumerate() {
            if wt == 0.0 {
                continue;
            }
            let spins = SpinVector::from_index(index, joint.n_vars());
            let x: Vec<f64> = spins.spins()[..n_inputs].iter().map(|&s| s as f64).collect();
            let y = SpinVector::new(spins.spins()[n_inputs..].to_vec())?;
            samples.push((x, y, wt));
        }
        Self::new(n_inputs, n_outputs, samples)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn samples(&self) -> &[(Vec<f64>, SpinVector, f64)] {
        &self.samples
    }
}

/// Gradient over discriminative parameters `(b_a, w_ab, w_aμ)`.
#[derive(Debug, Clone)]
pub struct DiscriminativeGradient {
    n_qubits: usize,
    n_inputs: usize,
    b: Vec<f64>,
    w: Vec<f64>,
    input: Vec<f64>,
}

impl DiscriminativeGradient {
    fn zeros(dp: &DiscriminativeParameters) -> Self {
        let n = dp.qubits().n_qubits();
        Self {
            n_qubits: n,
            n_inputs: dp.n_inputs(),
            b: vec![0.0; n],
            w: vec![0.0; n * n.saturating_sub(1) / 2],
            input: vec![0.0; n * dp.n_inputs()],
        }
    }

    pub fn bias(&self, a: usize) -> f64 {
        self.b[a - 1]
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let n = self.n_qubits;
        self.w[(a - 1) * n - a * (a - 1) / 2 + (b - a - 1)]
    }

    /// `∂L̃/∂w_aμ` (qubit 1-based, feature 0-based).
    pub fn input_weight(&self, a: usize, mu: usize) -> f64 {
        self.input[(a - 1) * self.n_inputs + mu]
    }

    pub fn norm_inf(&self) -> f64 {
        self.b
            .iter()
            .chain(self.w.iter())
            .chain(self.input.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Discriminative bound loss
/// `-Σ_{x,y} P^data_{x,y} log( Tr[e^{-H_{x,y}}] / Tr[e^{-H_x}] )`.
pub fn discriminative_loss_bound(
    dp: &DiscriminativeParameters,
    dataset: &DiscriminativeDataset,
) -> Result<f64> {
    check_discriminative(dp, dataset)?;
    let mut loss = 0.0;
    for (x, y, wt) in dataset.samples() {
        if *wt == 0.0 {
            continue;
        }
        let p_x = discriminative_hamiltonian(dp, x)?;
        let log_zx = GibbsSummary::for_model(&p_x)?.log_partition();
        let clamped = clamp_prefix(&p_x, y)?;
        let log_txy = if clamped.params.n_qubits() == 0 {
            -clamped.offset
        } else {
            -clamped.offset + GibbsSummary::for_model(&clamped.params)?.log_partition()
        };
        loss -= wt * (log_txy - log_zx);
    }
    Ok(loss)
}

/// Gradient of [`discriminative_loss_bound`].
///
/// The input `x` is clamped in both phases: the positive phase clamps the
/// outputs to `y` as well, the negative phase leaves them free under `H_x`.
pub fn discriminative_grad_bound(
    dp: &DiscriminativeParameters,
    dataset: &DiscriminativeDataset,
) -> Result<DiscriminativeGradient> {
    check_discriminative(dp, dataset)?;
    let n = dp.qubits().n_qubits();
    let n_y = dp.n_outputs();
    let mut grad = DiscriminativeGradient::zeros(dp);
    for (x, y, wt) in dataset.samples() {
        if *wt == 0.0 {
            continue;
        }
        let p_x = discriminative_hamiltonian(dp, x)?;
        let free = GibbsSummary::for_model(&p_x)?.moments();
        let clamped = clamp_prefix(&p_x, y)?;
        let hidden_moments: Option<MomentSet> = if clamped.params.n_qubits() > 0 {
            Some(GibbsSummary::for_model(&clamped.params)?.moments())
        } else {
            None
        };
        let clamped_z = |a: usize| -> f64 {
            if a <= n_y {
                y.spin(a) as f64
            } else {
                hidden_moments.as_ref().unwrap().z(a - n_y)
            }
        };
        for a in 1..=n {
            let diff = free.z(a) - clamped_z(a);
            grad.b[a - 1] += wt * diff;
            for (mu, &xv) in x.iter().enumerate() {
                grad.input[(a - 1) * dp.n_inputs() + mu] += wt * xv * diff;
            }
        }
        for (a, b, idx) in dp.qubits().enabled_pairs() {
            let clamped_zz = if b <= n_y {
                (y.spin(a) * y.spin(b)) as f64
            } else if a <= n_y {
                y.spin(a) as f64 * hidden_moments.as_ref().unwrap().z(b - n_y)
            } else {
                hidden_moments.as_ref().unwrap().zz(a - n_y, b - n_y)
            };
            grad.w[idx] += wt * (free.zz(a, b) - clamped_zz);
        }
    }
    Ok(grad)
}

fn check_discriminative(
    dp: &DiscriminativeParameters,
    dataset: &DiscriminativeDataset,
) -> Result<()> {
    if dataset.n_inputs() != dp.n_inputs() {
        return Err(Error::LengthMismatch {
            expected: dp.n_inputs(),
            got: dataset.n_inputs(),
        });
    }
    if dataset.n_outputs() != dp.n_outputs() {
        return Err(Error::LengthMismatch {
            expected: dp.n_outputs(),
            got: dataset.n_outputs(),
        });
    }
    Ok(())
}

/// Exact discriminative negative log-likelihood
/// `-Σ_{x,y} P^data_{x,y} log P(y|x)` with
/// `P(y|x) = Tr[Λ_y e^{-H_x}] / Tr[e^{-H_x}]`.
pub fn discriminative_loss_exact(
    dp: &DiscriminativeParameters,
    dataset: &DiscriminativeDataset,
) -> Result<f64> {
    check_discriminative(dp, dataset)?;
    let mut loss = 0.0;
    for (x, y, wt) in dataset.samples() {
        if *wt == 0.0 {
            continue;
        }
        let p_x = discriminative_hamiltonian(dp, x)?;
        let conditional = visible_marginals(&p_x)?;
        let prob = conditional.prob_of(y);
        if prob < 1e-300 {
            return Err(Error::ProbabilityUnderflow);
        }
        loss -= wt * prob.ln();
    }
    Ok(loss)
}

/// Most probable output under the exact conditional for a generative model:
/// `argmax_y P(y|x)`, ties broken toward the lowest output index.
pub fn predict_label(p: &ModelParameters, x: &SpinVector) -> Result<SpinVector> {
    let conditional = conditional_distribution(p, x)?;
    Ok(argmax_state(&conditional))
}

/// Most probable output of a discriminative model for feature vector `x`.
pub fn predict_label_discriminative(
    dp: &DiscriminativeParameters,
    x: &[f64],
) -> Result<SpinVector> {
    let p_x = discriminative_hamiltonian(dp, x)?;
    let conditional = visible_marginals(&p_x)?;
    Ok(argmax_state(&conditional))
}

fn argmax_state(dist: &VisibleDistribution) -> SpinVector {
    let mut best = 0;
    let mut best_p = dist.prob(0);
    for (i, &p) in dist.probabilities().iter().enumerate().skip(1) {
        if p > best_p {
            best = i;
            best_p = p;
        }
    }
    SpinVector::from_index(best, dist.n_vars())
}

/// Which Γ components a finite-difference gradient should probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaMode {
    None,
    Shared,
    PerQubit,
}

/// Central finite differences `(L(θ+ε) - L(θ-ε)) / 2ε` of an arbitrary
/// objective over the model's trainable parameters.
///
/// This is the testing oracle for the analytic gradients; it stays
/// independent of every closed-form gradient path. Γ probes need
/// `Γ_a ≥ ε` so the `-ε` leg stays feasible.
pub fn finite_difference_gradient<F>(
    mut loss: F,
    p: &ModelParameters,
    eps: f64,
    gamma: GammaMode,
) -> Result<ParameterGradient>
where
    F: FnMut(&ModelParameters) -> Result<f64>,
{
    if eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {eps}"
        )));
    }
    let n = p.n_qubits();
    let gamma_shape = match gamma {
        GammaMode::None => GammaGradient::None,
        GammaMode::Shared => GammaGradient::Shared(0.0),
        GammaMode::PerQubit => GammaGradient::PerQubit(vec![0.0; n]),
    };
    let mut grad = ParameterGradient::zeros(p, gamma_shape);
    for a in 1..=n {
        let base = p.bias(a);
        let mut plus = p.clone();
        plus.set_bias(a, base + eps);
        let mut minus = p.clone();
        minus.set_bias(a, base - eps);
        grad.b[a - 1] = (loss(&plus)? - loss(&minus)?) / (2.0 * eps);
    }
    for (a, b, idx) in p.enabled_pairs() {
        let base = p.coupling(a, b);
        let mut plus = p.clone();
        plus.set_coupling(a, b, base + eps)?;
        let mut minus = p.clone();
        minus.set_coupling(a, b, base - eps)?;
        grad.w[idx] = (loss(&plus)? - loss(&minus)?) / (2.0 * eps);
    }
    match gamma {
        GammaMode::None => {}
        GammaMode::Shared => {
            let base = p.shared_gamma_value();
            let mut plus = p.clone();
            plus.set_shared_gamma(base + eps)?;
            let mut minus = p.clone();
            minus.set_shared_gamma(base - eps)?;
            grad.gamma = GammaGradient::Shared((loss(&plus)? - loss(&minus)?) / (2.0 * eps));
        }
        GammaMode::PerQubit => {
            let mut components = vec![0.0; n];
            for a in 1..=n {
                let base = p.gamma(a);
                let mut plus = p.clone();
                plus.set_gamma(a, base + eps)?;
                let mut minus = p.clone();
                minus.set_gamma(a, base - eps)?;
                components[a - 1] = (loss(&plus)? - loss(&minus)?) / (2.0 * eps);
            }
            grad.gamma = GammaGradient::PerQubit(components);
        }
    }
    Ok(grad)
}

/// Central finite differences over discriminative parameters.
pub fn finite_difference_gradient_discriminative<F>(
    mut loss: F,
    dp: &DiscriminativeParameters,
    eps: f64,
) -> Result<DiscriminativeGradient>
where
    F: FnMut(&DiscriminativeParameters) -> Result<f64>,
{
    if eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {eps}"
        )));
    }
    let n = dp.qubits().n_qubits();
    let mut grad = DiscriminativeGradient::zeros(dp);
    for a in 1..=n {
        let base = dp.qubits().bias(a);
        let mut plus = dp.clone();
        plus.qubits_mut().set_bias(a, base + eps);
        let mut minus = dp.clone();
        minus.qubits_mut().set_bias(a, base - eps);
        grad.b[a - 1] = (loss(&plus)? - loss(&minus)?) / (2.0 * eps);
    }
    let pairs: Vec<(usize, usize, usize)> = dp.qubits().enabled_pairs().collect();
    for (a, b, idx) in pairs {
        let base = dp.qubits().coupling(a, b);
        let mut plus = dp.clone();
        plus.qubits_mut().set_coupling(a, b, base + eps)?;
        let mut minus = dp.clone();
        minus.qubits_mut().set_coupling(a, b, base - eps)?;
        grad.w[idx] = (loss(&plus)? - loss(&minus)?) / (2.0 * eps);
    }
    for a in 1..=n {
        for mu in 0..dp.n_inputs() {
            let base = dp.input_weight(a, mu);
            let mut plus = dp.clone();
            plus.set_input_weight(a, mu, base + eps);
            let mut minus = dp.clone();
            minus.set_input_weight(a, mu, base - eps);
            grad.input[(a - 1) * dp.n_inputs() + mu] =
                (loss(&plus)? - loss(&minus)?) / (2.0 * eps);
        }
    }
    Ok(grad)
}
