//! Gradient-descent and BFGS training loops.
//!
//! Both optimizers work on a flat parameter vector assembled from biases,
//! enabled couplings and (optionally) transverse fields, record one trace row
//! per accepted iteration plus the starting point, and project Γ back to
//! `Γ ≥ 0` after every step. The expensive part of an evaluation — one
//! `2^n` eigendecomposition — is memoized on the exact parameter bits, so
//! the gradient at a point accepted by the line search reuses the
//! decomposition computed when the line search last probed it.

use std::time::Instant;

use crate::engine::GibbsSummary;
use crate::error::{Error, Result};
use crate::model::{
    discriminative_hamiltonian, DiscriminativeParameters, ModelParameters, VisibleDistribution,
};
use crate::training::{
    bound_grad_with, bound_loss_with, exact_grad_with, exact_loss_with, kl_divergence,
    semirestricted_grad_with, semirestricted_loss_with, DiscriminativeDataset, GammaGradient,
    LossKind, ParameterGradient,
};

/// Optimization method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GradientDescent,
    Bfgs,
}

/// Optimizer settings; defaults follow the training conventions of this
/// crate (η = 0.05, gradient ∞-norm tolerance 1e-5, 500 iterations max,
/// Armijo backtracking with c = 1e-4 and halving).
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Gradient-descent step size η.
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stop when the gradient ∞-norm falls below this.
    pub gradient_tolerance: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo_constant: f64,
    /// Line-search step contraction factor.
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Curvature product below which the BFGS update is skipped.
    pub curvature_threshold: f64,
    /// Train the transverse fields (exact loss only).
    pub gamma_trainable: bool,
    /// Force all transverse fields to this value before training.
    pub gamma_fixed: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::Bfgs,
            learning_rate: 0.05,
            max_iterations: 500,
            gradient_tolerance: 1e-5,
            armijo_constant: 1e-4,
            backtrack_factor: 0.5,
            max_backtracks: 40,
            curvature_threshold: 1e-10,
            gamma_trainable: false,
            gamma_fixed: None,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.gradient_tolerance <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gradient tolerance must be positive, got {}",
                self.gradient_tolerance
            )));
        }
        Ok(())
    }
}

/// One accepted iteration of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: u64,
    /// Objective value at this iterate.
    pub loss: f64,
    /// Exact KL divergence of the data from the model distribution.
    pub kl: f64,
    pub e_cl: f64,
    pub e_q: f64,
    /// Shared transverse field (mean over qubits if untied).
    pub gamma: f64,
    /// Gradient ∞-norm at this iterate.
    pub grad_norm: f64,
    /// Wall-clock milliseconds since the previous record.
    pub wall_ms: f64,
    /// The BFGS line search fell back to a steepest-descent step.
    pub line_search_fallback: bool,
}

/// How a training run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingOutcome {
    /// Gradient norm fell below tolerance.
    Converged,
    MaxIterations,
    /// Loss increased for 50 consecutive gradient-descent iterations.
    Diverged,
    /// Backtracking failed along both the quasi-Newton and steepest-descent
    /// directions.
    LineSearchFailure,
}

/// Per-iteration history of a training run.
#[derive(Debug, Clone)]
pub struct TrainingTrace {
    pub records: Vec<IterationRecord>,
    pub outcome: TrainingOutcome,
}

impl TrainingTrace {
    pub fn final_record(&self) -> Option<&IterationRecord> {
        self.records.last()
    }
}

struct TraceMetrics {
    loss: f64,
    kl: f64,
    e_cl: f64,
    e_q: f64,
    gamma: f64,
}

/// Flat-vector view of an objective; the optimizer loops are written against
/// this so generative and discriminative trainers share them.
trait ObjectiveCore {
    fn initial(&self) -> Vec<f64>;
    fn project(&self, x: &mut [f64]);
    fn loss(&mut self, x: &[f64]) -> Result<f64>;
    fn loss_grad(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)>;
    fn metrics(&mut self, x: &[f64]) -> Result<TraceMetrics>;
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// generative objective
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GammaLayout {
    Fixed,
    Shared,
    PerQubit,
}

struct GenerativeCore<'a> {
    template: ModelParameters,
    data: &'a VisibleDistribution,
    kind: LossKind,
    pairs: Vec<(usize, usize, usize)>,
    gamma_layout: GammaLayout,
    cache: Option<(Vec<u64>, ModelParameters, GibbsSummary)>,
}

impl<'a> GenerativeCore<'a> {
    fn new(
        p0: &ModelParameters,
        data: &'a VisibleDistribution,
        config: &OptimizerConfig,
        kind: LossKind,
    ) -> Result<Self> {
        let mut template = p0.clone();
        if let Some(g) = config.gamma_fixed {
            template.set_shared_gamma(g)?;
        }
        let gamma_layout = if !config.gamma_trainable {
            GammaLayout::Fixed
        } else if !matches!(kind, LossKind::Exact) {
            return Err(Error::InvalidConfig(
                "transverse fields are trainable only through the exact loss".into(),
            ));
        } else if template.is_shared_gamma() {
            GammaLayout::Shared
        } else {
            GammaLayout::PerQubit
        };
        let pairs = template.enabled_pairs().collect();
        Ok(Self {
            template,
            data,
            kind,
            pairs,
            gamma_layout,
            cache: None,
        })
    }

    fn params_for(&self, x: &[f64]) -> ModelParameters {
        let mut p = self.template.clone();
        let n = p.n_qubits();
        for a in 0..n {
            p.set_bias(a + 1, x[a]);
        }
        for (slot, &(a, b, _)) in self.pairs.iter().enumerate() {
            p.set_coupling(a, b, x[n + slot]).expect("enabled pair");
        }
        let base = n + self.pairs.len();
        match self.gamma_layout {
            GammaLayout::Fixed => {}
            GammaLayout::Shared => {
                p.set_shared_gamma(x[base].max(0.0)).expect("non-negative");
            }
            GammaLayout::PerQubit => {
                for a in 0..n {
                    p.set_gamma(a + 1, x[base + a].max(0.0))
                        .expect("non-negative");
                }
            }
        }
        p
    }

    fn grad_vec(&self, g: &ParameterGradient) -> Vec<f64> {
        let n = self.template.n_qubits();
        let mut out = Vec::with_capacity(n + self.pairs.len() + 1);
        out.extend_from_slice(g.biases());
        for &(_, _, idx) in &self.pairs {
            out.push(g.couplings()[idx]);
        }
        match (self.gamma_layout, g.gamma()) {
            (GammaLayout::Fixed, _) => {}
            (GammaLayout::Shared, GammaGradient::Shared(v)) => out.push(*v),
            (GammaLayout::PerQubit, GammaGradient::PerQubit(vs)) => out.extend_from_slice(vs),
            _ => unreachable!("gradient shape follows the parameter layout"),
        }
        out
    }

    fn cached(&mut self, x: &[f64]) -> Result<&(Vec<u64>, ModelParameters, GibbsSummary)> {
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        let hit = matches!(&self.cache, Some((k, _, _)) if *k == key);
        if !hit {
            let p = self.params_for(x);
            let summary = GibbsSummary::for_model(&p)?;
            self.cache = Some((key, p, summary));
        }
        Ok(self.cache.as_ref().unwrap())
    }
}

impl ObjectiveCore for GenerativeCore<'_> {
    fn initial(&self) -> Vec<f64> {
        let p = &self.template;
        let n = p.n_qubits();
        let mut x = Vec::new();
        x.extend_from_slice(p.biases());
        for &(a, b, _) in &self.pairs {
            x.push(p.coupling(a, b));
        }
        match self.gamma_layout {
            GammaLayout::Fixed => {}
            GammaLayout::Shared => x.push(p.shared_gamma_value()),
            GammaLayout::PerQubit => x.extend_from_slice(p.gammas()),
        }
        let _ = n;
        x
    }

    fn project(&self, x: &mut [f64]) {
        let base = self.template.n_qubits() + self.pairs.len();
        match self.gamma_layout {
            GammaLayout::Fixed => {}
            GammaLayout::Shared => x[base] = x[base].max(0.0),
            GammaLayout::PerQubit => {
                for v in &mut x[base..] {
                    *v = v.max(0.0);
                }
            }
        }
    }

    fn loss(&mut self, x: &[f64]) -> Result<f64> {
        let kind = self.kind;
        let data = self.data;
        let (_, p, summary) = self.cached(x)?;
        match kind {
            LossKind::Exact => exact_loss_with(summary, p, data),
            LossKind::Bound => bound_loss_with(summary, p, data),
            LossKind::SemiRestricted(mode) => semirestricted_loss_with(summary, p, data, mode),
        }
    }

    fn loss_grad(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let kind = self.kind;
        let data = self.data;
        let include_gamma = self.gamma_layout != GammaLayout::Fixed;
        let (_, p, summary) = self.cached(x)?;
        let (loss, grad) = match kind {
            LossKind::Exact => (
                exact_loss_with(summary, p, data)?,
                exact_grad_with(summary, p, data)?,
            ),
            LossKind::Bound => (
                bound_loss_with(summary, p, data)?,
                bound_grad_with(summary, p, data, include_gamma)?,
            ),
            LossKind::SemiRestricted(mode) => (
                semirestricted_loss_with(summary, p, data, mode)?,
                semirestricted_grad_with(summary, p, data, mode)?,
            ),
        };
        let flat = self.grad_vec(&grad);
        Ok((loss, flat))
    }

    fn metrics(&mut self, x: &[f64]) -> Result<TraceMetrics> {
        let loss = self.loss(x)?;
        let data = self.data;
        let (_, p, summary) = self.cache.as_ref().expect("cache filled by loss");
        let sums = summary.visible_block_sums(p.n_visible());
        let total = summary.trace_scaled();
        let marginals = VisibleDistribution::new(
            p.n_visible(),
            sums.iter().map(|s| s / total).collect(),
        )?;
        let kl = kl_divergence(&marginals, data)?;
        let energy = summary.energy_decomposition(p);
        let gamma = p.gammas().iter().sum::<f64>() / p.n_qubits().max(1) as f64;
        Ok(TraceMetrics {
            loss,
            kl,
            e_cl: energy.e_cl,
            e_q: energy.e_q,
            gamma,
        })
    }
}

// ---------------------------------------------------------------------------
// discriminative objective
// ---------------------------------------------------------------------------

struct DiscriminativeCore<'a> {
    template: DiscriminativeParameters,
    dataset: &'a DiscriminativeDataset,
    pairs: Vec<(usize, usize, usize)>,
    /// `-Σ wt log P^data(y|x)`, the attainable loss floor.
    data_conditional_entropy: f64,
}

impl<'a> DiscriminativeCore<'a> {
    fn new(
        dp0: &DiscriminativeParameters,
        dataset: &'a DiscriminativeDataset,
        config: &OptimizerConfig,
    ) -> Result<Self> {
        if config.gamma_trainable {
            return Err(Error::InvalidConfig(
                "the discriminative trainer does not train transverse fields".into(),
            ));
        }
        let mut template = dp0.clone();
        if let Some(g) = config.gamma_fixed {
            template.qubits_mut().set_shared_gamma(g)?;
        }
        // P^data(x) by summing weights over y for each distinct x
        let mut entropy = 0.0;
        for (x, _, wt) in dataset.samples() {
            if *wt == 0.0 {
                continue;
            }
            let px: f64 = dataset
                .samples()
                .iter()
                .filter(|(ox, _, _)| ox == x)
                .map(|(_, _, w)| w)
                .sum();
            entropy -= wt * (wt / px).ln();
        }
        let pairs = template.qubits().enabled_pairs().collect();
        Ok(Self {
            template,
            dataset,
            pairs,
            data_conditional_entropy: entropy,
        })
    }

    fn params_for(&self, x: &[f64]) -> DiscriminativeParameters {
        let mut dp = self.template.clone();
        let n = dp.qubits().n_qubits();
        for a in 0..n {
            dp.qubits_mut().set_bias(a + 1, x[a]);
        }
        for (slot, &(a, b, _)) in self.pairs.iter().enumerate() {
            dp.qubits_mut()
                .set_coupling(a, b, x[n + slot])
                .expect("enabled pair");
        }
        let base = n + self.pairs.len();
        let n_in = dp.n_inputs();
        for a in 1..=n {
            for mu in 0..n_in {
                dp.set_input_weight(a, mu, x[base + (a - 1) * n_in + mu]);
            }
        }
        dp
    }
}

impl ObjectiveCore for DiscriminativeCore<'_> {
    fn initial(&self) -> Vec<f64> {
        let dp = &self.template;
        let n = dp.qubits().n_qubits();
        let mut x = Vec::new();
        x.extend_from_slice(dp.qubits().biases());
        for &(a, b, _) in &self.pairs {
            x.push(dp.qubits().coupling(a, b));
        }
        for a in 1..=n {
            for mu in 0..dp.n_inputs() {
                x.push(dp.input_weight(a, mu));
            }
        }
        x
    }

    fn project(&self, _x: &mut [f64]) {}

    fn loss(&mut self, x: &[f64]) -> Result<f64> {
        let dp = self.params_for(x);
        crate::training::discriminative_loss_bound(&dp, self.dataset)
    }

    fn loss_grad(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let dp = self.params_for(x);
        let loss = crate::training::discriminative_loss_bound(&dp, self.dataset)?;
        let grad = crate::training::discriminative_grad_bound(&dp, self.dataset)?;
        let n = dp.qubits().n_qubits();
        let mut flat = Vec::new();
        flat.extend((1..=n).map(|a| grad.bias(a)));
        for &(a, b, _) in &self.pairs {
            flat.push(grad.coupling(a, b));
        }
        for a in 1..=n {
            for mu in 0..dp.n_inputs() {
                flat.push(grad.input_weight(a, mu));
            }
        }
        Ok((loss, flat))
    }

    fn metrics(&mut self, x: &[f64]) -> Result<TraceMetrics> {
        let dp = self.params_for(x);
        let loss = crate::training::discriminative_loss_bound(&dp, self.dataset)?;
        let exact = crate::training::discriminative_loss_exact(&dp, self.dataset)?;
        let mut kl = exact - self.data_conditional_entropy;
        if kl < 0.0 && kl > -1e-10 {
            kl = 0.0;
        }
        // data-weighted Gibbs energies of the input-clamped models
        let mut e_cl = 0.0;
        let mut e_q = 0.0;
        let mut seen = 0.0;
        for (x_in, _, wt) in self.dataset.samples() {
            if *wt == 0.0 {
                continue;
            }
            let p_x = discriminative_hamiltonian(&dp, x_in)?;
            let summary = GibbsSummary::for_model(&p_x)?;
            let e = summary.energy_decomposition(&p_x);
            e_cl += wt * e.e_cl;
            e_q += wt * e.e_q;
            seen += wt;
        }
        let _ = seen;
        let q = dp.qubits();
        let gamma = q.gammas().iter().sum::<f64>() / q.n_qubits().max(1) as f64;
        Ok(TraceMetrics {
            loss,
            kl,
            e_cl,
            e_q,
            gamma,
        })
    }
}

// ---------------------------------------------------------------------------
// optimizer loops
// ---------------------------------------------------------------------------

struct Recorder {
    records: Vec<IterationRecord>,
    last_instant: Instant,
}

impl Recorder {
    fn new() -> Self {
        Self {
            records: Vec::new(),
            last_instant: Instant::now(),
        }
    }

    fn push(
        &mut self,
        iteration: u64,
        metrics: &TraceMetrics,
        grad_norm: f64,
        fallback: bool,
    ) {
        let now = Instant::now();
        let wall_ms = now.duration_since(self.last_instant).as_secs_f64() * 1e3;
        self.last_instant = now;
        self.records.push(IterationRecord {
            iteration,
            loss: metrics.loss,
            kl: metrics.kl,
            e_cl: metrics.e_cl,
            e_q: metrics.e_q,
            gamma: metrics.gamma,
            grad_norm,
            wall_ms,
            line_search_fallback: fallback,
        });
    }
}

fn run_gradient_descent(
    core: &mut dyn ObjectiveCore,
    config: &OptimizerConfig,
) -> Result<(Vec<f64>, TrainingTrace)> {
    config.validate()?;
    let mut x = core.initial();
    core.project(&mut x);
    let (mut loss, mut grad) = core.loss_grad(&x)?;
    let mut recorder = Recorder::new();
    let m = core.metrics(&x)?;
    recorder.push(0, &m, norm_inf(&grad), false);

    let mut outcome = TrainingOutcome::MaxIterations;
    let mut rising = 0usize;
    for iteration in 1..=config.max_iterations {
        if norm_inf(&grad) < config.gradient_tolerance {
            outcome = TrainingOutcome::Converged;
            break;
        }
        for (xi, gi) in x.iter_mut().zip(&grad) {
            *xi -= config.learning_rate * gi;
        }
        core.project(&mut x);
        let (new_loss, new_grad) = core.loss_grad(&x)?;
        let metrics = core.metrics(&x)?;
        recorder.push(iteration as u64, &metrics, norm_inf(&new_grad), false);
        rising = if new_loss > loss { rising + 1 } else { 0 };
        loss = new_loss;
        grad = new_grad;
        if rising >= 50 {
            outcome = TrainingOutcome::Diverged;
            break;
        }
        if iteration == config.max_iterations {
            outcome = TrainingOutcome::MaxIterations;
        }
    }
    if norm_inf(&grad) < config.gradient_tolerance && outcome == TrainingOutcome::MaxIterations {
        outcome = TrainingOutcome::Converged;
    }
    Ok((
        x,
        TrainingTrace {
            records: recorder.records,
            outcome,
        },
    ))
}

/// Backtracking Armijo search from `alpha = 1`; returns the accepted point.
fn backtrack(
    core: &mut dyn ObjectiveCore,
    config: &OptimizerConfig,
    x: &[f64],
    loss: f64,
    grad: &[f64],
    direction: &[f64],
) -> Result<Option<(Vec<f64>, f64)>> {
    let slope = dot(grad, direction);
    let mut alpha = 1.0;
    for _ in 0..=config.max_backtracks {
        let mut trial: Vec<f64> = x
            .iter()
            .zip(direction)
            .map(|(xi, di)| xi + alpha * di)
            .collect();
        core.project(&mut trial);
        let trial_loss = core.loss(&trial)?;
        if trial_loss.is_finite() && trial_loss <= loss + config.armijo_constant * alpha * slope {
            return Ok(Some((trial, trial_loss)));
        }
        alpha *= config.backtrack_factor;
    }
    Ok(None)
}

fn run_bfgs(
    core: &mut dyn ObjectiveCore,
    config: &OptimizerConfig,
) -> Result<(Vec<f64>, TrainingTrace)> {
    config.validate()?;
    let mut x = core.initial();
    core.project(&mut x);
    let dim = x.len();
    let (mut loss, mut grad) = core.loss_grad(&x)?;
    let mut recorder = Recorder::new();
    let m = core.metrics(&x)?;
    recorder.push(0, &m, norm_inf(&grad), false);

    // dense inverse-Hessian approximation, identity start
    let mut h_inv = faer::Mat::<f64>::identity(dim, dim);
    let mut outcome = TrainingOutcome::MaxIterations;

    for iteration in 1..=config.max_iterations {
        if norm_inf(&grad) < config.gradient_tolerance {
            outcome = TrainingOutcome::Converged;
            break;
        }
        // d = -H_inv g
        let mut direction = vec![0.0; dim];
        for i in 0..dim {
            let mut acc = 0.0;
            for j in 0..dim {
                acc += h_inv[(i, j)] * grad[j];
            }
            direction[i] = -acc;
        }
        let mut fallback = false;
        if dot(&direction, &grad) >= 0.0 {
            // not a descent direction; reset the curvature model
            direction = grad.iter().map(|g| -g).collect();
            h_inv = faer::Mat::identity(dim, dim);
            fallback = true;
        }
        let mut accepted = backtrack(core, config, &x, loss, &grad, &direction)?;
        if accepted.is_none() && !fallback {
            // steepest-descent fallback
            direction = grad.iter().map(|g| -g).collect();
            h_inv = faer::Mat::identity(dim, dim);
            fallback = true;
            accepted = backtrack(core, config, &x, loss, &grad, &direction)?;
        }
        let Some((x_new, loss_new)) = accepted else {
            outcome = TrainingOutcome::LineSearchFailure;
            break;
        };
        let (_, grad_new) = core.loss_grad(&x_new)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = grad_new.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > config.curvature_threshold {
            // H <- (I - s yᵀ/sy) H (I - y sᵀ/sy) + s sᵀ/sy
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..dim)
                .map(|i| (0..dim).map(|j| h_inv[(i, j)] * y[j]).sum())
                .collect();
            let yhy = dot(&y, &hy);
            for i in 0..dim {
                for j in 0..dim {
                    let update = -rho * (s[i] * hy[j] + hy[i] * s[j])
                        + rho * rho * yhy * s[i] * s[j]
                        + rho * s[i] * s[j];
                    h_inv[(i, j)] += update;
                }
            }
        }
        x = x_new;
        loss = loss_new;
        grad = grad_new;
        let metrics = core.metrics(&x)?;
        recorder.push(iteration as u64, &metrics, norm_inf(&grad), fallback);
    }
    if norm_inf(&grad) < config.gradient_tolerance && outcome == TrainingOutcome::MaxIterations {
        outcome = TrainingOutcome::Converged;
    }
    Ok((
        x,
        TrainingTrace {
            records: recorder.records,
            outcome,
        },
    ))
}

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

/// Trains by plain gradient descent `δθ = -η ∂L`.
///
/// Aborts with [`TrainingOutcome::Diverged`] after 50 consecutive loss
/// increases.
pub fn gradient_descent(
    p0: &ModelParameters,
    data: &VisibleDistribution,
    config: &OptimizerConfig,
    kind: LossKind,
) -> Result<(ModelParameters, TrainingTrace)> {
    let mut core = GenerativeCore::new(p0, data, config, kind)?;
    let (x, trace) = run_gradient_descent(&mut core, config)?;
    Ok((core.params_for(&x), trace))
}

/// Trains by BFGS with backtracking Armijo line search.
///
/// The inverse Hessian starts at the identity and skips updates whose
/// curvature product is non-positive; a failed line search falls back to one
/// steepest-descent step and flags the trace row.
pub fn bfgs_minimize(
    p0: &ModelParameters,
    data: &VisibleDistribution,
    config: &OptimizerConfig,
    kind: LossKind,
) -> Result<(ModelParameters, TrainingTrace)> {
    let mut core = GenerativeCore::new(p0, data, config, kind)?;
    let (x, trace) = run_bfgs(&mut core, config)?;
    Ok((core.params_for(&x), trace))
}

/// Gradient descent on the discriminative bound loss.
pub fn gradient_descent_discriminative(
    dp0: &DiscriminativeParameters,
    dataset: &DiscriminativeDataset,
    config: &OptimizerConfig,
) -> Result<(DiscriminativeParameters, TrainingTrace)> {
    let mut core = DiscriminativeCore::new(dp0, dataset, config)?;
    let (x, trace) = run_gradient_descent(&mut core, config)?;
    Ok((core.params_for(&x), trace))
}

/// BFGS on the discriminative bound loss.
pub fn bfgs_minimize_discriminative(
    dp0: &DiscriminativeParameters,
    dataset: &DiscriminativeDataset,
    config: &OptimizerConfig,
) -> Result<(DiscriminativeParameters, TrainingTrace)> {
    let mut core = DiscriminativeCore::new(dp0, dataset, config)?;
    let (x, trace) = run_bfgs(&mut core, config)?;
    Ok((core.params_for(&x), trace))
}
