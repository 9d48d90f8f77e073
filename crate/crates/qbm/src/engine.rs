//! Internal evaluation core: shifted Gibbs summaries of a model.
//!
//! Every loss, marginal and moment in the crate reduces to a handful of
//! quantities derived from `B = e^{-(H - λ_min I)}`: its diagonal, its trace
//! and (for quantum models) the spectral decomposition behind it. Computing
//! them once per parameter point and sharing the result keeps the number of
//! `2^n` eigendecompositions per training iteration at one.
//!
//! Classical models (`Γ = 0`) never touch a dense matrix: `H` is diagonal
//! with the enumerated Ising energies, so the summary is assembled directly
//! from `e^{-(E_k - E_min)}` in `O(2^n)` time.

use crate::basis;
use crate::error::Result;
use crate::model::{build_hamiltonian, EnergyDecomposition, ModelParameters, MomentSet};
use crate::operator::{spectral_decompose, SpectralDecomposition};

pub(crate) struct SpectralData {
    pub decomp: SpectralDecomposition,
    /// `e^{-(λ_i - shift)}`
    pub weights: Vec<f64>,
}

/// Shifted Gibbs data for one parameter point.
pub(crate) struct GibbsSummary {
    n_qubits: usize,
    shift: f64,
    trace_scaled: f64,
    diag: Vec<f64>,
    spectral: Option<SpectralData>,
}

impl GibbsSummary {
    pub fn for_model(p: &ModelParameters) -> Result<Self> {
        p.check_guard()?;
        if p.is_classical() {
            Ok(Self::classical(p.n_qubits(), &p.classical_energies()))
        } else {
            Self::quantum(p)
        }
    }

    fn classical(n_qubits: usize, energies: &[f64]) -> Self {
        let shift = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let diag: Vec<f64> = energies.iter().map(|e| (-(e - shift)).exp()).collect();
        let trace_scaled = diag.iter().sum();
        GibbsSummary {
            n_qubits,
            shift,
            trace_scaled,
            diag,
            spectral: None,
        }
    }

    fn quantum(p: &ModelParameters) -> Result<Self> {
        let h = build_hamiltonian(p)?;
        let decomp = spectral_decompose(&h)?;
        let shift = decomp.eigenvalues().first().copied().unwrap_or(0.0);
        let weights: Vec<f64> = decomp
            .eigenvalues()
            .iter()
            .map(|l| (-(l - shift)).exp())
            .collect();
        let v = decomp.eigenvectors();
        let dim = decomp.dimension();
        let mut diag = vec![0.0; dim];
        for (j, &w) in weights.iter().enumerate() {
            for (k, d) in diag.iter_mut().enumerate() {
                let e = v[(k, j)];
                *d += w * e * e;
            }
        }
        let trace_scaled = weights.iter().sum();
        Ok(GibbsSummary {
            n_qubits: p.n_qubits(),
            shift,
            trace_scaled,
            diag,
            spectral: Some(SpectralData { decomp, weights }),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `Tr B`.
    pub fn trace_scaled(&self) -> f64 {
        self.trace_scaled
    }

    /// `log Tr e^{-H}`, shift-free.
    pub fn log_partition(&self) -> f64 {
        -self.shift + self.trace_scaled.ln()
    }

    /// Diagonal of `B`.
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn spectral(&self) -> Option<&SpectralData> {
        self.spectral.as_ref()
    }

    /// Basis-state probabilities `diag(ρ)`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.diag.iter().map(|d| d / self.trace_scaled).collect()
    }

    /// Sums of `diag B` over the hidden block for every visible state.
    ///
    /// Visible qubits occupy the leading bits, so block `v` is the contiguous
    /// slice `[v * 2^h, (v+1) * 2^h)`.
    pub fn visible_block_sums(&self, n_visible: usize) -> Vec<f64> {
        let block = 1usize << (self.n_qubits - n_visible);
        (0..1usize << n_visible)
            .map(|v| self.diag[v * block..(v + 1) * block].iter().sum())
            .collect()
    }

    /// `⟨σˣ_a⟩` from the spectral data; zero for classical summaries.
    pub fn x_moment(&self, a: usize) -> f64 {
        let Some(spectral) = &self.spectral else {
            return 0.0;
        };
        let v = spectral.decomp.eigenvectors();
        let dim = spectral.decomp.dimension();
        let mut total = 0.0;
        for (j, &w) in spectral.weights.iter().enumerate() {
            let mut s = 0.0;
            for k in 0..dim {
                s += v[(k, j)] * v[(basis::flip(k, a, self.n_qubits), j)];
            }
            total += w * s;
        }
        total / self.trace_scaled
    }

    /// Full first/second σᶻ and first σˣ moments.
    pub fn moments(&self) -> MomentSet {
        let n = self.n_qubits;
        let probs = self.probabilities();
        let mut z = vec![0.0; n];
        for a in 1..=n {
            z[a - 1] = probs
                .iter()
                .enumerate()
                .map(|(k, p)| p * basis::spin(k, a, n) as f64)
                .sum();
        }
        let mut zz = vec![0.0; n * n.saturating_sub(1) / 2];
        let mut idx = 0;
        for a in 1..=n {
            for b in (a + 1)..=n {
                zz[idx] = probs
                    .iter()
                    .enumerate()
                    .map(|(k, p)| p * (basis::spin(k, a, n) * basis::spin(k, b, n)) as f64)
                    .sum();
                idx += 1;
            }
        }
        let x: Vec<f64> = (1..=n).map(|a| self.x_moment(a)).collect();
        MomentSet::new(z, zz, x)
    }

    pub fn energy_decomposition(&self, p: &ModelParameters) -> EnergyDecomposition {
        crate::model::energy_from_moments(p, &self.moments())
    }
}
