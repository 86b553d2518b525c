//! Exact quantum Fisher information, used as the reference every bound is
//! checked against.
//!
//! Three independent routes live here:
//!
//! - [`qfi_exact`]: symmetric-logarithmic-derivative QFI of a density
//!   matrix from its eigendecomposition.
//! - [`qfi_purification`]: purification QFI `4[⟨H₁⟩ − |⟨H₂⟩|²]` assembled
//!   from explicit Kraus matrices (no moment algebra).
//! - [`beam_splitter_loss`]: photon loss as a two-mode unitary followed by a
//!   partial trace, never touching the binomial weights.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::lossbounds::{binomial_row, VariationalPoint};
use crate::states::{moments_from_state, ProbeState, TruncationPolicy};

pub type CMatrix = DMatrix<Complex64>;

/// Largest Fock dimension the eigendecomposition-based checks are run at.
pub const ORACLE_MAX_DIM: usize = 256;

/// Truncation used for oracle comparisons.
pub fn oracle_policy() -> TruncationPolicy {
    TruncationPolicy {
        tail_tolerance: 1e-14,
        max_dim: ORACLE_MAX_DIM,
    }
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Single-mode density matrix in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elements: CMatrix,
}

impl DensityMatrix {
    /// Wraps a square matrix, rejecting it when it is not Hermitian to 1e-12.
    pub fn new(elements: CMatrix) -> Result<Self> {
        if !elements.is_square() || elements.nrows() == 0 {
            return Err(domain("density matrix must be square and nonempty"));
        }
        let defect = hermiticity_defect(&elements);
        if defect > 1e-12 * max_abs(&elements).max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { elements })
    }

    pub fn from_pure(state: &ProbeState) -> Self {
        let psi = DVector::from_column_slice(state.amplitudes());
        Self {
            elements: &psi * psi.adjoint(),
        }
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &CMatrix {
        &self.elements
    }

    pub fn into_elements(self) -> CMatrix {
        self.elements
    }

    pub fn trace(&self) -> f64 {
        self.elements.diagonal().iter().map(|z| z.re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.elements.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Kraus operators `E_k(φ)` at a fixed `φ` together with `dE_k/dφ`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    pub operators: Vec<CMatrix>,
    pub derivatives: Vec<CMatrix>,
}

impl KrausFamily {
    /// `max |Σ_k E_k†E_k − I|` over matrix elements.
    pub fn completeness_defect(&self) -> f64 {
        let Some(first) = self.operators.first() else {
            return f64::INFINITY;
        };
        let dim = first.ncols();
        let mut sum = CMatrix::zeros(dim, dim);
        for e in &self.operators {
            sum += e.adjoint() * e;
        }
        sum -= CMatrix::identity(dim, dim);
        max_abs(&sum)
    }

    /// Applies the channel to a pure state.
    pub fn apply(&self, state: &ProbeState) -> DensityMatrix {
        let psi = DVector::from_column_slice(state.amplitudes());
        let dim = self.operators.first().map_or(psi.len(), |e| e.nrows());
        let mut rho = CMatrix::zeros(dim, dim);
        for e in &self.operators {
            let v = e * &psi;
            rho += &v * v.adjoint();
        }
        DensityMatrix { elements: rho }
    }
}

fn check_loss_params(eta: f64, lambda1: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("transmissivity must lie in [0, 1], got {eta}")));
    }
    if !(0.0..=1.0).contains(&lambda1) {
        return Err(domain(format!("λ₁ must lie in [0, 1], got {lambda1}")));
    }
    Ok(())
}

/// Kraus matrices of the variational loss family at `(φ, λ₁, λ₂)` on a
/// `dim`-level space: `⟨n−k|E_k|n⟩ = √c_nk · e^{−iφ(n² − 2λ₁kn + λ₂k²)}`.
pub fn loss_kraus_family(dim: usize, eta: f64, phi: f64, pt: VariationalPoint) -> Result<KrausFamily> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("transmissivity must lie in [0, 1], got {eta}")));
    }
    let rows: Vec<Vec<f64>> = (0..dim).map(|n| binomial_row(n, eta)).collect();
    let mut operators = Vec::with_capacity(dim);
    let mut derivatives = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut e = CMatrix::zeros(dim, dim);
        let mut de = CMatrix::zeros(dim, dim);
        let kf = k as f64;
        for n in k..dim {
            let nf = n as f64;
            let g = nf * nf - 2.0 * pt.lambda1 * kf * nf + pt.lambda2 * kf * kf;
            let amp = Complex64::from_polar(rows[n][k].sqrt(), -phi * g);
            e[(n - k, n)] = amp;
            de[(n - k, n)] = -I * g * amp;
        }
        operators.push(e);
        derivatives.push(de);
    }
    Ok(KrausFamily {
        operators,
        derivatives,
    })
}

/// Gauss–Hermite nodes and weights for `∫ e^{−u²} f(u) du` (Golub–Welsch).
fn gauss_hermite(nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = DMatrix::<f64>::zeros(nodes, nodes);
    for i in 1..nodes {
        let b = (i as f64 / 2.0).sqrt();
        jacobi[(i, i - 1)] = b;
        jacobi[(i - 1, i)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut pairs: Vec<(f64, f64)> = (0..nodes)
        .map(|j| (eig.eigenvalues[j], sqrt_pi * eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Linear phase diffusion as a discrete Kraus family: the Gaussian mirror
/// position is sampled at Gauss–Hermite nodes, giving
/// `E_j = √(w_j/√π) e^{−iφn̂²} e^{2iβΔ u_j n̂}`.
///
/// The family is exactly complete for any node count; its channel tends to
/// the `exp(−(βΔ)²(n−m)²)` damping as the node count grows.
pub fn dephasing_kraus_family(dim: usize, beta_delta: f64, phi: f64, nodes: usize) -> Result<KrausFamily> {
    if nodes == 0 || !(beta_delta >= 0.0) {
        return Err(domain("need at least one node and a nonnegative βΔ"));
    }
    let (u, w) = gauss_hermite(nodes);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut operators = Vec::with_capacity(nodes);
    let mut derivatives = Vec::with_capacity(nodes);
    for (uj, wj) in u.into_iter().zip(w) {
        let scale = (wj / sqrt_pi).sqrt();
        let diag: Vec<Complex64> = (0..dim)
            .map(|n| {
                let nf = n as f64;
                Complex64::from_polar(scale, -phi * nf * nf + 2.0 * beta_delta * uj * nf)
            })
            .collect();
        let e = CMatrix::from_diagonal(&DVector::from_vec(diag.clone()));
        let de = CMatrix::from_diagonal(&DVector::from_vec(
            diag.iter()
                .enumerate()
                .map(|(n, z)| -I * (n * n) as f64 * z)
                .collect(),
        ));
        operators.push(e);
        derivatives.push(de);
    }
    Ok(KrausFamily {
        operators,
        derivatives,
    })
}

/// Element-wise sum `Σ_k √(c_ak c_bk) ψ_{a+k} ψ̄_{b+k} e^{−iφ(g_k(a+k) − g_k(b+k))} · f`,
/// where `f` is `1` for the state and `−i(g_k(a+k) − g_k(b+k))` for its derivative.
fn loss_sum(state: &ProbeState, phi: f64, eta: f64, lambda1: f64, derivative: bool) -> CMatrix {
    let dim = state.dim();
    let psi = state.amplitudes();
    let sqrt_rows: Vec<Vec<f64>> = (0..dim)
        .map(|n| binomial_row(n, eta).into_iter().map(f64::sqrt).collect())
        .collect();
    let g = |n: usize, k: usize| {
        let (nf, kf) = (n as f64, k as f64);
        nf * nf - 2.0 * lambda1 * kf * nf
    };
    let mut out = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let mut acc = ZERO;
            for k in 0..dim - a.max(b) {
                let (n, m) = (a + k, b + k);
                let w = sqrt_rows[n][k] * sqrt_rows[m][k];
                if w == 0.0 {
                    continue;
                }
                let dg = g(n, k) - g(m, k);
                let term = psi[n] * psi[m].conj() * Complex64::from_polar(w, -phi * dg);
                acc += if derivative { -I * dg * term } else { term };
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// State after the variational loss channel at placement `λ₁` (`λ₂ = 0`;
/// it cancels in `ρ`).
pub fn apply_loss_channel(state: &ProbeState, phi: f64, eta: f64, lambda1: f64) -> Result<DensityMatrix> {
    check_loss_params(eta, lambda1)?;
    Ok(DensityMatrix {
        elements: loss_sum(state, phi, eta, lambda1, false),
    })
}

/// `dρ/dφ` of [`apply_loss_channel`], assembled in closed form.
pub fn channel_derivative(state: &ProbeState, phi: f64, eta: f64, lambda1: f64) -> Result<CMatrix> {
    check_loss_params(eta, lambda1)?;
    Ok(loss_sum(state, phi, eta, lambda1, true))
}

/// Where the loss beam splitter sits relative to the Kerr phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossPlacement {
    /// Loss first, then `e^{−iφn̂²}` (the `λ₁ = 1` channel).
    BeforePhase,
    /// `e^{−iφn̂²}` first, then loss (the `λ₁ = 0` channel).
    AfterPhase,
}

/// Loss modelled as a beam splitter with a vacuum environment mode,
/// `U = exp[θ(â†b̂ − âb̂†)]` with `cos²θ = η`, followed by tracing out the
/// environment. Each fixed-total-photon block is exponentiated separately.
pub fn beam_splitter_loss(state: &ProbeState, eta: f64, phi: f64, placement: LossPlacement) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(domain(format!("transmissivity must lie in [0, 1], got {eta}")));
    }
    let dim = state.dim();
    let theta = eta.sqrt().acos();
    let kerr = |n: usize| Complex64::from_polar(1.0, -phi * (n * n) as f64);
    // amp[j][e]: amplitude of |j⟩_S |e⟩_E
    let mut amp = vec![vec![ZERO; dim]; dim];
    for total in 0..dim {
        let mut input = state.amplitudes()[total];
        if input == ZERO {
            continue;
        }
        if placement == LossPlacement::AfterPhase {
            input *= kerr(total);
        }
        // Block basis |j, total − j⟩, j = 0..=total.
        let size = total + 1;
        let mut gen = DMatrix::<f64>::zeros(size, size);
        for j in 0..total {
            // â†b̂ |j, T−j⟩ = √((j+1)(T−j)) |j+1, T−j−1⟩
            let c = ((j + 1) as f64 * (total - j) as f64).sqrt();
            gen[(j + 1, j)] += theta * c;
            gen[(j, j + 1)] -= theta * c;
        }
        let unitary = gen.exp();
        for j in 0..size {
            let mut out = input * unitary[(j, total)];
            if placement == LossPlacement::BeforePhase {
                out *= kerr(j);
            }
            amp[j][total - j] = out;
        }
    }
    let mut rho = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            rho[(a, b)] = (0..dim).map(|e| amp[a][e] * amp[b][e].conj()).sum();
        }
    }
    Ok(DensityMatrix { elements: rho })
}

/// `−i[n̂², ρ]`, the derivative of a unitary Kerr family.
pub fn unitary_derivative(rho: &DensityMatrix) -> CMatrix {
    let m = rho.elements();
    CMatrix::from_fn(m.nrows(), m.ncols(), |a, b| {
        let d = (a * a) as f64 - (b * b) as f64;
        -I * d * m[(a, b)]
    })
}

/// SLD quantum Fisher information
/// `F = Σ_{p_i+p_j > ε} 2|⟨e_i|dρ|e_j⟩|² / (p_i + p_j)`, `ε = 1e-12·tr ρ`.
pub fn qfi_exact(rho: &DensityMatrix, drho: &CMatrix) -> Result<f64> {
    if drho.shape() != rho.elements().shape() {
        return Err(domain("dρ and ρ must have the same shape"));
    }
    let defect = hermiticity_defect(drho);
    if defect > 1e-10 * max_abs(drho).max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let eig = SymmetricEigen::new(rho.elements().clone());
    let v = &eig.eigenvectors;
    let rotated = v.adjoint() * drho * v;
    let eps = 1e-12 * rho.trace().abs().max(1e-300);
    let p = &eig.eigenvalues;
    let dim = p.len();
    let mut f = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let s = p[i] + p[j];
            if s > eps {
                f += 2.0 * rotated[(i, j)].norm_sqr() / s;
            }
        }
    }
    Ok(f)
}

/// Pure-state QFI `4(⟨n̂⁴⟩ − ⟨n̂²⟩²)` of the Kerr family.
pub fn qfi_pure(state: &ProbeState) -> f64 {
    4.0 * moments_from_state(state).var_n2
}

/// Purification QFI `4[⟨H₁⟩ − |⟨H₂⟩|²]` with `H₁ = Σ dE_k†dE_k` and
/// `H₂ = Σ dE_k†E_k`, evaluated in the input state.
///
/// The family must preserve the norm of the input, `Σ_k ‖E_k ψ‖² = ‖ψ‖²`;
/// use [`KrausFamily::completeness_defect`] for the full operator identity.
pub fn qfi_purification(kraus: &KrausFamily, state: &ProbeState) -> Result<f64> {
    let psi = DVector::from_column_slice(state.amplitudes());
    let mut kept = 0.0;
    let mut h1 = 0.0;
    let mut h2 = ZERO;
    for (e, de) in kraus.operators.iter().zip(&kraus.derivatives) {
        if e.ncols() != psi.len() {
            return Err(domain("Kraus operators do not match the state dimension"));
        }
        let v = e * &psi;
        let dv = de * &psi;
        kept += v.norm_squared();
        h1 += dv.norm_squared();
        h2 += dv.dotc(&v);
    }
    let defect = (kept - psi.norm_squared()).abs();
    if defect > 1e-10 {
        return Err(Error::Incomplete(defect));
    }
    Ok(4.0 * (h1 - h2.norm_sqr()))
}

/// Dephased family `ρ_nm e^{−iφ(n²−m²)} κ(n, m)` and its φ-derivative at `φ`.
fn dephased_pair(state: &ProbeState, phi: f64, kernel: impl Fn(f64, f64) -> f64) -> (CMatrix, CMatrix) {
    let psi = state.amplitudes();
    let dim = state.dim();
    let mut rho = CMatrix::zeros(dim, dim);
    let mut drho = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            let (af, bf) = (a as f64, b as f64);
            let d = af * af - bf * bf;
            let z = psi[a] * psi[b].conj() * Complex64::from_polar(kernel(af, bf), -phi * d);
            rho[(a, b)] = z;
            drho[(a, b)] = -I * d * z;
        }
    }
    (rho, drho)
}

/// Exact QFI of the linearly dephased family, evaluated at `φ = 0`.
pub fn qfi_exact_dephasing(state: &ProbeState, beta_delta: f64) -> Result<f64> {
    let s = beta_delta * beta_delta;
    let (rho, drho) = dephased_pair(state, 0.0, |a, b| (-s * (a - b).powi(2)).exp());
    qfi_exact(&DensityMatrix { elements: rho }, &drho)
}

/// Second-order phase diffusion with damping `exp(−(γΔ)²(n² − m²)²)`.
///
/// This kernel is the `n̂²x̂` analogue of the linear case; it is used only to
/// sanity-check the second-order bound.
pub fn apply_second_order_dephasing(state: &ProbeState, phi: f64, gamma_delta: f64) -> DensityMatrix {
    let s = gamma_delta * gamma_delta;
    let (rho, _) = dephased_pair(state, phi, |a, b| (-s * (a * a - b * b).powi(2)).exp());
    DensityMatrix { elements: rho }
}

/// Exact QFI of the second-order dephased family at `φ = 0`.
pub fn qfi_exact_second_order_dephasing(state: &ProbeState, gamma_delta: f64) -> Result<f64> {
    let s = gamma_delta * gamma_delta;
    let (rho, drho) = dephased_pair(state, 0.0, |a, b| (-s * (a * a - b * b).powi(2)).exp());
    qfi_exact(&DensityMatrix { elements: rho }, &drho)
}
