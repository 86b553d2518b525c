//! Single-mode probe states in a truncated Fock basis and their photon-number
//! moments.
//!
//! Two routes to the moments are kept side by side: [`moments_from_state`]
//! sums over the (truncated) amplitude vector, while [`coherent_moments`] and
//! [`gaussian_saturating_moments`] are the closed forms in the mean photon
//! number `N`. Bound formulas consume the closed forms; the channel and
//! oracle code consume state vectors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// How far a state family is expanded in the Fock basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Relative share of `Σ (n+1)⁴ |ψ_n|²` allowed outside the retained
    /// levels, which bounds the truncation error of every moment up to the
    /// fourth.
    pub tail_tolerance: f64,
    /// Hard cap on the number of retained levels.
    pub max_dim: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_tolerance: 1e-14,
            max_dim: 4096,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tail_tolerance: f64, max_dim: usize) -> Result<Self> {
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(domain(format!(
                "tail tolerance must lie in (0, 1), got {tail_tolerance}"
            )));
        }
        if max_dim == 0 {
            return Err(domain("max_dim must be positive"));
        }
        Ok(Self {
            tail_tolerance,
            max_dim,
        })
    }
}

/// Pure probe state `|ψ⟩ = Σ ψ_n |n⟩` truncated to `dim` levels.
///
/// `tail_mass` is the probability that the truncation discarded, so the
/// retained populations sum to `1 - tail_mass`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeState {
    amplitudes: Vec<Complex64>,
    tail_mass: f64,
}

impl ProbeState {
    /// Wraps an amplitude vector whose norm does not exceed one; any missing
    /// norm is recorded as tail mass.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(domain("a probe state needs at least one Fock level"));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(domain("amplitudes must be finite"));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm > 1.0 + 1e-12 {
            return Err(domain(format!("state norm {norm} exceeds one")));
        }
        Ok(Self {
            amplitudes,
            tail_mass: (1.0 - norm).max(0.0),
        })
    }

    /// Normalizes an arbitrary nonzero amplitude vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(domain("cannot normalize a zero or non-finite vector"));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Diagonal populations `|ψ_n|²`.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Raw moments of `n̂` up to fourth order plus the variance of `n̂²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    /// `(Δn̂²)² = ⟨n̂⁴⟩ − ⟨n̂²⟩²`.
    pub var_n2: f64,
}

impl MomentSet {
    pub fn from_raw(m1: f64, m2: f64, m3: f64, m4: f64) -> Self {
        Self {
            m1,
            m2,
            m3,
            m4,
            var_n2: m4 - m2 * m2,
        }
    }
}

/// State families used for the bound curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    Coherent,
    SqueezedVacuum,
    Fock,
}

impl StateFamily {
    pub fn name(self) -> &'static str {
        match self {
            StateFamily::Coherent => "coherent",
            StateFamily::SqueezedVacuum => "squeezed_vacuum",
            StateFamily::Fock => "fock",
        }
    }

    /// Builds the family member with mean photon number `n_mean`. Fock
    /// states require an integer photon number.
    pub fn state(self, n_mean: f64, policy: TruncationPolicy) -> Result<ProbeState> {
        match self {
            StateFamily::Coherent => coherent_state(n_mean, policy),
            StateFamily::SqueezedVacuum => squeezed_vacuum_state(n_mean, policy),
            StateFamily::Fock => fock_basis_state(fock_index(n_mean)?),
        }
    }

    /// Closed-form moments of the family member with mean photon number `n_mean`.
    pub fn moments(self, n_mean: f64) -> Result<MomentSet> {
        match self {
            StateFamily::Coherent => coherent_moments(n_mean),
            StateFamily::SqueezedVacuum => gaussian_saturating_moments(n_mean),
            StateFamily::Fock => {
                let n = fock_index(n_mean)? as f64;
                Ok(MomentSet::from_raw(n, n * n, n * n * n, n * n * n * n))
            }
        }
    }
}

fn fock_index(n: f64) -> Result<usize> {
    if n.is_finite() && n >= 0.0 && n.fract() == 0.0 {
        Ok(n as usize)
    } else {
        Err(domain(format!("Fock states need a nonnegative integer photon number, got {n}")))
    }
}

fn check_mean(n: f64) -> Result<()> {
    if n.is_finite() && n >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("mean photon number must be finite and nonnegative, got {n}")))
    }
}

/// Pulls amplitudes level by level until the estimated discarded share of
/// `Σ (n+1)⁴ |ψ_n|²` drops below the tolerance or the dimension cap is hit.
///
/// Past `mode` the weighted populations decay at least geometrically, so the
/// tail is estimated from the ratio `r` of the last two nonzero terms as
/// `q·r/(1−r)`. Weighting by `(n+1)⁴` keeps every moment up to `⟨n̂⁴⟩`
/// accurate to the same relative tolerance.
fn truncate_by_tail(
    policy: TruncationPolicy,
    mode: f64,
    mut amplitude: impl FnMut(usize) -> Complex64,
) -> ProbeState {
    let mut amplitudes = Vec::new();
    let mut kept = 0.0;
    let mut weighted = 0.0;
    let mut prev_q = 0.0;
    while amplitudes.len() < policy.max_dim {
        let n = amplitudes.len();
        let a = amplitude(n);
        let p = a.norm_sqr();
        amplitudes.push(a);
        if p == 0.0 {
            continue;
        }
        kept += p;
        let q = p * ((n + 1) as f64).powi(4);
        weighted += q;
        if n as f64 >= mode && prev_q > 0.0 {
            let r = q / prev_q;
            if r < 1.0 && q * r / (1.0 - r) <= policy.tail_tolerance * weighted {
                break;
            }
        }
        prev_q = q;
    }
    ProbeState {
        amplitudes,
        tail_mass: (1.0 - kept).max(0.0),
    }
}

/// Coherent state with Poisson photon statistics of mean `n_mean`.
pub fn coherent_state(n_mean: f64, policy: TruncationPolicy) -> Result<ProbeState> {
    check_mean(n_mean)?;
    if n_mean == 0.0 {
        return fock_basis_state(0);
    }
    let ln_mean = n_mean.ln();
    let mut log_pop = -n_mean;
    Ok(truncate_by_tail(policy, n_mean, |n| {
        if n > 0 {
            log_pop += ln_mean - (n as f64).ln();
        }
        Complex64::new((0.5 * log_pop).exp(), 0.0)
    }))
}

/// Squeezed vacuum with `sinh² r = n_mean`.
///
/// Only even levels are populated: `|ψ_{2m}|² = tanh^{2m} r (2m)! / (4^m m!² cosh r)`,
/// generated by the ratio `p_{2m}/p_{2m−2} = tanh² r (2m−1)/(2m)` in log space.
pub fn squeezed_vacuum_state(n_mean: f64, policy: TruncationPolicy) -> Result<ProbeState> {
    check_mean(n_mean)?;
    if n_mean == 0.0 {
        return fock_basis_state(0);
    }
    let ln_tanh_sq = (n_mean / (n_mean + 1.0)).ln();
    let mut log_pop = -0.5 * (1.0 + n_mean).ln();
    Ok(truncate_by_tail(policy, n_mean, |n| {
        if n % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let m = n / 2;
        if m > 0 {
            log_pop += ln_tanh_sq + ((2 * m - 1) as f64).ln() - ((2 * m) as f64).ln();
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * (0.5 * log_pop).exp(), 0.0)
    }))
}

/// Number state `|n⟩`.
pub fn fock_basis_state(n: usize) -> Result<ProbeState> {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n + 1];
    amplitudes[n] = Complex64::new(1.0, 0.0);
    Ok(ProbeState {
        amplitudes,
        tail_mass: 0.0,
    })
}

/// Moments `Σ n^q |ψ_n|²` of the retained amplitudes.
pub fn moments_from_state(state: &ProbeState) -> MomentSet {
    let (mut m1, mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0, 0.0);
    for (n, a) in state.amplitudes.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let n = n as f64;
        let n2 = n * n;
        m1 += p * n;
        m2 += p * n2;
        m3 += p * n2 * n;
        m4 += p * n2 * n2;
    }
    MomentSet::from_raw(m1, m2, m3, m4)
}

/// Moments saturating the one-mode Gaussian bounds (attained by squeezed vacuum).
pub fn gaussian_saturating_moments(n_mean: f64) -> Result<MomentSet> {
    check_mean(n_mean)?;
    let n = n_mean;
    Ok(MomentSet {
        m1: n,
        m2: n * (3.0 * n + 2.0),
        m3: n * (n * (15.0 * n + 18.0) + 4.0),
        m4: n * (n * (n * (105.0 * n + 180.0) + 84.0) + 8.0),
        var_n2: n * (n * (n * (96.0 * n + 168.0) + 80.0) + 8.0),
    })
}

/// Poisson moments of a coherent state.
pub fn coherent_moments(n_mean: f64) -> Result<MomentSet> {
    check_mean(n_mean)?;
    let n = n_mean;
    Ok(MomentSet {
        m1: n,
        m2: n * (n + 1.0),
        m3: n * (n * (n + 3.0) + 1.0),
        m4: n * (n * (n * (n + 6.0) + 7.0) + 1.0),
        var_n2: n * (n * (4.0 * n + 6.0) + 1.0),
    })
}
