//! Phase-diffusion bounds.
//!
//! Linear diffusion couples `n̂` to the position of a mirror with spread `Δ`;
//! only the product `βΔ` enters. Second-order diffusion couples `n̂²` instead,
//! with strength `γ`. Squeezing the mirror to `N_E` mean excitations shrinks
//! `Δ` to `exp(−arcsinh √N_E)` (vacuum has `Δ = 1`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::oracle::{CMatrix, DensityMatrix};
use crate::states::{MomentSet, ProbeState, StateFamily};

/// Order of the diffusion coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseOrder {
    Linear,
    SecondOrder,
}

/// Large-`N` family used by [`asymptotic_dephasing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticFamily {
    /// Gaussian states saturating the moment bounds (squeezed vacuum).
    Gaussian,
    Coherent,
}

impl AsymptoticFamily {
    pub fn of(family: StateFamily) -> Result<Self> {
        match family {
            StateFamily::Coherent => Ok(Self::Coherent),
            StateFamily::SqueezedVacuum => Ok(Self::Gaussian),
            StateFamily::Fock => Err(domain("no asymptotic dephasing form for Fock states")),
        }
    }
}

/// Diffusion configuration.
///
/// `strength_spread` is `βΔ` (linear) or `γΔ` (second order) with an
/// unsqueezed environment. When `env_excitations` is set the spread is taken
/// at `Δ = 1` and rescaled by [`env_squeezing_delta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingConfig {
    pub order: NoiseOrder,
    pub strength_spread: f64,
    pub env_excitations: Option<f64>,
}

impl DephasingConfig {
    pub fn new(order: NoiseOrder, strength_spread: f64) -> Result<Self> {
        if !(strength_spread >= 0.0 && strength_spread.is_finite()) {
            return Err(domain(format!(
                "strength-spread product must be finite and nonnegative, got {strength_spread}"
            )));
        }
        Ok(Self {
            order,
            strength_spread,
            env_excitations: None,
        })
    }

    pub fn with_environment(mut self, n_env: f64) -> Result<Self> {
        env_squeezing_delta(n_env)?;
        self.env_excitations = Some(n_env);
        Ok(self)
    }

    /// `βΔ` or `γΔ` after environment squeezing.
    pub fn effective_spread(&self) -> f64 {
        match self.env_excitations {
            Some(n_env) => self.strength_spread * env_squeezing_delta(n_env).unwrap_or(1.0),
            None => self.strength_spread,
        }
    }

    /// Phase-error bound for a state with the given moments.
    pub fn bound(&self, mom: &MomentSet) -> Result<f64> {
        match self.order {
            NoiseOrder::Linear => bound_linear_dephasing(mom, self.effective_spread()),
            NoiseOrder::SecondOrder => bound_second_order_dephasing(mom, self.effective_spread()),
        }
    }
}

/// `ρ_nm = ψ_n ψ̄_m exp(−iφ(n² − m²) − (βΔ)²(n − m)²)`.
pub fn apply_linear_dephasing(state: &ProbeState, phi: f64, beta_delta: f64) -> DensityMatrix {
    let psi = state.amplitudes();
    let s = beta_delta * beta_delta;
    let dim = state.dim();
    let rho = CMatrix::from_fn(dim, dim, |a, b| {
        let (af, bf) = (a as f64, b as f64);
        psi[a] * psi[b].conj() * Complex64::from_polar((-s * (af - bf).powi(2)).exp(), -phi * (af * af - bf * bf))
    });
    DensityMatrix::new(rho).expect("dephased pure state is Hermitian by construction")
}

/// Value of the single-parameter dephasing bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingValue {
    pub value: f64,
    /// Set when `βΔ = 0` forced the noiseless `λ = 0` value.
    pub noiseless_fallback: bool,
}

/// `F(λ) = (1−λ)² 4(Δn̂²)² + λ²/(2β²Δ²) · 4⟨n̂²⟩`.
pub fn variational_qfi_dephasing(mom: &MomentSet, beta_delta: f64, lam: f64) -> DephasingValue {
    if beta_delta == 0.0 {
        return DephasingValue {
            value: 4.0 * mom.var_n2,
            noiseless_fallback: lam != 0.0,
        };
    }
    let s = beta_delta * beta_delta;
    DephasingValue {
        value: (1.0 - lam).powi(2) * 4.0 * mom.var_n2 + lam * lam / (2.0 * s) * 4.0 * mom.m2,
        noiseless_fallback: false,
    }
}

/// Minimiser `λ_min = 2β²Δ²(Δn̂²)² / (⟨n̂²⟩ + 2β²Δ²(Δn̂²)²)`.
pub fn lambda_min(mom: &MomentSet, beta_delta: f64) -> Result<f64> {
    if !(beta_delta >= 0.0) {
        return Err(domain(format!("βΔ must be nonnegative, got {beta_delta}")));
    }
    if mom.m2 == 0.0 && mom.var_n2 == 0.0 {
        return Err(domain("λ_min is undefined for the vacuum"));
    }
    let t = 2.0 * beta_delta * beta_delta * mom.var_n2;
    Ok(t / (mom.m2 + t))
}

fn require_moments(mom: &MomentSet, need_m2: bool) -> Result<()> {
    if !(mom.var_n2 > 0.0) {
        return Err(domain("the bound needs a state with nonzero n̂² variance"));
    }
    if need_m2 && !(mom.m2 > 0.0) {
        return Err(domain("the bound needs ⟨n̂²⟩ > 0"));
    }
    Ok(())
}

fn noiseless(mom: &MomentSet) -> f64 {
    1.0 / (2.0 * mom.var_n2.sqrt())
}

/// `Δφ ≥ √(1/(4(Δn̂²)²) + 2β²Δ²/(4⟨n̂²⟩))`.
pub fn bound_linear_dephasing(mom: &MomentSet, beta_delta: f64) -> Result<f64> {
    require_moments(mom, true)?;
    if beta_delta == 0.0 {
        return Ok(noiseless(mom));
    }
    let s = beta_delta * beta_delta;
    Ok((1.0 / (4.0 * mom.var_n2) + 2.0 * s / (4.0 * mom.m2)).sqrt())
}

/// Leading large-`N` term: `βΔ/(√6 N)` (Gaussian) or `βΔ/(√2 N)` (coherent).
pub fn asymptotic_dephasing(n_mean: f64, beta_delta: f64, family: AsymptoticFamily) -> Result<f64> {
    if !(n_mean > 0.0) {
        return Err(domain(format!("mean photon number must be positive, got {n_mean}")));
    }
    let c: f64 = match family {
        AsymptoticFamily::Gaussian => 6.0,
        AsymptoticFamily::Coherent => 2.0,
    };
    Ok(beta_delta / (c.sqrt() * n_mean))
}

/// Default margin applied to "|φ| ≪ radius".
pub const DEFAULT_VALIDITY_FACTOR: f64 = 0.1;

/// Phase range `2β²Δ² + ⟨n̂²⟩/(Δn̂²)²` inside which the linear bound was
/// derived; infinite for zero `n̂²` variance.
pub fn validity_radius(mom: &MomentSet, beta_delta: f64) -> f64 {
    if mom.var_n2 == 0.0 {
        return f64::INFINITY;
    }
    2.0 * beta_delta * beta_delta + mom.m2 / mom.var_n2
}

/// Whether `|φ| ≤ factor · validity_radius`.
pub fn phase_within_validity(phi: f64, mom: &MomentSet, beta_delta: f64, factor: f64) -> bool {
    phi.abs() <= factor * validity_radius(mom, beta_delta)
}

/// `Δ = exp(−arcsinh √N_E) = 1/(√N_E + √(N_E + 1))`.
pub fn env_squeezing_delta(n_env: f64) -> Result<f64> {
    if !(n_env >= 0.0 && n_env.is_finite()) {
        return Err(domain(format!("environment excitations must be nonnegative, got {n_env}")));
    }
    Ok(1.0 / (n_env.sqrt() + (n_env + 1.0).sqrt()))
}

/// `Δφ ≥ √(1/(4(Δn̂²)²) + 2γ²Δ²)`; tends to `√2 γΔ` for large variance.
pub fn bound_second_order_dephasing(mom: &MomentSet, gamma_delta: f64) -> Result<f64> {
    require_moments(mom, false)?;
    if gamma_delta == 0.0 {
        return Ok(noiseless(mom));
    }
    Ok((1.0 / (4.0 * mom.var_n2) + 2.0 * gamma_delta * gamma_delta).sqrt())
}

/// Full and leading-order bounds with a squeezed environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentBound {
    /// Full bound at `Δ = Δ(N_E)`.
    pub delta_phi: f64,
    /// Large-`N` term at `Δ = Δ(N_E)`.
    pub asymptotic: f64,
    /// Doubly asymptotic (large `N` and `N_E`) closed form, e.g.
    /// `β/(2√2 N √N_E)`; infinite for `N_E = 0`.
    pub env_limit: f64,
}

/// Bound for mean photon number `n_mean` with strength `β` (or `γ`) and an
/// environment squeezed to `n_env` excitations.
pub fn bound_with_environment(
    n_mean: f64,
    n_env: f64,
    strength: f64,
    family: StateFamily,
    order: NoiseOrder,
) -> Result<EnvironmentBound> {
    let delta = env_squeezing_delta(n_env)?;
    let spread = strength * delta;
    let mom = family.moments(n_mean)?;
    let sqrt_env = n_env.sqrt();
    match order {
        NoiseOrder::Linear => {
            let fam = AsymptoticFamily::of(family)?;
            let c: f64 = match fam {
                AsymptoticFamily::Gaussian => 6.0,
                AsymptoticFamily::Coherent => 2.0,
            };
            Ok(EnvironmentBound {
                delta_phi: bound_linear_dephasing(&mom, spread)?,
                asymptotic: asymptotic_dephasing(n_mean, spread, fam)?,
                env_limit: strength / (2.0 * c.sqrt() * n_mean * sqrt_env),
            })
        }
        NoiseOrder::SecondOrder => Ok(EnvironmentBound {
            delta_phi: bound_second_order_dephasing(&mom, spread)?,
            asymptotic: 2f64.sqrt() * spread,
            env_limit: strength / (2f64.sqrt() * sqrt_env),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherent_moments, fock_basis_state, gaussian_saturating_moments};

    #[test]
    fn dephasing_leaves_pure_state_alone_without_noise() {
        let s = ProbeState::normalized(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let rho = apply_linear_dephasing(&s, 0.0, 0.0);
        assert!((rho.elements() - DensityMatrix::from_pure(&s).elements()).camax() < 1e-16);

        let damped = apply_linear_dephasing(&s, 0.0, (2f64.ln() / 4.0).sqrt());
        assert!((damped.elements()[(0, 2)].norm() - 0.25).abs() < 1e-15);
        assert!((damped.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strong_dephasing_kills_coherences() {
        let s = crate::states::coherent_state(2.0, Default::default()).unwrap();
        let rho = apply_linear_dephasing(&s, 0.3, 10.0);
        for a in 0..s.dim() {
            for b in 0..s.dim() {
                if a != b {
                    assert!(rho.elements()[(a, b)].norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn variational_values() {
        let c = coherent_moments(1.0).unwrap();
        assert_eq!(variational_qfi_dephasing(&c, 0.7, 0.0).value, 44.0);
        assert!((variational_qfi_dephasing(&c, 1.0, 1.0).value - 4.0).abs() < 1e-15);
        let zero = variational_qfi_dephasing(&c, 0.0, 0.4);
        assert!(zero.noiseless_fallback && zero.value == 44.0);

        for mom in [c, gaussian_saturating_moments(2.0).unwrap()] {
            for bd in [0.1, 0.5, 1.0] {
                let best = variational_qfi_dephasing(&mom, bd, lambda_min(&mom, bd).unwrap()).value;
                for lam in [0.0, 0.25, 0.5, 0.75, 1.0] {
                    assert!(best <= variational_qfi_dephasing(&mom, bd, lam).value);
                }
            }
        }
    }

    #[test]
    fn lambda_min_values() {
        let g = gaussian_saturating_moments(1.0).unwrap();
        assert_eq!(lambda_min(&g, 0.0).unwrap(), 0.0);
        // 2(βΔ)²·352 = 5
        let bd = (5.0f64 / 704.0).sqrt();
        assert!((lambda_min(&g, bd).unwrap() - 0.5).abs() < 1e-14);
        assert!(lambda_min(&MomentSet::from_raw(0.0, 0.0, 0.0, 0.0), 1.0).is_err());
        for bd in [0.01, 1.0, 100.0] {
            let l = lambda_min(&g, bd).unwrap();
            assert!((0.0..1.0).contains(&l));
        }
    }

    #[test]
    fn linear_bound_values() {
        let c = coherent_moments(1.0).unwrap();
        assert!((bound_linear_dephasing(&c, 0.0).unwrap() - 1.0 / (2.0 * 11f64.sqrt())).abs() < 1e-15);
        assert!((bound_linear_dephasing(&c, 1.0).unwrap() - 0.522_232_967_867_093_5).abs() < 1e-12);
        let g = gaussian_saturating_moments(1.0).unwrap();
        assert!((bound_linear_dephasing(&g, 1.0).unwrap() - (1.0f64 / 1408.0 + 0.1).sqrt()).abs() < 1e-15);
        assert!((bound_linear_dephasing(&g, 1.0).unwrap() - 0.31735).abs() < 1e-5);
        let fock = crate::states::moments_from_state(&fock_basis_state(3).unwrap());
        assert!(bound_linear_dephasing(&fock, 1.0).is_err());
    }

    #[test]
    fn asymptotic_values() {
        let g = asymptotic_dephasing(10.0, 1.0, AsymptoticFamily::Gaussian).unwrap();
        let c = asymptotic_dephasing(10.0, 1.0, AsymptoticFamily::Coherent).unwrap();
        assert!((g - 0.040_824_829_046_386_3).abs() < 1e-12);
        assert!((c - 0.070_710_678_118_654_75).abs() < 1e-12);
        assert!((g / c - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(asymptotic_dephasing(0.0, 1.0, AsymptoticFamily::Coherent).is_err());
    }

    #[test]
    fn validity_radius_values() {
        let g = gaussian_saturating_moments(1.0).unwrap();
        assert!((validity_radius(&g, 1.0) - (2.0 + 5.0 / 352.0)).abs() < 1e-14);
        let c = coherent_moments(1e4).unwrap();
        assert!((validity_radius(&c, 0.0) * 4e4 - 1.0).abs() < 1e-3);
        let fock = crate::states::moments_from_state(&fock_basis_state(2).unwrap());
        assert!(validity_radius(&fock, 1.0).is_infinite());
        assert!(phase_within_validity(0.1, &g, 1.0, DEFAULT_VALIDITY_FACTOR));
        assert!(!phase_within_validity(0.3, &g, 1.0, DEFAULT_VALIDITY_FACTOR));
    }

    #[test]
    fn env_delta_values() {
        assert_eq!(env_squeezing_delta(0.0).unwrap(), 1.0);
        assert!((env_squeezing_delta(0.5625).unwrap() - 0.5).abs() < 1e-15);
        let d = env_squeezing_delta(1e4).unwrap();
        assert!((d - 0.005).abs() / 0.005 < 1e-4);
        assert!(((-(1e4f64.sqrt()).asinh()).exp() - d).abs() < 1e-15);
        assert!(env_squeezing_delta(-1.0).is_err());
    }

    #[test]
    fn second_order_values() {
        let c = coherent_moments(1.0).unwrap();
        assert!((bound_second_order_dephasing(&c, 0.0).unwrap() - 1.0 / (2.0 * 11f64.sqrt())).abs() < 1e-15);
        assert!((bound_second_order_dephasing(&c, 0.5).unwrap() - 0.722_998_805_481_221_2).abs() < 1e-12);
        let huge = MomentSet::from_raw(1e6, 1e12, 1e18, 1e30);
        assert!((bound_second_order_dephasing(&huge, 1.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn environment_composition() {
        for order in [NoiseOrder::Linear, NoiseOrder::SecondOrder] {
            let b = bound_with_environment(10.0, 0.0, 0.8, StateFamily::Coherent, order).unwrap();
            let direct = DephasingConfig::new(order, 0.8).unwrap().bound(&coherent_moments(10.0).unwrap()).unwrap();
            assert_eq!(b.delta_phi, direct);
        }
        let lin = bound_with_environment(1e7, 1e4, 1.0, StateFamily::Coherent, NoiseOrder::Linear).unwrap();
        let target = 1.0 / (2.0 * 2f64.sqrt() * 1e7 * 100.0);
        assert!((lin.delta_phi / target - 1.0).abs() < 0.01);
        assert!((lin.env_limit - 3.5355e-10).abs() < 1e-13);

        let sec = bound_with_environment(1e3, 1e4, 1.0, StateFamily::SqueezedVacuum, NoiseOrder::SecondOrder).unwrap();
        assert!((sec.delta_phi / (1.0 / (2f64.sqrt() * 100.0)) - 1.0).abs() < 0.01);
    }

    #[test]
    fn config_effective_spread() {
        let cfg = DephasingConfig::new(NoiseOrder::Linear, 2.0).unwrap().with_environment(0.5625).unwrap();
        assert!((cfg.effective_spread() - 1.0).abs() < 1e-15);
        assert!(DephasingConfig::new(NoiseOrder::Linear, -1.0).is_err());
    }
}
