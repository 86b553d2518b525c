use kerr_bounds::dephasing;
use kerr_bounds::lossbounds::{self, LossConfig, VariationalPoint};
use kerr_bounds::oracle::{self, oracle_policy, CMatrix, DensityMatrix, LossPlacement};
use kerr_bounds::states::{self, ProbeState};

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn small_states() -> Vec<ProbeState> {
    let p = oracle_policy();
    vec![
        states::coherent_state(0.7, p).unwrap(),
        states::coherent_state(2.0, p).unwrap(),
        states::squeezed_vacuum_state(0.5, p).unwrap(),
        states::squeezed_vacuum_state(1.5, p).unwrap(),
        states::fock_basis_state(1).unwrap(),
        states::fock_basis_state(3).unwrap(),
    ]
}

#[test]
fn beam_splitter_reproduces_both_placements() {
    for s in small_states() {
        for eta in [0.0, 0.35, 0.8, 1.0] {
            for phi in [0.0, 0.7] {
                let after = oracle::beam_splitter_loss(&s, eta, phi, LossPlacement::AfterPhase).unwrap();
                let before = oracle::beam_splitter_loss(&s, eta, phi, LossPlacement::BeforePhase).unwrap();
                let k0 = oracle::apply_loss_channel(&s, phi, eta, 0.0).unwrap();
                let k1 = oracle::apply_loss_channel(&s, phi, eta, 1.0).unwrap();
                assert!(max_diff(after.elements(), k0.elements()) < 1e-10);
                assert!(max_diff(before.elements(), k1.elements()) < 1e-10);
            }
        }
    }
}

#[test]
fn kraus_matrices_reproduce_closed_form_channel() {
    for s in small_states() {
        for (l1, l2) in [(0.0, 0.0), (0.5, -1.0), (1.0, 1.0)] {
            let fam = oracle::loss_kraus_family(s.dim(), 0.6, 0.4, VariationalPoint::new(l1, l2)).unwrap();
            assert!(fam.completeness_defect() < 1e-12);
            let direct = oracle::apply_loss_channel(&s, 0.4, 0.6, l1).unwrap();
            assert!(max_diff(fam.apply(&s).elements(), direct.elements()) < 1e-12);
        }
    }
}

fn central_difference_gap(s: &ProbeState, phi: f64, eta: f64, l1: f64, h: f64) -> f64 {
    let analytic = oracle::channel_derivative(s, phi, eta, l1).unwrap();
    let plus = oracle::apply_loss_channel(s, phi + h, eta, l1).unwrap();
    let minus = oracle::apply_loss_channel(s, phi - h, eta, l1).unwrap();
    let fd = (plus.elements() - minus.elements()).map(|z| z / (2.0 * h));
    max_diff(&analytic, &fd)
}

#[test]
fn channel_derivative_matches_central_differences() {
    // h·max|n² − m²| must stay small for the difference quotient to resolve
    // the phase, which holds for dim ≤ 80 at h = 1e-5.
    for s in small_states().iter().filter(|s| s.dim() <= 80) {
        for (phi, eta, l1) in [(0.0, 0.5, 0.0), (0.2, 0.9, 0.3), (1.3, 0.25, 1.0)] {
            assert!(central_difference_gap(s, phi, eta, l1, 1e-5) <= 1e-6);
        }
    }
}

#[test]
fn central_difference_gap_shrinks_quadratically_at_large_dimension() {
    let s = states::squeezed_vacuum_state(1.5, oracle_policy()).unwrap();
    assert!(s.dim() > 150);
    let coarse = central_difference_gap(&s, 0.2, 0.9, 0.3, 1e-5);
    let fine = central_difference_gap(&s, 0.2, 0.9, 0.3, 1e-6);
    assert!((coarse / fine - 100.0).abs() < 5.0, "{coarse:e} / {fine:e}");
    assert!(fine <= 1e-6);
}

#[test]
fn exact_qfi_is_dominated_by_every_purification() {
    for s in small_states() {
        for eta in [0.3, 0.6, 0.9] {
            let cfg = LossConfig::new(eta).unwrap();
            for l1 in [0.0, 0.5, 1.0] {
                let rho = oracle::apply_loss_channel(&s, 0.0, eta, l1).unwrap();
                let exact = oracle::qfi_exact(&rho, &oracle::channel_derivative(&s, 0.0, eta, l1).unwrap()).unwrap();
                for l2 in [-1.0, 0.0, 1.0] {
                    let pt = VariationalPoint::new(l1, l2);
                    let fam = oracle::loss_kraus_family(s.dim(), eta, 0.0, pt).unwrap();
                    let purified = oracle::qfi_purification(&fam, &s).unwrap();
                    let variational = lossbounds::variational_qfi(&s, &cfg, pt);
                    assert!((purified - variational).abs() <= 1e-9 * variational.max(1.0));
                    assert!(exact <= purified + 1e-8);
                }
            }
        }
    }
}

#[test]
fn loss_after_kerr_keeps_the_purification_tight_for_number_states() {
    // Losing photons from |n⟩ leaves a mixture of number states, which carries no phase.
    let s = states::fock_basis_state(3).unwrap();
    let rho = oracle::apply_loss_channel(&s, 0.2, 0.5, 0.0).unwrap();
    let exact = oracle::qfi_exact(&rho, &oracle::channel_derivative(&s, 0.2, 0.5, 0.0).unwrap()).unwrap();
    assert!(exact.abs() < 1e-12);
}

#[test]
fn linear_dephasing_bound_dominates_exact_qfi() {
    let p = oracle_policy();
    for n in [0.5, 1.0, 2.0, 3.0] {
        for s in [states::coherent_state(n, p).unwrap(), states::squeezed_vacuum_state(n, p).unwrap()] {
            let mom = states::moments_from_state(&s);
            for bd in [0.05, 0.1, 0.5, 1.0, 2.0] {
                let exact = oracle::qfi_exact_dephasing(&s, bd).unwrap();
                let bound = dephasing::bound_linear_dephasing(&mom, bd).unwrap();
                assert!(exact <= 1.0 / (bound * bound) + 1e-8, "N={n} βΔ={bd}: {exact} vs {}", 1.0 / (bound * bound));
            }
            let pure = oracle::qfi_exact_dephasing(&s, 0.0).unwrap();
            assert!((pure - oracle::qfi_pure(&s)).abs() <= 1e-8 * pure);
        }
    }
}

#[test]
fn second_order_dephasing_bound_dominates_exact_qfi() {
    let p = oracle_policy();
    for n in [0.5, 1.0, 2.0] {
        for s in [states::coherent_state(n, p).unwrap(), states::squeezed_vacuum_state(n, p).unwrap()] {
            let mom = states::moments_from_state(&s);
            for gd in [0.01, 0.1, 0.5, 1.0] {
                let exact = oracle::qfi_exact_second_order_dephasing(&s, gd).unwrap();
                let bound = dephasing::bound_second_order_dephasing(&mom, gd).unwrap();
                assert!(exact <= 1.0 / (bound * bound) + 1e-8);
            }
        }
    }
}

#[test]
fn quadrature_kraus_family_reproduces_gaussian_damping() {
    let s = states::coherent_state(1.5, oracle_policy()).unwrap();
    for bd in [0.2, 0.7] {
        let fam = oracle::dephasing_kraus_family(s.dim(), bd, 0.3, 160).unwrap();
        let target = dephasing::apply_linear_dephasing(&s, 0.3, bd);
        assert!(max_diff(fam.apply(&s).elements(), target.elements()) < 1e-10);
    }
}

#[test]
fn dephased_state_stays_a_density_matrix() {
    let s = states::squeezed_vacuum_state(1.0, oracle_policy()).unwrap();
    let rho: DensityMatrix = dephasing::apply_linear_dephasing(&s, 0.9, 0.6);
    assert!((rho.trace() - (1.0 - s.tail_mass())).abs() < 1e-12);
    assert!(rho.eigenvalues().iter().all(|&p| p > -1e-12));
}
