//! Brute-force density-matrix QFI next to the variational bounds.
use kerr_bounds::dephasing;
use kerr_bounds::lossbounds::{self, LossConfig};
use kerr_bounds::oracle::{self, oracle_policy};
use kerr_bounds::states;

fn main() -> kerr_bounds::Result<()> {
    let eta = 0.8;
    for n in [0.5, 1.0, 2.0] {
        let s = states::squeezed_vacuum_state(n, oracle_policy())?;
        let rho = oracle::apply_loss_channel(&s, 0.0, eta, 1.0)?;
        let exact = oracle::qfi_exact(&rho, &oracle::channel_derivative(&s, 0.0, eta, 1.0)?)?;
        let bound = lossbounds::minimize_variational_qfi(&s, &LossConfig::new(eta)?)?.f_min;
        let mom = states::moments_from_state(&s);
        let deph_exact = oracle::qfi_exact_dephasing(&s, 0.3)?;
        let deph_bound = dephasing::bound_linear_dephasing(&mom, 0.3)?.powi(-2);
        println!(
            "squeezed N={n}: loss exact {exact:.6e} <= {bound:.6e}   diffusion exact {deph_exact:.6e} <= {deph_bound:.6e}"
        );
    }
    Ok(())
}
