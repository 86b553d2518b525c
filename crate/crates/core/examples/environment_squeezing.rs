//! Squeezing the environment shrinks the effective diffusion spread.
use kerr_bounds::dephasing::{self, NoiseOrder};
use kerr_bounds::states::StateFamily;

fn main() -> kerr_bounds::Result<()> {
    let (n, beta) = (100.0, 1.0);
    println!("{:>8} {:>10} {:>14} {:>14} {:>14}", "N_E", "Delta", "linear", "second order", "env limit");
    for n_env in [0.0, 1.0, 10.0, 100.0, 1000.0] {
        let lin = dephasing::bound_with_environment(n, n_env, beta, StateFamily::Coherent, NoiseOrder::Linear)?;
        let sec = dephasing::bound_with_environment(n, n_env, beta, StateFamily::Coherent, NoiseOrder::SecondOrder)?;
        println!(
            "{n_env:>8} {:>10.5} {:>14.6e} {:>14.6e} {:>14.6e}",
            dephasing::env_squeezing_delta(n_env)?,
            lin.delta_phi,
            sec.delta_phi,
            lin.env_limit
        );
    }
    Ok(())
}
