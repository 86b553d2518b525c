//! Linear and second-order phase diffusion bounds.
use kerr_bounds::dephasing::{self, AsymptoticFamily, DephasingConfig, NoiseOrder};
use kerr_bounds::states::StateFamily;

fn main() -> kerr_bounds::Result<()> {
    let beta_delta = 0.1;
    println!("linear diffusion, beta*Delta = {beta_delta}");
    for family in [StateFamily::Coherent, StateFamily::SqueezedVacuum] {
        let asym = AsymptoticFamily::of(family)?;
        for n in [1.0, 10.0, 100.0, 1000.0] {
            let mom = family.moments(n)?;
            println!(
                "  {:<16} N={n:<6} bound={:.6e} large-N={:.6e} lambda*={:.4} phi radius={:.3e}",
                family.name(),
                dephasing::bound_linear_dephasing(&mom, beta_delta)?,
                dephasing::asymptotic_dephasing(n, beta_delta, asym)?,
                dephasing::lambda_min(&mom, beta_delta)?,
                dephasing::validity_radius(&mom, beta_delta),
            );
        }
    }
    let cfg = DephasingConfig::new(NoiseOrder::SecondOrder, 0.5)?;
    println!("second order, gamma*Delta = 0.5: saturates at {:.6e}", 0.5 * 2f64.sqrt());
    for n in [1.0, 10.0, 100.0] {
        println!("  coherent N={n:<6} bound={:.6e}", cfg.bound(&StateFamily::Coherent.moments(n)?)?);
    }
    Ok(())
}
