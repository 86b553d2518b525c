//! Every loss bound for one squeezed vacuum probe.
use kerr_bounds::lossbounds::{self, LossConfig};
use kerr_bounds::states::{self, StateFamily, TruncationPolicy};

fn main() -> kerr_bounds::Result<()> {
    let (n, eta) = (10.0, 0.9);
    let state = StateFamily::SqueezedVacuum.state(n, TruncationPolicy::default())?;
    let mom = states::moments_from_state(&state);
    let cfg = LossConfig::new(eta)?;
    let min = lossbounds::minimize_variational_qfi(&state, &cfg)?;
    let rows = [
        ("closed form (squeezed vacuum)", lossbounds::fmin_analytic_sv(n, eta)?),
        ("closed form (moments)", lossbounds::fmin_analytic_general(&mom, eta)?),
        ("numerical minimum", min.f_min),
        ("large-N expansion", lossbounds::fmin_asymptotic(n, eta)?),
        ("averaged over loss counts", lossbounds::bound_averaged(&state, &cfg)),
        ("weak value", lossbounds::bound_weak_value(&state, &cfg)),
        ("loss before phase", lossbounds::bound_before_loss(&mom, eta)?),
        ("lossless", lossbounds::bound_lossless(&mom)),
    ];
    println!("N = {n}, eta = {eta}, optimal lambda1 = {}", min.point.lambda1);
    for (name, f) in rows {
        println!("{name:<30} F <= {f:>14.6e}   dphi >= {:.6e}", lossbounds::delta_phi_from_f(f, 1));
    }
    Ok(())
}
