//! Truncated probe states and their photon-number moments.
use kerr_bounds::states::{self, StateFamily, TruncationPolicy};

fn main() -> kerr_bounds::Result<()> {
    let policy = TruncationPolicy::default();
    println!("{:<16} {:>6} {:>6} {:>12} {:>14} {:>14}", "family", "N", "dim", "tail", "var(n^2) num", "var(n^2) exact");
    for family in [StateFamily::Coherent, StateFamily::SqueezedVacuum] {
        for n in [0.5, 2.0, 10.0] {
            let state = family.state(n, policy)?;
            let numeric = states::moments_from_state(&state);
            let exact = family.moments(n)?;
            println!(
                "{:<16} {n:>6} {:>6} {:>12.3e} {:>14.6e} {:>14.6e}",
                family.name(),
                state.dim(),
                state.tail_mass(),
                numeric.var_n2,
                exact.var_n2
            );
        }
    }
    let fock = states::moments_from_state(&states::fock_basis_state(4)?);
    println!("fock 4: <n>={} var(n^2)={}", fock.m1, fock.var_n2);
    Ok(())
}
