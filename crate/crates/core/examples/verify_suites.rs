//! Runs the built-in invariant checks and reports failures.
use kerr_bounds::verify::{self, Hooks, Suite};

fn main() {
    let outcomes = verify::run(Suite::All, &Hooks::default());
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} checks, {failed} failed", outcomes.len());
    std::process::exit(i32::from(failed > 0));
}
