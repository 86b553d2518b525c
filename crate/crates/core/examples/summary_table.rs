//! Noise × scheme table at one parameter point.
use kerr_bounds::report::{self, SummaryParams};

fn main() -> kerr_bounds::Result<()> {
    let params = SummaryParams { eta: 0.9, beta: 0.1, gamma: 0.1, n_mean: 100.0, n_env: 10.0 };
    print!("{}", report::summary_table(&params)?);
    Ok(())
}
