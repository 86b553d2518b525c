//! Loss bounds against N written as CSV (same data as `kerr-bounds loss-curve`).
use kerr_bounds::report::{self, Grid, LossCurveRequest};
use kerr_bounds::states::StateFamily;

fn main() -> kerr_bounds::Result<()> {
    let req = LossCurveRequest::new(StateFamily::SqueezedVacuum, 0.9, Grid::log_spaced(1.0, 20.0, 12)?);
    print!("{}", report::loss_csv(&report::loss_curve(&req)?));
    Ok(())
}
