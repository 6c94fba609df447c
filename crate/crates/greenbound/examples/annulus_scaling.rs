//! sup|∇u|·r for the capacitary potential of the annulus r < |x| < 2r.
//! The product does not depend on r, which is the scaling behind the
//! gradient bound near small holes.

use greenbound::kernel_analysis::annulus_gradient_scaling;
use greenbound::kernel_analysis::scaling::exact_scaling;

fn main() -> greenbound::Result<()> {
    for n in [2, 3] {
        let report = annulus_gradient_scaling(n, &[0.2, 0.1, 0.05, 0.025])?;
        println!("n = {n}: sup|∇u|·r per radius {:?}", report.refinement_series);
        println!("       max {:.4}, exact {:.4}", report.empirical_constant, exact_scaling(n));
    }
    Ok(())
}
