//! Empirical kernel constants over a refinement ladder on the disk.

use std::sync::Arc;

use greenbound::geometry::{build_geometry, GeometrySpec};
use greenbound::green::{build_green_table, select_sources};
use greenbound::kernel_analysis::{verify_boundary_refined_bounds, verify_uniform_bounds};

fn main() -> greenbound::Result<()> {
    let ladder = [0.1, 0.05, 0.025];
    let coarse = build_geometry(&GeometrySpec::new("disk", &[1.0], ladder[0]))?;
    let sources = select_sources(&coarse, 12);
    let tables = ladder
        .iter()
        .map(|&h| build_green_table(Arc::new(build_geometry(&GeometrySpec::new("disk", &[1.0], h))?), &sources))
        .collect::<greenbound::Result<Vec<_>>>()?;

    let mut reports = verify_uniform_bounds(&tables)?;
    reports.extend(verify_boundary_refined_bounds(&tables)?);
    for r in &reports {
        println!("{:<14} C = {:.4}  series {:?}  stable {}", r.bound_id, r.empirical_constant, r.refinement_series, r.stable);
    }
    Ok(())
}
