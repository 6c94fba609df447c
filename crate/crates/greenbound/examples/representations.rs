//! Representation formulas on the disk: smooth functions from the table,
//! a subharmonic case with its Riesz measure, and the Jensen sweep.

use std::sync::Arc;

use greenbound::geometry::{build_geometry, GeometrySpec};
use greenbound::green::{build_green_table, select_sources};
use greenbound::representations::{case_by_name, jensen_sweep, log_point, reconstruct_smooth, reconstruct_subharmonic};

fn main() -> greenbound::Result<()> {
    let g = Arc::new(build_geometry(&GeometrySpec::new("disk", &[1.0], 0.025))?);
    let table = build_green_table(g.clone(), &select_sources(&g, 4))?;
    for name in ["constant", "harmonic_quadratic", "radial_quadratic", "product"] {
        let case = case_by_name(name, &g)?;
        for x in &table.sources {
            let r = reconstruct_smooth(&table, &case, x)?;
            println!("{name:<20} x = {:.3?}  value {:.6}  exact {:.6}  error {:.2e}", x, r.value.re, r.exact.re, r.error);
        }
    }
    let sub = log_point(&[0.5, 0.0]);
    for x in &table.sources {
        let r = reconstruct_subharmonic(&table, &sub, x)?;
        println!("ln|x - a| at x = {:.3?}: error {:.2e}", x, r.error);
    }
    for p in jensen_sweep(g, &[0.1, 0.3, 0.6, 0.9])? {
        println!("jensen |a| = {:.1}: {:.6} vs ln|a| = {:.6}", p.radius, p.reconstruction, p.exact);
    }
    Ok(())
}
