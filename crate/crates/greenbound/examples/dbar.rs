//! Cauchy–Pompeiu reconstruction: on the disk from a Green's function
//! table, on the 4-ball by quasi-Monte Carlo.

use std::sync::Arc;

use greenbound::geometry::{build_geometry, GeometrySpec};
use greenbound::green::{build_green_table, select_sources};
use greenbound::representations::{calibrate_dbar_pairing, case_by_name, dbar_qmc, reconstruct_dbar, DBAR_QMC_NODES};

fn main() -> greenbound::Result<()> {
    let disk = Arc::new(build_geometry(&GeometrySpec::new("disk", &[1.0], 0.025))?);
    let table = build_green_table(disk.clone(), &select_sources(&disk, 3))?;
    let z = table.sources[1].clone();
    println!("pairing calibration at z = {z:.3?}: {:.4}", calibrate_dbar_pairing(&table, &z)?);
    for name in ["z", "zbar", "radial_quadratic"] {
        let case = case_by_name(name, &disk)?;
        let r = reconstruct_dbar(&table, &case, &z)?;
        println!("disk   {name:<18} value {:.6}  error {:.2e}", r.value, r.error);
    }

    let ball = build_geometry(&GeometrySpec::new("ball4", &[1.0], 0.3).with_samples(2_000))?;
    let w = [0.2, -0.1, 0.3, 0.05];
    for name in ["zbar", "zbar1_z2", "radial_quadratic"] {
        let case = case_by_name(name, &ball)?;
        let r = dbar_qmc(1.0, &case, &w, DBAR_QMC_NODES)?;
        println!("4-ball {name:<18} value {:.6}  error {:.2e}", r.value, r.error);
    }
    Ok(())
}
