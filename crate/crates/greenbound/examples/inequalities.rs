//! Exponent admissibility, a Poincaré sweep on the flat torus, where the
//! optimal constant is known, and a Sobolev sweep on the disk with its
//! certified constant.

use std::sync::Arc;

use greenbound::geometry::{build_geometry, GeometrySpec};
use greenbound::inequalities::{
    admissible, certified_vs_empirical, certify, generate_family, ratio_suite, ExponentTriple, FamilyKind, FamilySpec,
};

fn main() -> greenbound::Result<()> {
    for (id, t) in [
        ("thm1.2", ExponentTriple::ints(2, 2, 2, Some(2))),
        ("thm1.2", ExponentTriple::ints(2, 1, 3, Some(1))),
        ("thm1.5", ExponentTriple::ints(3, 2, 2, None)),
    ] {
        let a = admissible(id, &t)?;
        println!("{id} {t}: {}", if a.admissible { "admissible".to_string() } else { a.reason });
    }

    let torus = Arc::new(build_geometry(&GeometrySpec::new("torus2", &[1.0], 1.0 / 32.0))?);
    let fourier = generate_family(&torus, FamilySpec::new(FamilyKind::Fourier, 8, 1))?;
    let report = ratio_suite("thm1.5", &ExponentTriple::ints(2, 2, 2, None), &fourier, &torus)?;
    println!("torus thm1.5: empirical δ = {:.6}, sharp {:?}, worst {}", report.empirical_delta, report.sharp_value, report.worst_case);

    let disk = Arc::new(build_geometry(&GeometrySpec::new("disk", &[1.0], 0.1))?);
    let t = ExponentTriple::ints(2, 2, 2, Some(2));
    let bumps = generate_family(&disk, FamilySpec::new(FamilyKind::Bumps, 8, 2))?;
    let report = ratio_suite("thm1.2", &t, &bumps, &disk)?;
    let recipes = certify("thm1.2", &t, &disk)?;
    let rec = certified_vs_empirical("thm1.2", &t, &recipes, &report);
    println!(
        "disk thm1.2: empirical δ = {:.4}, certified δ = {:.4}, consistent {}",
        rec.empirical_delta, rec.certified_delta, rec.consistent
    );
    for row in report.rows.iter().take(4) {
        println!("  {:<12} lhs {:.4e}  rhs {:.4e}", row.function, row.lhs, row.rhs);
    }
    Ok(())
}
