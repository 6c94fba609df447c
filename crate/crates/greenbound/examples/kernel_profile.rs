//! Kernel L^p profile on the unit ball and the Hölder constant recipe it
//! feeds, compared with the certificate from the discrete kernel.

use std::sync::Arc;

use greenbound::geometry::{build_geometry, GeometrySpec};
use greenbound::green::{build_green_table, select_sources};
use greenbound::kernel_analysis::profile::A_GRID;
use greenbound::kernel_analysis::{discrete_kernel, holder_certificate, holder_constant_bound, kernel_lp_profile, RecipeTarget};

fn main() -> greenbound::Result<()> {
    let g = Arc::new(build_geometry(&GeometrySpec::new("ball3", &[1.0], 0.15))?);
    let table = build_green_table(g.clone(), &select_sources(&g, 8))?;
    let profile = kernel_lp_profile(&table, &A_GRID)?;
    println!("a      N(a, M)      N(a, ∂M)");
    for (k, a) in profile.a_grid.iter().enumerate() {
        let b = profile.boundary.as_ref().map(|v| v[k]).unwrap_or(f64::NAN);
        println!("{a:.1}  {:>11.5}  {:>11.5}", profile.interior[k], b);
    }

    let (p, q, r) = (2.0, 2.0, 2.0);
    let recipe = holder_constant_bound(3, p, q, r, &profile, RecipeTarget::GradientInterior)?;
    println!("profile recipe: C ≤ {:.4} with exponents {:?}", recipe.certified_bound, recipe.exponents);
    let kernel = discrete_kernel(&g, RecipeTarget::GradientInterior.kernel_kind())?;
    let cert = holder_certificate(&kernel, p, q, r, RecipeTarget::GradientInterior)?;
    println!("discrete certificate: C ≤ {:.4}", cert.certified_bound);
    Ok(())
}
