//! Green's function table on the unit disk: analytic oracle against the
//! corrector split, invariant checks, and a save/load round trip.

use std::sync::Arc;

use greenbound::geometry::{build_geometry, GeometrySpec};
use greenbound::green::{build_green_table_with, select_sources, GreenTable, Provenance};

fn main() -> greenbound::Result<()> {
    let g = Arc::new(build_geometry(&GeometrySpec::new("disk", &[1.0], 0.05))?);
    let sources = select_sources(&g, 4);
    let analytic = build_green_table_with(g.clone(), &sources, Provenance::Analytic)?;
    let numeric = build_green_table_with(g.clone(), &sources, Provenance::CorrectorSplit)?;

    for (label, t) in [("analytic", &analytic), ("corrector split", &numeric)] {
        println!("{label}:");
        for c in t.check_invariants() {
            println!("  {:<20} {:>10.3e} (tol {:.1e}, {} checked) {}", c.name, c.max_violation, c.tolerance, c.checked, if c.passed { "ok" } else { "FAIL" });
        }
    }

    let excl = numeric.exclusion_radius();
    let mut worst = 0.0f64;
    for (i, x) in sources.iter().enumerate() {
        for j in 0..g.node_count() {
            if g.distance_unchecked(x, g.node(j)) > excl {
                worst = worst.max((analytic.values[i][j] - numeric.values[i][j]).abs());
            }
        }
    }
    println!("max |G_analytic - G_numeric| beyond {excl:.2}: {worst:.3e}");

    let dir = std::env::temp_dir().join("greenbound-example-table");
    analytic.save(&dir)?;
    let back = GreenTable::load(&dir)?;
    println!("reloaded {} sources x {} targets from {}", back.n_sources(), back.n_targets(), dir.display());
    Ok(())
}
