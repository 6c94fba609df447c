//! Builds every geometry in the catalog and prints its size, volume and
//! mesh size.

use greenbound::geometry::{build_geometry, GeometrySpec};

fn main() -> greenbound::Result<()> {
    let specs = [
        GeometrySpec::new("disk", &[1.0], 0.1),
        GeometrySpec::new("ellipse", &[2.0, 1.0], 0.1),
        GeometrySpec::new("annulus2d", &[0.5, 1.0], 0.05),
        GeometrySpec::new("ball3", &[1.0], 0.1),
        GeometrySpec::new("ball4", &[1.0], 0.2).with_samples(20_000),
        GeometrySpec::new("torus2", &[1.0], 1.0 / 32.0),
        GeometrySpec::new("torus3", &[1.0], 1.0 / 8.0),
        GeometrySpec::new("sphere2", &[1.0], 0.2),
    ];
    println!("{:<10} {:>8} {:>8} {:>10} {:>10} {:>8}", "kind", "nodes", "bdry", "volume", "exact", "h");
    for spec in &specs {
        let g = build_geometry(spec)?;
        println!(
            "{:<10} {:>8} {:>8} {:>10.5} {:>10.5} {:>8.4}",
            g.name(),
            g.node_count(),
            g.boundary_nodes().len(),
            g.volume(),
            g.kind.exact_volume(),
            g.h()
        );
    }
    Ok(())
}
