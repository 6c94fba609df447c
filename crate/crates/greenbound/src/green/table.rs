//! Sampled Green tables, their invariant suite, and CSV/JSON storage.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::numeric::{corrector_tolerance, numeric_columns, source_node, EXCLUSION};
use super::oracle::{oracle_for, GreenOracle};
use crate::error::{Error, Result};
use crate::geometry::{build_geometry, GeometryHandle, GeometryKind, GeometrySpec};
use crate::laplace::assemble;

/// Tolerance used for tables computed from closed forms.
pub const ANALYTIC_TOL: f64 = 1e-9;
/// Sign tolerance, G ≤ this everywhere.
pub const SIGN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    CorrectorSplit,
}

/// G(x_i, y_j), ∇_y G and ∂G/∂ν_y for sources x_i and all nodes y_j.
#[derive(Clone, Debug)]
pub struct GreenTable {
    pub geometry: Arc<GeometryHandle>,
    pub sources: Vec<Vec<f64>>,
    /// Node coinciding with each source; that entry is masked to 0.
    pub source_nodes: Vec<Option<usize>>,
    /// `values[i][j]` = G(x_i, node j).
    pub values: Vec<Vec<f64>>,
    /// `gradients[i][j * dim + a]`.
    pub gradients: Vec<Vec<f64>>,
    /// `normal_derivatives[i][k]` at `boundary_nodes()[k]`.
    pub normal_derivatives: Vec<Vec<f64>>,
    pub provenance: Provenance,
    pub h: f64,
    /// Measured corrector error, or the analytic tolerance.
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantCheck {
    pub name: String,
    pub max_violation: f64,
    pub tolerance: f64,
    pub checked: usize,
    pub passed: bool,
}

impl InvariantCheck {
    fn new(name: &str, max_violation: f64, tolerance: f64, checked: usize) -> Self {
        InvariantCheck { name: name.into(), max_violation, tolerance, checked, passed: max_violation <= tolerance }
    }
}

/// Builds a table with the analytic oracle when one exists, otherwise by
/// the corrector split.
pub fn build_green_table(g: Arc<GeometryHandle>, sources: &[Vec<f64>]) -> Result<GreenTable> {
    let prov = if oracle_for(&g).is_ok() { Provenance::Analytic } else { Provenance::CorrectorSplit };
    build_green_table_with(g, sources, prov)
}

pub fn build_green_table_with(g: Arc<GeometryHandle>, sources: &[Vec<f64>], provenance: Provenance) -> Result<GreenTable> {
    if sources.is_empty() {
        return Err(Error::Empty("sources"));
    }
    for x in sources {
        if !g.contains(x) || (g.has_boundary() && g.boundary_distance_unchecked(x) <= 0.0) {
            return Err(Error::OutsideGeometry(x.clone()));
        }
    }
    let source_nodes: Vec<Option<usize>> = sources.iter().map(|x| source_node(&g, x)).collect();
    let h = g.h();
    match provenance {
        Provenance::CorrectorSplit => {
            let op = assemble(g.clone())?;
            let tol = corrector_tolerance(&op)?;
            let cols = numeric_columns(&op, sources)?;
            Ok(GreenTable {
                geometry: g,
                sources: sources.to_vec(),
                source_nodes,
                values: cols.values,
                gradients: cols.gradients,
                normal_derivatives: cols.normal_derivatives,
                provenance,
                h,
                tol,
            })
        }
        Provenance::Analytic => {
            let oracle = oracle_for(&g)?;
            let cols: Vec<_> =
                sources.par_iter().zip(&source_nodes).map(|(x, s)| analytic_column(&g, oracle.as_ref(), x, *s)).collect();
            let mut t = GreenTable {
                geometry: g,
                sources: sources.to_vec(),
                source_nodes,
                values: vec![],
                gradients: vec![],
                normal_derivatives: vec![],
                provenance,
                h,
                tol: ANALYTIC_TOL,
            };
            for (v, gr, nd) in cols {
                t.values.push(v);
                t.gradients.push(gr);
                t.normal_derivatives.push(nd);
            }
            Ok(t)
        }
    }
}

fn analytic_column(
    g: &GeometryHandle,
    oracle: &dyn GreenOracle,
    x: &[f64],
    src: Option<usize>,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let d = g.dim();
    let n = g.node_count();
    let mut values = vec![0.0; n];
    let mut grads = vec![0.0; n * d];
    for j in 0..n {
        if Some(j) == src {
            continue;
        }
        let y = g.node(j);
        values[j] = oracle.value(x, y);
        grads[j * d..(j + 1) * d].copy_from_slice(&oracle.grad_y(x, y));
    }
    let normals = if g.has_boundary() {
        g.boundary_nodes()
            .iter()
            .map(|&b| {
                let nu = g.outward_normal(g.node(b)).unwrap();
                (0..d).map(|a| grads[b * d + a] * nu[a]).sum()
            })
            .collect()
    } else {
        vec![]
    };
    (values, grads, normals)
}

impl GreenTable {
    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    pub fn n_targets(&self) -> usize {
        self.geometry.node_count()
    }

    pub fn gradient(&self, i: usize, j: usize) -> &[f64] {
        let d = self.dim();
        &self.gradients[i][j * d..(j + 1) * d]
    }

    /// Pairs closer than 5h are excluded from pairwise checks.
    pub fn exclusion_radius(&self) -> f64 {
        EXCLUSION * self.h
    }

    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.source_nodes[i] == Some(j)
    }

    pub fn check_invariants(&self) -> Vec<InvariantCheck> {
        let g = &self.geometry;
        let mut out = Vec::new();
        if g.has_boundary() {
            let (mut worst, mut count) = (f64::NEG_INFINITY, 0);
            for row in &self.values {
                for v in row {
                    worst = worst.max(*v);
                    count += 1;
                }
            }
            out.push(InvariantCheck::new("sign", worst.max(0.0), SIGN_TOL, count));

            let (mut worst, mut count) = (0.0f64, 0);
            for row in &self.values {
                for &b in g.boundary_nodes() {
                    worst = worst.max(row[b].abs());
                    count += 1;
                }
            }
            out.push(InvariantCheck::new("boundary_vanishing", worst, self.tol, count));
        }

        let (mut worst, mut count) = (0.0f64, 0);
        let excl = self.exclusion_radius();
        for i in 0..self.n_sources() {
            for j in 0..self.n_sources() {
                let (Some(ni), Some(nj)) = (self.source_nodes[i], self.source_nodes[j]) else {
                    continue;
                };
                if i >= j || g.distance_unchecked(&self.sources[i], &self.sources[j]) < excl {
                    continue;
                }
                worst = worst.max((self.values[i][nj] - self.values[j][ni]).abs());
                count += 1;
            }
        }
        out.push(InvariantCheck::new("symmetry", worst, self.tol, count));

        if !g.has_boundary() {
            let (worst, tol) = self.mean_zero_defect();
            out.push(InvariantCheck::new("mean_zero", worst, tol, self.n_sources()));
        }
        out
    }

    pub fn passes(&self) -> bool {
        self.check_invariants().iter().all(|c| c.passed)
    }

    /// Worst |∫ G(x_i, y) dV(y)| and its tolerance. The logarithmic or
    /// Coulomb singular part is integrated in closed form and only the
    /// smooth remainder is summed with the node weights.
    pub fn mean_zero_defect(&self) -> (f64, f64) {
        let g = &self.geometry;
        let Ok(oracle) = oracle_for(g) else {
            return (f64::INFINITY, 0.0);
        };
        let w = g.volume_weights();
        let sing = oracle.singular_integral().unwrap_or(0.0);
        let worst = self
            .sources
            .par_iter()
            .map(|x| {
                let s: f64 = (0..g.node_count()).map(|j| w[j] * oracle.smooth_part(x, g.node(j)).unwrap_or(0.0)).sum();
                (s + sing).abs()
            })
            .reduce(|| 0.0, f64::max);
        let tol = match g.kind {
            GeometryKind::Torus { .. } => ANALYTIC_TOL,
            _ => self.h * self.h,
        };
        (worst, tol)
    }

    /// Boundary integral of the Poisson kernel per source (should be 1).
    pub fn poisson_mass(&self) -> Vec<f64> {
        let w = self.geometry.boundary_weights();
        self.normal_derivatives.iter().map(|row| row.iter().zip(w).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_rows(&dir.join("values.csv"), &self.values)?;
        write_rows(&dir.join("gradients.csv"), &self.gradients)?;
        write_rows(&dir.join("normal_derivatives.csv"), &self.normal_derivatives)?;
        let manifest = TableManifest {
            geometry: self.geometry.spec.clone(),
            provenance: self.provenance,
            h: self.h,
            tol: self.tol,
            dim: self.dim(),
            sources: self.sources.clone(),
            source_nodes: self.source_nodes.clone(),
            targets: (0..self.n_targets()).map(|j| self.geometry.node(j).to_vec()).collect(),
            boundary_nodes: self.geometry.boundary_nodes().to_vec(),
            files: ["values.csv", "gradients.csv", "normal_derivatives.csv"].map(String::from).to_vec(),
        };
        fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<GreenTable> {
        let manifest: TableManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
        let geometry = Arc::new(build_geometry(&manifest.geometry)?);
        if geometry.node_count() != manifest.targets.len() {
            return Err(Error::SizeMismatch { expected: manifest.targets.len(), got: geometry.node_count() });
        }
        Ok(GreenTable {
            geometry,
            sources: manifest.sources,
            source_nodes: manifest.source_nodes,
            values: read_rows(&dir.join("values.csv"))?,
            gradients: read_rows(&dir.join("gradients.csv"))?,
            normal_derivatives: read_rows(&dir.join("normal_derivatives.csv"))?,
            provenance: manifest.provenance,
            h: manifest.h,
            tol: manifest.tol,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TableManifest {
    geometry: GeometrySpec,
    provenance: Provenance,
    h: f64,
    tol: f64,
    dim: usize,
    sources: Vec<Vec<f64>>,
    source_nodes: Vec<Option<usize>>,
    targets: Vec<Vec<f64>>,
    boundary_nodes: Vec<usize>,
    files: Vec<String>,
}

fn write_rows(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).flexible(true).from_path(path)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| Error::Missing(format!("{}: {e}", path.display()))))
            .collect::<Result<Vec<_>>>()?;
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::numeric::select_sources;

    fn handle(kind: &str, params: &[f64], h: f64) -> Arc<GeometryHandle> {
        Arc::new(build_geometry(&GeometrySpec::new(kind, params, h)).unwrap())
    }

    #[test]
    fn disk_tables_pass_and_roundtrip() {
        let g = handle("disk", &[1.0], 0.1);
        let src = select_sources(&g, 20);
        for prov in [Provenance::Analytic, Provenance::CorrectorSplit] {
            let t = build_green_table_with(g.clone(), &src, prov).unwrap();
            for c in t.check_invariants() {
                assert!(c.passed, "{prov:?} {c:?}");
            }
        }
        let t = build_green_table_with(g.clone(), &src[..3], Provenance::CorrectorSplit).unwrap();
        let dir = std::env::temp_dir().join(format!("greenbound-table-{}", std::process::id()));
        t.save(&dir).unwrap();
        let back = GreenTable::load(&dir).unwrap();
        assert_eq!(back.values, t.values);
        assert_eq!(back.normal_derivatives, t.normal_derivatives);
        assert_eq!(back.provenance, Provenance::CorrectorSplit);
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn torus_mean_zero() {
        let g = handle("torus2", &[1.0], 1.0 / 32.0);
        let t = build_green_table(g.clone(), &select_sources(&g, 10)).unwrap();
        let (d, tol) = t.mean_zero_defect();
        assert!(d <= 1e-9, "{d}");
        assert_eq!(tol, 1e-9);
        assert!(t.passes());
    }

    #[test]
    fn ball4_is_analytic() {
        let spec = GeometrySpec::new("ball4", &[1.0], 0.3).with_samples(2000);
        let g = Arc::new(build_geometry(&spec).unwrap());
        let t = build_green_table(g.clone(), &select_sources(&g, 5)).unwrap();
        assert_eq!(t.provenance, Provenance::Analytic);
        assert!(t.passes());
    }
}
