//! Empirical kernel estimates: pairwise bound constants over refinement
//! series, L^p profiles of the kernels, Hölder-split operator constants and
//! the annulus gradient scaling.

pub mod profile;
pub mod quadrature;
pub mod recipe;
pub mod scaling;

use serde::{Deserialize, Serialize};

pub use profile::{kernel_lp_profile, kernel_lp_profile_at, FitCheck, KernelProfile, ProfileMethod, PSweep};
pub use recipe::{
    discrete_kernel, empirical_operator_ratio, holder_certificate, holder_constant_bound, ConstantRecipe, DiscreteKernel,
    KernelKind, RecipeTarget,
};
pub use scaling::annulus_gradient_scaling;

use crate::error::{Error, Result};
use crate::green::{oracle_for, GreenTable, Provenance};
use crate::vecops::{dist, norm};

/// Relative change over the last refinement below which a constant counts
/// as stable.
pub const STABILITY: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: String,
    /// Pairs on the finest level.
    pub pair_count: usize,
    /// Constant on the finest level.
    pub empirical_constant: f64,
    pub refinement_series: Vec<f64>,
    pub stable: bool,
    /// Successive constants never decrease.
    pub monotone: bool,
    /// Exact value when one is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

impl BoundReport {
    fn from_series(bound_id: &str, series: Vec<f64>, pair_count: usize) -> Self {
        let last = *series.last().unwrap_or(&f64::NAN);
        let stable = match series.len() {
            0 | 1 => false,
            k => relative_change(series[k - 2], last) < STABILITY,
        };
        let monotone = series.windows(2).all(|w| w[1] >= w[0]);
        BoundReport {
            bound_id: bound_id.to_string(),
            pair_count,
            empirical_constant: last,
            refinement_series: series,
            stable: stable && last.is_finite(),
            monotone,
            reference: None,
        }
    }

    /// Series as a two-column CSV (level, constant).
    pub fn series_csv(&self) -> String {
        let mut s = String::from("level,constant\n");
        for (k, v) in self.refinement_series.iter().enumerate() {
            s.push_str(&format!("{k},{v:.17e}\n"));
        }
        s
    }
}

fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-300 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn log_weight(d: f64) -> f64 {
    1.0 + d.ln().abs()
}

/// A pairwise bound form: name and ratio |kernel| / model.
type Form = (&'static str, Box<dyn Fn(&Pair) -> Option<f64> + Sync>);

struct Pair<'a> {
    d: f64,
    delta: f64,
    value: f64,
    grad: &'a [f64],
}

fn uniform_forms(n: usize, closed: bool) -> Vec<Form> {
    if n >= 3 {
        let e = n as i32;
        vec![
            ("value_d^(n-2)", Box::new(move |p: &Pair| Some(p.value.abs() * p.d.powi(e - 2)))),
            ("gradient_d^(n-1)", Box::new(move |p: &Pair| Some(norm(p.grad) * p.d.powi(e - 1)))),
        ]
    } else if closed {
        vec![
            ("value_upper", Box::new(|p: &Pair| Some(p.value.max(0.0)))),
            ("value_lower_log", Box::new(|p: &Pair| Some((-p.value).max(0.0) / log_weight(p.d)))),
            ("gradient_log", Box::new(|p: &Pair| Some(norm(p.grad) * p.d / log_weight(p.d)))),
        ]
    } else {
        vec![
            ("value_log", Box::new(|p: &Pair| Some(p.value.abs() / log_weight(p.d)))),
            ("gradient_log", Box::new(|p: &Pair| Some(norm(p.grad) * p.d / log_weight(p.d)))),
        ]
    }
}

fn refined_forms(n: usize) -> Vec<Form> {
    let e = n as i32;
    let m = move |d: f64| if n == 2 { log_weight(d) } else { 1.0 };
    vec![
        ("refined_iv", Box::new(move |p: &Pair| Some(p.value.abs() * p.d.powi(e - 1) / (m(p.d) * p.delta)))),
        (
            "refined_v",
            Box::new(move |p: &Pair| Some(norm(p.grad) * p.d.powi(e - 1) / (m(p.d) * (p.delta / p.d).min(1.0)))),
        ),
    ]
}

/// Pairs closer than this are skipped: only the diagonal for analytic
/// tables, 5h for corrector-split columns.
fn pair_cutoff(table: &GreenTable) -> f64 {
    match table.provenance {
        Provenance::Analytic => 1e-9 * table.geometry.scale(),
        Provenance::CorrectorSplit => table.exclusion_radius(),
    }
}

/// Sup of each form over the pairs outside the cutoff.
fn sweep(table: &GreenTable, forms: &[Form]) -> (Vec<f64>, usize) {
    let g = &table.geometry;
    let dim = table.dim();
    let excl = pair_cutoff(table);
    let mut sup = vec![0.0f64; forms.len()];
    let mut count = 0;
    for (i, x) in table.sources.iter().enumerate() {
        let delta = if g.has_boundary() { g.boundary_distance_unchecked(x) } else { f64::INFINITY };
        for j in 0..table.n_targets() {
            if table.is_masked(i, j) {
                continue;
            }
            let y = g.node(j);
            let d = g.distance_unchecked(x, y);
            if d < excl {
                continue;
            }
            let pair = Pair { d, delta, value: table.values[i][j], grad: &table.gradients[i][j * dim..(j + 1) * dim] };
            for (k, (_, f)) in forms.iter().enumerate() {
                if let Some(v) = f(&pair) {
                    sup[k] = sup[k].max(v);
                }
            }
            count += 1;
        }
    }
    (sup, count)
}

fn reports_over(tables: &[GreenTable], forms: &[Form]) -> Result<Vec<BoundReport>> {
    if tables.is_empty() {
        return Err(Error::Empty("table series"));
    }
    let mut series = vec![Vec::new(); forms.len()];
    let mut count = 0;
    for t in tables {
        let (sup, c) = sweep(t, forms);
        if c == 0 {
            return Err(Error::Empty("pair set"));
        }
        count = c;
        for (s, v) in series.iter_mut().zip(sup) {
            s.push(v);
        }
    }
    Ok(forms.iter().zip(series).map(|((id, _), s)| BoundReport::from_series(id, s, count)).collect())
}

/// Uniform bounds on |G| and |∇_y G| against powers of d (log forms in
/// two dimensions) over a refinement series of tables, coarse to fine.
pub fn verify_uniform_bounds(tables: &[GreenTable]) -> Result<Vec<BoundReport>> {
    let first = tables.first().ok_or(Error::Empty("table series"))?;
    let forms = uniform_forms(first.geometry.manifold_dim(), !first.geometry.has_boundary());
    reports_over(tables, &forms)
}

/// δ(x)-refined bounds on Euclidean domains. The mixed second derivative
/// form is added when the geometry has an analytic oracle.
pub fn verify_boundary_refined_bounds(tables: &[GreenTable]) -> Result<Vec<BoundReport>> {
    let first = tables.first().ok_or(Error::Empty("table series"))?;
    if !first.geometry.has_boundary() {
        return Err(Error::NoBoundary);
    }
    let n = first.dim();
    let mut reports = reports_over(tables, &refined_forms(n))?;
    if tables.iter().all(|t| t.provenance == Provenance::Analytic) {
        let series: Vec<(f64, usize)> = tables.iter().map(mixed_hessian_sup).collect::<Result<_>>()?;
        let count = series.last().map(|s| s.1).unwrap_or(0);
        reports.push(BoundReport::from_series("refined_vi", series.into_iter().map(|s| s.0).collect(), count));
    }
    Ok(reports)
}

/// sup |∇_x∇_y G|·|x−y|^n (divided by 1+|ln|x−y|| when n = 2), with the
/// x-derivative taken by central differences of the analytic gradient.
fn mixed_hessian_sup(table: &GreenTable) -> Result<(f64, usize)> {
    let g = &table.geometry;
    let oracle = oracle_for(g)?;
    let n = table.dim();
    let eps = 1e-5 * g.scale();
    let excl = pair_cutoff(table).max(100.0 * eps);
    let (mut sup, mut count) = (0.0f64, 0);
    for x in &table.sources {
        for j in 0..table.n_targets() {
            let y = g.node(j);
            let d = dist(x, y);
            if d < excl {
                continue;
            }
            let mut frob = 0.0;
            for a in 0..n {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[a] += eps;
                xm[a] -= eps;
                let (gp, gm) = (oracle.grad_y(&xp, y), oracle.grad_y(&xm, y));
                frob += gp.iter().zip(&gm).map(|(p, m)| ((p - m) / (2.0 * eps)).powi(2)).sum::<f64>();
            }
            let mut v = frob.sqrt() * d.powi(n as i32);
            if n == 2 {
                v /= log_weight(d);
            }
            sup = sup.max(v);
            count += 1;
        }
    }
    Ok((sup, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};
    use crate::green::{build_green_table, select_sources};
    use std::sync::Arc;

    fn series(kind: &str, params: &[f64], hs: &[f64]) -> Vec<GreenTable> {
        let coarse = build_geometry(&GeometrySpec::new(kind, params, hs[0])).unwrap();
        let sources = select_sources(&coarse, 12);
        hs.iter()
            .map(|&h| build_green_table(Arc::new(build_geometry(&GeometrySpec::new(kind, params, h)).unwrap()), &sources).unwrap())
            .collect()
    }

    #[test]
    fn ball3_value_constant_is_coulomb() {
        let t = series("ball3", &[1.0], &[0.15, 0.1, 0.075]);
        let r = verify_uniform_bounds(&t).unwrap();
        // |G|·d ≤ 1/(4π) on the ball, approached near the source
        let c = r[0].empirical_constant;
        assert!(c > 0.0 && c <= 1.0 / (4.0 * std::f64::consts::PI) + 1e-12, "{c}");
        let refined = verify_boundary_refined_bounds(&t).unwrap();
        assert_eq!(refined.len(), 3);
        assert!(refined.iter().all(|b| b.empirical_constant.is_finite()));
    }

    #[test]
    fn closed_geometries_reject_refined_forms() {
        let t = series("torus2", &[1.0], &[0.1]);
        assert!(matches!(verify_boundary_refined_bounds(&t), Err(Error::NoBoundary)));
        let r = verify_uniform_bounds(&t).unwrap();
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn refined_iv_is_tighter_far_from_a_rim_point() {
        // x on the inner rim region of annulus2d, y diametrically opposite
        let (d, delta) = (2.9, 0.05);
        let plain = 1.0 + f64::ln(d).abs();
        let refined = plain * delta / d;
        assert!((refined / plain - delta / d).abs() < 1e-15);
    }
}
