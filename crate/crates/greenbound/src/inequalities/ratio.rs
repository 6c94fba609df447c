//! Ratio testing: RHS/LHS of each inequality over a family, the empirical
//! constant, and its comparison with certified and sharp values.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::admissibility::{admissible, theorem_info, ExponentTriple, Setting, TheoremKind};
use super::families::{Family, FamilyKind};
use crate::error::{Error, Result};
use crate::geometry::{GeometryHandle, GeometryKind};
use crate::kernel_analysis::{discrete_kernel, holder_certificate, ConstantRecipe, RecipeTarget};
use crate::laplace::{assemble, first_nonzero_eigenvalue, weighted_norm, SpectralOps};
use crate::representations::{Smoothness, TestFunctionCase};

/// Direction of the estimate, stated in every report.
pub const DELTA_NOTE: &str =
    "empirical_delta is a minimum over a finite family, so it bounds the optimal delta from above; equivalently 1/empirical_delta bounds the optimal constant from below";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub function: String,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs/lhs; None when lhs = 0.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem_id: String,
    pub exponents: ExponentTriple,
    pub geometry: String,
    pub family: FamilyKind,
    pub seed: u64,
    pub rows: Vec<RatioRow>,
    pub empirical_delta: f64,
    /// Member attaining the minimum ratio.
    pub worst_case: String,
    pub certified_bound: Option<f64>,
    pub sharp_value: Option<f64>,
    pub lambda1: Option<f64>,
    /// empirical_delta > 0 and every ratio finite.
    pub positive: bool,
    pub note: String,
}

impl InequalityReport {
    pub fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["function", "lhs", "rhs", "ratio"])?;
        for r in &self.rows {
            w.write_record([
                r.function.clone(),
                format!("{:e}", r.lhs),
                format!("{:e}", r.rhs),
                r.ratio.map(|v| format!("{v:e}")).unwrap_or_default(),
            ])?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).map_err(|e| Error::Missing(e.to_string()))
    }
}

fn exp(e: super::admissibility::Exponent) -> f64 {
    e.value()
}

/// Nodal values with weights over the geometry.
struct Nodes<'a> {
    g: &'a GeometryHandle,
}

impl Nodes<'_> {
    fn values(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.g.node_count()).map(|i| f(self.g.node(i))).collect()
    }

    fn norm(&self, v: &[f64], p: f64) -> Result<f64> {
        weighted_norm(v, self.g.volume_weights(), p)
    }

    fn boundary_norm(&self, case: &TestFunctionCase, p: f64) -> Result<f64> {
        let v: Vec<f64> = self.g.boundary_nodes().iter().map(|&i| case.eval(self.g.node(i)).norm()).collect();
        weighted_norm(&v, self.g.boundary_weights(), p)
    }

    /// |f − mean f| with the mean taken in the node quadrature.
    fn centred(&self, case: &TestFunctionCase) -> Vec<f64> {
        let w = self.g.volume_weights();
        let f: Vec<Complex64> = (0..self.g.node_count()).map(|i| case.eval(self.g.node(i))).collect();
        let mean = f.iter().zip(w).map(|(v, w)| v * w).sum::<Complex64>() / w.iter().sum::<f64>();
        f.iter().map(|v| (v - mean).norm()).collect()
    }

    fn total_variation(&self, case: &TestFunctionCase) -> Result<f64> {
        if case.riesz.is_some() {
            return Ok(case.riesz_measure(self.g)?.total_variation());
        }
        let l = case.laplacian.as_ref().ok_or_else(|| Error::Missing(format!("Δf of `{}`", case.name)))?;
        self.norm(&self.values(|x| l(x).norm()), 1.0)
    }
}

fn need<'a, T>(v: &'a Option<T>, what: &str, case: &TestFunctionCase) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Missing(format!("{what} of `{}`", case.name)))
}

fn grad_mag(case: &TestFunctionCase, x: &[f64]) -> Result<f64> {
    let g = need(&case.gradient, "∇f", case)?(x);
    Ok(g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
}

/// |∂̄f| = (Σ_j |∂f/∂w̄_j|²)^{1/2}.
fn dbar_mag(case: &TestFunctionCase, x: &[f64]) -> Result<f64> {
    let d = case.dbar_at(x).ok_or_else(|| Error::Missing(format!("∂̄f of `{}`", case.name)))?;
    Ok(d.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
}

fn del_mag(case: &TestFunctionCase, x: &[f64]) -> Result<f64> {
    let d = case.del_at(x).ok_or_else(|| Error::Missing(format!("∂f of `{}`", case.name)))?;
    Ok(d.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
}

fn try_values(g: &GeometryHandle, f: impl Fn(&[f64]) -> Result<f64>) -> Result<Vec<f64>> {
    (0..g.node_count()).map(|i| f(g.node(i))).collect()
}

/// Zero on every grid node with a zero index, which is where a periodic
/// cell would have to be cut to embed it in ℂⁿ.
fn check_compact_support(g: &GeometryHandle, case: &TestFunctionCase) -> Result<()> {
    let grid = g.grid().ok_or(Error::NoDiscretization)?;
    for i in 0..grid.len() {
        if grid.unravel(i).contains(&0) && case.eval(g.node(i)).norm() > 0.0 {
            return Err(Error::IncompatibleFamily {
                family: case.name.clone(),
                reason: "support touches the edge of the periodic cell".into(),
            });
        }
    }
    Ok(())
}

fn check_setting(id: &str, t: &ExponentTriple, g: &GeometryHandle) -> Result<()> {
    let info = theorem_info(id)?;
    let bad = |reason: String| Err(Error::Inadmissible { theorem: id.into(), reason });
    if info.kind != TheoremKind::Inequality {
        return bad("not an inequality; see `theorems` for the command that exercises it".into());
    }
    if t.n as usize != g.manifold_dim() {
        return bad(format!("n = {} but {} has dimension {}", t.n, g.name(), g.manifold_dim()));
    }
    if info.complex && g.dim() != g.manifold_dim() {
        return bad(format!("{} carries no complex coordinates here", g.name()));
    }
    match info.setting {
        Setting::Boundary if !g.has_boundary() => bad(format!("needs a boundary, {} is closed", g.name())),
        Setting::Closed if g.has_boundary() => bad(format!("needs a closed manifold, {} has a boundary", g.name())),
        Setting::Cn if !matches!(g.kind, GeometryKind::Torus { dim: 2, .. }) => {
            bad("compactly supported functions are tested on the periodic torus2 grid (ℂ¹)".into())
        }
        _ => Ok(()),
    }
}

/// Whether a member belongs to the class the theorem quantifies over.
fn in_class(id: &str, case: &TestFunctionCase, g: &GeometryHandle) -> bool {
    let nodes = || (0..g.node_count()).map(|i| g.node(i));
    match id {
        "cor1.4" => case.smoothness == Smoothness::Harmonic && case.metadata_consistent(g),
        "cor-dbar-poincare" => {
            case.smoothness == Smoothness::Holomorphic
                && nodes().all(|x| case.dbar_at(x).is_some_and(|d| d.iter().all(|v| v.norm() < 1e-12)))
        }
        "thm1.7" | "subharmonic2" => case.riesz.is_some() || case.laplacian.is_some(),
        "thm1.8" => {
            let sub = match case.smoothness {
                Smoothness::Harmonic | Smoothness::Subharmonic => case.metadata_consistent(g),
                Smoothness::QuasiSubharmonic => case.riesz_measure(g).is_ok_and(|m| m.is_nonnegative()),
                _ => false,
            };
            sub && nodes().all(|x| {
                let v = case.eval(x);
                v.im == 0.0 && v.re >= 0.0
            })
        }
        "thm1.2" | "thm1.5" => case.gradient.is_some(),
        "thm1.3" | "thm1.6" => case.laplacian.is_some(),
        _ => case.dbar_at(g.node(0)).is_some(),
    }
}

/// LHS and RHS for one member.
fn sides(id: &str, t: &ExponentTriple, case: &TestFunctionCase, g: &GeometryHandle) -> Result<(f64, f64)> {
    let nd = Nodes { g };
    let (p, q) = (exp(t.p), exp(t.q));
    let r = t.r.map(exp).unwrap_or(p);
    let abs_f = || nd.values(|x| case.eval(x).norm());
    Ok(match id {
        "thm1.2" => (nd.norm(&abs_f(), q)?, nd.norm(&try_values(g, |x| grad_mag(case, x))?, p)? + nd.boundary_norm(case, r)?),
        "thm1.3" => {
            let l = need(&case.laplacian, "Δf", case)?;
            (nd.norm(&abs_f(), q)?, nd.norm(&nd.values(|x| l(x).norm()), p)? + nd.boundary_norm(case, r)?)
        }
        "cor1.4" | "thm1.8" | "cor-dbar-poincare" => (nd.norm(&abs_f(), q)?, nd.boundary_norm(case, p)?),
        "thm1.5" => (nd.norm(&nd.centred(case), q)?, nd.norm(&try_values(g, |x| grad_mag(case, x))?, p)?),
        "thm1.6" => {
            let l = need(&case.laplacian, "Δf", case)?;
            (nd.norm(&nd.centred(case), q)?, nd.norm(&nd.values(|x| l(x).norm()), p)?)
        }
        "thm1.7" => (nd.norm(&abs_f(), q)?, nd.total_variation(case)? + nd.boundary_norm(case, p)?),
        "subharmonic2" => (nd.norm(&nd.centred(case), q)?, nd.total_variation(case)?),
        "thm1.14" => (nd.norm(&abs_f(), q)?, nd.norm(&try_values(g, |x| dbar_mag(case, x))?, p)? + nd.boundary_norm(case, r)?),
        "poincare-average" | "poincare-average1" => {
            (nd.norm(&nd.centred(case), q)?, nd.norm(&try_values(g, |x| dbar_mag(case, x))?, p)?)
        }
        "key-lemma-l1" => {
            check_compact_support(g, case)?;
            (nd.norm(&abs_f(), q)?, nd.norm(&try_values(g, |x| dbar_mag(case, x))?, 1.0)?)
        }
        "lem1.15" => {
            check_compact_support(g, case)?;
            (nd.norm(&try_values(g, |x| del_mag(case, x))?, p)?, nd.norm(&try_values(g, |x| dbar_mag(case, x))?, p)?)
        }
        _ => return Err(Error::Inadmissible { theorem: id.into(), reason: "no ratio form".into() }),
    })
}

/// Optimal δ at p = q = 2 on closed manifolds, from λ₁.
fn sharp(id: &str, t: &ExponentTriple, lambda1: f64) -> Option<f64> {
    match id {
        "thm1.5" => Some(lambda1.sqrt()),
        "thm1.6" => Some(lambda1),
        // ‖∇f‖² = 4‖∂̄f‖² on a flat torus
        "poincare-average" => Some(0.5 * lambda1.sqrt()),
        _ => {
            let _ = t;
            None
        }
    }
}

/// Evaluates the inequality on every admissible member of the family.
pub fn ratio_suite(theorem_id: &str, t: &ExponentTriple, family: &Family, g: &Arc<GeometryHandle>) -> Result<InequalityReport> {
    let adm = admissible(theorem_id, t)?;
    if !adm.admissible {
        return Err(Error::Inadmissible { theorem: theorem_id.into(), reason: adm.reason });
    }
    check_setting(theorem_id, t, g)?;
    let members: Vec<&TestFunctionCase> = family.cases.iter().filter(|c| in_class(theorem_id, c, g)).collect();
    if members.is_empty() {
        return Err(Error::Empty("filtered family"));
    }
    let rows: Vec<RatioRow> = members
        .par_iter()
        .map(|case| {
            let (lhs, rhs) = sides(theorem_id, t, case, g)?;
            Ok(RatioRow { function: case.name.clone(), lhs, rhs, ratio: (lhs > 0.0).then(|| rhs / lhs) })
        })
        .collect::<Result<_>>()?;
    let (mut delta, mut worst) = (f64::INFINITY, String::new());
    for r in &rows {
        if let Some(v) = r.ratio {
            if v < delta {
                delta = v;
                worst = r.function.clone();
            }
        }
    }
    if worst.is_empty() {
        return Err(Error::Empty("family with nonzero left-hand side"));
    }
    let positive = delta > 0.0 && rows.iter().all(|r| r.ratio.is_none_or(f64::is_finite) && r.lhs.is_finite() && r.rhs.is_finite());
    let (mut lambda1, mut sharp_value) = (None, None);
    let two = |e: super::admissibility::Exponent| e.value() == 2.0;
    if !g.has_boundary() && two(t.p) && two(t.q) && matches!(theorem_id, "thm1.5" | "thm1.6" | "poincare-average") {
        let flat = matches!(g.kind, GeometryKind::Torus { .. });
        if theorem_id != "poincare-average" || flat {
            let l = first_nonzero_eigenvalue(&assemble(g.clone())?)?.value;
            lambda1 = Some(l);
            sharp_value = sharp(theorem_id, t, l);
        }
    }
    Ok(InequalityReport {
        theorem_id: theorem_id.into(),
        exponents: *t,
        geometry: g.name(),
        family: family.spec.kind,
        seed: family.spec.seed,
        rows,
        empirical_delta: delta,
        worst_case: worst,
        certified_bound: None,
        sharp_value,
        lambda1,
        positive,
        note: DELTA_NOTE.into(),
    })
}

/// Kernel-operator targets whose bounds combine into a certified δ.
pub fn certificate_targets(theorem_id: &str) -> Option<&'static [RecipeTarget]> {
    use RecipeTarget::*;
    Some(match theorem_id {
        "thm1.2" => &[GradientInterior, GradientBoundary],
        "thm1.3" => &[LaplaceInterior, GradientBoundary],
        "cor1.4" => &[GradientBoundary],
        "thm1.5" => &[GradientInterior],
        "thm1.6" => &[LaplaceInterior],
        _ => return None,
    })
}

/// Discrete Hölder certificates for the kernel operators the theorem's
/// proof chains together. The r exponent defaults to p.
pub fn certify(theorem_id: &str, t: &ExponentTriple, g: &GeometryHandle) -> Result<Vec<ConstantRecipe>> {
    let targets = certificate_targets(theorem_id)
        .ok_or_else(|| Error::Inadmissible { theorem: theorem_id.into(), reason: "no certified recipe for this theorem".into() })?;
    let (p, q) = (exp(t.p), exp(t.q));
    if !q.is_finite() {
        return Err(Error::Exponent("certificates need finite q".into()));
    }
    let r = if theorem_id == "cor1.4" { p } else { t.r.map(exp).unwrap_or(p) };
    targets
        .iter()
        .map(|&target| holder_certificate(&discrete_kernel(g, target.kernel_kind())?, p, q, r, target))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRecord {
    pub theorem_id: String,
    /// 1 / max of the certified operator bounds.
    pub certified_delta: f64,
    pub empirical_delta: f64,
    /// empirical / certified.
    pub slack: f64,
    pub consistent: bool,
    /// certified δ does not exceed the sharp δ, when known.
    pub sharp_ok: Option<bool>,
}

/// ‖f‖_q ≤ C₁‖·‖ + C₂‖·‖ ≤ max C (RHS), so δ = 1/max C is certified and
/// the empirical δ must not fall below it.
pub fn certified_vs_empirical(theorem_id: &str, t: &ExponentTriple, recipes: &[ConstantRecipe], report: &InequalityReport) -> ConsistencyRecord {
    let _ = t;
    let c = recipes.iter().map(|r| r.certified_bound).fold(0.0, f64::max);
    let certified_delta = if c > 0.0 { 1.0 / c } else { f64::INFINITY };
    let slack = report.empirical_delta / certified_delta;
    ConsistencyRecord {
        theorem_id: theorem_id.into(),
        certified_delta,
        empirical_delta: report.empirical_delta,
        slack,
        consistent: slack >= 1.0 - 1e-9,
        sharp_ok: report.sharp_value.map(|s| certified_delta <= s * (1.0 + 1e-9)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelDbarRow {
    pub function: String,
    pub del_norm: f64,
    pub dbar_norm: f64,
    pub ratio: f64,
    /// |‖∂f‖₂ − ‖∂̄f‖₂| / ‖∂̄f‖₂.
    pub l2_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelDbarReport {
    pub p: f64,
    pub geometry: String,
    pub family: FamilyKind,
    pub seed: u64,
    pub rows: Vec<DelDbarRow>,
    pub max_ratio: f64,
    pub max_l2_defect: f64,
}

/// ‖∂f‖_p / ‖∂̄f‖_p with spectral derivatives of the nodal values on the
/// torus2 grid (ℂ¹), for compactly supported members.
pub fn dbar_vs_del_comparison(p: f64, g: &GeometryHandle, family: &Family) -> Result<DelDbarReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent(format!("p = {p} must lie in (1, ∞)")));
    }
    let grid = match (g.kind, g.grid()) {
        (GeometryKind::Torus { dim: 2, .. }, Some(grid)) => grid,
        _ => return Err(Error::InvalidParameters { kind: g.name(), reason: "needs the torus2 grid".into() }),
    };
    let ops = SpectralOps::new(grid);
    let w = g.volume_weights();
    let rows: Vec<DelDbarRow> = family
        .cases
        .par_iter()
        .map(|case| {
            check_compact_support(g, case)?;
            let f: Vec<Complex64> = (0..g.node_count()).map(|i| case.eval(g.node(i))).collect();
            let fx = ops.derivative_complex(&f, 0);
            let fy = ops.derivative_complex(&f, 1);
            let i = Complex64::i();
            let del: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| (0.5 * (a - i * b)).norm()).collect();
            let dbar: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| (0.5 * (a + i * b)).norm()).collect();
            let (dn, bn) = (weighted_norm(&del, w, p)?, weighted_norm(&dbar, w, p)?);
            let (d2, b2) = (weighted_norm(&del, w, 2.0)?, weighted_norm(&dbar, w, 2.0)?);
            if bn == 0.0 {
                return Err(Error::IncompatibleFamily { family: case.name.clone(), reason: "∂̄f vanishes".into() });
            }
            Ok(DelDbarRow { function: case.name.clone(), del_norm: dn, dbar_norm: bn, ratio: dn / bn, l2_defect: (d2 - b2).abs() / b2 })
        })
        .collect::<Result<_>>()?;
    Ok(DelDbarReport {
        p,
        geometry: g.name(),
        family: family.spec.kind,
        seed: family.spec.seed,
        max_ratio: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
        max_l2_defect: rows.iter().map(|r| r.l2_defect).fold(0.0, f64::max),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::super::admissibility::Exponent;
    use super::super::families::{generate_family, FamilySpec};
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};
    use std::f64::consts::PI;

    fn geom(kind: &str, params: &[f64], h: f64) -> Arc<GeometryHandle> {
        Arc::new(build_geometry(&GeometrySpec::new(kind, params, h)).unwrap())
    }

    #[test]
    fn torus_poincare_is_sharp() {
        let g = geom("torus2", &[1.0], 1.0 / 32.0);
        let fam = generate_family(&g, FamilySpec::new(FamilyKind::Fourier, 10, 0)).unwrap();
        let rep = ratio_suite("thm1.5", &ExponentTriple::ints(2, 2, 2, None), &fam, &g).unwrap();
        let d2 = rep.empirical_delta.powi(2);
        assert!((d2 - 4.0 * PI * PI).abs() < 1e-6, "{d2}");
        assert!((rep.lambda1.unwrap() - 4.0 * PI * PI).abs() < 1e-6);
        assert!(rep.positive && rep.worst_case.starts_with("sin[1, 0]") || rep.worst_case.starts_with("cos[1, 0]") || rep.worst_case.contains("[0, 1]"));
    }

    #[test]
    fn sphere_poincare_near_two() {
        let g = geom("sphere2", &[1.0], 0.1);
        let fam = generate_family(&g, FamilySpec::new(FamilyKind::Fourier, 8, 0)).unwrap();
        let rep = ratio_suite("thm1.5", &ExponentTriple::ints(2, 2, 2, None), &fam, &g).unwrap();
        let d2 = rep.empirical_delta.powi(2);
        assert!((d2 - 2.0).abs() < 0.04, "{d2}");
        assert!((rep.lambda1.unwrap() - 2.0).abs() < 0.04);
    }

    #[test]
    fn constant_on_disk() {
        let g = geom("disk", &[1.0], 0.05);
        let fam = generate_family(&g, FamilySpec::new(FamilyKind::Harmonic, 1, 0)).unwrap();
        let (q, r) = (2.0, 3.0);
        let rep = ratio_suite("thm1.2", &ExponentTriple::ints(2, 2, 2, Some(3)), &fam, &g).unwrap();
        let exact = (2.0 * PI).powf(1.0 / r) / PI.powf(1.0 / q);
        assert!((rep.empirical_delta - exact).abs() < 1e-2 * exact, "{} vs {exact}", rep.empirical_delta);
    }

    #[test]
    fn inadmissible_and_wrong_setting() {
        let g = geom("disk", &[1.0], 0.1);
        let fam = generate_family(&g, FamilySpec::new(FamilyKind::Harmonic, 2, 0)).unwrap();
        assert!(matches!(
            ratio_suite("thm1.2", &ExponentTriple::ints(2, 1, 3, Some(1)), &fam, &g),
            Err(Error::Inadmissible { .. })
        ));
        assert!(matches!(ratio_suite("thm1.5", &ExponentTriple::ints(2, 2, 2, None), &fam, &g), Err(Error::Inadmissible { .. })));
        assert!(matches!(ratio_suite("thm1.8", &ExponentTriple::ints(2, 2, 2, None), &fam, &g), Ok(_)));
    }

    #[test]
    fn del_dbar_l2_identity() {
        let g = geom("torus2", &[1.0], 1.0 / 64.0);
        let fam = generate_family(&g, FamilySpec::new(FamilyKind::Bumps, 6, 2)).unwrap();
        let rep = dbar_vs_del_comparison(2.0, &g, &fam).unwrap();
        assert!(rep.max_l2_defect < 1e-10, "{}", rep.max_l2_defect);
        assert!(rep.rows.iter().all(|r| (r.ratio - 1.0).abs() < 1e-10));
        let rep4 = dbar_vs_del_comparison(4.0, &g, &fam).unwrap();
        assert!(rep4.max_ratio.is_finite() && rep4.max_ratio > 0.0);
        assert!(dbar_vs_del_comparison(1.0, &g, &fam).is_err());
        let bad = generate_family(&g, FamilySpec::new(FamilyKind::Fourier, 2, 0)).unwrap();
        assert!(matches!(dbar_vs_del_comparison(2.0, &g, &bad), Err(Error::IncompatibleFamily { .. })));
    }

    #[test]
    fn key_lemma_on_plane_grid() {
        let g = geom("torus2", &[1.0], 1.0 / 64.0);
        let fam = generate_family(&g, FamilySpec::new(FamilyKind::Bumps, 6, 4)).unwrap();
        let rep = ratio_suite("key-lemma-l1", &ExponentTriple::ints(2, 1, 2, None), &fam, &g).unwrap();
        assert!(rep.positive && rep.empirical_delta > 0.1, "{rep:?}");
    }

    #[test]
    fn certified_ball3_thm12() {
        let g = geom("ball3", &[1.0], 0.25);
        let t = ExponentTriple::ints(3, 2, 2, Some(2));
        let fam = generate_family(&g, FamilySpec::new(FamilyKind::Bumps, 4, 1)).unwrap();
        let rep = ratio_suite("thm1.2", &t, &fam, &g).unwrap();
        let recipes = certify("thm1.2", &t, &g).unwrap();
        let rec = certified_vs_empirical("thm1.2", &t, &recipes, &rep);
        assert!(rec.consistent, "{rec:?}");
    }

    #[test]
    fn certified_torus_below_sharp() {
        let g = geom("torus2", &[1.0], 1.0 / 16.0);
        let t = ExponentTriple::ints(2, 2, 2, None);
        let fam = generate_family(&g, FamilySpec::new(FamilyKind::Fourier, 6, 0)).unwrap();
        let rep = ratio_suite("thm1.5", &t, &fam, &g).unwrap();
        let rec = certified_vs_empirical("thm1.5", &t, &certify("thm1.5", &t, &g).unwrap(), &rep);
        assert!(rec.consistent && rec.sharp_ok == Some(true), "{rec:?}");
    }

    #[test]
    fn linf_branch_uses_nodal_max() {
        let g = geom("torus2", &[1.0], 1.0 / 16.0);
        let fam = generate_family(&g, FamilySpec::new(FamilyKind::Fourier, 2, 0)).unwrap();
        let t = ExponentTriple::new(2, Exponent::int(3), Exponent::Infinity, None);
        let rep = ratio_suite("thm1.5", &t, &fam, &g).unwrap();
        assert!(rep.rows[0].lhs <= 1.0 + 1e-12 && rep.rows[0].lhs > 0.99);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn ratios_are_scale_invariant(c in prop_oneof![-50.0f64..-0.01, 0.01f64..50.0], seed in 0u64..50) {
                let g = geom("disk", &[1.0], 0.2);
                let fam = generate_family(&g, FamilySpec::new(FamilyKind::Bumps, 3, seed)).unwrap();
                let scaled = Family { cases: fam.cases.iter().map(|k| k.scaled(c)).collect(), ..fam.clone() };
                let t = ExponentTriple::ints(2, 2, 3, Some(2));
                let a = ratio_suite("thm1.2", &t, &fam, &g).unwrap();
                let b = ratio_suite("thm1.2", &t, &scaled, &g).unwrap();
                for (x, y) in a.rows.iter().zip(&b.rows) {
                    let (x, y) = (x.ratio.unwrap(), y.ratio.unwrap());
                    prop_assert!((x - y).abs() <= 1e-12 * x.abs());
                }
            }

            #[test]
            fn centring_is_idempotent(shift in -10.0f64..10.0, seed in 0u64..50) {
                let g = geom("torus2", &[1.0], 1.0 / 16.0);
                let fam = generate_family(&g, FamilySpec::new(FamilyKind::Bumps, 3, seed)).unwrap();
                let shifted = Family { cases: fam.cases.iter().map(|k| k.shifted(Complex64::new(shift, 0.0))).collect(), ..fam.clone() };
                let t = ExponentTriple::ints(2, 2, 2, None);
                let a = ratio_suite("thm1.5", &t, &fam, &g).unwrap();
                let b = ratio_suite("thm1.5", &t, &shifted, &g).unwrap();
                for (x, y) in a.rows.iter().zip(&b.rows) {
                    let (x, y) = (x.ratio.unwrap(), y.ratio.unwrap());
                    prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0) * (1.0 + shift.abs()));
                }
            }
        }
    }
}
