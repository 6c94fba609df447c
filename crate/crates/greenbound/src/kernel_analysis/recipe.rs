//! Hölder-split bounds for the operators f ↦ ∫|K(x, y)| |f(y)|, with K the
//! Green gradient, the Poisson kernel or the Green function itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::KernelProfile;
use crate::error::{Error, Result};
use crate::geometry::GeometryHandle;
use crate::green::oracle_for;
use crate::laplace::weighted_norm;
use crate::vecops::norm;

/// p = 1 is evaluated as this limit point.
pub const P_ONE: f64 = 1.0 + 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipeTarget {
    GradientInterior,
    GradientBoundary,
    LaplaceInterior,
}

impl RecipeTarget {
    pub fn kernel_kind(self) -> KernelKind {
        match self {
            RecipeTarget::GradientInterior => KernelKind::Gradient,
            RecipeTarget::GradientBoundary => KernelKind::Boundary,
            RecipeTarget::LaplaceInterior => KernelKind::Value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantRecipe {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub target: RecipeTarget,
    /// Exponent of f actually used (p, or r for the boundary operator),
    /// after replacing 1 by its limit point.
    pub f_exponent: f64,
    /// q raised to `f_exponent` when smaller.
    pub q_effective: f64,
    /// |M|^{1/q − 1/q_effective}.
    pub volume_factor: f64,
    pub b: Option<f64>,
    /// a = p/q of the split.
    pub split_a: f64,
    /// None when q₀ = ∞.
    pub q0: Option<f64>,
    pub r0: f64,
    /// |1/q + 1/q₀ + 1/r₀ − 1|.
    pub holder_defect: f64,
    /// Profile arguments (a-values, or the L^s exponent on the n = 2 branch).
    pub exponents: Vec<(String, f64)>,
    pub windows_ok: bool,
    /// Operator-norm bound ‖B f‖_q ≤ certified_bound ‖f‖.
    pub certified_bound: f64,
    /// Some profile value was interpolated on the a-grid.
    pub interpolated: bool,
}

/// How the bound is assembled from kernel moments.
#[derive(Clone, Copy, Debug)]
enum Branch {
    /// C^q = colsup Σ K^{col} · (rowsup Σ K^{row})^{power}.
    Holder { col: f64, row: f64, power: f64 },
    /// C = |M|^{1/q} (rowsup Σ K^s)^{1/s}.
    RowNorm { s: f64 },
    /// C = colsup Σ K.
    Fubini,
}

struct Plan {
    recipe: ConstantRecipe,
    branch: Branch,
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v < 1.0 {
        return Err(Error::Exponent(format!("{name} = {v} must be ≥ 1")));
    }
    Ok(())
}

fn plan(n: usize, p: f64, q: f64, r: f64, target: RecipeTarget) -> Result<Plan> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    check_exponent("r", r)?;
    if n < 2 {
        return Err(Error::Exponent(format!("dimension {n} < 2")));
    }
    let nf = n as f64;
    let fubini = target == RecipeTarget::LaplaceInterior && n == 2 && q == 1.0;
    let raw = if target == RecipeTarget::GradientBoundary { r } else { p };
    if !raw.is_finite() || !q.is_finite() {
        return Err(Error::Exponent("the recipes need finite exponents".into()));
    }
    let fe = if fubini { 1.0 } else if raw == 1.0 { P_ONE } else { raw };
    let qe = q.max(fe);
    let mut recipe = ConstantRecipe {
        n,
        p,
        q,
        r,
        target,
        f_exponent: fe,
        q_effective: qe,
        volume_factor: 1.0,
        b: None,
        split_a: fe / qe,
        q0: None,
        r0: if fe > 1.0 { fe / (fe - 1.0) } else { f64::INFINITY },
        holder_defect: 0.0,
        exponents: vec![],
        windows_ok: true,
        certified_bound: f64::NAN,
        interpolated: false,
    };
    let a = fe / qe;
    recipe.q0 = (a < 1.0).then(|| fe / (1.0 - a));
    let inv_q0 = recipe.q0.map_or(0.0, |v| 1.0 / v);
    let inv_r0 = 1.0 - 1.0 / qe - inv_q0;
    if fe > 1.0 {
        recipe.r0 = 1.0 / inv_r0;
    }
    recipe.holder_defect = if fe > 1.0 { (1.0 / qe + inv_q0 + inv_r0 - 1.0).abs() } else { 0.0 };

    let window = |v: f64, hi: f64| v > 0.0 && v <= hi + 1e-9;
    let branch = match target {
        RecipeTarget::GradientInterior => {
            let b = 0.5 * (((nf - fe) / (fe * (nf - 1.0))).max(0.0) + (nf / (qe * (nf - 1.0))).min(1.0));
            let a1 = qe * b * (1.0 - nf) + nf;
            let a2 = fe * (1.0 - nf) * (1.0 - b) / (fe - 1.0) + nf;
            recipe.b = Some(b);
            recipe.windows_ok = window(a1, nf) && window(a2, nf);
            recipe.exponents = vec![("a1".into(), a1), ("a2".into(), a2)];
            Branch::Holder { col: qe * b, row: fe * (1.0 - b) / (fe - 1.0), power: qe * (fe - 1.0) / fe }
        }
        RecipeTarget::GradientBoundary => {
            let b = 0.5 * ((nf / (qe * (nf - 1.0))).min(1.0) + 1.0 / fe);
            let a1 = qe * b * (1.0 - nf) + nf;
            let ab = (fe * b - 1.0) * (nf - 1.0) / (fe - 1.0);
            recipe.b = Some(b);
            recipe.windows_ok = window(a1, nf) && window(ab, nf - 1.0);
            recipe.exponents = vec![("a1".into(), a1), ("a_boundary".into(), ab)];
            Branch::Holder { col: qe * b, row: fe * (1.0 - b) / (fe - 1.0), power: qe * (fe - 1.0) / fe }
        }
        RecipeTarget::LaplaceInterior if n >= 3 => {
            let b = 0.5 * (((nf - 2.0 * fe) / (fe * (nf - 2.0))).max(0.0) + (nf / (qe * (nf - 2.0))).min(1.0));
            let a1 = qe * b * (2.0 - nf) + nf;
            let a2 = ((nf - 2.0) * fe * b + 2.0 * fe - nf) / (fe - 1.0);
            recipe.b = Some(b);
            recipe.windows_ok = window(a1, nf) && window(a2, nf);
            recipe.exponents = vec![("a1".into(), a1), ("a2".into(), a2)];
            Branch::Holder { col: qe * b, row: fe * (1.0 - b) / (fe - 1.0), power: qe * (fe - 1.0) / fe }
        }
        RecipeTarget::LaplaceInterior if fubini => {
            recipe.exponents = vec![("s".into(), 1.0)];
            recipe.q_effective = 1.0;
            Branch::Fubini
        }
        RecipeTarget::LaplaceInterior => {
            let s = fe / (fe - 1.0);
            recipe.exponents = vec![("s".into(), s)];
            // the row-norm bound holds for every q directly
            recipe.q_effective = q;
            Branch::RowNorm { s }
        }
    };
    if !recipe.windows_ok {
        return Err(Error::Exponent(format!("recipe exponents {:?} leave the admissible windows", recipe.exponents)));
    }
    Ok(Plan { recipe, branch })
}

/// Certified operator bound from a measured kernel profile.
pub fn holder_constant_bound(
    n: usize,
    p: f64,
    q: f64,
    r: f64,
    profile: &KernelProfile,
    target: RecipeTarget,
) -> Result<ConstantRecipe> {
    if profile.dim != n {
        return Err(Error::Exponent(format!("profile dimension {} differs from n = {n}", profile.dim)));
    }
    let Plan { mut recipe, branch } = plan(n, p, q, r, target)?;
    let mut interp = false;
    let mut take = |v: Result<(f64, bool)>| -> Result<f64> {
        let (v, f) = v?;
        interp |= f;
        Ok(v)
    };
    let a1 = recipe.exponents[0].1;
    let bound = match (branch, target) {
        (Branch::Holder { power, .. }, RecipeTarget::GradientInterior) => {
            let a2 = recipe.exponents[1].1;
            (take(profile.n_interior_column(a1))? * take(profile.n_interior(a2))?.powf(power)).powf(1.0 / recipe.q_effective)
        }
        (Branch::Holder { power, .. }, RecipeTarget::GradientBoundary) => {
            let ab = recipe.exponents[1].1;
            (take(profile.n_boundary_column(a1))? * take(profile.n_boundary(ab))?.powf(power)).powf(1.0 / recipe.q_effective)
        }
        (Branch::Holder { power, .. }, RecipeTarget::LaplaceInterior) => {
            let a2 = recipe.exponents[1].1;
            // G is symmetric, so the column sup equals the row sup
            (take(profile.n_laplace(a1))? * take(profile.n_laplace(a2))?.powf(power)).powf(1.0 / recipe.q_effective)
        }
        (Branch::RowNorm { s }, _) => {
            let sweep = profile.p_sweep.as_ref().ok_or_else(|| Error::Missing("p-sweep".into()))?;
            let v = take(super::profile::lookup_p(sweep, s))?;
            profile.volume.powf(1.0 / q) * v.powf(1.0 / s)
        }
        (Branch::Fubini, _) => {
            let sweep = profile.p_sweep.as_ref().ok_or_else(|| Error::Missing("p-sweep".into()))?;
            take(super::profile::lookup_p(sweep, 1.0))?
        }
    };
    recipe.volume_factor = profile.volume.powf(1.0 / q - 1.0 / recipe.q_effective);
    recipe.certified_bound = bound * recipe.volume_factor;
    recipe.interpolated = interp;
    Ok(recipe)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// |∇_y G(x, y)|, x and y over all nodes.
    Gradient,
    /// |G(x, y)|.
    Value,
    /// |∇_y G(x, y)| with y on the boundary.
    Boundary,
}

/// Dense discretised kernel with quadrature weights on both sides.
#[derive(Clone, Debug)]
pub struct DiscreteKernel {
    pub kind: KernelKind,
    pub dim: usize,
    pub x_weights: Vec<f64>,
    pub y_weights: Vec<f64>,
    /// Row-major, x index first.
    pub entries: Vec<f64>,
}

/// Analytic kernel on the nodes of `g`, zero on the diagonal.
pub fn discrete_kernel(g: &GeometryHandle, kind: KernelKind) -> Result<DiscreteKernel> {
    let oracle = oracle_for(g)?;
    let nx = g.node_count();
    let (ys, y_weights): (Vec<usize>, Vec<f64>) = match kind {
        KernelKind::Boundary => {
            if !g.has_boundary() {
                return Err(Error::NoBoundary);
            }
            (g.boundary_nodes().to_vec(), g.boundary_weights().to_vec())
        }
        _ => ((0..nx).collect(), g.volume_weights().to_vec()),
    };
    let entries: Vec<f64> = (0..nx)
        .into_par_iter()
        .flat_map_iter(|i| {
            let x = g.node(i);
            let o = oracle.as_ref();
            ys.iter().map(move |&j| {
                if j == i {
                    0.0
                } else if kind == KernelKind::Value {
                    o.value(x, g.node(j)).abs()
                } else {
                    norm(&o.grad_y(x, g.node(j)))
                }
            })
        })
        .collect();
    Ok(DiscreteKernel { kind, dim: g.manifold_dim(), x_weights: g.volume_weights().to_vec(), y_weights, entries })
}

impl DiscreteKernel {
    pub fn nx(&self) -> usize {
        self.x_weights.len()
    }

    pub fn ny(&self) -> usize {
        self.y_weights.len()
    }

    pub fn volume(&self) -> f64 {
        self.x_weights.iter().sum()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.ny()..(i + 1) * self.ny()]
    }

    /// max_i Σ_j w_j K_ij^s.
    pub fn row_moment(&self, s: f64) -> f64 {
        (0..self.nx())
            .map(|i| self.row(i).iter().zip(&self.y_weights).map(|(k, w)| if *k > 0.0 { w * k.powf(s) } else { 0.0 }).sum())
            .fold(0.0, f64::max)
    }

    /// max_j Σ_i w_i K_ij^s.
    pub fn column_moment(&self, s: f64) -> f64 {
        let mut acc = vec![0.0; self.ny()];
        for i in 0..self.nx() {
            let w = self.x_weights[i];
            for (a, k) in acc.iter_mut().zip(self.row(i)) {
                if *k > 0.0 {
                    *a += w * k.powf(s);
                }
            }
        }
        acc.into_iter().fold(0.0, f64::max)
    }

    /// (Bf)_i = Σ_j w_j K_ij |f_j|.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.ny() {
            return Err(Error::SizeMismatch { expected: self.ny(), got: f.len() });
        }
        let wf: Vec<f64> = f.iter().zip(&self.y_weights).map(|(v, w)| v.abs() * w).collect();
        Ok((0..self.nx()).map(|i| self.row(i).iter().zip(&wf).map(|(k, v)| k * v).sum()).collect())
    }
}

/// Certified bound with the moments of the discrete kernel, so that the
/// discrete Hölder inequality makes it dominate every discrete ratio.
pub fn holder_certificate(kernel: &DiscreteKernel, p: f64, q: f64, r: f64, target: RecipeTarget) -> Result<ConstantRecipe> {
    if kernel.kind != target.kernel_kind() {
        return Err(Error::IncompatibleFamily {
            family: format!("{:?} kernel", kernel.kind),
            reason: format!("target {target:?} needs a {:?} kernel", target.kernel_kind()),
        });
    }
    let Plan { mut recipe, branch } = plan(kernel.dim, p, q, r, target)?;
    let vol = kernel.volume();
    let bound = match branch {
        Branch::Holder { col, row, power } => {
            (kernel.column_moment(col) * kernel.row_moment(row).powf(power)).powf(1.0 / recipe.q_effective)
        }
        Branch::RowNorm { s } => vol.powf(1.0 / q) * kernel.row_moment(s).powf(1.0 / s),
        Branch::Fubini => kernel.column_moment(1.0),
    };
    recipe.volume_factor = vol.powf(1.0 / q - 1.0 / recipe.q_effective);
    recipe.certified_bound = bound * recipe.volume_factor;
    Ok(recipe)
}

/// max over the family of ‖B f‖_q / ‖f‖_p in the kernel's weighted norms.
pub fn empirical_operator_ratio(kernel: &DiscreteKernel, family: &[Vec<f64>], p: f64, q: f64) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::Empty("test family"));
    }
    let mut best = 0.0f64;
    for f in family {
        let den = weighted_norm(f, &kernel.y_weights, p)?;
        if den == 0.0 {
            continue;
        }
        let bf = kernel.apply(f)?;
        best = best.max(weighted_norm(&bf, &kernel.x_weights, q)? / den);
    }
    Ok(best)
}

/// Profile argument a for a kernel exponent s (inverse of the exponent maps).
pub fn a_for_exponent(n: usize, s: f64, target: RecipeTarget) -> f64 {
    let nf = n as f64;
    match target {
        RecipeTarget::LaplaceInterior => nf - s * (nf - 2.0),
        _ => nf - s * (nf - 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::super::profile::{interior_exponent, laplace_exponent};
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn recipe_examples() {
        let r = plan(3, 2.0, 2.0, 2.0, RecipeTarget::GradientInterior).unwrap().recipe;
        assert!(close(r.b.unwrap(), 0.5) && close(r.exponents[0].1, 1.0) && close(r.exponents[1].1, 1.0));
        assert!(r.q0.is_none() && close(r.r0, 2.0) && r.holder_defect < 1e-12);
        let r = plan(3, 2.0, 2.0, 2.0, RecipeTarget::GradientBoundary).unwrap().recipe;
        assert!(close(r.b.unwrap(), 0.625) && close(r.exponents[1].1, 0.5));
        let r = plan(2, 2.0, 2.0, 2.0, RecipeTarget::GradientBoundary).unwrap().recipe;
        assert!(close(r.b.unwrap(), 0.75) && close(r.exponents[1].1, 0.5));
        let r = plan(3, 2.0, 2.0, 2.0, RecipeTarget::LaplaceInterior).unwrap().recipe;
        assert!(close(r.b.unwrap(), 0.5) && close(r.exponents[0].1, 2.0) && close(r.exponents[1].1, 2.0));
        let r = plan(2, 1.0, 1.0, 1.0, RecipeTarget::LaplaceInterior).unwrap().recipe;
        assert_eq!(r.f_exponent, 1.0);
    }

    #[test]
    fn p_one_limits_stay_in_windows() {
        let r = plan(3, 1.0, 1.0, 1.0, RecipeTarget::GradientInterior).unwrap().recipe;
        assert!((r.exponents[1].1 - 1.5).abs() < 1e-5, "{:?}", r.exponents);
        let r = plan(3, 1.0, 1.0, 1.0, RecipeTarget::GradientBoundary).unwrap().recipe;
        assert!((r.exponents[1].1 - 1.0).abs() < 1e-5, "{:?}", r.exponents);
        let r = plan(2, 1.0, 1.0, 1.0, RecipeTarget::GradientBoundary).unwrap().recipe;
        assert!((r.exponents[1].1 - 0.5).abs() < 1e-5, "{:?}", r.exponents);
    }

    #[test]
    fn holder_identity_with_split() {
        let r = plan(3, 2.0, 3.0, 2.0, RecipeTarget::GradientInterior).unwrap().recipe;
        let inv = 1.0 / r.q + 1.0 / r.q0.unwrap() + 1.0 / r.r0;
        assert!((inv - 1.0).abs() < 1e-12 && close(r.split_a * r.q, r.p) && close(r.q0.unwrap() * (1.0 - r.split_a), r.p));
    }

    #[test]
    fn certificate_dominates_on_disk() {
        let g = build_geometry(&GeometrySpec::new("disk", &[1.0], 0.2)).unwrap();
        let family: Vec<Vec<f64>> =
            (0..6).map(|k| (0..g.node_count()).map(|i| if i % 6 == k { 1.0 } else { 0.1 }).collect()).collect();
        for (target, kind) in [
            (RecipeTarget::GradientInterior, KernelKind::Gradient),
            (RecipeTarget::LaplaceInterior, KernelKind::Value),
        ] {
            let k = discrete_kernel(&g, kind).unwrap();
            for (p, q) in [(2.0, 2.0), (1.0, 1.0)] {
                let rec = holder_certificate(&k, p, q, p, target).unwrap();
                let emp = empirical_operator_ratio(&k, &family, rec.f_exponent, q).unwrap();
                assert!(rec.certified_bound >= emp * (1.0 - 1e-9), "{target:?} {p}: {} < {emp}", rec.certified_bound);
            }
        }
    }

    #[test]
    fn exponent_maps_invert() {
        for a in [0.3, 1.0, 2.5] {
            assert!(close(a_for_exponent(3, interior_exponent(3, a), RecipeTarget::GradientInterior), a));
            assert!(close(a_for_exponent(3, laplace_exponent(3, a), RecipeTarget::LaplaceInterior), a));
        }
    }
}
