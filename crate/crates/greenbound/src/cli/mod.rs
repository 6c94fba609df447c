//! Experiment pipeline behind the `greenbound` binary: build → green
//! tables → kernel bounds → representations → inequality sweeps, with
//! deterministic JSON/CSV artifacts.

pub mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use config::RunConfig;

use crate::error::{Error, Result};
use crate::geometry::{build_geometry, GeometryHandle, GeometryKind};
use crate::green::{build_green_table_with, oracle_for, select_sources, GreenTable, InvariantCheck, Provenance};
use crate::inequalities::{
    admissible, certificate_targets, certified_vs_empirical, certify, generate_family, ratio_suite, theorem_info, ExponentTriple,
    Family, TheoremInfo, THEOREMS,
};
use crate::kernel_analysis::{kernel_lp_profile, verify_boundary_refined_bounds, verify_uniform_bounds};
use crate::representations::{case_by_name, jensen_sweep, reconstruct_dbar, reconstruct_smooth, ErrorRow};

pub const UNITS: &str = "lengths in geometry units; G, ∇G and norms in the induced units";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Build,
    Green,
    Kernel,
    Representations,
    Inequalities,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Build, Stage::Green, Stage::Kernel, Stage::Representations, Stage::Inequalities];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Build => "build",
            Stage::Green => "green",
            Stage::Kernel => "kernel",
            Stage::Representations => "representations",
            Stage::Inequalities => "inequalities",
        }
    }

    pub fn parse(s: &str) -> Result<Stage> {
        Stage::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| Error::Config {
            path: "--stage".into(),
            reason: format!("unknown stage `{s}`; stages: {}", Stage::ALL.map(Stage::name).join(", ")),
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub stage: Option<Stage>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Failed invariants by name; empty on success.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunOutcome {
    pub out: PathBuf,
    pub failures: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            2
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the spec, node coordinates and weights.
pub fn geometry_hash(g: &GeometryHandle) -> String {
    let mut bytes = serde_json::to_vec(&g.spec).unwrap_or_default();
    for v in g.nodes().iter().chain(g.volume_weights()).chain(g.boundary_weights()) {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    sha256_hex(&bytes)
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    geometries: Vec<Arc<GeometryHandle>>,
    tables: Option<Vec<GreenTable>>,
    failures: Vec<String>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// Every report carries units, provenance and the seed.
fn artifact(provenance: &str, seed: u64, data: impl Serialize) -> Result<Value> {
    Ok(json!({ "units": UNITS, "provenance": provenance, "seed": seed, "data": serde_json::to_value(data)? }))
}

fn csv_with_header(header: &str, body: &str) -> String {
    format!("# {header}\n{body}")
}

fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::Analytic => "analytic",
        Provenance::CorrectorSplit => "corrector_split",
    }
}

impl Ctx {
    fn seed(&self) -> u64 {
        self.cfg.seed
    }

    fn build(&mut self) -> Result<()> {
        let mut rows = Vec::new();
        for (k, &h) in self.cfg.resolutions.iter().enumerate() {
            let g = build_geometry(&self.cfg.geometry.spec(h))?;
            rows.push(json!({
                "level": k,
                "spec": g.spec,
                "nodes": g.node_count(),
                "boundary_nodes": g.boundary_nodes().len(),
                "h": g.h(),
                "volume": g.volume(),
                "hash": geometry_hash(&g),
            }));
            self.geometries.push(Arc::new(g));
        }
        Ok(())
            .and_then(|_| write_json(&self.out.join("geometry.json"), &artifact("geometry", self.seed(), rows)?))
    }

    fn ensure_geometries(&mut self) -> Result<()> {
        if self.geometries.is_empty() {
            for &h in &self.cfg.resolutions {
                self.geometries.push(Arc::new(build_geometry(&self.cfg.geometry.spec(h))?));
            }
        }
        Ok(())
    }

    fn table_dir(&self, k: usize) -> PathBuf {
        self.out.join("green").join(format!("level{k}"))
    }

    fn provenance_for(&self, g: &GeometryHandle) -> Provenance {
        self.cfg.green.provenance.unwrap_or(if oracle_for(g).is_ok() { Provenance::Analytic } else { Provenance::CorrectorSplit })
    }

    fn green(&mut self) -> Result<()> {
        self.ensure_geometries()?;
        let mut tables = Vec::new();
        let mut summary = Vec::new();
        for (k, g) in self.geometries.iter().enumerate() {
            let sources = select_sources(g, self.cfg.green.sources);
            let table = build_green_table_with(g.clone(), &sources, self.provenance_for(g))?;
            table.save(&self.table_dir(k))?;
            let checks: Vec<InvariantCheck> = table
                .check_invariants()
                .into_iter()
                .map(|mut c| {
                    if let Some(&t) = self.cfg.tolerances.invariants.get(&c.name) {
                        c.tolerance = t;
                        c.passed = c.max_violation <= t;
                    }
                    c
                })
                .collect();
            for c in checks.iter().filter(|c| !c.passed) {
                self.failures.push(format!("green.level{k}.{}", c.name));
            }
            summary.push(json!({ "level": k, "h": table.h, "tol": table.tol, "provenance": provenance_name(table.provenance), "invariants": checks }));
            tables.push(table);
        }
        let prov = tables.first().map(|t| provenance_name(t.provenance)).unwrap_or("none");
        write_json(&self.out.join("green").join("invariants.json"), &artifact(prov, self.seed(), summary)?)?;
        self.tables = Some(tables);
        Ok(())
    }

    /// Tables from this run, from the cache of an earlier run, or rebuilt.
    fn ensure_tables(&mut self) -> Result<()> {
        if self.tables.is_some() {
            return Ok(());
        }
        let cached: Option<Vec<GreenTable>> = (0..self.cfg.resolutions.len()).map(|k| GreenTable::load(&self.table_dir(k)).ok()).collect();
        let matches = cached.as_ref().is_some_and(|ts| {
            ts.iter().zip(&self.cfg.resolutions).all(|(t, h)| t.geometry.spec == self.cfg.geometry.spec(*h) && t.n_sources() == self.cfg.green.sources)
        });
        if matches {
            self.tables = cached;
            self.geometries = self.tables.as_ref().unwrap().iter().map(|t| t.geometry.clone()).collect();
            Ok(())
        } else {
            self.green()
        }
    }

    fn kernel(&mut self) -> Result<()> {
        self.ensure_tables()?;
        let tables = self.tables.as_ref().unwrap();
        let dir = self.out.join("kernel");
        let prov = provenance_name(tables[0].provenance);
        if self.cfg.kernel.bounds {
            let mut reports = verify_uniform_bounds(tables)?;
            if tables[0].geometry.has_boundary() {
                reports.extend(verify_boundary_refined_bounds(tables)?);
            }
            for r in &reports {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join(format!("{}.csv", r.bound_id)), csv_with_header(&format!("{} per level; {prov}", r.bound_id), &r.series_csv()))?;
            }
            write_json(&dir.join("bounds.json"), &artifact(prov, self.seed(), &reports)?)?;
        }
        if !self.cfg.kernel.a_grid.is_empty() {
            let profile = kernel_lp_profile(tables.last().unwrap(), &self.cfg.kernel.a_grid)?;
            write_json(&dir.join("profile.json"), &artifact(prov, self.seed(), &profile)?)?;
        }
        Ok(())
    }

    fn representations(&mut self) -> Result<()> {
        self.ensure_tables()?;
        let rc = self.cfg.representations.clone();
        let tables = self.tables.as_ref().unwrap();
        let mut levels = Vec::new();
        let mut csv = String::from("level,case,point,value_re,value_im,exact_re,exact_im,error\n");
        for (k, table) in tables.iter().enumerate() {
            let g = &table.geometry;
            let points: Vec<Vec<f64>> = if rc.points.is_empty() { table.sources.clone() } else { rc.points.clone() };
            let mut rows: Vec<Value> = Vec::new();
            let mut push = |name: &str, x: &[f64], r: Result<ErrorRow>| match r {
                Ok(row) => {
                    csv.push_str(&format!(
                        "{k},{name},{},{:e},{:e},{:e},{:e},{:e}\n",
                        x.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" "),
                        row.value[0],
                        row.value[1],
                        row.exact[0],
                        row.exact[1],
                        row.error
                    ));
                    rows.push(serde_json::to_value(&row).unwrap_or(Value::Null));
                }
                Err(e) => rows.push(json!({ "case": name, "point": x, "skipped": e.to_string() })),
            };
            for name in &rc.cases {
                let case = match case_by_name(name, g) {
                    Ok(c) => c,
                    Err(e) => {
                        push(name, &[], Err(e));
                        continue;
                    }
                };
                for x in &points {
                    push(name, x, reconstruct_smooth(table, &case, x).map(|r| r.row(name, x)));
                }
            }
            if rc.dbar && matches!(g.kind, GeometryKind::Disk { .. }) {
                for name in ["z", "zbar", "radial_quadratic"] {
                    let case = case_by_name(name, g)?;
                    for x in &points {
                        let label = format!("dbar:{name}");
                        push(&label, x, reconstruct_dbar(table, &case, x).map(|r| r.row(&label, x)));
                    }
                }
            }
            levels.push(json!({ "level": k, "h": table.h, "rows": rows }));
        }
        let dir = self.out.join("representations");
        let prov = provenance_name(tables[0].provenance);
        write_json(&dir.join("errors.json"), &artifact(prov, self.seed(), levels)?)?;
        fs::write(dir.join("errors.csv"), csv_with_header(&format!("reconstruction errors; {prov}"), &csv))?;
        if !rc.jensen_radii.is_empty() {
            let g = self.geometries.last().unwrap().clone();
            let sweep = jensen_sweep(g, &rc.jensen_radii)?;
            let mut s = String::from("radius,reconstruction,exact,error\n");
            for p in &sweep {
                s.push_str(&format!("{:e},{:e},{:e},{:e}\n", p.radius, p.reconstruction, p.exact, p.error));
            }
            write_json(&dir.join("jensen.json"), &artifact(prov, self.seed(), &sweep)?)?;
            fs::write(dir.join("jensen.csv"), csv_with_header(&format!("Jensen sweep on the finest level; {prov}"), &s))?;
        }
        Ok(())
    }

    fn inequalities(&mut self) -> Result<()> {
        self.ensure_geometries()?;
        let g = self.geometries[self.cfg.sweep_level].clone();
        let specs = self.cfg.family_specs();
        let families: Vec<std::result::Result<Family, String>> =
            specs.iter().map(|s| generate_family(&g, *s).map_err(|e| e.to_string())).collect();
        let dir = self.out.join("inequalities");
        let n = g.manifold_dim() as u32;
        let mut cells = Vec::new();
        for sweep in &self.cfg.sweep {
            let fam_idx: Vec<usize> = if sweep.families.is_empty() { (0..families.len()).collect() } else { sweep.families.clone() };
            for tc in &sweep.triples {
                let t = ExponentTriple::new(n, tc.p, tc.q, tc.r);
                let adm = admissible(&sweep.theorem, &t)?;
                let base = format!("{}_{}", sweep.theorem, t.to_string().replace(' ', "_").replace('/', "-").replace('=', ""));
                if !adm.admissible {
                    cells.push(json!({ "theorem": sweep.theorem, "exponents": t, "status": "skipped: inadmissible", "reason": adm.reason }));
                    continue;
                }
                let recipes = if sweep.certify && certificate_targets(&sweep.theorem).is_some() {
                    Some(certify(&sweep.theorem, &t, &g).map_err(|e| e.to_string()))
                } else {
                    None
                };
                for &fi in &fam_idx {
                    let spec = specs[fi];
                    let fam = match &families[fi] {
                        Ok(f) => f,
                        Err(e) => {
                            cells.push(json!({ "theorem": sweep.theorem, "exponents": t, "family": spec.kind, "seed": spec.seed, "status": "skipped: incompatible", "reason": e }));
                            continue;
                        }
                    };
                    let report = match ratio_suite(&sweep.theorem, &t, fam, &g) {
                        Ok(r) => r,
                        Err(e @ (Error::Inadmissible { .. } | Error::IncompatibleFamily { .. } | Error::Empty(_) | Error::Missing(_))) => {
                            cells.push(json!({ "theorem": sweep.theorem, "exponents": t, "family": spec.kind, "seed": spec.seed, "status": "skipped: incompatible", "reason": e.to_string() }));
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    let name = format!("{base}_{}", spec.kind.name());
                    if !report.positive {
                        self.failures.push(format!("inequalities.{name}.positivity"));
                    }
                    let mut report = report;
                    let consistency = match &recipes {
                        Some(Ok(rs)) => {
                            report.certified_bound = rs.iter().map(|r| r.certified_bound).reduce(f64::max);
                            let mut rec = certified_vs_empirical(&sweep.theorem, &t, rs, &report);
                            rec.consistent = rec.slack >= 1.0 - self.cfg.tolerances.slack;
                            if !rec.consistent {
                                self.failures.push(format!("inequalities.{name}.certified_slack"));
                            }
                            Some(serde_json::to_value(&rec)?)
                        }
                        Some(Err(e)) => Some(json!({ "skipped": e })),
                        None => None,
                    };
                    fs::create_dir_all(&dir)?;
                    fs::write(dir.join(format!("{name}.csv")), csv_with_header(&format!("{} ratios; seed {}", name, spec.seed), &report.csv()?))?;
                    write_json(&dir.join(format!("{name}.json")), &artifact("empirical", spec.seed, json!({ "report": report, "consistency": consistency }))?)?;
                    cells.push(json!({
                        "theorem": sweep.theorem, "exponents": t, "family": spec.kind, "seed": spec.seed, "status": "ok",
                        "empirical_delta": report.empirical_delta, "worst_case": report.worst_case, "report": format!("{name}.json"),
                    }));
                }
            }
        }
        write_json(&dir.join("summary.json"), &artifact("empirical", self.seed(), json!({ "geometry": g.name(), "level": self.cfg.sweep_level, "cells": cells }))?)
    }
}

/// Runs the configured pipeline (or one stage) and writes the artifact
/// tree. A failed stage leaves a FAILED marker next to the partial output.
pub fn run(cfg: RunConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let mut cfg = cfg;
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(o) = &opts.out {
        cfg.out = o.clone();
    }
    cfg.validate()?;
    let out = cfg.out.clone();
    fs::create_dir_all(&out)?;
    let _ = fs::remove_file(out.join("FAILED"));
    let stages: Vec<Stage> = match opts.stage {
        Some(s) => vec![s],
        None => Stage::ALL.to_vec(),
    };
    let mut ctx = Ctx { cfg, out: out.clone(), geometries: Vec::new(), tables: None, failures: Vec::new() };
    let started = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    for stage in &stages {
        let r = match stage {
            Stage::Build => ctx.build(),
            Stage::Green => ctx.green(),
            Stage::Kernel => ctx.kernel(),
            Stage::Representations => ctx.representations(),
            Stage::Inequalities => ctx.inequalities(),
        };
        if let Err(e) = r {
            fs::write(out.join("FAILED"), format!("stage {}: {e}\n", stage.name()))?;
            return Err(e);
        }
    }
    ctx.ensure_geometries()?;
    let manifest = json!({
        "crate": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "started_unix": started,
        "stages": stages.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "seed": ctx.cfg.seed,
        "family_seeds": ctx.cfg.family_specs().iter().map(|s| json!({ "kind": s.kind, "count": s.count, "seed": s.seed })).collect::<Vec<_>>(),
        "config_sha256": sha256_hex(toml::to_string(&ctx.cfg).unwrap_or_default().as_bytes()),
        "geometries": ctx.geometries.iter().map(|g| json!({ "spec": g.spec, "sha256": geometry_hash(g) })).collect::<Vec<_>>(),
        "invariant_failures": ctx.failures,
    });
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(RunOutcome { out, failures: ctx.failures })
}

/// One theorem row, or every row when `id` is None.
pub fn list_theorems(id: Option<&str>) -> Result<Vec<&'static TheoremInfo>> {
    match id {
        Some(id) => Ok(vec![theorem_info(id)?]),
        None => Ok(THEOREMS.iter().collect()),
    }
}

pub fn format_theorems(rows: &[&TheoremInfo]) -> String {
    let mut s = String::new();
    for t in rows {
        s.push_str(&format!("{}\n  statement:  {}\n  conditions: {}\n  command:    greenbound {}\n", t.id, t.statement, t.conditions, t.command));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read_all(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
        let mut out = Vec::new();
        let mut stack = vec![dir.to_path_buf()];
        while let Some(d) = stack.pop() {
            for e in fs::read_dir(&d).unwrap() {
                let p = e.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else if p.file_name().unwrap() != "manifest.json" || p.parent() != Some(dir) {
                    out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
                }
            }
        }
        out.sort();
        out
    }

    fn disk_config(out: &Path) -> RunConfig {
        RunConfig::parse(&format!(
            r#"
seed = 3
out = "{}"
resolutions = [0.1, 0.07]

[geometry]
kind = "disk"
params = [1.0]

[green]
sources = 3
provenance = "corrector_split"

[[families]]
kind = "bumps"
count = 3

[[sweep]]
theorem = "thm1.2"
triples = [{{ p = 2, q = 2, r = 2 }}, {{ p = 1, q = 3, r = 1 }}]
"#,
            out.display()
        ))
        .unwrap()
    }

    #[test]
    fn smoke_run_is_deterministic() {
        let base = std::env::temp_dir().join(format!("greenbound-cli-{}", std::process::id()));
        let (a, b) = (base.join("a"), base.join("b"));
        let ra = run(disk_config(&a), &RunOptions::default()).unwrap();
        let rb = run(disk_config(&b), &RunOptions::default()).unwrap();
        assert_eq!(ra.exit_code(), 0, "{:?}", ra.failures);
        assert_eq!(rb.exit_code(), 0);
        let (fa, fb) = (read_all(&a), read_all(&b));
        assert!(fa.len() > 5);
        assert_eq!(fa, fb);
        let summary = fs::read_to_string(a.join("inequalities/summary.json")).unwrap();
        assert!(summary.contains("skipped: inadmissible"));
        fs::remove_dir_all(&base).ok();
    }

    #[test]
    fn zero_symmetry_tolerance_fails() {
        let dir = std::env::temp_dir().join(format!("greenbound-cli-sym-{}", std::process::id()));
        let mut cfg = disk_config(&dir);
        cfg.tolerances.invariants.insert("symmetry".into(), 0.0);
        let r = run(cfg, &RunOptions { stage: Some(Stage::Green), ..Default::default() }).unwrap();
        assert_eq!(r.exit_code(), 2);
        assert!(r.failures.iter().any(|f| f.ends_with("symmetry")), "{:?}", r.failures);
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn theorem_listing() {
        assert!(list_theorems(Some("thm1.13")).unwrap()[0].statement.contains("∂̄"));
        assert!(matches!(list_theorems(Some("nope")), Err(Error::UnknownTheorem { .. })));
        assert_eq!(list_theorems(None).unwrap().len(), THEOREMS.len());
    }
}
