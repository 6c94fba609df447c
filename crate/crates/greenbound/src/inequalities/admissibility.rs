//! Exponent triples and the per-theorem admissibility predicates.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent in [1, ∞]: exact rational when given as an integer, a
/// fraction or a decimal string, otherwise a float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Rational(Ratio<i64>),
    Real(f64),
    Infinity,
}

impl Exponent {
    pub fn int(v: i64) -> Self {
        Exponent::Rational(Ratio::from_integer(v))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Exponent::Rational(Ratio::new(num, den))
    }

    /// Integral floats become rationals, everything else stays a float.
    pub fn real(v: f64) -> Self {
        if v.is_infinite() && v > 0.0 {
            Exponent::Infinity
        } else if v.fract() == 0.0 && v.abs() < 1e15 {
            Exponent::int(v as i64)
        } else {
            Exponent::Real(v)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Real(v) => v,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        !matches!(self, Exponent::Infinity)
    }

    fn num(self) -> Num {
        match self {
            Exponent::Rational(r) => Num::Q(Ratio::new(*r.numer() as i128, *r.denom() as i128)),
            Exponent::Real(v) => Num::R(v),
            Exponent::Infinity => Num::R(f64::INFINITY),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Rational(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Exponent::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exponent::Real(v) => write!(f, "{v}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Exponent(format!("cannot parse `{s}`"));
        if matches!(t, "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinity);
        }
        if let Some((a, b)) = t.split_once('/') {
            let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0 {
                return Err(bad());
            }
            return Ok(Exponent::frac(a, b));
        }
        if let Some((int, dec)) = t.split_once('.') {
            if dec.len() <= 12 && dec.chars().all(|c| c.is_ascii_digit()) {
                let den = 10i64.pow(dec.len() as u32);
                let whole: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
                let frac: i64 = if dec.is_empty() { 0 } else { dec.parse().map_err(|_| bad())? };
                return Ok(Exponent::frac(whole * den + frac, den));
            }
            return t.parse::<f64>().map(Exponent::real).map_err(|_| bad());
        }
        t.parse::<i64>().map(Exponent::int).map_err(|_| bad())
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            I(i64),
            F(f64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::I(v) => Ok(Exponent::int(v)),
            Raw::F(v) => Ok(Exponent::real(v)),
            Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Exact when both operands are rational.
#[derive(Clone, Copy, Debug)]
enum Num {
    Q(Ratio<i128>),
    R(f64),
}

impl Num {
    fn int(v: i64) -> Num {
        Num::Q(Ratio::from_integer(v as i128))
    }

    fn f(self) -> f64 {
        match self {
            Num::Q(r) => *r.numer() as f64 / *r.denom() as f64,
            Num::R(v) => v,
        }
    }

    fn cmp(self, o: Num) -> Ordering {
        match (self, o) {
            (Num::Q(a), Num::Q(b)) => a.cmp(&b),
            (a, b) => a.f().partial_cmp(&b.f()).unwrap_or(Ordering::Equal),
        }
    }
}

macro_rules! num_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl std::ops::$tr for Num {
            type Output = Num;
            fn $m(self, o: Num) -> Num {
                match (self, o) {
                    (Num::Q(a), Num::Q(b)) => Num::Q(a $op b),
                    (a, b) => Num::R(a.f() $op b.f()),
                }
            }
        }
    };
}
num_op!(Add, add, +);
num_op!(Sub, sub, -);
num_op!(Mul, mul, *);
num_op!(Div, div, /);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Q(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Num::Q(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Num::R(v) => write!(f, "{v}"),
        }
    }
}

/// (p, q, r) with the real dimension n of the geometry; complex theorems
/// read n as 2·(complex dimension).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub n: u32,
    pub p: Exponent,
    pub q: Exponent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Exponent>,
}

impl ExponentTriple {
    pub fn new(n: u32, p: Exponent, q: Exponent, r: Option<Exponent>) -> Self {
        ExponentTriple { n, p, q, r }
    }

    /// Integer triple shorthand.
    pub fn ints(n: u32, p: i64, q: i64, r: Option<i64>) -> Self {
        ExponentTriple::new(n, Exponent::int(p), Exponent::int(q), r.map(Exponent::int))
    }
}

impl fmt::Display for ExponentTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} p={} q={}", self.n, self.p, self.q)?;
        if let Some(r) = self.r {
            write!(f, " r={r}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub reason: String,
}

/// Where a theorem lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    /// Compact manifold or domain with boundary.
    Boundary,
    /// Closed manifold.
    Closed,
    /// Compactly supported functions on ℂⁿ.
    Cn,
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremKind {
    KernelBound,
    Representation,
    Inequality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremInfo {
    pub id: &'static str,
    pub kind: TheoremKind,
    pub setting: Setting,
    /// Statement uses ∂̄ and needs even real dimension.
    pub complex: bool,
    pub statement: &'static str,
    pub conditions: &'static str,
    pub command: &'static str,
}

const fn thm(
    id: &'static str,
    kind: TheoremKind,
    setting: Setting,
    complex: bool,
    statement: &'static str,
    conditions: &'static str,
    command: &'static str,
) -> TheoremInfo {
    TheoremInfo { id, kind, setting, complex, statement, conditions, command }
}

use Setting::*;
use TheoremKind::*;

pub const THEOREMS: [TheoremInfo; 18] = [
    thm("thm1.1", KernelBound, Any, false,
        "|G(x,y)| ≤ C d^{2−n} (log form for n = 2), |∇_y G(x,y)| ≤ C d^{1−n}",
        "none",
        "run --stage kernel (verify_uniform_bounds, verify_boundary_refined_bounds)"),
    thm("thm1.2", Inequality, Boundary, false,
        "δ‖f‖_{L^q(M)} ≤ ‖∇f‖_{L^p(M)} + ‖f‖_{L^r(∂M)}",
        "1 ≤ p,q,r < ∞, q(n−p) < np, q(n−1) < nr",
        "run --stage inequalities (ratio_suite thm1.2)"),
    thm("thm1.3", Inequality, Boundary, false,
        "δ‖f‖_{L^q(M)} ≤ ‖Δf‖_{L^p(M)} + ‖f‖_{L^r(∂M)}",
        "1 ≤ p,q,r < ∞, q(n−2p) < np, q(n−1) < nr; n = 2: p > 1 if q > 1",
        "run --stage inequalities (ratio_suite thm1.3)"),
    thm("cor1.4", Inequality, Boundary, false,
        "δ‖f‖_{L^q(M)} ≤ ‖f‖_{L^p(∂M)} for harmonic f",
        "1 ≤ p,q < ∞, q(n−1) < np",
        "run --stage inequalities (ratio_suite cor1.4, harmonic family)"),
    thm("thm1.5", Inequality, Closed, false,
        "δ‖f − f_ave‖_{L^q(M)} ≤ ‖∇f‖_{L^p(M)}",
        "1 ≤ p,q < ∞, q(n−p) ≤ np; q = ∞ when p > n",
        "run --stage inequalities (ratio_suite thm1.5, sharp λ₁ check at p = q = 2)"),
    thm("thm1.6", Inequality, Closed, false,
        "δ‖f − f_ave‖_{L^q(M)} ≤ ‖Δf‖_{L^p(M)}",
        "1 ≤ p,q < ∞, q(n−2p) < np; n = 2: p > 1 if q > 1; q = ∞ when p > n/2",
        "run --stage inequalities (ratio_suite thm1.6)"),
    thm("thm1.7", Inequality, Boundary, false,
        "δ‖f‖_{L^q(Ω)} ≤ ∫_Ω|Δf| + ‖f‖_{L^p(∂Ω)} for quasi-subharmonic f",
        "1 ≤ p < ∞, 1 ≤ q < np/(n−1); n = 2: q = 1",
        "run --stage inequalities (ratio_suite thm1.7, log_singular family)"),
    thm("thm1.8", Inequality, Boundary, false,
        "δ‖f‖_{L^q(Ω)} ≤ ‖f‖_{L^p(∂Ω)} for nonnegative subharmonic f",
        "1 ≤ p < ∞, 1 ≤ q < np/(n−1)",
        "run --stage inequalities (ratio_suite thm1.8, log_singular family)"),
    thm("subharmonic2", Inequality, Closed, false,
        "δ‖f − f_ave‖_{L^q(M)} ≤ ∫_M|Δf| for quasi-subharmonic f",
        "1 ≤ p < ∞, 1 ≤ q < np/(n−1); n = 2: q = 1",
        "run --stage inequalities (ratio_suite subharmonic2, log_singular family)"),
    thm("thm1.9", Representation, Boundary, false,
        "f(x) = ∫_Ω G(x,y)Δf(y) + ∫_{∂Ω} f ∂G/∂ν_y dS for quasi-subharmonic f",
        "none",
        "run --stage representations (reconstruct_subharmonic, Jensen sweep)"),
    thm("thm1.10", Representation, Closed, false,
        "f(x) = f_ave + ∫_M G(x,y)Δf(y) for quasi-subharmonic f",
        "none",
        "run --stage representations (reconstruct_subharmonic on closed geometries)"),
    thm("thm1.13", Representation, Boundary, true,
        "f(z) = −2∫_Ω⟨∂̄f, ∂̄_w G(z,w)⟩dV + ∫_{∂Ω} ∂G/∂ν_w f dS",
        "none",
        "run --stage representations (reconstruct_dbar)"),
    thm("thm1.14", Inequality, Boundary, true,
        "δ‖f‖_{L^q(Ω)} ≤ ‖∂̄f‖_{L^p(Ω)} + ‖f‖_{L^r(∂Ω)}",
        "1 ≤ p,q,r < ∞, q(2n−p) < 2np, q(2n−1) < 2nr (n complex)",
        "run --stage inequalities (ratio_suite thm1.14)"),
    thm("cor-dbar-poincare", Inequality, Boundary, true,
        "δ‖f‖_{L^q(Ω)} ≤ ‖f‖_{L^p(∂Ω)} for holomorphic f",
        "1 ≤ p,q < ∞, q(2n−1) < 2np (n complex)",
        "run --stage inequalities (ratio_suite cor-dbar-poincare, complex_polynomial family)"),
    thm("poincare-average", Inequality, Closed, true,
        "δ‖f − f_ave‖_{L^q(M)} ≤ ‖∂̄f‖_{L^p(M)}",
        "1 < p < ∞, 1 ≤ q < ∞, q(2n−p) ≤ 2np; q = ∞ when p > 2n (n complex)",
        "run --stage inequalities (ratio_suite poincare-average)"),
    thm("lem1.15", Inequality, Cn, true,
        "δ‖∂f‖_{L^p(ℂⁿ)} ≤ ‖∂̄f‖_{L^p(ℂⁿ)} for compactly supported f",
        "1 < p < ∞",
        "run --stage inequalities (dbar_vs_del_comparison)"),
    thm("poincare-average1", Inequality, Closed, true,
        "δ‖f − f_ave‖_{L^q(M)} ≤ ‖∂̄f‖_{L^1(M)}",
        "p = 1, 1 ≤ q ≤ 2n/(2n−1) (n complex)",
        "run --stage inequalities (ratio_suite poincare-average1)"),
    thm("key-lemma-l1", Inequality, Cn, true,
        "δ‖f‖_{L^{2n/(2n−1)}(ℂⁿ)} ≤ ‖∂̄f‖_{L^1(ℂⁿ)} for compactly supported f",
        "p = 1, q = 2n/(2n−1) (n complex)",
        "run --stage inequalities (ratio_suite key-lemma-l1, bumps family on the ℂ¹ grid)"),
];

pub fn theorem_ids() -> Vec<&'static str> {
    THEOREMS.iter().map(|t| t.id).collect()
}

pub fn theorem_info(id: &str) -> Result<&'static TheoremInfo> {
    THEOREMS
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Error::UnknownTheorem { id: id.into(), valid: theorem_ids().join(", ") })
}

/// Accumulates conditions; the first failure is the reason.
struct Checker {
    failed: Option<String>,
    passed: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Checker { failed: None, passed: Vec::new() }
    }

    fn check(&mut self, ok: bool, text: impl FnOnce() -> String) {
        let t = text();
        if ok {
            self.passed.push(t);
        } else if self.failed.is_none() {
            self.failed = Some(t);
        }
    }

    fn lt(&mut self, label: &str, a: Num, b: Num) {
        let ok = a.cmp(b) == Ordering::Less;
        self.check(ok, || format!("{label}: {a} {} {b}", if ok { "<" } else { "≮" }));
    }

    fn le(&mut self, label: &str, a: Num, b: Num) {
        let ok = a.cmp(b) != Ordering::Greater;
        self.check(ok, || format!("{label}: {a} {} {b}", if ok { "≤" } else { "≰" }));
    }

    fn at_least_one(&mut self, name: &str, e: Exponent) {
        let ok = e.num().cmp(Num::int(1)) != Ordering::Less;
        self.check(ok, || format!("{name} = {e} {} 1", if ok { "≥" } else { "<" }));
    }

    fn finite(&mut self, name: &str, e: Exponent) {
        self.check(e.is_finite(), || format!("{name} < ∞"));
    }

    fn result(self) -> Admissibility {
        match self.failed {
            Some(f) => Admissibility { admissible: false, reason: f },
            None => Admissibility { admissible: true, reason: self.passed.join("; ") },
        }
    }
}

/// Exact reproduction of each theorem's exponent conditions, strict and
/// non-strict as stated. Theorems without exponent conditions are always
/// admissible.
pub fn admissible(theorem_id: &str, t: &ExponentTriple) -> Result<Admissibility> {
    let info = theorem_info(theorem_id)?;
    let mut c = Checker::new();
    let nn = t.n as i64;
    c.check(nn >= 2, || format!("n = {nn} ≥ 2"));
    if info.complex {
        c.check(nn % 2 == 0, || format!("complex statement needs even real dimension, n = {nn}"));
    }
    if info.kind != Inequality {
        c.check(true, || "no exponent conditions".into());
        return Ok(c.result());
    }
    let n = Num::int(nn);
    let (p, q) = (t.p, t.q);
    let (pn, qn) = (p.num(), q.num());
    let one = Num::int(1);
    let two = Num::int(2);
    c.at_least_one("p", p);
    c.at_least_one("q", q);
    let need_r = |c: &mut Checker| -> Option<Num> {
        match t.r {
            Some(r) => {
                c.at_least_one("r", r);
                c.finite("r", r);
                Some(r.num())
            }
            None => {
                c.check(false, || "r is required".into());
                None
            }
        }
    };
    let n2_side = |c: &mut Checker| {
        if nn == 2 && qn.cmp(one) == Ordering::Greater {
            let ok = pn.cmp(one) == Ordering::Greater;
            c.check(ok, || format!("n = 2 and q > 1 require p > 1 (p = {p})"));
        }
    };
    match theorem_id {
        "thm1.2" | "thm1.3" | "thm1.14" => {
            c.finite("p", p);
            c.finite("q", q);
            if let Some(r) = need_r(&mut c) {
                if p.is_finite() && q.is_finite() {
                    match theorem_id {
                        "thm1.2" | "thm1.14" => c.lt("q(n−p) < np", qn * (n - pn), n * pn),
                        _ => c.lt("q(n−2p) < np", qn * (n - two * pn), n * pn),
                    }
                    c.lt("q(n−1) < nr", qn * (n - one), n * r);
                }
            }
            if theorem_id == "thm1.3" {
                n2_side(&mut c);
            }
        }
        "cor1.4" | "cor-dbar-poincare" => {
            c.finite("p", p);
            c.finite("q", q);
            if p.is_finite() && q.is_finite() {
                c.lt("q(n−1) < np", qn * (n - one), n * pn);
            }
        }
        "thm1.5" | "poincare-average" => {
            c.finite("p", p);
            if theorem_id == "poincare-average" {
                c.lt("p > 1", one, pn);
            }
            if p.is_finite() {
                if q.is_finite() {
                    c.le("q(n−p) ≤ np", qn * (n - pn), n * pn);
                } else {
                    c.lt("q = ∞ needs p > n", n, pn);
                }
            }
        }
        "thm1.6" => {
            c.finite("p", p);
            if p.is_finite() {
                if q.is_finite() {
                    c.lt("q(n−2p) < np", qn * (n - two * pn), n * pn);
                    n2_side(&mut c);
                } else {
                    c.lt("q = ∞ needs p > n/2", n, two * pn);
                }
            }
        }
        "thm1.7" | "thm1.8" | "subharmonic2" => {
            c.finite("p", p);
            c.finite("q", q);
            if p.is_finite() && q.is_finite() {
                c.lt("q < np/(n−1)", qn * (n - one), n * pn);
            }
            if theorem_id != "thm1.8" && nn == 2 {
                let ok = qn.cmp(one) == Ordering::Equal;
                c.check(ok, || format!("n = 2 requires q = 1 (q = {q})"));
            }
        }
        "lem1.15" => {
            c.finite("p", p);
            c.lt("p > 1", one, pn);
        }
        "poincare-average1" | "key-lemma-l1" => {
            let ok = pn.cmp(one) == Ordering::Equal;
            c.check(ok, || format!("p = 1 (p = {p})"));
            c.finite("q", q);
            if q.is_finite() {
                let bound = n / (n - one);
                if theorem_id == "key-lemma-l1" {
                    let ok = qn.cmp(bound) == Ordering::Equal;
                    c.check(ok, || format!("q = n/(n−1) = {bound} (q = {q})"));
                } else {
                    c.le("q ≤ n/(n−1)", qn, bound);
                }
            }
        }
        _ => unreachable!("every inequality id is handled"),
    }
    Ok(c.result())
}
