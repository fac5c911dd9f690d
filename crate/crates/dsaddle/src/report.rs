//! Versioned JSON reports and their text renderings.
//!
//! Every report carries `schema_version` and `kind`; the schemas live in
//! `docs/schema/`. The text form prints the same fields as the JSON form.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use dsaddle_core::inverse::NullityBounds;
use dsaddle_core::invertibility::{ConditionId, Status};
use dsaddle_core::{
    assemble, BlockSystem, Certificate, Definiteness, Diagnosis, GeneratorSpec, Rule,
    ToleranceConfig, Verdict,
};

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub id: ConditionId,
    pub statement: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockFacts {
    pub definiteness_a: Definiteness,
    pub definiteness_d: Definiteness,
    pub definiteness_e: Definiteness,
    pub rank_b: usize,
    pub rank_c: usize,
    pub null_a: usize,
    pub null_d: usize,
    pub null_e: usize,
    pub lambda_max_d: f64,
    pub zero_a: bool,
    pub zero_d: bool,
    pub zero_e: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosisReport {
    pub schema_version: String,
    pub kind: String,
    pub dims: [usize; 3],
    pub verdict: Verdict,
    pub rule: Option<Rule>,
    pub rule_description: Option<String>,
    pub witness: Option<Vec<f64>>,
    /// `‖Ku‖ / ‖K‖_F` for the witness `u`.
    pub witness_residual: Option<f64>,
    pub conditions: Vec<ConditionEntry>,
    pub blocks: BlockFacts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_check: Option<bool>,
    pub tolerances: ToleranceConfig,
}

impl DiagnosisReport {
    pub fn new(sys: &BlockSystem, d: &Diagnosis, tol: &ToleranceConfig) -> Self {
        let r = &d.report;
        let witness_residual = d.witness.as_ref().map(|u| {
            let k = assemble(sys).into_inner();
            (&k * u).norm() / k.norm().max(f64::MIN_POSITIVE)
        });
        DiagnosisReport {
            schema_version: SCHEMA_VERSION.into(),
            kind: "diagnosis".into(),
            dims: r.dims,
            verdict: d.verdict,
            rule: d.rule,
            rule_description: d.rule.map(|r| r.description().into()),
            witness: d.witness.as_ref().map(|u| u.iter().copied().collect()),
            witness_residual,
            conditions: r
                .conditions
                .iter()
                .map(|c| ConditionEntry {
                    id: c.id,
                    statement: c.id.statement().into(),
                    status: c.status,
                    witness: c.witness.clone(),
                })
                .collect(),
            blocks: BlockFacts {
                definiteness_a: r.definiteness_a,
                definiteness_d: r.definiteness_d,
                definiteness_e: r.definiteness_e,
                rank_b: r.rank_b,
                rank_c: r.rank_c,
                null_a: r.null_a,
                null_d: r.null_d,
                null_e: r.null_e,
                lambda_max_d: r.lambda_max_d,
                zero_a: r.zero_a,
                zero_d: r.zero_d,
                zero_e: r.zero_e,
            },
            oracle_check: d.oracle_check,
            tolerances: *tol,
        }
    }
}

fn definiteness(d: Definiteness) -> &'static str {
    match d {
        Definiteness::PositiveDefinite => "positive_definite",
        Definiteness::PositiveSemidefinite => "positive_semidefinite",
        Definiteness::Indefinite => "indefinite",
        Definiteness::NotSymmetric => "not_symmetric",
    }
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Holds => "holds",
        Status::Fails => "fails",
    }
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

fn tolerances(out: &mut String, t: &ToleranceConfig) {
    let _ = writeln!(
        out,
        "tolerances: rank_rtol={:e} sym_rtol={:e} psd_rtol={:e} residual_rtol={:e}",
        t.rank_rtol, t.sym_rtol, t.psd_rtol, t.residual_rtol
    );
}

impl fmt::Display for DiagnosisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let [n, m, p] = self.dims;
        let _ = writeln!(s, "dims: n={n} m={m} p={p}");
        let _ = writeln!(s, "verdict: {}", self.verdict.as_str());
        let _ = writeln!(s, "rule: {}", opt(self.rule.map(Rule::as_str)));
        let _ = writeln!(
            s,
            "rule_description: {}",
            opt(self.rule_description.as_deref())
        );
        let _ = writeln!(s, "witness: {}", opt(self.witness.as_deref().map(vector)));
        let _ = writeln!(
            s,
            "witness_residual: {}",
            opt(self.witness_residual.map(|r| format!("{r:e}")))
        );
        let _ = writeln!(s, "conditions:");
        for c in &self.conditions {
            let _ = write!(
                s,
                "  {:<3} {:<6} {}",
                c.id.as_str(),
                status(c.status),
                c.statement
            );
            if let Some(w) = &c.witness {
                let _ = write!(s, "  witness {}", vector(w));
            }
            s.push('\n');
        }
        let b = &self.blocks;
        let _ = writeln!(
            s,
            "blocks: A {} (null {}, zero {}), D {} (null {}, zero {}, lambda_max {:e}), E {} (null {}, zero {})",
            definiteness(b.definiteness_a),
            b.null_a,
            b.zero_a,
            definiteness(b.definiteness_d),
            b.null_d,
            b.zero_d,
            b.lambda_max_d,
            definiteness(b.definiteness_e),
            b.null_e,
            b.zero_e
        );
        let _ = writeln!(s, "ranks: B {}, C {}", b.rank_b, b.rank_c);
        if let Some(o) = self.oracle_check {
            let _ = writeln!(s, "oracle_check: {o}");
        }
        tolerances(&mut s, &self.tolerances);
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constructor {
    ThreeBlock,
    Factorization,
    Dense,
}

impl Constructor {
    pub fn as_str(self) -> &'static str {
        match self {
            Constructor::ThreeBlock => "three_block",
            Constructor::Factorization => "factorization",
            Constructor::Dense => "dense",
        }
    }
}

/// `manifest.json` next to the `Z*.mtx` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseManifest {
    pub schema_version: String,
    pub kind: String,
    pub dims: [usize; 3],
    pub constructor: Constructor,
    pub files: Vec<String>,
    /// `‖KX − I‖₂`.
    pub residual: f64,
    /// `max |X − Xᵀ|`.
    pub symmetry_error: f64,
    pub nullity_bounds: NullityBounds,
    pub warnings: Vec<String>,
    pub tolerances: ToleranceConfig,
}

impl fmt::Display for InverseManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let [n, m, p] = self.dims;
        let _ = writeln!(s, "dims: n={n} m={m} p={p}");
        let _ = writeln!(s, "constructor: {}", self.constructor.as_str());
        let _ = writeln!(s, "files: {}", self.files.join(" "));
        let _ = writeln!(s, "residual: {:e}", self.residual);
        let _ = writeln!(s, "symmetry_error: {:e}", self.symmetry_error);
        let b = &self.nullity_bounds;
        let _ = writeln!(
            s,
            "nullity_bounds: null(A)={} null(E)={} null(Z22)={} lower={} upper={} ranges_disjoint={} lower_disjoint={} z22_relative_norm={:e} z22_vanishes_expected={}",
            b.null_a,
            b.null_e,
            b.null_z22,
            b.lower,
            b.upper,
            b.ranges_disjoint,
            opt(b.lower_disjoint),
            b.z22_relative_norm,
            b.z22_vanishes_expected
        );
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        tolerances(&mut s, &self.tolerances);
        f.write_str(&s)
    }
}

/// `certificate.json` next to a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub schema_version: String,
    pub kind: String,
    pub spec: GeneratorSpec,
    pub certificate: Certificate,
    pub files: Vec<String>,
}

impl fmt::Display for InstanceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let c = &self.certificate;
        let [n, m, p] = c.dims;
        let _ = writeln!(s, "dims: n={n} m={m} p={p}");
        let _ = writeln!(
            s,
            "seed: {} (spec seed {}, attempts {})",
            c.seed, self.spec.seed, c.attempts
        );
        let _ = writeln!(
            s,
            "blocks: A {} (null {}), D {} (null {}, lambda_max {:e}), E {} (null {})",
            definiteness(c.definiteness_a),
            c.null_a,
            definiteness(c.definiteness_d),
            c.null_d,
            c.lambda_max_d,
            definiteness(c.definiteness_e),
            c.null_e
        );
        let _ = writeln!(s, "ranks: B {}, C {}", c.rank_b, c.rank_c);
        let _ = writeln!(
            s,
            "conditions: N1={} N2={} N3={} R={} DS1={} DS2={}",
            c.n1, c.n2, c.n3, c.r, c.ds1, c.ds2
        );
        let _ = writeln!(
            s,
            "spec: {}",
            serde_json::to_string(&self.spec).expect("spec serializes")
        );
        let _ = writeln!(s, "files: {}", self.files.join(" "));
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub residual: Option<f64>,
    /// Why the check was skipped or failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: String,
    pub kind: String,
    pub dims: [usize; 3],
    pub alpha: f64,
    pub seed: u64,
    /// Residual threshold for a pass.
    pub threshold: f64,
    pub checks: Vec<Check>,
    pub nullity_bounds: Option<NullityBounds>,
    pub passed: bool,
    pub tolerances: ToleranceConfig,
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let [n, m, p] = self.dims;
        let _ = writeln!(s, "dims: n={n} m={m} p={p}");
        let _ = writeln!(s, "alpha: {:e}", self.alpha);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "threshold: {:e}", self.threshold);
        for c in &self.checks {
            let st = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "fail",
                CheckStatus::Skipped => "skipped",
            };
            let mut line = format!("  {:<28} {:<7}", c.name, st);
            if let Some(r) = c.residual {
                let _ = write!(line, " residual {r:e}");
            }
            if let Some(d) = &c.detail {
                let _ = write!(line, " ({d})");
            }
            s.push_str(line.trim_end());
            s.push('\n');
        }
        if let Some(b) = &self.nullity_bounds {
            let _ = writeln!(
                s,
                "nullity_bounds: null(A)={} null(E)={} null(Z22)={} lower={} upper={} lower_disjoint={}",
                b.null_a,
                b.null_e,
                b.null_z22,
                b.lower,
                b.upper,
                opt(b.lower_disjoint)
            );
        }
        let _ = writeln!(s, "passed: {}", self.passed);
        tolerances(&mut s, &self.tolerances);
        f.write_str(&s)
    }
}
