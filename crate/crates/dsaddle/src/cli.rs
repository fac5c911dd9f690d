//! The `dsaddle` command line.
//!
//! Exit codes: `0` success (or an invertible verdict), `1` singular (or a
//! failed verification), `2` undetermined (or no structured inverse
//! applies), `64` usage errors, `65` unreadable or inconsistent input,
//! `74` output that cannot be written.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dsaddle_core::inverse::{
    a_equals_ava_residual, dense_inverse, eg_identity, factorize_tilde, inverse_via_factorization,
    reduced_hessian_projector, schur_tilde_s, three_block_inverse, z22_nullity_bounds,
};
use dsaddle_core::invertibility::diagnose_with_oracle;
use dsaddle_core::system::{alpha_upper_bound, congruence_transform, default_alpha};
use dsaddle_core::{
    assemble, diagnose, BlockSystem, DMatrix, Error, Family, GeneratorSpec, InverseBlocks,
    ToleranceConfig, Verdict,
};

use crate::blocks::{self, INVERSE_FILES, SYSTEM_FILES};
use crate::report::{
    Check, CheckStatus, Constructor, DiagnosisReport, InstanceReport, InverseManifest,
    VerifyReport, SCHEMA_VERSION,
};

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_IO: u8 = 74;

#[derive(Debug, Parser)]
#[command(
    name = "dsaddle",
    version,
    about = "Invertibility diagnostics and structured inverses for double saddle-point matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Relative rank tolerance.
    #[arg(long, global = true, value_name = "RTOL")]
    pub tol_rank: Option<f64>,
    /// Relative residual tolerance.
    #[arg(long, global = true, value_name = "RTOL")]
    pub tol_residual: Option<f64>,
    /// Congruence parameter, inside (0, 2/λ_max(D)).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Seed for `generate`, and for the random `W` in `verify`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    /// Fall back to dense inversion when no structured formula applies.
    #[arg(long, global = true)]
    pub allow_dense: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide invertibility of the system in DIR.
    Diagnose {
        dir: PathBuf,
        /// Attach the brute-force singular-value check.
        #[arg(long)]
        oracle: bool,
    },
    /// Write the blocks of K⁻¹ and a manifest to OUT.
    Invert {
        dir: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Write a random instance and its certificate to OUT.
    Generate {
        /// JSON generator spec.
        #[arg(long, conflicts_with = "family")]
        spec: Option<PathBuf>,
        /// Draw the spec from a hypothesis family instead.
        #[arg(long)]
        family: Option<Family>,
        /// Largest block size for --family.
        #[arg(long, default_value_t = 6, requires = "family")]
        max_dim: usize,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Recompute identities, inverse residuals and nullity bounds.
    Verify { dir: PathBuf },
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<blocks::LoadError> for Failure {
    fn from(e: blocks::LoadError) -> Self {
        Failure::data(e.to_string())
    }
}

/// Report printed to stdout plus the exit code it implies.
#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub warnings: Vec<String>,
}

fn tolerances(opts: &Options) -> Result<ToleranceConfig, Failure> {
    let mut tol = ToleranceConfig::default();
    if let Some(r) = opts.tol_rank {
        tol.rank_rtol = r;
    }
    if let Some(r) = opts.tol_residual {
        tol.residual_rtol = r;
    }
    tol.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(tol)
}

fn render<T: Serialize + std::fmt::Display>(report: &T, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        OutputFormat::Text => report.to_string(),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    fs::write(path, s).map_err(|e| Failure::io(path, e))
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = tolerances(&cli.opts)?;
    match &cli.command {
        Command::Diagnose { dir, oracle } => run_diagnose(dir, *oracle, &tol, &cli.opts),
        Command::Invert { dir, out } => run_invert(dir, out, &tol, &cli.opts),
        Command::Generate {
            spec,
            family,
            max_dim,
            out,
        } => run_generate(spec.as_deref(), *family, *max_dim, out, &tol, &cli.opts),
        Command::Verify { dir } => run_verify(dir, &tol, &cli.opts),
    }
}

fn run_diagnose(
    dir: &Path,
    oracle: bool,
    tol: &ToleranceConfig,
    opts: &Options,
) -> Result<Outcome, Failure> {
    let sys = blocks::load_system(dir, tol)?;
    let d = if oracle {
        diagnose_with_oracle(&sys, tol)
    } else {
        diagnose(&sys, tol)
    };
    let report = DiagnosisReport::new(&sys, &d, tol);
    Ok(Outcome {
        code: verdict_code(d.verdict),
        stdout: render(&report, opts.format),
        warnings: Vec::new(),
    })
}

pub fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Invertible => 0,
        Verdict::Singular => 1,
        Verdict::Undetermined => 2,
    }
}

/// Spectral norm of a symmetric matrix.
fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigen().eigenvalues.amax()
}

/// `‖KX − I‖₂` through the eigenvalues of `RᵀR`.
fn inverse_residual(k: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    let r = k * x - DMatrix::identity(k.nrows(), k.ncols());
    (r.transpose() * &r)
        .symmetric_eigen()
        .eigenvalues
        .max()
        .max(0.0)
        .sqrt()
}

fn run_invert(
    dir: &Path,
    out: &Path,
    tol: &ToleranceConfig,
    opts: &Options,
) -> Result<Outcome, Failure> {
    let sys = blocks::load_system(dir, tol)?;
    if !dsaddle_core::oracle_invertible(&sys, tol) {
        return Ok(Outcome {
            code: 1,
            stdout: String::new(),
            warnings: vec!["the assembled matrix is singular; no inverse written".into()],
        });
    }
    let mut warnings = Vec::new();
    let (constructor, inv) = match three_block_inverse(&sys, tol) {
        Ok(inv) => (Constructor::ThreeBlock, inv),
        Err(e3) => match inverse_via_factorization(&sys, tol) {
            Ok(inv) => (Constructor::Factorization, inv),
            Err(ef) if opts.allow_dense => {
                warnings.push(format!(
                    "no structured inverse applies (three_block: {e3}; factorization: {ef}); using dense inversion"
                ));
                let inv = dense_inverse(&sys, tol).map_err(|e| Failure::data(e.to_string()))?;
                (Constructor::Dense, inv)
            }
            Err(ef) => {
                return Ok(Outcome {
                    code: 2,
                    stdout: String::new(),
                    warnings: vec![format!(
                        "no structured inverse applies (three_block: {e3}; factorization: {ef}); pass --allow-dense for dense inversion"
                    )],
                })
            }
        },
    };
    let k = assemble(&sys).into_inner();
    let x = inv.to_dense();
    let bounds = z22_nullity_bounds(&sys, &inv, tol).map_err(|e| Failure::data(e.to_string()))?;
    let manifest = InverseManifest {
        schema_version: SCHEMA_VERSION.into(),
        kind: "inverse".into(),
        dims: dims(&sys),
        constructor,
        files: INVERSE_FILES.iter().map(|s| s.to_string()).collect(),
        residual: inverse_residual(&k, &x),
        symmetry_error: (&x - x.transpose()).amax(),
        nullity_bounds: bounds,
        warnings: warnings.clone(),
        tolerances: *tol,
    };
    blocks::save_inverse(out, &inv).map_err(|e| Failure::io(out, e))?;
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(Outcome {
        code: 0,
        stdout: render(&manifest, opts.format),
        warnings,
    })
}

fn dims(sys: &BlockSystem) -> [usize; 3] {
    let (n, m, p) = sys.dims();
    [n, m, p]
}

fn run_generate(
    spec_path: Option<&Path>,
    family: Option<Family>,
    max_dim: usize,
    out: &Path,
    tol: &ToleranceConfig,
    opts: &Options,
) -> Result<Outcome, Failure> {
    let mut spec = match (spec_path, family) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<GeneratorSpec>(&text)
                .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?
        }
        (None, Some(f)) => {
            if max_dim == 0 {
                return Err(Failure::usage("--max-dim must be positive"));
            }
            f.spec(opts.seed.unwrap_or(0), max_dim)
        }
        (None, None) => GeneratorSpec::default(),
    };
    if let Some(seed) = opts.seed {
        spec.seed = seed;
    }
    let (sys, certificate) = dsaddle_core::generate::gen_instance_with_tolerance(&spec, tol)
        .map_err(|e| Failure::data(e.to_string()))?;
    let report = InstanceReport {
        schema_version: SCHEMA_VERSION.into(),
        kind: "instance".into(),
        spec,
        certificate,
        files: SYSTEM_FILES.iter().map(|s| s.to_string()).collect(),
    };
    blocks::save_system(out, &sys).map_err(|e| Failure::io(out, e))?;
    write_json(&out.join("certificate.json"), &report)?;
    Ok(Outcome {
        code: 0,
        stdout: render(&report, opts.format),
        warnings: Vec::new(),
    })
}

fn check(name: &str, residual: Result<f64, Error>, threshold: f64) -> Check {
    match residual {
        Ok(r) => Check {
            name: name.into(),
            status: if r <= threshold {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            residual: Some(r),
            detail: None,
        },
        Err(Error::Precondition(p)) => Check {
            name: name.into(),
            status: CheckStatus::Skipped,
            residual: None,
            detail: Some(p.to_string()),
        },
        Err(e) => Check {
            name: name.into(),
            status: CheckStatus::Fail,
            residual: None,
            detail: Some(e.to_string()),
        },
    }
}

/// `‖KX − I‖₂ / (‖K‖₂‖X‖₂)`.
fn scaled_inverse_residual(k: &DMatrix<f64>, inv: &InverseBlocks) -> f64 {
    let x = inv.to_dense();
    inverse_residual(k, &x) / (spectral_norm(k) * spectral_norm(&x)).max(f64::MIN_POSITIVE)
}

fn run_verify(dir: &Path, tol: &ToleranceConfig, opts: &Options) -> Result<Outcome, Failure> {
    let sys = blocks::load_system(dir, tol)?;
    let alpha = match opts.alpha {
        Some(a) => {
            let upper = alpha_upper_bound(sys.d());
            if !(a.is_finite() && a > 0.0 && upper.map_or(true, |u| a < u)) {
                return Err(Failure::usage(
                    Error::AlphaOutOfRange {
                        alpha: a,
                        upper: upper.unwrap_or(f64::INFINITY),
                    }
                    .to_string(),
                ));
            }
            a
        }
        None => default_alpha(&sys),
    };
    let seed = opts.seed.unwrap_or(0);
    let threshold = tol.residual_rtol;
    let (a, b) = (sys.a(), sys.b());
    let m = sys.m();
    let k = assemble(&sys).into_inner();
    let invertible = dsaddle_core::oracle_invertible(&sys, tol);
    let mut checks = Vec::new();

    checks.push(check(
        "congruence",
        congruence_transform(&sys, alpha).map(|c| c.residual(&sys)),
        threshold,
    ));
    checks.push(check(
        "eg_identity_w_identity",
        eg_identity(a, b, &DMatrix::identity(m, m), tol),
        threshold,
    ));
    let w =
        dsaddle_core::generate::gen_psd_with_nullity(m, 0, seed).expect("nullity 0 is in range");
    checks.push(check(
        "eg_identity_w_random",
        eg_identity(a, b, &w, tol),
        threshold,
    ));
    checks.push(check(
        "a_equals_ava",
        a_equals_ava_residual(a, b, tol),
        threshold,
    ));
    let proj = reduced_hessian_projector(a, b, tol);
    checks.push(check(
        "projector_complement",
        proj.clone().and_then(|p| p.complement_residual(b, tol)),
        threshold,
    ));
    checks.push(check(
        "projector_zzt_av",
        proj.map(|p| p.zzt_av_residual(a)),
        threshold,
    ));
    checks.push(check(
        "factorization",
        factorize_tilde(&sys, tol).and_then(|f| {
            let kt = congruence_transform(&sys, 1.0)?.k_tilde.into_inner();
            Ok(f.residual(&kt))
        }),
        threshold,
    ));
    let three = three_block_inverse(&sys, tol);
    let fact = inverse_via_factorization(&sys, tol);
    checks.push(check(
        "three_block_inverse",
        three.clone().map(|x| scaled_inverse_residual(&k, &x)),
        threshold,
    ));
    checks.push(check(
        "factorization_inverse",
        fact.clone().map(|x| scaled_inverse_residual(&k, &x)),
        threshold,
    ));
    let agreement = match (&three, &fact) {
        (Ok(x), Ok(y)) => Ok(x.max_abs_diff(y) / x.to_dense().amax().max(f64::MIN_POSITIVE)),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    checks.push(check("inverse_agreement", agreement, threshold));
    checks.push(match schur_tilde_s(&sys, alpha, tol) {
        Ok(s) => {
            let s_ok = dsaddle_core::subspaces::is_nonsingular(&s, tol);
            Check {
                name: "s_tilde_equivalence".into(),
                status: if s_ok == invertible {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                residual: None,
                detail: Some(format!(
                    "S̃ nonsingular: {s_ok}, K nonsingular: {invertible}"
                )),
            }
        }
        Err(e) => check("s_tilde_equivalence", Err(e), threshold),
    });
    let bounds = if invertible {
        let inv = dense_inverse(&sys, tol).map_err(|e| Failure::data(e.to_string()))?;
        let b = z22_nullity_bounds(&sys, &inv, tol).map_err(|e| Failure::data(e.to_string()))?;
        checks.push(Check {
            name: "nullity_bounds".into(),
            status: if b.all_hold(tol) {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            residual: None,
            detail: None,
        });
        Some(b)
    } else {
        checks.push(Check {
            name: "nullity_bounds".into(),
            status: CheckStatus::Skipped,
            residual: None,
            detail: Some("the assembled matrix is singular".into()),
        });
        None
    };
    let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
    let report = VerifyReport {
        schema_version: SCHEMA_VERSION.into(),
        kind: "verify".into(),
        dims: dims(&sys),
        alpha,
        seed,
        threshold,
        checks,
        nullity_bounds: bounds,
        passed,
        tolerances: *tol,
    };
    Ok(Outcome {
        code: if passed { 0 } else { 1 },
        stdout: render(&report, opts.format),
        warnings: Vec::new(),
    })
}

/// Parses `std::env::args`, runs, prints, and maps the result to an exit
/// code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(outcome.stdout.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(EXIT_IO);
            }
            ExitCode::from(outcome.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
