//! Seeded random instances with prescribed nullities, ranks and subspace
//! relations.
//!
//! Nonzero eigenvalues and singular values are drawn from `[0.5, 2]`, and
//! every target is re-verified with [`crate::subspaces`] after construction.
//! A draw that misses a target is retried with an advanced seed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dense::{self, hstack, symmetrize};
use crate::error::{Error, Result};
use crate::invertibility::{necessary_conditions, ConditionId};
use crate::subspaces::Definiteness;
use crate::system::BlockSystem;
use crate::tol::ToleranceConfig;

pub mod family;

pub use family::Family;

const SPECTRUM: core::ops::Range<f64> = 0.5..2.0;
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Sign pattern of the nonzero eigenvalues of a diagonal block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// All nonzero eigenvalues positive.
    #[default]
    Semidefinite,
    /// At least one negative eigenvalue; the rest have random signs.
    Indefinite,
}

/// Targets for [`gen_instance`]. Unset ranks default to full rank, or to
/// the value a direct-sum flag forces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub null_a: usize,
    pub null_d: usize,
    pub null_e: usize,
    pub shape_a: Shape,
    pub shape_d: Shape,
    pub shape_e: Shape,
    pub rank_b: Option<usize>,
    pub rank_c: Option<usize>,
    /// `ker(A) ⊕ ker(B) = ℝⁿ`; forces `rank(B) = null(A)`.
    pub require_ds1: bool,
    /// `ker(E) ⊕ ker(Cᵀ) = ℝᵖ`; forces `rank(C) = null(E)`.
    pub require_ds2: bool,
    /// `ran(B) ∩ ran(Cᵀ) = {0}`.
    pub require_r: bool,
    /// `ran(B) ∩ ran(Cᵀ) ≠ {0}`.
    pub force_overlap_r: bool,
    /// Multiplies `D` after construction.
    pub d_scale: f64,
    pub seed: u64,
    pub max_retries: usize,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            n: 2,
            m: 1,
            p: 1,
            null_a: 0,
            null_d: 0,
            null_e: 0,
            shape_a: Shape::Semidefinite,
            shape_d: Shape::Semidefinite,
            shape_e: Shape::Semidefinite,
            rank_b: None,
            rank_c: None,
            require_ds1: false,
            require_ds2: false,
            require_r: false,
            force_overlap_r: false,
            d_scale: 1.0,
            seed: 0,
            max_retries: 32,
        }
    }
}

impl GeneratorSpec {
    pub fn with_dims(n: usize, m: usize, p: usize) -> Self {
        GeneratorSpec {
            n,
            m,
            p,
            ..Default::default()
        }
    }

    pub fn target_rank_b(&self) -> usize {
        self.rank_b.unwrap_or(if self.require_ds1 {
            self.null_a
        } else {
            self.m.min(self.n)
        })
    }

    pub fn target_rank_c(&self) -> usize {
        self.rank_c.unwrap_or(if self.require_ds2 {
            self.null_e
        } else {
            self.p.min(self.m)
        })
    }

    /// Rejects out-of-range targets and mutually inconsistent flags,
    /// listing every conflict found.
    pub fn validate(&self) -> Result<()> {
        let (n, m, p) = (self.n, self.m, self.p);
        let (rb, rc) = (self.target_rank_b(), self.target_rank_c());
        let mut conflicts: Vec<String> = Vec::new();
        let mut check = |ok: bool, msg: String| {
            if !ok {
                conflicts.push(msg);
            }
        };
        check(
            n > 0 && m > 0 && p > 0,
            format!("dimensions must be positive, got ({n}, {m}, {p})"),
        );
        check(
            self.null_a <= n,
            format!("null_a = {} exceeds n = {n}", self.null_a),
        );
        check(
            self.null_d <= m,
            format!("null_d = {} exceeds m = {m}", self.null_d),
        );
        check(
            self.null_e <= p,
            format!("null_e = {} exceeds p = {p}", self.null_e),
        );
        check(
            rb <= m.min(n),
            format!("rank_b = {rb} exceeds min(m, n) = {}", m.min(n)),
        );
        check(
            rc <= p.min(m),
            format!("rank_c = {rc} exceeds min(p, m) = {}", p.min(m)),
        );
        for (name, shape, null, dim) in [
            ("A", self.shape_a, self.null_a, n),
            ("D", self.shape_d, self.null_d, m),
            ("E", self.shape_e, self.null_e, p),
        ] {
            check(
                shape != Shape::Indefinite || null < dim,
                format!("indefinite {name} needs a nonzero eigenvalue"),
            );
        }
        check(
            !self.require_ds1 || rb == self.null_a,
            format!(
                "require_ds1 needs rank_b = null_a, got {rb} and {}",
                self.null_a
            ),
        );
        check(
            !self.require_ds2 || rc == self.null_e,
            format!(
                "require_ds2 needs rank_c = null_e, got {rc} and {}",
                self.null_e
            ),
        );
        check(
            !(self.require_r && self.force_overlap_r),
            "require_r and force_overlap_r are contradictory".into(),
        );
        check(
            !self.require_r || rb + rc <= m,
            format!("require_r needs rank_b + rank_c ≤ m, got {rb} + {rc} > {m}"),
        );
        check(
            !self.force_overlap_r || (rb >= 1 && rc >= 1 && rb + rc <= m + 1),
            format!("force_overlap_r needs rank_b, rank_c ≥ 1 and rank_b + rank_c ≤ m + 1, got {rb}, {rc}"),
        );
        check(
            self.d_scale.is_finite() && self.d_scale > 0.0,
            format!("d_scale must be positive, got {}", self.d_scale),
        );
        check(self.max_retries > 0, "max_retries must be positive".into());
        if conflicts.is_empty() {
            Ok(())
        } else {
            Err(Error::InfeasibleSpec(conflicts.join("; ")))
        }
    }
}

/// What the returned instance provably satisfies, re-measured after
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub dims: [usize; 3],
    /// Seed of the draw that met every target.
    pub seed: u64,
    pub attempts: usize,
    pub null_a: usize,
    pub null_d: usize,
    pub null_e: usize,
    pub rank_b: usize,
    pub rank_c: usize,
    pub definiteness_a: Definiteness,
    pub definiteness_d: Definiteness,
    pub definiteness_e: Definiteness,
    pub n1: bool,
    pub n2: bool,
    pub n3: bool,
    pub r: bool,
    pub ds1: bool,
    pub ds2: bool,
    pub lambda_max_d: f64,
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed orthogonal `d×d` matrix.
fn orthogonal(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    if d == 0 {
        return DMatrix::zeros(0, 0);
    }
    let qr = gaussian(d, d, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Orthonormal basis of the column span of a full-column-rank `m`.
fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    m.clone().qr().q()
}

fn spectrum(count: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(SPECTRUM)).collect()
}

/// Nonzero eigenvalues for a shape; an indefinite draw gets at least one
/// negative value.
fn signed_spectrum(count: usize, shape: Shape, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut vals = spectrum(count, rng);
    if shape == Shape::Indefinite {
        for v in vals.iter_mut() {
            if rng.random::<bool>() {
                *v = -*v;
            }
        }
        if let Some(first) = vals.first_mut() {
            *first = -first.abs();
        }
    }
    vals
}

/// `Q·diag(λ)·Qᵀ` over the given orthonormal columns.
fn symmetric_from(q: &DMatrix<f64>, eig: &[f64]) -> DMatrix<f64> {
    let lam = DMatrix::from_diagonal(&DVector::from_column_slice(eig));
    symmetrize(&(q * lam * q.transpose()))
}

/// Symmetric block of size `d` and nullity `k` in a random frame. The first
/// `k` columns of the returned frame span the kernel.
fn symmetric_with_nullity(
    d: usize,
    k: usize,
    shape: Shape,
    rng: &mut ChaCha8Rng,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let q = orthogonal(d, rng);
    let eig = signed_spectrum(d - k, shape, rng);
    let range = q.columns(k, d - k).into_owned();
    (symmetric_from(&range, &eig), q)
}

/// `d×d` positive semidefinite matrix with nullity exactly `k`; the nonzero
/// eigenvalues lie in `[0.5, 2]`.
pub fn gen_psd_with_nullity(d: usize, k: usize, seed: u64) -> Result<DMatrix<f64>> {
    if k > d {
        return Err(Error::InfeasibleSpec(format!(
            "nullity {k} exceeds dimension {d}"
        )));
    }
    let mut rng = rng_for(seed);
    Ok(symmetric_with_nullity(d, k, Shape::Semidefinite, &mut rng).0)
}

/// `U·S·Vᵀ` with orthonormal `U`, `V` and singular values in `[0.5, 2]`.
fn from_factors(u: &DMatrix<f64>, v: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let s = DMatrix::from_diagonal(&DVector::from_vec(spectrum(u.ncols(), rng)));
    u * s * v.transpose()
}

fn random_orthonormal(d: usize, r: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    orthogonal(d, rng).columns(0, r).into_owned()
}

/// `rows×cols` matrix of rank exactly `r`, singular values in `[0.5, 2]`.
pub fn gen_rank(rows: usize, cols: usize, r: usize, seed: u64) -> Result<DMatrix<f64>> {
    if r > rows.min(cols) {
        return Err(Error::InfeasibleSpec(format!(
            "rank {r} exceeds min({rows}, {cols})"
        )));
    }
    let mut rng = rng_for(seed);
    let u = random_orthonormal(rows, r, &mut rng);
    let v = random_orthonormal(cols, r, &mut rng);
    Ok(from_factors(&u, &v, &mut rng))
}

/// Orthonormal basis of `(ker B)⊥` for a random complement `ker B` of the
/// span of `frame[:, ..k]`, with `(ker B)⊥` of dimension `k`.
///
/// With `K₁ = frame[:, ..k]` and `K₁⊥ = frame[:, k..]`, the kernel is
/// `span(K₁⊥ + K₁M)` for a random `M` with `‖M‖₂ ≤ 1/2`, whose orthogonal
/// complement is `span(K₁ − K₁⊥Mᵀ)`.
fn complement_row_space(frame: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let d = frame.nrows();
    let k1 = frame.columns(0, k).into_owned();
    let k1p = frame.columns(k, d - k).into_owned();
    let mut tilt = gaussian(k, d - k, rng);
    let norm = dense::spectral_norm(&tilt);
    if norm > 0.0 {
        tilt *= rng.random_range(0.0..0.5) / norm;
    }
    orthonormalize(&(k1 - k1p * tilt.transpose()))
}

/// Column bases of `ran(B)` and `ran(Cᵀ)` inside `ℝᵐ`.
fn range_frames(
    spec: &GeneratorSpec,
    rb: usize,
    rc: usize,
    rng: &mut ChaCha8Rng,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = spec.m;
    if spec.require_r {
        let q = orthogonal(m, rng);
        return (
            q.columns(0, rb).into_owned(),
            q.columns(rb, rc).into_owned(),
        );
    }
    if spec.force_overlap_r {
        let q = orthogonal(m, rng);
        let ub = q.columns(0, rb).into_owned();
        let shared = q.columns(0, 1).into_owned();
        let rest = q.columns(rb, rc - 1).into_owned();
        return (ub, hstack(&[&shared, &rest]));
    }
    (
        random_orthonormal(m, rb, rng),
        random_orthonormal(m, rc, rng),
    )
}

fn draw(spec: &GeneratorSpec, seed: u64) -> Result<BlockSystem> {
    let mut rng = rng_for(seed);
    let (n, m, p) = (spec.n, spec.m, spec.p);
    let (rb, rc) = (spec.target_rank_b(), spec.target_rank_c());

    let (a, frame_a) = symmetric_with_nullity(n, spec.null_a, spec.shape_a, &mut rng);
    let (d, _) = symmetric_with_nullity(m, spec.null_d, spec.shape_d, &mut rng);
    let (e, frame_e) = symmetric_with_nullity(p, spec.null_e, spec.shape_e, &mut rng);

    let (ub, uc) = range_frames(spec, rb, rc, &mut rng);
    let vb = if spec.require_ds1 {
        complement_row_space(&frame_a, spec.null_a, &mut rng)
    } else {
        random_orthonormal(n, rb, &mut rng)
    };
    let vc = if spec.require_ds2 {
        complement_row_space(&frame_e, spec.null_e, &mut rng)
    } else {
        random_orthonormal(p, rc, &mut rng)
    };
    let b = from_factors(&ub, &vb, &mut rng);
    let ct = from_factors(&uc, &vc, &mut rng);
    BlockSystem::new(a, b, ct.transpose(), d * spec.d_scale, e)
}

fn shape_matches(shape: Shape, null: usize, dim: usize, def: Definiteness) -> bool {
    match shape {
        Shape::Semidefinite if null == 0 => def == Definiteness::PositiveDefinite,
        Shape::Semidefinite => def == Definiteness::PositiveSemidefinite,
        Shape::Indefinite => def == Definiteness::Indefinite || dim == 0,
    }
}

fn certify(
    spec: &GeneratorSpec,
    sys: &BlockSystem,
    tol: &ToleranceConfig,
    seed: u64,
    attempts: usize,
) -> Certificate {
    let report = necessary_conditions(sys, tol);
    Certificate {
        dims: [spec.n, spec.m, spec.p],
        seed,
        attempts,
        null_a: report.null_a,
        null_d: report.null_d,
        null_e: report.null_e,
        rank_b: report.rank_b,
        rank_c: report.rank_c,
        definiteness_a: report.definiteness_a,
        definiteness_d: report.definiteness_d,
        definiteness_e: report.definiteness_e,
        n1: report.holds(ConditionId::N1),
        n2: report.holds(ConditionId::N2),
        n3: report.holds(ConditionId::N3),
        r: report.holds(ConditionId::R),
        ds1: report.holds(ConditionId::DS1),
        ds2: report.holds(ConditionId::DS2),
        lambda_max_d: report.lambda_max_d,
    }
}

fn meets_targets(spec: &GeneratorSpec, c: &Certificate) -> bool {
    c.null_a == spec.null_a
        && c.null_d == spec.null_d
        && c.null_e == spec.null_e
        && c.rank_b == spec.target_rank_b()
        && c.rank_c == spec.target_rank_c()
        && shape_matches(spec.shape_a, spec.null_a, spec.n, c.definiteness_a)
        && shape_matches(spec.shape_d, spec.null_d, spec.m, c.definiteness_d)
        && shape_matches(spec.shape_e, spec.null_e, spec.p, c.definiteness_e)
        && (!spec.require_ds1 || c.ds1)
        && (!spec.require_ds2 || c.ds2)
        && (!spec.require_r || c.r)
        && (!spec.force_overlap_r || !c.r)
}

/// Draws an instance meeting every target of `spec` under the default
/// tolerances.
pub fn gen_instance(spec: &GeneratorSpec) -> Result<(BlockSystem, Certificate)> {
    gen_instance_with_tolerance(spec, &ToleranceConfig::default())
}

/// [`gen_instance`] with the targets verified under `tol`.
pub fn gen_instance_with_tolerance(
    spec: &GeneratorSpec,
    tol: &ToleranceConfig,
) -> Result<(BlockSystem, Certificate)> {
    spec.validate()?;
    tol.validate()?;
    for attempt in 0..spec.max_retries {
        let seed = spec
            .seed
            .wrapping_add((attempt as u64).wrapping_mul(SEED_STRIDE));
        let sys = draw(spec, seed)?;
        let cert = certify(spec, &sys, tol, seed, attempt + 1);
        if meets_targets(spec, &cert) {
            return Ok((sys, cert));
        }
    }
    Err(Error::RetriesExhausted(spec.max_retries))
}
