#![allow(dead_code)]

use dsaddle_core::{
    assemble, gen_instance, BlockSystem, Certificate, DMatrix, Family, ToleranceConfig,
};

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

pub fn instance(family: Family, seed: u64, max_dim: usize) -> (BlockSystem, Certificate) {
    let spec = family.spec(seed, max_dim);
    gen_instance(&spec).unwrap_or_else(|e| panic!("{family} seed {seed}: {e}"))
}

/// Absolute eigenvalues of a symmetric matrix, from the dense symmetric
/// eigensolver.
pub fn abs_eigenvalues(k: &DMatrix<f64>) -> Vec<f64> {
    let sym = (k + k.transpose()) * 0.5;
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .collect()
}

/// `σ_min > rank_rtol·ℓ·σ_max` with the singular values of the symmetric
/// `K` taken as absolute eigenvalues.
pub fn oracle_nonsingular_sym(k: &DMatrix<f64>, tol: &ToleranceConfig) -> bool {
    let ev = abs_eigenvalues(k);
    let max = ev.iter().copied().fold(0.0, f64::max);
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    max > 0.0 && min > tol.rank_threshold(k.nrows(), k.ncols(), max)
}

pub fn oracle_invertible(sys: &BlockSystem, tol: &ToleranceConfig) -> bool {
    oracle_nonsingular_sym(assemble(sys).matrix(), tol)
}

/// Spectral norm through the eigenvalues of `MᵀM`.
pub fn norm2(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let g = m.transpose() * m;
    g.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(0.0, f64::max)
        .max(0.0)
        .sqrt()
}

/// Condition number of a symmetric matrix.
pub fn cond_sym(k: &DMatrix<f64>) -> f64 {
    let ev = abs_eigenvalues(k);
    let max = ev.iter().copied().fold(0.0, f64::max);
    let min = ev.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Rank of a general matrix by counting eigenvalues of `MᵀM` above the
/// squared threshold.
pub fn oracle_rank(m: &DMatrix<f64>, tol: &ToleranceConfig) -> usize {
    if m.is_empty() {
        return 0;
    }
    let g = m.transpose() * m;
    let ev: Vec<f64> = g
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    let max = ev.iter().copied().fold(0.0, f64::max);
    // Zero singular values surface near √ε·σ_max on the Gram route.
    let cut = (1e-6 * max).max(tol.rank_threshold(m.nrows(), m.ncols(), max));
    ev.iter().filter(|&&s| s > cut).count()
}
