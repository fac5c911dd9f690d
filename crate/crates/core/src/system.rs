//! The block data model and the transformations that preserve invertibility.

use alloc::format;
use nalgebra::{DMatrix, DVector};

use crate::dense::{self, block_matrix, fro};
use crate::error::{Error, Result};
use crate::subspaces;
use crate::tol::ToleranceConfig;

/// The five blocks of `K = [[A, Bᵀ, 0], [B, −D, Cᵀ], [0, C, E]]`.
///
/// `D` is stored as itself; [`assemble`] applies the minus sign.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    e: DMatrix<f64>,
}

impl BlockSystem {
    /// Validates with the default tolerances.
    pub fn new(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        e: DMatrix<f64>,
    ) -> Result<Self> {
        Self::with_tolerance(a, b, c, d, e, &ToleranceConfig::default())
    }

    /// Checks dimensions (`n, m, p ≥ 1`), finiteness and the symmetry of
    /// `A`, `D`, `E` within `sym_rtol`.
    pub fn with_tolerance(
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        d: DMatrix<f64>,
        e: DMatrix<f64>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        let n = a.nrows();
        let m = b.nrows();
        let p = c.nrows();
        if n == 0 || m == 0 || p == 0 {
            return Err(Error::DimensionMismatch(format!(
                "block sizes must be positive, got n={n}, m={m}, p={p}"
            )));
        }
        let expect = [
            ("A", &a, (n, n)),
            ("B", &b, (m, n)),
            ("C", &c, (p, m)),
            ("D", &d, (m, m)),
            ("E", &e, (p, p)),
        ];
        for (name, blk, shape) in expect {
            if blk.shape() != shape {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}×{}, expected {}×{} for n={n}, m={m}, p={p}",
                    blk.nrows(),
                    blk.ncols(),
                    shape.0,
                    shape.1
                )));
            }
            if !dense::is_finite(blk) {
                return Err(Error::NonFinite(name));
            }
        }
        for (name, blk) in [("A", &a), ("D", &d), ("E", &e)] {
            if fro(&(blk - blk.transpose())) > tol.sym_rtol * fro(blk) {
                return Err(Error::NotSymmetric(name));
            }
        }
        Ok(BlockSystem { a, b, c, d, e })
    }

    /// System with `D = 0` and `E = 0`.
    pub fn with_zero_diagonal(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        let (m, p) = (b.nrows(), c.nrows());
        Self::new(a, b, c, DMatrix::zeros(m, m), DMatrix::zeros(p, p))
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }
    pub fn e(&self) -> &DMatrix<f64> {
        &self.e
    }
    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    pub fn m(&self) -> usize {
        self.b.nrows()
    }
    pub fn p(&self) -> usize {
        self.c.nrows()
    }

    /// `(n, m, p)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n(), self.m(), self.p())
    }

    /// `ℓ = n + m + p`.
    pub fn order(&self) -> usize {
        self.n() + self.m() + self.p()
    }

    /// `(A, B, C, D, E)`.
    pub fn into_blocks(self) -> [DMatrix<f64>; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }

    /// Splits a vector of length `ℓ` into its `(x, y, z)` parts.
    pub fn split(&self, u: &DVector<f64>) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let (n, m, p) = self.dims();
        (
            u.rows(0, n).into_owned(),
            u.rows(n, m).into_owned(),
            u.rows(n + m, p).into_owned(),
        )
    }
}

/// A dense symmetric matrix with its `(n, m, p)` block partition.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledMatrix {
    matrix: DMatrix<f64>,
    sizes: [usize; 3],
}

impl AssembledMatrix {
    pub fn new(matrix: DMatrix<f64>, n: usize, m: usize, p: usize) -> Result<Self> {
        if matrix.shape() != (n + m + p, n + m + p) {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}×{}, partition sums to {}",
                matrix.nrows(),
                matrix.ncols(),
                n + m + p
            )));
        }
        Ok(AssembledMatrix {
            matrix,
            sizes: [n, m, p],
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    /// Block `(i, j)` of the 3×3 partition, 0-based.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        let off = |k: usize| self.sizes[..k].iter().sum::<usize>();
        self.matrix
            .view((off(i), off(j)), (self.sizes[i], self.sizes[j]))
            .into_owned()
    }
}

/// `K = [[A, Bᵀ, 0], [B, −D, Cᵀ], [0, C, E]]`.
pub fn assemble(sys: &BlockSystem) -> AssembledMatrix {
    let (n, m, p) = sys.dims();
    let bt = sys.b.transpose();
    let ct = sys.c.transpose();
    let neg_d = -&sys.d;
    let matrix = block_matrix(
        &[n, m, p],
        &[
            &[Some(&sys.a), Some(&bt), None],
            &[Some(&sys.b), Some(&neg_d), Some(&ct)],
            &[None, Some(&sys.c), Some(&sys.e)],
        ],
    );
    AssembledMatrix {
        matrix,
        sizes: [n, m, p],
    }
}

/// The similar system `K_s = [[E, C, 0], [Cᵀ, −D, B], [0, Bᵀ, A]]`,
/// i.e. `(A, B, C, D, E) → (E, Cᵀ, Bᵀ, D, A)` with sizes `(p, m, n)`.
pub fn permute_similar(sys: &BlockSystem) -> BlockSystem {
    BlockSystem {
        a: sys.e.clone(),
        b: sys.c.transpose(),
        c: sys.b.transpose(),
        d: sys.d.clone(),
        e: sys.a.clone(),
    }
}

/// The block-reversal permutation `P` with `assemble(permute_similar(s)) =
/// P·K·Pᵀ`. When `n = p` it is the symmetric anti-diagonal block matrix.
pub fn block_reversal(n: usize, m: usize, p: usize) -> DMatrix<f64> {
    let l = n + m + p;
    let mut perm = DMatrix::zeros(l, l);
    // Row blocks of the result are (p, m, n); column blocks are (n, m, p).
    for i in 0..p {
        perm[(i, n + m + i)] = 1.0;
    }
    for i in 0..m {
        perm[(p + i, n + i)] = 1.0;
    }
    for i in 0..n {
        perm[(p + m + i, i)] = 1.0;
    }
    perm
}

/// Maps a vector of the permuted system back to the original ordering:
/// `[z; y; x] → [x; y; z]`.
pub fn unpermute_vector(permuted: &BlockSystem, u: &DVector<f64>) -> DVector<f64> {
    let (zs, ys, xs) = permuted.split(u);
    dense::concat(&[&xs, &ys, &zs])
}

/// Upper end of the admissible interval `(0, 2/λ_max(D))`; `None` when it
/// is unbounded (`λ_max(D) ≤ 0`, in particular `D = 0`).
pub fn alpha_upper_bound(d: &DMatrix<f64>) -> Option<f64> {
    let lmax = subspaces::lambda_max(d);
    (lmax > 0.0).then(|| 2.0 / lmax)
}

/// Midpoint `1/λ_max(D)` of the admissible interval, or 1 when unbounded.
pub fn default_alpha(sys: &BlockSystem) -> f64 {
    alpha_upper_bound(&sys.d).map_or(1.0, |u| u / 2.0)
}

/// Result of the congruence `WᵀKW = K̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct Congruence {
    pub alpha: f64,
    /// `W = [[I, 0, 0], [αB, I, 0], [0, 0, I]]`.
    pub w: DMatrix<f64>,
    pub k_tilde: AssembledMatrix,
}

impl Congruence {
    /// `‖WᵀKW − K̃‖_F / ‖K̃‖_F`.
    pub fn residual(&self, sys: &BlockSystem) -> f64 {
        let k = assemble(sys).into_inner();
        let lhs = self.w.transpose() * k * &self.w;
        let kt = self.k_tilde.matrix();
        fro(&(lhs - kt)) / fro(kt).max(f64::MIN_POSITIVE)
    }
}

/// Builds `W` and `K̃` for `0 < α < 2/λ_max(D)`:
///
/// ```text
///      [ A + αBᵀ(2I − αD)B   (B − αDB)ᵀ   α(CB)ᵀ ]
/// K̃ = [ B − αDB             −D           Cᵀ     ]
///      [ αCB                 C            E      ]
/// ```
pub fn congruence_transform(sys: &BlockSystem, alpha: f64) -> Result<Congruence> {
    let upper = alpha_upper_bound(&sys.d);
    let ok = alpha.is_finite() && alpha > 0.0 && upper.map_or(true, |u| alpha < u);
    if !ok {
        return Err(Error::AlphaOutOfRange {
            alpha,
            upper: upper.unwrap_or(f64::INFINITY),
        });
    }
    let (n, m, p) = sys.dims();
    let b = &sys.b;
    let two_minus = DMatrix::identity(m, m) * 2.0 - &sys.d * alpha;
    let a11 = &sys.a + b.transpose() * &two_minus * b * alpha;
    let b21 = b - &sys.d * b * alpha;
    let c31 = &sys.c * b * alpha;
    let neg_d = -&sys.d;
    let matrix = block_matrix(
        &[n, m, p],
        &[
            &[Some(&a11), Some(&b21.transpose()), Some(&c31.transpose())],
            &[Some(&b21), Some(&neg_d), Some(&sys.c.transpose())],
            &[Some(&c31), Some(&sys.c), Some(&sys.e)],
        ],
    );
    let alpha_b = b * alpha;
    let w = block_matrix(
        &[n, m, p],
        &[
            &[Some(&DMatrix::identity(n, n)), None, None],
            &[Some(&alpha_b), Some(&DMatrix::identity(m, m)), None],
            &[None, None, Some(&DMatrix::identity(p, p))],
        ],
    );
    Ok(Congruence {
        alpha,
        w,
        k_tilde: AssembledMatrix {
            matrix,
            sizes: [n, m, p],
        },
    })
}

/// Diagonal congruence `diag(I, βI, I)·K·diag(I, βI, I)`: the blocks become
/// `(A, βB, βC, β²D, E)`. Kernel dimension is preserved, and a kernel vector
/// `u` of `K` maps to `diag(I, β⁻¹I, I)·u`.
pub fn rescale_middle(sys: &BlockSystem, beta: f64) -> Result<BlockSystem> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::NonPositiveScale(beta));
    }
    Ok(BlockSystem {
        a: sys.a.clone(),
        b: &sys.b * beta,
        c: &sys.c * beta,
        d: &sys.d * (beta * beta),
        e: sys.e.clone(),
    })
}
