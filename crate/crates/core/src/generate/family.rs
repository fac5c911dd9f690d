//! Random [`GeneratorSpec`]s drawn from the hypothesis class of one rule.
//!
//! A family fixes the structural targets a rule needs (zero or definite
//! blocks, maximal deficiency, direct sums) and randomizes everything else:
//! dimensions up to `max_dim`, free nullities, ranks and the range relation.
//! Hypotheses that the generator cannot target directly (for instance
//! `ker(Bᵀ) ∩ ker(D) ∩ ker(C) = {0}`) may fail on a draw; callers that need
//! them filter on the condition report.

use core::fmt;
use core::str::FromStr;

use alloc::string::String;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GeneratorSpec, Shape};

const FAMILY_STREAM: u64 = 0xD1B5_4A32_D192_ED03;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Free nullities, shapes and ranks; exercises the necessary conditions.
    Generic,
    /// `A ≻ 0`, other blocks free.
    Schur,
    /// `A, D ⪰ 0`, `null(A) = m`, `ker(A) ⊕ ker(B) = ℝⁿ`, `λ_max(D) < 2`.
    EIff,
    /// `A = 0`, `D, E ≻ 0`, `m ≥ n`.
    CorollaryRankB,
    /// `A, D ≻ 0`, `E = 0`, `m ≥ p`.
    CorollaryRankC,
    /// `A, E ≻ 0`, `D = 0`.
    CorollaryKernel,
    /// `A ⪰ 0`, `rank(B) = m`, `ker(A) ⊕ ker(B) = ℝⁿ`, often with `E = 0`.
    RankB,
    /// `E ⪰ 0`, `rank(C) = m`, `ker(E) ⊕ ker(Cᵀ) = ℝᵖ`, often with `A = 0`.
    RankC,
    /// `A, D, E ⪰ 0` with both direct sums.
    DirectSum,
    /// `A, D, E ⪰ 0`, free nullities and ranks.
    PsdLadder,
    /// At least one indefinite diagonal block.
    Indefinite,
    /// [`Family::EIff`] with `E` nonsingular: every structured inverse applies.
    MaximalDeficiency,
    /// [`Family::EIff`] without the bound on `λ_max(D)`.
    TildeS,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::Generic,
        Family::Schur,
        Family::EIff,
        Family::CorollaryRankB,
        Family::CorollaryRankC,
        Family::CorollaryKernel,
        Family::RankB,
        Family::RankC,
        Family::DirectSum,
        Family::PsdLadder,
        Family::Indefinite,
        Family::MaximalDeficiency,
        Family::TildeS,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Generic => "generic",
            Family::Schur => "schur",
            Family::EIff => "e_iff",
            Family::CorollaryRankB => "corollary_rank_b",
            Family::CorollaryRankC => "corollary_rank_c",
            Family::CorollaryKernel => "corollary_kernel",
            Family::RankB => "rank_b",
            Family::RankC => "rank_c",
            Family::DirectSum => "direct_sum",
            Family::PsdLadder => "psd_ladder",
            Family::Indefinite => "indefinite",
            Family::MaximalDeficiency => "maximal_deficiency",
            Family::TildeS => "tilde_s",
        }
    }

    /// A valid spec in this class. Deterministic in `(seed, max_dim)`; the
    /// returned spec carries `seed` for the instance draw.
    ///
    /// # Panics
    ///
    /// If `max_dim` is zero.
    pub fn spec(self, seed: u64, max_dim: usize) -> GeneratorSpec {
        assert!(max_dim > 0, "max_dim must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ FAMILY_STREAM);
        let dim = |rng: &mut ChaCha8Rng, lo: usize| rng.random_range(lo.min(max_dim)..=max_dim);
        let upto = |rng: &mut ChaCha8Rng, hi: usize| rng.random_range(0..=hi);
        let mut s = match self {
            Family::Generic => {
                let (n, m, p) = (dim(&mut rng, 1), dim(&mut rng, 1), dim(&mut rng, 1));
                let mut s = GeneratorSpec::with_dims(n, m, p);
                s.null_a = upto(&mut rng, n);
                s.null_d = upto(&mut rng, m);
                s.null_e = upto(&mut rng, p);
                s.shape_a = random_shape(&mut rng, s.null_a, n);
                s.shape_d = random_shape(&mut rng, s.null_d, m);
                s.shape_e = random_shape(&mut rng, s.null_e, p);
                s.rank_b = Some(upto(&mut rng, m.min(n)));
                s.rank_c = Some(upto(&mut rng, p.min(m)));
                s
            }
            Family::Schur => {
                let (n, m, p) = (dim(&mut rng, 1), dim(&mut rng, 1), dim(&mut rng, 1));
                let mut s = GeneratorSpec::with_dims(n, m, p);
                s.null_d = upto(&mut rng, m);
                s.null_e = upto(&mut rng, p);
                s.shape_d = random_shape(&mut rng, s.null_d, m);
                s.shape_e = random_shape(&mut rng, s.null_e, p);
                s.rank_b = Some(upto(&mut rng, m.min(n)));
                s.rank_c = Some(upto(&mut rng, p.min(m)));
                s
            }
            Family::EIff | Family::MaximalDeficiency | Family::TildeS => {
                let m = dim(&mut rng, 1);
                let n = rng.random_range(m..=max_dim.max(m));
                let p = dim(&mut rng, 1);
                let mut s = GeneratorSpec::with_dims(n, m, p);
                s.null_a = m;
                s.require_ds1 = true;
                s.null_d = upto(&mut rng, m);
                s.d_scale = match self {
                    Family::TildeS => rng.random_range(0.2..3.0),
                    _ => rng.random_range(0.2..0.95),
                };
                s.null_e = match self {
                    Family::MaximalDeficiency => 0,
                    _ => upto(&mut rng, p.min(m)),
                };
                s.shape_e = random_shape(&mut rng, s.null_e, p);
                s.rank_c = Some(rng.random_range(s.null_e..=p.min(m)));
                s
            }
            Family::CorollaryRankB => {
                let n = dim(&mut rng, 1);
                let m = rng.random_range(n..=max_dim.max(n));
                let p = dim(&mut rng, 1);
                let mut s = GeneratorSpec::with_dims(n, m, p);
                s.null_a = n;
                s.rank_b = Some(if rng.random_bool(0.5) {
                    n
                } else {
                    upto(&mut rng, n)
                });
                s.rank_c = Some(upto(&mut rng, p.min(m)));
                s
            }
            Family::CorollaryRankC => {
                let p = dim(&mut rng, 1);
                let m = rng.random_range(p..=max_dim.max(p));
                let n = dim(&mut rng, 1);
                let mut s = GeneratorSpec::with_dims(n, m, p);
                s.null_e = p;
                s.rank_b = Some(upto(&mut rng, m.min(n)));
                s.rank_c = Some(if rng.random_bool(0.5) {
                    p
                } else {
                    upto(&mut rng, p)
                });
                s
            }
            Family::CorollaryKernel => {
                let (n, m, p) = (dim(&mut rng, 1), dim(&mut rng, 1), dim(&mut rng, 1));
                let mut s = GeneratorSpec::with_dims(n, m, p);
                s.null_d = m;
                s.rank_b = Some(upto(&mut rng, m.min(n)));
                s.rank_c = Some(upto(&mut rng, p.min(m)));
                s
            }
            Family::RankB => {
                let m = dim(&mut rng, 1);
                let n = rng.random_range(m..=max_dim.max(m));
                let mut s;
                if rng.random_bool(0.5) {
                    // E = 0 needs rank(C) = p ≤ m for ker(Cᵀ) ∩ ker(E) = {0}.
                    let p = rng.random_range(1..=m);
                    s = GeneratorSpec::with_dims(n, m, p);
                    s.null_e = p;
                    s.rank_c = Some(p);
                } else {
                    let p = dim(&mut rng, 1);
                    s = GeneratorSpec::with_dims(n, m, p);
                    s.null_e = upto(&mut rng, p.min(m));
                    s.rank_c = Some(rng.random_range(s.null_e..=p.min(m)));
                    if rng.random_bool(0.3) && s.null_e == 0 {
                        s.rank_c = Some(0);
                    }
                }
                s.null_a = m;
                s.require_ds1 = true;
                s.null_d = upto(&mut rng, m);
                s
            }
            Family::RankC => {
                let m = dim(&mut rng, 1);
                let p = rng.random_range(m..=max_dim.max(m));
                let mut s;
                if rng.random_bool(0.5) {
                    let n = rng.random_range(1..=m);
                    s = GeneratorSpec::with_dims(n, m, p);
                    s.null_a = n;
                    s.rank_b = Some(n);
                } else {
                    let n = dim(&mut rng, 1);
                    s = GeneratorSpec::with_dims(n, m, p);
                    s.null_a = upto(&mut rng, n.min(m));
                    s.rank_b = Some(rng.random_range(s.null_a..=n.min(m)));
                    if rng.random_bool(0.3) && s.null_a == 0 {
                        s.rank_b = Some(0);
                    }
                }
                s.null_e = m;
                s.require_ds2 = true;
                s.null_d = upto(&mut rng, m);
                s
            }
            Family::DirectSum => {
                let (n, m, p) = (dim(&mut rng, 1), dim(&mut rng, 1), dim(&mut rng, 1));
                let mut s = GeneratorSpec::with_dims(n, m, p);
                s.null_a = upto(&mut rng, n.min(m));
                s.null_e = upto(&mut rng, p.min(m));
                s.require_ds1 = true;
                s.require_ds2 = true;
                s.null_d = upto(&mut rng, m);
                let (rb, rc) = (s.null_a, s.null_e);
                match rng.random_range(0..3) {
                    0 if rb + rc <= m => s.require_r = true,
                    1 if rb >= 1 && rc >= 1 && rb + rc <= m + 1 => s.force_overlap_r = true,
                    _ => {}
                }
                s
            }
            Family::PsdLadder => {
                let (n, m, p) = (dim(&mut rng, 1), dim(&mut rng, 1), dim(&mut rng, 1));
                let mut s = GeneratorSpec::with_dims(n, m, p);
                s.null_a = upto(&mut rng, n);
                s.null_d = upto(&mut rng, m);
                s.null_e = upto(&mut rng, p);
                let rb = upto(&mut rng, m.min(n));
                let rc = upto(&mut rng, p.min(m));
                s.rank_b = Some(rb);
                s.rank_c = Some(rc);
                if rb + rc <= m && rng.random_bool(0.5) {
                    s.require_r = true;
                }
                s
            }
            Family::Indefinite => {
                let (n, m, p) = (dim(&mut rng, 1), dim(&mut rng, 1), dim(&mut rng, 1));
                let mut s = GeneratorSpec::with_dims(n, m, p);
                s.null_a = upto(&mut rng, n - 1);
                s.null_d = upto(&mut rng, m - 1);
                s.null_e = upto(&mut rng, p - 1);
                s.shape_a = Shape::Indefinite;
                s.shape_d = random_shape(&mut rng, s.null_d, m);
                s.shape_e = random_shape(&mut rng, s.null_e, p);
                s.rank_b = Some(upto(&mut rng, m.min(n)));
                s.rank_c = Some(upto(&mut rng, p.min(m)));
                s
            }
        };
        s.seed = seed;
        debug_assert!(s.validate().is_ok(), "{self}: {s:?}");
        s
    }
}

fn random_shape(rng: &mut ChaCha8Rng, null: usize, dim: usize) -> Shape {
    if null < dim && rng.random_bool(0.3) {
        Shape::Indefinite
    } else {
        Shape::Semidefinite
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| alloc::format!("unknown family {s:?}"))
    }
}
