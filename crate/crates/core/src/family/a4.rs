use std::sync::OnceLock;

use super::{bin_index, MAX_RANK_BUCKET, check_grid, FamilyTag, FieldRecord, GridCounts, RankData};
use crate::arith::{gcd, is_prime_u64, totient, SquarefreeSieve};
use crate::bound::{BoundContext, RamificationProfile, RamifiedPrime};
use crate::error::{Error, Result};
use crate::permgroup::a4_ramification_table;

/// Largest `X` accepted by the `A4` counter (support primes up to 10^6).
pub const MAX_A4_X: u64 = 1_000_000_000_000;

/// Conductors whose cyclic cubic field is known to have class number one.
const CLASS_NUMBER_ONE: [u64; 3] = [7, 9, 13];

/// Galois closure data for the sextic: totally real of degree 12 over `Q`
/// with `Gal(N/K) = C2 x C2`.
pub const A4_SEXTIC_CONTEXT: BoundContext = BoundContext {
    r1: 12,
    r2: 0,
    group_order: 4,
    rk_p_cl_k: 0,
    degree: 12,
};

/// A cyclic cubic field `K ⊆ Q(ζ_f)`, described by the kernel `T` of the
/// cubic character mod `f`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicBase {
    pub conductor: u64,
    /// The cubes in `(Z/f)*`, ascending.
    pub residues: Vec<u64>,
    pub class_number_one: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeSplitting {
    Split,
    NonSplit,
    Ramified,
}

/// The cyclic cubic field of conductor `f` (`f` prime `≡ 1 mod 3`, or 9).
pub fn cubic_base(f: u64) -> Result<CubicBase> {
    if !(f == 9 || (is_prime_u64(f) && f % 3 == 1)) {
        return Err(Error::Domain(format!("no cyclic cubic field has conductor {f}")));
    }
    let mut cubes: Vec<u64> = (1..f)
        .filter(|&x| gcd(x, f) == 1)
        .map(|x| ((x as u128).pow(3) % f as u128) as u64)
        .collect();
    cubes.sort_unstable();
    cubes.dedup();
    debug_assert_eq!(3 * cubes.len() as u64, totient(f));
    Ok(CubicBase {
        conductor: f,
        residues: cubes,
        class_number_one: CLASS_NUMBER_ONE.contains(&f),
    })
}

pub fn classify_prime(base: &CubicBase, p: u64) -> PrimeSplitting {
    if base.conductor % p == 0 {
        PrimeSplitting::Ramified
    } else if base.residues.binary_search(&(p % base.conductor)).is_ok() {
        PrimeSplitting::Split
    } else {
        PrimeSplitting::NonSplit
    }
}

fn admissible(base: &CubicBase, p: u64) -> bool {
    p > 3 && classify_prime(base, p) == PrimeSplitting::Split
}

/// `e_{L/Q}(p)` for the sextic `L` at a prime split in `K` with inertia of
/// order 2: the gcd of the ramification indices in its splitting type.
fn split_prime_sextic_e() -> u64 {
    static E: OnceLock<u64> = OnceLock::new();
    *E.get_or_init(|| {
        let rows = a4_ramification_table().expect("A4 table is consistent");
        let e = rows[0].sextic.e_gcd();
        debug_assert_eq!(e, rows[1].sextic.e_gcd());
        e
    })
}

fn check_x(x: u64) -> Result<()> {
    if x > MAX_A4_X {
        return Err(Error::Bounds(format!("X = {x} exceeds {MAX_A4_X}")));
    }
    Ok(())
}

/// Largest `n` with `n² < x`.
fn n_below(x: u64) -> u64 {
    if x == 0 {
        0
    } else {
        (x - 1).isqrt()
    }
}

/// The `A4` records over `base` with `C = n² < X`: one per squarefree
/// `n > 1` built from split primes `p ∤ 6`, of weight `3^{ω(n)}`.
pub fn a4_records(base: &CubicBase, x: u64) -> Result<Vec<FieldRecord>> {
    check_x(x)?;
    let sieve = SquarefreeSieve::new(n_below(x));
    let mut out = Vec::new();
    for b in 0..sieve.block_count() {
        for (n, support) in sieve.block(b).iter() {
            if n == 1 || !support.iter().all(|&p| admissible(base, p)) {
                continue;
            }
            let profile = sextic_profile(support)?;
            out.push(FieldRecord {
                family: FamilyTag::A4,
                support: support.to_vec(),
                c: n * n,
                gamma: if base.class_number_one { support.len() as u32 } else { 0 },
                rank: Some(RankData { value: profile.rank_lower_bound(2, 1)?, exact: false }),
                weight: 3u64.pow(support.len() as u32),
                disc: None,
            });
        }
    }
    Ok(out)
}

/// Ramification profile of the sextic over `Q` at the given split primes.
pub fn sextic_profile(support: &[u64]) -> Result<RamificationProfile> {
    let e = split_prime_sextic_e();
    let entries = support
        .iter()
        .map(|p| RamifiedPrime { label: p.to_string(), e, class_trivial: true })
        .collect();
    RamificationProfile::new(entries, A4_SEXTIC_CONTEXT)
}

/// Weighted `A4` counts below each grid point. `gamma_max = None` skips
/// the `γ` buckets; requesting them needs a class-number-one base.
pub fn a4_grid(base: &CubicBase, grid: &[u64], gamma_max: Option<usize>) -> Result<GridCounts> {
    let x_max = check_grid(grid)?;
    check_x(x_max)?;
    if gamma_max.is_some() && !base.class_number_one {
        return Err(Error::Unsupported(format!(
            "γ buckets need a class-number-one base; conductor {} is not in the table",
            base.conductor
        )));
    }
    let gm = gamma_max.unwrap_or(0);
    let sieve = SquarefreeSieve::new(n_below(x_max));
    let mut acc = sieve.par_fold(
        || GridCounts::empty(grid, gm, false),
        |acc, n, support| {
            if n == 1 || !support.iter().all(|&p| admissible(base, p)) {
                return;
            }
            let Some(bin) = bin_index(grid, n * n) else { return };
            let w = 3u64.pow(support.len() as u32);
            acc.total[bin] += w;
            acc.by_omega[support.len().min(MAX_RANK_BUCKET + 1)][bin] += w;
            if gamma_max.is_some() && support.len() <= gm {
                acc.by_gamma[support.len()][bin] += w;
            }
        },
        GridCounts::merge,
    );
    acc.cumulate();
    Ok(acc)
}

/// Totals (and `γ` buckets when requested) at a single `X`.
pub fn count_a4(base: &CubicBase, x: u64, gamma_max: Option<usize>) -> Result<GridCounts> {
    if x < 2 {
        return Ok(GridCounts::empty(&[x], gamma_max.unwrap_or(0), false));
    }
    a4_grid(base, &[x], gamma_max)
}
