//! Field families ordered by the product of ramified primes `C`: quadratic,
//! cyclic cubic and `C2 x C2` fields over `Q`, and `A4`-extensions over a
//! fixed cyclic cubic field, with the exactly-`γ` subfamily counts.
//!
//! Families over `Q` are counted per squarefree support with an explicit
//! number of fields for each support; grid counts come from one pass over
//! the squarefree integers below the largest grid point.

mod a4;
mod abelian;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use a4::{
    a4_grid, a4_records, classify_prime, count_a4, cubic_base, sextic_profile, CubicBase, PrimeSplitting, A4_SEXTIC_CONTEXT,
    MAX_A4_X,
};
pub use abelian::{
    abelian_grid, beta, count_abelian, enumerate_quadratic, AbelianGroup, MAX_ABELIAN_X, MAX_RANK_BUCKET,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    Quadratic,
    C3,
    C2xC2,
    A4,
}

impl std::str::FromStr for FamilyTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quadratic" | "c2" => Ok(FamilyTag::Quadratic),
            "c3" | "cubic" => Ok(FamilyTag::C3),
            "c2xc2" | "klein" | "v4" => Ok(FamilyTag::C2xC2),
            "a4" => Ok(FamilyTag::A4),
            _ => Err(Error::Domain(format!("unknown family {s:?}"))),
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyTag::Quadratic => "quadratic",
            FamilyTag::C3 => "c3",
            FamilyTag::C2xC2 => "c2xc2",
            FamilyTag::A4 => "a4",
        })
    }
}

/// 2-rank information carried by a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankData {
    pub value: i64,
    /// `value` is the 2-rank itself rather than a lower bound.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub family: FamilyTag,
    /// Ramified primes, ascending.
    pub support: Vec<u64>,
    pub c: u64,
    pub gamma: u32,
    pub rank: Option<RankData>,
    /// Number of fields sharing this record.
    pub weight: u64,
    pub disc: Option<i64>,
}

/// Which ramified primes are marked when computing `γ`: tame primes
/// (`p ∤ |G|`), optionally restricted to residue classes mod `modulus`
/// and to inertia orders divisible by `p0^l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaRule {
    pub modulus: u64,
    /// Allowed residues mod `modulus`; ignored when `modulus <= 1`.
    pub residues: Vec<u64>,
    /// `(p0, l)`: mark only primes whose inertia order is divisible by `p0^l`.
    pub omega: Option<(u64, u32)>,
}

impl Default for GammaRule {
    fn default() -> Self {
        GammaRule { modulus: 1, residues: Vec::new(), omega: None }
    }
}

impl GammaRule {
    pub fn in_class(&self, p: u64) -> bool {
        self.modulus <= 1 || self.residues.contains(&(p % self.modulus))
    }

    fn marks(&self, p: u64, group_order: u64, inertia_order: u64) -> bool {
        if group_order % p == 0 || !self.in_class(p) {
            return false;
        }
        match self.omega {
            Some((q, l)) => q.checked_pow(l).is_some_and(|m| inertia_order % m == 0),
            None => true,
        }
    }

    pub fn gamma(&self, support: &[u64], group: AbelianGroup) -> u32 {
        support
            .iter()
            .filter(|&&p| self.marks(p, group.order(), group.inertia_order()))
            .count() as u32
    }
}

/// Imaginary quadratic statistics on a grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImaginaryStats {
    pub total: Vec<u64>,
    /// `Σ 2^{rk_2 Cl}` = `Σ |Hom(Cl, C2)|`.
    pub moment_c2: Vec<u64>,
    /// `by_rank[r][i]`: fields with `rk_2 = r` (last bucket collects larger ranks).
    pub by_rank: Vec<Vec<u64>>,
}

/// Weighted counts of fields with `C < X` for each grid point `X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCounts {
    pub grid: Vec<u64>,
    pub total: Vec<u64>,
    /// `by_gamma[γ][i]` for `γ <= gamma_max`.
    pub by_gamma: Vec<Vec<u64>>,
    /// `by_omega[k][i]`: fields with `k` ramified primes (last bucket collects more).
    pub by_omega: Vec<Vec<u64>>,
    pub imaginary: Option<ImaginaryStats>,
}

impl GridCounts {
    pub(crate) fn empty(grid: &[u64], gamma_max: usize, with_imag: bool) -> Self {
        let n = grid.len();
        GridCounts {
            grid: grid.to_vec(),
            total: vec![0; n],
            by_gamma: vec![vec![0; n]; gamma_max + 1],
            by_omega: vec![vec![0; n]; MAX_RANK_BUCKET + 2],
            imaginary: with_imag.then(|| ImaginaryStats {
                total: vec![0; n],
                moment_c2: vec![0; n],
                by_rank: vec![vec![0; n]; MAX_RANK_BUCKET + 1],
            }),
        }
    }

    pub(crate) fn merge(mut self, other: Self) -> Self {
        fn add(a: &mut [u64], b: &[u64]) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        add(&mut self.total, &other.total);
        for (a, b) in self.by_gamma.iter_mut().zip(&other.by_gamma) {
            add(a, b);
        }
        for (a, b) in self.by_omega.iter_mut().zip(&other.by_omega) {
            add(a, b);
        }
        if let (Some(a), Some(b)) = (self.imaginary.as_mut(), other.imaginary.as_ref()) {
            add(&mut a.total, &b.total);
            add(&mut a.moment_c2, &b.moment_c2);
            for (x, y) in a.by_rank.iter_mut().zip(&b.by_rank) {
                add(x, y);
            }
        }
        self
    }

    /// Turn per-bin counts into counts below each grid point.
    pub(crate) fn cumulate(&mut self) {
        fn prefix(v: &mut [u64]) {
            for i in 1..v.len() {
                v[i] += v[i - 1];
            }
        }
        prefix(&mut self.total);
        self.by_gamma.iter_mut().for_each(|v| prefix(v));
        self.by_omega.iter_mut().for_each(|v| prefix(v));
        if let Some(im) = self.imaginary.as_mut() {
            prefix(&mut im.total);
            prefix(&mut im.moment_c2);
            im.by_rank.iter_mut().for_each(|v| prefix(v));
        }
    }

    pub fn gamma_max(&self) -> usize {
        self.by_gamma.len() - 1
    }
}

/// Index of the first grid point strictly above `c`.
pub(crate) fn bin_index(grid: &[u64], c: u64) -> Option<usize> {
    let i = grid.partition_point(|&g| g <= c);
    (i < grid.len()).then_some(i)
}

/// Grids must be non-empty, strictly ascending and start at 2 or above.
pub(crate) fn check_grid(grid: &[u64]) -> Result<u64> {
    if grid.is_empty() || grid[0] < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!("grid must be strictly ascending from >= 2: {grid:?}")));
    }
    Ok(*grid.last().unwrap())
}

/// The ratios `N_γ(X)/N(X)` and whether they strictly decrease over the
/// grid points in the last three decades.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRatio {
    pub gamma: usize,
    pub ratios: Vec<f64>,
    /// First grid index of the three-decade window.
    pub window_start: usize,
    pub decreasing: bool,
}

pub fn hypothesis_ratio(counts: &GridCounts, gamma: usize) -> Result<HypothesisRatio> {
    if let Some(i) = counts.total.iter().position(|&n| n == 0) {
        return Err(Error::Domain(format!("empty family at X = {}", counts.grid[i])));
    }
    let ratios: Vec<f64> = (0..counts.grid.len())
        .map(|i| {
            let n_gamma = counts.by_gamma.get(gamma).map_or(0, |v| v[i]);
            n_gamma as f64 / counts.total[i] as f64
        })
        .collect();
    let x_last = *counts.grid.last().unwrap() as f64;
    let window_start = counts
        .grid
        .iter()
        .position(|&x| x as f64 >= x_last / 1000.0 * (1.0 - 1e-9))
        .unwrap_or(0);
    let window = &ratios[window_start..];
    let decreasing = window.len() >= 2 && window.windows(2).all(|w| w[1] < w[0]);
    Ok(HypothesisRatio { gamma, ratios, window_start, decreasing })
}
