use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use super::{bin_index, FamilyTag, FieldRecord, GammaRule, GridCounts, RankData};
use crate::arith::{totient, SquarefreeSieve};
use crate::error::{Error, Result};
use crate::finabelian::FiniteAbelianGroup;
use crate::quadforms::discriminants_with_radical;

/// Largest `X` accepted by the abelian counters.
pub const MAX_ABELIAN_X: u64 = 100_000_000;

/// Largest rank bucket kept for imaginary quadratic statistics.
pub const MAX_RANK_BUCKET: usize = 15;

/// `β = Σ_{g ≠ 1} 1/φ(ord g)` over `Q`.
pub fn beta(group: &FiniteAbelianGroup) -> Result<Ratio<i64>> {
    if group.order() > 64 {
        return Err(Error::Bounds(format!("|G| = {} exceeds 64", group.order())));
    }
    let orders = group.invariant_factors().to_vec();
    let mut sum = Ratio::from_integer(0);
    let mut x = vec![0u64; orders.len()];
    loop {
        let ord = x
            .iter()
            .zip(&orders)
            .map(|(&a, &n)| n / crate::arith::gcd(a, n))
            .fold(1, num_integer::lcm);
        if ord > 1 {
            sum += Ratio::new(1, totient(ord) as i64);
        }
        // odometer increment
        let mut i = 0;
        while i < x.len() {
            x[i] += 1;
            if x[i] < orders[i] {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == x.len() {
            break;
        }
    }
    Ok(sum)
}

/// The abelian Galois groups with an explicit count over `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AbelianGroup {
    C2,
    C3,
    C2xC2,
}

impl AbelianGroup {
    pub fn order(self) -> u64 {
        match self {
            AbelianGroup::C2 => 2,
            AbelianGroup::C3 => 3,
            AbelianGroup::C2xC2 => 4,
        }
    }

    /// Order of the (cyclic, tame) inertia group at a ramified prime.
    pub fn inertia_order(self) -> u64 {
        match self {
            AbelianGroup::C3 => 3,
            _ => 2,
        }
    }

    pub fn as_group(self) -> FiniteAbelianGroup {
        match self {
            AbelianGroup::C2 => FiniteAbelianGroup::cyclic(2),
            AbelianGroup::C3 => FiniteAbelianGroup::cyclic(3),
            AbelianGroup::C2xC2 => FiniteAbelianGroup::from_cyclic_list(&[2, 2]),
        }
    }

    pub fn tag(self) -> FamilyTag {
        match self {
            AbelianGroup::C2 => FamilyTag::Quadratic,
            AbelianGroup::C3 => FamilyTag::C3,
            AbelianGroup::C2xC2 => FamilyTag::C2xC2,
        }
    }

    /// Whether `p` can ramify in a `G`-extension of `Q`.
    pub fn admissible(self, p: u64, tame_only: bool) -> bool {
        if tame_only && self.order() % p == 0 {
            return false;
        }
        match self {
            AbelianGroup::C3 => p == 3 || p % 3 == 1,
            _ => true,
        }
    }

    /// Number of `G`-extensions of `Q` (up to isomorphism) whose ramified
    /// primes are exactly `support`; 0 if some prime is inadmissible.
    ///
    /// Each odd prime contributes a cyclic group of tame characters, and 2
    /// contributes `(Z/2)²` (characters of conductor 4 or 8) for 2-groups.
    /// Surjections onto `G` that are nontrivial at every prime are counted
    /// and divided by `|Aut G|`.
    pub fn fields_with_support(self, support: &[u64], tame_only: bool) -> u64 {
        if support.is_empty() || support.iter().any(|&p| !self.admissible(p, tame_only)) {
            return 0;
        }
        let k = support.len() as u32;
        let has_two = support.contains(&2);
        match self {
            AbelianGroup::C2 => {
                if has_two {
                    3
                } else {
                    1
                }
            }
            AbelianGroup::C3 => 1 << (k - 1),
            AbelianGroup::C2xC2 => {
                if has_two {
                    (15 * 3u64.pow(k - 1) - 9) / 6
                } else {
                    (3u64.pow(k) - 3) / 6
                }
            }
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AbelianGroup::C2 => "C2",
            AbelianGroup::C3 => "C3",
            AbelianGroup::C2xC2 => "C2xC2",
        })
    }
}

impl FromStr for AbelianGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(' ', "").as_str() {
            "c2" | "quadratic" => Ok(AbelianGroup::C2),
            "c3" | "cubic" => Ok(AbelianGroup::C3),
            "c2xc2" | "c2^2" | "v4" | "klein" => Ok(AbelianGroup::C2xC2),
            _ => Err(Error::Domain(format!("unsupported abelian group {s:?}"))),
        }
    }
}

fn check_x(x: u64) -> Result<()> {
    if x > MAX_ABELIAN_X {
        return Err(Error::Bounds(format!("X = {x} exceeds {MAX_ABELIAN_X}")));
    }
    Ok(())
}

fn quadratic_records(c: u64, support: &[u64], rule: &GammaRule) -> Vec<FieldRecord> {
    let gamma = rule.gamma(support, AbelianGroup::C2);
    discriminants_with_radical(c)
        .into_iter()
        .map(|d| {
            let omega = support.len() as i64;
            // real quadratic 2-ranks are left missing
            let rank = d.is_imaginary().then_some(RankData { value: omega - 1, exact: true });
            FieldRecord {
                family: FamilyTag::Quadratic,
                support: support.to_vec(),
                c,
                gamma,
                rank,
                weight: 1,
                disc: Some(d.value()),
            }
        })
        .collect()
}

/// Every quadratic field with `C = rad|disc| < X`, ascending in `C`, each
/// carrying its genus-theory 2-rank when imaginary.
pub fn enumerate_quadratic(x: u64, rule: &GammaRule) -> Result<impl Iterator<Item = FieldRecord> + '_> {
    check_x(x)?;
    let sieve = SquarefreeSieve::new(x.saturating_sub(1));
    let blocks = sieve.block_count();
    Ok((0..blocks).flat_map(move |b| {
        let block = sieve.block(b);
        block
            .iter()
            .flat_map(|(c, support)| quadratic_records(c, support, rule))
            .collect::<Vec<_>>()
    }))
}

/// Weighted counts of `G`-extensions with `C < X` at each grid point,
/// split by `γ`. For `C2` without `tame_only` the imaginary quadratic
/// statistics are filled in as well.
pub fn abelian_grid(
    group: AbelianGroup,
    grid: &[u64],
    tame_only: bool,
    rule: &GammaRule,
    gamma_max: usize,
) -> Result<GridCounts> {
    let x_max = super::check_grid(grid)?;
    check_x(x_max)?;
    let bins = grid.len();
    let with_imag = group == AbelianGroup::C2;
    let sieve = SquarefreeSieve::new(x_max - 1);
    let mut acc = sieve.par_fold(
        || GridCounts::empty(grid, gamma_max, with_imag),
        |acc, c, support| {
            let Some(bin) = bin_index(grid, c) else { return };
            let w = group.fields_with_support(support, tame_only);
            if w == 0 {
                return;
            }
            acc.total[bin] += w;
            let gamma = rule.gamma(support, group) as usize;
            if gamma <= gamma_max {
                acc.by_gamma[gamma][bin] += w;
            }
            acc.by_omega[support.len().min(MAX_RANK_BUCKET + 1)][bin] += w;
            if let Some(im) = acc.imaginary.as_mut() {
                let omega = support.len();
                let imag = if c % 2 == 1 {
                    u64::from(c % 4 == 3)
                } else {
                    1 + u64::from((c / 2) % 4 == 1)
                };
                // every imaginary field of this support has rk2 = ω - 1
                if imag > 0 {
                    let rk = omega - 1;
                    im.total[bin] += imag;
                    im.moment_c2[bin] += imag << rk;
                    im.by_rank[rk.min(MAX_RANK_BUCKET)][bin] += imag;
                }
            }
        },
        GridCounts::merge,
    );
    debug_assert_eq!(acc.total.len(), bins);
    acc.cumulate();
    Ok(acc)
}

/// Totals and `γ`-histogram at a single `X`.
pub fn count_abelian(
    group: AbelianGroup,
    x: u64,
    tame_only: bool,
    rule: &GammaRule,
    gamma_max: usize,
) -> Result<GridCounts> {
    if x < 2 {
        return Ok(GridCounts::empty(&[x], gamma_max, group == AbelianGroup::C2));
    }
    abelian_grid(group, &[x], tame_only, rule, gamma_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadforms::{is_fundamental, QuadDisc};

    #[test]
    fn beta_examples() {
        let b = |l: &[u64]| beta(&FiniteAbelianGroup::from_cyclic_list(l)).unwrap();
        assert_eq!(b(&[2]), Ratio::from_integer(1));
        assert_eq!(b(&[2, 2]), Ratio::from_integer(3));
        assert_eq!(b(&[3]), Ratio::from_integer(1));
        assert_eq!(b(&[4]), Ratio::from_integer(2));
        assert!(beta(&FiniteAbelianGroup::cyclic(65)).is_err());
    }

    #[test]
    fn quadratic_examples() {
        let rule = GammaRule::default();
        let discs = |x| enumerate_quadratic(x, &rule).unwrap().map(|r| r.disc.unwrap()).collect::<Vec<_>>();
        assert_eq!(discs(3), vec![-4, -8, 8]);
        assert_eq!(discs(4), vec![-4, -8, 8, -3]);
        assert!(discs(2).is_empty());
        // brute-force oracle over |disc| <= 200: the only fundamental
        // discriminants with radical 2 are -4, -8, 8
        let two_only: Vec<i64> = (-200..=200).filter(|&d| is_fundamental(d) && QuadDisc::new(d).unwrap().ramified_product() == 2).collect();
        assert_eq!(two_only, vec![-8, -4, 8]);
    }

    #[test]
    fn quadratic_ordering_matches_discriminants() {
        // C = rad|d| ordering reproduces every fundamental discriminant once
        let rule = GammaRule::default();
        let recs: Vec<FieldRecord> = enumerate_quadratic(1000, &rule).unwrap().collect();
        let mut got: Vec<i64> = recs.iter().map(|r| r.disc.unwrap()).collect();
        got.sort();
        let mut want: Vec<i64> = (-8000i64..=8000)
            .filter(|&d| is_fundamental(d) && QuadDisc::new(d).unwrap().ramified_product() < 1000)
            .collect();
        want.sort();
        assert_eq!(got, want);
        for r in &recs {
            let d = QuadDisc::new(r.disc.unwrap()).unwrap();
            if d.is_imaginary() && d.value() > -3000 {
                let cl = crate::quadforms::class_group(d).unwrap();
                assert_eq!(r.rank.unwrap().value, cl.rank_p(2).unwrap() as i64);
            }
        }
    }

    #[test]
    fn support_weights() {
        assert_eq!(AbelianGroup::C3.fields_with_support(&[7, 13], true), 2);
        assert_eq!(AbelianGroup::C3.fields_with_support(&[5], true), 0);
        assert_eq!(AbelianGroup::C3.fields_with_support(&[3, 7], true), 0);
        assert_eq!(AbelianGroup::C3.fields_with_support(&[3, 7], false), 2);
        assert_eq!(AbelianGroup::C2xC2.fields_with_support(&[5], true), 0);
        assert_eq!(AbelianGroup::C2xC2.fields_with_support(&[3, 5], true), 1);
        assert_eq!(AbelianGroup::C2xC2.fields_with_support(&[2], false), 1);
        assert!("S3".parse::<AbelianGroup>().is_err());
    }

    /// Nonzero vectors of F_2^k spanning 2-dimensional subspaces whose
    /// coordinates are all used: the C2 x C2 fields with support of size k.
    fn klein_oracle(k: u32) -> u64 {
        let n = 1u32 << k;
        let full = n - 1;
        let mut planes = std::collections::BTreeSet::new();
        for a in 1..n {
            for b in 1..n {
                if a != b && (a | b | (a ^ b)) == full {
                    let mut pl = [a, b, a ^ b];
                    pl.sort();
                    planes.insert(pl);
                }
            }
        }
        planes.len() as u64
    }

    #[test]
    fn klein_weight_matches_subspace_count() {
        let odd = [3u64, 5, 7, 11, 13, 17, 19];
        for k in 1..=7 {
            assert_eq!(AbelianGroup::C2xC2.fields_with_support(&odd[..k], true), klein_oracle(k as u32), "k = {k}");
        }
        // with 2 ramified: 2 adds a two-dimensional local space
        for k in 0..=5usize {
            let mut s = vec![2u64];
            s.extend_from_slice(&odd[..k]);
            let n = 1u32 << (k + 2);
            let mut planes = std::collections::BTreeSet::new();
            for a in 1..n {
                for b in 1..n {
                    let c = a ^ b;
                    let used = a | b | c;
                    let odd_ok = (used >> 2) == (1 << k) - 1;
                    if a != b && odd_ok && used & 3 != 0 {
                        let mut pl = [a, b, c];
                        pl.sort();
                        planes.insert(pl);
                    }
                }
            }
            assert_eq!(AbelianGroup::C2xC2.fields_with_support(&s, false), planes.len() as u64);
        }
    }

    #[test]
    fn cubic_weight_matches_character_pairs() {
        // cubic characters with exact support S: each prime has 2 nontrivial
        // local characters; a field is a pair {χ, χ²}
        for k in 1..=6u32 {
            let chars = 2u64.pow(k);
            assert_eq!(AbelianGroup::C3.fields_with_support(&[7, 13, 19, 31, 37, 43][..k as usize], true), chars / 2);
        }
    }

    #[test]
    fn tame_c2_matches_odd_quadratic_support() {
        let rule = GammaRule::default();
        let x = 5000;
        let odd = enumerate_quadratic(x, &rule).unwrap().filter(|r| r.c % 2 == 1).count() as u64;
        let counts = count_abelian(AbelianGroup::C2, x, true, &rule, 8).unwrap();
        assert_eq!(counts.total[0], odd);
    }

    #[test]
    fn grid_matches_records() {
        let rule = GammaRule::default();
        let grid = [10, 100, 1000, 3000];
        let g = abelian_grid(AbelianGroup::C2, &grid, false, &rule, 6).unwrap();
        let recs: Vec<FieldRecord> = enumerate_quadratic(3000, &rule).unwrap().collect();
        for (i, &x) in grid.iter().enumerate() {
            let below: Vec<&FieldRecord> = recs.iter().filter(|r| r.c < x).collect();
            assert_eq!(g.total[i], below.len() as u64);
            for gamma in 0..=6 {
                assert_eq!(g.by_gamma[gamma][i], below.iter().filter(|r| r.gamma as usize == gamma).count() as u64);
            }
            let im = g.imaginary.as_ref().unwrap();
            let imag: Vec<&&FieldRecord> = below.iter().filter(|r| r.disc.unwrap() < 0).collect();
            assert_eq!(im.total[i], imag.len() as u64);
            assert_eq!(im.moment_c2[i], imag.iter().map(|r| 1u64 << r.rank.unwrap().value).sum::<u64>());
            for k in 1..6 {
                assert_eq!(g.by_omega[k][i], below.iter().filter(|r| r.support.len() == k).count() as u64);
            }
            assert!(below.iter().all(|r| r.rank.is_some() == (r.disc.unwrap() < 0)));
        }
    }
}
