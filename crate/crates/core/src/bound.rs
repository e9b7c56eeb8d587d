//! Lower bounds on `p`-ranks of class groups from ramification data.
//!
//! For `L/K` with Galois closure `N` and group `G`, the invariant ideals
//! modulo ideals of `K` form `∏ Z/e(𝔭)`, whose `p^{l-1}`-th power subgroup
//! has `p`-rank equal to the number of primes with `p^l | e(𝔭)`. The
//! principal invariant ideals cost at most a constant `c`.

use serde::{Deserialize, Serialize};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};
use crate::finabelian::FiniteAbelianGroup;
use crate::quadforms::QuadDisc;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamifiedPrime {
    pub label: String,
    pub e: u64,
    /// The prime of `K` below is principal.
    pub class_trivial: bool,
}

/// Signature and degree data of the Galois closure `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundContext {
    pub r1: u64,
    pub r2: u64,
    pub group_order: u64,
    pub rk_p_cl_k: u64,
    pub degree: u64,
}

impl BoundContext {
    pub fn validate(&self) -> Result<()> {
        if self.r1 + 2 * self.r2 != self.degree {
            return Err(Error::Structure(format!(
                "r1 + 2 r2 = {} but [N:Q] = {}",
                self.r1 + 2 * self.r2,
                self.degree
            )));
        }
        if self.group_order == 0 || self.degree % self.group_order != 0 {
            return Err(Error::Structure(format!(
                "|G| = {} does not divide [N:Q] = {}",
                self.group_order, self.degree
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationProfile {
    pub entries: Vec<RamifiedPrime>,
    pub context: BoundContext,
}

/// The two forms of the constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantC {
    /// `rk_p Cl_K + (r1 + r2)|G|`.
    pub sharp: i64,
    /// `rk_p Cl_K + [N:Q]²`.
    pub coarse: i64,
}

fn check_pl(p: u64, l: u32) -> Result<()> {
    if !is_prime_u64(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if l == 0 {
        return Err(Error::Domain("l must be at least 1".into()));
    }
    Ok(())
}

fn divisible(e: u64, p: u64, l: u32) -> bool {
    match p.checked_pow(l) {
        Some(q) => e % q == 0,
        None => false,
    }
}

impl RamificationProfile {
    pub fn new(entries: Vec<RamifiedPrime>, context: BoundContext) -> Result<Self> {
        context.validate()?;
        if let Some(bad) = entries.iter().find(|x| x.e == 0) {
            return Err(Error::Domain(format!("prime {} has e = 0", bad.label)));
        }
        Ok(RamificationProfile { entries, context })
    }

    /// Profile with unlabeled, class-trivial entries.
    pub fn from_e_list(es: &[u64], context: BoundContext) -> Result<Self> {
        let entries = es
            .iter()
            .enumerate()
            .map(|(i, &e)| RamifiedPrime {
                label: format!("p{}", i + 1),
                e,
                class_trivial: true,
            })
            .collect();
        Self::new(entries, context)
    }

    /// `Q(√d)` over `Q` for `d < 0`: every ramified prime has `e = 2`.
    pub fn imaginary_quadratic(d: QuadDisc) -> Result<Self> {
        if !d.is_imaginary() {
            return Err(Error::Domain(format!("{d} is not negative")));
        }
        let entries = d
            .factorization()
            .primes()
            .map(|p| RamifiedPrime {
                label: p.to_string(),
                e: 2,
                class_trivial: true,
            })
            .collect();
        Self::new(entries, IMAGINARY_QUADRATIC)
    }

    pub fn e_values(&self) -> Vec<u64> {
        self.entries.iter().map(|x| x.e).collect()
    }

    /// `∏ Z/e(𝔭)`.
    pub fn invariant_quotient(&self) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_cyclic_list(&self.e_values())
    }

    /// `#{𝔭 : p^l | e(𝔭)}`.
    pub fn count_divisible(&self, p: u64, l: u32) -> Result<u64> {
        check_pl(p, l)?;
        Ok(self.entries.iter().filter(|x| divisible(x.e, p, l)).count() as u64)
    }

    pub fn constant_c(&self) -> Result<ConstantC> {
        let c = &self.context;
        c.validate()?;
        Ok(ConstantC {
            sharp: (c.rk_p_cl_k + (c.r1 + c.r2) * c.group_order) as i64,
            coarse: (c.rk_p_cl_k + c.degree * c.degree) as i64,
        })
    }

    /// `count_divisible - c` with the sharp constant; may be negative.
    pub fn rank_lower_bound(&self, p: u64, l: u32) -> Result<i64> {
        Ok(self.count_divisible(p, l)? as i64 - self.constant_c()?.sharp)
    }

    /// As [`Self::rank_lower_bound`], counting only primes whose class in
    /// `Cl_K` is trivial.
    pub fn relative_rank_lower_bound(&self, p: u64, l: u32) -> Result<i64> {
        check_pl(p, l)?;
        let n = self
            .entries
            .iter()
            .filter(|x| x.class_trivial && divisible(x.e, p, l))
            .count() as i64;
        Ok(n - self.constant_c()?.sharp)
    }
}

/// Context for an imaginary quadratic field over `Q`.
pub const IMAGINARY_QUADRATIC: BoundContext = BoundContext {
    r1: 0,
    r2: 1,
    group_order: 2,
    rk_p_cl_k: 0,
    degree: 2,
};

/// Context for a real quadratic field over `Q`.
pub const REAL_QUADRATIC: BoundContext = BoundContext {
    r1: 2,
    r2: 0,
    group_order: 2,
    rk_p_cl_k: 0,
    degree: 2,
};

/// Outcome of comparing [`RamificationProfile::rank_lower_bound`] with
/// the exact 2-rank over imaginary quadratic fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoundnessSummary {
    pub checked: u64,
    /// Discriminants where the bound exceeds the 2-rank.
    pub violations: Vec<i64>,
    /// Largest bound seen and the 2-rank at that discriminant.
    pub tightest: Option<(i64, i64, u32)>,
}

/// Check `rank_lower_bound(profile(d), 2, l) <= rk_2 Cl(d)` for every
/// fundamental `d` in `[-limit, -3]`, with `rk_2` counted from ambiguous
/// forms.
pub fn imaginary_soundness(limit: u64, l: u32) -> Result<SoundnessSummary> {
    use rayon::prelude::*;
    check_pl(2, l)?;
    if limit > crate::quadforms::MAX_CLASS_GROUP_DISC {
        return Err(Error::Bounds(format!("limit {limit} exceeds {}", crate::quadforms::MAX_CLASS_GROUP_DISC)));
    }
    let rows: Vec<(i64, i64, u32)> = (3..=limit as i64)
        .into_par_iter()
        .filter(|&n| crate::quadforms::is_fundamental(-n))
        .map(|n| {
            let d = QuadDisc::new(-n)?;
            let bound = RamificationProfile::imaginary_quadratic(d)?.rank_lower_bound(2, l)?;
            Ok((-n, bound, crate::quadforms::two_rank(d)?))
        })
        .collect::<Result<_>>()?;
    let violations = rows.iter().filter(|r| r.1 > r.2 as i64).map(|r| r.0).collect();
    // first maximum in ascending |d|
    let tightest = rows.iter().copied().reduce(|a, b| if b.1 > a.1 { b } else { a });
    Ok(SoundnessSummary { checked: rows.len() as u64, violations, tightest })
}
