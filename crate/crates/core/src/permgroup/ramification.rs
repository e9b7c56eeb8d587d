use std::fmt;

use super::group::PermGroup;
use crate::arith::gcd;
use crate::error::{Error, Result};

/// Local Galois data at a prime: decomposition group `D` and inertia group
/// `I` inside `G`.
#[derive(Clone, Debug)]
pub struct RamificationLocal {
    group: PermGroup,
    decomposition: PermGroup,
    inertia: PermGroup,
}

impl RamificationLocal {
    /// Requires `I <= D <= G` and `I` cyclic (tame data).
    pub fn new(group: PermGroup, decomposition: PermGroup, inertia: PermGroup) -> Result<Self> {
        if !decomposition.is_subgroup_of(&group) {
            return Err(Error::Structure("decomposition group is not in G".into()));
        }
        if !inertia.is_subgroup_of(&decomposition) {
            return Err(Error::Structure("inertia group is not in D".into()));
        }
        if !inertia.is_cyclic() {
            return Err(Error::Unsupported("non-cyclic (wild) inertia".into()));
        }
        Ok(RamificationLocal {
            group,
            decomposition,
            inertia,
        })
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn decomposition(&self) -> &PermGroup {
        &self.decomposition
    }

    pub fn inertia(&self) -> &PermGroup {
        &self.inertia
    }

    /// Factorization shape of the prime in the fixed field of `h`: one
    /// `(e, f)` per double coset `D g H`, with `e = [I : I ∩ gHg⁻¹]` and
    /// `e·f = |DgH| / |H|`.
    pub fn splitting_type(&self, h: &PermGroup) -> Result<SplittingType> {
        if !self.inertia.is_normal_in(&self.decomposition) {
            return Err(Error::Structure("inertia is not normal in decomposition".into()));
        }
        if !h.is_subgroup_of(&self.group) {
            return Err(Error::Structure("H is not a subgroup of G".into()));
        }
        let g = &self.group;
        let mut pairs = Vec::new();
        for coset in g.double_cosets(&self.decomposition, h) {
            let rep = g.elements()[coset[0]];
            let conj = h.conjugate_subgroup(&rep);
            let e = self.inertia.order() / self.inertia.intersection_order(&conj);
            let ef = coset.len() / h.order();
            if ef % e != 0 {
                return Err(Error::Consistency(format!(
                    "e = {e} does not divide e·f = {ef}"
                )));
            }
            pairs.push((e as u64, (ef / e) as u64));
        }
        let sum: u64 = pairs.iter().map(|&(e, f)| e * f).sum();
        if sum as usize * h.order() != g.order() {
            return Err(Error::Consistency(format!(
                "Σ e·f = {sum} but [G:H] = {}",
                g.order() / h.order()
            )));
        }
        pairs.sort_unstable();
        Ok(SplittingType::new(pairs))
    }
}

/// Multiset of `(e, f)` pairs for the primes above a rational prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingType {
    pairs: Vec<(u64, u64)>,
    e_gcd: u64,
}

impl SplittingType {
    pub fn new(mut pairs: Vec<(u64, u64)>) -> Self {
        pairs.sort_unstable();
        let e_gcd = pairs.iter().fold(0, |a, &(e, _)| gcd(a, e));
        SplittingType { pairs, e_gcd }
    }

    /// `(e, f)` pairs sorted by `e`, then `f`.
    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    /// gcd of the ramification indices.
    pub fn e_gcd(&self) -> u64 {
        self.e_gcd
    }

    pub fn degree(&self) -> u64 {
        self.pairs.iter().map(|&(e, f)| e * f).sum()
    }
}

impl fmt::Display for SplittingType {
    /// Written `(f_1^{e_1} ... f_k^{e_k})` with `^1` omitted, e.g.
    /// `(1 1 1^2 1^2)`. Unramified shapes are written without separators,
    /// as in `(111)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.pairs.iter().all(|&(e, _)| e == 1) { "" } else { " " };
        let parts: Vec<String> = self
            .pairs
            .iter()
            .map(|&(e, deg)| if e == 1 { format!("{deg}") } else { format!("{deg}^{e}") })
            .collect();
        write!(f, "({})", parts.join(sep))
    }
}
