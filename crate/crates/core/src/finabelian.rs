//! Finite abelian groups in invariant-factor form.
//!
//! A group is stored as its invariant factors `d_1 | d_2 | ... | d_k` with
//! every `d_i >= 2`; the empty list is the trivial group. The form is
//! canonical, so structural equality is `==`.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{factorize_u64, gcd, is_prime_u64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<u64>,
}

/// `|Hom(A, B)|`, saturated at `u64::MAX` on overflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomCount {
    pub count: u64,
    pub saturated: bool,
}

/// Diagonal of the Smith normal form of an integer matrix (entries are
/// non-negative, each dividing the next; zeros trail).
pub fn smith_diagonal(matrix: &[Vec<i64>]) -> Vec<i128> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<i128>> = matrix
        .iter()
        .map(|r| {
            assert_eq!(r.len(), cols, "ragged relation matrix");
            r.iter().map(|&x| x as i128).collect()
        })
        .collect();
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| m[i][j] != 0)
                .min_by_key(|&(i, j)| m[i][j].abs());
            let Some((pi, pj)) = pivot else {
                break;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] -= q * m[t][j];
                    }
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| m[i][j] % p != 0);
            match offender {
                Some((i, _)) => {
                    for j in t..cols {
                        let v = m[i][j];
                        m[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
    }
    diag
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_cyclic_list(&[n])
    }

    /// Invariant-factor form of `∏ Z/orders_i`, via Smith normal form of the
    /// diagonal relation matrix. Orders equal to 1 vanish.
    ///
    /// Panics if the largest invariant factor (the lcm of the orders)
    /// does not fit in a `u64`.
    pub fn from_cyclic_list(orders: &[u64]) -> Self {
        assert!(orders.iter().all(|&o| o >= 1), "cyclic orders must be >= 1");
        let n = orders.len();
        let matrix: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { orders[i] as i64 } else { 0 })
                    .collect()
            })
            .collect();
        Self::from_relations(&matrix, n).expect("invariant factors of a cyclic list fit in u64")
    }

    /// The group `Z^generators / (row span of relations)`; errors when the
    /// quotient is infinite.
    pub fn from_relations(relations: &[Vec<i64>], generators: usize) -> Result<Self> {
        if generators == 0 {
            return Ok(Self::trivial());
        }
        let diag = smith_diagonal(relations);
        if diag.len() < generators || diag.iter().any(|&d| d == 0) {
            return Err(Error::Structure(
                "relations do not present a finite group".into(),
            ));
        }
        let factors = diag
            .into_iter()
            .filter(|&d| d != 1)
            .map(|d| u64::try_from(d).map_err(|_| Error::Bounds("invariant factor overflows u64".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteAbelianGroup {
            invariant_factors: factors,
        })
    }

    /// Build from explicit invariant factors, checking the divisibility
    /// chain.
    pub fn from_invariant_factors(factors: &[u64]) -> Result<Self> {
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::Structure("invariant factors must be >= 2".into()));
        }
        if factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Structure(format!(
                "{factors:?} is not a divisibility chain"
            )));
        }
        Ok(FiniteAbelianGroup {
            invariant_factors: factors.to_vec(),
        })
    }

    /// Recover the structure of an abelian group from the multiset of its
    /// element orders, using `|A[p^k]| = #{x : ord(x) | p^k}`.
    pub fn from_element_orders(orders: &[u64]) -> Result<Self> {
        let n = orders.len() as u64;
        if n == 0 {
            return Err(Error::Structure("a group has at least one element".into()));
        }
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &(p, e) in factorize_u64(n).factors() {
            // a[k] = log_p |A[p^k]|
            let mut logs = vec![0u32];
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                let torsion = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
                let log = ilog_exact(torsion, p).ok_or_else(|| {
                    Error::Structure(format!("|A[{pk}]| = {torsion} is not a power of {p}"))
                })?;
                logs.push(log);
            }
            if *logs.last().unwrap() != e {
                return Err(Error::Structure(format!(
                    "Sylow {p}-subgroup has wrong order"
                )));
            }
            // conjugate partition: number of cyclic factors of order >= p^k
            let conj: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
            if conj.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::Structure("element orders are not those of an abelian group".into()));
            }
            let parts = conj.first().copied().unwrap_or(0) as usize;
            let exps: Vec<u32> = (0..parts)
                .map(|i| conj.iter().filter(|&&c| c as usize > i).count() as u32)
                .collect();
            by_prime.insert(p, exps);
        }
        let width = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; width];
        for (p, exps) in by_prime {
            // exps is descending; the largest powers go to the last factors
            for (i, e) in exps.into_iter().enumerate() {
                factors[width - 1 - i] *= p.pow(e);
            }
        }
        factors.retain(|&d| d > 1);
        Self::from_invariant_factors(&factors)
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    /// `rk_p A = dim_{F_p} A/pA`: the number of invariant factors divisible
    /// by `p`.
    pub fn rank_p(&self, p: u64) -> Result<usize> {
        if !is_prime_u64(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        Ok(self.invariant_factors.iter().filter(|&&d| d % p == 0).count())
    }

    /// The subgroup `kA`.
    pub fn power_subgroup(&self, k: u64) -> Self {
        assert!(k >= 1, "power_subgroup needs k >= 1");
        let orders: Vec<u64> = self
            .invariant_factors
            .iter()
            .map(|&d| d / gcd(d, k))
            .collect();
        Self::from_cyclic_list(&orders)
    }

    /// `A / ⟨generators⟩`, each generator given by coordinates in the
    /// invariant-factor basis.
    pub fn quotient(&self, generators: &[Vec<i64>]) -> Self {
        let k = self.invariant_factors.len();
        let mut rel: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { self.invariant_factors[i] as i64 } else { 0 })
                    .collect()
            })
            .collect();
        for g in generators {
            assert_eq!(g.len(), k, "generator has wrong length");
            rel.push(g.clone());
        }
        Self::from_relations(&rel, k).expect("quotient of a finite group is finite")
    }

    /// `|Hom(self, other)| = ∏_{i,j} gcd(d_i, d'_j)`.
    pub fn hom_count(&self, other: &Self) -> HomCount {
        let mut count = 1u64;
        let mut saturated = false;
        for &a in &self.invariant_factors {
            for &b in &other.invariant_factors {
                match count.checked_mul(gcd(a, b)) {
                    Some(c) => count = c,
                    None => {
                        count = u64::MAX;
                        saturated = true;
                    }
                }
            }
        }
        HomCount { count, saturated }
    }

    /// Direct product.
    pub fn product(&self, other: &Self) -> Self {
        let mut all = self.invariant_factors.clone();
        all.extend_from_slice(&other.invariant_factors);
        Self::from_cyclic_list(&all)
    }
}

fn ilog_exact(mut n: u64, p: u64) -> Option<u32> {
    let mut k = 0;
    while n > 1 {
        if n % p != 0 {
            return None;
        }
        n /= p;
        k += 1;
    }
    (n == 1).then_some(k)
}

impl fmt::Display for FiniteAbelianGroup {
    /// `C2 x C2 x C12`; the trivial group prints as `C1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "C1");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("C{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl std::str::FromStr for FiniteAbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut orders = Vec::new();
        for part in s.split('x') {
            let part = part.trim();
            let n = part
                .strip_prefix('C')
                .and_then(|d| d.parse::<u64>().ok())
                .filter(|&d| d >= 1)
                .ok_or_else(|| Error::Config(format!("bad cyclic factor {part:?}")))?;
            orders.push(n);
        }
        Ok(Self::from_cyclic_list(&orders))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Elements of ∏ Z/n_i as coordinate vectors.
    fn elements(orders: &[u64]) -> Vec<Vec<u64>> {
        orders.iter().fold(vec![vec![]], |acc, &n| {
            acc.into_iter()
                .flat_map(|v| {
                    (0..n).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect()
        })
    }

    fn order_of(x: &[u64], orders: &[u64]) -> u64 {
        x.iter()
            .zip(orders)
            .map(|(&c, &n)| n / gcd(c, n))
            .fold(1, |a, b| a / gcd(a, b) * b)
    }

    /// Structure by brute force: element orders of the explicit product.
    fn brute_structure(orders: &[u64]) -> FiniteAbelianGroup {
        let ords: Vec<u64> = elements(orders).iter().map(|x| order_of(x, orders)).collect();
        FiniteAbelianGroup::from_element_orders(&ords).unwrap()
    }

    #[test]
    fn cyclic_list_examples() {
        let g = FiniteAbelianGroup::from_cyclic_list(&[2, 4, 6]);
        assert_eq!(g.invariant_factors(), &[2, 2, 12]);
        assert_eq!(g, brute_structure(&[2, 4, 6]));
        assert_eq!(elements(&[2, 4, 6]).len(), 48);
        assert!(FiniteAbelianGroup::from_cyclic_list(&[1, 1]).is_trivial());
        assert_eq!(FiniteAbelianGroup::from_cyclic_list(&[5]).invariant_factors(), &[5]);
    }

    #[test]
    fn rank_examples() {
        let g = FiniteAbelianGroup::from_cyclic_list(&[2, 2, 12]);
        assert_eq!(g.rank_p(2).unwrap(), 3);
        assert_eq!(g.rank_p(3).unwrap(), 1);
        assert_eq!(FiniteAbelianGroup::trivial().rank_p(7).unwrap(), 0);
        assert!(matches!(g.rank_p(4), Err(Error::Domain(_))));
    }

    #[test]
    fn power_subgroup_examples() {
        let c8 = FiniteAbelianGroup::cyclic(8);
        assert_eq!(c8.power_subgroup(2).invariant_factors(), &[4]);
        let g = FiniteAbelianGroup::from_cyclic_list(&[2, 8]).power_subgroup(2);
        assert_eq!(g.invariant_factors(), &[4]);
        assert_eq!(g.rank_p(2).unwrap(), 1);

        let a = FiniteAbelianGroup::from_cyclic_list(&[2, 2, 12]);
        let four_a = a.power_subgroup(4);
        assert_eq!(four_a.invariant_factors(), &[3]);
        // brute-force image of multiplication by 4
        let orders = [2u64, 2, 12];
        let mut image: Vec<Vec<u64>> = elements(&orders)
            .iter()
            .map(|x| x.iter().zip(&orders).map(|(&c, &n)| 4 * c % n).collect())
            .collect();
        image.sort();
        image.dedup();
        let ords: Vec<u64> = image.iter().map(|x| order_of(x, &orders)).collect();
        assert_eq!(FiniteAbelianGroup::from_element_orders(&ords).unwrap(), four_a);
    }

    #[test]
    fn hom_count_examples() {
        let a = FiniteAbelianGroup::from_cyclic_list(&[6, 4]);
        assert_eq!(a.hom_count(&FiniteAbelianGroup::cyclic(2)).count, 4);
        assert_eq!(
            FiniteAbelianGroup::trivial().hom_count(&FiniteAbelianGroup::cyclic(9)).count,
            1
        );
        let a = FiniteAbelianGroup::from_cyclic_list(&[2, 2, 12]);
        let b = FiniteAbelianGroup::from_cyclic_list(&[2, 2]);
        assert_eq!(a.hom_count(&b).count, 64);
        // brute force: a hom is fixed by images of the three generators,
        // subject to ord(image) | ord(generator)
        let targets = elements(&[2, 2]);
        let ok = |n: u64| targets.iter().filter(|y| n % order_of(y, &[2, 2]) == 0).count();
        assert_eq!(ok(2) * ok(2) * ok(12), 64);
    }

    #[test]
    fn hom_count_saturates() {
        let big = FiniteAbelianGroup::from_cyclic_list(&[1 << 40, 1 << 40]);
        let h = big.hom_count(&big);
        assert!(h.saturated);
        assert_eq!(h.count, u64::MAX);
    }

    #[test]
    fn display_and_parse() {
        let g = FiniteAbelianGroup::from_cyclic_list(&[2, 4, 6]);
        assert_eq!(g.to_string(), "C2 x C2 x C12");
        assert_eq!("C2 x C2 x C12".parse::<FiniteAbelianGroup>().unwrap(), g);
        assert_eq!(FiniteAbelianGroup::trivial().to_string(), "C1");
        assert!("C2 x D4".parse::<FiniteAbelianGroup>().is_err());
    }

    #[test]
    fn element_orders_rejects_nonsense() {
        assert!(FiniteAbelianGroup::from_element_orders(&[1, 3]).is_err());
        assert!(FiniteAbelianGroup::from_element_orders(&[]).is_err());
    }

    #[test]
    fn smith_general_matrix() {
        let d = smith_diagonal(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(d, vec![2, 6, 12]);
        let q = FiniteAbelianGroup::cyclic(12).quotient(&[vec![8]]);
        assert_eq!(q.invariant_factors(), &[4]);
    }

    /// Subgroup generated by `gens` inside ∏ Z/orders, by closure.
    fn span(gens: &[Vec<u64>], orders: &[u64]) -> Vec<Vec<u64>> {
        let mut set = vec![vec![0; orders.len()]];
        let mut i = 0;
        while i < set.len() {
            for g in gens {
                let s: Vec<u64> = set[i].iter().zip(g).zip(orders).map(|((&a, &b), &n)| (a + b) % n).collect();
                if !set.contains(&s) {
                    set.push(s);
                }
            }
            i += 1;
        }
        set
    }

    fn small_group() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(1u64..=12, 0..=3)
    }

    proptest! {
        #[test]
        fn rank_counts_divisible_orders(orders in prop::collection::vec(1u64..=60, 0..=6), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
            let g = FiniteAbelianGroup::from_cyclic_list(&orders);
            prop_assert_eq!(g.rank_p(p).unwrap(), orders.iter().filter(|&&e| e % p == 0).count());
            prop_assert_eq!(g.order(), orders.iter().product::<u64>());
            prop_assert_eq!(g.hom_count(&FiniteAbelianGroup::cyclic(p)).count, p.pow(g.rank_p(p).unwrap() as u32));
        }

        #[test]
        fn power_subgroup_rank(orders in prop::collection::vec(1u64..=200, 0..=5), p in prop::sample::select(vec![2u64, 3, 5]), l in 1u32..=3) {
            let g = FiniteAbelianGroup::from_cyclic_list(&orders);
            let pl = p.pow(l);
            let want = g.invariant_factors().iter().filter(|&&d| d % pl == 0).count();
            prop_assert_eq!(g.power_subgroup(p.pow(l - 1)).rank_p(p).unwrap(), want);
        }

        #[test]
        fn structure_matches_brute_force(orders in small_group()) {
            prop_assert_eq!(FiniteAbelianGroup::from_cyclic_list(&orders), brute_structure(&orders));
        }

        #[test]
        fn rank_monotone_under_subgroups_and_quotients(
            orders in prop::collection::vec(2u64..=8, 1..=3),
            seeds in prop::collection::vec(any::<u64>(), 1..=2),
            p in prop::sample::select(vec![2u64, 3]),
        ) {
            let a = FiniteAbelianGroup::from_cyclic_list(&orders);
            let gens: Vec<Vec<u64>> = seeds
                .iter()
                .map(|s| orders.iter().enumerate().map(|(i, &n)| (s >> (8 * i)) % n).collect())
                .collect();
            let sub = span(&gens, &orders);
            let ords: Vec<u64> = sub.iter().map(|x| order_of(x, &orders)).collect();
            let b = FiniteAbelianGroup::from_element_orders(&ords).unwrap();
            // quotient presented over the original cyclic generators
            let n = orders.len();
            let mut rel: Vec<Vec<i64>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { orders[i] as i64 } else { 0 }).collect())
                .collect();
            rel.extend(gens.iter().map(|g| g.iter().map(|&x| x as i64).collect::<Vec<_>>()));
            let c = FiniteAbelianGroup::from_relations(&rel, n).unwrap();
            prop_assert_eq!(b.order() * c.order(), a.order());
            let (ra, rb, rc) = (a.rank_p(p).unwrap(), b.rank_p(p).unwrap(), c.rank_p(p).unwrap());
            prop_assert!(rb <= ra);
            prop_assert!(rc <= ra);
            prop_assert!(ra <= rb + rc);
        }
    }
}
