//! Finite modules over the two-element field with a permutation-group
//! action, cochain cohomology in low degree, and equivariant Hom counting.

use std::collections::{HashMap, VecDeque};

use super::group::PermGroup;
use super::perm::Perm;
use crate::error::{Error, Result};

/// Largest module dimension.
pub const MAX_MODULE_DIM: usize = 8;
/// Largest group order accepted by the cochain computations.
pub const MAX_COCHAIN_GROUP: usize = 24;

/// Linear map of `F_2^n` (`n <= 8`), stored by the images of the basis
/// vectors. Vectors are bitmasks; bit `i` is coordinate `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    dim: u8,
    cols: [u8; MAX_MODULE_DIM],
}

impl F2Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut cols = [0u8; MAX_MODULE_DIM];
        for (j, c) in cols.iter_mut().enumerate().take(dim) {
            *c = 1 << j;
        }
        F2Matrix { dim: dim as u8, cols }
    }

    /// From the images of `e_0, ..., e_{n-1}` as bitmasks.
    pub fn from_columns(columns: &[u8]) -> Result<Self> {
        let dim = columns.len();
        if dim > MAX_MODULE_DIM {
            return Err(Error::Size(format!("module dimension {dim} > {MAX_MODULE_DIM}")));
        }
        let mask = if dim == 8 { 0xff } else { (1u16 << dim) as u8 - 1 };
        if columns.iter().any(|&c| c & !mask != 0) {
            return Err(Error::Structure("column has bits beyond the dimension".into()));
        }
        let mut cols = [0u8; MAX_MODULE_DIM];
        cols[..dim].copy_from_slice(columns);
        Ok(F2Matrix { dim: dim as u8, cols })
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn apply(&self, v: u8) -> u8 {
        (0..self.dim as usize)
            .filter(|&j| v >> j & 1 == 1)
            .fold(0, |acc, j| acc ^ self.cols[j])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &F2Matrix) -> F2Matrix {
        let mut out = *other;
        for j in 0..other.dim as usize {
            out.cols[j] = self.apply(other.cols[j]);
        }
        out.dim = self.dim;
        out
    }

    /// Entry in row `i`, column `j`.
    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.cols[j] >> i & 1 == 1
    }

    fn is_invertible(&self) -> bool {
        rank(&self.cols[..self.dim as usize].iter().map(|&c| vec![c as u64]).collect::<Vec<_>>()) == self.dim as usize
    }
}

/// Rank over the two-element field of a set of bitset rows.
pub fn rank(rows: &[Vec<u64>]) -> usize {
    let mut basis: HashMap<usize, Vec<u64>> = HashMap::new();
    for row in rows {
        let mut r = row.clone();
        loop {
            let Some(lead) = leading_bit(&r) else { break };
            match basis.get(&lead) {
                Some(b) => {
                    for (x, y) in r.iter_mut().zip(b) {
                        *x ^= y;
                    }
                }
                None => {
                    basis.insert(lead, r);
                    break;
                }
            }
        }
    }
    basis.len()
}

fn leading_bit(r: &[u64]) -> Option<usize> {
    r.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

/// A module over `F_2[G]`: one matrix per element of `G`.
#[derive(Clone, Debug)]
pub struct F2GModule {
    dim: usize,
    elements: Vec<Perm>,
    action: Vec<F2Matrix>,
}

impl F2GModule {
    /// Module defined by one invertible matrix per generator of `group`.
    /// The assignment is extended along the Cayley graph; any clash means
    /// the matrices violate a relation of the group.
    pub fn new(group: &PermGroup, dim: usize, generator_action: &[F2Matrix]) -> Result<Self> {
        if dim > MAX_MODULE_DIM {
            return Err(Error::Size(format!("module dimension {dim} > {MAX_MODULE_DIM}")));
        }
        if generator_action.len() != group.generators().len() {
            return Err(Error::Structure(format!(
                "{} matrices for {} generators",
                generator_action.len(),
                group.generators().len()
            )));
        }
        for m in generator_action {
            if m.dim() != dim || !m.is_invertible() {
                return Err(Error::Structure("generator matrix is not an automorphism".into()));
            }
        }
        let mut action: Vec<Option<F2Matrix>> = vec![None; group.order()];
        let id = group.index_of(&group.identity()).unwrap();
        action[id] = Some(F2Matrix::identity(dim));
        let mut queue = VecDeque::from([id]);
        while let Some(i) = queue.pop_front() {
            let rep = action[i].unwrap();
            for (s, m) in group.generators().iter().zip(generator_action) {
                let j = group.index_of(&group.elements()[i].compose(s)).unwrap();
                let next = rep.compose(m);
                match action[j] {
                    Some(existing) if existing != next => {
                        return Err(Error::Structure(
                            "generator matrices violate a group relation".into(),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        action[j] = Some(next);
                        queue.push_back(j);
                    }
                }
            }
        }
        Ok(F2GModule {
            dim,
            elements: group.elements().to_vec(),
            action: action.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn trivial(group: &PermGroup, dim: usize) -> Result<Self> {
        let gens = vec![F2Matrix::identity(dim); group.generators().len()];
        Self::new(group, dim, &gens)
    }

    /// `F_2^n` with `G` permuting coordinates through its action on
    /// `{1..n}`.
    pub fn permutation(group: &PermGroup) -> Result<Self> {
        let n = group.degree();
        let gens: Vec<F2Matrix> = group
            .generators()
            .iter()
            .map(|g| {
                let cols: Vec<u8> = (1..=n).map(|x| 1u8 << (g.apply(x) - 1)).collect();
                F2Matrix::from_columns(&cols)
            })
            .collect::<Result<_>>()?;
        Self::new(group, n, &gens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Matrix of the element with index `i` in the group's element list.
    pub fn action(&self, i: usize) -> &F2Matrix {
        &self.action[i]
    }

    fn check_group(&self, group: &PermGroup) -> Result<()> {
        if self.elements != group.elements() {
            return Err(Error::Structure("module belongs to a different group".into()));
        }
        Ok(())
    }

    /// Fixed subspace dimension `dim M^G`.
    pub fn fixed_dim(&self) -> usize {
        let rows: Vec<Vec<u64>> = (0..self.dim)
            .flat_map(|i| {
                self.action.iter().map(move |m| {
                    // row i of (m + 1)
                    let mut bits = 0u64;
                    for j in 0..self.dim {
                        if m.entry(i, j) ^ (i == j) {
                            bits |= 1 << j;
                        }
                    }
                    vec![bits]
                })
            })
            .collect();
        self.dim - rank(&rows)
    }
}

/// Dimensions of cocycles, coboundaries and cohomology in one degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CohomologyDims {
    pub cocycles: usize,
    pub coboundaries: usize,
    pub cohomology: usize,
}

/// Rank of the coboundary map `C^n -> C^{n+1}` on inhomogeneous cochains.
fn coboundary_rank(group: &PermGroup, module: &F2GModule, n: u32) -> usize {
    let g = group.order();
    let d = module.dim();
    let mul: Vec<Vec<usize>> = (0..g).map(|a| (0..g).map(|b| group.mul_index(a, b)).collect()).collect();
    let cols = g.pow(n) * d;
    let words = cols.div_ceil(64).max(1);
    // column index of coordinate `i` of the cochain value at tuple `t`
    let col = |t: &[usize], i: usize| t.iter().fold(0usize, |acc, &x| acc * g + x) * d + i;
    let mut rows = Vec::with_capacity(g.pow(n + 1) * d);
    let mut t = vec![0usize; n as usize + 1];
    for flat in 0..g.pow(n + 1) {
        let mut x = flat;
        for slot in t.iter_mut().rev() {
            *slot = x % g;
            x /= g;
        }
        for i in 0..d {
            let mut row = vec![0u64; words];
            let mut flip = |c: usize| row[c / 64] ^= 1 << (c % 64);
            // g_1 · f(g_2, ..., g_{n+1})
            let act = module.action(t[0]);
            for j in 0..d {
                if act.entry(i, j) {
                    flip(col(&t[1..], j));
                }
            }
            // f(..., g_k g_{k+1}, ...)
            for k in 0..n as usize {
                let mut merged: Vec<usize> = Vec::with_capacity(n as usize);
                merged.extend_from_slice(&t[..k]);
                merged.push(mul[t[k]][t[k + 1]]);
                merged.extend_from_slice(&t[k + 2..]);
                flip(col(&merged, i));
            }
            // f(g_1, ..., g_n)
            flip(col(&t[..n as usize], i));
            rows.push(row);
        }
    }
    rank(&rows)
}

/// `dim Z^n`, `dim B^n` and `dim H^n(G, M)` over the two-element field for
/// `n ∈ {0, 1, 2}`, from explicit cochains.
pub fn cohomology_dim(group: &PermGroup, module: &F2GModule, degree: u32) -> Result<CohomologyDims> {
    module.check_group(group)?;
    if group.order() > MAX_COCHAIN_GROUP {
        return Err(Error::Size(format!(
            "group order {} > {MAX_COCHAIN_GROUP}",
            group.order()
        )));
    }
    if degree > 2 {
        return Err(Error::Unsupported(format!("cohomology in degree {degree}")));
    }
    let cochains = group.order().pow(degree) * module.dim();
    let cocycles = cochains - coboundary_rank(group, module, degree);
    let coboundaries = if degree == 0 {
        0
    } else {
        coboundary_rank(group, module, degree - 1)
    };
    Ok(CohomologyDims {
        cocycles,
        coboundaries,
        cohomology: cocycles - coboundaries,
    })
}

/// Number of `G`-equivariant linear maps `M -> N`.
pub fn equivariant_hom_count(source: &F2GModule, target: &F2GModule, group: &PermGroup) -> Result<u128> {
    source.check_group(group)?;
    target.check_group(group)?;
    let (dm, dn) = (source.dim(), target.dim());
    // unknown x_{ij}, i < dn, j < dm, at bit i*dm + j
    let var = |i: usize, j: usize| i * dm + j;
    let mut rows = Vec::new();
    for s in group.generators() {
        let idx = group.index_of(s).unwrap();
        let (a, b) = (target.action(idx), source.action(idx));
        for i in 0..dn {
            for j in 0..dm {
                // (A X)_{ij} + (X B)_{ij} = 0
                let mut row = 0u64;
                for k in 0..dn {
                    if a.entry(i, k) {
                        row ^= 1 << var(k, j);
                    }
                }
                for k in 0..dm {
                    if b.entry(k, j) {
                        row ^= 1 << var(i, k);
                    }
                }
                rows.push(vec![row]);
            }
        }
    }
    let free = dm * dn - rank(&rows);
    Ok(1u128 << free)
}

#[cfg(test)]
mod tests {
    use super::super::group::{closure, cyclic_regular};
    use super::*;

    fn klein_twist(c3: &PermGroup) -> F2GModule {
        // e1 -> e2 -> e1 + e2 -> e1
        let m = F2Matrix::from_columns(&[0b10, 0b11]).unwrap();
        F2GModule::new(c3, 2, &[m]).unwrap()
    }

    /// All cochains by enumeration, for tiny cases: (dim Z, dim B).
    fn brute_cohomology(group: &PermGroup, module: &F2GModule, n: u32) -> (usize, usize) {
        let g = group.order();
        let d = module.dim();
        let tuples = |k: u32| -> Vec<Vec<usize>> {
            (0..g.pow(k))
                .map(|mut x| {
                    let mut t = vec![0; k as usize];
                    for s in t.iter_mut().rev() {
                        *s = x % g;
                        x /= g;
                    }
                    t
                })
                .collect()
        };
        let delta = |f: &dyn Fn(&[usize]) -> u8, k: u32| -> Vec<u8> {
            tuples(k + 1)
                .iter()
                .map(|t| {
                    let mut v = module.action(t[0]).apply(f(&t[1..]));
                    for i in 0..k as usize {
                        let mut m = t[..i].to_vec();
                        m.push(group.mul_index(t[i], t[i + 1]));
                        m.extend_from_slice(&t[i + 2..]);
                        v ^= f(&m);
                    }
                    v ^ f(&t[..k as usize])
                })
                .collect()
        };
        let cochains = |k: u32| -> Vec<Vec<u8>> {
            let len = g.pow(k);
            let total = 1usize << (len * d);
            (0..total)
                .map(|code| (0..len).map(|i| ((code >> (i * d)) & ((1 << d) - 1)) as u8).collect())
                .collect()
        };
        let lookup = |f: &Vec<u8>, t: &[usize]| f[t.iter().fold(0, |a, &x| a * g + x)];
        let z = cochains(n)
            .iter()
            .filter(|f| delta(&|t| lookup(f, t), n).iter().all(|&v| v == 0))
            .count();
        let mut b: Vec<Vec<u8>> = if n == 0 {
            vec![vec![0]]
        } else {
            cochains(n - 1).iter().map(|f| delta(&|t| lookup(f, t), n - 1)).collect()
        };
        b.sort();
        b.dedup();
        (z.trailing_zeros() as usize, b.len().trailing_zeros() as usize)
    }

    #[test]
    fn h2_of_c3_on_klein_twist_vanishes() {
        let c3 = cyclic_regular(3).unwrap();
        let m = klein_twist(&c3);
        let dims = cohomology_dim(&c3, &m, 2).unwrap();
        assert_eq!(dims.cohomology, 0);
        for n in 0..=2 {
            let d = cohomology_dim(&c3, &m, n).unwrap();
            assert_eq!(d.cohomology, 0, "degree {n}");
        }
    }

    #[test]
    fn c2_on_trivial_f2() {
        let c2 = cyclic_regular(2).unwrap();
        let m = F2GModule::trivial(&c2, 1).unwrap();
        for n in 0..=2 {
            let d = cohomology_dim(&c2, &m, n).unwrap();
            assert_eq!(d.cohomology, 1, "degree {n}");
            assert_eq!(brute_cohomology(&c2, &m, n), (d.cocycles, d.coboundaries));
        }
    }

    #[test]
    fn degree_zero_is_fixed_space() {
        let c3 = cyclic_regular(3).unwrap();
        let perm = F2GModule::permutation(&c3).unwrap();
        assert_eq!(perm.fixed_dim(), 1);
        assert_eq!(cohomology_dim(&c3, &perm, 0).unwrap().cohomology, 1);
        let a4 = super::super::group::a4_in_s6();
        let m = F2GModule::permutation(&a4).unwrap();
        assert_eq!(cohomology_dim(&a4, &m, 0).unwrap().cohomology, m.fixed_dim());
    }

    #[test]
    fn brute_force_agrees_on_small_modules() {
        let c3 = cyclic_regular(3).unwrap();
        let m = klein_twist(&c3);
        for n in 0..=1 {
            let d = cohomology_dim(&c3, &m, n).unwrap();
            assert_eq!(brute_cohomology(&c3, &m, n), (d.cocycles, d.coboundaries));
        }
        let c2 = cyclic_regular(2).unwrap();
        let perm = F2GModule::permutation(&c2).unwrap();
        for n in 0..=2 {
            let d = cohomology_dim(&c2, &perm, n).unwrap();
            assert_eq!(brute_cohomology(&c2, &perm, n), (d.cocycles, d.coboundaries));
        }
    }

    #[test]
    fn relation_violations_are_rejected() {
        let c3 = cyclic_regular(3).unwrap();
        // the swap has order 2, not dividing 3
        let swap = F2Matrix::from_columns(&[0b10, 0b01]).unwrap();
        assert!(matches!(F2GModule::new(&c3, 2, &[swap]), Err(Error::Structure(_))));
        let singular = F2Matrix::from_columns(&[0b01, 0b01]).unwrap();
        assert!(F2GModule::new(&c3, 2, &[singular]).is_err());
    }

    #[test]
    fn split_and_nonsplit_hom_counts() {
        let c3 = cyclic_regular(3).unwrap();
        let twist = klein_twist(&c3);
        let units = F2GModule::permutation(&c3).unwrap();
        assert_eq!(equivariant_hom_count(&units, &twist, &c3).unwrap(), 4);
        let triv = F2GModule::trivial(&c3, 1).unwrap();
        assert_eq!(equivariant_hom_count(&triv, &twist, &c3).unwrap(), 1);

        // brute force over all 2^6 linear maps F_2^3 -> F_2^2
        let g = c3.index_of(&c3.generators()[0]).unwrap();
        let mut equivariant = 0;
        let mut surjective = 0;
        for code in 0u32..64 {
            let cols = [(code & 3) as u8, (code >> 2 & 3) as u8, (code >> 4 & 3) as u8];
            let x = |v: u8| (0..3).filter(|&j| v >> j & 1 == 1).fold(0, |a, j| a ^ cols[j]);
            if (0u8..8).all(|v| twist.action(g).apply(x(v)) == x(units.action(g).apply(v))) {
                equivariant += 1;
                let image: std::collections::HashSet<u8> = (0u8..8).map(x).collect();
                if image.len() == 4 {
                    surjective += 1;
                }
            }
        }
        assert_eq!((equivariant, surjective), (4, 3));
    }

    #[test]
    fn trivial_group_gives_full_hom() {
        let g = closure(3, &[]).unwrap();
        let m = F2GModule::trivial(&g, 3).unwrap();
        let n = F2GModule::trivial(&g, 2).unwrap();
        assert_eq!(equivariant_hom_count(&m, &n, &g).unwrap(), 1 << 6);
    }

    #[test]
    fn size_limits() {
        let big = super::super::group::closure(
            5,
            &[
                Perm::from_cycles(5, "(12)").unwrap(),
                Perm::from_cycles(5, "(12345)").unwrap(),
            ],
        )
        .unwrap();
        let m = F2GModule::trivial(&big, 1).unwrap();
        assert!(matches!(cohomology_dim(&big, &m, 1), Err(Error::Size(_))));
        assert!(F2Matrix::from_columns(&[1; 9]).is_err());
    }
}
