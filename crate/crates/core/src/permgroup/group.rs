use std::collections::{HashMap, VecDeque};

use super::perm::Perm;
use crate::arith::{gcd, is_prime_u64};
use crate::error::{Error, Result};

/// Largest group order the dense element enumeration accepts.
pub const MAX_ORDER: usize = 10_000;

/// A permutation group given by generators, with its full element list.
///
/// Elements are kept sorted, so indices are stable for a given group.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    index: HashMap<Perm, usize>,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermGroup {}

/// Enumerate the group generated by `generators` breadth-first.
pub fn closure(degree: usize, generators: &[Perm]) -> Result<PermGroup> {
    if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
        return Err(Error::Structure(format!(
            "generator {g} has degree {}, expected {degree}",
            g.degree()
        )));
    }
    let id = Perm::identity(degree);
    let mut seen: HashMap<Perm, ()> = HashMap::from([(id, ())]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.compose(g);
            if seen.insert(y, ()).is_none() {
                if seen.len() > MAX_ORDER {
                    return Err(Error::Size(format!(
                        "group order exceeds {MAX_ORDER}"
                    )));
                }
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<Perm> = seen.into_keys().collect();
    elements.sort();
    let index = elements.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    Ok(PermGroup {
        degree,
        generators: generators.to_vec(),
        elements,
        index,
    })
}

/// `A_4` inside `S_6`, generated by the images `(34)(56)` of `(12)(34)` and
/// `(135)(246)` of `(123)`.
pub fn a4_in_s6() -> PermGroup {
    let g2 = Perm::from_cycles(6, "(34)(56)").unwrap();
    let g3 = Perm::from_cycles(6, "(135)(246)").unwrap();
    closure(6, &[g2, g3]).unwrap()
}

/// The cyclic group of order `n` acting regularly on `{1..n}`.
pub fn cyclic_regular(n: usize) -> Result<PermGroup> {
    if n == 0 {
        return Err(Error::Domain("cyclic group of order 0".into()));
    }
    let images: Vec<usize> = (1..=n).map(|i| i % n + 1).collect();
    let g = Perm::from_images(&images)?;
    closure(n, &[g])
}

impl PermGroup {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn identity(&self) -> Perm {
        Perm::identity(self.degree)
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.index.contains_key(g)
    }

    pub fn index_of(&self, g: &Perm) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Subgroup generated by `generators`, which must lie in `self`.
    pub fn subgroup(&self, generators: &[Perm]) -> Result<PermGroup> {
        if let Some(g) = generators.iter().find(|g| !self.contains(g)) {
            return Err(Error::Structure(format!("{g} is not in the group")));
        }
        closure(self.degree, generators)
    }

    pub fn trivial_subgroup(&self) -> PermGroup {
        closure(self.degree, &[]).unwrap()
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.elements.iter().all(|g| other.contains(g))
    }

    /// Whether `self` is normalized by every element of `other`.
    pub fn is_normal_in(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other)
            && other.generators().iter().all(|h| {
                self.generators
                    .iter()
                    .all(|g| self.contains(&g.conjugate_by(h)))
            })
    }

    pub fn is_cyclic(&self) -> bool {
        let n = self.order() as u64;
        self.elements.iter().any(|g| g.order() == n)
    }

    pub fn stabilizer(&self, point: usize) -> PermGroup {
        let gens: Vec<Perm> = self
            .elements
            .iter()
            .filter(|g| g.apply(point) == point)
            .copied()
            .collect();
        closure(self.degree, &gens).unwrap()
    }

    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut pts: Vec<usize> = self.elements.iter().map(|g| g.apply(point)).collect();
        pts.sort_unstable();
        pts.dedup();
        pts
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(1).len() == self.degree
    }

    /// `Ω_{p^l} = {g : p^l | e(g)}`, sorted. Checks closure under
    /// conjugation and under powers coprime to the element order.
    pub fn omega_set(&self, p: u64, l: u32) -> Result<Vec<Perm>> {
        if !is_prime_u64(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if l == 0 {
            return Err(Error::Domain("omega_set needs l >= 1".into()));
        }
        let Some(pl) = p.checked_pow(l) else {
            return Ok(Vec::new());
        };
        let set: Vec<Perm> = self
            .elements
            .iter()
            .filter(|g| g.e() % pl == 0)
            .copied()
            .collect();
        for g in &set {
            for h in &self.elements {
                if g.conjugate_by(h).e() % pl != 0 {
                    return Err(Error::Consistency(format!(
                        "Ω_{pl} not closed under conjugation at {g}"
                    )));
                }
            }
            let ord = g.order();
            for k in (1..ord).filter(|&k| gcd(k, ord) == 1) {
                if g.pow(k).e() % pl != 0 {
                    return Err(Error::Consistency(format!(
                        "Ω_{pl} not closed under powering at {g}^{k}"
                    )));
                }
            }
        }
        Ok(set)
    }

    /// Double cosets `A g B`, each as a sorted list of element indices,
    /// ordered by their smallest element.
    pub fn double_cosets(&self, left: &PermGroup, right: &PermGroup) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.order()];
        let mut out = Vec::new();
        for (i, g) in self.elements.iter().enumerate() {
            if assigned[i] {
                continue;
            }
            let mut coset: Vec<usize> = left
                .elements
                .iter()
                .flat_map(|a| right.elements.iter().map(move |b| a.compose(g).compose(b)))
                .map(|x| self.index[&x])
                .collect();
            coset.sort_unstable();
            coset.dedup();
            for &j in &coset {
                assigned[j] = true;
            }
            out.push(coset);
        }
        out
    }

    /// `|A ∩ B|` for two subgroups of the same degree.
    pub fn intersection_order(&self, other: &PermGroup) -> usize {
        self.elements.iter().filter(|g| other.contains(g)).count()
    }

    /// `g H g^-1`.
    pub fn conjugate_subgroup(&self, g: &Perm) -> PermGroup {
        let gens: Vec<Perm> = self.generators.iter().map(|h| h.conjugate_by(g)).collect();
        closure(self.degree, &gens).unwrap()
    }

    /// Product of two elements by index.
    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        self.index[&self.elements[a].compose(&self.elements[b])]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(deg: usize, s: &str) -> Perm {
        Perm::from_cycles(deg, s).unwrap()
    }

    #[test]
    fn closure_examples() {
        assert_eq!(closure(2, &[p(2, "(12)")]).unwrap().order(), 2);
        assert_eq!(closure(6, &[p(6, "(123456)")]).unwrap().order(), 6);
        assert_eq!(closure(3, &[]).unwrap().order(), 1);
        let s8 = closure(8, &[p(8, "(12)"), p(8, "(12345678)")]);
        assert!(matches!(s8, Err(Error::Size(_))));
        assert!(closure(4, &[p(3, "(12)")]).is_err());
    }

    #[test]
    fn a4_embedding() {
        let g = a4_in_s6();
        assert_eq!(g.order(), 12);
        assert!(g.is_transitive());
        let stab = g.stabilizer(1);
        assert_eq!(stab.order(), 2);
        assert!(stab.contains(&p(6, "(34)(56)")));
        // the Klein four subgroup is normal, Stab(1) is not
        let klein: Vec<Perm> = g.elements().iter().filter(|x| x.order() <= 2).copied().collect();
        let v4 = g.subgroup(&klein).unwrap();
        assert_eq!(v4.order(), 4);
        assert!(v4.is_normal_in(&g));
        assert!(!stab.is_normal_in(&g));
        assert!(!g.is_cyclic());
    }

    #[test]
    fn omega_sets() {
        let a4 = a4_in_s6();
        assert!(a4.omega_set(2, 1).unwrap().is_empty());
        assert_eq!(a4.omega_set(3, 1).unwrap().len(), 8);

        let c2 = cyclic_regular(2).unwrap();
        assert_eq!(c2.omega_set(2, 1).unwrap(), vec![p(2, "(12)")]);

        let c4 = cyclic_regular(4).unwrap();
        let o2 = c4.omega_set(2, 1).unwrap();
        assert_eq!(o2.len(), 3);
        assert!(o2.iter().all(|g| !g.is_identity()));
        let o4 = c4.omega_set(2, 2).unwrap();
        assert_eq!(o4.len(), 2);
        assert!(o4.iter().all(|g| g.order() == 4));
        assert!(c4.omega_set(4, 1).is_err());
        assert!(c4.omega_set(2, 200).unwrap().is_empty());
    }

    #[test]
    fn double_cosets_partition() {
        let g = a4_in_s6();
        let h = g.stabilizer(1);
        let d = g.subgroup(&[p(6, "(135)(246)")]).unwrap();
        let cosets = g.double_cosets(&d, &h);
        let total: usize = cosets.iter().map(Vec::len).sum();
        assert_eq!(total, 12);
    }
}
