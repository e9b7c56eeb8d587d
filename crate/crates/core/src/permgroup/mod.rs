//! Permutation groups of small degree and the ramification invariants built
//! on them: `e(g)`, the sets `Ω_{p^l}`, splitting types from double cosets,
//! and cohomology / equivariant maps of small `F_2[G]`-modules.

mod group;
mod module;
mod perm;
mod ramification;

pub use group::{a4_in_s6, closure, cyclic_regular, PermGroup, MAX_ORDER};
pub use module::{
    cohomology_dim, equivariant_hom_count, rank as f2_rank, CohomologyDims, F2GModule, F2Matrix,
    MAX_COCHAIN_GROUP, MAX_MODULE_DIM,
};
pub use perm::{Perm, MAX_DEGREE};
pub use ramification::{RamificationLocal, SplittingType};

use crate::error::{Error, Result};

/// `e(g)`: gcd of the orbit sizes of `g`.
pub fn e_of(g: &Perm) -> u64 {
    g.e()
}

/// Groups addressable by name from the command line: `C<n>` (regular
/// cyclic), `A4` (inside `S_6`).
pub fn named_group(name: &str) -> Result<PermGroup> {
    match name {
        "A4" | "a4" => Ok(a4_in_s6()),
        _ => {
            let n = name
                .strip_prefix(['C', 'c'])
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&n| (1..=MAX_DEGREE).contains(&n))
                .ok_or_else(|| Error::Config(format!("unknown group {name:?}")))?;
            cyclic_regular(n)
        }
    }
}

/// Modules addressable by name: `trivial` (one-dimensional), `perm` (the
/// permutation module), `klein-twist` (the two-dimensional module on which
/// a generator of `C_3` cycles the three nonzero vectors).
pub fn named_module(group: &PermGroup, name: &str) -> Result<F2GModule> {
    match name {
        "trivial" => F2GModule::trivial(group, 1),
        "perm" => F2GModule::permutation(group),
        "klein-twist" => {
            if group.order() != 3 || group.generators().len() != 1 {
                return Err(Error::Config("klein-twist needs a cyclic group of order 3".into()));
            }
            let m = F2Matrix::from_columns(&[0b10, 0b11])?;
            F2GModule::new(group, 2, &[m])
        }
        _ => Err(Error::Config(format!("unknown module {name:?}"))),
    }
}

/// One row of the tame ramification table for the `A_4` sextic: the
/// inertia and decomposition groups and the splitting types in the cubic,
/// sextic and degree-12 fields.
#[derive(Debug, Clone)]
pub struct RamificationRow {
    pub inertia: String,
    pub decomposition: String,
    pub cubic: SplittingType,
    pub sextic: SplittingType,
    pub closure: SplittingType,
}

/// The three tame ramification shapes of `A_4 ⊂ S_6`, in the order
/// `I = D = ⟨(12)(34)⟩`, `I = ⟨(12)(34)⟩ ⊂ D = V_4`, `I = D = ⟨(123)⟩`
/// (labels use the degree-4 names of the generators).
pub fn a4_ramification_table() -> Result<Vec<RamificationRow>> {
    let g = a4_in_s6();
    let g2 = Perm::from_cycles(6, "(34)(56)")?;
    let g3 = Perm::from_cycles(6, "(135)(246)")?;
    let klein_gens: Vec<Perm> = g.elements().iter().filter(|x| x.order() == 2).copied().collect();
    let klein = g.subgroup(&klein_gens)?;
    let c2 = g.subgroup(&[g2])?;
    let c3 = g.subgroup(&[g3])?;
    let fields = [klein.clone(), g.stabilizer(1), g.trivial_subgroup()];
    let shapes = [
        ("<(12)(34)>", "<(12)(34)>", c2.clone(), c2.clone()),
        ("<(12)(34)>", "<(12)(34),(13)(24)>", c2.clone(), klein),
        ("<(123)>", "<(123)>", c3.clone(), c3),
    ];
    shapes
        .into_iter()
        .map(|(i_name, d_name, i, d)| {
            let local = RamificationLocal::new(g.clone(), d, i)?;
            Ok(RamificationRow {
                inertia: i_name.to_string(),
                decomposition: d_name.to_string(),
                cubic: local.splitting_type(&fields[0])?,
                sextic: local.splitting_type(&fields[1])?,
                closure: local.splitting_type(&fields[2])?,
            })
        })
        .collect()
}
