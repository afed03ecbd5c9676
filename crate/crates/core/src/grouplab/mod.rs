//! Finite group extensions and the non-splitting checks built on them.
//!
//! [`galois_ring`] gives W_2(F_q) and Teichmüller lifts, [`twisted`] the
//! table-driven twisted product of a group by a module, [`splitting`] the
//! exhaustive search for a complement to a kernel, [`conjugator`] the search
//! for a conjugation that straightens a subgroup of GL_2^D(T), and [`normal`]
//! the normal subgroups of GL_2^D(F_q) surjecting onto PGL_2^D(F_q).

pub mod conjugator;
pub mod galois_ring;
pub mod normal;
pub mod splitting;
pub mod twisted;

use std::collections::VecDeque;
use std::hash::Hash;

use rustc_hash::{FxHashMap, FxHashSet};

pub use conjugator::{random_subgroup, split_conjugator, RandomSubgroup, Straightening};
pub use galois_ring::{GaloisRing, GrElem};
pub use normal::{verify_normal_subgroup_lemma, NormalSubgroupInfo, NormalSubgroupReport};
pub use splitting::{
    generating_pairs, splitting_search, ConstantLiftExtension, Extension, SlWittExtension, SplittingOutcome,
};
pub use twisted::{GroupTable, ModuleSpace, TwistedProduct};

/// The subgroup generated by `gens` under `mul`, identity first in
/// breadth-first order. `None` once more than `cap` elements appear.
pub fn closure_by<T, F>(identity: T, gens: &[T], mut mul: F, cap: usize) -> Option<Vec<T>>
where
    T: Clone + Eq + Hash,
    F: FnMut(&T, &T) -> T,
{
    let mut seen: FxHashSet<T> = FxHashSet::default();
    seen.insert(identity.clone());
    let mut out = vec![identity.clone()];
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = mul(&x, g);
            if seen.insert(y.clone()) {
                if out.len() >= cap {
                    return None;
                }
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Some(out)
}

/// Order of `g`, or `None` past `bound`.
pub fn element_order<T, F>(identity: &T, g: &T, mut mul: F, bound: usize) -> Option<usize>
where
    T: Clone + Eq,
    F: FnMut(&T, &T) -> T,
{
    let mut x = g.clone();
    for n in 1..=bound {
        if &x == identity {
            return Some(n);
        }
        x = mul(&x, g);
    }
    None
}

/// Conjugacy classes of a finite group given by its element list.
pub fn conjugacy_classes<T, F, I>(elements: &[T], mut mul: F, mut inv: I) -> Vec<Vec<T>>
where
    T: Clone + Eq + Hash + Ord,
    F: FnMut(&T, &T) -> T,
    I: FnMut(&T) -> T,
{
    let mut class_of: FxHashMap<T, usize> = FxHashMap::default();
    let mut classes: Vec<Vec<T>> = Vec::new();
    for x in elements {
        if class_of.contains_key(x) {
            continue;
        }
        let mut class: FxHashSet<T> = FxHashSet::default();
        for g in elements {
            let gx = mul(g, x);
            class.insert(mul(&gx, &inv(g)));
        }
        let mut class: Vec<T> = class.into_iter().collect();
        class.sort();
        for y in &class {
            class_of.insert(y.clone(), classes.len());
        }
        classes.push(class);
    }
    classes
}
