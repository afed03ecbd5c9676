//! Minimal commutative-ring interface used by the matrix code.
//!
//! Rings are context objects: elements are plain values and all arithmetic
//! goes through the ring, so the same element type can be shared by many
//! instances without carrying parameters around.

use std::fmt::Debug;
use std::hash::Hash;

use crate::ffield::Fq;

pub trait Ring {
    type Elem: Clone + Eq + Ord + Hash + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Multiplicative inverse, or `None` when `a` is not a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.inv(a).is_some()
    }
}

/// A local ring with residue field F_q.
pub trait ResidueMap: Ring {
    fn residue(&self, a: &Self::Elem) -> Fq;
    /// Embedding of F_q (a multiplicative or additive section, depending on
    /// the ring; see the implementations).
    fn lift(&self, a: Fq) -> Self::Elem;
}
