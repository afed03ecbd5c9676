//! Exhaustive search for a complement to the kernel of a finite extension
//! `1 -> K -> E -> Q -> 1`, plus the concrete extensions the search runs on.
//!
//! A complement maps isomorphically onto Q, so it is generated by lifts of a
//! generating pair `(a, b)` of Q whose orders, and the order of whose product,
//! match those downstairs. Each surviving pair of lifts is closed with a cap
//! of `|Q| + 1`; a closure of size exactly `|Q|` surjects onto Q and so meets
//! the kernel trivially.

use std::fmt::Debug;
use std::hash::Hash;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::galois_ring::{GaloisRing, GrElem};
use super::twisted::{index_map, GroupTable, ModuleSpace, TwistedProduct};
use super::{closure_by, element_order};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ffield::{Field, Fq};
use crate::localalg::{LocalAlgebra, TElem};
use crate::matgrp::{
    conj, embed_unipotent, enumerate_gl2d, enumerate_trace_zero, reduce, GroupSpec, Mat2, TraceZeroMat,
};
use crate::modlat::to_vector;

/// A surjection `E -> Q` with enumerable fibres.
pub trait Extension {
    type Elem: Clone + Eq + Hash + Debug;
    type Quot: Clone + Eq + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn project(&self, a: &Self::Elem) -> Self::Quot;
    fn quotient_identity(&self) -> Self::Quot;
    fn quotient_mul(&self, a: &Self::Quot, b: &Self::Quot) -> Self::Quot;
    fn quotient_order(&self) -> u64;
    fn kernel_order(&self) -> u64;
    /// Every preimage of `g`.
    fn lifts(&self, g: &Self::Quot) -> Vec<Self::Elem>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Lifts of each generator whose order matches downstairs.
    pub lifts_a: usize,
    pub lifts_b: usize,
    /// Pairs of lifts whose product also has the right order.
    pub pairs_closed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplittingOutcome<E> {
    Split {
        generators: (E, E),
        complement: Vec<E>,
        stats: SearchStats,
    },
    NoSplitting {
        stats: SearchStats,
    },
}

impl<E> SplittingOutcome<E> {
    pub fn splits(&self) -> bool {
        matches!(self, SplittingOutcome::Split { .. })
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            SplittingOutcome::Split { stats, .. } | SplittingOutcome::NoSplitting { stats } => stats,
        }
    }
}

/// Searches for a complement generated by lifts of `pair`, which must
/// generate Q. The search is exhaustive, so `NoSplitting` proves that no
/// complement exists.
pub fn splitting_search<X: Extension>(
    ext: &X,
    pair: (&X::Quot, &X::Quot),
    caps: &Caps,
) -> Result<SplittingOutcome<X::Elem>> {
    let qn = ext.quotient_order();
    let qid = ext.quotient_identity();
    let qmul = |a: &X::Quot, b: &X::Quot| ext.quotient_mul(a, b);
    let (a, b) = pair;
    let span = closure_by(qid.clone(), &[a.clone(), b.clone()], qmul, qn as usize).map_or(0, |c| c.len() as u64);
    if span != qn {
        return Err(Error::Contract(format!(
            "the pair generates {span} of {qn} quotient elements"
        )));
    }
    let k = ext.kernel_order() as u128;
    caps.check_enumeration("lift pairs", k * k)?;
    let bound = qn as usize;
    let ord = |g: &X::Quot| element_order(&qid, g, qmul, bound).expect("finite quotient");
    let (oa, ob, oab) = (ord(a), ord(b), ord(&ext.quotient_mul(a, b)));
    let eid = ext.identity();
    let emul = |x: &X::Elem, y: &X::Elem| ext.mul(x, y);
    let lift_order = |x: &X::Elem, o: usize| element_order(&eid, x, emul, o) == Some(o);
    let la: Vec<X::Elem> = ext.lifts(a).into_iter().filter(|x| lift_order(x, oa)).collect();
    let lb: Vec<X::Elem> = ext.lifts(b).into_iter().filter(|x| lift_order(x, ob)).collect();
    let mut stats = SearchStats {
        lifts_a: la.len(),
        lifts_b: lb.len(),
        pairs_closed: 0,
    };
    for x in &la {
        for y in &lb {
            if !lift_order(&ext.mul(x, y), oab) {
                continue;
            }
            stats.pairs_closed += 1;
            if let Some(c) = closure_by(eid.clone(), &[x.clone(), y.clone()], emul, bound) {
                if c.len() == bound {
                    return Ok(SplittingOutcome::Split {
                        generators: (x.clone(), y.clone()),
                        complement: c,
                        stats,
                    });
                }
            }
        }
    }
    Ok(SplittingOutcome::NoSplitting { stats })
}

/// Up to `count` generating pairs of the group on `elements`, at most one per
/// first entry, in enumeration order.
pub fn generating_pairs<T, F>(elements: &[T], identity: &T, mul: F, count: usize) -> Vec<(T, T)>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let n = elements.len();
    let mut out = Vec::new();
    for a in elements.iter().filter(|a| *a != identity) {
        if out.len() >= count {
            break;
        }
        let found = elements
            .iter()
            .find(|b| closure_by(identity.clone(), &[a.clone(), (*b).clone()], &mul, n).is_some_and(|c| c.len() == n));
        if let Some(b) = found {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

/// `SL_2(W_2(F_q)) -> SL_2(F_q)`, with kernel `1 + p M_2^0(F_q)`.
#[derive(Clone, Debug)]
pub struct SlWittExtension {
    ring: GaloisRing,
    spec: GroupSpec,
    kernel: Vec<Mat2<GrElem>>,
}

impl SlWittExtension {
    pub fn new(field: Field) -> Result<Self> {
        let ring = GaloisRing::new(field.clone());
        let spec = GroupSpec::special(field.clone());
        let one = Mat2::identity(&ring);
        let kernel = enumerate_trace_zero(&field, 1 << 24)?
            .iter()
            .map(|x| one.add(&ring, &x.as_mat().map(|&e| ring.times_p(e))))
            .collect();
        Ok(SlWittExtension { ring, spec, kernel })
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.ring
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// Entrywise Teichmüller lift with the first row divided by the
    /// determinant, so the lift lies in SL_2. It fixes the identity.
    pub fn section(&self, g: &Mat2<Fq>) -> Mat2<GrElem> {
        let r = &self.ring;
        let t = g.map(|&e| r.teichmuller(e));
        let u = r.inv(t.det(r)).expect("determinant reduces to 1");
        Mat2::new(r.mul(u, t.a), r.mul(u, t.b), t.c, t.d)
    }

    /// `1 + p X~  ->  X`.
    pub fn kernel_coordinate(&self, k: &Mat2<GrElem>) -> Result<TraceZeroMat<Fq>> {
        let r = &self.ring;
        let x = k.sub(r, &Mat2::identity(r));
        let m = Mat2::new(
            r.divide_by_p(x.a)?,
            r.divide_by_p(x.b)?,
            r.divide_by_p(x.c)?,
            r.divide_by_p(x.d)?,
        );
        TraceZeroMat::<Fq>::new(self.ring.field(), m)
    }

    /// The element `(1 + p mu~) s(g)`.
    pub fn compose(&self, mu: &TraceZeroMat<Fq>, g: &Mat2<Fq>) -> Mat2<GrElem> {
        let r = &self.ring;
        let k = Mat2::identity(r).add(r, &mu.as_mat().map(|&e| r.times_p(e)));
        k.mul(r, &self.section(g))
    }

    /// The same extension as a table-driven twisted product of SL_2(F_q) by
    /// M_2^0(F_q), with cocycle `x(g, h) = s(g) s(h) s(gh)^-1` read in the
    /// kernel. Group elements are indexed in enumeration order; module
    /// elements by their F_p-coordinates `(a, b, c)`.
    pub fn to_twisted_product(&self) -> Result<TwistedProduct> {
        let f = self.ring.field();
        let r = &self.ring;
        let elems = enumerate_gl2d(&self.spec, 1 << 24)?;
        let table = GroupTable::from_elements(&elems, |a, b| a.mul(f, b))?;
        let index = index_map(&elems);
        let module = ModuleSpace::new(f.p(), 3 * f.d() as usize)?;
        let encode = |m: &Mat2<Fq>| {
            let v: Vec<u32> = to_vector(f, &[*m]).iter().map(|c| c.value() as u32).collect();
            module.encode(&v)
        };
        let mats: Vec<TraceZeroMat<Fq>> = enumerate_trace_zero(f, 1 << 24)?;
        let mut by_code = vec![TraceZeroMat::<Fq>::scalar(f, Fq::ZERO)?; module.size() as usize];
        for m in mats {
            let code = encode(m.as_mat());
            by_code[code as usize] = m;
        }
        let n = elems.len();
        let mut action = vec![0u32; n * module.size() as usize];
        for (gi, g) in elems.iter().enumerate() {
            for (code, m) in by_code.iter().enumerate() {
                action[gi * module.size() as usize + code] = encode(conj(f, g, m)?.as_mat());
            }
        }
        let sections: Vec<Mat2<GrElem>> = elems.iter().map(|g| self.section(g)).collect();
        let inverses: Vec<Mat2<GrElem>> = sections
            .iter()
            .map(|s| s.inverse(r).expect("section lands in SL_2"))
            .collect();
        let mut cocycle = vec![0u32; n * n];
        for gi in 0..n {
            for hi in 0..n {
                let gh = table.mul(gi as u32, hi as u32) as usize;
                let k = sections[gi].mul(r, &sections[hi]).mul(r, &inverses[gh]);
                cocycle[gi * n + hi] = encode(self.kernel_coordinate(&k)?.as_mat());
            }
        }
        let gens = self.spec.generators().iter().map(|g| index[g]).collect();
        TwistedProduct::new(table, module, action, cocycle, gens)
    }

    /// Checks that `(m, g) -> (1 + p m~) s(g)` is an isomorphism from `tp`
    /// (as built by [`Self::to_twisted_product`]) onto SL_2(W_2(F_q)): it is
    /// injective with image of the right size, and multiplicative against
    /// every element of the associativity generating set.
    pub fn check_isomorphism(&self, tp: &TwistedProduct) -> Result<()> {
        let f = self.ring.field();
        let r = &self.ring;
        let elems = enumerate_gl2d(&self.spec, 1 << 24)?;
        let module = *tp.module();
        let mats: FxHashMap<u32, TraceZeroMat<Fq>> = enumerate_trace_zero(f, 1 << 24)?
            .into_iter()
            .map(|m| {
                let v: Vec<u32> = to_vector(f, &[*m.as_mat()]).iter().map(|c| c.value() as u32).collect();
                (module.encode(&v), m)
            })
            .collect();
        let image = |e: u32| {
            let (m, g) = tp.parts(e);
            self.compose(&mats[&m], &elems[g as usize])
        };
        let images: Vec<Mat2<GrElem>> = (0..tp.order() as u32).map(image).collect();
        let distinct = index_map(&images).len();
        if distinct as u64 != tp.order() || tp.order() != self.order() {
            return Err(Error::TheoremViolation("the matrix model is not a bijection".into()));
        }
        for s in tp.generating_set() {
            for x in 0..tp.order() as u32 {
                if images[tp.mul(x, s) as usize] != images[x as usize].mul(r, &images[s as usize]) {
                    return Err(Error::TheoremViolation(format!(
                        "the matrix model is not multiplicative at ({x}, {s})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `|SL_2(F_q)| q^3`.
    pub fn order(&self) -> u64 {
        self.spec.order() as u64 * self.kernel.len() as u64
    }

    /// In characteristic 2, the map `M_2^0(F_q) -> M_2^0(F_q) / scalars`
    /// reading off the coordinates `(b, c)`, on module codes.
    pub fn scalar_quotient_map(&self, tp: &TwistedProduct) -> Result<(ModuleSpace, Vec<u32>)> {
        let f = self.ring.field();
        if f.p() != 2 {
            return Err(Error::Parameter(
                "scalars are trace-zero only in characteristic 2".into(),
            ));
        }
        let d = f.d() as usize;
        let source = tp.module();
        let target = ModuleSpace::new(2, 2 * d)?;
        let map = (0..source.size())
            .map(|code| target.encode(&source.decode(code)[d..]))
            .collect();
        Ok((target, map))
    }
}

impl Extension for SlWittExtension {
    type Elem = Mat2<GrElem>;
    type Quot = Mat2<Fq>;

    fn identity(&self) -> Mat2<GrElem> {
        Mat2::identity(&self.ring)
    }
    fn mul(&self, a: &Mat2<GrElem>, b: &Mat2<GrElem>) -> Mat2<GrElem> {
        a.mul(&self.ring, b)
    }
    fn project(&self, a: &Mat2<GrElem>) -> Mat2<Fq> {
        reduce(&self.ring, a)
    }
    fn quotient_identity(&self) -> Mat2<Fq> {
        Mat2::identity(self.ring.field())
    }
    fn quotient_mul(&self, a: &Mat2<Fq>, b: &Mat2<Fq>) -> Mat2<Fq> {
        a.mul(self.ring.field(), b)
    }
    fn quotient_order(&self) -> u64 {
        self.spec.order() as u64
    }
    fn kernel_order(&self) -> u64 {
        self.kernel.len() as u64
    }
    fn lifts(&self, g: &Mat2<Fq>) -> Vec<Mat2<GrElem>> {
        let s = self.section(g);
        self.kernel.iter().map(|k| k.mul(&self.ring, &s)).collect()
    }
}

/// `GL_2^D(T) -> GL_2^D(F_q)`, split by the constant matrices.
#[derive(Clone, Debug)]
pub struct ConstantLiftExtension {
    algebra: LocalAlgebra,
    spec: GroupSpec,
    kernel: Vec<TraceZeroMat<TElem>>,
}

impl ConstantLiftExtension {
    pub fn new(algebra: LocalAlgebra, spec: GroupSpec, caps: &Caps) -> Result<Self> {
        if algebra.field() != spec.field() {
            return Err(Error::Parameter("algebra and group use different fields".into()));
        }
        let q = algebra.field().q() as u128;
        caps.check_enumeration("kernel of reduction", q.pow(3 * algebra.m() as u32))?;
        let kernel = crate::matgrp::enumerate_trace_zero_ideal(&algebra, caps.enumeration)?.collect();
        Ok(ConstantLiftExtension { algebra, spec, kernel })
    }
}

impl Extension for ConstantLiftExtension {
    type Elem = Mat2<TElem>;
    type Quot = Mat2<Fq>;

    fn identity(&self) -> Mat2<TElem> {
        Mat2::identity(&self.algebra)
    }
    fn mul(&self, a: &Mat2<TElem>, b: &Mat2<TElem>) -> Mat2<TElem> {
        a.mul(&self.algebra, b)
    }
    fn project(&self, a: &Mat2<TElem>) -> Mat2<Fq> {
        reduce(&self.algebra, a)
    }
    fn quotient_identity(&self) -> Mat2<Fq> {
        Mat2::identity(self.spec.field())
    }
    fn quotient_mul(&self, a: &Mat2<Fq>, b: &Mat2<Fq>) -> Mat2<Fq> {
        a.mul(self.spec.field(), b)
    }
    fn quotient_order(&self) -> u64 {
        self.spec.order() as u64
    }
    fn kernel_order(&self) -> u64 {
        self.kernel.len() as u64
    }
    fn lifts(&self, g: &Mat2<Fq>) -> Vec<Mat2<TElem>> {
        self.kernel
            .iter()
            .map(|mu| embed_unipotent(&self.algebra, mu, g))
            .collect()
    }
}

impl Extension for TwistedProduct {
    type Elem = u32;
    type Quot = u32;

    fn identity(&self) -> u32 {
        TwistedProduct::identity(self)
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        TwistedProduct::mul(self, *a, *b)
    }
    fn project(&self, a: &u32) -> u32 {
        TwistedProduct::project(self, *a)
    }
    fn quotient_identity(&self) -> u32 {
        self.group().identity()
    }
    fn quotient_mul(&self, a: &u32, b: &u32) -> u32 {
        self.group().mul(*a, *b)
    }
    fn quotient_order(&self) -> u64 {
        self.group().order() as u64
    }
    fn kernel_order(&self) -> u64 {
        self.module().size() as u64
    }
    fn lifts(&self, g: &u32) -> Vec<u32> {
        (0..self.module().size()).map(|m| self.element(m, *g)).collect()
    }
}
