//! Submodules of M_2^0(F_q)^m under coordinate-wise conjugation by
//! GL_2^D(F_q).
//!
//! A submodule is stored as an F_p-subspace of the `3dm`-dimensional space
//! of tuples `(A_1, ..., A_m)`, each `A_k = [[a, b], [c, -a]]` contributing
//! the F_p-coordinates of `a`, `b` and `c`, together with its materialized
//! element list.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::{Field, Fq};
use crate::linalg::{self, Echelon};
use crate::matgrp::{GroupSpec, Mat2};

/// An element of M_2^0(F_q)^m.
pub type Tuple = Vec<Mat2<Fq>>;

#[derive(Clone, Debug)]
pub struct SubmoduleSet {
    spec: GroupSpec,
    m: usize,
    span: Echelon,
    elements: Vec<Tuple>,
}

impl PartialEq for SubmoduleSet {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.m == other.m && self.elements == other.elements
    }
}

impl Eq for SubmoduleSet {}

fn prime_field(f: &Field) -> Field {
    Field::standard(f.p(), 1).expect("prime field of a valid field")
}

/// F_p-coordinates of a tuple.
pub fn to_vector(f: &Field, t: &[Mat2<Fq>]) -> Vec<Fq> {
    let mut v = Vec::with_capacity(3 * f.d() as usize * t.len());
    for m in t {
        for e in [m.a, m.b, m.c] {
            v.extend(f.coeffs(e).into_iter().map(|c| Fq::from_index(c as usize)));
        }
    }
    v
}

/// Inverse of [`to_vector`].
pub fn from_vector(f: &Field, v: &[Fq]) -> Tuple {
    let d = f.d() as usize;
    let entry = |chunk: &[Fq]| {
        let coeffs: Vec<u32> = chunk.iter().map(|c| c.value() as u32).collect();
        f.from_coeffs(&coeffs).expect("coordinates are residues mod p")
    };
    v.chunks(3 * d)
        .map(|c| {
            let a = entry(&c[..d]);
            Mat2::new(a, entry(&c[d..2 * d]), entry(&c[2 * d..]), f.neg(a))
        })
        .collect()
}

fn conj_tuple(f: &Field, g: &Mat2<Fq>, gi: &Mat2<Fq>, t: &[Mat2<Fq>]) -> Tuple {
    t.iter().map(|m| g.mul(f, m).mul(f, gi)).collect()
}

fn check_tuple(f: &Field, m: usize, t: &[Mat2<Fq>]) -> Result<()> {
    if t.len() != m {
        return Err(Error::Parameter(format!(
            "tuple of length {} in an ambient with m = {m}",
            t.len()
        )));
    }
    for a in t {
        if a.entries().iter().any(|&&e| !f.contains(e)) {
            return Err(Error::Parameter("matrix entry outside the field".into()));
        }
        if !a.trace(f).is_zero() {
            return Err(Error::Domain(format!("{} has nonzero trace", a.format(f))));
        }
    }
    Ok(())
}

impl SubmoduleSet {
    fn from_span(spec: &GroupSpec, m: usize, span: Echelon, cap: u64) -> Result<Self> {
        let f = spec.field();
        let mut elements: Vec<Tuple> = span.span_elements(cap)?.iter().map(|v| from_vector(f, v)).collect();
        elements.sort_unstable();
        Ok(SubmoduleSet {
            spec: spec.clone(),
            m,
            span,
            elements,
        })
    }

    /// Wraps an explicit element set without checking closure; see
    /// [`SubmoduleSet::is_closed`].
    pub fn from_elements(spec: &GroupSpec, m: usize, elements: Vec<Tuple>) -> Result<Self> {
        let f = spec.field();
        for t in &elements {
            check_tuple(f, m, t)?;
        }
        let span = Echelon::from_vectors(
            prime_field(f),
            3 * f.d() as usize * m,
            elements.iter().map(|t| to_vector(f, t)),
        );
        let mut elements = elements;
        elements.sort_unstable();
        elements.dedup();
        Ok(SubmoduleSet {
            spec: spec.clone(),
            m,
            span,
            elements,
        })
    }

    /// The zero submodule.
    pub fn zero(spec: &GroupSpec, m: usize) -> Self {
        let f = spec.field();
        let zero = vec![Mat2::zero(f); m];
        SubmoduleSet::from_elements(spec, m, vec![zero]).expect("zero tuple is valid")
    }

    /// All of M_2^0(F_q)^m.
    pub fn ambient(spec: &GroupSpec, m: usize, cap: u64) -> Result<Self> {
        let f = spec.field();
        let n = 3 * f.d() as usize * m;
        let pf = prime_field(f);
        let span = Echelon::from_vectors(
            pf,
            n,
            (0..n).map(|i| {
                let mut v = vec![Fq::ZERO; n];
                v[i] = Fq::ONE;
                v
            }),
        );
        SubmoduleSet::from_span(spec, m, span, cap)
    }

    /// The scalar matrices `{l Id}` (nonzero only in characteristic 2), m = 1.
    pub fn scalars(spec: &GroupSpec, cap: u64) -> Result<Self> {
        let f = spec.field();
        let gens: Vec<Tuple> = f
            .elements()
            .filter(|&l| f.add(l, l).is_zero())
            .map(|l| vec![Mat2::scalar(f, l)])
            .collect();
        let span = Echelon::from_vectors(prime_field(f), 3 * f.d() as usize, gens.iter().map(|t| to_vector(f, t)));
        SubmoduleSet::from_span(spec, 1, span, cap)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Dimension of the F_p-span of the elements.
    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    /// Sorted element list.
    pub fn elements(&self) -> &[Tuple] {
        &self.elements
    }

    pub fn contains(&self, t: &[Mat2<Fq>]) -> bool {
        self.elements.binary_search_by(|e| e.as_slice().cmp(t)).is_ok()
    }

    /// F_p-basis of the span.
    pub fn basis(&self) -> Vec<Tuple> {
        let f = self.spec.field();
        self.span.rows().iter().map(|r| from_vector(f, r)).collect()
    }

    /// Closed under addition and under conjugation by every element of
    /// GL_2^D(F_q).
    pub fn is_closed(&self) -> bool {
        let p = self.spec.field().p() as u128;
        if Some(self.elements.len() as u128) != p.checked_pow(self.dim() as u32) {
            return false;
        }
        let f = self.spec.field();
        let basis = self.basis();
        self.spec.generators().iter().all(|g| {
            let gi = g.inverse(f).expect("generators are invertible");
            basis
                .iter()
                .all(|b| self.span.contains(&to_vector(f, &conj_tuple(f, g, &gi, b))))
        })
    }

    /// The coordinate-`i` projection, as a submodule of M_2^0(F_q).
    pub fn projection(&self, i: usize, cap: u64) -> Result<SubmoduleSet> {
        let f = self.spec.field();
        let gens: Vec<Tuple> = self.basis().into_iter().map(|t| vec![t[i]]).collect();
        let span = Echelon::from_vectors(prime_field(f), 3 * f.d() as usize, gens.iter().map(|t| to_vector(f, t)));
        SubmoduleSet::from_span(&self.spec, 1, span, cap)
    }

    /// Elements supported on coordinate `i` only, as a submodule of M_2^0(F_q).
    pub fn coordinate_intersection(&self, i: usize) -> SubmoduleSet {
        let f = self.spec.field();
        let zero = Mat2::zero(f);
        let elems: Vec<Tuple> = self
            .elements
            .iter()
            .filter(|t| t.iter().enumerate().all(|(j, a)| j == i || *a == zero))
            .map(|t| vec![t[i]])
            .collect();
        SubmoduleSet::from_elements(&self.spec, 1, elems).expect("elements come from a valid set")
    }

    /// The image under a permutation of coordinates: coordinate `k` of the
    /// result is coordinate `perm[k]` of the input.
    pub fn permute_coordinates(&self, perm: &[usize]) -> Result<SubmoduleSet> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.m).collect::<Vec<_>>() {
            return Err(Error::Parameter(format!(
                "{perm:?} is not a permutation of 0..{}",
                self.m
            )));
        }
        let elems = self
            .elements
            .iter()
            .map(|t| perm.iter().map(|&j| t[j]).collect())
            .collect();
        SubmoduleSet::from_elements(&self.spec, self.m, elems)
    }
}

/// The smallest submodule containing `gens`: closure under addition and
/// conjugation, computed by spinning an F_p-basis under the group generators.
pub fn module_closure(spec: &GroupSpec, m: usize, gens: &[Tuple], cap: u64) -> Result<SubmoduleSet> {
    let f = spec.field();
    for t in gens {
        check_tuple(f, m, t)?;
    }
    let span = spin(spec, m, Echelon::new(prime_field(f), 3 * f.d() as usize * m), gens);
    SubmoduleSet::from_span(spec, m, span, cap)
}

fn spin(spec: &GroupSpec, _m: usize, mut span: Echelon, gens: &[Tuple]) -> Echelon {
    let f = spec.field();
    let group: Vec<(Mat2<Fq>, Mat2<Fq>)> = spec
        .generators()
        .into_iter()
        .map(|g| {
            let gi = g.inverse(f).expect("generators are invertible");
            (g, gi)
        })
        .collect();
    let mut queue: Vec<Tuple> = Vec::new();
    for t in gens {
        if span.insert(to_vector(f, t)) {
            queue.push(t.clone());
        }
    }
    while let Some(t) = queue.pop() {
        for (g, gi) in &group {
            let u = conj_tuple(f, g, gi, &t);
            if span.insert(to_vector(f, &u)) {
                queue.push(u);
            }
        }
    }
    span
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubmoduleClass {
    /// All of M_2^0(F_q).
    Full,
    /// An F_p-subspace of the scalars, with its F_p-dimension.
    ScalarSubspace(usize),
}

/// Classifies a closed submodule of M_2^0(F_q): everything, or scalars only.
pub fn classify_submodule(s: &SubmoduleSet) -> Result<SubmoduleClass> {
    if s.m != 1 {
        return Err(Error::Parameter(format!("classification needs m = 1, got m = {}", s.m)));
    }
    if !s.is_closed() {
        return Err(Error::Contract("set is not a closed submodule".into()));
    }
    let f = s.spec.field();
    let q = f.q() as usize;
    if s.len() == q * q * q {
        return Ok(SubmoduleClass::Full);
    }
    if s.elements.iter().all(|t| t[0].is_scalar(f)) {
        return Ok(SubmoduleClass::ScalarSubspace(s.dim()));
    }
    Err(Error::TheoremViolation(format!(
        "submodule of size {} is neither scalar nor everything",
        s.len()
    )))
}

/// A closed `W` with `ambient = S (+) W`, found by exhaustive search over
/// generator sets, or `None` when no complement exists.
pub fn complement_exists(s: &SubmoduleSet, ambient: &SubmoduleSet, cap: u64) -> Result<Option<SubmoduleSet>> {
    if s.spec != ambient.spec || s.m != ambient.m {
        return Err(Error::Parameter("submodules of different ambients".into()));
    }
    if !s.is_closed() || !ambient.is_closed() {
        return Err(Error::Contract("inputs must be closed submodules".into()));
    }
    if s.basis()
        .iter()
        .any(|b| !ambient.span.contains(&to_vector(s.spec.field(), b)))
    {
        return Err(Error::Contract("S is not contained in the ambient module".into()));
    }
    let needed = ambient.dim() - s.dim();
    let start = Echelon::new(s.span.field().clone(), s.span.len());
    let mut visited: FxHashSet<Vec<Vec<Fq>>> = FxHashSet::default();
    let found = complement_dfs(s, ambient, needed, start, &mut visited);
    match found {
        Some(w) => Ok(Some(SubmoduleSet::from_span(&s.spec, s.m, w, cap)?)),
        None => Ok(None),
    }
}

fn complement_dfs(
    s: &SubmoduleSet,
    ambient: &SubmoduleSet,
    needed: usize,
    w: Echelon,
    visited: &mut FxHashSet<Vec<Vec<Fq>>>,
) -> Option<Echelon> {
    if w.dim() == needed {
        return Some(w);
    }
    let f = s.spec.field();
    let mut s_plus_w = s.span.clone();
    for r in w.rows() {
        s_plus_w.insert(r.clone());
    }
    for t in &ambient.elements {
        let v = to_vector(f, t);
        if s_plus_w.contains(&v) {
            continue;
        }
        let grown = spin(&s.spec, s.m, w.clone(), std::slice::from_ref(t));
        // |S| |W| = |ambient| forces dim W = needed and W meeting S trivially
        if grown.dim() > needed || grown.intersection_dim(&s.span) > 0 {
            continue;
        }
        if !visited.insert(grown.rows().to_vec()) {
            continue;
        }
        if let Some(found) = complement_dfs(s, ambient, needed, grown, visited) {
            return Some(found);
        }
    }
    None
}

/// A concrete module `M_2^0(F_q)^alpha (+) C_2^beta` inside M_2^0(F_q)^m:
/// the first `alpha` coordinates are full, coordinate `alpha + k` is the
/// F_2-span of `l Id` for the scalars `l` in block `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleEmbedding {
    alpha: usize,
    blocks: Vec<Vec<Fq>>,
}

/// `{"alpha": int, "blocks": [[coeffs, ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingWire {
    pub alpha: usize,
    pub blocks: Vec<Vec<Vec<u32>>>,
}

impl ModuleEmbedding {
    /// `m = alpha + blocks.len()`; each block is a list of F_2-independent
    /// nonzero scalars (empty for a zero coordinate).
    pub fn new(f: &Field, alpha: usize, blocks: Vec<Vec<Fq>>) -> Result<Self> {
        for block in &blocks {
            if block.is_empty() {
                continue;
            }
            if f.p() != 2 {
                return Err(Error::Domain(
                    "scalar blocks need characteristic 2 (no trace-zero scalars otherwise)".into(),
                ));
            }
            if block.iter().any(|&l| !f.contains(l)) {
                return Err(Error::Parameter("block scalar outside the field".into()));
            }
            let mut span = Echelon::new(prime_field(f), f.d() as usize);
            for &l in block {
                let v = f.coeffs(l).into_iter().map(|c| Fq::from_index(c as usize)).collect();
                if !span.insert(v) {
                    return Err(Error::Domain(format!(
                        "block scalars {:?} are not F_2-independent",
                        block.iter().map(|&l| f.format(l)).collect::<Vec<_>>()
                    )));
                }
            }
        }
        Ok(ModuleEmbedding { alpha, blocks })
    }

    /// The default module for `(alpha, beta)`: `beta` scalars dealt
    /// round-robin over the `m - alpha` remaining coordinates, block `k`
    /// using `1, x, x^2, ...`.
    pub fn canonical(f: &Field, m: usize, alpha: usize, beta: usize) -> Result<Self> {
        let d = f.d() as usize;
        if alpha > m {
            return Err(Error::Domain(format!("alpha = {alpha} exceeds m = {m}")));
        }
        if beta > d * (m - alpha) {
            return Err(Error::Domain(format!(
                "beta = {beta} exceeds d(m - alpha) = {}",
                d * (m - alpha)
            )));
        }
        if f.p() != 2 && beta > 0 {
            return Err(Error::Domain("beta must be 0 in odd characteristic".into()));
        }
        let s = m - alpha;
        let mut sizes = vec![0usize; s];
        for i in 0..beta {
            sizes[i % s] += 1;
        }
        let blocks = sizes
            .into_iter()
            .map(|n| {
                (0..n)
                    .map(|i| {
                        let mut c = vec![0u32; i + 1];
                        c[i] = 1;
                        f.from_coeffs(&c).expect("basis monomial")
                    })
                    .collect()
            })
            .collect();
        ModuleEmbedding::new(f, alpha, blocks)
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn beta(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn m(&self) -> usize {
        self.alpha + self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<Fq>] {
        &self.blocks
    }

    /// `q^(3 alpha) 2^beta`, saturating.
    pub fn size(&self, f: &Field) -> u128 {
        let q = f.q() as u128;
        q.checked_pow(3 * self.alpha as u32)
            .and_then(|a| a.checked_mul(1u128.checked_shl(self.beta() as u32)?))
            .unwrap_or(u128::MAX)
    }

    pub fn to_wire(&self, f: &Field) -> EmbeddingWire {
        EmbeddingWire {
            alpha: self.alpha,
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().map(|&l| f.coeffs(l)).collect())
                .collect(),
        }
    }

    pub fn from_wire(f: &Field, w: &EmbeddingWire) -> Result<Self> {
        let blocks = w
            .blocks
            .iter()
            .map(|b| b.iter().map(|c| f.from_coeffs(c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        ModuleEmbedding::new(f, w.alpha, blocks)
    }
}

/// The explicit submodule described by an embedding.
pub fn realize_embedding(spec: &GroupSpec, e: &ModuleEmbedding, cap: u64) -> Result<SubmoduleSet> {
    let f = spec.field();
    let m = e.m();
    let d = f.d() as usize;
    let n = 3 * d * m;
    let mut span = Echelon::new(prime_field(f), n);
    for i in 0..3 * d * e.alpha {
        let mut v = vec![Fq::ZERO; n];
        v[i] = Fq::ONE;
        span.insert(v);
    }
    let zero = Mat2::zero(f);
    for (k, block) in e.blocks.iter().enumerate() {
        for &l in block {
            let mut t = vec![zero; m];
            t[e.alpha + k] = Mat2::scalar(f, l);
            span.insert(to_vector(f, &t));
        }
    }
    let required = e.size(f);
    if required > cap as u128 {
        return Err(Error::capacity("module realization", required, cap as u128));
    }
    let set = SubmoduleSet::from_span(spec, m, span, cap)?;
    if !set.is_closed() {
        return Err(Error::TheoremViolation("realized module is not closed".into()));
    }
    Ok(set)
}

/// Outcome of splitting a submodule of M_2^0(F_q)^m into coordinate pieces.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// `N ∩ M_i` for each coordinate `i`.
    pub intersections: Vec<SubmoduleClass>,
    /// The coordinate projections of `N`.
    pub projections: Vec<SubmoduleClass>,
    /// Number of full copies of M_2^0(F_q).
    pub full_copies: usize,
    /// F_p-dimension of the scalar part.
    pub scalar_dim: usize,
    /// Invertible `m x m` matrix over F_q (rows) moving `N` into the form
    /// `M_2^0(F_q)^k (+) L` with `L` scalar.
    pub coordinate_change: Vec<Vec<Fq>>,
    /// Whether `N` already had that form without a change of coordinates.
    pub identity_sufficed: bool,
}

/// Coordinates of the quotient by the scalars: `(b, c)` in characteristic
/// 2 (where `a = d` is the scalar part), `(a, b, c)` otherwise.
fn quotient_coords(f: &Field, a: &Mat2<Fq>) -> Vec<Fq> {
    if f.p() == 2 {
        vec![a.b, a.c]
    } else {
        vec![a.a, a.b, a.c]
    }
}

fn apply_change(f: &Field, c: &[Vec<Fq>], t: &[Mat2<Fq>]) -> Tuple {
    c.iter()
        .map(|row| {
            row.iter()
                .zip(t)
                .fold(Mat2::zero(f), |acc, (&s, a)| acc.add(f, &a.scale(f, &s)))
        })
        .collect()
}

/// Decomposes a closed `N` inside M_2^0(F_q)^m as `M_2^0(F_q)^k (+) L`
/// with `L` a space of scalar tuples, after an F_q-linear change of
/// coordinates found by Gaussian elimination on the image of `N` in the
/// quotient by the scalars.
pub fn decompose_product_submodule(n: &SubmoduleSet, cap: u64) -> Result<Decomposition> {
    let f = n.spec.field();
    let m = n.m;
    if !n.is_closed() {
        return Err(Error::Contract("set is not a closed submodule".into()));
    }
    let mut intersections = Vec::with_capacity(m);
    let mut projections = Vec::with_capacity(m);
    for i in 0..m {
        intersections.push(classify_submodule(&n.coordinate_intersection(i))?);
        projections.push(classify_submodule(&n.projection(i, cap)?)?);
    }

    // F_q-row space of the image in the quotient
    let mut rows = Echelon::new(f.clone(), m);
    for b in n.basis() {
        let qc: Vec<Vec<Fq>> = b.iter().map(|a| quotient_coords(f, a)).collect();
        for j in 0..qc[0].len() {
            rows.insert(qc.iter().map(|c| c[j]).collect());
        }
    }
    let k = rows.dim();
    // basis r_1..r_k, completed by unit vectors off the pivots
    let mut columns: Vec<Vec<Fq>> = rows.rows().to_vec();
    for i in (0..m).filter(|i| !rows.pivots().contains(i)) {
        let mut e = vec![Fq::ZERO; m];
        e[i] = Fq::ONE;
        columns.push(e);
    }
    let b: Vec<Vec<Fq>> = (0..m).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let c = linalg::invert(f, &b).ok_or_else(|| Error::TheoremViolation("completed basis is singular".into()))?;

    let moved = SubmoduleSet::from_elements(&n.spec, m, n.elements.iter().map(|t| apply_change(f, &c, t)).collect())?;
    let q = f.q() as u128;
    for i in 0..k {
        if classify_submodule(&moved.coordinate_intersection(i))? != SubmoduleClass::Full {
            return Err(Error::TheoremViolation(format!(
                "coordinate {i} of the transformed module is not full"
            )));
        }
    }
    let zero = Mat2::zero(f);
    let rest: Vec<Tuple> = moved
        .elements
        .iter()
        .filter(|t| t[..k].iter().all(|a| *a == zero))
        .cloned()
        .collect();
    if rest.iter().any(|t| t.iter().any(|a| !a.is_scalar(f))) {
        return Err(Error::TheoremViolation("remaining coordinates are not scalar".into()));
    }
    let rest = SubmoduleSet::from_elements(&n.spec, m, rest)?;
    let full_part = q.pow(3 * k as u32);
    if full_part * rest.len() as u128 != n.len() as u128 {
        return Err(Error::TheoremViolation(format!(
            "|N| = {} but the pieces have sizes {full_part} and {}",
            n.len(),
            rest.len()
        )));
    }
    let identity_sufficed = (0..m).all(|i| (0..m).all(|j| c[i][j] == if i == j { Fq::ONE } else { Fq::ZERO }));
    Ok(Decomposition {
        intersections,
        projections,
        full_copies: k,
        scalar_dim: rest.dim(),
        coordinate_change: c,
        identity_sufficed,
    })
}
