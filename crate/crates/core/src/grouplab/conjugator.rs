//! Straightening subgroups of GL_2^D(T) that reduce onto GL_2^D(F_q): find
//! `u = 1 + U` with `U` over the maximal ideal such that `u G u^-1` is
//! `(1 + M) x GL_2^D(F_q)` with the constant copy of GL_2^D(F_q).

use rand::Rng;
use rustc_hash::FxHashSet;

use super::closure_by;
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ffield::Fq;
use crate::localalg::{LocalAlgebra, TElem};
use crate::matgrp::{lift, reduce, GroupSpec, Mat2, TraceZeroMat};
use crate::modlat::{module_closure, SubmoduleSet, Tuple};

#[derive(Clone, Debug)]
pub struct Straightening {
    /// `u` with reduction 1.
    pub conjugator: Mat2<TElem>,
    /// The kernel part of `u G u^-1`, as `(A_1, ..., A_m)` for `1 + sum A_k X_k`.
    pub module: SubmoduleSet,
    /// Candidates examined before `conjugator` was accepted.
    pub candidates_tried: u64,
}

/// `1 + sum_k A_k X_k` for a matrix tuple.
fn unipotent(t: &LocalAlgebra, comps: &[Mat2<Fq>]) -> Mat2<TElem> {
    let entry = |pick: fn(&Mat2<Fq>) -> Fq, diag: bool| {
        let eps: Vec<Fq> = comps.iter().map(pick).collect();
        t.element(if diag { Fq::ONE } else { Fq::ZERO }, &eps)
            .expect("one coordinate per generator")
    };
    Mat2::new(
        entry(|m| m.a, true),
        entry(|m| m.b, false),
        entry(|m| m.c, false),
        entry(|m| m.d, true),
    )
}

/// Matrix tuple `(A_1, ..., A_m)` numbered `index` in base `q^4` digits.
fn matrix_tuple(t: &LocalAlgebra, mut index: u64) -> Vec<Mat2<Fq>> {
    let q = t.field().q() as u64;
    let mut next = || {
        let v = Fq::from_index((index % q) as usize);
        index /= q;
        v
    };
    (0..t.m())
        .map(|_| {
            let (a, b, c, d) = (next(), next(), next(), next());
            Mat2::new(a, b, c, d)
        })
        .collect()
}

/// Searches the `q^(4m)` matrices `u = 1 + U`, `U` over the maximal ideal,
/// in enumeration order (so `u = 1` first), for one that conjugates the
/// constant generators of GL_2^D(F_q) into `group`. The accepted `u` is then
/// checked directly: `u G u^-1` must be the product of its kernel part, a
/// closed submodule, with the constant group.
pub fn split_conjugator(
    t: &LocalAlgebra,
    spec: &GroupSpec,
    group: &[Mat2<TElem>],
    caps: &Caps,
) -> Result<Straightening> {
    if t.field() != spec.field() {
        return Err(Error::Parameter("algebra and group use different fields".into()));
    }
    if let Some(g) = group.iter().find(|g| !spec.contains_over(t, g)) {
        return Err(Error::Contract(format!("{} is not in GL_2^D(T)", g.format(t))));
    }
    let members: FxHashSet<Mat2<TElem>> = group.iter().cloned().collect();
    let reductions: FxHashSet<Mat2<Fq>> = group.iter().map(|g| reduce(t, g)).collect();
    if reductions.len() as u128 != spec.order() {
        return Err(Error::Contract(format!(
            "reduction covers {} of {} elements of {}",
            reductions.len(),
            spec.order(),
            spec.name()
        )));
    }
    let q = t.field().q() as u128;
    let candidates = q.pow(4 * t.m() as u32);
    caps.check_enumeration("conjugator candidates", candidates)?;
    let constants: Vec<Mat2<TElem>> = spec.generators().iter().map(|h| lift(t, h)).collect();
    for index in 0..candidates as u64 {
        let comps = matrix_tuple(t, index);
        let u = unipotent(t, &comps);
        let neg: Vec<Mat2<Fq>> = comps
            .iter()
            .map(|m| m.scale(t.field(), &t.field().from_int(-1)))
            .collect();
        let ui = unipotent(t, &neg);
        let hits = constants.iter().all(|h| members.contains(&ui.mul(t, h).mul(t, &u)));
        if !hits {
            continue;
        }
        let module = straightened_module(t, spec, group, &u, &ui)?;
        return Ok(Straightening {
            conjugator: u,
            module,
            candidates_tried: index + 1,
        });
    }
    Err(Error::TheoremViolation(
        "no conjugator with trivial reduction straightens the subgroup".into(),
    ))
}

/// Kernel part of `u G u^-1`, after checking the unique factorization
/// `g = (1 + mu) h` of every element.
fn straightened_module(
    t: &LocalAlgebra,
    spec: &GroupSpec,
    group: &[Mat2<TElem>],
    u: &Mat2<TElem>,
    ui: &Mat2<TElem>,
) -> Result<SubmoduleSet> {
    let conj: Vec<Mat2<TElem>> = group.iter().map(|g| u.mul(t, g).mul(t, ui)).collect();
    let one = Mat2::identity(t);
    let mut kernel: Vec<Tuple> = Vec::new();
    for g in &conj {
        if reduce(t, g) == Mat2::identity(t.field()) {
            kernel.push(TraceZeroMat::<TElem>::new(t, g.sub(t, &one))?.components());
        }
    }
    let module = SubmoduleSet::from_elements(spec, t.m(), kernel)?;
    if !module.is_closed() {
        return Err(Error::TheoremViolation("kernel part is not a closed submodule".into()));
    }
    if module.len() as u128 * spec.order() != conj.len() as u128 {
        return Err(Error::TheoremViolation(format!(
            "|u G u^-1| = {} but |M| |GL_2^D| = {}",
            conj.len(),
            module.len() as u128 * spec.order()
        )));
    }
    for g in &conj {
        let h = reduce(t, g);
        let hi = h.inverse(t.field()).expect("reduction is invertible");
        let mu = g.mul(t, &lift(t, &hi)).sub(t, &one);
        let comps = TraceZeroMat::<TElem>::new(t, mu)?.components();
        if !module.contains(&comps) {
            return Err(Error::TheoremViolation(format!(
                "{} does not factor through the kernel part",
                g.format(t)
            )));
        }
    }
    Ok(module)
}

/// A seeded random subgroup of GL_2^D(T) reducing onto GL_2^D(F_q).
#[derive(Clone, Debug)]
pub struct RandomSubgroup {
    pub elements: Vec<Mat2<TElem>>,
    /// The submodule the unconjugated generators were drawn over.
    pub source_module: SubmoduleSet,
    /// The conjugating matrix applied last (identity when untwisted).
    pub twist: Mat2<TElem>,
}

/// Draws a submodule `S` as the closure of up to two random tuples, lifts
/// each group generator `h` to `(1 + mu) h` with `mu` random in `S`, closes,
/// and optionally conjugates by a random `v` with reduction 1.
pub fn random_subgroup<R: Rng>(
    t: &LocalAlgebra,
    spec: &GroupSpec,
    rng: &mut R,
    twist: bool,
    caps: &Caps,
) -> Result<RandomSubgroup> {
    let f = t.field();
    let q = f.q() as usize;
    let m = t.m();
    let random_field = |rng: &mut R| Fq::from_index(rng.gen_range(0..q));
    let mut seeds: Vec<Tuple> = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let tuple = (0..m)
            .map(|_| {
                let (a, b, c) = (random_field(rng), random_field(rng), random_field(rng));
                *TraceZeroMat::<Fq>::from_abc(f, a, b, c).as_mat()
            })
            .collect();
        seeds.push(tuple);
    }
    let source = module_closure(spec, m, &seeds, caps.enumeration)?;
    let bound = source.len() as u128 * spec.order();
    caps.check_enumeration("random subgroup", bound)?;
    let pick = |rng: &mut R| source.elements()[rng.gen_range(0..source.len())].clone();
    let mut gens: Vec<Mat2<TElem>> = spec
        .generators()
        .iter()
        .map(|h| unipotent(t, &pick(rng)).mul(t, &lift(t, h)))
        .collect();
    gens.push(unipotent(t, &pick(rng)));
    let mut elements = closure_by(Mat2::identity(t), &gens, |a, b| a.mul(t, b), bound as usize)
        .ok_or_else(|| Error::TheoremViolation("random subgroup outgrew S x GL_2^D".into()))?;
    let mut v = Mat2::identity(t);
    if twist {
        let comps = matrix_tuple(t, rng.gen_range(0..(q as u64).pow(4 * m as u32)));
        v = unipotent(t, &comps);
        let neg: Vec<Mat2<Fq>> = comps.iter().map(|c| c.scale(f, &f.from_int(-1))).collect();
        let vi = unipotent(t, &neg);
        for g in elements.iter_mut() {
            *g = v.mul(t, g).mul(t, &vi);
        }
    }
    Ok(RandomSubgroup {
        elements,
        source_module: source,
        twist: v,
    })
}
