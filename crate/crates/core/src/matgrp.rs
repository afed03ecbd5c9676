//! 2x2 matrices over F_q and over T, the groups GL_2^D, and trace-zero
//! matrices with the conjugation action.

use std::collections::VecDeque;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::ffield::{Field, Fq, UnitSubgroup};
use crate::localalg::{LocalAlgebra, TElem};
use crate::ring::{ResidueMap, Ring};

/// `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat2<E> {
    pub a: E,
    pub b: E,
    pub c: E,
    pub d: E,
}

impl<E> Mat2<E> {
    pub const fn new(a: E, b: E, c: E, d: E) -> Self {
        Mat2 { a, b, c, d }
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> [&E; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn map<F, G: FnMut(&E) -> F>(&self, mut g: G) -> Mat2<F> {
        Mat2 {
            a: g(&self.a),
            b: g(&self.b),
            c: g(&self.c),
            d: g(&self.d),
        }
    }
}

impl<E: Clone> Mat2<E> {
    pub fn identity<R: Ring<Elem = E>>(r: &R) -> Self {
        Mat2::scalar(r, r.one())
    }

    pub fn zero<R: Ring<Elem = E>>(r: &R) -> Self {
        Mat2::new(r.zero(), r.zero(), r.zero(), r.zero())
    }

    pub fn scalar<R: Ring<Elem = E>>(r: &R, s: E) -> Self {
        Mat2::new(s.clone(), r.zero(), r.zero(), s)
    }

    #[inline]
    pub fn mul<R: Ring<Elem = E>>(&self, r: &R, o: &Self) -> Self {
        Mat2 {
            a: r.add(&r.mul(&self.a, &o.a), &r.mul(&self.b, &o.c)),
            b: r.add(&r.mul(&self.a, &o.b), &r.mul(&self.b, &o.d)),
            c: r.add(&r.mul(&self.c, &o.a), &r.mul(&self.d, &o.c)),
            d: r.add(&r.mul(&self.c, &o.b), &r.mul(&self.d, &o.d)),
        }
    }

    pub fn add<R: Ring<Elem = E>>(&self, r: &R, o: &Self) -> Self {
        Mat2 {
            a: r.add(&self.a, &o.a),
            b: r.add(&self.b, &o.b),
            c: r.add(&self.c, &o.c),
            d: r.add(&self.d, &o.d),
        }
    }

    pub fn sub<R: Ring<Elem = E>>(&self, r: &R, o: &Self) -> Self {
        Mat2 {
            a: r.sub(&self.a, &o.a),
            b: r.sub(&self.b, &o.b),
            c: r.sub(&self.c, &o.c),
            d: r.sub(&self.d, &o.d),
        }
    }

    pub fn scale<R: Ring<Elem = E>>(&self, r: &R, s: &E) -> Self {
        self.map(|x| r.mul(s, x))
    }

    #[inline]
    pub fn det<R: Ring<Elem = E>>(&self, r: &R) -> E {
        r.sub(&r.mul(&self.a, &self.d), &r.mul(&self.b, &self.c))
    }

    #[inline]
    pub fn trace<R: Ring<Elem = E>>(&self, r: &R) -> E {
        r.add(&self.a, &self.d)
    }

    /// `tr(self * o)` without forming the product.
    #[inline]
    pub fn trace_of_product<R: Ring<Elem = E>>(&self, r: &R, o: &Self) -> E {
        let ad = r.add(&r.mul(&self.a, &o.a), &r.mul(&self.b, &o.c));
        let bc = r.add(&r.mul(&self.c, &o.b), &r.mul(&self.d, &o.d));
        r.add(&ad, &bc)
    }

    pub fn is_invertible<R: Ring<Elem = E>>(&self, r: &R) -> bool {
        r.is_unit(&self.det(r))
    }

    pub fn inverse<R: Ring<Elem = E>>(&self, r: &R) -> Option<Self> {
        let di = r.inv(&self.det(r))?;
        Some(Mat2 {
            a: r.mul(&di, &self.d),
            b: r.neg(&r.mul(&di, &self.b)),
            c: r.neg(&r.mul(&di, &self.c)),
            d: r.mul(&di, &self.a),
        })
    }

    /// `g * self * g^-1`.
    pub fn conjugate_by<R: Ring<Elem = E>>(&self, r: &R, g: &Self) -> Option<Self> {
        let gi = g.inverse(r)?;
        Some(g.mul(r, self).mul(r, &gi))
    }

    pub fn is_scalar<R: Ring<Elem = E>>(&self, r: &R) -> bool
    where
        E: PartialEq,
    {
        r.is_zero(&self.b) && r.is_zero(&self.c) && self.a == self.d
    }
}

impl Mat2<Fq> {
    /// Row-major coefficient vectors.
    pub fn to_wire(&self, f: &Field) -> Vec<Vec<u32>> {
        self.entries().iter().map(|&&e| f.coeffs(e)).collect()
    }

    pub fn format(&self, f: &Field) -> String {
        format!(
            "[[{}, {}], [{}, {}]]",
            f.format(self.a),
            f.format(self.b),
            f.format(self.c),
            f.format(self.d)
        )
    }
}

impl Mat2<TElem> {
    pub fn to_wire(&self, t: &LocalAlgebra) -> Vec<Vec<Vec<u32>>> {
        self.entries().iter().map(|e| t.to_wire(e)).collect()
    }

    pub fn format(&self, t: &LocalAlgebra) -> String {
        format!(
            "[[{}, {}], [{}, {}]]",
            t.format(&self.a),
            t.format(&self.b),
            t.format(&self.c),
            t.format(&self.d)
        )
    }
}

/// Entry-wise reduction to the residue field.
pub fn reduce<R: ResidueMap>(r: &R, g: &Mat2<R::Elem>) -> Mat2<Fq> {
    g.map(|e| r.residue(e))
}

/// Entry-wise lift of a matrix over F_q along `R::lift`.
pub fn lift<R: ResidueMap>(r: &R, h: &Mat2<Fq>) -> Mat2<R::Elem> {
    h.map(|&e| r.lift(e))
}

/// A trace-zero matrix; over T its entries also lie in the maximal ideal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceZeroMat<E>(Mat2<E>);

impl<E> TraceZeroMat<E> {
    pub fn as_mat(&self) -> &Mat2<E> {
        &self.0
    }

    pub fn into_mat(self) -> Mat2<E> {
        self.0
    }
}

impl TraceZeroMat<Fq> {
    pub fn new(f: &Field, m: Mat2<Fq>) -> Result<Self> {
        if m.entries().iter().any(|&&e| !f.contains(e)) {
            return Err(Error::Parameter("matrix entry outside the field".into()));
        }
        if !m.trace(f).is_zero() {
            return Err(Error::Domain(format!("{} has nonzero trace", m.format(f))));
        }
        Ok(TraceZeroMat(m))
    }

    /// `[[a, b], [c, -a]]`.
    pub fn from_abc(f: &Field, a: Fq, b: Fq, c: Fq) -> Self {
        TraceZeroMat(Mat2::new(a, b, c, f.neg(a)))
    }

    pub fn scalar(f: &Field, s: Fq) -> Result<Self> {
        TraceZeroMat::<Fq>::new(f, Mat2::scalar(f, s))
    }
}

impl TraceZeroMat<TElem> {
    pub fn new(t: &LocalAlgebra, m: Mat2<TElem>) -> Result<Self> {
        if !m.trace(t).coords().iter().all(|c| c.is_zero()) {
            return Err(Error::Domain(format!("{} has nonzero trace", m.format(t))));
        }
        if m.entries().iter().any(|e| !e.in_ideal()) {
            return Err(Error::Domain(format!(
                "{} has an entry outside the maximal ideal",
                m.format(t)
            )));
        }
        Ok(TraceZeroMat(m))
    }

    /// `sum_k A_k X_k` from the coefficient matrices `A_1..A_m`.
    pub fn from_components(t: &LocalAlgebra, comps: &[Mat2<Fq>]) -> Result<Self> {
        if comps.len() != t.m() {
            return Err(Error::Parameter(format!(
                "expected {} coefficient matrices, got {}",
                t.m(),
                comps.len()
            )));
        }
        let f = t.field();
        for a in comps {
            TraceZeroMat::<Fq>::new(f, *a)?;
        }
        let entry = |pick: fn(&Mat2<Fq>) -> Fq| {
            let eps: Vec<Fq> = comps.iter().map(pick).collect();
            t.element(Fq::ZERO, &eps)
        };
        Ok(TraceZeroMat(Mat2::new(
            entry(|m| m.a)?,
            entry(|m| m.b)?,
            entry(|m| m.c)?,
            entry(|m| m.d)?,
        )))
    }

    /// The coefficient matrices `A_1..A_m` with `self = sum_k A_k X_k`.
    pub fn components(&self) -> Vec<Mat2<Fq>> {
        let m = &self.0;
        (0..m.a.eps().len())
            .map(|k| Mat2::new(m.a.eps()[k], m.b.eps()[k], m.c.eps()[k], m.d.eps()[k]))
            .collect()
    }
}

/// `g mu g^-1` for `g` in GL_2(F_q).
pub fn conj(f: &Field, g: &Mat2<Fq>, mu: &TraceZeroMat<Fq>) -> Result<TraceZeroMat<Fq>> {
    let Some(gi) = g.inverse(f) else {
        return Err(Error::Domain(format!("{} is singular", g.format(f))));
    };
    Ok(TraceZeroMat(g.mul(f, mu.as_mat()).mul(f, &gi)))
}

/// `(1 + mu) h` with `h` embedded as a constant matrix.
pub fn embed_unipotent(t: &LocalAlgebra, mu: &TraceZeroMat<TElem>, h: &Mat2<Fq>) -> Mat2<TElem> {
    let u = Mat2::identity(t).add(t, mu.as_mat());
    u.mul(t, &lift(t, h))
}

/// `{g in GL_2(F_q) : det g in D}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    field: Field,
    dets: UnitSubgroup,
}

impl GroupSpec {
    pub fn new(field: Field, dets: UnitSubgroup) -> Result<Self> {
        if dets.elements().iter().any(|&e| !field.contains(e)) {
            return Err(Error::Parameter("determinant subgroup belongs to another field".into()));
        }
        Ok(GroupSpec { field, dets })
    }

    /// SL_2(F_q).
    pub fn special(field: Field) -> Self {
        let dets = field.trivial_units();
        GroupSpec { field, dets }
    }

    /// GL_2(F_q).
    pub fn general(field: Field) -> Self {
        let dets = field.all_units();
        GroupSpec { field, dets }
    }

    /// GL_2^D(F_q) with `D = <generator>`.
    pub fn with_det_generator(field: Field, generator: Fq) -> Result<Self> {
        let dets = field.subgroup_of_units(generator)?;
        Ok(GroupSpec { field, dets })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dets(&self) -> &UnitSubgroup {
        &self.dets
    }

    /// `|D| q (q^2 - 1)`.
    pub fn order(&self) -> u128 {
        let q = self.field.q() as u128;
        self.dets.order() as u128 * q * (q * q - 1)
    }

    pub fn contains(&self, g: &Mat2<Fq>) -> bool {
        g.entries().iter().all(|&&e| self.field.contains(e)) && self.dets.contains(g.det(&self.field))
    }

    /// Membership in GL_2^D(T): the determinant is a constant lying in D.
    pub fn contains_over(&self, t: &LocalAlgebra, g: &Mat2<TElem>) -> bool {
        let det = g.det(t);
        det.eps().iter().all(|e| e.is_zero()) && self.dets.contains(det.c0())
    }

    /// Elementary matrices `[[1, l], [0, 1]]`, `[[1, 0], [l, 1]]` for `l`
    /// running over the basis `1, x, ..., x^(d-1)`, plus `diag(delta, 1)` for
    /// the generator `delta` of D when D is nontrivial.
    pub fn generators(&self) -> Vec<Mat2<Fq>> {
        let f = &self.field;
        let mut out = Vec::new();
        for i in 0..f.d() as usize {
            let mut coeffs = vec![0; i + 1];
            coeffs[i] = 1;
            let l = f.from_coeffs(&coeffs).expect("basis element");
            out.push(Mat2::new(Fq::ONE, l, Fq::ZERO, Fq::ONE));
            out.push(Mat2::new(Fq::ONE, Fq::ZERO, l, Fq::ONE));
        }
        if !self.dets.is_trivial() {
            out.push(Mat2::new(self.dets.generator(), Fq::ZERO, Fq::ZERO, Fq::ONE));
        }
        out
    }

    /// `SL₂(F₄)`, `GL₂(F₄)`, or `GL₂^D(F₇)` for intermediate `D`.
    pub fn name(&self) -> String {
        group_name(self.field.q() as u64, self.dets.order() as u64)
    }
}

/// Name of GL_2^D(F_q) given `|D|`.
pub fn group_name(q: u64, det_order: u64) -> String {
    let qs = subscript(q);
    if det_order == 1 {
        format!("SL₂(F{qs})")
    } else if det_order == q - 1 {
        format!("GL₂(F{qs})")
    } else {
        format!("GL₂^D(F{qs})")
    }
}

/// Decimal number in Unicode subscript digits.
pub fn subscript(n: u64) -> String {
    n.to_string()
        .chars()
        .map(|c| char::from_u32('₀' as u32 + c.to_digit(10).unwrap()).unwrap())
        .collect()
}

/// Decimal number in Unicode superscript digits.
pub fn superscript(n: u64) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

/// Every element of GL_2^D(F_q), lexicographic in `(a, b, c, d)`.
pub fn enumerate_gl2d(spec: &GroupSpec, cap: u64) -> Result<Vec<Mat2<Fq>>> {
    let f = &spec.field;
    let q = f.q() as u128;
    if q.pow(4) > cap as u128 {
        return Err(Error::capacity("GL_2^D enumeration", q.pow(4), cap as u128));
    }
    let mut out = Vec::with_capacity(spec.order() as usize);
    for a in f.elements() {
        for b in f.elements() {
            for c in f.elements() {
                for d in f.elements() {
                    let det = f.sub(f.mul(a, d), f.mul(b, c));
                    if spec.dets.contains(det) {
                        out.push(Mat2::new(a, b, c, d));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All `q^3` trace-zero matrices over F_q, lexicographic in `(a, b, c)`.
pub fn enumerate_trace_zero(f: &Field, cap: u64) -> Result<Vec<TraceZeroMat<Fq>>> {
    let q = f.q() as u128;
    if q.pow(3) > cap as u128 {
        return Err(Error::capacity("trace-zero enumeration", q.pow(3), cap as u128));
    }
    let mut out = Vec::with_capacity(q.pow(3) as usize);
    for a in f.elements() {
        for b in f.elements() {
            for c in f.elements() {
                out.push(TraceZeroMat::from_abc(f, a, b, c));
            }
        }
    }
    Ok(out)
}

/// Lazy enumeration of the `q^(3m)` trace-zero matrices over the maximal
/// ideal, as `sum_k A_k X_k` with the tuple `(A_1, ..., A_m)` in
/// lexicographic order.
pub fn enumerate_trace_zero_ideal(
    t: &LocalAlgebra,
    cap: u64,
) -> Result<impl Iterator<Item = TraceZeroMat<TElem>> + '_> {
    let base = enumerate_trace_zero(t.field(), cap)?;
    let m = t.m();
    let n = base.len();
    let mut digits = vec![0usize; m];
    let mut done = false;
    Ok(std::iter::from_fn(move || {
        if done {
            return None;
        }
        let comps: Vec<Mat2<Fq>> = digits.iter().map(|&i| *base[i].as_mat()).collect();
        let item = TraceZeroMat::from_components(t, &comps).expect("components are trace-zero");
        done = true;
        for slot in digits.iter_mut().rev() {
            *slot += 1;
            if *slot < n {
                done = false;
                break;
            }
            *slot = 0;
        }
        Some(item)
    }))
}

/// The subgroup generated by `gens`, identity first, in breadth-first order.
pub fn group_closure<R: Ring>(r: &R, gens: &[Mat2<R::Elem>], cap: u64) -> Result<Vec<Mat2<R::Elem>>> {
    if let Some(g) = gens.iter().find(|g| !g.is_invertible(r)) {
        return Err(Error::Domain(format!("generator {g:?} is not invertible")));
    }
    let id = Mat2::identity(r);
    let mut seen: FxHashSet<Mat2<R::Elem>> = FxHashSet::default();
    seen.insert(id.clone());
    let mut out = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(r, g);
            if seen.insert(y.clone()) {
                if seen.len() as u64 > cap {
                    return Err(Error::capacity("group closure", seen.len() as u128, cap as u128));
                }
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> Field {
        Field::standard(2, 2).unwrap()
    }

    #[test]
    fn gl2d_orders() {
        let f = f4();
        assert_eq!(
            enumerate_gl2d(&GroupSpec::special(f.clone()), 1 << 20).unwrap().len(),
            60
        );
        assert_eq!(enumerate_gl2d(&GroupSpec::general(f), 1 << 20).unwrap().len(), 180);
        let f7 = Field::standard(7, 1).unwrap();
        let sl = enumerate_gl2d(&GroupSpec::special(f7.clone()), 1 << 20).unwrap();
        assert_eq!(sl.len(), 336);
        assert!(sl.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            enumerate_gl2d(&GroupSpec::special(f7), 100),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn trace_zero_counts() {
        let f = f4();
        let all = enumerate_trace_zero(&f, 1 << 20).unwrap();
        assert_eq!(all.len(), 64);
        assert_eq!(all.iter().filter(|m| m.as_mat().is_scalar(&f)).count(), 4);
        assert_eq!(
            enumerate_trace_zero(&Field::standard(2, 3).unwrap(), 1 << 20)
                .unwrap()
                .len(),
            512
        );
        let t = LocalAlgebra::new(f, 2);
        assert_eq!(enumerate_trace_zero_ideal(&t, 1 << 20).unwrap().count(), 4096);
    }

    #[test]
    fn conjugation_examples() {
        let f = f4();
        let x = f.x();
        let mu = TraceZeroMat::from_abc(&f, Fq::ZERO, Fq::ONE, Fq::ZERO);
        let id = Mat2::identity(&f);
        assert_eq!(conj(&f, &id, &mu).unwrap(), mu);
        let g = Mat2::new(x, Fq::ZERO, Fq::ZERO, f.inv(x).unwrap());
        let expected = TraceZeroMat::from_abc(&f, Fq::ZERO, f.mul(x, x), Fq::ZERO);
        assert_eq!(conj(&f, &g, &mu).unwrap(), expected);
        let s = TraceZeroMat::scalar(&f, x).unwrap();
        for g in enumerate_gl2d(&GroupSpec::general(f.clone()), 1 << 20).unwrap() {
            assert_eq!(conj(&f, &g, &s).unwrap(), s);
        }
        let singular = Mat2::new(Fq::ONE, Fq::ONE, Fq::ONE, Fq::ONE);
        assert!(matches!(conj(&f, &singular, &mu), Err(Error::Domain(_))));
    }

    #[test]
    fn closures() {
        let f = f4();
        let id = Mat2::identity(&f);
        assert_eq!(group_closure(&f, &[id], 1000).unwrap().len(), 1);
        let sl = GroupSpec::special(f.clone());
        assert_eq!(group_closure(&f, &sl.generators(), 1000).unwrap().len(), 60);
        assert_eq!(
            group_closure(&f, &GroupSpec::general(f.clone()).generators(), 1000)
                .unwrap()
                .len(),
            180
        );
        let f7 = Field::standard(7, 1).unwrap();
        let gens = [
            Mat2::new(Fq::ONE, Fq::ONE, Fq::ZERO, Fq::ONE),
            Mat2::new(Fq::ONE, Fq::ZERO, Fq::ONE, Fq::ONE),
        ];
        assert_eq!(group_closure(&f7, &gens, 1000).unwrap().len(), 336);
        assert!(matches!(group_closure(&f7, &gens, 100), Err(Error::Capacity { .. })));
    }

    #[test]
    fn unipotent_embedding() {
        let f = f4();
        let t = LocalAlgebra::new(f.clone(), 1);
        let sl = enumerate_gl2d(&GroupSpec::special(f.clone()), 1 << 20).unwrap();
        let mus: Vec<_> = enumerate_trace_zero_ideal(&t, 1 << 20).unwrap().collect();
        for mu in &mus {
            let one_plus = Mat2::identity(&t).add(&t, mu.as_mat());
            assert_eq!(one_plus.det(&t), t.one());
        }
        let h = sl[17];
        let zero = TraceZeroMat::<TElem>::from_components(&t, &[Mat2::zero(&f)]).unwrap();
        assert_eq!(embed_unipotent(&t, &zero, &h), lift(&t, &h));
        for mu in &mus {
            let g = embed_unipotent(&t, mu, &h);
            let a = mu.components()[0];
            let expected = t.element(h.trace(&f), &[a.trace_of_product(&f, &h)]).unwrap();
            assert_eq!(g.trace(&t), expected);
        }
    }

    #[test]
    fn trace_zero_over_ideal_checks() {
        let t = LocalAlgebra::new(f4(), 1);
        let one = Mat2::identity(&t);
        assert!(matches!(TraceZeroMat::<TElem>::new(&t, one), Err(Error::Domain(_))));
        let x1 = t.generator(1).unwrap();
        let z = t.zero();
        let n = Mat2::new(x1.clone(), z.clone(), z, x1);
        assert!(TraceZeroMat::<TElem>::new(&t, n).is_ok());
    }
}
