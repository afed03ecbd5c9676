//! The square-zero local algebra T = F_q[X_1, ..., X_m]/(X_i X_j).
//!
//! Elements are written in the fixed basis {1, X_1, ..., X_m}: a constant
//! part `c0` (the residue under T -> T/m_T = F_q) followed by `m`
//! infinitesimal coordinates.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::ffield::{Field, FieldParams, Fq};
use crate::linalg::Echelon;
use crate::ring::{ResidueMap, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraParams {
    pub field: FieldParams,
    pub m: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TElem {
    coords: SmallVec<[Fq; 4]>,
}

impl TElem {
    pub fn c0(&self) -> Fq {
        self.coords[0]
    }

    pub fn eps(&self) -> &[Fq] {
        &self.coords[1..]
    }

    /// `[c0, eps_1, ..., eps_m]`.
    pub fn coords(&self) -> &[Fq] {
        &self.coords
    }

    pub fn in_ideal(&self) -> bool {
        self.c0().is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalAlgebra {
    field: Field,
    m: usize,
}

impl LocalAlgebra {
    pub fn new(field: Field, m: usize) -> Self {
        LocalAlgebra { field, m }
    }

    pub fn from_params(params: &AlgebraParams) -> Result<Self> {
        Ok(LocalAlgebra::new(Field::new(params.field.clone())?, params.m))
    }

    pub fn params(&self) -> AlgebraParams {
        AlgebraParams {
            field: self.field.params().clone(),
            m: self.m,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Dimension over F_q, `m + 1`.
    pub fn dim(&self) -> usize {
        self.m + 1
    }

    /// Number of elements, `q^(m+1)`, saturating.
    pub fn size(&self) -> u128 {
        (self.field.q() as u128)
            .checked_pow(self.dim() as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn from_coords(&self, coords: &[Fq]) -> Result<TElem> {
        if coords.len() != self.dim() {
            return Err(Error::Parameter(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|&&c| !self.field.contains(c)) {
            return Err(Error::Parameter(format!(
                "coordinate {bad:?} is not an element of F_{}",
                self.field.q()
            )));
        }
        Ok(TElem {
            coords: coords.iter().copied().collect(),
        })
    }

    pub fn element(&self, c0: Fq, eps: &[Fq]) -> Result<TElem> {
        let mut coords: SmallVec<[Fq; 4]> = SmallVec::with_capacity(self.dim());
        coords.push(c0);
        coords.extend_from_slice(eps);
        self.from_coords(&coords)
    }

    pub fn constant(&self, a: Fq) -> TElem {
        let mut coords: SmallVec<[Fq; 4]> = SmallVec::from_elem(Fq::ZERO, self.dim());
        coords[0] = a;
        TElem { coords }
    }

    /// The generator `X_i`, `1 <= i <= m`.
    pub fn generator(&self, i: usize) -> Result<TElem> {
        if i == 0 || i > self.m {
            return Err(Error::Domain(format!("no generator X_{i} when m = {}", self.m)));
        }
        let mut coords: SmallVec<[Fq; 4]> = SmallVec::from_elem(Fq::ZERO, self.dim());
        coords[i] = Fq::ONE;
        Ok(TElem { coords })
    }

    fn check(&self, a: &TElem) -> Result<()> {
        if a.coords.len() != self.dim() || a.coords.iter().any(|&c| !self.field.contains(c)) {
            return Err(Error::Parameter(format!(
                "element does not belong to F_{}[X_1..X_{}]/(X_iX_j)",
                self.field.q(),
                self.m
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn add(&self, a: &TElem, b: &TElem) -> TElem {
        TElem {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(&x, &y)| self.field.add(x, y))
                .collect(),
        }
    }

    #[inline]
    pub fn neg(&self, a: &TElem) -> TElem {
        TElem {
            coords: a.coords.iter().map(|&x| self.field.neg(x)).collect(),
        }
    }

    /// `c0 = a0 b0`, `eps_i = a0 b_i + a_i b0`.
    #[inline]
    pub fn mul(&self, a: &TElem, b: &TElem) -> TElem {
        let f = &self.field;
        let (a0, b0) = (a.c0(), b.c0());
        let mut coords: SmallVec<[Fq; 4]> = SmallVec::with_capacity(self.dim());
        coords.push(f.mul(a0, b0));
        for (&ai, &bi) in a.eps().iter().zip(b.eps()) {
            coords.push(f.add(f.mul(a0, bi), f.mul(ai, b0)));
        }
        TElem { coords }
    }

    pub fn try_mul(&self, a: &TElem, b: &TElem) -> Result<TElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Multiplication by a constant of F_q.
    #[inline]
    pub fn scale(&self, s: Fq, a: &TElem) -> TElem {
        TElem {
            coords: a.coords.iter().map(|&x| self.field.mul(s, x)).collect(),
        }
    }

    pub fn is_unit(&self, a: &TElem) -> bool {
        !a.c0().is_zero()
    }

    /// `a0^-1 - a0^-2 * sum(a_i X_i)`.
    pub fn inv(&self, a: &TElem) -> Result<TElem> {
        self.check(a)?;
        let f = &self.field;
        let Ok(c0_inv) = f.inv(a.c0()) else {
            return Err(Error::NonUnit("element of the maximal ideal".into()));
        };
        let c0_inv2 = f.mul(c0_inv, c0_inv);
        let mut coords: SmallVec<[Fq; 4]> = SmallVec::with_capacity(self.dim());
        coords.push(c0_inv);
        for &ai in a.eps() {
            coords.push(f.neg(f.mul(c0_inv2, ai)));
        }
        Ok(TElem { coords })
    }

    /// Reduction modulo the maximal ideal.
    pub fn residue(&self, a: &TElem) -> Fq {
        a.c0()
    }

    /// All elements, constant coordinate varying slowest.
    pub fn elements(&self, cap: u64) -> Result<Vec<TElem>> {
        let size = self.size();
        if size > cap as u128 {
            return Err(Error::capacity("local algebra enumeration", size, cap as u128));
        }
        let q = self.field.q() as usize;
        let mut out = Vec::with_capacity(size as usize);
        let mut digits = vec![0usize; self.dim()];
        loop {
            out.push(TElem {
                coords: digits.iter().map(|&v| Fq::from_index(v)).collect(),
            });
            let mut i = self.dim();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < q {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    /// Smallest F_q-subalgebra containing `elems` (and the constants).
    pub fn subalgebra_generated(&self, elems: &[TElem], cap: u64) -> Result<Subalgebra> {
        let size = self.size();
        if size > cap as u128 {
            return Err(Error::capacity("subalgebra enumeration", size, cap as u128));
        }
        for e in elems {
            self.check(e)?;
        }
        let mut span = Echelon::new(self.field.clone(), self.dim());
        span.insert(self.constant(Fq::ONE).coords.to_vec());
        for e in elems {
            span.insert(e.coords.to_vec());
        }
        loop {
            let basis: Vec<TElem> = span
                .rows()
                .iter()
                .map(|r| TElem {
                    coords: r.iter().copied().collect(),
                })
                .collect();
            let mut grew = false;
            for x in &basis {
                for y in &basis {
                    grew |= span.insert(self.mul(x, y).coords.to_vec());
                }
            }
            if !grew {
                break;
            }
        }
        let basis: Vec<TElem> = span
            .rows()
            .iter()
            .map(|r| TElem {
                coords: r.iter().copied().collect(),
            })
            .collect();
        let elements = span
            .span_elements(cap)?
            .into_iter()
            .map(|v| TElem {
                coords: v.into_iter().collect(),
            })
            .collect();
        Ok(Subalgebra {
            dim: span.dim(),
            basis,
            elements,
        })
    }

    /// Wire form: `[c0, eps_1, ..., eps_m]`, each a coefficient vector.
    pub fn to_wire(&self, a: &TElem) -> Vec<Vec<u32>> {
        a.coords.iter().map(|&c| self.field.coeffs(c)).collect()
    }

    pub fn from_wire(&self, wire: &[Vec<u32>]) -> Result<TElem> {
        if wire.len() != self.dim() {
            return Err(Error::Parameter(format!(
                "expected {} coordinate vectors, got {}",
                self.dim(),
                wire.len()
            )));
        }
        let mut coords: SmallVec<[Fq; 4]> = SmallVec::with_capacity(self.dim());
        for c in wire {
            if c.len() != self.field.d() as usize {
                return Err(Error::Parameter(format!(
                    "coefficient vector of length {} in a degree-{} field",
                    c.len(),
                    self.field.d()
                )));
            }
            coords.push(self.field.from_coeffs(c)?);
        }
        Ok(TElem { coords })
    }

    pub fn format(&self, a: &TElem) -> String {
        let f = &self.field;
        let mut terms = Vec::new();
        if !a.c0().is_zero() {
            terms.push(f.format(a.c0()));
        }
        for (i, &e) in a.eps().iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let coef = f.format(e);
            if e == Fq::ONE {
                terms.push(format!("X{}", i + 1));
            } else if coef.contains('+') {
                terms.push(format!("({coef})X{}", i + 1));
            } else {
                terms.push(format!("{coef}X{}", i + 1));
            }
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

impl Ring for LocalAlgebra {
    type Elem = TElem;

    fn zero(&self) -> TElem {
        self.constant(Fq::ZERO)
    }
    fn one(&self) -> TElem {
        self.constant(Fq::ONE)
    }
    fn add(&self, a: &TElem, b: &TElem) -> TElem {
        LocalAlgebra::add(self, a, b)
    }
    fn neg(&self, a: &TElem) -> TElem {
        LocalAlgebra::neg(self, a)
    }
    fn mul(&self, a: &TElem, b: &TElem) -> TElem {
        LocalAlgebra::mul(self, a, b)
    }
    fn inv(&self, a: &TElem) -> Option<TElem> {
        LocalAlgebra::inv(self, a).ok()
    }
    fn is_unit(&self, a: &TElem) -> bool {
        LocalAlgebra::is_unit(self, a)
    }
}

impl ResidueMap for LocalAlgebra {
    fn residue(&self, a: &TElem) -> Fq {
        a.c0()
    }
    /// Constants: F_q sits inside T as a subring.
    fn lift(&self, a: Fq) -> TElem {
        self.constant(a)
    }
}

/// An F_q-subalgebra of T given by a basis and its full element list.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    pub dim: usize,
    pub basis: Vec<TElem>,
    pub elements: Vec<TElem>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(m: usize) -> LocalAlgebra {
        LocalAlgebra::new(Field::standard(2, 2).unwrap(), m)
    }

    #[test]
    fn defining_relation() {
        let t = alg(2);
        let x1 = t.generator(1).unwrap();
        let x2 = t.generator(2).unwrap();
        assert_eq!(t.mul(&x1, &x2), t.zero());
        assert_eq!(t.mul(&x1, &x1), t.zero());
        let one_plus = t.add(&t.one(), &x1);
        let one_minus = t.sub(&t.one(), &x1);
        assert_eq!(t.mul(&one_plus, &one_minus), t.one());
        assert_eq!(t.mul(&one_plus, &one_plus), t.one());
    }

    #[test]
    fn hand_expanded_product() {
        // (x + X1)(x + x X1) = x^2 + (x*x + 1*x) X1 = (x+1) + X1 in F_4
        let t = alg(1);
        let f = t.field().clone();
        let x = f.x();
        let a = t.element(x, &[Fq::ONE]).unwrap();
        let b = t.element(x, &[x]).unwrap();
        let x_plus_1 = f.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(t.mul(&a, &b), t.element(x_plus_1, &[Fq::ONE]).unwrap());
    }

    #[test]
    fn inverses() {
        let t = alg(1);
        let f = t.field().clone();
        let x1 = t.generator(1).unwrap();
        let u = t.add(&t.one(), &x1);
        assert_eq!(t.inv(&u).unwrap(), t.sub(&t.one(), &x1));
        let x = f.x();
        assert_eq!(t.inv(&t.constant(x)).unwrap(), t.constant(f.inv(x).unwrap()));
        // (x + X1)^-1 = x^-1 - x^-2 X1 = (x+1) + x X1
        let a = t.element(x, &[Fq::ONE]).unwrap();
        let expected = t.element(f.from_coeffs(&[1, 1]).unwrap(), &[x]).unwrap();
        assert_eq!(t.inv(&a).unwrap(), expected);
        assert_eq!(t.mul(&a, &expected), t.one());
        assert!(matches!(t.inv(&x1), Err(Error::NonUnit(_))));
    }

    #[test]
    fn generated_subalgebras() {
        let t = alg(2);
        let f = t.field().clone();
        let triv = t.subalgebra_generated(&[], 1 << 20).unwrap();
        assert_eq!(triv.dim, 1);
        assert_eq!(triv.elements.len(), 4);
        let all = t
            .subalgebra_generated(&[t.generator(1).unwrap(), t.generator(2).unwrap()], 1 << 20)
            .unwrap();
        assert_eq!(all.dim, 3);
        assert_eq!(all.elements.len(), 64);
        let g = t.element(Fq::ONE, &[Fq::ONE, f.x()]).unwrap();
        let sub = t.subalgebra_generated(&[g], 1 << 20).unwrap();
        assert_eq!(sub.dim, 2);
        let direction = t.element(Fq::ZERO, &[Fq::ONE, f.x()]).unwrap();
        assert!(sub.elements.contains(&direction));
        assert!(!sub.elements.contains(&t.generator(1).unwrap()));
    }

    #[test]
    fn mismatched_algebras() {
        let t1 = alg(1);
        let t2 = alg(2);
        assert!(matches!(
            t1.try_mul(&t2.generator(1).unwrap(), &t1.one()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn residue_is_a_homomorphism() {
        for m in 0..=2 {
            let t = alg(m);
            let els = t.elements(1 << 12).unwrap();
            for a in &els {
                for b in &els {
                    assert_eq!(t.residue(&t.mul(a, b)), t.field().mul(t.residue(a), t.residue(b)));
                }
            }
        }
    }

    #[test]
    fn unit_inverses_exhaustive() {
        let t = alg(1);
        for a in t.elements(1 << 12).unwrap() {
            if t.is_unit(&a) {
                assert_eq!(t.mul(&a, &t.inv(&a).unwrap()), t.one());
            }
        }
    }

    #[test]
    fn wire_round_trip() {
        let t = alg(2);
        let a = t.element(t.field().x(), &[Fq::ONE, Fq::ZERO]).unwrap();
        let w = t.to_wire(&a);
        assert_eq!(w, vec![vec![0, 1], vec![1, 0], vec![0, 0]]);
        assert_eq!(t.from_wire(&w).unwrap(), a);
    }
}
