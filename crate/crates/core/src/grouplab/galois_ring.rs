//! The Galois ring W_2(F_q) = (Z/p^2)[x]/(f), with `f` the field modulus
//! read over Z/p^2. A monic lift of an irreducible polynomial is basic
//! irreducible, so this is the length-2 Witt vectors of F_q.

use crate::error::{Error, Result};
use crate::ffield::{Field, Fq};
use crate::ring::{ResidueMap, Ring};

const MAX_DEGREE: usize = 16;

/// Element stored as coefficients mod `p^2`, packed base `p^2`, constant
/// term first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrElem(u64);

impl GrElem {
    pub const ZERO: GrElem = GrElem(0);
    pub const ONE: GrElem = GrElem(1);

    pub fn value(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisRing {
    field: Field,
    p: u64,
    pp: u64,
    d: usize,
    modulus: Vec<u64>,
}

impl GaloisRing {
    pub fn new(field: Field) -> Self {
        let p = field.p() as u64;
        let d = field.d() as usize;
        let modulus = field.params().modulus.iter().map(|&c| c as u64).collect();
        GaloisRing {
            field,
            p,
            pp: p * p,
            d,
            modulus,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// `q^2`.
    pub fn size(&self) -> u64 {
        self.pp.pow(self.d as u32)
    }

    fn digits(&self, a: GrElem) -> [u64; MAX_DEGREE] {
        let mut v = a.0;
        let mut out = [0u64; MAX_DEGREE];
        for slot in out.iter_mut().take(self.d) {
            *slot = v % self.pp;
            v /= self.pp;
        }
        out
    }

    fn pack(&self, digits: &[u64]) -> GrElem {
        GrElem(digits.iter().rev().fold(0, |acc, &c| acc * self.pp + c % self.pp))
    }

    /// Element from coefficients mod `p^2` (constant term first).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<GrElem> {
        if coeffs.len() > self.d || coeffs.iter().any(|&c| c >= self.pp) {
            return Err(Error::Parameter(format!(
                "expected at most {} coefficients below {}",
                self.d, self.pp
            )));
        }
        let mut c = coeffs.to_vec();
        c.resize(self.d, 0);
        Ok(self.pack(&c))
    }

    pub fn coeffs(&self, a: GrElem) -> Vec<u64> {
        self.digits(a)[..self.d].to_vec()
    }

    /// All `q^2` elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = GrElem> {
        (0..self.size()).map(GrElem)
    }

    pub fn add(&self, a: GrElem, b: GrElem) -> GrElem {
        let (mut x, y) = (self.digits(a), self.digits(b));
        for (u, v) in x.iter_mut().zip(&y).take(self.d) {
            *u = (*u + v) % self.pp;
        }
        self.pack(&x[..self.d])
    }

    pub fn neg(&self, a: GrElem) -> GrElem {
        let mut x = self.digits(a);
        for u in x.iter_mut().take(self.d) {
            *u = (self.pp - *u) % self.pp;
        }
        self.pack(&x[..self.d])
    }

    pub fn mul(&self, a: GrElem, b: GrElem) -> GrElem {
        let (x, y) = (self.digits(a), self.digits(b));
        let d = self.d;
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for (i, &u) in x[..d].iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (j, &v) in y[..d].iter().enumerate() {
                prod[i + j] = (prod[i + j] + u * v) % self.pp;
            }
        }
        for k in (d..2 * d).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in self.modulus[..d].iter().enumerate() {
                prod[k - d + i] = (prod[k - d + i] + self.pp * self.pp - c * m % self.pp) % self.pp;
            }
        }
        self.pack(&prod[..d])
    }

    pub fn pow(&self, a: GrElem, mut e: u64) -> GrElem {
        let mut base = a;
        let mut acc = GrElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Reduction mod `p`.
    pub fn residue(&self, a: GrElem) -> Fq {
        let c: Vec<u32> = self.digits(a)[..self.d].iter().map(|&u| (u % self.p) as u32).collect();
        self.field.from_coeffs(&c).expect("residues mod p")
    }

    /// The lift with every coefficient in `[0, p)`.
    pub fn naive_lift(&self, a: Fq) -> GrElem {
        let c: Vec<u64> = self.field.coeffs(a).iter().map(|&u| u as u64).collect();
        self.pack(&c)
    }

    /// `p * lift(a)`: the element of the ideal `pW` over `a`.
    pub fn times_p(&self, a: Fq) -> GrElem {
        let c: Vec<u64> = self.field.coeffs(a).iter().map(|&u| u as u64 * self.p).collect();
        self.pack(&c)
    }

    /// For `a` in `pW`, the residue of `a / p`.
    pub fn divide_by_p(&self, a: GrElem) -> Result<Fq> {
        let digits = self.digits(a);
        let digits = &digits[..self.d];
        if digits.iter().any(|&u| u % self.p != 0) {
            return Err(Error::Domain("element is not divisible by p".into()));
        }
        let c: Vec<u32> = digits.iter().map(|&u| (u / self.p) as u32).collect();
        self.field.from_coeffs(&c)
    }

    pub fn is_unit(&self, a: GrElem) -> bool {
        !self.residue(a).is_zero()
    }

    /// Inverse of a unit: the unit group has order `(q - 1) q`.
    pub fn inv(&self, a: GrElem) -> Option<GrElem> {
        if !self.is_unit(a) {
            return None;
        }
        let q = self.field.q() as u64;
        Some(self.pow(a, (q - 1) * q - 1))
    }

    /// The Teichmüller lift `(any lift of a)^q`, the unique multiplicative
    /// section of reduction.
    pub fn teichmuller(&self, a: Fq) -> GrElem {
        self.pow(self.naive_lift(a), self.field.q() as u64)
    }
}

impl Ring for GaloisRing {
    type Elem = GrElem;

    fn zero(&self) -> GrElem {
        GrElem::ZERO
    }
    fn one(&self) -> GrElem {
        GrElem::ONE
    }
    fn add(&self, a: &GrElem, b: &GrElem) -> GrElem {
        GaloisRing::add(self, *a, *b)
    }
    fn neg(&self, a: &GrElem) -> GrElem {
        GaloisRing::neg(self, *a)
    }
    fn mul(&self, a: &GrElem, b: &GrElem) -> GrElem {
        GaloisRing::mul(self, *a, *b)
    }
    fn inv(&self, a: &GrElem) -> Option<GrElem> {
        GaloisRing::inv(self, *a)
    }
    fn is_unit(&self, a: &GrElem) -> bool {
        GaloisRing::is_unit(self, *a)
    }
}

impl ResidueMap for GaloisRing {
    fn residue(&self, a: &GrElem) -> Fq {
        GaloisRing::residue(self, *a)
    }
    /// Teichmüller lift.
    fn lift(&self, a: Fq) -> GrElem {
        self.teichmuller(a)
    }
}
