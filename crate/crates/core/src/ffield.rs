//! Finite fields F_{p^d} in a fixed polynomial basis.
//!
//! An element is stored as its coefficient vector packed into an integer,
//! `value = c_0 + c_1 p + ... + c_{d-1} p^{d-1}`. The packing order is also
//! the enumeration order, so `0` comes first and `1` second.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::Ring;

/// Largest field size supported.
pub const FIELD_CAP: u32 = 1 << 16;

const MAX_DIGITS: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fq(u16);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    /// Packed coefficient value; also the index in enumeration order.
    pub fn value(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Element with packed value `v`, unchecked.
    pub(crate) fn from_index(v: usize) -> Fq {
        Fq(v as u16)
    }
}

/// `{"p": int, "d": int, "modulus": [int, ...]}` with the modulus monic of
/// degree `d`, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u32,
    pub d: u32,
    pub modulus: Vec<u32>,
}

impl FieldParams {
    /// Validated parameters.
    pub fn new(p: u32, d: u32, modulus: Vec<u32>) -> Result<Self> {
        let params = FieldParams { p, d, modulus };
        params.validate()?;
        Ok(params)
    }

    /// The shipped default modulus for `F_{p^d}`: `x^2+x+1`, `x^3+x+1`,
    /// `x^4+x+1` in characteristic 2, `x` for prime fields, otherwise the
    /// first irreducible polynomial in enumeration order.
    pub fn standard(p: u32, d: u32) -> Result<Self> {
        let modulus = match (p, d) {
            (_, 1) => vec![0, 1],
            (2, 2) => vec![1, 1, 1],
            (2, 3) => vec![1, 1, 0, 1],
            (2, 4) => vec![1, 1, 0, 0, 1],
            _ => {
                check_prime_and_size(p, d)?;
                first_irreducible(p, d)
            }
        };
        FieldParams::new(p, d, modulus)
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.d)
    }

    pub fn validate(&self) -> Result<()> {
        check_prime_and_size(self.p, self.d)?;
        if self.modulus.len() != self.d as usize + 1 {
            return Err(Error::Parameter(format!(
                "modulus must have {} coefficients, got {}",
                self.d + 1,
                self.modulus.len()
            )));
        }
        if self.modulus.iter().any(|&c| c >= self.p) {
            return Err(Error::Parameter(format!(
                "modulus coefficients must lie in [0, {})",
                self.p
            )));
        }
        if self.modulus[self.d as usize] != 1 {
            return Err(Error::Parameter("modulus must be monic".into()));
        }
        if !is_irreducible(self.p, &self.modulus) {
            return Err(Error::Parameter(format!(
                "modulus {:?} is reducible over F_{}",
                self.modulus, self.p
            )));
        }
        Ok(())
    }

    /// Fields excluded by the classification theorem (q in {2, 3, 5}).
    pub fn is_theorem_grade(&self) -> bool {
        !matches!(self.q(), 2 | 3 | 5)
    }
}

fn check_prime_and_size(p: u32, d: u32) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::Parameter(format!("characteristic {p} is not prime")));
    }
    if d == 0 {
        return Err(Error::Parameter("extension degree must be at least 1".into()));
    }
    match (p as u64).checked_pow(d) {
        Some(q) if q <= FIELD_CAP as u64 => Ok(()),
        _ => Err(Error::Parameter(format!(
            "field size {p}^{d} exceeds the supported maximum {FIELD_CAP}"
        ))),
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut k = 3;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `b` over F_p.
fn poly_rem(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    let p = p as u64;
    while r.len() > db {
        let lead = r.pop().unwrap() % p;
        if lead != 0 {
            let shift = r.len() - db;
            for (j, &bc) in b[..db].iter().enumerate() {
                r[shift + j] = (r[shift + j] + p * p - lead * bc as u64 % p) % p;
            }
        }
    }
    r.into_iter().map(|c| (c % p) as u32).collect()
}

/// Exhaustive trial division by every monic polynomial of degree at most
/// `deg/2`.
fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    for k in 1..=deg / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(k + 1);
            let mut v = idx;
            for _ in 0..k {
                g.push((v % p as u64) as u32);
                v /= p as u64;
            }
            g.push(1);
            if poly_rem(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn first_irreducible(p: u32, d: u32) -> Vec<u32> {
    let count = (p as u64).pow(d);
    for idx in 0..count {
        let mut f = Vec::with_capacity(d as usize + 1);
        let mut v = idx;
        for _ in 0..d {
            f.push((v % p as u64) as u32);
            v /= p as u64;
        }
        f.push(1);
        if is_irreducible(p, &f) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Arithmetic context for one field.
#[derive(Clone, Debug)]
pub struct Field {
    params: FieldParams,
    p: u32,
    d: u32,
    q: u32,
    /// Modulus as a bit mask (characteristic 2 only).
    modulus_bits: u32,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(params: FieldParams) -> Result<Self> {
        params.validate()?;
        let modulus_bits = if params.p == 2 {
            params
                .modulus
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &c)| acc | (c << i))
        } else {
            0
        };
        Ok(Field {
            p: params.p,
            d: params.d,
            q: params.q(),
            modulus_bits,
            params,
        })
    }

    /// Field with the default modulus, see [`FieldParams::standard`].
    pub fn standard(p: u32, d: u32) -> Result<Self> {
        Field::new(FieldParams::standard(p, d)?)
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn contains(&self, a: Fq) -> bool {
        (a.0 as u32) < self.q
    }

    fn check(&self, a: Fq) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "element with packed value {} does not belong to F_{}",
                a.0, self.q
            )))
        }
    }

    /// Element from its coefficient vector (constant term first). Shorter
    /// vectors are padded with zeros.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fq> {
        if coeffs.len() > self.d as usize {
            return Err(Error::Parameter(format!(
                "expected at most {} coefficients, got {}",
                self.d,
                coeffs.len()
            )));
        }
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(Error::Parameter(format!(
                    "coefficient {c} out of range for characteristic {}",
                    self.p
                )));
            }
            v = v * self.p + c;
        }
        Ok(Fq(v as u16))
    }

    /// Coefficient vector of length `d`, constant term first.
    pub fn coeffs(&self, a: Fq) -> Vec<u32> {
        let digits = self.digits(a);
        digits[..self.d as usize].to_vec()
    }

    /// Element with packed value `v`.
    pub fn from_value(&self, v: u32) -> Result<Fq> {
        if v >= self.q {
            return Err(Error::Parameter(format!("value {v} is not below q = {}", self.q)));
        }
        Ok(Fq(v as u16))
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, k: i64) -> Fq {
        Fq(k.rem_euclid(self.p as i64) as u16)
    }

    /// The class of `x` (the polynomial generator of the basis).
    pub fn x(&self) -> Fq {
        if self.d >= 2 {
            Fq(self.p as u16)
        } else {
            // x = -modulus[0] in a prime field
            self.from_int(-(self.params.modulus[0] as i64))
        }
    }

    fn digits(&self, a: Fq) -> [u32; MAX_DIGITS] {
        let mut out = [0u32; MAX_DIGITS];
        let mut v = a.0 as u32;
        for slot in out.iter_mut().take(self.d as usize) {
            *slot = v % self.p;
            v /= self.p;
        }
        out
    }

    fn pack(&self, digits: &[u32]) -> Fq {
        let mut v = 0u32;
        for &c in digits[..self.d as usize].iter().rev() {
            v = v * self.p + c;
        }
        Fq(v as u16)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        if self.d == 1 {
            return Fq(((a.0 as u32 + b.0 as u32) % self.p) as u16);
        }
        let (x, y) = (self.digits(a), self.digits(b));
        let mut z = [0u32; MAX_DIGITS];
        for i in 0..self.d as usize {
            z[i] = (x[i] + y[i]) % self.p;
        }
        self.pack(&z)
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        if self.p == 2 {
            return a;
        }
        if self.d == 1 {
            return Fq(((self.p - a.0 as u32) % self.p) as u16);
        }
        let x = self.digits(a);
        let mut z = [0u32; MAX_DIGITS];
        for i in 0..self.d as usize {
            z[i] = (self.p - x[i]) % self.p;
        }
        self.pack(&z)
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    /// Polynomial product reduced by the modulus.
    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if self.p == 2 {
            return Fq(self.mul_char2(a.0 as u32, b.0 as u32) as u16);
        }
        if self.d == 1 {
            return Fq((a.0 as u32 * b.0 as u32 % self.p) as u16);
        }
        self.mul_general(a, b)
    }

    #[inline]
    fn mul_char2(&self, a: u32, b: u32) -> u32 {
        let d = self.d;
        let mut r = 0u32;
        let mut bb = b;
        let mut shift = 0;
        while bb != 0 {
            if bb & 1 == 1 {
                r ^= a << shift;
            }
            bb >>= 1;
            shift += 1;
        }
        let mut i = 2 * d - 1;
        while i >= d {
            if (r >> i) & 1 == 1 {
                r ^= self.modulus_bits << (i - d);
            }
            i -= 1;
        }
        r
    }

    fn mul_general(&self, a: Fq, b: Fq) -> Fq {
        let d = self.d as usize;
        let p = self.p as u64;
        let (x, y) = (self.digits(a), self.digits(b));
        let mut prod = [0u64; 2 * MAX_DIGITS];
        for i in 0..d {
            if x[i] == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] = (prod[i + j] + x[i] as u64 * y[j] as u64) % p;
            }
        }
        for i in (d..2 * d - 1).rev() {
            let lead = prod[i];
            if lead != 0 {
                for j in 0..d {
                    let sub = lead * self.params.modulus[j] as u64 % p;
                    prod[i - d + j] = (prod[i - d + j] + p - sub) % p;
                }
                prod[i] = 0;
            }
        }
        let mut z = [0u32; MAX_DIGITS];
        for i in 0..d {
            z[i] = prod[i] as u32;
        }
        self.pack(&z)
    }

    /// Product with membership checks on both operands.
    pub fn try_mul(&self, a: Fq, b: Fq) -> Result<Fq> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Fq {
        let mut base = a;
        let mut acc = Fq::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        self.check(a)?;
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fq) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::Domain("zero has no multiplicative order".into()));
        }
        let mut x = a;
        let mut n = 1;
        while x != Fq::ONE {
            x = self.mul(x, a);
            n += 1;
        }
        Ok(n)
    }

    /// Smallest (in enumeration order) generator of the unit group.
    pub fn primitive_element(&self) -> Fq {
        (1..self.q)
            .map(|v| Fq(v as u16))
            .find(|&a| self.order(a).ok() == Some(self.q - 1))
            .expect("the unit group of a finite field is cyclic")
    }

    /// All elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.q).map(|v| Fq(v as u16))
    }

    /// Materialized enumeration, refusing fields larger than `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<Fq>> {
        if self.q as u64 > cap {
            return Err(Error::capacity("field enumeration", self.q as u128, cap as u128));
        }
        Ok(self.elements().collect())
    }

    /// The cyclic subgroup of F_q^x generated by `generator`.
    pub fn subgroup_of_units(&self, generator: Fq) -> Result<UnitSubgroup> {
        self.check(generator)?;
        if generator.is_zero() {
            return Err(Error::Domain("zero does not generate a subgroup of units".into()));
        }
        let mut elements = vec![Fq::ONE];
        let mut x = generator;
        while x != Fq::ONE {
            elements.push(x);
            x = self.mul(x, generator);
        }
        elements.sort_unstable();
        Ok(UnitSubgroup { generator, elements })
    }

    pub fn trivial_units(&self) -> UnitSubgroup {
        UnitSubgroup {
            generator: Fq::ONE,
            elements: vec![Fq::ONE],
        }
    }

    pub fn all_units(&self) -> UnitSubgroup {
        self.subgroup_of_units(self.primitive_element())
            .expect("primitive element is nonzero")
    }

    /// Human-readable polynomial, e.g. `x^2+x+1`.
    pub fn format(&self, a: Fq) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let digits = self.digits(a);
        let mut terms = Vec::new();
        for i in (0..self.d as usize).rev() {
            let c = digits[i];
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        terms.join("+")
    }
}

impl Ring for Field {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        Fq::ZERO
    }
    fn one(&self) -> Fq {
        Fq::ONE
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        Field::add(self, *a, *b)
    }
    fn neg(&self, a: &Fq) -> Fq {
        Field::neg(self, *a)
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        Field::mul(self, *a, *b)
    }
    fn inv(&self, a: &Fq) -> Option<Fq> {
        Field::inv(self, *a).ok()
    }
}

/// A subgroup D of F_q^x, stored as its generator and sorted element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitSubgroup {
    generator: Fq,
    elements: Vec<Fq>,
}

impl UnitSubgroup {
    pub fn generator(&self) -> Fq {
        self.generator
    }

    pub fn elements(&self) -> &[Fq] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, a: Fq) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }
}
