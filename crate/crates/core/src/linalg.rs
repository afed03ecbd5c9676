//! Row-reduced echelon bases over a finite field.

use crate::error::Result;
use crate::ffield::{Field, Fq};

/// Subspace of `F^len` kept in reduced row echelon form, so that two equal
/// subspaces always have identical row lists.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    len: usize,
    rows: Vec<Vec<Fq>>,
    pivots: Vec<usize>,
}

impl PartialEq for Echelon {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.len == other.len && self.rows == other.rows
    }
}

impl Eq for Echelon {}

impl Echelon {
    pub fn new(field: Field, len: usize) -> Self {
        Echelon {
            field,
            len,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_vectors<I: IntoIterator<Item = Vec<Fq>>>(field: Field, len: usize, vs: I) -> Self {
        let mut e = Echelon::new(field, len);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Fq>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn reduce(&self, v: &[Fq]) -> Vec<Fq> {
        debug_assert_eq!(v.len(), self.len);
        let f = &self.field;
        let mut r = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let coef = r[piv];
            if coef.is_zero() {
                continue;
            }
            for (x, &y) in r.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = f.sub(*x, f.mul(coef, y));
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Fq]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<Fq>) -> bool {
        let mut r = self.reduce(&v);
        let Some(piv) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let f = self.field.clone();
        let scale = f.inv(r[piv]).expect("pivot is nonzero");
        for x in r.iter_mut() {
            *x = f.mul(*x, scale);
        }
        for row in self.rows.iter_mut() {
            let coef = row[piv];
            if coef.is_zero() {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&r) {
                *x = f.sub(*x, f.mul(coef, y));
            }
        }
        let pos = self.pivots.partition_point(|&p| p < piv);
        self.pivots.insert(pos, piv);
        self.rows.insert(pos, r);
        true
    }

    /// Every vector of the span, in the order of coefficient tuples.
    pub fn span_elements(&self, cap: u64) -> Result<Vec<Vec<Fq>>> {
        let q = self.field.q() as u128;
        let size = q.checked_pow(self.dim() as u32).unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(crate::error::Error::capacity("span enumeration", size, cap as u128));
        }
        let f = &self.field;
        let mut out = vec![vec![Fq::ZERO; self.len]];
        for row in &self.rows {
            let mut next = Vec::with_capacity(out.len() * q as usize);
            for c in f.elements() {
                for v in &out {
                    let mut w = v.clone();
                    if !c.is_zero() {
                        for (x, &y) in w.iter_mut().zip(row) {
                            *x = f.add(*x, f.mul(c, y));
                        }
                    }
                    next.push(w);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Dimension of the intersection with another subspace of the same ambient.
    pub fn intersection_dim(&self, other: &Echelon) -> usize {
        let mut sum = self.clone();
        for r in other.rows() {
            sum.insert(r.clone());
        }
        self.dim() + other.dim() - sum.dim()
    }
}

/// Inverse of a square matrix (list of rows), or `None` when singular.
pub fn invert(field: &Field, m: &[Vec<Fq>]) -> Option<Vec<Vec<Fq>>> {
    let n = m.len();
    let f = field;
    let mut a: Vec<Vec<Fq>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Fq::ONE } else { Fq::ZERO }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let s = f.inv(a[col][col]).ok()?;
        for x in a[col].iter_mut() {
            *x = f.mul(*x, s);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let coef = a[r][col];
            let pivot_row = a[col].clone();
            for (x, y) in a[r].iter_mut().zip(pivot_row) {
                *x = f.sub(*x, f.mul(coef, y));
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
