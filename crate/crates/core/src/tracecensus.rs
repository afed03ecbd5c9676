//! Distinct-trace counts of `M ⋊ GL_2^D(F_q)` inside GL_2(T), by closed
//! formula and by exhaustive enumeration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ffield::{is_prime, Field};
use crate::localalg::{LocalAlgebra, TElem};
use crate::matgrp::{enumerate_gl2d, lift, GroupSpec, Mat2};
use crate::modlat::{realize_embedding, ModuleEmbedding, SubmoduleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMethod {
    Formula,
    Bruteforce,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusResult {
    pub t: u128,
    /// Number of group elements with each trace (brute force only).
    pub multiplicities: Option<BTreeMap<TElem, u64>>,
    pub method: CensusMethod,
}

/// `q^alpha ((q - 1) 2^beta + 1)` for `p = 2`, `q^(m+1)` for odd `p`
/// (which requires `alpha = m`, `beta = 0`).
pub fn census_formula(p: u32, d: u32, m: usize, alpha: usize, beta: usize) -> Result<u128> {
    if !is_prime(p as u64) || d == 0 {
        return Err(Error::Domain(format!("invalid field parameters p = {p}, d = {d}")));
    }
    let overflow = || Error::Domain("trace count does not fit in 128 bits".into());
    let q = (p as u128).checked_pow(d).ok_or_else(overflow)?;
    if alpha > m {
        return Err(Error::Domain(format!("alpha = {alpha} exceeds m = {m}")));
    }
    if p != 2 {
        if alpha != m || beta != 0 {
            return Err(Error::Domain(format!(
                "odd characteristic needs alpha = m and beta = 0, got ({alpha}, {beta})"
            )));
        }
        return q.checked_pow(m as u32 + 1).ok_or_else(overflow);
    }
    let max_beta = d as usize * (m - alpha);
    if beta > max_beta {
        return Err(Error::Domain(format!(
            "beta = {beta} exceeds d(m - alpha) = {max_beta}"
        )));
    }
    let two_beta = 1u128.checked_shl(beta as u32).ok_or_else(overflow)?;
    let t2 = (q - 1)
        .checked_mul(two_beta)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(overflow)?;
    q.checked_pow(alpha as u32)
        .and_then(|t1| t1.checked_mul(t2))
        .ok_or_else(overflow)
}

/// Counts the distinct traces of `(1 + mu) h` over all `mu` in `module`
/// and `h` in GL_2^D(F_q), sharding the `h` loop across threads.
pub fn census_bruteforce(module: &SubmoduleSet, caps: &Caps) -> Result<CensusResult> {
    let spec = module.spec();
    let f = spec.field();
    let t = LocalAlgebra::new(f.clone(), module.m());
    let budget = (module.len() as u128).saturating_mul(spec.order());
    caps.check_census("brute-force trace census", budget)?;
    let group = enumerate_gl2d(spec, caps.enumeration)?;
    let units: Vec<Mat2<TElem>> = module
        .elements()
        .iter()
        .map(|tuple| {
            let mut u = Mat2::identity(&t);
            for (k, a) in tuple.iter().enumerate() {
                let x = t.generator(k + 1).expect("coordinate in range");
                u = u.add(&t, &lift(&t, a).scale(&t, &x));
            }
            u
        })
        .collect();
    let chunk = (group.len() / (4 * rayon::current_num_threads()).max(1)).max(1);
    let counts = group
        .par_chunks(chunk)
        .map(|hs| {
            let mut local: FxHashMap<TElem, u64> = FxHashMap::default();
            for h in hs {
                let h = lift(&t, h);
                for u in &units {
                    *local.entry(u.trace_of_product(&t, &h)).or_insert(0) += 1;
                }
            }
            local
        })
        .reduce(FxHashMap::default, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let multiplicities: BTreeMap<TElem, u64> = counts.into_iter().collect();
    Ok(CensusResult {
        t: multiplicities.len() as u128,
        multiplicities: Some(multiplicities),
        method: CensusMethod::Bruteforce,
    })
}

/// Brute-force census of the module described by an embedding.
pub fn census_embedding(spec: &GroupSpec, e: &ModuleEmbedding, caps: &Caps) -> Result<CensusResult> {
    let budget = e.size(spec.field()).saturating_mul(spec.order());
    caps.check_census("brute-force trace census", budget)?;
    let module = realize_embedding(spec, e, caps.enumeration)?;
    census_bruteforce(&module, caps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceGeneration {
    /// Whether the traces generate all of T as an F_q-algebra.
    pub generates: bool,
    /// F_q-dimension of the generated subalgebra.
    pub dim: usize,
}

/// Whether the traces of `module ⋊ GL_2^D(F_q)` generate T.
pub fn traces_generate(module: &SubmoduleSet, caps: &Caps) -> Result<TraceGeneration> {
    let census = census_bruteforce(module, caps)?;
    let t = LocalAlgebra::new(module.spec().field().clone(), module.m());
    let traces: Vec<TElem> = census
        .multiplicities
        .expect("brute force records multiplicities")
        .into_keys()
        .collect();
    let sub = t.subalgebra_generated(&traces, caps.enumeration)?;
    Ok(TraceGeneration {
        generates: sub.dim == t.dim(),
        dim: sub.dim,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    /// Formula value confirmed by a full brute-force census.
    Verified,
    /// Brute force confirmed the scalar-block factor `(q-1)2^beta + 1`;
    /// the `q^alpha` factor is formula-only.
    ScalarPartVerified,
    FormulaOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableCell {
    pub alpha: usize,
    pub beta: usize,
    pub t: u128,
    pub status: CellStatus,
    /// `beta >= m - alpha`: otherwise some `X_k` never occurs in a trace and
    /// the traces cannot generate T.
    pub c_compatible: bool,
}

/// Realizable trace counts for fixed `(p, d, m)` laid out by `alpha` (rows)
/// and `beta` (columns `0..=d m`); `None` marks an impossible cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTable {
    pub p: u32,
    pub d: u32,
    pub m: usize,
    pub rows: Vec<Vec<Option<TableCell>>>,
}

impl CensusTable {
    pub fn cells(&self) -> impl Iterator<Item = &TableCell> {
        self.rows.iter().flatten().flatten()
    }

    pub fn get(&self, alpha: usize, beta: usize) -> Option<&TableCell> {
        self.rows.get(alpha)?.get(beta)?.as_ref()
    }

    /// Plain-text grid: `alpha` down, `beta` across, `-` for impossible cells.
    pub fn render(&self) -> String {
        let q = (self.p as u128).pow(self.d);
        let cols = self.rows.first().map_or(0, Vec::len);
        let width = self.cells().map(|c| c.t.to_string().len()).max().unwrap_or(1).max(2) + 1;
        let mut out = String::new();
        let _ = writeln!(out, "q = {q}, m = {}", self.m);
        let _ = write!(out, "alpha\\beta");
        for b in 0..cols {
            let _ = write!(out, "{b:>width$}");
        }
        out.push('\n');
        for (a, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "{a:>10}");
            for cell in row {
                match cell {
                    Some(c) => {
                        let _ = write!(out, "{:>width$}", c.t);
                    }
                    None => {
                        let _ = write!(out, "{:>width$}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// All trace counts for characteristic 2, optionally confirming each cell
/// by brute force within the census cap.
pub fn generate_table(p: u32, d: u32, m: usize, verify: bool, caps: &Caps) -> Result<CensusTable> {
    if p != 2 {
        return Err(Error::Domain(format!(
            "trace-count tables exist only in characteristic 2, got p = {p}"
        )));
    }
    let width = d as usize * m + 1;
    let spec = if verify {
        Some(GroupSpec::special(Field::standard(p, d)?))
    } else {
        None
    };
    let mut rows = Vec::with_capacity(m + 1);
    for alpha in 0..=m {
        let mut row = vec![None; width];
        for (beta, slot) in row.iter_mut().enumerate().take(d as usize * (m - alpha) + 1) {
            let t = census_formula(p, d, m, alpha, beta)?;
            let status = match &spec {
                None => CellStatus::FormulaOnly,
                Some(spec) => verify_cell(spec, m, alpha, beta, t, caps)?,
            };
            *slot = Some(TableCell {
                alpha,
                beta,
                t,
                status,
                c_compatible: beta >= m - alpha,
            });
        }
        rows.push(row);
    }
    Ok(CensusTable { p, d, m, rows })
}

fn verify_cell(spec: &GroupSpec, m: usize, alpha: usize, beta: usize, t: u128, caps: &Caps) -> Result<CellStatus> {
    let f = spec.field();
    let full = ModuleEmbedding::canonical(f, m, alpha, beta)?;
    let fits = |e: &ModuleEmbedding| e.size(f).saturating_mul(spec.order()) <= caps.census as u128;
    if fits(&full) {
        let got = census_embedding(spec, &full, caps)?.t;
        if got != t {
            return Err(Error::TheoremViolation(format!(
                "alpha = {alpha}, beta = {beta}: formula gives {t}, enumeration finds {got}"
            )));
        }
        return Ok(CellStatus::Verified);
    }
    if m > alpha {
        let scalar_part = ModuleEmbedding::canonical(f, m - alpha, 0, beta)?;
        if fits(&scalar_part) {
            let got = census_embedding(spec, &scalar_part, caps)?.t;
            let want = census_formula(f.p(), f.d(), m - alpha, 0, beta)?;
            if got != want {
                return Err(Error::TheoremViolation(format!(
                    "scalar part beta = {beta}: formula gives {want}, enumeration finds {got}"
                )));
            }
            return Ok(CellStatus::ScalarPartVerified);
        }
    }
    Ok(CellStatus::FormulaOnly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert_eq!(census_formula(2, 2, 1, 0, 1).unwrap(), 7);
        assert_eq!(census_formula(2, 3, 2, 1, 3).unwrap(), 456);
        assert_eq!(census_formula(2, 4, 3, 0, 12).unwrap(), 61441);
        assert_eq!(census_formula(7, 1, 1, 1, 0).unwrap(), 49);
        assert!(matches!(census_formula(2, 2, 1, 1, 1), Err(Error::Domain(_))));
        assert!(matches!(census_formula(7, 1, 2, 1, 0), Err(Error::Domain(_))));
        assert!(matches!(census_formula(4, 1, 1, 1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn small_censuses() {
        let caps = Caps::default();
        let spec = GroupSpec::special(Field::standard(2, 2).unwrap());
        let f = spec.field().clone();
        let e = ModuleEmbedding::canonical(&f, 1, 0, 1).unwrap();
        let r = census_embedding(&spec, &e, &caps).unwrap();
        assert_eq!(r.t, 7);
        let mult = r.multiplicities.unwrap();
        assert_eq!(mult.values().sum::<u64>(), 2 * 60);
        let t = LocalAlgebra::new(f.clone(), 1);
        assert!(mult[&t.constant(crate::Fq::ZERO)] > 0);
        let full = ModuleEmbedding::canonical(&f, 1, 1, 0).unwrap();
        assert_eq!(census_embedding(&spec, &full, &caps).unwrap().t, 16);
    }

    #[test]
    fn census_respects_cap() {
        let spec = GroupSpec::special(Field::standard(2, 2).unwrap());
        let e = ModuleEmbedding::canonical(spec.field(), 1, 1, 0).unwrap();
        let err = census_embedding(&spec, &e, &Caps::uniform(1000)).unwrap_err();
        assert!(matches!(err, Error::Capacity { required: 3840, .. }));
    }

    #[test]
    fn generation_hypothesis() {
        let caps = Caps::default();
        let spec = GroupSpec::special(Field::standard(2, 2).unwrap());
        let f = spec.field().clone();
        let realize = |m, e: ModuleEmbedding| {
            assert_eq!(e.m(), m);
            realize_embedding(&spec, &e, caps.enumeration).unwrap()
        };
        let full = realize(1, ModuleEmbedding::canonical(&f, 1, 1, 0).unwrap());
        assert!(traces_generate(&full, &caps).unwrap().generates);
        let zero = realize(1, ModuleEmbedding::canonical(&f, 1, 0, 0).unwrap());
        let g = traces_generate(&zero, &caps).unwrap();
        assert!(!g.generates);
        assert_eq!(g.dim, 1);
        let one_block = realize(
            2,
            ModuleEmbedding::new(&f, 0, vec![vec![crate::Fq::ONE], vec![]]).unwrap(),
        );
        let g = traces_generate(&one_block, &caps).unwrap();
        assert_eq!((g.generates, g.dim), (false, 2));
    }

    #[test]
    fn table_layout() {
        let t = generate_table(2, 2, 1, false, &Caps::default()).unwrap();
        let row = |a: usize| t.rows[a].iter().map(|c| c.as_ref().map(|c| c.t)).collect::<Vec<_>>();
        assert_eq!(row(0), vec![Some(4), Some(7), Some(13)]);
        assert_eq!(row(1), vec![Some(16), None, None]);
        assert!(!t.get(0, 0).unwrap().c_compatible);
        assert!(t.get(0, 1).unwrap().c_compatible);
        assert_eq!(
            t.render(),
            "q = 4, m = 1\nalpha\\beta  0  1  2\n         0  4  7 13\n         1 16  -  -\n"
        );
    }
}
