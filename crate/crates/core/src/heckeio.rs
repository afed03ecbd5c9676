//! Hecke trace datasets: parsing and writing the interchange format, the
//! online distinct-trace count, the analysis pipeline, and a generator for
//! synthetic datasets with a known image.
//!
//! Format (UTF-8 JSON, compact, keys in this order):
//!
//! ```text
//! {"field":{"p":2,"d":2,"modulus":[1,1,1]},"m":1,"level":67,"weight":2,
//!  "records":[{"ell":3,"trace":[[0,1],[1,0]]}, ...]}
//! ```
//!
//! A trace is `m + 1` coefficient vectors, constant term first. Optional
//! `"character"` and `"note"` strings may follow `"weight"`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::ffield::{is_prime, Field, FieldParams};
use crate::imageinfer::{
    ext_degrees, infer, multiplicity_report, realizable_counts, ExtensionReport, ImageHypothesis, MultiplicityReport,
    Observation, Realization, StabilityRule, Verdict,
};
use crate::localalg::{LocalAlgebra, TElem};
use crate::matgrp::{enumerate_gl2d, lift, GroupSpec, Mat2};
use crate::modlat::{realize_embedding, ModuleEmbedding};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DatasetError {
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("invalid header: {0}")]
    Header(String),

    #[error("record {index}: ell = {ell} is not prime")]
    CompositeEll { index: usize, ell: u64 },

    #[error("record {index}: ell = {ell} divides N p = {np}")]
    EllDividesLevel { index: usize, ell: u64, np: u64 },

    #[error("record {index}: ell = {ell} already appeared")]
    DuplicateEll { index: usize, ell: u64 },

    #[error("record {index}: expected {expected}, found {found}")]
    CoordinateLength {
        index: usize,
        expected: String,
        found: String,
    },

    #[error("record {index}: coefficient {value} is not a residue mod {p}")]
    CoefficientRange { index: usize, value: u32, p: u32 },
}

impl DatasetError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            DatasetError::Schema(_) => "schema",
            DatasetError::Header(_) => "header",
            DatasetError::CompositeEll { .. } => "composite-ell",
            DatasetError::EllDividesLevel { .. } => "ell-divides-level",
            DatasetError::DuplicateEll { .. } => "duplicate-ell",
            DatasetError::CoordinateLength { .. } => "coordinate-length",
            DatasetError::CoefficientRange { .. } => "coefficient-range",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetWire {
    field: FieldParams,
    m: usize,
    level: u64,
    weight: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    character: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    records: Vec<RecordWire>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordWire {
    ell: u64,
    trace: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeRecord {
    pub ell: u64,
    pub trace: TElem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeDataset {
    algebra: LocalAlgebra,
    pub level: u64,
    pub weight: u32,
    pub character: Option<String>,
    pub note: Option<String>,
    pub records: Vec<HeckeRecord>,
}

impl HeckeDataset {
    pub fn new(algebra: LocalAlgebra, level: u64, weight: u32) -> Self {
        HeckeDataset {
            algebra,
            level,
            weight,
            character: None,
            note: None,
            records: Vec::new(),
        }
    }

    pub fn algebra(&self) -> &LocalAlgebra {
        &self.algebra
    }

    pub fn field(&self) -> &Field {
        self.algebra.field()
    }

    pub fn m(&self) -> usize {
        self.algebra.m()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Largest `ell` present.
    pub fn bound(&self) -> Option<u64> {
        self.records.iter().map(|r| r.ell).max()
    }

    /// Compact JSON in the interchange format.
    pub fn to_json(&self) -> String {
        let wire = DatasetWire {
            field: self.field().params().clone(),
            m: self.m(),
            level: self.level,
            weight: self.weight,
            character: self.character.clone(),
            note: self.note.clone(),
            records: self
                .records
                .iter()
                .map(|r| RecordWire {
                    ell: r.ell,
                    trace: self.algebra.to_wire(&r.trace),
                })
                .collect(),
        };
        serde_json::to_string(&wire).expect("dataset serializes")
    }
}

/// Parses and validates a dataset: well-formed header, every `ell` a prime
/// not dividing `N p` and not repeated, every trace `m + 1` vectors of `d`
/// residues mod `p`.
pub fn parse_dataset(bytes: &[u8]) -> std::result::Result<HeckeDataset, DatasetError> {
    let wire: DatasetWire = serde_json::from_slice(bytes).map_err(|e| DatasetError::Schema(e.to_string()))?;
    let field = Field::new(wire.field).map_err(|e| DatasetError::Header(e.to_string()))?;
    if wire.level == 0 {
        return Err(DatasetError::Header("level must be positive".into()));
    }
    let p = field.p();
    let d = field.d() as usize;
    let np = wire.level.saturating_mul(p as u64);
    let algebra = LocalAlgebra::new(field, wire.m);
    let mut seen = rustc_hash::FxHashSet::default();
    let mut records = Vec::with_capacity(wire.records.len());
    for (index, r) in wire.records.into_iter().enumerate() {
        let ell = r.ell;
        if !is_prime(ell) {
            return Err(DatasetError::CompositeEll { index, ell });
        }
        if np.is_multiple_of(ell) {
            return Err(DatasetError::EllDividesLevel { index, ell, np });
        }
        if !seen.insert(ell) {
            return Err(DatasetError::DuplicateEll { index, ell });
        }
        let lens: Vec<usize> = r.trace.iter().map(Vec::len).collect();
        if lens.len() != wire.m + 1 || lens.iter().any(|&l| l != d) {
            return Err(DatasetError::CoordinateLength {
                index,
                expected: format!("{} vectors of length {d}", wire.m + 1),
                found: format!("vector lengths {lens:?}"),
            });
        }
        if let Some(&value) = r.trace.iter().flatten().find(|&&c| c >= p) {
            return Err(DatasetError::CoefficientRange { index, value, p });
        }
        let trace = algebra
            .from_wire(&r.trace)
            .map_err(|e| DatasetError::Schema(e.to_string()))?;
        records.push(HeckeRecord { ell, trace });
    }
    Ok(HeckeDataset {
        algebra,
        level: wire.level,
        weight: wire.weight,
        character: wire.character,
        note: wire.note,
        records,
    })
}

/// Running distinct-trace count over a record stream.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StreamCensus {
    /// Distinct traces in order of first appearance.
    pub distinct: Vec<TElem>,
    /// Multiplicities aligned with `distinct`.
    pub multiplicities: Vec<u64>,
    /// Record index at which each distinct trace first appeared.
    pub first_positions: Vec<u64>,
    pub consumed: u64,
    /// Largest `ell` consumed.
    pub bound: Option<u64>,
    index: FxHashMap<TElem, usize>,
}

impl StreamCensus {
    pub fn push(&mut self, record: &HeckeRecord) {
        match self.index.get(&record.trace) {
            Some(&i) => self.multiplicities[i] += 1,
            None => {
                self.index.insert(record.trace.clone(), self.distinct.len());
                self.distinct.push(record.trace.clone());
                self.multiplicities.push(1);
                self.first_positions.push(self.consumed);
            }
        }
        self.consumed += 1;
        self.bound = self.bound.max(Some(record.ell));
    }

    /// The observed count `t~`.
    pub fn observed(&self) -> usize {
        self.distinct.len()
    }

    pub fn last_new_position(&self) -> Option<u64> {
        self.first_positions.last().copied()
    }

    pub fn observation(&self, level: Option<u64>) -> Observation {
        Observation {
            multiplicities: self.multiplicities.clone(),
            last_new_position: self.last_new_position(),
            bound: self.bound,
            level,
        }
    }
}

/// Folds the records in file order.
pub fn stream_census(ds: &HeckeDataset) -> StreamCensus {
    let mut census = StreamCensus::default();
    for r in &ds.records {
        census.push(r);
    }
    census
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DatasetSummary {
    pub p: u32,
    pub d: u32,
    pub q: u32,
    pub m: usize,
    pub level: u64,
    pub weight: u32,
    pub records: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StreamSummary {
    pub observed: usize,
    /// Distinct traces in order of first appearance, in wire form.
    pub traces: Vec<Vec<Vec<u32>>>,
    pub multiplicities: Vec<u64>,
    pub first_positions: Vec<u64>,
    pub bound: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Analysis {
    pub dataset: DatasetSummary,
    pub stream: StreamSummary,
    pub multiplicities: MultiplicityReport,
    /// Every realizable `(t, alpha, beta)` with `t >= t~`.
    pub candidates: Vec<Realization>,
    /// Present when `t~` is realizable and the verdict is stable.
    pub hypothesis: Option<ImageHypothesis>,
    pub extension: Option<ExtensionReport>,
}

/// Stream census, multiplicity report, and, when the observation is stable
/// and realizable, the image hypothesis and its extension degrees. `|D|` is
/// not recorded in the dataset and is passed in.
pub fn analyze(ds: &HeckeDataset, det_order: u64, rule: StabilityRule) -> Result<Analysis> {
    let f = ds.field();
    let (p, d, q) = (f.p(), f.d(), f.q());
    if matches!(q, 2 | 3 | 5) {
        return Err(Error::Domain(format!("q = {q} is too small for the classification")));
    }
    let m = ds.m();
    let census = stream_census(ds);
    let report = multiplicity_report(&census.observation(Some(ds.level)), p, d, m, rule)?;
    let t = census.observed() as u128;
    let candidates: Vec<Realization> = realizable_counts(p, d, m)?.into_iter().filter(|r| r.t >= t).collect();
    let (hypothesis, extension) = if report.verdict == Verdict::Stable {
        let h = infer(p, d, m, t, det_order)?;
        let e = ext_degrees(p, d, m, h.alpha, h.beta.unwrap_or(0))?;
        (Some(h), Some(e))
    } else {
        (None, None)
    };
    Ok(Analysis {
        dataset: DatasetSummary {
            p,
            d,
            q,
            m,
            level: ds.level,
            weight: ds.weight,
            records: ds.len(),
        },
        stream: StreamSummary {
            observed: census.observed(),
            traces: census.distinct.iter().map(|x| ds.algebra.to_wire(x)).collect(),
            multiplicities: census.multiplicities.clone(),
            first_positions: census.first_positions.clone(),
            bound: census.bound,
        },
        multiplicities: report,
        candidates,
        hypothesis,
        extension,
    })
}

/// The primes from 3 upward not dividing `np`, `count` of them.
fn synthetic_primes(np: u64, count: usize) -> Vec<u64> {
    (3u64..)
        .filter(|&l| is_prime(l) && !np.is_multiple_of(l))
        .take(count)
        .collect()
}

/// `count` traces of uniformly random elements `(1 + mu) h` of
/// `M x GL_2^D(F_q)`, labelled by the primes from 3 upward (level 1,
/// weight 2). Deterministic in `seed`.
pub fn synth_dataset(
    spec: &GroupSpec,
    embedding: &ModuleEmbedding,
    count: usize,
    seed: u64,
    caps: &Caps,
) -> Result<HeckeDataset> {
    let f = spec.field();
    caps.check_enumeration("synthetic module", embedding.size(f))?;
    let module = realize_embedding(spec, embedding, caps.enumeration)?;
    let group = enumerate_gl2d(spec, caps.enumeration)?;
    let t = LocalAlgebra::new(f.clone(), embedding.m());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = synthetic_primes(f.p() as u64, count);
    let records = primes
        .into_iter()
        .map(|ell| {
            let mu = &module.elements()[rng.gen_range(0..module.len())];
            let h = lift(&t, &group[rng.gen_range(0..group.len())]);
            let mut u = Mat2::identity(&t);
            for (k, a) in mu.iter().enumerate() {
                let x = t.generator(k + 1).expect("coordinate in range");
                u = u.add(&t, &lift(&t, a).scale(&t, &x));
            }
            HeckeRecord {
                ell,
                trace: u.trace_of_product(&t, &h),
            }
        })
        .collect();
    let mut ds = HeckeDataset::new(t, 1, 2);
    ds.note = Some(format!(
        "synthetic: traces of uniform samples from M x {}, alpha {}, beta {}, seed {seed}",
        spec.name(),
        embedding.alpha(),
        embedding.beta()
    ));
    ds.records = records;
    Ok(ds)
}

/// Multiplicities of the seven traces at level 67 over F_4 with `m = 1`,
/// for the prime bounds 1000 and 5000.
pub const N67_MULTIPLICITIES_1000: [u64; 7] = [21, 31, 15, 14, 39, 16, 30];
pub const N67_MULTIPLICITIES_5000: [u64; 7] = [58, 114, 69, 67, 185, 63, 111];

/// Reconstructs the level-67 dataset for prime bound 1000 or 5000 from its
/// published multiplicities. Only the counts are real: the trace values are
/// the seven traces of `C_2 x SL_2(F_4)` (`0, 1, x, x+1, 1+X, x+xX,
/// (x+1)+(x+1)X`) assigned in that order, the first seven primes carry one
/// of each, and the remaining primes get a fixed pseudo-random arrangement
/// of the remaining counts.
pub fn reconstruct_n67(bound: u64) -> Result<HeckeDataset> {
    let mults = match bound {
        1000 => N67_MULTIPLICITIES_1000,
        5000 => N67_MULTIPLICITIES_5000,
        _ => {
            return Err(Error::Parameter(format!(
                "no published multiplicities for bound {bound}"
            )))
        }
    };
    let f = Field::standard(2, 2)?;
    let t = LocalAlgebra::new(f.clone(), 1);
    let x = f.x();
    let x1 = f.add(x, crate::Fq::ONE);
    let labels: Vec<TElem> = [
        (crate::Fq::ZERO, crate::Fq::ZERO),
        (crate::Fq::ONE, crate::Fq::ZERO),
        (x, crate::Fq::ZERO),
        (x1, crate::Fq::ZERO),
        (crate::Fq::ONE, crate::Fq::ONE),
        (x, x),
        (x1, x1),
    ]
    .iter()
    .map(|&(c0, e)| t.element(c0, &[e]).expect("one coordinate"))
    .collect();
    let primes: Vec<u64> = (3..=bound).filter(|&l| is_prime(l) && l != 67).collect();
    let total: u64 = mults.iter().sum();
    if primes.len() as u64 != total {
        return Err(Error::TheoremViolation(format!(
            "{} good primes up to {bound} but multiplicities sum to {total}",
            primes.len()
        )));
    }
    let mut order: Vec<usize> = (0..7).collect();
    let mut rest: Vec<usize> = mults
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize - 1))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    for i in (1..rest.len()).rev() {
        rest.swap(i, rng.gen_range(0..=i));
    }
    order.extend(rest);
    let mut ds = HeckeDataset::new(t, 67, 2);
    ds.note = Some(format!(
        "reconstructed from published multiplicities up to b = {bound}; trace values are stand-in labels, only the counts are real"
    ));
    ds.records = primes
        .into_iter()
        .zip(order)
        .map(|(ell, i)| HeckeRecord {
            ell,
            trace: labels[i].clone(),
        })
        .collect();
    Ok(ds)
}
