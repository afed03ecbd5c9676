//! From a distinct-trace count back to the image group, the degrees of the
//! field extensions it cuts out, and a stability verdict for observed
//! trace multiplicities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffield::is_prime;
use crate::matgrp::{group_name, subscript, superscript};
use crate::tracecensus::census_formula;

/// A realizable trace count with the `(alpha, beta)` producing it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Realization {
    pub t: u128,
    pub alpha: usize,
    pub beta: usize,
}

fn check_params(p: u32, d: u32) -> Result<u128> {
    if !is_prime(p as u64) || d == 0 {
        return Err(Error::Domain(format!("invalid field parameters p = {p}, d = {d}")));
    }
    (p as u128)
        .checked_pow(d)
        .ok_or_else(|| Error::Domain("q does not fit in 128 bits".into()))
}

/// Every realizable `t` for fixed `(p, d, m)`, sorted by `t`.
pub fn realizable_counts(p: u32, d: u32, m: usize) -> Result<Vec<Realization>> {
    check_params(p, d)?;
    let mut out = Vec::new();
    if p == 2 {
        for alpha in 0..=m {
            for beta in 0..=d as usize * (m - alpha) {
                let t = census_formula(p, d, m, alpha, beta)?;
                out.push(Realization { t, alpha, beta });
            }
        }
    } else {
        out.push(Realization {
            t: census_formula(p, d, m, m, 0)?,
            alpha: m,
            beta: 0,
        });
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageHypothesis {
    pub p: u32,
    pub d: u32,
    pub m: usize,
    pub t: u128,
    pub alpha: usize,
    /// Absent in odd characteristic.
    pub beta: Option<usize>,
    /// Order of `D`.
    pub det_order: u64,
    /// The module M, e.g. `M₂⁰(F₄) ⊕ C₂²`.
    pub module: String,
    /// The image, e.g. `C₂ ⋊ SL₂(F₄)`.
    pub image: String,
    pub module_order: u128,
    pub image_order: u128,
    /// True when the conjugation action on M is trivial (`alpha = 0`), so the
    /// semidirect product is a direct product.
    pub direct_product: bool,
}

fn power_term(base: &str, n: usize) -> String {
    if n == 1 {
        base.to_string()
    } else {
        format!("{base}{}", superscript(n as u64))
    }
}

/// The unique `(alpha, beta)` producing `t` and the resulting image
/// `M ⋊ GL_2^D(F_q)`, where `|D| = det_order`.
pub fn infer(p: u32, d: u32, m: usize, t: u128, det_order: u64) -> Result<ImageHypothesis> {
    let q = check_params(p, d)?;
    if t == 0 {
        return Err(Error::Domain("t must be at least 1".into()));
    }
    if det_order == 0 || (q - 1) % det_order as u128 != 0 {
        return Err(Error::Domain(format!(
            "|D| = {det_order} does not divide q - 1 = {}",
            q - 1
        )));
    }
    let all = realizable_counts(p, d, m)?;
    let hits: Vec<&Realization> = all.iter().filter(|r| r.t == t).collect();
    let r = match hits.as_slice() {
        [r] => **r,
        [] => {
            return Err(Error::Unrealizable {
                t,
                below: all.iter().rev().find(|r| r.t < t).map(|r| r.t),
                above: all.iter().find(|r| r.t > t).map(|r| r.t),
            })
        }
        _ => {
            return Err(Error::TheoremViolation(format!(
                "t = {t} is produced by several (alpha, beta)"
            )))
        }
    };
    let qs = subscript(q as u64);
    let mut parts = Vec::new();
    if r.alpha > 0 {
        parts.push(power_term(&format!("M₂⁰(F{qs})"), r.alpha));
    }
    if r.beta > 0 {
        parts.push(power_term("C₂", r.beta));
    }
    let group = group_name(q as u64, det_order);
    let module = if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" ⊕ ")
    };
    let image = if parts.is_empty() {
        group.clone()
    } else if parts.len() == 1 {
        format!("{module} ⋊ {group}")
    } else {
        format!("({module}) ⋊ {group}")
    };
    let module_order = module_order(p, d, r.alpha, r.beta)?;
    let group_order = det_order as u128 * q * (q * q - 1);
    Ok(ImageHypothesis {
        p,
        d,
        m,
        t,
        alpha: r.alpha,
        beta: (p == 2).then_some(r.beta),
        det_order,
        module,
        image,
        module_order,
        image_order: module_order
            .checked_mul(group_order)
            .ok_or_else(|| Error::Domain("image order does not fit in 128 bits".into()))?,
        direct_product: r.alpha == 0,
    })
}

fn module_order(p: u32, d: u32, alpha: usize, beta: usize) -> Result<u128> {
    let exp = 3 * d as u64 * alpha as u64 + beta as u64;
    (p as u128)
        .checked_pow(exp as u32)
        .ok_or_else(|| Error::Domain("module order does not fit in 128 bits".into()))
}

/// Degrees of the abelian extension L/K cut out by the module part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub p: u32,
    /// `[L : K]`.
    pub degree: u128,
    /// `log_p [L : K]`.
    pub exponent: u64,
    /// Degree of the part with Galois group `M_2^0(F_q)^alpha`.
    pub matrix_part_degree: u128,
    /// Degree of the part with Galois group `C_2^beta`.
    pub central_part_degree: u128,
    /// The matrix part is acted on nontrivially by Gal(K/Q), so it is not
    /// the base change of an extension of Q (only meaningful when nonzero).
    pub matrix_part_definable_over_q: bool,
    /// Gal(K/Q) acts trivially on the central part.
    pub central_part_trivial_action: bool,
    pub ramification: String,
}

/// `[L : K] = p^(3dm)` in odd characteristic, `2^(3 d alpha + beta)` in
/// characteristic 2, split into matrix and central parts.
pub fn ext_degrees(p: u32, d: u32, m: usize, alpha: usize, beta: usize) -> Result<ExtensionReport> {
    census_formula(p, d, m, alpha, beta)?;
    let matrix_exp = 3 * d as u64 * alpha as u64;
    let central_exp = beta as u64;
    let pow = |e: u64| {
        (p as u128)
            .checked_pow(e as u32)
            .ok_or_else(|| Error::Domain("degree does not fit in 128 bits".into()))
    };
    Ok(ExtensionReport {
        p,
        degree: pow(matrix_exp + central_exp)?,
        exponent: matrix_exp + central_exp,
        matrix_part_degree: pow(matrix_exp)?,
        central_part_degree: pow(central_exp)?,
        matrix_part_definable_over_q: alpha == 0,
        central_part_trivial_action: true,
        ramification: format!("unramified at all primes not dividing {p}N"),
    })
}

/// Heuristic for accepting an observed trace count as final.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityRule {
    /// Every observed trace must occur at least this often.
    pub min_multiplicity: u64,
    /// No new trace may appear in the second half of the stream.
    pub quiet_second_half: bool,
}

impl Default for StabilityRule {
    fn default() -> Self {
        StabilityRule {
            min_multiplicity: 5,
            quiet_second_half: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Inconclusive,
}

/// Observed trace statistics for one dataset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Observation {
    /// Multiplicity of each distinct trace, in order of first appearance.
    pub multiplicities: Vec<u64>,
    /// Zero-based record index at which the last new trace appeared, when
    /// the stream order is known.
    pub last_new_position: Option<u64>,
    /// Prime bound `b` of the Hecke operators computed.
    pub bound: Option<u64>,
    pub level: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    /// Number of distinct traces seen.
    pub observed: usize,
    pub total: u64,
    pub multiplicities: Vec<u64>,
    pub min_multiplicity: u64,
    pub bound: Option<u64>,
    pub level: Option<u64>,
    /// Realizable counts `>= observed`.
    pub candidates: Vec<u128>,
    /// Realizable counts `< observed`.
    pub excluded: Vec<u128>,
    /// Unseen traces needed to reach the next candidate above the current
    /// count (or the first candidate when the count is not realizable).
    pub gap_to_next: Option<u128>,
    pub last_new_position: Option<u64>,
    pub rule: StabilityRule,
    pub verdict: Verdict,
    /// Why the verdict is not stable (empty when stable).
    pub reasons: Vec<String>,
}

pub fn multiplicity_report(
    obs: &Observation,
    p: u32,
    d: u32,
    m: usize,
    rule: StabilityRule,
) -> Result<MultiplicityReport> {
    let realizable: Vec<u128> = realizable_counts(p, d, m)?.into_iter().map(|r| r.t).collect();
    let observed = obs.multiplicities.len();
    let t = observed as u128;
    let total: u64 = obs.multiplicities.iter().sum();
    let min_multiplicity = obs.multiplicities.iter().copied().min().unwrap_or(0);
    let candidates: Vec<u128> = realizable.iter().copied().filter(|&r| r >= t).collect();
    let excluded: Vec<u128> = realizable.iter().copied().filter(|&r| r < t).collect();
    let is_realizable = realizable.contains(&t);
    let gap_to_next = candidates.iter().find(|&&c| c > t || !is_realizable).map(|&c| c - t);

    let mut reasons = Vec::new();
    if !is_realizable {
        reasons.push(format!("{observed} distinct traces is not a realizable count"));
    }
    if observed == 0 || min_multiplicity < rule.min_multiplicity {
        reasons.push(format!(
            "minimum multiplicity {min_multiplicity} is below {}",
            rule.min_multiplicity
        ));
    }
    if rule.quiet_second_half {
        if let Some(pos) = obs.last_new_position {
            if 2 * pos >= total {
                reasons.push(format!(
                    "a new trace appeared at record {pos} of {total}, in the second half"
                ));
            }
        }
    }
    Ok(MultiplicityReport {
        observed,
        total,
        multiplicities: obs.multiplicities.clone(),
        min_multiplicity,
        bound: obs.bound,
        level: obs.level,
        candidates,
        excluded,
        gap_to_next,
        last_new_position: obs.last_new_position,
        rule,
        verdict: if reasons.is_empty() {
            Verdict::Stable
        } else {
            Verdict::Inconclusive
        },
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inference_examples() {
        let h = infer(2, 2, 1, 7, 1).unwrap();
        assert_eq!((h.alpha, h.beta), (0, Some(1)));
        assert_eq!(h.image, "C₂ ⋊ SL₂(F₄)");
        assert!(h.direct_product);
        assert_eq!(h.image_order, 120);
        match infer(2, 2, 1, 10, 1) {
            Err(Error::Unrealizable { t: 10, below, above }) => {
                assert_eq!((below, above), (Some(7), Some(13)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let odd = infer(7, 1, 2, 343, 1).unwrap();
        assert_eq!((odd.alpha, odd.beta), (2, None));
        assert_eq!(odd.image, "M₂⁰(F₇)² ⋊ SL₂(F₇)");
        assert!(matches!(infer(7, 1, 2, 49, 1), Err(Error::Unrealizable { .. })));
        let mixed = infer(2, 2, 2, 28, 3).unwrap();
        assert_eq!(mixed.image, "(M₂⁰(F₄) ⊕ C₂) ⋊ GL₂(F₄)");
    }

    #[test]
    fn extension_examples() {
        assert_eq!(ext_degrees(7, 1, 1, 1, 0).unwrap().degree, 343);
        let r = ext_degrees(2, 2, 1, 0, 1).unwrap();
        assert_eq!((r.degree, r.matrix_part_degree, r.central_part_degree), (2, 1, 2));
        let r = ext_degrees(2, 2, 2, 1, 1).unwrap();
        assert_eq!((r.degree, r.matrix_part_degree, r.central_part_degree), (128, 64, 2));
        assert!(!r.matrix_part_definable_over_q);
        assert!(matches!(ext_degrees(2, 2, 1, 1, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn reports() {
        let obs = Observation {
            multiplicities: vec![21, 31, 15, 14, 39, 16, 30],
            last_new_position: None,
            bound: Some(1000),
            level: Some(67),
        };
        let r = multiplicity_report(&obs, 2, 2, 1, StabilityRule::default()).unwrap();
        assert_eq!((r.observed, r.total), (7, 166));
        assert_eq!(r.candidates, vec![7, 13, 16]);
        assert_eq!(r.excluded, vec![4]);
        assert_eq!(r.gap_to_next, Some(6));
        assert_eq!(r.verdict, Verdict::Stable);

        let once = Observation {
            multiplicities: vec![1],
            ..Observation::default()
        };
        let r = multiplicity_report(&once, 2, 2, 1, StabilityRule::default()).unwrap();
        assert_eq!(r.observed, 1);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.gap_to_next, Some(3));
    }
}
