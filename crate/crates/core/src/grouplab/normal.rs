//! Normal subgroups J of GL_2^D(F_q) that are not scalar and have full
//! determinant image map onto PGL_2^D(F_q). Checked by listing every normal
//! subgroup as a join of normal closures of conjugacy classes.

use std::time::Instant;

use rustc_hash::FxHashSet;
use serde::Serialize;

use super::{closure_by, conjugacy_classes};
use crate::caps::Caps;
use crate::error::Result;
use crate::ffield::Fq;
use crate::matgrp::{enumerate_gl2d, GroupSpec, Mat2};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalSubgroupInfo {
    pub order: usize,
    pub scalar: bool,
    pub det_image_order: usize,
    /// Not scalar and `det(J) = D`.
    pub meets_hypothesis: bool,
    /// `J Z = GL_2^D` with Z the scalars of GL_2^D, i.e. J maps onto
    /// PGL_2^D(F_q).
    pub surjects_onto_projective: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalSubgroupReport {
    pub group: String,
    pub order: usize,
    pub conjugacy_classes: usize,
    /// Sorted by order.
    pub normal_subgroups: Vec<NormalSubgroupInfo>,
    pub holds: bool,
    pub seconds: f64,
}

/// Enumerates the normal subgroups of GL_2^D(F_q) and checks that each one
/// meeting the hypothesis surjects onto PGL_2^D(F_q).
pub fn verify_normal_subgroup_lemma(spec: &GroupSpec, caps: &Caps) -> Result<NormalSubgroupReport> {
    let start = Instant::now();
    let f = spec.field();
    let elements = enumerate_gl2d(spec, caps.enumeration)?;
    let n = elements.len();
    let id = Mat2::identity(f);
    let mul = |a: &Mat2<Fq>, b: &Mat2<Fq>| a.mul(f, b);
    let classes = conjugacy_classes(&elements, mul, |a| a.inverse(f).expect("invertible"));
    let close = |gens: &[Mat2<Fq>]| -> Vec<Mat2<Fq>> {
        let mut c = closure_by(id, gens, mul, n).expect("inside a finite group");
        c.sort();
        c
    };
    // Normal closures of single classes, then joins until nothing new appears.
    let mut normal: Vec<Vec<Mat2<Fq>>> = Vec::new();
    let mut seen: FxHashSet<Vec<Mat2<Fq>>> = FxHashSet::default();
    for class in &classes {
        let j = close(class);
        if seen.insert(j.clone()) {
            normal.push(j);
        }
    }
    let mut i = 0;
    while i < normal.len() {
        for k in 0..i {
            let gens: Vec<Mat2<Fq>> = normal[i].iter().chain(&normal[k]).copied().collect();
            let j = close(&gens);
            if seen.insert(j.clone()) {
                normal.push(j);
            }
        }
        i += 1;
    }
    let scalars: Vec<Mat2<Fq>> = elements.iter().filter(|g| g.is_scalar(f)).copied().collect();
    let mut infos: Vec<NormalSubgroupInfo> = normal
        .iter()
        .map(|j| {
            let scalar = j.iter().all(|g| g.is_scalar(f));
            let dets: FxHashSet<Fq> = j.iter().map(|g| g.det(f)).collect();
            let product: FxHashSet<Mat2<Fq>> = j
                .iter()
                .flat_map(|g| scalars.iter().map(move |z| g.mul(f, z)))
                .collect();
            NormalSubgroupInfo {
                order: j.len(),
                scalar,
                det_image_order: dets.len(),
                meets_hypothesis: !scalar && dets.len() == spec.dets().order(),
                surjects_onto_projective: product.len() == n,
            }
        })
        .collect();
    infos.sort_by_key(|i| (i.order, i.det_image_order, i.scalar));
    let holds = infos.iter().all(|i| !i.meets_hypothesis || i.surjects_onto_projective);
    Ok(NormalSubgroupReport {
        group: spec.name(),
        order: n,
        conjugacy_classes: classes.len(),
        normal_subgroups: infos,
        holds,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::Field;

    #[test]
    fn sl2_f4_is_simple() {
        let spec = GroupSpec::special(Field::standard(2, 2).unwrap());
        let r = verify_normal_subgroup_lemma(&spec, &Caps::default()).unwrap();
        let orders: Vec<usize> = r.normal_subgroups.iter().map(|i| i.order).collect();
        assert_eq!(orders, vec![1, 60]);
        assert_eq!(r.conjugacy_classes, 5);
        assert!(r.holds);
    }

    #[test]
    fn gl2_f4_excludes_sl2() {
        let spec = GroupSpec::general(Field::standard(2, 2).unwrap());
        let r = verify_normal_subgroup_lemma(&spec, &Caps::default()).unwrap();
        let orders: Vec<usize> = r.normal_subgroups.iter().map(|i| i.order).collect();
        assert_eq!(orders, vec![1, 3, 60, 180]);
        let sl2 = &r.normal_subgroups[2];
        assert!(!sl2.meets_hypothesis && sl2.surjects_onto_projective);
        let gl2 = &r.normal_subgroups[3];
        assert!(gl2.meets_hypothesis && gl2.surjects_onto_projective);
        assert!(r.holds);
    }
}
