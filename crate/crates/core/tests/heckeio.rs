use modpimage::caps::Caps;
use modpimage::heckeio::{
    analyze, parse_dataset, reconstruct_n67, stream_census, synth_dataset, HeckeDataset, HeckeRecord,
};
use modpimage::imageinfer::{StabilityRule, Verdict};
use modpimage::matgrp::GroupSpec;
use modpimage::modlat::ModuleEmbedding;
use modpimage::{Field, LocalAlgebra};
use proptest::prelude::*;

const N67_1000: &str = include_str!("../fixtures/n67_b1000.json");
const N67_5000: &str = include_str!("../fixtures/n67_b5000.json");

#[test]
fn fixtures_match_the_reconstruction_byte_for_byte() {
    for (text, bound) in [(N67_1000, 1000), (N67_5000, 5000)] {
        assert_eq!(reconstruct_n67(bound).unwrap().to_json(), text);
        let ds = parse_dataset(text.as_bytes()).unwrap();
        assert_eq!(ds.to_json(), text);
    }
}

#[test]
fn n67_analysis() {
    for (text, total, mults) in [
        (N67_1000, 166, vec![21, 31, 15, 14, 39, 16, 30]),
        (N67_5000, 667, vec![58, 114, 69, 67, 185, 63, 111]),
    ] {
        let ds = parse_dataset(text.as_bytes()).unwrap();
        let a = analyze(&ds, 1, StabilityRule::default()).unwrap();
        assert_eq!(a.stream.observed, 7);
        assert_eq!(a.multiplicities.total, total);
        assert_eq!(a.stream.multiplicities, mults);
        assert_eq!(a.multiplicities.candidates, vec![7, 13, 16]);
        assert_eq!(a.multiplicities.excluded, vec![4]);
        assert_eq!(a.multiplicities.verdict, Verdict::Stable);
        let h = a.hypothesis.unwrap();
        assert_eq!((h.alpha, h.beta), (0, Some(1)));
        assert_eq!(h.image, "C₂ ⋊ SL₂(F₄)");
        let e = a.extension.unwrap();
        assert_eq!(e.degree, 2);
    }
}

#[test]
fn fully_sampled_alpha_one_module() {
    let f = Field::standard(2, 2).unwrap();
    let spec = GroupSpec::special(f.clone());
    let e = ModuleEmbedding::canonical(&f, 1, 1, 0).unwrap();
    let ds = synth_dataset(&spec, &e, 3000, 5, &Caps::default()).unwrap();
    let a = analyze(&ds, 1, StabilityRule::default()).unwrap();
    assert_eq!(a.stream.observed, 16);
    assert_eq!(a.multiplicities.verdict, Verdict::Stable);
    let h = a.hypothesis.unwrap();
    assert_eq!((h.alpha, h.beta, h.t), (1, Some(0), 16));
}

#[test]
fn undersampled_dataset_is_inconclusive() {
    let f = Field::standard(2, 2).unwrap();
    let spec = GroupSpec::special(f.clone());
    let e = ModuleEmbedding::canonical(&f, 1, 1, 0).unwrap();
    let ds = synth_dataset(&spec, &e, 10, 1, &Caps::default()).unwrap();
    let a = analyze(&ds, 1, StabilityRule::default()).unwrap();
    assert_eq!(a.multiplicities.verdict, Verdict::Inconclusive);
    assert!(a.hypothesis.is_none());
    assert!(a.candidates.len() > 1);
}

#[test]
fn small_fields_are_refused() {
    let f = Field::standard(2, 1).unwrap();
    let ds = HeckeDataset::new(LocalAlgebra::new(f, 1), 11, 2);
    assert!(analyze(&ds, 1, StabilityRule::default()).is_err());
}

#[test]
fn synthesis_is_deterministic() {
    let f = Field::standard(2, 3).unwrap();
    let spec = GroupSpec::special(f.clone());
    let e = ModuleEmbedding::canonical(&f, 1, 0, 1).unwrap();
    let a = synth_dataset(&spec, &e, 200, 42, &Caps::default()).unwrap();
    let b = synth_dataset(&spec, &e, 200, 42, &Caps::default()).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let c = synth_dataset(&spec, &e, 200, 43, &Caps::default()).unwrap();
    assert_ne!(a.to_json(), c.to_json());
    assert!(synth_dataset(&spec, &e, 0, 42, &Caps::default()).unwrap().is_empty());
    let parsed = parse_dataset(a.to_json().as_bytes()).unwrap();
    assert_eq!(parsed, a);
}

#[test]
fn q8_stream_converges_to_fifteen() {
    let f = Field::standard(2, 3).unwrap();
    let spec = GroupSpec::special(f.clone());
    let e = ModuleEmbedding::canonical(&f, 1, 0, 1).unwrap();
    let mut last = 0;
    for count in [20, 100, 1000] {
        let ds = synth_dataset(&spec, &e, count, 9, &Caps::default()).unwrap();
        let seen = stream_census(&ds).observed();
        assert!(seen >= last && seen <= 15);
        last = seen;
    }
    assert_eq!(last, 15);
}

fn arb_dataset() -> impl Strategy<Value = HeckeDataset> {
    (
        1usize..=2,
        prop::collection::vec(prop::collection::vec(0u32..4, 6), 0..20),
    )
        .prop_map(|(m, raw)| {
            let f = Field::standard(2, 2).unwrap();
            let t = LocalAlgebra::new(f.clone(), m);
            let mut ds = HeckeDataset::new(t.clone(), 67, 2);
            let primes = [
                3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 71, 73, 79,
            ];
            ds.records = raw
                .iter()
                .zip(primes)
                .map(|(v, ell)| {
                    let wire: Vec<Vec<u32>> = v[..2 * (m + 1)].chunks(2).map(|c| vec![c[0] % 2, c[1] % 2]).collect();
                    HeckeRecord {
                        ell,
                        trace: t.from_wire(&wire).unwrap(),
                    }
                })
                .collect();
            ds
        })
}

proptest! {
    #[test]
    fn parse_inverts_serialize(ds in arb_dataset()) {
        let text = ds.to_json();
        let back = parse_dataset(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &ds);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn multiplicities_sum_to_records(ds in arb_dataset()) {
        let c = stream_census(&ds);
        prop_assert_eq!(c.multiplicities.iter().sum::<u64>(), ds.len() as u64);
    }
}
