//! The ten acceptance criteria plus the synthetic-stream convergence test.
//! Each prints one PASS/FAIL line. A criterion listed in `KNOWN_FAILURES`
//! is reported but does not fail the run, as long as it fails in exactly
//! the documented way.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use modpimage::caps::Caps;
use modpimage::grouplab::{generating_pairs, splitting_search, GaloisRing, SlWittExtension, TwistedProduct};
use modpimage::heckeio::{analyze, parse_dataset, stream_census, synth_dataset};
use modpimage::imageinfer::{ext_degrees, infer, realizable_counts, StabilityRule, Verdict};
use modpimage::matgrp::{enumerate_gl2d, GroupSpec, Mat2};
use modpimage::modlat::ModuleEmbedding;
use modpimage::tracecensus::{census_embedding, census_formula, generate_table};
use modpimage::verify::{run_suite, Suite, SuiteOptions};
use modpimage::{Field, Fq};

const PRINTED: &str = include_str!("../fixtures/printed_tables.txt");
const N67_1000: &str = include_str!("../fixtures/n67_b1000.json");
const N67_5000: &str = include_str!("../fixtures/n67_b5000.json");

/// Printed cells that disagree with the computed tables: (d, m, alpha, beta,
/// printed). Each is shown wrong from its own row by `misprint_is_justified`.
const MISPRINTS: [(u32, usize, usize, usize, &str); 3] =
    [(4, 2, 0, 6, "916"), (2, 2, 1, 3, "100"), (4, 3, 1, 5, "7969")];

/// Criteria that cannot pass as stated and are reported, not asserted.
const KNOWN_FAILURES: [u32; 1] = [1];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, budget: Duration) -> bool {
    elapsed <= budget
}

fn field(p: u32, d: u32) -> Field {
    Field::standard(p, d).unwrap()
}

/// `(d, m, alpha) -> printed cells` from the fixture.
fn printed_rows() -> Vec<(u32, usize, usize, Vec<String>)> {
    PRINTED
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (head, cells) = l.split_once('|').unwrap();
            let h: Vec<usize> = head.split_whitespace().map(|x| x.parse().unwrap()).collect();
            (
                h[0] as u32,
                h[1],
                h[2],
                cells.split_whitespace().map(String::from).collect(),
            )
        })
        .collect()
}

/// Oracle for a misprint, using only the printed row: along a row
/// `t(beta + 1) = 2 t(beta) - q^alpha`, so an interior cell is pinned down by
/// its printed neighbours. An impossible cell (`beta > d(m - alpha)`) that
/// carries a number instead holds the value of the same `(alpha, beta)`
/// one size up in `m`.
fn misprint_is_justified(d: u32, m: usize, alpha: usize, beta: usize, row: &[String]) -> bool {
    let q = 1u128 << d;
    let qa = q.pow(alpha as u32);
    let printed: u128 = row[beta].parse().unwrap();
    if beta > d as usize * (m - alpha) {
        let one_up = qa * ((q - 1) * (1 << beta) + 1);
        return printed == one_up && beta <= d as usize * (m + 1 - alpha);
    }
    let (Ok(left), Ok(right)) = (row[beta - 1].parse::<u128>(), row[beta + 1].parse::<u128>()) else {
        return false;
    };
    let forced = 2 * left - qa;
    2 * forced - qa == right && printed != forced
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let caps = Caps::default();
    let mut mismatches = BTreeSet::new();
    let mut justified = 0;
    let mut cells = 0;
    for (d, m, alpha, printed) in printed_rows() {
        let table = generate_table(2, d, m, false, &caps).unwrap();
        let row = &table.rows[alpha];
        assert_eq!(
            row.len(),
            printed.len(),
            "row width for d = {d}, m = {m}, alpha = {alpha}"
        );
        for (beta, (cell, text)) in row.iter().zip(&printed).enumerate() {
            cells += 1;
            let ours = cell.as_ref().map_or("-".to_string(), |c| c.t.to_string());
            if &ours != text {
                mismatches.insert((d, m, alpha, beta, text.clone()));
                justified += misprint_is_justified(d, m, alpha, beta, &printed) as usize;
            }
        }
        // The rendered text carries the same numbers.
        let rendered = table.render();
        for cell in row.iter().flatten() {
            assert!(rendered.contains(&cell.t.to_string()));
        }
    }
    let pinned: BTreeSet<_> = MISPRINTS
        .iter()
        .map(|&(d, m, a, b, s)| (d, m, a, b, s.to_string()))
        .collect();
    assert_eq!(
        mismatches, pinned,
        "table disagreements are not the documented misprints"
    );
    assert_eq!(justified, MISPRINTS.len(), "a misprint is not explained by its own row");
    let elapsed = start.elapsed();
    outcome(
        mismatches.is_empty() && within(elapsed, Duration::from_secs(1)),
        format!(
            "{cells} cells, {} differ from the printed tables, all documented misprints {:?} ({elapsed:.2?})",
            mismatches.len(),
            MISPRINTS.iter().map(|c| (c.0, c.1, c.2, c.3)).collect::<Vec<_>>()
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let caps = Caps::default();
    let mut checked = 0;
    let mut bad = Vec::new();
    for (d, max_m, max_alpha) in [(2, 2, 2), (3, 2, 1), (4, 1, 1)] {
        let f = field(2, d);
        let spec = GroupSpec::special(f.clone());
        for m in 1..=max_m {
            for alpha in 0..=m.min(max_alpha) {
                for beta in 0..=d as usize * (m - alpha) {
                    let e = ModuleEmbedding::canonical(&f, m, alpha, beta).unwrap();
                    let brute = census_embedding(&spec, &e, &caps).unwrap().t;
                    let formula = census_formula(2, d, m, alpha, beta).unwrap();
                    checked += 1;
                    if brute != formula {
                        bad.push((d, m, alpha, beta, brute, formula));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && within(elapsed, Duration::from_secs(300)),
        format!("{checked} cells, mismatches {bad:?} ({elapsed:.2?})"),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let f = field(7, 1);
    let e = ModuleEmbedding::canonical(&f, 1, 1, 0).unwrap();
    let mut ts = Vec::new();
    for spec in [GroupSpec::special(f.clone()), GroupSpec::general(f.clone())] {
        ts.push(census_embedding(&spec, &e, &Caps::default()).unwrap().t);
    }
    let elapsed = start.elapsed();
    outcome(
        ts == [49, 49] && within(elapsed, Duration::from_secs(30)),
        format!("t = {ts:?} for D = {{1}}, F_7^x ({elapsed:.2?})"),
    )
}

fn criterion_4() -> Outcome {
    let mut cells = 0;
    let mut ok = true;
    for d in 2..=4 {
        for m in 1..=3 {
            let all = realizable_counts(2, d, m).unwrap();
            let distinct: HashSet<u128> = all.iter().map(|r| r.t).collect();
            ok &= distinct.len() == all.len();
            for alpha in 0..=m {
                for beta in 0..=d as usize * (m - alpha) {
                    let t = census_formula(2, d, m, alpha, beta).unwrap();
                    let h = infer(2, d, m, t, 1).unwrap();
                    ok &= (h.alpha, h.beta) == (alpha, Some(beta));
                    cells += 1;
                }
            }
        }
    }
    outcome(
        ok,
        format!("{cells} cells round-trip, counts pairwise distinct per (q, m)"),
    )
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut totals = Vec::new();
    for text in [N67_1000, N67_5000] {
        let ds = parse_dataset(text.as_bytes()).unwrap();
        let a = analyze(&ds, 1, StabilityRule::default()).unwrap();
        totals.push(a.multiplicities.total);
        ok &= a.stream.observed == 7;
        ok &= a.multiplicities.candidates == [7, 13, 16];
        ok &= a.multiplicities.verdict == Verdict::Stable;
        ok &= a
            .hypothesis
            .as_ref()
            .is_some_and(|h| (h.alpha, h.beta) == (0, Some(1)) && h.image == "C₂ ⋊ SL₂(F₄)");
    }
    ok &= totals == [166, 667];
    outcome(
        ok,
        format!("t~ = 7, candidates [7, 13, 16], image C₂ ⋊ SL₂(F₄), totals {totals:?}"),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let f = field(2, 2);
    let ext = SlWittExtension::new(f.clone()).unwrap();
    let group = enumerate_gl2d(ext.spec(), 1 << 20).unwrap();
    let pairs = generating_pairs(&group, &Mat2::identity(&f), |a, b| a.mul(&f, b), 5);
    let mut ok = !pairs.is_empty();
    let mut closed = 0;
    for (a, b) in &pairs {
        // splitting_search rejects pairs that do not generate SL_2(F_4).
        let out = splitting_search(&ext, (a, b), &Caps::default()).unwrap();
        ok &= !out.splits();
        closed += out.stats().pairs_closed;
    }
    let elapsed = start.elapsed();
    outcome(
        ok && within(elapsed, Duration::from_secs(60)),
        format!(
            "no complement for {} generating pairs ({closed} lift pairs closed after order filtering) ({elapsed:.2?})",
            pairs.len()
        ),
    )
}

fn suite(s: Suite, trials: usize, budget: Duration) -> Outcome {
    let opts = SuiteOptions {
        q: 4,
        seed: 2024,
        trials,
    };
    let r = run_suite(s, &opts, &Caps::default()).unwrap();
    outcome(
        r.passed && within(Duration::from_secs_f64(r.seconds), budget),
        format!("{} ({:.2} s)", r.details, r.seconds),
    )
}

fn criterion_9() -> Outcome {
    let mut tuples = Vec::new();
    for (d, m) in [(2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (4, 3)] {
        for alpha in 0..=m {
            let beta = (alpha * 7 + d as usize) % (d as usize * (m - alpha) + 1);
            tuples.push((2u32, d, m, alpha, beta));
        }
    }
    for (p, d, m) in [(3, 1, 1), (3, 2, 2), (5, 1, 3), (7, 2, 1)] {
        tuples.push((p, d, m, m, 0));
    }
    let mut ok = tuples.len() == 20;
    for &(p, d, m, alpha, beta) in &tuples {
        let e = ext_degrees(p, d, m, alpha, beta).unwrap();
        let want = if p == 2 {
            1u128 << (3 * d as usize * alpha + beta)
        } else {
            (p as u128).pow(3 * d * m as u32)
        };
        ok &= e.degree == want;
    }
    outcome(ok, format!("{} parameter tuples", tuples.len()))
}

/// Every F_2-subspace of F_4, as a list of basis scalars.
fn f4_blocks(f: &Field) -> Vec<Vec<Fq>> {
    let (one, x) = (f.from_coeffs(&[1]).unwrap(), f.x());
    let xp1 = f.add(one, x);
    vec![vec![], vec![one], vec![x], vec![xp1], vec![one, x]]
}

fn criterion_10() -> Outcome {
    let caps = Caps::default();
    let f = field(2, 2);
    let mut census_checks = 0;
    let mut ok = true;

    // Census is independent of the block scalars and of D.
    for m in 1..=2 {
        for alpha in 0..=m {
            let free = m - alpha;
            let blocks = f4_blocks(&f);
            let mut choice = vec![0usize; free];
            loop {
                let chosen: Vec<Vec<Fq>> = choice.iter().map(|&i| blocks[i].clone()).collect();
                let beta: usize = chosen.iter().map(Vec::len).sum();
                let e = ModuleEmbedding::new(&f, alpha, chosen).unwrap();
                let want = census_formula(2, 2, m, alpha, beta).unwrap();
                for spec in [GroupSpec::special(f.clone()), GroupSpec::general(f.clone())] {
                    ok &= census_embedding(&spec, &e, &caps).unwrap().t == want;
                    census_checks += 1;
                }
                let Some(k) = choice.iter().position(|&i| i + 1 < blocks.len()) else {
                    break;
                };
                choice[k] += 1;
                choice[..k].iter_mut().for_each(|i| *i = 0);
            }
        }
    }

    // Teichmüller multiplicativity.
    for d in [2, 3] {
        let k = field(2, d);
        let w = GaloisRing::new(k.clone());
        for a in k.elements() {
            for b in k.elements() {
                ok &= w.teichmuller(k.mul(a, b)) == w.mul(w.teichmuller(a), w.teichmuller(b));
            }
        }
    }

    // Group axioms for the twisted products of order <= 4096.
    let ext = SlWittExtension::new(f.clone()).unwrap();
    let full = ext.to_twisted_product().unwrap();
    let (target, map) = ext.scalar_quotient_map(&full).unwrap();
    let reduced = full.push_forward(target, &map).unwrap();
    let direct =
        TwistedProduct::direct(full.group().clone(), *full.module(), full.group_generators().to_vec()).unwrap();
    let mut orders = Vec::new();
    for tp in [&full, &reduced, &direct] {
        ok &= tp.check_associativity().is_ok();
        let id = tp.identity();
        for e in 0..tp.order() as u32 {
            ok &= tp.mul(id, e) == e && tp.mul(e, id) == e;
            ok &= tp.mul(e, tp.inv(e)) == id && tp.mul(tp.inv(e), e) == id;
        }
        orders.push(tp.order());
    }
    ok &= reduced.check_associativity_exhaustive(1 << 30).is_ok();
    outcome(
        ok,
        format!(
            "{census_checks} censuses over all block scalars and both D; Teichmüller on F_4, F_8; group axioms for |E| = {orders:?}"
        ),
    )
}

/// A stream of `50 t` synthetic traces reaches the true count in at least
/// 95% of seeded trials.
fn synthetic_stream() -> Outcome {
    let caps = Caps::default();
    let mut trials = 0;
    let mut hits = 0;
    for (d, m) in [(2, 1), (3, 1), (2, 2)] {
        let f = field(2, d);
        let spec = GroupSpec::special(f.clone());
        for alpha in 0..=m {
            for beta in 0..=d as usize * (m - alpha) {
                let t = census_formula(2, d, m, alpha, beta).unwrap();
                let e = ModuleEmbedding::canonical(&f, m, alpha, beta).unwrap();
                for seed in 0..10 {
                    let ds = synth_dataset(&spec, &e, 50 * t as usize, seed, &caps).unwrap();
                    let seen = stream_census(&ds).observed() as u128;
                    assert!(seen <= t, "stream saw {seen} traces, more than the true {t}");
                    trials += 1;
                    hits += (seen == t) as usize;
                }
            }
        }
    }
    let rate = hits as f64 / trials as f64;
    outcome(
        rate >= 0.95,
        format!("{hits}/{trials} trials reached t ({:.1}%)", 100.0 * rate),
    )
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, fn() -> Outcome);
    let criteria: Vec<Criterion> = vec![
        (1, "table fidelity", criterion_1),
        (2, "oracle equivalence", criterion_2),
        (3, "odd characteristic", criterion_3),
        (4, "uniqueness round trip", criterion_4),
        (5, "N=67 pipeline", criterion_5),
        (6, "non-splitting", criterion_6),
        (7, "module lemma", || suite(Suite::Modules, 0, Duration::from_secs(60))),
        (8, "corollary splitting", || {
            suite(Suite::Corollary, 100, Duration::from_secs(300))
        }),
        (9, "extension degrees", criterion_9),
        (10, "property suites", criterion_10),
        (11, "synthetic stream", synthetic_stream),
    ];
    let mut unexpected = Vec::new();
    for (n, name, run) in criteria {
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        let note = if !o.passed && KNOWN_FAILURES.contains(&n) {
            " [known, see README]"
        } else {
            ""
        };
        println!("criterion {n:>2} {name}: {status}{note} - {}", o.detail);
        if !o.passed && !KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    assert!(unexpected.is_empty(), "failed criteria: {unexpected:?}");
}
