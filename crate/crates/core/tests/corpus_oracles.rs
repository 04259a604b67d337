mod common;

use std::collections::{BTreeMap, BTreeSet};

use biblionet::corpus::{citation_neighborhood, coupling_links, CouplingLink, Lang, Origin};
use biblionet::{Corpus, PaperRecord, PeriodFilter};
use proptest::prelude::*;
use rand::Rng;

fn random_corpus(seed: u64, n: usize) -> Corpus {
    let mut rng = common::rng(seed);
    let ids: Vec<String> = (0..n).map(|i| format!("P{i:02}")).collect();
    Corpus::from_records((0..n).map(|i| {
        let mut r = PaperRecord::new(ids[i].clone(), 2000 + rng.gen_range(0..10));
        let k = rng.gen_range(0..5);
        r.refs = (0..k)
            .map(|_| {
                if rng.gen_bool(0.4) {
                    ids[rng.gen_range(0..n)].clone()
                } else {
                    format!("R{}", rng.gen_range(0..6))
                }
            })
            .collect();
        r
    }))
    .unwrap()
}

#[test]
fn neighborhood_matches_set_comprehension() {
    for seed in 0..20 {
        let c = random_corpus(seed, 10);
        let all: Vec<&PaperRecord> = c.papers().collect();
        let mut rng = common::rng(seed + 100);
        let seeds: BTreeSet<String> = (0..rng.gen_range(1..4))
            .map(|_| all[rng.gen_range(0..10)].id.clone())
            .collect();

        let mut cited = BTreeSet::new();
        let mut citing = BTreeSet::new();
        let mut coupled = BTreeSet::new();
        for p in &all {
            if seeds.contains(&p.id) {
                continue;
            }
            for s in &seeds {
                let sp = c.get(s).unwrap();
                if sp.refs.contains(&p.id) {
                    cited.insert(p.id.clone());
                }
                if p.refs.contains(s) {
                    citing.insert(p.id.clone());
                }
                if p.refs.iter().any(|r| sp.refs.contains(r)) {
                    coupled.insert(p.id.clone());
                }
            }
        }
        let n = citation_neighborhood(&c, &seeds).unwrap();
        assert_eq!(
            (n.cited, n.citing, n.coupled),
            (cited, citing, coupled),
            "seed {seed}"
        );
    }
}

#[test]
fn coupling_matches_pairwise_intersection() {
    for seed in 0..20 {
        let c = random_corpus(seed, 20);
        let all: Vec<&PaperRecord> = c.papers().collect();
        let mut expected = Vec::new();
        for i in 0..all.len() {
            for j in 0..all.len() {
                if all[i].id >= all[j].id {
                    continue;
                }
                let a: BTreeSet<&String> = all[i].refs.iter().collect();
                let b: BTreeSet<&String> = all[j].refs.iter().collect();
                let w = a.intersection(&b).count() as u32;
                if w > 0 {
                    expected.push(CouplingLink {
                        a: all[i].id.clone(),
                        b: all[j].id.clone(),
                        weight: w,
                    });
                }
            }
        }
        assert_eq!(coupling_links(&c), expected, "seed {seed}");
    }
}

#[test]
fn coupling_ignores_presentation_order() {
    let c = random_corpus(3, 20);
    let mut reversed: Vec<PaperRecord> = c.papers().cloned().collect();
    reversed.reverse();
    let r = Corpus::from_records(reversed).unwrap();
    assert_eq!(coupling_links(&c), coupling_links(&r));
}

#[test]
fn full_year_range_returns_everything() {
    let c = random_corpus(9, 15);
    let (lo, hi) = c.year_range().unwrap();
    assert_eq!(c.filter_period(PeriodFilter::new(lo, hi).unwrap()), c);
}

#[test]
fn load_from_file_and_drop_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    std::fs::write(
        &path,
        "{\"id\":\"A\",\"title\":\"t\",\"year\":2000}\n{\"id\":\"B\",\"title\":\"t\",\"year\":1776}\n",
    )
    .unwrap();
    let c = biblionet::corpus::load_corpus(&path).unwrap();
    assert_eq!(c.len(), 2);
    let report = c.validate();
    assert_eq!(report.len(), 1);
    assert_eq!(c.without_invalid(&report).len(), 1);
}

fn arb_record() -> impl Strategy<Value = PaperRecord> {
    (
        "[A-Z][0-9]{1,3}",
        ".{0,12}",
        1900i32..2100,
        prop::bool::ANY,
        prop::collection::vec("[A-Z]{2}", 0..3),
        prop::collection::vec("[A-Z]{2}", 0..3),
        prop::collection::vec("[a-z]{1,6}( [a-z]{1,6})?", 0..4),
        prop::option::of(".{0,30}"),
        prop::collection::vec("R[0-9]{1,2}", 0..4),
        0usize..4,
    )
        .prop_map(
            |(id, title, year, fr, aff, studied, kws, text, refs, origin)| PaperRecord {
                id,
                title,
                year,
                lang: if fr { Lang::Fr } else { Lang::En },
                affiliations: aff,
                studied,
                keywords: kws,
                text,
                refs,
                origin: [
                    Origin::Seed,
                    Origin::Cited,
                    Origin::Citing,
                    Origin::External,
                ][origin],
            },
        )
}

proptest! {
    #[test]
    fn serialize_then_load_is_identity(records in prop::collection::vec(arb_record(), 0..8)) {
        let mut unique = BTreeMap::new();
        for r in records {
            unique.entry(r.id.clone()).or_insert(r);
        }
        let c = Corpus::from_records(unique.into_values()).unwrap();
        let again = Corpus::parse_jsonl(&c.to_jsonl()).unwrap();
        prop_assert_eq!(&again, &c);
        prop_assert!(again.indexes_consistent());
    }

    #[test]
    fn neighborhoods_never_contain_seeds(seed in 0u64..500, picks in prop::collection::vec(0usize..12, 1..5)) {
        let c = random_corpus(seed, 12);
        let ids: Vec<String> = c.ids().map(String::from).collect();
        let seeds: BTreeSet<String> = picks.iter().map(|&i| ids[i].clone()).collect();
        let n = citation_neighborhood(&c, &seeds).unwrap();
        for s in &seeds {
            prop_assert!(!n.cited.contains(s) && !n.citing.contains(s) && !n.coupled.contains(s));
        }
    }
}
