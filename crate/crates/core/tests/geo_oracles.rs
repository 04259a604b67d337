mod common;

use std::collections::BTreeMap;

use biblionet::corpus::{Lang, PaperRecord};
use biblionet::fixtures::three_paper_corpus;
use biblionet::geo::{
    build_contingency, classify_countries, country_activity, cut_dendrogram,
    representation_residuals, ward_linkage, ContingencyTable, Representation, Role,
};
use biblionet::text::Lexicon;
use biblionet::{Corpus, PeriodFilter};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn tally(pairs: &[(&str, u32)]) -> BTreeMap<String, u32> {
    pairs.iter().map(|&(c, n)| (c.to_string(), n)).collect()
}

#[test]
fn activity_matches_manual_tally() {
    let c = three_paper_corpus();
    let a = country_activity(&c, PeriodFilter::new(2000, 2005).unwrap(), None);
    let authored: BTreeMap<String, u32> = a
        .countries
        .iter()
        .filter(|(_, v)| v.n_authored > 0)
        .map(|(k, v)| (k.clone(), v.n_authored))
        .collect();
    let studied: BTreeMap<String, u32> = a
        .countries
        .iter()
        .filter(|(_, v)| v.n_studied > 0)
        .map(|(k, v)| (k.clone(), v.n_studied))
        .collect();
    assert_eq!(authored, tally(&[("FR", 2), ("US", 1)]));
    assert_eq!(studied, tally(&[("DE", 1), ("FR", 1)]));

    let b = country_activity(&c, PeriodFilter::single(2012), None);
    assert_eq!(b.countries.len(), 1);
    assert_eq!(b.get("BR").n_authored, 1);
    assert_eq!(b.get("BR").n_studied, 1);
}

/// Counts every (country, lexicon) cell with three nested loops over
/// papers, countries and tokens.
fn nested_loop_table(
    papers: &[PaperRecord],
    lexicons: &[Lexicon],
    role: Role,
) -> BTreeMap<(String, String), u64> {
    let mut out = BTreeMap::new();
    for p in papers {
        let Some(text) = &p.text else { continue };
        let mut countries: Vec<String> = match role {
            Role::Studied => p.studied.clone(),
            Role::Affiliation => p.affiliations.clone(),
        };
        countries.sort();
        countries.dedup();
        let tokens = biblionet::text::tokenize(text, p.lang);
        for c in &countries {
            for lex in lexicons {
                let n = tokens
                    .iter()
                    .filter(|t| lex.terms().contains(t.as_str()))
                    .count() as u64;
                *out.entry((c.clone(), lex.name().to_string())).or_insert(0) += n;
            }
        }
    }
    out
}

#[test]
fn contingency_matches_nested_loop_oracle() {
    let mut rng = common::rng(8);
    let words = [
        "risk", "hazard", "flood", "border", "frontier", "urban", "growth", "city", "river",
    ];
    let lexicons = vec![
        Lexicon::new("risk", ["risk", "hazard", "flood"]).unwrap(),
        Lexicon::new("boundaries", ["border", "frontier"]).unwrap(),
    ];
    let codes = ["FR", "DE", "BR", "US"];
    let papers: Vec<PaperRecord> = (0..8)
        .map(|i| {
            let mut p = PaperRecord::new(format!("P{i}"), 2000 + i);
            p.lang = Lang::En;
            p.text = Some(
                (0..30)
                    .map(|_| *words.choose(&mut rng).unwrap())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            p.studied = vec![codes[i as usize % 4].to_string()];
            p.affiliations = codes
                .choose_multiple(&mut rng, 2)
                .map(|s| s.to_string())
                .collect();
            p
        })
        .collect();
    let corpus = Corpus::from_records(papers.clone()).unwrap();
    for role in [Role::Studied, Role::Affiliation] {
        let table = build_contingency(&corpus, &lexicons, role, None).unwrap();
        let oracle = nested_loop_table(&papers, &lexicons, role);
        let mut seen = 0;
        for r in table.rows() {
            for c in table.cols() {
                assert_eq!(
                    table.get(r, c).unwrap(),
                    oracle[&(r.clone(), c.clone())],
                    "{r}/{c}"
                );
                seen += 1;
            }
        }
        assert_eq!(seen, oracle.len());
        let rt = table.row_totals();
        let ct = table.col_totals();
        assert_eq!(rt.iter().sum::<u64>(), table.grand_total());
        assert_eq!(ct.iter().sum::<u64>(), table.grand_total());
    }
}

#[test]
fn residual_sum_weighted_by_root_expected_is_zero() {
    let mut rng = common::rng(1);
    for _ in 0..50 {
        let (r, c) = (rng.gen_range(2..7), rng.gen_range(2..6));
        let counts: Vec<Vec<u64>> = (0..r)
            .map(|_| (0..c).map(|_| rng.gen_range(1..40)).collect())
            .collect();
        let t = ContingencyTable::new(
            (0..r).map(|i| format!("R{i}")).collect(),
            (0..c).map(|j| format!("C{j}")).collect(),
            counts,
        )
        .unwrap();
        let res = representation_residuals(&t).unwrap();
        let mut s = 0.0;
        for i in 0..r {
            for j in 0..c {
                s += res.residuals[i][j] * res.expected[i][j].sqrt();
            }
        }
        assert!(s.abs() < 1e-9, "{s}");
    }
}

#[test]
fn diagonal_table_residual() {
    let t = ContingencyTable::new(
        vec!["A".into(), "B".into()],
        vec!["x".into(), "y".into()],
        vec![vec![20, 0], vec![0, 20]],
    )
    .unwrap();
    let res = representation_residuals(&t).unwrap();
    assert!((res.residuals[0][0] - 3.1623).abs() < 1e-4);
    assert_eq!(res.labels[0][0], Representation::Over);
    assert_eq!(res.labels[0][1], Representation::Under);
}

/// Within-cluster sum of squares of a labelling.
fn within_ss(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let mut total = 0.0;
    let classes: std::collections::BTreeSet<usize> = labels.iter().copied().collect();
    for c in classes {
        let members: Vec<&Vec<f64>> = points
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == c)
            .map(|(p, _)| p)
            .collect();
        let dim = members[0].len();
        let mean: Vec<f64> = (0..dim)
            .map(|d| members.iter().map(|p| p[d]).sum::<f64>() / members.len() as f64)
            .collect();
        for p in members {
            total += p
                .iter()
                .zip(&mean)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        }
    }
    total
}

fn best_two_partition(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 1u32..(1 << (n - 1)) {
        let labels: Vec<usize> = (0..n)
            .map(|i| {
                if i == n - 1 {
                    0
                } else {
                    ((mask >> i) & 1) as usize
                }
            })
            .collect();
        let ss = within_ss(points, &labels);
        if ss < best.0 - 1e-12 {
            best = (ss, labels);
        }
    }
    best.1
}

#[test]
fn profile_fixture_matches_brute_force_partition() {
    let t = ContingencyTable::new(
        vec!["AA".into(), "BB".into(), "CC".into(), "DD".into()],
        vec!["x".into(), "y".into()],
        vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]],
    )
    .unwrap();
    let cls = classify_countries(&t, 2).unwrap();
    let profiles = vec![
        vec![1.0, 0.0],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.0, 1.0],
    ];
    let oracle = best_two_partition(&profiles);
    assert!(biblionet::fixtures::same_partition(&cls.classes, &oracle));
    assert_eq!(cls.classes, vec![1, 1, 2, 2]);
}

#[test]
fn well_separated_profiles_match_brute_force() {
    let mut rng = common::rng(4);
    for _ in 0..20 {
        let n = rng.gen_range(4..9);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let centre = if i % 2 == 0 { 0.1 } else { 0.9 };
                let x: f64 = centre + rng.gen_range(-0.05..0.05);
                vec![x, 1.0 - x]
            })
            .collect();
        let merges = ward_linkage(&points);
        let cut = cut_dendrogram(&merges, n, 2).unwrap();
        assert!(biblionet::fixtures::same_partition(
            &cut,
            &best_two_partition(&points)
        ));
    }
}

fn random_table(rng: &mut rand_chacha::ChaCha8Rng) -> ContingencyTable {
    let (r, c) = (rng.gen_range(2..12), rng.gen_range(2..6));
    let counts: Vec<Vec<u64>> = (0..r)
        .map(|_| (0..c).map(|_| rng.gen_range(0..30)).collect())
        .collect();
    let mut counts = counts;
    for row in &mut counts {
        row[0] += 1;
    }
    ContingencyTable::new(
        (0..r).map(|i| format!("C{i:02}")).collect(),
        (0..c).map(|j| format!("L{j}")).collect(),
        counts,
    )
    .unwrap()
}

#[test]
fn dendrogram_heights_are_monotone_on_random_tables() {
    let mut rng = common::rng(50);
    for _ in 0..50 {
        let t = random_table(&mut rng);
        let cls = classify_countries(&t, 2).unwrap();
        assert_eq!(cls.dendrogram.len(), cls.countries.len() - 1);
        for w in cls.dendrogram.windows(2) {
            assert!(
                w[1].height >= w[0].height - 1e-12,
                "{} < {}",
                w[1].height,
                w[0].height
            );
        }
    }
}

#[test]
fn cuts_are_nested() {
    let mut rng = common::rng(6);
    for _ in 0..20 {
        let t = random_table(&mut rng);
        let cls = classify_countries(&t, 1).unwrap();
        let n = cls.countries.len();
        for k in 2..=n {
            let fine = cls.cut(k).unwrap();
            let coarse = cls.cut(k - 1).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if fine[i] == fine[j] {
                        assert_eq!(coarse[i], coarse[j]);
                    }
                }
            }
            assert_eq!(fine.iter().max().copied(), Some(k));
        }
    }
}

proptest! {
    #[test]
    fn independence_tables_have_zero_residuals(
        rows in prop::collection::vec(1u64..8, 2..6),
        cols in prop::collection::vec(1u64..8, 2..6),
    ) {
        let counts: Vec<Vec<u64>> = rows.iter().map(|r| cols.iter().map(|c| r * c).collect()).collect();
        let t = ContingencyTable::new(
            (0..rows.len()).map(|i| format!("R{i}")).collect(),
            (0..cols.len()).map(|j| format!("C{j}")).collect(),
            counts,
        ).unwrap();
        let res = representation_residuals(&t).unwrap();
        for row in &res.residuals {
            for &r in row {
                prop_assert!(r.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn row_scaling_keeps_classes(seed in 0u64..500, scale in 2u64..6) {
        let mut rng = common::rng(seed);
        let t = random_table(&mut rng);
        let scaled = ContingencyTable::new(
            t.rows().to_vec(),
            t.cols().to_vec(),
            t.counts().iter().map(|r| r.iter().map(|c| c * scale).collect()).collect(),
        ).unwrap();
        let k = 3.min(t.rows().len());
        prop_assert_eq!(classify_countries(&t, k).unwrap().classes, classify_countries(&scaled, k).unwrap().classes);
    }
}
