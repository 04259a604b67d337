mod common;

use std::collections::{BTreeSet, HashMap};

use biblionet::corpus::Lang;
use biblionet::text::{
    detect_studied_countries, lexicon_counts, normalize_tokens, tokenize, vectorize_tfidf,
    Gazetteer, Lexicon,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn lexicon_counts_match_membership_scan() {
    let mut rng = common::rng(11);
    let vocab: Vec<String> = (0..30).map(|i| format!("w{i}")).collect();
    let risk = Lexicon::new("risk", &vocab[0..6]).unwrap();
    let bounds = Lexicon::new("boundaries", &vocab[4..12]).unwrap();
    for _ in 0..10 {
        let tokens: Vec<String> = (0..200)
            .map(|_| vocab.choose(&mut rng).unwrap().clone())
            .collect();
        let counts = lexicon_counts(&tokens, &[risk.clone(), bounds.clone()]);
        for lex in [&risk, &bounds] {
            let mut n = 0u64;
            for t in &tokens {
                if lex.terms().iter().any(|term| term == t) {
                    n += 1;
                }
            }
            assert_eq!(counts[lex.name()], n);
        }
    }
}

#[test]
fn lexicon_partition_sums_to_token_count() {
    let mut rng = common::rng(2);
    let vocab: Vec<String> = (0..12).map(|i| format!("t{i}")).collect();
    let parts: Vec<Lexicon> = vocab
        .chunks(4)
        .enumerate()
        .map(|(i, c)| Lexicon::new(format!("L{i}"), c).unwrap())
        .collect();
    let tokens: Vec<String> = (0..300)
        .map(|_| vocab.choose(&mut rng).unwrap().clone())
        .collect();
    let counts = lexicon_counts(&tokens, &parts);
    assert_eq!(counts.values().sum::<u64>(), tokens.len() as u64);
}

/// Every contiguous token window of every length is looked up.
fn all_window_matches(text: &str, aliases: &[(&str, &str)]) -> BTreeSet<String> {
    let tokens = normalize_tokens(text);
    let mut out = BTreeSet::new();
    for start in 0..tokens.len() {
        for end in start + 1..=tokens.len() {
            let window = tokens[start..end].join(" ");
            for (alias, code) in aliases {
                if normalize_tokens(alias).join(" ") == window {
                    out.insert(code.to_string());
                }
            }
        }
    }
    out
}

#[test]
fn detection_matches_window_oracle() {
    let aliases = [
        ("France", "FR"),
        ("United Kingdom", "GB"),
        ("Brazil", "BR"),
        ("République démocratique du Congo", "CD"),
        ("New Zealand", "NZ"),
        ("Côte d'Ivoire", "CI"),
    ];
    let g = Gazetteer::from_pairs(aliases).unwrap();
    let filler = [
        "urban", "growth", "was", "measured", "in", "several", "regions", "and", "the", "model",
        "fits",
    ];
    let mut rng = common::rng(5);
    let mut sentences: Vec<String> = (0..50)
        .map(|_| {
            let n = rng.gen_range(4..10);
            (0..n)
                .map(|_| *filler.choose(&mut rng).unwrap())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    for (i, (alias, _)) in aliases.iter().enumerate() {
        let at = rng.gen_range(0..50);
        sentences[at] = format!("{} {} {}.", sentences[at], alias, filler[i]);
    }
    let text = sentences.join(". ");
    let found = detect_studied_countries(&text, &g);
    assert_eq!(found, all_window_matches(&text, &aliases));
    assert_eq!(found.len(), 6);
}

#[test]
fn tfidf_frozen_value() {
    // 3 * ln(4 / 1)
    let df = HashMap::from([("x".to_string(), 1)]);
    let v = vectorize_tfidf(&["x", "x", "x"], &df, 4).unwrap();
    assert!((v.get("x") - 4.1589).abs() < 1e-4);
}

proptest! {
    #[test]
    fn tokenize_is_idempotent(text in "\\PC{0,80}", fr in any::<bool>()) {
        let lang = if fr { Lang::Fr } else { Lang::En };
        let once = tokenize(&text, lang);
        prop_assert_eq!(tokenize(&once.join(" "), lang), once);
    }

    #[test]
    fn tfidf_scales_with_counts(
        doc in prop::collection::vec(0usize..6, 1..20),
        c in 1u32..7,
    ) {
        let terms: Vec<String> = doc.iter().map(|i| format!("t{i}")).collect();
        let mut df: HashMap<String, u32> = HashMap::new();
        for (i, t) in ["t0", "t1", "t2", "t3", "t4", "t5"].iter().enumerate() {
            df.insert(t.to_string(), 1 + i as u32);
        }
        let base = vectorize_tfidf(&terms, &df, 10).unwrap();
        let scaled_terms: Vec<String> = terms.iter().flat_map(|t| std::iter::repeat_n(t.clone(), c as usize)).collect();
        let scaled = vectorize_tfidf(&scaled_terms, &df, 10).unwrap();
        prop_assert_eq!(base.len(), scaled.len());
        for (t, w) in base.iter() {
            prop_assert!(w >= 0.0);
            let expect = w * f64::from(c);
            prop_assert!((scaled.get(t) - expect).abs() <= 4.0 * f64::EPSILON * expect);
        }
    }

    #[test]
    fn detection_ignores_case(words in prop::collection::vec(prop::sample::select(vec![
        "france", "New", "zealand", "GERMANY", "and", "Côte", "d'Ivoire", "policy"
    ]), 0..12)) {
        let g = Gazetteer::from_pairs([
            ("France", "FR"), ("Germany", "DE"), ("New Zealand", "NZ"), ("Côte d'Ivoire", "CI"),
        ]).unwrap();
        let text = words.join(" ");
        let a = detect_studied_countries(&text, &g);
        prop_assert_eq!(&a, &detect_studied_countries(&text.to_uppercase(), &g));
        prop_assert_eq!(&a, &detect_studied_countries(&text.to_lowercase(), &g));
    }
}
