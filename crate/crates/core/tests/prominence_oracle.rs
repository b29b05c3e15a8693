//! Prominence statistics vs a brute-force reference implementation.

mod common;

use std::collections::BTreeSet;

use common::XorShift;
use docweave_core::stats::{
    heading_prominence, rank_tokens, tokenize, ProminenceMode, Ratio, TokenizerConfig,
};

/// Brute force: count tokens, sort by (count desc, first occurrence),
/// walk the sorted list, take 1-based indexes of heading tokens, and
/// compute the two formula values directly.
struct Reference {
    positions: Vec<usize>,
    distinct: usize,
    mean: Ratio,
    percentage: Ratio,
}

fn reference(tokens: &[String], heading: &BTreeSet<String>, min_count: Option<u64>) -> Option<Reference> {
    let mut counts: Vec<(String, u64, usize)> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        match counts.iter_mut().find(|(token, _, _)| token == t) {
            Some(entry) => entry.1 += 1,
            None => counts.push((t.clone(), 1, i)),
        }
    }
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));

    let mut positions = Vec::new();
    for (i, (token, count, _)) in counts.iter().enumerate() {
        if heading.contains(token) && min_count.is_none_or(|k| *count > k) {
            positions.push(i + 1);
        }
    }
    if positions.is_empty() {
        return None;
    }
    let distinct = counts.len();
    let sum: u64 = positions.iter().map(|&p| p as u64).sum();
    let n = positions.len() as u64;
    Some(Reference {
        positions: positions.clone(),
        distinct,
        mean: Ratio::new(sum, n),
        percentage: Ratio::new(sum * 100, n * distinct as u64),
    })
}

fn random_corpus(rng: &mut XorShift, max_tokens: usize) -> Vec<String> {
    // Zipf-ish: low word ids appear much more often.
    let len = 1 + rng.below(max_tokens as u64) as usize;
    let vocab = 1 + rng.below(60);
    (0..len)
        .map(|_| {
            let r = rng.below(vocab * (vocab + 1) / 2);
            let mut acc = 0;
            let mut id = 0;
            for w in (1..=vocab).rev() {
                acc += w;
                if r < acc {
                    id = vocab - w;
                    break;
                }
            }
            format!("w{id}")
        })
        .collect()
}

#[test]
fn matches_brute_force_on_corpora_up_to_a_thousand_tokens() {
    let mut rng = XorShift::new(0x0DDC0FFE);
    let mut compared = 0;
    for case in 0..300 {
        let corpus = random_corpus(&mut rng, 1000);
        let mut heading = BTreeSet::new();
        for _ in 0..(1 + rng.below(8)) {
            heading.insert(corpus[rng.below(corpus.len() as u64) as usize].clone());
        }
        if rng.chance(30) {
            heading.insert("never-in-doc".to_string());
        }
        let threshold = if rng.chance(50) { Some(rng.below(4)) } else { None };
        let mode = match threshold {
            Some(k) => ProminenceMode::MinOccurrenceThreshold(k),
            None => ProminenceMode::AllHeadings,
        };

        let ranking = rank_tokens(&corpus);
        let ours = heading_prominence(&ranking, &heading, mode);
        let expected = reference(&corpus, &heading, threshold);

        match (ours, expected) {
            (Ok(report), Some(reference)) => {
                assert_eq!(report.positions, reference.positions, "case {case}");
                assert_eq!(report.distinct_token_count, reference.distinct, "case {case}");
                assert_eq!(report.mean, reference.mean, "case {case}");
                assert_eq!(report.percentage, reference.percentage, "case {case}");
                assert_eq!(report.raw_token_count, corpus.len() as u64, "case {case}");
                compared += 1;
            }
            (Err(_), None) => {}
            (ours, expected) => panic!(
                "case {case}: implementation and oracle disagree on emptiness: ours ok={} oracle some={}",
                ours.is_ok(),
                expected.is_some()
            ),
        }
    }
    assert!(compared > 200, "only {compared} comparisons ran");
}

#[test]
fn adding_a_strictly_rarer_token_shifts_nothing() {
    let mut rng = XorShift::new(0x1234);
    for _ in 0..100 {
        let mut corpus = random_corpus(&mut rng, 300);
        // Make every count at least 2 so a count-1 newcomer is strictly
        // less frequent than every heading token.
        corpus.extend(corpus.clone());
        let heading: BTreeSet<String> = [corpus[0].clone()].into_iter().collect();

        let base = heading_prominence(
            &rank_tokens(&corpus),
            &heading,
            ProminenceMode::AllHeadings,
        )
        .unwrap();

        corpus.push("zz-newcomer".to_string());
        let grown = heading_prominence(
            &rank_tokens(&corpus),
            &heading,
            ProminenceMode::AllHeadings,
        )
        .unwrap();

        assert_eq!(grown.positions, base.positions);
        assert_eq!(grown.distinct_token_count, base.distinct_token_count + 1);
    }
}

#[test]
fn fixture_paragraph_matches_hand_tokenization() {
    let text = "The Class-Ref element (from Kernel, 7.3.1) maps onto 2 pages.";
    let tokens = tokenize(text, &TokenizerConfig::default());
    assert_eq!(
        tokens,
        vec![
            "the", "class", "ref", "element", "from", "kernel", "7", "3", "1", "maps", "onto",
            "2", "pages"
        ]
    );
}
