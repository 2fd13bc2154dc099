//! Micro-averaged scoring of event and argument predictions against gold
//! annotations.
//!
//! Events are scored as (sentence, event) pairs; arguments as
//! (sentence, event, role, span) tuples with multiset matching, so a
//! duplicated gold argument needs two matching predictions. Every prediction
//! must refer to a sentence in the evaluated set; anything else is treated
//! as a wiring bug, not a false positive.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::SentenceRecord;
use crate::{Error, Result};

/// Micro-averaged precision, recall, and F1 from raw counts. Empty
/// denominators score 0, including F1 when precision + recall is 0.
pub fn micro_prf(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// Counts plus the micro metrics they induce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Metrics {
        let (precision, recall, f1) = micro_prf(tp, fp, fn_);
        Metrics {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
        }
    }
}

/// A predicted event presence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventPrediction {
    pub sentence_id: String,
    pub event: String,
}

/// A predicted argument span, in sentence character offsets, or a predicted
/// "no answer" (`span: None`), which never counts as a false positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentPrediction {
    pub sentence_id: String,
    pub event: String,
    pub role: String,
    pub span: Option<(usize, usize)>,
}

fn check_ids<'a>(
    records: &'a [SentenceRecord],
    predicted_ids: impl Iterator<Item = &'a str>,
) -> Result<BTreeSet<&'a str>> {
    let known: BTreeSet<&str> = records.iter().map(|r| r.id.as_str()).collect();
    for id in predicted_ids {
        if !known.contains(id) {
            return Err(Error::IdUniverseMismatch { id: id.into() });
        }
    }
    Ok(known)
}

/// Scores event predictions as a set of (sentence, event) pairs; duplicate
/// predictions collapse.
pub fn evaluate_events(
    records: &[SentenceRecord],
    predictions: &[EventPrediction],
) -> Result<Metrics> {
    check_ids(records, predictions.iter().map(|p| p.sentence_id.as_str()))?;
    let predicted: BTreeSet<(&str, &str)> =
        predictions.iter().map(|p| (p.sentence_id.as_str(), p.event.as_str())).collect();
    let mut gold: BTreeSet<(&str, &str)> = BTreeSet::new();
    for record in records {
        for label in record.event_labels() {
            gold.insert((record.id.as_str(), label));
        }
    }
    let tp = predicted.intersection(&gold).count();
    Ok(Metrics::from_counts(tp, predicted.len() - tp, gold.len() - tp))
}

type ArgKey<'a> = (&'a str, &'a str, &'a str, usize, usize);

fn gold_argument_counts(records: &[SentenceRecord]) -> (BTreeMap<ArgKey<'_>, usize>, usize) {
    let mut counts: BTreeMap<ArgKey<'_>, usize> = BTreeMap::new();
    let mut total = 0;
    for record in records {
        for mention in &record.events {
            for arg in &mention.arguments {
                let key = (
                    record.id.as_str(),
                    mention.event.as_str(),
                    arg.role.as_str(),
                    arg.span.start,
                    arg.span.end,
                );
                *counts.entry(key).or_insert(0) += 1;
                total += 1;
            }
        }
    }
    (counts, total)
}

/// Scores argument predictions by exact span match, with multiplicity.
///
/// Gold arguments of events no prediction ever touched stay unmatched and
/// count as misses, so skipping an event silently still costs recall.
pub fn evaluate_arguments(
    records: &[SentenceRecord],
    predictions: &[ArgumentPrediction],
) -> Result<Metrics> {
    check_ids(records, predictions.iter().map(|p| p.sentence_id.as_str()))?;
    let (mut gold, gold_total) = gold_argument_counts(records);
    let mut tp = 0;
    let mut answered = 0;
    for p in predictions {
        let Some((start, end)) = p.span else { continue };
        answered += 1;
        let key = (p.sentence_id.as_str(), p.event.as_str(), p.role.as_str(), start, end);
        if let Some(count) = gold.get_mut(&key) {
            if *count > 0 {
                *count -= 1;
                tp += 1;
            }
        }
    }
    Ok(Metrics::from_counts(tp, answered - tp, gold_total - tp))
}

fn jaccard(a: (usize, usize), b: (usize, usize)) -> f64 {
    let inter = a.1.min(b.1).saturating_sub(a.0.max(b.0));
    let union = (a.1 - a.0) + (b.1 - b.0) - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Scores argument predictions by character overlap: a prediction matches an
/// unclaimed gold argument of the same (sentence, event, role) when their
/// spans' Jaccard overlap reaches `min_jaccard`. Predictions claim gold
/// arguments greedily in input order.
pub fn evaluate_arguments_overlap(
    records: &[SentenceRecord],
    predictions: &[ArgumentPrediction],
    min_jaccard: f64,
) -> Result<Metrics> {
    check_ids(records, predictions.iter().map(|p| p.sentence_id.as_str()))?;
    let mut gold: BTreeMap<(&str, &str, &str), Vec<((usize, usize), bool)>> = BTreeMap::new();
    let mut gold_total = 0;
    for record in records {
        for mention in &record.events {
            for arg in &mention.arguments {
                gold.entry((record.id.as_str(), mention.event.as_str(), arg.role.as_str()))
                    .or_default()
                    .push(((arg.span.start, arg.span.end), false));
                gold_total += 1;
            }
        }
    }
    let mut tp = 0;
    let mut answered = 0;
    for p in predictions {
        let Some(span) = p.span else { continue };
        answered += 1;
        let key = (p.sentence_id.as_str(), p.event.as_str(), p.role.as_str());
        if let Some(slots) = gold.get_mut(&key) {
            if let Some(slot) =
                slots.iter_mut().find(|(g, used)| !used && jaccard(span, *g) >= min_jaccard)
            {
                slot.1 = true;
                tp += 1;
            }
        }
    }
    Ok(Metrics::from_counts(tp, answered - tp, gold_total - tp))
}
