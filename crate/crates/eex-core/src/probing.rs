//! Zero-shot event probing: score every (sentence, event) pair with one
//! query family, pick a decision threshold on labeled scores, and test
//! whether a score distribution separates present from absent events at all.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::SentenceRecord;
use crate::encoding::{tokenize_pair, Encoder, Vocabulary};
use crate::evaluation::micro_prf;
use crate::heads::{
    best_span_confidence, collapse_entailment, entailment_logits, mask_event_score, polar_probs,
    span_scores_with_no_answer, EntailmentParams, PolarParams, SpanParams,
};
use crate::math;
use crate::ontology::{EventType, Ontology};
use crate::querygen::{
    make_event_statement, make_event_trigger_question, make_masked_query, make_polar_question,
    QueryKind,
};
use crate::{Error, Result};

/// Where a score came from: one of the query families, or the uniform
/// random control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    Query(QueryKind),
    Random,
}

impl ScoreKind {
    pub const RANDOM_NAME: &'static str = "RANDOM";

    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Query(kind) => kind.name(),
            ScoreKind::Random => Self::RANDOM_NAME,
        }
    }

    pub fn parse(s: &str) -> Option<ScoreKind> {
        if s == Self::RANDOM_NAME {
            Some(ScoreKind::Random)
        } else {
            QueryKind::parse(s).map(ScoreKind::Query)
        }
    }
}

/// One scored (sentence, event) pair, with its gold label for later
/// calibration and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EventScore {
    pub sentence_id: String,
    pub kind: ScoreKind,
    pub event: String,
    pub score: f64,
    pub gold: bool,
}

/// The scoring heads used by zero-shot probing, one per head family.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeHeads {
    pub entailment: EntailmentParams,
    pub polar: PolarParams,
    pub span: SpanParams,
}

impl ProbeHeads {
    pub fn seeded(dim: usize, seed: u64) -> ProbeHeads {
        ProbeHeads {
            entailment: EntailmentParams::seeded(dim, seed),
            polar: PolarParams::seeded(dim, seed.wrapping_add(1)),
            span: SpanParams::seeded(dim, seed.wrapping_add(2)),
        }
    }

    /// Heads matched to [`crate::encoding::OracleEncoder`]: the "present"
    /// logit reads the pooled sign with weight 2000, which saturates the
    /// softmax to exactly 1.0 or 0.0.
    pub fn oracle(dim: usize) -> ProbeHeads {
        let mut heads = ProbeHeads {
            entailment: EntailmentParams::zeros(dim),
            polar: PolarParams::zeros(dim),
            span: SpanParams::zeros(dim),
        };
        heads.entailment.w[1] = 2000.0;
        heads.polar.w[1] = 2000.0;
        heads
    }
}

/// Scores one (sentence, event) pair under a query family. Higher means
/// "this event is present". All families map into [0, 1].
pub fn probe_event_score(
    encoder: &dyn Encoder,
    heads: &ProbeHeads,
    vocab: &Vocabulary,
    sentence: &str,
    event: &EventType,
    kind: QueryKind,
    max_desc_sentences: usize,
) -> Result<f64> {
    if kind.is_argument() {
        return Err(Error::UnsupportedKind { kind: kind.name(), op: "event scoring" });
    }
    let query = match kind {
        QueryKind::TeStatement => make_event_statement(event, max_desc_sentences),
        QueryKind::PqEvent => make_polar_question(event),
        QueryKind::EventTriggerQa => make_event_trigger_question(event),
        QueryKind::MtpTe | QueryKind::MtpQa => make_masked_query(kind)?.0,
        _ => unreachable!("argument kinds rejected above"),
    };
    let pair = tokenize_pair(&query, sentence, vocab)?;
    let output = encoder.encode(&pair);
    match kind {
        QueryKind::TeStatement => {
            let logits = entailment_logits(output.pooled(), &heads.entailment)?;
            Ok(collapse_entailment(logits).1)
        }
        QueryKind::PqEvent => Ok(polar_probs(output.pooled(), &heads.polar)?.1),
        QueryKind::EventTriggerQa => {
            let rows = output.sentence_rows(&pair);
            let scores = span_scores_with_no_answer(output.pooled(), &rows, &heads.span)?;
            Ok(best_span_confidence(&scores))
        }
        QueryKind::MtpTe | QueryKind::MtpQa => {
            let position = pair
                .mask_position
                .ok_or(Error::BadConfig { what: "masked query lost its [MASK] token" })?;
            let logits = encoder.lm_logits(&pair, position);
            mask_event_score(&logits, &vocab.label_token_ids(&event.name))
        }
        _ => unreachable!(),
    }
}

/// Scores every (record, event) pair, records in input order and events in
/// catalog order.
pub fn probe_corpus(
    encoder: &dyn Encoder,
    heads: &ProbeHeads,
    vocab: &Vocabulary,
    records: &[SentenceRecord],
    ontology: &Ontology,
    kind: QueryKind,
    max_desc_sentences: usize,
) -> Result<Vec<EventScore>> {
    let mut scores = Vec::with_capacity(records.len() * ontology.len());
    for record in records {
        for event in ontology.events() {
            let score = probe_event_score(
                encoder,
                heads,
                vocab,
                &record.text,
                event,
                kind,
                max_desc_sentences,
            )?;
            scores.push(EventScore {
                sentence_id: record.id.clone(),
                kind: ScoreKind::Query(kind),
                event: event.name.clone(),
                score,
                gold: record.has_event(&event.name),
            });
        }
    }
    Ok(scores)
}

/// Uniform-random scores over the same (record, event) grid, the control
/// every probe family is compared against.
pub fn random_baseline(
    records: &[SentenceRecord],
    ontology: &Ontology,
    seed: u64,
) -> Vec<EventScore> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scores = Vec::with_capacity(records.len() * ontology.len());
    for record in records {
        for event in ontology.events() {
            scores.push(EventScore {
                sentence_id: record.id.clone(),
                kind: ScoreKind::Random,
                event: event.name.clone(),
                score: rng.gen::<f64>(),
                gold: record.has_event(&event.name),
            });
        }
    }
    scores
}

/// A calibrated decision threshold and the metrics it achieves on the
/// calibration scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Sweeps thresholds 0.00, 0.01, .., 1.00 and keeps the one with the best
/// micro-F1; ties go to the smallest threshold. A pair counts as predicted
/// positive when its score strictly exceeds the threshold.
pub fn calibrate(scores: &[(f64, bool)]) -> Result<Calibration> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    let mut best: Option<Calibration> = None;
    for step in 0..=100u32 {
        let threshold = f64::from(step) / 100.0;
        let mut tp = 0;
        let mut fp = 0;
        let mut fn_ = 0;
        for &(score, gold) in scores {
            match (score > threshold, gold) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        let (precision, recall, f1) = micro_prf(tp, fp, fn_);
        if best.is_none() || f1 > best.unwrap().f1 {
            best = Some(Calibration { threshold, precision, recall, f1 });
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// Applies a calibrated threshold to labeled scores: predicted positive iff
/// `score > threshold`.
pub fn apply_threshold(scores: &[EventScore], threshold: f64) -> (usize, usize, usize) {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for s in scores {
        match (s.score > threshold, s.gold) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    (tp, fp, fn_)
}

/// Two-sample distribution test result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsTest {
    /// Largest vertical gap between the two empirical CDFs.
    pub statistic: f64,
    /// Asymptotic two-sided p-value for that gap.
    pub p_value: f64,
}

/// Kolmogorov-Smirnov two-sample test.
///
/// The p-value uses the asymptotic series
/// `p = 2 * sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lambda^2)` with
/// `lambda = sqrt(n1*n2/(n1+n2)) * D`, truncated once a term drops below
/// 1e-10. No small-sample correction is applied, so p-values for tiny
/// samples are approximate.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::OneSidedScores);
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let n1 = xs.len() as f64;
    let n2 = ys.len() as f64;
    let mut i = 0;
    let mut j = 0;
    let mut statistic = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let v = if xs[i] < ys[j] { xs[i] } else { ys[j] };
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        let gap = (i as f64 / n1 - j as f64 / n2).abs();
        if gap > statistic {
            statistic = gap;
        }
    }
    let p_value = ks_p_value(statistic, xs.len(), ys.len());
    Ok(KsTest { statistic, p_value })
}

/// Asymptotic p-value for a two-sample statistic `d` at the given sample
/// sizes. `d = 0` maps to 1.
pub fn ks_p_value(d: f64, n1: usize, n2: usize) -> f64 {
    let ne = (n1 as f64) * (n2 as f64) / ((n1 + n2) as f64);
    let lambda = math::sqrt(ne) * d;
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200u32 {
        let jf = f64::from(j);
        let term = math::exp(-2.0 * jf * jf * lambda * lambda);
        sum += sign * term;
        if term < 1e-10 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Splits scores by gold label and tests whether the two score samples look
/// drawn from one distribution. Requires both labels to be present.
pub fn ks_for_scores(scores: &[EventScore]) -> Result<KsTest> {
    let pos: Vec<f64> = scores.iter().filter(|s| s.gold).map(|s| s.score).collect();
    let neg: Vec<f64> = scores.iter().filter(|s| !s.gold).map(|s| s.score).collect();
    ks_two_sample(&pos, &neg)
}
