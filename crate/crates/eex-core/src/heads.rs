//! Scoring heads over encoder outputs: entailment, polar (yes/no), span
//! selection, and masked-token label scoring, each with its loss and, where
//! trainable, analytic gradients.
//!
//! Numeric conventions, shared by every head: softmax subtracts the row
//! maximum before exponentiating, and probabilities are clamped to 1e-12
//! before any logarithm, so losses stay finite for arbitrarily confident
//! inputs.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::{Error, Result};

/// Probability floor applied before logarithms.
pub const PROB_FLOOR: f64 = 1e-12;

fn seeded_weights(len: usize, seed: u64, scale: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| (rng.gen::<f64>() * 2.0 - 1.0) * scale).collect()
}

fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimMismatch { what, expected, found })
    }
}

/// Three-column linear map from the pooled vector to (contradiction,
/// entailment, neutral) logits. Row-major `[dim x 3]`, no bias.
#[derive(Debug, Clone, PartialEq)]
pub struct EntailmentParams {
    pub w: Vec<f64>,
    pub dim: usize,
}

impl EntailmentParams {
    pub fn zeros(dim: usize) -> Self {
        EntailmentParams { w: vec![0.0; dim * 3], dim }
    }

    pub fn seeded(dim: usize, seed: u64) -> Self {
        EntailmentParams { w: seeded_weights(dim * 3, seed, 0.1), dim }
    }
}

/// `l_c = sum_k pooled[k] * w[k][c]` for the three entailment classes.
pub fn entailment_logits(pooled: &[f64], params: &EntailmentParams) -> Result<[f64; 3]> {
    check_dim("pooled vector", params.dim, pooled.len())?;
    let mut l = [0.0; 3];
    for (k, x) in pooled.iter().enumerate() {
        for c in 0..3 {
            l[c] += x * params.w[k * 3 + c];
        }
    }
    Ok(l)
}

/// Collapses (contradiction, entailment, neutral) logits into a binary
/// distribution: `(p_no, p_yes) = softmax(l0 + l2, l1)`, computed with max
/// subtraction so extreme logits cannot overflow.
pub fn collapse_entailment(logits: [f64; 3]) -> (f64, f64) {
    let no = logits[0] + logits[2];
    let yes = logits[1];
    let m = if no > yes { no } else { yes };
    let e_no = math::exp(no - m);
    let e_yes = math::exp(yes - m);
    let sum = e_no + e_yes;
    (e_no / sum, e_yes / sum)
}

/// Binary cross-entropy against `p_yes`, with the 1e-12 floor.
pub fn binary_loss(p_yes: f64, label: bool) -> f64 {
    let p = if label { p_yes } else { 1.0 - p_yes };
    -math::ln(p.max(PROB_FLOOR))
}

/// Loss plus gradients for the entailment head on one instance.
///
/// Returns `(loss, d_w, d_pooled)` where `d_w` matches the parameter layout
/// and `d_pooled` feeds the encoder backward pass.
pub fn entailment_grads(
    pooled: &[f64],
    params: &EntailmentParams,
    label: bool,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let logits = entailment_logits(pooled, params)?;
    let (p_no, p_yes) = collapse_entailment(logits);
    let loss = binary_loss(p_yes, label);
    // Two-class softmax over (no, yes); d/dlogit = p - onehot. The "no"
    // logit is l0 + l2, so its gradient flows into both columns.
    let d_no = p_no - if label { 0.0 } else { 1.0 };
    let d_yes = p_yes - if label { 1.0 } else { 0.0 };
    let d_logits = [d_no, d_yes, d_no];
    let mut d_w = vec![0.0; params.w.len()];
    let mut d_pooled = vec![0.0; pooled.len()];
    for (k, x) in pooled.iter().enumerate() {
        for c in 0..3 {
            d_w[k * 3 + c] += d_logits[c] * x;
            d_pooled[k] += d_logits[c] * params.w[k * 3 + c];
        }
    }
    Ok((loss, d_w, d_pooled))
}

/// Two-column linear map from the pooled vector to (no, yes) logits.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarParams {
    pub w: Vec<f64>,
    pub dim: usize,
}

impl PolarParams {
    pub fn zeros(dim: usize) -> Self {
        PolarParams { w: vec![0.0; dim * 2], dim }
    }

    pub fn seeded(dim: usize, seed: u64) -> Self {
        PolarParams { w: seeded_weights(dim * 2, seed, 0.1), dim }
    }
}

/// `(p_no, p_yes)` from the polar head.
pub fn polar_probs(pooled: &[f64], params: &PolarParams) -> Result<(f64, f64)> {
    check_dim("pooled vector", params.dim, pooled.len())?;
    let mut no = 0.0;
    let mut yes = 0.0;
    for (k, x) in pooled.iter().enumerate() {
        no += x * params.w[k * 2];
        yes += x * params.w[k * 2 + 1];
    }
    let m = if no > yes { no } else { yes };
    let e_no = math::exp(no - m);
    let e_yes = math::exp(yes - m);
    let sum = e_no + e_yes;
    Ok((e_no / sum, e_yes / sum))
}

/// Loss plus gradients for the polar head on one instance.
pub fn polar_grads(
    pooled: &[f64],
    params: &PolarParams,
    label: bool,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let (p_no, p_yes) = polar_probs(pooled, params)?;
    let loss = binary_loss(p_yes, label);
    let d = [p_no - if label { 0.0 } else { 1.0 }, p_yes - if label { 1.0 } else { 0.0 }];
    let mut d_w = vec![0.0; params.w.len()];
    let mut d_pooled = vec![0.0; pooled.len()];
    for (k, x) in pooled.iter().enumerate() {
        for c in 0..2 {
            d_w[k * 2 + c] += d[c] * x;
            d_pooled[k] += d[c] * params.w[k * 2 + c];
        }
    }
    Ok((loss, d_w, d_pooled))
}

/// Start and end scorers for span selection: two `[dim]` vectors applied to
/// every candidate position.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanParams {
    pub w_start: Vec<f64>,
    pub w_end: Vec<f64>,
    pub dim: usize,
}

impl SpanParams {
    pub fn zeros(dim: usize) -> Self {
        SpanParams { w_start: vec![0.0; dim], w_end: vec![0.0; dim], dim }
    }

    pub fn seeded(dim: usize, seed: u64) -> Self {
        SpanParams {
            w_start: seeded_weights(dim, seed, 0.1),
            w_end: seeded_weights(dim, seed.wrapping_add(1), 0.1),
            dim,
        }
    }
}

/// Softmax-normalized start and end score vectors.
///
/// Without the no-answer slot both vectors cover exactly the sentence
/// tokens. With it, index 0 is a virtual no-answer position scored from the
/// pooled vector (the classifier-token convention) and sentence token `i`
/// sits at index `i + 1`; training targets need that slot, decoding skips
/// it. Each vector sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanScores {
    pub start: Vec<f64>,
    pub end: Vec<f64>,
    pub has_no_answer_slot: bool,
}

impl SpanScores {
    /// Number of real sentence positions.
    pub fn sentence_positions(&self) -> usize {
        self.start.len() - usize::from(self.has_no_answer_slot)
    }

    /// Start/end score for sentence position `i` (0-based over sentence tokens).
    pub fn at(&self, i: usize) -> (f64, f64) {
        let off = usize::from(self.has_no_answer_slot);
        (self.start[off + i], self.end[off + i])
    }
}

fn span_logits(rows: &[&[f64]], w: &[f64], dim: usize) -> Result<Vec<f64>> {
    let mut logits = Vec::with_capacity(rows.len());
    for row in rows {
        check_dim("token vector", dim, row.len())?;
        logits.push(row.iter().zip(w).map(|(a, b)| a * b).sum());
    }
    Ok(logits)
}

/// Scores sentence token vectors only; no virtual slot.
pub fn span_scores(rows: &[&[f64]], params: &SpanParams) -> Result<SpanScores> {
    if rows.is_empty() {
        return Err(Error::EmptyText { what: "sentence token rows" });
    }
    let mut start = span_logits(rows, &params.w_start, params.dim)?;
    let mut end = span_logits(rows, &params.w_end, params.dim)?;
    math::softmax_in_place(&mut start);
    math::softmax_in_place(&mut end);
    Ok(SpanScores { start, end, has_no_answer_slot: false })
}

/// Scores with the virtual no-answer slot at index 0, fed by the pooled
/// vector through the same scorers.
pub fn span_scores_with_no_answer(
    pooled: &[f64],
    rows: &[&[f64]],
    params: &SpanParams,
) -> Result<SpanScores> {
    if rows.is_empty() {
        return Err(Error::EmptyText { what: "sentence token rows" });
    }
    let mut all: Vec<&[f64]> = Vec::with_capacity(rows.len() + 1);
    all.push(pooled);
    all.extend_from_slice(rows);
    let mut start = span_logits(&all, &params.w_start, params.dim)?;
    let mut end = span_logits(&all, &params.w_end, params.dim)?;
    math::softmax_in_place(&mut start);
    math::softmax_in_place(&mut end);
    Ok(SpanScores { start, end, has_no_answer_slot: true })
}

/// Gold target for one span-selection instance. Token indices are 0-based
/// over the sentence tokens; `end` is inclusive and `start <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanLabel {
    Answer { start: usize, end: usize },
    NoAnswer,
}

/// Sum of the start-side and end-side cross-entropies.
pub fn span_loss(scores: &SpanScores, label: SpanLabel) -> Result<f64> {
    let off = usize::from(scores.has_no_answer_slot);
    let (si, ei) = match label {
        SpanLabel::Answer { start, end } => {
            let n = scores.sentence_positions();
            if start > end || end >= n {
                return Err(Error::LabelOutOfRange { index: end, len: n });
            }
            (start + off, end + off)
        }
        SpanLabel::NoAnswer => {
            if !scores.has_no_answer_slot {
                return Err(Error::MissingNoAnswerSlot);
            }
            (0, 0)
        }
    };
    Ok(-math::ln(scores.start[si].max(PROB_FLOOR)) - math::ln(scores.end[ei].max(PROB_FLOOR)))
}

/// Highest-scoring admissible span, or no answer.
///
/// Candidates are sentence positions `i <= j`, ranked by `start[i] + end[j]`;
/// ties prefer the smallest `i`, then the smallest `j`. The winner is
/// returned only when both of its scores strictly exceed `threshold`; the
/// virtual slot is never returned.
pub fn decode_span(scores: &SpanScores, threshold: f64) -> Option<(usize, usize)> {
    let n = scores.sentence_positions();
    if n == 0 {
        return None;
    }
    let mut best: Option<(f64, usize, usize)> = None;
    let mut best_start = 0usize; // position of the prefix start-score maximum
    for j in 0..n {
        let (s_j, _) = scores.at(j);
        if s_j > scores.at(best_start).0 {
            best_start = j;
        }
        let total = scores.at(best_start).0 + scores.at(j).1;
        let replace = match best {
            None => true,
            Some((t, bi, _)) => total > t || (total == t && best_start < bi),
        };
        if replace {
            best = Some((total, best_start, j));
        }
    }
    let (_, i, j) = best?;
    let (si, _) = scores.at(i);
    let (_, ej) = scores.at(j);
    if si > threshold && ej > threshold {
        Some((i, j))
    } else {
        None
    }
}

/// Confidence that the sentence answers the question at all: the best
/// `min(start[i], end[j])` over admissible spans `i <= j`.
pub fn best_span_confidence(scores: &SpanScores) -> f64 {
    let n = scores.sentence_positions();
    let mut best = 0.0f64;
    let mut prefix_max_start = 0.0f64;
    for j in 0..n {
        let (s_j, e_j) = scores.at(j);
        if s_j > prefix_max_start {
            prefix_max_start = s_j;
        }
        let cand = if prefix_max_start < e_j { prefix_max_start } else { e_j };
        if cand > best {
            best = cand;
        }
    }
    best
}

/// Loss plus gradients for the span head on one instance.
///
/// Inputs mirror [`span_scores_with_no_answer`]; the returned `d_pooled`
/// covers the virtual slot and `d_rows` (flattened `[len x dim]`) the
/// sentence tokens.
pub fn span_grads(
    pooled: &[f64],
    rows: &[&[f64]],
    params: &SpanParams,
    label: SpanLabel,
) -> Result<(f64, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let scores = span_scores_with_no_answer(pooled, rows, params)?;
    let loss = span_loss(&scores, label)?;
    let (gold_s, gold_e) = match label {
        SpanLabel::Answer { start, end } => (start + 1, end + 1),
        SpanLabel::NoAnswer => (0, 0),
    };
    let dim = params.dim;
    let len = scores.start.len();
    let mut d_ws = vec![0.0; dim];
    let mut d_we = vec![0.0; dim];
    let mut d_pooled = vec![0.0; dim];
    let mut d_rows = vec![0.0; rows.len() * dim];
    for pos in 0..len {
        // d/dlogit = p - onehot, for each side independently.
        let ds = scores.start[pos] - if pos == gold_s { 1.0 } else { 0.0 };
        let de = scores.end[pos] - if pos == gold_e { 1.0 } else { 0.0 };
        let row: &[f64] = if pos == 0 { pooled } else { rows[pos - 1] };
        let d_row: &mut [f64] = if pos == 0 {
            &mut d_pooled
        } else {
            &mut d_rows[(pos - 1) * dim..pos * dim]
        };
        for k in 0..dim {
            d_ws[k] += ds * row[k];
            d_we[k] += de * row[k];
            d_row[k] += ds * params.w_start[k] + de * params.w_end[k];
        }
    }
    Ok((loss, d_ws, d_we, d_pooled, d_rows))
}

/// Masked-token score for an event label: the mean sigmoid of the logits at
/// the label's token ids.
pub fn mask_event_score(logits: &[f64], label_token_ids: &[u32]) -> Result<f64> {
    if label_token_ids.is_empty() {
        return Err(Error::EmptyLabel { what: "label token ids" });
    }
    let mut sum = 0.0;
    for &id in label_token_ids {
        let logit = *logits
            .get(id as usize)
            .ok_or(Error::LabelOutOfRange { index: id as usize, len: logits.len() })?;
        sum += math::sigmoid(logit);
    }
    Ok(sum / label_token_ids.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LN_3: f64 = 1.0986122886681098;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-6
    }

    #[test]
    fn collapse_golden_values() {
        // Zero logits split evenly.
        let (p0, p1) = collapse_entailment([0.0, 0.0, 0.0]);
        assert!(close(p0, 0.5) && close(p1, 0.5));
        // (-1, 2, 0): p_yes = 1 / (1 + e^-3).
        let (_, p1) = collapse_entailment([-1.0, 2.0, 0.0]);
        assert!((p1 - 0.9525741268224334).abs() < 1e-9, "{p1}");
        // Huge logits collapse without overflow.
        let (p0, p1) = collapse_entailment([1000.0, 0.0, 1000.0]);
        assert_eq!(p1, 0.0);
        assert_eq!(p0, 1.0);
    }

    #[test]
    fn binary_loss_golden_values() {
        assert!(close(binary_loss(0.5, true), core::f64::consts::LN_2));
        assert!((binary_loss(0.9, false) - 2.302585092994046).abs() < 1e-9);
        // The floor keeps certain-but-wrong predictions finite.
        assert!(binary_loss(0.0, true).is_finite());
        assert!(close(binary_loss(0.0, true), -math::ln(PROB_FLOOR)));
    }

    #[test]
    fn span_loss_uniform_golden_value() {
        let scores = SpanScores {
            start: vec![0.25; 4],
            end: vec![0.25; 4],
            has_no_answer_slot: false,
        };
        let loss = span_loss(&scores, SpanLabel::Answer { start: 1, end: 2 }).unwrap();
        assert!((loss - 2.772588722239781).abs() < 1e-9, "{loss}");
    }

    #[test]
    fn span_loss_rejects_bad_labels() {
        let scores = SpanScores {
            start: vec![0.25; 4],
            end: vec![0.25; 4],
            has_no_answer_slot: false,
        };
        assert!(matches!(
            span_loss(&scores, SpanLabel::Answer { start: 2, end: 1 }),
            Err(Error::LabelOutOfRange { .. })
        ));
        assert!(matches!(
            span_loss(&scores, SpanLabel::Answer { start: 0, end: 4 }),
            Err(Error::LabelOutOfRange { .. })
        ));
        assert_eq!(span_loss(&scores, SpanLabel::NoAnswer), Err(Error::MissingNoAnswerSlot));
    }

    #[test]
    fn no_answer_loss_targets_the_virtual_slot() {
        let scores = SpanScores {
            start: vec![0.7, 0.1, 0.1, 0.1],
            end: vec![0.4, 0.2, 0.2, 0.2],
            has_no_answer_slot: true,
        };
        let loss = span_loss(&scores, SpanLabel::NoAnswer).unwrap();
        assert!(close(loss, -math::ln(0.7) - math::ln(0.4)));
        // An answer label shifts past the slot: position 0 means start[1].
        let ans = span_loss(&scores, SpanLabel::Answer { start: 0, end: 0 }).unwrap();
        assert!(close(ans, -math::ln(0.1) - math::ln(0.2)));
    }

    #[test]
    fn polar_golden_values() {
        // Logits (0, ln 3) give p_yes = 0.75 directly.
        let dim = 2;
        let mut params = PolarParams::zeros(dim);
        // pooled = [1, 0]; w row 0 = (0, ln 3).
        params.w[0] = 0.0;
        params.w[1] = LN_3;
        let (p0, p1) = polar_probs(&[1.0, 0.0], &params).unwrap();
        assert!(close(p1, 0.75) && close(p0, 0.25));
        assert!((binary_loss(p1, true) - 0.2876820724517809).abs() < 1e-9);
    }

    #[test]
    fn mask_score_golden_values() {
        // Two tokens with logits (0, ln 3): mean of 0.5 and 0.75.
        let logits = [0.0, LN_3];
        assert!(close(mask_event_score(&logits, &[0, 1]).unwrap(), 0.625));
        // A single strongly positive logit saturates.
        let one = [10.0];
        let s = mask_event_score(&one, &[0]).unwrap();
        assert!((s - 0.9999546021312976).abs() < 1e-9);
        assert!(mask_event_score(&logits, &[]).is_err());
        assert!(matches!(
            mask_event_score(&logits, &[7]),
            Err(Error::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn decode_golden_case() {
        let scores = SpanScores {
            start: vec![0.9, 0.05, 0.05],
            end: vec![0.1, 0.1, 0.8],
            has_no_answer_slot: false,
        };
        assert_eq!(decode_span(&scores, 0.5), Some((0, 2)));
        // Raising the threshold above the end score suppresses the span.
        assert_eq!(decode_span(&scores, 0.85), None);
        // The threshold comparison is strict.
        assert_eq!(decode_span(&scores, 0.8), None);
    }

    #[test]
    fn decode_never_returns_the_virtual_slot() {
        let scores = SpanScores {
            start: vec![0.97, 0.01, 0.01, 0.01],
            end: vec![0.97, 0.01, 0.01, 0.01],
            has_no_answer_slot: true,
        };
        // Virtual slot dominates; the best real pair is far under threshold.
        assert_eq!(decode_span(&scores, 0.5), None);
        assert_eq!(decode_span(&scores, 0.0), Some((0, 0)));
    }

    /// Brute-force reference: enumerate pairs in (i, j) lexicographic order,
    /// keep strict improvements, apply the threshold at the end.
    fn decode_oracle(scores: &SpanScores, threshold: f64) -> Option<(usize, usize)> {
        let n = scores.sentence_positions();
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            for j in i..n {
                let total = scores.at(i).0 + scores.at(j).1;
                if best.map_or(true, |(t, _, _)| total > t) {
                    best = Some((total, i, j));
                }
            }
        }
        let (_, i, j) = best?;
        (scores.at(i).0 > threshold && scores.at(j).1 > threshold).then_some((i, j))
    }

    fn confidence_oracle(scores: &SpanScores) -> f64 {
        let n = scores.sentence_positions();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let c = scores.at(i).0.min(scores.at(j).1);
                if c > best {
                    best = c;
                }
            }
        }
        best
    }

    prop_compose! {
        fn arb_scores()(
            n in 1usize..12,
            virt in any::<bool>(),
            raw_s in proptest::collection::vec(0.0f64..1.0, 13),
            raw_e in proptest::collection::vec(0.0f64..1.0, 13),
        ) -> SpanScores {
            let len = n + usize::from(virt);
            let mut start: Vec<f64> = raw_s[..len].to_vec();
            let mut end: Vec<f64> = raw_e[..len].to_vec();
            let ssum: f64 = start.iter().sum::<f64>().max(1e-9);
            let esum: f64 = end.iter().sum::<f64>().max(1e-9);
            start.iter_mut().for_each(|v| *v /= ssum);
            end.iter_mut().for_each(|v| *v /= esum);
            SpanScores { start, end, has_no_answer_slot: virt }
        }
    }

    proptest! {
        #[test]
        fn decode_matches_brute_force(scores in arb_scores(), thr in 0.0f64..1.0) {
            prop_assert_eq!(decode_span(&scores, thr), decode_oracle(&scores, thr));
        }

        #[test]
        fn confidence_matches_brute_force(scores in arb_scores()) {
            let fast = best_span_confidence(&scores);
            let slow = confidence_oracle(&scores);
            prop_assert!((fast - slow).abs() < 1e-12);
        }
    }

    #[test]
    fn decode_ties_prefer_smallest_start_then_end() {
        // start[0] == start[1] and end flat: (0, 0) must win.
        let scores = SpanScores {
            start: vec![0.4, 0.4, 0.2],
            end: vec![0.25, 0.25, 0.5],
            has_no_answer_slot: false,
        };
        assert_eq!(decode_span(&scores, 0.0), Some((0, 2)));
        let flat = SpanScores {
            start: vec![0.5, 0.5],
            end: vec![0.5, 0.5],
            has_no_answer_slot: false,
        };
        assert_eq!(decode_span(&flat, 0.0), Some((0, 0)));
    }

    #[test]
    fn entailment_logits_project_columns() {
        let dim = 2;
        let mut params = EntailmentParams::zeros(dim);
        // w[k][c] layout: row per dim, three columns.
        params.w = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let l = entailment_logits(&[1.0, 0.5], &params).unwrap();
        assert_eq!(l, [3.0, 4.5, 6.0]);
        assert!(entailment_logits(&[1.0], &params).is_err());
    }

    fn numeric_grad(f: &mut dyn FnMut(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn entailment_grads_match_finite_differences() {
        let dim = 3;
        let params = EntailmentParams::seeded(dim, 11);
        let pooled = [0.3, -0.7, 0.9];
        for &label in &[true, false] {
            let (_, d_w, d_pooled) = entailment_grads(&pooled, &params, label).unwrap();
            for k in 0..dim * 3 {
                let mut f = |x: f64| {
                    let mut p = params.clone();
                    p.w[k] = x;
                    let l = entailment_logits(&pooled, &p).unwrap();
                    binary_loss(collapse_entailment(l).1, label)
                };
                let num = numeric_grad(&mut f, params.w[k]);
                assert!((d_w[k] - num).abs() < 1e-6, "w[{k}]: {} vs {num}", d_w[k]);
            }
            for k in 0..dim {
                let mut f = |x: f64| {
                    let mut p = pooled;
                    p[k] = x;
                    let l = entailment_logits(&p, &params).unwrap();
                    binary_loss(collapse_entailment(l).1, label)
                };
                let num = numeric_grad(&mut f, pooled[k]);
                assert!((d_pooled[k] - num).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn polar_grads_match_finite_differences() {
        let dim = 3;
        let params = PolarParams::seeded(dim, 5);
        let pooled = [0.4, -0.2, 0.8];
        for &label in &[true, false] {
            let (_, d_w, d_pooled) = polar_grads(&pooled, &params, label).unwrap();
            for k in 0..dim * 2 {
                let mut f = |x: f64| {
                    let mut p = params.clone();
                    p.w[k] = x;
                    binary_loss(polar_probs(&pooled, &p).unwrap().1, label)
                };
                let num = numeric_grad(&mut f, params.w[k]);
                assert!((d_w[k] - num).abs() < 1e-6);
            }
            for k in 0..dim {
                let mut f = |x: f64| {
                    let mut p = pooled;
                    p[k] = x;
                    binary_loss(polar_probs(&p, &params).unwrap().1, label)
                };
                let num = numeric_grad(&mut f, pooled[k]);
                assert!((d_pooled[k] - num).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn span_grads_match_finite_differences() {
        let dim = 3;
        let params = SpanParams::seeded(dim, 9);
        let pooled = [0.2, -0.4, 0.6];
        let r0 = [0.5, 0.1, -0.3];
        let r1 = [-0.6, 0.7, 0.2];
        let r2 = [0.3, 0.3, -0.9];
        let rows: Vec<&[f64]> = vec![&r0, &r1, &r2];
        for &label in &[
            SpanLabel::Answer { start: 1, end: 2 },
            SpanLabel::Answer { start: 0, end: 0 },
            SpanLabel::NoAnswer,
        ] {
            let (_, d_ws, d_we, d_pooled, d_rows) =
                span_grads(&pooled, &rows, &params, label).unwrap();
            let eval = |p: &SpanParams, pl: &[f64], rws: &[Vec<f64>]| {
                let refs: Vec<&[f64]> = rws.iter().map(|r| r.as_slice()).collect();
                let s = span_scores_with_no_answer(pl, &refs, p).unwrap();
                span_loss(&s, label).unwrap()
            };
            let base_rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
            for k in 0..dim {
                let mut f = |x: f64| {
                    let mut p = params.clone();
                    p.w_start[k] = x;
                    eval(&p, &pooled, &base_rows)
                };
                let num = numeric_grad(&mut f, params.w_start[k]);
                assert!((d_ws[k] - num).abs() < 1e-6, "w_start[{k}]");
                let mut f = |x: f64| {
                    let mut p = params.clone();
                    p.w_end[k] = x;
                    eval(&p, &pooled, &base_rows)
                };
                let num = numeric_grad(&mut f, params.w_end[k]);
                assert!((d_we[k] - num).abs() < 1e-6, "w_end[{k}]");
                let mut f = |x: f64| {
                    let mut pl = pooled;
                    pl[k] = x;
                    eval(&params, &pl, &base_rows)
                };
                let num = numeric_grad(&mut f, pooled[k]);
                assert!((d_pooled[k] - num).abs() < 1e-6, "pooled[{k}]");
            }
            for r in 0..rows.len() {
                for k in 0..dim {
                    let mut f = |x: f64| {
                        let mut rws = base_rows.clone();
                        rws[r][k] = x;
                        eval(&params, &pooled, &rws)
                    };
                    let num = numeric_grad(&mut f, base_rows[r][k]);
                    assert!((d_rows[r * dim + k] - num).abs() < 1e-6, "row {r} [{k}]");
                }
            }
        }
    }

    #[test]
    fn span_scores_normalize() {
        let dim = 2;
        let params = SpanParams::seeded(dim, 3);
        let pooled = [0.1, 0.9];
        let r0 = [1.0, -1.0];
        let r1 = [-0.5, 0.5];
        let rows: Vec<&[f64]> = vec![&r0, &r1];
        let plain = span_scores(&rows, &params).unwrap();
        assert_eq!(plain.sentence_positions(), 2);
        assert!(close(plain.start.iter().sum::<f64>(), 1.0));
        assert!(close(plain.end.iter().sum::<f64>(), 1.0));
        let with = span_scores_with_no_answer(&pooled, &rows, &params).unwrap();
        assert_eq!(with.sentence_positions(), 2);
        assert_eq!(with.start.len(), 3);
        assert!(close(with.start.iter().sum::<f64>(), 1.0));
        // Sentence scores shift by one; relative order is preserved.
        assert_eq!(
            plain.start[0] > plain.start[1],
            with.start[1] > with.start[2]
        );
        assert!(span_scores(&[], &params).is_err());
    }
}
