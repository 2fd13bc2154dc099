//! Few-shot training: sample K sentences per event, build statement and
//! span instances, and fit the encoder and heads jointly with Adam.
//!
//! Every run is a pure function of (corpus, catalog, config, seed): sampling,
//! shuffling, and initialization all draw from counter-based generators, so
//! repeating a run reproduces its metrics bit for bit.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{SentenceRecord, Split};
use crate::encoding::{tokenize_pair, Encoder, Vocabulary};
use crate::evaluation::{evaluate_arguments, evaluate_events, ArgumentPrediction, Metrics};
use crate::heads::{
    decode_span, entailment_grads, span_grads, span_scores_with_no_answer, EntailmentParams,
    SpanLabel, SpanParams,
};
use crate::math;
use crate::ontology::Ontology;
use crate::probing::{probe_corpus, EventScore, ProbeHeads};
use crate::querygen::{make_arg_question, make_event_statement, QueryKind};
use crate::{Error, Result};

/// Adam optimizer over one flat parameter vector.
#[derive(Debug, Clone)]
pub struct Adam {
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    /// Running beta powers for bias correction.
    beta1_t: f64,
    beta2_t: f64,
}

impl Adam {
    pub fn new(learning_rate: f64, len: usize) -> Adam {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            m: vec![0.0; len],
            v: vec![0.0; len],
            beta1_t: 1.0,
            beta2_t: 1.0,
        }
    }

    /// Changes the step size without touching the moment estimates; used for
    /// schedules.
    pub fn set_learning_rate(&mut self, learning_rate: f64) {
        self.learning_rate = learning_rate;
    }

    /// One bias-corrected update. `params` and `grads` must match the length
    /// given at construction.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::DimMismatch {
                what: "optimizer state",
                expected: self.m.len(),
                found: params.len().max(grads.len()),
            });
        }
        self.beta1_t *= self.beta1;
        self.beta2_t *= self.beta2;
        let bc1 = 1.0 - self.beta1_t;
        let bc2 = 1.0 - self.beta2_t;
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.learning_rate * m_hat / (math::sqrt(v_hat) + self.epsilon);
        }
        Ok(())
    }
}

/// Mean and sample standard deviation (n - 1 denominator; 0 when n < 2).
pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, math::sqrt(var))
}

/// Statement lengths the corpus generator and query builder agree on.
pub const DESC_SENTENCE_CHOICES: [usize; 3] = [0, 1, 5];

/// Few-shot run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FewShotConfig {
    /// Sentences sampled per event.
    pub k: usize,
    /// Negative statements drawn per sampled sentence.
    pub negative_ratio: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Instances whose averaged gradient feeds one optimizer step.
    pub batch_size: usize,
    /// Description sentences appended to statements; one of
    /// [`DESC_SENTENCE_CHOICES`].
    pub max_desc_sentences: usize,
    /// Question style for argument instances.
    pub arg_kind: QueryKind,
    /// Decision threshold on the statement score.
    pub event_threshold: f64,
    /// Per-side probability floor for emitting a span.
    pub span_threshold: f64,
    /// Replace `event_threshold` with the best dev-split threshold after
    /// training.
    pub calibrate_on_dev: bool,
    pub seed: u64,
}

impl Default for FewShotConfig {
    fn default() -> FewShotConfig {
        FewShotConfig {
            k: 9,
            negative_ratio: 1,
            learning_rate: 0.01,
            epochs: 60,
            batch_size: 8,
            max_desc_sentences: 0,
            arg_kind: QueryKind::ArgTemplate,
            event_threshold: 0.5,
            span_threshold: 0.5,
            calibrate_on_dev: false,
            seed: 0,
        }
    }
}

impl FewShotConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::BadConfig { what: "k must be at least 1" });
        }
        // Zero is legal so "no learning rate, no movement" stays checkable.
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::BadConfig { what: "learning rate must be non-negative and finite" });
        }
        if self.epochs == 0 {
            return Err(Error::BadConfig { what: "epochs must be at least 1" });
        }
        if self.batch_size == 0 {
            return Err(Error::BadConfig { what: "batch size must be at least 1" });
        }
        if !DESC_SENTENCE_CHOICES.contains(&self.max_desc_sentences) {
            return Err(Error::BadConfig { what: "description sentences must be 0, 1, or 5" });
        }
        if !self.arg_kind.is_argument() {
            return Err(Error::BadConfig { what: "arg kind must be an argument question style" });
        }
        if !(0.0..=1.0).contains(&self.event_threshold)
            || !(0.0..=1.0).contains(&self.span_threshold)
        {
            return Err(Error::BadConfig { what: "thresholds must lie in [0, 1]" });
        }
        Ok(())
    }
}

/// What one training instance asks the model to do.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceTask {
    /// Statement entailment with a yes/no label.
    Event { label: bool },
    /// Span selection over the sentence, no-answer included.
    Argument { label: SpanLabel },
}

/// One (query, sentence) training pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainInstance {
    pub sentence_id: String,
    pub query: String,
    pub sentence: String,
    pub task: InstanceTask,
}

/// First `k` of a seeded partial shuffle of `0..n`.
fn sample_indices(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = i + rng.gen_range(0..n - i);
        idx.swap(i, j);
    }
    idx.truncate(k.min(n));
    idx
}

fn shuffle<T>(rng: &mut ChaCha8Rng, xs: &mut [T]) {
    for i in (1..xs.len()).rev() {
        let j = rng.gen_range(0..=i);
        xs.swap(i, j);
    }
}

/// An event with fewer annotated sentences than the requested K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shortfall {
    pub event: String,
    pub requested: usize,
    pub available: usize,
}

/// The sampled K-shot training set plus a note of every event that could not
/// fill its quota.
#[derive(Debug, Clone, PartialEq)]
pub struct FewShotSample {
    pub k: usize,
    pub seed: u64,
    pub instances: Vec<TrainInstance>,
    pub shortfalls: Vec<Shortfall>,
}

/// Samples the K-shot training set from `records` (already restricted to the
/// training split by the caller).
///
/// Per event, in catalog order: `k` sentences holding the event, each
/// yielding one positive statement, `negative_ratio` statements about events
/// absent from that sentence, and one span instance per role of the event
/// (answerable when the sentence annotates the role, no-answer otherwise).
/// An event with fewer than `k` annotated sentences contributes all it has
/// and lands in `shortfalls`; that is never an error.
pub fn sample_few_shot(
    records: &[SentenceRecord],
    ontology: &Ontology,
    vocab: &Vocabulary,
    config: &FewShotConfig,
) -> Result<FewShotSample> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut instances = Vec::new();
    let mut shortfalls = Vec::new();
    for event in ontology.events() {
        let positives: Vec<&SentenceRecord> =
            records.iter().filter(|r| r.has_event(&event.name)).collect();
        if positives.len() < config.k {
            shortfalls.push(Shortfall {
                event: event.name.clone(),
                requested: config.k,
                available: positives.len(),
            });
        }
        for pick in sample_indices(&mut rng, positives.len(), config.k) {
            let record = positives[pick];
            instances.push(TrainInstance {
                sentence_id: record.id.clone(),
                query: make_event_statement(event, config.max_desc_sentences),
                sentence: record.text.clone(),
                task: InstanceTask::Event { label: true },
            });
            let absent: Vec<usize> = (0..ontology.len())
                .filter(|&i| !record.has_event(&ontology.events()[i].name))
                .collect();
            for neg in sample_indices(&mut rng, absent.len(), config.negative_ratio) {
                let other = &ontology.events()[absent[neg]];
                instances.push(TrainInstance {
                    sentence_id: record.id.clone(),
                    query: make_event_statement(other, config.max_desc_sentences),
                    sentence: record.text.clone(),
                    task: InstanceTask::Event { label: false },
                });
            }
            let trigger = record.trigger_for(&event.name).map(|s| s.text.clone());
            for role in &event.arguments {
                let query = make_arg_question(event, role, config.arg_kind, trigger.as_deref())?;
                let label = match record.argument_span(&event.name, &role.role) {
                    Some(span) => {
                        let pair = tokenize_pair(&query, &record.text, vocab)?;
                        match pair.char_span_to_tokens(span.start, span.end) {
                            Some((first, last)) => SpanLabel::Answer { start: first, end: last },
                            // Gold span truncated away; nothing to learn from.
                            None => continue,
                        }
                    }
                    None => SpanLabel::NoAnswer,
                };
                instances.push(TrainInstance {
                    sentence_id: record.id.clone(),
                    query,
                    sentence: record.text.clone(),
                    task: InstanceTask::Argument { label },
                });
            }
        }
    }
    Ok(FewShotSample { k: config.k, seed: config.seed, instances, shortfalls })
}

/// Trained statement and span heads plus the per-epoch mean losses.
#[derive(Debug, Clone)]
pub struct TrainedHeads {
    pub entailment: EntailmentParams,
    pub span: SpanParams,
    pub epoch_losses: Vec<f64>,
}

/// Fits the encoder (in place) and fresh heads on the instances.
///
/// Instances are reshuffled every epoch and walked in batches; each batch's
/// mean gradient over the concatenation of encoder and head parameters feeds
/// one Adam step. Two stabilizers are built in: the learning rate decays
/// linearly to a tenth of its starting value across the run, and batch
/// gradients are clipped to unit global norm. A non-finite loss aborts with
/// the failing step index.
pub fn train_few_shot(
    encoder: &mut dyn Encoder,
    instances: &[TrainInstance],
    vocab: &Vocabulary,
    config: &FewShotConfig,
) -> Result<TrainedHeads> {
    config.validate()?;
    if instances.is_empty() {
        return Err(Error::EmptyScores);
    }
    let dim = encoder.dim();
    let mut entailment = EntailmentParams::seeded(dim, config.seed.wrapping_add(101));
    let mut span = SpanParams::seeded(dim, config.seed.wrapping_add(202));

    let enc_n = encoder.num_params();
    let ent_n = entailment.w.len();
    let side_n = span.w_start.len();
    let total = enc_n + ent_n + 2 * side_n;

    let mut theta = Vec::with_capacity(total);
    theta.extend_from_slice(&encoder.params());
    theta.extend_from_slice(&entailment.w);
    theta.extend_from_slice(&span.w_start);
    theta.extend_from_slice(&span.w_end);

    let pairs = instances
        .iter()
        .map(|i| tokenize_pair(&i.query, &i.sentence, vocab))
        .collect::<Result<Vec<_>>>()?;

    let mut adam = Adam::new(config.learning_rate, total);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(303));
    let mut order: Vec<usize> = (0..instances.len()).collect();
    let mut grad = vec![0.0; total];
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut step = 0usize;
    let batches_per_epoch = instances.len().div_ceil(config.batch_size);
    let total_steps = (config.epochs * batches_per_epoch).max(1);

    for _ in 0..config.epochs {
        shuffle(&mut rng, &mut order);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &ix in batch {
                let instance = &instances[ix];
                let pair = &pairs[ix];
                let output = encoder.encode(pair);
                let mut d_output = vec![0.0; output.len() * dim];

                let loss = match &instance.task {
                    InstanceTask::Event { label } => {
                        let (loss, d_w, d_pooled) =
                            entailment_grads(output.pooled(), &entailment, *label)?;
                        for (g, d) in grad[enc_n..enc_n + ent_n].iter_mut().zip(&d_w) {
                            *g += d;
                        }
                        d_output[..dim].copy_from_slice(&d_pooled);
                        loss
                    }
                    InstanceTask::Argument { label } => {
                        let rows = output.sentence_rows(pair);
                        let (loss, d_ws, d_we, d_pooled, d_rows) =
                            span_grads(output.pooled(), &rows, &span, *label)?;
                        let ws = enc_n + ent_n;
                        for (g, d) in grad[ws..ws + side_n].iter_mut().zip(&d_ws) {
                            *g += d;
                        }
                        for (g, d) in grad[ws + side_n..].iter_mut().zip(&d_we) {
                            *g += d;
                        }
                        d_output[..dim].copy_from_slice(&d_pooled);
                        let sentence_off = pair.sentence_start * dim;
                        d_output[sentence_off..sentence_off + d_rows.len()]
                            .copy_from_slice(&d_rows);
                        loss
                    }
                };
                if !loss.is_finite() {
                    return Err(Error::NonFiniteLoss { step });
                }
                epoch_loss += loss;

                let enc_grads = encoder.param_grads(pair, &d_output);
                for (g, d) in grad[..enc_n].iter_mut().zip(&enc_grads) {
                    *g += d;
                }
            }
            if batch.len() > 1 {
                let inv = 1.0 / batch.len() as f64;
                grad.iter_mut().for_each(|g| *g *= inv);
            }
            let norm = math::sqrt(grad.iter().map(|g| g * g).sum::<f64>());
            if norm > 1.0 {
                let inv = 1.0 / norm;
                grad.iter_mut().for_each(|g| *g *= inv);
            }

            let progress = step as f64 / total_steps as f64;
            adam.set_learning_rate(config.learning_rate * (1.0 - 0.9 * progress));
            adam.step(&mut theta, &grad)?;
            encoder.set_params(&theta[..enc_n])?;
            entailment.w.copy_from_slice(&theta[enc_n..enc_n + ent_n]);
            span.w_start.copy_from_slice(&theta[enc_n + ent_n..enc_n + ent_n + side_n]);
            span.w_end.copy_from_slice(&theta[enc_n + ent_n + side_n..]);
            step += 1;
        }
        epoch_losses.push(epoch_loss / instances.len() as f64);
    }

    Ok(TrainedHeads { entailment, span, epoch_losses })
}

/// Statement scores for every (record, event) pair under trained heads.
pub fn score_events_trained(
    encoder: &dyn Encoder,
    heads: &TrainedHeads,
    vocab: &Vocabulary,
    records: &[SentenceRecord],
    ontology: &Ontology,
    max_desc_sentences: usize,
) -> Result<Vec<EventScore>> {
    let probe = ProbeHeads {
        entailment: heads.entailment.clone(),
        polar: crate::heads::PolarParams::zeros(heads.entailment.dim),
        span: heads.span.clone(),
    };
    probe_corpus(
        encoder,
        &probe,
        vocab,
        records,
        ontology,
        QueryKind::TeStatement,
        max_desc_sentences,
    )
}

/// Extracts argument spans for every (record, gold event, role) triple.
///
/// Questions are asked only for events actually annotated on the sentence,
/// so the scores isolate argument quality from event detection.
pub fn predict_arguments_on_gold(
    encoder: &dyn Encoder,
    heads: &TrainedHeads,
    vocab: &Vocabulary,
    records: &[SentenceRecord],
    ontology: &Ontology,
    arg_kind: QueryKind,
    span_threshold: f64,
) -> Result<Vec<ArgumentPrediction>> {
    let mut predictions = Vec::new();
    for record in records {
        for label in record.event_labels() {
            let event = ontology.get(label).ok_or_else(|| Error::UnknownEvent {
                name: label.into(),
            })?;
            let trigger = record.trigger_for(&event.name).map(|s| s.text.clone());
            for role in &event.arguments {
                let query = make_arg_question(event, role, arg_kind, trigger.as_deref())?;
                let pair = tokenize_pair(&query, &record.text, vocab)?;
                let output = encoder.encode(&pair);
                let rows = output.sentence_rows(&pair);
                let scores = span_scores_with_no_answer(output.pooled(), &rows, &heads.span)?;
                let span = decode_span(&scores, span_threshold)
                    .map(|(first, last)| pair.token_span_to_chars(first, last));
                predictions.push(ArgumentPrediction {
                    sentence_id: record.id.clone(),
                    event: event.name.clone(),
                    role: role.role.clone(),
                    span,
                });
            }
        }
    }
    Ok(predictions)
}

/// Metrics from one trained run.
#[derive(Debug, Clone)]
pub struct KShotOutcome {
    pub k: usize,
    pub seed: u64,
    pub event_metrics: Metrics,
    pub argument_metrics: Metrics,
    /// Decision threshold actually applied on the test split.
    pub event_threshold: f64,
    pub final_loss: f64,
}

/// Mean and spread over seeds at one K.
#[derive(Debug, Clone)]
pub struct KShotSummary {
    pub k: usize,
    pub event_f1_mean: f64,
    pub event_f1_std: f64,
    pub argument_f1_mean: f64,
    pub argument_f1_std: f64,
    pub outcomes: Vec<KShotOutcome>,
}

/// Samples, trains, and evaluates one (K, seed) run: train on the training
/// split, optionally pick the statement threshold on the dev split, then
/// score events and extract arguments on the test split.
pub fn run_one_k_shot(
    encoder: &mut dyn Encoder,
    records: &[SentenceRecord],
    ontology: &Ontology,
    vocab: &Vocabulary,
    config: &FewShotConfig,
) -> Result<KShotOutcome> {
    let train: Vec<SentenceRecord> =
        records.iter().filter(|r| r.split == Split::Train).cloned().collect();
    let test: Vec<SentenceRecord> =
        records.iter().filter(|r| r.split == Split::Test).cloned().collect();
    let sample = sample_few_shot(&train, ontology, vocab, config)?;
    let heads = train_few_shot(encoder, &sample.instances, vocab, config)?;

    let event_threshold = if config.calibrate_on_dev {
        let dev: Vec<SentenceRecord> =
            records.iter().filter(|r| r.split == Split::Dev).cloned().collect();
        let dev_scores =
            score_events_trained(encoder, &heads, vocab, &dev, ontology, config.max_desc_sentences)?;
        let labeled: Vec<(f64, bool)> = dev_scores.iter().map(|s| (s.score, s.gold)).collect();
        crate::probing::calibrate(&labeled)?.threshold
    } else {
        config.event_threshold
    };

    let scores =
        score_events_trained(encoder, &heads, vocab, &test, ontology, config.max_desc_sentences)?;
    let predicted: Vec<crate::evaluation::EventPrediction> = scores
        .iter()
        .filter(|s| s.score > event_threshold)
        .map(|s| crate::evaluation::EventPrediction {
            sentence_id: s.sentence_id.clone(),
            event: s.event.clone(),
        })
        .collect();
    let event_metrics = evaluate_events(&test, &predicted)?;

    let arg_predictions = predict_arguments_on_gold(
        encoder,
        &heads,
        vocab,
        &test,
        ontology,
        config.arg_kind,
        config.span_threshold,
    )?;
    let argument_metrics = evaluate_arguments(&test, &arg_predictions)?;

    Ok(KShotOutcome {
        k: config.k,
        seed: config.seed,
        event_metrics,
        argument_metrics,
        event_threshold,
        final_loss: heads.epoch_losses.last().copied().unwrap_or(f64::NAN),
    })
}

/// Aggregates per-seed outcomes into the summary for one K.
pub fn summarize_k_shot(k: usize, outcomes: Vec<KShotOutcome>) -> KShotSummary {
    let event_f1: Vec<f64> = outcomes.iter().map(|o| o.event_metrics.f1).collect();
    let arg_f1: Vec<f64> = outcomes.iter().map(|o| o.argument_metrics.f1).collect();
    let (event_f1_mean, event_f1_std) = mean_and_std(&event_f1);
    let (argument_f1_mean, argument_f1_std) = mean_and_std(&arg_f1);
    KShotSummary { k, event_f1_mean, event_f1_std, argument_f1_mean, argument_f1_std, outcomes }
}

/// Runs one K over several seeds with a fresh encoder per seed.
///
/// At least two seeds are required; a single-seed mean hides the variance
/// the summary exists to report.
pub fn run_k_shot(
    make_encoder: &dyn Fn(u64) -> Result<Box<dyn Encoder>>,
    records: &[SentenceRecord],
    ontology: &Ontology,
    vocab: &Vocabulary,
    config: &FewShotConfig,
    seeds: &[u64],
) -> Result<KShotSummary> {
    if seeds.len() < 2 {
        return Err(Error::BadConfig { what: "at least two seeds are required" });
    }
    let mut outcomes = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let mut encoder = make_encoder(seed)?;
        let mut run_config = config.clone();
        run_config.seed = seed;
        outcomes.push(run_one_k_shot(encoder.as_mut(), records, ontology, vocab, &run_config)?);
    }
    Ok(summarize_k_shot(config.k, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::generate_synthetic;
    use crate::encoding::{MockEncoder, TinyEncoder, MOCK_DIM, TINY_DIM};
    use crate::ontology::demo_ontology;
    use crate::querygen::vocabulary_seed_texts;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn adam_minimizes_a_quadratic() {
        let mut params = vec![7.0];
        let mut adam = Adam::new(0.1, 1);
        for _ in 0..500 {
            let grad = vec![2.0 * (params[0] - 3.0)];
            adam.step(&mut params, &grad).unwrap();
        }
        assert!((params[0] - 3.0).abs() < 0.01, "{}", params[0]);
    }

    #[test]
    fn adam_first_step_is_learning_rate_sized() {
        // Bias correction makes the first update ~lr regardless of gradient
        // magnitude.
        for &g in &[1e-6, 1.0, 1e4] {
            let mut params = vec![0.0];
            let mut adam = Adam::new(0.05, 1);
            adam.step(&mut params, &[g]).unwrap();
            assert!((params[0].abs() - 0.05).abs() < 0.0005, "grad {g}: {}", params[0]);
        }
    }

    #[test]
    fn adam_rejects_mismatched_lengths() {
        let mut adam = Adam::new(0.1, 2);
        assert!(adam.step(&mut [0.0], &[0.0]).is_err());
    }

    #[test]
    fn mean_and_std_golden_case() {
        let (mean, std) = mean_and_std(&[0.5, 0.7]);
        assert!(close(mean, 0.6));
        assert!((std - 0.1414213562373095).abs() < 1e-12);
        assert_eq!(mean_and_std(&[0.4]), (0.4, 0.0));
        assert_eq!(mean_and_std(&[]), (0.0, 0.0));
    }

    fn test_vocab(records: &[SentenceRecord], ontology: &Ontology) -> Vocabulary {
        let seeds = vocabulary_seed_texts(ontology);
        Vocabulary::build(
            records.iter().map(|r| r.text.as_str()).chain(seeds.iter().map(|s| s.as_str())),
        )
    }

    #[test]
    fn sampling_yields_the_expected_instance_mix() {
        let ontology = demo_ontology();
        let records = generate_synthetic(&ontology, 400, 11).unwrap();
        let train: Vec<SentenceRecord> =
            records.iter().filter(|r| r.split == Split::Train).cloned().collect();
        let vocab = test_vocab(&records, &ontology);
        let config = FewShotConfig { k: 2, ..FewShotConfig::default() };
        let sample = sample_few_shot(&train, &ontology, &vocab, &config).unwrap();
        assert_eq!(sample.k, 2);
        assert!(sample.shortfalls.is_empty());
        let instances = &sample.instances;

        let positives = instances
            .iter()
            .filter(|i| matches!(i.task, InstanceTask::Event { label: true }))
            .count();
        let negatives = instances
            .iter()
            .filter(|i| matches!(i.task, InstanceTask::Event { label: false }))
            .count();
        let args = instances
            .iter()
            .filter(|i| matches!(i.task, InstanceTask::Argument { .. }))
            .count();
        assert_eq!(positives, 2 * ontology.len());
        // Every sampled sentence has at least 3 absent events (at most two
        // events co-occur), so the ratio is always met.
        assert_eq!(negatives, positives * config.negative_ratio);
        let expected_args: usize =
            ontology.events().iter().map(|e| 2 * e.arguments.len()).sum();
        assert_eq!(args, expected_args);
        // Both answerable and no-answer span labels appear (role dropout).
        assert!(instances.iter().any(|i| matches!(
            i.task,
            InstanceTask::Argument { label: SpanLabel::Answer { .. } }
        )));
        assert!(instances
            .iter()
            .any(|i| matches!(i.task, InstanceTask::Argument { label: SpanLabel::NoAnswer })));
    }

    #[test]
    fn sampling_is_seeded() {
        let ontology = demo_ontology();
        let records = generate_synthetic(&ontology, 400, 11).unwrap();
        let train: Vec<SentenceRecord> =
            records.iter().filter(|r| r.split == Split::Train).cloned().collect();
        let vocab = test_vocab(&records, &ontology);
        let config = FewShotConfig { k: 2, ..FewShotConfig::default() };
        let a = sample_few_shot(&train, &ontology, &vocab, &config).unwrap();
        let b = sample_few_shot(&train, &ontology, &vocab, &config).unwrap();
        assert_eq!(a, b);
        let other = FewShotConfig { seed: 9, ..config };
        let c = sample_few_shot(&train, &ontology, &vocab, &other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampling_records_shortfalls_instead_of_failing() {
        let ontology = demo_ontology();
        let records = generate_synthetic(&ontology, 40, 11).unwrap();
        let vocab = test_vocab(&records, &ontology);
        let config = FewShotConfig { k: 5000, ..FewShotConfig::default() };
        let sample = sample_few_shot(&records, &ontology, &vocab, &config).unwrap();
        // No event has 5000 sentences, so every one reports a shortfall and
        // contributes everything it does have.
        assert_eq!(sample.shortfalls.len(), ontology.len());
        for shortfall in &sample.shortfalls {
            assert_eq!(shortfall.requested, 5000);
            assert!(shortfall.available < 5000);
        }
        let positives = sample
            .instances
            .iter()
            .filter(|i| matches!(i.task, InstanceTask::Event { label: true }))
            .count();
        let total_available: usize = sample.shortfalls.iter().map(|s| s.available).sum();
        assert_eq!(positives, total_available);
        assert!(positives > 0);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let bad = [
            FewShotConfig { k: 0, ..FewShotConfig::default() },
            FewShotConfig { learning_rate: -0.1, ..FewShotConfig::default() },
            FewShotConfig { learning_rate: f64::NAN, ..FewShotConfig::default() },
            FewShotConfig { epochs: 0, ..FewShotConfig::default() },
            FewShotConfig { batch_size: 0, ..FewShotConfig::default() },
            FewShotConfig { max_desc_sentences: 2, ..FewShotConfig::default() },
            FewShotConfig { arg_kind: QueryKind::TeStatement, ..FewShotConfig::default() },
            FewShotConfig { event_threshold: 1.5, ..FewShotConfig::default() },
        ];
        for config in bad {
            assert!(config.validate().is_err());
        }
        // Zero learning rate is a legal no-op setting.
        assert!(FewShotConfig { learning_rate: 0.0, ..FewShotConfig::default() }
            .validate()
            .is_ok());
    }

    #[test]
    fn head_only_training_reduces_the_loss() {
        let ontology = demo_ontology();
        let records = generate_synthetic(&ontology, 300, 5).unwrap();
        let train: Vec<SentenceRecord> =
            records.iter().filter(|r| r.split == Split::Train).cloned().collect();
        let vocab = test_vocab(&records, &ontology);
        let config = FewShotConfig { k: 2, epochs: 5, ..FewShotConfig::default() };
        let sample = sample_few_shot(&train, &ontology, &vocab, &config).unwrap();
        // The mock encoder carries no trainable parameters; only the heads
        // move, which still has to push the loss down.
        let mut encoder = MockEncoder::new(3, vocab.len());
        let heads = train_few_shot(&mut encoder, &sample.instances, &vocab, &config).unwrap();
        assert_eq!(heads.epoch_losses.len(), 5);
        assert!(
            heads.epoch_losses[4] < heads.epoch_losses[0],
            "{:?}",
            heads.epoch_losses
        );
        assert_eq!(heads.entailment.dim, MOCK_DIM);
    }

    /// Two span instances over distinct sentences. The mock encoder gives
    /// every token id a fixed signature vector and has no parameters of its
    /// own, so this is a separable convex problem for the linear span head
    /// alone.
    fn toy_instances() -> Vec<TrainInstance> {
        let a = TrainInstance {
            sentence_id: "t0".into(),
            query: "Who or what participated as role Person in the event Marry?".into(),
            // "Bilu" is sentence token 2.
            sentence: "Saku married Bilu gladly.".into(),
            task: InstanceTask::Argument { label: SpanLabel::Answer { start: 2, end: 2 } },
        };
        let b = TrainInstance {
            sentence_id: "t1".into(),
            query: "Who or what participated as role Person in the event Divorce?".into(),
            // "Renu" is sentence token 0.
            sentence: "Renu divorced Tamu.".into(),
            task: InstanceTask::Argument { label: SpanLabel::Answer { start: 0, end: 0 } },
        };
        vec![a, b]
    }

    fn toy_vocab() -> Vocabulary {
        Vocabulary::build([
            "Who or what participated as role Person in the event Marry?",
            "Who or what participated as role Person in the event Divorce?",
            "Saku married Bilu gladly.",
            "Renu divorced Tamu.",
        ])
    }

    #[test]
    fn separable_toy_batch_converges_within_500_steps() {
        let vocab = toy_vocab();
        let instances = toy_instances();
        let mut encoder = MockEncoder::new(3, vocab.len());
        // Full-batch steps: 500 epochs x 1 step each.
        let config = FewShotConfig {
            epochs: 500,
            batch_size: 2,
            learning_rate: 0.05,
            ..FewShotConfig::default()
        };
        let heads = train_few_shot(&mut encoder, &instances, &vocab, &config).unwrap();
        let last = *heads.epoch_losses.last().unwrap();
        assert!(last < 0.01, "final loss {last}");
    }

    #[test]
    fn zero_learning_rate_moves_nothing() {
        let ontology = demo_ontology();
        let records = generate_synthetic(&ontology, 120, 3).unwrap();
        let train: Vec<SentenceRecord> =
            records.iter().filter(|r| r.split == Split::Train).cloned().collect();
        let vocab = test_vocab(&records, &ontology);
        let config = FewShotConfig {
            k: 1,
            epochs: 2,
            learning_rate: 0.0,
            ..FewShotConfig::default()
        };
        let sample = sample_few_shot(&train, &ontology, &vocab, &config).unwrap();
        let mut encoder = TinyEncoder::new(5, vocab.len()).unwrap();
        let before = encoder.params();
        let heads = train_few_shot(&mut encoder, &sample.instances, &vocab, &config).unwrap();
        assert_eq!(encoder.params(), before);
        let fresh = EntailmentParams::seeded(TINY_DIM, config.seed.wrapping_add(101));
        assert_eq!(heads.entailment.w, fresh.w);
        // With frozen parameters both epochs see the same mean loss, up to
        // the reshuffled summation order.
        assert!((heads.epoch_losses[0] - heads.epoch_losses[1]).abs() < 1e-12);
    }

    #[test]
    fn loss_is_non_increasing_on_a_convex_toy() {
        // A frozen encoder and the entailment head alone form a convex
        // logistic objective; full-batch steps at a gentle rate must descend.
        let vocab = toy_vocab();
        let instances = toy_instances();
        let mut encoder = MockEncoder::new(3, vocab.len());
        let config = FewShotConfig {
            epochs: 40,
            batch_size: 2,
            learning_rate: 0.01,
            ..FewShotConfig::default()
        };
        let heads = train_few_shot(&mut encoder, &instances, &vocab, &config).unwrap();
        for window in heads.epoch_losses.windows(2) {
            assert!(window[1] <= window[0] + 1e-12, "{:?}", heads.epoch_losses);
        }
    }

    #[test]
    fn full_run_produces_metrics() {
        let ontology = demo_ontology();
        let records = generate_synthetic(&ontology, 300, 5).unwrap();
        let vocab = test_vocab(&records, &ontology);
        let config = FewShotConfig { k: 1, epochs: 2, ..FewShotConfig::default() };
        let mut encoder = MockEncoder::new(3, vocab.len());
        let outcome =
            run_one_k_shot(&mut encoder, &records, &ontology, &vocab, &config).unwrap();
        assert_eq!(outcome.k, 1);
        assert_eq!(outcome.event_threshold, config.event_threshold);
        assert!(outcome.final_loss.is_finite());
        assert!((0.0..=1.0).contains(&outcome.event_metrics.f1));
        assert!((0.0..=1.0).contains(&outcome.argument_metrics.f1));
    }

    #[test]
    fn multi_seed_protocol_needs_two_seeds() {
        let ontology = demo_ontology();
        let records = generate_synthetic(&ontology, 120, 3).unwrap();
        let vocab = test_vocab(&records, &ontology);
        let make = |_seed: u64| -> Result<alloc::boxed::Box<dyn Encoder>> {
            Ok(alloc::boxed::Box::new(MockEncoder::new(3, 64)))
        };
        let config = FewShotConfig { k: 1, epochs: 1, ..FewShotConfig::default() };
        let err = run_k_shot(&make, &records, &ontology, &vocab, &config, &[7]).unwrap_err();
        assert!(matches!(err, Error::BadConfig { .. }));
    }

    #[test]
    fn summary_aggregates_seed_runs() {
        let mk = |f1: f64, seed: u64| KShotOutcome {
            k: 3,
            seed,
            event_metrics: Metrics::from_counts(0, 0, 0),
            argument_metrics: Metrics::from_counts(0, 0, 0),
            event_threshold: 0.5,
            final_loss: f1,
        };
        let mut a = mk(0.0, 1);
        a.event_metrics.f1 = 0.5;
        let mut b = mk(0.0, 2);
        b.event_metrics.f1 = 0.7;
        let summary = summarize_k_shot(3, vec![a, b]);
        assert!(close(summary.event_f1_mean, 0.6));
        assert!((summary.event_f1_std - 0.1414213562373095).abs() < 1e-12);
        assert_eq!(summary.outcomes.len(), 2);
    }
}
