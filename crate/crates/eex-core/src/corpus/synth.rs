//! Deterministic synthetic corpus generator.
//!
//! Sentences are slot-filled declaratives. Each event mention spells the
//! event name (lowercased, hyphens split) as a signature phrase, recorded as
//! the gold trigger, and phrases each filled role as "the <role> was
//! <filler>" so argument spans are exact by construction. Openers and
//! trailers are shared across all classes, including no-event sentences, so
//! surface length alone does not separate the labels. Filler vocabularies
//! are pseudo-words drawn per (event, role) pair, disjoint from each other
//! and from every template word.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ontology::Ontology;
use crate::{Error, Result};

use super::{char_len, ArgumentMention, EventMention, SentenceRecord, Span, Split};

/// Mixture and split knobs for [`generate_synthetic_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Fraction of sentences that carry no event.
    pub no_event_rate: f64,
    /// Fraction of sentences that carry two distinct events.
    pub two_event_rate: f64,
    /// Fraction of sentences assigned to the train split.
    pub train_frac: f64,
    /// Fraction assigned to dev; the remainder goes to test.
    pub dev_frac: f64,
    /// Probability that a role after the first is left unfilled.
    pub role_dropout: f64,
    /// Distinct fillers per (event, role) pair.
    pub fillers_per_role: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            no_event_rate: 0.30,
            two_event_rate: 0.10,
            train_frac: 2.0 / 3.0,
            dev_frac: 1.0 / 6.0,
            role_dropout: 0.25,
            fillers_per_role: 8,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.no_event_rate) || !unit(self.two_event_rate) {
            return Err(Error::BadConfig { what: "event mixture rates must lie in [0, 1]" });
        }
        if self.no_event_rate + self.two_event_rate > 1.0 {
            return Err(Error::BadConfig { what: "no-event and two-event rates exceed 1 combined" });
        }
        if !unit(self.train_frac) || !unit(self.dev_frac) || self.train_frac + self.dev_frac > 1.0 {
            return Err(Error::BadConfig { what: "split fractions must lie in [0, 1] and sum below 1" });
        }
        if !(0.0..1.0).contains(&self.role_dropout) {
            return Err(Error::BadConfig { what: "role dropout must lie in [0, 1)" });
        }
        if self.fillers_per_role == 0 {
            return Err(Error::BadConfig { what: "need at least one filler per role" });
        }
        Ok(())
    }
}

const OPENERS: [&str; 5] = [
    "According to local reports, ",
    "Earlier today, ",
    "In a brief statement, ",
    "Sources said that ",
    "Later that week, ",
];

const TRAILERS: [&str; 4] = [
    ", according to officials",
    ", the report added",
    ", witnesses said",
    ", despite earlier denials",
];

/// (prefix, suffix) around the signature phrase.
const EVENT_FRAMES: [(&str, &str); 3] = [
    ("the ", " case unfolded"),
    ("officials confirmed the ", " incident"),
    ("witnesses described the ", " episode"),
];

const NO_EVENT_FRAMES: [(&str, &str); 4] = [
    ("the ", " meeting continued as planned"),
    ("the panel reviewed the ", " agenda"),
    ("residents discussed the ", " plans"),
    ("the ", " exhibition drew a steady crowd"),
];

const TWO_EVENT_JOIN: &str = ", while ";

const ONSETS: [&str; 20] = [
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "kr", "pl",
    "st", "tr",
];
const VOWELS: [&str; 8] = ["a", "e", "i", "o", "u", "ai", "or", "en"];

const TOPIC_COUNT: usize = 12;

/// Generates `n` sentences with the default mixture. Deterministic in
/// (ontology, n, seed): the same triple always yields the same records.
pub fn generate_synthetic(ontology: &Ontology, n: usize, seed: u64) -> Result<Vec<SentenceRecord>> {
    generate_synthetic_with(ontology, n, seed, &SynthConfig::default())
}

/// [`generate_synthetic`] with explicit mixture and split configuration.
pub fn generate_synthetic_with(
    ontology: &Ontology,
    n: usize,
    seed: u64,
    config: &SynthConfig,
) -> Result<Vec<SentenceRecord>> {
    config.validate()?;
    if ontology.is_empty() && config.no_event_rate < 1.0 {
        return Err(Error::BadConfig { what: "event sentences requested from an empty ontology" });
    }
    if ontology.len() < 2 && config.two_event_rate > 0.0 {
        return Err(Error::BadConfig { what: "two-event sentences need at least two event types" });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pools = FillerPools::draw(ontology, config.fillers_per_role, &mut rng);

    let n_train = frac_count(n, config.train_frac);
    let n_dev = frac_count(n, config.dev_frac).min(n - n_train);

    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let split = if i < n_train {
            Split::Train
        } else if i < n_train + n_dev {
            Split::Dev
        } else {
            Split::Test
        };
        let roll: f64 = rng.gen();
        let event_count = if roll < config.no_event_rate {
            0
        } else if roll < config.no_event_rate + config.two_event_rate {
            2
        } else {
            1
        };
        let (text, events) = build_sentence(ontology, &pools, event_count, config, &mut rng);
        records.push(SentenceRecord {
            id: alloc::format!("synth-{i:06}"),
            text,
            split,
            events,
        });
    }
    Ok(records)
}

fn frac_count(n: usize, frac: f64) -> usize {
    libm::round(n as f64 * frac) as usize
}

/// Per-(event, role) filler pools plus neutral topics, all disjoint from the
/// template vocabulary and from each other.
struct FillerPools {
    /// `fillers[event_index][role_index]` holds ready-to-insert phrases.
    fillers: Vec<Vec<Vec<String>>>,
    topics: Vec<String>,
}

impl FillerPools {
    fn draw(ontology: &Ontology, per_role: usize, rng: &mut ChaCha8Rng) -> FillerPools {
        let mut taken = template_vocabulary(ontology);
        let mut fillers = Vec::with_capacity(ontology.len());
        for event in ontology.events() {
            let mut per_event = Vec::with_capacity(event.arguments.len());
            for _ in &event.arguments {
                let mut pool = Vec::with_capacity(per_role);
                for _ in 0..per_role {
                    let words = if rng.gen::<f64>() < 0.4 { 2 } else { 1 };
                    let mut phrase = String::new();
                    for w in 0..words {
                        if w > 0 {
                            phrase.push(' ');
                        }
                        phrase.push_str(&capitalized(&fresh_word(rng, &mut taken)));
                    }
                    pool.push(phrase);
                }
                per_event.push(pool);
            }
            fillers.push(per_event);
        }
        let topics = (0..TOPIC_COUNT).map(|_| fresh_word(rng, &mut taken)).collect();
        FillerPools { fillers, topics }
    }
}

/// Every lowercase word the templates or the ontology can put into a
/// sentence; pseudo-words must avoid all of them.
fn template_vocabulary(ontology: &Ontology) -> BTreeSet<String> {
    let mut words = BTreeSet::new();
    let mut add_text = |text: &str| {
        for word in text.split(|c: char| !c.is_alphanumeric()) {
            if !word.is_empty() {
                words.insert(word.to_lowercase());
            }
        }
    };
    for piece in OPENERS.iter().chain(TRAILERS.iter()) {
        add_text(piece);
    }
    for (a, b) in EVENT_FRAMES.iter().chain(NO_EVENT_FRAMES.iter()) {
        add_text(a);
        add_text(b);
    }
    add_text(TWO_EVENT_JOIN);
    add_text("the was and where");
    for event in ontology.events() {
        add_text(&event.name);
        for role in &event.arguments {
            add_text(&role.role);
        }
    }
    words
}

fn fresh_word(rng: &mut ChaCha8Rng, taken: &mut BTreeSet<String>) -> String {
    loop {
        let syllables = 2 + rng.gen_range(0..2);
        let mut word = String::new();
        for _ in 0..syllables {
            word.push_str(ONSETS[rng.gen_range(0..ONSETS.len())]);
            word.push_str(VOWELS[rng.gen_range(0..VOWELS.len())]);
        }
        if taken.insert(word.clone()) {
            return word;
        }
    }
}

fn capitalized(word: &str) -> String {
    let mut out = String::with_capacity(word.len());
    let mut chars = word.chars();
    if let Some(first) = chars.next() {
        out.extend(first.to_uppercase());
    }
    out.extend(chars);
    out
}

/// Lowercased event name with hyphens opened up: "Transfer-Money" becomes
/// "transfer money". This is the phrase the sentence spells and the gold
/// trigger covers.
pub(crate) fn signature_phrase(event_name: &str) -> String {
    event_name.to_lowercase().replace('-', " ")
}

struct SentenceBuilder {
    text: String,
    cursor: usize,
}

impl SentenceBuilder {
    fn new() -> Self {
        SentenceBuilder { text: String::new(), cursor: 0 }
    }

    fn push(&mut self, piece: &str) {
        self.text.push_str(piece);
        self.cursor += char_len(piece);
    }

    /// Pushes a piece and returns its span.
    fn push_span(&mut self, piece: &str) -> Span {
        let start = self.cursor;
        self.push(piece);
        Span::new(start, self.cursor, piece)
    }
}

fn build_sentence(
    ontology: &Ontology,
    pools: &FillerPools,
    event_count: usize,
    config: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> (String, Vec<EventMention>) {
    let mut b = SentenceBuilder::new();
    if rng.gen::<f64>() < 0.4 {
        b.push(OPENERS[rng.gen_range(0..OPENERS.len())]);
    }

    let mut mentions = Vec::new();
    if event_count == 0 {
        let (prefix, suffix) = NO_EVENT_FRAMES[rng.gen_range(0..NO_EVENT_FRAMES.len())];
        b.push(prefix);
        b.push(&pools.topics[rng.gen_range(0..pools.topics.len())]);
        b.push(suffix);
    } else {
        for (slot, &event_index) in pick_distinct(ontology.len(), event_count, rng).iter().enumerate()
        {
            if slot > 0 {
                b.push(TWO_EVENT_JOIN);
            }
            let event = &ontology.events()[event_index];
            let (prefix, suffix) = EVENT_FRAMES[rng.gen_range(0..EVENT_FRAMES.len())];
            b.push(prefix);
            let trigger = b.push_span(&signature_phrase(&event.name));
            b.push(suffix);

            let mut arguments = Vec::new();
            for (role_index, role) in event.arguments.iter().enumerate() {
                if role_index > 0 && rng.gen::<f64>() < config.role_dropout {
                    continue;
                }
                let pool = &pools.fillers[event_index][role_index];
                let filler = &pool[rng.gen_range(0..pool.len())];
                b.push(", and the ");
                b.push(&role.role.to_lowercase());
                b.push(" was ");
                let span = b.push_span(filler);
                arguments.push(ArgumentMention { role: role.role.clone(), span });
            }
            mentions.push(EventMention {
                event: event.name.clone(),
                trigger: Some(trigger),
                arguments,
            });
        }
    }

    if rng.gen::<f64>() < 0.4 {
        b.push(TRAILERS[rng.gen_range(0..TRAILERS.len())]);
    }
    b.push(".");

    let mut text = b.text;
    capitalize_first_ascii(&mut text);
    (text, mentions)
}

/// The first `count` entries of a partially shuffled index range.
fn pick_distinct(len: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    for i in 0..count.min(len) {
        let j = rng.gen_range(i..len);
        order.swap(i, j);
    }
    order.truncate(count.min(len));
    order
}

/// Uppercases a leading ASCII letter in place. Every template piece starts
/// with ASCII, so this never moves a character offset.
fn capitalize_first_ascii(text: &mut String) {
    if let Some(first) = text.as_bytes().first().copied() {
        if first.is_ascii_lowercase() {
            // Single-byte replacement keeps all spans valid.
            let upper = (first.to_ascii_uppercase() as char).to_string();
            text.replace_range(0..1, &upper);
        }
    }
}
