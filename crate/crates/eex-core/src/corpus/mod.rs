//! Sentence records with character-offset spans, corpus validation, and stats.
//!
//! All offsets are character offsets (not bytes), end-exclusive. A span's
//! stored text must equal the slice of the owning sentence it points at;
//! validation enforces that, so downstream code can trust either form.

mod synth;

pub use synth::{generate_synthetic, generate_synthetic_with, SynthConfig};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ontology::Ontology;
use crate::{Error, Result};

/// Number of characters in `text`.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// The `[start, end)` character slice of `text`.
///
/// Returns an empty string when the range is out of bounds; validation is the
/// caller's job.
pub fn slice_chars(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end.saturating_sub(start)).collect()
}

/// A contiguous character span of one sentence, with its text denormalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    /// First character, 0-based.
    pub start: usize,
    /// One past the last character.
    pub end: usize,
    /// The covered text; must equal the sentence slice.
    pub text: String,
}

impl Span {
    pub fn new(start: usize, end: usize, text: impl Into<String>) -> Self {
        Span { start, end, text: text.into() }
    }

    /// Checks `0 <= start < end <= len(sentence)` and that `text` matches the slice.
    pub fn validate(&self, sentence: &str) -> Result<()> {
        let len = char_len(sentence);
        if self.start >= self.end || self.end > len {
            return Err(Error::SpanOutOfRange { start: self.start, end: self.end, len });
        }
        let found = slice_chars(sentence, self.start, self.end);
        if found != self.text {
            return Err(Error::SpanTextMismatch { expected: self.text.clone(), found });
        }
        Ok(())
    }
}

/// One filled argument slot of an event mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentMention {
    pub role: String,
    pub span: Span,
}

/// One event mention inside a sentence. The trigger is optional; argument
/// lists may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventMention {
    /// Event type label; must exist in the ontology the corpus is validated against.
    pub event: String,
    pub trigger: Option<Span>,
    pub arguments: Vec<ArgumentMention>,
}

/// Corpus partition a sentence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Split> {
        match s {
            "train" => Some(Split::Train),
            "dev" => Some(Split::Dev),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

/// One sentence with its gold event mentions. A sentence may carry zero,
/// one, or several events, including several mentions of the same type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceRecord {
    /// Unique across the corpus.
    pub id: String,
    pub text: String,
    pub split: Split,
    pub events: Vec<EventMention>,
}

impl SentenceRecord {
    /// Distinct event labels present in this sentence, in ontology-free sorted order.
    pub fn event_labels(&self) -> BTreeSet<&str> {
        self.events.iter().map(|e| e.event.as_str()).collect()
    }

    pub fn has_event(&self, event: &str) -> bool {
        self.events.iter().any(|e| e.event == event)
    }

    /// First mention of `event` (record order) that carries a trigger.
    pub fn trigger_for(&self, event: &str) -> Option<&Span> {
        self.events
            .iter()
            .filter(|m| m.event == event)
            .find_map(|m| m.trigger.as_ref())
    }

    /// First gold span filling `role` under any mention of `event`.
    pub fn argument_span(&self, event: &str, role: &str) -> Option<&Span> {
        self.events
            .iter()
            .filter(|m| m.event == event)
            .flat_map(|m| m.arguments.iter())
            .find(|a| a.role == role)
            .map(|a| &a.span)
    }
}

/// Validates one record against the sentence text and the ontology.
pub fn validate_record(record: &SentenceRecord, ontology: &Ontology) -> Result<()> {
    if record.id.trim().is_empty() {
        return Err(Error::EmptyLabel { what: "sentence id" });
    }
    for mention in &record.events {
        let event = ontology
            .get(&mention.event)
            .ok_or_else(|| Error::UnknownEvent { name: mention.event.clone() })?;
        if let Some(trigger) = &mention.trigger {
            trigger.validate(&record.text)?;
        }
        for arg in &mention.arguments {
            if event.role(&arg.role).is_none() {
                return Err(Error::UnknownRole {
                    event: mention.event.clone(),
                    role: arg.role.clone(),
                });
            }
            arg.span.validate(&record.text)?;
        }
    }
    Ok(())
}

/// Validates every record and the cross-record id-uniqueness invariant.
pub fn validate_corpus(records: &[SentenceRecord], ontology: &Ontology) -> Result<()> {
    let mut seen = BTreeSet::new();
    for record in records {
        validate_record(record, ontology)?;
        if !seen.insert(record.id.as_str()) {
            return Err(Error::DuplicateSentenceId { id: record.id.clone() });
        }
    }
    Ok(())
}

/// Sentence/event/argument counts for one split.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SplitCounts {
    pub sentences: usize,
    pub events: usize,
    pub arguments: usize,
}

/// Per-split corpus statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorpusStats {
    pub train: SplitCounts,
    pub dev: SplitCounts,
    pub test: SplitCounts,
}

impl CorpusStats {
    pub fn split(&self, split: Split) -> &SplitCounts {
        match split {
            Split::Train => &self.train,
            Split::Dev => &self.dev,
            Split::Test => &self.test,
        }
    }

    pub fn total(&self) -> SplitCounts {
        let mut t = SplitCounts::default();
        for s in [&self.train, &self.dev, &self.test] {
            t.sentences += s.sentences;
            t.events += s.events;
            t.arguments += s.arguments;
        }
        t
    }
}

/// Counts sentences, event mentions, and argument fills per split.
/// Insensitive to record order.
pub fn compute_stats(records: &[SentenceRecord]) -> CorpusStats {
    let mut stats = CorpusStats::default();
    for record in records {
        let counts = match record.split {
            Split::Train => &mut stats.train,
            Split::Dev => &mut stats.dev,
            Split::Test => &mut stats.test,
        };
        counts.sentences += 1;
        counts.events += record.events.len();
        counts.arguments += record.events.iter().map(|e| e.arguments.len()).sum::<usize>();
    }
    stats
}

/// Records indexed by id. Errors on duplicates.
pub fn index_by_id(records: &[SentenceRecord]) -> Result<BTreeMap<&str, &SentenceRecord>> {
    let mut map = BTreeMap::new();
    for record in records {
        if map.insert(record.id.as_str(), record).is_some() {
            return Err(Error::DuplicateSentenceId { id: record.id.to_string() });
        }
    }
    Ok(map)
}
