use alloc::string::String;
use core::fmt;

/// Why a library call was rejected or aborted.
///
/// Validation failures carry enough context to point at the offending label,
/// span, or dimension; numeric failures report where the computation died.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A name or label was empty (or whitespace-only) where one is required.
    EmptyLabel { what: &'static str },
    /// Two event types in one ontology share a name.
    DuplicateEvent { name: String },
    /// Two roles under one event type share a name.
    DuplicateRole { event: String, role: String },
    /// An event label does not exist in the ontology.
    UnknownEvent { name: String },
    /// A role does not exist under the named event type.
    UnknownRole { event: String, role: String },
    /// Two sentence records share an id.
    DuplicateSentenceId { id: String },
    /// A span does not satisfy `0 <= start < end <= sentence length` (character offsets).
    SpanOutOfRange { start: usize, end: usize, len: usize },
    /// A span's stored text does not equal the sentence slice it points at.
    SpanTextMismatch { expected: String, found: String },
    /// An ARG_GUIDE query was requested for a role with no stored guide question.
    MissingGuideQuestion { event: String, role: String },
    /// A trigger-conditioned query was requested but no gold trigger is available.
    MissingTrigger { event: String },
    /// Query or sentence text was empty after trimming.
    EmptyText { what: &'static str },
    /// A vector or matrix had the wrong length for the operation.
    DimMismatch { what: &'static str, expected: usize, found: usize },
    /// A configuration field held a value outside its documented range.
    BadConfig { what: &'static str },
    /// The sentence segment was truncated away entirely; no tokens remain to score.
    SentenceTruncatedAway,
    /// A score list was empty where at least one instance is required.
    EmptyScores,
    /// A two-sample test needs both a positive and a negative sample.
    OneSidedScores,
    /// A span label pointed outside the scored token range.
    LabelOutOfRange { index: usize, len: usize },
    /// A no-answer label was scored against vectors without the no-answer slot.
    MissingNoAnswerSlot,
    /// Training produced a non-finite loss.
    NonFiniteLoss { step: usize },
    /// Predictions and gold cover different sentence-id universes.
    IdUniverseMismatch { id: String },
    /// The operation does not support the given query kind.
    UnsupportedKind { kind: &'static str, op: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyLabel { what } => write!(f, "empty {what}"),
            Error::DuplicateEvent { name } => write!(f, "duplicate event type {name:?}"),
            Error::DuplicateRole { event, role } => {
                write!(f, "duplicate role {role:?} under event {event:?}")
            }
            Error::UnknownEvent { name } => write!(f, "unknown event type {name:?}"),
            Error::UnknownRole { event, role } => {
                write!(f, "unknown role {role:?} under event {event:?}")
            }
            Error::DuplicateSentenceId { id } => write!(f, "duplicate sentence id {id:?}"),
            Error::SpanOutOfRange { start, end, len } => {
                write!(f, "span {start}..{end} out of range for sentence of {len} chars")
            }
            Error::SpanTextMismatch { expected, found } => {
                write!(f, "span text {expected:?} does not match sentence slice {found:?}")
            }
            Error::MissingGuideQuestion { event, role } => {
                write!(f, "no guide question stored for role {role:?} of event {event:?}")
            }
            Error::MissingTrigger { event } => {
                write!(f, "no gold trigger available for event {event:?}")
            }
            Error::EmptyText { what } => write!(f, "{what} is empty after trimming"),
            Error::DimMismatch { what, expected, found } => {
                write!(f, "{what}: expected length {expected}, found {found}")
            }
            Error::BadConfig { what } => write!(f, "bad configuration: {what}"),
            Error::SentenceTruncatedAway => {
                write!(f, "sentence segment truncated away entirely")
            }
            Error::EmptyScores => write!(f, "empty score list"),
            Error::OneSidedScores => {
                write!(f, "need both positive and negative scored instances")
            }
            Error::LabelOutOfRange { index, len } => {
                write!(f, "span label index {index} out of range for {len} tokens")
            }
            Error::MissingNoAnswerSlot => {
                write!(f, "no-answer label scored against vectors without the no-answer slot")
            }
            Error::NonFiniteLoss { step } => write!(f, "non-finite loss at step {step}"),
            Error::IdUniverseMismatch { id } => {
                write!(f, "sentence id {id:?} present on one side of the comparison only")
            }
            Error::UnsupportedKind { kind, op } => {
                write!(f, "query kind {kind} is not supported by {op}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
