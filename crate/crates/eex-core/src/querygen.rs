//! Statement and question construction, and per-sentence query expansion.
//!
//! Wording is contract: downstream scores are only comparable when every run
//! generates byte-identical query text, so the templates here are fixed
//! strings with golden tests and event/role labels are inserted verbatim.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::SentenceRecord;
use crate::ontology::{ArgumentRole, EventType, Ontology};
use crate::{Error, Result};

/// The probe families a query can belong to.
///
/// `name()` spellings are the wire format for query and score files and for
/// the `--kinds` CLI flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum QueryKind {
    /// Entailment statement: "Hence, an event about X happened."
    TeStatement,
    /// Role question from the fixed template.
    ArgTemplate,
    /// Role question stored in the ontology.
    ArgGuide,
    /// Role question conditioned on the trigger text.
    ArgTrig,
    /// Role question conditioned on event name and trigger text.
    ArgTrigPlus,
    /// Extractive question asking for the trigger of an event.
    EventTriggerQa,
    /// Yes/no question about an event.
    PqEvent,
    /// Masked entailment statement for masked-token probing.
    MtpTe,
    /// Masked yes/no question for masked-token probing.
    MtpQa,
}

impl QueryKind {
    pub const ALL: [QueryKind; 9] = [
        QueryKind::TeStatement,
        QueryKind::ArgTemplate,
        QueryKind::ArgGuide,
        QueryKind::ArgTrig,
        QueryKind::ArgTrigPlus,
        QueryKind::EventTriggerQa,
        QueryKind::PqEvent,
        QueryKind::MtpTe,
        QueryKind::MtpQa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryKind::TeStatement => "TE_STATEMENT",
            QueryKind::ArgTemplate => "ARG_TEMPLATE",
            QueryKind::ArgGuide => "ARG_GUIDE",
            QueryKind::ArgTrig => "ARG_TRIG",
            QueryKind::ArgTrigPlus => "ARG_TRIG_PLUS",
            QueryKind::EventTriggerQa => "EVENT_TRIGGER_QA",
            QueryKind::PqEvent => "PQ_EVENT",
            QueryKind::MtpTe => "MTP_TE",
            QueryKind::MtpQa => "MTP_QA",
        }
    }

    pub fn parse(s: &str) -> Option<QueryKind> {
        QueryKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Kinds that target one (event, role) pair and carry a `role`.
    pub fn is_argument(self) -> bool {
        matches!(
            self,
            QueryKind::ArgTemplate | QueryKind::ArgGuide | QueryKind::ArgTrig | QueryKind::ArgTrigPlus
        )
    }

    /// Kinds whose query text contains the mask placeholder.
    pub fn is_masked(self) -> bool {
        matches!(self, QueryKind::MtpTe | QueryKind::MtpQa)
    }

    /// Kinds that substitute gold trigger text into the query.
    pub fn needs_trigger(self) -> bool {
        matches!(self, QueryKind::ArgTrig | QueryKind::ArgTrigPlus)
    }

    /// Kinds answered by the span head (vs the pooled-vector heads).
    pub fn is_span(self) -> bool {
        self.is_argument() || matches!(self, QueryKind::EventTriggerQa | QueryKind::MtpQa)
    }
}

/// The literal mask placeholder inside masked query text.
pub const MASK_TOKEN: &str = "[MASK]";

/// One generated query, addressed to one sentence.
///
/// Field presence tracks the kind: `role` is `Some` exactly for argument
/// kinds, `mask_slot` exactly for masked kinds, and `event` is `None`
/// exactly for masked kinds (one masked query covers every event type).
/// `mask_slot` is the character range of the placeholder in `query_text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryInstance {
    pub sentence_id: String,
    pub kind: QueryKind,
    pub event: Option<String>,
    pub role: Option<String>,
    pub query_text: String,
    pub mask_slot: Option<(usize, usize)>,
}

impl QueryInstance {
    /// Checks the field-presence invariants listed on the type.
    pub fn check(&self) -> Result<()> {
        if self.role.is_some() != self.kind.is_argument() {
            return Err(Error::BadConfig { what: "role must be present exactly for argument kinds" });
        }
        if self.mask_slot.is_some() != self.kind.is_masked() {
            return Err(Error::BadConfig { what: "mask_slot must be present exactly for masked kinds" });
        }
        if self.event.is_none() != self.kind.is_masked() {
            return Err(Error::BadConfig { what: "event must be absent exactly for masked kinds" });
        }
        Ok(())
    }
}

/// Entailment statement for an event: `Hence, an event about {name} happened.`
///
/// With `max_desc_sentences > 0`, the first `min(max_desc_sentences,
/// available)` description sentences follow, space-joined, after one space.
pub fn make_event_statement(event: &EventType, max_desc_sentences: usize) -> String {
    let mut text = alloc::format!("Hence, an event about {} happened.", event.name);
    let take = max_desc_sentences.min(event.description.len());
    for sentence in &event.description[..take] {
        text.push(' ');
        text.push_str(sentence);
    }
    text
}

/// Yes/no question for an event: `Did any event about {name} happen?`
pub fn make_polar_question(event: &EventType) -> String {
    alloc::format!("Did any event about {} happen?", event.name)
}

/// Extractive trigger question: `What is the trigger for {name}?`
pub fn make_event_trigger_question(event: &EventType) -> String {
    alloc::format!("What is the trigger for {}?", event.name)
}

/// Role question in the requested style. `trigger` is the gold trigger text,
/// required by the trigger-conditioned kinds.
pub fn make_arg_question(
    event: &EventType,
    role: &ArgumentRole,
    kind: QueryKind,
    trigger: Option<&str>,
) -> Result<String> {
    let need_trigger = || {
        trigger.ok_or_else(|| Error::MissingTrigger { event: event.name.clone() })
    };
    match kind {
        QueryKind::ArgTemplate => Ok(alloc::format!(
            "Who or what participated as role {} in the event {}?",
            role.role, event.name
        )),
        QueryKind::ArgGuide => role.guide_question.clone().ok_or_else(|| {
            Error::MissingGuideQuestion { event: event.name.clone(), role: role.role.clone() }
        }),
        QueryKind::ArgTrig => Ok(alloc::format!("What is the {} in {}?", role.role, need_trigger()?)),
        QueryKind::ArgTrigPlus => Ok(alloc::format!(
            "What is the {} in event {} triggered by '{}'?",
            role.role,
            event.name,
            need_trigger()?
        )),
        _ => Err(Error::UnsupportedKind { kind: kind.name(), op: "make_arg_question" }),
    }
}

/// Masked query text plus the character range of the placeholder.
pub fn make_masked_query(kind: QueryKind) -> Result<(String, (usize, usize))> {
    let text = match kind {
        QueryKind::MtpTe => "Hence, an event about [MASK] happened.",
        QueryKind::MtpQa => "Did any event about [MASK] happen?",
        _ => return Err(Error::UnsupportedKind { kind: kind.name(), op: "make_masked_query" }),
    };
    let start = text.find(MASK_TOKEN).expect("template contains the placeholder");
    Ok((text.to_string(), (start, start + MASK_TOKEN.len())))
}

/// Expands one sentence into query instances for the requested kinds.
///
/// Ordering is deterministic: kinds in [`QueryKind::ALL`] order, events in
/// ontology order, roles in declaration order. Per kind that yields:
///
/// * one instance per event type for the sentence-level kinds
///   (`TE_STATEMENT`, `EVENT_TRIGGER_QA`, `PQ_EVENT`);
/// * one instance per (gold event type, role) pair for argument kinds,
///   with the trigger taken from the first mention carrying one;
/// * one instance per sentence for the masked kinds.
pub fn expand_queries(
    record: &SentenceRecord,
    ontology: &Ontology,
    kinds: &[QueryKind],
    max_desc_sentences: usize,
) -> Result<Vec<QueryInstance>> {
    let mut out = Vec::new();
    for kind in QueryKind::ALL {
        if !kinds.contains(&kind) {
            continue;
        }
        match kind {
            QueryKind::TeStatement | QueryKind::PqEvent | QueryKind::EventTriggerQa => {
                for event in ontology.events() {
                    let query_text = match kind {
                        QueryKind::TeStatement => make_event_statement(event, max_desc_sentences),
                        QueryKind::PqEvent => make_polar_question(event),
                        _ => make_event_trigger_question(event),
                    };
                    out.push(QueryInstance {
                        sentence_id: record.id.clone(),
                        kind,
                        event: Some(event.name.clone()),
                        role: None,
                        query_text,
                        mask_slot: None,
                    });
                }
            }
            QueryKind::ArgTemplate | QueryKind::ArgGuide | QueryKind::ArgTrig
            | QueryKind::ArgTrigPlus => {
                for event in ontology.events() {
                    if !record.has_event(&event.name) {
                        continue;
                    }
                    let trigger = record.trigger_for(&event.name).map(|s| s.text.as_str());
                    if kind.needs_trigger() && trigger.is_none() {
                        return Err(Error::MissingTrigger { event: event.name.clone() });
                    }
                    for role in &event.arguments {
                        out.push(QueryInstance {
                            sentence_id: record.id.clone(),
                            kind,
                            event: Some(event.name.clone()),
                            role: Some(role.role.clone()),
                            query_text: make_arg_question(event, role, kind, trigger)?,
                            mask_slot: None,
                        });
                    }
                }
            }
            QueryKind::MtpTe | QueryKind::MtpQa => {
                let (query_text, mask_slot) = make_masked_query(kind)?;
                out.push(QueryInstance {
                    sentence_id: record.id.clone(),
                    kind,
                    event: None,
                    role: None,
                    query_text,
                    mask_slot: Some(mask_slot),
                });
            }
        }
    }
    Ok(out)
}

/// Query texts that seed the tokenizer vocabulary: every template instantiated
/// for every event and role, descriptions included, with the literal word
/// "trigger" standing in for trigger text.
pub fn vocabulary_seed_texts(ontology: &Ontology) -> Vec<String> {
    let mut texts = Vec::new();
    for event in ontology.events() {
        texts.push(make_event_statement(event, usize::MAX));
        texts.push(make_polar_question(event));
        texts.push(make_event_trigger_question(event));
        for role in &event.arguments {
            for kind in [QueryKind::ArgTemplate, QueryKind::ArgTrig, QueryKind::ArgTrigPlus] {
                texts.push(
                    make_arg_question(event, role, kind, Some("trigger"))
                        .expect("template kinds cannot fail with a trigger"),
                );
            }
            if role.guide_question.is_some() {
                texts.push(make_arg_question(event, role, QueryKind::ArgGuide, None).unwrap());
            }
        }
    }
    for kind in [QueryKind::MtpTe, QueryKind::MtpQa] {
        texts.push(make_masked_query(kind).unwrap().0);
    }
    texts
}
