//! Event ontology: event types, argument roles, and per-role guide questions.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// One argument slot of an event type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentRole {
    /// Role label, looked up verbatim (case and punctuation preserved).
    pub role: String,
    /// Hand-written question for this role, when one exists.
    pub guide_question: Option<String>,
}

impl ArgumentRole {
    pub fn new(role: impl Into<String>, guide_question: Option<&str>) -> Self {
        ArgumentRole {
            role: role.into(),
            guide_question: guide_question.map(|q| q.to_string()),
        }
    }
}

/// One event type: a name, an ordered description, and its argument roles.
///
/// `description` is a list of sentences; query construction appends a prefix
/// of it to the event statement. Zero roles is valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventType {
    pub name: String,
    pub description: Vec<String>,
    pub arguments: Vec<ArgumentRole>,
}

impl EventType {
    pub fn new(name: impl Into<String>, description: &[&str], arguments: Vec<ArgumentRole>) -> Self {
        EventType {
            name: name.into(),
            description: description.iter().map(|s| s.to_string()).collect(),
            arguments,
        }
    }

    /// Role lookup by exact name.
    pub fn role(&self, role: &str) -> Option<&ArgumentRole> {
        self.arguments.iter().find(|a| a.role == role)
    }
}

/// A validated, immutable set of event types.
///
/// Event order is the declaration order and is load-bearing: query expansion,
/// score files, and reports all iterate events in this order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ontology {
    version: String,
    events: Vec<EventType>,
}

impl Ontology {
    /// Validates and freezes an ontology.
    ///
    /// Rejects empty event or role names and duplicates (events globally,
    /// roles within their event; the same role name under two different
    /// events is fine).
    pub fn new(version: impl Into<String>, events: Vec<EventType>) -> Result<Self> {
        for (i, event) in events.iter().enumerate() {
            if event.name.trim().is_empty() {
                return Err(Error::EmptyLabel { what: "event name" });
            }
            if events[..i].iter().any(|e| e.name == event.name) {
                return Err(Error::DuplicateEvent { name: event.name.clone() });
            }
            for (j, arg) in event.arguments.iter().enumerate() {
                if arg.role.trim().is_empty() {
                    return Err(Error::EmptyLabel { what: "role name" });
                }
                if event.arguments[..j].iter().any(|a| a.role == arg.role) {
                    return Err(Error::DuplicateRole {
                        event: event.name.clone(),
                        role: arg.role.clone(),
                    });
                }
            }
        }
        Ok(Ontology { version: version.into(), events })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Events in declaration order.
    pub fn events(&self) -> &[EventType] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Event lookup by exact name; no case folding, no hyphen normalization.
    pub fn get(&self, name: &str) -> Option<&EventType> {
        self.events.iter().find(|e| e.name == name)
    }

    /// Position of an event in declaration order.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.events.iter().position(|e| e.name == name)
    }

    /// Ordered role list for an event, or an error for an unknown label.
    pub fn roles_for(&self, event: &str) -> Result<&[ArgumentRole]> {
        self.get(event)
            .map(|e| e.arguments.as_slice())
            .ok_or(Error::UnknownEvent { name: event.to_string() })
    }
}

/// Six-event demonstration ontology used by the synthetic-corpus tests, the
/// CLI examples, and the acceptance suite. Every event has at least two
/// roles; two names carry hyphens to exercise verbatim label handling.
pub fn demo_ontology() -> Ontology {
    Ontology::new(
        "demo-1",
        alloc::vec![
            EventType::new(
                "Be-Born",
                &[
                    "A Be-Born Event occurs whenever a PERSON Entity is given birth to.",
                    "The place of birth fills the Place argument.",
                ],
                alloc::vec![
                    ArgumentRole::new("Person", Some("Who is born?")),
                    ArgumentRole::new("Place", Some("Where is the birth?")),
                ],
            ),
            EventType::new(
                "Marry",
                &[
                    "Marry events are official Events, where two people are married under the legal definition.",
                    "The ceremony location fills the Where argument.",
                ],
                alloc::vec![
                    ArgumentRole::new("Person", Some("Who are the married person?")),
                    ArgumentRole::new("Where", Some("Where does the marriage take place?")),
                ],
            ),
            EventType::new(
                "Divorce",
                &[
                    "A Divorce event dissolves a marriage through a legal ruling.",
                    "The deciding court fills the Court argument.",
                ],
                alloc::vec![
                    ArgumentRole::new("Person", Some("Who is divorced?")),
                    ArgumentRole::new("Court", Some("Which court decided the divorce?")),
                ],
            ),
            EventType::new(
                "Attack",
                &[
                    "An Attack event covers a violent act intended to cause harm.",
                    "The instrument used fills the Instrument argument.",
                ],
                alloc::vec![
                    ArgumentRole::new("Attacker", Some("Who is the attacker?")),
                    ArgumentRole::new("Target", Some("Who is attacked?")),
                    ArgumentRole::new("Place", Some("Where did the attack happen?")),
                ],
            ),
            EventType::new(
                "Transport",
                &[
                    "A Transport event moves an artifact or person from one place to another.",
                    "The endpoint fills the Destination argument.",
                ],
                alloc::vec![
                    ArgumentRole::new("Agent", Some("Who arranged the transport?")),
                    ArgumentRole::new("Destination", Some("Where does the transport end?")),
                ],
            ),
            EventType::new(
                "Transfer-Money",
                &[
                    "A Transfer-Money event covers giving, receiving, or lending money.",
                    "The paying side fills the Giver argument.",
                ],
                alloc::vec![
                    ArgumentRole::new("Giver", Some("Who gave the money?")),
                    ArgumentRole::new("Recipient", Some("Who received the money?")),
                ],
            ),
        ],
    )
    .expect("demo ontology is well formed")
}
