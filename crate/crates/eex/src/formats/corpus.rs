//! Corpus JSONL, one sentence per line: `{"id", "text", "split",
//! "events": [{"type", "trigger": {start,end,text}|null,
//! "arguments": [{role,start,end,text}]}]}`. Character offsets, end
//! exclusive.

use std::path::Path;

use eex_core::corpus::{
    validate_corpus, ArgumentMention, EventMention, SentenceRecord, Span, Split,
};
use eex_core::ontology::Ontology;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{read_jsonl, write_jsonl};

#[derive(Debug, Serialize, Deserialize)]
struct SpanLine {
    start: usize,
    end: usize,
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ArgumentLine {
    role: String,
    start: usize,
    end: usize,
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct EventLine {
    #[serde(rename = "type")]
    event: String,
    trigger: Option<SpanLine>,
    #[serde(default)]
    arguments: Vec<ArgumentLine>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordLine {
    id: String,
    text: String,
    split: String,
    #[serde(default)]
    events: Vec<EventLine>,
}

fn from_line(path: &Path, line: RecordLine) -> Result<SentenceRecord> {
    let split = Split::parse(&line.split).ok_or_else(|| {
        Error::format(path, format!("record {:?}: unknown split {:?}", line.id, line.split))
    })?;
    let events = line
        .events
        .into_iter()
        .map(|e| EventMention {
            event: e.event,
            trigger: e.trigger.map(|t| Span::new(t.start, t.end, t.text)),
            arguments: e
                .arguments
                .into_iter()
                .map(|a| ArgumentMention { role: a.role, span: Span::new(a.start, a.end, a.text) })
                .collect(),
        })
        .collect();
    Ok(SentenceRecord { id: line.id, text: line.text, split, events })
}

fn to_line(record: &SentenceRecord) -> RecordLine {
    RecordLine {
        id: record.id.clone(),
        text: record.text.clone(),
        split: record.split.as_str().to_string(),
        events: record
            .events
            .iter()
            .map(|e| EventLine {
                event: e.event.clone(),
                trigger: e.trigger.as_ref().map(|t| SpanLine {
                    start: t.start,
                    end: t.end,
                    text: t.text.clone(),
                }),
                arguments: e
                    .arguments
                    .iter()
                    .map(|a| ArgumentLine {
                        role: a.role.clone(),
                        start: a.span.start,
                        end: a.span.end,
                        text: a.span.text.clone(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Loads a corpus and validates every record against the ontology: span
/// ranges, span texts, and labels are all checked before anything runs.
pub fn load_corpus(path: &Path, ontology: &Ontology) -> Result<Vec<SentenceRecord>> {
    let lines: Vec<RecordLine> = read_jsonl(path)?;
    let records = lines
        .into_iter()
        .map(|line| from_line(path, line))
        .collect::<Result<Vec<_>>>()?;
    validate_corpus(&records, ontology)?;
    Ok(records)
}

/// Saves records in input order with the documented line schema.
pub fn save_corpus(path: &Path, records: &[SentenceRecord]) -> Result<()> {
    let lines: Vec<RecordLine> = records.iter().map(to_line).collect();
    write_jsonl(path, &lines)
}
