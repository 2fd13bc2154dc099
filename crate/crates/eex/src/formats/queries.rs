//! Query JSONL, one generated query per line: `{"sentence_id", "kind",
//! "event", "role", "query_text", "mask_start", "mask_end"}`. `event` is
//! null for masked kinds, `role` null outside argument kinds, and the mask
//! offsets null outside masked kinds.

use std::path::Path;

use eex_core::querygen::{QueryInstance, QueryKind};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{read_jsonl, write_jsonl};

#[derive(Debug, Serialize, Deserialize)]
pub struct QueryLine {
    pub sentence_id: String,
    pub kind: String,
    pub event: Option<String>,
    pub role: Option<String>,
    pub query_text: String,
    pub mask_start: Option<usize>,
    pub mask_end: Option<usize>,
}

impl From<&QueryInstance> for QueryLine {
    fn from(q: &QueryInstance) -> QueryLine {
        QueryLine {
            sentence_id: q.sentence_id.clone(),
            kind: q.kind.name().to_string(),
            event: q.event.clone(),
            role: q.role.clone(),
            query_text: q.query_text.clone(),
            mask_start: q.mask_slot.map(|(s, _)| s),
            mask_end: q.mask_slot.map(|(_, e)| e),
        }
    }
}

fn from_line(path: &Path, line: QueryLine) -> Result<QueryInstance> {
    let kind = QueryKind::parse(&line.kind)
        .ok_or_else(|| Error::format(path, format!("unknown query kind {:?}", line.kind)))?;
    let mask_slot = match (line.mask_start, line.mask_end) {
        (Some(s), Some(e)) => Some((s, e)),
        (None, None) => None,
        _ => {
            return Err(Error::format(path, "mask_start and mask_end must appear together"));
        }
    };
    let instance = QueryInstance {
        sentence_id: line.sentence_id,
        kind,
        event: line.event,
        role: line.role,
        query_text: line.query_text,
        mask_slot,
    };
    instance.check()?;
    Ok(instance)
}

/// Loads queries, re-checking the per-kind field-presence invariants.
pub fn load_queries(path: &Path) -> Result<Vec<QueryInstance>> {
    let lines: Vec<QueryLine> = read_jsonl(path)?;
    lines.into_iter().map(|line| from_line(path, line)).collect()
}

/// Saves queries in input order.
pub fn save_queries(path: &Path, queries: &[QueryInstance]) -> Result<()> {
    let lines: Vec<QueryLine> = queries.iter().map(QueryLine::from).collect();
    write_jsonl(path, &lines)
}
