//! Score JSONL, one scored (sentence, event) pair per line: `{"sentence_id",
//! "kind", "event", "role", "score", "gold"}`. Event-level families always
//! carry `"role": null`; the kind is the query-family name or `RANDOM` for
//! the baseline.

use std::path::Path;

use eex_core::probing::{EventScore, ScoreKind};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats::{read_jsonl, write_jsonl};

#[derive(Debug, Serialize, Deserialize)]
pub struct ScoreLine {
    pub sentence_id: String,
    pub kind: String,
    pub event: String,
    pub role: Option<String>,
    pub score: f64,
    pub gold: bool,
}

impl From<&EventScore> for ScoreLine {
    fn from(s: &EventScore) -> ScoreLine {
        ScoreLine {
            sentence_id: s.sentence_id.clone(),
            kind: s.kind.name().to_string(),
            event: s.event.clone(),
            role: None,
            score: s.score,
            gold: s.gold,
        }
    }
}

fn from_line(path: &Path, line: ScoreLine) -> Result<EventScore> {
    let kind = ScoreKind::parse(&line.kind)
        .ok_or_else(|| Error::format(path, format!("unknown score kind {:?}", line.kind)))?;
    if !(0.0..=1.0).contains(&line.score) {
        return Err(Error::format(path, format!("score {} outside [0, 1]", line.score)));
    }
    Ok(EventScore {
        sentence_id: line.sentence_id,
        kind,
        event: line.event,
        score: line.score,
        gold: line.gold,
    })
}

/// Loads event scores, rejecting unknown kinds and out-of-range scores.
pub fn load_scores(path: &Path) -> Result<Vec<EventScore>> {
    let lines: Vec<ScoreLine> = read_jsonl(path)?;
    lines.into_iter().map(|line| from_line(path, line)).collect()
}

/// Saves event scores in input order.
pub fn save_scores(path: &Path, scores: &[EventScore]) -> Result<()> {
    let lines: Vec<ScoreLine> = scores.iter().map(ScoreLine::from).collect();
    write_jsonl(path, &lines)
}
