//! An answer-keyed encoder for end-to-end pipeline checks.
//!
//! The oracle memorizes, for every (sentence, event) statement and polar
//! question it was built from, whether the event is really present, and
//! encodes the pair as a pooled vector whose first component is +1 or -1
//! accordingly. Paired with [`crate::probing::ProbeHeads::oracle`] the
//! downstream scores are exactly 1.0 and 0.0, so any later stage that loses
//! or mislabels a pair shows up as a broken metric rather than a noisy one.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::{tokenize_pair, Encoder, EncoderOutput, TokenizedPair, Vocabulary};
use crate::corpus::SentenceRecord;
use crate::ontology::Ontology;
use crate::querygen::{make_event_statement, make_polar_question};
use crate::Result;

/// Pooled dimension of the oracle encoder.
pub const ORACLE_DIM: usize = 4;

/// See the module docs. Only statement and polar-question pairs are keyed;
/// any sequence outside the recorded key encodes as "absent".
pub struct OracleEncoder {
    vocab_size: usize,
    key: BTreeMap<Vec<u32>, bool>,
}

impl OracleEncoder {
    /// Builds the answer key over every (record, event) pair, covering the
    /// statement texts at `max_desc_sentences` and the polar questions.
    pub fn from_records(
        records: &[SentenceRecord],
        ontology: &Ontology,
        vocab: &Vocabulary,
        max_desc_sentences: usize,
    ) -> Result<OracleEncoder> {
        let mut key = BTreeMap::new();
        for record in records {
            for event in ontology.events() {
                let gold = record.has_event(&event.name);
                let queries =
                    [make_event_statement(event, max_desc_sentences), make_polar_question(event)];
                for query in &queries {
                    let pair = tokenize_pair(query, &record.text, vocab)?;
                    key.insert(pair.ids, gold);
                }
            }
        }
        Ok(OracleEncoder { vocab_size: vocab.len(), key })
    }
}

impl Encoder for OracleEncoder {
    fn dim(&self) -> usize {
        ORACLE_DIM
    }

    fn encode(&self, pair: &TokenizedPair) -> EncoderOutput {
        let sign = match self.key.get(&pair.ids) {
            Some(true) => 1.0,
            _ => -1.0,
        };
        let mut data = vec![0.0; pair.len() * ORACLE_DIM];
        data[0] = sign;
        EncoderOutput::new(data, ORACLE_DIM).expect("row count times fixed dim")
    }

    fn lm_logits(&self, _pair: &TokenizedPair, _position: usize) -> Vec<f64> {
        vec![0.0; self.vocab_size]
    }
}
