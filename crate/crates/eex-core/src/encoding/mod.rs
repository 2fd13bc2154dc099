//! Tokenization with character alignment and the encoder interface.
//!
//! A query and a sentence become one joint sequence
//! `[CLS] query [SEP] sentence [SEP]` with the query first. The tokenizer is
//! a lowercasing whitespace-and-punctuation splitter over a closed
//! vocabulary; every non-whitespace sentence character belongs to exactly one
//! token, so token spans map back to exact character spans.

mod mock;
mod oracle;
mod tiny;

pub use mock::{MockEncoder, MOCK_DIM};
pub use oracle::{OracleEncoder, ORACLE_DIM};
pub use tiny::{TinyEncoder, TINY_DIM, TINY_FFN_DIM, TINY_MAX_PARAMS};

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::querygen::MASK_TOKEN;
use crate::{Error, Result};

/// Hard cap on the joint sequence length, special tokens included.
pub const MAX_TOKENS: usize = 256;

/// Closed vocabulary with reserved special ids.
///
/// Regular tokens are sorted, so building from the same texts always yields
/// the same id assignment. Lookup of an out-of-vocabulary token returns
/// [`Vocabulary::UNK`] rather than failing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    id_to_token: Vec<String>,
    token_to_id: BTreeMap<String, u32>,
}

impl Vocabulary {
    pub const CLS: u32 = 0;
    pub const SEP: u32 = 1;
    pub const MASK: u32 = 2;
    pub const UNK: u32 = 3;

    const SPECIALS: [&'static str; 4] = ["[CLS]", "[SEP]", "[MASK]", "[UNK]"];

    /// Builds a vocabulary from raw texts (corpus sentences plus query seeds).
    pub fn build<'a>(texts: impl IntoIterator<Item = &'a str>) -> Vocabulary {
        let mut words = alloc::collections::BTreeSet::new();
        for text in texts {
            for piece in split_tokens(text) {
                if piece.text != MASK_TOKEN {
                    words.insert(piece.text);
                }
            }
        }
        let mut id_to_token: Vec<String> =
            Self::SPECIALS.iter().map(|s| s.to_string()).collect();
        id_to_token.extend(words);
        let token_to_id = id_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary { id_to_token, token_to_id }
    }

    /// Rebuilds a vocabulary from a stored token list (adapter directories).
    ///
    /// The list must start with the four specials in reserved order and
    /// contain no duplicates.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Vocabulary> {
        if tokens.len() < Self::SPECIALS.len()
            || tokens[..Self::SPECIALS.len()] != Self::SPECIALS
        {
            return Err(Error::BadConfig { what: "vocabulary must open with [CLS] [SEP] [MASK] [UNK]" });
        }
        let mut token_to_id = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if token_to_id.insert(t.clone(), i as u32).is_some() {
                return Err(Error::BadConfig { what: "vocabulary holds a duplicate token" });
            }
        }
        Ok(Vocabulary { id_to_token: tokens, token_to_id })
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Id for a token, [`Vocabulary::UNK`] when absent.
    pub fn id(&self, token: &str) -> u32 {
        self.token_to_id.get(token).copied().unwrap_or(Self::UNK)
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.id_to_token.get(id as usize).map(|s| s.as_str())
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    /// Ids of a label's word and punctuation tokens, in order. Used to score
    /// event names against masked-token logits.
    pub fn label_token_ids(&self, label: &str) -> Vec<u32> {
        split_tokens(label).map(|p| self.id(&p.text)).collect()
    }
}

/// One surface token: character range plus lowercased text.
struct Piece {
    start: usize,
    end: usize,
    text: String,
}

/// Splits text into word and punctuation pieces with character offsets.
///
/// Words are maximal alphanumeric runs, lowercased; every other
/// non-whitespace character is its own piece. The literal `[MASK]` survives
/// as one piece wherever it appears.
fn split_tokens(text: &str) -> impl Iterator<Item = Piece> + '_ {
    let chars: Vec<char> = text.chars().collect();
    let mask_chars: Vec<char> = MASK_TOKEN.chars().collect();
    let mut pieces = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if chars[i..].starts_with(&mask_chars) {
            pieces.push(Piece { start: i, end: i + mask_chars.len(), text: MASK_TOKEN.to_string() });
            i += mask_chars.len();
        } else if c.is_alphanumeric() {
            let start = i;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            let text: String = chars[start..i].iter().flat_map(|c| c.to_lowercase()).collect();
            pieces.push(Piece { start, end: i, text });
        } else {
            pieces.push(Piece { start: i, end: i + 1, text: c.to_lowercase().collect() });
            i += 1;
        }
    }
    pieces.into_iter()
}

/// A tokenized `[CLS] query [SEP] sentence [SEP]` pair.
///
/// Segment 0 covers `[CLS]`, the query, and the first `[SEP]`; segment 1
/// covers the sentence tokens and the final `[SEP]`. `sentence_spans[i]` is
/// the character range (in the sentence string) of sentence token `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedPair {
    pub ids: Vec<u32>,
    pub segments: Vec<u8>,
    /// True where the token also occurs in the other segment. Only tokens
    /// holding at least one alphanumeric character can match, so shared
    /// punctuation stays silent; specials and the unknown id never match.
    pub match_flags: Vec<bool>,
    /// Index of the first sentence token in `ids`.
    pub sentence_start: usize,
    /// Number of sentence tokens (the final `[SEP]` excluded).
    pub sentence_len: usize,
    /// Character spans of the sentence tokens.
    pub sentence_spans: Vec<(usize, usize)>,
    /// Position of the `[MASK]` token in `ids`, when the query carries one.
    pub mask_position: Option<usize>,
    /// Sentence tokens were dropped on the right to fit [`MAX_TOKENS`].
    pub truncated: bool,
}

impl TokenizedPair {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ids of the sentence tokens.
    pub fn sentence_ids(&self) -> &[u32] {
        &self.ids[self.sentence_start..self.sentence_start + self.sentence_len]
    }

    /// Sentence-token index holding the given sentence character, if any.
    pub fn char_to_token(&self, ch: usize) -> Option<usize> {
        self.sentence_spans.iter().position(|&(s, e)| s <= ch && ch < e)
    }

    /// Inclusive sentence-token range covering a character span, if any part
    /// of the span survives tokenization (and truncation).
    pub fn char_span_to_tokens(&self, start: usize, end: usize) -> Option<(usize, usize)> {
        let first = self
            .sentence_spans
            .iter()
            .position(|&(s, e)| e > start && s < end)?;
        let last = self
            .sentence_spans
            .iter()
            .rposition(|&(s, e)| e > start && s < end)?;
        Some((first, last))
    }

    /// Character span covered by an inclusive sentence-token range.
    pub fn token_span_to_chars(&self, first: usize, last: usize) -> (usize, usize) {
        (self.sentence_spans[first].0, self.sentence_spans[last].1)
    }
}

/// Tokenizes a (query, sentence) pair into the joint sequence.
///
/// Both texts must be non-empty after trimming. When the joint sequence
/// would exceed [`MAX_TOKENS`], sentence tokens are dropped from the right
/// and the pair is flagged as truncated; query tokens are never dropped. A
/// query so long that no sentence token fits is an error.
pub fn tokenize_pair(query: &str, sentence: &str, vocab: &Vocabulary) -> Result<TokenizedPair> {
    if query.trim().is_empty() {
        return Err(Error::EmptyText { what: "query" });
    }
    if sentence.trim().is_empty() {
        return Err(Error::EmptyText { what: "sentence" });
    }

    let query_pieces: Vec<Piece> = split_tokens(query).collect();
    let mut sentence_pieces: Vec<Piece> = split_tokens(sentence).collect();

    let budget = MAX_TOKENS.saturating_sub(3 + query_pieces.len());
    if budget == 0 {
        return Err(Error::SentenceTruncatedAway);
    }
    let truncated = sentence_pieces.len() > budget;
    sentence_pieces.truncate(budget);

    let mut ids = Vec::with_capacity(3 + query_pieces.len() + sentence_pieces.len());
    let mut segments = Vec::with_capacity(ids.capacity());
    let mut mask_position = None;

    ids.push(Vocabulary::CLS);
    segments.push(0);
    for piece in &query_pieces {
        if piece.text == MASK_TOKEN {
            mask_position = Some(ids.len());
        }
        ids.push(vocab.id(&piece.text));
        segments.push(0);
    }
    ids.push(Vocabulary::SEP);
    segments.push(0);

    let sentence_start = ids.len();
    let mut sentence_spans = Vec::with_capacity(sentence_pieces.len());
    for piece in &sentence_pieces {
        ids.push(vocab.id(&piece.text));
        segments.push(1);
        sentence_spans.push((piece.start, piece.end));
    }
    ids.push(Vocabulary::SEP);
    segments.push(1);

    let match_flags = cross_segment_matches(&ids, &segments, vocab);

    Ok(TokenizedPair {
        ids,
        segments,
        match_flags,
        sentence_start,
        sentence_len: sentence_pieces.len(),
        sentence_spans,
        mask_position,
        truncated,
    })
}

/// See [`TokenizedPair::match_flags`].
fn cross_segment_matches(ids: &[u32], segments: &[u8], vocab: &Vocabulary) -> Vec<bool> {
    let mut by_segment = [alloc::collections::BTreeSet::new(), alloc::collections::BTreeSet::new()];
    for (&id, &seg) in ids.iter().zip(segments) {
        if id > Vocabulary::UNK {
            by_segment[seg as usize].insert(id);
        }
    }
    ids.iter()
        .zip(segments)
        .map(|(&id, &seg)| {
            id > Vocabulary::UNK
                && by_segment[1 - seg as usize].contains(&id)
                && vocab
                    .token(id)
                    .is_some_and(|t| t.chars().any(|c| c.is_alphanumeric()))
        })
        .collect()
}

/// Dense per-token encoder output, row-major `[len x dim]`.
///
/// The pooled vector is the position-0 (classifier token) row; [`Self::pooled`]
/// returns exactly that row, so the two views can never disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderOutput {
    data: Vec<f64>,
    dim: usize,
}

impl EncoderOutput {
    pub fn new(data: Vec<f64>, dim: usize) -> Result<EncoderOutput> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::DimMismatch {
                what: "encoder output",
                expected: dim.max(1),
                found: data.len(),
            });
        }
        Ok(EncoderOutput { data, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of token rows.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn token(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// The classifier-token row.
    pub fn pooled(&self) -> &[f64] {
        self.token(0)
    }

    /// Rows for the sentence tokens of `pair`.
    pub fn sentence_rows<'a>(&'a self, pair: &TokenizedPair) -> Vec<&'a [f64]> {
        (0..pair.sentence_len)
            .map(|i| self.token(pair.sentence_start + i))
            .collect()
    }
}

/// Named parameter tensor shape, for checkpoints and optimizer bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub shape: [usize; 2],
}

impl ParamSpec {
    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A token-sequence encoder.
///
/// Implementations must be deterministic: the same pair always encodes to
/// the same output. Trainable encoders expose a flat parameter vector
/// (concatenating the [`Encoder::param_specs`] tensors in order) and a
/// matching gradient; fixed encoders leave the default empty
/// implementations.
pub trait Encoder {
    fn dim(&self) -> usize;

    /// Encodes the joint sequence into per-token vectors.
    fn encode(&self, pair: &TokenizedPair) -> EncoderOutput;

    /// Vocabulary logits for the token at `position` (masked-token probing).
    fn lm_logits(&self, pair: &TokenizedPair, position: usize) -> Vec<f64>;

    fn param_specs(&self) -> Vec<ParamSpec> {
        Vec::new()
    }

    fn num_params(&self) -> usize {
        self.param_specs().iter().map(|s| s.len()).sum()
    }

    fn params(&self) -> Vec<f64> {
        Vec::new()
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.is_empty() {
            Ok(())
        } else {
            Err(Error::DimMismatch { what: "encoder parameters", expected: 0, found: params.len() })
        }
    }

    /// Gradient of a scalar loss with respect to the parameters, given the
    /// loss gradient for every output row (`d_output` is `[len x dim]`
    /// row-major, pooled-gradient already folded into row 0). Fixed encoders
    /// return an empty vector.
    fn param_grads(&self, pair: &TokenizedPair, d_output: &[f64]) -> Vec<f64> {
        let _ = (pair, d_output);
        Vec::new()
    }
}
