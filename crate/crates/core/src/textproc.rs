//! Deterministic text normalization shared by every metric.
//!
//! The tokenization rule is deliberately small and fully specified so that
//! all metrics see the same token stream: the text is lowercased, split on
//! Unicode whitespace, and every character that is neither alphanumeric nor
//! an apostrophe becomes a standalone single-character token. Apostrophes
//! stay inside tokens, so contractions survive ("don't" is one token).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

mod porter;

pub use porter::porter_stem;

/// Errors from text preprocessing.
#[derive(Debug, Error)]
pub enum TextError {
    #[error("text is empty after trimming whitespace")]
    EmptyText,
    #[error("n-gram order must be at least 1")]
    ZeroOrder,
    #[error("token at position {0} is empty")]
    EmptyToken(usize),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad synonym entry on line {line}: {msg}")]
    BadSynonymRow { line: usize, msg: String },
}

/// A tokenized sentence plus the text it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenSequence {
    tokens: Vec<String>,
    source_text: String,
}

impl TokenSequence {
    /// Build a sequence from pre-split tokens. Every token must be non-empty.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self, TextError> {
        if let Some(pos) = tokens.iter().position(|t| t.is_empty()) {
            return Err(TextError::EmptyToken(pos));
        }
        let source_text = tokens.join(" ");
        Ok(Self {
            tokens,
            source_text,
        })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens re-joined with single spaces.
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

/// Lowercase and split a sentence into tokens.
///
/// Words are maximal runs of alphanumeric characters and apostrophes;
/// every other non-whitespace character is emitted as its own token.
pub fn tokenize(text: &str) -> Result<TokenSequence, TextError> {
    if text.trim().is_empty() {
        return Err(TextError::EmptyText);
    }
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut word = String::new();
    for c in lowered.chars() {
        if c.is_whitespace() {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
        } else if is_word_char(c) {
            word.push(c);
        } else {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            tokens.push(c.to_string());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    Ok(TokenSequence {
        tokens,
        source_text: text.to_string(),
    })
}

/// Contiguous word n-grams with multiplicity. Empty when `n > len`.
pub fn word_ngrams(
    tokens: &TokenSequence,
    n: usize,
) -> Result<HashMap<Vec<String>, usize>, TextError> {
    if n == 0 {
        return Err(TextError::ZeroOrder);
    }
    let mut grams = HashMap::new();
    let toks = tokens.tokens();
    if n <= toks.len() {
        for window in toks.windows(n) {
            *grams.entry(window.to_vec()).or_insert(0) += 1;
        }
    }
    Ok(grams)
}

/// Character n-grams over the text with all whitespace removed, with
/// multiplicity. Characters are Unicode scalar values.
pub fn char_ngrams(text: &str, n: usize) -> Result<HashMap<String, usize>, TextError> {
    if n == 0 {
        return Err(TextError::ZeroOrder);
    }
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut grams = HashMap::new();
    if n <= chars.len() {
        for window in chars.windows(n) {
            *grams.entry(window.iter().collect::<String>()).or_insert(0) += 1;
        }
    }
    Ok(grams)
}

/// A flat word list marking which surface forms count as nouns.
#[derive(Debug, Clone, Default)]
pub struct NounLexicon {
    entries: BTreeSet<String>,
}

impl NounLexicon {
    /// Build from an iterator of words; entries are lowercased and deduped.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        Self { entries }
    }

    /// Load from a file with one word per line; `#` starts a comment.
    pub fn load(path: &Path) -> Result<Self, TextError> {
        let raw = fs::read_to_string(path).map_err(|source| TextError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let words = raw
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect::<Vec<_>>();
        Ok(Self::from_words(words))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}

/// Tokens present in the lexicon, in original order, duplicates kept.
pub fn extract_nouns<'a>(tokens: &'a TokenSequence, lexicon: &NounLexicon) -> Vec<&'a str> {
    tokens
        .tokens()
        .iter()
        .filter(|t| lexicon.contains(t))
        .map(String::as_str)
        .collect()
}

/// Word-to-synonyms map for the synonym matching stage of unigram alignment.
#[derive(Debug, Clone, Default)]
pub struct SynonymMap {
    map: HashMap<String, HashSet<String>>,
}

#[derive(Deserialize)]
struct SynonymRow {
    word: String,
    synonyms: Vec<String>,
}

impl SynonymMap {
    /// Load from JSON Lines: `{"word": str, "synonyms": [str...]}` per line.
    pub fn load(path: &Path) -> Result<Self, TextError> {
        let raw = fs::read_to_string(path).map_err(|source| TextError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut map: HashMap<String, HashSet<String>> = HashMap::new();
        for (idx, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: SynonymRow =
                serde_json::from_str(line).map_err(|e| TextError::BadSynonymRow {
                    line: idx + 1,
                    msg: e.to_string(),
                })?;
            map.entry(row.word.to_lowercase())
                .or_default()
                .extend(row.synonyms.iter().map(|s| s.to_lowercase()));
        }
        Ok(Self { map })
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<S>)>,
        S: AsRef<str>,
    {
        let mut map: HashMap<String, HashSet<String>> = HashMap::new();
        for (w, syns) in pairs {
            map.entry(w.as_ref().to_lowercase())
                .or_default()
                .extend(syns.iter().map(|s| s.as_ref().to_lowercase()));
        }
        Self { map }
    }

    /// True when either word lists the other as a synonym.
    pub fn related(&self, a: &str, b: &str) -> bool {
        self.map.get(a).is_some_and(|s| s.contains(b))
            || self.map.get(b).is_some_and(|s| s.contains(a))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
