//! Sentence <-> bag-of-words conversion and the rule-based word orderer.
//!
//! The ordering rules are a small reconstruction of the usual text-adventure
//! command grammar: verbs, then directions, then the direct object, then
//! prepositions, then any remaining objects. Scoring never depends on the
//! surface order; it only makes logs readable.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::dictionary::EmbeddingDictionary;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::BagOfWords;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Verb,
    Object,
    Direction,
    Preposition,
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verb" => Ok(Tag::Verb),
            "object" | "noun" => Ok(Tag::Object),
            "direction" => Ok(Tag::Direction),
            "preposition" => Ok(Tag::Preposition),
            other => Err(Error::config(format!("unknown tag {other:?}"))),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Verb => "verb",
            Tag::Object => "object",
            Tag::Direction => "direction",
            Tag::Preposition => "preposition",
        })
    }
}

/// Part-of-speech tags per token. A token listed with several tags is a
/// homograph.
#[derive(Debug, Clone, Default)]
pub struct WordLexicon {
    tags: HashMap<String, Vec<Tag>>,
}

impl WordLexicon {
    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, Tag)>) -> Self {
        let mut tags: HashMap<String, Vec<Tag>> = HashMap::new();
        for (tok, tag) in pairs {
            let entry = tags.entry(tok.into().to_lowercase()).or_default();
            if !entry.contains(&tag) {
                entry.push(tag);
            }
        }
        Self { tags }
    }

    /// Parses `<token> <tag>` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [tok, tag] = fields[..] else {
                return Err(Error::config(format!("lexicon line {}: expected `<token> <tag>`", i + 1)));
            };
            let tag = tag.parse::<Tag>().map_err(|e| Error::config(format!("lexicon line {}: {e}", i + 1)))?;
            pairs.push((tok.to_owned(), tag));
        }
        Ok(Self::from_pairs(pairs))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Every lexicon token must be a dictionary word.
    pub fn check_against<T: Real>(&self, dict: &EmbeddingDictionary<T>) -> Result<()> {
        let mut missing: Vec<&String> = self.tags.keys().filter(|t| dict.index_of(t).is_none()).collect();
        missing.sort();
        match missing.first() {
            Some(t) => Err(Error::UnknownToken((*t).clone())),
            None => Ok(()),
        }
    }

    pub fn tags(&self, token: &str) -> &[Tag] {
        self.tags.get(token).map_or(&[], Vec::as_slice)
    }

    /// Tokens carrying more than one tag, sorted.
    pub fn homographs(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.tags.iter().filter(|(_, t)| t.len() > 1).map(|(w, _)| w.as_str()).collect();
        out.sort_unstable();
        out
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// Lowercases, splits on whitespace and counts dictionary words.
pub fn sentence_to_bow<T: Real>(sentence: &str, dict: &EmbeddingDictionary<T>) -> Result<BagOfWords> {
    let lowered = sentence.to_lowercase();
    let mut indices = Vec::new();
    for tok in lowered.split_whitespace() {
        let j = dict.index_of(tok).ok_or_else(|| Error::UnknownToken(tok.to_owned()))?;
        indices.push(j);
    }
    if indices.is_empty() {
        return Err(Error::domain("empty sentence"));
    }
    BagOfWords::from_indices(dict.len(), indices)
}

/// Orders the words of `bow` into a command.
///
/// Verbs come first, then directions, then the first object, then
/// prepositions, then the remaining objects; ties within a class follow
/// dictionary order. A homograph that can be a verb is read as the verb
/// only when the bag holds no other verb.
pub fn order_words<T: Real>(bow: &BagOfWords, lexicon: &WordLexicon, dict: &EmbeddingDictionary<T>) -> Result<String> {
    if bow.is_empty() {
        return Err(Error::domain("cannot order an empty bag of words"));
    }
    let mut tagged: Vec<(usize, u32, Option<Tag>)> = Vec::with_capacity(bow.support_len());
    for (j, c) in bow.iter() {
        let word = dict.word(j);
        let tags = lexicon.tags(word);
        match tags {
            [] => return Err(Error::Untagged(word.to_owned())),
            [only] => tagged.push((j, c, Some(*only))),
            _ => tagged.push((j, c, None)),
        }
    }
    let mut have_verb = tagged.iter().any(|&(_, _, t)| t == Some(Tag::Verb));
    for entry in tagged.iter_mut().filter(|e| e.2.is_none()) {
        let tags = lexicon.tags(dict.word(entry.0));
        let tag = if tags.contains(&Tag::Verb) && !have_verb {
            have_verb = true;
            Tag::Verb
        } else {
            *tags.iter().find(|&&t| t != Tag::Verb).unwrap_or(&tags[0])
        };
        entry.2 = Some(tag);
    }

    let of = |tag: Tag| tagged.iter().filter(move |e| e.2 == Some(tag)).map(|&(j, c, _)| (j, c));
    let mut objects = of(Tag::Object);
    let direct = objects.next();
    let sequence = of(Tag::Verb).chain(of(Tag::Direction)).chain(direct).chain(of(Tag::Preposition)).chain(objects);

    let mut words = Vec::with_capacity(bow.total() as usize);
    for (j, c) in sequence {
        for _ in 0..c {
            words.push(dict.word(j));
        }
    }
    Ok(words.join(" "))
}
