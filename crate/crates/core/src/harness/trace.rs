use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dictionary::EmbeddingDictionary;
use crate::error::{Error, Result};
use crate::language::sentence_to_bow;
use crate::scalar::Real;
use crate::signal::BagOfWords;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(rename = "obs")]
    pub observation: String,
    /// Gold command for this step.
    pub action: String,
    pub reward: f64,
}

/// A scripted walkthrough: the demonstrated command and reward at each step.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestTrace {
    pub name: String,
    pub steps: Vec<TraceStep>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    name: String,
}

impl QuestTrace {
    pub fn new(name: impl Into<String>, steps: Vec<TraceStep>) -> Result<Self> {
        let trace = Self { name: name.into(), steps };
        if trace.steps.is_empty() {
            return Err(Error::config(format!("trace {:?} has no steps", trace.name)));
        }
        if let Some(i) = trace.steps.iter().position(|s| !s.reward.is_finite()) {
            return Err(Error::config(format!("trace {:?}: step {i} has a non-finite reward", trace.name)));
        }
        Ok(trace)
    }

    /// JSON Lines: a `{"name": ..}` header, then one
    /// `{"obs": .., "action": .., "reward": ..}` object per step.
    pub fn parse_jsonl(text: &str, path: &Path) -> Result<Self> {
        let load_err = |line: usize, message: String| Error::Load { path: path.to_path_buf(), line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or_else(|| load_err(1, "empty trace file".into()))?;
        let header: Header =
            serde_json::from_str(header).map_err(|e| load_err(hline + 1, format!("bad header: {e}")))?;
        let mut steps = Vec::new();
        for (i, line) in lines {
            let step: TraceStep = serde_json::from_str(line).map_err(|e| load_err(i + 1, e.to_string()))?;
            steps.push(step);
        }
        Self::new(header.name, steps)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_jsonl(&text, path)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::json!({ "name": self.name }).to_string();
        out.push('\n');
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("steps serialize"));
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.reward).sum()
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }

    /// Gold bag of words per step; fails on the first untokenizable action.
    pub fn gold_bows<T: Real>(&self, dict: &EmbeddingDictionary<T>) -> Result<Vec<BagOfWords>> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                sentence_to_bow(&s.action, dict)
                    .map_err(|e| Error::config(format!("trace {:?} step {i} ({:?}): {e}", self.name, s.action)))
            })
            .collect()
    }

    /// Distinct gold bags in order of first appearance.
    pub fn action_pool<T: Real>(&self, dict: &EmbeddingDictionary<T>) -> Result<Vec<BagOfWords>> {
        let mut pool: Vec<BagOfWords> = Vec::new();
        for b in self.gold_bows(dict)? {
            if !pool.contains(&b) {
                pool.push(b);
            }
        }
        Ok(pool)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"{"name": "tiny"}
{"obs": "West of House", "action": "north", "reward": 0}

{"obs": "Behind House", "action": "open window", "reward": 10.5}
"#;

    #[test]
    fn parses_jsonl() {
        let t = QuestTrace::parse_jsonl(TEXT, Path::new("t.jsonl")).unwrap();
        assert_eq!(t.name, "tiny");
        assert_eq!(t.len(), 2);
        assert_eq!(t.steps[1].action, "open window");
        assert_eq!(t.total_reward(), 10.5);
        let again = QuestTrace::parse_jsonl(&t.to_jsonl(), Path::new("t.jsonl")).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn rejects_bad_files() {
        let p = Path::new("t.jsonl");
        assert!(QuestTrace::parse_jsonl("", p).is_err());
        assert!(QuestTrace::parse_jsonl("{\"name\": \"x\"}\n", p).is_err());
        match QuestTrace::parse_jsonl("{\"name\": \"x\"}\n{\"obs\": \"\"}\n", p) {
            Err(Error::Load { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(QuestTrace::parse_jsonl("{\"obs\": \"a\", \"action\": \"b\", \"reward\": 0}\n", p).is_err());
    }
}
