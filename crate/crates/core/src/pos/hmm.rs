use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{PosError, TagSequence};

/// Emission probability assumed for a word outside the vocabulary, for
/// every tag.
pub const UNKNOWN_WORD_PROB: f64 = 1e-6;

const ROW_TOLERANCE: f64 = 1e-9;

/// Hidden Markov model over tags, stored densely.
///
/// The JSON form is
/// `{tags, vocab, initial: {tag: p}, transition: {tag: {tag: p}}, emission: {tag: {word: p}}}`;
/// missing entries are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HmmFile", into = "HmmFile")]
pub struct HmmModel {
    tags: Vec<String>,
    vocab: Vec<String>,
    word_index: HashMap<String, usize>,
    initial: Vec<f64>,
    /// Row-major `tags × tags`, `transition[i * n + j] = P(j | i)`.
    transition: Vec<f64>,
    /// Row-major `tags × vocab`.
    emission: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HmmFile {
    tags: Vec<String>,
    vocab: Vec<String>,
    initial: BTreeMap<String, f64>,
    transition: BTreeMap<String, BTreeMap<String, f64>>,
    emission: BTreeMap<String, BTreeMap<String, f64>>,
}

impl HmmModel {
    /// Builds a model from dense tables. `transition` is `tags × tags`,
    /// `emission` is `tags × vocab`.
    pub fn new(
        tags: Vec<String>,
        vocab: Vec<String>,
        initial: Vec<f64>,
        transition: Vec<Vec<f64>>,
        emission: Vec<Vec<f64>>,
    ) -> Result<Self, PosError> {
        let n = tags.len();
        let v = vocab.len();
        let mut problems = Vec::new();
        if n == 0 {
            problems.push("no tags".to_string());
        }
        if v == 0 {
            problems.push("empty vocabulary".to_string());
        }
        if let Some(d) = first_duplicate(&tags) {
            problems.push(format!("duplicate tag {d:?}"));
        }
        if let Some(d) = first_duplicate(&vocab) {
            problems.push(format!("duplicate word {d:?}"));
        }
        check_row("initial", &initial, n, &mut problems);
        if transition.len() != n {
            problems.push(format!("transition has {} rows, expected {n}", transition.len()));
        }
        if emission.len() != n {
            problems.push(format!("emission has {} rows, expected {n}", emission.len()));
        }
        for (tag, row) in tags.iter().zip(&transition) {
            check_row(&format!("transition[{tag}]"), row, n, &mut problems);
        }
        for (tag, row) in tags.iter().zip(&emission) {
            check_row(&format!("emission[{tag}]"), row, v, &mut problems);
        }
        if !problems.is_empty() {
            return Err(PosError::InvalidModel(problems));
        }
        let word_index = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(HmmModel {
            tags,
            vocab,
            word_index,
            initial,
            transition: transition.concat(),
            emission: emission.concat(),
        })
    }

    /// Parses the JSON form. Structural problems come back as
    /// [`PosError::InvalidModel`] rather than a JSON error.
    pub fn from_json(text: &str) -> Result<Self, PosError> {
        let file: HmmFile = serde_json::from_str(text)?;
        HmmModel::try_from(file)
    }

    pub fn num_tags(&self) -> usize {
        self.tags.len()
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn word_index(&self, word: &str) -> Option<usize> {
        self.word_index.get(word).copied()
    }

    pub fn tag_index(&self, tag: &str) -> Option<usize> {
        self.tags.iter().position(|t| t == tag)
    }

    pub fn initial(&self, tag: usize) -> f64 {
        self.initial[tag]
    }

    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.transition[from * self.tags.len() + to]
    }

    /// `P(word | tag)`; `None` is an out-of-vocabulary word.
    pub fn emission(&self, tag: usize, word: Option<usize>) -> f64 {
        match word {
            Some(w) => self.emission[tag * self.vocab.len() + w],
            None => UNKNOWN_WORD_PROB,
        }
    }

    pub fn tag_names(&self, seq: &TagSequence) -> Vec<&str> {
        seq.iter().map(|&t| self.tags[t].as_str()).collect()
    }
}

fn first_duplicate(items: &[String]) -> Option<&str> {
    let mut seen = HashSet::new();
    items.iter().find(|s| !seen.insert(s.as_str())).map(String::as_str)
}

fn check_row(name: &str, row: &[f64], len: usize, problems: &mut Vec<String>) {
    if row.len() != len {
        problems.push(format!("{name} has {} entries, expected {len}", row.len()));
        return;
    }
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        problems.push(format!("{name} has a negative or non-finite probability"));
        return;
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_TOLERANCE {
        problems.push(format!("{name} sums to {sum}"));
    }
}

impl TryFrom<HmmFile> for HmmModel {
    type Error = PosError;

    fn try_from(f: HmmFile) -> Result<Self, PosError> {
        let mut problems = Vec::new();
        let known_tags: HashSet<&str> = f.tags.iter().map(String::as_str).collect();
        let known_words: HashSet<&str> = f.vocab.iter().map(String::as_str).collect();
        let mut unknown = |what: &str, key: &str, known: &HashSet<&str>| {
            if !known.contains(key) {
                problems.push(format!("{what} refers to unknown {key:?}"));
            }
        };
        for k in f.initial.keys() {
            unknown("initial", k, &known_tags);
        }
        for (from, row) in &f.transition {
            unknown("transition", from, &known_tags);
            for to in row.keys() {
                unknown("transition", to, &known_tags);
            }
        }
        for (tag, row) in &f.emission {
            unknown("emission", tag, &known_tags);
            for w in row.keys() {
                unknown("emission", w, &known_words);
            }
        }
        if !problems.is_empty() {
            return Err(PosError::InvalidModel(problems));
        }
        let lookup = |m: Option<&BTreeMap<String, f64>>, keys: &[String]| -> Vec<f64> {
            keys.iter()
                .map(|k| m.and_then(|m| m.get(k)).copied().unwrap_or(0.0))
                .collect()
        };
        let initial = lookup(Some(&f.initial), &f.tags);
        let transition = f.tags.iter().map(|t| lookup(f.transition.get(t), &f.tags)).collect();
        let emission = f.tags.iter().map(|t| lookup(f.emission.get(t), &f.vocab)).collect();
        HmmModel::new(f.tags, f.vocab, initial, transition, emission)
    }
}

impl From<HmmModel> for HmmFile {
    fn from(m: HmmModel) -> Self {
        let n = m.tags.len();
        let v = m.vocab.len();
        let sparse = |row: &[f64], keys: &[String]| -> BTreeMap<String, f64> {
            keys.iter()
                .zip(row)
                .filter(|(_, p)| **p != 0.0)
                .map(|(k, p)| (k.clone(), *p))
                .collect()
        };
        HmmFile {
            initial: sparse(&m.initial, &m.tags),
            transition: (0..n)
                .map(|i| (m.tags[i].clone(), sparse(&m.transition[i * n..(i + 1) * n], &m.tags)))
                .collect(),
            emission: (0..n)
                .map(|i| (m.tags[i].clone(), sparse(&m.emission[i * v..(i + 1) * v], &m.vocab)))
                .collect(),
            tags: m.tags,
            vocab: m.vocab,
        }
    }
}

/// One sentence per non-blank line, whitespace tokenized.
pub fn parse_sentences(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Gold tags, one sentence per non-blank line, in the same order as the
/// sentence file.
pub fn parse_gold(text: &str, hmm: &HmmModel) -> Result<Vec<TagSequence>, PosError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let seq = line
            .split_whitespace()
            .map(|t| {
                hmm.tag_index(t).ok_or_else(|| PosError::UnknownTag {
                    line: i + 1,
                    tag: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push(TagSequence::new(seq));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MODEL: &str = r#"{
        "tags": ["N", "V"],
        "vocab": ["dogs", "run"],
        "initial": {"N": 0.8, "V": 0.2},
        "transition": {"N": {"N": 0.3, "V": 0.7}, "V": {"N": 0.6, "V": 0.4}},
        "emission": {"N": {"dogs": 0.9, "run": 0.1}, "V": {"dogs": 0.2, "run": 0.8}}
    }"#;

    #[test]
    fn json_round_trip() {
        let m = HmmModel::from_json(MODEL).unwrap();
        assert_eq!(m.num_tags(), 2);
        assert_eq!(m.transition(0, 1), 0.7);
        assert_eq!(m.emission(1, m.word_index("run")), 0.8);
        assert_eq!(m.emission(1, None), UNKNOWN_WORD_PROB);
        let back: HmmModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rows_must_sum_to_one() {
        let bad = MODEL.replace("\"V\": 0.7", "\"V\": 0.71");
        match HmmModel::from_json(&bad) {
            Err(PosError::InvalidModel(p)) => assert!(p[0].contains("transition[N]"), "{p:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_reported() {
        let bad = MODEL.replace("\"run\": 0.8", "\"runs\": 0.8");
        assert!(matches!(HmmModel::from_json(&bad), Err(PosError::InvalidModel(_))));
    }

    #[test]
    fn gold_parsing() {
        let m = HmmModel::from_json(MODEL).unwrap();
        let g = parse_gold("N V\n\nV\n", &m).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].as_slice(), &[0, 1]);
        assert!(matches!(
            parse_gold("N X", &m),
            Err(PosError::UnknownTag { line: 1, .. })
        ));
        assert_eq!(parse_sentences("a b\n  \nc\n"), vec![vec!["a", "b"], vec!["c"]]);
    }
}
