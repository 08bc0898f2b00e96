use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::{HmmModel, PosError, QuantizedHmm};
use crate::adder::AdderModel;

/// Operand width the tagger's adders must have.
pub const TAGGER_WIDTH: u32 = 16;

const CEILING: u32 = (1 << TAGGER_WIDTH) - 1;

/// Tag indices, one per word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TagSequence(Vec<usize>);

impl TagSequence {
    pub fn new(tags: Vec<usize>) -> Self {
        TagSequence(tags)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for TagSequence {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

struct Forward {
    /// Normalized cost vector after each word.
    steps: Vec<Vec<u32>>,
    backptr: Vec<Vec<usize>>,
}

fn forward<S: AsRef<str>>(q: &QuantizedHmm, sentence: &[S], adder: &AdderModel) -> Forward {
    let n = q.num_tags();
    let sat = |a: u32, b: u32| adder.add(a, b).min(CEILING);
    let words: Vec<Option<usize>> = sentence.iter().map(|w| q.model().word_index(w.as_ref())).collect();

    let mut delta: Vec<u32> = (0..n)
        .map(|t| sat(q.initial_cost(t), q.emission_cost(t, words[0])))
        .collect();
    normalize(&mut delta);
    let mut steps = vec![delta.clone()];
    let mut backptr = Vec::with_capacity(words.len().saturating_sub(1));
    for &w in &words[1..] {
        let mut next = vec![0u32; n];
        let mut bp = vec![0usize; n];
        for t in 0..n {
            let emit = q.emission_cost(t, w);
            let mut best = u32::MAX;
            for (prev, &d) in delta.iter().enumerate() {
                let cand = sat(sat(d, q.transition_cost(prev, t)), emit);
                if cand < best {
                    best = cand;
                    bp[t] = prev;
                }
            }
            next[t] = best;
        }
        normalize(&mut next);
        delta = next;
        steps.push(delta.clone());
        backptr.push(bp);
    }
    Forward { steps, backptr }
}

fn normalize(v: &mut [u32]) {
    let m = v.iter().copied().min().unwrap_or(0);
    v.iter_mut().for_each(|x| *x -= m);
}

/// Index of the first minimum (or maximum with `greater`).
fn first_best<T: PartialOrd + Copy>(v: &[T], better: impl Fn(T, T) -> bool) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if better(v[i], v[best]) {
            best = i;
        }
    }
    best
}

fn traceback(last: usize, backptr: &[Vec<usize>]) -> TagSequence {
    let mut tags = vec![last];
    let mut cur = last;
    for bp in backptr.iter().rev() {
        cur = bp[cur];
        tags.push(cur);
    }
    tags.reverse();
    TagSequence(tags)
}

/// Fixed-point min-cost Viterbi tagging. Every addition goes through
/// `adder` and saturates at `2^16 - 1`; ties go to the lowest tag index.
pub fn tag<S: AsRef<str>>(q: &QuantizedHmm, sentence: &[S], adder: &AdderModel) -> Result<TagSequence, PosError> {
    if adder.width() != TAGGER_WIDTH {
        return Err(PosError::AdderWidth {
            adder: adder.name().to_string(),
            width: adder.width(),
        });
    }
    if sentence.is_empty() {
        return Err(PosError::EmptySentence);
    }
    let f = forward(q, sentence, adder);
    let last = first_best(f.steps.last().unwrap(), |a, b| a < b);
    Ok(traceback(last, &f.backptr))
}

/// Double-precision log-domain Viterbi, the reference for [`tag`].
pub fn float_viterbi<S: AsRef<str>>(hmm: &HmmModel, sentence: &[S]) -> Result<TagSequence, PosError> {
    if sentence.is_empty() {
        return Err(PosError::EmptySentence);
    }
    let n = hmm.num_tags();
    let words: Vec<Option<usize>> = sentence.iter().map(|w| hmm.word_index(w.as_ref())).collect();
    let mut delta: Vec<f64> = (0..n)
        .map(|t| hmm.initial(t).ln() + hmm.emission(t, words[0]).ln())
        .collect();
    let mut backptr = Vec::new();
    for &w in &words[1..] {
        let mut next = vec![f64::NEG_INFINITY; n];
        let mut bp = vec![0usize; n];
        for t in 0..n {
            let scores: Vec<f64> = (0..n).map(|p| delta[p] + hmm.transition(p, t).ln()).collect();
            let best = first_best(&scores, |a, b| a > b);
            bp[t] = best;
            next[t] = scores[best] + hmm.emission(t, w).ln();
        }
        delta = next;
        backptr.push(bp);
    }
    let last = first_best(&delta, |a, b| a > b);
    Ok(traceback(last, &backptr))
}

/// Percentage of positions where `pred` matches `gold`.
pub fn accuracy(pred: &[usize], gold: &[usize]) -> Result<f64, PosError> {
    if pred.len() != gold.len() || pred.is_empty() {
        return Err(PosError::LengthMismatch {
            pred: pred.len(),
            gold: gold.len(),
        });
    }
    let hits = pred.iter().zip(gold).filter(|(a, b)| a == b).count();
    Ok(100.0 * hits as f64 / pred.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorpusAccuracy {
    /// Correct tokens over all tokens.
    pub token_pct: f64,
    /// Sentences tagged entirely correctly.
    pub sentence_pct: f64,
    pub tokens: usize,
    pub sentences: usize,
}

pub fn corpus_accuracy(pred: &[TagSequence], gold: &[TagSequence]) -> Result<CorpusAccuracy, PosError> {
    if pred.len() != gold.len() || pred.is_empty() {
        return Err(PosError::LengthMismatch {
            pred: pred.len(),
            gold: gold.len(),
        });
    }
    let mut hits = 0;
    let mut tokens = 0;
    let mut whole = 0;
    for (p, g) in pred.iter().zip(gold) {
        let pct = accuracy(p, g)?;
        hits += p.iter().zip(g.iter()).filter(|(a, b)| a == b).count();
        tokens += g.len();
        whole += usize::from(pct == 100.0);
    }
    Ok(CorpusAccuracy {
        token_pct: 100.0 * hits as f64 / tokens as f64,
        sentence_pct: 100.0 * whole as f64 / gold.len() as f64,
        tokens,
        sentences: gold.len(),
    })
}
