use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use ordered_float::OrderedFloat;

use super::CommError;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(char),
    Internal(usize, usize),
}

/// Prefix code over characters.
///
/// Construction is deterministic: the two lightest subtrees are merged
/// first, ties broken by creation order (leaves in ascending symbol order,
/// then internal nodes as they are made). The first subtree popped becomes
/// the `0` branch.
#[derive(Debug, Clone, PartialEq)]
pub struct HuffmanCodebook {
    codes: BTreeMap<char, Vec<u8>>,
    nodes: Vec<Node>,
    root: usize,
}

/// Result of decoding a possibly corrupted bitstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanDecoded {
    pub text: String,
    /// The stream ended inside a codeword; `text` holds everything before it.
    pub truncated: bool,
}

impl HuffmanCodebook {
    pub fn build(freqs: &BTreeMap<char, f64>) -> Result<Self, CommError> {
        if freqs.is_empty() {
            return Err(CommError::EmptyAlphabet);
        }
        if freqs.values().any(|p| !p.is_finite() || *p < 0.0) || freqs.values().all(|p| *p == 0.0) {
            return Err(CommError::InvalidFrequencies);
        }
        let mut nodes: Vec<Node> = freqs.keys().map(|&c| Node::Leaf(c)).collect();
        if nodes.len() == 1 {
            let sym = *freqs.keys().next().unwrap();
            return Ok(HuffmanCodebook {
                codes: BTreeMap::from([(sym, vec![0])]),
                nodes: vec![Node::Leaf(sym), Node::Internal(0, 0)],
                root: 1,
            });
        }
        let mut heap: BinaryHeap<Reverse<(OrderedFloat<f64>, usize)>> = freqs
            .values()
            .enumerate()
            .map(|(i, &p)| Reverse((OrderedFloat(p), i)))
            .collect();
        while heap.len() > 1 {
            let Reverse((w0, n0)) = heap.pop().unwrap();
            let Reverse((w1, n1)) = heap.pop().unwrap();
            nodes.push(Node::Internal(n0, n1));
            heap.push(Reverse((OrderedFloat(w0.0 + w1.0), nodes.len() - 1)));
        }
        let root = nodes.len() - 1;
        let mut codes = BTreeMap::new();
        let mut stack = vec![(root, Vec::new())];
        while let Some((id, prefix)) = stack.pop() {
            match nodes[id] {
                Node::Leaf(c) => {
                    codes.insert(c, prefix);
                }
                Node::Internal(zero, one) => {
                    let mut p1 = prefix.clone();
                    p1.push(1);
                    let mut p0 = prefix;
                    p0.push(0);
                    stack.push((one, p1));
                    stack.push((zero, p0));
                }
            }
        }
        Ok(HuffmanCodebook { codes, nodes, root })
    }

    /// Builds a codebook from the empirical character frequencies of `text`.
    pub fn from_text(text: &str) -> Result<Self, CommError> {
        Self::build(&char_frequencies(text))
    }

    pub fn codeword(&self, symbol: char) -> Option<&[u8]> {
        self.codes.get(&symbol).map(Vec::as_slice)
    }

    pub fn codewords(&self) -> impl Iterator<Item = (char, &[u8])> {
        self.codes.iter().map(|(c, w)| (*c, w.as_slice()))
    }

    pub fn kraft_sum(&self) -> f64 {
        self.codes.values().map(|w| 0.5f64.powi(w.len() as i32)).sum()
    }

    pub fn encode(&self, text: &str) -> Result<Vec<u8>, CommError> {
        let mut bits = Vec::new();
        for c in text.chars() {
            bits.extend_from_slice(self.codes.get(&c).ok_or(CommError::UnknownSymbol(c))?);
        }
        Ok(bits)
    }

    /// Decodes greedily. Never fails: a dangling partial codeword at the end
    /// sets `truncated`.
    pub fn decode(&self, bits: &[u8]) -> HuffmanDecoded {
        let mut text = String::new();
        let mut node = self.root;
        let mut in_word = false;
        for &b in bits {
            node = match self.nodes[node] {
                Node::Internal(zero, one) => {
                    if b & 1 == 0 {
                        zero
                    } else {
                        one
                    }
                }
                Node::Leaf(_) => unreachable!("walk always restarts at the root"),
            };
            in_word = true;
            if let Node::Leaf(c) = self.nodes[node] {
                text.push(c);
                node = self.root;
                in_word = false;
            }
        }
        HuffmanDecoded {
            text,
            truncated: in_word,
        }
    }
}

pub fn char_frequencies(text: &str) -> BTreeMap<char, f64> {
    let mut counts: BTreeMap<char, f64> = BTreeMap::new();
    for c in text.chars() {
        *counts.entry(c).or_default() += 1.0;
    }
    let total = text.chars().count() as f64;
    for v in counts.values_mut() {
        *v /= total;
    }
    counts
}
