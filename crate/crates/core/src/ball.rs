//! Breadth-first enumeration of distinct group elements, deduplicated by
//! matrix value, with optional pruning by displacement of the base point `i`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::dd::DdMat;
use crate::error::{Error, Result};
use crate::group::Word;
use crate::moebius::MoebiusElement;

const CELL: f64 = 1e-6;
const MATCH_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub g: MoebiusElement,
    /// Extended-precision value of `g`, up to sign.
    pub p: DdMat,
    pub cosh_disp: f64,
    pub depth: u32,
    pub parent: u32,
    pub letter: u32,
}

/// Alphabet for a ball: elements plus the word each one stands for in the
/// original generators.
#[derive(Debug, Clone)]
pub(crate) struct Alphabet {
    pub elements: Vec<MoebiusElement>,
    pub precise: Vec<DdMat>,
    pub words: Vec<Word>,
    pub inverse_of: Vec<Option<usize>>,
}

impl Alphabet {
    pub fn new(precise: Vec<DdMat>, words: Vec<Word>) -> Self {
        let elements: Vec<MoebiusElement> = precise.iter().map(round).collect();
        let inverse_of = elements
            .iter()
            .map(|g| {
                let inv = g.inverse();
                elements.iter().position(|h| close(h, &inv))
            })
            .collect();
        Self {
            elements,
            precise,
            words,
            inverse_of,
        }
    }
}

impl Alphabet {
    /// Appends the letters of `other` that are not already present.
    pub fn extend(&mut self, other: &Alphabet) {
        let mut precise = std::mem::take(&mut self.precise);
        let mut words = std::mem::take(&mut self.words);
        for ((g, p), w) in other.elements.iter().zip(&other.precise).zip(&other.words) {
            if !self.elements.iter().any(|h| close(h, g)) {
                precise.push(*p);
                words.push(w.clone());
            }
        }
        *self = Alphabet::new(precise, words);
    }
}

pub(crate) fn round(p: &DdMat) -> MoebiusElement {
    MoebiusElement::normalized(p.to_f64())
}

fn close(a: &MoebiusElement, b: &MoebiusElement) -> bool {
    let (x, y) = (a.entries(), b.entries());
    x.iter().zip(y.iter()).all(|(p, q)| (p - q).abs() <= MATCH_TOL)
}

fn key_of(m: &[f64; 4]) -> [i64; 4] {
    m.map(|x| (x / CELL).round() as i64)
}

#[derive(Debug, Default)]
pub(crate) struct Ball {
    pub nodes: Vec<Node>,
    index: HashMap<[i64; 4], Vec<u32>>,
    /// `layers[d]` is the index range of nodes at depth `d`.
    pub layers: Vec<std::ops::Range<usize>>,
    /// True when the last attempted layer produced no new element.
    pub exhausted: bool,
}

impl Ball {
    /// Grows the ball from the identity. Elements whose displacement cosine
    /// exceeds `prune_cosh` are discarded, and growth stops after
    /// `max_depth` layers or when a layer is empty.
    pub fn grow(alphabet: &Alphabet, prune_cosh: f64, max_depth: usize, budget: usize) -> Result<Self> {
        let mut ball = Ball::default();
        ball.insert(Node {
            g: MoebiusElement::IDENTITY,
            p: DdMat::IDENTITY,
            cosh_disp: 1.0,
            depth: 0,
            parent: u32::MAX,
            letter: u32::MAX,
        });
        ball.layers.push(0..1);
        for depth in 1..=max_depth {
            let prev = ball.layers[depth - 1].clone();
            let proposals: Vec<Vec<(MoebiusElement, DdMat, f64, u32)>> = ball.nodes[prev.clone()]
                .par_iter()
                .map(|node| {
                    let mut out = Vec::with_capacity(alphabet.elements.len());
                    for (li, s) in alphabet.precise.iter().enumerate() {
                        if node.letter != u32::MAX
                            && alphabet.inverse_of[node.letter as usize] == Some(li)
                        {
                            continue;
                        }
                        let p = node.p.mul(s);
                        let h = round(&p);
                        let c = h.cosh_displacement_at_i();
                        if c <= prune_cosh {
                            out.push((h, p, c, li as u32));
                        }
                    }
                    out
                })
                .collect();
            let start = ball.nodes.len();
            for (offset, props) in proposals.into_iter().enumerate() {
                let parent = (prev.start + offset) as u32;
                for (g, p, cosh_disp, letter) in props {
                    if ball.find(&g).is_some() {
                        continue;
                    }
                    if ball.nodes.len() >= budget {
                        return Err(Error::Budget { budget });
                    }
                    ball.insert(Node {
                        g,
                        p,
                        cosh_disp,
                        depth: depth as u32,
                        parent,
                        letter,
                    });
                }
            }
            let end = ball.nodes.len();
            if end == start {
                ball.exhausted = true;
                break;
            }
            ball.layers.push(start..end);
        }
        Ok(ball)
    }

    fn insert(&mut self, node: Node) {
        let idx = self.nodes.len() as u32;
        self.index.entry(key_of(&node.g.entries())).or_default().push(idx);
        self.nodes.push(node);
    }

    fn find_exact(&self, m: &[f64; 4]) -> Option<usize> {
        let scaled = m.map(|x| x / CELL);
        let base = key_of(m);
        // Neighbouring cells are probed only for coordinates close to a cell boundary.
        let mut options: [[i64; 2]; 4] = [[0; 2]; 4];
        let mut counts = [1usize; 4];
        for k in 0..4 {
            options[k][0] = base[k];
            let frac = scaled[k] - base[k] as f64;
            if frac.abs() > 0.4 {
                options[k][1] = base[k].saturating_add(frac.signum() as i64);
                counts[k] = 2;
            }
        }
        for i0 in 0..counts[0] {
            for i1 in 0..counts[1] {
                for i2 in 0..counts[2] {
                    for i3 in 0..counts[3] {
                        let key = [options[0][i0], options[1][i1], options[2][i2], options[3][i3]];
                        if let Some(bucket) = self.index.get(&key) {
                            for &j in bucket {
                                let e = self.nodes[j as usize].g.entries();
                                if e.iter().zip(m.iter()).all(|(p, q)| (p - q).abs() <= MATCH_TOL) {
                                    return Some(j as usize);
                                }
                            }
                        }
                    }
                }
            }
        }
        None
    }

    /// Index of the node equal to `g` in PSL(2,R), if present.
    pub fn find(&self, g: &MoebiusElement) -> Option<usize> {
        let m = g.entries();
        if let Some(j) = self.find_exact(&m) {
            return Some(j);
        }
        // The canonical sign is ambiguous when the leading entry is tiny.
        if m[0].abs() < 1e-6 {
            return self.find_exact(&m.map(|x| -x));
        }
        None
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// The word in the original generators spelled by the path to `idx`.
    pub fn word(&self, idx: usize, alphabet: &Alphabet) -> Word {
        let mut letters = Vec::new();
        let mut cur = idx;
        while self.nodes[cur].parent != u32::MAX {
            letters.push(self.nodes[cur].letter as usize);
            cur = self.nodes[cur].parent as usize;
        }
        letters.reverse();
        Word::reduce(
            letters
                .into_iter()
                .flat_map(|l| alphabet.words[l].letters().to_vec()),
        )
    }
}
