//! Walks attached to a positive braid word, their enumeration, and the
//! transitivity test for admissibility.

use serde::{Deserialize, Serialize};

use super::perm::Perm;
use super::word::BraidWord;

/// A walk of a braid word: permutations `p_0, ..., p_l` with
/// `p_0 = p_l = id`, where position m goes up (forced when
/// `s_{i_m} p_{m-1} > p_{m-1}`), goes down, or stays. Positions are
/// partitioned into the index sets `up`, `stay`, `down` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub states: Vec<Perm>,
    pub up: Vec<usize>,
    pub stay: Vec<usize>,
    pub down: Vec<usize>,
}

impl Walk {
    /// Validate a state sequence against the walk rule and classify its
    /// positions. Returns `None` when the sequence is not a walk.
    pub fn classify(word: &BraidWord, states: Vec<Perm>) -> Option<Walk> {
        if states.len() != word.len() + 1 {
            return None;
        }
        if !states[0].is_identity() || !states[word.len()].is_identity() {
            return None;
        }
        let mut up = Vec::new();
        let mut stay = Vec::new();
        let mut down = Vec::new();
        for m in 1..=word.len() {
            let prev = &states[m - 1];
            let next = &states[m];
            let flipped = Perm::adjacent(word.n(), word.letter(m)).compose(prev);
            if flipped.length() > prev.length() {
                // Go-up is forced.
                if *next != flipped {
                    return None;
                }
                up.push(m);
            } else if *next == flipped {
                down.push(m);
            } else if next == prev {
                stay.push(m);
            } else {
                return None;
            }
        }
        Some(Walk { states, up, stay, down })
    }

    pub fn len(&self) -> usize {
        self.states.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.states.len() <= 1
    }

    pub fn state(&self, m: usize) -> &Perm {
        &self.states[m]
    }

    /// Position class lookup: 'U', 'S', or 'D'.
    pub fn class_of(&self, m: usize) -> char {
        if self.up.contains(&m) {
            'U'
        } else if self.stay.contains(&m) {
            'S'
        } else {
            'D'
        }
    }
}

/// All walks of a braid word, depth first with the go-down branch explored
/// before the stay branch. This ordering is admissible: within a braid, the
/// unique all-stay-heavy maximal walk comes last. Dead branches are pruned
/// by the length bound `l(p_m) <= l - m`.
pub fn enumerate_walks(word: &BraidWord) -> Vec<Walk> {
    let n = word.n();
    let mut out = Vec::new();
    let mut states = vec![Perm::identity(n)];
    fn rec(word: &BraidWord, m: usize, states: &mut Vec<Perm>, out: &mut Vec<Walk>) {
        let l = word.len();
        if m > l {
            if states[l].is_identity() {
                let walk = Walk::classify(word, states.clone())
                    .expect("enumerated states satisfy the walk rule");
                out.push(walk);
            }
            return;
        }
        let prev = states[m - 1].clone();
        let flipped = Perm::adjacent(word.n(), word.letter(m)).compose(&prev);
        let candidates: &[Perm] = if flipped.length() > prev.length() {
            &[flipped][..]
        } else {
            // Down first, then stay.
            &[flipped, prev][..]
        };
        let candidates = candidates.to_vec();
        for next in candidates {
            if next.length() <= l - m {
                states.push(next);
                rec(word, m + 1, states, out);
                states.pop();
            }
        }
    }
    rec(word, 1, &mut states, &mut out);
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            self.parent[x] = self.find(self.parent[x]);
        }
        self.parent[x]
    }

    fn union(&mut self, x: usize, y: usize) {
        let rx = self.find(x);
        let ry = self.find(y);
        if rx != ry {
            self.parent[rx] = ry;
        }
    }

    fn components(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&x| self.find(x) == x).count()
    }
}

/// The generator set `J_p`: the genus permutations together with the
/// conjugates `p_{m-1}^{-1} s_{i_m} p_{m-1}` over the stay positions.
pub fn admissibility_generators(word: &BraidWord, walk: &Walk, taus: &[Perm]) -> Vec<Perm> {
    let mut gens: Vec<Perm> = taus.to_vec();
    for &m in &walk.stay {
        let p = walk.state(m - 1);
        let s = Perm::adjacent(word.n(), word.letter(m));
        gens.push(p.inverse().compose(&s).compose(p));
    }
    gens
}

/// A walk is admissible when `<J_p>` acts transitively on [n], checked by
/// union-find closure over the orbits of the generators.
pub fn admissible(word: &BraidWord, walk: &Walk, taus: &[Perm]) -> bool {
    let n = word.n();
    let mut uf = UnionFind::new(n);
    for g in admissibility_generators(word, walk, taus) {
        for x in 1..=n {
            uf.union(x - 1, g.apply(x) - 1);
        }
    }
    uf.components() == 1
}
