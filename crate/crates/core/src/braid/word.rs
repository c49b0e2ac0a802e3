//! Positive braid words in walk order, canonical permutation lifts, and the
//! shape braids attached to character-variety strata.

use serde::{Deserialize, Serialize};

use super::perm::Perm;
use crate::partitions::Partition;

/// A positive braid word `beta = sigma_{i_l} ... sigma_{i_1}` stored in walk
/// order: `letters[m-1] = i_m`, so position 1 is the rightmost factor of the
/// product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord {
    n: usize,
    letters: Vec<usize>,
}

impl BraidWord {
    pub fn new(n: usize, letters: Vec<usize>) -> Self {
        assert!(n >= 1);
        assert!(
            letters.iter().all(|&i| i >= 1 && i < n),
            "letters must lie in 1..={}",
            n - 1
        );
        BraidWord { n, letters }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letter at walk position m, 1-indexed.
    pub fn letter(&self, m: usize) -> usize {
        self.letters[m - 1]
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// The underlying permutation `s(beta) = s_{i_l} ... s_{i_1}`.
    pub fn underlying_perm(&self) -> Perm {
        let mut w = Perm::identity(self.n);
        for &i in &self.letters {
            w = Perm::adjacent(self.n, i).compose(&w);
        }
        w
    }

    /// `s_{>m}(beta) = s_{i_l} ... s_{i_{m+1}}`.
    pub fn s_gt(&self, m: usize) -> Perm {
        let mut w = Perm::identity(self.n);
        for q in m + 1..=self.len() {
            w = Perm::adjacent(self.n, self.letter(q)).compose(&w);
        }
        w
    }
}

/// The canonical positive lift of a permutation, in walk order: the reverse
/// of its canonical reduced word.
pub fn lift_walk_order(w: &Perm) -> Vec<usize> {
    let mut word = w.reduced_word();
    word.reverse();
    word
}

/// The data indexing a Bruhat stratum: genus permutations
/// `(tau_1, ..., tau_{2g})` and minimal coset representatives
/// `(w_1, ..., w_{k-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WVec {
    pub taus: Vec<Perm>,
    pub wdots: Vec<Perm>,
}

impl WVec {
    pub fn total_length(&self) -> usize {
        self.taus.iter().chain(&self.wdots).map(|w| w.length()).sum()
    }
}

/// The shape braid of a stratum, in walk order: first the puncture blocks
/// `[w_i^{-1} | w_i]` for i = k-1 down to 1, then the genus blocks
/// `[tau_{2j}^{-1} | tau_{2j-1}^{-1} | tau_{2j} | tau_{2j-1}]` for
/// j = g down to 1. Its length is `2 sum l(tau_j) + 2 sum l(w_i)`.
pub fn shape_braid(n: usize, wvec: &WVec) -> BraidWord {
    assert_eq!(wvec.taus.len() % 2, 0, "genus part must have 2g entries");
    let mut letters = Vec::with_capacity(2 * wvec.total_length());
    for w in wvec.wdots.iter().rev() {
        letters.extend(lift_walk_order(&w.inverse()));
        letters.extend(lift_walk_order(w));
    }
    for pair in wvec.taus.chunks(2).rev() {
        let (a, b) = (&pair[0], &pair[1]);
        letters.extend(lift_walk_order(&b.inverse()));
        letters.extend(lift_walk_order(&a.inverse()));
        letters.extend(lift_walk_order(b));
        letters.extend(lift_walk_order(a));
    }
    BraidWord::new(n, letters)
}

/// Minimal-length representatives of the cosets `W / W(C)` for the Young
/// subgroup of block type mu: exactly the permutations with increasing
/// values along each mu-block of positions. There are `n! / prod(mu_j!)` of
/// them; listed in lexicographic one-line order.
pub fn coset_min_reps(n: usize, mu: &Partition) -> Vec<Perm> {
    assert_eq!(mu.weight() as usize, n, "mu must be a partition of n");
    let mut blocks = Vec::new();
    let mut start = 1usize;
    for &part in mu.parts() {
        blocks.push((start, start + part as usize - 1));
        start += part as usize;
    }
    Perm::all(n)
        .into_iter()
        .filter(|w| {
            blocks.iter().all(|&(lo, hi)| {
                (lo..hi).all(|x| w.apply(x) < w.apply(x + 1))
            })
        })
        .collect()
}
