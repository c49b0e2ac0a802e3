//! Permutations of [n] in one-line notation.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A permutation of {1..n}. Stored 0-indexed; `apply` and serialization are
/// 1-indexed to match the usual one-line notation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Perm {
    images: Vec<usize>, // images[i] = w(i+1) - 1
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    /// From 1-indexed one-line notation, e.g. `[2,3,1]`.
    pub fn from_one_line(line: &[usize]) -> Self {
        let n = line.len();
        let mut seen = vec![false; n];
        for &v in line {
            assert!(v >= 1 && v <= n && !seen[v - 1], "not a permutation: {line:?}");
            seen[v - 1] = true;
        }
        Perm { images: line.iter().map(|&v| v - 1).collect() }
    }

    /// The adjacent transposition s_k = (k, k+1), 1 <= k <= n-1.
    pub fn adjacent(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k < n);
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(k - 1, k);
        Perm { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// w(x) for 1 <= x <= n.
    pub fn apply(&self, x: usize) -> usize {
        self.images[x - 1] + 1
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Function composition: (self * other)(x) = self(other(x)).
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.n(), other.n());
        Perm { images: other.images.iter().map(|&v| self.images[v]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v] = i;
        }
        Perm { images }
    }

    /// Coxeter length: the number of inversions.
    pub fn length(&self) -> usize {
        let mut l = 0;
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                if self.images[i] > self.images[j] {
                    l += 1;
                }
            }
        }
        l
    }

    /// The longest element: x -> n + 1 - x.
    pub fn longest(n: usize) -> Perm {
        Perm { images: (0..n).rev().collect() }
    }

    /// All permutations of [n] in lexicographic one-line order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut line: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm { images: line.clone() });
            // next_permutation
            let len = line.len();
            if len < 2 {
                break;
            }
            let mut i = len - 1;
            while i > 0 && line[i - 1] >= line[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = len - 1;
            while line[j] <= line[i - 1] {
                j -= 1;
            }
            line.swap(i - 1, j);
            line[i..].reverse();
        }
        out
    }

    /// The lexicographically least reduced word, as generator indices in
    /// product order: `self = s_{a_1} s_{a_2} ... s_{a_r}` with the leftmost
    /// factor applied last. Obtained by repeatedly extracting the smallest
    /// left descent.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut w = self.clone();
        let mut word = Vec::with_capacity(self.length());
        while !w.is_identity() {
            let winv = w.inverse();
            let k = (1..w.n())
                .find(|&k| winv.apply(k) > winv.apply(k + 1))
                .expect("a non-identity permutation has a left descent");
            word.push(k);
            w = Perm::adjacent(w.n(), k).compose(&w);
        }
        word
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
