//! Partitions, Young diagrams in matrix notation, arm/leg/hook statistics,
//! dominance order, and semistandard tableau enumeration.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{RatFunc, VarSet};

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("cell ({0}, {1}) is not in the diagram")]
    CellOutOfDiagram(usize, usize),
    #[error("weight mismatch: |lambda| = {0}, |mu| = {1}")]
    WeightMismatch(u32, u32),
}

/// A partition: weakly decreasing positive parts. The empty partition
/// represents 0. Serializes as a plain list, e.g. `[4,4,3,1]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]) && parts.iter().all(|&p| p > 0),
            "parts must be weakly decreasing and positive: {parts:?}"
        );
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// The i-th part (1-indexed), zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i >= 1 && i <= self.parts.len() {
            self.parts[i - 1]
        } else {
            0
        }
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, other: &Partition) -> bool {
        (1..=other.len()).all(|i| self.part(i) >= other.part(i))
    }

    /// Multiplicity of the part `i`.
    pub fn multiplicity(&self, i: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == i).count() as u32
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (1..=p as usize).map(move |j| Cell { row: i + 1, col: j }))
    }

    /// (-1)^(|lambda| - l(lambda)), the sign of a permutation of cycle type
    /// lambda.
    pub fn epsilon(&self) -> i8 {
        if (self.weight() as usize - self.len()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Concatenate and re-sort; the product of power sums p_lambda * p_mu.
    pub fn merge(&self, other: &Partition) -> Partition {
        let mut parts: Vec<u32> = self.parts.iter().chain(&other.parts).copied().collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn scale(&self, d: u32) -> Partition {
        Partition::new(self.parts.iter().map(|&p| p * d).collect())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A cell of a Young diagram in matrix notation: row i, column j, 1-indexed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

/// All partitions of n, each exactly once, in reverse lexicographic order:
/// `(n)` first, `(1^n)` last.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: current.clone() });
            return;
        }
        let hi = max_part.min(remaining);
        for p in (1..=hi).rev() {
            current.push(p);
            rec(remaining - p, p, current, out);
            current.pop();
        }
    }
    rec(n, n.max(1), &mut current, &mut out);
    out
}

/// All partitions of weight at most n, grouped by weight ascending.
pub fn partitions_up_to(n: u32) -> Vec<Partition> {
    (0..=n).flat_map(partitions_of).collect()
}

pub fn conjugate(lambda: &Partition) -> Partition {
    if lambda.is_empty() {
        return Partition::empty();
    }
    let cols = lambda.part(1) as usize;
    let parts = (1..=cols)
        .map(|j| lambda.parts.iter().filter(|&&p| p as usize >= j).count() as u32)
        .collect();
    Partition { parts }
}

/// Arm, leg, and hook length of a cell: the number of cells strictly to the
/// right in its row, strictly below in its column, and a + l + 1.
pub fn arm_leg_hook(
    lambda: &Partition,
    s: Cell,
) -> Result<(u32, u32, u32), PartitionError> {
    if s.row < 1 || s.col < 1 || s.col as u32 > lambda.part(s.row) {
        return Err(PartitionError::CellOutOfDiagram(s.row, s.col));
    }
    let arm = lambda.part(s.row) - s.col as u32;
    let leg = lambda
        .parts
        .iter()
        .skip(s.row)
        .filter(|&&p| p >= s.col as u32)
        .count() as u32;
    Ok((arm, leg, arm + leg + 1))
}

/// n(lambda) = sum of leg lengths = sum (i-1) * lambda_i.
pub fn n_stat(lambda: &Partition) -> u32 {
    lambda
        .parts
        .iter()
        .enumerate()
        .map(|(i, &p)| i as u32 * p)
        .sum()
}

/// z_lambda = prod_i i^{m_i} m_i!, the centralizer order of a permutation of
/// cycle type lambda.
pub fn z_lambda(lambda: &Partition) -> BigInt {
    let mut z = BigInt::one();
    let maxp = lambda.part(1);
    for i in 1..=maxp {
        let m = lambda.multiplicity(i);
        for _ in 0..m {
            z *= i;
        }
        for f in 1..=m {
            z *= f;
        }
    }
    z
}

/// z_lambda(q,t) = z_lambda * prod_i (1 - q^{lambda_i}) / (1 - t^{lambda_i}),
/// with the first variable of `vars` playing q and the second playing t.
pub fn z_lambda_qt(lambda: &Partition, vars: &VarSet) -> RatFunc {
    assert_eq!(vars.len(), 2, "z_lambda_qt needs a two-variable field");
    let mut num = crate::exact::MPoly::constant(vars, z_lambda(lambda));
    let mut den = crate::exact::MPoly::one(vars);
    let one = crate::exact::MPoly::one(vars);
    for &p in lambda.parts() {
        let qp = crate::exact::MPoly::monomial_at(vars, 0, p, BigInt::one());
        let tp = crate::exact::MPoly::monomial_at(vars, 1, p, BigInt::one());
        num = num.mul(&one.sub(&qp));
        den = den.mul(&one.sub(&tp));
    }
    RatFunc::new(num, den).unwrap()
}

/// `lambda <= mu` in dominance order: all partial sums of mu dominate those
/// of lambda. Requires equal weights.
pub fn dominance_leq(lambda: &Partition, mu: &Partition) -> Result<bool, PartitionError> {
    if lambda.weight() != mu.weight() {
        return Err(PartitionError::WeightMismatch(lambda.weight(), mu.weight()));
    }
    let rows = lambda.len().max(mu.len());
    let mut sl = 0u32;
    let mut sm = 0u32;
    for i in 1..=rows {
        sl += lambda.part(i);
        sm += mu.part(i);
        if sl > sm {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A semistandard Young tableau, stored as the chain of partitions
/// `empty = c_0 c_1 ... c_r = shape` where c_i holds the cells with entries
/// at most i. Consecutive differences are horizontal strips, which is
/// equivalent to rows weakly increasing and columns strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ssyt {
    chain: Vec<Partition>,
}

impl Ssyt {
    pub fn shape(&self) -> &Partition {
        self.chain.last().unwrap()
    }

    pub fn chain(&self) -> &[Partition] {
        &self.chain
    }

    /// The entry in a cell of the shape.
    pub fn entry(&self, s: Cell) -> Option<u32> {
        for (i, c) in self.chain.iter().enumerate().skip(1) {
            if c.part(s.row) as usize >= s.col && (self.chain[i - 1].part(s.row) as usize) < s.col
            {
                return Some(i as u32);
            }
        }
        None
    }

    pub fn weight(&self) -> Vec<u32> {
        self.chain
            .windows(2)
            .map(|w| w[1].weight() - w[0].weight())
            .collect()
    }
}

/// All SSYT of the given shape whose entry multiset has exactly `weight_i`
/// copies of i. Requires |shape| = sum(weight); entries beyond the length of
/// `weight` are not used.
pub fn ssyt_enumerate(shape: &Partition, weight: &[u32]) -> Vec<Ssyt> {
    let total: u32 = weight.iter().sum();
    assert_eq!(shape.weight(), total, "|shape| must equal the total weight");
    let mut out = Vec::new();
    let mut chain = vec![Partition::empty()];
    fn extensions(shape: &Partition, base: &Partition, add: u32) -> Vec<Partition> {
        // All nu with base subset nu subset shape, |nu| = |base| + add,
        // nu/base a horizontal strip.
        let mut res = Vec::new();
        let rows = shape.len();
        let mut parts = vec![0u32; rows];
        fn rec(
            shape: &Partition,
            base: &Partition,
            row: usize,
            rows: usize,
            left: u32,
            parts: &mut Vec<u32>,
            res: &mut Vec<Partition>,
        ) {
            if row > rows {
                if left == 0 {
                    let nu = Partition::new(
                        parts.iter().copied().take_while(|&p| p > 0).collect(),
                    );
                    res.push(nu);
                }
                return;
            }
            let lo = base.part(row);
            let mut hi = shape.part(row).min(lo + left);
            if row >= 2 {
                hi = hi.min(base.part(row - 1)); // horizontal strip
                hi = hi.min(parts[row - 2]); // keep weakly decreasing
            }
            for v in lo..=hi {
                parts[row - 1] = v;
                rec(shape, base, row + 1, rows, left - (v - lo), parts, res);
            }
            parts[row - 1] = 0;
        }
        rec(shape, base, 1, rows, add, &mut parts, &mut res);
        res
    }
    fn rec(
        shape: &Partition,
        weight: &[u32],
        step: usize,
        chain: &mut Vec<Partition>,
        out: &mut Vec<Ssyt>,
    ) {
        if step == weight.len() {
            if chain.last().unwrap() == shape {
                out.push(Ssyt { chain: chain.clone() });
            }
            return;
        }
        let base = chain.last().unwrap().clone();
        for nu in extensions(shape, &base, weight[step]) {
            chain.push(nu);
            rec(shape, weight, step + 1, chain, out);
            chain.pop();
        }
    }
    rec(shape, weight, 0, &mut chain, &mut out);
    out
}
