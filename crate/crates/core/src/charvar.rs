//! Character-variety computations: dimension and genericity, HLRV functions
//! and their coefficient grids, specializations, cell decompositions, and
//! formal motive sums.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{
    admissible, coset_min_reps, enumerate_walks, shape_braid, BraidWord, Perm, Walk,
    WVec,
};
use crate::exact::{MPoly, RatFunc, VarSet};
use crate::macdonald::{MacdonaldError, MacdonaldTable};
use crate::partitions::{partitions_of, Partition};
use crate::symfunc::{hall_pair, h_lambda_in_p, log_pleth, DiagonalSeries, SymSeries};

#[derive(Debug, Error)]
pub enum GridViolation {
    #[error("HLRV function is not a polynomial after z -> -z: {0}")]
    NotPolynomial(String),
    #[error("dimension {0} is negative or odd")]
    OddDimension(i64),
    #[error("negative coefficient {c} at (i,j) = ({i},{j})")]
    NegativeCoefficient { i: u32, j: u32, c: BigInt },
    #[error("parity violated at (i,j) = ({i},{j}): j - i must be even")]
    Parity { i: u32, j: u32 },
    #[error("exponent bound violated at (i,j) = ({i},{j}) with d = {d}")]
    Bounds { i: u32, j: u32, d: u32 },
    #[error("corner coefficient c_({i},{j}) is {c}, expected 1")]
    Corner { i: u32, j: u32, c: BigInt },
}

#[derive(Debug, Error)]
pub enum CharVarError {
    #[error("partitions must be nonempty and of equal positive weight")]
    InvalidSpec,
    #[error("spec is not very generic: the last partition must be (1^n)")]
    NotVeryGeneric,
    #[error("cell parity violated: d = {d}, a_bar = {a_bar}")]
    CellParity { d: i64, a_bar: i64 },
    #[error("expected exactly one maximal torus cell, found {0}")]
    TorusCellCount(usize),
    #[error(transparent)]
    Macdonald(#[from] MacdonaldError),
    #[error(transparent)]
    Grid(#[from] GridViolation),
}

/// The combinatorial data of a character variety: genus, punctures, and the
/// eigenvalue-multiplicity partitions (all of one weight n).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharVarSpec {
    pub g: u32,
    pub mu: Vec<Partition>,
}

impl CharVarSpec {
    pub fn new(g: u32, mu: Vec<Partition>) -> Result<Self, CharVarError> {
        if mu.is_empty() {
            return Err(CharVarError::InvalidSpec);
        }
        let n = mu[0].weight();
        if n == 0 || mu.iter().any(|m| m.weight() != n) {
            return Err(CharVarError::InvalidSpec);
        }
        Ok(CharVarSpec { g, mu })
    }

    pub fn n(&self) -> u32 {
        self.mu[0].weight()
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    /// Very generic: the last puncture is regular semisimple, mu^k = (1^n).
    pub fn is_very_generic(&self) -> bool {
        self.mu.last().unwrap().parts().iter().all(|&p| p == 1)
    }

    /// d_mu = n^2 (2g - 2 + k) - sum (mu^i_j)^2 + 2.
    pub fn dimension(&self) -> i64 {
        let n = self.n() as i64;
        let square_sum: i64 = self
            .mu
            .iter()
            .flat_map(|m| m.parts())
            .map(|&p| (p as i64) * (p as i64))
            .sum();
        n * n * (2 * self.g as i64 - 2 + self.k() as i64) - square_sum + 2
    }
}

impl fmt::Display for CharVarSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={}, mu=", self.g)?;
        for (i, m) in self.mu.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// An element of mu_N x Z^m: a torsion exponent mod N and a free exponent
/// vector. Eigenvalues are represented multiplicatively in this group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianElt {
    pub torsion: i64,
    pub free: Vec<i64>,
}

impl AbelianElt {
    fn zero(rank: usize) -> Self {
        AbelianElt { torsion: 0, free: vec![0; rank] }
    }

    fn add_scaled(&mut self, other: &AbelianElt, mult: i64, modulus: i64) {
        self.torsion = (self.torsion + other.torsion * mult).rem_euclid(modulus);
        for (a, b) in self.free.iter_mut().zip(&other.free) {
            *a += b * mult;
        }
    }

    fn is_identity(&self) -> bool {
        self.torsion == 0 && self.free.iter().all(|&x| x == 0)
    }
}

/// Eigenvalue data for a genericity check: per puncture, one abelian-group
/// element per eigenvalue block of mu^i, listed block-by-block (nicely
/// ordered).
#[derive(Clone, Debug)]
pub struct EigenvalueData {
    pub torsion_modulus: i64,
    pub free_rank: usize,
    pub blocks: Vec<Vec<AbelianElt>>,
}

/// Witness of a genericity failure: the multiset of eigenvalues chosen per
/// puncture (as per-block counts). `subset_size = n` records a determinant
/// failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericityWitness {
    pub subset_size: u32,
    pub selection: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Genericity {
    Generic,
    NotGeneric(GenericityWitness),
}

/// Exhaustive genericity test: the product of all eigenvalues is 1, and for
/// every 1 <= n' < n, no choice of n' eigenvalues from each puncture
/// multiplies to 1.
pub fn generic_check(spec: &CharVarSpec, eig: &EigenvalueData) -> Genericity {
    let n = spec.n();
    assert_eq!(eig.blocks.len(), spec.k(), "one eigenvalue list per puncture");
    for (mu, blocks) in spec.mu.iter().zip(&eig.blocks) {
        assert_eq!(mu.len(), blocks.len(), "one eigenvalue per block of mu");
        assert!(blocks.iter().all(|e| e.free.len() == eig.free_rank));
    }
    let modulus = eig.torsion_modulus.max(1);
    // Determinant condition: full multiplicities must multiply to 1.
    let mut total = AbelianElt::zero(eig.free_rank);
    let full: Vec<Vec<u32>> = spec.mu.iter().map(|m| m.parts().to_vec()).collect();
    for (i, mu) in spec.mu.iter().enumerate() {
        for (j, &m) in mu.parts().iter().enumerate() {
            total.add_scaled(&eig.blocks[i][j], m as i64, modulus);
        }
    }
    if !total.is_identity() {
        return Genericity::NotGeneric(GenericityWitness { subset_size: n, selection: full });
    }
    // Sub-multiset condition for every 1 <= n' < n.
    for np in 1..n {
        // Per puncture: all count vectors summing to np within the block
        // multiplicities, with their group elements.
        let per_puncture: Vec<Vec<(Vec<u32>, AbelianElt)>> = spec
            .mu
            .iter()
            .enumerate()
            .map(|(i, mu)| {
                let mut out = Vec::new();
                let mut counts = vec![0u32; mu.len()];
                fn rec(
                    mu: &Partition,
                    blocks: &[AbelianElt],
                    modulus: i64,
                    rank: usize,
                    j: usize,
                    left: u32,
                    counts: &mut Vec<u32>,
                    out: &mut Vec<(Vec<u32>, AbelianElt)>,
                ) {
                    if j == mu.len() {
                        if left == 0 {
                            let mut e = AbelianElt::zero(rank);
                            for (jj, &c) in counts.iter().enumerate() {
                                e.add_scaled(&blocks[jj], c as i64, modulus);
                            }
                            out.push((counts.clone(), e));
                        }
                        return;
                    }
                    let cap = mu.part(j + 1).min(left);
                    for c in 0..=cap {
                        counts[j] = c;
                        rec(mu, blocks, modulus, rank, j + 1, left - c, counts, out);
                        counts[j] = 0;
                    }
                }
                rec(
                    mu,
                    &eig.blocks[i],
                    modulus,
                    eig.free_rank,
                    0,
                    np,
                    &mut counts,
                    &mut out,
                );
                out
            })
            .collect();
        // Cartesian combination across punctures.
        let mut partial: Vec<(Vec<Vec<u32>>, AbelianElt)> =
            vec![(Vec::new(), AbelianElt::zero(eig.free_rank))];
        for options in &per_puncture {
            let mut next = Vec::with_capacity(partial.len() * options.len());
            for (sel, acc) in &partial {
                for (counts, e) in options {
                    let mut acc2 = acc.clone();
                    acc2.add_scaled(e, 1, modulus);
                    let mut sel2 = sel.clone();
                    sel2.push(counts.clone());
                    next.push((sel2, acc2));
                }
            }
            partial = next;
        }
        for (sel, acc) in partial {
            if acc.is_identity() {
                return Genericity::NotGeneric(GenericityWitness {
                    subset_size: np,
                    selection: sel,
                });
            }
        }
    }
    Genericity::Generic
}

/// The genus-g deformed hook polynomial of a partition:
/// `prod_s (z^{2a+1} - w^{2l+1})^{2g} / ((z^{2a+2} - w^{2l})(z^{2a} - w^{2l+2}))`.
pub fn hook_polynomial(lambda: &Partition, g: u32, vars: &VarSet) -> RatFunc {
    let mut num = MPoly::one(vars);
    let mut den = MPoly::one(vars);
    let zpow = |e: u32| MPoly::monomial_at(vars, 0, e, BigInt::one());
    let wpow = |e: u32| MPoly::monomial_at(vars, 1, e, BigInt::one());
    for s in lambda.cells() {
        let (a, l, _) = crate::partitions::arm_leg_hook(lambda, s).unwrap();
        num = num.mul(&zpow(2 * a + 1).sub(&wpow(2 * l + 1)).pow(2 * g));
        den = den.mul(&zpow(2 * a + 2).sub(&wpow(2 * l)));
        den = den.mul(&zpow(2 * a).sub(&wpow(2 * l + 2)));
    }
    RatFunc::new(num, den).unwrap()
}

/// The validated coefficient grid of `H_mu(-z, w) = sum c_ij z^i w^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HlrvGrid {
    pub d: u32,
    pub c: BTreeMap<(u32, u32), BigInt>,
}

impl HlrvGrid {
    /// Validate the conjectured shape: nonnegative integer coefficients,
    /// `j - i` even, exponents bounded by d with `i + j <= d`, and corner
    /// coefficients `c_{0,d} = c_{d,0} = 1`.
    pub fn from_poly(d: i64, poly: &MPoly) -> Result<Self, GridViolation> {
        if d < 0 || d % 2 != 0 {
            return Err(GridViolation::OddDimension(d));
        }
        let d = d as u32;
        let mut c = BTreeMap::new();
        for (k, coeff) in poly.terms() {
            let (i, j) = (k[0], k[1]);
            if coeff.is_negative() {
                return Err(GridViolation::NegativeCoefficient { i, j, c: coeff.clone() });
            }
            if (i as i64 - j as i64) % 2 != 0 {
                return Err(GridViolation::Parity { i, j });
            }
            if i > d || j > d || i + j > d {
                return Err(GridViolation::Bounds { i, j, d });
            }
            c.insert((i, j), coeff.clone());
        }
        for corner in [(0u32, d), (d, 0u32)] {
            let v = c.get(&corner).cloned().unwrap_or_else(BigInt::zero);
            if !v.is_one() {
                return Err(GridViolation::Corner { i: corner.0, j: corner.1, c: v });
            }
        }
        Ok(HlrvGrid { d, c })
    }

    /// The grid coefficient c_ij (zero when absent).
    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.c.get(&(i, j)).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Curious Poincare duality at the coefficient level: c_ij = c_ji.
    pub fn duality_check(&self) -> bool {
        self.c.iter().all(|(&(i, j), v)| self.coeff(j, i) == *v)
    }

    /// E-polynomial coefficients: `c_l = sum_{(d+j-i)/2 = l} (-1)^i c_ij`,
    /// so that `sqrt(q)^d H(1/sqrt(q), sqrt(q)) = sum c_l q^l`.
    pub fn e_coefficients(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.d as usize + 1];
        for (&(i, j), v) in &self.c {
            let l = (self.d + j - i) / 2;
            if i % 2 == 0 {
                out[l as usize] += v;
            } else {
                out[l as usize] -= v;
            }
        }
        out
    }
}

/// Specialization targets of the grid; all exponents are integers thanks to
/// the parity invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Specialization {
    /// W(q,t) = sum c_ij q^{(d+j-i)/2} t^i (conjectural mixed Hodge form).
    Weight,
    /// E(q) = W(q, -1).
    EPoly,
    /// Pure part W(q, 0).
    Pure,
    /// Poincare polynomial t^d H(-1, t) = sum c_ij t^{d+j}.
    Poincare,
}

pub fn specialize(grid: &HlrvGrid, target: Specialization) -> MPoly {
    match target {
        Specialization::Weight => {
            let vars = VarSet::qt();
            let mut p = MPoly::zero(&vars);
            for (&(i, j), v) in &grid.c {
                let qexp = (grid.d + j - i) / 2;
                p = p.add(&MPoly::from_terms(&vars, [(vec![qexp, i], v.clone())]));
            }
            p
        }
        Specialization::EPoly => {
            let vars = VarSet::q();
            let mut p = MPoly::zero(&vars);
            for (l, c) in grid.e_coefficients().into_iter().enumerate() {
                p = p.add(&MPoly::from_terms(&vars, [(vec![l as u32], c)]));
            }
            p
        }
        Specialization::Pure => {
            let vars = VarSet::q();
            let mut p = MPoly::zero(&vars);
            for (&(i, j), v) in &grid.c {
                if i == 0 {
                    p = p.add(&MPoly::from_terms(&vars, [(vec![(grid.d + j) / 2], v.clone())]));
                }
            }
            p
        }
        Specialization::Poincare => {
            let vars = VarSet::new(["t"]);
            let mut p = MPoly::zero(&vars);
            for (&(_, j), v) in &grid.c {
                p = p.add(&MPoly::from_terms(&vars, [(vec![grid.d + j], v.clone())]));
            }
            p
        }
    }
}

/// A formal direct sum of twisted-shifted Lefschetz motives L^a[b].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MotiveSum {
    pub terms: BTreeMap<(u32, u32), BigInt>, // (twist a, shift b) -> multiplicity
}

/// The motive sum predicted by the grid:
/// `(+)_{i,j} (L^{(d+j-i)/2} [i])^{(+) c_ij}`.
pub fn motive_sum(grid: &HlrvGrid) -> MotiveSum {
    let mut terms = BTreeMap::new();
    for (&(i, j), v) in &grid.c {
        let a = (grid.d + j - i) / 2;
        *terms.entry((a, i)).or_insert_with(BigInt::zero) += v;
    }
    MotiveSum { terms }
}

impl fmt::Display for MotiveSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), mult) in &self.terms {
            if !first {
                write!(f, " \u{2295} ")?;
            }
            first = false;
            let mut base = format!("L^{a}");
            if b > 0 {
                base.push_str(&format!("[{b}]"));
            }
            if mult.is_one() {
                write!(f, "{base}")?;
            } else {
                write!(f, "({base})^\u{2295}{mult}")?;
            }
        }
        Ok(())
    }
}

/// Outcome of an HLRV computation: the raw rational function together with
/// the validated grid, or the violation that prevented validation. Grid
/// violations are surfaced, not hidden; the grid shape is conjectural.
#[derive(Debug)]
pub struct HlrvReport {
    pub spec: CharVarSpec,
    pub truncation: u32,
    /// H_mu(z, w) as an exact rational function.
    pub hlrv_zw: RatFunc,
    pub outcome: Result<HlrvGrid, GridViolation>,
}

/// Compute the HLRV function of a spec: assemble the Cauchy kernel from
/// modified Macdonald functions at (z^2, w^2), take the plethystic log,
/// pair the diagonal-degree-n component with h_mu, and multiply the
/// prefactor -(z^2 - 1)(w^2 - 1).
pub fn hlrv(
    spec: &CharVarSpec,
    table: &MacdonaldTable,
    truncation: Option<u32>,
) -> Result<HlrvReport, CharVarError> {
    let n = spec.n();
    let k = spec.k();
    let g = spec.g;
    let trunc = truncation.unwrap_or(n).max(n);
    let zw = VarSet::zw();
    let z2 = RatFunc::from_poly(MPoly::monomial_at(&zw, 0, 2, BigInt::one()));
    let w2 = RatFunc::from_poly(MPoly::monomial_at(&zw, 1, 2, BigInt::one()));
    for m in 0..=trunc {
        table.ensure_weight(m)?;
    }
    // One Cauchy-kernel summand per partition.
    let lambdas: Vec<Partition> = (1..=trunc).flat_map(partitions_of).collect();
    let summands: Result<Vec<(u32, SymSeries)>, MacdonaldError> = lambdas
        .par_iter()
        .map(|lambda| {
            let entry = table.entry(lambda)?;
            let htilde = entry.htilde_in_p.map_coefficients(&zw, &[z2.clone(), w2.clone()]);
            let hook = hook_polynomial(lambda, g, &zw);
            let mut term = SymSeries::scalar(k, trunc, hook);
            for alphabet in 0..k {
                term = term.mul(&embed(&htilde, k, trunc, alphabet));
            }
            Ok((lambda.weight(), term))
        })
        .collect();
    let mut omega = DiagonalSeries::one(k, trunc, &zw);
    let mut comps: BTreeMap<u32, SymSeries> = BTreeMap::new();
    for (m, term) in summands? {
        let entry = comps.entry(m).or_insert_with(|| SymSeries::zero(k, trunc, &zw));
        *entry = entry.add(&term);
    }
    for (m, comp) in comps {
        omega.set_component(m, comp);
    }
    let log = log_pleth(&omega).expect("Cauchy kernel has constant term 1");
    let vn = log.component(n).clone();
    let mut h_mu = SymSeries::one(k, trunc, &zw);
    for (alphabet, mu) in spec.mu.iter().enumerate() {
        h_mu = h_mu.mul(&h_lambda_in_p(k, trunc, &zw, alphabet, mu));
    }
    let pairing = hall_pair(&vn, &h_mu);
    let prefactor = crate::exact::parse_ratfunc(&zw, "-(z^2 - 1)*(w^2 - 1)").unwrap();
    let hlrv_zw = prefactor.mul(&pairing);
    // H(-z, w) must be a polynomial with the conjectured grid shape.
    let minus_z = [
        RatFunc::var(&zw, "z").unwrap().neg(),
        RatFunc::var(&zw, "w").unwrap(),
    ];
    let minus = hlrv_zw.subst(&zw, &minus_z).unwrap();
    let outcome = match minus.to_poly() {
        Ok(poly) => HlrvGrid::from_poly(spec.dimension(), &poly),
        Err(_) => Err(GridViolation::NotPolynomial(minus.to_string())),
    };
    Ok(HlrvReport { spec: spec.clone(), truncation: trunc, hlrv_zw, outcome })
}

/// Embed a single-alphabet series into alphabet `alphabet` of a k-alphabet
/// series.
fn embed(series: &SymSeries, k: usize, truncation: u32, alphabet: usize) -> SymSeries {
    assert_eq!(series.alphabets(), 1);
    let mut out = SymSeries::zero(k, truncation, series.vars());
    for (key, c) in series.terms() {
        let p = SymSeries::power_sum(k, truncation, series.vars(), alphabet, &key[0]);
        out = out.add(&p.scale(c));
    }
    out
}

/// One cell of the decomposition: the stratum data, the admissible walk, and
/// the torus/affine dimensions with `a_bar + 2 b_bar = d_mu`.
#[derive(Clone, Debug, Serialize)]
pub struct CellDescriptor {
    pub wvec: WVec,
    pub word: BraidWord,
    pub walk: Walk,
    pub a_bar: u32,
    pub b_bar: u32,
}

#[derive(Debug)]
pub struct CellDecomposition {
    pub spec: CharVarSpec,
    pub cells: Vec<CellDescriptor>,
    /// f_j = number of cells with b_bar = j, 0 <= j <= d/2.
    pub f: Vec<u64>,
}

impl CellDecomposition {
    /// The cell-side E-polynomial `sum (q-1)^{a_bar} q^{b_bar}`.
    pub fn e_polynomial(&self) -> MPoly {
        let vars = VarSet::q();
        let q = MPoly::var(&vars, "q").unwrap();
        let one = MPoly::one(&vars);
        let mut acc = MPoly::zero(&vars);
        for cell in &self.cells {
            let t = q.sub(&one).pow(cell.a_bar).mul(&q.pow(cell.b_bar));
            acc = acc.add(&t);
        }
        acc
    }

    /// Group cells by shape for the `K^6 (sqcup) (Kx)^2` style summary.
    pub fn summary(&self) -> String {
        let mut groups: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for cell in &self.cells {
            *groups.entry((cell.a_bar, cell.b_bar)).or_insert(0) += 1;
        }
        let mut pieces = Vec::new();
        // Affine-heavy cells first, the dense torus last.
        for (&(a, b), &count) in groups.iter() {
            let base = match (a, b) {
                (0, 0) => "pt".to_string(),
                (0, 1) => "K".to_string(),
                (0, b) => format!("K^{b}"),
                (a, 0) => format!("(Kx)^{a}"),
                (a, 1) => format!("(Kx)^{a} x K"),
                (a, b) => format!("(Kx)^{a} x K^{b}"),
            };
            if count == 1 {
                pieces.push(base);
            } else if base == "K" {
                pieces.push(format!("K^{count}"));
            } else {
                pieces.push(format!("({base})^{count}"));
            }
        }
        pieces.join(" \u{2294} ")
    }
}

/// Sort key for the stratum data: total length ascending, then per-component
/// lengths lexicographically descending, then one-line notations ascending.
/// This is a linear extension of the product Bruhat order; the dense-torus
/// stratum comes last.
fn wvec_key(wvec: &WVec) -> (usize, Vec<std::cmp::Reverse<usize>>, Vec<Vec<usize>>) {
    let comps: Vec<&Perm> = wvec.taus.iter().chain(&wvec.wdots).collect();
    (
        wvec.total_length(),
        comps.iter().map(|w| std::cmp::Reverse(w.length())).collect(),
        comps.iter().map(|w| w.one_line()).collect(),
    )
}

/// The cell decomposition of a very generic character variety: enumerate
/// strata, their shape-braid walks, filter by admissibility, and attach
/// dimensions `a_bar = |S_p| + 2gn - 2n + 2`, `b_bar = (d - a_bar)/2`.
pub fn cell_decomposition(spec: &CharVarSpec) -> Result<CellDecomposition, CharVarError> {
    if !spec.is_very_generic() {
        return Err(CharVarError::NotVeryGeneric);
    }
    let n = spec.n() as usize;
    let g = spec.g as usize;
    let d = spec.dimension();
    if d < 0 || d % 2 != 0 {
        return Err(CharVarError::CellParity { d, a_bar: 0 });
    }
    // Genus components range over all of W^{2g}; puncture components over
    // minimal coset representatives for mu^1 .. mu^{k-1}.
    let mut wvecs: Vec<WVec> = vec![WVec { taus: Vec::new(), wdots: Vec::new() }];
    for _ in 0..2 * g {
        let mut next = Vec::new();
        for wvec in &wvecs {
            for tau in Perm::all(n) {
                let mut w2 = wvec.clone();
                w2.taus.push(tau);
                next.push(w2);
            }
        }
        wvecs = next;
    }
    for mu in &spec.mu[..spec.k() - 1] {
        let reps = coset_min_reps(n, mu);
        let mut next = Vec::new();
        for wvec in &wvecs {
            for rep in &reps {
                let mut w2 = wvec.clone();
                w2.wdots.push(rep.clone());
                next.push(w2);
            }
        }
        wvecs = next;
    }
    wvecs.sort_by_key(wvec_key);

    let per_wvec: Vec<Vec<CellDescriptor>> = wvecs
        .into_par_iter()
        .map(|wvec| {
            let word = shape_braid(n, &wvec);
            let mut cells = Vec::new();
            for walk in enumerate_walks(&word) {
                if !admissible(&word, &walk, &wvec.taus) {
                    continue;
                }
                let a_bar = walk.stay.len() as i64 + 2 * (g as i64) * (n as i64)
                    - 2 * n as i64
                    + 2;
                cells.push((wvec.clone(), word.clone(), walk, a_bar));
            }
            cells
                .into_iter()
                .map(|(wvec, word, walk, a_bar)| CellDescriptor {
                    wvec,
                    word,
                    walk,
                    a_bar: a_bar as u32,
                    b_bar: 0,
                })
                .collect()
        })
        .collect();

    let mut cells = Vec::new();
    for group in per_wvec {
        cells.extend(group);
    }
    let mut f = vec![0u64; d as usize / 2 + 1];
    for cell in &mut cells {
        let a_bar = cell.a_bar as i64;
        if a_bar > d || (d - a_bar) % 2 != 0 {
            return Err(CharVarError::CellParity { d, a_bar });
        }
        cell.b_bar = ((d - a_bar) / 2) as u32;
        f[cell.b_bar as usize] += 1;
    }
    let torus_cells = cells.iter().filter(|c| c.b_bar == 0).count();
    if torus_cells != 1 {
        return Err(CharVarError::TorusCellCount(torus_cells));
    }
    Ok(CellDecomposition { spec: spec.clone(), cells, f })
}

fn binomial(n: i64, k: u64) -> BigInt {
    if k == 0 {
        return BigInt::one();
    }
    if n < 0 || (n as u64) < k {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i as i64) / BigInt::from(i as i64 + 1);
    }
    acc
}

fn factorial(n: i64) -> BigInt {
    assert!(n >= 0);
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Cell counts from E-polynomial coefficients, by the closed formula
/// inverting `sum_l c_l q^l = sum_j f_j (q-1)^{d-2j} q^j`.
pub fn f_from_c(c: &[BigInt], d: u32) -> Vec<BigInt> {
    assert_eq!(c.len(), d as usize + 1);
    assert_eq!(d % 2, 0);
    let h = (d / 2) as i64;
    let mut out = Vec::new();
    for j in 0..=h {
        let mut acc = BigRational::zero();
        for l in 0..=j {
            let cl = BigRational::from(c[l as usize].clone());
            let mut inner = BigRational::zero();
            let top = (j - l) / 2;
            for i in 0..=top {
                let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                let term = BigRational::new(
                    sign * factorial(h - l - i) * BigInt::from(2).pow((j - l - 2 * i) as u32),
                    factorial(h - j) * factorial(i) * factorial(j - l - 2 * i),
                );
                inner += term;
            }
            for i in 1..=top {
                let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                let term = BigRational::new(
                    sign * factorial(h - l - i - 1) * BigInt::from(2).pow((j - l - 2 * i) as u32),
                    factorial(h - j) * factorial(i - 1) * factorial(j - l - 2 * i),
                );
                inner += term;
            }
            acc += cl * inner;
        }
        assert!(acc.is_integer(), "f_{j} is not an integer: {acc}");
        out.push(acc.to_integer());
    }
    out
}

/// E-polynomial coefficients from cell counts:
/// `c_l = sum_j f_{l-j} binom(d - 2l + 2j, j) (-1)^j`.
pub fn c_from_f(f: &[BigInt], d: u32) -> Vec<BigInt> {
    assert_eq!(d % 2, 0);
    assert_eq!(f.len(), d as usize / 2 + 1);
    let mut out = Vec::new();
    for l in 0..=d as i64 {
        let mut acc = BigInt::zero();
        for j in 0..=l {
            let fi = l - j;
            if fi > d as i64 / 2 {
                continue;
            }
            let b = binomial(d as i64 - 2 * l + 2 * j, j as u64);
            let term = &f[fi as usize] * b;
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        out.push(acc);
    }
    out
}

/// Result of the E-polynomial cross-check between the cell decomposition and
/// the HLRV grid.
#[derive(Debug)]
pub struct EPolyCrossCheck {
    pub cell_side: MPoly,
    pub hlrv_side: MPoly,
    pub agree: bool,
}

/// Compare `sum_cells (q-1)^{a_bar} q^{b_bar}` with the grid-side
/// E-polynomial `sqrt(q)^d H(1/sqrt(q), sqrt(q))`, computed through the
/// coefficient grid so only integer exponents appear.
pub fn cross_check_epoly(
    spec: &CharVarSpec,
    table: &MacdonaldTable,
) -> Result<EPolyCrossCheck, CharVarError> {
    let cells = cell_decomposition(spec)?;
    let report = hlrv(spec, table, None)?;
    let grid = report.outcome?;
    let cell_side = cells.e_polynomial();
    let hlrv_side = specialize(&grid, Specialization::EPoly);
    let agree = cell_side == hlrv_side;
    Ok(EPolyCrossCheck { cell_side, hlrv_side, agree })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    fn rank2_spec() -> CharVarSpec {
        CharVarSpec::new(0, vec![pt(&[1, 1]); 4]).unwrap()
    }

    fn rank3_spec() -> CharVarSpec {
        CharVarSpec::new(0, vec![pt(&[1, 1, 1]); 3]).unwrap()
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(rank2_spec().dimension(), 2);
        assert_eq!(rank3_spec().dimension(), 2);
        for n in 1..=4u32 {
            let torus = CharVarSpec::new(1, vec![pt(&[n])]).unwrap();
            assert_eq!(torus.dimension(), 2, "punctured torus, n = {n}");
        }
    }

    #[test]
    fn spec_validation() {
        assert!(CharVarSpec::new(0, vec![]).is_err());
        assert!(CharVarSpec::new(0, vec![pt(&[2]), pt(&[1, 1, 1])]).is_err());
        assert!(rank2_spec().is_very_generic());
        assert!(!CharVarSpec::new(0, vec![pt(&[1, 1]), pt(&[2])]).unwrap().is_very_generic());
    }

    #[test]
    fn hook_polynomial_small_cases() {
        let zw = VarSet::zw();
        let h = hook_polynomial(&pt(&[1]), 0, &zw);
        let expect = crate::exact::parse_ratfunc(&zw, "1 / ((z^2 - 1) * (1 - w^2))").unwrap();
        assert_eq!(h, expect);
        let h1 = hook_polynomial(&pt(&[1]), 1, &zw);
        let expect1 =
            crate::exact::parse_ratfunc(&zw, "(z - w)^2 / ((z^2 - 1) * (1 - w^2))").unwrap();
        assert_eq!(h1, expect1);
        assert!(hook_polynomial(&Partition::empty(), 0, &zw).is_one());
    }

    #[test]
    fn hook_polynomial_symmetries() {
        let zw = VarSet::zw();
        let swap = [RatFunc::var(&zw, "w").unwrap(), RatFunc::var(&zw, "z").unwrap()];
        let negate = [
            RatFunc::var(&zw, "z").unwrap().neg(),
            RatFunc::var(&zw, "w").unwrap().neg(),
        ];
        for g in 0..=1u32 {
            for n in 1..=3u32 {
                for lambda in partitions_of(n) {
                    let h = hook_polynomial(&lambda, g, &zw);
                    let hc = hook_polynomial(&crate::partitions::conjugate(&lambda), g, &zw);
                    assert_eq!(h, hc.subst(&zw, &swap).unwrap(), "conjugate-swap, {lambda}");
                    assert_eq!(h, h.subst(&zw, &negate).unwrap(), "sign symmetry, {lambda}");
                }
            }
        }
    }

    #[test]
    fn genericity_examples() {
        // Punctured torus: C_1 = zeta_n^{-c1} I with gcd(c1, n) = 1.
        let spec = CharVarSpec::new(1, vec![pt(&[4])]).unwrap();
        let eig = EigenvalueData {
            torsion_modulus: 4,
            free_rank: 0,
            blocks: vec![vec![AbelianElt { torsion: 3, free: vec![] }]],
        };
        assert_eq!(generic_check(&spec, &eig), Genericity::Generic);
        // gcd(2,4) = 2 is not generic: two eigenvalues multiply to 1.
        let eig_bad = EigenvalueData {
            torsion_modulus: 4,
            free_rank: 0,
            blocks: vec![vec![AbelianElt { torsion: 2, free: vec![] }]],
        };
        match generic_check(&spec, &eig_bad) {
            Genericity::NotGeneric(w) => assert_eq!(w.subset_size, 2),
            g => panic!("expected a witness, got {g:?}"),
        }
        // Rank-2 example: diag(i,-i) thrice and a free generator pair.
        let i4 = |t: i64| AbelianElt { torsion: t, free: vec![0] };
        let eig2 = EigenvalueData {
            torsion_modulus: 4,
            free_rank: 1,
            blocks: vec![
                vec![i4(1), i4(3)],
                vec![i4(1), i4(3)],
                vec![i4(1), i4(3)],
                vec![
                    AbelianElt { torsion: 0, free: vec![1] },
                    AbelianElt { torsion: 0, free: vec![-1] },
                ],
            ],
        };
        assert_eq!(generic_check(&rank2_spec(), &eig2), Genericity::Generic);
        // C_1 = I_2 with k = 1 fails already at n' = 1.
        let spec1 = CharVarSpec::new(1, vec![pt(&[1, 1])]).unwrap();
        let eig3 = EigenvalueData {
            torsion_modulus: 1,
            free_rank: 0,
            blocks: vec![vec![
                AbelianElt { torsion: 0, free: vec![] },
                AbelianElt { torsion: 0, free: vec![] },
            ]],
        };
        match generic_check(&spec1, &eig3) {
            Genericity::NotGeneric(w) => assert_eq!(w.subset_size, 1),
            g => panic!("expected a witness, got {g:?}"),
        }
    }

    #[test]
    fn duality_and_motive_of_artificial_grids() {
        let vars = VarSet::zw();
        let poly = crate::exact::parse_mpoly(&vars, "z^2 + 4 + w^2").unwrap();
        let grid = HlrvGrid::from_poly(2, &poly).unwrap();
        assert!(grid.duality_check());
        assert_eq!(motive_sum(&grid).to_string(), "L^0[2] \u{2295} (L^1)^\u{2295}4 \u{2295} L^2");
        assert_eq!(
            specialize(&grid, Specialization::Weight).to_string(),
            "q^2 + 4*q + t^2"
        );
        assert_eq!(
            specialize(&grid, Specialization::EPoly).to_string(),
            "q^2 + 4*q + 1"
        );
        // t = 0 kills only c_20's t^2 term; c_00 contributes 4q at t-degree 0.
        assert_eq!(
            specialize(&grid, Specialization::Pure).to_string(),
            "q^2 + 4*q"
        );
        // Artificial asymmetric grid: duality fails (built directly; it
        // violates the corner condition so it cannot come from from_poly).
        let mut c = BTreeMap::new();
        c.insert((2, 0), BigInt::one());
        let bad = HlrvGrid { d: 2, c };
        assert!(!bad.duality_check());
    }

    #[test]
    fn grid_validation_rejections() {
        let vars = VarSet::zw();
        let odd = crate::exact::parse_mpoly(&vars, "z + w").unwrap();
        assert!(matches!(
            HlrvGrid::from_poly(2, &odd),
            Err(GridViolation::Parity { .. })
        ));
        let neg = crate::exact::parse_mpoly(&vars, "z^2 - 4 + w^2").unwrap();
        assert!(matches!(
            HlrvGrid::from_poly(2, &neg),
            Err(GridViolation::NegativeCoefficient { .. })
        ));
        let big = crate::exact::parse_mpoly(&vars, "z^4 + 1 + w^4").unwrap();
        assert!(matches!(
            HlrvGrid::from_poly(2, &big),
            Err(GridViolation::Bounds { .. })
        ));
        let nocorner = crate::exact::parse_mpoly(&vars, "z^2 + 4").unwrap();
        assert!(matches!(
            HlrvGrid::from_poly(2, &nocorner),
            Err(GridViolation::Corner { .. })
        ));
    }

    #[test]
    fn f_and_c_round_trip() {
        // Rank-2 data: c = (1,4,1), d = 2 gives f = (1,6).
        let c: Vec<BigInt> = [1, 4, 1].iter().map(|&x| BigInt::from(x)).collect();
        let f = f_from_c(&c, 2);
        assert_eq!(f, vec![BigInt::from(1), BigInt::from(6)]);
        assert_eq!(c_from_f(&f, 2), c);
        // Rank-3 data: c = (1,6,1) gives f = (1,8).
        let c3: Vec<BigInt> = [1, 6, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(f_from_c(&c3, 2), vec![BigInt::from(1), BigInt::from(8)]);
        // Round trip on assorted valid count vectors.
        for d in [2u32, 4, 6] {
            for seed in 0..5u64 {
                let f: Vec<BigInt> = (0..=d / 2)
                    .map(|j| BigInt::from((seed * 7 + j as u64 * 3 + 1) % 9 + 1))
                    .collect();
                let c = c_from_f(&f, d);
                assert_eq!(f_from_c(&c, d), f, "d = {d}, seed = {seed}");
            }
        }
    }

    #[test]
    fn rank2_cells_golden() {
        let cells = cell_decomposition(&rank2_spec()).unwrap();
        assert_eq!(cells.cells.len(), 7);
        assert_eq!(cells.f, vec![1, 6]);
        assert_eq!(cells.summary(), "K^6 \u{2294} (Kx)^2");
        // The dense torus cell is last and unique.
        assert_eq!(cells.cells.last().unwrap().a_bar, 2);
        assert_eq!(
            cells.e_polynomial().to_string(),
            "q^2 + 4*q + 1"
        );
        // The three mixed strata precede the (s1,s1,s1) stratum.
        let lengths: Vec<usize> = cells
            .cells
            .iter()
            .map(|c| c.wvec.total_length())
            .collect();
        assert_eq!(lengths, vec![2, 2, 2, 3, 3, 3, 3]);
    }

    #[test]
    fn rank3_cells_golden() {
        let cells = cell_decomposition(&rank3_spec()).unwrap();
        assert_eq!(cells.cells.len(), 9);
        assert_eq!(cells.f, vec![1, 8]);
        assert_eq!(cells.summary(), "K^8 \u{2294} (Kx)^2");
        assert_eq!(cells.e_polynomial().to_string(), "q^2 + 6*q + 1");
        // Case 1.1(a): the stratum (s1s2s1, s1s2) contributes exactly one
        // cell, with stays {3,5,6,7}.
        let w0 = Perm::longest(3);
        let w2 = Perm::from_one_line(&[2, 3, 1]);
        let matching: Vec<&CellDescriptor> = cells
            .cells
            .iter()
            .filter(|c| c.wvec.wdots == vec![w0.clone(), w2.clone()])
            .collect();
        assert_eq!(matching.len(), 1);
        assert_eq!(matching[0].walk.stay, vec![3, 5, 6, 7]);
        assert_eq!(matching[0].a_bar, 0);
        assert_eq!(matching[0].b_bar, 1);
    }

    #[test]
    fn non_very_generic_is_rejected() {
        let spec = CharVarSpec::new(0, vec![pt(&[1, 1]), pt(&[1, 1]), pt(&[2])]).unwrap();
        assert!(matches!(
            cell_decomposition(&spec),
            Err(CharVarError::NotVeryGeneric)
        ));
    }
}
