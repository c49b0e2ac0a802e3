//! Graded, degree-truncated symmetric series over a rational-function
//! coefficient field, for several alphabets simultaneously.
//!
//! The canonical internal basis is power sums: Hall pairings, Adams
//! operations, and the plethystic Exp/Log are all diagonal or simple there.
//! Monomial and Schur expansions are conversions.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::exact::{RatFunc, VarSet};
use crate::partitions::{partitions_of, z_lambda, z_lambda_qt, Partition};

/// A symmetric series in the power-sum basis: a finite sum
/// `sum c . p_{lambda^(1)}(x_1) ... p_{lambda^(k)}(x_k)` with coefficients in
/// a rational-function field, truncated so that every stored tuple satisfies
/// `max_i |lambda^(i)| <= truncation`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymSeries {
    alphabets: usize,
    truncation: u32,
    vars: VarSet,
    terms: BTreeMap<Vec<Partition>, RatFunc>,
}

impl SymSeries {
    pub fn zero(alphabets: usize, truncation: u32, vars: &VarSet) -> Self {
        assert!(alphabets >= 1);
        SymSeries { alphabets, truncation, vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(alphabets: usize, truncation: u32, c: RatFunc) -> Self {
        let vars = c.vars().clone();
        let mut s = SymSeries::zero(alphabets, truncation, &vars);
        s.add_term(vec![Partition::empty(); alphabets], c);
        s
    }

    pub fn one(alphabets: usize, truncation: u32, vars: &VarSet) -> Self {
        SymSeries::scalar(alphabets, truncation, RatFunc::one(vars))
    }

    /// p_lambda in the given alphabet (other alphabets carry the empty
    /// partition).
    pub fn power_sum(
        alphabets: usize,
        truncation: u32,
        vars: &VarSet,
        alphabet: usize,
        lambda: &Partition,
    ) -> Self {
        assert!(alphabet < alphabets && lambda.weight() <= truncation);
        let mut key = vec![Partition::empty(); alphabets];
        key[alphabet] = lambda.clone();
        let mut s = SymSeries::zero(alphabets, truncation, vars);
        s.add_term(key, RatFunc::one(vars));
        s
    }

    pub fn alphabets(&self) -> usize {
        self.alphabets
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Partition>, &RatFunc)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, key: &[Partition]) -> RatFunc {
        self.terms
            .get(key)
            .cloned()
            .unwrap_or_else(|| RatFunc::zero(&self.vars))
    }

    fn add_term(&mut self, key: Vec<Partition>, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        if key.iter().any(|l| l.weight() > self.truncation) {
            return; // truncation contract: beyond-N terms are dropped
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = e.get().add(&c);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(self.alphabets, other.alphabets, "alphabet count mismatch");
        assert_eq!(self.truncation, other.truncation, "truncation mismatch");
        assert!(self.vars == other.vars, "coefficient field mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut r = self.clone();
        for (k, c) in &other.terms {
            r.add_term(k.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut r = self.clone();
        for (k, c) in &other.terms {
            r.add_term(k.clone(), c.neg());
        }
        r
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        if c.is_zero() {
            return SymSeries::zero(self.alphabets, self.truncation, &self.vars);
        }
        let mut r = SymSeries::zero(self.alphabets, self.truncation, &self.vars);
        for (k, v) in &self.terms {
            r.add_term(k.clone(), v.mul(c));
        }
        r
    }

    /// Product; p-basis multiplication is concatenation of partitions in each
    /// alphabet. Terms beyond the truncation are dropped.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut r = SymSeries::zero(self.alphabets, self.truncation, &self.vars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key: Vec<Partition> =
                    ka.iter().zip(kb).map(|(a, b)| a.merge(b)).collect();
                if key.iter().any(|l| l.weight() > self.truncation) {
                    continue;
                }
                r.add_term(key, ca.mul(cb));
            }
        }
        r
    }

    /// Adams operation: p_r -> p_{rd} in every alphabet, and every
    /// coefficient variable v -> v^d. Terms pushed beyond the truncation are
    /// dropped.
    pub fn adams(&self, d: u32) -> Self {
        assert!(d >= 1);
        let mut r = SymSeries::zero(self.alphabets, self.truncation, &self.vars);
        for (k, c) in &self.terms {
            let key: Vec<Partition> = k.iter().map(|l| l.scale(d)).collect();
            if key.iter().any(|l| l.weight() > self.truncation) {
                continue;
            }
            r.add_term(key, c.adams(d));
        }
        r
    }

    /// The involution omega: p_lambda -> epsilon_lambda p_lambda in every
    /// alphabet.
    pub fn omega(&self) -> Self {
        let mut r = SymSeries::zero(self.alphabets, self.truncation, &self.vars);
        for (k, c) in &self.terms {
            let sign: i8 = k.iter().map(|l| l.epsilon()).product();
            let c = if sign >= 0 { c.clone() } else { c.neg() };
            r.add_term(k.clone(), c);
        }
        r
    }

    /// Substitute the coefficient field: each coefficient variable is mapped
    /// to the corresponding rational function over `target`.
    pub fn map_coefficients(&self, target: &VarSet, images: &[RatFunc]) -> Self {
        let mut r = SymSeries::zero(self.alphabets, self.truncation, target);
        for (k, c) in &self.terms {
            r.add_term(k.clone(), c.subst(target, images).unwrap());
        }
        r
    }

    /// The diagonally homogeneous component of degree m (degree m in every
    /// alphabet simultaneously).
    pub fn diagonal_component(&self, m: u32) -> Self {
        let mut r = SymSeries::zero(self.alphabets, self.truncation, &self.vars);
        for (k, c) in &self.terms {
            if k.iter().all(|l| l.weight() == m) {
                r.add_term(k.clone(), c.clone());
            }
        }
        r
    }
}

/// h_n in the power-sum basis: `h_n = sum_{|lambda|=n} p_lambda / z_lambda`.
pub fn h_in_p(
    alphabets: usize,
    truncation: u32,
    vars: &VarSet,
    alphabet: usize,
    n: u32,
) -> SymSeries {
    let mut s = SymSeries::zero(alphabets, truncation, vars);
    for lambda in partitions_of(n) {
        let z = z_lambda(&lambda);
        let mut key = vec![Partition::empty(); alphabets];
        key[alphabet] = lambda;
        s.add_term(key, RatFunc::one(vars).div_int(z).unwrap());
    }
    s
}

/// e_n in the power-sum basis:
/// `e_n = sum_{|lambda|=n} epsilon_lambda p_lambda / z_lambda`.
pub fn e_in_p(
    alphabets: usize,
    truncation: u32,
    vars: &VarSet,
    alphabet: usize,
    n: u32,
) -> SymSeries {
    let mut s = SymSeries::zero(alphabets, truncation, vars);
    for lambda in partitions_of(n) {
        let z = z_lambda(&lambda) * BigInt::from(lambda.epsilon());
        let mut key = vec![Partition::empty(); alphabets];
        key[alphabet] = lambda;
        s.add_term(key, RatFunc::one(vars).div_int(z).unwrap());
    }
    s
}

/// h_lambda = h_{lambda_1} h_{lambda_2} ... in the given alphabet.
pub fn h_lambda_in_p(
    alphabets: usize,
    truncation: u32,
    vars: &VarSet,
    alphabet: usize,
    lambda: &Partition,
) -> SymSeries {
    let mut s = SymSeries::one(alphabets, truncation, vars);
    for &part in lambda.parts() {
        s = s.mul(&h_in_p(alphabets, truncation, vars, alphabet, part));
    }
    s
}

/// Schur function via the Jacobi-Trudi determinant
/// `s_lambda = det(h_{lambda_i - i + j})`.
pub fn schur_in_p(
    alphabets: usize,
    truncation: u32,
    vars: &VarSet,
    alphabet: usize,
    lambda: &Partition,
) -> SymSeries {
    let r = lambda.len();
    if r == 0 {
        return SymSeries::one(alphabets, truncation, vars);
    }
    // Leibniz expansion; h with negative index is zero, h_0 = 1.
    let mut acc = SymSeries::zero(alphabets, truncation, vars);
    let mut perm: Vec<usize> = (0..r).collect();
    let mut sign_stack = Vec::new();
    fn permutations(perm: &mut Vec<usize>, k: usize, out: &mut Vec<(Vec<usize>, i8)>) {
        if k == perm.len() {
            let mut inv = 0usize;
            for i in 0..perm.len() {
                for j in i + 1..perm.len() {
                    if perm[i] > perm[j] {
                        inv += 1;
                    }
                }
            }
            out.push((perm.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permutations(perm, k + 1, out);
            perm.swap(k, i);
        }
    }
    permutations(&mut perm, 0, &mut sign_stack);
    'outer: for (sigma, sign) in sign_stack {
        let mut term = SymSeries::one(alphabets, truncation, vars);
        for i in 0..r {
            let idx = lambda.part(i + 1) as i64 - (i as i64 + 1) + (sigma[i] as i64 + 1);
            if idx < 0 {
                continue 'outer;
            }
            if idx == 0 {
                continue;
            }
            term = term.mul(&h_in_p(alphabets, truncation, vars, alphabet, idx as u32));
        }
        if sign < 0 {
            term = term.scale(&RatFunc::from_int(vars, -1));
        }
        acc = acc.add(&term);
    }
    acc
}

/// Transition matrix from power sums to monomials per degree:
/// `R[lambda][mu]` is the coefficient of m_mu in p_lambda. It counts the ways
/// to distribute the parts of lambda over the rows of mu so that row j sums
/// to mu_j.
fn p_to_m_matrix(n: u32) -> &'static BTreeMap<Partition, BTreeMap<Partition, BigInt>> {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, &'static BTreeMap<Partition, BTreeMap<Partition, BigInt>>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(m) = guard.get(&n) {
        return m;
    }
    let mut matrix = BTreeMap::new();
    let mus = partitions_of(n);
    for lambda in partitions_of(n) {
        let mut row = BTreeMap::new();
        for mu in &mus {
            let count = distribute_count(lambda.parts(), mu.parts());
            if !count.is_zero() {
                row.insert(mu.clone(), count);
            }
        }
        matrix.insert(lambda, row);
    }
    let leaked: &'static _ = Box::leak(Box::new(matrix));
    guard.insert(n, leaked);
    leaked
}

fn distribute_count(parts: &[u32], capacities: &[u32]) -> BigInt {
    fn rec(parts: &[u32], remaining: &mut Vec<u32>) -> BigInt {
        match parts.first() {
            None => BigInt::one(),
            Some(&p) => {
                let mut total = BigInt::zero();
                for j in 0..remaining.len() {
                    if remaining[j] >= p {
                        remaining[j] -= p;
                        total += rec(&parts[1..], remaining);
                        remaining[j] += p;
                    }
                }
                total
            }
        }
    }
    rec(parts, &mut capacities.to_vec())
}

/// Monomial expansion of m_lambda in power sums, as exact rationals; the
/// inverse of the triangular p-to-m transition per degree.
fn m_in_p_rows(n: u32) -> &'static BTreeMap<Partition, BTreeMap<Partition, BigRational>> {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, &'static BTreeMap<Partition, BTreeMap<Partition, BigRational>>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().unwrap();
    if let Some(m) = guard.get(&n) {
        return m;
    }
    // Invert R over the rationals by Gaussian elimination in the reverse
    // lexicographic listing of partitions.
    let ps = partitions_of(n);
    let idx: BTreeMap<&Partition, usize> = ps.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let r = p_to_m_matrix(n);
    let m = ps.len();
    let mut a = vec![vec![BigRational::zero(); 2 * m]; m];
    for (i, lambda) in ps.iter().enumerate() {
        for (mu, c) in &r[lambda] {
            a[i][idx[mu]] = BigRational::from(c.clone());
        }
        a[i][m + i] = BigRational::one();
    }
    for col in 0..m {
        let pivot = (col..m)
            .find(|&row| !a[row][col].is_zero())
            .expect("transition matrix is invertible");
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for row in 0..m {
            if row != col && !a[row][col].is_zero() {
                let f = a[row][col].clone();
                for c2 in 0..2 * m {
                    let sub = &f * &a[col][c2];
                    a[row][c2] -= sub;
                }
            }
        }
    }
    // Row i of the inverse gives m_{ps[i]} = sum_j inv[i][j] p_{ps[j]}:
    // since p = R m, we have m = R^{-1} p, and R^{-1}[i][j] reads off rows of
    // the inverse transposed appropriately. R[lambda][mu] is the coefficient
    // of m_mu in p_lambda, so p-vector = R * m-vector as row expansions;
    // inverting, m_lambda = sum_mu (R^{-1})[lambda][mu] p_mu.
    let mut out = BTreeMap::new();
    for (i, lambda) in ps.iter().enumerate() {
        let mut row = BTreeMap::new();
        for (j, mu) in ps.iter().enumerate() {
            let v = a[i][m + j].clone();
            if !v.is_zero() {
                row.insert(mu.clone(), v);
            }
        }
        out.insert(lambda.clone(), row);
    }
    let leaked: &'static _ = Box::leak(Box::new(out));
    guard.insert(n, leaked);
    leaked
}

/// m_lambda in the power-sum basis.
pub fn m_in_p(
    alphabets: usize,
    truncation: u32,
    vars: &VarSet,
    alphabet: usize,
    lambda: &Partition,
) -> SymSeries {
    let rows = m_in_p_rows(lambda.weight());
    let mut s = SymSeries::zero(alphabets, truncation, vars);
    for (mu, c) in &rows[lambda] {
        let mut key = vec![Partition::empty(); alphabets];
        key[alphabet] = mu.clone();
        s.add_term(key, RatFunc::from_ratio(vars, c));
    }
    s
}

/// Monomial-basis coefficients of the degree-n component of a
/// single-alphabet series.
pub fn m_coefficients(a: &SymSeries, degree: u32) -> BTreeMap<Partition, RatFunc> {
    assert_eq!(a.alphabets(), 1, "m_coefficients expects a single alphabet");
    let r = p_to_m_matrix(degree);
    let mut out: BTreeMap<Partition, RatFunc> = BTreeMap::new();
    for (key, c) in a.terms() {
        let lambda = &key[0];
        if lambda.weight() != degree {
            continue;
        }
        for (mu, count) in &r[lambda] {
            let add = c.mul_int(count.clone());
            let cur = out
                .entry(mu.clone())
                .or_insert_with(|| RatFunc::zero(a.vars()));
            *cur = cur.add(&add);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// The Hall pairing: `<p_lambda, p_mu> = z_lambda delta`, extended to k
/// alphabets multiplicatively.
pub fn hall_pair(a: &SymSeries, b: &SymSeries) -> RatFunc {
    a.assert_compatible(b);
    let mut acc = RatFunc::zero(a.vars());
    for (key, ca) in a.terms() {
        let cb = b.coefficient(key);
        if cb.is_zero() {
            continue;
        }
        let mut z = BigInt::one();
        for l in key {
            z *= z_lambda(l);
        }
        acc = acc.add(&ca.mul(&cb).mul_int(z));
    }
    acc
}

/// The (q,t)-deformed Hall pairing:
/// `<p_lambda, p_mu>_{(q,t)} = z_lambda(q,t) delta`, extended to k alphabets.
/// The first two coefficient variables play q and t.
pub fn hall_pair_qt(a: &SymSeries, b: &SymSeries) -> RatFunc {
    a.assert_compatible(b);
    let mut acc = RatFunc::zero(a.vars());
    for (key, ca) in a.terms() {
        let cb = b.coefficient(key);
        if cb.is_zero() {
            continue;
        }
        let mut z = RatFunc::one(a.vars());
        for l in key {
            z = z.mul(&z_lambda_qt(l, a.vars()));
        }
        acc = acc.add(&ca.mul(&cb).mul(&z));
    }
    acc
}

/// Schur-basis coefficients of a single-alphabet series up to its
/// truncation, via `<f, s_lambda>`.
pub fn s_coefficients(a: &SymSeries) -> BTreeMap<Partition, RatFunc> {
    assert_eq!(a.alphabets(), 1);
    let mut out = BTreeMap::new();
    for n in 0..=a.truncation() {
        for lambda in partitions_of(n) {
            let s = schur_in_p(1, a.truncation(), a.vars(), 0, &lambda);
            let c = hall_pair(a, &s);
            if !c.is_zero() {
                out.insert(lambda, c);
            }
        }
    }
    out
}

/// The ordinary Moebius function.
pub fn mobius(n: u64) -> i64 {
    assert!(n >= 1);
    let mut n = n;
    let mut r = 1i64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if n > 1 {
        r = -r;
    }
    r
}

/// A series graded by diagonal degree: component m is diagonally homogeneous
/// of degree m in every alphabet. This is the T-grading used by the
/// plethystic Exp and Log.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalSeries {
    comps: Vec<SymSeries>, // index = diagonal degree, length = truncation + 1
}

impl DiagonalSeries {
    pub fn zero(alphabets: usize, truncation: u32, vars: &VarSet) -> Self {
        let comps = (0..=truncation)
            .map(|_| SymSeries::zero(alphabets, truncation, vars))
            .collect();
        DiagonalSeries { comps }
    }

    pub fn one(alphabets: usize, truncation: u32, vars: &VarSet) -> Self {
        let mut d = DiagonalSeries::zero(alphabets, truncation, vars);
        d.comps[0] = SymSeries::one(alphabets, truncation, vars);
        d
    }

    pub fn truncation(&self) -> u32 {
        (self.comps.len() - 1) as u32
    }

    pub fn alphabets(&self) -> usize {
        self.comps[0].alphabets()
    }

    pub fn vars(&self) -> &VarSet {
        self.comps[0].vars()
    }

    pub fn component(&self, m: u32) -> &SymSeries {
        &self.comps[m as usize]
    }

    /// Install a diagonally homogeneous component.
    pub fn set_component(&mut self, m: u32, s: SymSeries) {
        assert_eq!(s.diagonal_component(m), s, "component must be diagonal of degree {m}");
        self.comps[m as usize] = s;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.comps.len(), other.comps.len());
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.add(b))
            .collect();
        DiagonalSeries { comps }
    }

    pub fn scale(&self, c: &RatFunc) -> Self {
        DiagonalSeries { comps: self.comps.iter().map(|s| s.scale(c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.comps.len(), other.comps.len());
        let n = self.comps.len();
        let mut comps: Vec<SymSeries> = (0..n)
            .map(|_| SymSeries::zero(self.alphabets(), self.truncation(), self.vars()))
            .collect();
        for i in 0..n {
            if self.comps[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if other.comps[j].is_zero() {
                    continue;
                }
                comps[i + j] = comps[i + j].add(&self.comps[i].mul(&other.comps[j]));
            }
        }
        DiagonalSeries { comps }
    }

    /// Adams operation: component m moves to degree d*m (dropped beyond the
    /// truncation), alphabets and coefficients raised to d-th powers.
    pub fn adams(&self, d: u32) -> Self {
        let mut out = DiagonalSeries::zero(self.alphabets(), self.truncation(), self.vars());
        for (m, s) in self.comps.iter().enumerate() {
            let target = m as u32 * d;
            if target > self.truncation() || s.is_zero() {
                continue;
            }
            out.comps[target as usize] = s.adams(d);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|s| s.is_zero())
    }

    fn scalar_component_is(&self, v: &RatFunc) -> bool {
        let key = vec![Partition::empty(); self.alphabets()];
        self.comps[0].coefficient(&key) == *v
            && self.comps[0].terms().count() <= 1
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlethysmError {
    #[error("Exp requires a zero constant term")]
    ExpNonzeroConstant,
    #[error("Log requires constant term 1")]
    LogConstantNotOne,
}

/// Plethystic exponential: `Exp(V) = exp(sum_{r>=1} p_r[V]/r)` with the
/// diagonal degree as the implicit T-grading.
pub fn exp_pleth(v: &DiagonalSeries) -> Result<DiagonalSeries, PlethysmError> {
    if !v.comps[0].is_zero() {
        return Err(PlethysmError::ExpNonzeroConstant);
    }
    let n = v.truncation();
    let vars = v.vars().clone();
    let mut w = DiagonalSeries::zero(v.alphabets(), n, &vars);
    for r in 1..=n.max(1) {
        let a = v.adams(r);
        if a.is_zero() {
            continue;
        }
        w = w.add(&a.scale(&RatFunc::one(&vars).div_int(BigInt::from(r)).unwrap()));
    }
    // exp(W) truncated: sum_j W^j / j!.
    let mut acc = DiagonalSeries::one(v.alphabets(), n, &vars);
    let mut power = DiagonalSeries::one(v.alphabets(), n, &vars);
    let mut factorial = BigInt::one();
    for j in 1..=n {
        power = power.mul(&w);
        factorial *= BigInt::from(j);
        if power.is_zero() {
            break;
        }
        acc = acc.add(&power.scale(&RatFunc::one(&vars).div_int(factorial.clone()).unwrap()));
    }
    Ok(acc)
}

/// Plethystic logarithm, the inverse of `exp_pleth`: with
/// `log(F) = sum U_m T^m / m`, the output has components
/// `V_n = (1/n) sum_{d|n} mu(d) p_d[U_{n/d}]`.
pub fn log_pleth(f: &DiagonalSeries) -> Result<DiagonalSeries, PlethysmError> {
    let vars = f.vars().clone();
    if !f.scalar_component_is(&RatFunc::one(&vars)) {
        return Err(PlethysmError::LogConstantNotOne);
    }
    let n = f.truncation();
    let k = f.alphabets();
    let mut g = f.clone();
    g.comps[0] = SymSeries::zero(k, n, &vars);
    // log(1 + G) = sum_{j>=1} (-1)^{j+1} G^j / j.
    let mut log = DiagonalSeries::zero(k, n, &vars);
    let mut power = DiagonalSeries::one(k, n, &vars);
    for j in 1..=n {
        power = power.mul(&g);
        if power.is_zero() {
            break;
        }
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let c = RatFunc::from_int(&vars, sign).div_int(BigInt::from(j)).unwrap();
        log = log.add(&power.scale(&c));
    }
    // U_m = m * log_m; then Moebius-invert the Adams operations.
    let mut u = DiagonalSeries::zero(k, n, &vars);
    for m in 1..=n {
        u.comps[m as usize] = log.comps[m as usize].scale(&RatFunc::from_int(&vars, m as i64));
    }
    let mut out = DiagonalSeries::zero(k, n, &vars);
    for nn in 1..=n {
        let mut acc = SymSeries::zero(k, n, &vars);
        for d in 1..=nn {
            if nn % d != 0 {
                continue;
            }
            let mu = mobius(d as u64);
            if mu == 0 {
                continue;
            }
            let scaled = u.comps[(nn / d) as usize].adams(d);
            acc = acc.add(&scaled.scale(&RatFunc::from_int(&vars, mu)));
        }
        out.comps[nn as usize] =
            acc.scale(&RatFunc::one(&vars).div_int(BigInt::from(nn)).unwrap());
    }
    Ok(out)
}

/// Convenience: exact rational constants embedded in the coefficient field.
pub fn rf_ratio(vars: &VarSet, num: i64, den: i64) -> RatFunc {
    RatFunc::from_int(vars, num).div(&RatFunc::from_int(vars, den)).unwrap()
}

/// Series serialize as a list of `{partitions, coeff}` records, with the
/// coefficient in canonical string form.
impl serde::Serialize for SymSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        #[derive(serde::Serialize)]
        struct Record<'a> {
            partitions: &'a [Partition],
            coeff: String,
        }
        for (key, c) in &self.terms {
            seq.serialize_element(&Record { partitions: key, coeff: c.to_string() })?;
        }
        seq.end()
    }
}
