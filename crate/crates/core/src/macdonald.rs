//! Macdonald symmetric functions P, Q, J, the modified Macdonald functions,
//! and (q,t)-Kostka polynomials, with a Gram-Schmidt oracle.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{parse_ratfunc, MPoly, RatFunc, VarSet};
use crate::partitions::{arm_leg_hook, n_stat, partitions_of, Cell, Partition};
use crate::symfunc::{
    hall_pair, hall_pair_qt, m_coefficients, m_in_p, schur_in_p, SymSeries,
};

#[derive(Debug, Error)]
pub enum MacdonaldError {
    #[error("Kostka coefficient for lambda={0}, mu={1} is not a polynomial: {2}")]
    NonPolynomialKostka(Partition, Partition, String),
}

/// `b_lambda(s)` of the tableau formula: a ratio of hook-deformed factors
/// when `s` is in the diagram, and 1 otherwise.
fn b_cell(lambda: &Partition, s: Cell, vars: &VarSet) -> RatFunc {
    match arm_leg_hook(lambda, s) {
        Ok((a, l, _)) => {
            let one = MPoly::one(vars);
            let num = one.sub(&MPoly::from_terms(vars, [(vec![a, l + 1], BigInt::one())]));
            let den = one.sub(&MPoly::from_terms(vars, [(vec![a + 1, l], BigInt::one())]));
            RatFunc::new(num, den).unwrap()
        }
        Err(_) => RatFunc::one(vars),
    }
}

/// `psi_{lambda/mu}` for a horizontal strip `lambda - mu`: the product of
/// `b_mu(s)/b_lambda(s)` over cells in rows meeting the strip but columns
/// avoiding it.
fn psi_strip(lambda: &Partition, mu: &Partition, vars: &VarSet) -> RatFunc {
    let mut rows = std::collections::BTreeSet::new();
    let mut cols = std::collections::BTreeSet::new();
    for i in 1..=lambda.len() {
        for j in (mu.part(i) + 1)..=lambda.part(i) {
            rows.insert(i);
            cols.insert(j);
        }
    }
    let mut acc = RatFunc::one(vars);
    for s in mu.cells() {
        if rows.contains(&s.row) && !cols.contains(&(s.col as u32)) {
            acc = acc.mul(&b_cell(mu, s, vars).div(&b_cell(lambda, s, vars)).unwrap());
        }
    }
    acc
}

/// Macdonald P_lambda in the monomial basis via the semistandard-tableau
/// formula: the coefficient of m_mu is the sum of `psi_T` over SSYT of shape
/// lambda and weight mu.
pub fn macdonald_p(lambda: &Partition, vars: &VarSet) -> BTreeMap<Partition, RatFunc> {
    let n = lambda.weight();
    let mut out = BTreeMap::new();
    for mu in partitions_of(n) {
        let mut coeff = RatFunc::zero(vars);
        for t in crate::partitions::ssyt_enumerate(lambda, mu.parts()) {
            let mut psi = RatFunc::one(vars);
            for w in t.chain().windows(2) {
                psi = psi.mul(&psi_strip(&w[1], &w[0], vars));
            }
            coeff = coeff.add(&psi);
        }
        if !coeff.is_zero() {
            out.insert(mu, coeff);
        }
    }
    out
}

/// Gram-Schmidt oracle for P_lambda: orthogonalize the monomial basis in a
/// dominance-compatible order under the (q,t)-deformed pairing. Must agree
/// with `macdonald_p` exactly.
pub fn macdonald_p_oracle(lambda: &Partition, vars: &VarSet) -> BTreeMap<Partition, RatFunc> {
    let n = lambda.weight();
    // Reverse lexicographic listing is a linear extension of dominance;
    // iterate it smallest-first.
    let order: Vec<Partition> = partitions_of(n).into_iter().rev().collect();
    let mut basis: Vec<(Partition, SymSeries)> = Vec::new();
    for mu in &order {
        let mut f = m_in_p(1, n, vars, 0, mu);
        for (_, p) in &basis {
            let c = hall_pair_qt(&f, p).div(&hall_pair_qt(p, p)).unwrap();
            if !c.is_zero() {
                f = f.sub(&p.scale(&c));
            }
        }
        if *mu == *lambda {
            return m_coefficients(&f, n);
        }
        basis.push((mu.clone(), f));
    }
    unreachable!("lambda has weight n, so it appears in the listing")
}

/// The normalization factors: `c_lambda = prod (1 - q^a t^{l+1})`,
/// `c'_lambda = prod (1 - q^{a+1} t^l)`, and `b_lambda = c_lambda/c'_lambda`.
pub fn b_c_factors(lambda: &Partition, vars: &VarSet) -> (RatFunc, MPoly, MPoly) {
    let one = MPoly::one(vars);
    let mut c = MPoly::one(vars);
    let mut cp = MPoly::one(vars);
    for s in lambda.cells() {
        let (a, l, _) = arm_leg_hook(lambda, s).unwrap();
        c = c.mul(&one.sub(&MPoly::from_terms(vars, [(vec![a, l + 1], BigInt::one())])));
        cp = cp.mul(&one.sub(&MPoly::from_terms(vars, [(vec![a + 1, l], BigInt::one())])));
    }
    let b = RatFunc::new(c.clone(), cp.clone()).unwrap();
    (b, c, cp)
}

/// P_lambda in the power-sum basis.
fn p_lambda_in_p(lambda: &Partition, vars: &VarSet) -> SymSeries {
    let n = lambda.weight();
    let mut s = SymSeries::zero(1, n, vars);
    for (mu, c) in macdonald_p(lambda, vars) {
        s = s.add(&m_in_p(1, n, vars, 0, &mu).scale(&c));
    }
    s
}

/// The modified Macdonald symmetric function in the power-sum basis:
/// `J_lambda[X/(1-t)]` followed by `t -> 1/t` and the twist `t^{n(lambda)}`.
pub fn modified_macdonald(lambda: &Partition, vars: &VarSet) -> SymSeries {
    let n = lambda.weight();
    if n == 0 {
        return SymSeries::one(1, 0, vars);
    }
    let (_, c_lambda, _) = b_c_factors(lambda, vars);
    let j = p_lambda_in_p(lambda, vars).scale(&RatFunc::from_poly(c_lambda));
    let one = MPoly::one(vars);
    let t_inv = [
        RatFunc::var(vars, vars.names()[0].as_str()).unwrap(),
        RatFunc::var(vars, vars.names()[1].as_str()).unwrap().inv().unwrap(),
    ];
    let twist = RatFunc::from_poly(MPoly::monomial_at(vars, 1, n_stat(lambda), BigInt::one()));
    let mut out = SymSeries::zero(1, n, vars);
    for (key, c) in j.terms() {
        // p_rho[X/(1-t)] = p_rho / prod_i (1 - t^{rho_i}).
        let mut den = MPoly::one(vars);
        for &r in key[0].parts() {
            den = den.mul(&one.sub(&MPoly::monomial_at(vars, 1, r, BigInt::one())));
        }
        let h = c.div(&RatFunc::from_poly(den)).unwrap();
        let transformed = h.subst(vars, &t_inv).unwrap().mul(&twist);
        out = out.add(
            &SymSeries::power_sum(1, n, vars, 0, &key[0]).scale(&transformed),
        );
    }
    out
}

/// Schur expansion of the modified Macdonald function: the (q,t)-Kostka
/// polynomials. Every coefficient must be an honest polynomial; a
/// non-polynomial coefficient signals an implementation bug.
pub fn kostka_qt(
    mu: &Partition,
    vars: &VarSet,
) -> Result<BTreeMap<Partition, MPoly>, MacdonaldError> {
    let h = modified_macdonald(mu, vars);
    kostka_from_p_expansion(mu, &h, vars)
}

fn kostka_from_p_expansion(
    mu: &Partition,
    h: &SymSeries,
    vars: &VarSet,
) -> Result<BTreeMap<Partition, MPoly>, MacdonaldError> {
    let n = mu.weight();
    let mut out = BTreeMap::new();
    for lambda in partitions_of(n) {
        let s = schur_in_p(1, n, vars, 0, &lambda);
        let c = hall_pair(h, &s);
        if c.is_zero() {
            continue;
        }
        let p = c.to_poly().map_err(|_| {
            MacdonaldError::NonPolynomialKostka(lambda.clone(), mu.clone(), c.to_string())
        })?;
        out.insert(lambda, p);
    }
    Ok(out)
}

/// One cached Macdonald datum: P_lambda in the monomial basis, the modified
/// Macdonald function in the power-sum basis, and its Schur expansion.
#[derive(Clone, Debug)]
pub struct MacdonaldEntry {
    pub lambda: Partition,
    pub p_in_m: BTreeMap<Partition, RatFunc>,
    pub htilde_in_p: SymSeries,
    pub htilde_in_s: BTreeMap<Partition, MPoly>,
}

fn compute_entry(lambda: &Partition, vars: &VarSet) -> Result<MacdonaldEntry, MacdonaldError> {
    let p_in_m = macdonald_p(lambda, vars);
    let htilde_in_p = modified_macdonald(lambda, vars);
    let htilde_in_s = kostka_from_p_expansion(lambda, &htilde_in_p, vars)?;
    Ok(MacdonaldEntry {
        lambda: lambda.clone(),
        p_in_m,
        htilde_in_p,
        htilde_in_s,
    })
}

const CACHE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    entries: Vec<CacheEntry>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    lambda: Partition,
    #[serde(rename = "P_in_m")]
    p_in_m: Vec<(Partition, String)>,
    #[serde(rename = "Htilde_in_s")]
    htilde_in_s: Vec<(Partition, String)>,
}

/// A table of Macdonald data per partition, memoized in memory and
/// optionally on disk (one JSON file per weight). Cache corruption or a
/// version mismatch falls back to recomputation.
pub struct MacdonaldTable {
    vars: VarSet,
    cache_dir: Option<PathBuf>,
    memo: Mutex<BTreeMap<Partition, Arc<MacdonaldEntry>>>,
    warnings: Mutex<Vec<String>>,
}

impl MacdonaldTable {
    pub fn new() -> Self {
        MacdonaldTable::with_cache(None)
    }

    pub fn with_cache(cache_dir: Option<PathBuf>) -> Self {
        MacdonaldTable {
            vars: VarSet::qt(),
            cache_dir,
            memo: Mutex::new(BTreeMap::new()),
            warnings: Mutex::new(Vec::new()),
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn take_warnings(&self) -> Vec<String> {
        std::mem::take(&mut self.warnings.lock().unwrap())
    }

    fn warn(&self, msg: String) {
        self.warnings.lock().unwrap().push(msg);
    }

    fn cache_path(&self, n: u32) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|d| d.join(format!("macdonald_n{n}.json")))
    }

    /// Compute (or load) the entries for every partition of weight n.
    pub fn ensure_weight(&self, n: u32) -> Result<(), MacdonaldError> {
        {
            let memo = self.memo.lock().unwrap();
            if partitions_of(n).iter().all(|l| memo.contains_key(l)) {
                return Ok(());
            }
        }
        if self.load_weight(n) {
            return Ok(());
        }
        let entries: Result<Vec<MacdonaldEntry>, MacdonaldError> = partitions_of(n)
            .par_iter()
            .map(|lambda| compute_entry(lambda, &self.vars))
            .collect();
        let entries = entries?;
        {
            let mut memo = self.memo.lock().unwrap();
            for e in &entries {
                memo.insert(e.lambda.clone(), Arc::new(e.clone()));
            }
        }
        self.store_weight(n, &entries);
        Ok(())
    }

    pub fn entry(&self, lambda: &Partition) -> Result<Arc<MacdonaldEntry>, MacdonaldError> {
        self.ensure_weight(lambda.weight())?;
        Ok(self.memo.lock().unwrap()[lambda].clone())
    }

    fn load_weight(&self, n: u32) -> bool {
        let Some(path) = self.cache_path(n) else {
            return false;
        };
        let Ok(data) = std::fs::read_to_string(&path) else {
            return false;
        };
        let parsed: Result<CacheFile, _> = serde_json::from_str(&data);
        let file = match parsed {
            Ok(f) if f.version == CACHE_VERSION => f,
            Ok(f) => {
                self.warn(format!(
                    "cache {} has version {}, expected {}; rebuilding",
                    path.display(),
                    f.version,
                    CACHE_VERSION
                ));
                return false;
            }
            Err(e) => {
                self.warn(format!("cache {} is corrupt ({e}); rebuilding", path.display()));
                return false;
            }
        };
        let expected: std::collections::BTreeSet<Partition> =
            partitions_of(n).into_iter().collect();
        let mut loaded = Vec::new();
        for ce in &file.entries {
            let Some(entry) = self.decode_entry(ce) else {
                self.warn(format!(
                    "cache {} contains an undecodable entry; rebuilding",
                    path.display()
                ));
                return false;
            };
            loaded.push(entry);
        }
        if loaded.iter().map(|e| e.lambda.clone()).collect::<std::collections::BTreeSet<_>>()
            != expected
        {
            self.warn(format!(
                "cache {} has a wrong partition set; rebuilding",
                path.display()
            ));
            return false;
        }
        let mut memo = self.memo.lock().unwrap();
        for e in loaded {
            memo.insert(e.lambda.clone(), Arc::new(e));
        }
        true
    }

    fn decode_entry(&self, ce: &CacheEntry) -> Option<MacdonaldEntry> {
        let n = ce.lambda.weight();
        let mut p_in_m = BTreeMap::new();
        for (mu, s) in &ce.p_in_m {
            p_in_m.insert(mu.clone(), parse_ratfunc(&self.vars, s).ok()?);
        }
        let mut htilde_in_s = BTreeMap::new();
        let mut htilde_in_p = SymSeries::zero(1, n, &self.vars);
        for (l, s) in &ce.htilde_in_s {
            let c = parse_ratfunc(&self.vars, s).ok()?.to_poly().ok()?;
            htilde_in_p = htilde_in_p.add(
                &schur_in_p(1, n, &self.vars, 0, l).scale(&RatFunc::from_poly(c.clone())),
            );
            htilde_in_s.insert(l.clone(), c);
        }
        Some(MacdonaldEntry {
            lambda: ce.lambda.clone(),
            p_in_m,
            htilde_in_p,
            htilde_in_s,
        })
    }

    fn store_weight(&self, n: u32, entries: &[MacdonaldEntry]) {
        let Some(path) = self.cache_path(n) else {
            return;
        };
        if let Some(dir) = path.parent() {
            let _ = std::fs::create_dir_all(dir);
        }
        let file = CacheFile {
            version: CACHE_VERSION,
            entries: entries
                .iter()
                .map(|e| CacheEntry {
                    lambda: e.lambda.clone(),
                    p_in_m: e
                        .p_in_m
                        .iter()
                        .map(|(k, v)| (k.clone(), v.to_string()))
                        .collect(),
                    htilde_in_s: e
                        .htilde_in_s
                        .iter()
                        .map(|(k, v)| (k.clone(), v.to_string()))
                        .collect(),
                })
                .collect(),
        };
        match serde_json::to_string(&file) {
            Ok(json) => {
                if let Err(e) = std::fs::write(&path, json) {
                    self.warn(format!("could not write cache {}: {e}", path.display()));
                }
            }
            Err(e) => self.warn(format!("could not serialize cache: {e}")),
        }
    }
}

impl Default for MacdonaldTable {
    fn default() -> Self {
        MacdonaldTable::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_ratfunc;
    use crate::partitions::conjugate;

    fn qt() -> VarSet {
        VarSet::qt()
    }

    fn pt(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn p_of_single_box_is_m1() {
        let p = macdonald_p(&pt(&[1]), &qt());
        assert_eq!(p.len(), 1);
        assert!(p[&pt(&[1])].is_one());
    }

    #[test]
    fn ssyt_formula_matches_gram_schmidt_oracle() {
        for n in 1..=4u32 {
            for lambda in partitions_of(n) {
                assert_eq!(
                    macdonald_p(&lambda, &qt()),
                    macdonald_p_oracle(&lambda, &qt()),
                    "P_{lambda}"
                );
            }
        }
    }

    #[test]
    fn unitriangular_with_respect_to_dominance() {
        for n in 1..=5u32 {
            for lambda in partitions_of(n) {
                let p = macdonald_p(&lambda, &qt());
                assert!(p[&lambda].is_one());
                for mu in p.keys() {
                    assert!(
                        crate::partitions::dominance_leq(mu, &lambda).unwrap(),
                        "m_{mu} appears in P_{lambda}"
                    );
                }
            }
        }
    }

    #[test]
    fn orthogonality_under_qt_pairing() {
        let p2 = p_lambda_in_p(&pt(&[2]), &qt());
        let p11 = p_lambda_in_p(&pt(&[1, 1]), &qt());
        assert!(hall_pair_qt(&p2, &p11).is_zero());
    }

    #[test]
    fn q_is_dual_to_p() {
        // <P_lambda, Q_mu>_{(q,t)} = delta with Q = b * P, |lambda| <= 3.
        for n in 1..=3u32 {
            for lambda in partitions_of(n) {
                let pl = p_lambda_in_p(&lambda, &qt());
                for mu in partitions_of(n) {
                    let (b, _, _) = b_c_factors(&mu, &qt());
                    let qm = p_lambda_in_p(&mu, &qt()).scale(&b);
                    let v = hall_pair_qt(&pl, &qm);
                    if lambda == mu {
                        assert!(v.is_one(), "<P_{lambda}, Q_{mu}> = {v}");
                    } else {
                        assert!(v.is_zero(), "<P_{lambda}, Q_{mu}> = {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn c_factor_small_cases() {
        let (b, c, cp) = b_c_factors(&pt(&[1]), &qt());
        assert_eq!(c.to_string(), "1 - t");
        assert_eq!(cp.to_string(), "-q + 1");
        assert_eq!(b, parse_ratfunc(&qt(), "(1 - t)/(1 - q)").unwrap());
        let (b0, c0, cp0) = b_c_factors(&Partition::empty(), &qt());
        assert!(b0.is_one() && c0.is_one() && cp0.is_one());
    }

    #[test]
    fn c_prime_is_conjugate_c_with_swapped_variables() {
        let swap = [
            RatFunc::var(&qt(), "t").unwrap(),
            RatFunc::var(&qt(), "q").unwrap(),
        ];
        for n in 1..=4u32 {
            for lambda in partitions_of(n) {
                let (_, _, cp) = b_c_factors(&lambda, &qt());
                let (_, c_conj, _) = b_c_factors(&conjugate(&lambda), &qt());
                let swapped = RatFunc::from_poly(c_conj).subst(&qt(), &swap).unwrap();
                assert_eq!(RatFunc::from_poly(cp), swapped);
            }
        }
    }

    #[test]
    fn j_norm_is_c_times_c_prime() {
        for n in 1..=3u32 {
            for lambda in partitions_of(n) {
                let (_, c, cp) = b_c_factors(&lambda, &qt());
                let j = p_lambda_in_p(&lambda, &qt()).scale(&RatFunc::from_poly(c.clone()));
                let norm = hall_pair_qt(&j, &j);
                assert_eq!(norm, RatFunc::from_poly(c.mul(&cp)));
            }
        }
    }

    #[test]
    fn modified_macdonald_small_cases() {
        let vars = qt();
        // Htilde_(1) = p_1 = s_(1).
        assert_eq!(
            modified_macdonald(&pt(&[1]), &vars),
            SymSeries::power_sum(1, 1, &vars, 0, &pt(&[1]))
        );
        // Htilde_(2) = s_2 + q s_11; Htilde_(11) = s_2 + t s_11.
        let k2 = kostka_qt(&pt(&[2]), &vars).unwrap();
        assert_eq!(k2[&pt(&[2])].to_string(), "1");
        assert_eq!(k2[&pt(&[1, 1])].to_string(), "q");
        let k11 = kostka_qt(&pt(&[1, 1]), &vars).unwrap();
        assert_eq!(k11[&pt(&[2])].to_string(), "1");
        assert_eq!(k11[&pt(&[1, 1])].to_string(), "t");
    }

    #[test]
    fn macdonald_table_cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t1 = MacdonaldTable::with_cache(Some(dir.path().to_path_buf()));
        let e1 = t1.entry(&pt(&[2, 1])).unwrap();
        assert!(t1.take_warnings().is_empty());
        // A fresh table must load identical data from disk.
        let t2 = MacdonaldTable::with_cache(Some(dir.path().to_path_buf()));
        let e2 = t2.entry(&pt(&[2, 1])).unwrap();
        assert_eq!(e1.p_in_m, e2.p_in_m);
        assert_eq!(e1.htilde_in_s, e2.htilde_in_s);
        assert_eq!(e1.htilde_in_p, e2.htilde_in_p);
        assert!(t2.take_warnings().is_empty());
        // Corrupt the file: the table warns and recomputes.
        let path = dir.path().join("macdonald_n3.json");
        std::fs::write(&path, "{not json").unwrap();
        let t3 = MacdonaldTable::with_cache(Some(dir.path().to_path_buf()));
        let e3 = t3.entry(&pt(&[2, 1])).unwrap();
        assert_eq!(e1.htilde_in_s, e3.htilde_in_s);
        assert_eq!(t3.take_warnings().len(), 1);
    }
}
