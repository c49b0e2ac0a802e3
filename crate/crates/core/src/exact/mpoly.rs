//! Sparse multivariate polynomials over arbitrary-precision integers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// An ordered set of variable names, shared cheaply between values.
#[derive(Clone, Debug, Eq)]
pub struct VarSet(Arc<Vec<String>>);

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl VarSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        VarSet(Arc::new(names.into_iter().map(Into::into).collect()))
    }

    /// The field Q(q,t) used by the Macdonald machinery.
    pub fn qt() -> Self {
        VarSet::new(["q", "t"])
    }

    /// The field Q(z,w) used by the HLRV functions.
    pub fn zw() -> Self {
        VarSet::new(["z", "w"])
    }

    /// Single variable q, for E-polynomials and weight polynomials.
    pub fn q() -> Self {
        VarSet::new(["q"])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|v| v == name)
    }
}

/// Graded lexicographic comparison of exponent vectors, with the fixed
/// variable order of the ambient `VarSet`.
pub(crate) fn cmp_grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// A sparse multivariate polynomial with `BigInt` coefficients.
///
/// Invariants: no zero coefficients are stored, and every exponent vector
/// has length equal to the number of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MPoly {
    vars: VarSet,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl MPoly {
    pub fn zero(vars: &VarSet) -> Self {
        MPoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &VarSet) -> Self {
        MPoly::constant(vars, BigInt::one())
    }

    pub fn constant(vars: &VarSet, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; vars.len()], c);
        }
        MPoly { vars: vars.clone(), terms }
    }

    pub fn var(vars: &VarSet, name: &str) -> Result<Self, AlgebraError> {
        let i = vars
            .index_of(name)
            .ok_or_else(|| AlgebraError::UnknownVariable(name.to_string()))?;
        Ok(MPoly::monomial_at(vars, i, 1, BigInt::one()))
    }

    /// c * v_i^e for the i-th variable.
    pub fn monomial_at(vars: &VarSet, index: usize, exp: u32, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            let mut key = vec![0u32; vars.len()];
            key[index] = exp;
            terms.insert(key, c);
        }
        MPoly { vars: vars.clone(), terms }
    }

    pub fn from_terms(
        vars: &VarSet,
        it: impl IntoIterator<Item = (Vec<u32>, BigInt)>,
    ) -> Self {
        let mut p = MPoly::zero(vars);
        for (k, c) in it {
            assert_eq!(k.len(), vars.len(), "exponent vector length mismatch");
            p.add_term(k, c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
            || (self.terms.len() == 1 && self.terms.keys().next().unwrap().iter().all(|&e| e == 0))
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        if self.terms.is_empty() {
            return Some(BigInt::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| k.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|k| k[var]).max().unwrap_or(0)
    }

    fn add_term(&mut self, key: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn assert_same_vars(&self, other: &Self) {
        assert!(
            self.vars == other.vars,
            "variable set mismatch: {:?} vs {:?}",
            self.vars.names(),
            other.vars.names()
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut r = self.clone();
        for (k, c) in &other.terms {
            r.add_term(k.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut r = self.clone();
        for (k, c) in &other.terms {
            r.add_term(k.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect();
        MPoly { vars: self.vars.clone(), terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_vars(other);
        let mut r = MPoly::zero(&self.vars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key: Vec<u32> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                r.add_term(key, ca * cb);
            }
        }
        r
    }

    pub fn mul_int(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return MPoly::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        MPoly { vars: self.vars.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = MPoly::one(&self.vars);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Leading term under graded lex; `None` for the zero polynomial.
    pub fn leading_term(&self) -> Option<(&Vec<u32>, &BigInt)> {
        self.terms.iter().max_by(|(a, _), (b, _)| cmp_grlex(a, b))
    }

    pub fn leading_coeff_sign_positive(&self) -> bool {
        self.leading_term().map(|(_, c)| c.is_positive()).unwrap_or(true)
    }

    /// Integer content with the sign of the graded-lex leading coefficient.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if !self.leading_coeff_sign_positive() {
            g = -g;
        }
        g
    }

    /// Exact division; error when `other` does not divide `self`.
    pub fn divexact(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.assert_same_vars(other);
        if other.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let mut rem = self.clone();
        let mut quot = MPoly::zero(&self.vars);
        let (lk, lc) = {
            let (k, c) = other.leading_term().unwrap();
            (k.clone(), c.clone())
        };
        while !rem.is_zero() {
            let (rk, rc) = {
                let (k, c) = rem.leading_term().unwrap();
                (k.clone(), c.clone())
            };
            if rk.iter().zip(&lk).any(|(a, b)| a < b) {
                return Err(AlgebraError::InexactDivision);
            }
            let (q, r) = rc.div_rem(&lc);
            if !r.is_zero() {
                return Err(AlgebraError::InexactDivision);
            }
            let qk: Vec<u32> = rk.iter().zip(&lk).map(|(a, b)| a - b).collect();
            let qt = MPoly::from_terms(&self.vars, [(qk, q)]);
            rem = rem.sub(&qt.mul(other));
            quot = quot.add(&qt);
        }
        Ok(quot)
    }

    pub fn div_int_exact(&self, c: &BigInt) -> Self {
        assert!(!c.is_zero());
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| {
                let (q, r) = v.div_rem(c);
                assert!(r.is_zero(), "inexact integer division in content removal");
                (k.clone(), q)
            })
            .collect();
        MPoly { vars: self.vars.clone(), terms }
    }

    /// Coefficients of `self` viewed as a univariate polynomial in variable
    /// `var`; each coefficient has exponent zero in `var`.
    fn coeffs_in(&self, var: usize) -> BTreeMap<u32, MPoly> {
        let mut out: BTreeMap<u32, MPoly> = BTreeMap::new();
        for (k, c) in &self.terms {
            let e = k[var];
            let mut k2 = k.clone();
            k2[var] = 0;
            out.entry(e)
                .or_insert_with(|| MPoly::zero(&self.vars))
                .add_term(k2, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Content of `self` over ZZ[other vars], viewed in variable `var`.
    fn content_in(&self, var: usize) -> MPoly {
        let cs = self.coeffs_in(var);
        let mut g = MPoly::zero(&self.vars);
        for c in cs.values() {
            g = MPoly::gcd(&g, c);
        }
        g
    }

    fn shift_mul(&self, var: usize, exp: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut k2 = k.clone();
                k2[var] += exp;
                (k2, c.clone())
            })
            .collect();
        MPoly { vars: self.vars.clone(), terms }
    }

    /// Pseudo-remainder of `self` by `other` in variable `var`.
    fn prem(&self, other: &Self, var: usize) -> Self {
        let dg = other.degree_in(var);
        let lcg = other
            .coeffs_in(var)
            .remove(&dg)
            .expect("nonzero divisor has a leading coefficient");
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= dg {
            let dr = r.degree_in(var);
            let lcr = r.coeffs_in(var).remove(&dr).unwrap();
            r = r.mul(&lcg).sub(&other.mul(&lcr).shift_mul(var, dr - dg));
        }
        r
    }

    fn normalize_sign(mut self) -> Self {
        if !self.leading_coeff_sign_positive() {
            self = self.neg();
        }
        self
    }

    /// Image of `self` as a univariate polynomial in `var` modulo the probe
    /// prime, with every other variable evaluated at `alphas`. Coefficients
    /// are listed lowest degree first. `None` when the leading coefficient
    /// vanishes (the probe is then inconclusive).
    fn eval_uni_mod(&self, var: usize, alphas: &[u64]) -> Option<Vec<u64>> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![0u64; d + 1];
        for (k, c) in &self.terms {
            let r = c.mod_floor(&BigInt::from(PROBE_PRIME));
            let mut acc: u128 = r.to_u128().unwrap();
            for (j, &e) in k.iter().enumerate() {
                if j == var || e == 0 {
                    continue;
                }
                acc = acc * pow_mod(alphas[j] as u128, e) % PROBE_PRIME;
            }
            let slot = &mut out[k[var] as usize];
            *slot = ((*slot as u128 + acc) % PROBE_PRIME) as u64;
        }
        if out[d] == 0 {
            None
        } else {
            Some(out)
        }
    }

    /// Monte-Carlo coprimality test in the main variable: when the leading
    /// coefficients survive the evaluation, a constant gcd of the univariate
    /// images certifies that the polynomials share no factor involving
    /// `var`. One-sided: `false` means "maybe not coprime".
    fn probe_coprime(f: &Self, g: &Self, var: usize) -> bool {
        for alphas in [
            [2u64, 3, 5, 7, 11, 13, 17, 19].as_slice(),
            [23u64, 29, 31, 37, 41, 43, 47, 53].as_slice(),
        ] {
            if f.vars.len() > alphas.len() {
                return false;
            }
            let (Some(a), Some(b)) =
                (f.eval_uni_mod(var, alphas), g.eval_uni_mod(var, alphas))
            else {
                continue;
            };
            if uni_gcd_is_constant_mod(a, b) {
                return true;
            }
        }
        false
    }

    /// Multivariate gcd: content splitting, a modular coprimality probe, a
    /// Brown-style single-prime evaluation/interpolation fast path (verified
    /// by exact division), and a primitive pseudo-remainder sequence as the
    /// unconditional fallback.
    ///
    /// The result is sign-normalized: its graded-lex leading coefficient is
    /// positive. `gcd(0, 0) = 0`.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.clone().normalize_sign();
        }
        if b.is_zero() {
            return a.clone().normalize_sign();
        }
        a.assert_same_vars(b);
        if a.is_constant() || b.is_constant() {
            let g = a.content().gcd(&b.content());
            return MPoly::constant(&a.vars, g);
        }
        // Main variable: the last one appearing in either operand.
        let nv = a.vars.len();
        let var = (0..nv)
            .rev()
            .find(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0)
            .unwrap();
        if a.degree_in(var) == 0 || b.degree_in(var) == 0 {
            // One operand is free of the main variable: gcd divides the
            // content of the other.
            let (flat, tall) = if a.degree_in(var) == 0 { (a, b) } else { (b, a) };
            return MPoly::gcd(flat, &tall.content_in(var)).normalize_sign();
        }

        // Cheap one-sided coprimality certificate before any heavy lifting:
        // when it fires, the gcd cannot involve the main variable and is the
        // gcd of the contents.
        if MPoly::probe_coprime(a, b, var) {
            return MPoly::gcd(&a.content_in(var), &b.content_in(var)).normalize_sign();
        }
        let conta = a.content_in(var);
        let contb = b.content_in(var);
        let c = MPoly::gcd(&conta, &contb);
        let mut f = a.divexact(&conta).unwrap();
        let mut g = b.divexact(&contb).unwrap();
        if f.degree_in(var) < g.degree_in(var) {
            std::mem::swap(&mut f, &mut g);
        }
        if let Some(h) = MPoly::gcd_modular(&f, &g, var) {
            return c.mul(&h).normalize_sign();
        }
        loop {
            let r = f.prem(&g, var);
            if r.is_zero() {
                break;
            }
            let cont = r.content_in(var);
            let r = r.divexact(&cont).unwrap();
            f = g;
            g = r;
            if g.degree_in(var) == 0 {
                // Coprime up to content.
                return c.normalize_sign();
            }
        }
        let cont = g.content_in(var);
        let g = g.divexact(&cont).unwrap();
        c.mul(&g).normalize_sign()
    }

    /// Brown's evaluation/interpolation gcd over one prime, for operands
    /// that are primitive in `var` and involve at most one other variable.
    /// Unlucky evaluations or oversized true coefficients make the final
    /// division check fail, in which case the caller falls back to the
    /// pseudo-remainder sequence. A `Some` result is the exact primitive
    /// gcd.
    fn gcd_modular(f: &Self, g: &Self, var: usize) -> Option<MPoly> {
        let nv = f.vars.len();
        let others: Vec<usize> = (0..nv)
            .filter(|&v| v != var && (f.degree_in(v) > 0 || g.degree_in(v) > 0))
            .collect();
        if others.len() > 1 {
            return None;
        }
        if others.is_empty() {
            return MPoly::gcd_modular_univariate(f, g, var);
        }
        let u = others[0];
        // Leading coefficients in var are univariate in u; their gcd scales
        // the interpolated images so the leading term interpolates to a
        // polynomial rather than a rational function.
        let lcf = f.coeffs_in(var).remove(&f.degree_in(var)).unwrap();
        let lcg = g.coeffs_in(var).remove(&g.degree_in(var)).unwrap();
        let gamma = MPoly::gcd(&lcf, &lcg);
        let needed =
            (gamma.degree_in(u) + f.degree_in(u).min(g.degree_in(u)) + 1) as usize;
        let mut points: Vec<u64> = Vec::with_capacity(needed);
        let mut images: Vec<Vec<u64>> = Vec::with_capacity(needed);
        let mut dmin = usize::MAX;
        let mut alpha: u64 = 0;
        let mut attempts = 0;
        while images.len() < needed {
            attempts += 1;
            if attempts > 4 * needed + 64 {
                return None;
            }
            alpha += 1;
            let assign = |p: &MPoly| -> Option<Vec<u64>> {
                let mut alphas = vec![0u64; nv];
                alphas[u] = alpha;
                p.eval_uni_mod(var, &alphas)
            };
            let (Some(fa), Some(ga)) = (assign(f), assign(g)) else {
                continue;
            };
            let Some(mut h) = uni_gcd_mod(fa, ga) else {
                continue;
            };
            let d = h.len() - 1;
            if d == 0 {
                // Coprime in var after all (the probe is one-sided).
                return Some(MPoly::one(&f.vars));
            }
            if d < dmin {
                dmin = d;
                points.clear();
                images.clear();
            } else if d > dmin {
                continue; // unlucky evaluation
            }
            // Normalize the image to leading coefficient gamma(alpha).
            let mut galpha = 0u128;
            for (k, cf) in &gamma.terms {
                let r = cf.mod_floor(&BigInt::from(PROBE_PRIME)).to_u128().unwrap();
                galpha = (galpha + r * pow_mod(alpha as u128, k[u])) % PROBE_PRIME;
            }
            if galpha == 0 {
                continue;
            }
            let scale = galpha * inv_mod(*h.last().unwrap() as u128) % PROBE_PRIME;
            for x in h.iter_mut() {
                *x = (*x as u128 * scale % PROBE_PRIME) as u64;
            }
            points.push(alpha);
            images.push(h);
        }
        // Lagrange interpolation per var-coefficient, then symmetric lift.
        let m = points.len();
        let mut candidate = MPoly::zero(&f.vars);
        let half = BigInt::from(PROBE_PRIME / 2);
        for e in 0..=dmin {
            let values: Vec<u64> = images.iter().map(|h| h[e]).collect();
            let coeffs = lagrange_interpolate_mod(&points, &values);
            for (j, &cj) in coeffs.iter().enumerate().take(m) {
                if cj == 0 {
                    continue;
                }
                let mut v = BigInt::from(cj);
                if v > half {
                    v -= BigInt::from(PROBE_PRIME);
                }
                let mut key = vec![0u32; nv];
                key[var] = e as u32;
                key[u] = j as u32;
                candidate.add_term(key, v);
            }
        }
        if candidate.is_zero() {
            return None;
        }
        let cont = candidate.content_in(var);
        let candidate = candidate.divexact(&cont).unwrap();
        // Verification makes the single-prime approach sound.
        if f.divexact(&candidate).is_ok() && g.divexact(&candidate).is_ok() {
            Some(candidate)
        } else {
            None
        }
    }

    /// Single-prime gcd for honest univariate operands: one monic image,
    /// scaled by the integer gcd of the leading coefficients, symmetric
    /// lift, and a division check.
    fn gcd_modular_univariate(f: &Self, g: &Self, var: usize) -> Option<MPoly> {
        let nv = f.vars.len();
        let alphas = vec![0u64; nv];
        let (Some(fa), Some(ga)) = (f.eval_uni_mod(var, &alphas), g.eval_uni_mod(var, &alphas))
        else {
            return None;
        };
        let mut h = uni_gcd_mod(fa, ga)?;
        if h.len() == 1 {
            return Some(MPoly::one(&f.vars));
        }
        let lcf = f.coeffs_in(var).remove(&f.degree_in(var)).unwrap().content();
        let lcg = g.coeffs_in(var).remove(&g.degree_in(var)).unwrap().content();
        let gamma = lcf.gcd(&lcg).mod_floor(&BigInt::from(PROBE_PRIME)).to_u128().unwrap();
        let scale = gamma * inv_mod(*h.last().unwrap() as u128) % PROBE_PRIME;
        for x in h.iter_mut() {
            *x = (*x as u128 * scale % PROBE_PRIME) as u64;
        }
        let mut candidate = MPoly::zero(&f.vars);
        let half = BigInt::from(PROBE_PRIME / 2);
        for (e, &he) in h.iter().enumerate() {
            if he == 0 {
                continue;
            }
            let mut v = BigInt::from(he);
            if v > half {
                v -= BigInt::from(PROBE_PRIME);
            }
            let mut key = vec![0u32; nv];
            key[var] = e as u32;
            candidate.add_term(key, v);
        }
        let content = candidate.content();
        let candidate = candidate.div_int_exact(&content);
        if f.divexact(&candidate).is_ok() && g.divexact(&candidate).is_ok() {
            Some(candidate)
        } else {
            None
        }
    }

    /// Substitute each variable by a polynomial over a possibly different
    /// variable set. `images[i]` replaces the i-th variable.
    pub fn subst(&self, target: &VarSet, images: &[MPoly]) -> MPoly {
        assert_eq!(images.len(), self.vars.len());
        let mut out = MPoly::zero(target);
        for (k, c) in &self.terms {
            let mut t = MPoly::constant(target, c.clone());
            for (i, &e) in k.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&images[i].pow(e));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Raise every variable to the d-th power (the Adams operation on the
    /// usual lambda-ring of polynomials).
    pub fn adams(&self, d: u32) -> MPoly {
        assert!(d >= 1);
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.iter().map(|&e| e * d).collect(), c.clone()))
            .collect();
        MPoly { vars: self.vars.clone(), terms }
    }

    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = BigRational::zero();
        for (k, c) in &self.terms {
            let mut t = BigRational::from(c.clone());
            for (i, &e) in k.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }
}

const PROBE_PRIME: u128 = (1 << 61) - 1;

fn pow_mod(mut base: u128, mut exp: u32) -> u128 {
    base %= PROBE_PRIME;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % PROBE_PRIME;
        }
        base = base * base % PROBE_PRIME;
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u128) -> u128 {
    // Fermat: the probe prime is prime.
    let mut acc: u128 = 1;
    let mut base = a % PROBE_PRIME;
    let mut exp = PROBE_PRIME - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % PROBE_PRIME;
        }
        base = base * base % PROBE_PRIME;
        exp >>= 1;
    }
    acc
}

/// Euclid on coefficient vectors mod the probe prime (lowest degree first).
/// Returns the monic gcd, or `None` when an input is zero.
fn uni_gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>) -> Option<Vec<u64>> {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() || b.is_empty() {
        return None;
    }
    while !b.is_empty() {
        // a := a mod b.
        let inv = inv_mod(*b.last().unwrap() as u128);
        while a.len() >= b.len() {
            let la = *a.last().unwrap() as u128;
            if la == 0 {
                a.pop();
                continue;
            }
            let factor = la * inv % PROBE_PRIME;
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                let sub = bi as u128 * factor % PROBE_PRIME;
                let slot = &mut a[i + shift];
                *slot = ((*slot as u128 + PROBE_PRIME - sub) % PROBE_PRIME) as u64;
            }
            a.pop();
        }
        trim(&mut a);
        std::mem::swap(&mut a, &mut b);
    }
    let inv = inv_mod(*a.last().unwrap() as u128);
    for x in a.iter_mut() {
        *x = (*x as u128 * inv % PROBE_PRIME) as u64;
    }
    Some(a)
}

fn uni_gcd_is_constant_mod(a: Vec<u64>, b: Vec<u64>) -> bool {
    matches!(uni_gcd_mod(a, b), Some(h) if h.len() == 1)
}

/// Lagrange interpolation mod the probe prime: the unique polynomial of
/// degree < points.len() through (points[i], values[i]), coefficients lowest
/// degree first.
fn lagrange_interpolate_mod(points: &[u64], values: &[u64]) -> Vec<u64> {
    let m = points.len();
    // Full product prod (x - x_i), lowest degree first.
    let mut master = vec![0u64; m + 1];
    master[0] = 1;
    for (i, &xi) in points.iter().enumerate() {
        // master *= (x - xi)
        let neg = (PROBE_PRIME - xi as u128 % PROBE_PRIME) % PROBE_PRIME;
        for j in (0..=i + 1).rev() {
            let lower = if j > 0 { master[j - 1] as u128 } else { 0 };
            master[j] = ((master[j] as u128 * neg + lower) % PROBE_PRIME) as u64;
        }
    }
    let mut out = vec![0u64; m];
    for (&xi, &yi) in points.iter().zip(values) {
        // Synthetic division: master / (x - xi).
        let mut quotient = vec![0u64; m];
        let mut carry: u128 = 0;
        for j in (0..m).rev() {
            carry = (master[j + 1] as u128 + carry * xi as u128) % PROBE_PRIME;
            quotient[j] = carry as u64;
        }
        // Denominator: prod_{j != i} (x_i - x_j) = quotient(x_i).
        let mut denom: u128 = 0;
        for &qj in quotient.iter().rev() {
            denom = (denom * xi as u128 + qj as u128) % PROBE_PRIME;
        }
        let scale = yi as u128 * inv_mod(denom) % PROBE_PRIME;
        for (slot, &qj) in out.iter_mut().zip(&quotient) {
            *slot = ((*slot as u128 + qj as u128 * scale) % PROBE_PRIME) as u64;
        }
    }
    out
}

/// Printing order: descending in the first variable's exponent, then
/// ascending in the remaining ones. This writes `z^2 + 4 + w^2` and
/// `q^2 + 4*q + 1` the way humans do.
fn cmp_print(a: &[u32], b: &[u32]) -> Ordering {
    if a.is_empty() {
        return Ordering::Equal;
    }
    b[0].cmp(&a[0]).then_with(|| a[1..].cmp(&b[1..]))
}

impl MPoly {
    /// Sign of the first term in printing order; used to pick the display
    /// sign of fractions.
    pub(crate) fn print_leading_positive(&self) -> bool {
        self.terms
            .iter()
            .min_by(|(a, _), (b, _)| cmp_print(a, b))
            .map(|(_, c)| c.is_positive())
            .unwrap_or(true)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        keys.sort_by(|a, b| cmp_print(a, b));
        for (idx, k) in keys.iter().enumerate() {
            let c = &self.terms[*k];
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !abs.is_one() || k.iter().all(|&e| e == 0) {
                parts.push(abs.to_string());
            }
            for (i, &e) in k.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(self.vars.names()[i].clone()),
                    _ => parts.push(format!("{}^{}", self.vars.names()[i], e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
