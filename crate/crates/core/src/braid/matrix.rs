//! Exact rational braid matrices, Bruhat classification by column reduction,
//! and the inductive cell construction: sampling a point of a prescribed
//! cell and reading off the microlocal monodromy.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::perm::Perm;
use super::walk::Walk;
use super::word::BraidWord;

#[derive(Debug, Error)]
pub enum BraidMatrixError {
    #[error("matrix is singular")]
    Singular,
    #[error("point does not lie in the braid variety (final stratum {0})")]
    NotInBraidVariety(Perm),
    #[error("stay coordinate at position {0} must be nonzero")]
    ZeroStayCoordinate(usize),
    #[error("expected {expected} coordinates for {kind} positions, got {got}")]
    CoordinateCount { kind: &'static str, expected: usize, got: usize },
}

/// A square matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<BigRational>, // row major
}

impl RatMatrix {
    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix { n, entries: vec![BigRational::zero(); n * n] };
        for i in 0..n {
            *m.at_mut(i, i) = BigRational::one();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn at(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.n + col]
    }

    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut BigRational {
        &mut self.entries[row * self.n + col]
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = RatMatrix { n, entries: vec![BigRational::zero(); n * n] };
        for i in 0..n {
            for k in 0..n {
                if self.at(i, k).is_zero() {
                    continue;
                }
                for j in 0..n {
                    if other.at(k, j).is_zero() {
                        continue;
                    }
                    let add = self.at(i, k) * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    /// The permutation matrix of w: column x holds e_{w(x)}.
    pub fn permutation(w: &Perm) -> RatMatrix {
        let n = w.n();
        let mut m = RatMatrix { n, entries: vec![BigRational::zero(); n * n] };
        for x in 1..=n {
            *m.at_mut(w.apply(x) - 1, x - 1) = BigRational::one();
        }
        m
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.at(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<BigRational> {
        (0..self.n).map(|i| self.at(i, i).clone()).collect()
    }

    pub fn det(&self) -> BigRational {
        // Fraction-free enough for our sizes: plain Gaussian elimination.
        let mut a = self.clone();
        let n = self.n;
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.at(r, col).is_zero()) else {
                return BigRational::zero();
            };
            if pivot != col {
                for j in 0..n {
                    let tmp = a.at(pivot, j).clone();
                    *a.at_mut(pivot, j) = a.at(col, j).clone();
                    *a.at_mut(col, j) = tmp;
                }
                det = -det;
            }
            det *= a.at(col, col);
            for r in col + 1..n {
                if a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col) / a.at(col, col);
                for j in col..n {
                    let sub = &f * a.at(col, j);
                    *a.at_mut(r, j) -= sub;
                }
            }
        }
        det
    }
}

/// The braid matrix B_k(eps) = s_k (I + eps e_{k,k+1}): column k is
/// e_{k+1}, column k+1 is e_k + eps e_{k+1}.
pub fn braid_gen(n: usize, k: usize, eps: &BigRational) -> RatMatrix {
    assert!(k >= 1 && k < n);
    let mut m = RatMatrix::identity(n);
    *m.at_mut(k - 1, k - 1) = BigRational::zero();
    *m.at_mut(k, k) = eps.clone();
    *m.at_mut(k, k - 1) = BigRational::one();
    *m.at_mut(k - 1, k) = BigRational::one();
    m
}

/// The product B_{i_l}(eps_l) ... B_{i_1}(eps_1) over a braid word in walk
/// order; `eps[m-1]` is the coefficient at walk position m.
pub fn braid_matrix_product(word: &BraidWord, eps: &[BigRational]) -> RatMatrix {
    assert_eq!(eps.len(), word.len(), "one coefficient per letter");
    let mut m = RatMatrix::identity(word.n());
    for (idx, &letter) in word.letters().iter().enumerate() {
        m = braid_gen(word.n(), letter, &eps[idx]).mul(&m);
    }
    m
}

/// Bruhat factorization `M = b P_w u` with b upper triangular and u upper
/// unitriangular supported on the inversions of w, computed by column
/// reduction with lowest-nonzero-row pivots. Only b and w are returned.
pub fn bruhat_factor(m: &RatMatrix) -> Result<(RatMatrix, Perm), BraidMatrixError> {
    let n = m.n();
    let mut a = m.clone();
    let mut w = vec![usize::MAX; n];
    for c in 0..n {
        let Some(r) = (0..n).rev().find(|&r| !a.at(r, c).is_zero()) else {
            return Err(BraidMatrixError::Singular);
        };
        w[c] = r;
        for c2 in c + 1..n {
            if a.at(r, c2).is_zero() {
                continue;
            }
            let f = a.at(r, c2) / a.at(r, c);
            for row in 0..n {
                let sub = &f * a.at(row, c);
                *a.at_mut(row, c2) -= sub;
            }
        }
    }
    let mut seen = vec![false; n];
    for &r in &w {
        if r == usize::MAX || seen[r] {
            return Err(BraidMatrixError::Singular);
        }
        seen[r] = true;
    }
    // b's column w(c) is the reduced column c.
    let mut b = RatMatrix::identity(n);
    for c in 0..n {
        for row in 0..n {
            *b.at_mut(row, w[c]) = a.at(row, c).clone();
        }
    }
    let perm = Perm::from_one_line(&w.iter().map(|&r| r + 1).collect::<Vec<_>>());
    Ok((b, perm))
}

/// The unique w with `M` in the Bruhat cell B w B.
pub fn bruhat_perm(m: &RatMatrix) -> Result<Perm, BraidMatrixError> {
    bruhat_factor(m).map(|(_, w)| w)
}

/// Classify a point of affine space by the Bruhat strata of its partial
/// products. Succeeds as a walk iff the final product lies in B.
pub fn walk_of_point(word: &BraidWord, eps: &[BigRational]) -> Result<Walk, BraidMatrixError> {
    assert_eq!(eps.len(), word.len());
    let n = word.n();
    let mut states = vec![Perm::identity(n)];
    let mut m = RatMatrix::identity(n);
    for (idx, &letter) in word.letters().iter().enumerate() {
        m = braid_gen(n, letter, &eps[idx]).mul(&m);
        states.push(bruhat_perm(&m)?);
    }
    let last = states.last().unwrap().clone();
    if !last.is_identity() {
        return Err(BraidMatrixError::NotInBraidVariety(last));
    }
    Walk::classify(word, states).ok_or(BraidMatrixError::NotInBraidVariety(last))
}

/// The cell coordinates of a point: at each position m with letter i and
/// Borel factor b of the partial product through m-1,
/// `eps'_m = (b_{i+1,i+1} eps_m + b_{i,i+1}) / b_{i,i}`.
/// Stay positions carry nonzero coordinates, go-down positions zero.
pub fn point_coords(
    word: &BraidWord,
    eps: &[BigRational],
) -> Result<Vec<BigRational>, BraidMatrixError> {
    assert_eq!(eps.len(), word.len());
    let n = word.n();
    let mut m = RatMatrix::identity(n);
    let mut coords = Vec::with_capacity(eps.len());
    for (idx, &letter) in word.letters().iter().enumerate() {
        let (b, _) = bruhat_factor(&m)?;
        let i = letter - 1; // 0-indexed block position
        let c = (b.at(i + 1, i + 1) * &eps[idx] + b.at(i, i + 1)) / b.at(i, i);
        coords.push(c);
        m = braid_gen(n, letter, &eps[idx]).mul(&m);
    }
    Ok(coords)
}

/// Invert the coordinate change of the inductive cell construction: produce
/// a point `eps` of the cell of `walk` with the prescribed cell coordinates
/// (nonzero rationals at stay positions, free rationals at go-up positions;
/// go-down positions are forced to coordinate zero).
pub fn cell_sample(
    word: &BraidWord,
    walk: &Walk,
    stay_coords: &[BigRational],
    up_coords: &[BigRational],
) -> Result<Vec<BigRational>, BraidMatrixError> {
    if stay_coords.len() != walk.stay.len() {
        return Err(BraidMatrixError::CoordinateCount {
            kind: "stay",
            expected: walk.stay.len(),
            got: stay_coords.len(),
        });
    }
    if up_coords.len() != walk.up.len() {
        return Err(BraidMatrixError::CoordinateCount {
            kind: "go-up",
            expected: walk.up.len(),
            got: up_coords.len(),
        });
    }
    for (pos, c) in walk.stay.iter().zip(stay_coords) {
        if c.is_zero() {
            return Err(BraidMatrixError::ZeroStayCoordinate(*pos));
        }
    }
    let n = word.n();
    let mut m = RatMatrix::identity(n);
    let mut eps = Vec::with_capacity(word.len());
    for pos in 1..=word.len() {
        let i = word.letter(pos) - 1;
        let coord = match walk.class_of(pos) {
            'U' => {
                let k = walk.up.iter().position(|&x| x == pos).unwrap();
                up_coords[k].clone()
            }
            'S' => {
                let k = walk.stay.iter().position(|&x| x == pos).unwrap();
                stay_coords[k].clone()
            }
            _ => BigRational::zero(),
        };
        let (b, _) = bruhat_factor(&m)?;
        // eps_m = (b_{i,i} eps'_m - b_{i,i+1}) / b_{i+1,i+1}.
        let e = (b.at(i, i) * &coord - b.at(i, i + 1)) / b.at(i + 1, i + 1);
        m = braid_gen(n, word.letter(pos), &e).mul(&m);
        eps.push(e);
    }
    Ok(eps)
}

/// The symbolic microlocal monodromy of a cell: for each stay position m,
/// the diagonal slots `(s_{>m}(i_m), s_{>m}(i_m + 1))` (1-based) receive the
/// factors `-1/eps'_m` and `eps'_m`. Its determinant is `(-1)^{|S_p|}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MumonTable {
    pub n: usize,
    /// Per stay position m: (m, slot receiving -1/eps'_m, slot receiving eps'_m).
    pub factors: Vec<(usize, usize, usize)>,
}

impl MumonTable {
    /// Evaluate the formula at concrete stay coordinates (aligned with the
    /// walk's stay list).
    pub fn eval(&self, stay_coords: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(stay_coords.len(), self.factors.len());
        let mut diag = vec![BigRational::one(); self.n];
        for ((_, neg_slot, pos_slot), c) in self.factors.iter().zip(stay_coords) {
            diag[neg_slot - 1] *= -c.recip();
            diag[pos_slot - 1] *= c;
        }
        diag
    }

    pub fn det_sign(&self) -> i32 {
        if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

pub fn mumon_symbolic(word: &BraidWord, walk: &Walk) -> MumonTable {
    let factors = walk
        .stay
        .iter()
        .map(|&m| {
            let s_gt = word.s_gt(m);
            let i = word.letter(m);
            (m, s_gt.apply(i), s_gt.apply(i + 1))
        })
        .collect();
    MumonTable { n: word.n(), factors }
}

/// Sample the cell at the given coordinates and verify that the diagonal of
/// the resulting Borel matrix equals the value of the symbolic formula.
pub fn mumon_check(
    word: &BraidWord,
    walk: &Walk,
    stay_coords: &[BigRational],
    up_coords: &[BigRational],
) -> Result<bool, BraidMatrixError> {
    let eps = cell_sample(word, walk, stay_coords, up_coords)?;
    let m = braid_matrix_product(word, &eps);
    if !m.is_upper_triangular() {
        return Ok(false);
    }
    let diag = m.diagonal();
    let formula = mumon_symbolic(word, walk).eval(stay_coords);
    let mut det = BigRational::one();
    for d in &diag {
        det *= d;
    }
    let sign = BigRational::from(BigInt::from(mumon_symbolic(word, walk).det_sign()));
    Ok(diag == formula && det == sign)
}
