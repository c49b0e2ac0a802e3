//! Cross-cutting invariants: randomized field axioms, evaluation
//! homomorphisms, symbolic braid relations, truncation sufficiency of the
//! HLRV pipeline, and grid symmetries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use charvar_core::braid::{bruhat_perm, braid_matrix_product, enumerate_walks, RatMatrix, Walk};
use charvar_core::charvar::{cell_decomposition, cross_check_epoly, hlrv, CharVarSpec};
use charvar_core::exact::{parse_ratfunc, MPoly, RatFunc, VarSet};
use charvar_core::macdonald::MacdonaldTable;
use charvar_core::partitions::Partition;

fn pt(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec())
}

fn random_ratfunc(rng: &mut ChaCha8Rng, vars: &VarSet) -> RatFunc {
    loop {
        let mut num = MPoly::zero(vars);
        let mut den = MPoly::zero(vars);
        for _ in 0..3 {
            let kn: Vec<u32> = (0..vars.len()).map(|_| rng.gen_range(0..3)).collect();
            let kd: Vec<u32> = (0..vars.len()).map(|_| rng.gen_range(0..2)).collect();
            num = num.add(&MPoly::from_terms(
                vars,
                [(kn, BigInt::from(rng.gen_range(-5i64..=5)))],
            ));
            den = den.add(&MPoly::from_terms(
                vars,
                [(kd, BigInt::from(rng.gen_range(-3i64..=3)))],
            ));
        }
        if den.is_zero() {
            continue;
        }
        return RatFunc::new(num, den).unwrap();
    }
}

#[test]
fn ratfunc_field_axioms_randomized() {
    let vars = VarSet::qt();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let a = random_ratfunc(&mut rng, &vars);
        let b = random_ratfunc(&mut rng, &vars);
        let c = random_ratfunc(&mut rng, &vars);
        assert_eq!(a.add(&b), b.add(&a));
        assert_eq!(a.mul(&b), b.mul(&a));
        assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        assert_eq!(a.sub(&b).add(&b), a);
        if !a.is_zero() {
            assert!(a.mul(&a.inv().unwrap()).is_one());
        }
    }
}

#[test]
fn adams_is_a_ring_homomorphism_randomized() {
    let vars = VarSet::qt();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..25 {
        let a = random_ratfunc(&mut rng, &vars);
        let b = random_ratfunc(&mut rng, &vars);
        let d = rng.gen_range(2..=4u32);
        assert_eq!(a.mul(&b).adams(d), a.adams(d).mul(&b.adams(d)));
        assert_eq!(a.add(&b).adams(d), a.adams(d).add(&b.adams(d)));
    }
}

#[test]
fn eval_commutes_with_arithmetic() {
    let vars = VarSet::qt();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut done = 0;
    while done < 30 {
        let a = random_ratfunc(&mut rng, &vars);
        let b = random_ratfunc(&mut rng, &vars);
        let point: Vec<BigRational> = (0..2)
            .map(|_| {
                BigRational::new(
                    BigInt::from(rng.gen_range(-7i64..=7)),
                    BigInt::from(rng.gen_range(1i64..=5)),
                )
            })
            .collect();
        let (Ok(va), Ok(vb)) = (a.eval(&point), b.eval(&point)) else {
            continue;
        };
        assert_eq!(a.add(&b).eval(&point).unwrap(), &va + &vb);
        assert_eq!(a.sub(&b).eval(&point).unwrap(), &va - &vb);
        assert_eq!(a.mul(&b).eval(&point).unwrap(), &va * &vb);
        if !vb.is_zero() && !b.is_zero() {
            assert_eq!(a.div(&b).unwrap().eval(&point).unwrap(), &va / &vb);
        }
        done += 1;
    }
}

/// The adjacent braid relation for braid matrices, verified symbolically:
/// both sides are 3x3 matrices over Q(e1, e2, e3) and agree entry by entry.
#[test]
fn braid_relation_holds_symbolically() {
    let vars = VarSet::new(["e1", "e2", "e3"]);
    let e = |name: &str| RatFunc::var(&vars, name).unwrap();
    // B_k(x) as a symbolic 3x3 matrix: s_k (I + x e_{k,k+1}).
    let bmat = |k: usize, x: &RatFunc| -> Vec<Vec<RatFunc>> {
        let mut m: Vec<Vec<RatFunc>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        if i == j {
                            RatFunc::one(&vars)
                        } else {
                            RatFunc::zero(&vars)
                        }
                    })
                    .collect()
            })
            .collect();
        m[k - 1][k - 1] = RatFunc::zero(&vars);
        m[k][k] = x.clone();
        m[k][k - 1] = RatFunc::one(&vars);
        m[k - 1][k] = RatFunc::one(&vars);
        m
    };
    let mul = |a: &Vec<Vec<RatFunc>>, b: &Vec<Vec<RatFunc>>| -> Vec<Vec<RatFunc>> {
        (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        let mut acc = RatFunc::zero(&vars);
                        for k in 0..3 {
                            acc = acc.add(&a[i][k].mul(&b[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    };
    let (e1, e2, e3) = (e("e1"), e("e2"), e("e3"));
    // Composition order: the first factor of the diagram is applied first,
    // so [B_1(e1)] o [B_2(e2)] o [B_1(e3)] is the product B_1(e3) B_2(e2) B_1(e1).
    let lhs = mul(&mul(&bmat(1, &e3), &bmat(2, &e2)), &bmat(1, &e1));
    let rhs = mul(
        &mul(&bmat(2, &e1), &bmat(1, &e2.sub(&e3.mul(&e1)))),
        &bmat(2, &e3),
    );
    assert_eq!(lhs, rhs);
    // Numeric double check at a random rational point.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let point: Vec<BigRational> = (0..3)
            .map(|_| {
                BigRational::new(
                    BigInt::from(rng.gen_range(-9i64..=9)),
                    BigInt::from(rng.gen_range(1i64..=9)),
                )
            })
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(
                    lhs[i][j].eval(&point).unwrap(),
                    rhs[i][j].eval(&point).unwrap()
                );
            }
        }
    }
}

#[test]
fn bruhat_invariant_under_random_upper_triangular() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let word = charvar_core::braid::BraidWord::new(3, vec![2, 1, 2, 2, 1, 2]);
    for _ in 0..20 {
        let eps: Vec<BigRational> = (0..word.len())
            .map(|_| {
                BigRational::new(
                    BigInt::from(rng.gen_range(-5i64..=5)),
                    BigInt::from(rng.gen_range(1i64..=4)),
                )
            })
            .collect();
        let m = braid_matrix_product(&word, &eps);
        let w = bruhat_perm(&m).unwrap();
        let mut b = RatMatrix::identity(3);
        for i in 0..3 {
            for j in i..3 {
                let v = if i == j {
                    rng.gen_range(1i64..=6)
                } else {
                    rng.gen_range(-6i64..=6)
                };
                *b.at_mut(i, j) = BigRational::from(BigInt::from(v));
            }
        }
        assert_eq!(bruhat_perm(&m.mul(&b)).unwrap(), w);
    }
}

#[test]
fn hlrv_truncation_sufficiency() {
    // Recomputing with truncation n + 1 must not change the answer.
    let table = MacdonaldTable::new();
    let specs = [
        CharVarSpec::new(0, vec![pt(&[1, 1]); 4]).unwrap(),
        CharVarSpec::new(1, vec![pt(&[2])]).unwrap(),
        CharVarSpec::new(1, vec![pt(&[1, 1])]).unwrap(),
    ];
    for spec in specs {
        let n = spec.n();
        let base = hlrv(&spec, &table, None).unwrap();
        let padded = hlrv(&spec, &table, Some(n + 1)).unwrap();
        assert_eq!(base.hlrv_zw, padded.hlrv_zw, "truncation check for {spec}");
    }
}

#[test]
fn hlrv_grids_are_symmetric_with_even_parity() {
    let table = MacdonaldTable::new();
    let specs = [
        CharVarSpec::new(0, vec![pt(&[1, 1]); 4]).unwrap(),
        CharVarSpec::new(0, vec![pt(&[1, 1, 1]); 3]).unwrap(),
        CharVarSpec::new(1, vec![pt(&[1])]).unwrap(),
        CharVarSpec::new(1, vec![pt(&[2])]).unwrap(),
        CharVarSpec::new(0, vec![pt(&[2, 1]), pt(&[1, 1, 1]), pt(&[1, 1, 1])]).unwrap(),
    ];
    for spec in specs {
        let grid = hlrv(&spec, &table, None).unwrap().outcome.unwrap();
        assert!(grid.duality_check(), "c_ij = c_ji for {spec}");
        for &(i, j) in grid.c.keys() {
            assert_eq!((j as i64 - i as i64).rem_euclid(2), 0);
        }
    }
}

#[test]
fn cells_have_constant_dimension_pairing_and_unique_torus() {
    let specs = [
        CharVarSpec::new(0, vec![pt(&[1, 1]); 4]).unwrap(),
        CharVarSpec::new(0, vec![pt(&[1, 1, 1]); 3]).unwrap(),
        CharVarSpec::new(0, vec![pt(&[2, 1]), pt(&[1, 1, 1]), pt(&[1, 1, 1])]).unwrap(),
        CharVarSpec::new(1, vec![pt(&[1, 1])]).unwrap(),
    ];
    for spec in specs {
        let d = spec.dimension();
        let cells = cell_decomposition(&spec).unwrap();
        let mut torus = 0;
        for cell in &cells.cells {
            assert_eq!(cell.a_bar as i64 + 2 * cell.b_bar as i64, d, "{spec}");
            // Re-validate the walk independently of the enumerator.
            assert!(Walk::classify(&cell.word, cell.walk.states.clone()).is_some());
            assert_eq!(cell.walk.up.len(), cell.walk.down.len());
            if cell.b_bar == 0 {
                torus += 1;
                assert_eq!(cell.a_bar as i64, d);
            }
        }
        assert_eq!(torus, 1, "unique dense torus cell for {spec}");
        // The dense torus cell is the last one in the admissible order.
        assert_eq!(cells.cells.last().unwrap().b_bar, 0);
    }
}

/// Cell sampling and the microlocal monodromy on a three-strand word,
/// where the conjugating permutations in the slot formula are nontrivial:
/// every walk of every stratum word of the rank-3 example round-trips, and
/// the sampled diagonals match the formula.
#[test]
fn cell_sampling_on_three_strand_words() {
    use charvar_core::braid::{cell_sample, mumon_check, walk_of_point};
    let spec = CharVarSpec::new(0, vec![pt(&[1, 1, 1]); 3]).unwrap();
    let cells = cell_decomposition(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut seen_words = std::collections::BTreeSet::new();
    for cell in &cells.cells {
        seen_words.insert(cell.word.letters().to_vec());
        for walk in enumerate_walks(&cell.word) {
            for _ in 0..5 {
                let stays: Vec<BigRational> = (0..walk.stay.len())
                    .map(|_| loop {
                        let v = BigRational::new(
                            BigInt::from(rng.gen_range(-7i64..=7)),
                            BigInt::from(rng.gen_range(1i64..=5)),
                        );
                        if !v.is_zero() {
                            break v;
                        }
                    })
                    .collect();
                let ups: Vec<BigRational> = (0..walk.up.len())
                    .map(|_| {
                        BigRational::new(
                            BigInt::from(rng.gen_range(-7i64..=7)),
                            BigInt::from(rng.gen_range(1i64..=5)),
                        )
                    })
                    .collect();
                let eps = cell_sample(&cell.word, &walk, &stays, &ups).unwrap();
                assert_eq!(walk_of_point(&cell.word, &eps).unwrap(), walk);
                assert!(
                    mumon_check(&cell.word, &walk, &stays, &ups).unwrap(),
                    "mumon on {:?}, stays {:?}",
                    cell.word.letters(),
                    walk.stay
                );
            }
        }
    }
    // The strata genuinely use both generators.
    assert!(seen_words.iter().any(|w| w.contains(&1) && w.contains(&2)));
}

#[test]
fn genus_one_cross_check() {
    // g = 1, k = 1, mu = (1^2): very generic; the cell-side and grid-side
    // E-polynomials must agree.
    let table = MacdonaldTable::new();
    let spec = CharVarSpec::new(1, vec![pt(&[1, 1])]).unwrap();
    let check = cross_check_epoly(&spec, &table).unwrap();
    assert!(
        check.agree,
        "cells {} vs grid {}",
        check.cell_side, check.hlrv_side
    );
}

#[test]
fn walk_enumeration_prunes_correctly_on_shape_braids() {
    // Every walk of every stratum word of the rank-2 example satisfies the
    // go-up-forced rule and the length bound.
    let spec = CharVarSpec::new(0, vec![pt(&[1, 1]); 4]).unwrap();
    let cells = cell_decomposition(&spec).unwrap();
    for cell in &cells.cells {
        for walk in enumerate_walks(&cell.word) {
            for m in 1..=walk.len() {
                assert!(walk.state(m).length() <= walk.len() - m);
            }
        }
    }
}

/// Genus two, rank two, one puncture: 49 cells across four shapes; the
/// degree-12 E-polynomial agrees between the cell count and the grid.
#[test]
fn genus_two_rank_two_cross_check() {
    let table = MacdonaldTable::new();
    let spec = CharVarSpec::new(2, vec![pt(&[1, 1])]).unwrap();
    let cells = cell_decomposition(&spec).unwrap();
    assert_eq!(cells.cells.len(), 49);
    assert_eq!(cells.f, vec![1, 9, 24, 15, 0, 0, 0]);
    let check = cross_check_epoly(&spec, &table).unwrap();
    assert!(check.agree);
    assert_eq!(
        check.cell_side.to_string(),
        "q^12 - 3*q^11 + 8*q^9 - 3*q^8 - 21*q^7 + 36*q^6 - 21*q^5 - 3*q^4 + 8*q^3 - 3*q + 1"
    );
}

/// Genus-one rank-three full flag: 35 cells whose E-polynomial has
/// genuinely alternating signs, matched by the grid side through the
/// (-1)^i twist. This exercises commutator shape words and the genus
/// generators in the admissibility test.
#[test]
fn genus_one_rank_three_cross_check() {
    let table = MacdonaldTable::new();
    let spec = CharVarSpec::new(1, vec![pt(&[1, 1, 1])]).unwrap();
    let cells = cell_decomposition(&spec).unwrap();
    assert_eq!(cells.cells.len(), 35);
    assert_eq!(cells.f, vec![1, 8, 18, 8, 0]);
    let check = cross_check_epoly(&spec, &table).unwrap();
    assert!(check.agree);
    assert_eq!(
        check.cell_side.to_string(),
        "q^8 - 2*q^6 + 2*q^4 - 2*q^2 + 1"
    );
    // The closed cell-count formula reproduces the direct counts here too.
    let grid = hlrv(&spec, &table, None).unwrap().outcome.unwrap();
    let f = charvar_core::charvar::f_from_c(&grid.e_coefficients(), 8);
    let direct: Vec<BigInt> = cells.f.iter().map(|&x| BigInt::from(x)).collect();
    assert_eq!(f, direct);
}

#[test]
fn punctured_torus_continues_through_rank_five() {
    let table = MacdonaldTable::new();
    let expect = parse_ratfunc(&VarSet::zw(), "(z - w)^2").unwrap();
    for n in 3..=5u32 {
        let spec = CharVarSpec::new(1, vec![pt(&[n])]).unwrap();
        let report = hlrv(&spec, &table, None).unwrap();
        assert_eq!(report.hlrv_zw, expect, "n = {n}");
    }
}

/// Kostka column sums at (q,t) = (1,1): the modified Macdonald function
/// specializes so that `sum_lambda f^lambda K~_{lambda,mu}(1,1) = n!`, where
/// `f^lambda` counts standard tableaux. Two independent routes compute
/// `f^lambda`: the hook length formula and direct enumeration.
#[test]
fn kostka_column_sums_count_permutations() {
    use charvar_core::macdonald::kostka_qt;
    use charvar_core::partitions::{arm_leg_hook, partitions_of, ssyt_enumerate};
    let qt = VarSet::qt();
    let ones = [
        num_rational::BigRational::from(BigInt::from(1)),
        num_rational::BigRational::from(BigInt::from(1)),
    ];
    for n in 1..=4u32 {
        let mut factorial = BigInt::from(1);
        for i in 2..=n {
            factorial *= BigInt::from(i);
        }
        for mu in partitions_of(n) {
            let k = kostka_qt(&mu, &qt).unwrap();
            let mut total = num_rational::BigRational::zero();
            for (lambda, poly) in &k {
                // Hook length formula.
                let mut hooks = BigInt::from(1);
                for s in lambda.cells() {
                    hooks *= BigInt::from(arm_leg_hook(lambda, s).unwrap().2);
                }
                let f_hook = &factorial / &hooks;
                // Direct standard-filling enumeration.
                let weight = vec![1u32; n as usize];
                let f_enum = BigInt::from(ssyt_enumerate(lambda, &weight).len());
                assert_eq!(f_hook, f_enum, "f^{lambda}");
                let at_one = charvar_core::exact::RatFunc::from_poly(poly.clone())
                    .eval(&ones)
                    .unwrap();
                total += at_one * num_rational::BigRational::from(f_hook);
            }
            assert_eq!(
                total,
                num_rational::BigRational::from(factorial.clone()),
                "column sum for mu = {mu}"
            );
        }
    }
}

/// Scalar plethystic exponential of a T-series with coefficients in a
/// lambda-ring of rational functions: `Exp(sum a_n T^n)` truncated.
fn scalar_exp(v: &[RatFunc], vars: &VarSet) -> Vec<RatFunc> {
    let n = v.len() - 1;
    assert!(v[0].is_zero());
    let mut w = vec![RatFunc::zero(vars); n + 1];
    for r in 1..=n as u32 {
        for s in 1..=n {
            let target = r as usize * s;
            if target > n {
                break;
            }
            let add = v[s].adams(r).div_int(BigInt::from(r)).unwrap();
            w[target] = w[target].add(&add);
        }
    }
    let mut acc = vec![RatFunc::zero(vars); n + 1];
    acc[0] = RatFunc::one(vars);
    let mut power = acc.clone();
    let mut factorial = BigInt::from(1);
    for j in 1..=n {
        // power <- power * w (T-degree convolution).
        let mut next = vec![RatFunc::zero(vars); n + 1];
        for a in 0..=n {
            if power[a].is_zero() {
                continue;
            }
            for b in 1..=n - a {
                next[a + b] = next[a + b].add(&power[a].mul(&w[b]));
            }
        }
        power = next;
        factorial *= BigInt::from(j as u32);
        for a in 0..=n {
            acc[a] = acc[a].add(&power[a].div_int(factorial.clone()).unwrap());
        }
    }
    acc
}

/// The Cauchy-kernel generating identity for one-row types:
/// `sum_lambda Hook_lambda(z,w) T^{|lambda|}
///  = Exp(sum_{n>=1} H_(n)(z,w) / ((z^2-1)(1-w^2)) T^n)`.
/// The left side only involves hook polynomials; the right side runs the
/// whole HLRV pipeline. Checked through degree 3 at genus 0, 1, and 2.
#[test]
fn cauchy_kernel_generating_identity() {
    use charvar_core::charvar::hook_polynomial;
    use charvar_core::partitions::partitions_of;
    let zw = VarSet::zw();
    let prefactor = parse_ratfunc(&zw, "(z^2 - 1)*(1 - w^2)").unwrap();
    let table = MacdonaldTable::new();
    for g in 0..=2u32 {
        let top = if g == 2 { 2 } else { 3 };
        let mut rhs_input = vec![RatFunc::zero(&zw); top + 1];
        for n in 1..=top as u32 {
            let spec = CharVarSpec::new(g, vec![pt(&[n])]).unwrap();
            let report = hlrv(&spec, &table, None).unwrap();
            rhs_input[n as usize] = report.hlrv_zw.div(&prefactor).unwrap();
        }
        let rhs = scalar_exp(&rhs_input, &zw);
        for m in 0..=top as u32 {
            let mut lhs = RatFunc::zero(&zw);
            for lambda in partitions_of(m) {
                lhs = lhs.add(&hook_polynomial(&lambda, g, &zw));
            }
            assert_eq!(lhs, rhs[m as usize], "degree {m}, genus {g}");
        }
    }
}

#[test]
fn hlrv_rejects_nothing_but_reports_validation() {
    // A spec whose grid shape is irregular should surface a violation rather
    // than panic. All known small cases validate, so just exercise the
    // reporting path with k = 1, g = 0 (dimension is negative there).
    let table = MacdonaldTable::new();
    let spec = CharVarSpec::new(0, vec![pt(&[3])]).unwrap();
    let report = hlrv(&spec, &table, None).unwrap();
    assert!(report.outcome.is_err(), "negative dimension cannot validate");
    let msg = parse_ratfunc(&VarSet::zw(), "0").unwrap();
    let _ = msg; // the raw function is still available for inspection
    assert!(!report.hlrv_zw.to_string().is_empty());
}
