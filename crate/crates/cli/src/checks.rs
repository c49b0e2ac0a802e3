//! The bundled property suite behind `charvar check`: deterministic under a
//! fixed seed, one pass/fail line per invariant.

use std::process::ExitCode;

use anyhow::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use charvar_core::braid::{
    braid_gen, cell_sample, enumerate_walks, mumon_check, walk_of_point, BraidWord,
};
use charvar_core::charvar::{c_from_f, f_from_c};
use charvar_core::exact::VarSet;
use charvar_core::macdonald::{kostka_qt, macdonald_p, macdonald_p_oracle};
use charvar_core::partitions::{arm_leg_hook, conjugate, partitions_of};
use charvar_core::symfunc::{exp_pleth, log_pleth, mobius, DiagonalSeries, SymSeries};

struct Suite {
    results: Vec<(String, bool, String)>,
}

impl Suite {
    fn record(&mut self, name: &str, ok: bool, detail: String) {
        self.results.push((name.to_string(), ok, detail));
    }

    fn check(&mut self, name: &str, run: impl FnOnce() -> Result<(), String>) {
        match run() {
            Ok(()) => self.record(name, true, String::new()),
            Err(msg) => self.record(name, false, msg),
        }
    }
}

fn rat(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(
        BigInt::from(rng.gen_range(-9i64..=9)),
        BigInt::from(rng.gen_range(1i64..=7)),
    )
}

fn nonzero_rat(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let v = rat(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn cmd_check(json_output: bool, seed: u64) -> Result<ExitCode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suite = Suite { results: Vec::new() };

    suite.check("mobius divisor sums", || {
        for n in 1..=100u64 {
            let s: i64 = (1..=n).filter(|d| n % d == 0).map(mobius).sum();
            if s != i64::from(n == 1) {
                return Err(format!("sum over divisors of {n} is {s}"));
            }
        }
        Ok(())
    });

    suite.check("hook multiset symmetry", || {
        for n in 1..=8u32 {
            for q in partitions_of(n) {
                let mut h1: Vec<u32> =
                    q.cells().map(|s| arm_leg_hook(&q, s).unwrap().2).collect();
                let qc = conjugate(&q);
                let mut h2: Vec<u32> =
                    qc.cells().map(|s| arm_leg_hook(&qc, s).unwrap().2).collect();
                h1.sort_unstable();
                h2.sort_unstable();
                if h1 != h2 {
                    return Err(format!("hooks of {q} vs {qc}"));
                }
            }
        }
        Ok(())
    });

    {
        let r = &mut rng;
        suite.check("braid relations (20 random instances)", || {
            for _ in 0..20 {
                let n = r.gen_range(3..=5usize);
                let i = r.gen_range(1..n - 1);
                let (e1, e2, e3) = (rat(r), rat(r), rat(r));
                let lhs = braid_gen(n, i, &e3)
                    .mul(&braid_gen(n, i + 1, &e2))
                    .mul(&braid_gen(n, i, &e1));
                let rhs = braid_gen(n, i + 1, &e1)
                    .mul(&braid_gen(n, i, &(&e2 - &e3 * &e1)))
                    .mul(&braid_gen(n, i + 1, &e3));
                if lhs != rhs {
                    return Err("adjacent relation failed".into());
                }
            }
            Ok(())
        });
    }

    {
        let r = &mut rng;
        suite.check("cell sampling round trips (sigma_1^4, sigma_1^6)", || {
            for word in [BraidWord::new(2, vec![1; 4]), BraidWord::new(2, vec![1; 6])] {
                for walk in enumerate_walks(&word) {
                    for _ in 0..5 {
                        let stays: Vec<BigRational> =
                            (0..walk.stay.len()).map(|_| nonzero_rat(r)).collect();
                        let ups: Vec<BigRational> =
                            (0..walk.up.len()).map(|_| rat(r)).collect();
                        let eps = cell_sample(&word, &walk, &stays, &ups)
                            .map_err(|e| e.to_string())?;
                        let back = walk_of_point(&word, &eps).map_err(|e| e.to_string())?;
                        if back != walk {
                            return Err("classification mismatch".into());
                        }
                        if !mumon_check(&word, &walk, &stays, &ups)
                            .map_err(|e| e.to_string())?
                        {
                            return Err("microlocal monodromy mismatch".into());
                        }
                    }
                }
            }
            Ok(())
        });
    }

    {
        let r = &mut rng;
        suite.check("Exp/Log inverse pair (5 random inputs)", || {
            let qt = VarSet::qt();
            for _ in 0..5 {
                let k = r.gen_range(1..=2usize);
                let trunc = 3u32;
                let mut v = DiagonalSeries::zero(k, trunc, &qt);
                for m in 1..=trunc {
                    let mut comp = SymSeries::zero(k, trunc, &qt);
                    if r.gen_bool(0.7) {
                        let key: Vec<_> = (0..k)
                            .map(|_| {
                                let ps = partitions_of(m);
                                ps[r.gen_range(0..ps.len())].clone()
                            })
                            .collect();
                        let c = charvar_core::exact::parse_ratfunc(
                            &qt,
                            &format!("({}) + ({})*q*t", r.gen_range(1..=4), r.gen_range(-3i64..=3)),
                        )
                        .unwrap();
                        let mut term = SymSeries::one(k, trunc, &qt);
                        for (alphabet, l) in key.iter().enumerate() {
                            term = term
                                .mul(&SymSeries::power_sum(k, trunc, &qt, alphabet, l));
                        }
                        comp = comp.add(&term.scale(&c));
                    }
                    v.set_component(m, comp);
                }
                let f = exp_pleth(&v).map_err(|e| e.to_string())?;
                if log_pleth(&f).map_err(|e| e.to_string())? != v {
                    return Err("Log(Exp(V)) != V".into());
                }
            }
            Ok(())
        });
    }

    suite.check("Macdonald tableau formula vs Gram-Schmidt (|lambda| <= 3)", || {
        let qt = VarSet::qt();
        for n in 1..=3u32 {
            for lambda in partitions_of(n) {
                if macdonald_p(&lambda, &qt) != macdonald_p_oracle(&lambda, &qt) {
                    return Err(format!("P_{lambda}"));
                }
            }
        }
        Ok(())
    });

    suite.check("Kostka polynomiality (|mu| <= 3)", || {
        let qt = VarSet::qt();
        for n in 1..=3u32 {
            for mu in partitions_of(n) {
                kostka_qt(&mu, &qt).map_err(|e| e.to_string())?;
            }
        }
        Ok(())
    });

    {
        let r = &mut rng;
        suite.check("cell-count transform round trip", || {
            for _ in 0..10 {
                let d = 2 * r.gen_range(1..=4u32);
                let f: Vec<BigInt> = (0..=d / 2)
                    .map(|_| BigInt::from(r.gen_range(1..=9u32)))
                    .collect();
                let c = c_from_f(&f, d);
                if f_from_c(&c, d) != f {
                    return Err(format!("d = {d}"));
                }
            }
            Ok(())
        });
    }

    let all_ok = suite.results.iter().all(|(_, ok, _)| *ok);
    if json_output {
        let out = json!({
            "seed": seed,
            "checks": suite.results.iter().map(|(name, ok, detail)| json!({
                "name": name,
                "ok": ok,
                "detail": detail,
            })).collect::<Vec<_>>(),
            "ok": all_ok,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("seed: {seed}");
        for (name, ok, detail) in &suite.results {
            if *ok {
                println!("ok    {name}");
            } else {
                println!("FAIL  {name}: {detail}");
            }
        }
        println!("{}", if all_ok { "all checks passed" } else { "SOME CHECKS FAILED" });
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

