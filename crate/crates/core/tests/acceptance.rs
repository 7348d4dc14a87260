//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails. Field arithmetic is exact, so every comparison is
//! an equality (tolerance zero); only wall-clock limits are pinned below.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ncchar_core::code::{eval_transfer, verify, CodeError, FractionalCode, SymbolicCode};
use ncchar_core::constructions::{gadget_transform_logged, gen_n1, gen_n2, union_copies};
use ncchar_core::field::primes_up_to;
use ncchar_core::network::{CodedNetwork, MessageId, Role};
use ncchar_core::solutions::{lift_gadget, lift_union, solve_n1, solve_n2};
use ncchar_core::solver::{search_scalar, SearchConfig, SearchOutcome};
use ncchar_core::{FieldMatrix, PrimeModulus};
use rand::Rng;

const LIMIT_PER_VERIFY_CASE: Duration = Duration::from_secs(1);
const LIMIT_PER_SEARCH: Duration = Duration::from_secs(300);
const LIMIT_BLOCK_SUITE: Duration = Duration::from_secs(10);
const LIMIT_PER_UNION_CASE: Duration = Duration::from_secs(2);
const LIMIT_PER_GADGET_CASE: Duration = Duration::from_secs(1);
const LIMIT_ORACLE: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn(&mut Artifacts) -> Outcome);

#[derive(Default)]
struct Artifacts {
    networks: Vec<CodedNetwork>,
    codes: Vec<(CodedNetwork, FractionalCode)>,
    symbolic: Vec<SymbolicCode>,
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn gf(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).unwrap()
}

fn within<T>(limit: Duration, what: &str, f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    let start = Instant::now();
    let out = f()?;
    let took = start.elapsed();
    ensure!(took <= limit, "{what} took {took:.2?}, limit {limit:?}");
    Ok(out)
}

fn all_pass(net: &CodedNetwork, code: &FractionalCode) -> Result<usize, String> {
    let report = verify(net, code).map_err(|e| e.to_string())?;
    for t in &report.terminals {
        // Zero tolerance: identity on the demand, exact zeros elsewhere.
        ensure!(t.decoded.is_identity() && t.interference.is_empty(), "{}: terminal {} fails", net.name(), t.terminal);
    }
    Ok(report.terminals.len())
}

fn criterion_1(art: &mut Artifacts) -> Outcome {
    let mut cases = 0;
    for (q, n) in [(2, 1), (2, 2), (3, 2), (6, 2), (6, 3)] {
        for p in primes_up_to(q as u64).into_iter().filter(|&p| (q as u64).is_multiple_of(p)) {
            within(LIMIT_PER_VERIFY_CASE, &format!("n1 q={q} n={n} p={p}"), || {
                let net = gen_n1(q, n).map_err(|e| e.to_string())?;
                let sym = solve_n1(q, n).map_err(|e| e.to_string())?;
                let code = sym.instantiate(gf(p)).map_err(|e| e.to_string())?;
                let terminals = all_pass(&net, &code)?;
                ensure!(terminals == 2 * q * n, "expected {} terminals, got {terminals}", 2 * q * n);
                art.networks.push(net.clone());
                art.codes.push((net, code));
                art.symbolic.push(sym);
                Ok(())
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases verified"))
}

fn criterion_2(art: &mut Artifacts) -> Outcome {
    let mut cases = 0;
    for (q, n) in [(2, 1), (2, 2), (3, 1), (3, 2)] {
        for p in [2u64, 3, 5, 7].into_iter().filter(|&p| !(q as u64).is_multiple_of(p)) {
            within(LIMIT_PER_VERIFY_CASE, &format!("n2 q={q} n={n} p={p}"), || {
                let net = gen_n2(q, n).map_err(|e| e.to_string())?;
                let sym = solve_n2(q, n).map_err(|e| e.to_string())?;
                let code = sym.instantiate(gf(p)).map_err(|e| e.to_string())?;
                let terminals = all_pass(&net, &code)?;
                ensure!(terminals == n * (q + 2), "expected {} terminals, got {terminals}", n * (q + 2));
                art.networks.push(net.clone());
                art.codes.push((net, code));
                art.symbolic.push(sym);
                Ok(())
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases verified"))
}

fn criterion_3(art: &mut Artifacts) -> Outcome {
    let net = gen_n1(2, 2).map_err(|e| e.to_string())?;
    let code = solve_n1(2, 2).unwrap().instantiate(gf(3)).map_err(|e| e.to_string())?;
    let report = verify(&net, &code).map_err(|e| e.to_string())?;
    let failing = report.failing_ids();
    ensure!(failing == ["Ta:a1", "Ta:a2"], "failing set {failing:?}");

    // The residual on u13->u14 is a_j - 2 c_j: identity on a, 2 * (-1) = 1
    // on c over GF(3), nothing else.
    let tm = eval_transfer(&net, &code).map_err(|e| e.to_string())?;
    for m in net.messages() {
        let block = tm.block("u13->u14", m).unwrap();
        let j = m.as_str()[1..].parse::<usize>().unwrap_or(0);
        let expected = match &m.as_str()[..1] {
            "a" => FieldMatrix::unit(2, 1, j - 1, 0, gf(3)),
            "c" => FieldMatrix::unit(2, 1, j - 1, 0, gf(3)).scale(gf(3).reduce(-2)),
            _ => FieldMatrix::zeros(2, 1, gf(3)),
        };
        ensure!(block == &expected, "u13->u14 block for {m}: {:?}", block.to_rows());
    }
    art.codes.push((net, code));

    let err = solve_n2(2, 1).unwrap().instantiate(gf(2));
    ensure!(err == Err(CodeError::QNotInvertible { q: 2, p: 2 }), "n2 at p=2 gave {err:?}");
    Ok("T_a localized; q^-1 rejected at p=2".into())
}

fn criterion_4(art: &mut Artifacts) -> Outcome {
    let cfg = SearchConfig::default();
    let mut notes = Vec::new();
    for (net, p, want_solvable) in [
        (gen_n1(2, 1).unwrap(), 3, false),
        (gen_n1(2, 1).unwrap(), 2, true),
        (gen_n2(2, 1).unwrap(), 2, false),
        (gen_n2(2, 1).unwrap(), 3, true),
    ] {
        let label = format!("{} p={p}", net.name());
        let out = within(LIMIT_PER_SEARCH, &label, || search_scalar(&net, gf(p), &cfg).map_err(|e| e.to_string()))?;
        match (&out, want_solvable) {
            (SearchOutcome::Solvable { code, .. }, true) => {
                all_pass(&net, code)?;
                art.codes.push((net.clone(), code.clone()));
            }
            (SearchOutcome::ExhaustedUnsolvable { .. }, false) => {}
            _ => return Err(format!("{label}: got {}", out.label())),
        }
        notes.push(format!("{label}: {} in {} states", out.label(), out.states_explored()));
    }
    Ok(notes.join("; "))
}

fn random_invertible(rng: &mut impl Rng, dim: usize, p: PrimeModulus) -> FieldMatrix {
    loop {
        let entries = (0..dim * dim).map(|_| rng.gen_range(0..p.get())).collect();
        let m = FieldMatrix::from_flat(dim, dim, entries, p);
        if m.rank() == dim {
            return m;
        }
    }
}

fn random_combination_rows(rng: &mut impl Rng, basis: &[Vec<u64>], count: usize, width: usize, p: PrimeModulus) -> FieldMatrix {
    let mut m = FieldMatrix::zeros(count, width, p);
    for r in 0..count {
        for b in basis {
            let c = rng.gen_range(0..p.get());
            for (col, &x) in b.iter().enumerate() {
                m.set(r, col, p.add(m.get(r, col), p.mul(c, x)));
            }
        }
    }
    m
}

fn criterion_5(_: &mut Artifacts) -> Outcome {
    within(LIMIT_BLOCK_SUITE, "block suite", || {
        let mut rng = common::seeded(1);
        let mut trials = 0;
        for d in [1usize, 2] {
            for n in [2usize, 3] {
                for p in [2u64, 3, 5] {
                    let p = gf(p);
                    let dn = d * n;
                    for _ in 0..1000 {
                        // A_i = row blocks of M^-1, B_j = column blocks of M.
                        let m = random_invertible(&mut rng, dn, p);
                        let inv = m.inverse().map_err(|e| e.to_string())?;
                        let a: Vec<FieldMatrix> = (0..n).map(|i| inv.submatrix(i * d, 0, d, dn)).collect();
                        let b: Vec<FieldMatrix> = (0..n).map(|j| m.submatrix(0, j * d, dn, d)).collect();
                        let check = FieldMatrix::block_identity_check(&a, &b).map_err(|e| e.to_string())?;
                        ensure!(check, "block check rejected M^-1 M");
                        let prod = FieldMatrix::vstack(&a).unwrap().mul(&FieldMatrix::hstack(&b).unwrap()).unwrap();
                        ensure!(prod.is_identity(), "composed product is not I");

                        // Random blocks: whenever the check passes the product is I.
                        let ra: Vec<FieldMatrix> = (0..n).map(|_| random_combination_rows(&mut rng, &inv.to_rows(), d, dn, p)).collect();
                        let rb: Vec<FieldMatrix> = (0..n).map(|_| random_combination_rows(&mut rng, &m.transpose().to_rows(), d, dn, p).transpose()).collect();
                        if FieldMatrix::block_identity_check(&ra, &rb).unwrap() {
                            let prod = FieldMatrix::vstack(&ra).unwrap().mul(&FieldMatrix::hstack(&rb).unwrap()).unwrap();
                            ensure!(prod.is_identity(), "check passed but product is not I");
                        }

                        // A from rows of M^-1 after r, B from columns of M
                        // before r: every A_i B_j vanishes.
                        let r = rng.gen_range(0..=dn);
                        let left: Vec<Vec<u64>> = inv.to_rows().into_iter().skip(r).collect();
                        let right: Vec<Vec<u64>> = m.transpose().to_rows().into_iter().take(r).collect();
                        let za: Vec<FieldMatrix> = (0..n).map(|_| random_combination_rows(&mut rng, &left, d, dn, p)).collect();
                        let zb: Vec<FieldMatrix> = (0..n).map(|_| random_combination_rows(&mut rng, &right, d, dn, p).transpose()).collect();
                        for ai in &za {
                            for bj in &zb {
                                ensure!(ai.mul(bj).unwrap().is_zero(), "construction error: A_i B_j != 0");
                            }
                        }
                        let prod = FieldMatrix::vstack(&za).unwrap().mul(&FieldMatrix::hstack(&zb).unwrap()).unwrap();
                        ensure!(prod.is_zero(), "all-zero blocks but nonzero product");
                        trials += 1;
                    }
                }
            }
        }
        Ok(format!("{trials} trials"))
    })
}

fn criterion_6(art: &mut Artifacts) -> Outcome {
    let mut cases = 0;
    for k in [2, 3] {
        for (base, sym, p) in [
            (gen_n1(2, 2).unwrap(), solve_n1(2, 2).unwrap(), 2),
            (gen_n2(2, 1).unwrap(), solve_n2(2, 1).unwrap(), 3),
            (gen_n2(2, 2).unwrap(), solve_n2(2, 2).unwrap(), 3),
        ] {
            within(LIMIT_PER_UNION_CASE, &format!("{} k={k}", base.name()), || {
                let net = union_copies(&base, k).map_err(|e| e.to_string())?;
                let lifted = lift_union(&sym, k).map_err(|e| e.to_string())?;
                let code = lifted.instantiate(gf(p)).map_err(|e| e.to_string())?;
                ensure!(code.k == k, "lifted code has k={}", code.k);
                all_pass(&net, &code)?;
                art.networks.push(net.clone());
                art.codes.push((net, code));
                art.symbolic.push(lifted);
                Ok(())
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} union cases verified"))
}

fn criterion_7(art: &mut Artifacts) -> Outcome {
    let mut notes = Vec::new();
    for (base, sym, p) in [(gen_n1(2, 1).unwrap(), solve_n1(2, 1).unwrap(), 2), (gen_n2(2, 1).unwrap(), solve_n2(2, 1).unwrap(), 3)] {
        let n = 1;
        within(LIMIT_PER_GADGET_CASE, base.name(), || {
            let (net, log) = gadget_transform_logged(&base, n).map_err(|e| e.to_string())?;
            ensure!(!log.is_empty(), "{}: no gadget applied", base.name());
            ensure!(net.is_multiple_unicast(), "{}: result is not multiple-unicast", base.name());
            let sources = |g: &CodedNetwork| g.sources().count();
            let terminals = |g: &CodedNetwork| g.terminals().count();
            ensure!(sources(&net) == sources(&base) + log.len() * n, "source delta");
            ensure!(terminals(&net) + 2 * log.len() == terminals(&base) + log.len() * (n + 1), "terminal delta");
            for app in &log {
                let prefix = format!("g{}:", app.index);
                let new_sources = net.sources().filter(|s| s.id.starts_with(&prefix)).count();
                let new_terminals = net.terminals().filter(|t| t.id.starts_with(&prefix)).count();
                ensure!(new_sources == n && new_terminals == n + 1, "application {} adds {new_sources}/{new_terminals}", app.index);
                ensure!(net.node(&app.n1).map(|v| v.role()) == Some(Role::Intermediate), "n1 not demoted");
                ensure!(net.node(&app.n2).map(|v| v.role()) == Some(Role::Intermediate), "n2 not demoted");
            }
            let lifted = lift_gadget(&sym, &base, &net).map_err(|e| e.to_string())?;
            let code = lifted.instantiate(gf(p)).map_err(|e| e.to_string())?;
            all_pass(&net, &code)?;
            notes.push(format!("{}: {} application(s)", base.name(), log.len()));
            art.networks.push(net.clone());
            art.codes.push((net, code));
            art.symbolic.push(lifted);
            Ok(())
        })?;
    }
    Ok(notes.join("; "))
}

fn criterion_8(_: &mut Artifacts) -> Outcome {
    within(LIMIT_ORACLE, "oracle", || {
        let mut rng = common::seeded(8);
        let (mut sat, mut unsat) = (0, 0);
        let mut done = 0;
        while done < 20 {
            let net = common::random_dag(&mut rng, 6, 3);
            if common::local_coefficient_count(&net) > 16 {
                continue;
            }
            done += 1;
            let raw = common::raw_scalar_solvable_gf2(&net);
            let out = search_scalar(&net, gf(2), &SearchConfig::default()).map_err(|e| e.to_string())?;
            ensure!(!matches!(out, SearchOutcome::Inconclusive { .. }), "search inconclusive");
            ensure!(out.is_solvable() == raw, "disagreement on {}", net.save());
            if raw {
                sat += 1;
            } else {
                unsat += 1;
            }
        }
        Ok(format!("20 networks agree ({sat} solvable, {unsat} unsolvable)"))
    })
}

fn criterion_9(art: &mut Artifacts) -> Outcome {
    for net in art.networks.iter().chain(art.codes.iter().map(|(n, _)| n)) {
        let text = net.save();
        let back = CodedNetwork::load(&text).map_err(|e| format!("{}: {e}", net.name()))?;
        ensure!(&back == net, "{}: network round trip differs", net.name());
        ensure!(back.save() == text && net.save() == text, "{}: network save not byte-stable", net.name());
    }
    for (net, code) in &art.codes {
        let text = code.save();
        let back = FractionalCode::load(&text, net).map_err(|e| format!("{}: {e}", net.name()))?;
        ensure!(&back == code, "{}: code round trip differs", net.name());
        ensure!(back.save() == text && code.save() == text, "{}: code save not byte-stable", net.name());
    }
    for sym in &art.symbolic {
        let text = sym.save();
        let back = SymbolicCode::parse(&text).map_err(|e| e.to_string())?;
        ensure!(&back == sym, "symbolic round trip differs");
        ensure!(back.save() == text, "symbolic save not byte-stable");
    }
    let demanded: usize = art.networks.iter().map(|n| n.messages().iter().filter(|m: &&MessageId| n.demanders_of(m).count() > 0).count()).sum();
    ensure!(demanded > 0, "no artifacts collected");
    Ok(format!(
        "{} networks, {} codes, {} symbolic codes round-trip",
        art.networks.len() + art.codes.len(),
        art.codes.len(),
        art.symbolic.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        (1, "N1 achievability grid at p | q", criterion_1),
        (2, "N2 achievability grid at p not dividing q", criterion_2),
        (3, "characteristic separation, constructive side", criterion_3),
        (4, "scalar nonexistence certificates and witnesses", criterion_4),
        (5, "block identity / block zero properties", criterion_5),
        (6, "union lifting", criterion_6),
        (7, "multiple-unicast gadget", criterion_7),
        (8, "solver agrees with brute force", criterion_8),
        (9, "serialization round trips", criterion_9),
    ];
    let mut art = Artifacts::default();
    let mut failed = Vec::new();
    for (id, title, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| run(&mut art))).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("PASS criterion {id}: {title} [{took:.2?}] {detail}"),
            Err(why) => {
                println!("FAIL criterion {id}: {title} [{took:.2?}] {why}");
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
