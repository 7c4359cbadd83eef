//! Acceptance gate: eight end-to-end criteria, one PASS/FAIL line each.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use qdm::dmodule::{apply, find_annihilators, gkz_operator, operator_in_span, semiclassical, AnsatzBounds, DiffOp};
use qdm::givental_series::{component, euler_ratio, LaurentH, LogHbar, SignMode};
use qdm::loop_model::{euler_ratio_n, min_modes};
use qdm::{CohomRing, CurveClass, Error, Rational};

use common::{factorial, load, series, CORPUS};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn projective(n: usize) -> &'static str {
    ["", "p1", "p2", "p3"][n]
}

/// f_0 of P^n equals sum_d q^d / (hbar^{d(n+1)} (d!)^{n+1}) through q^6.
fn closed_form() -> Outcome {
    let mut notes = Vec::new();
    for n in 1..=3usize {
        let start = Instant::now();
        let bound = 6 * (n as u32 + 1);
        let (_, ring, f) = series(projective(n), bound);
        let f0 = component(&f, &ring, 0, ring.top_degree() as u32).map_err(|e| e.to_string())?;
        ensure(f.terms().len() == 7, || format!("P^{n}: expected degrees 0..6, got {}", f.terms().len()))?;
        for d in 0..=6i64 {
            let denom = factorial(d).pow(n as u32 + 1);
            let expected = BTreeMap::from([(
                LogHbar { logs: vec![0], hbar: -d * (n as i64 + 1) },
                Rational::new(BigInt::one(), denom),
            )]);
            let got = f0.coefficient(&CurveClass(vec![d]));
            ensure(got == expected, || format!("P^{n}, q^{d}: got {got:?}"))?;
        }
        let elapsed = start.elapsed();
        ensure(elapsed < Duration::from_secs(10), || format!("P^{n} took {elapsed:?}"))?;
        notes.push(format!("P^{n} {:.2}s", elapsed.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

/// `theta^{n+1} - q` written out coefficient by coefficient.
fn projective_operator(n: usize) -> DiffOp {
    DiffOp::monomial(vec![0], vec![n as u32 + 1], 0, Rational::one())
        .add(&DiffOp::monomial(vec![1], vec![0], 0, -Rational::one()))
}

fn annihilators() -> Outcome {
    let mut notes = Vec::new();
    for n in 1..=3usize {
        let k = n as u32 + 1;
        let (v, ring, f) = series(projective(n), 3 * k);
        let bounds = AnsatzBounds { theta_order: k, q_degree: 1, hbar_degree: k };
        let found = find_annihilators(&ring, &f, bounds).map_err(|e| e.to_string())?;
        let target = projective_operator(n);
        ensure(operator_in_span(&target, &found), || format!("P^{n}: target not in span"))?;
        ensure(gkz_operator(&v.charge, &CurveClass(vec![1])) == target, || format!("P^{n}: GKZ differs"))?;
        for op in found.iter().chain(std::iter::once(&target)) {
            let out = apply(&ring, op, &f).map_err(|e| e.to_string())?;
            ensure(out.valid_terms().len() >= 2, || format!("P^{n}: window too small"))?;
            ensure(out.vanishes(), || format!("P^{n}: {op} does not annihilate"))?;
        }
        notes.push(format!("P^{n} span dim {}", found.len()));
    }
    Ok(notes.join(", "))
}

/// Relation as a map from (p exponents, q exponents) to coefficients.
type Relation = BTreeMap<(Vec<u32>, Vec<u32>), Rational>;

fn relation(op: &DiffOp) -> Relation {
    semiclassical(op).terms().clone()
}

/// Rank test for membership of `rel` in the span of `basis`.
fn relation_in_span(rel: &Relation, basis: &[Relation]) -> bool {
    let keys: Vec<_> = basis.iter().chain(std::iter::once(rel)).flat_map(|r| r.keys().cloned()).collect();
    let vec_of = |r: &Relation| -> Vec<Rational> {
        keys.iter().map(|k| r.get(k).cloned().unwrap_or_else(Rational::zero)).collect()
    };
    let base: Vec<Vec<Rational>> = basis.iter().map(vec_of).collect();
    let mut ext = base.clone();
    ext.push(vec_of(rel));
    qdm::linalg::rank(&ext) == qdm::linalg::rank(&base)
}

/// Normal form modulo `p_i^{e_i} = q_i` (the leading terms are coprime, so the
/// rewriting is confluent and zero exactly on the ideal).
fn reduce_modulo(rel: &Relation, exps: &[u32]) -> Relation {
    let mut out: Relation = BTreeMap::new();
    for ((p, q), c) in rel {
        let (mut p, mut q) = (p.clone(), q.clone());
        for (i, &e) in exps.iter().enumerate() {
            q[i] += p[i] / e;
            p[i] %= e;
        }
        *out.entry((p, q)).or_insert_with(Rational::zero) += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn classical_zero(ring: &CohomRing, rel: &Relation) -> bool {
    let poly: BTreeMap<Vec<u32>, Rational> = rel
        .iter()
        .filter(|((_, q), _)| q.iter().all(|&x| x == 0))
        .map(|((p, _), c)| (p.clone(), c.clone()))
        .collect();
    ring.from_poly(&poly).is_zero()
}

fn semiclassical_relations() -> Outcome {
    for n in 1..=3usize {
        let k = n as u32 + 1;
        let (_, ring, f) = series(projective(n), 3 * k);
        let bounds = AnsatzBounds { theta_order: k, q_degree: 1, hbar_degree: k };
        let found = find_annihilators(&ring, &f, bounds).map_err(|e| e.to_string())?;
        let expected: Relation = BTreeMap::from([
            ((vec![k], vec![0]), Rational::one()),
            ((vec![0], vec![1]), -Rational::one()),
        ]);
        let rels: Vec<Relation> = found.iter().map(relation).filter(|r| !r.is_empty()).collect();
        ensure(relation_in_span(&expected, &rels), || format!("P^{n}: p^{k} = q not recovered"))?;
        for r in &rels {
            ensure(reduce_modulo(r, &[k]).is_empty(), || format!("P^{n}: stray relation {r:?}"))?;
            ensure(classical_zero(&ring, r), || format!("P^{n}: q=0 part nonzero"))?;
        }
        ensure(relation(&projective_operator(n)) == expected, || format!("P^{n}: p^{k} = q mismatch"))?;
    }

    let (v, ring, f) = series("p1xp1", 8);
    let bounds = AnsatzBounds { theta_order: 2, q_degree: 1, hbar_degree: 2 };
    let found = find_annihilators(&ring, &f, bounds).map_err(|e| e.to_string())?;
    let expected: Vec<Relation> = (0..2)
        .map(|i| {
            let mut p = vec![0, 0];
            p[i] = 2;
            let mut q = vec![0, 0];
            q[i] = 1;
            BTreeMap::from([((p, vec![0, 0]), Rational::one()), ((vec![0, 0], q), -Rational::one())])
        })
        .collect();
    let rels: Vec<Relation> = found.iter().map(relation).filter(|r| !r.is_empty()).collect();
    for r in &rels {
        ensure(reduce_modulo(r, &[2, 2]).is_empty(), || format!("P1xP1: stray relation {r:?}"))?;
        ensure(classical_zero(&ring, r), || "P1xP1: q=0 part nonzero".into())?;
    }
    for (i, e) in expected.iter().enumerate() {
        ensure(relation_in_span(e, &rels), || format!("P1xP1: p{}^2 = q{} not recovered", i + 1, i + 1))?;
        let mut d = vec![0, 0];
        d[i] = 1;
        ensure(&relation(&gkz_operator(&v.charge, &CurveClass(d))) == e, || "P1xP1: GKZ relation".into())?;
    }
    Ok(format!("P^1..P^3, P1xP1 ({} relations)", rels.len()))
}

fn stabilization() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for name in ["p2", "p1xp1"] {
        let (v, ring) = load(name);
        for d in v.degrees(6).map_err(|e| e.to_string())? {
            let stable = euler_ratio(&ring, &v.charge, &d, SignMode::StrictPositive).map_err(|e| e.to_string())?;
            let need = min_modes(&v.charge, &d);
            let expected_need = v.charge.pairing_vector(&d).into_iter().max().unwrap_or(0).max(0) as usize;
            ensure(need == expected_need, || format!("{name} {d}: N(d) = {need}"))?;
            for n in need..=need + 3 {
                let r = euler_ratio_n(&ring, &v.charge, &d, n).map_err(|e| e.to_string())?;
                ensure(r == stable, || format!("{name} {d}: N = {n} differs"))?;
                checked += 1;
            }
            if need > 0 {
                let below = euler_ratio_n(&ring, &v.charge, &d, need - 1);
                ensure(matches!(below, Err(Error::ComponentAbsent { .. })), || format!("{name} {d}: N < N(d) accepted"))?;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} (d, N) pairs, {:.2}s", elapsed.as_secs_f64()))
}

/// Expands `prod (alpha + nu hbar)` by plain multiplication.
fn linear_product(ring: &CohomRing, factors: &[(usize, i64)]) -> LaurentH {
    factors.iter().fold(LaurentH::one(ring), |acc, &(k, nu)| {
        acc.mul(&LaurentH::linear_factor(ring, &ring.alpha(k), nu), ring)
    })
}

fn ring_sanity() -> Outcome {
    let mut inversions = 0;
    for name in CORPUS {
        let (v, ring) = load(name);
        ensure(ring.size() == v.fan.max_cones().len(), || format!("{name}: dimension"))?;
        ensure(ring.dual_basis().is_ok(), || format!("{name}: pairing singular"))?;
        let top = ring.top_degree();
        for deg in 0..=top {
            let m = ring.pairing_matrix(deg);
            ensure(qdm::linalg::rank(&m) == m.len(), || format!("{name}: pairing in degree {deg}"))?;
        }
        ensure(ring.linear_relations(&v.fan).iter().all(|c| c.is_zero()), || format!("{name}: linear relations"))?;
        for d in v.degrees(6).map_err(|e| e.to_string())? {
            let a = v.charge.pairing_vector(&d);
            let mut denominator = Vec::new();
            let mut numerator = Vec::new();
            for (k, &ak) in a.iter().enumerate() {
                for nu in 1..=ak {
                    let inv = LaurentH::inverse_linear_factor(&ring, &ring.alpha(k), nu);
                    let back = inv.mul(&linear_product(&ring, &[(k, nu)]), &ring);
                    ensure(back == LaurentH::one(&ring), || format!("{name}: ({k},{nu}) inverse"))?;
                    inversions += 1;
                    denominator.push((k, nu));
                }
                numerator.extend((ak + 1..=0).map(|nu| (k, nu)));
            }
            let r = euler_ratio(&ring, &v.charge, &d, SignMode::General).map_err(|e| e.to_string())?;
            let lhs = r.mul(&linear_product(&ring, &denominator), &ring);
            ensure(lhs == linear_product(&ring, &numerator), || format!("{name} {d}: multiply-back"))?;
        }
    }
    Ok(format!("{} fans, {inversions} inversions", CORPUS.len()))
}

fn homogeneity() -> Outcome {
    let mut monomials = 0;
    for name in CORPUS {
        let (v, ring, f) = series(name, 8);
        for (d, r) in f.terms() {
            let c1 = v.charge.c1(d);
            for (&h, class) in r.terms() {
                for (i, c) in class.coords().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    monomials += 1;
                    let lhs = 2 * ring.basis_degree(i) as i64 + 2 * h;
                    ensure(lhs == -2 * c1, || format!("{name} {d}: w-degree {} at hbar^{h}", ring.basis_degree(i)))?;
                }
            }
        }
    }
    Ok(format!("{monomials} monomials, 0 violations"))
}

fn gkz_property() -> Outcome {
    let mut count = 0;
    for name in CORPUS {
        let (v, ring, f) = series(name, 8);
        ensure(v.is_fano(), || format!("{name}: not Fano"))?;
        for g in &v.generators {
            let op = gkz_operator(&v.charge, g);
            let out = apply(&ring, &op, &f).map_err(|e| format!("{name} {g}: {e}"))?;
            ensure(!out.valid_terms().is_empty(), || format!("{name} {g}: empty window"))?;
            ensure(out.vanishes(), || format!("{name} {g}: {op} does not annihilate"))?;
            count += 1;
        }
    }
    Ok(format!("{count} generators across {} fans", CORPUS.len()))
}

fn run_cli(args: &[String]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qdm")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || {
        format!("{args:?} exited with {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let mut runs = 0;
    for name in CORPUS {
        let fan = common::fan_path(name).display().to_string();
        for cmd in ["cohomology", "ifunction", "operators", "loop-model"] {
            let mut args = vec![cmd.to_string(), fan.clone(), "--allow-general-sign".into()];
            if cmd == "ifunction" {
                args.push("--components".into());
            }
            let first = run_cli(&args)?;
            let second = run_cli(&args)?;
            ensure(first == second, || format!("{name} {cmd}: outputs differ"))?;
            serde_json::from_slice::<serde_json::Value>(&first).map_err(|e| format!("{name} {cmd}: {e}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} command pairs byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 projective-space closed form", closed_form),
        ("2 annihilator recovery", annihilators),
        ("3 semiclassical relations", semiclassical_relations),
        ("4 stabilization", stabilization),
        ("5 ring sanity", ring_sanity),
        ("6 homogeneity", homogeneity),
        ("7 fano gkz property", gkz_property),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(note) => println!("criterion {name}: PASS ({note})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
