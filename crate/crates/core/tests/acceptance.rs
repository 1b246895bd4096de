//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line, captured or not.
//! Pass `--ignored` or `--include-ignored` to add the long genus-5 run.

use std::process::ExitCode;
use std::time::Instant;

use cartier::search::DEFAULT_COLLECT_LIMIT;
use cartier::verify::{
    find_p_rank_witnesses, reproduce_script, verify_genus_p_minus_1, verify_theorem1, Script,
    ScriptOptions,
};
use cartier::{run_search_with_threads, Curve, Elem, Field, Mode, Poly, RunOptions, SearchSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn opts(threads: usize) -> RunOptions {
    RunOptions {
        threads: Some(threads),
        ..RunOptions::default()
    }
}

/// JSON documents for criteria 1 to 5 with timing stripped.
fn reports(threads: usize) -> Vec<(String, String)> {
    let o = opts(threads);
    let mut out = Vec::new();
    for (name, script) in [("script-1", Script::One), ("script-2", Script::Two)] {
        let mut r = reproduce_script(script, &ScriptOptions::default(), &o).unwrap();
        r.report = r.report.without_timing();
        out.push((name.to_string(), r.to_json()));
    }
    for (p, k, g) in [(3, 1, 3), (3, 2, 3), (3, 1, 4)] {
        let r = verify_theorem1(p, k, g, &o).unwrap().without_timing();
        out.push((format!("theorem1 p={p} k={k} g={g}"), r.to_json()));
    }
    let r = verify_genus_p_minus_1(&o).unwrap().without_timing();
    out.push(("prop-p5".into(), r.to_json()));
    for p in [3u64, 5, 7] {
        let r = run_search_with_threads(&genus2_spec(p), Some(threads))
            .unwrap()
            .without_timing();
        out.push((format!("genus-2 p={p}"), r.to_json()));
    }
    for p in [5u64, 7] {
        let r = find_p_rank_witnesses(p, &o)
            .unwrap()
            .consistency()
            .without_timing();
        out.push((format!("p-rank p={p}"), r.to_json()));
    }
    out
}

fn genus2_spec(p: u64) -> SearchSpec {
    SearchSpec::normalized(&Field::prime(p).unwrap(), 2).with_target_a(1)
}

fn criterion_1() -> Outcome {
    let r = reproduce_script(Script::One, &ScriptOptions::default(), &opts(1)).unwrap();
    let n = r.report.counts.enumerated;
    Outcome::new(
        r.pass() && n == 5_764_801,
        format!("{n} candidates over F_7, {} smooth with a=3", r.observed_n),
    )
}

fn criterion_2() -> Outcome {
    let r = reproduce_script(Script::Two, &ScriptOptions::default(), &opts(1)).unwrap();
    let n = r.report.counts.enumerated;
    Outcome::new(
        r.pass() && n == 1_000_000,
        format!(
            "{n} seeded samples over F_49, {} smooth with a=3",
            r.observed_n
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, k, g) in [(3, 1, 3), (3, 2, 3), (3, 1, 4)] {
        let r = verify_theorem1(p, k, g, &opts(1)).unwrap();
        pass &= r.pass;
        parts.push(format!(
            "F_{} g={g}: {}",
            3u32.pow(k),
            r.searches[0].matched()
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let r = verify_genus_p_minus_1(&opts(1)).unwrap();
    let detail = match r.witnesses.iter().find(|w| !w.invariants.smooth) {
        Some(w) if !r.pass => format!("{}; e.g. f = {}", r.observed, w.poly(&r.field)),
        _ => r.observed.clone(),
    };
    Outcome::new(r.pass, detail)
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [3u64, 5, 7] {
        let r = run_search_with_threads(&genus2_spec(p), Some(1)).unwrap();
        pass &= r.matched() >= 1;
        parts.push(format!("g=2 p={p}: {}", r.matched()));
    }
    for p in [5u64, 7] {
        let w = find_p_rank_witnesses(p, &opts(1)).unwrap();
        let c = w.consistency();
        pass &= c.pass;
        parts.push(format!(
            "g=3 p={p}: p-rank 0 {}, p-rank 1 {}",
            w.p_rank_0.matched(),
            w.p_rank_1.matched()
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn random_normalized(field: &Field, genus: usize, rng: &mut ChaCha8Rng) -> Poly {
    let degree = 2 * genus + 1;
    let mut coeffs = vec![Elem::ZERO; degree + 1];
    for c in coeffs.iter_mut().take(degree).skip(1) {
        *c = field.random(rng);
    }
    coeffs[degree] = Elem::ONE;
    Poly::from_indices(field, coeffs)
}

/// Schoolbook product written against the raw field operations only.
fn naive_mul(field: &Field, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut out = vec![Elem::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    out
}

fn naive_half_power(f: &Poly) -> Vec<Elem> {
    let field = f.field();
    let m = (field.characteristic() - 1) / 2;
    let mut acc = vec![Elem::ONE];
    for _ in 0..m {
        acc = naive_mul(field, &acc, f.coeffs());
    }
    acc
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // (a), (b), (c), (d) on 1000 random normalized f per (p, g).
    let (mut ident, mut zeros, mut bound, mut power, mut smooth_seen) = (0, 0, 0, 0, 0);
    for (p, g) in [(5u64, 3usize), (7, 4), (7, 5)] {
        let field = Field::prime(p).unwrap();
        let m = (p - 1) / 2;
        for _ in 0..1000 {
            let f = random_normalized(&field, g, &mut rng);
            let curve = Curve::new(f.clone()).unwrap();
            let a = curve.cartier_matrix();
            let pu = p as usize;
            let c1 = f.coeff(1);
            if a.entry(1, pu.div_ceil(2)) != field.pow(c1, m)
                || a.entry(g, g - (pu - 1) / 2) != Elem::ONE
            {
                ident += 1;
            }
            let row1 = ((pu + 3) / 2..=g).any(|j| !a.entry(1, j).is_zero());
            let rowg = (1..=g)
                .take_while(|&j| j + pu.div_ceil(2) <= g)
                .any(|j| !a.entry(g, j).is_zero());
            if row1 || rowg {
                zeros += 1;
            }
            let inv = curve.invariants();
            if inv.smooth {
                smooth_seen += 1;
                if inv.a_number + inv.p_rank > g {
                    bound += 1;
                }
            }
            let mut oracle = naive_half_power(&f);
            while oracle.last().is_some_and(|c| c.is_zero()) {
                oracle.pop();
            }
            if f.half_power().unwrap().coeffs() != oracle.as_slice() {
                power += 1;
            }
        }
    }
    for (tag, bad) in [("a", ident), ("b", zeros), ("c", bound), ("d", power)] {
        if bad > 0 {
            failures.push(format!("({tag}) {bad} violations"));
        }
    }

    // (e) exhaustive p = 5, g = 3, a = g.
    let e = run_search_with_threads(
        &SearchSpec::normalized(&Field::prime(5).unwrap(), 3).with_target_a(3),
        Some(1),
    )
    .unwrap();
    if e.matched() != 0 || e.counts.enumerated != 15_625 {
        failures.push(format!("(e) {} smooth with a=3", e.matched()));
    }

    // (f) every monic degree-5 f with c0 = 0 over F_3 against integer
    // expansion mod 3.
    let field = Field::prime(3).unwrap();
    let mut checked = 0;
    let mut mismatched = 0;
    for n in 0..81u64 {
        let ints: Vec<u64> = std::iter::once(0)
            .chain((0..4).map(|i| (n / 3u64.pow(i)) % 3))
            .chain(std::iter::once(1))
            .collect();
        // m = 1 at p = 3, so the half power is f itself.
        let kappa = |i: usize| ints.get(i).copied().unwrap_or(0) % 3;
        let f = Poly::from_ints(&field, &ints.iter().map(|&c| c as i64).collect::<Vec<_>>());
        let a = Curve::new(f).unwrap().cartier_matrix();
        for i in 1..=2usize {
            for j in 1..=2usize {
                let expected = field.from_int(kappa(3 * i - j) as i64);
                if a.entry(i, j) != expected {
                    mismatched += 1;
                }
            }
        }
        checked += 1;
    }
    if mismatched > 0 {
        failures.push(format!("(f) {mismatched} entries differ"));
    }

    Outcome::new(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "3000 sampled f ({smooth_seen} smooth), 15625 exhaustive, {checked} matrices vs oracle"
            )
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_7() -> Outcome {
    let first = reports(1);
    let threaded = reports(4);
    let again = reports(1);
    let mut diffs = Vec::new();
    for ((name, a), ((_, b), (_, c))) in first.iter().zip(threaded.iter().zip(again.iter())) {
        if a != b || a != c {
            diffs.push(name.clone());
        }
    }
    Outcome::new(
        diffs.is_empty() && first.len() == threaded.len(),
        if diffs.is_empty() {
            format!(
                "{} reports identical across threads 1/4 and reruns",
                first.len()
            )
        } else {
            format!("differing: {}", diffs.join(", "))
        },
    )
}

fn criterion_8() -> Outcome {
    let field = Field::prime(7).unwrap();
    let mut spec = SearchSpec::normalized(&field, 5).with_target_a(4);
    spec.prefilter = true;
    spec.budget = 7u64.pow(10);
    spec.collect_limit = DEFAULT_COLLECT_LIMIT;
    assert!(matches!(spec.mode, Mode::Exhaustive));
    let r = run_search_with_threads(&spec, None).unwrap();
    Outcome::new(
        r.matched() == 0 && r.counts.enumerated == 7u64.pow(10),
        format!(
            "{} candidates over F_7, {} smooth with a=4",
            r.counts.enumerated,
            r.matched()
        ),
    )
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let ignored = args
        .iter()
        .any(|a| a == "--ignored" || a == "--include-ignored");

    let criteria: [Criterion; 7] = [
        ("1 exhaustive F_7 genus 4", criterion_1),
        ("2 random F_49 genus 4", criterion_2),
        ("3 genus >= p at p = 3", criterion_3),
        ("4 p = 5 genus 4 rank-one form", criterion_4),
        ("5 existence witnesses", criterion_5),
        ("6 property suite", criterion_6),
        ("7 determinism", criterion_7),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        println!(
            "criterion {name}: {} ({}) [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    }
    if ignored {
        let start = Instant::now();
        let o = criterion_8();
        println!(
            "criterion 8 exhaustive F_7 genus 5: {} ({}) [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += usize::from(!o.pass);
    } else {
        println!("criterion 8 exhaustive F_7 genus 5: IGNORED (pass --ignored to run)");
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    }
}
