//! Acceptance criteria A1–A10. Prints one line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use onerel::cayley::{build_ball, chain_multiple_check, Ball};
use onerel::decide::{
    decide, decide_with, divisibility, find_witness, SearchOptions, SearchOutcome, Verdict,
};
use onerel::groupring::{fox_fundamental_sum, support_lemma_probe, GroupRingElement};
use onerel::intlin::{smith_normal_form, IntMatrix};
use onerel::magnus::{build_solver, ResourceBudget};
use onerel::words::primitive_root;
use onerel::{Alphabet, Letter, Presentation, ReducedWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("A1", mins(5), a1),
        ("A2", mins(5), a2),
        ("A3", mins(10), a3),
        ("A4", mins(5), a4),
        ("A5", mins(60), a5),
        ("A6", mins(60), a6),
        ("A7", mins(60), a7),
        ("A8", mins(60), a8),
        ("A9", mins(60), a9),
        ("A10", mins(60), a10),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match result {
            Ok(m) if took > limit => Err(format!("{m}; took {took:?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(m) => println!("{name} PASS ({took:.2?}) {m}"),
            Err(m) => {
                failed += 1;
                println!("{name} FAIL ({took:.2?}) {m}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn mins(m: u64) -> Duration {
    Duration::from_secs(60 * m)
}

fn alpha(s: &str) -> Alphabet {
    Alphabet::from_letters(s).unwrap()
}

fn word(s: &str, a: &Alphabet) -> ReducedWord {
    ReducedWord::parse(s, a).unwrap()
}

fn budget() -> ResourceBudget {
    ResourceBudget::default()
}

fn text(w: &ReducedWord, a: &Alphabet) -> String {
    w.to_text(a)
}

fn random_word(rng: &mut impl Rng, gens: usize, len: usize) -> ReducedWord {
    let mut letters: Vec<Letter> = Vec::new();
    while letters.len() < len {
        let l = Letter::new(rng.gen_range(0..gens), rng.gen_bool(0.5));
        if !letters.last().is_some_and(|&p| p.is_inverse_of(l)) {
            letters.push(l);
        }
    }
    ReducedWord::from_letters(letters)
}

/// All freely reduced words of length exactly `n` over `gens` generators.
fn all_words(gens: usize, n: usize) -> Vec<ReducedWord> {
    let mut out = vec![Vec::<Letter>::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &out {
            for g in 0..gens {
                for inv in [false, true] {
                    let l = Letter::new(g, inv);
                    if !w.last().is_some_and(|&p| p.is_inverse_of(l)) {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
        }
        out = next;
    }
    out.into_iter().map(ReducedWord::from_letters).collect()
}

fn baumslag_gersten(w: &str, k: i64) -> Check {
    let a = alpha("at");
    let d = decide(&word(w, &a), &a, budget()).map_err(|e| e.to_string())?;
    match d.verdict {
        Verdict::NotResiduallyQSolvable(wit)
            if wit.r.len() == 1 && wit.r.letters()[0].gen == 0 && wit.k == k =>
        {
            Ok(format!("{w}: NO, r = {}, k = {k}", text(&wit.r, &a)))
        }
        v => Err(format!("{w}: {v:?}")),
    }
}

fn a1() -> Check {
    let m2 = baumslag_gersten("TataTAtAA", 1)?;
    let m3 = baumslag_gersten("TataTAtAAA", 2)?;
    Ok(format!("{m2}; {m3}"))
}

fn commutator(x: &ReducedWord, y: &ReducedWord) -> ReducedWord {
    x.mul(y).mul(&x.inverse()).mul(&y.inverse())
}

fn a2() -> Check {
    let ab = alpha("ab");
    let (a, b) = (word("a", &ab), word("b", &ab));
    let inner = commutator(&commutator(&a, &b), &commutator(&b, &a.inverse()));
    let w = commutator(&a.mul(&inner), &b);
    let opts = SearchOptions {
        max_r_len: Some(4),
        threads: 1,
    };
    let search = find_witness(&w, &ab, budget(), &opts).map_err(|e| e.to_string())?;
    let SearchOutcome::Found(wit) = search.outcome else {
        return Err(format!("witness search: {:?}", search.outcome));
    };
    if text(&wit.class_rep, &ab) != "abAB" || wit.k != 1 {
        return Err(format!("witness {} k = {}", text(&wit.r, &ab), wit.k));
    }
    let d = decide_with(&w, &ab, budget(), &opts).map_err(|e| e.to_string())?;
    match d.verdict {
        Verdict::NotResiduallyQSolvable(_) => Ok(format!(
            "|w| = {}, r = {}, k = 1, decide NO",
            w.len(),
            text(&wit.r, &ab)
        )),
        v => Err(format!("decide: {v:?}")),
    }
}

fn a3() -> Check {
    let ab = alpha("ab");
    let mut count = 0;
    for n in 1..=6 {
        for w in all_words(2, n).into_iter().filter(ReducedWord::is_positive) {
            if primitive_root(&w).unwrap().1 > 1 {
                continue;
            }
            let d = decide(&w, &ab, budget()).map_err(|e| e.to_string())?;
            if !matches!(d.verdict, Verdict::ResiduallyQSolvable(_)) {
                return Err(format!("{}: {:?}", text(&w, &ab), d.verdict));
            }
            count += 1;
        }
    }
    Ok(format!("{count} positive words, all YES"))
}

fn a4() -> Check {
    let ab = alpha("ab");
    let mut count = 0;
    for len in 1..=3 {
        for p in all_words(2, len) {
            if !p.is_cyclically_reduced() || primitive_root(&p).unwrap().1 > 1 {
                continue;
            }
            for n in [2i64, 3] {
                let w = p.pow(n);
                let k = divisibility(&w, &p, &ab, budget()).map_err(|e| e.to_string())?;
                if k != Some(n) {
                    return Err(format!(
                        "divisibility({}, {}) = {k:?}",
                        text(&w, &ab),
                        text(&p, &ab)
                    ));
                }
                let d = decide(&w, &ab, budget()).map_err(|e| e.to_string())?;
                if !matches!(d.verdict, Verdict::NotResiduallyQSolvable(_)) {
                    return Err(format!("{}: {:?}", text(&w, &ab), d.verdict));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} proper powers, all NO with k = n"))
}

fn a5() -> Check {
    let ab = alpha("ab");
    let relators: Vec<ReducedWord> = (1..=2).flat_map(|n| all_words(2, n)).collect();
    let mut pairs = 0;
    let mut divisible = 0;
    for r in &relators {
        let balls: Vec<Ball> = (0..=5)
            .map(|rad| build_ball(r, &ab, rad, budget()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for (n, ball) in balls.iter().enumerate() {
            for w in all_words(2, n) {
                let fox = divisibility(&w, r, &ab, budget()).map_err(|e| e.to_string())?;
                let ball = chain_multiple_check(&w, r, ball).map_err(|e| e.to_string())?;
                if fox != ball {
                    return Err(format!(
                        "w = {}, r = {}: fox {fox:?}, ball {ball:?}",
                        text(&w, &ab),
                        text(r, &ab)
                    ));
                }
                pairs += 1;
                divisible += usize::from(fox.is_some());
            }
        }
    }
    Ok(format!("{pairs} pairs agree ({divisible} divisible)"))
}

fn a6() -> Check {
    let abc = alpha("abc");
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let len = rng.gen_range(0..=40);
        let w = random_word(&mut rng, 3, len);
        let expected =
            GroupRingElement::from_int_terms([(w.clone(), 1), (ReducedWord::identity(), -1)]);
        if fox_fundamental_sum(&w, &abc) != expected {
            return Err(format!("identity fails for {}", text(&w, &abc)));
        }
    }
    Ok("1000 words, zero failures".into())
}

fn random_element(rng: &mut impl Rng, scalar: bool) -> GroupRingElement {
    if scalar {
        let c = if rng.gen_bool(0.5) {
            rng.gen_range(1..=5)
        } else {
            -rng.gen_range(1..=5)
        };
        return GroupRingElement::scalar(c);
    }
    loop {
        let size = rng.gen_range(1..=4);
        let terms = (0..size).map(|_| {
            let len = rng.gen_range(0..=4);
            let c = if rng.gen_bool(0.5) {
                rng.gen_range(1..=3)
            } else {
                -rng.gen_range(1..=3)
            };
            (random_word(rng, 2, len), c)
        });
        let e = GroupRingElement::from_int_terms(terms.collect::<Vec<_>>());
        if !e.is_zero() {
            return e;
        }
    }
}

fn a7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut scalars = 0;
    for i in 0..10_000 {
        let scalar = rng.gen_bool(0.2);
        let a = random_element(&mut rng, scalar);
        let b = random_element(&mut rng, false);
        if !support_lemma_probe(&a, &b) {
            return Err(format!("counterexample at pair {i}: {a:?} {b:?}"));
        }
        if scalar {
            scalars += 1;
            if a.mul_free(&b).support() != b.support() {
                return Err(format!("scalar multiple changed the support at pair {i}"));
            }
        }
    }
    Ok(format!("10000 pairs ({scalars} scalar), no counterexample"))
}

fn det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for c in 0..n {
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != c)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let term = BigInt::from(m[0][c]) * det(&minor);
        if c % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
        .collect()
}

/// gcd of all k×k minors, k = 1..=n.
fn minor_gcds(m: &[Vec<i64>]) -> Vec<BigInt> {
    let n = m.len();
    (1..=n)
        .map(|k| {
            let mut g = BigInt::zero();
            for rows in subsets(n, k) {
                for cols in subsets(n, k) {
                    let sub: Vec<Vec<i64>> = rows
                        .iter()
                        .map(|&r| cols.iter().map(|&c| m[r][c]).collect())
                        .collect();
                    g = g.gcd(&det(&sub));
                }
            }
            g
        })
        .collect()
}

fn a8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..200 {
        let m: Vec<Vec<i64>> = (0..4)
            .map(|_| (0..4).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let factors = smith_normal_form(&IntMatrix::from_rows(&m));
        let mut prod = BigInt::one();
        for (k, g) in minor_gcds(&m).into_iter().enumerate() {
            prod *= &factors[k];
            if prod != g {
                return Err(format!("matrix {i} {m:?}: factors {factors:?}"));
            }
        }
    }
    Ok("200 matrices, zero mismatches".into())
}

fn a9() -> Check {
    let abt = alpha("abt");
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut complete, mut skipped) = (0, 0);
    for _ in 0..500 {
        let r = loop {
            let len = rng.gen_range(1..=8);
            let r = random_word(&mut rng, 3, len);
            if r.is_cyclically_reduced() && r.mentions(2) {
                break r;
            }
        };
        let len = rng.gen_range(1..=8);
        let u = random_word(&mut rng, 2, len);
        let solver = match build_solver(&Presentation::new(abt.clone(), r.clone()), budget()) {
            Ok(s) => s,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        match solver.is_trivial(&u) {
            Ok(false) => complete += 1,
            Ok(true) => {
                return Err(format!(
                    "{} trivial modulo {}",
                    text(&u, &abt),
                    text(&r, &abt)
                ));
            }
            Err(_) => skipped += 1,
        }
    }
    Ok(format!(
        "{complete} budget-complete pairs nontrivial, {skipped} inconclusive"
    ))
}

/// Verdict kind, k and witness length; stable under renaming.
fn fingerprint(v: &Verdict) -> (u8, i64, usize) {
    match v {
        Verdict::ResiduallyQSolvable(w) => (0, w.k, w.r.len()),
        Verdict::NotResiduallyQSolvable(w) => (1, w.k, w.r.len()),
        Verdict::Inconclusive { .. } => (2, 0, 0),
    }
}

fn witness_class(v: &Verdict) -> Option<ReducedWord> {
    match v {
        Verdict::ResiduallyQSolvable(w) | Verdict::NotResiduallyQSolvable(w) => {
            Some(w.r.canonical_class_rep())
        }
        Verdict::Inconclusive { .. } => None,
    }
}

fn a10() -> Check {
    let ab = alpha("ab");
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let swap = [1usize, 0];
    let mut seen = BTreeSet::new();
    for _ in 0..100 {
        let len = rng.gen_range(1..=6);
        let w = random_word(&mut rng, 2, len);
        seen.insert(w.clone());
        let base = decide(&w, &ab, budget()).map_err(|e| e.to_string())?;
        let class = witness_class(&base.verdict);
        let core = w.cyclic_core();
        let mut variants = vec![("inverse", w.inverse(), class.clone())];
        for i in 1..core.len() {
            variants.push(("rotation", core.rotate(i), class.clone()));
        }
        variants.push((
            "permutation",
            w.relabel(&swap),
            class
                .as_ref()
                .map(|c| c.relabel(&swap).canonical_class_rep()),
        ));
        for (kind, v, expected_class) in variants {
            let d = decide(&v, &ab, budget()).map_err(|e| e.to_string())?;
            if fingerprint(&d.verdict) != fingerprint(&base.verdict)
                || witness_class(&d.verdict) != expected_class
            {
                return Err(format!(
                    "{kind} of {} changes the verdict: {:?} vs {:?}",
                    text(&w, &ab),
                    base.verdict,
                    d.verdict
                ));
            }
        }
    }
    Ok(format!(
        "100 words ({} distinct), all invariant",
        seen.len()
    ))
}
