//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exsh::beta::BetaSystem;
use exsh::conformal::ConformalMeasure;
use exsh::ephemeral::{decode, encode, golden_p, nu_bar_cylinder};
use exsh::markov::{MarkovMeasure, RandomWalk};
use exsh::relations::{tail_equivalent, EpPoint};
use exsh::tms::{AlphaCocycle, Aperiodicity, Tms};
use exsh::{Error, ExactScalar, Symbol, Word};

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(s: &str) -> ExactScalar {
    s.parse().unwrap()
}

fn golden() -> Arc<BetaSystem> {
    Arc::new(BetaSystem::parse("golden").unwrap())
}

fn pes() -> Tms {
    Tms::new(vec![vec![1, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]).unwrap()
}

fn all_words(alphabet: &[Symbol], n: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |&a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

/// Parry's criterion, read directly: every suffix is lexicographically at
/// most the prefix of ω of the same length.
fn parry_admissible(b: &BetaSystem, w: &[Symbol]) -> bool {
    let omega = b.omega_prefix(w.len()).unwrap();
    (0..w.len()).all(|i| w[i..] <= omega[..w.len() - i])
}

fn value(beta_inv: &ExactScalar, w: &[Symbol]) -> ExactScalar {
    let mut v = ExactScalar::zero();
    let mut scale = ExactScalar::one();
    for &d in w {
        scale = &scale * beta_inv;
        v = v + &scale * &ExactScalar::from_int(d as i64);
    }
    v
}

fn golden_lambda() -> Check {
    let start = Instant::now();
    let m = ConformalMeasure::solve(golden(), &[0, 1], &[q("1"), q("1")], 64, &q("1e-9")).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let target = q("1/2") * (ExactScalar::quadratic(0, 1, 5, 1).unwrap() - q("1"));
    let (lo, hi) = (m.lambda_lo(), m.lambda_hi());
    ensure(lo <= &target && &target <= hi, || {
        format!("[{lo}, {hi}] misses (√5-1)/2")
    })?;
    ensure(hi - lo < q("1e-9"), || format!("width {}", hi - lo))?;
    ensure(m.n_trunc() <= 64, || format!("n_trunc {}", m.n_trunc()))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))
}

fn rational_lambda() -> Check {
    let m =
        ConformalMeasure::solve(golden(), &[0, 1], &[q("1"), q("2")], 64, &q("1e-13")).map_err(|e| e.to_string())?;
    let (lo, hi) = (m.lambda_lo().clone(), m.lambda_hi().clone());
    ensure(lo <= q("1/2") && q("1/2") <= hi, || format!("[{lo}, {hi}] misses 1/2"))?;
    ensure(&hi - &lo < q("1e-12"), || format!("width {}", &hi - &lo))?;
    let cubic = |x: &ExactScalar| q("2") * x.pow(3) + x.pow(2) + x.clone() - q("1");
    ensure(cubic(&q("1/2")).is_zero(), || "1/2 is not a root of the cubic".into())?;
    ensure(
        cubic(&lo) <= ExactScalar::zero() && cubic(&hi) >= ExactScalar::zero(),
        || "bracket does not straddle the cubic root".into(),
    )
}

fn lebesgue_cells() -> Check {
    let b = golden();
    let m =
        ConformalMeasure::solve(b.clone(), &[0, 1], &[q("1"), q("1")], 64, &q("1e-12")).map_err(|e| e.to_string())?;
    let beta_inv = ExactScalar::quadratic(-1, 1, 5, 2).unwrap();
    let slack = q("1e-9");
    let mut checked = 0;
    for n in 1..=10 {
        let cells: Vec<Vec<Symbol>> = all_words(&[0, 1], n)
            .into_iter()
            .filter(|w| parry_admissible(&b, w))
            .collect();
        for (i, w) in cells.iter().enumerate() {
            if !b.is_factorizable(w).map_err(|e| e.to_string())? {
                continue;
            }
            let right = match cells.get(i + 1) {
                Some(next) => value(&beta_inv, next),
                None => ExactScalar::one(),
            };
            let oracle = right - value(&beta_inv, w);
            let mv = m.cylinder_measure(w, None).map_err(|e| e.to_string())?;
            let lo = &mv.lo - &slack;
            let hi = &mv.hi + &slack;
            ensure(lo <= oracle && oracle <= hi, || {
                format!("{w:?}: [{}, {}] vs {oracle}", mv.lo, mv.hi)
            })?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no factorizable words".into())
}

fn fibonacci_census() -> Check {
    let b = golden();
    let expected = [2u32, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377];
    for (i, &e) in expected.iter().enumerate() {
        let n = i + 1;
        let c = b.count_admissible(n).map_err(|e| e.to_string())?;
        ensure(c == e.into(), || format!("length {n}: {c}"))?;
        let listed = b.enumerate_admissible(n, None).map_err(|e| e.to_string())?.len();
        ensure(listed == e as usize, || format!("length {n}: listed {listed}"))?;
    }
    Ok(())
}

fn singleton_detection() -> Check {
    let b = Arc::new(BetaSystem::parse("quad:1,-3,1").map_err(|e| e.to_string())?);
    match ConformalMeasure::solve(b.clone(), &[1, 2], &[q("1"), q("1")], 64, &q("1e-9")) {
        Err(Error::SingletonSystem) => {}
        Err(e) => return Err(format!("wrong error {e}")),
        Ok(_) => return Err("solve succeeded".into()),
    }
    let mut found = Vec::new();
    for w in all_words(&[1, 2], 12) {
        if b.is_admissible_strict(&w).map_err(|e| e.to_string())? {
            found.push(w);
        }
    }
    ensure(found == vec![vec![1; 12]], || format!("admissible: {found:?}"))
}

fn successor_sets() -> Check {
    for spec in ["golden", "dec:1.8@192"] {
        let b = BetaSystem::parse(spec).map_err(|e| e.to_string())?;
        let omega = b.omega_prefix(8).map_err(|e| e.to_string())?;
        for n in 0..=6 {
            for w in all_words(&b.alphabet(), n) {
                if !parry_admissible(&b, &w) {
                    continue;
                }
                let k = b.fullness(&w).map_err(|e| e.to_string())?.k;
                let formula: Vec<Symbol> = b.alphabet().into_iter().filter(|&a| a <= omega[k]).collect();
                let brute: Vec<Symbol> = b
                    .alphabet()
                    .into_iter()
                    .filter(|&a| parry_admissible(&b, &[w.as_slice(), &[a]].concat()))
                    .collect();
                ensure(formula == brute, || format!("{spec} {w:?}: {formula:?} vs {brute:?}"))?;
                let lib: Vec<Symbol> = b
                    .alphabet()
                    .into_iter()
                    .filter(|&a| b.is_admissible(&[w.as_slice(), &[a]].concat()).unwrap())
                    .collect();
                ensure(lib == brute, || format!("{spec} {w:?}: library {lib:?}"))?;
            }
        }
    }
    Ok(())
}

fn pes_construction() -> Check {
    let pi = vec![q("1"), q("1"), q("1")];
    let m = MarkovMeasure::from_initial(pes(), pi.clone()).map_err(|e| e.to_string())?;
    for (s, row) in m.transition().iter().enumerate() {
        ensure(row.iter().all(ExactScalar::is_exact), || format!("row {s} not exact"))?;
        let sum: ExactScalar = row.iter().cloned().sum();
        ensure(sum == ExactScalar::one(), || format!("row {s} sums to {sum}"))?;
        let mu = m.cylinder_measure(&[s as Symbol]).map_err(|e| e.to_string())?;
        ensure(mu == pi[s], || format!("μ([{s}]) = {mu}"))?;
    }
    ensure(m.transition()[0] == vec![q("1/2"), q("1/2"), q("0")], || {
        "Pe-S first row".into()
    })
}

fn random_mixing(rng: &mut ChaCha8Rng, n: usize) -> Tms {
    loop {
        let rows = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_bool(0.6) as u8).collect())
            .collect();
        if let Ok(t) = Tms::new(rows) {
            if t.is_mixing() {
                return t;
            }
        }
    }
}

fn exchangeability() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut systems: Vec<Tms> = Vec::new();
    for mask in 0u32..16 {
        let rows = (0..2)
            .map(|i| (0..2).map(|j| ((mask >> (2 * i + j)) & 1) as u8).collect())
            .collect();
        if let Ok(t) = Tms::new(rows) {
            if t.is_mixing() {
                systems.push(t);
            }
        }
    }
    systems.push(pes());
    for n in 3..=5 {
        for _ in 0..6 {
            systems.push(random_mixing(&mut rng, n));
        }
    }
    for t in systems {
        let pi: Vec<ExactScalar> = (0..t.n_states())
            .map(|_| ExactScalar::from_int(rng.gen_range(1..10)))
            .collect();
        let m = MarkovMeasure::from_initial(t.clone(), pi).map_err(|e| e.to_string())?;
        let r = m.verify_exchangeability(8, &ExactScalar::zero());
        ensure(r.violations.is_empty(), || {
            format!("{} violations on {:?}", r.violations.len(), t.to_file())
        })?;
    }
    let p = vec![vec![q("3/10"), q("7/10")], vec![q("9/10"), q("1/10")]];
    let m = MarkovMeasure::from_parts(Tms::full(2), vec![q("1/2"), q("1/2")], p).map_err(|e| e.to_string())?;
    let r = m.verify_exchangeability(8, &ExactScalar::zero());
    let hit = r
        .violations
        .iter()
        .find(|v| v.w == Word::from([0, 1, 1, 0]) && v.w_prime == Word::from([1, 1, 0, 0]))
        .ok_or("planted pair not reported")?;
    ensure(hit.value == q("63/2000") && hit.value_prime == q("27/2000"), || {
        format!("values {} vs {}", hit.value, hit.value_prime)
    })
}

fn random_walk_invariance() -> Check {
    let rw = RandomWalk::new(q("1/2"), 50).map_err(|e| e.to_string())?;
    for t in -48i64..=48 {
        let pushed = rw.pushed_weight(t).map_err(|e| e.to_string())?;
        let c = rw.invariant_weight(t);
        ensure(pushed == c, || format!("t = {t}: {pushed} vs {c}"))?;
    }
    // Beyond the window the weights are geometric; the full series sums to 26/21.
    let window: ExactScalar = (-50i64..=50).map(|t| rw.invariant_weight(t)).sum();
    let tail = q("2") * rw.invariant_weight(51) / (q("1") - q("1/4"));
    ensure(window + tail == q("26/21"), || "total mass differs from 26/21".into())
}

fn lattices() -> Check {
    let timed = |t: &Tms, max_len: usize| -> std::result::Result<Aperiodicity, String> {
        let start = Instant::now();
        let phi = AlphaCocycle::counting(t.n_states(), 0).map_err(|e| e.to_string())?;
        let a = t.is_aperiodic(&phi, max_len).map_err(|e| e.to_string())?;
        ensure(start.elapsed() < Duration::from_secs(5), || {
            format!("took {:?}", start.elapsed())
        })?;
        Ok(a)
    };
    let full = timed(&Tms::full(2), 2)?;
    ensure(full == Aperiodicity::Full, || format!("full shift: {full:?}"))?;
    let p = timed(&pes(), 6)?;
    ensure(p == Aperiodicity::ProperAt(6), || format!("Pe-S: {p:?}"))?;
    let phi = AlphaCocycle::counting(3, 0).unwrap();
    let lat = pes().cocycle_lattice(&phi, 6).map_err(|e| e.to_string())?;
    ensure(lat.basis().iter().all(|v| v[0] == v[1]), || format!("basis {lat}"))?;
    let g = timed(&Tms::new(vec![vec![1, 1], vec![1, 0]]).unwrap(), 6)?;
    ensure(g == Aperiodicity::Full, || format!("golden mean: {g:?}"))
}

fn ephemeral_code() -> Check {
    for u in all_words(&[1, 2], 10) {
        let w = decode(&u).map_err(|e| e.to_string())?;
        let back = encode(&w).map_err(|e| e.to_string())?;
        ensure(back == (u.clone(), vec![]), || format!("{u:?} -> {back:?}"))?;
    }
    for n in 0..=10 {
        let total: ExactScalar = all_words(&[1, 2], n).iter().map(|u| nu_bar_cylinder(u).unwrap()).sum();
        ensure(total == ExactScalar::one(), || format!("length {n} sums to {total}"))?;
    }
    let p2 = golden_p().pow(2);
    ensure(
        nu_bar_cylinder(&[1, 1]).unwrap() == p2 && nu_bar_cylinder(&[2]).unwrap() == p2,
        || "μ([1,1]) or μ([2]) differs from p²".into(),
    )
}

fn golden_word(rng: &mut ChaCha8Rng, lens: std::ops::Range<usize>) -> Vec<Symbol> {
    let len = rng.gen_range(lens);
    let mut w = Vec::with_capacity(len);
    for _ in 0..len {
        let prev_one = w.last() == Some(&1);
        w.push(if prev_one { 0 } else { rng.gen_range(0..2) });
    }
    w
}

fn golden_point(rng: &mut ChaCha8Rng, b: &BetaSystem) -> EpPoint {
    loop {
        let pre = golden_word(rng, 0..5);
        let per = golden_word(rng, 1..5);
        let Ok(x) = EpPoint::new(pre, per) else { continue };
        if b.point_is_admissible(&x).unwrap_or(false) && !b.in_gamma(&x) {
            return x;
        }
    }
}

fn jump_relation() -> Check {
    let b = golden();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut related = 0;
    for i in 0..200 {
        let x = golden_point(&mut rng, &b);
        let y = if i % 2 == 0 {
            // Same tail behind a different admissible head.
            loop {
                let head = golden_word(&mut rng, 1..6);
                let cut = rng.gen_range(0..4);
                let t = x.shift(cut);
                let Ok(y) = EpPoint::new([head.as_slice(), &[0], t.preperiod()].concat(), t.period().clone()) else {
                    continue;
                };
                if b.point_is_admissible(&y).unwrap_or(false) && !b.in_gamma(&y) {
                    break y;
                }
            }
        } else {
            golden_point(&mut rng, &b)
        };
        let tail = tail_equivalent(&x, &y, x.completeness_bound(&y)).is_related();
        let bound = b.jump_search_bound(&x, &y).map_err(|e| e.to_string())?;
        let jump = b
            .jump_grand_tail(&x, &y, bound, false)
            .map_err(|e| e.to_string())?
            .is_some();
        ensure(tail == jump, || format!("{x} vs {y}: tail {tail}, jump {jump}"))?;
        related += tail as usize;
    }
    ensure(related > 0, || "no related pairs sampled".into())
}

fn structural() -> Check {
    let start = Instant::now();
    let t = pes();
    let (mixing, onto) = (t.is_mixing(), t.is_almost_onto());
    let flip = Tms::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
    let period = flip.periodic_decomposition().map_err(|e| e.to_string())?.period;
    let elapsed = start.elapsed();
    ensure(mixing && !onto, || format!("mixing {mixing}, almost onto {onto}"))?;
    ensure(period == 2, || format!("period {period}"))?;
    ensure(elapsed < Duration::from_millis(10), || format!("took {elapsed:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 13] = [
        ("golden conformal eigenvalue", golden_lambda),
        ("rational conformal eigenvalue", rational_lambda),
        ("Lebesgue cylinder oracle", lebesgue_cells),
        ("Fibonacci census", fibonacci_census),
        ("singleton detection", singleton_detection),
        ("successor sets", successor_sets),
        ("Pe-S construction", pes_construction),
        ("Markov exchangeability", exchangeability),
        ("random walk invariance", random_walk_invariance),
        ("cocycle lattices", lattices),
        ("ephemeral code", ephemeral_code),
        ("jump relation", jump_relation),
        ("structural verdicts", structural),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("PASS {:>2} {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
