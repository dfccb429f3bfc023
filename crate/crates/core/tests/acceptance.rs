//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use morass_core::balg::{
    self, dichotomy_check, generator_nonzero, is_c_algebra, nice_property, norm_with, scenario_bounds, Backend, Budget,
    Dichotomy, Presentation, SimpleFunction,
};
use morass_core::cohen::{demanded_bit, density_check, pigeonhole_guess, CohenCondition, Decision};
use morass_core::lmodel::{check_theory, construct, embed_check, plan_stages, Construction, Variant};
use morass_core::morass::{build_prefix, SplitRule};
use morass_core::plam::{
    color_compat, compatible, compatible_brute, directed_close, limit_algebra, parallel_close, split_extensions,
    stronger, PCondition,
};
use morass_core::Rational;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P1_LIMIT: Duration = Duration::from_secs(5);
const P2_LIMIT: Duration = Duration::from_secs(30);
const P3_LIMIT: Duration = Duration::from_secs(60);
const P5_LIMIT: Duration = Duration::from_secs(60);
const P7_LIMIT: Duration = Duration::from_secs(120);
/// Exact criteria: rational equality and integer bounds, no slack.
const NORM_TOLERANCE: i64 = 0;
const FRESH_TOLERANCE: usize = 0;

const BIT_STREAMS: [&str; 3] = ["00000", "11111", "10110"];

type Outcome = Result<String, String>;
type Oracle = fn(usize) -> Rational;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn p1() -> Outcome {
    let n = 8;
    let p = build_prefix(n, &SplitRule::Zero).map_err(|e| e.to_string())?;
    let report = p.verify_axioms();
    ensure(report.passed(), || {
        format!("{:?}", report.exact.failures().collect::<Vec<_>>())
    })?;
    let mut triples = 0;
    for gamma in 0..=n {
        for beta in 0..=gamma {
            let upper = p.covered(beta, gamma).map_err(|e| e.to_string())?;
            for alpha in 0..=beta {
                triples += 1;
                let lower = p.covered(alpha, gamma).map_err(|e| e.to_string())?;
                ensure(lower.is_subset(&upper), || {
                    format!("coverage not monotone at {alpha} ≤ {beta} ≤ {gamma}")
                })?;
            }
            let fresh = p.fresh_points(beta, gamma).map_err(|e| e.to_string())?;
            ensure(fresh.len() + FRESH_TOLERANCE >= gamma - beta, || {
                format!("|fresh({beta},{gamma})| = {} < {}", fresh.len(), gamma - beta)
            })?;
        }
    }
    for alpha in 0..n {
        let covered = p.covered(alpha, alpha + 1).map_err(|e| e.to_string())?;
        ensure(!covered.contains(&p.theta(alpha)), || format!("θ_{alpha} is covered"))?;
    }
    Ok(format!("N = {n}, {triples} triples α ≤ β ≤ γ"))
}

fn check_run(c: &Construction, variant: Variant) -> Result<usize, String> {
    let mut maps = 0;
    for (alpha, m) in c.models.iter().enumerate() {
        let v = check_theory(m, variant);
        ensure(v.is_empty(), || {
            format!("level {alpha}: {} {:?}", v[0].clause, v[0].witness)
        })?;
    }
    for alpha in 0..c.prefix.top() {
        for f in c.prefix.maps_between(alpha, alpha + 1).map_err(|e| e.to_string())? {
            maps += 1;
            ensure(embed_check(&c.models[alpha], &c.models[alpha + 1], &f), || {
                format!("{} from level {alpha} is not an embedding", f.word_string())
            })?;
        }
    }
    for (n, fresh) in c.plan.fresh.iter().enumerate() {
        let p = Presentation::from_model(&c.models[c.plan.alpha[n + 1]]);
        let case = Dichotomy::from_bit(c.bits[n]);
        ensure(dichotomy_check(&p, fresh, case), || {
            format!("stage {n}: {fresh:?} is not a {case:?}")
        })?;
    }
    Ok(maps)
}

fn run(rule: &SplitRule, variant: Variant, stream: &str) -> Result<Construction, String> {
    let stages = stream.len();
    let needed = morass_core::lmodel::minimal_alpha(stages, variant)[stages];
    let prefix = build_prefix(needed.max(8), rule).map_err(|e| e.to_string())?;
    let plan = plan_stages(&prefix, stages, variant).map_err(|e| e.to_string())?;
    construct(&prefix, &plan, &bits(stream)).map_err(|e| format!("{stream}: {e}"))
}

fn p2() -> Outcome {
    let mut maps = 0;
    let mut top = 0;
    for stream in BIT_STREAMS {
        let c = run(&SplitRule::Zero, Variant::Plain, stream)?;
        maps += check_run(&c, Variant::Plain).map_err(|e| format!("{stream}: {e}"))?;
        top = c.prefix.top();
    }
    Ok(format!("N = {top}, 3 streams, {maps} one-step embeddings"))
}

fn p3() -> Outcome {
    let mut families = 0;
    for stream in BIT_STREAMS {
        let c = run(&SplitRule::Top, Variant::C, stream)?;
        check_run(&c, Variant::C).map_err(|e| format!("{stream}: {e}"))?;
        for (alpha, m) in c.models.iter().enumerate() {
            let p = Presentation::from_model(m);
            let zero = balg::zero_generators(&p);
            ensure(zero.is_empty(), || {
                format!("{stream}: [{}] = 0 at level {alpha}", zero[0])
            })?;
        }
        let top = Presentation::from_model(c.top_model());
        let report = is_c_algebra(&top, 4);
        ensure(report.passed(), || {
            format!("{stream}: {:?}", report.checks.failures().collect::<Vec<_>>())
        })?;
        families += report.families_checked;
        for (n, a_n) in c.plan.fresh.iter().enumerate() {
            let p = Presentation::from_model(&c.models[c.plan.alpha[n + 1]]);
            for size in 1..=a_n.len().min(4) {
                let f = &a_n[..size];
                let w = nice_property(&p, f).ok_or_else(|| format!("{stream}: ⋁{f:?} = 1"))?;
                ensure(f.iter().all(|&g| !w.assignment.get(g)), || {
                    format!("{stream}: witness for {f:?} meets F")
                })?;
                ensure(f.iter().all(|&g| generator_nonzero(&p, g)), || {
                    format!("{stream}: zero generator in {f:?}")
                })?;
            }
        }
    }
    Ok(format!("3 streams, {families} families with |F| ≤ 4"))
}

fn random_presentation(rng: &mut ChaCha8Rng, max_gens: usize) -> Presentation {
    let n = rng.gen_range(1..=max_gens);
    let mut p = Presentation::free(n);
    for _ in 0..rng.gen_range(0..=2 * n) {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if rng.gen_bool(0.5) {
            if x != y {
                p.add_leq(x, y);
            }
        } else if x != y || rng.gen_bool(0.1) {
            p.add_dis(x, y);
        }
    }
    p
}

fn random_function(rng: &mut ChaCha8Rng, gens: usize) -> SimpleFunction {
    let terms = (0..rng.gen_range(0..=gens + 2))
        .map(|_| {
            let c = Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=6).into());
            (c, rng.gen_range(0..gens))
        })
        .collect();
    SimpleFunction::new(terms)
}

fn p4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let budget = Budget::default();
    for case in 0..200 {
        let p = random_presentation(&mut rng, 12);
        let f = random_function(&mut rng, p.gens());
        let e = norm_with(&p, &f, Backend::Enumeration, &budget).map_err(|e| e.to_string())?;
        let g = norm_with(&p, &f, Backend::Propagation, &budget).map_err(|e| e.to_string())?;
        ensure((&e - &g).abs() <= q(NORM_TOLERANCE), || {
            format!("case {case}: {e} vs {g} for {f}")
        })?;
    }
    for k in 0..=9usize {
        let gens: Vec<usize> = (0..=k).collect();
        let chain = Presentation::new(k + 1, gens.windows(2).map(|w| (w[0], w[1])).collect(), vec![]);
        let mut anti = Presentation::free(k + 1);
        for x in 0..=k {
            for y in x + 1..=k {
                anti.add_dis(x, y);
            }
        }
        let f = SimpleFunction::indicator_sum(&gens);
        for backend in [Backend::Enumeration, Backend::Propagation] {
            let c = norm_with(&chain, &f, backend, &budget).map_err(|e| e.to_string())?;
            let a = norm_with(&anti, &f, backend, &budget).map_err(|e| e.to_string())?;
            ensure(c == q(k as i64 + 1) && a == q(1), || {
                format!("k = {k}: chain {c}, antichain {a}")
            })?;
        }
    }
    Ok("200 random presentations agree; chain k+1 and antichain 1 for k ≤ 9 (k = 4, 9 are n*² for n* = 2, 3)".into())
}

fn p5() -> Outcome {
    let n_star = 3u64;
    let oracles: [(&str, Oracle); 3] = [
        ("≡ 0", |_| q(0)),
        ("≡ n*−1", |_| q(2)),
        ("parity", |n| if n % 2 == 0 { q(0) } else { q(100) }),
    ];
    let mut cases = 0;
    for (name, oracle) in oracles {
        for code in 0..3usize.pow(10) {
            let mut p = CohenCondition::new();
            let mut c = code;
            for n in 0..10 {
                match c % 3 {
                    1 => p = p.with(n, false),
                    2 => p = p.with(n, true),
                    _ => {}
                }
                c /= 3;
            }
            let d = density_check(&p, n_star, oracle);
            cases += 1;
            let ok = p.extended_by(&d.q)
                && d.witness >= 9
                && d.q.get(d.witness) == Some(demanded_bit(n_star, &oracle(d.witness)))
                && (d.q.get(d.witness) == Some(false)) == (oracle(d.witness) < q(n_star as i64 - 1));
            ensure(ok, || format!("oracle {name}, p = {p}: q = {}", d.q))?;
            let extra = d.q.domain().count() - p.domain().count();
            ensure(extra == usize::from(!d.reused), || {
                format!("oracle {name}, p = {p}: q is not minimal")
            })?;
        }
    }
    Ok(format!("{cases} conditions × oracles"))
}

fn p6() -> Outcome {
    let universe: Vec<CohenCondition> = (0..64u32)
        .map(|m| CohenCondition::from_pairs((0..6).map(|i| (i, m >> i & 1 == 1))))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut smallest = usize::MAX;
    for trial in 0..100 {
        let decisions: Vec<Decision> = (0..10_000)
            .map(|index| Decision {
                index,
                condition: universe.choose(&mut rng).expect("nonempty").clone(),
                value: rng.gen_range(0..1000),
            })
            .collect();
        let g = pigeonhole_guess(&decisions, &universe).map_err(|e| e.to_string())?;
        ensure(g.indices.len() >= 157, || {
            format!("trial {trial}: |A| = {}", g.indices.len())
        })?;
        for d in &decisions {
            if d.condition == g.condition {
                ensure(g.values.get(&d.index) == Some(&d.value), || {
                    format!("trial {trial}: j({}) differs", d.index)
                })?;
            }
        }
        smallest = smallest.min(g.indices.len());
    }
    Ok(format!("100 trials, smallest |A| = {smallest} ≥ 157"))
}

fn random_condition(rng: &mut ChaCha8Rng, w: &[usize]) -> PCondition {
    let mut p = PCondition::free(w.iter().copied());
    for _ in 0..rng.gen_range(0..=w.len()) {
        let (a, b) = (*w.choose(rng).expect("nonempty"), *w.choose(rng).expect("nonempty"));
        if a == b {
            continue;
        }
        if rng.gen_bool(0.5) {
            p.add_leq(a, b).expect("in w");
        } else {
            p.add_dis(a, b).expect("in w");
        }
    }
    p
}

/// Same relation pattern on a shared initial root and disjoint tails.
fn color_pair(rng: &mut ChaCha8Rng) -> (PCondition, PCondition) {
    let root = rng.gen_range(0..=2usize);
    let tail = rng.gen_range(1..=3usize);
    let w_p: Vec<usize> = (0..root + tail).collect();
    let w_q: Vec<usize> = (0..root).chain(root + tail..root + 2 * tail).collect();
    let p = random_condition(rng, &w_p);
    let mut q = PCondition::free(w_q.iter().copied());
    for &(a, b) in p.leq_pairs() {
        q.add_leq(w_q[a], w_q[b]).expect("in w");
    }
    for &(a, b) in p.dis_pairs() {
        q.add_dis(w_q[a], w_q[b]).expect("in w");
    }
    (p, q)
}

/// `p` plus a new index that can always be 0.
fn grow(rng: &mut ChaCha8Rng, p: &PCondition, a: usize) -> PCondition {
    let mut next = p.clone();
    next.add_index(a);
    let old: Vec<usize> = p.w().iter().copied().collect();
    for &x in &old {
        match rng.gen_range(0..4) {
            0 => next.add_leq(a, x).expect("in w"),
            1 => next.add_dis(a, x).expect("in w"),
            _ => {}
        }
    }
    next
}

fn p7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, mut compat, mut colored) = (0, 0, 0);
    for i in 0..500 {
        let (p, q) = if i % 5 == 0 {
            color_pair(&mut rng)
        } else {
            let pool: Vec<usize> = (0..8).collect();
            let u = rng.gen_range(2..=8);
            let chosen: Vec<usize> = pool.choose_multiple(&mut rng, u).copied().collect();
            let mut w_p: Vec<usize> = chosen.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
            let mut w_q: Vec<usize> = chosen
                .iter()
                .copied()
                .filter(|x| !w_p.contains(x) || rng.gen_bool(0.5))
                .collect();
            w_p.sort_unstable();
            w_q.sort_unstable();
            (random_condition(&mut rng, &w_p), random_condition(&mut rng, &w_q))
        };
        let fast = compatible(&p, &q).map_err(|e| e.to_string())?;
        ensure(fast.is_some() == compatible_brute(&p, &q), || {
            format!("pair {i}: compatible disagrees with brute force")
        })?;
        agree += 1;
        compat += usize::from(fast.is_some());
        if color_compat(&p, &q) {
            colored += 1;
            ensure(fast.is_some(), || {
                format!("pair {i}: color-compatible but incompatible")
            })?;
        }
    }

    for trial in 0..20 {
        let len = rng.gen_range(1..=6);
        let base = random_condition(&mut rng, &[0, 1]);
        let (mut ps, mut qs) = (vec![base.clone()], vec![base]);
        for s in 1..len {
            ps.push(grow(&mut rng, &ps[s - 1], 10 + s));
            qs.push(grow(&mut rng, &qs[s - 1], 20 + s));
        }
        let bound = parallel_close(&ps, &qs).map_err(|e| format!("trial {trial}: {e}"))?;
        let family: Vec<PCondition> = ps.iter().chain(&qs).take(6).cloned().collect();
        let dbound = directed_close(&family).map_err(|e| format!("trial {trial}: {e}"))?;
        for c in ps.iter().chain(&qs) {
            ensure(stronger(c, &bound).map_err(|e| e.to_string())?, || {
                format!("trial {trial}: parallel bound too weak")
            })?;
        }
        for c in &family {
            ensure(stronger(c, &dbound).map_err(|e| e.to_string())?, || {
                format!("trial {trial}: directed bound too weak")
            })?;
        }
    }

    let mut norms = Vec::new();
    for n_star in [2usize, 3] {
        let k = n_star * n_star;
        let fresh: Vec<usize> = (0..=k).map(|i| 10 * i).collect();
        let base: Vec<PCondition> = fresh
            .iter()
            .map(|&a| {
                let mut c = PCondition::free([a, a + 1, a + 2]);
                c.add_leq(a + 1, a).expect("in w");
                c.add_dis(a, a + 2).expect("in w");
                c
            })
            .collect();
        let s = split_extensions(&base, &fresh).map_err(|e| e.to_string())?;
        ensure(s.chain_norm == q(k as i64 + 1) && s.antichain_norm == q(1), || {
            format!("n* = {n_star}: norms ({}, {})", s.chain_norm, s.antichain_norm)
        })?;
        norms.push(format!("({}, {})", s.chain_norm, s.antichain_norm));
    }

    let mut target = PCondition::free(0..5);
    target.add_dis(1, 3).expect("in w");
    target.add_leq(0, 2).expect("in w");
    target.add_leq(2, 4).expect("in w");
    let system = restrictions(&target);
    let limit = limit_algebra(&system).map_err(|e| e.to_string())?;
    for (f, p) in &system {
        ensure(stronger(p, &limit.condition).map_err(|e| e.to_string())?, || {
            format!("limit not above p_{f:?}")
        })?;
    }
    Ok(format!(
        "{agree} pairs ({compat} compatible, {colored} color-compatible); 20 closure trials; split norms {}; limit above all {} p_F",
        norms.join(" "),
        system.len()
    ))
}

/// `F ↦` the subalgebra of `target` generated by `F`, presented by the
/// relations `target` implies between members of `F`.
fn restrictions(target: &PCondition) -> BTreeMap<BTreeSet<usize>, PCondition> {
    let pres = target.presentation();
    let mut s = balg::Solver::new(&pres);
    let w: Vec<usize> = target.w().iter().copied().collect();
    let mut out = BTreeMap::new();
    for mask in 0u32..1 << w.len() {
        let f: Vec<usize> = (0..w.len()).filter(|i| mask >> i & 1 == 1).collect();
        let mut p = PCondition::free(f.iter().map(|&i| w[i]));
        for &x in &f {
            for &y in &f {
                if x != y && !s.consistent(&[(x, true), (y, false)]) {
                    p.add_leq(w[x], w[y]).expect("in w");
                }
                if x <= y && !s.consistent(&[(x, true), (y, true)]) {
                    p.add_dis(w[x], w[y]).expect("in w");
                }
            }
        }
        out.insert(p.w().clone(), p);
    }
    out
}

fn p8() -> Outcome {
    let mut cases = 0;
    for n_star in 3..=6u64 {
        for c in 1..n_star {
            let r = scenario_bounds(n_star, &q(c as i64)).map_err(|e| e.to_string())?;
            ensure(r.checks.passed(), || {
                format!("n* = {n_star}, c = {c}: {:?}", r.checks.failures().collect::<Vec<_>>())
            })?;
            cases += 1;
        }
    }
    let r = scenario_bounds(3, &q(2)).map_err(|e| e.to_string())?;
    ensure(r.epsilon_max == Rational::new(4.into(), 19.into()), || {
        format!("ε_max(3, 2) = {}", r.epsilon_max)
    })?;
    Ok(format!("{cases} (n*, c) pairs, ε_max(3, 2) = 4/19"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("P1 morass prefix axioms", p1, Some(P1_LIMIT)),
        ("P2 plain construction", p2, Some(P2_LIMIT)),
        ("P3 c-variant construction", p3, Some(P3_LIMIT)),
        ("P4 norm backends agree", p4, None),
        ("P5 Cohen density", p5, Some(P5_LIMIT)),
        ("P6 pigeonhole guess", p6, None),
        ("P7 poset of presented algebras", p7, Some(P7_LIMIT)),
        ("P8 scenario arithmetic", p8, None),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {name} [{elapsed:.2?}]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} [{elapsed:.2?}]: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
