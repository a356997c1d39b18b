//! Acceptance run: one line per criterion with its timing and limit. Exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use nearzero::bits::Bits;
use nearzero::dynamics::{metric_d, shift, Configuration};
use nearzero::harness::{compute_partition_regression, run_suite, RegressionOutcome, SuiteConfig, SuiteReport, SuiteTag};
use nearzero::rng::Rng;
use nearzero::sets::{finite_sums, materialize, FSSeed, SetSpec};
use nearzero::{Rat, WindowGrid};

/// Pinned partition regression values: `(r, m, L_max)` and the outcome.
const PINNED_2_2_4: RegressionOutcome = RegressionOutcome::NotFound { l_max: 4 };
const PINNED_2_2_6: RegressionOutcome = RegressionOutcome::Found { l_star: 5 };

struct Verdict {
    ok: bool,
    note: String,
}

fn pass(note: impl Into<String>) -> Verdict {
    Verdict { ok: true, note: note.into() }
}

fn fail(note: impl Into<String>) -> Verdict {
    Verdict { ok: false, note: note.into() }
}

fn composition() -> Verdict {
    let g = WindowGrid::dyadic(32).unwrap();
    let n = g.size();
    let mut rng = Rng::new(1);
    let mut configs: Vec<Configuration> = (0..20)
        .map(|_| {
            let bits = Bits::from_indices(n + 1, (0..=n).filter(|_| rng.chance(1, 2)));
            Configuration::from_bits(&g, bits).unwrap()
        })
        .collect();
    configs.push(Configuration::ones(&g));
    let (mut checked, mut bad) = (0usize, 0usize);
    for x in &configs {
        for s in 1..n {
            for t in 1..=n - s {
                let lhs = shift(&shift(x, &g.element(s)).unwrap(), &g.element(t)).unwrap();
                let rhs = shift(x, &g.element(s + t)).unwrap();
                checked += 1;
                // Independent of the library: the composed shift reads bit i + s + t.
                let direct = (0..=n - s - t).all(|i| lhs.bit(i) == x.bit(i + s + t));
                if lhs != rhs || lhs.len() != n + 1 - s - t || !direct {
                    bad += 1;
                }
            }
        }
    }
    let note = format!("{checked} (x, s, t) checks, {bad} violations");
    if bad == 0 { pass(note) } else { fail(note) }
}

fn ultrametric() -> Verdict {
    let g = WindowGrid::dyadic(8).unwrap();
    let all: Vec<Configuration> = (0u32..64)
        .map(|m| Configuration::from_bits(&g, Bits::from_indices(6, (0..6).filter(|i| m >> i & 1 == 1))).unwrap())
        .collect();
    let mut d = vec![vec![Rat::zero(); 64]; 64];
    let mut bad = 0usize;
    for a in 0..64 {
        for b in 0..64 {
            d[a][b] = metric_d(&all[a], &all[b]).unwrap();
            // Cylinder correspondence against the masks directly.
            for i in 0..=6u32 {
                let agree = (a ^ b) & ((1 << i) - 1) == 0;
                if (d[a][b] < Rat::pow2_inv(i)) != agree {
                    bad += 1;
                }
            }
            if (d[a][b].is_zero()) != (a == b) || d[a][b] != metric_d(&all[b], &all[a]).unwrap() {
                bad += 1;
            }
        }
    }
    let mut triples = 0usize;
    for a in 0..64 {
        for b in 0..64 {
            for c in 0..64 {
                triples += 1;
                if d[a][c] > d[a][b].clone().max(d[b][c].clone()) {
                    bad += 1;
                }
            }
        }
    }
    let note = format!("{triples} triples, {bad} violations");
    if bad == 0 { pass(note) } else { fail(note) }
}

/// Seeds with `x_n <= 2^-n` drawn from the `N = 64` grid; subset sums may
/// collide, in which case the seed constructor must refuse them.
fn fs_invariants() -> Verdict {
    let g = WindowGrid::dyadic(64).unwrap();
    let mut rng = Rng::new(1);
    let (mut bad, mut distinct) = (0usize, 0usize);
    for i in 0..10_000usize {
        let len = i % 6 + 1;
        let xs: Vec<Rat> = (1..=len).map(|n| Rat::new(rng.range(1, 64 >> n), 64)).collect();
        let fs = finite_sums(&xs);
        // Oracle: every nonempty subset summed directly.
        let direct: BTreeSet<Rat> = (1u32..1 << len)
            .map(|m| (0..len).filter(|j| m >> j & 1 == 1).fold(Rat::zero(), |s, j| s + xs[j].clone()))
            .collect();
        let prev = finite_sums(&xs[..len - 1]);
        let last = &xs[len - 1];
        let mut rec: BTreeSet<Rat> = prev.clone();
        rec.insert(last.clone());
        rec.extend(prev.iter().map(|p| p + last));
        let on_grid: BTreeSet<Rat> = materialize(&SetSpec::FiniteSums(xs.clone()), &g)
            .unwrap()
            .elements()
            .into_iter()
            .collect();
        let full = fs.len() == (1 << len) - 1;
        distinct += full as usize;
        let accepted = FSSeed::new(xs.clone(), Rat::one()).is_ok();
        if fs != direct || fs != rec || fs.len() > (1 << len) - 1 || on_grid != direct || accepted != full {
            bad += 1;
        }
    }
    let note = format!("10000 seeds of length 1..=6 ({distinct} with distinct sums), {bad} violations");
    if bad == 0 { pass(note) } else { fail(note) }
}

fn suite(tag: SuiteTag) -> SuiteReport {
    run_suite(&SuiteConfig::standard(tag)).unwrap()
}

fn counts(r: &SuiteReport) -> String {
    let s = &r.summary;
    format!(
        "{}/{} pass, {} fail, {} at caps, {} replays, {} replay failures",
        s.pass, s.trials, s.fail, s.inconclusive_at_caps, s.replays, s.replay_failures
    )
}

fn all_pass(r: &SuiteReport, trials: usize) -> bool {
    r.summary.trials == trials && r.summary.pass == trials && r.summary.replay_failures == 0
}

/// Runs `f` under the clock and prints its criterion line.
fn criterion(results: &mut Vec<bool>, id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Verdict) {
    let start = Instant::now();
    let v = f();
    let took = start.elapsed();
    let ok = v.ok && took <= limit;
    println!(
        "criterion {id:>2} {}: {name}: {} [{took:.2?} of {limit:?}]",
        if ok { "PASS" } else { "FAIL" },
        v.note
    );
    results.push(ok);
}

fn main() {
    let mut results = Vec::new();
    let (mut replays, mut failures) = (0usize, 0usize);
    let mut suite_criterion = |results: &mut Vec<bool>, id, tag: SuiteTag, limit, judge: fn(&SuiteReport) -> Verdict| {
        criterion(results, id, tag.name(), limit, || {
            let r = suite(tag);
            replays += r.summary.replays;
            failures += r.summary.replay_failures;
            judge(&r)
        });
    };

    criterion(&mut results, 1, "composition law", Duration::from_secs(5), composition);
    criterion(&mut results, 2, "ultrametric and cylinders", Duration::from_secs(10), ultrametric);
    criterion(&mut results, 3, "finite-sum recursion and cardinality", Duration::from_secs(60), fs_invariants);
    suite_criterion(&mut results, 4, SuiteTag::CharRecurrence, Duration::from_secs(60), |r| {
        if all_pass(r, 100) { pass(counts(r)) } else { fail(counts(r)) }
    });
    suite_criterion(&mut results, 5, SuiteTag::BrokenIpForces, Duration::from_secs(120), |r| {
        if all_pass(r, 50) { pass(counts(r)) } else { fail(counts(r)) }
    });
    suite_criterion(&mut results, 6, SuiteTag::PwsEquiv, Duration::from_secs(120), |r| {
        let sw = r.sweep.as_ref().expect("sweep requested");
        let note = format!("{}; sweep of {} subsets {:?}", counts(r), sw.subsets, sw.agreement);
        if all_pass(r, 30) && sw.subsets == 128 && r.passed { pass(note) } else { fail(note) }
    });
    suite_criterion(&mut results, 7, SuiteTag::UniformEquiv, Duration::from_secs(120), |r| {
        let sinks: usize = r.graph_systems.iter().map(|s| s.sink_nodes).sum();
        let uniform: usize = r.graph_systems.iter().map(|s| s.uniform).sum();
        let note = format!("{}; {uniform}/{sinks} sink points uniform over {} systems", counts(r), r.graph_systems.len());
        if all_pass(r, 30) && r.graph_systems.len() == 10 && uniform == sinks && sinks > 0 {
            pass(note)
        } else {
            fail(note)
        }
    });
    suite_criterion(&mut results, 8, SuiteTag::Partition, Duration::from_secs(300), |r| {
        let a = compute_partition_regression(2, 2, 4).unwrap();
        let b = compute_partition_regression(2, 2, 4).unwrap();
        let wide = compute_partition_regression(2, 2, 6).unwrap();
        let same = serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap();
        let note = format!(
            "(2,2,4) -> {:?} exhaustive={}, (2,2,6) -> {:?}; suite {}",
            a.outcome,
            a.exhaustive,
            wide.outcome,
            counts(r)
        );
        let ok = a.exhaustive
            && a.outcome == PINNED_2_2_4
            && wide.exhaustive
            && wide.outcome == PINNED_2_2_6
            && same
            && all_pass(r, 20);
        if ok { pass(note) } else { fail(note) }
    });
    criterion(&mut results, 9, "determinism of verify", Duration::from_secs(300), || {
        let mut differing = Vec::new();
        for tag in SuiteTag::ALL {
            let argv = ["nearzero", "--format", "json", "verify", "--suite", tag.name(), "--seed", "1"];
            let a = nearzero_cli::run(argv);
            let b = nearzero_cli::run(argv);
            if a.stdout != b.stdout || a.stdout.is_empty() {
                differing.push(tag.name());
            }
        }
        let note = format!("{} suites run twice, {} differing {:?}", SuiteTag::ALL.len(), differing.len(), differing);
        if differing.is_empty() { pass(note) } else { fail(note) }
    });
    criterion(&mut results, 10, "certificate replay", Duration::from_secs(1), || {
        let note = format!("{replays} replays across criteria 4-8, {failures} failures");
        if failures == 0 && replays > 0 { pass(note) } else { fail(note) }
    });

    let passed = results.iter().filter(|ok| **ok).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
