//! Seeded verification suites. Every assertion goes through a public
//! replayer or a direct recomputation, never through searcher state.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::detectors::cross::cross_params;
use crate::detectors::replay::{
    replay_broken_ip, replay_broken_syndetic, replay_ip, replay_pw, replay_refutation,
};
use crate::detectors::{
    cross_check_pws_bsyn, hindman_block_oracle, search_ip_seed, Agreement, BlockSumWitness, Ladder, Verdict,
};
use crate::dynamics::recurrence::direct_returns;
use crate::dynamics::{
    check_recurrent_near_zero, forces_recurrence_probe, forces_uniform_probe, minimal_invariant, orbit_graph,
    r_delta, replay_recurrence, replay_uniform, shift, uniform_in_graph, OrbitGraph, ShiftSystem,
};
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::rng::Rng;
use crate::semigroup::WindowGrid;
use crate::sets::{materialize, plant_broken_ip, plant_broken_syndetic, GroundSet, SetSpec};

use super::partition::{compute_partition_regression, cross_check_with_oracle, generic_seed, PartitionRegression, RegressionOutcome};
use super::random::{random_pattern, random_seed, random_setspec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SuiteTag {
    #[serde(rename = "T-char-recurrence")]
    CharRecurrence,
    #[serde(rename = "T-broken-ip-forces")]
    BrokenIpForces,
    #[serde(rename = "T-pws-equiv")]
    PwsEquiv,
    #[serde(rename = "T-uniform-equiv")]
    UniformEquiv,
    #[serde(rename = "T-partition")]
    Partition,
}

impl SuiteTag {
    pub const ALL: [SuiteTag; 5] = [
        SuiteTag::CharRecurrence,
        SuiteTag::BrokenIpForces,
        SuiteTag::PwsEquiv,
        SuiteTag::UniformEquiv,
        SuiteTag::Partition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteTag::CharRecurrence => "T-char-recurrence",
            SuiteTag::BrokenIpForces => "T-broken-ip-forces",
            SuiteTag::PwsEquiv => "T-pws-equiv",
            SuiteTag::UniformEquiv => "T-uniform-equiv",
            SuiteTag::Partition => "T-partition",
        }
    }
}

impl fmt::Display for SuiteTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<SuiteTag> {
        SuiteTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite tag {s:?}")))
    }
}

/// Fully determines a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub tag: SuiteTag,
    pub trials: usize,
    pub rng_seed: u64,
    /// Dyadic grid modulus `N`.
    pub modulus: u64,
    pub depth: usize,
    /// Comparison prefix `P` of the shift systems.
    pub prefix: usize,
    pub f_cap: usize,
    pub probe_budget: usize,
    pub seed_len: usize,
    /// `(delta, cap)` rungs of the detector ladder.
    pub ladder: Vec<(Rat, usize)>,
    /// Add the exhaustive sweep over subsets of `{1, ..., 7}/8`.
    pub sweep: bool,
    /// Orbit-graph systems checked alongside the planted trials.
    pub systems: usize,
    pub r: usize,
    pub m: usize,
    pub l_max: usize,
}

pub const MAX_TRIALS: usize = 10_000;
const GRAPH_SALT: u64 = 0x6772_6170_6873;
const PLANT_TRIES: usize = 64;

impl SuiteConfig {
    pub fn standard(tag: SuiteTag) -> SuiteConfig {
        let halving = |depth, cap| -> Vec<(Rat, usize)> { (1..=depth).map(|k| (Rat::pow2_inv(k), cap)).collect() };
        let syndetic_ladder = vec![(Rat::new(1, 4), 4), (Rat::new(1, 8), 4), (Rat::new(1, 16), 4)];
        let base = SuiteConfig {
            tag,
            trials: 0,
            rng_seed: 1,
            modulus: 64,
            depth: 4,
            prefix: crate::dynamics::DEFAULT_PREFIX,
            f_cap: 8,
            probe_budget: 8,
            seed_len: 3,
            ladder: Vec::new(),
            sweep: false,
            systems: 0,
            r: 2,
            m: 2,
            l_max: 4,
        };
        match tag {
            SuiteTag::CharRecurrence => SuiteConfig { trials: 100, ..base },
            SuiteTag::BrokenIpForces => SuiteConfig {
                trials: 50,
                ladder: halving(4, 3),
                ..base
            },
            SuiteTag::PwsEquiv => SuiteConfig {
                trials: 30,
                ladder: syndetic_ladder,
                sweep: true,
                ..base
            },
            SuiteTag::UniformEquiv => SuiteConfig {
                trials: 30,
                ladder: syndetic_ladder,
                systems: 10,
                ..base
            },
            SuiteTag::Partition => SuiteConfig {
                trials: 20,
                l_max: 5,
                ..base
            },
        }
    }

    fn grid(&self) -> Result<WindowGrid> {
        WindowGrid::dyadic(self.modulus).map_err(|e| Error::Config(format!("grid: {e}")))
    }

    fn detector_ladder(&self) -> Result<Ladder> {
        let ladder = Ladder::from_pairs(&self.ladder).map_err(|e| Error::Config(format!("ladder: {e}")))?;
        ladder.check_grid(&self.grid()?).map_err(|e| Error::Config(format!("ladder: {e}")))?;
        Ok(ladder)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials > MAX_TRIALS {
            return Err(Error::Config(format!("{} trials (max {MAX_TRIALS})", self.trials)));
        }
        let grid = self.grid()?;
        if self.tag != SuiteTag::Partition {
            crate::dynamics::depth_guard(&grid, self.depth).map_err(|e| Error::Config(e.to_string()))?;
            if self.prefix == 0 || self.prefix > grid.size() {
                return Err(Error::Config(format!("prefix {} outside 1..={}", self.prefix, grid.size())));
            }
        }
        if matches!(self.tag, SuiteTag::BrokenIpForces | SuiteTag::PwsEquiv | SuiteTag::UniformEquiv) {
            self.detector_ladder()?;
        }
        if self.f_cap == 0 || self.probe_budget == 0 {
            return Err(Error::Config("caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    InconclusiveAtCaps,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub instance: String,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub detail: Value,
    pub replays: usize,
    pub replay_failures: Vec<String>,
}

/// A failing instance with everything needed to rerun it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub instance: String,
    pub caps: Value,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive_at_caps: usize,
    pub replays: usize,
    pub replay_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepTable {
    pub modulus: u64,
    pub subsets: usize,
    pub agreement: BTreeMap<String, usize>,
    /// Subset masks (bit `k-1` for `k/8`) that ended in disagreement.
    pub disagreements: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SinkCheck {
    pub system: String,
    pub nodes: usize,
    pub sink_nodes: usize,
    pub uniform: usize,
    pub inconclusive: usize,
    pub not_uniform: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub trials: Vec<TrialRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepTable>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub graph_systems: Vec<SinkCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regression: Option<PartitionRegression>,
    pub counterexamples: Vec<Counterexample>,
    pub summary: Summary,
    /// No hard failures and no replay failures anywhere.
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

impl SuiteReport {
    /// Pretty JSON with keys in sorted order.
    pub fn to_canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }
}

#[derive(Default)]
struct Tally {
    replays: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, what: &str, r: std::result::Result<(), String>) {
        self.replays += 1;
        if let Err(e) = r {
            self.failures.push(format!("{what}: {e}"));
        }
    }
}

struct Trial {
    instance: String,
    outcome: Outcome,
    reason: Option<String>,
    detail: Value,
    tally: Tally,
}

impl Trial {
    fn new(instance: String) -> Trial {
        Trial {
            instance,
            outcome: Outcome::Pass,
            reason: None,
            detail: Value::Null,
            tally: Tally::default(),
        }
    }

    fn fail(&mut self, reason: impl Into<String>) {
        self.outcome = Outcome::Fail;
        self.reason.get_or_insert(reason.into());
    }

    fn capped(&mut self, reason: impl Into<String>) {
        if self.outcome == Outcome::Pass {
            self.outcome = Outcome::InconclusiveAtCaps;
            self.reason = Some(reason.into());
        }
    }
}

fn set_of(grid: &WindowGrid, xs: &[Rat]) -> std::result::Result<GroundSet, String> {
    let mut idx = Vec::with_capacity(xs.len());
    for x in xs {
        idx.push(grid.index_of(x).map_err(|e| e.to_string())?);
    }
    Ok(GroundSet::from_indices(grid, idx))
}

fn char_trial(cfg: &SuiteConfig, grid: &WindowGrid, rng: &mut Rng) -> Result<Trial> {
    let spec = random_setspec(rng, grid);
    let mut t = Trial::new(spec.to_string());
    let sys = ShiftSystem::of_set(&materialize(&spec, grid)?, cfg.prefix)?;
    let x = &sys.base;
    let rec = check_recurrent_near_zero(&sys, x, cfg.depth)?;
    t.tally.check("recurrence", replay_recurrence(&rec, &sys, x));
    let mut seeds = Vec::with_capacity(cfg.depth);
    for n in 1..=cfg.depth {
        let delta = Rat::new(1, n as u64);
        let listed = r_delta(&sys, x, &delta, grid.delta_max());
        let direct = direct_returns(&sys, x, &delta, grid.delta_max());
        t.tally.check(
            &format!("R_1/{n}"),
            if listed == direct { Ok(()) } else { Err("return set differs from direct recomputation".into()) },
        );
        let returns = set_of(grid, &direct).map_err(Error::Config)?;
        let v = search_ip_seed(&returns, 1, &[delta])?;
        match &v {
            Verdict::Certificate(w) => t.tally.check(&format!("seed 1/{n}"), replay_ip(w, &returns)),
            Verdict::Refutation(r) => t.tally.check(&format!("seed 1/{n}"), replay_refutation(r, &returns)),
            Verdict::Inconclusive(_) => t.capped(format!("seed search at 1/{n} hit its budget")),
        }
        seeds.push(v.label());
    }
    let by_seeds = seeds.iter().all(|l| *l == "certificate");
    if seeds.iter().all(|l| *l != "inconclusive") && by_seeds != rec.recurrent {
        t.fail(format!("recurrent = {} but seed search = {by_seeds}", rec.recurrent));
    }
    t.detail = json!({
        "recurrent": rec.recurrent,
        "witnesses": rec.rungs.iter().map(|r| r.witness.clone()).collect::<Vec<_>>(),
        "seed_search": seeds,
    });
    Ok(t)
}

fn broken_ip_trial(cfg: &SuiteConfig, grid: &WindowGrid, rng: &mut Rng) -> Result<Trial> {
    let ladder = cfg.detector_ladder()?;
    let seed = random_seed(rng, grid, cfg.seed_len, &Rat::new(1, 4))?;
    let (spec, cert) = plant_broken_ip(&seed, &ladder, rng.next_u64(), grid)?;
    let mut t = Trial::new(spec.to_string());
    let set = materialize(&spec, grid)?;
    t.tally.check("planted certificate", replay_broken_ip(&cert, &set));
    let probe = forces_recurrence_probe(&spec, grid, cfg.depth, cfg.prefix)?;
    match (&probe.found, &probe.recurrence) {
        (Some(h), Some(rec)) => {
            let sys = ShiftSystem::of_set(&set, cfg.prefix)?;
            match shift(&sys.base, &h.offset) {
                Ok(y) => {
                    t.tally.check("K_set membership", if y.bit(0) { Ok(()) } else { Err("y(0) = 0".into()) });
                    t.tally.check("recurrence", replay_recurrence(rec, &sys, &y));
                }
                Err(e) => t.tally.check("hit offset", Err(e.to_string())),
            }
        }
        _ => t.fail(format!("no recurrent point among {} candidates", probe.tried)),
    }
    t.detail = json!({
        "seed": seed.terms(),
        "orbit_points": probe.orbit_points,
        "k_set": probe.k_set,
        "tried": probe.tried,
        "found": probe.found,
    });
    Ok(t)
}

fn verdict_replays<C>(
    t: &mut Trial,
    what: &str,
    v: &Verdict<C>,
    set: &GroundSet,
    cert: impl Fn(&C, &GroundSet) -> std::result::Result<(), String>,
) {
    match v {
        Verdict::Certificate(c) => t.tally.check(what, cert(c, set)),
        Verdict::Refutation(r) => t.tally.check(what, replay_refutation(r, set)),
        Verdict::Inconclusive(_) => {}
    }
}

fn planted_syndetic(cfg: &SuiteConfig, grid: &WindowGrid, rng: &mut Rng) -> Result<(SetSpec, GroundSet, Trial)> {
    let (_, bs) = cross_params(cfg.detector_ladder()?, cfg.f_cap, cfg.probe_budget);
    // Bases that are not syndetic on the ladder are redrawn.
    let mut tries = 0;
    let (spec, cert) = loop {
        let base = random_pattern(rng, 6);
        match plant_broken_syndetic(&base, &bs, rng.next_u64(), grid) {
            Err(Error::NotSyndeticBase { .. }) if tries < PLANT_TRIES => tries += 1,
            other => break other?,
        }
    };
    let mut t = Trial::new(spec.to_string());
    let set = materialize(&spec, grid)?;
    t.tally.check("planted certificate", replay_broken_syndetic(&cert, &set));
    Ok((spec, set, t))
}

fn pws_trial(cfg: &SuiteConfig, grid: &WindowGrid, rng: &mut Rng) -> Result<Trial> {
    let (_, set, mut t) = planted_syndetic(cfg, grid, rng)?;
    let (pw, bs) = cross_params(cfg.detector_ladder()?, cfg.f_cap, cfg.probe_budget);
    let rep = cross_check_pws_bsyn(&set, &pw, &bs)?;
    verdict_replays(&mut t, "pw-syndetic", &rep.pw, &set, replay_pw);
    verdict_replays(&mut t, "broken-syndetic", &rep.broken_syndetic, &set, replay_broken_syndetic);
    match rep.agreement {
        Agreement::BothAccept => {}
        Agreement::DisagreeWithCaps if !rep.pw.is_refutation() && !rep.broken_syndetic.is_refutation() => {
            t.capped("a checker stopped at its budget")
        }
        a => t.fail(format!("planted instance gave {a:?}")),
    }
    t.detail = json!({
        "pw": rep.pw.label(),
        "broken_syndetic": rep.broken_syndetic.label(),
        "agreement": rep.agreement,
    });
    Ok(t)
}

fn uniform_trial(cfg: &SuiteConfig, grid: &WindowGrid, rng: &mut Rng) -> Result<Trial> {
    let (spec, set, mut t) = planted_syndetic(cfg, grid, rng)?;
    let (_, bs) = cross_params(cfg.detector_ladder()?, cfg.f_cap, cfg.probe_budget);
    let rep = forces_uniform_probe(&spec, grid, cfg.depth, cfg.prefix, cfg.f_cap, &bs)?;
    verdict_replays(&mut t, "broken-syndetic", &rep.broken_syndetic, &set, replay_broken_syndetic);
    if let (Some(h), Some(u)) = (&rep.probe.found, &rep.uniform) {
        let sys = ShiftSystem::of_set(&set, cfg.prefix)?;
        match shift(&sys.base, &h.offset) {
            Ok(y) => {
                t.tally.check("K_set membership", if y.bit(0) { Ok(()) } else { Err("y(0) = 0".into()) });
                t.tally.check(
                    "uniform recurrence",
                    replay_uniform(u, grid, |n| direct_returns(&sys, &y, &Rat::new(1, n as u64), grid.delta_max())),
                );
            }
            Err(e) => t.tally.check("hit offset", Err(e.to_string())),
        }
    }
    match rep.agreement {
        Agreement::BothAccept => {}
        Agreement::DisagreeWithCaps if rep.hit_caps || !rep.broken_syndetic.is_refutation() => {
            t.capped("a checker stopped at its budget")
        }
        a => t.fail(format!("planted instance gave {a:?}")),
    }
    t.detail = json!({
        "tried": rep.probe.tried,
        "found": rep.probe.found,
        "broken_syndetic": rep.broken_syndetic.label(),
        "agreement": rep.agreement,
    });
    Ok(t)
}

/// Walk sums from `node` ending near it, by depth-first search over
/// `(sum, node)` states.
fn walk_returns(g: &OrbitGraph, node: usize, delta: &Rat) -> Vec<Rat> {
    let size = g.grid.size();
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut stack = vec![(0usize, node)];
    let mut sums = BTreeSet::new();
    let target = &g.nodes[node].prefix;
    while let Some((s, u)) = stack.pop() {
        if !seen.insert((s, u)) {
            continue;
        }
        let p = &g.nodes[u].prefix;
        let j = (0..g.prefix).find(|&i| p.get(i) != target.get(i));
        let d = j.map_or_else(Rat::zero, |j| Rat::pow2_inv(j as u32 + 1));
        if s > 0 && d < *delta {
            sums.insert(s);
        }
        for e in g.edges.iter().filter(|e| e.from == u && s + e.label <= size) {
            stack.push((s + e.label, e.to));
        }
    }
    sums.into_iter().map(|s| g.grid.element(s)).collect()
}

fn graph_system(cfg: &SuiteConfig, grid: &WindowGrid, index: usize, tally: &mut Tally) -> Result<SinkCheck> {
    let mut rng = Rng::fork(cfg.rng_seed ^ GRAPH_SALT, index as u64);
    let n = grid.size();
    let density = rng.range(1, 7);
    let noise = SetSpec::Explicit((1..=n).filter(|_| rng.chance(density, 8)).map(|k| grid.element(k)).collect());
    let spec = SetSpec::union(random_pattern(&mut rng, 8), SetSpec::window(noise, Rat::new(1, 8)));
    let sys = ShiftSystem::of_set(&materialize(&spec, grid)?, cfg.prefix)?;
    let g = orbit_graph(&sys, &grid.element(2.min(n)))?;
    let mut check = SinkCheck {
        system: spec.to_string(),
        nodes: g.nodes.len(),
        sink_nodes: 0,
        uniform: 0,
        inconclusive: 0,
        not_uniform: 0,
    };
    for comp in minimal_invariant(&g) {
        for node in comp {
            check.sink_nodes += 1;
            let rep = uniform_in_graph(&g, node, cfg.depth, cfg.f_cap)?;
            tally.check(
                &format!("system {index} node {node}"),
                replay_uniform(&rep, grid, |k| walk_returns(&g, node, &Rat::new(1, k as u64))),
            );
            if rep.uniform {
                check.uniform += 1;
            } else if rep.rungs.iter().any(|r| matches!(r.verdict, Verdict::Inconclusive(_))) {
                check.inconclusive += 1;
            } else {
                check.not_uniform += 1;
            }
        }
    }
    Ok(check)
}

fn sweep(cfg: &SuiteConfig, tally: &mut Tally) -> Result<SweepTable> {
    let grid = WindowGrid::dyadic(8)?;
    let ladder = Ladder::halving(&Rat::one(), 2, |_| cfg.f_cap)?;
    let (pw, bs) = cross_params(ladder, cfg.f_cap, cfg.probe_budget);
    let mut table = SweepTable {
        modulus: 8,
        subsets: 0,
        agreement: BTreeMap::new(),
        disagreements: Vec::new(),
    };
    for mask in 0u32..1 << 7 {
        let set = GroundSet::from_indices(&grid, (1..=7).filter(|k| mask >> (k - 1) & 1 == 1));
        let rep = cross_check_pws_bsyn(&set, &pw, &bs)?;
        let mut t = Trial::new(String::new());
        verdict_replays(&mut t, "pw-syndetic", &rep.pw, &set, replay_pw);
        verdict_replays(&mut t, "broken-syndetic", &rep.broken_syndetic, &set, replay_broken_syndetic);
        tally.replays += t.tally.replays;
        tally.failures.extend(t.tally.failures.into_iter().map(|f| format!("subset {mask:#09b} {f}")));
        let key = serde_json::to_value(rep.agreement).expect("agreement serializes");
        *table.agreement.entry(key.as_str().unwrap_or_default().to_string()).or_default() += 1;
        if rep.agreement == Agreement::DisagreeWithCaps {
            table.disagreements.push(mask);
        }
        table.subsets += 1;
    }
    Ok(table)
}

/// Disjoint nonempty blocks, sums recomputed from the seed, and every
/// subfamily sum in the witness color.
fn check_block_witness(
    w: &BlockSumWitness,
    terms: &[Rat],
    m: usize,
    color: impl Fn(&Rat) -> u32,
) -> std::result::Result<(), String> {
    if w.blocks.len() != m || w.sums.len() != m {
        return Err(format!("{} blocks for m = {m}", w.blocks.len()));
    }
    let mut used = BTreeSet::new();
    for (b, s) in w.blocks.iter().zip(&w.sums) {
        if b.is_empty() {
            return Err("empty block".into());
        }
        let mut sum = Rat::zero();
        for &i in b {
            if i == 0 || i > terms.len() || !used.insert(i) {
                return Err(format!("index {i} reused or out of range"));
            }
            sum = sum + terms[i - 1].clone();
        }
        if sum != *s {
            return Err(format!("block sum {sum} recorded as {s}"));
        }
    }
    for sel in 1u32..1 << m {
        let s = (0..m)
            .filter(|i| sel >> i & 1 == 1)
            .fold(Rat::zero(), |acc, i| acc + w.sums[i].clone());
        if color(&s) != w.color {
            return Err(format!("subfamily sum {s} has color {}", color(&s)));
        }
    }
    Ok(())
}

fn partition_trial(cfg: &SuiteConfig, reg: &PartitionRegression, rng: &mut Rng) -> Result<Trial> {
    let (l, decided) = match reg.outcome {
        RegressionOutcome::Found { l_star } => (l_star, reg.exhaustive),
        RegressionOutcome::NotFound { l_max } => (l_max, false),
    };
    let seed = generic_seed(l)?;
    let colors: BTreeMap<Rat, u32> = (1u32..1 << l)
        .map(|mask| {
            let s = (0..l)
                .filter(|i| mask >> i & 1 == 1)
                .fold(Rat::zero(), |acc, i| acc + seed.terms()[i].clone());
            (s, rng.below(cfg.r as u64) as u32 + 1)
        })
        .collect();
    let mut t = Trial::new(format!("L={l} coloring {:?}", colors.values().collect::<Vec<_>>()));
    let color = |x: &Rat| colors[x];
    match hindman_block_oracle(&seed, l, color, cfg.m)? {
        Some(w) => {
            t.tally.check("block witness", check_block_witness(&w, seed.terms(), cfg.m, color));
            t.detail = json!({ "witness": w });
        }
        None if decided => t.fail(format!("no monochromatic family at L* = {l}")),
        None => t.capped(format!("no family at L = {l}, below any decided L*")),
    }
    Ok(t)
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let mut extra = Tally::default();
    let regression = if cfg.tag == SuiteTag::Partition {
        let reg = compute_partition_regression(cfg.r, cfg.m, cfg.l_max).map_err(|e| Error::Config(e.to_string()))?;
        extra.check("regression oracle cross-check", cross_check_with_oracle(&reg));
        Some(reg)
    } else {
        None
    };
    let mut trials = Vec::with_capacity(cfg.trials);
    for i in 0..cfg.trials {
        let mut rng = Rng::fork(cfg.rng_seed, i as u64);
        let res = match cfg.tag {
            SuiteTag::CharRecurrence => char_trial(cfg, &grid, &mut rng),
            SuiteTag::BrokenIpForces => broken_ip_trial(cfg, &grid, &mut rng),
            SuiteTag::PwsEquiv => pws_trial(cfg, &grid, &mut rng),
            SuiteTag::UniformEquiv => uniform_trial(cfg, &grid, &mut rng),
            SuiteTag::Partition => partition_trial(cfg, regression.as_ref().expect("computed above"), &mut rng),
        };
        let t = res.unwrap_or_else(|e| {
            let mut t = Trial::new(String::from("(not constructed)"));
            t.fail(format!("trial error: {e}"));
            t
        });
        trials.push(TrialRecord {
            index: i,
            instance: t.instance,
            outcome: if t.tally.failures.is_empty() { t.outcome } else { Outcome::Fail },
            reason: t.reason.or_else(|| t.tally.failures.first().cloned()),
            detail: t.detail,
            replays: t.tally.replays,
            replay_failures: t.tally.failures,
        });
    }
    let sweep = if cfg.sweep { Some(sweep(cfg, &mut extra)?) } else { None };
    let mut graph_systems = Vec::with_capacity(cfg.systems);
    for j in 0..cfg.systems {
        graph_systems.push(graph_system(cfg, &grid, j, &mut extra)?);
    }

    let caps = json!({
        "depth": cfg.depth,
        "f_cap": cfg.f_cap,
        "ladder": cfg.ladder,
        "modulus": cfg.modulus,
        "prefix": cfg.prefix,
        "probe_budget": cfg.probe_budget,
    });
    let counterexamples = trials
        .iter()
        .filter(|t| t.outcome == Outcome::Fail)
        .map(|t| Counterexample {
            index: t.index,
            instance: t.instance.clone(),
            caps: caps.clone(),
            reason: t.reason.clone().unwrap_or_default(),
        })
        .collect::<Vec<_>>();
    let count = |o: Outcome| trials.iter().filter(|t| t.outcome == o).count();
    let summary = Summary {
        trials: trials.len(),
        pass: count(Outcome::Pass),
        fail: count(Outcome::Fail),
        inconclusive_at_caps: count(Outcome::InconclusiveAtCaps),
        replays: trials.iter().map(|t| t.replays).sum::<usize>() + extra.replays,
        replay_failures: trials.iter().map(|t| t.replay_failures.len()).sum::<usize>() + extra.failures.len(),
    };
    let graph_ok = graph_systems.iter().all(|s| s.not_uniform == 0);
    Ok(SuiteReport {
        config: cfg.clone(),
        passed: summary.fail == 0 && summary.replay_failures == 0 && graph_ok,
        trials,
        sweep,
        graph_systems,
        regression,
        counterexamples,
        summary,
        wall_clock_ms: None,
    })
}
