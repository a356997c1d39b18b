//! Command-line front end. [`run`] is the whole program minus process I/O,
//! so tests drive it in-process.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use nearzero::detectors::replay::{
    replay_broken_ip, replay_broken_syndetic, replay_ip, replay_pw, replay_refutation, replay_syndetic,
};
use nearzero::detectors::{
    check_broken_ip, check_broken_syndetic, check_pw_syndetic, check_syndetic, search_ip_seed,
    BrokenSyndeticParams, Ladder, PwParams, Verdict,
};
use nearzero::dynamics::{
    check_recurrent_near_zero, check_uniformly_recurrent, chi, forces_recurrence_probe, forces_uniform_probe,
    minimal_invariant, orbit_graph, ShiftSystem, DEFAULT_PREFIX,
};
use nearzero::harness::{compute_partition_regression, run_suite, RegressionOutcome, SuiteConfig, SuiteTag};
use nearzero::sets::{materialize, parse_setspec, GroundSet, SetSpec};
use nearzero::{Error, GridSpec, Rat, WindowGrid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CAPS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Parser, Debug)]
#[command(
    name = "nearzero",
    version,
    about = "Certificates for combinatorial sets near zero and shift-space recurrence probes",
    after_help = "Exit codes: 0 certificate or success, 1 refutation or failure, 2 inconclusive at caps, 64 usage error, 65 input data error."
)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a set-class detector.
    Analyze(AnalyzeArgs),
    /// Shift-space operations on the characteristic configuration of a set.
    Dynamics {
        #[command(subcommand)]
        op: DynamicsOp,
    },
    /// Run a seeded verification suite.
    Verify(VerifyArgs),
    /// Regression computations.
    Regress {
        #[command(subcommand)]
        op: RegressOp,
    },
}

#[derive(Args, Debug, Clone)]
struct SetArgs {
    /// Set description, e.g. "fs(1/4,1/16)" or "pattern(2,[1])".
    #[arg(long)]
    set: String,
    /// Grid: dyadic:N or mod:M[:N].
    #[arg(long, default_value = "dyadic:64")]
    grid: String,
    /// Window radius of the grid.
    #[arg(long, default_value = "1")]
    delta_max: String,
    /// Ladder depth K.
    #[arg(long, default_value_t = 3)]
    depth: usize,
}

#[derive(Args, Debug, Clone)]
struct CapArgs {
    /// Comma-separated caps: rung_cap (3), f_cap (4), seed_cap (3),
    /// probe_budget (8), piece_cap (f_cap).
    #[arg(long, default_value = "")]
    caps: String,
    /// Explicit ladder "delta:cap,...", replacing the halving ladder
    /// delta_max/2, ..., delta_max/2^K with cap rung_cap.
    #[arg(long)]
    ladder: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Property {
    Ip,
    BrokenIp,
    Syndetic,
    PwSyndetic,
    BrokenSyndetic,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long, value_enum)]
    property: Property,
    #[command(flatten)]
    caps: CapArgs,
    /// Broken-syndetic shifters must themselves lie in the set.
    #[arg(long)]
    shifter_in_set: bool,
}

#[derive(Args, Debug, Clone)]
struct DynArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Comparison prefix P.
    #[arg(long, default_value_t = DEFAULT_PREFIX)]
    prefix: usize,
}

#[derive(Subcommand, Debug)]
enum DynamicsOp {
    /// Orbit graph and its sink components.
    Orbit {
        #[command(flatten)]
        args: DynArgs,
        /// Largest shift label; defaults to two grid steps.
        #[arg(long)]
        shift_bound: Option<String>,
    },
    /// Recurrence near zero of the configuration itself.
    Recurrence {
        #[command(flatten)]
        args: DynArgs,
    },
    /// Uniform recurrence near zero of the configuration itself.
    Uniform {
        #[command(flatten)]
        args: DynArgs,
        #[arg(long, default_value_t = 4)]
        f_cap: usize,
    },
    /// Search the orbit closure for a recurrent point with bit 0 set.
    Force {
        #[command(flatten)]
        args: DynArgs,
    },
    /// Search for a uniformly recurrent point and run the broken-syndetic
    /// checker alongside.
    ForceUniform {
        #[command(flatten)]
        args: DynArgs,
        #[command(flatten)]
        caps: CapArgs,
        /// Translate cap of the uniform recurrence check.
        #[arg(long, default_value_t = 8)]
        uniform_f_cap: usize,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite tag, e.g. T-broken-ip-forces.
    #[arg(long)]
    suite: String,
    /// Trial count; defaults to the suite's standard count.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// JSON suite configuration; --trials and --seed still override.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// Record wall-clock time, which makes reports differ between runs.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Subcommand, Debug)]
enum RegressOp {
    /// Least seed length whose colorings all carry a monochromatic block family.
    Partition {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        lmax: usize,
    },
}

/// Exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Fault {
    Usage(String),
    Data(String),
}

impl From<Error> for Fault {
    fn from(e: Error) -> Fault {
        match e {
            Error::Syntax { .. } => Fault::Usage(e.to_string()),
            _ => Fault::Data(e.to_string()),
        }
    }
}

type Res<T> = std::result::Result<T, Fault>;

struct Report {
    code: i32,
    json: Value,
    text: String,
}

pub fn run<I, T>(args: I) -> Run
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let msg = e.render().to_string();
            return if e.use_stderr() {
                Run { code, stdout: String::new(), stderr: msg }
            } else {
                Run { code, stdout: msg, stderr: String::new() }
            };
        }
    };
    let report = match dispatch(&cli.command) {
        Ok(r) => r,
        Err(Fault::Usage(m)) => return fault(EXIT_USAGE, "usage", &m),
        Err(Fault::Data(m)) => return fault(EXIT_DATA, "data", &m),
    };
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report.json).expect("value serializes") + "\n",
        Format::Text => report.text,
    };
    match &cli.output {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Run { code: report.code, stdout: String::new(), stderr: String::new() },
            Err(e) => fault(EXIT_DATA, "output", &format!("{}: {e}", path.display())),
        },
        None => Run { code: report.code, stdout: body, stderr: String::new() },
    }
}

fn fault(code: i32, kind: &str, msg: &str) -> Run {
    Run {
        code,
        stdout: String::new(),
        stderr: format!("nearzero: {kind} error: {msg}\n"),
    }
}

fn dispatch(cmd: &Command) -> Res<Report> {
    match cmd {
        Command::Analyze(a) => analyze(a),
        Command::Dynamics { op } => dynamics(op),
        Command::Verify(v) => verify(v),
        Command::Regress { op: RegressOp::Partition { r, m, lmax } } => regress(*r, *m, *lmax),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

struct Loaded {
    spec: SetSpec,
    grid: WindowGrid,
    set: GroundSet,
}

impl SetArgs {
    fn load(&self) -> Res<Loaded> {
        let gs: GridSpec = self.grid.parse().map_err(Fault::Usage)?;
        let delta_max = parse_rat(&self.delta_max, "--delta-max")?;
        let grid = WindowGrid::from_spec(gs, delta_max)?;
        let spec = parse_setspec(&self.set)?;
        let set = materialize(&spec, &grid)?;
        Ok(Loaded { spec, grid, set })
    }

    fn header(&self, l: &Loaded) -> Value {
        json!({
            "set": l.spec.to_string(),
            "grid": self.grid,
            "delta_max": l.grid.delta_max(),
            "depth": self.depth,
        })
    }
}

fn parse_rat(s: &str, flag: &str) -> Res<Rat> {
    s.parse().map_err(|e| Fault::Usage(format!("{flag} {s:?}: {e}")))
}

struct Caps {
    rung_cap: usize,
    f_cap: usize,
    seed_cap: usize,
    probe_budget: usize,
    piece_cap: Option<usize>,
}

impl CapArgs {
    fn caps(&self) -> Res<Caps> {
        let mut caps = Caps {
            rung_cap: 3,
            f_cap: 4,
            seed_cap: 3,
            probe_budget: 8,
            piece_cap: None,
        };
        for item in self.caps.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Fault::Usage(format!("--caps entry {item:?} is not key=value")))?;
            let v: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Fault::Usage(format!("--caps {k} needs a positive integer")))?;
            match k.trim() {
                "rung_cap" => caps.rung_cap = v,
                "f_cap" => caps.f_cap = v,
                "seed_cap" => caps.seed_cap = v,
                "probe_budget" => caps.probe_budget = v,
                "piece_cap" => caps.piece_cap = Some(v),
                other => return Err(Fault::Usage(format!("unknown cap {other:?}"))),
            }
        }
        Ok(caps)
    }

    fn ladder(&self, grid: &WindowGrid, depth: usize, rung_cap: usize) -> Res<Ladder> {
        let ladder = match &self.ladder {
            None => Ladder::halving(grid.delta_max(), depth, |_| rung_cap)?,
            Some(text) => {
                let mut pairs = Vec::new();
                for item in text.split(',').map(str::trim) {
                    let (d, c) = item
                        .split_once(':')
                        .ok_or_else(|| Fault::Usage(format!("--ladder rung {item:?} is not delta:cap")))?;
                    let cap = c
                        .trim()
                        .parse()
                        .map_err(|_| Fault::Usage(format!("--ladder cap {c:?} is not an integer")))?;
                    pairs.push((parse_rat(d, "--ladder")?, cap));
                }
                Ladder::from_pairs(&pairs)?
            }
        };
        ladder.check_grid(grid)?;
        Ok(ladder)
    }
}

fn ladder_value(l: &Ladder) -> Value {
    json!(l.rungs().iter().map(|r| json!([r.delta, r.cap])).collect::<Vec<_>>())
}

fn verdict_code<C>(v: &Verdict<C>) -> i32 {
    match v {
        Verdict::Certificate(_) => EXIT_OK,
        Verdict::Refutation(_) => EXIT_FAIL,
        Verdict::Inconclusive(_) => EXIT_CAPS,
    }
}

fn replay_verdict<C>(
    v: &Verdict<C>,
    set: &GroundSet,
    cert: impl Fn(&C, &GroundSet) -> std::result::Result<(), String>,
) -> Value {
    let r = match v {
        Verdict::Certificate(c) => cert(c, set),
        Verdict::Refutation(r) => replay_refutation(r, set),
        Verdict::Inconclusive(_) => return Value::Null,
    };
    match r {
        Ok(()) => json!("ok"),
        Err(e) => json!(e),
    }
}

fn analyze(a: &AnalyzeArgs) -> Res<Report> {
    let l = a.set.load()?;
    let caps = a.caps.caps()?;
    let mut out = a.set.header(&l);
    out["command"] = json!("analyze");
    let property = to_value(&a.property.to_possible_value().expect("named").get_name());
    out["property"] = property.clone();
    let (verdict, replay, code) = match a.property {
        Property::Ip => {
            let profile: Vec<Rat> = (1..=a.set.depth as u32)
                .map(|n| l.grid.delta_max() * &Rat::pow2_inv(n))
                .collect();
            out["profile"] = to_value(&profile);
            let v = search_ip_seed(&l.set, a.set.depth, &profile)?;
            (to_value(&v), replay_verdict(&v, &l.set, replay_ip), verdict_code(&v))
        }
        Property::BrokenIp => {
            let ladder = a.caps.ladder(&l.grid, a.set.depth, caps.rung_cap)?;
            out["ladder"] = ladder_value(&ladder);
            out["caps"] = json!({ "seed_cap": caps.seed_cap });
            let v = check_broken_ip(&l.set, &ladder, caps.seed_cap)?;
            (to_value(&v), replay_verdict(&v, &l.set, replay_broken_ip), verdict_code(&v))
        }
        Property::Syndetic => {
            let ladder = a.caps.ladder(&l.grid, a.set.depth, caps.rung_cap)?;
            out["ladder"] = ladder_value(&ladder);
            out["caps"] = json!({ "f_cap": caps.f_cap });
            let v = check_syndetic(&l.set, &ladder, caps.f_cap)?;
            (to_value(&v), replay_verdict(&v, &l.set, replay_syndetic), verdict_code(&v))
        }
        Property::PwSyndetic => {
            let ladder = a.caps.ladder(&l.grid, a.set.depth, caps.rung_cap)?;
            out["ladder"] = ladder_value(&ladder);
            out["caps"] = json!({ "f_cap": caps.f_cap, "probe_budget": caps.probe_budget });
            let params = PwParams {
                ladder,
                f_cap: caps.f_cap,
                probe_budget: caps.probe_budget,
            };
            let v = check_pw_syndetic(&l.set, &params)?;
            (to_value(&v), replay_verdict(&v, &l.set, replay_pw), verdict_code(&v))
        }
        Property::BrokenSyndetic => {
            let ladder = a.caps.ladder(&l.grid, a.set.depth, caps.rung_cap)?;
            out["ladder"] = ladder_value(&ladder);
            let params = BrokenSyndeticParams {
                ladder,
                f_cap: caps.f_cap,
                piece_cap: caps.piece_cap.unwrap_or(caps.f_cap),
                shifter_in_set: a.shifter_in_set,
            };
            out["caps"] = json!({ "f_cap": params.f_cap, "piece_cap": params.piece_cap, "shifter_in_set": params.shifter_in_set });
            let v = check_broken_syndetic(&l.set, &params)?;
            (to_value(&v), replay_verdict(&v, &l.set, replay_broken_syndetic), verdict_code(&v))
        }
    };
    let label = verdict["verdict"].as_str().unwrap_or_default().to_string();
    let text = format!(
        "property: {}\nset: {}\nverdict: {label}\nreplay: {}\ndetail: {}\n",
        property.as_str().unwrap_or_default(),
        l.spec,
        replay.as_str().unwrap_or("n/a"),
        verdict["detail"],
    );
    out["verdict"] = verdict;
    out["replay"] = replay;
    Ok(Report { code, json: out, text })
}

fn dynamics(op: &DynamicsOp) -> Res<Report> {
    match op {
        DynamicsOp::Orbit { args, shift_bound } => {
            let l = args.set.load()?;
            let sys = ShiftSystem::new(chi(&l.spec, &l.grid)?, args.prefix)?;
            let bound = match shift_bound {
                Some(s) => parse_rat(s, "--shift-bound")?,
                None => l.grid.element(2.min(l.grid.size())),
            };
            let g = orbit_graph(&sys, &bound)?;
            let sinks = minimal_invariant(&g);
            let mut out = g.to_json();
            out["command"] = json!("dynamics orbit");
            out["set"] = json!(l.spec.to_string());
            out["shift_bound"] = to_value(&bound);
            out["sinks"] = json!(sinks);
            let text = format!(
                "nodes: {}\nedges:\n{}sinks: {:?}\n",
                g.nodes.len(),
                g.edge_list(),
                sinks
            );
            Ok(Report { code: EXIT_OK, json: out, text })
        }
        DynamicsOp::Recurrence { args } => {
            let l = args.set.load()?;
            let sys = ShiftSystem::new(chi(&l.spec, &l.grid)?, args.prefix)?;
            let rep = check_recurrent_near_zero(&sys, &sys.base, args.set.depth)?;
            let mut out = args.set.header(&l);
            out["command"] = json!("dynamics recurrence");
            out["report"] = to_value(&rep);
            let text = rep
                .rungs
                .iter()
                .map(|r| match &r.witness {
                    Some(w) => format!("1/{}: returns at {w}\n", r.n),
                    None => format!("1/{}: no return\n", r.n),
                })
                .collect::<String>()
                + &format!("recurrent: {}\n", rep.recurrent);
            Ok(Report {
                code: if rep.recurrent { EXIT_OK } else { EXIT_FAIL },
                json: out,
                text,
            })
        }
        DynamicsOp::Uniform { args, f_cap } => {
            let l = args.set.load()?;
            let sys = ShiftSystem::new(chi(&l.spec, &l.grid)?, args.prefix)?;
            let rep = check_uniformly_recurrent(&sys, &sys.base, args.set.depth, *f_cap)?;
            let capped = rep.rungs.iter().any(|r| matches!(r.verdict, Verdict::Inconclusive(_)));
            let mut out = args.set.header(&l);
            out["command"] = json!("dynamics uniform");
            out["report"] = to_value(&rep);
            let text = rep
                .rungs
                .iter()
                .map(|r| format!("1/{}: {} ({} return times)\n", r.n, r.verdict.label(), r.returns.len()))
                .collect::<String>()
                + &format!("uniform: {}\n", rep.uniform);
            let code = match (rep.uniform, capped) {
                (true, _) => EXIT_OK,
                (false, true) => EXIT_CAPS,
                (false, false) => EXIT_FAIL,
            };
            Ok(Report { code, json: out, text })
        }
        DynamicsOp::Force { args } => {
            let l = args.set.load()?;
            let rep = forces_recurrence_probe(&l.spec, &l.grid, args.set.depth, args.prefix)?;
            let mut out = args.set.header(&l);
            out["command"] = json!("dynamics force");
            out["report"] = to_value(&rep);
            let text = match &rep.found {
                Some(h) => format!("recurrent point at offset {}: {}\n", h.offset, h.config),
                None => format!("no recurrent point among {} candidates\n", rep.tried),
            };
            Ok(Report {
                code: if rep.found.is_some() { EXIT_OK } else { EXIT_FAIL },
                json: out,
                text,
            })
        }
        DynamicsOp::ForceUniform { args, caps, uniform_f_cap } => {
            let l = args.set.load()?;
            let c = caps.caps()?;
            let ladder = caps.ladder(&l.grid, args.set.depth, c.rung_cap)?;
            let mut params = BrokenSyndeticParams::new(ladder, c.f_cap);
            params.piece_cap = c.piece_cap.unwrap_or(c.f_cap);
            let rep = forces_uniform_probe(&l.spec, &l.grid, args.set.depth, args.prefix, *uniform_f_cap, &params)?;
            let mut out = args.set.header(&l);
            out["command"] = json!("dynamics force-uniform");
            out["ladder"] = ladder_value(&params.ladder);
            out["report"] = to_value(&rep);
            let agreement = to_value(&rep.agreement);
            let text = format!(
                "uniform point: {}\nbroken-syndetic: {}\nagreement: {}\n",
                rep.probe.found.as_ref().map_or("none".to_string(), |h| format!("{} at {}", h.config, h.offset)),
                rep.broken_syndetic.label(),
                agreement.as_str().unwrap_or_default(),
            );
            let code = match rep.agreement {
                nearzero::detectors::Agreement::BothAccept => EXIT_OK,
                nearzero::detectors::Agreement::BothRefute => EXIT_FAIL,
                nearzero::detectors::Agreement::DisagreeWithCaps => EXIT_CAPS,
            };
            Ok(Report { code, json: out, text })
        }
    }
}

fn verify(v: &VerifyArgs) -> Res<Report> {
    let tag: SuiteTag = v.suite.parse().map_err(|e: Error| Fault::Usage(e.to_string()))?;
    let mut cfg = match &v.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Fault::Data(format!("{}: {e}", path.display())))?;
            let cfg: SuiteConfig =
                serde_json::from_str(&text).map_err(|e| Fault::Data(format!("{}: {e}", path.display())))?;
            if cfg.tag != tag {
                return Err(Fault::Usage(format!("config is for {} but --suite is {tag}", cfg.tag)));
            }
            cfg
        }
        None => SuiteConfig::standard(tag),
    };
    cfg.rng_seed = v.seed;
    if let Some(t) = v.trials {
        cfg.trials = t;
    }
    let start = Instant::now();
    let mut rep = run_suite(&cfg)?;
    if v.timestamp {
        rep.wall_clock_ms = Some(start.elapsed().as_millis() as u64);
    }
    let s = &rep.summary;
    let text = format!(
        "suite {tag}: {} trials, {} pass, {} fail, {} inconclusive at caps; {} replays, {} replay failures\n{}",
        s.trials,
        s.pass,
        s.fail,
        s.inconclusive_at_caps,
        s.replays,
        s.replay_failures,
        if rep.passed { "PASSED\n" } else { "FAILED\n" },
    );
    let code = if !rep.passed {
        EXIT_FAIL
    } else if s.inconclusive_at_caps > 0 {
        EXIT_CAPS
    } else {
        EXIT_OK
    };
    Ok(Report { code, json: to_value(&rep), text })
}

fn regress(r: usize, m: usize, lmax: usize) -> Res<Report> {
    let reg = compute_partition_regression(r, m, lmax)?;
    let levels: BTreeMap<usize, bool> = reg.levels.iter().map(|l| (l.l, l.bad_coloring.is_some())).collect();
    let (code, head) = match reg.outcome {
        RegressionOutcome::Found { l_star } if reg.exhaustive => (EXIT_OK, format!("L* = {l_star}")),
        RegressionOutcome::Found { l_star } => (EXIT_CAPS, format!("L* <= {l_star} (sampled, not exhaustive)")),
        RegressionOutcome::NotFound { l_max } if reg.exhaustive => (EXIT_FAIL, format!("no L <= {l_max} works")),
        RegressionOutcome::NotFound { l_max } => (EXIT_CAPS, format!("no L <= {l_max} found (sampled)")),
    };
    let text = format!(
        "partition regression r={r} m={m}: {head}\n{}",
        levels
            .iter()
            .map(|(l, bad)| format!("  L={l}: {}\n", if *bad { "bad coloring found" } else { "every coloring has a family" }))
            .collect::<String>()
    );
    Ok(Report { code, json: to_value(&reg), text })
}
