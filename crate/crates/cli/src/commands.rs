use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use clwork::formula::{parse, Budget, Dialect, Formula};
use clwork::game::{static_violation, Game, Player, Run, Valuation};
use clwork::hpm::{host, run_branch, HPMachine, TableProgram};
use clwork::proof::{check_proof, decide_cl4_blindfree, prove, Proof, Verdict};
use clwork::semantics::library::{enumerate_family, shape};
use clwork::semantics::{adjudicate, interpret, trace, Bounds, Interpretation};
use clwork::service::{parse_request, ParseRequest, WIRE_VERSION};
use clwork::strategy::{extract, verify_agent, AgentSpec, EnvSchedule, Schedule, VerifyOptions};

use crate::{engine, CliError, Outcome, EXIT_NEGATIVE, EXIT_UNKNOWN};

/// Largest family `verify` builds from template shapes.
const FAMILY_LIMIT: usize = 1 << 12;
/// Cycles `hpm-run` adds after the last scheduled injection.
const HPM_SETTLE: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "clwork", version, about = "Computability-logic workbench")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// A formula game: formula, interpretation, universe and valuation.
#[derive(Args, Debug)]
pub struct GameArgs {
    #[arg(long, short = 'f')]
    pub formula: String,
    #[command(flatten)]
    pub star: StarArgs,
    #[arg(long, default_value_t = 3)]
    pub universe: u32,
    /// Values of free variables, e.g. `x=1,y=2`.
    #[arg(long, default_value = "")]
    pub valuation: Valuation,
}

/// An interpretation file plus inline letter values.
#[derive(Args, Debug)]
pub struct StarArgs {
    /// Interpretation file (JSON).
    #[arg(long)]
    pub interp: Option<PathBuf>,
    /// Truth value of a nullary elementary letter, e.g. `p=true`; added to
    /// the interpretation file.
    #[arg(long = "set", value_parser = letter)]
    pub letters: Vec<(String, bool)>,
}

impl StarArgs {
    fn load(&self) -> Result<Interpretation, CliError> {
        let star = match &self.interp {
            Some(p) => Interpretation::from_json(&read(p)?).map_err(engine)?,
            None => Interpretation::default(),
        };
        Ok(self.letters.iter().fold(star, |star, (name, value)| star.with_letter(name, *value)))
    }
}

fn letter(s: &str) -> Result<(String, bool), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected LETTER=true|false, got {s:?}"))?;
    let value = match value {
        "true" | "1" => true,
        "false" | "0" => false,
        other => return Err(format!("expected true or false, got {other:?}")),
    };
    Ok((name.to_string(), value))
}

fn dialect_name(d: Dialect) -> String {
    serde_json::to_value(d).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ScheduleArg {
    Reactive,
    Interleaved,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula and report its dialect and elementarization.
    Parse { formula: String },
    /// Search for a proof. Exit 0 proved, 1 not provable, 2 unknown.
    Prove {
        formula: String,
        #[arg(long)]
        dialect: Option<Dialect>,
        /// Goal limit of the search.
        #[arg(long)]
        budget: Option<usize>,
        /// Write the proof file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a proof file.
    Check {
        #[arg(long)]
        proof: PathBuf,
    },
    /// Decide a blind-quantifier-free CL4 formula.
    DecideBlindfree {
        formula: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Adjudicate a run.
    Eval {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value = "")]
        run: Run,
    },
    /// Bring a formula down along a legal run.
    Trace {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value = "")]
        run: Run,
    },
    /// Check both static clauses on runs up to `--depth` moves.
    StaticCheck {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000)]
        ceiling: usize,
    },
    /// Extract the strategy of a proof into an agent file.
    Extract {
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Play an agent against every environment over a family of interpretations.
    Verify {
        #[arg(long, conflicts_with = "proof", required_unless_present = "proof")]
        agent: Option<PathBuf>,
        #[arg(long)]
        proof: Option<PathBuf>,
        /// Defaults to the proof's theorem.
        #[arg(long, short = 'f')]
        formula: Option<String>,
        /// Interpretation family file (JSON array or single interpretation).
        #[arg(long)]
        interp_family: Option<PathBuf>,
        /// Template shape for a general letter, e.g. `P=and-of-ors`; the
        /// family ranges over every truth table of the letters used.
        #[arg(long)]
        shape: Vec<String>,
        #[arg(long, default_value_t = 3)]
        universe: u32,
        #[arg(long, value_enum, default_value_t = ScheduleArg::Reactive)]
        schedule: ScheduleArg,
        #[arg(long, default_value_t = 1_000_000)]
        ceiling: usize,
    },
    /// Play the extracted strategy of a proof; environment moves come from stdin.
    Play {
        #[arg(long)]
        proof: PathBuf,
        #[command(flatten)]
        star: StarArgs,
        #[arg(long, default_value_t = 3)]
        universe: u32,
        #[arg(long, default_value = "")]
        valuation: Valuation,
    },
    /// Run a machine file under an environment schedule and print the branch.
    HpmRun {
        /// A transition table or an agent file.
        #[arg(long)]
        machine: PathBuf,
        /// Lines `cycle: move move ...`.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long, default_value = "")]
        valuation: Valuation,
        /// Defaults to the last scheduled cycle plus a settling margin.
        #[arg(long)]
        cycles: Option<usize>,
        /// Adjudicate the spelled run on this formula.
        #[arg(long, short = 'f')]
        formula: Option<String>,
        #[command(flatten)]
        star: StarArgs,
        #[arg(long, default_value_t = 3)]
        universe: u32,
        /// Print every configuration, not only those that changed.
        #[arg(long)]
        full: bool,
    },
    /// Serve the session API over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Append-only event log; replayed on start.
        #[arg(long)]
        event_log: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn formula(text: &str) -> Result<Formula, CliError> {
    parse(text).map_err(engine)
}

fn load_proof(path: &Path) -> Result<Proof, CliError> {
    Proof::from_json(&read(path)?).map_err(engine)
}

fn player_letter(p: Player) -> char {
    p.letter()
}

pub(crate) fn dispatch(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Parse { formula } => parse_cmd(&formula),
        Command::Prove { formula, dialect, budget, out } => prove_cmd(&formula, dialect, budget, out.as_deref()),
        Command::Check { proof } => check_cmd(&proof),
        Command::DecideBlindfree { formula, out } => decide_cmd(&formula, out.as_deref()),
        Command::Eval { game, run } => eval_cmd(&game, &run),
        Command::Trace { game, run } => trace_cmd(&game, &run),
        Command::StaticCheck { game, depth, ceiling } => static_cmd(&game, depth, ceiling),
        Command::Extract { proof, out } => extract_cmd(&proof, &out),
        Command::Verify { agent, proof, formula, interp_family, shape, universe, schedule, ceiling } => {
            let source = match (agent, proof) {
                (Some(a), _) => AgentSource::Agent(a),
                (None, Some(p)) => AgentSource::Proof(p),
                (None, None) => return Err(CliError::Usage("one of --agent or --proof is required".into())),
            };
            let opts = VerifyOptions {
                schedule: match schedule {
                    ScheduleArg::Reactive => Schedule::Reactive,
                    ScheduleArg::Interleaved => Schedule::Interleaved,
                },
                ceiling,
                ..VerifyOptions::default()
            };
            verify_cmd(source, formula.as_deref(), interp_family.as_deref(), &shape, universe, &opts)
        }
        Command::Play { proof, star, universe, valuation } => {
            let proof = load_proof(&proof)?;
            let star = star.load()?;
            crate::play::play(&proof, &star, &Bounds::universe(universe), &valuation, input, out, cli.json)
        }
        Command::HpmRun { machine, schedule, valuation, cycles, formula, star, universe, full } => {
            let schedule = match schedule {
                Some(p) => read(&p)?.parse::<EnvSchedule>().map_err(engine)?,
                None => EnvSchedule::default(),
            };
            let target = match formula {
                Some(f) => Some((self::formula(&f)?, star.load()?, Bounds::universe(universe))),
                None => None,
            };
            hpm_cmd(&machine, &schedule, &valuation, cycles, target, full)
        }
        Command::Serve { port, host, event_log } => crate::server::serve_blocking(&host, port, event_log.as_deref())
            .map(|()| Outcome::ok(String::new(), json!(null))),
    }
}

fn parse_cmd(text: &str) -> Result<Outcome, CliError> {
    let r = parse_request(&ParseRequest { version: WIRE_VERSION.into(), formula: text.into() }).map_err(engine)?;
    let mut s = String::new();
    let _ = writeln!(s, "formula: {}", r.formula);
    let _ = writeln!(s, "pretty: {}", r.pretty);
    let _ = writeln!(s, "dialect: {}", dialect_name(r.dialect));
    let _ = writeln!(s, "free variables: {}", r.free_vars.join(", "));
    let _ = writeln!(s, "elementarization: {}", r.elementarization);
    Ok(Outcome::ok(s, serde_json::to_value(&r).expect("serializes")))
}

fn verdict_outcome(f: &Formula, dialect: Dialect, v: Verdict, out: Option<&Path>) -> Result<Outcome, CliError> {
    Ok(match v {
        Verdict::Proved(p) => {
            if let Some(path) = out {
                write(path, &p.to_json())?;
            }
            let text = format!("proved in {}: {f}\n{p}", dialect_name(dialect));
            Outcome::ok(text, json!({ "verdict": "proved", "dialect": dialect, "formula": f.to_string(), "proof": p }))
        }
        Verdict::NotProvable => Outcome::ok(
            format!("not provable in {}: {f}", dialect_name(dialect)),
            json!({ "verdict": "not_provable", "dialect": dialect, "formula": f.to_string() }),
        )
        .with_code(EXIT_NEGATIVE),
        Verdict::Unknown => Outcome::ok(
            format!("unknown within the budget: {f}"),
            json!({ "verdict": "unknown", "dialect": dialect, "formula": f.to_string() }),
        )
        .with_code(EXIT_UNKNOWN),
    })
}

fn prove_cmd(
    text: &str,
    dialect: Option<Dialect>,
    goals: Option<usize>,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let f = formula(text)?;
    let dialect = dialect.unwrap_or_else(|| Dialect::of(&f));
    let mut budget = Budget::default();
    if let Some(g) = goals {
        budget.max_goals = g;
    }
    let v = prove(&f, dialect, &budget).map_err(engine)?;
    verdict_outcome(&f, dialect, v, out)
}

fn decide_cmd(text: &str, out: Option<&Path>) -> Result<Outcome, CliError> {
    let f = formula(text)?;
    let v = match decide_cl4_blindfree(&f).map_err(engine)? {
        Some(p) => Verdict::Proved(p),
        None => Verdict::NotProvable,
    };
    verdict_outcome(&f, Dialect::Cl4, v, out)
}

fn check_cmd(path: &Path) -> Result<Outcome, CliError> {
    let p = load_proof(path)?;
    Ok(match check_proof(&p) {
        Ok(c) => {
            let note = if c.conditional { " (conditional on an assumed stability certificate)" } else { "" };
            Outcome::ok(
                format!("valid {} proof of {}{note}", dialect_name(p.dialect), c.theorem),
                json!({ "valid": true, "dialect": p.dialect, "theorem": c.theorem.to_string(), "conditional": c.conditional }),
            )
        }
        Err(errors) => {
            let mut s = format!("invalid proof: {} errors\n", errors.len());
            for e in &errors {
                let _ = writeln!(s, "  {e}");
            }
            Outcome::ok(s, json!({ "valid": false, "errors": errors })).with_code(EXIT_NEGATIVE)
        }
    })
}

fn eval_cmd(g: &GameArgs, run: &Run) -> Result<Outcome, CliError> {
    let f = formula(&g.formula)?;
    let star = g.star.load()?;
    let a = adjudicate(&f, &star, &Bounds::universe(g.universe), &g.valuation, &run.0).map_err(engine)?;
    let w = player_letter(a.winner);
    let text = match a.blame {
        None => format!("legal, winner={w}"),
        Some(b) => format!("illegal, blame={}, winner={w}", player_letter(b)),
    };
    Ok(Outcome::ok(text, json!({ "run": run, "legal": a.legal, "blame": a.blame, "winner": a.winner })))
}

fn trace_cmd(g: &GameArgs, run: &Run) -> Result<Outcome, CliError> {
    let f = formula(&g.formula)?;
    let star = g.star.load()?;
    let chain = trace(&f, &star, &Bounds::universe(g.universe), &g.valuation, &run.0).map_err(engine)?;
    let mut s = String::new();
    for (i, snap) in chain.iter().enumerate() {
        let mv = snap.mv.as_ref().map(|m| m.to_string()).unwrap_or_else(|| "-".into());
        let _ = writeln!(s, "{i}. {mv:<10} {}   [winner {}]", snap.position, player_letter(snap.game.winner()));
    }
    Ok(Outcome::ok(s, json!({ "snapshots": chain })))
}

fn static_cmd(g: &GameArgs, depth: usize, ceiling: usize) -> Result<Outcome, CliError> {
    let f = formula(&g.formula)?;
    let star = g.star.load()?;
    let bounds = Bounds::universe(g.universe);
    let gf = interpret(&f, &star, &bounds).map_err(engine)?;
    let vals = Valuation::all(&f.free_vars(), bounds.universe);
    let mut s = String::new();
    let mut rows = Vec::new();
    let mut all_static = true;
    for e in vals {
        let game: Game = gf.at(&e);
        // Runs past the depth bound are illegal from the first extra move on.
        let len = depth.min(game.depth_bound() + 1);
        let v = static_violation(&game, len, ceiling).map_err(engine)?;
        match &v {
            None => {
                let _ = writeln!(s, "{e}: static up to {len} moves");
            }
            Some(v) => {
                all_static = false;
                let _ = writeln!(
                    s,
                    "{e}: not static: clause {} for {} fails on [{}] delayed to [{}]",
                    v.clause,
                    player_letter(v.player),
                    v.gamma,
                    v.delay
                );
            }
        }
        rows.push(json!({
            "valuation": e,
            "maxLen": len,
            "static": v.is_none(),
            "violation": v.map(|v| json!({ "player": v.player, "clause": v.clause, "run": v.gamma, "delay": v.delay })),
        }));
    }
    let o = Outcome::ok(s, json!({ "static": all_static, "valuations": rows }));
    Ok(if all_static { o } else { o.with_code(EXIT_NEGATIVE) })
}

fn extract_cmd(proof: &Path, out: &Path) -> Result<Outcome, CliError> {
    let p = load_proof(proof)?;
    extract(&p).map_err(engine)?;
    let theorem = p.theorem().map(|t| t.to_string()).unwrap_or_default();
    write(out, &AgentSpec::Proof { proof: p }.to_json())?;
    Ok(Outcome::ok(
        format!("agent for {theorem} written to {}", out.display()),
        json!({ "theorem": theorem, "out": out.display().to_string() }),
    ))
}

enum AgentSource {
    Agent(PathBuf),
    Proof(PathBuf),
}

fn family(f: &Formula, path: Option<&Path>, shapes: &[String], universe: u32) -> Result<Vec<Interpretation>, CliError> {
    if let Some(p) = path {
        return Interpretation::family_from_json(&read(p)?).map_err(engine);
    }
    let mut map = BTreeMap::new();
    for s in shapes {
        let (sym, name) =
            s.split_once('=').ok_or_else(|| CliError::Usage(format!("expected SYMBOL=SHAPE, got {s:?}")))?;
        let sh = shape(name).ok_or_else(|| CliError::Usage(format!("unknown shape {name:?}")))?;
        map.insert(sym.to_string(), sh);
    }
    enumerate_family(f, &Interpretation::default(), &map, universe, FAMILY_LIMIT).map_err(engine)
}

fn verify_cmd(
    source: AgentSource,
    formula_text: Option<&str>,
    family_path: Option<&Path>,
    shapes: &[String],
    universe: u32,
    opts: &VerifyOptions,
) -> Result<Outcome, CliError> {
    let (spec, theorem) = match source {
        AgentSource::Agent(p) => (AgentSpec::from_json(&read(&p)?).map_err(engine)?, None),
        AgentSource::Proof(p) => {
            let proof = load_proof(&p)?;
            let t = proof.theorem().cloned();
            (AgentSpec::Proof { proof }, t)
        }
    };
    let theorem = match (&spec, theorem) {
        (AgentSpec::Proof { proof }, None) => proof.theorem().cloned(),
        (_, t) => t,
    };
    let f = match (formula_text, theorem) {
        (Some(t), _) => formula(t)?,
        (None, Some(t)) => t,
        (None, None) => return Err(CliError::Usage("--formula is required for this agent".into())),
    };
    let agent = spec.build().map_err(engine)?;
    let fam = family(&f, family_path, shapes, universe)?;
    let report = verify_agent(agent.as_ref(), &f, &fam, &Bounds::universe(universe), opts).map_err(engine)?;
    let mut s = format!(
        "{} on {f}: {} interpretations, {} valuations, {} runs, {} positions, {} losses\n",
        if report.wins() { "wins" } else { "loses" },
        fam.len(),
        report.valuations,
        report.leaves,
        report.positions,
        report.total_losses,
    );
    for l in &report.losses {
        let _ = writeln!(s, "  {:?} under {} members {:?}: {}", l.kind, l.valuation, l.members, l.run);
    }
    let code = if report.wins() { 0 } else { EXIT_NEGATIVE };
    Ok(Outcome::ok(s, json!({ "formula": f.to_string(), "family": fam.len(), "report": report })).with_code(code))
}

fn machine(path: &Path) -> Result<HPMachine, CliError> {
    let text = read(path)?;
    if let Ok(p) = TableProgram::from_json(&text) {
        return HPMachine::table(p).map_err(engine);
    }
    let spec = AgentSpec::from_json(&text).map_err(|e| {
        CliError::Engine(format!("{} is neither a transition table nor an agent file: {e}", path.display()))
    })?;
    Ok(host(spec.build().map_err(engine)?.as_ref()))
}

fn hpm_cmd(
    path: &Path,
    schedule: &EnvSchedule,
    e: &Valuation,
    cycles: Option<usize>,
    target: Option<(Formula, Interpretation, Bounds)>,
    full: bool,
) -> Result<Outcome, CliError> {
    let m = machine(path)?;
    let cycles = cycles.unwrap_or_else(|| schedule.last_round().map_or(0, |r| r + 1) + HPM_SETTLE);
    let branch = run_branch(&m, e, schedule, cycles);
    let mut s = String::new();
    let mut previous: Option<&clwork::hpm::ConfigSnapshot> = None;
    for c in &branch.log {
        let changed = previous.is_none_or(|p| p.state != c.state || p.run != c.run || p.work != c.work);
        if full || changed {
            let _ = writeln!(s, "{:>4}  {:<8} run=[{}] buffer={:?}", c.cycle, c.state, c.run, c.buffer);
        }
        previous = Some(c);
    }
    let _ = writeln!(s, "run: {}", branch.run);
    let mut json = json!({ "branch": branch });
    if let Some((f, star, bounds)) = target {
        let a = adjudicate(&f, &star, &bounds, e, &branch.run.0).map_err(engine)?;
        let _ = writeln!(s, "{}, winner={}", if a.legal { "legal" } else { "illegal" }, player_letter(a.winner));
        json["adjudication"] = serde_json::to_value(a).expect("serializes");
    }
    Ok(Outcome::ok(s, json))
}
