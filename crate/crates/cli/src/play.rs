//! Terminal play: the human is the environment, the extracted strategy the
//! machine. Input lines are environment moves; `moves` lists the legal
//! ones, `quit` or end of input adjudicates the run as it stands.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde_json::json;

use clwork::game::{first_illegal, LabeledMove, Player, Run, Valuation};
use clwork::proof::Proof;
use clwork::semantics::{adjudicate, interpret, trace, Bounds, Interpretation};
use clwork::strategy::{extract, Agent};

use crate::{engine, CliError, Outcome};

/// Polls per machine turn; an agent still moving after this many polls is
/// treated as stuck.
const POLL_LIMIT: usize = 1_000;

pub(crate) fn play(
    proof: &Proof,
    star: &Interpretation,
    bounds: &Bounds,
    e: &Valuation,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    quiet: bool,
) -> Result<Outcome, CliError> {
    let f = proof.theorem().cloned().ok_or_else(|| CliError::Engine("empty proof".into()))?;
    let root = interpret(&f, star, bounds).map_err(engine)?.at(e);
    let mut agent = extract(proof).map_err(engine)?;
    agent.begin(e);
    let mut run: Vec<LabeledMove> = Vec::new();
    let mut say = |text: &str| {
        if !quiet {
            let _ = writeln!(out, "{text}");
        }
    };
    let position = |run: &[LabeledMove]| {
        trace(&f, star, bounds, e, run).ok().and_then(|c| c.last().map(|s| s.position.to_string())).unwrap_or_default()
    };
    say(&format!("game: {f}"));
    let mut line = String::new();
    'game: loop {
        for _ in 0..POLL_LIMIT {
            let moves = agent.poll();
            if moves.is_empty() {
                break;
            }
            for mv in moves {
                run.push(LabeledMove::machine(mv));
                say(&format!("machine: {}", run.last().expect("pushed")));
                if first_illegal(&root, &run).is_some() {
                    break 'game;
                }
            }
        }
        let current = root.prefix(&run).expect("run is legal so far");
        let legal = current.moves(Player::Environment);
        say(&format!("position: {}", position(&run)));
        if legal.is_empty() && current.moves(Player::Machine).is_empty() {
            break;
        }
        line.clear();
        if input.read_line(&mut line).map_err(|e| CliError::Usage(e.to_string()))? == 0 {
            break;
        }
        let mv = line.trim().trim_start_matches("B:");
        match mv {
            "" => continue,
            "quit" => break,
            "moves" => {
                say(&format!("legal: {}", legal.join(" ")));
                continue;
            }
            _ => {}
        }
        run.push(LabeledMove::env(mv));
        if first_illegal(&root, &run).is_some() {
            say(&format!("illegal move {mv}"));
            break;
        }
        agent.observe(mv);
    }
    let a = adjudicate(&f, star, bounds, e, &run).map_err(engine)?;
    let mut text = String::new();
    let _ = write!(
        text,
        "run: {}\n{}, winner={}",
        Run(run.clone()),
        if a.legal { "legal" } else { "illegal" },
        a.winner.letter()
    );
    if let Some(b) = a.blame {
        let _ = write!(text, ", blame={}", b.letter());
    }
    Ok(Outcome::ok(text, json!({ "formula": f.to_string(), "run": Run(run), "adjudication": a })))
}
