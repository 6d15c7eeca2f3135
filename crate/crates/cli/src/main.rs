use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use trolley_core::checker::{CheckContext, CheckError, Limits, DEFAULT_POOL_CAP, DEFAULT_PROFILE_CAP};
use trolley_core::formula::{parse_coalition, parse_formula, parse_formula_list, parse_sacrifice, FormulaSet};
use trolley_core::fuzz::{
    axiom_soundness_suite, falsification_suite, parse_config, replay, rule_soundness_suite, FuzzConfig,
    FuzzOutcome, SINGLE_COMBINATION, SINGLE_MONOTONICITY,
};
use trolley_core::game::fixtures::DEFAULT_MB_CAP;
use trolley_core::game::{parse_game, Game};
use trolley_core::proof::{check_proof, parse_script};
use trolley_core::rational::parse_rational;

mod claims;

const THREADS_VAR: &str = "TROLLEY_MC_THREADS";

#[derive(Parser)]
#[command(name = "trolley-mc", version, about = "Model checker and proof checker for coalition dilemma logic")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Largest number of complete action profiles a game may have.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_PROFILE_CAP)]
    cap_profiles: u128,
    /// Largest formula pool accepted by `explore`.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_POOL_CAP)]
    cap_pool: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula at a state; prints TRUE or FALSE.
    Check {
        game: PathBuf,
        state: String,
        formula: String,
    },
    /// List the subsets of a pool that form a strict dilemma.
    Explore {
        game: PathBuf,
        state: String,
        /// Comma-separated agents, e.g. `m_a,m_b`.
        coalition: String,
        /// e.g. `m_a:2,m_b:2` or `*:1`.
        sacrifice: String,
        /// Comma-separated formulas.
        pool: String,
    },
    /// Check a proof script line by line.
    Prove { script: PathBuf },
    /// Randomised soundness testing.
    Fuzz(FuzzArgs),
    /// Re-check the worked claims about the village games.
    PaperExamples {
        /// Dose limit for `m_b` in the first village game.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_MB_CAP)]
        mb_cap: u32,
    },
}

#[derive(Args)]
struct FuzzArgs {
    /// JSON configuration file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Search for counterexamples to the single-bracket variants instead.
    #[arg(long)]
    falsify: bool,
    #[arg(long, value_name = "N")]
    games: Option<usize>,
    /// Transition density, e.g. `1/2`.
    #[arg(long, value_name = "Q")]
    density: Option<String>,
    /// Instances per schema and game.
    #[arg(long, value_name = "N")]
    instances: Option<usize>,
}

enum Failure {
    Usage(String),
    Cap(String),
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        if e.is_resource_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<Game, Failure> {
    parse_game(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn verdict(b: bool) -> &'static str {
    if b {
        "TRUE"
    } else {
        "FALSE"
    }
}

struct Run {
    json: bool,
    limits: Limits,
}

impl Run {
    fn check(&self, game: &Path, state: &str, text: &str) -> Result<u8, Failure> {
        let g = load_game(game)?;
        let f = parse_formula(text).map_err(usage)?;
        let mut ctx = CheckContext::new(&g).with_limits(self.limits);
        let w = ctx.state(state)?;
        let value = ctx.satisfies(w, &f)?;
        if self.json {
            println!("{}", json!({ "state": state, "formula": text, "value": value }));
        } else {
            println!("{}", verdict(value));
        }
        Ok(if value { 0 } else { 1 })
    }

    fn explore(&self, game: &Path, state: &str, coalition: &str, sacrifice: &str, pool: &str) -> Result<u8, Failure> {
        let g = load_game(game)?;
        let c = parse_coalition(coalition).map_err(usage)?;
        let s = parse_sacrifice(sacrifice).map_err(usage)?;
        let pool = FormulaSet::new(parse_formula_list(pool).map_err(usage)?);
        let mut ctx = CheckContext::new(&g).with_limits(self.limits);
        let w = ctx.state(state)?;
        let report = ctx.minimal_dilemma_sets(w, &c, &s, &pool)?;
        if self.json {
            println!("{}", report.to_json());
        } else {
            print!("{}", report.to_text());
        }
        Ok(0)
    }

    fn prove(&self, path: &Path) -> Result<u8, Failure> {
        let script = parse_script(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let v = check_proof(&script);
        if self.json {
            let lines: Vec<_> = v
                .lines
                .iter()
                .map(|l| match &l.outcome {
                    Ok(()) => json!({ "line": l.n, "ok": true }),
                    Err(e) => json!({ "line": l.n, "ok": false, "error": e.to_string() }),
                })
                .collect();
            println!("{}", json!({ "accepted": v.accepted(), "lines": lines }));
        } else {
            for l in &v.lines {
                match &l.outcome {
                    Ok(()) => println!("line {}: ok", l.n),
                    Err(e) => println!("line {}: FAIL {e}", l.n),
                }
            }
            match v.first_failure() {
                None => println!("ACCEPTED"),
                Some(l) => println!("REJECTED at line {}", l.n),
            }
        }
        Ok(if v.accepted() { 0 } else { 1 })
    }

    fn fuzz(&self, args: &FuzzArgs) -> Result<u8, Failure> {
        let mut cfg = match &args.config {
            Some(p) => parse_config(&read(p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
            None => FuzzConfig::default(),
        };
        if let Some(s) = args.seed {
            cfg.seed = s;
        }
        if let Some(n) = args.games {
            cfg.num_games = n;
        }
        if let Some(n) = args.instances {
            cfg.instances_per_schema = n;
        }
        if let Some(d) = &args.density {
            cfg.transition_density = parse_rational(d).map_err(|e| Failure::Usage(format!("--density: {e}")))?;
        }
        if self.limits.max_profiles != DEFAULT_PROFILE_CAP {
            cfg.profile_cap = self.limits.max_profiles;
        }
        cfg.validate().map_err(usage)?;

        let outcome = if args.falsify {
            falsification_suite(&cfg)
        } else {
            let mut o = axiom_soundness_suite(&cfg);
            o.merge(rule_soundness_suite(&cfg));
            o
        };
        for r in &outcome.reports {
            println!("{}", r.to_json_line());
        }
        if self.json {
            println!("{}", json!({ "summary": outcome.summary }));
        } else {
            print!("{}", summary_table(&outcome));
        }

        let clean = if args.falsify {
            let found = [SINGLE_COMBINATION, SINGLE_MONOTONICITY]
                .iter()
                .all(|p| outcome.counterexamples(p) > 0);
            let replayed = outcome.reports.iter().all(|r| matches!(replay(r), Ok(true)));
            found && replayed
        } else {
            outcome.reports.is_empty()
        };
        Ok(if clean { 0 } else { 1 })
    }

    fn paper_examples(&self, mb_cap: u32) -> Result<u8, Failure> {
        let rows = claims::evaluate(mb_cap, self.limits)?;
        if self.json {
            println!("{}", claims::to_json(&rows));
        } else {
            print!("{}", claims::to_table(&rows));
        }
        Ok(if rows.iter().all(claims::Row::matches) { 0 } else { 1 })
    }
}

fn summary_table(o: &FuzzOutcome) -> String {
    let mut out = format!(
        "seed {}, {} games\n{:<22} {:>9} {:>11} {:>8} {:>15}\n",
        o.summary.seed, o.summary.games, "PROPERTY", "INSTANCES", "NONVACUOUS", "SKIPPED", "COUNTEREXAMPLES"
    );
    for (name, s) in &o.summary.properties {
        out.push_str(&format!(
            "{:<22} {:>9} {:>11} {:>8} {:>15}\n",
            name, s.instances, s.nonvacuous, s.skipped, s.counterexamples
        ));
    }
    out
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(usage)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let run = Run {
        json: cli.json,
        limits: Limits {
            max_profiles: cli.cap_profiles,
            max_pool: cli.cap_pool,
        },
    };
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Check { game, state, formula } => run.check(game, state, formula),
        Command::Explore {
            game,
            state,
            coalition,
            sacrifice,
            pool,
        } => run.explore(game, state, coalition, sacrifice, pool),
        Command::Prove { script } => run.prove(script),
        Command::Fuzz(args) => run.fuzz(args),
        Command::PaperExamples { mb_cap } => run.paper_examples(*mb_cap),
    });
    eprintln!("elapsed {:.3}s", started.elapsed().as_secs_f64());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(m)) => {
            eprintln!("resource cap: {m}");
            ExitCode::from(3)
        }
    }
}
