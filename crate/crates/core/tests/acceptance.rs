//! Acceptance suite. Runs every criterion in order and prints one PASS/FAIL
//! line each; the test fails if any criterion fails.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trolley_core::checker::literal::{holds_strict_literal, holds_weak_literal};
use trolley_core::checker::{holds_strict, satisfies, CheckContext};
use trolley_core::formula::{
    nonempty_subsets, normalize, parse_formula, Coalition, Dilemma, Formula, FormulaSet, SacrificeMap,
};
use trolley_core::fuzz::{
    axiom_soundness_suite, falsification_suite, fixture_counterexamples, formula_pool, random_game_at, replay,
    rule_soundness_suite, FuzzConfig,
};
use trolley_core::game::fixtures::{g_village1, g_village2};
use trolley_core::game::{Game, StateId};
use trolley_core::proof::corpus::{LEMMAS, MUTATIONS};
use trolley_core::proof::{check_proof, parse_script, Schema};
use trolley_core::rational::{ratio, Rational};

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, name: &str, o: &Outcome, t: Duration) {
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    // written directly so the line shows up without --nocapture
    let mut out = std::io::stdout().lock();
    writeln!(out, "criterion {n} [{verdict}] {name}: {} ({:.2}s)", o.detail, t.as_secs_f64()).unwrap();
}

fn claims(game: &Game, cases: &[(&str, bool)]) -> Outcome {
    let init = game.state_id("init").unwrap();
    let mut wrong = Vec::new();
    for (text, expected) in cases {
        let got = satisfies(game, init, &parse_formula(text).unwrap()).unwrap();
        if got != *expected {
            wrong.push(format!("{text} gave {got}"));
        }
    }
    Outcome {
        pass: wrong.is_empty(),
        detail: if wrong.is_empty() {
            format!("{} claims match", cases.len())
        } else {
            wrong.join("; ")
        },
    }
}

fn village_claims() -> Outcome {
    let mut a = claims(
        &g_village1(),
        &[
            ("[m_a : d1, d2, d3 @ m_a:2, m_b:2]", true),
            ("[m_b : d2, d3, d4 @ m_a:2, m_b:2]", false),
            ("[m_b : d2, d3 | d4 @ m_a:2, m_b:2]", true),
            ("[m_b : d2, d3 & d4 @ m_a:2, m_b:1]", true),
        ],
    );
    let b = claims(
        &g_village2(),
        &[
            ("[m_a : d1, d2, d3, d4 @ m_a:2, m_pa:1]", false),
            ("[m_pa : d1, d2, d3, d4 @ m_a:2, m_pa:1]", false),
            ("[m_a, m_pa : d1, d2, d3, d4 @ m_a:2, m_pa:1]", true),
        ],
    );
    a.pass &= b.pass;
    a.detail = format!("first game: {}; second game: {}", a.detail, b.detail);
    a
}

fn non_monotonicity() -> Outcome {
    claims(
        &g_village1(),
        &[
            ("[m_a : d1, d2, d3 @ m_a:2, m_b:1]", true),
            ("[m_a, m_b : d1, d2, d3 @ m_a:2, m_b:1]", false),
            ("[m_a, m_b : d2, d3 @ m_a:2, m_b:1]", true),
        ],
    )
}

struct Instance {
    game: usize,
    state: StateId,
    coalition: Coalition,
    members: FormulaSet,
    sacrifice: SacrificeMap,
}

/// Small random games (at most 4 states, 2 agents, 3 actions) with dilemma
/// instances of at most three members drawn from each game's pool.
fn small_instances(target: usize) -> (Vec<Game>, Vec<Instance>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let densities = [ratio(0, 1), ratio(1, 3), ratio(1, 2), ratio(2, 3), ratio(1, 1)];
    let bounds: Vec<Rational> = (-3..=5).map(|k| ratio(k, 2)).collect();
    let mut games = Vec::new();
    let mut out = Vec::new();
    let mut seed = 1000;
    while out.len() < target {
        seed += 1;
        let cfg = FuzzConfig {
            seed,
            num_games: 1,
            num_states: rng.gen_range(1..=4),
            num_agents: rng.gen_range(1..=2),
            actions_per_agent: rng.gen_range(1..=3),
            transition_density: densities.choose(&mut rng).unwrap().clone(),
            num_props: rng.gen_range(1..=3),
            pool_size: 6,
            ..FuzzConfig::default()
        };
        let game = random_game_at(&cfg, 0);
        let pool = formula_pool(&cfg, 0);
        let gi = games.len();
        for _ in 0..20 {
            let agents = game.agents().to_vec();
            let mask = rng.gen_range(1..1u32 << agents.len());
            let coalition =
                Coalition::new((0..agents.len()).filter(|i| mask >> i & 1 == 1).map(|i| agents[i].clone())).unwrap();
            let sacrifice = SacrificeMap::new(
                agents.iter().map(|a| (a.clone(), bounds.choose(&mut rng).unwrap().clone())).collect(),
                None,
            );
            let k = rng.gen_range(1..=3);
            let members = FormulaSet::new(pool.choose_multiple(&mut rng, k).cloned());
            out.push(Instance {
                game: gi,
                state: rng.gen_range(0..game.states().len()),
                coalition,
                members,
                sacrifice,
            });
        }
        games.push(game);
    }
    (games, out)
}

fn oracle_equivalence(games: &[Game], insts: &[Instance]) -> Outcome {
    let mut disagreements = 0;
    for i in insts {
        let g = &games[i.game];
        let fast = holds_strict(g, i.state, &i.coalition, &i.members, &i.sacrifice).unwrap();
        let slow = holds_strict_literal(g, i.state, &i.coalition, &i.members, &i.sacrifice).unwrap();
        disagreements += usize::from(fast != slow);
    }
    let trues = insts
        .iter()
        .filter(|i| holds_strict(&games[i.game], i.state, &i.coalition, &i.members, &i.sacrifice).unwrap())
        .count();
    Outcome {
        pass: insts.len() >= 2000 && disagreements == 0,
        detail: format!(
            "{} instances over {} games, {trues} true, {disagreements} disagreements",
            insts.len(),
            games.len()
        ),
    }
}

fn decomposition(games: &[Game], insts: &[Instance]) -> Outcome {
    let mut violations = 0;
    for i in insts {
        let g = &games[i.game];
        let weak = |x: &FormulaSet| holds_weak_literal(g, i.state, &i.coalition, x, &i.sacrifice).unwrap();
        let n = i.members.len();
        let no_smaller = nonempty_subsets(n)
            .into_iter()
            .filter(|y| y.len() < n)
            .all(|y| !weak(&i.members.select(&y)));
        let expected = weak(&i.members) && no_smaller;
        let got = holds_strict(g, i.state, &i.coalition, &i.members, &i.sacrifice).unwrap();
        violations += usize::from(expected != got);
    }
    Outcome {
        pass: violations == 0,
        detail: format!("{} instances, {violations} violations", insts.len()),
    }
}

fn expansion_agreement(games: &[Game], insts: &[Instance]) -> Outcome {
    let mut disagreements = 0;
    for i in insts {
        let g = &games[i.game];
        let d = Dilemma::new(i.coalition.clone(), i.members.clone(), i.sacrifice.clone()).unwrap();
        let weak = Formula::weak(d);
        let expanded = normalize(&weak).unwrap();
        let mut ctx = CheckContext::without_memo(g);
        disagreements += usize::from(ctx.satisfies(i.state, &weak).unwrap() != ctx.satisfies(i.state, &expanded).unwrap());
    }
    Outcome {
        pass: insts.len() >= 1000 && disagreements == 0,
        detail: format!("{} instances, {disagreements} disagreements", insts.len()),
    }
}

fn soundness_fuzz() -> Outcome {
    let cfg = FuzzConfig::default();
    let mut out = axiom_soundness_suite(&cfg);
    out.merge(rule_soundness_suite(&cfg));
    let mut parts = Vec::new();
    let mut pass = cfg.num_games >= 50 && cfg.instances_per_schema >= 20 && out.reports.is_empty();
    for (name, st) in &out.summary.properties {
        parts.push(format!(
            "{name} {}/{} nonvacuous, {} skipped, {} counterexamples",
            st.nonvacuous, st.instances, st.skipped, st.counterexamples
        ));
        pass &= st.skipped == 0;
    }
    for schema in Schema::ALL {
        let st = &out.summary.properties[schema.name()];
        pass &= st.instances >= 50 * 20;
    }
    Outcome {
        pass,
        detail: format!("{} games; {}", cfg.num_games, parts.join("; ")),
    }
}

fn falsification() -> Outcome {
    let cfg = FuzzConfig::default();
    let out = falsification_suite(&cfg);
    let fixtures = fixture_counterexamples();
    let fixed_ok = fixtures.reports.len() == 2 && fixtures.reports.iter().all(|r| replay(r).unwrap());
    let searched = |p: &str| out.reports.iter().filter(|r| r.property == p && r.origin == "search").count();
    let (c, m) = (searched("combination_single"), searched("monotonicity_single"));
    let all_replay = out.reports.iter().all(|r| replay(r).unwrap());
    Outcome {
        pass: fixed_ok
            && all_replay
            && out.counterexamples("combination_single") >= 1
            && out.counterexamples("monotonicity_single") >= 1,
        detail: format!(
            "constructions verified: {fixed_ok}; random search found {c} for combination and {m} for monotonicity"
        ),
    }
}

fn proof_corpus() -> Outcome {
    let mut bad = Vec::new();
    for (name, text) in LEMMAS {
        if !check_proof(&parse_script(text).unwrap()).accepted() {
            bad.push(format!("{name} rejected"));
        }
    }
    for (name, text, line) in MUTATIONS {
        let v = check_proof(&parse_script(text).unwrap());
        if v.first_failure().map(|l| l.n) != Some(*line) {
            bad.push(format!("{name} not rejected at line {line}"));
        }
    }
    // every single-line negation of every lemma fails at that line
    let mut sweeps = 0;
    for (name, text) in LEMMAS {
        let script = parse_script(text).unwrap();
        for k in 0..script.lines.len() {
            let mut m = script.clone();
            m.lines[k].formula = Formula::not(m.lines[k].formula.clone());
            sweeps += 1;
            if check_proof(&m).first_failure().map(|l| l.n) != Some(script.lines[k].n) {
                bad.push(format!("{name} line {} negated", script.lines[k].n));
            }
        }
    }
    Outcome {
        pass: bad.is_empty() && LEMMAS.len() >= 12,
        detail: if bad.is_empty() {
            format!(
                "{} scripts accepted, {} mutation fixtures and {sweeps} negation mutants rejected at the right line",
                LEMMAS.len(),
                MUTATIONS.len()
            )
        } else {
            bad.join("; ")
        },
    }
}

#[test]
fn acceptance() {
    let mut all = true;
    let mut run = |n: usize, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut o = f();
        let t = start.elapsed();
        if let Some(limit) = limit {
            if t > limit {
                o.pass = false;
                o.detail.push_str(&format!("; over the {}s budget", limit.as_secs()));
            }
        }
        report(n, name, &o, t);
        all &= o.pass;
    };
    run(1, "village claims", None, &mut village_claims);
    run(2, "coalition non-monotonicity", None, &mut non_monotonicity);

    let start = Instant::now();
    let (games, insts) = small_instances(2000);
    let setup = start.elapsed();
    run(3, "strict evaluation vs literal oracle", Some(Duration::from_secs(60) - setup), &mut || {
        oracle_equivalence(&games, &insts)
    });
    run(4, "strict = weak and no weak proper subset", None, &mut || decomposition(&games, &insts));
    run(5, "weak dilemma vs its expansion", None, &mut || expansion_agreement(&games, &insts));
    run(6, "axiom and rule soundness fuzz", Some(Duration::from_secs(300)), &mut soundness_fuzz);
    run(7, "single-bracket variants falsified", None, &mut falsification);
    run(8, "proof corpus and mutations", None, &mut proof_corpus);
    assert!(all, "some acceptance criteria failed");
}
