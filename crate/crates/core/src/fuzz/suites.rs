use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use super::report::{CounterexampleReport, FuzzOutcome};
use super::sample::Sampler;
use super::{agent_names, random_game_at, stream, FuzzConfig};
use crate::checker::{CheckContext, CheckError, Limits};
use crate::formula::{
    format_coalition, format_formula, format_sacrifice, parse_sacrifice, Coalition, Dilemma, Formula,
    FormulaSet, SacrificeMap,
};
use crate::game::fixtures::{g_fork, g_village1};
use crate::game::{Game, StateId};
use crate::proof::Schema;

pub const SINGLE_COMBINATION: &str = "combination_single";
pub const SINGLE_MONOTONICITY: &str = "monotonicity_single";
pub const NECESSITATION: &str = "necessitation";
pub const SUBSTITUTION: &str = "substitution";

fn strict(c: &Coalition, x: &FormulaSet, s: &SacrificeMap) -> Formula {
    Formula::strict(Dilemma::new(c.clone(), x.clone(), s.clone()).expect("members nonempty"))
}

fn weak(c: &Coalition, x: &FormulaSet, s: &SacrificeMap) -> Formula {
    Formula::weak(Dilemma::new(c.clone(), x.clone(), s.clone()).expect("members nonempty"))
}

fn set_text(x: &FormulaSet) -> String {
    format!("{{{}}}", x.iter().map(format_formula).collect::<Vec<_>>().join(", "))
}

/// An implication checked at every state of a game.
struct Instance {
    property: &'static str,
    formula: Formula,
    /// Held somewhere iff the instance is nonvacuous.
    antecedent: Formula,
    parts: Vec<Formula>,
    inst: BTreeMap<String, String>,
}

fn fields(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn combination(s: &mut Sampler, single: bool) -> Instance {
    let c = s.coalition();
    let sac = s.sacrifice();
    let x = s.members(1, 2);
    let y = if single && s.rng.gen_bool(0.5) {
        x.clone()
    } else {
        s.members(1, 2)
    };
    let (fx, fy) = (strict(&c, &x, &sac), strict(&c, &y, &sac));
    let xy = x.tensor(&y);
    let concl = if single {
        strict(&c, &xy, &sac)
    } else {
        weak(&c, &xy, &sac)
    };
    Instance {
        property: if single { SINGLE_COMBINATION } else { "combination" },
        formula: Formula::implies(fx.clone(), Formula::implies(fy.clone(), concl.clone())),
        antecedent: Formula::and(fx.clone(), fy.clone()),
        parts: vec![fx, fy, concl],
        inst: fields(&[
            ("C", format_coalition(&c)),
            ("X", set_text(&x)),
            ("Y", set_text(&y)),
            ("s", format_sacrifice(&sac)),
        ]),
    }
}

fn monotonicity(s: &mut Sampler, single: bool) -> Instance {
    let c = s.coalition();
    let d = s.superset(&c);
    let low = s.sacrifice();
    let high = s.raise(&low);
    let x = s.members(1, 3);
    let lhs = strict(&c, &x, &high);
    let rhs = if single {
        strict(&d, &x, &low)
    } else {
        weak(&d, &x, &low)
    };
    Instance {
        property: if single { SINGLE_MONOTONICITY } else { "monotonicity" },
        formula: Formula::implies(lhs.clone(), rhs.clone()),
        antecedent: lhs.clone(),
        parts: vec![lhs, rhs],
        inst: fields(&[
            ("C", format_coalition(&c)),
            ("D", format_coalition(&d)),
            ("X", set_text(&x)),
            ("s", format_sacrifice(&low)),
            ("s'", format_sacrifice(&high)),
        ]),
    }
}

/// Half of the time `X` is taken from the strict dilemmas found among the
/// literals at a random state, since random sets rarely are one.
fn minimality(run: &mut GameRun<'_>, s: &mut Sampler) -> Option<Instance> {
    let mut c = s.coalition();
    let mut sac = s.sacrifice();
    let mut x = s.members(2, 3);
    if s.rng.gen_bool(0.5) {
        let pool = s.literals();
        for _ in 0..8 {
            let (c2, sac2) = (s.coalition(), s.sacrifice());
            let w = s.rng.gen_range(0..run.game.states().len());
            let Ok(r) = run.ctx.minimal_dilemma_sets(w, &c2, &sac2, &pool) else {
                break;
            };
            let found: Vec<&FormulaSet> = r.minimal_sets.iter().filter(|m| m.len() >= 2).collect();
            if !found.is_empty() {
                x = found[s.rng.gen_range(0..found.len())].clone();
                (c, sac) = (c2, sac2);
                break;
            }
        }
    }
    if x.len() < 2 {
        return None;
    }
    let mask = s.rng.gen_range(1..(1u64 << x.len()) - 1);
    let y = x.select_mask(mask);
    let (fx, fy) = (strict(&c, &x, &sac), strict(&c, &y, &sac));
    Some(Instance {
        property: "minimality",
        formula: Formula::implies(fx.clone(), Formula::not(fy.clone())),
        antecedent: fx.clone(),
        parts: vec![fx, fy],
        inst: fields(&[
            ("C", format_coalition(&c)),
            ("X", set_text(&x)),
            ("Y", set_text(&y)),
            ("s", format_sacrifice(&sac)),
        ]),
    })
}

fn no_alternatives(s: &mut Sampler) -> Instance {
    let c = s.coalition();
    let d = s.coalition();
    let sac = s.sacrifice();
    let x = s.members(1, 1);
    let (fc, fd) = (strict(&c, &x, &sac), strict(&d, &x, &sac));
    Instance {
        property: "noalt",
        formula: Formula::implies(fc.clone(), fd.clone()),
        antecedent: fc.clone(),
        parts: vec![fc, fd],
        inst: fields(&[
            ("C", format_coalition(&c)),
            ("D", format_coalition(&d)),
            ("X", set_text(&x)),
            ("s", format_sacrifice(&sac)),
        ]),
    }
}

struct GameRun<'g> {
    seed: u64,
    index: u64,
    game: &'g Game,
    ctx: CheckContext<'g>,
    out: FuzzOutcome,
}

impl GameRun<'_> {
    /// First state where the instance is false, and whether its antecedent
    /// held anywhere.
    fn scan(&mut self, f: &Formula, antecedent: &Formula) -> Result<(bool, Option<StateId>), CheckError> {
        let mut nonvacuous = false;
        for w in 0..self.game.states().len() {
            nonvacuous |= self.ctx.satisfies(w, antecedent)?;
            if !self.ctx.satisfies(w, f)? {
                return Ok((true, Some(w)));
            }
        }
        Ok((nonvacuous, None))
    }

    fn run(&mut self, inst: Instance) {
        let result = self.scan(&inst.formula, &inst.antecedent);
        self.record(inst, result);
    }

    fn record(&mut self, inst: Instance, result: Result<(bool, Option<StateId>), CheckError>) {
        let stats = self.out.stats(inst.property);
        stats.instances += 1;
        let (nonvacuous, failing) = match result {
            Ok(r) => r,
            Err(_) => {
                stats.skipped += 1;
                return;
            }
        };
        stats.nonvacuous += u64::from(nonvacuous);
        if let Some(w) = failing {
            stats.counterexamples += 1;
            let report = CounterexampleReport::build(
                inst.property,
                "search",
                self.seed,
                Some(self.index),
                self.game,
                &mut self.ctx,
                w,
                inst.inst,
                &inst.formula,
                &inst.parts,
            )
            .expect("instance already evaluated at this state");
            self.out.reports.push(report);
        }
    }
}

fn profile_space(cfg: &FuzzConfig) -> u128 {
    (0..cfg.num_agents).fold(1u128, |acc, _| acc.saturating_mul(cfg.actions_per_agent as u128))
}

fn over_games<F>(cfg: &FuzzConfig, skipped_properties: &[&str], per_game: F) -> FuzzOutcome
where
    F: Fn(&mut GameRun<'_>, &mut Sampler) + Sync,
{
    let agents = agent_names(cfg.num_agents);
    let oversized = profile_space(cfg) > cfg.profile_cap;
    let parts: Vec<FuzzOutcome> = (0..cfg.num_games as u64)
        .into_par_iter()
        .map(|i| {
            if oversized {
                let mut out = FuzzOutcome::default();
                for p in skipped_properties {
                    let s = out.stats(p);
                    s.instances += cfg.instances_per_schema as u64;
                    s.skipped += cfg.instances_per_schema as u64;
                }
                return out;
            }
            let game = random_game_at(cfg, i);
            let mut sampler = Sampler::new(cfg, &agents, stream(cfg.seed, 2 * i + 1));
            let mut run = GameRun {
                seed: cfg.seed,
                index: i,
                game: &game,
                ctx: CheckContext::new(&game).with_limits(Limits {
                    max_profiles: cfg.profile_cap,
                    ..Limits::default()
                }),
                out: FuzzOutcome::default(),
            };
            per_game(&mut run, &mut sampler);
            run.out
        })
        .collect();
    let mut out = FuzzOutcome::default();
    for p in parts {
        out.merge(p);
    }
    out.summary.seed = cfg.seed;
    out.summary.games = cfg.num_games as u64;
    out
}

/// Instances of the four axiom schemas, evaluated at every state.
pub fn axiom_soundness_suite(cfg: &FuzzConfig) -> FuzzOutcome {
    let names: Vec<&str> = Schema::ALL.iter().map(|s| s.name()).collect();
    over_games(cfg, &names, |run, s| {
        for schema in Schema::ALL {
            for _ in 0..cfg.instances_per_schema {
                let inst = match schema {
                    Schema::Combination => Some(combination(s, false)),
                    Schema::Monotonicity => Some(monotonicity(s, false)),
                    Schema::Minimality => minimality(run, s),
                    Schema::NoAlternatives => Some(no_alternatives(s)),
                };
                match inst {
                    Some(i) => run.run(i),
                    None => {
                        let st = run.out.stats(schema.name());
                        st.instances += 1;
                        st.skipped += 1;
                    }
                }
            }
        }
    })
}

fn search_single_variants(cfg: &FuzzConfig) -> FuzzOutcome {
    over_games(cfg, &[SINGLE_COMBINATION, SINGLE_MONOTONICITY], |run, s| {
        for _ in 0..cfg.instances_per_schema {
            run.run(combination(s, true));
        }
        for _ in 0..cfg.instances_per_schema {
            run.run(monotonicity(s, true));
        }
    })
}

fn construction(
    property: &str,
    origin: &str,
    game: &Game,
    state: &str,
    inst: BTreeMap<String, String>,
    formula: Formula,
    parts: Vec<Formula>,
) -> FuzzOutcome {
    let mut out = FuzzOutcome::default();
    let mut ctx = CheckContext::new(game);
    let w = game.state_id(state).expect("fixture state");
    let stats = out.stats(property);
    stats.instances += 1;
    let holds = ctx.satisfies(w, &formula).expect("fixture formulas evaluate");
    if !holds {
        out.stats(property).nonvacuous += 1;
        out.stats(property).counterexamples += 1;
        out.reports.push(
            CounterexampleReport::build(property, origin, 0, None, game, &mut ctx, w, inst, &formula, &parts)
                .expect("fixture formulas evaluate"),
        );
    }
    out
}

/// The two fixed counterexamples to the single-bracket variants: on the fork
/// game with `X = Y = {p, q}`, and on the first village game when `m_b` joins
/// the coalition.
pub fn fixture_counterexamples() -> FuzzOutcome {
    let fork = g_fork();
    let c = Coalition::new(["a"]).expect("nonempty");
    let s = parse_sacrifice("a:1").expect("literal");
    let x = FormulaSet::new([Formula::prop("p"), Formula::prop("q")]);
    let fx = strict(&c, &x, &s);
    let concl = strict(&c, &x.tensor(&x), &s);
    let mut out = construction(
        SINGLE_COMBINATION,
        "fork-construction",
        &fork,
        "w",
        fields(&[
            ("C", format_coalition(&c)),
            ("X", set_text(&x)),
            ("Y", set_text(&x)),
            ("s", format_sacrifice(&s)),
        ]),
        Formula::implies(fx.clone(), Formula::implies(fx.clone(), concl.clone())),
        vec![fx, concl],
    );

    let village = g_village1();
    let c = Coalition::new(["m_a"]).expect("nonempty");
    let d = Coalition::new(["m_a", "m_b"]).expect("nonempty");
    let s = parse_sacrifice("m_a:2, m_b:1").expect("literal");
    let x = FormulaSet::new(["d1", "d2", "d3"].map(Formula::prop));
    let (lhs, rhs) = (strict(&c, &x, &s), strict(&d, &x, &s));
    let y = FormulaSet::new(["d2", "d3"].map(Formula::prop));
    out.merge(construction(
        SINGLE_MONOTONICITY,
        "village-construction",
        &village,
        "init",
        fields(&[
            ("C", format_coalition(&c)),
            ("D", format_coalition(&d)),
            ("X", set_text(&x)),
            ("s", format_sacrifice(&s)),
            ("s'", format_sacrifice(&s)),
        ]),
        Formula::implies(lhs.clone(), rhs.clone()),
        vec![lhs, rhs, strict(&d, &y, &s)],
    ));
    out
}

/// Random search for counterexamples to the single-bracket variants of
/// Combination and Monotonicity, plus the two fixed constructions.
pub fn falsification_suite(cfg: &FuzzConfig) -> FuzzOutcome {
    let mut out = search_single_variants(cfg);
    out.merge(fixture_counterexamples());
    out
}

/// Per-game Necessitation and Substitution: when the premises are valid in
/// the game, so is the conclusion.
pub fn rule_soundness_suite(cfg: &FuzzConfig) -> FuzzOutcome {
    over_games(cfg, &[NECESSITATION, SUBSTITUTION], |run, s| {
        for _ in 0..cfg.instances_per_schema {
            let phi = s.candidate_theorem();
            let c = s.coalition();
            let sac = s.sacrifice();
            let concl = strict(&c, &FormulaSet::new([phi.clone()]), &sac);
            let result = run.ctx.valid(&phi).and_then(|valid| {
                if !valid {
                    return Ok((false, None));
                }
                Ok((true, first_false(run, &concl)?))
            });
            run.record(
                Instance {
                    property: NECESSITATION,
                    formula: concl.clone(),
                    antecedent: phi.clone(),
                    parts: vec![phi.clone()],
                    inst: fields(&[
                        ("C", format_coalition(&c)),
                        ("phi", format_formula(&phi)),
                        ("s", format_sacrifice(&sac)),
                    ]),
                },
                result,
            );
        }
        for _ in 0..cfg.instances_per_schema {
            let c = s.coalition();
            let sac = s.sacrifice();
            let x = s.members(1, 3);
            let map: Vec<(Formula, Formula)> = x.iter().map(|f| (f.clone(), s.image(f))).collect();
            let image = FormulaSet::new(map.iter().map(|(_, t)| t.clone()));
            let premises: Vec<Formula> = map
                .iter()
                .map(|(f, t)| Formula::implies(f.clone(), t.clone()))
                .collect();
            let concl = Formula::implies(strict(&c, &x, &sac), weak(&c, &image, &sac));
            let result = (|| {
                for p in &premises {
                    if !run.ctx.valid(p)? {
                        return Ok((false, None));
                    }
                }
                Ok((true, first_false(run, &concl)?))
            })();
            let tau = map
                .iter()
                .map(|(f, t)| format!("{} |-> {}", format_formula(f), format_formula(t)))
                .collect::<Vec<_>>()
                .join("; ");
            run.record(
                Instance {
                    property: SUBSTITUTION,
                    formula: concl,
                    antecedent: Formula::conjunction(premises.clone()),
                    parts: premises,
                    inst: fields(&[
                        ("C", format_coalition(&c)),
                        ("X", set_text(&x)),
                        ("s", format_sacrifice(&sac)),
                        ("tau", tau),
                    ]),
                },
                result,
            );
        }
    })
}

fn first_false(run: &mut GameRun<'_>, f: &Formula) -> Result<Option<StateId>, CheckError> {
    for w in 0..run.game.states().len() {
        if !run.ctx.satisfies(w, f)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzz::replay;

    fn quick() -> FuzzConfig {
        FuzzConfig {
            num_games: 6,
            instances_per_schema: 8,
            ..FuzzConfig::default()
        }
    }

    #[test]
    fn axioms_hold_on_a_few_games() {
        let out = axiom_soundness_suite(&quick());
        assert!(out.reports.is_empty(), "{:?}", out.reports.first());
        for schema in Schema::ALL {
            assert_eq!(out.summary.properties[schema.name()].instances, 48);
        }
    }

    #[test]
    fn rules_hold_on_a_few_games() {
        let out = rule_soundness_suite(&quick());
        assert!(out.reports.is_empty(), "{:?}", out.reports.first());
        assert!(out.summary.properties[NECESSITATION].nonvacuous > 0);
        assert!(out.summary.properties[SUBSTITUTION].nonvacuous > 0);
    }

    #[test]
    fn constructions_are_counterexamples_and_replay() {
        let out = fixture_counterexamples();
        assert_eq!(out.counterexamples(SINGLE_COMBINATION), 1);
        assert_eq!(out.counterexamples(SINGLE_MONOTONICITY), 1);
        for r in &out.reports {
            assert!(replay(r).unwrap(), "{}", r.to_json_line());
        }
        let mono = &out.reports[1];
        assert_eq!(
            mono.observed.iter().map(|o| o.value).collect::<Vec<_>>(),
            vec![false, true, false, true]
        );
    }

    #[test]
    fn deterministic_and_replayable() {
        let cfg = quick();
        let a = falsification_suite(&cfg);
        let b = falsification_suite(&cfg);
        assert_eq!(a, b);
        for r in &a.reports {
            assert!(replay(r).unwrap());
        }
    }

    #[test]
    fn oversized_games_are_skipped_not_dropped() {
        let cfg = FuzzConfig {
            num_games: 2,
            instances_per_schema: 3,
            profile_cap: 3,
            ..FuzzConfig::default()
        };
        let out = axiom_soundness_suite(&cfg);
        let st = &out.summary.properties["combination"];
        assert_eq!((st.instances, st.skipped), (6, 6));
    }
}
