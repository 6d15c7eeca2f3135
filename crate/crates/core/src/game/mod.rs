//! Finite games: states, per-agent actions with state-dependent costs, a
//! nondeterministic mechanism and a valuation of propositional variables.

pub mod fixtures;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Coalition;
use crate::rational::{format_rational, parse_rational, Rational};

pub type StateId = usize;

/// On-disk JSON shape of a game. Rationals are strings (`"n"` or `"n/d"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub agents: Vec<String>,
    pub states: Vec<String>,
    pub actions: BTreeMap<String, Vec<String>>,
    pub costs: CostTable,
    pub mechanism: Vec<TransitionEntry>,
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostTable {
    pub default: String,
    #[serde(default)]
    pub entries: Vec<CostEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostEntry {
    pub state: String,
    pub agent: String,
    pub action: String,
    pub cost: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub from: String,
    pub profile: BTreeMap<String, String>,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("game has no states")]
    NoStates,
    #[error("game has no agents")]
    NoAgents,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate agent `{0}`")]
    DuplicateAgent(String),
    #[error("agent `{0}` has no action list")]
    MissingActions(String),
    #[error("agent `{0}` has an empty action list")]
    EmptyActions(String),
    #[error("agent `{agent}` lists action `{action}` twice")]
    DuplicateAction { agent: String, action: String },
    #[error("{context}: unknown agent `{agent}`")]
    UnknownAgent { context: String, agent: String },
    #[error("{context}: unknown state `{state}`")]
    UnknownState { context: String, state: String },
    #[error("{context}: agent `{agent}` has no action `{action}`")]
    UnknownAction {
        context: String,
        agent: String,
        action: String,
    },
    #[error("{context}: malformed rational `{text}`")]
    MalformedRational { context: String, text: String },
    #[error("cost for ({state}, {agent}, {action}) given twice")]
    DuplicateCost {
        state: String,
        agent: String,
        action: String,
    },
    #[error("{context}: profile does not choose an action for agent `{agent}`")]
    PartialProfile { context: String, agent: String },
    #[error("strategy for coalition {coalition} does not cover agent `{agent}`")]
    StrategyMissingAgent { coalition: String, agent: String },
    #[error("strategy for coalition {coalition} assigns agent `{agent}` outside the coalition")]
    StrategyExtraAgent { coalition: String, agent: String },
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("invalid game JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid game: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Checks every structural invariant of a game file. Empty iff valid.
pub fn validate(file: &GameFile) -> Vec<Violation> {
    let mut out = Vec::new();
    if file.states.is_empty() {
        out.push(Violation::NoStates);
    }
    if file.agents.is_empty() {
        out.push(Violation::NoAgents);
    }
    let mut states = BTreeSet::new();
    for s in &file.states {
        if !states.insert(s.as_str()) {
            out.push(Violation::DuplicateState(s.clone()));
        }
    }
    let mut agents = BTreeSet::new();
    for a in &file.agents {
        if !agents.insert(a.as_str()) {
            out.push(Violation::DuplicateAgent(a.clone()));
        }
    }
    for a in &file.agents {
        match file.actions.get(a) {
            None => out.push(Violation::MissingActions(a.clone())),
            Some(list) if list.is_empty() => out.push(Violation::EmptyActions(a.clone())),
            Some(list) => {
                let mut seen = BTreeSet::new();
                for x in list {
                    if !seen.insert(x) {
                        out.push(Violation::DuplicateAction {
                            agent: a.clone(),
                            action: x.clone(),
                        });
                    }
                }
            }
        }
    }
    for a in file.actions.keys() {
        if !agents.contains(a.as_str()) {
            out.push(Violation::UnknownAgent {
                context: "actions".into(),
                agent: a.clone(),
            });
        }
    }
    let has_action = |agent: &str, action: &str| {
        file.actions
            .get(agent)
            .is_some_and(|l| l.iter().any(|x| x == action))
    };

    if parse_rational(&file.costs.default).is_err() {
        out.push(Violation::MalformedRational {
            context: "costs.default".into(),
            text: file.costs.default.clone(),
        });
    }
    let mut cost_keys = BTreeSet::new();
    for (i, e) in file.costs.entries.iter().enumerate() {
        let context = format!("costs.entries[{i}]");
        if !states.contains(e.state.as_str()) {
            out.push(Violation::UnknownState {
                context: context.clone(),
                state: e.state.clone(),
            });
        }
        if !agents.contains(e.agent.as_str()) {
            out.push(Violation::UnknownAgent {
                context: context.clone(),
                agent: e.agent.clone(),
            });
        } else if !has_action(&e.agent, &e.action) {
            out.push(Violation::UnknownAction {
                context: context.clone(),
                agent: e.agent.clone(),
                action: e.action.clone(),
            });
        }
        if parse_rational(&e.cost).is_err() {
            out.push(Violation::MalformedRational {
                context,
                text: e.cost.clone(),
            });
        }
        if !cost_keys.insert((&e.state, &e.agent, &e.action)) {
            out.push(Violation::DuplicateCost {
                state: e.state.clone(),
                agent: e.agent.clone(),
                action: e.action.clone(),
            });
        }
    }

    for (i, t) in file.mechanism.iter().enumerate() {
        let context = format!("mechanism[{i}]");
        for s in [&t.from, &t.to] {
            if !states.contains(s.as_str()) {
                out.push(Violation::UnknownState {
                    context: context.clone(),
                    state: s.clone(),
                });
            }
        }
        for a in &file.agents {
            if !t.profile.contains_key(a) {
                out.push(Violation::PartialProfile {
                    context: context.clone(),
                    agent: a.clone(),
                });
            }
        }
        for (a, x) in &t.profile {
            if !agents.contains(a.as_str()) {
                out.push(Violation::UnknownAgent {
                    context: context.clone(),
                    agent: a.clone(),
                });
            } else if !has_action(a, x) {
                out.push(Violation::UnknownAction {
                    context: context.clone(),
                    agent: a.clone(),
                    action: x.clone(),
                });
            }
        }
    }

    for (p, list) in &file.valuation {
        for s in list {
            if !states.contains(s.as_str()) {
                out.push(Violation::UnknownState {
                    context: format!("valuation[{p}]"),
                    state: s.clone(),
                });
            }
        }
    }
    out
}

/// Transitions leaving one state under one complete profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub profile: ActionProfile,
    pub successors: Vec<StateId>,
}

/// Total assignment of an action index to every agent index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionProfile {
    pub choice: Vec<usize>,
}

/// Actions chosen by the agents of one coalition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub coalition: Coalition,
    /// (agent index, action index), sorted by agent index.
    pub choice: Vec<(usize, usize)>,
}

/// True iff the profile picks the strategy's action for every coalition agent.
pub fn agrees(t: &Strategy, d: &ActionProfile) -> bool {
    t.choice.iter().all(|&(a, x)| d.choice[a] == x)
}

/// A validated, indexed game.
#[derive(Debug, Clone)]
pub struct Game {
    states: Vec<String>,
    state_ix: HashMap<String, StateId>,
    agents: Vec<String>,
    agent_ix: HashMap<String, usize>,
    actions: Vec<Vec<String>>,
    action_ix: Vec<HashMap<String, usize>>,
    default_cost: Rational,
    cost_overrides: BTreeMap<(StateId, usize, usize), Rational>,
    outgoing: Vec<Vec<Outcome>>,
    outcome_ix: HashMap<(StateId, ActionProfile), usize>,
    valuation: BTreeMap<String, Vec<bool>>,
}

impl PartialEq for Game {
    fn eq(&self, other: &Self) -> bool {
        self.to_file() == other.to_file()
    }
}

impl Eq for Game {}

pub fn parse_game(text: &str) -> Result<Game, GameError> {
    let file: GameFile = serde_json::from_str(text)?;
    Game::from_file(&file)
}

pub fn serialize_game(g: &Game) -> String {
    serde_json::to_string_pretty(&g.to_file()).expect("game files always serialize")
}

impl Game {
    pub fn from_file(file: &GameFile) -> Result<Game, GameError> {
        let violations = validate(file);
        if !violations.is_empty() {
            return Err(GameError::Invalid(violations));
        }
        let index = |names: &[String]| -> HashMap<String, usize> {
            names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect()
        };
        let states = file.states.clone();
        let state_ix = index(&states);
        let agents = file.agents.clone();
        let agent_ix = index(&agents);
        let actions: Vec<Vec<String>> = agents.iter().map(|a| file.actions[a].clone()).collect();
        let action_ix: Vec<HashMap<String, usize>> = actions.iter().map(|l| index(l)).collect();

        let default_cost = parse_rational(&file.costs.default).expect("validated");
        let cost_overrides = file
            .costs
            .entries
            .iter()
            .map(|e| {
                let a = agent_ix[&e.agent];
                (
                    (state_ix[&e.state], a, action_ix[a][&e.action]),
                    parse_rational(&e.cost).expect("validated"),
                )
            })
            .collect();

        let mut grouped: BTreeMap<(StateId, ActionProfile), BTreeSet<StateId>> = BTreeMap::new();
        for t in &file.mechanism {
            let profile = ActionProfile {
                choice: agents
                    .iter()
                    .enumerate()
                    .map(|(i, a)| action_ix[i][&t.profile[a]])
                    .collect(),
            };
            grouped
                .entry((state_ix[&t.from], profile))
                .or_default()
                .insert(state_ix[&t.to]);
        }
        let mut outgoing = vec![Vec::new(); states.len()];
        let mut outcome_ix = HashMap::new();
        for ((w, profile), succ) in grouped {
            outcome_ix.insert((w, profile.clone()), outgoing[w].len());
            outgoing[w].push(Outcome {
                profile,
                successors: succ.into_iter().collect(),
            });
        }

        let valuation = file
            .valuation
            .iter()
            .map(|(p, list)| {
                let mut v = vec![false; states.len()];
                for s in list {
                    v[state_ix[s]] = true;
                }
                (p.clone(), v)
            })
            .collect();

        Ok(Game {
            states,
            state_ix,
            agents,
            agent_ix,
            actions,
            action_ix,
            default_cost,
            cost_overrides,
            outgoing,
            outcome_ix,
            valuation,
        })
    }

    /// Canonical file form: declared orders kept, transitions grouped by
    /// state then profile, duplicate transitions and costs equal to the
    /// default dropped.
    pub fn to_file(&self) -> GameFile {
        let entries = self
            .cost_overrides
            .iter()
            .filter(|(_, c)| **c != self.default_cost)
            .map(|(&(w, a, x), c)| CostEntry {
                state: self.states[w].clone(),
                agent: self.agents[a].clone(),
                action: self.actions[a][x].clone(),
                cost: format_rational(c),
            })
            .collect();
        let mut mechanism = Vec::new();
        for (w, outs) in self.outgoing.iter().enumerate() {
            for o in outs {
                let profile: BTreeMap<String, String> = self.profile_names(&o.profile);
                for &u in &o.successors {
                    mechanism.push(TransitionEntry {
                        from: self.states[w].clone(),
                        profile: profile.clone(),
                        to: self.states[u].clone(),
                    });
                }
            }
        }
        GameFile {
            agents: self.agents.clone(),
            states: self.states.clone(),
            actions: self
                .agents
                .iter()
                .cloned()
                .zip(self.actions.iter().cloned())
                .collect(),
            costs: CostTable {
                default: format_rational(&self.default_cost),
                entries,
            },
            mechanism,
            valuation: self
                .valuation
                .iter()
                .map(|(p, v)| {
                    (
                        p.clone(),
                        v.iter()
                            .enumerate()
                            .filter(|(_, b)| **b)
                            .map(|(i, _)| self.states[i].clone())
                            .collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn actions(&self, agent: usize) -> &[String] {
        &self.actions[agent]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_ix.get(name).copied()
    }

    pub fn agent_id(&self, name: &str) -> Option<usize> {
        self.agent_ix.get(name).copied()
    }

    pub fn action_id(&self, agent: usize, name: &str) -> Option<usize> {
        self.action_ix[agent].get(name).copied()
    }

    /// Cost of `action` for `agent` at state `w`.
    pub fn cost(&self, w: StateId, agent: usize, action: usize) -> &Rational {
        self.cost_overrides
            .get(&(w, agent, action))
            .unwrap_or(&self.default_cost)
    }

    /// Profiles with at least one successor from `w`, in profile order.
    pub fn outcomes(&self, w: StateId) -> &[Outcome] {
        &self.outgoing[w]
    }

    pub fn successors(&self, w: StateId, profile: &ActionProfile) -> &[StateId] {
        match self.outcome_ix.get(&(w, profile.clone())) {
            Some(&i) => &self.outgoing[w][i].successors,
            None => &[],
        }
    }

    /// Absent propositions are false everywhere.
    pub fn holds_prop(&self, p: &str, w: StateId) -> bool {
        self.valuation.get(p).is_some_and(|v| v[w])
    }

    /// Number of complete profiles, saturating.
    pub fn profile_space(&self) -> u128 {
        self.actions
            .iter()
            .fold(1u128, |acc, l| acc.saturating_mul(l.len() as u128))
    }

    /// Every complete profile, in lexicographic order of action indices.
    pub fn all_profiles(&self) -> Vec<ActionProfile> {
        let mut out = vec![ActionProfile { choice: Vec::new() }];
        for l in &self.actions {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..l.len()).map(move |x| {
                        let mut c = p.choice.clone();
                        c.push(x);
                        ActionProfile { choice: c }
                    })
                })
                .collect();
        }
        out
    }

    pub fn profile(&self, choice: &BTreeMap<String, String>) -> Result<ActionProfile, Violation> {
        let context = "profile".to_string();
        for (a, x) in choice {
            let Some(ai) = self.agent_id(a) else {
                return Err(Violation::UnknownAgent {
                    context,
                    agent: a.clone(),
                });
            };
            if self.action_id(ai, x).is_none() {
                return Err(Violation::UnknownAction {
                    context,
                    agent: a.clone(),
                    action: x.clone(),
                });
            }
        }
        let mut out = Vec::with_capacity(self.agents.len());
        for (i, a) in self.agents.iter().enumerate() {
            let Some(x) = choice.get(a) else {
                return Err(Violation::PartialProfile {
                    context,
                    agent: a.clone(),
                });
            };
            out.push(self.action_ix[i][x]);
        }
        Ok(ActionProfile { choice: out })
    }

    pub fn profile_names(&self, p: &ActionProfile) -> BTreeMap<String, String> {
        p.choice
            .iter()
            .enumerate()
            .map(|(a, &x)| (self.agents[a].clone(), self.actions[a][x].clone()))
            .collect()
    }

    /// Builds a strategy, rejecting a domain that differs from the coalition.
    pub fn strategy(
        &self,
        coalition: &Coalition,
        choice: &BTreeMap<String, String>,
    ) -> Result<Strategy, Violation> {
        let cname = format!("{{{}}}", coalition.agents().collect::<Vec<_>>().join(", "));
        for a in choice.keys() {
            if !coalition.contains(a) {
                return Err(Violation::StrategyExtraAgent {
                    coalition: cname,
                    agent: a.clone(),
                });
            }
        }
        let mut out = Vec::new();
        for a in coalition.agents() {
            let Some(ai) = self.agent_id(a) else {
                return Err(Violation::UnknownAgent {
                    context: "strategy".into(),
                    agent: a.to_string(),
                });
            };
            let Some(x) = choice.get(a) else {
                return Err(Violation::StrategyMissingAgent {
                    coalition: cname,
                    agent: a.to_string(),
                });
            };
            let Some(xi) = self.action_id(ai, x) else {
                return Err(Violation::UnknownAction {
                    context: "strategy".into(),
                    agent: a.to_string(),
                    action: x.clone(),
                });
            };
            out.push((ai, xi));
        }
        out.sort_unstable();
        Ok(Strategy {
            coalition: coalition.clone(),
            choice: out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures;
    use super::*;

    fn names(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn term_fixture_shape() {
        let g = fixtures::g_term();
        assert_eq!(g.states().len(), 1);
        assert!(g.outcomes(0).is_empty());
        assert_eq!(g.profile_space(), 2);
    }

    #[test]
    fn fork_fixture_shape() {
        let g = fixtures::g_fork();
        assert_eq!(g.states().len(), 3);
        let w = g.state_id("w").unwrap();
        assert_eq!(g.outcomes(w).len(), 2);
        for o in g.outcomes(w) {
            assert_eq!(o.successors.len(), 1);
        }
        assert!(g.holds_prop("p", g.state_id("u0").unwrap()));
        assert!(!g.holds_prop("p", w));
        assert!(!g.holds_prop("nope", w));
    }

    #[test]
    fn fork_is_valid() {
        assert!(validate(&fixtures::g_fork().to_file()).is_empty());
    }

    #[test]
    fn unknown_state_in_transition() {
        let mut f = fixtures::g_fork().to_file();
        f.mechanism[0].to = "nowhere".into();
        let v = validate(&f);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(matches!(&v[0], Violation::UnknownState { state, .. } if state == "nowhere"));
    }

    #[test]
    fn partial_profile_rejected() {
        let mut f = fixtures::g_fork().to_file();
        f.mechanism[0].profile.clear();
        assert!(matches!(
            validate(&f).as_slice(),
            [Violation::PartialProfile { .. }]
        ));
    }

    #[test]
    fn duplicate_names_and_bad_rationals() {
        let mut f = fixtures::g_fork().to_file();
        f.states.push("w".into());
        f.agents.push("a".into());
        f.costs.default = "1.5".into();
        let v = validate(&f);
        assert!(v.contains(&Violation::DuplicateState("w".into())));
        assert!(v.contains(&Violation::DuplicateAgent("a".into())));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::MalformedRational { .. })));
        assert!(matches!(Game::from_file(&f), Err(GameError::Invalid(_))));
    }

    #[test]
    fn strategy_domain_must_match_coalition() {
        let g = fixtures::g_village1();
        let c = Coalition::new(["m_a"]).unwrap();
        assert!(matches!(
            g.strategy(&c, &names(&[("m_a", "v1v2"), ("m_b", "(1,1)")])),
            Err(Violation::StrategyExtraAgent { .. })
        ));
        assert!(matches!(
            g.strategy(&c, &BTreeMap::new()),
            Err(Violation::StrategyMissingAgent { .. })
        ));
        assert!(g.strategy(&c, &names(&[("m_a", "v1v2")])).is_ok());
    }

    #[test]
    fn agreement_is_coalition_restricted() {
        let g = fixtures::g_fork();
        let a = Coalition::new(["a"]).unwrap();
        let t = g.strategy(&a, &names(&[("a", "a0")])).unwrap();
        let d0 = g.profile(&names(&[("a", "a0")])).unwrap();
        let d1 = g.profile(&names(&[("a", "a1")])).unwrap();
        assert!(agrees(&t, &d0));
        assert!(!agrees(&t, &d1));

        let g = fixtures::g_village1();
        let ma = Coalition::new(["m_a"]).unwrap();
        let t = g.strategy(&ma, &names(&[("m_a", "v1v2")])).unwrap();
        let d = g
            .profile(&names(&[("m_a", "v1v2"), ("m_b", "(2,0)")]))
            .unwrap();
        let d2 = g
            .profile(&names(&[("m_a", "v1v2"), ("m_b", "(0,1)")]))
            .unwrap();
        assert!(agrees(&t, &d));
        assert!(agrees(&t, &d2));
    }

    #[test]
    fn json_round_trip() {
        for g in [fixtures::g_term(), fixtures::g_fork(), fixtures::g_village1()] {
            let text = serialize_game(&g);
            assert_eq!(parse_game(&text).unwrap(), g);
        }
    }

    #[test]
    fn rejects_unknown_fields_and_bad_json() {
        assert!(matches!(parse_game("{"), Err(GameError::Json(_))));
        let mut v: serde_json::Value = serde_json::to_value(fixtures::g_fork().to_file()).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(matches!(
            parse_game(&v.to_string()),
            Err(GameError::Json(_))
        ));
    }
}
