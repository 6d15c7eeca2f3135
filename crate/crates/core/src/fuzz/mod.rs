//! Seeded random games and formula pools, and suites that evaluate axiom and
//! rule instances on them.
//!
//! Every game `i` of a run draws from ChaCha stream `2i` and its instances
//! from stream `2i + 1`, so results do not depend on scheduling.

mod report;
mod sample;
mod suites;

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{CostEntry, CostTable, Game, GameFile, TransitionEntry};
use crate::rational::{self, format_rational, int, ratio, Rational};

pub use report::{replay, CounterexampleReport, FuzzOutcome, FuzzSummary, Observation, PropertyStats, ReplayError};
pub use sample::formula_pool;
pub use suites::{
    axiom_soundness_suite, falsification_suite, fixture_counterexamples, rule_soundness_suite, NECESSITATION,
    SINGLE_COMBINATION, SINGLE_MONOTONICITY, SUBSTITUTION,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuzzConfig {
    pub seed: u64,
    pub num_games: usize,
    pub num_states: usize,
    pub num_agents: usize,
    pub actions_per_agent: usize,
    #[serde(with = "rational::as_string")]
    pub transition_density: Rational,
    #[serde(with = "rational::as_string")]
    pub cost_min: Rational,
    #[serde(with = "rational::as_string")]
    pub cost_max: Rational,
    pub num_props: usize,
    pub pool_size: usize,
    pub formula_depth: usize,
    pub instances_per_schema: usize,
    /// Games with more complete profiles than this are skipped.
    pub profile_cap: u128,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 1,
            num_games: 50,
            num_states: 3,
            num_agents: 2,
            actions_per_agent: 2,
            transition_density: ratio(1, 2),
            cost_min: int(-1),
            cost_max: int(2),
            num_props: 2,
            pool_size: 8,
            formula_depth: 2,
            instances_per_schema: 20,
            profile_cap: crate::checker::DEFAULT_PROFILE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("`{0}` must be positive")]
    NotPositive(&'static str),
    #[error("transition_density must lie in [0, 1], got {0}")]
    Density(String),
    #[error("cost_min {0} exceeds cost_max {1}")]
    CostRange(String, String),
    #[error("cost range is too wide for the half-unit grid")]
    CostGrid,
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let counts = [
            ("num_games", self.num_games),
            ("num_states", self.num_states),
            ("num_agents", self.num_agents),
            ("actions_per_agent", self.actions_per_agent),
            ("num_props", self.num_props),
            ("pool_size", self.pool_size),
            ("instances_per_schema", self.instances_per_schema),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if self.profile_cap == 0 {
            return Err(ConfigError::NotPositive("profile_cap"));
        }
        let d = &self.transition_density;
        if *d < int(0)
            || *d > int(1)
            || d.numer().to_u64().is_none()
            || d.denom().to_u64().is_none()
        {
            return Err(ConfigError::Density(format_rational(d)));
        }
        if self.cost_min > self.cost_max {
            return Err(ConfigError::CostRange(
                format_rational(&self.cost_min),
                format_rational(&self.cost_max),
            ));
        }
        if grid_steps(&self.cost_min, &self.cost_max).is_none() {
            return Err(ConfigError::CostGrid);
        }
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<FuzzConfig, String> {
    let cfg: FuzzConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Number of half-unit steps from `lo` up to at most `hi`.
fn grid_steps(lo: &Rational, hi: &Rational) -> Option<u32> {
    ((hi - lo) * int(2)).floor().to_integer().to_u32().filter(|&k| k < 10_000)
}

pub(crate) fn grid(lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let k = grid_steps(lo, hi).unwrap_or(0);
    (0..=k).map(|i| lo + ratio(i as i64, 2)).collect()
}

pub(crate) fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn agent_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("g{i}")
            }
        })
        .collect()
}

pub(crate) fn prop_names(n: usize) -> Vec<String> {
    const NAMES: [&str; 6] = ["p", "q", "r", "t", "u", "v"];
    (0..n)
        .map(|i| NAMES.get(i).map_or_else(|| format!("p{i}"), |s| s.to_string()))
        .collect()
}

fn chance(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    if p.is_zero() {
        return false;
    }
    let n = p.numer().to_u64().expect("validated");
    let d = p.denom().to_u64().expect("validated");
    rng.gen_range(0..d) < n
}

fn random_game_file(cfg: &FuzzConfig, rng: &mut ChaCha8Rng) -> GameFile {
    let states: Vec<String> = (0..cfg.num_states).map(|i| format!("s{i}")).collect();
    let agents = agent_names(cfg.num_agents);
    let actions: BTreeMap<String, Vec<String>> = agents
        .iter()
        .map(|a| {
            (
                a.clone(),
                (0..cfg.actions_per_agent).map(|x| format!("x{x}")).collect(),
            )
        })
        .collect();
    let costs = grid(&cfg.cost_min, &cfg.cost_max);
    let default = costs[0].clone();
    let mut entries = Vec::new();
    for s in &states {
        for a in &agents {
            for x in &actions[a] {
                let c = &costs[rng.gen_range(0..costs.len())];
                if *c != default {
                    entries.push(CostEntry {
                        state: s.clone(),
                        agent: a.clone(),
                        action: x.clone(),
                        cost: format_rational(c),
                    });
                }
            }
        }
    }
    let mut profiles = vec![BTreeMap::new()];
    for a in &agents {
        profiles = profiles
            .into_iter()
            .flat_map(|p| {
                actions[a].iter().map(move |x| {
                    let mut p = p.clone();
                    p.insert(a.clone(), x.clone());
                    p
                })
            })
            .collect();
    }
    let mut mechanism = Vec::new();
    for from in &states {
        for p in &profiles {
            for to in &states {
                if chance(rng, &cfg.transition_density) {
                    mechanism.push(TransitionEntry {
                        from: from.clone(),
                        profile: p.clone(),
                        to: to.clone(),
                    });
                }
            }
        }
    }
    let valuation = prop_names(cfg.num_props)
        .into_iter()
        .map(|p| {
            let ext = states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            (p, ext)
        })
        .collect();
    GameFile {
        agents,
        states,
        actions,
        costs: CostTable {
            default: format_rational(&default),
            entries,
        },
        mechanism,
        valuation,
    }
}

/// Game number `index` of a run with this configuration.
pub fn random_game_at(cfg: &FuzzConfig, index: u64) -> Game {
    let mut rng = stream(cfg.seed, 2 * index);
    Game::from_file(&random_game_file(cfg, &mut rng)).expect("generated games are valid")
}

pub fn random_game(cfg: &FuzzConfig) -> Game {
    random_game_at(cfg, 0)
}
