//! Fixture games. The JSON files under `fixtures/games` are the shipped
//! form; the generators here rebuild them and are checked against them.

use std::collections::BTreeMap;

use super::{parse_game, CostEntry, CostTable, Game, GameFile, TransitionEntry};

pub const G_TERM_JSON: &str = include_str!("../../fixtures/games/g_term.json");
pub const G_FORK_JSON: &str = include_str!("../../fixtures/games/g_fork.json");
pub const G_VILLAGE1_JSON: &str = include_str!("../../fixtures/games/g_village1.json");
pub const G_VILLAGE2_JSON: &str = include_str!("../../fixtures/games/g_village2.json");

/// Largest number of doses `m_b` may hand to each helper in the shipped
/// first village game.
pub const DEFAULT_MB_CAP: u32 = 2;

pub fn g_term() -> Game {
    parse_game(G_TERM_JSON).expect("shipped fixture is valid")
}

pub fn g_fork() -> Game {
    parse_game(G_FORK_JSON).expect("shipped fixture is valid")
}

pub fn g_village1() -> Game {
    parse_game(G_VILLAGE1_JSON).expect("shipped fixture is valid")
}

pub fn g_village2() -> Game {
    parse_game(G_VILLAGE2_JSON).expect("shipped fixture is valid")
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn profile(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(a, x)| (a.to_string(), x.to_string()))
        .collect()
}

/// One state, one agent, two actions, no transitions.
pub fn term_file() -> GameFile {
    GameFile {
        agents: strings(["a"]),
        states: strings(["w"]),
        actions: BTreeMap::from([("a".into(), strings(["a0", "a1"]))]),
        costs: CostTable {
            default: "0".into(),
            entries: vec![CostEntry {
                state: "w".into(),
                agent: "a".into(),
                action: "a1".into(),
                cost: "1".into(),
            }],
        },
        mechanism: Vec::new(),
        valuation: BTreeMap::new(),
    }
}

/// `w --a0 (cost 0)--> u0 |= p`, `w --a1 (cost 1)--> u1 |= q`.
pub fn fork_file() -> GameFile {
    let mut f = term_file();
    f.states = strings(["w", "u0", "u1"]);
    f.mechanism = vec![
        TransitionEntry {
            from: "w".into(),
            profile: profile(&[("a", "a0")]),
            to: "u0".into(),
        },
        TransitionEntry {
            from: "w".into(),
            profile: profile(&[("a", "a1")]),
            to: "u1".into(),
        },
    ];
    f.valuation = BTreeMap::from([
        ("p".into(), strings(["u0"])),
        ("q".into(), strings(["u1"])),
    ]);
    f
}

const VILLAGES: usize = 4;

/// `none` for the empty set, otherwise e.g. `v1v2v4`.
pub fn village_set_name(mask: u8) -> String {
    if mask == 0 {
        return "none".into();
    }
    (0..VILLAGES)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| format!("v{}", i + 1))
        .collect()
}

fn village_states() -> Vec<String> {
    std::iter::once("init".to_string())
        .chain((0..16u8).map(village_set_name))
        .collect()
}

fn death_valuation() -> BTreeMap<String, Vec<String>> {
    (0..VILLAGES)
        .map(|i| {
            (
                format!("d{}", i + 1),
                (0..16u8)
                    .filter(|m| m >> i & 1 == 0)
                    .map(village_set_name)
                    .collect(),
            )
        })
        .collect()
}

fn state_independent_costs(
    states: &[String],
    actions: &BTreeMap<String, Vec<String>>,
    cost: impl Fn(&str, &str) -> u32,
) -> Vec<CostEntry> {
    let mut out = Vec::new();
    for s in states {
        for (agent, list) in actions {
            for x in list {
                let c = cost(agent, x);
                if c != 0 {
                    out.push(CostEntry {
                        state: s.clone(),
                        agent: agent.clone(),
                        action: x.clone(),
                        cost: c.to_string(),
                    });
                }
            }
        }
    }
    out
}

fn dose_name(n1: u32, n2: u32) -> String {
    format!("({n1},{n2})")
}

/// First village scenario. `m_a` sends medicine to any subset of the four
/// villages (cost = subset size). `m_b` hands `n1` doses to the helper
/// serving v1/v2 and `n2` to the helper serving v3/v4 (cost = `n1 + n2`,
/// each at most `mb_cap`). The helpers are not agents: every way they may
/// distribute (or withhold) their doses is a separate successor.
pub fn village1_file(mb_cap: u32) -> GameFile {
    let states = village_states();
    let subsets: Vec<String> = (0..16u8).map(village_set_name).collect();
    let doses: Vec<(u32, u32)> = (0..=mb_cap)
        .flat_map(|a| (0..=mb_cap).map(move |b| (a, b)))
        .collect();
    let actions = BTreeMap::from([
        ("m_a".to_string(), subsets.clone()),
        (
            "m_b".to_string(),
            doses.iter().map(|&(a, b)| dose_name(a, b)).collect(),
        ),
    ]);
    let entries = state_independent_costs(&states, &actions, |agent, x| {
        if agent == "m_a" {
            let mask = (0..16u8).find(|&m| village_set_name(m) == x).unwrap();
            mask.count_ones()
        } else {
            let &(a, b) = doses.iter().find(|&&(a, b)| dose_name(a, b) == x).unwrap();
            a + b
        }
    });

    // bits 0..3 = v1..v4
    let (v1, v2, v3, v4) = (1u8, 2u8, 4u8, 8u8);
    let mut mechanism = Vec::new();
    for sa in 0..16u8 {
        for &(n1, n2) in &doses {
            let mut outcomes = std::collections::BTreeSet::new();
            for h1 in 0..4u8 {
                // h1 ⊆ {v1, v2}, encoded in bits 0..1
                if h1.count_ones() > n1 {
                    continue;
                }
                for h2 in 0..4u8 {
                    // h2 ⊆ {v3, v4}, encoded in bits 0..1
                    if h2.count_ones() > n2 {
                        continue;
                    }
                    let mut survivors = sa & v1;
                    if sa & v2 != 0 && h1 & 2 != 0 {
                        survivors |= v2;
                    }
                    if sa & v3 != 0 && h2 & 1 != 0 {
                        survivors |= v3;
                    }
                    if h2 & 2 != 0 {
                        survivors |= v4;
                    }
                    outcomes.insert(survivors);
                }
            }
            for u in outcomes {
                mechanism.push(TransitionEntry {
                    from: "init".into(),
                    profile: BTreeMap::from([
                        ("m_a".to_string(), village_set_name(sa)),
                        ("m_b".to_string(), dose_name(n1, n2)),
                    ]),
                    to: village_set_name(u),
                });
            }
        }
    }
    GameFile {
        agents: strings(["m_a", "m_b"]),
        states,
        actions,
        costs: CostTable {
            default: "0".into(),
            entries,
        },
        mechanism,
        valuation: death_valuation(),
    }
}

/// Second village scenario: `m_a` and `m_pa` each pick a subset of villages
/// (cost = size); the survivors are exactly the union.
pub fn village2_file() -> GameFile {
    let states = village_states();
    let subsets: Vec<String> = (0..16u8).map(village_set_name).collect();
    let actions = BTreeMap::from([
        ("m_a".to_string(), subsets.clone()),
        ("m_pa".to_string(), subsets.clone()),
    ]);
    let entries = state_independent_costs(&states, &actions, |_, x| {
        (0..16u8)
            .find(|&m| village_set_name(m) == x)
            .unwrap()
            .count_ones()
    });
    let mut mechanism = Vec::new();
    for a in 0..16u8 {
        for b in 0..16u8 {
            mechanism.push(TransitionEntry {
                from: "init".into(),
                profile: BTreeMap::from([
                    ("m_a".to_string(), village_set_name(a)),
                    ("m_pa".to_string(), village_set_name(b)),
                ]),
                to: village_set_name(a | b),
            });
        }
    }
    GameFile {
        agents: strings(["m_a", "m_pa"]),
        states,
        actions,
        costs: CostTable {
            default: "0".into(),
            entries,
        },
        mechanism,
        valuation: death_valuation(),
    }
}

pub fn village1_with_cap(mb_cap: u32) -> Game {
    Game::from_file(&village1_file(mb_cap)).expect("generated fixture is valid")
}
