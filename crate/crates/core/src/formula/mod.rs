//! Formula language: AST, concrete syntax, normalization and the pairwise
//! conjunction of member sets.

mod normalize;
mod parse;
mod print;

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::rational::Rational;

pub use normalize::{
    canonical, expand_weak, normalize, normalize_with_cap, nonempty_subsets,
    DEFAULT_EXPANSION_CAP, RESERVED_ATOM,
};
pub use parse::{parse_coalition, parse_formula, parse_formula_list, parse_sacrifice};
pub use print::{format_coalition, format_formula, format_sacrifice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("coalition must name at least one agent")]
    EmptyCoalition,
    #[error("dilemma member set must be nonempty")]
    EmptyMembers,
    #[error("duplicate sacrifice entry for `{0}`")]
    DuplicateSacrifice(String),
    #[error("weak dilemma with {members} members exceeds the expansion cap of {cap}")]
    ExpansionCap { members: usize, cap: usize },
}

/// Nonempty set of agent names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(BTreeSet<String>);

impl Coalition {
    pub fn new<I, S>(agents: I) -> Result<Self, FormulaError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = agents.into_iter().map(Into::into).collect();
        if set.is_empty() {
            return Err(FormulaError::EmptyCoalition);
        }
        Ok(Coalition(set))
    }

    pub fn agents(&self) -> impl Iterator<Item = &str> + '_ {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, agent: &str) -> bool {
        self.0.contains(agent)
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &Coalition) -> Coalition {
        Coalition(self.0.union(&other.0).cloned().collect())
    }
}

/// Per-agent sacrifice bounds with an optional wildcard for unlisted agents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SacrificeMap {
    bounds: BTreeMap<String, Rational>,
    wildcard: Option<Rational>,
}

impl SacrificeMap {
    pub fn new(bounds: BTreeMap<String, Rational>, wildcard: Option<Rational>) -> Self {
        SacrificeMap { bounds, wildcard }
    }

    pub fn uniform(bound: Rational) -> Self {
        SacrificeMap {
            bounds: BTreeMap::new(),
            wildcard: Some(bound),
        }
    }

    pub fn bounds(&self) -> &BTreeMap<String, Rational> {
        &self.bounds
    }

    pub fn wildcard(&self) -> Option<&Rational> {
        self.wildcard.as_ref()
    }

    /// Bound for `agent`, falling back to the wildcard.
    pub fn get(&self, agent: &str) -> Option<&Rational> {
        self.bounds.get(agent).or(self.wildcard.as_ref())
    }

    /// Resolves the map over `universe`. Fails with the first agent that has
    /// neither an explicit entry nor a wildcard, or with an explicit entry for
    /// an agent outside the universe.
    pub fn resolve_over<'a>(
        &self,
        universe: impl IntoIterator<Item = &'a str>,
    ) -> Result<BTreeMap<String, Rational>, SacrificeResolveError> {
        let universe: BTreeSet<&str> = universe.into_iter().collect();
        if let Some(extra) = self.bounds.keys().find(|a| !universe.contains(a.as_str())) {
            return Err(SacrificeResolveError::UnknownAgent(extra.clone()));
        }
        universe
            .into_iter()
            .map(|a| match self.get(a) {
                Some(r) => Ok((a.to_string(), r.clone())),
                None => Err(SacrificeResolveError::Unbound(a.to_string())),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SacrificeResolveError {
    #[error("sacrifice gives no bound for agent `{0}` and has no wildcard")]
    Unbound(String),
    #[error("sacrifice mentions unknown agent `{0}`")]
    UnknownAgent(String),
}

/// Finite nonempty-or-empty set of formulas.
///
/// Members are deduplicated by their canonical core form and iterated in the
/// order of that form's printed text. When two inputs share a canonical form
/// the one with the smaller printed text is kept as representative.
#[derive(Debug, Clone)]
pub struct FormulaSet {
    entries: Vec<(String, Formula)>,
}

impl FormulaSet {
    pub fn new<I: IntoIterator<Item = Formula>>(members: I) -> Self {
        let mut keyed: BTreeMap<String, (String, Formula)> = BTreeMap::new();
        for f in members {
            let key = format_formula(&canonical(&f));
            let text = format_formula(&f);
            match keyed.get(&key) {
                Some((existing, _)) if *existing <= text => {}
                _ => {
                    keyed.insert(key, (text, f));
                }
            }
        }
        FormulaSet {
            entries: keyed.into_iter().map(|(k, (_, f))| (k, f)).collect(),
        }
    }

    /// Builds a set from entries already sorted by unique canonical key.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> + '_ {
        self.entries.iter().map(|(_, f)| f)
    }

    pub fn members(&self) -> Vec<&Formula> {
        self.iter().collect()
    }

    /// Canonical keys in iteration order.
    pub fn keys(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn contains(&self, f: &Formula) -> bool {
        let key = format_formula(&canonical(f));
        self.entries.binary_search_by(|(k, _)| k.cmp(&key)).is_ok()
    }

    pub fn is_subset(&self, other: &FormulaSet) -> bool {
        self.keys().all(|k| {
            other
                .entries
                .binary_search_by(|(o, _)| o.as_str().cmp(k))
                .is_ok()
        })
    }

    /// The members selected by `indices` (positions in iteration order).
    pub fn select(&self, indices: &[usize]) -> FormulaSet {
        FormulaSet {
            entries: indices.iter().map(|&i| self.entries[i].clone()).collect(),
        }
    }

    /// Members selected by a bit mask over iteration order.
    pub fn select_mask(&self, mask: u64) -> FormulaSet {
        FormulaSet {
            entries: self
                .entries
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, e)| e.clone())
                .collect(),
        }
    }

    pub(crate) fn map_preserving_keys(&self, f: impl Fn(&Formula) -> Formula) -> FormulaSet {
        FormulaSet {
            entries: self
                .entries
                .iter()
                .map(|(k, m)| (k.clone(), f(m)))
                .collect(),
        }
    }

    /// `{ a & b | a in self, b in other }`, deduplicated.
    pub fn tensor(&self, other: &FormulaSet) -> FormulaSet {
        FormulaSet::new(
            self.iter()
                .flat_map(|a| other.iter().map(move |b| Formula::and(a.clone(), b.clone()))),
        )
    }
}

impl PartialEq for FormulaSet {
    fn eq(&self, other: &Self) -> bool {
        self.keys().eq(other.keys())
    }
}

impl Eq for FormulaSet {}

impl Hash for FormulaSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.entries.len().hash(state);
        for k in self.keys() {
            k.hash(state);
        }
    }
}

impl PartialOrd for FormulaSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Smaller sets first, then lexicographic by canonical keys.
impl Ord for FormulaSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.keys().cmp(other.keys()))
    }
}

impl FromIterator<Formula> for FormulaSet {
    fn from_iter<T: IntoIterator<Item = Formula>>(iter: T) -> Self {
        FormulaSet::new(iter)
    }
}

/// The `C`, `X`, `s` triple shared by strict and weak dilemmas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dilemma {
    pub coalition: Coalition,
    pub members: FormulaSet,
    pub sacrifice: SacrificeMap,
}

impl Dilemma {
    pub fn new(
        coalition: Coalition,
        members: FormulaSet,
        sacrifice: SacrificeMap,
    ) -> Result<Self, FormulaError> {
        if members.is_empty() {
            return Err(FormulaError::EmptyMembers);
        }
        Ok(Dilemma {
            coalition,
            members,
            sacrifice,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    Top,
    Bottom,
    Neg(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    StrictDilemma(Dilemma),
    WeakDilemma(Dilemma),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn strict(d: Dilemma) -> Formula {
        Formula::StrictDilemma(d)
    }

    pub fn weak(d: Dilemma) -> Formula {
        Formula::WeakDilemma(d)
    }

    /// Right-nested disjunction; `false` when empty.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Formula::Bottom;
        };
        while let Some(f) = items.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }

    /// Right-nested conjunction; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Formula::Top;
        };
        while let Some(f) = items.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    pub fn is_core(&self) -> bool {
        match self {
            Formula::Prop(_) => true,
            Formula::Neg(f) => f.is_core(),
            Formula::Implies(l, r) => l.is_core() && r.is_core(),
            Formula::StrictDilemma(d) => d.members.iter().all(Formula::is_core),
            _ => false,
        }
    }

    /// Every coalition agent and explicit sacrifice agent mentioned anywhere.
    pub fn agents(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_agents(&mut out);
        out
    }

    fn collect_agents(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Prop(_) | Formula::Top | Formula::Bottom => {}
            Formula::Neg(f) => f.collect_agents(out),
            Formula::Implies(l, r) | Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_agents(out);
                r.collect_agents(out);
            }
            Formula::StrictDilemma(d) | Formula::WeakDilemma(d) => {
                out.extend(d.coalition.agents().map(str::to_string));
                out.extend(d.sacrifice.bounds().keys().cloned());
                for m in d.members.iter() {
                    m.collect_agents(out);
                }
            }
        }
    }

    /// Every sacrifice map occurring anywhere in the formula.
    pub fn sacrifices(&self) -> Vec<&SacrificeMap> {
        let mut out = Vec::new();
        self.collect_sacrifices(&mut out);
        out
    }

    fn collect_sacrifices<'a>(&'a self, out: &mut Vec<&'a SacrificeMap>) {
        match self {
            Formula::Prop(_) | Formula::Top | Formula::Bottom => {}
            Formula::Neg(f) => f.collect_sacrifices(out),
            Formula::Implies(l, r) | Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_sacrifices(out);
                r.collect_sacrifices(out);
            }
            Formula::StrictDilemma(d) | Formula::WeakDilemma(d) => {
                out.push(&d.sacrifice);
                for m in d.members.iter() {
                    m.collect_sacrifices(out);
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}
