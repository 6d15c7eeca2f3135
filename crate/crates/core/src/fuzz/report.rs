use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checker::{CheckContext, CheckError};
use crate::formula::{format_formula, parse_formula, Formula, FormulaError};
use crate::game::{Game, GameError, GameFile, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub formula: String,
    pub value: bool,
}

/// One violated instance, with enough data to re-run it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub property: String,
    /// `search` for random instances, otherwise the name of a fixed construction.
    pub origin: String,
    pub seed: u64,
    pub game_index: Option<u64>,
    pub game: GameFile,
    pub state: String,
    pub instantiation: BTreeMap<String, String>,
    pub formula: String,
    /// The instance itself first, then its named parts, all at `state`.
    pub observed: Vec<Observation>,
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

impl CounterexampleReport {
    pub(crate) fn build(
        property: &str,
        origin: &str,
        seed: u64,
        game_index: Option<u64>,
        game: &Game,
        ctx: &mut CheckContext<'_>,
        w: StateId,
        instantiation: BTreeMap<String, String>,
        formula: &Formula,
        parts: &[Formula],
    ) -> Result<Self, CheckError> {
        let mut observed = Vec::with_capacity(parts.len() + 1);
        for f in std::iter::once(formula).chain(parts) {
            observed.push(Observation {
                formula: format_formula(f),
                value: ctx.satisfies(w, f)?,
            });
        }
        Ok(CounterexampleReport {
            property: property.to_string(),
            origin: origin.to_string(),
            seed,
            game_index,
            game: game.to_file(),
            state: game.states()[w].clone(),
            instantiation,
            formula: format_formula(formula),
            observed,
        })
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Re-evaluates every observation; true iff all values are reproduced and the
/// instance itself is false.
pub fn replay(report: &CounterexampleReport) -> Result<bool, ReplayError> {
    let game = Game::from_file(&report.game)?;
    let mut ctx = CheckContext::without_memo(&game);
    let w = ctx.state(&report.state)?;
    let mut ok = report.observed.first().is_some_and(|o| !o.value);
    for o in &report.observed {
        ok &= ctx.satisfies(w, &parse_formula(&o.formula)?)? == o.value;
    }
    ok &= report.observed.first().map(|o| &o.formula) == Some(&report.formula);
    Ok(ok)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyStats {
    pub instances: u64,
    /// Instances whose premise or antecedent held somewhere.
    pub nonvacuous: u64,
    /// Instances not evaluated because a resource cap was hit.
    pub skipped: u64,
    pub counterexamples: u64,
}

impl PropertyStats {
    fn add(&mut self, o: &PropertyStats) {
        self.instances += o.instances;
        self.nonvacuous += o.nonvacuous;
        self.skipped += o.skipped;
        self.counterexamples += o.counterexamples;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub games: u64,
    pub properties: BTreeMap<String, PropertyStats>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzOutcome {
    pub reports: Vec<CounterexampleReport>,
    pub summary: FuzzSummary,
}

impl FuzzOutcome {
    pub(crate) fn stats(&mut self, property: &str) -> &mut PropertyStats {
        self.summary.properties.entry(property.to_string()).or_default()
    }

    /// Appends `other`, keeping its reports after ours.
    pub fn merge(&mut self, other: FuzzOutcome) {
        self.reports.extend(other.reports);
        for (k, v) in other.summary.properties {
            self.summary.properties.entry(k).or_default().add(&v);
        }
        self.summary.games = self.summary.games.max(other.summary.games);
    }

    pub fn counterexamples(&self, property: &str) -> u64 {
        self.summary
            .properties
            .get(property)
            .map_or(0, |s| s.counterexamples)
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string(&self.summary).expect("summaries serialize")
    }
}
