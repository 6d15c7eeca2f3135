use serde::Serialize;

use super::{full_mask, resolve_sacrifice, strict_from_forced, CheckContext, CheckError};
use crate::formula::{format_coalition, format_formula, format_sacrifice, Coalition, FormulaSet, SacrificeMap};
use crate::game::StateId;

/// Every subset of a pool that is a strict dilemma at one state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DilemmaReport {
    pub state: String,
    pub coalition: Coalition,
    pub sacrifice: SacrificeMap,
    pub pool: FormulaSet,
    /// Sorted by size, then by member keys.
    pub minimal_sets: Vec<FormulaSet>,
}

#[derive(Serialize)]
struct ReportJson {
    state: String,
    coalition: String,
    sacrifice: String,
    pool: Vec<String>,
    minimal_sets: Vec<Vec<String>>,
}

fn texts(set: &FormulaSet) -> Vec<String> {
    set.iter().map(format_formula).collect()
}

impl DilemmaReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson {
            state: self.state.clone(),
            coalition: format_coalition(&self.coalition),
            sacrifice: format_sacrifice(&self.sacrifice),
            pool: texts(&self.pool),
            minimal_sets: self.minimal_sets.iter().map(texts).collect(),
        })
        .expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "state {}, coalition {}, sacrifice {}: {} dilemma set(s)\n",
            self.state,
            format_coalition(&self.coalition),
            format_sacrifice(&self.sacrifice),
            self.minimal_sets.len()
        );
        for set in &self.minimal_sets {
            out.push_str(&format!("  {{{}}}\n", texts(set).join(", ")));
        }
        out
    }
}

impl CheckContext<'_> {
    /// All nonempty subsets of `pool` forming a strict dilemma for `c` at `w`.
    pub fn minimal_dilemma_sets(
        &mut self,
        w: StateId,
        c: &Coalition,
        s: &SacrificeMap,
        pool: &FormulaSet,
    ) -> Result<DilemmaReport, CheckError> {
        if pool.is_empty() {
            return Err(CheckError::EmptyPool);
        }
        if pool.len() > self.limits.max_pool {
            return Err(CheckError::PoolCap {
                size: pool.len(),
                cap: self.limits.max_pool,
            });
        }
        let resolved = resolve_sacrifice(s, self.game)?;
        let forced = self.forced_sets(w, c, &resolved, pool)?;
        let mut sets: Vec<FormulaSet> = (1..=full_mask(pool.len()))
            .filter(|&m| strict_from_forced(&forced, m))
            .map(|m| pool.select_mask(m))
            .collect();
        sets.sort();
        Ok(DilemmaReport {
            state: self.game.states()[w].clone(),
            coalition: c.clone(),
            sacrifice: s.clone(),
            pool: pool.clone(),
            minimal_sets: sets,
        })
    }
}
