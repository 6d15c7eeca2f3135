//! Satisfaction of formulas at game states.
//!
//! For a dilemma `[C : X @ s]` at state `w` every cost-admissible profile with
//! successors is grouped by its restriction to `C`. Each group yields the set
//! of members it forces (true at every successor of every profile in the
//! group). A strategy of `C` with no admissible successor forces every member
//! and therefore never constrains anything. `X` is a weak dilemma iff it
//! intersects every group's forced set, and a strict dilemma iff it is a
//! weak dilemma and no nonempty proper subset is one. The weak property is
//! upward closed, so it suffices to drop one member at a time.

mod explore;
pub mod literal;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::formula::{Coalition, Dilemma, Formula, FormulaSet, SacrificeMap, SacrificeResolveError};
use crate::game::{agrees, ActionProfile, Game, StateId, Strategy};
use crate::rational::Rational;

pub use explore::DilemmaReport;

pub const DEFAULT_PROFILE_CAP: u128 = 1_000_000;
pub const DEFAULT_POOL_CAP: usize = 12;
/// Member sets are tracked as 64-bit masks.
pub const MAX_MEMBERS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_profiles: u128,
    pub max_pool: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_profiles: DEFAULT_PROFILE_CAP,
            max_pool: DEFAULT_POOL_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("agent `{0}` is not in the game")]
    UnknownAgent(String),
    #[error("state `{0}` is not in the game")]
    UnknownState(String),
    #[error(transparent)]
    Sacrifice(#[from] SacrificeResolveError),
    #[error("game has {profiles} action profiles, above the cap of {cap}")]
    ProfileCap { profiles: u128, cap: u128 },
    #[error("pool of {size} formulas exceeds the cap of {cap}")]
    PoolCap { size: usize, cap: usize },
    #[error("dilemma with {0} members exceeds the supported maximum of 64")]
    TooManyMembers(usize),
    #[error("formula pool is empty")]
    EmptyPool,
}

impl CheckError {
    /// Errors caused by configured resource limits rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            CheckError::ProfileCap { .. } | CheckError::PoolCap { .. } | CheckError::TooManyMembers(_)
        )
    }
}

/// A sacrifice map made total over the game's agents, indexed by agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedSacrifice(pub Vec<Rational>);

pub fn resolve_sacrifice(s: &SacrificeMap, g: &Game) -> Result<ResolvedSacrifice, CheckError> {
    let map = s.resolve_over(g.agents().iter().map(String::as_str))?;
    Ok(ResolvedSacrifice(
        g.agents().iter().map(|a| map[a].clone()).collect(),
    ))
}

/// Every agent's action cost at `w` is within its bound.
pub fn admissible(g: &Game, w: StateId, d: &ActionProfile, s: &ResolvedSacrifice) -> bool {
    d.choice
        .iter()
        .enumerate()
        .all(|(a, &x)| *g.cost(w, a, x) <= s.0[a])
}

pub fn coalition_indices(g: &Game, c: &Coalition) -> Result<Vec<usize>, CheckError> {
    c.agents()
        .map(|a| g.agent_id(a).ok_or_else(|| CheckError::UnknownAgent(a.to_string())))
        .collect()
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn hits_all(forced: &[u64], set: u64) -> bool {
    forced.iter().all(|f| f & set != 0)
}

fn strict_from_forced(forced: &[u64], set: u64) -> bool {
    if !hits_all(forced, set) {
        return false;
    }
    if set.count_ones() == 1 {
        return true;
    }
    (0..64)
        .filter(|i| set >> i & 1 == 1)
        .all(|i| !hits_all(forced, set & !(1u64 << i)))
}

/// Evaluation state over one game: limits plus an optional cache of dilemma
/// verdicts per state.
pub struct CheckContext<'g> {
    game: &'g Game,
    limits: Limits,
    memo: Option<HashMap<(StateId, Formula), bool>>,
}

impl<'g> CheckContext<'g> {
    pub fn new(game: &'g Game) -> Self {
        CheckContext {
            game,
            limits: Limits::default(),
            memo: Some(HashMap::new()),
        }
    }

    pub fn without_memo(game: &'g Game) -> Self {
        CheckContext {
            memo: None,
            ..CheckContext::new(game)
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    pub fn state(&self, name: &str) -> Result<StateId, CheckError> {
        self.game
            .state_id(name)
            .ok_or_else(|| CheckError::UnknownState(name.to_string()))
    }

    pub fn satisfies(&mut self, w: StateId, f: &Formula) -> Result<bool, CheckError> {
        Ok(match f {
            Formula::Prop(p) => self.game.holds_prop(p, w),
            Formula::Top => true,
            Formula::Bottom => false,
            Formula::Neg(g) => !self.satisfies(w, g)?,
            Formula::Implies(l, r) => !self.satisfies(w, l)? || self.satisfies(w, r)?,
            Formula::And(l, r) => self.satisfies(w, l)? && self.satisfies(w, r)?,
            Formula::Or(l, r) => self.satisfies(w, l)? || self.satisfies(w, r)?,
            Formula::StrictDilemma(d) | Formula::WeakDilemma(d) => {
                if let Some(v) = self.memo.as_ref().and_then(|m| m.get(&(w, f.clone()))) {
                    return Ok(*v);
                }
                let strict = matches!(f, Formula::StrictDilemma(_));
                let v = self.dilemma(w, d, strict)?;
                if let Some(m) = self.memo.as_mut() {
                    m.insert((w, f.clone()), v);
                }
                v
            }
        })
    }

    /// True at every state.
    pub fn valid(&mut self, f: &Formula) -> Result<bool, CheckError> {
        for w in 0..self.game.states().len() {
            if !self.satisfies(w, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn dilemma(&mut self, w: StateId, d: &Dilemma, strict: bool) -> Result<bool, CheckError> {
        let s = resolve_sacrifice(&d.sacrifice, self.game)?;
        let forced = self.forced_sets(w, &d.coalition, &s, &d.members)?;
        let all = full_mask(d.members.len());
        Ok(if strict {
            strict_from_forced(&forced, all)
        } else {
            hits_all(&forced, all)
        })
    }

    /// For each restriction to `c` of an admissible profile with successors,
    /// the mask of members it forces. Strategies without such a profile are
    /// omitted since they force everything.
    pub fn forced_sets(
        &mut self,
        w: StateId,
        c: &Coalition,
        s: &ResolvedSacrifice,
        members: &FormulaSet,
    ) -> Result<Vec<u64>, CheckError> {
        let n = members.len();
        if n > MAX_MEMBERS {
            return Err(CheckError::TooManyMembers(n));
        }
        let profiles = self.game.profile_space();
        if profiles > self.limits.max_profiles {
            return Err(CheckError::ProfileCap {
                profiles,
                cap: self.limits.max_profiles,
            });
        }
        let cix = coalition_indices(self.game, c)?;
        let members = members.members();
        let game = self.game;
        let mut falsified: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for o in game.outcomes(w) {
            if !admissible(game, w, &o.profile, s) {
                continue;
            }
            let key: Vec<usize> = cix.iter().map(|&a| o.profile.choice[a]).collect();
            let mut mask = falsified.get(&key).copied().unwrap_or(0);
            for &u in &o.successors {
                for (i, m) in members.iter().enumerate() {
                    if mask >> i & 1 == 0 && !self.satisfies(u, m)? {
                        mask |= 1 << i;
                    }
                }
            }
            falsified.insert(key, mask);
        }
        let all = full_mask(n);
        Ok(falsified.into_values().map(|f| all & !f).collect())
    }

    /// Every admissible profile agreeing with `t` leads only to states
    /// satisfying `f` (vacuously true without such a transition).
    pub fn forces(
        &mut self,
        w: StateId,
        t: &Strategy,
        s: &ResolvedSacrifice,
        f: &Formula,
    ) -> Result<bool, CheckError> {
        let game = self.game;
        for o in game.outcomes(w) {
            if !admissible(game, w, &o.profile, s) || !agrees(t, &o.profile) {
                continue;
            }
            for &u in &o.successors {
                if !self.satisfies(u, f)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn holds_weak(
        &mut self,
        w: StateId,
        c: &Coalition,
        x: &FormulaSet,
        s: &SacrificeMap,
    ) -> Result<bool, CheckError> {
        let s = resolve_sacrifice(s, self.game)?;
        let forced = self.forced_sets(w, c, &s, x)?;
        Ok(hits_all(&forced, full_mask(x.len())))
    }

    pub fn holds_strict(
        &mut self,
        w: StateId,
        c: &Coalition,
        x: &FormulaSet,
        s: &SacrificeMap,
    ) -> Result<bool, CheckError> {
        let s = resolve_sacrifice(s, self.game)?;
        let forced = self.forced_sets(w, c, &s, x)?;
        Ok(strict_from_forced(&forced, full_mask(x.len())))
    }
}

pub fn satisfies(g: &Game, w: StateId, f: &Formula) -> Result<bool, CheckError> {
    CheckContext::new(g).satisfies(w, f)
}

pub fn valid_in_game(g: &Game, f: &Formula) -> Result<bool, CheckError> {
    CheckContext::new(g).valid(f)
}

pub fn holds_weak(
    g: &Game,
    w: StateId,
    c: &Coalition,
    x: &FormulaSet,
    s: &SacrificeMap,
) -> Result<bool, CheckError> {
    CheckContext::new(g).holds_weak(w, c, x, s)
}

pub fn holds_strict(
    g: &Game,
    w: StateId,
    c: &Coalition,
    x: &FormulaSet,
    s: &SacrificeMap,
) -> Result<bool, CheckError> {
    CheckContext::new(g).holds_strict(w, c, x, s)
}

pub fn forces(
    g: &Game,
    w: StateId,
    t: &Strategy,
    s: &SacrificeMap,
    f: &Formula,
) -> Result<bool, CheckError> {
    let s = resolve_sacrifice(s, g)?;
    CheckContext::new(g).forces(w, t, &s, f)
}
