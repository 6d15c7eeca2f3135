//! Direct transcription of the satisfaction clauses, enumerating every
//! coalition strategy and every complete profile. Exponential and slow;
//! exists to cross-check [`super::CheckContext`].

use crate::formula::{nonempty_subsets, Coalition, Formula, FormulaSet, SacrificeMap};
use crate::game::{ActionProfile, Game, StateId};
use crate::rational::Rational;

use super::CheckError;

fn bound<'s>(s: &'s SacrificeMap, g: &Game) -> Result<Vec<&'s Rational>, CheckError> {
    for a in s.bounds().keys() {
        if g.agent_id(a).is_none() {
            return Err(CheckError::Sacrifice(
                crate::formula::SacrificeResolveError::UnknownAgent(a.clone()),
            ));
        }
    }
    g.agents()
        .iter()
        .map(|a| {
            s.get(a).ok_or_else(|| {
                CheckError::Sacrifice(crate::formula::SacrificeResolveError::Unbound(a.clone()))
            })
        })
        .collect()
}

/// Every map from coalition agents to actions, as (agent, action) lists.
fn strategies(g: &Game, c: &Coalition) -> Result<Vec<Vec<(usize, usize)>>, CheckError> {
    let mut out = vec![Vec::new()];
    for name in c.agents() {
        let a = g
            .agent_id(name)
            .ok_or_else(|| CheckError::UnknownAgent(name.to_string()))?;
        let mut next = Vec::new();
        for t in &out {
            for x in 0..g.actions(a).len() {
                let mut t2: Vec<(usize, usize)> = t.clone();
                t2.push((a, x));
                next.push(t2);
            }
        }
        out = next;
    }
    Ok(out)
}

fn is_admissible(g: &Game, w: StateId, d: &ActionProfile, s: &[&Rational]) -> bool {
    (0..g.agents().len()).all(|a| g.cost(w, a, d.choice[a]) <= s[a])
}

fn agree(t: &[(usize, usize)], d: &ActionProfile) -> bool {
    t.iter().all(|&(a, x)| d.choice[a] == x)
}

/// Successor states reached from `w` through admissible profiles agreeing
/// with `t`.
fn reach(g: &Game, w: StateId, t: &[(usize, usize)], s: &[&Rational]) -> Vec<StateId> {
    let mut out = Vec::new();
    for d in g.all_profiles() {
        if is_admissible(g, w, &d, s) && agree(t, &d) {
            out.extend_from_slice(g.successors(w, &d));
        }
    }
    out
}

fn clause_a(
    g: &Game,
    w: StateId,
    c: &Coalition,
    x: &FormulaSet,
    s: &[&Rational],
) -> Result<bool, CheckError> {
    for t in strategies(g, c)? {
        let succ = reach(g, w, &t, s);
        let mut some_forced = false;
        for phi in x.iter() {
            let mut forced = true;
            for &u in &succ {
                if !satisfies_literal(g, u, phi)? {
                    forced = false;
                    break;
                }
            }
            if forced {
                some_forced = true;
                break;
            }
        }
        if !some_forced {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn holds_weak_literal(
    g: &Game,
    w: StateId,
    c: &Coalition,
    x: &FormulaSet,
    s: &SacrificeMap,
) -> Result<bool, CheckError> {
    let s = bound(s, g)?;
    clause_a(g, w, c, x, &s)
}

pub fn holds_strict_literal(
    g: &Game,
    w: StateId,
    c: &Coalition,
    x: &FormulaSet,
    s: &SacrificeMap,
) -> Result<bool, CheckError> {
    let s = bound(s, g)?;
    if !clause_a(g, w, c, x, &s)? {
        return Ok(false);
    }
    let strategies = strategies(g, c)?;
    for y in nonempty_subsets(x.len()) {
        if y.len() == x.len() {
            continue;
        }
        let y = x.select(&y);
        // some strategy leaves every member of y open
        let mut found = false;
        for t in &strategies {
            let succ = reach(g, w, t, &s);
            let mut all_open = true;
            for phi in y.iter() {
                let mut open = false;
                for &u in &succ {
                    if !satisfies_literal(g, u, phi)? {
                        open = true;
                        break;
                    }
                }
                if !open {
                    all_open = false;
                    break;
                }
            }
            if all_open {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn satisfies_literal(g: &Game, w: StateId, f: &Formula) -> Result<bool, CheckError> {
    Ok(match f {
        Formula::Prop(p) => g.holds_prop(p, w),
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Neg(a) => !satisfies_literal(g, w, a)?,
        Formula::Implies(a, b) => !satisfies_literal(g, w, a)? || satisfies_literal(g, w, b)?,
        Formula::And(a, b) => satisfies_literal(g, w, a)? && satisfies_literal(g, w, b)?,
        Formula::Or(a, b) => satisfies_literal(g, w, a)? || satisfies_literal(g, w, b)?,
        Formula::StrictDilemma(d) => holds_strict_literal(g, w, &d.coalition, &d.members, &d.sacrifice)?,
        Formula::WeakDilemma(d) => holds_weak_literal(g, w, &d.coalition, &d.members, &d.sacrifice)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::satisfies;
    use crate::formula::parse_formula;
    use crate::game::fixtures::{g_fork, g_term};

    #[test]
    fn agrees_with_checker_on_small_games() {
        let cases = [
            "[a : p, q @ a:1]",
            "[a : p, q @ a:0]",
            "[a : p @ a:0]",
            "[[a : p, q @ *:1]]",
            "[a : false @ *:0]",
            "[a : p, !p @ *:1]",
            "[a : [a : p @ *:0], q @ *:1]",
        ];
        for g in [g_fork(), g_term()] {
            for w in 0..g.states().len() {
                for text in cases {
                    let f = parse_formula(text).unwrap();
                    assert_eq!(
                        satisfies_literal(&g, w, &f).unwrap(),
                        satisfies(&g, w, &f).unwrap(),
                        "{text} at {}",
                        g.states()[w]
                    );
                }
            }
        }
    }
}
