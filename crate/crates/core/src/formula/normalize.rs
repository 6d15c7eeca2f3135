use itertools::Itertools;

use super::{Dilemma, Formula, FormulaError};

/// Largest weak dilemma expanded into its disjunction (31 disjuncts).
pub const DEFAULT_EXPANSION_CAP: usize = 5;

/// Atom used to encode `true` as `a -> a`.
pub const RESERVED_ATOM: &str = "__top";

/// Nonempty subsets of `0..n`, by size and then lexicographically.
pub fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    (1..=n).flat_map(|k| (0..n).combinations(k)).collect()
}

/// The weak dilemma abbreviation written out as a right-nested disjunction
/// of strict dilemmas over every nonempty subset of its members.
pub fn expand_weak(d: &Dilemma) -> Formula {
    Formula::disjunction(nonempty_subsets(d.members.len()).into_iter().map(|idx| {
        Formula::StrictDilemma(Dilemma {
            coalition: d.coalition.clone(),
            members: d.members.select(&idx),
            sacrifice: d.sacrifice.clone(),
        })
    }))
}

fn top() -> Formula {
    Formula::implies(Formula::prop(RESERVED_ATOM), Formula::prop(RESERVED_ATOM))
}

/// Rewrites into the core grammar (atoms, `!`, `->`, strict dilemmas).
pub fn normalize(f: &Formula) -> Result<Formula, FormulaError> {
    normalize_with_cap(f, DEFAULT_EXPANSION_CAP)
}

pub fn normalize_with_cap(f: &Formula, cap: usize) -> Result<Formula, FormulaError> {
    to_core(f, cap, true)
}

/// Total variant of [`normalize`]: weak dilemmas above the default cap are
/// kept as weak nodes (with normalized members) instead of failing.
pub fn canonical(f: &Formula) -> Formula {
    to_core(f, DEFAULT_EXPANSION_CAP, false).expect("lenient normalization is total")
}

fn to_core(f: &Formula, cap: usize, strict: bool) -> Result<Formula, FormulaError> {
    let rec = |g: &Formula| to_core(g, cap, strict);
    Ok(match f {
        Formula::Prop(_) => f.clone(),
        Formula::Top => top(),
        Formula::Bottom => Formula::not(top()),
        Formula::Neg(g) => Formula::not(rec(g)?),
        Formula::Implies(l, r) => Formula::implies(rec(l)?, rec(r)?),
        Formula::And(l, r) => Formula::not(Formula::implies(rec(l)?, Formula::not(rec(r)?))),
        Formula::Or(l, r) => Formula::implies(Formula::not(rec(l)?), rec(r)?),
        Formula::StrictDilemma(d) => Formula::StrictDilemma(core_dilemma(d, cap, strict)?),
        Formula::WeakDilemma(d) => {
            let n = d.members.len();
            if n > cap {
                if strict {
                    return Err(FormulaError::ExpansionCap { members: n, cap });
                }
                return Ok(Formula::WeakDilemma(core_dilemma(d, cap, strict)?));
            }
            let core = core_dilemma(d, cap, strict)?;
            let mut disjuncts: Vec<Formula> = nonempty_subsets(n)
                .into_iter()
                .map(|idx| {
                    Formula::StrictDilemma(Dilemma {
                        coalition: core.coalition.clone(),
                        members: core.members.select(&idx),
                        sacrifice: core.sacrifice.clone(),
                    })
                })
                .collect();
            let mut acc = disjuncts.pop().expect("at least one nonempty subset");
            while let Some(d) = disjuncts.pop() {
                acc = Formula::implies(Formula::not(d), acc);
            }
            acc
        }
    })
}

fn core_dilemma(d: &Dilemma, cap: usize, strict: bool) -> Result<Dilemma, FormulaError> {
    if strict {
        for m in d.members.iter() {
            to_core(m, cap, true)?;
        }
    }
    Ok(Dilemma {
        coalition: d.coalition.clone(),
        members: d
            .members
            .map_preserving_keys(|m| to_core(m, cap, strict).expect("checked above")),
        sacrifice: d.sacrifice.clone(),
    })
}
