use std::collections::BTreeMap;
use std::fmt;

use crate::formula::{canonical, Coalition, Dilemma, Formula, SacrificeMap};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schema {
    Combination,
    Monotonicity,
    Minimality,
    NoAlternatives,
}

impl Schema {
    pub const ALL: [Schema; 4] = [
        Schema::Combination,
        Schema::Monotonicity,
        Schema::Minimality,
        Schema::NoAlternatives,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::Combination => "combination",
            Schema::Monotonicity => "monotonicity",
            Schema::Minimality => "minimality",
            Schema::NoAlternatives => "noalt",
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reads a canonical formula as a weak dilemma: either a weak node kept
/// above the expansion cap, or exactly the expansion of one.
pub(crate) fn as_weak(f: &Formula) -> Option<Dilemma> {
    if let Formula::WeakDilemma(d) = f {
        return Some(d.clone());
    }
    let mut last = f;
    while let Formula::Implies(l, r) = last {
        if !matches!(**l, Formula::Neg(_)) {
            return None;
        }
        last = r;
    }
    let Formula::StrictDilemma(d) = last else {
        return None;
    };
    (canonical(&Formula::weak(d.clone())) == *f).then(|| d.clone())
}

pub(crate) fn as_strict(f: &Formula) -> Option<&Dilemma> {
    match f {
        Formula::StrictDilemma(d) => Some(d),
        _ => None,
    }
}

pub(crate) fn as_implies(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Implies(l, r) => Some((l, r)),
        _ => None,
    }
}

fn resolve(s: &SacrificeMap, universe: &[String]) -> Option<BTreeMap<String, Rational>> {
    s.resolve_over(universe.iter().map(String::as_str)).ok()
}

pub(crate) fn same_sacrifice(a: &SacrificeMap, b: &SacrificeMap, universe: &[String]) -> bool {
    match (resolve(a, universe), resolve(b, universe)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// `low <= high` pointwise over the universe.
fn sacrifice_le(low: &SacrificeMap, high: &SacrificeMap, universe: &[String]) -> bool {
    match (resolve(low, universe), resolve(high, universe)) {
        (Some(x), Some(y)) => x.iter().all(|(a, v)| *v <= y[a]),
        _ => false,
    }
}

fn in_universe(c: &Coalition, universe: &[String]) -> bool {
    c.agents().all(|a| universe.iter().any(|u| u == a))
}

/// Whether `f` instantiates the schema with every side condition met.
/// Sacrifices are compared after resolving over `universe`.
pub fn match_axiom(f: &Formula, schema: Schema, universe: &[String]) -> bool {
    let f = canonical(f);
    let Some((lhs, rhs)) = as_implies(&f) else {
        return false;
    };
    let Some(x) = as_strict(lhs) else {
        return false;
    };
    if !in_universe(&x.coalition, universe) {
        return false;
    }
    match schema {
        Schema::Combination => {
            let Some((mid, concl)) = as_implies(rhs) else {
                return false;
            };
            let (Some(y), Some(z)) = (as_strict(mid), as_weak(concl)) else {
                return false;
            };
            x.coalition == y.coalition
                && x.coalition == z.coalition
                && same_sacrifice(&x.sacrifice, &y.sacrifice, universe)
                && same_sacrifice(&x.sacrifice, &z.sacrifice, universe)
                && z.members == x.members.tensor(&y.members)
        }
        Schema::Monotonicity => {
            let Some(d) = as_weak(rhs) else {
                return false;
            };
            in_universe(&d.coalition, universe)
                && x.coalition.is_subset(&d.coalition)
                && d.members == x.members
                && sacrifice_le(&d.sacrifice, &x.sacrifice, universe)
        }
        Schema::Minimality => {
            let Formula::Neg(inner) = rhs else {
                return false;
            };
            let Some(y) = as_strict(inner) else {
                return false;
            };
            y.coalition == x.coalition
                && same_sacrifice(&x.sacrifice, &y.sacrifice, universe)
                && y.members.len() < x.members.len()
                && y.members.is_subset(&x.members)
        }
        Schema::NoAlternatives => {
            let Some(d) = as_strict(rhs) else {
                return false;
            };
            x.members.len() == 1
                && d.members == x.members
                && in_universe(&d.coalition, universe)
                && same_sacrifice(&x.sacrifice, &d.sacrifice, universe)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn m(s: &str, schema: Schema) -> bool {
        let universe = vec!["a".to_string(), "b".to_string()];
        match_axiom(&parse_formula(s).unwrap(), schema, &universe)
    }

    #[test]
    fn combination() {
        use Schema::Combination as C;
        assert!(m("[a : p @ *:1] -> [a : q @ *:1] -> [[a : p & q @ *:1]]", C));
        assert!(m("[a : p @ *:1] -> [a : q @ *:1] -> [a : p & q @ *:1]", C));
        assert!(m(
            "[a : p, q @ *:1] -> [a : r @ *:1] -> [[a : p & r, q & r @ a:1, b:1]]",
            C
        ));
        // single bracket conclusion with two members
        assert!(!m("[a : p, q @ *:1] -> [a : r @ *:1] -> [a : p & r, q & r @ *:1]", C));
        // wrong order inside the conjunction
        assert!(!m("[a : p @ *:1] -> [a : q @ *:1] -> [[a : q & p @ *:1]]", C));
        assert!(!m("[a : p @ *:1] -> [b : q @ *:1] -> [[a : p & q @ *:1]]", C));
        assert!(!m("[a : p @ *:1] -> [a : q @ *:2] -> [[a : p & q @ *:1]]", C));
        // agent outside the universe
        assert!(!m("[c : p @ *:1] -> [c : q @ *:1] -> [[c : p & q @ *:1]]", C));
    }

    #[test]
    fn combination_tensor_instance() {
        assert!(m(
            "[a : p, q @ *:1] -> [a : p, q @ *:1] -> [[a : p & p, p & q, q & p, q & q @ *:1]]",
            Schema::Combination
        ));
        assert!(!m(
            "[a : p, q @ *:1] -> [a : p, q @ *:1] -> [a : p & p, p & q, q & p, q & q @ *:1]",
            Schema::Combination
        ));
    }

    #[test]
    fn monotonicity() {
        use Schema::Monotonicity as M;
        assert!(m("[a : p, q @ *:2] -> [[a, b : p, q @ *:1]]", M));
        assert!(m("[a : p, q @ *:1] -> [[a : p, q @ *:1]]", M));
        assert!(m("[a : p @ a:1, b:3] -> [a, b : p @ a:1, b:-1/2]", M));
        assert!(!m("[a : p, q @ *:1] -> [[a, b : p, q @ *:2]]", M));
        assert!(!m("[a, b : p, q @ *:1] -> [[a : p, q @ *:1]]", M));
        assert!(!m("[a : p, q @ *:2] -> [a, b : p, q @ *:1]", M));
        assert!(!m("[a : p, q @ a:2] -> [[a : p, q @ a:1]]", M));
    }

    #[test]
    fn minimality() {
        use Schema::Minimality as M;
        assert!(m("[a : p, q @ *:1] -> ![a : p @ *:1]", M));
        assert!(m("[a : p, q, r @ *:1] -> ![a : r, p @ *:1]", M));
        assert!(!m("[a : p, q @ *:1] -> ![a : p, q @ *:1]", M));
        assert!(!m("[a : p @ *:1] -> ![a : p, q @ *:1]", M));
        assert!(!m("[a : p, q @ *:1] -> ![b : p @ *:1]", M));
        assert!(!m("[a : p, q @ *:1] -> ![[a : p @ *:1]] -> p", M));
    }

    #[test]
    fn no_alternatives() {
        use Schema::NoAlternatives as N;
        assert!(m("[a : p @ *:1] -> [b : p @ *:1]", N));
        assert!(m("[a, b : p @ *:1] -> [a : p @ a:1, b:1]", N));
        assert!(!m("[a : p, q @ *:1] -> [b : p, q @ *:1]", N));
        assert!(!m("[a : p @ *:1] -> [b : p @ *:2]", N));
    }

    #[test]
    fn as_weak_reads_expansions() {
        let d = as_weak(&canonical(&parse_formula("[[a : p, q @ *:1]]").unwrap())).unwrap();
        assert_eq!(d.members.len(), 2);
        assert!(as_weak(&canonical(&parse_formula("[a : p, q @ *:1]").unwrap())).is_none());
        assert!(as_weak(&canonical(&parse_formula("[a : p @ *:1]").unwrap())).is_some());
        assert!(as_weak(&canonical(&parse_formula("![a : p @ *:1] -> [a : p, q @ *:1]").unwrap())).is_none());
    }
}
