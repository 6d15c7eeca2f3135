use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{canonical, Formula};

/// Largest number of distinct atoms accepted by the truth-table check.
pub const ATOM_BUDGET: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{atoms} distinct atoms exceed the tautology budget of {ATOM_BUDGET}")]
pub struct AtomBudgetExceeded {
    pub atoms: usize,
}

fn collect(f: &Formula, atoms: &mut HashMap<Formula, usize>) {
    match f {
        Formula::Neg(g) => collect(g, atoms),
        Formula::Implies(l, r) | Formula::And(l, r) | Formula::Or(l, r) => {
            collect(l, atoms);
            collect(r, atoms);
        }
        Formula::Top | Formula::Bottom => {}
        _ => {
            let next = atoms.len();
            atoms.entry(f.clone()).or_insert(next);
        }
    }
}

fn eval(f: &Formula, atoms: &HashMap<Formula, usize>, row: u32) -> bool {
    match f {
        Formula::Neg(g) => !eval(g, atoms, row),
        Formula::Implies(l, r) => !eval(l, atoms, row) || eval(r, atoms, row),
        Formula::And(l, r) => eval(l, atoms, row) && eval(r, atoms, row),
        Formula::Or(l, r) => eval(l, atoms, row) || eval(r, atoms, row),
        Formula::Top => true,
        Formula::Bottom => false,
        _ => row >> atoms[f] & 1 == 1,
    }
}

/// Truth-table check over the canonical form, with propositional variables
/// and dilemma subformulas as opaque atoms.
pub fn check_taut(f: &Formula) -> Result<bool, AtomBudgetExceeded> {
    let core = canonical(f);
    let mut atoms = HashMap::new();
    collect(&core, &mut atoms);
    if atoms.len() > ATOM_BUDGET {
        return Err(AtomBudgetExceeded { atoms: atoms.len() });
    }
    Ok((0..1u32 << atoms.len()).all(|row| eval(&core, &atoms, row)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn taut(s: &str) -> bool {
        check_taut(&parse_formula(s).unwrap()).unwrap()
    }

    #[test]
    fn basics() {
        assert!(taut("p -> p"));
        assert!(!taut("p -> q"));
        assert!(taut("true"));
        assert!(!taut("false"));
        assert!(taut("(p & q) -> (q | r)"));
        assert!(taut("!!p -> p"));
    }

    #[test]
    fn dilemmas_are_opaque() {
        assert!(taut("[a : p, q @ *:1] -> [[a : p, q @ *:1]]"));
        assert!(!taut("[a : p @ *:1] -> [a : p, q @ *:1]"));
        assert!(taut("[a : p & q @ *:1] -> [a : q & p @ *:1] -> [a : p & q @ *:1]"));
        // members are compared after normalization
        assert!(taut("[a : p | q @ *:1] -> [a : !p -> q @ *:1]"));
    }

    #[test]
    fn budget() {
        let wide = (0..17).map(|i| format!("p{i}")).collect::<Vec<_>>().join(" | ");
        let f = parse_formula(&format!("{wide} -> {wide}")).unwrap();
        assert_eq!(check_taut(&f), Err(AtomBudgetExceeded { atoms: 17 }));
    }
}
