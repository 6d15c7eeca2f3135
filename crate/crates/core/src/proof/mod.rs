//! Checker for Hilbert-style derivations: propositional tautologies (with
//! dilemmas as opaque atoms), four axiom schemas, and the rules Modus Ponens,
//! Necessitation and Substitution.
//!
//! Scripts are concrete instances; there are no metavariables. Every line is
//! compared to its justification after canonicalization.

mod axiom;
pub mod corpus;
mod taut;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{canonical, format_formula, parse_formula, Formula, FormulaError, FormulaSet};

pub use axiom::{match_axiom, Schema};
pub use taut::{check_taut, AtomBudgetExceeded, ATOM_BUDGET};

use axiom::{as_implies, as_strict, as_weak, same_sacrifice};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Taut,
    Axiom(Schema),
    Mp(usize, usize),
    Nec(usize),
    Subst {
        premises: Vec<usize>,
        map: Vec<(Formula, Formula)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub n: usize,
    pub formula: Formula,
    pub by: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofScript {
    /// Agent universe over which wildcard sacrifices are resolved.
    pub agents: Vec<String>,
    pub lines: Vec<ProofLine>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptFile {
    agents: Vec<String>,
    lines: Vec<LineFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LineFile {
    n: usize,
    formula: String,
    by: ByFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ByFile {
    Name(String),
    Rule(RuleFile),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum RuleFile {
    Mp([usize; 2]),
    Nec(usize),
    Subst(SubstFile),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubstFile {
    premises: Vec<usize>,
    map: Vec<[String; 2]>,
}

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("invalid proof script: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {n}: {source}")]
    Formula {
        n: usize,
        #[source]
        source: FormulaError,
    },
    #[error("line {n}: unknown justification `{name}`")]
    UnknownJustification { n: usize, name: String },
    #[error("line {n}: line numbers must be positive and strictly increasing")]
    Numbering { n: usize },
}

/// Why one line fails its justification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("cites line {0}, which does not precede it")]
    BadReference(usize),
    #[error("not a propositional tautology")]
    NotTautology,
    #[error(transparent)]
    AtomBudget(#[from] AtomBudgetExceeded),
    #[error("not an instance of the {0} axiom")]
    NotAxiom(Schema),
    #[error("line {1} is not the implication from line {0} to this line")]
    ModusPonens(usize, usize),
    #[error("not a single-member dilemma over line {0}")]
    Necessitation(usize),
    #[error("substitution map lists a member twice")]
    SubstDuplicateDomain,
    #[error("premises differ from the implications given by the map")]
    SubstPremises,
    #[error("map domain differs from the dilemma members")]
    SubstDomain,
    #[error("not of the form [C : X @ s] -> [[C : tau(X) @ s]] for the map")]
    SubstShape,
}

fn formula_at(n: usize, text: &str) -> Result<Formula, ScriptError> {
    parse_formula(text).map_err(|source| ScriptError::Formula { n, source })
}

pub fn parse_script(text: &str) -> Result<ProofScript, ScriptError> {
    let file: ScriptFile = serde_json::from_str(text)?;
    let mut lines = Vec::with_capacity(file.lines.len());
    let mut last = 0;
    for l in file.lines {
        if l.n <= last {
            return Err(ScriptError::Numbering { n: l.n });
        }
        last = l.n;
        let by = match l.by {
            ByFile::Name(name) => match name.as_str() {
                "taut" => Justification::Taut,
                "ax:combination" => Justification::Axiom(Schema::Combination),
                "ax:monotonicity" => Justification::Axiom(Schema::Monotonicity),
                "ax:minimality" => Justification::Axiom(Schema::Minimality),
                "ax:noalt" => Justification::Axiom(Schema::NoAlternatives),
                _ => return Err(ScriptError::UnknownJustification { n: l.n, name }),
            },
            ByFile::Rule(RuleFile::Mp([i, j])) => Justification::Mp(i, j),
            ByFile::Rule(RuleFile::Nec(i)) => Justification::Nec(i),
            ByFile::Rule(RuleFile::Subst(s)) => Justification::Subst {
                premises: s.premises,
                map: s
                    .map
                    .iter()
                    .map(|[a, b]| Ok((formula_at(l.n, a)?, formula_at(l.n, b)?)))
                    .collect::<Result<_, ScriptError>>()?,
            },
        };
        lines.push(ProofLine {
            n: l.n,
            formula: formula_at(l.n, &l.formula)?,
            by,
        });
    }
    Ok(ProofScript {
        agents: file.agents,
        lines,
    })
}

pub fn serialize_script(script: &ProofScript) -> String {
    let lines = script
        .lines
        .iter()
        .map(|l| LineFile {
            n: l.n,
            formula: format_formula(&l.formula),
            by: match &l.by {
                Justification::Taut => ByFile::Name("taut".into()),
                Justification::Axiom(s) => ByFile::Name(format!("ax:{}", s.name())),
                Justification::Mp(i, j) => ByFile::Rule(RuleFile::Mp([*i, *j])),
                Justification::Nec(i) => ByFile::Rule(RuleFile::Nec(*i)),
                Justification::Subst { premises, map } => ByFile::Rule(RuleFile::Subst(SubstFile {
                    premises: premises.clone(),
                    map: map
                        .iter()
                        .map(|(a, b)| [format_formula(a), format_formula(b)])
                        .collect(),
                })),
            },
        })
        .collect();
    serde_json::to_string_pretty(&ScriptFile {
        agents: script.agents.clone(),
        lines,
    })
    .expect("scripts serialize")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineVerdict {
    pub n: usize,
    pub outcome: Result<(), StepError>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofVerdict {
    pub lines: Vec<LineVerdict>,
}

impl ProofVerdict {
    pub fn accepted(&self) -> bool {
        self.lines.iter().all(|l| l.outcome.is_ok())
    }

    pub fn first_failure(&self) -> Option<&LineVerdict> {
        self.lines.iter().find(|l| l.outcome.is_err())
    }
}

fn cited(script: &ProofScript, at: usize, n: usize) -> Result<&Formula, StepError> {
    script.lines[..at]
        .iter()
        .find(|l| l.n == n)
        .map(|l| &l.formula)
        .ok_or(StepError::BadReference(n))
}

fn key(f: &Formula) -> String {
    format_formula(&canonical(f))
}

/// Checks line `at` (a position in `script.lines`) against its justification.
/// Cited lines are taken as given.
pub fn check_step(script: &ProofScript, at: usize) -> Result<(), StepError> {
    let line = &script.lines[at];
    let this = canonical(&line.formula);
    match &line.by {
        Justification::Taut => {
            if check_taut(&this)? {
                Ok(())
            } else {
                Err(StepError::NotTautology)
            }
        }
        Justification::Axiom(schema) => {
            if match_axiom(&this, *schema, &script.agents) {
                Ok(())
            } else {
                Err(StepError::NotAxiom(*schema))
            }
        }
        Justification::Mp(i, j) => {
            let a = cited(script, at, *i)?;
            let b = cited(script, at, *j)?;
            if canonical(b) == Formula::implies(canonical(a), this) {
                Ok(())
            } else {
                Err(StepError::ModusPonens(*i, *j))
            }
        }
        Justification::Nec(i) => {
            let premise = cited(script, at, *i)?;
            match as_strict(&this) {
                Some(d) if d.members == FormulaSet::new([premise.clone()]) => Ok(()),
                _ => Err(StepError::Necessitation(*i)),
            }
        }
        Justification::Subst { premises, map } => {
            let mut given = BTreeSet::new();
            for &p in premises {
                given.insert(key(cited(script, at, p)?));
            }
            let domain = FormulaSet::new(map.iter().map(|(a, _)| a.clone()));
            if domain.len() != map.len() {
                return Err(StepError::SubstDuplicateDomain);
            }
            let wanted: BTreeSet<String> = map
                .iter()
                .map(|(a, b)| key(&Formula::implies(a.clone(), b.clone())))
                .collect();
            if given != wanted {
                return Err(StepError::SubstPremises);
            }
            let Some((lhs, rhs)) = as_implies(&this) else {
                return Err(StepError::SubstShape);
            };
            let (Some(x), Some(y)) = (as_strict(lhs), as_weak(rhs)) else {
                return Err(StepError::SubstShape);
            };
            if x.members != domain {
                return Err(StepError::SubstDomain);
            }
            let image = FormulaSet::new(map.iter().map(|(_, b)| b.clone()));
            if x.coalition == y.coalition
                && same_sacrifice(&x.sacrifice, &y.sacrifice, &script.agents)
                && y.members == image
            {
                Ok(())
            } else {
                Err(StepError::SubstShape)
            }
        }
    }
}

pub fn check_proof(script: &ProofScript) -> ProofVerdict {
    ProofVerdict {
        lines: (0..script.lines.len())
            .map(|at| LineVerdict {
                n: script.lines[at].n,
                outcome: check_step(script, at),
            })
            .collect(),
    }
}
