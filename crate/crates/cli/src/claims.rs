//! The worked claims about the two village games.

use serde_json::json;
use trolley_core::checker::{CheckContext, CheckError, Limits};
use trolley_core::formula::parse_formula;
use trolley_core::game::fixtures::{g_village2, village1_with_cap};
use trolley_core::game::Game;

pub struct Claim {
    pub game: &'static str,
    pub formula: &'static str,
    pub expected: bool,
}

pub const CLAIMS: &[Claim] = &[
    Claim { game: "village1", formula: "[m_a : d1, d2, d3 @ m_a:2, m_b:2]", expected: true },
    Claim { game: "village1", formula: "[m_b : d2, d3, d4 @ m_a:2, m_b:2]", expected: false },
    Claim { game: "village1", formula: "[m_b : d2, d3 | d4 @ m_a:2, m_b:2]", expected: true },
    Claim { game: "village1", formula: "[m_b : d2, d3 & d4 @ m_a:2, m_b:1]", expected: true },
    Claim { game: "village2", formula: "[m_a : d1, d2, d3, d4 @ m_a:2, m_pa:1]", expected: false },
    Claim { game: "village2", formula: "[m_pa : d1, d2, d3, d4 @ m_a:2, m_pa:1]", expected: false },
    Claim { game: "village2", formula: "[m_a, m_pa : d1, d2, d3, d4 @ m_a:2, m_pa:1]", expected: true },
];

pub struct Row {
    pub claim: &'static Claim,
    pub actual: bool,
}

impl Row {
    pub fn matches(&self) -> bool {
        self.actual == self.claim.expected
    }
}

/// Evaluates every claim at `init`; `mb_cap` rebuilds the first game with a
/// different dose limit for `m_b`.
pub fn evaluate(mb_cap: u32, limits: Limits) -> Result<Vec<Row>, CheckError> {
    let first = village1_with_cap(mb_cap);
    let second = g_village2();
    let mut rows = Vec::with_capacity(CLAIMS.len());
    for claim in CLAIMS {
        let game: &Game = if claim.game == "village1" { &first } else { &second };
        let mut ctx = CheckContext::new(game).with_limits(limits);
        let w = ctx.state("init")?;
        let f = parse_formula(claim.formula).expect("claims are well formed");
        rows.push(Row {
            claim,
            actual: ctx.satisfies(w, &f)?,
        });
    }
    Ok(rows)
}

pub fn to_json(rows: &[Row]) -> serde_json::Value {
    let items: Vec<_> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "claim": i + 1,
                "game": r.claim.game,
                "formula": r.claim.formula,
                "expected": r.claim.expected,
                "actual": r.actual,
                "pass": r.matches(),
            })
        })
        .collect();
    json!({ "claims": items, "all_pass": rows.iter().all(Row::matches) })
}

pub fn to_table(rows: &[Row]) -> String {
    let width = CLAIMS.iter().map(|c| c.formula.len()).max().unwrap_or(0);
    let word = |b: bool| if b { "TRUE" } else { "FALSE" };
    let mut out = format!("{:<3} {:<9} {:<width$} {:<8} {:<8} RESULT\n", "#", "GAME", "FORMULA", "EXPECTED", "ACTUAL");
    for (i, r) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{:<3} {:<9} {:<width$} {:<8} {:<8} {}\n",
            i + 1,
            r.claim.game,
            r.claim.formula,
            word(r.claim.expected),
            word(r.actual),
            if r.matches() { "PASS" } else { "FAIL" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use trolley_core::game::fixtures::DEFAULT_MB_CAP;

    #[test]
    fn shipped_games_match() {
        let rows = evaluate(DEFAULT_MB_CAP, Limits::default()).unwrap();
        assert!(rows.iter().all(Row::matches));
        assert_eq!(to_json(&rows)["all_pass"], true);
    }

    #[test]
    fn table_has_a_row_per_claim() {
        let rows = evaluate(DEFAULT_MB_CAP, Limits::default()).unwrap();
        assert_eq!(to_table(&rows).lines().count(), CLAIMS.len() + 1);
    }
}
