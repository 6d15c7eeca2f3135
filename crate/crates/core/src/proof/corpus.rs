//! Shipped derivations of derived lemmas, and mutated copies that must be
//! rejected at a known line.

/// (name, script text) for every accepted lemma script.
pub const LEMMAS: &[(&str, &str)] = &[
    ("alpha", include_str!("../../fixtures/proofs/alpha.json")),
    ("asymmetric_n2", include_str!("../../fixtures/proofs/asymmetric_n2.json")),
    ("beta", include_str!("../../fixtures/proofs/beta.json")),
    ("combination_double_1x1", include_str!("../../fixtures/proofs/combination_double_1x1.json")),
    ("combination_double_2x1", include_str!("../../fixtures/proofs/combination_double_2x1.json")),
    ("gamma", include_str!("../../fixtures/proofs/gamma.json")),
    ("monotonicity_double", include_str!("../../fixtures/proofs/monotonicity_double.json")),
    ("nec_weak", include_str!("../../fixtures/proofs/nec_weak.json")),
    ("noalt_double", include_str!("../../fixtures/proofs/noalt_double.json")),
    ("otimes_chain_n2", include_str!("../../fixtures/proofs/otimes_chain_n2.json")),
    ("subst_double", include_str!("../../fixtures/proofs/subst_double.json")),
    ("vee_n2", include_str!("../../fixtures/proofs/vee_n2.json")),
    ("wedge_n2", include_str!("../../fixtures/proofs/wedge_n2.json")),
];

/// (name, script text, first failing line).
pub const MUTATIONS: &[(&str, &str, usize)] = &[
    (
        "alpha_tampered",
        include_str!("../../fixtures/proofs/mutations/alpha_tampered.json"),
        1,
    ),
    (
        "beta_tampered",
        include_str!("../../fixtures/proofs/mutations/beta_tampered.json"),
        2,
    ),
    (
        "combination_double_2x1_tampered",
        include_str!("../../fixtures/proofs/mutations/combination_double_2x1_tampered.json"),
        7,
    ),
    (
        "combination_single_bracket",
        include_str!("../../fixtures/proofs/mutations/combination_single_bracket.json"),
        2,
    ),
    (
        "gamma_tampered",
        include_str!("../../fixtures/proofs/mutations/gamma_tampered.json"),
        1,
    ),
    (
        "monotonicity_wrong_direction",
        include_str!("../../fixtures/proofs/mutations/monotonicity_wrong_direction.json"),
        1,
    ),
    (
        "nec_weak_tampered",
        include_str!("../../fixtures/proofs/mutations/nec_weak_tampered.json"),
        2,
    ),
    (
        "noalt_double_pair",
        include_str!("../../fixtures/proofs/mutations/noalt_double_pair.json"),
        1,
    ),
    (
        "subst_double_wrong_image",
        include_str!("../../fixtures/proofs/mutations/subst_double_wrong_image.json"),
        5,
    ),
    (
        "vee_n2_tampered",
        include_str!("../../fixtures/proofs/mutations/vee_n2_tampered.json"),
        5,
    ),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::proof::{check_proof, parse_script};

    #[test]
    fn lemmas_are_accepted() {
        for (name, text) in LEMMAS {
            let v = check_proof(&parse_script(text).unwrap());
            assert!(v.accepted(), "{name}: {:?}", v.first_failure());
        }
    }

    #[test]
    fn mutations_fail_at_the_expected_line() {
        for (name, text, line) in MUTATIONS {
            let v = check_proof(&parse_script(text).unwrap());
            assert_eq!(v.first_failure().map(|l| l.n), Some(*line), "{name}");
        }
    }

    #[test]
    fn negating_any_line_fails_there() {
        for (name, text) in LEMMAS {
            let script = parse_script(text).unwrap();
            for k in 0..script.lines.len() {
                let mut m = script.clone();
                m.lines[k].formula = Formula::not(m.lines[k].formula.clone());
                let v = check_proof(&m);
                assert_eq!(v.first_failure().map(|l| l.n), Some(script.lines[k].n), "{name} line {k}");
            }
        }
    }

    #[test]
    fn removing_an_unreferenced_line_keeps_verdicts() {
        let (_, text) = LEMMAS.iter().find(|(n, _)| *n == "beta").unwrap();
        let mut script = parse_script(text).unwrap();
        let before = check_proof(&script);
        script.lines.insert(
            0,
            crate::proof::ProofLine {
                n: 0,
                formula: crate::formula::parse_formula("q -> q").unwrap(),
                by: crate::proof::Justification::Taut,
            },
        );
        let after = check_proof(&script);
        assert_eq!(after.lines[1..], before.lines[..]);
    }
}
