use std::fmt::Write;

use super::{Coalition, Dilemma, Formula, SacrificeMap};
use crate::rational::format_rational;

/// Canonical text: binary connectives always parenthesized, coalition and
/// sacrifice entries sorted, members in set order.
pub fn format_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Prop(p) => out.push_str(p),
        Formula::Top => out.push_str("true"),
        Formula::Bottom => out.push_str("false"),
        Formula::Neg(g) => {
            out.push('!');
            write_formula(out, g);
        }
        Formula::Implies(l, r) => write_binary(out, l, "->", r),
        Formula::And(l, r) => write_binary(out, l, "&", r),
        Formula::Or(l, r) => write_binary(out, l, "|", r),
        Formula::StrictDilemma(d) => {
            out.push('[');
            write_dilemma(out, d);
            out.push(']');
        }
        Formula::WeakDilemma(d) => {
            out.push_str("[[");
            write_dilemma(out, d);
            out.push_str("]]");
        }
    }
}

fn write_binary(out: &mut String, l: &Formula, op: &str, r: &Formula) {
    out.push('(');
    write_formula(out, l);
    let _ = write!(out, " {op} ");
    write_formula(out, r);
    out.push(')');
}

fn write_dilemma(out: &mut String, d: &Dilemma) {
    out.push_str(&format_coalition(&d.coalition));
    out.push_str(" : ");
    for (i, m) in d.members.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_formula(out, m);
    }
    out.push_str(" @ ");
    out.push_str(&format_sacrifice(&d.sacrifice));
}

pub fn format_coalition(c: &Coalition) -> String {
    c.agents().collect::<Vec<_>>().join(", ")
}

/// `a:2, b:1/2, *:0`; explicit entries sorted, wildcard last.
pub fn format_sacrifice(s: &SacrificeMap) -> String {
    let mut parts: Vec<String> = s
        .bounds()
        .iter()
        .map(|(a, r)| format!("{a}:{}", format_rational(r)))
        .collect();
    if let Some(w) = s.wildcard() {
        parts.push(format!("*:{}", format_rational(w)));
    }
    parts.join(", ")
}
