//! Canonical printing: terms in decreasing graded-lex order, explicit `*`
//! and `^`, negative powers written as a trailing division.

use num_traits::{One, Signed};

use super::{Monomial, Poly, Rational, Vars};

fn factor_list(vars: &Vars, m: &Monomial, negative: bool) -> Vec<String> {
    let mut out = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        let e = if negative { -e } else { e };
        if e <= 0 {
            continue;
        }
        if e == 1 {
            out.push(vars.name(i).to_string());
        } else {
            out.push(format!("{}^{}", vars.name(i), e));
        }
    }
    out
}

fn term_body(vars: &Vars, m: &Monomial, abs: &Rational) -> String {
    let num = factor_list(vars, m, false);
    let den = factor_list(vars, m, true);
    let den = match den.len() {
        0 => String::new(),
        1 => format!("/{}", den[0]),
        _ => format!("/({})", den.join("*")),
    };
    if num.is_empty() {
        format!("{abs}{den}")
    } else if abs.is_one() {
        format!("{}{den}", num.join("*"))
    } else {
        format!("{abs}*{}{den}", num.join("*"))
    }
}

pub(crate) fn poly_to_string(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut s = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let body = term_body(p.vars(), m, &c.abs());
        if k == 0 {
            if c.is_negative() {
                s.push('-');
            }
        } else if c.is_negative() {
            s.push_str(" - ");
        } else {
            s.push_str(" + ");
        }
        s.push_str(&body);
    }
    s
}

impl Poly {
    /// Printed as a coefficient in front of a basis symbol: `None` for 1,
    /// bare for single terms, parenthesized otherwise. The bool is true when
    /// the whole coefficient should be written with a leading minus.
    pub fn coefficient_text(&self) -> (bool, Option<String>) {
        if self.num_terms() == 1 {
            let (m, c) = self.terms().next().unwrap();
            let neg = c.is_negative();
            if m.is_one() && c.abs().is_one() {
                return (neg, None);
            }
            return (neg, Some(term_body(self.vars(), m, &c.abs())));
        }
        (false, Some(format!("({})", poly_to_string(self))))
    }
}
