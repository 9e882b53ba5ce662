//! Canonical text form of tower elements. The output is accepted by the
//! expression parser and parses back to the same canonical element.

use num_traits::Signed;

use crate::algebra::numfield::AlgNumber;

use super::{Tower, TowerElem};

/// Name of the constant-field generator in expressions.
pub const CONSTANT_GENERATOR: &str = "rho";

impl Tower {
    /// Prints `e` in the expression grammar.
    pub fn format(&self, e: &TowerElem) -> String {
        match e {
            TowerElem::Const(c) => c.format_in(CONSTANT_GENERATOR),
            TowerElem::Rat(n) => {
                let num = self.format_poly(n.slot, &n.num);
                if n.den.len() == 1 {
                    return num;
                }
                // A single rational-coefficient monomial needs no parentheses
                // since products and quotients associate to the left.
                let nonzero: Vec<&TowerElem> = n.num.iter().filter(|c| !c.is_zero()).collect();
                let simple = nonzero.len() == 1 && matches!(nonzero[0].as_const(), Some(AlgNumber::Rat(_)));
                let den = self.format_poly(n.slot, &n.den);
                // A monic single-term denominator is a bare power of the
                // generator, which binds tighter than the quotient.
                let den_monomial = is_single_term(&den);
                // Fold the denominator of a rational numerator into the
                // quotient: 1/(2*x) rather than 1/2/(x).
                if let (true, Some(AlgNumber::Rat(q))) = (n.num.len() == 1, n.num[0].as_const()) {
                    if !q.is_integer() {
                        let scaled = if den_monomial { den } else { format!("({den})") };
                        return format!("{}/({}*{scaled})", q.numer(), q.denom());
                    }
                }
                match (simple, den_monomial) {
                    (true, true) => format!("{num}/{den}"),
                    (true, false) => format!("{num}/({den})"),
                    (false, true) => format!("({num})/{den}"),
                    (false, false) => format!("({num})/({den})"),
                }
            }
            TowerElem::Alg(n) => self.format_poly(n.slot, &n.coeffs),
        }
    }

    fn format_poly(&self, slot: usize, coeffs: &[TowerElem]) -> String {
        let name = &self.slots()[slot].name;
        let mut out = String::new();
        for (i, c) in coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => name.clone(),
                _ => format!("{name}^{i}"),
            };
            // Negative rational coefficients are printed with a minus sign.
            let (negative, body) = match c.as_const() {
                Some(AlgNumber::Rat(q)) if q.is_negative() => (true, TowerElem::rational(-q)),
                _ => (false, c.clone()),
            };
            let (negative, term) = if mono.is_empty() {
                let text = self.format(&body);
                // Fold a leading minus of a single-term constant into the
                // joining operator.
                match text.strip_prefix('-') {
                    Some(rest) if !negative && is_single_term(rest) => (true, rest.to_string()),
                    _ => (negative, text),
                }
            } else if matches!(body.as_const(), Some(AlgNumber::Rat(q)) if q == &num_traits::One::one()) {
                (negative, mono)
            } else if matches!(body.as_const(), Some(AlgNumber::Rat(_))) {
                (negative, format!("{}*{}", self.format(&body), mono))
            } else {
                (negative, format!("({})*{}", self.format(&body), mono))
            };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// True when `s` has no `+`/`-` operator outside parentheses.
fn is_single_term(s: &str) -> bool {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && i > 0 => return false,
            _ => {}
        }
    }
    true
}
