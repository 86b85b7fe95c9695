//! Text syntax for formulae.
//!
//! ```text
//! expr    := until_or ( "->" expr )?                 right-associative
//! or      := and ( "|" and )*
//! and     := until ( "&" until )*
//! until   := unary ( "U" until )?                    right-associative
//! unary   := ("!" | "X" | "F" | "G") unary | primary
//! primary := "true" | "false" | "(" expr ")" | name "(" [number ("," number)*] ")"
//! ```
//!
//! Predicate names match `[a-z][a-z0-9_]*`; operators are the uppercase letters
//! `X U F G`, so `FG a()` reads as `F (G a())`. `false` parses as `!true`.

use std::fmt;

use super::formula::LtlFormula;
use super::predicate::{PredicateInstance, Signature};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    LParen,
    RParen,
    Comma,
    Bang,
    Amp,
    Bar,
    Arrow,
    Next,
    Until,
    Eventually,
    Always,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            ',' => out.push((start, Tok::Comma)),
            '!' => out.push((start, Tok::Bang)),
            '&' => out.push((start, Tok::Amp)),
            '|' => out.push((start, Tok::Bar)),
            'X' => out.push((start, Tok::Next)),
            'U' => out.push((start, Tok::Until)),
            'F' => out.push((start, Tok::Eventually)),
            'G' => out.push((start, Tok::Always)),
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((start, Tok::Arrow));
                i += 2;
                continue;
            }
            c if c.is_ascii_lowercase() => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase()
                        || bytes[i].is_ascii_digit()
                        || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                i += 1;
                while i < bytes.len() {
                    let d = bytes[i];
                    let exp_sign = (d == b'-' || d == b'+') && matches!(bytes[i - 1], b'e' | b'E');
                    if d.is_ascii_digit() || d == b'.' || d == b'e' || d == b'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("invalid number `{lit}`")))?;
                out.push((start, Tok::Num(v)));
                continue;
            }
            other => return Err(syntax(start, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    sig: &'a Signature,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            Some(t) => Err(syntax(at, format!("expected {what}, found {t:?}"))),
            None => Err(syntax(at, format!("expected {what}, found end of input"))),
        }
    }

    fn implies(&mut self) -> Result<LtlFormula> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.implies()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<LtlFormula> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Bar) {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<LtlFormula> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            lhs = lhs.and(self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<LtlFormula> {
        let lhs = self.unary()?;
        if self.peek() == Some(&Tok::Until) {
            self.bump();
            let rhs = self.until()?;
            return Ok(lhs.until(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<LtlFormula> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Some(Tok::Next) => {
                self.bump();
                Ok(self.unary()?.next())
            }
            Some(Tok::Eventually) => {
                self.bump();
                Ok(self.unary()?.eventually())
            }
            Some(Tok::Always) => {
                self.bump();
                Ok(self.unary()?.always())
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<LtlFormula> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::LParen) => {
                let inner = self.implies()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) if name == "true" => Ok(LtlFormula::True),
            Some(Tok::Ident(name)) if name == "false" => Ok(LtlFormula::True.not()),
            Some(Tok::Ident(name)) => Ok(LtlFormula::Atom(self.atom_tail(name, at)?)),
            Some(t) => Err(syntax(at, format!("unexpected token {t:?}"))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }

    fn atom_tail(&mut self, name: String, _at: usize) -> Result<PredicateInstance> {
        self.expect(Tok::LParen, &format!("`(` after predicate `{name}`"))?;
        let mut params = Vec::new();
        if self.peek() != Some(&Tok::RParen) {
            loop {
                let at = self.offset();
                match self.bump() {
                    Some(Tok::Num(v)) => params.push(v),
                    _ => return Err(syntax(at, "expected numeric parameter")),
                }
                if self.peek() == Some(&Tok::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        let symbol = self.sig.resolve(&name, params.len())?;
        PredicateInstance::new(symbol, params)
    }

    fn finish(&self) -> Result<()> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some((o, t)) => Err(syntax(*o, format!("trailing input {t:?}"))),
        }
    }
}

pub fn parse_ltl(text: &str, sig: &Signature) -> Result<LtlFormula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        end: text.len(),
        sig,
    };
    let f = p.implies()?;
    p.finish()?;
    Ok(f)
}

/// Parses a single atom such as `at(0.0,0.0,1.0)`.
pub fn parse_atom(text: &str, sig: &Signature) -> Result<PredicateInstance> {
    match parse_ltl(text, sig)? {
        LtlFormula::Atom(p) => Ok(p),
        _ => Err(syntax(0, format!("`{text}` is not a single atom"))),
    }
}

const P_IMPLIES: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_UNTIL: u8 = 4;
const P_UNARY: u8 = 5;

fn prec(f: &LtlFormula) -> u8 {
    match f {
        LtlFormula::Implies(..) => P_IMPLIES,
        LtlFormula::Or(..) => P_OR,
        LtlFormula::And(..) => P_AND,
        LtlFormula::Until(..) => P_UNTIL,
        LtlFormula::Not(_)
        | LtlFormula::Next(_)
        | LtlFormula::Eventually(_)
        | LtlFormula::Always(_) => P_UNARY,
        LtlFormula::True | LtlFormula::Atom(_) => P_UNARY + 1,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, x: &LtlFormula, min: u8) -> fmt::Result {
    if prec(x) < min {
        write!(f, "(")?;
        write_formula(f, x)?;
        write!(f, ")")
    } else {
        write_formula(f, x)
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, x: &LtlFormula) -> fmt::Result {
    use LtlFormula as L;
    match x {
        L::True => write!(f, "true"),
        L::Atom(p) => write!(f, "{p}"),
        L::Not(a) => {
            write!(f, "!")?;
            write_at(f, a, P_UNARY)
        }
        L::Next(a) => {
            write!(f, "X ")?;
            write_at(f, a, P_UNARY)
        }
        L::Eventually(a) => {
            write!(f, "F ")?;
            write_at(f, a, P_UNARY)
        }
        L::Always(a) => {
            write!(f, "G ")?;
            write_at(f, a, P_UNARY)
        }
        L::Implies(a, b) => {
            write_at(f, a, P_IMPLIES + 1)?;
            write!(f, " -> ")?;
            write_at(f, b, P_IMPLIES)
        }
        L::Or(a, b) => {
            write_at(f, a, P_OR)?;
            write!(f, " | ")?;
            write_at(f, b, P_OR + 1)
        }
        L::And(a, b) => {
            write_at(f, a, P_AND)?;
            write!(f, " & ")?;
            write_at(f, b, P_AND + 1)
        }
        L::Until(a, b) => {
            write_at(f, a, P_UNTIL + 1)?;
            write!(f, " U ")?;
            write_at(f, b, P_UNTIL)
        }
    }
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> LtlFormula {
        parse_ltl(s, &Signature::permissive()).unwrap()
    }

    #[test]
    fn parses_blue_zone_atom() {
        let f = parse_ltl("F at(0.0,0.0,1.0)", &Signature::environments()).unwrap();
        let at = PredicateInstance::parse_free("at", &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(f, LtlFormula::Atom(at).eventually());
    }

    #[test]
    fn parses_true() {
        assert_eq!(parse("true"), LtlFormula::True);
    }

    #[test]
    fn precedence() {
        let a = LtlFormula::prop("a");
        let b = LtlFormula::prop("b");
        let c = LtlFormula::prop("c");
        assert_eq!(
            parse("!a() U (b() & F c())"),
            a.clone().not().until(b.clone().and(c.clone().eventually()))
        );
        assert_eq!(
            parse("a() U b() U c()"),
            a.clone().until(b.clone().until(c.clone()))
        );
        assert_eq!(
            parse("a() & b() | c()"),
            a.clone().and(b.clone()).or(c.clone())
        );
        assert_eq!(
            parse("a() -> b() -> c()"),
            a.clone().implies(b.clone().implies(c.clone()))
        );
        assert_eq!(
            parse("a() U b() & c()"),
            a.clone().until(b.clone()).and(c.clone())
        );
        assert_eq!(parse("FG a()"), a.always().eventually());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_ltl("F (a() & ", &Signature::permissive()),
            Err(Error::Syntax { position: 9, .. })
        ));
        assert!(matches!(
            parse_ltl("F loc(1.0)", &Signature::environments()),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(matches!(
            parse_ltl("F zone(1.0)", &Signature::strict([("at", 3)])),
            Err(Error::UnknownPredicate(_))
        ));
        assert!(matches!(
            parse_ltl("a() $ b()", &Signature::permissive()),
            Err(Error::Syntax { position: 4, .. })
        ));
    }

    #[test]
    fn prints_minimal_parens() {
        for s in [
            "!a() U (b() & F c())",
            "(a() -> b()) -> c()",
            "a() & (b() & c())",
            "(a() U b()) U c()",
            "G (a() | b()) -> F !c()",
            "X !true",
            "rad(0.55) | loc(3.0,4.0)",
        ] {
            let f = parse(s);
            assert_eq!(f.to_string(), s);
            assert_eq!(parse(&f.to_string()), f);
        }
    }
}
