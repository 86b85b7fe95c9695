//! HOA v1 interchange.
//!
//! Only state-based Büchi acceptance (`Acceptance: 1 Inf(0)`) is accepted. HOA
//! has no notion of ε edges, so they travel in a lowercase (tool-specific)
//! header, `eps-edges: src dst src dst ...`, which other tools will ignore.

use std::collections::{BTreeMap, HashMap};

use super::alphabet::Alphabet;
use super::ldba::{infer_components, Component, EpsilonEdge, Ldba};
use crate::error::{Error, Result};
use crate::ltl::{parse_atom, BooleanFormula, PredicateInstance, Signature};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Header(String),
    Int(usize),
    Str(String),
    Ident(String),
    Alias(String),
    Punct(char),
    Body,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let cs: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < cs.len() {
            let c = cs[i];
            if c.is_whitespace() {
                i += 1;
            } else if c == '/' && cs.get(i + 1) == Some(&'*') {
                // Comments may not span lines in the files we produce or accept.
                let rest: String = cs[i..].iter().collect();
                match rest.find("*/") {
                    Some(k) => i += rest[..k + 2].chars().count(),
                    None => return Err(hoa_err(line_no, "unterminated comment")),
                }
            } else if c == '"' {
                let mut s = String::new();
                i += 1;
                while i < cs.len() && cs[i] != '"' {
                    if cs[i] == '\\' && i + 1 < cs.len() {
                        i += 1;
                    }
                    s.push(cs[i]);
                    i += 1;
                }
                if i >= cs.len() {
                    return Err(hoa_err(line_no, "unterminated string"));
                }
                i += 1;
                out.push((Tok::Str(s), line_no));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = cs[start..i].iter().collect();
                let v = s
                    .parse()
                    .map_err(|_| hoa_err(line_no, "integer out of range"))?;
                out.push((Tok::Int(v), line_no));
            } else if c == '-' && cs.get(i + 1) == Some(&'-') {
                let rest: String = cs[i..].iter().collect();
                let tok = if rest.starts_with("--BODY--") {
                    Tok::Body
                } else if rest.starts_with("--END--") {
                    Tok::End
                } else {
                    return Err(hoa_err(line_no, "unknown section marker"));
                };
                i += if tok == Tok::Body { 8 } else { 7 };
                out.push((tok, line_no));
            } else if c.is_ascii_alphabetic() || c == '_' || c == '@' {
                let alias = c == '@';
                let start = if alias { i + 1 } else { i };
                i = start;
                while i < cs.len()
                    && (cs[i].is_ascii_alphanumeric() || cs[i] == '_' || cs[i] == '-')
                {
                    i += 1;
                }
                let word: String = cs[start..i].iter().collect();
                if alias {
                    out.push((Tok::Alias(word), line_no));
                } else if cs.get(i) == Some(&':') {
                    i += 1;
                    out.push((Tok::Header(word), line_no));
                } else {
                    out.push((Tok::Ident(word), line_no));
                }
            } else if "[]{}()!&|".contains(c) {
                out.push((Tok::Punct(c), line_no));
                i += 1;
            } else {
                return Err(hoa_err(line_no, &format!("unexpected character {c:?}")));
            }
        }
    }
    Ok(out)
}

fn hoa_err(line: usize, message: &str) -> Error {
    Error::Hoa {
        line,
        message: message.to_string(),
    }
}

/// Label expressions over HOA atomic proposition indices.
#[derive(Clone, Debug)]
enum Label {
    True,
    False,
    Ap(usize),
    Not(Box<Label>),
    And(Box<Label>, Box<Label>),
    Or(Box<Label>, Box<Label>),
}

impl Label {
    fn eval(&self, bits: &[bool]) -> bool {
        match self {
            Label::True => true,
            Label::False => false,
            Label::Ap(i) => bits[*i],
            Label::Not(x) => !x.eval(bits),
            Label::And(a, b) => a.eval(bits) && b.eval(bits),
            Label::Or(a, b) => a.eval(bits) || b.eval(bits),
        }
    }
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    aliases: HashMap<String, Label>,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|t| t.1)
            .unwrap_or(1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn err(&self, message: &str) -> Error {
        hoa_err(self.line(), message)
    }

    fn int(&mut self) -> Result<usize> {
        match self.next() {
            Some(Tok::Int(v)) => Ok(v),
            _ => {
                self.pos -= 1;
                Err(self.err("expected integer"))
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Punct(x)) if x == c => Ok(()),
            _ => {
                self.pos -= 1;
                Err(self.err(&format!("expected '{c}'")))
            }
        }
    }

    fn label_or(&mut self) -> Result<Label> {
        let mut lhs = self.label_and()?;
        while self.peek() == Some(&Tok::Punct('|')) {
            self.pos += 1;
            let rhs = self.label_and()?;
            lhs = Label::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn label_and(&mut self) -> Result<Label> {
        let mut lhs = self.label_unary()?;
        while self.peek() == Some(&Tok::Punct('&')) {
            self.pos += 1;
            let rhs = self.label_unary()?;
            lhs = Label::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn label_unary(&mut self) -> Result<Label> {
        match self.next() {
            Some(Tok::Punct('!')) => Ok(Label::Not(Box::new(self.label_unary()?))),
            Some(Tok::Punct('(')) => {
                let inner = self.label_or()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Tok::Int(i)) => Ok(Label::Ap(i)),
            Some(Tok::Ident(w)) if w == "t" => Ok(Label::True),
            Some(Tok::Ident(w)) if w == "f" => Ok(Label::False),
            Some(Tok::Alias(a)) => self.aliases.get(&a).cloned().ok_or_else(|| {
                self.pos -= 1;
                self.err(&format!("unknown alias @{a}"))
            }),
            _ => {
                self.pos -= 1;
                Err(self.err("malformed label expression"))
            }
        }
    }
}

struct Parsed {
    states: usize,
    start: usize,
    ap_names: Vec<String>,
    accepting_all: Option<bool>,
    epsilon: Vec<(usize, usize)>,
    contracted: bool,
    names: Vec<Option<String>>,
    accepting: Vec<bool>,
    edges: Vec<Vec<(Option<Label>, usize, usize)>>,
}

fn parse(text: &str) -> Result<Parsed> {
    let toks = lex(text)?;
    let mut c = Cursor {
        toks: &toks,
        pos: 0,
        aliases: HashMap::new(),
    };
    match (c.next(), c.next()) {
        (Some(Tok::Header(h)), Some(Tok::Ident(v))) if h == "HOA" && v == "v1" => {}
        _ => return Err(hoa_err(1, "expected 'HOA: v1'")),
    }
    let mut states = None;
    let mut start = None;
    let mut ap_names = Vec::new();
    let mut accepting_all = None;
    let mut acceptance_seen = false;
    let mut epsilon = Vec::new();
    let mut contracted = false;
    loop {
        let line = c.line();
        match c.next() {
            Some(Tok::Body) => break,
            Some(Tok::Header(h)) => match h.as_str() {
                "States" => states = Some(c.int()?),
                "Start" => {
                    if start.is_some() {
                        return Err(hoa_err(line, "multiple initial states are not supported"));
                    }
                    start = Some(c.int()?);
                    if c.peek() == Some(&Tok::Punct('&')) {
                        return Err(hoa_err(
                            line,
                            "conjunctive initial states are not supported",
                        ));
                    }
                }
                "AP" => {
                    let n = c.int()?;
                    for _ in 0..n {
                        match c.next() {
                            Some(Tok::Str(s)) => ap_names.push(s),
                            _ => return Err(hoa_err(line, "AP expects quoted names")),
                        }
                    }
                }
                "Alias" => {
                    let name = match c.next() {
                        Some(Tok::Alias(a)) => a,
                        _ => return Err(hoa_err(line, "Alias expects @name")),
                    };
                    let l = c.label_or()?;
                    c.aliases.insert(name, l);
                }
                "Acceptance" => {
                    acceptance_seen = true;
                    let n = c.int()?;
                    let mut cond = Vec::new();
                    while let Some(Tok::Ident(_) | Tok::Punct(_) | Tok::Int(_)) = c.peek() {
                        if c.toks[c.pos].1 != line {
                            break;
                        }
                        cond.push(c.next().unwrap());
                    }
                    let is = |w: &str| matches!(cond.as_slice(), [Tok::Ident(x)] if x == w);
                    let buchi = n == 1
                        && matches!(cond.as_slice(),
                            [Tok::Ident(i), Tok::Punct('('), Tok::Int(0), Tok::Punct(')')] if i == "Inf");
                    if buchi {
                        accepting_all = None;
                    } else if n == 0 && is("t") {
                        accepting_all = Some(true);
                    } else if n == 0 && is("f") {
                        accepting_all = Some(false);
                    } else {
                        return Err(Error::UnsupportedAcceptance(format!(
                            "{n} sets, condition {cond:?}"
                        )));
                    }
                }
                "eps-edges" => {
                    while let Some(Tok::Int(_)) = c.peek() {
                        let from = c.int()?;
                        let to = c
                            .int()
                            .map_err(|_| hoa_err(line, "eps-edges expects pairs"))?;
                        epsilon.push((from, to));
                    }
                }
                "contracted" => {
                    contracted = matches!(c.next(), Some(Tok::Ident(v)) if v == "true");
                }
                _ => {
                    // Skip the values of headers we do not interpret.
                    while let Some(t) = c.peek() {
                        if matches!(t, Tok::Header(_) | Tok::Body) {
                            break;
                        }
                        c.pos += 1;
                    }
                }
            },
            _ => return Err(hoa_err(line, "expected header or --BODY--")),
        }
    }
    if !acceptance_seen {
        return Err(hoa_err(c.line(), "missing Acceptance header"));
    }
    let start = start.ok_or_else(|| hoa_err(1, "missing Start header"))?;

    let mut names: Vec<Option<String>> = Vec::new();
    let mut accepting: Vec<bool> = Vec::new();
    let mut edges: Vec<Vec<(Option<Label>, usize, usize)>> = Vec::new();
    let mut current: Option<usize> = None;
    let mut state_label: Option<Label> = None;
    loop {
        let line = c.line();
        match c.next() {
            Some(Tok::End) => break,
            Some(Tok::Header(h)) if h == "State" => {
                let label = if c.peek() == Some(&Tok::Punct('[')) {
                    c.pos += 1;
                    let l = c.label_or()?;
                    c.expect(']')?;
                    Some(l)
                } else {
                    None
                };
                let id = c.int()?;
                let need = id + 1;
                if names.len() < need {
                    names.resize(need, None);
                    accepting.resize(need, false);
                    edges.resize_with(need, Vec::new);
                }
                if let Some(Tok::Str(s)) = c.peek() {
                    names[id] = Some(s.clone());
                    c.pos += 1;
                }
                if c.peek() == Some(&Tok::Punct('{')) {
                    c.pos += 1;
                    while let Some(Tok::Int(_)) = c.peek() {
                        if c.int()? == 0 {
                            accepting[id] = true;
                        }
                    }
                    c.expect('}')?;
                }
                current = Some(id);
                state_label = label;
            }
            Some(Tok::Punct('[')) => {
                let q = current.ok_or_else(|| hoa_err(line, "edge outside of a state"))?;
                let l = c.label_or()?;
                c.expect(']')?;
                let to = c.int()?;
                if c.peek() == Some(&Tok::Punct('{')) {
                    return Err(Error::UnsupportedAcceptance(
                        "transition-based acceptance marks".into(),
                    ));
                }
                edges[q].push((Some(l), to, line));
            }
            Some(Tok::Int(to)) => {
                let q = current.ok_or_else(|| hoa_err(line, "edge outside of a state"))?;
                if state_label.is_some() {
                    // A state label applies to every outgoing edge.
                    edges[q].push((state_label.clone(), to, line));
                } else {
                    edges[q].push((None, to, line));
                }
                if c.peek() == Some(&Tok::Punct('{')) {
                    return Err(Error::UnsupportedAcceptance(
                        "transition-based acceptance marks".into(),
                    ));
                }
            }
            None => return Err(c.err("missing --END--")),
            _ => return Err(hoa_err(line, "unexpected token in body")),
        }
    }
    let states = states.unwrap_or(names.len());
    if names.len() > states {
        return Err(hoa_err(c.line(), "state id exceeds States header"));
    }
    names.resize(states, None);
    accepting.resize(states, false);
    edges.resize_with(states, Vec::new);
    Ok(Parsed {
        states,
        start,
        ap_names,
        accepting_all,
        epsilon,
        contracted,
        names,
        accepting,
        edges,
    })
}

/// Imports a HOA automaton, binding HOA proposition indices to predicate
/// instances.
pub fn import_hoa(
    text: &str,
    binding: &BTreeMap<usize, PredicateInstance>,
    at_most_one: bool,
) -> Result<Ldba> {
    let p = parse(text)?;
    for i in 0..p.ap_names.len() {
        if !binding.contains_key(&i) {
            return Err(Error::InvalidArgument(format!(
                "no binding for HOA proposition {i} ({:?})",
                p.ap_names[i]
            )));
        }
    }
    let alphabet = Alphabet::new(binding.values().cloned(), at_most_one);
    let n = p.states;
    if p.start >= n {
        return Err(Error::UnknownState(p.start));
    }
    let letters = alphabet.letters();
    let mut delta = vec![vec![usize::MAX; letters.len()]; n];
    for q in 0..n {
        let implicit: Vec<&(Option<Label>, usize, usize)> =
            p.edges[q].iter().filter(|e| e.0.is_none()).collect();
        if !implicit.is_empty() && implicit.len() != p.edges[q].len() {
            return Err(hoa_err(
                implicit[0].2,
                "mixing implicit and explicit labels",
            ));
        }
        for (li, sigma) in letters.iter().enumerate() {
            let bits: Vec<bool> = (0..p.ap_names.len())
                .map(|i| sigma.contains(&binding[&i]))
                .collect();
            let mut hit: Option<usize> = None;
            if implicit.is_empty() {
                for (label, to, _) in &p.edges[q] {
                    if label.as_ref().unwrap().eval(&bits) {
                        match hit {
                            Some(h) if h != *to => {
                                return Err(Error::NondeterministicTransition {
                                    state: q,
                                    assignment: sigma.to_string(),
                                })
                            }
                            _ => hit = Some(*to),
                        }
                    }
                }
            } else {
                let code = bits
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (i, &b)| acc | (b as usize) << i);
                hit = implicit.get(code).map(|e| e.1);
            }
            match hit {
                Some(t) if t < n => delta[q][li] = t,
                Some(t) => return Err(Error::UnknownState(t)),
                None => {
                    return Err(Error::IncompleteTransition {
                        state: q,
                        assignment: sigma.to_string(),
                    })
                }
            }
        }
    }
    let accepting: Vec<bool> = match p.accepting_all {
        Some(all) => vec![all; n],
        None => p.accepting.clone(),
    };
    let epsilon: Vec<EpsilonEdge> = p
        .epsilon
        .iter()
        .map(|&(from, to)| EpsilonEdge { from, to })
        .collect();
    let mut components = infer_components(&delta, &epsilon, &accepting);
    // A start state inside the deterministic part means the whole automaton is deterministic.
    if epsilon.is_empty() && components.get(p.start) == Some(&Component::Accepting) {
        components = vec![Component::Accepting; n];
    }
    let names = (0..n)
        .map(|q| p.names[q].clone().unwrap_or_else(|| format!("q{q}")))
        .collect();
    Ldba::new(
        alphabet,
        p.start,
        accepting,
        components,
        delta,
        epsilon,
        names,
        p.contracted,
    )
}

/// Imports a HOA automaton whose proposition names are predicate instances such
/// as `"at(1.0,0.0,0.0)"`.
pub fn import_hoa_named(text: &str, at_most_one: bool) -> Result<Ldba> {
    let p = parse(text)?;
    let sig = Signature::permissive();
    let binding = p
        .ap_names
        .iter()
        .enumerate()
        .map(|(i, s)| parse_atom(s, &sig).map(|a| (i, a)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    import_hoa(text, &binding, at_most_one)
}

fn label_of(f: &BooleanFormula, alphabet: &Alphabet) -> String {
    match f {
        BooleanFormula::True => "t".into(),
        BooleanFormula::False => "f".into(),
        BooleanFormula::Atom(p) => alphabet
            .ap_index(p)
            .expect("guard atom in alphabet")
            .to_string(),
        BooleanFormula::Not(x) => match **x {
            BooleanFormula::Atom(_) | BooleanFormula::True | BooleanFormula::False => {
                format!("!{}", label_of(x, alphabet))
            }
            _ => format!("!({})", label_of(x, alphabet)),
        },
        BooleanFormula::And(xs) => xs
            .iter()
            .map(|x| paren(x, alphabet))
            .collect::<Vec<_>>()
            .join(" & "),
        BooleanFormula::Or(xs) => xs
            .iter()
            .map(|x| paren(x, alphabet))
            .collect::<Vec<_>>()
            .join(" | "),
    }
}

fn paren(f: &BooleanFormula, alphabet: &Alphabet) -> String {
    match f {
        BooleanFormula::And(_) | BooleanFormula::Or(_) => format!("({})", label_of(f, alphabet)),
        _ => label_of(f, alphabet),
    }
}

/// Exports `b` as HOA v1.
pub fn export_hoa(b: &Ldba) -> String {
    let s = b.alphabet();
    let mut out = String::from("HOA: v1\n");
    out.push_str(&format!(
        "States: {}\nStart: {}\n",
        b.num_states(),
        b.initial()
    ));
    out.push_str(&format!("AP: {}", s.aps().len()));
    for p in s.aps() {
        out.push_str(&format!(" \"{p}\""));
    }
    out.push_str("\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n");
    out.push_str("properties: trans-labels explicit-labels state-acc\n");
    if !b.epsilon_edges().is_empty() {
        out.push_str("eps-edges:");
        for e in b.epsilon_edges() {
            out.push_str(&format!(" {} {}", e.from, e.to));
        }
        out.push('\n');
    }
    if b.is_contracted() {
        out.push_str("contracted: true\n");
    }
    out.push_str("--BODY--\n");
    for q in b.states() {
        let name = b.name(q).replace('\\', "\\\\").replace('"', "\\\"");
        out.push_str(&format!("State: {q} \"{name}\""));
        if b.is_accepting(q) {
            out.push_str(" {0}");
        }
        out.push('\n');
        for t in b.transitions(q) {
            out.push_str(&format!("[{}] {}\n", label_of(&t.guard, s), t.target));
        }
    }
    out.push_str("--END--\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::samples::persist_or_reach;

    fn ab() -> BTreeMap<usize, PredicateInstance> {
        BTreeMap::from([
            (0, PredicateInstance::prop("a")),
            (1, PredicateInstance::prop("b")),
        ])
    }

    const PERSIST_OR_REACH: &str = r#"HOA: v1
States: 4
Start: 0
AP: 2 "a" "b"
acc-name: Buchi
Acceptance: 1 Inf(0)
eps-edges: 0 2
--BODY--
State: 0
[!1] 0
[1] 1
State: 1 {0}
[t] 1
State: 2 {0}
[0] 2
[!0] 3
State: 3
[t] 3
--END--
"#;

    #[test]
    fn imports_persist_or_reach() {
        let b = import_hoa(PERSIST_OR_REACH, &ab(), true).unwrap();
        assert_eq!(b.num_states(), 4);
        assert_eq!(b.accepting_states(), vec![1, 2]);
        assert_eq!(b.epsilon_edges().len(), 1);
        assert_eq!(b.row(0), persist_or_reach().row(0));
    }

    #[test]
    fn universal_automaton() {
        let text = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[t] 0\n--END--\n";
        let b = import_hoa(
            text,
            &BTreeMap::from([(0, PredicateInstance::prop("a"))]),
            true,
        )
        .unwrap();
        assert_eq!(b.num_states(), 1);
        assert!(b.is_accepting(0));
    }

    #[test]
    fn malformed_header_reports_line() {
        let text = "HOA: v1\nStates: 1\nStart: zero\n";
        match import_hoa(text, &ab(), true) {
            Err(Error::Hoa { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_other_acceptance() {
        let text = "HOA: v1\nStates: 1\nStart: 0\nAP: 0\nAcceptance: 2 Inf(0) & Fin(1)\n--BODY--\nState: 0\n[t] 0\n--END--\n";
        assert!(matches!(
            import_hoa(text, &BTreeMap::new(), true),
            Err(Error::UnsupportedAcceptance(_))
        ));
    }

    #[test]
    fn incomplete_state_is_reported() {
        let text = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0\n[0] 0\n--END--\n";
        let err = import_hoa(
            text,
            &BTreeMap::from([(0, PredicateInstance::prop("a"))]),
            true,
        )
        .unwrap_err();
        assert!(matches!(err, Error::IncompleteTransition { state: 0, .. }));
    }

    #[test]
    fn round_trip() {
        let b = persist_or_reach();
        let again = import_hoa_named(&export_hoa(&b), true).unwrap();
        assert_eq!(again.reachable_canonical(), b.reachable_canonical());
    }

    #[test]
    fn accepting_start_makes_everything_deterministic() {
        let text = "HOA: v1\nStates: 3\nStart: 0\nAP: 1 \"a\"\nAcceptance: 1 Inf(0)\n--BODY--\n\
                    State: 0 {0}\n[0] 1\n[!0] 0\nState: 1\n[t] 0\nState: 2\n[t] 2\n--END--\n";
        let b = import_hoa(
            text,
            &BTreeMap::from([(0, PredicateInstance::prop("a"))]),
            true,
        )
        .unwrap();
        assert!(b.states().all(|q| b.component(q) == Component::Accepting));
    }
}
