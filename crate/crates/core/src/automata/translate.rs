//! LTL to LDBA translation.
//!
//! The initial component tracks `af(φ, u)`, the formula still owed after reading
//! `u`, as a monotone DNF over temporal subformulas. From each such state an ε
//! jump guesses which least-fixpoint subformulas (`F`, `U`, `M`) hold infinitely
//! often (`X`) and which greatest-fixpoint ones (`G`, `W`, `R`) hold from some
//! point on (`Y`). The accepting component then checks, deterministically, that
//! the residual formula with the guess plugged in is never violated and that the
//! recurrence obligations of `X` are met, round-robin, infinitely often.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::alphabet::Alphabet;
use super::ldba::{infer_components, EpsilonEdge, Ldba};
use crate::error::{Error, Result};
use crate::ltl::LtlFormula;

type Id = u32;
type Cube = BTreeSet<Id>;
type Dnf = BTreeSet<Cube>;

const TT: Id = 0;
const FF: Id = 1;

/// Upper bound on constructed states before giving up.
const STATE_LIMIT: usize = 50_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(Vec<Id>),
    Or(Vec<Id>),
    Next(Id),
    Until(Id, Id),
    Weak(Id, Id),
    Release(Id, Id),
    Mighty(Id, Id),
    Ev(Id),
    Glob(Id),
}

struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, Id>,
    truth: Vec<Vec<bool>>,
    af_memo: HashMap<(Id, usize), Dnf>,
}

fn tt() -> Dnf {
    BTreeSet::from([Cube::new()])
}

fn is_tt(d: &Dnf) -> bool {
    d.contains(&Cube::new())
}

impl Arena {
    fn new(alphabet: &Alphabet) -> Self {
        let truth = alphabet
            .letters()
            .iter()
            .map(|l| alphabet.aps().iter().map(|p| l.contains(p)).collect())
            .collect();
        let mut a = Self {
            nodes: Vec::new(),
            index: HashMap::new(),
            truth,
            af_memo: HashMap::new(),
        };
        a.intern(Node::True);
        a.intern(Node::False);
        a
    }

    fn intern(&mut self, n: Node) -> Id {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as Id;
        self.nodes.push(n.clone());
        self.index.insert(n, id);
        id
    }

    fn node(&self, id: Id) -> &Node {
        &self.nodes[id as usize]
    }

    fn complementary(&self, xs: &[Id]) -> bool {
        xs.iter().any(|&x| match *self.node(x) {
            Node::Lit(p, true) => xs.iter().any(|&y| *self.node(y) == Node::Lit(p, false)),
            _ => false,
        })
    }

    /// Interns `n` after local simplification.
    fn mk(&mut self, n: Node) -> Id {
        let n = match n {
            Node::And(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    match self.node(x) {
                        Node::True => {}
                        Node::False => return FF,
                        Node::And(ys) => out.extend(ys.iter().copied()),
                        _ => out.push(x),
                    }
                }
                out.sort();
                out.dedup();
                if self.complementary(&out) {
                    return FF;
                }
                match out.len() {
                    0 => return TT,
                    1 => return out[0],
                    _ => Node::And(out),
                }
            }
            Node::Or(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    match self.node(x) {
                        Node::False => {}
                        Node::True => return TT,
                        Node::Or(ys) => out.extend(ys.iter().copied()),
                        _ => out.push(x),
                    }
                }
                out.sort();
                out.dedup();
                if self.complementary(&out) {
                    return TT;
                }
                match out.len() {
                    0 => return FF,
                    1 => return out[0],
                    _ => Node::Or(out),
                }
            }
            Node::Next(x) if x == TT || x == FF => return x,
            Node::Until(a, b) => match (a, b) {
                (_, TT) => return TT,
                (_, FF) => return FF,
                (FF, _) => return b,
                (TT, _) => return self.mk(Node::Ev(b)),
                _ => Node::Until(a, b),
            },
            Node::Weak(a, b) => match (a, b) {
                (_, TT) | (TT, _) => return TT,
                (FF, _) => return b,
                (_, FF) => return self.mk(Node::Glob(a)),
                _ => Node::Weak(a, b),
            },
            Node::Release(a, b) => match (a, b) {
                (_, TT) => return TT,
                (_, FF) => return FF,
                (TT, _) => return b,
                (FF, _) => return self.mk(Node::Glob(b)),
                _ => Node::Release(a, b),
            },
            Node::Mighty(a, b) => match (a, b) {
                (_, FF) | (FF, _) => return FF,
                (TT, _) => return b,
                (_, TT) => return self.mk(Node::Ev(a)),
                _ => Node::Mighty(a, b),
            },
            Node::Ev(x) => match self.node(x) {
                Node::True | Node::False | Node::Ev(_) => return x,
                _ => Node::Ev(x),
            },
            Node::Glob(x) => match self.node(x) {
                Node::True | Node::False | Node::Glob(_) => return x,
                _ => Node::Glob(x),
            },
            other => other,
        };
        self.intern(n)
    }

    fn nnf(&mut self, f: &LtlFormula, neg: bool, alphabet: &Alphabet) -> Result<Id> {
        use LtlFormula as L;
        Ok(match f {
            L::True => {
                if neg {
                    FF
                } else {
                    TT
                }
            }
            L::Atom(p) => {
                let i = alphabet.ap_index(p).ok_or_else(|| {
                    Error::InvalidArgument(format!("atom {p} is not in the alphabet"))
                })?;
                self.intern(Node::Lit(i, !neg))
            }
            L::Not(x) => self.nnf(x, !neg, alphabet)?,
            L::And(a, b) | L::Or(a, b) => {
                let x = self.nnf(a, neg, alphabet)?;
                let y = self.nnf(b, neg, alphabet)?;
                if matches!(f, L::And(..)) != neg {
                    self.mk(Node::And(vec![x, y]))
                } else {
                    self.mk(Node::Or(vec![x, y]))
                }
            }
            L::Implies(a, b) => {
                let x = self.nnf(a, !neg, alphabet)?;
                let y = self.nnf(b, neg, alphabet)?;
                if neg {
                    self.mk(Node::And(vec![x, y]))
                } else {
                    self.mk(Node::Or(vec![x, y]))
                }
            }
            L::Next(x) => {
                let x = self.nnf(x, neg, alphabet)?;
                self.mk(Node::Next(x))
            }
            L::Until(a, b) => {
                let x = self.nnf(a, neg, alphabet)?;
                let y = self.nnf(b, neg, alphabet)?;
                if neg {
                    self.mk(Node::Release(x, y))
                } else {
                    self.mk(Node::Until(x, y))
                }
            }
            L::Eventually(x) => {
                let x = self.nnf(x, neg, alphabet)?;
                if neg {
                    self.mk(Node::Glob(x))
                } else {
                    self.mk(Node::Ev(x))
                }
            }
            L::Always(x) => {
                let x = self.nnf(x, neg, alphabet)?;
                if neg {
                    self.mk(Node::Ev(x))
                } else {
                    self.mk(Node::Glob(x))
                }
            }
        })
    }

    fn and(&self, a: &Dnf, b: &Dnf) -> Dnf {
        let mut out = Dnf::new();
        for x in a {
            for y in b {
                let c: Cube = x.union(y).copied().collect();
                let v: Vec<Id> = c.iter().copied().collect();
                if !self.complementary(&v) {
                    out.insert(c);
                }
            }
        }
        minimize(out)
    }

    fn or(&self, a: &Dnf, b: &Dnf) -> Dnf {
        minimize(a.union(b).cloned().collect())
    }

    fn atom(id: Id) -> Dnf {
        BTreeSet::from([BTreeSet::from([id])])
    }

    fn to_dnf(&self, id: Id) -> Dnf {
        match self.node(id) {
            Node::True => tt(),
            Node::False => Dnf::new(),
            Node::And(xs) => xs
                .iter()
                .fold(tt(), |acc, &x| self.and(&acc, &self.to_dnf(x))),
            Node::Or(xs) => xs
                .iter()
                .fold(Dnf::new(), |acc, &x| self.or(&acc, &self.to_dnf(x))),
            _ => Self::atom(id),
        }
    }

    fn from_dnf(&mut self, d: &Dnf) -> Id {
        let cubes: Vec<Id> = d
            .iter()
            .map(|c| self.mk(Node::And(c.iter().copied().collect())))
            .collect();
        self.mk(Node::Or(cubes))
    }

    /// `af(id, σ)` for the letter with index `letter`.
    fn af(&mut self, id: Id, letter: usize) -> Dnf {
        if let Some(d) = self.af_memo.get(&(id, letter)) {
            return d.clone();
        }
        let d = match self.node(id).clone() {
            Node::True => tt(),
            Node::False => Dnf::new(),
            Node::Lit(p, pos) => {
                if self.truth[letter][p] == pos {
                    tt()
                } else {
                    Dnf::new()
                }
            }
            Node::And(xs) => {
                let mut acc = tt();
                for x in xs {
                    let d = self.af(x, letter);
                    acc = self.and(&acc, &d);
                }
                acc
            }
            Node::Or(xs) => {
                let mut acc = Dnf::new();
                for x in xs {
                    let d = self.af(x, letter);
                    acc = self.or(&acc, &d);
                }
                acc
            }
            Node::Next(x) => self.to_dnf(x),
            Node::Until(a, b) | Node::Weak(a, b) => {
                let db = self.af(b, letter);
                let da = self.af(a, letter);
                let keep = self.and(&da, &Self::atom(id));
                self.or(&db, &keep)
            }
            Node::Release(a, b) | Node::Mighty(a, b) => {
                let db = self.af(b, letter);
                let da = self.af(a, letter);
                let keep = self.or(&da, &Self::atom(id));
                self.and(&db, &keep)
            }
            Node::Ev(x) => {
                let dx = self.af(x, letter);
                self.or(&Self::atom(id), &dx)
            }
            Node::Glob(x) => {
                let dx = self.af(x, letter);
                self.and(&Self::atom(id), &dx)
            }
        };
        self.af_memo.insert((id, letter), d.clone());
        d
    }

    fn af_dnf(&mut self, d: &Dnf, letter: usize) -> Dnf {
        let mut out = Dnf::new();
        for cube in d {
            let mut acc = tt();
            for &x in cube {
                let dx = self.af(x, letter);
                acc = self.and(&acc, &dx);
                if acc.is_empty() {
                    break;
                }
            }
            out = self.or(&out, &acc);
        }
        out
    }

    /// `id[X]ν`: least-fixpoint subformulas in `x` are weakened, the rest fail.
    fn nu_sub(&mut self, id: Id, x: &BTreeSet<Id>) -> Id {
        match self.node(id).clone() {
            Node::True | Node::False | Node::Lit(..) => id,
            Node::And(xs) => {
                let ys = xs.iter().map(|&c| self.nu_sub(c, x)).collect();
                self.mk(Node::And(ys))
            }
            Node::Or(xs) => {
                let ys = xs.iter().map(|&c| self.nu_sub(c, x)).collect();
                self.mk(Node::Or(ys))
            }
            Node::Next(a) => {
                let a = self.nu_sub(a, x);
                self.mk(Node::Next(a))
            }
            Node::Until(..) | Node::Mighty(..) if !x.contains(&id) => FF,
            Node::Until(a, b) | Node::Weak(a, b) => {
                let (a, b) = (self.nu_sub(a, x), self.nu_sub(b, x));
                self.mk(Node::Weak(a, b))
            }
            Node::Mighty(a, b) | Node::Release(a, b) => {
                let (a, b) = (self.nu_sub(a, x), self.nu_sub(b, x));
                self.mk(Node::Release(a, b))
            }
            Node::Ev(_) => {
                if x.contains(&id) {
                    TT
                } else {
                    FF
                }
            }
            Node::Glob(a) => {
                let a = self.nu_sub(a, x);
                self.mk(Node::Glob(a))
            }
        }
    }

    /// `id[Y]μ`: greatest-fixpoint subformulas in `y` hold, the rest become
    /// their least-fixpoint counterparts.
    fn mu_sub(&mut self, id: Id, y: &BTreeSet<Id>) -> Id {
        match self.node(id).clone() {
            Node::True | Node::False | Node::Lit(..) => id,
            Node::And(xs) => {
                let ys = xs.iter().map(|&c| self.mu_sub(c, y)).collect();
                self.mk(Node::And(ys))
            }
            Node::Or(xs) => {
                let ys = xs.iter().map(|&c| self.mu_sub(c, y)).collect();
                self.mk(Node::Or(ys))
            }
            Node::Next(a) => {
                let a = self.mu_sub(a, y);
                self.mk(Node::Next(a))
            }
            Node::Weak(..) | Node::Release(..) | Node::Glob(_) if y.contains(&id) => TT,
            Node::Glob(_) => FF,
            Node::Until(a, b) | Node::Weak(a, b) => {
                let (a, b) = (self.mu_sub(a, y), self.mu_sub(b, y));
                self.mk(Node::Until(a, b))
            }
            Node::Mighty(a, b) | Node::Release(a, b) => {
                let (a, b) = (self.mu_sub(a, y), self.mu_sub(b, y));
                self.mk(Node::Mighty(a, b))
            }
            Node::Ev(a) => {
                let a = self.mu_sub(a, y);
                self.mk(Node::Ev(a))
            }
        }
    }

    /// Collects fixpoint subformulas of `id`: least ones (with whether they sit
    /// under a greatest-fixpoint operator) and greatest ones.
    fn fixpoints(&self, id: Id, under_nu: bool, mu: &mut Vec<(Id, bool)>, nu: &mut BTreeSet<Id>) {
        let n = self.node(id);
        let children: Vec<Id> = match n {
            Node::True | Node::False | Node::Lit(..) => vec![],
            Node::And(xs) | Node::Or(xs) => xs.clone(),
            Node::Next(a) | Node::Ev(a) | Node::Glob(a) => vec![*a],
            Node::Until(a, b) | Node::Weak(a, b) | Node::Release(a, b) | Node::Mighty(a, b) => {
                vec![*a, *b]
            }
        };
        let is_nu = matches!(n, Node::Weak(..) | Node::Release(..) | Node::Glob(_));
        let is_mu = matches!(n, Node::Until(..) | Node::Mighty(..) | Node::Ev(_));
        if is_nu {
            nu.insert(id);
        }
        if is_mu {
            match mu.iter_mut().find(|(m, _)| *m == id) {
                Some(entry) => entry.1 |= under_nu,
                None => mu.push((id, under_nu)),
            }
        }
        for c in children {
            self.fixpoints(c, under_nu || is_nu, mu, nu);
        }
    }

    fn show(&self, id: Id, aps: &[String]) -> String {
        let bin =
            |a: Id, op: &str, b: Id| format!("({} {op} {})", self.show(a, aps), self.show(b, aps));
        match self.node(id) {
            Node::True => "t".into(),
            Node::False => "f".into(),
            Node::Lit(p, true) => aps[*p].clone(),
            Node::Lit(p, false) => format!("!{}", aps[*p]),
            Node::And(xs) => format!(
                "({})",
                xs.iter()
                    .map(|&x| self.show(x, aps))
                    .collect::<Vec<_>>()
                    .join(" & ")
            ),
            Node::Or(xs) => format!(
                "({})",
                xs.iter()
                    .map(|&x| self.show(x, aps))
                    .collect::<Vec<_>>()
                    .join(" | ")
            ),
            Node::Next(a) => format!("X {}", self.show(*a, aps)),
            Node::Until(a, b) => bin(*a, "U", *b),
            Node::Weak(a, b) => bin(*a, "W", *b),
            Node::Release(a, b) => bin(*a, "R", *b),
            Node::Mighty(a, b) => bin(*a, "M", *b),
            Node::Ev(a) => format!("F {}", self.show(*a, aps)),
            Node::Glob(a) => format!("G {}", self.show(*a, aps)),
        }
    }

    fn show_dnf(&self, d: &Dnf, aps: &[String]) -> String {
        if d.is_empty() {
            return "f".into();
        }
        d.iter()
            .map(|c| {
                if c.is_empty() {
                    "t".to_string()
                } else {
                    c.iter()
                        .map(|&x| self.show(x, aps))
                        .collect::<Vec<_>>()
                        .join(" & ")
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

fn minimize(d: Dnf) -> Dnf {
    let mut cubes: Vec<Cube> = d.into_iter().collect();
    cubes.sort_by_key(|c| c.len());
    let mut kept: Vec<Cube> = Vec::new();
    for c in cubes {
        if !kept.iter().any(|k| k.is_subset(&c)) {
            kept.push(c);
        }
    }
    kept.into_iter().collect()
}

/// A state of the accepting component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Tracker {
    safety: Dnf,
    goals: Vec<Id>,
    turn: usize,
    pending: Dnf,
    accepting: bool,
}

impl Tracker {
    fn sink() -> Self {
        Self {
            safety: Dnf::new(),
            goals: vec![],
            turn: 0,
            pending: Dnf::new(),
            accepting: false,
        }
    }

    fn top() -> Self {
        Self {
            safety: tt(),
            goals: vec![],
            turn: 0,
            pending: tt(),
            accepting: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Guess(Dnf),
    Check(Tracker),
}

struct Builder {
    arena: Arena,
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
    queue: VecDeque<usize>,
}

impl Builder {
    fn state(&mut self, key: Key) -> Result<usize> {
        let key = match key {
            Key::Guess(d) if d.is_empty() => Key::Check(Tracker::sink()),
            Key::Guess(d) if is_tt(&d) => Key::Check(Tracker::top()),
            k => k,
        };
        if let Some(&q) = self.index.get(&key) {
            return Ok(q);
        }
        if self.keys.len() >= STATE_LIMIT {
            return Err(Error::UnsupportedFragment(format!(
                "translation exceeds {STATE_LIMIT} states"
            )));
        }
        let q = self.keys.len();
        self.keys.push(key.clone());
        self.index.insert(key, q);
        self.queue.push_back(q);
        Ok(q)
    }

    fn step_tracker(&mut self, t: &Tracker, letter: usize) -> Tracker {
        let safety = self.arena.af_dnf(&t.safety, letter);
        if safety.is_empty() {
            return Tracker::sink();
        }
        if t.goals.is_empty() {
            return Tracker {
                safety,
                goals: vec![],
                turn: 0,
                pending: tt(),
                accepting: true,
            };
        }
        let pending = self.arena.af_dnf(&t.pending, letter);
        if is_tt(&pending) {
            let turn = (t.turn + 1) % t.goals.len();
            let ev = self.arena.mk(Node::Ev(t.goals[turn]));
            Tracker {
                safety,
                goals: t.goals.clone(),
                turn,
                pending: self.arena.to_dnf(ev),
                accepting: turn == 0,
            }
        } else {
            Tracker {
                safety,
                goals: t.goals.clone(),
                turn: t.turn,
                pending,
                accepting: false,
            }
        }
    }

    /// Accepting-component entry points reachable by ε from the guess state `d`.
    fn jumps(&mut self, d: &Dnf) -> Vec<Tracker> {
        let mut mu = Vec::new();
        let mut nu = BTreeSet::new();
        for cube in d {
            for &x in cube {
                self.arena.fixpoints(x, false, &mut mu, &mut nu);
            }
        }
        let nu: Vec<Id> = nu.into_iter().collect();
        let base = self.arena.from_dnf(d);
        let mut out = Vec::new();
        for ymask in 0u64..(1 << nu.len()) {
            let y: BTreeSet<Id> = (0..nu.len())
                .filter(|i| ymask >> i & 1 == 1)
                .map(|i| nu[i])
                .collect();
            // A least-fixpoint subformula is worth guessing if it sits under a
            // greatest-fixpoint operator (so the initial component cannot
            // discharge it) or if its obligation is already met by `y`.
            let mut eligible = Vec::new();
            for &(m, under_nu) in &mu {
                let goal = self.arena.mu_sub(m, &y);
                if goal != FF && (under_nu || goal == TT) {
                    eligible.push((m, goal));
                }
            }
            for xmask in 0u64..(1 << eligible.len()) {
                let chosen: Vec<(Id, Id)> = (0..eligible.len())
                    .filter(|i| xmask >> i & 1 == 1)
                    .map(|i| eligible[i])
                    .collect();
                let x: BTreeSet<Id> = chosen.iter().map(|c| c.0).collect();
                let mut parts = vec![self.arena.nu_sub(base, &x)];
                for &g in &y {
                    let inner = self.arena.nu_sub(g, &x);
                    parts.push(self.arena.mk(Node::Glob(inner)));
                }
                let s = self.arena.mk(Node::And(parts));
                let safety = self.arena.to_dnf(s);
                if safety.is_empty() {
                    continue;
                }
                let mut goals: Vec<Id> = chosen.iter().map(|c| c.1).filter(|&g| g != TT).collect();
                goals.sort();
                goals.dedup();
                let t = if goals.is_empty() {
                    Tracker {
                        safety,
                        goals,
                        turn: 0,
                        pending: tt(),
                        accepting: true,
                    }
                } else {
                    let ev = self.arena.mk(Node::Ev(goals[0]));
                    Tracker {
                        safety,
                        pending: self.arena.to_dnf(ev),
                        goals,
                        turn: 0,
                        accepting: false,
                    }
                };
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }
}

/// Translates `φ` over the at-most-one-true alphabet of its own atoms.
pub fn translate(phi: &LtlFormula) -> Result<Ldba> {
    translate_with(phi, &Alphabet::at_most_one(phi.atoms()))
}

/// Translates `φ` over an explicit alphabet, which must contain every atom of `φ`.
pub fn translate_with(phi: &LtlFormula, alphabet: &Alphabet) -> Result<Ldba> {
    let mut b = Builder {
        arena: Arena::new(alphabet),
        keys: Vec::new(),
        index: HashMap::new(),
        queue: VecDeque::new(),
    };
    let root = b.arena.nnf(phi, false, alphabet)?;
    let init_dnf = b.arena.to_dnf(root);
    let initial = b.state(Key::Guess(init_dnf))?;
    let sink = b.state(Key::Check(Tracker::sink()))?;
    let letters = alphabet.len();
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut epsilon = Vec::new();
    while let Some(q) = b.queue.pop_front() {
        let key = b.keys[q].clone();
        let mut row = Vec::with_capacity(letters);
        match &key {
            Key::Guess(d) => {
                for l in 0..letters {
                    let next = b.arena.af_dnf(d, l);
                    row.push(b.state(Key::Guess(next))?);
                }
                for t in b.jumps(d) {
                    let to = b.state(Key::Check(t))?;
                    epsilon.push((q, to));
                }
            }
            Key::Check(t) => {
                for l in 0..letters {
                    let next = b.step_tracker(t, l);
                    row.push(b.state(Key::Check(next))?);
                }
            }
        }
        if delta.len() <= q {
            delta.resize(q + 1, Vec::new());
        }
        delta[q] = row;
    }

    let n = b.keys.len();
    let accepting: Vec<bool> = b
        .keys
        .iter()
        .map(|k| matches!(k, Key::Check(t) if t.accepting))
        .collect();
    let checking: Vec<bool> = b.keys.iter().map(|k| matches!(k, Key::Check(_))).collect();
    let aps: Vec<String> = alphabet.aps().iter().map(|p| p.to_string()).collect();
    let names: Vec<String> = b
        .keys
        .iter()
        .map(|k| match k {
            Key::Guess(d) => b.arena.show_dnf(d, &aps),
            Key::Check(t) => {
                let goals: Vec<String> = t.goals.iter().map(|&g| b.arena.show(g, &aps)).collect();
                if goals.is_empty() {
                    format!("[{}]", b.arena.show_dnf(&t.safety, &aps))
                } else {
                    format!(
                        "[{}] GF{{{}}} #{}",
                        b.arena.show_dnf(&t.safety, &aps),
                        goals.join(", "),
                        t.turn
                    )
                }
            }
        })
        .collect();

    // Send every state without an accepting future to the shared sink and drop
    // jumps into such states.
    let raw_eps: Vec<EpsilonEdge> = epsilon
        .iter()
        .map(|&(from, to)| EpsilonEdge { from, to })
        .collect();
    let comps = infer_components(&delta, &raw_eps, &accepting);
    let raw = Ldba::raw(
        alphabet.clone(),
        initial,
        accepting.clone(),
        comps,
        delta.clone(),
        raw_eps,
        names.clone(),
        true,
    );
    let dead = super::analysis::rejecting_sinks(&raw);
    let redirect = |t: usize| if dead[t] { sink } else { t };
    let delta: Vec<Vec<usize>> = (0..n)
        .map(|q| {
            if dead[q] {
                vec![sink; letters]
            } else {
                delta[q].iter().map(|&t| redirect(t)).collect()
            }
        })
        .collect();
    let epsilon: Vec<(usize, usize)> = epsilon
        .into_iter()
        .filter(|&(f, t)| !dead[f] && !dead[t])
        .collect();
    let initial = redirect(initial);

    let (class, count) = bisimulation(&delta, &epsilon, &accepting, &checking);
    let mut rep = vec![usize::MAX; count];
    for q in 0..n {
        if rep[class[q]] == usize::MAX {
            rep[class[q]] = q;
        }
    }
    let q_delta: Vec<Vec<usize>> = rep
        .iter()
        .map(|&r| delta[r].iter().map(|&t| class[t]).collect())
        .collect();
    let q_eps: Vec<EpsilonEdge> = epsilon
        .iter()
        .map(|&(f, t)| EpsilonEdge {
            from: class[f],
            to: class[t],
        })
        .collect();
    let q_acc: Vec<bool> = rep.iter().map(|&r| accepting[r]).collect();
    let q_names: Vec<String> = rep.iter().map(|&r| names[r].clone()).collect();
    let comps = infer_components(&q_delta, &q_eps, &q_acc);
    let quotient = Ldba::raw(
        alphabet.clone(),
        class[initial],
        q_acc,
        comps,
        q_delta,
        q_eps,
        q_names,
        false,
    )
    .reachable_canonical();
    let (acc, _, delta, names) = quotient.parts();
    let comps = infer_components(delta, quotient.epsilon_edges(), acc);
    Ldba::new(
        alphabet.clone(),
        quotient.initial(),
        acc.to_vec(),
        comps,
        delta.to_vec(),
        quotient.epsilon_edges().to_vec(),
        names.to_vec(),
        false,
    )
}

/// Coarsest partition respecting acceptance, origin component, letter successors
/// and ε targets. Returns the class of each state and the number of classes.
fn bisimulation(
    delta: &[Vec<usize>],
    epsilon: &[(usize, usize)],
    accepting: &[bool],
    checking: &[bool],
) -> (Vec<usize>, usize) {
    let n = delta.len();
    let mut eps_out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(f, t) in epsilon {
        eps_out[f].push(t);
    }
    let mut class: Vec<usize> = (0..n)
        .map(|q| (accepting[q] as usize) | (checking[q] as usize) << 1)
        .collect();
    let mut count = 0;
    loop {
        let mut sigs: HashMap<(usize, Vec<usize>, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for q in 0..n {
            let mut e: Vec<usize> = eps_out[q].iter().map(|&t| class[t]).collect();
            e.sort();
            e.dedup();
            let sig = (class[q], delta[q].iter().map(|&t| class[t]).collect(), e);
            let len = sigs.len();
            next[q] = *sigs.entry(sig).or_insert(len);
        }
        let new_count = sigs.len();
        class = next;
        if new_count == count {
            return (class, count);
        }
        count = new_count;
    }
}
