//! Bounded rewriting search for equalities in a finitely presented group.
//!
//! A move takes a cyclic rotation `s = x y` of a relator (or of its inverse)
//! and replaces an occurrence of `x` by `y^-1`, followed by free reduction.
//! Replacing one side of a relation by the other is the special case where
//! `x` is a whole side; `x` empty inserts a rotated relator. The search
//! expands the shortest unexplored word first, from both ends, and returns a
//! chain that [`replay`] checks step by step.
//!
//! Longer proofs are assembled from [`Plan`]s: a statement is proved in a
//! smaller presentation and mapped into the target along a substitution
//! whose relation images are proved first. Every assembled chain is flat and
//! uses only relations of the target presentation.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::presentations::{Presentation, Relation};
use crate::words::{GeneratorId, Letter, Word, WordError};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;
pub const DEFAULT_SLACK: usize = 8;
const GAP_FRACTION: usize = 16;

/// Order in which the search expands words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Shortest word first, ties broken by discovery order.
    ShortestFirst,
    /// Layer by layer from each end.
    Breadth,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: usize,
    pub slack: usize,
    /// Overrides `max(|lhs|, |rhs|) + slack` when set.
    pub max_word_length: Option<usize>,
    pub strategy: Strategy,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_nodes: DEFAULT_MAX_NODES,
            slack: DEFAULT_SLACK,
            max_word_length: None,
            strategy: Strategy::ShortestFirst,
        }
    }
}

impl Budget {
    pub fn with_nodes(max_nodes: usize) -> Budget {
        Budget { max_nodes, ..Budget::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProofStatus {
    Proved,
    Unknown,
}

impl fmt::Display for ProofStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofStatus::Proved => write!(f, "proved"),
            ProofStatus::Unknown => write!(f, "unknown"),
        }
    }
}

/// Which piece of which relator a step used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub relation: usize,
    /// Use the inverse of the relator.
    pub inverted: bool,
    pub rotation: usize,
    /// Length of the replaced prefix `x` of the rotated relator; zero
    /// inserts the whole rotation.
    pub split: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub position: usize,
    pub tag: String,
    pub piece: Piece,
    /// When set, the piece rewrites the resulting word back into the
    /// previous one rather than the other way round.
    pub reversed: bool,
    /// The word after this step.
    pub word: Word,
}

impl ChainStep {
    pub fn direction(&self) -> String {
        let p = &self.piece;
        format!(
            "{}:{}{}/{}",
            if self.reversed { "backward" } else { "forward" },
            if p.inverted { "inv" } else { "rel" },
            p.rotation,
            p.split
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofResult {
    pub status: ProofStatus,
    pub lhs: Word,
    pub rhs: Word,
    pub chain: Vec<ChainStep>,
    pub nodes_explored: usize,
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        self.status == ProofStatus::Proved
    }

    fn unknown(lhs: &Word, rhs: &Word, nodes: usize) -> ProofResult {
        ProofResult {
            status: ProofStatus::Unknown,
            lhs: lhs.clone(),
            rhs: rhs.clone(),
            chain: Vec::new(),
            nodes_explored: nodes,
        }
    }

    /// The same proof read from `rhs` to `lhs`.
    pub fn reversed(&self) -> ProofResult {
        ProofResult {
            status: self.status,
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
            chain: reverse_chain(&self.lhs, &self.chain),
            nodes_explored: self.nodes_explored,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProverError {
    #[error(transparent)]
    Alphabet(#[from] WordError),
    #[error("plan substitution has no image for generator {0}")]
    MissingImage(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {step}: relation index {relation} out of range")]
    BadRelation { step: usize, relation: usize },
    #[error("step {step}: piece does not exist on the relator")]
    BadPiece { step: usize },
    #[error("step {step}: piece does not occur at position {position}")]
    NoMatch { step: usize, position: usize },
    #[error("step {step}: rewriting gives {got}, chain records {expected}")]
    Mismatch { step: usize, got: String, expected: String },
    #[error("step {step}: tag {got} does not match relation tag {expected}")]
    TagMismatch { step: usize, got: String, expected: String },
    #[error("chain ends at {end}, expected {rhs}")]
    WrongEnd { end: String, rhs: String },
}

/// Cyclic reduction `r = k c k^-1` of a relator, returned as `(k, c)`.
fn cyclic_parts(rel: &Relation) -> (Word, Word) {
    let r = rel.relator();
    let ls = r.letters();
    let mut a = 0;
    let mut b = ls.len();
    while b - a >= 2 && ls[a].gen == ls[b - 1].gen && ls[a].inv != ls[b - 1].inv {
        a += 1;
        b -= 1;
    }
    (Word::from_letters(ls[..a].iter().cloned()), Word::from_letters(ls[a..b].iter().cloned()))
}

/// Relator of a relation after cyclic reduction.
pub fn cyclic_relator(rel: &Relation) -> Word {
    cyclic_parts(rel).1
}

/// The pair `(x, y^-1)` described by a piece.
pub fn piece_pair(p: &Presentation, piece: &Piece) -> Option<(Vec<Letter>, Vec<Letter>)> {
    let rel = p.relations.get(piece.relation)?;
    piece_pair_of(&cyclic_relator(rel), piece)
}

fn piece_pair_of(relator: &Word, piece: &Piece) -> Option<(Vec<Letter>, Vec<Letter>)> {
    let r = if piece.inverted { relator.inverse() } else { relator.clone() };
    let ls = r.letters();
    if piece.rotation >= ls.len() || piece.split > ls.len() {
        return None;
    }
    let rot: Vec<Letter> = ls[piece.rotation..].iter().chain(&ls[..piece.rotation]).cloned().collect();
    let x = rot[..piece.split].to_vec();
    let z: Vec<Letter> = rot[piece.split..].iter().rev().map(Letter::inverse).collect();
    Some((x, z))
}

fn apply_piece(word: &Word, x: &[Letter], z: &[Letter], pos: usize) -> Option<Word> {
    let ls = word.letters();
    if pos + x.len() > ls.len() || ls[pos..pos + x.len()] != *x {
        return None;
    }
    let it = ls[..pos].iter().chain(z).chain(&ls[pos + x.len()..]).cloned();
    Some(Word::from_letters(it))
}

/// Checks every step of a chain against the presentation.
pub fn replay(p: &Presentation, lhs: &Word, rhs: &Word, chain: &[ChainStep]) -> Result<(), ReplayError> {
    let mut cur = lhs.clone();
    for (i, st) in chain.iter().enumerate() {
        let rel = p
            .relations
            .get(st.piece.relation)
            .ok_or(ReplayError::BadRelation { step: i, relation: st.piece.relation })?;
        if rel.tag != st.tag {
            return Err(ReplayError::TagMismatch { step: i, got: st.tag.clone(), expected: rel.tag.clone() });
        }
        let (x, z) = piece_pair(p, &st.piece).ok_or(ReplayError::BadPiece { step: i })?;
        let (from, to) = if st.reversed { (&st.word, &cur) } else { (&cur, &st.word) };
        let got =
            apply_piece(from, &x, &z, st.position).ok_or(ReplayError::NoMatch { step: i, position: st.position })?;
        if got != *to {
            return Err(ReplayError::Mismatch { step: i, got: got.to_string(), expected: to.to_string() });
        }
        cur = st.word.clone();
    }
    if cur != *rhs {
        return Err(ReplayError::WrongEnd { end: cur.to_string(), rhs: rhs.to_string() });
    }
    Ok(())
}

/// Reverses a chain that starts at `start`.
pub fn reverse_chain(start: &Word, chain: &[ChainStep]) -> Vec<ChainStep> {
    let mut words = vec![start.clone()];
    words.extend(chain.iter().map(|s| s.word.clone()));
    chain
        .iter()
        .enumerate()
        .rev()
        .map(|(i, s)| ChainStep { reversed: !s.reversed, word: words[i].clone(), ..s.clone() })
        .collect()
}

type Code = u16;

struct Rule {
    from: Vec<Code>,
    to: Vec<Code>,
    piece: Piece,
}

struct Alphabet {
    gens: Vec<GeneratorId>,
}

impl Alphabet {
    fn encode(&self, w: &Word) -> Vec<Code> {
        w.letters().iter().map(|l| self.code(l)).collect()
    }

    fn code(&self, l: &Letter) -> Code {
        let i = self.gens.iter().position(|g| *g == l.gen).expect("letter in alphabet");
        (2 * i + l.inv as usize) as Code
    }

    fn decode(&self, c: &[Code]) -> Word {
        Word::from_letters(c.iter().map(|&x| Letter::new(self.gens[(x >> 1) as usize].clone(), x & 1 == 1)))
    }
}

/// All search moves of a presentation, indexed by the first letter they
/// consume. Insertions are not search moves.
pub struct RuleSet {
    alpha: Alphabet,
    rules: Vec<Rule>,
    by_first: Vec<Vec<u32>>,
    tags: Vec<String>,
}

impl RuleSet {
    pub fn new(p: &Presentation) -> RuleSet {
        let alpha = Alphabet { gens: p.generators.clone() };
        let mut rules = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (ri, rel) in p.relations.iter().enumerate() {
            let relator = cyclic_relator(rel);
            let len = relator.len();
            for inverted in [false, true] {
                for rotation in 0..len {
                    for split in 1..=len {
                        let piece = Piece { relation: ri, inverted, rotation, split };
                        let (x, z) = piece_pair_of(&relator, &piece).expect("piece in range");
                        let from = alpha.encode(&Word::from_letters(x.clone()));
                        let to: Vec<Code> = z.iter().map(|l| alpha.code(l)).collect();
                        if from.len() != x.len() || !seen.insert((from.clone(), to.clone())) {
                            continue;
                        }
                        rules.push(Rule { from, to, piece });
                    }
                }
            }
        }
        let mut by_first = vec![Vec::new(); 2 * alpha.gens.len()];
        for (i, r) in rules.iter().enumerate() {
            by_first[r.from[0] as usize].push(i as u32);
        }
        let tags = p.relations.iter().map(|r| r.tag.clone()).collect();
        RuleSet { alpha, rules, by_first, tags }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn successors(&self, w: &[Code], max_len: usize, out: &mut Vec<(Box<[Code]>, u32, u32)>) {
        let mut buf: Vec<Code> = Vec::with_capacity(max_len + 8);
        for pos in 0..w.len() {
            for &ri in &self.by_first[w[pos] as usize] {
                let rule = &self.rules[ri as usize];
                let end = pos + rule.from.len();
                if end > w.len() || w[pos..end] != rule.from[..] {
                    continue;
                }
                buf.clear();
                buf.extend_from_slice(&w[..pos]);
                for &c in rule.to.iter().chain(&w[end..]) {
                    if buf.last() == Some(&(c ^ 1)) {
                        buf.pop();
                    } else {
                        buf.push(c);
                    }
                }
                if buf.len() <= max_len {
                    out.push((buf.clone().into_boxed_slice(), ri, pos as u32));
                }
            }
        }
    }
}

struct Node {
    parent: u32,
    rule: u32,
    pos: u32,
}

struct Side {
    map: FxHashMap<Box<[Code]>, u32>,
    nodes: Vec<Node>,
    words: Vec<Box<[Code]>>,
}

impl Side {
    fn new(root: Vec<Code>) -> Side {
        let root: Box<[Code]> = root.into_boxed_slice();
        let mut map = FxHashMap::default();
        map.insert(root.clone(), 0);
        Side { map, nodes: vec![Node { parent: u32::MAX, rule: 0, pos: 0 }], words: vec![root] }
    }

    fn path(&self, mut id: u32) -> Vec<u32> {
        let mut out = vec![id];
        while self.nodes[id as usize].parent != u32::MAX {
            id = self.nodes[id as usize].parent;
            out.push(id);
        }
        out.reverse();
        out
    }
}

/// Searches for a rewriting chain from `lhs` to `rhs`.
pub fn prove(p: &Presentation, lhs: &Word, rhs: &Word, budget: &Budget) -> Result<ProofResult, ProverError> {
    let rules = RuleSet::new(p);
    prove_with_rules(p, &rules, lhs, rhs, budget)
}

/// As [`prove`], reusing a precomputed [`RuleSet`] for `p`.
pub fn prove_with_rules(
    p: &Presentation,
    rules: &RuleSet,
    lhs: &Word,
    rhs: &Word,
    budget: &Budget,
) -> Result<ProofResult, ProverError> {
    p.check_word(lhs)?;
    p.check_word(rhs)?;
    if lhs == rhs {
        let mut r = ProofResult::unknown(lhs, rhs, 1);
        r.status = ProofStatus::Proved;
        return Ok(r);
    }
    let max_len = budget.max_word_length.unwrap_or(lhs.len().max(rhs.len()) + budget.slack);
    let mut sides = [Side::new(rules.alpha.encode(lhs)), Side::new(rules.alpha.encode(rhs))];
    // queue entries: (priority, discovery index, side, node)
    let mut heap = BinaryHeap::new();
    let mut depth: [Vec<u32>; 2] = [vec![0], vec![0]];
    let key = |len: usize, d: u32| match budget.strategy {
        Strategy::ShortestFirst => len,
        Strategy::Breadth => d as usize,
    };
    heap.push(Reverse((key(lhs.len(), 0), 0usize, 0usize, 0u32)));
    heap.push(Reverse((key(rhs.len(), 0), 1, 1, 0)));
    let mut total = 2usize;
    let mut out = Vec::new();
    while let Some(Reverse((_, _, s, id))) = heap.pop() {
        let o = 1 - s;
        out.clear();
        let d = depth[s][id as usize] + 1;
        rules.successors(&sides[s].words[id as usize], max_len, &mut out);
        for (w, rule, pos) in out.drain(..) {
            if sides[s].map.contains_key(&w) {
                continue;
            }
            let nid = sides[s].nodes.len() as u32;
            sides[s].nodes.push(Node { parent: id, rule, pos });
            sides[s].words.push(w.clone());
            depth[s].push(d);
            let meet = sides[o].map.get(&w).copied();
            let len = w.len();
            sides[s].map.insert(w, nid);
            total += 1;
            if let Some(other) = meet {
                let (lid, rid) = if s == 0 { (nid, other) } else { (other, nid) };
                return Ok(ProofResult {
                    status: ProofStatus::Proved,
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    chain: build_chain(rules, &sides, lid, rid),
                    nodes_explored: total,
                });
            }
            if total >= budget.max_nodes {
                return Ok(ProofResult::unknown(lhs, rhs, total));
            }
            heap.push(Reverse((key(len, d), total, s, nid)));
        }
    }
    Ok(ProofResult::unknown(lhs, rhs, total))
}

fn build_chain(rules: &RuleSet, sides: &[Side; 2], lid: u32, rid: u32) -> Vec<ChainStep> {
    let step = |side: &Side, id: u32, reversed: bool, word: &[Code]| {
        let node = &side.nodes[id as usize];
        let rule = &rules.rules[node.rule as usize];
        ChainStep {
            position: node.pos as usize,
            tag: rules.tags[rule.piece.relation].clone(),
            piece: rule.piece,
            reversed,
            word: rules.alpha.decode(word),
        }
    };
    let mut chain = Vec::new();
    let left = sides[0].path(lid);
    for &id in &left[1..] {
        chain.push(step(&sides[0], id, false, &sides[0].words[id as usize]));
    }
    let right = sides[1].path(rid);
    for k in (1..right.len()).rev() {
        chain.push(step(&sides[1], right[k], true, &sides[1].words[right[k - 1] as usize]));
    }
    chain
}

/// Finds a single move of relation `rel` turning `a` into `b`.
pub fn find_move(p: &Presentation, rel: usize, a: &Word, b: &Word) -> Option<ChainStep> {
    let relation = p.relations.get(rel)?;
    let relator = cyclic_relator(relation);
    let len = relator.len();
    let delta = b.len() as i64 - a.len() as i64;
    for inverted in [false, true] {
        for rotation in 0..len {
            for split in 0..=len {
                let piece = Piece { relation: rel, inverted, rotation, split };
                let (x, z) = piece_pair_of(&relator, &piece)?;
                // free reduction removes letters in pairs
                let grow = z.len() as i64 - x.len() as i64;
                if grow < delta || (grow - delta) % 2 != 0 || x.len() > a.len() {
                    continue;
                }
                for pos in 0..=a.len() - x.len() {
                    if apply_piece(a, &x, &z, pos).as_ref() == Some(b) {
                        return Some(ChainStep {
                            position: pos,
                            tag: relation.tag.clone(),
                            piece,
                            reversed: false,
                            word: b.clone(),
                        });
                    }
                }
            }
        }
    }
    None
}

/// Moves a chain into the context `e * _ * f`.
///
/// Each step is matched to a single move of the same relation where one
/// exists; otherwise the gap is closed by a search with a sixteenth of the
/// budget. Nodes spent are added
/// to `nodes` whether or not the transport succeeds.
pub fn transport(
    p: &Presentation,
    start: &Word,
    chain: &[ChainStep],
    (e, f): (&Word, &Word),
    budget: &Budget,
    nodes: &mut usize,
) -> Option<Vec<ChainStep>> {
    // gaps left by cancellation against the context are short
    let gap = Budget { max_nodes: (budget.max_nodes / GAP_FRACTION).max(1), ..*budget };
    let mut out = Vec::new();
    let mut cur = e.concat(start).concat(f);
    for st in chain {
        let next = e.concat(&st.word).concat(f);
        if next == cur {
            continue;
        }
        if let Some(m) = find_move(p, st.piece.relation, &cur, &next) {
            out.push(m);
        } else {
            let r = prove(p, &cur, &next, &gap).ok()?;
            *nodes += r.nodes_explored;
            if !r.is_proved() {
                return None;
            }
            out.extend(r.chain);
        }
        cur = next;
    }
    Some(out)
}

/// A recipe for proving one equation.
#[derive(Clone, Debug)]
pub enum Plan {
    /// Direct search in the target presentation.
    Search,
    /// Prove each consecutive pair of `lhs`, the listed words, and `rhs`,
    /// using the matching plan (search where none is given).
    Waypoints(Vec<Word>, Vec<Plan>),
    /// Prove `lhs = rhs` in `source`, map it along `images`, and prove the
    /// image of every relation of `source` with the matching plan.
    Via {
        source: Presentation,
        lhs: Word,
        rhs: Word,
        images: BTreeMap<GeneratorId, Word>,
        inner: Box<Plan>,
        relation_plans: Vec<Plan>,
    },
    /// Follow the inner plan using only the relations among the listed
    /// generators.
    Within(Vec<GeneratorId>, Box<Plan>),
    /// Prove `k lhs k^-1 = k rhs k^-1` and move the chain back.
    Conjugate(Word, Box<Plan>),
    /// The first plan that proves the equation.
    FirstOf(Vec<Plan>),
}

impl Plan {
    pub fn via(source: Presentation, lhs: Word, rhs: Word, images: BTreeMap<GeneratorId, Word>) -> Plan {
        Plan::Via { source, lhs, rhs, images, inner: Box::new(Plan::Search), relation_plans: Vec::new() }
    }
}

fn map_word(images: &BTreeMap<GeneratorId, Word>, w: &Word) -> Result<Word, ProverError> {
    if let Some(g) = w.generators().find(|g| !images.contains_key(g)) {
        return Err(ProverError::MissingImage(g.to_string()));
    }
    Ok(w.substitute(|g| images[g].clone()))
}

/// Proves `lhs = rhs` in `p` following `plan`.
pub fn prove_plan(
    p: &Presentation,
    lhs: &Word,
    rhs: &Word,
    plan: &Plan,
    budget: &Budget,
) -> Result<ProofResult, ProverError> {
    p.check_word(lhs)?;
    p.check_word(rhs)?;
    match plan {
        Plan::Search => prove(p, lhs, rhs, budget),
        Plan::Waypoints(ws, plans) => {
            let mut chain = Vec::new();
            let mut nodes = 0;
            let mut points = vec![lhs.clone()];
            points.extend(ws.iter().cloned());
            points.push(rhs.clone());
            for (i, pair) in points.windows(2).enumerate() {
                let sub = plans.get(i).unwrap_or(&Plan::Search);
                let r = prove_plan(p, &pair[0], &pair[1], sub, budget)?;
                nodes += r.nodes_explored;
                if !r.is_proved() {
                    return Ok(ProofResult::unknown(lhs, rhs, nodes));
                }
                chain.extend(r.chain);
            }
            Ok(ProofResult {
                status: ProofStatus::Proved,
                lhs: lhs.clone(),
                rhs: rhs.clone(),
                chain,
                nodes_explored: nodes,
            })
        }
        Plan::Conjugate(k, inner) => {
            let (a, b) = (k.conjugate(lhs), k.conjugate(rhs));
            let r = prove_plan(p, &a, &b, inner, budget)?;
            let mut nodes = r.nodes_explored;
            if !r.is_proved() {
                return Ok(ProofResult::unknown(lhs, rhs, nodes));
            }
            match transport(p, &a, &r.chain, (&k.inverse(), k), budget, &mut nodes) {
                Some(chain) => Ok(ProofResult {
                    status: ProofStatus::Proved,
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    chain,
                    nodes_explored: nodes,
                }),
                None => Ok(ProofResult::unknown(lhs, rhs, nodes)),
            }
        }
        Plan::FirstOf(plans) => {
            let mut nodes = 0;
            for sub in plans {
                let mut r = prove_plan(p, lhs, rhs, sub, budget)?;
                nodes += r.nodes_explored;
                if r.is_proved() {
                    r.nodes_explored = nodes;
                    return Ok(r);
                }
            }
            Ok(ProofResult::unknown(lhs, rhs, nodes))
        }
        Plan::Within(keep, inner) => {
            let sub = p.restrict(&p.name, |g| keep.contains(g));
            let index: Vec<usize> = (0..p.relations.len())
                .filter(|&i| {
                    let r = &p.relations[i];
                    r.lhs.generators().chain(r.rhs.generators()).all(|g| keep.contains(g))
                })
                .collect();
            if sub.check_word(lhs).is_err() || sub.check_word(rhs).is_err() {
                return prove_plan(p, lhs, rhs, inner, budget);
            }
            let mut r = prove_plan(&sub, lhs, rhs, inner, budget)?;
            for st in &mut r.chain {
                st.piece.relation = index[st.piece.relation];
            }
            Ok(r)
        }
        Plan::Via { source, lhs: ql, rhs: qr, images, inner, relation_plans } => {
            if map_word(images, ql)? != *lhs || map_word(images, qr)? != *rhs {
                return Ok(ProofResult::unknown(lhs, rhs, 0));
            }
            let q = prove_plan(source, ql, qr, inner, budget)?;
            let mut nodes = q.nodes_explored;
            if !q.is_proved() {
                return Ok(ProofResult::unknown(lhs, rhs, nodes));
            }
            // only the relations the source chain uses need their images
            let mut lemmas: Vec<ProofResult> = Vec::new();
            for (i, rel) in source.relations.iter().enumerate() {
                let l = map_word(images, &rel.lhs)?;
                let r = map_word(images, &rel.rhs)?;
                if !q.chain.iter().any(|st| st.piece.relation == i) {
                    lemmas.push(ProofResult::unknown(&l, &r, 0));
                    continue;
                }
                let sub = relation_plans.get(i).unwrap_or(&Plan::Search);
                let res = prove_plan(p, &l, &r, sub, budget)?;
                nodes += res.nodes_explored;
                if !res.is_proved() {
                    return Ok(ProofResult::unknown(lhs, rhs, nodes));
                }
                lemmas.push(res);
            }
            match instantiate(p, source, ql, &q.chain, images, &lemmas, budget, &mut nodes) {
                Some(chain) => Ok(ProofResult {
                    status: ProofStatus::Proved,
                    lhs: lhs.clone(),
                    rhs: rhs.clone(),
                    chain,
                    nodes_explored: nodes,
                }),
                None => Ok(ProofResult::unknown(lhs, rhs, nodes)),
            }
        }
    }
}

/// Maps a chain in `source` into `p`. `lemmas[i]` proves the image of
/// relation `i` of `source`.
///
/// A source step rewrites `c x d` into `c z d` for a piece `x -> z`, and
/// `x z^-1` is the rotation `K^-1 r K` of `r = lhs rhs^-1`. So
/// `c x d = (c K^-1) lhs (rhs^-1 K z d)` places the relation lemma in a
/// context, which [`transport`] follows. When the context cancels too far
/// into the lemma, the piece image `σ(x) = σ(z)` is proved on its own (from
/// the lemma, or by search) and moved into `σ(c) _ σ(d)` instead.
#[allow(clippy::too_many_arguments)]
fn instantiate(
    p: &Presentation,
    source: &Presentation,
    start: &Word,
    chain: &[ChainStep],
    images: &BTreeMap<GeneratorId, Word>,
    lemmas: &[ProofResult],
    budget: &Budget,
    nodes: &mut usize,
) -> Option<Vec<ChainStep>> {
    let sigma = |w: &Word| w.substitute(|g| images[g].clone());
    let mut pieces: BTreeMap<(usize, bool, usize, usize), ProofResult> = BTreeMap::new();
    let mut out = Vec::new();
    let mut cur = start.clone();
    for st in chain {
        let a = if st.reversed { &st.word } else { &cur };
        let (x, z) = piece_pair(source, &st.piece)?;
        let (x, z) = (Word::from_letters(x), Word::from_letters(z));
        let c = Word::from_letters(a.letters()[..st.position].iter().cloned());
        let d = Word::from_letters(a.letters()[st.position + x.len()..].iter().cloned());
        let placed = relation_in_context(p, source, &st.piece, (&c, &z.concat(&d)), &sigma, lemmas, budget, nodes);
        let mut steps = match placed {
            Some(steps) => steps,
            None => {
                let key = (st.piece.relation, st.piece.inverted, st.piece.rotation, st.piece.split);
                if let std::collections::btree_map::Entry::Vacant(e) = pieces.entry(key) {
                    let empty = Word::identity();
                    let lemma =
                        match relation_in_context(p, source, &st.piece, (&empty, &z), &sigma, lemmas, budget, nodes) {
                            Some(chain) => ProofResult {
                                status: ProofStatus::Proved,
                                lhs: sigma(&x),
                                rhs: sigma(&z),
                                chain,
                                nodes_explored: 0,
                            },
                            None => {
                                let direct = prove(p, &sigma(&x), &sigma(&z), budget).ok()?;
                                *nodes += direct.nodes_explored;
                                if !direct.is_proved() {
                                    return None;
                                }
                                direct
                            }
                        };
                    e.insert(lemma);
                }
                let lemma = &pieces[&key];
                match transport(p, &lemma.lhs, &lemma.chain, (&sigma(&c), &sigma(&d)), budget, nodes) {
                    Some(steps) => steps,
                    None => {
                        let (from, to) = (sigma(a), sigma(&if st.reversed { cur.clone() } else { st.word.clone() }));
                        let direct = prove_local(p, &from, &to, budget)?;
                        *nodes += direct.nodes_explored;
                        if !direct.is_proved() {
                            return None;
                        }
                        direct.chain
                    }
                }
            }
        };
        if st.reversed {
            steps = reverse_chain(&sigma(a), &steps);
        }
        out.extend(steps);
        cur = st.word.clone();
    }
    Some(out)
}

/// The conjugator among the inverses of short prefixes of `a` and `b` that
/// shortens the equation most, if any shortens it.
pub fn shortening_conjugator(a: &Word, b: &Word, max_prefix: usize) -> Option<Word> {
    let total = |k: &Word| k.conjugate(a).len() + k.conjugate(b).len();
    let mut best: Option<(usize, Word)> = None;
    for w in [a, b] {
        for i in 1..=max_prefix.min(w.len()) {
            let k = Word::from_letters(w.letters()[..i].iter().cloned()).inverse();
            let t = total(&k);
            if t < a.len() + b.len() && best.as_ref().is_none_or(|(bt, bk)| (t, &k) < (*bt, bk)) {
                best = Some((t, k));
            }
        }
    }
    best.map(|(_, k)| k)
}

/// Search among the relations on the generators of `a` and `b`, with the
/// chain renumbered for `p`.
fn prove_local(p: &Presentation, a: &Word, b: &Word, budget: &Budget) -> Option<ProofResult> {
    let keep: Vec<GeneratorId> = a.generators().chain(b.generators()).cloned().collect();
    prove_plan(p, a, b, &Plan::Within(keep, Box::new(Plan::Search)), budget).ok()
}

/// The relation lemma for `piece` followed from `σ(c x tail)` to
/// `σ(c z tail')`, where `tail = z d` gives the rest of the step.
#[allow(clippy::too_many_arguments)]
fn relation_in_context(
    p: &Presentation,
    source: &Presentation,
    piece: &Piece,
    (c, tail): (&Word, &Word),
    sigma: &dyn Fn(&Word) -> Word,
    lemmas: &[ProofResult],
    budget: &Budget,
    nodes: &mut usize,
) -> Option<Vec<ChainStep>> {
    let rel = &source.relations[piece.relation];
    let (kappa, relator) = cyclic_parts(rel);
    let oriented = if piece.inverted { relator.inverse() } else { relator };
    let rho = Word::from_letters(oriented.letters()[..piece.rotation].iter().cloned());
    let k = kappa.concat(&rho);
    let lemma = if piece.inverted { lemmas[piece.relation].reversed() } else { lemmas[piece.relation].clone() };
    let e = sigma(&c.concat(&k.inverse()));
    let f = lemma.rhs.inverse().concat(&sigma(&k.concat(tail)));
    transport(p, &lemma.lhs, &lemma.chain, (&e, &f), budget, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::orbifold_braid;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn proves_and_replays() {
        let p = orbifold_braid(3, 0, &[2]).unwrap();
        for (l, r) in [("h1*h2*h1", "h2*h1*h2"), ("u*h2*u", "h2"), ("h1*u*h1*u^-1", "u*h1*u^-1*h1"), ("u^3", "u")] {
            let res = prove(&p, &w(l), &w(r), &Budget::with_nodes(100_000)).unwrap();
            assert!(res.is_proved(), "{l} = {r}");
            replay(&p, &w(l), &w(r), &res.chain).unwrap();
            let back = res.reversed();
            replay(&p, &w(r), &w(l), &back.chain).unwrap();
        }
    }

    #[test]
    fn breadth_strategy_also_proves() {
        let p = orbifold_braid(3, 0, &[2]).unwrap();
        let b = Budget { strategy: Strategy::Breadth, ..Budget::with_nodes(100_000) };
        let res = prove(&p, &w("h1*u*h1*u^-1"), &w("u*h1*u^-1*h1"), &b).unwrap();
        assert!(res.is_proved());
        replay(&p, &res.lhs, &res.rhs, &res.chain).unwrap();
    }

    #[test]
    fn unknown_for_false_equation() {
        let p = orbifold_braid(3, 0, &[2]).unwrap();
        let res = prove(&p, &w("h1"), &w("h2"), &Budget::with_nodes(2_000)).unwrap();
        assert_eq!(res.status, ProofStatus::Unknown);
    }

    #[test]
    fn tampered_chain_fails() {
        let p = orbifold_braid(3, 0, &[2]).unwrap();
        let res = prove(&p, &w("h1*h2*h1"), &w("h2*h1*h2"), &Budget::default()).unwrap();
        let mut bad = res.chain.clone();
        bad[0].position += 1;
        assert!(replay(&p, &w("h1*h2*h1"), &w("h2*h1*h2"), &bad).is_err());
    }

    #[test]
    fn transport_into_context() {
        let p = orbifold_braid(3, 0, &[3]).unwrap();
        let res = prove(&p, &w("h1*h2*h1"), &w("h2*h1*h2"), &Budget::default()).unwrap();
        let (e, f) = (w("u*h1^-1"), w("h1^-1*h2"));
        let chain = transport(&p, &res.lhs, &res.chain, (&e, &f), &Budget::default(), &mut 0).unwrap();
        replay(&p, &e.concat(&res.lhs).concat(&f), &e.concat(&res.rhs).concat(&f), &chain).unwrap();
    }

    #[test]
    fn proof_via_substitution() {
        // the two-strand statement moved to strands 2 and 3 with a conjugated loop
        let target = orbifold_braid(3, 0, &[3]).unwrap();
        let source = orbifold_braid(2, 0, &[3]).unwrap();
        let c = w("h2^-1*h1^-1*u*h1*h2");
        let images: BTreeMap<_, _> = [(GeneratorId::H(1), w("h2")), (GeneratorId::U(1), c)].into_iter().collect();
        let ql = w("h1*u*h1*u^-1*h1");
        let qr = w("u*h1*u^-1*h1*u*h1*u^-1");
        let l = ql.substitute(|g| images[g].clone());
        let r = qr.substitute(|g| images[g].clone());
        let plan = Plan::via(source, ql, qr, images);
        let res = prove_plan(&target, &l, &r, &plan, &Budget::default()).unwrap();
        assert!(res.is_proved());
        replay(&target, &l, &r, &res.chain).unwrap();
    }

    #[test]
    fn within_keeps_relation_indices() {
        let p = orbifold_braid(3, 0, &[2]).unwrap();
        let (l, r) = (w("h1*h2*h1"), w("h2*h1*h2"));
        let plan = Plan::Within(vec![GeneratorId::H(1), GeneratorId::H(2)], Box::new(Plan::Search));
        let res = prove_plan(&p, &l, &r, &plan, &Budget::default()).unwrap();
        assert!(res.is_proved());
        replay(&p, &l, &r, &res.chain).unwrap();
    }

    #[test]
    fn within_falls_back_outside_its_alphabet() {
        let p = orbifold_braid(3, 0, &[2]).unwrap();
        let (l, r) = (w("u*h2*u"), w("h2"));
        let plan = Plan::Within(vec![GeneratorId::H(1)], Box::new(Plan::Search));
        let res = prove_plan(&p, &l, &r, &plan, &Budget::default()).unwrap();
        assert!(res.is_proved());
        replay(&p, &l, &r, &res.chain).unwrap();
    }

    #[test]
    fn conjugated_search_moves_back() {
        let p = orbifold_braid(3, 0, &[2]).unwrap();
        let (l, r) = (w("h1*h2*h1*u*h2"), w("h2*h1*h2*h2*u"));
        let plan = Plan::Conjugate(w("h2^-1*u"), Box::new(Plan::Search));
        let res = prove_plan(&p, &l, &r, &plan, &Budget::default()).unwrap();
        assert!(res.is_proved());
        replay(&p, &l, &r, &res.chain).unwrap();
    }

    #[test]
    fn first_of_sums_nodes() {
        let p = orbifold_braid(3, 0, &[2]).unwrap();
        let (l, r) = (w("h1*h2*h1"), w("h2*h1*h2"));
        let plan = Plan::FirstOf(vec![Plan::Within(vec![GeneratorId::U(1)], Box::new(Plan::Search)), Plan::Search]);
        let res = prove_plan(&p, &l, &r, &plan, &Budget::default()).unwrap();
        assert!(res.is_proved());
        replay(&p, &l, &r, &res.chain).unwrap();
        let alone = prove_plan(&p, &l, &r, &Plan::Search, &Budget::default()).unwrap();
        assert!(res.nodes_explored >= alone.nodes_explored);
    }

    #[test]
    fn shortening_conjugator_strictly_shortens() {
        let (a, b) = (w("h1*h2*u*h2^-1*h1^-1"), w("h1*h2*h2*h1^-1"));
        let k = shortening_conjugator(&a, &b, 4).unwrap();
        let before = a.len() + b.len();
        assert!(k.conjugate(&a).len() + k.conjugate(&b).len() < before);
        assert_eq!(shortening_conjugator(&w("h1"), &w("h2"), 4), None);
    }
}
