//! Finite presentations and the builders for the orbifold braid families.
//!
//! Every relation carries a tag naming the family it belongs to. In the
//! semidirect presentations the tag prefix is structural: `normal/` relations
//! involve only the normal generators, `torsion/` relations only the torsion
//! generators, and `conj/` relations have the form `y x y^-1 = w`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{alternating_word, product, Conj, GeneratorId, Word, WordError};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
    pub tag: String,
}

impl Relation {
    /// `lhs * rhs^-1`, freely reduced.
    pub fn relator(&self) -> Word {
        self.lhs.concat(&self.rhs.inverse())
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} [{}]", self.lhs, self.rhs, self.tag)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("relation {0} uses generator {1} outside the alphabet")]
    AlphabetMismatch(String, String),
    #[error("relation {0} has identical sides")]
    TrivialRelation(String),
    #[error("relation has an empty tag")]
    EmptyTag,
    #[error("duplicate generator {0}")]
    DuplicateGenerator(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub name: String,
    pub params: BTreeMap<String, i64>,
    pub generators: Vec<GeneratorId>,
    pub relations: Vec<Relation>,
}

impl Presentation {
    pub fn new(name: impl Into<String>, generators: Vec<GeneratorId>) -> Result<Presentation, PresentationError> {
        let mut seen = BTreeSet::new();
        for g in &generators {
            if !seen.insert(g) {
                return Err(PresentationError::DuplicateGenerator(g.to_string()));
            }
        }
        Ok(Presentation { name: name.into(), params: BTreeMap::new(), generators, relations: Vec::new() })
    }

    pub fn with_param(mut self, k: &str, v: i64) -> Self {
        self.params.insert(k.to_string(), v);
        self
    }

    pub fn param(&self, k: &str) -> Option<i64> {
        self.params.get(k).copied()
    }

    pub fn contains(&self, g: &GeneratorId) -> bool {
        self.generators.contains(g)
    }

    pub fn check_word(&self, w: &Word) -> Result<(), WordError> {
        for g in w.generators() {
            if !self.contains(g) {
                return Err(WordError::NotInAlphabet(g.to_string()));
            }
        }
        Ok(())
    }

    pub fn add(&mut self, lhs: Word, rhs: Word, tag: &str) -> Result<(), PresentationError> {
        let rel = Relation { lhs, rhs, tag: tag.to_string() };
        if rel.tag.is_empty() {
            return Err(PresentationError::EmptyTag);
        }
        if rel.lhs == rel.rhs {
            return Err(PresentationError::TrivialRelation(rel.to_string()));
        }
        for g in rel.lhs.generators().chain(rel.rhs.generators()) {
            if !self.contains(g) {
                return Err(PresentationError::AlphabetMismatch(rel.to_string(), g.to_string()));
            }
        }
        self.relations.push(rel);
        Ok(())
    }

    /// Adds `a b = b a`.
    pub fn add_commute(&mut self, a: &Word, b: &Word, tag: &str) -> Result<(), PresentationError> {
        self.add(a * b, b * a, tag)
    }

    /// Adds `<a,b>_k = <b,a>_k`.
    pub fn add_dihedral(&mut self, a: &Word, b: &Word, k: usize, tag: &str) -> Result<(), PresentationError> {
        self.add(alternating_word(a, b, k), alternating_word(b, a, k), tag)
    }

    /// Keeps the generators accepted by `keep` and the relations written
    /// entirely in them.
    pub fn restrict<F: Fn(&GeneratorId) -> bool>(&self, name: &str, keep: F) -> Presentation {
        let generators: Vec<_> = self.generators.iter().filter(|g| keep(g)).cloned().collect();
        let relations = self
            .relations
            .iter()
            .filter(|r| r.lhs.generators().chain(r.rhs.generators()).all(&keep))
            .cloned()
            .collect();
        Presentation { name: name.to_string(), params: self.params.clone(), generators, relations }
    }

    /// The presentation of the normal subgroup of a semidirect presentation:
    /// non-torsion generators and the `normal/` relations.
    pub fn normal_part(&self) -> Presentation {
        let mut p = self.restrict(&format!("{}:normal", self.name), |g| !g.is_torsion_quotient());
        p.relations.retain(|r| r.tag.starts_with("normal/"));
        p
    }

    pub fn torsion_generators(&self) -> Vec<GeneratorId> {
        self.generators.iter().filter(|g| g.is_torsion_quotient()).cloned().collect()
    }

    /// Order `m` of `g` read from a relation `g^m = 1`, if present.
    pub fn torsion_order(&self, g: &GeneratorId) -> Option<u32> {
        self.relations.iter().find_map(|r| {
            let (w, other) = if r.rhs.is_empty() { (&r.lhs, &r.rhs) } else { (&r.rhs, &r.lhs) };
            if !other.is_empty() || w.is_empty() {
                return None;
            }
            let first = &w.letters()[0];
            (first.gen == *g && w.letters().iter().all(|l| l == first)).then_some(w.len() as u32)
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# name: {}", self.name);
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "params: {}", params.join(" "));
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        let _ = writeln!(s, "gens: {}", gens.join(" "));
        for r in &self.relations {
            let _ = writeln!(s, "rel: {r}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Presentation, PresentationError> {
        let syntax = |line: usize, msg: &str| PresentationError::Syntax { line, msg: msg.to_string() };
        let mut name = String::from("unnamed");
        let mut params = BTreeMap::new();
        let mut gens: Option<Vec<GeneratorId>> = None;
        let mut rels: Vec<(usize, Word, Word, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if let Some(n) = line.strip_prefix("# name:") {
                name = n.trim().to_string();
                continue;
            }
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("params:") {
                for item in rest.split_whitespace() {
                    let (k, v) = item.split_once('=').ok_or_else(|| syntax(ln, "expected key=value"))?;
                    let v: i64 = v.parse().map_err(|_| syntax(ln, "parameter value must be an integer"))?;
                    params.insert(k.to_string(), v);
                }
            } else if let Some(rest) = line.strip_prefix("gens:") {
                let g: Result<Vec<_>, _> = rest.split_whitespace().map(GeneratorId::parse).collect();
                gens = Some(g?);
            } else if let Some(rest) = line.strip_prefix("rel:") {
                let rest = rest.trim();
                let open = rest.rfind('[').ok_or_else(|| syntax(ln, "relation needs a [tag]"))?;
                if !rest.ends_with(']') {
                    return Err(syntax(ln, "relation needs a [tag]"));
                }
                let tag = rest[open + 1..rest.len() - 1].trim().to_string();
                let (l, r) = rest[..open].split_once('=').ok_or_else(|| syntax(ln, "relation needs '='"))?;
                rels.push((ln, Word::parse(l)?, Word::parse(r)?, tag));
            } else {
                return Err(syntax(ln, "unrecognised line"));
            }
        }
        let gens = gens.ok_or_else(|| syntax(0, "missing gens: line"))?;
        let mut p = Presentation::new(name, gens)?;
        p.params = params;
        for (_, l, r, t) in rels {
            p.add(l, r, &t)?;
        }
        Ok(p)
    }
}

pub fn h(j: usize) -> Word {
    Word::gen(GeneratorId::H(j as u16))
}

pub fn hi(j: usize) -> Word {
    Word::gen_inv(GeneratorId::H(j as u16))
}

pub fn g(id: GeneratorId) -> Word {
    Word::gen(id)
}

/// `h_b ... h_{a}` for `b >= a` descending, empty if `b < a`.
pub fn h_desc(b: usize, a: usize) -> Word {
    let ws: Vec<Word> = (a..=b).rev().map(h).collect();
    product(ws.iter())
}

/// `h_a ... h_b` ascending, empty if `b < a`.
pub fn h_asc(a: usize, b: usize) -> Word {
    let ws: Vec<Word> = (a..=b).map(h).collect();
    product(ws.iter())
}

fn cone(v: usize) -> GeneratorId {
    GeneratorId::U(v as u16)
}

fn punct(l: usize) -> GeneratorId {
    GeneratorId::T(l as u16)
}

/// Expansion of a pure generator into the mixed generators.
///
/// `a(j,i) = h_{j-1}^-1..h_{i+1}^-1 h_i^2 h_{i+1}..h_{j-1}`, and `b(k,l)`,
/// `c(k,v)` conjugate the loop generator by `h_1..h_{k-1}`.
pub fn expand_pure_generator(id: &GeneratorId) -> Option<Word> {
    match *id {
        GeneratorId::A(j, i) if 1 <= i && i < j => {
            let (j, i) = (j as usize, i as usize);
            let c = h_asc(i + 1, j - 1);
            Some(c.inverse().concat(&h(i).pow(2)).concat(&c))
        }
        GeneratorId::B(k, l) if k >= 1 && l >= 1 => {
            let c = h_asc(1, k as usize - 1);
            Some(c.inverse().concat(&g(punct(l as usize))).concat(&c))
        }
        GeneratorId::C(k, v) if k >= 1 && v >= 1 => {
            let c = h_asc(1, k as usize - 1);
            Some(c.inverse().concat(&g(cone(v as usize))).concat(&c))
        }
        _ => None,
    }
}

fn check_cones(cones: &[u32]) -> Result<(), PresentationError> {
    if let Some(m) = cones.iter().find(|&&m| m < 2) {
        return Err(PresentationError::InvalidParameters(format!("cone order {m} must be at least 2")));
    }
    Ok(())
}

fn cone_params(mut p: Presentation, n: usize, punctures: usize, cones: &[u32]) -> Presentation {
    p = p.with_param("n", n as i64).with_param("L", punctures as i64).with_param("N", cones.len() as i64);
    for (i, m) in cones.iter().enumerate() {
        p = p.with_param(&format!("m{}", i + 1), *m as i64);
    }
    p
}

/// The orbifold braid group on `n` strands with `punctures` punctures and
/// cone points of the given orders, on half twists and loop generators.
pub fn orbifold_braid(n: usize, punctures: usize, cones: &[u32]) -> Result<Presentation, PresentationError> {
    if n < 1 {
        return Err(PresentationError::InvalidParameters("n must be at least 1".into()));
    }
    check_cones(cones)?;
    let nc = cones.len();
    let mut gens: Vec<GeneratorId> = (1..n).map(|j| GeneratorId::H(j as u16)).collect();
    gens.extend((1..=punctures).map(punct));
    gens.extend((1..=nc).map(cone));
    let name = format!("orbifold(n={n},L={punctures},cones={cones:?})");
    let mut p = cone_params(Presentation::new(name, gens)?, n, punctures, cones);

    for (v, &m) in cones.iter().enumerate() {
        p.add(g(cone(v + 1)).pow(m as i64), Word::identity(), "cone-order")?;
    }
    for j in 2..n {
        p.add(h(j - 1) * h(j) * h(j - 1), h(j) * h(j - 1) * h(j), "braid")?;
    }
    for k in 1..n {
        for l in k + 2..n {
            p.add_commute(&h(k), &h(l), "far-commute")?;
        }
    }
    let loops: Vec<GeneratorId> = (1..=punctures).map(punct).chain((1..=nc).map(cone)).collect();
    for x in &loops {
        for j in 2..n {
            p.add_commute(&g(x.clone()), &h(j), "loop-commute")?;
        }
    }
    if n >= 2 {
        for x in &loops {
            let x = g(x.clone());
            p.add_commute(&(&h(1) * &x).concat(&h(1)), &x, "loop-h1-loop")?;
        }
        let conj2 = |x: GeneratorId| hi(1) * g(x) * h(1);
        for lam in 1..=punctures {
            for th in 1..lam {
                p.add_commute(&g(punct(th)), &conj2(punct(lam)), "loop-nest")?;
            }
        }
        for nu in 1..=nc {
            for mu in 1..nu {
                p.add_commute(&g(cone(mu)), &conj2(cone(nu)), "loop-nest")?;
            }
        }
        for lam in 1..=punctures {
            for nu in 1..=nc {
                p.add_commute(&g(punct(lam)), &conj2(cone(nu)), "loop-nest")?;
            }
        }
    }
    Ok(p)
}

/// The pure orbifold braid group on the generators `a(j,i)`, `b(k,l)`,
/// `c(k,v)`.
pub fn pure_orbifold_braid(n: usize, punctures: usize, cones: &[u32]) -> Result<Presentation, PresentationError> {
    use GeneratorId::{A, B, C};
    if n < 1 {
        return Err(PresentationError::InvalidParameters("n must be at least 1".into()));
    }
    check_cones(cones)?;
    let nc = cones.len();
    let (n16, l16, c16) = (n as u16, punctures as u16, nc as u16);
    let mut gens = Vec::new();
    for j in 2..=n16 {
        for i in 1..j {
            gens.push(A(j, i));
        }
    }
    for k in 1..=n16 {
        for l in 1..=l16 {
            gens.push(B(k, l));
        }
    }
    for k in 1..=n16 {
        for v in 1..=c16 {
            gens.push(C(k, v));
        }
    }
    let name = format!("pure(n={n},L={punctures},cones={cones:?})");
    let mut p = cone_params(Presentation::new(name, gens)?, n, punctures, cones);
    let a = |j: u16, i: u16| g(A(j, i));
    let b = |k: u16, l: u16| g(B(k, l));
    let c = |k: u16, v: u16| g(C(k, v));
    let conj = |x: &Word, y: &Word| x.conjugate(y);

    for k in 1..=n16 {
        for v in 1..=c16 {
            p.add(c(k, v).pow(cones[v as usize - 1] as i64), Word::identity(), "pure:cone-order")?;
        }
    }
    // disjoint pairs, i < j < k < l
    for i in 1..=n16 {
        for j in i + 1..=n16 {
            for k in j + 1..=n16 {
                for l in k + 1..=n16 {
                    p.add_commute(&a(j, i), &a(l, k), "pure:disjoint")?;
                }
            }
        }
    }
    for j in 1..=n16 {
        for k in j + 1..=n16 {
            for l in k + 1..=n16 {
                for lam in 1..=l16 {
                    p.add_commute(&b(j, lam), &a(l, k), "pure:disjoint")?;
                }
                for v in 1..=c16 {
                    p.add_commute(&c(j, v), &a(l, k), "pure:disjoint")?;
                }
            }
        }
    }
    // nested pairs
    for i in 1..=n16 {
        for j in i + 1..=n16 {
            for k in j + 1..=n16 {
                for l in k + 1..=n16 {
                    p.add_commute(&a(l, i), &a(k, j), "pure:nested")?;
                }
            }
        }
    }
    for j in 1..=n16 {
        for k in j + 1..=n16 {
            for l in k + 1..=n16 {
                for lam in 1..=l16 {
                    p.add_commute(&b(l, lam), &a(k, j), "pure:nested")?;
                }
            }
        }
    }
    for k in 1..=n16 {
        for l in k + 1..=n16 {
            for lam in 1..=l16 {
                for th in 1..lam {
                    p.add_commute(&b(l, lam), &b(k, th), "pure:nested")?;
                }
            }
        }
    }
    for j in 1..=n16 {
        for k in j + 1..=n16 {
            for l in k + 1..=n16 {
                for v in 1..=c16 {
                    p.add_commute(&c(l, v), &a(k, j), "pure:nested")?;
                }
            }
        }
    }
    for k in 1..=n16 {
        for l in k + 1..=n16 {
            for v in 1..=c16 {
                for lam in 1..=l16 {
                    p.add_commute(&c(l, v), &b(k, lam), "pure:nested")?;
                }
                for mu in 1..v {
                    p.add_commute(&c(l, v), &c(k, mu), "pure:nested")?;
                }
            }
        }
    }
    // crossing pairs, conjugated into commuting position
    for i in 1..=n16 {
        for j in i + 1..=n16 {
            for k in j + 1..=n16 {
                for l in k + 1..=n16 {
                    p.add_commute(&conj(&a(l, k), &a(l, j)), &a(k, i), "pure:crossing")?;
                }
            }
        }
    }
    for i in 1..=n16 {
        for j in i + 1..=n16 {
            for k in j + 1..=n16 {
                for lam in 1..=l16 {
                    p.add_commute(&conj(&a(k, j), &a(k, i)), &b(j, lam), "pure:crossing")?;
                }
                for v in 1..=c16 {
                    p.add_commute(&conj(&a(k, j), &a(k, i)), &c(j, v), "pure:crossing")?;
                }
            }
        }
    }
    for j in 1..=n16 {
        for k in j + 1..=n16 {
            for lam in 1..=l16 {
                for th in 1..lam {
                    p.add_commute(&conj(&a(k, j), &b(k, th)), &b(j, lam), "pure:crossing")?;
                }
            }
            for v in 1..=c16 {
                for mu in 1..v {
                    p.add_commute(&conj(&a(k, j), &c(k, mu)), &c(j, v), "pure:crossing")?;
                }
            }
        }
    }
    // triangles, stored as two equations each
    let triple = |p: &mut Presentation, x: [Word; 3], y: [Word; 3], z: [Word; 3]| {
        let (x, y, z) = (product(x.iter()), product(y.iter()), product(z.iter()));
        p.add(x, y.clone(), "pure:triangle")?;
        p.add(y, z, "pure:triangle")
    };
    for i in 1..=n16 {
        for j in i + 1..=n16 {
            for k in j + 1..=n16 {
                triple(&mut p, [a(k, j), a(k, i), a(j, i)], [a(j, i), a(k, j), a(k, i)], [a(k, i), a(j, i), a(k, j)])?;
            }
        }
    }
    for i in 1..=n16 {
        for j in i + 1..=n16 {
            for lam in 1..=l16 {
                triple(
                    &mut p,
                    [a(j, i), b(j, lam), b(i, lam)],
                    [b(i, lam), a(j, i), b(j, lam)],
                    [b(j, lam), b(i, lam), a(j, i)],
                )?;
            }
            for v in 1..=c16 {
                triple(&mut p, [a(j, i), c(j, v), c(i, v)], [c(i, v), a(j, i), c(j, v)], [c(j, v), c(i, v), a(j, i)])?;
            }
        }
    }
    Ok(p)
}

/// Adds braid relations between adjacent positions and commutations between
/// distant ones. `slots[i]` lists the generators sitting at position `i+1`.
fn add_braid_layout(p: &mut Presentation, slots: &[Vec<GeneratorId>]) -> Result<(), PresentationError> {
    for i in 0..slots.len() {
        for k in i + 1..slots.len() {
            for x in &slots[i] {
                for y in &slots[k] {
                    let (x, y) = (g(x.clone()), g(y.clone()));
                    if k == i + 1 {
                        p.add(&(&x * &y) * &x, &(&y * &x) * &y, "normal/braid")?;
                    } else {
                        p.add_commute(&x, &y, "normal/far-commute")?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// `(a b c)^2 = (c a b)^2`.
fn add_triangle(p: &mut Presentation, a: &Word, b: &Word, c: &Word, tag: &str) -> Result<(), PresentationError> {
    let l = product([a, b, c]).pow(2);
    let r = product([c, a, b]).pow(2);
    p.add(l, r, tag)
}

fn hu1() -> GeneratorId {
    GeneratorId::HConj(Conj::U, 1)
}

fn hup(j: usize) -> GeneratorId {
    GeneratorId::HConj(Conj::UPrime, j as u16)
}

fn hub(j: usize) -> GeneratorId {
    GeneratorId::HConj(Conj::U, j as u16)
}

fn semidirect_two_cone(n: usize, m: u32, m2: u32, triangles: bool) -> Result<Presentation, PresentationError> {
    if n < 3 {
        return Err(PresentationError::InvalidParameters("n must be at least 3".into()));
    }
    check_cones(&[m, m2])?;
    let u = g(cone(1));
    let up = g(GeneratorId::UPrime);
    let mut gens = vec![hu1()];
    gens.extend((1..n).map(|j| GeneratorId::H(j as u16)));
    gens.extend([hup(n - 1), cone(1), GeneratorId::UPrime]);
    let name = format!("two-cone(n={n},m={m},m'={m2})");
    let mut p = cone_params(Presentation::new(name, gens)?, n, 0, &[m, m2]);

    let mut slots: Vec<Vec<GeneratorId>> = (1..n).map(|j| vec![GeneratorId::H(j as u16)]).collect();
    slots[0].push(hu1());
    slots[n - 2].push(hup(n - 1));
    add_braid_layout(&mut p, &slots)?;
    p.add_dihedral(&h(1), &g(hu1()), m as usize, "normal/dihedral")?;
    p.add_dihedral(&h(n - 1), &g(hup(n - 1)), m2 as usize, "normal/dihedral")?;
    if triangles {
        add_triangle(&mut p, &h(1), &g(hu1()), &h(2), "normal/triangle")?;
        add_triangle(&mut p, &h(n - 1), &g(hup(n - 1)), &h(n - 2), "normal/triangle")?;
    }
    p.add(u.pow(m as i64), Word::identity(), "torsion/order")?;
    p.add(up.pow(m2 as i64), Word::identity(), "torsion/order")?;
    p.add_commute(&u, &up, "torsion/commute")?;
    for k in 2..n {
        p.add(u.conjugate(&h(k)), h(k), "conj/fix")?;
    }
    for j in 1..=n - 2 {
        p.add(up.conjugate(&h(j)), h(j), "conj/fix")?;
    }
    p.add(u.conjugate(&g(hup(n - 1))), g(hup(n - 1)), "conj/cross")?;
    p.add(up.conjugate(&g(hu1())), g(hu1()), "conj/cross")?;
    p.add(u.conjugate(&h(1)), g(hu1()), "conj/shift")?;
    p.add(up.conjugate(&h(n - 1)), g(hup(n - 1)), "conj/shift")?;
    p.add(u.conjugate(&g(hu1())), g(hu1()).inverse().concat(&h(1)).concat(&g(hu1())), "conj/twist")?;
    let x = g(hup(n - 1));
    p.add(up.conjugate(&x), x.inverse().concat(&h(n - 1)).concat(&x), "conj/twist")?;
    Ok(p)
}

/// Semidirect presentation of the braid group with two cone points of
/// orders `m` and `m2`, `n >= 3`.
pub fn two_cone_semidirect(n: usize, m: u32, m2: u32) -> Result<Presentation, PresentationError> {
    semidirect_two_cone(n, m, m2, true)
}

/// The `n = 3` variant of [`two_cone_semidirect`] in which the two triangle
/// relations are replaced by the families of twisted triangle relations.
/// For `m = m2 = 2` no triangle relations are needed at all.
pub fn two_cone_semidirect_n3(m: u32, m2: u32) -> Result<Presentation, PresentationError> {
    let mut p = semidirect_two_cone(3, m, m2, false)?;
    p.name = format!("two-cone-n3(m={m},m'={m2})");
    if m == 2 && m2 == 2 {
        return Ok(p);
    }
    let hu = g(hu1());
    let hp = g(hup(2));
    let ranges = |order: u32| {
        let l = order / 2;
        if order.is_multiple_of(2) {
            (l, l)
        } else {
            (l, l + 1)
        }
    };
    // X = (y^-1 x^-1)^k mid (x y)^k
    let twist = |x: &Word, y: &Word, mid: &Word, k: u32| {
        let left = y.inverse().concat(&x.inverse()).pow(k as i64);
        let right = x.concat(y).pow(k as i64);
        product([&left, mid, &right])
    };
    let (k_max, kp_max) = ranges(m2);
    let base = h(1) * hu.clone();
    for k in 0..k_max {
        let x = twist(&h(2), &hp, &hp, k);
        p.add(base.concat(&x).pow(2), x.concat(&base).pow(2), "normal/twisted-triangle")?;
    }
    for k in 0..kp_max {
        let x = twist(&h(2), &hp, &h(2), k);
        p.add(base.concat(&x).pow(2), x.concat(&base).pow(2), "normal/twisted-triangle")?;
    }
    let (k_max, kp_max) = ranges(m);
    let base = h(2) * hp.clone();
    for k in 0..k_max {
        let y = twist(&h(1), &hu, &hu, k);
        p.add(base.concat(&y).pow(2), y.concat(&base).pow(2), "normal/twisted-triangle")?;
    }
    for k in 0..kp_max {
        let y = twist(&h(1), &hu, &h(1), k);
        p.add(base.concat(&y).pow(2), y.concat(&base).pow(2), "normal/twisted-triangle")?;
    }
    Ok(p)
}

/// Semidirect presentation for one cone point of order `m`, `n >= 2`.
pub fn one_cone_semidirect(n: usize, m: u32) -> Result<Presentation, PresentationError> {
    if n < 2 {
        return Err(PresentationError::InvalidParameters("n must be at least 2".into()));
    }
    check_cones(&[m])?;
    let u = g(cone(1));
    let mut gens = vec![hu1()];
    gens.extend((1..n).map(|j| GeneratorId::H(j as u16)));
    gens.push(cone(1));
    let name = format!("one-cone(n={n},m={m})");
    let mut p = cone_params(Presentation::new(name, gens)?, n, 0, &[m]);
    let mut slots: Vec<Vec<GeneratorId>> = (1..n).map(|j| vec![GeneratorId::H(j as u16)]).collect();
    slots[0].push(hu1());
    add_braid_layout(&mut p, &slots)?;
    p.add_dihedral(&h(1), &g(hu1()), m as usize, "normal/dihedral")?;
    if n >= 3 {
        add_triangle(&mut p, &h(1), &g(hu1()), &h(2), "normal/triangle")?;
    }
    p.add(u.pow(m as i64), Word::identity(), "torsion/order")?;
    for k in 2..n {
        p.add(u.conjugate(&h(k)), h(k), "conj/fix")?;
    }
    p.add(u.conjugate(&h(1)), g(hu1()), "conj/shift")?;
    p.add(u.conjugate(&g(hu1())), g(hu1()).inverse().concat(&h(1)).concat(&g(hu1())), "conj/twist")?;
    Ok(p)
}

/// Semidirect presentation for one cone point of order `m` and one
/// puncture, `n >= 3`. The torsion generator is `ubar` and `hu{n-1}` is
/// `ubar h_{n-1} ubar^-1`.
pub fn punctured_semidirect(n: usize, m: u32) -> Result<Presentation, PresentationError> {
    if n < 3 {
        return Err(PresentationError::InvalidParameters("n must be at least 3".into()));
    }
    check_cones(&[m])?;
    let ub = g(GeneratorId::UBar);
    let t = g(punct(1));
    let hu = g(hub(n - 1));
    let mut gens: Vec<GeneratorId> = (1..n).map(|j| GeneratorId::H(j as u16)).collect();
    gens.extend([hub(n - 1), punct(1), GeneratorId::UBar]);
    let name = format!("punctured(n={n},m={m})");
    let mut p = cone_params(Presentation::new(name, gens)?, n, 1, &[m]);
    let mut slots: Vec<Vec<GeneratorId>> = (1..n).map(|j| vec![GeneratorId::H(j as u16)]).collect();
    slots[n - 2].push(hub(n - 1));
    add_braid_layout(&mut p, &slots)?;
    p.add(&(&t * &h(1)) * &(&t * &h(1)), &(&h(1) * &t) * &(&h(1) * &t), "normal/puncture-braid")?;
    for j in 2..n {
        p.add_commute(&t, &h(j), "normal/puncture-commute")?;
    }
    p.add_commute(&t, &hu, "normal/puncture-commute")?;
    p.add_dihedral(&h(n - 1), &hu, m as usize, "normal/dihedral")?;
    add_triangle(&mut p, &h(n - 1), &hu, &h(n - 2), "normal/triangle")?;
    p.add(ub.pow(m as i64), Word::identity(), "torsion/order")?;
    for j in 1..=n - 2 {
        p.add(ub.conjugate(&h(j)), h(j), "conj/fix")?;
    }
    p.add(ub.conjugate(&t), t.clone(), "conj/fix")?;
    p.add(ub.conjugate(&h(n - 1)), hu.clone(), "conj/shift")?;
    p.add(ub.conjugate(&hu), hu.inverse().concat(&h(n - 1)).concat(&hu), "conj/twist")?;
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    Finite(u32),
    Infinite,
}

/// A simple graph with edge weights in `{3,4,...} ∪ {∞}` and marked
/// triangles `(r, s, t)`. A marked triangle must be complete with the edges
/// `{r,t}` and `{s,t}` of weight 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub vertices: Vec<GeneratorId>,
    edges: BTreeMap<(usize, usize), Weight>,
    triples: Vec<(usize, usize, usize)>,
}

impl WeightedGraph {
    pub fn new(vertices: Vec<GeneratorId>) -> WeightedGraph {
        WeightedGraph { vertices, edges: BTreeMap::new(), triples: Vec::new() }
    }

    /// `k` vertices named `v1..vk`.
    pub fn with_named_vertices(k: usize) -> WeightedGraph {
        WeightedGraph::new((1..=k).map(|i| GeneratorId::Named(format!("v{i}"))).collect())
    }

    pub fn add_edge(&mut self, a: usize, b: usize, w: Weight) -> Result<(), PresentationError> {
        if a == b || a >= self.vertices.len() || b >= self.vertices.len() {
            return Err(PresentationError::InvalidGraph(format!("bad edge ({a},{b})")));
        }
        if let Weight::Finite(k) = w {
            if k < 3 {
                return Err(PresentationError::InvalidGraph(format!("edge weight {k} below 3")));
            }
        }
        self.edges.insert((a.min(b), a.max(b)), w);
        Ok(())
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<Weight> {
        self.edges.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn mark_triangle(&mut self, r: usize, s: usize, t: usize) -> Result<(), PresentationError> {
        let distinct = r != s && s != t && r != t;
        let complete = matches!(self.weight(r, s), Some(Weight::Finite(_)))
            && self.weight(r, t) == Some(Weight::Finite(3))
            && self.weight(s, t) == Some(Weight::Finite(3));
        if !distinct || !complete {
            return Err(PresentationError::InvalidGraph(format!("({r},{s},{t}) is not an admissible triangle")));
        }
        self.triples.push((r, s, t));
        Ok(())
    }
}

/// Artin group of a weighted graph, with one triangle relation per marked
/// triangle.
pub fn artin_from_graph(graph: &WeightedGraph) -> Result<Presentation, PresentationError> {
    let mut p = Presentation::new("artin", graph.vertices.clone())?.with_param("k", graph.vertices.len() as i64);
    let v = |i: usize| g(graph.vertices[i].clone());
    for a in 0..graph.vertices.len() {
        for b in a + 1..graph.vertices.len() {
            match graph.weight(a, b) {
                None => p.add_commute(&v(a), &v(b), "artin/commute")?,
                Some(Weight::Finite(k)) => p.add_dihedral(&v(a), &v(b), k as usize, "artin/edge")?,
                Some(Weight::Infinite) => {}
            }
        }
    }
    for &(r, s, t) in &graph.triples {
        add_triangle(&mut p, &v(r), &v(s), &v(t), "artin/triangle")?;
    }
    Ok(p)
}

/// Which generators receive an order-two relation in [`coxeterize`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareFilter {
    All,
    /// Half twists, conjugated half twists and named vertices.
    HalfTwists,
}

/// Adds `g^2 = 1` for every generator passing the filter.
pub fn coxeterize(p: &Presentation, filter: SquareFilter) -> Presentation {
    let mut q = p.clone();
    q.name = format!("{}:coxeter", p.name);
    for gen in &p.generators {
        if filter == SquareFilter::All || gen.is_h_like() {
            let w = g(gen.clone()).pow(2);
            q.add(w, Word::identity(), "coxeter/square").expect("square relation is well formed");
        }
    }
    q
}
