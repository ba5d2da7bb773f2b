//! Evaluation into monomial groups `A ≀ S_n`, with `A` a product of cyclic
//! groups (one per cone point) and copies of `Z` (one per puncture).
//!
//! An element `(σ, a)` stands for the monomial matrix with entry
//! `θ^{a_j}` in row `σ(j)`, column `j`. With this convention the product is
//! `(σ, a)(τ, b) = (στ, c)` where `c_j = b_j + a_{τ(j)}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::presentations::{expand_pure_generator, h_asc, Presentation};
use crate::words::{Conj, GeneratorId, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("presentation lacks parameter {0}")]
    MissingParameter(String),
    #[error("no image for generator {0}")]
    NoImage(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("group has {0} elements, more than the limit {1}")]
    TooLarge(u128, usize),
}

/// The exponent group `Z_{m_1} x ... x Z_{m_N} x Z^L` and the strand count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WreathShape {
    pub n: usize,
    pub moduli: Vec<u32>,
    pub free: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MonomialElement {
    /// `perm[j] = σ(j)`, zero based.
    pub perm: Vec<u16>,
    /// `exps[j * d + c]` is coordinate `c` of `a_j`, `d` the exponent rank.
    pub exps: Vec<i64>,
}

impl WreathShape {
    pub fn new(n: usize, moduli: Vec<u32>, free: usize) -> WreathShape {
        WreathShape { n, moduli, free }
    }

    pub fn rank(&self) -> usize {
        self.moduli.len() + self.free
    }

    pub fn identity(&self) -> MonomialElement {
        MonomialElement { perm: (0..self.n as u16).collect(), exps: vec![0; self.n * self.rank()] }
    }

    fn normalize(&self, e: &mut MonomialElement) {
        let d = self.rank();
        for j in 0..self.n {
            for (c, &m) in self.moduli.iter().enumerate() {
                e.exps[j * d + c] = e.exps[j * d + c].rem_euclid(m as i64);
            }
        }
    }

    pub fn mul(&self, x: &MonomialElement, y: &MonomialElement) -> MonomialElement {
        let d = self.rank();
        let perm = y.perm.iter().map(|&t| x.perm[t as usize]).collect();
        let mut exps = vec![0; self.n * d];
        for j in 0..self.n {
            let t = y.perm[j] as usize;
            for c in 0..d {
                exps[j * d + c] = y.exps[j * d + c] + x.exps[t * d + c];
            }
        }
        let mut e = MonomialElement { perm, exps };
        self.normalize(&mut e);
        e
    }

    pub fn inv(&self, x: &MonomialElement) -> MonomialElement {
        let d = self.rank();
        let mut perm = vec![0u16; self.n];
        for (j, &s) in x.perm.iter().enumerate() {
            perm[s as usize] = j as u16;
        }
        let mut exps = vec![0; self.n * d];
        for j in 0..self.n {
            let s = perm[j] as usize;
            for c in 0..d {
                exps[j * d + c] = -x.exps[s * d + c];
            }
        }
        let mut e = MonomialElement { perm, exps };
        self.normalize(&mut e);
        e
    }

    /// Adjacent transposition of strands `j` and `j+1` (one based).
    pub fn transposition(&self, j: usize) -> MonomialElement {
        let mut e = self.identity();
        e.perm.swap(j - 1, j);
        e
    }

    /// Unit exponent in coordinate `coord` on strand `strand` (zero based).
    pub fn unit(&self, strand: usize, coord: usize) -> MonomialElement {
        let mut e = self.identity();
        e.exps[strand * self.rank() + coord] = 1;
        self.normalize(&mut e);
        e
    }

    /// Sum over strands of each exponent coordinate.
    pub fn exponent_totals(&self, e: &MonomialElement) -> Vec<i64> {
        let d = self.rank();
        let mut out = vec![0; d];
        for strand in e.exps.chunks(d.max(1)) {
            for (o, x) in out.iter_mut().zip(strand) {
                *o += x;
            }
        }
        for (c, &m) in self.moduli.iter().enumerate() {
            out[c] = out[c].rem_euclid(m as i64);
        }
        out
    }

    pub fn format(&self, e: &MonomialElement) -> String {
        let d = self.rank();
        let vecs: Vec<String> = (0..self.n)
            .map(|j| {
                let v: Vec<String> = e.exps[j * d..(j + 1) * d].iter().map(|x| x.to_string()).collect();
                if d == 1 {
                    v[0].clone()
                } else {
                    format!("({})", v.join(","))
                }
            })
            .collect();
        format!("{} [{}]", cycle_notation(&e.perm), vecs.join(" "))
    }
}

/// Cycle notation with one based points, `()` for the identity.
pub fn cycle_notation(perm: &[u16]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for s in 0..perm.len() {
        if seen[s] || perm[s] as usize == s {
            continue;
        }
        let mut cyc = Vec::new();
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            cyc.push((j + 1).to_string());
            j = perm[j] as usize;
        }
        out.push_str(&format!("({})", cyc.join(" ")));
    }
    if out.is_empty() {
        "()".to_string()
    } else {
        out
    }
}

impl fmt::Display for MonomialElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", cycle_notation(&self.perm), self.exps)
    }
}

/// Images of generators in a monomial group.
#[derive(Clone, Debug)]
pub struct WreathAssignment {
    pub shape: WreathShape,
    images: BTreeMap<GeneratorId, MonomialElement>,
}

impl WreathAssignment {
    /// The standard assignment for a presentation with parameters `n`,
    /// `N`, `m1..mN` and `L`: half twists go to transpositions, the loop
    /// around cone `v` to a unit in coordinate `v` on the first strand, and
    /// the loop around puncture `l` to a unit in its `Z` coordinate when
    /// `track_punctures` is set (to the identity otherwise). Every other
    /// generator is evaluated through its defining word.
    pub fn for_presentation(p: &Presentation, track_punctures: bool) -> Result<WreathAssignment, QuotientError> {
        let get = |k: &str| p.param(k).ok_or_else(|| QuotientError::MissingParameter(k.to_string()));
        let n = get("n")? as usize;
        let cones = p.param("N").unwrap_or(0) as usize;
        let punct = p.param("L").unwrap_or(0) as usize;
        let moduli = (1..=cones).map(|v| get(&format!("m{v}")).map(|m| m as u32)).collect::<Result<Vec<_>, _>>()?;
        let shape = WreathShape::new(n, moduli, if track_punctures { punct } else { 0 });
        let mut a = WreathAssignment { shape, images: BTreeMap::new() };
        for j in 1..n {
            a.images.insert(GeneratorId::H(j as u16), a.shape.transposition(j));
        }
        for v in 1..=cones {
            a.images.insert(GeneratorId::U(v as u16), a.shape.unit(0, v - 1));
        }
        for l in 1..=punct {
            let img = if track_punctures { a.shape.unit(0, cones + l - 1) } else { a.shape.identity() };
            a.images.insert(GeneratorId::T(l as u16), img);
        }
        let last = |x: GeneratorId| {
            let c = h_asc(1, n - 1);
            c.inverse().concat(&Word::gen(x)).concat(&c)
        };
        let mut derived: Vec<(GeneratorId, Word)> = Vec::new();
        if cones >= 1 {
            derived.push((GeneratorId::UBar, last(GeneratorId::U(1))));
        }
        if cones >= 2 {
            derived.push((GeneratorId::UPrime, last(GeneratorId::U(2))));
        }
        for (g, w) in derived {
            let e = a.eval(&w)?;
            a.images.insert(g, e);
        }
        for g in &p.generators {
            if a.images.contains_key(g) {
                continue;
            }
            let w = match g {
                GeneratorId::HConj(Conj::U, j) => {
                    let y = if p.contains(&GeneratorId::U(1)) { GeneratorId::U(1) } else { GeneratorId::UBar };
                    Some(Word::gen(y).conjugate(&Word::gen(GeneratorId::H(*j))))
                }
                GeneratorId::HConj(Conj::UPrime, j) => {
                    Some(Word::gen(GeneratorId::UPrime).conjugate(&Word::gen(GeneratorId::H(*j))))
                }
                other => expand_pure_generator(other),
            };
            if let Some(w) = w {
                let e = a.eval(&w)?;
                a.images.insert(g.clone(), e);
            }
        }
        Ok(a)
    }

    /// An assignment with no images yet.
    pub fn from_shape(shape: WreathShape) -> WreathAssignment {
        WreathAssignment { shape, images: BTreeMap::new() }
    }

    pub fn with_image(mut self, g: GeneratorId, e: MonomialElement) -> Self {
        self.images.insert(g, e);
        self
    }

    pub fn image(&self, g: &GeneratorId) -> Option<&MonomialElement> {
        self.images.get(g)
    }

    pub fn eval(&self, w: &Word) -> Result<MonomialElement, QuotientError> {
        let mut acc = self.shape.identity();
        for l in w.letters() {
            let g = self.images.get(&l.gen).ok_or_else(|| QuotientError::NoImage(l.gen.to_string()))?;
            let g = if l.inv { self.shape.inv(g) } else { g.clone() };
            acc = self.shape.mul(&acc, &g);
        }
        Ok(acc)
    }

    /// True when the two words have different images.
    pub fn separate(&self, a: &Word, b: &Word) -> Result<bool, QuotientError> {
        Ok(self.eval(a)? != self.eval(b)?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub tag: String,
    pub relation: String,
    pub holds: bool,
}

/// Evaluates both sides of every relation.
pub fn check_relations_in_quotient(
    p: &Presentation,
    a: &WreathAssignment,
) -> Result<Vec<RelationCheck>, QuotientError> {
    p.relations
        .iter()
        .map(|r| {
            Ok(RelationCheck { tag: r.tag.clone(), relation: r.to_string(), holds: a.eval(&r.lhs)? == a.eval(&r.rhs)? })
        })
        .collect()
}

/// `|G(m,p,n)| = m^n n! / p`.
pub fn monomial_order(m: u32, p: u32, n: usize) -> u128 {
    let fact: u128 = (1..=n as u128).product();
    (m as u128).pow(n as u32) * fact / p as u128
}

/// Lists `G(m,p,n)`: monomial matrices with `m`-th roots of unity whose
/// exponent sum is divisible by `p`.
pub fn enumerate_monomial(m: u32, p: u32, n: usize, limit: usize) -> Result<Vec<MonomialElement>, QuotientError> {
    if m == 0 || p == 0 || !m.is_multiple_of(p) || n == 0 {
        return Err(QuotientError::InvalidParameters(format!("G({m},{p},{n}) needs p | m and n >= 1")));
    }
    let order = monomial_order(m, p, n);
    if order > limit as u128 {
        return Err(QuotientError::TooLarge(order, limit));
    }
    let mut perms = Vec::new();
    permutations(&mut (0..n as u16).collect(), 0, &mut perms);
    let mut out = Vec::with_capacity(order as usize);
    let total = (m as u64).pow(n as u32);
    for perm in &perms {
        for code in 0..total {
            let mut c = code;
            let mut exps = Vec::with_capacity(n);
            for _ in 0..n {
                exps.push((c % m as u64) as i64);
                c /= m as u64;
            }
            if exps.iter().sum::<i64>() % p as i64 == 0 {
                out.push(MonomialElement { perm: perm.clone(), exps });
            }
        }
    }
    out.sort();
    Ok(out)
}

fn permutations(cur: &mut Vec<u16>, k: usize, out: &mut Vec<Vec<u16>>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permutations(cur, k + 1, out);
        cur.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::orbifold_braid;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn product_law() {
        let s = WreathShape::new(2, vec![2], 0);
        let h = s.transposition(1);
        let u = s.unit(0, 0);
        let x = s.mul(&s.mul(&h, &u), &h);
        assert_eq!(x, s.unit(1, 0));
        let theta = s.mul(&s.mul(&x, &h), &s.mul(&h, &u));
        assert_eq!(theta.exps, vec![1, 1]);
        assert_eq!(s.mul(&theta, &s.inv(&theta)), s.identity());
    }

    #[test]
    fn relations_hold() {
        let p = orbifold_braid(3, 1, &[3, 2]).unwrap();
        let a = WreathAssignment::for_presentation(&p, true).unwrap();
        assert!(check_relations_in_quotient(&p, &a).unwrap().iter().all(|c| c.holds));
        assert!(a.separate(&w("t*h1"), &w("h1*t")).unwrap());
        let collapsed = WreathAssignment::for_presentation(&p, false).unwrap();
        assert!(!collapsed.separate(&w("t*h1"), &w("h1*t")).unwrap());
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(enumerate_monomial(3, 3, 3, 1000).unwrap().len(), 54);
        assert_eq!(enumerate_monomial(2, 1, 3, 1000).unwrap().len(), 48);
        assert_eq!(enumerate_monomial(3, 3, 1, 1000).unwrap().len(), 1);
        assert!(enumerate_monomial(4, 3, 2, 1000).is_err());
        assert_eq!(monomial_order(4, 4, 3), 96);
    }

    #[test]
    fn cycles() {
        assert_eq!(cycle_notation(&[1, 2, 0, 3]), "(1 2 3)");
        assert_eq!(cycle_notation(&[0, 1]), "()");
    }
}
