//! Generator assignments between presentations, their relation
//! obligations, and the conjugation automorphisms of the semidirect
//! presentations.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::presentations::{
    h, h_asc, one_cone_semidirect, orbifold_braid, punctured_semidirect, two_cone_semidirect, Presentation,
    PresentationError,
};
use crate::prover::{prove_plan, Budget, Plan, ProofResult, ProverError};
use crate::words::{alternating_word, Conj, GeneratorId, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomError {
    #[error("no image given for generator {0}")]
    MissingImage(String),
    #[error("image of {0} uses generator {1} outside the target")]
    ForeignImage(String, String),
    #[error("{0} has no conjugation relations")]
    NoConjugation(String),
    #[error("conjugation by {0} does not determine the image of {1}")]
    IncompleteConjugation(String, String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Prover(#[from] ProverError),
}

/// A map on generators, extended to words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub source: Presentation,
    pub target: Presentation,
    pub images: BTreeMap<GeneratorId, Word>,
}

/// An equation the target must satisfy for an assignment to be a
/// homomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obligation {
    pub tag: String,
    pub lhs: Word,
    pub rhs: Word,
}

impl Assignment {
    pub fn new(
        source: Presentation,
        target: Presentation,
        images: BTreeMap<GeneratorId, Word>,
    ) -> Result<Self, HomError> {
        for g in &source.generators {
            let img = images.get(g).ok_or_else(|| HomError::MissingImage(g.to_string()))?;
            if let Some(x) = img.generators().find(|x| !target.contains(x)) {
                return Err(HomError::ForeignImage(g.to_string(), x.to_string()));
            }
        }
        Ok(Assignment { source, target, images })
    }

    pub fn apply(&self, w: &Word) -> Word {
        w.substitute(|g| self.images.get(g).cloned().unwrap_or_else(|| Word::gen(g.clone())))
    }

    /// `other` after `self`: first `self`, then `other`.
    pub fn then(&self, other: &Assignment) -> Assignment {
        let images = self.images.iter().map(|(g, w)| (g.clone(), other.apply(w))).collect();
        Assignment { source: self.source.clone(), target: other.target.clone(), images }
    }

    /// `self` applied `k` times; requires source and target alphabets to agree.
    pub fn power(&self, k: usize) -> Assignment {
        let mut out = Assignment {
            source: self.source.clone(),
            target: self.target.clone(),
            images: self.source.generators.iter().map(|g| (g.clone(), Word::gen(g.clone()))).collect(),
        };
        for _ in 0..k {
            out = out.then(self);
        }
        out
    }

    /// One obligation per source relation, tagged `prefix/<relation tag>#i`.
    pub fn obligations(&self, prefix: &str) -> Vec<Obligation> {
        self.source
            .relations
            .iter()
            .enumerate()
            .map(|(i, r)| Obligation {
                tag: format!("{prefix}/{}#{i}", r.tag),
                lhs: self.apply(&r.lhs),
                rhs: self.apply(&r.rhs),
            })
            .collect()
    }

    /// Proves every obligation in the target.
    pub fn verify(&self, prefix: &str, budget: &Budget) -> Result<Vec<(Obligation, ProofResult)>, HomError> {
        self.obligations(prefix)
            .into_iter()
            .map(|o| {
                let r = prove_plan(&self.target, &o.lhs, &o.rhs, &Plan::Search, budget)?;
                Ok((o, r))
            })
            .collect()
    }
}

fn gen(g: GeneratorId) -> Word {
    Word::gen(g)
}

fn identity_on_h(n: usize) -> BTreeMap<GeneratorId, Word> {
    (1..n).map(|j| (GeneratorId::H(j as u16), h(j))).collect()
}

/// `c_{n,v} = h_{n-1}^-1..h_1^-1 x h_1..h_{n-1}` for a loop generator `x`.
pub fn last_strand_loop(n: usize, x: GeneratorId) -> Word {
    let c = h_asc(1, n - 1);
    c.inverse().concat(&gen(x)).concat(&c)
}

/// The pair `(phi, psi)` between the mixed presentation with two cone points
/// and its semidirect presentation.
pub fn two_cone_assignments(n: usize, m: u32, m2: u32) -> Result<(Assignment, Assignment), HomError> {
    let mixed = orbifold_braid(n, 0, &[m, m2])?;
    let semi = two_cone_semidirect(n, m, m2)?;
    let ch = h_asc(1, n - 1);
    let mut phi = identity_on_h(n);
    phi.insert(GeneratorId::U(1), gen(GeneratorId::U(1)));
    phi.insert(GeneratorId::U(2), ch.concat(&gen(GeneratorId::UPrime)).concat(&ch.inverse()));
    let up = last_strand_loop(n, GeneratorId::U(2));
    let mut psi = identity_on_h(n);
    psi.insert(GeneratorId::U(1), gen(GeneratorId::U(1)));
    psi.insert(GeneratorId::UPrime, up.clone());
    psi.insert(GeneratorId::HConj(Conj::U, 1), gen(GeneratorId::U(1)).conjugate(&h(1)));
    psi.insert(GeneratorId::HConj(Conj::UPrime, n as u16 - 1), up.conjugate(&h(n - 1)));
    Ok((Assignment::new(mixed.clone(), semi.clone(), phi)?, Assignment::new(semi, mixed, psi)?))
}

/// The pair `(phi, psi)` for one cone point.
pub fn one_cone_assignments(n: usize, m: u32) -> Result<(Assignment, Assignment), HomError> {
    let mixed = orbifold_braid(n, 0, &[m])?;
    let semi = one_cone_semidirect(n, m)?;
    let mut phi = identity_on_h(n);
    phi.insert(GeneratorId::U(1), gen(GeneratorId::U(1)));
    let mut psi = identity_on_h(n);
    psi.insert(GeneratorId::U(1), gen(GeneratorId::U(1)));
    psi.insert(GeneratorId::HConj(Conj::U, 1), gen(GeneratorId::U(1)).conjugate(&h(1)));
    Ok((Assignment::new(mixed.clone(), semi.clone(), phi)?, Assignment::new(semi, mixed, psi)?))
}

/// The pair `(phi, psi)` for one cone point and one puncture.
pub fn punctured_assignments(n: usize, m: u32) -> Result<(Assignment, Assignment), HomError> {
    let mixed = orbifold_braid(n, 1, &[m])?;
    let semi = punctured_semidirect(n, m)?;
    let ch = h_asc(1, n - 1);
    let mut phi = identity_on_h(n);
    phi.insert(GeneratorId::T(1), gen(GeneratorId::T(1)));
    phi.insert(GeneratorId::U(1), ch.concat(&gen(GeneratorId::UBar)).concat(&ch.inverse()));
    let ub = last_strand_loop(n, GeneratorId::U(1));
    let mut psi = identity_on_h(n);
    psi.insert(GeneratorId::T(1), gen(GeneratorId::T(1)));
    psi.insert(GeneratorId::UBar, ub.clone());
    psi.insert(GeneratorId::HConj(Conj::U, n as u16 - 1), ub.conjugate(&h(n - 1)));
    Ok((Assignment::new(mixed.clone(), semi.clone(), phi)?, Assignment::new(semi, mixed, psi)?))
}

/// The automorphism `x -> y x y^-1` of the normal part of a semidirect
/// presentation, read off its `conj/` relations.
pub fn conjugation_automorphism(p: &Presentation, y: &GeneratorId) -> Result<Assignment, HomError> {
    let normal = p.normal_part();
    let mut images = BTreeMap::new();
    for r in p.relations.iter().filter(|r| r.tag.starts_with("conj/")) {
        let ls = r.lhs.letters();
        if ls.len() == 3 && ls[0].gen == *y && !ls[0].inv && ls[2].gen == *y && ls[2].inv && !ls[1].inv {
            images.insert(ls[1].gen.clone(), r.rhs.clone());
        }
    }
    if images.is_empty() {
        return Err(HomError::NoConjugation(y.to_string()));
    }
    if let Some(g) = normal.generators.iter().find(|g| !images.contains_key(g)) {
        return Err(HomError::IncompleteConjugation(y.to_string(), g.to_string()));
    }
    Assignment::new(normal.clone(), normal, images)
}

/// `y^k x y^-k` with `x = base` and `y x y^-1 = shifted`, in closed form:
/// `<shifted^-1, base^-1>_{k-1} <shifted, base>_k` for odd `k` and
/// `<shifted^-1, base^-1>_{k-1} <base, shifted>_k` for even `k >= 1`.
pub fn closed_form_conjugation(k: usize, shifted: &GeneratorId, base: &GeneratorId) -> Word {
    if k == 0 {
        return gen(base.clone());
    }
    let (s, b) = (gen(shifted.clone()), gen(base.clone()));
    let left = alternating_word(&s.inverse(), &b.inverse(), k - 1);
    let right = if k % 2 == 1 { alternating_word(&s, &b, k) } else { alternating_word(&b, &s, k) };
    left.concat(&right)
}

/// A word written as `normal * y1^q1 * y2^q2 ...` over the torsion
/// generators of a semidirect presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemidirectForm {
    pub normal_part: Word,
    pub quotient: Vec<(GeneratorId, u32)>,
}

impl SemidirectForm {
    pub fn quotient_is_trivial(&self) -> bool {
        self.quotient.iter().all(|(_, q)| *q == 0)
    }

    /// `normal * y1^q1 * ...` as a single word.
    pub fn to_word(&self) -> Word {
        let mut w = self.normal_part.clone();
        for (y, q) in &self.quotient {
            w = w.concat(&gen(y.clone()).pow(*q as i64));
        }
        w
    }
}

impl std::fmt::Display for SemidirectForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let q: Vec<String> = self.quotient.iter().map(|(y, q)| format!("{y}={q}")).collect();
        write!(f, "{} | {}", self.normal_part, q.join(","))
    }
}

/// Moves every torsion letter of `w` to the right:
/// `w = N * y1^q1 * y2^q2 ...` with `N` in the normal generators.
pub struct NormalFormer {
    torsion: Vec<(GeneratorId, u32, Assignment)>,
    cache: BTreeMap<(GeneratorId, Vec<u32>), Word>,
}

impl NormalFormer {
    pub fn new(p: &Presentation) -> Result<NormalFormer, HomError> {
        let mut torsion = Vec::new();
        for y in p.torsion_generators() {
            let m = p.torsion_order(&y).ok_or_else(|| HomError::NoConjugation(y.to_string()))?;
            torsion.push((y.clone(), m, conjugation_automorphism(p, &y)?));
        }
        Ok(NormalFormer { torsion, cache: BTreeMap::new() })
    }

    /// `Y x Y^-1` for `Y = y1^q1 y2^q2 ...`: apply the innermost factor first.
    fn conjugate(&mut self, x: &GeneratorId, q: &[u32]) -> Word {
        let key = (x.clone(), q.to_vec());
        if let Some(w) = self.cache.get(&key) {
            return w.clone();
        }
        let mut w = gen(x.clone());
        for (i, (_, _, phi)) in self.torsion.iter().enumerate().rev() {
            for _ in 0..q[i] {
                w = phi.apply(&w);
            }
        }
        self.cache.insert(key, w.clone());
        w
    }

    pub fn normal_form(&mut self, w: &Word) -> SemidirectForm {
        let mut q = vec![0u32; self.torsion.len()];
        let mut normal = Vec::new();
        for l in w.letters() {
            if let Some(i) = self.torsion.iter().position(|(y, _, _)| *y == l.gen) {
                let m = self.torsion[i].1;
                q[i] = if l.inv { (q[i] + m - 1) % m } else { (q[i] + 1) % m };
            } else {
                let img = self.conjugate(&l.gen, &q);
                normal.push(if l.inv { img.inverse() } else { img });
            }
        }
        SemidirectForm {
            normal_part: crate::words::product(normal.iter()),
            quotient: self.torsion.iter().zip(q).map(|((y, _, _), e)| (y.clone(), e)).collect(),
        }
    }
}

/// One-shot [`NormalFormer::normal_form`].
pub fn semidirect_normal_form(p: &Presentation, w: &Word) -> Result<SemidirectForm, HomError> {
    Ok(NormalFormer::new(p)?.normal_form(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn two_cone_round_trip_is_free() {
        let (phi, psi) = two_cone_assignments(3, 3, 2).unwrap();
        let back = phi.then(&psi);
        for g in &phi.source.generators {
            assert_eq!(back.images[g], Word::gen(g.clone()), "{g}");
        }
        assert_eq!(phi.obligations("x").len(), phi.source.relations.len());
    }

    #[test]
    fn conjugation_images() {
        let p = two_cone_semidirect(3, 3, 3).unwrap();
        let phi_u = conjugation_automorphism(&p, &GeneratorId::U(1)).unwrap();
        assert_eq!(phi_u.apply(&w("h1")), w("hu1"));
        assert_eq!(phi_u.apply(&w("hu1")), w("hu1^-1*h1*hu1"));
        assert_eq!(phi_u.apply(&w("hu'2")), w("hu'2"));
        let phi_up = conjugation_automorphism(&p, &GeneratorId::UPrime).unwrap();
        assert_eq!(phi_up.apply(&w("h2")), w("hu'2"));
        assert!(conjugation_automorphism(&p, &GeneratorId::H(1)).is_err());
    }

    #[test]
    fn closed_form_small_cases() {
        let (s, b) = (GeneratorId::HConj(Conj::U, 1), GeneratorId::H(1));
        assert_eq!(closed_form_conjugation(1, &s, &b), w("hu1"));
        assert_eq!(closed_form_conjugation(2, &s, &b), w("hu1^-1*h1*hu1"));
        assert_eq!(closed_form_conjugation(3, &s, &b), w("hu1^-1*h1^-1*hu1*h1*hu1"));
    }

    #[test]
    fn normal_form_moves_torsion_right() {
        let p = one_cone_semidirect(3, 3).unwrap();
        let nf = semidirect_normal_form(&p, &w("u*h1")).unwrap();
        assert_eq!(nf.normal_part, w("hu1"));
        assert_eq!(nf.quotient, vec![(GeneratorId::U(1), 1)]);
        assert_eq!(nf.to_string(), "hu1 | u=1");
        let nf = semidirect_normal_form(&p, &w("u^-1*h2*u")).unwrap();
        assert_eq!(nf.normal_part, w("h2"));
        assert!(nf.quotient_is_trivial());
    }
}
