//! Strategies and checks shared by the property suites and the acceptance
//! harness.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use orbibraid::center::u_exponent;
use orbibraid::homomorphisms::{
    one_cone_assignments, punctured_assignments, two_cone_assignments, Assignment, NormalFormer,
};
use orbibraid::presentations::{
    one_cone_semidirect, orbifold_braid, punctured_semidirect, two_cone_semidirect, two_cone_semidirect_n3,
    Presentation,
};
use orbibraid::prover::{prove, replay, Budget};
use orbibraid::quotients::WreathAssignment;
use orbibraid::words::{alternating_word, GeneratorId, Letter, Word};

pub fn letter(gens: Vec<GeneratorId>) -> impl Strategy<Value = Letter> {
    (proptest::sample::select(gens), any::<bool>()).prop_map(|(g, inv)| Letter::new(g, inv))
}

pub fn raw(gens: Vec<GeneratorId>, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    proptest::collection::vec(letter(gens), 0..=max_len)
}

pub fn word(gens: Vec<GeneratorId>, max_len: usize) -> impl Strategy<Value = Word> {
    raw(gens, max_len).prop_map(Word::from_letters)
}

fn small_alphabet() -> Vec<GeneratorId> {
    vec![GeneratorId::H(1), GeneratorId::H(2), GeneratorId::U(1), GeneratorId::T(1)]
}

pub fn word_triple() -> impl Strategy<Value = (Vec<Letter>, Word, Word, usize)> {
    (raw(small_alphabet(), 24), word(small_alphabet(), 12), word(small_alphabet(), 12), 0usize..10)
}

pub fn check_word_laws((r, a, b, k): (Vec<Letter>, Word, Word, usize)) -> Result<(), TestCaseError> {
    let w = Word::from_letters(r.clone());
    prop_assert_eq!(Word::from_letters(w.letters().to_vec()), w.clone());
    prop_assert!(w.letters().windows(2).all(|p| p[0] != p[1].inverse()));
    let c = Word::from_letters(r);
    prop_assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
    prop_assert_eq!(Word::identity().concat(&a), a.clone());
    prop_assert_eq!(a.concat(&Word::identity()), a.clone());
    prop_assert_eq!(a.concat(&b).inverse(), b.inverse().concat(&a.inverse()));
    prop_assert!(a.concat(&a.inverse()).is_empty());
    prop_assert_eq!(Word::parse(&a.to_string()).unwrap(), a.clone());
    let (x, y) = (Word::gen(GeneratorId::H(1)), Word::gen(GeneratorId::U(1)));
    let next = if k % 2 == 0 { &x } else { &y };
    prop_assert_eq!(alternating_word(&x, &y, k + 1), alternating_word(&x, &y, k).concat(next));
    Ok(())
}

pub fn assignment_pairs() -> Vec<Assignment> {
    let mut out = Vec::new();
    for (phi, psi) in [
        two_cone_assignments(3, 3, 2).unwrap(),
        two_cone_assignments(4, 2, 3).unwrap(),
        one_cone_assignments(3, 4).unwrap(),
        punctured_assignments(3, 3).unwrap(),
    ] {
        out.push(phi);
        out.push(psi);
    }
    out
}

/// An index into [`assignment_pairs`] and two words over that source.
pub fn assignment_case() -> impl Strategy<Value = (usize, Word, Word)> {
    let n = assignment_pairs().len();
    (0..n).prop_flat_map(|i| {
        let gens = assignment_pairs()[i].source.generators.clone();
        (Just(i), word(gens.clone(), 16), word(gens, 16))
    })
}

pub fn check_assignment_laws(pairs: &[Assignment], (i, v, w): (usize, Word, Word)) -> Result<(), TestCaseError> {
    let a = &pairs[i];
    prop_assert_eq!(a.apply(&v.concat(&w)), a.apply(&v).concat(&a.apply(&w)));
    prop_assert_eq!(a.apply(&w.inverse()), a.apply(&w).inverse());
    prop_assert!(a.apply(&Word::identity()).is_empty());
    let partner = &pairs[i ^ 1];
    prop_assert_eq!(a.then(partner).apply(&w), partner.apply(&a.apply(&w)));
    Ok(())
}

pub fn semidirect_presentations() -> Vec<Presentation> {
    vec![
        one_cone_semidirect(3, 3).unwrap(),
        one_cone_semidirect(4, 2).unwrap(),
        two_cone_semidirect(4, 3, 2).unwrap(),
        two_cone_semidirect_n3(3, 2).unwrap(),
        punctured_semidirect(3, 3).unwrap(),
    ]
}

pub fn normal_form_case() -> impl Strategy<Value = (usize, Word)> {
    let n = semidirect_presentations().len();
    (0..n).prop_flat_map(|i| (Just(i), word(semidirect_presentations()[i].generators.clone(), 20)))
}

pub struct NormalFormFixture {
    pub presentations: Vec<Presentation>,
    pub quotients: Vec<WreathAssignment>,
}

impl NormalFormFixture {
    pub fn new() -> Self {
        let presentations = semidirect_presentations();
        let quotients = presentations.iter().map(|p| WreathAssignment::for_presentation(p, true).unwrap()).collect();
        NormalFormFixture { presentations, quotients }
    }
}

pub fn check_normal_form(fx: &NormalFormFixture, (i, w): (usize, Word)) -> Result<(), TestCaseError> {
    let p = &fx.presentations[i];
    let q = &fx.quotients[i];
    let nf = NormalFormer::new(p).unwrap().normal_form(&w);
    prop_assert!(nf.normal_part.generators().all(|g| !g.is_torsion_quotient()));
    prop_assert_eq!(q.eval(&w).unwrap(), q.eval(&nf.to_word()).unwrap());
    for (y, e) in &nf.quotient {
        let m = p.torsion_order(y).unwrap();
        prop_assert!(*e < m);
        prop_assert_eq!(*e as i64, w.exponent_sum(y).rem_euclid(m as i64));
    }
    if p.contains(&GeneratorId::U(1)) {
        let m = p.torsion_order(&GeneratorId::U(1)).unwrap();
        prop_assert_eq!(nf.quotient[0].1 as i64, u_exponent(&w, m));
    }
    Ok(())
}

/// Random equations obtained by rewriting a random word with one relation.
pub fn rewrite_case() -> impl Strategy<Value = (Word, usize, usize, bool)> {
    let p = orbifold_braid(3, 0, &[3]).unwrap();
    let rels = p.relations.len();
    (word(p.generators.clone(), 6), 0..rels, 0usize..7, any::<bool>())
}

pub fn check_prover_replay(
    p: &Presentation,
    (w, rel, pos, flip): (Word, usize, usize, bool),
) -> Result<(), TestCaseError> {
    let r = &p.relations[rel];
    let (from, to) = if flip { (&r.rhs, &r.lhs) } else { (&r.lhs, &r.rhs) };
    let pos = pos.min(w.len());
    let (pre, post) = w.letters().split_at(pos);
    let pre = Word::from_letters(pre.to_vec());
    let post = Word::from_letters(post.to_vec());
    let a = pre.concat(from).concat(&post);
    let b = pre.concat(to).concat(&post);
    let res = prove(p, &a, &b, &Budget::with_nodes(20_000)).unwrap();
    if res.is_proved() {
        prop_assert!(replay(p, &a, &b, &res.chain).is_ok());
        let back = res.reversed();
        prop_assert!(replay(p, &b, &a, &back.chain).is_ok());
    }
    Ok(())
}
