//! The element `θ_n = γ_n ... γ_1` of the orbifold braid group with one
//! cone point, where `γ_j = h_{j-1}..h_1 u h_1..h_{j-1}`, together with the
//! counting maps used to show it is central, of infinite order, and which
//! of its powers lie in the braid-like normal subgroup.

use serde::Serialize;
use thiserror::Error;

use crate::homomorphisms::{one_cone_assignments, semidirect_normal_form, HomError};
use crate::presentations::{h, h_asc, h_desc};
use crate::quotients::{WreathAssignment, WreathShape};
use crate::words::{product, Conj, GeneratorId, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CenterError {
    #[error("index {j} out of range 1..={n}")]
    BadIndex { j: usize, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Hom(#[from] HomError),
}

fn u() -> Word {
    Word::gen(GeneratorId::U(1))
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralWitness {
    pub n: usize,
    pub m: u32,
    pub theta: Word,
    pub gamma: Vec<Word>,
}

impl CentralWitness {
    pub fn new(n: usize, m: u32) -> Result<CentralWitness, CenterError> {
        if n < 1 || m < 2 {
            return Err(CenterError::InvalidParameters(format!("n={n}, m={m}")));
        }
        let gamma = (1..=n).map(|j| gamma(j, n)).collect::<Result<Vec<_>, _>>()?;
        Ok(CentralWitness { n, m, theta: theta(n), gamma })
    }
}

pub fn gamma(j: usize, n: usize) -> Result<Word, CenterError> {
    if j < 1 || j > n {
        return Err(CenterError::BadIndex { j, n });
    }
    Ok(h_desc(j - 1, 1).concat(&u()).concat(&h_asc(1, j - 1)))
}

pub fn theta(n: usize) -> Word {
    let gs: Vec<Word> = (1..=n).rev().map(|j| gamma(j, n).unwrap()).collect();
    product(gs.iter())
}

/// `a(j,j-1) ... a(j,1) c(j,1)`.
pub fn gamma_pure(j: usize) -> Result<Word, CenterError> {
    if j < 1 {
        return Err(CenterError::BadIndex { j, n: 0 });
    }
    let mut ws: Vec<Word> = (1..j).rev().map(|i| Word::gen(GeneratorId::A(j as u16, i as u16))).collect();
    ws.push(Word::gen(GeneratorId::C(j as u16, 1)));
    Ok(product(ws.iter()))
}

pub fn theta_pure(n: usize) -> Word {
    let gs: Vec<Word> = (1..=n).rev().map(|j| gamma_pure(j).unwrap()).collect();
    product(gs.iter())
}

/// Rewrites pure generators into half twists and loops; other letters are
/// kept.
pub fn expand_pure(w: &Word) -> Word {
    w.substitute(|g| crate::presentations::expand_pure_generator(g).unwrap_or_else(|| Word::gen(g.clone())))
}

/// Signed number of `a(j,1)` letters.
pub fn pure_degree(w: &Word) -> i64 {
    w.letters().iter().filter(|l| matches!(l.gen, GeneratorId::A(j, 1) if j >= 2)).map(|l| l.sign()).sum()
}

/// Exponent sum of `u` modulo `m`.
pub fn u_exponent(w: &Word, m: u32) -> i64 {
    w.exponent_sum(&GeneratorId::U(1)).rem_euclid(m as i64)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Smallest `l > 0` with `m | l n`.
pub fn minimal_power(n: usize, m: u32) -> u64 {
    m as u64 / gcd(m as u64, n as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    pub l: u64,
    pub quotient_exponent: i64,
}

/// Whether `θ_n^k` lies in the normal subgroup, decided by divisibility
/// and reported with the `u`-exponent of `θ_n^k`.
pub fn theta_power_membership(n: usize, m: u32, k: u64) -> Result<Membership, CenterError> {
    if n < 2 || m < 2 {
        return Err(CenterError::InvalidParameters(format!("need n >= 2 and m >= 2, got n={n}, m={m}")));
    }
    let l = minimal_power(n, m);
    Ok(Membership { member: k.is_multiple_of(l), l, quotient_exponent: (k as i64 * n as i64).rem_euclid(m as i64) })
}

/// Membership read off the semidirect normal form of `θ_n^k`: the quotient
/// part must vanish.
pub fn membership_by_normal_form(n: usize, m: u32, k: u64) -> Result<bool, CenterError> {
    let (phi, _) = one_cone_assignments(n, m)?;
    let w = phi.apply(&theta(n).pow(k as i64));
    Ok(semidirect_normal_form(&phi.target, &w)?.quotient_is_trivial())
}

/// `((h1 x)(h2 h1 x h2) ... (h_{n-1}..h1 x h2..h_{n-1}))^l` with `x` the
/// conjugate `u h1 u^-1`, spelled either with `u` or with its own letter.
pub fn normal_theta_word(n: usize, l: u64, conjugate_letter: bool) -> Word {
    let x = if conjugate_letter { Word::gen(GeneratorId::HConj(Conj::U, 1)) } else { u().conjugate(&h(1)) };
    let factors: Vec<Word> = (2..=n).map(|j| h_desc(j - 1, 1).concat(&x).concat(&h_asc(2, j - 1))).collect();
    product(factors.iter()).pow(l as i64)
}

/// Whether the image of `θ_n` commutes with every generator image in
/// `Z_m ≀ S_n`.
pub fn wreath_central(n: usize, m: u32) -> bool {
    let shape = WreathShape::new(n, vec![m], 0);
    let mut a = WreathAssignment::from_shape(shape.clone());
    for j in 1..n {
        a = a.with_image(GeneratorId::H(j as u16), shape.transposition(j));
    }
    a = a.with_image(GeneratorId::U(1), shape.unit(0, 0));
    let t = a.eval(&theta(n)).unwrap();
    (1..n).map(|j| GeneratorId::H(j as u16)).chain([GeneratorId::U(1)]).all(|g| {
        let x = a.image(&g).unwrap();
        shape.mul(&t, x) == shape.mul(x, &t)
    })
}
