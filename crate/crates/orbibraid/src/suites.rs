//! Named batches of checks and their JSON reports.
//!
//! A suite is a list of tasks: equations to prove in some presentation,
//! exact comparisons computed up front, or group orders to enumerate.
//! Tasks run on the rayon pool and the report keeps task order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::center::{
    expand_pure, gamma, gamma_pure, membership_by_normal_form, normal_theta_word, pure_degree, theta,
    theta_power_membership, theta_pure, u_exponent, wreath_central, CenterError,
};
use crate::coset_enum::{enumerate_cosets, CosetResult, DEFAULT_MAX_COSETS};
use crate::homomorphisms::{
    closed_form_conjugation, conjugation_automorphism, last_strand_loop, one_cone_assignments, punctured_assignments,
    two_cone_assignments, Assignment, HomError,
};
use crate::presentations::{
    coxeterize, h, one_cone_semidirect, orbifold_braid, two_cone_semidirect, Presentation, PresentationError,
    SquareFilter,
};
use crate::prover::{prove_plan, replay, shortening_conjugator, Budget, Plan, ProofStatus, ProverError};
use crate::quotients::{enumerate_monomial, QuotientError};
use crate::words::{alternating_word, Conj, GeneratorId, Word};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite {0}")]
    UnknownSuite(String),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Hom(#[from] HomError),
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error(transparent)]
    Center(#[from] CenterError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteName {
    Lemma31,
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
    Table6,
    Thm33Steps,
    Thm37Steps,
    Center,
    Orders,
}

impl SuiteName {
    pub const ALL: [SuiteName; 11] = [
        SuiteName::Lemma31,
        SuiteName::Table1,
        SuiteName::Table2,
        SuiteName::Table3,
        SuiteName::Table4,
        SuiteName::Table5,
        SuiteName::Table6,
        SuiteName::Thm33Steps,
        SuiteName::Thm37Steps,
        SuiteName::Center,
        SuiteName::Orders,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Lemma31 => "lemma31",
            SuiteName::Table1 => "table1",
            SuiteName::Table2 => "table2",
            SuiteName::Table3 => "table3",
            SuiteName::Table4 => "table4",
            SuiteName::Table5 => "table5",
            SuiteName::Table6 => "table6",
            SuiteName::Thm33Steps => "thm33_steps",
            SuiteName::Thm37Steps => "thm37_steps",
            SuiteName::Center => "center",
            SuiteName::Orders => "orders",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SuiteName::ALL.iter().copied().find(|x| x.as_str() == s).ok_or_else(|| SuiteError::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteParams {
    pub n: usize,
    pub m: u32,
    pub m2: u32,
    #[serde(rename = "L")]
    pub punctures: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { n: 3, m: 2, m2: 2, punctures: 0 }
    }
}

impl SuiteParams {
    pub fn new(n: usize, m: u32, m2: u32) -> SuiteParams {
        SuiteParams { n, m, m2, punctures: 0 }
    }
}

pub enum Check {
    Prove { presentation: Arc<Presentation>, lhs: Word, rhs: Word, plan: Plan },
    Exact(bool),
    Order { presentation: Presentation, expected: usize },
}

pub struct Task {
    pub tag: String,
    pub check: Check,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Proved,
    Unknown,
    Equal,
    Mismatch,
    Overflow,
    /// A proof whose chain failed independent replay.
    Invalid,
}

impl EntryStatus {
    pub fn passed(&self) -> bool {
        matches!(self, EntryStatus::Proved | EntryStatus::Equal)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub tag: String,
    pub status: EntryStatus,
    pub nodes: usize,
    pub chain_len: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub params: SuiteParams,
    pub convention: BTreeMap<&'static str, &'static str>,
    pub entries: Vec<Entry>,
    pub pass: bool,
    pub version: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Failure,
    UnknownOnly,
    Overflow,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Failure => 1,
            Outcome::UnknownOnly => 2,
            Outcome::Overflow => 3,
        }
    }
}

impl Report {
    pub fn outcome(&self) -> Outcome {
        let has = |s: EntryStatus| self.entries.iter().any(|e| e.status == s);
        if has(EntryStatus::Mismatch) || has(EntryStatus::Invalid) {
            Outcome::Failure
        } else if has(EntryStatus::Overflow) {
            Outcome::Overflow
        } else if has(EntryStatus::Unknown) {
            Outcome::UnknownOnly
        } else {
            Outcome::Pass
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| !e.status.passed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn conventions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("conjugation", "conj(w, x) = w x w^-1"),
        ("dihedral", "<a,b>_k = a b a ... with k letters"),
        ("monomial_product", "(s,a)(t,b) = (st, c) with c_j = b_j + a_t(j)"),
        ("proof_chain", "each step applies one cyclic piece of a relator or its inverse"),
        ("words", "freely reduced, shortlex ordered, generators before inverses"),
    ])
}

fn u1() -> Word {
    Word::gen(GeneratorId::U(1))
}

fn commutes(a: &Word, b: &Word) -> (Word, Word) {
    (a.concat(b), b.concat(a))
}

fn dihedral(a: &Word, b: &Word, k: usize) -> (Word, Word) {
    (alternating_word(a, b, k), alternating_word(b, a, k))
}

/// `(a x b)^2 = (b a x)^2`.
fn square(a: &Word, x: &Word, b: &Word) -> (Word, Word) {
    (a.concat(x).concat(b).pow(2), b.concat(a).concat(x).pow(2))
}

/// Statements proved once on few strands and mapped onto the last strands
/// of a presentation with cone points. Search handles the first strand
/// directly but stalls on the long conjugated loops of the last strand.
struct Lemma {
    source: Presentation,
    lhs: Word,
    rhs: Word,
    images: BTreeMap<GeneratorId, Word>,
}

fn lemma_library(target: &Presentation) -> Vec<Lemma> {
    let (Some(n), Some(cones)) = (target.param("n"), target.param("N")) else {
        return Vec::new();
    };
    let n = n as usize;
    let mut out = Vec::new();
    for v in 1..=cones as usize {
        let cone = GeneratorId::U(v as u16);
        let Some(m) = target.param(&format!("m{v}")) else { continue };
        if !target.contains(&cone) || n < 2 || (n == 2 && v == 1) {
            continue;
        }
        let c = last_strand_loop(n, cone);
        let x = u1().conjugate(&h(1));
        if let Ok(src) = orbifold_braid(2, 0, &[m as u32]) {
            let (lhs, rhs) = dihedral(&h(1), &x, m as usize);
            let images = BTreeMap::from([(GeneratorId::H(1), h(n - 1)), (GeneratorId::U(1), c.clone())]);
            out.push(Lemma { source: src, lhs, rhs, images });
        }
        if n >= 3 {
            if let Ok(src) = orbifold_braid(3, 0, &[m as u32]) {
                let (lhs, rhs) = square(&h(1), &x, &h(2));
                let images = BTreeMap::from([
                    (GeneratorId::H(1), h(n - 1)),
                    (GeneratorId::H(2), h(n - 2)),
                    (GeneratorId::U(1), c.clone()),
                ]);
                out.push(Lemma { source: src, lhs, rhs, images });
            }
        }
    }
    out
}

/// Search, or a mapped small-strand proof when the equation is the image
/// of a library statement.
pub fn plan_for(target: &Presentation, lhs: &Word, rhs: &Word) -> Plan {
    for lemma in lemma_library(target) {
        let map = |w: &Word| w.substitute(|g| lemma.images[g].clone());
        let (a, b) = (map(&lemma.lhs), map(&lemma.rhs));
        let keep: Vec<GeneratorId> = target
            .generators
            .iter()
            .filter(|g| lemma.images.values().any(|w| w.generators().any(|x| x == *g)))
            .cloned()
            .collect();
        if (&a, &b) == (lhs, rhs) {
            return Plan::Within(keep, Box::new(Plan::via(lemma.source, lemma.lhs, lemma.rhs, lemma.images)));
        }
        if (&a, &b) == (rhs, lhs) {
            return Plan::Within(keep, Box::new(Plan::via(lemma.source, lemma.rhs, lemma.lhs, lemma.images)));
        }
    }
    match shortening_conjugator(lhs, rhs, 4) {
        Some(k) => Plan::FirstOf(vec![Plan::Search, Plan::Conjugate(k, Box::new(Plan::Search))]),
        None => Plan::Search,
    }
}

/// The target with the loop of cone `v` around the last strand as a letter
/// of its own, the cone generator dropped, and the last-strand relations
/// among that letter, the half twists and `extras` added. Returns the
/// presentation and the images of its letters in `target`.
fn loop_letter_source(
    target: &Presentation,
    v: usize,
    extras: &[Word],
) -> Result<(Presentation, BTreeMap<GeneratorId, Word>), SuiteError> {
    let n = target.param("n").unwrap_or(0) as usize;
    let order = target.param(&format!("m{v}")).unwrap_or(0) as usize;
    need(n >= 3 && order >= 2, "loop letters need n >= 3 and a cone point")?;
    let cone = GeneratorId::U(v as u16);
    let letter = GeneratorId::C(n as u16, v as u16);
    let mut s = target.restrict(&format!("{}+{letter}", target.name), |g| *g != cone);
    s.generators.push(letter.clone());
    let c = Word::gen(letter.clone());
    let y = c.conjugate(&h(n - 1));
    let mut add = |(l, r): (Word, Word), tag: &str| s.add(l, r, tag);
    add((c.pow(order as i64), Word::identity()), "loop/order")?;
    for j in 1..=n - 2 {
        add(commutes(&h(j), &c), &format!("loop/commute-h{j}"))?;
    }
    add(commutes(&h(n - 1).concat(&c).concat(&h(n - 1)), &c), "loop/commute-twisted")?;
    for (i, x) in extras.iter().enumerate() {
        add(commutes(x, &c), &format!("loop/commute-extra{i}"))?;
    }
    add(dihedral(&h(n - 1), &y, order), "loop/dihedral")?;
    add(square(&h(n - 1), &y, &h(n - 2)), "loop/square")?;
    let mut images: BTreeMap<GeneratorId, Word> =
        s.generators.iter().map(|g| (g.clone(), Word::gen(g.clone()))).collect();
    images.insert(letter, last_strand_loop(n, cone));
    Ok((s, images))
}

/// Obligations of `a` proved through [`loop_letter_source`]: every image
/// spelled with the expanded loop is respelled with the letter, the
/// obligation is proved over the letters, and the letter relations are
/// proved in the target.
fn loop_letter_tasks(a: &Assignment, v: usize, extras: &[Word], prefix: &str) -> Result<Vec<Task>, SuiteError> {
    let target = Arc::new(a.target.clone());
    let n = a.target.param("n").unwrap_or(0) as usize;
    let (s, images) = loop_letter_source(&a.target, v, extras)?;
    let expanded = last_strand_loop(n, GeneratorId::U(v as u16));
    let letter = Word::gen(GeneratorId::C(n as u16, v as u16));
    let folded: BTreeMap<GeneratorId, Word> = a
        .images
        .iter()
        .map(|(g, w)| {
            let w = if *w == expanded {
                letter.clone()
            } else if *w == expanded.conjugate(&h(n - 1)) {
                letter.conjugate(&h(n - 1))
            } else {
                w.clone()
            };
            (g.clone(), w)
        })
        .collect();
    let over_letters = Assignment::new(a.source.clone(), s.clone(), folded)?;
    let relation_plans: Vec<Plan> = s
        .relations
        .iter()
        .map(|r| {
            let map = |w: &Word| w.substitute(|g| images[g].clone());
            plan_for(&a.target, &map(&r.lhs), &map(&r.rhs))
        })
        .collect();
    Ok(over_letters
        .obligations(prefix)
        .into_iter()
        .zip(a.obligations(prefix))
        .map(|(o, plain)| {
            let plan = Plan::Via {
                source: s.clone(),
                lhs: o.lhs,
                rhs: o.rhs,
                images: images.clone(),
                inner: Box::new(Plan::Search),
                relation_plans: relation_plans.clone(),
            };
            Task {
                tag: plain.tag,
                check: Check::Prove { presentation: target.clone(), lhs: plain.lhs, rhs: plain.rhs, plan },
            }
        })
        .collect())
}

fn prove_task(tag: impl Into<String>, p: &Arc<Presentation>, (lhs, rhs): (Word, Word)) -> Task {
    let plan = plan_for(p, &lhs, &rhs);
    Task { tag: tag.into(), check: Check::Prove { presentation: p.clone(), lhs, rhs, plan } }
}

fn exact(tag: impl Into<String>, ok: bool) -> Task {
    Task { tag: tag.into(), check: Check::Exact(ok) }
}

fn obligation_tasks(a: &Assignment, prefix: &str) -> Vec<Task> {
    let target = Arc::new(a.target.clone());
    a.obligations(prefix).into_iter().map(|o| prove_task(o.tag, &target, (o.lhs, o.rhs))).collect()
}

/// The images of the normal relations under conjugation by `y`, proved in
/// the normal part.
fn conjugation_tasks(semi: &Presentation, y: &GeneratorId, prefix: &str) -> Result<Vec<Task>, SuiteError> {
    let phi = conjugation_automorphism(semi, y)?;
    Ok(obligation_tasks(&phi, prefix))
}

/// `phi_y^ord(g) = g` for every normal generator.
fn power_tasks(semi: &Presentation, y: &GeneratorId, prefix: &str) -> Result<Vec<Task>, SuiteError> {
    let phi = conjugation_automorphism(semi, y)?;
    let order = semi.torsion_order(y).ok_or_else(|| SuiteError::Unsupported(format!("{y} has no order relation")))?;
    let pw = phi.power(order as usize);
    let normal = Arc::new(phi.target.clone());
    Ok(phi
        .source
        .generators
        .iter()
        .map(|g| prove_task(format!("{prefix}/{g}"), &normal, (pw.apply(&Word::gen(g.clone())), Word::gen(g.clone()))))
        .collect())
}

/// `psi(phi(g)) = g` exactly on the mixed generators and `phi(psi(g)) = g`
/// modulo the semidirect relations.
fn inverse_tasks(phi: &Assignment, psi: &Assignment, prefix: &str) -> Vec<Task> {
    let mut out = Vec::new();
    let back = phi.then(psi);
    for g in &phi.source.generators {
        let x = Word::gen(g.clone());
        out.push(exact(format!("{prefix}/psi-phi/{g}"), back.apply(&x) == x));
    }
    let there = psi.then(phi);
    let target = Arc::new(phi.target.clone());
    for g in &psi.source.generators {
        let x = Word::gen(g.clone());
        out.push(prove_task(format!("{prefix}/phi-psi/{g}"), &target, (there.apply(&x), x)));
    }
    out
}

fn need(cond: bool, msg: &str) -> Result<(), SuiteError> {
    if cond {
        Ok(())
    } else {
        Err(SuiteError::Unsupported(msg.to_string()))
    }
}

fn lemma31_tasks(sp: &SuiteParams) -> Result<Vec<Task>, SuiteError> {
    let (n, m, m2) = (sp.n, sp.m, sp.m2);
    need(n >= 3, "last-strand relations need n >= 3")?;
    let p = Arc::new(orbifold_braid(n, 0, &[m, m2])?);
    let pt = Arc::new(orbifold_braid(n, 1, &[m])?);
    let x = u1().conjugate(&h(1));
    let c = [last_strand_loop(n, GeneratorId::U(1)), last_strand_loop(n, GeneratorId::U(2))];
    let orders = [m as usize, m2 as usize];
    let mut t = vec![
        prove_task("dihedral/first-strand", &p, dihedral(&h(1), &x, m as usize)),
        prove_task("square/first-strand", &p, square(&h(1), &x, &h(2))),
    ];
    for v in 0..2 {
        let y = c[v].conjugate(&h(n - 1));
        t.push(prove_task(format!("dihedral/last-strand/cone{}", v + 1), &p, dihedral(&h(n - 1), &y, orders[v])));
        t.push(prove_task(format!("square/last-strand/cone{}", v + 1), &p, square(&h(n - 1), &y, &h(n - 2))));
        t.push(prove_task(
            format!("order/last-strand/cone{}", v + 1),
            &p,
            (c[v].pow(orders[v] as i64), Word::identity()),
        ));
        for j in 1..=n - 2 {
            t.push(prove_task(format!("commute/h{j}-last-strand/cone{}", v + 1), &p, commutes(&h(j), &c[v])));
        }
        let twisted = h(n - 1).concat(&c[v]).concat(&h(n - 1));
        t.push(prove_task(format!("commute/twisted-last-strand/cone{}", v + 1), &p, commutes(&twisted, &c[v])));
    }
    t.push(prove_task("commute/cone1-last-strand-cone2", &p, commutes(&u1(), &c[1])));
    let tl = Word::gen(GeneratorId::T(1));
    t.push(prove_task("commute/puncture-last-strand-cone1", &pt, commutes(&tl, &c[0])));
    Ok(t)
}

fn thm33_tasks(sp: &SuiteParams) -> Result<Vec<Task>, SuiteError> {
    let (n, m, m2) = (sp.n, sp.m, sp.m2);
    let semi = two_cone_semidirect(n, m, m2)?;
    let (u, up) = (GeneratorId::U(1), GeneratorId::UPrime);
    let mut t = power_tasks(&semi, &u, "power/u")?;
    t.extend(power_tasks(&semi, &up, "power/u'")?);
    let (fu, fup) = (conjugation_automorphism(&semi, &u)?, conjugation_automorphism(&semi, &up)?);
    t.push(exact("composites-agree", fu.then(&fup).images == fup.then(&fu).images));
    t.extend(conjugation_tasks(&semi, &u, "automorphism/u")?);
    t.extend(conjugation_tasks(&semi, &up, "automorphism/u'")?);
    let normal = Arc::new(semi.normal_part());
    let hu1 = GeneratorId::HConj(Conj::U, 1);
    for k in 1..=2 * m as usize {
        let iterated = fu.power(k).apply(&h(1));
        t.push(prove_task(
            format!("closed-form/k{k}"),
            &normal,
            (closed_form_conjugation(k, &hu1, &GeneratorId::H(1)), iterated),
        ));
    }
    let (phi, psi) = two_cone_assignments(n, m, m2)?;
    t.extend(inverse_tasks(&phi, &psi, "inverse"));
    let one = one_cone_semidirect(n, m)?;
    t.extend(power_tasks(&one, &u, "one-cone/power/u")?);
    t.extend(conjugation_tasks(&one, &u, "one-cone/automorphism/u")?);
    let (phi1, psi1) = one_cone_assignments(n, m)?;
    t.extend(obligation_tasks(&psi1, "one-cone/psi"));
    t.extend(obligation_tasks(&phi1, "one-cone/phi"));
    t.extend(inverse_tasks(&phi1, &psi1, "one-cone/inverse"));
    Ok(t)
}

fn thm37_tasks(sp: &SuiteParams) -> Result<Vec<Task>, SuiteError> {
    need(sp.n >= 3, "the punctured semidirect presentation needs n >= 3")?;
    let (phi, psi) = punctured_assignments(sp.n, sp.m)?;
    let ub = GeneratorId::UBar;
    let mut t = power_tasks(&phi.target, &ub, "power/ubar")?;
    t.extend(conjugation_tasks(&phi.target, &ub, "automorphism/ubar")?);
    t.extend(inverse_tasks(&phi, &psi, "inverse"));
    Ok(t)
}

fn center_tasks(sp: &SuiteParams) -> Result<Vec<Task>, SuiteError> {
    let (n, m) = (sp.n, sp.m);
    need(n >= 2, "center checks need n >= 2")?;
    let p = Arc::new(orbifold_braid(n, 0, &[m])?);
    let th = theta(n);
    let mut t = Vec::new();
    for j in 1..=8 {
        t.push(exact(format!("gamma-pure/j{j}"), expand_pure(&gamma_pure(j)?) == gamma(j, j)?));
    }
    for j in 1..n {
        t.push(prove_task(format!("central/h{j}"), &p, commutes(&h(j), &th)));
    }
    t.push(prove_task("central/u", &p, commutes(&u1(), &th)));
    t.push(exact("wreath-central", wreath_central(n, m)));
    for k in 1..=6u64 {
        let e = u_exponent(&th.pow(k as i64), m);
        t.push(exact(format!("u-exponent/k{k}"), e == (k as i64 * n as i64).rem_euclid(m as i64)));
    }
    t.push(exact("pure-degree", pure_degree(&theta_pure(n)) == n as i64 - 1 && expand_pure(&theta_pure(n)) == th));
    for k in 0..=6u64 {
        let mem = theta_power_membership(n, m, k)?;
        t.push(exact(format!("membership/k{k}"), mem.member == membership_by_normal_form(n, m, k)?));
    }
    let l = theta_power_membership(n, m, 1)?.l;
    t.push(prove_task(format!("normal-word/l{l}"), &p, (th.pow(l as i64), normal_theta_word(n, l, false))));
    Ok(t)
}

/// Tag, Coxeter quotient and the `(m, p, n)` of its monomial model.
pub type OrderCase = (String, Presentation, (u32, u32, usize));

/// Groups with a known monomial model: the Coxeter quotient and the
/// `(m, p, n)` of the matching monomial group.
pub fn order_cases() -> Result<Vec<OrderCase>, SuiteError> {
    let normal = |n: usize, m: u32| -> Result<Presentation, SuiteError> {
        Ok(coxeterize(&one_cone_semidirect(n, m)?.normal_part(), SquareFilter::HalfTwists))
    };
    let mut out = vec![
        ("symmetric/n3".to_string(), coxeterize(&orbifold_braid(3, 0, &[])?, SquareFilter::HalfTwists), (1, 1, 3)),
        ("coxeter-d/n3".to_string(), normal(3, 2)?, (2, 2, 3)),
        ("monomial/G(3,3,3)".to_string(), normal(3, 3)?, (3, 3, 3)),
        ("monomial/G(4,4,3)".to_string(), normal(3, 4)?, (4, 4, 3)),
        ("monomial/G(2,2,4)".to_string(), normal(4, 2)?, (2, 2, 4)),
    ];
    for (n, m) in [(2usize, 2u32), (2, 3), (3, 2), (3, 3)] {
        let p = coxeterize(&orbifold_braid(n, 0, &[m])?, SquareFilter::HalfTwists);
        out.push((format!("wreath/Z{m}-S{n}"), p, (m, 1, n)));
    }
    Ok(out)
}

fn orders_tasks() -> Result<Vec<Task>, SuiteError> {
    order_cases()?
        .into_iter()
        .map(|(tag, p, (m, q, n))| {
            let expected = enumerate_monomial(m, q, n, 1 << 20)?.len();
            Ok(Task { tag, check: Check::Order { presentation: p, expected } })
        })
        .collect()
}

pub fn suite_tasks(name: SuiteName, sp: &SuiteParams) -> Result<Vec<Task>, SuiteError> {
    let (n, m, m2) = (sp.n, sp.m, sp.m2);
    match name {
        SuiteName::Lemma31 => lemma31_tasks(sp),
        SuiteName::Table1 => loop_letter_tasks(&two_cone_assignments(n, m, m2)?.1, 2, &[u1()], "psi"),
        SuiteName::Table2 => Ok(obligation_tasks(&two_cone_assignments(n, m, m2)?.0, "phi")),
        SuiteName::Table3 => {
            let semi = two_cone_semidirect(n, m, m2)?;
            let mut t = conjugation_tasks(&semi, &GeneratorId::U(1), "automorphism/u")?;
            t.extend(conjugation_tasks(&semi, &GeneratorId::UPrime, "automorphism/u'")?);
            Ok(t)
        }
        SuiteName::Table4 => {
            need(n >= 3, "the punctured semidirect presentation needs n >= 3")?;
            loop_letter_tasks(&punctured_assignments(n, m)?.1, 1, &[Word::gen(GeneratorId::T(1))], "psi")
        }
        SuiteName::Table5 => {
            need(n >= 3, "the punctured semidirect presentation needs n >= 3")?;
            Ok(obligation_tasks(&punctured_assignments(n, m)?.0, "phi"))
        }
        SuiteName::Table6 => {
            need(n >= 3, "the punctured semidirect presentation needs n >= 3")?;
            let (phi, _) = punctured_assignments(n, m)?;
            conjugation_tasks(&phi.target, &GeneratorId::UBar, "automorphism/ubar")
        }
        SuiteName::Thm33Steps => thm33_tasks(sp),
        SuiteName::Thm37Steps => thm37_tasks(sp),
        SuiteName::Center => center_tasks(sp),
        SuiteName::Orders => orders_tasks(),
    }
}

pub fn run_task(task: &Task, budget: &Budget, max_cosets: usize) -> Result<Entry, SuiteError> {
    let tag = task.tag.clone();
    Ok(match &task.check {
        Check::Exact(ok) => {
            Entry { tag, status: if *ok { EntryStatus::Equal } else { EntryStatus::Mismatch }, nodes: 0, chain_len: 0 }
        }
        Check::Prove { presentation, lhs, rhs, plan } => {
            let r = prove_plan(presentation, lhs, rhs, plan, budget)?;
            let status = match r.status {
                ProofStatus::Proved if replay(presentation, lhs, rhs, &r.chain).is_ok() => EntryStatus::Proved,
                ProofStatus::Proved => EntryStatus::Invalid,
                ProofStatus::Unknown => EntryStatus::Unknown,
            };
            Entry { tag, status, nodes: r.nodes_explored, chain_len: r.chain.len() }
        }
        Check::Order { presentation, expected } => match enumerate_cosets(presentation, max_cosets) {
            CosetResult::Order(k) => Entry {
                tag,
                status: if k == *expected { EntryStatus::Equal } else { EntryStatus::Mismatch },
                nodes: k,
                chain_len: 0,
            },
            CosetResult::Overflow => Entry { tag, status: EntryStatus::Overflow, nodes: max_cosets, chain_len: 0 },
        },
    })
}

/// Runs tasks in parallel, preserving order.
pub fn run_tasks(tasks: &[Task], budget: &Budget, max_cosets: usize) -> Result<Vec<Entry>, SuiteError> {
    tasks.par_iter().map(|t| run_task(t, budget, max_cosets)).collect()
}

pub fn run_suite(name: SuiteName, sp: &SuiteParams, budget: &Budget) -> Result<Report, SuiteError> {
    run_suite_with(name, sp, budget, DEFAULT_MAX_COSETS)
}

pub fn run_suite_with(
    name: SuiteName,
    sp: &SuiteParams,
    budget: &Budget,
    max_cosets: usize,
) -> Result<Report, SuiteError> {
    let tasks = suite_tasks(name, sp)?;
    let entries = run_tasks(&tasks, budget, max_cosets)?;
    let pass = entries.iter().all(|e| e.status.passed());
    let params = if name == SuiteName::Orders { SuiteParams { n: 0, m: 0, m2: 0, punctures: 0 } } else { *sp };
    Ok(Report { suite: name.to_string(), params, convention: conventions(), entries, pass, version: VERSION })
}
