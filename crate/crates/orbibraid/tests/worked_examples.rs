use orbibraid::center::{
    expand_pure, gamma, gamma_pure, pure_degree, theta, theta_power_membership, theta_pure, u_exponent,
};
use orbibraid::homomorphisms::{
    closed_form_conjugation, conjugation_automorphism, last_strand_loop, one_cone_assignments, punctured_assignments,
    semidirect_normal_form, two_cone_assignments,
};
use orbibraid::presentations::{
    artin_from_graph, expand_pure_generator, one_cone_semidirect, orbifold_braid, punctured_semidirect,
    pure_orbifold_braid, two_cone_semidirect, two_cone_semidirect_n3, Presentation, Weight, WeightedGraph,
};
use orbibraid::prover::{prove, replay, Budget};
use orbibraid::quotients::WreathAssignment;
use orbibraid::words::{alternating_word, product, Conj, GeneratorId, Word};

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

fn has(p: &Presentation, l: &str, r: &str) -> bool {
    let (l, r) = (w(l), w(r));
    p.relations.iter().any(|x| (x.lhs == l && x.rhs == r) || (x.lhs == r && x.rhs == l))
}

fn proved(p: &Presentation, a: &Word, b: &Word) -> bool {
    let r = prove(p, a, b, &Budget::default()).unwrap();
    r.is_proved() && replay(p, a, b, &r.chain).is_ok()
}

#[test]
fn word_examples() {
    assert_eq!(w("h1*h1*h1^-1*u*h1"), w("h1*u*h1"));
    assert_eq!(product([&w("h1*u*h1"), &w("u")]), theta(2));
    assert_eq!(alternating_word(&w("a"), &w("b"), 3), w("a*b*a"));
}

#[test]
fn orbifold_presentations() {
    let p = orbifold_braid(3, 0, &[3]).unwrap();
    assert_eq!(p.relations.len(), 4);
    for (l, r) in [("u^3", "1"), ("h1*h2*h1", "h2*h1*h2"), ("u*h2", "h2*u"), ("h1*u*h1*u", "u*h1*u*h1")] {
        assert!(has(&p, l, r), "{l} = {r}");
    }
    let p = orbifold_braid(2, 0, &[5]).unwrap();
    assert_eq!(p.relations.len(), 2);
    let p = orbifold_braid(3, 1, &[2]).unwrap();
    assert!(has(&p, "t*h2", "h2*t"));
    assert!(has(&p, "t*h1^-1*u*h1", "h1^-1*u*h1*t"));
}

#[test]
fn pure_presentations_and_expansions() {
    let p = pure_orbifold_braid(2, 0, &[4]).unwrap();
    assert!(has(&p, "c(1,1)^4", "1") && has(&p, "c(2,1)^4", "1"));
    assert!(has(&p, "a(2,1)*c(2,1)*c(1,1)", "c(1,1)*a(2,1)*c(2,1)"));
    assert_eq!(expand_pure_generator(&GeneratorId::A(2, 1)).unwrap(), w("h1^2"));
    assert_eq!(expand_pure_generator(&GeneratorId::C(2, 1)).unwrap(), w("h1^-1*u*h1"));
    assert_eq!(expand_pure_generator(&GeneratorId::A(3, 1)).unwrap(), w("h2^-1*h1^2*h2"));
}

#[test]
fn two_cone_semidirect_relations() {
    let p = two_cone_semidirect(4, 2, 2).unwrap();
    assert!(has(&p, "h1*hu1", "hu1*h1"));
    assert!(has(&p, "h1*hu1*h2*h1*hu1*h2", "h2*h1*hu1*h2*h1*hu1"));
    let p = two_cone_semidirect(4, 3, 2).unwrap();
    assert!(has(&p, "u^3", "1") && has(&p, "u'^2", "1") && has(&p, "u*u'", "u'*u"));
    assert!(has(&p, "u*hu1*u^-1", "hu1^-1*h1*hu1"));
}

#[test]
fn punctured_semidirect_relations() {
    let p = punctured_semidirect(3, 2).unwrap();
    assert!(has(&p, "h2*hu2", "hu2*h2"));
    assert!(has(&p, "ubar^2", "1"));
    assert!(has(&p, "ubar*hu2*ubar^-1", "hu2^-1*h2*hu2"));
    let p = punctured_semidirect(4, 3).unwrap();
    for x in ["h2", "h3", "hu3"] {
        assert!(has(&p, &format!("t*{x}"), &format!("{x}*t")), "{x}");
    }
}

#[test]
fn one_cone_semidirect_relations() {
    let p = one_cone_semidirect(2, 4).unwrap();
    assert_eq!(p.relations.len(), 4);
    let q = one_cone_semidirect(3, 3).unwrap().normal_part();
    assert!(has(&q, "h1*h2*h1", "h2*h1*h2"));
    assert!(has(&q, "hu1*h2*hu1", "h2*hu1*h2"));
    assert!(has(&q, "h1*hu1*h1", "hu1*h1*hu1"));
}

#[test]
fn one_cone_normal_part_at_order_two_is_type_d() {
    let q = one_cone_semidirect(4, 2).unwrap().normal_part();
    let hu = GeneratorId::HConj(Conj::U, 1);
    let mut gph = WeightedGraph::new(vec![GeneratorId::H(1), hu, GeneratorId::H(2), GeneratorId::H(3)]);
    for (a, b) in [(0, 2), (1, 2), (2, 3)] {
        gph.add_edge(a, b, Weight::Finite(3)).unwrap();
    }
    let d4 = artin_from_graph(&gph).unwrap();
    for r in &d4.relations {
        assert!(has(&q, &r.lhs.to_string(), &r.rhs.to_string()), "{r}");
    }
    for r in &q.relations {
        let in_d4 = has(&d4, &r.lhs.to_string(), &r.rhs.to_string());
        assert!(in_d4 || r.tag.contains("triangle"), "{r}");
    }
}

#[test]
fn twisted_triangle_ranges() {
    let count =
        |m, m2| two_cone_semidirect_n3(m, m2).unwrap().relations.iter().filter(|r| r.tag.contains("twisted")).count();
    assert_eq!(count(2, 2), 0);
}

#[test]
fn artin_graph_conventions() {
    let mut gph = WeightedGraph::with_named_vertices(2);
    gph.add_edge(0, 1, Weight::Finite(3)).unwrap();
    assert!(has(&artin_from_graph(&gph).unwrap(), "v1*v2*v1", "v2*v1*v2"));
    let gph = WeightedGraph::with_named_vertices(2);
    assert!(has(&artin_from_graph(&gph).unwrap(), "v1*v2", "v2*v1"));
    let mut gph = WeightedGraph::with_named_vertices(2);
    gph.add_edge(0, 1, Weight::Infinite).unwrap();
    assert!(artin_from_graph(&gph).unwrap().relations.is_empty());
}

#[test]
fn prover_examples() {
    let p = orbifold_braid(2, 0, &[2]).unwrap();
    assert!(proved(&p, &w("u*h1*u^-1*h1"), &w("h1*u*h1*u^-1")));
    let p = orbifold_braid(3, 0, &[3]).unwrap();
    let c = last_strand_loop(3, GeneratorId::U(1));
    assert_eq!(c, w("h2^-1*h1^-1*u*h1*h2"));
    assert!(proved(&p, &w("h1").concat(&c), &c.concat(&w("h1"))));
    // h2 moves the last strand, so it cannot commute with its loop
    let q = WreathAssignment::for_presentation(&p, false).unwrap();
    assert!(q.separate(&w("h2").concat(&c), &c.concat(&w("h2"))).unwrap());
}

#[test]
fn assignment_images() {
    let (phi, psi) = two_cone_assignments(3, 3, 2).unwrap();
    assert_eq!(psi.images[&GeneratorId::HConj(Conj::U, 1)], w("u*h1*u^-1"));
    assert_eq!(phi.images[&GeneratorId::U(2)], w("h1*h2*u'*h2^-1*h1^-1"));
    let s1 = psi.obligations("psi").into_iter().find(|o| o.lhs == w("u^3")).expect("order obligation");
    assert!(s1.rhs.is_empty());
    let back = phi.then(&psi);
    for j in 1..3u16 {
        assert_eq!(back.images[&GeneratorId::H(j)], w(&format!("h{j}")));
    }
    let there = psi.then(&phi);
    assert_eq!(there.images[&GeneratorId::HConj(Conj::U, 1)], w("u*h1*u^-1"));
    assert!(proved(&phi.target, &w("u*h1*u^-1"), &w("hu1")));
}

#[test]
fn conjugation_automorphisms() {
    let p = two_cone_semidirect(3, 3, 2).unwrap();
    let fu = conjugation_automorphism(&p, &GeneratorId::U(1)).unwrap();
    assert_eq!(fu.apply(&w("h1")), w("hu1"));
    assert_eq!(fu.apply(&w("hu1")), w("hu1^-1*h1*hu1"));
    let (phi, _) = punctured_assignments(3, 3).unwrap();
    let fb = conjugation_automorphism(&phi.target, &GeneratorId::UBar).unwrap();
    assert_eq!(fb.apply(&w("t")), w("t"));
}

#[test]
fn closed_forms() {
    let (hu1, h1) = (GeneratorId::HConj(Conj::U, 1), GeneratorId::H(1));
    assert_eq!(closed_form_conjugation(1, &hu1, &h1), w("hu1"));
    assert_eq!(closed_form_conjugation(2, &hu1, &h1), w("hu1^-1*h1*hu1"));
    assert_eq!(closed_form_conjugation(3, &hu1, &h1), w("hu1^-1*h1^-1*hu1*h1*hu1"));
}

#[test]
fn normal_forms() {
    for m in [2, 3, 5] {
        let (phi, _) = one_cone_assignments(3, m).unwrap();
        let f = semidirect_normal_form(&phi.target, &w("u*h1*u^-1")).unwrap();
        assert_eq!(f.normal_part, w("hu1"));
        assert!(f.quotient_is_trivial());
        let f = semidirect_normal_form(&phi.target, &w("u").pow(m as i64)).unwrap();
        assert!(f.normal_part.is_empty() && f.quotient_is_trivial());
    }
}

#[test]
fn central_element_examples() {
    assert_eq!(gamma(2, 3).unwrap(), w("h1*u*h1"));
    assert_eq!(gamma(3, 3).unwrap(), w("h2*h1*u*h1*h2"));
    assert_eq!(theta(2), w("h1*u*h1*u"));
    assert_eq!(gamma_pure(2).unwrap(), w("a(2,1)*c(2,1)"));
    assert_eq!(expand_pure(&gamma_pure(2).unwrap()), w("h1*u*h1"));
    assert_eq!(gamma_pure(3).unwrap(), w("a(3,2)*a(3,1)*c(3,1)"));
    assert_eq!(expand_pure(&gamma_pure(3).unwrap()), gamma(3, 3).unwrap());
    for (n, m) in [(2, 2), (3, 2), (4, 3), (5, 5)] {
        assert_eq!(u_exponent(&theta(n), m), n as i64 % m as i64);
        assert_eq!(pure_degree(&theta_pure(n)), n as i64 - 1);
    }
    assert_eq!(u_exponent(&w("h2"), 3), 0);
    assert_eq!(pure_degree(&w("c(3,1)")), 0);
    let mem = theta_power_membership(2, 2, 1).unwrap();
    assert!(mem.member);
    assert_eq!(mem.l, 1);
}
