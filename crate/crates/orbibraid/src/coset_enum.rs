//! Todd–Coxeter enumeration of the cosets of the trivial subgroup.
//!
//! Cosets are defined in Felsch order: the first undefined table entry is
//! filled, and every consequence of that definition is deduced by scanning
//! the relator conjugates through it before the next definition.
//! Coincidences are merged with a union-find forest. A closing pass scans
//! every relator from every live coset so the reported order never depends
//! on the deduction bookkeeping being exhaustive.

use serde::Serialize;

use crate::presentations::Presentation;
use crate::prover::cyclic_relator;

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CosetResult {
    Order(usize),
    Overflow,
}

const NONE: u32 = u32::MAX;

struct Table {
    cols: usize,
    data: Vec<u32>,
    parent: Vec<u32>,
    max: usize,
    deductions: Vec<(u32, usize)>,
    queue: Vec<u32>,
    overflow: bool,
}

impl Table {
    fn new(cols: usize, max: usize) -> Table {
        Table {
            cols,
            data: vec![NONE; cols],
            parent: vec![0],
            max,
            deductions: Vec::new(),
            queue: Vec::new(),
            overflow: false,
        }
    }

    fn len(&self) -> usize {
        self.parent.len()
    }

    fn get(&self, c: u32, x: usize) -> u32 {
        self.data[c as usize * self.cols + x]
    }

    fn set(&mut self, c: u32, x: usize, d: u32) {
        self.data[c as usize * self.cols + x] = d;
    }

    fn live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = c;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    fn define(&mut self, c: u32, x: usize) -> bool {
        if self.len() >= self.max {
            self.overflow = true;
            return false;
        }
        let d = self.len() as u32;
        self.parent.push(d);
        self.data.extend(std::iter::repeat_n(NONE, self.cols));
        self.set(c, x, d);
        self.set(d, x ^ 1, c);
        self.deductions.push((c, x));
        true
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi as usize] = lo;
        self.queue.push(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for x in 0..self.cols {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                self.set(g, x, NONE);
                if self.get(d, x ^ 1) == g {
                    self.set(d, x ^ 1, NONE);
                }
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, x);
                let nx = self.get(nu, x ^ 1);
                if mx != NONE {
                    self.merge(nu, mx);
                } else if nx != NONE {
                    self.merge(mu, nx);
                } else {
                    self.set(mu, x, nu);
                    self.set(nu, x ^ 1, mu);
                    self.deductions.push((mu, x));
                }
            }
        }
    }

    /// Scans `w` from `c` without defining cosets. Returns true if it
    /// changed the table.
    fn scan(&mut self, c: u32, w: &[usize], fill: bool) -> bool {
        let mut f = c;
        let mut i = 0;
        let mut j = w.len();
        while i < j {
            let n = self.get(f, w[i]);
            if n == NONE {
                break;
            }
            f = n;
            i += 1;
        }
        if i == j {
            if f != c {
                self.coincidence(f, c);
                return true;
            }
            return false;
        }
        let mut b = c;
        loop {
            while j > i {
                let n = self.get(b, w[j - 1] ^ 1);
                if n == NONE {
                    break;
                }
                b = n;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return true;
            }
            if j == i + 1 {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                self.deductions.push((f, w[i]));
                return true;
            }
            if !fill || !self.define(b, w[j - 1] ^ 1) {
                return false;
            }
        }
    }

    fn process_deductions(&mut self, by_first: &[Vec<Vec<usize>>]) {
        while let Some((c, x)) = self.deductions.pop() {
            if !self.live(c) {
                continue;
            }
            for w in &by_first[x] {
                if !self.live(c) {
                    break;
                }
                self.scan(c, w, false);
            }
            let d = self.get(c, x);
            if d != NONE && self.live(d) {
                for w in &by_first[x ^ 1] {
                    if !self.live(d) {
                        break;
                    }
                    self.scan(d, w, false);
                }
            }
        }
    }
}

/// Order of the group presented by `p`, or overflow once more than
/// `max_cosets` cosets would be defined.
pub fn enumerate_cosets(p: &Presentation, max_cosets: usize) -> CosetResult {
    let ngens = p.generators.len();
    let cols = 2 * ngens;
    if ngens == 0 {
        return CosetResult::Order(1);
    }
    let code =
        |g: &crate::words::GeneratorId, inv: bool| 2 * p.generators.iter().position(|x| x == g).unwrap() + inv as usize;
    let mut relators: Vec<Vec<usize>> = Vec::new();
    for r in &p.relations {
        let w = cyclic_relator(r);
        if !w.is_empty() {
            relators.push(w.letters().iter().map(|l| code(&l.gen, l.inv)).collect());
        }
    }
    // every cyclic conjugate of every relator and its inverse, by first letter
    let mut by_first: Vec<Vec<Vec<usize>>> = vec![Vec::new(); cols];
    for r in &relators {
        let inv: Vec<usize> = r.iter().rev().map(|&x| x ^ 1).collect();
        for w in [r, &inv] {
            for k in 0..w.len() {
                let rot: Vec<usize> = w[k..].iter().chain(&w[..k]).copied().collect();
                if !by_first[rot[0]].contains(&rot) {
                    by_first[rot[0]].push(rot);
                }
            }
        }
    }
    let mut t = Table::new(cols, max_cosets.max(1));
    loop {
        let mut c = 0u32;
        while (c as usize) < t.len() {
            if t.live(c) {
                for x in 0..cols {
                    if !t.live(c) {
                        break;
                    }
                    if t.get(c, x) == NONE {
                        if !t.define(c, x) {
                            return CosetResult::Overflow;
                        }
                        t.process_deductions(&by_first);
                    }
                }
            }
            c += 1;
        }
        // closing pass: every relator must close at every live coset
        let mut changed = false;
        let mut c = 0u32;
        while (c as usize) < t.len() {
            if t.live(c) {
                for r in &relators {
                    if t.live(c) && t.scan(c, r, true) {
                        changed = true;
                        t.process_deductions(&by_first);
                    }
                }
            }
            if t.overflow {
                return CosetResult::Overflow;
            }
            c += 1;
        }
        if !changed {
            let live = (0..t.len() as u32).filter(|&c| t.live(c)).count();
            return CosetResult::Order(live);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::{coxeterize, orbifold_braid, Presentation, SquareFilter};
    use crate::words::{GeneratorId, Word};

    #[test]
    fn cyclic_and_dihedral() {
        let mut p = Presentation::new("c5", vec![GeneratorId::Named("x".into())]).unwrap();
        p.add(Word::parse("x^5").unwrap(), Word::identity(), "order").unwrap();
        assert_eq!(enumerate_cosets(&p, 1000), CosetResult::Order(5));
        let q = coxeterize(&orbifold_braid(2, 0, &[2]).unwrap(), SquareFilter::HalfTwists);
        assert_eq!(enumerate_cosets(&q, 1000), CosetResult::Order(8));
    }

    #[test]
    fn infinite_group_overflows() {
        let p = orbifold_braid(3, 0, &[]).unwrap();
        assert_eq!(enumerate_cosets(&p, 500), CosetResult::Overflow);
    }

    #[test]
    fn free_group_on_no_relations() {
        let p = Presentation::new("triv", vec![]).unwrap();
        assert_eq!(enumerate_cosets(&p, 10), CosetResult::Order(1));
    }
}
