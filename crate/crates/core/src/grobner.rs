//! Gröbner bases over ℚ for desk-sized ideals, monomial ideals, multidegrees,
//! K-polynomials and Hilbert series of tangent cones.
//!
//! Coefficients are kept integral and primitive; the reduced basis is the
//! rational one scaled to a primitive integer polynomial with positive
//! leading coefficient.

use std::cmp::Ordering;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;
use thiserror::Error;

use crate::clan::Clan;
use crate::ideals::{patch_ideal, IdealError, IdealPresentation};
use crate::int::Int;
use crate::polyring::{Monomial, MultiPoly, PolyBuilder, Ring, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GbError {
    #[error("budget exceeded after {pairs} S-pairs (basis size {basis})")]
    BudgetExceeded { pairs: usize, basis: usize },
    #[error("variable {0} is not part of the term order")]
    UnknownVariable(String),
    #[error("monomial ideal is not squarefree")]
    NotSquarefree,
    #[error("the base point is not on the zero set")]
    OriginNotOnVariety,
    #[error("Hilbert numerator is not divisible by (1-q)^{0}")]
    NotDivisible(usize),
    #[error("too many variables ({0}, at most 64)")]
    TooManyVariables(usize),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

/// How monomials are compared after the variables are ranked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderKind {
    Lex,
    DegRevLex,
    /// Integer weight vectors compared in turn, then reverse lexicographic.
    Weighted(Vec<Vec<i32>>),
}

/// A term order on the listed variables, `priority[0]` largest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermOrder {
    pub kind: OrderKind,
    pub priority: Vec<Var>,
}

impl TermOrder {
    pub fn lex(priority: Vec<Var>) -> TermOrder {
        TermOrder { kind: OrderKind::Lex, priority }
    }

    pub fn grevlex(priority: Vec<Var>) -> TermOrder {
        TermOrder { kind: OrderKind::DegRevLex, priority }
    }

    /// `≺_{p,q}`: the bottom `q` rows read left to right from the bottom row
    /// up, then the top `p` rows left to right from the top row down.
    pub fn clan_order(p: usize, q: usize) -> TermOrder {
        let n = p + q;
        let mut pr = Vec::with_capacity(n * n);
        for i in (p + 1..=n).rev() {
            pr.extend((1..=n).map(|j| Var::Z(i as u16, j as u16)));
        }
        for i in 1..=p {
            pr.extend((1..=n).map(|j| Var::Z(i as u16, j as u16)));
        }
        TermOrder::lex(pr)
    }

    pub fn nvars(&self) -> usize {
        self.priority.len()
    }

    fn weights(&self) -> Vec<Vec<i32>> {
        match &self.kind {
            OrderKind::Lex => Vec::new(),
            OrderKind::DegRevLex => vec![vec![1; self.nvars()]],
            OrderKind::Weighted(w) => w.clone(),
        }
    }
}

type Exp = SmallVec<[u8; 36]>;

/// Exponent vector in priority coordinates plus cached weights and support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mon {
    key: SmallVec<[i32; 2]>,
    exp: Exp,
    mask: u64,
}

impl Mon {
    fn new(exp: Exp, weights: &[Vec<i32>]) -> Mon {
        let key = weights.iter().map(|w| w.iter().zip(&exp).map(|(a, &e)| a * e as i32).sum()).collect();
        let mask = exp.iter().enumerate().fold(0u64, |m, (k, &e)| if e > 0 { m | 1 << (k % 64) } else { m });
        Mon { key, exp, mask }
    }

    pub fn exps(&self) -> &[u8] {
        &self.exp
    }

    pub fn degree(&self) -> u32 {
        self.exp.iter().map(|&e| e as u32).sum()
    }

    fn mul(&self, o: &Mon) -> Mon {
        Mon {
            key: self.key.iter().zip(&o.key).map(|(a, b)| a + b).collect(),
            exp: self.exp.iter().zip(&o.exp).map(|(a, b)| a + b).collect(),
            mask: self.mask | o.mask,
        }
    }

    fn divides(&self, o: &Mon) -> bool {
        self.mask & !o.mask == 0 && self.exp.iter().zip(&o.exp).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming divisibility.
    fn quotient_of(&self, o: &Mon) -> Mon {
        let exp: Exp = o.exp.iter().zip(&self.exp).map(|(a, b)| a - b).collect();
        let key = o.key.iter().zip(&self.key).map(|(a, b)| a - b).collect();
        let mask = exp.iter().enumerate().fold(0u64, |m, (k, &e)| if e > 0 { m | 1 << (k % 64) } else { m });
        Mon { key, exp, mask }
    }

    fn lcm(&self, o: &Mon, weights: &[Vec<i32>]) -> Mon {
        Mon::new(self.exp.iter().zip(&o.exp).map(|(a, b)| *a.max(b)).collect(), weights)
    }

    fn coprime(&self, o: &Mon) -> bool {
        self.exp.iter().zip(&o.exp).all(|(a, b)| *a == 0 || *b == 0)
    }
}

fn cmp_mon(a: &Mon, b: &Mon, lex: bool) -> Ordering {
    match a.key.cmp(&b.key) {
        Ordering::Equal => {}
        o => return o,
    }
    if lex {
        a.exp.cmp(&b.exp)
    } else {
        for (x, y) in a.exp.iter().zip(&b.exp).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    }
}

/// Sparse polynomial, terms strictly decreasing in the order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    terms: Vec<(Mon, Int)>,
}

impl Poly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &Mon {
        &self.terms[0].0
    }

    fn lc(&self) -> &Int {
        &self.terms[0].1
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Mon, Int)] {
        &self.terms
    }

    fn make_primitive(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let mut g = Int::ZERO;
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if self.lc().is_negative() {
            g = -&g;
        }
        if !g.is_one() {
            for t in &mut self.terms {
                t.1 = t.1.div_exact(&g).expect("content divides");
            }
        }
    }
}

/// Polynomial arithmetic in a fixed order.
#[derive(Clone, Debug)]
pub struct GbRing {
    order: TermOrder,
    weights: Vec<Vec<i32>>,
    lex: bool,
    slot: FxHashMap<Var, usize>,
}

/// Caps for a Buchberger run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_pairs: usize,
    pub max_degree: Option<u32>,
    pub timeout: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { max_pairs: 200_000, max_degree: None, timeout: None }
    }
}

/// Outcome of checking whether a generating set is already a Gröbner basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GbCheck {
    Groebner,
    /// An S-pair of input generators with nonzero normal form.
    Witness { i: usize, j: usize },
}

impl GbRing {
    pub fn new(order: TermOrder) -> Result<GbRing, GbError> {
        if order.nvars() > 64 {
            return Err(GbError::TooManyVariables(order.nvars()));
        }
        let weights = order.weights();
        let lex = order.kind == OrderKind::Lex;
        let slot = order.priority.iter().enumerate().map(|(k, v)| (*v, k)).collect();
        Ok(GbRing { order, weights, lex, slot })
    }

    pub fn order(&self) -> &TermOrder {
        &self.order
    }

    pub fn nvars(&self) -> usize {
        self.order.nvars()
    }

    pub fn cmp(&self, a: &Mon, b: &Mon) -> Ordering {
        cmp_mon(a, b, self.lex)
    }

    pub fn mon(&self, exp: &[u8]) -> Mon {
        Mon::new(exp.iter().copied().collect(), &self.weights)
    }

    pub fn var_of(&self, k: usize) -> Var {
        self.order.priority[k]
    }

    pub fn from_terms(&self, terms: impl IntoIterator<Item = (Mon, Int)>) -> Poly {
        let mut t: Vec<(Mon, Int)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        t.sort_by(|a, b| self.cmp(&b.0, &a.0));
        let mut out: Vec<(Mon, Int)> = Vec::with_capacity(t.len());
        for (m, c) in t {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { terms: out }
    }

    /// Imports a polynomial whose variables all belong to the order.
    pub fn import(&self, f: &MultiPoly) -> Result<Poly, GbError> {
        let ring = f.ring();
        let mut terms = Vec::with_capacity(f.len());
        for (m, c) in f.terms() {
            let mut exp: Exp = SmallVec::from_elem(0, self.nvars());
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = ring.var(k);
                let s = *self.slot.get(&v).ok_or_else(|| GbError::UnknownVariable(v.name(ring.n())))?;
                exp[s] = e as u8;
            }
            terms.push((Mon::new(exp, &self.weights), c.clone()));
        }
        Ok(self.from_terms(terms))
    }

    pub fn export(&self, f: &Poly, ring: &Arc<Ring>) -> MultiPoly {
        let idx: Vec<usize> = self.order.priority.iter().map(|v| ring.index(*v).expect("variable in ring")).collect();
        let mut b = PolyBuilder::with_capacity(ring, f.len());
        for (m, c) in &f.terms {
            let mut e = Monomial::one(ring.nvars());
            for (k, &x) in m.exp.iter().enumerate() {
                e.0[idx[k]] += x as i16;
            }
            b.add_term(e, c);
        }
        b.finish()
    }

    /// `a·f − b·m·g`, all terms merged in order.
    fn lin_comb(&self, a: &Int, f: &[(Mon, Int)], b: &Int, m: &Mon, g: &[(Mon, Int)]) -> Vec<(Mon, Int)> {
        let mut out = Vec::with_capacity(f.len() + g.len());
        let (mut i, mut j) = (0, 0);
        let mut gm: Option<Mon> = g.first().map(|t| t.0.mul(m));
        while i < f.len() || j < g.len() {
            let ord = match (i < f.len(), &gm) {
                (true, Some(x)) => self.cmp(&f[i].0, x),
                (true, None) => Ordering::Greater,
                (false, _) => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push((f[i].0.clone(), &f[i].1 * a));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((gm.take().expect("term"), -&(&g[j].1 * b)));
                    j += 1;
                    gm = g.get(j).map(|t| t.0.mul(m));
                }
                Ordering::Equal => {
                    let c = &(&f[i].1 * a) - &(&g[j].1 * b);
                    if !c.is_zero() {
                        out.push((f[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                    gm = g.get(j).map(|t| t.0.mul(m));
                }
            }
        }
        out
    }

    fn spoly(&self, f: &Poly, g: &Poly) -> Poly {
        let l = f.lm().lcm(g.lm(), &self.weights);
        let (a, b) = (f.lc(), g.lc());
        let d = a.gcd(b);
        let (a, b) = (a.div_exact(&d).expect("gcd"), b.div_exact(&d).expect("gcd"));
        // b·(l/lm f)·f − a·(l/lm g)·g
        let mf = f.lm().quotient_of(&l);
        let mg = g.lm().quotient_of(&l);
        let ff: Vec<(Mon, Int)> = f.terms[1..].iter().map(|(m, c)| (m.mul(&mf), c.clone())).collect();
        let terms = self.lin_comb(&b, &ff, &a, &mg, &g.terms[1..]);
        let mut p = Poly { terms };
        p.make_primitive();
        p
    }

    fn find_reducer<'a>(&self, m: &Mon, basis: &'a [Poly], active: &[usize]) -> Option<&'a Poly> {
        active.iter().map(|&k| &basis[k]).find(|g| g.lm().divides(m))
    }

    /// Normal form with respect to `basis[active]`; `full` also reduces the tail.
    fn normal_form(&self, f: Poly, basis: &[Poly], active: &[usize], full: bool) -> Poly {
        let mut rest = f.terms;
        let mut done: Vec<(Mon, Int)> = Vec::new();
        while !rest.is_empty() {
            let lm = rest[0].0.clone();
            match self.find_reducer(&lm, basis, active) {
                Some(g) => {
                    let (a, b) = (&rest[0].1, g.lc());
                    let d = a.gcd(b);
                    let (ca, cb) = (b.div_exact(&d).expect("gcd"), a.div_exact(&d).expect("gcd"));
                    let m = g.lm().quotient_of(&lm);
                    rest = self.lin_comb(&ca, &rest[1..], &cb, &m, &g.terms[1..]);
                    if !ca.is_one() {
                        for t in &mut done {
                            t.1 = &t.1 * &ca;
                        }
                    }
                    let mut g = Int::ZERO;
                    for (_, c) in done.iter().chain(rest.iter()) {
                        g = g.gcd(c);
                        if g.is_one() {
                            break;
                        }
                    }
                    if !g.is_one() && !g.is_zero() {
                        for t in done.iter_mut().chain(rest.iter_mut()) {
                            t.1 = t.1.div_exact(&g).expect("content");
                        }
                    }
                }
                None => {
                    if !full {
                        done.extend(rest);
                        break;
                    }
                    let t = rest.remove(0);
                    done.push(t);
                }
            }
        }
        let mut p = Poly { terms: done };
        p.make_primitive();
        p
    }

    /// Normal form of `f` modulo the given polynomials (assumed a Gröbner basis).
    pub fn reduce(&self, f: &Poly, basis: &[Poly]) -> Poly {
        let active: Vec<usize> = (0..basis.len()).collect();
        self.normal_form(f.clone(), basis, &active, true)
    }

    /// Reduced Gröbner basis, sorted by decreasing leading monomial.
    pub fn buchberger(&self, gens: &[Poly], budget: &Budget) -> Result<Vec<Poly>, GbError> {
        let start = Instant::now();
        let mut basis: Vec<Poly> = Vec::new();
        let mut active: Vec<usize> = Vec::new();
        let mut pairs: Vec<(Mon, usize, usize)> = Vec::new();
        let mut inputs: Vec<Poly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
        for g in &mut inputs {
            g.make_primitive();
        }
        inputs.sort_by(|a, b| self.cmp(a.lm(), b.lm()));
        for g in inputs {
            let h = self.normal_form(g, &basis, &active, false);
            if !h.is_zero() {
                self.update(&mut basis, &mut active, &mut pairs, h);
            }
        }
        let mut done = 0usize;
        while !pairs.is_empty() {
            let best = (0..pairs.len())
                .min_by(|&a, &b| {
                    self.cmp(&pairs[a].0, &pairs[b].0).then((pairs[a].1, pairs[a].2).cmp(&(pairs[b].1, pairs[b].2)))
                })
                .expect("nonempty");
            let (l, i, j) = pairs.swap_remove(best);
            done += 1;
            let over_time = budget.timeout.is_some_and(|t| start.elapsed() > t);
            let over_deg = budget.max_degree.is_some_and(|d| l.degree() > d);
            if done > budget.max_pairs || over_time || over_deg {
                return Err(GbError::BudgetExceeded { pairs: done, basis: active.len() });
            }
            let s = self.spoly(&basis[i], &basis[j]);
            let h = self.normal_form(s, &basis, &active, false);
            if !h.is_zero() {
                self.update(&mut basis, &mut active, &mut pairs, h);
            }
        }
        Ok(self.interreduce(active.iter().map(|&k| basis[k].clone()).collect()))
    }

    fn update(&self, basis: &mut Vec<Poly>, active: &mut Vec<usize>, pairs: &mut Vec<(Mon, usize, usize)>, h: Poly) {
        let hk = basis.len();
        let hm = h.lm().clone();
        basis.push(h);
        let cand: Vec<(usize, Mon, bool)> = active
            .iter()
            .map(|&g| {
                let gm = basis[g].lm();
                (g, hm.lcm(gm, &self.weights), hm.coprime(gm))
            })
            .collect();
        let mut keep = vec![false; cand.len()];
        let mut removed = vec![false; cand.len()];
        for a in 0..cand.len() {
            let (_, la, cop) = &cand[a];
            let dominated = (0..cand.len()).any(|b| {
                b != a && !removed[b] && (b > a || keep[b]) && cand[b].1.divides(la)
            });
            if *cop || !dominated {
                keep[a] = true;
            } else {
                removed[a] = true;
            }
        }
        pairs.retain(|(l, i, j)| {
            !(hm.divides(l)
                && &basis[*i].lm().lcm(&hm, &self.weights) != l
                && &basis[*j].lm().lcm(&hm, &self.weights) != l)
        });
        for (a, (g, l, cop)) in cand.into_iter().enumerate() {
            if keep[a] && !cop {
                pairs.push((l, g, hk));
            }
        }
        active.retain(|&g| !hm.divides(basis[g].lm()));
        active.push(hk);
    }

    fn interreduce(&self, mut g: Vec<Poly>) -> Vec<Poly> {
        g.sort_by(|a, b| self.cmp(b.lm(), a.lm()));
        // drop elements whose leading monomial is divisible by another's
        let mut minimal: Vec<Poly> = Vec::new();
        for (k, p) in g.iter().enumerate() {
            let redundant = g.iter().enumerate().any(|(l, q)| l != k && q.lm().divides(p.lm()) && (q.lm() != p.lm() || l < k));
            if !redundant {
                minimal.push(p.clone());
            }
        }
        let all: Vec<usize> = (0..minimal.len()).collect();
        let mut out = Vec::with_capacity(minimal.len());
        for k in 0..minimal.len() {
            let others: Vec<usize> = all.iter().copied().filter(|&l| l != k).collect();
            let mut q = self.reduce_tail(&minimal[k], &minimal, &others);
            q.make_primitive();
            out.push(q);
        }
        out.sort_by(|a, b| self.cmp(b.lm(), a.lm()));
        out
    }

    /// Full normal form of `p` keeping its leading term, which no other lead divides.
    fn reduce_tail(&self, p: &Poly, basis: &[Poly], others: &[usize]) -> Poly {
        let mut done = vec![p.terms[0].clone()];
        let mut rest: Vec<(Mon, Int)> = p.terms[1..].to_vec();
        while !rest.is_empty() {
            let lm = rest[0].0.clone();
            match self.find_reducer(&lm, basis, others) {
                Some(g) => {
                    let (a, b) = (&rest[0].1, g.lc());
                    let d = a.gcd(b);
                    let (ca, cb) = (b.div_exact(&d).expect("gcd"), a.div_exact(&d).expect("gcd"));
                    let m = g.lm().quotient_of(&lm);
                    rest = self.lin_comb(&ca, &rest[1..], &cb, &m, &g.terms[1..]);
                    if !ca.is_one() {
                        for t in &mut done {
                            t.1 = &t.1 * &ca;
                        }
                    }
                }
                None => done.push(rest.remove(0)),
            }
        }
        Poly { terms: done }
    }

    /// Checks Buchberger's criterion on the given generators without adding any.
    pub fn is_groebner(&self, gens: &[Poly], budget: &Budget) -> Result<GbCheck, GbError> {
        let start = Instant::now();
        let gens: Vec<Poly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
        let n = gens.len();
        let all: Vec<usize> = (0..n).collect();
        let mut order: Vec<(Mon, usize, usize)> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                order.push((gens[i].lm().lcm(gens[j].lm(), &self.weights), i, j));
            }
        }
        order.sort_by(|a, b| self.cmp(&a.0, &b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        let mut treated = vec![false; n * n];
        let mut reduced = 0usize;
        for (l, i, j) in order {
            let chain = (0..n).any(|k| {
                k != i && k != j && treated[i.min(k) * n + i.max(k)] && treated[j.min(k) * n + j.max(k)] && gens[k].lm().divides(&l)
            });
            treated[i * n + j] = true;
            if gens[i].lm().coprime(gens[j].lm()) || chain {
                continue;
            }
            reduced += 1;
            if reduced > budget.max_pairs || budget.timeout.is_some_and(|t| start.elapsed() > t) {
                return Err(GbError::BudgetExceeded { pairs: reduced, basis: n });
            }
            let s = self.spoly(&gens[i], &gens[j]);
            if !self.normal_form(s, &gens, &all, false).is_zero() {
                return Ok(GbCheck::Witness { i, j });
            }
        }
        Ok(GbCheck::Groebner)
    }

    pub fn lead_ideal(&self, gens: &[Poly]) -> MonomialIdeal {
        MonomialIdeal::new(self.nvars(), gens.iter().filter(|g| !g.is_zero()).map(|g| g.lm().exp.to_vec()).collect())
    }
}

/// A monomial ideal in exponent-vector form over a fixed variable list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    nvars: usize,
    gens: Vec<Vec<u8>>,
}

fn divides(a: &[u8], b: &[u8]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn minimalize(mut gens: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    gens.sort_by(|a, b| {
        let da: u32 = a.iter().map(|&e| e as u32).sum();
        let db: u32 = b.iter().map(|&e| e as u32).sum();
        da.cmp(&db).then(b.cmp(a))
    });
    gens.dedup();
    let mut out: Vec<Vec<u8>> = Vec::with_capacity(gens.len());
    for g in gens {
        if !out.iter().any(|h| divides(h, &g)) {
            out.push(g);
        }
    }
    out
}

impl MonomialIdeal {
    pub fn new(nvars: usize, gens: Vec<Vec<u8>>) -> MonomialIdeal {
        MonomialIdeal { nvars, gens: minimalize(gens) }
    }

    pub fn generators(&self) -> &[Vec<u8>] {
        &self.gens
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_squarefree(&self) -> bool {
        self.gens.iter().all(|g| g.iter().all(|&e| e <= 1))
    }

    fn supports(&self) -> Vec<u64> {
        self.gens.iter().map(|g| g.iter().enumerate().fold(0u64, |m, (k, &e)| if e > 0 { m | 1 << k } else { m })).collect()
    }

    /// Minimal primes as sorted variable index lists (minimal vertex covers of the supports).
    pub fn minimal_primes(&self) -> Vec<Vec<usize>> {
        let mut covers: Vec<u64> = vec![0];
        for e in self.supports() {
            let mut next: Vec<u64> = Vec::new();
            for &t in &covers {
                if t & e != 0 {
                    next.push(t);
                } else {
                    let mut bits = e;
                    while bits != 0 {
                        let b = bits & bits.wrapping_neg();
                        next.push(t | b);
                        bits ^= b;
                    }
                }
            }
            next.sort_by_key(|m| (m.count_ones(), *m));
            next.dedup();
            let mut min: Vec<u64> = Vec::with_capacity(next.len());
            for m in next {
                if !min.iter().any(|&s| s & m == s) {
                    min.push(m);
                }
            }
            covers = min;
        }
        let mut out: Vec<Vec<usize>> =
            covers.into_iter().map(|m| (0..self.nvars).filter(|&k| m >> k & 1 == 1).collect()).collect();
        out.sort();
        out
    }

    /// Minimal primes of a squarefree ideal, erroring otherwise.
    pub fn minimal_primes_squarefree(&self) -> Result<Vec<Vec<usize>>, GbError> {
        if !self.is_squarefree() {
            return Err(GbError::NotSquarefree);
        }
        Ok(self.minimal_primes())
    }

    pub fn codim(&self) -> usize {
        self.minimal_primes().iter().map(|p| p.len()).min().unwrap_or(0)
    }

    /// Number of minimal primes of each size.
    pub fn codim_histogram(&self) -> Vec<(usize, usize)> {
        let mut h: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
        for p in self.minimal_primes() {
            *h.entry(p.len()).or_default() += 1;
        }
        h.into_iter().collect()
    }

    /// Length of the localization at the prime on `vars`: the number of
    /// standard monomials once the other variables are inverted.
    fn local_length(&self, vars: &[usize]) -> u64 {
        let local: Vec<Vec<u8>> = self.gens.iter().map(|g| vars.iter().map(|&k| g[k]).collect()).collect();
        let local = minimalize(local);
        fn count(gens: &[Vec<u8>], prefix: &mut Vec<u8>, k: usize, len: usize) -> u64 {
            if k == len {
                return if gens.iter().any(|g| divides(g, prefix)) { 0 } else { 1 };
            }
            let mut total = 0;
            let mut e = 0u8;
            loop {
                prefix.push(e);
                // a prefix is dead once some generator whose later exponents are zero divides it
                let dead = gens.iter().any(|g| g[k + 1..].iter().all(|&x| x == 0) && divides(&g[..=k], prefix));
                if dead {
                    prefix.pop();
                    break;
                }
                total += count(gens, prefix, k + 1, len);
                prefix.pop();
                e += 1;
            }
            total
        }
        count(&local, &mut Vec::new(), 0, vars.len())
    }

    /// `Σ_P mult_P · Π_{v∈P} w_v` over minimal primes of minimal size.
    pub fn multidegree(&self, weight: impl Fn(usize) -> MultiPoly, ring: &Arc<Ring>) -> MultiPoly {
        let primes = self.minimal_primes();
        let c = primes.iter().map(|p| p.len()).min().unwrap_or(0);
        let mut acc = MultiPoly::zero(ring);
        for p in primes.iter().filter(|p| p.len() == c) {
            let mult = self.local_length(p);
            let prod = p.iter().fold(MultiPoly::one(ring), |a, &k| &a * &weight(k));
            acc = &acc + &prod.scale(&Int::from(mult as i64));
        }
        if self.gens.is_empty() {
            return MultiPoly::one(ring);
        }
        acc
    }

    /// Numerator `Σ c_a t^a` of the fine Hilbert series of `S/I`, by the
    /// recursion `N(I) = N(I + ⟨x⟩) + t_x N(I : x)`.
    pub fn k_numerator(&self) -> Vec<(Vec<u8>, Int)> {
        let mut acc: FxHashMap<Vec<u8>, Int> = FxHashMap::default();
        let mut prefix = vec![0u8; self.nvars];
        k_rec(self.gens.clone(), &mut prefix, &mut acc);
        let mut out: Vec<(Vec<u8>, Int)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.sort();
        out
    }

    /// K-polynomial with each variable's `t` replaced by a Laurent monomial weight.
    pub fn k_polynomial(&self, weight: impl Fn(usize) -> Monomial, ring: &Arc<Ring>) -> MultiPoly {
        let w: Vec<Monomial> = (0..self.nvars).map(&weight).collect();
        let mut b = PolyBuilder::new(ring);
        for (a, c) in self.k_numerator() {
            let mut m = Monomial::one(ring.nvars());
            for (k, &e) in a.iter().enumerate() {
                for _ in 0..e {
                    m = m.mul(&w[k]);
                }
            }
            b.add_term(m, &c);
        }
        b.finish()
    }

    /// Coefficients of the coarse numerator in `q`, degree ascending.
    pub fn hilbert_numerator(&self) -> Vec<Int> {
        let mut out: Vec<Int> = Vec::new();
        for (a, c) in self.k_numerator() {
            let d: usize = a.iter().map(|&e| e as usize).sum();
            if out.len() <= d {
                out.resize(d + 1, Int::ZERO);
            }
            out[d] += &c;
        }
        while out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        out
    }
}

fn k_rec(gens: Vec<Vec<u8>>, prefix: &mut Vec<u8>, acc: &mut FxHashMap<Vec<u8>, Int>) {
    if gens.iter().any(|g| g.iter().all(|&e| e == 0)) {
        return;
    }
    let n = prefix.len();
    // count how many generators use each variable
    let mut uses = vec![0usize; n];
    for g in &gens {
        for (k, &e) in g.iter().enumerate() {
            if e > 0 {
                uses[k] += 1;
            }
        }
    }
    let pivot = (0..n).filter(|&k| uses[k] >= 2).max_by_key(|&k| (uses[k], std::cmp::Reverse(k)));
    let Some(x) = pivot else {
        // pairwise coprime: Π (1 − t^g)
        let mut terms: Vec<(Vec<u8>, i64)> = vec![(prefix.clone(), 1)];
        for g in &gens {
            let mut next = Vec::with_capacity(terms.len() * 2);
            for (m, s) in terms {
                let mg: Vec<u8> = m.iter().zip(g).map(|(a, b)| a + b).collect();
                next.push((m, s));
                next.push((mg, -s));
            }
            terms = next;
        }
        for (m, s) in terms {
            *acc.entry(m).or_insert(Int::ZERO) += &Int::from(s);
        }
        return;
    };
    // I + ⟨x⟩
    let mut unit = vec![0u8; n];
    unit[x] = 1;
    let mut plus: Vec<Vec<u8>> = gens.iter().filter(|g| g[x] == 0).cloned().collect();
    plus.push(unit);
    k_rec(minimalize(plus), prefix, acc);
    // t_x · (I : x)
    let colon: Vec<Vec<u8>> = gens
        .iter()
        .map(|g| {
            let mut h = g.clone();
            h[x] = h[x].saturating_sub(1);
            h
        })
        .collect();
    prefix[x] += 1;
    k_rec(minimalize(colon), prefix, acc);
    prefix[x] -= 1;
}

/// Which Laurent monomial `t_{ij}` stands for in the K-polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KConvention {
    /// `t_{ij} = x_j / y_i`.
    XOverY,
    /// `t_{ij} = y_i / x_j`.
    YOverX,
}

/// `z_{ij} ↦ x_j − y_i`.
pub fn z_weight(ring: &Arc<Ring>, v: Var) -> MultiPoly {
    match v {
        Var::Z(i, j) => &MultiPoly::var(ring, Var::X(j)) - &MultiPoly::var(ring, Var::Y(i)),
        _ => panic!("not a matrix variable"),
    }
}

/// The Laurent monomial for `z_{ij}` under `conv`.
pub fn z_k_weight(ring: &Arc<Ring>, v: Var, conv: KConvention) -> Monomial {
    let Var::Z(i, j) = v else { panic!("not a matrix variable") };
    let s = match conv {
        KConvention::XOverY => 1,
        KConvention::YOverX => -1,
    };
    MultiPoly::monomial(ring, &[(Var::X(j), s), (Var::Y(i), -s)], Int::ONE).terms()[0].0.clone()
}

/// Multidegree of `S/I` for a monomial ideal over `gb`'s `z` variables.
pub fn multidegree(gb: &GbRing, ideal: &MonomialIdeal, ring: &Arc<Ring>) -> MultiPoly {
    ideal.multidegree(|k| z_weight(ring, gb.var_of(k)), ring)
}

pub fn k_polynomial(gb: &GbRing, ideal: &MonomialIdeal, ring: &Arc<Ring>, conv: KConvention) -> MultiPoly {
    ideal.k_polynomial(|k| z_k_weight(ring, gb.var_of(k), conv), ring)
}

/// The tangent cone at the origin: a standard basis obtained by homogenizing
/// with an extra variable `u`, computing a Gröbner basis for the order
/// "degree, then larger power of `u`, then reverse lexicographic",
/// and setting `u = 1`. Returns the lowest forms of the standard basis and
/// its leading-monomial ideal in the chart variables.
pub struct TangentCone {
    pub ring: Arc<Ring>,
    pub variables: Vec<Var>,
    pub lowest_forms: Vec<MultiPoly>,
    pub leading: MonomialIdeal,
}

pub fn tangent_cone(gens: &[MultiPoly], variables: &[Var], budget: &Budget) -> Result<TangentCone, GbError> {
    let ring = gens.first().map(|g| g.ring().clone()).unwrap_or_else(|| Ring::z(1));
    if gens.iter().any(|g| !g.constant_term().is_zero()) {
        return Err(GbError::OriginNotOnVariety);
    }
    let nv = variables.len() + 1;
    // slot 0 is u; the chart variables follow
    let hom_var = Var::Z(0, 0);
    let mut pr = vec![hom_var];
    pr.extend_from_slice(variables);
    let mut u_weight = vec![0; nv];
    u_weight[0] = 1;
    let order = TermOrder { kind: OrderKind::Weighted(vec![vec![1; nv], u_weight]), priority: pr };
    let gb = GbRing::new(order)?;
    let slot: FxHashMap<Var, usize> = variables.iter().enumerate().map(|(k, v)| (*v, k + 1)).collect();
    let mut hom = Vec::with_capacity(gens.len());
    for f in gens {
        let top = f.total_degree().unwrap_or(0) as u8;
        let mut terms = Vec::with_capacity(f.len());
        for (m, c) in f.terms() {
            let mut exp: Exp = SmallVec::from_elem(0, nv);
            for (k, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    let v = ring.var(k);
                    exp[*slot.get(&v).ok_or_else(|| GbError::UnknownVariable(v.name(ring.n())))?] = e as u8;
                }
            }
            let d: u8 = exp.iter().sum();
            exp[0] = top - d;
            terms.push((gb.mon(&exp), c.clone()));
        }
        hom.push(gb.from_terms(terms));
    }
    let basis = gb.buchberger(&hom, budget)?;
    let mut lowest = Vec::new();
    let mut leads = Vec::new();
    let mut seen: FxHashSet<Vec<u8>> = FxHashSet::default();
    for g in &basis {
        let u_top = g.lm().exp[0];
        let mut b = PolyBuilder::new(&ring);
        for (m, c) in g.terms() {
            if m.exp[0] == u_top {
                let mut e = Monomial::one(ring.nvars());
                for (k, &x) in m.exp.iter().enumerate().skip(1) {
                    e.0[ring.index(gb.var_of(k)).expect("chart variable")] += x as i16;
                }
                b.add_term(e, c);
            }
        }
        lowest.push(b.finish());
        let lead: Vec<u8> = g.lm().exp[1..].to_vec();
        if seen.insert(lead.clone()) {
            leads.push(lead);
        }
    }
    Ok(TangentCone {
        ring,
        variables: variables.to_vec(),
        lowest_forms: lowest,
        leading: MonomialIdeal::new(variables.len(), leads),
    })
}

/// `N(q) / (1 − q)^k` as a polynomial, if exact.
pub fn divide_by_one_minus_q(mut num: Vec<Int>, k: usize) -> Result<Vec<Int>, GbError> {
    for _ in 0..k {
        // synthetic division by (1 − q): c_i = a_i + c_{i-1}
        let mut out = Vec::with_capacity(num.len());
        let mut run = Int::ZERO;
        for a in &num {
            run += a;
            out.push(run.clone());
        }
        if !run.is_zero() {
            return Err(GbError::NotDivisible(k));
        }
        out.pop();
        num = out;
    }
    while num.last().is_some_and(|c| c.is_zero()) {
        num.pop();
    }
    Ok(num)
}

/// An initial ideal together with how it was obtained.
#[derive(Clone, Debug)]
pub struct InitialIdeal {
    /// Whether the given generators were already a Gröbner basis.
    pub raw: GbCheck,
    pub leading: MonomialIdeal,
    /// Size of the basis the leading terms were read from.
    pub basis_len: usize,
}

/// `init(I)` for the order of `gb`: the lead terms of the generators when
/// they already form a Gröbner basis, otherwise those of a Buchberger run.
pub fn initial_ideal(gb: &GbRing, ideal: &IdealPresentation, budget: &Budget) -> Result<InitialIdeal, GbError> {
    let gens = ideal.generators.iter().map(|f| gb.import(f)).collect::<Result<Vec<_>, _>>()?;
    let raw = gb.is_groebner(&gens, budget)?;
    let basis = if raw == GbCheck::Groebner { gens } else { gb.buchberger(&gens, budget)? };
    Ok(InitialIdeal { raw, leading: gb.lead_ideal(&basis), basis_len: basis.len() })
}

/// A polynomial in one variable `q`, coefficients by ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HPolynomial(pub Vec<Int>);

impl HPolynomial {
    pub fn one() -> HPolynomial {
        HPolynomial(vec![Int::ONE])
    }

    pub fn coefficients(&self) -> &[Int] {
        &self.0
    }

    pub fn at_zero(&self) -> Int {
        self.0.first().cloned().unwrap_or(Int::ZERO)
    }

    /// `H(1)`, the Hilbert–Samuel multiplicity.
    pub fn multiplicity(&self) -> Int {
        self.0.iter().fold(Int::ZERO, |acc, c| &acc + c)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative())
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }
}

impl std::fmt::Display for HPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (d, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let show = d == 0 || !abs.is_one();
            match d {
                0 => write!(f, "{abs}")?,
                1 if show => write!(f, "{abs}q")?,
                1 => write!(f, "q")?,
                _ if show => write!(f, "{abs}q^{d}")?,
                _ => write!(f, "q^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `H_{β,γ}(q)`: the Hilbert series of the tangent cone of the patch
/// `Y_γ ∩ M_{n,β}` at the origin is `H / (1 − q)^{dim Y_γ}`.
pub fn h_polynomial(gamma: &Clan, beta: &Clan, budget: &Budget) -> Result<HPolynomial, GbError> {
    let ideal = patch_ideal(gamma, beta)?;
    let nonzero: Vec<MultiPoly> = ideal.generators.iter().filter(|g| !g.is_zero()).cloned().collect();
    let cone = tangent_cone(&nonzero, &ideal.variables, budget)?;
    let codim = ideal.variables.len().checked_sub(gamma.dimension()).ok_or(GbError::NotDivisible(0))?;
    Ok(HPolynomial(divide_by_one_minus_q(cone.leading.hilbert_numerator(), codim)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(i: u16, j: u16) -> Var {
        Var::Z(i, j)
    }

    #[test]
    fn trivial_bases() {
        let ring = Ring::z(2);
        let gb = GbRing::new(TermOrder::lex(ring.vars().to_vec())).unwrap();
        let x = gb.import(&MultiPoly::var(&ring, z(1, 1))).unwrap();
        let b = gb.buchberger(&[x.clone()], &Budget::default()).unwrap();
        assert_eq!(b, vec![x.clone()]);
        assert_eq!(gb.is_groebner(&[x], &Budget::default()).unwrap(), GbCheck::Groebner);
    }

    #[test]
    fn textbook_example() {
        // x^2 - y, xy - 1 in lex x > y gives {x - y^2, y^3 - 1}
        let ring = Ring::z(2);
        let gb = GbRing::new(TermOrder::lex(vec![z(1, 1), z(1, 2)])).unwrap();
        let f = |s: &str| gb.import(&MultiPoly::parse(&ring, s).unwrap()).unwrap();
        let gens = [f("z11^2 - z12"), f("z11 z12 - 1")];
        assert!(matches!(gb.is_groebner(&gens, &Budget::default()).unwrap(), GbCheck::Witness { .. }));
        let b = gb.buchberger(&gens, &Budget::default()).unwrap();
        let got: Vec<String> = b.iter().map(|p| gb.export(p, &ring).to_string()).collect();
        let want: Vec<String> = ["z11 - z12^2", "z12^3 - 1"]
            .iter()
            .map(|s| MultiPoly::parse(&ring, s).unwrap().to_string())
            .collect();
        assert_eq!(got, want);
        let tiny = Budget { max_pairs: 0, ..Budget::default() };
        assert!(matches!(gb.buchberger(&gens, &tiny), Err(GbError::BudgetExceeded { .. })));
    }

    #[test]
    fn grevlex_cyclic3_basis_is_consistent() {
        let ring = Ring::z(2);
        let vars = vec![z(1, 1), z(1, 2), z(2, 1)];
        let gb = GbRing::new(TermOrder::grevlex(vars)).unwrap();
        let f = |s: &str| gb.import(&MultiPoly::parse(&ring, s).unwrap()).unwrap();
        let gens = [f("z11 + z12 + z21"), f("z11 z12 + z12 z21 + z21 z11"), f("z11 z12 z21 - 1")];
        let b = gb.buchberger(&gens, &Budget::default()).unwrap();
        assert_eq!(gb.is_groebner(&b, &Budget::default()).unwrap(), GbCheck::Groebner);
        for g in &gens {
            assert!(gb.reduce(g, &b).is_zero());
        }
        // z21^3 - 1 is in the ideal
        assert!(gb.reduce(&f("z21^3 - 1"), &b).is_zero());
        assert!(!gb.reduce(&f("z21 - 1"), &b).is_zero());
    }

    #[test]
    fn clan_order_priority() {
        let o = TermOrder::clan_order(2, 2);
        assert_eq!(&o.priority[..5], &[z(4, 1), z(4, 2), z(4, 3), z(4, 4), z(3, 1)]);
        assert_eq!(o.priority[8], z(1, 1));
        assert_eq!(o.priority[15], z(2, 4));
    }

    #[test]
    fn monomial_ideal_basics() {
        // ⟨xy⟩ → {x}, {y}
        let i = MonomialIdeal::new(2, vec![vec![1, 1]]);
        assert_eq!(i.minimal_primes(), vec![vec![0], vec![1]]);
        let r = Ring::z(1);
        let x = MonomialIdeal::new(1, vec![vec![1]]);
        let gb = GbRing::new(TermOrder::lex(vec![z(1, 1)])).unwrap();
        let xr = Ring::xyb(1);
        assert_eq!(multidegree(&gb, &x, &xr), MultiPoly::parse(&xr, "x1 - y1").unwrap());
        assert_eq!(k_polynomial(&gb, &x, &xr, KConvention::XOverY), MultiPoly::parse(&xr, "1 - x1 y1^-1").unwrap());
        let zero = MonomialIdeal::new(1, vec![]);
        assert!(k_polynomial(&gb, &zero, &xr, KConvention::XOverY).is_one());
        assert!(multidegree(&gb, &zero, &xr).is_one());
        let _ = r;
        // ⟨x^2⟩ has multiplicity 2
        let sq = MonomialIdeal::new(1, vec![vec![2]]);
        assert!(!sq.is_squarefree());
        assert!(sq.minimal_primes_squarefree().is_err());
        assert_eq!(multidegree(&gb, &sq, &xr), MultiPoly::parse(&xr, "2 x1 - 2 y1").unwrap());
        assert_eq!(sq.hilbert_numerator(), vec![Int::ONE, Int::ZERO, Int::from(-1)]);
    }

    // Brute-force Hilbert function of S/I in low degrees.
    fn hilbert_function(i: &MonomialIdeal, d: usize) -> usize {
        fn go(n: usize, k: usize, left: usize, cur: &mut Vec<u8>, i: &MonomialIdeal, acc: &mut usize) {
            if k == n - 1 {
                cur.push(left as u8);
                if !i.generators().iter().any(|g| divides(g, cur)) {
                    *acc += 1;
                }
                cur.pop();
                return;
            }
            for e in 0..=left {
                cur.push(e as u8);
                go(n, k + 1, left - e, cur, i, acc);
                cur.pop();
            }
        }
        let mut acc = 0;
        go(i.nvars(), 0, d, &mut Vec::new(), i, &mut acc);
        acc
    }

    #[test]
    fn k_numerator_matches_hilbert_function() {
        let ideals = [
            MonomialIdeal::new(3, vec![vec![1, 1, 0], vec![0, 1, 1]]),
            MonomialIdeal::new(3, vec![vec![2, 0, 0], vec![1, 1, 0], vec![0, 0, 3]]),
            MonomialIdeal::new(4, vec![vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1], vec![1, 0, 0, 1]]),
        ];
        for i in &ideals {
            let num = i.hilbert_numerator();
            // series of N(q)/(1-q)^n
            let n = i.nvars();
            for d in 0..8usize {
                let mut coef = Int::ZERO;
                for (k, c) in num.iter().enumerate() {
                    if k <= d {
                        let m = d - k;
                        // C(m + n - 1, n - 1)
                        let b = (1..n).fold(1i64, |acc, t| acc * (m + t) as i64 / t as i64);
                        coef = &coef + &(c * &Int::from(b));
                    }
                }
                assert_eq!(coef, Int::from(hilbert_function(i, d) as i64), "{i:?} degree {d}");
            }
        }
    }

    #[test]
    fn division_by_one_minus_q() {
        // (1 - q^2) / (1 - q) = 1 + q
        let num = vec![Int::ONE, Int::ZERO, Int::from(-1)];
        assert_eq!(divide_by_one_minus_q(num.clone(), 1).unwrap(), vec![Int::ONE, Int::ONE]);
        assert!(divide_by_one_minus_q(num, 2).is_err());
    }

    #[test]
    fn tangent_cone_of_a_node() {
        // y^2 = x^2 + x^3 has tangent cone y^2 - x^2 and H = 1 + q
        let ring = Ring::z(2);
        let vars = [z(1, 1), z(1, 2)];
        let f = MultiPoly::parse(&ring, "z12^2 - z11^2 - z11^3").unwrap();
        let tc = tangent_cone(&[f], &vars, &Budget::default()).unwrap();
        assert_eq!(tc.lowest_forms.len(), 1);
        let want = MultiPoly::parse(&ring, "z12^2 - z11^2").unwrap();
        assert!(tc.lowest_forms[0] == want || tc.lowest_forms[0] == -&want);
        let h = divide_by_one_minus_q(tc.leading.hilbert_numerator(), 1).unwrap();
        assert_eq!(h, vec![Int::ONE, Int::ONE]);
        // a cusp y^2 = x^3 has multiplicity 2 as well
        let g = MultiPoly::parse(&ring, "z12^2 - z11^3").unwrap();
        let tc = tangent_cone(&[g], &vars, &Budget::default()).unwrap();
        let h = divide_by_one_minus_q(tc.leading.hilbert_numerator(), 1).unwrap();
        assert_eq!(h, vec![Int::ONE, Int::ONE]);
        // the lowest forms x, xy of the generators miss y^3 in the cone
        let gens = [MultiPoly::parse(&ring, "z11 - z12^2").unwrap(), MultiPoly::parse(&ring, "z11 z12").unwrap()];
        let tc = tangent_cone(&gens, &vars, &Budget::default()).unwrap();
        let h = divide_by_one_minus_q(tc.leading.hilbert_numerator(), 2).unwrap();
        assert_eq!(h, vec![Int::ONE, Int::ONE, Int::ONE]);
        assert!(tangent_cone(&[MultiPoly::parse(&ring, "z11 + 1").unwrap()], &vars, &Budget::default()).is_err());
    }
}
