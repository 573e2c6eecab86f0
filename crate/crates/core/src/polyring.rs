//! Exact sparse polynomials in the x, y, β and z variables.
//!
//! A [`Ring`] fixes the variable universe; every [`MultiPoly`] carries the
//! ring it lives in. Exponents of `y` variables may be negative (Laurent),
//! the others are kept non-negative. Coefficients are exact integers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use thiserror::Error;

use crate::int::Int;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(u16),
    Y(u16),
    Beta,
    Z(u16, u16),
}

impl Var {
    /// Only the equivariant `y` parameters may carry negative exponents.
    pub fn is_laurent(self) -> bool {
        matches!(self, Var::Y(_))
    }

    pub fn name(self, n: usize) -> String {
        match self {
            Var::X(i) => format!("x{i}"),
            Var::Y(j) => format!("y{j}"),
            Var::Beta => "b".to_string(),
            Var::Z(i, j) if n <= 9 => format!("z{i}{j}"),
            Var::Z(i, j) => format!("z{i}_{j}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("negative exponent produced for non-Laurent variable {0}")]
    NegativeExponent(String),
    #[error("substitution for {0} does not stay inside the Laurent ring")]
    NotLaurent(String),
    #[error("division is not exact")]
    InexactDivision,
    #[error("division by zero")]
    DivisionByZero,
}

/// Variable universe for a family of polynomials.
#[derive(Debug, PartialEq, Eq)]
pub struct Ring {
    n: usize,
    vars: Vec<Var>,
    index: FxHashMap<Var, usize>,
}

impl Ring {
    pub fn new(n: usize, vars: Vec<Var>) -> Arc<Ring> {
        let index = vars.iter().enumerate().map(|(k, v)| (*v, k)).collect();
        Arc::new(Ring { n, vars, index })
    }

    /// `x_1..x_n, y_1..y_n, β`.
    pub fn xyb(n: usize) -> Arc<Ring> {
        let mut vars: Vec<Var> = (1..=n as u16).map(Var::X).collect();
        vars.extend((1..=n as u16).map(Var::Y));
        vars.push(Var::Beta);
        Ring::new(n, vars)
    }

    /// Matrix-entry variables `z_{ij}`, row-major.
    pub fn z(n: usize) -> Arc<Ring> {
        let mut vars = Vec::with_capacity(n * n);
        for i in 1..=n as u16 {
            for j in 1..=n as u16 {
                vars.push(Var::Z(i, j));
            }
        }
        Ring::new(n, vars)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var(&self, k: usize) -> Var {
        self.vars[k]
    }

    pub fn index(&self, v: Var) -> Option<usize> {
        self.index.get(&v).copied()
    }

    fn idx(&self, v: Var) -> usize {
        match self.index(v) {
            Some(k) => k,
            None => panic!("variable {} not in ring", v.name(self.n)),
        }
    }

    fn lookup_name(&self, name: &str) -> Option<Var> {
        self.vars.iter().copied().find(|v| v.name(self.n) == name)
    }
}

/// Exponent vector indexed by ring variable position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub SmallVec<[i16; 16]>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn exps(&self) -> &[i16] {
        &self.0
    }

    pub fn degree(&self) -> i32 {
        self.0.iter().map(|&e| e as i32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// Graded reverse-lexicographic comparison used for printing.
fn grevlex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    match a.degree().cmp(&b.degree()) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.0.iter().zip(b.0.iter()).rev() {
        if x != y {
            // smaller trailing exponent wins
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

#[derive(Clone)]
pub struct MultiPoly {
    ring: Arc<Ring>,
    /// Strictly increasing in `Monomial` order, no zero coefficients.
    terms: Vec<(Monomial, Int)>,
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &MultiPoly) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

fn same_ring(a: &Arc<Ring>, b: &Arc<Ring>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Accumulates terms, then sorts and combines equal monomials.
pub struct PolyBuilder {
    ring: Arc<Ring>,
    acc: Vec<(Monomial, Int)>,
    compacted: usize,
}

impl PolyBuilder {
    pub fn new(ring: &Arc<Ring>) -> PolyBuilder {
        PolyBuilder { ring: ring.clone(), acc: Vec::new(), compacted: 0 }
    }

    pub fn with_capacity(ring: &Arc<Ring>, cap: usize) -> PolyBuilder {
        PolyBuilder { ring: ring.clone(), acc: Vec::with_capacity(cap), compacted: 0 }
    }

    fn push(&mut self, m: Monomial, c: Int) {
        self.acc.push((m, c));
        if self.acc.len() >= 2 * self.compacted + (1 << 20) {
            self.compact();
        }
    }

    fn compact(&mut self) {
        let mut v = std::mem::take(&mut self.acc);
        v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Monomial, Int)> = Vec::with_capacity(v.len());
        for (m, c) in v {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += &c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if out.last().is_some_and(|t| t.1.is_zero()) {
            out.pop();
        }
        self.compacted = out.len();
        self.acc = out;
    }

    pub fn add_term(&mut self, m: Monomial, c: &Int) {
        if !c.is_zero() {
            self.push(m, c.clone());
        }
    }

    fn add_mul_term(&mut self, m: Monomial, a: &Int, b: &Int) {
        self.push(m, a * b);
    }

    pub fn add_poly(&mut self, p: &MultiPoly, scale: &Int) {
        for (m, c) in &p.terms {
            self.add_mul_term(m.clone(), c, scale);
        }
    }

    pub fn finish(mut self) -> MultiPoly {
        self.compact();
        MultiPoly { ring: self.ring, terms: self.acc }
    }
}

impl MultiPoly {
    pub fn zero(ring: &Arc<Ring>) -> MultiPoly {
        MultiPoly { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn constant(ring: &Arc<Ring>, c: Int) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(ring);
        }
        MultiPoly { ring: ring.clone(), terms: vec![(Monomial::one(ring.nvars()), c)] }
    }

    pub fn one(ring: &Arc<Ring>) -> MultiPoly {
        MultiPoly::constant(ring, Int::ONE)
    }

    pub fn var(ring: &Arc<Ring>, v: Var) -> MultiPoly {
        MultiPoly::monomial(ring, &[(v, 1)], Int::ONE)
    }

    pub fn monomial(ring: &Arc<Ring>, powers: &[(Var, i16)], c: Int) -> MultiPoly {
        let mut m = Monomial::one(ring.nvars());
        for (v, e) in powers {
            m.0[ring.idx(*v)] += e;
        }
        if c.is_zero() {
            return MultiPoly::zero(ring);
        }
        MultiPoly { ring: ring.clone(), terms: vec![(m, c)] }
    }

    /// Builds from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (Monomial, Int)>) -> MultiPoly {
        let mut b = PolyBuilder::new(ring);
        for (m, c) in terms {
            b.add_term(m, &c);
        }
        b.finish()
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, Int)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// Constant term, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Int> {
        match self.terms.as_slice() {
            [] => Some(Int::ZERO),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Int {
        self.terms
            .iter()
            .find(|(m, _)| m.is_one())
            .map(|(_, c)| c.clone())
            .unwrap_or(Int::ZERO)
    }

    fn check_ring(&self, other: &MultiPoly) {
        assert!(same_ring(&self.ring, &other.ring), "{}", PolyError::RingMismatch);
    }

    pub fn scale(&self, c: &Int) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Int) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        // multiplying by a monomial preserves the lex order of terms
        MultiPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect() }
    }

    fn merge(&self, other: &MultiPoly, negate_other: bool) -> MultiPoly {
        self.check_ring(other);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if negate_other { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        for t in &b[j..] {
            let c = if negate_other { -&t.1 } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        MultiPoly { ring: self.ring.clone(), terms: out }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut result = MultiPoly::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Largest exponent of `v` (may be negative for Laurent variables).
    pub fn degree_in(&self, v: Var) -> Option<i16> {
        let k = self.ring.index(v)?;
        self.terms.iter().map(|(m, _)| m.0[k]).max()
    }

    /// Total degree in the `x` variables.
    pub fn x_degree(&self) -> Option<i32> {
        let xs: Vec<usize> = self.indices_where(|v| matches!(v, Var::X(_)));
        self.terms.iter().map(|(m, _)| xs.iter().map(|&k| m.0[k] as i32).sum()).max()
    }

    pub fn total_degree(&self) -> Option<i32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn min_total_degree(&self) -> Option<i32> {
        self.terms.iter().map(|(m, _)| m.degree()).min()
    }

    fn indices_where(&self, pred: impl Fn(Var) -> bool) -> Vec<usize> {
        (0..self.ring.nvars()).filter(|&k| pred(self.ring.var(k))).collect()
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.iter().all(|(_, c)| !c.is_negative())
    }

    /// Drops every term involving one of `vars` (sets them to zero).
    pub fn set_zero(&self, pred: impl Fn(Var) -> bool) -> MultiPoly {
        let ks = self.indices_where(pred);
        let terms = self.terms.iter().filter(|(m, _)| ks.iter().all(|&k| m.0[k] == 0)).cloned().collect();
        MultiPoly { ring: self.ring.clone(), terms }
    }

    /// Replaces each variable selected by `pred` by the integer `value`.
    pub fn specialize(&self, pred: impl Fn(Var) -> bool, value: &Int) -> MultiPoly {
        let ks = self.indices_where(pred);
        let mut b = PolyBuilder::with_capacity(&self.ring, self.terms.len());
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let mut coeff = c.clone();
            for &k in &ks {
                let e = m2.0[k];
                assert!(e >= 0 || value.is_one() || (value == &Int::from(-1)), "cannot specialize a negative power");
                coeff = &coeff * &value.pow(e.unsigned_abs() as u32);
                m2.0[k] = 0;
            }
            b.add_term(m2, &coeff);
        }
        b.finish()
    }

    /// Moves each exponent at position `k` to position `target(k)`.
    pub fn rename(&self, target: impl Fn(usize) -> usize) -> MultiPoly {
        let n = self.ring.nvars();
        let map: Vec<usize> = (0..n).map(&target).collect();
        let mut b = PolyBuilder::with_capacity(&self.ring, self.terms.len());
        for (m, c) in &self.terms {
            let mut out = Monomial::one(n);
            for (k, &e) in m.0.iter().enumerate() {
                out.0[map[k]] += e;
            }
            b.add_term(out, c);
        }
        b.finish()
    }

    /// `y_j ↦ y_{n+1-j}`.
    pub fn reverse_y(&self) -> MultiPoly {
        let ring = self.ring.clone();
        let n = ring.n() as u16;
        self.rename(|k| match ring.var(k) {
            Var::Y(j) => ring.idx(Var::Y(n + 1 - j)),
            _ => k,
        })
    }

    /// Localization `x_i ↦ y_{σ(i)}`; `sigma` is one-line notation, 1-based.
    pub fn evaluate_x_at_y_perm(&self, sigma: &[u8]) -> MultiPoly {
        let ring = self.ring.clone();
        self.rename(|k| match ring.var(k) {
            Var::X(i) => ring.idx(Var::Y(sigma[i as usize - 1] as u16)),
            _ => k,
        })
    }

    /// The divided difference `(f - s_i f) / (x_i - x_{i+1})`, evaluated term by term.
    pub fn divided_difference(&self, i: usize) -> MultiPoly {
        let a_idx = self.ring.idx(Var::X(i as u16));
        let b_idx = self.ring.idx(Var::X(i as u16 + 1));
        let mut out = PolyBuilder::with_capacity(&self.ring, self.terms.len());
        for (m, c) in &self.terms {
            let (a, b) = (m.0[a_idx], m.0[b_idx]);
            assert!(a >= 0 && b >= 0, "divided difference needs polynomial x-dependence");
            if a == b {
                continue;
            }
            // x^a y^b - x^b y^a = (x - y) * sum_{k} x^{hi-1-k} y^{lo+k}
            let (hi, lo, sign) = if a > b { (a, b, c.clone()) } else { (b, a, -c) };
            for k in 0..(hi - lo) {
                let mut m2 = m.clone();
                m2.0[a_idx] = hi - 1 - k;
                m2.0[b_idx] = lo + k;
                out.add_term(m2, &sign);
            }
        }
        out.finish()
    }

    /// `∂_i((1 - β x_{i+1}) f)`; requires `β` in the ring.
    pub fn beta_divided_difference(&self, i: usize) -> MultiPoly {
        let ring = &self.ring;
        let shift = MultiPoly::monomial(ring, &[(Var::Beta, 1), (Var::X(i as u16 + 1), 1)], Int::ONE);
        let g = self - &(&shift * self);
        g.divided_difference(i)
    }

    /// Digest of the canonical term list, stable for a given build.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = rustc_hash::FxHasher::default();
        self.terms.hash(&mut h);
        h.finish()
    }

    /// Simultaneous substitution `v ↦ image` for each rule.
    ///
    /// Negative powers of a variable are only allowed when its image is a
    /// unit monomial; anything else would leave the Laurent ring.
    pub fn substitute(&self, rules: &[(Var, MultiPoly)]) -> Result<MultiPoly, PolyError> {
        let ring = &self.ring;
        let n = ring.nvars();
        let mut slots: Vec<Option<usize>> = vec![None; n];
        for (r, (v, img)) in rules.iter().enumerate() {
            if !same_ring(ring, &img.ring) {
                return Err(PolyError::RingMismatch);
            }
            let k = ring.index(*v).ok_or_else(|| PolyError::UnknownVariable(format!("{v:?}")))?;
            slots[k] = Some(r);
        }
        let mut inverses: Vec<Option<MultiPoly>> = vec![None; rules.len()];
        for (r, (_, img)) in rules.iter().enumerate() {
            if let [(m, c)] = img.terms.as_slice() {
                if c.is_one() || c == &Int::from(-1) {
                    let inv = Monomial(m.0.iter().map(|e| -e).collect());
                    inverses[r] = Some(MultiPoly { ring: ring.clone(), terms: vec![(inv, c.clone())] });
                }
            }
        }
        let mut powers: FxHashMap<(usize, i16), MultiPoly> = FxHashMap::default();
        // each image only touches its own variable: go one variable at a time
        let separable = rules.iter().enumerate().all(|(r, (_, img))| {
            img.terms.iter().all(|(m, _)| m.0.iter().enumerate().all(|(k, &e)| e == 0 || slots[k].is_none() || slots[k] == Some(r)))
        });
        if separable {
            let mut cur = self.clone();
            for k in 0..n {
                let Some(r) = slots[k] else { continue };
                let mut out = PolyBuilder::with_capacity(ring, cur.terms.len());
                for (m, c) in &cur.terms {
                    let e = m.0[k];
                    if e == 0 {
                        out.add_term(m.clone(), c);
                        continue;
                    }
                    let mut rest = m.clone();
                    rest.0[k] = 0;
                    let p = match powers.entry((r, e)) {
                        std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
                        std::collections::hash_map::Entry::Vacant(v) => v.insert(if e > 0 {
                            rules[r].1.pow(e as u32)
                        } else {
                            match &inverses[r] {
                                Some(inv) => inv.pow((-e) as u32),
                                None => return Err(PolyError::NotLaurent(ring.var(k).name(ring.n()))),
                            }
                        }),
                    };
                    for (fm, fc) in &p.terms {
                        out.add_term(fm.mul(&rest), &(fc * c));
                    }
                }
                cur = out.finish();
            }
            cur.check_exponents()?;
            return Ok(cur);
        }
        let mut out = PolyBuilder::with_capacity(ring, self.terms.len());
        for (m, c) in &self.terms {
            let mut rest = m.clone();
            let mut factor = MultiPoly::constant(ring, c.clone());
            for k in 0..n {
                let Some(r) = slots[k] else { continue };
                let e = m.0[k];
                if e == 0 {
                    continue;
                }
                rest.0[k] = 0;
                if !powers.contains_key(&(r, e)) {
                    let p = if e > 0 {
                        rules[r].1.pow(e as u32)
                    } else {
                        match &inverses[r] {
                            Some(inv) => inv.pow((-e) as u32),
                            None => return Err(PolyError::NotLaurent(ring.var(k).name(ring.n()))),
                        }
                    };
                    powers.insert((r, e), p);
                }
                factor = &factor * &powers[&(r, e)];
            }
            for (fm, fc) in &factor.terms {
                out.add_term(fm.mul(&rest), fc);
            }
        }
        let result = out.finish();
        result.check_exponents()?;
        Ok(result)
    }

    fn check_exponents(&self) -> Result<(), PolyError> {
        for (m, _) in &self.terms {
            for (k, &e) in m.0.iter().enumerate() {
                let v = self.ring.var(k);
                if e < 0 && !v.is_laurent() {
                    return Err(PolyError::NegativeExponent(v.name(self.ring.n())));
                }
            }
        }
        Ok(())
    }

    /// Evaluates variables through `value`; unmapped variables stay symbolic.
    pub fn evaluate(&self, value: impl Fn(Var) -> Option<Int>) -> MultiPoly {
        let n = self.ring.nvars();
        let vals: Vec<Option<Int>> = (0..n).map(|k| value(self.ring.var(k))).collect();
        let mut b = PolyBuilder::with_capacity(&self.ring, self.terms.len());
        for (m, c) in &self.terms {
            let mut m2 = m.clone();
            let mut coeff = c.clone();
            for k in 0..n {
                if let Some(v) = &vals[k] {
                    let e = m.0[k];
                    if e != 0 {
                        assert!(e > 0, "cannot evaluate a negative power");
                        coeff = &coeff * &v.pow(e as u32);
                        m2.0[k] = 0;
                    }
                }
            }
            b.add_term(m2, &coeff);
        }
        b.finish()
    }

    /// Exact quotient `self / g` in the (Laurent) polynomial ring.
    pub fn div_exact(&self, g: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_ring(g);
        if g.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(MultiPoly::zero(&self.ring));
        }
        let n = self.ring.nvars();
        // Lowest exponents add under multiplication, so shifting both sides
        // to have minimum exponent zero turns this into polynomial division.
        let min_of = |p: &MultiPoly| -> Monomial {
            let mut mn = p.terms[0].0.clone();
            for (m, _) in &p.terms[1..] {
                for k in 0..n {
                    mn.0[k] = mn.0[k].min(m.0[k]);
                }
            }
            mn
        };
        let (fa, gb) = (min_of(self), min_of(g));
        let neg = |m: &Monomial| Monomial(m.0.iter().map(|e| -e).collect());
        let f = self.mul_monomial(&neg(&fa), &Int::ONE);
        let g0 = g.mul_monomial(&neg(&gb), &Int::ONE);
        let (glm, glc) = g0.terms.last().cloned().expect("nonzero");
        let mut r = f;
        let mut q = PolyBuilder::new(&self.ring);
        while let Some((rlm, rlc)) = r.terms.last().cloned() {
            let qm = Monomial(rlm.0.iter().zip(glm.0.iter()).map(|(a, b)| a - b).collect());
            if qm.0.iter().any(|&e| e < 0) {
                return Err(PolyError::InexactDivision);
            }
            let qc = rlc.div_exact(&glc).ok_or(PolyError::InexactDivision)?;
            r = &r - &g0.mul_monomial(&qm, &qc);
            q.add_term(qm, &qc);
        }
        let shift = Monomial(fa.0.iter().zip(gb.0.iter()).map(|(a, b)| a - b).collect());
        let quotient = q.finish().mul_monomial(&shift, &Int::ONE);
        quotient.check_exponents().map_err(|_| PolyError::InexactDivision)?;
        Ok(quotient)
    }

    /// Splits `self = Σ_κ c_κ · v^κ` where `v` ranges over the variables
    /// selected by `pred`; keys are the exponent vectors on those variables.
    pub fn coefficients_in(&self, pred: impl Fn(Var) -> bool) -> BTreeMap<Vec<i16>, MultiPoly> {
        let ks = self.indices_where(&pred);
        let mut groups: BTreeMap<Vec<i16>, Vec<(Monomial, Int)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<i16> = ks.iter().map(|&k| m.0[k]).collect();
            let mut rest = m.clone();
            for &k in &ks {
                rest.0[k] = 0;
            }
            groups.entry(key).or_default().push((rest, c.clone()));
        }
        groups.into_iter().map(|(k, ts)| (k, MultiPoly::from_terms(&self.ring, ts))).collect()
    }

    /// Terms in printing order: graded reverse-lex, largest first.
    pub fn canonical_terms(&self) -> Vec<&(Monomial, Int)> {
        let mut ts: Vec<&(Monomial, Int)> = self.terms.iter().collect();
        ts.sort_by(|a, b| grevlex_cmp(&b.0, &a.0));
        ts
    }

    pub fn parse(ring: &Arc<Ring>, text: &str) -> Result<MultiPoly, PolyError> {
        Parser { ring, src: text.as_bytes(), pos: 0 }.parse_all()
    }

    fn fmt_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (k, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = self.ring.var(k).name(self.ring.n());
            if e == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (m, c)) in self.canonical_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if pos == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", self.fmt_monomial(m))?;
            } else {
                write!(f, "{abs}*{}", self.fmt_monomial(m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.merge(rhs, false)
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.merge(rhs, true)
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_ring(rhs);
        if self.is_zero() || rhs.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return rhs.mul_monomial(m, c);
        }
        if rhs.terms.len() == 1 {
            let (m, c) = &rhs.terms[0];
            return self.mul_monomial(m, c);
        }
        let mut b = PolyBuilder::with_capacity(&self.ring, self.terms.len().max(rhs.terms.len()) * 2);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                b.add_mul_term(ma.mul(mb), ca, cb);
            }
        }
        b.finish()
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&Int::from(-1))
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

/// Recursive-descent parser; juxtaposition means multiplication.
struct Parser<'a> {
    ring: &'a Arc<Ring>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, PolyError> {
        Err(PolyError::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<MultiPoly, PolyError> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return self.err("trailing input");
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = MultiPoly::zero(self.ring);
        let mut sign = 1;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                sign = -1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() || c >= 0x80 => {
                    let f = self.power()?;
                    acc = &acc * &f;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let neg = if self.src.get(self.pos) == Some(&b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = self.integer()?;
            let e: u32 = e.to_i64().and_then(|v| u32::try_from(v).ok()).ok_or(PolyError::Parse {
                pos: self.pos,
                msg: "exponent too large".into(),
            })?;
            if neg {
                let inv = MultiPoly::one(self.ring).div_exact(&base).map_err(|_| PolyError::Parse {
                    pos: self.pos,
                    msg: "negative power of a non-monomial".into(),
                })?;
                return Ok(inv.pow(e));
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<Int, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let big: num_bigint::BigInt = s.parse().expect("digits");
        Ok(Int::from(big))
    }

    fn atom(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(MultiPoly::constant(self.ring, v))
            }
            Some(c) if c.is_ascii_alphabetic() || c >= 0x80 => {
                let start = self.pos;
                let rest = &self.src[start..];
                if rest.starts_with(b"beta") {
                    self.pos += 4;
                } else if rest.starts_with("β".as_bytes()) {
                    self.pos += "β".len();
                } else {
                    // one letter, then an index such as `12`, `_3` or `_{2,1}`
                    self.pos += 1;
                    while self.pos < self.src.len() {
                        let c = self.src[self.pos];
                        if c.is_ascii_digit() || c == b'_' || c == b'{' || c == b'}' || c == b',' && self.in_braces(start) {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                let raw = std::str::from_utf8(&self.src[start..self.pos]).map_err(|_| PolyError::Parse {
                    pos: start,
                    msg: "invalid utf-8".into(),
                })?;
                let v = self.resolve(raw).ok_or_else(|| PolyError::UnknownVariable(raw.to_string()))?;
                Ok(MultiPoly::var(self.ring, v))
            }
            _ => self.err("expected a factor"),
        }
    }

    fn in_braces(&self, start: usize) -> bool {
        let s = &self.src[start..self.pos];
        s.iter().filter(|&&c| c == b'{').count() > s.iter().filter(|&&c| c == b'}').count()
    }

    fn resolve(&self, raw: &str) -> Option<Var> {
        if matches!(raw, "b" | "beta" | "β") {
            return Some(Var::Beta).filter(|v| self.ring.index(*v).is_some());
        }
        if let Some(v) = self.ring.lookup_name(raw) {
            return Some(v);
        }
        // `x_1`, `y_{12}`, `z_{3,1}`, `z_3_1`
        let cleaned: String = raw.chars().filter(|c| *c != '{' && *c != '}').collect();
        let (head, tail) = cleaned.split_at(1);
        let tail = tail.trim_start_matches('_');
        let nums: Vec<u16> = tail.split([',', '_']).filter(|s| !s.is_empty()).map(|s| s.parse().ok()).collect::<Option<_>>()?;
        let v = match (head, nums.as_slice()) {
            ("x", [i]) => Var::X(*i),
            ("y", [j]) => Var::Y(*j),
            ("z", [i, j]) => Var::Z(*i, *j),
            _ => return None,
        };
        self.ring.index(v).map(|_| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(ring: &Arc<Ring>, s: &str) -> MultiPoly {
        MultiPoly::parse(ring, s).unwrap()
    }

    #[test]
    fn ring_basics() {
        let r = Ring::xyb(3);
        let f = p(&r, "x1 - y1");
        let g = p(&r, "x1 + y1");
        assert_eq!(&f * &g, p(&r, "x1^2 - y1^2"));
        assert_eq!(&f + &MultiPoly::zero(&r), f);
        assert_eq!(p(&r, "(x1 + x2)^3 - x1^3"), p(&r, "3x1^2 x2 + 3 x1 x2^2 + x2^3"));
    }

    #[test]
    fn display_is_canonical() {
        let r = Ring::xyb(2);
        let f = p(&r, "y1 - x1 + 2*x1^2*x2 - 3");
        assert_eq!(f.to_string(), "2*x1^2*x2 - x1 + y1 - 3");
        assert_eq!(p(&r, &f.to_string()), f);
        assert_eq!(p(&r, "y1^-1 - 1").to_string(), "-1 + y1^-1");
        assert_eq!(MultiPoly::zero(&r).to_string(), "0");
        assert_eq!(p(&r, "b x_1 y_{2}"), p(&r, "beta*x1*y2"));
    }

    #[test]
    fn divided_difference_examples() {
        let r = Ring::xyb(3);
        assert_eq!(p(&r, "x1").divided_difference(1), MultiPoly::one(&r));
        assert!(p(&r, "x1*x2").divided_difference(1).is_zero());
        assert_eq!(p(&r, "x1^2").divided_difference(1), p(&r, "x1 + x2"));
        assert_eq!(p(&r, "x2^3 y1").divided_difference(1), p(&r, "-(x1^2 + x1 x2 + x2^2) y1"));
    }

    #[test]
    fn beta_divided_difference_examples() {
        let r = Ring::xyb(3);
        assert_eq!(p(&r, "x1").beta_divided_difference(1), MultiPoly::one(&r));
        assert_eq!(MultiPoly::one(&r).beta_divided_difference(1), p(&r, "b"));
    }

    #[test]
    fn substitution_examples() {
        let r = Ring::xyb(2);
        let f = p(&r, "x1 - y1");
        assert!(f.evaluate_x_at_y_perm(&[1, 2]).is_zero());
        assert_eq!(f.evaluate_x_at_y_perm(&[2, 1]), p(&r, "y2 - y1"));
        let rule = (Var::Y(1), p(&r, "y1^-1 - 1"));
        assert_eq!(p(&r, "y1").substitute(&[rule.clone()]).unwrap(), p(&r, "y1^-1 - 1"));
        // y1^-1 ↦ y1/(1-y1) is not Laurent
        assert!(matches!(p(&r, "y1^-1").substitute(&[rule]), Err(PolyError::NotLaurent(_))));
        // simultaneous, not sequential
        let swap = [(Var::X(1), p(&r, "x2")), (Var::X(2), p(&r, "x1"))];
        assert_eq!(p(&r, "x1^2 x2").substitute(&swap).unwrap(), p(&r, "x1 x2^2"));
        assert!(matches!(p(&r, "y1^-1").substitute(&[(Var::Y(1), p(&r, "x1"))]), Err(PolyError::NegativeExponent(_))));
        assert!(matches!(p(&r, "y1^-1").substitute(&[(Var::Y(1), p(&r, "-x1"))]), Err(PolyError::NegativeExponent(_))));
    }

    #[test]
    fn exact_division() {
        let r = Ring::xyb(3);
        let g = p(&r, "(y1 - y2)(y1 - y3 + b y1 y3)");
        let q = p(&r, "x1 y2^2 - 3 b + y3^-2");
        assert_eq!((&g * &q).div_exact(&g).unwrap(), q);
        assert_eq!(p(&r, "y1 + 1").div_exact(&g), Err(PolyError::InexactDivision));
        assert_eq!(p(&r, "2 x1").div_exact(&p(&r, "4")), Err(PolyError::InexactDivision));
    }

    #[test]
    fn parse_errors() {
        let r = Ring::xyb(2);
        assert!(matches!(MultiPoly::parse(&r, "x3"), Err(PolyError::UnknownVariable(_))));
        assert!(matches!(MultiPoly::parse(&r, "x1 +"), Err(PolyError::Parse { .. })));
        assert!(matches!(MultiPoly::parse(&r, "(x1"), Err(PolyError::Parse { .. })));
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = Vec<(Vec<i16>, i64)>> {
        let nv = 2 * n + 1;
        prop::collection::vec((prop::collection::vec(0i16..3, nv), -4i64..5), 0..7)
    }

    fn build(r: &Arc<Ring>, raw: Vec<(Vec<i16>, i64)>) -> MultiPoly {
        MultiPoly::from_terms(r, raw.into_iter().map(|(e, c)| (Monomial(e.into_iter().collect()), Int::from(c))))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
            let r = Ring::xyb(3);
            let (a, b, c) = (build(&r, a), build(&r, b), build(&r, c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            prop_assert_eq!(MultiPoly::parse(&r, &a.to_string()).unwrap(), a);
        }

        #[test]
        fn divided_difference_relations(a in arb_poly(4)) {
            let r = Ring::xyb(4);
            let f = build(&r, a);
            for i in 1..4 {
                prop_assert!(f.divided_difference(i).divided_difference(i).is_zero());
                // ∂^β_i squared is β ∂^β_i
                let once = f.beta_divided_difference(i);
                prop_assert_eq!(once.beta_divided_difference(i), &MultiPoly::var(&r, Var::Beta) * &once);
                // (f - s_i f) = (x_i - x_{i+1}) ∂_i f
                let si = f.substitute(&[(Var::X(i as u16), MultiPoly::var(&r, Var::X(i as u16 + 1))),
                                        (Var::X(i as u16 + 1), MultiPoly::var(&r, Var::X(i as u16)))]).unwrap();
                let lin = &MultiPoly::var(&r, Var::X(i as u16)) - &MultiPoly::var(&r, Var::X(i as u16 + 1));
                prop_assert_eq!(&f - &si, &lin * &f.divided_difference(i));
            }
            prop_assert_eq!(f.divided_difference(1).divided_difference(3), f.divided_difference(3).divided_difference(1));
            prop_assert_eq!(f.beta_divided_difference(1).beta_divided_difference(3), f.beta_divided_difference(3).beta_divided_difference(1));
            for i in 1..3 {
                let lhs = f.divided_difference(i).divided_difference(i + 1).divided_difference(i);
                let rhs = f.divided_difference(i + 1).divided_difference(i).divided_difference(i + 1);
                prop_assert_eq!(lhs, rhs);
                let lhs = f.beta_divided_difference(i).beta_divided_difference(i + 1).beta_divided_difference(i);
                let rhs = f.beta_divided_difference(i + 1).beta_divided_difference(i).beta_divided_difference(i + 1);
                prop_assert_eq!(lhs, rhs);
            }
            // β = 0 recovers the ordinary operator
            let zero_beta = |g: &MultiPoly| g.set_zero(|v| v == Var::Beta);
            prop_assert_eq!(zero_beta(&f.beta_divided_difference(2)), zero_beta(&f).divided_difference(2));
        }
    }
}
