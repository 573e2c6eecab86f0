//! (p,q)-clans: signed, partially matched words on `n = p + q` vertices.
//!
//! Text form uses `+`, `-` and a repeated label for each arc. Labels are
//! canonicalized to `1, 2, …, 9, a, b, …` in order of left endpoints.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::perm::{Flagging, Partition, Perm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClanError {
    #[error("clan `{text}` has length {found}, expected {expected}")]
    LengthMismatch { text: String, expected: usize, found: usize },
    #[error("clan `{text}` is not a ({p},{q})-clan: #+ - #- must equal p - q")]
    SignatureMismatch { text: String, p: usize, q: usize },
    #[error("arc label `{label}` occurs {count} time(s), expected 2")]
    BadArcLabel { label: char, count: usize },
    #[error("invalid clan symbol `{0}`")]
    InvalidSymbol(char),
    #[error("clan `{0}` has crossing arcs")]
    Crossing(String),
    #[error("clan `{0}` is not matchless")]
    NotMatchless(String),
    #[error("clans of different signature: ({0},{1}) vs ({2},{3})")]
    SignatureDiffers(usize, usize, usize, usize),
    #[error("{sigma} is not shuffled for clan `{clan}`")]
    NotShuffled { clan: String, sigma: String },
}

/// One vertex of a clan; arc ends store the 0-based position of their mate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Plus,
    Minus,
    Left(u8),
    Right(u8),
}

impl Sym {
    pub fn is_sign(self) -> bool {
        matches!(self, Sym::Plus | Sym::Minus)
    }

    pub fn mate(self) -> Option<usize> {
        match self {
            Sym::Left(m) | Sym::Right(m) => Some(m as usize),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clan {
    p: usize,
    q: usize,
    sym: Vec<Sym>,
}

const LABELS: &[u8] = b"123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Statistics `γ(i;+)`, `γ(i;−)` and `γ(i;j)`, all 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClanRankData {
    pub plus_counts: Vec<usize>,
    pub minus_counts: Vec<usize>,
    cross: Vec<Vec<usize>>,
}

impl ClanRankData {
    /// `γ(i;j)` for `1 ≤ i < j ≤ n`.
    pub fn cross(&self, i: usize, j: usize) -> usize {
        self.cross[i - 1][j - 1]
    }

    pub fn plus(&self, i: usize) -> usize {
        self.plus_counts[i - 1]
    }

    pub fn minus(&self, i: usize) -> usize {
        self.minus_counts[i - 1]
    }
}

impl Clan {
    fn from_syms(sym: Vec<Sym>) -> Clan {
        let plus = sym.iter().filter(|s| **s == Sym::Plus).count();
        let arcs = sym.iter().filter(|s| matches!(s, Sym::Left(_))).count();
        let minus = sym.iter().filter(|s| **s == Sym::Minus).count();
        Clan { p: plus + arcs, q: minus + arcs, sym }
    }

    /// Parses `text` as a `(p, q)`-clan.
    pub fn parse(text: &str, p: usize, q: usize) -> Result<Clan, ClanError> {
        let c: Clan = text.parse()?;
        if c.n() != p + q {
            return Err(ClanError::LengthMismatch { text: text.to_string(), expected: p + q, found: c.n() });
        }
        if c.p != p {
            return Err(ClanError::SignatureMismatch { text: text.to_string(), p, q });
        }
        Ok(c)
    }

    /// Matchless clan from a sign word; `true` is `+`.
    pub fn matchless(signs: &[bool]) -> Clan {
        Clan::from_syms(signs.iter().map(|&s| if s { Sym::Plus } else { Sym::Minus }).collect())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.sym.len()
    }

    pub fn symbols(&self) -> &[Sym] {
        &self.sym
    }

    /// Arcs `(i, j)` with `i < j`, 1-based, ordered by left end.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.sym
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Sym::Left(m) => Some((i + 1, *m as usize + 1)),
                _ => None,
            })
            .collect()
    }

    pub fn is_matchless(&self) -> bool {
        self.sym.iter().all(|s| s.is_sign())
    }

    pub fn is_noncrossing(&self) -> bool {
        let arcs = self.arcs();
        !arcs.iter().any(|&(a, b)| arcs.iter().any(|&(c, d)| a < c && c < b && b < d))
    }

    /// `ℓ(γ) = Σ_{arcs i<j} (j − i − #{arcs s<t : s < i < t < j})`.
    pub fn length(&self) -> usize {
        let arcs = self.arcs();
        arcs.iter()
            .map(|&(i, j)| j - i - arcs.iter().filter(|&&(s, t)| s < i && i < t && t < j).count())
            .sum()
    }

    pub fn dimension(&self) -> usize {
        let c2 = |m: usize| m * m.saturating_sub(1) / 2;
        c2(self.p) + c2(self.q) + self.length()
    }

    pub fn rank_data(&self) -> ClanRankData {
        let n = self.n();
        let mut plus_counts = Vec::with_capacity(n);
        let mut minus_counts = Vec::with_capacity(n);
        let (mut pl, mut mi) = (0, 0);
        for (i, s) in self.sym.iter().enumerate() {
            match s {
                Sym::Plus => pl += 1,
                Sym::Minus => mi += 1,
                // an arc counts once both ends are in [1, i]
                Sym::Right(m) if (*m as usize) < i => {
                    pl += 1;
                    mi += 1;
                }
                _ => {}
            }
            plus_counts.push(pl);
            minus_counts.push(mi);
        }
        let mut cross = vec![vec![0usize; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                cross[i][j] = (0..=i)
                    .filter(|&k| matches!(self.sym[k], Sym::Left(m) if m as usize > j))
                    .count();
            }
        }
        ClanRankData { plus_counts, minus_counts, cross }
    }

    /// Swaps signs; the result is a `(q, p)`-clan.
    pub fn negate(&self) -> Clan {
        let sym = self
            .sym
            .iter()
            .map(|s| match s {
                Sym::Plus => Sym::Minus,
                Sym::Minus => Sym::Plus,
                other => *other,
            })
            .collect();
        Clan { p: self.q, q: self.p, sym }
    }

    /// Flips every sign; coincides with [`Clan::negate`].
    pub fn hat(&self) -> Clan {
        self.negate()
    }

    fn replace_arcs(&self, left: Sym, right: Sym) -> Result<Clan, ClanError> {
        if !self.is_noncrossing() {
            return Err(ClanError::Crossing(self.to_string()));
        }
        let sym = self
            .sym
            .iter()
            .map(|s| match s {
                Sym::Left(_) => left,
                Sym::Right(_) => right,
                other => *other,
            })
            .collect();
        Ok(Clan { p: self.p, q: self.q, sym })
    }

    /// Left ends become `−`, right ends `+`.
    pub fn tau_minus(&self) -> Result<Clan, ClanError> {
        self.replace_arcs(Sym::Minus, Sym::Plus)
    }

    /// Left ends become `+`, right ends `−`.
    pub fn tau_plus(&self) -> Result<Clan, ClanError> {
        self.replace_arcs(Sym::Plus, Sym::Minus)
    }

    /// The covering move `s_i · γ` of weak order, if it raises the length.
    pub fn weak_cover(&self, i: usize) -> Option<Clan> {
        let (a, b) = (i - 1, i);
        if b >= self.n() {
            return None;
        }
        let (ca, cb) = (self.sym[a], self.sym[b]);
        let swap = match (ca, cb) {
            (Sym::Plus, Sym::Minus) | (Sym::Minus, Sym::Plus) => {
                let mut sym = self.sym.clone();
                sym[a] = Sym::Left(b as u8);
                sym[b] = Sym::Right(a as u8);
                return Some(Clan { p: self.p, q: self.q, sym });
            }
            (s, Sym::Left(_)) if s.is_sign() => true,
            (Sym::Right(_), s) if s.is_sign() => true,
            (x, y) if !x.is_sign() && !y.is_sign() => {
                let (ma, mb) = (x.mate().unwrap(), y.mate().unwrap());
                ma != b && ma < mb
            }
            _ => false,
        };
        if !swap {
            return None;
        }
        Some(self.swap_positions(a, b))
    }

    fn swap_positions(&self, a: usize, b: usize) -> Clan {
        let relabel = |k: usize| if k == a { b } else if k == b { a } else { k };
        let mut sym = self.sym.clone();
        sym.swap(a, b);
        for s in sym.iter_mut() {
            *s = match *s {
                Sym::Left(m) => Sym::Left(relabel(m as usize) as u8),
                Sym::Right(m) => Sym::Right(relabel(m as usize) as u8),
                other => other,
            };
        }
        // a left end may have moved past its mate
        for k in 0..sym.len() {
            if let Sym::Left(m) = sym[k] {
                if (m as usize) < k {
                    sym[k] = Sym::Right(m);
                    sym[m as usize] = Sym::Left(k as u8);
                }
            }
        }
        Clan { p: self.p, q: self.q, sym }
    }

    /// `β ⪯ γ` via the rank conditions: `β(i;±) ≥ γ(i;±)`, `β(i;j) ≤ γ(i;j)`.
    pub fn closure_leq(&self, other: &Clan) -> Result<bool, ClanError> {
        if (self.p, self.q) != (other.p, other.q) {
            return Err(ClanError::SignatureDiffers(self.p, self.q, other.p, other.q));
        }
        let (b, g) = (self.rank_data(), other.rank_data());
        let n = self.n();
        for i in 0..n {
            if b.plus_counts[i] < g.plus_counts[i] || b.minus_counts[i] < g.minus_counts[i] {
                return Ok(false);
            }
            for j in i + 1..n {
                if b.cross[i][j] > g.cross[i][j] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `λ_k = q − #{−'s before the k-th +}`.
    pub fn lambda_partition(&self) -> Result<Partition, ClanError> {
        if !self.is_matchless() {
            return Err(ClanError::NotMatchless(self.to_string()));
        }
        let mut minus = 0;
        let mut parts = Vec::new();
        for s in &self.sym {
            match s {
                Sym::Minus => minus += 1,
                _ => parts.push(self.q - minus),
            }
        }
        Ok(Partition(parts))
    }

    /// Positions of the `+`'s.
    pub fn flagging(&self) -> Result<Flagging, ClanError> {
        if !self.is_matchless() {
            return Err(ClanError::NotMatchless(self.to_string()));
        }
        Ok(Flagging(
            self.sym.iter().enumerate().filter(|(_, s)| **s == Sym::Plus).map(|(i, _)| i + 1).collect(),
        ))
    }

    /// Labels `1..first` go to vertices selected by `first_class`, in order,
    /// then the remaining labels to the rest.
    fn labelling(&self, first_class: impl Fn(Sym, usize) -> bool) -> Perm {
        let n = self.n();
        let mut w = vec![0u8; n];
        let mut next = 1u8;
        for (i, s) in self.sym.iter().enumerate() {
            if first_class(*s, i) {
                w[i] = next;
                next += 1;
            }
        }
        for (i, s) in self.sym.iter().enumerate() {
            if !first_class(*s, i) {
                w[i] = next;
                next += 1;
            }
        }
        Perm::new(w).expect("labelling is a bijection")
    }

    /// `u(γ)`: `−`'s and left ends get `1..q`, the rest `q+1..n`.
    pub fn u_perm(&self) -> Result<Perm, ClanError> {
        if !self.is_noncrossing() {
            return Err(ClanError::Crossing(self.to_string()));
        }
        Ok(self.labelling(|s, _| matches!(s, Sym::Minus | Sym::Left(_))))
    }

    /// `v(γ)`: `+`'s and left ends get `1..p`, the rest `p+1..n`.
    pub fn v_perm(&self) -> Result<Perm, ClanError> {
        if !self.is_noncrossing() {
            return Err(ClanError::Crossing(self.to_string()));
        }
        Ok(self.v_labelling())
    }

    /// The labelling behind `v(γ)`, defined for crossing clans too.
    pub fn v_labelling(&self) -> Perm {
        self.labelling(|s, _| matches!(s, Sym::Plus | Sym::Left(_)))
    }

    /// `σ` assigns `1..p` to `+`'s and left ends.
    pub fn is_shuffled(&self, sigma: &Perm) -> bool {
        sigma.n() == self.n()
            && self.sym.iter().enumerate().all(|(i, s)| {
                let low = sigma.at(i + 1) <= self.p;
                low == matches!(s, Sym::Plus | Sym::Left(_))
            })
    }

    /// Sort key: length, then `−` < arcs (by label) < `+` position-wise.
    pub fn sort_key(&self) -> (usize, Vec<u8>) {
        let labels = self.label_numbers();
        let key = self
            .sym
            .iter()
            .enumerate()
            .map(|(i, s)| match s {
                Sym::Minus => 0,
                Sym::Plus => u8::MAX,
                _ => 1 + labels[i],
            })
            .collect();
        (self.length(), key)
    }

    fn label_numbers(&self) -> Vec<u8> {
        let mut labels = vec![0u8; self.n()];
        let mut next = 0u8;
        for (i, s) in self.sym.iter().enumerate() {
            if let Sym::Left(m) = s {
                labels[i] = next;
                labels[*m as usize] = next;
                next += 1;
            }
        }
        labels
    }
}

impl FromStr for Clan {
    type Err = ClanError;
    fn from_str(text: &str) -> Result<Clan, ClanError> {
        let chars: Vec<char> = text.trim().chars().collect();
        let mut sym = Vec::with_capacity(chars.len());
        let mut open: FxHashMap<char, usize> = FxHashMap::default();
        let mut closed: FxHashMap<char, usize> = FxHashMap::default();
        for (i, &c) in chars.iter().enumerate() {
            match c {
                '+' => sym.push(Sym::Plus),
                '-' | '\u{2212}' => sym.push(Sym::Minus),
                c if c.is_ascii_alphanumeric() => {
                    if closed.contains_key(&c) {
                        return Err(ClanError::BadArcLabel { label: c, count: 3 });
                    }
                    if let Some(l) = open.remove(&c) {
                        sym[l] = Sym::Left(i as u8);
                        sym.push(Sym::Right(l as u8));
                        closed.insert(c, i);
                    } else {
                        open.insert(c, i);
                        sym.push(Sym::Left(u8::MAX));
                    }
                }
                c => return Err(ClanError::InvalidSymbol(c)),
            }
        }
        if let Some((&label, _)) = open.iter().min_by_key(|(_, &pos)| pos) {
            return Err(ClanError::BadArcLabel { label, count: 1 });
        }
        Ok(Clan::from_syms(sym))
    }
}

impl fmt::Display for Clan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.label_numbers();
        for (i, s) in self.sym.iter().enumerate() {
            let c = match s {
                Sym::Plus => '+',
                Sym::Minus => '-',
                _ => LABELS[labels[i] as usize] as char,
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Clan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Clan({self})")
    }
}

/// All `(p, q)`-clans, sorted by [`Clan::sort_key`].
pub fn enumerate_clans(p: usize, q: usize) -> Vec<Clan> {
    fn rec(slots: &mut Vec<Option<Sym>>, plus: usize, minus: usize, p: usize, q: usize, out: &mut Vec<Clan>) {
        let Some(i) = slots.iter().position(|s| s.is_none()) else {
            let sym: Vec<Sym> = slots.iter().map(|s| s.unwrap()).collect();
            let c = Clan::from_syms(sym);
            if c.p == p && c.q == q {
                out.push(c);
            }
            return;
        };
        if plus < p {
            slots[i] = Some(Sym::Plus);
            rec(slots, plus + 1, minus, p, q, out);
        }
        if minus < q {
            slots[i] = Some(Sym::Minus);
            rec(slots, plus, minus + 1, p, q, out);
        }
        if plus < p && minus < q {
            for j in i + 1..slots.len() {
                if slots[j].is_none() {
                    slots[i] = Some(Sym::Left(j as u8));
                    slots[j] = Some(Sym::Right(i as u8));
                    rec(slots, plus + 1, minus + 1, p, q, out);
                    slots[j] = None;
                }
            }
        }
        slots[i] = None;
    }
    let mut out = Vec::new();
    let mut slots = vec![None; p + q];
    // an arc uses one unit of each signature budget
    rec(&mut slots, 0, 0, p, q, &mut out);
    out.sort_by_cached_key(|c| c.sort_key());
    out.dedup();
    out
}

/// The `C(n, p)` matchless clans, sorted.
pub fn enumerate_matchless(p: usize, q: usize) -> Vec<Clan> {
    enumerate_clans(p, q).into_iter().filter(|c| c.is_matchless()).collect()
}

/// `Σ_k C(n,2k)(2k−1)!! C(n−2k, p−k)`.
pub fn clan_count(p: usize, q: usize) -> u128 {
    let n = p + q;
    let binom = |a: usize, b: usize| -> u128 {
        if b > a {
            return 0;
        }
        (0..b).fold(1u128, |acc, k| acc * (a - k) as u128 / (k + 1) as u128)
    };
    (0..=p.min(q))
        .map(|k| {
            let dfact: u128 = (1..=k).map(|t| (2 * t - 1) as u128).product();
            binom(n, 2 * k) * dfact * binom(n - 2 * k, p - k)
        })
        .sum()
}

/// Weak order on `(p, q)`-clans with explicit covering edges.
#[derive(Clone, Debug)]
pub struct WeakOrderGraph {
    pub p: usize,
    pub q: usize,
    nodes: Vec<Clan>,
    index: FxHashMap<Clan, usize>,
    /// `(from, i, to)` with `to = s_i · from`.
    edges: Vec<(usize, usize, usize)>,
    preds: Vec<Vec<(usize, usize)>>,
    first_pred: Vec<Option<(usize, usize)>>,
}

impl WeakOrderGraph {
    pub fn build(p: usize, q: usize) -> WeakOrderGraph {
        let nodes = enumerate_clans(p, q);
        let index: FxHashMap<Clan, usize> = nodes.iter().cloned().enumerate().map(|(k, c)| (c, k)).collect();
        let n = p + q;
        let mut edges = Vec::new();
        let mut preds = vec![Vec::new(); nodes.len()];
        for (k, c) in nodes.iter().enumerate() {
            for i in 1..n {
                if let Some(up) = c.weak_cover(i) {
                    let t = index[&up];
                    edges.push((k, i, t));
                    preds[t].push((k, i));
                }
            }
        }
        // BFS from the matchless clans fixes a preferred predecessor
        let mut first_pred = vec![None; nodes.len()];
        let mut seen = vec![false; nodes.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (k, c) in nodes.iter().enumerate() {
            if c.is_matchless() {
                seen[k] = true;
                queue.push_back(k);
            }
        }
        let mut succ = vec![Vec::new(); nodes.len()];
        for &(f, i, t) in &edges {
            succ[f].push((i, t));
        }
        while let Some(k) = queue.pop_front() {
            for &(i, t) in &succ[k] {
                if !seen[t] {
                    seen[t] = true;
                    first_pred[t] = Some((k, i));
                    queue.push_back(t);
                }
            }
        }
        assert!(seen.iter().all(|&s| s), "weak order does not reach every clan");
        WeakOrderGraph { p, q, nodes, index, edges, preds, first_pred }
    }

    pub fn nodes(&self) -> &[Clan] {
        &self.nodes
    }

    pub fn index_of(&self, c: &Clan) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    /// Incoming edges `(from, i)`.
    pub fn predecessors(&self, k: usize) -> &[(usize, usize)] {
        &self.preds[k]
    }

    /// The predecessor used to define the recursion (BFS-first).
    pub fn bfs_predecessor(&self, k: usize) -> Option<(usize, usize)> {
        self.first_pred[k]
    }

    /// Edge list `γ' --i--> γ`, one per line.
    pub fn edge_list(&self) -> String {
        let mut s = String::new();
        for &(f, i, t) in &self.edges {
            s.push_str(&format!("{} --{}--> {}\n", self.nodes[f], i, self.nodes[t]));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Clan {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        let g = Clan::parse("11+-", 2, 2).unwrap();
        assert_eq!(g.arcs(), vec![(1, 2)]);
        assert_eq!(g.symbols()[2], Sym::Plus);
        assert_eq!(c("aa+-"), g);
        assert_eq!(c("1212").arcs(), vec![(1, 3), (2, 4)]);
        assert_eq!(c("2+2-11").to_string(), "1+1-22");
        assert!(matches!(Clan::parse("11+", 2, 2), Err(ClanError::LengthMismatch { .. })));
        assert!(matches!(Clan::parse("++++", 2, 2), Err(ClanError::SignatureMismatch { .. })));
        assert!(matches!(Clan::parse("1+--", 2, 2), Err(ClanError::BadArcLabel { label: '1', count: 1 })));
        assert!(matches!(Clan::parse("111-", 2, 2), Err(ClanError::BadArcLabel { count: 3, .. })));
        assert!(matches!("1*1".parse::<Clan>(), Err(ClanError::InvalidSymbol('*'))));
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_clans(2, 2).len(), 21);
        let names: Vec<String> = enumerate_clans(1, 1).iter().map(|c| c.to_string()).collect();
        assert_eq!(names, vec!["-+", "+-", "11"]);
        assert_eq!(enumerate_clans(1, 0).len(), 1);
        for n in 0..=7 {
            for p in 0..=n {
                assert_eq!(enumerate_clans(p, n - p).len() as u128, clan_count(p, n - p));
                assert_eq!(enumerate_matchless(p, n - p).len() as u128, binom(n, p));
            }
        }
        assert_eq!(clan_count(3, 3), 215);
    }

    fn binom(n: usize, k: usize) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    #[test]
    fn lengths_and_dims() {
        assert_eq!(c("+-+-").length(), 0);
        assert_eq!(c("1221").length(), 4);
        assert_eq!(c("1212").length(), 3);
        assert_eq!(c("1221").dimension(), 6);
        assert_eq!(c("11+-").dimension(), 3);
        assert_eq!(c("--++").dimension(), 2);
    }

    #[test]
    fn rank_data_example() {
        let r = c("11+-").rank_data();
        assert_eq!(r.plus_counts, vec![0, 1, 2, 2]);
        assert_eq!(r.minus_counts, vec![0, 1, 1, 2]);
        assert_eq!(r.cross(1, 2), 0);
        assert_eq!(r.cross(1, 3), 0);
        let r = c("1221").rank_data();
        assert_eq!(r.cross(1, 2), 1);
        assert_eq!(r.cross(2, 3), 1);
        assert_eq!(r.cross(3, 4), 0);
    }

    #[test]
    fn involutions() {
        assert_eq!(c("+-+-").negate().to_string(), "-+-+");
        assert_eq!(c("11+-").tau_minus().unwrap().to_string(), "-++-");
        assert_eq!(c("11+-").tau_plus().unwrap().to_string(), "+-+-");
        assert!(c("1212").tau_plus().is_err());
        assert!(!c("1212").is_noncrossing());
        assert!(c("1221").is_noncrossing());
        for g in enumerate_clans(3, 2) {
            assert_eq!(g.negate().negate(), g);
            assert_eq!(g.hat().hat(), g);
            assert_eq!(g.negate().is_noncrossing(), g.is_noncrossing());
            assert_eq!((g.negate().p(), g.negate().q()), (2, 3));
        }
    }

    #[test]
    fn covers() {
        assert_eq!(c("+-+-").weak_cover(1).unwrap().to_string(), "11+-");
        assert_eq!(c("-+-+").weak_cover(2).unwrap().to_string(), "-11+");
        assert_eq!(c("++--").weak_cover(2).unwrap().to_string(), "+11-");
        assert_eq!(c("1122").weak_cover(2).unwrap().to_string(), "1212");
        assert_eq!(c("1212").weak_cover(1).unwrap().to_string(), "1221");
        assert_eq!(c("1212").weak_cover(3).unwrap().to_string(), "1221");
        assert_eq!(c("+11-").weak_cover(1).unwrap().to_string(), "1+1-");
        assert_eq!(c("11+-").weak_cover(2).unwrap().to_string(), "1+1-");
        assert!(c("1212").weak_cover(2).is_none());
        assert!(c("11+-").weak_cover(1).is_none());
        assert!(c("++--").weak_cover(1).is_none());
        assert!(c("1+1-").weak_cover(1).is_none());
    }

    #[test]
    fn weak_order_shape() {
        let g = WeakOrderGraph::build(2, 2);
        assert_eq!(g.nodes().len(), 21);
        let sources: Vec<_> = (0..21).filter(|&k| g.predecessors(k).is_empty()).collect();
        assert_eq!(sources.len(), 6);
        let sinks: Vec<_> = (0..21).filter(|&k| g.edges().iter().all(|e| e.0 != k)).collect();
        assert_eq!(sinks.len(), 1);
        assert_eq!(g.nodes()[sinks[0]].to_string(), "1221");
        for &(f, _, t) in g.edges() {
            assert_eq!(g.nodes()[f].length() + 1, g.nodes()[t].length());
        }
        let g11 = WeakOrderGraph::build(1, 1);
        assert_eq!(g11.edge_list(), "-+ --1--> 11\n+- --1--> 11\n");
        for n in 2..=6 {
            for p in 0..=n {
                let g = WeakOrderGraph::build(p, n - p);
                let top = g.nodes().last().unwrap();
                assert_eq!(top.dimension(), n * (n - 1) / 2);
                for &(f, _, t) in g.edges() {
                    assert!(g.nodes()[f].closure_leq(&g.nodes()[t]).unwrap());
                }
            }
        }
    }

    #[test]
    fn closure_order_examples() {
        let open = c("1221");
        assert!(c("+-+-").closure_leq(&c("11+-")).unwrap());
        assert!(open.closure_leq(&open).unwrap());
        for t in enumerate_matchless(2, 2) {
            assert!(t.closure_leq(&open).unwrap());
        }
        assert!(!open.closure_leq(&c("11+-")).unwrap());
        assert!(c("11+-").closure_leq(&c("+-")).is_err());
        // partial order on (3,2)
        let all = enumerate_clans(3, 2);
        for a in &all {
            for b in &all {
                if a != b && a.closure_leq(b).unwrap() {
                    assert!(!b.closure_leq(a).unwrap());
                    assert!(a.length() < b.length());
                }
            }
        }
    }

    #[test]
    fn lambda_and_flags() {
        let t = c("++--+-++");
        assert_eq!(t.lambda_partition().unwrap().0, vec![3, 3, 1, 0, 0]);
        assert_eq!(t.flagging().unwrap().0, vec![1, 2, 5, 7, 8]);
        assert_eq!(t.hat().lambda_partition().unwrap().0, vec![3, 3, 2]);
        assert_eq!(t.hat().flagging().unwrap().0, vec![3, 4, 6]);
        assert_eq!(c("+++--").lambda_partition().unwrap().0, vec![2, 2, 2]);
        assert!(c("11+-").lambda_partition().is_err());
    }

    #[test]
    fn u_and_v() {
        let t = c("++--+-++");
        assert_eq!(t.u_perm().unwrap().to_string(), "45126378");
        assert_eq!(t.v_perm().unwrap().to_string(), "12673845");
        assert_eq!(c("--++").u_perm().unwrap().to_string(), "1234");
        assert_eq!(c("--++").v_perm().unwrap().to_string(), "3412");
        assert_eq!(c("11+-").v_perm().unwrap().to_string(), "1324");
        assert!(c("1212").u_perm().is_err());
        let g = c("11+-");
        assert!(g.is_shuffled(&g.v_perm().unwrap()));
        assert!(!g.is_shuffled(&"1234".parse().unwrap()));
    }

    #[test]
    fn matchless_lambda_is_bijection() {
        for n in 1..=6 {
            for p in 0..=n {
                let q = n - p;
                let mut seen = std::collections::HashSet::new();
                for t in enumerate_matchless(p, q) {
                    let l = t.lambda_partition().unwrap().0;
                    assert!(l.windows(2).all(|w| w[0] >= w[1]) && l.iter().all(|&x| x <= q));
                    assert!(seen.insert(l));
                }
                assert_eq!(seen.len() as u128, binom(n, p));
            }
        }
    }
}
