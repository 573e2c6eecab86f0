//! Permutations in one-line notation and their classical statistics.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("`{0}` is not a permutation of 1..n")]
    NotAPermutation(String),
}

/// Weakly decreasing parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition(pub Vec<usize>);

/// Row bounds for a flagged shape, one per part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flagging(pub Vec<usize>);

/// A permutation of `1..=n`, stored as its one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn new(one_line: Vec<u8>) -> Result<Perm, PermError> {
        let n = one_line.len();
        let mut seen = vec![false; n + 1];
        for &v in &one_line {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(PermError::NotAPermutation(format!("{one_line:?}")));
            }
            seen[v] = true;
        }
        Ok(Perm(one_line))
    }

    pub fn identity(n: usize) -> Perm {
        Perm((1..=n as u8).collect())
    }

    pub fn longest(n: usize) -> Perm {
        Perm((1..=n as u8).rev().collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn one_line(&self) -> &[u8] {
        &self.0
    }

    /// `w(i)`, 1-based.
    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1] as usize
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.n()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i as u8 + 1;
        }
        Perm(inv)
    }

    /// Composition `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&v| self.0[v as usize - 1]).collect())
    }

    /// `w s_i`: swaps the entries in positions `i` and `i+1`.
    pub fn mul_s_right(&self, i: usize) -> Perm {
        let mut v = self.0.clone();
        v.swap(i - 1, i);
        Perm(v)
    }

    /// `s_i w`: swaps the values `i` and `i+1`.
    pub fn mul_s_left(&self, i: usize) -> Perm {
        Perm(
            self.0
                .iter()
                .map(|&v| match v as usize {
                    x if x == i => v + 1,
                    x if x == i + 1 => v - 1,
                    _ => v,
                })
                .collect(),
        )
    }

    pub fn length(&self) -> usize {
        let w = &self.0;
        (0..w.len()).map(|i| (i + 1..w.len()).filter(|&j| w[i] > w[j]).count()).sum()
    }

    /// Positions `i` with `w(i) > w(i+1)`.
    pub fn descents(&self) -> Vec<usize> {
        (1..self.n()).filter(|&i| self.at(i) > self.at(i + 1)).collect()
    }

    /// Lehmer code: `c_i = #{j > i : w(j) < w(i)}`.
    pub fn code(&self) -> Vec<usize> {
        let w = &self.0;
        (0..w.len()).map(|i| (i + 1..w.len()).filter(|&j| w[j] < w[i]).count()).collect()
    }

    /// `(i, j)` with `w(i) > j` and `w⁻¹(j) > i`, 1-based.
    pub fn rothe_diagram(&self) -> Vec<(usize, usize)> {
        let inv = self.inverse();
        let n = self.n();
        let mut cells = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if self.at(i) > j && inv.at(j) > i {
                    cells.push((i, j));
                }
            }
        }
        cells
    }

    /// Cells of the diagram whose south and east neighbours are outside it.
    pub fn essential_set(&self) -> Vec<(usize, usize)> {
        let d = self.rothe_diagram();
        d.iter()
            .copied()
            .filter(|&(i, j)| !d.contains(&(i + 1, j)) && !d.contains(&(i, j + 1)))
            .collect()
    }

    /// `r_w(i, j) = #{k ≤ i : w(k) ≤ j}`.
    pub fn rank(&self, i: usize, j: usize) -> usize {
        self.0[..i].iter().filter(|&&v| (v as usize) <= j).count()
    }

    /// Bruhat order: `self ≤ other` iff every rank of `self` dominates.
    pub fn bruhat_leq(&self, other: &Perm) -> bool {
        let n = self.n();
        assert_eq!(n, other.n());
        // prefix counts
        for i in 1..n {
            let mut a = vec![0usize; n + 1];
            let mut b = vec![0usize; n + 1];
            for k in 0..i {
                a[self.0[k] as usize] += 1;
                b[other.0[k] as usize] += 1;
            }
            let (mut ra, mut rb) = (0, 0);
            for j in 1..=n {
                ra += a[j];
                rb += b[j];
                if ra < rb {
                    return false;
                }
            }
        }
        true
    }

    /// 132-avoiding; the diagram is then a partition shape in the corner.
    pub fn is_dominant(&self) -> bool {
        let c = self.code();
        c.windows(2).all(|w| w[0] >= w[1])
    }

    /// 2143-avoiding.
    pub fn is_vexillary(&self) -> bool {
        let w = &self.0;
        let n = w.len();
        // a < b < c < d with w_b < w_a < w_d < w_c
        for b in 1..n {
            for c in b + 1..n {
                for a in 0..b {
                    if w[a] <= w[b] {
                        continue;
                    }
                    for d in c + 1..n {
                        if w[a] < w[d] && w[d] < w[c] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// A reduced word `a_1 … a_ℓ` with `w = s_{a_1} ⋯ s_{a_ℓ}`.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut w = self.clone();
        let mut word = Vec::new();
        while let Some(&i) = w.descents().first() {
            word.push(i);
            w = w.mul_s_right(i);
        }
        word.reverse();
        word
    }

    /// All permutations of `1..=n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<u8> = (1..=n as u8).collect();
        loop {
            out.push(Perm(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    /// A linear extension of Bruhat order: by length, then lexicographically.
    pub fn bruhat_linear_extension(n: usize) -> Vec<Perm> {
        let mut all = Perm::all(n);
        all.sort_by_cached_key(|w| (w.length(), w.0.clone()));
        all
    }
}

impl FromStr for Perm {
    type Err = PermError;
    fn from_str(s: &str) -> Result<Perm, PermError> {
        let s = s.trim();
        let parts: Option<Vec<u8>> = if s.contains([' ', ',']) {
            s.split([' ', ',']).filter(|t| !t.is_empty()).map(|t| t.parse().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        let v = parts.ok_or_else(|| PermError::NotAPermutation(s.to_string()))?;
        Perm::new(v).map_err(|_| PermError::NotAPermutation(s.to_string()))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for v in &self.0 {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let s: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", s.join(","))
        }
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Perm {
        s.parse().unwrap()
    }

    #[test]
    fn statistics() {
        assert_eq!(w("2413").length(), 3);
        assert_eq!(w("2413").code(), vec![1, 2, 0, 0]);
        assert_eq!(w("2413").rothe_diagram(), vec![(1, 1), (2, 1), (2, 3)]);
        assert_eq!(w("2413").essential_set(), vec![(2, 1), (2, 3)]);
        assert_eq!(Perm::longest(4).length(), 6);
        assert!(w("321").is_dominant());
        assert!(!w("132").is_dominant());
        assert_eq!(Perm::all(4).len(), 24);
        assert_eq!(w("10 2 3 4 5 6 7 8 9 1").to_string(), "10,2,3,4,5,6,7,8,9,1");
        assert!(w("45126378").is_vexillary());
        assert!(!w("2143").is_vexillary());
        assert!(!w("315264").is_vexillary());
        assert!(w("3412").is_vexillary());
        assert!("1224".parse::<Perm>().is_err());
    }

    #[test]
    fn bruhat_examples() {
        assert!(w("1324").bruhat_leq(&w("2413")));
        assert!(!w("3124").bruhat_leq(&w("2413")));
        assert!(w("2143").bruhat_leq(&w("3412")));
    }

    // Bruhat order via subwords of a reduced word.
    fn subword_leq(v: &Perm, w: &Perm) -> bool {
        let word = w.reduced_word();
        let n = w.n();
        (0u32..(1 << word.len())).any(|mask| {
            let mut u = Perm::identity(n);
            for (k, &i) in word.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    u = u.mul_s_right(i);
                }
            }
            &u == v
        })
    }

    #[test]
    fn bruhat_matches_subword_property() {
        let all = Perm::all(4);
        for v in &all {
            for u in &all {
                assert_eq!(v.bruhat_leq(u), subword_leq(v, u), "{v} {u}");
            }
        }
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
        Just((1..=n as u8).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Perm::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn diagram_size_is_length(p in arb_perm(7)) {
            prop_assert_eq!(p.rothe_diagram().len(), p.length());
            prop_assert_eq!(p.code().iter().sum::<usize>(), p.length());
            prop_assert_eq!(p.inverse().length(), p.length());
            prop_assert_eq!(p.compose(&p.inverse()), Perm::identity(7));
            prop_assert_eq!(p.reduced_word().len(), p.length());
            let mut u = Perm::identity(7);
            for i in p.reduced_word() {
                u = u.mul_s_right(i);
            }
            prop_assert_eq!(u, p.clone());
            prop_assert_eq!(p.to_string().parse::<Perm>().unwrap(), p);
        }
    }
}
