//! The polynomials `Υ^(β)_γ(X;Y)` attached to `(p, q)`-clans.

use std::sync::Arc;

use thiserror::Error;

use crate::clan::{Clan, WeakOrderGraph};
use crate::polyring::{MultiPoly, Ring};
use crate::schubert::{check_staircase, specialize, Flavor, SchubertCache, SchubertError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UpsilonError {
    #[error("{0} is not matchless")]
    NotMatchless(Clan),
    #[error("{clan} is not a ({p},{q})-clan")]
    WrongSignature { clan: Clan, p: usize, q: usize },
    #[error(transparent)]
    Schubert(#[from] SchubertError),
}

/// `𝔖^(β)_{u(τ)}(X; y_n, …, y_1) · 𝔖^(β)_{v(τ)}(X;Y)`.
pub fn upsilon_matchless(cache: &mut SchubertCache, tau: &Clan) -> Result<MultiPoly, UpsilonError> {
    if !tau.is_matchless() {
        return Err(UpsilonError::NotMatchless(tau.clone()));
    }
    let u = tau.u_perm().expect("matchless clans are non-crossing");
    let v = tau.v_perm().expect("matchless clans are non-crossing");
    Ok(&cache.beta_double(&u).reverse_y() * &cache.beta_double(&v))
}

/// `Υ^(β)_γ` alone, along the same path a table would take.
pub fn upsilon(cache: &mut SchubertCache, g: &Clan) -> Result<MultiPoly, UpsilonError> {
    let graph = WeakOrderGraph::build(g.p(), g.q());
    let mut k = graph
        .index_of(g)
        .ok_or_else(|| UpsilonError::WrongSignature { clan: g.clone(), p: g.p(), q: g.q() })?;
    let mut ops = Vec::new();
    while let Some((from, i)) = graph.bfs_predecessor(k) {
        ops.push(i);
        k = from;
    }
    let root = upsilon_matchless(cache, &graph.nodes()[k])?;
    Ok(ops.iter().rev().fold(root, |f, &i| f.beta_divided_difference(i)))
}

/// How an entry was produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Matchless,
    /// `Υ_γ = ∂^(β)_i Υ_{from}`.
    Step { from: Clan, i: usize },
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub from: Clan,
    pub i: usize,
    pub to: Clan,
    pub expected: MultiPoly,
    pub found: MultiPoly,
}

#[derive(Clone, Debug, Default)]
pub struct ConsistencyReport {
    pub edges_checked: usize,
    /// Every check made, as `(from, i, to)`; matchless entries appear as `(γ, 0, γ)`.
    pub checked: Vec<(Clan, usize, Clan)>,
    pub violations: Vec<Violation>,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `Υ^(β)_γ` for every `(p, q)`-clan, built by one sweep up the weak order.
pub struct UpsilonTable {
    graph: WeakOrderGraph,
    ring: Arc<Ring>,
    entries: Vec<MultiPoly>,
    provenance: Vec<Provenance>,
}

impl UpsilonTable {
    pub fn build(p: usize, q: usize) -> UpsilonTable {
        let mut cache = SchubertCache::new(p + q);
        UpsilonTable::build_with(p, q, &mut cache)
    }

    pub fn build_with(p: usize, q: usize, cache: &mut SchubertCache) -> UpsilonTable {
        let graph = WeakOrderGraph::build(p, q);
        let ring = cache.ring().clone();
        let mut entries: Vec<Option<MultiPoly>> = vec![None; graph.nodes().len()];
        let mut provenance = Vec::with_capacity(entries.len());
        // nodes are sorted by length, so predecessors come first
        for (k, g) in graph.nodes().iter().enumerate() {
            let (f, prov) = match graph.bfs_predecessor(k) {
                None => (upsilon_matchless(cache, g).expect("roots are matchless"), Provenance::Matchless),
                Some((from, i)) => {
                    let prev = entries[from].as_ref().expect("predecessor computed earlier");
                    (prev.beta_divided_difference(i), Provenance::Step { from: graph.nodes()[from].clone(), i })
                }
            };
            entries[k] = Some(f);
            provenance.push(prov);
        }
        let entries = entries.into_iter().map(|e| e.expect("filled")).collect();
        UpsilonTable { graph, ring, entries, provenance }
    }

    pub fn p(&self) -> usize {
        self.graph.p
    }

    pub fn q(&self) -> usize {
        self.graph.q
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn graph(&self) -> &WeakOrderGraph {
        &self.graph
    }

    pub fn clans(&self) -> &[Clan] {
        self.graph.nodes()
    }

    fn slot(&self, g: &Clan) -> Result<usize, UpsilonError> {
        self.graph.index_of(g).ok_or_else(|| UpsilonError::WrongSignature { clan: g.clone(), p: self.p(), q: self.q() })
    }

    pub fn get(&self, g: &Clan) -> Result<&MultiPoly, UpsilonError> {
        Ok(&self.entries[self.slot(g)?])
    }

    pub fn specialized(&self, g: &Clan, flavor: Flavor) -> Result<MultiPoly, UpsilonError> {
        Ok(specialize(self.get(g)?, flavor))
    }

    pub fn provenance(&self, g: &Clan) -> Result<&Provenance, UpsilonError> {
        Ok(&self.provenance[self.slot(g)?])
    }

    /// The matchless root and the divided differences applied to it, in order.
    pub fn path(&self, g: &Clan) -> Result<(Clan, Vec<usize>), UpsilonError> {
        let mut k = self.slot(g)?;
        let mut ops = Vec::new();
        while let Some((from, i)) = self.graph.bfs_predecessor(k) {
            ops.push(i);
            k = from;
        }
        ops.reverse();
        Ok((self.graph.nodes()[k].clone(), ops))
    }

    /// Checks `∂^(β)_i Υ_{γ'} = Υ_γ` on every covering edge `γ' → γ`,
    /// and that every matchless entry is its defining product.
    pub fn verify_self_consistency(&self, cache: &mut SchubertCache) -> ConsistencyReport {
        let mut report = ConsistencyReport::default();
        let nodes = self.graph.nodes();
        for (k, g) in nodes.iter().enumerate() {
            if g.is_matchless() {
                let expected = upsilon_matchless(cache, g).expect("matchless");
                report.edges_checked += 1;
                report.checked.push((g.clone(), 0, g.clone()));
                if expected != self.entries[k] {
                    report.violations.push(Violation {
                        from: g.clone(),
                        i: 0,
                        to: g.clone(),
                        expected,
                        found: self.entries[k].clone(),
                    });
                }
            }
        }
        for &(from, i, to) in self.graph.edges() {
            report.edges_checked += 1;
            report.checked.push((nodes[from].clone(), i, nodes[to].clone()));
            let found = self.entries[from].beta_divided_difference(i);
            if found != self.entries[to] {
                report.violations.push(Violation {
                    from: nodes[from].clone(),
                    i,
                    to: nodes[to].clone(),
                    expected: self.entries[to].clone(),
                    found,
                });
            }
        }
        report
    }

    /// Every matchless product is supported below the staircase.
    pub fn check_staircase(&self) -> Result<(), UpsilonError> {
        let n = self.p() + self.q();
        for (g, f) in self.clans().iter().zip(&self.entries) {
            if g.is_matchless() {
                check_staircase(f, n)?;
            }
        }
        Ok(())
    }
}

/// Clans `γ` (of `table`) with `Υ_{−γ}(X;Y) ≠ Υ_γ(X; y_n, …, y_1)`, where
/// `mirror` is the table for the swapped signature.
pub fn check_symmetry(table: &UpsilonTable, mirror: &UpsilonTable) -> Result<Vec<Clan>, UpsilonError> {
    let mut bad = Vec::new();
    for g in table.clans() {
        if mirror.get(&g.negate())? != &table.get(g)?.reverse_y() {
            bad.push(g.clone());
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int::Int;
    use crate::perm::Perm;
    use crate::polyring::Var;

    fn c(s: &str) -> Clan {
        s.parse().unwrap()
    }

    #[test]
    fn matchless_examples() {
        let mut cache = SchubertCache::new(4);
        let r = cache.ring().clone();
        let f = upsilon_matchless(&mut cache, &c("--++")).unwrap();
        let want = MultiPoly::parse(&r, "(x2 - y2)(x2 - y1)(x1 - y2)(x1 - y1)").unwrap();
        assert_eq!(specialize(&f, Flavor::CohXY), want);
        assert_eq!(specialize(&f, Flavor::CohX), MultiPoly::parse(&r, "x1^2 x2^2").unwrap());
        let f = upsilon_matchless(&mut cache, &c("++--")).unwrap();
        let want = MultiPoly::parse(&r, "(x2 - y4)(x2 - y3)(x1 - y4)(x1 - y3)").unwrap();
        assert_eq!(specialize(&f, Flavor::CohXY), want);
        assert!(matches!(upsilon_matchless(&mut cache, &c("1122")), Err(UpsilonError::NotMatchless(_))));
    }

    #[test]
    fn small_tables() {
        let t = UpsilonTable::build(1, 1);
        let mut cache = SchubertCache::new(2);
        assert!(t.verify_self_consistency(&mut cache).is_clean());
        let top = t.get(&c("11")).unwrap();
        assert!(top.is_one());
        assert_eq!(t.path(&c("11")).unwrap().1, vec![1]);
        assert_eq!(t.provenance(&c("+-")).unwrap(), &Provenance::Matchless);
        assert!(t.get(&c("++-")).is_err());
        // both length-zero clans reach 11 in one step
        for root in ["+-", "-+"] {
            assert!(t.get(&c(root)).unwrap().beta_divided_difference(1).is_one());
        }
    }

    #[test]
    fn spec_entries_2_2() {
        let t = UpsilonTable::build(2, 2);
        let r = t.ring().clone();
        assert!(t.specialized(&c("1221"), Flavor::CohXY).unwrap().is_one());
        assert!(t.specialized(&c("1221"), Flavor::CohX).unwrap().is_one());
        let want = MultiPoly::parse(
            &r,
            "(x1 - y1 - y2 + x2)(x2 x1 + x1 x3 + x2 x3 - x1 y3 - x2 y3 - x3 y3 - y4 x1 - y4 x2 - y4 x3 + y4 y3 + y3^2 + y4^2)",
        )
        .unwrap();
        assert_eq!(t.specialized(&c("11+-"), Flavor::CohXY).unwrap(), want);
        // the open orbit gives 1 in every flavor
        for fl in [Flavor::Beta, Flavor::KXY, Flavor::KX] {
            assert!(t.specialized(&c("1221"), fl).unwrap().is_one());
        }
    }

    #[test]
    fn single_entries_match_the_table() {
        let t = UpsilonTable::build(2, 2);
        let mut cache = SchubertCache::new(4);
        for g in t.clans() {
            assert_eq!(&upsilon(&mut cache, g).unwrap(), t.get(g).unwrap(), "{g}");
        }
    }

    #[test]
    fn symmetry_under_negation() {
        for (p, q) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
            let a = UpsilonTable::build(p, q);
            let b = UpsilonTable::build(q, p);
            assert!(check_symmetry(&a, &b).unwrap().is_empty(), "({p},{q})");
        }
    }

    #[test]
    fn degrees_positivity_and_staircase() {
        for (p, q) in [(1, 1), (2, 1), (2, 2), (3, 2), (1, 4)] {
            let t = UpsilonTable::build(p, q);
            t.check_staircase().unwrap();
            for g in t.clans() {
                let h = t.specialized(g, Flavor::CohX).unwrap();
                assert_eq!(h.total_degree(), Some((p * q - g.length()) as i32), "{g}");
                assert!(h.has_nonnegative_coefficients(), "{g}");
                // lowest β-degree piece is the cohomology class
                let f = t.get(g).unwrap();
                let low = f.set_zero(|v| v == Var::Beta);
                assert_eq!(low, t.specialized(g, Flavor::CohXY).unwrap());
            }
        }
    }

    #[test]
    fn multiplicity_free_3_2() {
        let mut cache = SchubertCache::new(5);
        let t = UpsilonTable::build_with(3, 2, &mut cache);
        for g in t.clans() {
            let h = t.specialized(g, Flavor::CohX).unwrap();
            let e = cache.expand_leading_term(&h).unwrap();
            assert!(e.values().all(|c| c == &Int::ONE), "{g}: {e:?}");
            assert!(e.keys().all(|w: &Perm| w.length() == p_q_deg(g)));
        }
        fn p_q_deg(g: &Clan) -> usize {
            g.p() * g.q() - g.length()
        }
    }
}
