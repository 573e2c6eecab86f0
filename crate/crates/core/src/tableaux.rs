//! Flagged Schur polynomials and pipe diagrams of vexillary permutations.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::int::Int;
use crate::perm::{Flagging, Partition, Perm};
use crate::polyring::{Monomial, MultiPoly, PolyBuilder, Ring, Var};
use crate::schubert::beta_factor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauxError {
    #[error("{0} is not vexillary")]
    NotVexillary(Perm),
    #[error("diagram of {perm} has a box beyond column {bound}")]
    ColumnBound { perm: Perm, bound: usize },
    #[error("partition and flagging have different lengths")]
    ShapeMismatch,
}

/// Generating function of semistandard tableaux of shape `λ` whose row-`i`
/// entries are at most `f_i`.
pub fn flagged_schur(ring: &Arc<Ring>, lambda: &Partition, flags: &Flagging) -> Result<MultiPoly, TableauxError> {
    let (lam, f) = (&lambda.0, &flags.0);
    if lam.len() != f.len() {
        return Err(TableauxError::ShapeMismatch);
    }
    let rows: Vec<(usize, usize)> = lam.iter().copied().zip(f.iter().copied()).filter(|(l, _)| *l > 0).collect();
    let xs: Vec<usize> = (1..=ring.n()).map(|i| ring.index(Var::X(i as u16)).expect("x var")).collect();
    let mut out = PolyBuilder::new(ring);
    let mut grid: Vec<Vec<usize>> = rows.iter().map(|&(l, _)| vec![0; l]).collect();
    let mut exps = Monomial::one(ring.nvars());
    fill(&rows, &xs, &mut grid, 0, 0, &mut exps, &mut out);
    Ok(out.finish())
}

fn fill(
    rows: &[(usize, usize)],
    xs: &[usize],
    grid: &mut Vec<Vec<usize>>,
    r: usize,
    c: usize,
    exps: &mut Monomial,
    out: &mut PolyBuilder,
) {
    if r == rows.len() {
        out.add_term(exps.clone(), &Int::ONE);
        return;
    }
    if c == rows[r].0 {
        fill(rows, xs, grid, r + 1, 0, exps, out);
        return;
    }
    let lo_row = if c > 0 { grid[r][c - 1] } else { 1 };
    let lo_col = if r > 0 { grid[r - 1][c] + 1 } else { 1 };
    let hi = rows[r].1.min(xs.len());
    for v in lo_row.max(lo_col)..=hi {
        grid[r][c] = v;
        exps.0[xs[v - 1]] += 1;
        fill(rows, xs, grid, r, c + 1, exps, out);
        exps.0[xs[v - 1]] -= 1;
    }
}

/// A configuration of `+`'s in the `n × n` grid, 1-based `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PipeDiagram {
    pub n: usize,
    pub cells: BTreeSet<(usize, usize)>,
}

impl PipeDiagram {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for i in 1..=self.n {
            for j in 1..=self.n {
                s.push(if self.cells.contains(&(i, j)) { '+' } else { '.' });
            }
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for PipeDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// How the local move acts on a `2 × 2` window whose only `+` is bottom-right.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PipeMode {
    /// The `+` moves to the top-left corner.
    Cohomological,
    /// Additionally allow the `+` to be copied to the top-left corner,
    /// keeping the original; these extra diagrams carry `(−β)^{excess}`.
    KTheoretic,
}

/// Closure of `D(w)` under the local move, within columns `1..=column_bound`.
pub fn pipe_diagrams(w: &Perm, column_bound: usize, mode: PipeMode) -> Result<Vec<PipeDiagram>, TableauxError> {
    if !w.is_vexillary() {
        return Err(TableauxError::NotVexillary(w.clone()));
    }
    let n = w.n();
    let start: BTreeSet<(usize, usize)> = w.rothe_diagram().into_iter().collect();
    if start.iter().any(|&(_, j)| j > column_bound) {
        return Err(TableauxError::ColumnBound { perm: w.clone(), bound: column_bound });
    }
    let mut seen: FxHashSet<BTreeSet<(usize, usize)>> = FxHashSet::default();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(d) = queue.pop_front() {
        for &(r1, c1) in &d {
            if r1 < 2 || c1 < 2 {
                continue;
            }
            let (r, c) = (r1 - 1, c1 - 1);
            if d.contains(&(r, c)) || d.contains(&(r, c1)) || d.contains(&(r1, c)) {
                continue;
            }
            let mut moved = d.clone();
            moved.remove(&(r1, c1));
            moved.insert((r, c));
            let mut next = vec![moved];
            if mode == PipeMode::KTheoretic {
                let mut kept = d.clone();
                kept.insert((r, c));
                next.push(kept);
            }
            for e in next {
                if !seen.contains(&e) {
                    seen.insert(e.clone());
                    queue.push_back(e);
                }
            }
        }
    }
    let mut out: Vec<PipeDiagram> = seen.into_iter().map(|cells| PipeDiagram { n, cells }).collect();
    out.sort();
    Ok(out)
}

/// `Π_{+ at (i,j)} (x_i − y_j + β x_i y_j)`.
pub fn wt_beta(ring: &Arc<Ring>, p: &PipeDiagram) -> MultiPoly {
    p.cells.iter().fold(MultiPoly::one(ring), |acc, &(i, j)| &acc * &beta_factor(ring, i, j))
}

/// `Σ_P (−β)^{|P| − ℓ(w)} wt^(β)(P)`; in cohomological mode every diagram
/// has exactly `ℓ(w)` crosses, so this is the plain weight sum.
pub fn pipe_sum(ring: &Arc<Ring>, w: &Perm, column_bound: usize, mode: PipeMode) -> Result<MultiPoly, TableauxError> {
    let ell = w.length();
    let minus_beta = MultiPoly::monomial(ring, &[(Var::Beta, 1)], Int::from(-1));
    let mut acc = MultiPoly::zero(ring);
    for p in pipe_diagrams(w, column_bound, mode)? {
        let excess = p.cells.len() - ell;
        acc = &acc + &(&minus_beta.pow(excess as u32) * &wt_beta(ring, &p));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clan::{enumerate_clans, Clan};
    use crate::schubert::SchubertCache;

    fn part(v: &[usize]) -> Partition {
        Partition(v.to_vec())
    }

    fn flag(v: &[usize]) -> Flagging {
        Flagging(v.to_vec())
    }

    #[test]
    fn flagged_schur_examples() {
        let r = Ring::xyb(8);
        let s = flagged_schur(&r, &part(&[3, 3, 1, 0, 0]), &flag(&[1, 2, 5, 7, 8])).unwrap();
        assert_eq!(s, MultiPoly::parse(&r, "x1^3 x2^3 (x3 + x4 + x5)").unwrap());
        assert!(flagged_schur(&r, &part(&[]), &flag(&[])).unwrap().is_one());
        assert_eq!(flagged_schur(&r, &part(&[1]), &flag(&[1])).unwrap(), MultiPoly::var(&r, Var::X(1)));
        assert!(flagged_schur(&r, &part(&[1]), &flag(&[])).is_err());
    }

    // Flagged Jacobi–Trudi: det(h_{λ_i − i + j}(x_1..x_{f_i})).
    fn jacobi_trudi(r: &Arc<Ring>, lam: &[usize], f: &[usize]) -> MultiPoly {
        let k = lam.len();
        let h = |d: i64, m: usize| -> MultiPoly {
            if d < 0 {
                return MultiPoly::zero(r);
            }
            let one_row = flagged_schur(r, &part(&[d as usize]), &flag(&[m])).unwrap();
            one_row
        };
        let mat: Vec<Vec<MultiPoly>> = (0..k)
            .map(|i| (0..k).map(|j| h(lam[i] as i64 - i as i64 + j as i64, f[i])).collect())
            .collect();
        fn det(m: &[Vec<MultiPoly>], r: &Arc<Ring>) -> MultiPoly {
            if m.is_empty() {
                return MultiPoly::one(r);
            }
            let mut acc = MultiPoly::zero(r);
            for j in 0..m.len() {
                let minor: Vec<Vec<MultiPoly>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect()).collect();
                let t = &m[0][j] * &det(&minor, r);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
        det(&mat, r)
    }

    #[test]
    fn flagged_schur_matches_jacobi_trudi() {
        let r = Ring::xyb(5);
        for (lam, f) in [
            (vec![2, 1], vec![2, 3]),
            (vec![3, 3, 1], vec![2, 2, 4]),
            (vec![2, 2, 2], vec![3, 4, 5]),
            (vec![1, 1, 0], vec![1, 3, 5]),
        ] {
            let a = flagged_schur(&r, &part(&lam), &flag(&f)).unwrap();
            let b = jacobi_trudi(&r, &lam, &f);
            assert_eq!(a, b, "{lam:?} {f:?}");
        }
    }

    #[test]
    fn pipe_examples() {
        let r = Ring::xyb(3);
        let id = Perm::identity(3);
        let ps = pipe_diagrams(&id, 3, PipeMode::KTheoretic).unwrap();
        assert_eq!(ps.len(), 1);
        assert!(ps[0].cells.is_empty());
        let s = "213".parse::<Perm>().unwrap();
        assert_eq!(pipe_diagrams(&s, 1, PipeMode::Cohomological).unwrap().len(), 1);
        let p = PipeDiagram { n: 2, cells: [(1, 1)].into_iter().collect() };
        assert_eq!(wt_beta(&r, &p), MultiPoly::parse(&r, "x1 - y1 + b x1 y1").unwrap());
        assert_eq!(p.render(), "+.\n..\n");
        let two = PipeDiagram { n: 2, cells: [(1, 1), (2, 1)].into_iter().collect() };
        assert_eq!(wt_beta(&r, &two), MultiPoly::parse(&r, "(x1 - y1 + b x1 y1)(x2 - y1 + b x2 y1)").unwrap());
        assert!(pipe_diagrams(&"2143".parse().unwrap(), 4, PipeMode::Cohomological).is_err());
        let w132: Perm = "132".parse().unwrap();
        assert_eq!(pipe_diagrams(&w132, 2, PipeMode::Cohomological).unwrap().len(), 2);
        assert_eq!(pipe_diagrams(&w132, 2, PipeMode::KTheoretic).unwrap().len(), 3);
    }

    fn noncrossing(n: usize) -> impl Iterator<Item = Clan> {
        (0..=n).flat_map(move |p| enumerate_clans(p, n - p)).filter(|g| g.is_noncrossing())
    }

    #[test]
    fn pipes_reproduce_schubert_polynomials() {
        for n in 1..=5 {
            let mut cache = SchubertCache::new(n);
            let r = cache.ring().clone();
            for g in noncrossing(n) {
                for (w, bound) in [(g.u_perm().unwrap(), g.q()), (g.v_perm().unwrap(), g.p())] {
                    assert!(w.is_vexillary());
                    let beta = cache.beta_double(&w);
                    assert_eq!(pipe_sum(&r, &w, bound, PipeMode::KTheoretic).unwrap(), beta, "{g} {w}");
                    let coh = pipe_sum(&r, &w, bound, PipeMode::Cohomological).unwrap();
                    assert_eq!(coh.set_zero(|v| v == Var::Beta), cache.double_schubert(&w), "{g} {w}");
                }
                let tm = g.tau_minus().unwrap();
                let tp = g.tau_plus().unwrap().hat();
                let su = flagged_schur(&r, &tm.lambda_partition().unwrap(), &tm.flagging().unwrap()).unwrap();
                let sv = flagged_schur(&r, &tp.lambda_partition().unwrap(), &tp.flagging().unwrap()).unwrap();
                assert_eq!(su, cache.single_schubert(&g.u_perm().unwrap()), "{g}");
                assert_eq!(sv, cache.single_schubert(&g.v_perm().unwrap()), "{g}");
            }
        }
    }

    #[test]
    fn literal_move_loses_beta_terms() {
        let mut cache = SchubertCache::new(3);
        let r = cache.ring().clone();
        let w: Perm = "132".parse().unwrap();
        let coh = pipe_sum(&r, &w, 2, PipeMode::Cohomological).unwrap();
        let beta = cache.beta_double(&w);
        assert_ne!(coh, beta);
        let corr = MultiPoly::parse(&r, "-b (x1 - y1 + b x1 y1)(x2 - y2 + b x2 y2)").unwrap();
        assert_eq!(&coh + &corr, beta);
    }

    #[test]
    fn matchless_products_fit_the_staircase() {
        for n in 1..=5 {
            let mut cache = SchubertCache::new(n);
            for g in noncrossing(n) {
                let su = cache.beta_double(&g.u_perm().unwrap()).reverse_y();
                let sv = cache.beta_double(&g.v_perm().unwrap());
                crate::schubert::check_staircase(&(&su * &sv), n).unwrap();
            }
        }
    }
}
