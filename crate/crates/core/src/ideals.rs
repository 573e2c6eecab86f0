//! Determinantal ideals of K-orbit closures and their patch charts.

use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::clan::{Clan, Sym};
use crate::int::Int;
use crate::perm::Perm;
use crate::polyring::{Monomial, MultiPoly, Ring, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("{sigma} is not {clan}-shuffled")]
    NotShuffled { clan: Clan, sigma: Perm },
    #[error("clans {0} and {1} have different signatures")]
    SignatureMismatch(Clan, Clan),
}

/// A dense grid of polynomials in the `z` ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> MultiPoly) -> PolyMatrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 1..=rows {
            for j in 1..=cols {
                entries.push(f(i, j));
            }
        }
        PolyMatrix { rows, cols, entries }
    }

    /// The generic matrix `M_n` with entries `z_{ij}`.
    pub fn generic(ring: &Arc<Ring>) -> PolyMatrix {
        let n = ring.n();
        PolyMatrix::from_fn(n, n, |i, j| MultiPoly::var(ring, Var::Z(i as u16, j as u16)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry `(i, j)`, 1-based.
    pub fn at(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[(i - 1) * self.cols + (j - 1)]
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        let ring = self.entries[0].ring().clone();
        PolyMatrix::from_fn(self.rows, other.cols, |i, j| {
            (1..=self.cols).fold(MultiPoly::zero(&ring), |acc, k| &acc + &(self.at(i, k) * other.at(k, j)))
        })
    }

    /// Determinant of the submatrix on `rows × cols` (1-based, same length).
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> MultiPoly {
        assert_eq!(rows.len(), cols.len());
        let ring = self.entries[0].ring().clone();
        // Laplace expansion along the last row, memoized on column subsets
        let k = rows.len();
        let mut level: Vec<(u32, MultiPoly)> = vec![(0, MultiPoly::one(&ring))];
        for (t, &r) in rows.iter().enumerate() {
            let mut next: std::collections::BTreeMap<u32, MultiPoly> = std::collections::BTreeMap::new();
            for (mask, d) in &level {
                if d.is_zero() {
                    continue;
                }
                for (ci, &c) in cols.iter().enumerate() {
                    if mask & (1 << ci) != 0 {
                        continue;
                    }
                    let e = self.at(r, c);
                    if e.is_zero() {
                        continue;
                    }
                    // sign of placing column ci after the columns already used
                    let after = (mask >> ci).count_ones() - (mask >> ci & 1);
                    let above = (mask & !((1u32 << ci) - 1)).count_ones();
                    debug_assert_eq!(after, above);
                    let term = d * e;
                    let slot = next.entry(mask | (1 << ci)).or_insert_with(|| MultiPoly::zero(&ring));
                    *slot = if above % 2 == 0 { &*slot + &term } else { &*slot - &term };
                }
            }
            let _ = t;
            level = next.into_iter().collect();
        }
        let full = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
        level.into_iter().find(|(m, _)| *m == full).map(|(_, d)| d).unwrap_or_else(|| MultiPoly::zero(&ring))
    }

    /// The matrix with `z_{ij}` replaced by entry `(i,j)` of `point`.
    pub fn evaluate(&self, point: &[Vec<i64>]) -> Vec<Vec<Int>> {
        (1..=self.rows)
            .map(|i| (1..=self.cols).map(|j| eval_at(self.at(i, j), point)).collect())
            .collect()
    }
}

/// Value of a `z`-polynomial at a numeric matrix.
pub fn eval_at(f: &MultiPoly, point: &[Vec<i64>]) -> Int {
    let g = f.evaluate(|v| match v {
        Var::Z(i, j) => Some(Int::from(point[i as usize - 1][j as usize - 1])),
        _ => None,
    });
    g.as_constant().expect("only z variables")
}

/// `R_+`, `R_−` and the upper-triangular `W` (zero on and below the diagonal).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankVectors {
    pub r_plus: Vec<usize>,
    pub r_minus: Vec<usize>,
    pub w: Vec<Vec<usize>>,
}

impl RankVectors {
    /// `W_{ij}`, 1-based, `i < j`.
    pub fn w(&self, i: usize, j: usize) -> usize {
        self.w[i - 1][j - 1]
    }
}

pub fn rank_vectors(g: &Clan) -> RankVectors {
    let n = g.n();
    let d = g.rank_data();
    let r_plus = (1..=n).map(|i| i + 1 - d.plus(i)).collect();
    let r_minus = (1..=n).map(|i| i + 1 - d.minus(i)).collect();
    let mut w = vec![vec![0; n]; n];
    for i in 1..=n {
        for j in i + 1..=n {
            w[i - 1][j - 1] = j + d.cross(i, j) + 1;
        }
    }
    RankVectors { r_plus, r_minus, w }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Lower-left `q × i` block.
    RPlus,
    /// Upper-left `p × i` block.
    RMinus,
    /// The matrix `P_{i,j}`.
    W,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::RPlus => "R+",
            Family::RMinus => "R-",
            Family::W => "W",
        })
    }
}

/// Where a generator came from; rows and columns refer to the family's matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub family: Family,
    pub i: usize,
    pub j: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct IdealPresentation {
    pub ring: Arc<Ring>,
    /// Variables allowed to appear, in ring order.
    pub variables: Vec<Var>,
    pub generators: Vec<MultiPoly>,
    pub provenance: Vec<Provenance>,
}

impl IdealPresentation {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Generators of the given families only.
    pub fn restrict(&self, families: &[Family]) -> IdealPresentation {
        let keep: Vec<usize> =
            (0..self.len()).filter(|&k| families.contains(&self.provenance[k].family)).collect();
        IdealPresentation {
            ring: self.ring.clone(),
            variables: self.variables.clone(),
            generators: keep.iter().map(|&k| self.generators[k].clone()).collect(),
            provenance: keep.iter().map(|&k| self.provenance[k].clone()).collect(),
        }
    }

    /// One generator per line, canonical text.
    pub fn to_text(&self) -> String {
        self.generators.iter().map(|g| format!("{g}\n")).collect()
    }

    /// A Macaulay2 script declaring the ring and the ideal.
    pub fn cas_script(&self, name: &str) -> String {
        let n = self.ring.n();
        let vars: Vec<String> = self.variables.iter().map(|v| v.name(n)).collect();
        let gens: Vec<String> = self.generators.iter().map(|g| format!("  {}", m2_text(g))).collect();
        format!("R = QQ[{}];\n{name} = ideal(\n{}\n);\n", vars.join(", "), gens.join(",\n"))
    }
}

fn m2_text(g: &MultiPoly) -> String {
    g.to_string()
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..items.len() {
            if items.len() - s < k - cur.len() {
                break;
            }
            cur.push(items[s]);
            go(items, k, s + 1, cur, out);
            cur.pop();
        }
    }
    go(items, k, 0, &mut cur, &mut out);
    out
}

/// Positive leading coefficient (in the ring's internal term order).
fn normalize_sign(f: MultiPoly) -> MultiPoly {
    match f.terms().last() {
        Some((_, c)) if c.is_negative() => -&f,
        _ => f,
    }
}

struct Collector {
    seen: FxHashSet<Vec<(Monomial, Int)>>,
    generators: Vec<MultiPoly>,
    provenance: Vec<Provenance>,
}

impl Collector {
    fn push(&mut self, f: MultiPoly, prov: Provenance) {
        if f.is_zero() {
            return;
        }
        let f = normalize_sign(f);
        if self.seen.insert(f.terms().to_vec()) {
            self.generators.push(f);
            self.provenance.push(prov);
        }
    }

    fn minors(&mut self, m: &PolyMatrix, k: usize, family: Family, i: usize, j: usize) {
        if k == 0 || k > m.rows().min(m.cols()) {
            return;
        }
        let all_rows: Vec<usize> = (1..=m.rows()).collect();
        let all_cols: Vec<usize> = (1..=m.cols()).collect();
        let col_sets = subsets(&all_cols, k);
        for rows in subsets(&all_rows, k) {
            for cols in &col_sets {
                let f = m.minor(&rows, cols);
                self.push(f, Provenance { family, i, j, rows: rows.clone(), cols: cols.clone() });
            }
        }
    }
}

fn submatrix(m: &PolyMatrix, rows: std::ops::RangeInclusive<usize>, cols: usize) -> PolyMatrix {
    let r0 = *rows.start();
    let nr = rows.end() + 1 - r0;
    PolyMatrix::from_fn(nr, cols, |i, j| m.at(r0 + i - 1, j).clone())
}

/// `P_{i,j}`: `[[A_i, B_j]]` with `A_i` the first `i` columns with the bottom `q` rows
/// zeroed and `B_j` the first `j` columns.
pub fn p_matrix(m: &PolyMatrix, p: usize, i: usize, j: usize) -> PolyMatrix {
    let ring = m.at(1, 1).ring().clone();
    PolyMatrix::from_fn(m.rows(), i + j, |r, c| {
        if c <= i {
            if r <= p {
                m.at(r, c).clone()
            } else {
                MultiPoly::zero(&ring)
            }
        } else {
            m.at(r, c - i).clone()
        }
    })
}

fn minor_recipe(g: &Clan, m: &PolyMatrix, ring: &Arc<Ring>, variables: Vec<Var>) -> IdealPresentation {
    let (p, q, n) = (g.p(), g.q(), g.n());
    let rv = rank_vectors(g);
    let mut col = Collector { seen: FxHashSet::default(), generators: Vec::new(), provenance: Vec::new() };
    for i in 1..=n {
        if q > 0 {
            col.minors(&submatrix(m, p + 1..=n, i), rv.r_plus[i - 1], Family::RPlus, i, 0);
        }
    }
    for i in 1..=n {
        if p > 0 {
            col.minors(&submatrix(m, 1..=p, i), rv.r_minus[i - 1], Family::RMinus, i, 0);
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let k = rv.w(i, j);
            if k <= n.min(i + j) {
                col.minors(&p_matrix(m, p, i, j), k, Family::W, i, j);
            }
        }
    }
    IdealPresentation { ring: ring.clone(), variables, generators: col.generators, provenance: col.provenance }
}

/// Generators (i)–(iii) of `I_γ` in the generic matrix.
pub fn korbit_ideal(g: &Clan) -> IdealPresentation {
    let ring = Ring::z(g.n());
    let m = PolyMatrix::generic(&ring);
    let vars = ring.vars().to_vec();
    minor_recipe(g, &m, &ring, vars)
}

/// `F^{γ,σ}`: column `i` is `e_{σ(i)}`, plus `e_{σ(j)}` when `i` is the left end of an arc to `j`.
pub fn representative_flag_matrix(g: &Clan, sigma: &Perm) -> Result<Vec<Vec<i64>>, IdealError> {
    if !g.is_shuffled(sigma) {
        return Err(IdealError::NotShuffled { clan: g.clone(), sigma: sigma.clone() });
    }
    let n = g.n();
    let mut f = vec![vec![0i64; n]; n];
    for (i, s) in g.symbols().iter().enumerate() {
        f[sigma.at(i + 1) - 1][i] = 1;
        if let Sym::Left(m) = s {
            f[sigma.at(*m as usize + 1) - 1][i] = 1;
        }
    }
    Ok(f)
}

/// Free coordinates of `M_{n,σ}`: `(i, j)` with `i ≠ σ(j)` and `j ≤ σ⁻¹(i)`.
pub fn chart_variables(sigma: &Perm) -> Vec<Var> {
    let n = sigma.n();
    let inv = sigma.inverse();
    let mut vars = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != sigma.at(j) && j <= inv.at(i) {
                vars.push(Var::Z(i as u16, j as u16));
            }
        }
    }
    vars
}

/// `M_{n,σ}`: 1 at `(σ(j), j)`, 0 right of the 1 in each row, free elsewhere.
pub fn chart_matrix(ring: &Arc<Ring>, sigma: &Perm) -> PolyMatrix {
    let inv = sigma.inverse();
    PolyMatrix::from_fn(sigma.n(), sigma.n(), |i, j| {
        if i == sigma.at(j) {
            MultiPoly::one(ring)
        } else if j > inv.at(i) {
            MultiPoly::zero(ring)
        } else {
            MultiPoly::var(ring, Var::Z(i as u16, j as u16))
        }
    })
}

/// `M_{n,β} = L_β M_{n,v(β)}`, where `L_β` has 1's on the diagonal and at
/// `(v(j), v(i))` for every arc `i < j`.
pub fn patch_matrix(beta: &Clan) -> PolyMatrix {
    let n = beta.n();
    let ring = Ring::z(n);
    let v = beta.v_labelling();
    let arcs = beta.arcs();
    let l = PolyMatrix::from_fn(n, n, |r, c| {
        let hit = r == c || arcs.iter().any(|&(i, j)| r == v.at(j) && c == v.at(i));
        if hit {
            MultiPoly::one(&ring)
        } else {
            MultiPoly::zero(&ring)
        }
    });
    l.mul(&chart_matrix(&ring, &v))
}

/// `I_{γ,β}`: the minor recipe of `I_γ` applied to `M_{n,β}`.
pub fn patch_ideal(g: &Clan, beta: &Clan) -> Result<IdealPresentation, IdealError> {
    if g.p() != beta.p() || g.q() != beta.q() {
        return Err(IdealError::SignatureMismatch(g.clone(), beta.clone()));
    }
    let m = patch_matrix(beta);
    let ring = m.at(1, 1).ring().clone();
    let vars = chart_variables(&beta.v_labelling());
    Ok(minor_recipe(g, &m, &ring, vars))
}

/// Whether every generator vanishes at `z = 0`.
pub fn origin_on_zero_set(ideal: &IdealPresentation) -> bool {
    ideal.generators.iter().all(|g| g.constant_term().is_zero())
}

/// Rank over ℚ of the Jacobian matrix of the generators at `z = 0`.
pub fn jacobian_rank_at_origin(ideal: &IdealPresentation) -> usize {
    let ring = &ideal.ring;
    let idx: Vec<usize> = ideal.variables.iter().map(|v| ring.index(*v).expect("chart variable")).collect();
    let mut rows: Vec<Vec<Int>> = ideal
        .generators
        .iter()
        .map(|g| {
            let mut row = vec![Int::ZERO; idx.len()];
            for (m, c) in g.terms() {
                if m.degree() == 1 {
                    if let Some(pos) = idx.iter().position(|&k| m.0[k] == 1) {
                        row[pos] = c.clone();
                    }
                }
            }
            row
        })
        .collect();
    integer_rank(&mut rows)
}

/// Fraction-free row reduction.
pub fn integer_rank(rows: &mut [Vec<Int>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, piv);
        let pivot_row = rows[rank].clone();
        for r in rank + 1..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let a = pivot_row[c].clone();
            let b = rows[r][c].clone();
            for k in c..ncols {
                rows[r][k] = &(&rows[r][k] * &a) - &(&pivot_row[k] * &b);
            }
            let g = rows[r].iter().fold(Int::ZERO, |g, x| g.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for x in rows[r].iter_mut() {
                    *x = x.div_exact(&g).expect("content divides");
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clan::enumerate_clans;

    fn c(s: &str) -> Clan {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Perm {
        s.parse().unwrap()
    }

    #[test]
    fn rank_vectors_of_example() {
        let rv = rank_vectors(&c("11+-"));
        assert_eq!(rv.r_plus, vec![2, 2, 2, 3]);
        assert_eq!(rv.r_minus, vec![2, 2, 3, 3]);
        assert_eq!((rv.w(1, 2), rv.w(1, 3), rv.w(2, 3)), (3, 4, 4));
        assert!((1..4).all(|i| rv.w(i, 4) == 5));
        assert_eq!(rank_vectors(&c("1221")).r_plus, vec![2, 3, 3, 3]);
    }

    #[test]
    fn example_generators() {
        let ideal = korbit_ideal(&c("11+-"));
        let r = ideal.ring.clone();
        let rp: Vec<String> = ideal.restrict(&[Family::RPlus]).generators.iter().map(|g| g.to_string()).collect();
        assert_eq!(rp.len(), 3);
        let want = MultiPoly::parse(&r, "z31 z42 - z32 z41").unwrap();
        assert!(ideal.generators.contains(&want) || ideal.generators.contains(&-&want));
        let rm = ideal.restrict(&[Family::RMinus]);
        assert_eq!(rm.len(), 1);
        let nw = MultiPoly::parse(&r, "z11 z22 - z12 z21").unwrap();
        assert!(rm.generators[0] == nw || rm.generators[0] == -&nw);
        let fams: FxHashSet<(usize, usize)> = ideal
            .provenance
            .iter()
            .filter(|p| p.family == Family::W)
            .map(|p| (p.i, p.j))
            .collect();
        assert!(fams.iter().all(|ij| [(1, 2), (1, 3), (2, 3)].contains(ij)));
        // P_{2,3} is the displayed 4 × 5 matrix
        let m = PolyMatrix::generic(&r);
        let p23 = p_matrix(&m, 2, 2, 3);
        assert_eq!((p23.rows(), p23.cols()), (4, 5));
        assert!(p23.at(3, 2).is_zero());
        assert_eq!(p23.at(3, 3), &MultiPoly::var(&r, Var::Z(3, 1)));
        assert_eq!(p23.at(1, 4), &MultiPoly::var(&r, Var::Z(1, 2)));
    }

    #[test]
    fn matchless_and_open_clans() {
        let ideal = korbit_ideal(&c("--++"));
        // R+ = (2,3,3,3) is vacuous, R- = (1,1,2,3) kills the NW 2x2 block
        assert!(ideal.restrict(&[Family::RPlus]).is_empty());
        assert_eq!(ideal.restrict(&[Family::RMinus]).len(), 7);
        // W minors are nonzero here, though implied by the R family
        assert!(!ideal.restrict(&[Family::W]).is_empty());
        let open = korbit_ideal(&c("1221"));
        assert!(open.provenance.iter().all(|p| p.family == Family::W));
    }

    #[test]
    fn minors_match_leibniz() {
        let r = Ring::z(3);
        let m = PolyMatrix::generic(&r);
        let det = m.minor(&[1, 2, 3], &[1, 2, 3]);
        let want = MultiPoly::parse(
            &r,
            "z11 z22 z33 - z11 z23 z32 - z12 z21 z33 + z12 z23 z31 + z13 z21 z32 - z13 z22 z31",
        )
        .unwrap();
        assert_eq!(det, want);
        assert_eq!(m.minor(&[1, 3], &[2, 3]), MultiPoly::parse(&r, "z12 z33 - z13 z32").unwrap());
    }

    #[test]
    fn flag_matrices() {
        let f = representative_flag_matrix(&c("11+-"), &w("1324")).unwrap();
        assert_eq!(f, vec![vec![1, 0, 0, 0], vec![0, 0, 1, 0], vec![1, 1, 0, 0], vec![0, 0, 0, 1]]);
        let f = representative_flag_matrix(&c("+-"), &w("12")).unwrap();
        assert_eq!(f, vec![vec![1, 0], vec![0, 1]]);
        assert!(representative_flag_matrix(&c("+-"), &w("21")).is_err());
    }

    #[test]
    fn chart_of_example() {
        let m = patch_matrix(&c("11+-"));
        let r = m.at(1, 1).ring().clone();
        let col: Vec<MultiPoly> = (1..=4).map(|i| m.at(i, 1).clone()).collect();
        let want: Vec<MultiPoly> = ["1", "z21", "z31 + 1", "z41"].iter().map(|s| MultiPoly::parse(&r, s).unwrap()).collect();
        assert_eq!(col, want);
        let sigma = w("1324");
        assert_eq!(chart_variables(&sigma).len(), 6);
        let tau = c("+-+-");
        assert_eq!(patch_matrix(&tau), chart_matrix(&r, &tau.v_labelling()));
    }

    fn shuffles(g: &Clan) -> Vec<Perm> {
        Perm::all(g.n()).into_iter().filter(|s| g.is_shuffled(s)).collect()
    }

    #[test]
    fn vanishing_iff_closure_order() {
        for n in 2..=4 {
            for p in 0..=n {
                let clans = enumerate_clans(p, n - p);
                let ideals: Vec<IdealPresentation> = clans.iter().map(korbit_ideal).collect();
                for b in &clans {
                    let pts: Vec<Vec<Vec<i64>>> =
                        shuffles(b).iter().map(|s| representative_flag_matrix(b, s).unwrap()).collect();
                    for (g, ideal) in clans.iter().zip(&ideals) {
                        let leq = b.closure_leq(g).unwrap();
                        for pt in &pts {
                            let vanishes = ideal.generators.iter().all(|f| eval_at(f, pt).is_zero());
                            assert_eq!(vanishes, leq, "{b} ≤ {g}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn origin_of_patch_iff_closure_order() {
        for (p, q) in [(1, 1), (2, 1), (2, 2), (1, 3)] {
            let clans = enumerate_clans(p, q);
            for b in &clans {
                for g in &clans {
                    let ideal = patch_ideal(g, b).unwrap();
                    assert_eq!(origin_on_zero_set(&ideal), b.closure_leq(g).unwrap(), "{b} {g}");
                }
            }
        }
    }

    #[test]
    fn patch_at_own_orbit_is_smooth() {
        for (p, q) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
            for g in enumerate_clans(p, q) {
                let ideal = patch_ideal(&g, &g).unwrap();
                assert!(origin_on_zero_set(&ideal));
                let nvars = ideal.variables.len();
                assert_eq!(nvars - jacobian_rank_at_origin(&ideal), g.dimension(), "{g}");
            }
        }
    }

    #[test]
    fn cas_script_shape() {
        let ideal = korbit_ideal(&c("+-"));
        let s = ideal.cas_script("I");
        assert!(s.starts_with("R = QQ[z11, z12, z21, z22];\nI = ideal(\n"));
        assert!(s.ends_with("\n);\n"));
        assert_eq!(ideal.to_text().lines().count(), ideal.len());
    }
}
