//! β-double Schubert polynomials, their specializations, and expansion of
//! polynomials in the Schubert basis.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::int::Int;
use crate::perm::Perm;
use crate::polyring::{Monomial, MultiPoly, Ring, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchubertError {
    #[error("x-exponents exceed the staircase (n-1, ..., 1, 0): {0}")]
    Staircase(String),
    #[error("localization division is not exact at {0}")]
    InexactDivision(Perm),
    #[error("polynomial is not in the span of the Schubert basis: leftover term {0}")]
    NotInSpan(String),
}

/// Which member of the Schubert/Grothendieck family to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// `β` left symbolic.
    Beta,
    /// `β = 0`.
    CohXY,
    /// `β = 0`, `y = 0`.
    CohX,
    /// `β = 1`, `x_i ↦ 1 − x_i`, `y_j ↦ (1 − y_j)/y_j`.
    KXY,
    /// As `KXY`, then `y_j ↦ 1`.
    KX,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Beta => "beta",
            Flavor::CohXY => "coh",
            Flavor::CohX => "coh-single",
            Flavor::KXY => "K",
            Flavor::KX => "K-single",
        }
    }
}

/// Specializes a β-symbolic polynomial in the `xyb` ring.
pub fn specialize(f: &MultiPoly, flavor: Flavor) -> MultiPoly {
    let ring = f.ring().clone();
    let n = ring.n() as u16;
    match flavor {
        Flavor::Beta => f.clone(),
        Flavor::CohXY => f.set_zero(|v| v == Var::Beta),
        Flavor::CohX => f.set_zero(|v| matches!(v, Var::Beta | Var::Y(_))),
        Flavor::KXY | Flavor::KX => {
            let g = f.specialize(|v| v == Var::Beta, &Int::ONE);
            // y_j ↦ 1 after the substitution is y_j ↦ 0 before it
            let g = if flavor == Flavor::KX { g.set_zero(|v| matches!(v, Var::Y(_))) } else { g };
            let one = MultiPoly::one(&ring);
            let mut rules = Vec::new();
            for i in 1..=n {
                rules.push((Var::X(i), &one - &MultiPoly::var(&ring, Var::X(i))));
                if flavor == Flavor::KXY {
                    let inv = MultiPoly::monomial(&ring, &[(Var::Y(i), -1)], Int::ONE);
                    rules.push((Var::Y(i), &inv - &one));
                }
            }
            g.substitute(&rules).expect("Grothendieck substitution stays Laurent")
        }
    }
}

/// `x_i − y_j + β x_i y_j`.
pub fn beta_factor(ring: &Arc<Ring>, i: usize, j: usize) -> MultiPoly {
    let (x, y) = (Var::X(i as u16), Var::Y(j as u16));
    let xy = MultiPoly::monomial(ring, &[(x, 1), (y, 1), (Var::Beta, 1)], Int::ONE);
    &(&MultiPoly::var(ring, x) - &MultiPoly::var(ring, y)) + &xy
}

/// Memoized `𝔖^(β)_w(X;Y)` for permutations of a fixed size.
pub struct SchubertCache {
    n: usize,
    ring: Arc<Ring>,
    memo: FxHashMap<Perm, MultiPoly>,
}

impl SchubertCache {
    pub fn new(n: usize) -> SchubertCache {
        SchubertCache { n, ring: Ring::xyb(n), memo: FxHashMap::default() }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `𝔖^(β)_w(X;Y)`.
    ///
    /// Dominant permutations are products over their diagram; every other
    /// `w` is reached by `∂^(β)_i` from `w s_i` along a shortest upward walk
    /// in weak order to a dominant permutation.
    pub fn beta_double(&mut self, w: &Perm) -> MultiPoly {
        assert_eq!(w.n(), self.n, "permutation size does not match the cache");
        if let Some(f) = self.memo.get(w) {
            return f.clone();
        }
        let f = if w.is_dominant() {
            self.diagram_product(w)
        } else {
            let i = nearest_dominant_step(w);
            let up = self.beta_double(&w.mul_s_right(i));
            up.beta_divided_difference(i)
        };
        self.memo.insert(w.clone(), f.clone());
        f
    }

    fn diagram_product(&self, w: &Perm) -> MultiPoly {
        w.rothe_diagram()
            .into_iter()
            .fold(MultiPoly::one(&self.ring), |acc, (i, j)| &acc * &beta_factor(&self.ring, i, j))
    }

    pub fn polynomial(&mut self, w: &Perm, flavor: Flavor) -> MultiPoly {
        specialize(&self.beta_double(w), flavor)
    }

    pub fn double_schubert(&mut self, w: &Perm) -> MultiPoly {
        self.polynomial(w, Flavor::CohXY)
    }

    pub fn single_schubert(&mut self, w: &Perm) -> MultiPoly {
        self.polynomial(w, Flavor::CohX)
    }

    pub fn double_grothendieck(&mut self, w: &Perm) -> MultiPoly {
        self.polynomial(w, Flavor::KXY)
    }

    pub fn single_grothendieck(&mut self, w: &Perm) -> MultiPoly {
        self.polynomial(w, Flavor::KX)
    }

    /// Localization of `f` at the fixed point `σ`.
    ///
    /// At `β = 0` this is `f(Y_σ; Y)`. In the β-family the factor
    /// `x − y + βxy` vanishes at `x = y/(1 + βy)` rather than `x = y`, so we
    /// evaluate at `x_i = y_{σ(i)}/(1 + βy_{σ(i)})` and clear denominators
    /// with the fixed factor `Π_i (1 + βy_{σ(i)})^{n−i}`; this needs the
    /// staircase bound on `f`.
    pub fn localize(&self, f: &MultiPoly, sigma: &Perm, beta: bool) -> MultiPoly {
        if !beta {
            return f.evaluate_x_at_y_perm(sigma.one_line());
        }
        let ring = &self.ring;
        let n = self.n;
        let mut powers: Vec<Vec<MultiPoly>> = Vec::with_capacity(n + 1);
        powers.push(Vec::new());
        for j in 1..=n {
            let base = &MultiPoly::one(ring) + &MultiPoly::monomial(ring, &[(Var::Beta, 1), (Var::Y(j as u16), 1)], Int::ONE);
            let mut row = vec![MultiPoly::one(ring)];
            for k in 1..n {
                row.push(&row[k - 1] * &base);
            }
            powers.push(row);
        }
        let mut acc = MultiPoly::zero(ring);
        for (a, c) in f.coefficients_in(|v| matches!(v, Var::X(_))) {
            let mut ys = Vec::new();
            let mut factor = c;
            for i in 1..=n {
                let (e, j) = (a[i - 1], sigma.at(i));
                ys.push((Var::Y(j as u16), e));
                factor = &factor * &powers[j][n - i - e as usize];
            }
            acc = &acc + &factor.mul_monomial(&MultiPoly::monomial(ring, &ys, Int::ONE).terms()[0].0, &Int::ONE);
        }
        acc
    }

    /// Expands `f` as `Σ c_w(Y, β) 𝔖_w(X;Y)` by localization.
    ///
    /// `beta` selects the β-symbolic basis; otherwise the `β = 0` basis.
    /// Permutations are visited along a linear extension of Bruhat order:
    /// at `π` the localized remainder is `c_π` times the localized `𝔖_π`.
    pub fn expand_localization(&mut self, f: &MultiPoly, beta: bool) -> Result<BTreeMap<Perm, MultiPoly>, SchubertError> {
        check_staircase(f, self.n)?;
        let mut rest = if beta { f.clone() } else { f.set_zero(|v| v == Var::Beta) };
        let mut out = BTreeMap::new();
        for pi in Perm::bruhat_linear_extension(self.n) {
            if rest.is_zero() {
                break;
            }
            let local = self.localize(&rest, &pi, beta);
            if local.is_zero() {
                continue;
            }
            let basis = if beta { self.beta_double(&pi) } else { self.double_schubert(&pi) };
            let denom = self.localize(&basis, &pi, beta);
            let c = local.div_exact(&denom).map_err(|_| SchubertError::InexactDivision(pi.clone()))?;
            rest = &rest - &(&c * &basis);
            out.insert(pi, c);
        }
        if !rest.is_zero() {
            return Err(SchubertError::NotInSpan(rest.to_string()));
        }
        Ok(out)
    }

    /// Expands a polynomial in `X` alone in the single Schubert basis by
    /// repeatedly stripping the lex-leading term `x^{code(w)}`.
    pub fn expand_leading_term(&mut self, f: &MultiPoly) -> Result<BTreeMap<Perm, Int>, SchubertError> {
        let n = self.n;
        let xs: Vec<usize> = (1..=n).map(|i| self.ring.index(Var::X(i as u16)).expect("x var")).collect();
        let mut rest = f.clone();
        let mut out = BTreeMap::new();
        while let Some((m, c)) = leading_x_term(&rest, &xs) {
            let code: Vec<usize> = xs.iter().map(|&k| m.0[k] as usize).collect();
            if m.0.iter().enumerate().any(|(k, &e)| e != 0 && !xs.contains(&k)) {
                return Err(SchubertError::NotInSpan(rest.to_string()));
            }
            let w = perm_from_code(&code).ok_or_else(|| SchubertError::NotInSpan(rest.to_string()))?;
            let s = self.single_schubert(&w);
            rest = &rest - &s.scale(&c);
            out.insert(w, c);
        }
        Ok(out)
    }
}

/// First step of a shortest upward weak-order walk to a dominant permutation.
fn nearest_dominant_step(w: &Perm) -> usize {
    let mut seen: FxHashMap<Perm, usize> = FxHashMap::default();
    let mut queue = VecDeque::new();
    for i in 1..w.n() {
        if w.at(i) < w.at(i + 1) {
            let up = w.mul_s_right(i);
            if up.is_dominant() {
                return i;
            }
            if !seen.contains_key(&up) {
                seen.insert(up.clone(), i);
                queue.push_back(up);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        let first = seen[&v];
        for i in 1..v.n() {
            if v.at(i) < v.at(i + 1) {
                let up = v.mul_s_right(i);
                if up.is_dominant() {
                    return first;
                }
                if !seen.contains_key(&up) {
                    seen.insert(up.clone(), first);
                    queue.push_back(up);
                }
            }
        }
    }
    unreachable!("the long element is dominant")
}

/// `𝔖^(β)_w` by the literal descent from the long element, taking the
/// smallest ascent at each step; no shortcuts, no memo.
pub fn beta_double_from_top(w: &Perm) -> MultiPoly {
    let n = w.n();
    let ring = Ring::xyb(n);
    let mut steps = Vec::new();
    let mut cur = w.clone();
    while let Some(i) = (1..n).find(|&i| cur.at(i) < cur.at(i + 1)) {
        steps.push(i);
        cur = cur.mul_s_right(i);
    }
    let mut f = MultiPoly::one(&ring);
    for i in 1..n {
        for j in 1..=n - i {
            f = &f * &beta_factor(&ring, i, j);
        }
    }
    for &i in steps.iter().rev() {
        f = f.beta_divided_difference(i);
    }
    f
}

/// Lex order with `x_n > … > x_1` on the x-exponents.
fn leading_x_term(f: &MultiPoly, xs: &[usize]) -> Option<(Monomial, Int)> {
    f.terms()
        .iter()
        .max_by(|a, b| {
            let ka = xs.iter().rev().map(|&k| a.0 .0[k]);
            let kb = xs.iter().rev().map(|&k| b.0 .0[k]);
            ka.cmp(kb)
        })
        .cloned()
}

/// Inverse of the Lehmer code, if `code` is a code of some `w ∈ S_n`.
pub fn perm_from_code(code: &[usize]) -> Option<Perm> {
    let n = code.len();
    let mut avail: Vec<u8> = (1..=n as u8).collect();
    let mut w = Vec::with_capacity(n);
    for &c in code {
        if c >= avail.len() {
            return None;
        }
        w.push(avail.remove(c));
    }
    Perm::new(w).ok()
}

/// Every x-monomial must be bounded by `(n−1, …, 1, 0)`.
pub fn check_staircase(f: &MultiPoly, n: usize) -> Result<(), SchubertError> {
    for (m, _) in f.terms() {
        for i in 1..=n {
            let k = f.ring().index(Var::X(i as u16)).expect("x var");
            if m.0[k] as i64 > (n - i) as i64 {
                return Err(SchubertError::Staircase(
                    MultiPoly::from_terms(f.ring(), [(m.clone(), Int::ONE)]).to_string(),
                ));
            }
        }
    }
    Ok(())
}
