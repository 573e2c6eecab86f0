//! Named verification suites with line-oriented, deterministic reports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::clan::{enumerate_clans, Clan};
use crate::grobner::{h_polynomial, initial_ideal, k_polynomial, multidegree, Budget, GbCheck, GbError, GbRing, KConvention, TermOrder};
use crate::ideals::{korbit_ideal, origin_on_zero_set, patch_ideal};
use crate::int::Int;
use crate::perm::Perm;
use crate::polyring::{MultiPoly, Var};
use crate::schubert::{check_staircase, Flavor, SchubertCache};
use crate::upsilon::{check_symmetry, UpsilonTable};

/// Υ_γ(X;Y) for the (2,2)-clans as published, one `clan<TAB>polynomial` row each.
pub const APPENDIX_2_2: &str = include_str!("../data/appendix_2_2.txt");

/// Version of the TSV report layout.
pub const TSV_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("suite {suite} needs (p,q) = {need:?}")]
    WrongSignature { suite: Suite, need: (usize, usize) },
    #[error("bad appendix row `{0}`")]
    BadRow(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Appendix,
    SelfConsistency,
    Symmetry,
    Degrees,
    Staircase,
    Multfree,
    GroebnerSweep,
    HpolySweep,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Appendix,
        Suite::SelfConsistency,
        Suite::Symmetry,
        Suite::Degrees,
        Suite::Staircase,
        Suite::Multfree,
        Suite::GroebnerSweep,
        Suite::HpolySweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Appendix => "appendix",
            Suite::SelfConsistency => "self-consistency",
            Suite::Symmetry => "symmetry",
            Suite::Degrees => "degrees",
            Suite::Staircase => "staircase",
            Suite::Multfree => "multfree",
            Suite::GroebnerSweep => "groebner-sweep",
            Suite::HpolySweep => "hpoly-sweep",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Suite, VerifyError> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| VerifyError::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Ok,
    Violation,
    /// Recorded without being a failure, e.g. a crossing clan whose
    /// generators are not a Gröbner basis.
    Noted,
    Budget,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Violation => "VIOLATION",
            Status::Noted => "noted",
            Status::Budget => "budget",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub item: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(item: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
        Check { item: item.into(), status: if ok { Status::Ok } else { Status::Violation }, detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub p: usize,
    pub q: usize,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(suite: Suite, p: usize, q: usize, checks: Vec<Check>) -> Report {
        Report { suite, p, q, checks }
    }

    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Violation)
    }

    /// No violations and nothing cut short by a budget.
    pub fn is_clean(&self) -> bool {
        self.count(Status::Violation) == 0 && self.count(Status::Budget) == 0
    }

    pub fn summary(&self) -> String {
        format!(
            "{} ({},{}): {}/{} ok, {} violations, {} noted, {} over budget",
            self.suite,
            self.p,
            self.q,
            self.count(Status::Ok),
            self.checks.len(),
            self.count(Status::Violation),
            self.count(Status::Noted),
            self.count(Status::Budget)
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&c.item);
            out.push_str("  ");
            out.push_str(c.status.name());
            if !c.detail.is_empty() {
                out.push_str("  ");
                out.push_str(&c.detail);
            }
            out.push('\n');
        }
        out.push_str(&self.summary());
        out.push('\n');
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("#clanpoly-tsv\t{TSV_VERSION}\tverify\t{}\t{}\t{}\n", self.suite, self.p, self.q);
        out.push_str("item\tstatus\tdetail\n");
        for c in &self.checks {
            out.push_str(&format!("{}\t{}\t{}\n", c.item, c.status.name(), c.detail));
        }
        out.push_str(&format!("#summary\t{}\n", self.summary()));
        out
    }
}

/// The rows of [`APPENDIX_2_2`].
pub fn appendix_rows() -> Result<Vec<(Clan, String)>, VerifyError> {
    APPENDIX_2_2
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (c, p) = l.split_once('\t').ok_or_else(|| VerifyError::BadRow(l.to_string()))?;
            let clan = c.parse().map_err(|_| VerifyError::BadRow(l.to_string()))?;
            Ok((clan, p.to_string()))
        })
        .collect()
}

fn digest(f: &MultiPoly) -> String {
    format!("{:016x}", f.fingerprint())
}

pub fn appendix(table: &UpsilonTable) -> Result<Report, VerifyError> {
    if (table.p(), table.q()) != (2, 2) {
        return Err(VerifyError::WrongSignature { suite: Suite::Appendix, need: (2, 2) });
    }
    let ring = table.ring();
    let mut checks = Vec::new();
    for (g, text) in appendix_rows()? {
        let want = MultiPoly::parse(ring, &text).map_err(|_| VerifyError::BadRow(text.clone()))?;
        let got = table.specialized(&g, Flavor::CohXY).map_err(|_| VerifyError::BadRow(g.to_string()))?;
        let ok = got == want;
        checks.push(Check::new(g.to_string(), ok, if ok { String::new() } else { format!("computed {got}") }));
    }
    Ok(Report::new(Suite::Appendix, 2, 2, checks))
}

/// Every weak-order edge and matchless entry, with a digest of each entry.
pub fn self_consistency(table: &UpsilonTable, cache: &mut SchubertCache) -> Report {
    let rep = table.verify_self_consistency(cache);
    let bad: Vec<(String, usize, String)> =
        rep.violations.iter().map(|v| (v.from.to_string(), v.i, v.to.to_string())).collect();
    let checks = rep
        .checked
        .iter()
        .map(|(from, i, to)| {
            let key = (from.to_string(), *i, to.to_string());
            let ok = !bad.contains(&key);
            let entry = table.get(to).expect("table clan");
            let item = if *i == 0 { format!("{to}") } else { format!("{from} -s{i}-> {to}") };
            let kind = if *i == 0 { "matchless" } else { "edge" };
            Check::new(item, ok, format!("{kind} terms={} digest={}", entry.len(), digest(entry)))
        })
        .collect();
    Report::new(Suite::SelfConsistency, table.p(), table.q(), checks)
}

/// `Υ_{−γ}(X;Y) = Υ_γ(X; y_n, …, y_1)`; `mirror` is the `(q, p)` table.
pub fn symmetry(table: &UpsilonTable, mirror: &UpsilonTable) -> Report {
    let bad = check_symmetry(table, mirror).unwrap_or_else(|_| table.clans().to_vec());
    let checks = table
        .clans()
        .iter()
        .map(|g| Check::new(format!("{g} ~ {}", g.negate()), !bad.contains(g), ""))
        .collect();
    Report::new(Suite::Symmetry, table.p(), table.q(), checks)
}

/// `deg Υ_γ(X) = pq − ℓ(γ)` and nonnegative coefficients.
pub fn degrees(table: &UpsilonTable) -> Report {
    let pq = table.p() * table.q();
    let checks = table
        .clans()
        .iter()
        .map(|g| {
            let h = table.specialized(g, Flavor::CohX).expect("table clan");
            let want = (pq - g.length()) as i32;
            let deg = h.total_degree();
            let pos = h.has_nonnegative_coefficients();
            let homog = h.terms().iter().all(|(m, _)| m.degree() == want);
            Check::new(
                g.to_string(),
                deg == Some(want) && pos && homog,
                format!("deg={} want={want} nonneg={pos} terms={}", deg.map_or("-".into(), |d| d.to_string()), h.len()),
            )
        })
        .collect();
    Report::new(Suite::Degrees, table.p(), table.q(), checks)
}

/// Matchless products are supported below the staircase.
pub fn staircase(table: &UpsilonTable) -> Report {
    let n = table.p() + table.q();
    let checks = table
        .clans()
        .iter()
        .filter(|g| g.is_matchless())
        .map(|g| {
            let r = check_staircase(table.get(g).expect("table clan"), n);
            Check::new(g.to_string(), r.is_ok(), r.err().map_or(String::new(), |e| e.to_string()))
        })
        .collect();
    Report::new(Suite::Staircase, table.p(), table.q(), checks)
}

/// Schubert expansion of `Υ_γ(X)` by lead-term subtraction, coefficients in
/// `{0,1}`; with `localization` also cross-checked against the equivariant
/// expansion of `Υ_γ(X;Y)` by localization, read at `Y = 0`.
pub fn multfree(table: &UpsilonTable, cache: &mut SchubertCache, localization: bool) -> Report {
    let checks = table
        .clans()
        .iter()
        .map(|g| {
            let h = table.specialized(g, Flavor::CohX).expect("table clan");
            let lead = match cache.expand_leading_term(&h) {
                Ok(e) => e,
                Err(e) => return Check::new(g.to_string(), false, e.to_string()),
            };
            let free = lead.values().all(|c| c.is_one());
            let terms: Vec<String> = lead.iter().map(|(w, c)| if c.is_one() { w.to_string() } else { format!("{c}*{w}") }).collect();
            let mut detail = terms.join(" + ");
            let mut ok = free;
            if localization {
                let f = table.specialized(g, Flavor::CohXY).expect("table clan");
                let agree = match cache.expand_localization(&f, false) {
                    Ok(e) => {
                        let at_zero: BTreeMap<Perm, Int> = e
                            .into_iter()
                            .map(|(w, c)| (w, c.set_zero(|v| matches!(v, Var::Y(_))).constant_term()))
                            .filter(|(_, c)| !c.is_zero())
                            .collect();
                        at_zero == lead
                    }
                    Err(_) => false,
                };
                ok &= agree;
                detail.push_str(if agree { "  [localization agrees]" } else { "  [localization differs]" });
            }
            Check::new(g.to_string(), ok, detail)
        })
        .collect();
    Report::new(Suite::Multfree, table.p(), table.q(), checks)
}

/// Raw-generator Gröbner status under `≺_{p,q}`, squarefreeness, and when a
/// table is given, multidegree and K-polynomial against `Υ_γ`.
///
/// Non-crossing clans must pass outright; crossing clans whose generators
/// are not a Gröbner basis are noted, and their initial ideal is computed.
pub fn groebner_sweep(p: usize, q: usize, table: Option<&UpsilonTable>, budget: &Budget) -> Report {
    let clans = enumerate_clans(p, q);
    let checks = clans.par_iter().map(|g| groebner_check(g, table, budget)).collect();
    Report::new(Suite::GroebnerSweep, p, q, checks)
}

fn groebner_check(g: &Clan, table: Option<&UpsilonTable>, budget: &Budget) -> Check {
    let item = g.to_string();
    let gb = GbRing::new(TermOrder::clan_order(g.p(), g.q())).expect("at most 64 variables");
    let ideal = korbit_ideal(g);
    let init = match initial_ideal(&gb, &ideal, budget) {
        Ok(i) => i,
        Err(GbError::BudgetExceeded { pairs, basis }) => {
            return Check { item, status: Status::Budget, detail: format!("stopped after {pairs} pairs, basis {basis}") }
        }
        Err(e) => return Check::new(item, false, e.to_string()),
    };
    let sqfree = init.leading.is_squarefree();
    let raw = match init.raw {
        GbCheck::Groebner => "gb".to_string(),
        GbCheck::Witness { i, j } => format!("not-gb(S{i},{j})"),
    };
    let mut detail = format!(
        "gens={} raw={raw} lead={} sqfree={sqfree} codims={:?}",
        ideal.len(),
        init.leading.generators().len(),
        init.leading.codim_histogram()
    );
    let noncrossing = g.is_noncrossing();
    let mut ok = !noncrossing || (init.raw == GbCheck::Groebner && sqfree);
    if let Some(t) = table {
        let ring = t.ring();
        let md = multidegree(&gb, &init.leading, ring) == t.specialized(g, Flavor::CohXY).expect("table clan");
        let k = k_polynomial(&gb, &init.leading, ring, KConvention::XOverY)
            == t.specialized(g, Flavor::KXY).expect("table clan");
        detail.push_str(&format!(" mdeg={} K={}", if md { "ok" } else { "differs" }, if k { "ok" } else { "differs" }));
        ok &= md && k;
    }
    let status = match (ok, init.raw == GbCheck::Groebner) {
        (false, _) => Status::Violation,
        (true, false) => Status::Noted,
        (true, true) => Status::Ok,
    };
    Check { item, status, detail }
}

/// For every pair of `(p, q)`-clans: the origin of the patch lies on the
/// zero set exactly when `β ⪯ γ`; then `H_{β,γ}(0) = 1`, `H ≥ 0`, and
/// `H = 1` for `β = γ` and for the open clan over a closed one.
pub fn hpoly_sweep(p: usize, q: usize, budget: &Budget) -> Report {
    let clans = enumerate_clans(p, q);
    let top = clans.iter().map(|g| g.length()).max().unwrap_or(0);
    let pairs: Vec<(&Clan, &Clan)> = clans.iter().flat_map(|g| clans.iter().map(move |b| (g, b))).collect();
    let checks = pairs.par_iter().map(|&(g, b)| hpoly_check(g, b, top, budget)).collect();
    Report::new(Suite::HpolySweep, p, q, checks)
}

fn hpoly_check(g: &Clan, b: &Clan, top: usize, budget: &Budget) -> Check {
    let leq = b.closure_leq(g).expect("same signature");
    let on = origin_on_zero_set(&patch_ideal(g, b).expect("same signature"));
    if !leq {
        return Check::new(format!("{b} !<= {g}"), !on, if on { "origin on zero set" } else { "" });
    }
    let item = format!("{b} <= {g}");
    if !on {
        return Check::new(item, false, "origin off zero set");
    }
    match h_polynomial(g, b, budget) {
        Ok(h) => {
            let anchor = b == g || (g.length() == top && b.is_matchless());
            let ok = h.at_zero().is_one() && h.is_nonnegative() && (!anchor || h.is_one());
            let tag = if g.is_noncrossing() { " noncrossing" } else { "" };
            Check::new(item, ok, format!("H={h} mult={}{tag}", h.multiplicity()))
        }
        Err(GbError::BudgetExceeded { pairs, basis }) => {
            Check { item, status: Status::Budget, detail: format!("stopped after {pairs} pairs, basis {basis}") }
        }
        Err(e) => Check::new(item, false, e.to_string()),
    }
}

/// Runs `suite` from scratch for `(p, q)`.
pub fn run(suite: Suite, p: usize, q: usize, budget: &Budget) -> Result<Report, VerifyError> {
    let n = p + q;
    let mut cache = SchubertCache::new(n);
    match suite {
        Suite::Appendix => {
            if (p, q) != (2, 2) {
                return Err(VerifyError::WrongSignature { suite, need: (2, 2) });
            }
            appendix(&UpsilonTable::build_with(p, q, &mut cache))
        }
        Suite::SelfConsistency => {
            let t = UpsilonTable::build_with(p, q, &mut cache);
            Ok(self_consistency(&t, &mut cache))
        }
        Suite::Symmetry => {
            let t = UpsilonTable::build_with(p, q, &mut cache);
            let m = UpsilonTable::build_with(q, p, &mut cache);
            Ok(symmetry(&t, &m))
        }
        Suite::Degrees => Ok(degrees(&UpsilonTable::build_with(p, q, &mut cache))),
        Suite::Staircase => Ok(staircase(&UpsilonTable::build_with(p, q, &mut cache))),
        Suite::Multfree => {
            let t = UpsilonTable::build_with(p, q, &mut cache);
            Ok(multfree(&t, &mut cache, n <= 5))
        }
        Suite::GroebnerSweep => {
            let t = UpsilonTable::build_with(p, q, &mut cache);
            Ok(groebner_sweep(p, q, Some(&t), budget))
        }
        Suite::HpolySweep => Ok(hpoly_sweep(p, q, budget)),
    }
}
