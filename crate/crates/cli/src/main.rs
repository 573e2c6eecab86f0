//! `clanpoly`: clans, their polynomials, ideals and the verification suites.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clanpoly::grobner::{
    h_polynomial, initial_ideal, k_polynomial, multidegree, Budget, GbCheck, GbError, GbRing, KConvention, TermOrder,
};
use clanpoly::ideals::{korbit_ideal, patch_ideal, IdealPresentation};
use clanpoly::schubert::specialize;
use clanpoly::verify::{self, Report, Status, Suite, TSV_VERSION};
use clanpoly::{enumerate_clans, upsilon, Clan, Flavor, Int, Ring, SchubertCache, WeakOrderGraph};
use clap::{Args, Parser, Subcommand, ValueEnum};

const OK: u8 = 0;
const VIOLATION: u8 = 1;
const BAD_INPUT: u8 = 2;
const OVER_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "clanpoly", version, about = "Polynomials and ideals of GL_p x GL_q orbit closures on the flag variety")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: Config,
}

#[derive(Args, Debug, Clone)]
struct Config {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Largest p+q accepted.
    #[arg(long, default_value_t = 8, global = true)]
    max_n: usize,
    /// S-pair cap for each Gröbner computation.
    #[arg(long, env = "CLANPOLY_BUDGET_PAIRS", default_value_t = 200_000, global = true)]
    budget_pairs: usize,
    /// Skip S-pairs whose lcm has larger total degree.
    #[arg(long, global = true)]
    budget_degree: Option<u32>,
    /// Wall-clock cap in seconds for each Gröbner computation.
    #[arg(long, global = true)]
    budget_timeout: Option<u64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FlavorArg {
    /// Υ(X;Y)
    Coh,
    /// Υ(X)
    CohSingle,
    /// Υ^K(X;Y)
    #[value(name = "K")]
    K,
    /// Υ^K(X)
    #[value(name = "K-single")]
    KSingle,
    /// Υ^(β)(X;Y)
    Beta,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Flavor {
        match f {
            FlavorArg::Coh => Flavor::CohXY,
            FlavorArg::CohSingle => Flavor::CohX,
            FlavorArg::K => Flavor::KXY,
            FlavorArg::KSingle => Flavor::KX,
            FlavorArg::Beta => Flavor::Beta,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    /// Lex order reading the bottom q rows, then the top p rows.
    Clan,
    /// Graded reverse lex on the same variable ranking.
    Grevlex,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Υ(X) in single Schubert polynomials by stripping leading terms.
    Leading,
    /// Υ(X;Y) in double Schubert polynomials by localization.
    Localization,
}

#[derive(Args, Debug)]
struct Signature {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    q: usize,
}

#[derive(Args, Debug)]
struct ClanArg {
    /// Clan in one-line notation, e.g. 1+-1 or 11+-.
    #[arg(long, allow_hyphen_values = true)]
    clan: String,
    /// Expected p; checked against the clan when given.
    #[arg(long)]
    p: Option<usize>,
    /// Expected q, checked the same way.
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the (p,q)-clans with length and orbit dimension.
    Clans(Signature),
    /// Covering relations of the weak order.
    WeakOrder(Signature),
    /// The polynomial Υ of a clan.
    Upsilon {
        #[command(flatten)]
        clan: ClanArg,
        #[arg(long, value_enum, default_value_t = FlavorArg::Coh)]
        flavor: FlavorArg,
    },
    /// Schubert-basis expansion of Υ.
    Expand {
        #[command(flatten)]
        clan: ClanArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Leading)]
        method: MethodArg,
    },
    /// Generators of the orbit-closure ideal, or of a patch when --patch-clan is given.
    Ideal {
        #[command(flatten)]
        clan: ClanArg,
        #[arg(long, allow_hyphen_values = true)]
        patch_clan: Option<String>,
        /// Also write a Macaulay2 script here.
        #[arg(long)]
        cas: Option<PathBuf>,
    },
    /// Gröbner status, initial ideal, components, multidegree and K-polynomial.
    Groebner {
        #[command(flatten)]
        clan: ClanArg,
        #[arg(long, value_enum, default_value_t = OrderArg::Clan)]
        order: OrderArg,
    },
    /// H-polynomial of the patch of Y_clan at the point indexed by --patch-clan.
    Hpoly {
        #[command(flatten)]
        clan: ClanArg,
        #[arg(long, allow_hyphen_values = true)]
        patch_clan: String,
    },
    /// Run a named verification suite.
    Verify {
        /// appendix, self-consistency, symmetry, degrees, staircase, multfree, groebner-sweep or hpoly-sweep.
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[command(flatten)]
        sig: Signature,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|_| format!("expected one of: {}", Suite::ALL.map(|x| x.name()).join(", ")))
}

/// What a command prints and how it exits.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, code: OK }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io(_) => BAD_INPUT,
            CliError::Budget(_) => OVER_BUDGET,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn gb_error(e: GbError) -> CliError {
    match e {
        GbError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        e => CliError::Input(e.to_string()),
    }
}

impl Config {
    fn budget(&self) -> Budget {
        Budget {
            max_pairs: self.budget_pairs,
            max_degree: self.budget_degree,
            timeout: self.budget_timeout.map(Duration::from_secs),
        }
    }

    fn check_size(&self, p: usize, q: usize) -> Result<(), CliError> {
        if p + q > self.max_n {
            return Err(CliError::Input(format!("p+q = {} exceeds --max-n {}", p + q, self.max_n)));
        }
        if p + q == 0 {
            return Err(CliError::Input("p+q must be positive".into()));
        }
        Ok(())
    }

    fn clan(&self, a: &ClanArg) -> Result<Clan, CliError> {
        let g: Clan = a.clan.parse().map_err(input)?;
        if a.p.is_some_and(|p| p != g.p()) || a.q.is_some_and(|q| q != g.q()) {
            return Err(CliError::Input(format!("{g} is a ({},{})-clan", g.p(), g.q())));
        }
        self.check_size(g.p(), g.q())?;
        Ok(g)
    }

    fn header(&self, command: &str, fields: &[String]) -> String {
        let mut s = format!("#clanpoly-tsv\t{TSV_VERSION}\t{command}");
        for f in fields {
            s.push('\t');
            s.push_str(f);
        }
        s.push('\n');
        s
    }
}

fn cmd_clans(cfg: &Config, s: &Signature) -> Result<Outcome, CliError> {
    cfg.check_size(s.p, s.q)?;
    let mut out = String::new();
    if cfg.format == Format::Tsv {
        out.push_str(&cfg.header("clans", &[s.p.to_string(), s.q.to_string()]));
        out.push_str("clan\tlength\tdimension\n");
    }
    for g in enumerate_clans(s.p, s.q) {
        let sep = if cfg.format == Format::Tsv { "\t" } else { " " };
        writeln!(out, "{g}{sep}{}{sep}{}", g.length(), g.dimension()).unwrap();
    }
    Ok(Outcome::ok(out))
}

fn cmd_weak_order(cfg: &Config, s: &Signature) -> Result<Outcome, CliError> {
    cfg.check_size(s.p, s.q)?;
    let graph = WeakOrderGraph::build(s.p, s.q);
    let nodes = graph.nodes();
    let mut out = String::new();
    if cfg.format == Format::Tsv {
        out.push_str(&cfg.header("weak-order", &[s.p.to_string(), s.q.to_string()]));
        out.push_str("from\ti\tto\n");
        for &(f, i, t) in graph.edges() {
            writeln!(out, "{}\t{i}\t{}", nodes[f], nodes[t]).unwrap();
        }
    } else {
        out.push_str(&graph.edge_list());
    }
    Ok(Outcome::ok(out))
}

fn cmd_upsilon(cfg: &Config, a: &ClanArg, flavor: FlavorArg) -> Result<Outcome, CliError> {
    let g = cfg.clan(a)?;
    let mut cache = SchubertCache::new(g.n());
    let f = specialize(&upsilon(&mut cache, &g).map_err(input)?, flavor.into());
    let mut out = String::new();
    if cfg.format == Format::Tsv {
        out.push_str(&cfg.header("upsilon", &[g.to_string(), Flavor::from(flavor).name().to_string()]));
        out.push_str("clan\tflavor\tpolynomial\n");
        writeln!(out, "{g}\t{}\t{f}", Flavor::from(flavor).name()).unwrap();
    } else {
        writeln!(out, "{f}").unwrap();
    }
    Ok(Outcome::ok(out))
}

fn cmd_expand(cfg: &Config, a: &ClanArg, method: MethodArg) -> Result<Outcome, CliError> {
    let g = cfg.clan(a)?;
    let mut cache = SchubertCache::new(g.n());
    let beta = upsilon(&mut cache, &g).map_err(input)?;
    let rows: Vec<(String, String)> = match method {
        MethodArg::Leading => cache
            .expand_leading_term(&specialize(&beta, Flavor::CohX))
            .map_err(input)?
            .into_iter()
            .map(|(w, c)| (w.to_string(), c.to_string()))
            .collect(),
        MethodArg::Localization => cache
            .expand_localization(&specialize(&beta, Flavor::CohXY), false)
            .map_err(input)?
            .into_iter()
            .map(|(w, c)| (w.to_string(), c.to_string()))
            .collect(),
    };
    let mut out = String::new();
    if cfg.format == Format::Tsv {
        let m = if method == MethodArg::Leading { "leading" } else { "localization" };
        out.push_str(&cfg.header("expand", &[g.to_string(), m.to_string()]));
        out.push_str("perm\tcoefficient\n");
        for (w, c) in &rows {
            writeln!(out, "{w}\t{c}").unwrap();
        }
    } else {
        for (w, c) in &rows {
            writeln!(out, "S_{w}  {c}").unwrap();
        }
    }
    Ok(Outcome::ok(out))
}

fn presentation(cfg: &Config, a: &ClanArg, patch: Option<&String>) -> Result<(Clan, Option<Clan>, IdealPresentation), CliError> {
    let g = cfg.clan(a)?;
    match patch {
        None => Ok((g.clone(), None, korbit_ideal(&g))),
        Some(b) => {
            let beta: Clan = b.parse().map_err(input)?;
            let ideal = patch_ideal(&g, &beta).map_err(input)?;
            Ok((g, Some(beta), ideal))
        }
    }
}

fn cmd_ideal(cfg: &Config, a: &ClanArg, patch: Option<&String>, cas: Option<&PathBuf>) -> Result<Outcome, CliError> {
    let (g, beta, ideal) = presentation(cfg, a, patch)?;
    if let Some(path) = cas {
        std::fs::write(path, ideal.cas_script("I"))?;
    }
    let mut out = String::new();
    let at = beta.as_ref().map_or("-".to_string(), |b| b.to_string());
    if cfg.format == Format::Tsv {
        out.push_str(&cfg.header("ideal", &[g.to_string(), at]));
        out.push_str("family\ti\tj\trows\tcols\tgenerator\n");
    } else {
        writeln!(out, "# {} generators", ideal.len()).unwrap();
    }
    for (f, pr) in ideal.generators.iter().zip(&ideal.provenance) {
        let list = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        if cfg.format == Format::Tsv {
            writeln!(out, "{}\t{}\t{}\t{}\t{}\t{f}", pr.family, pr.i, pr.j, list(&pr.rows), list(&pr.cols)).unwrap();
        } else {
            writeln!(out, "{} i={} j={} rows={} cols={}: {f}", pr.family, pr.i, pr.j, list(&pr.rows), list(&pr.cols)).unwrap();
        }
    }
    Ok(Outcome::ok(out))
}

fn cmd_groebner(cfg: &Config, a: &ClanArg, order: OrderArg) -> Result<Outcome, CliError> {
    let g = cfg.clan(a)?;
    let (p, q) = (g.p(), g.q());
    let ideal = korbit_ideal(&g);
    let base = TermOrder::clan_order(p, q);
    let order = match order {
        OrderArg::Clan => base,
        OrderArg::Grevlex => TermOrder::grevlex(base.priority),
    };
    let gb = GbRing::new(order).map_err(gb_error)?;
    let init = initial_ideal(&gb, &ideal, &cfg.budget()).map_err(gb_error)?;
    let xy = Ring::xyb(g.n());
    let n = g.n();
    let mono = |e: &[u8]| {
        let f = gb.export(&gb.from_terms([(gb.mon(e), Int::ONE)]), &ideal.ring);
        f.to_string()
    };
    let raw = match init.raw {
        GbCheck::Groebner => "yes".to_string(),
        GbCheck::Witness { i, j } => format!("no (S-pair of generators {i} and {j})"),
    };
    let leads: Vec<String> = init.leading.generators().iter().map(|e| mono(e)).collect();
    let comps: Vec<String> = init
        .leading
        .minimal_primes()
        .iter()
        .map(|c| c.iter().map(|&k| gb.var_of(k).name(n)).collect::<Vec<_>>().join(","))
        .collect();
    let md = multidegree(&gb, &init.leading, &xy);
    let kp = k_polynomial(&gb, &init.leading, &xy, KConvention::XOverY);
    let mut out = String::new();
    if cfg.format == Format::Tsv {
        out.push_str(&cfg.header("groebner", &[g.to_string()]));
        out.push_str("key\tvalue\n");
        writeln!(out, "generators\t{}", ideal.len()).unwrap();
        writeln!(out, "raw-groebner\t{raw}").unwrap();
        writeln!(out, "squarefree\t{}", init.leading.is_squarefree()).unwrap();
        for l in &leads {
            writeln!(out, "lead\t{l}").unwrap();
        }
        for c in &comps {
            writeln!(out, "component\t{c}").unwrap();
        }
        writeln!(out, "multidegree\t{md}").unwrap();
        writeln!(out, "k-polynomial\t{kp}").unwrap();
    } else {
        writeln!(out, "generators: {}", ideal.len()).unwrap();
        writeln!(out, "generators form a Groebner basis: {raw}").unwrap();
        writeln!(out, "squarefree initial ideal: {}", init.leading.is_squarefree()).unwrap();
        writeln!(out, "initial ideal: <{}>", leads.join(", ")).unwrap();
        writeln!(out, "components ({}):", comps.len()).unwrap();
        for c in &comps {
            writeln!(out, "  <{c}>").unwrap();
        }
        writeln!(out, "multidegree: {md}").unwrap();
        writeln!(out, "K-polynomial: {kp}").unwrap();
    }
    Ok(Outcome::ok(out))
}

fn cmd_hpoly(cfg: &Config, a: &ClanArg, patch: &str) -> Result<Outcome, CliError> {
    let g = cfg.clan(a)?;
    let beta: Clan = patch.parse().map_err(input)?;
    if beta.p() != g.p() || beta.q() != g.q() {
        return Err(CliError::Input(format!("{beta} and {g} have different signatures")));
    }
    let h = h_polynomial(&g, &beta, &cfg.budget()).map_err(gb_error)?;
    let mut out = String::new();
    if cfg.format == Format::Tsv {
        out.push_str(&cfg.header("hpoly", &[g.to_string(), beta.to_string()]));
        out.push_str("clan\tpoint\th\tmultiplicity\n");
        writeln!(out, "{g}\t{beta}\t{h}\t{}", h.multiplicity()).unwrap();
    } else {
        writeln!(out, "H = {h}").unwrap();
        writeln!(out, "multiplicity = {}", h.multiplicity()).unwrap();
    }
    Ok(Outcome::ok(out))
}

fn cmd_verify(cfg: &Config, suite: Suite, s: &Signature) -> Result<Outcome, CliError> {
    cfg.check_size(s.p, s.q)?;
    let report: Report = verify::run(suite, s.p, s.q, &cfg.budget()).map_err(input)?;
    let text = if cfg.format == Format::Tsv { report.to_tsv() } else { report.to_text() };
    let code = if report.count(Status::Violation) > 0 {
        VIOLATION
    } else if report.count(Status::Budget) > 0 {
        OVER_BUDGET
    } else {
        OK
    };
    Ok(Outcome { text, code })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = &cli.config;
    if cfg.budget_pairs == 0 || cfg.budget_timeout == Some(0) || cfg.budget_degree == Some(0) {
        return Err(CliError::Input("budgets must be positive".into()));
    }
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(input)?;
    }
    match &cli.command {
        Command::Clans(s) => cmd_clans(cfg, s),
        Command::WeakOrder(s) => cmd_weak_order(cfg, s),
        Command::Upsilon { clan, flavor } => cmd_upsilon(cfg, clan, *flavor),
        Command::Expand { clan, method } => cmd_expand(cfg, clan, *method),
        Command::Ideal { clan, patch_clan, cas } => cmd_ideal(cfg, clan, patch_clan.as_ref(), cas.as_ref()),
        Command::Groebner { clan, order } => cmd_groebner(cfg, clan, *order),
        Command::Hpoly { clan, patch_clan } => cmd_hpoly(cfg, clan, patch_clan),
        Command::Verify { suite, sig } => cmd_verify(cfg, *suite, sig),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            print!("{}", o.text);
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
