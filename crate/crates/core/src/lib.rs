//! Clan combinatorics, β-Schubert polynomials and the ideals of K-orbit closures.

pub mod clan;
pub mod grobner;
pub mod ideals;
pub mod int;
pub mod perm;
pub mod polyring;
pub mod schubert;
pub mod tableaux;
pub mod upsilon;
pub mod verify;

pub use int::Int;
pub use clan::{enumerate_clans, enumerate_matchless, Clan, ClanError, ClanRankData, Sym, WeakOrderGraph};
pub use perm::{Flagging, Partition, Perm, PermError};
pub use polyring::{Monomial, MultiPoly, PolyError, Ring, Var};
pub use schubert::{Flavor, SchubertCache, SchubertError};
pub use tableaux::{flagged_schur, pipe_diagrams, pipe_sum, wt_beta, PipeDiagram, PipeMode, TableauxError};
pub use ideals::{korbit_ideal, origin_on_zero_set, patch_ideal, rank_vectors, IdealPresentation};
pub use grobner::{h_polynomial, initial_ideal, Budget, GbCheck, GbRing, HPolynomial, InitialIdeal, KConvention, MonomialIdeal, TermOrder};
pub use upsilon::{check_symmetry, upsilon, upsilon_matchless, ConsistencyReport, Provenance, UpsilonError, UpsilonTable, Violation};
