use std::sync::Arc;

use clanpoly::grobner::{Budget, GbCheck, GbRing, MonomialIdeal, TermOrder};
use clanpoly::ideals::representative_flag_matrix;
use clanpoly::ideals::eval_at;
use clanpoly::*;
use proptest::prelude::*;

fn arb_clan(max_n: usize) -> impl Strategy<Value = Clan> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), 0..=n))
        .prop_flat_map(|(n, p)| {
            let clans = enumerate_clans(p, n - p);
            let len = clans.len();
            (Just(clans), 0..len)
        })
        .prop_map(|(clans, k)| clans[k].clone())
}

fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((1..=n as u8).collect::<Vec<u8>>()).prop_shuffle().prop_map(|v| Perm::new(v).unwrap())
}

fn ring4() -> Arc<Ring> {
    Ring::xyb(4)
}

fn arb_poly() -> impl Strategy<Value = MultiPoly> {
    let vars = [Var::X(1), Var::X(2), Var::X(3), Var::X(4), Var::Y(1), Var::Y(2), Var::Beta];
    prop::collection::vec((prop::collection::vec(0i16..3, vars.len()), -3i64..4), 0..6).prop_map(move |terms| {
        let r = ring4();
        terms.into_iter().fold(MultiPoly::zero(&r), |acc, (e, c)| {
            let pw: Vec<(Var, i16)> = vars.iter().copied().zip(e).collect();
            &acc + &MultiPoly::monomial(&r, &pw, Int::from(c))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clan_involutions(g in arb_clan(7)) {
        prop_assert_eq!(g.negate().negate(), g.clone());
        prop_assert_eq!(g.hat().hat(), g.clone());
        prop_assert_eq!(g.negate().is_noncrossing(), g.is_noncrossing());
        prop_assert_eq!(g.negate().length(), g.length());
        prop_assert_eq!((g.negate().p(), g.negate().q()), (g.q(), g.p()));
        let text = g.to_string();
        prop_assert_eq!(text.parse::<Clan>().unwrap(), g);
    }

    #[test]
    fn covers_raise_length_and_closure(g in arb_clan(6)) {
        prop_assert!(g.closure_leq(&g).unwrap());
        for i in 1..g.n() {
            if let Some(h) = g.weak_cover(i) {
                prop_assert_eq!(h.length(), g.length() + 1);
                prop_assert!(g.closure_leq(&h).unwrap());
                prop_assert!(!h.closure_leq(&g).unwrap());
            }
        }
    }

    #[test]
    fn divided_difference_relations(f in arb_poly()) {
        for i in 1..4 {
            prop_assert!(f.divided_difference(i).divided_difference(i).is_zero());
            let b = f.beta_divided_difference(i);
            // the β-operator squares to β times itself
            let r = f.ring().clone();
            let bb = MultiPoly::monomial(&r, &[(Var::Beta, 1)], Int::ONE);
            prop_assert_eq!(b.beta_divided_difference(i), &bb * &b);
        }
        prop_assert_eq!(f.divided_difference(1).divided_difference(3), f.divided_difference(3).divided_difference(1));
        prop_assert_eq!(f.beta_divided_difference(1).beta_divided_difference(3), f.beta_divided_difference(3).beta_divided_difference(1));
        for i in 1..3 {
            let a = f.divided_difference(i).divided_difference(i + 1).divided_difference(i);
            let b = f.divided_difference(i + 1).divided_difference(i).divided_difference(i + 1);
            prop_assert_eq!(a, b);
            let a = f.beta_divided_difference(i).beta_divided_difference(i + 1).beta_divided_difference(i);
            let b = f.beta_divided_difference(i + 1).beta_divided_difference(i).beta_divided_difference(i + 1);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn schubert_leading_term_is_the_code(w in arb_perm(5)) {
        let mut cache = SchubertCache::new(5);
        let s = cache.single_schubert(&w);
        let e = cache.expand_leading_term(&s).unwrap();
        prop_assert_eq!(e.len(), 1);
        prop_assert!(e[&w].is_one());
        let beta = cache.beta_double(&w);
        let low = beta.set_zero(|v| matches!(v, Var::Beta | Var::Y(_)));
        prop_assert_eq!(low, s);
    }

    #[test]
    fn upsilon_edges(g in arb_clan(4)) {
        let mut cache = SchubertCache::new(g.n());
        let f = upsilon(&mut cache, &g).unwrap();
        for i in 1..g.n() {
            if let Some(h) = g.weak_cover(i) {
                prop_assert_eq!(f.beta_divided_difference(i), upsilon(&mut cache, &h).unwrap());
            }
        }
    }

    #[test]
    fn vanishing_at_representatives(g in arb_clan(4), seed in 0usize..1000) {
        let clans = enumerate_clans(g.p(), g.q());
        let beta = &clans[seed % clans.len()];
        let shuffled: Vec<Perm> = Perm::all(g.n()).into_iter().filter(|s| beta.is_shuffled(s)).collect();
        let sigma = &shuffled[seed % shuffled.len()];
        let point = representative_flag_matrix(beta, sigma).unwrap();
        let vanish = korbit_ideal(&g).generators.iter().all(|f| eval_at(f, &point).is_zero());
        prop_assert_eq!(vanish, beta.closure_leq(&g).unwrap());
    }

    #[test]
    fn buchberger_output_is_a_reduced_basis(f in arb_z_polys()) {
        let ring = Ring::z(2);
        let gb = GbRing::new(TermOrder::grevlex(ring.vars().to_vec())).unwrap();
        let gens: Vec<_> = f.iter().map(|p| gb.import(p).unwrap()).collect();
        let basis = gb.buchberger(&gens, &Budget::default()).unwrap();
        prop_assert_eq!(gb.is_groebner(&basis, &Budget::default()).unwrap(), GbCheck::Groebner);
        for g in &gens {
            prop_assert!(gb.reduce(g, &basis).is_zero());
        }
        prop_assert_eq!(gb.buchberger(&gens, &Budget::default()).unwrap(), basis);
    }

    #[test]
    fn squarefree_degree_counts_top_components(gens in prop::collection::vec(prop::collection::vec(0u8..2, 6), 1..5)) {
        let ideal = MonomialIdeal::new(6, gens.into_iter().filter(|g| g.iter().any(|&e| e > 0)).collect());
        prop_assume!(!ideal.generators().is_empty());
        let primes = ideal.minimal_primes_squarefree().unwrap();
        let c = ideal.codim();
        let top = primes.iter().filter(|p| p.len() == c).count();
        let h = clanpoly::grobner::divide_by_one_minus_q(ideal.hilbert_numerator(), c).unwrap();
        let deg = h.iter().fold(Int::ZERO, |a, b| &a + b);
        prop_assert_eq!(deg, Int::from(top as i64));
        // every generator meets every prime
        for g in ideal.generators() {
            for p in &primes {
                prop_assert!(p.iter().any(|&k| g[k] > 0));
            }
        }
    }
}

fn arb_z_polys() -> impl Strategy<Value = Vec<MultiPoly>> {
    let vars = [Var::Z(1, 1), Var::Z(1, 2), Var::Z(2, 1)];
    let poly = prop::collection::vec((prop::collection::vec(0i16..3, 3), -3i64..4), 1..4).prop_map(move |terms| {
        let r = Ring::z(2);
        terms.into_iter().fold(MultiPoly::zero(&r), |acc, (e, c)| {
            let pw: Vec<(Var, i16)> = vars.iter().copied().zip(e).collect();
            &acc + &MultiPoly::monomial(&r, &pw, Int::from(c))
        })
    });
    prop::collection::vec(poly, 1..4)
}
