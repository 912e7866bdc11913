use proptest::prelude::*;
use symtangle_core::boundary::{boundary_algebra, implementing_unitaries, Route};
use symtangle_core::cohomology::CohomologyGroup;
use symtangle_core::constructions::{random_symmetric_circuit, regauge_between, shift_entangler, Layout, Scenario};
use symtangle_core::group::{Cochain, GroupTable};
use symtangle_core::projrep::{classify_phases, coboundary_fit, random_gauge, ProjectiveRep};
use symtangle_core::rng::seeded;
use symtangle_core::Config;

fn h2() -> CohomologyGroup {
    CohomologyGroup::default_for(&GroupTable::z2xz2(), 2).unwrap()
}

// Cocycle of class `a` in H^2(Z2 x Z2) shifted by the coboundary of a
// 1-cochain built from `seed`.
fn cocycle(a: u64, seed: u64) -> Cochain {
    let g = GroupTable::z2xz2();
    let h = h2();
    let nu = Cochain::from_fn(4, 1, 4, |x| (seed >> (2 * x[0])) & 3);
    h.element(&[a]).representative.add(&nu.coboundary(&g)).unwrap()
}

fn shift(a: u64, seed: u64, n: usize) -> Scenario {
    shift_entangler(&GroupTable::z2xz2(), &cocycle(a, seed), n, &Config::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn index_of_the_shift_is_its_cocycle_class(a in 0u64..2, seed in any::<u64>(), x in 0i64..24) {
        let sc = shift(a, seed, 24);
        prop_assert_eq!(sc.index(x, Route::Eta, &Config::default()).unwrap().class.coordinates, vec![a]);
    }

    #[test]
    fn stacking_adds_indices(a in 0u64..2, b in 0u64..2, s1 in any::<u64>(), s2 in any::<u64>()) {
        let cfg = Config::default();
        let sc = shift(a, s1, 24).stack(&shift(b, s2, 24), &cfg).unwrap();
        let ind = sc.index(0, Route::Eta, &cfg).unwrap();
        prop_assert_eq!(ind.class.coordinates, vec![(a + b) % 2]);
    }

    #[test]
    fn composition_adds_indices(a in 0u64..2, seed in any::<u64>()) {
        let cfg = Config::default();
        let sc = shift(a, seed, 36);
        let mut rng = seeded(seed);
        let sym = random_symmetric_circuit(&sc.ring, &sc.beta, &Layout::Bond(vec![2]), 1, &mut rng, &cfg).unwrap();
        let other = Scenario::new("sym", sc.ring.clone(), sc.beta.clone(), sym, &cfg).unwrap();
        prop_assert!(other.index(0, Route::Eta, &cfg).unwrap().class.is_zero());
        let both = sc.compose(&other, &cfg).unwrap();
        let r = both.circuit.range_bound(&both.ring);
        let ind = both.with_width(r).index(0, Route::Eta, &cfg).unwrap();
        prop_assert_eq!(ind.class.coordinates, vec![a]);
        let site = random_symmetric_circuit(&sc.ring, &sc.beta, &Layout::Site(vec![0, 1]), 1, &mut rng, &cfg).unwrap();
        let site = Scenario::new("site", sc.ring.clone(), sc.beta.clone(), site, &cfg).unwrap();
        let flipped = site.compose(&sc, &cfg).unwrap();
        let ind = flipped.index(5, Route::Eta, &cfg).unwrap();
        prop_assert_eq!(ind.class.coordinates, vec![a]);
    }

    #[test]
    fn regauged_layers_have_the_same_index(a in 0u64..2, seed in any::<u64>()) {
        let cfg = Config::default();
        let sc = shift(a, seed, 24);
        let c2 = regauge_between(&sc.circuit, &sc.ring, 0, &mut seeded(seed)).unwrap();
        let other = Scenario::new("regauged", sc.ring.clone(), sc.beta.clone(), c2, &cfg).unwrap();
        prop_assert_eq!(other.index(3, Route::Eta, &cfg).unwrap().class, sc.index(3, Route::Eta, &cfg).unwrap().class);
    }

    #[test]
    fn implementing_unitaries_are_gauge_robust(a in 0u64..2, seed in any::<u64>()) {
        let cfg = Config::default();
        let g = GroupTable::z2xz2();
        let sc = shift(a, seed, 24);
        let p = boundary_algebra(&sc.circuit, &sc.ring, 0, sc.width, Route::Eta, &cfg).unwrap();
        let imp = implementing_unitaries(&p, &sc.beta, &sc.ring, &cfg).unwrap();
        let (base, _, _) = classify_phases(&h2(), &imp.cocycle, 1e-6, 1e-4).unwrap();
        prop_assert_eq!(&base.coordinates, &vec![a]);
        let mut rng = seeded(seed);
        for block in &imp.blocks {
            let rep = ProjectiveRep::new(g.clone(), block.w.clone(), 1e-8).unwrap();
            let gauged = rep.gauged(&random_gauge(&mut rng, 4));
            let ratio = gauged.cocycle_of().mul(&rep.cocycle_of().conj());
            prop_assert!(coboundary_fit(&g, &ratio, 1e-6).unwrap().is_some());
            let (c0, _, _) = classify_phases(&h2(), &rep.cocycle_of(), 1e-6, 1e-4).unwrap();
            let (c1, _, _) = classify_phases(&h2(), &gauged.cocycle_of(), 1e-6, 1e-4).unwrap();
            prop_assert_eq!(c0, c1);
        }
    }
}
