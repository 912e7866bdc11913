mod common;

use common::z2_qubits;
use proptest::prelude::*;
use symtangle_core::boundary::index_0d;
use symtangle_core::cohomology::{CohomClass, CohomologyGroup};
use symtangle_core::constructions::{
    blend_1d, charge_unitary, disentangle_0d, even_odd_factorization, random_circuit, random_symmetric_circuit,
    realize_schedule_0d, swindle_charges, Layout, Scenario,
};
use symtangle_core::group::{Cochain, GroupTable};
use symtangle_core::lattice::check_equivariant;
use symtangle_core::projrep::ProjectiveRep;
use symtangle_core::rng::seeded;
use symtangle_core::{Config, Error};

fn h(gi: usize, n: usize) -> CohomologyGroup {
    let g = [
        GroupTable::cyclic(2),
        GroupTable::cyclic(4),
        GroupTable::z2xz2(),
        GroupTable::s3(),
    ][gi]
        .clone();
    CohomologyGroup::default_for(&g, n).unwrap()
}

fn classes(h: &CohomologyGroup, raw: &[u64]) -> Vec<CohomClass> {
    let f = h.invariant_factors();
    raw.chunks_exact(f.len().max(1))
        .map(|c| h.element(&c.iter().zip(f).map(|(x, d)| x % d).collect::<Vec<_>>()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn swindle_pairs_cancel(gi in 0usize..4, n in 1usize..4, raw in prop::collection::vec(any::<u64>(), 0..40), window in 1usize..12) {
        let hn = h(gi, n);
        let f = hn.invariant_factors().to_vec();
        let ind = classes(&hn, &raw);
        let s = swindle_charges(&f, &ind, window).unwrap();
        prop_assert!(s.even_pairs_hold && s.odd_pairs_hold);
        prop_assert_eq!(s.omega.len(), 2 * window);
        let add = |a: &[u64], b: &[u64]| a.iter().zip(b).zip(&f).map(|((x, y), d)| (x + y) % d).collect::<Vec<_>>();
        let zero = vec![0; f.len()];
        let mut partial = zero.clone();
        for i in 0..2 * window {
            let cur = ind.get(i).map(|c| c.coordinates.clone()).unwrap_or(zero.clone());
            prop_assert_eq!(&s.indices[i], &cur);
            partial = add(&partial, &cur);
            if i % 2 == 0 {
                prop_assert_eq!(&s.omega[i], &partial);
            } else {
                prop_assert_eq!(&add(&s.omega[i], &s.omega[i - 1]), &zero);
                // ind_{i} + ind_{i+1} = omega_i + omega_{i+1} for the even pairs
                if i + 1 < 2 * window {
                    let next = ind.get(i + 1).map(|c| c.coordinates.clone()).unwrap_or(zero.clone());
                    prop_assert_eq!(add(&cur, &next), add(&s.omega[i], &s.omega[i + 1]));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn schedules_are_realized_by_symmetric_pairs(gi in 0usize..3, raw in prop::collection::vec(any::<u64>(), 1..8)) {
        let h1 = h(gi, 1);
        let s = swindle_charges(h1.invariant_factors(), &classes(&h1, &raw), 3).unwrap();
        prop_assert!(realize_schedule_0d(&h1, &s, &Config::default()).unwrap() <= 1e-10);
    }

    #[test]
    fn zero_dimensional_charges_decide_disentangling(gi in 0usize..4, a in any::<u64>(), b in any::<u64>()) {
        let cfg = Config::default();
        let h1 = h(gi, 1);
        let g = h1.group().clone();
        let reg = ProjectiveRep::regular(&g);
        let ea = h1.elements();
        let (ca, cb) = (&ea[(a % ea.len() as u64) as usize], &ea[(b % ea.len() as u64) as usize]);
        let va = charge_unitary(&g, &ca.representative).unwrap();
        let vb = charge_unitary(&g, &cb.representative).unwrap();
        prop_assert_eq!(&index_0d(&va, &reg, &cfg).unwrap().class, ca);
        let d = disentangle_0d(&va, &vb, &reg, &cfg);
        if ca == cb {
            let d = d.unwrap();
            prop_assert!(d.symmetry_residual <= 1e-10 && d.residual <= 1e-10);
        } else {
            let mismatch = matches!(d, Err(Error::ChargeMismatch(_, _)));
            prop_assert!(mismatch);
        }
    }

    #[test]
    fn on_site_circuits_factorize(seed in any::<u64>()) {
        let cfg = Config::default();
        let (ring, beta) = z2_qubits(6);
        let charges = [Cochain::zero(2, 1, 2), Cochain::from_values(2, 1, 2, vec![0, 1]).unwrap()];
        let c = random_circuit(&ring, &beta, &Layout::Site(vec![]), 1, &charges, &mut seeded(seed), &cfg).unwrap();
        let sc = Scenario::new("onsite", ring, beta, c, &cfg).unwrap();
        let f = even_odd_factorization(&sc, &cfg).unwrap();
        prop_assert!(f.residual <= 1e-7);
        prop_assert!(f.dense_residual.unwrap() <= 1e-7);
        prop_assert!(f.block_length <= 4);
        prop_assert!(f.block_leakage <= 1e-8);
        prop_assert!(check_equivariant(&f.even, &f.system.beta, &f.system.ring, None) <= 1e-8);
        prop_assert!(check_equivariant(&f.odd, &f.system.beta, &f.system.ring, None) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn blends_of_symmetric_brickwork(seed in any::<u64>(), x in 0i64..32) {
        let cfg = Config::default();
        let (ring, beta) = z2_qubits(32);
        let c = random_symmetric_circuit(&ring, &beta, &Layout::Bond(vec![]), 2, &mut seeded(seed), &cfg).unwrap();
        let sc = Scenario::new("brick", ring, beta, c, &cfg).unwrap();
        let b = blend_1d(&sc, x, &cfg).unwrap();
        prop_assert!(b.left_residual <= 1e-8 && b.right_residual <= 1e-8);
        prop_assert!(b.equivariance <= 1e-8);
        prop_assert!(b.range <= 8 * b.width);
    }
}
