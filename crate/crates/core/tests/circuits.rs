use proptest::prelude::*;
use symtangle_core::constructions::{layout_supports, random_symmetric_circuit, Layout, Scenario};
use symtangle_core::group::GroupTable;
use symtangle_core::lattice::{generators, measure_range, Circuit, Geometry, OnSiteSymmetry, SpinRing};
use symtangle_core::linalg::{gaussian, random_unitary};
use symtangle_core::projrep::ProjectiveRep;
use symtangle_core::rng::{seeded, Stream};
use symtangle_core::tensor::LocalOperator;
use symtangle_core::{c64, Config};

fn qubit_ring(n: usize) -> SpinRing {
    SpinRing::uniform(Geometry::Ring(n), &[2]).unwrap()
}

// Brickwork of Haar gates; gates of layer l start at sites of parity l.
fn random_brickwork(ring: &SpinRing, depth: usize, rng: &mut Stream) -> Circuit {
    let layers = (0..depth)
        .map(|l| {
            layout_supports(ring, &Layout::Bond(vec![]), l)
                .into_iter()
                .map(|w| {
                    let dims = ring.dims_of(&w);
                    let d = dims.iter().product();
                    LocalOperator::from_unordered(&w, &dims, random_unitary(rng, d)).unwrap()
                })
                .collect()
        })
        .collect();
    Circuit::new(ring, layers, 1e-10).unwrap()
}

fn random_op(ring: &SpinRing, wires: &[usize], rng: &mut Stream) -> LocalOperator {
    let dims = ring.dims_of(wires);
    let d = dims.iter().product();
    let m = gaussian(rng, d, d);
    let op = LocalOperator::from_unordered(wires, &dims, m).unwrap();
    op.scale(c64::new(1.0 / op.norm(), 0.0))
}

fn ring_distance(n: usize, a: usize, b: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn apply_is_multiplicative(seed in any::<u64>(), depth in 1usize..4, w in 0usize..12) {
        let ring = qubit_ring(12);
        let mut rng = seeded(seed);
        let c = random_brickwork(&ring, depth, &mut rng);
        let a = random_op(&ring, &[w, (w + 1) % 12], &mut rng);
        let b = random_op(&ring, &[(w + 1) % 12, (w + 2) % 12], &mut rng);
        let lhs = c.apply(&a.mul(&b).unwrap());
        let rhs = c.apply(&a).mul(&c.apply(&b)).unwrap();
        prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-10);
    }

    #[test]
    fn support_growth_is_bounded(seed in any::<u64>(), depth in 1usize..5) {
        let ring = qubit_ring(16);
        let mut rng = seeded(seed);
        let c = random_brickwork(&ring, depth, &mut rng);
        let bound = depth * c.max_diameter(&ring);
        prop_assert_eq!(bound, c.range_bound(&ring));
        let all: Vec<usize> = (0..16).collect();
        prop_assert!(measure_range(&c, &ring, &all) <= bound);
        for op in generators(&ring, &all) {
            let src = ring.wire(op.wires()[0]).site;
            for &w in c.apply(&op).trim(1e-12).wires() {
                prop_assert!(ring_distance(16, src, ring.wire(w).site) <= bound);
            }
        }
    }

    #[test]
    fn compaction_keeps_the_automorphism(seed in any::<u64>(), da in 1usize..3, db in 1usize..3) {
        let ring = qubit_ring(12);
        let mut rng = seeded(seed);
        // brickwork on each half, run one after the other
        let half = |c: Circuit, lo: usize| c.filter(|_, g| g.wires().iter().all(|&w| (lo..lo + 6).contains(&w)));
        let a = half(random_brickwork(&ring, da, &mut rng), 0);
        let b = half(random_brickwork(&ring, db, &mut rng), 6);
        let c = a.then(&b).unwrap();
        let k = c.compacted();
        prop_assert_eq!(k.depth(), da.max(db));
        prop_assert_eq!(k.num_gates(), c.num_gates());
        let mixed = random_brickwork(&ring, 1, &mut rng).then(&c).unwrap();
        let km = mixed.compacted();
        prop_assert!(km.depth() <= mixed.depth());
        for op in generators(&ring, &[0, 5, 6, 11]) {
            prop_assert!(k.apply(&op).distance(&c.apply(&op)).unwrap() <= 1e-10);
            prop_assert!(km.apply(&op).distance(&mixed.apply(&op)).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn inverse_undoes_the_circuit(seed in any::<u64>(), depth in 1usize..5) {
        let ring = qubit_ring(10);
        let mut rng = seeded(seed);
        let c = random_brickwork(&ring, depth, &mut rng);
        let round = c.then(&c.inverse()).unwrap();
        let back = c.inverse().then(&c).unwrap();
        for op in generators(&ring, &(0..10).collect::<Vec<_>>()) {
            prop_assert!(round.apply(&op).distance(&op).unwrap() <= 1e-10);
            prop_assert!(back.apply(&op).distance(&op).unwrap() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn stacking_acts_legwise(seed in any::<u64>()) {
        let cfg = Config::default();
        let g = GroupTable::cyclic(2);
        let ring = qubit_ring(8);
        let (_, x) = symtangle_core::linalg::clock_shift(2);
        let rep = ProjectiveRep::new(g.clone(), vec![symtangle_core::linalg::identity(2), x], 1e-12).unwrap();
        let beta = OnSiteSymmetry::per_leg(&ring, &g, &[(0, rep)]).unwrap();
        let mut rng = seeded(seed);
        let layout = Layout::Bond(vec![]);
        let ca = random_symmetric_circuit(&ring, &beta, &layout, 2, &mut rng, &cfg).unwrap();
        let cb = random_symmetric_circuit(&ring, &beta, &layout, 3, &mut rng, &cfg).unwrap();
        let a = Scenario::new("a", ring.clone(), beta.clone(), ca, &cfg).unwrap();
        let b = Scenario::new("b", ring.clone(), beta.clone(), cb, &cfg).unwrap();
        let s = a.stack(&b, &cfg).unwrap();
        let (_, map) = ring.stack(&ring).unwrap();
        prop_assert_eq!(s.circuit.depth(), 3);
        for w in 0..8 {
            let op = random_op(&ring, &[w], &mut rng);
            let img = s.circuit.apply(&op);
            prop_assert!(img.wires().iter().all(|&v| v < 8));
            prop_assert!(img.distance(&a.circuit.apply(&op)).unwrap() <= 1e-10);

            let moved = LocalOperator::from_unordered(&[map[w]], op.dims(), op.matrix().clone()).unwrap();
            let expect = b.circuit.apply(&op);
            let wires: Vec<usize> = expect.wires().iter().map(|&v| map[v]).collect();
            let expect = LocalOperator::from_unordered(&wires, expect.dims(), expect.matrix().clone()).unwrap();
            prop_assert!(s.circuit.apply(&moved).distance(&expect).unwrap() <= 1e-10);
        }
    }
}

#[test]
fn overlapping_gates_are_rejected() {
    let ring = qubit_ring(4);
    let mut rng = seeded(0);
    let g1 = LocalOperator::from_unordered(&[0, 1], &[2, 2], random_unitary(&mut rng, 4)).unwrap();
    let g2 = LocalOperator::from_unordered(&[1, 2], &[2, 2], random_unitary(&mut rng, 4)).unwrap();
    assert!(Circuit::new(&ring, vec![vec![g1, g2]], 1e-10).is_err());
}
