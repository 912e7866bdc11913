//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{brute_counts, cocycle_with, random_cocycle, z2_qubits};
use symtangle_core::boundary::{
    boundary_algebra, boundary_algebra_def, boundary_algebra_eta, boundary_lps_2d, index_0d, index_1d, lps_index_0d,
    span_distance, Route,
};
use symtangle_core::cohomology::{order_counts, CohomologyGroup};
use symtangle_core::constructions::{
    blend_1d, charge_unitary, disentangle_0d, even_odd_factorization, random_circuit, random_symmetric_circuit,
    regauge_between, shift_entangler, shift_entangler_2d, swindle_charges, wire_at, Layout, Scenario,
};
use symtangle_core::group::{Cochain, GroupTable};
use symtangle_core::projrep::ProjectiveRep;
use symtangle_core::rng::seeded;
use symtangle_core::Config;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    ensure(t.elapsed() < limit, || {
        format!("took {:.1?}, limit {limit:?}", t.elapsed())
    })
}

fn e<E: std::fmt::Debug>(x: E) -> String {
    format!("{x:?}")
}

fn z2xz2() -> GroupTable {
    GroupTable::z2xz2()
}

fn pauli_mu() -> Cochain {
    ProjectiveRep::pauli().exact_cocycle().unwrap().clone()
}

fn h2() -> CohomologyGroup {
    CohomologyGroup::default_for(&z2xz2(), 2).unwrap()
}

fn shift(a: u64, seed: u64, n: usize, cfg: &Config) -> Result<Scenario, String> {
    let (mu, _) = cocycle_with(&h2(), &[a], seed);
    shift_entangler(&z2xz2(), &mu, n, cfg).map_err(e)
}

fn trivial_scenarios(cfg: &Config) -> Result<Vec<Scenario>, String> {
    let (ring, beta) = z2_qubits(12);
    let mut out = vec![Scenario::identity("identity", ring, beta)];
    let (ring, beta) = z2_qubits(32);
    let c = random_symmetric_circuit(&ring, &beta, &Layout::Bond(vec![]), 2, &mut seeded(3), cfg).map_err(e)?;
    out.push(Scenario::new("brickwork", ring, beta, c, cfg).map_err(e)?);
    let zero = Cochain::zero(2, 2, 2);
    out.push(
        shift_entangler(&GroupTable::cyclic(2), &zero, 24, cfg)
            .map_err(e)?
            .with_name("shift-z2"),
    );
    let pair = shift_entangler(&z2xz2(), &pauli_mu(), 24, cfg)
        .map_err(e)?
        .stack(&shift_entangler(&z2xz2(), &pauli_mu().neg(), 24, cfg).map_err(e)?, cfg)
        .map_err(e)?;
    out.push(pair.with_name("shift-pair"));
    Ok(out)
}

fn onsite_scenario(seed: u64, cfg: &Config) -> Result<Scenario, String> {
    let (ring, beta) = z2_qubits(6);
    let charges = [
        Cochain::zero(2, 1, 2),
        Cochain::from_values(2, 1, 2, vec![0, 1]).unwrap(),
    ];
    let c = random_circuit(&ring, &beta, &Layout::Site(vec![]), 1, &charges, &mut seeded(seed), cfg).map_err(e)?;
    Scenario::new("onsite", ring, beta, c, cfg).map_err(e)
}

/// The scenarios shipped with the command line tool.
fn shipped(cfg: &Config) -> Result<Vec<Scenario>, String> {
    let mut out = vec![shift_entangler(&z2xz2(), &pauli_mu(), 24, cfg).map_err(e)?];
    out.extend(trivial_scenarios(cfg)?);
    out.push(onsite_scenario(11, cfg)?);
    Ok(out)
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let cases: [(GroupTable, usize, &[u64]); 5] = [
        (GroupTable::cyclic(2), 1, &[2]),
        (GroupTable::cyclic(2), 2, &[]),
        (z2xz2(), 2, &[2]),
        (GroupTable::cyclic(4), 2, &[]),
        (GroupTable::cyclic(2), 3, &[2]),
    ];
    for (g, n, expected) in &cases {
        let h = CohomologyGroup::default_for(g, *n).map_err(e)?;
        ensure(h.invariant_factors() == *expected, || {
            format!(
                "H^{n}({}) = {:?}, expected {expected:?}",
                g.name(),
                h.invariant_factors()
            )
        })?;
        let brute = brute_counts(g, *n);
        ensure(order_counts(h.invariant_factors()) == brute, || {
            format!("H^{n}({}) disagrees with enumeration {brute:?}", g.name())
        })?;
    }
    within(t, Duration::from_secs(10))?;
    Ok(format!("5 groups match enumeration in {:.2?}", t.elapsed()))
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let cfg = Config::default();
    let sc = shift_entangler(&z2xz2(), &pauli_mu(), 24, &cfg).map_err(e)?;
    let r = 4;
    let ind = index_1d(&sc.circuit, &sc.beta, &sc.ring, 0, r, Route::Eta, &cfg).map_err(e)?;
    ensure(
        ind.class == h2().class_of(&pauli_mu()).map_err(e)? && !ind.class.is_zero(),
        || format!("class {:?}", ind.class.coordinates),
    )?;
    // A_{[-4,-2]} ⊗ A_{-1,1} ⊗ A_{-1,2} ⊗ A_{0,1}, legs counted from one
    let site = |x: i64| x.rem_euclid(24) as usize;
    let mut expected: Vec<usize> = (-4..=-2)
        .flat_map(|x| (0..3).map(move |l| (x, l)))
        .chain([(-1, 0), (-1, 1), (0, 0)])
        .map(|(x, l)| wire_at(&sc.ring, site(x), l).unwrap())
        .collect();
    expected.sort_unstable();
    let p = boundary_algebra(&sc.circuit, &sc.ring, 0, r, Route::Eta, &cfg).map_err(e)?;
    let found = p.wire_structure(1e-10);
    ensure(found.as_ref() == Some(&expected), || {
        format!("boundary wires {found:?}, expected {expected:?}")
    })?;
    let leak = p.invariance_leakage(&sc.beta).map_err(e)?;
    let worst = [
        ind.residual,
        ind.fit_residual,
        ind.equivariance,
        leak,
        p.unit_residual(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    ensure(worst <= 1e-8, || format!("residual {worst:.2e}"))?;
    within(t, Duration::from_secs(60))?;
    Ok(format!(
        "class {:?}, wires {expected:?}, residual {worst:.1e}",
        ind.class.coordinates
    ))
}

fn criterion_3() -> Check {
    let cfg = Config::default();
    let reference = h2().class_of(&pauli_mu()).map_err(e)?;
    let sc = shift_entangler(&z2xz2(), &pauli_mu(), 36, &cfg).map_err(e)?;
    let regauged = regauge_between(&sc.circuit, &sc.ring, 0, &mut seeded(17)).map_err(e)?;
    let mut count = 0;
    for (name, c) in [("original", &sc.circuit), ("regauged", &regauged)] {
        for r in 4..=6 {
            for x in [0, 1, 5] {
                let ind = index_1d(c, &sc.beta, &sc.ring, x, r, Route::Eta, &cfg).map_err(e)?;
                ensure(ind.class == reference, || {
                    format!("{name} r={r} x={x}: class {:?}", ind.class.coordinates)
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} indices equal {:?}", reference.coordinates))
}

fn criterion_4() -> Check {
    let cfg = Config::default();
    let mut rng_state = 0x1234_5678u64;
    let mut next = || {
        rng_state = rng_state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        rng_state >> 33
    };
    let pairs = 20;
    for i in 0..pairs {
        let (a, b) = (next() % 2, next() % 2);
        let (sa, sb) = (shift(a, next(), 24, &cfg)?, shift(b, next(), 24, &cfg)?);
        let class = |sc: &Scenario, x: i64| -> Result<Vec<u64>, String> {
            Ok(sc.index(x, Route::Eta, &cfg).map_err(e)?.class.coordinates)
        };
        let x = (next() % 24) as i64;
        let stacked = sa.stack(&sb, &cfg).map_err(e)?;
        ensure(class(&stacked, x)? == vec![(a + b) % 2], || {
            format!("pair {i}: stack of {a} and {b}")
        })?;

        // composition on the stacked system: (alpha_a ⊗ id) then (id ⊗ alpha_b)
        let id_a = Scenario::identity("id", sa.ring.clone(), sa.beta.clone());
        let id_b = Scenario::identity("id", sb.ring.clone(), sb.beta.clone());
        let left = sa.stack(&id_b, &cfg).map_err(e)?;
        let right = id_a.stack(&sb, &cfg).map_err(e)?;
        for (name, sc) in [("ab", left.compose(&right, &cfg)), ("ba", right.compose(&left, &cfg))] {
            let sc = sc.map_err(e)?;
            ensure(class(&sc, x)? == vec![(a + b) % 2], || {
                format!("pair {i}: compose {name} of {a} and {b}")
            })?;
        }

        // random symmetric layers before or after never change the class
        let long = shift(a, next(), 36, &cfg)?;
        let mut rng = seeded(next());
        let bond =
            random_symmetric_circuit(&long.ring, &long.beta, &Layout::Bond(vec![2]), 1, &mut rng, &cfg).map_err(e)?;
        let site = random_symmetric_circuit(&long.ring, &long.beta, &Layout::Site(vec![0, 1]), 1, &mut rng, &cfg)
            .map_err(e)?;
        let bond = Scenario::new("bond", long.ring.clone(), long.beta.clone(), bond, &cfg).map_err(e)?;
        let site = Scenario::new("site", long.ring.clone(), long.beta.clone(), site, &cfg).map_err(e)?;
        ensure(class(&bond, 0)? == vec![0] && class(&site, 0)? == vec![0], || {
            format!("pair {i}: symmetric layer")
        })?;
        let after = long.compose(&bond, &cfg).map_err(e)?;
        let before = site.compose(&long, &cfg).map_err(e)?;
        ensure(class(&after, x)? == vec![a] && class(&before, x)? == vec![a], || {
            format!("pair {i}: symmetric layers changed class {a}")
        })?;
    }
    Ok(format!("{pairs} pairs: stack, compose both ways, symmetric layers"))
}

fn criterion_5() -> Check {
    let cfg = Config::default();
    let mut worst: f64 = 0.0;
    let mut names = Vec::new();
    for sc in shipped(&cfg)? {
        for x in [0, 5] {
            let (eta, _) = boundary_algebra_eta(&sc.circuit, &sc.ring, x, sc.width, &cfg).map_err(e)?;
            let def = boundary_algebra_def(&sc.circuit, &sc.ring, x, sc.width, &cfg)
                .map_err(|err| format!("{}: {err:?}", sc.name))?;
            let d = span_distance(&eta, &def, &cfg).map_err(e)?;
            ensure(d <= 1e-7, || format!("{} at x={x}: span distance {d:.2e}", sc.name))?;
            worst = worst.max(d);
        }
        names.push(sc.name.clone());
    }
    Ok(format!("{} scenarios {names:?}, worst {worst:.1e}", names.len()))
}

fn criterion_6() -> Check {
    let cfg = Config::default();
    let mut worst: f64 = 0.0;
    let mut names = Vec::new();
    for sc in trivial_scenarios(&cfg)? {
        let x = 3;
        let b = blend_1d(&sc, x, &cfg).map_err(|err| format!("{}: {err:?}", sc.name))?;
        let w = b.left_residual.max(b.right_residual).max(b.equivariance);
        ensure(w <= 1e-8, || {
            format!(
                "{}: left {:.2e}, right {:.2e}, equivariance {:.2e}",
                sc.name, b.left_residual, b.right_residual, b.equivariance
            )
        })?;
        worst = worst.max(w);
        names.push(format!("{} (range {} = {}r)", sc.name, b.range, b.range_constant));
    }
    Ok(format!("{names:?}, worst {worst:.1e}"))
}

fn criterion_7() -> Check {
    let t = Instant::now();
    let cfg = Config::default();
    let sc = onsite_scenario(11, &cfg)?;
    let r = sc.width;
    ensure(sc.ring.num_sites() == 6 * r, || {
        format!("ring of {} sites for r = {r}", sc.ring.num_sites())
    })?;
    let f = even_odd_factorization(&sc, &cfg).map_err(e)?;
    let log2 = f.system.ring.log2_total_dim();
    ensure(log2 <= 12.0 + 1e-9, || format!("total dimension 2^{log2}"))?;
    let dense = f.dense_residual.ok_or("no dense check")?;
    ensure(f.residual <= 1e-7 && dense <= 1e-7, || {
        format!("residual {:.2e}, dense {dense:.2e}", f.residual)
    })?;
    ensure(f.block_length <= 4 * r, || {
        format!("block length {} > 4r", f.block_length)
    })?;
    ensure(f.block_leakage <= 1e-8, || {
        format!("block leakage {:.2e}", f.block_leakage)
    })?;
    within(t, Duration::from_secs(300))?;
    Ok(format!(
        "residual {:.1e}, dense {dense:.1e}, blocks {:?} / {:?}, dimension 2^{log2}",
        f.residual, f.blocks_even, f.blocks_odd
    ))
}

fn criterion_8() -> Check {
    let cfg = Config::default();
    let mut count = 0;
    for g in [GroupTable::cyclic(2), GroupTable::cyclic(4), z2xz2()] {
        let h1 = CohomologyGroup::default_for(&g, 1).map_err(e)?;
        let reg = ProjectiveRep::regular(&g);
        let chars = h1.elements();
        ensure(chars.len() == g.order(), || {
            format!("{}: {} characters", g.name(), chars.len())
        })?;
        let vs: Vec<_> = chars
            .iter()
            .map(|c| charge_unitary(&g, &c.representative))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        for (c, v) in chars.iter().zip(&vs) {
            let ind = index_0d(v, &reg, &cfg).map_err(e)?;
            ensure(&ind.class == c, || {
                format!(
                    "{}: charge {:?} read as {:?}",
                    g.name(),
                    c.coordinates,
                    ind.class.coordinates
                )
            })?;
        }
        for (i, vi) in vs.iter().enumerate() {
            for (j, vj) in vs.iter().enumerate() {
                let ok = disentangle_0d(vi, vj, &reg, &cfg).is_ok();
                ensure(ok == (i == j), || {
                    format!("{}: disentangle {i} -> {j} gave {ok}", g.name())
                })?;
            }
        }
        let h2g = CohomologyGroup::default_for(&g, 2).map_err(e)?;
        for s in 0..50u64 {
            let (mu, coords) = random_cocycle(&h2g, s.wrapping_mul(0x2545_f491_4f6c_dd1d) + 1);
            let rep = ProjectiveRep::regular_projective(&g, &mu).map_err(e)?;
            let ind = lps_index_0d(&rep, &cfg).map_err(e)?;
            ensure(ind.class.coordinates == coords, || {
                format!("{}: cocycle {s} read as {:?}", g.name(), ind.class.coordinates)
            })?;
            count += 1;
        }
    }
    Ok(format!(
        "charges separated, disentangling iff equal, {count} cocycles classified"
    ))
}

fn criterion_9() -> Check {
    let mut rng_state = 0xdead_beefu64;
    let mut next = || {
        rng_state = rng_state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        rng_state >> 33
    };
    let mut groups = 0;
    for g in common::test_groups() {
        for n in 1..=3 {
            let h = CohomologyGroup::default_for(&g, n).map_err(e)?;
            let f = h.invariant_factors().to_vec();
            let add =
                |a: &[u64], b: &[u64]| -> Vec<u64> { a.iter().zip(b).zip(&f).map(|((x, y), d)| (x + y) % d).collect() };
            let zero = vec![0; f.len()];
            for trial in 0..1000 {
                let len = 1 + (next() % 16) as usize;
                let ind: Vec<_> = (0..len)
                    .map(|_| h.element(&f.iter().map(|d| next() % d).collect::<Vec<_>>()))
                    .collect();
                let window = len.div_ceil(2) + (next() % 3) as usize;
                let s = swindle_charges(&f, &ind, window).map_err(e)?;
                let at = |k: usize| ind.get(k).map(|c| c.coordinates.clone()).unwrap_or(zero.clone());
                for i in 0..2 * window - 1 {
                    // 1-based pair (i+1, i+2)
                    let om = add(&s.omega[i], &s.omega[i + 1]);
                    let ok = if i % 2 == 0 {
                        om == zero
                    } else {
                        add(&at(i), &at(i + 1)) == om
                    };
                    ensure(ok && s.even_pairs_hold && s.odd_pairs_hold, || {
                        format!("H^{n}({}) trial {trial}: pair {} fails", g.name(), i + 1)
                    })?;
                }
            }
            groups += 1;
        }
    }
    Ok(format!("1000 sequences on each of {groups} cohomology groups"))
}

fn criterion_10() -> Check {
    let t = Instant::now();
    let cfg = Config::default();
    let (nx, ny, r) = (24, 6, 4);
    let sc = shift_entangler_2d(&z2xz2(), &pauli_mu(), nx, ny, &cfg).map_err(e)?;
    let rep = boundary_lps_2d(&sc.circuit, &sc.beta, &sc.ring, 0, r, &cfg).map_err(e)?;
    ensure(rep.rows.len() == ny, || format!("{} rows", rep.rows.len()))?;
    ensure(rep.range <= r, || format!("range {} > {r}", rep.range))?;
    within(t, Duration::from_secs(300))?;
    Ok(format!(
        "{nx}x{ny} torus, {} row algebras, range {}",
        rep.rows.len(),
        rep.range
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("cohomology engine", criterion_1),
        ("shift example", criterion_2),
        ("well-definedness", criterion_3),
        ("homomorphism properties", criterion_4),
        ("oracle equivalence", criterion_5),
        ("blending", criterion_6),
        ("factorization", criterion_7),
        ("0d classification", criterion_8),
        ("swindle arithmetic", criterion_9),
        ("2d structure", criterion_10),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("PASS {n:>2} {name} ({secs:.1} s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {n:>2} {name} ({secs:.1} s): {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
