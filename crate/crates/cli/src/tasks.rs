//! Subcommand implementations. Each returns results and assertions; errors
//! are turned into failed assertions by the caller.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};
use symtangle_core::boundary::{
    boundary_algebra, boundary_lps_2d, index_0d, index_1d, lps_index_0d, span_distance, BoundaryAlgebra, IndexResult,
    Route,
};
use symtangle_core::cohomology::{brute_force_order_counts, order_counts, CohomClass, CohomologyGroup};
use symtangle_core::constructions::{
    blend_1d, charge_unitary, disentangle_0d, even_odd_factorization, realize_schedule_0d, swindle_charges, Scenario,
};
use symtangle_core::group::{Cochain, GroupTable};
use symtangle_core::projrep::ProjectiveRep;
use symtangle_core::rng::derived;
use symtangle_core::{Config, Error};

use crate::report::Assertion;
use crate::scenario::ScenarioFile;

pub type Outcome = (Value, Vec<Assertion>);

/// Parameters shared by all subcommands after flags and the task stanza
/// have been merged.
#[derive(Debug, Clone)]
pub struct Params {
    pub cfg: Config,
    pub group: Option<String>,
    pub degree: Option<usize>,
    pub cut: Option<i64>,
    pub width: Option<usize>,
    pub brute_force: bool,
}

impl Params {
    fn group(&self) -> Result<GroupTable> {
        let name = self.group.as_deref().ok_or_else(|| anyhow!("--group is required"))?;
        GroupTable::builtin(name).ok_or_else(|| anyhow!("unknown group `{name}`"))
    }

    fn degree(&self, default: usize) -> usize {
        self.degree.unwrap_or(default)
    }

    fn cut(&self) -> i64 {
        self.cut.unwrap_or(0)
    }

    fn width(&self, sc: &Scenario) -> Result<usize> {
        let r = self.width.unwrap_or(sc.width);
        sc.ring.require_width(r)?;
        Ok(r)
    }

    fn route(&self) -> Route {
        if self.brute_force {
            Route::Definition
        } else {
            Route::Eta
        }
    }
}

fn class_json(c: &CohomClass) -> Value {
    json!({ "coordinates": c.coordinates, "invariant_factors": c.invariant_factors })
}

fn index_json(ind: &IndexResult) -> Value {
    json!({
        "class": class_json(&ind.class),
        "method": format!("{:?}", ind.method).to_lowercase(),
        "fit_residual": ind.fit_residual,
        "residual": ind.residual,
        "equivariance": ind.equivariance,
        "range": ind.range,
        "route": ind.route.map(route_name),
        "digest": format!("{:016x}", ind.digest),
    })
}

fn route_name(r: Route) -> &'static str {
    match r {
        Route::Eta => "eta",
        Route::Definition => "definition",
    }
}

fn algebra_json(p: &BoundaryAlgebra) -> Value {
    let factors: Vec<Value> = p
        .factors
        .iter()
        .filter(|f| !f.plain)
        .map(|f| json!({ "wires": f.wires, "k": f.k, "m": f.m }))
        .collect();
    json!({
        "route": route_name(p.route),
        "strip": p.strip,
        "log2_dim": p.log2_dim(),
        "factors": factors,
        "wire_structure": p.wire_structure(1e-10),
    })
}

pub fn cohomology(p: &Params) -> Result<Outcome> {
    let g = p.group()?;
    let n = p.degree.ok_or_else(|| anyhow!("--degree is required"))?;
    let h = CohomologyGroup::default_for(&g, n)?;
    let counts = order_counts(h.invariant_factors());
    let mut asserts = vec![Assertion::holds(
        "generators are cocycles",
        h.generators().iter().all(|c| c.is_cocycle(&g)),
    )];
    if p.brute_force {
        let brute = brute_force_order_counts(&g, n, h.modulus())?;
        asserts.push(Assertion::equal("element orders match enumeration", &brute, &counts));
    }
    let gens: Vec<&[u64]> = h.generators().iter().map(|c| c.values()).collect();
    let results = json!({
        "group": g.name(),
        "order": g.order(),
        "degree": n,
        "modulus": h.modulus(),
        "invariant_factors": h.invariant_factors(),
        "element_orders": counts,
        "generators": gens,
    });
    Ok((results, asserts))
}

fn characters(g: &GroupTable) -> Result<Vec<CohomClass>> {
    Ok(CohomologyGroup::default_for(g, 1)?.elements())
}

pub fn index0d(p: &Params) -> Result<Outcome> {
    let g = p.group()?;
    let reg = ProjectiveRep::regular(&g);
    let mut rows = Vec::new();
    let mut asserts = Vec::new();
    for c in characters(&g)? {
        let v = charge_unitary(&g, &c.representative)?;
        let ind = index_0d(&v, &reg, &p.cfg)?;
        asserts.push(Assertion::equal(
            &format!("charge {:?} is recovered", c.coordinates),
            &ind.class.coordinates,
            &c.coordinates,
        ));
        rows.push(json!({ "charge": c.coordinates, "index": index_json(&ind) }));
    }
    Ok((json!({ "group": g.name(), "charges": rows }), asserts))
}

pub fn lps0d(p: &Params) -> Result<Outcome> {
    let g = p.group()?;
    let h2 = CohomologyGroup::default_for(&g, 2)?;
    let q = g.order();
    let mut rng = derived(p.cfg.seed, 0x1e5);
    let mut rows = Vec::new();
    let mut asserts = Vec::new();
    for c in h2.elements() {
        use rand::Rng;
        let nu = Cochain::from_fn(
            q,
            1,
            q as u64,
            |x| if x[0] == 0 { 0 } else { rng.gen_range(0..q as u64) },
        );
        let mu = c.representative.add(&nu.coboundary(&g))?;
        let rep = ProjectiveRep::regular_projective(&g, &mu)?;
        let ind = lps_index_0d(&rep, &p.cfg)?;
        asserts.push(Assertion::equal(
            &format!("class {:?} is recovered", c.coordinates),
            &ind.class.coordinates,
            &c.coordinates,
        ));
        rows.push(json!({ "cocycle": mu.values(), "index": index_json(&ind) }));
    }
    Ok((
        json!({ "group": g.name(), "invariant_factors": h2.invariant_factors(), "classes": rows }),
        asserts,
    ))
}

pub fn disentangle0d(p: &Params) -> Result<Outcome> {
    let g = p.group()?;
    let reg = ProjectiveRep::regular(&g);
    let chars = characters(&g)?;
    let vs = chars
        .iter()
        .map(|c| charge_unitary(&g, &c.representative))
        .collect::<symtangle_core::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut asserts = Vec::new();
    for (a, va) in chars.iter().zip(&vs) {
        for (b, vb) in chars.iter().zip(&vs) {
            let name = format!("{:?} -> {:?}", a.coordinates, b.coordinates);
            match disentangle_0d(va, vb, &reg, &p.cfg) {
                Ok(d) => {
                    asserts.push(Assertion::holds(&format!("{name} only for equal charges"), a == b));
                    asserts.push(Assertion::at_most(
                        &format!("{name} residual"),
                        d.residual.max(d.symmetry_residual),
                        p.cfg.tol.algebra,
                    ));
                    rows.push(json!({ "from": a.coordinates, "to": b.coordinates, "disentangled": true, "residual": d.residual, "symmetry_residual": d.symmetry_residual }));
                }
                Err(Error::ChargeMismatch(..)) => {
                    asserts.push(Assertion::holds(
                        &format!("{name} refused for different charges"),
                        a != b,
                    ));
                    rows.push(json!({ "from": a.coordinates, "to": b.coordinates, "disentangled": false }));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok((json!({ "group": g.name(), "pairs": rows }), asserts))
}

pub fn swindle(p: &Params) -> Result<Outcome> {
    use rand::Rng;
    let g = p.group()?;
    let n = p.degree(1);
    let h = CohomologyGroup::default_for(&g, n)?;
    let window = p.width.unwrap_or(4).max(1);
    let mut rng = derived(p.cfg.seed, 0x5717);
    let len = rng.gen_range(1..=window);
    let f = h.invariant_factors().to_vec();
    let ind: Vec<CohomClass> = (0..len)
        .map(|_| h.element(&f.iter().map(|&d| rng.gen_range(0..d)).collect::<Vec<_>>()))
        .collect();
    let s = swindle_charges(&f, &ind, window)?;
    let mut asserts = vec![
        Assertion::holds("odd pairs cancel", s.odd_pairs_hold),
        Assertion::holds("even pairs match the indices", s.even_pairs_hold),
    ];
    let mut realized = None;
    if n == 1 {
        let r = realize_schedule_0d(&h, &s, &p.cfg)?;
        asserts.push(Assertion::at_most(
            "schedule realized by symmetric pairs",
            r,
            p.cfg.tol.algebra,
        ));
        realized = Some(r);
    }
    let results = json!({
        "group": g.name(),
        "degree": n,
        "invariant_factors": f,
        "window": window,
        "indices": s.indices,
        "omega": s.omega,
        "realization_residual": realized,
    });
    Ok((results, asserts))
}

pub fn index1d(sc: &Scenario, p: &Params) -> Result<Outcome> {
    let r = p.width(sc)?;
    let ind = index_1d(&sc.circuit, &sc.beta, &sc.ring, p.cut(), r, p.route(), &p.cfg)?;
    let tol = &p.cfg.tol;
    let asserts = vec![
        Assertion::at_most("implementation residual", ind.residual, tol.algebra),
        Assertion::at_most("class fit residual", ind.fit_residual, tol.class_fit),
        Assertion::at_most("symmetry leakage", ind.equivariance, tol.algebra),
    ];
    Ok((
        json!({ "cut": p.cut(), "width": r, "index": index_json(&ind) }),
        asserts,
    ))
}

pub fn boundary(sc: &Scenario, p: &Params) -> Result<Outcome> {
    let r = p.width(sc)?;
    let x = p.cut();
    let tol = &p.cfg.tol;
    let eta = boundary_algebra(&sc.circuit, &sc.ring, x, r, Route::Eta, &p.cfg)?;
    let leak = eta.invariance_leakage(&sc.beta)?;
    let mut asserts = vec![
        Assertion::at_most("matrix unit relations", eta.unit_residual(), tol.algebra),
        Assertion::at_most("symmetry leakage", leak, tol.algebra),
    ];
    let mut results = json!({ "cut": x, "width": r, "algebra": algebra_json(&eta), "leakage": leak });
    if p.brute_force {
        let def = boundary_algebra(&sc.circuit, &sc.ring, x, r, Route::Definition, &p.cfg)?;
        let d = span_distance(&eta, &def, &p.cfg)?;
        asserts.push(Assertion::at_most(
            "definition route spans the same algebra",
            d,
            tol.span,
        ));
        results["definition"] = algebra_json(&def);
        results["span_distance"] = d.into();
    }
    Ok((results, asserts))
}

pub fn boundary2d(sc: &Scenario, p: &Params) -> Result<Outcome> {
    let r = p.width.unwrap_or(sc.width);
    let rep = boundary_lps_2d(&sc.circuit, &sc.beta, &sc.ring, p.cut(), r, &p.cfg)?;
    let tol = &p.cfg.tol;
    let worst = rep.rows.iter().map(|row| row.leakage).fold(0.0, f64::max);
    let asserts = vec![
        Assertion::at_most("row algebra range", rep.range as f64, r as f64),
        Assertion::at_most("row leakage", worst, tol.algebra),
        Assertion::at_most("equivariance", rep.equivariance, tol.algebra),
        Assertion::at_most("eta residual", rep.eta_residual, tol.algebra),
    ];
    let rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|row| json!({ "row": row.row, "log2_dim": row.log2_dim, "range": row.range, "leakage": row.leakage }))
        .collect();
    let results = json!({ "cut": rep.cut, "width": rep.width, "rows": rows, "range": rep.range });
    Ok((results, asserts))
}

pub fn blend(sc: &Scenario, p: &Params) -> Result<Outcome> {
    let mut sc = sc.clone();
    if let Some(r) = p.width {
        sc = sc.with_width(r);
    }
    let b = blend_1d(&sc, p.cut(), &p.cfg)?;
    let tol = p.cfg.tol.blend;
    let asserts = vec![
        Assertion::at_most("agrees with the entangler left of the cut", b.left_residual, tol),
        Assertion::at_most("identity right of the cut", b.right_residual, tol),
        Assertion::at_most("equivariance", b.equivariance, tol),
    ];
    let results = json!({
        "cut": b.cut,
        "width": b.width,
        "left_window": [b.left_window.0, b.left_window.1],
        "depth": b.depth,
        "range": b.range,
        "range_constant": b.range_constant,
    });
    Ok((results, asserts))
}

pub fn factorize(sc: &Scenario, p: &Params) -> Result<Outcome> {
    let f = even_odd_factorization(sc, &p.cfg)?;
    let tol = &p.cfg.tol;
    let mut asserts = vec![
        Assertion::at_most("factorization residual", f.residual, tol.factorization),
        Assertion::at_most("block length", f.block_length as f64, (4 * sc.width) as f64),
        Assertion::at_most("block leakage", f.block_leakage, tol.algebra),
        Assertion::at_most("equivariance", f.equivariance, tol.algebra),
    ];
    if let Some(d) = f.dense_residual {
        asserts.push(Assertion::at_most("dense residual", d, tol.factorization));
    }
    let results = json!({
        "cuts": f.cuts,
        "blocks_even": f.blocks_even,
        "blocks_odd": f.blocks_odd,
        "block_length": f.block_length,
        "interior_residual": f.interior_residual,
        "dense_residual": f.dense_residual,
        "log2_dim": f.system.ring.log2_total_dim(),
    });
    Ok((results, asserts))
}

/// Builds the scenario of a file, checking the task width against the ring.
pub fn load(file: &ScenarioFile, p: &Params) -> Result<Scenario> {
    let sc = file.build(&p.cfg)?;
    if let Some(r) = p.width {
        let is_torus = matches!(sc.ring.geometry(), symtangle_core::lattice::Geometry::Torus { .. });
        if !is_torus {
            sc.ring.require_width(r).context("task width")?;
        }
    }
    Ok(sc)
}

pub fn run_on(command: &str, sc: &Scenario, p: &Params) -> Result<Outcome> {
    match command {
        "index1d" => index1d(sc, p),
        "boundary" => boundary(sc, p),
        "boundary2d" => boundary2d(sc, p),
        "blend" => blend(sc, p),
        "factorize" => factorize(sc, p),
        other => bail!("`{other}` does not take a scenario"),
    }
}
