//! Scenario files. A scenario names a group and either a generator that
//! builds ring, symmetry and circuit, or explicit `ring`, `symmetry` and
//! `circuit` stanzas. An optional `task` stanza picks the subcommand and
//! its parameters.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use symtangle_core::cohomology::CohomologyGroup;
use symtangle_core::constructions::{random_circuit, shift_entangler, shift_entangler_2d, Layout, Scenario};
use symtangle_core::group::{Cochain, GroupTable};
use symtangle_core::lattice::{Circuit, Geometry, OnSiteSymmetry, SpinRing};
use symtangle_core::linalg::unitarity_residual;
use symtangle_core::projrep::ProjectiveRep;
use symtangle_core::rng::seeded;
use symtangle_core::tensor::LocalOperator;
use symtangle_core::{c64, CMat, Config};

/// Rows of `[re, im]` pairs.
pub type Matrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub group: GroupSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub symmetry: Vec<LegSymmetry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskSpec>,
}

/// A builtin name (`Z2`, `Z4`, `Z2xZ2`, `S3`, ...) or a multiplication table
/// with the identity at index 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Builtin(String),
    Table {
        #[serde(default = "table_name")]
        name: String,
        table: Vec<Vec<usize>>,
    },
}

fn table_name() -> String {
    "G".into()
}

/// `sites` for a ring or `nx` and `ny` for a torus; `legs` lists the
/// dimension of every leg of a site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    pub legs: Vec<usize>,
}

/// The representation on one leg of every site; legs without an entry
/// carry the trivial action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegSymmetry {
    pub leg: usize,
    pub rep: RepSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RepSpec {
    Trivial {
        dim: usize,
    },
    Regular,
    RegularProjective {
        cocycle: CochainSpec,
    },
    Pauli,
    Character {
        charge: CochainSpec,
    },
    /// One matrix per group element, in table order.
    Matrices {
        matrices: Vec<Matrix>,
    },
}

/// `"zero"`, `"pauli"` (Z2xZ2 only), raw values mod |G| in lexicographic
/// argument order, or `{ class = [...] }` for the canonical representative
/// of a class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CochainSpec {
    Named(String),
    Values(Vec<u64>),
    Class { class: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// The shift entangler on `sites` sites.
    Shift {
        cocycle: CochainSpec,
        sites: usize,
    },
    /// Row-wise shift on an `nx` by `ny` torus.
    Shift2d {
        cocycle: CochainSpec,
        nx: usize,
        ny: usize,
    },
    /// Shift for `cocycle` stacked with the shift for its negative.
    ShiftPair {
        cocycle: CochainSpec,
        sites: usize,
    },
    /// Random gates on the `ring`/`symmetry` stanzas. Without `charges` the
    /// gates are symmetric; otherwise each gate carries one of the listed
    /// characters.
    Random {
        layout: LayoutName,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        legs: Vec<usize>,
        depth: usize,
        seed: u64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        charges: Vec<CochainSpec>,
    },
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutName {
    Site,
    Bond,
    Diagonal,
}

/// Layers of gates; layer 0 acts first. Wires are numbered
/// `site * legs + leg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub layers: Vec<LayerSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub gates: Vec<GateSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub wires: Vec<usize>,
    pub matrix: Matrix,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute_force: Option<bool>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow!("malformed scenario: {e}"))
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Builds and validates the scenario.
    pub fn build(&self, cfg: &Config) -> Result<Scenario> {
        let g = self.group.build().context("field `group`")?;
        let sc = match &self.generator {
            Some(gen) => self.generated(gen, &g, cfg).context("field `generator`")?,
            None => {
                let (ring, beta) = self.system(&g, cfg)?;
                let circuit = match &self.circuit {
                    Some(c) => c.build(&ring, cfg).context("field `circuit`")?,
                    None => Circuit::identity(ring.num_wires()),
                };
                Scenario::new(&self.name, ring, beta, circuit, cfg)?
            }
        };
        Ok(sc.with_name(&self.name))
    }

    fn generated(&self, gen: &GeneratorSpec, g: &GroupTable, cfg: &Config) -> Result<Scenario> {
        let standalone = matches!(
            gen,
            GeneratorSpec::Shift { .. } | GeneratorSpec::Shift2d { .. } | GeneratorSpec::ShiftPair { .. }
        );
        if standalone && (self.ring.is_some() || !self.symmetry.is_empty()) {
            bail!("this generator builds its own ring and symmetry; drop the `ring` and `symmetry` stanzas");
        }
        if self.circuit.is_some() {
            bail!("`generator` and `circuit` are mutually exclusive");
        }
        Ok(match gen {
            GeneratorSpec::Shift { cocycle, sites } => {
                shift_entangler(g, &cocycle.build(g, 2).context("field `cocycle`")?, *sites, cfg)?
            }
            GeneratorSpec::Shift2d { cocycle, nx, ny } => {
                shift_entangler_2d(g, &cocycle.build(g, 2).context("field `cocycle`")?, *nx, *ny, cfg)?
            }
            GeneratorSpec::ShiftPair { cocycle, sites } => {
                let mu = cocycle.build(g, 2).context("field `cocycle`")?;
                shift_entangler(g, &mu, *sites, cfg)?.stack(&shift_entangler(g, &mu.neg(), *sites, cfg)?, cfg)?
            }
            GeneratorSpec::Random {
                layout,
                legs,
                depth,
                seed,
                charges,
            } => {
                let (ring, beta) = self.system(g, cfg)?;
                let layout = match layout {
                    LayoutName::Site => Layout::Site(legs.clone()),
                    LayoutName::Bond => Layout::Bond(legs.clone()),
                    LayoutName::Diagonal => Layout::Diagonal(legs.clone()),
                };
                let charges = charges
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.build(g, 1).with_context(|| format!("field `charges[{i}]`")))
                    .collect::<Result<Vec<_>>>()?;
                let c = random_circuit(&ring, &beta, &layout, *depth, &charges, &mut seeded(*seed), cfg)?;
                Scenario::new(&self.name, ring, beta, c, cfg)?
            }
            GeneratorSpec::Identity => {
                let (ring, beta) = self.system(g, cfg)?;
                Scenario::identity(&self.name, ring, beta)
            }
        })
    }

    fn system(&self, g: &GroupTable, cfg: &Config) -> Result<(SpinRing, OnSiteSymmetry)> {
        let spec = self.ring.as_ref().ok_or_else(|| anyhow!("missing `ring` stanza"))?;
        let ring = spec.build(cfg).context("field `ring`")?;
        if self.symmetry.is_empty() {
            return Ok((ring.clone(), OnSiteSymmetry::trivial(&ring, g.clone())));
        }
        let mut reps = Vec::new();
        for (i, s) in self.symmetry.iter().enumerate() {
            let at = || format!("field `symmetry[{i}]`");
            let dim = *spec
                .legs
                .get(s.leg)
                .ok_or_else(|| anyhow!("no leg {}", s.leg))
                .with_context(at)?;
            let rep = s.rep.build(g, cfg).with_context(at)?;
            if rep.dim() != dim {
                return Err(anyhow!(
                    "representation of dimension {} on a leg of dimension {dim}",
                    rep.dim()
                ))
                .with_context(at);
            }
            reps.push((s.leg, rep));
        }
        let beta = OnSiteSymmetry::per_leg(&ring, g, &reps).context("field `symmetry`")?;
        Ok((ring, beta))
    }
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupTable> {
        match self {
            GroupSpec::Builtin(name) => GroupTable::builtin(name).ok_or_else(|| anyhow!("unknown group `{name}`")),
            GroupSpec::Table { name, table } => Ok(GroupTable::new(name, table.clone())?),
        }
    }
}

impl RingSpec {
    fn build(&self, cfg: &Config) -> Result<SpinRing> {
        let geometry = match (self.sites, self.nx, self.ny) {
            (Some(n), None, None) => Geometry::Ring(n),
            (None, Some(nx), Some(ny)) => Geometry::Torus { nx, ny },
            _ => bail!("give either `sites` or both `nx` and `ny`"),
        };
        let d: usize = self.legs.iter().product();
        if d > cfg.max_dense_dim {
            bail!("site dimension {d} exceeds the cap {}", cfg.max_dense_dim);
        }
        Ok(SpinRing::uniform(geometry, &self.legs)?)
    }
}

impl RepSpec {
    fn build(&self, g: &GroupTable, cfg: &Config) -> Result<ProjectiveRep> {
        Ok(match self {
            RepSpec::Trivial { dim } => ProjectiveRep::trivial(g, *dim),
            RepSpec::Regular => ProjectiveRep::regular(g),
            RepSpec::RegularProjective { cocycle } => {
                ProjectiveRep::regular_projective(g, &cocycle.build(g, 2).context("field `cocycle`")?)?
            }
            RepSpec::Pauli => {
                if g.table() != GroupTable::z2xz2().table() {
                    bail!("the Pauli representation needs Z2xZ2");
                }
                ProjectiveRep::pauli()
            }
            RepSpec::Character { charge } => {
                ProjectiveRep::character(g, &charge.build(g, 1).context("field `charge`")?)?
            }
            RepSpec::Matrices { matrices } => {
                let ms = matrices
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        let m = matrix(m).with_context(|| format!("field `matrices[{i}]`"))?;
                        let res = unitarity_residual(&m);
                        if res > cfg.tol.gate_unitary {
                            bail!("field `matrices[{i}]`: not unitary (residual {res:.3e})");
                        }
                        Ok(m)
                    })
                    .collect::<Result<Vec<_>>>()?;
                ProjectiveRep::new(g.clone(), ms, cfg.tol.gate_unitary)?
            }
        })
    }
}

impl CochainSpec {
    /// The cochain over `Z/|G|`.
    pub fn build(&self, g: &GroupTable, degree: usize) -> Result<Cochain> {
        let q = g.order();
        let c = match self {
            CochainSpec::Named(n) if n == "zero" => Cochain::zero(q, degree, q as u64),
            CochainSpec::Named(n) if n == "pauli" => {
                if degree != 2 || g.table() != GroupTable::z2xz2().table() {
                    bail!("`pauli` names a 2-cocycle of Z2xZ2");
                }
                ProjectiveRep::pauli()
                    .exact_cocycle()
                    .cloned()
                    .ok_or_else(|| anyhow!("pauli cocycle"))?
            }
            CochainSpec::Named(n) => bail!("unknown cochain `{n}`"),
            CochainSpec::Values(v) => Cochain::from_values(q, degree, q as u64, v.clone())?,
            CochainSpec::Class { class } => {
                let h = CohomologyGroup::default_for(g, degree)?;
                if class.len() != h.invariant_factors().len() {
                    bail!(
                        "class has {} coordinates, H^{degree} has {}",
                        class.len(),
                        h.invariant_factors().len()
                    );
                }
                h.element(class).representative
            }
        };
        c.require_cocycle(g)?;
        Ok(c)
    }
}

impl CircuitSpec {
    fn build(&self, ring: &SpinRing, cfg: &Config) -> Result<Circuit> {
        let mut layers = Vec::new();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut gates = Vec::new();
            for (i, gate) in layer.gates.iter().enumerate() {
                let at = || format!("gate `layers[{l}].gates[{i}]`");
                if let Some(&w) = gate.wires.iter().find(|&&w| w >= ring.num_wires()) {
                    return Err(anyhow!("wire {w} does not exist")).with_context(at);
                }
                let dims = ring.dims_of(&gate.wires);
                let d: usize = dims.iter().product();
                if d > cfg.max_dense_dim {
                    return Err(anyhow!("dimension {d} exceeds the cap {}", cfg.max_dense_dim)).with_context(at);
                }
                let m = matrix(&gate.matrix).with_context(at)?;
                if m.nrows() != d {
                    return Err(anyhow!("matrix of size {} on wires of total dimension {d}", m.nrows()))
                        .with_context(at);
                }
                let res = unitarity_residual(&m);
                if res > cfg.tol.gate_unitary {
                    return Err(anyhow!("not unitary (residual {res:.3e})")).with_context(at);
                }
                gates.push(LocalOperator::from_unordered(&gate.wires, &dims, m).with_context(at)?);
            }
            layers.push(gates);
        }
        Ok(Circuit::new(ring, layers, cfg.tol.gate_unitary)?)
    }
}

fn matrix(rows: &Matrix) -> Result<CMat> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        bail!("matrix must be square and nonempty");
    }
    Ok(CMat::from_fn(n, n, |i, j| c64::new(rows[i][j][0], rows[i][j][1])))
}

/// Inverse of the matrix reader.
pub fn matrix_rows(m: &CMat) -> Matrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}
