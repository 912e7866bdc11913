//! Tolerances and limits. Defaults match the documented contract; callers
//! override individual fields.

/// Numerical tolerances used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Unitarity of representation matrices.
    pub unitary: f64,
    /// Unitarity of gates read from files.
    pub gate_unitary: f64,
    /// Distance to an m-th root of unity below which a phase is snapped.
    pub snap: f64,
    /// Residual accepted by the class-level gauge fit.
    pub class_fit: f64,
    /// Equivariance required from entangler inputs.
    pub equivariance: f64,
    /// Matrix unit relations, implementation residuals, leakage.
    pub algebra: f64,
    /// Singular value threshold for kernels and intersections.
    pub rank: f64,
    /// Principal angle tolerance when comparing two algebras.
    pub span: f64,
    /// Restriction residuals of a blend.
    pub blend: f64,
    /// Factorization residual.
    pub factorization: f64,
    /// Intertwiner residual.
    pub intertwiner: f64,
    /// Smallest singular value of an averaged intertwiner seed.
    pub intertwiner_singular: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unitary: 1e-10,
            gate_unitary: 1e-8,
            snap: 1e-6,
            class_fit: 1e-4,
            equivariance: 1e-9,
            algebra: 1e-8,
            rank: 1e-8,
            span: 1e-7,
            blend: 1e-8,
            factorization: 1e-7,
            intertwiner: 1e-8,
            intertwiner_singular: 1e-6,
        }
    }
}

impl Tolerances {
    /// Sets a tolerance by name. Returns false for unknown keys.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "unitary" => &mut self.unitary,
            "gate_unitary" => &mut self.gate_unitary,
            "snap" => &mut self.snap,
            "class_fit" => &mut self.class_fit,
            "equivariance" => &mut self.equivariance,
            "algebra" => &mut self.algebra,
            "rank" => &mut self.rank,
            "span" => &mut self.span,
            "blend" => &mut self.blend,
            "factorization" => &mut self.factorization,
            "intertwiner" => &mut self.intertwiner,
            "intertwiner_singular" => &mut self.intertwiner_singular,
            _ => return false,
        };
        *slot = value;
        true
    }

    /// All tolerances as (name, value) pairs in a fixed order.
    pub fn entries(&self) -> [(&'static str, f64); 12] {
        [
            ("unitary", self.unitary),
            ("gate_unitary", self.gate_unitary),
            ("snap", self.snap),
            ("class_fit", self.class_fit),
            ("equivariance", self.equivariance),
            ("algebra", self.algebra),
            ("rank", self.rank),
            ("span", self.span),
            ("blend", self.blend),
            ("factorization", self.factorization),
            ("intertwiner", self.intertwiner),
            ("intertwiner_singular", self.intertwiner_singular),
        ]
    }
}

/// Tolerances plus resource limits and the random seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub tol: Tolerances,
    /// Largest dense operator dimension ever materialized.
    pub max_dense_dim: usize,
    /// Retries for the intertwiner search.
    pub intertwiner_retries: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol: Tolerances::default(),
            max_dense_dim: 4096,
            intertwiner_retries: 32,
            seed: 0x5eed,
        }
    }
}

impl Config {
    pub fn with_seed(seed: u64) -> Self {
        Config {
            seed,
            ..Config::default()
        }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> crate::Result<()> {
        if dim > self.max_dense_dim {
            Err(crate::Error::CapExceeded {
                dim,
                cap: self.max_dense_dim,
            })
        } else {
            Ok(())
        }
    }
}
