//! Equivariant energy minimization on `D_R` with the circle minimizer as
//! Dirichlet datum, and continuation in `δ`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::boundary::{boundary_field, minimize_circle, CircleSolution};
use crate::energy::{energy_and_gradient, energy_e, hessian_diagonal, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::field::{uniform_radii, Layout, PolarField};
use crate::optim::{self, LbfgsOptions, Objective};
use crate::radial::{radial_field, solve_radial_profile};
use crate::symmetry::{symmetrize, Sign, SymmetryClass};
use crate::Vec2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Init {
    /// `α η_d(r) e^{idθ}` from the isotropic profile.
    Radial,
    /// The comparison map with `n` rings of satellite vortices, stretched
    /// from `D_{1/2}` to `D_R`.
    Construction { n: usize },
    /// A field file written by a previous solve.
    File { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub d: i64,
    pub sign: Sign,
    pub delta: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "Nr")]
    pub nr: usize,
    #[serde(rename = "Ntheta")]
    pub ntheta: usize,
    #[serde(default = "default_init")]
    pub init: Init,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_symmetrize_every")]
    pub symmetrize_every: usize,
}

fn default_init() -> Init {
    Init::Radial
}

pub const DEFAULT_TOL: f64 = 1e-7;

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_max_iters() -> usize {
    50_000
}

fn default_symmetrize_every() -> usize {
    25
}

impl SolveConfig {
    pub fn new(d: i64, sign: Sign, delta: f64, radius: f64, nr: usize, ntheta: usize) -> Self {
        SolveConfig {
            d,
            sign,
            delta,
            radius,
            nr,
            ntheta,
            init: Init::Radial,
            tol: default_tol(),
            max_iters: default_max_iters(),
            symmetrize_every: default_symmetrize_every(),
        }
    }

    pub fn class(&self) -> Result<SymmetryClass> {
        SymmetryClass::new(self.d, self.sign)
    }

    pub fn validate(&self) -> Result<SymmetryClass> {
        let class = self.class()?;
        if !(self.delta.abs() < 1.0) {
            return Err(Error::invalid(format!("|delta| must be < 1, got {}", self.delta)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        if !(self.radius >= 5.0) {
            return Err(Error::invalid(format!("R must be at least 5, got {}", self.radius)));
        }
        if self.nr < 4 || self.ntheta < 4 {
            return Err(Error::invalid("Nr and Ntheta must be at least 4"));
        }
        if !self.ntheta.is_multiple_of(2) {
            return Err(Error::GridGroupMismatch(format!(
                "Ntheta = {} must be even so the full circle holds a multiple of 4n columns",
                self.ntheta
            )));
        }
        Ok(class)
    }

    pub fn radii(&self) -> Vec<f64> {
        uniform_radii(self.radius, self.nr)
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub field: PolarField,
    pub breakdown: EnergyBreakdown,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    /// `C_{δ,d}^±` of the boundary datum.
    pub boundary_c: f64,
    pub circle: CircleSolution,
    pub converged: bool,
    /// Energy after every accepted step.
    pub history: Vec<f64>,
}

/// Boundary datum on the outer ring and `C`.
pub fn boundary_ring(class: SymmetryClass, delta: f64, ntheta: usize) -> Result<(Vec<Vec2>, CircleSolution)> {
    let m = ntheta * 2 * class.n();
    let circle = minimize_circle(class.d(), class.sign(), delta, m, 1e-10)?;
    let trace = boundary_field(&circle.phase);
    Ok((trace.samples()[..ntheta].to_vec(), circle))
}

/// Initial field for `config` without the boundary datum applied.
pub fn initial_field(config: &SolveConfig) -> Result<PolarField> {
    let class = config.validate()?;
    let radii = config.radii();
    match &config.init {
        Init::Radial => {
            let r_max = (20.0 * config.d.abs() as f64).max(2.0 * config.radius).max(40.0);
            let n = ((r_max / config.radius * config.nr as f64 * 8.0) as usize).max(4096);
            let profile = solve_radial_profile(config.d, r_max, n, 1e-9)?;
            radial_field(
                &profile,
                config.d,
                class.sign().alpha(),
                1.0,
                Layout::Sector(class),
                radii,
                config.ntheta,
            )
        }
        Init::Construction { n } => crate::construction::comparison_init(class, *n, config.radius, radii, config.ntheta),
        Init::File { path } => {
            let (field, meta) = crate::io::read_field(path)?;
            if meta.d != config.d || meta.sign != config.sign {
                return Err(Error::ClassMismatch(format!(
                    "file holds class (d = {}, {}), config asks for (d = {}, {})",
                    meta.d, meta.sign, config.d, config.sign
                )));
            }
            if field.nrings() != config.nr + 1 || field.ntheta() != config.ntheta || field.outer_radius() != config.radius {
                return Err(Error::invalid("init file grid does not match Nr, Ntheta, R"));
            }
            Ok(field)
        }
    }
}

struct DiskProblem {
    template: PolarField,
    class: SymmetryClass,
    delta: f64,
}

impl DiskProblem {
    fn field_at(&self, x: &[f64]) -> PolarField {
        let mut f = self.template.clone();
        f.set_free_dofs(x);
        f
    }
}

impl Objective for DiskProblem {
    fn value_and_gradient(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        energy_and_gradient(&self.field_at(x), self.delta)
    }

    fn diagonal(&mut self, x: &[f64]) -> Option<Vec<f64>> {
        Some(hessian_diagonal(&self.field_at(x), self.delta))
    }

    fn project(&mut self, x: &mut [f64]) -> Result<bool> {
        let sym = symmetrize(self.class, &self.field_at(x))?;
        x.copy_from_slice(&sym.free_dofs());
        Ok(true)
    }
}

/// Minimize from the configured initializer.
pub fn minimize_2d(config: &SolveConfig) -> Result<SolveResult> {
    let init = initial_field(config)?;
    minimize_2d_from(config, init)
}

/// Minimize starting from `init` (only its free rings are used).
pub fn minimize_2d_from(config: &SolveConfig, init: PolarField) -> Result<SolveResult> {
    let class = config.validate()?;
    if init.layout() != &Layout::Sector(class) || init.nrings() != config.nr + 1 || init.ntheta() != config.ntheta {
        return Err(Error::invalid("initial field does not match the configured grid and class"));
    }
    let (ring, circle) = boundary_ring(class, config.delta, config.ntheta)?;
    let mut field = init;
    let outer = field.nrings() - 1;
    for j in 0..config.ntheta {
        field.set(0, j, Vec2::new(0.0, 0.0));
    }
    let mut field = symmetrize(class, &field)?;
    for (j, v) in ring.iter().enumerate() {
        field.set(outer, j, *v);
    }
    let mut problem = DiskProblem {
        template: field,
        class,
        delta: config.delta,
    };
    let opts = LbfgsOptions {
        max_iters: config.max_iters,
        tol: config.tol,
        project_every: config.symmetrize_every,
        ..Default::default()
    };
    let x0 = problem.template.free_dofs();
    let out = optim::minimize(&mut problem, x0, &opts)?;
    let field = problem.field_at(&out.x);
    let breakdown = energy_e(&field, config.delta)?;
    Ok(SolveResult {
        field,
        breakdown,
        iterations: out.iterations,
        final_gradient_norm: out.gradient_norm,
        boundary_c: circle.c(),
        circle,
        converged: out.converged,
        history: out.history,
    })
}

/// Solve along `deltas`, warm-starting each solve from the previous field.
pub fn continuation_delta(base: &SolveConfig, deltas: &[f64]) -> Result<Vec<SolveResult>> {
    if deltas.first() != Some(&0.0) {
        return Err(Error::invalid("continuation must start at delta = 0"));
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("continuation deltas must be strictly ascending"));
    }
    let mut out: Vec<SolveResult> = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let config = SolveConfig {
            delta,
            ..base.clone()
        };
        let res = match out.last() {
            None => minimize_2d(&config),
            Some(prev) => minimize_2d_from(&config, prev.field.clone()),
        };
        match res {
            Ok(r) => out.push(r),
            Err(e) => {
                return Err(Error::Continuation {
                    delta,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(out)
}
