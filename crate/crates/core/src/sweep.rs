//! Batches of solves over `(d, sign, δ, R)` with `δ`-continuation inside each
//! `(d, sign, R)` chain, plus the per-run summary record.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{degree_at_infinity, delta0, nonradiality, DEFAULT_FRACTIONS};
use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};
use crate::io::{table_csv, write_atomic, write_field, write_json};
use crate::solver::{minimize_2d, minimize_2d_from, SolveConfig, SolveResult, DEFAULT_TOL};
use crate::symmetry::{winding_number, Sign, DEFAULT_MIN_MODULUS};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(rename = "Nr")]
    pub nr: usize,
    #[serde(rename = "Ntheta")]
    pub ntheta: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub d_list: Vec<i64>,
    pub sign_list: Vec<Sign>,
    pub delta_list: Vec<f64>,
    #[serde(rename = "R_list")]
    pub r_list: Vec<f64>,
    pub grid: Grid,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d_list.is_empty() || self.sign_list.is_empty() || self.delta_list.is_empty() || self.r_list.is_empty() {
            return Err(Error::invalid("sweep lists must be nonempty"));
        }
        if let Some(d) = self.d_list.iter().find(|&&d| d > -1) {
            return Err(Error::invalid(format!("d must be <= -1, got {d}")));
        }
        if self.delta_list.iter().any(|x| !(0.0..1.0).contains(x)) {
            return Err(Error::invalid("deltas must lie in [0, 1)"));
        }
        let ascending = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if !ascending(&self.delta_list) || !ascending(&self.r_list) {
            return Err(Error::invalid("delta_list and R_list must be strictly ascending"));
        }
        Ok(())
    }

    fn config(&self, d: i64, sign: Sign, delta: f64, radius: f64) -> SolveConfig {
        let mut c = SolveConfig::new(d, sign, delta, radius, self.grid.nr, self.grid.ntheta);
        if let Some(t) = self.tol {
            c.tol = t;
        }
        if let Some(m) = self.max_iters {
            c.max_iters = m;
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingProbe {
    pub r: f64,
    pub winding: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: SolveConfig,
    pub energies: EnergyBreakdown,
    pub potential_mass: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub iterations: usize,
    pub final_gradient_norm: f64,
    pub converged: bool,
    pub winding_probes: Vec<WindingProbe>,
    pub degree_at_infinity: Option<i64>,
    pub nonradiality_r1: f64,
    pub delta0: f64,
    pub below_delta0: bool,
    pub seconds: f64,
}

impl RunSummary {
    pub fn new(config: &SolveConfig, res: &SolveResult, seconds: f64) -> Result<Self> {
        let outer = res.field.outer_radius();
        let winding_probes = DEFAULT_FRACTIONS
            .iter()
            .map(|f| {
                let r = f * outer;
                Ok(WindingProbe {
                    r,
                    winding: winding_number(&res.field.circle_trace(r)?, DEFAULT_MIN_MODULUS).ok(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let th = delta0(config.d)?;
        Ok(RunSummary {
            config: config.clone(),
            energies: res.breakdown,
            potential_mass: res.breakdown.potential_mass(),
            c: res.boundary_c,
            iterations: res.iterations,
            final_gradient_norm: res.final_gradient_norm,
            converged: res.converged,
            winding_probes,
            degree_at_infinity: degree_at_infinity(&res.field, &DEFAULT_FRACTIONS).ok(),
            nonradiality_r1: nonradiality(&res.field, 1.0)?,
            delta0: th.delta0,
            below_delta0: config.delta < th.delta0,
            seconds,
        })
    }
}

/// One line of the aggregate table.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub d: i64,
    pub sign: Sign,
    pub delta: f64,
    pub radius: f64,
    pub summary: Option<RunSummary>,
    pub status: String,
}

pub const AGGREGATE_COLUMNS: [&str; 11] = [
    "d",
    "sign",
    "delta",
    "R",
    "E_total",
    "W_mass",
    "winding",
    "delta0",
    "in_threshold_region",
    "nonradiality",
    "status",
];

impl SweepRow {
    fn cells(&self) -> Vec<String> {
        let th = delta0(self.d).map(|t| t.delta0).unwrap_or(f64::NAN);
        let mut out = vec![
            self.d.to_string(),
            self.sign.to_string(),
            self.delta.to_string(),
            self.radius.to_string(),
        ];
        match &self.summary {
            Some(s) => out.extend([
                s.energies.total.to_string(),
                s.potential_mass.to_string(),
                s.degree_at_infinity.map(|w| w.to_string()).unwrap_or_default(),
            ]),
            None => out.extend([String::new(), String::new(), String::new()]),
        }
        out.push(th.to_string());
        out.push((self.delta < th).to_string());
        out.push(self.summary.as_ref().map(|s| s.nonradiality_r1.to_string()).unwrap_or_default());
        out.push(self.status.clone());
        out
    }

    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

fn run_dir(out: &Path, d: i64, sign: Sign, delta: f64, radius: f64) -> PathBuf {
    out.join(format!("d{d}_{sign}_R{radius}_delta{delta}"))
}

fn run_chain(spec: &SweepSpec, d: i64, sign: Sign, radius: f64) -> Vec<SweepRow> {
    let mut prev: Option<SolveResult> = None;
    let mut rows = Vec::new();
    for &delta in &spec.delta_list {
        let config = spec.config(d, sign, delta, radius);
        let start = Instant::now();
        let res = match prev.take() {
            Some(p) => minimize_2d_from(&config, p.field),
            None => minimize_2d(&config),
        };
        let row = res.and_then(|r| {
            let summary = RunSummary::new(&config, &r, start.elapsed().as_secs_f64())?;
            let dir = run_dir(&spec.output_dir, d, sign, delta, radius);
            write_field(&dir.join("field.csv"), &r.field, d, sign, delta)?;
            write_json(&dir.join("summary.json"), &summary)?;
            let status = if r.converged { "ok" } else { "not_converged" };
            prev = Some(r);
            Ok((summary, status.to_string()))
        });
        rows.push(match row {
            Ok((s, status)) => SweepRow {
                d,
                sign,
                delta,
                radius,
                summary: Some(s),
                status,
            },
            Err(e) => SweepRow {
                d,
                sign,
                delta,
                radius,
                summary: None,
                status: format!("error: {e}").replace(['\n', ','], " "),
            },
        });
    }
    rows
}

/// Runs every chain (concurrently, on the current rayon pool) and writes
/// `aggregate.csv` into the output directory. Rows come back in the order
/// d, sign, R, delta of the spec lists.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    std::fs::create_dir_all(&spec.output_dir)?;
    let chains: Vec<(i64, Sign, f64)> = spec
        .d_list
        .iter()
        .flat_map(|&d| {
            spec.sign_list
                .iter()
                .flat_map(move |&s| spec.r_list.iter().map(move |&r| (d, s, r)))
        })
        .collect();
    let rows: Vec<SweepRow> = chains
        .par_iter()
        .map(|&(d, s, r)| run_chain(spec, d, s, r))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    write_atomic(&spec.output_dir.join("aggregate.csv"), &aggregate_csv(spec, &rows)?)?;
    Ok(rows)
}

pub fn aggregate_csv(spec: &SweepSpec, rows: &[SweepRow]) -> Result<Vec<u8>> {
    let meta = format!(
        "Nr={},Ntheta={},tol={},rows={}",
        spec.grid.nr,
        spec.grid.ntheta,
        spec.tol.unwrap_or(DEFAULT_TOL),
        rows.len()
    );
    table_csv(&meta, &AGGREGATE_COLUMNS, rows.iter().map(SweepRow::cells).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(dir: &Path) -> SweepSpec {
        SweepSpec {
            d_list: vec![-1],
            sign_list: vec![Sign::Plus, Sign::Minus],
            delta_list: vec![0.0, 0.05],
            r_list: vec![5.0],
            grid: Grid { nr: 12, ntheta: 8 },
            output_dir: dir.to_path_buf(),
            tol: Some(1e-6),
            max_iters: None,
        }
    }

    #[test]
    fn spec_parses_from_toml() {
        let text = r#"
            d_list = [-1, -2]
            sign_list = ["plus"]
            delta_list = [0.0, 0.1]
            R_list = [10.0]
            output_dir = "out"
            [grid]
            Nr = 32
            Ntheta = 16
        "#;
        let s: SweepSpec = toml::from_str(text).unwrap();
        assert_eq!(s.d_list, vec![-1, -2]);
        assert_eq!(s.grid, Grid { nr: 32, ntheta: 16 });
        s.validate().unwrap();
        assert!(toml::from_str::<SweepSpec>(&format!("{text}\nbogus = 1")).is_err());
    }

    #[test]
    fn small_sweep_is_complete_and_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let s = spec(dir.path());
        let rows = run_sweep(&s).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.ok()), "{rows:?}");
        let first = std::fs::read(dir.path().join("aggregate.csv")).unwrap();
        run_sweep(&s).unwrap();
        assert_eq!(first, std::fs::read(dir.path().join("aggregate.csv")).unwrap());
        let (_, header, table) = crate::io::parse_table(std::str::from_utf8(&first).unwrap()).unwrap();
        assert_eq!(header, AGGREGATE_COLUMNS);
        assert!(table.iter().all(|r| r[6] == "-1"));
    }

    #[test]
    fn rejects_bad_specs() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = spec(dir.path());
        s.delta_list = vec![0.1, 0.05];
        assert!(run_sweep(&s).is_err());
        s.delta_list = vec![];
        assert!(run_sweep(&s).is_err());
    }
}
