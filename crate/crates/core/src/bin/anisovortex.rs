use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anisovortex::analysis::{circle_diagnostics, degree_at_infinity, delta0, delta_star_bruteforce, nonradiality, DEFAULT_FRACTIONS};
use anisovortex::boundary::{boundary_field, minimize_circle};
use anisovortex::construction::{comparison_energy_curve, construct_comparison, ComparisonMapSpec, CurveResolution};
use anisovortex::io::{self, read_field, table_csv, write_atomic, write_field, write_json};
use anisovortex::pohozaev::pohozaev;
use anisovortex::radial::solve_radial_profile;
use anisovortex::solver::{minimize_2d, SolveConfig};
use anisovortex::sweep::{run_sweep, RunSummary, SweepSpec};
use anisovortex::symmetry::{winding_number, DEFAULT_MIN_MODULUS};
use anisovortex::{field::uniform_radii, Error, Sign, Vec2};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(name = "anisovortex", version, about = "Equivariant anisotropic Ginzburg-Landau vortices")]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0, env = "ANISOVORTEX_THREADS")]
    threads: usize,
    /// Recorded in summaries; every computation here is deterministic.
    #[arg(long, global = true, default_value_t = 0, env = "ANISOVORTEX_SEED")]
    seed: u64,
    /// Overrides the solver tolerance of the subcommand.
    #[arg(long, global = true, env = "ANISOVORTEX_TOL")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the circle energy and write the boundary phase.
    Boundary {
        #[arg(short, allow_hyphen_values = true, env = "ANISOVORTEX_D")]
        d: i64,
        #[arg(long, default_value = "plus", env = "ANISOVORTEX_SIGN")]
        sign: Sign,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, env = "ANISOVORTEX_DELTA")]
        delta: f64,
        /// Samples on the circle; defaults to 64·(1-d).
        #[arg(short = 'M', long = "samples", env = "ANISOVORTEX_SAMPLES")]
        m: Option<usize>,
        #[arg(long, default_value = "phase.csv", env = "ANISOVORTEX_OUT")]
        out: PathBuf,
    },
    /// Solve the isotropic radial profile and write it.
    Radial {
        #[arg(short, allow_hyphen_values = true, env = "ANISOVORTEX_D")]
        d: i64,
        #[arg(long, default_value_t = 40.0, env = "ANISOVORTEX_R_MAX")]
        r_max: f64,
        #[arg(short = 'N', long = "intervals", default_value_t = 4096, env = "ANISOVORTEX_INTERVALS")]
        n: usize,
        #[arg(long, default_value = "profile.csv", env = "ANISOVORTEX_OUT")]
        out: PathBuf,
    },
    /// Run the 2D minimizer from a TOML config.
    Solve {
        config: PathBuf,
    },
    /// Evaluate both Pohozaev identities on a disk.
    Pohozaev {
        field: PathBuf,
        /// Defaults to the delta recorded in the field file.
        #[arg(long, allow_hyphen_values = true, env = "ANISOVORTEX_DELTA")]
        delta: Option<f64>,
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.0], allow_hyphen_values = true, env = "ANISOVORTEX_CENTER")]
        center: Vec<f64>,
        /// Defaults to R/2.
        #[arg(long, env = "ANISOVORTEX_RADIUS")]
        radius: Option<f64>,
        #[arg(long, default_value_t = 256, env = "ANISOVORTEX_QUADRATURE")]
        quadrature: usize,
    },
    /// Build a comparison map on D_{1/2}, or the energy curve over epsilons.
    Construct {
        #[arg(short, allow_hyphen_values = true, env = "ANISOVORTEX_D")]
        d: i64,
        #[arg(short = 'N', long = "rings", default_value_t = 0, env = "ANISOVORTEX_RINGS")]
        n: usize,
        #[arg(long, default_value_t = 0.01, env = "ANISOVORTEX_EPSILON")]
        epsilon: f64,
        #[arg(long, default_value_t = 256, env = "ANISOVORTEX_NR")]
        nr: usize,
        #[arg(long, default_value_t = 128, env = "ANISOVORTEX_NTHETA")]
        ntheta: usize,
        /// Decreasing epsilons; prints the energy curve instead of writing a field.
        #[arg(long, value_delimiter = ',', env = "ANISOVORTEX_CURVE")]
        curve: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, env = "ANISOVORTEX_DELTA")]
        delta: f64,
        #[arg(long, default_value = "comparison.csv", env = "ANISOVORTEX_OUT")]
        out: PathBuf,
    },
    /// Tabulate the degree thresholds for d = from, from-1, ..., to.
    Delta0 {
        #[arg(long, default_value_t = -1, allow_hyphen_values = true, env = "ANISOVORTEX_FROM")]
        from: i64,
        #[arg(long, default_value_t = -6, allow_hyphen_values = true, env = "ANISOVORTEX_TO")]
        to: i64,
        #[arg(long, env = "ANISOVORTEX_OUT")]
        out: Option<PathBuf>,
    },
    /// Run a (d, sign, delta, R) sweep from a TOML spec.
    Sweep {
        spec: PathBuf,
    },
    /// Circle diagnostics, degree at infinity and nonradiality of a field.
    Diagnostics {
        field: PathBuf,
        #[arg(long, allow_hyphen_values = true, env = "ANISOVORTEX_DELTA")]
        delta: Option<f64>,
        /// Probe radii; defaults to 8 evenly spaced up to R.
        #[arg(long, value_delimiter = ',', env = "ANISOVORTEX_RADII")]
        radii: Vec<f64>,
        #[arg(long, env = "ANISOVORTEX_OUT")]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Error(Error),
    NotConverged,
    Partial(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn boundary(cli: &Cli, d: i64, sign: Sign, delta: f64, m: Option<usize>, out: &Path) -> Outcome {
    if d > -1 {
        return Err(Error::Invalid(format!("d must be <= -1, got {d}")).into());
    }
    let m = m.unwrap_or(64 * (1 - d) as usize);
    let sol = minimize_circle(d, sign, delta, m, cli.tol.unwrap_or(1e-10))?;
    write_atomic(out, &io::phase_csv(&sol.phase, delta, sol.c())?)?;
    let pi_d2 = std::f64::consts::PI * (d * d) as f64;
    print_json(&json!({
        "d": d, "sign": sign, "delta": delta, "M": m,
        "C": sol.c(), "pi_d2": pi_d2, "margin": pi_d2 - sol.c(),
        "el_residual": sol.energy.el_residual, "iterations": sol.iterations,
        "starts": sol.starts, "disagreement": sol.disagreement,
        "winding": winding_number(&boundary_field(&sol.phase), DEFAULT_MIN_MODULUS)?,
        "phase_file": out, "seed": cli.seed,
    }));
    Ok(())
}

fn radial(cli: &Cli, d: i64, r_max: f64, n: usize, out: &Path) -> Outcome {
    let p = solve_radial_profile(d, r_max, n, cli.tol.unwrap_or(1e-10))?;
    write_atomic(out, &io::profile_csv(&p)?)?;
    print_json(&json!({
        "d": d, "R_max": r_max, "N": n, "eta_at_1": p.eval(1.0)?,
        "residual": p.residual, "far_field_gap": p.far_field_gap(), "profile_file": out,
    }));
    Ok(())
}

const OUTPUT_KEYS: [&str; 2] = ["field_out", "summary_out"];

fn solve(cli: &Cli, path: &Path) -> Outcome {
    let text = std::fs::read_to_string(path).map_err(Error::from)?;
    let mut table: toml::Table = toml::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut outputs = OUTPUT_KEYS.map(|k| table.remove(k).and_then(|v| v.as_str().map(PathBuf::from)));
    let base = path.parent().unwrap_or(Path::new("."));
    let summary_out = outputs[1].take().unwrap_or_else(|| base.join("summary.json"));
    let field_out = outputs[0].take().unwrap_or_else(|| base.join("field.csv"));
    let mut config: SolveConfig = table.try_into().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    if let Some(t) = cli.tol {
        config.tol = t;
    }
    let start = Instant::now();
    let res = minimize_2d(&config)?;
    let summary = RunSummary::new(&config, &res, start.elapsed().as_secs_f64())?;
    write_field(&field_out, &res.field, config.d, config.sign, config.delta)?;
    write_json(&summary_out, &summary)?;
    print_json(&serde_json::to_value(&summary).expect("json"));
    if res.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn poho(field: &Path, delta: Option<f64>, center: &[f64], radius: Option<f64>, q: usize) -> Outcome {
    let (u, meta) = read_field(field)?;
    let delta = delta.unwrap_or(meta.delta);
    let radius = radius.unwrap_or(0.5 * u.outer_radius());
    let rep = pohozaev(&u, delta, Vec2::new(center[0], center[1]), radius, q)?;
    print_json(&serde_json::to_value(&rep).expect("json"));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn construct(d: i64, n: usize, epsilon: f64, nr: usize, ntheta: usize, curve: &[f64], delta: f64, out: &Path) -> Outcome {
    if !curve.is_empty() {
        let c = comparison_energy_curve(d, n, curve, delta, &CurveResolution::default())?;
        print_json(&serde_json::to_value(&c).expect("json"));
        return Ok(());
    }
    let spec = ComparisonMapSpec::new(d, n, epsilon);
    let u = construct_comparison(&spec, uniform_radii(0.5, nr), ntheta)?;
    write_field(out, &u, d, Sign::Plus, delta)?;
    print_json(&json!({
        "d": d, "N": n, "epsilon": epsilon, "rho": spec.rho(),
        "total_degree": spec.total_degree(),
        "winding_at_0.45": winding_number(&u.circle_trace(0.45)?, DEFAULT_MIN_MODULUS)?,
        "field_file": out,
    }));
    Ok(())
}

fn thresholds(from: i64, to: i64, out: Option<&Path>) -> Outcome {
    if from > -1 || to > from {
        return Err(Error::Invalid(format!("empty or invalid d range {from}..{to}")).into());
    }
    let mut rows = Vec::new();
    for d in (to..=from).rev() {
        let rec = delta0(d)?;
        let (bf, x) = delta_star_bruteforce(d, 50)?;
        println!(
            "d = {d:>3}  delta_star = {:.7}  delta0 = {:.7}  argmin_x = {}  bruteforce = {:.7}",
            rec.delta_star, rec.delta0, rec.argmin_x, bf
        );
        assert_eq!(x, rec.argmin_x);
        rows.push(vec![
            d.to_string(),
            rec.delta_star.to_string(),
            rec.delta0.to_string(),
            rec.argmin_x.to_string(),
            bf.to_string(),
        ]);
    }
    if let Some(out) = out {
        let bytes = table_csv(
            &format!("from={from},to={to}"),
            &["d", "delta_star", "delta0", "argmin_x", "delta_star_bruteforce"],
            rows,
        )?;
        write_atomic(out, &bytes)?;
    }
    Ok(())
}

fn sweep(path: &Path) -> Outcome {
    let spec: SweepSpec = io::read_toml(path)?;
    let rows = run_sweep(&spec)?;
    let failed = rows.iter().filter(|r| !r.ok()).count();
    for r in &rows {
        println!("d = {} {} R = {} delta = {}: {}", r.d, r.sign, r.radius, r.delta, r.status);
    }
    println!("aggregate: {}", spec.output_dir.join("aggregate.csv").display());
    if failed > 0 {
        Err(Failure::Partial(failed))
    } else {
        Ok(())
    }
}

fn diagnostics(field: &Path, delta: Option<f64>, radii: &[f64], out: Option<&Path>) -> Outcome {
    let (u, meta) = read_field(field)?;
    let delta = delta.unwrap_or(meta.delta);
    let outer = u.outer_radius();
    let radii: Vec<f64> = if radii.is_empty() {
        (1..=8).map(|k| outer * k as f64 / 8.0).collect()
    } else {
        radii.to_vec()
    };
    let diag = circle_diagnostics(&u, delta, &radii)?;
    if let Some(out) = out {
        let rows = diag
            .iter()
            .map(|c| {
                vec![
                    c.r.to_string(),
                    c.f.to_string(),
                    c.g.to_string(),
                    c.sigma.to_string(),
                    c.winding.map(|w| w.to_string()).unwrap_or_default(),
                ]
            })
            .collect();
        write_atomic(out, &table_csv(&format!("delta={delta}"), &["r", "f", "g", "sigma", "winding"], rows)?)?;
    }
    let dinf = degree_at_infinity(&u, &DEFAULT_FRACTIONS);
    print_json(&json!({
        "circles": diag,
        "degree_at_infinity": dinf.as_ref().ok(),
        "degree_error": dinf.as_ref().err().map(|e| e.to_string()),
        "nonradiality_r1": if outer >= 1.0 { Some(nonradiality(&u, 1.0)?) } else { None },
    }));
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Boundary { d, sign, delta, m, out } => boundary(cli, *d, *sign, *delta, *m, out),
        Command::Radial { d, r_max, n, out } => radial(cli, *d, *r_max, *n, out),
        Command::Solve { config } => solve(cli, config),
        Command::Pohozaev {
            field,
            delta,
            center,
            radius,
            quadrature,
        } => poho(field, *delta, center, *radius, *quadrature),
        Command::Construct {
            d,
            n,
            epsilon,
            nr,
            ntheta,
            curve,
            delta,
            out,
        } => construct(*d, *n, *epsilon, *nr, *ntheta, curve, *delta, out),
        Command::Delta0 { from, to, out } => thresholds(*from, *to, out.as_deref()),
        Command::Sweep { spec } => sweep(spec),
        Command::Diagnostics { field, delta, radii, out } => diagnostics(field, *delta, radii, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_solver_failure() { 2 } else { 1 })
        }
        Err(Failure::NotConverged) => {
            eprintln!("error: solver did not reach the tolerance");
            ExitCode::from(2)
        }
        Err(Failure::Partial(n)) => {
            eprintln!("error: {n} sweep rows failed");
            ExitCode::from(3)
        }
    }
}
