//! `moebius`: batch front end for the Möbius-strip geometry, classical
//! spinning-body dynamics and ring spectra.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use moebius_core::classical::{evolve, FrameState, FreeMotion, PhaseState, SpinningBody};
use moebius_core::format::{json_number, json_numbers, to_json_text, CsvTable};
use moebius_core::geometry::{emit_mesh, MoebiusShape};
use moebius_core::quantum::{
    coulomb_closed_form, coulomb_levels_integer_n, coulomb_radial_solve, flux_spectrum_analytic,
    free_spectrum_analytic, ring_eigensolve, CoulombProblem, RingHamiltonian, Spectrum, Vectors,
};
use moebius_core::validation::{render_table, run_all};

const OUT_DIR_ENV: &str = "MOEBIUS_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "moebius",
    version,
    about = "Möbius-strip geometry, spinning-body dynamics and ring spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the strip mesh (positions and unit normals)
    Geometry(GeometryArgs),
    /// Integrate the spinning body around the meridian
    Classical(ClassicalArgs),
    /// Free ring spectrum, closed form or on a grid
    SpectrumFree(FreeArgs),
    /// Flux-threaded ring spectrum, optionally swept over a range of A
    SpectrumFlux(FluxArgs),
    /// Radial Coulomb levels for a given k
    SpectrumCoulomb(CoulombArgs),
    /// Run every acceptance check and print a pass/fail table
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Output {
    /// Read defaults from a key=value file (explicit flags win)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output directory [default: $MOEBIUS_OUT_DIR or .]
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Output {
    fn dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err("must be a positive finite number".into())
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err("must be a non-negative finite number".into())
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err("must be finite".into())
    }
}

fn ring_grid(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n >= 16 && n.is_multiple_of(2) {
        Ok(n)
    } else {
        Err("ring grid must be even and at least 16".into())
    }
}

fn radial_grid(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n >= 200 {
        Ok(n)
    } else {
        Err("radial grid needs at least 200 points".into())
    }
}

fn count(min: usize) -> impl Fn(&str) -> Result<usize, String> + Clone {
    move |s| {
        let n: usize = s.parse().map_err(|e| format!("{e}"))?;
        if n >= min {
            Ok(n)
        } else {
            Err(format!("must be at least {min}"))
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true, args_override_self = true)]
struct GeometryArgs {
    #[command(flatten)]
    output: Output,
    /// Centerline radius R
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    radius: f64,
    /// Strip half-width w (must be below R)
    #[arg(long, default_value_t = MoebiusShape::DEFAULT_HALF_WIDTH, value_parser = positive)]
    half_width: f64,
    /// Samples along u in [0, 2π)
    #[arg(long, default_value_t = 128, value_parser = count(3))]
    nu: usize,
    /// Samples across v in [-w, w]
    #[arg(long, default_value_t = 9, value_parser = count(2))]
    nv: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true, args_override_self = true)]
struct ClassicalArgs {
    #[command(flatten)]
    output: Output,
    /// Rest mass m₀
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    mass: f64,
    /// Body size ρ
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    rho: f64,
    /// Spin length s
    #[arg(long, default_value_t = 0.5, value_parser = non_negative)]
    spin: f64,
    /// Orbit radius r
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    radius: f64,
    /// Initial meridian angle
    #[arg(long, default_value_t = 0.0, value_parser = finite)]
    theta0: f64,
    /// Initial angular momentum p_θ
    #[arg(long, default_value_t = 1.0, value_parser = finite)]
    p_theta: f64,
    /// Pendulum strength g in V(θ) = g(1 − cos θ); 0 is free motion
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    gravity: f64,
    #[arg(long, default_value_t = 1e-3, value_parser = positive)]
    dtau: f64,
    #[arg(long, default_value_t = 10_000, value_parser = count(1))]
    steps: usize,
}

#[derive(Debug, Args)]
struct RingArgs {
    /// Effective mass m₀′
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    mass: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    hbar: f64,
    /// Also write grid eigenvectors as CSV
    #[arg(long)]
    vectors: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true, args_override_self = true)]
struct FreeArgs {
    #[command(flatten)]
    output: Output,
    #[command(flatten)]
    ring: RingArgs,
    /// Highest |n| in the closed form; the grid solve returns 2·max_n + 1 levels
    #[arg(long, default_value_t = 5)]
    max_n: usize,
    /// Solve on a grid of this many points instead of using the closed form
    #[arg(long, value_parser = ring_grid)]
    grid: Option<usize>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true, args_override_self = true)]
struct FluxArgs {
    #[command(flatten)]
    output: Output,
    #[command(flatten)]
    ring: RingArgs,
    /// Single flux value A (ignored when a sweep is given)
    #[arg(long, default_value_t = 0.0, value_parser = finite)]
    flux: f64,
    /// Sweep start
    #[arg(long, value_parser = finite, requires = "flux_to")]
    flux_from: Option<f64>,
    /// Sweep end (inclusive)
    #[arg(long, value_parser = finite, requires = "flux_from")]
    flux_to: Option<f64>,
    /// Number of sweep points
    #[arg(long, default_value_t = 11, value_parser = count(2))]
    flux_steps: usize,
    #[arg(long, default_value_t = 2048, value_parser = ring_grid)]
    grid: usize,
    #[arg(long, default_value_t = 10, value_parser = count(1))]
    levels: usize,
}

impl FluxArgs {
    fn values(&self) -> Vec<f64> {
        match (self.flux_from, self.flux_to) {
            (Some(a), Some(b)) => {
                let n = self.flux_steps - 1;
                (0..=n)
                    .map(|i| {
                        if i == n {
                            b
                        } else {
                            a + (b - a) * i as f64 / n as f64
                        }
                    })
                    .collect()
            }
            _ => vec![self.flux],
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true, args_override_self = true)]
struct CoulombArgs {
    #[command(flatten)]
    output: Output,
    /// Half-integer angular quantum number k
    #[arg(long, default_value_t = 0)]
    k: i64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    mass: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    hbar: f64,
    /// Coupling e²
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    e2: f64,
    #[arg(long, default_value_t = 200.0, value_parser = positive)]
    r_max: f64,
    #[arg(long, default_value_t = 4000, value_parser = radial_grid)]
    grid: usize,
    #[arg(long, default_value_t = 3, value_parser = count(1))]
    levels: usize,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn write(dir: &Path, name: &str, contents: &str) -> AnyResult<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn warn(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn geometry(a: &GeometryArgs) -> AnyResult<()> {
    let shape = MoebiusShape::new(a.radius, a.half_width)?;
    let mesh = emit_mesh(&shape, a.nu, a.nv)?;
    let dir = a.output.dir();
    match a.output.format_or(Format::Csv) {
        Format::Csv => write(&dir, "mesh.csv", &mesh.to_csv()),
        Format::Json => write(&dir, "mesh.json", &mesh.to_json()?),
    }
}

fn classical(a: &ClassicalArgs) -> AnyResult<()> {
    let body = SpinningBody::new(a.mass, a.rho, a.spin, a.radius)?;
    let g = a.gravity;
    let init = PhaseState::on_meridian(
        &body,
        a.theta0,
        a.p_theta,
        FrameState::surface_adapted(a.theta0),
        |x: &moebius_core::geometry::Vec3| g * (1.0 - x.y / x.norm()),
    );
    let traj = if g == 0.0 {
        evolve(&init, &body, &FreeMotion, a.dtau, a.steps)?
    } else {
        evolve(
            &init,
            &body,
            &|th: f64| g * (1.0 - th.cos()),
            a.dtau,
            a.steps,
        )?
    };
    let dir = a.output.dir();
    write(&dir, "trajectory.csv", &traj.to_csv())?;
    write(&dir, "residuals.json", &traj.residual_log_json()?)
}

fn spectrum_csv(s: &Spectrum) -> String {
    let mut t = CsvTable::new(&["level", "energy"]);
    for (i, e) in s.eigenvalues.iter().enumerate() {
        t.push_row(&[i as f64, *e]);
    }
    t.into_string()
}

fn emit_spectrum(out: &Output, stem: &str, s: &Spectrum, params: Value) -> AnyResult<()> {
    let dir = out.dir();
    match out.format_or(Format::Json) {
        Format::Json => write(&dir, &format!("{stem}.json"), &s.to_json(params)?)?,
        Format::Csv => write(&dir, &format!("{stem}.csv"), &spectrum_csv(s))?,
    }
    if let Some(csv) = s.eigenvector_csv() {
        write(&dir, &format!("{stem}_vectors.csv"), &csv)?;
    }
    Ok(())
}

fn ring_params(ring: &RingArgs) -> AnyResult<Map<String, Value>> {
    let mut p = Map::new();
    p.insert("mass".into(), json_number(ring.mass)?);
    p.insert("hbar".into(), json_number(ring.hbar)?);
    Ok(p)
}

fn keep(ring: &RingArgs) -> Vectors {
    if ring.vectors {
        Vectors::Keep
    } else {
        Vectors::Skip
    }
}

fn spectrum_free(a: &FreeArgs) -> AnyResult<()> {
    let mut params = ring_params(&a.ring)?;
    params.insert("max_n".into(), Value::from(a.max_n));
    let spectrum = match a.grid {
        None => free_spectrum_analytic(a.ring.mass, a.ring.hbar, a.max_n),
        Some(n) => {
            params.insert("grid_n".into(), Value::from(n));
            let h = RingHamiltonian::free(a.ring.mass, a.ring.hbar, n)?;
            ring_eigensolve(&h, 2 * a.max_n + 1, keep(&a.ring))?
        }
    };
    warn(&spectrum.warnings);
    emit_spectrum(&a.output, "spectrum_free", &spectrum, Value::Object(params))
}

fn spectrum_flux(a: &FluxArgs) -> AnyResult<()> {
    let values = a.values();
    let results: Vec<moebius_core::Result<Spectrum>> = values
        .par_iter()
        .map(|&flux| {
            let h = RingHamiltonian::free(a.ring.mass, a.ring.hbar, a.grid)?.with_flux(flux)?;
            let s = ring_eigensolve(&h, a.levels, keep(&a.ring));
            eprintln!("flux A = {flux} done");
            s
        })
        .collect();
    let spectra = results
        .into_iter()
        .collect::<moebius_core::Result<Vec<_>>>()?;
    let dir = a.output.dir();

    if values.len() == 1 {
        let s = &spectra[0];
        warn(&s.warnings);
        let analytic = flux_spectrum_analytic(a.ring.mass, a.ring.hbar, values[0], a.levels + 2);
        let mut params = ring_params(&a.ring)?;
        params.insert("flux".into(), json_number(values[0])?);
        params.insert("grid_n".into(), Value::from(a.grid));
        let mut doc = s.to_json_value(Value::Object(params))?;
        let take = |v: Vec<f64>| v.into_iter().take(a.levels).collect::<Vec<_>>();
        doc["minimal_coupling"] = json_numbers(&take(analytic.minimal_energies()))?;
        doc["quarter_period_formula"] = json_numbers(&take(analytic.quarter_energies()))?;
        match a.output.format_or(Format::Json) {
            Format::Json => write(&dir, "spectrum_flux.json", &to_json_text(&doc)?)?,
            Format::Csv => write(&dir, "spectrum_flux.csv", &spectrum_csv(s))?,
        }
        if let Some(csv) = s.eigenvector_csv() {
            write(&dir, "spectrum_flux_vectors.csv", &csv)?;
        }
        return Ok(());
    }

    for s in &spectra {
        warn(&s.warnings);
    }
    match a.output.format_or(Format::Csv) {
        Format::Csv => {
            let mut header = vec!["A".to_owned()];
            header.extend((0..a.levels).map(|i| format!("E_{i}")));
            let mut t = CsvTable::new(&header);
            for (flux, s) in values.iter().zip(&spectra) {
                let mut row = vec![*flux];
                row.extend(&s.eigenvalues);
                t.push_row(&row);
            }
            write(&dir, "flux_sweep.csv", &t.into_string())
        }
        Format::Json => {
            let mut items = Vec::with_capacity(spectra.len());
            for (flux, s) in values.iter().zip(&spectra) {
                let mut params = ring_params(&a.ring)?;
                params.insert("flux".into(), json_number(*flux)?);
                params.insert("grid_n".into(), Value::from(a.grid));
                items.push(s.to_json_value(Value::Object(params))?);
            }
            write(
                &dir,
                "flux_sweep.json",
                &to_json_text(&Value::Array(items))?,
            )
        }
    }
}

fn spectrum_coulomb(a: &CoulombArgs) -> AnyResult<()> {
    let problem = CoulombProblem {
        k: a.k,
        m_eff: a.mass,
        hbar: a.hbar,
        charge_e2: a.e2,
        r_max: a.r_max,
        grid_n: a.grid,
        n_levels: a.levels,
    };
    let sol = coulomb_radial_solve(&problem)?;
    warn(&sol.warnings);
    let closed: Vec<f64> = (0..sol.energies.len())
        .map(|n_r| coulomb_closed_form(&problem, n_r))
        .collect();
    // α c = e²/ℏ in these units
    let alpha_c = a.e2 / a.hbar;
    let n_max = (a.levels as u64 + a.k.unsigned_abs() + 2).min(u32::MAX as u64) as u32;
    let integer_n: Vec<_> = coulomb_levels_integer_n(a.mass, alpha_c, 1.0, n_max, a.k)
        .into_iter()
        .filter(|l| l.allowed)
        .take(sol.energies.len())
        .collect();

    let dir = a.output.dir();
    match a.output.format_or(Format::Json) {
        Format::Json => {
            let mut levels = Vec::new();
            for l in &integer_n {
                levels.push(json!({
                    "n": l.n,
                    "energy": json_number(l.energy)?,
                }));
            }
            let deviation: Vec<f64> = sol
                .energies
                .iter()
                .zip(&integer_n)
                .map(|(e, l)| e - l.energy)
                .collect();
            let doc = json!({
                "params": {
                    "k": a.k,
                    "mass": json_number(a.mass)?,
                    "hbar": json_number(a.hbar)?,
                    "e2": json_number(a.e2)?,
                    "r_max": json_number(a.r_max)?,
                },
                "eigenvalues": json_numbers(&sol.energies)?,
                "closed_form": json_numbers(&closed)?,
                "integer_n_levels": levels,
                "signed_deviation": json_numbers(&deviation)?,
                "tail_amplitude": json_number(sol.tail_amplitude)?,
                "grid_n": a.grid,
            });
            write(&dir, "spectrum_coulomb.json", &to_json_text(&doc)?)
        }
        Format::Csv => {
            let mut t = CsvTable::new(&[
                "level",
                "energy",
                "closed_form",
                "integer_n",
                "integer_n_energy",
            ]);
            for (i, ((e, c), l)) in sol.energies.iter().zip(&closed).zip(&integer_n).enumerate() {
                t.push_row(&[i as f64, *e, *c, l.n as f64, l.energy]);
            }
            write(&dir, "spectrum_coulomb.csv", &t.into_string())
        }
    }
}

fn validate() -> AnyResult<bool> {
    let reports = run_all();
    print!("{}", render_table(&reports));
    Ok(reports.iter().all(|r| r.ok()))
}

fn run(cli: Cli) -> AnyResult<bool> {
    match &cli.command {
        Command::Geometry(a) => geometry(a).map(|_| true),
        Command::Classical(a) => classical(a).map(|_| true),
        Command::SpectrumFree(a) => spectrum_free(a).map(|_| true),
        Command::SpectrumFlux(a) => spectrum_flux(a).map(|_| true),
        Command::SpectrumCoulomb(a) => spectrum_coulomb(a).map(|_| true),
        Command::Validate => validate(),
    }
}

fn main() -> ExitCode {
    let argv = match config::splice(std::env::args().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
