//! Command-line front end. The verb functions return the exact text the
//! service sends back, so both front ends stay byte-identical.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    analyze, cell_primitives, extract_dispersion, AnalysisOptions, DEFAULT_DEGENERACY_TOL, DEFAULT_ZERO_THRESHOLD,
};
use crate::error::Error;
use crate::lattice::{gap_capacitance, solve_modes, LatticeModel};
use crate::optomech::{occupation_csv, occupation_curve, CoolingRequest};
use crate::pca::{driven_response, field_map, spectrum_csv, transmission_spectrum, Band, PcaGrid, ResponseSystem};
use crate::tuning::{find_avoided_crossings, sweep, sweep_csv, SweepSidecar, TuningSpec, DEFAULT_CROSSING_TOL};

#[derive(Debug, Parser)]
#[command(name = "rlattice", version, about = "Re-entrant post lattice simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice JSON → mode classification report JSON.
    Modes {
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        /// Zero threshold for sign patterns, relative to the largest component.
        #[arg(long, default_value_t = DEFAULT_ZERO_THRESHOLD)]
        eta: f64,
        /// Relative frequency tolerance for degeneracy groups.
        #[arg(long = "rel-tol", default_value_t = DEFAULT_DEGENERACY_TOL)]
        rel_tol: f64,
        /// JSON map of post id → group name; adds participation fractions.
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Cyclic post order for ring descriptors, comma separated ids.
        #[arg(long = "ring-order", value_delimiter = ',')]
        ring_order: Option<Vec<u32>>,
    },
    /// Lattice + tuning spec → sweep CSV and a JSON sidecar next to it.
    Sweep {
        lattice: PathBuf,
        spec: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
        /// Override the step count of the spec.
        #[arg(long)]
        steps: Option<usize>,
        /// Relative splitting below which a crossing counts as true.
        #[arg(long = "rel-tol", default_value_t = DEFAULT_CROSSING_TOL)]
        rel_tol: f64,
    },
    /// Chain lattice → polarization branch CSV.
    Dispersion {
        input: PathBuf,
        /// Posts per unit cell, in id order.
        #[arg(long = "cell-size")]
        cell_size: usize,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = DEFAULT_ZERO_THRESHOLD)]
        eta: f64,
    },
    /// Cooling request JSON → occupation CSV.
    Cool {
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Grid JSON → spectrum CSV, plus the field map JSON next to it.
    Pca {
        input: PathBuf,
        /// `lo:hi:count` in Hz.
        #[arg(long, default_value = "2e9:4e9:201")]
        band: Band,
        /// Field map frequency in Hz; bare post resonance when omitted.
        #[arg(long = "field-hz")]
        field_hz: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// JSON service for scripts and the designer UI.
    Serve {
        #[arg(long, env = "RLATTICE_PORT", default_value_t = 8080)]
        port: u16,
    },
}

pub fn modes_report(lattice_json: &str, opts: &AnalysisOptions) -> Result<String, Error> {
    let model = parse_lattice(lattice_json)?;
    Ok(analyze(&model, opts)?.to_json())
}

/// Sweep CSV and pretty sidecar JSON.
pub fn sweep_outputs(
    lattice_json: &str,
    spec_json: &str,
    steps: Option<usize>,
    rel_tol: f64,
) -> Result<(String, String), Error> {
    let model = parse_lattice(lattice_json)?;
    let mut spec: TuningSpec = serde_json::from_str(spec_json)?;
    if let Some(s) = steps {
        spec.steps = s;
    }
    let result = sweep(&model, &spec)?;
    let sidecar = SweepSidecar::new(&spec, &result, find_avoided_crossings(&result, rel_tol));
    Ok((sweep_csv(&result), serde_json::to_string_pretty(&sidecar).expect("sidecar serializes")))
}

/// `branch,k,f_hz,speed_hz_cells`, one row per branch point.
pub fn dispersion_csv(lattice_json: &str, cell_size: usize, eta: f64) -> Result<String, Error> {
    let model = parse_lattice(lattice_json)?;
    let primitives: Vec<_> = cell_primitives(&model, cell_size, eta)?.into_iter().map(|(p, _)| p).collect();
    let curves = extract_dispersion(&solve_modes(&model)?, cell_size, &primitives)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["branch", "k", "f_hz", "speed_hz_cells"]).expect("in-memory write");
    for c in &curves {
        let speed = c.speed.map(|v| v.to_string()).unwrap_or_default();
        for p in &c.points {
            w.write_record([c.branch.to_string(), p.k.to_string(), p.f_hz.to_string(), speed.clone()])
                .expect("in-memory write");
        }
    }
    Ok(String::from_utf8(w.into_inner().expect("flush")).expect("csv is utf-8"))
}

pub fn cool_csv(request_json: &str) -> Result<String, Error> {
    let req: CoolingRequest = serde_json::from_str(request_json)?;
    let curve = occupation_curve(&req)?;
    Ok(occupation_csv(&req, &curve))
}

fn parse_grid(grid_json: &str) -> Result<PcaGrid, Error> {
    let g = PcaGrid::from_json(grid_json)?;
    g.validate()?;
    Ok(g)
}

pub fn pca_spectrum_csv(grid_json: &str, band: &Band) -> Result<String, Error> {
    let g = parse_grid(grid_json)?;
    g.require_transmission_ports()?;
    let sys = ResponseSystem::from_grid(&g)?;
    Ok(spectrum_csv(&transmission_spectrum(&sys, band, &g.drive_settings())?))
}

/// Resonance of an isolated post of the grid template, in Hz.
pub fn bare_post_frequency(g: &PcaGrid) -> Result<f64, Error> {
    let c = gap_capacitance(&g.post.at(0, 0.0, 0.0))?;
    Ok(1.0 / (2.0 * PI * (g.coupling().base_inductance * c).sqrt()))
}

pub fn pca_field_json(grid_json: &str, f_hz: Option<f64>) -> Result<String, Error> {
    let g = parse_grid(grid_json)?;
    let f = match f_hz {
        Some(f) => f,
        None => bare_post_frequency(&g)?,
    };
    let sys = ResponseSystem::from_grid(&g)?;
    let drive = g.drive_settings().at(2.0 * PI * f, sys.source_count())?;
    let r = driven_response(&sys, &drive)?;
    Ok(serde_json::to_string(&field_map(&g, &sys, &r)).expect("field serializes"))
}

fn parse_lattice(text: &str) -> Result<LatticeModel, Error> {
    let m = LatticeModel::from_json(text)?;
    m.validate()?;
    Ok(m)
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(format!("cannot read {}: {e}", path.display())))
}

/// Path of the JSON written next to a CSV output.
pub fn companion_path(output: &Path) -> PathBuf {
    let p = output.with_extension("json");
    if p == output {
        output.with_extension("sidecar.json")
    } else {
        p
    }
}

fn check_writable(path: &Path, force: bool) -> Result<(), Error> {
    if path.exists() && !force {
        return Err(Error::io(format!("{} exists; pass --force to overwrite", path.display())));
    }
    Ok(())
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::io(format!("cannot write {}: {e}", path.display())))
}

/// Writes `main` to `-o` (or stdout) and `companion` next to it when an
/// output path is given.
fn emit(out: &OutputArgs, main: &str, companion: Option<&str>) -> Result<(), Error> {
    let Some(path) = &out.output else {
        print!("{main}");
        if !main.ends_with('\n') {
            println!();
        }
        return Ok(());
    };
    check_writable(path, out.force)?;
    let side = companion.map(|c| (companion_path(path), c));
    if let Some((p, _)) = &side {
        check_writable(p, out.force)?;
    }
    write(path, main)?;
    if let Some((p, c)) = side {
        write(&p, c)?;
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Modes { input, out, eta, rel_tol, partition, ring_order } => {
            let partition = match partition {
                Some(p) => Some(serde_json::from_str::<BTreeMap<u32, String>>(&read(&p)?)?),
                None => None,
            };
            let opts = AnalysisOptions { eta, rel_tol, ring_order, partition };
            emit(&out, &modes_report(&read(&input)?, &opts)?, None)
        }
        Command::Sweep { lattice, spec, out, steps, rel_tol } => {
            let (csv, sidecar) = sweep_outputs(&read(&lattice)?, &read(&spec)?, steps, rel_tol)?;
            emit(&out, &csv, Some(&sidecar))
        }
        Command::Dispersion { input, cell_size, out, eta } => emit(&out, &dispersion_csv(&read(&input)?, cell_size, eta)?, None),
        Command::Cool { input, out } => emit(&out, &cool_csv(&read(&input)?)?, None),
        Command::Pca { input, band, field_hz, out } => {
            let text = read(&input)?;
            let csv = pca_spectrum_csv(&text, &band)?;
            let field = pca_field_json(&text, field_hz)?;
            emit(&out, &csv, Some(&field))
        }
        Command::Serve { port } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| Error::io(format!("cannot start runtime: {e}")))?;
            rt.block_on(crate::service::serve(port))
        }
    }
}

/// Parses `args`, runs the verb and returns the process exit status.
/// Failures print the error JSON on stderr; usage errors count as schema
/// errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let err = Error::schema(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return err.kind.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.kind.exit_code()
        }
    }
}
