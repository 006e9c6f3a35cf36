use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use gravlink::cvhomodyne::{curvature_invariance_report, HomodynePrep, InvarianceScenario};
use gravlink::entangleswap::{self, Detector, MemoryDensity};
use gravlink::scenario::config::{BodyConfig, ObserverConfig, SourceConfig, RB_VAPOR, SPDC_BLUE};
use gravlink::scenario::{
    load_config, paper_table, reference_table, run_scenario, sweep, sweep_table, table_passes, Cell, Column,
    OutputFormat, SweepParameter, Table, DEFAULT_PRECISION,
};
use gravlink::spacetime::{Body, Motion, Observer};
use gravlink::wavepacket::{overlap_gaussian_closed, overlap_quadrature, WavePacket};
use gravlink::{Error, Result};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERDICT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "gravlink", version, about = "Curvature effects on photonic quantum links around a Schwarzschild body")]
struct Cli {
    /// Output format (defaults to csv, or to the config's choice for `run`).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Significant digits for numbers.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MotionArg {
    Static,
    CircularOrbit,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum DetectorArg {
    D1,
    D2,
    Both,
}

#[derive(Args, Debug)]
struct Geometry {
    /// Body mass in kg (default: Earth).
    #[arg(long, requires = "radius_m")]
    mass_kg: Option<f64>,
    /// Body radius in m (default: Earth).
    #[arg(long, requires = "mass_kg")]
    radius_m: Option<f64>,
    /// Emitter: `surface`, `iss`, `far_field` or a radius in m.
    #[arg(long, default_value = "surface")]
    emitter: String,
    /// Receiver: `surface`, `iss`, `far_field` or a radius in m.
    #[arg(long, default_value = "iss")]
    receiver: String,
    /// Motion for a receiver given as a radius.
    #[arg(long, value_enum, default_value = "static")]
    receiver_motion: MotionArg,
}

#[derive(Args, Debug)]
struct Source {
    /// `spdc_blue` or `rb_vapor`; overridden by explicit values.
    #[arg(long, default_value = "spdc_blue")]
    source: String,
    #[arg(long)]
    peak_hz: Option<f64>,
    #[arg(long)]
    width_hz: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Redshift, shift parameter and light travel time for a link.
    Redshift(Geometry),
    /// Mode overlap of a Gaussian source across a link.
    Overlap {
        #[command(flatten)]
        geometry: Geometry,
        #[command(flatten)]
        source: Source,
        /// Also integrate the overlap numerically.
        #[arg(long)]
        quadrature: bool,
    },
    /// Six-mode Fock simulation of heralded entanglement for a mismatch q.
    Entangle {
        #[arg(long)]
        q: f64,
        #[arg(long, value_enum, default_value = "both")]
        detector: DetectorArg,
    },
    /// Bit error rate for a mismatch q, closed form and Monte Carlo.
    Qber {
        #[arg(long)]
        q: f64,
        /// Monte Carlo trials (0 to skip).
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Homodyne moments and their invariance across flat, LEO and far-field links.
    CvHomodyne {
        /// Signal displacement, `re` or `re,im`.
        #[arg(long, default_value = "1")]
        alpha: String,
        /// Oscillator displacement, `re` or `re,im`.
        #[arg(long, default_value = "100")]
        beta: String,
        #[command(flatten)]
        source: Source,
        /// Add a control row whose oscillator is detuned by this many Hz.
        #[arg(long)]
        mismatched_lo_hz: Option<f64>,
    },
    /// Run one scenario from a JSON config.
    Run { config: PathBuf },
    /// Sweep one parameter of a scenario.
    Sweep {
        config: PathBuf,
        /// width_hz, peak_hz, receiver_radius_m or q.
        #[arg(long)]
        parameter: String,
        /// Comma-separated grid values.
        #[arg(long, conflicts_with = "log", required_unless_present = "log")]
        grid: Option<String>,
        /// Log-spaced grid `start:stop:count`.
        #[arg(long)]
        log: Option<String>,
    },
    /// Compare computed headline numbers with the published ones.
    PaperTable,
}

fn bad(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}

fn parse_f64(name: &str, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| bad(name, format!("`{s}` is not a number")))
}

fn parse_complex(name: &str, s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_f64(name, re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_f64(name, re)?, parse_f64(name, im)?)),
        _ => Err(bad(name, "expected `re` or `re,im`")),
    }
}

fn parse_station(name: &str, s: &str, motion: MotionArg) -> Result<ObserverConfig> {
    Ok(match s {
        "surface" => ObserverConfig::surface(),
        "iss" => ObserverConfig::iss(),
        "far_field" => ObserverConfig::far_field(),
        other => ObserverConfig {
            radius_m: parse_f64(name, other)?,
            motion: match motion {
                MotionArg::Static => Motion::Static,
                MotionArg::CircularOrbit => Motion::CircularOrbit,
            },
        },
    })
}

impl Geometry {
    fn resolve(&self) -> Result<(Body, Observer, Observer)> {
        let body = match (self.mass_kg, self.radius_m) {
            (Some(m), Some(r)) => BodyConfig { mass_kg: m, radius_m: r },
            _ => BodyConfig::earth(),
        };
        let emitter = parse_station("emitter", &self.emitter, MotionArg::Static)?;
        let receiver = parse_station("receiver", &self.receiver, self.receiver_motion)?;
        Ok((body.to_body()?, emitter.to_observer()?, receiver.to_observer()?))
    }
}

impl Source {
    fn resolve(&self) -> Result<SourceConfig> {
        let mut s = match self.source.as_str() {
            "spdc_blue" => SPDC_BLUE,
            "rb_vapor" => RB_VAPOR,
            other => return Err(bad("source", format!("unknown preset `{other}`"))),
        };
        if let Some(p) = self.peak_hz {
            s.peak_hz = p;
        }
        if let Some(w) = self.width_hz {
            s.width_hz = w;
        }
        Ok(s)
    }
}

fn redshift_table(g: &Geometry) -> Result<Table> {
    let (body, e, r) = g.resolve()?;
    let shift = body.shift_parameter(&e, &r)?;
    let travel = if e.radius.is_finite() && r.radius.is_finite() {
        Some(body.coordinate_travel_time(e.radius, r.radius)?)
    } else {
        None
    };
    let mut t = Table::new(vec![
        Column::new("schwarzschild_radius_m", "r_s = 2GM/c^2"),
        Column::new("redshift_ratio", "Omega_B/Omega_A = sqrt(R), R = (1 - r_s/r_A)/(1 - k r_s/r_B)"),
        Column::new("chi", "chi = Omega_A/Omega_B"),
        Column::new("delta", "delta = |R^(1/4) - 1|"),
        Column::new("direction", "up: received frequency lower"),
        Column::new("travel_time_s", "t = |r_*(r_B) - r_*(r_A)|/c"),
    ]);
    t.push(vec![
        Cell::Number(body.schwarzschild_radius()),
        Cell::Number(body.redshift_total(&e, &r)?),
        Cell::Number(body.propagation_ratio(&e, &r)?),
        Cell::Number(shift.delta),
        Cell::Text(format!("{:?}", shift.direction).to_lowercase()),
        Cell::from(travel),
    ]);
    Ok(t)
}

fn overlap_table(g: &Geometry, s: &Source, quadrature: bool) -> Result<Table> {
    let (body, e, r) = g.resolve()?;
    let packet = s.resolve()?.packet()?;
    let shift = body.shift_parameter(&e, &r)?;
    let closed = overlap_gaussian_closed(&packet, &shift)?;
    let mut columns = vec![
        Column::new("delta", "delta = |R^(1/4) - 1|"),
        Column::new("Delta", "Delta = sqrt(2k/(1+k^2)) exp(-delta^2 Omega0^2/(4(1+k^2) sigma^2)), k = 1 +/- delta"),
        Column::new("q", "q = 1 - |Delta|^2"),
    ];
    let mut cells = vec![Cell::Number(shift.delta), Cell::Number(closed.delta.re), Cell::Number(closed.q)];
    if quadrature {
        let shifted = packet.propagate_ln(shift.ln_factor());
        let numeric = overlap_quadrature(&packet, &shifted)?;
        columns.push(Column::new("Delta_quadrature", "adaptive Gauss-Kronrod of F* F_k"));
        columns.push(Column::new("quadrature_error", "error estimate"));
        cells.push(Cell::Number(numeric.delta.re));
        cells.push(Cell::Number(numeric.error_estimate));
    }
    let mut t = Table::new(columns);
    t.push(cells);
    Ok(t)
}

fn entangle_table(q: f64, which: DetectorArg) -> Result<Table> {
    let detectors = match which {
        DetectorArg::D1 => vec![Detector::D1],
        DetectorArg::D2 => vec![Detector::D2],
        DetectorArg::Both => vec![Detector::D1, Detector::D2],
    };
    let mut t = Table::new(vec![
        Column::new("detector", "clicking path"),
        Column::new("probability", "|| projected state ||^2 from six-mode simulation"),
        Column::new("weight_plus", "<Psi+|rho|Psi+>"),
        Column::new("negativity", "sum(|l| - l)/2 over eigenvalues of rho^T_B"),
        Column::new("negativity_closed", "N = sqrt(1 - q)/2"),
        Column::new("max_deviation_from_closed", "max |rho - rho_closed| elementwise"),
        Column::new("leakage", "heralded weight outside single-excitation subspace"),
    ]);
    let plus = MemoryDensity::bell(true);
    for d in detectors {
        let out = entangleswap::simulate(q, d)?;
        let closed = entangleswap::memory_state_closed(q, d)?;
        let (w, n, dev) = match &out.memory_state {
            Some(rho) => (Some(rho.fidelity(&plus)?), Some(rho.negativity()?), Some(rho.max_abs_diff(&closed))),
            None => (None, None, None),
        };
        t.push(vec![
            Cell::Text(format!("{d:?}")),
            Cell::Number(out.probability),
            Cell::from(w),
            Cell::from(n),
            Cell::Number(entangleswap::negativity_closed(q)?),
            Cell::from(dev),
            Cell::Number(out.leakage),
        ]);
    }
    Ok(t)
}

fn qber_table(q: f64, trials: u64, seed: u64) -> Result<Table> {
    let (share, diff) = entangleswap::bit_probabilities(q)?;
    let closed = entangleswap::qber_closed(q)?;
    let mc = if trials > 0 {
        Some(entangleswap::qber_monte_carlo(q, trials, seed)?)
    } else {
        None
    };
    let sigma = (trials > 0).then(|| (closed * (1.0 - closed) / trials as f64).sqrt());
    let mut t = Table::new(vec![
        Column::new("q", "input"),
        Column::new("p_share", "(1 - sqrt(1-q))^2/4 + (1 + sqrt(1-q))^2/4"),
        Column::new("p_diff", "q/2"),
        Column::new("qber", "QBER = q/2"),
        Column::new("qber_monte_carlo", format!("Monte Carlo, trials = {trials}, seed = {seed}")),
        Column::new("binomial_sigma", "sqrt(QBER(1 - QBER)/trials)"),
    ]);
    t.push(vec![
        Cell::Number(q),
        Cell::Number(share),
        Cell::Number(diff),
        Cell::Number(closed),
        Cell::from(mc),
        Cell::from(sigma),
    ]);
    Ok(t)
}

fn homodyne_table(alpha: &str, beta: &str, s: &Source, mismatch: Option<f64>) -> Result<Table> {
    let prep = HomodynePrep::new(parse_complex("alpha", alpha)?, parse_complex("beta", beta)?)?;
    let src = s.resolve()?;
    let packet = src.packet()?;
    let earth = Body::earth();
    let surface = ObserverConfig::surface().to_observer()?;
    let flat = Body::new(1e-20, earth.radius())?;
    let mut links = vec![
        InvarianceScenario::shared("flat", flat, surface, Observer::iss()),
        InvarianceScenario::shared("leo", earth.clone(), surface, Observer::iss()),
        InvarianceScenario::shared("far_field", earth.clone(), surface, Observer::far_field()),
    ];
    if let Some(offset) = mismatch {
        let mut control = InvarianceScenario::shared("mismatched_lo", earth, surface, Observer::iss());
        control.oscillator = Some(WavePacket::gaussian(src.peak_hz + offset, src.width_hz)?);
        links.push(control);
    }
    let report = curvature_invariance_report(&prep, &packet, &links)?;
    let v_formula = if prep.strong_oscillator() {
        "V = 2 beta^2"
    } else {
        "V = 2(beta^2 + |alpha|^2)"
    };
    let mut t = Table::new(vec![
        Column::new("scenario_id", "link"),
        Column::new("chi", "chi = Omega_A/Omega_B"),
        Column::new("overlap", "|<LO|signal>| after propagation, quadrature"),
        Column::new("x", "X = beta (alpha* + alpha), beta real"),
        Column::new("v", v_formula),
        Column::new("pass", "overlap within 1e-12 of 1"),
    ]);
    for row in &report.rows {
        t.push(vec![
            Cell::from(row.scenario_id.as_str()),
            Cell::Number(row.chi),
            Cell::Number(row.overlap),
            Cell::from(row.x),
            Cell::from(row.v),
            Cell::Flag(row.pass),
        ]);
    }
    Ok(t)
}

fn parse_grid(grid: Option<&str>, log: Option<&str>) -> Result<Vec<f64>> {
    if let Some(spec) = log {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, n] = parts.as_slice() else {
            return Err(bad("log", "expected start:stop:count"));
        };
        let n: usize = n.trim().parse().map_err(|_| bad("log", format!("`{n}` is not a count")))?;
        return gravlink::scenario::log_grid(parse_f64("log", a)?, parse_f64("log", b)?, n);
    }
    let text = grid.unwrap_or_default();
    text.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_f64("grid", s)).collect()
}

struct Outcome {
    table: Table,
    format: Option<OutputFormat>,
    out: Option<PathBuf>,
    exit: u8,
}

impl Outcome {
    fn plain(table: Table) -> Self {
        Self {
            table,
            format: None,
            out: None,
            exit: 0,
        }
    }
}

fn execute(command: &Command) -> Result<Outcome> {
    Ok(match command {
        Command::Redshift(g) => Outcome::plain(redshift_table(g)?),
        Command::Overlap {
            geometry,
            source,
            quadrature,
        } => Outcome::plain(overlap_table(geometry, source, *quadrature)?),
        Command::Entangle { q, detector } => Outcome::plain(entangle_table(*q, *detector)?),
        Command::Qber { q, trials, seed } => Outcome::plain(qber_table(*q, *trials, *seed)?),
        Command::CvHomodyne {
            alpha,
            beta,
            source,
            mismatched_lo_hz,
        } => Outcome::plain(homodyne_table(alpha, beta, source, *mismatched_lo_hz)?),
        Command::Run { config } => {
            let c = load_config(config)?;
            let result = run_scenario(&c)?;
            let out = c.output.as_ref().and_then(|o| o.path.clone());
            Outcome {
                table: result.to_table(),
                format: c.output.as_ref().map(|o| o.format),
                out,
                exit: 0,
            }
        }
        Command::Sweep {
            config,
            parameter,
            grid,
            log,
        } => {
            let c = load_config(config)?;
            let p: SweepParameter = parameter.parse()?;
            let points = parse_grid(grid.as_deref(), log.as_deref())?;
            let rows = sweep(&c, p, &points)?;
            Outcome {
                table: sweep_table(p, &rows),
                format: c.output.as_ref().map(|o| o.format),
                out: None,
                exit: 0,
            }
        }
        Command::PaperTable => {
            let rows = paper_table()?;
            let exit = if table_passes(&rows) { 0 } else { EXIT_VERDICT };
            Outcome {
                table: reference_table(&rows),
                format: None,
                out: None,
                exit,
            }
        }
    })
}

fn exit_code_for(err: &Error) -> u8 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    let format = cli.format.map(OutputFormat::from).or(outcome.format).unwrap_or_default();
    let text = match outcome.table.render(format, cli.precision) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e));
        }
    };
    match cli.out.or(outcome.out) {
        Some(path) => {
            if let Err(e) = fs::write(&path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_VALIDATION);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.exit)
}
