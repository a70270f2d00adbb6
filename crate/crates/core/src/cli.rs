//! `multifield` command line.
//!
//! Exit status: 0 success, 2 configuration error, 3 numeric or estimate
//! error, 1 when an output file cannot be written.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, RunConfig};
use crate::counting::{
    cs_test, g2_auto, g2_cross, gate_delay_scan, heralding_efficiency, simulate_trials, summarize,
    tradeoff_sweep, write_events_csv, Channel, CorrelationEstimate,
};
use crate::dynamics::DressedSystem;
use crate::emission::{detuning_grid, detuning_sweep, EmissionSet, IDLER, SIGNAL};
use crate::filter::{
    centered_stacks, convolution_sweep, fwhm, local_maxima, pulse_spectrum, recover_spectrum,
    FilterStack, SpectrumGrid,
};
use crate::units::{ghz, to_ghz, to_mhz};

#[derive(Debug, Parser)]
#[command(name = "multifield", version, about = "Three-level emission, cavity filtering and pair-counting simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Overrides the detuning grid step.
    #[arg(long = "grid-step", global = true, value_name = "GHZ")]
    pub grid_step: Option<f64>,
    /// Overrides the configured trial count.
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<u64>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Seven emission components at the configured detuning.
    Components,
    /// Bare-state populations over the pulse.
    Populations,
    /// Emission components over the detuning grid.
    Sweep,
    /// Stack transmission and pulse spectrum.
    Filter,
    /// Filtered signal and idler traces over the detuning grid.
    Convolve,
    /// Deconvolves a measured trace by the stack window.
    Recover,
    /// Counts, correlations and the classical bound for one source setting.
    Stats {
        /// Also write the detection events.
        #[arg(long)]
        write_events: bool,
    },
    /// Cross correlation versus pulse energy.
    Tradeoff,
    /// Cross correlation versus integration-gate delay.
    Gates,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Components => "components",
            Command::Populations => "populations",
            Command::Sweep => "sweep",
            Command::Filter => "filter",
            Command::Convolve => "convolve",
            Command::Recover => "recover",
            Command::Stats { .. } => "stats",
            Command::Tradeoff => "tradeoff",
            Command::Gates => "gates",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numeric(String),
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Numeric(e) => write!(f, "numeric error: {e}"),
            CliError::Output(e) => write!(f, "output error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("multifield: {e}");
            e.exit_code()
        }
    }
}

/// Plain decimal where it stays short, exponent form otherwise; both
/// round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

struct Context {
    cfg: RunConfig,
    hash: String,
    seed: u64,
    trials: u64,
    out_dir: PathBuf,
    subcommand: &'static str,
}

impl Context {
    fn path(&self, suffix: &str) -> PathBuf {
        self.out_dir.join(format!("{}_{}.csv", self.cfg.scenario, suffix))
    }

    fn header(&self) -> Vec<String> {
        vec![
            format!("# multifield {}", self.subcommand),
            format!("# scenario: {}", self.cfg.scenario),
            format!("# config_sha256: {}", self.hash),
            format!("# seed: {}", self.seed),
        ]
    }

    fn create(&self, path: &Path, extra: &[String]) -> Result<BufWriter<File>, CliError> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| CliError::Output(format!("{}: {e}", self.out_dir.display())))?;
        let file = File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        for line in self.header().iter().chain(extra) {
            writeln!(w, "{line}").map_err(|e| CliError::Output(e.to_string()))?;
        }
        Ok(w)
    }

    /// Writes `<scenario>_<subcommand>.csv` and returns its path.
    fn write_table(&self, extra: &[String], columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let path = self.path(self.subcommand);
        let out = self.create(&path, extra)?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let io = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(columns).map_err(io)?;
        for r in rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Output(e.to_string()))?;
        Ok(path)
    }
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or(CliError::Config(ConfigError::Invalid { key: "--config".into(), message: "is required".into() }))?;
    let (mut cfg, bytes) = RunConfig::load(path)?;
    if let Some(step) = cli.grid_step {
        cfg.sweep.step_ghz = step;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(step) = cli.grid_step {
        if !(step.is_finite() && step > 0.0) {
            return Err(ConfigError::Invalid { key: "--grid-step".into(), message: format!("must be > 0, got {step}") }.into());
        }
    }
    if cfg.trials == 0 {
        return Err(ConfigError::Invalid { key: "--trials".into(), message: "must be >= 1".into() }.into());
    }
    let ctx = Context {
        hash: hex::encode(Sha256::digest(&bytes)),
        seed: cfg.seed,
        trials: cfg.trials,
        out_dir: cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone()),
        subcommand: cli.command.name(),
        cfg,
    };
    match &cli.command {
        Command::Components => components(&ctx),
        Command::Populations => populations(&ctx),
        Command::Sweep => sweep(&ctx),
        Command::Filter => filter(&ctx),
        Command::Convolve => convolve(&ctx),
        Command::Recover => recover(&ctx),
        Command::Stats { write_events } => stats(&ctx, *write_events),
        Command::Tradeoff => tradeoff(&ctx),
        Command::Gates => gates(&ctx),
    }
}

const EMISSION_COLUMNS: [&str; 6] = ["delta23_GHz", "j", "offset_GHz", "D", "absD_norm", "intensity_norm"];

fn emission_rows(set: &EmissionSet, rows: &mut Vec<Vec<String>>) {
    for j in 1..=7 {
        let c = set.component(j);
        rows.push(vec![
            fmt_f64(to_ghz(set.delta23)),
            j.to_string(),
            fmt_f64(to_ghz(c.offset)),
            fmt_f64(c.amplitude),
            fmt_f64(set.normalized_magnitude(j)),
            fmt_f64(set.normalized_intensity(j)),
        ]);
    }
}

fn components(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let set = EmissionSet::compute(&cfg.level_scheme()?, &cfg.drive_params()?, &cfg.collection_factors()?)
        .map_err(numeric)?;
    let mut rows = Vec::new();
    emission_rows(&set, &mut rows);
    let path = ctx.write_table(&[], &EMISSION_COLUMNS, &rows)?;
    let strongest = (1..=7).max_by(|&a, &b| set.normalized_magnitude(a).total_cmp(&set.normalized_magnitude(b))).unwrap();
    Ok(format!(
        "components: delta23={} GHz offset2={:.4} GHz offset6={:.4} GHz strongest=j{} -> {}",
        fmt_f64(to_ghz(set.delta23)),
        to_ghz(set.component(IDLER).offset),
        to_ghz(set.component(SIGNAL).offset),
        strongest,
        path.display()
    ))
}

fn populations(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let sys = DressedSystem::solve(&cfg.level_scheme()?, &cfg.drive_params()?).map_err(numeric)?;
    let trace = sys.population_trace(cfg.time_grid.points).map_err(numeric)?;
    let mut worst: f64 = 0.0;
    let rows: Vec<Vec<String>> = trace
        .times
        .iter()
        .zip(&trace.populations)
        .map(|(t, p)| {
            worst = worst.max((p.iter().sum::<f64>() - 1.0).abs());
            vec![fmt_f64(*t), fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2])]
        })
        .collect();
    let path = ctx.write_table(&[], &["t_ns", "p1", "p2", "p3"], &rows)?;
    let last = trace.populations.last().copied().unwrap_or([0.0; 3]);
    Ok(format!(
        "populations: {} points, final=({:.4}, {:.4}, {:.4}), max|sum-1|={:.1e} -> {}",
        trace.len(),
        last[0],
        last[1],
        last[2],
        worst,
        path.display()
    ))
}

fn emission_sweep(ctx: &Context) -> Result<Vec<EmissionSet>, CliError> {
    let cfg = &ctx.cfg;
    let (start, stop, step) = cfg.detuning_range()?;
    let grid = detuning_grid(start, stop, step, cfg.sweep.include_reference).map_err(numeric)?;
    detuning_sweep(&grid, &cfg.level_scheme()?, &cfg.drive_params()?, &cfg.collection_factors()?)
        .into_iter()
        .map(|p| {
            p.emission
                .map_err(|e| CliError::Numeric(format!("at delta23 = {} GHz: {e}", fmt_f64(to_ghz(p.delta23)))))
        })
        .collect()
}

fn grid_header(ctx: &Context) -> Vec<String> {
    vec![format!("# grid_step_ghz: {}", fmt_f64(ctx.cfg.sweep.step_ghz))]
}

fn sweep(ctx: &Context) -> Result<String, CliError> {
    let sets = emission_sweep(ctx)?;
    let mut rows = Vec::new();
    for s in &sets {
        emission_rows(s, &mut rows);
    }
    let path = ctx.write_table(&grid_header(ctx), &EMISSION_COLUMNS, &rows)?;
    Ok(format!("sweep: {} detunings x 7 components -> {}", sets.len(), path.display()))
}

/// Calibrated stacks, centered on the signal and idler components at the
/// reference detuning unless a center is configured.
fn stacks(ctx: &Context) -> Result<(FilterStack, FilterStack), CliError> {
    let cfg = &ctx.cfg;
    let f = cfg.filter()?;
    let signal = f.signal.build("filter.signal")?;
    let idler = f.idler.build("filter.idler")?;
    let scheme = cfg.level_scheme()?.with_delta23(ghz(f.reference_delta23_ghz)).map_err(numeric)?;
    let reference = EmissionSet::compute(&scheme, &cfg.drive_params()?, &cfg.collection_factors()?).map_err(numeric)?;
    let (auto_s, auto_i) = centered_stacks(&reference, &signal, &idler);
    Ok((
        if f.signal.center_ghz.is_some() { signal } else { auto_s },
        if f.idler.center_ghz.is_some() { idler } else { auto_i },
    ))
}

fn filter(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let f = cfg.filter()?;
    let (s, i) = stacks(ctx)?;
    let g = &cfg.frequency_grid;
    let step = ghz(g.step_ghz);
    let pulse = pulse_spectrum(cfg.drive_params()?.pulse_duration, f.pulse_shape()?, g.points, step).map_err(numeric)?;
    let pmax = pulse.max();
    let rows: Vec<Vec<String>> = pulse
        .frequencies()
        .zip(pulse.values())
        .map(|(d, p)| {
            vec![
                fmt_f64(to_ghz(d)),
                fmt_f64(s.transmission(s.center() + d)),
                fmt_f64(i.transmission(i.center() + d)),
                fmt_f64(p / pmax),
            ]
        })
        .collect();
    let extra = vec![
        format!("# signal_center_ghz: {}", fmt_f64(to_ghz(s.center()))),
        format!("# idler_center_ghz: {}", fmt_f64(to_ghz(i.center()))),
    ];
    let path = ctx.write_table(&extra, &["offset_GHz", "signal", "idler", "pulse"], &rows)?;
    let pw = fwhm(&pulse).map_err(numeric)?;
    Ok(format!(
        "filter: signal FWHM={:.1} MHz peak={:.3}, idler FWHM={:.1} MHz peak={:.3}, pulse FWHM={:.1} MHz -> {}",
        to_mhz(s.measured_fwhm()),
        s.peak_transmission(),
        to_mhz(i.measured_fwhm()),
        i.peak_transmission(),
        to_mhz(pw),
        path.display()
    ))
}

fn convolve(ctx: &Context) -> Result<String, CliError> {
    let f = ctx.cfg.filter()?;
    let sets = emission_sweep(ctx)?;
    let (s, i) = stacks(ctx)?;
    let trace = convolution_sweep(&sets, &s, &i, f.laser_tracking, ghz(f.reference_delta23_ghz)).map_err(numeric)?;
    let max = trace.signal.iter().chain(&trace.idler).copied().fold(0.0, f64::max);
    let scale = if max > 0.0 { 1.0 / max } else { 0.0 };
    let rows: Vec<Vec<String>> = (0..trace.len())
        .map(|k| {
            vec![
                fmt_f64(to_ghz(trace.delta23[k])),
                fmt_f64(trace.signal[k] * scale),
                fmt_f64(trace.idler[k] * scale),
            ]
        })
        .collect();
    let path = ctx.write_table(&grid_header(ctx), &["delta_GHz", "counts_signal", "counts_idler"], &rows)?;
    let peaks: Vec<String> = local_maxima(&trace.signal, 0.05)
        .into_iter()
        .map(|k| format!("{:.2}", to_ghz(trace.delta23[k])))
        .collect();
    Ok(format!(
        "convolve: {} detunings, signal maxima above 5% at [{}] GHz -> {}",
        trace.len(),
        peaks.join(", "),
        path.display()
    ))
}

/// Reads `freq_GHz,value` rows on a uniform grid.
pub fn read_spectrum_csv(path: &Path) -> Result<SpectrumGrid, ConfigError> {
    let key = || "recover.trace".to_string();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    let headers = rdr.headers().map_err(|e| ConfigError::Invalid { key: key(), message: e.to_string() })?.clone();
    if headers.iter().collect::<Vec<_>>() != ["freq_GHz", "value"] {
        return Err(ConfigError::Invalid { key: key(), message: "expected columns freq_GHz,value".into() });
    }
    let mut freqs = Vec::new();
    let mut values = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ConfigError::Invalid { key: key(), message: e.to_string() })?;
        let parse = |i: usize| -> Result<f64, ConfigError> {
            rec.get(i).unwrap_or("").parse::<f64>().map_err(|e| ConfigError::Invalid {
                key: key(),
                message: format!("row {}: {e}", n + 1),
            })
        };
        freqs.push(parse(0)?);
        values.push(parse(1)?);
    }
    if freqs.len() < 8 {
        return Err(ConfigError::Invalid { key: key(), message: "needs at least 8 samples".into() });
    }
    let step = (freqs[freqs.len() - 1] - freqs[0]) / (freqs.len() - 1) as f64;
    for (k, f) in freqs.iter().enumerate() {
        if (f - (freqs[0] + k as f64 * step)).abs() > 1e-6 * step.abs() {
            return Err(ConfigError::Invalid { key: key(), message: format!("row {}: grid is not uniform", k + 1) });
        }
    }
    SpectrumGrid::new(ghz(freqs[0]), ghz(step), values).map_err(|e| ConfigError::Invalid { key: key(), message: e.to_string() })
}

fn recover(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let f = cfg.filter()?;
    let which = cfg.recover()?.stack.as_str();
    let stack = if which == "idler" { f.idler.build("filter.idler")? } else { f.signal.build("filter.signal")? };
    let trace = read_spectrum_csv(&cfg.trace_path()?)?;
    let spectrum = recover_spectrum(&trace, &stack, f.wiener_epsilon).map_err(numeric)?;
    let rows: Vec<Vec<String>> = spectrum
        .frequencies()
        .zip(spectrum.values())
        .map(|(nu, v)| vec![fmt_f64(to_ghz(nu)), fmt_f64(*v)])
        .collect();
    let extra = vec![format!("# wiener_epsilon: {}", fmt_f64(f.wiener_epsilon))];
    let path = ctx.write_table(&extra, &["freq_GHz", "value"], &rows)?;
    let w = fwhm(&spectrum).map_err(numeric)?;
    let tw = fwhm(&trace).map_err(numeric)?;
    Ok(format!(
        "recover: trace FWHM={:.1} MHz, recovered FWHM={:.1} MHz ({} window) -> {}",
        to_mhz(tw),
        to_mhz(w),
        which,
        path.display()
    ))
}

fn trials_header(ctx: &Context) -> Vec<String> {
    vec![format!("# trials: {}", ctx.trials)]
}

const SPLITTER_S: u64 = 0x9e37_79b9_7f4a_7c15;
const SPLITTER_I: u64 = 0xc2b2_ae3d_27d4_eb4f;

fn estimate_row(name: &str, e: &CorrelationEstimate) -> Vec<String> {
    vec![name.into(), fmt_f64(e.value), fmt_f64(e.sigma)]
}

fn stats(ctx: &Context, write_events: bool) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let model = cfg.source_model()?;
    let (gs, gi) = cfg.gates.build()?;
    let events = simulate_trials(&model, ctx.trials, ctx.seed).map_err(numeric)?;
    let summary = summarize(&events, &gs, &gi);
    let g_si = g2_cross(&summary).map_err(numeric)?;
    let g_ss = g2_auto(&events, Channel::S, &gs, ctx.seed ^ SPLITTER_S).map_err(numeric)?;
    let g_ii = g2_auto(&events, Channel::I, &gi, ctx.seed ^ SPLITTER_I).map_err(numeric)?;
    let cs = cs_test(&g_si, &g_ss, &g_ii);
    let count = |name: &str, n: u64| vec![name.to_string(), n.to_string(), String::new()];
    let prob = |name: &str, p: f64| vec![name.to_string(), fmt_f64(p), String::new()];
    let herald = |c| heralding_efficiency(&summary, c).map(fmt_f64).unwrap_or_default();
    let rows = vec![
        count("n_trials", summary.n_trials),
        count("n_s", summary.n_s),
        count("n_i", summary.n_i),
        count("n_si", summary.n_si),
        prob("p_s", summary.p_s()),
        prob("p_i", summary.p_i()),
        prob("p_si", summary.p_si()),
        estimate_row("g2_si", &g_si),
        estimate_row("g2_ss", &g_ss),
        estimate_row("g2_ii", &g_ii),
        vec!["cs_margin".into(), fmt_f64(cs.margin), fmt_f64(cs.sigma_margin)],
        prob("cs_sigma_count", cs.sigma_count),
        vec!["herald_by_signal".into(), herald(Channel::S), String::new()],
        vec!["herald_by_idler".into(), herald(Channel::I), String::new()],
    ];
    let path = ctx.write_table(&trials_header(ctx), &["quantity", "value", "sigma"], &rows)?;
    if write_events {
        let epath = ctx.path("events");
        let mut w = ctx.create(&epath, &[])?;
        write_events_csv(&events, &mut w).map_err(|e| CliError::Output(e.to_string()))?;
        w.flush().map_err(|e| CliError::Output(e.to_string()))?;
    }
    Ok(format!(
        "stats: g2_si={:.3}±{:.3} g2_ss={:.3}±{:.3} g2_ii={:.3}±{:.3} classical bound {} by {:.1} sigma -> {}",
        g_si.value,
        g_si.sigma,
        g_ss.value,
        g_ss.sigma,
        g_ii.value,
        g_ii.sigma,
        if cs.violated { "violated" } else { "respected" },
        cs.sigma_count,
        path.display()
    ))
}

fn optional_estimate(e: &Result<CorrelationEstimate, crate::counting::CountingError>) -> [String; 2] {
    match e {
        Ok(e) => [fmt_f64(e.value), fmt_f64(e.sigma)],
        Err(_) => [String::new(), String::new()],
    }
}

fn tradeoff(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let model = cfg.source_model()?;
    let (energies, mapping) = cfg.tradeoff()?.build()?;
    let (gs, gi) = cfg.gates.build()?;
    let pts = tradeoff_sweep(&energies, &mapping, &model, &gs, &gi, ctx.trials, ctx.seed).map_err(numeric)?;
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let rows: Vec<Vec<String>> = pts
        .iter()
        .map(|p| {
            let [g, sg] = optional_estimate(&p.g2_si);
            vec![
                fmt_f64(p.energy),
                fmt_f64(p.mu),
                fmt_f64(to_ghz(p.omega)),
                fmt_f64(p.excitation),
                fmt_f64(p.summary.p_s()),
                fmt_f64(p.summary.p_i()),
                fmt_f64(p.summary.p_si()),
                g,
                sg,
                opt(p.herald_by_signal),
                opt(p.herald_by_idler),
            ]
        })
        .collect();
    let columns = [
        "energy_pJ",
        "mu",
        "omega_GHz",
        "excitation",
        "p_s",
        "p_i",
        "p_si",
        "g2_si",
        "g2_si_sigma",
        "herald_by_signal",
        "herald_by_idler",
    ];
    let path = ctx.write_table(&trials_header(ctx), &columns, &rows)?;
    let gs: Vec<String> = pts
        .iter()
        .map(|p| p.g2_si.as_ref().map(|e| format!("{:.2}", e.value)).unwrap_or_else(|_| "-".into()))
        .collect();
    Ok(format!("tradeoff: {} energies, g2_si = [{}] -> {}", pts.len(), gs.join(", "), path.display()))
}

fn gates(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.cfg;
    let model = cfg.source_model()?;
    let (width, scanned, delays) = cfg.gate_scan()?.build()?;
    let events = simulate_trials(&model, ctx.trials, ctx.seed).map_err(numeric)?;
    let pts = gate_delay_scan(&events, width, scanned, &delays).map_err(numeric)?;
    let rows: Vec<Vec<String>> = pts
        .iter()
        .map(|p| {
            let [g, s] = optional_estimate(&p.g2_si);
            vec![
                fmt_f64(p.delay),
                p.summary.n_s.to_string(),
                p.summary.n_i.to_string(),
                p.summary.n_si.to_string(),
                g,
                s,
            ]
        })
        .collect();
    let mut extra = trials_header(ctx);
    extra.push(format!("# scanned: {}", cfg.gate_scan()?.scanned));
    let path = ctx.write_table(&extra, &["delay_ns", "n_s", "n_i", "n_si", "g2_si", "g2_si_sigma"], &rows)?;
    let best = pts
        .iter()
        .filter_map(|p| p.g2_si.as_ref().ok().map(|e| (p.delay, e.value)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    Ok(match best {
        Some((d, g)) => format!("gates: {} delays, max g2_si={:.2} at {} ns -> {}", pts.len(), g, fmt_f64(d), path.display()),
        None => format!("gates: {} delays, no defined estimate -> {}", pts.len(), path.display()),
    })
}
