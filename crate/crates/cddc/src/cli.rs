//! `cddc` command-line interface.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use cddc_core::dispersion::{DispersionModel, OpticalAxis, Polarization};
use cddc_core::phasematch::energy_conserving_idler;
use cddc_core::rates::{
    brightness_from_pair_rate, coupling_efficiencies, heralding_efficiency, pair_rate, Arm,
    CountRecord, PumpPower,
};
use cddc_core::search::{match_temperature, solve_cddc, trace_curve, CddcSolution};
use cddc_core::source::{analyze_source, ridge_centers, SourceAnalysis};
use cddc_core::spectra::{fwhm, marginal_spectrum, JointSpectrum, SpectrumAxis};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::config::{FilterSpec, OperatingPoint, RunConfig};
use crate::error::{CliError, Result};
use crate::report::{solution_report, source_report};
use crate::table::{fmt_num, jsi_table, marginal_table, OutDir, Table};

#[derive(Debug, Parser)]
#[command(
    name = "cddc",
    version,
    about = "Design and characterise collinear double-downconversion photon-pair sources",
    long_about = "Design and characterise collinear double-downconversion photon-pair sources.\n\n\
        Exit codes: 0 success, 2 domain/range/resolution error, 3 file or parse error,\n\
        4 no solution found, 5 inconsistent or undefined count data."
)]
pub struct Cli {
    /// Run configuration file (TOML); command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Crystal coefficient file (TOML); the bundled KTP data by default.
    #[arg(long, global = true, value_name = "FILE")]
    pub crystal: Option<PathBuf>,
    /// Directory receiving all output files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Refractive index, group index and group delay on one axis.
    Index(IndexArgs),
    /// Find the CDDC operating point, or trace it over the poling period.
    Match(MatchArgs),
    /// Joint spectral intensities and marginals of both processes.
    Jsi(JsiArgs),
    /// Bandwidths, coherence times, group delays and entanglement figures.
    Report(SourceArgs),
    /// Pair rate, coupling, heralding and brightness from measured counts.
    Rates(RatesArgs),
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Crystal axis (y or z).
    #[arg(long, conflicts_with = "pol", required_unless_present = "pol")]
    pub axis: Option<OpticalAxis>,
    /// Polarisation instead of an axis (H maps to y, V to z).
    #[arg(long)]
    pub pol: Option<Polarization>,
    /// Vacuum wavelength, nm.
    #[arg(long)]
    pub lambda: f64,
    /// Temperature, degrees C.
    #[arg(long, default_value_t = 25.0)]
    pub temp: f64,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected A:B")?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number `{t}`"))
    };
    Ok((num(a)?, num(b)?))
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err("expected START:END:STEPS".into());
    };
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number `{t}`"))
    };
    let steps = n
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("bad step count `{n}`"))?;
    Ok((num(a)?, num(b)?, steps))
}

#[derive(Debug, Clone, Default, Args)]
pub struct SourceArgs {
    /// Poling period, um.
    #[arg(long, value_name = "UM")]
    pub poling: Option<f64>,
    /// Crystal length, mm.
    #[arg(long, value_name = "MM")]
    pub length: Option<f64>,
    /// Crystal temperature, degrees C; fitted to the pump wavelength if absent.
    #[arg(long, value_name = "C")]
    pub temp: Option<f64>,
    /// Window for the temperature fit, degrees C.
    #[arg(long, value_name = "LO:HI", value_parser = parse_pair)]
    pub temp_window: Option<(f64, f64)>,
    /// Central pump wavelength, nm.
    #[arg(long, value_name = "NM")]
    pub pump: Option<f64>,
    /// Gaussian pump width sigma, nm.
    #[arg(long, value_name = "NM")]
    pub sigma: Option<f64>,
    /// Pump polarisation (H or V).
    #[arg(long)]
    pub pump_pol: Option<Polarization>,
    /// Absolute QPM order (odd).
    #[arg(long)]
    pub order: Option<u32>,
    /// Relative nonlinear weights of the +m and -m processes.
    #[arg(long, value_name = "W+:W-", value_parser = parse_pair)]
    pub weights: Option<(f64, f64)>,
    /// Phase between the two processes, rad.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Grid points per wavelength axis.
    #[arg(long, value_name = "N")]
    pub grid: Option<usize>,
    /// Grid half-width in bandwidths of the broader process.
    #[arg(long, value_name = "K")]
    pub span: Option<f64>,
    /// Pump window searched for CDDC points, nm.
    #[arg(long, value_name = "LO:HI", value_parser = parse_pair)]
    pub pump_window: Option<(f64, f64)>,
    /// Bandpass filter CENTER:FWHM[:gaussian|rectangular[:red|blue]];
    /// CENTER may be `auto` to centre on the photon.
    #[arg(long, value_name = "SPEC")]
    pub filter: Option<FilterSpec>,
}

impl SourceArgs {
    fn as_config(&self) -> RunConfig {
        RunConfig {
            crystal: None,
            poling_um: self.poling,
            length_mm: self.length,
            temp_c: self.temp,
            temp_window: self.temp_window,
            pump_nm: self.pump,
            pump_sigma_nm: self.sigma,
            pump_pol: self.pump_pol.map(|p| p.to_string()),
            order: self.order,
            weights: self.weights,
            theta: self.theta,
            grid_points: self.grid,
            span_fwhms: self.span,
            pump_window: self.pump_window,
            filter: self.filter,
        }
    }
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Trace the CDDC point over poling periods START:END:STEPS (um).
    #[arg(long, value_name = "START:END:STEPS", value_parser = parse_range)]
    pub trace: Option<(f64, f64, usize)>,
    /// Also write a gnuplot script for the traced curve.
    #[arg(long, requires = "trace")]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
pub struct JsiArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Also write a gnuplot script for the spectra.
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Counts file with columns sr_b,sr_r,cr,eta_b,eta_r,p_mw and optional
    /// b_b_thz,b_r_thz photon bandwidths.
    #[arg(long, value_name = "FILE")]
    pub counts: PathBuf,
    /// Blue photon bandwidth for rows without b_b_thz, THz.
    #[arg(long, value_name = "THZ")]
    pub bandwidth_blue: Option<f64>,
    /// Red photon bandwidth for rows without b_r_thz, THz.
    #[arg(long, value_name = "THZ")]
    pub bandwidth_red: Option<f64>,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Index(a) => cmd_index(cli, a),
        Command::Match(a) => cmd_match(cli, a),
        Command::Jsi(a) => cmd_jsi(cli, a),
        Command::Report(a) => cmd_report(cli, a),
        Command::Rates(a) => cmd_rates(cli, a),
    }
}

fn run_config(cli: &Cli, source: &SourceArgs) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        crystal: cli.crystal.clone(),
        ..source.as_config()
    };
    Ok(file.overridden_by(flags))
}

fn out_dir(cli: &Cli) -> Result<Option<OutDir>> {
    cli.out.as_deref().map(OutDir::create).transpose()
}

fn load_model(cli: &Cli) -> Result<DispersionModel> {
    run_config(cli, &SourceArgs::default())?.model()
}

fn cmd_index(cli: &Cli, a: &IndexArgs) -> Result<()> {
    let model = load_model(cli)?;
    let axis = match (a.axis, a.pol) {
        (Some(x), _) => x,
        (None, Some(p)) => p.axis(),
        (None, None) => return Err(CliError::Usage("pass --axis or --pol".into())),
    };
    let n = model.refractive_index(axis, a.lambda, a.temp)?;
    let ng = model.group_index(axis, a.lambda, a.temp)?;
    let gd = model.group_delay_per_mm(axis, a.lambda, a.temp)?;
    let mut t = Table::new(&[
        "axis",
        "lambda_nm",
        "temp_c",
        "n",
        "n_group",
        "gd_ps_per_mm",
    ]);
    t.push(vec![
        axis.to_string().to_lowercase(),
        fmt_num(a.lambda),
        fmt_num(a.temp),
        fmt_num(n),
        fmt_num(ng),
        fmt_num(gd),
    ]);
    print!("{}", t.to_csv_string());
    if let Some(out) = out_dir(cli)? {
        out.write_table("index.csv", &t)?;
    }
    Ok(())
}

const CURVE_HEADER: [&str; 7] = [
    "lambda_um",
    "temp_c",
    "pump_nm",
    "blue_nm",
    "red_nm",
    "residual_plus",
    "residual_minus",
];

fn curve_row(t: &mut Table, s: &CddcSolution) {
    t.push_nums(&[
        s.poling_um,
        s.temp_c,
        s.pump_nm,
        s.blue_nm,
        s.red_nm,
        s.residual_plus,
        s.residual_minus,
    ]);
}

fn cmd_match(cli: &Cli, a: &MatchArgs) -> Result<()> {
    let cfg = run_config(cli, &a.source)?;
    let model = cfg.model()?;
    let setup = cfg.search_setup()?;
    let poling = cfg.poling_um.unwrap_or(63.1);
    let pump = cfg.pump_nm.unwrap_or(532.3);
    let out = out_dir(cli)?;

    let solution = match cfg.temp_c {
        Some(t) => solve_cddc(&model, poling, t, &setup)?,
        None => match_temperature(&model, poling, pump, cfg.temp_window(), &setup)?.map(|(_, s)| s),
    };

    if let Some(range) = a.trace {
        let temp = cfg.temp_c.or(solution.map(|s| s.temp_c)).ok_or_else(|| {
            CliError::NoSolution(
                "no temperature given and none could be fitted for the trace".into(),
            )
        })?;
        let curve = trace_curve(&model, range, temp, &setup)?;
        let mut t = Table::new(&CURVE_HEADER);
        for s in curve.iter().filter_map(|p| p.solution.as_ref()) {
            curve_row(&mut t, s);
        }
        let gaps = curve.len() - t.rows.len();
        if t.rows.is_empty() {
            return Err(CliError::NoSolution(format!(
                "no CDDC point between {} and {} um at {temp:.2} C",
                range.0, range.1
            )));
        }
        match &out {
            Some(o) => {
                let path = o.write_table("curve.csv", &t)?;
                println!(
                    "{} solved periods, {gaps} gaps at {temp:.3} C -> {}",
                    t.rows.len(),
                    path.display()
                );
                if a.gnuplot {
                    o.write_text("curve.gp", CURVE_GNUPLOT)?;
                }
            }
            None => print!("{}", t.to_csv_string()),
        }
        return Ok(());
    }

    let s = solution.ok_or_else(|| {
        CliError::NoSolution(match cfg.temp_c {
            Some(t) => format!("no CDDC point for a {poling} um period at {t} C"),
            None => format!(
                "no CDDC point for a {poling} um period in {:?} C",
                cfg.temp_window()
            ),
        })
    })?;
    print!("{}", solution_report(&s));
    if let Some(o) = out {
        let mut t = Table::new(&CURVE_HEADER);
        curve_row(&mut t, &s);
        o.write_table("match.csv", &t)?;
    }
    Ok(())
}

const CURVE_GNUPLOT: &str = "\
set datafile separator ','
set key autotitle columnhead
set xlabel 'poling period [um]'
set ylabel 'wavelength [nm]'
plot 'curve.csv' using 1:4 with lines title 'blue', \\
     'curve.csv' using 1:5 with lines title 'red', \\
     'curve.csv' using 1:3 with lines title 'pump'
";

const JSI_GNUPLOT: &str = "\
set datafile separator ','
set xlabel 'signal wavelength [nm]'
set ylabel 'idler wavelength [nm]'
set view map
set multiplot layout 1,2
set title '+m'
splot 'jsi_plus.csv' using 1:2:3 every ::1 with points pointtype 5 pointsize 0.3 palette notitle
set title '-m'
splot 'jsi_minus.csv' using 1:2:3 every ::1 with points pointtype 5 pointsize 0.3 palette notitle
unset multiplot
";

/// Analysis at the configured or fitted operating point.
fn analysis(cfg: &RunConfig, model: &DispersionModel) -> Result<(SourceAnalysis, OperatingPoint)> {
    let op = cfg.operating_point(model)?;
    let op = if cfg.filter.is_some() {
        let (b_plus, b_minus) = ridge_centers(model, &op.source)?;
        let blue = 0.5 * (b_plus + b_minus);
        let red = energy_conserving_idler(op.source.pump_nm, blue);
        op.with_filter(cfg.filter, blue, red)?
    } else {
        op
    };
    Ok((analyze_source(model, &op.source)?, op))
}

fn marginal_width(js: &JointSpectrum, axis: SpectrumAxis) -> String {
    fwhm(&marginal_spectrum(js, axis)).map_or_else(|_| String::new(), fmt_num)
}

fn cmd_jsi(cli: &Cli, a: &JsiArgs) -> Result<()> {
    let cfg = run_config(cli, &a.source)?;
    let model = cfg.model()?;
    let (an, _) = analysis(&cfg, &model)?;
    let out = match out_dir(cli)? {
        Some(o) => o,
        None => OutDir::create(Path::new("."))?,
    };

    let mut widths = Table::new(&[
        "process",
        "photon",
        "lambda_nm",
        "pol",
        "fwhm_nm",
        "filtered_fwhm_nm",
    ]);
    for (name, p) in [("plus", &an.plus), ("minus", &an.minus)] {
        out.write_table(&format!("jsi_{name}.csv"), &jsi_table(&p.spectrum))?;
        for (arm, axis, row) in [
            ("blue", SpectrumAxis::Signal, &p.blue),
            ("red", SpectrumAxis::Idler, &p.red),
        ] {
            let m = marginal_spectrum(&p.spectrum, axis);
            out.write_table(&format!("marginal_{name}_{arm}.csv"), &marginal_table(&m))?;
            if let Some(f) = &p.filtered {
                let mf = marginal_spectrum(f, axis);
                out.write_table(
                    &format!("marginal_{name}_{arm}_filtered.csv"),
                    &marginal_table(&mf),
                )?;
            }
            widths.push(vec![
                name.into(),
                arm.into(),
                fmt_num(row.wavelength_nm),
                row.pol.to_string(),
                marginal_width(&p.spectrum, axis),
                p.filtered
                    .as_ref()
                    .map_or_else(String::new, |f| marginal_width(f, axis)),
            ]);
        }
        if let Some(f) = &p.filtered {
            out.write_table(&format!("jsi_{name}_filtered.csv"), &jsi_table(f))?;
        }
    }
    out.write_table("widths.csv", &widths)?;
    if a.gnuplot {
        out.write_text("jsi.gp", JSI_GNUPLOT)?;
    }
    print!("{}", widths.to_csv_string());
    Ok(())
}

fn cmd_report(cli: &Cli, a: &SourceArgs) -> Result<()> {
    let cfg = run_config(cli, a)?;
    let model = cfg.model()?;
    let (an, op) = analysis(&cfg, &model)?;
    let text = source_report(&an, model.crystal(), op.fitted.is_some());
    print!("{text}");
    if let Some(o) = out_dir(cli)? {
        o.write_text("report.txt", &text)?;
    }
    Ok(())
}

#[derive(Debug, Deserialize)]
struct CountRow {
    sr_b: f64,
    sr_r: f64,
    cr: f64,
    eta_b: f64,
    eta_r: f64,
    p_mw: Option<f64>,
    b_b_thz: Option<f64>,
    b_r_thz: Option<f64>,
}

fn cmd_rates(cli: &Cli, a: &RatesArgs) -> Result<()> {
    let file = std::fs::File::open(&a.counts).map_err(|e| CliError::io(&a.counts, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut t = Table::new(&[
        "pr",
        "mu_b",
        "mu_r",
        "brightness_b",
        "brightness_r",
        "herald_b_raw",
        "herald_b_corrected",
        "herald_r_raw",
        "herald_r_corrected",
    ]);
    for (k, row) in reader.deserialize::<CountRow>().enumerate() {
        let row = row.map_err(|e| CliError::parse(&a.counts, e))?;
        let power = match row.p_mw {
            Some(p) => PumpPower::Absolute(p),
            None => PumpPower::PerMilliwatt,
        };
        let rec = CountRecord::new(row.sr_b, row.sr_r, row.cr, row.eta_b, row.eta_r, power)
            .map_err(|e| CliError::Core(annotate(e, k + 1)))?;
        let with_row = |e| CliError::Core(annotate(e, k + 1));
        let pr = pair_rate(&rec).map_err(with_row)?;
        let (mu_b, mu_r) = coupling_efficiencies(&rec).map_err(with_row)?;
        let bright = |bw: Option<f64>| -> Result<String> {
            bw.map(|b| brightness_from_pair_rate(pr, power.milliwatts(), b).map(fmt_num))
                .transpose()
                .map(Option::unwrap_or_default)
                .map_err(with_row)
        };
        let hb = heralding_efficiency(&rec, Arm::Blue).map_err(with_row)?;
        let hr = heralding_efficiency(&rec, Arm::Red).map_err(with_row)?;
        t.push(vec![
            fmt_num(pr),
            fmt_num(mu_b),
            fmt_num(mu_r),
            bright(row.b_b_thz.or(a.bandwidth_blue))?,
            bright(row.b_r_thz.or(a.bandwidth_red))?,
            fmt_num(hb.raw),
            fmt_num(hb.detector_corrected),
            fmt_num(hr.raw),
            fmt_num(hr.detector_corrected),
        ]);
    }
    print!("{}", t.to_csv_string());
    if let Some(o) = out_dir(cli)? {
        o.write_table("rates.csv", &t)?;
    }
    Ok(())
}

fn annotate(e: cddc_core::Error, row: usize) -> cddc_core::Error {
    use cddc_core::Error as E;
    match e {
        E::InconsistentRecord(m) => E::InconsistentRecord(format!("row {row}: {m}")),
        E::UndefinedRate(m) => E::UndefinedRate(format!("row {row}: {m}")),
        E::Domain(m) => E::Domain(format!("row {row}: {m}")),
        other => other,
    }
}
