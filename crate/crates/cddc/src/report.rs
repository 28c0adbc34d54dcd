//! Plain-text reports.

use std::fmt::Write;

use cddc_core::search::CddcSolution;
use cddc_core::source::{PhotonRow, ProcessReport, SourceAnalysis, Summary};

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.prec$}"))
}

fn photon_line(out: &mut String, m: &str, row: &PhotonRow, dt: Option<f64>) {
    let _ = writeln!(
        out,
        "{m:>3}  {:>9.2}  {:>3}  {:>8.3}  {:>8}  {:>8.2}  {:>8}  {:>8.3}  {:>8}",
        row.wavelength_nm,
        row.pol.to_string(),
        row.fwhm_nm,
        opt(row.filtered_fwhm_nm, 3),
        row.coherence_ps,
        opt(row.filtered_coherence_ps, 2),
        row.group_delay_ps_per_mm,
        dt.map_or_else(String::new, |d| format!("{d:+.2}")),
    );
}

fn process_lines(out: &mut String, p: &ProcessReport) {
    let m = format!("{:+}", p.spec.order.get());
    photon_line(out, &m, &p.blue, Some(p.time_offset_ps));
    photon_line(out, "", &p.red, None);
}

fn summary_lines(out: &mut String, title: &str, s: &Summary) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "  |alpha|, |beta|      {:.4}, {:.4}",
        s.amplitudes.alpha_abs(),
        s.amplitudes.beta_abs()
    );
    let _ = writeln!(out, "  theta [rad]          {:.4}", s.amplitudes.theta);
    let _ = writeln!(out, "  overlap (raw)        {:.4}", s.overlap);
    let _ = writeln!(out, "  overlap (delay comp) {:.4}", s.overlap_compensated);
    let _ = writeln!(out, "  V_HV                 {:.4}", s.visibility_hv);
    let _ = writeln!(out, "  V_diag               {:.4}", s.visibility_diagonal);
    let _ = writeln!(out, "  CHSH S               {:.4}", s.chsh);
    if s.product_state {
        let _ = writeln!(out, "  product state: only one process contributes");
    }
}

/// Per-photon table followed by the two-process summary.
pub fn source_report(a: &SourceAnalysis, crystal: &str, temp_fitted: bool) -> String {
    let c = &a.config;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{crystal}  period {} um  length {} mm  T {:.2} C{}  pump {} nm ({} pol, sigma {} nm)",
        c.poling_um,
        c.length_mm,
        c.temp_c,
        if temp_fitted { " (fitted)" } else { "" },
        c.pump_nm,
        c.pump_pol,
        c.pump_sigma_nm,
    );
    if let Some((f, axis)) = c.filter {
        let _ = writeln!(
            out,
            "bandpass filter: {:.2} nm, {} nm FWHM, {:?}, {} arm",
            f.center_nm,
            f.fwhm_nm,
            f.shape,
            match axis {
                cddc_core::spectra::SpectrumAxis::Signal => "blue",
                cddc_core::spectra::SpectrumAxis::Idler => "red",
            }
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>3}  {:>9}  {:>3}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}",
        "m", "lambda", "pol", "dl_sim", "dl_filt", "tau_coh", "tau_filt", "GD", "dt_max"
    );
    let _ = writeln!(
        out,
        "{:>3}  {:>9}  {:>3}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}",
        "", "[nm]", "", "[nm]", "[nm]", "[ps]", "[ps]", "[ps/mm]", "[ps]"
    );
    process_lines(&mut out, &a.plus);
    process_lines(&mut out, &a.minus);
    let _ = writeln!(out);
    summary_lines(&mut out, "unfiltered", &a.unfiltered);
    if let Some(f) = &a.filtered {
        summary_lines(&mut out, "filtered", f);
    }
    out
}

pub fn solution_report(s: &CddcSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "period       {} um", s.poling_um);
    let _ = writeln!(out, "temperature  {:.3} C", s.temp_c);
    let _ = writeln!(out, "pump         {:.3} nm", s.pump_nm);
    let _ = writeln!(out, "blue         {:.3} nm", s.blue_nm);
    let _ = writeln!(out, "red          {:.3} nm", s.red_nm);
    let _ = writeln!(out, "+m blue pol  {}", s.plus_blue_pol);
    let _ = writeln!(
        out,
        "residuals    {:.3e}, {:.3e} rad/m",
        s.residual_plus, s.residual_minus
    );
    if s.degenerate {
        let _ = writeln!(out, "degenerate: blue and red coincide");
    }
    out
}
