//! Acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p cddc --test acceptance`. The binary exits with
//! status 0 even when a criterion fails so the rest of the workspace suite
//! still runs; set `CDDC_ACCEPTANCE_STRICT=1` to turn any FAIL into a
//! nonzero exit.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};
use std::time::{Duration, Instant};

use cddc::crystal::load_crystal;
use cddc_core::dispersion::{DispersionModel, Polarization};
use cddc_core::entanglement::{
    chsh_parameter, chsh_standard_angles, coincidence_probability, fringe_visibility, visibility,
    Basis, EntangledStateModel,
};
use cddc_core::phasematch::{
    energy_conserving_idler, grating_vector, poling_period, qpm_amplitude_from_mismatch,
    Polarizations, ProcessSpec, QpmOrder,
};
use cddc_core::rates::{
    brightness_from_pair_rate, coupling_efficiencies, pair_rate, CountRecord, PumpPower,
};
use cddc_core::search::{match_temperature, trace_curve, CddcSolution, SearchSetup};
use cddc_core::source::{analyze_source, SourceConfig};
use cddc_core::spectra::{
    apply_bandpass, bandwidth_thz, coherence_time_ps, compute_jsa, fwhm, marginal_spectrum,
    process_amplitudes, BandpassFilter, FilterShape, JointSpectrum, ProcessAmplitudes,
    PumpEnvelope, SpectrumAxis, WavelengthAxis, WavelengthGrid,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

const POLING_UM: f64 = 63.1;
const PUMP_NM: f64 = 532.3;
const BLUE_NM: f64 = 904.3;
const RED_NM: f64 = 1293.9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within_rel(x: f64, want: f64, rel: f64) -> bool {
    (x - want).abs() <= rel * want.abs()
}

fn a1(model: &DispersionModel) -> (Outcome, Option<CddcSolution>) {
    let start = Instant::now();
    let found = match_temperature(
        model,
        POLING_UM,
        PUMP_NM,
        (30.0, 90.0),
        &SearchSetup::default(),
    );
    let elapsed = start.elapsed();
    let Ok(Some((_, s))) = found else {
        return (
            outcome(false, format!("no solution in 30-90 C ({found:?})")),
            None,
        );
    };
    let pass = (s.pump_nm - PUMP_NM).abs() <= 10.0
        && (s.blue_nm - BLUE_NM).abs() <= 10.0
        && (s.red_nm - RED_NM).abs() <= 15.0
        && elapsed < Duration::from_secs(5);
    let detail = format!(
        "T {:.2} C: pump {:.2}, blue {:.2}, red {:.2} nm in {:.2} s",
        s.temp_c,
        s.pump_nm,
        s.blue_nm,
        s.red_nm,
        elapsed.as_secs_f64()
    );
    (outcome(pass, detail), Some(s))
}

fn source_config(sol: &CddcSolution) -> SourceConfig {
    SourceConfig {
        temp_c: sol.temp_c,
        plus_blue_pol: sol.plus_blue_pol,
        ..SourceConfig::default()
    }
}

fn a2_a3(model: &DispersionModel, sol: Option<&CddcSolution>) -> (Outcome, Outcome) {
    let Some(sol) = sol else {
        let skipped = || outcome(false, "needs the A1 operating point");
        return (skipped(), skipped());
    };
    let a = match analyze_source(model, &source_config(sol)) {
        Ok(a) => a,
        Err(e) => {
            let failed = || outcome(false, format!("analysis failed: {e}"));
            return (failed(), failed());
        }
    };
    let rows = [&a.plus.blue, &a.plus.red, &a.minus.blue, &a.minus.red];

    let widths = [1.1, 2.2, 0.60, 1.2];
    let w_ok = rows
        .iter()
        .zip(widths)
        .all(|(r, w)| within_rel(r.fwhm_nm, w, 0.15));
    let w_detail = rows
        .iter()
        .map(|r| format!("{:.3}", r.fwhm_nm))
        .collect::<Vec<_>>()
        .join(", ");

    let gds = [6.0, 6.2, 6.3, 5.9];
    let gd_ok = rows
        .iter()
        .zip(gds)
        .all(|(r, g)| within_rel(r.group_delay_ps_per_mm, g, 0.05));
    let dts = [(a.plus.time_offset_ps, -2.2), (a.minus.time_offset_ps, 4.0)];
    let dt_ok = dts.iter().all(|(x, want)| (x - want).abs() <= 0.4);
    let gd_detail = rows
        .iter()
        .map(|r| format!("{:.3}", r.group_delay_ps_per_mm))
        .collect::<Vec<_>>()
        .join(", ");

    (
        outcome(w_ok, format!("FWHM {w_detail} nm")),
        outcome(
            gd_ok && dt_ok,
            format!(
                "GD {gd_detail} ps/mm; dt {:+.2}, {:+.2} ps",
                dts[0].0, dts[1].0
            ),
        ),
    )
}

fn a4() -> Outcome {
    // (wavelength, bandwidth, expected coherence time)
    let entries = [
        (BLUE_NM, 1.1, 2.5),
        (RED_NM, 0.90, 6.2),
        (BLUE_NM, 0.68, 3.9),
        (RED_NM, 1.2, 4.6),
        (RED_NM, 0.76, 7.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (l, dl, want) in entries {
        let tau = coherence_time_ps(l, dl).expect("positive bandwidth");
        let ok = (tau - want).abs() <= 0.3;
        pass &= ok;
        parts.push(format!("{tau:.2}{}", if ok { "" } else { "(x)" }));
    }
    outcome(
        pass,
        format!("tau {} ps vs 2.5, 6.2, 3.9, 4.6, 7.0", parts.join(", ")),
    )
}

fn a5() -> Outcome {
    let b = bandwidth_thz(RED_NM, 0.9);
    let brightness = brightness_from_pair_rate(5.5e5, 1.0, b).expect("valid inputs");
    outcome(
        within_rel(brightness, 3.4e6, 0.03),
        format!("{:.4e} counts/s/mW/THz over {b:.5} THz", brightness),
    )
}

fn a6() -> Outcome {
    let s = chsh_parameter(0.985);
    // V_HV is 1 in this model, so a mean visibility of 0.985 needs O = 0.97.
    let state = EntangledStateModel::balanced(0.0, 2.0 * 0.985 - 1.0).expect("valid overlap");
    let mean_v = 0.5 * (visibility(&state, Basis::HV) + visibility(&state, Basis::Diagonal));
    let four = chsh_standard_angles(&state);
    let pass = (s - 2.0 * SQRT_2 * 0.985).abs() < 1e-12
        && within_rel(s, 2.817, 0.015)
        && (mean_v - 0.985).abs() < 1e-12
        && (four - s).abs() < 1e-9;
    outcome(
        pass,
        format!(
            "S {s:.4} ({:+.2}% vs 2.817), four-angle diff {:.1e}",
            100.0 * (s / 2.817 - 1.0),
            (four - s).abs()
        ),
    )
}

fn a7() -> Outcome {
    let state =
        EntangledStateModel::new(ProcessAmplitudes::balanced(0.0), 0.971).expect("valid overlap");
    let fringe = fringe_visibility(&state, FRAC_PI_4);
    let diag = visibility(&state, Basis::Diagonal);
    let hv = visibility(&state, Basis::HV);
    let pass =
        (fringe - 0.971).abs() < 1e-9 && (diag - 0.971).abs() < 1e-9 && (hv - 1.0).abs() < 1e-9;
    outcome(
        pass,
        format!("V_diag fringe {fringe:.12}, contrast {diag:.12}, V_HV {hv:.12}"),
    )
}

fn a8(model: &DispersionModel) -> Outcome {
    let curve = match trace_curve(model, (20.0, 1000.0, 99), 50.0, &SearchSetup::default()) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("trace failed: {e}")),
    };
    let solved: Vec<_> = curve.iter().filter_map(|p| p.solution).collect();
    if solved.len() < 2 {
        return outcome(false, format!("only {} solved points", solved.len()));
    }
    let monotone = solved
        .windows(2)
        .all(|w| w[1].blue_nm > w[0].blue_nm && w[1].red_nm < w[0].red_nm);
    let close = solved.iter().find(|s| {
        (s.red_nm - s.blue_nm) < 100.0
            && (1000.0..=1200.0).contains(&s.blue_nm)
            && (1000.0..=1200.0).contains(&s.red_nm)
    });
    let detail = match close {
        Some(s) => format!(
            "{} of {} periods solved; at {:.0} um blue {:.1}, red {:.1} nm",
            solved.len(),
            curve.len(),
            s.poling_um,
            s.blue_nm,
            s.red_nm
        ),
        None => format!("{} solved, no near-degenerate point", solved.len()),
    };
    outcome(monotone && close.is_some(), detail)
}

// Property suites.

type Suite = fn(&DispersionModel) -> Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

fn sample_pair(
    model: &DispersionModel,
    sigma: f64,
    points: usize,
) -> (JointSpectrum, JointSpectrum) {
    let red = energy_conserving_idler(PUMP_NM, 902.52);
    let grid = WavelengthGrid::new(
        WavelengthAxis::centered(902.52, 3.0, points).unwrap(),
        WavelengthAxis::centered(red, 6.6, points).unwrap(),
    );
    let env = PumpEnvelope::new(PUMP_NM, sigma).unwrap();
    let spec = |m: QpmOrder, blue: Polarization| {
        ProcessSpec::new(
            Polarizations::type_ii(Polarization::H, blue),
            m,
            POLING_UM,
            10.0,
            68.88,
            PUMP_NM,
        )
        .unwrap()
    };
    (
        compute_jsa(
            &spec(QpmOrder::PLUS_ONE, Polarization::H),
            &env,
            model,
            &grid,
            1.0,
        )
        .unwrap(),
        compute_jsa(
            &spec(QpmOrder::MINUS_ONE, Polarization::V),
            &env,
            model,
            &grid,
            1.0,
        )
        .unwrap(),
    )
}

fn sinc_suite(_: &DispersionModel) -> Result<(), String> {
    check(512, (-1e5f64..1e5, 0.1f64..50.0), |(dk, len)| {
        let a = qpm_amplitude_from_mismatch(dk, len);
        let b = qpm_amplitude_from_mismatch(-dk, len);
        ensure(a.norm() <= 1.0 + 1e-15, || {
            format!("|psi| {} > 1", a.norm())
        })?;
        ensure((a.norm() - b.norm()).abs() < 1e-15, || {
            format!("odd at dk {dk}")
        })
    })?;
    let peak = qpm_amplitude_from_mismatch(0.0, 10.0).norm();
    if (peak - 1.0).abs() > 1e-15 {
        return Err(format!("peak {peak}"));
    }
    Ok(())
}

fn poling_suite(_: &DispersionModel) -> Result<(), String> {
    let order =
        (0i32..5, any::<bool>()).prop_map(|(k, neg)| if neg { -(2 * k + 1) } else { 2 * k + 1 });
    check(512, (0.5f64..2000.0, order), |(poling, m)| {
        let m = QpmOrder::new(m).unwrap();
        let back = poling_period(m.get() as f64 * grating_vector(poling), m).unwrap();
        ensure((back - poling).abs() <= 4.0 * f64::EPSILON * poling, || {
            format!("{poling} -> {back}")
        })
    })
}

fn jsi_suite(model: &DispersionModel) -> Result<(), String> {
    check(16, 0.02f64..0.3, |sigma| {
        let (plus, minus) = sample_pair(model, sigma, 48);
        for js in [&plus, &minus] {
            ensure(js.intensity().iter().all(|&v| v >= 0.0), || {
                "negative JSI".into()
            })?;
            let peak = js.intensity().iter().cloned().fold(0.0, f64::max);
            ensure((peak - 1.0).abs() < 1e-12, || format!("peak {peak}"))?;
        }
        Ok(())
    })
}

fn ridge_suite(model: &DispersionModel) -> Result<(), String> {
    check(16, 0.05f64..0.3, |sigma| {
        let (plus, _) = sample_pair(model, sigma, 64);
        let g = plus.grid();
        let limit = 5.0 * sigma / (PUMP_NM * PUMP_NM);
        let (mut off, mut total) = (0.0, 0.0);
        for (k, v) in plus.intensity().iter().enumerate() {
            let s = g.signal.value(k / g.idler.points);
            let i = g.idler.value(k % g.idler.points);
            total += v;
            if (1.0 / s + 1.0 / i - 1.0 / PUMP_NM).abs() > limit {
                off += v;
            }
        }
        ensure(off <= 1e-4 * total, || {
            format!("{off} of {total} off the ridge")
        })
    })
}

fn filter_suite(model: &DispersionModel) -> Result<(), String> {
    let (plus, _) = sample_pair(model, 0.1, 96);
    let red = energy_conserving_idler(PUMP_NM, 902.52);
    let w0 = fwhm(&marginal_spectrum(&plus, SpectrumAxis::Idler)).map_err(|e| e.to_string())?;
    let step = plus.grid().idler.step();
    check(
        24,
        (-1.5f64..1.5, 0.2f64..4.0, 0.3f64..1.0, any::<bool>()),
        |(c, w, k, rect)| {
            let shape = if rect {
                FilterShape::Rectangular
            } else {
                FilterShape::Gaussian
            };
            let wide = BandpassFilter::new(red + c, w, shape).unwrap();
            let tight = BandpassFilter::new(red + c, w * k, shape).unwrap();
            let once = apply_bandpass(&plus, &wide, SpectrumAxis::Idler).unwrap();
            let twice = apply_bandpass(&plus, &tight, SpectrumAxis::Idler).unwrap();
            ensure(once.transmitted_fraction() <= 1.0 + 1e-12, || {
                "gain above one".into()
            })?;
            ensure(
                twice.transmitted_fraction() <= once.transmitted_fraction() + 1e-12,
                || "narrower filter passed more light".into(),
            )?;
            if let Ok(w1) = fwhm(&marginal_spectrum(&once, SpectrumAxis::Idler)) {
                ensure(w1 <= w0 + step, || format!("filtered width {w1} > {w0}"))?;
            }
            Ok(())
        },
    )
}

fn amplitude_suite(model: &DispersionModel) -> Result<(), String> {
    let (plus, minus) = sample_pair(model, 0.1, 48);
    check(
        256,
        (0.0f64..3.0, 0.01f64..3.0, -3.2f64..3.2),
        |(wp, wm, theta)| {
            let amp = process_amplitudes(&plus, &minus, (wp, wm), theta).unwrap();
            let norm = amp.alpha.norm_sqr() + amp.beta.norm_sqr();
            ensure((norm - 1.0).abs() < 1e-12, || format!("norm {norm}"))
        },
    )
}

fn closure_suite(_: &DispersionModel) -> Result<(), String> {
    let angle = -3.2f64..3.2;
    check(
        512,
        (
            0.0f64..1.0,
            0.0f64..=1.0,
            angle.clone(),
            angle.clone(),
            angle,
        ),
        |(pp, o, theta, a, b)| {
            let amp = ProcessAmplitudes::from_probabilities(pp, 1.0 - pp, theta).unwrap();
            let st = EntangledStateModel::new(amp, o).unwrap();
            let p = |x, y| coincidence_probability(&st, x, y);
            let all = [
                p(a, b),
                p(a + FRAC_PI_2, b),
                p(a, b + FRAC_PI_2),
                p(a + FRAC_PI_2, b + FRAC_PI_2),
            ];
            ensure(
                all.iter().all(|v| (-1e-15..=1.0 + 1e-15).contains(v)),
                || format!("{all:?}"),
            )?;
            let sum: f64 = all.iter().sum();
            ensure((sum - 1.0).abs() < 1e-12, || format!("sum {sum}"))
        },
    )
}

fn rates_suite(_: &DispersionModel) -> Result<(), String> {
    let eff = 0.05f64..1.0;
    check(
        512,
        (1e3f64..1e8, 0.01f64..1.0, 0.01f64..1.0, eff.clone(), eff),
        |(pr, mb, mr, eb, er)| {
            let rec = CountRecord::new(
                pr * mb * eb,
                pr * mr * er,
                pr * mb * mr * eb * er,
                eb,
                er,
                PumpPower::PerMilliwatt,
            )
            .unwrap();
            let back = pair_rate(&rec).unwrap();
            ensure((back / pr - 1.0).abs() < 1e-12, || {
                format!("PR {back} vs {pr}")
            })?;
            let (b, r) = coupling_efficiencies(&rec).unwrap();
            ensure((b - mb).abs() < 1e-12 && (r - mr).abs() < 1e-12, || {
                format!("mu {b}, {r}")
            })
        },
    )
}

fn a9(model: &DispersionModel) -> Outcome {
    let suites: [(&str, Suite); 8] = [
        ("sinc", sinc_suite),
        ("poling", poling_suite),
        ("jsi", jsi_suite),
        ("ridge", ridge_suite),
        ("filter", filter_suite),
        ("amplitudes", amplitude_suite),
        ("closure", closure_suite),
        ("rates", rates_suite),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, suite) in suites {
        let start = Instant::now();
        let res = suite(model);
        let t = start.elapsed();
        let ok = res.is_ok() && t < Duration::from_secs(60);
        pass &= ok;
        match res {
            Ok(()) => parts.push(format!("{name} {:.2}s", t.as_secs_f64())),
            Err(e) => parts.push(format!("{name} FAILED ({e})")),
        }
    }
    outcome(pass, parts.join(", "))
}

fn main() {
    let model = load_crystal(None).expect("bundled crystal data");
    let (r1, sol) = a1(&model);
    let (r2, r3) = a2_a3(&model, sol.as_ref());
    let results = [
        ("A1", "configuration", r1),
        ("A2", "bandwidths", r2),
        ("A3", "group delays", r3),
        ("A4", "coherence times", a4()),
        ("A5", "brightness", a5()),
        ("A6", "CHSH", a6()),
        ("A7", "visibilities", a7()),
        ("A8", "tuning curve", a8(&model)),
        ("A9", "property suites", a9(&model)),
    ];
    let mut failed = 0;
    for (id, name, r) in &results {
        if !r.pass {
            failed += 1;
        }
        println!(
            "{id} {:<4} {name}: {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 && std::env::var_os("CDDC_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
