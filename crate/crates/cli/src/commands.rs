use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use paramp_core::config::Config;
use paramp_core::model::{Architecture, JunctionSpec};
use paramp_core::ode::Tolerance;
use paramp_core::oracle::{self, Tone};
use paramp_core::pump::{self, BranchPolicy, PumpOperatingPoint};
use paramp_core::quantizer;
use paramp_core::reference;
use paramp_core::response::{self, GainCurve};
use paramp_core::units::{self, ghz_to_rad, rad_to_ghz};
use paramp_core::Amplifier;

use crate::output::{json_number, pretty, Sink, Table};
use crate::plot::{Figure, Series};
use crate::{Cli, Command, Failure, Format, Integration, Measure, Spectrum};

type Outcome<T = ()> = Result<T, Failure>;

/// Probe amplitude relative to the pump for oracle gain runs.
const ORACLE_PROBE: f64 = 1e-4;
/// Default spectrum half-width in units of kappa.
const DEFAULT_HALF_SPAN: f64 = 5.0;

pub fn run(cli: &Cli) -> Outcome {
    if cli.plot && cli.out.is_none() && !matches!(cli.command, Command::Sweep(_)) {
        return Err(Failure::Usage("--plot needs --out DIR".into()));
    }
    match &cli.command {
        Command::Modes => modes(cli),
        Command::SteadyState { delta, zeta } => steady_state(cli, *delta, *zeta),
        Command::Gain(s) => gain(cli, s),
        Command::Sweep(s) => sweep(cli, s),
        Command::P1db { oracle, integration } => p1db(cli, *oracle, integration),
        Command::Oracle { measure: Measure::Gain, spectrum, integration } => oracle_gain(cli, spectrum, integration),
        Command::Oracle { measure: Measure::P1db, integration, .. } => p1db(cli, true, integration),
        Command::Reference { table, row, column } => reference_cmd(*table, row.as_deref(), column.as_deref()),
        Command::Selfcheck => selfcheck(cli),
    }
}

fn load(cli: &Cli, what: &str) -> Outcome<Config> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Usage(format!("`{what}` needs --config PATH")))?;
    Ok(Config::load(path)?)
}

fn sink(cli: &Cli) -> Outcome<Sink> {
    Ok(Sink::new(cli.out.clone())?)
}

fn emit_table(cli: &Cli, name: &str, table: &Table, meta: Value) -> Outcome {
    let sink = sink(cli)?;
    match cli.format {
        Format::Csv => sink.emit(&format!("{name}.csv"), &table.to_csv()?)?,
        Format::Json => {
            let mut doc = table.to_json();
            doc["meta"] = meta;
            sink.emit(&format!("{name}.json"), &pretty(&doc))?
        }
    }
    Ok(())
}

fn tolerance(i: &Integration) -> Outcome<Tolerance> {
    if !(i.rtol > 0.0 && i.rtol < 1e-2) {
        return Err(Failure::Usage(format!("--rtol must be in (0, 1e-2), got {}", i.rtol)));
    }
    Ok(Tolerance { rtol: i.rtol, atol: i.rtol * 1e-2 })
}

/// Frequency grid (rad/s): the requested range or the pump +- 5 kappa.
fn grid(amp: &Amplifier, s: &Spectrum) -> Outcome<Vec<f64>> {
    if s.points < 2 {
        return Err(Failure::Usage(format!("--points must be at least 2, got {}", s.points)));
    }
    let half = DEFAULT_HALF_SPAN * amp.kappa();
    let lo = s.from.map_or(amp.pump_freq() - half, ghz_to_rad);
    let hi = s.to.map_or(amp.pump_freq() + half, ghz_to_rad);
    if !(hi > lo) {
        return Err(Failure::Usage(format!(
            "--to ({} GHz) must exceed --from ({} GHz)",
            rad_to_ghz(hi),
            rad_to_ghz(lo)
        )));
    }
    let n = s.points - 1;
    Ok((0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect())
}

fn meta(amp: &Amplifier) -> Value {
    json!({
        "architecture": amp.architecture_tag(),
        "mode_index": amp.oscillator.mode_index,
        "omega_eff_ghz": rad_to_ghz(amp.oscillator.omega_eff),
        "kappa_mhz": amp.kappa() / std::f64::consts::TAU / 1e6,
        "kerr_mhz": amp.kerr.kerr / std::f64::consts::TAU / 1e6,
        "pump_freq_ghz": rad_to_ghz(amp.pump_freq()),
        "pump_power_dbm": amp.pump_power_dbm().map(json_number),
        "delta": amp.delta,
        "zeta": amp.zeta,
    })
}

fn gain_table(curve: &GainCurve) -> Table {
    let mut t = Table::new(&["freq_ghz", "signal_gain_db", "idler_gain_db"]);
    t.rows = curve.points.iter().map(|p| vec![p.x, p.signal_gain_db, p.idler_gain_db]).collect();
    t
}

/// One polyline per comb mode plus the envelope, or signal and idler for a
/// single mode.
pub fn gain_figure(curve: &GainCurve, title: &str) -> Figure {
    let xs: Vec<f64> = curve.points.iter().map(|p| p.x).collect();
    let mut series = vec![];
    if curve.modes.is_empty() {
        series.push(Series {
            label: "signal".into(),
            class: "signal".into(),
            points: curve.points.iter().map(|p| (p.x, p.signal_gain_db)).collect(),
        });
        series.push(Series {
            label: "idler".into(),
            class: "idler".into(),
            points: curve.points.iter().map(|p| (p.x, p.idler_gain_db)).collect(),
        });
    } else {
        for m in &curve.modes {
            series.push(Series {
                label: format!("mode {} ({:.4} GHz)", m.mode_index, m.freq_ghz),
                class: "mode".into(),
                points: xs.iter().copied().zip(m.signal_gain_db.iter().copied()).collect(),
            });
        }
        series.push(Series {
            label: "envelope".into(),
            class: "envelope".into(),
            points: curve.points.iter().map(|p| (p.x, p.signal_gain_db)).collect(),
        });
    }
    Figure {
        title: title.into(),
        x_label: "frequency (GHz)".into(),
        y_label: "gain (dB)".into(),
        series,
    }
}

fn modes(cli: &Cli) -> Outcome {
    let amp = load(cli, "modes")?.build()?;
    let mut t = Table::new(&["mode_index", "freq_ghz", "rigid", "selected"]);
    for (i, w) in amp.modes.frequencies.iter().enumerate() {
        t.rows.push(vec![
            i as f64,
            rad_to_ghz(*w),
            f64::from(u8::from(amp.modes.is_rigid(i))),
            f64::from(u8::from(i == amp.oscillator.mode_index)),
        ]);
    }
    let mut m = meta(&amp);
    m["c_eff_ff"] = json!(amp.oscillator.c_eff / units::FEMTO);
    m["l_eff_ph"] = json!(amp.oscillator.l_eff / units::PICO);
    m["z_eff_ohm"] = json!(amp.oscillator.z_eff);
    m["max_residual"] = json!(amp.modes.max_residual(&amp.matrices));
    m["max_c_orthogonality"] = json!(amp.modes.max_c_orthogonality(&amp.matrices));
    emit_table(cli, "modes", &t, m)
}

fn root_json(p: &PumpOperatingPoint) -> Value {
    json!({
        "n": p.n,
        "zeta_n": p.zeta_n(),
        "phase": p.phase,
        "stability": p.stability,
        "branch": p.branch,
        "drift_eigenvalues": p.drift_eigenvalues.iter().map(|e| [e.re, e.im]).collect::<Vec<_>>(),
    })
}

fn steady_state(cli: &Cli, delta: Option<f64>, zeta: Option<f64>) -> Outcome {
    let (delta, zeta, phase, policy) = match (delta, zeta) {
        (Some(d), Some(z)) => {
            if !(d.is_finite() && z.is_finite()) {
                return Err(Failure::Usage("--delta and --zeta must be finite".into()));
            }
            (d, z, 0.0, BranchPolicy::Low)
        }
        _ => {
            let amp = load(cli, "steady-state")?.build()?;
            (amp.delta, amp.zeta, amp.spec.pump_phase, amp.spec.branch)
        }
    };
    let roots = pump::steady_state_with_phase(delta, zeta, phase);
    let selected = pump::select_branch(&roots, policy);
    let doc = json!({
        "delta": delta,
        "zeta": zeta,
        "discriminant": pump::discriminant(delta, zeta),
        "bistable": roots.len() >= 3,
        "roots": roots.iter().map(root_json).collect::<Vec<_>>(),
        "selected": selected.as_ref().ok().map(|p| p.branch),
        "diagnostic": selected.as_ref().err().map(|e| e.to_string()),
    });
    sink(cli)?.emit("steady_state.json", &pretty(&doc))?;
    Ok(())
}

fn gain(cli: &Cli, s: &Spectrum) -> Outcome {
    let amp = load(cli, "gain")?.build()?;
    let curve = amp.gain_spectrum(&grid(&amp, s)?)?;
    emit_table(cli, "gain", &gain_table(&curve), meta(&amp))?;
    if cli.plot {
        if let Some(p) = sink(cli)?.path("gain.svg") {
            gain_figure(&curve, amp.architecture_tag()).write(&p)?;
        }
    }
    Ok(())
}

struct SweepResult {
    csv: String,
    json: String,
    svg: String,
    peak_gain_db: Option<f64>,
}

fn sweep(cli: &Cli, s: &Spectrum) -> Outcome {
    let cfg = load(cli, "sweep")?;
    let plan = cfg
        .sweep
        .clone()
        .ok_or_else(|| Failure::Config("configuration has no [sweep] table".into()))?;
    let dir = cli
        .out
        .clone()
        .or_else(|| plan.out.as_ref().map(Into::into))
        .ok_or_else(|| Failure::Usage("`sweep` needs --out DIR or sweep.out".into()))?;
    let mut formats: Vec<String> = if plan.formats.is_empty() {
        vec![match cli.format {
            Format::Csv => "csv".into(),
            Format::Json => "json".into(),
        }]
    } else {
        plan.formats.clone()
    };
    if cli.plot {
        formats.push("plot".into());
    }
    if let Some(bad) = formats.iter().find(|f| !matches!(f.as_str(), "csv" | "json" | "plot")) {
        return Err(Failure::Config(format!("sweep.formats: unknown format `{bad}` (csv, json, plot)")));
    }
    let points = plan.points()?;
    // Resolve every override before computing so a bad path fails fast.
    let configs = points.iter().map(|p| cfg.with_overrides(p)).collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Result<SweepResult, Failure>> = configs
        .par_iter()
        .map(|c| {
            let amp = c.build()?;
            let curve = amp.gain_spectrum(&grid(&amp, s)?)?;
            let table = gain_table(&curve);
            let mut doc = table.to_json();
            doc["meta"] = meta(&amp);
            Ok(SweepResult {
                csv: table.to_csv()?,
                json: pretty(&doc),
                svg: gain_figure(&curve, amp.architecture_tag()).render()?,
                peak_gain_db: curve.peak().map(|p| p.signal_gain_db),
            })
        })
        .collect();
    let sink = Sink::new(Some(dir))?;
    let mut entries = vec![];
    for (k, (point, result)) in points.iter().zip(results).enumerate() {
        let stem = format!("point_{k:04}");
        let overrides: BTreeMap<&str, f64> = point.iter().map(|(p, v)| (p.as_str(), *v)).collect();
        let mut entry = json!({ "index": k, "overrides": overrides });
        match result {
            Ok(r) => {
                let mut files = vec![];
                for f in &formats {
                    let (name, body) = match f.as_str() {
                        "csv" => (format!("{stem}.csv"), &r.csv),
                        "json" => (format!("{stem}.json"), &r.json),
                        _ => (format!("{stem}.svg"), &r.svg),
                    };
                    sink.emit(&name, body)?;
                    files.push(name);
                }
                entry["files"] = json!(files);
                entry["peak_gain_db"] = r.peak_gain_db.map_or(Value::Null, json_number);
            }
            Err(f) if f.code() == 1 => return Err(f),
            Err(f) => {
                eprintln!("warning: sweep point {k}: {}", f.message());
                entry["error"] = json!(f.message());
            }
        }
        entries.push(entry);
    }
    let manifest = json!({
        "tool": format!("paramp-lab v{}", env!("CARGO_PKG_VERSION")),
        "schema": paramp_core::SCHEMA_VERSION,
        "mode": plan.mode,
        "axes": plan.axes,
        "points": entries,
    });
    sink.emit("manifest.json", &pretty(&manifest))?;
    Ok(())
}

fn p1db(cli: &Cli, with_oracle: bool, integration: &Integration) -> Outcome {
    let amp = load(cli, "p1db")?.build()?;
    let tol = tolerance(integration)?;
    let probe = amp.probe_detuning();
    let probe_freq = amp.probe_freq(probe);
    let to_dbm = |zeta: f64| amp.zeta_to_flux(zeta).map(|f| units::flux_to_dbm(f, probe_freq));
    let c = amp.compression(80.0, 161)?;
    let curve: Vec<Value> = c
        .curve
        .iter()
        .map(|p| json!({ "signal_power_dbm": to_dbm(p.signal_zeta).map_or(Value::Null, json_number), "gain_db": json_number(p.gain_db) }))
        .collect();
    let analytic = match c.p1db_zeta {
        Some(z) => Some(to_dbm(z)?),
        None => None,
    };
    let mut doc = meta(&amp);
    doc["probe_detuning"] = json!(probe);
    doc["probe_freq_ghz"] = json!(rad_to_ghz(probe_freq));
    doc["reference_gain_db"] = json_number(c.reference_gain_db);
    doc["p1db_dbm"] = analytic.map_or(Value::Null, json_number);
    doc["curve"] = json!(curve);
    if with_oracle {
        let o = amp.oracle_compression(60.0, 31, integration.periods, tol)?;
        let pump_flux = amp.zeta_to_flux(amp.zeta)?;
        let oracle_dbm = o.p1db_flux_ratio.map(|r| units::flux_to_dbm(r * pump_flux, probe_freq));
        doc["oracle_reference_gain_db"] = json_number(o.reference_gain_db);
        doc["oracle_p1db_dbm"] = oracle_dbm.map_or(Value::Null, json_number);
        doc["oracle_curve"] = json!(o
            .curve
            .iter()
            .map(|p| json!({ "signal_power_dbm": units::flux_to_dbm(p.flux_ratio * pump_flux, probe_freq), "gain_db": json_number(p.gain_db) }))
            .collect::<Vec<_>>());
        if let (Some(a), Some(b)) = (analytic, oracle_dbm) {
            doc["difference_db"] = json!(a - b);
        }
    }
    sink(cli)?.emit("p1db.json", &pretty(&doc))?;
    if analytic.is_none() {
        return Err(Failure::Numerical(format!(
            "no compression in range (pump zeta {}, probe detuning {probe})",
            amp.zeta
        )));
    }
    Ok(())
}

fn oracle_gain(cli: &Cli, s: &Spectrum, integration: &Integration) -> Outcome {
    let amp = load(cli, "oracle")?.build()?;
    if let Architecture::ModifiedBjpa(_) = amp.spec.architecture {
        return Err(Failure::Usage("`oracle` integrates a single mode; modified_bjpa combs are not supported".into()));
    }
    let tol = tolerance(integration)?;
    let op = amp.operating_point()?;
    let params = amp.oracle_params();
    let pump_tone = Tone::pump(amp.spec.pump_phase);
    let detunings: Vec<(f64, f64)> = grid(&amp, s)?
        .into_iter()
        .map(|w| (w, (w - amp.pump_freq()) / amp.kappa()))
        .filter(|(_, d)| d.abs() > 1e-6)
        .collect();
    let rows = detunings
        .par_iter()
        .map(|&(w, d)| {
            let probe = Tone { amplitude: ORACLE_PROBE, detuning: d, phase: 0.0 };
            let o = oracle::probe_gain(params, pump_tone, probe, integration.periods, tol)?;
            let a = response::scattering(&op, d)?;
            Ok(vec![rad_to_ghz(w), o.signal_gain_db(), o.idler_gain_db(), a.signal_gain_db(), a.idler_gain_db()])
        })
        .collect::<Result<Vec<_>, paramp_core::Error>>()?;
    let mut t = Table::new(&["freq_ghz", "signal_gain_db", "idler_gain_db", "analytic_signal_gain_db", "analytic_idler_gain_db"]);
    t.rows = rows;
    emit_table(cli, "oracle_gain", &t, meta(&amp))
}

fn reference_cmd(number: u32, row: Option<&str>, column: Option<&str>) -> Outcome {
    let usage = |e: paramp_core::Error| Failure::Usage(e.to_string());
    let table = reference::table(number).map_err(usage)?;
    let text = match (row, column) {
        (Some(r), Some(c)) => format!("{}\n", table.cell(r, c).map_err(usage)?),
        (Some(k), None) | (None, Some(k)) => {
            let pairs = table.device_row(k).or_else(|_| table.parameter_row(k)).map_err(usage)?;
            pairs.iter().map(|(a, b)| format!("{a}\t{b}\n")).collect()
        }
        (None, None) => {
            let mut s = format!("{}\nParameter\t{}\n", table.caption, table.columns.join("\t"));
            for (p, cells) in table.rows {
                s.push_str(&format!("{p}\t{}\n", cells.join("\t")));
            }
            s
        }
    };
    print!("{text}");
    Ok(())
}

struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
}

fn selfcheck(cli: &Cli) -> Outcome {
    let mut checks = vec![];
    let mut symplectic: f64 = 0.0;
    let mut single_jj: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let mut identity: f64 = 0.0;
    for i in 0..=24 {
        for j in 0..=20 {
            let (delta, zeta) = (-3.0 + 0.25 * i as f64, -1.0 + 0.1 * j as f64);
            for op in pump::steady_state(delta, zeta) {
                let n = op.n;
                let scale = zeta * zeta * n.powi(3) + 2.0 * (delta * zeta).abs() * n * n + (delta * delta + 0.25) * n + 1.0;
                residual = residual.max(pump::cubic_residual(delta, zeta, n).abs() / scale);
                if !op.is_stable() {
                    continue;
                }
                for k in 0..=10 {
                    let probe = -2.5 + 0.5 * k as f64;
                    if let Ok(s) = response::scattering(&op, probe) {
                        symplectic = symplectic.max(s.symplectic_defect());
                    }
                    let (frame, omega) = response::equivalent_frame(&op, probe, 1e8);
                    if let Ok(s) = response::single_jj_scattering(&frame, 1e8, omega) {
                        single_jj = single_jj.max(s.symplectic_defect());
                    }
                }
            }
            if zeta == 0.0 {
                for op in pump::steady_state(delta, 0.0) {
                    for k in 0..=10 {
                        let s = response::scattering(&op, -2.5 + 0.5 * k as f64)?;
                        identity = identity.max((s.s11().norm() - 1.0).abs());
                    }
                }
            }
        }
    }
    checks.push(Check { name: "symplectic identity (normalized)", value: symplectic, limit: 1e-9 });
    checks.push(Check { name: "symplectic identity (single junction)", value: single_jj, limit: 1e-9 });
    checks.push(Check { name: "pump cubic residual", value: residual, limit: 1e-9 });
    checks.push(Check { name: "pump-off unit reflection", value: identity, limit: 1e-12 });

    let mut circuits = vec![];
    for n in [8, 256] {
        circuits.push(Architecture::SeriesArray {
            n,
            junction: JunctionSpec::from_circuit(0.3e-9, 40e-15),
            c_ground: 0.15e-15,
            c_out: 30e-15,
        });
    }
    if cli.config.is_some() {
        circuits.push(load(cli, "selfcheck")?.architecture.to_architecture()?);
    }
    let (mut eig, mut orth): (f64, f64) = (0.0, 0.0);
    for arch in &circuits {
        let m = quantizer::build_matrices(arch)?;
        let modes = quantizer::solve_modes(&m)?;
        eig = eig.max(modes.max_residual(&m));
        orth = orth.max(modes.max_c_orthogonality(&m));
    }
    checks.push(Check { name: "eigen residual", value: eig, limit: 1e-10 });
    checks.push(Check { name: "C-orthogonality", value: orth, limit: 1e-9 });

    let mut failed = vec![];
    for c in &checks {
        let ok = c.value <= c.limit;
        println!("{} {:<40} {:.3e} (limit {:.0e})", if ok { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
        if !ok {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!("selfcheck failed: {}", failed.join(", "))))
    }
}
