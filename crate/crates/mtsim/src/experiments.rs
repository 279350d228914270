//! The experiments behind each `mtsim` subcommand.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Value};

use quasicharge::dynamics::{
    concurrence_pure, evolve_noisy, evolve_unitary, oscillation_period, prepare_initial,
    rk4_step_cap, rx_gate, rxx_gate, time_grid, two_qubit_transfer, GateOptions, Observables,
    PulseSchedule, SimulationTrace,
};
use quasicharge::hilbert::{jw_ladder, Chain, ChargeGrid, SpinRegister};
use quasicharge::leakage::{leakage_point, scan_chain, NoiseSpectrum};
use quasicharge::linalg::{eigh, DenseHermitian, DenseMatrix, DensePropagator, Rk4Options};
use quasicharge::model::{
    bloch_bands, build_two_qubit, effective_two_qubit, junction_effective_spectrum,
    kitaev_on_register, transmon_eigenbasis, ChainParams, ChargeOffset, EffectiveModel,
    JunctionParams, MtModel, TransmonParams, TwoQubitParams,
};
use quasicharge::{C64, HBAR_UEV_NS};

use crate::output::{Cell, CsvTable};
use crate::{CliError, RunConfig};

/// Tables and diagnostics of one run. `failure` carries an exit code and a
/// message when the run completed but did not meet its own checks.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub tables: Vec<CsvTable>,
    pub diagnostics: Value,
    pub failure: Option<(i32, String)>,
}

impl Outcome {
    fn ok(tables: Vec<CsvTable>, diagnostics: Value) -> Self {
        Self {
            tables,
            diagnostics,
            failure: None,
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.experiment.as_str() {
        "bands" => bands(cfg),
        "junction-spectrum" => junction_spectrum(cfg),
        "rabi" => rabi(cfg),
        "gate" => gate(cfg),
        "leakage" => leakage(cfg),
        "two-qubit" => two_qubit(cfg),
        "verify" => crate::verify::run_suites(cfg),
        other => Err(CliError::Config {
            line: None,
            key: "experiment".into(),
            msg: format!("unknown experiment `{other}`"),
        }),
    }
}

pub fn transmon(cfg: &RunConfig) -> Result<TransmonParams, CliError> {
    Ok(TransmonParams::new(
        cfg.f64("e_c")?,
        cfg.f64("e_j")?,
        cfg.f64("n_g")?,
    )?)
}

pub fn chain(cfg: &RunConfig) -> Result<ChainParams, CliError> {
    let w_f = cfg.f64("w_f")?;
    Ok(ChainParams::new(
        cfg.f64("mu")?,
        cfg.f64_or_auto("t_hop")?.unwrap_or(w_f),
        cfg.f64_or_auto("delta")?.unwrap_or(w_f),
        cfg.usize("length")?,
    )?)
}

pub fn junction(cfg: &RunConfig) -> Result<JunctionParams, CliError> {
    Ok(JunctionParams::new(cfg.f64("w")?, cfg.f64("w_f")?)?)
}

pub fn grid(cfg: &RunConfig, key: &str) -> Result<ChargeGrid, CliError> {
    ChargeGrid::new(cfg.f64(key)?).map_err(|e| CliError::Config {
        line: None,
        key: key.into(),
        msg: e.to_string(),
    })
}

fn offset(cfg: &RunConfig) -> ChargeOffset {
    match cfg.raw("charge_offset") {
        "included" => ChargeOffset::Included,
        _ => ChargeOffset::Omitted,
    }
}

fn label(x: f64) -> String {
    format!("{x:?}").replace('-', "m")
}

fn bands(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let e_j = cfg.f64("e_j")?;
    let n = cfg.usize("kappa_points")?.max(2);
    let kappas: Vec<f64> = (0..n).map(|k| -0.5 + k as f64 / (n - 1) as f64).collect();
    let cutoff = cfg.usize("band_cutoff")?;
    let ratios = cfg.f64_list("ej_over_ec")?;
    let results: Vec<_> = ratios
        .par_iter()
        .map(|&r| -> Result<_, CliError> {
            let tp = TransmonParams::new(e_j / r, e_j, 0.0)?;
            Ok((r, bloch_bands(&tp, &kappas, cutoff)?))
        })
        .collect::<Result<_, _>>()?;
    let mut tables = Vec::new();
    let mut diag = Vec::new();
    for (r, pts) in results {
        let mut t = CsvTable::new(
            format!("bands_ratio_{}", label(r)),
            &["kappa [2e]", "E0 [ueV]", "E1 [ueV]"],
        );
        for p in &pts {
            t.push(vec![p.kappa.into(), p.e0.into(), p.e1.into()]);
        }
        let e0: Vec<f64> = pts.iter().map(|p| p.e0).collect();
        let width = e0.iter().cloned().fold(f64::MIN, f64::max)
            - e0.iter().cloned().fold(f64::MAX, f64::min);
        diag.push(json!({ "ej_over_ec": r, "lower_band_width_ueV": width }));
        tables.push(t);
    }
    Ok(Outcome::ok(tables, json!({ "bands": diag })))
}

/// Lowest two even-parity levels of the two chains joined at phase `θ`,
/// relative to the decoupled ground energy.
fn junction_levels(cp: &ChainParams, w: f64, thetas: &[f64]) -> Result<Vec<(f64, f64)>, CliError> {
    let l = cp.length;
    let reg = SpinRegister::junction(l)?;
    let one = C64::new(1.0, 0.0);
    let chains =
        kitaev_on_register(cp, &reg, 1, one)?.add(&kitaev_on_register(cp, &reg, l + 1, one)?);
    let b = jw_ladder(&reg, l, Chain::Left, l)?;
    let a = jw_ladder(&reg, 1, Chain::Right, l)?;
    let hop = b.adjoint().matmul(&a);
    let even: Vec<usize> = (0..reg.dim()).filter(|s| s.count_ones() % 2 == 0).collect();
    let block = |h: &quasicharge::linalg::SparseMatrix| -> Result<Vec<f64>, CliError> {
        let d = DenseMatrix::from_fn(even.len(), even.len(), |i, j| h.get(even[i], even[j]));
        Ok(eigh(&DenseHermitian::new(d)?).eigenvalues)
    };
    let e_ref = block(&chains)?[0];
    thetas
        .iter()
        .map(|&t| {
            let phase = C64::from_polar(1.0, -t / 2.0);
            let tun = hop.scale(phase);
            let h = chains.sub(&tun.add(&tun.adjoint()).scale_real(w));
            let ev = block(&h)?;
            Ok((ev[0] - e_ref, ev[1] - e_ref))
        })
        .collect()
}

fn junction_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.usize("theta_points")?.max(2);
    let thetas: Vec<f64> = (0..n)
        .map(|k| 4.0 * PI * k as f64 / (n - 1) as f64)
        .collect();
    let w = cfg.f64("w")?;
    let cp = chain(cfg)?;
    if 2 * cp.length > 12 {
        return Err(CliError::Guard {
            guard: "dimension",
            msg: format!("junction spectrum needs 2L <= 12 spins, L = {}", cp.length),
        });
    }
    let br = junction_effective_spectrum(w, &thetas);
    let full = junction_levels(&cp, w, &thetas)?;
    let mut t = CsvTable::new(
        "junction_spectrum",
        &[
            "theta [rad]",
            "E_occupied [ueV]",
            "E_empty [ueV]",
            "E_full_lower [ueV]",
            "E_full_upper [ueV]",
        ],
    );
    let mut dev: f64 = 0.0;
    for k in 0..n {
        t.push(vec![
            thetas[k].into(),
            br.occupied[k].into(),
            br.empty[k].into(),
            full[k].0.into(),
            full[k].1.into(),
        ]);
        let (lo, hi) = br.spectrum()[k];
        dev = dev.max((lo - full[k].0).abs()).max((hi - full[k].1).abs());
    }
    Ok(Outcome::ok(
        vec![t],
        json!({ "max_deviation_full_vs_effective_ueV": dev, "w_over_w_f": w / cfg.f64("w_f")? }),
    ))
}

fn single_model(cfg: &RunConfig, cutoff_key: &str) -> Result<MtModel, CliError> {
    Ok(MtModel::new(
        transmon(cfg)?,
        chain(cfg)?,
        junction(cfg)?,
        grid(cfg, cutoff_key)?,
        offset(cfg),
    )?)
}

fn cutoff_rerun(
    cfg: &RunConfig,
    tp: &TransmonParams,
    g: &ChargeGrid,
    w: f64,
) -> Result<Value, CliError> {
    if !cfg.bool("cutoff_check")? {
        return Ok(Value::Null);
    }
    let base = transmon_eigenbasis(tp, g)?;
    let wider = transmon_eigenbasis(tp, &ChargeGrid::new(g.cutoff() + 1.0)?)?;
    let period = |c10: f64| 2.0 * PI / (w * c10) * HBAR_UEV_NS;
    Ok(json!({
        "cutoff": g.cutoff(),
        "rerun_cutoff": g.cutoff() + 1.0,
        "c10_delta": wider.c10() - base.c10(),
        "e01_delta_ueV": wider.e01() - base.e01(),
        "rabi_period_delta_ns": period(wider.c10()) - period(base.c10()),
    }))
}

fn rabi_table(alpha: f64, tr: &SimulationTrace) -> CsvTable {
    let mut t = CsvTable::new(
        format!("rabi_alpha_{}", label(alpha)),
        &["t [ns]", "P0", "P1", "purity", "occupation"],
    );
    for k in 0..tr.len() {
        t.push(vec![
            (tr.times[k] * HBAR_UEV_NS).into(),
            tr.p0[k].into(),
            tr.p1[k].into(),
            tr.purity[k].into(),
            tr.occupation[k].into(),
        ]);
    }
    t
}

fn rabi(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = single_model(cfg, "cutoff")?;
    let w = cfg.f64("w")?;
    let eff = EffectiveModel::new(m.basis.e01(), m.basis.c10(), w);
    let t_r = eff.rabi_period();
    let t0 = cfg.f64("t_start_ns")? / HBAR_UEV_NS;
    let t1 = cfg
        .f64_or_auto("t_end_ns")?
        .map_or(t0 + 2.0 * t_r, |t| t / HBAR_UEV_NS);
    if t1 <= t0 {
        return Err(CliError::Config {
            line: None,
            key: "t_end_ns".into(),
            msg: "must exceed t_start_ns".into(),
        });
    }
    let grid_t = time_grid(t0, t1, cfg.usize("points")?);
    let obs = Observables::for_model(&m)?;
    let psi = prepare_initial(&m.basis, 0, m.chain.length)?;
    let alphas = cfg.f64_list("alpha")?;
    let traces: Vec<(f64, SimulationTrace)> = alphas
        .par_iter()
        .map(|&a| -> Result<_, CliError> {
            let tr = if a == 0.0 {
                evolve_unitary(&m.hamiltonian, &obs, &psi, &grid_t)?
            } else {
                let opts = Rk4Options {
                    max_dt: Some(rk4_step_cap(&m.hamiltonian, t1 - t0)),
                    ..Rk4Options::default()
                };
                evolve_noisy(
                    &m.hamiltonian,
                    &m.noise,
                    a,
                    &DenseMatrix::outer(&psi),
                    &grid_t,
                    &obs,
                    &opts,
                )?
            };
            Ok((a, tr))
        })
        .collect::<Result<_, _>>()?;
    let mut tables = Vec::new();
    let mut per_alpha = Vec::new();
    for (a, tr) in &traces {
        let first: Vec<usize> = (0..tr.len()).filter(|&k| tr.times[k] - t0 <= t_r).collect();
        let min_sum = first
            .iter()
            .map(|&k| tr.p0[k] + tr.p1[k])
            .fold(f64::MAX, f64::min);
        let min_purity = tr.purity.iter().cloned().fold(f64::MAX, f64::min);
        per_alpha.push(json!({
            "alpha": a,
            "measured_period_ns": oscillation_period(&tr.times, &tr.p0).map(|p| p * HBAR_UEV_NS),
            "min_p0_plus_p1_first_cycle": min_sum,
            "min_transmon_purity": min_purity,
            "p0_after_one_period": interpolate(&tr.times, &tr.p0, t0 + t_r),
        }));
        tables.push(rabi_table(*a, tr));
    }
    Ok(Outcome::ok(
        tables,
        json!({
            "dimension": m.space.dim(),
            "c10": m.basis.c10(),
            "e01_ueV": m.basis.e01(),
            "predicted_period_ns": t_r * HBAR_UEV_NS,
            "runs": per_alpha,
            "cutoff_rerun": cutoff_rerun(cfg, &m.transmon, &m.grid, w)?,
        }),
    ))
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> Option<f64> {
    let k = x.partition_point(|&v| v <= at);
    if k == 0 || k >= x.len() {
        return (k > 0 && (x[k - 1] - at).abs() < 1e-12).then(|| y[k - 1]);
    }
    let f = (at - x[k - 1]) / (x[k] - x[k - 1]);
    Some(y[k - 1] + f * (y[k] - y[k - 1]))
}

fn gate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = single_model(cfg, "cutoff")?;
    let w = cfg.f64("w")?;
    let t_r = EffectiveModel::new(m.basis.e01(), m.basis.c10(), w).rabi_period();
    let duration = cfg.f64("gate_periods")? * t_r;
    let sched = PulseSchedule::constant(duration, w)?;
    let opts = GateOptions {
        check_convergence: cfg.bool("check_convergence")?,
        ..GateOptions::default()
    };
    let alphas = cfg.f64_list("alpha")?;
    let results: Vec<_> = alphas
        .par_iter()
        .map(|&a| -> Result<_, CliError> { Ok((a, rx_gate(&m, &sched, a, &opts)?)) })
        .collect::<Result<_, _>>()?;
    let mut t = CsvTable::new(
        "gate",
        &[
            "alpha [1/ueV]",
            "duration [ns]",
            "fidelity",
            "P0",
            "P1",
            "target_angle [rad]",
            "achieved_angle [rad]",
            "rk4_halving_delta",
            "max_dt [ns]",
        ],
    );
    let mut failure = None;
    for (a, r) in &results {
        t.push(vec![
            (*a).into(),
            (duration * HBAR_UEV_NS).into(),
            r.fidelity.into(),
            r.p0.into(),
            r.p1.into(),
            r.target_angle.into(),
            r.achieved_angle.into(),
            r.convergence.map_or(Cell::Text(String::new()), Cell::Num),
            (r.max_dt * HBAR_UEV_NS).into(),
        ]);
        if !r.converged() {
            failure = Some((
                4,
                format!(
                    "RK4 step halving changed the fidelity by {:e} at alpha = {a}",
                    r.convergence.unwrap_or(f64::NAN)
                ),
            ));
        }
    }
    let zeeman = results.first().map(|(_, r)| r.zeeman_kept);
    Ok(Outcome {
        tables: vec![t],
        diagnostics: json!({
            "dimension": m.space.dim(),
            "rabi_period_ns": t_r * HBAR_UEV_NS,
            "zeeman_term_in_target": zeeman,
            "cutoff_rerun": cutoff_rerun(cfg, &m.transmon, &m.grid, w)?,
        }),
        failure,
    })
}

fn noise_spectra(cfg: &RunConfig) -> Result<Vec<(Option<f64>, NoiseSpectrum)>, CliError> {
    let noise = cfg.raw("noise");
    if noise == "white" {
        return cfg
            .f64_list("alpha")?
            .into_iter()
            .filter(|&a| a > 0.0)
            .map(|a| Ok((Some(a), NoiseSpectrum::white_from_alpha(a)?)))
            .collect();
    }
    let text = std::fs::read_to_string(noise).map_err(|e| CliError::Config {
        line: None,
        key: "noise".into(),
        msg: format!("cannot read {noise}: {e}"),
    })?;
    let (mut om, mut s) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let parts: Vec<f64> = body
            .split([',', ' ', '\t'])
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config {
                line: Some(i + 1),
                key: "noise".into(),
                msg: format!("expected `omega, S` in {noise}"),
            })?;
        if parts.len() != 2 {
            return Err(CliError::Config {
                line: Some(i + 1),
                key: "noise".into(),
                msg: format!("expected two columns in {noise}"),
            });
        }
        om.push(parts[0]);
        s.push(parts[1]);
    }
    Ok(vec![(None, NoiseSpectrum::tabulated(om, s)?)])
}

fn leakage(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let basis = transmon_eigenbasis(&transmon(cfg)?, &grid(cfg, "leakage_cutoff")?)?;
    let lengths = cfg.usize_list("lengths")?;
    let detunings = cfg.pair_list("detunings")?;
    let f_max = cfg.usize("f_max")?;
    let spectra = noise_spectra(cfg)?;
    if spectra.is_empty() {
        return Err(CliError::Config {
            line: None,
            key: "alpha".into(),
            msg: "leakage needs a positive alpha or a noise table".into(),
        });
    }
    let mut jobs = Vec::new();
    for (a, s) in &spectra {
        for &(mu, w_f) in &detunings {
            for &l in &lengths {
                jobs.push((*a, s, mu, w_f, l));
            }
        }
    }
    let rows: Vec<_> = jobs
        .par_iter()
        .map(|&(a, s, mu, w_f, l)| -> Result<_, CliError> {
            let cp = scan_chain(mu, w_f, l)?;
            Ok((a, leakage_point(&basis, &cp, s, f_max)?))
        })
        .collect::<Result<_, _>>()?;
    let mut t = CsvTable::new(
        "leakage",
        &[
            "alpha [1/ueV]",
            "mu [ueV]",
            "w_F [ueV]",
            "L",
            "Gamma0 [ueV/hbar]",
            "Gamma0 [1/ns]",
            "trusted",
            "f_max",
            "f_residual",
        ],
    );
    let mut failure = None;
    let mut residual: f64 = 0.0;
    for (a, r) in &rows {
        t.push(vec![
            a.map_or(Cell::Text("table".into()), Cell::Num),
            r.mu.into(),
            r.w_f.into(),
            r.length.into(),
            r.gamma.into(),
            (r.gamma / HBAR_UEV_NS).into(),
            (!r.untrusted).into(),
            r.f_max.into(),
            r.residual.into(),
        ]);
        residual = residual.max(r.residual);
        if !r.converged {
            failure = Some((
                4,
                format!(
                    "transmon sum not converged at L = {}, mu = {}: residual {:e}",
                    r.length, r.mu, r.residual
                ),
            ));
        }
    }
    let mut plateaus = Vec::new();
    for (a, _) in &spectra {
        for &(mu, w_f) in &detunings {
            let g: Vec<f64> = rows
                .iter()
                .filter(|(x, r)| x == a && r.mu == mu && r.w_f == w_f && r.length >= 5)
                .map(|(_, r)| r.gamma)
                .collect();
            if g.len() > 1 {
                let lo = g.iter().cloned().fold(f64::MAX, f64::min);
                let hi = g.iter().cloned().fold(f64::MIN, f64::max);
                plateaus.push(json!({ "alpha": a, "mu": mu, "w_f": w_f, "relative_variation_L_ge_5": (hi - lo) / lo }));
            }
        }
    }
    Ok(Outcome {
        tables: vec![t],
        diagnostics: json!({ "max_f_residual": residual, "plateaus": plateaus, "transmon_cutoff": basis.grid().cutoff() }),
        failure,
    })
}

fn two_qubit(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let tp = transmon(cfg)?;
    let tq = TwoQubitParams::new(cfg.f64("w1")?, cfg.f64("w2")?, cfg.f64("w12")?)?;
    let g = grid(cfg, "cutoff")?;
    let eff = effective_two_qubit(&tp, &tq, (&g, &g))?;
    if tq.w12 == 0.0 || eff.c2 == 0.0 {
        return Err(CliError::Config {
            line: None,
            key: "w12".into(),
            msg: "two-qubit run needs a non-zero coupling".into(),
        });
    }
    let t_xx = 2.0 * PI / (tq.w12 * eff.c2.abs());
    let n = cfg.usize("points")?;
    let times = time_grid(0.0, t_xx, n);
    let prop = DensePropagator::new(&DenseHermitian::new(eff.hamiltonian.clone())?);
    let zero = C64::new(0.0, 0.0);
    let start = [C64::new(1.0, 0.0), zero, zero, zero];
    let mut t = CsvTable::new(
        "two_qubit_projected",
        &["t [ns]", "P00", "P01", "P10", "P11", "concurrence"],
    );
    for &time in &times {
        let v = prop.apply(&start, time)?;
        let psi = [v[0], v[1], v[2], v[3]];
        t.push(vec![
            (time * HBAR_UEV_NS).into(),
            v[0].norm_sqr().into(),
            v[1].norm_sqr().into(),
            v[2].norm_sqr().into(),
            v[3].norm_sqr().into(),
            concurrence_pure(&psi).into(),
        ]);
    }
    let quarter = PulseSchedule::constant((PI / 4.0) / (eff.c2.abs() / 2.0 * tq.w12), tq.w12)?;
    let (_, c_quarter) = rxx_gate(&eff, &quarter, &start);
    let mut tables = vec![t];
    let mut full = Value::Null;
    if cfg.bool("full_model")? {
        let g2 = grid(cfg, "two_qubit_cutoff")?;
        let model = build_two_qubit(&tp, &chain(cfg)?, &tq, (&g2, &g2), offset(cfg))?;
        let b = transmon_eigenbasis(&tp, &g2)?;
        let eff2 = effective_two_qubit(&tp, &tq, (&g2, &g2))?;
        let t_pred = 2.0 * PI / (tq.w12 * eff2.c2.abs());
        let ft = time_grid(0.0, 1.5 * t_pred, n.min(121));
        let tr = two_qubit_transfer(&model, &b, &b, &ft)?;
        let mut tf = CsvTable::new("two_qubit_full", &["t [ns]", "P00", "P11", "norm"]);
        for k in 0..ft.len() {
            tf.push(vec![
                (ft[k] * HBAR_UEV_NS).into(),
                tr.p00[k].into(),
                tr.p11[k].into(),
                tr.norm[k].into(),
            ]);
        }
        tables.push(tf);
        full = json!({
            "dimension": model.space.dim(),
            "cutoff": g2.cutoff(),
            "predicted_transfer_period_ns": t_pred * HBAR_UEV_NS,
            "measured_transfer_period_ns": oscillation_period(&tr.times, &tr.p00).map(|p| p * HBAR_UEV_NS),
            "max_p11": tr.p11.iter().cloned().fold(0.0, f64::max),
        });
    }
    Ok(Outcome::ok(
        tables,
        json!({
            "c2": eff.c2,
            "anti_diagonal": eff.anti_diagonal,
            "xx_period_ns": t_xx * HBAR_UEV_NS,
            "rxx_quarter_concurrence": c_quarter,
            "full_model": full,
        }),
    ))
}
