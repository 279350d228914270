//! Invariant suites run by `mtsim verify`.

use serde_json::json;

use quasicharge::hilbert::{jw_annihilator, pauli, Pauli, SpinRegister};
use quasicharge::leakage::{bdg_solve, Side};
use quasicharge::linalg::{eigh, DenseHermitian, SparseMatrix};
use quasicharge::model::{
    build_kitaev_fermionic, effective_two_qubit, transmon_eigenbasis, verify_frame_transform,
    ChainParams, PairingPhase, TwoQubitParams,
};
use quasicharge::C64;

use crate::experiments::{chain, grid, junction, transmon, Outcome};
use crate::output::{Cell, CsvTable};
use crate::{CliError, RunConfig};

/// One measured quantity against its tolerance; `tolerance = None` is
/// reported but not judged.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
}

impl Check {
    fn new(
        suite: &'static str,
        name: impl Into<String>,
        value: f64,
        tolerance: Option<f64>,
    ) -> Self {
        Self {
            suite,
            name: name.into(),
            value,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.tolerance.is_none_or(|t| self.value <= t)
    }
}

/// `(Π_{k<j} σᶻ_k) σ⁻_j`, or the bare `σ⁻_j` when `corrupt`.
fn annihilators(n: usize, corrupt: bool) -> Result<Vec<SparseMatrix>, CliError> {
    let reg = SpinRegister::new(n)?;
    (1..=n)
        .map(|j| {
            if corrupt {
                Ok(pauli(&reg, j, Pauli::Minus)?)
            } else {
                Ok(jw_annihilator(&reg, j)?)
            }
        })
        .collect()
}

pub fn jw_suite(max_sites: usize, corrupt: bool) -> Result<Check, CliError> {
    let mut worst: f64 = 0.0;
    for n in 1..=max_sites {
        let c = annihilators(n, corrupt)?;
        let id = SparseMatrix::identity(1 << n);
        for i in 0..n {
            for j in 0..n {
                let cc = c[i].matmul(&c[j]).add(&c[j].matmul(&c[i])).max_abs();
                let cd = c[i]
                    .matmul(&c[j].adjoint())
                    .add(&c[j].adjoint().matmul(&c[i]));
                let cd = if i == j { cd.sub(&id) } else { cd };
                worst = worst.max(cc).max(cd.max_abs());
            }
        }
    }
    Ok(Check::new(
        "jw-anticommutator",
        format!("max anticommutator deviation, up to {max_sites} sites"),
        worst,
        Some(1e-13),
    ))
}

fn frame_suite(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let cp = chain(cfg)?;
    let r = verify_frame_transform(
        &transmon(cfg)?,
        &cp,
        &junction(cfg)?,
        &grid(cfg, "frame_cutoff")?,
    )?;
    const S: &str = "frame-transform";
    Ok(vec![
        Check::new(
            S,
            "interior block deviation / max|H|",
            r.interior_deviation,
            Some(1e-10),
        ),
        Check::new(
            S,
            "padded truncation matrix deviation",
            r.padded_matrix_deviation,
            Some(1e-12),
        ),
        Check::new(
            S,
            "padded truncation spectral deviation",
            r.padded_spectral_deviation,
            Some(1e-9),
        ),
        Check::new(
            S,
            "lowest four levels, same grid",
            r.low_lying_deviation,
            None,
        ),
    ])
}

/// Deterministic low-discrepancy points in `[0, 1)`.
fn sequence(k: usize, dim: usize) -> f64 {
    let a = [
        0.618_033_988_749_895,
        0.754_877_666_246_693,
        0.569_840_290_998_053,
    ];
    ((k as f64 + 1.0) * a[dim % 3]).fract()
}

pub fn bdg_suite(sets: usize) -> Result<Vec<Check>, CliError> {
    let mut worst: f64 = 0.0;
    for k in 0..sets {
        let t = 1.0 + 19.0 * sequence(k, 0);
        let mu = (2.0 * sequence(k, 1) - 1.0) * 1.95 * t;
        let delta = 0.5 + 19.5 * sequence(k, 2);
        let cp = ChainParams::new(mu, t, delta, 2 + k % 2)?;
        let h = build_kitaev_fermionic(&cp, PairingPhase::Fixed(C64::new(1.0, 0.0)))?.to_dense();
        let exact = eigh(&DenseHermitian::new(h)?).eigenvalues;
        for side in [Side::Left, Side::Right] {
            let sol = bdg_solve(&cp, side)?;
            for (a, b) in exact.iter().zip(sol.many_body_spectrum()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let mut zero: f64 = 0.0;
    for l in 2..=12 {
        let sol = bdg_solve(&ChainParams::sweet_spot(12.0, l), Side::Right)?;
        zero = zero.max(sol.energies[0].abs() / 12.0);
    }
    Ok(vec![
        Check::new(
            "bdg-oracle",
            format!("many-body spectrum vs brute force, {sets} sets, L = 2, 3 [ueV]"),
            worst,
            Some(1e-9),
        ),
        Check::new(
            "bdg-oracle",
            "sweet-spot |eps_0| / w_F, L = 2..12",
            zero,
            Some(1e-12),
        ),
    ])
}

fn projection_suite(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let tp = transmon(cfg)?;
    let g = grid(cfg, "cutoff")?;
    let b = transmon_eigenbasis(&tp, &g)?;
    let diag = b.cos_half(0, 0).abs().max(b.cos_half(1, 1).abs());
    let eff = effective_two_qubit(&tp, &TwoQubitParams::new(0.0, 0.0, 1.0)?, (&g, &g))?;
    let a = eff.anti_diagonal;
    let spread = a.iter().map(|x| (x - a[0]).abs()).fold(0.0, f64::max);
    Ok(vec![
        Check::new(
            "projection-facts",
            "max |<psi_i|cos(phi/2)|psi_i>|, i = 0, 1",
            diag,
            Some(1e-10),
        ),
        Check::new(
            "projection-facts",
            "spread of two-qubit anti-diagonal elements",
            spread,
            Some(1e-10),
        ),
    ])
}

pub fn all_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let mut checks = vec![jw_suite(8, cfg.bool("corrupt_jw_string")?)?];
    checks.extend(frame_suite(cfg)?);
    checks.extend(bdg_suite(24)?);
    checks.extend(projection_suite(cfg)?);
    Ok(checks)
}

pub fn run_suites(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let checks = all_checks(cfg)?;
    let mut t = CsvTable::new(
        "verify",
        &["suite", "check", "value", "tolerance", "passed"],
    );
    for c in &checks {
        t.push(vec![
            c.suite.into(),
            Cell::Text(c.name.clone()),
            c.value.into(),
            c.tolerance.map_or(Cell::Text(String::new()), Cell::Num),
            c.passed().into(),
        ]);
        println!(
            "{:<18} {:<8} {:<58} {:e}",
            c.suite,
            if c.tolerance.is_none() {
                "INFO"
            } else if c.passed() {
                "PASS"
            } else {
                "FAIL"
            },
            c.name,
            c.value
        );
    }
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.suite)
        .collect();
    let frame_max = checks
        .iter()
        .filter(|c| c.suite == "frame-transform" && c.tolerance.is_some())
        .map(|c| c.value)
        .fold(0.0, f64::max);
    Ok(Outcome {
        tables: vec![t],
        diagnostics: json!({ "failed_suites": failed, "max_frame_transform_deviation": frame_max }),
        failure: (!failed.is_empty()).then(|| (1, format!("failed suites: {}", failed.join(", ")))),
    })
}
