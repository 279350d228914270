use super::ModelError;

fn check(name: &'static str, value: f64, ok: bool) -> Result<(), ModelError> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value })
    }
}

/// Cooper-pair box: `E_C (n - n_g)² - E_J cos φ`, energies in μeV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonParams {
    pub e_c: f64,
    pub e_j: f64,
    pub n_g: f64,
}

impl TransmonParams {
    pub fn new(e_c: f64, e_j: f64, n_g: f64) -> Result<Self, ModelError> {
        check("e_c", e_c, e_c > 0.0)?;
        check("e_j", e_j, e_j >= 0.0)?;
        check("n_g", n_g, true)?;
        Ok(Self { e_c, e_j, n_g })
    }

    /// `E_J = 1 μeV`, `E_J/E_C = 200`, `n_g = 0`.
    pub fn reference() -> Self {
        Self {
            e_c: 0.005,
            e_j: 1.0,
            n_g: 0.0,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.e_j / self.e_c
    }
}

/// Kitaev chain of `length` sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub mu: f64,
    pub t_hop: f64,
    pub delta_abs: f64,
    pub length: usize,
}

impl ChainParams {
    pub fn new(mu: f64, t_hop: f64, delta_abs: f64, length: usize) -> Result<Self, ModelError> {
        check("mu", mu, true)?;
        check("t_hop", t_hop, t_hop >= 0.0)?;
        check("delta_abs", delta_abs, delta_abs >= 0.0)?;
        check("length", length as f64, length >= 2)?;
        Ok(Self {
            mu,
            t_hop,
            delta_abs,
            length,
        })
    }

    /// `μ = 0`, `t = |Δ| = w_F`.
    pub fn sweet_spot(w_f: f64, length: usize) -> Self {
        Self {
            mu: 0.0,
            t_hop: w_f,
            delta_abs: w_f,
            length,
        }
    }

    pub fn is_topological(&self) -> bool {
        self.mu.abs() < 2.0 * self.t_hop
    }

    pub fn is_sweet_spot(&self) -> bool {
        self.mu == 0.0 && self.t_hop == self.delta_abs
    }

    pub fn with_length(self, length: usize) -> Self {
        Self { length, ..self }
    }
}

/// Single-electron tunneling `w` across the junction and the sweet-spot chain
/// coupling `w_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionParams {
    pub w: f64,
    pub w_f: f64,
}

impl JunctionParams {
    pub fn new(w: f64, w_f: f64) -> Result<Self, ModelError> {
        check("w", w, w >= 0.0)?;
        check("w_f", w_f, w_f >= 0.0)?;
        Ok(Self { w, w_f })
    }

    /// `w = 3 μeV`, `w_F = 12 μeV`.
    pub fn reference() -> Self {
        Self { w: 3.0, w_f: 12.0 }
    }

    pub fn with_w(self, w: f64) -> Self {
        Self { w, ..self }
    }
}

/// Tunneling amplitudes of the two-qubit device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitParams {
    pub w1: f64,
    pub w2: f64,
    pub w12: f64,
}

impl TwoQubitParams {
    pub fn new(w1: f64, w2: f64, w12: f64) -> Result<Self, ModelError> {
        check("w1", w1, w1 >= 0.0)?;
        check("w2", w2, w2 >= 0.0)?;
        check("w12", w12, w12 >= 0.0)?;
        Ok(Self { w1, w2, w12 })
    }
}

/// Whether the rotated-frame transmon term keeps the island-chain charge,
/// `E_C(n - N/2)²`, or drops it, `E_C n²`.
///
/// The exact image of the original frame needs `Included`; the decoupled
/// model in which `|ψ̃_i⟩ ⊗ |Ω⟩` is stationary at `w = 0` is `Omitted`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChargeOffset {
    #[default]
    Omitted,
    Included,
}
