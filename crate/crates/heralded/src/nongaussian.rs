//! Closed-form effective gains for non-Gaussian states where the mean field
//! can move *against* the filter.
//!
//! For Gaussian states the filter g^n̂ always shifts the mean field in the
//! direction of g. Not so in general: for superpositions of a few Fock
//! states, mixtures of coherent states, and photon-added coherent states the
//! effective gain G_eff = Ã/A can drop below 1 under amplification, exceed 1
//! under attenuation, vanish, or become complex. This module provides the
//! closed forms for those families; every formula is cross-checked against
//! the brute-force filter in [`crate::fock`] by the test and verify suites.
//!
//! Parameters of the example families are real, matching the regime where
//! the closed forms stay elementary; the Fock oracle covers complex inputs.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockDensityMatrix, FockState, TOL_NORM, TOL_TAIL};

/// Inputs with |A| below this are treated as zero-mean-field, where a gain
/// ratio Ã/A is undefined.
pub const ZERO_AMPLITUDE: f64 = 1e-12;

/// Superposition c₀|0⟩ + c₁|1⟩ with real c₁ ∈ [0,1] and c₀ = √(1−c₁²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psi1Params {
    pub c1: f64,
}

impl Psi1Params {
    pub fn new(c1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c1) {
            return Err(Error::InvalidArgument(format!(
                "single-photon amplitude must lie in [0,1], got {c1}"
            )));
        }
        Ok(Self { c1 })
    }

    /// Vacuum amplitude c₀ = √(1−c₁²).
    pub fn c0(&self) -> f64 {
        (1.0 - self.c1 * self.c1).max(0.0).sqrt()
    }

    /// The state c₀|0⟩ + c₁|1⟩ embedded at the given cutoff.
    pub fn state(&self, cutoff: usize) -> Result<FockState> {
        let mut amps = vec![Complex64::ZERO; cutoff + 1];
        amps[0] = Complex64::from(self.c0());
        if cutoff >= 1 {
            amps[1] = Complex64::from(self.c1);
        }
        FockState::from_amplitudes(&amps)
    }
}

/// Superposition c₀|0⟩ + c₁|1⟩ + c₂|2⟩ with real, normalized amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psi2Params {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Psi2Params {
    pub fn new(c0: f64, c1: f64, c2: f64) -> Result<Self> {
        let norm = c0 * c0 + c1 * c1 + c2 * c2;
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::InvalidArgument(format!(
                "amplitudes must be normalized: c₀²+c₁²+c₂² = {norm}"
            )));
        }
        Ok(Self { c0, c1, c2 })
    }

    /// Input mean field A₂ = c₁(c₀ + √2 c₂).
    pub fn mean_field(&self) -> f64 {
        self.c1 * (self.c0 + std::f64::consts::SQRT_2 * self.c2)
    }

    /// The three-level state embedded at the given cutoff.
    pub fn state(&self, cutoff: usize) -> Result<FockState> {
        if cutoff < 2 {
            return Err(Error::InvalidArgument(format!(
                "cutoff {cutoff} cannot hold a two-photon amplitude"
            )));
        }
        let mut amps = vec![Complex64::ZERO; cutoff + 1];
        amps[0] = Complex64::from(self.c0);
        amps[1] = Complex64::from(self.c1);
        amps[2] = Complex64::from(self.c2);
        FockState::from_amplitudes(&amps)
    }
}

/// Binary mixture p|α⟩⟨α| + (1−p)|β⟩⟨β| of two coherent states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub p: f64,
}

impl MixtureParams {
    pub fn new(alpha: Complex64, beta: Complex64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "mixture weight must lie in [0,1], got {p}"
            )));
        }
        Ok(Self { alpha, beta, p })
    }

    /// Input mean field A = pα + (1−p)β.
    pub fn mean_field(&self) -> Complex64 {
        self.alpha * self.p + self.beta * (1.0 - self.p)
    }

    /// The mixture as a density matrix at the given cutoff.
    pub fn density(&self, cutoff: usize) -> Result<FockDensityMatrix> {
        FockDensityMatrix::mixture(&[
            (self.p, FockState::coherent(self.alpha, cutoff)?.to_density()),
            (
                1.0 - self.p,
                FockState::coherent(self.beta, cutoff)?.to_density(),
            ),
        ])
    }
}

/// Photon-added coherent state (â† + δ)|α⟩/√N with real α, δ and
/// N = 1 + (α+δ)².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacsParams {
    pub alpha: f64,
    pub delta: f64,
}

impl SpacsParams {
    pub fn new(alpha: f64, delta: f64) -> Self {
        Self { alpha, delta }
    }

    /// Normalization N = 1 + (α+δ)².
    pub fn norm(&self) -> f64 {
        1.0 + (self.alpha + self.delta).powi(2)
    }
}

/// Effective gain of c₀|0⟩ + c₁|1⟩ under g^n̂: G = g/[1 + (g²−1)c₁²].
///
/// Drops below 1 for g > 1 as soon as c₁² > 1/(g+1) — amplification that
/// *reduces* the mean field; symmetrically, attenuation with ν < 1 increases
/// it when c₁² > 1/(1+ν). The denominator 1 + (g²−1)c₁² = c₀² + g²c₁² is
/// positive for every g > 0.
pub fn gain_psi1(params: &Psi1Params, g: f64) -> f64 {
    g / (1.0 + (g * g - 1.0) * params.c1 * params.c1)
}

/// Smallest gain for which amplification of c₀|0⟩ + c₁|1⟩ shrinks the mean
/// field (and below which attenuation grows it): c₁² = 1/(g+1) ⇔ g = 1/c₁² − 1.
pub fn psi1_unit_gain_point(params: &Psi1Params) -> f64 {
    1.0 / (params.c1 * params.c1) - 1.0
}

/// Effective gain of the three-level superposition:
/// G = g(c₀ + √2 g²c₂) / [(c₀² + g²c₁² + g⁴c₂²)(c₀ + √2 c₂)].
///
/// The numerator factor c₀ + √2 g²c₂ can be tuned to zero (or negative) with
/// c₂ < 0, so the amplified mean field can vanish or flip sign.
pub fn gain_psi2(params: &Psi2Params, g: f64) -> Result<f64> {
    let a_in = params.mean_field();
    if a_in.abs() < ZERO_AMPLITUDE {
        return Err(Error::ZeroInputAmplitude(a_in.abs()));
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let g2 = g * g;
    let weight = params.c0 * params.c0 + g2 * params.c1 * params.c1 + g2 * g2 * params.c2 * params.c2;
    Ok(g * (params.c0 + sqrt2 * g2 * params.c2) / (weight * (params.c0 + sqrt2 * params.c2)))
}

/// Weight of the |gα⟩ branch after filtering the mixture:
/// p′ = p e^{(g²−1)|α|²} / [p e^{(g²−1)|α|²} + (1−p) e^{(g²−1)|β|²}].
///
/// Evaluated in log space so large |g²−1|·|α|² cannot overflow.
pub fn mixture_weight(params: &MixtureParams, g: f64) -> f64 {
    if params.p == 0.0 {
        return 0.0;
    }
    if params.p == 1.0 {
        return 1.0;
    }
    let k = g * g - 1.0;
    let log_a = k * params.alpha.norm_sqr() + params.p.ln();
    let log_b = k * params.beta.norm_sqr() + (1.0 - params.p).ln();
    let m = log_a.max(log_b);
    let wa = (log_a - m).exp();
    wa / (wa + (log_b - m).exp())
}

/// Effective (generally complex) gain of the coherent-state mixture:
/// G = g[p′α + (1−p′)β] / [pα + (1−p)β] with p′ from [`mixture_weight`].
///
/// The filter maps each branch |α⟩ → |gα⟩ but *reweights* the mixture toward
/// the larger amplitude when g > 1, so the output mean field need not point
/// anywhere near gA — it can shrink, vanish, or rotate.
pub fn gain_mixture(params: &MixtureParams, g: f64) -> Result<Complex64> {
    let a_in = params.mean_field();
    if a_in.norm() < ZERO_AMPLITUDE {
        return Err(Error::ZeroInputAmplitude(a_in.norm()));
    }
    let p_out = mixture_weight(params, g);
    let a_out = (params.alpha * p_out + params.beta * (1.0 - p_out)) * g;
    Ok(a_out / a_in)
}

/// Mean field of the photon-added coherent state:
/// A = α + (α+δ)/[1 + (α+δ)²].
pub fn spacs_amplitude(params: &SpacsParams) -> f64 {
    let t = params.alpha + params.delta;
    params.alpha + t / (1.0 + t * t)
}

/// Mean field of the attenuated photon-added coherent state,
/// Ã = να + (να + δ/ν)/[1 + (να + δ/ν)²] for ν ∈ (0,1].
///
/// Attenuation acts on (â†+δ)|α⟩ as the parameter map α → να, δ → δ/ν
/// (ν^n̂ â† = â† ν^{n̂+1}), so Ã = A(να, δ/ν) exactly. Near a zero of A the
/// ratio Ã/A — the effective gain — becomes arbitrarily large.
pub fn spacs_attenuated_amplitude(params: &SpacsParams, nu: f64) -> f64 {
    spacs_amplitude(&SpacsParams::new(nu * params.alpha, params.delta / nu))
}

/// Builds the normalized SPACS vector (â†+δ)|α⟩/√N on the truncated basis.
pub fn build_spacs(params: &SpacsParams, cutoff: usize) -> Result<FockState> {
    let coherent = FockState::coherent(Complex64::from(params.alpha), cutoff)?;
    let c = coherent.amps();
    let mut amps = vec![Complex64::ZERO; cutoff + 1];
    for n in 0..=cutoff {
        amps[n] = c[n] * params.delta;
        if n > 0 {
            amps[n] += c[n - 1] * (n as f64).sqrt();
        }
    }
    let state = FockState::from_amplitudes(&amps)?;
    let tail = state.tail_mass();
    if tail >= TOL_TAIL {
        return Err(Error::CutoffUnfaithful {
            cutoff,
            tail_mass: tail,
        });
    }
    Ok(state)
}
