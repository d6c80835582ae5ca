//! Three-mode model of a realistic noiseless-attenuation experiment.
//!
//! The setup attenuates a photon-added coherent state: a source mode A
//! carrying (â†+δ)|α⟩ meets the attenuator beam splitter BS₁ (amplitude
//! reflectance ν, transmittance T = 1−ν²), the transmitted light is sent to
//! a detector whose inefficiency is modelled by a second beam splitter BS₂
//! (transmittance η) coupling to an auxiliary mode C, heralding succeeds on
//! *no click* — projection of detector mode B onto vacuum — and C is traced
//! out. Imperfect photon addition is modelled by a source mixture
//! ρ = p|Ψ⟩⟨Ψ| + (1−p)|α⟩⟨α|.
//!
//! Everything is computed twice: in closed form ([`amplitude_eta`],
//! [`amplitude_eta_p`], [`heralding_weight`]) and by brute force
//! ([`simulate_setup`]) on the full three-mode Fock tensor using the mode
//! unitary of [`build_mode_unitary`]. The two must agree to 10⁻⁸; the test
//! and verify suites hold this over the whole parameter box.
//!
//! Heralding weights are raw projection probabilities, including the factor
//! e^{−ηTα²} common to both source branches (it cancels in the conditional
//! state but not in the click statistics).

use nalgebra::{DMatrix, Matrix3, Vector3};
use ndarray::{Array2, Array3, Axis};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockDensityMatrix, HeraldedOutcome, TOL_NORM, TOL_TAIL};
use crate::nongaussian::{spacs_amplitude, SpacsParams, ZERO_AMPLITUDE};

/// Default per-mode Fock cutoff for the three-mode tensor (dimension 21³).
/// Faithful for the small-α regime the setup is designed for (|α| ≲ 0.5).
pub const DEFAULT_MODE_CUTOFF: usize = 20;

/// Vacuum-projection weights below this are reported as [`Error::DegenerateHerald`].
pub const DEGENERATE_HERALD: f64 = 1e-12;

/// Parameters of the attenuation setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetupParams {
    /// Coherent amplitude of the signal (real).
    pub alpha: f64,
    /// Auxiliary displacement mixed into the photon addition (real).
    pub delta: f64,
    /// Amplitude reflectance of the attenuator BS₁, in (0,1].
    pub nu: f64,
    /// Detection efficiency of the heralding detector, in [0,1].
    pub eta: f64,
    /// Purity of the photon addition: weight of the photon-added branch.
    pub p: f64,
    /// Per-mode Fock cutoff of the brute-force simulation.
    pub cutoff: usize,
}

impl SetupParams {
    pub fn new(alpha: f64, delta: f64, nu: f64, eta: f64, p: f64) -> Result<Self> {
        if !alpha.is_finite() || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "amplitudes must be finite, got α = {alpha}, δ = {delta}"
            )));
        }
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "reflectance ν must lie in (0,1], got {nu}"
            )));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidArgument(format!(
                "detection efficiency η must lie in [0,1], got {eta}"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "addition purity p must lie in [0,1], got {p}"
            )));
        }
        Ok(Self {
            alpha,
            delta,
            nu,
            eta,
            p,
            cutoff: DEFAULT_MODE_CUTOFF,
        })
    }

    /// Same parameters with a different per-mode cutoff.
    pub fn with_cutoff(mut self, cutoff: usize) -> Self {
        self.cutoff = cutoff;
        self
    }

    /// Transmittance T = 1 − ν² of the attenuator beam splitter.
    pub fn transmittance(&self) -> f64 {
        1.0 - self.nu * self.nu
    }

    /// The ideal photon-added state parameters (α, δ).
    pub fn spacs(&self) -> SpacsParams {
        SpacsParams::new(self.alpha, self.delta)
    }
}

/// The 3×3 mode-coupling matrix of the two beam splitters. Real orthogonal;
/// acts on creation operators as Û âᵢ† Û† = Σⱼ U_ij âⱼ† and maps coherent
/// amplitudes by β ↦ Uᵀβ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeUnitary {
    u: Matrix3<f64>,
}

impl ModeUnitary {
    /// The matrix U.
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.u
    }

    /// Coefficients (U₁₁, U₁₂, U₁₃) of Û â† Û† — how a photon created in the
    /// source mode spreads over (A, B, C).
    pub fn creation_row(&self) -> [f64; 3] {
        [self.u[(0, 0)], self.u[(0, 1)], self.u[(0, 2)]]
    }

    /// Coherent amplitudes after the network: Uᵀ (β_A, β_B, β_C).
    pub fn transform_amplitudes(&self, beta: [f64; 3]) -> [f64; 3] {
        let out = self.u.transpose() * Vector3::from(beta);
        [out[0], out[1], out[2]]
    }

    /// Largest entry of |UᵀU − I|.
    pub fn unitarity_defect(&self) -> f64 {
        (self.u.transpose() * self.u - Matrix3::identity()).abs().max()
    }
}

/// Builds the mode-coupling matrix of BS₁ (reflectance ν) followed by BS₂
/// (transmittance η):
///
/// ```text
///      ⎛   ν     √(ηT)   √((1−η)T) ⎞
/// U =  ⎜ −√T     ν√η     ν√(1−η)   ⎟ ,   T = 1 − ν².
///      ⎝   0    −√(1−η)    √η      ⎠
/// ```
pub fn build_mode_unitary(nu: f64, eta: f64) -> Result<ModeUnitary> {
    if !(nu > 0.0 && nu <= 1.0) || !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!(
            "need ν ∈ (0,1] and η ∈ [0,1], got ν = {nu}, η = {eta}"
        )));
    }
    let t = 1.0 - nu * nu;
    let u = Matrix3::new(
        nu,
        (eta * t).sqrt(),
        ((1.0 - eta) * t).sqrt(),
        -t.sqrt(),
        nu * eta.sqrt(),
        nu * (1.0 - eta).sqrt(),
        0.0,
        -(1.0 - eta).sqrt(),
        eta.sqrt(),
    );
    let unitary = ModeUnitary { u };
    debug_assert!(unitary.unitarity_defect() < 1e-12);
    Ok(unitary)
}

/// A pure three-mode state on (A, B, C), each mode truncated at the same
/// cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeFockState {
    amps: Array3<Complex64>,
}

impl MultimodeFockState {
    /// Product of coherent states |β_A⟩|β_B⟩|β_C⟩ with real amplitudes,
    /// built from the analytic coefficients e^{−β²/2} βⁿ/√n!.
    ///
    /// Fails with [`Error::CutoffUnfaithful`] if any mode's truncation tail
    /// reaches [`TOL_TAIL`].
    pub fn product_coherent(beta: [f64; 3], cutoff: usize) -> Result<Self> {
        let waves: Vec<Vec<f64>> = beta
            .iter()
            .map(|&b| raw_coherent(b, cutoff + 1))
            .collect();
        for wave in &waves {
            let tail: f64 = wave[cutoff.saturating_sub(1)..].iter().map(|c| c * c).sum();
            if tail >= TOL_TAIL {
                return Err(Error::CutoffUnfaithful {
                    cutoff,
                    tail_mass: tail,
                });
            }
        }
        let dim = cutoff + 1;
        let amps = Array3::from_shape_fn((dim, dim, dim), |(a, b, c)| {
            Complex64::from(waves[0][a] * waves[1][b] * waves[2][c])
        });
        Ok(Self { amps })
    }

    /// Per-mode dimension N_cut + 1.
    pub fn dim(&self) -> usize {
        self.amps.shape()[0]
    }

    /// The amplitude tensor ψ[n_A, n_B, n_C].
    pub fn amps(&self) -> &Array3<Complex64> {
        &self.amps
    }

    /// Global norm² ⟨ψ|ψ⟩.
    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// The (unnormalized) state (Σᵢ cᵢ âᵢ† + δ)|ψ⟩. Components raised past
    /// the cutoff are dropped, so callers must keep headroom above the
    /// state's support.
    pub fn displaced_creation(&self, coeffs: [f64; 3], delta: f64) -> Self {
        let dim = self.dim();
        let mut out = &self.amps * Complex64::from(delta);
        for ((a, b, c), &value) in self.amps.indexed_iter() {
            if a + 1 < dim {
                out[[a + 1, b, c]] += value * (coeffs[0] * ((a + 1) as f64).sqrt());
            }
            if b + 1 < dim {
                out[[a, b + 1, c]] += value * (coeffs[1] * ((b + 1) as f64).sqrt());
            }
            if c + 1 < dim {
                out[[a, b, c + 1]] += value * (coeffs[2] * ((c + 1) as f64).sqrt());
            }
        }
        Self { amps: out }
    }

    /// Projects one mode onto vacuum: ⟨0_mode|ψ⟩, an (unnormalized) two-mode
    /// amplitude array over the remaining modes in their original order.
    pub fn project_vacuum(&self, mode: usize) -> Array2<Complex64> {
        self.amps.index_axis(Axis(mode), 0).to_owned()
    }
}

/// Reduced density matrix of the first mode of a two-mode pure state:
/// ρ[m,n] = Σ_k ψ[m,k] ψ̄[n,k]. Unnormalized (trace = ‖ψ‖²).
pub fn trace_second_mode(joint: &Array2<Complex64>) -> DMatrix<Complex64> {
    let (dim, dim2) = (joint.shape()[0], joint.shape()[1]);
    DMatrix::from_fn(dim, dim, |m, n| {
        (0..dim2).map(|k| joint[[m, k]] * joint[[n, k]].conj()).sum()
    })
}

/// Closed-form output amplitude of the heralded setup with a pure
/// photon-added source (p = 1):
///
/// Ã_η = να + [να(1−ηT) + νδ] / {[α(1−ηT) + δ]² + 1 − ηT}.
///
/// At η = 1 this collapses to the ideal attenuation law Ã(να, δ/ν); at η = 0
/// the heralding carries no information and the setup degenerates to plain
/// loss, Ã = ν·A.
pub fn amplitude_eta(params: &SetupParams) -> f64 {
    let net = 1.0 - params.eta * params.transmittance();
    let k = params.alpha * net + params.delta;
    params.nu * params.alpha + params.nu * k / (k * k + net)
}

/// Raw no-click probability of the setup: both source branches share the
/// factor e^{−ηTα²} (light diverted to the detector), the photon-added
/// branch additionally carries M/N with M = [α(1−ηT)+δ]² + 1−ηT and
/// N = 1 + (α+δ)²:
///
/// W = e^{−ηTα²} [ p·M/N + (1−p) ].
pub fn heralding_weight(params: &SetupParams) -> f64 {
    let net = 1.0 - params.eta * params.transmittance();
    let k = params.alpha * net + params.delta;
    let m = k * k + net;
    let shared = (-params.eta * params.transmittance() * params.alpha * params.alpha).exp();
    shared * (params.p * m / params.spacs().norm() + (1.0 - params.p))
}

/// Posterior weight of the photon-added branch given a successful herald:
///
/// p′ = p / { p + (1−p)·[1+(α+δ)²] / ([α(1−ηT)+δ]² + 1−ηT) }.
pub fn posterior_addition_weight(params: &SetupParams) -> f64 {
    if params.p == 0.0 {
        return 0.0;
    }
    if params.p == 1.0 {
        return 1.0;
    }
    let net = 1.0 - params.eta * params.transmittance();
    let k = params.alpha * net + params.delta;
    let m = k * k + net;
    params.p / (params.p + (1.0 - params.p) * params.spacs().norm() / m)
}

/// Closed-form output amplitude with source impurity:
/// Ã_{η,p} = p′ Ã_η + (1−p′) να.
pub fn amplitude_eta_p(params: &SetupParams) -> f64 {
    let w = posterior_addition_weight(params);
    w * amplitude_eta(params) + (1.0 - w) * params.nu * params.alpha
}

/// Mean field of the impure source state ρ = p|Ψ⟩⟨Ψ| + (1−p)|α⟩⟨α|:
/// A_p = p·A + (1−p)·α.
pub fn input_amplitude(params: &SetupParams) -> f64 {
    params.p * spacs_amplitude(&params.spacs()) + (1.0 - params.p) * params.alpha
}

/// Effective gain of the full setup, G = Ã_{η,p} / A_p.
///
/// Near a zero of the input amplitude the gain diverges — that is the
/// working point the experiment tunes δ toward — and exactly at it the
/// ratio is undefined.
pub fn gain_eta_p(params: &SetupParams) -> Result<f64> {
    let a_in = input_amplitude(params);
    if a_in.abs() < ZERO_AMPLITUDE {
        return Err(Error::ZeroInputAmplitude(a_in.abs()));
    }
    Ok(amplitude_eta_p(params) / a_in)
}

/// Brute-force simulation of the full setup on the three-mode Fock tensor.
///
/// Builds Û|α,0,0⟩ = |να⟩|√(Tη)α⟩|√(T(1−η))α⟩, applies the displaced
/// creation operator Σⱼ U₁ⱼ âⱼ† + δ for the photon-added branch, projects
/// mode B onto vacuum, traces out mode C, and mixes the two source branches
/// with weights p and 1−p. Returns the normalized mode-A state and the raw
/// heralding weight.
pub fn simulate_setup(params: &SetupParams) -> Result<HeraldedOutcome> {
    let unitary = build_mode_unitary(params.nu, params.eta)?;
    let beta = unitary.transform_amplitudes([params.alpha, 0.0, 0.0]);
    let source = MultimodeFockState::product_coherent(beta, params.cutoff)?;
    let norm_defect = (source.norm_squared() - 1.0).abs();
    if norm_defect > TOL_NORM {
        return Err(Error::CutoffUnfaithful {
            cutoff: params.cutoff,
            tail_mass: norm_defect,
        });
    }

    let dim = params.cutoff + 1;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    if params.p > 0.0 {
        let added = source.displaced_creation(unitary.creation_row(), params.delta);
        let branch_norm = added.norm_squared();
        let heralded = added.project_vacuum(1);
        rho += trace_second_mode(&heralded) * Complex64::from(params.p / branch_norm);
    }
    if params.p < 1.0 {
        let heralded = source.project_vacuum(1);
        rho += trace_second_mode(&heralded) * Complex64::from(1.0 - params.p);
    }

    let weight = rho.trace().re;
    if weight < DEGENERATE_HERALD {
        return Err(Error::DegenerateHerald(weight));
    }
    let state = FockDensityMatrix::new(rho / Complex64::from(weight))?;
    let tail = state.tail_mass();
    if tail >= TOL_TAIL {
        return Err(Error::CutoffUnfaithful {
            cutoff: params.cutoff,
            tail_mass: tail,
        });
    }
    Ok(HeraldedOutcome { state, weight })
}

/// Analytic coherent-state coefficients e^{−β²/2} βⁿ/√n! for real β,
/// without truncation renormalization.
fn raw_coherent(beta: f64, dim: usize) -> Vec<f64> {
    let mut wave = vec![0.0; dim];
    let mut c = (-0.5 * beta * beta).exp();
    for (n, slot) in wave.iter_mut().enumerate() {
        *slot = c;
        c *= beta / ((n + 1) as f64).sqrt();
    }
    wave
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_filter, FockState};
    use crate::nongaussian::{build_spacs, spacs_attenuated_amplitude};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(alpha: f64, delta: f64, nu: f64, eta: f64, p: f64) -> SetupParams {
        SetupParams::new(alpha, delta, nu, eta, p).unwrap()
    }

    #[test]
    fn mode_unitary_limits() {
        // ν = 1: no attenuation; mode A decouples, B/C mix.
        let u = build_mode_unitary(1.0, 0.36).unwrap();
        let m = u.matrix();
        assert_abs_diff_eq!(m[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 1)].abs() + m[(0, 2)].abs(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 0)].abs() + m[(2, 0)].abs(), 0.0, epsilon = 1e-15);

        // η = 1: perfect detector; mode C decouples.
        let u = build_mode_unitary(0.6, 1.0).unwrap();
        let m = u.matrix();
        assert_abs_diff_eq!(m[(2, 2)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 2)].abs() + m[(1, 2)].abs(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(2, 0)].abs() + m[(2, 1)].abs(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mode_unitary_is_orthogonal() {
        for nu in [0.1, 0.35, 0.7, 0.99, 1.0] {
            for eta in [0.0, 0.25, 0.5, 0.8, 1.0] {
                let u = build_mode_unitary(nu, eta).unwrap();
                assert!(
                    u.unitarity_defect() < 1e-12,
                    "U†U defect {} at ν={nu}, η={eta}",
                    u.unitarity_defect()
                );
            }
        }
    }

    #[test]
    fn coherent_amplitudes_split_as_expected() {
        let u = build_mode_unitary(0.7, 0.5).unwrap();
        let t = 1.0_f64 - 0.49;
        let beta = u.transform_amplitudes([0.4, 0.0, 0.0]);
        assert_relative_eq!(beta[0], 0.7 * 0.4, max_relative = 1e-14);
        assert_relative_eq!(beta[1], (0.5 * t).sqrt() * 0.4, max_relative = 1e-14);
        assert_relative_eq!(beta[2], (0.5 * t).sqrt() * 0.4, max_relative = 1e-14);
    }

    #[test]
    fn pure_coherent_branch_reproduces_the_filter() {
        // p = 0, η = 1: the setup is a beam splitter with vacuum projection —
        // exactly the ν^n̂ filter on |α⟩, including the success probability.
        let prm = params(0.4, 0.0, 0.65, 1.0, 0.0);
        let out = simulate_setup(&prm).unwrap();
        let reference = apply_filter(
            &FockState::coherent(Complex64::from(0.4), prm.cutoff)
                .unwrap()
                .to_density(),
            0.65,
        )
        .unwrap();
        assert_relative_eq!(out.weight, reference.weight, max_relative = 1e-10);
        let diff = (out.state.rho() - reference.state.rho()).camax();
        assert!(diff < 1e-10, "state mismatch {diff}");
        // Closed forms agree too.
        assert_relative_eq!(out.weight, heralding_weight(&prm), max_relative = 1e-10);
        assert_relative_eq!(
            out.state.mean_field().re,
            amplitude_eta_p(&prm),
            max_relative = 1e-10
        );
    }

    #[test]
    fn perfect_detection_is_ideal_attenuation_of_spacs() {
        // p = 1, η = 1: BS₁ + vacuum projection realizes ν^n̂ on (â†+δ)|α⟩.
        let prm = params(0.25, -0.55, 0.7, 1.0, 1.0);
        let out = simulate_setup(&prm).unwrap();
        let spacs = build_spacs(&prm.spacs(), prm.cutoff).unwrap();
        let reference = apply_filter(&spacs.to_density(), 0.7).unwrap();
        assert_relative_eq!(out.weight, reference.weight, max_relative = 1e-9);
        let diff = (out.state.rho() - reference.state.rho()).camax();
        assert!(diff < 1e-9, "state mismatch {diff}");
        assert_abs_diff_eq!(
            out.state.mean_field().re,
            spacs_attenuated_amplitude(&prm.spacs(), 0.7),
            epsilon = 1e-9
        );
    }

    #[test]
    fn closed_form_amplitude_limits() {
        let spacs = SpacsParams::new(0.25, -0.55);
        // η = 1 collapses to the ideal attenuated amplitude.
        let prm = params(0.25, -0.55, 0.6, 1.0, 1.0);
        assert_relative_eq!(
            amplitude_eta(&prm),
            spacs_attenuated_amplitude(&spacs, 0.6),
            max_relative = 1e-12
        );
        // η = 0: no information in the herald — plain loss, Ã = ν·A.
        let prm = params(0.25, -0.55, 0.6, 0.0, 1.0);
        assert_relative_eq!(
            amplitude_eta(&prm),
            0.6 * spacs_amplitude(&spacs),
            max_relative = 1e-12
        );
        // ν = 1: nothing happens at all.
        let prm = params(0.25, -0.55, 1.0, 0.3, 1.0);
        assert_relative_eq!(
            amplitude_eta(&prm),
            spacs_amplitude(&spacs),
            max_relative = 1e-12
        );
    }

    #[test]
    fn reference_gain_point() {
        // α = 0.25, δ = −0.55, ν = 0.7, perfect setup: the attenuator
        // *amplifies* the tiny input field more than tenfold.
        let prm = params(0.25, -0.55, 0.7, 1.0, 1.0);
        let gain = gain_eta_p(&prm).unwrap();
        assert_relative_eq!(gain, 10.694, max_relative = 1e-3);
    }

    #[test]
    fn impure_inefficient_setup_matches_closed_form() {
        let prm = params(0.25, -0.55, 0.7, 0.25, 0.75);
        let out = simulate_setup(&prm).unwrap();
        assert_abs_diff_eq!(
            out.state.mean_field().re,
            amplitude_eta_p(&prm),
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(out.state.mean_field().im, 0.0, epsilon = 1e-12);
        assert_relative_eq!(out.weight, heralding_weight(&prm), max_relative = 1e-8);
    }

    #[test]
    fn gain_goes_to_unity_without_attenuation() {
        // At ν = 1 the setup is a no-op for any η, p.
        for (eta, p) in [(1.0, 1.0), (0.25, 0.75), (0.5, 0.2)] {
            let prm = params(0.25, -0.65, 1.0, eta, p);
            assert_relative_eq!(gain_eta_p(&prm).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_input_amplitude_is_an_error() {
        // δ tuned so the SPACS mean field vanishes exactly:
        // t = α+δ solves t² + 4t + 1 = 0 for α = 0.25.
        let t = -2.0 + 3.0f64.sqrt();
        let prm = params(0.25, t - 0.25, 0.7, 1.0, 1.0);
        assert!(matches!(
            gain_eta_p(&prm),
            Err(Error::ZeroInputAmplitude(_))
        ));
    }

    #[test]
    fn heralding_weight_decreases_with_transmittance() {
        // More light toward the detector ⇒ fewer no-click events.
        let mut last = f64::INFINITY;
        for nu in [0.95, 0.8, 0.6, 0.4, 0.2] {
            let prm = params(0.4, 0.0, nu, 0.7, 0.0);
            let w = simulate_setup(&prm).unwrap().weight;
            assert!(w < last, "weight must fall as T grows");
            last = w;
        }
    }

    #[test]
    fn herald_weight_posterior_consistency() {
        // p′ must equal the Bayes ratio of the closed-form branch weights.
        let prm = params(0.3, -0.4, 0.55, 0.35, 0.6);
        let w_total = heralding_weight(&prm);
        let w_added = heralding_weight(&SetupParams { p: 1.0, ..prm });
        let posterior = prm.p * w_added / w_total;
        assert_relative_eq!(
            posterior_addition_weight(&prm),
            posterior,
            max_relative = 1e-12
        );
    }
}
