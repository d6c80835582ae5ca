//! Closed-form transformation of single-mode Gaussian states under g^n̂.
//!
//! A Gaussian state is (γ, d): a 2×2 covariance matrix normalized so the
//! vacuum is the identity, and a displacement d = (⟨x̂⟩, ⟨p̂⟩) = (√2 α_R, √2 α_I)
//! for a coherent amplitude α. The filter maps Gaussian states to Gaussian
//! states:
//!
//! * covariance:    γ̃ = [g²(γ+I)⁻¹ − ½(g²−1)I]⁻¹ − I
//! * displacement:  d̃ = 2g[(g²+1)I − (g²−1)γ]⁻¹ d
//!
//! Along a principal axis with quadrature variance V = λ/2 this reduces to an
//! effective gain G_eff = 2g/[(1+g²) + 2V(1−g²)], which exceeds g for
//! antisqueezed quadratures and stays below it for squeezed ones — noiseless
//! amplification is *not* a linear map on the mean field.
//!
//! Amplification is only possible while every quadrature variance stays below
//! (g²+1)/(2(g²−1)); beyond that bound g^n̂ has no physical Gaussian output
//! (the defining sum Σ g^{2n} ρ_nn diverges), and [`transform_gaussian`]
//! reports [`Error::UnphysicalOutput`].

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    displacement_operator, rotation_operator, squeeze_operator, FockDensityMatrix, TOL_TAIL,
};

/// Safety margin at the amplification physicality boundary: inputs closer to
/// the bound than this are rejected instead of producing astronomically
/// amplified outputs.
pub const TOL_PHYS: f64 = 1e-9;

/// A single-mode Gaussian state: covariance matrix γ (vacuum = I) and
/// displacement d = (√2 α_R, √2 α_I).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    gamma: Matrix2<f64>,
    d: Vector2<f64>,
}

/// Variances of the amplitude and phase quadratures (vacuum value 1/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariances {
    pub vx: f64,
    pub vp: f64,
}

impl QuadratureVariances {
    /// Validates V_x, V_p > 0 and the uncertainty product V_x·V_p ≥ 1/4.
    pub fn new(vx: f64, vp: f64) -> Result<Self> {
        if !(vx > 0.0 && vp > 0.0) || !vx.is_finite() || !vp.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "quadrature variances must be finite and positive, got ({vx}, {vp})"
            )));
        }
        let defect = vx * vp - 0.25;
        if defect < -TOL_PHYS {
            return Err(Error::InvalidCovariance(defect));
        }
        Ok(Self { vx, vp })
    }
}

impl GaussianState {
    /// Validates symmetry, positivity and the uncertainty bound det γ ≥ 1.
    pub fn new(gamma: Matrix2<f64>, d: Vector2<f64>) -> Result<Self> {
        let asym = (gamma[(0, 1)] - gamma[(1, 0)]).abs();
        if asym > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "covariance matrix must be symmetric, asymmetry {asym:.3e}"
            )));
        }
        let gamma = Matrix2::new(
            gamma[(0, 0)],
            0.5 * (gamma[(0, 1)] + gamma[(1, 0)]),
            0.5 * (gamma[(0, 1)] + gamma[(1, 0)]),
            gamma[(1, 1)],
        );
        let (lo, _hi, _theta) = principal_axes(&gamma);
        if lo <= 0.0 {
            return Err(Error::InvalidCovariance(lo));
        }
        let defect = gamma.determinant() - 1.0;
        if defect < -TOL_PHYS {
            return Err(Error::InvalidCovariance(defect));
        }
        Ok(Self { gamma, d })
    }

    /// The vacuum: γ = I, d = 0.
    pub fn vacuum() -> Self {
        Self {
            gamma: Matrix2::identity(),
            d: Vector2::zeros(),
        }
    }

    /// The coherent state |α⟩: γ = I, d = (√2 α_R, √2 α_I).
    pub fn coherent(alpha: Complex64) -> Self {
        Self {
            gamma: Matrix2::identity(),
            d: Vector2::new(alpha.re, alpha.im) * std::f64::consts::SQRT_2,
        }
    }

    /// Squeezed vacuum with parameter s: γ = diag(e^{−2s}, e^{2s}).
    /// Positive s squeezes the x-quadrature.
    pub fn squeezed(s: f64) -> Self {
        Self {
            gamma: Matrix2::new((-2.0 * s).exp(), 0.0, 0.0, (2.0 * s).exp()),
            d: Vector2::zeros(),
        }
    }

    /// Thermal state with mean photon number n̄: γ = (2n̄+1)I.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "thermal occupation must be finite and ≥ 0, got {nbar}"
            )));
        }
        Ok(Self {
            gamma: Matrix2::identity() * (2.0 * nbar + 1.0),
            d: Vector2::zeros(),
        })
    }

    /// Returns the same state displaced to d (validated states stay valid).
    pub fn with_displacement(&self, d: Vector2<f64>) -> Self {
        Self {
            gamma: self.gamma,
            d,
        }
    }

    /// Covariance matrix γ.
    pub fn gamma(&self) -> &Matrix2<f64> {
        &self.gamma
    }

    /// Displacement d = (⟨x̂⟩, ⟨p̂⟩).
    pub fn d(&self) -> &Vector2<f64> {
        &self.d
    }

    /// Coherent amplitude α = (d_x + i d_p)/√2.
    pub fn mean_field(&self) -> Complex64 {
        Complex64::new(self.d[0], self.d[1]) / Complex64::from(std::f64::consts::SQRT_2)
    }

    /// Variances along the x/p axes: (γ₀₀/2, γ₁₁/2).
    pub fn quadrature_variances(&self) -> QuadratureVariances {
        QuadratureVariances {
            vx: 0.5 * self.gamma[(0, 0)],
            vp: 0.5 * self.gamma[(1, 1)],
        }
    }

    /// Variances along the principal axes, smallest first.
    pub fn principal_variances(&self) -> (f64, f64) {
        let (lo, hi, _) = principal_axes(&self.gamma);
        (0.5 * lo, 0.5 * hi)
    }

    /// Mean photon number ⟨n̂⟩ = (tr γ − 2)/4 + |d|²/2.
    pub fn mean_photon_number(&self) -> f64 {
        0.25 * (self.gamma.trace() - 2.0) + 0.5 * self.d.norm_squared()
    }

    /// Brute-force Fock representation at the given cutoff, built from the
    /// normal-mode decomposition γ = R(θ) diag(ν e^{−2r}, ν e^{2r}) R(θ)ᵀ:
    /// a thermal state with n̄ = (ν−1)/2 squeezed by r, rotated by θ and
    /// displaced to d.
    ///
    /// Fails with [`Error::CutoffUnfaithful`] if the cutoff leaves more than
    /// [`TOL_TAIL`] of the state in the last two Fock levels.
    pub fn to_fock(&self, cutoff: usize) -> Result<FockDensityMatrix> {
        let dim = cutoff + 1;
        let (lo, hi, theta) = principal_axes(&self.gamma);
        let nu = (lo * hi).sqrt();
        let nbar = (0.5 * (nu - 1.0)).max(0.0);
        let r = 0.25 * (hi / lo).ln();
        let alpha = self.mean_field();

        let u = displacement_operator(alpha, dim)
            * rotation_operator(theta, dim)
            * squeeze_operator(r, dim);
        let thermal = FockDensityMatrix::thermal(nbar, cutoff)?;
        let rho = &u * thermal.rho() * u.adjoint();
        let state = FockDensityMatrix::new(rho)?;
        let tail = state.tail_mass();
        if tail >= TOL_TAIL {
            return Err(Error::CutoffUnfaithful {
                cutoff,
                tail_mass: tail,
            });
        }
        Ok(state)
    }
}

/// Largest quadrature variance a Gaussian state may have and still be
/// amplifiable with gain g: (g²+1)/(2(g²−1)). Infinite for g ≤ 1.
pub fn physicality_bound(g: f64) -> f64 {
    if g > 1.0 {
        0.5 * (g * g + 1.0) / (g * g - 1.0)
    } else {
        f64::INFINITY
    }
}

/// Whether g^n̂ maps the state to a physical Gaussian state: every principal
/// variance must stay below [`physicality_bound`] with margin [`TOL_PHYS`].
/// Trivially true for g ≤ 1 (attenuation always exists).
pub fn is_amplifiable(state: &GaussianState, g: f64) -> bool {
    let (_, hi, _) = principal_axes(state.gamma());
    0.5 * hi < physicality_bound(g) - TOL_PHYS
}

/// Effective mean-field gain along a quadrature of variance V:
/// G_eff = 2g/[(1+g²) + 2V(1−g²)].
///
/// Equals g at the vacuum variance V = 1/2, exceeds it for antisqueezed
/// quadratures when g > 1, and diverges as V approaches the physicality
/// bound — at which point [`Error::UnphysicalOutput`] is returned.
pub fn effective_gain(v: f64, g: f64) -> Result<f64> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::InvalidGain(g));
    }
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "quadrature variance must be finite and positive, got {v}"
        )));
    }
    let denom = (1.0 + g * g) + 2.0 * v * (1.0 - g * g);
    if denom <= TOL_PHYS {
        return Err(Error::UnphysicalOutput {
            gain: g,
            max_variance: v,
            bound: physicality_bound(g),
        });
    }
    Ok(2.0 * g / denom)
}

/// Applies the filter g^n̂ to a Gaussian state in closed form.
///
/// The covariance matrix is rotated to principal axes (the filter commutes
/// with phase rotations), each principal variance is mapped through
/// Ṽ = [1−g² + 2V(1+g²)] / (2[g²+1 − 2V(g²−1)]), and the displacement through
/// d̃ = 2g[(g²+1)I − (g²−1)γ]⁻¹ d.
pub fn transform_gaussian(state: &GaussianState, g: f64) -> Result<GaussianState> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::InvalidGain(g));
    }
    let (lo, hi, theta) = principal_axes(state.gamma());
    if g > 1.0 && !is_amplifiable(state, g) {
        return Err(Error::UnphysicalOutput {
            gain: g,
            max_variance: 0.5 * hi,
            bound: physicality_bound(g),
        });
    }

    let map = |lambda: f64| -> Result<f64> {
        let v = 0.5 * lambda;
        let denom = g * g + 1.0 - 2.0 * v * (g * g - 1.0);
        if denom <= TOL_PHYS {
            return Err(Error::UnphysicalOutput {
                gain: g,
                max_variance: v,
                bound: physicality_bound(g),
            });
        }
        Ok((1.0 - g * g + 2.0 * v * (1.0 + g * g)) / denom)
    };
    let rot = rotation(theta);
    let gamma_out = rot * Matrix2::new(map(lo)?, 0.0, 0.0, map(hi)?) * rot.transpose();

    let m = Matrix2::identity() * (g * g + 1.0) - state.gamma() * (g * g - 1.0);
    let inv = m.try_inverse().ok_or(Error::SingularMatrix {
        context: "Gaussian displacement map (g²+1)I − (g²−1)γ",
    })?;
    let d_out = inv * state.d() * (2.0 * g);

    Ok(GaussianState {
        gamma: gamma_out,
        d: d_out,
    })
}

/// Decomposes a symmetric 2×2 matrix as R(θ) diag(lo, hi) R(θ)ᵀ with
/// lo ≤ hi and R a proper rotation.
fn principal_axes(gamma: &Matrix2<f64>) -> (f64, f64, f64) {
    let eig = nalgebra::SymmetricEigen::new(*gamma);
    let (v, e) = (eig.eigenvalues, eig.eigenvectors);
    let (lo_idx, hi_idx) = if v[0] <= v[1] { (0, 1) } else { (1, 0) };
    // The angle of the lo-eigenvector fixes the rotation; its sign is
    // irrelevant because R(θ+π) acts identically on a diagonal form.
    let theta = e[(1, lo_idx)].atan2(e[(0, lo_idx)]);
    (v[lo_idx], v[hi_idx], theta)
}

fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}
