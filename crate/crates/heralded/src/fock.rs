//! Truncated Fock-space states and the exact action of the heralded filter g^n̂.
//!
//! States are plain complex vectors (pure) or matrices (mixed) over the basis
//! |0⟩ … |N_cut⟩, and the filter is applied literally as ρ → g^n̂ ρ g^n̂ / Tr.
//! Everything downstream — the Gaussian transformation laws, the phase-space
//! rules, the experiment model — is cross-checked against this module.
//!
//! Conventions frozen here and used throughout the crate:
//!
//! * the annihilation operator acts as â|n⟩ = √n |n−1⟩,
//! * the mean field ⟨â⟩ = Tr(ρâ) is read off the first sub-diagonal,
//! * the heralding weight of a filter event is the unnormalized trace
//!   N = Σ_n g^{2n} ρ_nn, a genuine probability for g ≤ 1 and a relative
//!   weight for g > 1 (the ideal amplifier is unbounded, so absolute success
//!   probabilities vanish in the untruncated limit).
//!
//! Truncation is never silent: amplification checks that the filtered weight
//! is not carried by the last few Fock levels and fails with
//! [`Error::DivergentAmplification`] instead of returning an edge-dominated
//! state.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Default single-mode Fock cutoff N_cut (dimension N_cut + 1).
pub const DEFAULT_CUTOFF: usize = 30;

/// Absolute tolerance on normalization and Hermiticity.
pub const TOL_NORM: f64 = 1e-10;

/// A density matrix may dip this far below positive semidefiniteness before
/// it is rejected.
pub const TOL_PSD: f64 = 1e-8;

/// Slack allowed when asserting d⟨n̂⟩/dg ≥ 0 through finite differences.
pub const TOL_DERIV: f64 = 1e-6;

/// Maximum relative mass tolerated in the last two Fock levels of a state
/// that claims faithful truncation.
pub const TOL_TAIL: f64 = 1e-8;

/// Number of trailing Fock levels inspected by the amplification tail check.
pub const K_TAIL: usize = 5;

/// A pure state Σ_n c_n |n⟩ over the truncated basis, kept normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    amps: DVector<Complex64>,
}

impl FockState {
    /// Normalizes `amps` into a state. Fails if the vector is numerically zero.
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        let norm = amps.norm();
        if norm < 1e-150 {
            return Err(Error::ZeroNorm(norm));
        }
        Ok(Self {
            amps: amps / Complex64::from(norm),
        })
    }

    /// Builds a state from a slice of amplitudes c_0 … c_{N_cut}.
    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amps))
    }

    /// The vacuum |0⟩.
    pub fn vacuum(cutoff: usize) -> Self {
        let mut amps = DVector::zeros(cutoff + 1);
        amps[0] = Complex64::ONE;
        Self { amps }
    }

    /// The Fock state |n⟩.
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::InvalidArgument(format!(
                "Fock level {n} exceeds cutoff {cutoff}"
            )));
        }
        let mut amps = DVector::zeros(cutoff + 1);
        amps[n] = Complex64::ONE;
        Ok(Self { amps })
    }

    /// The coherent state |α⟩ with c_n = e^{−|α|²/2} α^n/√(n!), renormalized
    /// on the truncated basis.
    ///
    /// Fails with [`Error::CutoffUnfaithful`] when the truncation tail holds
    /// more than [`TOL_TAIL`] of the state, i.e. when |α|² is too large for
    /// the requested cutoff.
    pub fn coherent(alpha: Complex64, cutoff: usize) -> Result<Self> {
        let mut amps = DVector::zeros(cutoff + 1);
        let mut c = Complex64::from((-0.5 * alpha.norm_sqr()).exp());
        for n in 0..=cutoff {
            amps[n] = c;
            c *= alpha / Complex64::from(((n + 1) as f64).sqrt());
        }
        let state = Self::new(amps)?;
        let tail = state.tail_mass();
        if tail >= TOL_TAIL {
            return Err(Error::CutoffUnfaithful {
                cutoff,
                tail_mass: tail,
            });
        }
        Ok(state)
    }

    /// Amplitudes c_0 … c_{N_cut}.
    pub fn amps(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// Highest Fock level kept, N_cut.
    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    /// Dimension of the truncated space, N_cut + 1.
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// Probability carried by the last two Fock levels.
    pub fn tail_mass(&self) -> f64 {
        let d = self.dim();
        self.amps.rows(d.saturating_sub(2), d.min(2)).norm_squared()
    }

    /// Inner product ⟨self|other⟩ (antilinear in `self`).
    pub fn overlap(&self, other: &FockState) -> Result<Complex64> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// Fidelity |⟨self|other⟩|².
    pub fn fidelity(&self, other: &FockState) -> Result<f64> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Mean field ⟨â⟩ = Σ_n √(n+1) c̄_n c_{n+1}.
    pub fn mean_field(&self) -> Complex64 {
        (0..self.cutoff())
            .map(|n| ((n + 1) as f64).sqrt() * self.amps[n].conj() * self.amps[n + 1])
            .sum()
    }

    /// Mean photon number ⟨n̂⟩ = Σ_n n |c_n|².
    pub fn mean_photon_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// The phase-rotated state e^{iφn̂}|ψ⟩, c_n → e^{inφ} c_n.
    pub fn phase_rotated(&self, phi: f64) -> Self {
        let amps = DVector::from_fn(self.dim(), |n, _| {
            Complex64::from_polar(1.0, n as f64 * phi) * self.amps[n]
        });
        Self { amps }
    }

    /// Projector |ψ⟩⟨ψ| as a density matrix.
    pub fn to_density(&self) -> FockDensityMatrix {
        FockDensityMatrix {
            rho: &self.amps * self.amps.adjoint(),
        }
    }
}

/// A mixed state ρ over the truncated basis: Hermitian, unit trace, positive
/// semidefinite within [`TOL_PSD`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    rho: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    /// Validates and trace-normalizes a candidate density matrix.
    ///
    /// Checks squareness, Hermiticity within [`TOL_NORM`], a strictly
    /// positive trace, and positive semidefiniteness within [`TOL_PSD`].
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be square and nonempty, got {}×{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let herm_defect = (&rho - rho.adjoint()).camax();
        if herm_defect > TOL_NORM {
            return Err(Error::InvalidArgument(format!(
                "density matrix is not Hermitian: max |ρ−ρ†| = {herm_defect:.3e}"
            )));
        }
        let trace = rho.trace().re;
        if !(trace > 1e-150) || !trace.is_finite() {
            return Err(Error::ZeroNorm(trace));
        }
        let rho = rho / Complex64::from(trace);
        let min_eig = min_eigenvalue(&rho);
        if min_eig < -TOL_PSD {
            return Err(Error::InvalidCovariance(min_eig));
        }
        Ok(Self { rho })
    }

    /// Wraps a matrix already known to be a valid normalized density matrix
    /// (outputs of internal transforms that preserve the invariants).
    pub(crate) fn from_valid(rho: DMatrix<Complex64>) -> Self {
        Self { rho }
    }

    /// Statistical mixture Σ_k w_k ρ_k with nonnegative weights.
    pub fn mixture(components: &[(f64, FockDensityMatrix)]) -> Result<Self> {
        let (w0, first) = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("mixture of zero components".into()))?;
        if components.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "mixture weights must be finite and ≥ 0".into(),
            ));
        }
        let mut rho = &first.rho * Complex64::from(*w0);
        for (w, comp) in &components[1..] {
            check_same_dim(first.dim(), comp.dim())?;
            rho += &comp.rho * Complex64::from(*w);
        }
        let total = rho.trace().re;
        if !(total > 1e-150) {
            return Err(Error::ZeroNorm(total));
        }
        Ok(Self {
            rho: rho / Complex64::from(total),
        })
    }

    /// Thermal state with Boltzmann ratio q = n̄/(1+n̄), renormalized exactly
    /// on the truncated basis (the truncated ⟨n̂⟩ is slightly below n̄).
    pub fn thermal(nbar: f64, cutoff: usize) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "thermal occupation must be finite and ≥ 0, got {nbar}"
            )));
        }
        let q = nbar / (1.0 + nbar);
        let mut rho = DMatrix::zeros(cutoff + 1, cutoff + 1);
        for n in 0..=cutoff {
            rho[(n, n)] = Complex64::from(q.powi(n as i32));
        }
        let trace = rho.trace().re;
        Ok(Self {
            rho: rho / Complex64::from(trace),
        })
    }

    /// The matrix ρ_mn.
    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    /// Highest Fock level kept, N_cut.
    pub fn cutoff(&self) -> usize {
        self.rho.nrows() - 1
    }

    /// Dimension of the truncated space, N_cut + 1.
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Diagonal populations ρ_nn.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.rho[(n, n)].re).collect()
    }

    /// Probability carried by the last two Fock levels.
    pub fn tail_mass(&self) -> f64 {
        let d = self.dim();
        (d.saturating_sub(2)..d).map(|n| self.rho[(n, n)].re).sum()
    }

    /// Mean field ⟨â⟩ = Tr(ρâ) = Σ_n √(n+1) ρ_{n+1,n}.
    pub fn mean_field(&self) -> Complex64 {
        (0..self.cutoff())
            .map(|n| ((n + 1) as f64).sqrt() * self.rho[(n + 1, n)])
            .sum()
    }

    /// Mean photon number ⟨n̂⟩ = Σ_n n ρ_nn.
    pub fn mean_photon_number(&self) -> f64 {
        (0..self.dim()).map(|n| n as f64 * self.rho[(n, n)].re).sum()
    }

    /// Fidelity ⟨ψ|ρ|ψ⟩ against a pure state.
    pub fn fidelity_pure(&self, psi: &FockState) -> Result<f64> {
        check_same_dim(self.dim(), psi.dim())?;
        Ok((psi.amps().adjoint() * &self.rho * psi.amps())[(0, 0)].re)
    }

    /// The phase-rotated state e^{iφn̂} ρ e^{−iφn̂}.
    pub fn phase_rotated(&self, phi: f64) -> Self {
        let rho = DMatrix::from_fn(self.dim(), self.dim(), |m, n| {
            Complex64::from_polar(1.0, (m as f64 - n as f64) * phi) * self.rho[(m, n)]
        });
        Self { rho }
    }

    /// Smallest eigenvalue (by Hermitian eigendecomposition).
    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.rho)
    }
}

/// Result of a heralded filter event: the conditional state and the
/// unnormalized weight N = Σ_n g^{2n} ρ_nn of the successful outcome.
#[derive(Debug, Clone)]
pub struct HeraldedOutcome {
    /// The normalized post-selected state g^n̂ ρ g^n̂ / N.
    pub state: FockDensityMatrix,
    /// The weight N; a genuine success probability for g ≤ 1.
    pub weight: f64,
}

/// Applies the heralded filter ρ → g^n̂ ρ g^n̂ / N with N = Σ_n g^{2n} ρ_nn.
///
/// For g > 1 the filter pushes weight toward high Fock levels, so the result
/// is trusted only when the filtered weight decays well inside the truncated
/// basis; otherwise [`Error::DivergentAmplification`] is returned. Attenuation
/// (g ≤ 1) needs no such check.
pub fn apply_filter(state: &FockDensityMatrix, g: f64) -> Result<HeraldedOutcome> {
    check_gain(g)?;
    let dim = state.dim();
    let pow: Vec<f64> = (0..dim).map(|n| g.powi(n as i32)).collect();
    let mut rho = state.rho().clone();
    for n in 0..dim {
        for m in 0..dim {
            rho[(m, n)] *= pow[m] * pow[n];
        }
    }
    let weights: Vec<f64> = (0..dim).map(|n| rho[(n, n)].re).collect();
    let total = finite_weight(&weights, g, dim)?;
    if g > 1.0 {
        check_amplification_tail(&weights, total, g)?;
    }
    Ok(HeraldedOutcome {
        state: FockDensityMatrix::from_valid(rho / Complex64::from(total)),
        weight: total,
    })
}

/// Pure-state counterpart of [`apply_filter`]: c_n → g^n c_n / √N.
///
/// Returns the normalized output and the weight N = Σ_n g^{2n} |c_n|².
pub fn apply_filter_pure(state: &FockState, g: f64) -> Result<(FockState, f64)> {
    check_gain(g)?;
    let dim = state.dim();
    let amps = DVector::from_fn(dim, |n, _| state.amps()[n] * g.powi(n as i32));
    let weights: Vec<f64> = amps.iter().map(|c| c.norm_sqr()).collect();
    let total = finite_weight(&weights, g, dim)?;
    if g > 1.0 {
        check_amplification_tail(&weights, total, g)?;
    }
    Ok((
        FockState {
            amps: amps / Complex64::from(total.sqrt()),
        },
        total,
    ))
}

/// Central finite-difference estimate of d⟨ñ⟩/dg at gain `g`, where ⟨ñ⟩ is
/// the mean photon number after filtering. Nonnegative (within [`TOL_DERIV`])
/// for every physical state: the filter can only shift photon statistics in
/// the direction it is biased.
pub fn mean_photon_derivative(state: &FockDensityMatrix, g: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    if g - h <= 0.0 {
        return Err(Error::InvalidGain(g - h));
    }
    let upper = apply_filter(state, g + h)?.state.mean_photon_number();
    let lower = apply_filter(state, g - h)?.state.mean_photon_number();
    Ok((upper - lower) / (2.0 * h))
}

/// The annihilation operator â with â|n⟩ = √n |n−1⟩ on a `dim`-dimensional
/// truncated space.
pub fn annihilation_operator(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |m, n| {
        if n == m + 1 {
            Complex64::from((n as f64).sqrt())
        } else {
            Complex64::ZERO
        }
    })
}

/// The creation operator â† = (â)†.
pub fn creation_operator(dim: usize) -> DMatrix<Complex64> {
    annihilation_operator(dim).adjoint()
}

/// The number operator n̂ = â†â (diagonal 0, 1, 2, …).
pub fn number_operator(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |m, n| {
        if m == n {
            Complex64::from(n as f64)
        } else {
            Complex64::ZERO
        }
    })
}

/// The diagonal filter operator g^n̂.
pub fn filter_operator(g: f64, dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |m, n| {
        if m == n {
            Complex64::from(g.powi(n as i32))
        } else {
            Complex64::ZERO
        }
    })
}

/// The displacement operator D(α) = exp(αâ† − ᾱâ).
///
/// Computed by exponentiating the truncated generator, so matrix elements
/// near the truncation edge are only approximate; keep |α|² well below the
/// cutoff.
pub fn displacement_operator(alpha: Complex64, dim: usize) -> DMatrix<Complex64> {
    let generator = creation_operator(dim) * alpha - annihilation_operator(dim) * alpha.conj();
    generator.exp()
}

/// The squeeze operator S(r) = exp[(r/2)(â² − â†²)] for real r.
///
/// With this sign, S(r) with r > 0 shrinks the x-quadrature variance by
/// e^{−2r}. Same truncation caveat as [`displacement_operator`].
pub fn squeeze_operator(r: f64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation_operator(dim);
    let ad = creation_operator(dim);
    let generator = (&a * &a - &ad * &ad) * Complex64::from(0.5 * r);
    generator.exp()
}

/// The phase rotation R(θ) = e^{iθn̂} (diagonal e^{inθ}).
pub fn rotation_operator(theta: f64, dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |m, n| {
        if m == n {
            Complex64::from_polar(1.0, theta * n as f64)
        } else {
            Complex64::ZERO
        }
    })
}

/// First and second quadrature moments of a Fock-space state: the mean
/// vector (⟨x̂⟩, ⟨p̂⟩) and the covariance matrix γ normalized so the vacuum
/// gives the identity, with x̂ = (â+â†)/√2 and p̂ = i(â†−â)/√2.
///
/// This is how Gaussian-layer predictions are read back out of brute-force
/// Fock simulations.
pub fn quadrature_statistics(
    state: &FockDensityMatrix,
) -> (nalgebra::Vector2<f64>, nalgebra::Matrix2<f64>) {
    let dim = state.dim();
    let a = annihilation_operator(dim);
    let ad = creation_operator(dim);
    let sqrt2_inv = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    let x = (&a + &ad) * sqrt2_inv;
    let p = (&ad - &a) * sqrt2_inv * Complex64::I;
    let expect = |op: &DMatrix<Complex64>| (op * state.rho()).trace().re;
    let mx = expect(&x);
    let mp = expect(&p);
    let xx = expect(&(&x * &x));
    let pp = expect(&(&p * &p));
    let xp = expect(&((&x * &p + &p * &x) * Complex64::from(0.5)));
    let mean = nalgebra::Vector2::new(mx, mp);
    let gamma = nalgebra::Matrix2::new(
        2.0 * (xx - mx * mx),
        2.0 * (xp - mx * mp),
        2.0 * (xp - mx * mp),
        2.0 * (pp - mp * mp),
    );
    (mean, gamma)
}

/// A random low-rank density matrix with amplitude envelope `decay`^n,
/// suitable for property suites: `rank` Gaussian-random pure states with
/// random mixture weights. `decay` < 1 keeps the Fock tail small enough that
/// moderate amplification stays faithful at the given cutoff.
pub fn random_density<R: Rng + ?Sized>(
    cutoff: usize,
    decay: f64,
    rank: usize,
    rng: &mut R,
) -> FockDensityMatrix {
    let dim = cutoff + 1;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for _ in 0..rank.max(1) {
        let v = DVector::from_fn(dim, |n, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * decay.powi(n as i32)
        });
        let weight: f64 = rng.random::<f64>() + 1e-3;
        rho += (&v * v.adjoint()) * Complex64::from(weight / v.norm_squared());
    }
    let trace = rho.trace().re;
    FockDensityMatrix::from_valid(rho / Complex64::from(trace))
}

fn check_gain(g: f64) -> Result<()> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::InvalidGain(g));
    }
    Ok(())
}

fn check_same_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::CutoffMismatch {
            expected: expected - 1,
            got: got - 1,
        });
    }
    Ok(())
}

fn finite_weight(weights: &[f64], g: f64, dim: usize) -> Result<f64> {
    let total: f64 = weights.iter().sum();
    if !total.is_finite() {
        return Err(Error::DivergentAmplification {
            gain: g,
            level: dim - 1,
            tail_mass: f64::INFINITY,
        });
    }
    if total < 1e-300 {
        return Err(Error::DegenerateHerald(total));
    }
    Ok(total)
}

/// Rejects amplification results whose weight has not decayed by the
/// truncation edge: either the last two levels carry ≥ [`TOL_TAIL`] of the
/// filtered weight, or the per-level weights are still growing across the
/// final [`K_TAIL`] levels while that window is non-negligible.
fn check_amplification_tail(weights: &[f64], total: f64, g: f64) -> Result<()> {
    let dim = weights.len();
    let edge = dim.saturating_sub(2);
    let tail: f64 = weights[edge..].iter().sum::<f64>() / total;
    if tail >= TOL_TAIL {
        return Err(Error::DivergentAmplification {
            gain: g,
            level: edge,
            tail_mass: tail,
        });
    }
    if dim >= K_TAIL {
        let window = &weights[dim - K_TAIL..];
        let window_mass: f64 = window.iter().sum::<f64>() / total;
        if window[K_TAIL - 1] > window[0] && window_mass >= TOL_TAIL {
            return Err(Error::DivergentAmplification {
                gain: g,
                level: dim - K_TAIL,
                tail_mass: window_mass,
            });
        }
    }
    Ok(())
}

fn min_eigenvalue(rho: &DMatrix<Complex64>) -> f64 {
    rho.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}
