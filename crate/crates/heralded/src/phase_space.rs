//! Husimi Q-functions on complex grids and the filter's action on
//! phase-space densities.
//!
//! The filter g^n̂ has strikingly simple phase-space laws: up to
//! normalization it reweights the Q-function as Q̃(α) ∝ e^{(g²−1)|α|²} Q(gα)
//! and a regular P density as P̃(α) ∝ e^{(1−1/g²)|α|²} P(α/g). This module
//! implements both, giving a third representation — besides Fock matrices
//! and Gaussian moments — against which the others are cross-checked
//! (the "representation triangle" in the test and verify suites).
//!
//! Q-grids carry plain Riemann-sum normalization; on the default grid the
//! rectangle rule is spectrally accurate for the smooth, rapidly decaying
//! functions that arise here, so grid quadrature is never the limiting
//! error. Interpolation (bilinear, for resampling Q(gα) between nodes) is,
//! and sets the 10⁻⁴ tolerances quoted below.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use nalgebra::{DVector, Matrix2, Vector2};
use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::FockDensityMatrix;
use crate::gaussian::GaussianState;

/// Q values may dip this far below zero before the grid is rejected —
/// matched to the positivity slack allowed on density matrices.
pub const TOL_Q: f64 = 1e-8;

/// A grid must capture at least 1 − TOL_QNORM of a normalized state's mass.
pub const TOL_QNORM: f64 = 1e-4;

/// Quadrature slack allowed on ∫P d²α = 1 when admitting a P density.
pub const TOL_P_NORM: f64 = 1e-3;

/// If, after reweighting for amplification, more than this fraction of the
/// mass sits where the resampling runs out of grid data, the result would
/// not be faithful. Matched to [`TOL_QNORM`]: grids represent states to
/// one part in 10⁴ throughout.
pub const BOUNDARY_MASS_TOL: f64 = 1e-4;

/// A square uniform grid in the complex plane: both axes run over
/// [`min`, `max`] with `nodes` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub nodes: usize,
}

impl Default for GridSpec {
    /// α ∈ [−5, 5]² with 401×401 nodes (spacing 0.025): covers every state
    /// exercised here (⟨n̂⟩ ≲ 6) with quadrature error far below the
    /// interpolation tolerance.
    fn default() -> Self {
        Self {
            min: -5.0,
            max: 5.0,
            nodes: 401,
        }
    }
}

impl GridSpec {
    pub fn new(min: f64, max: f64, nodes: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::InvalidArgument(format!(
                "grid bounds must be finite with max > min, got [{min}, {max}]"
            )));
        }
        if nodes < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 nodes per axis, got {nodes}"
            )));
        }
        Ok(Self { min, max, nodes })
    }

    /// Node spacing along each axis.
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.nodes - 1) as f64
    }

    /// Coordinate of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step()
    }
}

/// A Q-function sampled on a [`GridSpec`]: `values[[i, j]] = Q(node(i) + i·node(j))`
/// with the first index along α_R and the second along α_I.
#[derive(Debug, Clone, PartialEq)]
pub struct QGrid {
    spec: GridSpec,
    values: Array2<f64>,
}

impl QGrid {
    /// Admits a sampled Q-function, enforcing positivity (within [`TOL_Q`])
    /// and that the grid captures the state: Riemann mass ≥ 1 − [`TOL_QNORM`].
    fn validated(spec: GridSpec, values: Array2<f64>) -> Result<Self> {
        if let Some(&worst) = values
            .iter()
            .filter(|v| **v < -TOL_Q)
            .min_by(|a, b| a.total_cmp(b))
        {
            return Err(Error::InvalidArgument(format!(
                "Q-function value {worst:.3e} below -{TOL_Q:.0e}; input is not a state"
            )));
        }
        let grid = Self { spec, values };
        let mass = grid.mass();
        if (mass - 1.0).abs() > TOL_QNORM {
            return Err(Error::GridTooSmall(format!(
                "grid [{}, {}] with {} nodes captures mass {mass:.8}, need 1 within {TOL_QNORM:.0e}",
                spec.min, spec.max, spec.nodes
            )));
        }
        Ok(grid)
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    /// The sampled values, first index α_R, second α_I.
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Riemann-sum mass ∫ Q d²α.
    pub fn mass(&self) -> f64 {
        let h = self.spec.step();
        self.values.sum() * h * h
    }

    /// ⟨â⟩ read off the grid: ∫ α Q(α) d²α / ∫ Q d²α. Anti-normal ordering
    /// makes the numerator exactly the mean field for an exact Q, so the
    /// only error here is quadrature.
    pub fn mean_field(&self) -> Complex64 {
        let mut sum = Complex64::ZERO;
        let mut mass = 0.0;
        for ((i, j), &q) in self.values.indexed_iter() {
            sum += Complex64::new(self.spec.node(i), self.spec.node(j)) * q;
            mass += q;
        }
        sum / mass
    }

    /// Serializes the grid as CSV rows `alpha_re,alpha_im,q` for external
    /// plotting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "alpha_re,alpha_im,q")?;
        for ((i, j), &q) in self.values.indexed_iter() {
            writeln!(
                out,
                "{:.12e},{:.12e},{:.12e}",
                self.spec.node(i),
                self.spec.node(j),
                q
            )?;
        }
        Ok(())
    }
}

/// Samples Q(α) = ⟨α|ρ|α⟩/π on the grid. The overlap is evaluated with the
/// analytic coherent coefficients up to ρ's cutoff, so the only truncation
/// in play is ρ's own. Node-parallel.
///
/// Internally uses the spectral form Q(α) = Σ_k λ_k |⟨α|v_k⟩|²/π: one
/// Hermitian eigendecomposition up front, then O(rank·dim) per node — a
/// large win for the (near-)pure states that dominate the corpora here.
pub fn q_from_density(rho: &FockDensityMatrix, spec: &GridSpec) -> Result<QGrid> {
    let n = spec.nodes;
    let dim = rho.dim();
    let eigen = rho.rho().clone().symmetric_eigen();
    let components: Vec<(f64, DVector<Complex64>)> = eigen
        .eigenvalues
        .iter()
        .zip(eigen.eigenvectors.column_iter())
        .filter(|(weight, _)| weight.abs() > 1e-14)
        .map(|(weight, vector)| (*weight, vector.into_owned()))
        .collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = spec.node(i);
            (0..n)
                .map(|j| {
                    let alpha = Complex64::new(x, spec.node(j));
                    let coh = raw_coherent_vector(alpha, dim);
                    components
                        .iter()
                        .map(|(weight, vector)| {
                            let overlap: Complex64 = coh
                                .iter()
                                .zip(vector.iter())
                                .map(|(c, v)| c.conj() * v)
                                .sum();
                            weight * overlap.norm_sqr()
                        })
                        .sum::<f64>()
                        / std::f64::consts::PI
                })
                .collect()
        })
        .collect();
    let values = Array2::from_shape_vec((n, n), rows.into_iter().flatten().collect())
        .expect("row-major assembly matches grid shape");
    QGrid::validated(*spec, values)
}

/// Samples the closed-form Gaussian Q-function
/// Q(α) = 2/(π√det(γ+I)) · e^{−(r−d)ᵀ(γ+I)⁻¹(r−d)}, r = √2(α_R, α_I).
pub fn gaussian_q(state: &GaussianState, spec: &GridSpec) -> Result<QGrid> {
    let sigma = state.gamma() + Matrix2::identity();
    let det = sigma.determinant();
    let inv = sigma.try_inverse().ok_or(Error::SingularMatrix {
        context: "γ+I in the Gaussian Q-function",
    })?;
    let prefactor = 2.0 / (std::f64::consts::PI * det.sqrt());
    let n = spec.nodes;
    let values = Array2::from_shape_fn((n, n), |(i, j)| {
        let r = Vector2::new(
            std::f64::consts::SQRT_2 * spec.node(i),
            std::f64::consts::SQRT_2 * spec.node(j),
        ) - state.d();
        prefactor * (-(r.transpose() * inv * r)[(0, 0)]).exp()
    });
    QGrid::validated(*spec, values)
}

/// The filter's Q-function law: Q̃(α) ∝ e^{(g²−1)|α|²} Q(gα), resampled on
/// the same grid by bilinear interpolation (zero outside the input's extent)
/// and renormalized by Riemann sum.
///
/// For g > 1 the reweighted product must have decayed by the time the
/// resampling point gα runs out of grid data: nodes whose pullback sits
/// within two steps of the input boundary hold the last samples we have.
/// If more than [`BOUNDARY_MASS_TOL`] of the mass lives there, the result
/// would be an artifact of truncation — [`Error::DivergentAmplification`]
/// when the mass still grows outward (the state violates the amplification
/// bound and the product diverges), [`Error::GridTooSmall`] when it decays
/// but the grid simply ends too early (extent must exceed g × the amplified
/// state's support).
pub fn transform_q(q: &QGrid, g: f64) -> Result<QGrid> {
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::InvalidGain(g));
    }
    let spec = q.spec();
    let n = spec.nodes;
    let reweighted = Array2::from_shape_fn((n, n), |(i, j)| {
        let (x, y) = (spec.node(i), spec.node(j));
        ((g * g - 1.0) * (x * x + y * y)).exp() * bilinear(q, g * x, g * y)
    });
    let total = reweighted.sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::ZeroNorm(total));
    }
    let h = spec.step();
    if g > 1.0 {
        // Band edges of the pullback domain [min/g, max/g], in node
        // coordinates: the outermost two node rings with data, and the two
        // rings just inside them.
        let (lo, hi) = (spec.min / g, spec.max / g);
        // Band thresholds sit at half-steps so that node-aligned distances
        // (g commensurate with the grid) don't flip buckets on float noise.
        let (mut edge, mut inner) = (0.0, 0.0);
        for ((i, j), &v) in reweighted.indexed_iter() {
            let (x, y) = (spec.node(i), spec.node(j));
            let dist = (x - lo).min(hi - x).min(y - lo).min(hi - y);
            if dist < 0.0 {
                continue;
            } else if dist < 1.5 * h {
                edge += v;
            } else if dist < 3.5 * h {
                inner += v;
            }
        }
        if edge / total > BOUNDARY_MASS_TOL {
            if edge >= inner {
                return Err(Error::DivergentAmplification {
                    gain: g,
                    level: n - 1,
                    tail_mass: edge / total,
                });
            }
            return Err(Error::GridTooSmall(format!(
                "amplified Q carries mass fraction {:.3e} at the edge of the resampled \
                 domain [{lo:.3}, {hi:.3}]; the grid extent must exceed g × the amplified \
                 state's support",
                edge / total
            )));
        }
    }
    Ok(QGrid {
        spec,
        values: reweighted / (total * h * h),
    })
}

/// Reads Gaussian moments off a Q-grid: anti-normal ordering shifts the
/// heterodyne covariance by half a vacuum unit, so γ = 4Σ_Q − I and
/// d = √2·mean. For non-Gaussian states this is the Gaussian with matching
/// first and second moments.
pub fn fit_gaussian(q: &QGrid) -> Result<GaussianState> {
    let spec = q.spec();
    let mut mass = 0.0;
    let (mut mx, mut my) = (0.0, 0.0);
    for ((i, j), &v) in q.values().indexed_iter() {
        mass += v;
        mx += spec.node(i) * v;
        my += spec.node(j) * v;
    }
    mx /= mass;
    my /= mass;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for ((i, j), &v) in q.values().indexed_iter() {
        let (dx, dy) = (spec.node(i) - mx, spec.node(j) - my);
        sxx += dx * dx * v;
        sxy += dx * dy * v;
        syy += dy * dy * v;
    }
    sxx /= mass;
    sxy /= mass;
    syy /= mass;
    let gamma = Matrix2::new(4.0 * sxx - 1.0, 4.0 * sxy, 4.0 * sxy, 4.0 * syy - 1.0);
    let d = Vector2::new(std::f64::consts::SQRT_2 * mx, std::f64::consts::SQRT_2 * my);
    GaussianState::new(gamma, d)
}

/// A regular Glauber–Sudarshan P density, held as a callable. Singular
/// distributions (Fock states, photon-added states) are out of scope here;
/// such states go through the Q-function instead.
#[derive(Clone)]
pub struct PDensity {
    density: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>,
}

impl fmt::Debug for PDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PDensity(<callable>)")
    }
}

/// Integration domain used to admit and normalize P densities: wide enough
/// for every transformed density exercised here, fine enough (spacing 0.02)
/// for regularized peaks down to σ² ≈ 10⁻³.
fn p_probe() -> GridSpec {
    GridSpec {
        min: -8.0,
        max: 8.0,
        nodes: 801,
    }
}

impl PDensity {
    /// Admits a callable as a P density, checking ∫P d²α = 1 within
    /// [`TOL_P_NORM`] on the probe domain [−8, 8]².
    pub fn new<F>(density: F) -> Result<Self>
    where
        F: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        let p = Self {
            density: Arc::new(density),
        };
        let mass = p.mass_on(&p_probe());
        if !mass.is_finite() || (mass - 1.0).abs() > TOL_P_NORM {
            return Err(Error::InvalidArgument(format!(
                "P density mass {mass:.6} is not 1 within {TOL_P_NORM:.0e} on the probe domain"
            )));
        }
        Ok(p)
    }

    /// Regularized coherent state |c⟩: an isotropic Gaussian peak
    /// e^{−|α−c|²/σ²}/(πσ²). The σ² → 0 limit is the coherent state's
    /// delta-function P.
    pub fn gaussian_peak(center: Complex64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "peak variance must be positive and finite, got {variance}"
            )));
        }
        Self::new(move |alpha| {
            (-(alpha - center).norm_sqr() / variance).exp() / (std::f64::consts::PI * variance)
        })
    }

    /// Regularized two-component coherent mixture
    /// p|α₀⟩⟨α₀| + (1−p)|β₀⟩⟨β₀|.
    pub fn two_coherent_peaks(
        alpha: Complex64,
        beta: Complex64,
        p: f64,
        variance: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "mixture weight must lie in [0,1], got {p}"
            )));
        }
        let a = Self::gaussian_peak(alpha, variance)?;
        let b = Self::gaussian_peak(beta, variance)?;
        Self::new(move |z| p * a.eval(z) + (1.0 - p) * b.eval(z))
    }

    /// P(α).
    pub fn eval(&self, alpha: Complex64) -> f64 {
        (self.density)(alpha)
    }

    /// Riemann-sum mass over a grid.
    pub fn mass_on(&self, spec: &GridSpec) -> f64 {
        let h = spec.step();
        let total: f64 = (0..spec.nodes)
            .into_par_iter()
            .map(|i| {
                let x = spec.node(i);
                (0..spec.nodes)
                    .map(|j| self.eval(Complex64::new(x, spec.node(j))))
                    .sum::<f64>()
            })
            .sum();
        total * h * h
    }

    /// Mass-normalized mean ∫ α P d²α / ∫ P d²α over a grid.
    pub fn mean_on(&self, spec: &GridSpec) -> Complex64 {
        let mut sum = Complex64::ZERO;
        let mut mass = 0.0;
        for i in 0..spec.nodes {
            let x = spec.node(i);
            for j in 0..spec.nodes {
                let v = self.eval(Complex64::new(x, spec.node(j)));
                sum += Complex64::new(x, spec.node(j)) * v;
                mass += v;
            }
        }
        sum / mass
    }
}

/// The filter's P-function law: P̃(α) ∝ e^{(1−1/g²)|α|²} P(α/g), normalized
/// numerically.
///
/// For g > 1 the reweighting grows at infinity and only densities that
/// decay fast enough stay integrable. Integrability is probed by comparing
/// the mass on [−5,5]² against the wider probe domain; relative growth
/// beyond 10⁻⁶ is reported as [`Error::NonIntegrable`].
pub fn transform_p(p: &PDensity, g: f64) -> Result<PDensity> {
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::InvalidGain(g));
    }
    let inner = p.density.clone();
    let reweighted = move |alpha: Complex64| {
        ((1.0 - 1.0 / (g * g)) * alpha.norm_sqr()).exp() * inner(alpha / g)
    };
    let unnormalized = PDensity {
        density: Arc::new(reweighted),
    };
    let near = unnormalized.mass_on(&GridSpec {
        min: -5.0,
        max: 5.0,
        nodes: 501,
    });
    let wide = unnormalized.mass_on(&p_probe());
    if !wide.is_finite() || wide <= 0.0 {
        return Err(Error::NonIntegrable(if wide.is_finite() {
            0.0
        } else {
            f64::INFINITY
        }));
    }
    let growth = (wide - near) / wide;
    if g > 1.0 && growth > 1e-6 {
        return Err(Error::NonIntegrable(growth));
    }
    let density = unnormalized.density.clone();
    Ok(PDensity {
        density: Arc::new(move |alpha| density(alpha) / wide),
    })
}

/// Coherent coefficients ⟨n|α⟩ = e^{−|α|²/2} αⁿ/√n! up to `dim` − 1, exact
/// for overlap evaluation against a truncated ρ.
fn raw_coherent_vector(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::ZERO; dim];
    let mut c = Complex64::from((-0.5 * alpha.norm_sqr()).exp());
    for (n, slot) in coeffs.iter_mut().enumerate() {
        *slot = c;
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    coeffs
}

/// Bilinear interpolation of the grid at (x, y); zero outside the extent.
fn bilinear(q: &QGrid, x: f64, y: f64) -> f64 {
    let spec = q.spec();
    let h = spec.step();
    let u = (x - spec.min) / h;
    let v = (y - spec.min) / h;
    let top = (spec.nodes - 1) as f64;
    if u < 0.0 || v < 0.0 || u > top || v > top {
        return 0.0;
    }
    let i0 = (u.floor() as usize).min(spec.nodes - 2);
    let j0 = (v.floor() as usize).min(spec.nodes - 2);
    let (fu, fv) = (u - i0 as f64, v - j0 as f64);
    let vals = q.values();
    vals[[i0, j0]] * (1.0 - fu) * (1.0 - fv)
        + vals[[i0 + 1, j0]] * fu * (1.0 - fv)
        + vals[[i0, j0 + 1]] * (1.0 - fu) * fv
        + vals[[i0 + 1, j0 + 1]] * fu * fv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_filter, squeeze_operator, FockState};
    use crate::gaussian::transform_gaussian;
    use crate::nongaussian::{build_spacs, mixture_weight, MixtureParams, SpacsParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn coherent_density(alpha: Complex64) -> FockDensityMatrix {
        FockState::coherent(alpha, 30).unwrap().to_density()
    }

    /// Squeezed vacuum Ŝ(r)|0⟩ as a truncated Fock vector.
    fn squeezed_truncated(r: f64, cutoff: usize) -> FockState {
        let op = squeeze_operator(r, cutoff + 1);
        let vacuum = FockState::vacuum(cutoff);
        FockState::new(op * vacuum.amps()).unwrap()
    }

    #[test]
    fn vacuum_q_peaks_at_one_over_pi() {
        let q = q_from_density(&FockState::vacuum(10).to_density(), &GridSpec::default()).unwrap();
        let center = (q.spec().nodes - 1) / 2;
        assert_abs_diff_eq!(
            q.values()[[center, center]],
            1.0 / std::f64::consts::PI,
            epsilon = 1e-12
        );
        assert!(q.values().iter().all(|&v| v >= 0.0));
        assert_abs_diff_eq!(q.mass(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn coherent_q_is_displaced_vacuum() {
        // β on-node so the analytic comparison has no interpolation in it.
        let beta = Complex64::new(0.8, -0.3);
        let q = q_from_density(&coherent_density(beta), &GridSpec::default()).unwrap();
        let spec = q.spec();
        let mut worst = 0.0_f64;
        for ((i, j), &v) in q.values().indexed_iter() {
            let alpha = Complex64::new(spec.node(i), spec.node(j));
            let exact = (-(alpha - beta).norm_sqr()).exp() / std::f64::consts::PI;
            worst = worst.max((v - exact).abs());
        }
        assert!(worst < 1e-10, "truncated-coherent Q off by {worst}");
    }

    #[test]
    fn gaussian_closed_form_matches_fock_route() {
        let state = GaussianState::squeezed(0.3).with_displacement(Vector2::new(0.4, 0.1));
        let spec = GridSpec::default();
        let closed = gaussian_q(&state, &spec).unwrap();
        let via_fock = q_from_density(&state.to_fock(30).unwrap(), &spec).unwrap();
        let diff = closed
            .values()
            .iter()
            .zip(via_fock.values().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(diff < 1e-8, "closed-form vs Fock-route Q differ by {diff}");
    }

    #[test]
    fn unit_gain_transform_is_identity() {
        let q = q_from_density(&coherent_density(Complex64::new(0.5, 0.25)), &GridSpec::default())
            .unwrap();
        let same = transform_q(&q, 1.0).unwrap();
        // Identity up to renormalization: the input grid's mass is 1 only up
        // to its (tiny) off-grid tail, which transform_q's normalization
        // removes.
        let diff = q
            .values()
            .iter()
            .zip(same.values().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(diff < 1e-9, "g = 1 should be exact, off by {diff}");
    }

    #[test]
    fn doubling_a_coherent_state_on_the_grid() {
        // Q of |0.5⟩ amplified at g = 2 vs Q of the filtered state |1.0⟩.
        // The grid must hold the *input's* Q out to g × the output support,
        // so the default extent 5 is not enough here.
        let spec = GridSpec::new(-10.0, 10.0, 801).unwrap();
        let q_in = q_from_density(&coherent_density(Complex64::from(0.5)), &spec).unwrap();
        let amplified = transform_q(&q_in, 2.0).unwrap();
        let filtered = apply_filter(&coherent_density(Complex64::from(0.5)), 2.0).unwrap();
        let oracle = q_from_density(&filtered.state, &spec).unwrap();
        let diff = amplified
            .values()
            .iter()
            .zip(oracle.values().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(diff < 1e-4, "grid-law vs filter-oracle Q differ by {diff}");
    }

    #[test]
    fn amplification_past_the_grid_edge_is_rejected() {
        // On the default extent, g = 2 would resample |0.5⟩'s Q beyond the
        // available data while the output still has ~3% of its mass there;
        // the transform must refuse rather than silently truncate.
        let q = q_from_density(&coherent_density(Complex64::from(0.5)), &GridSpec::default())
            .unwrap();
        assert!(matches!(
            transform_q(&q, 2.0),
            Err(Error::GridTooSmall(_))
        ));
    }

    #[test]
    fn grid_mean_field_matches_fock_mean_field() {
        // ⟨â⟩ = ∫αQ d²α exactly; quadrature is the only error.
        let state = FockState::from_amplitudes(&[
            Complex64::from(std::f64::consts::FRAC_1_SQRT_2),
            Complex64::from(std::f64::consts::FRAC_1_SQRT_2),
            Complex64::ZERO,
            Complex64::ZERO,
        ])
        .unwrap();
        let filtered = apply_filter(&state.to_density(), 0.5).unwrap();
        let q = q_from_density(&filtered.state, &GridSpec::default()).unwrap();
        let from_grid = q.mean_field();
        let from_fock = filtered.state.mean_field();
        assert!(
            (from_grid - from_fock).norm() < 1e-6,
            "grid ⟨â⟩ = {from_grid}, Fock ⟨â⟩ = {from_fock}"
        );
    }

    #[test]
    fn overbroad_state_diverges_at_the_boundary() {
        // Thermal n̄ = 1.5 has V = 2 > the g = 1.5 bound 1.3: the reweighted
        // mass piles up on the grid edge instead of converging.
        let thermal = FockDensityMatrix::thermal(1.5, 40).unwrap();
        let q = q_from_density(&thermal, &GridSpec::default()).unwrap();
        assert!(matches!(
            transform_q(&q, 1.5),
            Err(Error::DivergentAmplification { .. })
        ));
    }

    #[test]
    fn grid_too_small_for_a_far_out_state() {
        let far = FockState::coherent(Complex64::from(3.5), 50)
            .unwrap()
            .to_density();
        let tight = GridSpec::new(-2.0, 2.0, 161).unwrap();
        assert!(matches!(
            q_from_density(&far, &tight),
            Err(Error::GridTooSmall(_))
        ));
    }

    #[test]
    fn representation_triangle_closes() {
        // (filter, then Q) == (Q, then grid transform) over a corpus of
        // coherent, squeezed and photon-added states, attenuating and
        // amplifying. Tolerance is set by bilinear interpolation.
        let corpus: Vec<FockDensityMatrix> = vec![
            coherent_density(Complex64::new(0.8, -0.3)),
            squeezed_truncated(0.3, 30).to_density(),
            build_spacs(&SpacsParams::new(0.25, -0.55), 30)
                .unwrap()
                .to_density(),
        ];
        // Bilinear interpolation error scales as h²; the default spacing
        // 0.025 gives ~1.3×10⁻⁴ sup-norm error on vacuum-width Gaussians,
        // so the 10⁻⁴ budget needs the slightly finer 601-node grid.
        let spec = GridSpec::new(-5.0, 5.0, 601).unwrap();
        for rho in &corpus {
            for &g in &[0.5, 0.8, 1.0, 1.25] {
                let via_fock =
                    q_from_density(&apply_filter(rho, g).unwrap().state, &spec).unwrap();
                let via_grid = transform_q(&q_from_density(rho, &spec).unwrap(), g).unwrap();
                let diff = via_fock
                    .values()
                    .iter()
                    .zip(via_grid.values().iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max);
                assert!(diff < 1e-4, "triangle gap {diff} at g = {g}");
            }
        }
    }

    #[test]
    fn transformed_gaussian_grid_stays_gaussian() {
        let state = GaussianState::squeezed(0.3).with_displacement(Vector2::new(0.5, -0.2));
        // Second moments are boundary-sensitive (bias ~ r²·tail mass), so
        // the extent must cover ~6σ of the transformed state; on top of
        // that, bilinear resampling biases the fitted covariance by O(h²).
        // Extent 6 at spacing 0.0075 keeps both under the 10⁻⁴ budget.
        let spec = GridSpec::new(-6.0, 6.0, 1601).unwrap();
        for &g in &[0.8, 1.2] {
            let transformed = transform_q(&gaussian_q(&state, &spec).unwrap(), g).unwrap();
            let fitted = fit_gaussian(&transformed).unwrap();
            let expected = transform_gaussian(&state, g).unwrap();
            let gamma_gap = (fitted.gamma() - expected.gamma()).abs().max();
            let d_gap = (fitted.d() - expected.d()).abs().max();
            assert!(
                gamma_gap < 1e-4 && d_gap < 1e-4,
                "moment fit off by γ: {gamma_gap}, d: {d_gap} at g = {g}"
            );
        }
    }

    #[test]
    fn moment_fit_recovers_exact_gaussian() {
        // Extent 6 keeps the anti-squeezed axis's off-grid second-moment
        // tail below the covariance validator's tolerance.
        let state = GaussianState::squeezed(-0.25).with_displacement(Vector2::new(0.3, 0.6));
        let spec = GridSpec::new(-6.0, 6.0, 481).unwrap();
        let fitted = fit_gaussian(&gaussian_q(&state, &spec).unwrap()).unwrap();
        assert!((fitted.gamma() - state.gamma()).abs().max() < 1e-8);
        assert!((fitted.d() - state.d()).abs().max() < 1e-8);
    }

    #[test]
    fn narrow_peak_attenuates_like_a_coherent_state() {
        // Regularized |0.8⟩ through ν = 0.5. The exact mean of the
        // transformed regularized Gaussian is να₀/(1 − σ²(ν²−1)); as σ² → 0
        // it approaches the coherent-state answer να₀ = 0.4.
        let variance = 0.004;
        let p = PDensity::gaussian_peak(Complex64::from(0.8), variance).unwrap();
        let attenuated = transform_p(&p, 0.5).unwrap();
        let mean = attenuated.mean_on(&p_probe());
        let exact = 0.5 * 0.8 / (1.0 - variance * (0.25 - 1.0));
        assert_abs_diff_eq!(mean.re, exact, epsilon = 1e-6);
        assert_abs_diff_eq!(mean.im, 0.0, epsilon = 1e-9);
        // Coherent-state limit: the filtered |0.8⟩ has mean field 0.4.
        let filtered = apply_filter(&coherent_density(Complex64::from(0.8)), 0.5).unwrap();
        assert_abs_diff_eq!(mean.re, filtered.state.mean_field().re, epsilon = 2e-3);
    }

    #[test]
    fn unit_gain_p_transform_is_identity() {
        let p = PDensity::gaussian_peak(Complex64::new(0.3, -0.4), 0.01).unwrap();
        let same = transform_p(&p, 1.0).unwrap();
        for &(x, y) in &[(0.3, -0.4), (0.0, 0.0), (0.5, 0.1)] {
            let z = Complex64::new(x, y);
            assert_relative_eq!(same.eval(z), p.eval(z), max_relative = 1e-9);
        }
    }

    #[test]
    fn two_peak_mixture_amplifies_with_reweighted_peaks() {
        // The regularized two-peak P of the coherent mixture (α = 1,
        // β = −0.9, p = 1/3) at g = 2: peaks move to gα and gβ and their
        // weights become p′ of the closed-form mixture law, up to an O(σ²)
        // regularization correction that is itself known exactly:
        // w̃ᵢ ∝ wᵢ e^{(g²−1)|cᵢ|²/κ} with κ = 1 − σ²(g²−1).
        let (g, variance) = (2.0, 0.002);
        let p = PDensity::two_coherent_peaks(
            Complex64::from(1.0),
            Complex64::from(-0.9),
            1.0 / 3.0,
            variance,
        )
        .unwrap();
        let amplified = transform_p(&p, g).unwrap();

        // Mass on the Re α > 0 half-plane = weight of the amplified α-peak.
        let probe = p_probe();
        let h = probe.step();
        let mut right = 0.0;
        let mut total = 0.0;
        for i in 0..probe.nodes {
            let x = probe.node(i);
            for j in 0..probe.nodes {
                let v = amplified.eval(Complex64::new(x, probe.node(j))) * h * h;
                total += v;
                if x > 0.0 {
                    right += v;
                }
            }
        }
        let kappa = 1.0 - variance * (g * g - 1.0);
        let boost = |c: f64, w: f64| w * ((g * g - 1.0) * c * c / kappa).exp();
        let exact_regularized =
            boost(1.0, 1.0 / 3.0) / (boost(1.0, 1.0 / 3.0) + boost(-0.9, 2.0 / 3.0));
        assert_abs_diff_eq!(right / total, exact_regularized, epsilon = 1e-6);

        // …and the regularized weight is the closed-form p′ up to O(σ²).
        let params =
            MixtureParams::new(Complex64::from(1.0), Complex64::from(-0.9), 1.0 / 3.0).unwrap();
        assert_abs_diff_eq!(right / total, mixture_weight(&params, g), epsilon = 2e-2);
    }

    #[test]
    fn overly_broad_peak_is_not_integrable() {
        // e^{(1−1/g²)|α|²} at g = 2 grows like e^{0.75|α|²}; a peak of
        // variance σ² ≥ 1/(g²−1) = 1/3 cannot be renormalized.
        let broad = PDensity::gaussian_peak(Complex64::ZERO, 0.5).unwrap();
        assert!(matches!(
            transform_p(&broad, 2.0),
            Err(Error::NonIntegrable(_))
        ));
    }

    #[test]
    fn csv_serialization_round_trips_values() {
        let spec = GridSpec::new(-1.0, 1.0, 3).unwrap();
        let values = Array2::from_shape_fn((3, 3), |(i, j)| (i + 3 * j) as f64 * 0.01);
        // Bypass normalization checks: serialization is format-only.
        let grid = QGrid { spec, values };
        let mut buffer = Vec::new();
        grid.write_csv(&mut buffer).unwrap();
        let text = String::from_utf8(buffer).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("alpha_re,alpha_im,q"));
        assert_eq!(text.lines().count(), 1 + 9);
        // Node (2,0) → α = 1 − i, Q = values[[2,0]] = 0.02.
        let row = text
            .lines()
            .find(|l| l.starts_with("1.000000000000e0,-1."))
            .unwrap();
        let q: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_abs_diff_eq!(q, 0.02, epsilon = 1e-15);
    }
}
