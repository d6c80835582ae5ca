//! Parameter sweeps driven by a declarative TOML config, emitted as CSV.
//!
//! A scan fixes all but one parameter of a scenario, sweeps that parameter
//! over a linear grid, and records per grid point: the input mean field A,
//! the filtered mean field Ã, the effective gain Ã/A, the heralding weight,
//! and the residual of the closed form against the brute-force Fock oracle.
//! Rows are computed in parallel but always written in sweep order, and no
//! scenario uses randomness, so identical configs produce byte-identical
//! CSV files.
//!
//! A config file looks like
//!
//! ```toml
//! scenario = "experiment"
//! # cutoff = 20          # optional: oracle truncation override
//! # output = "fig3.csv"  # optional: written by `write_scan`, else stdout
//!
//! [sweep]
//! parameter = "nu"
//! start = 0.05
//! stop = 1.0
//! steps = 96
//!
//! [params]
//! alpha = 0.25
//! delta = -0.55
//! eta = 1.0
//! p = 1.0
//! ```
//!
//! and individual keys can be overridden from the command line with
//! `--set sweep.steps=200` or `--set delta=-0.6` (bare names address
//! `[params]` entries).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Vector2;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::experiment::{self, SetupParams, DEFAULT_MODE_CUTOFF};
use crate::fock::{apply_filter, apply_filter_pure, DEFAULT_CUTOFF, TOL_NORM, TOL_TAIL};
use crate::gaussian::{effective_gain, transform_gaussian, GaussianState};
use crate::nongaussian::{
    build_spacs, gain_mixture, gain_psi1, gain_psi2, spacs_amplitude,
    spacs_attenuated_amplitude, MixtureParams, Psi1Params, Psi2Params, SpacsParams,
    ZERO_AMPLITUDE,
};

/// Input amplitudes below this magnitude get the `near_zero_input` flag in
/// the CSV. The gain is still emitted — the divergence near zeros of A is
/// the interesting physics — but its value is dominated by how close the
/// working point sits to the zero, not by the filter itself.
pub const NEAR_ZERO_INPUT: f64 = 1e-6;

/// The six sweepable scenario families.
///
/// Each scenario owns a fixed set of real parameters; exactly one of them is
/// swept and the rest must be pinned in the config's `[params]` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Superposition c₀|0⟩ + c₁|1⟩ under the filter g^n̂. Parameters: `c1`, `g`.
    Psi1,
    /// Superposition of the three lowest Fock states. Parameters: `c0`, `c1`,
    /// `c2` (must be normalized), `g`.
    Psi2,
    /// Binary mixture of two coherent states. Parameters: `alpha`, `beta`,
    /// `p`, `g`. Real amplitudes only — the library handles complex ones, but
    /// the scan plumbing sticks to the real-valued landscape.
    Mixture,
    /// Ideal photon-added coherent state under pure attenuation ν^n̂.
    /// Parameters: `alpha`, `delta`, `nu`.
    Spacs,
    /// Gaussian state, squeezed along x and displaced along x, under g^n̂.
    /// Parameters: `s` (squeezing), `alpha` (displacement), `g`.
    Gaussian,
    /// Full three-mode experiment model: beam-splitter attenuator ν, detector
    /// efficiency η, addition-source purity p. Parameters: `alpha`, `delta`,
    /// `nu`, `eta`, `p`.
    Experiment,
}

impl Scenario {
    /// The complete parameter set of the scenario; the swept parameter must
    /// be one of these and all others must be fixed.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            Scenario::Psi1 => &["c1", "g"],
            Scenario::Psi2 => &["c0", "c1", "c2", "g"],
            Scenario::Mixture => &["alpha", "beta", "p", "g"],
            Scenario::Spacs => &["alpha", "delta", "nu"],
            Scenario::Gaussian => &["s", "alpha", "g"],
            Scenario::Experiment => &["alpha", "delta", "nu", "eta", "p"],
        }
    }

    /// The lowercase name used in config files and CSV headers.
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Psi1 => "psi1",
            Scenario::Psi2 => "psi2",
            Scenario::Mixture => "mixture",
            Scenario::Spacs => "spacs",
            Scenario::Gaussian => "gaussian",
            Scenario::Experiment => "experiment",
        }
    }

    fn from_name(name: &str) -> Result<Self> {
        match name {
            "psi1" => Ok(Scenario::Psi1),
            "psi2" => Ok(Scenario::Psi2),
            "mixture" => Ok(Scenario::Mixture),
            "spacs" => Ok(Scenario::Spacs),
            "gaussian" => Ok(Scenario::Gaussian),
            "experiment" => Ok(Scenario::Experiment),
            other => Err(Error::Config(format!(
                "unknown scenario '{other}' (expected one of psi1, psi2, mixture, spacs, gaussian, experiment)"
            ))),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The swept parameter and its linear grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Name of the parameter being swept; must belong to the scenario.
    pub parameter: String,
    /// First grid value.
    pub start: f64,
    /// Last grid value (ignored when `steps == 1`).
    pub stop: f64,
    /// Number of grid points, ≥ 1.
    pub steps: usize,
}

impl SweepSpec {
    /// The grid values in sweep order: `steps` equally spaced points from
    /// `start` to `stop` inclusive (just `[start]` when `steps == 1`).
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        (0..self.steps)
            .map(|i| self.start + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// A declarative scan: scenario, swept parameter, fixed parameters, and
/// optional output path / oracle-cutoff override.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// Which closed-form family to sweep.
    pub scenario: Scenario,
    /// Where `write_scan` puts the CSV; `None` means the caller's stdout.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Fock truncation used for the oracle column (and, for the experiment
    /// scenario, for the three-mode simulation). Defaults per scenario.
    #[serde(default)]
    pub cutoff: Option<usize>,
    /// The swept parameter and its grid.
    pub sweep: SweepSpec,
    /// Fixed values for every non-swept parameter of the scenario.
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl ScanConfig {
    /// Parses a TOML config string.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))
    }

    /// Reads and parses a TOML config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Applies a single `key=value` command-line override.
    ///
    /// Recognized keys: `scenario`, `output`, `cutoff`, `sweep.parameter`,
    /// `sweep.start`, `sweep.stop`, `sweep.steps`, and any parameter name
    /// (optionally prefixed `params.`), which is inserted into the fixed
    /// parameter table. Validation happens later, in [`ScanConfig::validate`].
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| {
            Error::Config(format!("override '{assignment}' is not of the form key=value"))
        })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "scenario" => self.scenario = Scenario::from_name(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "cutoff" => {
                self.cutoff = Some(value.parse().map_err(|_| {
                    Error::Config(format!("cutoff override '{value}' is not an integer"))
                })?);
            }
            "sweep.parameter" => self.sweep.parameter = value.to_owned(),
            "sweep.start" => self.sweep.start = parse_float(key, value)?,
            "sweep.stop" => self.sweep.stop = parse_float(key, value)?,
            "sweep.steps" => {
                self.sweep.steps = value.parse().map_err(|_| {
                    Error::Config(format!("sweep.steps override '{value}' is not an integer"))
                })?;
            }
            other => {
                let name = other.strip_prefix("params.").unwrap_or(other);
                let parsed = parse_float(name, value)?;
                self.params.insert(name.to_owned(), parsed);
            }
        }
        Ok(())
    }

    /// Checks that the sweep and fixed parameters exactly cover the
    /// scenario's parameter set.
    pub fn validate(&self) -> Result<()> {
        let known = self.scenario.parameters();
        if self.sweep.steps == 0 {
            return Err(Error::Config("sweep.steps must be at least 1".into()));
        }
        if !self.sweep.start.is_finite() || !self.sweep.stop.is_finite() {
            return Err(Error::Config(format!(
                "sweep range [{}, {}] must be finite",
                self.sweep.start, self.sweep.stop
            )));
        }
        if !known.contains(&self.sweep.parameter.as_str()) {
            return Err(Error::Config(format!(
                "scenario '{}' has no parameter '{}' to sweep (available: {})",
                self.scenario,
                self.sweep.parameter,
                known.join(", ")
            )));
        }
        for name in self.params.keys() {
            if !known.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "scenario '{}' has no parameter '{name}' (available: {})",
                    self.scenario,
                    known.join(", ")
                )));
            }
        }
        if self.params.contains_key(&self.sweep.parameter) {
            return Err(Error::Config(format!(
                "parameter '{}' is both swept and fixed",
                self.sweep.parameter
            )));
        }
        for name in known {
            if *name != self.sweep.parameter && !self.params.contains_key(*name) {
                return Err(Error::Config(format!(
                    "scenario '{}' needs a value for '{name}'",
                    self.scenario
                )));
            }
        }
        if let Some(cutoff) = self.cutoff {
            if cutoff < 2 {
                return Err(Error::Config(format!(
                    "cutoff {cutoff} leaves no room for a single excitation"
                )));
            }
        }
        Ok(())
    }

    /// The Fock truncation used for the oracle column: the config override,
    /// or the scenario default (the experiment's three-mode simulation uses
    /// a smaller per-mode cutoff than the single-mode oracles).
    pub fn oracle_cutoff(&self) -> usize {
        self.cutoff.unwrap_or(match self.scenario {
            Scenario::Experiment => DEFAULT_MODE_CUTOFF,
            _ => DEFAULT_CUTOFF,
        })
    }
}

fn parse_float(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("override '{key}={value}' is not a number")))
}

/// One grid point of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    /// Value of the swept parameter.
    pub sweep_value: f64,
    /// Mean field A of the input state.
    pub input_amplitude: f64,
    /// Mean field Ã of the heralded output state (closed form).
    pub output_amplitude: f64,
    /// Effective gain. For ratio-defined scenarios this is Ã/A; for the
    /// Gaussian scenario it is the displacement-map slope, which stays
    /// finite even at A = 0.
    pub gain: f64,
    /// Heralding weight (success probability for attenuation).
    pub weight: f64,
    /// Closed-form output amplitude minus the truncated-Fock oracle's.
    pub oracle_residual: f64,
    /// Whether |A| < [`NEAR_ZERO_INPUT`], i.e. the gain is dominated by the
    /// proximity of the working point to a zero of A.
    pub near_zero_input: bool,
}

/// Runs the scan, computing rows in parallel and returning them in sweep
/// order. Any invalid or unphysical grid point aborts the whole scan with
/// that point's error.
pub fn run_scan(config: &ScanConfig) -> Result<Vec<ScanRow>> {
    config.validate()?;
    let cutoff = config.oracle_cutoff();
    config
        .sweep
        .values()
        .into_par_iter()
        .map(|value| compute_row(config, value, cutoff))
        .collect()
}

/// Renders the rows as CSV with a commented header recording the artifact
/// version, scenario, full parameter set, cutoff and tolerances. Values are
/// written in scientific notation with 12 significant digits.
pub fn render_csv(config: &ScanConfig, rows: &[ScanRow]) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "# heralded {} scan", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(w, "# scenario = {}", config.scenario);
    let _ = writeln!(
        w,
        "# sweep = {} from {} to {} in {} steps",
        config.sweep.parameter,
        sci(config.sweep.start),
        sci(config.sweep.stop),
        config.sweep.steps
    );
    for (name, value) in &config.params {
        let _ = writeln!(w, "# param {name} = {}", sci(*value));
    }
    let _ = writeln!(w, "# cutoff = {}", config.oracle_cutoff());
    let _ = writeln!(
        w,
        "# tolerances: TOL_NORM = {TOL_NORM:e}, TOL_TAIL = {TOL_TAIL:e}, near_zero_input below {NEAR_ZERO_INPUT:e}"
    );
    let _ = writeln!(
        w,
        "# oracle_residual = closed-form output amplitude minus truncated-Fock simulation"
    );
    let _ = writeln!(
        w,
        "# deterministic: scans use no randomness; identical config gives identical bytes"
    );
    let _ = writeln!(
        w,
        "{},input_amplitude,output_amplitude,gain,weight,oracle_residual,near_zero_input",
        config.sweep.parameter
    );
    for row in rows {
        let _ = writeln!(
            w,
            "{},{},{},{},{},{},{}",
            sci(row.sweep_value),
            sci(row.input_amplitude),
            sci(row.output_amplitude),
            sci(row.gain),
            sci(row.weight),
            sci(row.oracle_residual),
            row.near_zero_input
        );
    }
    out
}

/// Runs the scan and renders the CSV; if the config names an output path the
/// CSV is also written there. Returns the CSV text either way.
pub fn write_scan(config: &ScanConfig) -> Result<String> {
    let rows = run_scan(config)?;
    let csv = render_csv(config, &rows);
    if let Some(path) = &config.output {
        std::fs::write(path, &csv)?;
    }
    Ok(csv)
}

/// Resolves a parameter by name from the sweep value or the fixed table.
struct RowParams<'a> {
    fixed: &'a BTreeMap<String, f64>,
    sweep_name: &'a str,
    sweep_value: f64,
}

impl RowParams<'_> {
    fn get(&self, name: &str) -> Result<f64> {
        if name == self.sweep_name {
            return Ok(self.sweep_value);
        }
        self.fixed
            .get(name)
            .copied()
            .ok_or_else(|| Error::Config(format!("missing parameter '{name}'")))
    }
}

fn compute_row(config: &ScanConfig, sweep_value: f64, cutoff: usize) -> Result<ScanRow> {
    let p = RowParams {
        fixed: &config.params,
        sweep_name: &config.sweep.parameter,
        sweep_value,
    };
    let (a_in, a_out, gain, weight, oracle_out) = match config.scenario {
        Scenario::Psi1 => {
            let params = Psi1Params::new(p.get("c1")?)?;
            let g = positive_gain(p.get("g")?)?;
            let c1 = p.get("c1")?;
            let a_in = params.c0() * c1;
            let gain = gain_psi1(&params, g);
            let weight = params.c0().powi(2) + g * g * c1 * c1;
            let (filtered, _) = apply_filter_pure(&params.state(cutoff)?, g)?;
            (a_in, gain * a_in, gain, weight, filtered.mean_field().re)
        }
        Scenario::Psi2 => {
            let params = Psi2Params::new(p.get("c0")?, p.get("c1")?, p.get("c2")?)?;
            let g = positive_gain(p.get("g")?)?;
            let a_in = params.mean_field();
            let gain = gain_psi2(&params, g)?;
            let (c0, c1, c2) = (p.get("c0")?, p.get("c1")?, p.get("c2")?);
            let weight = c0 * c0 + g * g * c1 * c1 + g.powi(4) * c2 * c2;
            let (filtered, _) = apply_filter_pure(&params.state(cutoff)?, g)?;
            (a_in, gain * a_in, gain, weight, filtered.mean_field().re)
        }
        Scenario::Mixture => {
            let (alpha, beta, pw) = (p.get("alpha")?, p.get("beta")?, p.get("p")?);
            let params = MixtureParams::new(alpha.into(), beta.into(), pw)?;
            let g = positive_gain(p.get("g")?)?;
            // Real amplitudes in, real gain out: the complex sector of
            // gain_mixture is exercised by the library tests, not by scans.
            let a_in = params.mean_field().re;
            let gain = gain_mixture(&params, g)?.re;
            let k = g * g - 1.0;
            let weight = pw * (k * alpha * alpha).exp() + (1.0 - pw) * (k * beta * beta).exp();
            let outcome = apply_filter(&params.density(cutoff)?, g)?;
            (a_in, gain * a_in, gain, weight, outcome.state.mean_field().re)
        }
        Scenario::Spacs => {
            let params = SpacsParams::new(p.get("alpha")?, p.get("delta")?);
            // Validates ν ∈ (0,1]; η = p = 1 turns the experiment's click
            // probability into the ideal-attenuation heralding weight.
            let setup = SetupParams::new(p.get("alpha")?, p.get("delta")?, p.get("nu")?, 1.0, 1.0)?;
            let a_in = spacs_amplitude(&params);
            if a_in.abs() < ZERO_AMPLITUDE {
                return Err(Error::ZeroInputAmplitude(a_in.abs()));
            }
            let a_out = spacs_attenuated_amplitude(&params, p.get("nu")?);
            let weight = experiment::heralding_weight(&setup);
            let (filtered, _) = apply_filter_pure(&build_spacs(&params, cutoff)?, p.get("nu")?)?;
            (a_in, a_out, a_out / a_in, weight, filtered.mean_field().re)
        }
        Scenario::Gaussian => {
            let (s, alpha) = (p.get("s")?, p.get("alpha")?);
            let g = p.get("g")?;
            let state = GaussianState::squeezed(s)
                .with_displacement(Vector2::new(std::f64::consts::SQRT_2 * alpha, 0.0));
            // transform_gaussian validates physicality of the amplified state.
            let transformed = transform_gaussian(&state, g)?;
            let a_out = transformed.mean_field().re;
            // The displacement-map slope along x: finite even at alpha = 0.
            let gain = effective_gain(state.quadrature_variances().vx, g)?;
            let outcome = apply_filter(&state.to_fock(cutoff)?, g)?;
            (alpha, a_out, gain, outcome.weight, outcome.state.mean_field().re)
        }
        Scenario::Experiment => {
            let setup = SetupParams::new(
                p.get("alpha")?,
                p.get("delta")?,
                p.get("nu")?,
                p.get("eta")?,
                p.get("p")?,
            )?
            .with_cutoff(cutoff);
            let a_in = experiment::input_amplitude(&setup);
            let a_out = experiment::amplitude_eta_p(&setup);
            let gain = experiment::gain_eta_p(&setup)?;
            let weight = experiment::heralding_weight(&setup);
            let sim = experiment::simulate_setup(&setup)?;
            (a_in, a_out, gain, weight, sim.state.mean_field().re)
        }
    };
    Ok(ScanRow {
        sweep_value,
        input_amplitude: a_in,
        output_amplitude: a_out,
        gain,
        weight,
        oracle_residual: a_out - oracle_out,
        near_zero_input: a_in.abs() < NEAR_ZERO_INPUT,
    })
}

fn positive_gain(g: f64) -> Result<f64> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::InvalidGain(g));
    }
    Ok(g)
}

/// Scientific notation with 12 significant digits, '.' decimal separator.
fn sci(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixture_config() -> ScanConfig {
        ScanConfig::from_toml_str(
            r#"
            scenario = "mixture"

            [sweep]
            parameter = "g"
            start = 2.0
            stop = 2.0
            steps = 1

            [params]
            alpha = 1.0
            beta = -0.9
            p = 0.3333333333333333
            "#,
        )
        .expect("config parses")
    }

    #[test]
    fn config_round_trips_from_toml() {
        let config = mixture_config();
        assert_eq!(config.scenario, Scenario::Mixture);
        assert_eq!(config.sweep.parameter, "g");
        assert_eq!(config.sweep.values(), vec![2.0]);
        assert_eq!(config.params["beta"], -0.9);
        assert_eq!(config.oracle_cutoff(), 30);
        config.validate().expect("config is complete");
    }

    #[test]
    fn sweep_grid_is_inclusive_and_evenly_spaced() {
        let sweep = SweepSpec {
            parameter: "g".into(),
            start: 0.5,
            stop: 1.5,
            steps: 5,
        };
        let values = sweep.values();
        assert_eq!(values.len(), 5);
        assert_eq!(values[0], 0.5);
        assert_eq!(values[4], 1.5);
        assert!((values[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_sweep_parameter_is_rejected() {
        let mut config = mixture_config();
        config.sweep.parameter = "delta".into();
        config.params.insert("g".into(), 2.0);
        let err = config.validate().unwrap_err();
        assert!(matches!(err, Error::Config(_)), "got {err:?}");
        assert!(err.to_string().contains("delta"));
    }

    #[test]
    fn sweeping_a_fixed_parameter_is_rejected() {
        let mut config = mixture_config();
        config.params.insert("g".into(), 1.5);
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("both swept and fixed"), "got {err}");
    }

    #[test]
    fn missing_parameter_is_rejected() {
        let mut config = mixture_config();
        config.params.remove("beta");
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("beta"), "got {err}");
    }

    #[test]
    fn overrides_take_effect() {
        let mut config = mixture_config();
        config.apply_override("sweep.steps=7").unwrap();
        config.apply_override("cutoff=25").unwrap();
        config.apply_override("params.p=0.5").unwrap();
        config.apply_override("beta = -0.8").unwrap();
        assert_eq!(config.sweep.steps, 7);
        assert_eq!(config.oracle_cutoff(), 25);
        assert_eq!(config.params["p"], 0.5);
        assert_eq!(config.params["beta"], -0.8);
        assert!(config.apply_override("nonsense").is_err());
        assert!(config.apply_override("sweep.steps=few").is_err());
    }

    #[test]
    fn mixture_point_scan_reproduces_the_known_gain() {
        let rows = run_scan(&mixture_config()).expect("scan runs");
        assert_eq!(rows.len(), 1);
        let row = rows[0];
        // Frozen expectation for α=1, β=−0.9, p=1/3 at g=2; see the
        // nongaussian module tests for its derivation.
        assert!((row.gain - 0.063158240).abs() < 1e-6, "gain = {}", row.gain);
        assert!(row.oracle_residual.abs() < 1e-8, "residual = {}", row.oracle_residual);
        assert!(!row.near_zero_input);
        // Weight = p e^{3α²} + (1−p) e^{3β²}.
        let expected_weight =
            (1.0 / 3.0) * 3.0_f64.exp() + (2.0 / 3.0) * (3.0 * 0.81_f64).exp();
        assert!((row.weight - expected_weight).abs() < 1e-9 * expected_weight);
    }

    #[test]
    fn experiment_rows_match_the_closed_form() {
        let config = ScanConfig::from_toml_str(
            r#"
            scenario = "experiment"

            [sweep]
            parameter = "nu"
            start = 0.5
            stop = 1.0
            steps = 3

            [params]
            alpha = 0.25
            delta = -0.55
            eta = 0.5
            p = 0.75
            "#,
        )
        .unwrap();
        let rows = run_scan(&config).expect("scan runs");
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert!(
                row.oracle_residual.abs() < 1e-8,
                "residual {} at nu = {}",
                row.oracle_residual,
                row.sweep_value
            );
        }
        // ν = 1 is a no-op on the signal: unit gain regardless of η and p.
        assert!((rows[2].gain - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_scan_agrees_with_the_fock_oracle() {
        let config = ScanConfig::from_toml_str(
            r#"
            scenario = "gaussian"

            [sweep]
            parameter = "g"
            start = 0.8
            stop = 1.2
            steps = 5

            [params]
            s = 0.3
            alpha = 0.4
            "#,
        )
        .unwrap();
        let rows = run_scan(&config).expect("scan runs");
        for row in &rows {
            assert!(
                row.oracle_residual.abs() < 1e-8,
                "residual {} at g = {}",
                row.oracle_residual,
                row.sweep_value
            );
            // The gain column is the displacement-map slope, so it must
            // reproduce Ã = G·A exactly.
            assert!((row.gain * row.input_amplitude - row.output_amplitude).abs() < 1e-12);
        }
    }

    #[test]
    fn unphysical_gaussian_amplification_aborts_the_scan() {
        let config = ScanConfig::from_toml_str(
            r#"
            scenario = "gaussian"

            [sweep]
            parameter = "g"
            start = 1.5
            stop = 1.5
            steps = 1

            [params]
            s = -0.8
            alpha = 0.1
            "#,
        )
        .unwrap();
        let err = run_scan(&config).unwrap_err();
        assert!(matches!(err, Error::UnphysicalOutput { .. }), "got {err:?}");
    }

    #[test]
    fn near_zero_inputs_are_flagged_not_suppressed() {
        // Zero of A for α = 0.25 sits at δ* = √3 − 2.25; offset the middle
        // grid point so |A| ≈ 1e-7 — inside the flag band, outside the
        // hard-error band.
        let delta_star = 3.0_f64.sqrt() - 2.25;
        let slope = 0.808; // dA/dδ at the zero
        let mid = delta_star + 1e-7 / slope;
        let mut config = ScanConfig::from_toml_str(
            r#"
            scenario = "spacs"

            [sweep]
            parameter = "delta"
            start = 0.0
            stop = 0.0
            steps = 3

            [params]
            alpha = 0.25
            nu = 0.7
            "#,
        )
        .unwrap();
        config.sweep.start = mid - 1e-3;
        config.sweep.stop = mid + 1e-3;
        let rows = run_scan(&config).expect("scan runs");
        assert!(!rows[0].near_zero_input);
        assert!(rows[1].near_zero_input, "A = {}", rows[1].input_amplitude);
        assert!(!rows[2].near_zero_input);
        // The gain at the near-zero is emitted and enormous, not suppressed.
        assert!(rows[1].gain.abs() > 1e5, "gain = {}", rows[1].gain);
        assert!(rows[1].gain.is_finite());
    }

    #[test]
    fn csv_is_deterministic_and_documents_itself() {
        let config = mixture_config();
        let rows = run_scan(&config).unwrap();
        let csv_a = render_csv(&config, &rows);
        let csv_b = render_csv(&config, &run_scan(&config).unwrap());
        assert_eq!(csv_a, csv_b, "identical config must give identical bytes");
        assert!(csv_a.contains("# scenario = mixture"));
        assert!(csv_a.contains("# param alpha = 1.00000000000e0"));
        assert!(csv_a.contains("# cutoff = 30"));
        assert!(csv_a
            .lines()
            .any(|l| l == "g,input_amplitude,output_amplitude,gain,weight,oracle_residual,near_zero_input"));
        let data_line = csv_a.lines().last().unwrap();
        assert!(data_line.starts_with("2.00000000000e0,"), "got {data_line}");
        assert!(data_line.ends_with(",false"));
        // 12 significant digits: mantissa has 11 decimal places.
        let gain_field = data_line.split(',').nth(3).unwrap();
        let mantissa = gain_field.split('e').next().unwrap();
        assert_eq!(mantissa.split('.').nth(1).unwrap().len(), 11, "got {gain_field}");
    }

    #[test]
    fn psi_scans_match_their_oracles() {
        let config = ScanConfig::from_toml_str(
            r#"
            scenario = "psi1"

            [sweep]
            parameter = "c1"
            start = 0.1
            stop = 0.9
            steps = 9

            [params]
            g = 2.0
            "#,
        )
        .unwrap();
        for row in run_scan(&config).unwrap() {
            assert!(row.oracle_residual.abs() < 1e-12, "psi1 residual {}", row.oracle_residual);
        }

        let config = ScanConfig::from_toml_str(
            r#"
            scenario = "psi2"

            [sweep]
            parameter = "g"
            start = 0.5
            stop = 2.0
            steps = 7

            [params]
            c0 = 0.6
            c1 = 0.6
            c2 = 0.5291502622129181
            "#,
        )
        .unwrap();
        for row in run_scan(&config).unwrap() {
            assert!(row.oracle_residual.abs() < 1e-12, "psi2 residual {}", row.oracle_residual);
        }
    }
}
