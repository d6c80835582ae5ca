//! Three small state families where the filter moves the mean field the
//! "wrong" way: amplification that shrinks ⟨â⟩, amplification with exactly
//! zero output amplitude, and a two-state mixture whose gain collapses.
//!
//! For coherent states the effective gain is g, full stop. These families
//! show how little of that survives once a state has structure: the filter
//! reweights Fock components individually, and the mean field — a coherence,
//! not a population — can lose the tug-of-war. Every closed form is checked
//! here against the brute-force Fock filter.
//!
//! Run with `cargo run --release -p heralded --example counterexamples`.

use heralded::fock::{apply_filter, apply_filter_pure};
use heralded::nongaussian::{
    gain_mixture, gain_psi1, gain_psi2, mixture_weight, psi1_unit_gain_point, MixtureParams,
    Psi1Params, Psi2Params,
};
use num_complex::Complex64;

fn main() -> heralded::Result<()> {
    // Family 1: c₀|0⟩ + c₁|1⟩. Amplification helps only while the
    // single-photon weight stays below 1/(g+1).
    let psi1 = Psi1Params::new(0.5_f64.sqrt())?;
    println!("ψ₁ = (|0⟩+|1⟩)/√2 — unit-gain crossing at g = {:.4}:", psi1_unit_gain_point(&psi1));
    for g in [0.8, 1.0, 1.5, 2.0, 3.0] {
        let closed = gain_psi1(&psi1, g);
        let (filtered, _) = apply_filter_pure(&psi1.state(20)?, g)?;
        let oracle = filtered.mean_field().re / (psi1.c0() * 0.5_f64.sqrt());
        println!("  g = {g:3.1}: G_eff = {closed:.6} (oracle {oracle:.6})");
    }
    println!("  ...amplifying harder only drives the mean field down.\n");

    // Family 2: three Fock levels with a tunable sign. At g = √2 this choice
    // of c₂ makes the output amplitude vanish identically.
    let c0 = 0.8;
    let c2 = -c0 / (2.0 * std::f64::consts::SQRT_2);
    let c1 = (1.0 - c0 * c0 - c2 * c2).sqrt();
    let psi2 = Psi2Params::new(c0, c1, c2)?;
    println!("ψ₂ with (c₀, c₁, c₂) = ({c0}, {c1:.4}, {c2:.4}):");
    for g in [1.2, std::f64::consts::SQRT_2, 1.6] {
        println!("  g = {g:.4}: G_eff = {:+.6}", gain_psi2(&psi2, g)?);
    }
    println!("  ...an *amplifier* tuned to silence its input.\n");

    // Family 3: classical mixture p|α⟩⟨α| + (1−p)|β⟩⟨β| with opposite-sign
    // amplitudes. The filter reweights the branches (p → p′), so the mixture
    // mean can collapse instead of scaling by g.
    let mix = MixtureParams::new(Complex64::from(1.0), Complex64::from(-0.9), 1.0 / 3.0)?;
    println!("mixture p=1/3 of |1.0⟩ and |−0.9⟩ (input ⟨â⟩ = {:+.4}):", mix.mean_field().re);
    for g in [1.5, 2.0, 3.0] {
        let closed = gain_mixture(&mix, g)?;
        // g = 3 amplifies |1.0⟩ to nine photons on average; cutoff 40 keeps
        // the brute-force oracle faithful all the way up.
        let outcome = apply_filter(&mix.density(40)?, g)?;
        let oracle = outcome.state.mean_field().re / mix.mean_field().re;
        println!(
            "  g = {g:3.1}: G_eff = {:+.6} (oracle {oracle:+.6}), branch weight p′ = {:.4}",
            closed.re,
            mixture_weight(&mix, g)
        );
    }

    // And the mirror image: heralded *attenuation* of the same mixture can
    // push the mean field up when the weights shift the right way.
    let mix = MixtureParams::new(Complex64::from(1.0), Complex64::from(-0.9), 0.45)?;
    println!("\nsame mixture at p=0.45 under attenuation:");
    for nu in [0.7, 0.5, 0.3] {
        println!("  ν = {nu}: G_eff = {:+.6}", gain_mixture(&mix, nu)?.re);
    }
    println!("  ...attenuation with gain above one.");
    Ok(())
}
