//! The realistic photon-addition experiment: amplitude enhancement by
//! noiseless attenuation, and how far it survives loss and impurity.
//!
//! A photon-added coherent state (â†+δ)|α⟩ can have a mean field near zero
//! while carrying a full photon of energy. Attenuating it (ν^n̂ via a beam
//! splitter + heralding) remaps its parameters, dragging the working point
//! away from the zero — so the attenuated state has a *larger* mean field
//! than the input. This example reproduces that effect with the ideal closed
//! form, then degrades the setup with detector efficiency η and addition
//! purity p, cross-checking the three-mode simulation throughout.
//!
//! Run with `cargo run --release -p heralded --example spacs_experiment`.

use heralded::experiment::{
    amplitude_eta_p, gain_eta_p, heralding_weight, input_amplitude, simulate_setup, SetupParams,
};

fn main() -> heralded::Result<()> {
    // Ideal setup (η=1, p=1), the working point of the strongest effect.
    let (alpha, delta) = (0.25, -0.55);
    println!("ideal photon addition, α = {alpha}, δ = {delta}:");
    println!("  ν      G_eff      herald weight");
    let mut best = (0.0, f64::MIN);
    for i in 1..20 {
        let nu = i as f64 / 20.0;
        let setup = SetupParams::new(alpha, delta, nu, 1.0, 1.0)?;
        let gain = gain_eta_p(&setup)?;
        if gain > best.1 {
            best = (nu, gain);
        }
        if i % 2 == 1 {
            println!("  {nu:.2}   {gain:+8.4}   {:.4e}", heralding_weight(&setup));
        }
    }
    println!("  strongest gain ≈ {:.3} near ν = {:.2} — attenuation that amplifies.", best.1, best.0);

    // One point verified against the brute-force three-mode simulation.
    let setup = SetupParams::new(alpha, delta, 0.7, 1.0, 1.0)?;
    let sim = simulate_setup(&setup)?;
    println!(
        "\ncross-check at ν = 0.7: closed form Ã = {:+.8}, simulation Ã = {:+.8}",
        amplitude_eta_p(&setup),
        sim.state.mean_field().re
    );
    println!(
        "                        closed form W = {:.8}, simulation W = {:.8}",
        heralding_weight(&setup),
        sim.weight
    );

    // Realistic degradation: η < 1 leaks signal into the unread detector
    // mode, p < 1 mixes plain |α⟩ into the addition. The enhancement window
    // narrows and the working point shifts (δ = −0.65 suits p = 0.75), but a
    // G > 1 region survives even at η = 0.25.
    let (alpha, delta, p) = (0.25, -0.65, 0.75);
    println!("\ndegraded setup, α = {alpha}, δ = {delta}, addition purity p = {p}:");
    for eta in [1.0, 0.75, 0.5, 0.25] {
        let mut best = (0.0, f64::MIN);
        for i in 1..=99 {
            let nu = i as f64 / 100.0;
            let setup = SetupParams::new(alpha, delta, nu, eta, p)?;
            let gain = gain_eta_p(&setup)?;
            if gain > best.1 {
                best = (nu, gain);
            }
        }
        let at_best = SetupParams::new(alpha, delta, best.0, eta, p)?;
        println!(
            "  η = {eta:4.2}: max G_eff = {:6.3} at ν = {:.2} (input A_p = {:+.4}, weight {:.3e})",
            best.1,
            best.0,
            input_amplitude(&at_best),
            heralding_weight(&at_best)
        );
    }
    println!("  the effect persists — weaker, rarer, but above unity at every η.");
    Ok(())
}
