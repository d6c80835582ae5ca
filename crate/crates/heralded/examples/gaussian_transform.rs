//! Closed-form filter action on Gaussian states: variances, squeezing,
//! displacement gain, and the physicality bound.
//!
//! For Gaussian states g^n̂ has an exact matrix description — no Fock
//! truncation anywhere. Amplification squeezes *more* (tanh s′ = g² tanh s),
//! displaces further, and fails entirely once a variance reaches
//! (g²+1)/(2(g²−1)); attenuation is always physical.
//!
//! Run with `cargo run --release -p heralded --example gaussian_transform`.

use heralded::gaussian::{
    effective_gain, physicality_bound, transform_gaussian, GaussianState,
};
use nalgebra::Vector2;

fn main() -> heralded::Result<()> {
    // Squeezing law: s′ = atanh(g² tanh s) for squeezed vacuum.
    println!("squeezed vacuum, s = 0.25:");
    let state = GaussianState::squeezed(0.25);
    for g in [0.8, 1.2, 1.5, 1.9] {
        let out = transform_gaussian(&state, g)?;
        let (lo, _) = out.principal_variances();
        // γ_out = diag(e^{−2s′}, e^{2s′}) ⇒ s′ = −ln(2·V_lo)/2.
        let s_out = -(2.0 * lo).ln() / 2.0;
        let law = (g * g * 0.25_f64.tanh()).atanh();
        println!("  g = {g:3.1}:  s′ = {s_out:.10}   atanh(g² tanh s) = {law:.10}");
    }

    // Displacement gain: G = 2g/[(1+g²)+2V(1−g²)] depends only on the
    // variance along the displacement. Squeezed-axis displacement is
    // amplified *less* than a coherent state's (V < 1/2), antisqueezed more.
    println!("\ndisplaced by (0.5, 0) — gain of ⟨x̂⟩ at g = 1.5:");
    for (label, s) in [("squeezed x (s=+0.4)", 0.4), ("coherent   (s= 0.0)", 0.0), ("antisq. x  (s=-0.4)", -0.4)] {
        let state = GaussianState::squeezed(s).with_displacement(Vector2::new(0.5, 0.0));
        let vx = state.quadrature_variances().vx;
        let out = transform_gaussian(&state, 1.5)?;
        println!(
            "  {label}: V_x = {vx:.4}, d̃_x/d_x = {:.6}, effective_gain = {:.6}",
            out.d()[0] / 0.5,
            effective_gain(vx, 1.5)?
        );
    }

    // The bound. A thermal state with V ≥ (g²+1)/(2(g²−1)) cannot be
    // amplified at g — the would-be output has negative variance.
    let g = 1.4;
    println!(
        "\nphysicality bound at g = {g}: V_max = {:.6}",
        physicality_bound(g)
    );
    for nbar in [0.2, 0.5, 0.8] {
        let thermal = GaussianState::thermal(nbar)?;
        let v = thermal.quadrature_variances().vx;
        match transform_gaussian(&thermal, g) {
            Ok(out) => println!(
                "  n̄ = {nbar}: V = {v:.3} → Ṽ = {:.4} (physical)",
                out.quadrature_variances().vx
            ),
            Err(err) => println!("  n̄ = {nbar}: V = {v:.3} → {err}"),
        }
    }

    // Attenuation has no bound. Its gain exceeds plain beam-splitter damping
    // (which scales ⟨â⟩ by exactly ν) whenever V < 1/2, but never exceeds
    // 2ν/(1+ν²) < 1: heralded attenuation cannot amplify a Gaussian state.
    let nu = 0.6;
    println!("\nattenuation at ν = {nu} (beam splitter would give gain {nu}):");
    for s in [0.5, 0.0, -0.5] {
        let v = GaussianState::squeezed(s).quadrature_variances().vx;
        println!("  V = {v:.4}: effective gain = {:.6}", effective_gain(v, nu)?);
    }
    Ok(())
}
