use super::channel::ChannelSpec;
use crate::error::{Error, Result};

/// Closed-form bound-state energy of `−nu/r` in channel `kappa` with
/// principal quantum number `n`.
pub fn exact_energy(nu: f64, kappa: i32, n: u32) -> Result<f64> {
    let k = f64::from(kappa.unsigned_abs());
    if kappa == 0 || !(nu > 0.0 && nu <= k) {
        return Err(Error::InvalidQuantumNumbers(format!(
            "need 0 < nu <= |kappa| with kappa != 0, got nu={nu}, kappa={kappa}"
        )));
    }
    if n < kappa.unsigned_abs() || (kappa > 0 && n == kappa.unsigned_abs()) {
        return Err(Error::InvalidQuantumNumbers(format!(
            "no level with n={n} in channel kappa={kappa}"
        )));
    }
    let nr = f64::from(n) - k;
    let denom = nr + (k * k - nu * nu).sqrt();
    Ok((1.0 + nu * nu / (denom * denom)).powf(-0.5))
}

/// Oracle for the `k`-th level (1-based) of a pure Coulomb channel, if the
/// channel has one.
pub fn exact_level(spec: &ChannelSpec, k: usize) -> Option<f64> {
    let nu = spec.coulomb_coupling()?;
    let abs = spec.kappa.unsigned_abs();
    let offset = u32::from(spec.kappa > 0);
    let n = abs + offset + u32::try_from(k).ok()?.checked_sub(1)?;
    exact_energy(nu, spec.kappa, n).ok()
}

/// Box radius for a level near `e_guess`: thirty decay lengths, capped at 200.
pub fn suggested_rmax(e_guess: f64) -> f64 {
    let decay = (1.0 - e_guess * e_guess).max(0.0).sqrt();
    if decay == 0.0 {
        200.0
    } else {
        (30.0 / decay).min(200.0)
    }
}
