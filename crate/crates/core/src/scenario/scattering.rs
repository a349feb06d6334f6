//! Gaussian local scattering model for a half-wavelength ULA.

use std::f64::consts::PI;

use crate::linalg::{CMatrix, C64};

/// Spatial correlation matrix of an `n_ant`-element half-wavelength ULA for
/// a user at `nominal_angle` (radians from broadside) with Gaussian angular
/// spread `asd` (radians), scaled so every diagonal entry equals `beta`.
///
/// Uses the small-spread closed form
/// `R[m][n] = beta * exp(j*pi*(m-n)*sin(phi)) * exp(-asd^2/2 * (pi*(m-n)*cos(phi))^2)`.
/// The matrix is Toeplitz, so only the `2*n_ant - 1` distinct entries are
/// evaluated. Lags whose envelope is below `1e-30` are stored as exact zeros
/// rather than subnormals.
pub fn local_scattering_covariance(beta: f64, nominal_angle: f64, asd: f64, n_ant: usize) -> CMatrix {
    let (sin_phi, cos_phi) = nominal_angle.sin_cos();
    let entry = |diff: isize| -> C64 {
        if diff == 0 {
            return C64::new(beta, 0.0);
        }
        let delta = diff as f64;
        let phase = C64::from_polar(1.0, PI * delta * sin_phi);
        let spread = PI * delta * cos_phi;
        let envelope = (-0.5 * asd * asd * spread * spread).exp();
        if envelope < 1e-30 {
            return C64::new(0.0, 0.0);
        }
        phase * (beta * envelope)
    };
    let lags: Vec<C64> = (0..n_ant as isize).map(entry).collect();
    CMatrix::from_fn(n_ant, n_ant, |m, n| {
        if m >= n {
            lags[m - n]
        } else {
            lags[n - m].conj()
        }
    })
}
