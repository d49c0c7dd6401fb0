//! Explicit delta propagator, used only to cross-check the Crank–Nicolson
//! step.
//!
//! For Z < 0 the group splits into a free part and a reflected part:
//! e^{−itA}ψ = e^{it∂²}ψ + 2·[e^{it∂²}g](|x|), where
//! g(y) = (Z/2)∫_y^0 ψ_e(r)e^{−Z(y−r)/2} dr for y ≤ 0, g = 0 for y > 0 and
//! ψ_e is the even part of ψ. The free flow is a Fourier multiplier on a
//! zero-padded periodic box.

use num_complex::Complex64;
use peakwave_core::dynamics::FieldState;
use peakwave_core::{Error, Result};
use rustfft::FftPlanner;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Periodic box length over input length.
    pub pad: usize,
    /// Internal spectral refinement of the input grid.
    pub refine: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { pad: 4, refine: 8 }
    }
}

#[derive(Debug, Clone)]
pub struct OracleOutput {
    pub state: FieldState,
    /// ½h·Σ|ψ|² of the refined input.
    pub input_charge: f64,
    /// ½h·Σ|u|² over the whole padded, refined box.
    pub output_charge: f64,
}

impl OracleOutput {
    pub fn charge_error(&self) -> f64 {
        (self.output_charge / self.input_charge - 1.0).abs()
    }
}

pub fn kernel_propagator_apply(psi: &FieldState, t: f64) -> Result<FieldState> {
    Ok(kernel_propagator_with(psi, t, OracleConfig::default())?.state)
}

/// Band-limited interpolation of a sequence that vanishes outside its ends.
fn refine(psi: &[Complex64], m: usize, planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
    if m == 1 {
        return psi.to_vec();
    }
    let n0 = psi.len();
    let big = 4 * (n0 - 1);
    let mut f = vec![Complex64::new(0.0, 0.0); big];
    f[..n0].copy_from_slice(psi);
    planner.plan_fft_forward(big).process(&mut f);
    let nf = big * m;
    let half = big / 2;
    let mut g = vec![Complex64::new(0.0, 0.0); nf];
    g[..half].copy_from_slice(&f[..half]);
    g[nf - half..].copy_from_slice(&f[big - half..]);
    planner.plan_fft_inverse(nf).process(&mut g);
    // rustfft is unnormalized: 1/big from the round trip, then ×m for the density.
    let s = 1.0 / big as f64;
    g.truncate((n0 - 1) * m + 1);
    g.iter_mut().for_each(|v| *v *= s);
    g
}

pub fn kernel_propagator_with(psi: &FieldState, t: f64, cfg: OracleConfig) -> Result<OracleOutput> {
    let z = psi.params.z;
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("propagation time must be finite and nonzero, got {t}")));
    }
    if !(z < 0.0) {
        return Err(Error::Domain(format!("the kernel formula is used for z < 0 only, got {z}")));
    }
    if cfg.pad < 2 || cfg.refine == 0 {
        return Err(Error::Domain("pad must be >= 2 and refine >= 1".into()));
    }
    let peak = psi.samples.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let edge = psi.samples[0].norm().max(psi.samples[psi.samples.len() - 1].norm());
    if edge > 1e-6 * peak {
        return Err(Error::Domain(format!("field not decayed at the boundary ({edge:e})")));
    }

    let mut planner = FftPlanner::new();
    let m = cfg.refine;
    let fine = refine(&psi.samples, m, &mut planner);
    let n = fine.len();
    let c = n / 2;
    let h = psi.grid.spacing / m as f64;
    let even: Vec<Complex64> = (0..n).map(|i| 0.5 * (fine[i] + fine[n - 1 - i])).collect();

    let big = cfg.pad * (n - 1);
    let cc = big / 2;
    let off = cc - c;

    // g on the box by the recurrence g(y − h) = E·g(y) + (Z/2)∫₀ʰ ψ_e(y − h + s)e^{−qs} ds
    // with quadratic interpolation of ψ_e and exact exponential moments.
    let q = -0.5 * z;
    let e = (-q * h).exp();
    let m0 = (1.0 - e) / q;
    let m1 = (1.0 - e * (1.0 + q * h)) / (q * q);
    let m2 = (2.0 - e * (q * q * h * h + 2.0 * q * h + 2.0)) / (q * q * q);
    let mut g = vec![Complex64::new(0.0, 0.0); big];
    for j in (1..cc).rev() {
        let nxt = g[j + 1];
        g[j] = if j >= off {
            let jj = j - off;
            let f0 = even[jj];
            let f1 = even[jj + 1];
            let f2 = if jj + 2 <= c { even[jj + 2] } else { even[c - 1] };
            let b = (f1 - f0) / h;
            let cq = (f2 - 2.0 * f1 + f0) / (2.0 * h * h);
            e * nxt + 0.5 * z * (f0 * m0 + b * m1 + cq * (m2 - h * m1))
        } else {
            e * nxt
        };
    }

    let mut free_in = vec![Complex64::new(0.0, 0.0); big];
    free_in[off..off + n].copy_from_slice(&fine);
    let mult: Vec<Complex64> = (0..big)
        .map(|k| {
            let kk = if k <= big / 2 { k as f64 } else { k as f64 - big as f64 };
            let w = 2.0 * core::f64::consts::PI * kk / (big as f64 * h);
            Complex64::from_polar(1.0 / big as f64, -w * w * t)
        })
        .collect();
    let fwd = planner.plan_fft_forward(big);
    let inv = planner.plan_fft_inverse(big);
    let free = |v: &mut Vec<Complex64>| {
        v.rotate_left(cc);
        fwd.process(v);
        v.iter_mut().zip(&mult).for_each(|(a, b)| *a *= b);
        inv.process(v);
        v.rotate_right(cc);
    };
    free(&mut free_in);
    free(&mut g);
    let mut out = free_in;
    for (j, o) in out.iter_mut().enumerate() {
        // reflected part evaluated at |x|
        let r = if j >= cc { j } else { 2 * cc - j };
        *o += 2.0 * g[r % big];
    }

    let input_charge = 0.5 * h * fine.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let output_charge = 0.5 * h * out.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let samples: Vec<Complex64> = out[off..off + n].iter().step_by(m).copied().collect();
    let state = FieldState::new(samples, psi.grid, psi.time + t, psi.params)?;
    Ok(OracleOutput {
        state,
        input_charge,
        output_charge,
    })
}
