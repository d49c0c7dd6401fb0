//! Charge ‖φ‖² along the family, its ω-slope, the slope index p_Z(ω) and the threshold Z*.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{atan, cosh, ln, sech2, sinh, sqrt, tanh, SQRT3};
use crate::profile::{ProfileEvaluator, WaveParameters};
use crate::quadrature::{integrate, Tolerance};

/// ω-dependent constants of the λ₁ = λ₂ = 1 closed forms.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormCoefficients {
    pub alpha_w: f64,
    pub beta_w: f64,
    pub gamma_w: f64,
    pub theta_w: f64,
    pub h_w: f64,
    pub s_w: f64,
    pub u_w: f64,
    pub t_w: f64,
    pub b: f64,
}

impl ClosedFormCoefficients {
    pub fn new(omega: f64, z: f64) -> Result<Self> {
        let p = unit_params(omega, z)?;
        let b = ProfileEvaluator::new(p).shift_b;
        let h = 3.0 - 16.0 * omega;
        let r = sqrt(-omega);
        let s = 2.0 * r;
        Ok(ClosedFormCoefficients {
            alpha_w: -1.0 / (4.0 * omega),
            beta_w: sqrt(9.0 - 48.0 * omega) / (-12.0 * omega),
            gamma_w: SQRT3 / sqrt(h),
            theta_w: (SQRT3 - sqrt(h)) / (4.0 * r),
            h_w: h,
            s_w: s,
            u_w: h + sqrt(3.0 * h),
            t_w: h * sqrt(h) * (2.0 * s * b + sinh(2.0 * s * b)),
            b,
        })
    }
}

fn unit_params(omega: f64, z: f64) -> Result<WaveParameters> {
    WaveParameters::new(1.0, 1.0, omega, z)
}

/// Rejects (λ₁, λ₂) ≠ (1, 1) for the closed-form paths.
pub fn require_unit(p: &WaveParameters) -> Result<()> {
    if p.is_unit_aa() {
        Ok(())
    } else {
        Err(Error::Regime(format!(
            "closed forms need lambda1 = lambda2 = 1, got ({}, {})",
            p.lambda1, p.lambda2
        )))
    }
}

/// ‖φ‖² = −2√3·[atan θ − atan(θ·tanh(√(−ω)·b))] for λ₁ = λ₂ = 1.
pub fn norm_sq_closed(omega: f64, z: f64) -> Result<f64> {
    let c = ClosedFormCoefficients::new(omega, z)?;
    let r = sqrt(-omega);
    Ok(-2.0 * SQRT3 * (atan(c.theta_w) - atan(c.theta_w * tanh(r * c.b))))
}

/// Radius beyond which the tail of ∫φ² is below `tail`.
fn tail_radius(ev: &ProfileEvaluator, tail: f64) -> f64 {
    let r = ev.root_minus_omega;
    let w = -ev.params.omega;
    let b = ev.shift_b;
    // φ² ≤ 2(−ω)/κ·e^{−2r(x+b)}, so ∫_L^∞ φ² ≤ (−ω)/(κr)·e^{−2r(L+b)}.
    let l = ln(w / (ev.kappa * r * tail)) / (2.0 * r) - b;
    l.max(b.abs() + 1.0 / r)
}

fn norm_sq_with(p: &WaveParameters, tol: Tolerance) -> Result<f64> {
    let ev = ProfileEvaluator::new(*p);
    let l = tail_radius(&ev, 1e-13);
    let hump = (-ev.shift_b).max(0.0);
    let half = integrate(|x| ev.phi_sq(x), 0.0, l, &[hump], tol)?;
    Ok(2.0 * half)
}

/// Adaptive quadrature of φ² over the line, any admissible (λ₁, λ₂).
pub fn norm_sq_quadrature(p: &WaveParameters) -> Result<f64> {
    norm_sq_with(
        p,
        Tolerance {
            abs: 1e-11,
            ..Tolerance::default()
        },
    )
}

/// db/dω for λ₁ = λ₂ = 1 in the closed form
/// [4√3√(−ω)·h·b·cosh(sb) + 2√3(3−32ω)·sinh(sb) + t] / [8(−ω)^{3/2}√h·(h + √3√h·cosh(sb))].
pub fn db_domega(omega: f64, z: f64) -> Result<f64> {
    let c = ClosedFormCoefficients::new(omega, z)?;
    let (h, s, b) = (c.h_w, c.s_w, c.b);
    let w = -omega;
    let num = 4.0 * SQRT3 * sqrt(w) * h * b * cosh(s * b)
        + 2.0 * SQRT3 * (3.0 - 32.0 * omega) * sinh(s * b)
        + c.t_w;
    let den = 8.0 * w * sqrt(w) * sqrt(h) * (h + SQRT3 * sqrt(h) * cosh(s * b));
    Ok(num / den)
}

/// ∂ω‖φ‖² for λ₁ = λ₂ = 1, by differentiating [`norm_sq_closed`] through θ(ω),
/// √(−ω) and b(ω).
pub fn dnorm_domega_closed(omega: f64, z: f64) -> Result<f64> {
    let c = ClosedFormCoefficients::new(omega, z)?;
    let db = db_domega(omega, z)?;
    let r = sqrt(-omega);
    let sh = sqrt(c.h_w);
    let th = c.theta_w;
    let dth = (32.0 * r / sh + 2.0 * (SQRT3 - sh) / r) / (16.0 * r * r);
    let tt = tanh(r * c.b);
    let dtt = sech2(r * c.b) * (-c.b / (2.0 * r) + r * db);
    Ok(-2.0 * SQRT3 * (dth / (1.0 + th * th) - (dth * tt + th * dtt) / (1.0 + th * th * tt * tt)))
}

/// Two-term expression for ∂ω‖φ‖² in the form it is usually quoted, in terms
/// of u(ω), h(ω) and db/dω. Kept for comparison only: it does not agree with
/// the derivative of [`norm_sq_closed`] (already at Z = 0 its first term is
/// off by the factor (√h − √3)/(√h + √3)). Use [`dnorm_domega_closed`].
pub fn dnorm_domega_quoted(omega: f64, z: f64) -> Result<f64> {
    let c = ClosedFormCoefficients::new(omega, z)?;
    let bp = db_domega(omega, z)?;
    let w = -omega;
    let (h, u, b) = (c.h_w, c.u_w, c.b);
    let r = sqrt(w);
    let s3h = sqrt(3.0 * h);
    let t1 = (3.0 - s3h) / (u * sqrt(w * h));
    let tt = tanh(r * b);
    let t2 = sech2(r * b)
        * (-2.0 * b * u * r + sinh(2.0 * r * b) * (3.0 - s3h) + 4.0 * u * bp * w * r)
        / (2.0 * sqrt(w * h) * (8.0 * omega + tt * tt * (-3.0 + 8.0 * omega + s3h)));
    Ok(2.0 * SQRT3 * (t1 + t2))
}

/// Central difference of the quadrature norm with one Richardson halving.
/// `step` defaults to 1e−5·|ω| when `None`.
pub fn dnorm_domega_numeric(p: &WaveParameters, step: Option<f64>) -> Result<f64> {
    let h = step.unwrap_or(1e-5 * p.omega.abs());
    if !(h > 0.0) {
        return Err(Error::Step(format!("step must be positive, got {h}")));
    }
    let at = |w: f64| -> Result<f64> {
        let q = p.with_omega(w).map_err(|e| {
            Error::Step(format!("omega = {w} leaves the admissible set ({e})"))
        })?;
        let tol = Tolerance {
            abs: 1e-15,
            rel: 1e-14,
            max_segments: 4000,
        };
        norm_sq_with(&q, tol)
    };
    let d = |h: f64| -> Result<f64> { Ok((at(p.omega + h)? - at(p.omega - h)?) / (2.0 * h)) };
    let d1 = d(h)?;
    let d2 = d(0.5 * h)?;
    let scale = d2.abs().max(1e-8);
    if (d1 - d2).abs() / scale > 1e-4 {
        return Err(Error::Convergence(format!(
            "finite-difference slope unstable under step halving: {d1:e} vs {d2:e}"
        )));
    }
    Ok((4.0 * d2 - d1) / 3.0)
}

/// −∂ω‖φ‖², from the closed form when λ₁ = λ₂ = 1 and by quadrature otherwise.
pub fn neg_slope(p: &WaveParameters) -> Result<f64> {
    if p.is_unit_aa() {
        Ok(-dnorm_domega_closed(p.omega, p.z)?)
    } else {
        Ok(-dnorm_domega_numeric(p, None)?)
    }
}

pub const DEGENERATE_SLOPE: f64 = 1e-9;

/// Slope index: 1 if −∂ω‖φ‖² > 0, else 0.
pub fn p_index(p: &WaveParameters) -> Result<u8> {
    let s = neg_slope(p)?;
    if s.abs() < DEGENERATE_SLOPE {
        return Err(Error::Degenerate(format!(
            "|d/domega ||phi||^2| = {:e} < {DEGENERATE_SLOPE:e} at (omega, z) = ({}, {})",
            s.abs(),
            p.omega,
            p.z
        )));
    }
    Ok(u8::from(s > 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VkScanRow {
    pub omega: f64,
    pub z: f64,
    pub norm_sq: f64,
    pub dnorm_domega: f64,
    pub p_index: u8,
}

pub fn vk_row(p: &WaveParameters) -> Result<VkScanRow> {
    let (norm_sq, d) = if p.is_unit_aa() {
        (norm_sq_closed(p.omega, p.z)?, dnorm_domega_closed(p.omega, p.z)?)
    } else {
        (norm_sq_quadrature(p)?, dnorm_domega_numeric(p, None)?)
    };
    Ok(VkScanRow {
        omega: p.omega,
        z: p.z,
        norm_sq,
        dnorm_domega: d,
        p_index: u8::from(-d > 0.0),
    })
}

/// ω probe grid used for the threshold search.
pub const ZSTAR_PROBE: [f64; 6] = [-1.5, -2.0, -3.0, -5.0, -10.0, -50.0];

/// g(Z) = min over the probe grid of −∂ω‖φ‖².
pub fn zstar_statistic(omegas: &[f64], z: f64) -> Result<f64> {
    let mut g = f64::INFINITY;
    for &w in omegas {
        g = g.min(-dnorm_domega_closed(w, z)?);
    }
    Ok(g)
}

/// Bisection on [`zstar_statistic`] down to a bracket of width 1e−7.
pub fn find_zstar(omegas: &[f64], z_lo: f64, z_hi: f64) -> Result<f64> {
    if omegas.is_empty() {
        return Err(Error::Domain("empty omega probe grid".into()));
    }
    let (mut lo, mut hi) = if z_lo < z_hi { (z_lo, z_hi) } else { (z_hi, z_lo) };
    let mut glo = zstar_statistic(omegas, lo)?;
    let ghi = zstar_statistic(omegas, hi)?;
    if (glo > 0.0) == (ghi > 0.0) {
        return Err(Error::Bracket(format!(
            "g has the same sign at both ends: g({lo}) = {glo:e}, g({hi}) = {ghi:e}"
        )));
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        let gm = zstar_statistic(omegas, mid)?;
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Per-ω values of −∂ω‖φ‖² at each requested Z, for inspecting ω-uniformity.
pub fn sign_table(omegas: &[f64], zs: &[f64]) -> Result<Vec<(f64, f64, f64)>> {
    let mut out = Vec::with_capacity(omegas.len() * zs.len());
    for &z in zs {
        for &w in omegas {
            out.push((w, z, -dnorm_domega_closed(w, z)?));
        }
    }
    Ok(out)
}
