//! Closed-form peak profiles φ_{ω,Z} and the admissible parameter regimes.

use alloc::format;

use crate::error::{Error, Result};
use crate::math::{atanh, cosh, sinh, sqrt, SQRT3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// λ₁ > 0, λ₂ > 0.
    AttractiveAttractive,
    /// λ₁ > 0, λ₂ < 0, with the frequency window bounded above.
    AttractiveRepulsive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveParameters {
    pub lambda1: f64,
    pub lambda2: f64,
    pub omega: f64,
    pub z: f64,
    pub regime: Regime,
}

impl WaveParameters {
    pub fn new(lambda1: f64, lambda2: f64, omega: f64, z: f64) -> Result<Self> {
        validate_params(lambda1, lambda2, omega, z)
    }

    /// Same (λ₁, λ₂, Z) at a different frequency.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        validate_params(self.lambda1, self.lambda2, omega, self.z)
    }

    pub fn is_unit_aa(&self) -> bool {
        self.lambda1 == 1.0 && self.lambda2 == 1.0
    }
}

/// Upper end of the frequency window −ω < −3λ₁²/(16λ₂) when λ₂ < 0.
pub fn ar_omega_bound(lambda1: f64, lambda2: f64) -> f64 {
    -3.0 * lambda1 * lambda1 / (16.0 * lambda2)
}

/// |Z| bound √3λ₁/(2√(−λ₂)) of the attractive–repulsive regime.
pub fn ar_z_bound(lambda1: f64, lambda2: f64) -> f64 {
    SQRT3 * lambda1 / (2.0 * sqrt(-lambda2))
}

/// Classifies (λ₁, λ₂, ω, Z). All inequalities are strict.
pub fn validate_params(lambda1: f64, lambda2: f64, omega: f64, z: f64) -> Result<WaveParameters> {
    for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2), ("omega", omega), ("z", z)] {
        if !v.is_finite() {
            return Err(Error::Regime(format!("{name} = {v} is not finite")));
        }
    }
    if !(lambda1 > 0.0) {
        return Err(Error::Regime(format!("lambda1 > 0 violated (lambda1 = {lambda1})")));
    }
    if lambda2 == 0.0 {
        return Err(Error::Regime("lambda2 != 0 violated (lambda2 = 0)".into()));
    }
    if !(omega < 0.0) {
        return Err(Error::Regime(format!("omega < 0 violated (omega = {omega})")));
    }
    if !(-omega > z * z / 4.0) {
        return Err(Error::Regime(format!(
            "-omega > z^2/4 violated ({} <= {})",
            -omega,
            z * z / 4.0
        )));
    }
    let regime = if lambda2 > 0.0 {
        Regime::AttractiveAttractive
    } else {
        let wmax = ar_omega_bound(lambda1, lambda2);
        if !(-omega < wmax) {
            return Err(Error::Regime(format!(
                "-omega < -3 lambda1^2/(16 lambda2) violated ({} >= {wmax})",
                -omega
            )));
        }
        let zmax = ar_z_bound(lambda1, lambda2);
        if !(z.abs() < zmax) {
            return Err(Error::Regime(format!(
                "|z| < sqrt(3) lambda1/(2 sqrt(-lambda2)) violated ({} >= {zmax})",
                z.abs()
            )));
        }
        Regime::AttractiveRepulsive
    };
    Ok(WaveParameters { lambda1, lambda2, omega, z, regime })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Evaluator for φ(x) = [α/(−ω) + (κ/(−ω))·cosh(2r(|x| + b))]^(−1/2), r = √(−ω).
#[derive(Debug, Clone, Copy)]
pub struct ProfileEvaluator {
    pub params: WaveParameters,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub root_minus_omega: f64,
    pub shift_b: f64,
}

impl ProfileEvaluator {
    pub fn new(params: WaveParameters) -> Self {
        let alpha = params.lambda1 / 4.0;
        let beta = params.lambda2 / 3.0;
        let kappa = sqrt(alpha * alpha - beta * params.omega);
        let r = sqrt(-params.omega);
        let mut ev = ProfileEvaluator {
            params,
            alpha,
            beta,
            kappa,
            root_minus_omega: r,
            shift_b: 0.0,
        };
        // Z/(2r) lies in (−1, 1) by validation, so the inverse exists.
        ev.shift_b = ev.r_inverse_unchecked(params.z / (2.0 * r));
        ev
    }

    /// R(s) = κ·sinh(2rs)/(α + κ·cosh(2rs)).
    pub fn r_map(&self, s: f64) -> f64 {
        let a = 2.0 * self.root_minus_omega * s;
        let c = cosh(a);
        if !c.is_finite() {
            return if s > 0.0 { 1.0 } else { -1.0 };
        }
        self.kappa * sinh(a) / (self.alpha + self.kappa * c)
    }

    pub fn r_inverse(&self, y: f64) -> Result<f64> {
        if !(y.abs() < 1.0) {
            return Err(Error::Domain(format!("r_inverse needs |y| < 1, got {y}")));
        }
        Ok(self.r_inverse_unchecked(y))
    }

    // With t = tanh(rs), R(s) = y becomes y(K−α)t² − 2Kt + y(α+K) = 0. The root
    // in (−1, 1) is written in the cancellation-free form.
    fn r_inverse_unchecked(&self, y: f64) -> f64 {
        let (a, k) = (self.alpha, self.kappa);
        let disc = k * k - y * y * (k * k - a * a);
        let t = y * (a + k) / (k + sqrt(disc));
        atanh(t) / self.root_minus_omega
    }

    fn denom(&self, xi: f64) -> (f64, f64, f64) {
        let a = 2.0 * self.root_minus_omega * (xi + self.shift_b);
        let (c, s) = (cosh(a), sinh(a));
        (self.alpha + self.kappa * c, c, s)
    }

    pub fn phi(&self, x: f64) -> f64 {
        let (d, _, _) = self.denom(x.abs());
        if !d.is_finite() {
            return 0.0;
        }
        self.root_minus_omega / sqrt(d)
    }

    /// φ² = −ω / (α + κ·cosh(2r(|x| + b))).
    pub fn phi_sq(&self, x: f64) -> f64 {
        let (d, _, _) = self.denom(x.abs());
        if !d.is_finite() {
            return 0.0;
        }
        -self.params.omega / d
    }

    // dφ/dξ and d²φ/dξ² in ξ = |x|.
    fn radial_derivatives(&self, xi: f64) -> (f64, f64) {
        let r = self.root_minus_omega;
        let k = self.kappa;
        let (d, c, s) = self.denom(xi);
        if !d.is_finite() || !s.is_finite() {
            return (0.0, 0.0);
        }
        let d32 = d * sqrt(d);
        let d1 = -r * r * k * s / d32;
        let d2 = -2.0 * r * r * r * k * (c * d - 1.5 * k * s * s) / (d32 * d);
        (d1, d2)
    }

    /// One-sided derivative. Away from the origin both sides agree.
    pub fn phi_derivative(&self, x: f64, side: Side) -> f64 {
        let (d1, _) = self.radial_derivatives(x.abs());
        let positive = x > 0.0 || (x == 0.0 && side == Side::Right);
        if positive {
            d1
        } else {
            -d1
        }
    }

    pub fn phi_second_derivative(&self, x: f64) -> f64 {
        self.radial_derivatives(x.abs()).1
    }

    /// φ'' + ωφ + λ₁φ³ + λ₂φ⁵ with the analytic second derivative.
    pub fn ode_residual(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::Domain("ode_residual is undefined at the defect x = 0".into()));
        }
        let p = &self.params;
        let f = self.phi(x);
        let f2 = f * f;
        Ok(self.phi_second_derivative(x) + f * (p.omega + p.lambda1 * f2 + p.lambda2 * f2 * f2))
    }

    /// φ'(0+) − φ'(0−) + Zφ(0); zero when the jump condition holds.
    pub fn jump_defect(&self) -> f64 {
        self.phi_derivative(0.0, Side::Right) - self.phi_derivative(0.0, Side::Left)
            + self.params.z * self.phi(0.0)
    }

    /// φ'² + ωφ² + 2αφ⁴ + βφ⁶ off the origin.
    pub fn first_integral(&self, x: f64) -> f64 {
        let f = self.phi(x);
        let d = self.phi_derivative(x, Side::Right);
        let f2 = f * f;
        d * d + f2 * (self.params.omega + f2 * (2.0 * self.alpha + self.beta * f2))
    }
}

pub fn r_map(s: f64, p: &WaveParameters) -> f64 {
    ProfileEvaluator::new(*p).r_map(s)
}

pub fn r_inverse(y: f64, p: &WaveParameters) -> Result<f64> {
    ProfileEvaluator::new(*p).r_inverse(y)
}

pub fn phi_eval(x: f64, p: &WaveParameters) -> f64 {
    ProfileEvaluator::new(*p).phi(x)
}

pub fn phi_derivative(x: f64, side: Side, p: &WaveParameters) -> f64 {
    ProfileEvaluator::new(*p).phi_derivative(x, side)
}

pub fn ode_residual(x: f64, p: &WaveParameters) -> Result<f64> {
    ProfileEvaluator::new(*p).ode_residual(x)
}

pub fn jump_defect(p: &WaveParameters) -> f64 {
    ProfileEvaluator::new(*p).jump_defect()
}

/// φ²(0) from the quadratic satisfied by the centre value in the
/// attractive–repulsive regime.
pub fn phi_center_sq(p: &WaveParameters) -> Result<f64> {
    if p.regime != Regime::AttractiveRepulsive {
        return Err(Error::Regime(
            "phi_center_sq is defined for the attractive-repulsive regime; use phi_eval(0)^2".into(),
        ));
    }
    let (l1, l2) = (p.lambda1, p.lambda2);
    let q = 16.0 * l2 / (3.0 * l1 * l1) * (p.omega + p.z * p.z / 4.0);
    // 1 − √(1 − q) without cancellation for small q.
    let one_minus_root = q / (1.0 + sqrt(1.0 - q));
    Ok(-3.0 * l1 / (4.0 * l2) * one_minus_root)
}

/// P(s) whose positive root is φ(0): the first integral at x = 0
/// combined with the jump condition φ'(0+) = −(Z/2)φ(0).
pub fn center_polynomial(s: f64, p: &WaveParameters) -> f64 {
    let s2 = s * s;
    s2 * (p.z * p.z / 4.0 + p.omega + s2 * (p.lambda1 / 2.0 + p.lambda2 / 3.0 * s2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(l1: f64, l2: f64, w: f64, z: f64) -> WaveParameters {
        WaveParameters::new(l1, l2, w, z).unwrap()
    }

    #[test]
    fn regime_examples() {
        assert_eq!(wp(1.0, 1.0, -1.0, 0.0).regime, Regime::AttractiveAttractive);
        assert_eq!(wp(2.0, -1.0, -0.5, 1.0).regime, Regime::AttractiveRepulsive);
        assert!(matches!(validate_params(1.0, 1.0, -0.2, 1.0), Err(Error::Regime(_))));
        assert!(matches!(validate_params(-1.0, 1.0, -1.0, 0.0), Err(Error::Regime(_))));
        // AR upper bound is 0.75 for (2, −1).
        assert!(matches!(validate_params(2.0, -1.0, -0.75, 0.0), Err(Error::Regime(_))));
        // boundary −ω = Z²/4 rejected
        assert!(matches!(validate_params(1.0, 1.0, -1.0, 2.0), Err(Error::Regime(_))));
    }

    #[test]
    fn regime_error_names_first_violation() {
        let e = validate_params(1.0, 1.0, -0.2, 1.0).unwrap_err();
        assert!(alloc::format!("{e}").contains("z^2/4"));
    }

    #[test]
    fn center_value_unit_aa() {
        // φ(0)² = −ω/(α + κ) with α = 1/4, κ = √(1/16 + 1/3).
        let p = wp(1.0, 1.0, -1.0, 0.0);
        let k = sqrt(1.0 / 16.0 + 1.0 / 3.0);
        let expect = sqrt(1.0 / (0.25 + k));
        assert!((phi_eval(0.0, &p) - expect).abs() < 1e-15);
        assert!((phi_eval(0.0, &p) - 1.066_52).abs() < 1e-5);
    }

    #[test]
    fn shift_has_sign_of_z() {
        assert!(ProfileEvaluator::new(wp(1.0, 1.0, -3.0, 2.0)).shift_b > 0.0);
        assert!(ProfileEvaluator::new(wp(1.0, 1.0, -3.0, -2.0)).shift_b < 0.0);
        assert_eq!(ProfileEvaluator::new(wp(1.0, 1.0, -3.0, 0.0)).shift_b, 0.0);
    }

    #[test]
    fn residual_at_origin_is_domain_error() {
        assert!(matches!(ode_residual(0.0, &wp(1.0, 1.0, -1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn r_inverse_rejects_closed_interval() {
        let p = wp(1.0, 1.0, -1.0, 0.0);
        assert!(r_inverse(1.0, &p).is_err());
        assert!(r_inverse(-1.0, &p).is_err());
        assert_eq!(r_inverse(0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn far_tail_is_finite() {
        let ev = ProfileEvaluator::new(wp(1.0, 1.0, -50.0, 1.0));
        assert_eq!(ev.phi(1e3), 0.0);
        assert_eq!(ev.phi_derivative(1e3, Side::Right), 0.0);
    }
}
