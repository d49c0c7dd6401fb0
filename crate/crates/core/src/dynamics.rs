//! Split-step integration of the full equation: exact nonlinear phase
//! rotations around a Crank–Nicolson step for −d² − Zδ.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{cos, exp, sin, sqrt};
use crate::profile::{ProfileEvaluator, WaveParameters};
use crate::spectral::{GridSpec, Sector};

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub samples: Vec<Complex64>,
    pub grid: GridSpec,
    pub time: f64,
    pub params: WaveParameters,
}

impl FieldState {
    pub fn new(samples: Vec<Complex64>, grid: GridSpec, time: f64, params: WaveParameters) -> Result<Self> {
        if grid.sector != Sector::FullLine {
            return Err(Error::Grid("fields live on the full-line grid".into()));
        }
        if samples.len() != grid.n_points {
            return Err(Error::Grid(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.n_points
            )));
        }
        if samples.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("field has non-finite samples".into()));
        }
        Ok(FieldState { samples, grid, time, params })
    }

    pub fn from_fn(grid: GridSpec, params: WaveParameters, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let s = grid.nodes().into_iter().map(f).collect();
        FieldState::new(s, grid, 0.0, params)
    }

    /// φ_{ω,Z} sampled on `grid`.
    pub fn profile(params: WaveParameters, grid: GridSpec) -> Result<Self> {
        let ev = ProfileEvaluator::new(params);
        FieldState::from_fn(grid, params, |x| Complex64::new(ev.phi(x), 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedPair {
    pub energy: f64,
    pub charge: f64,
}

// Σ over all grid edges, including the two edges to the zero data outside.
fn gradient_sq(u: &[Complex64], h: f64) -> f64 {
    let n = u.len();
    let mut s = u[0].norm_sqr() + u[n - 1].norm_sqr();
    for i in 0..n - 1 {
        s += (u[i + 1] - u[i]).norm_sqr();
    }
    s / h
}

/// ½∫|u_x|² − (λ₁/4)∫|u|⁴ − (λ₂/6)∫|u|⁶ − (Z/2)|u(0)|².
pub fn discrete_energy(u: &FieldState) -> f64 {
    let p = &u.params;
    let h = u.grid.spacing;
    let mut pot = 0.0;
    for c in &u.samples {
        let m = c.norm_sqr();
        pot += m * m * (p.lambda1 / 4.0 + p.lambda2 / 6.0 * m);
    }
    let uc = u.samples[u.grid.center()].norm_sqr();
    0.5 * gradient_sq(&u.samples, h) - h * pot - 0.5 * p.z * uc
}

/// ½·h·Σ|u_i|².
pub fn discrete_charge(u: &FieldState) -> f64 {
    0.5 * u.grid.spacing * u.samples.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

pub fn conserved(u: &FieldState) -> ConservedPair {
    ConservedPair {
        energy: discrete_energy(u),
        charge: discrete_charge(u),
    }
}

/// Factored Crank–Nicolson step for i∂_t u = A u, A = −Δ_h − (Z/h)δ_c.
///
/// The system is eliminated from both ends towards the centre node, so the
/// arithmetic on node i and on its mirror image is identical and even or odd
/// data keep their parity exactly.
#[derive(Debug, Clone)]
pub struct CnStepper {
    n: usize,
    c: usize,
    dt: f64,
    h: f64,
    z: f64,
    off: Complex64,
    gamma: Vec<Complex64>,
    inv: Vec<Complex64>,
    center_inv: Complex64,
}

impl CnStepper {
    pub fn new(grid: &GridSpec, z: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Step(format!("dt must be positive, got {dt}")));
        }
        let n = grid.n_points;
        let c = grid.center();
        let h = grid.spacing;
        let half = 0.5 * dt;
        let a = 2.0 / (h * h);
        let mut diag = vec![Complex64::new(1.0, half * a); n];
        diag[c] = Complex64::new(1.0, half * (a - z / h));
        let off = Complex64::new(0.0, -half / (h * h));
        // gamma[i] couples u_i to its neighbour away from the boundary; gamma
        // is mirror-symmetric, so only the top half is stored.
        let mut gamma = vec![Complex64::new(0.0, 0.0); c];
        let mut inv = vec![Complex64::new(0.0, 0.0); c];
        let mut prev = Complex64::new(0.0, 0.0);
        for i in 0..c {
            let piv = diag[i] - off * prev;
            if piv.norm_sqr() == 0.0 {
                return Err(Error::Solve("zero pivot in the Crank-Nicolson system".into()));
            }
            inv[i] = piv.inv();
            gamma[i] = off * inv[i];
            prev = gamma[i];
        }
        let cpiv = diag[c] - off * prev - off * prev;
        if cpiv.norm_sqr() == 0.0 {
            return Err(Error::Solve("zero centre pivot in the Crank-Nicolson system".into()));
        }
        Ok(CnStepper {
            n,
            c,
            dt,
            h,
            z,
            off,
            gamma,
            inv,
            center_inv: cpiv.inv(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `u` in place using `work` (length n) as scratch.
    pub fn step(&self, u: &mut [Complex64], work: &mut Vec<Complex64>) {
        let (n, c) = (self.n, self.c);
        let k = Complex64::new(0.0, 0.5 * self.dt);
        let a = 2.0 / (self.h * self.h);
        let e = 1.0 / (self.h * self.h);
        work.resize(n, Complex64::new(0.0, 0.0));
        let r = &mut work[..];
        // r = (I − i dt/2 A) u, with mirror-symmetric operation order.
        for i in 0..n {
            let left = if i > 0 { u[i - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if i + 1 < n { u[i + 1] } else { Complex64::new(0.0, 0.0) };
            let nb = if i < c { left + right } else { right + left };
            let ai = if i == c { a - self.z / self.h } else { a };
            r[i] = u[i] - k * (u[i] * ai - nb * e);
        }
        // forward from both ends
        let mut top = Complex64::new(0.0, 0.0);
        let mut bot = Complex64::new(0.0, 0.0);
        for i in 0..c {
            let j = n - 1 - i;
            top = (r[i] - self.off * top) * self.inv[i];
            bot = (r[j] - self.off * bot) * self.inv[i];
            r[i] = top;
            r[j] = bot;
        }
        let uc = ((r[c] - self.off * r[c - 1]) - self.off * r[c + 1]) * self.center_inv;
        u[c] = uc;
        let mut next_top = uc;
        let mut next_bot = uc;
        for i in (0..c).rev() {
            let j = n - 1 - i;
            next_top = r[i] - self.gamma[i] * next_top;
            next_bot = r[j] - self.gamma[i] * next_bot;
            u[i] = next_top;
            u[j] = next_bot;
        }
    }
}

/// One Crank–Nicolson step of the linear flow.
pub fn cn_linear_step(u: &FieldState, dt: f64) -> Result<FieldState> {
    let s = CnStepper::new(&u.grid, u.params.z, dt)?;
    let mut out = u.clone();
    let mut work = Vec::new();
    s.step(&mut out.samples, &mut work);
    out.time += dt;
    Ok(out)
}

fn rotate(u: &mut [Complex64], l1: f64, l2: f64, dt: f64) {
    for c in u.iter_mut() {
        let m = c.norm_sqr();
        let th = dt * (l1 * m + l2 * m * m);
        *c *= Complex64::new(cos(th), sin(th));
    }
}

/// u_i → u_i·exp(i·dt·(λ₁|u_i|² + λ₂|u_i|⁴)).
pub fn nonlinear_phase_step(u: &FieldState, dt: f64) -> FieldState {
    let mut out = u.clone();
    rotate(&mut out.samples, u.params.lambda1, u.params.lambda2, dt);
    out.time += dt;
    out
}

/// Strang splitting with a reusable linear factorization.
#[derive(Debug, Clone)]
pub struct Integrator {
    cn: CnStepper,
    lambda1: f64,
    lambda2: f64,
    work: Vec<Complex64>,
}

impl Integrator {
    pub fn new(grid: &GridSpec, params: &WaveParameters, dt: f64) -> Result<Self> {
        if dt > 0.5 * grid.spacing {
            return Err(Error::Step(format!(
                "dt = {dt} exceeds the cap 0.5 h = {}",
                0.5 * grid.spacing
            )));
        }
        Ok(Integrator {
            cn: CnStepper::new(grid, params.z, dt)?,
            lambda1: params.lambda1,
            lambda2: params.lambda2,
            work: Vec::new(),
        })
    }

    pub fn step(&mut self, u: &mut FieldState) {
        let dt = self.cn.dt();
        rotate(&mut u.samples, self.lambda1, self.lambda2, 0.5 * dt);
        self.cn.step(&mut u.samples, &mut self.work);
        rotate(&mut u.samples, self.lambda1, self.lambda2, 0.5 * dt);
        u.time += dt;
    }
}

/// Nonlinear half step, linear full step, nonlinear half step.
pub fn strang_step(u: &FieldState, dt: f64) -> Result<FieldState> {
    let mut it = Integrator::new(&u.grid, &u.params, dt)?;
    let mut out = u.clone();
    it.step(&mut out);
    Ok(out)
}

/// Discrete H¹ pairing h·Σ a·conj(b) + h·Σ D⁺a·conj(D⁺b).
fn h1_pair(a: &[Complex64], b: &[f64], h: f64) -> Complex64 {
    let n = a.len();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        s += a[i] * b[i];
    }
    s *= h;
    let mut g = a[0] * b[0] + a[n - 1] * b[n - 1];
    for i in 0..n - 1 {
        g += (a[i + 1] - a[i]) * (b[i + 1] - b[i]);
    }
    s + g / h
}

fn h1_norm_sq_c(a: &[Complex64], h: f64) -> f64 {
    h * a.iter().map(|c| c.norm_sqr()).sum::<f64>() + gradient_sq(a, h)
}

fn h1_norm_sq_r(b: &[f64], h: f64) -> f64 {
    let n = b.len();
    let mut g = b[0] * b[0] + b[n - 1] * b[n - 1];
    for i in 0..n - 1 {
        g += (b[i + 1] - b[i]) * (b[i + 1] - b[i]);
    }
    h * b.iter().map(|x| x * x).sum::<f64>() + g / h
}

/// Discrete H¹ norm of φ_{ω,Z} on `grid`.
pub fn profile_h1_norm(p: &WaveParameters, grid: &GridSpec) -> f64 {
    let ev = ProfileEvaluator::new(*p);
    let f: Vec<f64> = grid.nodes().iter().map(|&x| ev.phi(x)).collect();
    sqrt(h1_norm_sq_r(&f, grid.spacing))
}

fn distance_to(u: &[Complex64], phi: &[f64], phi_sq: f64, h: f64) -> f64 {
    let d2 = h1_norm_sq_c(u, h) + phi_sq - 2.0 * h1_pair(u, phi, h).norm();
    sqrt(d2.max(0.0))
}

/// inf over θ of ‖u − e^{iθ}φ‖_{H¹}, attained at θ = arg⟨u, φ⟩.
pub fn orbital_distance(u: &FieldState, p: &WaveParameters) -> f64 {
    let ev = ProfileEvaluator::new(*p);
    let phi: Vec<f64> = u.grid.nodes().iter().map(|&x| ev.phi(x)).collect();
    let h = u.grid.spacing;
    distance_to(&u.samples, &phi, h1_norm_sq_r(&phi, h), h)
}

/// max_i |e^{−iθ}u_i − φ(x_i)| with θ the phase of ⟨u, φ⟩ in L².
pub fn phase_aligned_error(u: &FieldState, p: &WaveParameters) -> f64 {
    let ev = ProfileEvaluator::new(*p);
    let phi: Vec<f64> = u.grid.nodes().iter().map(|&x| ev.phi(x)).collect();
    let pair: Complex64 = u.samples.iter().zip(&phi).map(|(a, b)| a * b).sum();
    let rot = if pair.norm() > 0.0 { pair.conj() / pair.norm() } else { Complex64::new(1.0, 0.0) };
    u.samples
        .iter()
        .zip(&phi)
        .map(|(a, b)| (a * rot - b).norm())
        .fold(0.0, f64::max)
}

/// h-weighted L² norm of the odd part of the field.
pub fn parity_drift(u: &FieldState) -> f64 {
    let s = &u.samples;
    let n = s.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += (0.5 * (s[i] - s[n - 1 - i])).norm_sqr();
    }
    sqrt(u.grid.spacing * acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationKind {
    None,
    /// e^{−x²}
    EvenBump,
    /// x·e^{−x²}
    OddBump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    /// Size in the discrete H¹ norm.
    pub amplitude: f64,
}

impl Perturbation {
    pub fn none() -> Self {
        Perturbation {
            kind: PerturbationKind::None,
            amplitude: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub grid: GridSpec,
    pub dt: f64,
    pub horizon: f64,
    /// Record every `stride` steps.
    pub stride: usize,
}

impl SimConfig {
    /// h = 0.02 on L = 30/√(−ω) + |b|, dt = h/4, one row per 0.1 time units.
    pub fn default_for(p: &WaveParameters, horizon: f64) -> Self {
        let ev = ProfileEvaluator::new(*p);
        let h = 0.02;
        let grid = GridSpec::with_spacing(30.0 / ev.root_minus_omega + ev.shift_b.abs(), h, Sector::FullLine)
            .expect("valid default grid");
        let dt = h / 4.0;
        SimConfig {
            grid,
            dt,
            horizon,
            stride: libm::round(0.1 / dt).max(1.0) as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimRow {
    pub time: f64,
    pub energy: f64,
    pub charge: f64,
    pub orbital_distance: f64,
    pub parity_drift: f64,
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub rows: Vec<SimRow>,
    /// Time at which max|u| passed 10³·max φ; the run stops there.
    pub blowup_at: Option<f64>,
    pub phi_h1_norm: f64,
    pub config: SimConfig,
    pub final_state: FieldState,
}

impl SimResult {
    pub fn check(&self) -> Result<()> {
        match self.blowup_at {
            Some(t) => Err(Error::Blowup(format!("max|u| exceeded 1e3 max(phi) at t = {t}"))),
            None => Ok(()),
        }
    }

    pub fn initial_distance(&self) -> f64 {
        self.rows[0].orbital_distance
    }

    pub fn max_distance(&self) -> f64 {
        self.rows.iter().map(|r| r.orbital_distance).fold(0.0, f64::max)
    }
}

pub fn simulate(p: &WaveParameters, perturbation: Perturbation, horizon: f64, dt: Option<f64>) -> Result<SimResult> {
    let mut cfg = SimConfig::default_for(p, horizon);
    if let Some(dt) = dt {
        cfg.dt = dt;
        cfg.stride = libm::round(0.1 / dt).max(1.0) as usize;
    }
    simulate_with(p, perturbation, cfg)
}

pub fn simulate_with(p: &WaveParameters, perturbation: Perturbation, cfg: SimConfig) -> Result<SimResult> {
    let grid = cfg.grid;
    let h = grid.spacing;
    let ev = ProfileEvaluator::new(*p);
    let x = grid.nodes();
    let phi: Vec<f64> = x.iter().map(|&x| ev.phi(x)).collect();
    let phi_l2 = sqrt(h * phi.iter().map(|v| v * v).sum::<f64>());
    let phi_h1_sq = h1_norm_sq_r(&phi, h);
    if !(perturbation.amplitude >= 0.0) || perturbation.amplitude > 0.1 * phi_l2 {
        return Err(Error::Domain(format!(
            "perturbation amplitude {} outside [0, 0.1 ||phi||] = [0, {}]",
            perturbation.amplitude,
            0.1 * phi_l2
        )));
    }
    if !(cfg.horizon >= 0.0) || cfg.stride == 0 {
        return Err(Error::Domain("horizon must be >= 0 and stride >= 1".into()));
    }
    let bump: Vec<f64> = match perturbation.kind {
        PerturbationKind::None => vec![0.0; x.len()],
        PerturbationKind::EvenBump => x.iter().map(|&x| exp(-x * x)).collect(),
        PerturbationKind::OddBump => x.iter().map(|&x| x * exp(-x * x)).collect(),
    };
    let bn = sqrt(h1_norm_sq_r(&bump, h));
    let scale = if bn > 0.0 { perturbation.amplitude / bn } else { 0.0 };
    let samples = phi
        .iter()
        .zip(&bump)
        .map(|(f, b)| Complex64::new(f + scale * b, 0.0))
        .collect();
    let mut u = FieldState::new(samples, grid, 0.0, *p)?;
    let mut it = Integrator::new(&grid, p, cfg.dt)?;
    let phi_max = phi.iter().cloned().fold(0.0, f64::max);
    let record = |u: &FieldState| SimRow {
        time: u.time,
        energy: discrete_energy(u),
        charge: discrete_charge(u),
        orbital_distance: distance_to(&u.samples, &phi, phi_h1_sq, h),
        parity_drift: parity_drift(u),
    };
    let steps = libm::round(cfg.horizon / cfg.dt) as usize;
    let mut rows = vec![record(&u)];
    let mut blowup_at = None;
    for k in 1..=steps {
        it.step(&mut u);
        // Time from the step count, so rows land on exact multiples of dt.
        u.time = k as f64 * cfg.dt;
        if k % cfg.stride == 0 || k == steps {
            let m = u.samples.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
            rows.push(record(&u));
            if sqrt(m) > 1e3 * phi_max {
                blowup_at = Some(u.time);
                break;
            }
        }
    }
    Ok(SimResult {
        rows,
        blowup_at,
        phi_h1_norm: sqrt(phi_h1_sq),
        config: cfg,
        final_state: u,
    })
}

/// Kernel of the delta part of the linear propagator for Z < 0:
/// ρ_Z(x) = (Z/2)·e^{−Zx/2} on x ≤ 0 and τ_Z = δ + ρ_Z. With this sign the
/// reflection coefficient of −d² − Zδ is −Z/(Z + 2ik).
#[derive(Debug, Clone)]
pub struct KernelSet {
    pub z: f64,
    /// ρ_Z at x = −j·h, j = 0, 1, ...
    pub rho_samples: Vec<f64>,
    pub spacing: f64,
}

impl KernelSet {
    pub fn new(z: f64, spacing: f64, len: usize) -> Result<Self> {
        if !(z < 0.0) {
            return Err(Error::Domain(format!("kernel set is defined for z < 0, got {z}")));
        }
        let rho_samples = (0..len).map(|j| rho(z, -(j as f64) * spacing)).collect();
        Ok(KernelSet { z, rho_samples, spacing })
    }
}

/// ρ_Z(x), zero for x > 0.
pub fn rho(z: f64, x: f64) -> f64 {
    if x > 0.0 {
        0.0
    } else {
        0.5 * z * exp(-0.5 * z * x)
    }
}
