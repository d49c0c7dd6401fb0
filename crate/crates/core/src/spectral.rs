//! Finite-difference linearized operators with the point interaction, inertia
//! counts, lowest eigenpairs and the quadratic-form checks on φ.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{sqrt, SQRT3};
use crate::profile::{ar_omega_bound, phi_center_sq, ProfileEvaluator, Regime, WaveParameters};
use crate::quadrature::{integrate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    FullLine,
    /// Even functions, stored on [0, L].
    EvenSector,
}

/// Uniform grid on [−L, L] with an odd node count, so x = 0 is a node.
/// The even sector keeps the (n+1)/2 nodes of [0, L].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: f64,
    pub n_points: usize,
    pub spacing: f64,
    pub sector: Sector,
}

impl GridSpec {
    pub fn new(half_width: f64, n_points: usize, sector: Sector) -> Result<Self> {
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(Error::Grid(format!("n_points must be odd and >= 3, got {n_points}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Grid(format!("half width must be positive, got {half_width}")));
        }
        Ok(GridSpec {
            half_width,
            n_points,
            spacing: 2.0 * half_width / (n_points - 1) as f64,
            sector,
        })
    }

    /// Smallest grid with spacing exactly `h` whose half width is at least `min_half_width`.
    pub fn with_spacing(min_half_width: f64, h: f64, sector: Sector) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Grid(format!("spacing must be positive, got {h}")));
        }
        let half = libm::ceil(min_half_width / h - 1e-9) as usize;
        let n = 2 * half.max(1) + 1;
        Ok(GridSpec {
            half_width: half.max(1) as f64 * h,
            n_points: n,
            spacing: h,
            sector,
        })
    }

    /// Working grid: 2001 nodes on L = 30/√(−ω) widened by the hump offset |b|.
    pub fn working(p: &WaveParameters, sector: Sector) -> Self {
        let ev = ProfileEvaluator::new(*p);
        let l = 30.0 / ev.root_minus_omega + ev.shift_b.abs();
        GridSpec::new(l, 2001, sector).expect("valid working grid")
    }

    /// Spacing `h_scale/√(−ω)` on the working extent 30/√(−ω) + |b|.
    pub fn for_profile(p: &WaveParameters, h_scale: f64, sector: Sector) -> Result<Self> {
        let ev = ProfileEvaluator::new(*p);
        let r = ev.root_minus_omega;
        GridSpec::with_spacing(30.0 / r + ev.shift_b.abs(), h_scale / r, sector)
    }

    /// Same extent, twice as many intervals.
    pub fn refined(&self) -> Self {
        GridSpec::new(self.half_width, 2 * self.n_points - 1, self.sector).expect("refinement of a valid grid")
    }

    pub fn with_sector(&self, sector: Sector) -> Self {
        GridSpec { sector, ..*self }
    }

    pub fn center(&self) -> usize {
        (self.n_points - 1) / 2
    }

    /// Number of unknowns in this sector.
    pub fn dim(&self) -> usize {
        match self.sector {
            Sector::FullLine => self.n_points,
            Sector::EvenSector => self.center() + 1,
        }
    }

    /// Node coordinates; exactly antisymmetric about the centre on the full line.
    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing;
        match self.sector {
            Sector::FullLine => {
                let c = self.center() as isize;
                (0..self.n_points as isize).map(|i| (i - c) as f64 * h).collect()
            }
            Sector::EvenSector => (0..self.dim()).map(|j| j as f64 * h).collect(),
        }
    }

    /// Resolution and extent needed to carry φ_{ω,Z}.
    pub fn check_resolves(&self, p: &WaveParameters) -> Result<()> {
        let r = sqrt(-p.omega);
        if self.spacing > 0.05 / r * (1.0 + 1e-12) {
            return Err(Error::Grid(format!(
                "spacing {} exceeds 0.05/sqrt(-omega) = {}",
                self.spacing,
                0.05 / r
            )));
        }
        if self.half_width < 30.0 / r * (1.0 - 1e-12) {
            return Err(Error::Grid(format!(
                "half width {} below 30/sqrt(-omega) = {}",
                self.half_width,
                30.0 / r
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// −d² − ω − 3λ₁φ² − 5λ₂φ⁴
    L1,
    /// −d² − ω − λ₁φ² − λ₂φ⁴
    L2,
    /// −d² − Zδ
    FreeWithDelta,
}

/// Symmetric tridiagonal matrix. In the even sector node 0 carries weight 1/2,
/// so the stored matrix is the √2-symmetrized form of the ghost-point closure.
#[derive(Debug, Clone)]
pub struct TridiagonalOperator {
    pub diagonal: Vec<f64>,
    pub offdiagonal: Vec<f64>,
    pub kind: OperatorKind,
    pub grid: GridSpec,
    pub z: f64,
    pub params: Option<WaveParameters>,
}

fn assemble(kind: OperatorKind, z: f64, params: Option<WaveParameters>, grid: GridSpec, pot: Vec<f64>) -> TridiagonalOperator {
    let h = grid.spacing;
    let ih2 = 1.0 / (h * h);
    let m = grid.dim();
    let mut diagonal: Vec<f64> = pot.iter().map(|v| 2.0 * ih2 + v).collect();
    let mut offdiagonal = vec![-ih2; m - 1];
    match grid.sector {
        Sector::FullLine => diagonal[grid.center()] -= z / h,
        Sector::EvenSector => {
            diagonal[0] -= z / h;
            offdiagonal[0] = -core::f64::consts::SQRT_2 * ih2;
        }
    }
    TridiagonalOperator { diagonal, offdiagonal, kind, grid, z, params }
}

/// −d² − Zδ on the grid, with the delta lumped as −Z/h on the centre node.
pub fn discretize_free(z: f64, grid: GridSpec) -> TridiagonalOperator {
    assemble(OperatorKind::FreeWithDelta, z, None, grid, vec![0.0; grid.dim()])
}

pub fn discretize_operator(kind: OperatorKind, p: &WaveParameters, grid: GridSpec) -> Result<TridiagonalOperator> {
    if kind == OperatorKind::FreeWithDelta {
        return Ok(discretize_free(p.z, grid));
    }
    grid.check_resolves(p)?;
    let ev = ProfileEvaluator::new(*p);
    let (c3, c5) = match kind {
        OperatorKind::L1 => (3.0, 5.0),
        _ => (1.0, 1.0),
    };
    let pot = grid
        .nodes()
        .iter()
        .map(|&x| {
            let f2 = ev.phi_sq(x);
            -p.omega - c3 * p.lambda1 * f2 - c5 * p.lambda2 * f2 * f2
        })
        .collect();
    Ok(assemble(kind, p.z, Some(*p), grid, pot))
}

impl TridiagonalOperator {
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiagonal[i - 1].abs();
            }
            if i + 1 < n {
                r += self.offdiagonal[i].abs();
            }
            lo = lo.min(self.diagonal[i] - r);
            hi = hi.max(self.diagonal[i] + r);
        }
        (lo, hi)
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(1.0)
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diagonal[i] * v[i];
            if i > 0 {
                s += self.offdiagonal[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.offdiagonal[i] * v[i + 1];
            }
            out[i] = s;
        }
    }

    /// Sector-weighted squared norm h·Σv² of a vector in symmetrized coordinates.
    fn weight(&self) -> f64 {
        self.grid.spacing
    }

    /// Converts symmetrized coordinates to node values.
    fn to_nodes(&self, mut v: Vec<f64>) -> Vec<f64> {
        if self.grid.sector == Sector::EvenSector {
            v[0] *= core::f64::consts::SQRT_2;
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub count: usize,
    /// A zero pivot was met and nudged.
    pub perturbed: bool,
}

/// Number of eigenvalues strictly below `shift`: negative pivots of the LDLᵀ
/// factorization of op − shift·I.
pub fn inertia(op: &TridiagonalOperator, shift: f64) -> Inertia {
    let nudge = 1e-13 * op.scale();
    let mut count = 0;
    let mut perturbed = false;
    let mut d = 1.0;
    for i in 0..op.dim() {
        let mut a = op.diagonal[i] - shift;
        if i > 0 {
            let b = op.offdiagonal[i - 1];
            a -= b * b / d;
        }
        if a == 0.0 {
            a = -nudge;
            perturbed = true;
        }
        if a < 0.0 {
            count += 1;
        }
        d = a;
    }
    Inertia { count, perturbed }
}

pub fn inertia_below(op: &TridiagonalOperator, shift: f64) -> usize {
    inertia(op, shift).count
}

/// The `index`-th smallest eigenvalue (0-based) by bisection to `tol`.
pub fn eigenvalue_at(op: &TridiagonalOperator, index: usize, tol: f64) -> f64 {
    let (mut lo, mut hi) = op.gershgorin();
    lo -= 1.0;
    hi += 1.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inertia_below(op, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

// Solves (op − μI)x = rhs by Gaussian elimination with partial pivoting.
fn shifted_solve(op: &TridiagonalOperator, mu: f64, rhs: &[f64], tiny: f64) -> Vec<f64> {
    let n = op.dim();
    // Rows hold (lower-diag position shifted into a, diag, up1, up2) as in LAPACK gttrf.
    let mut dl: Vec<f64> = op.offdiagonal.clone();
    let mut d: Vec<f64> = op.diagonal.iter().map(|a| a - mu).collect();
    let mut du: Vec<f64> = op.offdiagonal.clone();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = f;
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let t = d[i + 1];
            d[i + 1] = du[i] - f * t;
            du[i] = t;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
            dl[i] = f;
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    let mut x = b;
    x[n - 1] /= d[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = sqrt(dot(v, v));
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// The k ≤ 5 smallest eigenvalues (bisection, 1e−10 absolute) with eigenvectors
/// by inverse iteration, as node values normalized in the h-weighted L² norm
/// (half-line trapezoid weights in the even sector).
pub fn lowest_eigenpairs(op: &TridiagonalOperator, k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    if k > 5 || k > op.dim() {
        return Err(Error::Domain(format!("lowest_eigenpairs supports k <= 5, got {k}")));
    }
    let n = op.dim();
    let scale = op.scale();
    let mut sym: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
    let mut av = vec![0.0; n];
    for j in 0..k {
        let lam = eigenvalue_at(op, j, 1e-10);
        // Deterministic start vector with no parity.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * libm::sin(0.37 * i as f64 + 0.1 * j as f64) + (i as f64) / (n as f64))
            .collect();
        normalize(&mut v);
        let cluster: Vec<usize> = (0..sym.len())
            .filter(|&i| (sym[i].0 - lam).abs() < 1e-7 * scale)
            .collect();
        let mut ok = false;
        let mut res = f64::INFINITY;
        for _ in 0..50 {
            let mut w = shifted_solve(op, lam, &v, f64::EPSILON * scale);
            for &i in &cluster {
                let c = dot(&w, &sym[i].1);
                w.iter_mut().zip(&sym[i].1).for_each(|(a, b)| *a -= c * b);
            }
            if normalize(&mut w) == 0.0 || !w[0].is_finite() {
                return Err(Error::Convergence("inverse iteration produced a null vector".into()));
            }
            v = w;
            op.apply(&v, &mut av);
            res = sqrt(av.iter().zip(&v).map(|(a, x)| (a - lam * x) * (a - lam * x)).sum::<f64>());
            if res < 1e-8 {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(Error::Convergence(format!(
                "inverse iteration for eigenvalue {lam} stalled at residual {res:e}"
            )));
        }
        sym.push((lam, v));
    }
    let w = op.weight();
    Ok(sym
        .into_iter()
        .map(|(lam, v)| {
            let scaled: Vec<f64> = v.iter().map(|x| x / sqrt(w)).collect();
            let mut nodes = op.to_nodes(scaled);
            // Sign convention: largest-magnitude component positive.
            let big = nodes.iter().fold(0.0f64, |m, &x| if x.abs() > m.abs() { x } else { m });
            if big < 0.0 {
                nodes.iter_mut().for_each(|x| *x = -*x);
            }
            (lam, nodes)
        })
        .collect())
}

/// Share of the discrete L² norm carried by the odd part of a full-line vector.
pub fn odd_fraction(v: &[f64]) -> f64 {
    let n = v.len();
    let (mut odd, mut all) = (0.0, 0.0);
    for i in 0..n {
        let o = 0.5 * (v[i] - v[n - 1 - i]);
        odd += o * o;
        all += v[i] * v[i];
    }
    if all == 0.0 {
        0.0
    } else {
        sqrt(odd / all)
    }
}

/// Shift −ε used to exclude the zero mode of L2 from negative counts. The
/// discrete zero mode sits at −O(h²), so ε grows like h².
pub fn zero_mode_guard(omega: f64, h: f64) -> f64 {
    let w = omega.abs().max(1.0);
    (1e-6 * w).max(2.0 * h * h * w * w)
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub negative_count: usize,
    pub lowest_pairs: Vec<(f64, Vec<f64>)>,
    /// Distance from 0 to the computed spectrum.
    pub kernel_residual: f64,
    pub essential_edge: f64,
    pub grid: GridSpec,
}

/// Distance from 0 to the spectrum of `op`.
pub fn gap_at_zero(op: &TridiagonalOperator) -> f64 {
    let k0 = inertia_below(op, 0.0);
    let above = if k0 < op.dim() { eigenvalue_at(op, k0, 1e-12).abs() } else { f64::INFINITY };
    let below = if k0 > 0 { eigenvalue_at(op, k0 - 1, 1e-12).abs() } else { f64::INFINITY };
    above.min(below)
}

pub fn spectrum_report(op: &TridiagonalOperator, k: usize) -> Result<SpectrumReport> {
    let (edge, eps) = match op.params {
        Some(p) => (-p.omega, zero_mode_guard(p.omega, op.grid.spacing)),
        None => (0.0, 1e-6),
    };
    let pairs = lowest_eigenpairs(op, k.min(op.dim()))?;
    let listed = pairs.into_iter().filter(|(l, _)| *l < edge).collect();
    Ok(SpectrumReport {
        negative_count: inertia_below(op, -eps),
        lowest_pairs: listed,
        kernel_residual: gap_at_zero(op),
        essential_edge: edge,
        grid: op.grid,
    })
}

/// Negative-eigenvalue count at shift −ε, confirmed on the refined grid.
pub fn morse_index(kind: OperatorKind, p: &WaveParameters, grid: GridSpec) -> Result<usize> {
    let count = |g: GridSpec| -> Result<usize> {
        let op = discretize_operator(kind, p, g)?;
        Ok(inertia_below(&op, -zero_mode_guard(p.omega, g.spacing)))
    };
    let a = count(grid)?;
    let b = count(grid.refined())?;
    if a != b {
        return Err(Error::Instability(format!(
            "{kind:?} negative count changes under refinement: {a} at n = {}, {b} at n = {}",
            grid.n_points,
            grid.refined().n_points
        )));
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelReport {
    /// |λ_min(L2)|; tends to 0 like h².
    pub l2_lowest: f64,
    /// Distance from 0 to the spectrum of L1; stays away from 0 when Z ≠ 0.
    pub l1_gap: f64,
    /// Shift used for the negative counts on this grid.
    pub guard: f64,
}

impl KernelReport {
    pub fn residual(&self) -> f64 {
        self.l2_lowest
    }
}

pub fn kernel_residual(p: &WaveParameters, grid: GridSpec) -> Result<KernelReport> {
    let l2 = discretize_operator(OperatorKind::L2, p, grid)?;
    let l1 = discretize_operator(OperatorKind::L1, p, grid)?;
    Ok(KernelReport {
        l2_lowest: eigenvalue_at(&l2, 0, 1e-12).abs(),
        l1_gap: gap_at_zero(&l1),
        guard: zero_mode_guard(p.omega, grid.spacing),
    })
}

/// (L1 φ, φ) = ∫(−2λ₁φ⁴ − 4λ₂φ⁶) by quadrature.
pub fn quadratic_form_phi(p: &WaveParameters) -> Result<f64> {
    let ev = ProfileEvaluator::new(*p);
    let r = ev.root_minus_omega;
    let l = 60.0 / r + ev.shift_b.abs();
    let hump = (-ev.shift_b).max(0.0);
    let half = integrate(
        |x| {
            let f2 = ev.phi_sq(x);
            f2 * f2 * (-2.0 * p.lambda1 - 4.0 * p.lambda2 * f2)
        },
        0.0,
        l,
        &[hump],
        Tolerance::default(),
    )?;
    Ok(2.0 * half)
}

/// h·vᵀ L1 v for v = φ sampled on a full-line grid.
pub fn quadratic_form_discrete(p: &WaveParameters, grid: GridSpec) -> Result<f64> {
    let g = grid.with_sector(Sector::FullLine);
    let op = discretize_operator(OperatorKind::L1, p, g)?;
    let ev = ProfileEvaluator::new(*p);
    let v: Vec<f64> = g.nodes().iter().map(|&x| ev.phi(x)).collect();
    let mut lv = vec![0.0; v.len()];
    op.apply(&v, &mut lv);
    Ok(g.spacing * dot(&v, &lv))
}

/// Window −ω < min{−3λ₁²/(16λ₂), −λ₁²/(6λ₂) + Z²/4}, 0 < Z < √3λ₁/(2√(−λ₂)) in
/// which λ₁/(2λ₂) + φ²(0) < 0 forces (L1 φ, φ) < 0.
pub fn negative_direction_check(p: &WaveParameters) -> Result<bool> {
    if p.regime != Regime::AttractiveRepulsive {
        return Err(Error::Regime("negative_direction_check needs the attractive-repulsive regime".into()));
    }
    let (l1, l2) = (p.lambda1, p.lambda2);
    let bound = ar_omega_bound(l1, l2).min(-l1 * l1 / (6.0 * l2) + p.z * p.z / 4.0);
    let zmax = SQRT3 * l1 / (2.0 * sqrt(-l2));
    let inside = -p.omega < bound && p.z > 0.0 && p.z < zmax;
    if inside {
        let c = l1 / (2.0 * l2) + phi_center_sq(p)?;
        if !(c < 0.0) {
            return Err(Error::Precondition(format!(
                "lambda1/(2 lambda2) + phi(0)^2 = {c} is not negative inside the window"
            )));
        }
    }
    Ok(inside)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shapes() {
        let g = GridSpec::new(10.0, 2001, Sector::FullLine).unwrap();
        assert_eq!(g.spacing, 0.01);
        assert_eq!(g.nodes()[g.center()], 0.0);
        assert_eq!(g.with_sector(Sector::EvenSector).dim(), 1001);
        assert_eq!(g.refined().n_points, 4001);
        assert!(GridSpec::new(10.0, 2000, Sector::FullLine).is_err());
        let nodes = g.nodes();
        for i in 0..nodes.len() {
            assert_eq!(nodes[i], -nodes[nodes.len() - 1 - i]);
        }
        let s = GridSpec::with_spacing(21.2, 0.01, Sector::FullLine).unwrap();
        assert_eq!(s.spacing, 0.01);
        assert!(s.half_width >= 21.2 - 1e-9);
    }

    #[test]
    fn pivoted_solve_matches_apply() {
        let g = GridSpec::new(1.0, 9, Sector::FullLine).unwrap();
        let op = discretize_free(1.0, g);
        let x: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).cos()).collect();
        let mut ax = vec![0.0; 9];
        op.apply(&x, &mut ax);
        // Shifts near the diagonal (32) force row interchanges.
        for mu in [50.0, 32.0, 31.0, 17.5, 40.0, -3.0] {
            let rhs: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - mu * b).collect();
            let y = shifted_solve(&op, mu, &rhs, 1e-300);
            for i in 0..9 {
                assert!((x[i] - y[i]).abs() < 1e-10, "mu = {mu}: {} vs {}", x[i], y[i]);
            }
        }
    }

    #[test]
    fn even_sector_matches_full_line_even_eigenvalues() {
        let g = GridSpec::new(8.0, 401, Sector::FullLine).unwrap();
        let full = discretize_free(1.5, g);
        let even = discretize_free(1.5, g.with_sector(Sector::EvenSector));
        // Full-line even eigenvalues are the 0th, 2nd, 4th ... for the free operator.
        for (je, jf) in [(0, 0), (1, 2), (2, 4)] {
            let a = eigenvalue_at(&even, je, 1e-12);
            let b = eigenvalue_at(&full, jf, 1e-12);
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }
}
