use num_complex::Complex64;
use peakwave::propagator::*;
use peakwave_core::dynamics::{FieldState, Integrator};
use peakwave_core::spectral::{GridSpec, Sector};
use peakwave_core::{Error, WaveParameters};

fn linear(z: f64) -> WaveParameters {
    let p = WaveParameters::new(1.0, 1.0, -3.0, z).unwrap();
    WaveParameters { lambda1: 0.0, lambda2: 0.0, ..p }
}

fn gaussian(z: f64, h: f64) -> FieldState {
    let g = GridSpec::with_spacing(20.0, h, Sector::FullLine).unwrap();
    FieldState::from_fn(g, linear(z), |x| Complex64::new((-x * x).exp(), 0.0)).unwrap()
}

fn cn(psi: &FieldState, t: f64, dt: f64) -> FieldState {
    let mut it = Integrator::new(&psi.grid, &psi.params, dt).unwrap();
    let mut u = psi.clone();
    for _ in 0..(t / dt).round() as usize {
        it.step(&mut u);
    }
    u
}

fn rel_l2(a: &FieldState, b: &FieldState) -> f64 {
    let num: f64 = a.samples.iter().zip(&b.samples).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.samples.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn agrees_with_crank_nicolson() {
    let psi = gaussian(-1.0, 0.01);
    let o = kernel_propagator_apply(&psi, 0.5).unwrap();
    let d1 = rel_l2(&o, &cn(&psi, 0.5, 5e-4));
    let psi2 = gaussian(-1.0, 0.005);
    let o2 = kernel_propagator_apply(&psi2, 0.5).unwrap();
    let d2 = rel_l2(&o2, &cn(&psi2, 0.5, 2.5e-4));
    assert!(d1 < 1e-2, "{d1}");
    assert!(d2 < d1, "{d1} -> {d2}");
}

#[test]
fn preserves_charge() {
    let psi = gaussian(-1.0, 0.01);
    let o = kernel_propagator_with(&psi, 0.5, OracleConfig::default()).unwrap();
    assert!(o.charge_error() < 1e-6, "{}", o.charge_error());
}

#[test]
fn small_time_is_near_identity() {
    let psi = gaussian(-1.0, 0.01);
    let o = kernel_propagator_apply(&psi, 1e-6).unwrap();
    assert!(rel_l2(&o, &psi) < 1e-4);
}

#[test]
fn odd_data_see_no_delta() {
    // odd data vanish at the defect, so only the free flow acts
    let g = GridSpec::with_spacing(20.0, 0.01, Sector::FullLine).unwrap();
    let odd = FieldState::from_fn(g, linear(-1.0), |x| Complex64::new(x * (-x * x).exp(), 0.0)).unwrap();
    let a = kernel_propagator_apply(&odd, 0.3).unwrap();
    let b = kernel_propagator_apply(&FieldState { params: linear(-3.0), ..odd.clone() }, 0.3).unwrap();
    assert!(rel_l2(&a, &b) < 1e-12);
}

#[test]
fn rejects_bad_inputs() {
    let psi = gaussian(-1.0, 0.02);
    assert!(matches!(kernel_propagator_apply(&psi, 0.0), Err(Error::Domain(_))));
    let pos = FieldState { params: linear(1.0), ..psi.clone() };
    assert!(matches!(kernel_propagator_apply(&pos, 0.5), Err(Error::Domain(_))));
    let g = GridSpec::with_spacing(1.0, 0.02, Sector::FullLine).unwrap();
    let wide = FieldState::from_fn(g, linear(-1.0), |_| Complex64::new(1.0, 0.0)).unwrap();
    assert!(matches!(kernel_propagator_apply(&wide, 0.5), Err(Error::Domain(_))));
}
