mod common;

use common::*;
use geomq::dynamics::{gkls_apply, integrate, propagate, FlowConfig, Integrator, LindbladGenerator};
use geomq::{CMatrix, DensityOperator, Error, GeneralOperator, HermitianOperator, Operator};

fn generator(h: &CMatrix, jumps: &[CMatrix]) -> LindbladGenerator {
    LindbladGenerator::new(
        HermitianOperator::new(h.clone()).unwrap(),
        jumps.iter().map(|v| GeneralOperator::new(v.clone()).unwrap()).collect(),
    )
    .unwrap()
}

#[test]
fn generator_matches_superoperator_matrix() {
    let mut r = rng(21);
    for n in 1..=4 {
        let h = random_hermitian(n, &mut r);
        let jumps: Vec<CMatrix> = (0..2).map(|_| gaussian_matrix(n, &mut r)).collect();
        let rho = random_density(n, n, &mut r);
        let lhs = gkls_apply(&generator(&h, &jumps), &DensityOperator::new(rho.clone()).unwrap()).unwrap();
        let rhs = unvec(&(superoperator(&h, &jumps) * vec_of(&rho)), n);
        assert!((lhs.matrix() - rhs).norm() < 1e-12);
    }
}

#[test]
fn rk4_tracks_the_superoperator_exponential() {
    let mut r = rng(22);
    for n in 2..=3 {
        let h = random_hermitian(n, &mut r);
        let jumps: Vec<CMatrix> = (0..2).map(|_| gaussian_matrix(n, &mut r) * cz(0.4, 0.0)).collect();
        let rho0 = random_density(n, 1, &mut r);
        let traj = integrate(
            &generator(&h, &jumps),
            &DensityOperator::new(rho0.clone()).unwrap(),
            &FlowConfig::new(1e-3, 2.0).with_record_every(200),
        )
        .unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s.matrix() - evolve_exact(&h, &jumps, &rho0, *t)).norm() < 1e-8, "n={n} t={t}");
        }
    }
}

#[test]
fn exact_unitary_matches_expm() {
    let mut r = rng(23);
    let h = random_hermitian(3, &mut r);
    let rho0 = random_density(3, 2, &mut r);
    let cfg = FlowConfig::new(0.05, 1.5).with_integrator(Integrator::ExactUnitary);
    let traj = integrate(&generator(&h, &[]), &DensityOperator::new(rho0.clone()).unwrap(), &cfg).unwrap();
    assert_eq!(traj.len(), 31);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let u = (&h * cz(0.0, -*t)).exp();
        assert!((s.matrix() - &u * &rho0 * u.adjoint()).norm() < 1e-12);
    }
}

#[test]
fn exact_unitary_rejects_open_systems() {
    let gen = generator(&pauli(3), &[pauli(1)]);
    let rho = DensityOperator::new(bloch_state([0.0, 0.0, 1.0])).unwrap();
    let cfg = FlowConfig::new(0.1, 1.0).with_integrator(Integrator::ExactUnitary);
    assert!(integrate(&gen, &rho, &cfg).is_err());
}

#[test]
fn amplitude_damping_closed_form() {
    let gamma: f64 = 0.7;
    let lowering = CMatrix::from_row_slice(2, 2, &[cz(0.0, 0.0), cz(gamma.sqrt(), 0.0), cz(0.0, 0.0), cz(0.0, 0.0)]);
    let gen = generator(&CMatrix::zeros(2, 2), &[lowering]);
    let x0 = [0.5, 0.3, -0.6];
    let traj = integrate(
        &gen,
        &DensityOperator::new(bloch_state(x0)).unwrap(),
        &FlowConfig::new(1e-3, 3.0).with_record_every(100),
    )
    .unwrap();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let x = bloch_of(s.matrix());
        let (half, full) = ((-gamma * t / 2.0).exp(), (-gamma * t).exp());
        let expected = [x0[0] * half, x0[1] * half, 1.0 + (x0[2] - 1.0) * full];
        for i in 0..3 {
            assert!((x[i] - expected[i]).abs() < 1e-9, "t={t} i={i}");
        }
    }
}

#[test]
fn trace_and_positivity_preserved() {
    let mut r = rng(24);
    let h = random_hermitian(4, &mut r);
    let jumps: Vec<CMatrix> = (0..3).map(|_| gaussian_matrix(4, &mut r)).collect();
    let rho0 = random_density(4, 1, &mut r);
    let traj =
        integrate(&generator(&h, &jumps), &DensityOperator::new(rho0).unwrap(), &FlowConfig::new(1e-3, 1.0)).unwrap();
    for s in &traj.states {
        assert!((s.matrix().trace().re - 1.0).abs() < 1e-10);
        assert!(s.min_eigenvalue().unwrap() > -1e-9);
    }
}

#[test]
fn raw_propagation_outside_the_ball_follows_the_linear_flow() {
    let x0 = [1.0, 0.0, 0.3];
    let gen = generator(&CMatrix::zeros(2, 2), &[pauli(3) * cz(0.5f64.sqrt(), 0.0)]);
    let (times, states) =
        propagate(&gen, &bloch_state(x0), &FlowConfig::new(1e-3, 1.0).with_record_every(1000)).unwrap();
    assert_eq!(times, vec![0.0, 1.0]);
    let x = bloch_of(&states[1]);
    assert!((x[0] - (-1.0f64).exp()).abs() < 1e-10);
    assert!((x[2] - 0.3).abs() < 1e-14);
    assert!(matches!(DensityOperator::new(bloch_state(x0)), Err(Error::NotPositive { .. })));
}
