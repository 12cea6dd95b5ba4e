use std::f64::consts::PI;

use driventop_core::quantum::DonorSpec;
use driventop_core::spinops::{
    coherent_overlap_law, hermitian_eigensystem, spin_coherent_state, Complex64, SphereDirection, SpinOperators,
    SpinQuantumNumber, StateVector,
};
use driventop_core::stateprep::{
    compile, compile_and_verify, fidelity, ground_state, simulate, PulseSequence, MAX_SEQUENCE_DURATION,
};
use driventop_core::Error;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn sb123() -> DonorSpec {
    DonorSpec::canonical(SpinQuantumNumber::new(7).unwrap(), 5.55e6, 0.7, 1e6, 0.0, 0.0)
}

fn coherent_target(spec: &DonorSpec) -> StateVector {
    spin_coherent_state(spec.spin, &SphereDirection::new(4.0 * PI / 5.0, PI / 2.0).unwrap())
}

fn haar(dim: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let v = DVector::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    StateVector::normalized(v).unwrap()
}

#[test]
fn ground_state_target_needs_no_pulses() {
    let spec = sb123();
    let g = ground_state(&spec).unwrap();
    let (seq, report, f) = compile_and_verify(&g, &spec, 1e-3).unwrap();
    assert!(seq.pulses.is_empty());
    assert_eq!(seq.total_duration(), 0.0);
    assert!((report.predicted_fidelity - 1.0).abs() < 1e-12);
    assert!((f - 1.0).abs() < 1e-12);
}

#[test]
fn empty_sequence_leaves_state_unchanged() {
    let spec = sb123();
    let psi = coherent_target(&spec);
    let seq = PulseSequence { pulses: vec![], spec: spec.clone(), target: psi.clone() };
    let out = simulate(&seq, &spec, &psi).unwrap();
    assert!((fidelity(&out, &psi).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn single_transfer_is_a_pi_pulse_at_the_matrix_element_rabi_rate() {
    let spec = sb123();
    let b1 = 1e-3;
    let eig = hermitian_eigensystem(&driventop_core::spectro::static_hamiltonian(&spec).unwrap()).unwrap();
    let v = SpinOperators::new(spec.spin).along(spec.b1_dir.unit_vector());
    let e0 = eig.column(0);
    let e1 = eig.column(1);
    let element = e1.dotc(&(&v * &e0)).norm();
    let target = StateVector::normalized(e1.clone()).unwrap();

    let (seq, _) = compile(&target, &spec, b1).unwrap();
    assert_eq!(seq.pulses.len(), 1);
    let p = seq.pulses[0];
    assert_eq!(p.level_pair, (1, 0));
    assert!((p.frequency - (eig.values[1] - eig.values[0])).abs() < 1e-6);
    // arctan(∞) = π/2, rabi = γn·b1·|⟨e1|V|e0⟩| in Hz, t_π = 1/(2·rabi)
    let rabi = spec.gamma_n * b1 * element;
    assert!((p.duration - 1.0 / (2.0 * rabi)).abs() < 1e-9 * p.duration);

    let out = simulate(&seq, &spec, &ground_state(&spec).unwrap()).unwrap();
    let moved = e1.dotc(out.as_vector()).norm_sqr();
    assert!(1.0 - moved < 1e-2, "leakage {}", 1.0 - moved);
}

#[test]
fn coherent_state_preparation_matches_reported_fidelity() {
    let spec = sb123();
    let target = coherent_target(&spec);
    let (seq, report, f) = compile_and_verify(&target, &spec, 1e-3).unwrap();
    assert!((f - 0.9989).abs() <= 3e-3, "fidelity {f}");
    assert!(f >= report.predicted_fidelity - 1e-3);
    assert!((f - report.predicted_fidelity).abs() <= 1e-3);
    assert!(seq.pulses.len() <= spec.dim() - 1);
    assert!(seq.total_duration() < MAX_SEQUENCE_DURATION);
    assert_eq!(report.intermediate_fidelity.len(), seq.pulses.len());
    assert_eq!(report.populations.len(), seq.pulses.len() + 1);
}

#[test]
fn final_ideal_populations_are_the_target_populations() {
    let spec = sb123();
    let target = coherent_target(&spec);
    let (_, report) = compile(&target, &spec, 1e-3).unwrap();
    let eig = hermitian_eigensystem(&driventop_core::spectro::static_hamiltonian(&spec).unwrap()).unwrap();
    let last = report.populations.last().unwrap();
    for k in 0..spec.dim() {
        let want = eig.column(k).dotc(target.as_vector()).norm_sqr();
        assert!((last[k] - want).abs() < 1e-10);
    }
    for step in &report.populations {
        assert!((step.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn weaker_drive_gives_higher_fidelity() {
    let spec = sb123();
    let target = coherent_target(&spec);
    let fs: Vec<f64> = [2e-3, 1e-3, 0.5e-3]
        .iter()
        .map(|&b1| compile_and_verify(&target, &spec, b1).unwrap().2)
        .collect();
    assert!(fs[0] < fs[1] && fs[1] < fs[2], "{fs:?}");
}

#[test]
fn random_targets_are_prepared_accurately() {
    let spec = sb123();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let target = haar(spec.dim(), &mut rng);
        let (seq, report, f) = compile_and_verify(&target, &spec, 1e-3).unwrap();
        assert!(f >= 0.99, "fidelity {f}");
        assert!(f >= report.predicted_fidelity - 1e-2);
        assert!(seq.pulses.len() <= spec.dim() - 1);
        assert!(seq.total_duration() < MAX_SEQUENCE_DURATION);
    }
}

#[test]
fn degenerate_transitions_are_rejected() {
    // without a quadrupole every Δm = 1 transition sits at γn·B0
    let spec = DonorSpec::canonical(SpinQuantumNumber::new(7).unwrap(), 5.55e6, 0.7, 0.0, 0.0, 0.0);
    let target = coherent_target(&spec);
    assert!(matches!(compile(&target, &spec, 1e-3), Err(Error::AddressabilityViolated { .. })));
}

#[test]
fn bad_inputs_are_rejected() {
    let spec = sb123();
    let small = StateVector::basis(4, 0);
    assert!(matches!(compile(&small, &spec, 1e-3), Err(Error::DimensionMismatch { .. })));
    assert!(compile(&coherent_target(&spec), &spec, 0.0).is_err());
    let seq = PulseSequence { pulses: vec![], spec: spec.clone(), target: coherent_target(&spec) };
    assert!(matches!(simulate(&seq, &spec, &small), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn sequence_json_round_trip() {
    let spec = sb123();
    let (seq, report) = compile(&coherent_target(&spec), &spec, 1e-3).unwrap();
    let text = serde_json::to_string(&seq).unwrap();
    let back: PulseSequence = serde_json::from_str(&text).unwrap();
    assert_eq!(back, seq);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let first = &value["pulses"][0];
    for key in ["frequency", "duration", "phase", "amplitude"] {
        assert!(first[key].is_number(), "{key}");
    }
    let r: serde_json::Value = serde_json::to_value(&report).unwrap();
    assert!(r["predicted_fidelity"].is_number());
}

#[test]
fn fidelity_basics() {
    let spin = SpinQuantumNumber::new(7).unwrap();
    let a = SphereDirection::new(0.4, 1.1).unwrap();
    let b = SphereDirection::new(2.0, -0.3).unwrap();
    let sa = spin_coherent_state(spin, &a);
    let sb = spin_coherent_state(spin, &b);
    assert!((fidelity(&sa, &sa).unwrap() - 1.0).abs() < 1e-12);
    assert!(fidelity(&StateVector::basis(8, 0), &StateVector::basis(8, 3)).unwrap().abs() < 1e-15);
    // the law gives |⟨a|b⟩|²
    let law = coherent_overlap_law(spin, &a, &b).sqrt();
    assert!((fidelity(&sa, &sb).unwrap() - law).abs() < 1e-12);
    assert!(fidelity(&sa, &StateVector::basis(4, 0)).is_err());
}
