use clockham::linalg;
use clockham::spectral::{min_eigenvalue_dense, min_eigenvalue_iterative};
use clockham::verifier::rejection_probability_exact;
use clockham::{
    apply_gate, fixtures, Bits, Circuit, CircuitHamiltonian, ClockedState, Complex64, DataState, Gate, TermTag,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_amplitudes(seed: u64, len: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let n = linalg::norm(&v);
    linalg::scale(1.0 / n, &mut v);
    v
}

fn random_proof(seed: u64, h: &CircuitHamiltonian) -> ClockedState {
    ClockedState::new(h.num_qubits(), h.num_steps(), random_amplitudes(seed, h.dim())).unwrap()
}

/// A single-qubit unitary from Euler angles.
fn euler(theta: f64, phi: f64, lambda: f64) -> Vec<Complex64> {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![
        Complex64::new(c, 0.0),
        -Complex64::from_polar(s, lambda),
        Complex64::from_polar(s, phi),
        Complex64::from_polar(c, phi + lambda),
    ]
}

fn arb_gate(qubits: usize, classical: bool) -> BoxedStrategy<Gate> {
    let q = 1..=qubits;
    let mut options: Vec<BoxedStrategy<Gate>> = vec![q.clone().prop_map(Gate::x).boxed()];
    if !classical {
        options.push(q.clone().prop_map(Gate::h).boxed());
        options.push(
            (q.clone(), 0.0..6.3, 0.0..6.3, 0.0..6.3)
                .prop_map(|(t, a, b, c)| Gate::from_matrix(euler(a, b, c), vec![t]).unwrap())
                .boxed(),
        );
    }
    if qubits >= 2 {
        options.push(
            Just((1..=qubits).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|p| Gate::cnot(p[0], p[1]))
                .boxed(),
        );
    }
    if qubits >= 3 {
        options.push(
            Just((1..=qubits).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|p| Gate::toffoli(p[0], p[1], p[2]))
                .boxed(),
        );
    }
    proptest::strategy::Union::new(options).boxed()
}

/// Random circuit with input bits.
fn arb_instance(classical: bool) -> impl Strategy<Value = (Circuit, Bits)> {
    (1usize..=3)
        .prop_flat_map(move |s| (Just(s), 1..=s, prop::collection::vec(arb_gate(s, classical), 1..=6)))
        .prop_flat_map(|(s, n, gates)| {
            let c = Circuit::new(s, n, gates).unwrap();
            (Just(c), prop::collection::vec(any::<bool>(), n))
        })
        .prop_map(|(c, bits)| (c, Bits::new(bits)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_preserve_norm((c, _) in arb_instance(false), seed in any::<u64>()) {
        let s = c.num_qubits();
        let mut state = DataState::from_amplitudes(s, random_amplitudes(seed, 1 << s)).unwrap();
        for g in c.gates() {
            state = apply_gate(&state, g, s).unwrap();
            prop_assert!((linalg::norm(state.amplitudes()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prefix_state_is_a_fold((c, x) in arb_instance(false)) {
        let mut state = c.start_state(&x).unwrap();
        for t in 0..=c.num_steps() {
            let prefix = c.prefix_state(&x, t).unwrap();
            prop_assert!(linalg::max_abs_diff(prefix.amplitudes(), state.amplitudes()) < 1e-12);
            if t < c.num_steps() {
                state = apply_gate(&state, &c.gates()[t], c.num_qubits()).unwrap();
            }
        }
    }

    #[test]
    fn hamiltonian_is_hermitian((c, x) in arb_instance(false), checks in any::<bool>(), a in any::<u64>(), b in any::<u64>()) {
        let h = CircuitHamiltonian::build(&c, &x, checks).unwrap();
        let phi = random_amplitudes(a, h.dim());
        let psi = random_amplitudes(b, h.dim());
        let lhs = linalg::inner(&phi, &h.apply(&psi).unwrap());
        let rhs = linalg::inner(&psi, &h.apply(&phi).unwrap()).conj();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn terms_are_projectors((c, x) in arb_instance(false)) {
        let h = CircuitHamiltonian::build(&c, &x, true).unwrap();
        for &term in h.terms() {
            let m = h.materialize_term(term).unwrap();
            let dev = (&m * &m - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(dev < 1e-12, "{term:?} deviates from a projector by {dev:e}");
            let herm = (m.adjoint() - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(herm < 1e-14);
        }
    }

    #[test]
    fn energy_ignores_global_phase((c, x) in arb_instance(false), seed in any::<u64>(), angle in 0.0..6.3f64) {
        let h = CircuitHamiltonian::build(&c, &x, true).unwrap();
        let psi = random_proof(seed, &h);
        let phase = Complex64::from_polar(1.0, angle);
        let rotated: Vec<Complex64> = psi.amplitudes().iter().map(|z| z * phase).collect();
        let rotated = ClockedState::new(h.num_qubits(), h.num_steps(), rotated).unwrap();
        prop_assert!((h.energy(&psi).unwrap() - h.energy(&rotated).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_quotient_bounds((c, x) in arb_instance(false), seed in any::<u64>()) {
        let h = CircuitHamiltonian::build(&c, &x, true).unwrap();
        let ground = min_eigenvalue_dense(&h).unwrap();
        prop_assert!((h.energy(&ground.eigvec).unwrap() - ground.lambda_min).abs() < 1e-10);
        prop_assert!(h.energy(&random_proof(seed, &h)).unwrap() >= ground.lambda_min - 1e-12);
        let it = min_eigenvalue_iterative(&h, 1e-9, 20_000, seed).unwrap();
        prop_assert!((it.lambda_min - ground.lambda_min).abs() < 1e-7);
    }

    #[test]
    fn classical_circuits_land_outside_the_gap((c, x) in arb_instance(true)) {
        let accept = c.acceptance_probability(&x).unwrap();
        prop_assert!(accept.min(1.0 - accept) < 1e-12);
        let h = CircuitHamiltonian::build(&c, &x, true).unwrap();
        let lambda = min_eigenvalue_dense(&h).unwrap().lambda_min;
        if accept > 0.5 {
            let eta = h.history_state();
            for &term in h.terms() {
                let v = h.apply_term(term, eta.amplitudes()).unwrap();
                prop_assert!(linalg::norm(&v) < 1e-12, "{term:?} does not annihilate the history state");
            }
            prop_assert!(lambda <= 1e-9);
        } else {
            prop_assert!(lambda >= h.soundness_bound() - 1e-9);
        }
    }
}

fn rejecting_fixtures() -> Vec<(&'static str, Circuit, Bits)> {
    let zero: Bits = "0".parse().unwrap();
    let one: Bits = "1".parse().unwrap();
    vec![
        ("CIRC-X", fixtures::circ_x(), one.clone()),
        ("CIRC-ID", fixtures::circ_id(), zero.clone()),
        ("CIRC-HH", fixtures::circ_hh(), zero.clone()),
        ("CIRC-X(S=2)", fixtures::circ_x_two_qubits(), one),
        ("CIRC-REV3", fixtures::circ_rev3().0, "000".parse().unwrap()),
    ]
}

#[test]
fn soundness_floor_for_random_and_ground_proofs() {
    for (name, c, x) in rejecting_fixtures() {
        assert_eq!(c.acceptance_probability(&x).unwrap(), 0.0, "{name}");
        let h = CircuitHamiltonian::build(&c, &x, true).unwrap();
        let slots = (h.num_steps() + h.num_input_checks() + 2) as f64;
        let floor = h.soundness_bound() / slots - 1e-12;
        let ground = min_eigenvalue_dense(&h).unwrap().eigvec;
        let proofs = (0..200).map(|k| random_proof(k, &h)).chain(std::iter::once(ground));
        for psi in proofs {
            let p = rejection_probability_exact(&c, &x, &psi, true).unwrap();
            assert!(p >= floor, "{name}: rejection {p:e} below floor {floor:e}");
        }
    }
}

#[test]
fn slot_law_matches_exact_probability() {
    for (name, c, x) in rejecting_fixtures() {
        for checks in [true, false] {
            let h = CircuitHamiltonian::build(&c, &x, checks).unwrap();
            let v = clockham::Verifier::new(&h);
            for k in 0..100 {
                let psi = random_proof(1000 + k, &h);
                let shot = v.shot_rejection_probability(&psi).unwrap();
                let exact = v.rejection_probability_exact(&psi).unwrap();
                assert!((shot - exact).abs() <= 1e-10, "{name}: {shot} vs {exact}");
            }
        }
    }
}

#[test]
fn term_listing_matches_definition() {
    let h = CircuitHamiltonian::build(&fixtures::circ_x_two_qubits(), &"0".parse().unwrap(), true).unwrap();
    assert_eq!(
        h.terms(),
        [TermTag::Prop(1), TermTag::In(1), TermTag::AncillaIn(2), TermTag::Out]
    );
    assert_eq!(h.num_input_checks(), 2);
}
