//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::Instant;

use clockham::dense;
use clockham::linalg;
use clockham::revcomp::{compile_truth_table, verify_reversibility, TruthTable};
use clockham::spectral::{min_eigenvalue_iterative, min_eigenvalue_of};
use clockham::verifier::{rotation_identity_deviation, Verifier};
use clockham::{fixtures, Bits, Circuit, CircuitHamiltonian, ClockedState, Complex64, TermTag};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One instance of the arity ≤ 3 family or a named fixture.
struct Instance {
    label: String,
    h: CircuitHamiltonian,
    accept: f64,
    lambda_dense: f64,
    /// Largest entrywise gap between `apply` on basis vectors and the dense matrix.
    apply_deviation: f64,
}

fn named_fixtures() -> Vec<(&'static str, Circuit)> {
    vec![
        ("CIRC-X", fixtures::circ_x()),
        ("CIRC-ID", fixtures::circ_id()),
        ("CIRC-H", fixtures::circ_h()),
        ("CIRC-HH", fixtures::circ_hh()),
        ("CIRC-X(S=2)", fixtures::circ_x_two_qubits()),
        ("CIRC-REV3", fixtures::circ_rev3().0),
    ]
}

fn all_inputs(c: &Circuit) -> Vec<Bits> {
    let n = c.num_input_bits();
    (0..1 << n).map(|k| Bits::from_index(k, n)).collect()
}

fn all_tables() -> Vec<TruthTable> {
    (1..=3)
        .flat_map(|m| (0..1u64 << (1 << m)).map(move |code| TruthTable::from_code(m, code).unwrap()))
        .collect()
}

fn random_state(rng: &mut ChaCha8Rng, h: &CircuitHamiltonian) -> ClockedState {
    let v = (0..h.dim())
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    ClockedState::normalized(h.num_qubits(), h.num_steps(), v).unwrap()
}

fn max_dev(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn instance(label: String, c: &Circuit, x: &Bits) -> Instance {
    let accept = c.acceptance_probability(x).unwrap();
    let h = CircuitHamiltonian::build(c, x, true).unwrap();
    let dense = h.materialize_dense().unwrap();
    let dim = h.dim();
    let mut apply_deviation: f64 = 0.0;
    let mut e = vec![Complex64::new(0.0, 0.0); dim];
    for col in 0..dim {
        e[col] = Complex64::new(1.0, 0.0);
        let hv = h.apply(&e).unwrap();
        let column: Vec<Complex64> = dense.column(col).iter().copied().collect();
        apply_deviation = apply_deviation.max(linalg::max_abs_diff(&hv, &column));
        e[col] = Complex64::new(0.0, 0.0);
    }
    let lambda_dense = min_eigenvalue_of(&dense);
    Instance {
        label,
        h,
        accept,
        lambda_dense,
        apply_deviation,
    }
}

/// The promise-gap family: every compiled table of arity ≤ 3 on every input,
/// plus the fixtures on inputs where they accept or reject with certainty.
fn build_family() -> Vec<Instance> {
    let mut out = Vec::new();
    for (name, c) in named_fixtures() {
        for x in all_inputs(&c) {
            let accept = c.acceptance_probability(&x).unwrap();
            if accept > 1e-12 && accept < 1.0 - 1e-12 {
                continue;
            }
            out.push(instance(format!("{name} x={x}"), &c, &x));
        }
    }
    for f in all_tables() {
        let rc = compile_truth_table(&f).unwrap();
        for x in all_inputs(&rc.circuit) {
            out.push(instance(format!("table {:?} x={x}", f.values()), &rc.circuit, &x));
        }
    }
    out
}

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn completeness(family: &[Instance]) -> Outcome {
    let mut checked = 0;
    let mut worst_energy: f64 = 0.0;
    let mut worst_lambda: f64 = 0.0;
    for inst in family.iter().filter(|i| i.accept > 0.5) {
        let e = inst.h.energy(&inst.h.history_state()).map_err(|e| e.to_string())?;
        if !(e <= 1e-12) || !(inst.lambda_dense <= 1e-9) {
            return Err(format!(
                "{}: history energy {e:e}, dense λ_min {:e}",
                inst.label, inst.lambda_dense
            ));
        }
        worst_energy = worst_energy.max(e);
        worst_lambda = worst_lambda.max(inst.lambda_dense);
        checked += 1;
    }
    Ok(format!(
        "{checked} accepting instances, max ⟨η|H|η⟩ = {worst_energy:.2e}, max λ_min = {worst_lambda:.2e}"
    ))
}

fn soundness(family: &[Instance]) -> Outcome {
    let mut checked = 0;
    let mut tightest = f64::INFINITY;
    for inst in family.iter().filter(|i| i.accept < 0.5) {
        let bound = inst.h.soundness_bound();
        if !(inst.lambda_dense >= bound - 1e-9) {
            return Err(format!(
                "{}: λ_min {:e} < bound {:e}",
                inst.label, inst.lambda_dense, bound
            ));
        }
        tightest = tightest.min(inst.lambda_dense / bound);
        checked += 1;
    }
    Ok(format!(
        "{checked} rejecting instances, min λ_min / bound = {tightest:.3}"
    ))
}

fn verifier_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for (name, c) in named_fixtures() {
        for x in all_inputs(&c) {
            for checks in [true, false] {
                let h = CircuitHamiltonian::build(&c, &x, checks).unwrap();
                let v = Verifier::new(&h);
                let m = v.num_slots();
                let expected_m = c.num_steps() + if checks { c.num_qubits() } else { c.num_input_bits() } + 2;
                if m != expected_m {
                    return Err(format!("{name}: {m} slots, expected {expected_m}"));
                }
                for _ in 0..100 {
                    let psi = random_state(&mut rng, &h);
                    let shot = v.shot_rejection_probability(&psi).map_err(|e| e.to_string())?;
                    let exact = h.energy(&psi).map_err(|e| e.to_string())? / m as f64;
                    let d = (shot - exact).abs();
                    if !(d <= 1e-10) {
                        return Err(format!("{name} x={x}: slot law {shot} vs energy/M {exact}"));
                    }
                    worst = worst.max(d);
                    checked += 1;
                }
            }
        }
    }
    Ok(format!(
        "{checked} random proofs (both modes), max |Σ slots − E/M| = {worst:.2e}"
    ))
}

fn monte_carlo() -> Outcome {
    let h = CircuitHamiltonian::build(&fixtures::circ_id(), &"0".parse().unwrap(), true).unwrap();
    let v = Verifier::new(&h);
    let psi = ClockedState::basis(1, 1, 0, 0);
    let n = 100_000u64;
    let a = v.monte_carlo(&psi, n, 7).map_err(|e| e.to_string())?;
    let b = v.monte_carlo(&psi, n, 7).map_err(|e| e.to_string())?;
    let p = 0.125;
    let window = 3.0 * (p * (1.0 - p) / n as f64).sqrt();
    if (a.exact - p).abs() > 1e-12 {
        return Err(format!("exact probability {} ≠ 0.125", a.exact));
    }
    if !((a.reject_rate - p).abs() <= window) {
        return Err(format!("rate {} outside 0.125 ± {window:.4}", a.reject_rate));
    }
    if a.transcript_digest != b.transcript_digest || a.rejections != b.rejections {
        return Err("repeated run with the same seed differs".into());
    }
    Ok(format!(
        "rate {:.5} within 0.125 ± {window:.4}; digest reproducible",
        a.reject_rate
    ))
}

fn rotation_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (name, c) in named_fixtures() {
        let x = all_inputs(&c).remove(0);
        let h = CircuitHamiltonian::build(&c, &x, true).unwrap();
        let r = dense::rotation_matrix(&c);
        let unitary = max_dev(&(r.adjoint() * &r), &DMatrix::identity(h.dim(), h.dim()));
        if !(unitary <= 1e-12) {
            return Err(format!("{name}: R not unitary ({unitary:e})"));
        }
        for t in 1..=c.num_steps() {
            let prop = dense::term_matrix(&h, TermTag::Prop(t));
            let conj = r.adjoint() * prop * &r;
            let d = max_dev(&conj, &dense::clock_difference_projector(&c, t));
            let d_free = rotation_identity_deviation(&h, t).map_err(|e| e.to_string())?;
            if !(d <= 1e-12 && d_free <= 1e-12) {
                return Err(format!("{name} t={t}: dense {d:e}, matrix-free {d_free:e}"));
            }
            worst = worst.max(d).max(d_free);
            count += 1;
        }
    }
    Ok(format!(
        "{count} (fixture, t) pairs, max entrywise deviation {worst:.2e}"
    ))
}

fn perfect_completeness() -> Outcome {
    let mut cases: Vec<(String, Circuit, Bits)> = Vec::new();
    for (name, c) in named_fixtures() {
        for x in all_inputs(&c) {
            if (c.acceptance_probability(&x).unwrap() - 1.0).abs() < 1e-12 {
                cases.push((name.to_string(), c.clone(), x));
            }
        }
    }
    let mut extra: Vec<TruthTable> = all_tables().into_iter().filter(|f| f.arity() <= 2).collect();
    extra.push(TruthTable::from_fn(3, |x| x.as_slice().iter().filter(|&&b| b).count() >= 2).unwrap());
    extra.push(TruthTable::from_fn(3, |x| x.as_slice().iter().filter(|&&b| b).count() % 2 == 1).unwrap());
    for f in extra {
        let rc = compile_truth_table(&f).unwrap();
        for x in all_inputs(&rc.circuit) {
            if f.eval(&x).unwrap() {
                cases.push((format!("table {:?}", f.values()), rc.circuit.clone(), x));
            }
        }
    }
    let shots = 1_000_000u64;
    for (i, (label, c, x)) in cases.iter().enumerate() {
        let h = CircuitHamiltonian::build(c, x, true).unwrap();
        let mc = Verifier::new(&h)
            .monte_carlo(&h.history_state(), shots, 1000 + i as u64)
            .map_err(|e| e.to_string())?;
        if mc.rejections != 0 {
            return Err(format!("{label} x={x}: {} rejections in {shots} shots", mc.rejections));
        }
    }
    Ok(format!(
        "{} accepting instances × {shots} shots, zero rejections",
        cases.len()
    ))
}

fn oracle_equivalence(family: &[Instance]) -> Outcome {
    let mut worst_apply: f64 = 0.0;
    let mut basis_checked = 0;
    for inst in family {
        if !(inst.apply_deviation <= 1e-12) {
            return Err(format!(
                "{}: apply vs dense deviation {:e}",
                inst.label, inst.apply_deviation
            ));
        }
        worst_apply = worst_apply.max(inst.apply_deviation);
        basis_checked += inst.h.dim();
    }
    let mut worst_eig: f64 = 0.0;
    for (i, inst) in family.iter().enumerate() {
        let it =
            min_eigenvalue_iterative(&inst.h, 1e-9, 50_000, i as u64).map_err(|e| format!("{}: {e}", inst.label))?;
        let d = (it.lambda_min - inst.lambda_dense).abs();
        if !(d <= 1e-7) {
            return Err(format!(
                "{}: iterative {} vs dense {}",
                inst.label, it.lambda_min, inst.lambda_dense
            ));
        }
        worst_eig = worst_eig.max(d);
    }
    Ok(format!(
        "{basis_checked} basis columns (max {worst_apply:.2e}); {} iterative/dense pairs (max {worst_eig:.2e})",
        family.len()
    ))
}

fn reversibility() -> Outcome {
    let mut circuits = 0;
    let mut inputs = 0;
    for f in all_tables() {
        let rc = compile_truth_table(&f).unwrap();
        let check = verify_reversibility(&rc.circuit);
        if !check.is_permutation {
            return Err(format!(
                "table {:?}: not a permutation, witness {:?}",
                f.values(),
                check.witness
            ));
        }
        for x in all_inputs(&rc.circuit) {
            let p = rc.circuit.acceptance_probability(&x).unwrap();
            let want = if f.eval(&x).unwrap() { 1.0 } else { 0.0 };
            if !((p - want).abs() <= 1e-12) {
                return Err(format!("table {:?} x={x}: acceptance {p}", f.values()));
            }
            inputs += 1;
        }
        circuits += 1;
    }
    Ok(format!(
        "{circuits} compiled circuits are permutations; {inputs} inputs accept with exactly f(x)"
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let family = build_family();
    eprintln!(
        "family: {} instances, dense spectra in {:.1?}",
        family.len(),
        start.elapsed()
    );

    let criteria: Vec<Criterion> = vec![
        ("1 completeness", Box::new(|| completeness(&family))),
        ("2 soundness bound", Box::new(|| soundness(&family))),
        ("3 verifier law", Box::new(verifier_law)),
        ("4 monte carlo", Box::new(monte_carlo)),
        ("5 rotation identity", Box::new(rotation_identity)),
        ("6 perfect completeness", Box::new(perfect_completeness)),
        ("7 oracle equivalence", Box::new(|| oracle_equivalence(&family))),
        ("8 reversibility", Box::new(reversibility)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        match run() {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{:.1?}]", t.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{:.1?}]", t.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
