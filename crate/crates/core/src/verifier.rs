//! Simulation of the randomized term-testing verifier for `H_x`.
//!
//! One shot picks a slot `y ∈ [1, M]` with `M = T + K + 2` uniformly. Slot 1
//! is a null test that always accepts, slots `2..=T+1` test propagation
//! terms, the next `K` slots test input (and ancilla) projectors and the last
//! slot tests the output projector. The resulting rejection probability is
//! `⟨ψ|H_x|ψ⟩ / M`.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hamiltonian::{CircuitHamiltonian, ClockedState, TermTag};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// The `t = 0` propagation slot; accepts unconditionally.
    NullProp,
    Prop(usize),
    /// Input check `i ∈ [1, K]`; indices above `n` are ancilla checks.
    InputCheck(usize),
    OutputCheck,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::NullProp => f.write_str("null_prop"),
            Slot::Prop(t) => write!(f, "prop({t})"),
            Slot::InputCheck(i) => write!(f, "input_check({i})"),
            Slot::OutputCheck => f.write_str("output_check"),
        }
    }
}

impl Serialize for Slot {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TestSlot {
    pub y: usize,
    pub slot: Slot,
}

/// Maps `y ∈ [1, T+K+2]` onto its test.
pub fn resolve_slot(y: usize, num_steps: usize, num_checks: usize) -> Result<TestSlot> {
    let m = num_steps + num_checks + 2;
    let slot = match y {
        0 => return Err(Error::InvalidArgument(format!("slot 0 outside [1, {m}]"))),
        1 => Slot::NullProp,
        y if y <= num_steps + 1 => Slot::Prop(y - 1),
        y if y <= num_steps + num_checks + 1 => Slot::InputCheck(y - num_steps - 1),
        y if y == m => Slot::OutputCheck,
        _ => return Err(Error::InvalidArgument(format!("slot {y} outside [1, {m}]"))),
    };
    Ok(TestSlot { y, slot })
}

/// Draws `y` uniformly from `[1, T+K+2]`.
pub fn sample_slot<R: Rng + ?Sized>(rng: &mut R, num_steps: usize, num_checks: usize) -> TestSlot {
    let y = rng.random_range(1..=num_steps + num_checks + 2);
    resolve_slot(y, num_steps, num_checks).expect("sampled slot in range")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Accept,
    Reject,
}

/// Rejects with probability `p` using a single uniform draw.
fn measure<R: Rng + ?Sized>(rng: &mut R, p: f64) -> Outcome {
    if rng.random::<f64>() < p {
        Outcome::Reject
    } else {
        Outcome::Accept
    }
}

/// `R = Σ_t U_t⋯U_1 ⊗ |t⟩⟨t|`, applied block by block.
#[derive(Debug, Clone, Copy)]
pub struct Rotation<'a> {
    h: &'a CircuitHamiltonian,
}

impl<'a> Rotation<'a> {
    pub fn new(h: &'a CircuitHamiltonian) -> Self {
        Rotation { h }
    }

    /// `(U_t⋯U_1)† block`, i.e. `U_1† ⋯ U_t†` applied right to left.
    pub fn adjoint_block(&self, t: usize, block: &[Complex64]) -> Vec<Complex64> {
        let mut out = block.to_vec();
        for s in (1..=t).rev() {
            self.h.circuit().apply_step(s, &mut out, true);
        }
        out
    }

    /// `U_t⋯U_1 block`
    pub fn forward_block(&self, t: usize, block: &[Complex64]) -> Vec<Complex64> {
        let mut out = block.to_vec();
        for s in 1..=t {
            self.h.circuit().apply_step(s, &mut out, false);
        }
        out
    }

    fn map(&self, v: &[Complex64], f: impl Fn(usize, &[Complex64]) -> Vec<Complex64>) -> Result<Vec<Complex64>> {
        if v.len() != self.h.dim() {
            return Err(Error::Dimension {
                expected: self.h.dim(),
                got: v.len(),
            });
        }
        let d = self.h.circuit().data_dim();
        Ok(v.chunks(d).enumerate().flat_map(|(t, block)| f(t, block)).collect())
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.map(v, |t, b| self.forward_block(t, b))
    }

    pub fn apply_adjoint(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.map(v, |t, b| self.adjoint_block(t, b))
    }
}

/// One protocol shot.
#[derive(Debug, Clone, Serialize)]
pub struct VerifierTranscript {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shot: Option<u64>,
    pub y: usize,
    pub slot: Slot,
    /// Probability that the chosen test rejects this proof.
    pub hit_probability: f64,
    pub outcome: Outcome,
    pub note: String,
}

/// Per-slot tally of a Monte-Carlo run.
#[derive(Debug, Clone, Serialize)]
pub struct SlotCount {
    pub y: usize,
    pub slot: Slot,
    pub draws: u64,
    pub rejections: u64,
    pub hit_probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloSummary {
    pub samples: u64,
    pub seed: u64,
    pub rejections: u64,
    pub reject_rate: f64,
    /// Binomial standard error of `reject_rate`.
    pub stderr: f64,
    /// `⟨ψ|H_x|ψ⟩ / M`
    pub exact: f64,
    /// SHA-256 over the `(y, outcome)` sequence in shot order.
    pub transcript_digest: String,
    pub histogram: Vec<SlotCount>,
}

/// Verifier bound to one Hamiltonian instance.
#[derive(Debug, Clone, Copy)]
pub struct Verifier<'a> {
    h: &'a CircuitHamiltonian,
}

impl<'a> Verifier<'a> {
    pub fn new(h: &'a CircuitHamiltonian) -> Self {
        Verifier { h }
    }

    /// `M = T + K + 2`
    pub fn num_slots(&self) -> usize {
        self.h.num_steps() + self.h.num_input_checks() + 2
    }

    pub fn resolve(&self, y: usize) -> Result<TestSlot> {
        resolve_slot(y, self.h.num_steps(), self.h.num_input_checks())
    }

    pub fn sample_slot<R: Rng + ?Sized>(&self, rng: &mut R) -> TestSlot {
        sample_slot(rng, self.h.num_steps(), self.h.num_input_checks())
    }

    fn check(&self, psi: &ClockedState) -> Result<()> {
        if psi.data_qubits() != self.h.num_qubits() || psi.num_steps() != self.h.num_steps() {
            return Err(Error::Dimension {
                expected: self.h.dim(),
                got: psi.amplitudes().len(),
            });
        }
        Ok(())
    }

    /// The Hamiltonian term a slot tests, `None` for the null slot.
    pub fn term(&self, slot: Slot) -> Option<TermTag> {
        match slot {
            Slot::NullProp => None,
            Slot::Prop(t) => Some(TermTag::Prop(t)),
            Slot::InputCheck(i) if i <= self.h.num_input_bits() => Some(TermTag::In(i)),
            Slot::InputCheck(i) => Some(TermTag::AncillaIn(i)),
            Slot::OutputCheck => Some(TermTag::Out),
        }
    }

    /// Weight of `ψ` on the standard-basis subspace a projector slot rejects.
    fn projected_weight(&self, psi: &ClockedState, slot: Slot) -> Result<f64> {
        let s = self.h.num_qubits();
        let bit = |q: usize| 1usize << (s - q);
        let weight = |clock: usize, hit: &dyn Fn(usize) -> bool| {
            psi.block(clock)
                .iter()
                .enumerate()
                .filter(|(k, _)| hit(*k))
                .map(|(_, a)| a.norm_sqr())
                .sum()
        };
        match self.term(slot) {
            Some(TermTag::In(i)) => {
                let want = if self.h.input().bit(i) { bit(i) } else { 0 };
                Ok(weight(0, &|k| k & bit(i) != want))
            }
            Some(TermTag::AncillaIn(i)) => Ok(weight(0, &|k| k & bit(i) != 0)),
            Some(TermTag::Out) => Ok(weight(self.h.num_steps(), &|k| k & bit(1) == 0)),
            _ => Err(Error::InvalidArgument(format!("{slot} is not a projector test"))),
        }
    }

    /// Rotates `ψ` by `R†` and returns the weight along `(|t⟩ − |t−1⟩)/√2` on the clock.
    fn propagation_weight(&self, psi: &ClockedState, t: usize) -> Result<f64> {
        if t == 0 || t > self.h.num_steps() {
            return Err(Error::StepOutOfRange {
                t,
                max: self.h.num_steps(),
            });
        }
        let rot = Rotation::new(self.h);
        let prev = rot.adjoint_block(t - 1, psi.block(t - 1));
        let cur = rot.adjoint_block(t, psi.block(t));
        let diff: f64 = cur.iter().zip(&prev).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(0.5 * diff)
    }

    /// Probability that the test at `slot` rejects `ψ`.
    pub fn slot_rejection_probability(&self, slot: Slot, psi: &ClockedState) -> Result<f64> {
        self.check(psi)?;
        match slot {
            Slot::NullProp => Ok(0.0),
            Slot::Prop(t) => self.propagation_weight(psi, t),
            _ => self.projected_weight(psi, slot),
        }
    }

    /// Measures `ψ` against an input or output projector.
    pub fn projective_test<R: Rng + ?Sized>(&self, psi: &ClockedState, slot: Slot, rng: &mut R) -> Result<Outcome> {
        self.check(psi)?;
        let p = self.projected_weight(psi, slot)?;
        Ok(measure(rng, p))
    }

    /// Applies `R†` and measures the clock against `(|t⟩ − |t−1⟩)/√2`.
    pub fn propagation_test<R: Rng + ?Sized>(&self, psi: &ClockedState, t: usize, rng: &mut R) -> Result<Outcome> {
        self.check(psi)?;
        let p = self.propagation_weight(psi, t)?;
        Ok(measure(rng, p))
    }

    /// `Σ_y Pr[y] · Pr[reject | y]`, computed slot by slot.
    pub fn shot_rejection_probability(&self, psi: &ClockedState) -> Result<f64> {
        let probs = self.slot_probabilities(psi)?;
        Ok(probs.iter().sum::<f64>() / self.num_slots() as f64)
    }

    /// `⟨ψ|H_x|ψ⟩ / (T+K+2)`
    pub fn rejection_probability_exact(&self, psi: &ClockedState) -> Result<f64> {
        Ok(self.h.energy(psi)? / self.num_slots() as f64)
    }

    /// Rejection probability of every slot, indexed by `y − 1`.
    pub fn slot_probabilities(&self, psi: &ClockedState) -> Result<Vec<f64>> {
        (1..=self.num_slots())
            .map(|y| self.slot_rejection_probability(self.resolve(y)?.slot, psi))
            .collect()
    }

    /// One shot: draw a slot, run its test.
    pub fn run<R: Rng + ?Sized>(&self, psi: &ClockedState, rng: &mut R) -> Result<VerifierTranscript> {
        self.check(psi)?;
        let TestSlot { y, slot } = self.sample_slot(rng);
        let (hit_probability, outcome, note) = match slot {
            Slot::NullProp => (0.0, Outcome::Accept, "null slot, no measurement".to_string()),
            Slot::Prop(t) => {
                let p = self.propagation_weight(psi, t)?;
                let note = format!("rotated by R†, clock measured along (|{t}⟩ − |{}⟩)/√2", t - 1);
                (p, measure(rng, p), note)
            }
            _ => {
                let p = self.projected_weight(psi, slot)?;
                let term = self.term(slot).expect("projector slot");
                (p, measure(rng, p), format!("standard-basis measurement against {term}"))
            }
        };
        Ok(VerifierTranscript {
            seed: None,
            shot: None,
            y,
            slot,
            hit_probability,
            outcome,
            note,
        })
    }

    /// Shot `shot` of the run seeded with `seed`; reproduces the corresponding
    /// shot of [`monte_carlo`](Self::monte_carlo).
    pub fn run_seeded(&self, psi: &ClockedState, seed: u64, shot: u64) -> Result<VerifierTranscript> {
        let mut t = self.run(psi, &mut shot_rng(seed, shot))?;
        t.seed = Some(seed);
        t.shot = Some(shot);
        Ok(t)
    }

    /// Repeats the protocol `samples` times. Shot `i` draws from its own
    /// ChaCha stream `(seed, i)`, so the result does not depend on how shots
    /// are scheduled.
    pub fn monte_carlo(&self, psi: &ClockedState, samples: u64, seed: u64) -> Result<MonteCarloSummary> {
        if samples == 0 {
            return Err(Error::InvalidArgument("samples must be at least 1".into()));
        }
        let probs = self.slot_probabilities(psi)?;
        let m = self.num_slots();
        let mut draws = vec![0u64; m];
        let mut rejects = vec![0u64; m];
        let mut hasher = Sha256::new();
        for shot in 0..samples {
            let mut rng = shot_rng(seed, shot);
            let TestSlot { y, slot } = self.sample_slot(&mut rng);
            let outcome = match slot {
                Slot::NullProp => Outcome::Accept,
                _ => measure(&mut rng, probs[y - 1]),
            };
            draws[y - 1] += 1;
            if outcome == Outcome::Reject {
                rejects[y - 1] += 1;
            }
            hasher.update((y as u32).to_le_bytes());
            hasher.update([(outcome == Outcome::Reject) as u8]);
        }
        let rejections: u64 = rejects.iter().sum();
        let rate = rejections as f64 / samples as f64;
        let histogram = (1..=m)
            .map(|y| SlotCount {
                y,
                slot: self.resolve(y).expect("slot in range").slot,
                draws: draws[y - 1],
                rejections: rejects[y - 1],
                hit_probability: probs[y - 1],
            })
            .collect();
        Ok(MonteCarloSummary {
            samples,
            seed,
            rejections,
            reject_rate: rate,
            stderr: (rate * (1.0 - rate) / samples as f64).sqrt(),
            exact: self.rejection_probability_exact(psi)?,
            transcript_digest: hasher.finalize().iter().map(|b| format!("{b:02x}")).collect(),
            histogram,
        })
    }
}

/// Random stream for one shot.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// `⟨ψ|H_x|ψ⟩ / (T+K+2)` for a circuit, input and proof.
pub fn rejection_probability_exact(
    circuit: &crate::circuit::Circuit,
    x: &crate::circuit::Bits,
    psi: &ClockedState,
    include_ancilla_checks: bool,
) -> Result<f64> {
    let h = CircuitHamiltonian::build(circuit, x, include_ancilla_checks)?;
    Verifier::new(&h).rejection_probability_exact(psi)
}

/// Largest entrywise deviation of `R† H_prop^t R` from `½ I ⊗ (|t⟩−|t−1⟩)(⟨t|−⟨t−1|)`,
/// with `R` applied column by column through [`Rotation`] and `H_prop^t` through
/// the matrix-free term action.
pub fn rotation_identity_deviation(h: &CircuitHamiltonian, t: usize) -> Result<f64> {
    let dim = h.dim();
    let rot = Rotation::new(h);
    let target = crate::dense::clock_difference_projector(h.circuit(), t);
    let mut dev: f64 = 0.0;
    for col in 0..dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[col] = Complex64::new(1.0, 0.0);
        let c = rot.apply_adjoint(&h.apply_term(TermTag::Prop(t), &rot.apply(&e)?)?)?;
        for (row, z) in c.iter().enumerate() {
            dev = dev.max((z - target[(row, col)]).norm());
        }
    }
    Ok(dev)
}

impl CircuitHamiltonian {
    /// Deviation of `R†R` from the identity.
    pub fn rotation_unitarity_deviation(&self) -> Result<f64> {
        let rot = Rotation::new(self);
        let dim = self.dim();
        let mut dev: f64 = 0.0;
        for col in 0..dim {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[col] = Complex64::new(1.0, 0.0);
            let back = rot.apply_adjoint(&rot.apply(&e)?)?;
            dev = dev.max(linalg::max_abs_diff(&back, &e));
        }
        Ok(dev)
    }
}
