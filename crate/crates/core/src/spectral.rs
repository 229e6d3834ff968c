//! Ground-energy computation and promise-gap certification.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{Bits, Circuit};
use crate::error::{Error, Result};
use crate::hamiltonian::{CircuitHamiltonian, ClockedState};
use crate::linalg;

/// Eigenvalues at or below this count as exactly zero.
pub const ZERO_TOL: f64 = 1e-9;
/// Largest eigenpair residual a report may carry.
pub const MAX_REPORT_RESIDUAL: f64 = 1e-8;
/// Krylov basis size before an explicit restart.
const KRYLOV_DIM: usize = 256;

/// Smallest eigenvalue with one unit eigenvector from its eigenspace.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub lambda_min: f64,
    pub eigvec: ClockedState,
    /// Matrix-vector products used; 0 for dense diagonalization.
    pub iterations: usize,
    /// `‖Hv − λv‖`
    pub residual: f64,
}

fn residual(h: &CircuitHamiltonian, lambda: f64, v: &[Complex64]) -> Result<f64> {
    let mut hv = h.apply(v)?;
    linalg::axpy(Complex64::new(-lambda, 0.0), v, &mut hv);
    Ok(linalg::norm(&hv))
}

/// Full Hermitian diagonalization of the dense matrix.
///
/// Uses a real symmetric solver when every entry is real, which is the case
/// for circuits built from `I`, `X`, `H`, `CNOT` and `TOFFOLI`.
pub fn min_eigenvalue_dense(h: &CircuitHamiltonian) -> Result<GroundState> {
    let m = h.materialize_dense()?;
    let (lambda, vec): (f64, Vec<Complex64>) = if m.iter().all(|z| z.im == 0.0) {
        let real = m.map(|z| z.re);
        let eig = SymmetricEigen::try_new(real, f64::EPSILON, 0)
            .ok_or_else(|| Error::Diagonalization("symmetric QR did not converge".into()))?;
        let k = argmin(eig.eigenvalues.as_slice());
        (
            eig.eigenvalues[k],
            eig.eigenvectors
                .column(k)
                .iter()
                .map(|&r| Complex64::new(r, 0.0))
                .collect(),
        )
    } else {
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
            .ok_or_else(|| Error::Diagonalization("Hermitian QR did not converge".into()))?;
        let k = argmin(eig.eigenvalues.as_slice());
        (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect())
    };
    if !(lambda >= -1e-10) {
        return Err(Error::Diagonalization(format!(
            "negative eigenvalue {lambda:e} of a PSD operator"
        )));
    }
    let eigvec = ClockedState::normalized(h.num_qubits(), h.num_steps(), vec)?;
    let residual = residual(h, lambda, eigvec.amplitudes())?;
    Ok(GroundState {
        lambda_min: lambda,
        eigvec,
        iterations: 0,
        residual,
    })
}

/// Smallest eigenvalue of the materialized matrix, without eigenvectors.
pub fn min_eigenvalue_dense_value(h: &CircuitHamiltonian) -> Result<f64> {
    let m = h.materialize_dense()?;
    Ok(min_eigenvalue_of(&m))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue_of(m: &DMatrix<Complex64>) -> f64 {
    let values = if m.iter().all(|z| z.im == 0.0) {
        m.map(|z| z.re).symmetric_eigenvalues()
    } else {
        m.symmetric_eigenvalues()
    };
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

fn argmin(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("empty spectrum")
}

/// Smallest eigenpair of the real symmetric tridiagonal matrix `(alpha, beta)`.
fn tridiagonal_ground(alpha: &[f64], beta: &[f64]) -> (f64, DVector<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let k = argmin(eig.eigenvalues.as_slice());
    (eig.eigenvalues[k], eig.eigenvectors.column(k).into_owned())
}

/// Restarted Lanczos with full reorthogonalization, using only `H·v`.
///
/// Stops once the explicit residual `‖Hv − λv‖` of the Ritz pair is at most
/// `tol`. `max_iter` caps the number of matrix-vector products; the start
/// vector is drawn from a ChaCha stream seeded with `seed`.
pub fn min_eigenvalue_iterative(h: &CircuitHamiltonian, tol: f64, max_iter: usize, seed: u64) -> Result<GroundState> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let dim = h.dim();
    let krylov = dim.min(KRYLOV_DIM);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    linalg::scale(1.0 / linalg::norm(&start), &mut start);

    let mut matvecs = 0;
    let mut last_residual = f64::INFINITY;
    loop {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        let mut ritz = (0.0, DVector::zeros(0));
        for j in 0..krylov {
            if matvecs >= max_iter {
                break;
            }
            let mut w = h.apply(&basis[j])?;
            matvecs += 1;
            let a = linalg::inner(&basis[j], &w).re;
            linalg::axpy(Complex64::new(-a, 0.0), &basis[j], &mut w);
            if j > 0 {
                linalg::axpy(Complex64::new(-beta[j - 1], 0.0), &basis[j - 1], &mut w);
            }
            // Gram-Schmidt against the whole basis, repeated when cancellation is severe
            for _ in 0..2 {
                let before = linalg::norm(&w);
                for q in &basis {
                    let p = linalg::inner(q, &w);
                    linalg::axpy(-p, q, &mut w);
                }
                if linalg::norm(&w) > 0.7 * before {
                    break;
                }
            }
            alpha.push(a);
            let b = linalg::norm(&w);
            let last = j + 1 == krylov || b < 1e-12;
            if last || (j + 1) % 8 == 0 {
                ritz = tridiagonal_ground(&alpha, &beta);
                if last || b * ritz.1[j].abs() <= 0.1 * tol {
                    break;
                }
            }
            beta.push(b);
            linalg::scale(1.0 / b, &mut w);
            basis.push(w);
        }
        if alpha.is_empty() {
            return Err(Error::NoConvergence {
                iterations: matvecs,
                residual: last_residual,
                tol,
            });
        }
        if alpha.len() > ritz.1.len() {
            ritz = tridiagonal_ground(&alpha, &beta);
        }
        let mut x = vec![Complex64::new(0.0, 0.0); dim];
        for (coef, q) in ritz.1.iter().zip(&basis) {
            linalg::axpy(Complex64::new(*coef, 0.0), q, &mut x);
        }
        linalg::scale(1.0 / linalg::norm(&x), &mut x);
        let hx = h.apply(&x)?;
        let lambda = linalg::inner(&x, &hx).re;
        let mut r = hx;
        linalg::axpy(Complex64::new(-lambda, 0.0), &x, &mut r);
        last_residual = linalg::norm(&r);
        if last_residual <= tol {
            let eigvec = ClockedState::normalized(h.num_qubits(), h.num_steps(), x)?;
            return Ok(GroundState {
                lambda_min: lambda,
                eigvec,
                iterations: matvecs,
                residual: last_residual,
            });
        }
        if matvecs >= max_iter {
            return Err(Error::NoConvergence {
                iterations: matvecs,
                residual: last_residual,
                tol,
            });
        }
        start = x;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Iterative,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dense => "dense",
            Method::Iterative => "iterative",
        })
    }
}

/// Which side of the promise gap `λ_min` falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `λ_min ≤ ZERO_TOL`
    CompletenessLike,
    /// `λ_min ≥ 1/(2(T+1)³)`
    SoundnessLike,
    /// Strictly inside the gap.
    Violation,
}

impl Verdict {
    pub fn classify(lambda_min: f64, bound: f64) -> Self {
        if lambda_min <= ZERO_TOL {
            Verdict::CompletenessLike
        } else if lambda_min >= bound {
            Verdict::SoundnessLike
        } else {
            Verdict::Violation
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CompletenessLike => "completeness_like",
            Verdict::SoundnessLike => "soundness_like",
            Verdict::Violation => "violation",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dims {
    #[serde(rename = "S")]
    pub qubits: usize,
    #[serde(rename = "T")]
    pub steps: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub input_checks: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub lambda_min: f64,
    pub method: Method,
    pub iterations: usize,
    pub residual: f64,
    pub bound: f64,
    pub verdict: Verdict,
    pub dims: Dims,
}

/// Solver selection for [`gap_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Dense,
    Iterative,
    /// Dense under the dense cap, iterative above it.
    Auto,
}

#[derive(Debug, Clone, Copy)]
pub struct GapOptions {
    pub method: MethodChoice,
    pub include_ancilla_checks: bool,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            method: MethodChoice::Auto,
            include_ancilla_checks: true,
            tol: 1e-9,
            max_iter: 20_000,
            seed: 0,
        }
    }
}

/// Spectral report for an already built Hamiltonian.
pub fn report_for(h: &CircuitHamiltonian, opts: &GapOptions) -> Result<SpectralReport> {
    let method = match opts.method {
        MethodChoice::Dense => Method::Dense,
        MethodChoice::Iterative => Method::Iterative,
        MethodChoice::Auto if h.dim() <= crate::hamiltonian::DENSE_CAP => Method::Dense,
        MethodChoice::Auto => Method::Iterative,
    };
    let ground = match method {
        Method::Dense => min_eigenvalue_dense(h)?,
        Method::Iterative => min_eigenvalue_iterative(h, opts.tol, opts.max_iter, opts.seed)?,
    };
    if !(ground.residual <= MAX_REPORT_RESIDUAL) {
        return Err(Error::Residual {
            residual: ground.residual,
        });
    }
    let bound = h.soundness_bound();
    Ok(SpectralReport {
        lambda_min: ground.lambda_min,
        method,
        iterations: ground.iterations,
        residual: ground.residual,
        bound,
        verdict: Verdict::classify(ground.lambda_min, bound),
        dims: Dims {
            qubits: h.num_qubits(),
            steps: h.num_steps(),
            n: h.num_input_bits(),
            input_checks: h.num_input_checks(),
        },
    })
}

/// Builds `H_x` and classifies its ground energy against `0` and `1/(2(T+1)³)`.
pub fn gap_report(circuit: &Circuit, x: &Bits, opts: &GapOptions) -> Result<SpectralReport> {
    let h = CircuitHamiltonian::build(circuit, x, opts.include_ancilla_checks)?;
    report_for(&h, opts)
}
