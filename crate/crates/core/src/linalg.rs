//! Eigensolvers: dense Hermitian (small Bloch blocks, mean-field matrices) and
//! restarted Lanczos for the lowest state of large sparse sectors.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

const QR_EPS: f64 = 1e-15;
const QR_MAX_ITER: usize = 10_000;

/// Frobenius-norm scale used for relative residual checks.
fn frobenius<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    libm::sqrt(m.iter().map(|z| z.clone().modulus_squared()).sum::<f64>())
}

/// Ascending eigenvalues of a Hermitian matrix, each verified to satisfy
/// `|Hv - lambda v| <= 1e-10 |H|`.
pub fn hermitian_eigenvalues(matrix: &DMatrix<Complex64>, context: &str) -> Result<Vec<f64>> {
    let n = matrix.nrows();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![matrix[(0, 0)].re]),
        _ => {}
    }
    let eig = SymmetricEigen::try_new(matrix.clone(), QR_EPS, QR_MAX_ITER).ok_or_else(|| {
        Error::NoConvergence {
            context: format!("hermitian eigensolve, dim {n}, {context}"),
            residual: f64::NAN,
        }
    })?;
    let scale = frobenius(matrix).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(j);
        let r = matrix * v - v * Complex64::new(lambda, 0.0);
        worst = worst.max(r.norm());
    }
    if worst > 1e-10 * scale {
        return Err(Error::NoConvergence {
            context: format!("hermitian eigensolve, dim {n}, {context}"),
            residual: worst,
        });
    }
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(matrix: DMatrix<f64>, context: &str) -> Result<Vec<f64>> {
    let n = matrix.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let eig = SymmetricEigen::try_new(matrix, QR_EPS, QR_MAX_ITER).ok_or_else(|| {
        Error::NoConvergence {
            context: format!("symmetric eigensolve, dim {n}, {context}"),
            residual: f64::NAN,
        }
    })?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Lowest eigenpair of a dense real symmetric matrix.
pub fn symmetric_ground(matrix: DMatrix<f64>, context: &str) -> Result<(f64, DVector<f64>)> {
    let n = matrix.nrows();
    let eig = SymmetricEigen::try_new(matrix, QR_EPS, QR_MAX_ITER).ok_or_else(|| {
        Error::NoConvergence {
            context: format!("symmetric eigensolve, dim {n}, {context}"),
            residual: f64::NAN,
        }
    })?;
    let (j, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::NoConvergence {
            context: format!("empty matrix, {context}"),
            residual: f64::NAN,
        })?;
    Ok((lambda, eig.eigenvectors.column(j).into_owned()))
}

/// A real symmetric operator applied matrix-free.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    /// `out = A x`.
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov dimension per restart cycle.
    pub krylov: usize,
    pub max_restarts: usize,
    /// Residual tolerance relative to `max(1, |lambda|)`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            krylov: 80,
            max_restarts: 60,
            tol: 1e-10,
            seed: 0x4a43_485f_4544,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Lowest eigenpair by explicitly restarted Lanczos with full
/// reorthogonalization. The start vector is drawn from a seeded generator, so
/// results are reproducible run to run.
pub fn lanczos_lowest<A: SymmetricOperator + ?Sized>(
    op: &A,
    opts: &LanczosOptions,
) -> Result<Eigenpair> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::NoConvergence {
            context: "lanczos on an empty operator".into(),
            residual: f64::NAN,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..n)
        .map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    let s = norm(&start);
    start.iter_mut().for_each(|x| *x /= s);

    let krylov = opts.krylov.clamp(2, n.max(2));
    let mut work = vec![0.0; n];
    let mut last_residual = f64::INFINITY;

    for _ in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(krylov);
        let mut alpha: Vec<f64> = Vec::with_capacity(krylov);
        let mut beta: Vec<f64> = Vec::with_capacity(krylov);
        basis.push(start.clone());

        loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut work);
            let a = dot(&basis[j], &work);
            alpha.push(a);
            // Two passes of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(v, &work);
                    axpy(-c, v, &mut work);
                }
            }
            let b = norm(&work);
            if basis.len() == krylov.min(n) || b <= 1e-14 * a.abs().max(1.0) {
                break;
            }
            beta.push(b);
            basis.push(work.iter().map(|x| x / b).collect());
        }

        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let (theta, y) = symmetric_ground(t, "lanczos tridiagonal")?;

        let mut ritz = vec![0.0; n];
        for (v, &c) in basis.iter().zip(y.iter()) {
            axpy(c, v, &mut ritz);
        }
        let r = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= r);
        op.apply(&ritz, &mut work);
        let value = dot(&ritz, &work);
        axpy(-value, &ritz, &mut work);
        let residual = norm(&work);
        last_residual = residual;
        if residual <= opts.tol * value.abs().max(1.0) {
            return Ok(Eigenpair {
                value,
                vector: ritz,
                residual,
            });
        }
        debug_assert!(theta.is_finite());
        start = ritz;
    }
    Err(Error::NoConvergence {
        context: format!("lanczos, dim {n}, {} restarts", opts.max_restarts),
        residual: last_residual,
    })
}
