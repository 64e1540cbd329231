//! Random walk with restart over a column-normalized transition matrix.
//!
//! For adjacency `A`, the transition matrix is `T[i][j] = A[i][j] / colsum_j`
//! so every non-zero column sums to one. The steady state for a walk that
//! restarts at node `j` with probability `alpha` solves
//!
//! ```text
//! s = (1 - alpha) * T * s + alpha * e_j
//! ```
//!
//! [`rwr`] iterates that map for all start nodes at once; [`rwr_exact`]
//! solves the linear system directly and exists to cross-check the
//! iteration. A node with no edges has a zero column in `T`; its steady
//! state is pinned to the restart vector `e_j` so every column stays a
//! probability distribution.

use std::io::{Read as _, Write as _};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{cast, Scalar};

/// Column-normalized transition matrix plus the nodes whose columns were
/// all zero (no edges) and could not be normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<S> {
    t: Matrix<S>,
    isolated: Vec<usize>,
}

impl<S: Scalar> TransitionMatrix<S> {
    pub fn matrix(&self) -> &Matrix<S> {
        &self.t
    }

    pub fn isolated(&self) -> &[usize] {
        &self.isolated
    }

    pub fn n(&self) -> usize {
        self.t.rows()
    }
}

/// Diffusion state matrix: `s[(i, j)]` is the stationary probability of
/// finding a walk that restarts at `j` on node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix<S> {
    pub s: Matrix<S>,
    pub alpha: f64,
    pub iterations_used: usize,
    /// Max-norm of the last update.
    pub residual: f64,
    pub converged: bool,
    /// Max-norm of every update, in iteration order.
    pub residual_history: Vec<f64>,
}

impl<S: Scalar> DiffusionMatrix<S> {
    /// Per-node feature rows for the embedding stage: row `i` is the
    /// diffusion profile of walks restarting at node `i` (column `i` of `s`).
    pub fn node_features(&self) -> Matrix<S> {
        self.s.transpose()
    }
}

/// Column-normalizes a nonnegative symmetric adjacency matrix.
pub fn transition_matrix<S: Scalar>(a: &Matrix<S>) -> Result<TransitionMatrix<S>> {
    if a.rows() != a.cols() {
        return Err(Error::invalid(format!(
            "adjacency matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)] < S::zero() {
                return Err(Error::invalid(format!("negative adjacency entry at ({i}, {j})")));
            }
        }
    }
    let mut col_sums = vec![S::zero(); n];
    for i in 0..n {
        for (j, s) in col_sums.iter_mut().enumerate() {
            *s += a[(i, j)];
        }
    }
    let mut t = Matrix::zeros(n, n);
    let mut isolated = Vec::new();
    for (j, &sum) in col_sums.iter().enumerate() {
        if sum == S::zero() {
            isolated.push(j);
            continue;
        }
        for i in 0..n {
            t[(i, j)] = a[(i, j)] / sum;
        }
    }
    Ok(TransitionMatrix { t, isolated })
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha {alpha} outside (0, 1]")));
    }
    Ok(())
}

/// Iterates the restart map for every start node simultaneously until the
/// max-norm update drops below `tol` or `max_iter` sweeps have run.
///
/// Non-convergence is not an error: the partial result comes back with
/// `converged == false` and a warning in the log.
pub fn rwr<S: Scalar>(
    t: &TransitionMatrix<S>,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DiffusionMatrix<S>> {
    validate_alpha(alpha)?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::invalid(format!("tolerance {tol} must be positive and finite")));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    let n = t.n();
    let a = cast::<S>(alpha);
    let retain = S::one() - a;
    let mut s = Matrix::identity(n);
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        let mut next = t.t.matmul(&s);
        for v in next.data_mut() {
            *v *= retain;
        }
        for i in 0..n {
            next[(i, i)] += a;
        }
        // Columns of isolated start nodes are pinned to the restart vector.
        for &j in &t.isolated {
            for i in 0..n {
                next[(i, j)] = if i == j { S::one() } else { S::zero() };
            }
        }
        let residual = next.max_abs_diff(&s).to_f64().unwrap();
        history.push(residual);
        s = next;
        iterations += 1;
        if residual < tol {
            converged = true;
            break;
        }
    }

    if !converged {
        log::warn!(
            "rwr did not reach tol {tol} within {max_iter} iterations (residual {})",
            history.last().copied().unwrap_or(f64::NAN)
        );
    }
    Ok(DiffusionMatrix {
        s,
        alpha,
        iterations_used: iterations,
        residual: history.last().copied().unwrap_or(0.0),
        converged,
        residual_history: history,
    })
}

/// Dense-solver baseline: solves `(I - (1 - alpha) T) s_j = alpha e_j` for
/// every start node with one LU factorization. Verification-grade; guarded
/// to `n <= 2000`.
pub fn rwr_exact<S: Scalar>(t: &TransitionMatrix<S>, alpha: f64) -> Result<Matrix<S>> {
    validate_alpha(alpha)?;
    let n = t.n();
    if n > 2000 {
        return Err(Error::invalid(format!("rwr_exact is limited to n <= 2000, got {n}")));
    }
    let retain = cast::<S>(1.0 - alpha);
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { S::one() } else { S::zero() };
            a[(i, j)] = delta - retain * t.t[(i, j)];
        }
    }
    let mut rhs = Matrix::zeros(n, n);
    for i in 0..n {
        rhs[(i, i)] = cast::<S>(alpha);
    }
    let mut s = lu_solve(a, rhs);
    for &j in &t.isolated {
        for i in 0..n {
            s[(i, j)] = if i == j { S::one() } else { S::zero() };
        }
    }
    Ok(s)
}

/// Gaussian elimination with partial pivoting over an n x m right-hand side.
/// The restart system is strictly column diagonally dominant for alpha > 0,
/// so a vanishing pivot cannot occur.
fn lu_solve<S: Scalar>(mut a: Matrix<S>, mut b: Matrix<S>) -> Matrix<S> {
    let n = a.rows();
    let m = b.cols();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[(row, col)].abs() > a[(pivot, col)].abs() {
                pivot = row;
            }
        }
        assert!(
            a[(pivot, col)].abs() > S::zero(),
            "singular restart system; impossible for alpha > 0"
        );
        if pivot != col {
            for k in 0..n {
                let tmp = a[(col, k)];
                a[(col, k)] = a[(pivot, k)];
                a[(pivot, k)] = tmp;
            }
            for k in 0..m {
                let tmp = b[(col, k)];
                b[(col, k)] = b[(pivot, k)];
                b[(pivot, k)] = tmp;
            }
        }
        let diag = a[(col, col)];
        for row in col + 1..n {
            let factor = a[(row, col)] / diag;
            if factor == S::zero() {
                continue;
            }
            a[(row, col)] = S::zero();
            for k in col + 1..n {
                let v = a[(col, k)];
                a[(row, k)] -= factor * v;
            }
            for k in 0..m {
                let v = b[(col, k)];
                b[(row, k)] -= factor * v;
            }
        }
    }
    let mut x = Matrix::zeros(n, m);
    for row in (0..n).rev() {
        for k in 0..m {
            let mut acc = b[(row, k)];
            for col in row + 1..n {
                acc -= a[(row, col)] * x[(col, k)];
            }
            x[(row, k)] = acc / a[(row, row)];
        }
    }
    x
}

const MAGIC: &[u8; 4] = b"DMNE";
const VERSION: u32 = 1;

/// Binary layout: magic `DMNE`, u32 version, u64 n, n*n little-endian f64
/// entries of `s` in row-major order, then f64 alpha.
pub fn write_diffusion<S: Scalar>(d: &DiffusionMatrix<S>, path: &Path) -> Result<()> {
    let n = d.s.rows();
    let mut buf = Vec::with_capacity(16 + n * n * 8 + 8);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    for &v in d.s.data() {
        buf.extend_from_slice(&v.to_f64().unwrap().to_le_bytes());
    }
    buf.extend_from_slice(&d.alpha.to_le_bytes());
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&buf).map_err(|e| Error::io(path, e))
}

/// Reads a matrix written by [`write_diffusion`]. The file stores only the
/// state matrix and alpha; iteration metadata is not serialized.
pub fn read_diffusion<S: Scalar>(path: &Path) -> Result<DiffusionMatrix<S>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let fail = |msg: &str| Error::invalid(format!("{}: {msg}", path.display()));
    if bytes.len() < 16 {
        return Err(fail("truncated diffusion file"));
    }
    if &bytes[0..4] != MAGIC {
        return Err(fail("not a diffusion matrix file (bad magic)"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(fail(&format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let expected = 16 + n * n * 8 + 8;
    if bytes.len() != expected {
        return Err(fail(&format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let mut s = Matrix::zeros(n, n);
    for (idx, v) in s.data_mut().iter_mut().enumerate() {
        let off = 16 + idx * 8;
        *v = cast::<S>(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()));
    }
    let alpha = f64::from_le_bytes(bytes[expected - 8..].try_into().unwrap());
    Ok(DiffusionMatrix {
        s,
        alpha,
        iterations_used: 0,
        residual: 0.0,
        converged: true,
        residual_history: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn complete_two() -> TransitionMatrix<f64> {
        let a = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        transition_matrix(&a).unwrap()
    }

    fn random_graph(n: usize, p: f64, seed: u64) -> Matrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < p {
                    let w = rng.gen_range(0.05..=1.0);
                    a[(i, j)] = w;
                    a[(j, i)] = w;
                }
            }
        }
        a
    }

    #[test]
    fn two_node_closed_form() {
        // s0 = (1 - a) T s0 + a e0 with T swapping the nodes gives
        // s0 = [2/3, 1/3] at alpha = 0.5.
        let d = rwr(&complete_two(), 0.5, 1e-13, 1000).unwrap();
        assert!((d.s[(0, 0)] - 2.0 / 3.0).abs() < 1e-10);
        assert!((d.s[(1, 0)] - 1.0 / 3.0).abs() < 1e-10);
        assert!(d.converged);
    }

    #[test]
    fn alpha_one_returns_identity() {
        let d = rwr(&complete_two(), 1.0, 1e-12, 10).unwrap();
        assert_eq!(d.s, Matrix::identity(2));
        let exact = rwr_exact(&complete_two(), 1.0).unwrap();
        assert!(exact.max_abs_diff(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn isolated_node_column_is_restart_vector() {
        let mut a = Matrix::zeros(3, 3);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = 1.0;
        let t = transition_matrix(&a).unwrap();
        assert_eq!(t.isolated(), &[2]);
        let d = rwr(&t, 0.5, 1e-12, 1000).unwrap();
        assert_eq!(d.s[(2, 2)], 1.0);
        assert_eq!(d.s[(0, 2)], 0.0);
        assert_eq!(d.s[(1, 2)], 0.0);
        let exact = rwr_exact(&t, 0.5).unwrap();
        assert_eq!(exact[(2, 2)], 1.0);
    }

    #[test]
    fn columns_sum_to_one() {
        let a = random_graph(40, 0.2, 7);
        let t = transition_matrix(&a).unwrap();
        let d = rwr(&t, 0.3, 1e-10, 5000).unwrap();
        for j in 0..40 {
            let sum: f64 = (0..40).map(|i| d.s[(i, j)]).sum();
            assert!((sum - 1.0).abs() < 1e-9, "column {j} sums to {sum}");
        }
    }

    #[test]
    fn residuals_non_increasing_after_first_iteration() {
        for seed in 0..5 {
            let a = random_graph(30, 0.25, seed);
            let t = transition_matrix(&a).unwrap();
            let d = rwr(&t, 0.2, 1e-10, 5000).unwrap();
            for w in d.residual_history.windows(2).skip(1) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "residuals increased: {:?}", w);
            }
        }
    }

    #[test]
    fn cycle_columns_are_cyclic_shifts() {
        let n = 6;
        let mut a = Matrix::<f64>::zeros(n, n);
        for i in 0..n {
            let j = (i + 1) % n;
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        let t = transition_matrix(&a).unwrap();
        let d = rwr(&t, 0.5, 1e-13, 10_000).unwrap();
        for j in 1..n {
            for i in 0..n {
                let shifted = d.s[((i + n - j) % n, 0)];
                assert!((d.s[(i, j)] - shifted).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn iterative_matches_exact_solver() {
        for (seed, alpha) in [(1u64, 0.1), (2, 0.5), (3, 0.9)] {
            let a = random_graph(25, 0.3, seed);
            let t = transition_matrix(&a).unwrap();
            let d = rwr(&t, alpha, 1e-11, 20_000).unwrap();
            let exact = rwr_exact(&t, alpha).unwrap();
            assert!(d.s.max_abs_diff(&exact) < 1e-8, "alpha {alpha}");
        }
    }

    #[test]
    fn non_convergence_is_flagged_not_fatal() {
        let a = random_graph(20, 0.3, 11);
        let t = transition_matrix(&a).unwrap();
        let d = rwr(&t, 0.05, 1e-14, 3).unwrap();
        assert!(!d.converged);
        assert_eq!(d.iterations_used, 3);
        assert!(d.residual > 0.0);
    }

    #[test]
    fn input_validation() {
        let mut a = Matrix::zeros(2, 2);
        a[(0, 1)] = -1.0;
        assert!(transition_matrix(&a).unwrap_err().to_string().contains("negative"));

        let t = complete_two();
        assert!(rwr(&t, 0.0, 1e-8, 10).is_err());
        assert!(rwr(&t, 1.5, 1e-8, 10).is_err());
        assert!(rwr(&t, 0.5, 0.0, 10).is_err());
        assert!(rwr(&t, 0.5, 1e-8, 0).is_err());
        assert!(rwr_exact(&t, -0.1).is_err());
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let a = random_graph(9, 0.4, 3);
        let t = transition_matrix(&a).unwrap();
        let d = rwr(&t, 0.5, 1e-12, 1000).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        write_diffusion(&d, file.path()).unwrap();
        let back: DiffusionMatrix<f64> = read_diffusion(file.path()).unwrap();
        assert_eq!(back.s, d.s);
        assert_eq!(back.alpha, d.alpha);
    }

    #[test]
    fn binary_rejects_garbage() {
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), b"XXXX12345678123456781234").unwrap();
        let err = read_diffusion::<f64>(file.path()).unwrap_err();
        assert!(err.to_string().contains("bad magic"), "{err}");
    }

    #[test]
    fn node_features_are_transposed_columns() {
        let d = rwr(&complete_two(), 0.5, 1e-13, 1000).unwrap();
        let x = d.node_features();
        assert_eq!(x[(0, 0)], d.s[(0, 0)]);
        assert_eq!(x[(0, 1)], d.s[(1, 0)]);
    }

    #[test]
    fn works_in_f32() {
        let a = Matrix::<f32>::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let t = transition_matrix(&a).unwrap();
        let d = rwr(&t, 0.5, 1e-6, 1000).unwrap();
        assert!((d.s[(0, 0)] - 2.0 / 3.0).abs() < 1e-5);
    }
}
