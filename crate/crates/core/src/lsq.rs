//! Dense least squares restricted to the null space of linear constraints.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-8;

/// Orthonormal basis (as columns) of the null space of `c`.
pub fn null_space(c: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    if c.nrows() > 0 {
        let svd = c.clone().svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if smax > 0.0 && s > RANK_TOL * smax {
                basis.push(v_t.row(k).transpose());
            }
        }
    }
    let rank = basis.len();
    // Complete the row space to a basis of R^n; the added vectors span the null space.
    for e in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = DVector::zeros(n);
        v[e] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let d = b.dot(&v);
                v.axpy(-d, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / norm);
        }
    }
    let cols: Vec<DVector<f64>> = basis.split_off(rank);
    if cols.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&cols)
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveDiagnostics {
    pub equations: usize,
    pub unknowns: usize,
    /// Dimension of the space left after imposing the constraints.
    pub constrained_dim: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub kernel_dim: usize,
    pub unique: bool,
    /// `‖J x − rhs‖`.
    pub residual: f64,
    /// `‖J x − rhs‖ / max(‖rhs‖, tiny)`; meaningless when `rhs` is at roundoff.
    pub relative_residual: f64,
    pub rhs_norm: f64,
}

#[derive(Debug, Clone)]
pub struct ConstrainedSolution {
    pub x: DVector<f64>,
    pub diagnostics: SolveDiagnostics,
    /// Null-space basis of the operator within the constraint space, in
    /// original coordinates.
    pub kernel: DMatrix<f64>,
}

/// Factorization of `op` restricted to the null space of `cons`, reusable
/// across right-hand sides.
#[derive(Debug, Clone)]
pub struct ConstrainedSolver {
    op: DMatrix<f64>,
    z: DMatrix<f64>,
    svd: Option<nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>>,
    eps: f64,
    sigma_max: f64,
    sigma_min: f64,
    kernel: DMatrix<f64>,
}

impl ConstrainedSolver {
    pub fn new(op: DMatrix<f64>, cons: &DMatrix<f64>) -> Self {
        let n = op.ncols();
        let z = null_space(cons, n);
        let dim = z.ncols();
        if dim == 0 {
            return ConstrainedSolver {
                op,
                z,
                svd: None,
                eps: 0.0,
                sigma_max: 0.0,
                sigma_min: 0.0,
                kernel: DMatrix::zeros(n, 0),
            };
        }
        let svd = (&op * &z).svd(true, true);
        let sv = &svd.singular_values;
        let sigma_max = sv.iter().fold(0.0f64, |m, &s| m.max(s));
        let eps = RANK_TOL * sigma_max.max(f64::MIN_POSITIVE);
        let sigma_min = if dim > sv.len() {
            0.0
        } else {
            sv.iter().fold(f64::INFINITY, |m, &s| m.min(s))
        };
        let v_t = svd.v_t.as_ref().expect("right singular vectors");
        let kept: Vec<_> = (0..sv.len()).filter(|&k| sv[k] > eps).map(|k| v_t.row(k).into_owned()).collect();
        let rows = if kept.is_empty() { DMatrix::zeros(0, dim) } else { DMatrix::from_rows(&kept) };
        let kernel_reduced = null_space(&rows, dim);
        let kernel = if kernel_reduced.ncols() == 0 {
            DMatrix::zeros(n, 0)
        } else {
            &z * kernel_reduced
        };
        ConstrainedSolver {
            op,
            z,
            svd: Some(svd),
            eps,
            sigma_max,
            sigma_min,
            kernel,
        }
    }

    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.ncols()
    }

    /// Orthonormal basis of the constraint null space.
    pub fn null_space(&self) -> &DMatrix<f64> {
        &self.z
    }

    pub fn constrained_dim(&self) -> usize {
        self.z.ncols()
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> (DVector<f64>, SolveDiagnostics) {
        let y = match &self.svd {
            Some(svd) => svd.solve(rhs, self.eps).expect("singular vectors computed"),
            None => DVector::zeros(0),
        };
        let x = &self.z * y;
        let residual = (&self.op * &x - rhs).norm();
        let rhs_norm = rhs.norm();
        let dim = self.z.ncols();
        let diagnostics = SolveDiagnostics {
            equations: self.op.nrows(),
            unknowns: self.op.ncols(),
            constrained_dim: dim,
            sigma_max: self.sigma_max,
            sigma_min: self.sigma_min,
            kernel_dim: self.kernel_dim(),
            unique: dim > 0 && self.kernel_dim() == 0,
            residual,
            relative_residual: residual / rhs_norm.max(f64::MIN_POSITIVE),
            rhs_norm,
        };
        (x, diagnostics)
    }
}

/// Minimum-norm least-squares solution of `op x = rhs` subject to `cons x = 0`.
pub fn solve_constrained(op: &DMatrix<f64>, rhs: &DVector<f64>, cons: &DMatrix<f64>) -> ConstrainedSolution {
    let solver = ConstrainedSolver::new(op.clone(), cons);
    let (x, diagnostics) = solver.solve(rhs);
    ConstrainedSolution {
        x,
        diagnostics,
        kernel: solver.kernel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_is_orthonormal_complement() {
        let c = DMatrix::from_row_slice(2, 4, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0]);
        let z = null_space(&c, 4);
        assert_eq!(z.ncols(), 2);
        assert!((&c * &z).norm() < 1e-14);
        assert!((z.transpose() * &z - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn redundant_constraints_counted_once() {
        let c = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(null_space(&c, 3).ncols(), 2);
        assert_eq!(null_space(&DMatrix::zeros(0, 3), 3).ncols(), 3);
    }

    #[test]
    fn constrained_solution_recovers_planted_vector() {
        // x = (1, -1, 2), constraint x0 + x1 = 0, operator injective on it.
        let op = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 3.0]);
        let x0 = DVector::from_vec(vec![1.0, -1.0, 2.0]);
        let cons = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let sol = solve_constrained(&op, &(&op * &x0), &cons);
        assert!((sol.x - x0).norm() < 1e-12);
        assert!(sol.diagnostics.unique);
        assert_eq!(sol.diagnostics.constrained_dim, 2);
    }

    #[test]
    fn kernel_reported() {
        let op = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let sol = solve_constrained(&op, &DVector::from_vec(vec![1.0, 2.0]), &DMatrix::zeros(0, 3));
        assert_eq!(sol.diagnostics.kernel_dim, 1);
        assert!(!sol.diagnostics.unique);
        assert_eq!(sol.kernel.ncols(), 1);
        assert!((&op * &sol.kernel).norm() < 1e-14);
        assert!(sol.x[2].abs() < 1e-14);
    }
}
