//! Hermitian spectra, trace norms and the optimal two-outcome measurement.
//!
//! For a traceless Hermitian `D`, `max_{0 ≤ E ≤ 1} tr[E D] = ½ tr|D|`, attained
//! by the projector onto the positive eigenspace. The zero eigenspace can be
//! split arbitrarily between the two outcomes without changing the value; here
//! it always goes to `E₂`.

use nalgebra::DMatrix;

use crate::closed_form::sym_dim;
use crate::error::{argument, Error, Result};
use crate::tensor::{hermitize, max_abs, DenseOperator, OperatorSpace};
use crate::C64;

/// Relative Hermiticity tolerance accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative eigenvalue threshold separating zero from nonzero eigenvalues.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl EigenDecomposition {
    /// `Q Λ Q†`.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut scaled = self.eigenvectors.clone();
        for (mut col, &lambda) in scaled.column_iter_mut().zip(&self.eigenvalues) {
            col *= C64::from(lambda);
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// Projector onto the span of eigenvectors whose eigenvalue satisfies `keep`.
    pub fn spectral_projector(&self, keep: impl Fn(f64) -> bool) -> DMatrix<C64> {
        let selected: Vec<usize> =
            (0..self.eigenvalues.len()).filter(|&k| keep(self.eigenvalues[k])).collect();
        let basis = self.eigenvectors.select_columns(&selected);
        let mut projector = &basis * basis.adjoint();
        hermitize(&mut projector);
        projector
    }

    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v.abs()).sum()
    }
}

fn check_hermitian(a: &DenseOperator) -> Result<()> {
    let residual = a.hermitian_residual();
    if residual > HERMITIAN_TOL * a.max_abs() {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian: |A - A†|max = {residual:e}"
        )));
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian operator.
pub fn eig_hermitian(a: &DenseOperator) -> Result<EigenDecomposition> {
    check_hermitian(a)?;
    let mut m = a.matrix().clone();
    hermitize(&mut m);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = eig.eigenvectors.select_columns(&order);
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// `tr|A| = Σ |λ_k|`.
pub fn trace_norm(a: &DenseOperator) -> Result<f64> {
    Ok(eig_hermitian(a)?.trace_norm())
}

/// `1e-9 · max |A_ij|`.
pub fn default_tolerance(a: &DenseOperator) -> f64 {
    ZERO_EIGENVALUE_TOL * a.max_abs()
}

fn resolve_tolerance(a: &DenseOperator, tol: Option<f64>) -> Result<f64> {
    match tol {
        None => Ok(default_tolerance(a)),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(argument(format!("eigenvalue tolerance must be positive, got {t}"))),
    }
}

/// Projector onto eigenvectors with eigenvalue above `tol`
/// (default [`default_tolerance`]).
pub fn positive_part_projector(a: &DenseOperator, tol: Option<f64>) -> Result<DenseOperator> {
    let tol = resolve_tolerance(a, tol)?;
    let projector = eig_hermitian(a)?.spectral_projector(|v| v > tol);
    DenseOperator::new(a.space(), projector, true)
}

/// A two-outcome measurement `{E₁, E₂}` with `E₁ + E₂ = 1`.
#[derive(Clone, Debug)]
pub struct Povm {
    e1: DenseOperator,
    e2: DenseOperator,
}

const POVM_TOL: f64 = 1e-10;

impl Povm {
    /// Validates completeness and `0 ≤ E₁ ≤ 1` to within `1e-10`.
    pub fn new(e1: DenseOperator, e2: DenseOperator) -> Result<Self> {
        if e1.space() != e2.space() {
            return Err(argument("POVM elements act on different spaces"));
        }
        let identity = DMatrix::<C64>::identity(e1.dim(), e1.dim());
        let completeness = max_abs(&(e1.matrix() + e2.matrix() - identity));
        if completeness > POVM_TOL {
            return Err(Error::Contract(format!("E1 + E2 differs from 1 by {completeness:e}")));
        }
        let spectrum = eig_hermitian(&e1)?.eigenvalues;
        let (lo, hi) = (spectrum[0], spectrum[spectrum.len() - 1]);
        if lo < -POVM_TOL || hi > 1.0 + POVM_TOL {
            return Err(Error::Contract(format!("E1 has eigenvalues in [{lo}, {hi}]")));
        }
        Ok(Self { e1, e2 })
    }

    pub fn e1(&self) -> &DenseOperator {
        &self.e1
    }

    pub fn e2(&self) -> &DenseOperator {
        &self.e2
    }

    /// Element for guess `label` (1 or 2).
    pub fn element(&self, label: u8) -> Result<&DenseOperator> {
        match label {
            1 => Ok(&self.e1),
            2 => Ok(&self.e2),
            _ => Err(argument(format!("POVM label must be 1 or 2, got {label}"))),
        }
    }

    /// `Re tr[E₁ D]`.
    pub fn bias(&self, d: &DenseOperator) -> Result<f64> {
        if d.space() != self.e1.space() {
            return Err(argument("operator and POVM act on different spaces"));
        }
        Ok(trace_of_product(self.e1.matrix(), d.matrix()))
    }
}

/// `Re tr[A B]` without forming the product.
pub fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// The projective measurement `E₁ = P_{D>tol}`, `E₂ = 1 - E₁`, which maximizes
/// `tr[E₁ D]` for traceless Hermitian `D`.
pub fn build_optimal_povm(d: &DenseOperator, tol: Option<f64>) -> Result<Povm> {
    let trace = d.trace();
    let trace_tol = ZERO_EIGENVALUE_TOL * d.max_abs() * d.dim() as f64;
    if trace.norm() > trace_tol {
        return Err(Error::Contract(format!("operator is not traceless: tr = {trace}")));
    }
    let e1 = positive_part_projector(d, tol)?;
    let mut e2 = DMatrix::<C64>::identity(d.dim(), d.dim()) - e1.matrix();
    hermitize(&mut e2);
    let e2 = DenseOperator::new(d.space(), e2, true)?;
    Ok(Povm { e1, e2 })
}

/// `½ + tr|D| / (4 d_{N+M} d_N)` for the operator built from `M` inputs and
/// `N` reference copies.
///
/// Accepts both the full-space operator and its symmetric-subspace
/// restriction (the latter only for `M = 1`).
pub fn probability_from_operator(
    d_op: &DenseOperator,
    inputs: usize,
    copies: usize,
    d: usize,
) -> Result<f64> {
    let matches = match d_op.space() {
        OperatorSpace::Tensor(layout) => {
            layout.subsystems() == inputs + 2 * copies && layout.local_dim() == d
        }
        OperatorSpace::SymmetricPair { copies: c, d: local, .. } => {
            inputs == 1 && c == copies && local == d
        }
        OperatorSpace::Plain(_) => false,
    };
    if !matches || inputs == 0 || copies == 0 {
        return Err(argument(format!(
            "operator on {:?} does not match M = {inputs}, N = {copies}, d = {d}",
            d_op.space()
        )));
    }
    let norm = (sym_dim(copies + inputs, d)? * sym_dim(copies, d)?) as f64;
    Ok(0.5 + trace_norm(d_op)? / (4.0 * norm))
}

/// A distinct eigenvalue and how often it occurs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

/// Groups ascending eigenvalues into levels; neighbours closer than `tol`
/// join the same level, whose value is the group mean.
pub fn levels(ascending: &[f64], tol: f64) -> Vec<Level> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in ascending {
        match out.last_mut() {
            Some((sum, count, last)) if (v - *last).abs() <= tol => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter()
        .map(|(sum, count, _)| Level { value: sum / count as f64, multiplicity: count })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::sample_haar_unitary;
    use crate::tensor::{build_identification_operator, build_identification_operator_sym};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> DenseOperator {
        let n = values.len();
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { C64::from(values[i]) } else { C64::from(0.0) });
        DenseOperator::from_matrix(m).unwrap()
    }

    fn random_hermitian(n: usize, seed: u64) -> DenseOperator {
        use rand::RngExt;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        DenseOperator::from_matrix(&g + g.adjoint()).unwrap()
    }

    #[test]
    fn diagonal_spectrum_is_sorted() {
        let eig = eig_hermitian(&diag(&[3.0, -1.0, 0.0])).unwrap();
        assert_eq!(eig.eigenvalues.len(), 3);
        let expected = [-1.0, 0.0, 3.0];
        for (got, want) in eig.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_x_spectrum() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::from(1.0);
        m[(1, 0)] = C64::from(1.0);
        let eig = eig_hermitian(&DenseOperator::from_matrix(m).unwrap()).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        for seed in 0..5 {
            let a = random_hermitian(24, seed);
            let eig = eig_hermitian(&a).unwrap();
            let residual = max_abs(&(eig.reconstruct() - a.matrix()));
            assert!(residual <= 1e-9 * a.max_abs(), "{residual}");
            let q = &eig.eigenvectors;
            let gram = max_abs(&(q.adjoint() * q - DMatrix::identity(24, 24)));
            assert!(gram < 1e-9);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigensolver_is_deterministic() {
        let a = random_hermitian(16, 9);
        let first = eig_hermitian(&a).unwrap();
        let second = eig_hermitian(&a).unwrap();
        assert_eq!(first.eigenvalues, second.eigenvalues);
        assert_eq!(first.eigenvectors, second.eigenvectors);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::from(1.0);
        let a = DenseOperator::from_matrix(m).unwrap();
        assert!(matches!(eig_hermitian(&a), Err(Error::Contract(_))));
        assert!(matches!(trace_norm(&a), Err(Error::Contract(_))));
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&diag(&[1.0, -2.0, 0.0])).unwrap() - 3.0).abs() < 1e-14);
        let d2 = build_identification_operator(1, 2).unwrap();
        assert!((trace_norm(&d2).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        let d3 = build_identification_operator(1, 3).unwrap();
        assert!((trace_norm(&d3).unwrap() - 8.0 * 3f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn trace_norm_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_hermitian(12, 3);
        let u = sample_haar_unitary(12, &mut rng);
        let rotated = DenseOperator::from_matrix(&u * a.matrix() * u.adjoint()).unwrap();
        let diff = trace_norm(&a).unwrap() - trace_norm(&rotated).unwrap();
        assert!(diff.abs() < 1e-9);
    }

    #[test]
    fn positive_projector_examples() {
        let p = positive_part_projector(&diag(&[1.0, -1.0, 0.0]), None).unwrap();
        assert!(max_abs(&(p.matrix() - diag(&[1.0, 0.0, 0.0]).matrix())) < 1e-14);

        let p = positive_part_projector(&build_identification_operator(1, 2).unwrap(), None).unwrap();
        assert!((p.trace().re - 2.0).abs() < 1e-10);
        assert!(max_abs(&(p.matrix() * p.matrix() - p.matrix())) < 1e-10);

        let p = positive_part_projector(&build_identification_operator_sym(2, 2).unwrap(), None)
            .unwrap();
        assert!((p.trace().re - 6.0).abs() < 1e-10);

        assert!(positive_part_projector(&diag(&[1.0]), Some(0.0)).is_err());
        assert!(positive_part_projector(&diag(&[1.0]), Some(f64::NAN)).is_err());
    }

    #[test]
    fn optimal_povm_attains_half_trace_norm() {
        let d_op = build_identification_operator(1, 2).unwrap();
        let povm = build_optimal_povm(&d_op, None).unwrap();
        assert!((povm.bias(&d_op).unwrap() - 3f64.sqrt()).abs() < 1e-10);
        let sum = povm.e1().matrix() + povm.e2().matrix();
        assert!(max_abs(&(sum - DMatrix::identity(8, 8))) < 1e-14);
        let commutator = povm.e1().matrix() * povm.e2().matrix() - povm.e2().matrix() * povm.e1().matrix();
        assert!(max_abs(&commutator) < 1e-12);
        let validated = Povm::new(povm.e1().clone(), povm.e2().clone());
        assert!(validated.is_ok());
    }

    #[test]
    fn optimal_povm_rejects_traced_operator() {
        assert!(matches!(build_optimal_povm(&diag(&[1.0, 0.5]), None), Err(Error::Contract(_))));
    }

    #[test]
    fn povm_validation() {
        let e1 = diag(&[1.5, 0.0]);
        let e2 = diag(&[-0.5, 1.0]);
        assert!(matches!(Povm::new(e1, e2), Err(Error::Contract(_))));
        let e1 = diag(&[1.0, 0.0]);
        let e2 = diag(&[0.0, 0.5]);
        assert!(matches!(Povm::new(e1, e2), Err(Error::Contract(_))));
    }

    #[test]
    fn probability_examples() {
        let d_op = build_identification_operator(1, 2).unwrap();
        let p = probability_from_operator(&d_op, 1, 1, 2).unwrap();
        assert!((p - (0.5 + 3f64.sqrt() / 12.0)).abs() < 1e-12);
        assert!((p - 0.6443376).abs() < 1e-7);
        let d_op = build_identification_operator(1, 3).unwrap();
        let p = probability_from_operator(&d_op, 1, 1, 3).unwrap();
        assert!((p - (0.5 + 3f64.sqrt() / 9.0)).abs() < 1e-12);
        let sym = build_identification_operator_sym(1, 3).unwrap();
        assert!((probability_from_operator(&sym, 1, 1, 3).unwrap() - p).abs() < 1e-12);
    }

    #[test]
    fn probability_rejects_mismatched_operator() {
        let d_op = build_identification_operator(1, 2).unwrap();
        assert!(matches!(probability_from_operator(&d_op, 1, 2, 2), Err(Error::Argument(_))));
        assert!(matches!(probability_from_operator(&d_op, 1, 1, 3), Err(Error::Argument(_))));
        let sym = build_identification_operator_sym(1, 2).unwrap();
        assert!(matches!(probability_from_operator(&sym, 2, 1, 2), Err(Error::Argument(_))));
        assert!(matches!(probability_from_operator(&diag(&[0.0; 8]), 1, 1, 2), Err(Error::Argument(_))));
    }

    #[test]
    fn level_grouping() {
        let grouped = levels(&[-1.0, -1.0 + 1e-12, 0.0, 0.0, 0.0, 2.0], 1e-9);
        assert_eq!(grouped.len(), 3);
        assert_eq!(grouped[0].multiplicity, 2);
        assert_eq!(grouped[1].multiplicity, 3);
        assert_eq!(grouped[2], Level { value: 2.0, multiplicity: 1 });
        assert!(levels(&[], 1e-9).is_empty());
    }
}
