use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::{check_local_dim, hermitize, DenseOperator, OperatorSpace, TensorLayout};
use crate::closed_form::sym_dim;
use crate::error::{argument, Error, Result};
use crate::C64;

/// Orthonormal basis of `Sym^N(C^d)` labelled by occupation vectors.
///
/// The vector for occupations `(n_1, …, n_d)` is the uniform superposition of
/// all strings with those occupations, normalized by `√(N!/Π n_k!)`.
/// Occupations are listed in descending lexicographic order, so for `N = 2`,
/// `d = 2` the basis is `(2,0), (1,1), (0,2)`.
#[derive(Clone, Debug)]
pub struct SymBasis {
    copies: usize,
    d: usize,
    occupations: Vec<Vec<usize>>,
    positions: HashMap<Vec<usize>, usize>,
}

impl SymBasis {
    pub fn new(copies: usize, d: usize) -> Result<Self> {
        check_local_dim(d)?;
        let expected = sym_dim(copies, d)?;
        let expected = usize::try_from(expected)
            .map_err(|_| Error::Range(format!("Sym^{copies}(C^{d}) is too large to enumerate")))?;
        let mut occupations = Vec::with_capacity(expected);
        let mut prefix = Vec::with_capacity(d);
        push_occupations(copies, d, &mut prefix, &mut occupations);
        debug_assert_eq!(occupations.len(), expected);
        let positions =
            occupations.iter().enumerate().map(|(i, occ)| (occ.clone(), i)).collect();
        Ok(Self { copies, d, occupations, positions })
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.occupations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupations.is_empty()
    }

    pub fn occupations(&self) -> &[Vec<usize>] {
        &self.occupations
    }

    pub fn position(&self, occupation: &[usize]) -> Option<usize> {
        self.positions.get(occupation).copied()
    }

    /// Number of strings with the given occupations, `N!/Π n_k!`.
    pub fn multinomial(occupation: &[usize]) -> u128 {
        // Build it up as a product of binomials so intermediates stay exact.
        let mut total = 0u128;
        let mut acc = 1u128;
        for &count in occupation {
            for i in 1..=count as u128 {
                total += 1;
                acc = acc * total / i;
            }
        }
        acc
    }

    /// Isometry `V: Sym^N(C^d) → (C^d)^{⊗N}`, one column per occupation vector.
    pub fn isometry(&self, cap: usize) -> Result<DMatrix<C64>> {
        if self.copies == 0 {
            return Ok(DMatrix::from_element(1, 1, C64::new(1.0, 0.0)));
        }
        let layout = TensorLayout::with_cap(self.copies, self.d, cap)?;
        let mut v = DMatrix::zeros(layout.dim(), self.len());
        let mut digits = vec![0; self.copies];
        let mut occ = vec![0; self.d];
        for row in 0..layout.dim() {
            layout.digits_into(row, &mut digits);
            occ.iter_mut().for_each(|c| *c = 0);
            for &digit in &digits {
                occ[digit] += 1;
            }
            let col = self.positions[&occ];
            v[(row, col)] = C64::new(1.0 / (Self::multinomial(&occ) as f64).sqrt(), 0.0);
        }
        Ok(v)
    }

    /// `I_d ⊗ V ⊗ V`, the embedding of `C^d ⊗ Sym^N ⊗ Sym^N` into the full
    /// `2N+1`-qudit space.
    pub fn pair_embedding(&self, cap: usize) -> Result<DMatrix<C64>> {
        TensorLayout::with_cap(2 * self.copies + 1, self.d, cap)?;
        let v = self.isometry(cap)?;
        Ok(DMatrix::<C64>::identity(self.d, self.d).kronecker(&v).kronecker(&v))
    }

    /// Coordinates of `|ψ⟩^{⊗N}` in this basis:
    /// `c_n = √(N!/Π n_k!) Π_k ψ_k^{n_k}`.
    pub fn power_coordinates(&self, psi: &DVector<C64>) -> Result<DVector<C64>> {
        if psi.len() != self.d {
            return Err(argument(format!(
                "state of dimension {} does not match d = {}",
                psi.len(),
                self.d
            )));
        }
        Ok(DVector::from_iterator(
            self.len(),
            self.occupations.iter().map(|occ| {
                let weight = (Self::multinomial(occ) as f64).sqrt();
                occ.iter()
                    .zip(psi.iter())
                    .fold(C64::new(weight, 0.0), |acc, (&count, amp)| acc * amp.powu(count as u32))
            }),
        ))
    }
}

fn push_occupations(remaining: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if slots == 1 {
        prefix.push(remaining);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=remaining).rev() {
        prefix.push(first);
        push_occupations(remaining - first, slots - 1, prefix, out);
        prefix.pop();
    }
}

/// Matrix of the symmetrizer `S_{N+1}` on `C^d ⊗ Sym^N`, expressed in the
/// product basis `(k, α)` with `k` most significant.
fn input_symmetrizer(lower: &SymBasis, upper: &SymBasis) -> DMatrix<f64> {
    let d = lower.local_dim();
    let rows = d * lower.len();
    let scale = (upper.copies() as f64).recip();
    let mut w = DMatrix::<f64>::zeros(rows, upper.len());
    let mut reduced = vec![0; d];
    for (col, occ) in upper.occupations().iter().enumerate() {
        for k in (0..d).filter(|&k| occ[k] > 0) {
            reduced.copy_from_slice(occ);
            reduced[k] -= 1;
            let alpha = lower.positions[&reduced];
            w[(k * lower.len() + alpha, col)] = (occ[k] as f64 * scale).sqrt();
        }
    }
    &w * w.transpose()
}

pub(super) fn identification_operator_sym(copies: usize, d: usize, cap: usize) -> Result<DenseOperator> {
    check_local_dim(d)?;
    if copies == 0 {
        return Err(argument("at least one reference copy is required"));
    }
    let lower = SymBasis::new(copies, d)?;
    let sym_dim = lower.len();
    let dim = sym_dim
        .checked_mul(sym_dim)
        .and_then(|x| x.checked_mul(d))
        .ok_or(Error::Size { required: usize::MAX, cap })?;
    if dim > cap {
        return Err(Error::Size { required: dim, cap });
    }
    let upper = SymBasis::new(copies + 1, d)?;
    let q = input_symmetrizer(&lower, &upper);

    let index = |i: usize, alpha: usize, beta: usize| (i * sym_dim + alpha) * sym_dim + beta;
    let mut matrix = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..d {
        for j in 0..d {
            for a in 0..sym_dim {
                for b in 0..sym_dim {
                    let q_first = q[(i * sym_dim + a, j * sym_dim + b)];
                    if q_first != 0.0 {
                        // S_{N+1}(0,1) ⊗ 1 on register 2
                        for other in 0..sym_dim {
                            matrix[(index(i, a, other), index(j, b, other))].re += q_first;
                        }
                        // 1 on register 1 ⊗ S_{N+1}(0,2)
                        for other in 0..sym_dim {
                            matrix[(index(i, other, a), index(j, other, b))].re -= q_first;
                        }
                    }
                }
            }
        }
    }
    hermitize(&mut matrix);
    DenseOperator::new(OperatorSpace::SymmetricPair { copies, d, sym_dim }, matrix, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{max_abs, OperatorBuilder, DEFAULT_DIM_CAP};
    use proptest::prelude::*;

    #[test]
    fn occupations_descend_lexicographically() {
        let basis = SymBasis::new(2, 2).unwrap();
        assert_eq!(basis.occupations(), &[vec![2, 0], vec![1, 1], vec![0, 2]]);
        let basis = SymBasis::new(2, 3).unwrap();
        assert_eq!(basis.len(), 6);
        assert_eq!(basis.occupations()[0], vec![2, 0, 0]);
        assert_eq!(basis.occupations()[5], vec![0, 0, 2]);
        assert!(basis.occupations().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn basis_size_matches_binomial() {
        for n in 0..6 {
            for d in 2..6 {
                let basis = SymBasis::new(n, d).unwrap();
                assert_eq!(basis.len() as u128, sym_dim(n, d).unwrap());
            }
        }
    }

    #[test]
    fn multinomials() {
        assert_eq!(SymBasis::multinomial(&[2, 1]), 3);
        assert_eq!(SymBasis::multinomial(&[1, 1, 1]), 6);
        assert_eq!(SymBasis::multinomial(&[3, 0]), 1);
        assert_eq!(SymBasis::multinomial(&[2, 2, 1]), 30);
    }

    #[test]
    fn isometry_is_orthonormal() {
        for (n, d) in [(1, 2), (2, 2), (3, 2), (2, 3), (3, 3), (2, 4)] {
            let v = SymBasis::new(n, d).unwrap().isometry(DEFAULT_DIM_CAP).unwrap();
            let gram = v.adjoint() * &v;
            let residual = max_abs(&(gram - DMatrix::identity(v.ncols(), v.ncols())));
            assert!(residual < 1e-10, "(N={n}, d={d}): {residual}");
        }
    }

    #[test]
    fn restricted_operator_matches_compressed_full_operator() {
        let builder = OperatorBuilder::default();
        for (n, d) in [(1, 2), (2, 2), (1, 3), (2, 3), (3, 2)] {
            let full = builder.identification_operator(n, d).unwrap();
            let sym = builder.identification_operator_sym(n, d).unwrap();
            let embed = SymBasis::new(n, d).unwrap().pair_embedding(DEFAULT_DIM_CAP).unwrap();
            let compressed = embed.adjoint() * full.matrix() * &embed;
            let residual = max_abs(&(compressed - sym.matrix()));
            assert!(residual < 1e-12, "(N={n}, d={d}): {residual}");
        }
    }

    #[test]
    fn restricted_dimensions() {
        let builder = OperatorBuilder::default();
        assert_eq!(builder.identification_operator_sym(1, 2).unwrap().dim(), 8);
        assert_eq!(builder.identification_operator_sym(2, 2).unwrap().dim(), 18);
        assert_eq!(builder.identification_operator_sym(3, 2).unwrap().dim(), 32);
        assert!(matches!(
            OperatorBuilder::with_cap(100).identification_operator_sym(2, 3),
            Err(Error::Size { required: 108, cap: 100 })
        ));
    }

    fn state_strategy(d: usize) -> impl Strategy<Value = DVector<C64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d).prop_filter_map(
            "nonzero",
            |pairs| {
                let v = DVector::from_iterator(pairs.len(), pairs.into_iter().map(|(re, im)| C64::new(re, im)));
                let norm = v.norm();
                (norm > 1e-3).then(|| v / C64::from(norm))
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn power_coordinates_embed_to_tensor_power(psi in state_strategy(3)) {
            let basis = SymBasis::new(3, 3).unwrap();
            let v = basis.isometry(DEFAULT_DIM_CAP).unwrap();
            let coords = basis.power_coordinates(&psi).unwrap();
            let power = psi.kronecker(&psi).kronecker(&psi);
            let residual = (v * coords - power).norm();
            prop_assert!(residual < 1e-12);
        }
    }
}
