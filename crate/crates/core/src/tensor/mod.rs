//! Dense operators on qudit tensor-product spaces.
//!
//! Everything here is built from permutation operators: total symmetrizers,
//! the antisymmetrizer, the reference-exchange operator, and the
//! identification operator
//!
//! ```text
//! D = S_{N+M}(0,1) S_N(2) - S_N(1) S_{N+M}(0,2)
//! ```
//!
//! where register 0 holds the `M` input copies and registers 1 and 2 hold the
//! `N` copies of each reference.

mod dump;
mod permutation;
mod symmetric;

use std::ops::Range;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::error::{argument, Error, Result};
use crate::C64;

pub use dump::{read_dump, write_dump, DUMP_MAGIC};
pub use permutation::Permutation;
pub use symmetric::SymBasis;

/// Default cap on the total dimension of any dense operator.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// `n` subsystems of local dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TensorLayout {
    n: usize,
    d: usize,
    dim: usize,
}

impl TensorLayout {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        Self::with_cap(n, d, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(n: usize, d: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(argument("a layout needs at least one subsystem"));
        }
        check_local_dim(d)?;
        let dim = u32::try_from(n)
            .ok()
            .and_then(|n| d.checked_pow(n))
            .ok_or(Error::Size { required: usize::MAX, cap })?;
        if dim > cap {
            return Err(Error::Size { required: dim, cap });
        }
        Ok(Self { n, d, dim })
    }

    pub fn subsystems(&self) -> usize {
        self.n
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    /// Total dimension `d^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Composite index of `|digits[0] … digits[n-1]⟩`.
    pub fn index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.n);
        digits.iter().fold(0, |acc, &digit| acc * self.d + digit)
    }

    /// Inverse of [`TensorLayout::index`], written into `out`.
    pub fn digits_into(&self, mut index: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.n);
        for slot in out.iter_mut().rev() {
            *slot = index % self.d;
            index /= self.d;
        }
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        self.digits_into(index, &mut out);
        out
    }
}

pub(crate) fn check_local_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(argument(format!("local dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// The space a [`DenseOperator`] acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorSpace {
    /// The full tensor product `(C^d)^{⊗n}`.
    Tensor(TensorLayout),
    /// `C^d ⊗ Sym^N(C^d) ⊗ Sym^N(C^d)`, indexed as `(i, α, β)` with `i` most
    /// significant and `α`, `β` positions in the [`SymBasis`] for `(N, d)`.
    SymmetricPair { copies: usize, d: usize, sym_dim: usize },
    /// A bare matrix with no tensor structure attached.
    Plain(usize),
}

impl OperatorSpace {
    pub fn dim(&self) -> usize {
        match *self {
            OperatorSpace::Tensor(layout) => layout.dim(),
            OperatorSpace::SymmetricPair { d, sym_dim, .. } => d * sym_dim * sym_dim,
            OperatorSpace::Plain(dim) => dim,
        }
    }
}

/// A square complex matrix together with the space it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    space: OperatorSpace,
    matrix: DMatrix<C64>,
    hermitian_hint: bool,
}

/// Relative tolerance enforced on operators flagged Hermitian.
const HERMITIAN_HINT_TOL: f64 = 1e-12;

impl DenseOperator {
    /// Wraps `matrix`. When `hermitian_hint` is set the matrix must be
    /// Hermitian to within `1e-12` of its largest entry.
    pub fn new(space: OperatorSpace, matrix: DMatrix<C64>, hermitian_hint: bool) -> Result<Self> {
        let dim = space.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(argument(format!(
                "matrix is {}x{} but the space has dimension {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let op = Self { space, matrix, hermitian_hint };
        if hermitian_hint {
            let scale = op.max_abs();
            let residual = op.hermitian_residual();
            if residual > HERMITIAN_HINT_TOL * scale {
                return Err(Error::Contract(format!(
                    "operator flagged Hermitian has |A - A†|max = {residual:e}"
                )));
            }
        }
        Ok(op)
    }

    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(argument("operator matrix must be square"));
        }
        let dim = matrix.nrows();
        Self::new(OperatorSpace::Plain(dim), matrix, false)
    }

    pub fn identity(space: OperatorSpace) -> Self {
        let dim = space.dim();
        Self { space, matrix: DMatrix::identity(dim, dim), hermitian_hint: true }
    }

    pub fn space(&self) -> OperatorSpace {
        self.space
    }

    pub fn layout(&self) -> Option<TensorLayout> {
        match self.space {
            OperatorSpace::Tensor(layout) => Some(layout),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// `max |A - A†|` over entries.
    pub fn hermitian_residual(&self) -> f64 {
        let m = &self.matrix;
        let n = m.nrows();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Product `self · rhs`; both operands must act on the same space.
    pub fn compose(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_space(rhs)?;
        Ok(Self { space: self.space, matrix: &self.matrix * &rhs.matrix, hermitian_hint: false })
    }

    /// Anticommutator `self · rhs + rhs · self`.
    pub fn anticommutator(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_space(rhs)?;
        let matrix = &self.matrix * &rhs.matrix + &rhs.matrix * &self.matrix;
        Ok(Self { space: self.space, matrix, hermitian_hint: false })
    }

    /// `⟨ψ|A|ψ⟩` for a vector in this operator's space.
    pub fn expectation(&self, psi: &DVector<C64>) -> Result<C64> {
        if psi.len() != self.dim() {
            return Err(argument(format!(
                "vector of length {} does not match operator dimension {}",
                psi.len(),
                self.dim()
            )));
        }
        Ok(psi.dotc(&(&self.matrix * psi)))
    }

    fn check_same_space(&self, rhs: &DenseOperator) -> Result<()> {
        if self.space != rhs.space {
            return Err(argument(format!(
                "operators act on different spaces: {:?} vs {:?}",
                self.space, rhs.space
            )));
        }
        Ok(())
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// A unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
}

const NORM_TOL: f64 = 1e-12;

impl PureState {
    /// Fails unless the amplitudes have unit norm to within `1e-12`.
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        check_local_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(argument(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `amplitudes`; fails on a zero vector.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        check_local_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(argument("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self { amplitudes: amplitudes / C64::from(norm) })
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        check_local_dim(d)?;
        if k >= d {
            return Err(argument(format!("basis index {k} out of range for d = {d}")));
        }
        let mut amplitudes = DVector::zeros(d);
        amplitudes[k] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap_sq(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }

    /// `U|ψ⟩` for a `d × d` unitary.
    pub fn transformed(&self, unitary: &DMatrix<C64>) -> Result<PureState> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(argument("unitary does not match the state dimension"));
        }
        PureState::new(unitary * &self.amplitudes)
    }
}

/// A unit vector on a [`TensorLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    layout: TensorLayout,
    amplitudes: DVector<C64>,
}

impl ProductState {
    pub fn layout(&self) -> TensorLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }
}

/// Tensor product `states[0] ⊗ states[1] ⊗ …` in the layout's index
/// convention, under the default dimension cap.
pub fn embed_product_state(states: &[&PureState]) -> Result<ProductState> {
    OperatorBuilder::default().embed_product_state(states)
}

/// `(1/|subset|!) Σ_π P(π)` over all permutations of `subset`.
pub fn symmetrizer(layout: TensorLayout, subset: &[usize]) -> Result<DenseOperator> {
    signed_average(layout, subset, false)
}

/// `(1/|subset|!) Σ_π sgn(π) P(π)` over all permutations of `subset`.
pub fn antisymmetrizer(layout: TensorLayout, subset: &[usize]) -> Result<DenseOperator> {
    signed_average(layout, subset, true)
}

/// Permutation operator `P(σ)`: the content of slot `k` moves to slot `σ(k)`.
pub fn permutation_operator(layout: TensorLayout, perm: &Permutation) -> Result<DenseOperator> {
    check_perm_len(layout, perm)?;
    let dim = layout.dim();
    let mut matrix = DMatrix::zeros(dim, dim);
    let mut scratch = PermScratch::new(layout);
    for col in 0..dim {
        let row = scratch.permuted_index(perm, col);
        matrix[(row, col)] = C64::new(1.0, 0.0);
    }
    DenseOperator::new(OperatorSpace::Tensor(layout), matrix, false)
}

fn check_perm_len(layout: TensorLayout, perm: &Permutation) -> Result<()> {
    if perm.len() != layout.subsystems() {
        return Err(argument(format!(
            "permutation acts on {} items but the layout has {} subsystems",
            perm.len(),
            layout.subsystems()
        )));
    }
    Ok(())
}

struct PermScratch {
    layout: TensorLayout,
    digits: Vec<usize>,
    moved: Vec<usize>,
}

impl PermScratch {
    fn new(layout: TensorLayout) -> Self {
        let n = layout.subsystems();
        Self { layout, digits: vec![0; n], moved: vec![0; n] }
    }

    fn permuted_index(&mut self, perm: &Permutation, index: usize) -> usize {
        self.layout.digits_into(index, &mut self.digits);
        for (k, &digit) in self.digits.iter().enumerate() {
            self.moved[perm.image(k)] = digit;
        }
        self.layout.index(&self.moved)
    }
}

fn validate_subset(layout: TensorLayout, subset: &[usize]) -> Result<()> {
    if subset.is_empty() {
        return Err(argument("subset of subsystems must be nonempty"));
    }
    if let Some(&bad) = subset.iter().find(|&&k| k >= layout.subsystems()) {
        return Err(argument(format!(
            "subsystem {bad} out of range for {} subsystems",
            layout.subsystems()
        )));
    }
    if subset.iter().duplicates().next().is_some() {
        return Err(argument("subset contains a repeated subsystem"));
    }
    Ok(())
}

fn signed_average(layout: TensorLayout, subset: &[usize], signed: bool) -> Result<DenseOperator> {
    validate_subset(layout, subset)?;
    let n = layout.subsystems();
    let dim = layout.dim();
    let mut matrix = DMatrix::<C64>::zeros(dim, dim);
    let mut scratch = PermScratch::new(layout);
    let mut count = 0usize;
    for arrangement in subset.iter().copied().permutations(subset.len()) {
        let mut images: Vec<usize> = (0..n).collect();
        for (&from, &to) in subset.iter().zip(&arrangement) {
            images[from] = to;
        }
        let perm = Permutation::new(images)?;
        let weight = if signed { f64::from(perm.sign()) } else { 1.0 };
        for col in 0..dim {
            let row = scratch.permuted_index(&perm, col);
            matrix[(row, col)].re += weight;
        }
        count += 1;
    }
    matrix.unscale_mut(count as f64);
    DenseOperator::new(OperatorSpace::Tensor(layout), matrix, true)
}

/// Register layout for `M` input copies and two `N`-copy references:
/// slots `0..M` are the input, then the first reference, then the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Registers {
    pub inputs: usize,
    pub copies: usize,
}

impl Registers {
    pub fn new(inputs: usize, copies: usize) -> Result<Self> {
        if inputs == 0 {
            return Err(argument("at least one input copy is required"));
        }
        if copies == 0 {
            return Err(argument("at least one reference copy is required"));
        }
        Ok(Self { inputs, copies })
    }

    pub fn subsystems(&self) -> usize {
        self.inputs + 2 * self.copies
    }

    pub fn input(&self) -> Range<usize> {
        0..self.inputs
    }

    pub fn first(&self) -> Range<usize> {
        self.inputs..self.inputs + self.copies
    }

    pub fn second(&self) -> Range<usize> {
        self.inputs + self.copies..self.subsystems()
    }
}

/// Builds the named operators under a configurable dimension cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OperatorBuilder {
    cap: usize,
}

impl Default for OperatorBuilder {
    fn default() -> Self {
        Self { cap: DEFAULT_DIM_CAP }
    }
}

impl OperatorBuilder {
    pub fn with_cap(cap: usize) -> Self {
        Self { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn layout(&self, n: usize, d: usize) -> Result<TensorLayout> {
        TensorLayout::with_cap(n, d, self.cap)
    }

    /// `D = S_{N+1}(0,1) S_N(2) - S_N(1) S_{N+1}(0,2)` on `2N+1` subsystems.
    pub fn identification_operator(&self, copies: usize, d: usize) -> Result<DenseOperator> {
        self.mcopy_operator(1, copies, d)
    }

    /// `S_{N+M}(0,1) S_N(2) - S_N(1) S_{N+M}(0,2)` on `M+2N` subsystems.
    pub fn mcopy_operator(&self, inputs: usize, copies: usize, d: usize) -> Result<DenseOperator> {
        let regs = Registers::new(inputs, copies)?;
        let layout = self.layout(regs.subsystems(), d)?;
        let input_first: Vec<usize> = regs.input().chain(regs.first()).collect();
        let input_second: Vec<usize> = regs.input().chain(regs.second()).collect();
        let first: Vec<usize> = regs.first().collect();
        let second: Vec<usize> = regs.second().collect();

        let s01 = symmetrizer(layout, &input_first)?;
        let s2 = symmetrizer(layout, &second)?;
        let s1 = symmetrizer(layout, &first)?;
        let s02 = symmetrizer(layout, &input_second)?;
        let mut matrix = s01.matrix() * s2.matrix() - s1.matrix() * s02.matrix();
        // The two products are Hermitian exactly; strip round-off asymmetry.
        hermitize(&mut matrix);
        DenseOperator::new(OperatorSpace::Tensor(layout), matrix, true)
    }

    /// `D` restricted to `C^d ⊗ Sym^N ⊗ Sym^N`.
    pub fn identification_operator_sym(&self, copies: usize, d: usize) -> Result<DenseOperator> {
        symmetric::identification_operator_sym(copies, d, self.cap)
    }

    /// Exchange `T(1,2) = Π_i T(1_i, 2_i)` of the two reference registers.
    pub fn reference_exchange(&self, inputs: usize, copies: usize, d: usize) -> Result<DenseOperator> {
        let regs = Registers::new(inputs, copies)?;
        let layout = self.layout(regs.subsystems(), d)?;
        let mut images: Vec<usize> = (0..regs.subsystems()).collect();
        for (a, b) in regs.first().zip(regs.second()) {
            images.swap(a, b);
        }
        permutation_operator(layout, &Permutation::new(images)?)
    }

    pub fn embed_product_state(&self, states: &[&PureState]) -> Result<ProductState> {
        let first = states.first().ok_or_else(|| argument("no states to embed"))?;
        let d = first.dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != d) {
            return Err(argument(format!(
                "mixed local dimensions: {d} and {}",
                bad.dim()
            )));
        }
        let layout = self.layout(states.len(), d)?;
        let mut amplitudes = first.amplitudes().clone();
        for state in &states[1..] {
            amplitudes = amplitudes.kronecker(state.amplitudes());
        }
        Ok(ProductState { layout, amplitudes })
    }
}

/// Replaces `m` by `(m + m†)/2`.
pub(crate) fn hermitize(m: &mut DMatrix<C64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in 0..j {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(j, j)].im = 0.0;
    }
}

/// `D` for `N` reference copies and one input, under the default cap.
pub fn build_identification_operator(copies: usize, d: usize) -> Result<DenseOperator> {
    OperatorBuilder::default().identification_operator(copies, d)
}

/// Symmetric-subspace restriction of `D`, under the default cap.
pub fn build_identification_operator_sym(copies: usize, d: usize) -> Result<DenseOperator> {
    OperatorBuilder::default().identification_operator_sym(copies, d)
}

/// `M`-input generalisation of `D`, under the default cap.
pub fn build_mcopy_operator(inputs: usize, copies: usize, d: usize) -> Result<DenseOperator> {
    OperatorBuilder::default().mcopy_operator(inputs, copies, d)
}
