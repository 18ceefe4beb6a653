//! Exact formulas for mean discrimination and identification probabilities.
//!
//! Identification with `N` reference copies reduces to a sum over the two-row
//! Young diagrams `[λ₁, λ₂]`, `λ₁ + λ₂ = 2N + 1`, `N + 1 ≤ λ₁ ≤ 2N`. Each
//! diagram contributes `±Δ` eigenvalues of the identification operator with
//! the `U(d)` multiplicity of the diagram. Combinatorial factors are exact
//! integers (`u128`, overflow-checked); only the square roots are floating
//! point.

use crate::error::{argument, Error, Result};

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(argument(format!("local dimension must be at least 2, got {d}")));
    }
    Ok(())
}

fn check_copies(copies: usize) -> Result<()> {
    if copies == 0 {
        return Err(argument("at least one reference copy is required"));
    }
    Ok(())
}

fn overflow(what: &str) -> Error {
    Error::Range(format!("{what} does not fit in 128 bits"))
}

/// `C(n, k)` with overflow checking.
fn binomial(n: u128, k: u128) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 1..=k {
        // acc * (n - k + i) is divisible by i at every step.
        acc = acc.checked_mul(n - k + i).ok_or_else(|| overflow("binomial coefficient"))? / i;
    }
    Ok(acc)
}

/// Dimension `C(n + d - 1, d - 1)` of the symmetric subspace of `n` qudits.
pub fn sym_dim(n: usize, d: usize) -> Result<u128> {
    check_dim(d)?;
    binomial((n + d - 1) as u128, (d - 1) as u128)
}

/// Mean trace distance `(d - 1)/(d - ½)` between two Haar-random pure states.
pub fn mean_trace_distance(d: usize) -> Result<f64> {
    check_dim(d)?;
    let d = d as f64;
    Ok((d - 1.0) / (d - 0.5))
}

/// Mean Helstrom success probability `½ + (d - 1)/(2d - 1)` for two known
/// Haar-random pure states.
pub fn p_disc_mean(d: usize) -> Result<f64> {
    check_dim(d)?;
    let d = d as f64;
    Ok(0.5 + (d - 1.0) / (2.0 * d - 1.0))
}

/// Single-copy identification optimum `½ + √3 (d - 1)/(6d)`.
pub fn p_ident_n1(d: usize) -> Result<f64> {
    check_dim(d)?;
    let d = d as f64;
    Ok(0.5 + 3f64.sqrt() * (d - 1.0) / (6.0 * d))
}

/// Positive eigenvalue `δ^(J) = √(1 - ((J + ½)/(N + 1))²)` of the qubit
/// identification operator, with `J` passed as `twice_j = 2J`.
///
/// `twice_j` must be odd and lie in `1..=2N-1`.
pub fn delta_qubit(twice_j: usize, copies: usize) -> Result<f64> {
    check_copies(copies)?;
    if twice_j % 2 == 0 || twice_j > 2 * copies - 1 {
        return Err(argument(format!(
            "J = {twice_j}/2 is outside {{1/2, …, {copies} - 1/2}}"
        )));
    }
    // (J + ½)/(N + 1) = b/a with integers a, b; √(a² - b²)/a avoids cancellation.
    let a = 2.0 * (copies as f64 + 1.0);
    let b = twice_j as f64 + 1.0;
    Ok(((a - b) * (a + b)).sqrt() / a)
}

/// Young diagram with two rows for `2N + 1` boxes and a first row of at
/// least `N + 1` and at most `2N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TwoRowDiagram {
    lambda1: usize,
    lambda2: usize,
    copies: usize,
}

impl TwoRowDiagram {
    pub fn new(lambda1: usize, lambda2: usize, copies: usize) -> Result<Self> {
        check_copies(copies)?;
        if lambda1 + lambda2 != 2 * copies + 1 || lambda1 < copies + 1 || lambda1 > 2 * copies {
            return Err(argument(format!(
                "[{lambda1}, {lambda2}] is not a two-row diagram for N = {copies}"
            )));
        }
        Ok(Self { lambda1, lambda2, copies })
    }

    /// All diagrams for `N` copies, by increasing first row.
    pub fn all(copies: usize) -> Result<impl Iterator<Item = TwoRowDiagram>> {
        check_copies(copies)?;
        Ok((copies + 1..=2 * copies).map(move |lambda1| TwoRowDiagram {
            lambda1,
            lambda2: 2 * copies + 1 - lambda1,
            copies,
        }))
    }

    pub fn lambda1(&self) -> usize {
        self.lambda1
    }

    pub fn lambda2(&self) -> usize {
        self.lambda2
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// `2J = λ₁ - λ₂`, the total spin label of the diagram at `d = 2`.
    pub fn twice_j(&self) -> usize {
        self.lambda1 - self.lambda2
    }

    /// Positive eigenvalue `√(1 - ((λ₁ - N)/(N + 1))²)` attached to the diagram.
    pub fn delta(&self) -> f64 {
        delta_qubit(self.twice_j(), self.copies).expect("valid diagram has a valid J")
    }
}

/// Multiplicity `m_[λ₁,λ₂](d)` of the diagram in `(C^d)^{⊗(2N+1)}`, i.e. the
/// dimension of the corresponding `U(d)` irrep:
///
/// `(λ₁+d-1)! (λ₂+d-2)! (λ₁-λ₂+1) / ((d-1)! (d-2)! (λ₁+1)! λ₂!)`.
pub fn two_row_multiplicity(diagram: &TwoRowDiagram, d: usize) -> Result<u128> {
    check_dim(d)?;
    let l1 = diagram.lambda1 as u128;
    let l2 = diagram.lambda2 as u128;
    let d = d as u128;
    // = C(λ₁+d-1, d-1) · C(λ₂+d-2, d-2) · (λ₁-λ₂+1) / (λ₁+1)
    let numerator = binomial(l1 + d - 1, d - 1)?
        .checked_mul(binomial(l2 + d - 2, d - 2)?)
        .and_then(|x| x.checked_mul(l1 - l2 + 1))
        .ok_or_else(|| overflow("diagram multiplicity"))?;
    debug_assert_eq!(numerator % (l1 + 1), 0);
    Ok(numerator / (l1 + 1))
}

/// One diagram's contribution to the identification probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagramTerm {
    pub diagram: TwoRowDiagram,
    pub multiplicity: u128,
    pub delta: f64,
}

/// A probability together with the per-diagram breakdown that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityResult {
    pub value: f64,
    pub terms: Vec<DiagramTerm>,
}

/// Optimal mean identification probability for `N` reference copies in
/// dimension `d`:
///
/// `½ + (1/(2 d_{N+1} d_N)) Σ_{λ₁=N+1}^{2N} m_[λ₁,λ₂](d) √(1 - ((λ₁-N)/(N+1))²)`.
pub fn p_ident_general(copies: usize, d: usize) -> Result<ProbabilityResult> {
    check_copies(copies)?;
    check_dim(d)?;
    let terms = TwoRowDiagram::all(copies)?
        .map(|diagram| {
            Ok(DiagramTerm {
                diagram,
                multiplicity: two_row_multiplicity(&diagram, d)?,
                delta: diagram.delta(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let norm = sym_dim(copies + 1, d)?
        .checked_mul(sym_dim(copies, d)?)
        .ok_or_else(|| overflow("normalization"))? as f64;
    let sum: f64 = terms.iter().map(|t| t.multiplicity as f64 * t.delta).sum();
    Ok(ProbabilityResult { value: 0.5 + sum / (2.0 * norm), terms })
}

/// Qubit identification optimum,
/// `½ + (1/(2(N+1)(N+2))) Σ_{J=½}^{N-½} (2J+1) δ^(J)`.
pub fn p_ident_qubit(copies: usize) -> Result<f64> {
    check_copies(copies)?;
    let mut sum = 0.0;
    for twice_j in (1..2 * copies).step_by(2) {
        sum += (twice_j + 1) as f64 * delta_qubit(twice_j, copies)?;
    }
    let n = copies as f64;
    Ok(0.5 + sum / (2.0 * (n + 1.0) * (n + 2.0)))
}

/// Large-`N` limit of the identification optimum, `½ + (d - 1)/(2d - 1)`.
pub fn p_ident_limit(d: usize) -> Result<f64> {
    p_disc_mean(d)
}

/// Numerical value of `(d - 1) ∫₀¹ x (1 - x²)^{d - 3/2} dx` by adaptive
/// Simpson quadrature (absolute tolerance `1e-9`). Equals `(d - 1)/(2d - 1)`.
pub fn limit_integral(d: usize) -> Result<f64> {
    check_dim(d)?;
    let exponent = d as f64 - 1.5;
    let scale = d as f64 - 1.0;
    let f = |x: f64| scale * x * (1.0 - x * x).max(0.0).powf(exponent);
    Ok(adaptive_simpson(&f, 0.0, 1.0, 1e-9))
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
