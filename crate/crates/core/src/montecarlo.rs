//! Seeded Monte Carlo estimates over Haar-random pure states.
//!
//! # Random streams
//!
//! Worker `k` draws from `ChaCha8Rng::seed_from_u64(seed)` with
//! `set_stream(k)`. Worker `k` runs `⌊T/K⌋` trials, plus one more when
//! `k < T mod K`. Per-worker mean and sum of squared deviations are merged in
//! worker order. An estimate is therefore a deterministic function of
//! `(seed, trials, workers)`. The single-worker result is the reference.
//!
//! Gaussians come from `rand_distr::StandardNormal` (ziggurat). A Haar state
//! draws `d` complex amplitudes, real part then imaginary part, and
//! normalizes. Within an identification trial the order is `ψ₁`, `ψ₂`, the
//! label bit, then (in outcome mode) the measurement uniform.

use std::thread;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{argument, Result};
use crate::spectral::{build_optimal_povm, Povm};
use crate::tensor::{check_local_dim, OperatorBuilder, PureState, DEFAULT_DIM_CAP};
use crate::C64;

/// Smallest accepted trial count.
pub const MIN_TRIALS: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

/// Sample mean with its standard error `s / √T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: Seed,
    pub workers: usize,
}

impl Estimate {
    /// `(mean - target) / stderr`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target) / self.stderr
    }
}

/// How an identification trial is scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Exact conditional success probability `⟨Ψ|E_a|Ψ⟩` of the trial.
    #[default]
    Conditional,
    /// A sampled measurement outcome scored 0 or 1.
    Outcome,
}

/// Entrywise estimate of `⟨ρ^{⊗n}⟩` with separate standard errors for the
/// real and imaginary parts.
#[derive(Clone, Debug)]
pub struct MomentEstimate {
    pub mean: DMatrix<C64>,
    pub stderr_re: DMatrix<f64>,
    pub stderr_im: DMatrix<f64>,
    pub trials: u64,
    pub seed: Seed,
}

/// `d` i.i.d. standard complex Gaussians, normalized.
pub fn sample_haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    assert!(d >= 2, "local dimension must be at least 2");
    loop {
        let amplitudes = DVector::from_iterator(d, (0..d).map(|_| gaussian(rng)));
        if let Ok(state) = PureState::normalized(amplitudes) {
            return state;
        }
    }
}

/// Haar-random `d × d` unitary from the QR decomposition of a complex
/// Ginibre matrix, with the phases of `R`'s diagonal absorbed into `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let ginibre = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (k, mut col) in q.column_iter_mut().enumerate() {
        let diag = r[(k, k)];
        let norm = diag.norm();
        if norm > 0.0 {
            col *= diag / C64::from(norm);
        }
    }
    q
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Running mean and sum of squared deviations, per component.
#[derive(Clone, Debug)]
struct Welford {
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Welford {
    fn new(len: usize) -> Self {
        Self { count: 0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    fn push(&mut self, x: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((mean, m2), &x) in self.mean.iter_mut().zip(&mut self.m2).zip(x) {
            let delta = x - *mean;
            *mean += delta / n;
            *m2 += delta * (x - *mean);
        }
    }

    fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        for k in 0..self.mean.len() {
            let delta = other.mean[k] - self.mean[k];
            self.mean[k] += delta * nb / n;
            self.m2[k] += other.m2[k] + delta * delta * na * nb / n;
        }
        self.count += other.count;
    }

    fn stderr(&self, k: usize) -> f64 {
        let n = self.count as f64;
        (self.m2[k] / (n - 1.0)).sqrt() / n.sqrt()
    }
}

/// Trial count, seed, worker count, dimension cap and an optional fixed
/// unitary applied to every sampled state.
#[derive(Clone, Debug)]
pub struct MonteCarlo {
    trials: u64,
    seed: Seed,
    workers: usize,
    cap: usize,
    twist: Option<DMatrix<C64>>,
}

impl MonteCarlo {
    pub fn new(trials: u64, seed: Seed) -> Self {
        Self { trials, seed, workers: 1, cap: DEFAULT_DIM_CAP, twist: None }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// Applies `U` to every sampled reference state, i.e. `U^{⊗n}` to every
    /// product state.
    pub fn twist(mut self, unitary: DMatrix<C64>) -> Self {
        self.twist = Some(unitary);
        self
    }

    fn validate(&self, d: usize) -> Result<()> {
        check_local_dim(d)?;
        if self.trials < MIN_TRIALS {
            return Err(argument(format!(
                "at least {MIN_TRIALS} trials are required, got {}",
                self.trials
            )));
        }
        if self.workers == 0 || self.workers as u64 > self.trials {
            return Err(argument(format!(
                "worker count must be in 1..={}, got {}",
                self.trials, self.workers
            )));
        }
        if let Some(u) = &self.twist {
            if u.nrows() != d || u.ncols() != d {
                return Err(argument(format!(
                    "twist is {}x{} but d = {d}",
                    u.nrows(),
                    u.ncols()
                )));
            }
        }
        Ok(())
    }

    fn draw_state(&self, d: usize, rng: &mut ChaCha8Rng) -> DVector<C64> {
        let psi = sample_haar_state(d, rng).amplitudes().clone();
        match &self.twist {
            Some(u) => u * psi,
            None => psi,
        }
    }

    fn run<F>(&self, len: usize, trial: F) -> Welford
    where
        F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
    {
        let workers = self.workers as u64;
        let base = self.trials / workers;
        let extra = self.trials % workers;
        let work = |k: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed.0);
            rng.set_stream(k);
            let mut acc = Welford::new(len);
            let mut sample = vec![0.0; len];
            for _ in 0..base + u64::from(k < extra) {
                trial(&mut rng, &mut sample);
                acc.push(&sample);
            }
            acc
        };
        let parts: Vec<Welford> = if workers == 1 {
            vec![work(0)]
        } else {
            thread::scope(|scope| {
                let handles: Vec<_> =
                    (0..workers).map(|k| scope.spawn(move || work(k))).collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            })
        };
        let mut total = Welford::new(len);
        for part in &parts {
            total.merge(part);
        }
        total
    }

    fn scalar(&self, acc: Welford) -> Estimate {
        Estimate {
            mean: acc.mean[0],
            stderr: acc.stderr(0),
            trials: acc.count,
            seed: self.seed,
            workers: self.workers,
        }
    }

    /// Mean Helstrom success `½(1 + √(1 - |⟨ψ₁|ψ₂⟩|²))` over Haar pairs.
    pub fn discrimination(&self, d: usize) -> Result<Estimate> {
        self.validate(d)?;
        let acc = self.run(1, |rng, out| {
            let a = self.draw_state(d, rng);
            let b = self.draw_state(d, rng);
            let overlap = a.dotc(&b).norm_sqr();
            out[0] = 0.5 * (1.0 + (1.0 - overlap).max(0.0).sqrt());
        });
        Ok(self.scalar(acc))
    }

    /// Identification with one input copy and `N` reference copies under the
    /// optimal measurement.
    pub fn identification(&self, copies: usize, d: usize, mode: Mode) -> Result<Estimate> {
        self.mcopy(1, copies, d, mode)
    }

    /// Identification with `M` input copies and `N` reference copies under the
    /// optimal measurement for that setting.
    pub fn mcopy(&self, inputs: usize, copies: usize, d: usize, mode: Mode) -> Result<Estimate> {
        self.validate(d)?;
        let d_op = OperatorBuilder::with_cap(self.cap).mcopy_operator(inputs, copies, d)?;
        let povm = build_optimal_povm(&d_op, None)?;
        Ok(self.identification_with(&povm, inputs, copies, d, mode))
    }

    fn identification_with(
        &self,
        povm: &Povm,
        inputs: usize,
        copies: usize,
        d: usize,
        mode: Mode,
    ) -> Estimate {
        let e1 = povm.e1();
        let acc = self.run(1, |rng, out| {
            let first = self.draw_state(d, rng);
            let second = self.draw_state(d, rng);
            let label_first = rng.random_bool(0.5);
            let input = if label_first { &first } else { &second };
            let product = tensor_power(input, inputs)
                .kronecker(&tensor_power(&first, copies))
                .kronecker(&tensor_power(&second, copies));
            let p_first = e1
                .expectation(&product)
                .expect("product state matches the POVM space")
                .re
                .clamp(0.0, 1.0);
            out[0] = match mode {
                Mode::Conditional => {
                    if label_first {
                        p_first
                    } else {
                        1.0 - p_first
                    }
                }
                Mode::Outcome => {
                    let guessed_first = rng.random::<f64>() < p_first;
                    f64::from(u8::from(guessed_first == label_first))
                }
            };
        });
        self.scalar(acc)
    }

    /// Entrywise sample mean of `ρ^{⊗n}` for Haar-random `ρ = |ψ⟩⟨ψ|`.
    pub fn moment(&self, copies: usize, d: usize) -> Result<MomentEstimate> {
        self.validate(d)?;
        let layout = OperatorBuilder::with_cap(self.cap).layout(copies, d)?;
        let dim = layout.dim();
        let acc = self.run(2 * dim * dim, |rng, out| {
            let power = tensor_power(&self.draw_state(d, rng), copies);
            for j in 0..dim {
                for i in 0..dim {
                    let z = power[i] * power[j].conj();
                    let k = 2 * (j * dim + i);
                    out[k] = z.re;
                    out[k + 1] = z.im;
                }
            }
        });
        let at = |i: usize, j: usize| 2 * (j * dim + i);
        Ok(MomentEstimate {
            mean: DMatrix::from_fn(dim, dim, |i, j| {
                C64::new(acc.mean[at(i, j)], acc.mean[at(i, j) + 1])
            }),
            stderr_re: DMatrix::from_fn(dim, dim, |i, j| acc.stderr(at(i, j))),
            stderr_im: DMatrix::from_fn(dim, dim, |i, j| acc.stderr(at(i, j) + 1)),
            trials: acc.count,
            seed: self.seed,
        })
    }
}

fn tensor_power(psi: &DVector<C64>, times: usize) -> DVector<C64> {
    let mut out = psi.clone();
    for _ in 1..times {
        out = out.kronecker(psi);
    }
    out
}

/// Mean Helstrom success over Haar pairs, single worker.
pub fn estimate_discrimination(d: usize, trials: u64, seed: Seed) -> Result<Estimate> {
    MonteCarlo::new(trials, seed).discrimination(d)
}

/// Optimal identification success for `N` reference copies, single worker.
pub fn estimate_identification(
    copies: usize,
    d: usize,
    trials: u64,
    seed: Seed,
    mode: Mode,
) -> Result<Estimate> {
    MonteCarlo::new(trials, seed).identification(copies, d, mode)
}

/// Optimal identification success for `M` inputs and `N` references,
/// conditional mode, single worker.
pub fn estimate_mcopy(
    inputs: usize,
    copies: usize,
    d: usize,
    trials: u64,
    seed: Seed,
) -> Result<Estimate> {
    MonteCarlo::new(trials, seed).mcopy(inputs, copies, d, Mode::Conditional)
}
