use std::fs::File;
use std::io::BufWriter;

use qident_core::closed_form::{p_disc_mean, p_ident_general, sym_dim, two_row_multiplicity};
use qident_core::spectral::{
    build_optimal_povm, eig_hermitian, levels, probability_from_operator, trace_norm,
};
use qident_core::tensor::write_dump;
use qident_core::{DenseOperator, MonteCarlo, OperatorBuilder, Result, Seed, TwoRowDiagram};
use serde::Serialize;

use crate::args::{McopySize, SimulateArgs, Size, SpectrumArgs, SweepArgs};
use crate::output::{float, opt_float, Report};

#[derive(Debug, Serialize)]
pub struct Term {
    lambda1: usize,
    lambda2: usize,
    multiplicity: u128,
    delta: f64,
}

#[derive(Debug, Serialize)]
pub struct ExactReport {
    #[serde(rename = "N")]
    copies: usize,
    d: usize,
    p_ident: f64,
    p_disc: f64,
    gap: f64,
    terms: Vec<Term>,
}

pub fn exact(size: &Size) -> Result<ExactReport> {
    let result = p_ident_general(size.copies, size.d)?;
    let p_disc = p_disc_mean(size.d)?;
    Ok(ExactReport {
        copies: size.copies,
        d: size.d,
        p_ident: result.value,
        p_disc,
        gap: p_disc - result.value,
        terms: result
            .terms
            .iter()
            .map(|t| Term {
                lambda1: t.diagram.lambda1(),
                lambda2: t.diagram.lambda2(),
                multiplicity: t.multiplicity,
                delta: t.delta,
            })
            .collect(),
    })
}

impl Report for ExactReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["N", "d", "p_ident", "p_disc", "gap", "lambda1", "lambda2", "multiplicity", "delta"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.terms
            .iter()
            .map(|t| {
                vec![
                    self.copies.to_string(),
                    self.d.to_string(),
                    float(self.p_ident),
                    float(self.p_disc),
                    float(self.gap),
                    t.lambda1.to_string(),
                    t.lambda2.to_string(),
                    t.multiplicity.to_string(),
                    float(t.delta),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Serialize)]
pub struct LevelRow {
    value: f64,
    multiplicity: usize,
}

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    #[serde(rename = "N")]
    copies: usize,
    d: usize,
    build: &'static str,
    dim: usize,
    max_deviation: f64,
    levels: Vec<LevelRow>,
    predicted: Vec<Term>,
    predicted_zero_multiplicity: usize,
    dump: Option<String>,
}

pub fn spectrum(args: &SpectrumArgs, cap: usize) -> Result<SpectrumReport> {
    let Size { copies, d } = args.size;
    let builder = OperatorBuilder::with_cap(cap);
    // The dump header only describes full-space operators, so a dump always
    // needs the full build even when the spectrum comes from the restricted one.
    let full = if args.full || args.dump_path.is_some() {
        Some(builder.identification_operator(copies, d)?)
    } else {
        None
    };
    if let (Some(path), Some(op)) = (&args.dump_path, &full) {
        write_dump(op, BufWriter::new(File::create(path)?))?;
        eprintln!("wrote {}", path.display());
    }
    let (build, op) = match full {
        Some(op) if args.full => ("full", op),
        _ => ("sym", builder.identification_operator_sym(copies, d)?),
    };
    eprintln!("diagonalizing the {build} build, dimension {}", op.dim());

    let eig = eig_hermitian(&op)?;
    let mut predicted = Vec::new();
    let mut expected = Vec::with_capacity(op.dim());
    for diagram in TwoRowDiagram::all(copies)? {
        let m = two_row_multiplicity(&diagram, d)?;
        let delta = diagram.delta();
        for _ in 0..m {
            expected.push(delta);
            expected.push(-delta);
        }
        predicted.push(Term {
            lambda1: diagram.lambda1(),
            lambda2: diagram.lambda2(),
            multiplicity: m,
            delta,
        });
    }
    let zeros = op.dim() - expected.len();
    expected.resize(op.dim(), 0.0);
    expected.sort_by(f64::total_cmp);
    let max_deviation = eig
        .eigenvalues
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SpectrumReport {
        copies,
        d,
        build,
        dim: op.dim(),
        max_deviation,
        levels: levels(&eig.eigenvalues, 1e-9 * op.max_abs())
            .into_iter()
            .map(|l| LevelRow { value: l.value, multiplicity: l.multiplicity })
            .collect(),
        predicted,
        predicted_zero_multiplicity: zeros,
        dump: args.dump_path.as_ref().map(|p| p.display().to_string()),
    })
}

impl Report for SpectrumReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["build", "dim", "max_deviation", "kind", "value", "multiplicity"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let row = |kind: &str, value: f64, multiplicity: String| {
            vec![
                self.build.to_string(),
                self.dim.to_string(),
                float(self.max_deviation),
                kind.to_string(),
                float(value),
                multiplicity,
            ]
        };
        let mut rows: Vec<_> = self
            .levels
            .iter()
            .map(|l| row("observed", l.value, l.multiplicity.to_string()))
            .collect();
        for t in &self.predicted {
            rows.push(row("predicted", t.delta, t.multiplicity.to_string()));
            rows.push(row("predicted", -t.delta, t.multiplicity.to_string()));
        }
        rows.push(row("predicted", 0.0, self.predicted_zero_multiplicity.to_string()));
        rows
    }
}

#[derive(Debug, Serialize)]
pub struct PovmReport {
    #[serde(rename = "M")]
    inputs: usize,
    #[serde(rename = "N")]
    copies: usize,
    d: usize,
    dim: usize,
    rank_e1: usize,
    rank_e2: usize,
    bias: f64,
    half_trace_norm: f64,
    p_success: f64,
    completeness_residual: f64,
}

fn full_operator(m: &McopySize, cap: usize) -> Result<DenseOperator> {
    OperatorBuilder::with_cap(cap).mcopy_operator(m.inputs, m.size.copies, m.size.d)
}

fn normalization(m: &McopySize) -> Result<f64> {
    let d = m.size.d;
    Ok(sym_dim(m.size.copies + m.inputs, d)? as f64 * sym_dim(m.size.copies, d)? as f64)
}

pub fn povm(m: &McopySize, cap: usize) -> Result<PovmReport> {
    let op = full_operator(m, cap)?;
    let povm = build_optimal_povm(&op, None)?;
    let bias = povm.bias(&op)?;
    let dim = op.dim();
    let identity = DenseOperator::identity(op.space());
    let completeness_residual = (povm.e1().matrix() + povm.e2().matrix() - identity.matrix())
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()));
    let rank_e1 = povm.e1().trace().re.round() as usize;
    Ok(PovmReport {
        inputs: m.inputs,
        copies: m.size.copies,
        d: m.size.d,
        dim,
        rank_e1,
        rank_e2: dim - rank_e1,
        bias,
        half_trace_norm: 0.5 * trace_norm(&op)?,
        p_success: 0.5 + bias / (2.0 * normalization(m)?),
        completeness_residual,
    })
}

impl Report for PovmReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "M",
            "N",
            "d",
            "dim",
            "rank_e1",
            "rank_e2",
            "bias",
            "half_trace_norm",
            "p_success",
            "completeness_residual",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.inputs.to_string(),
            self.copies.to_string(),
            self.d.to_string(),
            self.dim.to_string(),
            self.rank_e1.to_string(),
            self.rank_e2.to_string(),
            float(self.bias),
            float(self.half_trace_norm),
            float(self.p_success),
            float(self.completeness_residual),
        ]]
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    #[serde(rename = "M")]
    inputs: usize,
    #[serde(rename = "N")]
    copies: usize,
    d: usize,
    mode: &'static str,
    trials: u64,
    seed: u64,
    workers: usize,
    estimate: f64,
    stderr: f64,
    analytic: f64,
    z_score: f64,
}

pub fn simulate(args: &SimulateArgs, cap: usize) -> Result<SimulateReport> {
    let m = &args.size;
    let Size { copies, d } = m.size;
    let analytic = if m.inputs == 1 {
        p_ident_general(copies, d)?.value
    } else {
        probability_from_operator(&full_operator(m, cap)?, m.inputs, copies, d)?
    };
    let est = MonteCarlo::new(args.trials, Seed(args.seed))
        .workers(args.workers)
        .cap(cap)
        .mcopy(m.inputs, copies, d, args.mode.into())?;
    Ok(SimulateReport {
        inputs: m.inputs,
        copies,
        d,
        mode: args.mode.name(),
        trials: est.trials,
        seed: args.seed,
        workers: est.workers,
        estimate: est.mean,
        stderr: est.stderr,
        analytic,
        z_score: est.z_score(analytic),
    })
}

impl Report for SimulateReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "M", "N", "d", "mode", "trials", "seed", "workers", "estimate", "stderr", "analytic",
            "z_score",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.inputs.to_string(),
            self.copies.to_string(),
            self.d.to_string(),
            self.mode.to_string(),
            self.trials.to_string(),
            self.seed.to_string(),
            self.workers.to_string(),
            float(self.estimate),
            float(self.stderr),
            float(self.analytic),
            float(self.z_score),
        ]]
    }
}

#[derive(Debug, Serialize)]
pub struct McopyReport {
    #[serde(rename = "M")]
    inputs: usize,
    #[serde(rename = "N")]
    copies: usize,
    d: usize,
    dim: usize,
    p_max: f64,
    /// Closed form, available for a single input copy only.
    closed_form: Option<f64>,
    consistency: Option<f64>,
}

pub fn mcopy(m: &McopySize, cap: usize) -> Result<McopyReport> {
    let op = full_operator(m, cap)?;
    let p_max = probability_from_operator(&op, m.inputs, m.size.copies, m.size.d)?;
    let closed_form = if m.inputs == 1 {
        Some(p_ident_general(m.size.copies, m.size.d)?.value)
    } else {
        None
    };
    Ok(McopyReport {
        inputs: m.inputs,
        copies: m.size.copies,
        d: m.size.d,
        dim: op.dim(),
        p_max,
        closed_form,
        consistency: closed_form.map(|c| (p_max - c).abs()),
    })
}

impl Report for McopyReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["M", "N", "d", "dim", "p_max", "closed_form", "consistency"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.inputs.to_string(),
            self.copies.to_string(),
            self.d.to_string(),
            self.dim.to_string(),
            float(self.p_max),
            opt_float(self.closed_form),
            opt_float(self.consistency),
        ]]
    }
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    copies: usize,
    d: usize,
    p_ident: f64,
    p_disc: f64,
    gap: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    #[serde(rename = "N_max")]
    n_max: usize,
    rows: Vec<SweepRow>,
}

pub fn sweep(args: &SweepArgs) -> Result<SweepReport> {
    let mut rows = Vec::with_capacity(args.n_max * args.dims.len());
    for &d in &args.dims {
        let p_disc = p_disc_mean(d)?;
        for copies in 1..=args.n_max {
            let p_ident = p_ident_general(copies, d)?.value;
            rows.push(SweepRow { copies, d, p_ident, p_disc, gap: p_disc - p_ident });
        }
    }
    Ok(SweepReport { n_max: args.n_max, rows })
}

impl Report for SweepReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["N", "d", "p_ident", "p_disc", "gap"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.copies.to_string(),
                    r.d.to_string(),
                    float(r.p_ident),
                    float(r.p_disc),
                    float(r.gap),
                ]
            })
            .collect()
    }
}
