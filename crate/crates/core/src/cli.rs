//! Command-line front end: scenario loading, verification suites, flow
//! export and measurement estimates.
//!
//! Exit codes: 0 success, 1 failed check or invariant violation, 2 input error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composition::{
    composite_dimension, entanglement_measure, project_subsystem, projected_evolution_of, BipartiteSystem,
};
use crate::dynamics::{
    cancellation_check, gkls_apply, gkls_split, integrate, phase_damping_generator, FlowConfig, Integrator,
    LindbladGenerator, Trajectory,
};
use crate::error::Error;
use crate::measurement::{gpov_from_observable, pairing_integral, probability_state, PairingEstimate};
use crate::observables::{
    gradient_tangent, hamiltonian_tangent, jordan_bracket, killing_residual, killing_residual_along, poisson_bracket,
    poisson_bracket_with, sl_relation_residuals, star_product, symmetric_bracket, BracketConvention,
    ExpectationFunction, Transport,
};
use crate::operator::{
    c, commutator, eig_hermitian, hermitian_deviation, jordan_product, matrix_from_literal, pauli, tensor_product,
    vector_from_literal, CMatrix, DensityOperator, GeneralOperator, HermitianOperator, MatrixLiteral, Operator,
    Subsystem, VectorLiteral,
};
use crate::projective::{
    amplitude_chart_metric, apply_j, compatibility_residual, metric, pullback_tensor, symplectic_form,
    transition_probability, AmplitudeChart, HaarSampler, TangentVector,
};
use crate::qubit::{
    bloch_components, coordinate_algebra, lambda_eval, r_eval, spherical_to_cartesian, AffineFunction, BlochVector,
};
use crate::random;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "geomq", version, about = "Geometric quantum mechanics toolkit")]
pub struct Cli {
    /// Seed for randomized checks and sampling.
    #[arg(long, global = true, env = "GEOMQ_SEED")]
    pub seed: Option<u64>,
    /// Replace the tolerance of every verification check.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Normalization of the Poisson bracket generator.
    #[arg(long, global = true, default_value = "internal")]
    pub bracket_convention: BracketConvention,
    /// Output format for trajectories.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a suite of invariant checks and print a JSON report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Scenario file whose matrices are validated and used as an extra fixture.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
    /// Integrate a scenario and export the trajectory.
    Flow { scenario: PathBuf },
    /// Outcome probabilities and the state-observable pairing integral.
    Measure {
        scenario: Option<PathBuf>,
        /// Observable as JSON (matrix literal or Pauli coefficients).
        #[arg(long)]
        observable: Option<String>,
        /// State as JSON (matrix literal, Bloch vector, ket or spherical coordinates).
        #[arg(long)]
        state: Option<String>,
        /// Number of samples for the pairing integral.
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Geometry,
    Dynamics,
    Composition,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT_ERROR,
            CliError::Check(_) => EXIT_CHECK_FAILED,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Check(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantViolation { .. } => CliError::Check(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// What a command produced: text for stdout or `--out`, and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

/// An operator given as a matrix literal, three Pauli coefficients
/// `[a1, a2, a3]`, or `{"pauli": [a0, a1, a2, a3]}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Matrix(MatrixLiteral),
    Pauli3([f64; 3]),
    Pauli4 { pauli: [f64; 4] },
}

impl OperatorSpec {
    pub fn to_matrix(&self) -> Result<CMatrix, Error> {
        match self {
            OperatorSpec::Matrix(lit) => matrix_from_literal(lit),
            OperatorSpec::Pauli3(a) => Ok(HermitianOperator::from_pauli(0.0, *a).into_matrix()),
            OperatorSpec::Pauli4 { pauli: [a0, a1, a2, a3] } => {
                Ok(HermitianOperator::from_pauli(*a0, [*a1, *a2, *a3]).into_matrix())
            }
        }
    }
}

/// A state given as a matrix literal, a Bloch vector, `{"ket": [...]}` or
/// `{"r", "theta", "phi"}` spherical Bloch coordinates.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Matrix(MatrixLiteral),
    Bloch([f64; 3]),
    Ket { ket: VectorLiteral },
    Spherical { r: f64, theta: f64, phi: f64 },
}

impl StateSpec {
    /// The matrix as given, without state validation.
    pub fn to_matrix(&self) -> Result<CMatrix, Error> {
        let bloch = |x: [f64; 3]| HermitianOperator::from_pauli(0.5, x.map(|v| 0.5 * v)).into_matrix();
        match self {
            StateSpec::Matrix(lit) => matrix_from_literal(lit),
            StateSpec::Bloch(x) => Ok(bloch(*x)),
            StateSpec::Spherical { r, theta, phi } => Ok(bloch(spherical_to_cartesian(*r, *theta, *phi))),
            StateSpec::Ket { ket } => Ok(DensityOperator::from_vector(&vector_from_literal(ket))?.into_matrix()),
        }
    }

    pub fn to_state(&self) -> Result<DensityOperator, Error> {
        if let StateSpec::Bloch(x) = self {
            BlochVector::new(*x)?;
        }
        DensityOperator::new(self.to_matrix()?)
    }
}

/// Scenario file contents. Every field is optional at parse time; each
/// command checks for the fields it needs.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct Scenario {
    pub dim: Option<usize>,
    pub dim_a: Option<usize>,
    pub dim_b: Option<usize>,
    pub keep: Option<Subsystem>,
    pub hamiltonian: Option<OperatorSpec>,
    #[serde(default)]
    pub lindblad_ops: Vec<OperatorSpec>,
    pub rho0: Option<StateSpec>,
    pub observable: Option<OperatorSpec>,
    pub state: Option<StateSpec>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub record_every: Option<usize>,
    pub integrator: Option<Integrator>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid scenario JSON: {e}"))
    }

    fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        field.as_ref().ok_or_else(|| CliError::Input(format!("scenario is missing field '{name}'")))
    }

    fn check_dim(&self, n: usize) -> Result<(), CliError> {
        if let Some(d) = self.dim {
            if d != n {
                return Err(CliError::Input(format!("scenario declares dim {d} but matrices have dimension {n}")));
            }
        }
        Ok(())
    }

    pub fn generator(&self) -> Result<LindbladGenerator, CliError> {
        let h = HermitianOperator::new(Self::require(&self.hamiltonian, "hamiltonian")?.to_matrix()?)?;
        let jumps =
            self.lindblad_ops.iter().map(|v| GeneralOperator::new(v.to_matrix()?)).collect::<Result<Vec<_>, _>>()?;
        self.check_dim(h.dim())?;
        Ok(LindbladGenerator::new(h, jumps)?)
    }

    pub fn flow_config(&self) -> Result<FlowConfig, CliError> {
        let cfg = FlowConfig {
            dt: *Self::require(&self.dt, "dt")?,
            t_final: *Self::require(&self.t_final, "t_final")?,
            integrator: self.integrator.unwrap_or_default(),
            record_every: self.record_every.unwrap_or(1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn bipartite(&self) -> Result<Option<BipartiteSystem>, CliError> {
        match (self.dim_a, self.dim_b) {
            (None, None) => Ok(None),
            (Some(a), Some(b)) => Ok(Some(BipartiteSystem::new(a, b)?)),
            _ => Err(CliError::Input("bipartite scenarios need both dim_a and dim_b".into())),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(t) = cli.tolerance {
        if !(t >= 0.0) {
            return Err(CliError::Input(format!("tolerance must be non-negative, got {t}")));
        }
    }
    let outcome = match &cli.command {
        Command::Verify { suite, fixture } => cmd_verify(cli, *suite, fixture.as_deref())?,
        Command::Flow { scenario } => cmd_flow(cli, scenario)?,
        Command::Measure { scenario, observable, state, samples } => {
            cmd_measure(cli, scenario.as_deref(), observable.as_deref(), state.as_deref(), *samples)?
        }
    };
    if let Some(path) = &cli.out {
        fs::write(path, &outcome.output)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        return Ok(Outcome { output: String::new(), exit_code: outcome.exit_code });
    }
    Ok(outcome)
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub bracket_convention: BracketConvention,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

struct Checker {
    tolerance_override: Option<f64>,
    checks: Vec<CheckResult>,
}

impl Checker {
    fn push(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        let tolerance = self.tolerance_override.unwrap_or(tolerance);
        let passed = residual.is_finite() && residual <= tolerance;
        self.checks.push(CheckResult { name: name.into(), residual, tolerance, passed });
    }

    fn fail(&mut self, name: impl Into<String>, tolerance: f64) {
        self.push(name, f64::INFINITY, tolerance);
    }
}

type CheckFn = fn(&mut Checker, &mut ChaCha8Rng, BracketConvention) -> Result<(), Error>;

fn cmd_verify(cli: &Cli, suite: Suite, fixture: Option<&Path>) -> Result<Outcome, CliError> {
    let seed = cli.seed.unwrap_or(0);
    let mut checker = Checker { tolerance_override: cli.tolerance, checks: Vec::new() };
    if let Some(path) = fixture {
        let scenario = Scenario::load(path)?;
        check_fixture(&mut checker, &scenario, suite);
    }
    let suites: &[(Suite, CheckFn)] = &[
        (Suite::Algebra, algebra_suite),
        (Suite::Geometry, geometry_suite),
        (Suite::Dynamics, dynamics_suite),
        (Suite::Composition, composition_suite),
    ];
    for (s, f) in suites {
        if suite == Suite::All || suite == *s {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            f(&mut checker, &mut rng, cli.bracket_convention).map_err(|e| CliError::Check(e.to_string()))?;
        }
    }
    let passed = checker.checks.iter().all(|c| c.passed);
    let report = Report { suite, seed, bracket_convention: cli.bracket_convention, checks: checker.checks, passed };
    let mut output = serde_json::to_string_pretty(&report).expect("report serializes");
    output.push('\n');
    Ok(Outcome { output, exit_code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED } })
}

fn check_fixture(ck: &mut Checker, s: &Scenario, suite: Suite) {
    let mut hamiltonian = None;
    let mut rho0 = None;
    if let Some(h) = &s.hamiltonian {
        match h.to_matrix() {
            Ok(m) => {
                ck.push("fixture.hamiltonian.hermitian", hermitian_deviation(&m), 1e-12);
                hamiltonian = HermitianOperator::new(m).ok();
            }
            Err(_) => ck.fail("fixture.hamiltonian.shape", 0.0),
        }
    }
    for (j, v) in s.lindblad_ops.iter().enumerate() {
        match v.to_matrix() {
            Ok(m) => {
                let expected = hamiltonian.as_ref().map_or(m.nrows(), |h| h.dim());
                ck.push(format!("fixture.lindblad_ops[{j}].dim"), m.nrows().abs_diff(expected) as f64, 0.0);
            }
            Err(_) => ck.fail(format!("fixture.lindblad_ops[{j}].shape"), 0.0),
        }
    }
    for (name, spec) in [("rho0", &s.rho0), ("state", &s.state)] {
        let Some(spec) = spec else { continue };
        let m = match spec.to_matrix() {
            Ok(m) => m,
            Err(_) => {
                ck.fail(format!("fixture.{name}.shape"), 0.0);
                continue;
            }
        };
        let dev = hermitian_deviation(&m);
        ck.push(format!("fixture.{name}.hermitian"), dev, 1e-12);
        ck.push(format!("fixture.{name}.trace"), (m.trace() - c(1.0)).norm(), 1e-10);
        if dev <= 1e-12 {
            let h = HermitianOperator::new(m).expect("checked Hermitian");
            match eig_hermitian(&h) {
                Ok(spec) => {
                    let min = spec.values.last().copied().unwrap_or(0.0);
                    ck.push(format!("fixture.{name}.positivity"), (-min).max(0.0), 1e-10);
                }
                Err(_) => ck.fail(format!("fixture.{name}.eigen"), 0.0),
            }
            if name == "rho0" {
                rho0 = DensityOperator::new(h.into_matrix()).ok();
            }
        }
    }
    if matches!(suite, Suite::Dynamics | Suite::All) {
        if let (Some(_), Some(rho)) = (&hamiltonian, &rho0) {
            match s.generator() {
                Ok(gen) if gen.dim() == rho.dim() => {
                    ck.push("fixture.gkls.cancellation", cancellation_check(&gen, rho).unwrap_or(f64::INFINITY), 1e-12);
                    let traceless = gkls_apply(&gen, rho).map(|l| l.trace().norm()).unwrap_or(f64::INFINITY);
                    ck.push("fixture.gkls.traceless", traceless, 1e-12);
                }
                _ => ck.fail("fixture.generator", 0.0),
            }
        }
    }
}

fn algebra_suite(ck: &mut Checker, rng: &mut ChaCha8Rng, _: BracketConvention) -> Result<(), Error> {
    let (mut anti, mut herm, mut recon, mut jacobi, mut jordan_id, mut eig_res) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for n in 2..=8 {
        let a = random::hermitian(n, rng);
        let b = random::hermitian(n, rng);
        let d = random::hermitian(n, rng);
        let comm = commutator(&a, &b)?.into_matrix();
        anti = anti.max((&comm + comm.adjoint()).norm());
        let jab = jordan_product(&a, &b)?;
        let raw = a.matrix() * b.matrix();
        herm = herm.max(hermitian_deviation(&(&raw + b.matrix() * a.matrix())));
        recon = recon.max((&raw - (jab.matrix() + &comm * c(0.5))).norm());
        let (ea, eb, ed) =
            (ExpectationFunction::new(a.clone()), ExpectationFunction::new(b.clone()), ExpectationFunction::new(d));
        let pb = |x: &ExpectationFunction, y: &ExpectationFunction| poisson_bracket(x, y);
        let j = pb(&ea, &pb(&eb, &ed)?)?.generator().matrix()
            + pb(&eb, &pb(&ed, &ea)?)?.generator().matrix()
            + pb(&ed, &pb(&ea, &eb)?)?.generator().matrix();
        jacobi = jacobi.max(j.norm());
        let aa = jordan_product(&a, &a)?;
        let lhs = jordan_product(&jab, &aa)?;
        let rhs = jordan_product(&a, &jordan_product(&b, &aa)?)?;
        jordan_id = jordan_id.max((lhs.matrix() - rhs.matrix()).norm() / (1.0 + aa.matrix().norm()).powi(2));
        let spec = eig_hermitian(&a)?;
        eig_res = eig_res.max((spec.reconstruct() - a.matrix()).norm());
    }
    ck.push("commutator.anti_hermitian", anti, 1e-12);
    ck.push("jordan.hermitian", herm, 1e-12);
    ck.push("product.jordan_plus_commutator", recon, 1e-12);
    ck.push("poisson.jacobi", jacobi, 1e-10);
    ck.push("jordan.identity", jordan_id, 1e-10);
    ck.push("eig.reconstruction", eig_res, 1e-10);

    let mut star = 0.0f64;
    for &n in &[2, 3, 4, 8] {
        let mut sampler = HaarSampler::new(n, rand::Rng::random(rng));
        for _ in 0..25 {
            let (ea, eb) = (
                ExpectationFunction::new(random::hermitian(n, rng)),
                ExpectationFunction::new(random::hermitian(n, rng)),
            );
            let prod = star_product(&ea.clone().into(), &eb.clone().into())?;
            let (jor, poi) = (jordan_bracket(&ea, &eb)?, poisson_bracket(&ea, &eb)?);
            for pt in sampler.by_ref().take(10) {
                let lhs = prod.evaluate(&pt)?;
                star = star.max((lhs - Complex64::new(jor.evaluate(&pt)?, poi.evaluate(&pt)?)).norm());
            }
        }
    }
    ck.push("star_product.identity", star, 1e-10);

    let mut coord = 0.0f64;
    for j in 1..=3 {
        for k in 1..=3 {
            let br = coordinate_algebra(j, k).map_err(|_| Error::IndexOutOfRange { index: j, bound: 3 })?;
            let jor = jordan_product(&pauli(j), &pauli(k))?;
            coord = coord.max((jor.matrix() - pauli(0).matrix() * c(br.jordan)).norm());
            let poi = poisson_bracket(&ExpectationFunction::new(pauli(j)), &ExpectationFunction::new(pauli(k)))?;
            coord = coord.max((poi.generator().matrix() - br.poisson.to_operator().matrix()).norm());
        }
    }
    ck.push("qubit.coordinate_algebra", coord, 1e-12);

    let mut tensors = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (random::hermitian(2, rng), random::hermitian(2, rng));
        let rho = random::density(2, 2, rng);
        let pt_rho = DensityOperator::from_vector(&random::pure_vector(2, rng))?;
        let x = BlochVector::new(bloch_components(rho.matrix())?)?;
        let xp = BlochVector::new(bloch_components(pt_rho.matrix())?)?;
        let (fa, fb) = (AffineFunction::from_operator(&a)?, AffineFunction::from_operator(&b)?);
        let (ea, eb) = (ExpectationFunction::new(a), ExpectationFunction::new(b));
        let pb = poisson_bracket(&ea, &eb)?.evaluate_state(&rho)?;
        tensors = tensors.max((lambda_eval(&x, &fa, &fb) - pb).abs());
        let pt = crate::states::top_eigenray(&pt_rho)?;
        tensors = tensors.max((r_eval(&xp, &fa, &fb) - symmetric_bracket(&ea, &eb, &pt)?).abs());
    }
    ck.push("qubit.tensors_vs_operators", tensors, 1e-10);
    Ok(())
}

fn random_tangent(
    n: usize,
    base: &crate::projective::ProjectivePoint,
    rng: &mut ChaCha8Rng,
) -> Result<TangentVector, Error> {
    TangentVector::horizontal_part(base.clone(), &random::gaussian_vector(n, rng))
}

fn geometry_suite(ck: &mut Checker, rng: &mut ChaCha8Rng, convention: BracketConvention) -> Result<(), Error> {
    let (mut compat, mut jj, mut sym, mut gauge) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..100 {
        let n = 2 + k % 7;
        let base = HaarSampler::new(n, rand::Rng::random(rng)).sample();
        let (v, w) = (random_tangent(n, &base, rng)?, random_tangent(n, &base, rng)?);
        compat = compat.max(compatibility_residual(&v, &w)?);
        jj = jj.max((apply_j(&apply_j(&v)).horizontal() + v.horizontal()).norm());
        sym = sym.max((pullback_tensor(&v, &w)? - pullback_tensor(&w, &v)?.conj()).norm());
        let phase = Complex64::from_polar(0.5 + rand::Rng::random::<f64>(rng), 6.0 * rand::Rng::random::<f64>(rng));
        let psi = base.representative() * phase;
        let (v2, w2) = (
            TangentVector::lift(&psi, &(v.horizontal() * phase))?,
            TangentVector::lift(&psi, &(w.horizontal() * phase))?,
        );
        gauge = gauge.max((pullback_tensor(&v2, &w2)? - pullback_tensor(&v, &w)?).norm());
        let other = HaarSampler::new(n, rand::Rng::random(rng)).sample();
        let moved = crate::projective::project_ray(&(other.representative() * phase))?;
        gauge = gauge.max((transition_probability(&base, &other)? - transition_probability(&base, &moved)?).abs());
    }
    ck.push("kaehler.compatibility", compat, 1e-10);
    ck.push("kaehler.j_squared", jj, 1e-12);
    ck.push("pullback.hermitian_symmetry", sym, 1e-12);
    ck.push("pullback.gauge_invariance", gauge, 1e-10);

    let mut chart = 0.0f64;
    for k in 0..20 {
        let n = 2 + k % 3;
        let pt = HaarSampler::new(n, rand::Rng::random(rng)).sample();
        let ch = AmplitudeChart::in_standard_basis(&pt)?;
        let blocks = amplitude_chart_metric(&renormalized(&ch.p))?;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..n).map(|_| rand::Rng::sample::<f64, _>(rng, rand_distr::StandardNormal)).collect()
        };
        let mut dp = draw(rng);
        let mean = dp.iter().sum::<f64>() / n as f64;
        dp.iter_mut().for_each(|x| *x -= mean);
        let dphi = draw(rng);
        let mut dp2 = draw(rng);
        let mean2 = dp2.iter().sum::<f64>() / n as f64;
        dp2.iter_mut().for_each(|x| *x -= mean2);
        let dphi2 = draw(rng);
        let (t1, t2) = (ch.coordinate_tangent(&dp, &dphi)?, ch.coordinate_tangent(&dp2, &dphi2)?);
        let h = pullback_tensor(&t1, &t2)?;
        chart = chart.max((h.re - blocks.metric(&dp, &dphi, &dp2, &dphi2)).abs());
        chart = chart.max((h.im - blocks.symplectic(&dp, &dphi, &dp2, &dphi2)).abs());
    }
    ck.push("chart.fisher_rao_assembly", chart, 1e-8);
    let uniform = amplitude_chart_metric(&[0.5, 0.5])?;
    let target = nalgebra::DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]);
    ck.push("chart.phase_block_uniform", (&uniform.phase - &target).abs().max(), 1e-12);

    let factor = match convention {
        BracketConvention::Internal => 1.0,
        BracketConvention::ICommutator => -2.0,
    };
    let (mut omega, mut gmet, mut killing, mut sl) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..20 {
        let n = 2 + k % 3;
        let (a, b) = (random::hermitian(n, rng), random::hermitian(n, rng));
        let pt = HaarSampler::new(n, rand::Rng::random(rng)).sample();
        let (ea, eb) = (ExpectationFunction::new(a.clone()), ExpectationFunction::new(b.clone()));
        let (xa, xb) = (hamiltonian_tangent(&a, &pt)?, hamiltonian_tangent(&b, &pt)?);
        let pb = poisson_bracket_with(&ea, &eb, convention)?.evaluate(&pt)?;
        omega = omega.max((pb - factor * symplectic_form(&xa, &xb)?).abs());
        let (ya, yb) = (gradient_tangent(&a, &pt)?, gradient_tangent(&b, &pt)?);
        gmet = gmet.max((symmetric_bracket(&ea, &eb, &pt)? - metric(&ya, &yb)?).abs());
        let (v, w) = (random_tangent(n, &pt, rng)?, random_tangent(n, &pt, rng)?);
        killing = killing.max(killing_residual(&a, &v, &w, 1e-4)?.abs());
        let rho = crate::states::pure_projector(&pt);
        sl = sl.max(sl_relation_residuals(&a, &b, &rho)?.max());
    }
    ck.push(format!("poisson.symplectic[{convention}]"), omega, 1e-8);
    ck.push("symmetric_bracket.metric", gmet, 1e-8);
    ck.push("killing.hamiltonian", killing, 1e-6);
    ck.push("sl.relations", sl, 1e-8);

    let base = crate::projective::project_ray(&crate::operator::CVector::from_vec(vec![c(2.0), c(1.0)]))?;
    let v = TangentVector::horizontal_part(base, &crate::operator::CVector::from_vec(vec![c(0.0), c(1.0)]))?;
    let control = killing_residual_along(Transport::Gradient, &pauli(3), &v, &v, 1e-4)?.abs();
    ck.push("killing.gradient_control_shortfall", (0.1 - control).max(0.0), 0.0);
    Ok(())
}

/// Normalizes a probability vector that sums to 1 up to rounding.
fn renormalized(p: &[f64]) -> Vec<f64> {
    let total: f64 = p.iter().sum();
    p.iter().map(|x| x / total).collect()
}

fn random_generator(n: usize, jumps: usize, rng: &mut ChaCha8Rng) -> Result<LindbladGenerator, Error> {
    let vs = (0..jumps).map(|_| random::general(n, rng).scale(c(0.5))).collect();
    LindbladGenerator::new(random::hermitian(n, rng), vs)
}

fn dynamics_suite(ck: &mut Checker, rng: &mut ChaCha8Rng, _: BracketConvention) -> Result<(), Error> {
    let (mut cancel, mut split_sum, mut traceless) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..50 {
        let n = 2 + k % 3;
        let gen = random_generator(n, 1 + k % 3, rng)?;
        let rho = random::density(n, 1 + k % n, rng);
        cancel = cancel.max(cancellation_check(&gen, &rho)?);
        let l = gkls_apply(&gen, &rho)?;
        split_sum = split_sum.max((gkls_split(&gen, &rho)?.total().matrix() - l.matrix()).norm());
        traceless = traceless.max(l.trace().norm());
    }
    ck.push("gkls.cancellation", cancel, 1e-12);
    ck.push("gkls.split_sum", split_sum, 1e-12);
    ck.push("gkls.traceless", traceless, 1e-12);

    let mut closed_form = 0.0f64;
    for gamma in [0.1, 0.5, 2.0] {
        let gen = phase_damping_generator(gamma)?;
        let x0 = [0.6, -0.5, 0.3];
        let rho0 = DensityOperator::new(HermitianOperator::from_pauli(0.5, x0.map(|v| v / 2.0)).into_matrix())?;
        let traj = integrate(&gen, &rho0, &FlowConfig::new(1e-3, 5.0).with_record_every(100))?;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let x = bloch_components(s.matrix())?;
            let decay = (-2.0 * gamma * t).exp();
            closed_form = closed_form
                .max((x[0] - x0[0] * decay).abs())
                .max((x[1] - x0[1] * decay).abs())
                .max((x[2] - x0[2]).abs());
        }
    }
    ck.push("phase_damping.closed_form", closed_form, 1e-6);

    let mut linear = 0.0f64;
    let mut closed = 0.0f64;
    for n in 2..=4 {
        let gen = random_generator(n, 2, rng)?;
        let (r1, r2) = (random::density(n, n, rng), random::density(n, 1, rng));
        let alpha = 0.3;
        let mix = crate::states::convex_combine(&[r1.clone(), r2.clone()], &[alpha, 1.0 - alpha])?;
        let cfg = FlowConfig::new(1e-2, 1.0).with_record_every(10);
        let (t1, t2, tm) = (integrate(&gen, &r1, &cfg)?, integrate(&gen, &r2, &cfg)?, integrate(&gen, &mix, &cfg)?);
        for k in 0..tm.len() {
            let combo = t1.states[k].matrix() * c(alpha) + t2.states[k].matrix() * c(1.0 - alpha);
            linear = linear.max((tm.states[k].matrix() - combo).norm());
        }
        let closed_gen = LindbladGenerator::hamiltonian_only(gen.hamiltonian().clone());
        let rk = integrate(&closed_gen, &r2, &FlowConfig::new(1e-3, 1.0).with_record_every(100))?;
        let exact = integrate(
            &closed_gen,
            &r2,
            &FlowConfig::new(1e-3, 1.0).with_record_every(100).with_integrator(Integrator::ExactUnitary),
        )?;
        for k in 0..rk.len() {
            closed = closed.max((rk.states[k].matrix() - exact.states[k].matrix()).norm());
        }
    }
    ck.push("integrate.linearity", linear, 1e-8);
    ck.push("integrate.closed_system_vs_exact", closed, 1e-8);
    Ok(())
}

fn composition_suite(ck: &mut Checker, rng: &mut ChaCha8Rng, _: BracketConvention) -> Result<(), Error> {
    let (p, s) = composite_dimension(2, 2)?;
    ck.push("composite_dimension.2x2", (p.abs_diff(6) + s.abs_diff(4)) as f64, 0.0);
    let sys = BipartiteSystem::new(2, 2)?;
    let r = 1.0 / 2f64.sqrt();
    let bell = DensityOperator::from_vector(&crate::operator::CVector::from_vec(vec![c(r), c(0.0), c(0.0), c(r)]))?;
    ck.push("entanglement.bell_k2", (entanglement_measure(&bell, &sys, 2)? - 0.75).abs(), 1e-12);

    let (mut frob, mut functional, mut local) = (0.0f64, 0.0f64, 0.0f64);
    for (da, db) in [(2, 2), (2, 3), (3, 2)] {
        let sys = BipartiteSystem::new(da, db)?;
        let rho = random::density(da * db, da * db, rng);
        let ra = project_subsystem(&rho, &sys, Subsystem::A)?;
        let rb = project_subsystem(&rho, &sys, Subsystem::B)?;
        let diff = rho.matrix() - tensor_product(&ra, &rb).into_matrix();
        frob = frob.max((entanglement_measure(&rho, &sys, 2)? - diff.norm_squared()).abs());
        let a = random::hermitian(da, rng);
        let lifted = tensor_product(&a, &HermitianOperator::identity(db));
        functional =
            functional.max(((ra.matrix() * a.matrix()).trace() - (rho.matrix() * lifted.matrix()).trace()).norm());
        let u = tensor_product(&GeneralOperator::identity(da), &random::unitary(db, rng)).into_matrix();
        let moved = DensityOperator::new(&u * rho.matrix() * u.adjoint())?;
        local = local.max((project_subsystem(&moved, &sys, Subsystem::A)?.matrix() - ra.matrix()).norm());
    }
    ck.push("entanglement.k2_frobenius", frob, 1e-12);
    ck.push("partial_trace.functional_identity", functional, 1e-10);
    ck.push("partial_trace.local_unitary_invariance", local, 1e-10);

    let h = pauli(1).tensor(&pauli(1));
    let zero = DensityOperator::from_vector(&crate::operator::CVector::from_vec(vec![c(1.0), c(0.0), c(0.0), c(0.0)]))?;
    let quarter = std::f64::consts::FRAC_PI_4;
    let ev = projected_evolution_of(&h, &zero, &sys, Subsystem::A, &FlowConfig::new(quarter / 50.0, quarter))?;
    let purity = ev.subsystem.purities().last().copied().unwrap_or(f64::NAN);
    ck.push("projected_evolution.sigma1_sigma1_purity", (purity - 0.5).abs(), 1e-6);
    Ok(())
}

// ---------------------------------------------------------------- flow

/// Column names and rows of an exported trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("table serializes");
        s.push('\n');
        s
    }
}

/// Columns `t`, then Bloch components for qubits or real and imaginary
/// parts of each entry (row-major) otherwise, then purity.
pub fn trajectory_table(traj: &Trajectory, extra: &[(&str, &[f64])]) -> Result<Table, Error> {
    let n = traj.states.first().map_or(0, |s| s.dim());
    let mut columns = vec!["t".to_string()];
    if n == 2 {
        columns.extend(["x1", "x2", "x3"].map(String::from));
    } else {
        for i in 0..n {
            for j in 0..n {
                columns.push(format!("re_{i}{j}"));
                columns.push(format!("im_{i}{j}"));
            }
        }
    }
    columns.push("purity".into());
    columns.extend(extra.iter().map(|(name, _)| name.to_string()));
    let mut rows = Vec::with_capacity(traj.len());
    for (k, (t, s)) in traj.times.iter().zip(&traj.states).enumerate() {
        let mut row = vec![*t];
        if n == 2 {
            row.extend(bloch_components(s.matrix())?);
        } else {
            let m = s.matrix();
            for i in 0..n {
                for j in 0..n {
                    row.push(m[(i, j)].re);
                    row.push(m[(i, j)].im);
                }
            }
        }
        row.push(s.purity());
        row.extend(extra.iter().map(|(_, values)| values[k]));
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

fn cmd_flow(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let scenario = Scenario::load(path)?;
    let cfg = scenario.flow_config()?;
    let rho0 = Scenario::require(&scenario.rho0, "rho0")?.to_state()?;
    let table = match scenario.bipartite()? {
        Some(sys) => {
            if !scenario.lindblad_ops.is_empty() {
                return Err(CliError::Input("bipartite flows take a Hamiltonian only".into()));
            }
            let h = HermitianOperator::new(Scenario::require(&scenario.hamiltonian, "hamiltonian")?.to_matrix()?)?;
            let keep = scenario.keep.unwrap_or(Subsystem::A);
            let ev = projected_evolution_of(&h, &rho0, &sys, keep, &cfg)?;
            trajectory_table(&ev.subsystem, &[("global_purity", &ev.global_purity)])?
        }
        None => {
            let gen = scenario.generator()?;
            let traj = integrate(&gen, &rho0, &cfg)?;
            trajectory_table(&traj, &[])?
        }
    };
    let output = match cli.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    };
    Ok(Outcome { output, exit_code: EXIT_OK })
}

// ---------------------------------------------------------------- measure

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    /// Outcome label (signed, e.g. `+1`) to probability, outcomes descending.
    pub probabilities: serde_json::Map<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<PairingEstimate>,
}

/// `+1`, `-1`, `+0.5`: signed, rounded to 12 decimals, no negative zero.
pub fn outcome_label(value: f64) -> String {
    let rounded = (value * 1e12).round() / 1e12;
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded:+}")
}

fn parse_json_arg<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid {what} JSON: {e}")))
}

fn cmd_measure(
    cli: &Cli,
    path: Option<&Path>,
    observable: Option<&str>,
    state: Option<&str>,
    samples: Option<usize>,
) -> Result<Outcome, CliError> {
    let mut scenario = match path {
        Some(p) => Scenario::load(p)?,
        None => Scenario::default(),
    };
    if let Some(text) = observable {
        scenario.observable = Some(parse_json_arg(text, "observable")?);
    }
    if let Some(text) = state {
        scenario.state = Some(parse_json_arg(text, "state")?);
    }
    let a = HermitianOperator::new(Scenario::require(&scenario.observable, "observable")?.to_matrix()?)?;
    let rho = Scenario::require(&scenario.state, "state")?.to_state()?;
    if a.dim() != rho.dim() {
        return Err(CliError::Input(format!("observable has dimension {} but state has {}", a.dim(), rho.dim())));
    }
    scenario.check_dim(a.dim())?;
    let measure = gpov_from_observable(&a)?;
    let mut probabilities = serde_json::Map::new();
    for (k, &l) in measure.outcomes().iter().enumerate() {
        let p = probability_state(&measure, &[k], &rho)?;
        probabilities.insert(outcome_label(l), serde_json::Value::from(p));
    }
    let seed = cli.seed.or(scenario.seed).unwrap_or(0);
    let pairing = match samples.or(scenario.samples) {
        Some(n) => Some(pairing_integral(&rho, &ExpectationFunction::new(a), n, seed)?),
        None => None,
    };
    let report = MeasureReport { probabilities, pairing };
    let mut output = serde_json::to_string_pretty(&report).expect("report serializes");
    output.push('\n');
    Ok(Outcome { output, exit_code: EXIT_OK })
}

/// Human-readable one-line summary of a verification report.
pub fn summarize(report: &Report) -> String {
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    let mut s = String::new();
    let _ = write!(s, "{} of {} checks passed", report.checks.len() - failed.len(), report.checks.len());
    if !failed.is_empty() {
        let _ = write!(s, "; failed: {}", failed.join(", "));
    }
    s
}
