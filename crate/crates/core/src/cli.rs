//! Subcommand drivers behind the `altquant` binary.
//!
//! A [`RunConfig`] is read from JSON (`--config`) and overlaid with command-line
//! flags; [`run`] executes one subcommand and returns a [`Report`]. Randomized
//! suites draw from a ChaCha stream seeded by `seed`, so identical configs give
//! byte-identical reports.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::alternatives::{
    self, classify_powers, commutant_basis, symmetry_powers, SymmetryOrigin, SymmetryTransformation,
};
use crate::dynamics::{
    self, check_invariance, decompose_hamiltonian, ehrenfest_check, evolve_schrodinger,
    flow_preservation, DynamicsMatrix,
};
use crate::error::Error;
use crate::io::{DeformationJson, MatrixJson, Source, TableRole, TableSpec};
use crate::kdeform::{self, DeformationOperator, Kernel};
use crate::numerics::{self, ComplexMatrix, RealMatrix};
use crate::oscillator::{self, build_f_oscillator, build_fock, NamedTable};
use crate::realization::{self, ComplexState, RealPoint};
use crate::report::Report;
use crate::sampling::{self, SuiteRng};
use crate::structures::{
    assemble_triple, standard_triple, ComplexStructure, PoissonTensor, StructureTriple,
};

pub const DEFAULT_INSTANCES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    OneLevel,
    Decompose,
    Invariance,
    Alternatives,
    KdeformVerify,
    Pictures,
    Recurrence,
    Foscillator,
    AltHamiltonian,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::OneLevel,
        Command::Decompose,
        Command::Invariance,
        Command::Alternatives,
        Command::KdeformVerify,
        Command::Pictures,
        Command::Recurrence,
        Command::Foscillator,
        Command::AltHamiltonian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::OneLevel => "one-level",
            Command::Decompose => "decompose",
            Command::Invariance => "invariance",
            Command::Alternatives => "alternatives",
            Command::KdeformVerify => "kdeform-verify",
            Command::Pictures => "pictures",
            Command::Recurrence => "recurrence",
            Command::Foscillator => "foscillator",
            Command::AltHamiltonian => "alt-hamiltonian",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError(format!("unknown command \"{s}\"")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    /// `H = ω·1` on `modes` modes.
    Oscillator,
    /// `A` (and optionally `C`, `J`) from the config.
    Matrix,
}

impl FromStr for System {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oscillator" => Ok(System::Oscillator),
            "matrix" => Ok(System::Matrix),
            other => Err(ConfigError(format!(
                "unknown system \"{other}\" (expected oscillator or matrix)"
            ))),
        }
    }
}

/// Tolerance classes; any subset may be overridden in the config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub exact: f64,
    pub construction: f64,
    pub derived: f64,
    pub evolution: f64,
    pub symmetry: f64,
    pub finite_difference: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: 1e-14,
            construction: numerics::CONSTRUCTION_TOL,
            derived: numerics::DERIVED_TOL,
            evolution: numerics::EVOLUTION_TOL,
            symmetry: alternatives::SYMMETRY_TOL,
            finite_difference: 1e-6,
        }
    }
}

/// Invalid configuration: bad JSON, missing inputs, or inputs that fail
/// construction-time validation. Maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("config error: {0}")]
pub struct ConfigError(pub String);

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError(e.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub instances: Option<usize>,
    /// Complex modes `N`; phase space has dimension `2N`.
    pub modes: Option<usize>,
    /// Fock levels `D`.
    pub dim: Option<usize>,
    pub omega: Option<f64>,
    pub t: Option<f64>,
    pub times: Option<Vec<f64>>,
    pub q0: Option<f64>,
    pub p0: Option<f64>,
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub system: Option<System>,
    pub max_power: Option<u32>,
    pub commutant: Option<bool>,
    /// Real dynamics matrix.
    pub a: Option<Source<MatrixJson>>,
    /// Poisson tensor.
    pub c: Option<Source<MatrixJson>>,
    /// Complex structure.
    pub j: Option<Source<MatrixJson>>,
    /// Complex Hamiltonian.
    pub h: Option<Source<MatrixJson>>,
    /// Complex observable.
    pub b: Option<Source<MatrixJson>>,
    pub deformation: Option<Source<DeformationJson>>,
    pub f: Option<TableSpec>,
    pub htilde: Option<TableSpec>,
    pub tolerances: Tolerances,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn for_command(command: Command) -> Self {
        Self {
            command: Some(command),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)
            .map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(sampling::DEFAULT_SEED)
    }

    pub fn instances(&self) -> usize {
        self.instances.unwrap_or(DEFAULT_INSTANCES)
    }

    fn base(&self) -> Option<&Path> {
        self.base_dir.as_deref()
    }

    fn real(&self, src: &Option<Source<MatrixJson>>) -> Result<Option<RealMatrix>, ConfigError> {
        src.as_ref()
            .map(|s| s.load(self.base()).and_then(|m| m.to_real()))
            .transpose()
            .map_err(Into::into)
    }

    fn complex(
        &self,
        src: &Option<Source<MatrixJson>>,
    ) -> Result<Option<ComplexMatrix>, ConfigError> {
        src.as_ref()
            .map(|s| s.load(self.base()).and_then(|m| m.to_complex()))
            .transpose()
            .map_err(Into::into)
    }

    fn times(&self, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let times = self.times.clone().unwrap_or_else(|| default.to_vec());
        if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
            return Err(ConfigError(
                "times must be a nonempty list of finite numbers".into(),
            ));
        }
        Ok(times)
    }

    fn system(&self) -> System {
        self.system.unwrap_or(if self.a.is_some() {
            System::Matrix
        } else {
            System::Oscillator
        })
    }

    /// `(A, triple)` for commands that act on a flow generator.
    fn dynamics(
        &self,
        default_omega: f64,
    ) -> Result<(DynamicsMatrix, StructureTriple), ConfigError> {
        match self.system() {
            System::Oscillator => {
                let omega = finite("omega", self.omega.unwrap_or(default_omega))?;
                let modes = self.modes.unwrap_or(1);
                Ok((
                    DynamicsMatrix::oscillator(omega, modes)?,
                    standard_triple(modes)?,
                ))
            }
            System::Matrix => {
                let a = self
                    .real(&self.a)?
                    .ok_or_else(|| ConfigError("system \"matrix\" needs \"a\"".into()))?;
                let a = DynamicsMatrix::new(a)?;
                let triple = self.triple(a.dim())?;
                Ok((a, triple))
            }
        }
    }

    fn triple(&self, dim: usize) -> Result<StructureTriple, ConfigError> {
        let modes = dim / 2;
        let c = match self.real(&self.c)? {
            Some(c) => PoissonTensor::new(c)?,
            None => PoissonTensor::canonical(modes)?,
        };
        let j = match self.real(&self.j)? {
            Some(j) => ComplexStructure::new(j)?,
            None => ComplexStructure::canonical(modes)?,
        };
        for (name, found) in [("C", c.dim()), ("J", j.matrix().nrows())] {
            if found != dim {
                return Err(ConfigError(format!(
                    "{name} has dimension {found}, A has dimension {dim}"
                )));
            }
        }
        Ok(assemble_triple(c, j)?)
    }

    fn describe_source<T>(src: &Option<Source<T>>) -> serde_json::Value {
        match src {
            None => serde_json::Value::Null,
            Some(Source::Path(p)) => json!(p.display().to_string()),
            Some(Source::Inline(_)) => json!("inline"),
        }
    }
}

fn finite(name: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError(format!("{name} must be finite")))
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Runs `config.command`.
pub fn run(config: &RunConfig) -> Result<Report, ConfigError> {
    let command = config
        .command
        .ok_or_else(|| ConfigError("no command given".into()))?;
    let t = config.tolerances;
    for (name, v) in [
        ("exact", t.exact),
        ("construction", t.construction),
        ("derived", t.derived),
        ("evolution", t.evolution),
        ("symmetry", t.symmetry),
        ("finite_difference", t.finite_difference),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(ConfigError(format!(
                "tolerance \"{name}\" must be positive"
            )));
        }
    }
    match command {
        Command::OneLevel => one_level(config),
        Command::Decompose => decompose(config),
        Command::Invariance => invariance(config),
        Command::Alternatives => alternatives_cmd(config),
        Command::KdeformVerify => kdeform_verify(config),
        Command::Pictures => pictures(config),
        Command::Recurrence => recurrence(config),
        Command::Foscillator => foscillator(config),
        Command::AltHamiltonian => alt_hamiltonian(config),
    }
}

fn report(config: &RunConfig, command: Command, parameters: serde_json::Value) -> Report {
    let mut parameters = parameters;
    parameters["tolerances"] = json!(config.tolerances);
    Report::new(
        command.name(),
        config.seed(),
        config.instances(),
        parameters,
    )
}

fn one_level(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let tol = cfg.tolerances;
    let omega = finite("omega", cfg.omega.unwrap_or(1.0))?;
    let t = finite("t", cfg.t.unwrap_or(FRAC_PI_2))?;
    let q0 = finite("q0", cfg.q0.unwrap_or(1.0))?;
    let p0 = finite("p0", cfg.p0.unwrap_or(0.0))?;
    let mut rep = report(
        cfg,
        Command::OneLevel,
        json!({"omega": omega, "t": t, "q0": q0, "p0": p0}),
    );

    let h = ComplexMatrix::from_element(1, 1, c(omega));
    let a = realization::realify_hamiltonian(&h)?;
    let x0 = RealPoint::from_qp(&[q0], &[p0])?;
    let evolve = |s: f64| -> Result<(f64, f64), ConfigError> {
        let x = evolve_schrodinger(&a, &x0, s)?;
        Ok((x.q()[0], x.p()[0]))
    };

    let (q, p) = evolve(t)?;
    let (q_exact, p_exact) = realization::one_level_trajectory(omega, q0, p0, t);
    rep.line(format!(
        "(q, p) = ({q:.6}, {p:.6}) at t = {t} from ({q0}, {p0})"
    ));
    rep.compare("q(t)", q, q_exact, tol.evolution);
    rep.compare("p(t)", p, p_exact, tol.evolution);

    let e0 = realization::one_level_energy(omega, q0, p0);
    let dt = 1e-3;
    let mut drift: f64 = 0.0;
    let mut eom: f64 = 0.0;
    for i in 0..=1000 {
        let s = i as f64 * 1e-2;
        let (qs, ps) = evolve(s)?;
        drift = drift.max((realization::one_level_energy(omega, qs, ps) - e0).abs());
        let (q_plus, _) = evolve(s + dt)?;
        let (q_minus, _) = evolve(s - dt)?;
        let accel = (q_plus - 2.0 * qs + q_minus) / (dt * dt);
        eom = eom.max((accel + omega * omega * qs).abs());
    }
    rep.residual("energy drift over [0, 10]", drift, tol.derived);
    rep.residual(
        "finite-difference q'' + omega^2 q over [0, 10]",
        eom,
        tol.finite_difference,
    );
    Ok(rep)
}

fn decompose(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let tol = cfg.tolerances;
    if let Some(a) = cfg.real(&cfg.a)? {
        let a = DynamicsMatrix::new(a)?;
        let c = match cfg.real(&cfg.c)? {
            Some(c) => PoissonTensor::new(c)?,
            None => PoissonTensor::canonical(a.dim() / 2)?,
        };
        if c.dim() != a.dim() {
            return Err(ConfigError(format!(
                "C has dimension {}, A has dimension {}",
                c.dim(),
                a.dim()
            )));
        }
        let mut rep = report(
            cfg,
            Command::Decompose,
            json!({"a": RunConfig::describe_source(&cfg.a), "c": RunConfig::describe_source(&cfg.c)}),
        );
        match decompose_hamiltonian(&a, &c) {
            Ok(h) => {
                let scale = numerics::max_abs(a.matrix()).max(1.0);
                let residual = dynamics::recomposition_residual(&a, &h, &c) / scale;
                let pass = rep.residual("A = H C (relative)", residual, tol.symmetry);
                rep.judged("hamiltonian", MatrixJson::from_real(&h), tol.symmetry, pass);
                rep.line(format!("H recovered ({}×{})", h.nrows(), h.ncols()));
            }
            Err(e) => rep.error("H = A C^-1 symmetric", tol.symmetry, &e),
        }
        return Ok(rep);
    }

    let mut rep = report(
        cfg,
        Command::Decompose,
        json!({"suite": "random", "max_modes": 8}),
    );
    let mut rng = sampling::rng(cfg.seed());
    let mut worst_recovery: f64 = 0.0;
    let mut worst_realified: f64 = 0.0;
    for _ in 0..cfg.instances() {
        let n = sampling::size(&mut rng, 1, 8);
        let c0 = PoissonTensor::canonical(n)?;
        let h = sampling::symmetric(&mut rng, 2 * n);
        let a = DynamicsMatrix::new(&h * c0.matrix())?;
        match decompose_hamiltonian(&a, &c0) {
            Ok(found) => {
                let err = numerics::max_abs_diff(&found, &h) / numerics::max_abs(&h).max(1.0);
                worst_recovery = worst_recovery.max(err);
            }
            Err(e) => {
                rep.error("random A = H C0: H recovered (relative)", tol.symmetry, &e);
                return Ok(rep);
            }
        }
        let hc = sampling::hermitean(&mut rng, n);
        let a = realization::realify_hamiltonian(&hc)?;
        let q = realization::realify_observable(&hc)?;
        match decompose_hamiltonian(&a, &c0) {
            Ok(found) => {
                let err = numerics::max_abs_diff(&found, &q) / numerics::max_abs(&q).max(1.0);
                worst_realified = worst_realified.max(err);
            }
            Err(e) => {
                rep.error(
                    "realified Hermitean H decomposes to its observable",
                    tol.symmetry,
                    &e,
                );
                return Ok(rep);
            }
        }
    }
    if cfg.instances() > 0 {
        rep.residual(
            "random A = H C0: H recovered (relative)",
            worst_recovery,
            tol.symmetry,
        );
        rep.residual(
            "realified Hermitean H decomposes to its observable (relative)",
            worst_realified,
            tol.symmetry,
        );
    }

    let mut planted = sampling::real_matrix(&mut rng, 4);
    planted[(0, 1)] += 1.0;
    let asymmetry = numerics::symmetry_residual(&planted);
    let a = DynamicsMatrix::new(&planted * PoissonTensor::canonical(2)?.matrix())?;
    let outcome = decompose_hamiltonian(&a, &PoissonTensor::canonical(2)?);
    rep.outcome(
        "planted non-symmetric H rejected",
        matches!(outcome, Err(Error::NotHamiltonian { .. })),
        tol.symmetry,
        format!("|H - H^T| = {asymmetry:.3e}"),
    );
    Ok(rep)
}

fn invariance(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let tol = cfg.tolerances;
    let (a, triple) = cfg.dynamics(1.0)?;
    let times = cfg.times(&[0.1, 1.0, 10.0])?;
    let mut rep = report(
        cfg,
        Command::Invariance,
        json!({
            "system": cfg.system(),
            "omega": cfg.omega.unwrap_or(1.0),
            "modes": a.dim() / 2,
            "times": times,
            "a": RunConfig::describe_source(&cfg.a),
        }),
    );

    let inv = check_invariance(&a, &triple, tol.derived)?;
    rep.residual("A^T Omega + Omega A", inv.symplectic.residual, tol.derived);
    rep.residual("A J - J A", inv.complex.residual, tol.derived);
    rep.residual("A^T s + s A", inv.metric.residual, tol.derived);
    for &t in &times {
        let (ds, dw) = flow_preservation(&a, &triple, t)?;
        rep.residual(format!("flow preserves s at t={t}"), ds, tol.evolution);
        rep.residual(format!("flow preserves Omega at t={t}"), dw, tol.evolution);
    }

    if cfg.instances() > 0 {
        let mut rng = sampling::rng(cfg.seed());
        let mut worst_inv: f64 = 0.0;
        let mut worst_flow: f64 = 0.0;
        for _ in 0..cfg.instances() {
            let n = sampling::size(&mut rng, 1, 8);
            let a = realization::realify_hamiltonian(&sampling::hermitean(&mut rng, n))?;
            let triple = standard_triple(n)?;
            let inv = check_invariance(&a, &triple, tol.derived)?;
            worst_inv = worst_inv
                .max(inv.symplectic.residual)
                .max(inv.complex.residual)
                .max(inv.metric.residual);
            for &t in &times {
                let (ds, dw) = flow_preservation(&a, &triple, t)?;
                worst_flow = worst_flow.max(ds).max(dw);
            }
        }
        rep.residual(
            "random invariant systems: invariance",
            worst_inv,
            tol.derived,
        );
        rep.residual(
            "random invariant systems: flow preservation",
            worst_flow,
            tol.evolution,
        );
    }
    Ok(rep)
}

#[derive(Serialize)]
struct PowerRow {
    power: u32,
    decomposable: bool,
    symmetry: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    unitary: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    genuinely_alternative: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
}

fn transport_checks(
    rep: &mut Report,
    label: &str,
    t: &SymmetryTransformation,
    a: &DynamicsMatrix,
    triple: &StructureTriple,
    h: &RealMatrix,
    tol: f64,
) -> Option<alternatives::AlternativeDescription> {
    match alternatives::transport(t, a, triple, h) {
        Ok(alt) => {
            let scale = numerics::max_abs(a.matrix()).max(1.0);
            let metric_scale = numerics::max_abs(alt.triple.metric()).max(1.0);
            let r = alt.residuals;
            rep.residual(format!("{label}: A = H_T C_T"), r.hamiltonian, tol * scale);
            rep.residual(
                format!("{label}: J_T A = A J_T"),
                r.complex_commutes,
                tol * scale,
            );
            rep.residual(format!("{label}: J_T^2 = -1"), r.complex_square, tol);
            rep.residual(
                format!("{label}: C_T J_T = s_T"),
                r.metric,
                tol * metric_scale,
            );
            Some(alt)
        }
        Err(e) => {
            rep.error(format!("{label}: transport"), tol, &e);
            None
        }
    }
}

fn alternatives_cmd(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let tol = cfg.tolerances;
    let (a, triple) = cfg.dynamics(2.0)?;
    let max_power = cfg.max_power.unwrap_or(4);
    let enumeration = symmetry_powers(&a, max_power)?;
    let mut rep = report(
        cfg,
        Command::Alternatives,
        json!({
            "system": cfg.system(),
            "omega": cfg.omega.unwrap_or(2.0),
            "modes": a.dim() / 2,
            "max_power": max_power,
            "commutant": cfg.commutant.unwrap_or(false),
            "a": RunConfig::describe_source(&cfg.a),
        }),
    );

    let c = triple.poisson();
    let h = match decompose_hamiltonian(&a, c) {
        Ok(h) => h,
        Err(e) => {
            rep.error("A = H C decomposition", tol.symmetry, &e);
            return Ok(rep);
        }
    };
    let classes = classify_powers(&a, c, max_power)?;
    let omega = numerics::solve_or_invert(c.matrix())?;

    let mut rows = Vec::new();
    let mut power = RealMatrix::identity(a.dim(), a.dim());
    for class in &classes {
        let k = class.power;
        if k > 0 {
            power = &power * a.matrix();
        }
        if k % 2 == 1 {
            rep.residual(
                format!("A^{k} C^-1 symmetric (relative)"),
                class.symmetry_residual,
                tol.symmetry,
            );
        } else {
            let candidate = &power * &omega;
            let residual = numerics::antisymmetry_residual(&candidate)
                / numerics::max_abs(&candidate).max(1.0);
            rep.residual(
                format!("A^{k} C^-1 antisymmetric (relative)"),
                residual,
                tol.symmetry,
            );
        }

        let mut row = PowerRow {
            power: k,
            decomposable: class.decomposable,
            symmetry: false,
            unitary: None,
            genuinely_alternative: None,
            skipped: None,
        };
        if let Some(s) = enumeration.skipped.iter().find(|s| s.power == k) {
            row.skipped = Some(s.reason.clone());
            rep.line(format!("A^{k}: skipped ({})", s.reason));
        } else if let Some(t) = enumeration
            .symmetries
            .iter()
            .find(|t| t.origin() == SymmetryOrigin::Power(k))
        {
            row.symmetry = true;
            if k > 0 {
                let label = format!("A^{k}");
                if let Some(alt) =
                    transport_checks(&mut rep, &label, t, &a, &triple, &h, tol.symmetry)
                {
                    row.unitary = Some(alt.unitary);
                    row.genuinely_alternative = Some(alt.genuinely_alternative);
                    rep.line(format!(
                        "A^{k}: symmetry, {}, {}, {}, transported residual {:.1e}",
                        if alt.unitary {
                            "unitary"
                        } else {
                            "non-unitary"
                        },
                        if alt.genuinely_alternative {
                            "new Hermitean structure"
                        } else {
                            "same structure up to scale"
                        },
                        if class.decomposable {
                            "A^k = (symmetric)·C"
                        } else {
                            "not of the form (symmetric)·C"
                        },
                        alt.residuals.max()
                    ));
                }
            }
        }
        rows.push(row);
    }
    rep.data("powers", rows);

    if cfg.commutant.unwrap_or(false) {
        let basis = commutant_basis(&a)?;
        let mut entries = Vec::new();
        for (i, t) in basis.into_iter().enumerate() {
            match SymmetryTransformation::new(t, &a, SymmetryOrigin::Commutant(i)) {
                Ok(t) => {
                    let label = format!("commutant[{i}]");
                    let alt = transport_checks(&mut rep, &label, &t, &a, &triple, &h, tol.symmetry);
                    entries.push(json!({
                        "index": i,
                        "unitary": alt.as_ref().map(|a| a.unitary),
                        "genuinely_alternative": alt.as_ref().map(|a| a.genuinely_alternative),
                    }));
                }
                Err(e) => entries.push(json!({"index": i, "skipped": e.to_string()})),
            }
        }
        rep.data("commutant", entries);
    }
    Ok(rep)
}

#[derive(Default)]
struct Worst {
    associativity: f64,
    antisymmetry: f64,
    jacobi: f64,
    derivation: f64,
    fk_product: f64,
    fk_bracket: f64,
    fk_inverse: f64,
    kscalar_hermitean: f64,
    kscalar_min: f64,
}

fn kalgebra_instance(
    rng: &mut SuiteRng,
    d: &DeformationOperator,
    w: &mut Worst,
) -> crate::error::Result<()> {
    let n = d.dim();
    let (a, b, cc) = (
        sampling::complex_matrix(rng, n),
        sampling::complex_matrix(rng, n),
        sampling::complex_matrix(rng, n),
    );
    let pr = |x: &ComplexMatrix, y: &ComplexMatrix| kdeform::kproduct(x, y, d);
    let br = |x: &ComplexMatrix, y: &ComplexMatrix| kdeform::kbracket(x, y, d);
    let f = |x: &ComplexMatrix| kdeform::fk_map(x, d);

    w.associativity = w.associativity.max(numerics::max_abs_diff(
        &pr(&pr(&a, &b)?, &cc)?,
        &pr(&a, &pr(&b, &cc)?)?,
    ));
    w.antisymmetry = w
        .antisymmetry
        .max(numerics::max_abs_diff(&br(&a, &b)?, &(-br(&b, &a)?)));
    let jacobi = br(&a, &br(&b, &cc)?)? + br(&b, &br(&cc, &a)?)? + br(&cc, &br(&a, &b)?)?;
    w.jacobi = w.jacobi.max(numerics::max_abs(&jacobi));
    let lhs = br(&a, &pr(&b, &cc)?)?;
    let rhs = pr(&br(&a, &b)?, &cc)? + pr(&b, &br(&a, &cc)?)?;
    w.derivation = w.derivation.max(numerics::max_abs_diff(&lhs, &rhs));
    w.fk_product = w.fk_product.max(numerics::max_abs_diff(
        &(f(&a)? * f(&b)?),
        &f(&pr(&a, &b)?)?,
    ));
    w.fk_bracket = w.fk_bracket.max(numerics::max_abs_diff(
        &numerics::commutator(&f(&a)?, &f(&b)?),
        &f(&br(&a, &b)?)?,
    ));
    w.fk_inverse = w.fk_inverse.max(numerics::max_abs_diff(
        &kdeform::fk_map(&f(&a)?, &d.negated()?)?,
        &a,
    ));

    let (p1, p2) = (sampling::state(rng, n), sampling::state(rng, n));
    let h12 = kdeform::kscalar(&p1, &p2, d)?;
    let h21 = kdeform::kscalar(&p2, &p1, d)?;
    w.kscalar_hermitean = w.kscalar_hermitean.max((h12 - h21.conj()).norm());
    let norm = kdeform::kscalar(&p1, &p1, d)?.re / p1.norm_squared();
    w.kscalar_min = if w.kscalar_min == 0.0 {
        norm
    } else {
        w.kscalar_min.min(norm)
    };
    Ok(())
}

fn kdeform_verify(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let tol = cfg.tolerances;
    let fixed = cfg
        .deformation
        .as_ref()
        .map(|s| s.load(cfg.base()).and_then(|d| d.to_operator()))
        .transpose()?;
    let lambdas = match (cfg.lambda, &fixed) {
        (Some(l), _) => vec![finite("lambda", l)?],
        (None, Some(d)) => vec![d.lambda()],
        (None, None) => vec![0.1, 1.0],
    };
    let times = cfg.times(&[0.5, 2.0, 10.0])?;
    let mut rep = report(
        cfg,
        Command::KdeformVerify,
        json!({
            "lambdas": lambdas,
            "max_dim": 6,
            "times": times,
            "deformation": RunConfig::describe_source(&cfg.deformation),
        }),
    );

    let mut rng = sampling::rng(cfg.seed());
    let mut w = Worst::default();
    for _ in 0..cfg.instances() {
        for &lambda in &lambdas {
            let d = match &fixed {
                Some(d) => d.with_lambda(lambda)?,
                None => {
                    let n = sampling::size(&mut rng, 2, 6);
                    DeformationOperator::new(
                        Kernel::Full(sampling::hermitean(&mut rng, n)),
                        lambda,
                    )?
                }
            };
            if let Err(e) = kalgebra_instance(&mut rng, &d, &mut w) {
                rep.error("K-algebra instance", tol.derived, &e);
                return Ok(rep);
            }
        }
    }
    if cfg.instances() > 0 {
        rep.residual(
            "associativity of the K-product",
            w.associativity,
            tol.derived,
        );
        rep.residual("antisymmetry of [,]_K", w.antisymmetry, tol.derived);
        rep.residual("Jacobi identity of [,]_K", w.jacobi, tol.derived);
        rep.residual("derivation rule of [,]_K", w.derivation, tol.derived);
        rep.residual("F_K(A) F_K(B) = F_K(A ._K B)", w.fk_product, tol.derived);
        rep.residual(
            "[F_K(A), F_K(B)] = F_K([A, B]_K)",
            w.fk_bracket,
            tol.derived,
        );
        rep.residual("F_-K inverts F_K", w.fk_inverse, tol.derived);
        rep.residual(
            "<p1|p2>_K = conj <p2|p1>_K",
            w.kscalar_hermitean,
            tol.derived,
        );
        rep.outcome(
            "<psi|psi>_K > 0",
            w.kscalar_min > 0.0,
            tol.derived,
            format!("smallest <psi|psi>_K / <psi|psi> = {:.3e}", w.kscalar_min),
        );
    }

    // constants of motion on a Fock space with H = n + 1/2
    let ladder = build_fock(6)?;
    let hamiltonian = ladder.hamiltonian();
    for &lambda in &lambdas {
        let k_diag = sampling::uniform_table(&mut rng, 6, -1.0, 1.0);
        let d = DeformationOperator::new(Kernel::Diagonal(k_diag), lambda)?;
        let k = d.kernel().to_matrix();
        let commuting = kdeform::commutation_residual(&k, &hamiltonian)?;
        rep.residual(
            format!("lambda={lambda}: [K(n), H] = 0"),
            commuting,
            tol.construction,
        );
        let psi = sampling::state(&mut rng, 6);
        let n0 = kdeform::kscalar(&psi, &psi, &d)?.re;
        let mut drift: f64 = 0.0;
        for &t in &times {
            let psi_t = dynamics::evolve_state(&hamiltonian, &psi, t)?;
            drift = drift.max((kdeform::kscalar(&psi_t, &psi_t, &d)?.re - n0).abs() / n0);
        }
        rep.residual(
            format!("lambda={lambda}: <psi(t)|psi(t)>_K conserved (relative)"),
            drift,
            tol.evolution,
        );
        let generic = sampling::hermitean(&mut rng, 6);
        let generic_ok = kdeform::is_constant_of_motion(&generic, &hamiltonian, tol.construction)?;
        rep.outcome(
            format!("lambda={lambda}: non-commuting K is not a constant of motion"),
            !generic_ok,
            tol.construction,
            format!(
                "|[K, H]| = {:.3e}",
                kdeform::commutation_residual(&generic, &hamiltonian)?
            ),
        );
    }
    Ok(rep)
}

fn pictures(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let tol = cfg.tolerances;
    let times = cfg.times(&[0.1, 1.0, 5.0])?;
    let fixed_h = cfg.complex(&cfg.h)?;
    let fixed_b = cfg.complex(&cfg.b)?;
    if let (Some(h), Some(b)) = (&fixed_h, &fixed_b) {
        numerics::ensure_same_shape("B vs H", b, h)?;
    }
    if fixed_b.is_some() && fixed_h.is_none() {
        return Err(ConfigError("\"b\" needs \"h\"".into()));
    }
    let mut rep = report(
        cfg,
        Command::Pictures,
        json!({
            "times": times,
            "max_modes": 8,
            "h": RunConfig::describe_source(&cfg.h),
            "b": RunConfig::describe_source(&cfg.b),
        }),
    );

    let mut rng = sampling::rng(cfg.seed());
    let mut worst = vec![0.0f64; times.len()];
    for _ in 0..cfg.instances() {
        let h = match &fixed_h {
            Some(h) => h.clone(),
            None => {
                let n = sampling::size(&mut rng, 1, 8);
                sampling::hermitean(&mut rng, n)
            }
        };
        let n = h.nrows();
        let b = match &fixed_b {
            Some(b) => b.clone(),
            None => sampling::hermitean(&mut rng, n),
        };
        let psi: ComplexState = sampling::state(&mut rng, n);
        for (i, &t) in times.iter().enumerate() {
            let agreement = ehrenfest_check(&h, &b, &psi, t, tol.evolution)?;
            worst[i] = worst[i].max(agreement.residual);
        }
    }
    if cfg.instances() > 0 {
        for (t, w) in times.iter().zip(&worst) {
            rep.residual(
                format!("Schrodinger = Heisenberg = Ehrenfest at t={t}"),
                *w,
                tol.evolution,
            );
        }
    }
    Ok(rep)
}

/// `(2s-1)!! / (2s)!!`
fn double_factorial_ratio(s: usize) -> f64 {
    (1..=s).fold(1.0, |acc, k| acc * (2 * k - 1) as f64 / (2 * k) as f64)
}

fn recurrence(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let tol = cfg.tolerances;
    let epsilon = finite("epsilon", cfg.epsilon.unwrap_or(0.0))?;
    let dim = cfg.dim.unwrap_or(12);
    let ladder = build_fock(dim)?;
    let mut rep = report(
        cfg,
        Command::Recurrence,
        json!({"epsilon": epsilon, "dim": dim}),
    );

    let table = match oscillator::solve_standard_commutation(epsilon, dim) {
        Ok(t) => t,
        Err(e) => {
            rep.error("e^(lambda K) positive", tol.exact, &e);
            return Ok(rep);
        }
    };
    let mut all = true;
    for (n, &w) in table.weights().iter().enumerate() {
        all &= if n % 2 == 1 {
            rep.compare(format!("e^(lambda K({n}))"), w, 1.0, tol.exact)
        } else {
            let expected = 1.0 + double_factorial_ratio(n / 2) * epsilon;
            rep.compare(format!("e^(lambda K({n}))"), w, expected, tol.construction)
        };
    }
    rep.judged("table", table.weights(), tol.construction, all);

    let comm = oscillator::kcommutator_fock(&ladder, table.weights())?;
    let mut interior: f64 = 0.0;
    for i in 0..dim - 1 {
        for j in 0..dim - 1 {
            let target = if i == j { 1.0 } else { 0.0 };
            interior = interior.max((comm[(i, j)] - c(target)).norm());
        }
    }
    rep.residual(
        "[a, a+]_K = 1 on interior levels",
        interior,
        tol.construction,
    );
    let last = dim - 1;
    rep.compare(
        format!("[a, a+]_K at boundary level {last}"),
        comm[(last, last)].re,
        -(last as f64) * table.weights()[last - 1],
        tol.construction,
    );
    rep.line(format!(
        "e^(lambda K) = [{}]",
        table
            .weights()
            .iter()
            .map(|w| format!("{w:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    Ok(rep)
}

fn foscillator(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let tol = cfg.tolerances;
    let dim = cfg.dim.unwrap_or(16);
    let lambda = cfg.lambda.unwrap_or(0.2);
    let spec = cfg.f.clone().unwrap_or(TableSpec::Named {
        name: "affine".into(),
        lambda: Some(lambda),
    });
    let f = spec.resolve(TableRole::F, dim, Some(lambda), cfg.base())?;
    let fosc = build_f_oscillator(&f, dim)?;
    let epsilon = finite("epsilon", cfg.epsilon.unwrap_or(0.4))?;
    let times = cfg.times(&[0.5, 1.0, 5.0])?;
    let mut rep = report(
        cfg,
        Command::Foscillator,
        json!({"f": spec.describe(), "lambda": lambda, "dim": dim, "epsilon": epsilon, "times": times}),
    );

    rep.residual(
        "[A, A+] = phi(n) on interior levels",
        fosc.phi_residual(),
        tol.construction,
    );
    let last = dim - 1;
    let comm = fosc.commutator();
    rep.compare(
        format!("[A, A+] at boundary level {last}"),
        comm[(last, last)].re,
        -fosc.big_f()[last],
        tol.construction,
    );
    rep.judged("phi", fosc.phi(), tol.construction, rep.checks[0].pass);
    for &t in &times {
        rep.residual(
            format!("e^(iHt) A e^(-iHt) = e^(-it) A at t={t}"),
            fosc.motion_phase_residual(t)?,
            tol.evolution,
        );
    }

    let blocks = fosc.invariant_blocks();
    for b in &blocks {
        rep.residual(
            format!("levels {}..{} closed under A, A+", b.start, b.end),
            b.coupling,
            tol.construction,
        );
    }
    rep.data("invariant_blocks", &blocks);
    if blocks.len() > 1 {
        rep.line(format!(
            "f vanishes inside the space: {} invariant blocks, the first spans levels 0..{}",
            blocks.len(),
            blocks[0].end
        ));
    }

    match oscillator::dual_scalar_products(&fosc) {
        Ok(d) => {
            let mut worst: f64 = 0.0;
            let mut product = 1.0;
            for (n, norm) in d.h1_norms.iter().enumerate() {
                if n > 0 {
                    product *= f[n] * f[n];
                }
                worst = worst.max((norm - product).abs() / product.max(1.0));
            }
            let pass = rep.residual(
                "h1 norms of |N> = prod f^2(k) (relative)",
                worst,
                tol.derived,
            );
            rep.judged("h1_norms", &d.h1_norms, tol.derived, pass);
            rep.residual("|N> orthogonal in h1", d.h1_offdiagonal, tol.derived);
            rep.residual("|N> orthonormal in h2", d.h2_orthonormality, tol.derived);
            rep.residual(
                "<M|[A, A+]|N>_h2 = delta on interior levels",
                d.h2_commutator_residual,
                tol.derived,
            );
        }
        Err(Error::ZeroOfF { index }) => {
            rep.data(
                "dual_scalar_products",
                format!("not built: f vanishes at level {index}"),
            );
        }
        Err(e) => rep.error("dual scalar products", tol.derived, &e),
    }

    let table = oscillator::solve_standard_commutation(epsilon, dim)?;
    rep.residual(
        format!("F_K(a) = a f(n) for the epsilon={epsilon} table"),
        oscillator::fk_consistency_residual(fosc.ladder(), &table)?,
        tol.construction,
    );
    Ok(rep)
}

fn alt_hamiltonian(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let tol = cfg.tolerances;
    let dim = cfg.dim.unwrap_or(16);
    let lambda = cfg.lambda.unwrap_or(0.5);
    let spec = cfg.htilde.clone().unwrap_or(TableSpec::Named {
        name: "sinh".into(),
        lambda: Some(lambda),
    });
    let htilde = spec.resolve(TableRole::Htilde, dim, Some(lambda), cfg.base())?;
    let ladder = build_fock(dim)?;
    let mut rep = report(
        cfg,
        Command::AltHamiltonian,
        json!({"htilde": spec.describe(), "lambda": lambda, "dim": dim}),
    );

    let solution = match oscillator::solve_alternative_hamiltonian(&ladder, &htilde) {
        Ok(s) => s,
        Err(e) => {
            rep.error(
                "e^(lambda K) = (n + 1/2) / H~(n) positive",
                tol.construction,
                &e,
            );
            return Ok(rep);
        }
    };
    let mut product: f64 = 0.0;
    for (n, w) in solution.weights.iter().enumerate() {
        if let Some(w) = w {
            product = product.max((htilde[n] * w - (n as f64 + 0.5)).abs());
        }
    }
    rep.residual(
        "H~ e^(lambda K) = n + 1/2 on regular levels",
        product,
        tol.construction,
    );
    rep.residual(
        "[H~, a]_K = -a and [H~, a+]_K = a+ on interior regular levels",
        solution.motion_residual,
        tol.derived,
    );
    rep.judged(
        "weights",
        &solution.weights,
        tol.construction,
        product <= tol.construction,
    );
    rep.data("singular_modes", &solution.singular_modes);
    if !solution.singular_modes.is_empty() {
        rep.line(format!(
            "H~ vanishes at levels {:?}; those levels are excluded",
            solution.singular_modes
        ));
    }
    if let TableSpec::Named {
        name,
        lambda: Some(l),
    } = &spec
    {
        if NamedTable::parse(name, Some(*l))? == (NamedTable::Sinh { lambda: *l }) {
            let mut worst: f64 = 0.0;
            for (n, w) in solution.weights.iter().enumerate().skip(1) {
                let x = n as f64;
                let expected = (x + 0.5) * l.sinh() / (l * x).sinh();
                worst = worst.max((w.unwrap_or(f64::NAN) - expected).abs());
            }
            rep.residual(
                "e^(lambda K(n)) = (n + 1/2) sinh(lambda) / sinh(lambda n) for n >= 1",
                worst,
                tol.construction,
            );
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cmd(cmd: Command, edit: impl FnOnce(&mut RunConfig)) -> Report {
        let mut cfg = RunConfig::for_command(cmd);
        cfg.instances = Some(10);
        edit(&mut cfg);
        run(&cfg).unwrap()
    }

    #[test]
    fn every_command_passes_by_default() {
        for cmd in Command::ALL {
            let rep = run_cmd(cmd, |_| {});
            assert!(rep.passed, "{cmd}: {}", rep.to_text());
            assert!(!rep.checks.is_empty(), "{cmd}");
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn one_level_quarter_period() {
        let rep = run_cmd(Command::OneLevel, |c| c.t = Some(1.5707963));
        assert!(rep.passed);
        let q = rep.checks[0].value.unwrap();
        let p = rep.checks[1].value.unwrap();
        assert!(q.abs() < 1e-6 && (p + 1.0).abs() < 1e-6);
    }

    #[test]
    fn recurrence_all_ones() {
        let rep = run_cmd(Command::Recurrence, |c| {
            c.epsilon = Some(0.0);
            c.dim = Some(12);
        });
        assert!(rep.passed);
        assert_eq!(rep.data["table"]["value"], json!(vec![1.0; 12]));
    }

    #[test]
    fn recurrence_positivity_failure_names_check() {
        let rep = run_cmd(Command::Recurrence, |c| c.epsilon = Some(-1.0));
        assert_eq!(rep.exit_code(), 1);
        assert_eq!(rep.first_failure.as_deref(), Some("e^(lambda K) positive"));
    }

    #[test]
    fn alternatives_lists_square_as_non_unitary() {
        let rep = run_cmd(Command::Alternatives, |c| c.max_power = Some(4));
        assert!(rep.passed, "{}", rep.to_text());
        let rows = rep.data["powers"].as_array().unwrap();
        let square = &rows[2];
        assert_eq!(square["symmetry"], json!(true));
        assert_eq!(square["unitary"], json!(false));
        assert_eq!(square["decomposable"], json!(false));
        assert_eq!(rows[3]["decomposable"], json!(true));
    }

    #[test]
    fn alt_hamiltonian_reports_singular_vacuum() {
        let rep = run_cmd(Command::AltHamiltonian, |_| {});
        assert!(rep.passed);
        assert_eq!(rep.data["singular_modes"], json!([0]));
    }

    #[test]
    fn foscillator_zero_of_f_is_a_block() {
        let mut f = vec![1.0; 10];
        f[3] = 0.0;
        let rep = run_cmd(Command::Foscillator, |c| {
            c.f = Some(TableSpec::Values(f));
            c.dim = Some(10);
        });
        assert!(rep.passed, "{}", rep.to_text());
        assert_eq!(rep.data["invariant_blocks"][0]["end"], json!(3));
    }

    #[test]
    fn config_errors() {
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(run(&RunConfig::default()).is_err());
        let mut cfg = RunConfig::for_command(Command::Recurrence);
        cfg.dim = Some(1);
        assert!(run(&cfg).is_err());
        let mut cfg = RunConfig::for_command(Command::Invariance);
        cfg.system = Some(System::Matrix);
        assert!(run(&cfg).is_err());
        let mut cfg = RunConfig::for_command(Command::Alternatives);
        cfg.max_power = Some(9);
        assert!(run(&cfg).is_err());
        let mut cfg = RunConfig::for_command(Command::OneLevel);
        cfg.tolerances.derived = -1.0;
        assert!(run(&cfg).is_err());
    }

    #[test]
    fn decompose_matrix_input() {
        let cfg = RunConfig::from_json(
            r#"{"command": "decompose", "a": {"rows": 2, "cols": 2, "data": [0, 3, -3, 0]}}"#,
        )
        .unwrap();
        let rep = run(&cfg).unwrap();
        assert!(rep.passed);
        assert_eq!(
            rep.data["hamiltonian"]["value"]["data"],
            json!([3.0, 0.0, 0.0, 3.0])
        );
        let cfg = RunConfig::from_json(
            r#"{"command": "decompose", "a": {"rows": 2, "cols": 2, "data": [1, 0, 0, 0]}}"#,
        )
        .unwrap();
        assert_eq!(run(&cfg).unwrap().exit_code(), 1);
    }

    #[test]
    fn deterministic_json() {
        let cfg = RunConfig {
            instances: Some(5),
            ..RunConfig::for_command(Command::Pictures)
        };
        assert_eq!(run(&cfg).unwrap().to_json(), run(&cfg).unwrap().to_json());
        let other = RunConfig {
            seed: Some(1),
            ..cfg.clone()
        };
        assert_ne!(run(&cfg).unwrap().to_json(), run(&other).unwrap().to_json());
    }
}
