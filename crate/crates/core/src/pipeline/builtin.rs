use std::time::{Duration, Instant};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::registry::{Module, ModuleContext, ModuleError, Registry};
use super::{Capability, MetricCategory, ParamMap, PayloadKind, PipelinePayload, TimeTag};
use crate::circuit::{
    bell_template, euler_template, expressibility, identity_template, mw_of_template, qcnn_ansatz,
    strongly_entangling_layer, Circuit, MwForm,
};
use crate::hamiltonian::{
    adiabatic_prepare, build_heisenberg_with, build_hubbard, evolve_dynamics, free_fermion_oracle, ground_energy_dense,
    DynamicsConfig, HamiltonianSpec, Lattice, Model, NoiseModel, Trace,
};
use crate::metrics::{q_score, quality, QScoreConfig, ScoreStatistic};
use crate::problems::{
    gen_maxcut, gen_portfolio, gen_salbp, gen_setcover, max_cut_exhaustive, portfolio_optimum_exhaustive,
    salbp_optimum_exhaustive, setcover_optimum_exhaustive, DomainSolution, Formulation, SalbpInstance,
};
use crate::qubo::{decode, maxcut_to_qubo, portfolio_to_qubo, salbp_to_qubo, setcover_to_qubo, PenaltyConfig, QuboModel};
use crate::solvers::{BruteForce, QuboSolver, SampleSet, SimulatedAnnealer, UniformSampler};

use Capability::{Serializable, Visualizable};
use MetricCategory::{Application, Circuit as CircuitCat, Complexity, Performance, Resource};

type Out = Result<PipelinePayload, ModuleError>;

fn parse<T: DeserializeOwned>(params: &ParamMap) -> Result<T, String> {
    let map: serde_json::Map<String, serde_json::Value> = params.clone().into_iter().collect();
    serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| e.to_string())
}

fn unexpected(module: &str, got: &PipelinePayload, want: PayloadKind) -> ModuleError {
    ModuleError::new(format!("{module} expected {want}, received {}", got.kind()))
}

fn boxed<M: Module + 'static>(m: M) -> Result<Box<dyn Module>, String> {
    Ok(Box::new(m))
}

pub(crate) fn register_all(r: &mut Registry) {
    r.register("Identity", "Passes its payload through both phases", &[Serializable], TimeTag::Classical, |p| {
        let params: IdentityParams = parse(p)?;
        let kind = params.kind.parse::<PayloadKind>().map_err(|e| e.to_string())?;
        boxed(Identity { kind })
    });
    r.register(
        "MaxCut",
        "Erdős–Rényi MaxCut instance; scores the returned cut",
        &[Serializable],
        TimeTag::Classical,
        |p| boxed(MaxCutProvider { params: parse(p)?, graph: None }),
    );
    r.register(
        "SetCover",
        "Random weighted set cover instance; scores the returned cover",
        &[Serializable],
        TimeTag::Classical,
        |p| boxed(SetCoverProvider { params: parse(p)?, inst: None }),
    );
    r.register(
        "Portfolio",
        "Cardinality-constrained Markowitz instance; scores the returned selection",
        &[Serializable],
        TimeTag::Classical,
        |p| {
            let params: PortfolioParams = parse(p)?;
            if params.k == 0 || params.k > params.n_assets {
                return Err(format!("k = {} must lie in 1..={}", params.k, params.n_assets));
            }
            boxed(PortfolioProvider { params, inst: None })
        },
    );
    r.register(
        "Salbp",
        "Assembly line balancing instance; scores the returned station plan",
        &[Serializable],
        TimeTag::Classical,
        |p| boxed(SalbpProvider { params: parse(p)?, inst: None }),
    );
    for (name, input) in [
        ("MaxCutQubo", PayloadKind::ProblemGraph),
        ("SetCoverQubo", PayloadKind::SetCoverInstance),
        ("PortfolioQubo", PayloadKind::PortfolioInstance),
        ("SalbpQubo", PayloadKind::SalbpInstance),
    ] {
        r.register(
            name,
            "Maps the instance to a QUBO; decodes the best sample on the way back",
            &[Serializable],
            TimeTag::Classical,
            move |p| {
                let cfg: PenaltyConfig = parse(p)?;
                cfg.validate().map_err(|e| e.to_string())?;
                boxed(QuboMapper { input, cfg, model: None })
            },
        );
    }
    r.register(
        "SimulatedAnnealer",
        "Metropolis simulated annealing over single-bit flips",
        &[Serializable],
        TimeTag::Quantum,
        |p| {
            let params: AnnealParams = parse(p)?;
            if params.sweeps == 0 || params.reads == 0 {
                return Err("sweeps and reads must be positive".into());
            }
            let mut sa = SimulatedAnnealer::new(params.sweeps, params.reads);
            if let (Some(a), Some(b)) = (params.beta_start, params.beta_end) {
                sa.beta_range = Some((a, b));
            }
            boxed(SolverModule { solver: Box::new(sa), time_limit_s: params.time_limit_s })
        },
    );
    r.register("BruteForce", "Exhaustive enumeration of every bitstring", &[Serializable], TimeTag::Quantum, |p| {
        let params: BruteParams = parse(p)?;
        boxed(SolverModule { solver: Box::new(BruteForce { max_optima: params.max_optima }), time_limit_s: params.time_limit_s })
    });
    r.register("RandomSampler", "Uniformly random bitstrings", &[Serializable], TimeTag::Quantum, |p| {
        let params: RandomParams = parse(p)?;
        if params.n_samples == 0 {
            return Err("n_samples must be positive".into());
        }
        boxed(SolverModule {
            solver: Box::new(UniformSampler { n_samples: params.n_samples }),
            time_limit_s: params.time_limit_s,
        })
    });
    r.register(
        "PqcTemplate",
        "Parametrized circuit template (strongly entangling, qcnn, euler, identity, bell)",
        &[Serializable],
        TimeTag::Classical,
        |p| {
            let params: PqcParams = parse(p)?;
            let circuit = params.build().map_err(|e| e.to_string())?;
            boxed(PqcTemplate { circuit })
        },
    );
    r.register(
        "CircuitMetrics",
        "Expressibility and Meyer–Wallach entanglement of a template",
        &[Serializable],
        TimeTag::Quantum,
        |p| {
            let params: CircuitMetricParams = parse(p)?;
            if params.n_pairs < 100 || params.bins == 0 || params.mw_samples == 0 {
                return Err("need n_pairs ≥ 100 and positive bins and mw_samples".into());
            }
            boxed(CircuitMetrics { params })
        },
    );
    r.register(
        "HubbardModel",
        "Fermi–Hubbard Hamiltonian under Jordan–Wigner",
        &[Serializable],
        TimeTag::Classical,
        |p| {
            let params: HubbardParams = parse(p)?;
            let lattice = params.lattice.build().map_err(|e| e.to_string())?;
            let h = build_hubbard(&lattice, params.t, params.v, params.spinful).map_err(|e| e.to_string())?;
            boxed(HamiltonianProvider { h })
        },
    );
    r.register(
        "HeisenbergModel",
        "Heisenberg Hamiltonian J·Σ(XX + YY + ZZ)",
        &[Serializable],
        TimeTag::Classical,
        |p| {
            let params: HeisenbergParams = parse(p)?;
            let lattice = params.lattice.build().map_err(|e| e.to_string())?;
            let h = build_heisenberg_with(&lattice, params.coupling).map_err(|e| e.to_string())?;
            boxed(HamiltonianProvider { h })
        },
    );
    r.register(
        "TrotterDynamics",
        "Trotterized CDW imbalance dynamics with optional gate noise",
        &[Serializable, Visualizable],
        TimeTag::Quantum,
        |p| {
            let params: EvolutionParams = parse(p)?;
            params.config(0).validate().map_err(|e| e.to_string())?;
            boxed(TrotterDynamics { params })
        },
    );
    r.register(
        "AdiabaticPrep",
        "Adiabatic preparation from dimer singlets; energy density per step",
        &[Serializable, Visualizable],
        TimeTag::Quantum,
        |p| {
            let params: EvolutionParams = parse(p)?;
            params.config(0).validate().map_err(|e| e.to_string())?;
            boxed(AdiabaticPrep { params })
        },
    );
    r.register(
        "QScore",
        "MaxCut Q-score scan of a solver against random and optimal cuts",
        &[Serializable, Visualizable],
        TimeTag::Quantum,
        |p| {
            let params: QScoreParams = parse(p)?;
            params.solver().map_err(|e| e.to_string())?;
            if params.sizes.is_empty() {
                return Err("sizes must not be empty".into());
            }
            boxed(QScoreModule { params })
        },
    );
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct IdentityParams {
    kind: String,
}

impl Default for IdentityParams {
    fn default() -> Self {
        Self { kind: "Nothing".into() }
    }
}

struct Identity {
    kind: PayloadKind,
}

impl Module for Identity {
    fn input_kind(&self) -> PayloadKind {
        self.kind
    }

    fn output_kind(&self) -> PayloadKind {
        self.kind
    }

    fn preprocess(&mut self, input: PipelinePayload, _ctx: &mut ModuleContext) -> Out {
        Ok(input)
    }
}

/// Emit quality metrics of `found` against the reference optimum.
fn score(ctx: &mut ModuleContext, found: &DomainSolution, optimum: Option<&DomainSolution>) -> Result<(), ModuleError> {
    ctx.emit("objective", found.reported_objective(), Application);
    ctx.emit("feasible", found.feasible, Application);
    ctx.emit("violations", found.violations.len(), Application);
    if let Some(opt) = optimum.filter(|o| o.feasible) {
        ctx.emit("optimum", opt.reported_objective(), Application);
        if found.feasible {
            let q = quality(found.reported_objective(), opt.reported_objective())?;
            ctx.emit("delta_abs", q.delta_abs, Application);
            if let Some(r) = q.delta_rel {
                ctx.emit("delta_rel", r, Application);
            }
            if let Some(t) = q.theta {
                ctx.emit("theta", t, Application);
            }
        }
    }
    Ok(())
}

fn solution(input: PipelinePayload, module: &str) -> Result<DomainSolution, ModuleError> {
    match input {
        PipelinePayload::DomainSolution(s) => Ok(s),
        other => Err(unexpected(module, &other, PayloadKind::DomainSolution)),
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct MaxCutParams {
    n: usize,
    edge_prob: f64,
    /// Largest instance whose optimum is computed for quality metrics.
    reference_limit: usize,
}

impl Default for MaxCutParams {
    fn default() -> Self {
        Self { n: 10, edge_prob: 0.5, reference_limit: 20 }
    }
}

struct MaxCutProvider {
    params: MaxCutParams,
    graph: Option<crate::problems::ProblemGraph>,
}

impl Module for MaxCutProvider {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Nothing
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::ProblemGraph
    }

    fn preprocess(&mut self, _input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let g = gen_maxcut(self.params.n, self.params.edge_prob, ctx.seed())?;
        ctx.emit("n_nodes", g.n(), Complexity);
        ctx.emit("n_edges", g.edges().len(), Complexity);
        self.graph = Some(g.clone());
        Ok(PipelinePayload::ProblemGraph(g))
    }

    fn postprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let found = solution(input, "MaxCut")?;
        let g = self.graph.as_ref().ok_or_else(|| ModuleError::new("postprocess before preprocess"))?;
        let optimum = (g.n() <= self.params.reference_limit).then(|| {
            let (value, side) = max_cut_exhaustive(g);
            DomainSolution::new(
                "maxcut",
                crate::problems::Assignment::Cut(side),
                -value,
                crate::problems::Sense::Maximize,
                vec![],
            )
        });
        score(ctx, &found, optimum.as_ref())?;
        Ok(PipelinePayload::DomainSolution(found))
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SetCoverParams {
    universe_size: usize,
    n_subsets: usize,
    density: f64,
    reference_limit: usize,
}

impl Default for SetCoverParams {
    fn default() -> Self {
        Self { universe_size: 8, n_subsets: 8, density: 0.3, reference_limit: 20 }
    }
}

struct SetCoverProvider {
    params: SetCoverParams,
    inst: Option<crate::problems::SetCoverInstance>,
}

impl Module for SetCoverProvider {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Nothing
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::SetCoverInstance
    }

    fn preprocess(&mut self, _input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let p = &self.params;
        let inst = gen_setcover(p.universe_size, p.n_subsets, p.density, ctx.seed())?;
        ctx.emit("universe_size", inst.universe_size, Complexity);
        ctx.emit("n_subsets", inst.subsets.len(), Complexity);
        self.inst = Some(inst.clone());
        Ok(PipelinePayload::SetCoverInstance(inst))
    }

    fn postprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let found = solution(input, "SetCover")?;
        let inst = self.inst.as_ref().ok_or_else(|| ModuleError::new("postprocess before preprocess"))?;
        let optimum = (inst.subsets.len() <= self.params.reference_limit).then(|| setcover_optimum_exhaustive(inst));
        score(ctx, &found, optimum.as_ref())?;
        Ok(PipelinePayload::DomainSolution(found))
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PortfolioParams {
    n_assets: usize,
    k: usize,
    formulation: Formulation,
    reference_limit: usize,
}

impl Default for PortfolioParams {
    fn default() -> Self {
        Self { n_assets: 8, k: 3, formulation: Formulation::Multiobj { lambda: 1.0 }, reference_limit: 20 }
    }
}

struct PortfolioProvider {
    params: PortfolioParams,
    inst: Option<crate::problems::PortfolioInstance>,
}

impl Module for PortfolioProvider {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Nothing
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::PortfolioInstance
    }

    fn preprocess(&mut self, _input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let p = &self.params;
        let inst = gen_portfolio(p.n_assets, p.k, p.formulation, ctx.seed())?;
        ctx.emit("n_assets", inst.n(), Complexity);
        ctx.emit("k", inst.k, Complexity);
        ctx.emit("formulation", inst.formulation.name(), Application);
        self.inst = Some(inst.clone());
        Ok(PipelinePayload::PortfolioInstance(inst))
    }

    fn postprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let found = solution(input, "Portfolio")?;
        let inst = self.inst.as_ref().ok_or_else(|| ModuleError::new("postprocess before preprocess"))?;
        let optimum = if inst.n() <= self.params.reference_limit { portfolio_optimum_exhaustive(inst) } else { None };
        score(ctx, &found, optimum.as_ref())?;
        Ok(PipelinePayload::DomainSolution(found))
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SalbpParams {
    n_tasks: usize,
    density: f64,
    cycle_time: f64,
    time_resolution: f64,
    max_stations: Option<usize>,
    reference_limit: usize,
}

impl Default for SalbpParams {
    fn default() -> Self {
        Self { n_tasks: 4, density: 0.3, cycle_time: 10.0, time_resolution: 1.0, max_stations: Some(3), reference_limit: 8 }
    }
}

struct SalbpProvider {
    params: SalbpParams,
    inst: Option<SalbpInstance>,
}

impl Module for SalbpProvider {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Nothing
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::SalbpInstance
    }

    fn preprocess(&mut self, _input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let p = &self.params;
        let mut inst = gen_salbp(p.n_tasks, p.density, p.cycle_time, p.time_resolution, ctx.seed())?;
        if let Some(m) = p.max_stations {
            inst = SalbpInstance::new(inst.times, inst.cycle_time, inst.precedence, m)?;
        }
        ctx.emit("n_tasks", inst.n_tasks(), Complexity);
        ctx.emit("n_precedences", inst.precedence.len(), Complexity);
        ctx.emit("max_stations", inst.max_stations, Complexity);
        self.inst = Some(inst.clone());
        Ok(PipelinePayload::SalbpInstance(inst))
    }

    fn postprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let found = solution(input, "Salbp")?;
        let inst = self.inst.as_ref().ok_or_else(|| ModuleError::new("postprocess before preprocess"))?;
        let optimum = if inst.n_tasks() <= self.params.reference_limit { salbp_optimum_exhaustive(inst) } else { None };
        score(ctx, &found, optimum.as_ref())?;
        Ok(PipelinePayload::DomainSolution(found))
    }
}

struct QuboMapper {
    input: PayloadKind,
    cfg: PenaltyConfig,
    model: Option<QuboModel>,
}

impl Module for QuboMapper {
    fn input_kind(&self) -> PayloadKind {
        self.input
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::Qubo
    }

    fn preprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let q = match input {
            PipelinePayload::ProblemGraph(g) if self.input == PayloadKind::ProblemGraph => maxcut_to_qubo(&g),
            PipelinePayload::SetCoverInstance(i) if self.input == PayloadKind::SetCoverInstance => {
                setcover_to_qubo(&i, &self.cfg)?
            }
            PipelinePayload::PortfolioInstance(i) if self.input == PayloadKind::PortfolioInstance => {
                portfolio_to_qubo(&i, &self.cfg)?
            }
            PipelinePayload::SalbpInstance(i) if self.input == PayloadKind::SalbpInstance => salbp_to_qubo(&i, &self.cfg)?,
            other => return Err(unexpected(ctx.module(), &other, self.input)),
        };
        ctx.emit("num_variables", q.n_vars(), Complexity);
        ctx.emit("num_interactions", q.quadratic().len(), Complexity);
        ctx.emit("num_slack", q.decode_map().iter().filter(|r| r.is_slack()).count(), Complexity);
        self.model = Some(q.clone());
        Ok(PipelinePayload::Qubo(q))
    }

    fn postprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let samples = match input {
            PipelinePayload::SampleSet(s) => s,
            other => return Err(unexpected(ctx.module(), &other, PayloadKind::SampleSet)),
        };
        let q = self.model.as_ref().ok_or_else(|| ModuleError::new("postprocess before preprocess"))?;
        let best = samples.best().ok_or_else(|| ModuleError::new("solver returned no samples"))?;
        let sol = decode(q, &best.bits)?;
        ctx.emit("best_energy", best.energy, Application);
        ctx.emit("decoded_feasible", sol.feasible, Application);
        let feasible = samples
            .samples
            .iter()
            .filter(|s| decode(q, &s.bits).map(|d| d.feasible).unwrap_or(false))
            .map(|s| s.count)
            .sum::<usize>();
        ctx.emit("feasible_fraction", feasible as f64 / samples.total_count().max(1) as f64, Application);
        Ok(PipelinePayload::DomainSolution(sol))
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct AnnealParams {
    sweeps: usize,
    reads: usize,
    beta_start: Option<f64>,
    beta_end: Option<f64>,
    time_limit_s: Option<f64>,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self { sweeps: 1000, reads: 20, beta_start: None, beta_end: None, time_limit_s: None }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BruteParams {
    max_optima: usize,
    time_limit_s: Option<f64>,
}

impl Default for BruteParams {
    fn default() -> Self {
        Self { max_optima: BruteForce::default().max_optima, time_limit_s: None }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RandomParams {
    n_samples: usize,
    time_limit_s: Option<f64>,
}

impl Default for RandomParams {
    fn default() -> Self {
        Self { n_samples: 1000, time_limit_s: None }
    }
}

struct SolverModule {
    solver: Box<dyn QuboSolver>,
    time_limit_s: Option<f64>,
}

impl Module for SolverModule {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Qubo
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::SampleSet
    }

    fn preprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let q = match input {
            PipelinePayload::Qubo(q) => q,
            other => return Err(unexpected(ctx.module(), &other, PayloadKind::Qubo)),
        };
        let deadline = self.time_limit_s.map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0)));
        let mut set: SampleSet = self.solver.solve(&q, ctx.seed(), deadline)?;
        ctx.emit_seconds("runtime_s", set.runtime_s, Performance);
        if ctx.redact_timing() {
            set.runtime_s = 0.0;
        }
        if let Some(b) = set.best() {
            ctx.emit("best_energy", b.energy, Performance);
        }
        if let Some(m) = set.mean_energy {
            ctx.emit("mean_energy", m, Performance);
        }
        ctx.emit("distinct_samples", set.samples.len(), Resource);
        ctx.emit("total_samples", set.total_count(), Resource);
        ctx.emit("timed_out", set.timed_out, Performance);
        Ok(PipelinePayload::SampleSet(set))
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PqcParams {
    ansatz: String,
    n_qubits: usize,
    layers: usize,
}

impl Default for PqcParams {
    fn default() -> Self {
        Self { ansatz: "strongly_entangling".into(), n_qubits: 4, layers: 1 }
    }
}

impl PqcParams {
    fn build(&self) -> crate::circuit::Result<Circuit> {
        match self.ansatz.as_str() {
            "strongly_entangling" => {
                let mut c = Circuit::new(self.n_qubits)?;
                for l in 0..self.layers {
                    c.append(&strongly_entangling_layer(self.n_qubits, l)?)?;
                }
                Ok(c)
            }
            "qcnn" => qcnn_ansatz(self.n_qubits, self.layers),
            "euler" => Ok(euler_template()),
            "identity" => identity_template(self.n_qubits),
            "bell" => Ok(bell_template()),
            other => Err(crate::circuit::CircuitError::InvalidArgument(format!("unknown ansatz `{other}`"))),
        }
    }
}

struct PqcTemplate {
    circuit: Circuit,
}

impl Module for PqcTemplate {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Nothing
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::Circuit
    }

    fn preprocess(&mut self, _input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let c = &self.circuit;
        ctx.emit("n_qubits", c.n_qubits(), CircuitCat);
        ctx.emit("depth", c.depth(), CircuitCat);
        ctx.emit("gate_count", c.len(), CircuitCat);
        ctx.emit("two_qubit_gates", c.two_qubit_count(), CircuitCat);
        ctx.emit("n_parameters", c.symbols().len(), CircuitCat);
        Ok(PipelinePayload::Circuit(c.clone()))
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CircuitMetricParams {
    n_pairs: usize,
    bins: usize,
    mw_samples: usize,
    mw_form: MwForm,
}

impl Default for CircuitMetricParams {
    fn default() -> Self {
        Self { n_pairs: 2000, bins: 75, mw_samples: 500, mw_form: MwForm::Linear }
    }
}

struct CircuitMetrics {
    params: CircuitMetricParams,
}

impl Module for CircuitMetrics {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Circuit
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::MetricBundle
    }

    fn preprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let c = match input {
            PipelinePayload::Circuit(c) => c,
            other => return Err(unexpected(ctx.module(), &other, PayloadKind::Circuit)),
        };
        let p = &self.params;
        let expr = expressibility(&c, p.n_pairs, p.bins, ctx.seed())?;
        let mw = mw_of_template(&c, p.mw_samples, crate::rng::derive_seed(ctx.seed(), 1), p.mw_form)?;
        ctx.emit("expressibility", expr, CircuitCat);
        ctx.emit("meyer_wallach", mw, CircuitCat);
        Ok(PipelinePayload::MetricBundle(ctx.records().to_vec()))
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum LatticeParam {
    Chain { n: usize },
    Square { rows: usize, cols: usize },
    KagomePatch { cells_x: usize, cells_y: usize },
    Custom { n_sites: usize, edges: Vec<(usize, usize)> },
}

impl Default for LatticeParam {
    fn default() -> Self {
        LatticeParam::Square { rows: 2, cols: 2 }
    }
}

impl LatticeParam {
    fn build(&self) -> crate::hamiltonian::Result<Lattice> {
        match self {
            LatticeParam::Chain { n } => Lattice::chain(*n),
            LatticeParam::Square { rows, cols } => Lattice::square(*rows, *cols),
            LatticeParam::KagomePatch { cells_x, cells_y } => Lattice::kagome_patch(*cells_x, *cells_y),
            LatticeParam::Custom { n_sites, edges } => Lattice::from_edges(*n_sites, edges.clone()),
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct HubbardParams {
    lattice: LatticeParam,
    #[serde(default = "one")]
    t: f64,
    v: f64,
    spinful: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct HeisenbergParams {
    lattice: LatticeParam,
    coupling: f64,
}

impl Default for HeisenbergParams {
    fn default() -> Self {
        Self { lattice: LatticeParam::Chain { n: 4 }, coupling: -1.0 }
    }
}

struct HamiltonianProvider {
    h: HamiltonianSpec,
}

impl Module for HamiltonianProvider {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Nothing
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::HamiltonianSpec
    }

    fn preprocess(&mut self, _input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        ctx.emit("n_sites", self.h.n_sites(), Complexity);
        ctx.emit("n_qubits", self.h.n_qubits, Complexity);
        ctx.emit("n_terms", self.h.terms.len(), Complexity);
        ctx.emit("encoding", "jordan_wigner", Complexity);
        Ok(PipelinePayload::HamiltonianSpec(self.h.clone()))
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EvolutionParams {
    total_time: f64,
    steps: usize,
    p: f64,
    shots: usize,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        Self { total_time: 2.0, steps: 64, p: 0.0, shots: 500 }
    }
}

impl EvolutionParams {
    fn config(&self, seed: u64) -> DynamicsConfig {
        DynamicsConfig {
            total_time: self.total_time,
            steps: self.steps,
            noise: NoiseModel { p: self.p },
            shots: self.shots,
            seed,
        }
    }
}

fn hamiltonian(input: PipelinePayload, module: &str) -> Result<HamiltonianSpec, ModuleError> {
    match input {
        PipelinePayload::HamiltonianSpec(h) => Ok(h),
        other => Err(unexpected(module, &other, PayloadKind::HamiltonianSpec)),
    }
}

fn emit_trace(ctx: &mut ModuleContext, trace: &Trace, name: &str) {
    ctx.emit(&format!("{name}_final"), trace.last(), Application);
    if let Some(pt) = trace.points.last() {
        ctx.emit(&format!("{name}_stderr"), pt.stderr, Application);
    }
    ctx.attach(&format!("{name}_trace"), trace.to_csv());
}

fn emit_step_circuit(ctx: &mut ModuleContext, h: &HamiltonianSpec, cfg: &DynamicsConfig) -> Result<(), ModuleError> {
    let step = crate::hamiltonian::trotter_step_circuit(h, cfg.dt())?;
    ctx.emit("two_qubit_gates_per_step", step.two_qubit_count(), CircuitCat);
    ctx.emit("depth_per_step", step.depth(), CircuitCat);
    ctx.emit("two_qubit_gates_total", step.two_qubit_count() * cfg.steps, CircuitCat);
    Ok(())
}

struct TrotterDynamics {
    params: EvolutionParams,
}

impl Module for TrotterDynamics {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::HamiltonianSpec
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::MetricBundle
    }

    fn preprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let h = hamiltonian(input, ctx.module())?;
        let cfg = self.params.config(ctx.seed());
        emit_step_circuit(ctx, &h, &cfg)?;
        let trace = evolve_dynamics(&h, &cfg)?;
        emit_trace(ctx, &trace, "imbalance");
        if let Model::Hubbard { t, v, .. } = h.model {
            if v == 0.0 {
                let occ: Vec<bool> = (0..h.n_sites()).map(|i| h.lattice.cdw_occupied(i)).collect();
                let n = free_fermion_oracle(&h.lattice, t, &occ, cfg.total_time)?;
                let (o, u) = n.iter().enumerate().fold((0.0, 0.0), |(o, u), (i, x)| if occ[i] { (o + x, u) } else { (o, u + x) });
                let exact = (o - u) / (o + u);
                ctx.emit("imbalance_exact", exact, Application);
                ctx.emit("imbalance_bias", trace.last() - exact, Application);
            }
        }
        Ok(PipelinePayload::MetricBundle(ctx.records().to_vec()))
    }
}

struct AdiabaticPrep {
    params: EvolutionParams,
}

impl Module for AdiabaticPrep {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::HamiltonianSpec
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::MetricBundle
    }

    fn preprocess(&mut self, input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let h = hamiltonian(input, ctx.module())?;
        let cfg = self.params.config(ctx.seed());
        emit_step_circuit(ctx, &h, &cfg)?;
        let trace = adiabatic_prepare(&h, &cfg)?;
        emit_trace(ctx, &trace, "energy_density");
        ctx.emit("energy_density_min", trace.min_observable(), Application);
        if h.n_qubits <= 14 {
            let exact = ground_energy_dense(&h)? / h.n_sites() as f64;
            ctx.emit("ground_energy_density", exact, Application);
            ctx.emit("relative_gap", (trace.last() - exact) / exact.abs(), Application);
        }
        Ok(PipelinePayload::MetricBundle(ctx.records().to_vec()))
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct QScoreParams {
    solver: String,
    sizes: Vec<usize>,
    instances_per_size: usize,
    time_limit_s: Option<f64>,
    threshold: f64,
    edge_prob: f64,
    rand_samples: usize,
    statistic: ScoreStatistic,
    scan_all: bool,
    sweeps: usize,
    reads: usize,
    n_samples: usize,
}

impl Default for QScoreParams {
    fn default() -> Self {
        let cfg = QScoreConfig::new(vec![]);
        Self {
            solver: "simulated_annealer".into(),
            sizes: (5..=12).collect(),
            instances_per_size: cfg.instances_per_size,
            time_limit_s: cfg.time_limit_s,
            threshold: cfg.threshold,
            edge_prob: cfg.edge_prob,
            rand_samples: cfg.rand_samples,
            statistic: cfg.statistic,
            scan_all: cfg.scan_all,
            sweeps: 200,
            reads: 10,
            n_samples: 256,
        }
    }
}

impl QScoreParams {
    fn solver(&self) -> Result<Box<dyn QuboSolver>, String> {
        match self.solver.as_str() {
            "simulated_annealer" => Ok(Box::new(SimulatedAnnealer::new(self.sweeps, self.reads))),
            "brute_force" => Ok(Box::new(BruteForce::default())),
            "random" => Ok(Box::new(UniformSampler { n_samples: self.n_samples })),
            other => Err(format!("unknown solver `{other}`")),
        }
    }
}

struct QScoreModule {
    params: QScoreParams,
}

impl Module for QScoreModule {
    fn input_kind(&self) -> PayloadKind {
        PayloadKind::Nothing
    }

    fn output_kind(&self) -> PayloadKind {
        PayloadKind::MetricBundle
    }

    fn preprocess(&mut self, _input: PipelinePayload, ctx: &mut ModuleContext) -> Out {
        let p = &self.params;
        let solver = p.solver().map_err(ModuleError::new)?;
        let mut cfg = QScoreConfig::new(p.sizes.clone());
        cfg.instances_per_size = p.instances_per_size;
        cfg.time_limit_s = p.time_limit_s;
        cfg.threshold = p.threshold;
        cfg.edge_prob = p.edge_prob;
        cfg.rand_samples = p.rand_samples;
        cfg.statistic = p.statistic;
        cfg.scan_all = p.scan_all;
        cfg.seed = ctx.seed();
        let mut result = q_score(solver.as_ref(), &cfg)?;
        for s in &mut result.per_size {
            ctx.emit(&format!("beta[N={}]", s.n), s.beta, Application);
            ctx.emit(&format!("c[N={}]", s.n), s.c, Application);
            ctx.emit(&format!("c_opt[N={}]", s.n), s.c_opt, Application);
            ctx.emit(&format!("c_rand[N={}]", s.n), s.c_rand, Application);
            ctx.emit_seconds(&format!("elapsed_s[N={}]", s.n), s.elapsed_s, Performance);
            if ctx.redact_timing() {
                s.elapsed_s = 0.0;
            }
        }
        match result.q_score {
            Some(n) => ctx.emit("q_score", n, Application),
            None => ctx.emit("q_score", "none", Application),
        }
        ctx.attach("per_size", result.to_csv());
        Ok(PipelinePayload::MetricBundle(ctx.records().to_vec()))
    }
}
