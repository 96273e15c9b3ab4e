//! Random instance generation and the exact-versus-greedy experiment harness.
//!
//! Attractor states are i.i.d. uniform bits. Rows repeating within a cycle and
//! attractors repeating another attractor's cycle are redrawn.

use std::fmt;
use std::time::{Duration, Instant};

use attdisc_core::periodic::ratio_hypothesis_violations;
use attdisc_core::{
    solve_exact_periodic, solve_exact_singleton, solve_greedy_periodic, solve_greedy_singleton,
    Attractor, Discriminator, Error, Instance, PairTables, SolveOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Redraws allowed per attractor before generation gives up.
pub const RETRY_CAP: usize = 1000;

/// Infeasible instances discarded per repetition before generation gives up.
pub const DISCARD_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPair {
    /// Exhaustive clique-based search against the pair greedy.
    Periodic,
    /// Branch-and-bound multi-cover against the column greedy.
    Singleton,
}

impl SolverPair {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverPair::Periodic => "periodic",
            SolverPair::Singleton => "singleton",
        }
    }

    fn exact(
        self,
        instance: &Instance,
        opts: &SolveOptions,
    ) -> attdisc_core::Result<Discriminator> {
        match self {
            SolverPair::Periodic => solve_exact_periodic(instance, opts),
            SolverPair::Singleton => solve_exact_singleton(instance, opts),
        }
    }

    fn greedy(
        self,
        instance: &Instance,
        opts: &SolveOptions,
    ) -> attdisc_core::Result<Discriminator> {
        match self {
            SolverPair::Periodic => solve_greedy_periodic(instance, opts),
            SolverPair::Singleton => solve_greedy_singleton(instance, opts),
        }
    }
}

impl fmt::Display for SolverPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolverPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "periodic" => Ok(SolverPair::Periodic),
            "singleton" => Ok(SolverPair::Singleton),
            _ => Err(format!("unknown solver pair `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Largest attractor period; 1 yields singleton attractors only.
    pub max_period: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub solvers: SolverPair,
    /// Wall-clock cap for each exact run.
    pub budget: Option<Duration>,
    /// Solve repetitions concurrently.
    pub parallel: bool,
}

impl ExperimentConfig {
    /// Ten sequential repetitions, seed 0, no budget, solver pair chosen from
    /// `max_period`.
    pub fn new(n: usize, m: usize, k: usize, max_period: usize) -> Self {
        ExperimentConfig {
            n,
            m,
            k,
            max_period,
            repetitions: 10,
            seed: 0,
            solvers: if max_period == 1 {
                SolverPair::Singleton
            } else {
                SolverPair::Periodic
            },
            budget: None,
            parallel: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_repetitions(mut self, repetitions: usize) -> Self {
        self.repetitions = repetitions;
        self
    }

    pub fn with_budget(mut self, budget: Duration) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_solvers(mut self, solvers: SolverPair) -> Self {
        self.solvers = solvers;
        self
    }

    pub fn validate(&self) -> attdisc_core::Result<()> {
        let bad = |msg: &str| Err(Error::Generation(msg.to_string()));
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.m < 2 {
            return bad("m must be at least 2");
        }
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if self.max_period == 0 {
            return bad("max_period must be at least 1");
        }
        if self.solvers == SolverPair::Singleton && self.max_period > 1 {
            return bad("singleton solvers need max_period = 1");
        }
        Ok(())
    }
}

fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..2u8)).collect()
}

fn random_attractor(
    rng: &mut ChaCha8Rng,
    id: usize,
    n: usize,
    max_period: usize,
    existing: &[Attractor],
) -> attdisc_core::Result<Attractor> {
    for _ in 0..RETRY_CAP {
        let p = rng.gen_range(1..=max_period);
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(p);
        let mut tries = 0;
        while rows.len() < p && tries < RETRY_CAP {
            let row = random_row(rng, n);
            if !rows.contains(&row) {
                rows.push(row);
            }
            tries += 1;
        }
        if rows.len() < p {
            continue;
        }
        let att = Attractor::new(id, &rows)?;
        if existing.iter().all(|e| !e.cyclically_equal(&att)) {
            return Ok(att);
        }
    }
    Err(Error::Generation(format!(
        "no distinct attractor after {RETRY_CAP} draws (n = {n}, max_period = {max_period})"
    )))
}

/// Draw one instance from `rng`, feasible or not.
pub fn draw_instance(
    config: &ExperimentConfig,
    rng: &mut ChaCha8Rng,
) -> attdisc_core::Result<Instance> {
    config.validate()?;
    let mut atts: Vec<Attractor> = Vec::with_capacity(config.m);
    for id in 1..=config.m {
        let att = random_attractor(rng, id, config.n, config.max_period, &atts)?;
        atts.push(att);
    }
    Instance::new(atts, config.k)
}

/// One instance determined by the configuration's seed.
pub fn generate_instance(config: &ExperimentConfig) -> attdisc_core::Result<Instance> {
    draw_instance(config, &mut ChaCha8Rng::seed_from_u64(config.seed))
}

/// Whether every attractor pair reaches `2K+1` over all nodes.
pub fn is_feasible(instance: &Instance) -> attdisc_core::Result<bool> {
    let tables = PairTables::build(instance, attdisc_core::DEFAULT_LCM_CAP)?;
    Ok(tables
        .first_unreachable(instance.required_distance())
        .is_none())
}

/// Feasible instances for every repetition, drawn in order from one stream,
/// and the number of infeasible draws discarded.
pub fn generate_feasible(
    config: &ExperimentConfig,
) -> attdisc_core::Result<(Vec<Instance>, usize)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.repetitions);
    let mut discarded = 0;
    while out.len() < config.repetitions {
        let inst = draw_instance(config, &mut rng)?;
        if is_feasible(&inst)? {
            out.push(inst);
        } else {
            discarded += 1;
            if discarded > DISCARD_CAP * config.repetitions {
                return Err(Error::Generation(format!(
                    "more than {} infeasible draws for K = {}",
                    DISCARD_CAP * config.repetitions,
                    config.k
                )));
            }
        }
    }
    Ok((out, discarded))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    /// The exact solver hit the budget; no ratio.
    BudgetExceeded,
    /// Greedy output failed verification.
    GreedyInvalid,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::BudgetExceeded => "budget_exceeded",
            RunStatus::GreedyInvalid => "greedy_invalid",
        }
    }
}

/// One repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub rep: usize,
    pub exact_time: Option<Duration>,
    pub greedy_time: Duration,
    pub exact_size: Option<usize>,
    pub greedy_size: usize,
    pub status: RunStatus,
    /// Pair rows at which the pair greedy's ratio hypothesis failed, when an
    /// optimum is known and the periodic pair ran.
    pub hypothesis_violations: Option<usize>,
    pub m: usize,
    pub k: usize,
}

impl RunRecord {
    pub fn ratio(&self) -> Option<f64> {
        self.exact_size.map(|e| self.greedy_size as f64 / e as f64)
    }

    /// The guarantee `ln(M(2K+1)) + 1`.
    pub fn ratio_bound(&self) -> f64 {
        let pairs = self.m * (self.m - 1) / 2;
        ((pairs * (2 * self.k + 1)) as f64).ln() + 1.0
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    /// Infeasible instances discarded during generation.
    pub discarded: usize,
}

#[derive(Serialize)]
struct CsvRow {
    rep: String,
    n: usize,
    m: usize,
    #[serde(rename = "K")]
    k: usize,
    len: usize,
    exact_time_ms: String,
    greedy_time_ms: String,
    exact_size: String,
    greedy_size: String,
    ratio: String,
    status: String,
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1000.0)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentReport {
    pub fn max_ratio(&self) -> Option<f64> {
        self.runs
            .iter()
            .filter_map(RunRecord::ratio)
            .fold(None, |acc: Option<f64>, r| {
                Some(acc.map_or(r, |a| a.max(r)))
            })
    }

    pub fn mean_exact_time(&self) -> Option<Duration> {
        let times: Vec<Duration> = self.runs.iter().filter_map(|r| r.exact_time).collect();
        (!times.is_empty()).then(|| times.iter().sum::<Duration>() / times.len() as u32)
    }

    pub fn mean_greedy_time(&self) -> Duration {
        self.runs.iter().map(|r| r.greedy_time).sum::<Duration>() / self.runs.len().max(1) as u32
    }

    /// Per-repetition rows followed by a `summary` row with mean times and
    /// the maximum ratio. `with_timing = false` blanks the timing columns.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let c = &self.config;
        let mut w = csv::Writer::from_writer(Vec::new());
        let time = |d: Option<Duration>| {
            if with_timing {
                opt(d.map(ms))
            } else {
                String::new()
            }
        };
        for r in &self.runs {
            w.serialize(CsvRow {
                rep: (r.rep + 1).to_string(),
                n: c.n,
                m: c.m,
                k: c.k,
                len: c.max_period,
                exact_time_ms: time(r.exact_time),
                greedy_time_ms: time(Some(r.greedy_time)),
                exact_size: opt(r.exact_size),
                greedy_size: r.greedy_size.to_string(),
                ratio: opt(r.ratio().map(|x| format!("{x:.4}"))),
                status: r.status.as_str().to_string(),
            })
            .expect("writing to memory");
        }
        w.serialize(CsvRow {
            rep: "summary".into(),
            n: c.n,
            m: c.m,
            k: c.k,
            len: c.max_period,
            exact_time_ms: time(self.mean_exact_time()),
            greedy_time_ms: time(Some(self.mean_greedy_time())),
            exact_size: String::new(),
            greedy_size: String::new(),
            ratio: opt(self.max_ratio().map(|x| format!("{x:.4}"))),
            status: format!("discarded={}", self.discarded),
        })
        .expect("writing to memory");
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }
}

/// Solve one instance with both solvers of the pair.
pub fn run_instance(
    config: &ExperimentConfig,
    rep: usize,
    instance: &Instance,
) -> attdisc_core::Result<RunRecord> {
    let mut opts = SolveOptions::default();
    if let Some(b) = config.budget {
        opts = opts.with_time_limit(b);
    }
    let start = Instant::now();
    let exact = config.solvers.exact(instance, &opts);
    let exact_time = start.elapsed();
    let exact = match exact {
        Ok(sol) => Some(sol),
        Err(Error::BudgetExceeded(_)) => None,
        Err(e) => return Err(e),
    };

    let greedy_opts = SolveOptions::default();
    let start = Instant::now();
    let greedy = config.solvers.greedy(instance, &greedy_opts)?;
    let greedy_time = start.elapsed();

    let hypothesis_violations = match (&exact, config.solvers) {
        (Some(best), SolverPair::Periodic) => {
            let run = attdisc_core::run_greedy_periodic(instance, &greedy_opts, false)?;
            Some(ratio_hypothesis_violations(instance, &run, &best.nodes, &greedy_opts)?.len())
        }
        _ => None,
    };

    let status = if !greedy.feasible {
        RunStatus::GreedyInvalid
    } else if exact.is_none() {
        RunStatus::BudgetExceeded
    } else {
        RunStatus::Ok
    };
    Ok(RunRecord {
        rep,
        exact_time: exact.as_ref().map(|_| exact_time),
        greedy_time,
        exact_size: exact.as_ref().map(Discriminator::cardinality),
        greedy_size: greedy.cardinality(),
        status,
        hypothesis_violations,
        m: instance.m(),
        k: instance.noise_bound(),
    })
}

/// Generate `repetitions` feasible instances and time both solvers on each.
pub fn run_experiment(config: &ExperimentConfig) -> attdisc_core::Result<ExperimentReport> {
    use rayon::prelude::*;

    let (instances, discarded) = generate_feasible(config)?;
    let runs: attdisc_core::Result<Vec<RunRecord>> = if config.parallel {
        instances
            .par_iter()
            .enumerate()
            .map(|(rep, inst)| run_instance(config, rep, inst))
            .collect()
    } else {
        instances
            .iter()
            .enumerate()
            .map(|(rep, inst)| run_instance(config, rep, inst))
            .collect()
    };
    Ok(ExperimentReport {
        config: config.clone(),
        runs: runs?,
        discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let cfg = ExperimentConfig::new(8, 3, 0, 1).with_seed(7);
        assert_eq!(
            generate_instance(&cfg).unwrap(),
            generate_instance(&cfg).unwrap()
        );
        let other = generate_instance(&cfg.clone().with_seed(8)).unwrap();
        assert_ne!(generate_instance(&cfg).unwrap(), other);
    }

    #[test]
    fn generated_shapes() {
        let inst = generate_instance(&ExperimentConfig::new(50, 5, 1, 1).with_seed(1)).unwrap();
        assert_eq!((inst.m(), inst.n()), (5, 50));
        assert!(inst.is_singleton());

        let inst = generate_instance(&ExperimentConfig::new(100, 3, 1, 3).with_seed(1)).unwrap();
        assert!(inst.attractors().iter().all(|a| a.period() <= 3));
    }

    #[test]
    fn impossible_generation_errors() {
        // Only two distinct singleton rows exist over one node.
        let err = generate_instance(&ExperimentConfig::new(1, 3, 0, 1)).unwrap_err();
        assert!(matches!(err, Error::Generation(_)));
        assert!(ExperimentConfig::new(5, 3, 0, 1)
            .with_repetitions(0)
            .validate()
            .is_err());
    }

    #[test]
    fn infeasible_draws_are_discarded() {
        // Four nodes can never separate a pair by 2K+1 = 5.
        let cfg = ExperimentConfig::new(4, 2, 2, 1).with_repetitions(1);
        assert!(matches!(generate_feasible(&cfg), Err(Error::Generation(_))));
        let cfg = ExperimentConfig::new(6, 2, 2, 1)
            .with_repetitions(3)
            .with_seed(3);
        let (insts, _) = generate_feasible(&cfg).unwrap();
        assert!(insts.iter().all(|i| is_feasible(i).unwrap()));
    }

    #[test]
    fn report_columns_and_summary() {
        let cfg = ExperimentConfig::new(12, 3, 1, 1)
            .with_repetitions(3)
            .with_seed(5);
        let report = run_experiment(&cfg).unwrap();
        let csv = report.to_csv(true);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "rep,n,m,K,len,exact_time_ms,greedy_time_ms,exact_size,greedy_size,ratio,status"
        );
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().last().unwrap().starts_with("summary,12,3,1,1,"));
        assert_eq!(
            report.to_csv(false),
            run_experiment(&cfg).unwrap().to_csv(false)
        );
        for r in &report.runs {
            assert!(r.ratio().unwrap() >= 1.0);
            assert!(r.ratio().unwrap() <= r.ratio_bound());
        }
    }

    #[test]
    fn forced_solution_has_unit_ratio() {
        // Rows differing in exactly one node: both solvers must pick it.
        let inst =
            Instance::from_singleton_matrix(&[vec![0, 0, 1, 0], vec![0, 0, 0, 0]], 0).unwrap();
        let cfg = ExperimentConfig::new(4, 2, 0, 1);
        let rec = run_instance(&cfg, 0, &inst).unwrap();
        assert_eq!(rec.ratio(), Some(1.0));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = ExperimentConfig::new(14, 4, 1, 3)
            .with_repetitions(1)
            .with_budget(Duration::ZERO);
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.runs[0].status, RunStatus::BudgetExceeded);
        assert_eq!(report.runs[0].ratio(), None);
        assert!(report
            .to_csv(true)
            .lines()
            .nth(1)
            .unwrap()
            .ends_with(",budget_exceeded"));
    }
}
