//! End-to-end stages shared by the command-line tool and the tests.

use crate::antonym::{self, AntonymAccumulator, AntonymMaps};
use crate::config::{EnvSource, RunConfig};
use crate::error::Result;
use crate::eval::{evaluate, rescale, sweep_alphas, tcr_sweep, EvalReport, Method, MethodMap};
use crate::fuzzy::{self, FuzzyMapSet};
use crate::geometry::{GridSpec, ScalarGrid, TraceRecord};
use crate::prob::{self, ProbGrid};
use crate::sim::{self, builtin_environment, builtin_trajectory, reference_map, Environment, SimTrace, Trajectory};

/// World, route, grid and ground truth for one run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub environment: Environment,
    pub trajectory: Trajectory,
    pub spec: GridSpec,
    pub reference: ScalarGrid,
}

/// Resolves the scenario; `load_env` reads segment-list files.
pub fn scenario_with(cfg: &RunConfig, load_env: impl FnOnce(&std::path::Path) -> Result<Environment>) -> Result<Scenario> {
    cfg.validate()?;
    let environment = match &cfg.environment {
        EnvSource::Builtin(name) => builtin_environment(name)?,
        EnvSource::File(path) => load_env(path)?,
    };
    let mut trajectory = match (&cfg.waypoints, &cfg.environment) {
        (Some(w), _) => Trajectory::new(w.clone()),
        (None, EnvSource::Builtin(name)) => builtin_trajectory(name)?,
        (None, EnvSource::File(_)) => unreachable!("validated above"),
    };
    trajectory.step = cfg.step;
    trajectory.jitter_pos = cfg.jitter_pos;
    trajectory.jitter_heading = cfg.jitter_heading;
    trajectory.validate()?;
    let spec = environment.grid_spec(cfg.cell_size, cfg.margin)?;
    let reference = reference_map(&environment, &spec, cfg.wall_halfwidth());
    Ok(Scenario {
        environment,
        trajectory,
        spec,
        reference,
    })
}

/// Scenario for a built-in environment; files go through [`crate::io`].
pub fn scenario(cfg: &RunConfig) -> Result<Scenario> {
    scenario_with(cfg, crate::io::read_environment)
}

pub fn simulate(cfg: &RunConfig, sc: &Scenario) -> Result<SimTrace> {
    sim::generate_trace_with(&sc.environment, &sc.trajectory, &cfg.ring, &cfg.noise, &cfg.transients, cfg.seed)
}

/// A built map in the native representation of its method.
#[derive(Debug, Clone)]
pub enum Mapped {
    Prob(ProbGrid),
    Fuzzy(FuzzyMapSet),
    Antonym {
        raw: AntonymAccumulator,
        corrected: AntonymAccumulator,
        /// Whether `signed` uses the corrected accumulator.
        use_corrected: bool,
    },
}

impl Mapped {
    pub fn method(&self) -> Method {
        match self {
            Mapped::Prob(_) => Method::Prob,
            Mapped::Fuzzy(_) => Method::Fuzzy,
            Mapped::Antonym { .. } => Method::Antonym,
        }
    }

    pub fn method_map(&self) -> MethodMap {
        match self {
            Mapped::Prob(g) => MethodMap::Prob(g.probabilities()),
            Mapped::Fuzzy(m) => MethodMap::Fuzzy {
                occupied: m.occupied.clone(),
                empty: m.empty.clone(),
            },
            Mapped::Antonym {
                raw,
                corrected,
                use_corrected,
            } => {
                let acc = if *use_corrected { corrected } else { raw };
                MethodMap::Antonym(acc.render().integ)
            }
        }
    }

    /// The map on `[-1, 1]` used for evaluation.
    pub fn signed(&self) -> ScalarGrid {
        rescale(&self.method_map()).expect("method grids share a spec")
    }

    /// Named grids to export, in a fixed order.
    pub fn grids(&self) -> Vec<(String, ScalarGrid)> {
        match self {
            Mapped::Prob(g) => vec![("prob".into(), g.probabilities())],
            Mapped::Fuzzy(m) => vec![
                ("fuzzy_occupied".into(), m.occupied.clone()),
                ("fuzzy_empty".into(), m.empty.clone()),
                ("fuzzy_signed".into(), m.signed()),
            ],
            Mapped::Antonym { raw, corrected, .. } => {
                let mut out = Vec::new();
                for (tag, acc) in [("raw", raw), ("corrected", corrected)] {
                    let AntonymMaps {
                        occup,
                        empty,
                        contra,
                        integ,
                    } = acc.render();
                    out.push((format!("antonym_occup_{tag}"), occup));
                    out.push((format!("antonym_empty_{tag}"), empty));
                    out.push((format!("antonym_contra_{tag}"), contra));
                    out.push((format!("antonym_integ_{tag}"), integ));
                }
                out
            }
        }
    }
}

pub fn map_trace(method: Method, cfg: &RunConfig, spec: GridSpec, trace: &[TraceRecord]) -> Mapped {
    match method {
        Method::Prob => Mapped::Prob(prob::build(spec, cfg.prob.clone(), &cfg.ring, trace)),
        Method::Fuzzy => Mapped::Fuzzy(fuzzy::build(spec, cfg.fuzzy.clone(), &cfg.ring, trace)),
        Method::Antonym => {
            let raw = antonym::accumulate(spec, cfg.antonym.clone(), &cfg.ring, trace);
            let corrected = raw.correct_contradictions(cfg.contra_threshold);
            Mapped::Antonym {
                raw,
                corrected,
                use_corrected: cfg.correction,
            }
        }
    }
}

/// One row of a method comparison.
#[derive(Debug, Clone)]
pub struct MethodResult {
    pub method: Method,
    pub report: EvalReport,
    /// `(alpha, TCR)` over the sweep.
    pub sweep: Vec<(f64, f64)>,
    pub mapped: Mapped,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub environment: String,
    pub results: Vec<MethodResult>,
}

pub fn compare(cfg: &RunConfig, environment: &str, spec: GridSpec, trace: &[TraceRecord], reference: &ScalarGrid) -> Result<Comparison> {
    let alphas = sweep_alphas(cfg.sweep_points);
    let mut results = Vec::with_capacity(Method::ALL.len());
    for method in Method::ALL {
        let mapped = map_trace(method, cfg, spec, trace);
        let signed = mapped.signed();
        results.push(MethodResult {
            method,
            report: evaluate(&signed, reference, cfg.alpha)?,
            sweep: tcr_sweep(&signed, reference, &alphas)?,
            mapped,
        });
    }
    Ok(Comparison {
        environment: environment.to_string(),
        results,
    })
}

impl Comparison {
    pub fn result(&self, method: Method) -> &MethodResult {
        self.results.iter().find(|r| r.method == method).expect("all methods are compared")
    }

    /// Header plus one row per method.
    pub fn summary_csv(&self) -> String {
        let mut s = String::from(crate::eval::REPORT_CSV_HEADER);
        s.push('\n');
        for r in &self.results {
            s.push_str(&r.report.to_csv_row(&self.environment, r.method.name()));
            s.push('\n');
        }
        s
    }

    /// `alpha,prob,fuzzy,antonym` TCR columns.
    pub fn sweep_csv(&self) -> String {
        let mut s = String::from("alpha");
        for r in &self.results {
            s.push(',');
            s.push_str(r.method.name());
        }
        s.push('\n');
        let n = self.results.first().map_or(0, |r| r.sweep.len());
        for i in 0..n {
            s.push_str(&format!("{:.6}", self.results[0].sweep[i].0));
            for r in &self.results {
                s.push_str(&format!(",{:.6}", r.sweep[i].1));
            }
            s.push('\n');
        }
        s
    }
}
