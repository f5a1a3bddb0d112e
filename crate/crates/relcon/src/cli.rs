//! Command implementations behind the binary front end: model
//! ingestion, dispatch to the fashion-appropriate checker, weight
//! design, Monte Carlo verification, and example generation, each
//! returning a machine-serializable report with a stable exit-code
//! contract (0 controllable, 1 not, 2 undecided, 3 input error).

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{
    check_hetero_perturbed, check_mimo_equal, check_mimo_multi, check_siso, AnalysisReport, Verdict,
};
use crate::design::design_siso_weights;
use crate::linalg::{RandomSource, TolerancePolicy};
use crate::model::{
    edge_key, example_model, parse_weight_key, EdgeWeights, ExampleName, Fashion, Model,
    ModelDocument, WeightAssignment,
};
use crate::verify::{controllability_at, monte_carlo_controllability, MonteCarloReport};
use crate::{Error, Result};

/// Default number of perturbation realizations sampled by the analyzer.
pub const DEFAULT_REALIZATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub subsystems: usize,
    pub state_dim: usize,
    pub channels: usize,
    pub fashion: Fashion,
    pub drivers: Vec<usize>,
}

impl ModelSummary {
    fn of(model: &Model) -> Self {
        Self {
            subsystems: model.topo.vertex_count(),
            state_dim: model.sub.state_dim(),
            channels: model.sub.channel_count(),
            fashion: model.fashion,
            drivers: model.topo.drivers().iter().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Analysis(AnalysisReport),
    MonteCarlo(MonteCarloReport),
    SinglePoint {
        controllable: bool,
        margin: f64,
    },
    Design {
        weights: BTreeMap<String, f64>,
        margin: f64,
        written_to: Option<String>,
    },
    Example {
        name: String,
        written_to: String,
    },
}

/// Lossless, JSON-serializable record of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliReport {
    pub command: String,
    pub seed: u64,
    pub tolerances: TolerancePolicy,
    pub model: ModelSummary,
    pub payload: Payload,
    pub wall_time_ms: f64,
}

impl CliReport {
    /// Exit-code contract: 0 controllable, 1 not, 2 undecided.
    /// Input errors never construct a report; they exit 3.
    pub fn exit_code(&self) -> i32 {
        match &self.payload {
            Payload::Analysis(a) => match a.verdict {
                Verdict::StructurallyControllable => 0,
                Verdict::NotStructurallyControllable => 1,
                Verdict::Undecided => 2,
            },
            Payload::MonteCarlo(mc) => {
                if mc.controllable_count + 1 >= mc.trials {
                    0
                } else if mc.controllable_count == 0 {
                    1
                } else {
                    2
                }
            }
            Payload::SinglePoint { controllable, .. } => {
                if *controllable {
                    0
                } else {
                    1
                }
            }
            Payload::Design { .. } => 0,
            Payload::Example { .. } => 0,
        }
    }

    fn verdict_line(&self) -> String {
        match &self.payload {
            Payload::Analysis(a) => a.verdict.to_string(),
            Payload::MonteCarlo(mc) => {
                let word = match self.exit_code() {
                    0 => "Controllable",
                    1 => "Uncontrollable",
                    _ => "Mixed",
                };
                format!(
                    "{word} {}/{} trials (min margin {:.3e})",
                    mc.controllable_count, mc.trials, mc.min_margin
                )
            }
            Payload::SinglePoint {
                controllable,
                margin,
            } => format!(
                "{} margin={margin:.6e}",
                if *controllable {
                    "Controllable"
                } else {
                    "Uncontrollable"
                }
            ),
            Payload::Design { margin, .. } => {
                format!("StructurallyControllable margin={margin:.6e}")
            }
            Payload::Example { name, written_to } => {
                format!("WroteModel {name} -> {written_to}")
            }
        }
    }

    /// Human-readable rendering; the first line is always the verdict.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.verdict_line());
        out.push('\n');
        out.push_str(&format!("command: {}\n", self.command));
        out.push_str(&format!(
            "model: N={} n={} r={} fashion={} drivers={:?}\n",
            self.model.subsystems,
            self.model.state_dim,
            self.model.channels,
            self.model.fashion,
            self.model.drivers
        ));
        out.push_str(&format!(
            "seed: {}  tolerances: rank_rel={:.1e} eig_match={:.1e} margin_floor={:.1e}\n",
            self.seed,
            self.tolerances.rank_rel_tol,
            self.tolerances.eig_match_tol,
            self.tolerances.margin_floor
        ));
        match &self.payload {
            Payload::Analysis(a) => {
                out.push_str("conditions:\n");
                for c in &a.conditions {
                    out.push_str(&format!(
                        "  [{}] {}{} - {}\n",
                        if c.passed { "pass" } else { "fail" },
                        c.name,
                        if c.necessary { " (necessary)" } else { "" },
                        c.detail
                    ));
                }
                if !a.fixed_spectrum.is_empty() {
                    let modes: Vec<String> = a
                        .fixed_spectrum
                        .iter()
                        .map(|m| format!("{:.6}{:+.6}i", m.re, m.im))
                        .collect();
                    out.push_str(&format!("fixed spectrum: {}\n", modes.join(", ")));
                }
                if !a.certificates.unreachable.is_empty() {
                    out.push_str(&format!(
                        "unreachable vertices: {:?}\n",
                        a.certificates.unreachable
                    ));
                }
                if let Some(m) = a.certificates.failed_mode {
                    out.push_str(&format!("failed mode: {:.6}{:+.6}i\n", m.re, m.im));
                }
            }
            Payload::MonteCarlo(mc) => {
                out.push_str(&format!(
                    "trials: {}  controllable: {}  margins: [{:.3e}, {:.3e}]  worst seed: {}\n",
                    mc.trials, mc.controllable_count, mc.min_margin, mc.max_margin, mc.worst_seed
                ));
            }
            Payload::SinglePoint { .. } => {}
            Payload::Design {
                weights,
                written_to,
                ..
            } => {
                out.push_str(&format!("designed weights ({}):\n", weights.len()));
                for (k, v) in weights {
                    out.push_str(&format!("  {k}: {v:.6}\n"));
                }
                if let Some(path) = written_to {
                    out.push_str(&format!("written to: {path}\n"));
                }
            }
            Payload::Example { .. } => {}
        }
        out.push_str(&format!("wall: {:.2} ms\n", self.wall_time_ms));
        out
    }

    pub fn render_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Exit code for errors surfaced before a report exists.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::NotStructurallyControllable(_) => 1,
        _ => 3,
    }
}

fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)?;
    ModelDocument::from_json(&text)?.into_model()
}

/// Analyze a model document, dispatching on its interaction fashion
/// (perturbed SISO models go through the sufficiency checker).
pub fn cmd_analyze(model_path: &Path, seed: u64, tol: TolerancePolicy) -> Result<CliReport> {
    tol.validate()?;
    let start = Instant::now();
    let model = load_model(model_path)?;
    let mut rng = RandomSource::from_seed(seed);
    let report = match (&model.hetero, model.fashion) {
        (Some(h), _) => check_hetero_perturbed(
            &model.sub,
            h,
            &model.topo,
            &tol,
            &mut rng,
            DEFAULT_REALIZATIONS,
        )?,
        (None, Fashion::Siso) => check_siso(&model.sub, &model.topo, &tol)?,
        (None, Fashion::EquallyWeighted) => {
            check_mimo_equal(&model.sub, &model.topo, &tol, &mut rng)?
        }
        (None, Fashion::MultiWeighted) => {
            check_mimo_multi(&model.sub, &model.topo, &tol, &mut rng)?
        }
    };
    Ok(CliReport {
        command: format!("analyze {}", model_path.display()),
        seed,
        tolerances: tol,
        model: ModelSummary::of(&model),
        payload: Payload::Analysis(report),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Design SISO interaction weights and optionally write them as a flat
/// `"i,j" -> weight` JSON map.
pub fn cmd_design(
    model_path: &Path,
    seed: u64,
    tol: TolerancePolicy,
    out: Option<&Path>,
) -> Result<CliReport> {
    tol.validate()?;
    let start = Instant::now();
    let model = load_model(model_path)?;
    if model.fashion != Fashion::Siso || model.sub.channel_count() != 1 {
        return Err(Error::InvalidFashion(
            "design supports SISO models only".into(),
        ));
    }
    if model.hetero.is_some() {
        return Err(Error::InvalidFashion(
            "design does not support perturbed models".into(),
        ));
    }
    let mut rng = RandomSource::from_seed(seed);
    let designed = design_siso_weights(&model.sub, &model.topo, &tol, &mut rng)?;
    let flat: BTreeMap<String, f64> = designed
        .weights
        .iter()
        .map(|(&e, &v)| (edge_key(e), v))
        .collect();
    let written_to = match out {
        Some(path) => {
            std::fs::write(path, serde_json::to_string_pretty(&flat)?)?;
            Some(path.display().to_string())
        }
        None => None,
    };
    Ok(CliReport {
        command: format!("design {}", model_path.display()),
        seed,
        tolerances: tol,
        model: ModelSummary::of(&model),
        payload: Payload::Design {
            weights: flat,
            margin: designed.margin,
            written_to,
        },
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn load_weights_file(path: &Path, model: &Model) -> Result<WeightAssignment> {
    let text = std::fs::read_to_string(path)?;
    let raw: BTreeMap<String, f64> = serde_json::from_str(&text)?;
    let stored = match model.fashion {
        Fashion::Siso | Fashion::EquallyWeighted => 1,
        Fashion::MultiWeighted => model.sub.channel_count(),
    };
    let mut maps = vec![EdgeWeights::new(); stored];
    for (key, value) in raw {
        let (i, j, k) = parse_weight_key(&key)?;
        if k == 0 || k > stored {
            return Err(Error::InvalidInput(format!(
                "weight key '{key}': channel {k} out of range 1..={stored} for fashion {}",
                model.fashion
            )));
        }
        if !model.topo.graph().has_edge(i, j) {
            return Err(Error::InvalidInput(format!(
                "weight key '{key}' names a non-edge"
            )));
        }
        maps[k - 1].insert((i, j), value);
    }
    if stored == 1 {
        Ok(WeightAssignment::single(maps.into_iter().next().unwrap()))
    } else {
        WeightAssignment::multi(maps)
    }
}

/// Monte Carlo verification, or single-point verification when a
/// weights file pins the values.
pub fn cmd_verify(
    model_path: &Path,
    trials: usize,
    seed: u64,
    tol: TolerancePolicy,
    weights_path: Option<&Path>,
) -> Result<CliReport> {
    tol.validate()?;
    let start = Instant::now();
    let model = load_model(model_path)?;
    let payload = match weights_path {
        Some(wp) => {
            let w = load_weights_file(wp, &model)?;
            let (controllable, margin) = controllability_at(&model, &w, &tol)?;
            Payload::SinglePoint {
                controllable,
                margin,
            }
        }
        None => {
            let mut rng = RandomSource::from_seed(seed);
            let mc = monte_carlo_controllability(&model, trials, &tol, &mut rng)?;
            Payload::MonteCarlo(mc)
        }
    };
    Ok(CliReport {
        command: format!("verify {}", model_path.display()),
        seed,
        tolerances: tol,
        model: ModelSummary::of(&model),
        payload,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Write a ready-to-analyze example model document.
pub fn cmd_example(
    name: &str,
    n_subsystems: usize,
    seed: u64,
    tol: TolerancePolicy,
    out: Option<&Path>,
) -> Result<CliReport> {
    tol.validate()?;
    let start = Instant::now();
    let example: ExampleName = name.parse()?;
    let (model, _) = example_model(example, n_subsystems)?;
    let doc = ModelDocument::from_model(&model);
    let default_path = format!("{name}{n_subsystems}.json");
    let path = out
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| default_path.into());
    std::fs::write(&path, doc.to_json()?)?;
    Ok(CliReport {
        command: format!("example {name} --n {n_subsystems}"),
        seed,
        tolerances: tol,
        model: ModelSummary::of(&model),
        payload: Payload::Example {
            name: name.to_string(),
            written_to: path.display().to_string(),
        },
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
