//! Experiment configuration and the end-to-end pipeline.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calculus::{embedding_constants, EmbeddingConstants, RatioSearch};
use crate::energy::{energy_j, lower_bounds, LowerBounds, ProblemFile, ProblemSpec, Variant};
use crate::error::{Error, Result};
use crate::generate::Generator;
use crate::solver::{minimize, minimize_variant, multi_start_analysis, MinimizerResult, SolverOptions};
use crate::space::{build_space, structural_constants, HypothesisReport, MetricMeasureSpace, PoincareOptions, SpaceFile};
use crate::verify::{
    boundedness_report, de_giorgi_check, default_boundary_samples, default_interior_samples, dg_class_both,
    summarize, write_de_giorgi_csv, write_dg_class_csv, BoundednessReport, DeGiorgiSummary, PassCounts,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceSource {
    File(PathBuf),
    Generate(Generator),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub relax_radii: bool,
    /// Radius grid for the structural constants; defaults to `diam(Ω) * {1/8, 1/4, 1/2}`.
    pub radius_grid: Option<Vec<f64>>,
    /// Radius for the boundedness report; see [`default_boundedness_radius`].
    pub boundedness_radius: Option<f64>,
    pub poincare: RatioSearch,
    pub embedding: RatioSearch,
    /// Largest admissible `||g_i - g_j||_inf` across starts.
    pub gradient_gap_tol: f64,
    /// Largest admissible gap in the non-gradient part of the energy across starts.
    pub non_gradient_gap_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            relax_radii: false,
            radius_grid: None,
            boundedness_radius: None,
            poincare: PoincareOptions::default().search,
            embedding: RatioSearch::default(),
            gradient_gap_tol: 1e-4,
            non_gradient_gap_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceSource,
    pub problem: ProblemFile,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Load a config; relative space paths are resolved against the config's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut config: RunConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        if let SpaceSource::File(p) = &config.space {
            if p.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                config.space = SpaceSource::File(base.join(p));
            }
        }
        Ok(config)
    }

    pub fn space_file(&self) -> Result<SpaceFile> {
        match &self.space {
            SpaceSource::File(p) => {
                if !p.exists() {
                    return Err(Error::BadParams(format!("space file {} does not exist", p.display())));
                }
                SpaceFile::load(p)
            }
            SpaceSource::Generate(g) => g.build(),
        }
    }

    pub fn build(&self) -> Result<(MetricMeasureSpace, ProblemSpec)> {
        let space = build_space(&self.space_file()?)?;
        let spec = ProblemSpec::from_file(&space, &self.problem)?;
        self.solver.validate()?;
        Ok((space, spec))
    }
}

pub fn default_radius_grid(space: &MetricMeasureSpace) -> Vec<f64> {
    let d = space.domain_diameter();
    let grid: Vec<f64> = [0.125, 0.25, 0.5].iter().map(|f| f * d).filter(|&r| r > 0.0).collect();
    if grid.is_empty() {
        vec![space.min_edge_length().min(space.diameter())]
    } else {
        grid
    }
}

/// `0.9 diam(Ω) / 4`, or `0.3 diam(Ω)` with relaxed radii.
pub fn default_boundedness_radius(space: &MetricMeasureSpace, relax: bool) -> f64 {
    let d = space.domain_diameter();
    if relax {
        0.3 * d
    } else {
        0.225 * d
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexValue {
    pub id: String,
    pub u: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerFile {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub eps_final: f64,
    pub vertices: Vec<VertexValue>,
}

impl MinimizerFile {
    pub fn new(space: &MetricMeasureSpace, result: &MinimizerResult) -> Self {
        Self {
            value: result.value,
            converged: result.converged,
            iterations: result.iterations,
            eps_final: result.eps_final,
            vertices: space
                .closure()
                .iter()
                .map(|&v| VertexValue {
                    id: space.id(v).to_string(),
                    u: result.u.get(v),
                    g: result.g.get(v),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessSummary {
    pub starts: usize,
    pub max_value_gap: f64,
    pub max_gradient_gap: f64,
    pub max_non_gradient_gap: f64,
    pub max_field_gap_domain: f64,
    pub max_field_gap_closure: f64,
    pub max_midpoint_excess: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DgSummary {
    #[serde(rename = "K_u")]
    pub k_u: f64,
    #[serde(rename = "K_neg_u")]
    pub k_neg_u: f64,
    pub pass_counts_u: PassCounts,
    pub pass_counts_neg_u: PassCounts,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub vertices: usize,
    pub domain_measure: f64,
    pub domain_diameter: f64,
    pub p: f64,
    pub p_star: f64,
    #[serde(rename = "K_S")]
    pub k_s: f64,
    #[serde(rename = "K_T")]
    pub k_t: f64,
    pub energy_at_zero: f64,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub lower_bounds: LowerBounds,
    pub floor_violations: usize,
    pub uniqueness: UniquenessSummary,
    pub de_giorgi: DeGiorgiSummary,
    pub dg_class: DgSummary,
    pub boundedness: BoundednessReport,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisFile<'a> {
    #[serde(flatten)]
    pub report: &'a HypothesisReport,
    pub p_star: f64,
    #[serde(rename = "K_S")]
    pub k_s: f64,
    #[serde(rename = "K_T")]
    pub k_t: f64,
    pub q_conjugate: f64,
}

/// Overrides applied on top of a config by the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub relax_radii: bool,
    pub output_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) {
        if let Some(seed) = self.seed {
            config.solver.seed = seed;
            config.verify.poincare.seed = seed;
            config.verify.embedding.seed = seed;
        }
        if self.relax_radii {
            config.verify.relax_radii = true;
        }
        if let Some(out) = &self.output_dir {
            config.output_dir = out.clone();
        }
    }
}

pub struct Outcome {
    pub summary: Summary,
    pub hypothesis: HypothesisReport,
    pub embedding: EmbeddingConstants,
    pub minimizer: MinimizerResult,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(dir.join(name), text)?;
    Ok(())
}

/// Solve only: write `minimizer.json`.
pub fn solve(config: &RunConfig) -> Result<MinimizerResult> {
    let (space, spec) = config.build()?;
    let result = minimize(&space, &spec, &config.solver)?;
    fs::create_dir_all(&config.output_dir)?;
    write_json(&config.output_dir, "minimizer.json", &MinimizerFile::new(&space, &result))?;
    Ok(result)
}

/// Full pipeline. Artifacts are written to the output directory; the summary
/// lists every failed hard assertion.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let (space, spec) = config.build()?;
    let opts = &config.solver;
    let verify = &config.verify;
    let relax = verify.relax_radii;
    let mut failures = Vec::new();

    let grid = verify.radius_grid.clone().unwrap_or_else(|| default_radius_grid(&space));
    let poincare = PoincareOptions { search: verify.poincare };
    let hypothesis = structural_constants(&space, &grid, spec.p, &poincare)?;
    let worst = hypothesis.recheck(&space);
    if worst > 1e-12 {
        failures.push(format!("structural inequalities fail on the grid (excess {worst:e})"));
    }
    for (name, k) in [("K_D", hypothesis.k_d), ("K_H1", hypothesis.k_h1), ("K_H2", hypothesis.k_h2)] {
        if !(k.is_finite() && k >= 1.0) {
            failures.push(format!("{name} = {k} is not a finite constant >= 1"));
        }
    }
    let embedding = embedding_constants(&space, spec.p, hypothesis.s, spec.q, &verify.embedding)?;
    if let Err(e) = spec.check_gamma(embedding.p_star) {
        failures.push(e.to_string());
    }

    let minimizer = minimize(&space, &spec, opts)?;
    let zero = crate::calculus::ScalarField::zeros(&space, crate::calculus::Support::Closure);
    let energy_at_zero = energy_j(&space, &zero, &spec, Variant::J)?;
    if !minimizer.converged {
        failures.push(format!("minimizer did not converge after {} iterations", minimizer.iterations));
    }
    if minimizer.value > energy_at_zero + 1e-12 * energy_at_zero.abs().max(1.0) {
        failures.push(format!("minimum {} exceeds J(0) = {energy_at_zero}", minimizer.value));
    }
    let mean = space.mean(minimizer.u.values(), space.interior())?;
    if mean.abs() > 1e-12 {
        failures.push(format!("minimizer mean {mean:e} is not zero"));
    }

    let bounds = lower_bounds(&space, &spec, embedding.k_t);
    let floor_violations = minimizer
        .true_history
        .iter()
        .filter(|&&j| j < bounds.explicit_floor)
        .count();
    if floor_violations > 0 {
        failures.push(format!("{floor_violations} iterates fall below the explicit floor"));
    }

    let uniqueness = multi_start_analysis(&space, &spec, &SolverOptions { starts: opts.starts.max(2), ..*opts })?;
    if uniqueness.max_gradient_gap > verify.gradient_gap_tol {
        failures.push(format!("gradient fields differ by {:e} across starts", uniqueness.max_gradient_gap));
    }
    if uniqueness.max_non_gradient_gap > verify.non_gradient_gap_tol {
        failures.push(format!(
            "non-gradient energy parts differ by {:e} across starts",
            uniqueness.max_non_gradient_gap
        ));
    }

    let samples = default_boundary_samples(&space, &minimizer.u, relax);
    let de_giorgi_rows = de_giorgi_check(&space, &minimizer.u, &spec, &samples, relax)?;
    let de_giorgi = summarize(&de_giorgi_rows);
    if de_giorgi.pass_counts.failed > 0 {
        failures.push(format!("{} De Giorgi samples have no finite constant", de_giorgi.pass_counts.failed));
    }

    let free = minimize_variant(&space, &spec, Variant::I, opts, None)?;
    let interior_samples = default_interior_samples(&space, &free.u, relax);
    let (dg_u, dg_neg) = dg_class_both(&space, &free.u, spec.p, &interior_samples)?;
    if !dg_u.pass || !dg_neg.pass {
        failures.push("De Giorgi class check fails for the free minimizer or its negation".into());
    }

    let radius = verify.boundedness_radius.unwrap_or_else(|| default_boundedness_radius(&space, relax));
    let boundedness = boundedness_report(&space, &minimizer.u, radius, relax, None)?;

    let out = &config.output_dir;
    fs::create_dir_all(out)?;
    write_json(
        out,
        "hypothesis.json",
        &HypothesisFile {
            report: &hypothesis,
            p_star: embedding.p_star,
            k_s: embedding.k_s,
            k_t: embedding.k_t,
            q_conjugate: embedding.q_conjugate,
        },
    )?;
    write_json(out, "minimizer.json", &MinimizerFile::new(&space, &minimizer))?;
    write_de_giorgi_csv(fs::File::create(out.join("degiorgi.csv"))?, &de_giorgi_rows)?;
    write_dg_class_csv(fs::File::create(out.join("dgclass.csv"))?, &[("u", &dg_u), ("-u", &dg_neg)])?;

    let summary = Summary {
        seed: opts.seed,
        vertices: space.len(),
        domain_measure: space.domain_measure(),
        domain_diameter: space.domain_diameter(),
        p: spec.p,
        p_star: embedding.p_star,
        k_s: embedding.k_s,
        k_t: embedding.k_t,
        energy_at_zero,
        value: minimizer.value,
        converged: minimizer.converged,
        iterations: minimizer.iterations,
        lower_bounds: bounds,
        floor_violations,
        uniqueness: UniquenessSummary {
            starts: uniqueness.starts,
            max_value_gap: uniqueness.max_value_gap,
            max_gradient_gap: uniqueness.max_gradient_gap,
            max_non_gradient_gap: uniqueness.max_non_gradient_gap,
            max_field_gap_domain: uniqueness.max_field_gap_domain,
            max_field_gap_closure: uniqueness.max_field_gap_closure,
            max_midpoint_excess: uniqueness.max_midpoint_excess,
        },
        de_giorgi,
        dg_class: DgSummary {
            k_u: dg_u.k,
            k_neg_u: dg_neg.k,
            pass_counts_u: dg_u.pass_counts,
            pass_counts_neg_u: dg_neg.pass_counts,
            samples: interior_samples.len(),
        },
        boundedness,
        failures,
    };
    write_json(out, "summary.json", &summary)?;
    Ok(Outcome {
        summary,
        hypothesis,
        embedding,
        minimizer,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub de_giorgi: DeGiorgiSummary,
    pub de_giorgi_samples: Vec<crate::verify::DeGiorgiSample>,
    pub dg_u: crate::verify::DgClassReport,
    pub dg_neg_u: crate::verify::DgClassReport,
    pub boundedness: BoundednessReport,
    pub failures: Vec<String>,
}

/// Solve, then run the regularity checks only.
pub fn verify(config: &RunConfig, format: Format) -> Result<VerifyOutcome> {
    let (space, spec) = config.build()?;
    let relax = config.verify.relax_radii;
    let minimizer = minimize(&space, &spec, &config.solver)?;
    let samples = default_boundary_samples(&space, &minimizer.u, relax);
    let rows = de_giorgi_check(&space, &minimizer.u, &spec, &samples, relax)?;
    let de_giorgi = summarize(&rows);
    let free = minimize_variant(&space, &spec, Variant::I, &config.solver, None)?;
    let interior = default_interior_samples(&space, &free.u, relax);
    let (dg_u, dg_neg_u) = dg_class_both(&space, &free.u, spec.p, &interior)?;
    let radius = config.verify.boundedness_radius.unwrap_or_else(|| default_boundedness_radius(&space, relax));
    let boundedness = boundedness_report(&space, &minimizer.u, radius, relax, None)?;
    let mut failures = Vec::new();
    if de_giorgi.pass_counts.failed > 0 {
        failures.push(format!("{} De Giorgi samples have no finite constant", de_giorgi.pass_counts.failed));
    }
    if !dg_u.pass || !dg_neg_u.pass {
        failures.push("De Giorgi class check fails for the free minimizer or its negation".into());
    }
    let outcome = VerifyOutcome {
        de_giorgi,
        de_giorgi_samples: rows,
        dg_u,
        dg_neg_u,
        boundedness,
        failures,
    };
    let out = &config.output_dir;
    fs::create_dir_all(out)?;
    match format {
        Format::Csv => {
            write_de_giorgi_csv(fs::File::create(out.join("degiorgi.csv"))?, &outcome.de_giorgi_samples)?;
            write_dg_class_csv(
                fs::File::create(out.join("dgclass.csv"))?,
                &[("u", &outcome.dg_u), ("-u", &outcome.dg_neg_u)],
            )?;
        }
        Format::Json => write_json(out, "verify.json", &outcome)?,
    }
    Ok(outcome)
}
