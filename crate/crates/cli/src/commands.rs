//! The command registry: every analysis implements [`Command`] and is looked
//! up by name at runtime.
//!
//! Outcome conventions: a verdict (pass/fail, holonomic/anholonomic) is a
//! [`Report`] and maps to exit code 0 or 1; anything that prevents producing
//! a verdict at all (missing blocks, bad flags, exceeded caps) is a
//! [`CliError`] and maps to exit code 2. Every verdict comes straight from
//! the library; nothing is recomputed here.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use thiserror::Error;

use fibra_core::algebra::GroupStructure;
use fibra_core::bundle::{BundleAtlas, BundleError, Section};
use fibra_core::fibered::FiberedAlgebra;
use fibra_core::holonomy::{classify_holonomic, HolonomyError, Verdict};
use fibra_core::representation::{
    make_representation, FiberedGroup, GroupRepresentation, RepError,
};
use fibra_core::Caps;

use crate::expm::{matrix_exp, max_diff, mat_mul, mat_vec, ExpError};
use crate::report::Report;
use crate::spec::{ParseError, SpecDocument};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("`{0}` requires a spec file argument")]
    MissingSpec(String),
    #[error("spec has no `{block}` block, required by `{command}`")]
    MissingSection { block: String, command: String },
    #[error("unknown section `{0}`; name it in the spec's `sections` block")]
    UnknownSectionName(String),
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("unknown command `{name}`; available: {available}")]
    UnknownCommand { name: String, available: String },
    #[error("unknown demo topic `{0}`; available: exp-shift")]
    UnknownTopic(String),
    #[error("--reference is required for `{0}`")]
    MissingReference(String),
    #[error("enumeration cap exceeded: {0}; raise it with --cap or FIBRA_CAP")]
    CapExceeded(String),
    #[error(transparent)]
    Exp(#[from] ExpError),
}

/// A failure while computing a verdict: either the data violates a law (a
/// fail verdict) or the request itself cannot be served (a usage error).
enum RunFailure {
    Law(String),
    Usage(CliError),
}

impl From<CliError> for RunFailure {
    fn from(e: CliError) -> Self {
        RunFailure::Usage(e)
    }
}

fn bundle_failure(e: BundleError) -> RunFailure {
    match e {
        BundleError::CapExceeded { count, cap } => {
            RunFailure::Usage(CliError::CapExceeded(format!("{count} sections > {cap}")))
        }
        other => RunFailure::Law(other.to_string()),
    }
}

fn rep_failure(e: RepError) -> RunFailure {
    match e {
        RepError::Bundle(BundleError::CapExceeded { count, cap }) => {
            RunFailure::Usage(CliError::CapExceeded(format!("{count} sections > {cap}")))
        }
        other => RunFailure::Law(other.to_string()),
    }
}

fn holonomy_failure(e: HolonomyError) -> RunFailure {
    match e {
        HolonomyError::CapExceeded { cap } => {
            RunFailure::Usage(CliError::CapExceeded(format!("holonomy closure > {cap}")))
        }
        other => RunFailure::Law(other.to_string()),
    }
}

pub struct CommandContext {
    pub spec: Option<SpecDocument>,
    pub base_chart: Option<String>,
    pub reference: Option<String>,
    pub topic: Option<String>,
    pub caps: Caps,
}

impl CommandContext {
    fn require_spec(&self, command: &str) -> Result<&SpecDocument, CliError> {
        self.spec
            .as_ref()
            .ok_or_else(|| CliError::MissingSpec(command.to_string()))
    }
}

pub trait Command {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn needs_spec(&self) -> bool {
        true
    }
    fn run(&self, ctx: &CommandContext) -> Result<Report, CliError>;
}

pub struct CommandRegistry {
    commands: Vec<Box<dyn Command>>,
}

impl CommandRegistry {
    pub fn standard() -> Self {
        CommandRegistry {
            commands: vec![
                Box::new(ValidateCmd),
                Box::new(HolonomyCmd),
                Box::new(OrbitsCmd),
                Box::new(CoordsCmd),
                Box::new(TwinCmd),
                Box::new(KernelCmd),
                Box::new(DemoCmd),
            ],
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.iter().map(|c| c.name()).collect()
    }

    pub fn lookup(&self, name: &str) -> Result<&dyn Command, CliError> {
        self.get(name).ok_or_else(|| CliError::UnknownCommand {
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }
}

fn build_atlas(doc: &SpecDocument) -> Result<BundleAtlas, RunFailure> {
    BundleAtlas::new(
        doc.base.clone(),
        doc.fiber.size(),
        doc.transitions.clone(),
    )
    .map_err(bundle_failure)
}

fn build_group(doc: &SpecDocument, command: &str) -> Result<GroupStructure, RunFailure> {
    let (mul, inv, unit) = doc.group_symbols.as_ref().ok_or_else(|| {
        RunFailure::Usage(CliError::MissingSection {
            block: "fiber.group".to_string(),
            command: command.to_string(),
        })
    })?;
    GroupStructure::new(doc.fiber.clone(), mul, inv, unit)
        .map_err(|e| RunFailure::Law(e.to_string()))
}

/// Builds the validated representation a spec describes: the target bundle
/// from the main document, the fibered group from `group_spec` (or the main
/// document itself), and the action tables.
fn build_representation(
    doc: &SpecDocument,
    command: &str,
) -> Result<GroupRepresentation, RunFailure> {
    let rep = doc.representation.as_ref().ok_or_else(|| {
        RunFailure::Usage(CliError::MissingSection {
            block: "representation".to_string(),
            command: command.to_string(),
        })
    })?;
    let target = build_atlas(doc)?;
    let group_doc: &SpecDocument = rep.group.as_deref().unwrap_or(doc);
    let group_structure = build_group(group_doc, command)?;
    let group_atlas = build_atlas(group_doc)?;
    let group = FiberedGroup::new(group_atlas, group_structure).map_err(rep_failure)?;
    make_representation(&group, &target, rep.variance, rep.action.clone()).map_err(rep_failure)
}

fn resolve_section(
    doc: &SpecDocument,
    atlas: &BundleAtlas,
    name: &str,
) -> Result<Section, RunFailure> {
    let values = doc
        .sections
        .get(name)
        .ok_or_else(|| RunFailure::Usage(CliError::UnknownSectionName(name.to_string())))?;
    atlas.section(values.clone()).map_err(bundle_failure)
}

fn finish(command: &str, outcome: Result<Report, RunFailure>) -> Result<Report, CliError> {
    match outcome {
        Ok(report) => Ok(report),
        Err(RunFailure::Law(witness)) => {
            Ok(Report::fail(command, vec![witness], Value::Null))
        }
        Err(RunFailure::Usage(e)) => Err(e),
    }
}

struct ValidateCmd;

impl Command for ValidateCmd {
    fn name(&self) -> &'static str {
        "validate"
    }

    fn summary(&self) -> &'static str {
        "check gluing laws, fiber homomorphism of transitions, group axioms, and any representation"
    }

    fn run(&self, ctx: &CommandContext) -> Result<Report, CliError> {
        let doc = ctx.require_spec(self.name())?;
        let outcome = (|| {
            let atlas = build_atlas(doc)?;
            FiberedAlgebra::new(atlas, doc.fiber.clone())
                .map_err(|e| RunFailure::Law(e.to_string()))?;
            if doc.group_symbols.is_some() {
                build_group(doc, self.name())?;
            }
            if doc.representation.is_some() {
                build_representation(doc, self.name())?;
            }
            Ok(Report::pass(
                self.name(),
                json!({
                    "points": doc.base.points().len(),
                    "charts": doc.base.charts().len(),
                    "fiber_size": doc.fiber.size(),
                    "group": doc.group_symbols.is_some(),
                    "representation": doc.representation.is_some(),
                }),
            ))
        })();
        finish(self.name(), outcome)
    }
}

struct HolonomyCmd;

impl Command for HolonomyCmd {
    fn name(&self) -> &'static str {
        "holonomy"
    }

    fn summary(&self) -> &'static str {
        "classify the atlas as holonomic or anholonomic from its nerve loops"
    }

    fn run(&self, ctx: &CommandContext) -> Result<Report, CliError> {
        let doc = ctx.require_spec(self.name())?;
        let outcome = (|| {
            let atlas = build_atlas(doc)?;
            let base_chart = match &ctx.base_chart {
                Some(name) => doc
                    .base
                    .chart_index(name)
                    .ok_or_else(|| RunFailure::Usage(CliError::UnknownChart(name.clone())))?,
                None => 0,
            };
            let report = classify_holonomic(&atlas, &doc.fiber, base_chart, &ctx.caps)
                .map_err(holonomy_failure)?;
            let verdict = match report.verdict {
                Verdict::Holonomic => "holonomic",
                Verdict::Anholonomic => "anholonomic",
            };
            let witnesses = match report.witness {
                None => Vec::new(),
                Some(index) => {
                    let lp = &report.group.generator_loops[index];
                    let names: Vec<&str> = lp
                        .charts()
                        .iter()
                        .map(|&c| doc.base.charts()[c].name())
                        .collect();
                    vec![format!(
                        "loop {} transports by {:?}, which is not a fiber automorphism",
                        names.join(" -> "),
                        report.group.generators[index].images()
                    )]
                }
            };
            let mut payload = json!({
                "base_chart": doc.base.charts()[base_chart].name(),
                "generators": report.group.generators.len(),
                "group_order": report.group.elements.len(),
            });
            // Elements are only worth printing at desk scale.
            if report.group.elements.len() <= 24 {
                payload["group_elements"] = json!(report
                    .group
                    .elements
                    .iter()
                    .map(|p| p.images().to_vec())
                    .collect::<Vec<_>>());
            }
            Ok(Report::new(self.name(), verdict, witnesses, payload))
        })();
        finish(self.name(), outcome)
    }
}

struct OrbitsCmd;

impl Command for OrbitsCmd {
    fn name(&self) -> &'static str {
        "orbits"
    }

    fn summary(&self) -> &'static str {
        "partition all sections of the target bundle into representation orbits"
    }

    fn run(&self, ctx: &CommandContext) -> Result<Report, CliError> {
        let doc = ctx.require_spec(self.name())?;
        let outcome = (|| {
            let rep = build_representation(doc, self.name())?;
            let partition = rep.orbit_partition(&ctx.caps).map_err(rep_failure)?;
            let transitivity = rep.transitivity_report(&ctx.caps).map_err(rep_failure)?;
            let sizes: Vec<usize> = partition.blocks().iter().map(|b| b.len()).collect();
            Ok(Report::pass(
                self.name(),
                json!({
                    "sections": sizes.iter().sum::<usize>(),
                    "orbit_count": partition.blocks().len(),
                    "orbit_sizes": sizes,
                    "transitive": transitivity.transitive,
                    "single_transitive": transitivity.single_transitive,
                    "effective": transitivity.effective,
                }),
            ))
        })();
        finish(self.name(), outcome)
    }
}

struct CoordsCmd;

impl Command for CoordsCmd {
    fn name(&self) -> &'static str {
        "coords"
    }

    fn summary(&self) -> &'static str {
        "coordinatize named sections by group sections relative to --reference"
    }

    fn run(&self, ctx: &CommandContext) -> Result<Report, CliError> {
        let doc = ctx.require_spec(self.name())?;
        let outcome = (|| {
            let rep = build_representation(doc, self.name())?;
            let reference_name = ctx
                .reference
                .as_ref()
                .ok_or_else(|| RunFailure::Usage(CliError::MissingReference(self.name().into())))?;
            let reference = resolve_section(doc, rep.target(), reference_name)?;
            let mut coordinates = BTreeMap::new();
            for (name, values) in &doc.sections {
                let section = rep
                    .target()
                    .section(values.clone())
                    .map_err(bundle_failure)?;
                let coord = rep
                    .coordinates(&reference, &section, &ctx.caps)
                    .map_err(rep_failure)?;
                coordinates.insert(name.clone(), coord.values().to_vec());
            }
            Ok(Report::pass(
                self.name(),
                json!({
                    "reference": reference_name,
                    "coordinates": coordinates,
                }),
            ))
        })();
        finish(self.name(), outcome)
    }
}

struct TwinCmd;

impl Command for TwinCmd {
    fn name(&self) -> &'static str {
        "twin"
    }

    fn summary(&self) -> &'static str {
        "build the commuting counterpart of a single-transitive covariant representation"
    }

    fn run(&self, ctx: &CommandContext) -> Result<Report, CliError> {
        let doc = ctx.require_spec(self.name())?;
        let outcome = (|| {
            let rep = build_representation(doc, self.name())?;
            let reference = match &ctx.reference {
                Some(name) => resolve_section(doc, rep.target(), name)?,
                None => rep.target().constant_section(0).map_err(bundle_failure)?,
            };
            let twin = rep.twin(&reference, &ctx.caps).map_err(rep_failure)?;
            let mut action = BTreeMap::new();
            for (x, point) in twin.target().base().points().iter().enumerate() {
                let mut rows = BTreeMap::new();
                for element in 0..twin.group().group().size() {
                    rows.insert(element.to_string(), twin.act(x, element).images().to_vec());
                }
                action.insert(point.clone(), rows);
            }
            Ok(Report::pass(
                self.name(),
                json!({
                    "variance": "contravariant",
                    "reference": ctx.reference.clone().unwrap_or_else(|| "constant-0".into()),
                    "action": action,
                }),
            ))
        })();
        finish(self.name(), outcome)
    }
}

struct KernelCmd;

impl Command for KernelCmd {
    fn name(&self) -> &'static str {
        "kernel"
    }

    fn summary(&self) -> &'static str {
        "compute the kernel of inefficiency and decide effectiveness"
    }

    fn run(&self, ctx: &CommandContext) -> Result<Report, CliError> {
        let doc = ctx.require_spec(self.name())?;
        let outcome = (|| {
            let rep = build_representation(doc, self.name())?;
            let kernel = rep.kernel_of_inefficiency(&ctx.caps).map_err(rep_failure)?;
            let listed: Vec<Vec<usize>> = kernel
                .iter()
                .take(64)
                .map(|s| s.values().to_vec())
                .collect();
            Ok(Report::pass(
                self.name(),
                json!({
                    "kernel_size": kernel.len(),
                    "effective": kernel.len() == 1,
                    "kernel_sections": listed,
                }),
            ))
        })();
        finish(self.name(), outcome)
    }
}

struct DemoCmd;

impl Command for DemoCmd {
    fn name(&self) -> &'static str {
        "demo"
    }

    fn summary(&self) -> &'static str {
        "numeric exp(tA) shift demo over a discretized real line"
    }

    fn needs_spec(&self) -> bool {
        false
    }

    fn run(&self, ctx: &CommandContext) -> Result<Report, CliError> {
        match ctx.topic.as_deref().unwrap_or("exp-shift") {
            "exp-shift" => run_exp_shift_demo(),
            other => Err(CliError::UnknownTopic(other.to_string())),
        }
    }
}

/// The one non-finite example: the section `a(t) = exp(tA)` over a sampled
/// grid of the real line, acting on a vector section by left shift.
fn run_exp_shift_demo() -> Result<Report, CliError> {
    let generator = vec![vec![0.0, -1.0], vec![1.0, 0.0]];
    let grid: Vec<f64> = vec![-1.0, -0.5, 0.0, 0.5, 1.0];
    let vector = vec![1.0, 0.0];

    let mut samples = Vec::new();
    for &t in &grid {
        let a_t = matrix_exp(&generator, t)?;
        let shifted = mat_vec(&a_t, &vector);
        samples.push(json!({
            "t": t,
            "exp_tA": a_t,
            "shifted": shifted,
        }));
    }

    // exp((s+t)A) must factor through the shifts at s and t.
    let mut worst_defect = 0.0f64;
    for &s in &[0.1, 0.5, 1.0] {
        for &t in &[0.1, 0.5, 1.0] {
            let product = mat_mul(
                &matrix_exp(&generator, s)?,
                &matrix_exp(&generator, t)?,
            );
            let direct = matrix_exp(&generator, s + t)?;
            worst_defect = worst_defect.max(max_diff(&product, &direct));
        }
    }

    let nilpotent = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
    let nilpotent_exp = matrix_exp(&nilpotent, 2.0)?;

    let verdict = if worst_defect <= 1e-9 { "pass" } else { "fail" };
    Ok(Report::new(
        "demo",
        verdict,
        Vec::new(),
        json!({
            "topic": "exp-shift",
            "generator": generator,
            "vector_section": vector,
            "samples": samples,
            "one_parameter_defect": worst_defect,
            "nilpotent_example": {
                "matrix": nilpotent,
                "t": 2.0,
                "exp": nilpotent_exp,
            },
        }),
    ))
}
