//! JSON run configurations and their expansion into sampled fields.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use nodal_core::verify::random_torus_combination;
use nodal_core::{
    BuiltinField, Family, FieldExpr, ModeIndex, ModeSpec, Quantity, Resolution, SurfaceModel, SweepSpec, Term,
    WeightFn,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Nodal domain tables.
    Analyze,
    /// Level sweeps with Banach indicatrix, Sasaki and Leray lengths.
    Sweep,
    /// Log-log scaling fits over a mode family.
    Scaling,
    /// Inequality reports.
    Verify,
    /// Everything above.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Torus,
    Sphere,
    Rectangle,
    Disc,
}

impl ModelName {
    fn of(model: SurfaceModel) -> Self {
        match model {
            SurfaceModel::FlatTorus => Self::Torus,
            SurfaceModel::RoundSphere => Self::Sphere,
            SurfaceModel::EuclideanRectangle { .. } => Self::Rectangle,
            SurfaceModel::UnitDisc => Self::Disc,
        }
    }
}

/// One explicit field: a combination of modes on the run's model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub terms: Vec<TermConfig>,
    #[serde(default = "yes")]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub mode: ModeIndex,
    #[serde(default = "one")]
    pub coefficient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomConfig {
    pub seed: u64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResolutionConfig {
    Square(usize),
    Axes([usize; 2]),
}

impl ResolutionConfig {
    pub fn resolution(self) -> Resolution {
        match self {
            Self::Square(n) => Resolution::square(n),
            Self::Axes([nu, nv]) => Resolution::new(nu, nv),
        }
    }
}

/// `"abs"`-style shorthand or a full weight object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightConfig {
    Name(String),
    Full(WeightFn),
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self::Name("one".into())
    }
}

impl WeightConfig {
    pub fn weight(&self) -> Result<WeightFn> {
        match self {
            Self::Name(s) => Ok(WeightFn::parse(s)?),
            Self::Full(w) => Ok(w.clone()),
        }
    }
}

/// A complete run. Every key except `command` is optional; unknown keys
/// are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub model: Option<ModelName>,
    /// Rectangle sides, `[pi, pi]` when absent.
    #[serde(default)]
    pub rect: Option<[f64; 2]>,
    #[serde(default)]
    pub fields: Vec<FieldConfig>,
    #[serde(default)]
    pub family: Option<Family>,
    #[serde(default)]
    pub builtin: Option<BuiltinField>,
    /// Seeded random torus combinations, seeds `seed..seed+count`.
    #[serde(default)]
    pub random: Option<RandomConfig>,
    #[serde(default)]
    pub resolution: Option<ResolutionConfig>,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub u: WeightConfig,
    /// Quantities for `scaling`; a per-family default set when empty.
    #[serde(default)]
    pub quantities: Vec<Quantity>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub contours: bool,
    #[serde(default)]
    pub grid: bool,
}

fn yes() -> bool {
    true
}

fn one() -> f64 {
    1.0
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            model: None,
            rect: None,
            fields: Vec::new(),
            family: None,
            builtin: None,
            random: None,
            resolution: None,
            sweep: SweepSpec::default(),
            u: WeightConfig::default(),
            quantities: Vec::new(),
            out_dir: None,
            contours: false,
            grid: false,
        }
    }

    /// Parses a JSON document. Errors carry `line:column` of the offending
    /// token.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("{}:{}: {}", e.line(), e.column(), strip_position(&e)))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| anyhow!("{}:{}:{}: {}", path.display(), e.line(), e.column(), strip_position(&e)))
    }

    pub fn surface(&self) -> Result<Option<SurfaceModel>> {
        let Some(name) = self.model else { return Ok(None) };
        Ok(Some(match name {
            ModelName::Torus => SurfaceModel::FlatTorus,
            ModelName::Sphere => SurfaceModel::RoundSphere,
            ModelName::Rectangle => {
                let [a, b] = self.rect.unwrap_or([PI, PI]);
                SurfaceModel::rectangle(a, b)?
            }
            ModelName::Disc => SurfaceModel::UnitDisc,
        }))
    }

    /// Every field the run touches, in a fixed order: explicit fields, the
    /// family in ascending order, the builtin, then random combinations.
    pub fn members(&self) -> Result<Vec<Member>> {
        let surface = self.surface()?;
        let mut out = Vec::new();
        for (k, field) in self.fields.iter().enumerate() {
            let model = surface.ok_or_else(|| anyhow!("fields[{k}] needs a model"))?;
            let terms = field
                .terms
                .iter()
                .map(|t| Ok(Term { coefficient: t.coefficient, mode: ModeSpec::new(model, t.mode)? }))
                .collect::<Result<Vec<_>>>()
                .with_context(|| format!("fields[{k}]"))?;
            let expr = FieldExpr::combination(terms)?.with_normalize(field.normalize);
            let tag = match expr.terms() {
                [t] => mode_tag(&t.mode),
                _ => format!("field{k}"),
            };
            out.push(Member { tag, expr });
        }
        if let Some(family) = &self.family {
            for mode in family.modes()? {
                self.check_model(mode.model())?;
                out.push(Member { tag: mode_tag(&mode), expr: FieldExpr::mode(mode).normalized() });
            }
        }
        if let Some(b) = self.builtin {
            self.check_model(b.model())?;
            let tag = match b {
                BuiltinField::DiscParaboloid => "disc_paraboloid".to_string(),
            };
            out.push(Member { tag, expr: FieldExpr::builtin(b).normalized() });
        }
        if let Some(r) = self.random {
            self.check_model(SurfaceModel::FlatTorus)?;
            for seed in r.seed..r.seed + r.count as u64 {
                out.push(Member { tag: format!("random_s{seed}"), expr: random_torus_combination(seed)? });
            }
        }
        if out.is_empty() {
            bail!("the run has no fields: give fields, a family, a builtin or random combinations");
        }
        dedupe_tags(&mut out);
        Ok(out)
    }

    fn check_model(&self, model: SurfaceModel) -> Result<()> {
        match self.model {
            Some(name) if name != ModelName::of(model) => {
                bail!("model {:?} conflicts with a {} field", name, model.name())
            }
            _ => Ok(()),
        }
    }

    /// Quantities for a scaling run.
    pub fn scaling_quantities(&self, family: &Family) -> Vec<Quantity> {
        if !self.quantities.is_empty() {
            return self.quantities.clone();
        }
        match family {
            Family::TorusDiagonal { .. } => vec![
                Quantity::SumExtrema { q: 1.0 },
                Quantity::SumExtrema { q: 2.0 },
                Quantity::SupNorm,
                Quantity::MinInradius,
            ],
            Family::Zonal { .. } => vec![
                Quantity::SumExtrema { q: 6.0 },
                Quantity::SupNorm,
                Quantity::LpNorm { p: 6.0 },
                Quantity::DomainCount,
            ],
            Family::DirichletDiagonal { .. } => {
                vec![Quantity::SumExtrema { q: 1.0 }, Quantity::SumExtrema { q: 8.0 }, Quantity::SupNorm]
            }
        }
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// A named field of a run. The tag prefixes every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub tag: String,
    pub expr: FieldExpr,
}

fn mode_tag(mode: &ModeSpec) -> String {
    match mode.index() {
        ModeIndex::Torus { m, n, branch } => format!("torus_m{m}_n{n}_{}", branch.as_str()),
        ModeIndex::Sphere { l, m } => format!("sphere_l{l}_m{m}"),
        ModeIndex::Dirichlet { m, n } => format!("rect_m{m}_n{n}"),
    }
}

fn dedupe_tags(members: &mut [Member]) {
    let mut seen = std::collections::HashMap::<String, usize>::new();
    for m in members.iter_mut() {
        let k = seen.entry(m.tag.clone()).or_insert(0);
        *k += 1;
        if *k > 1 {
            m.tag = format!("{}_{}", m.tag, k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected_with_position() {
        let err = RunConfig::from_json("{\n  \"command\": \"verify\",\n  \"colour\": 1\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("3:"), "{msg}");
        assert!(msg.contains("colour"), "{msg}");
    }

    #[test]
    fn empty_document_rejected() {
        assert!(RunConfig::from_json("").is_err());
        assert!(RunConfig::from_json("{}").is_err());
    }

    #[test]
    fn family_members_in_order() {
        let cfg = RunConfig::from_json(r#"{"command":"verify","family":{"kind":"torus-diagonal","n_min":1,"n_max":3}}"#)
            .unwrap();
        let tags: Vec<_> = cfg.members().unwrap().into_iter().map(|m| m.tag).collect();
        assert_eq!(tags, ["torus_m1_n1_sin-sin", "torus_m2_n2_sin-sin", "torus_m3_n3_sin-sin"]);
    }

    #[test]
    fn explicit_fields_need_model() {
        let text = r#"{"command":"analyze","fields":[{"terms":[{"mode":{"kind":"sphere","l":3,"m":1}}]}]}"#;
        assert!(RunConfig::from_json(text).unwrap().members().is_err());
        let text = r#"{"command":"analyze","model":"sphere","fields":[{"terms":[{"mode":{"kind":"sphere","l":3,"m":1}}]}]}"#;
        let members = RunConfig::from_json(text).unwrap().members().unwrap();
        assert_eq!(members[0].tag, "sphere_l3_m1");
        assert!(members[0].expr.normalize_requested());
    }

    #[test]
    fn model_conflict_rejected() {
        let text = r#"{"command":"verify","model":"sphere","builtin":"disc-paraboloid"}"#;
        assert!(RunConfig::from_json(text).unwrap().members().is_err());
    }

    #[test]
    fn no_fields_rejected() {
        assert!(RunConfig::new(Command::Verify).members().is_err());
    }

    #[test]
    fn duplicate_tags_suffixed() {
        let mut ms = vec![
            Member { tag: "a".into(), expr: FieldExpr::disc_paraboloid() },
            Member { tag: "a".into(), expr: FieldExpr::disc_paraboloid() },
        ];
        dedupe_tags(&mut ms);
        assert_eq!(ms[1].tag, "a_2");
    }
}
