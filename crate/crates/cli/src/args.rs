//! Command-line flags. They mirror the common config keys and override a
//! loaded `--config` file.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use nodal_core::{BuiltinField, Family, ModeIndex, TorusBranch};

use crate::config::{Command, FieldConfig, ModelName, RandomConfig, ResolutionConfig, RunConfig, TermConfig, WeightConfig};

#[derive(Debug, Parser)]
#[command(name = "nodal", version, about = "Nodal domains, level sweeps and inequality reports for model eigenfunctions")]
pub struct Cli {
    /// What to run; taken from the config file when omitted.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    /// `nn:A..B` diagonal family, `zonal:A..B`, or one mode `m,n[,branch]`
    /// (`l,m` on the sphere). Repeatable.
    #[arg(long)]
    pub modes: Vec<String>,
    /// Zonal harmonic of degree `l` on the sphere. Repeatable.
    #[arg(long)]
    pub zonal: Vec<u32>,
    /// Builtin field; only `paraboloid` exists.
    #[arg(long)]
    pub builtin: Option<String>,
    /// `N` or `NU,NV`.
    #[arg(long)]
    pub resolution: Option<String>,
    /// Rectangle sides `a,b`.
    #[arg(long)]
    pub rect: Option<String>,
    #[arg(long, env = "NODAL_OUT_DIR")]
    pub out: Option<PathBuf>,
    /// Also write contour polylines of every sweep level.
    #[arg(long)]
    pub contours: bool,
    /// Also write the sampled grid.
    #[arg(long)]
    pub grid: bool,
    /// Sasaki parameters, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub r: Vec<f64>,
    /// Weight `u`: one, abs, square or a constant.
    #[arg(long)]
    pub u: Option<String>,
    /// Number of sweep levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// First seed of the random torus combinations.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random torus combinations.
    #[arg(long)]
    pub random: Option<usize>,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match (&self.config, self.command) {
            (Some(path), _) => RunConfig::from_path(path)?,
            (None, Some(c)) => RunConfig::new(c),
            (None, None) => bail!("give a command or --config"),
        };
        if let Some(c) = self.command {
            cfg.command = c;
        }
        if let Some(m) = self.model {
            cfg.model = Some(m);
        }
        if let Some(s) = &self.rect {
            let v = parse_list::<f64>(s).context("--rect")?;
            let [a, b] = v[..] else { bail!("--rect takes a,b") };
            cfg.rect = Some([a, b]);
            cfg.model.get_or_insert(ModelName::Rectangle);
        }
        if !self.zonal.is_empty() {
            cfg.model.get_or_insert(ModelName::Sphere);
            for l in &self.zonal {
                cfg.fields.push(FieldConfig {
                    terms: vec![TermConfig { mode: ModeIndex::Sphere { l: *l, m: 0 }, coefficient: 1.0 }],
                    normalize: true,
                });
            }
        }
        for spec in &self.modes {
            apply_modes(&mut cfg, spec).with_context(|| format!("--modes {spec}"))?;
        }
        if let Some(b) = &self.builtin {
            cfg.builtin = Some(match b.as_str() {
                "paraboloid" | "disc-paraboloid" => BuiltinField::DiscParaboloid,
                _ => bail!("unknown builtin '{b}'"),
            });
        }
        if let Some(s) = &self.resolution {
            let v = parse_list::<usize>(s).context("--resolution")?;
            cfg.resolution = Some(match v[..] {
                [n] => ResolutionConfig::Square(n),
                [nu, nv] => ResolutionConfig::Axes([nu, nv]),
                _ => bail!("--resolution takes N or NU,NV"),
            });
        }
        if let Some(out) = self.out {
            cfg.out_dir = Some(out);
        }
        if self.contours {
            cfg.contours = true;
        }
        if self.grid {
            cfg.grid = true;
        }
        if !self.r.is_empty() {
            cfg.sweep.r_values = self.r;
        }
        if let Some(u) = self.u {
            cfg.u = WeightConfig::Name(u);
        }
        if let Some(n) = self.levels {
            cfg.sweep.n_levels = n;
        }
        match (self.seed, self.random) {
            (Some(seed), count) => cfg.random = Some(RandomConfig { seed, count: count.unwrap_or(1) }),
            (None, Some(count)) => cfg.random = Some(RandomConfig { seed: 0, count }),
            (None, None) => {}
        }
        Ok(cfg)
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| anyhow!("cannot parse '{p}'")))
        .collect()
}

fn parse_range(s: &str) -> Result<(u32, u32)> {
    let (a, b) = s.split_once("..").ok_or_else(|| anyhow!("expected A..B, got '{s}'"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn set_family(cfg: &mut RunConfig, family: Family) -> Result<()> {
    if cfg.family.is_some() {
        bail!("only one family per run");
    }
    cfg.family = Some(family);
    Ok(())
}

fn apply_modes(cfg: &mut RunConfig, spec: &str) -> Result<()> {
    if let Some(range) = spec.strip_prefix("nn:") {
        let (n_min, n_max) = parse_range(range)?;
        let family = match cfg.model.get_or_insert(ModelName::Torus) {
            ModelName::Torus => Family::TorusDiagonal { n_min, n_max },
            ModelName::Rectangle => {
                let [a, b] = cfg.rect.unwrap_or([std::f64::consts::PI; 2]);
                Family::DirichletDiagonal { a, b, n_min, n_max }
            }
            m => bail!("no diagonal family on the {m:?} model"),
        };
        return set_family(cfg, family);
    }
    if let Some(range) = spec.strip_prefix("zonal:") {
        let (l_min, l_max) = parse_range(range)?;
        match cfg.model.get_or_insert(ModelName::Sphere) {
            ModelName::Sphere => return set_family(cfg, Family::Zonal { l_min, l_max }),
            m => bail!("zonal harmonics live on the sphere, not the {m:?} model"),
        }
    }
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let (a, b, branch) = match parts[..] {
        [a, b] => (a, b, None),
        [a, b, br] => (a, b, Some(br)),
        _ => bail!("expected nn:A..B, zonal:A..B or m,n[,branch]"),
    };
    let mode = match cfg.model.get_or_insert(ModelName::Torus) {
        ModelName::Torus => {
            let (m, n): (u32, u32) = (a.parse()?, b.parse()?);
            let branch = match branch {
                Some(s) => TorusBranch::ALL
                    .into_iter()
                    .find(|br| br.as_str() == s)
                    .ok_or_else(|| anyhow!("unknown branch '{s}'"))?,
                None => match (m, n) {
                    (0, _) => TorusBranch::CosSin,
                    (_, 0) => TorusBranch::SinCos,
                    _ => TorusBranch::SinSin,
                },
            };
            ModeIndex::Torus { m, n, branch }
        }
        ModelName::Sphere => ModeIndex::Sphere { l: a.parse()?, m: b.parse()? },
        ModelName::Rectangle => ModeIndex::Dirichlet { m: a.parse()?, n: b.parse()? },
        ModelName::Disc => bail!("the disc carries builtin fields only"),
    };
    if branch.is_some() && !matches!(mode, ModeIndex::Torus { .. }) {
        bail!("branches apply to torus modes only");
    }
    cfg.fields.push(FieldConfig { terms: vec![TermConfig { mode, coefficient: 1.0 }], normalize: true });
    Ok(())
}
