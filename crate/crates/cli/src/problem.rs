//! Problem files: JSON with a `kind`, optional `variables`, and kind-specific blocks.

use std::path::Path;

use bipencil::algebra::{frozen_argument, linear_pencil, Cocycle, LieStructure};
use bipencil::connection::Frame;
use bipencil::expr::parse_rational;
use bipencil::pencil::Pencil;
use bipencil::poisson::PoissonTensor;
use bipencil::web::{uv, CasimirTriple, Web3};
use bipencil::{parse, Rational, Vars};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Pencil,
    LinearPencil,
    LiePencil,
    Web,
    Reduction,
    Connection,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Pencil => "pencil",
            Kind::LinearPencil => "linear_pencil",
            Kind::LiePencil => "lie_pencil",
            Kind::Web => "web",
            Kind::Reduction => "reduction",
            Kind::Connection => "connection",
        }
    }
}

/// The three independent entries `xy`, `yz`, `zx` of a skew object.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Components {
    pub xy: String,
    pub yz: String,
    pub zx: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HexagonSpec {
    pub origin: [f64; 2],
    #[serde(default = "default_eps_min")]
    pub eps_min: f64,
    #[serde(default = "default_eps_max")]
    pub eps_max: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

fn default_eps_min() -> f64 {
    1e-3
}

fn default_eps_max() -> f64 {
    1e-1
}

fn default_steps() -> usize {
    7
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CasimirSpec {
    pub f: String,
    pub g: String,
    pub h: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpec {
    #[serde(rename = "X")]
    pub x: [String; 3],
    #[serde(rename = "Y")]
    pub y: [String; 3],
    #[serde(rename = "Z")]
    pub z: [String; 3],
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default)]
    pub numeric_check: bool,
    pub step: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    pub variables: Option<Vec<String>>,
    #[serde(rename = "P")]
    pub p: Option<Components>,
    #[serde(rename = "Q")]
    pub q: Option<Components>,
    pub algebra: Option<Components>,
    pub cocycle: Option<Components>,
    pub xi: Option<[String; 3]>,
    pub functions: Option<[String; 3]>,
    pub hexagon: Option<HexagonSpec>,
    pub casimirs: Option<CasimirSpec>,
    pub frame: Option<FrameSpec>,
    #[serde(default)]
    pub points: Vec<Vec<String>>,
    #[serde(default)]
    pub options: Options,
}

/// How the two tensors of a pencil were given.
#[derive(Clone, Debug)]
pub enum Source {
    Tensors,
    Linear { algebra: LieStructure, cocycle: Cocycle },
    Lie { p: LieStructure, q: LieStructure },
}

/// A parsed problem. Tensors are kept unchecked so `check` can report on them.
#[derive(Clone, Debug)]
pub struct Problem {
    pub kind: Kind,
    pub vars: Vars,
    pub p: Option<PoissonTensor>,
    pub q: Option<PoissonTensor>,
    pub source: Source,
    pub web: Option<Web3>,
    pub hexagon: Option<HexagonSpec>,
    pub casimirs: Option<CasimirTriple>,
    pub frame: Option<Frame>,
    pub points: Vec<Vec<Rational>>,
    pub options: Options,
}

fn missing(kind: Kind, field: &str) -> CliError {
    CliError::Input(format!("{} file needs `{field}`", kind.name()))
}

fn input<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{what}: {e}"))
}

fn tensor(vars: &Vars, c: &Components, what: &str) -> Result<PoissonTensor, CliError> {
    PoissonTensor::parse(vars, &c.xy, &c.yz, &c.zx).map_err(input(what))
}

fn brackets(c: &Components, what: &str) -> Result<LieStructure, CliError> {
    LieStructure::parse_unchecked(&c.xy, &c.yz, &c.zx).map_err(input(what))
}

fn rational(s: &str, what: &str) -> Result<Rational, CliError> {
    parse_rational(s.trim()).map_err(input(what))
}

/// `"1,-1/2,0"` as a point of the given dimension.
pub fn parse_point(text: &str, dim: usize) -> Result<Vec<Rational>, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != dim {
        return Err(CliError::Input(format!("point `{text}` has {} coordinates, expected {dim}", parts.len())));
    }
    parts.iter().map(|p| rational(p, "point")).collect()
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Problem, CliError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(input("problem file"))?;
        Self::build(file)
    }

    fn build(f: ProblemFile) -> Result<Problem, CliError> {
        let kind = f.kind;
        let default_vars = if kind == Kind::Web { uv() } else { Vars::xyz() };
        let vars = match &f.variables {
            Some(names) => Vars::new(names).map_err(input("variables"))?,
            None => default_vars,
        };
        let dim = if kind == Kind::Web { 2 } else { 3 };
        if vars.len() != dim {
            return Err(CliError::Input(format!("{} file needs {dim} variables, got {}", kind.name(), vars.len())));
        }
        if matches!(kind, Kind::LinearPencil | Kind::LiePencil) && vars != Vars::xyz() {
            return Err(CliError::Input("algebra-based files use the variables x, y, z".into()));
        }
        let mut problem = Problem {
            kind,
            vars: vars.clone(),
            p: None,
            q: None,
            source: Source::Tensors,
            web: None,
            hexagon: f.hexagon.clone(),
            casimirs: None,
            frame: None,
            points: Vec::new(),
            options: f.options.clone(),
        };
        match kind {
            Kind::Pencil | Kind::Reduction | Kind::Connection => {
                problem.p = Some(tensor(&vars, f.p.as_ref().ok_or_else(|| missing(kind, "P"))?, "P")?);
                problem.q = Some(tensor(&vars, f.q.as_ref().ok_or_else(|| missing(kind, "Q"))?, "Q")?);
            }
            Kind::LinearPencil => {
                let algebra = brackets(f.algebra.as_ref().ok_or_else(|| missing(kind, "algebra"))?, "algebra")?;
                let cocycle = match (&f.cocycle, &f.xi) {
                    (Some(c), None) => Cocycle::new(rational(&c.xy, "cocycle")?, rational(&c.yz, "cocycle")?, rational(&c.zx, "cocycle")?),
                    (None, Some(xi)) => {
                        let xi = [rational(&xi[0], "xi")?, rational(&xi[1], "xi")?, rational(&xi[2], "xi")?];
                        frozen_argument(&algebra, &xi)
                    }
                    _ => return Err(CliError::Input("linear_pencil file needs exactly one of `cocycle`, `xi`".into())),
                };
                let pen = linear_pencil(&algebra, &cocycle);
                problem.p = Some(pen.p().clone());
                problem.q = Some(pen.q().clone());
                problem.source = Source::Linear { algebra, cocycle };
            }
            Kind::LiePencil => {
                let p = brackets(f.p.as_ref().ok_or_else(|| missing(kind, "P"))?, "P")?;
                let q = brackets(f.q.as_ref().ok_or_else(|| missing(kind, "Q"))?, "Q")?;
                problem.p = Some(p.lie_poisson());
                problem.q = Some(q.lie_poisson());
                problem.source = Source::Lie { p, q };
            }
            Kind::Web => {
                let fs = f.functions.as_ref().ok_or_else(|| missing(kind, "functions"))?;
                let e = |s: &String| parse(s, &vars).map_err(input("functions"));
                problem.web = Some(Web3::new(e(&fs[0])?, e(&fs[1])?, e(&fs[2])?).map_err(input("functions"))?);
            }
        }
        if kind == Kind::Reduction {
            let c = f.casimirs.as_ref().ok_or_else(|| missing(kind, "casimirs"))?;
            let e = |s: &String| parse(s, &vars).map_err(input("casimirs"));
            problem.casimirs = Some(CasimirTriple { f: e(&c.f)?, g: e(&c.g)?, h: e(&c.h)? });
        }
        if kind == Kind::Connection {
            let fr = f.frame.as_ref().ok_or_else(|| missing(kind, "frame"))?;
            fn s(a: &[String; 3]) -> [&str; 3] {
                [a[0].as_str(), a[1].as_str(), a[2].as_str()]
            }
            problem.frame = Some(Frame::parse(&vars, s(&fr.x), s(&fr.y), s(&fr.z)).map_err(input("frame"))?);
        }
        for pt in &f.points {
            problem.points.push(parse_point(&pt.join(","), dim)?);
        }
        Ok(problem)
    }

    /// Both tensors, for kinds that define a pencil.
    pub fn tensors(&self) -> Result<(&PoissonTensor, &PoissonTensor), CliError> {
        match (&self.p, &self.q) {
            (Some(p), Some(q)) => Ok((p, q)),
            _ => Err(CliError::Input(format!("{} file does not define a pencil", self.kind.name()))),
        }
    }

    /// The certified pencil; an invalid pair is a mathematical failure.
    pub fn pencil(&self) -> Result<Pencil, CliError> {
        let algebras = match &self.source {
            Source::Tensors => vec![],
            Source::Linear { algebra, .. } => vec![algebra],
            Source::Lie { p, q } => vec![p, q],
        };
        for g in algebras {
            let [xy, yz, zx] = [(0, 1), (1, 2), (2, 0)].map(|(i, j)| g.bracket(i, j).clone());
            LieStructure::from_brackets(xy, yz, zx).map_err(|e| CliError::Math(e.to_string()))?;
        }
        let (p, q) = self.tensors()?;
        Pencil::new(p.clone(), q.clone()).map_err(|e| CliError::Math(e.to_string()))
    }
}
