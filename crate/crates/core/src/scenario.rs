//! JSON scenario files: a function, a set of inputs, tolerances and a scheme.
//!
//! ```json
//! {
//!   "name": "conic",
//!   "modulus": 97,
//!   "function": {"m": 2, "components": [[{"coeff": 1, "exps": [1, 1]}]]},
//!   "inputs": {"points": [[0, 1], [2, 0], [2, 1]]},
//!   "s": 1,
//!   "scheme": "homogeneous"
//! }
//! ```
//!
//! `function` may instead be `{"random": {"m", "u", "degree", "homogeneous", "seed"}}`
//! and `inputs` may be `{"generate": {"kind", "k", "seed", "m"}}` with kind one of
//! `generic`, `dependent`, `collinear`, `crossing`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElem, PrimeField};
use crate::linalg;
use crate::poly::MultiPoly;
use crate::schemes::{
    plan_composite, plan_curve_direct, plan_homogeneous, plan_intersecting, plan_lcc, plan_nonhomogeneous,
    plan_replication, QueryPlan,
};
use crate::simulator::{Adversary, AdversaryMode};
use crate::structure::{find_intersecting_lines, find_minimal_dependency, fit_line, lift, LineStructure, Mode};
use crate::Point;

pub const DEFAULT_MODULUS: u64 = 65537;
const MAX_ATTEMPTS: usize = 1000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeChoice {
    /// Same as `composite`.
    #[default]
    Auto,
    Replication,
    Lcc,
    CurveDirect,
    Homogeneous,
    Nonhomogeneous,
    Intersecting,
    Composite,
}

impl fmt::Display for SchemeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        write!(f, "{}", s.as_str().expect("string tag"))
    }
}

impl FromStr for SchemeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::usage(format!("unknown scheme '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub coeff: i64,
    pub exps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFunction {
    pub m: usize,
    #[serde(default = "one")]
    pub u: usize,
    pub degree: u32,
    #[serde(default)]
    pub homogeneous: bool,
    pub seed: Option<u64>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Random {
        random: RandomFunction,
    },
    Literal {
        m: Option<usize>,
        /// Accepted so that a report's embedded function can be fed back in.
        modulus: Option<u64>,
        components: Vec<Vec<TermSpec>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenerateKind {
    /// Independent uniform draws, distinct and nonzero.
    Generic,
    /// Consecutive blocks that are each a minimal dependent set.
    Dependent,
    /// All points on one random line.
    Collinear,
    /// Two points on each of two random lines that cross away from the inputs.
    Crossing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub kind: GenerateKind,
    pub k: usize,
    pub seed: Option<u64>,
    pub m: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSpec {
    Points(Vec<Vec<u64>>),
    Generate(GenerateSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_modulus")]
    pub modulus: u64,
    pub function: FunctionSpec,
    pub inputs: InputSpec,
    #[serde(default)]
    pub s: usize,
    #[serde(default)]
    pub b: usize,
    #[serde(default)]
    pub scheme: SchemeChoice,
    #[serde(default)]
    pub adversary: AdversaryMode,
    #[serde(default)]
    pub seed: u64,
}

fn default_name() -> String {
    "scenario".to_string()
}

fn default_modulus() -> u64 {
    DEFAULT_MODULUS
}

/// A resolved scenario, ready to run.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub function: MultiPoly,
    pub inputs: Vec<Point>,
    pub plan: QueryPlan,
    pub adversary: Adversary,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScenarioSet {
    List(Vec<Scenario>),
    Wrapped { scenarios: Vec<Scenario> },
    Single(Box<Scenario>),
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::usage(format!("invalid scenario: {e}"))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read(path)?)
    }

    /// A list of scenarios, given as an array, `{"scenarios": [...]}`, or a
    /// single scenario object.
    pub fn many_from_json(text: &str) -> Result<Vec<Self>> {
        match serde_json::from_str(text).map_err(parse_error)? {
            ScenarioSet::List(v) | ScenarioSet::Wrapped { scenarios: v } => Ok(v),
            ScenarioSet::Single(s) => Ok(vec![*s]),
        }
    }

    pub fn load_many(path: &Path) -> Result<Vec<Self>> {
        Self::many_from_json(&read(path)?)
    }

    pub fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.modulus)
    }

    pub fn function(&self) -> Result<MultiPoly> {
        let field = self.field()?;
        match &self.function {
            FunctionSpec::Random { random } => {
                if random.m == 0 {
                    return Err(Error::usage("function arity must be positive"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(random.seed.unwrap_or(self.seed));
                Ok(MultiPoly::random(
                    field,
                    random.m,
                    random.u,
                    random.degree,
                    random.homogeneous,
                    &mut rng,
                ))
            }
            FunctionSpec::Literal { m, modulus, components } => {
                if modulus.is_some_and(|q| q != self.modulus) {
                    return Err(Error::usage("function modulus differs from the scenario modulus"));
                }
                let m = match m {
                    Some(m) => *m,
                    None => components
                        .iter()
                        .flatten()
                        .map(|t| t.exps.len())
                        .next()
                        .ok_or_else(|| Error::usage("function has no terms; give \"m\" explicitly"))?,
                };
                let comps = components
                    .iter()
                    .map(|c| c.iter().map(|t| (field.from_i64(t.coeff), t.exps.clone())).collect())
                    .collect();
                MultiPoly::new(field, m, comps)
            }
        }
    }

    pub fn inputs(&self, f: &MultiPoly) -> Result<Vec<Point>> {
        let field = f.field();
        match &self.inputs {
            InputSpec::Points(rows) => rows
                .iter()
                .map(|row| {
                    if row.len() != f.m() {
                        return Err(Error::usage(format!(
                            "input point has {} coordinates, the function takes {}",
                            row.len(),
                            f.m()
                        )));
                    }
                    row.iter()
                        .map(|&v| {
                            if v < field.modulus() {
                                Ok(field.elem(v))
                            } else {
                                Err(Error::usage(format!("input value {v} is not reduced modulo {field}")))
                            }
                        })
                        .collect()
                })
                .collect(),
            InputSpec::Generate(g) => {
                if g.m.is_some_and(|m| m != f.m()) {
                    return Err(Error::usage("generated input arity differs from the function's"));
                }
                let mode = if f.is_homogeneous() {
                    Mode::Homogeneous
                } else {
                    Mode::Affine
                };
                let mut rng = ChaCha8Rng::seed_from_u64(g.seed.unwrap_or(self.seed));
                generate(field, f.m(), g.kind, g.k, mode, &mut rng)
            }
        }
    }

    /// Resolves the function and inputs and plans the chosen scheme.
    pub fn build(&self) -> Result<Instance> {
        let f = self.function()?;
        let x = self.inputs(&f)?;
        let plan = plan_scheme(self.scheme, &f, &x, self.s, self.b)?;
        let adversary = Adversary::for_plan(&plan, self.adversary, self.seed);
        Ok(Instance {
            name: self.name.clone(),
            function: f,
            inputs: x,
            plan,
            adversary,
        })
    }
}

/// Plans `scheme`; the single-structure schemes require the inputs to form
/// exactly that structure.
pub fn plan_scheme(scheme: SchemeChoice, f: &MultiPoly, x: &[Point], s: usize, b: usize) -> Result<QueryPlan> {
    let whole_dependency = |mode: Mode| -> Result<_> {
        match find_minimal_dependency(x, mode)? {
            Some(dep) if dep.len() == x.len() => Ok(dep),
            _ => Err(Error::usage(format!(
                "inputs are not a single minimal {} dependent set; use the composite scheme",
                if mode == Mode::Homogeneous {
                    "linearly"
                } else {
                    "affinely"
                }
            ))),
        }
    };
    match scheme {
        SchemeChoice::Auto | SchemeChoice::Composite => plan_composite(f, x, s, b),
        SchemeChoice::Replication => plan_replication(f, x, s, b),
        SchemeChoice::Lcc => plan_lcc(f, x, s, b),
        SchemeChoice::CurveDirect => match fit_line(x)? {
            Some(fit) => plan_curve_direct(f, x, &fit, s, b),
            None => Err(Error::usage("the direct curve scheme needs distinct collinear inputs")),
        },
        SchemeChoice::Homogeneous => plan_homogeneous(f, x, &whole_dependency(Mode::Homogeneous)?, s, b),
        SchemeChoice::Nonhomogeneous => plan_nonhomogeneous(f, x, &whole_dependency(Mode::Affine)?, s, b),
        SchemeChoice::Intersecting => match find_intersecting_lines(x)? {
            Some(lines @ LineStructure::Crossing { .. }) => plan_intersecting(f, x, &lines, s, b),
            _ => Err(Error::usage("inputs do not lie on two crossing lines")),
        },
    }
}

fn random_point(field: PrimeField, m: usize, rng: &mut ChaCha8Rng) -> Point {
    (0..m).map(|_| field.random(rng)).collect()
}

fn attempts_exhausted(kind: &str) -> Error {
    Error::usage(format!(
        "could not generate {kind} inputs; the field is probably too small"
    ))
}

/// Random inputs with the requested structure.
pub fn generate(
    field: PrimeField,
    m: usize,
    kind: GenerateKind,
    k: usize,
    mode: Mode,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point>> {
    if m == 0 {
        return Err(Error::usage("inputs need at least one coordinate"));
    }
    let fresh = |pts: &[Point], p: &Point| p.iter().any(|v| !v.is_zero()) && !pts.contains(p);
    match kind {
        GenerateKind::Generic => {
            let mut pts = Vec::with_capacity(k);
            for _ in 0..k * MAX_ATTEMPTS {
                if pts.len() == k {
                    break;
                }
                let p = random_point(field, m, rng);
                if fresh(&pts, &p) {
                    pts.push(p);
                }
            }
            if pts.len() < k {
                return Err(attempts_exhausted("generic"));
            }
            Ok(pts)
        }
        GenerateKind::Dependent => {
            let block = if mode == Mode::Homogeneous { m + 1 } else { m + 2 };
            let mut pts: Vec<Point> = Vec::with_capacity(k);
            while pts.len() < k {
                let size = block.min(k - pts.len());
                let chunk = dependent_block(field, m, size, mode, &pts, rng)?;
                pts.extend(chunk);
            }
            Ok(pts)
        }
        GenerateKind::Collinear => {
            field.require_size(k as u64)?;
            let base = random_point(field, m, rng);
            let dir = loop {
                let v = random_point(field, m, rng);
                if v.iter().any(|e| !e.is_zero()) {
                    break v;
                }
            };
            let mut params: Vec<FieldElem> = Vec::with_capacity(k);
            while params.len() < k {
                let t = field.random(rng);
                if !params.contains(&t) {
                    params.push(t);
                }
            }
            Ok(params
                .iter()
                .map(|t| base.iter().zip(&dir).map(|(a, v)| *a + *t * *v).collect())
                .collect())
        }
        GenerateKind::Crossing => {
            if k != 4 || m < 2 {
                return Err(Error::usage("crossing inputs need k = 4 and at least two coordinates"));
            }
            field.require_size(3)?;
            for _ in 0..MAX_ATTEMPTS {
                let meet = random_point(field, m, rng);
                let (u, v) = (random_point(field, m, rng), random_point(field, m, rng));
                if linalg::rank(&[u.clone(), v.clone()]) < 2 {
                    continue;
                }
                let t: Vec<FieldElem> = (0..4).map(|_| field.random_nonzero(rng)).collect();
                if t[0] == t[1] || t[2] == t[3] {
                    continue;
                }
                let at =
                    |dir: &Point, s: FieldElem| -> Point { meet.iter().zip(dir).map(|(p, d)| *p + s * *d).collect() };
                return Ok(vec![at(&u, t[0]), at(&u, t[1]), at(&v, t[2]), at(&v, t[3])]);
            }
            Err(attempts_exhausted("crossing"))
        }
    }
}

/// `size` points whose lifts form a minimal dependency: `size - 1` independent
/// points and a combination of all of them with nonzero coefficients.
fn dependent_block(
    field: PrimeField,
    m: usize,
    size: usize,
    mode: Mode,
    existing: &[Point],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point>> {
    let ok = |pts: &[Point], p: &Point| {
        (mode == Mode::Affine || p.iter().any(|v| !v.is_zero())) && !existing.contains(p) && !pts.contains(p)
    };
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let mut pts: Vec<Point> = Vec::with_capacity(size);
        for _ in 0..size.saturating_sub(1).max(1) {
            let p = random_point(field, m, rng);
            if !ok(&pts, &p) {
                continue 'attempt;
            }
            pts.push(p);
        }
        if size == 1 {
            return Ok(pts);
        }
        let lifted: Vec<Point> = pts.iter().map(|p| lift(p, mode)).collect();
        if linalg::rank(&lifted) < pts.len() {
            continue;
        }
        let mut alpha: Vec<FieldElem> = (0..pts.len()).map(|_| field.random_nonzero(rng)).collect();
        if mode == Mode::Affine {
            let rest = alpha[..alpha.len() - 1].iter().fold(field.zero(), |a, c| a + *c);
            let last = field.one() - rest;
            if last.is_zero() {
                continue;
            }
            *alpha.last_mut().expect("nonempty") = last;
        }
        let target: Point = (0..m)
            .map(|j| pts.iter().zip(&alpha).fold(field.zero(), |acc, (p, a)| acc + *a * p[j]))
            .collect();
        if !ok(&pts, &target) {
            continue;
        }
        pts.push(target);
        return Ok(pts);
    }
    Err(attempts_exhausted("dependent"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::SchemeTag;
    use crate::structure::partition_minimal_dependent;

    const CONIC: &str = r#"{
        "name": "conic",
        "modulus": 97,
        "function": {"components": [[{"coeff": 1, "exps": [1, 1]}]]},
        "inputs": {"points": [[0, 1], [2, 0], [2, 1]]},
        "s": 1,
        "scheme": "homogeneous"
    }"#;

    #[test]
    fn parses_literal_scenario() {
        let sc = Scenario::from_json(CONIC).unwrap();
        let inst = sc.build().unwrap();
        assert_eq!(inst.plan.scheme, SchemeTag::Homogeneous);
        assert_eq!(inst.plan.workers, 4);
        assert_eq!(inst.function.m(), 2);
    }

    #[test]
    fn defaults() {
        let sc = Scenario::from_json(
            r#"{"function": {"random": {"m": 2, "degree": 2}}, "inputs": {"generate": {"kind": "generic", "k": 3}}}"#,
        )
        .unwrap();
        assert_eq!(sc.modulus, DEFAULT_MODULUS);
        assert_eq!(sc.scheme, SchemeChoice::Auto);
        assert_eq!(sc.adversary, AdversaryMode::Exhaustive);
        assert_eq!((sc.s, sc.b, sc.seed), (0, 0, 0));
        assert_eq!(sc.build().unwrap().inputs.len(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Scenario::from_json("{"), Err(Error::Usage(_))));
        let bad_field = CONIC.replace("\"modulus\": 97", "\"modulus\": 4");
        assert!(matches!(
            Scenario::from_json(&bad_field).unwrap().build(),
            Err(Error::NotPrime(4))
        ));
        let unreduced = CONIC.replace("[2, 1]]", "[2, 97]]");
        assert!(matches!(
            Scenario::from_json(&unreduced).unwrap().build(),
            Err(Error::Usage(_))
        ));
        let unknown = CONIC.replace("\"s\": 1", "\"stragglers\": 1");
        assert!(Scenario::from_json(&unknown).is_err());
        let wrong_scheme = CONIC.replace("homogeneous\"", "nonhomogeneous\"");
        assert!(matches!(
            Scenario::from_json(&wrong_scheme).unwrap().build(),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn scheme_names_round_trip() {
        for name in [
            "auto",
            "replication",
            "lcc",
            "curve_direct",
            "homogeneous",
            "nonhomogeneous",
            "intersecting",
            "composite",
        ] {
            assert_eq!(name.parse::<SchemeChoice>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<SchemeChoice>().is_err());
    }

    #[test]
    fn many_accepts_three_shapes() {
        assert_eq!(
            Scenario::many_from_json(&format!("[{CONIC},{CONIC}]")).unwrap().len(),
            2
        );
        assert_eq!(
            Scenario::many_from_json(&format!("{{\"scenarios\":[{CONIC}]}}"))
                .unwrap()
                .len(),
            1
        );
        assert_eq!(Scenario::many_from_json(CONIC).unwrap().len(), 1);
    }

    #[test]
    fn generators_produce_their_structure() {
        let field = PrimeField::new(97).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let line = generate(field, 3, GenerateKind::Collinear, 5, Mode::Affine, &mut rng).unwrap();
            assert_eq!(fit_line(&line).unwrap().unwrap().indices.len(), 5);

            let cross = generate(field, 2, GenerateKind::Crossing, 4, Mode::Affine, &mut rng).unwrap();
            assert!(matches!(
                find_intersecting_lines(&cross).unwrap(),
                Some(LineStructure::Crossing { .. })
            ));

            for mode in [Mode::Homogeneous, Mode::Affine] {
                let pts = generate(field, 2, GenerateKind::Dependent, 7, mode, &mut rng).unwrap();
                let block = if mode == Mode::Homogeneous { 3 } else { 4 };
                for chunk in pts.chunks(block).filter(|c| c.len() > 1) {
                    let dep = find_minimal_dependency(chunk, mode).unwrap().unwrap();
                    assert_eq!(dep.len(), chunk.len());
                }
                assert!(partition_minimal_dependent(&pts, mode).is_ok());
            }

            let gen = generate(field, 2, GenerateKind::Generic, 6, Mode::Homogeneous, &mut rng).unwrap();
            assert!(gen.iter().all(|p| p.iter().any(|v| !v.is_zero())));
        }
    }

    #[test]
    fn generation_is_seeded() {
        let sc = Scenario::from_json(
            r#"{"modulus": 101, "function": {"random": {"m": 3, "degree": 2}}, "inputs": {"generate": {"kind": "dependent", "k": 5}}, "seed": 12}"#,
        )
        .unwrap();
        let a = sc.build().unwrap();
        let b = sc.build().unwrap();
        assert_eq!(a.inputs, b.inputs);
        assert_eq!(a.function, b.function);
    }

    #[test]
    fn embedded_function_feeds_back() {
        let sc = Scenario::from_json(
            r#"{"modulus": 101, "function": {"random": {"m": 2, "u": 2, "degree": 3}}, "inputs": {"points": [[1, 2]]}, "seed": 4}"#,
        )
        .unwrap();
        let f = sc.function().unwrap();
        let json = serde_json::to_string(&f).unwrap();
        let spec: FunctionSpec = serde_json::from_str(&json).unwrap();
        let again = Scenario { function: spec, ..sc };
        assert_eq!(again.function().unwrap(), f);
    }
}
