//! In-process master/worker simulation with adversarial stragglers and
//! byzantine workers.
//!
//! Every worker answers `f(query)`. An adversary pattern drops some responses
//! and adds a nonzero offset to some of the survivors; the master decodes what
//! is left and the result is compared with direct evaluation.

use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::PrimeField;
use crate::poly::MultiPoly;
use crate::scenario::Scenario;
use crate::schemes::{decode, QueryPlan, SchemeTag};
use crate::Point;

/// Exhaustive enumeration is used while the pattern count stays at or below this.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000;
/// Patterns drawn when enumeration is too large or randomness is requested.
pub const SAMPLED_PATTERNS: usize = 1_000;
/// Offsets tried per corruption position set.
pub const OFFSETS_PER_CORRUPTION: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdversaryMode {
    #[default]
    Exhaustive,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Adversary {
    pub mode: AdversaryMode,
    /// Maximum number of dropped responses.
    pub s: usize,
    /// Maximum number of corrupted responses.
    pub b: usize,
    pub seed: u64,
}

impl Adversary {
    /// An adversary using exactly the plan's tolerances.
    pub fn for_plan(plan: &QueryPlan, mode: AdversaryMode, seed: u64) -> Self {
        Adversary {
            mode,
            s: plan.s,
            b: plan.b,
            seed,
        }
    }
}

/// One failure scenario: which workers say nothing and which lie (and by how much).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pattern {
    pub dropped: Vec<usize>,
    pub corrupted: Vec<usize>,
    /// Additive offset applied to each corrupted response, in order.
    pub offsets: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub pattern: usize,
    pub dropped: Vec<usize>,
    pub corrupted: Vec<usize>,
    /// Error kind, or `wrong-output` when decoding succeeded with a wrong answer.
    pub kind: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub scheme: SchemeTag,
    pub modulus: PrimeField,
    pub k: usize,
    pub d: u32,
    pub s: usize,
    pub b: usize,
    pub w: usize,
    pub baseline_oblivious: usize,
    pub adversary: Adversary,
    pub patterns_tested: usize,
    /// Patterns were drawn at random rather than enumerated.
    pub sampled: bool,
    pub failures: Vec<Failure>,
    pub verified: bool,
    pub seed: u64,
    pub wall_time_ms: u64,
    pub function: MultiPoly,
    pub inputs: Vec<Point>,
    pub plan: QueryPlan,
}

impl RunReport {
    /// JSON form with the wall time zeroed, for reproducibility checks.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_ms = 0;
        serde_json::to_string(&copy).expect("reports serialize")
    }
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Number of patterns exhaustive mode would produce for `w` workers.
pub fn exhaustive_count(w: usize, s: usize, b: usize) -> u128 {
    (0..=s.min(w))
        .map(|i| {
            let alive = w - i;
            let corrupt: u128 = (1..=b.min(alive))
                .map(|j| binomial(alive, j) * OFFSETS_PER_CORRUPTION as u128)
                .sum();
            binomial(w, i) * (1 + corrupt)
        })
        .sum()
}

fn random_offset(field: PrimeField, u: usize, rng: &mut ChaCha8Rng) -> Point {
    loop {
        let v: Point = (0..u).map(|_| field.random(rng)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

/// The adversary's patterns for `w` workers with `u`-dimensional responses,
/// and whether they were sampled.
pub fn patterns(adversary: &Adversary, field: PrimeField, w: usize, u: usize) -> (Vec<Pattern>, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(adversary.seed);
    let exhaustive = adversary.mode == AdversaryMode::Exhaustive
        && exhaustive_count(w, adversary.s, adversary.b) <= EXHAUSTIVE_LIMIT;
    if exhaustive {
        let mut out = Vec::new();
        for dropped in (0..=adversary.s.min(w)).flat_map(|i| (0..w).combinations(i)) {
            let alive: Vec<usize> = (0..w).filter(|i| !dropped.contains(i)).collect();
            out.push(Pattern {
                dropped: dropped.clone(),
                corrupted: Vec::new(),
                offsets: Vec::new(),
            });
            for corrupted in (1..=adversary.b.min(alive.len())).flat_map(|j| alive.iter().copied().combinations(j)) {
                for _ in 0..OFFSETS_PER_CORRUPTION {
                    let offsets = corrupted.iter().map(|_| random_offset(field, u, &mut rng)).collect();
                    out.push(Pattern {
                        dropped: dropped.clone(),
                        corrupted: corrupted.clone(),
                        offsets,
                    });
                }
            }
        }
        return (out, false);
    }
    // Sampled patterns always use the full budgets.
    let out = (0..SAMPLED_PATTERNS)
        .map(|_| {
            let mut order: Vec<usize> = (0..w).collect();
            for i in (1..w).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let ds = adversary.s.min(w);
            let cs = adversary.b.min(w - ds);
            let dropped: Vec<usize> = order[..ds].iter().copied().sorted().collect();
            let corrupted: Vec<usize> = order[ds..ds + cs].iter().copied().sorted().collect();
            let offsets = corrupted.iter().map(|_| random_offset(field, u, &mut rng)).collect();
            Pattern {
                dropped,
                corrupted,
                offsets,
            }
        })
        .collect();
    (out, true)
}

/// Applies a pattern to the full response list.
pub fn apply(pattern: &Pattern, responses: &[Point]) -> Vec<(usize, Point)> {
    responses
        .iter()
        .enumerate()
        .filter(|(i, _)| !pattern.dropped.contains(i))
        .map(|(i, y)| match pattern.corrupted.iter().position(|c| *c == i) {
            Some(p) => (i, y.iter().zip(&pattern.offsets[p]).map(|(a, o)| *a + *o).collect()),
            None => (i, y.clone()),
        })
        .collect()
}

/// Runs every adversary pattern against `plan` and checks each decode.
pub fn run(plan: &QueryPlan, f: &MultiPoly, inputs: &[Point], adversary: &Adversary) -> Result<RunReport> {
    let start = Instant::now();
    let truth: Vec<Point> = inputs.iter().map(|x| f.eval(x)).collect::<Result<_>>()?;
    let responses: Vec<Point> = plan.queries.par_iter().map(|q| f.eval(q)).collect::<Result<_>>()?;
    let (patterns, sampled) = patterns(adversary, plan.field(), plan.workers, f.u());
    let failures: Vec<Failure> = patterns
        .par_iter()
        .enumerate()
        .filter_map(|(idx, pattern)| {
            let (kind, error) = match decode(plan, &apply(pattern, &responses)) {
                Ok(res) if res.outputs == truth => return None,
                Ok(_) => (
                    "wrong-output",
                    "decoded outputs differ from direct evaluation".to_string(),
                ),
                Err(e) => (e.kind(), e.to_string()),
            };
            Some(Failure {
                pattern: idx,
                dropped: pattern.dropped.clone(),
                corrupted: pattern.corrupted.clone(),
                kind: kind.to_string(),
                error,
            })
        })
        .collect();
    Ok(RunReport {
        scheme: plan.scheme,
        modulus: plan.field(),
        k: plan.k,
        d: plan.degree,
        s: plan.s,
        b: plan.b,
        w: plan.workers,
        baseline_oblivious: plan.baseline_oblivious,
        adversary: *adversary,
        patterns_tested: patterns.len(),
        sampled,
        verified: failures.is_empty(),
        failures,
        seed: adversary.seed,
        wall_time_ms: start.elapsed().as_millis() as u64,
        function: f.clone(),
        inputs: inputs.to_vec(),
        plan: plan.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub name: String,
    pub scheme: String,
    pub k: Option<usize>,
    pub d: Option<u32>,
    pub s: usize,
    pub b: usize,
    pub w: Option<usize>,
    pub baseline: Option<usize>,
    pub verified: bool,
    /// Error kind when the scenario could not be planned or run.
    pub error: Option<String>,
    pub message: Option<String>,
}

/// Plans and runs every scenario; errors are recorded per row.
pub fn sweep(scenarios: &[Scenario]) -> Vec<SweepRow> {
    scenarios
        .iter()
        .map(|sc| {
            let outcome = sc.build().and_then(|inst| {
                let report = run(&inst.plan, &inst.function, &inst.inputs, &inst.adversary)?;
                Ok(report)
            });
            match outcome {
                Ok(r) => SweepRow {
                    name: sc.name.clone(),
                    scheme: r.scheme.to_string(),
                    k: Some(r.k),
                    d: Some(r.d),
                    s: r.s,
                    b: r.b,
                    w: Some(r.w),
                    baseline: Some(r.baseline_oblivious),
                    verified: r.verified,
                    error: None,
                    message: None,
                },
                Err(e) => SweepRow {
                    name: sc.name.clone(),
                    scheme: sc.scheme.to_string(),
                    k: None,
                    d: None,
                    s: sc.s,
                    b: sc.b,
                    w: None,
                    baseline: None,
                    verified: false,
                    error: Some(e.kind().to_string()),
                    message: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// `scheme,k,d,s,b,w,baseline,verified` with a header line.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let mut out = String::from("scheme,k,d,s,b,w,baseline,verified\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.scheme,
            opt(r.k.map(|v| v.to_string())),
            opt(r.d.map(|v| v.to_string())),
            r.s,
            r.b,
            opt(r.w.map(|v| v.to_string())),
            opt(r.baseline.map(|v| v.to_string())),
            r.verified
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{plan_homogeneous, plan_lcc, plan_replication};
    use crate::structure::{find_minimal_dependency, Mode};

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn conic() -> (MultiPoly, Vec<Point>, QueryPlan) {
        let f = gf(97);
        let p = MultiPoly::new(f, 2, vec![vec![(f.one(), vec![1, 1])]]).unwrap();
        let x: Vec<Point> = [[0, 1], [2, 0], [2, 1]]
            .iter()
            .map(|r| r.iter().map(|&v| f.elem(v)).collect())
            .collect();
        let dep = find_minimal_dependency(&x, Mode::Homogeneous).unwrap().unwrap();
        let plan = plan_homogeneous(&p, &x, &dep, 1, 0).unwrap();
        (p, x, plan)
    }

    #[test]
    fn trivial_adversary_has_one_pattern() {
        let f = gf(97);
        let p = MultiPoly::new(f, 1, vec![vec![(f.one(), vec![2])]]).unwrap();
        let x = vec![vec![f.elem(3)]];
        let plan = plan_replication(&p, &x, 0, 0).unwrap();
        let report = run(&plan, &p, &x, &Adversary::for_plan(&plan, AdversaryMode::Exhaustive, 0)).unwrap();
        assert_eq!((report.patterns_tested, report.failures.len()), (1, 0));
    }

    #[test]
    fn conic_exhaustive() {
        let (p, x, plan) = conic();
        let report = run(&plan, &p, &x, &Adversary::for_plan(&plan, AdversaryMode::Exhaustive, 1)).unwrap();
        assert_eq!(report.patterns_tested, 5);
        assert!(report.verified && !report.sampled);
    }

    #[test]
    fn byzantine_lcc_exhaustive() {
        let f = gf(97);
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let p = MultiPoly::random(f, 2, 1, 2, false, &mut rng);
        let x: Vec<Point> = (0..4).map(|_| (0..2).map(|_| f.random(&mut rng)).collect()).collect();
        let plan = plan_lcc(&p, &x, 1, 1).unwrap();
        assert_eq!(plan.workers, 10);
        let report = run(&plan, &p, &x, &Adversary::for_plan(&plan, AdversaryMode::Exhaustive, 2)).unwrap();
        assert_eq!(report.patterns_tested, 311);
        assert_eq!(exhaustive_count(10, 1, 1), 311);
        assert!(report.verified);
    }

    #[test]
    fn pattern_count_without_byzantines() {
        for (w, s) in [(4, 1), (7, 2), (10, 3), (5, 0)] {
            let expected: u128 = (0..=s).map(|i| binomial(w, i)).sum();
            assert_eq!(exhaustive_count(w, s, 0), expected);
            let adv = Adversary {
                mode: AdversaryMode::Exhaustive,
                s,
                b: 0,
                seed: 0,
            };
            assert_eq!(patterns(&adv, gf(97), w, 1).0.len() as u128, expected);
        }
    }

    #[test]
    fn large_enumerations_are_sampled() {
        let adv = Adversary {
            mode: AdversaryMode::Exhaustive,
            s: 5,
            b: 3,
            seed: 3,
        };
        assert!(exhaustive_count(40, 5, 3) > EXHAUSTIVE_LIMIT);
        let (pats, sampled) = patterns(&adv, gf(97), 40, 2);
        assert!(sampled);
        assert_eq!(pats.len(), SAMPLED_PATTERNS);
        assert!(pats.iter().all(|p| p.dropped.len() == 5 && p.corrupted.len() == 3));
        assert!(pats.iter().all(|p| p.corrupted.iter().all(|c| !p.dropped.contains(c))));
        assert!(pats
            .iter()
            .flat_map(|p| &p.offsets)
            .all(|o| o.iter().any(|v| !v.is_zero())));
    }

    #[test]
    fn reports_are_deterministic() {
        let (p, x, plan) = conic();
        for mode in [AdversaryMode::Exhaustive, AdversaryMode::Random] {
            let adv = Adversary::for_plan(&plan, mode, 9);
            let a = run(&plan, &p, &x, &adv).unwrap();
            let b = run(&plan, &p, &x, &adv).unwrap();
            assert_eq!(a.canonical_json(), b.canonical_json());
        }
    }

    #[test]
    fn exceeding_the_straggler_budget_fails() {
        let (p, x, plan) = conic();
        let adv = Adversary {
            mode: AdversaryMode::Exhaustive,
            s: plan.s + 1,
            b: 0,
            seed: 4,
        };
        let report = run(&plan, &p, &x, &adv).unwrap();
        assert!(!report.verified);
        assert!(report.failures.iter().any(|f| f.kind == "insufficient-responses"));
    }

    #[test]
    fn empty_sweep() {
        assert!(sweep(&[]).is_empty());
        assert_eq!(sweep_csv(&[]), "scheme,k,d,s,b,w,baseline,verified\n");
    }
}
