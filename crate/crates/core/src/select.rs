//! Candidate selection: the shortest-access-path filter and three greedy
//! crossfire strategies.
//!
//! * assertion-greedy repeatedly takes the candidate killing the most
//!   still-alive mutants;
//! * variable-greedy takes the (test, variable) group whose candidates kill
//!   the most, then greedily picks assertions inside it until the group has
//!   nothing new to offer;
//! * test-greedy does the same with whole tests as groups.
//!
//! Every run ends with all killable mutants covered. Ties are broken
//! uniformly at random from an explicit seed, or lexicographically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matrix::{build_matrix, AssertionCandidate, CandidateMatrix};
use crate::ratio::{crossfire_factor, Fraction};
use crate::snapshot::RootVariable;

pub const DEFAULT_REPEATS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    AssertionGreedy,
    VariableGreedy,
    TestGreedy,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::AssertionGreedy,
        Strategy::VariableGreedy,
        Strategy::TestGreedy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::AssertionGreedy => "assertion-greedy",
            Strategy::VariableGreedy => "variable-greedy",
            Strategy::TestGreedy => "test-greedy",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    Random,
    Lexicographic,
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(TieBreak::Random),
            "lexicographic" => Ok(TieBreak::Lexicographic),
            _ => Err(format!("unknown tie-break mode {s:?}")),
        }
    }
}

/// Keeps, for each killable mutant, only the candidates reaching it at the
/// shortest access depth among all candidates that kill it. A candidate's
/// kill set shrinks to the mutants for which it is shortest; candidates
/// left with no kills are dropped. The killable set never changes.
pub fn shortest_depth_filter(matrix: &CandidateMatrix) -> CandidateMatrix {
    let mut min_depth: BTreeMap<&str, u32> = BTreeMap::new();
    for c in &matrix.candidates {
        for m in &c.kills {
            let d = min_depth.entry(m).or_insert(c.depth);
            *d = (*d).min(c.depth);
        }
    }
    let kept = matrix
        .candidates
        .iter()
        .filter_map(|c| {
            let kills: BTreeSet<String> = c
                .kills
                .iter()
                .filter(|m| min_depth[m.as_str()] == c.depth)
                .cloned()
                .collect();
            (!kills.is_empty()).then(|| AssertionCandidate {
                observed: c
                    .observed
                    .iter()
                    .filter(|(m, _)| kills.contains(*m))
                    .map(|(m, o)| (m.clone(), o.clone()))
                    .collect(),
                kills,
                ..c.clone()
            })
        })
        .collect();
    build_matrix(kept)
}

/// One greedy step: the candidate taken and the mutants it newly covered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub candidate_id: String,
    pub test_id: String,
    pub variable: RootVariable,
    pub node_id: String,
    pub depth: u32,
    pub new_kills: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub strategy: Strategy,
    pub seed: u64,
    pub tie_break: TieBreak,
    pub chosen: Vec<SelectionStep>,
    pub covered: BTreeSet<String>,
    pub n_assertions: u64,
    pub n_variables: u64,
    pub n_tests: u64,
    /// |covered| divided by the strategy's primary count; zero when empty.
    pub crossfire_factor: Fraction,
}

impl Selection {
    pub fn primary_count(&self) -> u64 {
        match self.strategy {
            Strategy::AssertionGreedy => self.n_assertions,
            Strategy::VariableGreedy => self.n_variables,
            Strategy::TestGreedy => self.n_tests,
        }
    }
}

/// Dense view of a matrix for the greedy loops.
struct Instance<'a> {
    matrix: &'a CandidateMatrix,
    kills: Vec<Vec<usize>>,
    n_mutants: usize,
    mutant_names: Vec<&'a str>,
}

impl<'a> Instance<'a> {
    fn new(matrix: &'a CandidateMatrix) -> Self {
        let mutant_names: Vec<&str> = matrix.killable_mutants.iter().map(String::as_str).collect();
        let index: BTreeMap<&str, usize> =
            mutant_names.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let kills = matrix
            .candidates
            .iter()
            .map(|c| c.kills.iter().map(|m| index[m.as_str()]).collect())
            .collect();
        Instance {
            matrix,
            kills,
            n_mutants: mutant_names.len(),
            mutant_names,
        }
    }

    fn groups(&self, strategy: Strategy) -> Vec<Vec<usize>> {
        let position: BTreeMap<&str, usize> = self
            .matrix
            .candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (c.candidate_id.as_str(), i))
            .collect();
        let resolve = |ids: &[String]| ids.iter().map(|id| position[id.as_str()]).collect();
        match strategy {
            Strategy::AssertionGreedy => (0..self.kills.len()).map(|i| vec![i]).collect(),
            Strategy::VariableGreedy => self
                .matrix
                .by_variable
                .iter()
                .map(|g| resolve(&g.candidates))
                .collect(),
            Strategy::TestGreedy => self
                .matrix
                .by_test
                .iter()
                .map(|g| resolve(&g.candidates))
                .collect(),
        }
    }
}

struct Picker {
    rng: ChaCha8Rng,
    tie_break: TieBreak,
}

impl Picker {
    /// Index of the maximal score; ties broken per mode. `None` if every score is 0.
    fn best(&mut self, scores: impl Iterator<Item = usize>) -> Option<usize> {
        let mut best = 0;
        let mut ties = Vec::new();
        for (i, s) in scores.enumerate() {
            if s > best {
                best = s;
                ties.clear();
                ties.push(i);
            } else if s == best && s > 0 {
                ties.push(i);
            }
        }
        match ties.len() {
            0 => None,
            1 => Some(ties[0]),
            n => Some(match self.tie_break {
                TieBreak::Lexicographic => ties[0],
                TieBreak::Random => ties[self.rng.gen_range(0..n)],
            }),
        }
    }
}

pub fn select(matrix: &CandidateMatrix, strategy: Strategy, seed: u64, tie_break: TieBreak) -> Selection {
    let inst = Instance::new(matrix);
    let mut picker = Picker {
        rng: ChaCha8Rng::seed_from_u64(seed),
        tie_break,
    };
    let mut covered = vec![false; inst.n_mutants];
    let mut n_covered = 0;
    let mut chosen: Vec<(usize, Vec<usize>)> = Vec::new();
    let gain = |c: usize, covered: &[bool]| inst.kills[c].iter().filter(|&&m| !covered[m]).count();

    let mut take = |c: usize, covered: &mut Vec<bool>, n_covered: &mut usize| {
        let new: Vec<usize> = inst.kills[c].iter().copied().filter(|&m| !covered[m]).collect();
        for &m in &new {
            covered[m] = true;
        }
        *n_covered += new.len();
        chosen.push((c, new));
    };

    match strategy {
        Strategy::AssertionGreedy => {
            while n_covered < inst.n_mutants {
                let scores: Vec<usize> = (0..inst.kills.len()).map(|c| gain(c, &covered)).collect();
                let Some(c) = picker.best(scores.into_iter()) else { break };
                take(c, &mut covered, &mut n_covered);
            }
        }
        Strategy::VariableGreedy | Strategy::TestGreedy => {
            let groups = inst.groups(strategy);
            while n_covered < inst.n_mutants {
                let scores: Vec<usize> = groups
                    .iter()
                    .map(|g| {
                        let reach: BTreeSet<usize> = g
                            .iter()
                            .flat_map(|&c| inst.kills[c].iter().copied())
                            .filter(|&m| !covered[m])
                            .collect();
                        reach.len()
                    })
                    .collect();
                let Some(g) = picker.best(scores.into_iter()) else { break };
                let group = &groups[g];
                loop {
                    let scores: Vec<usize> = group.iter().map(|&c| gain(c, &covered)).collect();
                    let Some(k) = picker.best(scores.into_iter()) else { break };
                    take(group[k], &mut covered, &mut n_covered);
                }
            }
        }
    }

    let candidates = &matrix.candidates;
    let steps: Vec<SelectionStep> = chosen
        .iter()
        .map(|(c, new)| {
            let cand = &candidates[*c];
            SelectionStep {
                candidate_id: cand.candidate_id.clone(),
                test_id: cand.test_id.clone(),
                variable: cand.variable.clone(),
                node_id: cand.node_id.clone(),
                depth: cand.depth,
                new_kills: new.iter().map(|&m| inst.mutant_names[m].to_string()).collect(),
            }
        })
        .collect();
    let covered: BTreeSet<String> = steps
        .iter()
        .flat_map(|s| s.new_kills.iter().cloned())
        .collect();
    let n_variables = chosen
        .iter()
        .map(|(c, _)| candidates[*c].variable_key())
        .collect::<BTreeSet<_>>()
        .len() as u64;
    let n_tests = chosen
        .iter()
        .map(|(c, _)| candidates[*c].test_id.as_str())
        .collect::<BTreeSet<_>>()
        .len() as u64;
    let mut selection = Selection {
        strategy,
        seed,
        tie_break,
        covered,
        n_assertions: steps.len() as u64,
        n_variables,
        n_tests,
        chosen: steps,
        crossfire_factor: Fraction::zero(),
    };
    selection.crossfire_factor = crossfire_factor(
        selection.covered.len() as u64,
        &Fraction::from_integer(selection.primary_count()),
    )
    .unwrap_or_else(Fraction::zero);
    selection
}

pub fn select_assertion_greedy(matrix: &CandidateMatrix, seed: u64) -> Selection {
    select(matrix, Strategy::AssertionGreedy, seed, TieBreak::Random)
}

pub fn select_variable_greedy(matrix: &CandidateMatrix, seed: u64) -> Selection {
    select(matrix, Strategy::VariableGreedy, seed, TieBreak::Random)
}

pub fn select_test_greedy(matrix: &CandidateMatrix, seed: u64) -> Selection {
    select(matrix, Strategy::TestGreedy, seed, TieBreak::Random)
}

/// Means over `repeats` seeded runs of one strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatedSelection {
    pub strategy: Strategy,
    pub repeats: usize,
    pub seeds: Vec<u64>,
    pub killable: u64,
    pub mean_assertions: Fraction,
    pub mean_variables: Fraction,
    pub mean_tests: Fraction,
    /// Mean of the per-run crossfire factors.
    pub mean_factor: Fraction,
    /// Killable count over the mean primary count, the factor shown in
    /// strategy tables. Zero when nothing is killable.
    pub factor_of_means: Fraction,
    /// Mean access depth of the chosen assertions, averaged over runs.
    pub mean_depth: Fraction,
    pub runs: Vec<Selection>,
}

impl AggregatedSelection {
    pub fn mean_primary(&self) -> &Fraction {
        match self.strategy {
            Strategy::AssertionGreedy => &self.mean_assertions,
            Strategy::VariableGreedy => &self.mean_variables,
            Strategy::TestGreedy => &self.mean_tests,
        }
    }
}

/// Runs seeds `base_seed..base_seed + repeats` concurrently. Panics if
/// `repeats` is zero.
pub fn run_repeated(
    matrix: &CandidateMatrix,
    strategy: Strategy,
    repeats: usize,
    base_seed: u64,
    tie_break: TieBreak,
) -> AggregatedSelection {
    assert!(repeats >= 1, "at least one run is required");
    let seeds: Vec<u64> = (0..repeats as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let runs: Vec<Selection> = seeds
        .par_iter()
        .map(|&s| select(matrix, strategy, s, tie_break))
        .collect();
    let mean_of = |f: &dyn Fn(&Selection) -> u64| {
        Fraction::new(runs.iter().map(f).sum(), runs.len() as u64)
    };
    let depths: Vec<Fraction> = runs
        .iter()
        .map(|r| {
            if r.chosen.is_empty() {
                Fraction::zero()
            } else {
                Fraction::new(r.chosen.iter().map(|c| c.depth as u64).sum(), r.chosen.len() as u64)
            }
        })
        .collect();
    let killable = matrix.killable_mutants.len() as u64;
    let mut agg = AggregatedSelection {
        strategy,
        repeats,
        killable,
        mean_assertions: mean_of(&|s| s.n_assertions),
        mean_variables: mean_of(&|s| s.n_variables),
        mean_tests: mean_of(&|s| s.n_tests),
        mean_factor: Fraction::mean(runs.iter().map(|s| &s.crossfire_factor))
            .expect("non-empty runs"),
        factor_of_means: Fraction::zero(),
        mean_depth: Fraction::mean(&depths).expect("non-empty runs"),
        seeds,
        runs,
    };
    agg.factor_of_means = crossfire_factor(killable, agg.mean_primary()).unwrap_or_else(Fraction::zero);
    agg
}

/// H(k) = 1 + 1/2 + ... + 1/k, the greedy set-cover approximation bound.
pub fn harmonic(k: u64) -> Fraction {
    let terms: Vec<Fraction> = (1..=k).map(|i| Fraction::new(1, i)).collect();
    terms.iter().sum()
}
