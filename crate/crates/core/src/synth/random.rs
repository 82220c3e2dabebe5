//! Random scenario plans from a handful of knobs.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    owned_below, view, Cell, CellId, Change, Link, MutantPlan, Planting, Presence, ScenarioPlan,
    SpecError, TestPlan, VarPlan,
};
use crate::report::{AssertionId, FailureKind, KillRecord};
use crate::snapshot::{primitive, MutantStatus, RootVariable, VariableKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub n_runs: u32,
    pub tests: usize,
    /// Inclusive range of independent variables per test.
    pub variables_per_test: (usize, usize),
    /// Maximum depth of a variable's own tree, root counted as 1.
    pub max_depth: usize,
    /// Inclusive range of fields per object; collections hold up to the max.
    pub fanout: (usize, usize),
    pub mutants: usize,
    pub surviving_fraction: f64,
    /// Share of surviving mutants given visible plantings.
    pub killable_fraction: f64,
    pub max_plantings: usize,
    pub max_covering_tests: usize,
    /// Chance that a variable gets a full alias, and separately a holder
    /// object that owns it.
    pub alias_rate: f64,
    pub cycle_rate: f64,
    /// Chance that a leaf varies per run; half of it for collection sizes.
    pub nondeterminism_rate: f64,
    /// Chance that a surviving mutant also plants into varying state.
    pub masked_rate: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            seed: 0,
            n_runs: crate::determinism::DEFAULT_RUNS,
            tests: 5,
            variables_per_test: (1, 3),
            max_depth: 4,
            fanout: (1, 3),
            mutants: 20,
            surviving_fraction: 0.7,
            killable_fraction: 0.6,
            max_plantings: 3,
            max_covering_tests: 3,
            alias_rate: 0.3,
            cycle_rate: 0.2,
            nondeterminism_rate: 0.15,
            masked_rate: 0.2,
        }
    }
}

impl ScenarioSpec {
    /// A spec whose sizes are drawn from `seed`: up to `max_tests` tests and
    /// `max_mutants` mutants.
    pub fn sized(seed: u64, max_tests: usize, max_mutants: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
        ScenarioSpec {
            seed,
            tests: rng.gen_range(1..=max_tests.max(1)),
            mutants: rng.gen_range(1..=max_mutants.max(1)),
            max_depth: rng.gen_range(2..=5),
            ..ScenarioSpec::default()
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let bad = |m: &str| Err(SpecError::Parameter(m.to_string()));
        if self.n_runs < 2 {
            return bad("n_runs must be at least 2");
        }
        if self.tests == 0 {
            return bad("at least one test is required");
        }
        let (vlo, vhi) = self.variables_per_test;
        if vlo == 0 || vlo > vhi {
            return bad("variables_per_test must be a non-empty range starting at 1 or more");
        }
        if self.fanout.0 > self.fanout.1 || self.fanout.1 == 0 {
            return bad("fanout must be a non-empty range with a positive maximum");
        }
        if !(1..=32).contains(&self.max_depth) {
            return bad("max_depth must be between 1 and 32");
        }
        if self.max_plantings == 0 || self.max_covering_tests == 0 {
            return bad("max_plantings and max_covering_tests must be positive");
        }
        for (name, p) in [
            ("surviving_fraction", self.surviving_fraction),
            ("killable_fraction", self.killable_fraction),
            ("alias_rate", self.alias_rate),
            ("cycle_rate", self.cycle_rate),
            ("nondeterminism_rate", self.nondeterminism_rate),
            ("masked_rate", self.masked_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SpecError::Parameter(format!("{name} must be within [0, 1]")));
            }
        }
        Ok(())
    }
}

struct HeapBuilder<'a> {
    rng: &'a mut ChaCha8Rng,
    spec: &'a ScenarioSpec,
    cells: Vec<Cell>,
}

impl HeapBuilder<'_> {
    fn push(&mut self, cell: Cell) -> CellId {
        self.cells.push(cell);
        self.cells.len() - 1
    }

    fn leaf(&mut self) -> CellId {
        let varying = self.rng.gen_bool(self.spec.nondeterminism_rate);
        let cell = match self.rng.gen_range(0..10) {
            0 => Cell::Null { type_name: "demo.Node".into() },
            1 | 2 => Cell::Prim {
                type_name: "java.lang.String".into(),
                value: primitive::string(&format!("s{}", self.rng.gen_range(0..50))),
                varying,
            },
            3 => Cell::prim("boolean", primitive::boolean(self.rng.gen_bool(0.5))),
            _ => Cell::Prim {
                type_name: "int".into(),
                value: primitive::int(self.rng.gen_range(-100..100)),
                varying,
            },
        };
        self.push(cell)
    }

    /// A tree of at most `depth` levels; `root` is the variable's root for
    /// cycle links, `None` when this call creates it.
    fn tree(&mut self, depth: usize, root: Option<CellId>) -> CellId {
        if depth <= 1 || (root.is_some() && self.rng.gen_bool(0.3)) {
            return self.leaf();
        }
        let here = self.push(Cell::Null { type_name: String::new() });
        let root = root.unwrap_or(here);
        let (lo, hi) = self.spec.fanout;
        let cell = if self.rng.gen_bool(0.3) {
            let n = self.rng.gen_range(0..=hi);
            let elements = (0..n).map(|_| self.tree(depth - 1, Some(root))).collect();
            Cell::Collection {
                type_name: "java.util.ArrayList".into(),
                elements,
                varying_size: self.rng.gen_bool(self.spec.nondeterminism_rate / 2.0),
            }
        } else {
            let n = self.rng.gen_range(lo..=hi);
            let mut fields: Vec<(String, Link)> = (0..n)
                .map(|i| (format!("f{i}"), Link::Owned(self.tree(depth - 1, Some(root)))))
                .collect();
            if self.rng.gen_bool(self.spec.cycle_rate) {
                fields.push(("owner".into(), Link::Back(root)));
            }
            Cell::Object { type_name: format!("demo.T{}", self.rng.gen_range(0..5)), fields }
        };
        self.cells[here] = cell;
        here
    }
}

const KINDS: [VariableKind; 4] = [
    VariableKind::Local,
    VariableKind::TestClassField,
    VariableKind::InstantiatedObject,
    VariableKind::StaticField,
];

fn plan_test(rng: &mut ChaCha8Rng, spec: &ScenarioSpec, test_id: String) -> TestPlan {
    let mut b = HeapBuilder { rng, spec, cells: Vec::new() };
    let mut variables = Vec::new();
    let n = b.rng.gen_range(spec.variables_per_test.0..=spec.variables_per_test.1);
    let mut returns = 0;
    for i in 0..n {
        let variable = if b.rng.gen_bool(0.2) {
            returns += 1;
            RootVariable::new("ret", VariableKind::MethodReturn, returns - 1)
        } else {
            RootVariable::new(format!("v{i}"), KINDS[b.rng.gen_range(0..KINDS.len())], 0)
        };
        let depth = b.rng.gen_range(1..=spec.max_depth);
        let root = b.tree(depth, None);
        variables.push(VarPlan { variable, root, presence: Presence::Always });
        if b.rng.gen_bool(spec.alias_rate) {
            variables.push(VarPlan {
                variable: RootVariable::local(format!("a{i}")),
                root,
                presence: Presence::Always,
            });
        }
        if b.rng.gen_bool(spec.alias_rate) {
            let id = b.push(Cell::prim("int", primitive::int(i as i64)));
            let holder = b.push(Cell::Object {
                type_name: "demo.Holder".into(),
                fields: vec![("id".into(), Link::Owned(id)), ("link".into(), Link::Owned(root))],
            });
            variables.push(VarPlan {
                variable: RootVariable::local(format!("w{i}")),
                root: holder,
                presence: Presence::Always,
            });
        }
    }
    if b.rng.gen_bool(spec.nondeterminism_rate) {
        let root = b.tree(2, None);
        variables.push(VarPlan { variable: RootVariable::local("tmp"), root, presence: Presence::EvenRuns });
    }
    let lines = b.rng.gen_range(1..=4u32);
    TestPlan {
        test_id,
        cells: b.cells,
        variables,
        assertion_lines: (0..lines).map(|i| 10 + 3 * i).collect(),
    }
}

fn perturb(value: &str, k: u32) -> String {
    match primitive::split(value) {
        Some(("int", v)) => match v.parse::<i64>() {
            Ok(n) => primitive::int(n + 1 + k as i64),
            Err(_) => format!("{value}~{k}"),
        },
        Some(("bool", v)) => primitive::boolean(v != "true"),
        _ => format!("{value}~{k}"),
    }
}

fn change_for(rng: &mut ChaCha8Rng, cell: &Cell) -> Option<Change> {
    match cell {
        Cell::Prim { value, .. } => Some(Change::SetValue(perturb(value, rng.gen_range(0..3)))),
        Cell::Object { .. } => Some(Change::SetNull),
        Cell::Collection { elements, .. } if !elements.is_empty() && rng.gen_bool(0.5) => Some(Change::Shrink),
        Cell::Collection { .. } => Some(Change::SetNull),
        Cell::Null { .. } => None,
    }
}

/// Plantable cells of one test: (visible, hidden by nondeterminism).
fn plantable(test: &TestPlan) -> Result<(Vec<CellId>, Vec<CellId>), SpecError> {
    let mut visible = BTreeSet::new();
    let mut hidden = BTreeSet::new();
    for v in &test.variables {
        for (cell, seen) in view(test, v)? {
            if matches!(test.cells[cell], Cell::Null { .. }) {
                continue;
            }
            if seen.masked {
                hidden.insert(cell);
            } else {
                visible.insert(cell);
            }
        }
    }
    let hidden = hidden.difference(&visible).copied().collect();
    Ok((visible.into_iter().collect(), hidden))
}

fn conflicts(test: &TestPlan, chosen: &[CellId], cell: CellId) -> bool {
    chosen
        .iter()
        .any(|&c| c == cell || owned_below(test, c).contains(&cell) || owned_below(test, cell).contains(&c))
}

const OPERATORS: [&str; 5] = [
    "conditionals-boundary",
    "negate-conditionals",
    "math",
    "increments",
    "return-values",
];

pub fn plan_scenario(spec: &ScenarioSpec) -> Result<ScenarioPlan, SpecError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let tests: Vec<TestPlan> = (0..spec.tests)
        .map(|t| plan_test(&mut rng, spec, format!("Test{t:03}")))
        .collect();
    let pools: Vec<(Vec<CellId>, Vec<CellId>)> = tests.iter().map(plantable).collect::<Result<_, _>>()?;

    let mut mutants = Vec::with_capacity(spec.mutants);
    for i in 0..spec.mutants {
        let mutant_id = format!("m{i:04}");
        let k = rng.gen_range(1..=spec.max_covering_tests.min(tests.len()));
        let mut covering: Vec<usize> = sample(&mut rng, tests.len(), k).into_vec();
        covering.sort_unstable();
        let covering_test_ids: Vec<String> = covering.iter().map(|&t| tests[t].test_id.clone()).collect();
        let survived = rng.gen_bool(spec.surviving_fraction);
        let mut plan = MutantPlan {
            mutant_id: mutant_id.clone(),
            location: format!("demo/Module{}.java:{}", i % 7, 10 + i),
            operator: OPERATORS[rng.gen_range(0..OPERATORS.len())].into(),
            status: if survived { MutantStatus::Survived } else { MutantStatus::Killed },
            covering_test_ids,
            plantings: Vec::new(),
            kills: Vec::new(),
        };
        if !survived {
            let n = rng.gen_range(1..=covering.len());
            for &t in &covering[..n] {
                let test = &tests[t];
                let by_assertion = rng.gen_bool(0.7);
                let assertion_id = by_assertion.then(|| AssertionId {
                    test_id: test.test_id.clone(),
                    line: test.assertion_lines[rng.gen_range(0..test.assertion_lines.len())],
                    ordinal: 0,
                });
                plan.kills.push(KillRecord {
                    mutant_id: mutant_id.clone(),
                    test_id: test.test_id.clone(),
                    failure_kind: if by_assertion { FailureKind::Assertion } else { FailureKind::NonAssertion },
                    assertion_id,
                });
            }
            mutants.push(plan);
            continue;
        }

        let mut chosen: Vec<Vec<CellId>> = vec![Vec::new(); tests.len()];
        let mut add = |rng: &mut ChaCha8Rng, t: usize, cell: CellId, plan: &mut MutantPlan| {
            let test = &tests[t];
            if conflicts(test, &chosen[t], cell) {
                return;
            }
            if let Some(change) = change_for(rng, &test.cells[cell]) {
                chosen[t].push(cell);
                plan.plantings.push(Planting { test_id: test.test_id.clone(), cell, change });
            }
        };
        if rng.gen_bool(spec.killable_fraction) {
            let want = rng.gen_range(1..=spec.max_plantings);
            for _ in 0..want * 4 {
                if plan.plantings.len() >= want {
                    break;
                }
                let t = covering[rng.gen_range(0..covering.len())];
                let pool = &pools[t].0;
                if !pool.is_empty() {
                    let cell = pool[rng.gen_range(0..pool.len())];
                    add(&mut rng, t, cell, &mut plan);
                }
            }
        }
        if rng.gen_bool(spec.masked_rate) {
            let t = covering[rng.gen_range(0..covering.len())];
            let pool = &pools[t].1;
            if !pool.is_empty() {
                let cell = pool[rng.gen_range(0..pool.len())];
                add(&mut rng, t, cell, &mut plan);
            }
        }
        mutants.push(plan);
    }
    Ok(ScenarioPlan { n_runs: spec.n_runs, tests, mutants })
}
