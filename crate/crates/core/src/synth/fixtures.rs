//! Hand-built scenarios.

use super::{
    generate, Cell, Change, GeneratedCorpus, Link, MutantPlan, Planting, Presence, ScenarioPlan,
    TestPlan, VarPlan,
};
use crate::report::{AssertionId, FailureKind, KillRecord};
use crate::snapshot::{primitive, MutantStatus, RootVariable};

fn var(name: &str, root: usize) -> VarPlan {
    VarPlan { variable: RootVariable::local(name), root, presence: Presence::Always }
}

fn mutant(id: &str, status: MutantStatus, tests: &[&str], plantings: Vec<Planting>) -> MutantPlan {
    MutantPlan {
        mutant_id: id.into(),
        location: format!("demo/Shop.java:{}", 10 + id[1..].parse::<usize>().unwrap_or(0)),
        operator: "math".into(),
        status,
        covering_test_ids: tests.iter().map(|t| t.to_string()).collect(),
        plantings,
        kills: Vec::new(),
    }
}

fn set(test: &str, cell: usize, value: i64) -> Planting {
    Planting { test_id: test.into(), cell, change: Change::SetValue(primitive::int(value)) }
}

/// The two-test running example.
///
/// Test1 holds `var1 = {f1, f2, f3}` and `var2 = {f4 -> var1, f5, f6}`,
/// where `f6` is a hash code that changes every run. Test2 holds
/// `var3 = {f7, f8}`. Surviving mutants m1 and m2 both corrupt `f2`; m3
/// corrupts `f3` and also `var3.f8`; m6 leaves no trace. m4 and m5 are
/// already killed by Test1's assertion on `var2.f5`.
pub fn two_test_plan() -> ScenarioPlan {
    let int = |v: i64| Cell::prim("int", primitive::int(v));
    let test1 = TestPlan {
        test_id: "Test1".into(),
        cells: vec![
            Cell::Object {
                type_name: "demo.A".into(),
                fields: vec![
                    ("f1".into(), Link::Owned(1)),
                    ("f2".into(), Link::Owned(2)),
                    ("f3".into(), Link::Owned(3)),
                ],
            },
            int(1),
            int(2),
            int(3),
            Cell::Object {
                type_name: "demo.B".into(),
                fields: vec![
                    ("f4".into(), Link::Owned(0)),
                    ("f5".into(), Link::Owned(5)),
                    ("f6".into(), Link::Owned(6)),
                ],
            },
            int(5),
            Cell::Prim { type_name: "int".into(), value: primitive::int(6), varying: true },
        ],
        variables: vec![var("var1", 0), var("var2", 4)],
        assertion_lines: vec![12],
    };
    let test2 = TestPlan {
        test_id: "Test2".into(),
        cells: vec![
            Cell::Object {
                type_name: "demo.C".into(),
                fields: vec![("f7".into(), Link::Owned(1)), ("f8".into(), Link::Owned(2))],
            },
            int(7),
            int(8),
        ],
        variables: vec![var("var3", 0)],
        assertion_lines: vec![20],
    };
    let mut m4 = mutant("m4", MutantStatus::Killed, &["Test1"], vec![]);
    let mut m5 = mutant("m5", MutantStatus::Killed, &["Test1"], vec![]);
    for m in [&mut m4, &mut m5] {
        m.kills.push(KillRecord {
            mutant_id: m.mutant_id.clone(),
            test_id: "Test1".into(),
            failure_kind: FailureKind::Assertion,
            assertion_id: Some(AssertionId { test_id: "Test1".into(), line: 12, ordinal: 0 }),
        });
    }
    ScenarioPlan {
        n_runs: crate::determinism::DEFAULT_RUNS,
        tests: vec![test1, test2],
        mutants: vec![
            mutant("m1", MutantStatus::Survived, &["Test1"], vec![set("Test1", 2, 20)]),
            mutant("m2", MutantStatus::Survived, &["Test1"], vec![set("Test1", 2, 21)]),
            mutant(
                "m3",
                MutantStatus::Survived,
                &["Test1", "Test2"],
                vec![set("Test1", 3, 30), set("Test2", 2, 80)],
            ),
            m4,
            m5,
            mutant("m6", MutantStatus::Survived, &["Test2"], vec![]),
        ],
    }
}

pub fn two_tests() -> GeneratedCorpus {
    generate(&two_test_plan()).expect("the fixture plan is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_matches_the_plan() {
        let g = two_tests();
        let nodes: Vec<(&str, &str)> = g
            .truth
            .records
            .iter()
            .map(|r| (r.mutant_id.as_str(), r.node_id.as_str()))
            .collect();
        assert_eq!(
            nodes,
            vec![
                ("m1", "var1.f2"),
                ("m1", "var2.f4.f2"),
                ("m2", "var1.f2"),
                ("m2", "var2.f4.f2"),
                ("m3", "var1.f3"),
                ("m3", "var2.f4.f3"),
                ("m3", "var3.f8"),
            ]
        );
        assert_eq!(g.truth.killable.len(), 3);
        assert_eq!(g.truth.surviving.len(), 4);
        assert_eq!(g.corpus.kills.len(), 2);
    }
}
