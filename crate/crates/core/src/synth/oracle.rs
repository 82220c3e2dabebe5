//! Exact minimum set cover for small instances.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::CandidateMatrix;

pub const MAX_GROUPS: usize = 20;
pub const MAX_MUTANTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dimension {
    Assertion,
    Variable,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the exact oracle: {groups} groups (max {MAX_GROUPS}), {mutants} mutants (max {MAX_MUTANTS})")]
    TooLarge { groups: usize, mutants: usize },
}

/// Kill set of every group in `dimension`, as bitmasks over the killable
/// mutants in sorted order. Panics beyond 32 killable mutants.
pub fn group_masks(matrix: &CandidateMatrix, dimension: Dimension) -> Vec<u32> {
    let index: BTreeMap<&str, usize> = matrix
        .killable_mutants
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_str(), i))
        .collect();
    assert!(index.len() <= 32, "bitmask view supports at most 32 mutants");
    let mask_of = |ids: &mut dyn Iterator<Item = &String>| {
        let mut bits = 0u32;
        for id in ids {
            if let Some(c) = matrix.candidate(id) {
                for m in &c.kills {
                    bits |= 1 << index[m.as_str()];
                }
            }
        }
        bits
    };
    match dimension {
        Dimension::Assertion => matrix
            .candidates
            .iter()
            .map(|c| mask_of(&mut std::iter::once(&c.candidate_id)))
            .collect(),
        Dimension::Variable => matrix
            .by_variable
            .iter()
            .map(|g| mask_of(&mut g.candidates.iter()))
            .collect(),
        Dimension::Test => matrix
            .by_test
            .iter()
            .map(|g| mask_of(&mut g.candidates.iter()))
            .collect(),
    }
}

/// Fewest groups of `dimension` whose kills cover every killable mutant.
///
/// Breadth-first search over covered-mutant bitmasks, so the cost is
/// `2^mutants * groups` rather than `2^groups`.
pub fn exact_min_cover(matrix: &CandidateMatrix, dimension: Dimension) -> Result<usize, OracleError> {
    let n = matrix.killable_mutants.len();
    let n_groups = match dimension {
        Dimension::Assertion => matrix.candidates.len(),
        Dimension::Variable => matrix.by_variable.len(),
        Dimension::Test => matrix.by_test.len(),
    };
    if n_groups > MAX_GROUPS || n > MAX_MUTANTS {
        return Err(OracleError::TooLarge { groups: n_groups, mutants: n });
    }
    let groups = group_masks(matrix, dimension);
    let full = ((1u32 << n) - 1) as usize;
    let mut dist = vec![usize::MAX; full + 1];
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(state) = queue.pop_front() {
        if state == full {
            return Ok(dist[state]);
        }
        for &g in &groups {
            let next = state | g as usize;
            if dist[next] == usize::MAX {
                dist[next] = dist[state] + 1;
                queue.push_back(next);
            }
        }
    }
    unreachable!("killable mutants are the union of all kill sets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{build_matrix, candidate_id, AssertionCandidate, AssertionKind};
    use crate::snapshot::RootVariable;

    fn cand(test: &str, var: &str, node: &str, kills: &[&str]) -> AssertionCandidate {
        let variable = RootVariable::local(var);
        AssertionCandidate {
            candidate_id: candidate_id(test, &variable, node, AssertionKind::ValueEquality, "int:0"),
            test_id: test.into(),
            variable,
            node_id: node.into(),
            depth: 2,
            assertion_kind: AssertionKind::ValueEquality,
            expected: "int:0".into(),
            kills: kills.iter().map(|s| s.to_string()).collect(),
            observed: Default::default(),
        }
    }

    fn brute_force(groups: &[u32], n: usize) -> usize {
        let full = (1u32 << n) - 1;
        (0u32..1 << groups.len())
            .filter(|s| {
                let cover = (0..groups.len()).filter(|i| s & (1 << i) != 0).fold(0, |a, i| a | groups[i]);
                cover == full
            })
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn small_example_optimum_two() {
        let m = build_matrix(vec![
            cand("T", "v", "v.a1", &["m1", "m2"]),
            cand("T", "v", "v.a2", &["m2"]),
            cand("T", "v", "v.a3", &["m3"]),
        ]);
        assert_eq!(exact_min_cover(&m, Dimension::Assertion), Ok(2));
        assert_eq!(brute_force(&group_masks(&m, Dimension::Assertion), 3), 2);
        assert_eq!(exact_min_cover(&m, Dimension::Variable), Ok(1));
    }

    #[test]
    fn single_and_disjoint() {
        let m = build_matrix(vec![cand("T", "v", "v.a", &["m1", "m2", "m3"])]);
        assert_eq!(exact_min_cover(&m, Dimension::Assertion), Ok(1));
        let m = build_matrix((0..6).map(|i| cand("T", "v", &format!("v.f{i}"), &[&format!("m{i}")])).collect());
        assert_eq!(exact_min_cover(&m, Dimension::Assertion), Ok(6));
        assert_eq!(exact_min_cover(&m, Dimension::Test), Ok(1));
    }

    #[test]
    fn empty_matrix_needs_nothing() {
        assert_eq!(exact_min_cover(&build_matrix(vec![]), Dimension::Test), Ok(0));
    }

    #[test]
    fn too_large_is_an_error() {
        let m = build_matrix((0..13).map(|i| cand("T", "v", &format!("v.f{i}"), &[&format!("m{i:02}")])).collect());
        assert!(matches!(exact_min_cover(&m, Dimension::Test), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn agrees_with_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n_m = rng.gen_range(1..=8);
            let n_c = rng.gen_range(1..=10);
            let mut cands: Vec<AssertionCandidate> = (0..n_c)
                .map(|i| {
                    let kills: Vec<String> = (0..n_m).filter(|_| rng.gen_bool(0.3)).map(|m| format!("m{m}")).collect();
                    let kills: Vec<&str> = kills.iter().map(String::as_str).collect();
                    cand("T", "v", &format!("v.f{i}"), if kills.is_empty() { &["m0"] } else { &kills })
                })
                .collect();
            cands.dedup_by(|a, b| a.candidate_id == b.candidate_id);
            let m = build_matrix(cands);
            let groups = group_masks(&m, Dimension::Assertion);
            assert_eq!(exact_min_cover(&m, Dimension::Assertion).unwrap(), brute_force(&groups, m.killable_mutants.len()));
        }
    }
}
