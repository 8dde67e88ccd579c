//! Test corpora: the curated CNF files shipped in `corpus/cnf`, every
//! restricted formula on one or two variables, and every connected graph on
//! a handful of vertices up to isomorphism.

use std::collections::BTreeSet;

use crate::cnf::{CnfFormula, Literal};
use crate::graph::{Graph, GraphBuilder};
use crate::io::parse_dimacs_cnf;

const CURATED: &[(&str, &str)] = &[
    ("unit-conflict-n1", include_str!("../corpus/cnf/unit-conflict-n1.cnf")),
    ("chain-unsat-n2", include_str!("../corpus/cnf/chain-unsat-n2.cnf")),
    ("xor-n2", include_str!("../corpus/cnf/xor-n2.cnf")),
    ("chain-sat-n3", include_str!("../corpus/cnf/chain-sat-n3.cnf")),
    ("nae-n3", include_str!("../corpus/cnf/nae-n3.cnf")),
    ("chain-unsat-n3", include_str!("../corpus/cnf/chain-unsat-n3.cnf")),
    ("cycle-n4", include_str!("../corpus/cnf/cycle-n4.cnf")),
    ("chain-unsat-n4", include_str!("../corpus/cnf/chain-unsat-n4.cnf")),
    ("mixed-n4", include_str!("../corpus/cnf/mixed-n4.cnf")),
];

/// The hand-built formulas, by file stem.
pub fn curated_formulas() -> Vec<(String, CnfFormula)> {
    CURATED
        .iter()
        .map(|(name, text)| (name.to_string(), parse_dimacs_cnf(text).expect("curated corpus parses")))
        .collect()
}

/// Every restricted formula on exactly `num_vars` variables, as a multiset of
/// clauses. Clauses are nonempty, hold at most three literals, and never
/// contain a variable twice (so no tautologies). Each variable occurs at most
/// three times and with both polarities. Clause order is canonical, so no
/// two results are equal as multisets.
pub fn restricted_formulas(num_vars: usize) -> Vec<CnfFormula> {
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut stack = Vec::new();
    candidate_clauses(num_vars, 0, &mut stack, &mut clauses);
    clauses.sort();

    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut pos = vec![0usize; num_vars];
    let mut neg = vec![0usize; num_vars];
    pick_clauses(&clauses, 0, &mut chosen, &mut pos, &mut neg, &mut out, num_vars);
    out
}

fn candidate_clauses(n: usize, var: usize, stack: &mut Vec<Literal>, out: &mut Vec<Vec<Literal>>) {
    if var == n {
        if !stack.is_empty() && stack.len() <= 3 {
            out.push(stack.clone());
        }
        return;
    }
    candidate_clauses(n, var + 1, stack, out);
    for lit in [Literal::pos(var), Literal::neg(var)] {
        stack.push(lit);
        candidate_clauses(n, var + 1, stack, out);
        stack.pop();
    }
}

fn pick_clauses(
    clauses: &[Vec<Literal>],
    from: usize,
    chosen: &mut Vec<usize>,
    pos: &mut [usize],
    neg: &mut [usize],
    out: &mut Vec<CnfFormula>,
    n: usize,
) {
    if (0..n).all(|v| pos[v] > 0 && neg[v] > 0) {
        let formula = chosen.iter().map(|&c| clauses[c].clone()).collect();
        out.push(CnfFormula::new(n, formula).expect("variables in range"));
    }
    for c in from..clauses.len() {
        let fits = clauses[c].iter().all(|l| pos[l.var] + neg[l.var] < 3);
        if !fits {
            continue;
        }
        for l in &clauses[c] {
            if l.positive { pos[l.var] += 1 } else { neg[l.var] += 1 }
        }
        chosen.push(c);
        pick_clauses(clauses, c, chosen, pos, neg, out, n);
        chosen.pop();
        for l in &clauses[c] {
            if l.positive { pos[l.var] -= 1 } else { neg[l.var] -= 1 }
        }
    }
}

/// Restricted formulas on 1..=`max_vars` variables.
pub fn restricted_formulas_up_to(max_vars: usize) -> Vec<CnfFormula> {
    (1..=max_vars).flat_map(restricted_formulas).collect()
}

/// One representative of every isomorphism class of connected graphs on
/// exactly `n` vertices (`n <= 7`). Brute force over edge masks with a
/// permutation-minimal canonical form.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "connected_graphs is brute force; n = {n} is too large");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut index = vec![vec![0usize; n]; n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        index[u][v] = i;
        index[v][u] = i;
    }
    let perms = permutations(n);
    // perm_maps[p][i] is the bit that edge i moves to under permutation p
    let perm_maps: Vec<Vec<usize>> =
        perms.iter().map(|p| pairs.iter().map(|&(u, v)| index[p[u]][p[v]]).collect()).collect();

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        if !mask_connected(mask, n, &pairs) {
            continue;
        }
        let canon = perm_maps
            .iter()
            .map(|map| {
                let mut image = 0u32;
                for (i, &to) in map.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        image |= 1 << to;
                    }
                }
                image
            })
            .min()
            .expect("at least one permutation");
        if seen.insert(canon) {
            let mut b = GraphBuilder::new(n);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if canon >> i & 1 == 1 {
                    b.add_edge(u, v).expect("distinct pair");
                }
            }
            out.push(b.build());
        }
    }
    out
}

fn mask_connected(mask: u32, n: usize, pairs: &[(usize, usize)]) -> bool {
    if n == 0 {
        return false;
    }
    let mut reached = 1u32;
    loop {
        let before = reached;
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 && (reached >> u & 1 == 1 || reached >> v & 1 == 1) {
                reached |= 1 << u | 1 << v;
            }
        }
        if reached == before {
            return reached == (1u32 << n) - 1;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut current, &mut out);
    out
}

fn heap_permute(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, a, out);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, a, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::sat_oracle;

    #[test]
    fn connected_graph_counts() {
        // OEIS A001349
        let counts: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112]);
    }

    #[test]
    fn restricted_formulas_are_valid_and_distinct() {
        let one = restricted_formulas(1);
        // {x, ¬x}, {x, x, ¬x}, {x, ¬x, ¬x}
        assert_eq!(one.len(), 3);
        let two = restricted_formulas(2);
        assert!(two.len() > 20);
        for phi in one.iter().chain(&two) {
            phi.validate_restricted().unwrap();
            assert!(phi.clauses().iter().all(|c| !c.is_empty()));
        }
        let distinct: BTreeSet<String> = two.iter().map(|f| f.to_string()).collect();
        assert_eq!(distinct.len(), two.len());
        assert!(two.iter().any(|f| sat_oracle(f).unwrap().answer));
        assert!(two.iter().any(|f| !sat_oracle(f).unwrap().answer));
    }

    #[test]
    fn curated_corpus_matches_notes() {
        let expected = [
            ("unit-conflict-n1", false),
            ("chain-unsat-n2", false),
            ("xor-n2", true),
            ("chain-sat-n3", true),
            ("nae-n3", true),
            ("chain-unsat-n3", false),
            ("cycle-n4", true),
            ("chain-unsat-n4", false),
            ("mixed-n4", true),
        ];
        let corpus = curated_formulas();
        assert_eq!(corpus.len(), expected.len());
        for ((name, phi), (want_name, sat)) in corpus.iter().zip(expected) {
            assert_eq!(name, want_name);
            phi.validate_restricted().unwrap();
            assert!(phi.num_vars() <= 4);
            assert_eq!(sat_oracle(phi).unwrap().answer, sat, "{name}");
        }
    }
}
