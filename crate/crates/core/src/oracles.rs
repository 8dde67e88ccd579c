//! Brute-force ground truth for cliques, SAT and tiny AKC instances, plus the
//! driver that checks reductions against them.
//!
//! None of these use the peeling code: the AKC oracle decides the problem
//! straight from its definition, so it also checks the closure routine.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::cnf::CnfFormula;
use crate::engagement::{verify_solution, AkcInstance, Solution};
use crate::graph::{Graph, VertexId};
use crate::reductions::{
    extract_witness, reduce, CliqueInstance, ReducedInstance, ReductionError, ReductionKind, Source, Witness,
};
use crate::solver::{solve, Decision, SolveError, SolveOptions};

pub const CLIQUE_ORACLE_LIMIT: usize = 20;
pub const SAT_ORACLE_LIMIT: usize = 24;
pub const AKC_ORACLE_LIMIT: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {size} {what}, oracle limit is {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{kind} instance {instance_id}: source says {source_answer}, reduced instance says {reduced_answer}")]
    Disagreement { kind: ReductionKind, instance_id: String, source_answer: String, reduced_answer: String },
    #[error("{kind} instance {instance_id}: {message}")]
    WitnessCheck { kind: ReductionKind, instance_id: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleWitness {
    Vertices(Vec<VertexId>),
    Assignment(Vec<bool>),
    Solution(Solution),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub answer: bool,
    /// Present exactly when `answer` is true.
    pub witness: Option<OracleWitness>,
    /// Candidates examined.
    pub work: u64,
}

/// Searches `ℓ`-subsets in lexicographic order, only extending by vertices
/// adjacent to everything chosen so far and of degree at least `ℓ-1`.
pub fn clique_oracle(graph: &Graph, ell: usize) -> Result<OracleVerdict, OracleError> {
    clique_oracle_with_limit(graph, ell, CLIQUE_ORACLE_LIMIT)
}

pub fn clique_oracle_with_limit(graph: &Graph, ell: usize, limit: usize) -> Result<OracleVerdict, OracleError> {
    let n = graph.vertex_count();
    if n > limit {
        return Err(OracleError::TooLarge { what: "vertices", size: n, limit });
    }
    let eligible: Vec<VertexId> = graph.vertices().filter(|&v| graph.degree(v) + 1 >= ell).collect();
    let mut chosen = Vec::with_capacity(ell);
    let mut work = 0;
    let found = extend_clique(graph, ell, &eligible, 0, &mut chosen, &mut work);
    if found {
        debug_assert!(CliqueInstance::new(graph.clone(), ell).is_clique(&chosen));
    }
    Ok(OracleVerdict { answer: found, witness: found.then_some(OracleWitness::Vertices(chosen)), work })
}

fn extend_clique(
    graph: &Graph,
    ell: usize,
    eligible: &[VertexId],
    from: usize,
    chosen: &mut Vec<VertexId>,
    work: &mut u64,
) -> bool {
    *work += 1;
    if chosen.len() == ell {
        return true;
    }
    for idx in from..eligible.len() {
        if eligible.len() - idx < ell - chosen.len() {
            break;
        }
        let v = eligible[idx];
        if chosen.iter().all(|&u| graph.has_edge(u, v)) {
            chosen.push(v);
            if extend_clique(graph, ell, eligible, idx + 1, chosen, work) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Tries all `2^n` assignments in binary counting order (bit `i` is `x_{i+1}`).
pub fn sat_oracle(phi: &CnfFormula) -> Result<OracleVerdict, OracleError> {
    let n = phi.num_vars();
    if n > SAT_ORACLE_LIMIT {
        return Err(OracleError::TooLarge { what: "variables", size: n, limit: SAT_ORACLE_LIMIT });
    }
    let mut assignment = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        for (i, a) in assignment.iter_mut().enumerate() {
            *a = mask >> i & 1 == 1;
        }
        if phi.is_satisfied_by(&assignment) {
            return Ok(OracleVerdict {
                answer: true,
                witness: Some(OracleWitness::Assignment(assignment)),
                work: mask + 1,
            });
        }
    }
    Ok(OracleVerdict { answer: false, witness: None, work: 1u64 << n })
}

/// Maximum over all `H ⊆ V` of `|H|` where the vertices of `H` with fewer
/// than `k` neighbors in `H` (the anchors it needs) number at most `b`.
/// Returns the size, a witness and the number of subsets examined.
pub fn akc_enum_optimum(inst: &AkcInstance) -> Result<(usize, Solution, u64), OracleError> {
    let g = &inst.graph;
    let n = g.vertex_count();
    if n > AKC_ORACLE_LIMIT {
        return Err(OracleError::TooLarge { what: "vertices", size: n, limit: AKC_ORACLE_LIMIT });
    }
    let nbr: Vec<u32> = g.vertices().map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w)).collect();
    let mut best: Option<(usize, u32, u32)> = None;
    for h in 0u32..(1u32 << n) {
        let size = h.count_ones() as usize;
        if best.is_some_and(|(s, _, _)| size <= s) {
            continue;
        }
        let mut deficient = 0u32;
        let mut rest = h;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if ((nbr[v] & h).count_ones() as usize) < inst.k {
                deficient |= 1 << v;
            }
        }
        if deficient.count_ones() as usize <= inst.b {
            best = Some((size, h, deficient));
        }
    }
    // the empty set is always feasible
    let (size, h, b) = best.expect("empty set is feasible");
    let bits = |m: u32| (0..n).filter(move |&v| m >> v & 1 == 1);
    Ok((size, Solution::new(bits(b), bits(h)), 1u64 << n))
}

pub fn akc_enum_oracle(inst: &AkcInstance) -> Result<OracleVerdict, OracleError> {
    let (size, sol, work) = akc_enum_optimum(inst)?;
    let answer = size >= inst.p;
    if answer {
        debug_assert!(verify_solution(inst, &sol).is_valid());
    }
    Ok(OracleVerdict { answer, witness: answer.then_some(OracleWitness::Solution(sol)), work })
}

/// One source instance of an equivalence sweep.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub source: Source,
}

#[derive(Clone, Debug)]
pub struct EquivalenceConfig {
    pub kind: ReductionKind,
    /// Threshold for [`ReductionKind::SatK4Plus`].
    pub k: Option<usize>,
    pub options: SolveOptions,
    /// Restrict anchors to green vertices for the clique-copies reduction.
    pub green_pool: bool,
}

impl EquivalenceConfig {
    pub fn new(kind: ReductionKind, options: SolveOptions) -> Self {
        Self { kind, k: None, options, green_pool: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceRecord {
    pub kind: ReductionKind,
    pub instance_id: String,
    pub source_answer: bool,
    pub reduced_answer: Decision,
    pub agree: bool,
    pub work_source: u64,
    pub work_reduced: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub records: Vec<EquivalenceRecord>,
}

impl EquivalenceReport {
    pub const CSV_HEADER: &'static str = "kind,instance_id,source_answer,reduced_answer,agree,work_source,work_reduced";

    pub fn all_agree(&self) -> bool {
        self.records.iter().all(|r| r.agree)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let reduced = match r.reduced_answer {
                Decision::Yes => "yes",
                Decision::No => "no",
                Decision::Unknown => "unknown",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.kind,
                r.instance_id,
                if r.source_answer { "yes" } else { "no" },
                reduced,
                u8::from(r.agree),
                r.work_source,
                r.work_reduced
            );
        }
        out
    }
}

fn source_verdict(source: &Source) -> Result<OracleVerdict, OracleError> {
    match source {
        Source::Clique(c) => clique_oracle(&c.graph, c.ell),
        Source::Formula(f) => sat_oracle(f),
    }
}

fn check_one(config: &EquivalenceConfig, entry: &CorpusEntry) -> Result<EquivalenceRecord, OracleError> {
    let verdict = source_verdict(&entry.source)?;
    let red: ReducedInstance = reduce(config.kind, &entry.source, config.k)?;
    let mut options = config.options.clone();
    if config.green_pool {
        options.candidate_pool_override = red.green_vertices();
    }
    let report = solve(&red.instance, &options)?;
    if report.decision == Decision::Yes {
        extract_witness(&red, &report.best).map_err(|e| OracleError::WitnessCheck {
            kind: config.kind,
            instance_id: entry.id.clone(),
            message: e.to_string(),
        })?;
    }
    let agree = match report.decision {
        Decision::Yes => verdict.answer,
        Decision::No => !verdict.answer,
        Decision::Unknown => false,
    };
    Ok(EquivalenceRecord {
        kind: config.kind,
        instance_id: entry.id.clone(),
        source_answer: verdict.answer,
        reduced_answer: report.decision,
        agree,
        work_source: verdict.work,
        work_reduced: report.nodes_explored,
    })
}

/// Runs every corpus entry through its oracle and through the exact solver on
/// the reduced instance. Any disagreement (or a reduced "yes" whose witness
/// fails extraction) is an error.
pub fn equivalence_driver(config: &EquivalenceConfig, corpus: &[CorpusEntry]) -> Result<EquivalenceReport, OracleError> {
    let records: Vec<EquivalenceRecord> =
        corpus.par_iter().map(|entry| check_one(config, entry)).collect::<Result<_, _>>()?;
    if let Some(r) = records.iter().find(|r| !r.agree) {
        return Err(OracleError::Disagreement {
            kind: r.kind,
            instance_id: r.instance_id.clone(),
            source_answer: r.source_answer.to_string(),
            reduced_answer: format!("{:?}", r.reduced_answer),
        });
    }
    Ok(EquivalenceReport { records })
}

/// Converts an oracle witness into the form the reductions consume.
pub fn as_reduction_witness(witness: &OracleWitness) -> Option<Witness> {
    match witness {
        OracleWitness::Vertices(v) => Some(Witness::Clique(v.clone())),
        OracleWitness::Assignment(a) => Some(Witness::Assignment(a.clone())),
        OracleWitness::Solution(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    #[test]
    fn clique_examples() {
        let v = clique_oracle(&complete(4), 4).unwrap();
        assert!(v.answer);
        assert_eq!(v.witness, Some(OracleWitness::Vertices(vec![0, 1, 2, 3])));
        assert!(!clique_oracle(&cycle(5), 3).unwrap().answer);
        let p = clique_oracle(&petersen(), 3).unwrap();
        assert!(!p.answer && p.witness.is_none());
        assert!(matches!(clique_oracle(&path(21), 2), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn sat_examples() {
        let unsat = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        assert!(!sat_oracle(&unsat).unwrap().answer);
        let sat = CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[-1, -2]]).unwrap();
        let v = sat_oracle(&sat).unwrap();
        assert_eq!(v.witness, Some(OracleWitness::Assignment(vec![true, false])));
        let empty_clause = CnfFormula::new(2, vec![vec![], vec![]]).unwrap();
        assert!(!sat_oracle(&empty_clause).unwrap().answer);
        assert!(sat_oracle(&CnfFormula::new(25, vec![]).unwrap()).is_err());
    }

    #[test]
    fn akc_examples() {
        let v = akc_enum_oracle(&AkcInstance::new(path(5), 2, 2, 5)).unwrap();
        assert_eq!(v.witness, Some(OracleWitness::Solution(Solution::new([0, 4], 0..5))));
        assert!(!akc_enum_oracle(&AkcInstance::new(path(5), 2, 0, 1)).unwrap().answer);
        assert!(akc_enum_oracle(&AkcInstance::new(complete(4), 3, 0, 4)).unwrap().answer);
        assert!(akc_enum_oracle(&AkcInstance::new(path(16), 2, 0, 1)).is_err());
    }

    #[test]
    fn empty_corpus() {
        let config = EquivalenceConfig::new(ReductionKind::SatK3, SolveOptions::exhaustive());
        let report = equivalence_driver(&config, &[]).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.to_csv(), format!("{}\n", EquivalenceReport::CSV_HEADER));
    }
}
