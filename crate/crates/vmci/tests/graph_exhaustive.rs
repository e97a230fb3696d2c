//! Exhaustive small-graph checks: essential graphs characterize Markov
//! equivalence, and PC and GS agree under a perfect oracle.

mod support;

use std::collections::HashMap;

use support::all_dags;
use vmci::discovery::{gs, pc};
use vmci::graph::{structural_loss, Dag, OracleCiTester};

/// All d-separation statements (x < y, z over the remaining vertices),
/// packed into a bitmask.
fn dsep_signature(dag: &Dag) -> u64 {
    let m = dag.n();
    let mut bits: u64 = 0;
    let mut k = 0;
    for x in 0..m {
        for y in (x + 1)..m {
            let rest: Vec<usize> = (0..m).filter(|&v| v != x && v != y).collect();
            for zmask in 0..(1u32 << rest.len()) {
                let z: Vec<usize> = rest
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| zmask & (1 << i) != 0)
                    .map(|(_, &v)| v)
                    .collect();
                if dag.d_separated_idx(x, y, &z) {
                    bits |= 1 << k;
                }
                k += 1;
                assert!(k <= 64);
            }
        }
    }
    bits
}

#[test]
fn essential_graph_characterizes_equivalence_on_four_vertices() {
    let dags = all_dags(4);
    assert_eq!(dags.len(), 543);
    let mut by_signature: HashMap<u64, String> = HashMap::new();
    let mut by_graph: HashMap<String, u64> = HashMap::new();
    for dag in &dags {
        let sig = dsep_signature(dag);
        let essential = dag.essential_graph().to_text();
        match by_signature.get(&sig) {
            Some(existing) => assert_eq!(
                existing, &essential,
                "equal d-separations must give equal essential graphs"
            ),
            None => {
                by_signature.insert(sig, essential.clone());
            }
        }
        match by_graph.get(&essential) {
            Some(&existing) => assert_eq!(
                existing, sig,
                "equal essential graphs must encode equal d-separations"
            ),
            None => {
                by_graph.insert(essential, sig);
            }
        }
    }
    assert_eq!(by_signature.len(), by_graph.len());
}

#[test]
fn gs_matches_pc_under_oracle_on_five_vertices() {
    let dags = all_dags(5);
    assert_eq!(dags.len(), 29281);
    for dag in &dags {
        let oracle = OracleCiTester::new(dag);
        let vars = dag.vertex_names().to_vec();
        let from_pc = pc(&oracle, &vars, vars.len() - 2).unwrap();
        let from_gs = gs(&oracle, &vars).unwrap();
        assert_eq!(
            structural_loss(&from_gs.graph, &from_pc.graph).unwrap(),
            0,
            "PC and GS disagree on {}",
            dag.to_text()
        );
    }
}

#[test]
fn markov_boundary_equals_graphical_blanket_on_five_vertices() {
    use vmci::discovery::gs_markov_boundary;
    for dag in all_dags(5) {
        let oracle = OracleCiTester::new(&dag);
        let vars = dag.vertex_names().to_vec();
        for x in 0..dag.n() {
            let mut blanket: Vec<usize> = Vec::new();
            blanket.extend(dag.parents_of(x));
            blanket.extend(dag.children_of(x));
            for &c in dag.children_of(x) {
                blanket.extend(dag.parents_of(c).iter().filter(|&&p| p != x));
            }
            blanket.sort_unstable();
            blanket.dedup();
            let expected: Vec<String> = blanket.iter().map(|&i| vars[i].clone()).collect();
            let got = gs_markov_boundary(&oracle, &vars, &vars[x]).unwrap();
            assert_eq!(got, expected, "vertex {x} of {}", dag.to_text());
        }
    }
}
