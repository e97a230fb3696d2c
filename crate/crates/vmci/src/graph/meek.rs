//! v-structure detection, the four Meek orientation rules, and essential
//! graph construction.

use super::{Dag, Pdag};

impl Dag {
    /// All colliders a -> c <- b with a and b non-adjacent, as (a, c, b)
    /// triples with a before b in vertex order.
    pub fn v_structures(&self) -> Vec<(String, String, String)> {
        self.v_structures_idx()
            .into_iter()
            .map(|(a, c, b)| {
                (
                    self.vertex_names()[a].clone(),
                    self.vertex_names()[c].clone(),
                    self.vertex_names()[b].clone(),
                )
            })
            .collect()
    }

    pub(crate) fn v_structures_idx(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for c in 0..self.n() {
            let pa = self.parents_of(c);
            for (i, &a) in pa.iter().enumerate() {
                for &b in &pa[i + 1..] {
                    if !self.adjacent(a, b) {
                        out.push((a, c, b));
                    }
                }
            }
        }
        out
    }

    /// The essential graph: skeleton plus v-structure orientations, closed
    /// under the Meek rules. Represents the Markov equivalence class.
    pub fn essential_graph(&self) -> Pdag {
        let mut p = self.skeleton();
        for (a, c, b) in self.v_structures_idx() {
            p.orient(a, c);
            p.orient(b, c);
        }
        meek_closure(&p)
    }
}

/// Apply the four Meek rules until fixpoint. Only converts undirected edges
/// to directed ones; adjacencies are never added or removed. Rules are
/// applied in a fixed round-robin (R1, R2, R3, R4); the fixpoint does not
/// depend on the order but determinism aids debugging.
pub fn meek_closure(p: &Pdag) -> Pdag {
    let mut g = p.clone();
    loop {
        let mut changed = false;
        changed |= apply_rule(&mut g, rule1);
        changed |= apply_rule(&mut g, rule2);
        changed |= apply_rule(&mut g, rule3);
        changed |= apply_rule(&mut g, rule4);
        if !changed {
            break;
        }
    }
    g
}

/// Scan every undirected edge in both directions and orient a -> b when the
/// rule fires. Returns whether anything changed.
fn apply_rule(g: &mut Pdag, rule: fn(&Pdag, usize, usize) -> bool) -> bool {
    let mut changed = false;
    let snapshot: Vec<(usize, usize)> = g.undirected_edges().collect();
    for (u, v) in snapshot {
        if !g.has_undirected(u, v) {
            continue; // oriented earlier in this scan
        }
        if rule(g, u, v) {
            g.orient(u, v);
            changed = true;
        } else if rule(g, v, u) {
            g.orient(v, u);
            changed = true;
        }
    }
    changed
}

/// R1: orient a -- b as a -> b when some c -> a exists with c, b non-adjacent.
fn rule1(g: &Pdag, a: usize, b: usize) -> bool {
    (0..g.n()).any(|c| g.has_directed(c, a) && c != b && !g.adjacent(c, b))
}

/// R2: orient a -- b as a -> b when a chain a -> c -> b exists.
fn rule2(g: &Pdag, a: usize, b: usize) -> bool {
    (0..g.n()).any(|c| g.has_directed(a, c) && g.has_directed(c, b))
}

/// R3: orient a -- b as a -> b when two chains a -- c -> b and a -- d -> b
/// exist with c, d non-adjacent.
fn rule3(g: &Pdag, a: usize, b: usize) -> bool {
    let candidates: Vec<usize> = (0..g.n())
        .filter(|&c| g.has_undirected(a, c) && g.has_directed(c, b))
        .collect();
    for (i, &c) in candidates.iter().enumerate() {
        for &d in &candidates[i + 1..] {
            if !g.adjacent(c, d) {
                return true;
            }
        }
    }
    false
}

/// R4: orient a -- b as a -> b when chains a -- c and c -> d -> b exist
/// with c, b non-adjacent.
fn rule4(g: &Pdag, a: usize, b: usize) -> bool {
    for c in 0..g.n() {
        if c == b || !g.has_undirected(a, c) || g.adjacent(c, b) {
            continue;
        }
        for d in 0..g.n() {
            if g.has_directed(c, d) && g.has_directed(d, b) {
                return true;
            }
        }
    }
    false
}
