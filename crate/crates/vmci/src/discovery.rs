//! Constraint-based structure learning: the PC algorithm (level-wise edge
//! deletion, v-structure orientation, Meek closure) and the grow-shrink
//! algorithm (Markov boundaries, edge resolution, collider orientation,
//! Meek closure), both parameterized by any CI tester.
//!
//! Iteration order follows the caller's variable order everywhere and
//! subsets are enumerated smallest-first in lexicographic index order, so
//! runs are reproducible even under imperfect testers.

use std::collections::{BTreeMap, BTreeSet};

use log::{debug, warn};

use crate::citest::CiTester;
use crate::error::{Error, Result};
use crate::graph::{meek_closure, Pdag};

/// The witnessing separating set for each non-adjacent pair removed during
/// skeleton search.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SepsetMap {
    map: BTreeMap<(String, String), Vec<String>>,
}

impl SepsetMap {
    fn key(x: &str, y: &str) -> (String, String) {
        if x <= y {
            (x.to_string(), y.to_string())
        } else {
            (y.to_string(), x.to_string())
        }
    }

    fn insert(&mut self, x: &str, y: &str, z: Vec<String>) {
        self.map.insert(Self::key(x, y), z);
    }

    pub fn get(&self, x: &str, y: &str) -> Option<&[String]> {
        self.map.get(&Self::key(x, y)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &Vec<String>)> {
        self.map.iter()
    }
}

/// Output of one discovery run.
#[derive(Debug, Clone)]
pub struct DiscoveryResult {
    pub graph: Pdag,
    pub sepsets: SepsetMap,
    /// Number of tester invocations actually made.
    pub ci_test_count: usize,
    pub tester_name: String,
}

/// Enumerate k-subsets of `items` in lexicographic index order, calling
/// `visit` for each until it says stop.
fn for_each_subset<F>(items: &[usize], k: usize, mut visit: F) -> Result<bool>
where
    F: FnMut(&[usize]) -> Result<bool>,
{
    if k > items.len() {
        return Ok(false);
    }
    if k == 0 {
        return visit(&[]);
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let subset: Vec<usize> = idx.iter().map(|&i| items[i]).collect();
        if visit(&subset)? {
            return Ok(true);
        }
        // advance the combination
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(false);
            }
            i -= 1;
            if idx[i] != i + items.len() - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn check_distinct(vars: &[String]) -> Result<()> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(Error::DuplicateName(v.clone()));
        }
    }
    Ok(())
}

fn run_test(
    tester: &dyn CiTester,
    count: &mut usize,
    x: &str,
    y: &str,
    z: &[&str],
) -> Result<bool> {
    *count += 1;
    let decision = tester.test(x, y, z).map_err(|e| Error::CiTest {
        x: x.to_string(),
        y: y.to_string(),
        z: z.join(","),
        source: Box::new(e),
    })?;
    Ok(decision.independent)
}

/// The PC algorithm. Starts from the complete undirected graph; at level l
/// tests each ordered adjacent pair (X, Y) with |N(X) \ {Y}| >= l against
/// every size-l subset of N(X) \ {Y}, removing the edge on the first
/// independence and recording the witness. Orients v-structures from the
/// sepsets and closes under the Meek rules.
pub fn pc(tester: &dyn CiTester, vars: &[String], delta_max: usize) -> Result<DiscoveryResult> {
    check_distinct(vars)?;
    let m = vars.len();
    let mut adj: Vec<BTreeSet<usize>> = (0..m)
        .map(|x| (0..m).filter(|&y| y != x).collect())
        .collect();
    let mut sepsets = SepsetMap::default();
    let mut count = 0usize;

    for level in 0..=delta_max {
        let before = count;
        for x in 0..m {
            let targets: Vec<usize> = adj[x].iter().copied().collect();
            for y in targets {
                if !adj[x].contains(&y) {
                    continue;
                }
                let candidates: Vec<usize> = adj[x].iter().copied().filter(|&v| v != y).collect();
                if candidates.len() < level {
                    continue;
                }
                let mut separated: Option<Vec<usize>> = None;
                for_each_subset(&candidates, level, |subset| {
                    let z_names: Vec<&str> = subset.iter().map(|&i| vars[i].as_str()).collect();
                    if run_test(tester, &mut count, &vars[x], &vars[y], &z_names)? {
                        separated = Some(subset.to_vec());
                        return Ok(true);
                    }
                    Ok(false)
                })?;
                if let Some(zs) = separated {
                    adj[x].remove(&y);
                    adj[y].remove(&x);
                    sepsets.insert(
                        &vars[x],
                        &vars[y],
                        zs.iter().map(|&i| vars[i].clone()).collect(),
                    );
                }
            }
        }
        debug!("pc level {level}: {} tests", count - before);
    }
    debug_assert!(
        count as u128 <= pc_test_count_bound(m, delta_max),
        "skeleton phase exceeded the structural test-count bound"
    );

    // v-structures: an unshielded triple x - c - y becomes x -> c <- y iff
    // c is not in the recorded separating set of (x, y).
    let mut skeleton_edges = Vec::new();
    for (x, nbrs) in adj.iter().enumerate() {
        for &y in nbrs.iter().filter(|&&y| y > x) {
            skeleton_edges.push((x, y));
        }
    }
    let mut pdag = Pdag::new_indexed(vars.to_vec(), &[], &skeleton_edges)?;
    let mut claims: BTreeSet<(usize, usize)> = BTreeSet::new();
    for c in 0..m {
        let nbrs: Vec<usize> = adj[c].iter().copied().collect();
        for (i, &x) in nbrs.iter().enumerate() {
            for &y in &nbrs[i + 1..] {
                if adj[x].contains(&y) {
                    continue;
                }
                if let Some(sep) = sepsets.get(&vars[x], &vars[y]) {
                    if !sep.contains(&vars[c]) {
                        claims.insert((x, c));
                        claims.insert((y, c));
                    }
                }
            }
        }
    }
    apply_orientations(&mut pdag, &claims, vars);
    let graph = meek_closure(&pdag);

    Ok(DiscoveryResult {
        graph,
        sepsets,
        ci_test_count: count,
        tester_name: tester.name().to_string(),
    })
}

/// Orient claimed edges, leaving any edge claimed in both directions
/// undirected with a warning.
fn apply_orientations(pdag: &mut Pdag, claims: &BTreeSet<(usize, usize)>, vars: &[String]) {
    for &(a, b) in claims {
        if claims.contains(&(b, a)) {
            if a < b {
                warn!(
                    "conflicting orientations for {} -- {}; leaving undirected",
                    vars[a], vars[b]
                );
            }
            continue;
        }
        pdag.orient(a, b);
    }
}

/// The Markov boundary of `x` by grow-shrink: add candidates that test
/// dependent given the current boundary until a full pass adds nothing,
/// then remove members that test independent given the rest until stable.
pub fn gs_markov_boundary(tester: &dyn CiTester, vars: &[String], x: &str) -> Result<Vec<String>> {
    check_distinct(vars)?;
    let mut count = 0usize;
    let mb = markov_boundary_idx(
        tester,
        vars,
        vars.iter()
            .position(|v| v == x)
            .ok_or_else(|| Error::UnknownVertex(x.to_string()))?,
        &mut count,
    )?;
    Ok(mb.into_iter().map(|i| vars[i].clone()).collect())
}

fn markov_boundary_idx(
    tester: &dyn CiTester,
    vars: &[String],
    x: usize,
    count: &mut usize,
) -> Result<BTreeSet<usize>> {
    let m = vars.len();
    let mut mb: BTreeSet<usize> = BTreeSet::new();
    // growing phase
    loop {
        let mut added = false;
        for y in (0..m).filter(|&y| y != x) {
            if mb.contains(&y) {
                continue;
            }
            let z_names: Vec<&str> = mb.iter().map(|&i| vars[i].as_str()).collect();
            if !run_test(tester, count, &vars[x], &vars[y], &z_names)? {
                mb.insert(y);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    // shrinking phase
    loop {
        let mut removed = false;
        for y in mb.clone() {
            let rest: Vec<&str> = mb
                .iter()
                .filter(|&&v| v != y)
                .map(|&i| vars[i].as_str())
                .collect();
            if run_test(tester, count, &vars[x], &vars[y], &rest)? {
                mb.remove(&y);
                removed = true;
            }
        }
        if !removed {
            break;
        }
    }
    Ok(mb)
}

/// The grow-shrink algorithm: Markov boundaries for every variable,
/// symmetry repair, edge resolution by exhaustive conditioning inside the
/// smaller boundary, collider orientation, and Meek closure.
pub fn gs(tester: &dyn CiTester, vars: &[String]) -> Result<DiscoveryResult> {
    check_distinct(vars)?;
    let m = vars.len();
    let mut count = 0usize;
    let mut mb: Vec<BTreeSet<usize>> = Vec::with_capacity(m);
    for x in 0..m {
        mb.push(markov_boundary_idx(tester, vars, x, &mut count)?);
    }
    debug!("gs: markov boundaries took {count} tests");

    // Symmetry repair: keep a candidate pair only when each member lies in
    // the other's boundary. Asymmetric memberships arise from test errors.
    let mut candidate_pairs: Vec<(usize, usize)> = Vec::new();
    for x in 0..m {
        for &y in mb[x].iter().filter(|&&y| y > x) {
            if mb[y].contains(&x) {
                candidate_pairs.push((x, y));
            } else {
                warn!(
                    "asymmetric Markov boundaries for {} / {}; dropping the pair",
                    vars[x], vars[y]
                );
            }
        }
        for &y in mb[x].iter().filter(|&&y| y < x) {
            if !mb[y].contains(&x) {
                warn!(
                    "asymmetric Markov boundaries for {} / {}; dropping the pair",
                    vars[y], vars[x]
                );
            }
        }
    }

    // Step 3: an edge {x, y} is kept iff x and y stay dependent given every
    // subset of the smaller reduced boundary.
    let mut pdag = Pdag::new_indexed(vars.to_vec(), &[], &[])?;
    for &(x, y) in &candidate_pairs {
        let tx: Vec<usize> = mb[x].iter().copied().filter(|&v| v != y).collect();
        let ty: Vec<usize> = mb[y].iter().copied().filter(|&v| v != x).collect();
        let t = if tx.len() <= ty.len() { &tx } else { &ty };
        let mut separated = false;
        for k in 0..=t.len() {
            for_each_subset(t, k, |subset| {
                let z_names: Vec<&str> = subset.iter().map(|&i| vars[i].as_str()).collect();
                if run_test(tester, &mut count, &vars[x], &vars[y], &z_names)? {
                    separated = true;
                    return Ok(true);
                }
                Ok(false)
            })?;
            if separated {
                break;
            }
        }
        if !separated {
            pdag.add_undirected(x, y);
        }
    }

    // Step 4: orient y -> x when some z in N(x) \ (N(y) u {y}) stays
    // dependent on y given every subset of the smaller boundary, always
    // conditioning on x as well.
    let neighbors: Vec<Vec<usize>> = (0..m).map(|v| pdag.neighbors(v)).collect();
    let mut claims: BTreeSet<(usize, usize)> = BTreeSet::new();
    let edges: Vec<(usize, usize)> = pdag.undirected_edges().collect();
    for &(a, b) in &edges {
        for (x, y) in [(a, b), (b, a)] {
            // testing whether y -> x
            let mut oriented = false;
            for &z in &neighbors[x] {
                if z == y || neighbors[y].contains(&z) {
                    continue;
                }
                let wy: Vec<usize> = mb[y]
                    .iter()
                    .copied()
                    .filter(|&v| v != x && v != z)
                    .collect();
                let wz: Vec<usize> = mb[z]
                    .iter()
                    .copied()
                    .filter(|&v| v != x && v != y)
                    .collect();
                let w = if wy.len() <= wz.len() { &wy } else { &wz };
                let mut all_dependent = true;
                'subsets: for k in 0..=w.len() {
                    for_each_subset(w, k, |subset| {
                        let mut z_names: Vec<&str> =
                            subset.iter().map(|&i| vars[i].as_str()).collect();
                        z_names.push(vars[x].as_str());
                        if run_test(tester, &mut count, &vars[y], &vars[z], &z_names)? {
                            all_dependent = false;
                            return Ok(true);
                        }
                        Ok(false)
                    })?;
                    if !all_dependent {
                        break 'subsets;
                    }
                }
                if all_dependent {
                    oriented = true;
                    break;
                }
            }
            if oriented {
                claims.insert((y, x));
            }
        }
    }
    apply_orientations(&mut pdag, &claims, vars);
    let graph = meek_closure(&pdag);

    Ok(DiscoveryResult {
        graph,
        sepsets: SepsetMap::default(),
        ci_test_count: count,
        tester_name: tester.name().to_string(),
    })
}

/// Worst-case CI test count of PC: 2 C(m,2) sum_{i=0}^{delta} C(m-1, i).
pub fn pc_test_count_bound(m: usize, delta_max: usize) -> u128 {
    fn binom(n: usize, k: usize) -> u128 {
        if k > n {
            return 0;
        }
        let mut r: u128 = 1;
        for i in 0..k.min(n - k) {
            r = r * (n - i) as u128 / (i + 1) as u128;
        }
        r
    }
    let pairs = binom(m, 2);
    let sum: u128 = (0..=delta_max).map(|i| binom(m - 1, i)).sum();
    2 * pairs * sum
}
