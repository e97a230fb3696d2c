//! Shared helpers for the integration suites: exhaustive DAG enumeration,
//! a literal path-enumeration d-separation oracle, random DAGs, and
//! Kolmogorov-Smirnov statistics.

#![allow(dead_code)]

use rand::Rng;
use vmci::graph::Dag;

/// Every labeled DAG on m vertices (each unordered pair is absent, forward,
/// or backward; cyclic candidates are discarded).
pub fn all_dags(m: usize) -> Vec<Dag> {
    let names: Vec<String> = (0..m).map(|i| format!("v{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    let total = 3usize.pow(pairs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut edges = Vec::new();
        for &(a, b) in &pairs {
            match c % 3 {
                1 => edges.push((a, b)),
                2 => edges.push((b, a)),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(dag) = Dag::new_indexed(names.clone(), &edges) {
            out.push(dag);
        }
    }
    out
}

/// A random DAG: uniform permutation defines the topological order, then
/// each forward pair becomes an edge with probability `edge_prob`.
pub fn random_dag<R: Rng>(m: usize, edge_prob: f64, rng: &mut R) -> Dag {
    let names: Vec<String> = (0..m).map(|i| format!("v{i}")).collect();
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut edges = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if rng.gen::<f64>() < edge_prob {
                edges.push((order[i], order[j]));
            }
        }
    }
    Dag::new_indexed(names, &edges).expect("ordered construction cannot cycle")
}

/// d-separation by brute force: enumerate every simple path in the
/// skeleton and apply the blocking rules literally. A non-collider blocks
/// when conditioned on; a collider blocks unless it or one of its
/// descendants is conditioned on.
pub fn brute_force_d_separated(dag: &Dag, x: usize, y: usize, z: &[usize]) -> bool {
    let m = dag.n();
    let in_z = {
        let mut v = vec![false; m];
        for &s in z {
            v[s] = true;
        }
        v
    };
    // descendants (including self) per vertex
    let mut desc_in_z = vec![false; m];
    for v in 0..m {
        let mut stack = vec![v];
        let mut seen = vec![false; m];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            if in_z[u] {
                desc_in_z[v] = true;
                break;
            }
            for &c in dag.children_of(u) {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
    }

    fn path_active(dag: &Dag, path: &[usize], in_z: &[bool], desc_in_z: &[bool]) -> bool {
        for w in path.windows(3) {
            let (prev, v, next) = (w[0], w[1], w[2]);
            let collider = dag.has_edge(prev, v) && dag.has_edge(next, v);
            if collider {
                if !desc_in_z[v] {
                    return false;
                }
            } else if in_z[v] {
                return false;
            }
        }
        true
    }

    // DFS over all simple skeleton paths from x to y
    let mut stack = vec![vec![x]];
    while let Some(path) = stack.pop() {
        let last = *path.last().unwrap();
        if last == y {
            if path_active(dag, &path, &in_z, &desc_in_z) {
                return false;
            }
            continue;
        }
        for next in 0..m {
            if dag.adjacent(last, next) && !path.contains(&next) {
                let mut p = path.clone();
                p.push(next);
                stack.push(p);
            }
        }
    }
    true
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
pub fn ks_one_sample(data: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    data.sort_by(|a, b| a.total_cmp(b));
    let n = data.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in data.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let xa = a[i];
        let xb = b[j];
        if xa <= xb {
            i += 1;
        }
        if xb <= xa {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    d
}

/// Asymptotic critical value of the KS statistic at significance alpha:
/// c(alpha) * scale with c = sqrt(-ln(alpha/2) / 2).
pub fn ks_critical(alpha: f64, n_effective: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / n_effective.sqrt()
}
