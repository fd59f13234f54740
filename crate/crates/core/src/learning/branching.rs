//! Maximum-weight branching (Chu–Liu/Edmonds).
//!
//! A branching is a forest of in-trees: every node has at most one parent and
//! there are no cycles. Only edges with positive weight can be used, so the
//! optimum may leave nodes without a parent.

/// `weights[j][i]` is the gain of the edge `j -> i` (`None` or non-positive
/// means unusable). Returns each node's parent in a branching of maximum total
/// weight. Ties go to lower source indices.
pub fn max_weight_branching(weights: &[Vec<Option<f64>>]) -> Vec<Option<usize>> {
    let n = weights.len();
    let root = n;
    let mut edges = Vec::new();
    for i in 0..n {
        for (j, row) in weights.iter().enumerate() {
            if j == i {
                continue;
            }
            if let Some(w) = row[i] {
                if w > 0.0 {
                    edges.push(Edge {
                        from: j,
                        to: i,
                        weight: w,
                    });
                }
            }
        }
        edges.push(Edge {
            from: root,
            to: i,
            weight: 0.0,
        });
    }
    let chosen = arborescence(n + 1, root, &edges);
    let mut parent = vec![None; n];
    for e in chosen {
        let e = &edges[e];
        if e.from != root {
            parent[e.to] = Some(e.from);
        }
    }
    parent
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    from: usize,
    to: usize,
    weight: f64,
}

/// Maximum spanning arborescence rooted at `root`; every node must be
/// reachable. Returns indices into `edges`.
fn arborescence(num_nodes: usize, root: usize, edges: &[Edge]) -> Vec<usize> {
    // best incoming edge per node; the first listed wins ties
    let mut best_in: Vec<Option<usize>> = vec![None; num_nodes];
    for (k, e) in edges.iter().enumerate() {
        if e.to == root || e.from == e.to {
            continue;
        }
        match best_in[e.to] {
            Some(b) if edges[b].weight >= e.weight => {}
            _ => best_in[e.to] = Some(k),
        }
    }

    // find cycles formed by the best incoming edges
    let mut cycle_id = vec![usize::MAX; num_nodes];
    let mut visited = vec![usize::MAX; num_nodes];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for start in 0..num_nodes {
        let mut v = start;
        while v != root && visited[v] == usize::MAX && cycle_id[v] == usize::MAX {
            visited[v] = start;
            v = edges[best_in[v].expect("reachable")].from;
        }
        if v != root && visited[v] == start && cycle_id[v] == usize::MAX {
            let mut cycle = vec![v];
            cycle_id[v] = cycles.len();
            let mut u = edges[best_in[v].unwrap()].from;
            while u != v {
                cycle_id[u] = cycles.len();
                cycle.push(u);
                u = edges[best_in[u].unwrap()].from;
            }
            cycles.push(cycle);
        }
    }
    if cycles.is_empty() {
        return best_in.into_iter().flatten().collect();
    }

    // contract each cycle into a single node
    let mut new_id = vec![0; num_nodes];
    let mut next = cycles.len();
    for v in 0..num_nodes {
        new_id[v] = if cycle_id[v] != usize::MAX {
            cycle_id[v]
        } else {
            next += 1;
            next - 1
        };
    }
    let mut contracted = Vec::new();
    let mut origin = Vec::new();
    for (k, e) in edges.iter().enumerate() {
        let (u, v) = (new_id[e.from], new_id[e.to]);
        if u == v {
            continue;
        }
        let weight = if cycle_id[e.to] != usize::MAX {
            e.weight - edges[best_in[e.to].unwrap()].weight
        } else {
            e.weight
        };
        contracted.push(Edge { from: u, to: v, weight });
        origin.push(k);
    }
    let inner = arborescence(next, new_id[root], &contracted);

    // expand: keep every cycle edge except the one displaced by the entering edge
    let mut chosen: Vec<usize> = inner.iter().map(|&k| origin[k]).collect();
    let mut entered = vec![false; num_nodes];
    for &k in &chosen {
        entered[edges[k].to] = true;
    }
    for cycle in &cycles {
        for &v in cycle {
            if !entered[v] {
                chosen.push(best_in[v].unwrap());
            }
        }
    }
    chosen
}
