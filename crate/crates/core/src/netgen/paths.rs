//! Hop-count shortest paths on the switch graph.
//!
//! Paths are switch index sequences. Ties are broken lexicographically,
//! so every function here is deterministic.

use std::collections::{BTreeSet, VecDeque};

/// Hop distance from every node to `target` (`None` if unreachable),
/// ignoring `banned` nodes and `banned_edges`.
fn distances_to(
    adj: &[Vec<usize>],
    target: usize,
    banned: &[bool],
    banned_edges: &BTreeSet<(usize, usize)>,
) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    if banned[target] {
        return dist;
    }
    dist[target] = Some(0);
    let mut queue = VecDeque::from([target]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued nodes have a distance");
        // Edges are undirected in the switch graph, so predecessors of v
        // are its neighbours.
        for &u in &adj[v] {
            if dist[u].is_none() && !banned[u] && !banned_edges.contains(&(u, v)) {
                dist[u] = Some(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Hop distances from all nodes to `target`.
pub fn hop_distances(adj: &[Vec<usize>], target: usize) -> Vec<Option<usize>> {
    distances_to(adj, target, &vec![false; adj.len()], &BTreeSet::new())
}

/// Neighbours of `from` that lie on some shortest path to `target`, in
/// ascending order.
pub fn shortest_next_hops(adj: &[Vec<usize>], dist: &[Option<usize>], from: usize) -> Vec<usize> {
    let Some(d) = dist[from] else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let mut hops: Vec<usize> = adj[from]
        .iter()
        .copied()
        .filter(|&n| dist[n] == Some(d - 1))
        .collect();
    hops.sort_unstable();
    hops
}

fn smallest_shortest_path(
    adj: &[Vec<usize>],
    from: usize,
    to: usize,
    banned: &[bool],
    banned_edges: &BTreeSet<(usize, usize)>,
) -> Option<Vec<usize>> {
    let dist = distances_to(adj, to, banned, banned_edges);
    dist[from]?;
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        let d = dist[cur].expect("on a shortest path");
        cur = adj[cur]
            .iter()
            .copied()
            .filter(|&n| dist[n] == Some(d - 1) && !banned_edges.contains(&(cur, n)))
            .min()
            .expect("a shortest path continues");
        path.push(cur);
    }
    Some(path)
}

/// Lexicographically smallest among the shortest paths.
pub fn shortest_path(adj: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<usize>> {
    smallest_shortest_path(adj, from, to, &vec![false; adj.len()], &BTreeSet::new())
}

/// Yen's algorithm: up to `k` loopless paths from `from` to `to`, ordered
/// by (hop count, lexicographic switch sequence). Fewer are returned when
/// fewer exist.
pub fn k_shortest_paths(adj: &[Vec<usize>], from: usize, to: usize, k: usize) -> Vec<Vec<usize>> {
    let mut found: Vec<Vec<usize>> = Vec::new();
    if k == 0 {
        return found;
    }
    let Some(first) = shortest_path(adj, from, to) else {
        return found;
    };
    found.push(first);
    let mut candidates: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    while found.len() < k {
        let last = found.last().expect("nonempty").clone();
        for i in 0..last.len() - 1 {
            let spur = last[i];
            let root = &last[..=i];
            let mut banned_edges = BTreeSet::new();
            for p in &found {
                if p.len() > i && p[..=i] == *root {
                    banned_edges.insert((p[i], p[i + 1]));
                }
            }
            let mut banned = vec![false; adj.len()];
            for &r in &root[..i] {
                banned[r] = true;
            }
            if let Some(tail) = smallest_shortest_path(adj, spur, to, &banned, &banned_edges) {
                let mut path = root[..i].to_vec();
                path.extend(tail);
                if !found.contains(&path) {
                    candidates.insert((path.len(), path));
                }
            }
        }
        match candidates.pop_first() {
            Some((_, p)) => found.push(p),
            None => break,
        }
    }
    found
}
