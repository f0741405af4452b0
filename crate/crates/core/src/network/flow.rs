use std::collections::VecDeque;

/// Unit-capacity max-flow by BFS augmenting paths.
pub(crate) fn max_flow(num_nodes: usize, edges: &[(usize, usize)], s: usize, t: usize) -> usize {
    // arc 2k is edge k, arc 2k+1 its reverse
    let mut head = Vec::with_capacity(edges.len() * 2);
    let mut cap = Vec::with_capacity(edges.len() * 2);
    let mut adj = vec![Vec::new(); num_nodes];
    for &(u, v) in edges {
        adj[u].push(head.len());
        head.push(v);
        cap.push(1u32);
        adj[v].push(head.len());
        head.push(u);
        cap.push(0u32);
    }

    let mut flow = 0;
    loop {
        let mut via = vec![usize::MAX; num_nodes];
        let mut seen = vec![false; num_nodes];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if u == t {
                break;
            }
            for &a in &adj[u] {
                let v = head[a];
                if cap[a] > 0 && !seen[v] {
                    seen[v] = true;
                    via[v] = a;
                    queue.push_back(v);
                }
            }
        }
        if !seen[t] {
            return flow;
        }
        let mut v = t;
        while v != s {
            let a = via[v];
            cap[a] -= 1;
            cap[a ^ 1] += 1;
            v = head[a ^ 1];
        }
        flow += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_flows() {
        assert_eq!(max_flow(2, &[(0, 1), (0, 1), (0, 1)], 0, 1), 3);
        assert_eq!(max_flow(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3), 2);
        assert_eq!(max_flow(3, &[(0, 1), (0, 1), (1, 2)], 0, 2), 1);
        assert_eq!(max_flow(3, &[(1, 2)], 0, 2), 0);
    }

    #[test]
    fn needs_reverse_arcs() {
        // butterfly-like: greedy path through the cross edge blocks a second path
        let edges = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (3, 5), (4, 5)];
        assert_eq!(max_flow(6, &edges, 0, 5), 2);
    }
}
