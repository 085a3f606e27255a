//! Elementary circuit enumeration (Johnson, 1975).
//!
//! Graphs are given as adjacency lists over dense node indices `0..n`.

use std::ops::ControlFlow;

/// Visit every elementary circuit of a directed graph.
///
/// Each circuit is reported once, as a node sequence starting at its
/// smallest node. The visitor may stop the enumeration early by returning
/// `ControlFlow::Break`.
pub fn visit_elementary_circuits<B>(
    adj: &[Vec<usize>],
    mut visit: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Option<B> {
    let n = adj.len();
    let mut search = Search {
        adj,
        blocked: vec![false; n],
        block_map: vec![Vec::new(); n],
        stack: Vec::new(),
        allowed: vec![false; n],
    };
    for start in 0..n {
        // restrict to the strongly connected component of `start` among nodes >= start
        let component = scc_containing(adj, start);
        if component.len() < 2 && !adj[start].contains(&start) {
            continue;
        }
        search.allowed.iter_mut().for_each(|a| *a = false);
        for &v in &component {
            search.allowed[v] = true;
            search.blocked[v] = false;
            search.block_map[v].clear();
        }
        if let ControlFlow::Break(b) = search.circuit(start, start, &mut visit) {
            return Some(b);
        }
    }
    None
}

/// Collect all elementary circuits of a directed graph.
pub fn elementary_circuits(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    visit_elementary_circuits::<()>(adj, |c| {
        out.push(c.to_vec());
        ControlFlow::Continue(())
    });
    out
}

/// Simple cycles (length >= 3) of an undirected graph, each reported once.
///
/// Runs the directed enumeration on the symmetric graph and keeps one of the
/// two orientations. Returns `None` when more than `limit` cycles exist.
pub fn undirected_simple_cycles(adj: &[Vec<usize>], limit: usize) -> Option<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let overflow = visit_elementary_circuits(adj, |c| {
        if c.len() >= 3 && c[1] < c[c.len() - 1] {
            if out.len() == limit {
                return ControlFlow::Break(());
            }
            out.push(c.to_vec());
        }
        ControlFlow::Continue(())
    });
    match overflow {
        Some(()) => None,
        None => Some(out),
    }
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    blocked: Vec<bool>,
    block_map: Vec<Vec<usize>>,
    stack: Vec<usize>,
    allowed: Vec<bool>,
}

impl Search<'_> {
    fn circuit<B>(
        &mut self,
        v: usize,
        start: usize,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>,
    ) -> ControlFlow<B, bool> {
        let adj = self.adj;
        let mut found = false;
        self.stack.push(v);
        self.blocked[v] = true;
        for &w in &adj[v] {
            if !self.allowed[w] {
                continue;
            }
            if w == start {
                if let ControlFlow::Break(b) = visit(&self.stack) {
                    return ControlFlow::Break(b);
                }
                found = true;
            } else if !self.blocked[w] && self.circuit(w, start, visit)? {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in &adj[v] {
                if self.allowed[w] && !self.block_map[w].contains(&v) {
                    self.block_map[w].push(v);
                }
            }
        }
        self.stack.pop();
        ControlFlow::Continue(found)
    }

    fn unblock(&mut self, v: usize) {
        let mut pending = vec![v];
        while let Some(u) = pending.pop() {
            if !self.blocked[u] {
                continue;
            }
            self.blocked[u] = false;
            pending.append(&mut self.block_map[u]);
        }
    }
}

/// Nodes in the strongly connected component of `start` within the subgraph
/// induced by nodes `>= start` (Tarjan, iterative).
fn scc_containing(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    // (node, next edge position)
    let mut frames = vec![(start, 0usize)];
    index[start] = next;
    low[start] = next;
    next += 1;
    stack.push(start);
    on_stack[start] = true;
    while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
        if let Some(&w) = adj[v].get(*pos) {
            *pos += 1;
            if w < start {
                continue;
            }
            if index[w] == usize::MAX {
                index[w] = next;
                low[w] = next;
                next += 1;
                stack.push(w);
                on_stack[w] = true;
                frames.push((w, 0));
            } else if on_stack[w] {
                low[v] = low[v].min(index[w]);
            }
        } else {
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                if comp.contains(&start) {
                    comp.sort_unstable();
                    return comp;
                }
            }
        }
    }
    vec![start]
}
