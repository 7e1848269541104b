//! Small directed-graph toolkit over dense node indices: reachability with
//! shortest-path parents, strongly connected components and cycle extraction.
//!
//! Every structure in the crate (model, observers, products, twin plant) is
//! lowered to a [`Digraph`] for its cycle and reachability questions.

use std::collections::VecDeque;

/// Labeled adjacency lists. Successors keep insertion order, which callers
/// make canonical so that searches are deterministic.
#[derive(Clone, Debug)]
pub struct Digraph<L> {
    succ: Vec<Vec<(L, usize)>>,
}

impl<L: Clone> Digraph<L> {
    pub fn new(nodes: usize) -> Self {
        Self {
            succ: vec![Vec::new(); nodes],
        }
    }

    pub fn from_adjacency(succ: Vec<Vec<(L, usize)>>) -> Self {
        Self { succ }
    }

    pub fn add_edge(&mut self, from: usize, label: L, to: usize) {
        self.succ[from].push((label, to));
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successors(&self, v: usize) -> &[(L, usize)] {
        &self.succ[v]
    }

    /// Breadth-first search from `roots`; the result answers shortest-path
    /// queries back to the nearest root.
    pub fn bfs(&self, roots: impl IntoIterator<Item = usize>) -> Bfs<L> {
        self.bfs_filtered(roots, |_, _, _| true)
    }

    /// Breadth-first search that only follows edges accepted by `keep`.
    pub fn bfs_filtered(
        &self,
        roots: impl IntoIterator<Item = usize>,
        mut keep: impl FnMut(usize, &L, usize) -> bool,
    ) -> Bfs<L> {
        let mut parent: Vec<Option<Parent<L>>> = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for r in roots {
            if parent[r].is_none() {
                parent[r] = Some(Parent::Root);
                queue.push_back(r);
            }
        }
        while let Some(v) = queue.pop_front() {
            for (label, w) in &self.succ[v] {
                if parent[*w].is_none() && keep(v, label, *w) {
                    parent[*w] = Some(Parent::Edge(v, label.clone()));
                    queue.push_back(*w);
                }
            }
        }
        Bfs { parent }
    }

    /// Strongly connected components (iterative Tarjan).
    pub fn scc(&self) -> Scc {
        self.scc_filtered(|_| true)
    }

    /// Components of the subgraph induced by the nodes accepted by `keep`.
    /// Rejected nodes get no component.
    pub fn scc_filtered(&self, keep: impl Fn(usize) -> bool) -> Scc {
        const UNSEEN: usize = usize::MAX;
        let n = self.len();
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![None; n];
        let mut next_index = 0;
        let mut count = 0;
        // (node, position in its successor list)
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in 0..n {
            if index[root] != UNSEEN || !keep(root) {
                continue;
            }
            call.push((root, 0));
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if *pos < self.succ[v].len() {
                    let w = self.succ[v][*pos].1;
                    *pos += 1;
                    if !keep(w) {
                        continue;
                    }
                    if index[w] == UNSEEN {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(u, _)) = call.last() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp[w] = Some(count);
                            if w == v {
                                break;
                            }
                        }
                        count += 1;
                    }
                }
            }
        }

        let mut size = vec![0; count];
        for c in comp.iter().flatten() {
            size[*c] += 1;
        }
        let mut self_loop = vec![false; n];
        for v in 0..n {
            if comp[v].is_some() && self.succ[v].iter().any(|(_, w)| *w == v) {
                self_loop[v] = true;
            }
        }
        let cyclic = (0..n)
            .map(|v| comp[v].is_some_and(|c| size[c] > 1 || self_loop[v]))
            .collect();
        Scc {
            comp,
            cyclic,
            count,
        }
    }

    /// Shortest closed walk `v -> ... -> v` of length ≥ 1 whose nodes all
    /// satisfy `keep`. Returns the node sequence (starting and ending at `v`)
    /// and the edge labels.
    pub fn shortest_cycle_through(
        &self,
        v: usize,
        keep: impl Fn(usize) -> bool,
    ) -> Option<(Vec<usize>, Vec<L>)> {
        // BFS from v, stopping at the first edge that closes back into v.
        let mut parent: Vec<Option<(usize, L)>> = vec![None; self.len()];
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for (label, w) in &self.succ[u] {
                if *w == v {
                    let mut nodes = vec![v, u];
                    let mut labels = vec![label.clone()];
                    let mut cur = u;
                    while cur != v {
                        let (p, l) = parent[cur].clone().expect("parent recorded");
                        labels.push(l);
                        nodes.push(p);
                        cur = p;
                    }
                    nodes.reverse();
                    labels.reverse();
                    return Some((nodes, labels));
                }
                if keep(*w) && parent[*w].is_none() {
                    parent[*w] = Some((u, label.clone()));
                    queue.push_back(*w);
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug)]
enum Parent<L> {
    Root,
    Edge(usize, L),
}

/// Result of a breadth-first search.
#[derive(Clone, Debug)]
pub struct Bfs<L> {
    parent: Vec<Option<Parent<L>>>,
}

impl<L: Clone> Bfs<L> {
    pub fn reached(&self, v: usize) -> bool {
        self.parent[v].is_some()
    }

    pub fn reached_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.parent.len()).filter(|&v| self.reached(v))
    }

    /// Node sequence from the root to `v` and the labels along it.
    pub fn path_to(&self, v: usize) -> Option<(Vec<usize>, Vec<L>)> {
        self.parent[v].as_ref()?;
        let mut nodes = vec![v];
        let mut labels = Vec::new();
        let mut cur = v;
        while let Some(Parent::Edge(p, label)) = &self.parent[cur] {
            labels.push(label.clone());
            nodes.push(*p);
            cur = *p;
        }
        nodes.reverse();
        labels.reverse();
        Some((nodes, labels))
    }
}

/// Strongly connected components.
#[derive(Clone, Debug)]
pub struct Scc {
    comp: Vec<Option<usize>>,
    cyclic: Vec<bool>,
    count: usize,
}

impl Scc {
    pub fn component(&self, v: usize) -> Option<usize> {
        self.comp[v]
    }

    /// Whether `v` lies on some cycle: its component has two or more nodes or
    /// `v` carries a self-loop.
    pub fn on_cycle(&self, v: usize) -> bool {
        self.cyclic[v]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.comp[a].is_some() && self.comp[a] == self.comp[b]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Digraph<char> {
        let mut g = Digraph::new(n);
        for (i, &(a, b)) in edges.iter().enumerate() {
            g.add_edge(a, (b'a' + i as u8) as char, b);
        }
        g
    }

    #[test]
    fn scc_of_chain_with_loop() {
        // 0 -> 1 -> 2 -> 1, 3 isolated with self-loop
        let g = graph(4, &[(0, 1), (1, 2), (2, 1), (3, 3)]);
        let scc = g.scc();
        assert!(!scc.on_cycle(0));
        assert!(scc.on_cycle(1) && scc.on_cycle(2) && scc.on_cycle(3));
        assert!(scc.same(1, 2));
        assert!(!scc.same(0, 1));
        assert_eq!(scc.count(), 3);
    }

    #[test]
    fn filtered_scc_ignores_rejected_nodes() {
        let g = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let scc = g.scc_filtered(|v| v != 2);
        assert!(!scc.on_cycle(0));
        assert_eq!(scc.component(2), None);
    }

    #[test]
    fn bfs_paths_are_shortest() {
        let g = graph(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let bfs = g.bfs([0]);
        let (nodes, labels) = bfs.path_to(3).unwrap();
        assert_eq!(nodes, vec![0, 2, 3]);
        assert_eq!(labels, vec!['c', 'd']);
        assert_eq!(bfs.path_to(0).unwrap(), (vec![0], vec![]));
    }

    #[test]
    fn shortest_cycle_extraction() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 0), (1, 0), (3, 3)]);
        let (nodes, labels) = g.shortest_cycle_through(0, |_| true).unwrap();
        assert_eq!(nodes, vec![0, 1, 0]);
        assert_eq!(labels, vec!['a', 'd']);
        let (nodes, _) = g.shortest_cycle_through(3, |_| true).unwrap();
        assert_eq!(nodes, vec![3, 3]);
        assert!(g.shortest_cycle_through(0, |v| v != 1).is_none());
    }

    #[test]
    fn deep_graph_does_not_overflow() {
        let n = 200_000;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).chain([(n - 1, 0)]).collect();
        let mut g = Digraph::new(n);
        for (a, b) in edges {
            g.add_edge(a, (), b);
        }
        let scc = g.scc();
        assert_eq!(scc.count(), 1);
        assert!(scc.on_cycle(n / 2));
    }
}
