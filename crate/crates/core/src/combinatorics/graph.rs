//! Simple undirected graphs with the two Steinitz tests: 3-connectivity by
//! vertex-disjoint paths and planarity by the Demoucron-Malgrange-Pertuiset
//! path embedding.

use std::collections::{BTreeSet, VecDeque};

use super::IncidenceStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds an undirected edge; loops and repeats are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nb) in self.adj.iter().enumerate() {
            out.extend(nb.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.num_vertices()];
        for (k, &v) in vertices.iter().enumerate() {
            index[v] = k;
        }
        let mut g = Graph::new(vertices.len());
        for &u in vertices {
            for v in self.neighbors(u) {
                if index[v] != usize::MAX {
                    g.add_edge(index[u], index[v]);
                }
            }
        }
        g
    }
}

/// The 1-skeleton: vertices of the polyhedron joined along its edges.
pub fn edge_graph(inc: &IncidenceStructure) -> Graph {
    let edges: Vec<(usize, usize)> = inc.edges().iter().map(|e| e.vertices).collect();
    Graph::from_edges(inc.num_vertices(), &edges)
}

/// Planar and 3-connected.
pub fn steinitz_check(g: &Graph) -> bool {
    is_three_connected(g) && is_planar(g)
}

/// Menger test: every non-adjacent pair is joined by three internally
/// vertex-disjoint paths. Exits early when some degree is below 3.
pub fn is_three_connected(g: &Graph) -> bool {
    let n = g.num_vertices();
    if n < 4 || (0..n).any(|v| g.degree(v) < 3) || !g.is_connected() {
        return false;
    }
    for s in 0..n {
        for t in s + 1..n {
            if !g.has_edge(s, t) && disjoint_paths(g, s, t, 3) < 3 {
                return false;
            }
        }
    }
    true
}

/// Maximum number (capped at `limit`) of internally vertex-disjoint `s`-`t`
/// paths, by augmenting paths on the split-vertex network.
fn disjoint_paths(g: &Graph, s: usize, t: usize, limit: usize) -> usize {
    let n = g.num_vertices();
    // Node 2v is v_in, 2v+1 is v_out; arc v_in -> v_out has capacity 1
    // (unbounded for s and t), each graph edge gives u_out -> v_in.
    let nodes = 2 * n;
    let mut cap: Vec<std::collections::HashMap<usize, i32>> = vec![Default::default(); nodes];
    let add = |cap: &mut Vec<std::collections::HashMap<usize, i32>>, a: usize, b: usize, c: i32| {
        *cap[a].entry(b).or_insert(0) += c;
        cap[b].entry(a).or_insert(0);
    };
    for v in 0..n {
        let c = if v == s || v == t { limit as i32 } else { 1 };
        add(&mut cap, 2 * v, 2 * v + 1, c);
        for u in g.neighbors(v) {
            add(&mut cap, 2 * v + 1, 2 * u, 1);
        }
    }
    let (source, sink) = (2 * s + 1, 2 * t);
    let mut flow = 0;
    while flow < limit {
        let mut prev = vec![usize::MAX; nodes];
        prev[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(a) = queue.pop_front() {
            if a == sink {
                break;
            }
            for (&b, &c) in &cap[a] {
                if c > 0 && prev[b] == usize::MAX {
                    prev[b] = a;
                    queue.push_back(b);
                }
            }
        }
        if prev[sink] == usize::MAX {
            break;
        }
        let mut b = sink;
        while b != source {
            let a = prev[b];
            *cap[a].get_mut(&b).unwrap() -= 1;
            *cap[b].get_mut(&a).unwrap() += 1;
            b = a;
        }
        flow += 1;
    }
    flow
}

/// Planarity of an arbitrary simple graph, decided per biconnected component.
pub fn is_planar(g: &Graph) -> bool {
    let n = g.num_vertices();
    if n >= 3 && g.num_edges() > 3 * n - 6 {
        return false;
    }
    biconnected_components(g).iter().all(|comp| {
        if comp.len() <= 4 {
            return true;
        }
        let h = g.induced(comp);
        h.num_edges() <= 3 * h.num_vertices() - 6 && dmp_planar(&h)
    })
}

/// Vertex sets of the biconnected components (Hopcroft-Tarjan, iterative).
fn biconnected_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut comps = Vec::new();
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // Frames: (vertex, parent, remaining neighbors)
        let mut stack: Vec<(usize, usize, Vec<usize>)> = vec![(root, usize::MAX, g.neighbors(root).collect())];
        while let Some(frame) = stack.last_mut() {
            let (u, parent) = (frame.0, frame.1);
            if let Some(v) = frame.2.pop() {
                if disc[v] == usize::MAX {
                    edge_stack.push((u, v));
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    stack.push((v, u, g.neighbors(v).collect()));
                } else if v != parent && disc[v] < disc[u] {
                    edge_stack.push((u, v));
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let Some(top) = stack.last() {
                    let p = top.0;
                    low[p] = low[p].min(low[u]);
                    if low[u] >= disc[p] {
                        let mut comp = BTreeSet::new();
                        while let Some((a, b)) = edge_stack.pop() {
                            comp.insert(a);
                            comp.insert(b);
                            if (a, b) == (p, u) {
                                break;
                            }
                        }
                        comps.push(comp.into_iter().collect());
                    }
                }
            }
        }
    }
    comps
}

/// Demoucron-Malgrange-Pertuiset planarity test for a biconnected graph.
fn dmp_planar(g: &Graph) -> bool {
    let n = g.num_vertices();
    let Some(cycle) = find_cycle(g) else {
        return true;
    };
    let mut embedded_vertex = vec![false; n];
    let mut embedded_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for k in 0..cycle.len() {
        let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
        embedded_vertex[a] = true;
        embedded_edges.insert((a.min(b), a.max(b)));
    }
    let mut faces: Vec<Vec<usize>> = vec![cycle.clone(), cycle.iter().rev().copied().collect()];
    let total = g.num_edges();

    while embedded_edges.len() < total {
        let fragments = fragments(g, &embedded_vertex, &embedded_edges);
        let mut choice: Option<(usize, usize)> = None;
        for (k, frag) in fragments.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&f| frag.contacts.iter().all(|c| faces[f].contains(c)))
                .collect();
            match admissible.len() {
                0 => return false,
                1 => {
                    choice = Some((k, admissible[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((k, admissible[0]));
                    }
                }
            }
        }
        let (k, f) = choice.expect("an unembedded edge implies a fragment");
        let path = fragment_path(g, &fragments[k], &embedded_vertex);
        for w in path.windows(2) {
            embedded_edges.insert((w[0].min(w[1]), w[0].max(w[1])));
        }
        for &v in &path {
            embedded_vertex[v] = true;
        }
        let face = faces.swap_remove(f);
        let (a, b) = split_face(&face, &path);
        faces.push(a);
        faces.push(b);
    }
    true
}

struct Fragment {
    /// Vertices outside the embedding (empty for a chord).
    interior: Vec<usize>,
    /// Attachment vertices on the embedding.
    contacts: BTreeSet<usize>,
    chord: Option<(usize, usize)>,
}

fn fragments(g: &Graph, embedded: &[bool], edges: &BTreeSet<(usize, usize)>) -> Vec<Fragment> {
    let n = g.num_vertices();
    let mut out = Vec::new();
    for (u, v) in g.edges() {
        if embedded[u] && embedded[v] && !edges.contains(&(u, v)) {
            out.push(Fragment {
                interior: Vec::new(),
                contacts: [u, v].into(),
                chord: Some((u, v)),
            });
        }
    }
    let mut seen = vec![false; n];
    for start in 0..n {
        if embedded[start] || seen[start] {
            continue;
        }
        let mut interior = vec![start];
        let mut contacts = BTreeSet::new();
        seen[start] = true;
        let mut k = 0;
        while k < interior.len() {
            let u = interior[k];
            k += 1;
            for v in g.neighbors(u) {
                if embedded[v] {
                    contacts.insert(v);
                } else if !seen[v] {
                    seen[v] = true;
                    interior.push(v);
                }
            }
        }
        out.push(Fragment {
            interior,
            contacts,
            chord: None,
        });
    }
    out
}

/// A path through the fragment joining two distinct contact vertices.
fn fragment_path(g: &Graph, frag: &Fragment, embedded: &[bool]) -> Vec<usize> {
    if let Some((u, v)) = frag.chord {
        return vec![u, v];
    }
    let contacts: Vec<usize> = frag.contacts.iter().copied().collect();
    let start = contacts[0];
    let inside: BTreeSet<usize> = frag.interior.iter().copied().collect();
    let mut prev: std::collections::HashMap<usize, usize> = Default::default();
    let mut queue = VecDeque::new();
    for v in g.neighbors(start).filter(|v| inside.contains(v)) {
        prev.insert(v, start);
        queue.push_back(v);
    }
    while let Some(u) = queue.pop_front() {
        for v in g.neighbors(u) {
            if embedded[v] && v != start {
                let mut path = vec![v, u];
                let mut cur = u;
                while let Some(&p) = prev.get(&cur) {
                    path.push(p);
                    if p == start {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return path;
            }
            if inside.contains(&v) && !prev.contains_key(&v) {
                prev.insert(v, u);
                queue.push_back(v);
            }
        }
    }
    unreachable!("fragments of a biconnected graph have two contacts")
}

/// Splits the face cycle along `path` (which joins two of its vertices).
fn split_face(face: &[usize], path: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (u, v) = (path[0], *path.last().unwrap());
    let m = face.len();
    let iu = face.iter().position(|&x| x == u).unwrap();
    let iv = face.iter().position(|&x| x == v).unwrap();
    let walk = |from: usize, to: usize| {
        let mut seg = vec![face[from]];
        let mut k = from;
        while k != to {
            k = (k + 1) % m;
            seg.push(face[k]);
        }
        seg
    };
    let inner = &path[1..path.len() - 1];
    let mut a = walk(iu, iv);
    a.extend(inner.iter().rev());
    let mut b = walk(iv, iu);
    b.extend(inner.iter());
    (a, b)
}

/// A cycle through the first edge, found as a shortest detour around it.
fn find_cycle(g: &Graph) -> Option<Vec<usize>> {
    let &(a, b) = g.edges().first()?;
    let mut prev = vec![usize::MAX; g.num_vertices()];
    prev[b] = b;
    let mut queue = VecDeque::from([b]);
    while let Some(u) = queue.pop_front() {
        for v in g.neighbors(u) {
            if (u, v) == (b, a) || prev[v] != usize::MAX {
                continue;
            }
            prev[v] = u;
            if v == a {
                let mut cycle = vec![a];
                let mut cur = a;
                while cur != b {
                    cur = prev[cur];
                    cycle.push(cur);
                }
                return Some(cycle);
            }
            queue.push_back(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::combinatorics::incidence_structure;

    fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    #[test]
    fn tetrahedron_skeleton_is_k4() {
        let g = edge_graph(&incidence_structure(&catalog::tetrahedron()).unwrap());
        assert_eq!(g, complete(4));
        assert!(steinitz_check(&g));
    }

    #[test]
    fn cube_skeleton_is_cubic_bipartite() {
        let g = edge_graph(&incidence_structure(&catalog::cube()).unwrap());
        assert_eq!((g.num_vertices(), g.num_edges()), (8, 12));
        assert!((0..8).all(|v| g.degree(v) == 3));
        let mut color = [usize::MAX; 8];
        color[0] = 0;
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            for v in g.neighbors(u) {
                if color[v] == usize::MAX {
                    color[v] = 1 - color[u];
                    stack.push(v);
                }
                assert_ne!(color[v], color[u]);
            }
        }
    }

    #[test]
    fn square_pyramid_skeleton_is_a_wheel() {
        let p = catalog::pyramid(4, 1.0);
        let g = edge_graph(&incidence_structure(&p).unwrap());
        let hub = (0..5).find(|&v| g.degree(v) == 4).unwrap();
        let rim: Vec<usize> = (0..5).filter(|&v| v != hub).collect();
        assert!(rim.iter().all(|&v| g.degree(v) == 3 && g.has_edge(v, hub)));
        assert_eq!(g.num_edges(), 8);
    }

    #[test]
    fn k5_and_k33_are_not_planar() {
        assert!(!is_planar(&complete(5)));
        assert!(!steinitz_check(&complete(5)));
        let mut k33 = Graph::new(6);
        for u in 0..3 {
            for v in 3..6 {
                k33.add_edge(u, v);
            }
        }
        assert!(is_three_connected(&k33));
        assert!(!is_planar(&k33));
    }

    #[test]
    fn petersen_graph_is_not_planar() {
        let mut g = Graph::new(10);
        for k in 0..5 {
            g.add_edge(k, (k + 1) % 5);
            g.add_edge(k, k + 5);
            g.add_edge(5 + k, 5 + (k + 2) % 5);
        }
        assert_eq!(g.num_edges(), 15);
        assert!(is_three_connected(&g));
        assert!(!is_planar(&g));
    }

    #[test]
    fn glued_tetrahedra_have_a_cut_vertex() {
        // Two K4s sharing vertex 0.
        let mut g = Graph::new(7);
        for block in [[0, 1, 2, 3], [0, 4, 5, 6]] {
            for a in 0..4 {
                for b in a + 1..4 {
                    g.add_edge(block[a], block[b]);
                }
            }
        }
        assert!(is_planar(&g));
        assert!(!is_three_connected(&g));
        assert!(!steinitz_check(&g));
    }

    #[test]
    fn catalog_skeletons_are_steinitz() {
        for name in catalog::NAMES {
            let p = catalog::generate(name, &Default::default()).unwrap();
            let g = edge_graph(&incidence_structure(&p).unwrap());
            assert!(steinitz_check(&g), "{name}");
        }
    }

    #[test]
    fn planar_but_two_connected() {
        // A hexagon with one chord: planar, only 2-connected.
        let mut g = Graph::new(6);
        for k in 0..6 {
            g.add_edge(k, (k + 1) % 6);
        }
        g.add_edge(0, 3);
        assert!(is_planar(&g));
        assert!(!is_three_connected(&g));
    }
}
