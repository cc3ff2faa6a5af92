//! Face lattice combinatorics: the vertex/face incidence matrix, the edge
//! graph, Steinitz's conditions and face (combinatorial) equivalence.
//!
//! Only rank-1 and rank-2 elements are stored; for 3-polytopes the vertex/face
//! incidences determine the whole lattice.

mod canonical;
mod graph;

pub use canonical::{
    canonical_form, combinatorial_automorphisms, face_equivalent, lattice_isomorphisms, CanonicalCode, LatticeIsomorphism,
    Orientation,
};
pub use graph::{edge_graph, is_planar, is_three_connected, steinitz_check, Graph};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{cycle_edges, Polyhedron};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CombinatoricsError {
    #[error("edge ({0}, {1}) does not bound exactly two faces with opposite orientations")]
    BadEdge(usize, usize),
    #[error("structure fails the Steinitz conditions (planar and 3-connected edge graph)")]
    NotSteinitz,
}

/// An edge with its endpoints (`u < v`) and the two faces it separates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub vertices: (usize, usize),
    /// `faces.0` contains the directed edge `u -> v`, `faces.1` contains `v -> u`.
    pub faces: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceStructure {
    r: usize,
    /// Oriented face cycles, kept so the embedding is recoverable.
    faces: Vec<Vec<usize>>,
    matrix: Vec<Vec<bool>>,
    edges: Vec<Edge>,
    mu: usize,
}

impl IncidenceStructure {
    /// Builds the structure from oriented face cycles on `r` vertices.
    pub fn from_faces(r: usize, faces: &[Vec<usize>]) -> Result<Self, CombinatoricsError> {
        let mut matrix = vec![vec![false; faces.len()]; r];
        let mut directed: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (j, face) in faces.iter().enumerate() {
            for &i in face {
                matrix[i][j] = true;
            }
            for (u, v) in cycle_edges(face) {
                directed.entry((u, v)).or_default().push(j);
            }
        }
        let mut edges = Vec::new();
        for (&(u, v), fwd) in &directed {
            let back = directed.get(&(v, u));
            match (fwd.as_slice(), back.map(Vec::as_slice)) {
                ([f], Some([g])) => {
                    if u < v {
                        edges.push(Edge {
                            vertices: (u, v),
                            faces: (*f, *g),
                        });
                    }
                }
                _ => return Err(CombinatoricsError::BadEdge(u.min(v), u.max(v))),
            }
        }
        let mu = matrix.iter().flatten().filter(|&&m| m).count();
        Ok(Self {
            r,
            faces: faces.to_vec(),
            matrix,
            edges,
            mu,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.r
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of incident vertex/face pairs.
    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn matrix(&self) -> &[Vec<bool>] {
        &self.matrix
    }

    pub fn is_incident(&self, vertex: usize, face: usize) -> bool {
        self.matrix[vertex][face]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Incident pairs `(i, j)` in lexicographic order.
    pub fn incident_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.mu);
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                if m {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Drops face column `j` and every edge bounding it. The result no longer
    /// describes a closed surface; used to exercise the Euler check.
    pub fn without_face(&self, j: usize) -> Self {
        let mut faces = self.faces.clone();
        faces.remove(j);
        let matrix = self
            .matrix
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &m)| m).collect::<Vec<_>>())
            .collect::<Vec<_>>();
        let reindex = |f: usize| if f > j { f - 1 } else { f };
        let edges = self
            .edges
            .iter()
            .filter(|e| e.faces.0 != j && e.faces.1 != j)
            .map(|e| Edge {
                vertices: e.vertices,
                faces: (reindex(e.faces.0), reindex(e.faces.1)),
            })
            .collect();
        let mu = matrix.iter().flatten().filter(|&&m| m).count();
        Self {
            r: self.r,
            faces,
            matrix,
            edges,
            mu,
        }
    }
}

/// The incidence matrix, edge list and multiplicity of `p`.
pub fn incidence_structure(p: &Polyhedron) -> Result<IncidenceStructure, CombinatoricsError> {
    IncidenceStructure::from_faces(p.num_vertices(), p.faces())
}

/// Euler's relation `r - e + s = 2`.
pub fn euler_check(inc: &IncidenceStructure) -> bool {
    inc.num_vertices() + inc.num_faces() == inc.num_edges() + 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    /// Counts incidences by brute force over vertices and faces.
    fn mu_oracle(p: &Polyhedron) -> usize {
        (0..p.num_vertices())
            .map(|i| p.faces().iter().filter(|f| f.contains(&i)).count())
            .sum()
    }

    #[test]
    fn multiplicities() {
        let fig = incidence_structure(&catalog::figure1()).unwrap();
        assert_eq!((fig.mu(), fig.num_edges()), (26, 13));
        let t = incidence_structure(&catalog::tetrahedron()).unwrap();
        assert_eq!((t.mu(), t.num_edges()), (12, 6));
        let c = incidence_structure(&catalog::cube()).unwrap();
        assert_eq!((c.mu(), c.num_edges()), (24, 12));
        for p in [catalog::figure1(), catalog::tetrahedron(), catalog::cube()] {
            assert_eq!(incidence_structure(&p).unwrap().mu(), mu_oracle(&p));
        }
    }

    #[test]
    fn structure_invariants_on_catalog() {
        for name in catalog::NAMES {
            let p = catalog::generate(name, &Default::default()).unwrap();
            let inc = incidence_structure(&p).unwrap();
            assert_eq!(inc.mu(), 2 * inc.num_edges(), "{name}");
            assert!(euler_check(&inc), "{name}");
            for row in inc.matrix() {
                assert!(row.iter().filter(|&&m| m).count() >= 3);
            }
            for j in 0..inc.num_faces() {
                assert!(inc.matrix().iter().filter(|row| row[j]).count() >= 3);
            }
            let pairs: Vec<_> = inc.edges().iter().map(|e| e.vertices).collect();
            let mut sorted = pairs.clone();
            sorted.sort();
            assert_eq!(pairs, sorted);
        }
    }

    #[test]
    fn euler_examples() {
        let cube = incidence_structure(&catalog::cube()).unwrap();
        assert!(euler_check(&cube));
        assert!(euler_check(&incidence_structure(&catalog::icosahedron()).unwrap()));
        assert!(!euler_check(&cube.without_face(2)));
    }

    #[test]
    fn broken_surface_is_rejected() {
        let cube = catalog::cube();
        let mut faces = cube.faces().to_vec();
        faces[0].reverse();
        assert!(matches!(
            IncidenceStructure::from_faces(8, &faces),
            Err(CombinatoricsError::BadEdge(..))
        ));
    }
}
