//! Canonical codes for polyhedral maps.
//!
//! The embedding of a 3-connected planar graph is unique up to reflection, so
//! a breadth-first labeling driven by the rotation system, started from every
//! dart in both orientations, gives a complete invariant when minimized.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use super::{edge_graph, incidence_structure, steinitz_check, CombinatoricsError, IncidenceStructure};
use crate::geometry::Polyhedron;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Preserving,
    Reversing,
}

/// Deterministic byte string; equal codes mean face-equivalent polyhedra.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeIsomorphism {
    pub vertex_map: Vec<usize>,
    pub face_map: Vec<usize>,
    pub orientation: Orientation,
}

impl LatticeIsomorphism {
    pub fn identity(r: usize, s: usize) -> Self {
        Self {
            vertex_map: (0..r).collect(),
            face_map: (0..s).collect(),
            orientation: Orientation::Preserving,
        }
    }

    pub fn inverse(&self) -> Self {
        let invert = |map: &[usize]| {
            let mut out = vec![0; map.len()];
            for (i, &j) in map.iter().enumerate() {
                out[j] = i;
            }
            out
        };
        Self {
            vertex_map: invert(&self.vertex_map),
            face_map: invert(&self.face_map),
            orientation: self.orientation,
        }
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &Self) -> Self {
        Self {
            vertex_map: self.vertex_map.iter().map(|&i| other.vertex_map[i]).collect(),
            face_map: self.face_map.iter().map(|&j| other.face_map[j]).collect(),
            orientation: if self.orientation == other.orientation {
                Orientation::Preserving
            } else {
                Orientation::Reversing
            },
        }
    }

    /// Checks `m_ij = m'_{λ(i) λ(j)}` for every pair.
    pub fn preserves_incidence(&self, from: &IncidenceStructure, to: &IncidenceStructure) -> bool {
        if from.num_vertices() != to.num_vertices() || from.num_faces() != to.num_faces() {
            return false;
        }
        (0..from.num_vertices()).all(|i| {
            (0..from.num_faces()).all(|j| from.is_incident(i, j) == to.is_incident(self.vertex_map[i], self.face_map[j]))
        })
    }
}

/// Cyclic neighbor order around every vertex, as read from outside.
struct RotationSystem {
    ring: Vec<Vec<usize>>,
    position: HashMap<(usize, usize), usize>,
    edges: usize,
    faces: usize,
}

impl RotationSystem {
    fn new(inc: &IncidenceStructure) -> Self {
        let r = inc.num_vertices();
        let mut next: HashMap<(usize, usize), usize> = HashMap::new();
        for face in inc.faces() {
            let m = face.len();
            for k in 0..m {
                let (w, u, v) = (face[(k + m - 1) % m], face[k], face[(k + 1) % m]);
                next.insert((u, v), w);
            }
        }
        let mut first = vec![usize::MAX; r];
        for &(u, v) in next.keys() {
            first[u] = first[u].min(v);
        }
        let mut ring = vec![Vec::new(); r];
        let mut position = HashMap::new();
        for u in 0..r {
            let start = first[u];
            let mut v = start;
            loop {
                position.insert((u, v), ring[u].len());
                ring[u].push(v);
                v = next[&(u, v)];
                if v == start {
                    break;
                }
            }
        }
        Self {
            ring,
            position,
            edges: inc.num_edges(),
            faces: inc.num_faces(),
        }
    }

    fn darts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ring
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().map(move |&v| (u, v)))
    }

    /// BFS code from the dart `u -> v`. Returns the code and the vertex labels.
    fn code(&self, (s, t): (usize, usize), orientation: Orientation) -> (Vec<u32>, Vec<usize>) {
        let r = self.ring.len();
        let mut label = vec![usize::MAX; r];
        let mut reference = vec![usize::MAX; r];
        let mut order = Vec::with_capacity(r);
        let mut code = Vec::with_capacity(2 * self.edges + r + 3);
        code.extend([r as u32, self.edges as u32, self.faces as u32]);
        label[s] = 0;
        reference[s] = t;
        order.push(s);
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            head += 1;
            let ring = &self.ring[x];
            let d = ring.len();
            let k0 = self.position[&(x, reference[x])];
            for step in 0..d {
                let k = match orientation {
                    Orientation::Preserving => (k0 + step) % d,
                    Orientation::Reversing => (k0 + d - step) % d,
                };
                let z = ring[k];
                if label[z] == usize::MAX {
                    label[z] = order.len();
                    reference[z] = x;
                    order.push(z);
                }
                code.push(label[z] as u32 + 1);
            }
            code.push(0);
        }
        (code, label)
    }

    /// Minimal code and every (dart, orientation) attaining it.
    fn minimal(&self) -> (Vec<u32>, Vec<Vec<usize>>, Vec<Orientation>) {
        let mut best: Option<Vec<u32>> = None;
        let mut hits = Vec::new();
        for dart in self.darts() {
            for o in [Orientation::Preserving, Orientation::Reversing] {
                let (code, label) = self.code(dart, o);
                match best.as_ref().map(|b| code.cmp(b)) {
                    None | Some(std::cmp::Ordering::Less) => {
                        best = Some(code);
                        hits = vec![(label, o)];
                    }
                    Some(std::cmp::Ordering::Equal) => hits.push((label, o)),
                    Some(std::cmp::Ordering::Greater) => {}
                }
            }
        }
        let (labels, orients) = hits.into_iter().unzip();
        (best.unwrap_or_default(), labels, orients)
    }
}

fn encode(code: &[u32]) -> CanonicalCode {
    CanonicalCode(code.iter().flat_map(|c| c.to_be_bytes()).collect())
}

fn require_steinitz(inc: &IncidenceStructure) -> Result<(), CombinatoricsError> {
    if inc.num_vertices() < 4 || !steinitz_check(&edge_graph(inc)) {
        return Err(CombinatoricsError::NotSteinitz);
    }
    Ok(())
}

pub fn canonical_form(inc: &IncidenceStructure) -> Result<CanonicalCode, CombinatoricsError> {
    require_steinitz(inc)?;
    Ok(encode(&RotationSystem::new(inc).minimal().0))
}

fn face_keys(inc: &IncidenceStructure) -> BTreeMap<Vec<usize>, usize> {
    inc.faces()
        .iter()
        .enumerate()
        .map(|(j, f)| {
            let mut key = f.clone();
            key.sort_unstable();
            (key, j)
        })
        .collect()
}

/// Lifts a vertex bijection to faces via their vertex sets.
fn lift(from: &IncidenceStructure, to_keys: &BTreeMap<Vec<usize>, usize>, vertex_map: Vec<usize>, o: Orientation) -> LatticeIsomorphism {
    let face_map = from
        .faces()
        .iter()
        .map(|f| {
            let mut key: Vec<usize> = f.iter().map(|&i| vertex_map[i]).collect();
            key.sort_unstable();
            to_keys[&key]
        })
        .collect();
    LatticeIsomorphism {
        vertex_map,
        face_map,
        orientation: o,
    }
}

/// Every lattice isomorphism from `p` to `q` (empty when none exists).
pub fn lattice_isomorphisms(
    p: &IncidenceStructure,
    q: &IncidenceStructure,
) -> Result<Vec<LatticeIsomorphism>, CombinatoricsError> {
    require_steinitz(p)?;
    require_steinitz(q)?;
    let rp = RotationSystem::new(p);
    let rq = RotationSystem::new(q);
    let (code_p, labels_p, orients_p) = rp.minimal();
    let (code_q, labels_q, orients_q) = rq.minimal();
    if code_p != code_q {
        return Ok(Vec::new());
    }
    let keys = face_keys(q);
    let (lp, op) = (&labels_p[0], orients_p[0]);
    let mut out: Vec<LatticeIsomorphism> = labels_q
        .iter()
        .zip(&orients_q)
        .map(|(lq, &oq)| {
            let mut unlabel = vec![0; lq.len()];
            for (v, &l) in lq.iter().enumerate() {
                unlabel[l] = v;
            }
            let vertex_map = lp.iter().map(|&l| unlabel[l]).collect();
            let o = if op == oq {
                Orientation::Preserving
            } else {
                Orientation::Reversing
            };
            lift(p, &keys, vertex_map, o)
        })
        .collect();
    out.sort_by(|a, b| (a.orientation != Orientation::Preserving, &a.vertex_map).cmp(&(b.orientation != Orientation::Preserving, &b.vertex_map)));
    Ok(out)
}

/// Automorphisms of the face lattice, identity first.
pub fn combinatorial_automorphisms(inc: &IncidenceStructure) -> Result<Vec<LatticeIsomorphism>, CombinatoricsError> {
    lattice_isomorphisms(inc, inc)
}

/// A witness lattice isomorphism from `p` to `q`, if they are face equivalent.
pub fn face_equivalent(p: &Polyhedron, q: &Polyhedron) -> Option<LatticeIsomorphism> {
    let ip = incidence_structure(p).ok()?;
    let iq = incidence_structure(q).ok()?;
    if (ip.num_vertices(), ip.num_faces(), ip.num_edges()) != (iq.num_vertices(), iq.num_faces(), iq.num_edges()) {
        return None;
    }
    lattice_isomorphisms(&ip, &iq).ok()?.into_iter().next()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::{center_at_centroid, Point};
    use nalgebra::Matrix3;

    fn relabel(p: &Polyhedron, perm: &[usize], face_shift: usize) -> Polyhedron {
        let mut verts = vec![Point::zeros(); p.num_vertices()];
        for (i, &k) in perm.iter().enumerate() {
            verts[k] = p.vertices()[i];
        }
        let mut faces: Vec<Vec<usize>> = p
            .faces()
            .iter()
            .map(|f| {
                let mut g: Vec<usize> = f.iter().map(|&i| perm[i]).collect();
                let k = face_shift % g.len();
                g.rotate_left(k);
                g
            })
            .collect();
        let k = face_shift % faces.len();
        faces.rotate_left(k);
        Polyhedron::new(verts, faces).unwrap()
    }

    fn code(p: &Polyhedron) -> CanonicalCode {
        canonical_form(&incidence_structure(p).unwrap()).unwrap()
    }

    #[test]
    fn cube_and_parallelepiped() {
        let cube = catalog::cube();
        let shear = Matrix3::new(1.0, 0.4, 0.1, 0.0, 1.3, -0.2, 0.0, 0.0, 0.7);
        let box_ = cube.transformed(&shear, &Point::zeros());
        let w = face_equivalent(&cube, &box_).expect("affine image");
        assert!(w.preserves_incidence(&incidence_structure(&cube).unwrap(), &incidence_structure(&box_).unwrap()));
        assert_eq!(code(&cube), code(&box_));
    }

    #[test]
    fn cube_and_octahedron_differ() {
        assert!(face_equivalent(&catalog::cube(), &catalog::octahedron()).is_none());
        assert_ne!(code(&catalog::cube()), code(&catalog::octahedron()));
    }

    #[test]
    fn relabeled_figure1_is_recovered() {
        let p = catalog::figure1();
        let ip = incidence_structure(&p).unwrap();
        for (perm, shift) in [(vec![3, 0, 6, 1, 5, 2, 4], 3), (vec![6, 5, 4, 3, 2, 1, 0], 5)] {
            let q = relabel(&p, &perm, shift);
            let iq = incidence_structure(&q).unwrap();
            let w = face_equivalent(&p, &q).expect("relabeling");
            assert!(w.preserves_incidence(&ip, &iq));
            assert_eq!(code(&p), code(&q));
        }
    }

    #[test]
    fn mirror_image_is_equivalent_with_reversed_witness() {
        let p = catalog::figure1();
        let m = Matrix3::from_diagonal(&Point::new(-1.0, 1.0, 1.0));
        let q = center_at_centroid(&p.transformed(&m, &Point::zeros())).unwrap();
        assert!(face_equivalent(&p, &q).is_some());
        let (ip, iq) = (incidence_structure(&p).unwrap(), incidence_structure(&q).unwrap());
        let all = lattice_isomorphisms(&ip, &iq).unwrap();
        assert_eq!(all.len(), 4);
        let mirror = all.iter().find(|w| w.vertex_map == (0..7).collect::<Vec<_>>()).unwrap();
        assert_eq!(mirror.orientation, Orientation::Reversing);
    }

    #[test]
    fn codes_are_deterministic() {
        let p = catalog::truncated_cuboctahedron();
        assert_eq!(code(&p), code(&p));
        assert_eq!(code(&p).to_string(), code(&p.clone()).to_string());
    }

    #[test]
    fn automorphism_counts() {
        for (p, n) in [
            (catalog::tetrahedron(), 24),
            (catalog::cube(), 48),
            (catalog::icosahedron(), 120),
            (catalog::pyramid(5, 1.0), 10),
            (catalog::figure1(), 4),
        ] {
            let inc = incidence_structure(&p).unwrap();
            let auts = combinatorial_automorphisms(&inc).unwrap();
            assert_eq!(auts.len(), n);
            assert_eq!(auts[0], LatticeIsomorphism::identity(inc.num_vertices(), inc.num_faces()));
            assert!(auts.iter().all(|a| a.preserves_incidence(&inc, &inc)));
        }
    }

    #[test]
    fn non_steinitz_structure_is_rejected() {
        // Two triangles glued along their boundary: a degenerate "pillow".
        let inc = IncidenceStructure::from_faces(3, &[vec![0, 1, 2], vec![0, 2, 1]]).unwrap();
        assert_eq!(canonical_form(&inc), Err(CombinatoricsError::NotSteinitz));
    }
}
