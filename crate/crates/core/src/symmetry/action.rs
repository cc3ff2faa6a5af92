use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{fixed_dim, IsometryGroup, SymmetryError, SYMMETRY_TOL};
use crate::combinatorics::{incidence_structure, IncidenceStructure};
use crate::geometry::{Point, Polyhedron};

/// The permutations induced by a group on the vertices and faces of a
/// polyhedron, one pair per group element in group order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    vertex_perms: Vec<Vec<usize>>,
    face_perms: Vec<Vec<usize>>,
}

impl GroupAction {
    /// Matches `g v_i` against the vertices within `tol · circumradius`.
    pub fn on(p: &Polyhedron, g: &IsometryGroup, tol: f64) -> Result<Self, SymmetryError> {
        let verts = p.vertices();
        let radius = p.circumradius();
        let face_index: HashMap<Vec<usize>, usize> = p
            .faces()
            .iter()
            .enumerate()
            .map(|(j, f)| (sorted(f.clone()), j))
            .collect();
        let mut vertex_perms = Vec::with_capacity(g.order());
        let mut face_perms = Vec::with_capacity(g.order());
        for (k, m) in g.elements().iter().enumerate() {
            let mut perm = Vec::with_capacity(verts.len());
            for v in verts {
                let image = m * v;
                let hit = (0..verts.len())
                    .find(|&i| (verts[i] - image).norm() <= tol * radius)
                    .ok_or(SymmetryError::NotASymmetry(k))?;
                perm.push(hit);
            }
            let mut seen = perm.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != perm.len() {
                return Err(SymmetryError::NotASymmetry(k));
            }
            let faces = p
                .faces()
                .iter()
                .map(|f| face_index.get(&sorted(f.iter().map(|&i| perm[i]).collect())).copied())
                .collect::<Option<Vec<usize>>>()
                .ok_or(SymmetryError::NotASymmetry(k))?;
            vertex_perms.push(perm);
            face_perms.push(faces);
        }
        Ok(Self {
            vertex_perms,
            face_perms,
        })
    }

    pub fn vertex_perm(&self, element: usize) -> &[usize] {
        &self.vertex_perms[element]
    }

    pub fn face_perm(&self, element: usize) -> &[usize] {
        &self.face_perms[element]
    }

    pub fn vertex_perms(&self) -> &[Vec<usize>] {
        &self.vertex_perms
    }

    pub fn face_perms(&self) -> &[Vec<usize>] {
        &self.face_perms
    }

    pub fn order(&self) -> usize {
        self.vertex_perms.len()
    }

    fn edge_image(&self, element: usize, (u, v): (usize, usize)) -> (usize, usize) {
        let pi = &self.vertex_perms[element];
        (pi[u].min(pi[v]), pi[u].max(pi[v]))
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    /// Item indices; the first is the representative (the smallest).
    pub members: Vec<usize>,
    /// Indices of the group elements fixing the representative.
    pub stabilizer: Vec<usize>,
    /// Degree of freedom, for vertex and face orbits.
    pub delta: Option<usize>,
}

impl Orbit {
    pub fn representative(&self) -> usize {
        self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitDecomposition {
    pub group_order: usize,
    pub vertex_orbits: Vec<Orbit>,
    pub edge_orbits: Vec<Orbit>,
    pub face_orbits: Vec<Orbit>,
    pub incidence_orbits: Vec<Orbit>,
    /// Edge `k` of `edge_orbits` members, as vertex pairs.
    pub edges: Vec<(usize, usize)>,
    /// Incident pair `k` of `incidence_orbits` members.
    pub incidences: Vec<(usize, usize)>,
    pub epsilon: usize,
    pub mu_star: usize,
}

impl OrbitDecomposition {
    pub fn vertex_deltas(&self) -> Vec<usize> {
        self.vertex_orbits.iter().filter_map(|o| o.delta).collect()
    }

    pub fn face_deltas(&self) -> Vec<usize> {
        self.face_orbits.iter().filter_map(|o| o.delta).collect()
    }
}

/// Partitions `0..n` into orbits of `image(element, item)`.
fn partition(n: usize, order: usize, image: impl Fn(usize, usize) -> usize) -> Vec<Orbit> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let mut members: Vec<usize> = (0..order).map(|g| image(g, x)).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            seen[m] = true;
        }
        let stabilizer = (0..order).filter(|&g| image(g, x) == x).collect();
        out.push(Orbit {
            members,
            stabilizer,
            delta: None,
        });
    }
    out
}

/// Orbits of vertices, edges, faces and incident pairs, with stabilizers
/// and degrees of freedom.
pub fn orbits(p: &Polyhedron, g: &IsometryGroup) -> Result<OrbitDecomposition, SymmetryError> {
    let action = GroupAction::on(p, g, SYMMETRY_TOL)?;
    let inc = incidence_structure(p)?;
    Ok(orbits_with(&inc, g, &action))
}

pub(crate) fn orbits_with(inc: &IncidenceStructure, g: &IsometryGroup, action: &GroupAction) -> OrbitDecomposition {
    let order = action.order();
    let stab_dim = |stab: &[usize]| fixed_dim(stab.iter().map(|&k| &g.elements()[k]));

    let mut vertex_orbits = partition(inc.num_vertices(), order, |k, i| action.vertex_perms[k][i]);
    for o in vertex_orbits.iter_mut() {
        o.delta = Some(stab_dim(&o.stabilizer));
    }
    let mut face_orbits = partition(inc.num_faces(), order, |k, j| action.face_perms[k][j]);
    for o in face_orbits.iter_mut() {
        o.delta = Some(stab_dim(&o.stabilizer));
    }

    let edges: Vec<(usize, usize)> = inc.edges().iter().map(|e| e.vertices).collect();
    let edge_index: BTreeMap<(usize, usize), usize> = edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let edge_orbits = partition(edges.len(), order, |k, e| edge_index[&action.edge_image(k, edges[e])]);

    let incidences = inc.incident_pairs();
    let pair_index: BTreeMap<(usize, usize), usize> =
        incidences.iter().enumerate().map(|(k, &pr)| (pr, k)).collect();
    let incidence_orbits = partition(incidences.len(), order, |k, x| {
        let (i, j) = incidences[x];
        pair_index[&(action.vertex_perms[k][i], action.face_perms[k][j])]
    });

    OrbitDecomposition {
        group_order: order,
        epsilon: edge_orbits.len(),
        mu_star: incidence_orbits.len(),
        vertex_orbits,
        edge_orbits,
        face_orbits,
        incidence_orbits,
        edges,
        incidences,
    }
}

/// Orbit count by Burnside's lemma: the mean number of edges fixed by an
/// element.
pub fn burnside_count(p: &Polyhedron, g: &IsometryGroup) -> Result<usize, SymmetryError> {
    let action = GroupAction::on(p, g, SYMMETRY_TOL)?;
    let inc = incidence_structure(p)?;
    let fixed: usize = (0..action.order())
        .map(|k| {
            inc.edges()
                .iter()
                .filter(|e| action.edge_image(k, e.vertices) == e.vertices)
                .count()
        })
        .sum();
    Ok(fixed / action.order())
}

/// `dim Fix(G_x)` for the isotropy group of the point `x`.
pub fn stratum_dimension(x: &Point, g: &IsometryGroup) -> usize {
    let tol = SYMMETRY_TOL * x.norm().max(1.0);
    fixed_dim(g.elements().iter().filter(|m| (*m * x - x).norm() <= tol))
}

/// Degree of freedom of vertex `v`: the dimension of the subspace fixed by
/// its stabilizer.
pub fn degree_of_freedom_vertex(p: &Polyhedron, v: usize, g: &IsometryGroup) -> usize {
    stratum_dimension(&p.vertices()[v], g)
}

/// Degree of freedom of face `f`: stabilizing the face plane `<x, a> = 1`
/// under an orthogonal map means fixing `a`.
pub fn degree_of_freedom_face(p: &Polyhedron, f: usize, g: &IsometryGroup) -> usize {
    let a = match p.planes() {
        Some(planes) => planes[f],
        None => {
            let n = p.face_normal(f).normalize();
            n / p.face_centroid(f).dot(&n)
        }
    };
    stratum_dimension(&a, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::symmetry::symmetry_group;
    use nalgebra::{Matrix3, Rotation3, Vector3};

    fn decompose(p: &Polyhedron) -> OrbitDecomposition {
        let g = symmetry_group(p, SYMMETRY_TOL).unwrap();
        orbits(p, &g).unwrap()
    }

    #[test]
    fn independent_incidence_counts() {
        let rd = decompose(&catalog::rhombic_dodecahedron());
        assert_eq!(rd.mu_star, 2);
        let pyr = decompose(&catalog::pyramid(4, 1.0));
        assert_eq!((pyr.epsilon, pyr.mu_star), (2, 3));
        let cube = decompose(&catalog::cube());
        assert_eq!((cube.epsilon, cube.mu_star), (1, 1));
    }

    #[test]
    fn orbit_stabilizer_and_sums() {
        for name in catalog::NAMES {
            let p = catalog::generate(name, &Default::default()).unwrap();
            let d = decompose(&p);
            let inc = incidence_structure(&p).unwrap();
            for list in [&d.vertex_orbits, &d.edge_orbits, &d.face_orbits, &d.incidence_orbits] {
                for o in list.iter() {
                    assert_eq!(o.len() * o.stabilizer.len(), d.group_order, "{name}");
                }
            }
            let total = |l: &[Orbit]| l.iter().map(Orbit::len).sum::<usize>();
            assert_eq!(total(&d.edge_orbits), inc.num_edges());
            assert_eq!(total(&d.incidence_orbits), inc.mu());
            assert_eq!(total(&d.vertex_orbits), inc.num_vertices());
            assert_eq!(total(&d.face_orbits), inc.num_faces());
        }
    }

    #[test]
    fn burnside_agrees_with_partition() {
        for name in catalog::NAMES {
            let p = catalog::generate(name, &Default::default()).unwrap();
            let g = symmetry_group(&p, SYMMETRY_TOL).unwrap();
            assert_eq!(burnside_count(&p, &g).unwrap(), orbits(&p, &g).unwrap().epsilon, "{name}");
        }
    }

    #[test]
    fn pyramid_freedoms() {
        let p = catalog::pyramid(4, 1.0);
        let g = symmetry_group(&p, SYMMETRY_TOL).unwrap();
        let apex = (0..5).find(|&i| p.vertices()[i].z > 0.0).unwrap();
        let base = (0..5).find(|&i| i != apex).unwrap();
        assert_eq!(degree_of_freedom_vertex(&p, apex, &g), 1);
        assert_eq!(degree_of_freedom_vertex(&p, base, &g), 2);
        let square = (0..5).find(|&j| p.faces()[j].len() == 4).unwrap();
        let tri = (0..5).find(|&j| p.faces()[j].len() == 3).unwrap();
        assert_eq!(degree_of_freedom_face(&p, square, &g), 1);
        assert_eq!(degree_of_freedom_face(&p, tri, &g), 2);
        let trivial = IsometryGroup::trivial();
        assert_eq!(degree_of_freedom_vertex(&p, apex, &trivial), 3);
        assert_eq!(degree_of_freedom_face(&p, tri, &trivial), 3);
    }

    #[test]
    fn delta_matches_character_average_and_is_constant_on_orbits() {
        for p in [catalog::cube(), catalog::truncated_cuboctahedron(), catalog::prism(5)] {
            let g = symmetry_group(&p, SYMMETRY_TOL).unwrap();
            let d = orbits(&p, &g).unwrap();
            for o in &d.vertex_orbits {
                // dim Fix(H) = (1/|H|) Σ tr(h).
                let avg: f64 = o.stabilizer.iter().map(|&k| g.elements()[k].trace()).sum::<f64>()
                    / o.stabilizer.len() as f64;
                assert_eq!(o.delta, Some(avg.round() as usize));
                for &m in &o.members {
                    assert_eq!(degree_of_freedom_vertex(&p, m, &g), o.delta.unwrap());
                }
            }
            for o in &d.face_orbits {
                for &m in &o.members {
                    assert_eq!(degree_of_freedom_face(&p, m, &g), o.delta.unwrap());
                }
            }
        }
    }

    #[test]
    fn strata() {
        let cube = symmetry_group(&catalog::cube(), SYMMETRY_TOL).unwrap();
        assert_eq!(stratum_dimension(&Point::zeros(), &cube), 0);
        assert_eq!(stratum_dimension(&Point::new(0.3, 0.71, 0.12), &cube), 3);
        let r = Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_2).into_inner();
        let c4 = IsometryGroup::from_matrices(vec![Matrix3::identity(), r, r * r, r * r * r], SYMMETRY_TOL).unwrap();
        assert_eq!(stratum_dimension(&Point::new(0.0, 0.0, 2.0), &c4), 1);
        assert_eq!(stratum_dimension(&Point::new(0.1, 0.0, 2.0), &c4), 3);
    }

    #[test]
    fn non_symmetry_is_rejected() {
        let cube = symmetry_group(&catalog::cube(), SYMMETRY_TOL).unwrap();
        assert!(matches!(
            orbits(&catalog::pyramid(4, 1.0), &cube),
            Err(SymmetryError::NotASymmetry(_))
        ));
    }
}
