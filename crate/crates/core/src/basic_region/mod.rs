//! Basic regions: the part of a symmetric polyhedron's surface inside one
//! fundamental region of its reflection group, subdivided by the walls.

mod fundamental;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

pub use fundamental::{fundamental_region, FundamentalRegion, RegionKind};

use crate::geometry::{face_plane_vectors, GeometryError, Point, Polyhedron, DEFAULT_TOL};

/// Snap tolerance for wall distances, relative to the circumradius.
pub const CLIP_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BasicRegionError {
    #[error("group is not generated by reflections")]
    NotReflectionGroup,
    #[error("fundamental region does not tile the sphere ({0})")]
    BadTiling(f64),
    #[error("reflection in wall {0} does not permute the vertices")]
    NotInvariant(usize),
    #[error("vertex {vertex} is too close to wall {wall} to classify ({distance:e})")]
    AmbiguousClip { vertex: usize, wall: usize, distance: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionVertex {
    pub position: Point,
    /// Coincides with a vertex of the polyhedron.
    pub real: bool,
    pub on_wall: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionEdge {
    pub vertices: (usize, usize),
    /// Lies along an edge of the polyhedron.
    pub real: bool,
    /// The polyhedron edge it lies on, as a sorted vertex pair.
    pub source: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subface {
    pub vertices: Vec<usize>,
    pub face: usize,
    /// The whole face lies in the region.
    pub real: bool,
}

/// The clipped surface as a 2-cell complex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasicRegion {
    pub kind: RegionKind,
    pub vertices: Vec<RegionVertex>,
    pub edges: Vec<RegionEdge>,
    pub subfaces: Vec<Subface>,
    /// Number of vertices lying on a wall.
    pub beta: usize,
    /// Every corner ray leaves the polyhedron through one of its vertices.
    pub corners_are_vertices: bool,
    pub area: f64,
}

impl BasicRegion {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_subfaces(&self) -> usize {
        self.subfaces.len()
    }

    pub fn real_edges(&self) -> impl Iterator<Item = &RegionEdge> {
        self.edges.iter().filter(|e| e.real)
    }

    /// Vertex-subface incidences.
    pub fn incidences(&self) -> usize {
        self.subfaces.iter().map(|f| f.vertices.len()).sum()
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.num_vertices(), self.num_edges(), self.num_subfaces())
    }
}

fn polygon_area(pts: &[Point]) -> f64 {
    let mut s = Point::zeros();
    for k in 0..pts.len() {
        s += pts[k].cross(&pts[(k + 1) % pts.len()]);
    }
    s.norm() / 2.0
}

fn clip_polygon(poly: &[Point], n: &Point, tol: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        let (da, db) = (n.dot(&a), n.dot(&b));
        if da >= -tol {
            out.push(a);
        }
        if (da > tol && db < -tol) || (da < -tol && db > tol) {
            out.push(a + (b - a) * (da / (da - db)));
        }
    }
    out
}

fn dedupe_cycle(mut pts: Vec<Point>, tol: f64) -> Vec<Point> {
    pts.dedup_by(|a, b| (*a - *b).norm() <= tol);
    while pts.len() > 1 && (pts[0] - pts[pts.len() - 1]).norm() <= tol {
        pts.pop();
    }
    pts
}

fn segment_distance(x: &Point, a: &Point, b: &Point) -> f64 {
    let d = b - a;
    let t = ((x - a).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
    (x - (a + d * t)).norm()
}

fn check_invariant(p: &Polyhedron, walls: &[Point], tol: f64) -> Result<(), BasicRegionError> {
    for (k, n) in walls.iter().enumerate() {
        for v in p.vertices() {
            let image = v - n * (2.0 * n.dot(v));
            if !p.vertices().iter().any(|w| (w - image).norm() <= tol) {
                return Err(BasicRegionError::NotInvariant(k));
            }
        }
    }
    Ok(())
}

/// Clips every face of `p` to the region and merges the pieces into one
/// complex. `p` must be centered and each wall reflection must map it to
/// itself.
pub fn clip_surface(p: &Polyhedron, d: &FundamentalRegion) -> Result<BasicRegion, BasicRegionError> {
    let radius = p.circumradius();
    let tol = CLIP_TOL * radius;
    check_invariant(p, &d.walls, 1e3 * tol)?;
    for (i, v) in p.vertices().iter().enumerate() {
        for (k, n) in d.walls.iter().enumerate() {
            let dist = n.dot(v).abs();
            if dist > tol && dist < 1e3 * tol {
                return Err(BasicRegionError::AmbiguousClip { vertex: i, wall: k, distance: dist });
            }
        }
    }

    let mut vertices: Vec<RegionVertex> = Vec::new();
    let mut index_of = |x: Point| -> usize {
        if let Some(i) = vertices.iter().position(|v| (v.position - x).norm() <= 10.0 * tol) {
            return i;
        }
        vertices.push(RegionVertex {
            position: x,
            real: p.vertices().iter().any(|v| (v - x).norm() <= 10.0 * tol),
            on_wall: d.walls.iter().any(|n| n.dot(&x).abs() <= 10.0 * tol),
        });
        vertices.len() - 1
    };

    let mut subfaces = Vec::new();
    let mut area = 0.0;
    for (j, face) in p.faces().iter().enumerate() {
        let mut poly: Vec<Point> = face.iter().map(|&i| p.vertices()[i]).collect();
        for n in &d.walls {
            poly = clip_polygon(&poly, n, tol);
            if poly.is_empty() {
                break;
            }
        }
        let poly = dedupe_cycle(poly, 10.0 * tol);
        if poly.len() < 3 {
            continue;
        }
        let a = polygon_area(&poly);
        let diameter = poly.iter().map(|x| (x - poly[0]).norm()).fold(0.0, f64::max);
        if a <= tol * diameter {
            continue;
        }
        area += a;
        let idx: Vec<usize> = poly.into_iter().map(&mut index_of).collect();
        subfaces.push(Subface {
            real: false,
            vertices: idx,
            face: j,
        });
    }

    let pedges = p.edge_pairs();
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for sf in &subfaces {
        for k in 0..sf.vertices.len() {
            let (a, b) = (sf.vertices[k], sf.vertices[(k + 1) % sf.vertices.len()]);
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                continue;
            }
            let (xa, xb) = (vertices[key.0].position, vertices[key.1].position);
            let source = pedges.iter().copied().find(|&(u, v)| {
                let (pu, pv) = (p.vertices()[u], p.vertices()[v]);
                segment_distance(&xa, &pu, &pv) <= 10.0 * tol && segment_distance(&xb, &pu, &pv) <= 10.0 * tol
            });
            edges.push(RegionEdge {
                vertices: key,
                real: source.is_some(),
                source,
            });
        }
    }
    for sf in subfaces.iter_mut() {
        sf.real = sf.vertices.len() == p.faces()[sf.face].len() && sf.vertices.iter().all(|&i| vertices[i].real);
    }

    let planes = face_plane_vectors(p, DEFAULT_TOL)?;
    let corners_are_vertices = d.corner_rays.iter().all(|c| {
        let exit = planes.iter().map(|a| c.dot(a)).fold(f64::MIN, f64::max);
        let hit = c / exit;
        p.vertices().iter().any(|v| (v - hit).norm() <= 1e3 * tol)
    });

    Ok(BasicRegion {
        kind: d.kind,
        beta: vertices.iter().filter(|v| v.on_wall).count(),
        vertices,
        edges,
        subfaces,
        corners_are_vertices,
        area,
    })
}

/// The region is a disk: `n - e + f = 1`.
pub fn euler_basic_check(b: &BasicRegion) -> bool {
    b.num_vertices() as i64 - b.num_edges() as i64 + b.num_subfaces() as i64 == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    /// Every corner ray passes through a vertex of the polyhedron.
    pub applicable: bool,
    pub mu_region: usize,
    pub two_e_minus_beta: i64,
    pub equality: bool,
}

/// Compares the incidence count of the region with `2e - β`.
pub fn lemma_multiplicity_check(b: &BasicRegion) -> LemmaCheck {
    let mu_region = b.incidences();
    let two_e_minus_beta = 2 * b.num_edges() as i64 - b.beta as i64;
    LemmaCheck {
        applicable: b.corners_are_vertices,
        mu_region,
        two_e_minus_beta,
        equality: mu_region as i64 == two_e_minus_beta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionEdgeCount {
    /// Every edge of the region, fake ones included.
    pub all: usize,
    /// Edges lying along an edge of the polyhedron; one per edge orbit.
    pub real: usize,
}

pub fn edge_orbit_via_region(b: &BasicRegion) -> RegionEdgeCount {
    RegionEdgeCount {
        all: b.num_edges(),
        real: b.real_edges().count(),
    }
}

/// Wavefront OBJ: subfaces as `f` records, real edges as `l` records.
pub fn to_obj(b: &BasicRegion) -> String {
    let mut out = String::from("# basic region\n");
    for v in &b.vertices {
        let _ = writeln!(out, "v {} {} {}", v.position.x, v.position.y, v.position.z);
    }
    for f in &b.subfaces {
        let idx: Vec<String> = f.vertices.iter().map(|i| (i + 1).to_string()).collect();
        let _ = writeln!(out, "f {}", idx.join(" "));
    }
    for e in b.real_edges() {
        let _ = writeln!(out, "l {} {}", e.vertices.0 + 1, e.vertices.1 + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::symmetry::{orbits, symmetry_group, GroupAction, SYMMETRY_TOL};

    fn region(p: &Polyhedron) -> BasicRegion {
        let g = symmetry_group(p, SYMMETRY_TOL).unwrap();
        clip_surface(p, &fundamental_region(&g).unwrap()).unwrap()
    }

    #[test]
    fn truncated_cuboctahedron() {
        let b = region(&catalog::truncated_cuboctahedron());
        assert_eq!(b.counts(), (7, 9, 3));
        assert_eq!(edge_orbit_via_region(&b), RegionEdgeCount { all: 9, real: 3 });
        assert!(euler_basic_check(&b));
        assert_eq!(b.vertices.iter().filter(|v| v.real).count(), 1);
        let lemma = lemma_multiplicity_check(&b);
        assert!(lemma.equality && !lemma.applicable);
    }

    #[test]
    fn cube_and_pyramid() {
        let cube = region(&catalog::cube());
        assert_eq!(cube.counts(), (3, 3, 1));
        assert_eq!(edge_orbit_via_region(&cube), RegionEdgeCount { all: 3, real: 1 });
        assert_eq!(cube.beta, 3);
        let pyr = region(&catalog::pyramid(4, 1.0));
        assert_eq!((pyr.counts(), edge_orbit_via_region(&pyr).real), ((4, 5, 2), 2));
        assert_eq!(pyr.kind, RegionKind::Lune);
        assert!(euler_basic_check(&cube) && euler_basic_check(&pyr));
    }

    #[test]
    fn lemma_on_corner_vertices() {
        // Octahedron: the 4-fold corner hits a vertex, the others do not.
        let oct = lemma_multiplicity_check(&region(&catalog::octahedron()));
        assert!(oct.equality && !oct.applicable);
        // The square pyramid's corners are the apex and the base center.
        let pyr = lemma_multiplicity_check(&region(&catalog::pyramid(4, 1.0)));
        assert!(pyr.equality && !pyr.applicable);
        let cube = lemma_multiplicity_check(&region(&catalog::cube()));
        assert_eq!((cube.mu_region, cube.two_e_minus_beta), (3, 3));
    }

    #[test]
    fn copies_tile_the_surface() {
        for p in [
            catalog::cube(),
            catalog::icosahedron(),
            catalog::dodecahedron(),
            catalog::truncated_cuboctahedron(),
            catalog::prism(5),
            catalog::pyramid(6, 0.7),
        ] {
            let g = symmetry_group(&p, SYMMETRY_TOL).unwrap();
            let b = region(&p);
            let total = b.area * g.order() as f64;
            assert!((total - p.surface_area()).abs() < 1e-9 * p.surface_area());
        }
    }

    #[test]
    fn real_edges_reassemble_the_edge_set() {
        for p in [
            catalog::truncated_cuboctahedron(),
            catalog::rhombic_dodecahedron(),
            catalog::prism(4),
            catalog::pyramid(5, 1.3),
            catalog::icosahedron(),
        ] {
            let g = symmetry_group(&p, SYMMETRY_TOL).unwrap();
            let action = GroupAction::on(&p, &g, SYMMETRY_TOL).unwrap();
            let b = region(&p);
            let mut total = 0;
            for e in b.real_edges() {
                let (u, v) = e.source.unwrap();
                let orbit: BTreeSet<(usize, usize)> = action
                    .vertex_perms()
                    .iter()
                    .map(|pi| (pi[u].min(pi[v]), pi[u].max(pi[v])))
                    .collect();
                total += orbit.len();
            }
            assert_eq!(total, p.edge_pairs().len());
            assert_eq!(edge_orbit_via_region(&b).real, orbits(&p, &g).unwrap().epsilon);
        }
    }

    #[test]
    fn non_invariant_and_ambiguous_inputs() {
        let d = fundamental_region(&symmetry_group(&catalog::cube(), SYMMETRY_TOL).unwrap()).unwrap();
        let err = clip_surface(&catalog::tetrahedron(), &d).unwrap_err();
        assert!(matches!(err, BasicRegionError::NotInvariant(_)));
        // Nudge a cube vertex towards a wall, just outside the snap band.
        let cube = catalog::cube();
        let n = d.walls[0];
        let mut verts = cube.vertices().to_vec();
        let i = (0..verts.len()).find(|&i| n.dot(&verts[i]).abs() > 0.1).unwrap();
        let shift = n * (1e-5 * cube.circumradius() - n.dot(&verts[i]));
        verts[i] += shift;
        let moved = Polyhedron::new(verts, cube.faces().to_vec()).unwrap();
        assert!(matches!(clip_surface(&moved, &d), Err(BasicRegionError::NotInvariant(_) | BasicRegionError::AmbiguousClip { .. })));
    }

    #[test]
    fn single_mirror_hemisphere() {
        let p = catalog::prism(3);
        let mirror = crate::symmetry::IsometryGroup::from_matrices(
            vec![
                nalgebra::Matrix3::identity(),
                nalgebra::Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, -1.0)),
            ],
            SYMMETRY_TOL,
        )
        .unwrap();
        let d = fundamental_region(&mirror).unwrap();
        assert_eq!(d.kind, RegionKind::Hemisphere);
        let b = clip_surface(&p, &d).unwrap();
        assert!(euler_basic_check(&b));
        assert!((b.area * 2.0 - p.surface_area()).abs() < 1e-9);
        // Top triangle, three half rectangles.
        assert_eq!(b.num_subfaces(), 4);
        assert!(lemma_multiplicity_check(&b).equality);
    }

    #[test]
    fn obj_dump() {
        let b = region(&catalog::cube());
        let obj = to_obj(&b);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 3);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 1);
        assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 1);
    }
}
