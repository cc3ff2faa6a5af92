//! Numerical representation of convex polyhedra.
//!
//! A [`Polyhedron`] stores vertex coordinates and face cycles. Face cycles are
//! counterclockwise when seen from outside. When the origin is strictly
//! interior the face planes can be written as `<x, a_j> = 1` and the vectors
//! `a_j` are cached alongside the combinatorics.

mod hausdorff;
mod hull;
mod off;
mod validate;

pub use hausdorff::{hausdorff_distance, point_polyhedron_distance};
pub use hull::{convex_hull, convex_hull_with, Coplanarity};
pub use off::{load_off, to_off, OffError};
pub(crate) use off::parse_off_raw;
pub use validate::{validate, ValidationReport};

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Default relative tolerance (relative to the circumradius).
pub const DEFAULT_TOL: f64 = 1e-9;

pub type Point = Vector3<f64>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("face {face} has fewer than 3 distinct vertices")]
    ShortFace { face: usize },
    #[error("face {face} references vertex {index}, but there are only {count} vertices")]
    IndexOutOfRange { face: usize, index: usize, count: usize },
    #[error("polyhedron is degenerate (flat or empty)")]
    Degenerate,
    #[error("origin is not strictly inside face plane {face} (offset {offset:e})")]
    OriginNotInterior { face: usize, offset: f64 },
    #[error("vertices of face {face} are not coplanar (residual {residual:e})")]
    NonPlanarFace { face: usize, residual: f64 },
    #[error("vertex {vertex} lies on or outside the plane of face {face}")]
    NotConvex { vertex: usize, face: usize },
    #[error("convex hull input is degenerate: {0}")]
    DegenerateHull(&'static str),
    #[error("coplanar facet merge produced a non-disk face")]
    HullMerge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    vertices: Vec<Point>,
    faces: Vec<Vec<usize>>,
    planes: Option<Vec<Point>>,
}

impl Polyhedron {
    /// Builds a polyhedron after structural checks only: indices in range and
    /// at least three distinct vertices per face. Geometry is not validated.
    pub fn new(vertices: Vec<Point>, faces: Vec<Vec<usize>>) -> Result<Self, GeometryError> {
        for (j, face) in faces.iter().enumerate() {
            if let Some(&index) = face.iter().find(|&&i| i >= vertices.len()) {
                return Err(GeometryError::IndexOutOfRange {
                    face: j,
                    index,
                    count: vertices.len(),
                });
            }
            let mut distinct = face.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 3 || distinct.len() != face.len() {
                return Err(GeometryError::ShortFace { face: j });
            }
        }
        Ok(Self {
            vertices,
            faces,
            planes: None,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Plane vectors `a_j`, present once computed for a polyhedron with the
    /// origin in its interior.
    pub fn planes(&self) -> Option<&[Point]> {
        self.planes.as_deref()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn barycenter(&self) -> Point {
        let sum: Point = self.vertices.iter().sum();
        sum / self.vertices.len().max(1) as f64
    }

    /// Largest vertex norm measured from the origin.
    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest vertex distance from the vertex barycenter; the length scale
    /// used for tolerances.
    pub fn scale(&self) -> f64 {
        let c = self.barycenter();
        self.vertices
            .iter()
            .map(|v| (v - c).norm())
            .fold(0.0, f64::max)
    }

    /// Newell normal of a face (not normalized). Points outward for a
    /// counterclockwise cycle.
    pub fn face_normal(&self, face: usize) -> Point {
        newell_normal(self.faces[face].iter().map(|&i| &self.vertices[i]))
    }

    pub fn face_centroid(&self, face: usize) -> Point {
        let f = &self.faces[face];
        f.iter().map(|&i| self.vertices[i]).sum::<Point>() / f.len() as f64
    }

    /// Reverses every face cycle whose Newell normal points toward `interior`.
    pub fn orient_outward(&mut self, interior: &Point) {
        for j in 0..self.faces.len() {
            let n = self.face_normal(j);
            if n.dot(&(self.face_centroid(j) - interior)) < 0.0 {
                self.faces[j].reverse();
            }
        }
    }

    /// Applies `x -> m x + t` to every vertex. Planes are recomputed when they
    /// were present and the origin stays interior.
    pub fn transformed(&self, m: &Matrix3<f64>, t: &Point) -> Self {
        let vertices = self.vertices.iter().map(|v| m * v + t).collect();
        let mut out = Self {
            vertices,
            faces: self.faces.clone(),
            planes: None,
        };
        if m.determinant() < 0.0 {
            for f in &mut out.faces {
                f.reverse();
            }
        }
        if self.planes.is_some() {
            out.planes = face_plane_vectors(&out, DEFAULT_TOL).ok();
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.transformed(&(Matrix3::identity() * factor), &Point::zeros())
    }

    /// Returns a copy scaled so that the largest vertex norm is 1.
    pub fn normalized(&self) -> Self {
        let r = self.circumradius();
        if r > 0.0 {
            self.scaled(1.0 / r)
        } else {
            self.clone()
        }
    }

    /// Returns a copy with the plane vectors computed and cached.
    pub fn with_planes(mut self, tol: f64) -> Result<Self, GeometryError> {
        let planes = face_plane_vectors(&self, tol)?;
        self.planes = Some(planes);
        Ok(self)
    }

    pub(crate) fn from_parts(vertices: Vec<Point>, faces: Vec<Vec<usize>>, planes: Option<Vec<Point>>) -> Self {
        Self {
            vertices,
            faces,
            planes,
        }
    }

    /// Total surface area.
    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len())
            .map(|j| self.face_normal(j).norm() / 2.0)
            .sum()
    }

    /// Edges as sorted vertex pairs, each listed once, in lexicographic order.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| cycle_edges(f).map(|(a, b)| (a.min(b), a.max(b))))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

pub(crate) fn cycle_edges(cycle: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..cycle.len()).map(move |k| (cycle[k], cycle[(k + 1) % cycle.len()]))
}

pub(crate) fn newell_normal<'a>(points: impl Iterator<Item = &'a Point>) -> Point {
    let pts: Vec<&Point> = points.collect();
    let mut n = Point::zeros();
    for k in 0..pts.len() {
        let p = pts[k];
        let q = pts[(k + 1) % pts.len()];
        n.x += (p.y - q.y) * (p.z + q.z);
        n.y += (p.z - q.z) * (p.x + q.x);
        n.z += (p.x - q.x) * (p.y + q.y);
    }
    n
}

/// Translates the polyhedron so that its vertex barycenter is the origin and
/// computes the face plane vectors.
pub fn center_at_centroid(p: &Polyhedron) -> Result<Polyhedron, GeometryError> {
    if p.vertices.len() < 4 {
        return Err(GeometryError::Degenerate);
    }
    let c = p.barycenter();
    let vertices: Vec<Point> = p.vertices.iter().map(|v| v - c).collect();
    let mut out = Polyhedron::from_parts(vertices, p.faces.clone(), None);
    let scale = out.circumradius();
    if scale == 0.0 {
        return Err(GeometryError::Degenerate);
    }
    // A flat input has every face plane through the barycenter.
    let flat = (0..out.faces.len()).all(|j| {
        let n = out.face_normal(j);
        let nn = n.norm();
        nn == 0.0 || (out.vertices[out.faces[j][0]].dot(&n) / nn).abs() <= DEFAULT_TOL * scale
    });
    if flat {
        return Err(GeometryError::Degenerate);
    }
    out.orient_outward(&Point::zeros());
    out.planes = face_plane_vectors(&out, DEFAULT_TOL).ok();
    Ok(out)
}

/// Computes the vectors `a_j` with `<x, a_j> = 1` on face `j`.
///
/// `tol` is relative to the circumradius. Every incident vertex must satisfy
/// the plane equation within `tol` and every other vertex must lie strictly on
/// the origin side.
pub fn face_plane_vectors(p: &Polyhedron, tol: f64) -> Result<Vec<Point>, GeometryError> {
    let scale = p.circumradius();
    if scale == 0.0 {
        return Err(GeometryError::Degenerate);
    }
    let mut planes = Vec::with_capacity(p.faces.len());
    for (j, face) in p.faces.iter().enumerate() {
        let n = p.face_normal(j);
        let nn = n.norm();
        if nn == 0.0 {
            return Err(GeometryError::Degenerate);
        }
        let n = n / nn;
        let offset = face.iter().map(|&i| p.vertices[i].dot(&n)).sum::<f64>() / face.len() as f64;
        if offset.abs() <= tol * scale {
            return Err(GeometryError::OriginNotInterior { face: j, offset });
        }
        // A negative offset means the origin is outside (cycles are outward).
        if offset < 0.0 {
            return Err(GeometryError::OriginNotInterior { face: j, offset });
        }
        let residual = face
            .iter()
            .map(|&i| (p.vertices[i].dot(&n) - offset).abs())
            .fold(0.0, f64::max);
        if residual > tol * scale {
            return Err(GeometryError::NonPlanarFace { face: j, residual: residual / scale });
        }
        let a = n / offset;
        for (i, v) in p.vertices.iter().enumerate() {
            if !face.contains(&i) && v.dot(&a) > 1.0 - tol {
                return Err(GeometryError::NotConvex { vertex: i, face: j });
            }
        }
        planes.push(a);
    }
    Ok(planes)
}
