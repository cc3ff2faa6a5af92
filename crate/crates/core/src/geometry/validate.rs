use std::collections::HashMap;

use serde::Serialize;

use super::{cycle_edges, Polyhedron};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub is_convex: bool,
    pub faces_planar: bool,
    pub edges_two_faces: bool,
    pub origin_interior: bool,
    /// Largest vertex-to-face-plane distance over incident pairs, relative to
    /// the circumradius about the barycenter.
    pub worst_planarity_residual: f64,
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.is_convex && self.faces_planar && self.edges_two_faces && self.origin_interior
    }
}

/// Checks the polyhedron invariants at relative tolerance `tol`. Geometric
/// failures are reported, never raised.
pub fn validate(p: &Polyhedron, tol: f64) -> ValidationReport {
    let mut messages = Vec::new();
    let verts = p.vertices();
    let scale = p.scale();
    let center = p.barycenter();

    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges_two_faces = true;
    for face in p.faces() {
        for (u, v) in cycle_edges(face) {
            *directed.entry((u, v)).or_default() += 1;
        }
    }
    for (&(u, v), &count) in &directed {
        let back = directed.get(&(v, u)).copied().unwrap_or(0);
        if count != 1 || back != 1 {
            edges_two_faces = false;
            if u < v || back == 0 {
                messages.push(format!(
                    "edge ({u}, {v}) is used {count} time(s) forward and {back} time(s) backward"
                ));
            }
        }
    }
    messages.sort();

    let mut faces_planar = true;
    let mut is_convex = true;
    let mut origin_interior = true;
    let mut worst = 0.0f64;
    if scale == 0.0 || p.num_faces() == 0 {
        messages.push("polyhedron is degenerate".into());
        return ValidationReport {
            is_convex: false,
            faces_planar: false,
            edges_two_faces,
            origin_interior: false,
            worst_planarity_residual: f64::INFINITY,
            messages,
        };
    }

    for (j, face) in p.faces().iter().enumerate() {
        let n = p.face_normal(j);
        let nn = n.norm();
        if nn <= tol * scale * scale {
            faces_planar = false;
            messages.push(format!("face {j} has vanishing area"));
            continue;
        }
        let n = n / nn;
        let offset = face.iter().map(|&i| verts[i].dot(&n)).sum::<f64>() / face.len() as f64;
        let residual = face
            .iter()
            .map(|&i| (verts[i].dot(&n) - offset).abs() / scale)
            .fold(0.0, f64::max);
        worst = worst.max(residual);
        if residual > tol {
            faces_planar = false;
            messages.push(format!("face {j} is not planar (residual {residual:e})"));
        }
        if center.dot(&n) - offset >= -tol * scale {
            is_convex = false;
            messages.push(format!("barycenter is not inside face {j}"));
        }
        for (i, v) in verts.iter().enumerate() {
            if !face.contains(&i) && v.dot(&n) - offset > -tol * scale {
                is_convex = false;
                messages.push(format!("vertex {i} is not strictly inside face plane {j}"));
            }
        }
        if offset <= tol * scale {
            origin_interior = false;
            messages.push(format!("origin is not strictly inside face plane {j}"));
        }
    }

    ValidationReport {
        is_convex,
        faces_planar,
        edges_two_faces,
        origin_interior,
        worst_planarity_residual: worst,
        messages,
    }
}
