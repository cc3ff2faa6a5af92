//! Finite symmetry groups of centered polyhedra, their orbits on the face
//! lattice and the dimension of the symmetry type.

mod action;
mod dimension;
mod equivalence;

pub use action::{
    burnside_count, degree_of_freedom_face, degree_of_freedom_vertex, orbits, stratum_dimension, GroupAction, Orbit,
    OrbitDecomposition,
};
pub use dimension::{equivariant_rank_oracle, symmetry_type_dimension, SymmetryTypeReport};
pub use equivalence::{g_equivalent, symmetry_equivalent};

use std::fmt;

use nalgebra::{DMatrix, Matrix3};
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{combinatorial_automorphisms, incidence_structure, CombinatoricsError};
use crate::geometry::{Point, Polyhedron};

/// Vertex matching tolerance relative to the circumradius.
pub const SYMMETRY_TOL: f64 = 1e-7;

/// Singular values below this count as zero in fixed-subspace ranks.
const FIX_RANK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SymmetryError {
    #[error("polyhedron is not centered at its vertex barycenter")]
    NotCentered,
    #[error("vertices span less than three dimensions")]
    Degenerate,
    #[error("group is not closed: product of elements {0} and {1} is missing")]
    NotClosed(usize, usize),
    #[error("matrix {0} is not orthogonal")]
    NotOrthogonal(usize),
    #[error("group element {0} does not permute the vertex set")]
    NotASymmetry(usize),
    #[error("group is not generated by reflections")]
    NotReflectionGroup,
    #[error("invariant projection is not idempotent (defect {0:e})")]
    NotIdempotent(f64),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
}

/// Finite reflection groups of 3-space, plus the catch-all tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Trivial,
    /// `[q]`: `q` mirrors through a common axis, order `2q`. `q = 1` is a
    /// single mirror.
    Dihedral { q: usize },
    /// `[2, q]`: `[q]` plus the equatorial mirror, order `4q`.
    Prismatic { q: usize },
    /// `[3, 3]`, order 24.
    Tetrahedral,
    /// `[3, 4]`, order 48.
    Octahedral,
    /// `[3, 5]`, order 120.
    Icosahedral,
    /// Finite group not generated by its reflections.
    NonReflection,
}

impl Classification {
    pub fn q(&self) -> Option<usize> {
        match *self {
            Classification::Dihedral { q } | Classification::Prismatic { q } => Some(q),
            _ => None,
        }
    }

    /// Order predicted by the classification, if it is a reflection group.
    pub fn expected_order(&self) -> Option<usize> {
        match *self {
            Classification::Trivial => Some(1),
            Classification::Dihedral { q } => Some(2 * q),
            Classification::Prismatic { q } => Some(4 * q),
            Classification::Tetrahedral => Some(24),
            Classification::Octahedral => Some(48),
            Classification::Icosahedral => Some(120),
            Classification::NonReflection => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Trivial => write!(f, "trivial"),
            Classification::Dihedral { q } => write!(f, "[{q}]"),
            Classification::Prismatic { q } => write!(f, "[2,{q}]"),
            Classification::Tetrahedral => write!(f, "[3,3]"),
            Classification::Octahedral => write!(f, "[3,4]"),
            Classification::Icosahedral => write!(f, "[3,5]"),
            Classification::NonReflection => write!(f, "non-reflection"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryGroup {
    elements: Vec<Matrix3<f64>>,
    classification: Classification,
    fix_dim: usize,
    generators_are_reflections: bool,
}

fn close(a: &Matrix3<f64>, b: &Matrix3<f64>, tol: f64) -> bool {
    (a - b).amax() <= tol
}

fn sort_key(m: &Matrix3<f64>) -> Vec<i64> {
    let mut key = vec![-(m.determinant().round() as i64), -(m.trace() * 1e6).round() as i64];
    key.extend(m.iter().map(|x| (x * 1e6).round() as i64));
    key
}

/// Nearest orthogonal matrix (polar factor).
pub(crate) fn orthogonalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// `3 - rank` of the stacked blocks.
pub(crate) fn kernel_dim_of_stack(blocks: impl Iterator<Item = Matrix3<f64>>) -> usize {
    let blocks: Vec<Matrix3<f64>> = blocks.collect();
    if blocks.is_empty() {
        return 3;
    }
    let mut stacked = DMatrix::zeros(3 * blocks.len(), 3);
    for (k, b) in blocks.iter().enumerate() {
        stacked.fixed_view_mut::<3, 3>(3 * k, 0).copy_from(b);
    }
    let sv = stacked.svd(false, false).singular_values;
    3 - sv.iter().filter(|&&s| s > FIX_RANK_TOL).count()
}

/// Dimension of the subspace fixed by every matrix.
pub fn fixed_dim<'a>(mats: impl IntoIterator<Item = &'a Matrix3<f64>>) -> usize {
    kernel_dim_of_stack(mats.into_iter().map(|g| g - Matrix3::identity()))
}

/// Whether `g` is a reflection in a plane.
pub fn is_reflection(g: &Matrix3<f64>) -> bool {
    g.determinant() < 0.0 && (g.trace() - 1.0).abs() < 1e-6
}

/// Unit normal of the mirror of a reflection, sign normalized so that its
/// first nonzero coordinate is positive.
pub fn mirror_normal(g: &Matrix3<f64>) -> Point {
    let p = Matrix3::identity() - g;
    let col = (0..3).map(|k| p.column(k).into_owned()).max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let n = col.normalize();
    let first = n.iter().copied().find(|x| x.abs() > 1e-9).unwrap_or(1.0);
    if first < 0.0 {
        -n
    } else {
        n
    }
}

impl IsometryGroup {
    /// Validates orthogonality and closure, orders the elements (identity
    /// first) and classifies the group.
    pub fn from_matrices(mut elements: Vec<Matrix3<f64>>, tol: f64) -> Result<Self, SymmetryError> {
        for (k, g) in elements.iter().enumerate() {
            if !close(&(g.transpose() * g), &Matrix3::identity(), tol.max(1e-9) * 10.0) {
                return Err(SymmetryError::NotOrthogonal(k));
            }
        }
        if !elements.iter().any(|g| close(g, &Matrix3::identity(), tol)) {
            elements.push(Matrix3::identity());
        }
        elements.sort_by_key(sort_key);
        let id = elements.iter().position(|g| close(g, &Matrix3::identity(), tol)).unwrap();
        let identity = elements.remove(id);
        elements.insert(0, identity);
        elements.dedup_by(|a, b| close(a, b, tol));
        let find = |m: &Matrix3<f64>| elements.iter().position(|g| close(g, m, 10.0 * tol.max(1e-9)));
        for a in 0..elements.len() {
            for b in 0..elements.len() {
                if find(&(elements[a] * elements[b])).is_none() {
                    return Err(SymmetryError::NotClosed(a, b));
                }
            }
        }
        let (classification, generators_are_reflections) = classify(&elements, tol);
        let fix_dim = fixed_dim(&elements);
        Ok(Self {
            elements,
            classification,
            fix_dim,
            generators_are_reflections,
        })
    }

    pub fn trivial() -> Self {
        Self::from_matrices(vec![Matrix3::identity()], SYMMETRY_TOL).unwrap()
    }

    pub fn elements(&self) -> &[Matrix3<f64>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn q(&self) -> Option<usize> {
        self.classification.q()
    }

    /// Dimension of the common fixed subspace `Fix(G)`.
    pub fn fix_dim(&self) -> usize {
        self.fix_dim
    }

    /// Dimension of the infinitesimal rotations commuting with `G`, i.e.
    /// axial vectors `ω` with `det(g) g ω = ω` for all `g`.
    pub fn rot_dim(&self) -> usize {
        kernel_dim_of_stack(self.elements.iter().map(|g| g * g.determinant().signum() - Matrix3::identity()))
    }

    pub fn generators_are_reflections(&self) -> bool {
        self.generators_are_reflections
    }

    pub fn reflections(&self) -> Vec<&Matrix3<f64>> {
        self.elements.iter().filter(|g| is_reflection(g)).collect()
    }

    /// `h G h^T` for an orthogonal `h`.
    pub fn conjugated(&self, h: &Matrix3<f64>) -> Self {
        let elements = self.elements.iter().map(|g| h * g * h.transpose()).collect();
        Self::from_matrices(elements, SYMMETRY_TOL).expect("conjugate of a group is a group")
    }

    /// Whether both groups consist of the same matrices.
    pub fn same_elements(&self, other: &Self, tol: f64) -> bool {
        self.order() == other.order()
            && self.elements.iter().all(|g| other.elements.iter().any(|h| close(g, h, tol)))
    }
}

/// Closure of a generating set under multiplication.
fn generate(gens: &[Matrix3<f64>], tol: f64) -> Vec<Matrix3<f64>> {
    let mut out = vec![Matrix3::identity()];
    let mut k = 0;
    while k < out.len() {
        for g in gens {
            let m = out[k] * g;
            if !out.iter().any(|h| close(h, &m, tol)) {
                out.push(m);
            }
        }
        k += 1;
        if out.len() > 240 {
            break;
        }
    }
    out
}

fn classify(elements: &[Matrix3<f64>], tol: f64) -> (Classification, bool) {
    let n = elements.len();
    if n == 1 {
        return (Classification::Trivial, true);
    }
    let reflections: Vec<Matrix3<f64>> = elements.iter().filter(|g| is_reflection(g)).copied().collect();
    let generated = generate(&reflections, 10.0 * tol.max(1e-9));
    if generated.len() != n {
        return (Classification::NonReflection, false);
    }
    let c = match fixed_dim(elements) {
        2 => Classification::Dihedral { q: 1 },
        1 => Classification::Dihedral { q: n / 2 },
        _ if n.is_multiple_of(4) && reflections.len() == n / 4 + 1 => Classification::Prismatic { q: n / 4 },
        _ => match n {
            24 => Classification::Tetrahedral,
            48 => Classification::Octahedral,
            120 => Classification::Icosahedral,
            _ => Classification::NonReflection,
        },
    };
    (c, c != Classification::NonReflection)
}

/// Classification of a verified group.
pub fn classify_group(g: &IsometryGroup) -> Classification {
    g.classification
}

/// Three vertices spanning space as well as possible.
fn frame(vertices: &[Point]) -> Option<[usize; 3]> {
    let i0 = (0..vertices.len()).max_by(|&a, &b| vertices[a].norm().total_cmp(&vertices[b].norm()))?;
    let v0 = vertices[i0];
    let i1 = (0..vertices.len()).max_by(|&a, &b| {
        v0.cross(&vertices[a]).norm().total_cmp(&v0.cross(&vertices[b]).norm())
    })?;
    let n = v0.cross(&vertices[i1]);
    let i2 = (0..vertices.len()).max_by(|&a, &b| n.dot(&vertices[a]).abs().total_cmp(&n.dot(&vertices[b]).abs()))?;
    let m = Matrix3::from_columns(&[v0, vertices[i1], vertices[i2]]);
    (m.determinant().abs() > 1e-9 * v0.norm().powi(3)).then_some([i0, i1, i2])
}

/// The group of orthogonal maps preserving `p`.
///
/// Every combinatorial automorphism proposes the linear map sending a fixed
/// frame of three vertices to their images; it is kept when it is orthogonal
/// and moves every vertex onto its image within `tol · circumradius`.
pub fn symmetry_group(p: &Polyhedron, tol: f64) -> Result<IsometryGroup, SymmetryError> {
    let radius = p.circumradius();
    if p.barycenter().norm() > tol * radius.max(f64::MIN_POSITIVE) {
        return Err(SymmetryError::NotCentered);
    }
    let verts = p.vertices();
    let [a, b, c] = frame(verts).ok_or(SymmetryError::Degenerate)?;
    let base = Matrix3::from_columns(&[verts[a], verts[b], verts[c]]);
    let inverse = base.try_inverse().ok_or(SymmetryError::Degenerate)?;
    let inc = incidence_structure(p)?;
    let mut elements = Vec::new();
    for aut in combinatorial_automorphisms(&inc)? {
        let pi = &aut.vertex_map;
        let image = Matrix3::from_columns(&[verts[pi[a]], verts[pi[b]], verts[pi[c]]]);
        let g = image * inverse;
        if !close(&(g.transpose() * g), &Matrix3::identity(), 1e3 * tol) {
            continue;
        }
        let g = orthogonalize(&g);
        if verts.iter().enumerate().all(|(i, v)| (g * v - verts[pi[i]]).norm() <= tol * radius) {
            elements.push(g);
        }
    }
    IsometryGroup::from_matrices(elements, 1e-6)
}
