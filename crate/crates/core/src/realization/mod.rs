//! The incidence map `Φ[i,j](ξ, η) = <v_i + ξ_i, a_j + η_j> - 1` and its
//! Jacobian at the origin. Full row rank of the Jacobian makes the space of
//! face-equivalent polyhedra a manifold of dimension `3(r + s) - μ`.

mod deform;

pub use deform::{deform, DEFORM_TOL};

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{incidence_structure, CombinatoricsError, IncidenceStructure};
use crate::exact::{exact_jacobian, exact_rank, ExactError, ExactPolyhedron};
use crate::geometry::{face_plane_vectors, GeometryError, Polyhedron, DEFAULT_TOL};

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Dimension of the similarity group of 3-space.
pub const SIM3_DIM: usize = 7;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RealizationError {
    #[error("face plane vectors are missing (is the origin interior?)")]
    PlanesMissing,
    #[error("direction has length {found}, expected {expected}")]
    DirectionLength { expected: usize, found: usize },
    #[error("Newton correction did not converge in {0} iterations")]
    NewtonDiverged(usize),
    #[error("combinatorial type changed: vertex {vertex} crossed the plane of face {face}")]
    CombinatoricsChanged { vertex: usize, face: usize },
    #[error("deformed polyhedron is not face equivalent to the input")]
    NotFaceEquivalent,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceJacobian {
    matrix: DMatrix<f64>,
    row_index: Vec<(usize, usize)>,
    r: usize,
    s: usize,
}

impl IncidenceJacobian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Incident pair `[i, j]` of every row.
    pub fn row_index(&self) -> &[(usize, usize)] {
        &self.row_index
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn num_vertices(&self) -> usize {
        self.r
    }

    pub fn num_faces(&self) -> usize {
        self.s
    }

    /// First column of the vertex triple `i`.
    pub fn vertex_column(&self, i: usize) -> usize {
        3 * i
    }

    /// First column of the face triple `j`.
    pub fn face_column(&self, j: usize) -> usize {
        3 * (self.r + j)
    }

    /// MatrixMarket coordinate text (1-based indices, nonzeros only).
    pub fn to_matrix_market(&self) -> String {
        let mut entries = Vec::new();
        for c in 0..self.ncols() {
            for r in 0..self.nrows() {
                let v = self.matrix[(r, c)];
                if v != 0.0 {
                    entries.push((r + 1, c + 1, v));
                }
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
        let _ = writeln!(out, "{} {} {}", self.nrows(), self.ncols(), entries.len());
        for (r, c, v) in entries {
            let _ = writeln!(out, "{r} {c} {v:?}");
        }
        out
    }
}

fn planes_of(p: &Polyhedron) -> Result<Vec<nalgebra::Vector3<f64>>, RealizationError> {
    match p.planes() {
        Some(a) => Ok(a.to_vec()),
        None => face_plane_vectors(p, DEFAULT_TOL).map_err(|_| RealizationError::PlanesMissing),
    }
}

/// Row `[i, j]` holds `a_j` in vertex triple `i` and `v_i` in face triple `j`.
pub fn assemble_jacobian(p: &Polyhedron) -> Result<IncidenceJacobian, RealizationError> {
    let planes = planes_of(p)?;
    let inc = incidence_structure(p)?;
    Ok(jacobian_at(p.vertices(), &planes, &inc))
}

pub(crate) fn jacobian_at(
    vertices: &[nalgebra::Vector3<f64>],
    planes: &[nalgebra::Vector3<f64>],
    inc: &IncidenceStructure,
) -> IncidenceJacobian {
    let (r, s) = (vertices.len(), planes.len());
    let row_index = inc.incident_pairs();
    let mut matrix = DMatrix::zeros(row_index.len(), 3 * (r + s));
    for (row, &(i, j)) in row_index.iter().enumerate() {
        for k in 0..3 {
            matrix[(row, 3 * i + k)] = planes[j][k];
            matrix[(row, 3 * (r + j) + k)] = vertices[i][k];
        }
    }
    IncidenceJacobian { matrix, row_index, r, s }
}

/// Singular values in decreasing order.
pub fn singular_values(j: &IncidenceJacobian) -> Vec<f64> {
    let mut sv: Vec<f64> = j.matrix.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn threshold(j: &IncidenceJacobian, sigma1: f64, tol: f64) -> f64 {
    tol * sigma1 * j.nrows().max(j.ncols()) as f64
}

/// Numerical rank: singular values above `tol · σ_1 · max(rows, cols)`.
pub fn rank(j: &IncidenceJacobian, tol: f64) -> usize {
    let sv = singular_values(j);
    let Some(&s1) = sv.first() else {
        return 0;
    };
    sv.iter().filter(|&&s| s > threshold(j, s1, tol)).count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationReport {
    pub mu: usize,
    pub rank: usize,
    pub dim_face_type: usize,
    pub dim_mod_sim: i64,
    pub expected_dim_mod_sim: i64,
    pub full_rank: bool,
    /// Empty in exact mode.
    pub singular_values: Vec<f64>,
    pub exact: bool,
}

fn report(mu: usize, rank: usize, cols: usize, e: usize, singular_values: Vec<f64>, exact: bool) -> RealizationReport {
    let dim_face_type = cols - rank;
    RealizationReport {
        mu,
        rank,
        dim_face_type,
        dim_mod_sim: dim_face_type as i64 - SIM3_DIM as i64,
        expected_dim_mod_sim: e as i64 - 1,
        full_rank: rank == mu,
        singular_values,
        exact,
    }
}

pub fn realization_report(p: &Polyhedron) -> Result<RealizationReport, RealizationError> {
    let j = assemble_jacobian(p)?;
    let sv = singular_values(&j);
    let s1 = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > threshold(&j, s1, RANK_TOL)).count();
    let e = incidence_structure(p)?.num_edges();
    Ok(report(j.nrows(), rank, j.ncols(), e, sv, false))
}

/// Rank over the rationals; fails when `p` has no exact rational model.
pub fn realization_report_exact(p: &Polyhedron) -> Result<RealizationReport, RealizationError> {
    let inc = incidence_structure(p)?;
    let e = ExactPolyhedron::from_polyhedron(p)?;
    let rows = exact_jacobian(&e, &inc);
    let cols = 3 * (inc.num_vertices() + inc.num_faces());
    Ok(report(inc.mu(), exact_rank(&rows), cols, inc.num_edges(), Vec::new(), true))
}

/// Orthonormal basis of the kernel, `3(r + s) - rank` vectors.
pub fn tangent_basis(j: &IncidenceJacobian, tol: f64) -> Vec<DVector<f64>> {
    let n = j.ncols();
    // Padding to a square matrix makes V a full orthogonal basis.
    let mut square = DMatrix::zeros(n.max(j.nrows()), n);
    square.rows_mut(0, j.nrows()).copy_from(&j.matrix);
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let s1 = svd.singular_values.max();
    let cut = threshold(j, s1, tol);
    (0..n)
        .filter(|&k| svd.singular_values[k] <= cut)
        .map(|k| v_t.row(k).transpose())
        .collect()
}

/// The seven similarity fields lifted to `(ξ, η)`: three translations,
/// three infinitesimal rotations and the dilation.
pub fn similarity_fields(p: &Polyhedron) -> Result<Vec<DVector<f64>>, RealizationError> {
    let planes = planes_of(p)?;
    let v = p.vertices();
    let (r, s) = (v.len(), planes.len());
    let field = |xi: &dyn Fn(usize) -> nalgebra::Vector3<f64>, eta: &dyn Fn(usize) -> nalgebra::Vector3<f64>| {
        let mut x = DVector::zeros(3 * (r + s));
        for i in 0..r {
            x.fixed_rows_mut::<3>(3 * i).copy_from(&xi(i));
        }
        for j in 0..s {
            x.fixed_rows_mut::<3>(3 * (r + j)).copy_from(&eta(j));
        }
        x
    };
    let mut out = Vec::with_capacity(SIM3_DIM);
    for axis in 0..3 {
        let t = nalgebra::Vector3::ith(axis, 1.0);
        out.push(field(&|_| t, &|j| -planes[j] * planes[j].dot(&t)));
    }
    for axis in 0..3 {
        let w = nalgebra::Vector3::ith(axis, 1.0);
        out.push(field(&|i| w.cross(&v[i]), &|j| w.cross(&planes[j])));
    }
    out.push(field(&|i| v[i], &|j| -planes[j]));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn shapes_and_ranks() {
        for (p, rows, cols) in [
            (catalog::figure1(), 26, 45),
            (catalog::tetrahedron(), 12, 24),
            (catalog::cube(), 24, 42),
        ] {
            let j = assemble_jacobian(&p).unwrap();
            assert_eq!((j.nrows(), j.ncols()), (rows, cols));
            assert_eq!(rank(&j, RANK_TOL), rows);
        }
    }

    #[test]
    fn cube_rows_are_supported_on_two_triples() {
        let cube = catalog::cube();
        let j = assemble_jacobian(&cube).unwrap();
        for r in 0..j.nrows() {
            let (i, f) = j.row_index()[r];
            let support: Vec<usize> = (j.vertex_column(i)..j.vertex_column(i) + 3)
                .chain(j.face_column(f)..j.face_column(f) + 3)
                .collect();
            assert_eq!(support.len(), 6);
            for c in 0..j.ncols() {
                if !support.contains(&c) {
                    assert_eq!(j.matrix()[(r, c)], 0.0);
                }
            }
            assert!((0..3).all(|k| j.matrix()[(r, j.face_column(f) + k)] == cube.vertices()[i][k]));
            // Axis-aligned plane vectors leave two structural zeros.
            let nz = j.matrix().row(r).iter().filter(|x| **x != 0.0).count();
            assert_eq!(nz, 4);
        }
    }

    #[test]
    fn rows_follow_lexicographic_pairs() {
        let j = assemble_jacobian(&catalog::figure1()).unwrap();
        let mut sorted = j.row_index().to_vec();
        sorted.sort();
        assert_eq!(j.row_index(), sorted.as_slice());
        assert_eq!(j.row_index()[0].0, 0);
    }

    #[test]
    fn duplicated_row_drops_rank() {
        let mut j = assemble_jacobian(&catalog::tetrahedron()).unwrap();
        let first = j.matrix.row(0).clone_owned();
        j.matrix = j.matrix.clone().insert_row(1, 0.0);
        j.matrix.row_mut(1).copy_from(&first);
        assert_eq!(j.nrows(), 13);
        assert_eq!(rank(&j, RANK_TOL), 12);
    }

    #[test]
    fn reports() {
        let cube = realization_report(&catalog::cube()).unwrap();
        assert_eq!((cube.dim_mod_sim, cube.expected_dim_mod_sim), (11, 11));
        assert!(cube.full_rank);
        let fig = realization_report(&catalog::figure1()).unwrap();
        assert_eq!(fig.dim_mod_sim, 12);
        let pyr = realization_report(&catalog::pyramid(4, 1.0)).unwrap();
        assert_eq!((pyr.rank, pyr.dim_mod_sim), (16, 7));
        let exact = realization_report_exact(&catalog::cube()).unwrap();
        assert_eq!((exact.rank, exact.dim_mod_sim, exact.exact), (24, 11, true));
    }

    #[test]
    fn kernel_dimensions_and_residuals() {
        for (p, dim) in [(catalog::cube(), 18), (catalog::tetrahedron(), 12)] {
            let j = assemble_jacobian(&p).unwrap();
            let basis = tangent_basis(&j, RANK_TOL);
            assert_eq!(basis.len(), dim);
            let norm = j.matrix().norm();
            for x in &basis {
                assert!((j.matrix() * x).norm() <= 1e-9 * norm * x.norm());
            }
        }
    }

    #[test]
    fn similarity_fields_lie_in_the_kernel() {
        for p in [catalog::cube(), catalog::figure1(), catalog::icosahedron()] {
            let j = assemble_jacobian(&p).unwrap();
            let fields = similarity_fields(&p).unwrap();
            for x in &fields {
                assert!((j.matrix() * x).norm() < 1e-12 * x.norm().max(1.0));
            }
            let stacked = DMatrix::from_columns(&fields);
            assert_eq!(stacked.rank(1e-9), 7);
        }
    }

    #[test]
    fn matrix_market_dump() {
        let j = assemble_jacobian(&catalog::tetrahedron()).unwrap();
        let text = j.to_matrix_market();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("%%MatrixMarket"));
        let header: Vec<usize> = lines.next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
        assert_eq!(&header[..2], &[12, 24]);
        assert_eq!(lines.count(), header[2]);
    }
}
