use nalgebra::{DVector, Vector3};

use super::{jacobian_at, planes_of, RealizationError};
use crate::combinatorics::{canonical_form, incidence_structure, IncidenceStructure};
use crate::geometry::{convex_hull, Polyhedron, DEFAULT_TOL};

/// Target for the largest incidence residual `|<v_i, a_j> - 1|` after the
/// Newton correction.
pub const DEFORM_TOL: f64 = 1e-12;

const MAX_NEWTON: usize = 20;

fn unpack(x: &DVector<f64>, r: usize, s: usize) -> (Vec<Vector3<f64>>, Vec<Vector3<f64>>) {
    let triple = |k: usize| Vector3::new(x[3 * k], x[3 * k + 1], x[3 * k + 2]);
    ((0..r).map(triple).collect(), (r..r + s).map(triple).collect())
}

fn residual(x: &DVector<f64>, inc: &IncidenceStructure) -> DVector<f64> {
    let (v, a) = unpack(x, inc.num_vertices(), inc.num_faces());
    let pairs = inc.incident_pairs();
    DVector::from_iterator(pairs.len(), pairs.iter().map(|&(i, j)| v[i].dot(&a[j]) - 1.0))
}

/// Moves `(v, a)` by `step · direction` and projects back onto the incidence
/// variety by minimum-norm Newton corrections (which leave the component
/// along the kernel untouched to first order).
///
/// The result keeps the face cycles of `p` and carries the corrected plane
/// vectors. Face equivalence is verified by rebuilding the hull of the new
/// vertices and comparing canonical forms.
pub fn deform(p: &Polyhedron, direction: &DVector<f64>, step: f64) -> Result<Polyhedron, RealizationError> {
    let planes = planes_of(p)?;
    let inc = incidence_structure(p)?;
    let (r, s) = (p.num_vertices(), p.num_faces());
    if direction.len() != 3 * (r + s) {
        return Err(RealizationError::DirectionLength {
            expected: 3 * (r + s),
            found: direction.len(),
        });
    }
    let mut x = DVector::from_iterator(
        3 * (r + s),
        p.vertices().iter().chain(&planes).flat_map(|t| t.iter().copied()),
    );
    x += direction * step;

    let mut res = residual(&x, &inc);
    let mut norm = res.amax();
    let mut iterations = 0;
    while norm > DEFORM_TOL {
        if iterations == MAX_NEWTON {
            return Err(RealizationError::NewtonDiverged(MAX_NEWTON));
        }
        iterations += 1;
        let (v, a) = unpack(&x, r, s);
        let j = jacobian_at(&v, &a, &inc);
        let delta = j
            .matrix()
            .clone()
            .svd(true, true)
            .solve(&res, 1e-14)
            .map_err(|_| RealizationError::NewtonDiverged(iterations))?;
        let mut t = 1.0;
        loop {
            let candidate = &x - &delta * t;
            let cres = residual(&candidate, &inc);
            let cnorm = cres.amax();
            if cnorm < norm || t < 1e-6 {
                x = candidate;
                res = cres;
                norm = cnorm;
                break;
            }
            t *= 0.5;
        }
    }

    let (verts, new_planes) = unpack(&x, r, s);
    for (j, face) in p.faces().iter().enumerate() {
        for (i, v) in verts.iter().enumerate() {
            if !face.contains(&i) && v.dot(&new_planes[j]) >= 1.0 - DEFAULT_TOL {
                return Err(RealizationError::CombinatoricsChanged { vertex: i, face: j });
            }
        }
    }
    let out = Polyhedron::from_parts(verts, p.faces().to_vec(), Some(new_planes));
    if step != 0.0 {
        let hull = convex_hull(out.vertices())?;
        if hull.num_vertices() != r || canonical_form(&incidence_structure(&hull)?)? != canonical_form(&inc)? {
            return Err(RealizationError::NotFaceEquivalent);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::combinatorics::face_equivalent;
    use crate::geometry::hausdorff_distance;
    use crate::realization::{assemble_jacobian, similarity_fields, tangent_basis, RANK_TOL};

    #[test]
    fn zero_step_is_identity() {
        let p = catalog::cube();
        let n = 3 * (p.num_vertices() + p.num_faces());
        let q = deform(&p, &DVector::from_element(n, 0.3), 0.0).unwrap();
        assert_eq!(q.vertices(), p.vertices());
    }

    #[test]
    fn dilation_scales_the_cube() {
        let p = catalog::cube();
        let dilation = similarity_fields(&p).unwrap().pop().unwrap();
        let q = deform(&p, &dilation, 0.1).unwrap();
        // The Newton correction keeps the cube symmetric: q = c · p.
        let c = q.vertices()[0].norm() / p.vertices()[0].norm();
        assert!(c > 1.0);
        for (a, b) in p.vertices().iter().zip(q.vertices()) {
            assert!((b - a * c).norm() < 1e-12);
        }
        assert!(hausdorff_distance(&p, &q) > 0.0);
        assert!(face_equivalent(&p, &q).is_some());
    }

    #[test]
    fn generic_direction_gives_a_hexahedron() {
        let p = catalog::cube();
        let j = assemble_jacobian(&p).unwrap();
        let basis = tangent_basis(&j, RANK_TOL);
        let mut dir = DVector::zeros(j.ncols());
        for (k, b) in basis.iter().enumerate() {
            dir += b * ((k as f64 * 0.77).sin());
        }
        let dir = dir.normalize();
        let q = deform(&p, &dir, 1e-2).unwrap();
        assert!(face_equivalent(&p, &q).is_some());
        assert!(hausdorff_distance(&p, &q) > 1e-4);
        let planes = q.planes().unwrap();
        for (jf, face) in q.faces().iter().enumerate() {
            for &i in face {
                assert!((q.vertices()[i].dot(&planes[jf]) - 1.0).abs() < DEFORM_TOL);
            }
        }
    }

    #[test]
    fn large_steps_are_refused() {
        let p = catalog::cube();
        let j = assemble_jacobian(&p).unwrap();
        let basis = tangent_basis(&j, RANK_TOL);
        let mut dir = DVector::zeros(j.ncols());
        for (k, b) in basis.iter().enumerate() {
            dir += b * ((k as f64 * 1.3).cos());
        }
        // Remove the similarity part, which never changes the type.
        let sims = nalgebra::DMatrix::from_columns(&similarity_fields(&p).unwrap());
        let q = sims.clone().qr().q();
        dir -= &q * (q.transpose() * &dir);
        let dir = dir.normalize();
        assert!(deform(&p, &dir, 1e-3).is_ok());
        let steps = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
        let outcomes: Vec<bool> = steps.iter().map(|&t| deform(&p, &dir, t).is_ok()).collect();
        assert!(outcomes.contains(&false), "{outcomes:?}");
    }

    #[test]
    fn wrong_length_is_rejected() {
        let p = catalog::cube();
        assert!(matches!(
            deform(&p, &DVector::zeros(3), 0.1),
            Err(RealizationError::DirectionLength { .. })
        ));
    }
}
