use std::collections::HashMap;

use nalgebra::Matrix3;

use super::{orthogonalize, symmetry_group, GroupAction, IsometryGroup, SYMMETRY_TOL};
use crate::combinatorics::{incidence_structure, lattice_isomorphisms, LatticeIsomorphism};
use crate::geometry::Polyhedron;

/// For a lattice isomorphism `λ`, the element `h(g) ∈ G(Q)` whose vertex
/// permutation is `λ π_g λ^{-1}`, for every `g`; `None` if some conjugate
/// permutation is not induced by `G(Q)`.
fn conjugate_indices(lambda: &LatticeIsomorphism, ap: &GroupAction, index_q: &HashMap<&[usize], usize>) -> Option<Vec<usize>> {
    let inv = lambda.inverse();
    (0..ap.order())
        .map(|k| {
            let pi = ap.vertex_perm(k);
            let conj: Vec<usize> = (0..pi.len())
                .map(|x| lambda.vertex_map[pi[inv.vertex_map[x]]])
                .collect();
            index_q.get(conj.as_slice()).copied()
        })
        .collect()
}

/// An orthogonal `f` with `f g f^T = h(g)` for all pairs, found by averaging
/// `h(g) M g^T` over the group for a few fixed `M`.
fn intertwiner(gp: &[Matrix3<f64>], hq: &[Matrix3<f64>]) -> Option<Matrix3<f64>> {
    let seeds = [
        Matrix3::identity(),
        Matrix3::new(0.3, -1.2, 0.7, 0.5, 0.1, -0.9, 1.1, 0.4, 0.2),
        Matrix3::new(-0.6, 0.2, 1.3, 0.9, -0.7, 0.1, 0.2, 1.5, -0.4),
    ];
    for m in seeds {
        let avg = gp.iter().zip(hq).fold(Matrix3::zeros(), |acc, (g, h)| acc + h * m * g.transpose());
        if avg.determinant().abs() < 1e-9 * avg.norm().powi(3).max(1e-300) {
            continue;
        }
        let f = orthogonalize(&avg);
        if gp.iter().zip(hq).all(|(g, h)| (f * g * f.transpose() - h).amax() < 1e-6) {
            return Some(f);
        }
    }
    None
}

/// Symmetry equivalence: a lattice isomorphism `λ` and an isometry `f` with
/// `λ(g x) = (f g f^{-1}) λ(x)` for all `g ∈ G(P)`.
pub fn symmetry_equivalent(p: &Polyhedron, q: &Polyhedron) -> bool {
    let (Ok(gp), Ok(gq)) = (symmetry_group(p, SYMMETRY_TOL), symmetry_group(q, SYMMETRY_TOL)) else {
        return false;
    };
    if gp.order() != gq.order() {
        return false;
    }
    let (Ok(ip), Ok(iq)) = (incidence_structure(p), incidence_structure(q)) else {
        return false;
    };
    let (Ok(ap), Ok(aq)) = (GroupAction::on(p, &gp, SYMMETRY_TOL), GroupAction::on(q, &gq, SYMMETRY_TOL)) else {
        return false;
    };
    let Ok(lambdas) = lattice_isomorphisms(&ip, &iq) else {
        return false;
    };
    let index_q: HashMap<&[usize], usize> = aq.vertex_perms().iter().enumerate().map(|(k, v)| (v.as_slice(), k)).collect();
    lambdas.iter().any(|lambda| {
        conjugate_indices(lambda, &ap, &index_q).is_some_and(|h| {
            let hq: Vec<Matrix3<f64>> = h.iter().map(|&k| gq.elements()[k]).collect();
            intertwiner(gp.elements(), &hq).is_some()
        })
    })
}

/// `G`-equivalence for a fixed group: `G` acts on both polyhedra and some
/// lattice isomorphism commutes with the two actions.
pub fn g_equivalent(p: &Polyhedron, q: &Polyhedron, g: &IsometryGroup) -> bool {
    let (Ok(ap), Ok(aq)) = (GroupAction::on(p, g, SYMMETRY_TOL), GroupAction::on(q, g, SYMMETRY_TOL)) else {
        return false;
    };
    let (Ok(ip), Ok(iq)) = (incidence_structure(p), incidence_structure(q)) else {
        return false;
    };
    let Ok(lambdas) = lattice_isomorphisms(&ip, &iq) else {
        return false;
    };
    lambdas.iter().any(|lambda| {
        (0..g.order()).all(|k| {
            let (pp, pq) = (ap.vertex_perm(k), aq.vertex_perm(k));
            (0..pp.len()).all(|i| lambda.vertex_map[pp[i]] == pq[lambda.vertex_map[i]])
        })
    })
}
