use nalgebra::DMatrix;
use serde::Serialize;

use super::action::orbits_with;
use super::{GroupAction, IsometryGroup, SymmetryError, SYMMETRY_TOL};
use crate::combinatorics::incidence_structure;
use crate::geometry::Polyhedron;
use crate::realization::{assemble_jacobian, RealizationError, RANK_TOL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryTypeReport {
    pub vertex_freedom_sum: usize,
    pub face_freedom_sum: usize,
    pub mu_star: usize,
    pub fix_dim: usize,
    /// Infinitesimal rotations commuting with the group.
    pub rot_dim: usize,
    pub dim_symmetry_type: i64,
    pub epsilon: usize,
    pub theorem_holds: bool,
    pub group_is_reflection: bool,
}

/// `Σ δ(vertex orbits) + Σ δ(face orbits) - μ* - dim Fix(G) - rot_dim - 1`.
///
/// The last three terms remove the similarities that preserve the symmetry
/// type: translations inside `Fix(G)`, rotations commuting with `G` and the
/// dilation. `rot_dim` vanishes for every reflection group except the single
/// mirror `[1]` (where it is 1) and the trivial group (3).
pub fn symmetry_type_dimension(p: &Polyhedron, g: &IsometryGroup) -> Result<SymmetryTypeReport, SymmetryError> {
    let action = GroupAction::on(p, g, SYMMETRY_TOL)?;
    let inc = incidence_structure(p)?;
    let d = orbits_with(&inc, g, &action);
    let vertex_freedom_sum: usize = d.vertex_deltas().iter().sum();
    let face_freedom_sum: usize = d.face_deltas().iter().sum();
    let (fix_dim, rot_dim) = (g.fix_dim(), g.rot_dim());
    let dim = (vertex_freedom_sum + face_freedom_sum) as i64
        - d.mu_star as i64
        - fix_dim as i64
        - rot_dim as i64
        - 1;
    Ok(SymmetryTypeReport {
        vertex_freedom_sum,
        face_freedom_sum,
        mu_star: d.mu_star,
        fix_dim,
        rot_dim,
        dim_symmetry_type: dim,
        epsilon: d.epsilon,
        theorem_holds: dim == d.epsilon as i64 - 1,
        group_is_reflection: g.generators_are_reflections(),
    })
}

/// Independent evaluation of the symmetry-type dimension: the kernel of the
/// incidence Jacobian restricted to `G`-invariant perturbations `(ξ, η)`,
/// minus the invariant similarities.
pub fn equivariant_rank_oracle(p: &Polyhedron, g: &IsometryGroup) -> Result<i64, SymmetryError> {
    let action = GroupAction::on(p, g, SYMMETRY_TOL)?;
    let jac = assemble_jacobian(p).map_err(|e| match e {
        RealizationError::Combinatorics(c) => SymmetryError::Combinatorics(c),
        _ => SymmetryError::Degenerate,
    })?;
    let (r, s) = (jac.num_vertices(), jac.num_faces());
    let n = 3 * (r + s);
    let order = g.order() as f64;
    // Reynolds operator: average of the block permutation matrices ρ(g).
    let mut reynolds = DMatrix::<f64>::zeros(n, n);
    for (k, m) in g.elements().iter().enumerate() {
        let blocks = action
            .vertex_perm(k)
            .iter()
            .enumerate()
            .map(|(i, &pi)| (pi, i))
            .chain(action.face_perm(k).iter().enumerate().map(|(j, &sj)| (r + sj, r + j)));
        for (to, from) in blocks {
            let mut view = reynolds.fixed_view_mut::<3, 3>(3 * to, 3 * from);
            view += m / order;
        }
    }
    let defect = (&reynolds * &reynolds - &reynolds).amax();
    if defect > 1e-8 {
        return Err(SymmetryError::NotIdempotent(defect));
    }
    let sym = (&reynolds + reynolds.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let cols: Vec<_> = (0..n)
        .filter(|&k| eig.eigenvalues[k] > 0.5)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        return Ok(-(g.fix_dim() as i64) - g.rot_dim() as i64 - 1);
    }
    let basis = DMatrix::from_columns(&cols);
    let restricted = jac.matrix() * &basis;
    let dims = restricted.nrows().max(restricted.ncols());
    let sv = restricted.svd(false, false).singular_values;
    let s1 = sv.max();
    let cut = RANK_TOL * s1 * dims as f64;
    let rank = sv.iter().filter(|&&x| x > cut).count();
    let kernel = cols.len() - rank;
    Ok(kernel as i64 - g.fix_dim() as i64 - g.rot_dim() as i64 - 1)
}
