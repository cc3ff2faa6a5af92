use super::{Point, Polyhedron};

fn segment_distance(x: &Point, a: &Point, b: &Point) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    let t = if len2 == 0.0 { 0.0 } else { ((x - a).dot(&d) / len2).clamp(0.0, 1.0) };
    (x - (a + d * t)).norm()
}

/// Euclidean distance from `x` to the solid polyhedron `p` (zero inside).
///
/// The closest point of a convex body to an exterior point lies on its
/// boundary, so the distance is the minimum over face polygons. Each face is
/// treated as a planar convex polygon.
pub fn point_polyhedron_distance(x: &Point, p: &Polyhedron) -> f64 {
    let verts = p.vertices();
    let c = p.barycenter();
    let mut inside = true;
    let mut best = f64::INFINITY;
    for (j, face) in p.faces().iter().enumerate() {
        let n = p.face_normal(j).normalize();
        let anchor = p.face_centroid(j);
        let height = (x - anchor).dot(&n);
        // Orientation-agnostic: the body is on the side of the barycenter.
        let outward = if (c - anchor).dot(&n) <= 0.0 { 1.0 } else { -1.0 };
        if height * outward > 0.0 {
            inside = false;
        }
        let proj = x - n * height;
        let within = (0..face.len()).all(|k| {
            let a = verts[face[k]];
            let b = verts[face[(k + 1) % face.len()]];
            (b - a).cross(&(proj - a)).dot(&n) * outward >= 0.0
        });
        let d = if within {
            height.abs()
        } else {
            (0..face.len())
                .map(|k| segment_distance(x, &verts[face[k]], &verts[face[(k + 1) % face.len()]]))
                .fold(f64::INFINITY, f64::min)
        };
        best = best.min(d);
    }
    if inside {
        0.0
    } else {
        best
    }
}

/// Hausdorff distance between two convex polyhedra.
///
/// For convex bodies the one-sided excess `sup_{q in Q} d(q, P)` is attained
/// at a vertex of `Q`, because `d(., P)` is convex.
pub fn hausdorff_distance(p: &Polyhedron, q: &Polyhedron) -> f64 {
    let one_sided = |a: &Polyhedron, b: &Polyhedron| {
        b.vertices()
            .iter()
            .map(|v| point_polyhedron_distance(v, a))
            .fold(0.0, f64::max)
    };
    one_sided(p, q).max(one_sided(q, p))
}
