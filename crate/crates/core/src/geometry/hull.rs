//! Incremental 3D convex hull with exact orientation predicates.
//!
//! Visibility decisions use Shewchuk's adaptive `orient3d`, so the triangulated
//! hull is correct for the given double-precision input. Adjacent coplanar
//! triangles are then merged into polygonal faces and vertices that sit on a
//! straight angle of a merged face are dropped.

use std::collections::HashMap;

use robust::{orient3d, Coord3D};

use super::{cycle_edges, GeometryError, Point, Polyhedron};

/// How adjacent hull triangles are recognized as lying in one face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coplanarity {
    /// Exact coplanarity (`orient3d == 0`).
    Exact,
    /// Unit normals within this angle (radians) are merged.
    Angle(f64),
}

impl Default for Coplanarity {
    fn default() -> Self {
        Coplanarity::Angle(1e-7)
    }
}

fn c3(p: &Point) -> Coord3D<f64> {
    Coord3D {
        x: p.x,
        y: p.y,
        z: p.z,
    }
}

/// Positive when `d` lies on the inner side of the outward triangle `(a, b, c)`.
fn orient(pts: &[Point], a: usize, b: usize, c: usize, d: usize) -> f64 {
    orient3d(c3(&pts[a]), c3(&pts[b]), c3(&pts[c]), c3(&pts[d]))
}

/// Convex hull with the default float-mode merge threshold.
pub fn convex_hull(points: &[Point]) -> Result<Polyhedron, GeometryError> {
    convex_hull_with(points, Coplanarity::default())
}

pub fn convex_hull_with(points: &[Point], mode: Coplanarity) -> Result<Polyhedron, GeometryError> {
    if points.len() < 4 {
        return Err(GeometryError::DegenerateHull("fewer than 4 points"));
    }
    if points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
        return Err(GeometryError::DegenerateHull("non-finite coordinate"));
    }
    let seed = initial_simplex(points)?;
    let triangles = incremental(points, seed);
    let faces = merge_coplanar(points, &triangles, mode)?;
    let faces = drop_straight_vertices(points, faces, mode);

    let mut used: Vec<usize> = faces.iter().flatten().copied().collect();
    used.sort_unstable();
    used.dedup();
    let mut remap = vec![usize::MAX; points.len()];
    for (k, &i) in used.iter().enumerate() {
        remap[i] = k;
    }
    let vertices = used.iter().map(|&i| points[i]).collect();
    let faces = faces
        .into_iter()
        .map(|f| f.into_iter().map(|i| remap[i]).collect())
        .collect();
    Ok(Polyhedron::from_parts(vertices, faces, None))
}

fn initial_simplex(pts: &[Point]) -> Result<[usize; 4], GeometryError> {
    let i0 = (0..pts.len())
        .min_by(|&a, &b| {
            pts[a]
                .iter()
                .partial_cmp(pts[b].iter())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    let i1 = (0..pts.len())
        .max_by(|&a, &b| (pts[a] - pts[i0]).norm().total_cmp(&(pts[b] - pts[i0]).norm()))
        .unwrap();
    if pts[i1] == pts[i0] {
        return Err(GeometryError::DegenerateHull("all points coincide"));
    }
    let d = pts[i1] - pts[i0];
    let i2 = (0..pts.len())
        .max_by(|&a, &b| {
            let ca = d.cross(&(pts[a] - pts[i0])).norm();
            let cb = d.cross(&(pts[b] - pts[i0])).norm();
            ca.total_cmp(&cb)
        })
        .unwrap();
    let collinear = [(0, 1), (1, 2), (0, 2)].iter().all(|&(u, v)| {
        let p = |q: &Point| robust::Coord { x: q[u], y: q[v] };
        robust::orient2d(p(&pts[i0]), p(&pts[i1]), p(&pts[i2])) == 0.0
    });
    if collinear {
        return Err(GeometryError::DegenerateHull("all points are collinear"));
    }
    let i3 = (0..pts.len())
        .max_by(|&a, &b| orient(pts, i0, i1, i2, a).abs().total_cmp(&orient(pts, i0, i1, i2, b).abs()))
        .unwrap();
    let o = orient(pts, i0, i1, i2, i3);
    if o == 0.0 {
        return Err(GeometryError::DegenerateHull("all points are coplanar"));
    }
    // Orient (i0, i1, i2) so that i3 is on its inner side.
    Ok(if o > 0.0 { [i0, i1, i2, i3] } else { [i0, i2, i1, i3] })
}

fn incremental(pts: &[Point], [a, b, c, d]: [usize; 4]) -> Vec<[usize; 3]> {
    let mut tris: Vec<Option<[usize; 3]>> =
        vec![Some([a, b, c]), Some([a, d, b]), Some([b, d, c]), Some([c, d, a])];
    for p in 0..pts.len() {
        if [a, b, c, d].contains(&p) {
            continue;
        }
        let visible: Vec<usize> = tris
            .iter()
            .enumerate()
            .filter_map(|(t, tri)| {
                tri.filter(|&[x, y, z]| orient(pts, x, y, z, p) < 0.0).map(|_| t)
            })
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut directed: HashMap<(usize, usize), ()> = HashMap::new();
        for &t in &visible {
            let tri = tris[t].unwrap();
            for (u, v) in cycle_edges(&tri) {
                directed.insert((u, v), ());
            }
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &t in &visible {
            let tri = tris[t].unwrap();
            for (u, v) in cycle_edges(&tri) {
                if !directed.contains_key(&(v, u)) {
                    horizon.push((u, v));
                }
            }
            tris[t] = None;
        }
        for (u, v) in horizon {
            tris.push(Some([u, v, p]));
        }
    }
    tris.into_iter().flatten().collect()
}

fn unit_normal(pts: &[Point], t: &[usize; 3]) -> Point {
    (pts[t[1]] - pts[t[0]]).cross(&(pts[t[2]] - pts[t[0]])).normalize()
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn merge_coplanar(
    pts: &[Point],
    tris: &[[usize; 3]],
    mode: Coplanarity,
) -> Result<Vec<Vec<usize>>, GeometryError> {
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for (u, v) in cycle_edges(tri) {
            owner.insert((u, v), t);
        }
    }
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    for (t, tri) in tris.iter().enumerate() {
        for (u, v) in cycle_edges(tri) {
            let Some(&s) = owner.get(&(v, u)) else { continue };
            if s <= t {
                continue;
            }
            let other = tris[s];
            let apex = other.iter().copied().find(|&w| w != u && w != v).unwrap();
            let coplanar = match mode {
                Coplanarity::Exact => orient(pts, tri[0], tri[1], tri[2], apex) == 0.0,
                Coplanarity::Angle(theta) => {
                    let cos = unit_normal(pts, tri).dot(&unit_normal(pts, &other)).clamp(-1.0, 1.0);
                    cos.acos() <= theta
                }
            };
            if coplanar {
                let (ra, rb) = (find(&mut parent, t), find(&mut parent, s));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of: HashMap<usize, usize> = HashMap::new();
    for t in 0..tris.len() {
        let root = find(&mut parent, t);
        let g = *group_of.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(t);
    }

    let mut faces = Vec::with_capacity(groups.len());
    for members in &groups {
        let mut next: HashMap<usize, usize> = HashMap::new();
        let inside: std::collections::HashSet<(usize, usize)> = members
            .iter()
            .flat_map(|&t| cycle_edges(&tris[t]).collect::<Vec<_>>())
            .collect();
        for &(u, v) in &inside {
            if !inside.contains(&(v, u)) && next.insert(u, v).is_some() {
                return Err(GeometryError::HullMerge);
            }
        }
        let start = *next.keys().min().ok_or(GeometryError::HullMerge)?;
        let mut cycle = vec![start];
        let mut cur = next[&start];
        while cur != start {
            cycle.push(cur);
            cur = *next.get(&cur).ok_or(GeometryError::HullMerge)?;
            if cycle.len() > next.len() {
                return Err(GeometryError::HullMerge);
            }
        }
        if cycle.len() != next.len() {
            return Err(GeometryError::HullMerge);
        }
        faces.push(cycle);
    }
    Ok(faces)
}

fn is_straight(pts: &[Point], a: usize, b: usize, c: usize, mode: Coplanarity) -> bool {
    let u = pts[b] - pts[a];
    let w = pts[c] - pts[b];
    match mode {
        Coplanarity::Exact => {
            let collinear = [(0, 1), (1, 2), (0, 2)].iter().all(|&(i, j)| {
                let p = |q: &Point| robust::Coord { x: q[i], y: q[j] };
                robust::orient2d(p(&pts[a]), p(&pts[b]), p(&pts[c])) == 0.0
            });
            collinear && u.dot(&w) > 0.0
        }
        Coplanarity::Angle(theta) => u.cross(&w).norm() <= theta * u.norm() * w.norm() && u.dot(&w) > 0.0,
    }
}

fn drop_straight_vertices(pts: &[Point], mut faces: Vec<Vec<usize>>, mode: Coplanarity) -> Vec<Vec<usize>> {
    // A vertex is straight in one face iff it is straight in every face
    // containing it (it lies in the interior of a hull edge), so a per-face
    // pass is enough.
    for face in &mut faces {
        loop {
            let n = face.len();
            let drop = (0..n).find(|&k| is_straight(pts, face[(k + n - 1) % n], face[k], face[(k + 1) % n], mode));
            match drop {
                Some(k) if n > 3 => {
                    face.remove(k);
                }
                _ => break,
            }
        }
    }
    // Rotate each cycle to start at its smallest index for determinism.
    for face in &mut faces {
        let k = (0..face.len()).min_by_key(|&k| face[k]).unwrap();
        face.rotate_left(k);
    }
    faces.sort();
    faces
}
