use std::f64::consts::PI;

use serde::Serialize;

use super::BasicRegionError;
use crate::geometry::Point;
use crate::symmetry::{is_reflection, mirror_normal, Classification, IsometryGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    /// `[3,3]`, `[3,4]`, `[3,5]`.
    SphericalTriangle,
    /// `[2,q]`: two adjacent vertical mirrors and the equator.
    TriangleWithEquator,
    /// `[q]` with `q >= 2`.
    Lune,
    /// `[1]`: a single mirror.
    Hemisphere,
}

/// A polyhedral cone `{x : <n, x> >= 0 for every wall n}` whose images under
/// the group tile space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundamentalRegion {
    pub kind: RegionKind,
    /// Inward unit normals of the walls.
    pub walls: Vec<Point>,
    /// Unit vectors along the corner rays. For triangles corner `k` is
    /// opposite wall `k`; for a lune these are the two poles.
    pub corner_rays: Vec<Point>,
    /// Rotation order `m` at each corner (interior angle `π/m`).
    pub corner_orders: Vec<usize>,
    /// Spherical area of the cone's trace on the unit sphere.
    pub area: f64,
}

impl FundamentalRegion {
    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.walls.iter().all(|n| n.dot(x) >= -tol)
    }

    /// Interior angles between consecutive walls (`cos θ = -<n_k, n_l>`).
    pub fn wall_angle(&self, k: usize, l: usize) -> f64 {
        (-self.walls[k].dot(&self.walls[l])).clamp(-1.0, 1.0).acos()
    }
}

const SEEDS: [[f64; 3]; 4] = [
    [0.211_324_865, 0.577_350_269, 0.788_675_134],
    [0.613_486_1, 0.283_715_9, 0.737_1],
    [-0.372_8, 0.805_1, 0.461_3],
    [0.123_4, -0.456_7, 0.881_9],
];

/// Seed direction off every mirror.
fn seed(normals: &[Point]) -> Point {
    for s in SEEDS {
        let d = Point::new(s[0], s[1], s[2]).normalize();
        if normals.iter().all(|n| n.dot(&d).abs() > 1e-3) {
            return d;
        }
    }
    unreachable!("finitely many mirrors cannot contain every seed")
}

fn distinct_mirrors(g: &IsometryGroup) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for m in g.elements().iter().filter(|m| is_reflection(m)) {
        let n = mirror_normal(m);
        if !out.iter().any(|o| (o - n).norm() < 1e-6 || (o + n).norm() < 1e-6) {
            out.push(n);
        }
    }
    out
}

fn order_from_angle(theta: f64) -> usize {
    (PI / theta).round() as usize
}

/// The chamber of the mirror arrangement containing a fixed seed direction.
pub fn fundamental_region(g: &IsometryGroup) -> Result<FundamentalRegion, BasicRegionError> {
    let class = g.classification();
    let kind = match class {
        Classification::Dihedral { q: 1 } => RegionKind::Hemisphere,
        Classification::Dihedral { .. } => RegionKind::Lune,
        Classification::Prismatic { .. } => RegionKind::TriangleWithEquator,
        Classification::Tetrahedral | Classification::Octahedral | Classification::Icosahedral => {
            RegionKind::SphericalTriangle
        }
        Classification::Trivial | Classification::NonReflection => return Err(BasicRegionError::NotReflectionGroup),
    };
    let mut normals = distinct_mirrors(g);
    let d = seed(&normals);
    for n in normals.iter_mut() {
        if n.dot(&d) < 0.0 {
            *n = -*n;
        }
    }

    let region = match kind {
        RegionKind::Hemisphere => FundamentalRegion {
            kind,
            walls: normals,
            corner_rays: Vec::new(),
            corner_orders: Vec::new(),
            area: 2.0 * PI,
        },
        RegionKind::Lune => lune(&normals, &d, kind),
        _ => triangle(&normals, kind)?,
    };
    if (region.area * g.order() as f64 - 4.0 * PI).abs() > 1e-6 {
        return Err(BasicRegionError::BadTiling(region.area * g.order() as f64));
    }
    Ok(region)
}

fn lune(normals: &[Point], d: &Point, kind: RegionKind) -> FundamentalRegion {
    let axis = normals[0].cross(&normals[1]).normalize();
    let axis = if axis.dot(d) < 0.0 { -axis } else { axis };
    // Angular position of d and of every mirror line around the axis.
    let e1 = (d - axis * axis.dot(d)).normalize();
    let e2 = axis.cross(&e1);
    let angle = |v: &Point| v.dot(&e2).atan2(v.dot(&e1)).rem_euclid(2.0 * PI);
    let mut after: Option<(f64, Point)> = None;
    let mut before: Option<(f64, Point)> = None;
    for n in normals {
        let u = axis.cross(n);
        for ray in [u, -u] {
            let a = angle(&ray);
            if after.is_none_or(|(b, _)| a < b) {
                after = Some((a, *n));
            }
            let back = 2.0 * PI - a;
            if before.is_none_or(|(b, _)| back < b) {
                before = Some((back, *n));
            }
        }
    }
    let walls = vec![before.unwrap().1, after.unwrap().1];
    let theta = (-walls[0].dot(&walls[1])).clamp(-1.0, 1.0).acos();
    let m = order_from_angle(theta);
    FundamentalRegion {
        kind,
        walls,
        corner_rays: vec![axis, -axis],
        corner_orders: vec![m, m],
        area: 2.0 * theta,
    }
}

fn triangle(normals: &[Point], kind: RegionKind) -> Result<FundamentalRegion, BasicRegionError> {
    let inside = |c: &Point| normals.iter().all(|n| n.dot(c) >= -1e-9);
    let mut corners: Vec<Point> = Vec::new();
    for k in 0..normals.len() {
        for l in k + 1..normals.len() {
            let c = normals[k].cross(&normals[l]);
            if c.norm() < 1e-9 {
                continue;
            }
            let c = c.normalize();
            for cand in [c, -c] {
                if inside(&cand) && !corners.iter().any(|o| (o - cand).norm() < 1e-6) {
                    corners.push(cand);
                }
            }
        }
    }
    if corners.len() != 3 {
        return Err(BasicRegionError::BadTiling(corners.len() as f64));
    }
    // Wall k is the mirror through the two corners other than k.
    let mut walls = Vec::with_capacity(3);
    for k in 0..3 {
        let (a, b) = (corners[(k + 1) % 3], corners[(k + 2) % 3]);
        let n = normals
            .iter()
            .find(|n| n.dot(&a).abs() < 1e-9 && n.dot(&b).abs() < 1e-9)
            .ok_or(BasicRegionError::BadTiling(0.0))?;
        walls.push(*n);
    }
    // Angle at corner k is between the two walls through it.
    let orders: Vec<usize> = (0..3)
        .map(|k| {
            let (x, y) = (walls[(k + 1) % 3], walls[(k + 2) % 3]);
            order_from_angle((-x.dot(&y)).clamp(-1.0, 1.0).acos())
        })
        .collect();
    let mut idx = [0usize, 1, 2];
    idx.sort_by_key(|&k| std::cmp::Reverse(orders[k]));
    let walls: Vec<Point> = idx.iter().map(|&k| walls[k]).collect();
    let corner_rays: Vec<Point> = idx.iter().map(|&k| corners[k]).collect();
    let corner_orders: Vec<usize> = idx.iter().map(|&k| orders[k]).collect();
    let area = corner_orders.iter().map(|&m| PI / m as f64).sum::<f64>() - PI;
    Ok(FundamentalRegion {
        kind,
        walls,
        corner_rays,
        corner_orders,
        area,
    })
}
