//! Exact rational arithmetic for polyhedra with rational coordinates.
//!
//! Float inputs are converted by snapping every coordinate to the nearest
//! rational with a small denominator; when that does not give an exactly
//! planar, convex polyhedron the binary value of the float is used instead.
//! Either way every check below is an exact certificate about the rational
//! polyhedron, which lies within `1e-12` of the input.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::combinatorics::IncidenceStructure;
use crate::geometry::{parse_off_raw, OffError, Polyhedron};

pub type Q = BigRational;
pub type QPoint = [Q; 3];

const MAX_DENOMINATOR: i64 = 1 << 20;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExactError {
    #[error("coordinate {0} is not finite")]
    NonFinite(f64),
    #[error("invalid rational coordinate {0:?}")]
    BadNumber(String),
    #[error("vertices of face {0} are not exactly coplanar")]
    NonPlanarFace(usize),
    #[error("origin is not strictly inside face plane {0}")]
    OriginNotInterior(usize),
    #[error("vertex {vertex} is not strictly inside the plane of face {face}")]
    NotConvex { vertex: usize, face: usize },
    #[error("polyhedron is degenerate")]
    Degenerate,
    #[error(transparent)]
    Off(#[from] OffError),
}

fn dot(a: &QPoint, b: &QPoint) -> Q {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

fn sub(a: &QPoint, b: &QPoint) -> QPoint {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

fn cross(a: &QPoint, b: &QPoint) -> QPoint {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

/// The rational nearest to `x` by continued fractions with denominator at
/// most `2^20`, if it is within `1e-12` relative.
fn snap(x: f64) -> Option<Q> {
    let bound = 1e-12 * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i128;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > MAX_DENOMINATOR as i128 {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - x).abs() <= bound {
            return Some(Q::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = y - a as f64;
        if frac == 0.0 {
            return None;
        }
        y = 1.0 / frac;
    }
    None
}

fn dyadic(x: f64) -> Result<Q, ExactError> {
    Q::from_float(x).ok_or(ExactError::NonFinite(x))
}

/// Parses `p/q`, integers and decimals with an optional exponent.
pub fn parse_rational(token: &str) -> Result<Q, ExactError> {
    let bad = || ExactError::BadNumber(token.to_string());
    if let Ok(q) = token.parse::<Q>() {
        return Ok(q);
    }
    let (mantissa, exponent) = match token.find(['e', 'E']) {
        Some(k) => (&token[..k], token[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (token, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = Q::from_integer(all);
    if shift >= 0 {
        q *= Q::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        q /= Q::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if negative { -q } else { q })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactPolyhedron {
    vertices: Vec<QPoint>,
    faces: Vec<Vec<usize>>,
    planes: Vec<QPoint>,
}

impl ExactPolyhedron {
    /// Centers `vertices` exactly at their barycenter and derives exact face
    /// planes. Faces are taken as given (outward cycles).
    pub fn new(vertices: Vec<QPoint>, faces: Vec<Vec<usize>>) -> Result<Self, ExactError> {
        if vertices.len() < 4 {
            return Err(ExactError::Degenerate);
        }
        let n = Q::from_integer(BigInt::from(vertices.len()));
        let mut c: QPoint = [Q::zero(), Q::zero(), Q::zero()];
        for v in &vertices {
            for k in 0..3 {
                c[k] += &v[k];
            }
        }
        for x in c.iter_mut() {
            *x /= &n;
        }
        let vertices: Vec<QPoint> = vertices.iter().map(|v| sub(v, &c)).collect();
        let mut planes = Vec::with_capacity(faces.len());
        for (j, face) in faces.iter().enumerate() {
            let a = exact_plane(&vertices, face, j)?;
            for (i, v) in vertices.iter().enumerate() {
                if !face.contains(&i) && dot(v, &a) >= Q::one() {
                    return Err(ExactError::NotConvex { vertex: i, face: j });
                }
            }
            planes.push(a);
        }
        Ok(Self { vertices, faces, planes })
    }

    /// Rational version of a float polyhedron (small-denominator snapping,
    /// then the binary values as a fallback).
    pub fn from_polyhedron(p: &Polyhedron) -> Result<Self, ExactError> {
        let snapped: Option<Vec<QPoint>> = p
            .vertices()
            .iter()
            .map(|v| Some([snap(v.x)?, snap(v.y)?, snap(v.z)?]))
            .collect();
        if let Some(verts) = snapped {
            if let Ok(e) = Self::new(verts, p.faces().to_vec()) {
                return Ok(e);
            }
        }
        let verts = p
            .vertices()
            .iter()
            .map(|v| Ok([dyadic(v.x)?, dyadic(v.y)?, dyadic(v.z)?]))
            .collect::<Result<Vec<_>, ExactError>>()?;
        Self::new(verts, p.faces().to_vec())
    }

    /// Reads an OFF file with coordinates taken literally as rationals.
    /// Faces are reoriented outward about the barycenter.
    pub fn from_off(text: &str) -> Result<Self, ExactError> {
        let raw = parse_off_raw(text)?;
        let vertices = raw
            .coords
            .iter()
            .map(|c| Ok([parse_rational(c[0])?, parse_rational(c[1])?, parse_rational(c[2])?]))
            .collect::<Result<Vec<QPoint>, ExactError>>()?;
        let n = Q::from_integer(BigInt::from(vertices.len().max(1)));
        let mut c: QPoint = [Q::zero(), Q::zero(), Q::zero()];
        for v in &vertices {
            for k in 0..3 {
                c[k] += &v[k];
            }
        }
        for x in c.iter_mut() {
            *x /= &n;
        }
        let mut faces = raw.faces;
        for face in faces.iter_mut() {
            if face.len() >= 3 {
                let u = sub(&vertices[face[1]], &vertices[face[0]]);
                let w = sub(&vertices[face[2]], &vertices[face[0]]);
                let out = sub(&vertices[face[0]], &c);
                if dot(&cross(&u, &w), &out).is_negative() {
                    face.reverse();
                }
            }
        }
        Self::new(vertices, faces)
    }

    pub fn vertices(&self) -> &[QPoint] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn planes(&self) -> &[QPoint] {
        &self.planes
    }

    pub fn to_polyhedron(&self) -> Polyhedron {
        let f = |q: &Q| q.to_f64().unwrap_or(f64::NAN);
        let verts = self.vertices.iter().map(|v| crate::geometry::Point::new(f(&v[0]), f(&v[1]), f(&v[2])));
        let planes = self.planes.iter().map(|a| crate::geometry::Point::new(f(&a[0]), f(&a[1]), f(&a[2])));
        Polyhedron::from_parts(verts.collect(), self.faces.clone(), Some(planes.collect()))
    }

    /// Largest `|<v_i, a_j> - 1|` over incident pairs; zero by construction.
    pub fn incidence_residual(&self) -> Q {
        let mut worst = Q::zero();
        for (j, face) in self.faces.iter().enumerate() {
            for &i in face {
                let r = (dot(&self.vertices[i], &self.planes[j]) - Q::one()).abs();
                if r > worst {
                    worst = r;
                }
            }
        }
        worst
    }
}

/// Plane vector through face `j`, checking every vertex of the face.
fn exact_plane(vertices: &[QPoint], face: &[usize], j: usize) -> Result<QPoint, ExactError> {
    let p0 = &vertices[face[0]];
    let mut normal = None;
    'search: for b in 1..face.len() {
        for c in b + 1..face.len() {
            let n = cross(&sub(&vertices[face[b]], p0), &sub(&vertices[face[c]], p0));
            if n.iter().any(|x| !x.is_zero()) {
                normal = Some(n);
                break 'search;
            }
        }
    }
    let n = normal.ok_or(ExactError::NonPlanarFace(j))?;
    let offset = dot(&n, p0);
    if !offset.is_positive() {
        return Err(ExactError::OriginNotInterior(j));
    }
    if face.iter().any(|&i| dot(&n, &vertices[i]) != offset) {
        return Err(ExactError::NonPlanarFace(j));
    }
    Ok([&n[0] / &offset, &n[1] / &offset, &n[2] / &offset])
}

/// The incidence Jacobian over the rationals, rows in lexicographic order of
/// incident pairs.
pub fn exact_jacobian(p: &ExactPolyhedron, inc: &IncidenceStructure) -> Vec<Vec<Q>> {
    let r = p.vertices.len();
    let cols = 3 * (r + p.faces.len());
    inc.incident_pairs()
        .into_iter()
        .map(|(i, j)| {
            let mut row = vec![Q::zero(); cols];
            for k in 0..3 {
                row[3 * i + k] = p.planes[j][k].clone();
                row[3 * (r + j) + k] = p.vertices[i][k].clone();
            }
            row
        })
        .collect()
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn exact_rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|row| {
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, q| num_integer::Integer::lcm(&acc, q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&k| !m[k][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for k in rank + 1..nrows {
            for c in col + 1..ncols {
                let v = (&m[rank][col] * &m[k][c] - &m[k][col] * &m[rank][c]) / &prev;
                m[k][c] = v;
            }
            m[k][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::combinatorics::incidence_structure;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn snapping_recovers_small_fractions() {
        assert_eq!(snap(1.0 / 7.0), Some(q(1, 7)));
        assert_eq!(snap(-0.2), Some(q(-1, 5)));
        assert_eq!(snap(3.0), Some(q(3, 1)));
        assert_eq!(snap(2f64.sqrt()), None);
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_rational("0.1").unwrap(), q(1, 10));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), q(-1, 4));
        assert_eq!(parse_rational("3/9").unwrap(), q(1, 3));
        assert_eq!(parse_rational("12").unwrap(), q(12, 1));
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn rank_of_small_matrices() {
        let m = |rows: &[&[i64]]| -> Vec<Vec<Q>> {
            rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect()
        };
        assert_eq!(exact_rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(exact_rank(&m(&[&[0, 1, 0], &[1, 0, 0], &[1, 1, 0]])), 2);
        assert_eq!(exact_rank(&m(&[&[2, 0, 1], &[0, 3, 1], &[1, 1, 5]])), 3);
        let half = vec![vec![q(1, 2), q(1, 3)], vec![q(3, 2), q(1, 1)]];
        assert_eq!(exact_rank(&half), 1);
    }

    #[test]
    fn cube_planes_are_exact() {
        let e = ExactPolyhedron::from_polyhedron(&catalog::cube()).unwrap();
        assert!(e.incidence_residual().is_zero());
        for a in e.planes() {
            let nonzero: Vec<&Q> = a.iter().filter(|x| !x.is_zero()).collect();
            assert_eq!(nonzero.len(), 1);
            assert_eq!(nonzero[0].abs(), Q::one());
        }
    }

    #[test]
    fn exact_ranks_on_rational_catalog_members() {
        for p in [catalog::tetrahedron(), catalog::cube(), catalog::figure1(), catalog::octahedron()] {
            let inc = incidence_structure(&p).unwrap();
            let e = ExactPolyhedron::from_polyhedron(&p).unwrap();
            let j = exact_jacobian(&e, &inc);
            assert_eq!(exact_rank(&j), inc.mu());
            let mut dup = j.clone();
            dup.push(j[0].clone());
            assert_eq!(exact_rank(&dup), inc.mu());
        }
    }

    #[test]
    fn irrational_input_is_reported() {
        let p = catalog::dodecahedron();
        assert!(ExactPolyhedron::from_polyhedron(&p).is_err());
    }

    #[test]
    fn off_with_fractions() {
        let text = "OFF\n4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n";
        let e = ExactPolyhedron::from_off(text).unwrap();
        assert_eq!(e.planes().len(), 4);
        assert!(e.incidence_residual().is_zero());
    }
}
