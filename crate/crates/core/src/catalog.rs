//! Generator catalog covering every worked example: the Platonic solids,
//! prisms, antiprisms, right pyramids, the rhombic dodecahedron, the truncated
//! cuboctahedron and a fixed realization of the seven-vertex, eight-face
//! polyhedron whose Jacobian is the standard 26 x 45 example.
//!
//! Every generator returns a valid polyhedron centered at its vertex
//! barycenter with plane vectors populated.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::geometry::{center_at_centroid, convex_hull, Point, Polyhedron};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CatalogError {
    #[error("unknown polyhedron {0:?}")]
    UnknownName(String),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: String, reason: String },
}

/// Catalog member names accepted by [`generate`].
pub const NAMES: [&str; 11] = [
    "tetrahedron",
    "cube",
    "octahedron",
    "dodecahedron",
    "icosahedron",
    "prism",
    "antiprism",
    "pyramid",
    "rhombic-dodecahedron",
    "truncated-cuboctahedron",
    "figure1",
];

/// A parsed catalog request such as `pyramid:q=4,zeta=0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl CatalogSpec {
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let (name, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut params = BTreeMap::new();
        for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| CatalogError::InvalidParam {
                name: item.to_string(),
                reason: "expected key=value".into(),
            })?;
            let value: f64 = v.trim().parse().map_err(|_| CatalogError::InvalidParam {
                name: k.trim().to_string(),
                reason: format!("not a number: {v:?}"),
            })?;
            params.insert(k.trim().to_string(), value);
        }
        Ok(Self {
            name: name.trim().to_string(),
            params,
        })
    }
}

impl fmt::Display for CatalogSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (k, (key, value)) in self.params.iter().enumerate() {
            write!(f, "{}{key}={value}", if k == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

fn param_q(params: &BTreeMap<String, f64>, default: usize) -> Result<usize, CatalogError> {
    match params.get("q") {
        None => Ok(default),
        Some(&q) if q.fract() == 0.0 && (3.0..=1000.0).contains(&q) => Ok(q as usize),
        Some(&q) => Err(CatalogError::InvalidParam {
            name: "q".into(),
            reason: format!("must be an integer >= 3, got {q}"),
        }),
    }
}

fn check_keys(params: &BTreeMap<String, f64>, allowed: &[&str]) -> Result<(), CatalogError> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CatalogError::InvalidParam {
            name: k.clone(),
            reason: "not accepted by this generator".into(),
        }),
        None => Ok(()),
    }
}

/// Builds a catalog polyhedron. `q` defaults to 5 for prisms and antiprisms
/// and 4 for pyramids; `zeta` (apex height over base circumradius) defaults
/// to 1.
pub fn generate(name: &str, params: &BTreeMap<String, f64>) -> Result<Polyhedron, CatalogError> {
    match name {
        "prism" => {
            check_keys(params, &["q"])?;
            Ok(prism(param_q(params, 5)?))
        }
        "antiprism" => {
            check_keys(params, &["q"])?;
            Ok(antiprism(param_q(params, 5)?))
        }
        "pyramid" => {
            check_keys(params, &["q", "zeta"])?;
            let q = param_q(params, 4)?;
            let zeta = params.get("zeta").copied().unwrap_or(1.0);
            if !(zeta > 0.0 && zeta.is_finite()) {
                return Err(CatalogError::InvalidParam {
                    name: "zeta".into(),
                    reason: format!("must be positive, got {zeta}"),
                });
            }
            Ok(pyramid(q, zeta))
        }
        other => {
            check_keys(params, &[])?;
            match other {
                "tetrahedron" => Ok(tetrahedron()),
                "cube" => Ok(cube()),
                "octahedron" => Ok(octahedron()),
                "dodecahedron" => Ok(dodecahedron()),
                "icosahedron" => Ok(icosahedron()),
                "rhombic-dodecahedron" => Ok(rhombic_dodecahedron()),
                "truncated-cuboctahedron" => Ok(truncated_cuboctahedron()),
                "figure1" => Ok(figure1()),
                _ => Err(CatalogError::UnknownName(name.to_string())),
            }
        }
    }
}

pub fn generate_spec(spec: &CatalogSpec) -> Result<Polyhedron, CatalogError> {
    generate(&spec.name, &spec.params)
}

fn from_points(points: &[Point]) -> Polyhedron {
    let hull = convex_hull(points).expect("catalog point sets are full-dimensional");
    center_at_centroid(&hull).expect("catalog polyhedra are solid")
}

/// Sign patterns over the nonzero entries of `base`.
fn signed(base: [f64; 3]) -> Vec<Point> {
    let mut out = Vec::new();
    for mask in 0..8u8 {
        if (0..3).any(|k| mask & (1 << k) != 0 && base[k] == 0.0) {
            continue;
        }
        let mut p = Point::from(base);
        for k in 0..3 {
            if mask & (1 << k) != 0 {
                p[k] = -p[k];
            }
        }
        out.push(p);
    }
    out
}

fn cyclic_shifts(points: Vec<Point>) -> Vec<Point> {
    points
        .iter()
        .flat_map(|p| [*p, Point::new(p.y, p.z, p.x), Point::new(p.z, p.x, p.y)])
        .collect()
}

fn all_permutations(points: Vec<Point>) -> Vec<Point> {
    let mut out = Vec::new();
    for p in points {
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let q = Point::new(p[perm[0]], p[perm[1]], p[perm[2]]);
            if !out.contains(&q) {
                out.push(q);
            }
        }
    }
    out
}

/// `cos`/`sin` of `2 pi k / q` with the exact values at multiples of a
/// quarter turn, so that rational members stay rational.
fn unit_angle(k: usize, q: usize, offset: f64) -> (f64, f64) {
    let t = 2.0 * PI * k as f64 / q as f64 + offset;
    let snap = |x: f64| {
        let r = x.round();
        if (x - r).abs() < 1e-15 {
            r
        } else {
            x
        }
    };
    (snap(t.cos()), snap(t.sin()))
}

pub fn tetrahedron() -> Polyhedron {
    from_points(&[
        Point::new(1.0, 1.0, 1.0),
        Point::new(1.0, -1.0, -1.0),
        Point::new(-1.0, 1.0, -1.0),
        Point::new(-1.0, -1.0, 1.0),
    ])
}

pub fn cube() -> Polyhedron {
    from_points(&signed([1.0, 1.0, 1.0]))
}

pub fn octahedron() -> Polyhedron {
    from_points(&all_permutations(signed([1.0, 0.0, 0.0])))
}

pub fn icosahedron() -> Polyhedron {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    from_points(&cyclic_shifts(signed([0.0, 1.0, phi])))
}

pub fn dodecahedron() -> Polyhedron {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = signed([1.0, 1.0, 1.0]);
    pts.extend(cyclic_shifts(signed([0.0, 1.0 / phi, phi])));
    from_points(&pts)
}

pub fn rhombic_dodecahedron() -> Polyhedron {
    let mut pts = signed([1.0, 1.0, 1.0]);
    pts.extend(all_permutations(signed([2.0, 0.0, 0.0])));
    from_points(&pts)
}

pub fn truncated_cuboctahedron() -> Polyhedron {
    let s = 2f64.sqrt();
    from_points(&all_permutations(signed([1.0, 1.0 + s, 1.0 + 2.0 * s])))
}

/// Right prism over a regular `q`-gon of circumradius 1, height 1.
pub fn prism(q: usize) -> Polyhedron {
    assert!(q >= 3);
    let mut pts = Vec::with_capacity(2 * q);
    for k in 0..q {
        let (c, s) = unit_angle(k, q, 0.0);
        pts.push(Point::new(c, s, 0.5));
        pts.push(Point::new(c, s, -0.5));
    }
    from_points(&pts)
}

/// Antiprism over a regular `q`-gon of circumradius 1, height 1.
pub fn antiprism(q: usize) -> Polyhedron {
    assert!(q >= 3);
    let mut pts = Vec::with_capacity(2 * q);
    for k in 0..q {
        let (c, s) = unit_angle(k, q, 0.0);
        pts.push(Point::new(c, s, 0.5));
        let (c, s) = unit_angle(k, q, PI / q as f64);
        pts.push(Point::new(c, s, -0.5));
    }
    from_points(&pts)
}

/// Right pyramid over a regular `q`-gon of circumradius 1 with apex height
/// `zeta`.
pub fn pyramid(q: usize, zeta: f64) -> Polyhedron {
    assert!(q >= 3 && zeta > 0.0);
    let mut pts = vec![Point::new(0.0, 0.0, zeta)];
    for k in 0..q {
        let (c, s) = unit_angle(k, q, 0.0);
        pts.push(Point::new(c, s, 0.0));
    }
    from_points(&pts)
}

/// A convex realization of the seven-vertex, eight-face polyhedron of the
/// standard incidence example. Vertex `k` here is vertex `k + 1` there and
/// face `j` is face `j + 1`; every coordinate is dyadic so the exact
/// pipeline sees the same numbers as the float one.
///
/// Vertex 0 is the apex of a pyramid over the quadrilateral 1-2-3-4; vertices
/// 5 and 6 form a bottom ridge. Faces 0 and 1 are quadrilaterals, the rest
/// triangles.
pub fn figure1() -> Polyhedron {
    let vertices = vec![
        Point::new(0.25, 0.125, 1.0),
        Point::new(-1.0, -1.0, 0.0),
        Point::new(1.0, -1.0, 0.0),
        Point::new(1.0, 1.0, 0.0),
        Point::new(-1.0, 1.0, 0.0),
        Point::new(-0.5, 0.0, -1.0),
        Point::new(0.375, 0.0, -1.0),
    ];
    let faces = vec![
        vec![3, 4, 5, 6],
        vec![1, 2, 6, 5],
        vec![1, 5, 4],
        vec![2, 3, 6],
        vec![0, 1, 2],
        vec![0, 4, 1],
        vec![0, 3, 4],
        vec![0, 2, 3],
    ];
    let p = Polyhedron::new(vertices, faces).expect("figure1 is well formed");
    center_at_centroid(&p).expect("figure1 is solid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::incidence_structure;
    use crate::geometry::{validate, DEFAULT_TOL};

    fn counts(p: &Polyhedron) -> (usize, usize, usize) {
        let inc = incidence_structure(p).unwrap();
        (p.num_vertices(), inc.num_edges(), p.num_faces())
    }

    #[test]
    fn counts_match_known_values() {
        assert_eq!(counts(&tetrahedron()), (4, 6, 4));
        assert_eq!(counts(&cube()), (8, 12, 6));
        assert_eq!(counts(&octahedron()), (6, 12, 8));
        assert_eq!(counts(&dodecahedron()), (20, 30, 12));
        assert_eq!(counts(&icosahedron()), (12, 30, 20));
        assert_eq!(counts(&rhombic_dodecahedron()), (14, 24, 12));
        assert_eq!(counts(&truncated_cuboctahedron()), (48, 72, 26));
        assert_eq!(counts(&figure1()), (7, 13, 8));
        for q in 3..=8 {
            assert_eq!(counts(&prism(q)), (2 * q, 3 * q, q + 2));
            assert_eq!(counts(&antiprism(q)), (2 * q, 4 * q, 2 * q + 2));
            assert_eq!(counts(&pyramid(q, 0.7)), (q + 1, 2 * q, q + 1));
        }
    }

    #[test]
    fn every_member_is_valid_and_centered() {
        for name in NAMES {
            let p = generate(name, &BTreeMap::new()).unwrap();
            let r = validate(&p, DEFAULT_TOL);
            assert!(r.is_valid(), "{name}: {:?}", r.messages);
            assert!(p.barycenter().norm() < 1e-12, "{name}");
            assert!(p.planes().is_some(), "{name}");
        }
    }

    #[test]
    fn figure1_incidences_match_the_reference_table() {
        // Rows of the reference Jacobian, written 1-based as [vertex, face].
        let expected = [
            (1, 5), (1, 6), (1, 7), (1, 8),
            (2, 2), (2, 3), (2, 5), (2, 6),
            (3, 2), (3, 4), (3, 5), (3, 8),
            (4, 1), (4, 4), (4, 7), (4, 8),
            (5, 1), (5, 3), (5, 6), (5, 7),
            (6, 1), (6, 2), (6, 3),
            (7, 1), (7, 2), (7, 4),
        ];
        let p = figure1();
        let mut found = Vec::new();
        for i in 0..p.num_vertices() {
            for (j, f) in p.faces().iter().enumerate() {
                if f.contains(&i) {
                    found.push((i + 1, j + 1));
                }
            }
        }
        assert_eq!(found, expected);
    }

    #[test]
    fn parameters() {
        let spec = CatalogSpec::parse("pyramid:q=4,zeta=0.5").unwrap();
        assert_eq!(spec.to_string(), "pyramid:q=4,zeta=0.5");
        let p = generate_spec(&spec).unwrap();
        assert_eq!(p.num_vertices(), 5);
        assert!(matches!(generate("pyramid", &[("q".to_string(), 2.0)].into()), Err(CatalogError::InvalidParam { .. })));
        assert!(matches!(
            generate("pyramid", &[("zeta".to_string(), 0.0)].into()),
            Err(CatalogError::InvalidParam { .. })
        ));
        assert!(matches!(generate("cube", &[("q".to_string(), 4.0)].into()), Err(CatalogError::InvalidParam { .. })));
        assert!(matches!(generate("torus", &BTreeMap::new()), Err(CatalogError::UnknownName(_))));
    }
}
