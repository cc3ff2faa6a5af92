//! ASCII OFF reader and writer.

use std::fmt::Write as _;

use thiserror::Error;

use super::{GeometryError, Point, Polyhedron};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OffError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: face {face} index out of range ({index} >= {count})")]
    IndexOutOfRange {
        line: usize,
        face: usize,
        index: usize,
        count: usize,
    },
    #[error("line {line}: face {face} has fewer than 3 distinct vertices")]
    ShortFace { line: usize, face: usize },
    #[error("unexpected end of input: {0}")]
    Truncated(&'static str),
}

/// Tokenized OFF body: non-empty, comment-stripped lines with 1-based line
/// numbers.
struct Lines<'a> {
    inner: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .filter_map(|(k, raw)| {
                let content = raw.split('#').next().unwrap_or("");
                let tokens: Vec<&str> = content.split_whitespace().collect();
                (!tokens.is_empty()).then_some((k + 1, tokens))
            })
            .collect();
        Self { inner, pos: 0 }
    }

    fn next(&mut self, what: &'static str) -> Result<(usize, Vec<&'a str>), OffError> {
        let item = self.inner.get(self.pos).cloned().ok_or(OffError::Truncated(what))?;
        self.pos += 1;
        Ok(item)
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T, OffError> {
    token.parse().map_err(|_| OffError::Parse {
        line,
        message: format!("invalid {what} {token:?}"),
    })
}

/// Raw OFF content: coordinate tokens are kept as text so that exact
/// arithmetic can re-read them as rationals.
pub(crate) struct RawOff<'a> {
    pub coords: Vec<[&'a str; 3]>,
    pub faces: Vec<Vec<usize>>,
}

pub(crate) fn parse_off_raw(text: &str) -> Result<RawOff<'_>, OffError> {
    let mut lines = Lines::new(text);
    let (line, mut header) = lines.next("header")?;
    if header[0] != "OFF" {
        return Err(OffError::Parse {
            line,
            message: format!("expected header \"OFF\", found {:?}", header[0]),
        });
    }
    header.remove(0);
    let (line, counts) = if header.is_empty() {
        lines.next("counts line")?
    } else {
        (line, header)
    };
    if counts.len() < 2 {
        return Err(OffError::Parse {
            line,
            message: "counts line needs vertex and face counts".into(),
        });
    }
    let nv: usize = parse_num(line, counts[0], "vertex count")?;
    let nf: usize = parse_num(line, counts[1], "face count")?;

    let mut coords = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, tokens) = lines.next("vertex line")?;
        if tokens.len() < 3 {
            return Err(OffError::Parse {
                line,
                message: format!("vertex line needs 3 coordinates, found {}", tokens.len()),
            });
        }
        for t in &tokens[..3] {
            let value: f64 = parse_num(line, t, "coordinate")?;
            if !value.is_finite() {
                return Err(OffError::Parse {
                    line,
                    message: format!("non-finite coordinate {t:?}"),
                });
            }
        }
        coords.push([tokens[0], tokens[1], tokens[2]]);
    }

    let mut faces = Vec::with_capacity(nf);
    for j in 0..nf {
        let (line, tokens) = lines.next("face line")?;
        let k: usize = parse_num(line, tokens[0], "face size")?;
        if tokens.len() < k + 1 {
            return Err(OffError::Parse {
                line,
                message: format!("face declares {k} vertices but lists {}", tokens.len() - 1),
            });
        }
        let mut face = Vec::with_capacity(k);
        for t in &tokens[1..=k] {
            let index: usize = parse_num(line, t, "vertex index")?;
            if index >= nv {
                return Err(OffError::IndexOutOfRange {
                    line,
                    face: j,
                    index,
                    count: nv,
                });
            }
            face.push(index);
        }
        let mut distinct = face.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 3 || distinct.len() != face.len() {
            return Err(OffError::ShortFace { line, face: j });
        }
        faces.push(face);
    }
    Ok(RawOff { coords, faces })
}

/// Parses ASCII OFF text. Faces are re-oriented outward around the vertex
/// barycenter; no other geometric validation is performed.
pub fn load_off(text: &str) -> Result<Polyhedron, OffError> {
    let raw = parse_off_raw(text)?;
    let vertices: Vec<Point> = raw
        .coords
        .iter()
        .map(|c| Point::new(c[0].parse().unwrap(), c[1].parse().unwrap(), c[2].parse().unwrap()))
        .collect();
    let mut p = Polyhedron::new(vertices, raw.faces).map_err(|e| match e {
        GeometryError::ShortFace { face } => OffError::ShortFace { line: 0, face },
        other => OffError::Parse {
            line: 0,
            message: other.to_string(),
        },
    })?;
    let c = p.barycenter();
    p.orient_outward(&c);
    Ok(p)
}

/// Serializes to OFF. Coordinates use Rust's shortest round-trip formatting so
/// that `load_off(to_off(p))` reproduces the vertices bit for bit.
pub fn to_off(p: &Polyhedron) -> String {
    let mut out = String::new();
    let e = p.edge_pairs().len();
    writeln!(out, "OFF").unwrap();
    writeln!(out, "{} {} {}", p.num_vertices(), p.num_faces(), e).unwrap();
    for v in p.vertices() {
        writeln!(out, "{:?} {:?} {:?}", v.x, v.y, v.z).unwrap();
    }
    for f in p.faces() {
        write!(out, "{}", f.len()).unwrap();
        for i in f {
            write!(out, " {i}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TETRA: &str = "OFF
# unit tetrahedron
4 4 6
0 0 0
1 0 0
0 1 0
0 0 1
3 0 2 1
3 0 1 3
3 0 3 2
3 1 2 3
";

    #[test]
    fn loads_tetrahedron() {
        let p = load_off(TETRA).unwrap();
        assert_eq!(p.num_vertices(), 4);
        assert_eq!(p.num_faces(), 4);
    }

    #[test]
    fn loads_cube_with_header_counts_inline() {
        let text = "OFF 8 6 12
-1 -1 -1
1 -1 -1
1 1 -1
-1 1 -1
-1 -1 1
1 -1 1
1 1 1
-1 1 1
4 0 1 2 3
4 4 5 6 7
4 0 1 5 4
4 1 2 6 5
4 2 3 7 6
4 3 0 4 7
";
        let p = load_off(text).unwrap();
        assert_eq!((p.num_vertices(), p.num_faces()), (8, 6));
        // Orientation was repaired: every normal points away from the center.
        for j in 0..6 {
            assert!(p.face_normal(j).dot(&p.face_centroid(j)) > 0.0);
        }
    }

    #[test]
    fn index_out_of_range() {
        let text = TETRA.replace("3 1 2 3", "3 1 2 9");
        let err = load_off(&text).unwrap_err();
        assert!(matches!(err, OffError::IndexOutOfRange { line: 11, index: 9, .. }), "{err}");
        assert!(err.to_string().contains("index out of range"));
    }

    #[test]
    fn short_face_and_bad_tokens() {
        assert!(matches!(
            load_off(&TETRA.replace("3 1 2 3", "2 1 2")),
            Err(OffError::ShortFace { .. })
        ));
        assert!(matches!(
            load_off(&TETRA.replace("1 0 0", "1 x 0")),
            Err(OffError::Parse { line: 5, .. })
        ));
        assert!(matches!(load_off("PLY\n"), Err(OffError::Parse { line: 1, .. })));
        assert!(matches!(load_off("OFF\n4 4 6\n0 0 0\n"), Err(OffError::Truncated(_))));
    }

    #[test]
    fn write_then_read_reproduces_vertices() {
        let p = crate::catalog::icosahedron();
        let q = load_off(&to_off(&p)).unwrap();
        assert_eq!(p.vertices(), q.vertices());
        assert_eq!(p.faces(), q.faces());
    }
}
