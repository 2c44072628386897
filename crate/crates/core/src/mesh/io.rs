//! OBJ / OFF reading and writing. Only vertex positions and triangular faces
//! are read; other OBJ records are skipped with a warning.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{MeshError, Result, TriMesh};
use crate::geom::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Off,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()) {
            Some(e) if e == "obj" => Ok(MeshFormat::Obj),
            Some(e) if e == "off" => Ok(MeshFormat::Off),
            _ => Err(MeshError::UnknownFormat(path.display().to_string())),
        }
    }
}

/// Loads and validates a closed manifold mesh. The format is taken from the
/// extension when `format` is `None`.
pub fn load_mesh(path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<TriMesh> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    let text = fs::read_to_string(path)?;
    let (p, t) = match format {
        MeshFormat::Obj => parse_obj(&text)?,
        MeshFormat::Off => parse_off(&text)?,
    };
    TriMesh::new(p, t)
}

pub fn save_mesh(mesh: &TriMesh, path: impl AsRef<Path>, format: Option<MeshFormat>) -> Result<()> {
    let path = path.as_ref();
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    let text = match format {
        MeshFormat::Obj => write_obj(mesh.positions(), mesh.triangles()),
        MeshFormat::Off => write_off(mesh.positions(), mesh.triangles()),
    };
    fs::write(path, text)?;
    Ok(())
}

fn parse_err(line: usize, msg: impl Into<String>) -> MeshError {
    MeshError::Parse { line, msg: msg.into() }
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64> {
    tok.ok_or_else(|| parse_err(line, "missing coordinate"))?
        .parse::<f64>()
        .map_err(|e| parse_err(line, e.to_string()))
}

type Raw = (Vec<Vec3>, Vec<[usize; 3]>);

pub fn parse_obj(text: &str) -> Result<Raw> {
    let mut positions = Vec::new();
    let mut faces = Vec::new();
    let mut skipped = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut toks = content.split_whitespace();
        match toks.next() {
            None => {}
            Some("v") => {
                let x = parse_f64(toks.next(), line)?;
                let y = parse_f64(toks.next(), line)?;
                let z = parse_f64(toks.next(), line)?;
                positions.push([x, y, z]);
            }
            Some("f") => {
                let mut idx = Vec::with_capacity(3);
                for tok in toks {
                    let head = tok.split('/').next().unwrap_or("");
                    let k: i64 = head.parse().map_err(|_| parse_err(line, format!("bad index {tok:?}")))?;
                    let v = if k > 0 {
                        (k - 1) as usize
                    } else if k < 0 && (-k) as usize <= positions.len() {
                        positions.len() - (-k) as usize
                    } else {
                        return Err(parse_err(line, format!("bad index {tok:?}")));
                    };
                    idx.push(v);
                }
                if idx.len() != 3 {
                    return Err(parse_err(line, format!("face with {} vertices; only triangles are supported", idx.len())));
                }
                faces.push([idx[0], idx[1], idx[2]]);
            }
            Some(other) => {
                if skipped.insert(other.to_string()) {
                    log::warn!("ignoring OBJ record {other:?} (line {line})");
                }
            }
        }
    }
    Ok((positions, faces))
}

pub fn parse_off(text: &str) -> Result<Raw> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let rest = header.strip_prefix("OFF").ok_or_else(|| parse_err(hl, "missing OFF header"))?;
    let counts: Vec<usize> = if rest.trim().is_empty() {
        let (cl, c) = lines.next().ok_or_else(|| parse_err(hl, "missing counts"))?;
        c.split_whitespace().map(|t| t.parse().map_err(|_| parse_err(cl, "bad count"))).collect::<Result<_>>()?
    } else {
        rest.split_whitespace().map(|t| t.parse().map_err(|_| parse_err(hl, "bad count"))).collect::<Result<_>>()?
    };
    if counts.len() < 2 {
        return Err(parse_err(hl, "expected vertex and face counts"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, s) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of file in vertices"))?;
        let mut t = s.split_whitespace();
        positions.push([parse_f64(t.next(), l)?, parse_f64(t.next(), l)?, parse_f64(t.next(), l)?]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (l, s) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of file in faces"))?;
        let nums: Vec<usize> = s
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(l, format!("bad index {t:?}"))))
            .collect::<Result<_>>()?;
        if nums.first() != Some(&3) || nums.len() < 4 {
            return Err(parse_err(l, "only triangular faces are supported"));
        }
        faces.push([nums[1], nums[2], nums[3]]);
    }
    Ok((positions, faces))
}

// `{}` on f64 prints the shortest string that parses back to the same bits.
pub fn write_obj(positions: &[Vec3], triangles: &[[usize; 3]]) -> String {
    let mut s = String::with_capacity(32 * (positions.len() + triangles.len()));
    for p in positions {
        let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
    }
    for t in triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

pub fn write_off(positions: &[Vec3], triangles: &[[usize; 3]]) -> String {
    let mut s = String::with_capacity(32 * (positions.len() + triangles.len()));
    let edges = triangles.len() * 3 / 2;
    let _ = writeln!(s, "OFF\n{} {} {}", positions.len(), triangles.len(), edges);
    for p in positions {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], p[2]);
    }
    for t in triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TETRA_OFF: &str = "OFF\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";

    #[test]
    fn regular_tetrahedron_off() {
        let (p, t) = parse_off(TETRA_OFF).unwrap();
        let m = TriMesh::new(p, t).unwrap();
        assert_eq!((m.num_vertices(), m.num_triangles()), (4, 4));
        assert_eq!(m.genus().unwrap(), 0);
    }

    #[test]
    fn obj_ignores_other_records() {
        let src = "# c\nvn 0 0 1\nv 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\nvt 0 0\nf 1/1 2/1 3/1\nf 1 4 2\nf 1 3 4\nf -3 -1 -2\n";
        let (p, t) = parse_obj(src).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(t[3], [1, 3, 2]);
        TriMesh::new(p, t).unwrap();
    }

    #[test]
    fn obj_rejects_quads() {
        let err = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 5, .. }));
    }

    #[test]
    fn off_header_on_one_line() {
        let src = TETRA_OFF.replacen("OFF\n", "OFF ", 1);
        let (p, t) = parse_off(&src).unwrap();
        assert_eq!((p.len(), t.len()), (4, 4));
    }

    #[test]
    fn save_to_empty_path_fails() {
        let (p, t) = parse_off(TETRA_OFF).unwrap();
        let m = TriMesh::new(p, t).unwrap();
        assert!(save_mesh(&m, "", Some(MeshFormat::Obj)).is_err());
        assert!(save_mesh(&m, "", None).is_err());
    }
}
