//! Plain-text mesh format.
//!
//! ```text
//! vertices N triangles T
//! x y flags        (N lines)
//! i j k            (T lines)
//! ```
//!
//! `flags` is the vertex bitmask (1 boundary, 2 slit, 4 pole, 8 origin).
//! Coordinates are written in shortest round-trip form, so a write/read
//! cycle reproduces the mesh bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use super::Mesh;
use crate::{Error, Result};

pub fn to_text(mesh: &Mesh) -> String {
    let mut s = String::with_capacity(40 * (mesh.vertices.len() + mesh.triangles.len()));
    let _ = writeln!(
        s,
        "vertices {} triangles {}",
        mesh.vertices.len(),
        mesh.triangles.len()
    );
    for (p, f) in mesh.vertices.iter().zip(&mesh.flags) {
        let _ = writeln!(s, "{} {} {}", p[0], p[1], f);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    s
}

pub fn from_text(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty mesh file".into()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "vertices" || h[2] != "triangles" {
        return Err(Error::Parse(format!("bad header `{header}`")));
    }
    let n: usize = h[1]
        .parse()
        .map_err(|_| Error::Parse("bad vertex count".into()))?;
    let t: usize = h[3]
        .parse()
        .map_err(|_| Error::Parse("bad triangle count".into()))?;
    let mut vertices = Vec::with_capacity(n);
    let mut flags = Vec::with_capacity(n);
    for i in 0..n {
        let l = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing vertex line {i}")))?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::Parse(format!("bad vertex line `{l}`")));
        }
        let x: f64 = f[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad x in `{l}`")))?;
        let y: f64 = f[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad y in `{l}`")))?;
        let fl: u8 = f[2]
            .parse()
            .map_err(|_| Error::Parse(format!("bad flags in `{l}`")))?;
        vertices.push([x, y]);
        flags.push(fl);
    }
    let mut triangles = Vec::with_capacity(t);
    for i in 0..t {
        let l = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing triangle line {i}")))?;
        let idx: Vec<usize> = l
            .split_whitespace()
            .map(|s| {
                s.parse()
                    .map_err(|_| Error::Parse(format!("bad triangle line `{l}`")))
            })
            .collect::<Result<_>>()?;
        if idx.len() != 3 || idx.iter().any(|&v| v >= n) {
            return Err(Error::Parse(format!("bad triangle line `{l}`")));
        }
        triangles.push([idx[0], idx[1], idx[2]]);
    }
    Mesh::new(vertices, triangles, flags)
}

pub fn write(mesh: &Mesh, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(mesh)).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<Mesh> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_text(&s)
}
