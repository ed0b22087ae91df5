//! Plain-text point and triangle files.
//!
//! Points are `x y` lines; triangles are `i j k` lines of 0-based ids.
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::{Point, PointId};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    content_lines(text)
        .map(|(line, l)| {
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(parse_error(line, format!("expected `x y`, found {} fields", fields.len())));
            }
            let coord = |s: &str| -> Result<f64> {
                let v: f64 = s.parse().map_err(|_| parse_error(line, format!("`{s}` is not a number")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_error(line, format!("`{s}` is not finite")))
                }
            };
            Ok(Point::new(coord(fields[0])?, coord(fields[1])?))
        })
        .collect()
}

/// One `x y` line per point, printed so that parsing gives back the same
/// values.
pub fn write_points(points: &[Point]) -> String {
    let mut out = String::with_capacity(points.len() * 40);
    for p in points {
        writeln!(out, "{:?} {:?}", p.x, p.y).unwrap();
    }
    out
}

/// Parses triangles and checks every id against `n` points.
pub fn parse_triangles(text: &str, n: usize) -> Result<Vec<[PointId; 3]>> {
    content_lines(text)
        .map(|(line, l)| {
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_error(line, format!("expected `i j k`, found {} fields", fields.len())));
            }
            let mut t = [PointId(0); 3];
            for (slot, s) in t.iter_mut().zip(&fields) {
                let id: u32 = s.parse().map_err(|_| parse_error(line, format!("`{s}` is not a point id")))?;
                if id as usize >= n {
                    return Err(parse_error(line, format!("point id {id} out of range for {n} points")));
                }
                *slot = PointId(id);
            }
            Ok(t)
        })
        .collect()
}

pub fn write_triangles(triangles: &[[PointId; 3]]) -> String {
    let mut out = String::with_capacity(triangles.len() * 20);
    for t in triangles {
        writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
    }
    out
}
