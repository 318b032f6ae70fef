//! CSV writers. Every float is written with 17 significant digits so it
//! parses back to the identical `f64`.

use std::io::{self, Write};

use crate::analysis::EmpiricalDensity;
use crate::fokker_planck::StationaryDensity;
use crate::integrate::{Trajectory, Trajectory3};

/// Round-trip formatting of one value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn row<W: Write>(w: &mut W, cells: &[f64]) -> io::Result<()> {
    let mut first = true;
    for &c in cells {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        write!(w, "{c:.16e}")?;
    }
    w.write_all(b"\n")
}

/// `t,<variable>` with one row per sample.
pub fn write_trajectory_csv<W: Write>(w: &mut W, traj: &Trajectory) -> io::Result<()> {
    writeln!(w, "t,{}", traj.variable())?;
    for (i, &v) in traj.values().iter().enumerate() {
        row(w, &[traj.time(i), v])?;
    }
    Ok(())
}

pub fn write_trajectory3_csv<W: Write>(w: &mut W, traj: &Trajectory3) -> io::Result<()> {
    writeln!(w, "t,x,y,z")?;
    for (i, p) in traj.points.iter().enumerate() {
        row(w, &[traj.time(i), p[0], p[1], p[2]])?;
    }
    Ok(())
}

pub fn write_density_csv<W: Write>(w: &mut W, density: &StationaryDensity) -> io::Result<()> {
    writeln!(w, "y,rho")?;
    for (y, r) in density.y.iter().zip(&density.rho) {
        row(w, &[*y, *r])?;
    }
    Ok(())
}

pub fn write_histogram_csv<W: Write>(w: &mut W, hist: &EmpiricalDensity) -> io::Result<()> {
    writeln!(w, "bin_left,bin_right,prob")?;
    for (l, r, p) in hist.rows() {
        row(w, &[l, r, p])?;
    }
    Ok(())
}

/// A table cell: integers stay integers, floats round-trip, text is quoted
/// only when it has to be.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Text(String::new()), Cell::Float)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Float(v) => write!(f, "{v:.16e}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// Header row followed by one line per row. Rows must match the header width.
pub fn write_table_csv<W: Write>(w: &mut W, header: &[&str], rows: &[Vec<Cell>]) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        if r.len() != header.len() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("row has {} cells, header has {}", r.len(), header.len()),
            ));
        }
        let line: Vec<String> = r.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}
