//! Potential files: CSV with columns `x, y, V1, V2`, one row per grid node
//! in node order, optionally preceded by `#` comment lines.

use std::path::Path;

use dispersim_core::potential::MatrixPotential;
use dispersim_core::{Error, Grid2D, Result};
use serde::Deserialize;

use crate::output::float;

#[derive(Deserialize)]
struct Row {
    x: f64,
    y: f64,
    #[serde(rename = "V1")]
    v1: f64,
    #[serde(rename = "V2")]
    v2: f64,
}

pub fn potential_csv(grid: &Grid2D, pot: &MatrixPotential, header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("x,y,V1,V2\n");
    for (k, x) in grid.nodes.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            float(x[0]),
            float(x[1]),
            float(pot.v1_scalar[k]),
            float(pot.v2_scalar[k])
        ));
    }
    out
}

pub fn parse_potential(grid: &Grid2D, text: &str) -> Result<MatrixPotential> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let tol = 1e-9 * grid.extent.max(1.0);
    let mut v1 = Vec::with_capacity(grid.len());
    let mut v2 = Vec::with_capacity(grid.len());
    for (k, rec) in reader.deserialize::<Row>().enumerate() {
        let row = rec.map_err(|e| Error::Parse(format!("row {}: {e}", k + 1)))?;
        let Some(node) = grid.nodes.get(k) else {
            return Err(Error::Parse(format!("more rows than the {} grid nodes", grid.len())));
        };
        if (row.x - node[0]).abs() > tol || (row.y - node[1]).abs() > tol {
            return Err(Error::Parse(format!(
                "row {} at ({}, {}) does not match grid node ({}, {})",
                k + 1,
                row.x,
                row.y,
                node[0],
                node[1]
            )));
        }
        v1.push(row.v1);
        v2.push(row.v2);
    }
    if v1.len() != grid.len() {
        return Err(Error::Parse(format!("expected {} rows, found {}", grid.len(), v1.len())));
    }
    MatrixPotential::from_fields(grid, v1, v2)
}

pub fn load_potential_file(grid: &Grid2D, path: &Path) -> Result<MatrixPotential> {
    parse_potential(grid, &std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dispersim_core::make_grid;

    fn sample(grid: &Grid2D) -> MatrixPotential {
        let v1 = grid.field(|x| 2.0 * (-(x[0] * x[0] + x[1] * x[1]) / 3.0).exp());
        let v2 = grid.field(|x| (-(x[0] * x[0] + x[1] * x[1]) / 3.0).exp() * (0.3 + 0.1 * x[0]).sin());
        MatrixPotential::from_fields(grid, v1, v2).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let g = make_grid(4.0, 9).unwrap();
        let p = sample(&g);
        let back = parse_potential(&g, &potential_csv(&g, &p, "test")).unwrap();
        for k in 0..g.len() {
            assert!((back.v1_scalar[k] - p.v1_scalar[k]).abs() <= 1e-15);
            assert!((back.v2_scalar[k] - p.v2_scalar[k]).abs() <= 1e-15);
        }
    }

    #[test]
    fn a1_violation_names_the_row() {
        let g = make_grid(4.0, 9).unwrap();
        let p = sample(&g);
        let mut text = potential_csv(&g, &p, "");
        let bad = format!("{},{},1.0,2.0", float(g.nodes[17][0]), float(g.nodes[17][1]));
        let lines: Vec<String> = text
            .lines()
            .enumerate()
            .map(|(i, l)| if i == 18 { bad.clone() } else { l.to_string() })
            .collect();
        text = lines.join("\n");
        match parse_potential(&g, &text) {
            Err(Error::AssumptionA1 { node, .. }) => assert_eq!(node, 17),
            other => panic!("expected an A1 rejection, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let g = make_grid(4.0, 9).unwrap();
        let text = potential_csv(&g, &sample(&g), "");
        let other = make_grid(5.0, 9).unwrap();
        assert!(matches!(parse_potential(&other, &text), Err(Error::Parse(_))));
        let bigger = make_grid(4.0, 10).unwrap();
        assert!(matches!(parse_potential(&bigger, &text), Err(Error::Parse(_))));
    }
}
