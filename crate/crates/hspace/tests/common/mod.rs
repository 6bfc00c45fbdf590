#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use hspace_core::rng::seeded;
use hspace_core::{Graph, Pair};
use rand::Rng;

/// Erdős–Rényi graph restricted to its giant component.
pub fn er_giant(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = seeded(seed);
    let mut edges: Vec<Pair> = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap().giant_component().0
}

pub fn dense_adjacency(g: &Graph) -> nalgebra::DMatrix<f64> {
    let n = g.node_count();
    let mut a = nalgebra::DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u as usize, v as usize)] = 1.0;
        a[(v as usize, u as usize)] = 1.0;
    }
    a
}

/// Runs the `hspace` binary in `dir`.
pub fn hspace(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hspace"))
        .current_dir(dir)
        .args(args)
        .env("HS_THREADS", "2")
        .output()
        .expect("binary runs")
}

/// Runs `hspace` and panics with its stderr on a non-zero exit.
pub fn hspace_ok(dir: &Path, args: &[&str]) -> String {
    let out = hspace(dir, args);
    assert!(
        out.status.success(),
        "hspace {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// CSV body of a command output: metadata comments stripped.
pub fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

pub fn write_edges(path: &Path, edges: &[(u32, u32)]) {
    let text: String = edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
    std::fs::write(path, text).unwrap();
}
