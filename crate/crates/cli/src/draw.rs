//! Network drawings: a seeded Fruchterman-Reingold layout rendered into a
//! 2×2 SVG grid (observed network top left, then up to three draws), and DOT.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use ergm_core::seed::{derive_seed, rng_from_seed};
use ergm_core::Network;
use rand::Rng;

const CELL: f64 = 320.0;
const MARGIN: f64 = 24.0;
const ITERATIONS: usize = 300;

/// Node positions in the unit square.
pub fn layout(net: &Network, seed: u64) -> Vec<[f64; 2]> {
    let n = net.node_count();
    let mut rng = rng_from_seed(seed);
    let mut pos: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
    if n < 2 {
        return vec![[0.5, 0.5]; n];
    }
    let k = (1.0 / n as f64).sqrt();
    let edges = net.edges();
    let mut temperature = 0.1;
    for _ in 0..ITERATIONS {
        let mut disp = vec![[0.0f64; 2]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = [pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]];
                let dist = d[0].hypot(d[1]).max(1e-9);
                let f = k * k / dist;
                for c in 0..2 {
                    disp[i][c] += d[c] / dist * f;
                    disp[j][c] -= d[c] / dist * f;
                }
            }
        }
        for &(i, j) in &edges {
            let d = [pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]];
            let dist = d[0].hypot(d[1]).max(1e-9);
            let f = dist * dist / k;
            for c in 0..2 {
                disp[i][c] -= d[c] / dist * f;
                disp[j][c] += d[c] / dist * f;
            }
        }
        for (p, d) in pos.iter_mut().zip(&mut disp) {
            // weak pull to the centre keeps isolates in the frame
            for c in 0..2 {
                d[c] -= (p[c] - 0.5) * k;
            }
            let len = d[0].hypot(d[1]).max(1e-9);
            let step = len.min(temperature);
            for c in 0..2 {
                p[c] += d[c] / len * step;
            }
        }
        temperature *= 0.985;
    }
    normalise(&mut pos);
    pos
}

fn normalise(pos: &mut [[f64; 2]]) {
    for c in 0..2 {
        let lo = pos.iter().map(|p| p[c]).fold(f64::INFINITY, f64::min);
        let hi = pos.iter().map(|p| p[c]).fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        for p in pos.iter_mut() {
            p[c] = if span > 1e-12 { (p[c] - lo) / span } else { 0.5 };
        }
    }
}

fn panel(out: &mut String, net: &Network, title: &str, x0: f64, y0: f64, seed: u64) {
    let pos = layout(net, seed);
    let inner = CELL - 2.0 * MARGIN;
    let at = |v: usize| (x0 + MARGIN + pos[v][0] * inner, y0 + MARGIN + pos[v][1] * inner);
    let _ = writeln!(out, r##"<g class="panel">"##);
    let _ = writeln!(
        out,
        r##"<rect x="{x0:.1}" y="{y0:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="white" stroke="#999"/>"##
    );
    let _ = writeln!(out, r##"<text x="{:.1}" y="{:.1}" font-size="13">{title}</text>"##, x0 + 8.0, y0 + 16.0);
    for (i, j) in net.edges() {
        let (a, b) = (at(i), at(j));
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555" stroke-width="1"/>"##,
            a.0, a.1, b.0, b.1
        );
    }
    for v in 0..net.node_count() {
        let (x, y) = at(v);
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="#2b6cb0"><title>{}</title></circle>"##, escape(net.label(v)));
    }
    let _ = writeln!(out, "</g>");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The observed network and up to three simulated draws in a 2×2 grid;
/// missing draws leave blank cells.
pub fn svg_grid(observed: &Network, draws: &[Network], seed: u64) -> Result<String> {
    if draws.len() > 3 {
        bail!("at most three draws fit beside the observed network, got {}", draws.len());
    }
    let mut out = String::new();
    let side = 2.0 * CELL;
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{side:.0}" height="{side:.0}" viewBox="0 0 {side:.0} {side:.0}">"##
    );
    for cell in 0..4 {
        let (x0, y0) = ((cell % 2) as f64 * CELL, (cell / 2) as f64 * CELL);
        let seed = derive_seed(seed, &[cell as u64]);
        match cell {
            0 => panel(&mut out, observed, "observed", x0, y0, seed),
            c if c <= draws.len() => panel(&mut out, &draws[c - 1], &format!("draw {c}"), x0, y0, seed),
            _ => {
                let _ = writeln!(
                    out,
                    r##"<g class="blank"><rect x="{x0:.1}" y="{y0:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="#f4f4f4" stroke="#ccc"/></g>"##
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn dot(net: &Network, name: &str) -> String {
    let mut out = format!("graph \"{name}\" {{\n");
    for v in 0..net.node_count() {
        let _ = writeln!(out, "  \"{}\";", net.label(v).replace('"', "\\\""));
    }
    for (i, j) in net.edges() {
        let _ = writeln!(out, "  \"{}\" -- \"{}\";", net.label(i).replace('"', "\\\""), net.label(j).replace('"', "\\\""));
    }
    out.push_str("}\n");
    out
}
