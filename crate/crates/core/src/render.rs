//! Graphviz output. Solid arrows are Yin, dashed arrows Yang; objects sit
//! in three columns (left, middle, right).

use std::fmt::Write;

use crate::gillet_grayson::{GGPath, Orientation};
use crate::nenashev::Nen33;
use crate::sequences::{DoubleExact, Schematic, ShortExact};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn header(name: &str) -> String {
    format!("digraph {name} {{\n  rankdir=LR;\n  node [shape=plaintext];\n")
}

fn node(out: &mut String, id: &str, label: &str) {
    writeln!(out, "  {id} [label=\"{}\"];", escape(label)).expect("write to string");
}

fn arrow(out: &mut String, from: &str, to: &str, dashed: bool) {
    let style = if dashed { "dashed" } else { "solid" };
    writeln!(out, "  {from} -> {to} [style={style}];").expect("write to string");
}

fn row(out: &mut String, prefix: &str, s: &ShortExact, dashed: bool) {
    let ids = [0, 1, 2].map(|k| format!("{prefix}_{k}"));
    for (id, x) in ids.iter().zip([s.left(), s.mid(), s.right()]) {
        node(out, id, &x.to_string());
    }
    arrow(out, &ids[0], &ids[1], dashed);
    arrow(out, &ids[1], &ids[2], dashed);
}

/// One row of objects with both pairs of maps.
pub fn des_to_dot(d: &DoubleExact) -> String {
    let mut out = header("double_exact");
    for (k, x) in [d.left(), d.mid(), d.right()].into_iter().enumerate() {
        node(&mut out, &format!("x{k}"), &x.to_string());
    }
    arrow(&mut out, "x0", "x1", false);
    arrow(&mut out, "x1", "x2", false);
    arrow(&mut out, "x0", "x1", true);
    arrow(&mut out, "x1", "x2", true);
    out.push_str("}\n");
    out
}

/// Rows above the line solid, rows below dashed.
pub fn schematic_to_dot(s: &Schematic) -> String {
    let mut out = header("schematic");
    for (i, r) in s.above.iter().enumerate() {
        row(&mut out, &format!("a{i}"), r, false);
    }
    for (i, r) in s.below.iter().enumerate() {
        row(&mut out, &format!("b{i}"), r, true);
    }
    out.push_str("}\n");
    out
}

/// The nine objects with Yin and Yang arrows.
pub fn nen33_to_dot(n: &Nen33) -> String {
    let mut out = String::from("digraph three_by_three {\n  node [shape=plaintext];\n");
    let id = |i: usize, j: usize| format!("x{i}{j}");
    for (i, r) in n.rows.iter().enumerate() {
        for (j, x) in [r.left(), r.mid(), r.right()].into_iter().enumerate() {
            node(&mut out, &id(i, j), &x.to_string());
        }
        writeln!(out, "  {{ rank=same; {} {} {} }}", id(i, 0), id(i, 1), id(i, 2)).expect("write to string");
    }
    for dashed in [false, true] {
        for i in 0..3 {
            arrow(&mut out, &id(i, 0), &id(i, 1), dashed);
            arrow(&mut out, &id(i, 1), &id(i, 2), dashed);
            arrow(&mut out, &id(0, i), &id(1, i), dashed);
            arrow(&mut out, &id(1, i), &id(2, i), dashed);
        }
    }
    out.push_str("}\n");
    out
}

/// Vertices of the path with one arrow per edge; backward steps are drawn
/// against the direction of travel.
pub fn path_to_dot(p: &GGPath) -> String {
    let mut out = header("path");
    let mut vertices: Vec<String> = Vec::new();
    let mut index = |v: String, out: &mut String| -> usize {
        if let Some(k) = vertices.iter().position(|w| *w == v) {
            return k;
        }
        node(out, &format!("v{}", vertices.len()), &v);
        vertices.push(v);
        vertices.len() - 1
    };
    for (k, step) in p.steps.iter().enumerate() {
        let s = index(step.edge.source.to_string(), &mut out);
        let t = index(step.edge.target.to_string(), &mut out);
        let dir = match step.orientation {
            Orientation::Forward => "",
            Orientation::Backward => ", color=gray40",
        };
        writeln!(
            out,
            "  v{s} -> v{t} [label=\"{k}: {}\"{dir}];",
            escape(&step.edge.dotted.right().to_string())
        )
        .expect("write to string");
    }
    out.push_str("}\n");
    out
}
