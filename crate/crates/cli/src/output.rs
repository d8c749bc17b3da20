//! Number formatting shared by every report.

use qwire_core::graph::{BoundaryCoordinateMap, Endpoint, MetricGraph};
use qwire_core::linalg::CMatrix;
use qwire_core::phase::wrap_angle;

/// Rounds to twelve decimals so that reports are stable across platforms,
/// and never prints `-0`.
pub fn num(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    let r = if r.is_finite() { r } else { x };
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn phase(x: f64) -> f64 {
    let w = num(wrap_angle(x));
    // rounding can land exactly on −π
    if w <= -num(std::f64::consts::PI) {
        num(std::f64::consts::PI)
    } else {
        w
    }
}

pub fn complex_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter()
        .map(|row| row.iter().map(|z| [num(z.re), num(z.im)]).collect())
        .collect()
}

/// Human-readable names of the boundary coordinates: the external edge id,
/// or an internal edge id followed by `-` (at `x = 0`) or `+` (at `x = a`).
pub fn slot_labels(graph: &MetricGraph, map: &BoundaryCoordinateMap) -> Vec<String> {
    map.slots()
        .iter()
        .map(|s| match s.endpoint {
            Endpoint::External(e) => graph.external_edges()[e].id.clone(),
            Endpoint::Initial(i) => format!("{}-", graph.internal_edges()[i].id),
            Endpoint::Terminal(i) => format!("{}+", graph.internal_edges()[i].id),
        })
        .collect()
}

pub fn fmt_num(x: f64) -> String {
    format!("{}", num(x))
}

pub fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", parts.join(", "))
}
