use std::fmt::Write as _;

use qwire_core::boundary::{is_local, local_decomposition, operators_equal};
use qwire_core::gauge::{isotropy_identity_component, membership_report, IsotropyDescription};
use qwire_core::homology::{betti_numbers, cycle_basis, fluxes, realize_flux, FluxAssignment};
use qwire_core::linalg::{rank, Tolerances};
use qwire_core::phase::Phase;
use qwire_core::potential::flux_of_potential;
use qwire_core::spectral::{eigenvalues_scan, SecularProblem};
use serde::Serialize;

use crate::model::Model;
use crate::output::{complex_rows, fmt_list, fmt_num, num, phase, slot_labels};
use crate::{CliError, FluxSource, Format};

fn render<T: Serialize>(
    report: &T,
    fmt: Format,
    text: impl FnOnce(&T) -> String,
) -> Result<String, CliError> {
    match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            Ok(s)
        }
        Format::Text => Ok(text(report)),
    }
}

#[derive(Serialize)]
struct VertexBlockReport {
    vertex: String,
    coordinates: Vec<String>,
    #[serde(rename = "A")]
    a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "B")]
    b: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct CheckReport {
    dimension: usize,
    self_adjoint: bool,
    hermiticity_defect: f64,
    rank: usize,
    /// `null` when the conditions are not self-adjoint.
    local: Option<bool>,
    vertex_blocks: Option<Vec<VertexBlockReport>>,
}

pub fn check(model: &Model, tol: &Tolerances, fmt: Format) -> Result<String, CliError> {
    let bc = &model.bc;
    let map = model.graph.boundary_coordinate_map();
    let labels = slot_labels(&model.graph, &map);
    let self_adjoint = bc.check_self_adjoint(tol);
    let (local, vertex_blocks) = if self_adjoint {
        let local = is_local(bc, &map, tol)?;
        let blocks = if local {
            let dec = local_decomposition(bc, &map, tol)?;
            Some(
                dec.blocks
                    .iter()
                    .map(|b| VertexBlockReport {
                        vertex: model.graph.vertices()[b.vertex].clone(),
                        coordinates: b.slots.iter().map(|&j| labels[j].clone()).collect(),
                        a: complex_rows(&b.a),
                        b: complex_rows(&b.b),
                    })
                    .collect(),
            )
        } else {
            None
        };
        (Some(local), blocks)
    } else {
        (None, None)
    };
    let report = CheckReport {
        dimension: bc.dim(),
        self_adjoint,
        hermiticity_defect: num(bc.hermiticity_defect()),
        rank: rank(&bc.stacked(), tol),
        local,
        vertex_blocks,
    };
    render(&report, fmt, |r| {
        let mut s = String::new();
        let _ = writeln!(s, "dimension      {}", r.dimension);
        let _ = writeln!(s, "self-adjoint   {}", r.self_adjoint);
        let _ = writeln!(s, "defect         {}", fmt_num(r.hermiticity_defect));
        let _ = writeln!(s, "rank (A|B)     {}", r.rank);
        let local = r.local.map_or("n/a".to_string(), |l| l.to_string());
        let _ = writeln!(s, "local          {local}");
        for blk in r.vertex_blocks.iter().flatten() {
            let _ = writeln!(s, "vertex {}: {}", blk.vertex, blk.coordinates.join(" "));
        }
        s
    })
}

#[derive(Serialize)]
struct MembershipOut {
    member: bool,
    ker_a_invariant: bool,
    ker_b_invariant: bool,
    commutator: bool,
}

#[derive(Serialize)]
struct IsotropyReport {
    dimension: usize,
    coordinates: Vec<String>,
    /// Coordinates grouped by the phase they share along the identity
    /// component; `null` when the tangent space has no such description.
    blocks: Option<Vec<Vec<String>>>,
    tangent_basis: Vec<Vec<f64>>,
    contains_w0: bool,
    equals_u: bool,
    membership: Option<MembershipOut>,
}

/// Partition of the coordinates whose indicator vectors span the tangent
/// space, if there is one.
fn indicator_blocks(desc: &IsotropyDescription, k: usize) -> Option<Vec<Vec<usize>>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for j in 0..k {
        let same = |i: usize| desc.tangent_basis.iter().all(|b| (b[i] - b[j]).abs() < 1e-8);
        match blocks.iter_mut().find(|blk| same(blk[0])) {
            Some(blk) => blk.push(j),
            None => blocks.push(vec![j]),
        }
    }
    let spans = blocks.len() == desc.dimension
        && blocks.iter().all(|blk| {
            let ind: Vec<f64> = (0..k).map(|j| if blk.contains(&j) { 1.0 } else { 0.0 }).collect();
            desc.tangent_residual(&ind) < 1e-8
        });
    spans.then_some(blocks)
}

pub fn isotropy(model: &Model, tol: &Tolerances, fmt: Format) -> Result<String, CliError> {
    let map = model.graph.boundary_coordinate_map();
    let labels = slot_labels(&model.graph, &map);
    let desc = isotropy_identity_component(&model.bc, &map, tol)?;
    let k = map.dim();
    let blocks = indicator_blocks(&desc, k);
    let tangent_basis = match &blocks {
        Some(blocks) => blocks
            .iter()
            .map(|blk| (0..k).map(|j| if blk.contains(&j) { 1.0 } else { 0.0 }).collect())
            .collect(),
        None => desc
            .tangent_basis
            .iter()
            .map(|b| b.iter().map(|&x| num(x)).collect())
            .collect(),
    };
    let membership = match &model.unitary {
        Some(u) => {
            let r = membership_report(&model.bc, u, tol)?;
            Some(MembershipOut {
                member: r.is_member(),
                ker_a_invariant: r.ker_a_invariant,
                ker_b_invariant: r.ker_b_invariant,
                commutator: r.commutator,
            })
        }
        None => None,
    };
    let report = IsotropyReport {
        dimension: desc.dimension,
        coordinates: labels.clone(),
        blocks: blocks.map(|bs| {
            bs.iter()
                .map(|blk| blk.iter().map(|&j| labels[j].clone()).collect())
                .collect()
        }),
        tangent_basis,
        contains_w0: desc.contains_w0,
        equals_u: desc.equals_u,
        membership,
    };
    render(&report, fmt, |r| {
        let mut s = String::new();
        let _ = writeln!(s, "dimension      {}", r.dimension);
        let _ = writeln!(s, "contains W0    {}", r.contains_w0);
        let _ = writeln!(s, "equals U       {}", r.equals_u);
        match &r.blocks {
            Some(blocks) => {
                for blk in blocks {
                    let _ = writeln!(s, "block          {}", blk.join(" "));
                }
            }
            None => {
                for b in &r.tangent_basis {
                    let _ = writeln!(s, "tangent        {}", fmt_list(b));
                }
            }
        }
        if let Some(m) = &r.membership {
            let _ = writeln!(s, "member         {}", m.member);
        }
        s
    })
}

#[derive(Serialize)]
struct CycleOut {
    chord: String,
    /// `(edge id, coefficient)` for every edge on the cycle.
    edges: Vec<(String, i64)>,
}

#[derive(Serialize)]
struct HomologyReport {
    d: usize,
    betti: [usize; 2],
    spanning_tree: Vec<String>,
    cycle_basis: Vec<CycleOut>,
}

pub fn homology(model: &Model, fmt: Format) -> Result<String, CliError> {
    let g = &model.graph;
    let basis = cycle_basis(g)?;
    let id = |i: usize| g.internal_edges()[i].id.clone();
    let (b0, b1) = betti_numbers(g);
    let report = HomologyReport {
        d: basis.rank(),
        betti: [b0, b1],
        spanning_tree: basis.tree_edges.iter().map(|&i| id(i)).collect(),
        cycle_basis: basis
            .cycles
            .iter()
            .zip(&basis.chords)
            .map(|(c, &chord)| CycleOut {
                chord: id(chord),
                edges: c
                    .coefficients()
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n != 0)
                    .map(|(i, &n)| (id(i), n))
                    .collect(),
            })
            .collect(),
    };
    render(&report, fmt, |r| {
        let mut s = String::new();
        let _ = writeln!(s, "d              {}", r.d);
        let _ = writeln!(s, "betti          {} {}", r.betti[0], r.betti[1]);
        let _ = writeln!(s, "spanning tree  {}", r.spanning_tree.join(" "));
        for c in &r.cycle_basis {
            let terms: Vec<String> = c.edges.iter().map(|(e, n)| format!("{n:+}·{e}")).collect();
            let _ = writeln!(s, "cycle {:<8} {}", c.chord, terms.join(" "));
        }
        s
    })
}

#[derive(Serialize)]
struct FluxOut {
    chord: String,
    phase: f64,
}

#[derive(Serialize)]
struct FluxReport {
    source: &'static str,
    fluxes: Vec<FluxOut>,
}

pub fn flux(model: &Model, source: FluxSource, fmt: Format) -> Result<String, CliError> {
    let g = &model.graph;
    let basis = cycle_basis(g)?;
    let use_unitary = match source {
        FluxSource::Unitary => true,
        FluxSource::Potential => false,
        FluxSource::Auto => model.unitary.is_some(),
    };
    let phases: Vec<Phase> = if use_unitary {
        let u = model
            .unitary
            .as_ref()
            .ok_or_else(|| CliError::Invalid("model has no unitary section".into()))?;
        fluxes(u, &basis, g)?
    } else {
        let pot = model
            .potential
            .as_ref()
            .ok_or_else(|| CliError::Invalid("model has neither a unitary nor a potential section".into()))?;
        basis
            .cycles
            .iter()
            .map(|c| flux_of_potential(pot, c, g))
            .collect::<Result<_, _>>()?
    };
    let report = FluxReport {
        source: if use_unitary { "unitary" } else { "potential" },
        fluxes: basis
            .chords
            .iter()
            .zip(&phases)
            .map(|(&i, p)| FluxOut {
                chord: g.internal_edges()[i].id.clone(),
                phase: phase(p.angle()),
            })
            .collect(),
    };
    render(&report, fmt, |r| {
        let mut s = String::new();
        let _ = writeln!(s, "source         {}", r.source);
        for f in &r.fluxes {
            let _ = writeln!(s, "cycle {:<8} {}", f.chord, fmt_num(f.phase));
        }
        s
    })
}

/// Prints the model back with its unitary section replaced, so the output can
/// be fed to the other commands.
pub fn realize(model: Model, targets: &[f64], fmt: Format) -> Result<String, CliError> {
    let g = &model.graph;
    let basis = cycle_basis(g)?;
    if targets.len() != basis.rank() {
        return Err(CliError::Usage(format!(
            "--targets: expected {} phases (one per basis cycle), found {}",
            basis.rank(),
            targets.len()
        )));
    }
    if targets.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage("--targets: phases must be finite".into()));
    }
    let u = realize_flux(g, &basis, &FluxAssignment(targets.to_vec()))?;
    let phases: Vec<f64> = u.phases().iter().map(|&x| phase(x)).collect();
    let mut file = model.file;
    file.unitary = Some(phases.clone());
    match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&file).expect("model serializes");
            s.push('\n');
            Ok(s)
        }
        Format::Text => {
            let labels = slot_labels(g, &g.boundary_coordinate_map());
            let mut s = String::new();
            for (l, p) in labels.iter().zip(&phases) {
                let _ = writeln!(s, "{l:<14} {}", fmt_num(*p));
            }
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct EqualReport {
    equal: bool,
}

/// Compares the boundary conditions of two models on the same coordinates.
/// A unitary section is applied as `(A𝒰, B𝒰)` before comparing.
pub fn equal(first: &Model, second: &Model, tol: &Tolerances, fmt: Format) -> Result<String, CliError> {
    if first.potential.is_some() || second.potential.is_some() {
        return Err(CliError::Invalid(
            "equal compares boundary conditions only; remove the potential sections".into(),
        ));
    }
    let effective = |m: &Model| match &m.unitary {
        Some(u) => m.bc.transformed(u),
        None => Ok(m.bc.clone()),
    };
    let (a, b) = (effective(first)?, effective(second)?);
    for bc in [&a, &b] {
        if !bc.check_self_adjoint(tol) {
            return Err(qwire_core::Error::NotSelfAdjoint.into());
        }
    }
    let report = EqualReport {
        equal: operators_equal(&a, &b, tol)?,
    };
    render(&report, fmt, |r| format!("equal          {}\n", r.equal))
}

#[derive(Serialize)]
struct RootOut {
    k: f64,
    eigenvalue: f64,
    residual: f64,
    multiplicity: usize,
}

#[derive(Serialize)]
struct SpectrumReport {
    k_max: f64,
    grid_step: f64,
    threshold: f64,
    count: usize,
    roots: Vec<RootOut>,
}

pub fn spectrum(model: &Model, k_max: f64, grid: f64, fmt: Format) -> Result<String, CliError> {
    if !(k_max.is_finite() && k_max > 0.0 && grid.is_finite() && grid > 0.0) {
        return Err(CliError::Usage("--kmax and --grid must be positive".into()));
    }
    let prob = SecularProblem::new(&model.graph, &model.bc, model.potential.as_ref())?;
    let res = eigenvalues_scan(&prob, k_max, grid)?;
    let report = SpectrumReport {
        k_max: num(res.k_max),
        grid_step: num(res.grid_step),
        threshold: num(res.threshold),
        count: res.count(),
        roots: res
            .roots
            .iter()
            .map(|r| RootOut {
                k: num(r.k),
                eigenvalue: num(r.k * r.k),
                residual: num(r.residual),
                multiplicity: r.multiplicity,
            })
            .collect(),
    };
    render(&report, fmt, |r| {
        let mut s = String::new();
        let _ = writeln!(s, "{:>16} {:>18} {:>10} {:>4}", "k", "k^2", "residual", "mult");
        for root in &r.roots {
            let _ = writeln!(
                s,
                "{:>16.10} {:>18.10} {:>10.2e} {:>4}",
                root.k, root.eigenvalue, root.residual, root.multiplicity
            );
        }
        let _ = writeln!(s, "{} eigenvalues with 0 < k <= {}", r.count, fmt_num(r.k_max));
        s
    })
}
