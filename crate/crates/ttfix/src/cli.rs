//! Command-line interface.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use ttfix_core::core_builder::fix_basis;
use ttfix_core::df::{explore, to_dot, vertex_label};
use ttfix_core::error::{Error, Result};
use ttfix_core::graph::{EdgePath, Graph};
use ttfix_core::orbit::{Certificate, DEFAULT_HORIZON};
use ttfix_core::solver::{Finiteness, InfiniteReason, PerfectKind, PerfectWitness, Solver};
use ttfix_core::track::{subdivide_at_exceptional, TrackOptions, TrainTrack};

use crate::automorphism::parse_automorphism;
use crate::track_file::parse_traintrack;

/// What to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// A free basis of the fixed subgroup.
    FixBasis,
    /// Check the train-track conditions and print the constants.
    Validate,
    /// List the cancellation areas of every exponential stratum.
    Areas,
    /// Explore the graph of f-paths around `--mu`.
    DfExplore,
    /// Decide whether the subgraph above `--mu` is finite.
    Finiteness,
    /// Decide whether `--tau` lies in the subgraph above `--mu`.
    Membership,
}

/// Output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable text.
    Text,
    /// JSON.
    Json,
    /// Graphviz (`df-explore` only).
    Dot,
}

/// Computes fixed subgroups of free-group automorphisms with relative
/// train tracks.
#[derive(Debug, Parser)]
#[command(name = "ttfix", version)]
pub struct Cli {
    /// What to compute.
    #[arg(long, value_enum, default_value = "fix-basis")]
    pub mode: Mode,
    /// Input: a `.json` train track or a `.aut` automorphism.
    #[arg(long)]
    pub input: PathBuf,
    /// Orbit horizon.
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: usize,
    /// Override the critical iterate.
    #[arg(long)]
    pub n_critical: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Exploration depth.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Start vertex (a path written with edge names).
    #[arg(long)]
    pub mu: Option<String>,
    /// Target vertex for `membership`.
    #[arg(long)]
    pub tau: Option<String>,
    /// Seed for the processing order (the result does not depend on it).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Invalid(_) => 2,
        Error::NotATrainTrack(_) => 3,
        Error::OrbitUnknown { .. } | Error::BoundExhausted(_) => 4,
        Error::Internal(_) => 1,
    }
}

fn options(cli: &Cli) -> TrackOptions {
    TrackOptions { n_critical: cli.n_critical, ..TrackOptions::default() }
}

/// Loads the input.  Automorphisms need their inverse block: the homotopy
/// inverse of the rose map is read off from it.
fn load(cli: &Cli) -> Result<TrainTrack> {
    let text = std::fs::read_to_string(&cli.input)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", cli.input.display())))?;
    if cli.input.extension().is_some_and(|x| x == "json") {
        parse_traintrack(&text, options(cli))
    } else {
        let parsed = parse_automorphism(&text)?;
        if !parsed.has_inverse {
            return Err(Error::Invalid("the automorphism needs an `inverse:` block".into()));
        }
        TrainTrack::from_automorphism(&parsed.phi, options(cli))
    }
}

fn path_arg(tt: &TrainTrack, arg: &Option<String>, flag: &str) -> Result<EdgePath> {
    let s = arg.as_deref().ok_or_else(|| Error::Invalid(format!("--{flag} is required in this mode")))?;
    let g = tt.graph();
    let s = s.trim();
    if let Some(v) = s.strip_prefix("1_") {
        let v: usize = v.parse().map_err(|_| Error::Invalid(format!("bad vertex in `{s}`")))?;
        if v >= g.vertex_count() {
            return Err(Error::Invalid(format!("vertex {v} out of range")));
        }
        return Ok(EdgePath::trivial(v));
    }
    // A non-trivial path determines its start vertex.
    let mut last = None;
    for v in 0..g.vertex_count() {
        match g.parse_path(v, s) {
            Ok(p) => return Ok(p),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Invalid(format!("bad path `{s}`"))))
}

fn render(cli: &Cli, text: String, value: Value) -> String {
    match cli.format {
        Format::Json => serde_json::to_string_pretty(&value).expect("json values serialize") + "\n",
        _ => text,
    }
}

fn constants_json(tt: &TrainTrack) -> Value {
    let c = &tt.constants;
    json!({
        "c_star": c.c_star,
        "k_star": c.k_star,
        "r_star": c.r_star,
        "p": c.p,
        "norm_f": c.norm_f,
        "norm_g": c.norm_g,
        "strata": c.strata.iter().map(|s| json!({
            "r": s.r + 1,
            "lambda": s.lambda.to_string(),
            "lambda_approx": s.lambda.approx(),
            "n_critical": s.n_critical,
            "m_r": s.m_r,
            "n_r": s.n_r,
            "big_m_r": s.big_m_r,
            "area_count": s.area_count,
            "complete": s.complete,
        })).collect::<Vec<_>>(),
    })
}

fn constants_text(tt: &TrainTrack) -> String {
    let c = &tt.constants;
    let mut out = format!(
        "vertices {} edges {} strata {}\nC* = {}  K* = {}  R* = {}  P = {}  |f| = {}  |g| = {}\n",
        tt.graph().vertex_count(),
        tt.graph().pair_count(),
        tt.filt.strata().len(),
        c.c_star,
        c.k_star,
        c.r_star,
        c.p,
        c.norm_f,
        c.norm_g
    );
    for s in &c.strata {
        out += &format!(
            "stratum {}: lambda = {} (~{:.6}), n_critical = {}, m_r = {}, areas = {}{}\n",
            s.r + 1,
            s.lambda,
            s.lambda.approx(),
            s.n_critical,
            s.m_r,
            s.area_count,
            if s.complete { "" } else { " (incomplete)" }
        );
    }
    out
}

fn describe(g: &Graph, reason: &InfiniteReason) -> String {
    let witness = |w: &PerfectWitness| {
        let kind = match w.kind {
            PerfectKind::RPerfect => "r-perfect",
            PerfectKind::APerfect => "A-perfect",
            PerfectKind::EPerfect => "E-perfect",
        };
        format!("{kind} vertex {} of stratum {} after {} steps", vertex_label(g, &w.vertex), w.stratum + 1, w.step)
    };
    match reason {
        InfiniteReason::RPerfect(w) => witness(w),
        InfiniteReason::Family(w, Certificate::Growth { step, stratum }) => format!(
            "{}; its family grows (legal segment of stratum {} at iterate {step})",
            witness(w),
            stratum + 1
        ),
        InfiniteReason::Family(w, Certificate::Translation { step, left, right }) => format!(
            "{}; its family is translated by ({}, {}) from iterate {step}",
            witness(w),
            vertex_label(g, left),
            vertex_label(g, right)
        ),
    }
}

/// Runs the command and returns its output.
pub fn run(cli: &Cli) -> Result<String> {
    let tt = load(cli)?;
    match cli.mode {
        Mode::FixBasis => {
            let basis = fix_basis(&tt, cli.horizon, cli.seed)?;
            let words: Vec<String> = basis.words.iter().map(|w| w.to_string()).collect();
            let mut text = format!("rank {}\n", words.len());
            for w in &words {
                text += &format!("{w}\n");
            }
            let value = json!({
                "rank": words.len(),
                "basis": words,
                "core": {"vertices": basis.core_vertices, "edges": basis.core_edges},
                "constants": constants_json(&tt),
            });
            Ok(render(cli, text, value))
        }
        Mode::Validate => {
            let text = format!("relative train track: ok\n{}", constants_text(&tt));
            Ok(render(cli, text, json!({"valid": true, "constants": constants_json(&tt)})))
        }
        Mode::Areas => {
            let g = tt.graph();
            let mut text = String::new();
            let mut strata = Vec::new();
            for r in tt.filt.exponential_strata() {
                let Some(cat) = tt.catalog(r) else { continue };
                text += &format!(
                    "stratum {}: {} areas{}\n",
                    r + 1,
                    cat.areas.len(),
                    if cat.complete { "" } else { " (incomplete)" }
                );
                let mut areas = Vec::new();
                for (i, a) in cat.areas.iter().enumerate() {
                    let p = a.path(g);
                    text += &format!("  {}  radius {}  image #{}\n", vertex_label(g, &p), a.radius, cat.image[i]);
                    areas.push(json!({
                        "path": vertex_label(g, &p),
                        "radius": a.radius.to_string(),
                        "image": cat.image[i],
                    }));
                }
                strata.push(json!({"r": r + 1, "complete": cat.complete, "areas": areas}));
            }
            Ok(render(cli, text, json!({ "strata": strata })))
        }
        Mode::DfExplore => {
            let mu = path_arg(&tt, &cli.mu, "mu")?;
            let g = tt.graph();
            let frag = explore(&tt.f, &mu, cli.depth);
            if cli.format == Format::Dot {
                return Ok(to_dot(g, &frag));
            }
            let mut text = format!("{} vertices, {} edges\n", frag.vertices.len(), frag.edges.len());
            let edges: Vec<Value> = frag
                .edges
                .iter()
                .map(|e| {
                    let (s, t) = (vertex_label(g, &e.source), vertex_label(g, &e.target));
                    let class = format!("{:?}", e.class).to_lowercase();
                    text += &format!("{s} --{}--> {t}  [{class}]\n", g.edge_name(e.label));
                    json!({"source": s, "label": g.edge_name(e.label), "target": t, "class": class})
                })
                .collect();
            let vertices: Vec<String> = frag.vertices.iter().map(|v| vertex_label(g, v)).collect();
            Ok(render(cli, text, json!({"vertices": vertices, "edges": edges})))
        }
        Mode::Finiteness | Mode::Membership => {
            let sub = subdivide_at_exceptional(&tt)?;
            let solver = Solver::new(&sub)?.with_horizon(cli.horizon);
            let g = sub.graph();
            let mu = path_arg(&sub, &cli.mu, "mu")?;
            if cli.mode == Mode::Finiteness {
                match solver.finiteness(&mu)? {
                    Finiteness::Finite(vs) => {
                        let labels: Vec<String> = vs.iter().map(|v| vertex_label(g, v)).collect();
                        let text = format!("finite ({} vertices)\n{}\n", labels.len(), labels.join("\n"));
                        Ok(render(cli, text, json!({"finite": true, "vertices": labels})))
                    }
                    Finiteness::Infinite(reason) => {
                        let reason = describe(g, &reason);
                        let text = format!("infinite: {reason}\n");
                        Ok(render(cli, text, json!({"finite": false, "reason": reason})))
                    }
                }
            } else {
                let tau = path_arg(&sub, &cli.tau, "tau")?;
                let inside = solver.membership(&mu, &tau)?;
                let text = format!("{}\n", if inside { "member" } else { "not a member" });
                Ok(render(cli, text, json!({ "member": inside })))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_line_is_well_formed() {
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["ttfix", "--input", "x.aut", "--mode", "df-explore", "--mu", "ab"]).unwrap();
        assert_eq!(cli.mode, Mode::DfExplore);
        assert_eq!(cli.horizon, DEFAULT_HORIZON);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Invalid("x".into())), 2);
        assert_eq!(exit_code(&Error::NotATrainTrack("x".into())), 3);
        assert_eq!(exit_code(&Error::OrbitUnknown { query: "q".into(), horizon: 1 }), 4);
        assert_eq!(exit_code(&Error::Internal("x".into())), 1);
    }
}
