//! The `dcg` subcommand: ingest a point set, sweep the scale grid, pick
//! the stable scales, and write the tree plus its diagnostics.

use dcgkit::dcg::{dcg_run, default_grid, DcgConfig, SharingMatrix, WalkParams};
use dcgkit::{pairwise_euclidean, rank_normalize, Axis, DataMatrix, DistanceMatrix, Result};
use serde::Serialize;

use crate::manifest::ManifestBuilder;
use crate::util::parse_grid;
use crate::{DcgArgs, InputSource, Outcome, WalkArgs};

/// Reads the point set as a distance matrix, whichever form it came in.
/// Data matrices are rank-normalized, then rows are compared by
/// Euclidean distance.
pub fn ingest(input: &InputSource, mb: &mut ManifestBuilder) -> Result<DistanceMatrix> {
    match (&input.matrix, &input.distance) {
        (Some(path), None) => {
            mb.param("matrix", path.display());
            let m = DataMatrix::from_csv(&mb.read_input(path)?)?;
            let normalized = rank_normalize(&m)?;
            pairwise_euclidean(&normalized, Axis::Rows)
        }
        (None, Some(path)) => {
            mb.param("distance", path.display());
            DistanceMatrix::from_csv(&mb.read_input(path)?)
        }
        // clap enforces exactly one source; kept for direct callers.
        _ => Err(dcgkit::Error::InvalidInput(
            "exactly one of --matrix/--distance is required".into(),
        )),
    }
}

/// Translates the shared walk flags into a library config.
pub fn walk_config(walk: &WalkArgs) -> DcgConfig {
    DcgConfig {
        m_traj: walk.trajectories,
        walk: WalkParams {
            visit_threshold: walk.visit_threshold,
            spike_factor: walk.spike_factor,
            ..WalkParams::default()
        },
        eigen_rel_tol: walk.eigen_tol,
        min_run: walk.min_run,
    }
}

/// Records the shared walk flags in the manifest.
pub fn record_walk_params(walk: &WalkArgs, mb: &mut ManifestBuilder) {
    mb.param("trajectories", walk.trajectories);
    mb.param("visit-threshold", walk.visit_threshold);
    mb.param("spike-factor", walk.spike_factor);
    mb.param("eigen-tol", walk.eigen_tol);
    mb.param("min-run", walk.min_run);
}

#[derive(Serialize)]
struct SelectedOut {
    grid_index: usize,
    temperature: f64,
    cluster_count: usize,
}

#[derive(Serialize)]
struct LevelOut {
    height: f64,
    n_branches: usize,
    branch_sizes: Vec<usize>,
}

/// Everything `report.json` carries about one run.
#[derive(Serialize)]
struct Report {
    n_points: usize,
    grid: Vec<f64>,
    cluster_counts: Vec<usize>,
    /// Per grid point: sharing-distance triples violating the
    /// tree-realizability bound, over total triples.
    ultrametricity: Vec<(usize, usize)>,
    selected: Vec<SelectedOut>,
    degenerate_selection: bool,
    levels: Vec<LevelOut>,
}

fn sharing_csv(q: &SharingMatrix) -> String {
    let mut out = String::new();
    out.push(',');
    out.push_str(&q.labels().join(","));
    out.push('\n');
    for i in 0..q.n() {
        out.push_str(&q.labels()[i]);
        for j in 0..q.n() {
            out.push(',');
            out.push_str(&format!("{}", q.get(i, j)));
        }
        out.push('\n');
    }
    out
}

pub fn run(args: &DcgArgs) -> Result<Outcome> {
    let mut mb = ManifestBuilder::new("dcg", args.seed, &args.out)?;
    let d = ingest(&args.input, &mut mb)?;
    let grid = match &args.grid {
        Some(spec) => {
            mb.param("grid", spec);
            parse_grid(spec)?
        }
        None => {
            mb.param("grid", "auto:30");
            default_grid(&d, 30)?
        }
    };
    record_walk_params(&args.walk, &mut mb);
    mb.param("sharing", args.sharing);
    let cfg = walk_config(&args.walk);
    let run = dcg_run(&d, &grid, &cfg, args.seed)?;

    mb.write_output("tree.nwk", &(run.tree.to_newick() + "\n"))?;
    let mut profile = String::from("temperature\tcluster_count\n");
    for (t, n) in run.profile.grid().iter().zip(run.profile.counts()) {
        profile.push_str(&format!("{}\t{}\n", t.value(), n));
    }
    mb.write_output("profile.tsv", &profile)?;
    if args.sharing {
        for sel in &run.selected {
            let csv = sharing_csv(&run.profile.sharing()[sel.grid_index]);
            mb.write_output(&format!("sharing_{}.csv", sel.grid_index), &csv)?;
        }
    }
    let report = Report {
        n_points: d.n(),
        grid: run.profile.grid().iter().map(|t| t.value()).collect(),
        cluster_counts: run.profile.counts().to_vec(),
        ultrametricity: run.profile.diagnostics().to_vec(),
        selected: run
            .selected
            .iter()
            .map(|s| SelectedOut {
                grid_index: s.grid_index,
                temperature: s.temperature.value(),
                cluster_count: s.cluster_count,
            })
            .collect(),
        degenerate_selection: run.degenerate_selection,
        levels: run
            .tree
            .levels()
            .iter()
            .map(|level| {
                let sizes: Vec<usize> =
                    level.partition.clusters().iter().map(Vec::len).collect();
                LevelOut {
                    height: level.height,
                    n_branches: sizes.len(),
                    branch_sizes: sizes,
                }
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
    mb.write_output("report.json", &(json + "\n"))?;
    mb.finish()?;

    if run.degenerate_selection {
        eprintln!("warning: no scale qualified; wrote a single-level tree");
        Ok(Outcome::DegenerateWarning)
    } else {
        Ok(Outcome::Clean)
    }
}
