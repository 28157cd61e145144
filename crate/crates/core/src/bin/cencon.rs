//! Batch front-end: runs the multi-run search for a job config, merges
//! and classifies the certified solutions, and renders the count tables.
//!
//! Exit codes: 0 = conclusive (finiteness established, tables written),
//! 2 = undecided boxes remain (tables written with a warning banner),
//! 1 = configuration or internal error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cencon::classify::{classify, representative_upper_bound, ClassGroup, Classification};
use cencon::job::{parse_job, JobSpec};
use cencon::model::Dim;
use cencon::search::{
    job_fingerprint, multi_run_with_checkpoint, CheckpointReader, CheckpointWriter,
    MultiRunOptions, MultiRunReport, RunSelection,
};

#[derive(Parser, Debug)]
#[command(name = "cencon", about = "rigorous search for central configurations")]
struct Args {
    /// Job config file (line-oriented key = value).
    #[arg(long)]
    config: PathBuf,
    /// Resume from the checkpoint file (requires --checkpoint).
    #[arg(long)]
    resume: bool,
    /// Worker threads (defaults to available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Pin a single worker for bitwise-reproducible logs.
    #[arg(long)]
    deterministic: bool,
    /// Write the aligned count table here (also printed to stdout).
    #[arg(long)]
    table_out: Option<PathBuf>,
    /// Write the detailed class JSON here.
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Append-only checkpoint file for interrupt/resume.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Box budget; exceeding it aborts with a partial (exit 2) report.
    #[arg(long)]
    max_boxes: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(conclusive) => {
            if conclusive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("cencon: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(args: Args) -> Result<bool, Box<dyn std::error::Error>> {
    let job = parse_job(&args.config)?;
    if args.resume && args.checkpoint.is_none() {
        return Err("--resume requires --checkpoint".into());
    }

    let workers = if args.deterministic {
        1
    } else {
        args.workers
            .or(job.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;

    let fingerprint = job_fingerprint(
        &job.masses,
        job.dim,
        job.x_max,
        job.min_box_width,
        job.ordering_constraints,
    );
    let replay = match (&args.checkpoint, args.resume) {
        (Some(path), true) if path.exists() => Some(CheckpointReader::load(path, fingerprint)?),
        _ => None,
    };
    let writer = match &args.checkpoint {
        Some(path) => Some(CheckpointWriter::open(path, fingerprint)?),
        None => None,
    };

    let mut opts = MultiRunOptions::default();
    opts.selection = job.runs.clone();
    opts.min_box_width = job.min_box_width;
    opts.x_max = job.x_max;
    opts.max_boxes = args.max_boxes.unwrap_or(job.max_boxes);
    opts.ordering_constraints = job.ordering_constraints;

    let report = pool.install(|| {
        multi_run_with_checkpoint(&job.masses, job.dim, &opts, replay.as_ref(), writer.as_ref())
    });
    if let Some(w) = &writer {
        w.flush()?;
    }

    let group = if job.identify_so3 { ClassGroup::SO3 } else { ClassGroup::SO2 };
    let all: Vec<_> = report.all_certified().into_iter().cloned().collect();
    let classification = classify(&all, &job.masses, group);

    let representative = job.runs == RunSelection::SymmetryReduced
        && report.groups.iter().any(|g| g.len() > 1);
    let upper_bound = representative.then(|| {
        let per_run: Vec<(usize, Vec<_>)> = report
            .runs
            .iter()
            .map(|r| (r.run_index, r.certified.clone()))
            .collect();
        representative_upper_bound(&per_run, &job.masses, group, &report.groups)
    });

    let conclusive = report.conclusive();
    let table = render_table(&job, &report, &classification, upper_bound, conclusive);
    print!("{table}");
    if let Some(path) = &args.table_out {
        std::fs::write(path, &table)?;
    }
    if let Some(path) = &args.json_out {
        let json = render_json(&job, &report, &classification, upper_bound, conclusive)?;
        std::fs::File::create(path)?.write_all(json.as_bytes())?;
    }
    Ok(conclusive)
}

fn render_table(
    job: &JobSpec,
    report: &MultiRunReport,
    cls: &Classification,
    upper_bound: Option<u64>,
    conclusive: bool,
) -> String {
    let mut out = String::new();
    if !conclusive {
        out.push_str("WARNING: undecided boxes remain; the counts below are PARTIAL\n");
        out.push_str("WARNING: finiteness is NOT established by this run\n");
    }
    let masses: Vec<String> = job
        .masses
        .as_slice()
        .iter()
        .map(|m| format!("{:.6}", m.mid()))
        .collect();
    out.push_str(&format!(
        "masses: {}  (d={}, {} identification)\n",
        masses.join(" "),
        job.dim.d(),
        if job.identify_so3 { "SO(3)" } else { "SO(2)" }
    ));
    for r in &report.runs {
        out.push_str(&format!(
            "run {}: certified {}, excluded {}, undecided {}, boxes {}\n",
            r.run_index,
            r.certified.len(),
            r.stats.excluded_total(),
            r.undecided.len(),
            r.stats.boxes
        ));
    }
    let t = &cls.table;
    match job.dim {
        Dim::Two => {
            out.push_str(&format!(
                "{:>8} | {:>9} | {:>6} | {:>10} | {:>5}\n",
                "concave", "collinear", "convex", "unresolved", "total"
            ));
            out.push_str(&format!(
                "{:>8} | {:>9} | {:>6} | {:>10} | {:>5}\n",
                t.concave, t.collinear, t.convex, t.unresolved, t.total
            ));
        }
        Dim::Three => {
            out.push_str(&format!(
                "{:>9} | {:>6} | {:>7} | {:>10} | {:>5}\n",
                "collinear", "planar", "spatial", "unresolved", "total"
            ));
            out.push_str(&format!(
                "{:>9} | {:>6} | {:>7} | {:>10} | {:>5}\n",
                t.collinear,
                t.planar_noncollinear(),
                t.spatial,
                t.unresolved,
                t.total
            ));
        }
    }
    if let Some(ub) = upper_bound {
        out.push_str(&format!(
            "upper bound on labeled classes from representative runs: {ub}\n"
        ));
    }
    out
}

fn render_json(
    job: &JobSpec,
    report: &MultiRunReport,
    cls: &Classification,
    upper_bound: Option<u64>,
    conclusive: bool,
) -> Result<String, serde_json::Error> {
    use serde_json::json;
    let all: Vec<_> = report.all_certified();
    let classes: Vec<serde_json::Value> = cls
        .classes
        .iter()
        .map(|c| {
            let rep = all[c.representative];
            let mids: Vec<f64> = rep.bx.free().iter().map(|x| x.mid()).collect();
            let radii: Vec<f64> = rep.bx.free().iter().map(|x| x.rad()).collect();
            json!({
                "shape": c.shape,
                "labeled_count": c.labeled_count,
                "stabilizer": c.stabilizer_size,
                "members": c.members,
                "representative": {
                    "run": rep.run_index,
                    "perm": rep.bx.perm,
                    "free_midpoints": mids,
                    "free_radii": radii,
                    "collinear": rep.collinear,
                    "planarity": rep.planarity,
                },
            })
        })
        .collect();
    let runs: Vec<serde_json::Value> = report
        .runs
        .iter()
        .map(|r| {
            json!({
                "run_index": r.run_index,
                "certified": r.certified.len(),
                "undecided": r.undecided.len(),
                "boxes": r.stats.boxes,
                "repairs": r.stats.repairs,
                "conjecture_probes": r.stats.conjecture_probes,
                "boundary_touched": r.boundary_touched,
                "budget_exhausted": r.budget_exhausted,
            })
        })
        .collect();
    serde_json::to_string_pretty(&json!({
        "masses_mid": job.masses.as_slice().iter().map(|m| m.mid()).collect::<Vec<_>>(),
        "dimension": job.dim.d(),
        "identification": if job.identify_so3 { "SO(3)" } else { "SO(2)" },
        "conclusive": conclusive,
        "runs": runs,
        "table": cls.table,
        "upper_bound": upper_bound,
        "classes": classes,
    }))
}
