use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use swarmnet::data::{load_wbcd, normalize, Dataset, DatasetKind};
use swarmnet::experiment::{
    read_reports, run_matrix, run_seed, trace_table, CellFailure, CellKey, MatrixPlan, SummaryTable,
};
use swarmnet::{Error, OptimizerSettings, Result, RngStream, RunReport, Scenario};

use crate::args::{BenchArgs, Cli, Format, MatrixArgs, PrepareArgs, ReportArgs, RunArgs, TuningArgs};

const FAILURES_FILE: &str = "failures.jsonl";

fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    if is_stdout(path) {
        io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io { path: path.into(), source: e })
    } else {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
        }
        fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e })
    }
}

/// Matrix settings from the config file, or the defaults without one.
fn load_plan(config: Option<&Path>) -> Result<MatrixPlan> {
    let Some(path) = config else {
        return Ok(MatrixPlan::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn apply_tuning(plan: &mut MatrixPlan, t: &TuningArgs) {
    if let Some(v) = t.iters {
        plan.settings.iterations = v;
    }
    if let Some(v) = t.particles {
        plan.settings.pso.particles = v;
    }
    if let Some(v) = t.pso_coefficients {
        plan.settings.pso.coefficients = v;
    }
    if let Some(v) = t.population {
        plan.settings.mto.population = v;
    }
    if let Some(v) = t.climate_events {
        plan.settings.mto.climate_events = v;
    }
    if let Some(v) = t.elimination {
        plan.settings.mto.elimination = v;
    }
    if let Some(v) = t.folds {
        plan.folds = v;
    }
    if let Some(v) = t.holdout {
        plan.holdout = v;
    }
    if let Some(v) = &t.hidden {
        plan.hidden = Some(v.clone());
    }
    if let Some(v) = t.pca_components {
        plan.pca_components = Some(v);
    }
    if t.smote {
        plan.smote = Some(true);
    }
    if t.no_smote {
        plan.smote = Some(false);
    }
    if let Some(v) = t.smote_ratio {
        plan.smote_config.ratio = v;
    }
    if t.paper_compat {
        plan.paper_compat = true;
    }
    if let Some(v) = &t.seeds {
        plan.seeds = v.clone();
    }
}

fn load(data_dir: &Path, kind: DatasetKind) -> Result<Dataset> {
    let path = kind.path_in(data_dir);
    let (ds, summary) = load_wbcd(&path, kind)?;
    log::info!("{kind}: {summary}");
    Ok(ds)
}

fn pct(v: f64) -> String {
    format!("{:.2}%", 100.0 * v)
}

pub fn prepare(cli: &Cli, a: &PrepareArgs) -> Result<ExitCode> {
    let input = a.input.clone().unwrap_or_else(|| a.dataset.path_in(&cli.data_dir));
    let (ds, summary) = load_wbcd(&input, a.dataset)?;
    let line = format!(
        "{}: {summary}, {} features",
        a.dataset,
        ds.n_features()
    );
    let normalized = normalize(&ds);
    match &a.output {
        Some(out) => {
            let mut buf = Vec::new();
            normalized
                .write_csv(&mut buf)
                .map_err(|e| Error::Io { path: out.clone(), source: e })?;
            write_output(out, &String::from_utf8_lossy(&buf))?;
            if is_stdout(out) {
                eprintln!("{line}");
            } else {
                println!("{line}");
                println!("wrote {}", out.display());
            }
        }
        None => println!("{line}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_report(report: &RunReport, out: &Path) -> Result<Option<PathBuf>> {
    if is_stdout(out) {
        write_output(out, &report.to_json()?)?;
        Ok(None)
    } else {
        report.write_to(out).map(Some)
    }
}

pub fn run(cli: &Cli, a: &RunArgs) -> Result<ExitCode> {
    let mut plan = load_plan(cli.config.as_deref())?;
    apply_tuning(&mut plan, &a.tuning);
    let scenario = a
        .scenario
        .unwrap_or_else(|| Scenario::from_flags(a.cv, a.pca.is_some()));
    let mut cfg = plan.cell_config(CellKey {
        dataset: a.dataset,
        scenario,
        optimizer: a.optimizer,
    });
    if let Some(k) = a.pca.filter(|k| *k > 0) {
        cfg.pca = Some(k);
    }
    cfg.validate()?;
    let data = load(&cli.data_dir, a.dataset)?;

    let mut accuracies = Vec::new();
    for &seed in &cfg.seeds {
        let report = run_seed(&cfg, &data, seed)?;
        let written = emit_report(&report, &a.tuning.out)?;
        let kind = if cfg.cv {
            format!("{}-fold mean", report.folds.len())
        } else {
            "holdout".to_string()
        };
        eprintln!(
            "{} seed {seed}: accuracy {} ({kind}), final loss {:.5}, {:.1} s{}",
            cfg.cell_name(),
            pct(report.mean_accuracy),
            report.best_final_loss,
            report.wall_clock_seconds,
            written.map(|p| format!(", trace in {}", p.display())).unwrap_or_default()
        );
        accuracies.push(report.mean_accuracy);
    }
    if accuracies.len() > 1 {
        let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
        let best = accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        eprintln!(
            "{}: mean {} best {} over {} seeds",
            cfg.cell_name(),
            pct(mean),
            pct(best),
            accuracies.len()
        );
    }
    Ok(ExitCode::SUCCESS)
}

pub fn matrix(cli: &Cli, a: &MatrixArgs) -> Result<ExitCode> {
    let mut plan = load_plan(cli.config.as_deref())?;
    apply_tuning(&mut plan, &a.tuning);
    if let Some(v) = &a.datasets {
        plan.datasets = v.clone();
    }
    if let Some(v) = &a.optimizers {
        plan.optimizers = v.clone();
    }
    if let Some(v) = &a.scenarios {
        plan.scenarios = v.clone();
    }
    plan.validate()?;
    let out = &a.tuning.out;
    if is_stdout(out) {
        return Err(Error::Config("matrix writes one file per report; give a directory to --out".into()));
    }

    let mut data = Vec::new();
    for &kind in &plan.datasets {
        match load(&cli.data_dir, kind) {
            Ok(ds) => data.push((kind, ds)),
            Err(e) => eprintln!("warning: {kind} cells will fail: {e}"),
        }
    }

    let total = plan.cells().len() * plan.seeds.len();
    let done = Mutex::new(0usize);
    let write_errors = Mutex::new(Vec::new());
    let outcome = run_matrix(&plan, &data, &|key, seed, result| {
        let mut n = done.lock().unwrap_or_else(|p| p.into_inner());
        *n += 1;
        let name = format!("{}-{}-{} seed {seed}", key.dataset, key.scenario, key.optimizer);
        match result {
            Ok(r) => {
                if let Err(e) = r.write_to(out) {
                    write_errors.lock().unwrap_or_else(|p| p.into_inner()).push(e.to_string());
                }
                eprintln!("[{n}/{total}] {name}: {} in {:.1} s", pct(r.mean_accuracy), r.wall_clock_seconds);
            }
            Err(e) => eprintln!("[{n}/{total}] {name}: failed: {e}"),
        }
    })?;
    if let Some(e) = write_errors.into_inner().unwrap_or_default().into_iter().next() {
        return Err(Error::Data(format!("could not write a report: {e}")));
    }

    let mut failures = String::new();
    for f in &outcome.failures {
        failures.push_str(&serde_json::to_string(f)?);
        failures.push('\n');
    }
    write_output(&out.join(FAILURES_FILE), &failures)?;
    let table = outcome.summary();
    write_output(&out.join("summary.csv"), &table.to_csv())?;
    write_output(&out.join("summary.md"), &table.to_markdown())?;
    print!("{}", table.to_markdown());
    println!(
        "{} reports, {} failed runs; summaries in {}",
        outcome.reports.len(),
        outcome.failures.len(),
        out.display()
    );
    Ok(if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn bench(a: &BenchArgs) -> Result<ExitCode> {
    if a.seeds == 0 || a.dim == 0 {
        return Err(Error::Config("--seeds and --dim must be positive".into()));
    }
    let spec = a.function.objective(a.dim)?;
    let mut settings = OptimizerSettings {
        iterations: a.iters,
        ..OptimizerSettings::default()
    };
    settings.pso.coefficients = a.pso_coefficients;
    settings.validate()?;
    println!("function\toptimizer\tdim\tseed\tfinal_loss\tevaluations");
    let mut medians = Vec::new();
    for &kind in &a.optimizer {
        let mut finals = Vec::new();
        for seed in 1..=a.seeds {
            let r = settings.run(kind, &spec, &mut RngStream::new(seed))?;
            println!("{}\t{kind}\t{}\t{seed}\t{:.6e}\t{}", a.function, a.dim, r.best_loss, r.evaluations);
            finals.push(r.best_loss);
        }
        finals.sort_by(f64::total_cmp);
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        let m = median(&finals);
        println!(
            "# {kind}: median {m:.6e}, mean {mean:.6e}, min {:.6e}, max {:.6e}",
            finals[0],
            finals[finals.len() - 1]
        );
        medians.push((kind, m));
    }
    if medians.len() > 1 {
        medians.sort_by(|x, y| x.1.total_cmp(&y.1));
        let order: Vec<String> = medians.iter().map(|(k, m)| format!("{k} ({m:.6e})")).collect();
        println!("# median comparison, lowest first: {}", order.join(" < "));
    }
    Ok(ExitCode::SUCCESS)
}

fn read_failures(dir: &Path) -> Result<Vec<CellFailure>> {
    let path = dir.join(FAILURES_FILE);
    let Ok(text) = fs::read_to_string(&path) else {
        return Ok(Vec::new());
    };
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::from(e).context(path.display().to_string())))
        .collect()
}

pub fn report(a: &ReportArgs) -> Result<ExitCode> {
    let reports = read_reports(&a.input)?;
    let failures = read_failures(&a.input)?;
    if reports.is_empty() && failures.is_empty() {
        return Err(Error::Config(format!("no run reports found in {}", a.input.display())));
    }
    let table = SummaryTable::build(&reports, &failures);
    let text = match a.format {
        Format::Csv => table.to_csv(),
        Format::Md => table.to_markdown(),
    };
    write_output(&a.output, &text)?;
    if let Some(dir) = &a.traces {
        for r in &reports {
            write_output(&dir.join(format!("{}.tsv", r.file_stem())), &trace_table(r))?;
        }
        eprintln!("wrote {} convergence files to {}", reports.len(), dir.display());
    }
    Ok(ExitCode::SUCCESS)
}
