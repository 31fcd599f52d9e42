use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde_json::json;

use groupshap::experiments::{
    concentration, corr_determinant, emit_tables, lorenz_gini, run_power_grid, run_size_grid, GridAxes, TableKind,
    DEFAULT_REPLICATIONS, FULL_REPLICATIONS,
};
use groupshap::inference::{group_joint_test, GroupTest, JointMode, TestKind};
use groupshap::shapley::{exact_group_shapley, tree_group_shap, FeatureGrouping, ShapMatrix};
use groupshap::simgen::{generate, parse_key_values, synth_regression, Alternative, KeyValues, SimSpec, ZModel};
use groupshap::tree_model::{load_model, save_model, train_gbm, Dataset, GbmParams, TreeEnsemble};
use groupshap::Error;

use crate::echo;
use crate::Failure;

type Outcome = Result<(), Failure>;

/// Group Shapley attributions for tree ensembles and significance tests
/// for their mean vectors.
///
/// Exit codes: 0 success, 1 usage error, 2 invalid data/model/grouping,
/// 3 degenerate statistics.
#[derive(Parser, Debug)]
#[command(name = "groupshap", version)]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit a gradient-boosted regression tree ensemble to a CSV file.
    Train(TrainArgs),
    /// Compute group (or individual) attributions for every row of a CSV file.
    Explain(ExplainArgs),
    /// Test whether attribution columns have zero mean.
    Test(TestArgs),
    /// Monte Carlo size and power studies.
    Simulate {
        #[command(subcommand)]
        study: Study,
    },
    /// Concentration summaries of an attribution matrix.
    Analyze(AnalyzeArgs),
    /// End-to-end run on synthetic data: train, explain, test, summarize.
    Demo(DemoArgs),
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Training data (CSV with header, all columns numeric).
    #[arg(long)]
    data: PathBuf,
    /// Name of the target column.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 100)]
    n_trees: usize,
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
    #[arg(long, default_value_t = 0.1)]
    learning_rate: f64,
    #[arg(long, default_value_t = 5)]
    min_samples_leaf: usize,
    /// Output model file (JSON).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    /// Path attribution; any number of groups.
    Tree,
    /// Exact coalition enumeration; at most 20 groups.
    Exact,
}

#[derive(Args, Debug)]
pub struct ExplainArgs {
    /// Model file written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Rows to explain (CSV with the model's feature columns).
    #[arg(long)]
    data: PathBuf,
    /// Column of `--data` to ignore as the target, if present.
    #[arg(long)]
    target: Option<String>,
    /// Grouping file, one `name: feature, feature, ...` line per group.
    /// Without it every feature is its own group.
    #[arg(long)]
    groups: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Tree)]
    method: Method,
    /// Output CSV: `obs_id,base,<group columns>`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Joint,
    Reduced,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    /// Attribution CSV written by `explain`.
    #[arg(long)]
    shap: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Comma-separated tests among gs, cq, wald.
    #[arg(long, default_value = "gs")]
    tests: String,
    /// Grouping over the CSV columns; each group is tested as one
    /// hypothesis. Without it every column is tested on its own.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// With `--groups`: test a group's columns jointly or their sum.
    #[arg(long, value_enum, default_value_t = ModeArg::Joint)]
    mode: ModeArg,
    /// Test all columns together as a single hypothesis.
    #[arg(long, conflicts_with = "groups")]
    all: bool,
    /// Also write the report as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Study {
    /// Empirical sizes under the null.
    Size(SimArgs),
    /// Empirical power under sparse and dense alternatives.
    Power(SimArgs),
    /// Write one generated attribution matrix to CSV.
    Sample(SampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Profile {
    /// 2000 replications per cell.
    Default,
    /// 10000 replications per cell (long running).
    Full,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    /// Key = value file with any of: models, k, s, rho, alternatives,
    /// reps, alpha, tests, seed, sigma2. Flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated among normal, symmetric, skewed.
    #[arg(long)]
    models: Option<String>,
    /// Comma-separated attribution dimensions K.
    #[arg(long)]
    k: Option<String>,
    /// Comma-separated sample sizes S.
    #[arg(long)]
    s: Option<String>,
    /// Comma-separated equicorrelations in [0, 1).
    #[arg(long)]
    rho: Option<String>,
    /// Power study only: comma-separated among sparse, dense.
    #[arg(long)]
    alternatives: Option<String>,
    /// Replications per cell; overrides --profile.
    #[arg(long)]
    reps: Option<usize>,
    /// Nominal level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Common variance of the simulated attributions.
    #[arg(long)]
    sigma2: Option<f64>,
    /// Comma-separated tests among gs, cq, wald.
    #[arg(long)]
    tests: Option<String>,
    /// Master seed; a fresh one is chosen and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    profile: Profile,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, default_value = "normal")]
    model: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 4.0)]
    sigma2: f64,
    #[arg(long, default_value = "null")]
    alternative: String,
    /// Replication index within the cell.
    #[arg(long, default_value_t = 0)]
    rep: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Summary {
    Gini,
    Lorenz,
    Corrdet,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    what: Summary,
    /// Attribution CSV written by `explain`.
    #[arg(long)]
    shap: PathBuf,
    /// Output directory (`lorenz.csv` for the Lorenz curve).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of synthetic rows.
    #[arg(long, default_value_t = 600)]
    n: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Directory for the intermediate files.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Train(a) => train(a),
        Command::Explain(a) => explain(a),
        Command::Test(a) => test(a),
        Command::Simulate { study } => match study {
            Study::Size(a) => simulate(a, TableKind::Size, cli.threads),
            Study::Power(a) => simulate(a, TableKind::Power, cli.threads),
            Study::Sample(a) => sample(a),
        },
        Command::Analyze(a) => analyze(a),
        Command::Demo(a) => demo(a),
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos());
        let seed = (nanos as u64) ^ ((nanos >> 64) as u64);
        eprintln!("seed: {seed} (no --seed given)");
        seed
    })
}

fn parse_tests(text: &str) -> Result<Vec<TestKind>, Failure> {
    let mut tests = Vec::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let t = TestKind::parse(item).ok_or_else(|| Failure::Usage(format!("unknown test '{}'", item.trim())))?;
        if !tests.contains(&t) {
            tests.push(t);
        }
    }
    if tests.is_empty() {
        return Err(Failure::Usage("no tests given".into()));
    }
    Ok(tests)
}

fn parse_list<T>(text: &str, what: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Vec<T>, Failure> {
    let items: Vec<T> = text
        .split(',')
        .map(|s| parse(s.trim()).ok_or_else(|| Failure::Usage(format!("cannot parse '{}' in {what}", s.trim()))))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(Failure::Usage(format!("empty {what} list")));
    }
    Ok(items)
}

fn train(a: TrainArgs) -> Outcome {
    let data = Dataset::from_csv(&a.data, Some(&a.target))?;
    let params = GbmParams {
        n_trees: a.n_trees,
        max_depth: a.max_depth,
        learning_rate: a.learning_rate,
        min_samples_leaf: a.min_samples_leaf,
    };
    let model = train_gbm(&data, &params)?;
    save_model(&model, &a.out)?;
    echo::write_for_file(
        &a.out,
        "train",
        json!({
            "data": a.data, "target": a.target, "n_trees": a.n_trees, "max_depth": a.max_depth,
            "learning_rate": a.learning_rate, "min_samples_leaf": a.min_samples_leaf, "out": a.out,
        }),
    )?;
    println!("trained {} trees on {} rows x {} features -> {}", model.trees().len(), data.n_rows(), data.n_cols(), a.out.display());
    Ok(())
}

fn check_columns(model: &TreeEnsemble, data: &Dataset) -> Result<(), Error> {
    if data.n_cols() != model.n_features() {
        return Err(Error::Shape {
            expected: model.n_features(),
            actual: data.n_cols(),
            row: None,
        });
    }
    if let Some(names) = model.feature_names() {
        if names != data.columns() {
            return Err(Error::InvalidData(format!(
                "data columns {:?} do not match model features {:?}",
                data.columns(),
                names
            )));
        }
    }
    Ok(())
}

fn explain(a: ExplainArgs) -> Outcome {
    let model = load_model(&a.model)?;
    let data = Dataset::from_csv(&a.data, a.target.as_deref())?;
    if a.target.is_none() && data.n_cols() == model.n_features() + 1 {
        return Err(Error::InvalidData(format!(
            "{} has one column more than the model's {} features; name the target with --target",
            a.data.display(),
            model.n_features()
        ))
        .into());
    }
    check_columns(&model, &data)?;
    let grouping = match &a.groups {
        Some(path) => FeatureGrouping::from_file(path, data.columns())?,
        None => FeatureGrouping::singletons(data.columns()),
    };
    let shap = match a.method {
        Method::Tree => tree_group_shap(&model, &data, &grouping)?,
        Method::Exact => {
            let mut values = Vec::with_capacity(data.n_rows() * grouping.n_groups());
            for row in data.rows() {
                values.extend(exact_group_shapley(&model, row, &grouping)?);
            }
            let matrix = DMatrix::from_row_slice(data.n_rows(), grouping.n_groups(), &values);
            ShapMatrix::new(matrix, vec![model.expected_value(); data.n_rows()], grouping.names().to_vec())?
        }
    };
    shap.write_csv(&a.out)?;
    echo::write_for_file(
        &a.out,
        "explain",
        json!({
            "model": a.model, "data": a.data, "target": a.target, "groups": a.groups,
            "method": format!("{:?}", a.method).to_lowercase(), "out": a.out,
        }),
    )?;
    println!("{} rows x {} groups -> {}", shap.n_obs(), shap.names().len(), a.out.display());
    Ok(())
}

fn fmt_num(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".into(), |x| format!("{x:.4}"))
}

fn fmt_p(v: Option<f64>) -> String {
    match v {
        Some(p) if p < 1e-4 => format!("{p:.2e}"),
        Some(p) => format!("{p:.4}"),
        None => "NaN".into(),
    }
}

fn print_reports(results: &[(GroupTest, usize)]) {
    println!(
        "{:<16} {:<5} {:>5} {:>12} {:>10} {:>10} {:>7}",
        "group", "test", "K", "statistic", "critical", "p_value", "reject"
    );
    for (g, k) in results {
        let r = &g.report;
        println!(
            "{:<16} {:<5} {:>5} {:>12} {:>10} {:>10} {:>7} {}",
            g.group,
            r.test.name(),
            k,
            fmt_num(r.statistic),
            fmt_num(r.critical_value),
            fmt_p(r.p_value),
            if r.is_degenerate() { "-" } else if r.reject { "yes" } else { "no" },
            r.stars()
        );
    }
}

fn write_reports(path: &Path, results: &[(GroupTest, usize)], s: usize) -> Result<(), Error> {
    let mut out = String::from("group,test,mode,k,s,statistic,t0,t1,critical_value,p_value,reject,df,degenerate\n");
    let opt = |v: Option<f64>| v.map_or_else(|| "NaN".to_owned(), |x| x.to_string());
    for (g, k) in results {
        let r = &g.report;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            g.group,
            r.test.name(),
            g.mode.name(),
            k,
            s,
            opt(r.statistic),
            opt(r.t0),
            opt(r.t1_normalized),
            opt(r.critical_value),
            opt(r.p_value),
            r.reject,
            r.df_label(),
            r.degenerate.map_or_else(String::new, |d| d.to_string()),
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn test(a: TestArgs) -> Outcome {
    let tests = parse_tests(&a.tests)?;
    let shap = ShapMatrix::read_csv(&a.shap)?;
    let names = shap.names().to_vec();
    let (grouping, mode) = match (&a.groups, a.all) {
        (Some(path), _) => (
            FeatureGrouping::from_file(path, &names)?,
            match a.mode {
                ModeArg::Joint => JointMode::Joint,
                ModeArg::Reduced => JointMode::Reduced,
            },
        ),
        (None, true) => (
            FeatureGrouping::new(vec![("all".into(), (0..names.len()).collect())], names.len())?,
            JointMode::Joint,
        ),
        (None, false) => (FeatureGrouping::singletons(&names), JointMode::Joint),
    };
    let results = group_joint_test(shap.values(), &grouping, a.alpha, mode, &tests)?;
    let with_k: Vec<(GroupTest, usize)> = results
        .into_iter()
        .map(|g| {
            let idx = grouping.names().iter().position(|n| *n == g.group).expect("group from grouping");
            let k = if mode == JointMode::Joint { grouping.members()[idx].len() } else { 1 };
            (g, k)
        })
        .collect();
    print_reports(&with_k);
    if let Some(out) = &a.out {
        write_reports(out, &with_k, shap.n_obs())?;
        echo::write_for_file(
            out,
            "test",
            json!({
                "shap": a.shap, "alpha": a.alpha, "tests": a.tests, "groups": a.groups,
                "mode": mode.name(), "all": a.all, "out": out,
            }),
        )?;
    }
    if let Some((g, k)) = with_k.iter().find(|(g, _)| g.report.is_degenerate()) {
        let err = g.report.clone().into_result(*k, shap.n_obs()).expect_err("degenerate report");
        return Err(Failure::Core(err));
    }
    Ok(())
}

fn simulate(a: SimArgs, kind: TableKind, threads: Option<usize>) -> Outcome {
    let kv = match &a.config {
        Some(p) => KeyValues::from_file(p)?,
        None => parse_key_values("")?,
    };
    const KEYS: [&str; 10] = ["models", "k", "s", "rho", "alternatives", "reps", "alpha", "tests", "seed", "sigma2"];
    if let Some(bad) = kv.keys().find(|k| !KEYS.contains(k)) {
        return Err(Failure::Usage(format!("unknown config key '{bad}'")));
    }
    let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| kv.get(key).map(str::to_owned));

    let default_reps = match a.profile {
        Profile::Default => DEFAULT_REPLICATIONS,
        Profile::Full => FULL_REPLICATIONS,
    };
    let reps = match a.reps {
        Some(r) => r,
        None => kv.parsed("reps")?.unwrap_or(default_reps),
    };
    let seed = resolve_seed(match a.seed {
        Some(s) => Some(s),
        None => kv.parsed("seed")?,
    });
    let mut axes = match kind {
        TableKind::Size => GridAxes::size_design(reps, seed),
        TableKind::Power => GridAxes::power_design(reps, seed),
    };
    if let Some(m) = pick(&a.models, "models") {
        axes.models = parse_list(&m, "models", |s| ZModel::parse(s).ok())?;
    }
    if let Some(k) = pick(&a.k, "k") {
        axes.ks = parse_list(&k, "k", |s| s.parse().ok())?;
    }
    if let Some(s) = pick(&a.s, "s") {
        axes.ss = parse_list(&s, "s", |v| v.parse().ok())?;
    }
    if let Some(r) = pick(&a.rho, "rho") {
        axes.rhos = parse_list(&r, "rho", |s| s.parse().ok())?;
    }
    if let Some(alts) = pick(&a.alternatives, "alternatives") {
        if kind == TableKind::Size {
            return Err(Failure::Usage("--alternatives applies to power studies only".into()));
        }
        axes.alternatives = parse_list(&alts, "alternatives", |s| Alternative::parse(s).ok())?;
    }
    if let Some(alpha) = a.alpha.or(kv.parsed("alpha")?) {
        axes.alpha = alpha;
    }
    if let Some(sigma2) = a.sigma2.or(kv.parsed("sigma2")?) {
        axes.sigma2 = sigma2;
    }
    let tests_text = pick(&a.tests, "tests").unwrap_or_else(|| "wald,cq,gs".into());
    let mut tests = parse_tests(&tests_text)?;
    tests.sort();

    let specs = axes.specs()?;
    eprintln!("running {} cells x {} replications", specs.len(), reps);
    let grid = match kind {
        TableKind::Size => run_size_grid(&specs, &tests)?,
        TableKind::Power => run_power_grid(&specs, &tests)?,
    };
    let written = emit_tables(&grid, kind, &a.out)?;
    echo::write_for_dir(
        &a.out,
        match kind {
            TableKind::Size => "simulate size",
            TableKind::Power => "simulate power",
        },
        json!({
            "models": axes.models.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "k": axes.ks, "s": axes.ss, "rho": axes.rhos,
            "alternatives": axes.alternatives.iter().map(|a| a.name()).collect::<Vec<_>>(),
            "reps": reps, "alpha": axes.alpha, "sigma2": axes.sigma2,
            "tests": tests.iter().map(|t| t.name()).collect::<Vec<_>>(),
            "seed": seed, "profile": format!("{:?}", a.profile).to_lowercase(),
            "threads": threads, "config": a.config, "out": a.out,
        }),
    )?;
    let txt = std::fs::read_to_string(&written[1]).map_err(|e| Error::Io {
        path: written[1].clone(),
        source: e,
    })?;
    print!("{txt}");
    Ok(())
}

fn sample(a: SampleArgs) -> Outcome {
    let seed = resolve_seed(a.seed);
    let spec = SimSpec {
        model: ZModel::parse(&a.model)?,
        k: a.k,
        s: a.s,
        rho: a.rho,
        sigma2: a.sigma2,
        alternative: Alternative::parse(&a.alternative)?,
        replications: 1,
        seed,
        alpha: 0.05,
    };
    let sample = generate(&spec, a.rep)?;
    sample.write_csv(&a.out)?;
    echo::write_for_file(
        &a.out,
        "simulate sample",
        json!({
            "model": spec.model.name(), "k": a.k, "s": a.s, "rho": a.rho, "sigma2": a.sigma2,
            "alternative": spec.alternative.name(), "rep": a.rep, "seed": seed, "out": a.out,
        }),
    )?;
    Ok(())
}

fn analyze(a: AnalyzeArgs) -> Outcome {
    let shap = ShapMatrix::read_csv(&a.shap)?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
    }
    match a.what {
        Summary::Gini => {
            let l = lorenz_gini(&shap.mean_abs())?;
            println!("gini {}", l.gini);
        }
        Summary::Lorenz => {
            let l = lorenz_gini(&shap.mean_abs())?;
            let mut text = String::from("share_of_columns,share_of_mean_abs\n");
            for (x, y) in &l.points {
                text.push_str(&format!("{x},{y}\n"));
            }
            match &a.out {
                Some(dir) => {
                    let path = dir.join("lorenz.csv");
                    std::fs::write(&path, &text).map_err(|e| Error::Io { path, source: e })?;
                }
                None => print!("{text}"),
            }
        }
        Summary::Corrdet => {
            let det = corr_determinant(shap.values(), shap.names())?;
            println!("corr_det {det}");
        }
    }
    if let Some(dir) = &a.out {
        echo::write_for_dir(
            dir,
            "analyze",
            json!({ "what": format!("{:?}", a.what).to_lowercase(), "shap": a.shap, "out": dir }),
        )?;
    }
    Ok(())
}

fn demo(a: DemoArgs) -> Outcome {
    let sizes = [3, 3, 3, 3, 3, 3];
    let synth = synth_regression(a.n, &sizes, a.seed)?;
    let model = train_gbm(&synth.dataset, &GbmParams::default())?;
    let grouped = tree_group_shap(&model, &synth.dataset, &synth.grouping)?;
    let singles = FeatureGrouping::singletons(synth.dataset.columns());
    let individual = tree_group_shap(&model, &synth.dataset, &singles)?;
    let results = group_joint_test(individual.values(), &synth.grouping, a.alpha, JointMode::Joint, &[TestKind::Gs])?;

    let mean_abs = grouped.mean_abs();
    let mut order: Vec<usize> = (0..mean_abs.len()).collect();
    order.sort_by(|&i, &j| mean_abs[j].total_cmp(&mean_abs[i]));
    println!(
        "{:>4} {:<6} {:>10} {:>12} {:>10}      generating",
        "rank", "group", "mean|phi|", "statistic", "p_value"
    );
    for (rank, &g) in order.iter().enumerate() {
        let r = &results[g].report;
        println!(
            "{:>4} {:<6} {:>10.4} {:>12} {:>10} {:<4} {}",
            rank + 1,
            synth.grouping.names()[g],
            mean_abs[g],
            fmt_num(r.statistic),
            fmt_p(r.p_value),
            r.stars(),
            if synth.influential.contains(&g) { "yes" } else { "no" }
        );
    }
    let group_summary = concentration(&grouped)?;
    let individual_summary = concentration(&individual)?;
    println!(
        "gini: group {:.3}, individual {:.3}",
        group_summary.lorenz.gini, individual_summary.lorenz.gini
    );
    println!(
        "correlation determinant: group {}, individual {}",
        fmt_p(group_summary.corr_det),
        fmt_p(individual_summary.corr_det)
    );

    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        synth.dataset.to_csv(dir.join("data.csv"), "y")?;
        std::fs::write(dir.join("groups.txt"), synth.grouping.to_text(synth.dataset.columns())).map_err(|e| {
            Error::Io {
                path: dir.join("groups.txt"),
                source: e,
            }
        })?;
        save_model(&model, dir.join("model.json"))?;
        grouped.write_csv(dir.join("group_shap.csv"))?;
        individual.write_csv(dir.join("individual_shap.csv"))?;
        echo::write_for_dir(
            dir,
            "demo",
            json!({ "seed": a.seed, "n": a.n, "alpha": a.alpha, "group_sizes": sizes, "out": dir }),
        )?;
    }
    Ok(())
}
