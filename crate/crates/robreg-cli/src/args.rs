use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Robust regression toolkit: worst-case regression over feature-wise
/// uncertainty sets, Lasso-type solvers, moment bounds, and
/// consistency/stability experiments.
///
/// Exit codes: 0 success, 1 input error, 2 solver non-convergence.
#[derive(Debug, Parser, Serialize)]
#[command(name = "robreg", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Fit a robust regression / Lasso-type model on a CSV dataset.
    Fit(FitArgs),
    /// Solve a warm-started path over a grid of uniform penalty radii.
    Path(PathArgs),
    /// Evaluate the closed-form worst-case residual, its adversarial
    /// witness, and a sampled lower bound for a given weight vector.
    Worstcase(WorstcaseArgs),
    /// Moment-based upper bound on Pr{||v|| >= c}.
    Bound(BoundArgs),
    /// Smallest radius whose moment bound reaches a confidence level.
    Radius(RadiusArgs),
    /// Box-kernel density estimate on a grid.
    Kde(KdeArgs),
    /// Consistency experiment: excess prediction error along a schedule.
    Consistency(ConsistencyArgs),
    /// Incoherence certificate and zero-support verification.
    Sparsity(SparsityArgs),
    /// Duplicate-feature stability gap.
    Stability(StabilityArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LossArg {
    L1,
    L2,
    Linf,
}

#[derive(Debug, Args, Serialize)]
pub struct SolverArgs {
    /// Iteration cap for the solver.
    #[arg(long, default_value_t = 50_000)]
    pub max_iters: usize,
    /// Relative tolerance on the optimality certificate.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for randomized components (default 0 keeps runs reproducible).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// Input CSV with a header row `b,f1,...,fm`.
    pub data: String,
    #[arg(long, value_enum, default_value_t = LossArg::L2)]
    pub loss: LossArg,
    /// Uncoupled per-feature radii: a single value (uniform) or a
    /// comma-separated list of length m.
    #[arg(long, allow_hyphen_values = true)]
    pub uncoupled_c: Option<String>,
    /// Norm-coupled uncertainty `aggregator,radius`, e.g. `linf,0.5`.
    #[arg(long)]
    pub norm_coupled: Option<String>,
    /// Polytope uncertainty: path to a JSON file `{"t": [[..]], "s": [..]}`.
    #[arg(long)]
    pub polytope: Option<String>,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct PathArgs {
    /// Input CSV with a header row `b,f1,...,fm`.
    pub data: String,
    #[arg(long, value_enum, default_value_t = LossArg::L2)]
    pub loss: LossArg,
    /// Comma-separated uniform radii, solved in order with warm starts.
    #[arg(long)]
    pub c_grid: String,
    /// Write the CSV table here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct WorstcaseArgs {
    /// Input CSV with a header row `b,f1,...,fm`.
    pub data: String,
    /// CSV file with a header `x` and one weight per row.
    #[arg(long)]
    pub x: String,
    #[arg(long, value_enum, default_value_t = LossArg::L2)]
    pub loss: LossArg,
    /// Uncoupled radii (single value or comma list).
    #[arg(long, allow_hyphen_values = true)]
    pub uncoupled_c: String,
    /// Number of sampled perturbations for the lower-bound oracle.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    /// Mean vector, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub mean: String,
    /// Second-moment matrix: rows separated by `;`, entries by `,`.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: String,
    /// Single radius to bound (JSON output).
    #[arg(long)]
    pub c: Option<f64>,
    /// Increasing radius grid (CSV output).
    #[arg(long)]
    pub c_grid: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct RadiusArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mean: String,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: String,
    /// Confidence level in (0, 1].
    #[arg(long)]
    pub eta: f64,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct KdeArgs {
    /// Input CSV with a header row `b,f1,...,fm`; each row is one sample in
    /// feature-target space.
    pub data: String,
    /// Fixed kernel half-width.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// `default` selects `c_n = n^(-1/(2(m+1)))`.
    #[arg(long)]
    pub bandwidth_schedule: Option<String>,
    /// Grid resolution per dimension.
    #[arg(long, default_value_t = 20)]
    pub grid_points: usize,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConsistencyArgs {
    /// `default` runs n in {50, 200, 800, 3200} with c_n = n^(-1/6).
    #[arg(long)]
    pub schedule: Option<String>,
    /// Explicit sample sizes (comma-separated), paired with --c-list.
    #[arg(long)]
    pub n_list: Option<String>,
    /// Explicit bandwidths (comma-separated), paired with --n-list.
    #[arg(long, allow_hyphen_values = true)]
    pub c_list: Option<String>,
    /// True weights of the bounded generator.
    #[arg(long, default_value = "1.5,-2.0", allow_hyphen_values = true)]
    pub x0: String,
    /// Features are uniform on [-w, w].
    #[arg(long, default_value_t = 3.0)]
    pub feature_halfwidth: f64,
    /// Noise is uniform on [-g, g] (default has unit variance).
    #[arg(long, default_value_t = 1.7320508075688772)]
    pub noise_halfwidth: f64,
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct SparsityArgs {
    /// Input CSV with a header row `b,f1,...,fm`.
    pub data: String,
    /// Candidate support: comma-separated feature indices (0-based).
    #[arg(long)]
    pub support: String,
    /// Uniform uncertainty radius.
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct StabilityArgs {
    /// Input CSV with a header row `b,f1,...,fm` (the base training set).
    pub data: String,
    /// Test point z*, comma-separated (length m).
    #[arg(long, allow_hyphen_values = true)]
    pub z_star: String,
    /// Uniform penalty radius.
    #[arg(long)]
    pub c: f64,
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub solver: SolverArgs,
}
