use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nestdisc::discrimination::{PermutationSearch, SearchOptions};
use nestdisc::OptimizerConfig;

use crate::{read_file, CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "nestdisc",
    version,
    about = "Minimum-error discrimination with nested binary measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal success probability and measurement for 2, 3 or 4 states.
    Discriminate(DiscriminateArgs),
    /// Rewrite a POVM as a tree of binary measurements.
    Decompose(DecomposeArgs),
    /// Success probability of three equatorial pure qubit states over a grid
    /// of angles, written as CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Permutations {
    /// Try every relabeling of the states for a closed form.
    #[default]
    All,
    /// Keep the input order.
    Identity,
}

impl From<Permutations> for PermutationSearch {
    fn from(p: Permutations) -> Self {
        match p {
            Permutations::All => PermutationSearch::All,
            Permutations::Identity => PermutationSearch::Identity,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SearchArgs {
    /// Seed for the optimizer's random restarts [default: 20170131].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of optimizer starts [default: 16].
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Objective evaluations allowed per start [default: 2000].
    #[arg(long)]
    pub max_evals: Option<usize>,
    /// Search all four parameters of Q even for three states.
    #[arg(long)]
    pub full_search: bool,
    /// JSON file with optimizer settings
    /// ({"seed", "restarts", "max_evals", "match_tol", "full_search"});
    /// flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Labelings tried for a closed-form solution.
    #[arg(long, value_enum, default_value_t = Permutations::All)]
    pub permutations: Permutations,
}

impl SearchArgs {
    pub fn options(&self) -> Result<SearchOptions> {
        let mut optimizer = match &self.config {
            Some(path) => serde_json::from_str::<OptimizerConfig>(&read_file(path)?)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?,
            None => OptimizerConfig::default(),
        };
        if let Some(seed) = self.seed {
            optimizer.seed = seed;
        }
        if let Some(restarts) = self.restarts {
            optimizer.restarts = restarts;
        }
        if let Some(max_evals) = self.max_evals {
            optimizer.max_evals = max_evals;
        }
        optimizer.full_search |= self.full_search;
        if optimizer.restarts == 0 || optimizer.max_evals == 0 {
            return Err(CliError::Parse(
                "restarts and max-evals must be positive".into(),
            ));
        }
        Ok(SearchOptions {
            permutations: self.permutations.into(),
            optimizer,
        })
    }
}

#[derive(Debug, Args)]
pub struct DiscriminateArgs {
    /// Ensemble JSON file.
    pub ensemble: PathBuf,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Cross-check the result against a brute-force oracle.
    #[arg(long)]
    pub verify: bool,
    /// Grid resolution of the brute-force oracle.
    #[arg(long, default_value_t = 80)]
    pub grid_resolution: usize,
    /// Random POVMs sampled when the grid oracle does not apply.
    #[arg(long, default_value_t = 20_000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// POVM JSON file.
    pub povm: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Output CSV path; standard output when omitted.
    pub output: Option<PathBuf>,
    /// Angles of the second state, comma separated (radians or forms like 2pi/3).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,pi/6,pi/2,2pi/3,pi"
    )]
    pub phi2: Vec<String>,
    /// Start of the third state's angle range.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub phi3_start: String,
    /// End of the third state's angle range.
    #[arg(long, allow_hyphen_values = true, default_value = "2pi")]
    pub phi3_stop: String,
    /// Number of angles; the range is split into equal cells and sampled at
    /// their midpoints.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub search: SearchArgs,
}
