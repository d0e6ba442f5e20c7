use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "etpa",
    version,
    about = "Sensitivity model for entangled two-photon absorption measurements"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Write results to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    JsonLines,
}

/// Experiments to operate on.
#[derive(Debug, Args)]
pub struct Sources {
    /// Configuration file (repeatable).
    #[arg(long = "config", value_name = "PATH")]
    pub configs: Vec<PathBuf>,

    /// Bundled experiment by name, e.g. `geneva` or `boulder_fs` (repeatable).
    #[arg(long = "builtin", value_name = "NAME")]
    pub builtins: Vec<String>,

    /// All bundled experiments.
    #[arg(long)]
    pub all_builtin: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum detectable cross-section per scheme.
    Sensitivity {
        #[command(flatten)]
        sources: Sources,
        /// `separation`, `probabilistic`, `attenuation`, `attenuation@<eta>` or
        /// `attenuation@opt` (repeatable; default: all three schemes).
        #[arg(long = "scheme", value_name = "SCHEME")]
        schemes: Vec<String>,
        /// Transmittance for a bare `attenuation` scheme (default: optimal).
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Computed versus published bounds for the bundled experiments.
    Table {
        /// Largest accepted relative deviation.
        #[arg(long, default_value_t = 0.15)]
        tolerance: f64,
    },
    /// Bounds over a range of one configuration parameter.
    Sweep {
        #[command(flatten)]
        sources: Sources,
        /// Field to vary, by long name or symbol (e.g. `N_P`, `f_dark`).
        #[arg(long)]
        param: String,
        /// Comma-separated values; units allowed (`5ns`), base units otherwise.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["log_range", "range"])]
        values: Vec<String>,
        /// Logarithmic range `FROM:TO:POINTS`.
        #[arg(long, value_name = "FROM:TO:POINTS")]
        log_range: Option<String>,
        /// Linear range `FROM:TO:POINTS`.
        #[arg(long, value_name = "FROM:TO:POINTS", conflicts_with = "log_range")]
        range: Option<String>,
        /// Comma-separated schemes, as for `sensitivity`.
        #[arg(long, value_delimiter = ',', default_value = "separation,probabilistic,attenuation@opt")]
        schemes: Vec<String>,
    },
    /// Improvement ladder: best method, time gating, Fourier limit, no dark counts.
    Ladder {
        #[command(flatten)]
        sources: Sources,
        /// Fluorescence lifetime for configs without one (e.g. `4ns`).
        #[arg(long, default_value = "4ns")]
        lifetime: String,
    },
    /// Optimize a free parameter.
    Optimize {
        #[command(flatten)]
        sources: Sources,
        #[arg(value_enum)]
        target: OptimizeTarget,
        /// Scheme whose bound the gate minimizes.
        #[arg(long, default_value = "separation")]
        scheme: String,
        /// Fluorescence lifetime for configs without one (e.g. `4ns`).
        #[arg(long, default_value = "4ns")]
        lifetime: String,
    },
    /// Monte-Carlo run of the detection rule at one cross-section.
    Simulate {
        #[command(flatten)]
        sources: Sources,
        #[arg(long, default_value = "separation")]
        scheme: String,
        /// Cross-section in GM, or `bound` for the analytic bound.
        #[arg(long, default_value = "bound")]
        sigma_c: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Detection fraction over a logarithmic cross-section grid.
    Curve {
        #[command(flatten)]
        sources: Sources,
        #[arg(long, default_value = "separation")]
        scheme: String,
        /// Grid start as a multiple of the analytic bound.
        #[arg(long, default_value_t = 0.1)]
        from: f64,
        /// Grid end as a multiple of the analytic bound.
        #[arg(long, default_value_t = 10.0)]
        to: f64,
        #[arg(long, default_value_t = 13)]
        points: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizeTarget {
    Eta,
    Gate,
}
