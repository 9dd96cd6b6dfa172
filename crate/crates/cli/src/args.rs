use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frizione::analytic::{Horizon, LawSelector};
use frizione::motion::{Conditioning, MotionParams};
use frizione::sampling::TimeChange;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "frizione", version, about = "Simulate and evaluate random motions with friction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample terminal positions of the motion.
    Simulate(SimulateArgs),
    /// Evaluate a density on a grid, optionally composed with a random clock.
    Density(DensityArgs),
    /// Evaluate the characteristic or moment generating function on a grid.
    Transform(TransformArgs),
    /// Tabulate moments of the requested orders.
    Moments(MomentsArgs),
    /// Sample positions observed at a random clock.
    Compose(ComposeArgs),
    /// Sample random flights in two or four dimensions, or tabulate their radial density.
    Flight(FlightArgs),
    /// Run the acceptance suite and report each criterion.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct Friction {
    /// Friction level (any real >= 0).
    #[arg(long, conflicts_with = "m")]
    pub nu: Option<f64>,
    /// Closed-form family: 0 or 1.
    #[arg(long)]
    pub m: Option<u8>,
}

#[derive(Debug, Args)]
pub struct Kinematics {
    /// Speed.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Poisson rate of direction changes.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Horizon.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Events {
    /// Condition on exactly N direction changes.
    #[arg(long, value_name = "N")]
    pub events: Option<usize>,
    /// Mix over a Poisson(lambda t) number of changes.
    #[arg(long)]
    pub poisson: bool,
}

#[derive(Debug, Args)]
pub struct Sampling {
    /// Number of Monte Carlo draws.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Base seed of every random stream.
    #[arg(long, env = "FRIZIONE_SEED", default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `lo:hi:points`, evenly spaced and inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|i| if i == last { self.hi } else { self.lo + (self.hi - self.lo) * i as f64 / last as f64 })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, points] = parts[..] else {
            return Err(format!("grid must be lo:hi:points, got {s:?}"));
        };
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad grid bound {p:?}: {e}"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let points: usize = points.trim().parse().map_err(|e| format!("bad grid size {points:?}: {e}"))?;
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(format!("grid needs finite lo <= hi, got {lo}:{hi}"));
        }
        if points < 2 {
            return Err(format!("grid needs at least 2 points, got {points}"));
        }
        Ok(Grid { lo, hi, points })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Cf,
    Mgf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Closed form when the law has one, the integral for Poisson mixtures, Monte Carlo otherwise.
    Auto,
    Closed,
    Integral,
    Mc,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub friction: Friction,
    #[command(flatten)]
    pub kinematics: Kinematics,
    #[command(flatten)]
    pub events: Events,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct DensityArgs {
    #[command(flatten)]
    pub friction: Friction,
    #[command(flatten)]
    pub kinematics: Kinematics,
    #[command(flatten)]
    pub events: Events,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Grid,
    /// Observe the motion at this random clock.
    #[arg(long)]
    pub time_change: Option<TimeChange>,
    /// Draws of the inner clock when an iterated clock needs a Monte Carlo mixture.
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TransformArgs {
    #[command(flatten)]
    pub friction: Friction,
    #[command(flatten)]
    pub kinematics: Kinematics,
    #[command(flatten)]
    pub events: Events,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Grid,
    #[arg(long, value_enum, default_value_t = Kind::Cf)]
    pub kind: Kind,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub friction: Friction,
    #[command(flatten)]
    pub kinematics: Kinematics,
    #[command(flatten)]
    pub events: Events,
    /// Comma-separated moment orders.
    #[arg(long, value_delimiter = ',', required = true)]
    pub orders: Vec<u32>,
    /// With --samples, empirical moments and their standard errors are added.
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ComposeArgs {
    #[command(flatten)]
    pub friction: Friction,
    #[command(flatten)]
    pub kinematics: Kinematics,
    #[command(flatten)]
    pub events: Events,
    #[arg(long)]
    pub time_change: TimeChange,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct FlightArgs {
    /// Dimension of the flight: 2 or 4.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[command(flatten)]
    pub kinematics: Kinematics,
    #[command(flatten)]
    pub events: Events,
    /// Tabulate the radial density on this grid instead of sampling.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Comma-separated criterion ids; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<u8>,
    #[arg(long, env = "FRIZIONE_SEED", default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

impl Friction {
    /// The motion's friction level; `--m` takes precedence, 0 by default.
    pub fn nu(&self) -> f64 {
        self.m.map_or(self.nu.unwrap_or(0.0), f64::from)
    }

    /// The analytic law under the given conditioning. Poisson mixtures
    /// exist for the closed families only.
    pub fn law(&self, events: &Events) -> Result<LawSelector, CliError> {
        let family = match (self.m, self.nu) {
            (Some(m), _) => Some(m),
            (None, Some(nu)) if nu == 0.0 || nu == 1.0 => Some(nu as u8),
            (None, Some(_)) => None,
            (None, None) => Some(0),
        };
        Ok(match (events.conditioning(), family) {
            (Conditioning::FixedEvents { n }, Some(m)) if n >= 1 => LawSelector::CondClosed { m, n },
            (Conditioning::FixedEvents { n }, _) => LawSelector::CondGeneral { nu: self.nu(), n },
            (Conditioning::PoissonAtHorizon, Some(m)) => LawSelector::Uncond { m },
            (Conditioning::PoissonAtHorizon, None) => {
                return Err(CliError::Core(frizione::Error::Capability(format!(
                    "Poisson mixtures have closed laws for nu in {{0, 1}} only, got nu={}",
                    self.nu()
                ))))
            }
        })
    }
}

impl Kinematics {
    pub fn params(&self, nu: f64) -> Result<MotionParams, CliError> {
        Ok(MotionParams::new(nu, self.c, self.lambda)?)
    }

    pub fn horizon(&self, events: &Events) -> Horizon {
        match events.conditioning() {
            Conditioning::PoissonAtHorizon => Horizon::unconditional(self.c, self.t, self.lambda),
            Conditioning::FixedEvents { .. } => Horizon::conditional(self.c, self.t),
        }
    }
}

impl Events {
    pub fn conditioning(&self) -> Conditioning {
        match self.events {
            Some(n) if !self.poisson => Conditioning::FixedEvents { n },
            _ => Conditioning::PoissonAtHorizon,
        }
    }
}
