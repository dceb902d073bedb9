//! The run configuration: every invocation materializes one of these, writes
//! it into the JSON sidecar next to its artifacts, and `corrdyn run --config`
//! replays it. The schema is versioned and unknown fields are rejected.

use clap::Args;
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

// deny_unknown_fields lives on the variant structs: the flattened tagged
// enum forwards every unconsumed field there, so unknown fields are
// rejected rather than ignored.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub config_version: u32,
    #[serde(flatten)]
    pub command: CommandConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CommandConfig {
    Render(RenderArgs),
    Scan(ScanArgs),
    Sturmian(SturmianArgs),
    Kleinian(KleinianArgs),
    PinchDemo(PinchDemoArgs),
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderArgs {
    /// Parameter a as "re,im".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub a: (f64, f64),
    /// Parameter k as "re,im".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "1,0")]
    pub k: (f64, f64),
    /// Viewport corners "x0,y0,x1,y1".
    #[arg(long, value_parser = parse_quad, allow_hyphen_values = true, default_value = "-1.2,-0.9,1.2,0.9")]
    pub viewport: (f64, f64, f64, f64),
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    /// Points per attractor cloud.
    #[arg(long, default_value_t = 20_000)]
    pub budget: usize,
    /// Steps discarded at the start of each chain.
    #[arg(long, default_value_t = 100)]
    pub transient: usize,
    /// Chordal trap radius.
    #[arg(long, default_value_t = 1e-3)]
    pub trap_radius: f64,
    /// Seed for all randomized sampling.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output prefix: writes `<out>.png`, `<out>.ppm`,
    /// `<out>.{minus,plus}.csv` and the `<out>.json` sidecar.
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanArgs {
    /// Fixed k as "re,im".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "1,0")]
    pub k: (f64, f64),
    /// Region corners in the a-plane, "x0,y0,x1,y1".
    #[arg(long, value_parser = parse_quad, allow_hyphen_values = true, default_value = "2,-3,8,3")]
    pub region: (f64, f64, f64, f64),
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    /// Orbit steps per critical point.
    #[arg(long, default_value_t = 200)]
    pub scan_budget: usize,
    /// Points per mini attractor cloud.
    #[arg(long, default_value_t = 300)]
    pub scan_cloud: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output prefix: writes `<out>.png`, `<out>.ppm` and the `<out>.json` sidecar.
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SturmianArgs {
    /// Rotation number "p/q".
    #[arg(long)]
    pub pq: String,
    /// Preimage generations of the circle quotient.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Output path for the JSON report (stdout when omitted).
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KleinianArgs {
    /// Cross-ratio parameter "re,im".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, conflicts_with_all = ["modular", "pinch"])]
    pub param: Option<(f64, f64)>,
    /// Use the modular representation σ(z) = −1/z, ρ(z) = −1/(z+1).
    #[arg(long, conflicts_with = "pinch")]
    #[serde(default)]
    pub modular: bool,
    /// Solve the boundary representation of rotation number "p/q".
    #[arg(long)]
    pub pinch: Option<String>,
    /// Newton start for --pinch, "re,im".
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0.1,0.1")]
    pub initial: (f64, f64),
    /// Limit-set sample size.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Maximum word length per sampling stream.
    #[arg(long, default_value_t = 512)]
    pub depth: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output path for the JSON point cloud (stdout when omitted).
    #[arg(long)]
    pub out: Option<String>,
    /// Optional PNG of the sample cloud.
    #[arg(long)]
    pub png: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinchDemoArgs {
    /// Identity sub-strip height.
    #[arg(long, default_value_t = 1.0)]
    pub ly: f64,
    /// Strip height.
    #[arg(long, default_value_t = 2.0)]
    pub lr: f64,
    /// Grid resolution per axis.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    /// Largest deformation time sampled (must stay below 1).
    #[arg(long, default_value_t = 0.999)]
    pub tmax: f64,
    /// Output path for the CSV grid of Beltrami moduli.
    #[arg(long)]
    pub out: String,
    /// Optional heatmap PNG.
    #[arg(long)]
    pub png: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Suite name: algebra | sturmian | kleinian-modular | involution | pinch.
    #[arg(long)]
    pub suite: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Output path for the JSON report (stdout summary always printed).
    #[arg(long)]
    pub out: Option<String>,
}

fn parse_finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("value must be finite, got {s:?}"))
    }
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => Ok((parse_finite(re)?, 0.0)),
        [re, im] => Ok((parse_finite(re)?, parse_finite(im)?)),
        _ => Err(format!("expected \"re,im\", got {s:?}")),
    }
}

pub fn parse_quad(s: &str) -> Result<(f64, f64, f64, f64), String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(parse_finite)
        .collect::<Result<_, _>>()?;
    if parts.len() != 4 {
        return Err(format!("expected \"x0,y0,x1,y1\", got {s:?}"));
    }
    Ok((parts[0], parts[1], parts[2], parts[3]))
}
