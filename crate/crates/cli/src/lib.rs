//! Command-line layer over `relay-core`: generate network documents, compute
//! capacities and subnetwork selections, run seeded verification campaigns,
//! and evaluate the bound-family suites, emitting JSON reports and CSV
//! summaries built for diffing in CI.
//!
//! Exit codes are a stable contract: 0 success, 1 invalid input, 2 usage,
//! 3 enumeration budget exceeded, 4 verification violation.

use std::fmt;
use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use relay_core::capacity_core::approx_capacity;
use relay_core::cut_bounds::{c_tilde_k1, c_tilde_k2, f_bound_l2n3, max_t};
use relay_core::capacity_core::{cut_value, DEFAULT_ENUM_LIMIT};
use relay_core::mimo_bounds::{decomposition_bound, eigen_retention_check, selection_bound, Side};
use relay_core::network_model::{
    construct_adversarial_even, construct_adversarial_odd, parse, random_network_with_stream,
    serialize, Cut, GainDistribution, LayeredNetwork,
};
use relay_core::simplifier::{
    adversarial_search, best_subnetwork, verify_theorem1, verify_theorem2, VerificationRecord,
};
use relay_core::{Error, Result, TOLERANCE_BITS};

/// Entry distribution spec as given on the command line, e.g. `rayleigh:1.0`,
/// `uniform-gain:0:2`, `uniform-capacity:0:8`, or `zero`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistSpec {
    text: String,
    dist: GainDistribution,
}

impl DistSpec {
    pub fn dist(&self) -> &GainDistribution {
        &self.dist
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for DistSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| -> std::result::Result<f64, String> {
            p.parse::<f64>().map_err(|_| format!("`{p}` is not a number"))
        };
        let dist = match parts.as_slice() {
            ["zero"] => GainDistribution::UniformCapacity { lo: 0.0, hi: 0.0 },
            ["rayleigh", sigma] => GainDistribution::Rayleigh { sigma: num(sigma)? },
            ["uniform-gain", lo, hi] => GainDistribution::UniformGain {
                lo: num(lo)?,
                hi: num(hi)?,
            },
            ["uniform-capacity", lo, hi] => GainDistribution::UniformCapacity {
                lo: num(lo)?,
                hi: num(hi)?,
            },
            _ => {
                return Err(format!(
                    "`{s}` is not a distribution; expected rayleigh:SIGMA, \
                     uniform-gain:LO:HI, uniform-capacity:LO:HI, or zero"
                ))
            }
        };
        Ok(Self {
            text: s.to_string(),
            dist,
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "relay-simplify",
    version,
    about = "Cut-set capacities, subnetwork selection, and retention guarantees \
             for layered Gaussian relay networks",
    after_help = "Relay indices in output are 0-based; cut bitmasks set bit i \
                  for relay i on the source side. Exit codes: 0 ok, 1 invalid \
                  input, 2 usage, 3 budget exceeded, 4 verification violation."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a network document (JSON) on stdout or into a file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Compute the capacity and the weakest cut of a network document.
    Cap {
        /// Network document path, or `-` for stdin.
        net: String,
        /// Cap on L*N for cut enumeration.
        #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT, value_parser = clap::value_parser!(usize))]
        budget: usize,
    },
    /// Find the best K-relays-per-layer subnetwork and check its guarantee.
    Simplify {
        /// Network document path, or `-` for stdin.
        net: String,
        /// Relays to keep per layer.
        #[arg(short, long)]
        k: usize,
        /// Cap on L*N for cut enumeration.
        #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
        budget: usize,
    },
    /// Run a seeded verification campaign over random networks.
    Verify {
        /// Guarantee to verify: 1 = single route, 2 = two relays per layer.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        /// Relay layer count of the drawn networks.
        #[arg(long, default_value_t = 2)]
        layers: usize,
        /// Relays per layer of the drawn networks.
        #[arg(long, default_value_t = 3)]
        relays: usize,
        /// Number of networks to draw and verify.
        #[arg(long)]
        trials: u64,
        /// Campaign seed; trial t draws from RNG stream t under this seed.
        #[arg(long)]
        seed: u64,
        /// Entry distribution of the drawn networks.
        #[arg(long, default_value = "rayleigh:1.0")]
        dist: DistSpec,
        /// Worker threads (default: RELAY_SIMPLIFY_JOBS or all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write a CSV summary (one row per trial) here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Cap on L*N for cut enumeration.
        #[arg(long, default_value_t = DEFAULT_ENUM_LIMIT)]
        budget: usize,
    },
    /// Evaluate a bound-family suite on a network (or sweep, for maxt).
    Bounds {
        /// Network document path, or `-` for stdin. Not used by `maxt`.
        net: Option<String>,
        /// Which family to check.
        #[arg(long)]
        suite: Suite,
        /// Largest relay layer count in the `maxt` sweep.
        #[arg(long, default_value_t = 6)]
        max_layers: usize,
        /// Largest per-layer relay count in the `maxt` sweep.
        #[arg(long, default_value_t = 5)]
        max_relays: usize,
    },
    /// Search for a network whose best-K subnetwork retains little capacity.
    Search {
        /// Relay layer count.
        #[arg(long)]
        layers: usize,
        /// Relays per layer.
        #[arg(long)]
        relays: usize,
        /// Relays to keep per layer.
        #[arg(short, long)]
        k: usize,
        /// Candidate evaluations to spend.
        #[arg(long)]
        trials: u64,
        /// Search seed.
        #[arg(long)]
        seed: u64,
        /// Write the worst network found here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Draw every entry i.i.d. from a distribution, deterministically.
    Random {
        /// Relay layer count.
        #[arg(long)]
        layers: usize,
        /// Relays per layer.
        #[arg(long)]
        relays: usize,
        /// Entry distribution.
        #[arg(long, default_value = "rayleigh:1.0")]
        dist: DistSpec,
        /// RNG seed.
        #[arg(long)]
        seed: u64,
        /// RNG stream under the seed (campaign trial index).
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Write the document here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Worst case for single-route selection, odd layer count.
    OddAdv {
        /// Relay layer count (must be odd).
        #[arg(long)]
        layers: usize,
        /// Relays per layer.
        #[arg(long)]
        relays: usize,
        /// Capacity of the strong links, in bits.
        #[arg(long)]
        base_capacity: f64,
        /// Write the document here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Worst case for single-route selection, even layer count.
    EvenAdv {
        /// Relay layer count (must be even).
        #[arg(long)]
        layers: usize,
        /// Relays per layer.
        #[arg(long)]
        relays: usize,
        /// Capacity of the strong links, in bits.
        #[arg(long)]
        base_capacity: f64,
        /// Write the document here instead of stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Antenna-selection bound on every channel matrix of the network.
    Lemma1,
    /// Transmit/receive-split decomposition bound on every channel matrix.
    Lemma2,
    /// Per-cut family bounds on a (2, 3) network, all 64 cuts.
    Table1,
    /// Sweep of the effective-term-count maximum against its closed form.
    Maxt,
}

/// Formats with 12 significant digits in the style of printf `%g`: positional
/// notation in a comfortable range, scientific outside it, trailing zeros
/// trimmed.
pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let formatted = format!("{:.11e}", x);
    let (mantissa, exp) = formatted.split_once('e').expect("always has an exponent");
    let exp: i32 = exp.parse().expect("well-formed exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "1" } else { digits };

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-4..12).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(digits);
                out.extend(std::iter::repeat('0').take(int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        } else {
            out.push_str("0.");
            out.extend(std::iter::repeat('0').take((-exp) as usize - 1));
            out.push_str(digits);
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}

/// Rounds to 12 significant digits, so JSON numbers print at that precision.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.11e}", x).parse().expect("round-tripped float")
}

/// Unix timestamp for report stamping.
fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default()
        .as_secs()
}

fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Reads a network document from a file path, or stdin when the path is `-`.
pub fn read_network(path: &str) -> Result<LayeredNetwork> {
    let text = if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?
    };
    parse(&text)
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Builds the network a `gen` subcommand describes.
pub fn generate(kind: &GenKind) -> Result<LayeredNetwork> {
    match kind {
        GenKind::Random {
            layers,
            relays,
            dist,
            seed,
            stream,
            ..
        } => random_network_with_stream(*layers, *relays, dist.dist(), *seed, *stream),
        GenKind::OddAdv {
            layers,
            relays,
            base_capacity,
            ..
        } => construct_adversarial_odd(*layers, *relays, *base_capacity),
        GenKind::EvenAdv {
            layers,
            relays,
            base_capacity,
            ..
        } => construct_adversarial_even(*layers, *relays, *base_capacity),
    }
}

/// Capacity summary of a network as a JSON document.
pub fn cap_json(net: &LayeredNetwork, budget: usize) -> Result<String> {
    let result = approx_capacity(net, budget)?;
    let doc = json!({
        "c_bar_bits": sig12(result.c_bar_bits),
        "argmin_cut_masks": result.argmin_cut.masks(),
        "cuts_evaluated": result.cuts_evaluated,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("serializable"))
}

/// Best-subnetwork outcome as a JSON document.
pub fn simplify_json(net: &LayeredNetwork, k: usize, budget: usize) -> Result<String> {
    check_budget(net.l(), net.n(), budget)?;
    let r = best_subnetwork(net, k)?;
    let doc = json!({
        "k": r.k,
        "best_selection": r.best_selection.layers(),
        "best_sub_capacity_bits": sig12(r.best_sub_capacity_bits),
        "full_capacity_bits": sig12(r.full_capacity_bits),
        "ratio": sig12(r.ratio),
        "guarantee_fraction": r.guarantee_fraction.to_string(),
        "guarantee_fraction_value": sig12(r.guarantee_fraction.as_f64()),
        "gap_constant_bits": sig12(r.gap_constant_bits),
        "inequality_holds": r.inequality_holds,
    });
    Ok(serde_json::to_string_pretty(&doc).expect("serializable"))
}

fn check_budget(l: usize, n: usize, budget: usize) -> Result<()> {
    if l * n > budget {
        return Err(Error::Budget(format!(
            "network needs 2^{} cut evaluations, over the budget of 2^{budget}",
            l * n
        )));
    }
    Ok(())
}

/// Everything a verification campaign depends on; echoed into its report.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub theorem: u8,
    pub layers: usize,
    pub relays: usize,
    pub trials: u64,
    pub seed: u64,
    pub dist: DistSpec,
    pub budget: usize,
    /// Worker threads; 0 uses the default pool.
    pub jobs: usize,
}

/// Campaign outcome: the config that produced it, per-trial records in trial
/// order, and the aggregate summary.
#[derive(Debug)]
pub struct Report {
    pub config: VerifyConfig,
    pub records: Vec<VerificationRecord>,
    pub violations: u64,
}

impl Report {
    pub fn min_ratio(&self) -> Option<f64> {
        self.records
            .iter()
            .map(|r| r.result.ratio)
            .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.min(x))))
    }

    pub fn max_gap_slack(&self) -> Option<f64> {
        self.records
            .iter()
            .map(gap_slack)
            .fold(None, |acc, x| Some(acc.map_or(x, |a: f64| a.max(x))))
    }
}

/// Headroom of the gap form: `c_sub - (fraction * c_bar - gap)`.
fn gap_slack(rec: &VerificationRecord) -> f64 {
    let r = &rec.result;
    r.best_sub_capacity_bits
        - (r.guarantee_fraction.as_f64() * r.full_capacity_bits - r.gap_constant_bits)
}

/// Headroom of the zero-gap form: `c_sub - fraction * c_tilde`.
fn sharp_slack(rec: &VerificationRecord) -> f64 {
    rec.result.best_sub_capacity_bits
        - rec.result.guarantee_fraction.as_f64() * rec.c_tilde_bits
}

/// Runs a verification campaign: trial `t` draws its network from RNG stream
/// `t` under the campaign seed and verifies it. Trials run in parallel
/// (`config.jobs` threads; 0 for the default pool) and records come back in
/// trial order, so reports and summaries are identical under any schedule.
pub fn run_verify_campaign(config: &VerifyConfig) -> Result<Report> {
    if config.theorem == 2 && (config.layers, config.relays) != (2, 3) {
        return Err(Error::Domain(format!(
            "two-relay verification is defined for the (2, 3) shape, got ({}, {})",
            config.layers, config.relays
        )));
    }
    check_budget(config.layers, config.relays, config.budget)?;

    let verify_one = |trial: u64| -> Result<VerificationRecord> {
        let net = random_network_with_stream(
            config.layers,
            config.relays,
            config.dist.dist(),
            config.seed,
            trial,
        )?;
        let mut rec = match config.theorem {
            1 => verify_theorem1(&net)?,
            _ => verify_theorem2(&net)?,
        };
        rec.seed = Some(config.seed);
        Ok(rec)
    };

    let records: Vec<VerificationRecord> = if config.jobs == 1 {
        (0..config.trials).map(verify_one).collect::<Result<_>>()?
    } else {
        let run = || -> Result<Vec<VerificationRecord>> {
            (0..config.trials).into_par_iter().map(verify_one).collect()
        };
        if config.jobs == 0 {
            run()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .map_err(|e| Error::Domain(format!("cannot build a {}-thread pool: {e}", config.jobs)))?;
            pool.install(run)
        }?
    };

    let violations = records.iter().filter(|r| !r.holds()).count() as u64;
    Ok(Report {
        config: config.clone(),
        records,
        violations,
    })
}

/// Renders a campaign report as pretty JSON. Per-trial wall-clock times and
/// the worker-thread count are deliberately not serialized: report bytes must
/// be identical for a given campaign config regardless of machine, schedule,
/// or `--jobs`, except for the `generated_at` stamp.
pub fn report_json(report: &Report, generated_at: u64) -> String {
    let cfg = &report.config;
    let records: Vec<Value> = report
        .records
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            json!({
                "trial": i as u64,
                "seed": rec.seed,
                "layers": rec.layers,
                "relays": rec.relays_per_layer,
                "k": rec.result.k,
                "best_selection": rec.result.best_selection.layers(),
                "c_bar_bits": sig12(rec.result.full_capacity_bits),
                "c_sub_bits": sig12(rec.result.best_sub_capacity_bits),
                "c_tilde_bits": sig12(rec.c_tilde_bits),
                "ratio": sig12(rec.result.ratio),
                "slack_gap_form": sig12(gap_slack(rec)),
                "slack_sharp_form": sig12(sharp_slack(rec)),
                "gap_form_holds": rec.result.inequality_holds,
                "sharpened_holds": rec.sharpened_holds,
                "holds": rec.holds(),
            })
        })
        .collect();
    let doc = json!({
        "report_version": 1,
        "tool_version": tool_version(),
        "generated_at": generated_at,
        "config": {
            "command": "verify",
            "theorem": cfg.theorem,
            "layers": cfg.layers,
            "relays": cfg.relays,
            "trials": cfg.trials,
            "seed": cfg.seed,
            "dist": cfg.dist.to_string(),
            "budget": cfg.budget,
        },
        "records": records,
        "summary": {
            "trials": report.records.len() as u64,
            "violations": report.violations,
            "min_ratio": report.min_ratio().map(sig12),
            "max_gap_slack": report.max_gap_slack().map(sig12),
        },
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Renders the per-trial CSV summary. Byte-identical for a given config
/// regardless of `jobs`, since records are ordered by trial.
pub fn report_csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "trial",
        "seed",
        "c_bar",
        "c_sub",
        "c_tilde",
        "ratio",
        "slack_gap_form",
        "slack_sharp_form",
        "holds",
    ])
    .expect("in-memory write");
    for (i, rec) in report.records.iter().enumerate() {
        w.write_record([
            i.to_string(),
            rec.seed.map_or_else(String::new, |s| s.to_string()),
            fmt_g12(rec.result.full_capacity_bits),
            fmt_g12(rec.result.best_sub_capacity_bits),
            fmt_g12(rec.c_tilde_bits),
            fmt_g12(rec.result.ratio),
            fmt_g12(gap_slack(rec)),
            fmt_g12(sharp_slack(rec)),
            rec.holds().to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8 rows")
}

/// Rows and violation count of the `maxt` sweep.
pub fn bounds_maxt(max_layers: usize, max_relays: usize) -> Result<(Vec<Value>, u64)> {
    let mut rows = Vec::new();
    let mut violations = 0;
    for l in 1..=max_layers {
        for n in 1..=max_relays {
            let mt = max_t(l, n)?;
            let holds = mt.max_t <= mt.closed_form_bound;
            if !holds {
                violations += 1;
            }
            rows.push(json!({
                "layers": l,
                "relays": n,
                "max_t": mt.max_t,
                "closed_form": mt.closed_form_bound,
                "argmax_profile": mt.argmax.s,
                "holds": holds,
            }));
        }
    }
    Ok((rows, violations))
}

/// Rows and violation count of the antenna-selection suite: every channel
/// matrix of the network, every subchannel shape, plus the spectral
/// retention check on square-enough matrices.
pub fn bounds_lemma1(net: &LayeredNetwork) -> Result<(Vec<Value>, u64)> {
    let mut rows = Vec::new();
    let mut violations = 0;
    for (idx, m) in net.matrices().iter().enumerate() {
        for kt in 1..=m.n_tx() {
            for kr in 1..=m.n_rx() {
                let rep = selection_bound(m, kt, kr)?;
                if !rep.holds {
                    violations += 1;
                }
                rows.push(json!({
                    "matrix": idx,
                    "kt": kt,
                    "kr": kr,
                    "full_bits": sig12(rep.full_capacity),
                    "best_sub_bits": sig12(rep.best_sub_capacity),
                    "scale": rep.scale.to_string(),
                    "gap_bits": sig12(rep.gap_constant_bits),
                    "holds": rep.holds,
                }));
            }
        }
        for k in 1..=m.n_tx().min(m.n_rx()) {
            let ok = eigen_retention_check(m, k)?;
            if !ok {
                violations += 1;
            }
            rows.push(json!({
                "matrix": idx,
                "eigen_retention_k": k,
                "holds": ok,
            }));
        }
    }
    Ok((rows, violations))
}

/// Rows and violation count of the decomposition suite: every channel matrix,
/// every proper transmit and receive subset. Rows achieving equality (the
/// block-diagonal case) are flagged.
pub fn bounds_lemma2(net: &LayeredNetwork) -> Result<(Vec<Value>, u64)> {
    let mut rows = Vec::new();
    let mut violations = 0;
    for (idx, m) in net.matrices().iter().enumerate() {
        for (side, label, count) in [
            (Side::Transmitters, "transmitters", m.n_tx()),
            (Side::Receivers, "receivers", m.n_rx()),
        ] {
            for mask in 1..(1u32 << count) - 1 {
                let part: Vec<usize> = (0..count).filter(|i| mask >> i & 1 == 1).collect();
                let rep = decomposition_bound(m, side, &part)?;
                if !rep.holds {
                    violations += 1;
                }
                let equality =
                    (rep.full_bits - rep.part_bits - rep.complement_bits).abs() <= TOLERANCE_BITS;
                rows.push(json!({
                    "matrix": idx,
                    "side": label,
                    "subset": part,
                    "full_bits": sig12(rep.full_bits),
                    "part_bits": sig12(rep.part_bits),
                    "complement_bits": sig12(rep.complement_bits),
                    "equality": equality,
                    "holds": rep.holds,
                }));
            }
        }
    }
    Ok((rows, violations))
}

/// Rows and violation count of the per-cut family suite on a (2, 3) network:
/// all 64 cuts against their class bounds, then the two surrogate-capacity
/// gap relations.
pub fn bounds_table1(net: &LayeredNetwork) -> Result<(Vec<Value>, u64)> {
    if net.l() != 2 || net.n() != 3 {
        return Err(Error::Domain(format!(
            "the per-cut family suite is defined for the (2, 3) shape, got ({}, {})",
            net.l(),
            net.n()
        )));
    }
    let mut rows = Vec::new();
    let mut violations = 0;
    for code in 0..64u64 {
        let cut = Cut::from_lex_code(code, 2, 3);
        let value = cut_value(net, &cut)?;
        let fb = f_bound_l2n3(net, &cut)?;
        let bound = fb.min_f_bits + fb.g_y_bits;
        let holds = value <= bound + TOLERANCE_BITS;
        if !holds {
            violations += 1;
        }
        rows.push(json!({
            "cut_masks": cut.masks(),
            "class": fb.class_id,
            "cut_value_bits": sig12(value),
            "min_f_bits": sig12(fb.min_f_bits),
            "gap_bits": sig12(fb.g_y_bits),
            "bound_bits": sig12(bound),
            "holds": holds,
        }));
    }

    let c_bar = approx_capacity(net, DEFAULT_ENUM_LIMIT)?.c_bar_bits;
    let log2_3 = 3f64.log2();
    for (check, lhs, rhs) in [
        ("pair-surrogate-gap", c_bar, c_tilde_k2(net)? + 3.0 * log2_3),
        (
            "route-surrogate-gap",
            c_bar,
            c_tilde_k1(net, DEFAULT_ENUM_LIMIT)? + 8.0 * log2_3,
        ),
    ] {
        let holds = lhs <= rhs + TOLERANCE_BITS;
        if !holds {
            violations += 1;
        }
        rows.push(json!({
            "check": check,
            "lhs_bits": sig12(lhs),
            "rhs_bits": sig12(rhs),
            "holds": holds,
        }));
    }
    Ok((rows, violations))
}

/// Renders a bound-suite report as pretty JSON.
pub fn bounds_json(
    suite: Suite,
    config: Value,
    rows: Vec<Value>,
    violations: u64,
    generated_at: u64,
) -> String {
    let row_count = rows.len() as u64;
    let doc = json!({
        "report_version": 1,
        "tool_version": tool_version(),
        "generated_at": generated_at,
        "config": config,
        "suite": format!("{suite:?}").to_lowercase(),
        "records": rows,
        "summary": {
            "rows": row_count,
            "violations": violations,
        },
    });
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Executes a parsed command line, returning the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Gen { kind } => {
            let net = generate(kind)?;
            let out = match kind {
                GenKind::Random { out, .. }
                | GenKind::OddAdv { out, .. }
                | GenKind::EvenAdv { out, .. } => out,
            };
            write_or_print(out, &serialize(&net))?;
            Ok(0)
        }
        Command::Cap { net, budget } => {
            let net = read_network(net)?;
            println!("{}", cap_json(&net, *budget)?);
            Ok(0)
        }
        Command::Simplify { net, k, budget } => {
            let net = read_network(net)?;
            println!("{}", simplify_json(&net, *k, *budget)?);
            Ok(0)
        }
        Command::Verify {
            theorem,
            layers,
            relays,
            trials,
            seed,
            dist,
            jobs,
            report,
            csv,
            budget,
        } => {
            let config = VerifyConfig {
                theorem: *theorem,
                layers: *layers,
                relays: *relays,
                trials: *trials,
                seed: *seed,
                dist: dist.clone(),
                budget: *budget,
                jobs: resolve_jobs(*jobs),
            };
            let started = std::time::Instant::now();
            let rep = run_verify_campaign(&config)?;
            let elapsed = started.elapsed();
            write_or_print(report, &report_json(&rep, now_unix()))?;
            if let Some(path) = csv {
                fs::write(path, report_csv(&rep))
                    .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
            }
            eprintln!(
                "verify: {} trials in {:.2}s, {} violations",
                rep.records.len(),
                elapsed.as_secs_f64(),
                rep.violations
            );
            Ok(if rep.violations > 0 { 4 } else { 0 })
        }
        Command::Bounds {
            net,
            suite,
            max_layers,
            max_relays,
        } => {
            let (config, rows, violations) = match suite {
                Suite::Maxt => {
                    if net.is_some() {
                        return Err(Error::Domain(
                            "the maxt suite sweeps (layers, relays) and takes no network document"
                                .to_string(),
                        ));
                    }
                    let (rows, violations) = bounds_maxt(*max_layers, *max_relays)?;
                    let config = json!({
                        "command": "bounds",
                        "suite": "maxt",
                        "max_layers": max_layers,
                        "max_relays": max_relays,
                    });
                    (config, rows, violations)
                }
                _ => {
                    let path = net.as_deref().ok_or_else(|| {
                        Error::Domain("this suite needs a network document".to_string())
                    })?;
                    let network = read_network(path)?;
                    let (rows, violations) = match suite {
                        Suite::Lemma1 => bounds_lemma1(&network)?,
                        Suite::Lemma2 => bounds_lemma2(&network)?,
                        Suite::Table1 => bounds_table1(&network)?,
                        Suite::Maxt => unreachable!("handled above"),
                    };
                    let config = json!({
                        "command": "bounds",
                        "suite": format!("{suite:?}").to_lowercase(),
                        "net": path,
                    });
                    (config, rows, violations)
                }
            };
            println!("{}", bounds_json(*suite, config, rows, violations, now_unix()));
            Ok(if violations > 0 { 4 } else { 0 })
        }
        Command::Search {
            layers,
            relays,
            k,
            trials,
            seed,
            out,
        } => {
            let (net, ratio) = adversarial_search(*layers, *relays, *k, *trials, *seed)?;
            eprintln!("search: worst ratio {}", fmt_g12(ratio));
            write_or_print(out, &serialize(&net))?;
            Ok(0)
        }
    }
}

/// `--jobs` wins; otherwise the `RELAY_SIMPLIFY_JOBS` env var; otherwise 0
/// (the default pool).
fn resolve_jobs(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("RELAY_SIMPLIFY_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

/// Process exit code for an error, per the CLI's exit-code contract.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Parse(_) => 1,
        Error::Budget(_) => 3,
    }
}
