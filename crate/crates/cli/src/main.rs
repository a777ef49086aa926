//! Command-line front end for the random cusp form laboratory.
//!
//! Subcommands: `kernel`, `variance-profile`, `sup-experiment`,
//! `lp-experiment`, `concentration`, `validate`. Every table written to disk
//! is accompanied by a `.manifest.json` run record and a lossless `.json`
//! mirror. Exit codes: 0 success, 1 runtime/numeric error, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use cusplab_core::experiments::{
    argmax_height_mode, default_compact_region, global_region, run_lp_experiment,
    run_sup_experiment, LpRunConfig, SupRunConfig,
};
use cusplab_core::hyperbolic::{brute_force_enumerate, enumerate_near, Region, UpperHalfPoint};
use cusplab_core::kernel::{
    bergman_r, covariance_r, covariance_r_rel, cusp_series_r, oracle::stabilizer_sum_exact,
    variance_profile, CuspSeriesConfig, Weight,
};
use cusplab_core::sampler::Model;
use cusplab_core::stats::{
    concentration_fit, growth_fit, sphere_tail_oracle, ExponentConvention, GrowthLaw,
};

use cusplab_cli::config::{resolve, FileConfig};
use cusplab_cli::manifest::{self, ErrorCaps, GridDescriptor, ManifestBuilder};
use cusplab_cli::svg;
use cusplab_cli::table::ResultTable;

#[derive(Parser)]
#[command(name = "cusplab", version, about = "Random weight-k cusp form laboratory")]
struct Cli {
    /// Flat key = value config file (CLI flags take precedence).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Bergman kernel R_k(z, w) with a certified tail bound.
    Kernel(KernelArgs),
    /// Diagonal variance r_k(x + iy, x + iy) along a vertical line.
    VarianceProfile(ProfileArgs),
    /// Monte Carlo sup-norm sweep over a list of weights.
    SupExperiment(SupArgs),
    /// Monte Carlo L^p moments against the closed-form prediction.
    LpExperiment(LpArgs),
    /// Concentration of the sup around its median.
    Concentration(ConcArgs),
    /// Oracle battery: enumeration, Poisson identity, Delta oracle,
    /// sphere tail, p = 2 identity.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct KernelArgs {
    /// Point z as `x,y`.
    #[arg(long, value_parser = parse_point)]
    z: UpperHalfPoint,
    /// Point w as `x,y` (defaults to z).
    #[arg(long, value_parser = parse_point)]
    w: Option<UpperHalfPoint>,
    #[arg(long)]
    k: u32,
    /// Absolute tail target for the group sum.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 2.0)]
    y_min: f64,
    #[arg(long, default_value_t = 80.0)]
    y_max: f64,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct SupArgs {
    /// Comma-separated weights, e.g. 60,120,240.
    #[arg(long, value_delimiter = ',')]
    k_list: Vec<u32>,
    /// compact | global | rect:x0,x1,y0,y1
    #[arg(long, default_value = "compact")]
    region: String,
    /// spherical | gaussian
    #[arg(long, default_value = "spherical")]
    model: String,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    density: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct LpArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    p_list: Vec<f64>,
    #[arg(long, default_value = "compact")]
    region: String,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConcArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, default_value = "compact")]
    region: String,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Inject a loose kernel accuracy to demonstrate oracle sensitivity.
    #[arg(long)]
    kernel_eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_point(s: &str) -> Result<UpperHalfPoint, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("bad x: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("bad y: {e}"))?;
    if y <= 0.0 {
        return Err(format!("y must be positive, got {y}"));
    }
    Ok(UpperHalfPoint::new(x, y))
}

fn parse_region(s: &str) -> Result<Region, String> {
    match s {
        "compact" => Ok(default_compact_region()),
        "global" => Ok(global_region()),
        _ => {
            if let Some(spec) = s.strip_prefix("rect:") {
                let v: Vec<f64> = spec
                    .split(',')
                    .map(|t| t.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| format!("bad rect: {e}"))?;
                if v.len() != 4 {
                    return Err("rect needs x0,x1,y0,y1".into());
                }
                Ok(Region::CompactRectangle { x0: v[0], x1: v[1], y0: v[2], y1: v[3] })
            } else {
                Err(format!("unknown region {s:?} (compact | global | rect:x0,x1,y0,y1)"))
            }
        }
    }
}

fn region_label(r: &Region) -> String {
    match r {
        Region::CompactRectangle { .. } => "compact".into(),
        Region::FundamentalTruncated { .. } => "global".into(),
        Region::BulkFDelta { delta, .. } => format!("bulk-F{delta}"),
    }
}

fn usage_bail(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

fn check_weight(k: u32) -> Result<Weight, ExitCode> {
    Weight::new(k).map_err(|e| usage_bail(&e.to_string()))
}

fn main() -> ExitCode {
    if let Ok(workers) = std::env::var("CUSPLAB_WORKERS") {
        if let Ok(n) = workers.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let file_cfg = match &cli.config {
        Some(p) => match FileConfig::load(p) {
            Ok(c) => c,
            Err(e) => return usage_bail(&format!("cannot read config {p:?}: {e}")),
        },
        None => FileConfig::default(),
    };
    let argv: Vec<String> = std::env::args().collect();
    let command_line = argv.join(" ");
    let outcome = match cli.command {
        Command::Kernel(a) => cmd_kernel(a),
        Command::VarianceProfile(a) => cmd_profile(a, &file_cfg, command_line),
        Command::SupExperiment(a) => cmd_sup(a, &file_cfg, command_line),
        Command::LpExperiment(a) => cmd_lp(a, &file_cfg, command_line),
        Command::Concentration(a) => cmd_concentration(a, &file_cfg, command_line),
        Command::Validate(a) => cmd_validate(a, &file_cfg),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

type CmdResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn cmd_kernel(a: KernelArgs) -> CmdResult {
    let weight = match check_weight(a.k) {
        Ok(w) => w,
        Err(code) => return Ok(code),
    };
    let w_point = a.w.unwrap_or(a.z);
    let eps = a.eps.unwrap_or(2.0e-9);
    let kv = bergman_r(&a.z, &w_point, &weight, eps)?;
    println!("R_{}(z, w) = {:+.12e} {:+.12e} i", a.k, kv.value.re, kv.value.im);
    println!("certified tail bound = {:.3e}", kv.tail_bound);
    println!("group elements summed = {}", kv.terms_used);
    if weight.dim() > 0 {
        let r = covariance_r(&a.z, &w_point, &weight, eps * weight.bulk_plateau())?;
        println!("covariance r_k(z, w) = {:+.12e} {:+.12e} i", r.re, r.im);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_profile(a: ProfileArgs, cfg: &FileConfig, command: String) -> CmdResult {
    let weight = match check_weight(a.k) {
        Ok(w) => w,
        Err(code) => return Ok(code),
    };
    let steps = resolve(a.steps, cfg, "profile_steps", 400usize);
    if a.y_max <= a.y_min || a.y_min <= 0.0 || steps < 2 {
        return Ok(usage_bail("need 0 < y-min < y-max and steps >= 2"));
    }
    let mut manifest = ManifestBuilder::start(
        command,
        serde_json::json!({"k": a.k, "y_min": a.y_min, "y_max": a.y_max, "steps": steps, "x": a.x}),
        0,
    );
    let ys: Vec<f64> = (0..steps)
        .map(|i| a.y_min * (a.y_max / a.y_min).powf(i as f64 / (steps - 1) as f64))
        .collect();
    let pts = variance_profile(&weight, &ys, a.x)?;
    let mut t = ResultTable::default();
    for p in &pts {
        t.push(
            a.k,
            &format!("line-x{}", a.x),
            "ensemble",
            &format!("variance@y={:.6e}{}", p.y, if p.resonant { ":resonant" } else { "" }),
            p.variance,
            p.tail_bound,
        );
    }
    t.write_csv(&a.out)?;
    t.write_json(&manifest::json_mirror_path(&a.out))?;
    manifest.caps(ErrorCaps {
        kernel_eps: 1e-10,
        factor_tol: f64::NAN,
        quadrature_error: None,
        sup_bias_cap: None,
    });
    manifest.finish(&a.out)?;
    if let Some(svg_path) = a.svg {
        let series = svg::Series {
            label: "log10 variance",
            color: "#1f77b4",
            points: pts.iter().map(|p| (p.y, p.variance.max(1e-300).log10())).collect(),
        };
        svg::write_line_chart(
            &svg_path,
            &format!("diagonal variance, k = {}", a.k),
            "y",
            "log10 r_k(z,z)",
            &[series],
        )?;
    }
    println!("wrote {} rows to {}", pts.len(), a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_sup(a: SupArgs, cfg: &FileConfig, command: String) -> CmdResult {
    if a.k_list.is_empty() {
        return Ok(usage_bail("need at least one weight in --k-list"));
    }
    for &k in &a.k_list {
        if check_weight(k).is_err() {
            return Ok(usage_bail(&format!("invalid weight {k}")));
        }
    }
    let region = match parse_region(&a.region) {
        Ok(r) => r,
        Err(e) => return Ok(usage_bail(&e)),
    };
    let model = match a.model.as_str() {
        "spherical" => Model::Spherical,
        "gaussian" => Model::Gaussian,
        other => return Ok(usage_bail(&format!("unknown model {other:?}"))),
    };
    let n_samples = resolve(a.n_samples, cfg, "n_samples", 2000usize);
    let seed = resolve(a.seed, cfg, "seed", 1u64);
    let density = resolve(a.density, cfg, "grid_density", 1.0 / 3.0);
    let mut manifest = ManifestBuilder::start(
        command,
        serde_json::json!({
            "k_list": a.k_list, "region": a.region, "model": a.model,
            "n_samples": n_samples, "seed": seed, "density": density,
        }),
        seed,
    );
    let mut t = ResultTable::default();
    let label = region_label(&region);
    let model_label = a.model.clone();
    let mut mean_pairs = Vec::new();
    let mut caps = ErrorCaps {
        kernel_eps: cusplab_core::sampler::DEFAULT_COVARIANCE_EPS,
        factor_tol: cusplab_core::sampler::DEFAULT_FACTOR_TOL,
        quadrature_error: None,
        sup_bias_cap: None,
    };
    for &k in &a.k_list {
        let run_cfg =
            SupRunConfig { density, ..SupRunConfig::new(k, region.clone(), model, n_samples, seed) };
        let out = run_sup_experiment(&run_cfg)?;
        manifest.grid(GridDescriptor {
            k,
            n_points: out.n_grid,
            rank: out.rank,
            n_dim: out.n_dim,
            density,
        });
        caps.sup_bias_cap = Some(out.sup_bias_cap);
        t.push(k, &label, &model_label, "mean_sup", out.stats.mean, out.stats.stderr);
        t.push(k, &label, &model_label, "median_sup", out.stats.median, 0.0);
        t.push(k, &label, &model_label, "argmax_height_mode", argmax_height_mode(&out.argmax_y), 0.0);
        if let Some(z) = out.zeta_mean {
            t.push(k, &label, &model_label, "zeta_mean", z, 0.0);
        }
        for &(q, v) in &out.stats.quantiles {
            t.push(k, &label, &model_label, &format!("quantile_{q}"), v, 0.0);
        }
        mean_pairs.push((k as f64, out.stats.mean));
        println!(
            "k = {k}: grid {} (rank {}/{}), E[sup] = {:.4} +- {:.4}, median {:.4}",
            out.n_grid, out.rank, out.n_dim, out.stats.mean, out.stats.stderr, out.stats.median
        );
    }
    if mean_pairs.len() >= 3 {
        for law in [GrowthLaw::SqrtLog, GrowthLaw::QuarterPower, GrowthLaw::QuarterPowerSqrtLog] {
            let fit = growth_fit(&mean_pairs, law)?;
            for (k, ratio) in &fit.ratios {
                t.push(*k as u32, &label, &model_label, &format!("ratio_{law:?}"), *ratio, 0.0);
            }
        }
    }
    t.write_csv(&a.out)?;
    t.write_json(&manifest::json_mirror_path(&a.out))?;
    manifest.caps(caps);
    manifest.finish(&a.out)?;
    if let Some(svg_path) = a.svg {
        let measured =
            svg::Series { label: "E[sup]", color: "#d62728", points: mean_pairs.clone() };
        let c0 = mean_pairs[0].1 / GrowthLaw::SqrtLog.eval(mean_pairs[0].0);
        let law = svg::Series {
            label: "c sqrt(log k)",
            color: "#1f77b4",
            points: mean_pairs.iter().map(|&(k, _)| (k, c0 * GrowthLaw::SqrtLog.eval(k))).collect(),
        };
        svg::write_line_chart(&svg_path, "expected grid sup", "k", "E[sup]", &[measured, law])?;
    }
    println!("wrote {}", a.out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_lp(a: LpArgs, cfg: &FileConfig, command: String) -> CmdResult {
    let weight = match check_weight(a.k) {
        Ok(w) => w,
        Err(code) => return Ok(code),
    };
    if weight.dim() == 0 {
        return Ok(usage_bail(&format!("no cusp forms at weight {}", a.k)));
    }
    let region = match parse_region(&a.region) {
        Ok(r) => r,
        Err(e) => return Ok(usage_bail(&e)),
    };
    let n_samples = resolve(a.n_samples, cfg, "n_samples", 4000usize);
    let seed = resolve(a.seed, cfg, "seed", 1u64);
    if n_samples < 2 {
        eprintln!("warning: n_samples = {n_samples} leaves the standard error undefined");
    }
    let mut manifest = ManifestBuilder::start(
        command,
        serde_json::json!({"k": a.k, "p_list": a.p_list, "region": a.region,
                           "n_samples": n_samples, "seed": seed}),
        seed,
    );
    let run_cfg = LpRunConfig::new(a.k, region.clone(), a.p_list.clone(), n_samples, seed);
    let out = run_lp_experiment(&run_cfg)?;
    let label = region_label(&region);
    let mut t = ResultTable::default();
    for row in &out.rows {
        t.push(a.k, &label, "spherical", &format!("empirical_Lp_root_p{}", row.p), row.empirical_root, row.stderr_root);
        t.push(a.k, &label, "spherical", &format!("analytic_p{}", row.p), row.analytic, 0.0);
        t.push(a.k, &label, "spherical", &format!("analytic_alt_p{}", row.p), row.analytic_alt, 0.0);
        t.push(a.k, &label, "spherical", &format!("mean_norm_p{}", row.p), row.mean_norm, 0.0);
        let pass = (row.empirical_root - row.analytic).abs() <= 5.0 * row.stderr_root;
        println!(
            "p = {}: empirical {:.6} +- {:.6} vs analytic {:.6} [{}]{}",
            row.p,
            row.empirical_root,
            row.stderr_root,
            row.analytic,
            if pass { "PASS" } else { "FAIL" },
            if row.p == 2.0 {
                let target = out.r_integral.sqrt();
                let exact = (row.analytic - target).abs() <= 1e-9 * target;
                format!("  p=2 identity [{}]", if exact { "PASS" } else { "FAIL" })
            } else {
                String::new()
            }
        );
    }
    manifest.grid(GridDescriptor {
        k: a.k,
        n_points: out.n_grid,
        rank: out.rank,
        n_dim: weight.dim(),
        density: run_cfg.density,
    });
    t.write_csv(&a.out)?;
    t.write_json(&manifest::json_mirror_path(&a.out))?;
    manifest.finish(&a.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_concentration(a: ConcArgs, cfg: &FileConfig, command: String) -> CmdResult {
    let weight = match check_weight(a.k) {
        Ok(w) => w,
        Err(code) => return Ok(code),
    };
    if weight.dim() == 0 {
        return Ok(usage_bail(&format!("no cusp forms at weight {}", a.k)));
    }
    let region = match parse_region(&a.region) {
        Ok(r) => r,
        Err(e) => return Ok(usage_bail(&e)),
    };
    let n_samples = resolve(a.n_samples, cfg, "n_samples", 5000usize);
    if n_samples < 200 {
        eprintln!("error: too few samples ({n_samples}) for tail estimation");
        return Ok(ExitCode::from(1));
    }
    let seed = resolve(a.seed, cfg, "seed", 1u64);
    let manifest = ManifestBuilder::start(
        command,
        serde_json::json!({"k": a.k, "region": a.region, "n_samples": n_samples, "seed": seed}),
        seed,
    );
    let run_cfg = SupRunConfig::new(a.k, region.clone(), Model::Spherical, n_samples, seed);
    let out = run_sup_experiment(&run_cfg)?;
    let global = matches!(region, Region::FundamentalTruncated { .. });
    let scale = if global { (a.k as f64).sqrt() } else { 1.0 };
    let fit = concentration_fit(&out.stats, scale)?;
    let label = region_label(&region);
    let mut t = ResultTable::default();
    t.push(a.k, &label, "spherical", "c_hat", fit.c_hat, 0.0);
    t.push(a.k, &label, "spherical", "linearity_r2", fit.linearity_r2, 0.0);
    t.push(
        a.k,
        &label,
        "spherical",
        "median_minus_mean",
        out.stats.median - out.stats.mean,
        out.stats.stderr,
    );
    for (r, p) in &out.stats.tail_pairs {
        t.push(a.k, &label, "spherical", &format!("tail@r={r:.6e}"), *p, 0.0);
    }
    t.write_csv(&a.out)?;
    t.write_json(&manifest::json_mirror_path(&a.out))?;
    manifest.finish(&a.out)?;
    println!(
        "k = {}: c_hat = {:.4} ({}), linearity r^2 = {:.4}, median-mean = {:+.4}",
        a.k,
        fit.c_hat,
        if global { "r^2/sqrt(k) scaling" } else { "r^2 scaling" },
        fit.linearity_r2,
        out.stats.median - out.stats.mean
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(a: ValidateArgs, cfg: &FileConfig) -> CmdResult {
    let seed = resolve(a.seed, cfg, "seed", 17u64);
    let mut all_pass = true;
    let mut report = |name: &str, pass: bool, detail: String| {
        println!("{:<26} [{}]  {detail}", name, if pass { "PASS" } else { "FAIL" });
        all_pass &= pass;
    };

    // 1. Enumeration vs brute force.
    {
        use rand::Rng;
        let mut rng = cusplab_core::rng::rng_for_draw(seed, 0, 0);
        let mut ok = true;
        let mut checked = 0;
        for _ in 0..8 {
            let z = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.3));
            let w = UpperHalfPoint::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.3));
            let x = rng.gen_range(0.0..6.0);
            let mut fast = enumerate_near(&z, &w, x)?;
            fast.sort();
            let slow = brute_force_enumerate(&z, &w, x, 40);
            checked += slow.len();
            ok &= fast == slow;
        }
        report("enumeration-oracle", ok, format!("{checked} matrices cross-checked"));
    }

    // 2. Poisson identity: series vs exact stabilizer sum.
    {
        let mut worst: f64 = 0.0;
        for (two_y, k) in [(4u32, 16u32), (6, 40), (10, 60)] {
            let weight = Weight::new(k)?;
            let series = cusp_series_r(two_y as f64 / 2.0, &weight, &CuspSeriesConfig::default())?;
            let scale = series.value.re.abs().max(1e-300);
            let (exact, _) = stabilizer_sum_exact(two_y, k, 1e-12 * scale);
            worst = worst.max((series.value.re - exact).abs() / scale);
        }
        report("poisson-identity", worst < 1e-8, format!("worst relative gap {worst:.2e}"));
    }

    // 3. Delta oracle at k = 12 (quick sweep; --kernel-eps injects looseness).
    {
        let oracle = cusplab_core::delta::DeltaOracle::new(cusplab_core::delta::DEFAULT_NORM_RESOLUTION);
        let weight = Weight::new(12)?;
        let mut worst: f64 = 0.0;
        let pts: Vec<UpperHalfPoint> = vec![
            UpperHalfPoint::new(0.1, 1.3),
            UpperHalfPoint::new(-0.35, 0.95),
            UpperHalfPoint::new(0.02, 1.05),
            UpperHalfPoint::new(0.45, 1.1),
            UpperHalfPoint::new(0.25, 2.0),
            UpperHalfPoint::new(0.0, 2.5),
            UpperHalfPoint::new(-0.2, 3.0),
            UpperHalfPoint::new(0.31, 3.5),
        ];
        for z in &pts {
            let truth = oracle.variance_k12(z)?;
            let kernel = match a.kernel_eps {
                Some(eps) => covariance_r(z, z, &weight, eps)?.re,
                None => covariance_r_rel(z, z, &weight, 1e-8)?.re,
            };
            worst = worst.max((kernel - truth).abs() / truth);
        }
        report(
            "delta-oracle",
            worst < 1e-6,
            format!("worst relative gap {worst:.2e} over {} points", pts.len()),
        );
    }

    // 4. Sphere-tail exponent adjudication.
    {
        let t = 0.6;
        let mut ok = true;
        let mut detail = String::new();
        for n in [2usize, 3] {
            let p = sphere_tail_oracle(n, t, 200_000, seed);
            let complex_law = (1.0 - t * t).powi(n as i32 - 1);
            let real_law = (1.0 - t * t).powf((2 * n - 3) as f64 / 2.0);
            let se = (complex_law * (1.0 - complex_law) / 200_000.0f64).sqrt();
            ok &= (p - complex_law).abs() < 10.0 * se && (p - real_law).abs() > 20.0 * se;
            detail.push_str(&format!("N={n}: {p:.4} vs {complex_law:.4}/{real_law:.4}  "));
        }
        report("sphere-tail-exponent", ok, detail);
    }

    // 5. p = 2 identity on a small grid.
    {
        let weight = Weight::new(60)?;
        let region = default_compact_region();
        let grid = cusplab_core::sampler::make_grid(&region, &weight, 1.0)?;
        let r_diag: Vec<f64> = grid
            .points
            .iter()
            .map(|z| covariance_r(z, z, &weight, 1e-12).map(|v| v.re))
            .collect::<cusplab_core::Result<Vec<_>>>()?;
        let analytic = cusplab_core::stats::analytic_lp_expectation_on_grid(
            &weight,
            2.0,
            &grid,
            &r_diag,
            ExponentConvention::ComplexSphere,
        )?;
        let target: f64 = grid.weights.iter().zip(&r_diag).map(|(w, r)| w * r).sum();
        let gap = (analytic - target.sqrt()).abs() / target.sqrt();
        report("p2-identity", gap < 1e-9, format!("relative gap {gap:.2e}"));
    }

    // Bulk main term as a final smoke check.
    {
        let z = UpperHalfPoint::new(0.2, 1.4);
        let weight = Weight::new(240)?;
        let kv = bergman_r(&z, &z, &weight, 1e-8)?;
        let pred = Complex64::new(2.0, 0.0);
        let gap = (kv.value - pred).norm();
        report("bulk-main-term", gap < 0.02, format!("|R - 2| = {gap:.2e}"));
    }

    println!();
    if all_pass {
        println!("all validation oracles PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("validation FAILED");
        Ok(ExitCode::from(1))
    }
}
