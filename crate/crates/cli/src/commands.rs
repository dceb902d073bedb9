//! Execution of the materialized run configurations, artifact writing and
//! sidecar emission.

use crate::config::*;
use crate::verify;
use corrdyn_core::corr::Correspondence;
use corrdyn_core::dynamics::{render_limit_sets, scan_parameter_plane, RenderConfig};
use corrdyn_core::kleinian::{
    build_representation, jorgensen_heuristic, limit_set_sample, modular_representation,
    parabolic_parameter_solve, sturmian_word_to_group_word, trace_word_sq, SolveOptions,
};
use corrdyn_core::pinch::{beltrami_coefficient, default_model};
use corrdyn_core::raster::{
    cloud_csv_bytes, compose_render_rgb, heatmap_rgb, png_bytes, ppm_bytes, scan_rgb, Raster,
    Viewport,
};
use corrdyn_core::sturmian::{
    endpoint_cone_points, image_arc_structure, mechanical_word, min_max_words, pair_landing,
    quotient_pairs, sturmian_orbit_angles, word_symmetry, CircleAngle, RotationNumber,
};
use corrdyn_core::{Error as CoreError, ExtendedComplex};
use num_complex::Complex64;
use serde_json::json;
use std::time::Instant;

/// What a command produced, for the sidecar.
pub struct Outcome {
    pub outputs: Vec<String>,
    pub extra: serde_json::Value,
    pub failed_properties: bool,
}

pub fn execute(command: &CommandConfig) -> Result<Outcome, CoreError> {
    match command {
        CommandConfig::Render(args) => render(args),
        CommandConfig::Scan(args) => scan(args),
        CommandConfig::Sturmian(args) => sturmian(args),
        CommandConfig::Kleinian(args) => kleinian(args),
        CommandConfig::PinchDemo(args) => pinch_demo(args),
        CommandConfig::Verify(args) => run_verify(args),
    }
}

/// Writes the JSON sidecar: the effective config (defaults materialized),
/// version, wall time and produced artifacts. Reproducibility contract:
/// `corrdyn run --config <sidecar>` recreates the artifacts byte-for-byte.
pub fn write_sidecar(
    path: &str,
    command: &CommandConfig,
    started: Instant,
    outcome: &Outcome,
) -> std::io::Result<()> {
    let run = RunConfig {
        config_version: CONFIG_VERSION,
        command: command.clone(),
    };
    let sidecar = json!({
        "config": run,
        "tool": { "name": "corrdyn", "version": env!("CARGO_PKG_VERSION") },
        "wall_ms": started.elapsed().as_millis() as u64,
        "outputs": outcome.outputs,
        "report": outcome.extra,
    });
    std::fs::write(path, serde_json::to_vec_pretty(&sidecar).unwrap())
}

fn c64(pair: (f64, f64)) -> Complex64 {
    Complex64::new(pair.0, pair.1)
}

fn render(args: &RenderArgs) -> Result<Outcome, CoreError> {
    let corr = Correspondence::new(c64(args.a), c64(args.k))?;
    let (x0, y0, x1, y1) = args.viewport;
    let viewport = Viewport::from_corners(x0, y0, x1, y1)?;
    let cfg = RenderConfig {
        budget: args.budget,
        transient: args.transient,
        trap_radius: args.trap_radius,
        seed: args.seed,
        ..RenderConfig::default()
    };
    cfg.validate()?;
    let out = render_limit_sets(&corr, args.width, args.height, viewport, &cfg)?;
    let rgb = compose_render_rgb(&out.class, &out.hits_minus, &out.hits_plus);
    let png = png_bytes(args.width, args.height, &rgb)?;
    let ppm = ppm_bytes(args.width, args.height, &rgb);
    let provenance = format!(
        "corrdyn render a={},{} k={},{} seed={} budget={}",
        args.a.0, args.a.1, args.k.0, args.k.1, args.seed, args.budget
    );
    let mut outputs = Vec::new();
    let io = |e: std::io::Error| CoreError::BadParameters(format!("io: {e}"));
    for (suffix, bytes) in [
        (".png", png),
        (".ppm", ppm),
        (
            ".minus.csv",
            cloud_csv_bytes(&format!("{provenance} cloud=lambda_minus"), &out.minus_points),
        ),
        (
            ".plus.csv",
            cloud_csv_bytes(&format!("{provenance} cloud=lambda_plus"), &out.plus_points),
        ),
    ] {
        let path = format!("{}{}", args.out, suffix);
        std::fs::write(&path, bytes).map_err(io)?;
        outputs.push(path);
    }
    Ok(Outcome {
        outputs,
        extra: json!({
            "undecided_pixels": out.undecided,
            "resampled_orbits": out.resampled,
            "minus_points": out.minus_points.len(),
            "plus_points": out.plus_points.len(),
        }),
        failed_properties: false,
    })
}

fn scan(args: &ScanArgs) -> Result<Outcome, CoreError> {
    let (x0, y0, x1, y1) = args.region;
    let region = Viewport::from_corners(x0, y0, x1, y1)?;
    let cfg = RenderConfig {
        seed: args.seed,
        scan_budget: args.scan_budget,
        scan_cloud: args.scan_cloud,
        ..RenderConfig::default()
    };
    let raster = scan_parameter_plane(region, c64(args.k), args.width, args.height, &cfg)?;
    let rgb = scan_rgb(&raster, args.scan_budget as u32);
    let png = png_bytes(args.width, args.height, &rgb)?;
    let ppm = ppm_bytes(args.width, args.height, &rgb);
    let bounded = raster
        .data
        .iter()
        .filter(|&&v| v == args.scan_budget as u32)
        .count();
    let masked = raster.data.iter().filter(|&&v| v == u32::MAX).count();
    let io = |e: std::io::Error| CoreError::BadParameters(format!("io: {e}"));
    let mut outputs = Vec::new();
    for (suffix, bytes) in [(".png", png), (".ppm", ppm)] {
        let path = format!("{}{}", args.out, suffix);
        std::fs::write(&path, bytes).map_err(io)?;
        outputs.push(path);
    }
    Ok(Outcome {
        outputs,
        extra: json!({ "bounded_pixels": bounded, "masked_pixels": masked }),
        failed_properties: false,
    })
}

fn angle_json(a: &CircleAngle) -> serde_json::Value {
    json!({
        "num": a.rational().numer().to_string(),
        "den": a.rational().denom().to_string(),
        "value": a.to_f64(),
    })
}

fn sturmian(args: &SturmianArgs) -> Result<Outcome, CoreError> {
    let r: RotationNumber = args.pq.parse()?;
    let word = mechanical_word(r);
    let (min_word, max_word) = min_max_words(r);
    let angles = sturmian_orbit_angles(r);
    let pairing: Vec<serde_json::Value> = (0..word.len())
        .map(|i| {
            let u = word.rotate_left(i);
            let v = pair_landing(&u).expect("mechanical words are Sturmian");
            json!({ "lambda_minus": u.to_string(), "lambda_plus": v.to_string() })
        })
        .collect();
    let (s1, s2) = word_symmetry(r)?;
    let cones = endpoint_cone_points(r);
    let arcs = image_arc_structure(r);
    let pairs = quotient_pairs(r, args.depth);
    let report = json!({
        "rotation_number": r.to_string(),
        "word": word.to_string(),
        "min_word": min_word.to_string(),
        "max_word": max_word.to_string(),
        "orbit_angles": angles.iter().map(angle_json).collect::<Vec<_>>(),
        "pairing": pairing,
        "symmetry": [s1.to_string(), s2.to_string()],
        "cone_points": [cones.0.to_string(), cones.1.to_string()],
        "arc_structure": { "concentric": arcs.concentric, "spike": arcs.spike },
        "quotient_pairs": pairs.iter().map(|p| json!({
            "a": angle_json(&p.a),
            "b": angle_json(&p.b),
            "generation": p.generation,
        })).collect::<Vec<_>>(),
    });
    emit_json(&report, args.out.as_deref())
}

fn kleinian(args: &KleinianArgs) -> Result<Outcome, CoreError> {
    let mut extra = serde_json::Map::new();
    let rep = if args.modular {
        extra.insert("mode".into(), json!("modular"));
        modular_representation()
    } else if let Some(pq) = &args.pinch {
        let r: RotationNumber = pq.parse()?;
        let word = sturmian_word_to_group_word(r);
        let solved =
            parabolic_parameter_solve(&word, c64(args.initial), SolveOptions::default())?;
        let rep = build_representation(solved)?;
        let residual = (trace_word_sq(&rep, &word) - Complex64::new(4.0, 0.0)).norm();
        extra.insert("mode".into(), json!("pinch"));
        extra.insert("pinched_word".into(), json!(word.to_string()));
        extra.insert("solved_param".into(), json!([solved.re, solved.im]));
        extra.insert("trace_sq_residual".into(), json!(residual));
        rep
    } else if let Some(param) = args.param {
        extra.insert("mode".into(), json!("param"));
        build_representation(c64(param))?
    } else {
        return Err(CoreError::BadParameters(
            "one of --param, --modular, --pinch is required".into(),
        ));
    };
    rep.check_relations()?;
    let jorgensen = jorgensen_heuristic(&rep);
    extra.insert("param".into(), json!([rep.param.re, rep.param.im]));
    extra.insert(
        "jorgensen_heuristic".into(),
        json!({ "value": jorgensen.value, "passes": jorgensen.passes,
                "note": "necessary condition only; not a discreteness certificate" }),
    );
    let pts = limit_set_sample(&rep, args.samples, args.depth, args.seed)?;
    let finite: Vec<[f64; 2]> = pts
        .iter()
        .filter_map(|p| p.to_complex())
        .map(|z| [z.re, z.im])
        .collect();
    extra.insert("samples".into(), json!(pts.len()));
    extra.insert("samples_at_infinity".into(), json!(pts.len() - finite.len()));
    let report = json!({
        "kleinian": serde_json::Value::Object(extra.clone()),
        "points": finite,
    });
    let mut outcome = emit_json(&report, args.out.as_deref())?;
    if let Some(png_path) = &args.png {
        let raster = rasterize_cloud(&pts, 640, 640)?;
        let rgb = heatmap_rgb(&raster);
        let bytes = png_bytes(640, 640, &rgb)?;
        std::fs::write(png_path, bytes)
            .map_err(|e| CoreError::BadParameters(format!("io: {e}")))?;
        outcome.outputs.push(png_path.clone());
    }
    outcome.extra = serde_json::Value::Object(extra);
    Ok(outcome)
}

/// Accumulation raster of a point cloud over its bounding box, normalized
/// to [0, 1] per pixel by log counts.
fn rasterize_cloud(
    pts: &[ExtendedComplex],
    width: usize,
    height: usize,
) -> Result<Raster<f64>, CoreError> {
    let finite: Vec<Complex64> = pts.iter().filter_map(|p| p.to_complex()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for z in &finite {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    if !(x0 < x1) {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if !(y0 < y1) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad_x = 0.05 * (x1 - x0);
    let pad_y = 0.05 * (y1 - y0);
    let viewport = Viewport::from_corners(x0 - pad_x, y0 - pad_y, x1 + pad_x, y1 + pad_y)?;
    let mut counts = Raster::<u32>::new(width, height, viewport)?;
    for z in &finite {
        if let Some((col, row)) = viewport.point_to_pixel(width, height, *z) {
            let v = counts.get(col, row);
            counts.set(col, row, v + 1);
        }
    }
    let max = counts.data.iter().copied().max().unwrap_or(1).max(1) as f64;
    let mut out = Raster::<f64>::new(width, height, viewport)?;
    for (o, &c) in out.data.iter_mut().zip(counts.data.iter()) {
        *o = if c == 0 {
            0.0
        } else {
            (1.0 + c as f64).ln() / (1.0 + max).ln()
        };
    }
    Ok(out)
}

fn pinch_demo(args: &PinchDemoArgs) -> Result<Outcome, CoreError> {
    if !(0.0..1.0).contains(&args.tmax) {
        return Err(CoreError::BadParameters(format!(
            "tmax must lie in [0, 1), got {}",
            args.tmax
        )));
    }
    let model = default_model(args.ly, args.lr)?;
    let n = args.grid.max(2);
    let mut csv = String::from("t,y,beltrami_modulus\n");
    let viewport = Viewport::from_corners(0.0, 0.0, 1.0, args.lr)?;
    let mut raster = Raster::<f64>::new(n, n, viewport)?;
    for row in 0..n {
        // raster rows run top-down; emit the grid bottom-up in y
        let y = args.lr * (n - 1 - row) as f64 / (n - 1) as f64;
        for col in 0..n {
            let t = args.tmax * col as f64 / (n - 1) as f64;
            let mu = beltrami_coefficient(&model, t, Complex64::new(0.0, y))?.norm();
            raster.set(col, row, mu);
            use std::fmt::Write;
            let _ = writeln!(csv, "{t:.6},{y:.6},{mu:.12}");
        }
    }
    let io = |e: std::io::Error| CoreError::BadParameters(format!("io: {e}"));
    std::fs::write(&args.out, csv).map_err(io)?;
    let mut outputs = vec![args.out.clone()];
    if let Some(png_path) = &args.png {
        let rgb = heatmap_rgb(&raster);
        std::fs::write(png_path, png_bytes(n, n, &rgb)?).map_err(io)?;
        outputs.push(png_path.clone());
    }
    let freeze = model.freeze_time(0.5 * (args.ly + args.lr));
    Ok(Outcome {
        outputs,
        extra: json!({ "freeze_time_at_midheight": freeze }),
        failed_properties: false,
    })
}

fn run_verify(args: &VerifyArgs) -> Result<Outcome, CoreError> {
    let Some(report) = verify::run_suite(&args.suite, args.seed) else {
        return Err(CoreError::BadParameters(format!(
            "unknown suite {:?}; available: algebra, sturmian, kleinian-modular, involution, pinch",
            args.suite
        )));
    };
    let passed = verify::print_report(&report);
    let value = serde_json::to_value(&report).unwrap();
    let mut outputs = Vec::new();
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_vec_pretty(&value).unwrap())
            .map_err(|e| CoreError::BadParameters(format!("io: {e}")))?;
        outputs.push(path.clone());
    }
    Ok(Outcome {
        outputs,
        extra: value,
        failed_properties: !passed,
    })
}

fn emit_json(report: &serde_json::Value, out: Option<&str>) -> Result<Outcome, CoreError> {
    let bytes = serde_json::to_vec_pretty(report).unwrap();
    let mut outputs = Vec::new();
    match out {
        Some(path) => {
            std::fs::write(path, bytes)
                .map_err(|e| CoreError::BadParameters(format!("io: {e}")))?;
            outputs.push(path.to_string());
        }
        None => {
            println!("{}", serde_json::to_string_pretty(report).unwrap());
        }
    }
    Ok(Outcome {
        outputs,
        extra: json!({}),
        failed_properties: false,
    })
}
