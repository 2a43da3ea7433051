//! Command implementations.

use crate::support::{fmt_f64, load_activations, load_matrix, resolve_coeffs, write_output, RunManifest};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::PathBuf;
use ternlut::act::ActivationVector;
use ternlut::cost::{inverter_area_model, inverter_area_structural, total_area, total_area_nm, CostMode};
use ternlut::dse::{
    compare_sota, efficiency_vs_tilesize, geometry_scan, parse_sota_file, parse_value_list, sweep,
    DesignPoint, SweepSpec, DEFAULT_SOTA_ENTRIES,
};
use ternlut::encode::{bits_per_weight, encode_matrix, key_width};
use ternlut::error::{Error, Result};
use ternlut::lut::{cycle_count, gemv, reference_gemv, reference_gemv_f64, OutputVector};
use ternlut::netlist::emit_netlist;
use ternlut::tile::{ActivationType, TileConfig};
use ternlut::trit::{TernaryMatrix, Trit};
use ternlut::word::F16;

pub fn encode(input: &PathBuf, mu: usize, output: &PathBuf, seed: u64) -> Result<()> {
    let w = load_matrix(input)?;
    let stream = encode_matrix(&w, mu)?;
    let manifest = RunManifest::new("encode", seed, None);
    write_output(Some(output), &stream.to_bytes(), &manifest)?;
    println!(
        "encoded {}x{} at mu={}: key width {} bits, bits/weight nominal={:.3} achieved={:.3}",
        w.rows(),
        w.cols(),
        mu,
        key_width(mu),
        bits_per_weight(mu),
        stream.density()
    );
    Ok(())
}

pub fn decode(input: &PathBuf, output: &PathBuf, seed: u64) -> Result<()> {
    let bytes = std::fs::read(input)?;
    let stream = ternlut::encode::EncodedWeightStream::from_bytes(&bytes)?;
    let w = ternlut::encode::decode_matrix(&stream)?;
    let manifest = RunManifest::new("decode", seed, None);
    write_output(Some(output), w.render_text().as_bytes(), &manifest)?;
    println!("decoded {}x{} matrix", w.rows(), w.cols());
    Ok(())
}

fn outputs_csv(y: &OutputVector) -> String {
    let mut s = String::new();
    match y {
        OutputVector::Int8(v) => {
            s.push_str("index,value\n");
            for (i, val) in v.iter().enumerate() {
                let _ = writeln!(s, "{i},{val}");
            }
        }
        OutputVector::Fp16(v) => {
            s.push_str("index,value,bits\n");
            for (i, val) in v.iter().enumerate() {
                let _ = writeln!(s, "{i},{},0x{:04x}", val.to_f32(), val.to_bits());
            }
        }
    }
    s
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    weights: &PathBuf,
    activations: &PathBuf,
    l: usize,
    mu: usize,
    k: usize,
    act: &str,
    out: Option<&PathBuf>,
    check: bool,
    overlap: bool,
    seed: u64,
) -> Result<()> {
    let act = ActivationType::parse(act)?;
    let cfg = TileConfig::new(l, mu, k, act)?;
    let w = load_matrix(weights)?;
    let x = load_activations(activations, act)?;
    let y = gemv(&w, &x, &cfg)?;

    let manifest = RunManifest::new("simulate", seed, None);
    write_output(out, outputs_csv(&y).as_bytes(), &manifest)?;

    let (n, m) = cfg.dims();
    let in_tiles = w.cols().div_ceil(n);
    let out_tiles = w.rows().div_ceil(m);
    let cycles = cycle_count(&cfg, w.rows(), w.cols(), overlap)?;
    println!(
        "cycles: total={cycles} fetch={} tiles={}x{} overlap={overlap}",
        in_tiles * out_tiles,
        in_tiles,
        out_tiles
    );

    if check {
        let reference = reference_gemv(&w, &x, &cfg)?;
        let exact = match (&y, &reference) {
            (OutputVector::Int8(a), OutputVector::Int8(b)) => a == b,
            (OutputVector::Fp16(a), OutputVector::Fp16(b)) => {
                a.iter().zip(b).all(|(p, q)| p.to_bits() == q.to_bits())
            }
            _ => false,
        };
        let f64_ref = reference_gemv_f64(&w, &x)?;
        let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
        let as_f64 = |y: &OutputVector, i: usize| -> f64 {
            match y {
                OutputVector::Int8(v) => v[i] as f64,
                OutputVector::Fp16(v) => v[i].to_f64(),
            }
        };
        for (i, want) in f64_ref.iter().enumerate() {
            let got = as_f64(&y, i);
            let abs = (got - want).abs();
            max_abs = max_abs.max(abs);
            if want.abs() > 0.0 {
                max_rel = max_rel.max(abs / want.abs());
            }
        }
        println!("float64 reference: max_abs_err={max_abs:e} max_rel_err={max_rel:e}");
        if exact {
            match act {
                ActivationType::Int8 => println!("check: PASS (INT8 exact match, {} outputs)", y.len()),
                ActivationType::Fp16 => println!("check: PASS (FP16 bit-exact, {} outputs)", y.len()),
            }
        } else {
            return Err(Error::VerificationFailure(format!(
                "simulator output differs from the architecture-order reference for cfg {cfg}"
            )));
        }
    }
    Ok(())
}

struct CostRow {
    l: String,
    mu: usize,
    k: String,
    n: f64,
    m: f64,
    breakdown: ternlut::cost::CostBreakdown,
    inv_model: f64,
    inv_structural: f64,
}

fn cost_csv(rows: &[CostRow], act: ActivationType, mode: CostMode) -> String {
    let mut s = String::from("L,mu,K,act,mode,n,m,build_area,accumulate_area,mux_area,reg_area,total_area,inv_area_model,inv_area_structural\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.l,
            r.mu,
            r.k,
            act.name(),
            mode.name(),
            fmt_f64(r.n),
            fmt_f64(r.m),
            fmt_f64(r.breakdown.build_plus),
            fmt_f64(r.breakdown.accumulate_plus),
            fmt_f64(r.breakdown.mux),
            fmt_f64(r.breakdown.out_reg),
            fmt_f64(r.breakdown.total),
            fmt_f64(r.inv_model),
            fmt_f64(r.inv_structural),
        );
    }
    s
}

#[allow(clippy::too_many_arguments)]
pub fn cost(
    l: Option<usize>,
    mu: &str,
    k: Option<usize>,
    n: Option<f64>,
    m: Option<f64>,
    act: &str,
    coeffs_arg: Option<&str>,
    exact: bool,
    out: Option<&PathBuf>,
    seed: u64,
) -> Result<()> {
    let act = ActivationType::parse(act)?;
    let src = resolve_coeffs(coeffs_arg, act)?;
    let mus = parse_value_list(mu)?;
    let mode = if exact { CostMode::Exact } else { CostMode::Fitted };

    let mut rows = Vec::new();
    match (l, k, n, m) {
        (Some(l), Some(k), None, None) => {
            if mus.len() != 1 {
                return Err(Error::invalid(
                    "--l/--k form takes a single --mu; use --n/--m for a group-size sweep".to_string(),
                ));
            }
            let cfg = TileConfig::new(l, mus[0], k, act)?;
            let breakdown = total_area(&cfg, &src.coeffs, mode)?;
            rows.push(CostRow {
                l: l.to_string(),
                mu: mus[0],
                k: k.to_string(),
                n: cfg.n() as f64,
                m: cfg.m() as f64,
                breakdown,
                inv_model: src.coeffs.gamma * inverter_area_model(&cfg, &src.coeffs),
                inv_structural: src.coeffs.gamma * inverter_area_structural(&cfg, &src.coeffs),
            });
        }
        (None, None, Some(n), Some(m)) => {
            if exact {
                return Err(Error::invalid("--exact requires the --l/--mu/--k form (integer LUT counts)".to_string()));
            }
            if !(n >= 1.0) || !(m >= 1.0) {
                return Err(Error::invalid(format!("tile dimensions {n}x{m} must be at least 1")));
            }
            for &mu in &mus {
                let breakdown = total_area_nm(n, m, mu, &src.coeffs);
                let lutcount = n / mu as f64;
                let t = ternlut::tile::table_size(mu) as f64;
                rows.push(CostRow {
                    l: fmt_f64(lutcount),
                    mu,
                    k: fmt_f64(m),
                    n,
                    m,
                    breakdown,
                    inv_model: src.coeffs.gamma * src.coeffs.a_inv * (n * m / mu as f64) * t,
                    inv_structural: src.coeffs.gamma * src.coeffs.a_inv * lutcount * m,
                });
            }
        }
        _ => {
            return Err(Error::invalid(
                "specify either --l/--mu/--k (concrete config) or --n/--m [--mu list] (smooth model)".to_string(),
            ));
        }
    }
    let manifest = RunManifest::new("cost", seed, Some(&src));
    write_output(out, cost_csv(&rows, act, mode).as_bytes(), &manifest)
}

pub fn netlist(l: usize, mu: usize, k: usize, act: &str, out: Option<&PathBuf>, seed: u64) -> Result<()> {
    let act = ActivationType::parse(act)?;
    let cfg = TileConfig::new(l, mu, k, act)?;
    let nl = emit_netlist(&cfg);
    let tally = nl.tally();
    let manifest = RunManifest::new("netlist", seed, None);
    write_output(out, nl.to_string().as_bytes(), &manifest)?;
    eprintln!(
        "tally: build_adders={} accumulate_adders={} mux2_equivalents={} (structural {}) inverters={} output_registers={} lut_storage_words={}",
        tally.build_adders,
        tally.accumulate_adders,
        tally.mux2_equivalents,
        nl.structural_mux2(),
        tally.inverters,
        tally.output_registers,
        tally.lut_storage_words
    );
    Ok(())
}

fn dse_csv(points: &[DesignPoint]) -> String {
    let mut s = String::from("L,mu,K,act,n,m,throughput,build_area,accumulate_area,mux_area,reg_area,total_area,efficiency\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.cfg.l(),
            p.cfg.mu(),
            p.cfg.k(),
            p.cfg.act().name(),
            p.cfg.n(),
            p.cfg.m(),
            p.throughput,
            fmt_f64(p.breakdown.build_plus),
            fmt_f64(p.breakdown.accumulate_plus),
            fmt_f64(p.breakdown.mux),
            fmt_f64(p.breakdown.out_reg),
            fmt_f64(p.area),
            fmt_f64(p.efficiency),
        );
    }
    s
}

#[allow(clippy::too_many_arguments)]
pub fn dse(
    spec_path: Option<&PathBuf>,
    l: Option<&str>,
    mu: Option<&str>,
    k: Option<&str>,
    act: Option<&str>,
    square: bool,
    target: Option<f64>,
    eps: f64,
    exact: bool,
    coeffs_arg: Option<&str>,
    out: Option<&PathBuf>,
    seed: u64,
) -> Result<()> {
    let spec = match spec_path {
        Some(path) => SweepSpec::parse_toml(&std::fs::read_to_string(path)?)?,
        None => {
            let (Some(l), Some(mu), Some(k), Some(act)) = (l, mu, k, act) else {
                return Err(Error::invalid(
                    "either --spec or all of --l/--mu/--k/--act are required".to_string(),
                ));
            };
            SweepSpec {
                l: parse_value_list(l)?,
                mu: parse_value_list(mu)?,
                k: parse_value_list(k)?,
                act: ActivationType::parse(act)?,
                mode: if exact { CostMode::Exact } else { CostMode::Fitted },
                square_only: square,
                throughput: target.map(|t| (t, eps)),
            }
        }
    };
    let src = resolve_coeffs(coeffs_arg, spec.act)?;
    let points = sweep(&spec, &src.coeffs)?;

    if spec.square_only {
        for &size in &spec.k {
            for &mu in &spec.mu {
                if size % mu != 0 {
                    eprintln!("skipped square point: size {size} not divisible by mu {mu}");
                }
            }
        }
    }
    if points.is_empty() {
        eprintln!("sweep produced no feasible points");
    } else {
        eprintln!("{} design points", points.len());
    }
    let manifest = RunManifest::new("dse", seed, Some(&src));
    write_output(out, dse_csv(&points).as_bytes(), &manifest)
}

#[allow(clippy::too_many_arguments)]
pub fn geometry(
    size: usize,
    act: &str,
    coeffs_arg: Option<&str>,
    eps: f64,
    mu: &str,
    exact: bool,
    out: Option<&PathBuf>,
    seed: u64,
) -> Result<()> {
    let act = ActivationType::parse(act)?;
    let src = resolve_coeffs(coeffs_arg, act)?;
    let mode = if exact { CostMode::Exact } else { CostMode::Fitted };
    let mus = parse_value_list(mu)?;
    let scan = geometry_scan(size, act, &src.coeffs, eps, mode, &mus)?;

    let mut s = String::from("L,mu,K,n,m,throughput,area,delta,is_argmin,is_square_ref\n");
    for (i, gp) in scan.points.iter().enumerate() {
        let p = &gp.point;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            p.cfg.l(),
            p.cfg.mu(),
            p.cfg.k(),
            p.cfg.n(),
            p.cfg.m(),
            p.throughput,
            fmt_f64(p.area),
            fmt_f64(gp.delta),
            (i == scan.argmin) as u8,
            (i == scan.square_reference) as u8,
        );
    }
    let manifest = RunManifest::new("geometry", seed, Some(&src));
    write_output(out, s.as_bytes(), &manifest)?;

    let best = &scan.points[scan.argmin];
    let sq = &scan.points[scan.square_reference];
    println!(
        "argmin: {} area={:.3} delta={:.2}% ({})",
        best.point.cfg,
        best.point.area,
        best.delta * 100.0,
        if best.point.cfg.k() > best.point.cfg.n() { "K > L*mu" } else { "K <= L*mu" }
    );
    println!("square reference: {} area={:.3}", sq.point.cfg, sq.point.area);
    Ok(())
}

pub fn efficiency(sizes: &str, act: &str, coeffs_arg: Option<&str>, out: Option<&PathBuf>, seed: u64) -> Result<()> {
    let act = ActivationType::parse(act)?;
    let src = resolve_coeffs(coeffs_arg, act)?;
    let sizes = parse_value_list(sizes)?;
    let rows = efficiency_vs_tilesize(&sizes, act, &src.coeffs)?;
    let mut s = String::from("size,mu,efficiency\n");
    for (size, mu, eff) in &rows {
        let _ = writeln!(s, "{size},{mu},{}", fmt_f64(*eff));
    }
    let manifest = RunManifest::new("efficiency", seed, Some(&src));
    write_output(out, s.as_bytes(), &manifest)
}

pub fn compare(
    sota: Option<&PathBuf>,
    coeffs_arg: Option<&str>,
    eps: f64,
    exact: bool,
    out: Option<&PathBuf>,
    seed: u64,
) -> Result<()> {
    let text = match sota {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT_SOTA_ENTRIES.to_string(),
    };
    let entries = parse_sota_file(&text)?;
    let mode = if exact { CostMode::Exact } else { CostMode::Fitted };

    let mut s = String::from(
        "name,L,mu,K,act,throughput,model_area,opt_L,opt_mu,opt_K,opt_n,opt_m,opt_throughput,opt_model_area,area_ratio,reported_area,area_units,scaled_reported_area,fclk_mhz,scaled_fclk_mhz\n",
    );
    let mut src_for_manifest = None;
    for entry in &entries {
        let act = ActivationType::parse(&entry.act)?;
        let src = resolve_coeffs(coeffs_arg, act)?;
        let report = compare_sota(entry, &src.coeffs, eps, mode)?;
        let opt = &report.optimum;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            report.name,
            entry.l,
            entry.mu,
            entry.k,
            act.name(),
            report.entry.throughput,
            fmt_f64(report.entry.area),
            opt.cfg.l(),
            opt.cfg.mu(),
            opt.cfg.k(),
            opt.cfg.n(),
            opt.cfg.m(),
            opt.throughput,
            fmt_f64(opt.area),
            fmt_f64(report.area_ratio),
            report.reported_area.map(fmt_f64).unwrap_or_default(),
            report.area_units.clone().unwrap_or_default().replace(',', ";"),
            report.scaled_reported_area.map(fmt_f64).unwrap_or_default(),
            entry.fclk_mhz.map(fmt_f64).unwrap_or_default(),
            report.scaled_fclk_mhz.map(fmt_f64).unwrap_or_default(),
        );
        println!(
            "{}: throughput {} -> optimum {} ({:.3}x model-area ratio)",
            report.name, report.entry.throughput, opt.cfg, report.area_ratio
        );
        src_for_manifest = Some(src);
    }
    let manifest = RunManifest::new("compare", seed, src_for_manifest.as_ref());
    write_output(out, s.as_bytes(), &manifest)
}

pub fn gen_weights(rows: usize, cols: usize, out: &PathBuf, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = TernaryMatrix::from_fn(rows, cols, |_, _| match rng.random_range(0..3) {
        0 => Trit::Neg,
        1 => Trit::Zero,
        _ => Trit::Pos,
    })?;
    let manifest = RunManifest::new("gen weights", seed, None);
    write_output(Some(out), w.render_text().as_bytes(), &manifest)
}

pub fn gen_acts(len: usize, act: &str, format: &str, out: &PathBuf, seed: u64) -> Result<()> {
    if len == 0 {
        return Err(Error::invalid("length must be at least 1".to_string()));
    }
    let act = ActivationType::parse(act)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = match act {
        ActivationType::Int8 => {
            ActivationVector::Int8((0..len).map(|_| rng.random_range(-128i16..=127) as i8).collect())
        }
        ActivationType::Fp16 => ActivationVector::Fp16(
            (0..len)
                .map(|_| loop {
                    let bits: u16 = rng.random();
                    let w = F16::from_bits(bits);
                    if w.is_finite() {
                        break w;
                    }
                })
                .collect(),
        ),
    };
    let data = match format {
        "bin" => v.to_raw(),
        "csv" => {
            let mut s = String::new();
            match &v {
                ActivationVector::Int8(vals) => {
                    for x in vals {
                        let _ = writeln!(s, "{x}");
                    }
                }
                ActivationVector::Fp16(vals) => {
                    for x in vals {
                        let _ = writeln!(s, "{}", x.to_f32());
                    }
                }
            }
            s.into_bytes()
        }
        other => return Err(Error::invalid(format!("unknown format {other:?} (expected csv or bin)"))),
    };
    let manifest = RunManifest::new("gen acts", seed, None);
    write_output(Some(out), &data, &manifest)
}
