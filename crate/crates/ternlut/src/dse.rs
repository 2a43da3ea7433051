//! Design-space exploration over `(L, mu, K, activation type)`.
//!
//! Sweeps are exhaustive over explicit parameter value lists and deterministic
//! (lexicographic in `(mu, L, K)`). Throughput is tile size `n * m` in
//! multiplications per cycle; efficiency is throughput per unit modeled area.
//!
//! Group-size optimization comes in two flavors. Fitted mode treats the model
//! as a smooth function of `(n, m, mu)` and scans every `mu` up to the cap,
//! allowing non-integer LUT counts `n / mu` exactly as the analytical model
//! does; exact mode only considers `mu` dividing `n`, since realized hardware
//! needs an integer number of LUTs. Constructible sweep points always carry
//! integer `L`.

use crate::cost::{total_area, total_area_nm, CostBreakdown, CostCoefficients, CostMode};
use crate::error::{Error, Result};
use crate::tile::{ActivationType, TileConfig, MU_MAX};
use serde::Deserialize;

/// One evaluated configuration.
#[derive(Clone, Debug)]
pub struct DesignPoint {
    pub cfg: TileConfig,
    /// Gamma-scaled modeled area.
    pub area: f64,
    /// Multiplications per cycle: `n * m`.
    pub throughput: u64,
    /// `throughput / area`.
    pub efficiency: f64,
    pub breakdown: CostBreakdown,
}

fn design_point(cfg: TileConfig, coeffs: &CostCoefficients, mode: CostMode) -> Result<DesignPoint> {
    let breakdown = total_area(&cfg, coeffs, mode)?;
    let throughput = cfg.tile_size() as u64;
    Ok(DesignPoint {
        cfg,
        area: breakdown.total,
        throughput,
        efficiency: throughput as f64 / breakdown.total,
        breakdown,
    })
}

/// Parses a parameter value list: comma-separated items, each either a single
/// value `a` or an inclusive range `a:b`.
pub fn parse_value_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        if let Some((a, b)) = item.split_once(':') {
            let a: usize = a.trim().parse().map_err(|_| Error::Parse(format!("bad range start {a:?}")))?;
            let b: usize = b.trim().parse().map_err(|_| Error::Parse(format!("bad range end {b:?}")))?;
            if a > b {
                return Err(Error::Parse(format!("empty range {a}:{b}")));
            }
            out.extend(a..=b);
        } else {
            out.push(item.parse().map_err(|_| Error::Parse(format!("bad value {item:?}")))?);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse(format!("value list {s:?} is empty")));
    }
    Ok(out)
}

/// A sweep description: explicit value lists per parameter plus constraints.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub l: Vec<usize>,
    pub mu: Vec<usize>,
    pub k: Vec<usize>,
    pub act: ActivationType,
    pub mode: CostMode,
    /// Keep only square tiles (`L * mu == K`).
    pub square_only: bool,
    /// Keep only tiles with `n * m` within `target * (1 ± eps)`.
    pub throughput: Option<(f64, f64)>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.l.is_empty() || self.mu.is_empty() || self.k.is_empty() {
            return Err(Error::invalid("sweep ranges must be non-empty".to_string()));
        }
        if let Some((target, eps)) = self.throughput {
            if !(target >= 1.0) {
                return Err(Error::invalid(format!("throughput target must be >= 1, got {target}")));
            }
            if !(0.0..1.0).contains(&eps) {
                return Err(Error::invalid(format!("eps must be in [0, 1), got {eps}")));
            }
        }
        Ok(())
    }
}

/// TOML form of a sweep spec file.
#[derive(Deserialize)]
struct SweepSpecRaw {
    l: String,
    mu: String,
    k: String,
    act: String,
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    square_only: bool,
    #[serde(default)]
    throughput: Option<f64>,
    #[serde(default)]
    eps: Option<f64>,
}

impl SweepSpec {
    pub fn parse_toml(text: &str) -> Result<SweepSpec> {
        let raw: SweepSpecRaw = toml::from_str(text).map_err(|e| Error::Parse(format!("sweep spec: {e}")))?;
        let spec = SweepSpec {
            l: parse_value_list(&raw.l)?,
            mu: parse_value_list(&raw.mu)?,
            k: parse_value_list(&raw.k)?,
            act: ActivationType::parse(&raw.act)?,
            mode: raw.mode.as_deref().map(CostMode::parse).transpose()?.unwrap_or(CostMode::Fitted),
            square_only: raw.square_only,
            throughput: raw.throughput.map(|t| (t, raw.eps.unwrap_or(0.02))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Evaluates every config in the cartesian range satisfying the constraints,
/// in lexicographic `(mu, L, K)` order. An empty result is not an error.
pub fn sweep(spec: &SweepSpec, coeffs: &CostCoefficients) -> Result<Vec<DesignPoint>> {
    spec.validate()?;
    let mut mu_sorted = spec.mu.clone();
    mu_sorted.sort_unstable();
    mu_sorted.dedup();
    let mut l_sorted = spec.l.clone();
    l_sorted.sort_unstable();
    l_sorted.dedup();
    let mut k_sorted = spec.k.clone();
    k_sorted.sort_unstable();
    k_sorted.dedup();

    let band = spec.throughput.map(|(t, e)| (t * (1.0 - e), t * (1.0 + e)));

    let mut out = Vec::new();
    for &mu in &mu_sorted {
        for &l in &l_sorted {
            for &k in &k_sorted {
                if spec.square_only && l * mu != k {
                    continue;
                }
                if let Some((lo, hi)) = band {
                    let t = (l * mu * k) as f64;
                    if t < lo || t > hi {
                        continue;
                    }
                }
                let cfg = TileConfig::new(l, mu, k, spec.act)?;
                out.push(design_point(cfg, coeffs, spec.mode)?);
            }
        }
    }
    Ok(out)
}

/// Square-grid helper: for each requested square size and group size, the
/// constructible `(L = size/mu, mu, K = size)` point. Combinations where
/// `size` is not divisible by `mu` are returned in the skip list instead.
pub fn square_grid(
    sizes: &[usize],
    mus: &[usize],
    act: ActivationType,
    coeffs: &CostCoefficients,
    mode: CostMode,
) -> Result<(Vec<DesignPoint>, Vec<(usize, usize)>)> {
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for &mu in mus {
        for &size in sizes {
            if mu == 0 || size == 0 {
                return Err(Error::invalid("sizes and group sizes must be positive".to_string()));
            }
            if size % mu != 0 {
                skipped.push((size, mu));
                continue;
            }
            let cfg = TileConfig::new(size / mu, mu, size, act)?;
            points.push(design_point(cfg, coeffs, mode)?);
        }
    }
    Ok((points, skipped))
}

/// Group size minimizing modeled area for an `n x m` tile.
///
/// Fitted mode scans all `mu <= MU_MAX` on the smooth model (non-integer
/// `n / mu` allowed); exact mode scans only divisors of `n`. Ties break
/// toward smaller `mu`.
pub fn optimal_mu(
    n: usize,
    m: usize,
    act: ActivationType,
    coeffs: &CostCoefficients,
    mode: CostMode,
) -> Result<usize> {
    if n < 1 || m < 1 {
        return Err(Error::invalid(format!("tile dimensions {n}x{m} must be positive")));
    }
    if coeffs.act != act {
        return Err(Error::invalid(format!("coefficients are for {} but requested {act}", coeffs.act)));
    }
    let mut best: Option<(usize, f64)> = None;
    for mu in 1..=MU_MAX {
        let area = match mode {
            CostMode::Fitted => total_area_nm(n as f64, m as f64, mu, coeffs).total,
            CostMode::Exact => {
                if n % mu != 0 {
                    continue;
                }
                let cfg = TileConfig::new(n / mu, mu, m, act)?;
                total_area(&cfg, coeffs, CostMode::Exact)?.total
            }
        };
        if best.map_or(true, |(_, b)| area < b) {
            best = Some((mu, area));
        }
    }
    best.map(|(mu, _)| mu)
        .ok_or_else(|| Error::invalid(format!("no feasible group size for n={n}")))
}

fn better(a: &DesignPoint, b: &DesignPoint) -> bool {
    if a.area != b.area {
        return a.area < b.area;
    }
    if a.throughput != b.throughput {
        return a.throughput > b.throughput;
    }
    if a.cfg.mu() != b.cfg.mu() {
        return a.cfg.mu() < b.cfg.mu();
    }
    a.cfg.m() > b.cfg.m()
}

/// Area-minimal configuration whose throughput lies within `target * (1 ± eps)`.
///
/// With `rectangular = false` only square tiles (`n == m`) are considered.
/// Ties break toward higher throughput, then smaller `mu`, then larger `m`.
pub fn optimal_for_throughput(
    target: f64,
    act: ActivationType,
    coeffs: &CostCoefficients,
    rectangular: bool,
    eps: f64,
    mode: CostMode,
) -> Result<DesignPoint> {
    if !(target >= 1.0) {
        return Err(Error::invalid(format!("throughput target must be >= 1, got {target}")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid(format!("eps must be in [0, 1), got {eps}")));
    }
    let lo = (target * (1.0 - eps)).ceil() as u64;
    let hi = (target * (1.0 + eps)).floor() as u64;
    let mut best: Option<DesignPoint> = None;
    for mu in 1..=MU_MAX {
        let max_l = hi as usize / mu;
        for l in 1..=max_l.max(1) {
            let n = l * mu;
            if n as u64 > hi {
                break;
            }
            let k_lo = lo.div_ceil(n as u64).max(1) as usize;
            let k_hi = (hi / n as u64) as usize;
            for k in k_lo..=k_hi {
                if !rectangular && k != n {
                    continue;
                }
                let t = (n * k) as u64;
                debug_assert!(t >= lo && t <= hi);
                let cfg = TileConfig::new(l, mu, k, act)?;
                let point = design_point(cfg, coeffs, mode)?;
                if best.as_ref().map_or(true, |b| better(&point, b)) {
                    best = Some(point);
                }
            }
        }
    }
    best.ok_or_else(|| {
        Error::NoFeasibleDesign(format!(
            "no tile reaches throughput {target} within ±{:.1}%; widen the band",
            eps * 100.0
        ))
    })
}

/// Non-dominated subset in `(-area, +throughput)`, sorted by ascending
/// throughput. Points tied on both axes are all kept.
pub fn pareto_frontier(points: &[DesignPoint]) -> Vec<DesignPoint> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[b]
            .throughput
            .cmp(&points[a].throughput)
            .then(points[a].area.total_cmp(&points[b].area))
    });
    let mut kept: Vec<usize> = Vec::new();
    let mut best_area = f64::INFINITY;
    let mut best_tput = 0u64;
    for &i in &idx {
        let p = &points[i];
        if p.area < best_area {
            best_area = p.area;
            best_tput = p.throughput;
            kept.push(i);
        } else if p.area == best_area && p.throughput == best_tput {
            kept.push(i);
        }
    }
    kept.sort_by(|&a, &b| {
        points[a]
            .throughput
            .cmp(&points[b].throughput)
            .then(points[a].area.total_cmp(&points[b].area))
    });
    kept.into_iter().map(|i| points[i].clone()).collect()
}

/// One cell of a tile-geometry scan.
#[derive(Clone, Debug)]
pub struct GeometryPoint {
    pub point: DesignPoint,
    /// Relative area decrease vs the square reference: `1 - area / ref_area`.
    pub delta: f64,
}

/// Result of [`geometry_scan`].
#[derive(Clone, Debug)]
pub struct GeometryScan {
    pub points: Vec<GeometryPoint>,
    /// Index of the global area minimum.
    pub argmin: usize,
    /// Index of the best square point (the delta reference, delta exactly 0).
    pub square_reference: usize,
}

/// Enumerates every `(L, mu, K)` with `L * mu * K` within `total * (1 ± eps)`
/// and `mu` in `mu_range`, reporting each point's area decrease relative to
/// the best constructible square tile. `total` must be a perfect square so
/// the square reference exists.
pub fn geometry_scan(
    total: usize,
    act: ActivationType,
    coeffs: &CostCoefficients,
    eps: f64,
    mode: CostMode,
    mu_range: &[usize],
) -> Result<GeometryScan> {
    if total < 1 {
        return Err(Error::invalid("total tile size must be positive".to_string()));
    }
    let side = (total as f64).sqrt().round() as usize;
    if side * side != total {
        return Err(Error::invalid(format!(
            "total tile size {total} is not a perfect square; no square reference exists"
        )));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::invalid(format!("eps must be in [0, 1), got {eps}")));
    }
    let lo = ((total as f64) * (1.0 - eps)).ceil() as u64;
    let hi = ((total as f64) * (1.0 + eps)).floor() as u64;

    let mut mus: Vec<usize> = mu_range.to_vec();
    mus.sort_unstable();
    mus.dedup();

    let mut points: Vec<GeometryPoint> = Vec::new();
    for &mu in &mus {
        if mu < 1 || mu > MU_MAX {
            return Err(Error::invalid(format!("mu {mu} out of [1, {MU_MAX}]")));
        }
        let max_l = hi as usize / mu;
        for l in 1..=max_l {
            let n = (l * mu) as u64;
            let k_lo = lo.div_ceil(n).max(1) as usize;
            let k_hi = (hi / n) as usize;
            for k in k_lo..=k_hi {
                let cfg = TileConfig::new(l, mu, k, act)?;
                let point = design_point(cfg, coeffs, mode)?;
                points.push(GeometryPoint { point, delta: 0.0 });
            }
        }
    }

    let square_reference = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.point.cfg.n() == side && p.point.cfg.m() == side)
        .min_by(|(_, a), (_, b)| a.point.area.total_cmp(&b.point.area))
        .map(|(i, _)| i)
        .ok_or_else(|| {
            Error::NoFeasibleDesign(format!("no constructible square {side}x{side} tile in the scanned mu range"))
        })?;
    let ref_area = points[square_reference].point.area;
    for p in &mut points {
        p.delta = 1.0 - p.point.area / ref_area;
    }
    let argmin = points
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.point.area.total_cmp(&b.point.area))
        .map(|(i, _)| i)
        .expect("scan is non-empty");
    Ok(GeometryScan { points, argmin, square_reference })
}

/// Area efficiency (throughput per unit area) of square tiles at their
/// fitted-optimal group size. `sizes` must be ascending.
pub fn efficiency_vs_tilesize(
    sizes: &[usize],
    act: ActivationType,
    coeffs: &CostCoefficients,
) -> Result<Vec<(usize, usize, f64)>> {
    if sizes.is_empty() {
        return Err(Error::invalid("size list is empty".to_string()));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sizes must be strictly ascending".to_string()));
    }
    let mut out = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let mu = optimal_mu(size, size, act, coeffs, CostMode::Fitted)?;
        let area = total_area_nm(size as f64, size as f64, mu, coeffs).total;
        out.push((size, mu, (size * size) as f64 / area));
    }
    Ok(out)
}

/// Shipped declarative file of published accelerator instances.
pub const DEFAULT_SOTA_ENTRIES: &str = include_str!("../configs/sota.toml");

/// A published accelerator instance to benchmark against.
#[derive(Clone, Debug, Deserialize)]
pub struct SotaEntry {
    pub name: String,
    pub l: usize,
    pub mu: usize,
    pub k: usize,
    pub act: String,
    /// Reported core area in the entry's own units (optional, echoed back).
    #[serde(default)]
    pub reported_area: Option<f64>,
    #[serde(default)]
    pub area_units: Option<String>,
    #[serde(default)]
    pub fclk_mhz: Option<f64>,
    /// Technology delay scaling factor (applied as `fclk / factor`).
    #[serde(default)]
    pub tech_delay_factor: Option<f64>,
    /// Technology area scaling factor (applied as `area * factor`).
    #[serde(default)]
    pub tech_area_factor: Option<f64>,
}

#[derive(Deserialize)]
struct SotaFileRaw {
    entry: Vec<SotaEntry>,
}

/// Parses a declarative TOML file of `[[entry]]` tables.
pub fn parse_sota_file(text: &str) -> Result<Vec<SotaEntry>> {
    let raw: SotaFileRaw = toml::from_str(text).map_err(|e| Error::Parse(format!("sota file: {e}")))?;
    if raw.entry.is_empty() {
        return Err(Error::Parse("sota file has no entries".to_string()));
    }
    Ok(raw.entry)
}

/// Comparison of one published instance against our matched-throughput optimum.
#[derive(Clone, Debug)]
pub struct SotaReport {
    pub name: String,
    pub entry: DesignPoint,
    pub optimum: DesignPoint,
    /// `entry.area / optimum.area`; at least 1.0 by construction since the
    /// published configuration is itself inside the feasible band.
    pub area_ratio: f64,
    pub reported_area: Option<f64>,
    pub area_units: Option<String>,
    /// `reported_area * tech_area_factor`, when both are given.
    pub scaled_reported_area: Option<f64>,
    /// `fclk / tech_delay_factor`, when both are given.
    pub scaled_fclk_mhz: Option<f64>,
}

/// Benchmarks a published parameter set: models its area, re-optimizes at the
/// same throughput (±`eps`), and applies optional technology scaling factors
/// to the reported numbers as plain multipliers.
pub fn compare_sota(
    entry: &SotaEntry,
    coeffs: &CostCoefficients,
    eps: f64,
    mode: CostMode,
) -> Result<SotaReport> {
    let act = ActivationType::parse(&entry.act)?;
    let cfg = TileConfig::new(entry.l, entry.mu, entry.k, act)?;
    let entry_point = design_point(cfg, coeffs, mode)?;
    let optimum = optimal_for_throughput(entry_point.throughput as f64, act, coeffs, true, eps, mode)?;
    Ok(SotaReport {
        name: entry.name.clone(),
        area_ratio: entry_point.area / optimum.area,
        optimum,
        entry: entry_point,
        reported_area: entry.reported_area,
        area_units: entry.area_units.clone(),
        scaled_reported_area: match (entry.reported_area, entry.tech_area_factor) {
            (Some(a), Some(f)) => Some(a * f),
            _ => None,
        },
        scaled_fclk_mhz: match (entry.fclk_mhz, entry.tech_delay_factor) {
            (Some(f), Some(d)) if d > 0.0 => Some(f / d),
            _ => None,
        },
    })
}
