use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use thinsieve::census::{self as cz, Category};
use thinsieve::congruence::{
    self, check_strong_primitivity, cone_oracle_density, density_level, detect_ramified_primes,
    uv_oracle_density,
};
use thinsieve::dhr::{self, HorocycleMode, MuSource};
use thinsieve::orbit::{count_ball, enumerate_orbit, fit_exponent, CountSeries, EnumParams};
use thinsieve::presets::Preset;
use thinsieve::{arith, Error, SievePolynomial};

use crate::config::{DeltaSpec, RunConfig};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

pub struct Context {
    pub cfg: RunConfig,
    pub preset: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub budget: Option<usize>,
    pub seed: u64,
}

impl Context {
    fn group(&self) -> Result<Preset> {
        Ok(self.cfg.resolve_group(self.preset.as_deref())?)
    }

    fn radius(&self, flag: Option<f64>, default: f64) -> f64 {
        flag.or(self.cfg.enumeration.radius).unwrap_or(default)
    }

    fn params(&self, g: &Preset, radius: f64) -> EnumParams {
        let e = &self.cfg.enumeration;
        let mut p = g.params(radius);
        if let Some(s) = e.slack {
            p = p.with_slack(s);
        }
        if let Some(l) = e.max_word_length {
            p = p.with_max_word_length(l);
        }
        if let Some(b) = self.budget.or(e.node_budget) {
            p = p.with_node_budget(b);
        }
        p
    }

    fn polynomial(&self, flag: Option<SievePolynomial>, default: SievePolynomial) -> SievePolynomial {
        flag.or(self.cfg.polynomial).unwrap_or(default)
    }

    /// Writes `name` under the output directory, if one was given.
    fn write(&self, name: &str, bytes: &[u8]) -> Result<Option<PathBuf>> {
        let Some(dir) = &self.out_dir else { return Ok(None) };
        std::fs::create_dir_all(dir).map_err(Error::from)?;
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(Error::from)?;
        log::info!("wrote {}", path.display());
        Ok(Some(path))
    }

    fn out_path(&self, name: &str) -> Result<PathBuf> {
        let dir = self.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir).map_err(Error::from)?;
        Ok(dir.join(name))
    }

    fn emit(&self, name: &str, v: &Value) -> Result<()> {
        let text = serde_json::to_string_pretty(v).map_err(Error::from)? + "\n";
        self.write(name, text.as_bytes())?;
        print!("{text}");
        Ok(())
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

pub fn orbit(ctx: &Context, radius: Option<f64>) -> Result<()> {
    let g = ctx.group()?;
    let t = ctx.radius(radius, 100.0);
    let pts = enumerate_orbit(&g.presentation, &ctx.params(&g, t))?;
    let mut s = String::from("x,y,z\n");
    for p in &pts {
        let _ = writeln!(s, "{},{},{}", p.x, p.y, p.z);
    }
    ctx.write("orbit.csv", s.as_bytes())?;
    print!("{s}");
    Ok(())
}

fn default_radii(t_max: f64) -> Vec<f64> {
    let decades = (t_max / 10.0).log10().max(0.0);
    let n = (decades * 4.0).ceil() as usize;
    (0..=n).map(|k| (10.0 * 10f64.powf(k as f64 / 4.0)).min(t_max)).collect()
}

fn fit_json(s: &CountSeries) -> Value {
    match fit_exponent::<f64>(s) {
        Ok(f) => json!(f),
        Err(_) => Value::Null,
    }
}

pub fn count(ctx: &Context, radii: Option<Vec<f64>>, radius: Option<f64>) -> Result<()> {
    let g = ctx.group()?;
    let radii = match radii.or_else(|| ctx.cfg.radii.clone()) {
        Some(r) => r,
        None => default_radii(ctx.radius(radius, 1e4)),
    };
    let t_max = radii.iter().cloned().fold(0.0, f64::max);
    let series = count_ball(&g.presentation, &radii, &ctx.params(&g, t_max))?;
    ctx.emit(
        "counts.json",
        &json!({ "group": g.presentation.label(), "counts": series, "fit": fit_json(&series), "seed": ctx.seed }),
    )
}

/// `a..b` (primes in the inclusive range) or `q1,q2,...`.
fn parse_moduli(s: &str) -> Result<Vec<u64>> {
    let bad = || CliError::Usage(format!("cannot parse moduli {s:?}; expected a..b or a comma list"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        return Ok(arith::primes_up_to(b).into_iter().filter(|&p| p >= a).collect());
    }
    s.split(',').map(|q| q.trim().parse().map_err(|_| bad())).collect()
}

fn oracle(f: SievePolynomial, p: u64) -> thinsieve::Result<thinsieve::Density> {
    if f.denominator() as u64 % p == 0 {
        uv_oracle_density(f, p)
    } else {
        cone_oracle_density(f, p)
    }
}

pub fn local_density(
    ctx: &Context,
    function: Option<SievePolynomial>,
    primes: &str,
    with_oracle: bool,
) -> Result<()> {
    let g = ctx.group()?;
    let f = ctx.polynomial(function, SievePolynomial::Hypotenuse);
    let moduli = parse_moduli(primes)?;
    let mut entries = Vec::new();
    let mut all_agree = true;
    for q in moduli {
        let d = congruence::local_density(&g.presentation, f, q)?;
        let mut e = json!({ "q": q, "level": density_level(f, q), "density": d.to_string() });
        if with_oracle {
            if arith::is_prime_small(q) {
                let o = oracle(f, q)?;
                all_agree &= o == d;
                e["oracle"] = json!(o.to_string());
                e["agrees"] = json!(o == d);
            } else {
                e["oracle"] = Value::Null;
                e["agrees"] = Value::Null;
            }
        }
        entries.push(e);
    }
    let mut doc = json!({ "polynomial": f, "group": g.presentation.label(), "entries": entries });
    if with_oracle {
        doc["all_agree"] = json!(all_agree);
    }
    ctx.emit("local_density.json", &doc)
}

pub fn ramified(ctx: &Context, p_max: Option<u64>) -> Result<()> {
    let g = ctx.group()?;
    let p_max = p_max.or(ctx.cfg.prime_bound).unwrap_or(50);
    let report = detect_ramified_primes(&g.presentation, p_max)?;
    ctx.emit("ramified.json", &json!(report))
}

pub fn primitivity(ctx: &Context, function: Option<SievePolynomial>, q_max: u64) -> Result<()> {
    let g = ctx.group()?;
    let f = ctx.polynomial(function, SievePolynomial::Coordinates);
    let obstruction = check_strong_primitivity(&g.presentation, f, q_max)?;
    ctx.emit(
        "primitivity.json",
        &json!({
            "polynomial": f,
            "group": g.presentation.label(),
            "q_max": q_max,
            "strongly_primitive": obstruction.is_none(),
            "obstruction": obstruction,
        }),
    )
}

pub fn sieve_table(ctx: &Context, as_json: bool, source: MuSource) -> Result<()> {
    let rows = dhr::r_table_with(source)?;
    let json_text = serde_json::to_string_pretty(&rows).map_err(Error::from)? + "\n";
    let text = dhr::format_table(&rows);
    ctx.write("sieve_table.json", json_text.as_bytes())?;
    ctx.write("sieve_table.txt", text.as_bytes())?;
    print!("{}", if as_json { json_text } else { text });
    Ok(())
}

fn resolve_kappa(ctx: &Context, function: Option<SievePolynomial>, kappa: Option<u32>) -> (Option<SievePolynomial>, u32) {
    let f = function.or(ctx.cfg.polynomial);
    match (kappa, f) {
        (Some(k), _) => (f, k),
        (None, Some(f)) => (Some(f), f.kappa()),
        (None, None) => (Some(SievePolynomial::Hypotenuse), 1),
    }
}

pub fn sieve_r(
    ctx: &Context,
    delta: Option<DeltaSpec>,
    theta: Option<f64>,
    mode: Option<HorocycleMode>,
    function: Option<SievePolynomial>,
    kappa: Option<u32>,
) -> Result<()> {
    let (f, kappa) = resolve_kappa(ctx, function, kappa);
    let theta = theta.or(ctx.cfg.sieve.theta).unwrap_or(5.0 / 6.0);
    let mode = mode.or(ctx.cfg.sieve.mode).unwrap_or(HorocycleMode::Any);
    let (delta, fit) = match delta.or_else(|| ctx.cfg.sieve.delta.clone()).unwrap_or(DeltaSpec::Value(1.0)) {
        DeltaSpec::Value(d) => (d, Value::Null),
        DeltaSpec::Fit(_) => {
            let g = ctx.group()?;
            let t = ctx.radius(None, 1e5);
            let radii = ctx.cfg.radii.clone().unwrap_or_else(|| default_radii(t));
            let t_max = radii.iter().cloned().fold(0.0, f64::max);
            let s = count_ball(&g.presentation, &radii, &ctx.params(&g, t_max))?;
            let fit = fit_exponent::<f64>(&s)?;
            (fit.delta_hat.min(1.0), json!(fit))
        }
    };
    let c = dhr::sieve_constants::<f64>(kappa)?;
    let mt = dhr::compute_mu_tau(delta, theta, mode)?;
    let b = dhr::minimize_m(mt.mu, c.kappa, c.beta)?;
    ctx.emit(
        "sieve_r.json",
        &json!({
            "F": f, "kappa": kappa, "delta": delta, "delta_fit": fit, "theta": theta, "mode": mode,
            "mu": mt.mu, "tau": mt.tau, "zeta_star": b.zeta_star, "m_star": b.m_star, "R": b.r,
            "near_integer": b.near_integer, "candidates": b.candidates,
        }),
    )
}

pub fn delta_threshold(
    ctx: &Context,
    r: Option<Vec<u64>>,
    theta: Option<f64>,
    mode: Option<HorocycleMode>,
    function: Option<SievePolynomial>,
    kappa: Option<u32>,
) -> Result<()> {
    let (f, kappa) = resolve_kappa(ctx, function, kappa);
    let theta = theta.or(ctx.cfg.sieve.theta).unwrap_or(5.0 / 6.0);
    let mode = mode.or(ctx.cfg.sieve.mode).unwrap_or(HorocycleMode::Any);
    let targets = r
        .or_else(|| ctx.cfg.sieve.r_targets.clone())
        .ok_or_else(|| CliError::Usage("no R target given (--r or sieve.r_targets)".into()))?;
    let rows = targets
        .iter()
        .map(|&r| Ok(json!({ "R": r, "delta": dhr::delta_threshold(r, theta, kappa, mode)? })))
        .collect::<Result<Vec<_>>>()?;
    ctx.emit(
        "delta_threshold.json",
        &json!({ "F": f, "kappa": kappa, "theta": theta, "mode": mode, "thresholds": rows }),
    )
}

fn run_census(ctx: &Context, f: SievePolynomial, radius: f64, r: &[u32]) -> Result<(Preset, cz::Census)> {
    let g = ctx.group()?;
    let pts = enumerate_orbit(&g.presentation, &ctx.params(&g, radius))?;
    log::info!("factoring {} values of {}", pts.len(), f.tag());
    let c = cz::census(&pts, f, r)?;
    Ok((g, c))
}

pub fn census(ctx: &Context, function: Option<SievePolynomial>, radius: Option<f64>, r: Option<Vec<u32>>) -> Result<()> {
    let f = ctx.polynomial(function, SievePolynomial::Coordinates);
    let t = ctx.radius(radius, 1e4);
    let r = r
        .or_else(|| ctx.cfg.sieve.r_targets.as_ref().map(|v| v.iter().map(|&x| x as u32).collect()))
        .unwrap_or_else(|| vec![4, 5]);
    let (g, c) = run_census(ctx, f, t, &r)?;
    if ctx.out_dir.is_some() {
        cz::export_figure(&c.records, &ctx.out_path("census.csv")?)?;
    }
    ctx.emit(
        "census.json",
        &json!({ "polynomial": f, "group": g.presentation.label(), "radius": t, "summaries": c.summaries(t) }),
    )
}

pub fn figure(ctx: &Context, function: Option<SievePolynomial>, radius: Option<f64>, svg: bool) -> Result<()> {
    let f = ctx.polynomial(function, SievePolynomial::Coordinates);
    let t = ctx.radius(radius, 1e4);
    let (g, c) = run_census(ctx, f, t, &[4, 5])?;
    let tag = f.tag().to_ascii_lowercase();
    let csv = ctx.out_path(&format!("figure_{tag}.csv"))?;
    cz::export_figure(&c.records, &csv)?;
    let svg_path = if svg {
        let p = ctx.out_path(&format!("figure_{tag}.svg"))?;
        cz::export_svg(&c.records, &p)?;
        Some(path_str(&p))
    } else {
        None
    };
    let mut categories: BTreeMap<&str, u64> = BTreeMap::new();
    for rec in &c.records {
        *categories.entry(Category::of(rec).as_str()).or_insert(0) += 1;
    }
    let doc = json!({
        "polynomial": f, "group": g.presentation.label(), "radius": t, "records": c.records.len(),
        "categories": categories, "csv": path_str(&csv), "svg": svg_path,
    });
    println!("{}", serde_json::to_string_pretty(&doc).map_err(Error::from)?);
    Ok(())
}

