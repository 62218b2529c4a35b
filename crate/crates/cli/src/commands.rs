use std::path::Path;

use anyhow::{bail, Context, Result};
use fluct_core::combinatorics::ratio_string;
use fluct_core::distributions::{
    joint_pdf_exact, joint_pdf_multinomial_limit, occupation_pdf_binomial_limit,
    occupation_pdf_exact,
};
use fluct_core::enumeration::{
    microstate_count, oracle_joint_pdf, oracle_moment, oracle_pdf, EnumerationCap,
    DEFAULT_ENUM_CAP,
};
use fluct_core::figures::{figure, manifest, total_fluctuation_figure, TemperatureGrid, FIGURE_IDS};
use fluct_core::fluctuation::{covariance_matrix, total_fluctuation_ratio};
use fluct_core::identities::{run_all, IdentityReport};
use fluct_core::moments::{density_moment_limit, exact_moment, MomentSpec};
use fluct_core::monte_carlo::{z_score_report, SamplerConfig, ZScore};
use fluct_core::{ExactRational, SystemParams};
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::table::{emit, json_text, write_atomic, Cell, Format, Table};
use crate::{CheckFailed, Command, Output, Precision};

const MAX_ENUM_VAR: &str = "FLUCT_MAX_ENUM";

/// Reads `FLUCT_MAX_ENUM` as `N,M`.
fn enum_cap() -> Result<EnumerationCap> {
    let Ok(raw) = std::env::var(MAX_ENUM_VAR) else {
        return Ok(DEFAULT_ENUM_CAP);
    };
    let parsed = raw.split_once(',').and_then(|(n, m)| {
        Some(EnumerationCap {
            max_n: n.trim().parse().ok()?,
            max_m: m.trim().parse().ok()?,
        })
    });
    parsed.with_context(|| format!("{MAX_ENUM_VAR}={raw:?} is not of the form N,M"))
}

fn to_f64(v: &ExactRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn finish(table: &Table, output: &Output) -> Result<()> {
    emit(&table.render(output.format.unwrap_or(Format::Csv)), output.out.as_deref())
}

fn agreement(ok: bool) -> Cell {
    Cell::from(if ok { "exact-match" } else { "mismatch" })
}

fn exact_precision(precision: Option<Precision>, has_m: bool, has_t: bool) -> Result<bool> {
    match (precision, has_m, has_t) {
        (_, false, false) => bail!("give either --m or --t"),
        (Some(Precision::Exact), false, true) => {
            bail!("exact precision needs integer N and M; --t alone only supports --precision float")
        }
        (_, false, true) => Ok(false),
        (p, true, _) => Ok(p != Some(Precision::Float)),
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Microstates { n, m, output } => microstates(n, m, &output),
        Command::Moments { n, m, t, levels, order_max, check_oracle, precision, output } => {
            moments(n, m, t, levels, order_max, check_oracle, precision, &output)
        }
        Command::Pdf { n, m, t, level, compare_limit, check_oracle, precision, output } => {
            pdf(n, m, t, level, compare_limit, check_oracle, precision, &output)
        }
        Command::Jointpdf { n, m, levels, counts, compare_limit, check_oracle, precision, output } => {
            jointpdf(n, m, &levels, counts, compare_limit, check_oracle, precision, &output)
        }
        Command::Covariance { n, m, t, output } => covariance(n, m, t, &output),
        Command::Fluctuation { n, t_grid, t, output } => fluctuation(&n, t_grid, t, &output),
        Command::Mc { n, m, samples, seed, levels, output } => mc(n, m, samples, seed, levels, &output),
        Command::Identities { all: _, output } => identities(&output),
        Command::Figures { figure, out } => figures(figure, &out),
    }
}

fn microstates(n: u64, m: u64, output: &Output) -> Result<()> {
    let params = SystemParams::new(n, m)?;
    let count = microstate_count(&params);
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => format!("{count}\n"),
        Format::Json => json_text(&json!({ "N": n, "M": m, "microstates": count.to_string() })),
    };
    emit(&text, output.out.as_deref())
}

#[allow(clippy::too_many_arguments)]
fn moments(
    n: u64,
    m: Option<u64>,
    t: Option<f64>,
    levels: Option<Vec<u64>>,
    order_max: u32,
    check_oracle: bool,
    precision: Option<Precision>,
    output: &Output,
) -> Result<()> {
    let exact = exact_precision(precision, m.is_some(), t.is_some())?;
    let Some(m) = m else {
        if check_oracle {
            bail!("--check-oracle needs integer N and M");
        }
        let t = t.expect("checked above");
        let mut table = Table::new(["j", "m", "density_limit"]);
        for j in levels.unwrap_or_else(|| (0..=5).collect()) {
            for order in 0..=order_max {
                table.push(vec![j.into(), u64::from(order).into(), density_moment_limit(t, MomentSpec::new(j, order))?.into()]);
            }
        }
        return finish(&table, output);
    };
    let params = SystemParams::new(n, m)?;
    let levels = levels.unwrap_or_else(|| (0..=m).collect());
    if check_oracle {
        enum_cap()?.check(&params)?;
    }
    let mut columns = vec!["j", "m"];
    if exact {
        columns.push("exact");
    }
    columns.push("float");
    if check_oracle {
        columns.push("oracle");
    }
    let mut table = Table::new(columns);
    let mut mismatches = 0;
    for &j in &levels {
        for order in 0..=order_max {
            let value = exact_moment(&params, MomentSpec::new(j, order))?;
            let mut row: Vec<Cell> = vec![j.into(), u64::from(order).into()];
            row.push(to_f64(&value).into());
            if exact {
                row.insert(2, value.clone().into());
            }
            if check_oracle {
                let ok = oracle_moment(&params, j, order)? == value;
                mismatches += usize::from(!ok);
                row.push(agreement(ok));
            }
            table.push(row);
        }
    }
    finish(&table, output)?;
    if mismatches > 0 {
        return Err(CheckFailed(format!("{mismatches} moments disagree with enumeration")).into());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn pdf(
    n: u64,
    m: Option<u64>,
    t: Option<f64>,
    level: u64,
    compare_limit: bool,
    check_oracle: bool,
    precision: Option<Precision>,
    output: &Output,
) -> Result<()> {
    let exact = exact_precision(precision, m.is_some(), t.is_some())?;
    let Some(m) = m else {
        if check_oracle {
            bail!("--check-oracle needs integer N and M");
        }
        let limit = occupation_pdf_binomial_limit(n, t.expect("checked above"), level)?;
        if let Some(w) = limit.warning() {
            eprintln!("warning: {w}");
        }
        let mut table = Table::new(["k", "limit"]);
        for (k, &p) in limit.iter() {
            table.push(vec![k.into(), p.into()]);
        }
        return finish(&table, output);
    };
    let params = SystemParams::new(n, m)?;
    params.check_level(level)?;
    let table_exact = occupation_pdf_exact(&params, level)?;
    let limit = if compare_limit {
        let limit = occupation_pdf_binomial_limit(n, params.temperature_f64(), level)?;
        if let Some(w) = limit.warning() {
            eprintln!("warning: {w}");
        }
        Some(limit)
    } else {
        None
    };
    let oracle = if check_oracle {
        enum_cap()?.check(&params)?;
        Some(oracle_pdf(&params, level)?)
    } else {
        None
    };
    let mut columns = vec!["k"];
    if exact {
        columns.push("exact");
    }
    columns.push("float");
    if limit.is_some() {
        columns.push("limit");
    }
    if oracle.is_some() {
        columns.push("oracle");
    }
    let mut table = Table::new(columns);
    let mut mismatches = 0;
    for (i, (k, p)) in table_exact.iter().enumerate() {
        let mut row: Vec<Cell> = vec![k.into()];
        if exact {
            row.push(p.clone().into());
        }
        row.push(to_f64(p).into());
        if let Some(limit) = &limit {
            row.push(limit.probabilities()[i].into());
        }
        if let Some(oracle) = &oracle {
            let ok = &oracle.probabilities()[i] == p;
            mismatches += usize::from(!ok);
            row.push(agreement(ok));
        }
        table.push(row);
    }
    finish(&table, output)?;
    if !table_exact.total().is_one() {
        return Err(CheckFailed(format!("distribution sums to {}", table_exact.total())).into());
    }
    if mismatches > 0 {
        return Err(CheckFailed(format!("{mismatches} probabilities disagree with enumeration")).into());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn jointpdf(
    n: u64,
    m: u64,
    levels: &[u64],
    counts: Option<Vec<u64>>,
    compare_limit: bool,
    check_oracle: bool,
    precision: Option<Precision>,
    output: &Output,
) -> Result<()> {
    let exact = exact_precision(precision, true, false)?;
    let params = SystemParams::new(n, m)?;
    let arity = levels.len();
    if compare_limit && levels.iter().enumerate().any(|(i, &l)| l != i as u64) {
        bail!("--compare-limit needs --levels 0,1,...,p-1");
    }
    if check_oracle {
        enum_cap()?.check(&params)?;
    }
    let lattice: Vec<Vec<u64>> = match &counts {
        Some(c) => {
            if c.len() != arity {
                bail!("{} counts given for {arity} levels", c.len());
            }
            vec![c.clone()]
        }
        None => count_lattice(n, arity),
    };
    let mut columns: Vec<String> = levels.iter().map(|l| format!("n{l}")).collect();
    if exact {
        columns.push("exact".into());
    }
    columns.push("float".into());
    if compare_limit {
        columns.push("limit".into());
    }
    if check_oracle {
        columns.push("oracle".into());
    }
    let mut table = Table::new(columns);
    let mut total = ExactRational::zero();
    let mut mismatches = 0;
    for c in &lattice {
        let p = joint_pdf_exact(&params, levels, c)?;
        let mut row: Vec<Cell> = c.iter().map(|&k| k.into()).collect();
        if exact {
            row.push(p.clone().into());
        }
        row.push(to_f64(&p).into());
        if compare_limit {
            row.push(joint_pdf_multinomial_limit(n, params.temperature_f64(), arity, c)?.into());
        }
        if check_oracle {
            let ok = oracle_joint_pdf(&params, levels, c)? == p;
            mismatches += usize::from(!ok);
            row.push(agreement(ok));
        }
        total += p;
        table.push(row);
    }
    finish(&table, output)?;
    if counts.is_none() && !total.is_one() {
        return Err(CheckFailed(format!("joint table sums to {}", ratio_string(&total))).into());
    }
    if mismatches > 0 {
        return Err(CheckFailed(format!("{mismatches} joint probabilities disagree with enumeration")).into());
    }
    Ok(())
}

/// Count tuples with entries summing to at most `n`, in lexicographic order.
fn count_lattice(n: u64, arity: usize) -> Vec<Vec<u64>> {
    fn grow(left: u64, arity: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == arity {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            grow(left - k, arity, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(n, arity, &mut Vec::new(), &mut out);
    out
}

fn covariance(n: u64, m: u64, t: Option<f64>, output: &Output) -> Result<()> {
    let params = SystemParams::new(n, m)?;
    let t = t.unwrap_or_else(|| params.temperature_f64());
    let cov = covariance_matrix(n, t, m)?;
    let mut columns = vec!["l".to_string()];
    columns.extend((0..cov.dim()).map(|l| format!("c{l}")));
    let mut table = Table::new(columns);
    for (l, row) in cov.rows().iter().enumerate() {
        let mut cells: Vec<Cell> = vec![(l as u64).into()];
        cells.extend(row.iter().map(|&v| Cell::from(v)));
        table.push(cells);
    }
    finish(&table, output)
}

fn fluctuation(
    sizes: &[u64],
    grid: Option<TemperatureGrid>,
    temps: Option<Vec<f64>>,
    output: &Output,
) -> Result<()> {
    let mut columns = vec!["T".to_string()];
    columns.extend(sizes.iter().map(|n| format!("N{n}")));
    let mut table = Table::new(columns);
    let rows: Vec<Vec<f64>> = match temps {
        Some(temps) => temps
            .iter()
            .map(|&t| {
                let mut row = vec![t];
                for &n in sizes {
                    row.push(total_fluctuation_ratio(n, t)?);
                }
                Ok(row)
            })
            .collect::<Result<_>>()?,
        None => {
            let grid = grid.unwrap_or(TemperatureGrid::log(0.01, 1e4, 200));
            total_fluctuation_figure(grid, sizes)?.panels.remove(0).rows
        }
    };
    for row in rows {
        table.push(row.into_iter().map(Cell::from).collect());
    }
    finish(&table, output)
}

fn mc(
    n: u64,
    m: u64,
    samples: u64,
    seed: u64,
    levels: Option<Vec<u64>>,
    output: &Output,
) -> Result<()> {
    let params = SystemParams::new(n, m)?;
    let levels = levels.unwrap_or_else(|| (0..=m.min(10)).collect());
    let config = SamplerConfig::new(params, samples, seed)?;
    let report = z_score_report(&config, &levels)?;
    let mut table = Table::new(["j", "empirical_mean", "exact_mean", "standard_error", "z", "flagged"]);
    for e in &report.entries {
        let z = match e.z {
            ZScore::Value(z) => Cell::from(z),
            ZScore::ExactMatch => Cell::from("exact-match"),
        };
        table.push(vec![
            e.level.into(),
            e.empirical_mean.into(),
            e.exact_mean.into(),
            e.standard_error.into(),
            z,
            Cell::from(if e.flagged { "yes" } else { "no" }),
        ]);
    }
    finish(&table, output)?;
    let flagged: Vec<u64> = report.flagged().map(|e| e.level).collect();
    if !flagged.is_empty() {
        return Err(CheckFailed(format!("levels {flagged:?} lie outside the z band")).into());
    }
    Ok(())
}

fn identities(output: &Output) -> Result<()> {
    let reports = run_all();
    let text = match output.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&serde_json::to_value(&reports)?),
        Format::Csv => {
            let mut table = Table::new(["name", "params", "verdict", "residual", "notes"]);
            for r in &reports {
                table.push(vec![
                    r.name.clone().into(),
                    r.params.to_string().into(),
                    r.verdict.to_string().into(),
                    r.residual.clone().unwrap_or_default().into(),
                    r.notes.join("; ").into(),
                ]);
            }
            table.render(Format::Csv)
        }
    };
    emit(&text, output.out.as_deref())?;
    let red: Vec<&IdentityReport> = reports.iter().filter(|r| r.verdict.is_red()).collect();
    if let Some(first) = red.first() {
        return Err(CheckFailed(format!(
            "{} identity checks failed, first {} at {}",
            red.len(),
            first.name,
            first.params
        ))
        .into());
    }
    Ok(())
}

fn figures(id: Option<u8>, dir: &Path) -> Result<()> {
    let ids: Vec<u8> = match id {
        Some(id) => vec![id],
        None => FIGURE_IDS.to_vec(),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut done = Vec::new();
    for id in ids {
        let data = figure(id)?;
        for panel in &data.panels {
            let path = dir.join(panel.file_name(id));
            write_atomic(&path, panel.to_csv().as_bytes())?;
            println!("{}", path.display());
        }
        done.push(data);
    }
    let path = dir.join("manifest.json");
    write_atomic(&path, json_text(&manifest(&done)).as_bytes())?;
    println!("{}", path.display());
    Ok(())
}
