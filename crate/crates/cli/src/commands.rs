//! One function per subcommand, each producing a [`Table`].

use grating_core::asymptotic::{reconstruct, solve_asymptotic, AsymptoticOptions};
use grating_core::exact::{assemble, lattice_sums, solve_converged, solve_exact, solve_neumann};
use grating_core::fields::{field_grid, field_sums, FieldEvaluator, GridSpec};
use grating_core::{derive, CoefficientSet, SchlomilchTable, SumMethod};
use num_complex::Complex64;

use crate::config::{ExactMethod, RunConfig};
use crate::table::{Cell, Table};
use crate::CliError;

/// Iteration cap of the Neumann solve.
const NEUMANN_MAX_ITER: usize = 1000;

/// Relative accuracy requested from the lattice-sum tables.
const SUM_TOL: f64 = 1e-13;

fn f(x: f64) -> Cell {
    Cell::Float(x)
}

/// `|x - y| / max(|x|, |y|)`, zero when both vanish.
pub fn deviation(x: Complex64, y: Complex64) -> f64 {
    let scale = x.norm().max(y.norm());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).norm() / scale
    }
}

/// `|approx - exact| / |exact|`, or the absolute difference where `exact` vanishes.
pub fn relative_error(approx: Complex64, exact: Complex64) -> f64 {
    let d = (approx - exact).norm();
    if exact.norm() > 0.0 {
        d / exact.norm()
    } else {
        d
    }
}

pub fn sums(cfg: &RunConfig) -> Result<(Table, String), CliError> {
    let (p, w) = (cfg.params()?, cfg.wave()?);
    let derived = derive(&p, &w)?;
    let n_max = 2 * cfg.solver.n_trunc;
    let build = |m| SchlomilchTable::build(derived.delta, w.psi_i, n_max, m, SUM_TOL);
    let elementary = build(SumMethod::Elementary)?;
    let direct = build(SumMethod::Direct)?;
    // The small-spacing expansion needs a single propagating order.
    let small = build(SumMethod::Asymptotic).ok();

    let mut columns = vec!["n", "re_elementary", "im_elementary", "re_direct", "im_direct"];
    if small.is_some() {
        columns.extend(["re_asymptotic", "im_asymptotic"]);
    }
    columns.push("dev_elementary_direct");
    if small.is_some() {
        columns.extend(["dev_elementary_asymptotic", "dev_direct_asymptotic"]);
    }
    let mut table = Table::new("sums", &columns);
    let mut worst: f64 = 0.0;
    for n in -(n_max as i64)..=n_max as i64 {
        let (e, d) = (elementary.at(n), direct.at(n));
        let mut row = vec![Cell::Int(n), f(e.re), f(e.im), f(d.re), f(d.im)];
        if let Some(s) = &small {
            row.extend([f(s.at(n).re), f(s.at(n).im)]);
        }
        let dev = deviation(e, d);
        worst = worst.max(dev);
        row.push(f(dev));
        if let Some(s) = &small {
            row.extend([f(deviation(e, s.at(n))), f(deviation(d, s.at(n)))]);
        }
        table.push(row);
    }
    let summary = format!(
        "sums: Delta = {:.6}, |n| <= {n_max}, worst elementary/direct deviation {worst:.3e}",
        derived.delta
    );
    Ok((table, summary))
}

/// Exact coefficients by the configured method.
pub fn exact_coefficients(cfg: &RunConfig) -> Result<CoefficientSet<f64>, CliError> {
    let (p, w) = (cfg.params()?, cfg.wave()?);
    let s = &cfg.solver;
    let set = match s.method {
        ExactMethod::Direct => solve_exact(&p, &w, s.n_trunc)?,
        ExactMethod::Neumann => {
            let table = lattice_sums(&p, &w, s.n_trunc, SumMethod::Elementary)?;
            let system = assemble(&p, &w, &table, s.n_trunc)?;
            solve_neumann(&system, NEUMANN_MAX_ITER, s.tol)?.coefficients
        }
        ExactMethod::Auto => solve_converged(&p, &w, s.tol)?,
    };
    Ok(set)
}

pub fn coeffs_exact(cfg: &RunConfig) -> Result<(Table, String), CliError> {
    let set = exact_coefficients(cfg)?;
    let mut table = Table::new("coeffs-exact", &["n", "re_a", "im_a", "re_ah", "im_ah", "residual"]);
    for n in set.orders() {
        let (a, ah) = (set.a(n), set.a_h(n));
        table.push(vec![
            Cell::Int(n),
            f(a.re),
            f(a.im),
            f(ah.re),
            f(ah.im),
            f(set.residual),
        ]);
    }
    let summary = format!(
        "coeffs-exact: N = {}, method {:?}, residual {:.3e}",
        set.n_trunc, set.method, set.residual
    );
    Ok((table, summary))
}

fn asymptotic_options(cfg: &RunConfig) -> AsymptoticOptions {
    AsymptoticOptions {
        m_trunc: cfg.solver.m_trunc,
        ..AsymptoticOptions::default()
    }
}

pub fn coeffs_asymptotic(cfg: &RunConfig) -> Result<(Table, String), CliError> {
    let (p, w) = (cfg.params()?, cfg.wave()?);
    let set = solve_asymptotic(&p, &w, &asymptotic_options(cfg))?;
    let scaled = reconstruct(&set, &derive(&p, &w)?, &p);
    let mut table = Table::new(
        "coeffs-asymptotic",
        &[
            "p",
            "exponent",
            "re_omega_a",
            "im_omega_a",
            "re_omega_ah",
            "im_omega_ah",
            "re_a",
            "im_a",
            "re_ah",
            "im_ah",
        ],
    );
    for q in set.orders() {
        let o = set.omega(q);
        let n = q as i64;
        let (a, ah) = (scaled.a(n), scaled.a_h(n));
        table.push(vec![
            Cell::Int(n),
            Cell::Int(grating_core::asymptotic::scale_exponent(q) as i64),
            f(o[0].re),
            f(o[0].im),
            f(o[1].re),
            f(o[1].im),
            f(a.re),
            f(a.im),
            f(ah.re),
            f(ah.im),
        ]);
    }
    let summary = format!(
        "coeffs-asymptotic: M = {}, |p| <= {}, residual {:.3e}",
        set.m_trunc,
        set.p_max(),
        set.residual
    );
    Ok((table, summary))
}

const COMPARE_VALUES: [&str; 8] = [
    "re_a_exact",
    "im_a_exact",
    "re_a_asymptotic",
    "im_a_asymptotic",
    "re_ah_exact",
    "im_ah_exact",
    "re_ah_asymptotic",
    "im_ah_asymptotic",
];

/// One compare row from `n` and the eight value columns.
fn compare_row(n: i64, v: [f64; 8]) -> Vec<Cell> {
    let c = |i: usize| Complex64::new(v[i], v[i + 1]);
    let mut row = vec![Cell::Int(n)];
    row.extend(v[..4].iter().map(|&x| f(x)));
    row.push(f(relative_error(c(2), c(0))));
    row.extend(v[4..].iter().map(|&x| f(x)));
    row.push(f(relative_error(c(6), c(4))));
    row
}

fn compare_table(rows: impl IntoIterator<Item = (i64, [f64; 8])>) -> (Table, f64) {
    let mut columns = vec!["n"];
    columns.extend(&COMPARE_VALUES[..4]);
    columns.push("rel_err_a");
    columns.extend(&COMPARE_VALUES[4..]);
    columns.push("rel_err_ah");
    let mut table = Table::new("compare", &columns);
    let mut worst: f64 = 0.0;
    for (n, v) in rows {
        let row = compare_row(n, v);
        if n.abs() == 1 {
            worst = worst.max(row[5].as_f64());
        }
        table.push(row);
    }
    (table, worst)
}

pub fn compare(cfg: &RunConfig) -> Result<(Table, String), CliError> {
    let (p, w) = (cfg.params()?, cfg.wave()?);
    let exact = exact_coefficients(cfg)?;
    let set = solve_asymptotic(&p, &w, &asymptotic_options(cfg))?;
    let asym = reconstruct(&set, &derive(&p, &w)?, &p);
    let reach = (set.p_max() as i64).min(exact.n_trunc as i64);
    let rows = (-reach..=reach).map(|n| {
        let (ea, eh, aa, ah) = (exact.a(n), exact.a_h(n), asym.a(n), asym.a_h(n));
        (n, [ea.re, ea.im, aa.re, aa.im, eh.re, eh.im, ah.re, ah.im])
    });
    let (table, worst) = compare_table(rows);
    Ok((
        table,
        format!("compare: |n| <= {reach}, worst relative error of A_(+-1) {worst:.3e}"),
    ))
}

/// Rebuilds the compare table from the values stored in its JSON form.
pub fn compare_from_json(text: &str) -> Result<(Table, String), CliError> {
    let stored = Table::from_json(text)?;
    if stored.command != "compare" {
        return Err(CliError::Config(format!(
            "expected compare output, found `{}`",
            stored.command
        )));
    }
    let n_col = stored.column("n")?;
    let cols = COMPARE_VALUES
        .iter()
        .map(|name| stored.column(name))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = stored.rows.iter().map(|r| {
        let n = match r[n_col] {
            Cell::Int(n) => n,
            Cell::Float(x) => x as i64,
        };
        let mut v = [0.0; 8];
        for (slot, &c) in v.iter_mut().zip(&cols) {
            *slot = r[c].as_f64();
        }
        (n, v)
    });
    let (table, worst) = compare_table(rows);
    Ok((
        table,
        format!("compare (from JSON): worst relative error of A_(+-1) {worst:.3e}"),
    ))
}

pub fn field_grid_table(cfg: &RunConfig) -> Result<(Table, String), CliError> {
    let grid = cfg
        .grid
        .ok_or_else(|| CliError::Config("field-grid needs a [grid] section".into()))?;
    let (p, w) = (cfg.params()?, cfg.wave()?);
    let set = exact_coefficients(cfg)?;
    let table_sums = field_sums(&p, &w, set.n_trunc)?;
    let evaluator = FieldEvaluator::new(&set, &table_sums, &w, &p)?;
    let spec = GridSpec {
        x0: grid.x0,
        x1: grid.x1,
        y0: grid.y0,
        y1: grid.y1,
        nx: grid.nx,
        ny: grid.ny,
        z: grid.z,
    };
    let points = field_grid(&evaluator, &spec)?;
    let mut table = Table::new("field-grid", &["x", "y", "re_ez", "im_ez", "re_hz", "im_hz"]);
    let mut inside = 0;
    for pt in &points {
        match &pt.sample {
            Some(s) => table.push(vec![
                f(pt.x),
                f(pt.y),
                f(s.e_z.re),
                f(s.e_z.im),
                f(s.h_z.re),
                f(s.h_z.im),
            ]),
            None => inside += 1,
        }
    }
    let summary = format!(
        "field-grid: {} exterior nodes, {inside} inside rods skipped, N = {}",
        table.rows.len(),
        set.n_trunc
    );
    Ok((table, summary))
}
