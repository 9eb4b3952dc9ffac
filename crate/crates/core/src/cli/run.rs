//! Experiment runners producing CSV text.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use super::config::Config;
use super::scenario::{Scenario, SolverKind};
use crate::error::{Error, Result};
use crate::hilbert::Operator;
use crate::jcmodel::{free_hamiltonian, hamiltonian};
use crate::observables::Observable;
use crate::solver::{
    damping_basis, gibbs_state, gibbs_tail_mass, spectrum, steady_state, trace_distance, TimeSeries,
};

/// Shortest representation that parses back to the same `f64`; exponent
/// notation outside `[1e-5, 1e16)`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn observable_rows(scenario: &Scenario, series: &TimeSeries) -> Result<Vec<Vec<f64>>> {
    series
        .states()
        .iter()
        .map(|rho| scenario.observables.evaluate(rho.operator()))
        .collect()
}

/// `tau,<observables...>`, one row per grid point.
pub fn run_evolve(scenario: &Scenario) -> Result<String> {
    let l = scenario.generator()?;
    let series = scenario.solve(&l)?;
    let rows = observable_rows(scenario, &series)?;
    let mut out = String::from("tau");
    for o in scenario.observables.items() {
        write!(out, ",{o}").unwrap();
    }
    out.push('\n');
    for (tau, row) in scenario.taus().iter().zip(rows) {
        out.push_str(&format_number(*tau));
        for v in row {
            out.push(',');
            out.push_str(&format_number(v));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Builds the two sides of a comparison. With one config the second model
/// comes from `compare.model`; with two, the configs must agree on every key
/// except the model.
pub fn compare_pair(first: &Config, second: Option<&Config>) -> Result<(Scenario, Scenario)> {
    let second = match second {
        Some(c) => {
            let strip = |c: &Config| {
                let mut c = c.clone();
                c.remove("model");
                c.remove("compare.model");
                c
            };
            if strip(first) != strip(c) {
                return Err(Error::Config(
                    "compared scenarios must differ only in 'model'".into(),
                ));
            }
            c.clone()
        }
        None => {
            let other = first
                .get("compare.model")
                .ok_or_else(|| {
                    Error::Config("compare needs 'compare.model' or a second config".into())
                })?
                .to_string();
            let mut c = first.clone();
            c.set("model", other)?;
            c
        }
    };
    Ok((
        Scenario::from_config(first)?,
        Scenario::from_config(&second)?,
    ))
}

struct Side {
    series: TimeSeries,
    rows: Vec<Vec<f64>>,
    frequencies: Vec<Option<f64>>,
}

fn run_side(scenario: &Scenario) -> Result<Side> {
    let l = scenario.generator()?;
    let basis = damping_basis(&l)?;
    let rho0 = scenario.initial_state()?;
    let series = match scenario.solver {
        SolverKind::Spectral => basis.evolve(&rho0, &scenario.times())?,
        SolverKind::Ode { .. } => scenario.solve(&l)?,
    };
    let space = scenario.space();
    let frequencies = scenario
        .observables
        .items()
        .iter()
        .map(|o| {
            o.operator(&space)
                .and_then(|op| basis.dominant_frequency(rho0.operator(), &op))
        })
        .collect();
    let rows = observable_rows(scenario, &series)?;
    Ok(Side {
        series,
        rows,
        frequencies,
    })
}

fn describe(f: Option<f64>) -> String {
    f.map_or_else(|| "none".to_string(), format_number)
}

/// Runs both models concurrently. Returns the CSV and a summary with the
/// largest difference and the dominant oscillation frequency (angular, in
/// units of `omega0`) of each model per observable.
pub fn run_compare(a: &Scenario, b: &Scenario) -> Result<(String, String)> {
    let (ra, rb) = std::thread::scope(|s| {
        let ha = s.spawn(|| run_side(a));
        let hb = s.spawn(|| run_side(b));
        (ha.join(), hb.join())
    });
    let join = |r: std::thread::Result<Result<Side>>| {
        r.unwrap_or_else(|_| Err(Error::Numerical("comparison worker panicked".into())))
    };
    let (sa, sb) = (join(ra)?, join(rb)?);
    if sa.series.times() != sb.series.times() {
        return Err(Error::Numerical("comparison grids differ".into()));
    }

    let (na, nb) = if a.model == b.model {
        (format!("{}_1", a.model), format!("{}_2", b.model))
    } else {
        (a.model.to_string(), b.model.to_string())
    };
    let items = a.observables.items();
    let mut csv = String::from("tau");
    for o in items {
        write!(csv, ",{o}_{na},{o}_{nb},{o}_diff").unwrap();
    }
    csv.push('\n');
    let mut max_diff = vec![0.0f64; items.len()];
    for (k, tau) in a.taus().iter().enumerate() {
        csv.push_str(&format_number(*tau));
        for (j, worst) in max_diff.iter_mut().enumerate() {
            let (x, y) = (sa.rows[k][j], sb.rows[k][j]);
            let d = y - x;
            *worst = worst.max(d.abs());
            write!(
                csv,
                ",{},{},{}",
                format_number(x),
                format_number(y),
                format_number(d)
            )
            .unwrap();
        }
        csv.push('\n');
    }

    let mut summary = String::new();
    for (j, o) in items.iter().enumerate() {
        writeln!(
            summary,
            "{o}: max |{nb} - {na}| = {}",
            format_number(max_diff[j])
        )
        .unwrap();
        let (fa, fb) = (sa.frequencies[j], sb.frequencies[j]);
        writeln!(summary, "  {na} frequency = {}", describe(fa)).unwrap();
        writeln!(summary, "  {nb} frequency = {}", describe(fb)).unwrap();
        if let (Some(x), Some(y)) = (fa, fb) {
            writeln!(
                summary,
                "  frequency shift = {} (relative {})",
                format_number(y - x),
                format_number((y - x) / x)
            )
            .unwrap();
        }
    }
    Ok((csv, summary))
}

/// `re,im` rows of the generator spectrum.
pub fn run_spectrum(scenario: &Scenario) -> Result<String> {
    let l = scenario.generator()?;
    let mut out = String::from("re,im\n");
    for z in spectrum(&l)? {
        writeln!(out, "{},{}", format_number(z.re), format_number(z.im)).unwrap();
    }
    Ok(out)
}

/// `quantity,value` rows describing the stationary state and its distance
/// to the thermal states of the full and free Hamiltonians at the bath
/// temperature.
pub fn run_steady(scenario: &Scenario) -> Result<String> {
    let l = scenario.generator()?;
    let rho = steady_state(&l)?;
    let space = scenario.space();
    let t = scenario.bath.temperature();
    let jc = gibbs_state(&hamiltonian(&scenario.params, &space), t)?;
    let free = gibbs_state(&free_hamiltonian(&scenario.params, &space), t)?;
    let mut rows: Vec<(String, f64)> = Vec::new();
    for o in scenario.observables.items() {
        rows.push((o.to_string(), o.evaluate(rho.operator())?));
    }
    let dist = |g: &Operator| trace_distance(rho.operator(), g);
    rows.push(("trace_distance_gibbs_jc".into(), dist(jc.operator())?));
    rows.push(("trace_distance_gibbs_free".into(), dist(free.operator())?));
    rows.push(("top_level_population".into(), gibbs_tail_mass(&rho, &space)));
    rows.push((
        "min_eigenvalue".into(),
        Observable::MinEigenvalue.evaluate(rho.operator())?,
    ));
    let mut out = String::from("quantity,value\n");
    let mut seen = Vec::new();
    for (name, v) in rows {
        if seen.contains(&name) {
            continue;
        }
        writeln!(out, "{name},{}", format_number(v)).unwrap();
        seen.push(name);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [
            0.0,
            1.0,
            -0.5,
            0.1,
            1.0 / 3.0,
            1e-7,
            -2.5e-300,
            6.02e23,
            123456.789,
            1e-5,
        ] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(!s.contains(','));
        }
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(1e-7), "1e-7");
    }

    fn config(text: &str) -> Config {
        Config::parse(text).unwrap()
    }

    #[test]
    fn compare_rejects_mismatched_bases() {
        let a = config("model = micro\nrabi = 0.35\nbath.gamma0 = 0.07\n");
        let b = config("model = phen\nrabi = 0.3\nbath.gamma0 = 0.07\n");
        assert!(matches!(compare_pair(&a, Some(&b)), Err(Error::Config(_))));
        let b = config("model = phen\nrabi = 0.35\nbath.gamma0 = 0.07\n");
        let (x, y) = compare_pair(&a, Some(&b)).unwrap();
        assert_eq!((x.model.name(), y.model.name()), ("micro", "phen"));
        assert!(compare_pair(&a, None).is_err());
    }

    #[test]
    fn identical_models_have_no_difference() {
        let a = config("model = phen\nrabi = 0.35\nbath.gamma0 = 0.07\ntime.steps = 40\ncompare.model = phen\n");
        let (x, y) = compare_pair(&a, None).unwrap();
        let (csv, summary) = run_compare(&x, &y).unwrap();
        let header = csv.lines().next().unwrap();
        assert!(header.starts_with("tau,pop_0g_phen_1,pop_0g_phen_2,pop_0g_diff"));
        for line in csv.lines().skip(1) {
            for (k, field) in line.split(',').enumerate() {
                if k > 0 && k % 3 == 0 {
                    assert!(field.parse::<f64>().unwrap().abs() < 1e-14);
                }
            }
        }
        assert!(summary.contains("frequency"));
    }
}
