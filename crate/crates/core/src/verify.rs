//! Acceptance criteria, shared by the `verify` subcommand and the
//! `acceptance` test target.
//!
//! Every criterion reports its measured quantities next to the bound they
//! must satisfy. Upper tolerances are multiplied by a scale factor, which
//! lets tests confirm that a tightened tolerance makes verification fail.

use std::fmt;
use std::time::Instant;

use faer::c64;

use crate::analytic::{bell_phen, rabi_phen, Populations};
use crate::bath::{occupation, rate, BathSpec, Spectrum};
use crate::cli::{Config, Scenario, SolverKind};
use crate::error::{Error, Result};
use crate::generators::{
    dressed_approx_generator, microscopic_generator, phenomenological_generator,
    single_excitation_generator,
};
use crate::hilbert::build_space;
use crate::jcmodel::{eigenbasis, free_hamiltonian, hamiltonian, DressedLabel, JCParams};
use crate::observables::{diagnostics, Observable};
use crate::solver::{
    damping_basis, gibbs_state, gibbs_tail_mass, steady_state, trace_distance, TimeSeries,
};

pub const OMEGA0: f64 = 1.0;
/// Coupling for the microscopic scenarios; keeps the dressed ladder ordered
/// (`Omega (sqrt(N) + sqrt(N+1)) < omega0`) up to `n_max = 4`.
pub const MICRO_RABI: f64 = 0.2;
/// Coupling for the phenomenological scenarios; large enough that
/// `dt = 1e-3 / Omega` satisfies the RK4 step bound at `n_max = 3`.
pub const PHEN_RABI: f64 = 0.5;
/// `gamma / (2 Omega)`
pub const DAMPING_RATIO: f64 = 0.1;
pub const TAU_MAX: f64 = 100.0;
pub const POINTS: usize = 2000;

#[derive(Clone, Copy, Debug)]
pub enum Bound {
    Below(f64),
    Above(f64),
    Between(f64, f64),
}

#[derive(Clone, Debug)]
pub struct Measure {
    pub label: String,
    pub value: f64,
    pub bound: Bound,
}

impl Measure {
    fn passes(&self, scale: f64) -> bool {
        match self.bound {
            Bound::Below(x) => self.value < x * scale,
            Bound::Above(x) => self.value > x,
            Bound::Between(lo, hi) => (lo..=hi).contains(&self.value),
        }
    }

    fn describe(&self, scale: f64) -> String {
        match self.bound {
            Bound::Below(x) => format!("{} = {:.3e} (< {:.1e})", self.label, self.value, x * scale),
            Bound::Above(x) => format!("{} = {:.3e} (> {:.1e})", self.label, self.value, x),
            Bound::Between(lo, hi) => {
                format!("{} = {:.4} (in [{lo}, {hi}])", self.label, self.value)
            }
        }
    }
}

fn below(label: impl Into<String>, value: f64, bound: f64) -> Measure {
    Measure {
        label: label.into(),
        value,
        bound: Bound::Below(bound),
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "criterion {:>2} [{verdict}] {}: {}",
            self.id,
            self.title,
            self.lines.join("; ")
        )
    }
}

fn report(
    id: usize,
    title: &'static str,
    scale: f64,
    outcome: Result<Vec<Measure>>,
) -> CriterionReport {
    match outcome {
        Ok(measures) => CriterionReport {
            id,
            title,
            passed: measures.iter().all(|m| m.passes(scale)),
            lines: measures.iter().map(|m| m.describe(scale)).collect(),
        },
        Err(e) => CriterionReport {
            id,
            title,
            passed: false,
            lines: vec![format!("error: {e}")],
        },
    }
}

/// One acceptance scenario solved by both methods.
pub struct Trajectory {
    pub name: &'static str,
    pub scenario: Scenario,
    pub spectral: TimeSeries,
    pub ode: TimeSeries,
    pub spectral_seconds: f64,
}

impl Trajectory {
    fn column(series: &TimeSeries, o: Observable) -> Result<Vec<f64>> {
        series
            .states()
            .iter()
            .map(|r| o.evaluate(r.operator()))
            .collect()
    }

    fn populations(series: &TimeSeries) -> Result<Vec<Populations>> {
        let p0 = Self::column(series, Observable::Pop0g)?;
        let p1 = Self::column(series, Observable::Pop1g)?;
        let pg = Self::column(series, Observable::AtomicGround)?;
        Ok((0..p0.len())
            .map(|k| Populations {
                p0g: p0[k],
                p1g: p1[k],
                pg: pg[k],
            })
            .collect())
    }
}

pub fn rabi_for(model: &str) -> f64 {
    if model == "phen" {
        PHEN_RABI
    } else {
        MICRO_RABI
    }
}

pub fn gamma_for(rabi: f64) -> f64 {
    2.0 * rabi * DAMPING_RATIO
}

/// Acceptance scenario configuration: flat bath at `T = 0` with
/// `gamma / (2 Omega) = 0.1`.
pub fn scenario_config(model: &str, initial: &str, n_max: usize) -> Config {
    let rabi = rabi_for(model);
    let gamma = gamma_for(rabi);
    let text = format!(
        "model = {model}\nomega0 = {OMEGA0}\nrabi = {rabi}\nbath.kind = flat\nbath.gamma0 = {gamma}\n\
         bath.temperature = 0\ninitial = {initial}\nn_max = {n_max}\ntime.tau_max = {TAU_MAX}\n\
         time.steps = {POINTS}\n"
    );
    Config::parse(&text).expect("static configuration")
}

fn solve(name: &'static str, model: &str, initial: &str, n_max: usize) -> Result<Trajectory> {
    let mut scenario = Scenario::from_config(&scenario_config(model, initial, n_max))?;
    let start = Instant::now();
    let l = scenario.generator()?;
    let spectral = scenario.solve(&l)?;
    let spectral_seconds = start.elapsed().as_secs_f64();
    let dt = (1e-3 / scenario.params.rabi()).min(scenario.ode_step_bound(&l));
    scenario.solver = SolverKind::Ode { dt };
    let ode = scenario.solve(&l)?;
    Ok(Trajectory {
        name,
        scenario,
        spectral,
        ode,
        spectral_seconds,
    })
}

/// The four acceptance trajectories: `|0,e>` and `|E_{1,+}>` under the
/// microscopic and phenomenological generators.
pub fn trajectories() -> Result<Vec<Trajectory>> {
    Ok(vec![
        solve("micro |0,e>", "micro", "fock:0,e", 2)?,
        solve("phen |0,e>", "phen", "fock:0,e", 2)?,
        solve("micro |E1+>", "micro", "dressed:1,+", 3)?,
        solve("phen |E1+>", "phen", "dressed:1,+", 3)?,
    ])
}

fn max_dev(a: &[f64], b: impl Iterator<Item = f64>) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn criterion1(trajs: &[Trajectory]) -> Result<Vec<Measure>> {
    let t = &trajs[0];
    let gamma = gamma_for(MICRO_RABI);
    let p0 = Trajectory::column(&t.spectral, Observable::Pop0g)?;
    let exact = t
        .spectral
        .times()
        .iter()
        .map(|t| 1.0 - (-gamma * t / 2.0).exp());
    Ok(vec![
        below(
            "max |P0g - (1 - exp(-gamma t/2))|",
            max_dev(&p0, exact),
            1e-8,
        ),
        Measure {
            label: "runtime [s]".into(),
            value: t.spectral_seconds,
            bound: Bound::Below(1.0),
        },
    ])
}

fn oracle_devs(
    series: &TimeSeries,
    oracle: impl Fn(f64) -> Result<Populations>,
) -> Result<[f64; 3]> {
    let got = Trajectory::populations(series)?;
    let mut dev = [0.0f64; 3];
    for (p, &t) in got.iter().zip(series.times()) {
        let e = oracle(t)?;
        dev[0] = dev[0].max((p.p0g - e.p0g).abs());
        dev[1] = dev[1].max((p.p1g - e.p1g).abs());
        dev[2] = dev[2].max((p.pg - e.pg).abs());
    }
    Ok(dev)
}

fn criterion2(trajs: &[Trajectory]) -> Result<Vec<Measure>> {
    let mut out = Vec::new();
    let gamma = gamma_for(PHEN_RABI);
    type Oracle<'a> = &'a dyn Fn(f64) -> Result<Populations>;
    let cases: [(&Trajectory, &str, Oracle); 2] = [
        (&trajs[1], "rabi", &|t| rabi_phen(t, gamma, PHEN_RABI)),
        (&trajs[3], "bell", &|t| bell_phen(t, gamma, PHEN_RABI)),
    ];
    for (traj, tag, oracle) in cases {
        let s = oracle_devs(&traj.spectral, oracle)?;
        let o = oracle_devs(&traj.ode, oracle)?;
        for (k, name) in ["P0g", "P1g", "Pg"].iter().enumerate() {
            out.push(below(format!("{tag} {name} spectral"), s[k], 1e-8));
            out.push(below(format!("{tag} {name} ode"), o[k], 1e-6));
        }
    }
    Ok(out)
}

/// Largest deviation of `p` from `1 - A exp(-k t)`, with `A` and `k` from a
/// least-squares line through `ln(1 - p)`.
pub fn exponential_fit_residual(times: &[f64], p: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(p)
        .filter(|(_, &y)| 1.0 - y > 0.0)
        .map(|(&t, &y)| (t, (1.0 - y).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Numerical(
            "too few points for an exponential fit".into(),
        ));
    }
    let n = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (mt, my) = (st / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| {
        (a + (t - mt) * (y - my), b + (t - mt) * (t - mt))
    });
    let slope = sxy / sxx;
    let intercept = my - slope * mt;
    Ok(times
        .iter()
        .zip(p)
        .map(|(&t, &y)| (y - (1.0 - (intercept + slope * t).exp())).abs())
        .fold(0.0, f64::max))
}

fn criterion3(trajs: &[Trajectory]) -> Result<Vec<Measure>> {
    let residual = |t: &Trajectory| {
        let p0 = Trajectory::column(&t.spectral, Observable::Pop0g)?;
        exponential_fit_residual(t.spectral.times(), &p0)
    };
    Ok(vec![
        below("micro P0g fit residual", residual(&trajs[0])?, 1e-8),
        Measure {
            label: "phen P0g fit residual".into(),
            value: residual(&trajs[1])?,
            bound: Bound::Between(0.01, 0.2),
        },
    ])
}

/// Dominant oscillation frequency of `P_{0,g}` from `|0,e>` under the
/// phenomenological generator.
pub fn phen_rabi_frequency(gamma: f64) -> Result<f64> {
    let params = JCParams::new(OMEGA0, PHEN_RABI)?;
    let space = build_space(2);
    let l = phenomenological_generator(&params, &space, gamma, 0.0)?;
    let basis = damping_basis(&l)?;
    let rho0 = crate::cli::InitialState::Fock(0, crate::hilbert::Atom::Excited).density(&space)?;
    let op = Observable::Pop0g
        .operator(&space)
        .expect("linear observable");
    basis
        .dominant_frequency(rho0.operator(), &op)
        .ok_or_else(|| Error::Numerical("no oscillating component in P0g".into()))
}

fn criterion4() -> Result<Vec<Measure>> {
    let ratios = [0.02, 0.05, 0.1];
    let mut out = Vec::new();
    let mut logs = Vec::new();
    for r in ratios {
        let gamma = 2.0 * PHEN_RABI * r;
        let f = phen_rabi_frequency(gamma)?;
        let expected = (16.0 * PHEN_RABI * PHEN_RABI - gamma * gamma).sqrt() / 2.0;
        out.push(below(
            format!("|f - sqrt(16 W^2 - g^2)/2| at g/2W={r}"),
            (f - expected).abs(),
            1e-10,
        ));
        let shift = (2.0 * PHEN_RABI - f) / (2.0 * PHEN_RABI);
        logs.push((r.ln(), shift.ln()));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    out.push(Measure {
        label: "log-log slope of relative shift".into(),
        value: slope,
        bound: Bound::Between(1.9, 2.1),
    });
    Ok(out)
}

/// Decay rates and frequencies of the single-excitation generator.
pub fn single_excitation_eigenvalues(params: &JCParams, gamma_a: f64, gamma_b: f64) -> Vec<c64> {
    let (w0, om) = (params.omega0(), params.rabi());
    let c = c64::new;
    vec![
        c(0.0, 0.0),
        c(-gamma_a / 2.0, 0.0),
        c(-gamma_b / 2.0, 0.0),
        c(-(gamma_a + gamma_b) / 4.0, 2.0 * om),
        c(-(gamma_a + gamma_b) / 4.0, -2.0 * om),
        c(-gamma_a / 4.0, w0 - om),
        c(-gamma_a / 4.0, -(w0 - om)),
        c(-gamma_b / 4.0, w0 + om),
        c(-gamma_b / 4.0, -(w0 + om)),
    ]
}

/// Largest distance after pairing each expected value with its nearest
/// unused computed value.
pub fn match_spectra(expected: &[c64], got: &[c64]) -> f64 {
    let mut used = vec![false; got.len()];
    let mut worst = 0.0f64;
    for e in expected {
        let best = (0..got.len())
            .filter(|&k| !used[k])
            .min_by(|&a, &b| (got[a] - e).norm().total_cmp(&(got[b] - e).norm()));
        match best {
            Some(k) => {
                used[k] = true;
                worst = worst.max((got[k] - e).norm());
            }
            None => return f64::INFINITY,
        }
    }
    if used.iter().all(|&u| u) {
        worst
    } else {
        f64::INFINITY
    }
}

fn criterion5() -> Result<Vec<Measure>> {
    let params = JCParams::new(OMEGA0, MICRO_RABI)?;
    let ohmic = BathSpec::new(
        0.0,
        Spectrum::Ohmic {
            alpha: 0.1,
            cutoff: 2.0,
        },
    )?;
    let gamma = gamma_for(MICRO_RABI);
    let cases = [
        (
            "ohmic",
            rate(OMEGA0 - MICRO_RABI, &ohmic)?,
            rate(OMEGA0 + MICRO_RABI, &ohmic)?,
        ),
        ("ga=gb", gamma, gamma),
    ];
    let mut out = Vec::new();
    for (tag, ga, gb) in cases {
        let l = single_excitation_generator(&params, ga, gb)?;
        let basis = damping_basis(&l)?;
        let err = match_spectra(&single_excitation_eigenvalues(&params, ga, gb), &basis.eigenvalues());
        out.push(below(format!("{tag} eigenvalue error"), err, 1e-10));
        out.push(below(
            format!("{tag} biorthonormality"),
            basis.biorthonormality_residual(),
            1e-10,
        ));
    }
    Ok(out)
}

/// Excitation manifold of each eigenbasis vector, the cutoff state getting
/// its own.
fn manifold(label: DressedLabel, n_max: usize) -> usize {
    match label {
        DressedLabel::Ground => 0,
        DressedLabel::Manifold { n, .. } => n,
        DressedLabel::Cutoff => n_max + 1,
    }
}

/// Largest difference between the dressed-approximation and microscopic
/// generators over dressed populations and intra-manifold coherences.
pub fn dressed_equivalence_gap(params: &JCParams, n_max: usize, gamma: f64) -> Result<f64> {
    let space = build_space(n_max);
    let bath = BathSpec::flat(gamma, 0.0)?;
    let micro = microscopic_generator(params, &space, &bath, params.freq_tol())?;
    let dressed = dressed_approx_generator(params, &space, gamma, 0.0)?;
    let basis = eigenbasis(params, &space);
    let d = space.dim();
    let v = faer::Mat::from_fn(d, d, |i, k| basis[k].coefficients[i]);
    let (a, b) = (micro.in_basis(v.as_ref())?, dressed.in_basis(v.as_ref())?);
    let m: Vec<usize> = basis.iter().map(|s| manifold(s.label, n_max)).collect();
    let keep: Vec<usize> = (0..d * d).filter(|&k| m[k % d] == m[k / d]).collect();
    let mut worst = 0.0f64;
    for &r in &keep {
        for &c in &keep {
            worst = worst.max((a.mat()[(r, c)] - b.mat()[(r, c)]).norm());
        }
    }
    Ok(worst)
}

fn criterion6() -> Result<Vec<Measure>> {
    let params = JCParams::new(OMEGA0, MICRO_RABI)?;
    Ok(vec![below(
        "max |dressed - micro| (n_max = 4)",
        dressed_equivalence_gap(&params, 4, gamma_for(MICRO_RABI))?,
        1e-12,
    )])
}

fn criterion7() -> Result<Vec<Measure>> {
    let params = JCParams::new(1.0, 0.2)?;
    let space = build_space(20);
    let t = 0.25;
    let gamma0 = 0.02;
    let bath = BathSpec::flat(gamma0, t)?;
    let micro = steady_state(&microscopic_generator(
        &params,
        &space,
        &bath,
        params.freq_tol(),
    )?)?;
    let phen = steady_state(&phenomenological_generator(
        &params,
        &space,
        gamma0,
        occupation(params.omega0(), t)?,
    )?)?;
    let jc = gibbs_state(&hamiltonian(&params, &space), t)?;
    let free = gibbs_state(&free_hamiltonian(&params, &space), t)?;
    Ok(vec![
        below(
            "D(micro, Gibbs H_JC)",
            trace_distance(micro.operator(), jc.operator())?,
            1e-6,
        ),
        below(
            "D(phen, Gibbs H_free)",
            trace_distance(phen.operator(), free.operator())?,
            1e-6,
        ),
        Measure {
            label: "D(Gibbs H_JC, Gibbs H_free)".into(),
            value: trace_distance(jc.operator(), free.operator())?,
            bound: Bound::Above(1e-3),
        },
        below(
            "top-level Gibbs population",
            gibbs_tail_mass(&jc, &space).max(gibbs_tail_mass(&free, &space)),
            1e-10,
        ),
    ])
}

/// `omega` values log-spaced over `[0.01, 5]`.
pub fn kms_frequencies() -> Vec<f64> {
    (0..100)
        .map(|k| 0.01 * 500f64.powf(k as f64 / 99.0))
        .collect()
}

fn criterion8() -> Result<Vec<Measure>> {
    let spectra = [
        Spectrum::Flat { gamma0: 0.1 },
        Spectrum::Ohmic {
            alpha: 0.1,
            cutoff: 2.0,
        },
        Spectrum::Lorentzian {
            gamma0: 0.1,
            center: 1.0,
            halfwidth: 0.3,
        },
    ];
    let mut out = Vec::new();
    for t in [OMEGA0 / 10.0, OMEGA0] {
        let mut worst = 0.0f64;
        for spectrum in spectra {
            let bath = BathSpec::new(t, spectrum)?;
            for w in kms_frequencies() {
                let expected = (-w / t).exp() * rate(w, &bath)?;
                worst = worst.max((rate(-w, &bath)? - expected).abs() / expected);
            }
        }
        out.push(below(
            format!("max relative KMS error at T = {t}"),
            worst,
            1e-12,
        ));
    }
    Ok(out)
}

fn criterion9(trajs: &[Trajectory]) -> Result<Vec<Measure>> {
    let (mut tr, mut herm, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    for t in trajs {
        for series in [&t.spectral, &t.ode] {
            for rho in series.states() {
                let d = diagnostics(rho.operator())?;
                tr = tr.max(d.trace_defect);
                herm = herm.max(d.herm_defect);
                min_eig = min_eig.min(d.min_eigenvalue);
            }
        }
    }
    Ok(vec![
        below("max |Tr rho - 1|", tr, 1e-10),
        below("max hermiticity defect", herm, 1e-12),
        below("-min eigenvalue", -min_eig, 1e-10),
    ])
}

fn criterion10(trajs: &[Trajectory]) -> Result<Vec<Measure>> {
    trajs
        .iter()
        .map(|t| Ok(below(t.name, t.spectral.max_entrywise_diff(&t.ode)?, 1e-8)))
        .collect()
}

/// Runs all ten criteria. `scale` multiplies every upper tolerance.
pub fn run_criteria(scale: f64) -> Vec<CriterionReport> {
    let trajs = trajectories();
    let with = |f: fn(&[Trajectory]) -> Result<Vec<Measure>>| -> Result<Vec<Measure>> {
        match &trajs {
            Ok(t) => f(t),
            Err(e) => Err(Error::Numerical(format!("trajectories failed: {e}"))),
        }
    };
    vec![
        report(1, "microscopic Rabi decay", scale, with(criterion1)),
        report(2, "phenomenological closed forms", scale, with(criterion2)),
        report(3, "oscillation signature", scale, with(criterion3)),
        report(4, "frequency shift", scale, criterion4()),
        report(5, "damping-basis spectrum", scale, criterion5()),
        report(6, "generator equivalence", scale, criterion6()),
        report(7, "steady states", scale, criterion7()),
        report(8, "KMS detailed balance", scale, criterion8()),
        report(9, "physicality along trajectories", scale, with(criterion9)),
        report(10, "cross-method agreement", scale, with(criterion10)),
    ]
}
