use jcloss::analytic::{
    bell_micro, bell_phen, rabi_micro, rabi_micro_density, rabi_phen, Populations,
};
use jcloss::bath::{rate, BathSpec, Spectrum};
use jcloss::cli::{InitialState, Scenario};
use jcloss::generators::{
    microscopic_generator, phenomenological_generator, single_excitation_generator,
};
use jcloss::hilbert::{build_space, Atom};
use jcloss::jcmodel::{Branch, JCParams};
use jcloss::observables::Observable;
use jcloss::solver::{evolve_spectral, linspace, TimeSeries};
use jcloss::verify::{
    exponential_fit_residual, phen_rabi_frequency, scenario_config, trajectories,
};

fn populations(series: &TimeSeries) -> Vec<Populations> {
    series
        .states()
        .iter()
        .map(|r| Populations {
            p0g: Observable::Pop0g.evaluate(r.operator()).unwrap(),
            p1g: Observable::Pop1g.evaluate(r.operator()).unwrap(),
            pg: Observable::AtomicGround.evaluate(r.operator()).unwrap(),
        })
        .collect()
}

fn max_dev(series: &TimeSeries, oracle: impl Fn(f64) -> Populations) -> f64 {
    populations(series)
        .iter()
        .zip(series.times())
        .map(|(p, &t)| {
            let e = oracle(t);
            (p.p0g - e.p0g)
                .abs()
                .max((p.p1g - e.p1g).abs())
                .max((p.pg - e.pg).abs())
        })
        .fold(0.0, f64::max)
}

fn ohmic() -> BathSpec {
    BathSpec::new(
        0.0,
        Spectrum::Ohmic {
            alpha: 0.05,
            cutoff: 2.0,
        },
    )
    .unwrap()
}

#[test]
fn micro_rabi_oracle_with_unequal_rates() {
    let params = JCParams::new(1.0, 0.2).unwrap();
    let bath = ohmic();
    let (ga, gb) = (rate(0.8, &bath).unwrap(), rate(1.2, &bath).unwrap());
    assert!((ga - gb).abs() > 1e-3);
    let space = build_space(2);
    let l = microscopic_generator(&params, &space, &bath, params.freq_tol()).unwrap();
    let rho0 = InitialState::Fock(0, Atom::Excited)
        .density(&space)
        .unwrap();
    let series = evolve_spectral(&l, &rho0, &linspace(400.0, 500)).unwrap();
    assert!(max_dev(&series, |t| rabi_micro(t, ga, gb, 0.2).unwrap()) < 1e-8);
}

#[test]
fn micro_bell_oracle() {
    let params = JCParams::new(1.0, 0.2).unwrap();
    let bath = ohmic();
    let gb = rate(1.2, &bath).unwrap();
    let space = build_space(3);
    let l = microscopic_generator(&params, &space, &bath, params.freq_tol()).unwrap();
    let rho0 = InitialState::Dressed(1, Branch::Plus)
        .density(&space)
        .unwrap();
    let series = evolve_spectral(&l, &rho0, &linspace(400.0, 500)).unwrap();
    assert!(max_dev(&series, |t| bell_micro(t, gb).unwrap()) < 1e-8);
}

#[test]
fn phen_oracles_in_overdamped_regime() {
    let params = JCParams::new(1.0, 0.2).unwrap();
    let gamma = 1.2;
    let times = linspace(30.0, 300);
    for (initial, n_max) in [
        (InitialState::Fock(0, Atom::Excited), 2),
        (InitialState::Dressed(1, Branch::Plus), 3),
    ] {
        let space = build_space(n_max);
        let l = phenomenological_generator(&params, &space, gamma, 0.0).unwrap();
        let series = evolve_spectral(&l, &initial.density(&space).unwrap(), &times).unwrap();
        let dev = match initial {
            InitialState::Fock(..) => max_dev(&series, |t| rabi_phen(t, gamma, 0.2).unwrap()),
            _ => max_dev(&series, |t| bell_phen(t, gamma, 0.2).unwrap()),
        };
        assert!(dev < 1e-8, "{initial}: {dev:e}");
    }
}

#[test]
fn single_excitation_density_oracle() {
    let params = JCParams::new(1.0, 0.2).unwrap();
    let (ga, gb) = (0.03, 0.05);
    let l = single_excitation_generator(&params, ga, gb).unwrap();
    let rho0 = rabi_micro_density(0.0, ga, gb, &params).unwrap();
    let times = linspace(200.0, 101);
    let series = evolve_spectral(&l, &rho0, &times).unwrap();
    for (rho, &t) in series.states().iter().zip(&times) {
        let expected = rabi_micro_density(t, ga, gb, &params).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (rho.get(i, j) - expected.get(i, j)).norm() < 1e-10,
                    "t = {t}"
                );
            }
        }
    }
}

#[test]
fn phen_fit_residual_is_frozen() {
    let s = Scenario::from_config(&scenario_config("phen", "fock:0,e", 2)).unwrap();
    let series = s.solve(&s.generator().unwrap()).unwrap();
    let p0: Vec<f64> = populations(&series).iter().map(|p| p.p0g).collect();
    let r = exponential_fit_residual(series.times(), &p0).unwrap();
    assert!((r - 0.04432517859578483).abs() < 1e-9, "{r}");
}

#[test]
fn frequency_shift_slope_is_frozen() {
    let rabi = 0.5;
    let pts: Vec<(f64, f64)> = [0.02, 0.05, 0.1]
        .iter()
        .map(|&r| {
            let f = phen_rabi_frequency(2.0 * rabi * r).unwrap();
            (f64::ln(r), f64::ln((2.0 * rabi - f) / (2.0 * rabi)))
        })
        .collect();
    let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
    assert!((slope - 2.0).abs() < 1e-3, "{slope}");
}

#[test]
fn bell_populations_differ_between_models() {
    let trajs = trajectories().unwrap();
    let (micro, phen) = (
        populations(&trajs[2].spectral),
        populations(&trajs[3].spectral),
    );
    let gap = micro
        .iter()
        .zip(&phen)
        .map(|(a, b)| (a.pg - b.pg).abs())
        .fold(0.0, f64::max);
    assert!(gap > 1e-2, "{gap}");
    assert!(micro.iter().all(|p| p.p1g <= 0.5 + 1e-12));
}
