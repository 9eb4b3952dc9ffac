//! Closed-form single-excitation populations.
//!
//! Two initial states are covered: `|0,e>` ("rabi") and `|E_{1,+}>` ("bell"),
//! each under the microscopic generator (rates `gamma_a = gamma(w0 - Omega)`
//! and `gamma_b = gamma(w0 + Omega)`) and the phenomenological one (cavity
//! rate `gamma`). The phenomenological forms are written with the principal
//! square root `s = sqrt(gamma^2 - 16 Omega^2)`, complex when `gamma < 4 Omega`.

use faer::c64;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, Operator, Tolerances};
use crate::jcmodel::JCParams;

/// Populations of `|0,g>`, `|1,g>` and of the atomic ground state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Populations {
    pub p0g: f64,
    pub p1g: f64,
    pub pg: f64,
}

const IMAG_TOL: f64 = 1e-12;

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t = {t} must be >= 0")))
    }
}

fn check_rate(name: &str, g: f64) -> Result<()> {
    if g >= 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} = {g} must be >= 0"
        )))
    }
}

fn real(z: c64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * z.re.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "{what} has imaginary residue {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `|0,e>` under the microscopic generator.
pub fn rabi_micro(t: f64, gamma_a: f64, gamma_b: f64, rabi: f64) -> Result<Populations> {
    check_time(t)?;
    check_rate("gamma_a", gamma_a)?;
    check_rate("gamma_b", gamma_b)?;
    let ea = (-gamma_a * t / 2.0).exp();
    let eb = (-gamma_b * t / 2.0).exp();
    let p0g = 1.0 - 0.5 * ea - 0.5 * eb;
    let decay = c64::new(-(gamma_a + gamma_b) / 4.0, 0.0);
    let up = ((decay + c64::new(0.0, 2.0 * rabi)) * t).exp();
    let down = ((decay - c64::new(0.0, 2.0 * rabi)) * t).exp();
    let p1g_c = (c64::new(ea + eb, 0.0) - up - down) * 0.25;
    debug_assert!(p1g_c.im.abs() < 1e-15);
    let p1g = p1g_c.re;
    Ok(Populations {
        p0g,
        p1g,
        pg: p0g + p1g,
    })
}

// Shared ingredients of the phenomenological forms.
struct Phen {
    d: f64,
    s: c64,
    slow: f64,
    plus: c64,
    minus: c64,
}

fn phen_terms(t: f64, gamma: f64, rabi: f64) -> Result<Phen> {
    check_time(t)?;
    check_rate("gamma", gamma)?;
    if !(rabi > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rabi = {rabi} must be > 0"
        )));
    }
    let d = 16.0 * rabi * rabi - gamma * gamma;
    if d.abs() <= 1e-9 * 16.0 * rabi * rabi {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} is at the critical value 4 Omega = {}",
            4.0 * rabi
        )));
    }
    let s = c64::new(gamma * gamma - 16.0 * rabi * rabi, 0.0).sqrt();
    let g = c64::new(-gamma, 0.0);
    Ok(Phen {
        d,
        s,
        slow: (-gamma * t / 2.0).exp(),
        plus: ((g + s) * (t / 2.0)).exp(),
        minus: ((g - s) * (t / 2.0)).exp(),
    })
}

/// `|0,e>` under the phenomenological generator.
pub fn rabi_phen(t: f64, gamma: f64, rabi: f64) -> Result<Populations> {
    let Phen {
        d,
        s,
        slow,
        plus,
        minus,
    } = phen_terms(t, gamma, rabi)?;
    let w2 = 16.0 * rabi * rabi;
    let g2 = c64::new(gamma * gamma, 0.0);
    let p0g = c64::new(1.0 - w2 / d * slow, 0.0)
        + (g2 + s * gamma) / (2.0 * d) * plus
        + (g2 - s * gamma) / (2.0 * d) * minus;
    let p1g = c64::new(8.0 * rabi * rabi / d * slow, 0.0)
        - c64::new(w2 / (4.0 * d), 0.0) * plus
        - c64::new(w2 / (4.0 * d), 0.0) * minus;
    let pg = c64::new(1.0 - 8.0 * rabi * rabi / d * slow, 0.0)
        + (g2 * 2.0 + s * (2.0 * gamma) - w2) / (4.0 * d) * plus
        + (g2 * 2.0 - s * (2.0 * gamma) - w2) / (4.0 * d) * minus;
    Ok(Populations {
        p0g: real(p0g, "P_0g")?,
        p1g: real(p1g, "P_1g")?,
        pg: real(pg, "P_g")?,
    })
}

/// `|E_{1,+}>` under the microscopic generator.
pub fn bell_micro(t: f64, gamma_b: f64) -> Result<Populations> {
    check_time(t)?;
    check_rate("gamma_b", gamma_b)?;
    let eb = (-gamma_b * t / 2.0).exp();
    Ok(Populations {
        p0g: 1.0 - eb,
        p1g: 0.5 * eb,
        pg: 1.0 - 0.5 * eb,
    })
}

/// `|E_{1,+}>` under the phenomenological generator.
pub fn bell_phen(t: f64, gamma: f64, rabi: f64) -> Result<Populations> {
    let Phen {
        d,
        s,
        slow,
        plus,
        minus,
    } = phen_terms(t, gamma, rabi)?;
    let w2 = 16.0 * rabi * rabi;
    let g2 = c64::new(gamma * gamma, 0.0);
    let p0g = c64::new(1.0 - w2 / d * slow, 0.0) + g2 / (2.0 * d) * plus + g2 / (2.0 * d) * minus;
    let p1g = c64::new(8.0 * rabi * rabi / d * slow, 0.0)
        - (g2 - s * gamma) / (4.0 * d) * plus
        - (g2 + s * gamma) / (4.0 * d) * minus;
    let pg = c64::new(1.0 - 8.0 * rabi * rabi / d * slow, 0.0)
        + (g2 + s * gamma) / (4.0 * d) * plus
        + (g2 - s * gamma) / (4.0 * d) * minus;
    Ok(Populations {
        p0g: real(p0g, "P_0g")?,
        p1g: real(p1g, "P_1g")?,
        pg: real(pg, "P_g")?,
    })
}

/// State at time `t` from `|0,e>` under the microscopic generator, in the
/// basis `{|E0>, |E1->, |E1+>}`.
pub fn rabi_micro_density(
    t: f64,
    gamma_a: f64,
    gamma_b: f64,
    params: &JCParams,
) -> Result<DensityMatrix> {
    check_time(t)?;
    check_rate("gamma_a", gamma_a)?;
    check_rate("gamma_b", gamma_b)?;
    let ea = (-gamma_a * t / 2.0).exp();
    let eb = (-gamma_b * t / 2.0).exp();
    let mut rho = Operator::diagonal(&[1.0 - 0.5 * ea - 0.5 * eb, 0.5 * ea, 0.5 * eb]);
    let coherence = c64::from_polar(
        -0.5 * (-(gamma_a + gamma_b) * t / 4.0).exp(),
        2.0 * params.rabi() * t,
    );
    rho.set(1, 2, coherence);
    rho.set(2, 1, coherence.conj());
    DensityMatrix::new(rho, Tolerances::default())
}
