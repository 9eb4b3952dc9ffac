//! Thermal reservoir: spectral densities, Bose occupation and the
//! detailed-balance rate function `gamma(omega)`.

use crate::error::{Error, Result};

/// Spectral density `J(omega)` for `omega > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Spectrum {
    /// White noise, `J = gamma0`.
    Flat { gamma0: f64 },
    /// `J = alpha * omega * exp(-omega / cutoff)`
    Ohmic { alpha: f64, cutoff: f64 },
    /// `J = gamma0 * L^2 / ((omega - center)^2 + L^2)` with half width `L`.
    Lorentzian {
        gamma0: f64,
        center: f64,
        halfwidth: f64,
    },
}

impl Spectrum {
    pub fn density(&self, omega: f64) -> f64 {
        match *self {
            Spectrum::Flat { gamma0 } => gamma0,
            Spectrum::Ohmic { alpha, cutoff } => alpha * omega * (-omega / cutoff).exp(),
            Spectrum::Lorentzian {
                gamma0,
                center,
                halfwidth,
            } => {
                let w2 = halfwidth * halfwidth;
                gamma0 * w2 / ((omega - center).powi(2) + w2)
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Spectrum::Flat { .. } => "flat",
            Spectrum::Ohmic { .. } => "ohmic",
            Spectrum::Lorentzian { .. } => "lorentzian",
        }
    }

    fn validate(&self) -> Result<()> {
        // amplitudes may vanish (closed system); shape parameters may not
        let amplitude = |name: &str, x: f64| {
            if x >= 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} = {x} must be >= 0"
                )))
            }
        };
        let shape = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {x} must be > 0")))
            }
        };
        match *self {
            Spectrum::Flat { gamma0 } => amplitude("gamma0", gamma0),
            Spectrum::Ohmic { alpha, cutoff } => {
                amplitude("alpha", alpha)?;
                shape("cutoff", cutoff)
            }
            Spectrum::Lorentzian {
                gamma0,
                center,
                halfwidth,
            } => {
                amplitude("gamma0", gamma0)?;
                shape("center", center)?;
                shape("halfwidth", halfwidth)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec {
    temperature: f64,
    spectrum: Spectrum,
}

impl BathSpec {
    pub fn new(temperature: f64, spectrum: Spectrum) -> Result<Self> {
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature = {temperature} must be >= 0"
            )));
        }
        spectrum.validate()?;
        Ok(Self {
            temperature,
            spectrum,
        })
    }

    pub fn flat(gamma0: f64, temperature: f64) -> Result<Self> {
        Self::new(temperature, Spectrum::Flat { gamma0 })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }
}

/// Mean number of thermal quanta `1 / (exp(omega / T) - 1)`, exactly zero at
/// `T = 0`.
pub fn occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "occupation needs omega > 0, got {omega}"
        )));
    }
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "temperature = {temperature} must be >= 0"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// `gamma(omega)`: emission `J(w)(n(w) + 1)` for `omega > 0`, absorption
/// `J(|w|) n(|w|)` for `omega < 0`.
pub fn rate(omega: f64, bath: &BathSpec) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "no rate defined at omega = {omega}"
        )));
    }
    let w = omega.abs();
    let j = bath.spectrum.density(w);
    let n = occupation(w, bath.temperature)?;
    Ok(if omega > 0.0 { j * (n + 1.0) } else { j * n })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occupation_limits() {
        assert_eq!(occupation(1.3, 0.0).unwrap(), 0.0);
        let t = 0.7;
        assert!((occupation(t * 2f64.ln(), t).unwrap() - 1.0).abs() < 1e-14);
        assert!(occupation(0.0, 1.0).is_err());
        assert!(occupation(-1.0, 1.0).is_err());
    }

    #[test]
    fn occupation_small_argument() {
        // n = T/w - 1/2 + w/(12 T) - (w/T)^3/720 + ...
        let x: f64 = 1e-6;
        let series = 1.0 / x - 0.5 + x / 12.0 - x.powi(3) / 720.0;
        let n = occupation(x, 1.0).unwrap();
        assert!(((n - series) / (1.0 / x)).abs() < 1e-12);
        assert!(((n - 1e6) / 1e6).abs() < 1e-6);
    }

    #[test]
    fn occupation_monotonicity() {
        let temps = [0.05, 0.1, 0.3, 1.0, 4.0];
        let omegas = [0.1, 0.5, 1.0, 2.0, 5.0];
        for w in omegas {
            for pair in temps.windows(2) {
                assert!(occupation(w, pair[0]).unwrap() < occupation(w, pair[1]).unwrap());
            }
        }
        for t in temps {
            for pair in omegas.windows(2) {
                assert!(occupation(pair[0], t).unwrap() > occupation(pair[1], t).unwrap());
            }
        }
    }

    #[test]
    fn zero_temperature_flat() {
        let bath = BathSpec::flat(0.2, 0.0).unwrap();
        assert_eq!(rate(1.1, &bath).unwrap(), 0.2);
        assert_eq!(rate(-1.1, &bath).unwrap(), 0.0);
        let (w0, omega) = (1.0, 0.5);
        assert_eq!(
            rate(w0 + omega, &bath).unwrap(),
            rate(w0 - omega, &bath).unwrap()
        );
        for w in [0.01, 0.3, 2.0, 40.0] {
            assert_eq!(rate(w, &bath).unwrap(), 0.2);
        }
    }

    #[test]
    fn kms_ratio_ln2() {
        let t = 0.37;
        let w = t * 2f64.ln();
        for spectrum in [
            Spectrum::Flat { gamma0: 0.2 },
            Spectrum::Ohmic {
                alpha: 0.05,
                cutoff: 3.0,
            },
            Spectrum::Lorentzian {
                gamma0: 0.1,
                center: 1.0,
                halfwidth: 0.3,
            },
        ] {
            let bath = BathSpec::new(t, spectrum).unwrap();
            let ratio = rate(-w, &bath).unwrap() / rate(w, &bath).unwrap();
            assert!((ratio - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let bath = BathSpec::flat(0.2, 0.5).unwrap();
        assert!(rate(0.0, &bath).is_err());
        assert!(BathSpec::flat(-0.1, 0.0).is_err());
        assert!(BathSpec::flat(0.1, -1.0).is_err());
        assert!(BathSpec::new(
            0.0,
            Spectrum::Ohmic {
                alpha: 0.1,
                cutoff: 0.0
            }
        )
        .is_err());
        assert!(BathSpec::new(
            0.0,
            Spectrum::Lorentzian {
                gamma0: 0.1,
                center: 1.0,
                halfwidth: -1.0
            }
        )
        .is_err());
    }
}
