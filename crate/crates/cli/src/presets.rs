//! Named states, observables and one ready-to-run scenario per kind.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use potent_core::linalg::{gates, Operator, StateVector, C64};

use crate::config::{
    Amp, RawConditional, RawConfig, RawCouplings, RawMeter, RawObservable, RawSelection, RawState, RawTimeMachine,
    ScenarioKind,
};

pub const STATE_NAMES: [&str; 8] = [
    "zero",
    "one",
    "plus",
    "minus",
    "plus-i",
    "minus-i",
    "amplification-psi",
    "amplification-phi",
];
pub const OBSERVABLE_NAMES: [&str; 3] = ["sigma_x", "sigma_y", "sigma_z"];
pub const SELECTION_NAMES: [&str; 1] = ["amplification"];

pub fn state(name: &str) -> Option<StateVector> {
    let h = FRAC_1_SQRT_2;
    let s3 = 3f64.sqrt() / 2.0;
    let amps = match name {
        "zero" => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        "one" => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        "plus" => [C64::new(h, 0.0), C64::new(h, 0.0)],
        "minus" => [C64::new(h, 0.0), C64::new(-h, 0.0)],
        "plus-i" => [C64::new(h, 0.0), C64::new(0.0, h)],
        "minus-i" => [C64::new(h, 0.0), C64::new(0.0, -h)],
        "amplification-psi" => [C64::new(s3, 0.0), C64::new(0.5, 0.0)],
        "amplification-phi" => [C64::new(s3, 0.0), C64::new(-0.5, 0.0)],
        _ => return None,
    };
    StateVector::new(amps.to_vec()).ok()
}

pub fn observable(name: &str) -> Option<Operator> {
    match name {
        "sigma_x" => Some(gates::pauli_x()),
        "sigma_y" => Some(gates::pauli_y()),
        "sigma_z" => Some(gates::pauli_z()),
        _ => None,
    }
}

pub fn selection(name: &str) -> Option<(StateVector, StateVector)> {
    match name {
        "amplification" => Some((state("amplification-psi")?, state("amplification-phi")?)),
        _ => None,
    }
}

fn base(kind: ScenarioKind) -> RawConfig {
    RawConfig {
        kind,
        name: None,
        seed: Some(1),
        g: None,
        observable: None,
        selection: None,
        meter: None,
        conditional: None,
        time_machine: None,
        sweep: None,
        output: None,
    }
}

fn amplification() -> Option<RawSelection> {
    Some(RawSelection {
        preset: Some("amplification".into()),
        ..RawSelection::default()
    })
}

fn sigma(name: &str) -> Option<RawObservable> {
    Some(RawObservable::Preset(name.into()))
}

fn qubit_meter() -> Option<RawMeter> {
    Some(RawMeter::Qubit {
        alpha: Some(Amp::Real(0.6)),
        beta: Some(Amp::Complex([0.0, 0.8])),
    })
}

/// The preset scenario for `kind`, as a document that round-trips through TOML.
pub fn template(kind: ScenarioKind) -> RawConfig {
    use ScenarioKind::*;
    let mut c = base(kind);
    match kind {
        WeakValue | PointerShift => {
            c.g = Some(RawCouplings::List(vec![0.2, 0.1, 0.05, 0.025]));
            c.observable = sigma("sigma_z");
            c.selection = amplification();
            c.meter = Some(RawMeter::Gaussian {
                grid_size: Some(512),
                x_min: Some(-12.0),
                x_max: Some(12.0),
                sigma: Some(1.0),
                x0: Some(0.0),
            });
        }
        ModularValue => {
            c.g = Some(RawCouplings::List(vec![FRAC_PI_2, 0.1, 0.05, 0.025]));
            c.observable = sigma("sigma_z");
            c.selection = amplification();
        }
        PotentValues | PotentOperator | Completeness => {
            c.g = Some(RawCouplings::List(vec![0.3, FRAC_PI_2, 2.5]));
            c.observable = sigma("sigma_z");
            c.selection = amplification();
            c.meter = qubit_meter();
        }
        Conditional => {
            c.conditional = Some(RawConditional {
                system_dim: 3,
                apparatus_dim: 2,
                instances: 5,
                lambda: 0.7,
            });
        }
        TimeMachine => {
            c.time_machine = Some(RawTimeMachine {
                coefficients: vec![Amp::Real(2.0), Amp::Real(-1.0)],
                durations: vec![1.0, 2.0],
                hamiltonian: RawObservable::Preset("sigma_z".into()),
            });
            c.meter = Some(RawMeter::State {
                amplitudes: RawState::Preset("zero".into()),
                observable: None,
            });
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, validate};

    #[test]
    fn named_states_are_normalized() {
        for name in STATE_NAMES {
            assert!(state(name).unwrap().is_normalized(), "{name}");
        }
        assert!(state("nope").is_none());
    }

    #[test]
    fn every_template_validates() {
        for kind in ScenarioKind::ALL {
            let cfg = validate(&template(kind)).unwrap();
            assert!(cfg.warnings.is_empty(), "{kind}: {:?}", cfg.warnings);
        }
    }

    #[test]
    fn templates_round_trip_through_toml() {
        for kind in ScenarioKind::ALL {
            let raw = template(kind);
            let text = raw.to_toml().unwrap();
            let back: RawConfig = toml::from_str(&text).unwrap();
            assert_eq!(back, raw, "{kind}:\n{text}");
            let a = validate(&raw).unwrap();
            let b = parse_config(&text).unwrap();
            assert_eq!(a.plan(), b.plan(), "{kind}");
            assert_eq!(a, b, "{kind}");
        }
    }
}
