//! Named collections of states, two-state vectors, measurements and mixtures
//! stored in a single JSON document.
//!
//! ```json
//! {
//!   "states": [{"name": "ket0", "state": {"dim": 2, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]}}],
//!   "vectors": [{"name": "ex1", "vector": {"dim": 2, "matrix": [...]}}],
//!   "measurements": [{"name": "pm", "measurement": {"dim": 2, "projectors": [...]}}],
//!   "mixtures": [{"name": "mix", "components": [{"weight": 0.5, "vector": "ex1"}]}]
//! }
//! ```
//!
//! Names are unique across the whole document. Mixture components refer to
//! entries of `vectors` by name. [`Workspace::to_json`] is canonical: parsing
//! its output and writing it again reproduces the same bytes.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::distinguish::{example3_family, Mixture};
use crate::error::{Error, Result};
use crate::linalg::{real, I, ONE, ZERO};
use crate::measurement::{measurement_from_basis_grouping, Measurement};
use crate::twin::{StateVector, TwoStateVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub name: String,
    pub state: StateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorEntry {
    pub name: String,
    pub vector: TwoStateVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementEntry {
    pub name: String,
    pub measurement: Measurement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRef {
    pub weight: f64,
    pub vector: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureEntry {
    pub name: String,
    pub components: Vec<ComponentRef>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Workspace {
    #[serde(default)]
    pub states: Vec<StateEntry>,
    #[serde(default)]
    pub vectors: Vec<VectorEntry>,
    #[serde(default)]
    pub measurements: Vec<MeasurementEntry>,
    #[serde(default)]
    pub mixtures: Vec<MixtureEntry>,
}

fn lookup<'a, T>(
    items: &'a [T],
    name: &str,
    kind: &str,
    key: impl Fn(&T) -> &str,
) -> Result<&'a T> {
    items
        .iter()
        .find(|e| key(e) == name)
        .ok_or_else(|| Error::Workspace(format!("no {kind} named '{name}'")))
}

impl Workspace {
    /// Parses and validates a workspace document.
    pub fn from_json(text: &str) -> Result<Self> {
        let ws: Workspace =
            serde_json::from_str(text).map_err(|e| Error::Workspace(e.to_string()))?;
        ws.validate()?;
        Ok(ws)
    }

    /// Canonical pretty-printed form with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("workspace serializes");
        s.push('\n');
        s
    }

    /// Checks name uniqueness and that every mixture resolves to a valid
    /// mixture of equal-dimension vectors. Entry-level invariants are
    /// enforced when the entries are constructed.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        let names = self
            .states
            .iter()
            .map(|e| &e.name)
            .chain(self.vectors.iter().map(|e| &e.name))
            .chain(self.measurements.iter().map(|e| &e.name))
            .chain(self.mixtures.iter().map(|e| &e.name));
        for name in names {
            if name.is_empty() {
                return Err(Error::Workspace("empty name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Workspace(format!("duplicate name '{name}'")));
            }
        }
        for e in &self.mixtures {
            self.mixture(&e.name)
                .map_err(|err| Error::Workspace(format!("mixture '{}': {err}", e.name)))?;
        }
        Ok(())
    }

    pub fn state(&self, name: &str) -> Result<&StateVector> {
        lookup(&self.states, name, "state", |e| &e.name).map(|e| &e.state)
    }

    pub fn vector(&self, name: &str) -> Result<&TwoStateVector> {
        lookup(&self.vectors, name, "vector", |e| &e.name).map(|e| &e.vector)
    }

    pub fn measurement(&self, name: &str) -> Result<&Measurement> {
        lookup(&self.measurements, name, "measurement", |e| &e.name).map(|e| &e.measurement)
    }

    pub fn mixture(&self, name: &str) -> Result<Mixture> {
        let entry = lookup(&self.mixtures, name, "mixture", |e| &e.name)?;
        let components = entry
            .components
            .iter()
            .map(|c| Ok((c.weight, self.vector(&c.vector)?.clone())))
            .collect::<Result<Vec<_>>>()?;
        Mixture::new(components)
    }

    /// A mixture by name, or else a vector by name as a one-point mixture.
    pub fn ensemble(&self, name: &str) -> Result<Mixture> {
        if self.mixtures.iter().any(|e| e.name == name) {
            return self.mixture(name);
        }
        match self.vector(name) {
            Ok(v) => Ok(Mixture::point(v.clone())),
            Err(_) => Err(Error::Workspace(format!(
                "no mixture or vector named '{name}'"
            ))),
        }
    }

    pub fn add_state(&mut self, name: &str, state: StateVector) -> &mut Self {
        self.states.push(StateEntry {
            name: name.into(),
            state,
        });
        self
    }

    pub fn add_vector(&mut self, name: &str, vector: TwoStateVector) -> &mut Self {
        self.vectors.push(VectorEntry {
            name: name.into(),
            vector,
        });
        self
    }

    pub fn add_measurement(&mut self, name: &str, measurement: Measurement) -> &mut Self {
        self.measurements.push(MeasurementEntry {
            name: name.into(),
            measurement,
        });
        self
    }

    pub fn add_mixture(&mut self, name: &str, components: &[(f64, &str)]) -> &mut Self {
        self.mixtures.push(MixtureEntry {
            name: name.into(),
            components: components
                .iter()
                .map(|&(weight, v)| ComponentRef {
                    weight,
                    vector: v.into(),
                })
                .collect(),
        });
        self
    }

    /// Every state, vector and measurement used by the three worked examples.
    pub fn bundled() -> Self {
        let unit = |a| StateVector::unit(a).expect("nonzero");
        let ket0 = StateVector::basis(2, 0).expect("in range");
        let ket1 = StateVector::basis(2, 1).expect("in range");
        let plus = unit(vec![ONE, ONE]);
        let minus = unit(vec![ONE, -ONE]);
        let plus_i = unit(vec![ONE, I]);
        let minus_i = unit(vec![ONE, -I]);
        let basis = |a: &StateVector, b: &StateVector| {
            measurement_from_basis_grouping(
                &[a.clone(), b.clone()],
                &[vec![0], vec![1]],
                crate::DEFAULT_TOL,
            )
            .expect("orthonormal")
        };
        let sep = |a: &StateVector, b: &StateVector| {
            TwoStateVector::separable(a, b).expect("unit factors")
        };
        let h = real(std::f64::consts::FRAC_1_SQRT_2);
        let t = real(1.0 / 3f64.sqrt());

        let mut ws = Workspace::default();
        ws.add_state("ket0", ket0.clone())
            .add_state("ket1", ket1.clone())
            .add_state("plus", plus.clone())
            .add_state("minus", minus.clone())
            .add_state("plus_i", plus_i.clone())
            .add_state("minus_i", minus_i.clone());
        ws.add_vector("ex1", sep(&ket0, &ket1))
            .add_vector("ex2", TwoStateVector::diagonal(&[h, h]).expect("nonzero"))
            .add_vector(
                "ex3",
                TwoStateVector::diagonal(&[t, t, -t]).expect("nonzero"),
            )
            .add_vector("zero_zero", sep(&ket0, &ket0))
            .add_vector("one_one", sep(&ket1, &ket1))
            .add_vector(
                "antisym",
                TwoStateVector::from_rows(&[vec![ZERO, h], vec![-h, ZERO]]).expect("square"),
            );
        ws.add_measurement("computational", basis(&ket0, &ket1))
            .add_measurement("pm", basis(&plus, &minus))
            .add_measurement("pm_i", basis(&plus_i, &minus_i))
            .add_measurement("identity2", Measurement::identity(2).expect("valid"));
        for (i, m) in example3_family().into_iter().enumerate() {
            ws.add_measurement(&format!("ex3_m{}", i + 1), m);
        }
        ws.add_measurement("identity3", Measurement::identity(3).expect("valid"));
        ws.add_mixture("ex1_mix", &[(0.5, "zero_zero"), (0.5, "one_one")]);
        ws
    }
}
