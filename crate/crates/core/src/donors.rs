//! Constants of the group-V donors in silicon.

use serde::Serialize;

use crate::quantum::{quadrupole_strength, DonorSpec};
use crate::spinops::SpinQuantumNumber;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DonorPreset {
    pub name: &'static str,
    pub two_i: i64,
    /// Ground 1s binding energy, meV.
    pub binding_energy_mev: f64,
    /// Hyperfine constant, Hz.
    pub hyperfine_a: f64,
    /// Nuclear gyromagnetic ratio, Hz/T.
    pub gamma_n: f64,
    /// Reported range of the nuclear quadrupole moment, m². `None` for
    /// spin 1/2; a single reported value gives equal bounds.
    pub qn_range: Option<(f64, f64)>,
}

pub const PRESETS: [DonorPreset; 5] = [
    DonorPreset {
        name: "P31",
        two_i: 1,
        binding_energy_mev: 45.59,
        hyperfine_a: 117.53e6,
        gamma_n: 17.26e6,
        qn_range: None,
    },
    DonorPreset {
        name: "As75",
        two_i: 3,
        binding_energy_mev: 53.76,
        hyperfine_a: 198.35e6,
        gamma_n: 7.31e6,
        qn_range: Some((0.314e-28, 0.314e-28)),
    },
    DonorPreset {
        name: "Sb121",
        two_i: 5,
        binding_energy_mev: 42.74,
        hyperfine_a: 186.80e6,
        gamma_n: 10.26e6,
        qn_range: Some((-0.36e-28, -0.54e-28)),
    },
    DonorPreset {
        name: "Sb123",
        two_i: 7,
        binding_energy_mev: 42.74,
        hyperfine_a: 101.52e6,
        gamma_n: 5.55e6,
        qn_range: Some((-0.49e-28, -0.69e-28)),
    },
    DonorPreset {
        name: "Bi209",
        two_i: 9,
        binding_energy_mev: 70.98,
        hyperfine_a: 1475.4e6,
        gamma_n: 6.96e6,
        qn_range: Some((-0.37e-28, -0.77e-28)),
    },
];

/// Look up a preset by name (`P31`, `As75`, `Sb121`, `Sb123`, `Bi209`),
/// ignoring ASCII case.
pub fn donor_preset(name: &str) -> Result<DonorPreset> {
    PRESETS
        .iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .copied()
        .ok_or_else(|| Error::UnknownDonor(name.to_string()))
}

impl DonorPreset {
    pub fn spin(&self) -> SpinQuantumNumber {
        SpinQuantumNumber::new(self.two_i).expect("preset spins are valid")
    }

    /// Ionized donor in the canonical geometry with no quadrupole and no drive.
    pub fn ionized_spec(&self, b0: f64) -> DonorSpec {
        DonorSpec::canonical(self.spin(), self.gamma_n, b0, 0.0, 0.0, 0.0)
    }

    /// Neutral donor: the ionized spec with the hyperfine constant filled in.
    pub fn neutral_spec(&self, b0: f64) -> DonorSpec {
        let mut spec = self.ionized_spec(b0);
        spec.hyperfine_a = self.hyperfine_a;
        spec
    }

    /// Quadrupole strengths (Hz) at both ends of the reported `Qn` range.
    pub fn quadrupole_range(&self, vzz: f64, gamma_s: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.qn_range.ok_or(Error::NoQuadrupoleMoment)?;
        Ok((
            quadrupole_strength(lo, vzz, gamma_s, self.spin())?,
            quadrupole_strength(hi, vzz, gamma_s, self.spin())?,
        ))
    }
}
