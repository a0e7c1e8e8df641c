//! Rotating-frame Hamiltonian and Lindblad channels of the cavity/emitter system.
//!
//! Units: energies and rates are given in μeV (level energies in eV), times in
//! ps. Everything handed to the integrator is an angular rate in rad/ps.

use crate::error::{Error, Result};
use crate::hilbert::{
    cavity_annihilation, emitter_embedded, number_operator, tensor_embed, annihilation_operator,
    emitter_transition, HilbertDims, Level, Operator, Space,
};

/// Reduced Planck constant in μeV·ps.
pub const HBAR_UEV_PS: f64 = 658.211_956_9;

const UEV_PER_EV: f64 = 1e6;

/// Converts an energy in μeV into an angular frequency in rad/ps.
pub fn to_angular_rate(energy_uev: f64) -> f64 {
    energy_uev / HBAR_UEV_PS
}

fn ev_to_rate(energy_ev: f64) -> f64 {
    to_angular_rate(energy_ev * UEV_PER_EV)
}

/// Physical parameters. Level energies in eV, couplings and rates in μeV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    pub g: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub omega_cav: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_a: f64,
    pub gamma_d1: f64,
    pub gamma_d2: f64,
}

impl SystemParams {
    /// Exciton energy of the reference quantum-dot system.
    pub const OMEGA_1_EV: f64 = 1.3066;
    /// Biexciton binding energy `omega_2 - 2 omega_1`.
    pub const BINDING_EV: f64 = -2.27e-3;

    /// Reference parameter set: g = 100, γ_a = 20, γ₂ = 5, γ₁ = 1 μeV, no
    /// pure dephasing, cavity resonant with the 1 → 2 transition.
    pub fn reference() -> Self {
        let omega_1 = Self::OMEGA_1_EV;
        let omega_2 = 2.0 * omega_1 + Self::BINDING_EV;
        Self {
            g: 100.0,
            omega_1,
            omega_2,
            omega_cav: omega_2 - omega_1,
            gamma_1: 1.0,
            gamma_2: 5.0,
            gamma_a: 20.0,
            gamma_d1: 0.0,
            gamma_d2: 0.0,
        }
    }

    pub fn lossless(self) -> Self {
        Self {
            gamma_1: 0.0,
            gamma_2: 0.0,
            gamma_a: 0.0,
            gamma_d1: 0.0,
            gamma_d2: 0.0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("g", self.g),
            ("gamma_1", self.gamma_1),
            ("gamma_2", self.gamma_2),
            ("gamma_a", self.gamma_a),
            ("gamma_d1", self.gamma_d1),
            ("gamma_d2", self.gamma_d2),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [
            ("omega_1", self.omega_1),
            ("omega_2", self.omega_2),
            ("omega_cav", self.omega_cav),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::param(name, format!("must be a positive energy, got {v}")));
            }
        }
        Ok(())
    }

    pub fn has_dissipation(&self) -> bool {
        [self.gamma_1, self.gamma_2, self.gamma_a, self.gamma_d1, self.gamma_d2]
            .iter()
            .any(|&r| r > 0.0)
    }
}

/// Carrier frequencies (eV) defining the rotating frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameSpec {
    pub control_carrier: f64,
    pub probe_carrier: f64,
}

impl FrameSpec {
    /// Frame resonant with the g → 1 transition and the cavity.
    pub fn resonant(params: &SystemParams) -> Self {
        Self {
            control_carrier: params.omega_1,
            probe_carrier: params.omega_cav,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("control_carrier", self.control_carrier),
            ("probe_carrier", self.probe_carrier),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::param(name, format!("must be a positive frequency, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    /// `|1><2|`
    Decay21,
    /// `|g><1|`
    Decay1g,
    /// `|1><1|`
    Dephasing1,
    /// `|2><2|`
    Dephasing2,
    /// `a`
    CavityLoss,
}

/// A Lindblad channel: dimensionless operator plus rate in μeV.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpOperator {
    pub channel: Channel,
    pub rate: f64,
    pub op: Operator,
}

impl JumpOperator {
    /// `sqrt(rate/ħ) · op`, in (rad/ps)^½.
    pub fn scaled(&self) -> Operator {
        self.op.scale(to_angular_rate(self.rate).sqrt())
    }
}

/// Diagonal drift in the two-carrier rotating frame, in rad/ps.
pub fn build_drift_hamiltonian(
    params: &SystemParams,
    frame: &FrameSpec,
    dims: HilbertDims,
) -> Operator {
    let w1 = ev_to_rate(params.omega_1 - frame.control_carrier);
    let w2 = ev_to_rate(params.omega_2 - frame.control_carrier - frame.probe_carrier);
    let wc = ev_to_rate(params.omega_cav - frame.probe_carrier);
    let p11 = emitter_embedded(Level::One, Level::One, dims);
    let p22 = emitter_embedded(Level::Two, Level::Two, dims);
    let num = number_operator(dims);
    p11.scale(w1)
        .add(&p22.scale(w2))
        .and_then(|h| h.add(&num.scale(wc)))
        .expect("operators share the composite space")
}

/// Jaynes–Cummings coupling `(g/ħ)(σ₁₂ a† + σ₂₁ a)` on the 1 ↔ 2 transition.
pub fn build_coupling(params: &SystemParams, dims: HilbertDims) -> Operator {
    let a = annihilation_operator(dims.n_max()).expect("dims guarantee n_max >= 1");
    let up = tensor_embed(
        Some(&emitter_transition(Level::One, Level::Two)),
        Some(&a.dag()),
        dims,
    )
    .expect("matching dims");
    up.add(&up.dag())
        .expect("same space")
        .scale(to_angular_rate(params.g))
}

/// Lindblad channels with nonzero rate, in fixed order:
/// 2→1 decay, 1→g decay, dephasing of 1, dephasing of 2, cavity loss.
pub fn build_jump_operators(params: &SystemParams, dims: HilbertDims) -> Result<Vec<JumpOperator>> {
    let channels = [
        (Channel::Decay21, "gamma_2", params.gamma_2),
        (Channel::Decay1g, "gamma_1", params.gamma_1),
        (Channel::Dephasing1, "gamma_d1", params.gamma_d1),
        (Channel::Dephasing2, "gamma_d2", params.gamma_d2),
        (Channel::CavityLoss, "gamma_a", params.gamma_a),
    ];
    let mut out = Vec::new();
    for (channel, name, rate) in channels {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::param(name, format!("rate must be >= 0, got {rate}")));
        }
        if rate == 0.0 {
            continue;
        }
        let op = match channel {
            Channel::Decay21 => emitter_embedded(Level::One, Level::Two, dims),
            Channel::Decay1g => emitter_embedded(Level::G, Level::One, dims),
            Channel::Dephasing1 => emitter_embedded(Level::One, Level::One, dims),
            Channel::Dephasing2 => emitter_embedded(Level::Two, Level::Two, dims),
            Channel::CavityLoss => cavity_annihilation(dims),
        };
        out.push(JumpOperator { channel, rate, op });
    }
    Ok(out)
}

/// `σ₁₁ + 2σ₂₂ + a†a`: conserved by drift + coupling at resonance.
pub fn excitation_number(dims: HilbertDims) -> Operator {
    emitter_embedded(Level::One, Level::One, dims)
        .add(&emitter_embedded(Level::Two, Level::Two, dims).scale(2.0))
        .and_then(|n| n.add(&number_operator(dims)))
        .expect("same space")
}

/// Everything time-independent that the master equation needs.
#[derive(Clone, Debug)]
pub struct SystemModel {
    pub dims: HilbertDims,
    pub params: SystemParams,
    pub frame: FrameSpec,
    pub drift: Operator,
    pub coupling: Operator,
    pub jumps: Vec<JumpOperator>,
}

impl SystemModel {
    pub fn new(params: SystemParams, frame: FrameSpec, dims: HilbertDims) -> Result<Self> {
        params.validate()?;
        frame.validate()?;
        Ok(Self {
            dims,
            params,
            frame,
            drift: build_drift_hamiltonian(&params, &frame, dims),
            coupling: build_coupling(&params, dims),
            jumps: build_jump_operators(&params, dims)?,
        })
    }

    pub fn space(&self) -> Space {
        Space::Composite(self.dims)
    }

    /// Drift plus coupling.
    pub fn static_hamiltonian(&self) -> Operator {
        self.drift.add(&self.coupling).expect("same space")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dims() -> HilbertDims {
        HilbertDims::new(3).unwrap()
    }

    #[test]
    fn angular_rate_conversion() {
        assert_eq!(to_angular_rate(0.0), 0.0);
        assert_abs_diff_eq!(to_angular_rate(658.2119569), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(to_angular_rate(100.0), 0.151_926_7, epsilon = 1e-7);
    }

    #[test]
    fn reference_energies() {
        let p = SystemParams::reference();
        assert_abs_diff_eq!(p.omega_2 - 2.0 * p.omega_1, -2.27e-3, epsilon = 1e-12);
        assert_abs_diff_eq!(p.omega_cav, p.omega_2 - p.omega_1, epsilon = 0.0);
    }

    #[test]
    fn resonant_drift_vanishes() {
        let p = SystemParams::reference();
        let h = build_drift_hamiltonian(&p, &FrameSpec::resonant(&p), dims());
        assert!(h.max_abs() < 1e-9);
    }

    #[test]
    fn detuned_probe_drift() {
        let p = SystemParams::reference();
        let mut frame = FrameSpec::resonant(&p);
        // carrier 100 μeV below the cavity
        frame.probe_carrier -= 100e-6;
        let d = dims();
        let h = build_drift_hamiltonian(&p, &frame, d);
        assert!(h.hermiticity_error() == 0.0);
        for i in 0..d.total() {
            for j in 0..d.total() {
                if i != j {
                    assert_eq!(h.matrix()[(i, j)].norm(), 0.0);
                }
                assert_eq!(h.matrix()[(i, j)].im, 0.0);
            }
        }
        // a†a coefficient on |1, g>
        let c = h.matrix()[(d.index(Level::G, 1), d.index(Level::G, 1))].re;
        assert_abs_diff_eq!(c, 0.151_926_7, epsilon = 1e-6);
        // level 2 sees the same shift through the probe carrier
        let c2 = h.matrix()[(d.index(Level::Two, 0), d.index(Level::Two, 0))].re;
        assert_abs_diff_eq!(c2, 0.151_926_7, epsilon = 1e-6);
    }

    #[test]
    fn coupling_block_eigenvalues() {
        let d = dims();
        let zero = build_coupling(&SystemParams { g: 0.0, ..SystemParams::reference() }, d);
        assert_eq!(zero.max_abs(), 0.0);

        let h = build_coupling(&SystemParams::reference(), d);
        assert!(h.hermiticity_error() < 1e-15);
        let i11 = d.index(Level::One, 1);
        let i02 = d.index(Level::Two, 0);
        // 2×2 block [[0, c], [c*, 0]] has eigenvalues ±|c|
        let c = h.matrix()[(i11, i02)];
        assert_abs_diff_eq!(h.matrix()[(i11, i11)].norm(), 0.0);
        assert_abs_diff_eq!(c.norm(), 0.151_926_7, epsilon = 1e-7);
        let block = nalgebra::Matrix2::new(
            h.matrix()[(i11, i11)],
            h.matrix()[(i11, i02)],
            h.matrix()[(i02, i11)],
            h.matrix()[(i02, i02)],
        );
        let mut ev: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(ev[0], -0.151_926_7, epsilon = 1e-7);
        assert_abs_diff_eq!(ev[1], 0.151_926_7, epsilon = 1e-7);
    }

    #[test]
    fn jump_operator_set() {
        let d = dims();
        let none = build_jump_operators(&SystemParams::reference().lossless(), d).unwrap();
        assert!(none.is_empty());

        let jumps = build_jump_operators(&SystemParams::reference(), d).unwrap();
        let channels: Vec<_> = jumps.iter().map(|j| j.channel).collect();
        assert_eq!(
            channels,
            vec![Channel::Decay21, Channel::Decay1g, Channel::CavityLoss]
        );
        let cav = jumps.last().unwrap().scaled();
        let coeff = cav.matrix()[(d.index(Level::G, 0), d.index(Level::G, 1))].re;
        assert_abs_diff_eq!(coeff, (20.0_f64 / 658.2119569).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(coeff, 0.174_314, epsilon = 1e-6);

        let bad = SystemParams { gamma_a: -1.0, ..SystemParams::reference() };
        assert!(build_jump_operators(&bad, d).is_err());
    }

    #[test]
    fn rebuild_is_bit_identical() {
        let p = SystemParams { gamma_d1: 3.0, gamma_d2: 4.0, ..SystemParams::reference() };
        let a = build_jump_operators(&p, dims()).unwrap();
        let b = build_jump_operators(&p, dims()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn excitation_number_conserved_at_resonance() {
        let p = SystemParams::reference();
        let d = HilbertDims::new(4).unwrap();
        let model = SystemModel::new(p, FrameSpec::resonant(&p), d).unwrap();
        let h = model.static_hamiltonian();
        let comm = h.commutator(&excitation_number(d)).unwrap();
        assert!(comm.max_abs() < 1e-12);
    }

    #[test]
    fn model_rejects_bad_params() {
        let p = SystemParams { g: -1.0, ..SystemParams::reference() };
        assert!(SystemModel::new(p, FrameSpec::resonant(&p), dims()).is_err());
        let p = SystemParams::reference();
        let frame = FrameSpec { control_carrier: 0.0, probe_carrier: 1.0 };
        assert!(SystemModel::new(p, frame, dims()).is_err());
    }
}
