//! Weak-excitation pure-state model used as an independent cross-check of the
//! master equation.
//!
//! The state is restricted to at most one excitation per subsystem channel:
//! `{|0,g>, |1,g>, |0,1>, |1,1>, |0,2>}` (photon number, emitter level).
//! Between pulses the amplitudes follow the no-jump (non-Hermitian) dynamics,
//! solved in closed form; control pulses act instantaneously as a π rotation
//! of the g ↔ 1 transition.

use crate::hilbert::C64;
use crate::model::{to_angular_rate, SystemParams};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Amplitudes on `|0,g>, |1,g>, |0,1>, |1,1>, |0,2>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeState {
    pub c_0g: C64,
    pub c_1g: C64,
    pub c_01: C64,
    pub c_11: C64,
    pub c_02: C64,
}

impl AmplitudeState {
    pub const ZERO: AmplitudeState = AmplitudeState {
        c_0g: ZERO,
        c_1g: ZERO,
        c_01: ZERO,
        c_11: ZERO,
        c_02: ZERO,
    };

    pub fn vacuum() -> Self {
        Self {
            c_0g: C64::new(1.0, 0.0),
            ..Self::ZERO
        }
    }

    /// Cavity just after a weak resonant probe of the given area: one-photon
    /// amplitude `-i·area/2`, vacuum amplitude fixing the norm to 1.
    pub fn after_weak_probe(area: f64) -> Self {
        let alpha = C64::new(0.0, -0.5 * area);
        Self {
            c_0g: C64::new((1.0 - alpha.norm_sqr()).max(0.0).sqrt(), 0.0),
            c_1g: alpha,
            ..Self::ZERO
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        [self.c_0g, self.c_1g, self.c_01, self.c_11, self.c_02]
            .iter()
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// `(<a†a>, <a>)`.
    pub fn predict_observables(&self) -> (f64, C64) {
        predict_observables(self)
    }
}

/// `n = |c_11|² + |c_1g|²`, `<a> = c_0g* c_1g + c_01* c_11`.
pub fn predict_observables(state: &AmplitudeState) -> (f64, C64) {
    let n = state.c_11.norm_sqr() + state.c_1g.norm_sqr();
    let coh = state.c_0g.conj() * state.c_1g + state.c_01.conj() * state.c_11;
    (n, coh)
}

/// Phase convention of the instantaneous π rotation on g ↔ 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PiConvention {
    /// `-iσ_x`: resonant area-π Gaussian pulse with zero phase.
    #[default]
    MinusISigmaX,
    /// `+iσ_y`
    PlusISigmaY,
}

/// Applies a resonant π pulse on g ↔ 1 (`-iσ_x`); level 2 is untouched.
pub fn apply_instantaneous_pi_pulse(state: &AmplitudeState) -> AmplitudeState {
    apply_pi_pulse_with(state, PiConvention::MinusISigmaX)
}

pub fn apply_pi_pulse_with(state: &AmplitudeState, convention: PiConvention) -> AmplitudeState {
    // (c_g, c_1) -> rotated pair, for each photon number
    let rotate = |cg: C64, c1: C64| -> (C64, C64) {
        match convention {
            PiConvention::MinusISigmaX => {
                let mi = C64::new(0.0, -1.0);
                (mi * c1, mi * cg)
            }
            PiConvention::PlusISigmaY => (c1, -cg),
        }
    };
    let (c_0g, c_01) = rotate(state.c_0g, state.c_01);
    let (c_1g, c_11) = rotate(state.c_1g, state.c_11);
    AmplitudeState {
        c_0g,
        c_1g,
        c_01,
        c_11,
        c_02: state.c_02,
    }
}

/// Closed-form drive-free evolution over `duration` ps.
///
/// `ċ_11 = -(γ_a+γ₁)/2ħ c_11 - i g/ħ c_02`, `ċ_02 = -γ₂/2ħ c_02 - i g/ħ c_11`,
/// `ċ_1g = -γ_a/2ħ c_1g`, `ċ_01 = -γ₁/2ħ c_01`, `ċ_0g = 0`.
pub fn evolve_amplitudes(params: &SystemParams, state: &AmplitudeState, duration: f64) -> AmplitudeState {
    let t = duration;
    let ka = 0.5 * to_angular_rate(params.gamma_a);
    let k1 = 0.5 * to_angular_rate(params.gamma_1);
    let k2 = 0.5 * to_angular_rate(params.gamma_2);
    let g = to_angular_rate(params.g);

    // 2×2 block M = [[-a, -ig], [-ig, -b]]:
    // exp(Mt) = e^{-st} [cosh(Ωt) I + sinh(Ωt)/Ω (M + sI)], Ω² = d² - g²
    let a = ka + k1;
    let b = k2;
    let s = 0.5 * (a + b);
    let d = 0.5 * (a - b);
    let omega = C64::new(d * d - g * g, 0.0).sqrt();
    let ch = (omega * t).cosh();
    let sh_over = if omega.norm() * t.abs() < 1e-8 {
        C64::new(t, 0.0)
    } else {
        (omega * t).sinh() / omega
    };
    let damp = (-s * t).exp();
    let mig = C64::new(0.0, -g);
    let m11 = (ch + sh_over * (-d)) * damp;
    let m22 = (ch + sh_over * d) * damp;
    let m12 = sh_over * mig * damp;

    AmplitudeState {
        c_0g: state.c_0g,
        c_1g: state.c_1g * (-ka * t).exp(),
        c_01: state.c_01 * (-k1 * t).exp(),
        c_11: m11 * state.c_11 + m12 * state.c_02,
        c_02: m12 * state.c_11 + m22 * state.c_02,
    }
}

/// Runs a protocol of instantaneous π pulses starting from `initial` at
/// `t_initial`, returning the state at each of the sorted `sample_times`
/// (all `>= t_initial`). A pulse coinciding with a sample acts before it.
pub fn simulate_protocol(
    params: &SystemParams,
    initial: AmplitudeState,
    t_initial: f64,
    pulse_times: &[f64],
    sample_times: &[f64],
    convention: PiConvention,
) -> Vec<AmplitudeState> {
    let mut pulses: Vec<f64> = pulse_times.iter().copied().filter(|&t| t >= t_initial).collect();
    pulses.sort_by(f64::total_cmp);
    let mut state = initial;
    let mut t = t_initial;
    let mut next_pulse = 0;
    let mut out = Vec::with_capacity(sample_times.len());
    for &ts in sample_times {
        while next_pulse < pulses.len() && pulses[next_pulse] <= ts {
            let tp = pulses[next_pulse];
            state = evolve_amplitudes(params, &state, tp - t);
            state = apply_pi_pulse_with(&state, convention);
            t = tp;
            next_pulse += 1;
        }
        state = evolve_amplitudes(params, &state, ts - t);
        t = ts;
        out.push(state);
    }
    out
}
