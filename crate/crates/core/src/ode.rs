//! Explicit Runge–Kutta integrators over flat complex state vectors.
//!
//! `integrate_dopri5` is the Dormand–Prince 5(4) embedded pair with
//! elementwise max-norm error control and the usual fourth-order continuous
//! extension for sampling. `integrate_rk4` is the classical fixed-step scheme.

use crate::error::{Error, Result};
use crate::hilbert::C64;

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th minus embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_initial: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

/// Local restriction on the next step: never longer than `max_step`, and
/// never crossing `barrier` (the step is shortened to land on it instead).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepBound {
    pub max_step: f64,
    pub barrier: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

#[inline]
fn axpy_into(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..out.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Adaptive Dormand–Prince integration from `t0` to `t1`.
///
/// `sample_times` must be sorted and lie in `[t0, t1]`; `sink` receives
/// `(index, time, state)` for each, in order.
#[allow(clippy::too_many_arguments)]
pub fn integrate_dopri5<F, L, S>(
    mut rhs: F,
    y0: &[C64],
    t0: f64,
    t1: f64,
    sample_times: &[f64],
    cfg: &AdaptiveConfig,
    bound: L,
    mut sink: S,
) -> Result<StepStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    L: Fn(f64) -> StepBound,
    S: FnMut(usize, f64, &[C64]),
{
    let n = y0.len();
    let mut stats = StepStats::default();
    let mut y = y0.to_vec();
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut k = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut next_sample = 0;

    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        sink(next_sample, sample_times[next_sample], &y);
        next_sample += 1;
    }

    let mut t = t0;
    let mut h = cfg.dt_initial.min(cfg.dt_max);
    rhs(t, &y, &mut k[0]);
    stats.rhs_evals += 1;

    while t < t1 {
        let b = bound(t);
        let mut h_try = h.min(b.max_step).min(cfg.dt_max);
        let mut lands_on_end = false;
        if let Some(barrier) = b.barrier {
            if barrier > t && t + h_try > barrier {
                h_try = barrier - t;
            }
        }
        if t + h_try >= t1 || (t1 - (t + h_try)) < 1e-12 * t1.abs().max(1.0) {
            h_try = t1 - t;
            lands_on_end = true;
        }
        if h_try < cfg.dt_min && !lands_on_end {
            return Err(Error::Integration {
                t_ps: t,
                reason: format!("step size {h_try:e} ps fell below dt_min {:e}", cfg.dt_min),
            });
        }

        // stages
        {
            let (k1, rest) = k.split_at_mut(1);
            axpy_into(&mut tmp, &y, h_try, &[(A21, &k1[0])]);
            rhs(t + C2 * h_try, &tmp, &mut rest[0]);
        }
        {
            let (done, rest) = k.split_at_mut(2);
            axpy_into(&mut tmp, &y, h_try, &[(A31, &done[0]), (A32, &done[1])]);
            rhs(t + C3 * h_try, &tmp, &mut rest[0]);
        }
        {
            let (done, rest) = k.split_at_mut(3);
            axpy_into(
                &mut tmp,
                &y,
                h_try,
                &[(A41, &done[0]), (A42, &done[1]), (A43, &done[2])],
            );
            rhs(t + C4 * h_try, &tmp, &mut rest[0]);
        }
        {
            let (done, rest) = k.split_at_mut(4);
            axpy_into(
                &mut tmp,
                &y,
                h_try,
                &[(A51, &done[0]), (A52, &done[1]), (A53, &done[2]), (A54, &done[3])],
            );
            rhs(t + C5 * h_try, &tmp, &mut rest[0]);
        }
        {
            let (done, rest) = k.split_at_mut(5);
            axpy_into(
                &mut tmp,
                &y,
                h_try,
                &[
                    (A61, &done[0]),
                    (A62, &done[1]),
                    (A63, &done[2]),
                    (A64, &done[3]),
                    (A65, &done[4]),
                ],
            );
            rhs(t + h_try, &tmp, &mut rest[0]);
        }
        axpy_into(
            &mut y_new,
            &y,
            h_try,
            &[(A71, &k[0]), (A73, &k[2]), (A74, &k[3]), (A75, &k[4]), (A76, &k[5])],
        );
        {
            let (done, rest) = k.split_at_mut(6);
            let _ = done;
            rhs(t + h_try, &y_new, &mut rest[0]);
        }
        stats.rhs_evals += 6;

        let mut err = 0.0_f64;
        let mut finite = true;
        for i in 0..n {
            let e = (k[0][i] * E1
                + k[2][i] * E3
                + k[3][i] * E4
                + k[4][i] * E5
                + k[5][i] * E6
                + k[6][i] * E7)
                * h_try;
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].norm().max(y_new[i].norm());
            let r = e.norm() / scale;
            if !r.is_finite() || !y_new[i].re.is_finite() || !y_new[i].im.is_finite() {
                finite = false;
            }
            err = err.max(r);
        }
        if !finite {
            if h_try <= cfg.dt_min {
                return Err(Error::Integration {
                    t_ps: t,
                    reason: "non-finite state".to_string(),
                });
            }
            stats.rejected += 1;
            h = (h_try * FAC_MIN).max(cfg.dt_min);
            continue;
        }

        if err <= 1.0 {
            let t_new = if lands_on_end { t1 } else { t + h_try };
            while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                let ts = sample_times[next_sample];
                let theta = ((ts - t) / h_try).clamp(0.0, 1.0);
                dense_output(&mut tmp, &y, &y_new, &k, h_try, theta);
                sink(next_sample, ts, &tmp);
                next_sample += 1;
            }
            stats.accepted += 1;
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            let fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            // keep growing from the unclamped step, not from a barrier-shortened one
            h = (h_try.max(h.min(cfg.dt_max)) * fac).min(cfg.dt_max);
        } else {
            stats.rejected += 1;
            let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            h = h_try * fac;
            if h < cfg.dt_min {
                return Err(Error::Integration {
                    t_ps: t,
                    reason: format!(
                        "step size {h:e} ps fell below dt_min {:e} (error ratio {err:.3e})",
                        cfg.dt_min
                    ),
                });
            }
        }
    }
    Ok(stats)
}

fn dense_output(out: &mut [C64], y0: &[C64], y1: &[C64], k: &[Vec<C64>], h: f64, theta: f64) {
    let th1 = 1.0 - theta;
    for i in 0..out.len() {
        let r1 = y0[i];
        let r2 = y1[i] - y0[i];
        let r3 = k[0][i] * h - r2;
        let r4 = r2 - k[6][i] * h - r3;
        let r5 = (k[0][i] * D1
            + k[2][i] * D3
            + k[3][i] * D4
            + k[4][i] * D5
            + k[5][i] * D6
            + k[6][i] * D7)
            * h;
        out[i] = r1 + (r2 + (r3 + (r4 + r5 * th1) * theta) * th1) * theta;
    }
}

/// Classical fixed-step RK4. Each interval between consecutive sample times
/// is split into equal substeps no longer than `dt`.
pub fn integrate_rk4<F, S>(
    mut rhs: F,
    y0: &[C64],
    t0: f64,
    sample_times: &[f64],
    dt: f64,
    mut sink: S,
) -> Result<StepStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    S: FnMut(usize, f64, &[C64]),
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", format!("must be > 0, got {dt}")));
    }
    let n = y0.len();
    let mut stats = StepStats::default();
    let mut y = y0.to_vec();
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut t = t0;
    for (idx, &ts) in sample_times.iter().enumerate() {
        if ts < t {
            return Err(Error::param("sample_times", "must be sorted and >= t0"));
        }
        let span = ts - t;
        let steps = if span > 0.0 { (span / dt).ceil().max(1.0) as usize } else { 0 };
        for s in 0..steps {
            let ta = t + span * s as f64 / steps as f64;
            let h = span / steps as f64;
            rhs(ta, &y, &mut k1);
            for i in 0..n {
                tmp[i] = y[i] + k1[i] * (0.5 * h);
            }
            rhs(ta + 0.5 * h, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + k2[i] * (0.5 * h);
            }
            rhs(ta + 0.5 * h, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + k3[i] * h;
            }
            rhs(ta + h, &tmp, &mut k4);
            for i in 0..n {
                y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
            stats.accepted += 1;
            stats.rhs_evals += 4;
        }
        t = ts;
        sink(idx, ts, &y);
    }
    Ok(stats)
}
