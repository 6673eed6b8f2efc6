//! Explicit adaptive Runge-Kutta (Dormand-Prince 5(4)) with event detection.
//! Events are scalar functions of (t, y); sign changes across an accepted step
//! are located by bisection on a cubic Hermite interpolant. A terminal event
//! truncates the trajectory at the located point.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    Rising,
    Falling,
    Any,
}

/// Sign-change trigger on g(t, y). `label` identifies the event in hits.
pub struct Event<'a> {
    pub g: Box<dyn Fn(f64, &[f64]) -> f64 + 'a>,
    pub direction: EventDirection,
    pub terminal: bool,
    pub label: &'static str,
}

impl<'a> Event<'a> {
    pub fn new(
        label: &'static str,
        direction: EventDirection,
        terminal: bool,
        g: impl Fn(f64, &[f64]) -> f64 + 'a,
    ) -> Self {
        Event {
            g: Box::new(g),
            direction,
            terminal,
            label,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EventHit {
    pub label: &'static str,
    pub t: f64,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IvpStatus {
    ReachedEnd,
    TerminalEvent(&'static str),
}

#[derive(Debug, Clone)]
pub struct IvpSolution {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub events: Vec<EventHit>,
    pub status: IvpStatus,
    pub steps: usize,
}

impl IvpSolution {
    pub fn last_t(&self) -> f64 {
        *self.ts.last().expect("trajectory is never empty")
    }

    pub fn last_y(&self) -> &[f64] {
        self.ys.last().expect("trajectory is never empty")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IvpOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Cap on the step size; keeps event checks from straddling a feature.
    pub max_step: Option<f64>,
}

impl Default for IvpOptions {
    fn default() -> Self {
        IvpOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 2_000_000,
            max_step: None,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// 5th-order minus 4th-order weights, applied to k1..k7 for the error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Cubic Hermite interpolation of the step [t0, t0+h] at fraction `theta`.
fn hermite(theta: f64, h: f64, y0: &[f64], y1: &[f64], f0: &[f64], f1: &[f64], out: &mut [f64]) {
    let t = theta;
    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    let h10 = t * (1.0 - t) * (1.0 - t);
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = t * t * (t - 1.0);
    for i in 0..y0.len() {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

fn triggered(direction: EventDirection, g0: f64, g1: f64) -> bool {
    match direction {
        EventDirection::Rising => g0 < 0.0 && g1 >= 0.0,
        EventDirection::Falling => g0 > 0.0 && g1 <= 0.0,
        EventDirection::Any => g0 != 0.0 && g0.signum() != g1.signum(),
    }
}

/// Integrate dy/dt = rhs(t, y) from `t0` to `t_end` (t0 < t_end).
pub fn integrate_ivp<R>(
    rhs: R,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    opts: &IvpOptions,
    events: &[Event<'_>],
) -> Result<IvpSolution>
where
    R: Fn(f64, &[f64], &mut [f64]),
{
    if !(t0 < t_end) {
        return Err(Error::domain("integrate_ivp needs t0 < t_end"));
    }
    let dim = y0.len();
    let span = t_end - t0;
    let h_max = opts.max_step.unwrap_or(span / 16.0).min(span);

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();

    {
        let (k1, _) = k.split_first_mut().unwrap();
        rhs(t, &y, k1);
    }
    // conservative first step from the rhs scale
    let f_scale = k[0]
        .iter()
        .zip(y.iter())
        .map(|(f, y)| f.abs() / (y.abs() + 1.0))
        .fold(0.0_f64, f64::max);
    let mut h = (0.01 / (f_scale + 1e-6)).min(h_max).max(1e-10 * span);

    let mut sol = IvpSolution {
        ts: vec![t],
        ys: vec![y.clone()],
        events: Vec::new(),
        status: IvpStatus::ReachedEnd,
        steps: 0,
    };

    let mut steps = 0usize;
    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::Convergence {
                what: format!("ivp exceeded {} steps", opts.max_steps),
                best: t,
                error_estimate: t_end - t,
            });
        }
        steps += 1;
        h = h.min(t_end - t);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Stiffness {
                location: t,
                step: h,
            });
        }

        // stages 2..7 (k1 already holds rhs at (t, y))
        let coeffs: [&[f64]; 6] = [&A2, &A3, &A4, &A5, &A6, &A7];
        for (stage, a_row) in coeffs.iter().enumerate() {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, &a) in a_row.iter().enumerate() {
                    acc += a * k[j][i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            rhs(t + C[stage] * h, &y_stage, &mut k[stage + 1]);
        }
        // stage 7 used A7 (the 5th-order weights), so y_stage is y_new
        y_new.copy_from_slice(&y_stage);

        let mut err_sq = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, &w) in E.iter().enumerate() {
                e += w * k[j][i];
            }
            e *= h;
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            let r = e / scale;
            err_sq += r * r;
        }
        let err = (err_sq / dim as f64).sqrt();

        if err <= 1.0 {
            let t_new = t + h;
            // event scan over the accepted step
            let mut hit_terminal: Option<(usize, f64, Vec<f64>)> = None;
            for (idx, ev) in events.iter().enumerate() {
                let g1 = (ev.g)(t_new, &y_new);
                if triggered(ev.direction, g_prev[idx], g1) {
                    // locate by bisection on the Hermite interpolant
                    let mut lo = 0.0_f64;
                    let mut hi = 1.0_f64;
                    let mut g_lo = g_prev[idx];
                    let mut buf = vec![0.0; dim];
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        hermite(mid, h, &y, &y_new, &k[0], &k[6], &mut buf);
                        let gm = (ev.g)(t + mid * h, &buf);
                        if gm == 0.0 || (hi - lo) < 1e-15 {
                            lo = mid;
                            hi = mid;
                            break;
                        }
                        if gm.signum() == g_lo.signum() {
                            lo = mid;
                            g_lo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                    let theta = 0.5 * (lo + hi);
                    hermite(theta, h, &y, &y_new, &k[0], &k[6], &mut buf);
                    let t_hit = t + theta * h;
                    sol.events.push(EventHit {
                        label: ev.label,
                        t: t_hit,
                        y: buf.clone(),
                    });
                    if ev.terminal {
                        let replace = match &hit_terminal {
                            Some((_, t_prev, _)) => t_hit < *t_prev,
                            None => true,
                        };
                        if replace {
                            hit_terminal = Some((idx, t_hit, buf));
                        }
                    }
                }
                g_prev[idx] = g1;
            }
            if let Some((idx, t_hit, y_hit)) = hit_terminal {
                sol.ts.push(t_hit);
                sol.ys.push(y_hit);
                sol.status = IvpStatus::TerminalEvent(events[idx].label);
                sol.steps = steps;
                return Ok(sol);
            }

            t = t_new;
            y.copy_from_slice(&y_new);
            sol.ts.push(t);
            sol.ys.push(y.clone());
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]); // FSAL
            let grow = 0.9 * err.max(1e-10).powf(-0.2);
            h = (h * grow.min(5.0)).min(h_max);
        } else {
            let shrink = (0.9 * err.powf(-0.2)).max(0.2);
            h *= shrink;
        }
    }

    sol.steps = steps;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = integrate_ivp(
            |_t, y, dy| dy[0] = -y[0],
            0.0,
            5.0,
            &[1.0],
            &IvpOptions::default(),
            &[],
        )
        .unwrap();
        let exact = (-5.0_f64).exp();
        assert!(
            (sol.last_y()[0] - exact).abs() < 1e-9 * exact.max(1e-3),
            "got {}",
            sol.last_y()[0]
        );
        assert_eq!(sol.status, IvpStatus::ReachedEnd);
    }

    #[test]
    fn oscillator_stays_on_circle() {
        let sol = integrate_ivp(
            |_t, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            20.0,
            &[1.0, 0.0],
            &IvpOptions::default(),
            &[],
        )
        .unwrap();
        let r = sol.last_y()[0].hypot(sol.last_y()[1]);
        assert!((r - 1.0).abs() < 1e-8, "radius drifted to {r}");
    }

    #[test]
    fn falling_zero_of_cosine_located() {
        // y = cos t crosses zero falling at pi/2
        let ev = Event::new("crossing", EventDirection::Falling, true, |_t, y: &[f64]| {
            y[0]
        });
        let sol = integrate_ivp(
            |_t, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            20.0,
            &[1.0, 0.0],
            &IvpOptions::default(),
            &[ev],
        )
        .unwrap();
        assert_eq!(sol.status, IvpStatus::TerminalEvent("crossing"));
        assert!(
            (sol.last_t() - std::f64::consts::FRAC_PI_2).abs() < 1e-9,
            "hit at {}",
            sol.last_t()
        );
    }

    #[test]
    fn rising_direction_skips_falling_crossings() {
        // sin t falls through zero at pi; first rising crossing is at 2 pi
        let ev = Event::new("rising", EventDirection::Rising, true, |_t, y: &[f64]| y[0]);
        let sol = integrate_ivp(
            |_t, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.1,
            20.0,
            &[0.1_f64.sin(), 0.1_f64.cos()],
            &IvpOptions::default(),
            &[ev],
        )
        .unwrap();
        assert!(
            (sol.last_t() - 2.0 * std::f64::consts::PI).abs() < 1e-8,
            "hit at {}",
            sol.last_t()
        );
    }

    #[test]
    fn non_terminal_events_are_recorded() {
        let ev = Event::new("zero", EventDirection::Any, false, |_t, y: &[f64]| y[0]);
        let sol = integrate_ivp(
            |_t, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.1,
            10.0,
            &[0.1_f64.sin(), 0.1_f64.cos()],
            &IvpOptions::default(),
            &[ev],
        )
        .unwrap();
        assert_eq!(sol.status, IvpStatus::ReachedEnd);
        // zeros of sin at pi, 2pi, 3pi
        assert_eq!(sol.events.len(), 3);
        for (i, hit) in sol.events.iter().enumerate() {
            let expect = (i + 1) as f64 * std::f64::consts::PI;
            assert!((hit.t - expect).abs() < 1e-8, "event {i} at {}", hit.t);
        }
    }

    #[test]
    fn step_budget_is_enforced() {
        let opts = IvpOptions {
            max_steps: 10,
            ..Default::default()
        };
        match integrate_ivp(
            |t, _y, dy| dy[0] = (10.0 * t).sin() * 1000.0,
            0.0,
            100.0,
            &[0.0],
            &opts,
            &[],
        ) {
            Err(Error::Convergence { .. }) => {}
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn tightening_tolerance_reduces_error() {
        let run = |rt: f64| {
            let opts = IvpOptions {
                rel_tol: rt,
                abs_tol: rt * 1e-2,
                ..Default::default()
            };
            let sol = integrate_ivp(
                |t, _y, dy| dy[0] = t.cos(),
                0.0,
                10.0,
                &[0.0],
                &opts,
                &[],
            )
            .unwrap();
            (sol.last_y()[0] - 10.0_f64.sin()).abs()
        };
        let coarse = run(1e-6);
        let fine = run(1e-11);
        assert!(fine < coarse, "coarse {coarse:e} fine {fine:e}");
        assert!(fine < 1e-9);
    }
}
