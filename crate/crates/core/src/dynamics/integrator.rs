//! Dormand–Prince 5(4) with exact stepping onto a sample grid.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The right-hand side refused the point (too close to a node, or non-finite).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Singular;

pub trait OdeSystem<R: Real> {
    fn dim(&self) -> usize;
    fn rhs(&self, t: &R, y: &[R], dy: &mut [R]) -> std::result::Result<(), Singular>;
    /// Components from this index on form a deviation vector whose error is
    /// measured relative to its own norm. `None` means plain mixed tolerances.
    fn deviation_start(&self) -> Option<usize> {
        None
    }
}

#[derive(Clone, Debug)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: u64,
}

/// Called after every accepted step; may rescale the state in place.
pub trait StepHook<R> {
    /// Returns true when `y` was modified.
    fn after_step(&mut self, _t: &R, _y: &mut [R]) -> bool {
        false
    }
}

pub struct NoHook;
impl<R> StepHook<R> for NoHook {}

// Dormand–Prince tableau
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b̂
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Exact rational tableau entries at working precision.
struct Tableau<R> {
    c: [R; 4],
    a: Vec<Vec<R>>,
    b: [R; 5],
    e: [R; 6],
}

fn q<R: Real>(p: i64, d: i64) -> R {
    R::ratio(p, d)
}

impl<R: Real> Tableau<R> {
    fn new() -> Self {
        if R::digits() <= 16 {
            let f = R::from_f64;
            return Self {
                c: [f(C2), f(C3), f(C4), f(C5)],
                a: vec![
                    vec![f(A21)],
                    vec![f(A31), f(A32)],
                    vec![f(A41), f(A42), f(A43)],
                    vec![f(A51), f(A52), f(A53), f(A54)],
                    vec![f(A61), f(A62), f(A63), f(A64), f(A65)],
                ],
                b: [f(B1), f(B3), f(B4), f(B5), f(B6)],
                e: [f(E1), f(E3), f(E4), f(E5), f(E6), f(E7)],
            };
        }
        Self {
            c: [q(1, 5), q(3, 10), q(4, 5), q(8, 9)],
            a: vec![
                vec![q(1, 5)],
                vec![q(3, 40), q(9, 40)],
                vec![q(44, 45), q(-56, 15), q(32, 9)],
                vec![
                    q(19372, 6561),
                    q(-25360, 2187),
                    q(64448, 6561),
                    q(-212, 729),
                ],
                vec![
                    q(9017, 3168),
                    q(-355, 33),
                    q(46732, 5247),
                    q(49, 176),
                    q(-5103, 18656),
                ],
            ],
            b: [
                q(35, 384),
                q(500, 1113),
                q(125, 192),
                q(-2187, 6784),
                q(11, 84),
            ],
            e: [
                q(71, 57600),
                q(-71, 16695),
                q(71, 1920),
                q(-17253, 339200),
                q(22, 525),
                q(-1, 40),
            ],
        }
    }
}

/// Integrator state carried between sample times.
pub struct Dp5<R: Real> {
    tab: Tableau<R>,
    ctl: StepControl,
    pub t: R,
    pub y: Vec<R>,
    h: f64,
    k1: Vec<R>,
    have_k1: bool,
    pub steps: u64,
    pub rejected: u64,
}

impl<R: Real> Dp5<R> {
    pub fn new(ctl: StepControl, t0: R, y0: Vec<R>) -> Self {
        let n = y0.len();
        let h = ctl.max_step.min(1e-3);
        Self {
            tab: Tableau::new(),
            ctl,
            t: t0,
            y: y0,
            h,
            k1: vec![R::zero(); n],
            have_k1: false,
            steps: 0,
            rejected: 0,
        }
    }

    fn error_norm<S: OdeSystem<R>>(&self, sys: &S, err: &[R], y1: &[R]) -> f64 {
        let n = err.len();
        let split = sys.deviation_start().unwrap_or(n);
        let mut sum = 0.0;
        for i in 0..split {
            let sc =
                self.ctl.atol + self.ctl.rtol * self.y[i].to_f64().abs().max(y1[i].to_f64().abs());
            let r = err[i].to_f64() / sc;
            sum += r * r;
        }
        if split < n {
            let dev0 = crate::scalar::norm(&self.y[split..]).to_f64();
            let dev1 = crate::scalar::norm(&y1[split..]).to_f64();
            let sc = (self.ctl.rtol + self.ctl.atol) * dev0.max(dev1) / ((n - split) as f64).sqrt();
            for e in &err[split..] {
                let r = e.to_f64() / sc;
                sum += r * r;
            }
        }
        (sum / n as f64).sqrt()
    }

    /// Advance exactly to `t_target` (≥ current t).
    pub fn advance_to<S: OdeSystem<R>, H: StepHook<R>>(
        &mut self,
        sys: &S,
        t_target: &R,
        hook: &mut H,
    ) -> Result<()> {
        let n = self.y.len();
        let mut stages: Vec<Vec<R>> = (0..6).map(|_| vec![R::zero(); n]).collect();
        let mut tmp = vec![R::zero(); n];
        let mut y1 = vec![R::zero(); n];
        let mut err = vec![R::zero(); n];
        let mut k7 = vec![R::zero(); n];
        loop {
            let remaining = (t_target.clone() - self.t.clone()).to_f64();
            let tscale = self.t.to_f64().abs().max(1.0);
            if remaining <= 4.0 * f64::EPSILON * tscale {
                // sample time reached up to rounding of the grid itself
                self.t = t_target.clone();
                return Ok(());
            }
            if !self.have_k1 {
                if sys.rhs(&self.t, &self.y, &mut self.k1).is_err() {
                    return Err(Error::NearNode);
                }
                self.have_k1 = true;
            }
            if self.steps + self.rejected >= self.ctl.max_steps {
                return Err(Error::StepLimit {
                    limit: self.ctl.max_steps,
                    t: self.t.to_f64(),
                });
            }
            let last = self.h >= remaining;
            let h_f = if last {
                remaining
            } else {
                self.h.min(self.ctl.max_step)
            };
            let h = if last {
                t_target.clone() - self.t.clone()
            } else {
                R::from_f64(h_f)
            };
            let ok = self.trial(sys, &h, &mut stages, &mut tmp, &mut y1, &mut err, &mut k7);
            let norm = if ok {
                self.error_norm(sys, &err, &y1)
            } else {
                f64::INFINITY
            };
            if norm <= 1.0 {
                self.steps += 1;
                self.t = if last {
                    t_target.clone()
                } else {
                    self.t.clone() + h
                };
                std::mem::swap(&mut self.y, &mut y1);
                std::mem::swap(&mut self.k1, &mut k7);
                let fac = if norm == 0.0 {
                    5.0
                } else {
                    (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last || h_f >= 0.5 * self.h {
                    self.h = (h_f * fac).min(self.ctl.max_step);
                }
                if hook.after_step(&self.t, &mut self.y) {
                    self.have_k1 = false;
                }
            } else {
                self.rejected += 1;
                self.h = if norm.is_finite() {
                    h_f * (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    h_f * 0.5
                };
                if self.h < self.ctl.min_step {
                    return Err(if ok {
                        Error::NonFinite { t: self.t.to_f64() }
                    } else {
                        Error::SingularityUnavoidable {
                            t: self.t.to_f64(),
                            min_step: self.ctl.min_step,
                        }
                    });
                }
            }
        }
    }

    /// One trial step; false when a stage hit a singular point.
    #[allow(clippy::too_many_arguments)]
    fn trial<S: OdeSystem<R>>(
        &self,
        sys: &S,
        h: &R,
        stages: &mut [Vec<R>],
        tmp: &mut [R],
        y1: &mut [R],
        err: &mut [R],
        k7: &mut [R],
    ) -> bool {
        let n = self.y.len();
        stages[0].clone_from_slice(&self.k1);
        for s in 1..6 {
            for i in 0..n {
                let mut acc = R::zero();
                for (j, a) in self.tab.a[s - 1].iter().enumerate() {
                    acc += a.clone() * stages[j][i].clone();
                }
                tmp[i] = self.y[i].clone() + h.clone() * acc;
            }
            let ts = if s < 5 {
                self.t.clone() + h.clone() * self.tab.c[s - 1].clone()
            } else {
                self.t.clone() + h.clone()
            };
            let (_, rest) = stages.split_at_mut(s);
            if sys.rhs(&ts, tmp, &mut rest[0]).is_err() {
                return false;
            }
        }
        let bi = [0usize, 2, 3, 4, 5];
        for i in 0..n {
            let mut acc = R::zero();
            for (b, &j) in self.tab.b.iter().zip(&bi) {
                acc += b.clone() * stages[j][i].clone();
            }
            y1[i] = self.y[i].clone() + h.clone() * acc;
        }
        if y1.iter().any(|v| !v.is_finite()) {
            return false;
        }
        if sys.rhs(&(self.t.clone() + h.clone()), y1, k7).is_err() {
            return false;
        }
        for i in 0..n {
            let mut acc = R::zero();
            for (e, &j) in self.tab.e[..5].iter().zip(&bi) {
                acc += e.clone() * stages[j][i].clone();
            }
            acc += self.tab.e[5].clone() * k7[i].clone();
            err[i] = h.clone() * acc;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Harmonic;
    impl OdeSystem<f64> for Harmonic {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: &f64, y: &[f64], dy: &mut [f64]) -> std::result::Result<(), Singular> {
            dy[0] = y[1];
            dy[1] = -y[0];
            Ok(())
        }
    }

    fn ctl() -> StepControl {
        StepControl {
            rtol: 1e-12,
            atol: 1e-14,
            max_step: 0.1,
            min_step: 1e-12,
            max_steps: 10_000_000,
        }
    }

    #[test]
    fn harmonic_period() {
        let mut dp = Dp5::new(ctl(), 0.0, vec![1.0, 0.0]);
        let period = 2.0 * std::f64::consts::PI;
        dp.advance_to(&Harmonic, &period, &mut NoHook).unwrap();
        assert_eq!(dp.t, period);
        assert!((dp.y[0] - 1.0).abs() < 1e-10 && dp.y[1].abs() < 1e-10);
    }

    #[cfg(feature = "extended")]
    #[test]
    fn extended_harmonic_is_more_accurate() {
        use crate::scalar::{set_extended_digits, Ext};
        set_extended_digits(50);
        struct H;
        impl OdeSystem<Ext> for H {
            fn dim(&self) -> usize {
                2
            }
            fn rhs(
                &self,
                _t: &Ext,
                y: &[Ext],
                dy: &mut [Ext],
            ) -> std::result::Result<(), Singular> {
                dy[0] = y[1].clone();
                dy[1] = -y[0].clone();
                Ok(())
            }
        }
        let mut c = ctl();
        c.rtol = 1e-20;
        c.atol = 1e-22;
        let mut dp = Dp5::new(c, Ext::zero(), vec![Ext::one(), Ext::zero()]);
        dp.advance_to(&H, &(Ext::pi() * 2.0), &mut NoHook).unwrap();
        assert!((dp.y[0].clone() - 1.0).abs().to_f64() < 1e-18);
    }

    struct Wall;
    impl OdeSystem<f64> for Wall {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: &f64, y: &[f64], dy: &mut [f64]) -> std::result::Result<(), Singular> {
            if y[0] >= 1.0 {
                return Err(Singular);
            }
            dy[0] = 1.0;
            Ok(())
        }
    }

    #[test]
    fn singular_wall_is_reported() {
        let mut dp = Dp5::new(ctl(), 0.0, vec![0.0]);
        let r = dp.advance_to(&Wall, &2.0, &mut NoHook);
        assert!(
            matches!(r, Err(Error::SingularityUnavoidable { .. })),
            "{r:?}"
        );
        assert!(dp.y[0] < 1.0 && dp.y[0] > 1.0 - 1e-10);
    }
}
