//! Dormand-Prince 5(4) with PI step control and 4th-order dense output.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub hmax: f64,
    pub hmin: f64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self { rtol: 1e-11, atol: 1e-13, h0: 1e-4, hmax: 0.05, hmin: 1e-14 }
    }
}

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
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    /// Derivative at `(t0, y0)`.
    pub k1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Step<N> {
    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }

    /// Dense output at `t` in `[t0, t1]`.
    pub fn dense(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h();
        let th1 = 1.0 - th;
        let r = &self.rcont;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        out
    }
}

/// Adaptive integrator over `y' = f(t, y)`.
///
/// A right-hand side error inside a trial step is treated like a rejected
/// step: the step is shrunk and retried.
pub struct Dopri5<const N: usize, F> {
    f: F,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    err_old: f64,
    cfg: OdeConfig,
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

struct Trial<const N: usize> {
    y1: [f64; N],
    k: [[f64; N]; 7],
    err: f64,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], cfg: OdeConfig) -> Result<Self> {
        if !(cfg.rtol > 0.0 && cfg.atol > 0.0 && cfg.h0 > 0.0 && cfg.hmax > 0.0) {
            return Err(Error::InvalidArgument("integrator tolerances and steps must be positive".into()));
        }
        let k1 = f(t0, &y0)?;
        Ok(Self { f, t: t0, y: y0, k1, h: cfg.h0.min(cfg.hmax), err_old: 1e-4, cfg, accepted: 0, rejected: 0 })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; N] {
        self.y
    }

    /// Replaces the current point, e.g. after a projection or an event.
    pub fn reset(&mut self, t: f64, y: [f64; N]) -> Result<()> {
        self.k1 = (self.f)(t, &y)?;
        self.t = t;
        self.y = y;
        Ok(())
    }

    pub fn rhs(&mut self, t: f64, y: &[f64; N]) -> Result<[f64; N]> {
        (self.f)(t, y)
    }

    fn trial(&mut self, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> Result<Trial<N>> {
        let f = &mut self.f;
        let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
        let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(t + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = f(t + h, &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y1 = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y1)?;
        let mut acc = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = self.cfg.atol + self.cfg.rtol * y[i].abs().max(y1[i].abs());
            acc += (e / sk).powi(2);
        }
        let err = (acc / N as f64).sqrt();
        if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepFailure { t, h });
        }
        Ok(Trial { y1, k: [*k1, k2, k3, k4, k5, k6, k7], err })
    }

    /// State reached by a single step of length `h` from `(t, y)` with
    /// derivative `k1`; used to polish event locations.
    pub fn substep(&mut self, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> Result<[f64; N]> {
        if h == 0.0 {
            return Ok(*y);
        }
        Ok(self.trial(t, y, k1, h)?.y1)
    }

    /// Advances by one accepted step, never past `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<Step<N>> {
        loop {
            let remaining = t_limit - self.t;
            if remaining <= 0.0 {
                return Err(Error::InvalidArgument("step requested past the integration limit".into()));
            }
            let mut h = self.h.min(self.cfg.hmax);
            let clipped = h >= remaining;
            if clipped {
                h = remaining;
            }
            if h < self.cfg.hmin && !clipped {
                return Err(Error::StepFailure { t: self.t, h });
            }
            let (t, y, k1) = (self.t, self.y, self.k1);
            match self.trial(t, &y, &k1, h) {
                Ok(tr) if tr.err <= 1.0 => {
                    let err = tr.err.max(1e-10);
                    let fac = err.powf(0.2 - 0.75 * BETA) / self.err_old.powf(BETA) / SAFETY;
                    let fac = fac.clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                    self.err_old = err;
                    let hnew = (h / fac).min(self.cfg.hmax);
                    if !clipped || hnew < self.h {
                        self.h = hnew;
                    }
                    let k = &tr.k;
                    let mut rcont = [[0.0; N]; 5];
                    for i in 0..N {
                        let dy = tr.y1[i] - y[i];
                        let bspl = h * k[0][i] - dy;
                        rcont[0][i] = y[i];
                        rcont[1][i] = dy;
                        rcont[2][i] = bspl;
                        rcont[3][i] = dy - h * k[6][i] - bspl;
                        rcont[4][i] = h
                            * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
                    }
                    let t1 = if clipped { t_limit } else { t + h };
                    self.t = t1;
                    self.y = tr.y1;
                    self.k1 = k[6];
                    self.accepted += 1;
                    return Ok(Step { t0: t, t1, y0: y, y1: tr.y1, k1, rcont });
                }
                Ok(tr) => {
                    let fac = (tr.err.powf(0.2) / SAFETY).min(1.0 / FAC_MIN);
                    self.h = h / fac;
                    self.rejected += 1;
                }
                Err(e) => {
                    if h <= self.cfg.hmin {
                        return Err(e);
                    }
                    self.h = h * 0.25;
                    self.rejected += 1;
                }
            }
        }
    }
}

/// Root of `phi` on `[a, b]` with `phi(a)` and `phi(b)` of opposite signs, by
/// the Illinois variant of regula falsi with a bisection safeguard.
pub fn illinois<G>(mut phi: G, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, gtol: f64) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok((a, fa));
    }
    if fb == 0.0 {
        return Ok((b, fb));
    }
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for it in 0..200 {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) || it % 8 == 7 {
            c = 0.5 * (a + b);
        }
        let fc = phi(c)?;
        if fc.abs() < best.1.abs() {
            best = (c, fc);
        }
        if fc.abs() <= gtol || (b - a).abs() <= 4.0 * f64::EPSILON * c.abs().max(1e-300) {
            return Ok(best);
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let f = |_t: f64, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let mut s = Dopri5::new(f, 0.0, [1.0, 0.0], OdeConfig { hmax: 0.5, ..Default::default() }).unwrap();
        let tend = 2.0 * std::f64::consts::PI;
        while s.t() < tend {
            s.step(tend).unwrap();
        }
        let y = s.y();
        assert!((y[0] - 1.0).abs() < 1e-9 && y[1].abs() < 1e-9, "{y:?}");
    }

    #[test]
    fn dense_output_is_fourth_order_accurate() {
        let f = |_t: f64, y: &[f64; 1]| Ok([y[0]]);
        let mut s = Dopri5::new(f, 0.0, [1.0], OdeConfig { rtol: 1e-8, atol: 1e-10, hmax: 0.2, ..Default::default() }).unwrap();
        let mut worst: f64 = 0.0;
        while s.t() < 2.0 {
            let st = s.step(2.0).unwrap();
            for k in 1..10 {
                let t = st.t0 + st.h() * k as f64 / 10.0;
                worst = worst.max((st.dense(t)[0] - t.exp()).abs() / t.exp());
            }
            assert_eq!(st.dense(st.t0), st.y0);
        }
        assert!(worst < 1e-7, "{worst}");
    }

    #[test]
    fn illinois_finds_cos_root() {
        let (x, fx) = illinois(|x| Ok(x.cos()), 1.0, 1f64.cos(), 2.0, 2f64.cos(), 1e-14).unwrap();
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-13 && fx.abs() <= 1e-14);
    }

    #[test]
    fn rhs_failure_shrinks_step() {
        // field undefined beyond t = 1.0005; the limit keeps steps inside
        let f = |t: f64, y: &[f64; 1]| {
            if t > 1.0005 {
                Err(Error::Singular("test"))
            } else {
                Ok([y[0]])
            }
        };
        let mut s = Dopri5::new(f, 0.0, [1.0], OdeConfig { hmax: 0.3, ..Default::default() }).unwrap();
        while s.t() < 1.0 {
            s.step(1.0).unwrap();
        }
        assert!((s.y()[0] - 1f64.exp()).abs() < 1e-9);
    }
}
