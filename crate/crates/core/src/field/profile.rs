use crate::scalar::Scalar;

/// C^∞ step: 0 for `s ≤ 0`, 1 for `s ≥ 1`, built from `e^{-1/s}`.
#[inline]
pub fn smooth_step<T: Scalar>(s: T) -> T {
    if s <= T::zero() {
        T::zero()
    } else if s >= T::one() {
        T::one()
    } else {
        let z = s.recip() - (T::one() - s).recip();
        (T::one() + z.exp()).recip()
    }
}

/// Derivative of [`smooth_step`]: `ψ(1−ψ)(1/s² + 1/(1−s)²)`.
#[inline]
pub fn smooth_step_derivative<T: Scalar>(s: T) -> T {
    if s <= T::zero() || s >= T::one() {
        return T::zero();
    }
    let psi = smooth_step(s);
    let t = T::one() - s;
    psi * (T::one() - psi) * ((s * s).recip() + (t * t).recip())
}

/// Radial profile
/// `g(r) = A · r^a · exp(−(r/s)^m) · cos(k r) · ψ((r − r₀)/w) · φ_L(ln r)`
/// where every factor except the amplitude is optional and `φ_L` is a
/// smooth window equal to one on `|t| ≤ L − ρ` and zero for `|t| ≥ L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile<T> {
    pub amplitude: T,
    pub power: T,
    /// `(s, m)`.
    pub decay: Option<(T, T)>,
    pub oscillation: Option<T>,
    /// `(r₀, w)`: zero on `r ≤ r₀`, one on `r ≥ r₀ + w`.
    pub inner_cutoff: Option<(T, T)>,
    /// `(L, ρ)` in logarithmic radius.
    pub log_window: Option<(T, T)>,
}

impl<T: Scalar> Default for RadialProfile<T> {
    fn default() -> Self {
        RadialProfile {
            amplitude: T::one(),
            power: T::zero(),
            decay: None,
            oscillation: None,
            inner_cutoff: None,
            log_window: None,
        }
    }
}

impl<T: Scalar> RadialProfile<T> {
    /// `exp(−(r/s)^m)`.
    pub fn gaussian(scale: T, exponent: T) -> Self {
        RadialProfile {
            decay: Some((scale, exponent)),
            ..Default::default()
        }
    }

    pub fn with_power(mut self, a: T) -> Self {
        self.power = a;
        self
    }

    pub fn with_oscillation(mut self, k: T) -> Self {
        self.oscillation = Some(k);
        self
    }

    pub fn with_inner_cutoff(mut self, r0: T, width: T) -> Self {
        self.inner_cutoff = Some((r0, width));
        self
    }

    pub fn with_log_window(mut self, half_width: T, ramp: T) -> Self {
        self.log_window = Some((half_width, ramp));
        self
    }

    pub fn with_amplitude(mut self, a: T) -> Self {
        self.amplitude = a;
        self
    }

    /// Radius below which the profile vanishes identically.
    pub fn inner_radius(&self) -> T {
        let mut r = T::zero();
        if let Some((r0, _)) = self.inner_cutoff {
            r = r.max(r0);
        }
        if let Some((l, _)) = self.log_window {
            r = r.max((-l).exp());
        }
        r
    }

    /// Radius beyond which the profile vanishes identically, if any.
    pub fn compact_outer_radius(&self) -> Option<T> {
        self.log_window.map(|(l, _)| l.exp())
    }

    /// `(g(r), g'(r))` for `r ≥ 0`.
    pub fn value_and_derivative(&self, r: T) -> (T, T) {
        let zero = T::zero();
        if r < zero {
            return (zero, zero);
        }
        let inner = self.inner_radius();
        if inner > zero && r <= inner {
            return (zero, zero);
        }
        if let Some(outer) = self.compact_outer_radius() {
            if r >= outer {
                return (zero, zero);
            }
        }
        // Product rule over the factors: value v, log-free derivative d.
        let mut v = self.amplitude;
        let mut d = zero;
        let mut mul = |fv: T, fd: T| {
            d = d * fv + v * fd;
            v = v * fv;
        };
        if !self.power.is_zero() {
            if r.is_zero() {
                let pv = if self.power > zero { zero } else { T::infinity() };
                mul(pv, zero);
            } else {
                let pv = r.powf(self.power);
                mul(pv, self.power * pv / r);
            }
        }
        if let Some((s, m)) = self.decay {
            let u = (r / s).powf(m);
            let e = (-u).exp();
            let du = if r.is_zero() { zero } else { m * u / r };
            mul(e, -e * du);
        }
        if let Some(k) = self.oscillation {
            mul((k * r).cos(), -k * (k * r).sin());
        }
        if let Some((r0, w)) = self.inner_cutoff {
            let s = (r - r0) / w;
            mul(smooth_step(s), smooth_step_derivative(s) / w);
        }
        if let Some((l, rho)) = self.log_window {
            let t = r.ln();
            let a = (t + l) / rho;
            let b = (l - t) / rho;
            let (pa, pb) = (smooth_step(a), smooth_step(b));
            let (da, db) = (smooth_step_derivative(a), smooth_step_derivative(b));
            // d/dr = (1/r) d/dt
            mul(pa * pb, (da * pb - pa * db) / (rho * r));
        }
        (v, d)
    }

    pub fn value(&self, r: T) -> T {
        self.value_and_derivative(r).0
    }

    /// Smallest radius beyond which `|g| < rel · max|g|`, found by a
    /// logarithmic scan.
    pub fn decay_radius(&self, rel: T) -> T {
        if let Some(outer) = self.compact_outer_radius() {
            return outer;
        }
        let lo = T::lit(1e-3).max(self.inner_radius());
        let hi = T::lit(1e4);
        let steps = 6000usize;
        let ratio = (hi / lo).ln() / T::from_usize_lossy(steps);
        let mut peak = T::zero();
        let samples: Vec<(T, T)> = (0..=steps)
            .map(|i| {
                let r = lo * (ratio * T::from_usize_lossy(i)).exp();
                let v = self.value(r).abs();
                if v > peak {
                    peak = v;
                }
                (r, v)
            })
            .collect();
        let thresh = rel * peak;
        samples
            .iter()
            .rev()
            .find(|(_, v)| *v >= thresh)
            .map_or(hi, |(r, _)| *r * (ratio * T::lit(2.0)).exp())
    }
}
