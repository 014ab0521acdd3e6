use crate::scalar::Scalar;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre<T: Scalar>(order: usize) -> Vec<(T, T)> {
    assert!(order >= 1, "Gauss–Legendre order must be positive");
    // Newton in f64 on P_n, then round once; keeps f32 rules accurate too.
    let n = order;
    let mut out = vec![(0.0f64, 0.0f64); n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out[i] = (-z, w);
        out[n - 1 - i] = (z, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out.into_iter().map(|(x, w)| (T::lit(x), T::lit(w))).collect()
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite rule on `[a, b]` with `panels` equal panels of `order` points.
pub fn composite<T: Scalar>(a: T, b: T, panels: usize, order: usize) -> Vec<(T, T)> {
    let base = gauss_legendre::<T>(order);
    let h = (b - a) / T::from_usize_lossy(panels);
    let half = T::lit(0.5) * h;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + h * (T::from_usize_lossy(p) + T::lit(0.5));
        out.extend(base.iter().map(|&(x, w)| (mid + half * x, half * w)));
    }
    out
}
