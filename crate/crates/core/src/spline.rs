//! Clamped cubic spline with end slopes taken from the cubic through the
//! four nearest samples, so any cubic (in particular any parabola) is
//! reproduced exactly.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct CubicSpline {
    z: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

fn end_slope(z: &[f64], y: &[f64]) -> f64 {
    // derivative at z[0] of the Lagrange cubic through the first four points
    let z0 = z[0];
    let mut d = 0.0;
    for j in 0..4 {
        let mut deriv = 0.0;
        if j == 0 {
            for zm in &z[1..4] {
                deriv += 1.0 / (z0 - zm);
            }
        } else {
            let mut num = 1.0;
            let mut den = 1.0;
            for m in 0..4 {
                if m != j {
                    den *= z[j] - z[m];
                    if m != 0 {
                        num *= z0 - z[m];
                    }
                }
            }
            deriv = num / den;
        }
        d += y[j] * deriv;
    }
    d
}

impl CubicSpline {
    pub fn new(z: &[f64], y: &[f64]) -> Result<Self> {
        let n = z.len();
        if n != y.len() {
            return Err(Error::domain("spline abscissae and ordinates differ in length"));
        }
        if n < 4 {
            return Err(Error::domain("need at least 4 samples"));
        }
        if z.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("samples must be strictly increasing"));
        }
        if z.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::domain("samples must be finite"));
        }
        let s0 = end_slope(&z[..4], &y[..4]);
        let zr: Vec<f64> = z[n - 4..].iter().rev().copied().collect();
        let yr: Vec<f64> = y[n - 4..].iter().rev().copied().collect();
        let sn = end_slope(&zr, &yr);

        let h: Vec<f64> = z.windows(2).map(|w| w[1] - w[0]).collect();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut r = vec![0.0; n];
        b[0] = 2.0 * h[0];
        c[0] = h[0];
        r[0] = 6.0 * ((y[1] - y[0]) / h[0] - s0);
        for i in 1..n - 1 {
            a[i] = h[i - 1];
            b[i] = 2.0 * (h[i - 1] + h[i]);
            c[i] = h[i];
            r[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        a[n - 1] = h[n - 2];
        b[n - 1] = 2.0 * h[n - 2];
        r[n - 1] = 6.0 * (sn - (y[n - 1] - y[n - 2]) / h[n - 2]);

        // Thomas algorithm
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            r[i] -= w * r[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = r[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (r[i] - c[i] * m[i + 1]) / b[i];
        }
        Ok(CubicSpline {
            z: z.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.z[0], *self.z.last().unwrap())
    }

    fn interval(&self, t: f64) -> usize {
        let i = self.z.partition_point(|&zi| zi <= t);
        i.saturating_sub(1).min(self.z.len() - 2)
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.interval(t);
        let (z0, z1) = (self.z[i], self.z[i + 1]);
        let h = z1 - z0;
        let (a, b) = (z1 - t, t - z0);
        self.m[i] * a * a * a / (6.0 * h)
            + self.m[i + 1] * b * b * b / (6.0 * h)
            + (self.y[i] / h - self.m[i] * h / 6.0) * a
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.interval(t);
        let (z0, z1) = (self.z[i], self.z[i + 1]);
        let h = z1 - z0;
        let (a, b) = (z1 - t, t - z0);
        -self.m[i] * a * a / (2.0 * h) + self.m[i + 1] * b * b / (2.0 * h)
            - (self.y[i] / h - self.m[i] * h / 6.0)
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |t: f64| 0.3 * t * t * t - 1.2 * t * t + 0.5 * t - 2.0;
        let df = |t: f64| 0.9 * t * t - 2.4 * t + 0.5;
        let z: Vec<f64> = (0..12).map(|i| i as f64 * 0.37 + 0.01 * (i * i) as f64).collect();
        let y: Vec<f64> = z.iter().map(|&t| f(t)).collect();
        let s = CubicSpline::new(&z, &y).unwrap();
        for k in 0..100 {
            let t = z[0] + (z[11] - z[0]) * k as f64 / 99.0;
            assert!((s.value(t) - f(t)).abs() < 1e-11);
            assert!((s.derivative(t) - df(t)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_unsorted() {
        assert!(CubicSpline::new(&[0.0, 1.0, 1.0, 2.0], &[0.0; 4]).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0, 2.0], &[0.0; 3]).is_err());
    }
}
