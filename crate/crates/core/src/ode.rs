//! Fixed-step classical Runge–Kutta integration of linear systems
//! `dY/ds = M(s)·Y`, where `Y` is a vector or a matrix of column solutions.

use nalgebra::{ComplexField, SMatrix};

use crate::{Error, Result};

/// Number of equal steps covering `[s0, s1]` with spacing at most `h`.
pub fn step_count(s0: f64, s1: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidStep(h));
    }
    if !(s1 >= s0) || !s0.is_finite() || !s1.is_finite() {
        return Err(Error::param("s_range", "need finite s_end >= s_start"));
    }
    let ratio = (s1 - s0) / h;
    // Absorb round-off so that an exact multiple of h is not bumped up.
    Ok((ratio - 1e-9).ceil().max(0.0) as usize)
}

/// Integrates `dY/ds = M(s)·Y` from `s0` to `s1` and returns every step
/// `(s, Y(s))`, starting with `(s0, y0)` and ending exactly at `s1`.
pub fn rk4_linear<T, const R: usize, const C: usize, F>(
    m: F,
    y0: SMatrix<T, R, C>,
    s0: f64,
    s1: f64,
    h: f64,
) -> Result<Vec<(f64, SMatrix<T, R, C>)>>
where
    T: ComplexField<RealField = f64> + Copy,
    F: Fn(f64) -> Result<SMatrix<T, R, R>>,
{
    let n = step_count(s0, s1, h)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push((s0, y0));
    if n == 0 {
        return Ok(out);
    }
    let dt = (s1 - s0) / n as f64;
    let half = T::from_real(0.5 * dt);
    let full = T::from_real(dt);
    let sixth = T::from_real(dt / 6.0);
    let two = T::from_real(2.0);
    let mut y = y0;
    let mut m_start = m(s0)?;
    for k in 0..n {
        let s = s0 + k as f64 * dt;
        let s_end = if k + 1 == n { s1 } else { s0 + (k + 1) as f64 * dt };
        let m_mid = m(s + 0.5 * dt)?;
        let m_end = m(s_end)?;
        let k1 = m_start * y;
        let k2 = m_mid * (y + k1 * half);
        let k3 = m_mid * (y + k2 * half);
        let k4 = m_end * (y + k3 * full);
        y += (k1 + k2 * two + k3 * two + k4) * sixth;
        out.push((s_end, y));
        m_start = m_end;
    }
    Ok(out)
}
