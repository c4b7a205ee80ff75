//! Central finite differences for Wirtinger derivatives of matrix-valued
//! functions of several complex variables.

use crate::error::Result;
use crate::jets::C64;
use crate::linalg::{c, CMat};

/// Step size and whether to apply one Richardson extrapolation (`(4 D(ε) − D(2ε)) / 3`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil {
    pub step: f64,
    pub richardson: bool,
}

impl Default for Stencil {
    fn default() -> Self {
        Stencil { step: 1e-3, richardson: true }
    }
}

#[derive(Clone, Copy, Debug)]
enum Axis {
    Re(usize),
    Im(usize),
}

fn displaced(z: &[C64], moves: &[(Axis, f64)]) -> Vec<C64> {
    let mut out = z.to_vec();
    for &(axis, h) in moves {
        match axis {
            Axis::Re(k) => out[k] += c(h, 0.0),
            Axis::Im(k) => out[k] += c(0.0, h),
        }
    }
    out
}

fn first<F>(f: &F, z: &[C64], a: Axis, h: f64) -> Result<CMat>
where
    F: Fn(&[C64]) -> Result<CMat>,
{
    let plus = f(&displaced(z, &[(a, h)]))?;
    let minus = f(&displaced(z, &[(a, -h)]))?;
    Ok((plus - minus) * c(0.5 / h, 0.0))
}

fn second<F>(f: &F, z: &[C64], a: Axis, b: Axis, h: f64, center: &CMat) -> Result<CMat>
where
    F: Fn(&[C64]) -> Result<CMat>,
{
    let same = match (a, b) {
        (Axis::Re(i), Axis::Re(j)) | (Axis::Im(i), Axis::Im(j)) => i == j,
        _ => false,
    };
    if same {
        let plus = f(&displaced(z, &[(a, h)]))?;
        let minus = f(&displaced(z, &[(a, -h)]))?;
        return Ok((plus + minus - center * c(2.0, 0.0)) * c(1.0 / (h * h), 0.0));
    }
    let pp = f(&displaced(z, &[(a, h), (b, h)]))?;
    let pm = f(&displaced(z, &[(a, h), (b, -h)]))?;
    let mp = f(&displaced(z, &[(a, -h), (b, h)]))?;
    let mm = f(&displaced(z, &[(a, -h), (b, -h)]))?;
    Ok((pp - pm - mp + mm) * c(1.0 / (4.0 * h * h), 0.0))
}

fn extrapolate<G>(s: &Stencil, g: G) -> Result<CMat>
where
    G: Fn(f64) -> Result<CMat>,
{
    let d1 = g(s.step)?;
    if !s.richardson {
        return Ok(d1);
    }
    let d2 = g(2.0 * s.step)?;
    Ok((d1 * c(4.0, 0.0) - d2) * c(1.0 / 3.0, 0.0))
}

/// `∂f/∂z^k`
pub fn d_holo<F>(f: &F, z: &[C64], k: usize, s: &Stencil) -> Result<CMat>
where
    F: Fn(&[C64]) -> Result<CMat>,
{
    extrapolate(s, |h| {
        let dx = first(f, z, Axis::Re(k), h)?;
        let dy = first(f, z, Axis::Im(k), h)?;
        Ok((dx - dy * c(0.0, 1.0)) * c(0.5, 0.0))
    })
}

/// `∂f/∂z̄^k`
pub fn d_anti<F>(f: &F, z: &[C64], k: usize, s: &Stencil) -> Result<CMat>
where
    F: Fn(&[C64]) -> Result<CMat>,
{
    extrapolate(s, |h| {
        let dx = first(f, z, Axis::Re(k), h)?;
        let dy = first(f, z, Axis::Im(k), h)?;
        Ok((dx + dy * c(0.0, 1.0)) * c(0.5, 0.0))
    })
}

/// `∂²f/∂z^k∂z̄^l = ¼ (f_{x_k x_l} + f_{y_k y_l} + i (f_{x_k y_l} − f_{y_k x_l}))`
pub fn d_mixed<F>(f: &F, z: &[C64], k: usize, l: usize, center: &CMat, s: &Stencil) -> Result<CMat>
where
    F: Fn(&[C64]) -> Result<CMat>,
{
    extrapolate(s, |h| {
        let xx = second(f, z, Axis::Re(k), Axis::Re(l), h, center)?;
        let yy = second(f, z, Axis::Im(k), Axis::Im(l), h, center)?;
        let xy = second(f, z, Axis::Re(k), Axis::Im(l), h, center)?;
        let yx = second(f, z, Axis::Im(k), Axis::Re(l), h, center)?;
        Ok((xx + yy + (xy - yx) * c(0.0, 1.0)) * c(0.25, 0.0))
    })
}
