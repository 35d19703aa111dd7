//! Discrete Fourier analysis of torus fields.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::ap::{FreqIndex, TorusField};

/// Normalised DFT `v̂_n = M⁻ᴾ Σ_i v_i e^{−2πi n·i/M}` stored in the field's
/// own index layout. The half-cell offset of the centers only rotates
/// phases, so moduli are those of the Fourier coefficients of the samples.
pub fn dft(field: &TorusField) -> Vec<Complex64> {
    let shape = field.shape();
    let strides = field.strides();
    let mut data: Vec<Complex64> = field
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let mut line = Vec::new();
    for axis in 0..shape.len() {
        let m = shape[axis];
        if m == 1 {
            continue;
        }
        let fft = planner.plan_fft_forward(m);
        let stride = strides[axis];
        let outer = data.len() / m;
        for o in 0..outer {
            // base index of the o-th line along `axis`
            let hi = o / stride;
            let lo = o % stride;
            let base = hi * stride * m + lo;
            line.clear();
            line.extend((0..m).map(|i| data[base + i * stride]));
            fft.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                data[base + i * stride] = *v;
            }
        }
    }
    let scale = 1.0 / data.len() as f64;
    data.iter_mut().for_each(|c| *c *= scale);
    data
}

/// Signed wavenumber of DFT index `i` on an axis of length `m`, in `(−m/2, m/2]`.
pub fn wavenumber(i: usize, m: usize) -> i64 {
    if 2 * i <= m {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

/// Discrete Hˢ norm `(Σ_n (1 + |n|²)^s |v̂_n|²)^{1/2}`.
pub fn sobolev_norm(field: &TorusField, s: f64) -> f64 {
    let coeffs = dft(field);
    sobolev_norm_of(field.shape(), &coeffs, s)
}

pub(crate) fn sobolev_norm_of(shape: &[usize], coeffs: &[Complex64], s: f64) -> f64 {
    let strides = crate::ap::strides(shape);
    let mut acc = 0.0;
    for (idx, c) in coeffs.iter().enumerate() {
        let mut n2 = 0.0;
        for axis in 0..shape.len() {
            let i = (idx / strides[axis]) % shape[axis];
            let k = wavenumber(i, shape[axis]) as f64;
            n2 += k * k;
        }
        acc += (1.0 + n2).powf(s) * c.norm_sqr();
    }
    acc.sqrt()
}

/// `|v̂_n|` for a single torus mode (modes beyond the grid alias onto it).
pub fn mode_modulus(field: &TorusField, n: &FreqIndex) -> f64 {
    let coeffs = dft(field);
    mode_modulus_of(field, &coeffs, n)
}

pub(crate) fn mode_modulus_of(field: &TorusField, coeffs: &[Complex64], n: &FreqIndex) -> f64 {
    let shape = field.shape();
    let strides = field.strides();
    let idx: usize = n
        .0
        .iter()
        .zip(shape)
        .zip(&strides)
        .map(|((&k, &m), &s)| (k as i64).rem_euclid(m as i64) as usize * s)
        .sum();
    coeffs[idx].norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_norm() {
        let f = TorusField::constant(&[32], -1.5).unwrap();
        assert!((sobolev_norm(&f, 0.3) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn cosine_h1_norm_is_one() {
        let f = TorusField::from_fn(&[64], |y| (2.0 * PI * y[0]).cos()).unwrap();
        assert!((sobolev_norm(&f, 1.0) - 1.0).abs() < 1e-13);
        assert!((mode_modulus(&f, &FreqIndex(vec![1])) - 0.5).abs() < 1e-14);
        assert!(mode_modulus(&f, &FreqIndex(vec![2])) < 1e-14);
    }

    #[test]
    fn two_dimensional_modes() {
        let f = TorusField::from_fn(&[16, 8], |y| (2.0 * PI * (2.0 * y[0] - 3.0 * y[1])).sin())
            .unwrap();
        assert!((mode_modulus(&f, &FreqIndex(vec![2, -3])) - 0.5).abs() < 1e-13);
        assert!((mode_modulus(&f, &FreqIndex(vec![-2, 3])) - 0.5).abs() < 1e-13);
        // |n|² = 13
        let expect = (2.0 * 0.25 * 14f64.powf(0.5)).sqrt();
        assert!((sobolev_norm(&f, 0.5) - expect).abs() < 1e-12);
    }

    #[test]
    fn h0_is_l2() {
        let f = TorusField::from_fn(&[8, 16], |y| (y[0] * 7.0).sin() + y[1] * y[1]).unwrap();
        assert!((sobolev_norm(&f, 0.0) - f.l2()).abs() < 1e-13);
    }
}
