use crate::error::{Error, Result};

/// A real grid function on the uniform periodic grid of 𝕋ᴾ.
///
/// Values are stored row-major (last axis fastest); cell `i` along axis `j`
/// has center `(i + ½)/Mⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusField {
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl TorusField {
    pub fn new(shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        validate_shape(&shape)?;
        let len: usize = shape.iter().product();
        if values.len() != len {
            return Err(Error::InvalidInput(format!(
                "field has {} values, shape needs {len}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at cell {i}")));
        }
        Ok(TorusField { shape, values })
    }

    pub fn zeros(shape: &[usize]) -> Result<Self> {
        validate_shape(shape)?;
        Ok(TorusField {
            shape: shape.to_vec(),
            values: vec![0.0; shape.iter().product()],
        })
    }

    pub fn constant(shape: &[usize], c: f64) -> Result<Self> {
        let mut f = Self::zeros(shape)?;
        f.values.iter_mut().for_each(|v| *v = c);
        Ok(f)
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let mut field = Self::zeros(shape)?;
        let mut y = vec![0.0; shape.len()];
        for idx in 0..field.values.len() {
            field.cell_center_into(idx, &mut y);
            field.values[idx] = f(&y);
        }
        if field.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("sampled function is not finite".into()));
        }
        Ok(field)
    }

    pub(crate) fn from_raw(shape: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), values.len());
        TorusField { shape, values }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub(crate) fn values_mut_vec(&mut self) -> &mut Vec<f64> {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Grid spacing 1/Mⱼ per axis.
    pub fn spacing(&self) -> Vec<f64> {
        self.shape.iter().map(|&m| 1.0 / m as f64).collect()
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.shape)
    }

    pub fn cell_center(&self, idx: usize) -> Vec<f64> {
        let mut y = vec![0.0; self.shape.len()];
        self.cell_center_into(idx, &mut y);
        y
    }

    fn cell_center_into(&self, idx: usize, y: &mut [f64]) {
        let mut rem = idx;
        for axis in (0..self.shape.len()).rev() {
            let m = self.shape[axis];
            y[axis] = ((rem % m) as f64 + 0.5) / m as f64;
            rem /= m;
        }
    }

    pub fn cell_volume(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    /// Midpoint rule for ∫ v dy.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.cell_volume()
    }

    pub fn l2(&self) -> f64 {
        self.lq(2.0)
    }

    /// `(∫ |v|^q dy)^{1/q}` by the midpoint rule, `q >= 1`.
    pub fn lq(&self, q: f64) -> f64 {
        assert!(q >= 1.0, "torus_lq needs q >= 1, got {q}");
        if q == 1.0 {
            return self.l1();
        }
        let s: f64 = self.values.iter().map(|v| v.abs().powf(q)).sum();
        (s * self.cell_volume()).powf(1.0 / q)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    /// ‖self − other‖_{L¹(𝕋ᴾ)}.
    pub fn l1_distance(&self, other: &TorusField) -> f64 {
        assert_eq!(self.shape, other.shape, "shape mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.cell_volume()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: f64, other: &TorusField) {
        assert_eq!(self.shape, other.shape, "shape mismatch");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn scaled(&self, c: f64) -> TorusField {
        TorusField {
            shape: self.shape.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Periodic multilinear interpolation at an arbitrary point of ℝᴾ.
    pub fn interpolate(&self, y: &[f64]) -> f64 {
        assert_eq!(y.len(), self.shape.len());
        let strides = self.strides();
        let p = self.shape.len();
        let mut base = vec![0usize; p];
        let mut frac = vec![0.0; p];
        for axis in 0..p {
            let m = self.shape[axis] as f64;
            // cell centers sit at (i+½)/M
            let s = (y[axis].rem_euclid(1.0)) * m - 0.5;
            let fl = s.floor();
            frac[axis] = s - fl;
            base[axis] = (fl as i64).rem_euclid(self.shape[axis] as i64) as usize;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << p) {
            let mut w = 1.0;
            let mut idx = 0;
            for axis in 0..p {
                let up = (corner >> axis) & 1 == 1;
                let i = if up {
                    (base[axis] + 1) % self.shape[axis]
                } else {
                    base[axis]
                };
                w *= if up { frac[axis] } else { 1.0 - frac[axis] };
                idx += i * strides[axis];
            }
            acc += w * self.values[idx];
        }
        acc
    }
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for axis in (0..shape.len().saturating_sub(1)).rev() {
        s[axis] = s[axis + 1] * shape[axis + 1];
    }
    s
}

fn validate_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(Error::InvalidInput(format!("invalid grid shape {shape:?}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn constant_norms() {
        let f = TorusField::constant(&[8, 4], -2.5).unwrap();
        assert!((f.l1() - 2.5).abs() < 1e-15);
        assert!((f.l2() - 2.5).abs() < 1e-15);
        assert!((f.lq(3.5) - 2.5).abs() < 1e-14);
        assert!((f.mean() + 2.5).abs() < 1e-15);
    }

    #[test]
    fn cosine_l1_and_l2() {
        for &m in &[64usize, 128, 256] {
            let f = TorusField::from_fn(&[m], |y| (2.0 * PI * y[0]).cos()).unwrap();
            let h = 1.0 / m as f64;
            assert!((f.l1() - 2.0 / PI).abs() < 2.0 * h * h, "m={m}");
            assert!((f.l2() - FRAC_1_SQRT_2).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn centers_and_strides() {
        let f = TorusField::zeros(&[4, 2]).unwrap();
        assert_eq!(f.strides(), vec![2, 1]);
        assert_eq!(f.cell_center(3), vec![0.375, 0.75]);
    }

    #[test]
    fn interpolation_reproduces_nodes_and_is_periodic() {
        let f = TorusField::from_fn(&[16, 8], |y| (2.0 * PI * y[0]).sin() + y[1]).unwrap();
        for idx in [0usize, 5, 77, 127] {
            let y = f.cell_center(idx);
            assert!((f.interpolate(&y) - f.values()[idx]).abs() < 1e-12);
            let shifted: Vec<f64> = y.iter().map(|v| v + 3.0).collect();
            assert!((f.interpolate(&shifted) - f.values()[idx]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(TorusField::new(vec![2], vec![1.0]).is_err());
        assert!(TorusField::new(vec![2], vec![1.0, f64::NAN]).is_err());
        assert!(TorusField::zeros(&[]).is_err());
    }
}
