//! Small fixed-capacity vectors and the [`State`] type carried by fronts.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

/// Largest system dimension supported by the built-in solvers.
pub const MAX_DIM: usize = 2;

/// A stack-allocated vector of length `1..=MAX_DIM`.
#[derive(Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct Vector {
    len: usize,
    data: [f64; MAX_DIM],
}

impl Vector {
    pub fn zeros(len: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&len), "dimension {len} unsupported");
        Vector { len, data: [0.0; MAX_DIM] }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut v = Vector::zeros(values.len());
        v.data[..values.len()].copy_from_slice(values);
        v
    }

    pub fn scalar(x: f64) -> Self {
        Vector::from_slice(&[x])
    }

    pub fn pair(x: f64, y: f64) -> Self {
        Vector::from_slice(&[x, y])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data[..self.len]
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.as_slice().iter()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// ℓ1 norm, used for total variation and L1 distances.
    pub fn norm1(&self) -> f64 {
        self.iter().map(|x| x.abs()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn with(mut self, i: usize, value: f64) -> Self {
        self[i] = value;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }

    /// 2-D wedge product `self ∧ other`.
    pub fn wedge(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len, 2);
        self[0] * other[1] - self[1] * other[0]
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        assert!(i < self.len);
        &mut self.data[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(mut self, rhs: Vector) -> Vector {
        for i in 0..self.len {
            self.data[i] += rhs.data[i];
        }
        self
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(mut self, rhs: Vector) -> Vector {
        for i in 0..self.len {
            self.data[i] -= rhs.data[i];
        }
        self
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, mut rhs: Vector) -> Vector {
        for i in 0..rhs.len {
            rhs.data[i] *= self;
        }
        rhs
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.as_slice().to_vec()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = String;
    fn try_from(v: Vec<f64>) -> Result<Self, String> {
        if v.is_empty() || v.len() > MAX_DIM {
            return Err(format!("vector length {} not in 1..={MAX_DIM}", v.len()));
        }
        Ok(Vector::from_slice(&v))
    }
}

/// A point of state space, stored both in conservative variables `u` and in
/// Riemann coordinates `w`.
///
/// States are built by a model (see [`crate::models::System`]) so the two
/// representations are consistent. Equality compares the Riemann coordinates,
/// which are what the solvers manipulate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct State {
    pub u: Vector,
    pub w: Vector,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.w == other.w
    }
}

impl State {
    pub fn dim(&self) -> usize {
        self.u.len()
    }
}
