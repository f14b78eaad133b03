use std::ops::{Add, Mul, Neg, Sub};

/// Value, gradient and Hessian of a scalar function of `d` parameters.
///
/// Arithmetic propagates all three exactly (up to rounding). Hessian
/// entries are only ever computed for `i <= j` and mirrored, so the
/// matrix is symmetric bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `d x d`.
    pub hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(value: f64, d: usize) -> Jet2 {
        Jet2 { value, grad: vec![0.0; d], hess: vec![0.0; d * d] }
    }

    /// The coordinate function for parameter `index`.
    pub fn variable(value: f64, index: usize, d: usize) -> Jet2 {
        let mut j = Jet2::constant(value, d);
        j.grad[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    fn build(value: f64, grad: Vec<f64>, mut entry: impl FnMut(usize, usize) -> f64) -> Jet2 {
        let d = grad.len();
        let mut hess = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v = entry(i, j);
                hess[i * d + j] = v;
                hess[j * d + i] = v;
            }
        }
        Jet2 { value, grad, hess }
    }

    /// Applies a scalar function given its value and first two derivatives at `self.value`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Jet2 {
        let d = self.dim();
        let grad = self.grad.iter().map(|g| f1 * g).collect();
        Jet2::build(f0, grad, |i, j| f2 * self.grad[i] * self.grad[j] + f1 * self.hess[i * d + j])
    }

    pub fn scale(&self, c: f64) -> Jet2 {
        Jet2 {
            value: c * self.value,
            grad: self.grad.iter().map(|g| c * g).collect(),
            hess: self.hess.iter().map(|h| c * h).collect(),
        }
    }

    pub fn recip(&self) -> Jet2 {
        let u = self.value;
        self.chain(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))
    }

    pub fn powi(&self, k: i32) -> Jet2 {
        match k {
            0 => return Jet2::constant(1.0, self.dim()),
            1 => return self.clone(),
            _ => {}
        }
        let u = self.value;
        let kf = k as f64;
        self.chain(u.powi(k), kf * u.powi(k - 1), kf * (kf - 1.0) * u.powi(k - 2))
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tan(&self) -> Jet2 {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2)
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Jet2 {
        let u = self.value;
        self.chain(u.ln(), 1.0 / u, -1.0 / (u * u))
    }

    pub fn sqrt(&self) -> Jet2 {
        let r = self.value.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.value))
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, o: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value + o.value,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a + b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, o: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value - o.value,
            grad: self.grad.iter().zip(&o.grad).map(|(a, b)| a - b).collect(),
            hess: self.hess.iter().zip(&o.hess).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, o: &Jet2) -> Jet2 {
        let d = self.dim();
        let (a, b) = (self.value, o.value);
        let grad = self.grad.iter().zip(&o.grad).map(|(ga, gb)| a * gb + b * ga).collect();
        Jet2::build(a * b, grad, |i, j| {
            a * o.hess[i * d + j]
                + b * self.hess[i * d + j]
                + (self.grad[i] * o.grad[j] + self.grad[j] * o.grad[i])
        })
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}
