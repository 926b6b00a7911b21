//! Triangle quadrature rules in barycentric form.
//!
//! Weights are normalised to sum to one, so an integral over a triangle `T`
//! is `|T| * sum(w_i f(x_i))`.

use crate::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    /// Highest total polynomial degree integrated exactly.
    pub order: usize,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// 12-point symmetric rule of degree 6 (Dunavant).
    pub fn symmetric6() -> Self {
        let mut nodes = Vec::with_capacity(12);
        let mut weights = Vec::with_capacity(12);
        for (a, w) in [
            (0.249_286_745_170_910_4, 0.116_786_275_726_379_4),
            (0.063_089_014_491_502_2, 0.050_844_906_370_206_8),
        ] {
            let b = 1.0 - 2.0 * a;
            for n in [[b, a, a], [a, b, a], [a, a, b]] {
                nodes.push(n);
                weights.push(w);
            }
        }
        let (a, b) = (0.053_145_049_844_816_9, 0.310_352_451_033_784_4);
        let c = 1.0 - a - b;
        for n in [
            [a, b, c],
            [a, c, b],
            [b, a, c],
            [b, c, a],
            [c, a, b],
            [c, b, a],
        ] {
            nodes.push(n);
            weights.push(0.082_851_075_618_373_6);
        }
        QuadratureRule {
            order: 6,
            nodes,
            weights,
        }
    }

    /// Collapsed (Duffy) tensor Gauss–Legendre rule with `n` points per
    /// direction; exact to degree `2n - 2`, all nodes interior, positive
    /// weights.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut nodes = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            let u = 0.5 * (1.0 + x[i]);
            for j in 0..n {
                let v = 0.5 * (1.0 + x[j]);
                let (s, t) = (u, v * (1.0 - u));
                nodes.push([1.0 - s - t, s, t]);
                // reference area 1/2 -> normalise to weight sum 1
                weights.push(2.0 * 0.25 * w[i] * w[j] * (1.0 - u));
            }
        }
        QuadratureRule {
            order: 2 * n - 2,
            nodes,
            weights,
        }
    }

    /// Degree-10 rule used on triangles touching a pole.
    pub fn order10() -> Self {
        Self::collapsed_gauss(6)
    }

    /// Smallest built-in rule exact to at least `order`.
    pub fn for_order(order: usize) -> Self {
        if order <= 6 {
            Self::symmetric6()
        } else {
            Self::collapsed_gauss(order / 2 + 1)
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Physical node positions on the triangle `(p0, p1, p2)`.
    pub fn points_on(&self, tri: [Point; 3]) -> impl Iterator<Item = (Point, [f64; 3], f64)> + '_ {
        self.nodes.iter().zip(&self.weights).map(move |(b, &w)| {
            let x = b[0] * tri[0][0] + b[1] * tri[1][0] + b[2] * tri[2][0];
            let y = b[0] * tri[0][1] + b[1] * tri[1][1] + b[2] * tri[2][1];
            ([x, y], *b, w)
        })
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}
