//! Bessel-function reference values for the unit disk.

use std::f64::consts::PI;

use crate::{Error, Result};

/// `J_ν(x)` from its power series; accurate for `0 ≤ x ≲ 20` and `ν ≥ 0`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    let q = -h * h;
    for k in 1..200 {
        let k = k as f64;
        term *= q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > h {
            break;
        }
    }
    sum
}

/// Lanczos approximation, valid for positive arguments.
fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// The `k`-th positive zero of `J_ν` (k ≥ 1), by scanning and bisection.
pub fn bessel_zero(nu: f64, k: usize) -> Result<f64> {
    if k == 0 || k > 5 || nu < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "zero index {k} for order {nu} out of range"
        )));
    }
    let step = 0.01;
    let mut found = 0;
    let mut x = step;
    let mut fx = bessel_j(nu, x);
    while x < 20.0 {
        let y = x + step;
        let fy = bessel_j(nu, y);
        if fx == 0.0 || fx.signum() != fy.signum() {
            found += 1;
            if found == k {
                return Ok(bisect(|t| bessel_j(nu, t), x, y));
            }
        }
        x = y;
        fx = fy;
    }
    Err(Error::InvalidParameter(
        "zero not found in scan range".into(),
    ))
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First Dirichlet eigenvalue of the unit disk, `j₀,₁²`.
pub fn disk_lambda1() -> f64 {
    let j = bessel_zero(0.0, 1).expect("first zero of J0 exists");
    j * j
}

/// Value at the centre of the L²-normalized, positive ground state of the unit disk.
pub fn disk_u1_origin() -> f64 {
    let j = bessel_zero(0.0, 1).expect("first zero of J0 exists");
    1.0 / (PI.sqrt() * bessel_j(1.0, j))
}

/// `2π u₁(0)²` for the unit disk.
pub fn disk_predicted_slope() -> f64 {
    let u = disk_u1_origin();
    2.0 * PI * u * u
}

/// Named reference values exposed by the command line.
pub fn named(which: &str) -> Result<f64> {
    Ok(match which {
        "j0_zero1" => bessel_zero(0.0, 1)?,
        "j0_zero2" => bessel_zero(0.0, 2)?,
        "j1_zero1" => bessel_zero(1.0, 1)?,
        "jhalf_zero1" => bessel_zero(0.5, 1)?,
        "j1_at_j0_zero1" => bessel_j(1.0, bessel_zero(0.0, 1)?),
        "disk_lambda1" => disk_lambda1(),
        "disk_u1_origin" => disk_u1_origin(),
        "disk_predicted_slope" => disk_predicted_slope(),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unknown oracle value `{which}`"
            )))
        }
    })
}

pub const NAMED: [&str; 8] = [
    "j0_zero1",
    "j0_zero2",
    "j1_zero1",
    "jhalf_zero1",
    "j1_at_j0_zero1",
    "disk_lambda1",
    "disk_u1_origin",
    "disk_predicted_slope",
];
