use serde::{Deserialize, Serialize};

use crate::error::NumericError;

/// Values of the three Jacobi elliptic functions at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    pub u: f64,
    /// Modulus (not the parameter `m = k^2`).
    pub k: f64,
}

const AGM_TOL: f64 = 1e-15;
const AGM_MAX: usize = 32;

/// `sn(u, k)`, `cn(u, k)`, `dn(u, k)` by descending arithmetic-geometric mean.
///
/// `k` is the modulus; `k = 0` and `k = 1` short-circuit to the circular and
/// hyperbolic degenerations.
pub fn jacobi(u: f64, k: f64) -> Result<JacobiTriple, NumericError> {
    if !(0.0..=1.0).contains(&k) || k.is_nan() {
        return Err(NumericError::Modulus(k));
    }
    let triple = |sn: f64, cn: f64, dn: f64| JacobiTriple { sn, cn, dn, u, k };
    if k == 0.0 {
        return Ok(triple(u.sin(), u.cos(), 1.0));
    }
    if k == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok(triple(u.tanh(), sech, sech));
    }

    let mut a = [0.0f64; AGM_MAX + 1];
    let mut c = [0.0f64; AGM_MAX + 1];
    a[0] = 1.0;
    let mut b = (1.0 - k * k).sqrt();
    c[0] = k;
    let mut n = 0;
    while c[n].abs() > AGM_TOL && n < AGM_MAX {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = (an * b).sqrt();
        n += 1;
    }

    // phi_N = 2^N a_N u, then descend
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    // dn² = k'² + k² cn²: no cancellation, unlike cn / cos(φ₁ − φ₀) near cn = 0
    let dn = ((1.0 - k) * (1.0 + k) + k * k * cn * cn).sqrt();
    Ok(triple(sn, cn, dn))
}

/// Carlson's symmetric integral `R_F(x, y, z)` by duplication.
fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    loop {
        let mu = (x + y + z) / 3.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0)
                / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
}

/// Incomplete elliptic integral of the first kind `F(phi, k)` for
/// `|phi| <= pi/2`, so that `sn(F(phi, k), k) = sin(phi)`.
pub fn elliptic_f(phi: f64, k: f64) -> Result<f64, NumericError> {
    if !(0.0..=1.0).contains(&k) || k.is_nan() {
        return Err(NumericError::Modulus(k));
    }
    let s = phi.sin();
    let c = phi.cos();
    if k == 1.0 && c == 0.0 {
        return Ok(f64::INFINITY.copysign(phi));
    }
    Ok(s * carlson_rf(c * c, 1.0 - k * k * s * s, 1.0))
}
