use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::finite;

/// Even-index Bernoulli numbers B_2, B_4, ..., B_30.
pub(crate) const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_nonpositive_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

/// `log(sin(pi z))` that stays finite for large `|Im z|`. The branch is not
/// the principal one; only `exp` of the result is meaningful.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 20.0 {
        (z * PI).sin().ln()
    } else if z.im > 0.0 {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z})
        Complex64::new(0.5f64.ln(), PI / 2.0) - i * PI * z + (-(2.0 * PI * i * z).exp()).ln_1p()
    } else {
        // sin(pi z) = (-i/2) e^{i pi z} (1 - e^{-2 pi i z})
        Complex64::new(0.5f64.ln(), -PI / 2.0) + i * PI * z + (-(-2.0 * PI * i * z).exp()).ln_1p()
    }
}

trait Ln1p {
    fn ln_1p(self) -> Self;
}

impl Ln1p for Complex64 {
    fn ln_1p(self) -> Self {
        if self.norm() < 1e-8 {
            self - self * self * 0.5
        } else {
            (Complex64::new(1.0, 0.0) + self).ln()
        }
    }
}

/// `log Gamma(s)` up to a multiple of `2 pi i`.
pub fn ln_gamma(s: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(s) {
        return Err(Error::Pole("gamma"));
    }
    if s.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - s;
        return finite(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(s) - ln_gamma_right(one_minus), "ln_gamma");
    }
    finite(ln_gamma_right(s), "ln_gamma")
}

/// Stirling series after shifting to `|z| >= 12`; requires `Re z >= 0.5`.
fn ln_gamma_right(s: Complex64) -> Complex64 {
    let mut z = s;
    let mut shift = Complex64::new(0.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    let mut count = 0;
    while z.norm() < 12.0 {
        prod *= z;
        z += 1.0;
        count += 1;
        if count % 8 == 0 {
            shift += prod.ln();
            prod = Complex64::new(1.0, 0.0);
        }
    }
    shift += prod.ln();
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = zinv;
    for (k, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += pow * (b / (n * (n - 1.0)));
        pow *= zinv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series - shift
}

/// Complex gamma function.
pub fn complex_gamma(s: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(s) {
        return Err(Error::Pole("gamma"));
    }
    if s.im == 0.0 && s.re > 0.0 && s.re < 170.0 {
        return Ok(Complex64::new(libm::tgamma(s.re), 0.0));
    }
    finite(ln_gamma(s)?.exp(), "complex_gamma")
}

/// Digamma for real positive argument.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("digamma: x = {x} must be positive")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut pow = inv2;
    let mut series = 0.0;
    for (k, b) in BERNOULLI_EVEN.iter().take(8).enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += b / n * pow;
        pow *= inv2;
    }
    Ok(acc + x.ln() - 0.5 / x - series)
}
