//! Rational transfer functions in the Laplace variable `s`.
//!
//! Coefficients are stored in ascending powers of `s`: `[a0, a1, a2]` is
//! `a0 + a1·s + a2·s²`. Arithmetic never cancels poles against zeros; only
//! [`RationalTf::simplify`] removes factors, and only when they divide out
//! exactly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{ensure_positive, Error, Result};

/// Real polynomial in `s`, ascending powers, no trailing zeros. The zero
/// polynomial is `[0.0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(Vec<f64>);

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly(coeffs)
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.len() == 1 && self.0[0] == 0.0
    }

    fn is_constant(&self) -> bool {
        self.0.len() == 1
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    /// Sum of `|a_k|·|s|^k`, the scale against which a near-zero value is
    /// judged.
    fn magnitude_bound(&self, r: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * r + c.abs())
    }

    fn lowest_nonzero(&self) -> usize {
        self.0.iter().position(|&c| c != 0.0).unwrap_or(0)
    }

    fn shift_down(&self, k: usize) -> Poly {
        Poly::new(self.0[k..].to_vec())
    }

    fn scale(&self, k: f64) -> Poly {
        Poly::new(self.0.iter().map(|c| c * k).collect())
    }

    /// Long division; `None` unless the remainder is exactly zero.
    fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() || divisor.degree() > self.degree() {
            return None;
        }
        let mut rem = self.0.clone();
        let dd = divisor.degree();
        let lead = divisor.0[dd];
        let mut quot = vec![0.0; self.degree() - dd + 1];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dd] / lead;
            quot[i] = q;
            for (j, &d) in divisor.0.iter().enumerate() {
                rem[i + j] -= q * d;
            }
            // the leading term is eliminated by construction
            rem[i + dd] = 0.0;
        }
        if rem.iter().all(|&r| r == 0.0) {
            Some(Poly::new(quot))
        } else {
            None
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        let c = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) + rhs.0.get(i).copied().unwrap_or(0.0))
            .collect();
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut c = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

/// Ratio of two real polynomials in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTf {
    num: Poly,
    den: Poly,
}

impl RationalTf {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        Self::from_polys(Poly::new(num), Poly::new(den))
    }

    pub fn from_polys(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument(
                "denominator is the zero polynomial".into(),
            ));
        }
        Ok(Self { num, den })
    }

    pub fn constant(k: f64) -> Self {
        Self {
            num: Poly::constant(k),
            den: Poly::constant(1.0),
        }
    }

    /// The Laplace variable itself.
    pub fn s() -> Self {
        Self {
            num: Poly::new(vec![0.0, 1.0]),
            den: Poly::constant(1.0),
        }
    }

    /// `1 / s`.
    pub fn integrator() -> Self {
        Self {
            num: Poly::constant(1.0),
            den: Poly::new(vec![0.0, 1.0]),
        }
    }

    pub fn num(&self) -> &[f64] {
        self.num.coeffs()
    }

    pub fn den(&self) -> &[f64] {
        self.den.coeffs()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    /// Value at `s = jω`.
    pub fn eval(&self, omega: f64) -> Result<Complex64> {
        self.eval_at(Complex64::new(0.0, omega))
    }

    pub fn eval_at(&self, s: Complex64) -> Result<Complex64> {
        let d = self.den.eval(s);
        if d.norm() <= 1e-12 * self.den.magnitude_bound(s.norm()) {
            return Err(Error::PoleEvaluation { omega: s.im });
        }
        Ok(self.num.eval(s) / d)
    }

    /// Cancels common factors that divide out exactly: powers of `s` first,
    /// then whole polynomial factors whose long-division remainder is exactly
    /// zero. Repeats until nothing changes, so the result is a fixed point.
    pub fn simplify(&self) -> Self {
        if self.num.is_zero() {
            return Self::constant(0.0);
        }
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        loop {
            let k = num.lowest_nonzero().min(den.lowest_nonzero());
            if k > 0 {
                num = num.shift_down(k);
                den = den.shift_down(k);
                continue;
            }
            if !den.is_constant() {
                if let Some(q) = num.exact_div(&den) {
                    num = q;
                    den = Poly::constant(1.0);
                    continue;
                }
            }
            if !num.is_constant() {
                if let Some(q) = den.exact_div(&num) {
                    den = q;
                    num = Poly::constant(1.0);
                    continue;
                }
            }
            break;
        }
        if den.is_constant() && den.coeffs()[0] != 1.0 {
            num = num.scale(1.0 / den.coeffs()[0]);
            den = Poly::constant(1.0);
        }
        Self { num, den }
    }
}

impl Add for &RationalTf {
    type Output = RationalTf;
    fn add(self, rhs: &RationalTf) -> RationalTf {
        if self.den == rhs.den {
            return RationalTf {
                num: &self.num + &rhs.num,
                den: self.den.clone(),
            };
        }
        RationalTf {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }
}

impl Neg for &RationalTf {
    type Output = RationalTf;
    fn neg(self) -> RationalTf {
        RationalTf {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Sub for &RationalTf {
    type Output = RationalTf;
    fn sub(self, rhs: &RationalTf) -> RationalTf {
        self + &(-rhs)
    }
}

impl Mul for &RationalTf {
    type Output = RationalTf;
    fn mul(self, rhs: &RationalTf) -> RationalTf {
        RationalTf {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
    }
}

impl fmt::Display for RationalTf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn poly(p: &Poly) -> String {
            let terms: Vec<String> = p
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(k, c)| match k {
                    0 => format!("{c}"),
                    1 => format!("{c}·s"),
                    _ => format!("{c}·s^{k}"),
                })
                .collect();
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" + ")
            }
        }
        write!(f, "({}) / ({})", poly(&self.num), poly(&self.den))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqResponsePoint {
    pub omega: f64,
    pub value: Complex64,
}

impl FreqResponsePoint {
    pub fn mag(&self) -> f64 {
        self.value.norm()
    }

    pub fn phase_deg(&self) -> f64 {
        self.value.arg().to_degrees()
    }
}

/// Result of a frequency sweep. Grid points that landed exactly on a pole
/// are listed in `skipped` instead of `points`.
#[derive(Debug, Clone, PartialEq)]
pub struct BodeGrid {
    pub points: Vec<FreqResponsePoint>,
    pub skipped: Vec<f64>,
}

impl BodeGrid {
    pub const CSV_HEADER: &'static str = "omega_rad_s,re,im,mag,phase_deg";

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{}",
                p.omega,
                p.value.re,
                p.value.im,
                p.mag(),
                p.phase_deg()
            )?;
        }
        Ok(())
    }
}

/// `n` logarithmically spaced values from `min` to `max`, both included.
pub fn log_space(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    ensure_positive("min", min)?;
    if !(max > min) || n < 2 {
        return Err(Error::EmptyGrid);
    }
    let decades = (max / min).log10();
    let last = n - 1;
    Ok((0..n)
        .map(|i| match i {
            0 => min,
            i if i == last => max,
            i => min * 10f64.powf(decades * i as f64 / last as f64),
        })
        .collect())
}

pub fn bode_grid(
    tf: &RationalTf,
    omega_min: f64,
    omega_max: f64,
    points_per_decade: usize,
) -> Result<BodeGrid> {
    if points_per_decade == 0 || !(omega_min > 0.0) || !(omega_max > omega_min) {
        return Err(Error::EmptyGrid);
    }
    let decades = (omega_max / omega_min).log10();
    let intervals = ((decades * points_per_decade as f64).round() as usize).max(1);
    let mut grid = BodeGrid {
        points: Vec::with_capacity(intervals + 1),
        skipped: Vec::new(),
    };
    for omega in log_space(omega_min, omega_max, intervals + 1)? {
        match tf.eval(omega) {
            Ok(value) => grid.points.push(FreqResponsePoint { omega, value }),
            Err(Error::PoleEvaluation { .. }) => grid.skipped.push(omega),
            Err(e) => return Err(e),
        }
    }
    Ok(grid)
}

/// Gain-crossover frequency `|T(jω)| = 1` within `[lo, hi]`, by bisection in
/// log-frequency. Requires `|T|` to cross unity exactly once in the bracket.
pub fn crossover_frequency(tf: &RationalTf, lo: f64, hi: f64) -> Result<f64> {
    ensure_positive("lo", lo)?;
    let f = |w: f64| -> Result<f64> { Ok(tf.eval(w)?.norm().ln()) };
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let fa = f(lo)?;
    let fb = f(hi)?;
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidArgument(format!(
            "no unity-gain crossing in [{lo}, {hi}] rad/s"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m.exp())?.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    Ok((0.5 * (a + b)).exp())
}
