//! Certified Perron roots of nonnegative rational matrices.
//!
//! The spectral radius of a nonnegative matrix is its largest real
//! eigenvalue, so it is isolated exactly with a Sturm sequence of the
//! (square-free) characteristic polynomial. Comparisons against 1 are done in
//! exact arithmetic; the enclosure is refined by bisection on rationals.
//! A Collatz–Wielandt power iteration in floating point serves as an
//! independent cross-check, and 1×1 / 2×2 matrices are also solved in
//! closed form.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Square matrix of exact rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    size: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != size) {
            return Err(Error::InvalidMatrix(format!("row {bad} has {} entries, expected {size}", rows[bad].len())));
        }
        Ok(RationalMatrix { size, entries: rows.into_iter().flatten().collect() })
    }

    pub fn zeros(size: usize) -> Self {
        RationalMatrix { size, entries: vec![BigRational::zero(); size * size] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.size + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut BigRational {
        &mut self.entries[row * self.size + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigRational]> {
        self.entries.chunks(self.size)
    }

    pub fn row_sums(&self) -> Vec<BigRational> {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(|r| r.iter().map(to_f64).collect()).collect()
    }

    /// Entries rendered as `p/q` strings.
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.rows().map(|r| r.iter().map(|e| e.to_string()).collect()).collect()
    }

    fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        let n = self.size;
        let mut out = RationalMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        *out.get_mut(i, j) += a * b;
                    }
                }
            }
        }
        out
    }

    fn trace(&self) -> BigRational {
        (0..self.size).map(|i| self.get(i, i).clone()).sum()
    }
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    fn scale(&self, factor: &BigRational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    fn monic(&self) -> Polynomial {
        let inv = self.leading().recip();
        self.scale(&inv)
    }

    /// Quotient and remainder of Euclidean division.
    fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Polynomial::new(Vec::new()), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        let lead = divisor.leading().clone();
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let factor = &rem[k] / &lead;
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[k - dd + j] -= &factor * c;
            }
            quot[k - dd] = factor;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.monic() };
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Same roots, each with multiplicity one.
    pub fn square_free(&self) -> Polynomial {
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.monic();
        }
        self.div_rem(&g).0.monic()
    }
}

/// `det(λI − M)` by the Faddeev–LeVerrier recursion (exact over ℚ).
pub fn characteristic_polynomial(m: &RationalMatrix) -> Polynomial {
    let n = m.size();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut aux = RationalMatrix::zeros(n);
    for k in 1..=n {
        // aux_k = M·aux_{k-1} + c_{n-k+1}·I
        let mut next = m.mul(&aux);
        for i in 0..n {
            *next.get_mut(i, i) += &coeffs[n - k + 1];
        }
        let trace = m.mul(&next).trace();
        coeffs[n - k] = -trace / BigRational::from_integer(BigInt::from(k));
        aux = next;
    }
    Polynomial::new(coeffs)
}

/// Sturm chain of a square-free polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    chain: Vec<Polynomial>,
}

fn sign(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn count_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

impl SturmSequence {
    pub fn new(p: &Polynomial) -> Self {
        let first = p.square_free();
        let mut chain = vec![first.clone()];
        let mut prev = first;
        let mut cur = prev.derivative();
        while !cur.is_zero() {
            let (_, r) = prev.div_rem(&cur);
            chain.push(cur.clone());
            prev = cur;
            // positive rescaling keeps signs intact and curbs coefficient growth
            cur = if r.is_zero() { r } else { r.scale(&(-r.leading().abs().recip())) };
        }
        SturmSequence { chain }
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.chain[0]
    }

    fn variations(&self, x: &BigRational) -> usize {
        count_variations(self.chain.iter().map(|p| sign(&p.eval(x))))
    }

    fn variations_at_infinity(&self) -> usize {
        count_variations(self.chain.iter().map(|p| sign(p.leading())))
    }

    /// Number of distinct real roots in `(x, ∞)`.
    pub fn roots_above(&self, x: &BigRational) -> usize {
        self.variations(x) - self.variations_at_infinity()
    }

    pub fn is_root(&self, x: &BigRational) -> bool {
        self.chain[0].eval(x).is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `ρ > 1`
    GreaterThanOne,
    /// `ρ ≤ 1`
    AtMostOne,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::GreaterThanOne => "gt1",
            Verdict::AtMostOne => "le1",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Collatz–Wielandt bounds from a floating-point power iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterativeBounds {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

/// Certified enclosure `lo < ρ ≤ hi` (or `lo = hi = ρ` when exact).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralRadius {
    pub lo: BigRational,
    pub hi: BigRational,
    pub exact: Option<BigRational>,
    pub verdict: Verdict,
    pub closed_form: Option<f64>,
    pub iterative: IterativeBounds,
}

impl SpectralRadius {
    /// Lower end rounded toward −∞.
    pub fn lo_f64(&self) -> f64 {
        let v = to_f64(&self.lo);
        if self.exact.as_ref().is_some_and(|e| e.is_integer()) {
            v
        } else {
            v.next_down()
        }
    }

    /// Upper end rounded toward +∞.
    pub fn hi_f64(&self) -> f64 {
        let v = to_f64(&self.hi);
        if self.exact.as_ref().is_some_and(|e| e.is_integer()) {
            v
        } else {
            v.next_up()
        }
    }

    pub fn estimate(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Whether `value` lies in the enclosure widened by `slack`.
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        self.lo_f64() - slack <= value && value <= self.hi_f64() + slack
    }

    pub fn is_exactly(&self, value: &BigRational) -> bool {
        self.exact.as_ref() == Some(value)
    }
}

/// Perron root of a nonnegative matrix with enclosure width at most `tol`.
pub fn spectral_radius(m: &RationalMatrix, tol: &BigRational) -> Result<SpectralRadius> {
    if !m.is_nonnegative() {
        return Err(Error::InvalidMatrix("negative entry".into()));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let sturm = SturmSequence::new(&characteristic_polynomial(m));
    let sums = m.row_sums();
    let max_row = sums.iter().max().cloned().expect("nonempty");
    let min_row = sums.iter().min().cloned().expect("nonempty");
    let one = BigRational::one();

    let verdict = if sturm.roots_above(&one) > 0 { Verdict::GreaterThanOne } else { Verdict::AtMostOne };

    let candidates = [one.clone(), BigRational::zero(), min_row.clone(), max_row.clone()];
    let exact = candidates.into_iter().find(|c| sturm.is_root(c) && sturm.roots_above(c) == 0);

    let (lo, hi) = match &exact {
        Some(e) => (e.clone(), e.clone()),
        None => {
            // ρ ∈ [min_row, max_row], so (min_row - 1, max_row] brackets it
            let mut lo = &min_row - &one;
            let mut hi = max_row.clone();
            let two = BigRational::from_integer(BigInt::from(2));
            while &hi - &lo > *tol {
                let mid = (&lo + &hi) / &two;
                if sturm.roots_above(&mid) > 0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo, hi)
        }
    };

    let closed_form = closed_form_radius(m);
    if let Some((value, closed_verdict)) = closed_form {
        let slack = 1e-9 * (1.0 + value.abs());
        if closed_verdict != verdict || to_f64(&lo) - slack > value || value > to_f64(&hi) + slack {
            return Err(Error::InvalidMatrix(format!(
                "closed form {value} ({closed_verdict}) disagrees with Sturm enclosure [{lo}, {hi}] ({verdict})"
            )));
        }
    }

    let iterative = collatz_wielandt(m, 10_000);
    let slack = 1e-9 * (1.0 + iterative.upper.abs());
    if iterative.lower > to_f64(&hi) + slack || iterative.upper < to_f64(&lo) - slack {
        return Err(Error::InvalidMatrix(format!(
            "power iteration bounds [{}, {}] miss Sturm enclosure [{lo}, {hi}]",
            iterative.lower, iterative.upper
        )));
    }

    Ok(SpectralRadius { lo, hi, exact, verdict, closed_form: closed_form.map(|c| c.0), iterative })
}

/// Trace/determinant formula for sizes 1 and 2, with an exact verdict.
pub fn closed_form_radius(m: &RationalMatrix) -> Option<(f64, Verdict)> {
    let one = BigRational::one();
    match m.size() {
        1 => {
            let a = m.get(0, 0);
            let verdict = if *a > one { Verdict::GreaterThanOne } else { Verdict::AtMostOne };
            Some((to_f64(a), verdict))
        }
        2 => {
            let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
            let trace = a + d;
            let det = a * d - b * c;
            let disc = &trace * &trace - BigRational::from_integer(BigInt::from(4)) * &det;
            let value = (to_f64(&trace) + to_f64(&disc).max(0.0).sqrt()) / 2.0;
            // ρ > 1 ⇔ tr > 2, or p(1) = 1 − tr + det < 0
            let two = BigRational::from_integer(BigInt::from(2));
            let p_at_one = &one - &trace + det;
            let verdict =
                if trace > two || p_at_one.is_negative() { Verdict::GreaterThanOne } else { Verdict::AtMostOne };
            Some((value, verdict))
        }
        _ => None,
    }
}

/// Power iteration on `M + I` with Collatz–Wielandt bounds for `ρ(M)`.
pub fn collatz_wielandt(m: &RationalMatrix, max_iter: usize) -> IterativeBounds {
    let a = m.to_f64_rows();
    let n = a.len();
    let mut x = vec![1.0f64; n];
    let mut best = IterativeBounds { lower: 0.0, upper: f64::INFINITY, iterations: 0 };
    for it in 1..=max_iter {
        let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * x[j]).sum::<f64>()).collect();
        let ratios = y.iter().zip(&x).map(|(yi, xi)| yi / xi);
        let (lower, upper) = ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
        best.lower = best.lower.max(lower);
        best.upper = best.upper.min(upper);
        best.iterations = it;
        if best.upper - best.lower <= 1e-13 * (1.0 + best.upper) {
            break;
        }
        let z: Vec<f64> = y.iter().zip(&x).map(|(yi, xi)| yi + xi).collect();
        let norm = z.iter().cloned().fold(0.0, f64::max);
        x = z.into_iter().map(|v| (v / norm).max(f64::MIN_POSITIVE)).collect();
    }
    best
}
