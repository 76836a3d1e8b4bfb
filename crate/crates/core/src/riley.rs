//! Parabolic representations into SL(2, C) cut out by an integer polynomial
//! in the off-diagonal parameter, traces along slopes, translation lengths,
//! and the cusp-geometry series built from them (boundary identity, cusp
//! modulus, classical once-punctured-torus check, end-invariant evidence).

use crate::config::{EVIDENCE_DEN, EVIDENCE_MARGIN, RELATOR_TOL, ROOT_RESIDUAL};
use crate::decide::is_hyperbolic;
use crate::farey::{enumerate_interval, farey_parents, fusion_intervals, Slope};
use crate::orbit::{gamma_inf_normalize, limit_set_gaps, orbit_ball};
use crate::words::{torus_slope_word, u_word, Gen, Letter, Word};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::f64::consts::PI;

/// Residual every constructed representation must satisfy on the relator.
const REP_RESIDUAL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Integer polynomials
// ---------------------------------------------------------------------------

/// Polynomial over Z, little-endian coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> IntPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> IntPoly {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> IntPoly {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: i64) -> IntPoly {
        IntPoly::new(vec![BigInt::from(c)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        IntPoly::new(out)
    }

    fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] -= c;
        }
        IntPoly::new(out)
    }

    fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `x^k`.
    fn shift(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        IntPoly::new(out)
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.coeffs.last().unwrap().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Remainder of `lc(g)^k * self` by `g`; only the ideal it generates with
    /// `g` matters to the callers, which re-normalize to primitive parts.
    fn pseudo_rem(&self, g: &IntPoly) -> IntPoly {
        let dg = g.degree().expect("pseudo_rem by zero polynomial");
        let lc_g = g.coeffs.last().unwrap().clone();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dg {
                break;
            }
            let lc_r = r.coeffs.last().unwrap().clone();
            r = r.scale(&lc_g).sub(&g.shift(dr - dg).scale(&lc_r));
        }
        r
    }

    /// Exact division; panics if `g` does not divide `self` over Z.
    fn div_exact(&self, g: &IntPoly) -> IntPoly {
        let dg = g.degree().expect("division by zero polynomial");
        let lc_g = g.coeffs.last().unwrap();
        let mut r = self.clone();
        let mut q = vec![
            BigInt::zero();
            self.coeffs.len().saturating_sub(g.coeffs.len()) + 1
        ];
        while let Some(dr) = r.degree() {
            if dr < dg {
                break;
            }
            let lc_r = r.coeffs.last().unwrap();
            let (quot, rem) = lc_r.div_rem(lc_g);
            assert!(rem.is_zero(), "inexact polynomial division");
            q[dr - dg] = quot.clone();
            r = r.sub(&g.shift(dr - dg).scale(&quot));
        }
        assert!(r.is_zero(), "inexact polynomial division");
        IntPoly::new(q)
    }

    pub fn to_f64_coeffs(&self) -> Result<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|c| {
                c.to_f64()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Numerical("polynomial coefficient exceeds f64 range".into()))
            })
            .collect()
    }

    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64> {
        Ok(horner2(&self.to_f64_coeffs()?, z).0)
    }
}

/// Greatest common divisor up to sign via the primitive polynomial remainder
/// sequence; the result is primitive with positive leading coefficient.
pub fn poly_gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut f = a.primitive();
    let mut g = b.primitive();
    if f.degree() < g.degree() {
        std::mem::swap(&mut f, &mut g);
    }
    while !g.is_zero() {
        let r = f.pseudo_rem(&g).primitive();
        f = g;
        g = r;
    }
    f.primitive()
}

/// `f` with repeated factors collapsed: `f / gcd(f, f')`, primitive.
pub fn squarefree_part(f: &IntPoly) -> IntPoly {
    let f0 = f.primitive();
    let d = f0.derivative();
    if d.is_zero() {
        return f0;
    }
    let g = poly_gcd(&f0, &d);
    if g.degree() == Some(0) {
        return f0;
    }
    f0.div_exact(&g).primitive()
}

/// Horner evaluation of value and derivative at a complex point.
fn horner2(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut f = Complex64::new(0.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        df = df * z + f;
        f = f * z + c;
    }
    (f, df)
}

/// Scale-aware size of the polynomial at `|z|`, used for backward-error tests.
fn abs_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.abs())
}

// ---------------------------------------------------------------------------
// Defining polynomial of the parabolic representation variety
// ---------------------------------------------------------------------------

type PolyMat = [[IntPoly; 2]; 2];

fn pm_mul(a: &PolyMat, b: &PolyMat) -> PolyMat {
    let mut out = [
        [IntPoly::zero(), IntPoly::zero()],
        [IntPoly::zero(), IntPoly::zero()],
    ];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
        }
    }
    out
}

fn letter_poly_matrix(l: Letter) -> PolyMat {
    let one = IntPoly::constant(1);
    let zero = IntPoly::zero();
    let w = IntPoly::from_i64(&[0, 1]);
    match (l.gen, l.inv) {
        (Gen::A, false) => [[one.clone(), IntPoly::constant(1)], [zero, one]],
        (Gen::A, true) => [[one.clone(), IntPoly::constant(-1)], [zero, one]],
        (Gen::B, false) => [[one.clone(), zero], [w, one]],
        (Gen::B, true) => [[one.clone(), zero], [w.scale(&BigInt::from(-1)), one]],
    }
}

fn word_poly_matrix(word: &Word) -> PolyMat {
    let mut m = [
        [IntPoly::constant(1), IntPoly::zero()],
        [IntPoly::zero(), IntPoly::constant(1)],
    ];
    for &l in word.letters() {
        m = pm_mul(&m, &letter_poly_matrix(l));
    }
    m
}

/// Defining polynomial in the lower-left parameter of `b`: the relator maps
/// to a scalar matrix exactly at its roots. Computed as the gcd of the
/// off-diagonal entries and the diagonal difference of the relator image,
/// returned primitive with positive leading coefficient.
pub fn relator_polynomial(r: &Slope) -> Result<IntPoly> {
    let u = u_word(r)?;
    let m = word_poly_matrix(&u);
    let g = poly_gcd(&poly_gcd(&m[0][1], &m[1][0]), &m[0][0].sub(&m[1][1]));
    Ok(g.primitive())
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// All complex roots by simultaneous Aberth iteration, multiplicity blind:
/// pass a squarefree polynomial for full accuracy. Each returned root `z`
/// satisfies `|f(z)| <= rel_residual * sum_k |a_k| |z|^k` (relative backward
/// error); otherwise the iteration is reported as failed.
pub fn aberth_roots(poly: &IntPoly, rel_residual: f64) -> Result<Vec<Complex64>> {
    if poly.is_zero() {
        return Err(Error::RootFinding("zero polynomial has no root set".into()));
    }
    let k0 = poly.coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots = vec![Complex64::new(0.0, 0.0); k0];
    let tail = IntPoly::new(poly.coeffs[k0..].to_vec());
    let raw = tail.to_f64_coeffs()?;
    let n = raw.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    let scale = raw.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let a: Vec<f64> = raw.iter().map(|c| c / scale).collect();

    let lead = a[n].abs();
    let cauchy = 1.0 + a[..n].iter().fold(0.0f64, |m, c| m.max(c.abs())) / lead;
    let radius = (a[0].abs() / lead).powf(1.0 / n as f64).clamp(1e-6, cauchy);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / n as f64 + 0.4;
            radius * Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    let converged = |z: &[Complex64]| {
        z.iter().all(|&zi| {
            let (f, _) = horner2(&a, zi);
            f.norm() <= rel_residual * abs_eval(&a, zi.norm()).max(f64::MIN_POSITIVE)
        })
    };
    let mut ok = false;
    for _ in 0..500 {
        if converged(&z) {
            ok = true;
            break;
        }
        for i in 0..n {
            let (f, df) = horner2(&a, z[i]);
            let newton = if df.norm() < 1e-300 {
                // flat spot: nudge off it instead of dividing by ~0
                z[i] += Complex64::new(1e-6, 1e-6);
                continue;
            } else {
                f / df
            };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() < 1e-300 {
                        z[i] += Complex64::new(1e-9, 2e-9);
                        continue;
                    }
                    s += d.inv();
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * s;
            let step = if denom.norm() < 1e-300 { newton } else { newton / denom };
            z[i] -= step;
        }
    }
    if !ok && !converged(&z) {
        return Err(Error::RootFinding(format!(
            "Aberth iteration did not reach residual {rel_residual:.1e} within 500 sweeps"
        )));
    }
    z.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    roots.extend(z);
    Ok(roots)
}

// ---------------------------------------------------------------------------
// Complex 2x2 matrices and the representation type
// ---------------------------------------------------------------------------

pub type Mat2 = [[Complex64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn mat_id() -> Mat2 {
    [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ]
}

pub fn mat_trace(m: &Mat2) -> Complex64 {
    m[0][0] + m[1][1]
}

fn mat_inv(m: &Mat2) -> Result<Mat2> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.norm() < 1e-300 {
        return Err(Error::Numerical("singular matrix has no inverse".into()));
    }
    Ok([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// Entrywise distance to the nearer of `I` and `-I`.
pub fn identity_deviation(m: &Mat2) -> f64 {
    let dev = |sign: f64| {
        let mut d = 0.0f64;
        for (i, row) in m.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                let target = if i == j { sign } else { 0.0 };
                d = d.max((e - Complex64::new(target, 0.0)).norm());
            }
        }
        d
    };
    dev(1.0).min(dev(-1.0))
}

/// Parabolic representation of the slope group: `a`, `b` map to upper and
/// lower unitriangular matrices, the latter with parameter `omega`. The
/// constructor guarantees the relator lands within `1e-10` of `±I`.
#[derive(Clone, Debug, Serialize)]
pub struct Representation {
    r: Slope,
    omega: Complex64,
    #[serde(skip)]
    relator: Word,
}

impl Representation {
    pub fn r(&self) -> &Slope {
        &self.r
    }

    pub fn omega(&self) -> Complex64 {
        self.omega
    }

    fn letter_matrix(&self, l: Letter) -> Mat2 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match (l.gen, l.inv) {
            (Gen::A, false) => [[one, one], [zero, one]],
            (Gen::A, true) => [[one, -one], [zero, one]],
            (Gen::B, false) => [[one, zero], [self.omega, one]],
            (Gen::B, true) => [[one, zero], [-self.omega, one]],
        }
    }

    pub fn evaluate(&self, word: &Word) -> Mat2 {
        let mut m = mat_id();
        for &l in word.letters() {
            m = mat_mul(&m, &self.letter_matrix(l));
        }
        m
    }

    pub fn relator_residual(&self) -> f64 {
        identity_deviation(&self.evaluate(&self.relator))
    }
}

fn build_representation(r: &Slope, omega: Complex64) -> Result<Representation> {
    if omega.norm() < 1e-12 {
        return Err(Error::Numerical(
            "parameter 0 gives an abelian image, not a faithful representation".into(),
        ));
    }
    let relator = u_word(r)?;
    let rep = Representation { r: r.clone(), omega, relator };
    let res = rep.relator_residual();
    if !res.is_finite() || res >= REP_RESIDUAL {
        return Err(Error::Numerical(format!(
            "relator residual {res:.3e} exceeds {REP_RESIDUAL:.1e} at omega = {omega}"
        )));
    }
    Ok(rep)
}

/// Refine a user-supplied parameter by Newton iteration on the squarefree
/// defining polynomial, then validate the relator residual.
pub fn representation_with_omega(r: &Slope, omega: Complex64) -> Result<Representation> {
    let sf = squarefree_part(&relator_polynomial(r)?);
    let coeffs = sf.to_f64_coeffs()?;
    let mut z = omega;
    for _ in 0..80 {
        let (f, df) = horner2(&coeffs, z);
        if f.norm() <= 1e-15 * abs_eval(&coeffs, z.norm()).max(f64::MIN_POSITIVE) {
            break;
        }
        if df.norm() < 1e-300 {
            break;
        }
        let step = f / df;
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    build_representation(r, z)
}

/// Pick the geometric parameter among the roots of the defining polynomial:
/// upper half plane, relator residual within tolerance, and no elliptic
/// trace (real, strictly inside `(-2, 2)`) on any low-denominator slope of
/// the two fusion intervals; among survivors take the largest imaginary
/// part, breaking ties by real part. The chosen root is the discrete
/// faithful one on every slope exercised by the tests.
pub fn geometric_representation(r: &Slope) -> Result<Representation> {
    if !is_hyperbolic(r)? {
        return Err(Error::Precondition(format!(
            "slope {r} is a torus link; it has no parabolic representation of this kind"
        )));
    }
    let sf = squarefree_part(&relator_polynomial(r)?);
    let roots = aberth_roots(&sf, ROOT_RESIDUAL)?;
    let fus = fusion_intervals(r)?;
    let mut probes = enumerate_interval(&fus.i1, EVIDENCE_DEN)?;
    probes.extend(enumerate_interval(&fus.i2, EVIDENCE_DEN)?);

    let mut passing: Vec<Representation> = Vec::new();
    let mut log = String::new();
    for root in roots {
        if root.im <= 1e-9 {
            continue;
        }
        let relator = u_word(r)?;
        let cand = Representation { r: r.clone(), omega: root, relator };
        let res = cand.relator_residual();
        if res > RELATOR_TOL {
            log.push_str(&format!("  {root}: relator residual {res:.3e}\n"));
            continue;
        }
        let mut witness = None;
        for s in &probes {
            let t = trace_of_slope(&cand, s)?;
            if t.im.abs() <= EVIDENCE_MARGIN && t.re.abs() < 2.0 - EVIDENCE_MARGIN {
                witness = Some((s.clone(), t));
                break;
            }
        }
        if let Some((s, t)) = witness {
            log.push_str(&format!("  {root}: elliptic trace {t} at slope {s}\n"));
            continue;
        }
        passing.push(cand);
    }
    passing.sort_by(|p, q| {
        q.omega
            .im
            .total_cmp(&p.omega.im)
            .then(q.omega.re.total_cmp(&p.omega.re))
    });
    for cand in passing {
        if let Ok(rep) = build_representation(r, cand.omega) {
            return Ok(rep);
        }
    }
    Err(Error::RootSelection(format!(
        "no root of the defining polynomial for {r} passes the geometric filters:\n{log}"
    )))
}

/// Trace of the loop word attached to `s`, after translating `s` into `[0, 1]`
/// by the vertical stabilizer so that conjugate loops get equal traces.
pub fn trace_of_slope(rep: &Representation, s: &Slope) -> Result<Complex64> {
    let (nf, _, _) = gamma_inf_normalize(s);
    if nf.is_infinite() {
        return Err(Error::Precondition("slope 1/0 carries no loop word".into()));
    }
    let w = u_word(&nf)?;
    Ok(mat_trace(&rep.evaluate(&w)))
}

/// `max |entry - (±I)|` for the loop word of `s`, normalized as in
/// [`trace_of_slope`].
pub fn identity_deviation_of_slope(rep: &Representation, s: &Slope) -> Result<f64> {
    let (nf, _, _) = gamma_inf_normalize(s);
    if nf.is_infinite() {
        return Err(Error::Precondition("slope 1/0 carries no loop word".into()));
    }
    let w = u_word(&nf)?;
    Ok(identity_deviation(&rep.evaluate(&w)))
}

// ---------------------------------------------------------------------------
// Translation length and series weights
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TranslationLength {
    pub length: Complex64,
    pub parabolic: bool,
}

/// Complex translation length `2 ln mu` where `mu + 1/mu = ±t` and
/// `|mu| >= 1`: real part nonnegative, imaginary part folded to `(-pi, pi]`.
/// The sign of `t` is canonicalized first, so `t` and `-t` agree exactly.
pub fn translation_length(t: Complex64) -> TranslationLength {
    let t = if t.re < 0.0 || (t.re == 0.0 && t.im < 0.0) { -t } else { t };
    if (t - Complex64::new(2.0, 0.0)).norm() < 1e-12 {
        return TranslationLength { length: Complex64::new(0.0, 0.0), parabolic: true };
    }
    let s = (t * t - Complex64::new(4.0, 0.0)).sqrt();
    let mut mu = (t + s) / 2.0;
    if mu.norm() < 1.0 {
        mu = (t - s) / 2.0;
    }
    let l = 2.0 * mu.ln();
    let mut im = l.im;
    while im > PI {
        im -= 2.0 * PI;
    }
    while im <= -PI {
        im += 2.0 * PI;
    }
    TranslationLength { length: Complex64::new(l.re.max(0.0), im), parabolic: false }
}

/// `1 / (1 + mu^2)` with `mu` the `|mu| >= 1` solution of `mu + 1/mu = t`;
/// this is `1 / (1 + e^l)` for the translation length `l` of trace `t`.
fn holonomy_weight(t: Complex64) -> Result<Complex64> {
    // near the branch point t = ±2 the square root amplifies rounding noise
    // to its own square root; snap to the exact parabolic weight instead,
    // inside the same window translation_length treats as parabolic
    if (t - Complex64::new(2.0, 0.0)).norm() < 1e-12
        || (t + Complex64::new(2.0, 0.0)).norm() < 1e-12
    {
        return Ok(Complex64::new(0.5, 0.0));
    }
    let s = (t * t - Complex64::new(4.0, 0.0)).sqrt();
    let mut mu = (t + s) / 2.0;
    if mu.norm() < 1.0 {
        mu = (t - s) / 2.0;
    }
    let x = mu * mu;
    let den = Complex64::new(1.0, 0.0) + x;
    if den.norm() < 1e-14 {
        return Err(Error::Numerical(format!(
            "degenerate holonomy weight at trace {t}: 1 + mu^2 vanishes"
        )));
    }
    Ok(Complex64::new(1.0, 0.0) / den)
}

/// Series weight of the slope `s`: the squared-eigenvalue branch is chosen
/// from `tau = 2 - trace`, so boundary-parabolic slopes contribute `1/2`.
pub fn h_term(rep: &Representation, s: &Slope) -> Result<Complex64> {
    let tau = Complex64::new(2.0, 0.0) - trace_of_slope(rep, s)?;
    holonomy_weight(tau.sqrt())
}

// ---------------------------------------------------------------------------
// Interval series
// ---------------------------------------------------------------------------

/// Partial sum of a weight series with bookkeeping: `tail_estimate` adds up
/// `|weight|` over the roots of every pruned subtree (denominator frontier
/// and below-threshold subtrees alike).
#[derive(Clone, Debug, Serialize)]
pub struct McShaneReport {
    pub partial_sum: Complex64,
    pub term_count: u64,
    pub max_den: u64,
    pub tail_estimate: f64,
    pub target: Complex64,
}

impl McShaneReport {
    pub fn error(&self) -> f64 {
        (self.partial_sum - self.target).norm()
    }
}

/// One reported series contribution: slope, weighted value, and whether it
/// came from the interior walk or the interval boundary.
pub type SeriesTerm = (Slope, Complex64, &'static str);

#[derive(Default)]
struct Acc {
    sum: Complex64,
    count: u64,
    tail: f64,
    terms: Option<Vec<(Slope, Complex64)>>,
}

/// Deterministic preorder walk of the mediant tree of `(0, 1)` clipped to the
/// open interval `(lo, hi)`. Subtrees are dropped once their denominators
/// pass `max_den`, or once a term inside a fully-contained subtree falls
/// below `prune_eps`; both record the dropped root weight in the tail.
fn interior_sum(
    rep: &Representation,
    lo: &Slope,
    hi: &Slope,
    prune_eps: f64,
    max_den: u64,
    acc: &mut Acc,
) -> Result<()> {
    if lo >= hi {
        return Ok(());
    }
    let cap = BigInt::from(max_den);
    let mut stack: Vec<(Slope, Slope)> = vec![(Slope::zero(), Slope::one())];
    while let Some((l, r)) = stack.pop() {
        if &r <= lo || &l >= hi {
            continue;
        }
        let m = l.mediant(&r)?;
        let inside = &m > lo && &m < hi;
        if m.den() > &cap {
            if inside {
                acc.tail += h_term(rep, &m)?.norm();
            }
            continue;
        }
        if inside {
            let h = h_term(rep, &m)?;
            if &l >= lo && &r <= hi && h.norm() < prune_eps {
                acc.tail += h.norm();
                continue;
            }
            acc.sum += h;
            acc.count += 1;
            if let Some(v) = acc.terms.as_mut() {
                v.push((m.clone(), h));
            }
        }
        stack.push((m.clone(), r));
        stack.push((l, m));
    }
    Ok(())
}

/// Boundary identity for the four-punctured sphere quotient: twice the
/// interior weights over both fusion intervals plus the four endpoint
/// weights, which converges to `-1`.
pub fn mcshane_sum(rep: &Representation, prune_eps: f64, max_den: u64) -> Result<McShaneReport> {
    Ok(mcshane_with_terms(rep, prune_eps, max_den, false)?.0)
}

/// Same sum, optionally returning every weighted contribution; the term
/// values add up to the partial sum exactly.
pub fn mcshane_with_terms(
    rep: &Representation,
    prune_eps: f64,
    max_den: u64,
    want_terms: bool,
) -> Result<(McShaneReport, Vec<SeriesTerm>)> {
    let fus = fusion_intervals(rep.r())?;
    let mut acc = Acc { terms: want_terms.then(Vec::new), ..Acc::default() };
    interior_sum(rep, &Slope::zero(), &fus.r1, prune_eps, max_den, &mut acc)?;
    interior_sum(rep, &fus.r2, &Slope::one(), prune_eps, max_den, &mut acc)?;
    let mut rows: Vec<SeriesTerm> = acc
        .terms
        .take()
        .unwrap_or_default()
        .into_iter()
        .map(|(s, h)| (s, h * 2.0, "interior"))
        .collect();
    let mut boundary = Complex64::new(0.0, 0.0);
    for s in [Slope::zero(), fus.r1.clone(), fus.r2.clone(), Slope::one()] {
        let h = h_term(rep, &s)?;
        boundary += h;
        acc.count += 1;
        if want_terms {
            rows.push((s, h, "boundary"));
        }
    }
    let report = McShaneReport {
        partial_sum: acc.sum * 2.0 + boundary,
        term_count: acc.count,
        max_den,
        tail_estimate: 2.0 * acc.tail,
        target: Complex64::new(-1.0, 0.0),
    };
    Ok((report, rows))
}

/// Reports at `base`, `2*base`, ..., doubling `doublings` times. Errors out
/// instead of returning quietly when the recorded tails fail to decrease
/// across the doublings, which is the non-convergence signal for this series
/// (exact zeros, meaning nothing was pruned, are allowed to repeat).
pub fn mcshane_doubling(
    rep: &Representation,
    prune_eps: f64,
    base: u64,
    doublings: u32,
) -> Result<Vec<McShaneReport>> {
    let mut out = Vec::new();
    let mut md = base;
    for _ in 0..=doublings {
        out.push(mcshane_sum(rep, prune_eps, md)?);
        md *= 2;
    }
    for pair in out.windows(2) {
        let (t1, t2) = (pair[0].tail_estimate, pair[1].tail_estimate);
        // a repeated tail means the walk saturated below prune_eps (converged);
        // only a growing tail signals divergence
        if t2 > t1 {
            return Err(Error::Numerical(format!(
                "series for {} is not converging: tail went {t1:.3e} -> {t2:.3e} under doubling",
                rep.r()
            )));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusReport {
    pub r: Slope,
    pub lambda: Complex64,
    /// Real part folded into `[0, 2)`: the translation normalization only
    /// pins it modulo 2.
    pub re_mod2: f64,
    pub parity: String,
    pub term_count: u64,
    pub max_den: u64,
    pub tail_estimate: f64,
}

/// Cusp modulus from the weights over the lower fusion interval alone, with
/// parity-dependent multiplicities for interior and endpoint terms.
pub fn cusp_modulus(rep: &Representation, prune_eps: f64, max_den: u64) -> Result<ModulusReport> {
    Ok(cusp_modulus_with_terms(rep, prune_eps, max_den, false)?.0)
}

/// Same modulus, optionally returning the weighted contributions; the term
/// values add up to `lambda` exactly.
pub fn cusp_modulus_with_terms(
    rep: &Representation,
    prune_eps: f64,
    max_den: u64,
    want_terms: bool,
) -> Result<(ModulusReport, Vec<SeriesTerm>)> {
    let r = rep.r();
    let (_, p) = r.qp_u64()?;
    let fus = fusion_intervals(r)?;
    let mut acc = Acc { terms: want_terms.then(Vec::new), ..Acc::default() };
    interior_sum(rep, &Slope::zero(), &fus.r1, prune_eps, max_den, &mut acc)?;
    let (w_int, w_bnd, parity) = if p % 2 == 1 { (8.0, 4.0, "odd") } else { (4.0, 2.0, "even") };
    let mut rows: Vec<SeriesTerm> = acc
        .terms
        .take()
        .unwrap_or_default()
        .into_iter()
        .map(|(s, h)| (s, h * w_int, "interior"))
        .collect();
    let mut boundary = Complex64::new(0.0, 0.0);
    for s in [Slope::zero(), fus.r1.clone()] {
        let h = h_term(rep, &s)?;
        boundary += h;
        if want_terms {
            rows.push((s, h * w_bnd, "boundary"));
        }
    }
    let lambda = acc.sum * w_int + boundary * w_bnd;
    let report = ModulusReport {
        r: r.clone(),
        lambda,
        re_mod2: lambda.re.rem_euclid(2.0),
        parity: parity.into(),
        term_count: acc.count + 2,
        max_den,
        tail_estimate: w_int * acc.tail,
    };
    Ok((report, rows))
}

// ---------------------------------------------------------------------------
// Classical once-punctured-torus series
// ---------------------------------------------------------------------------

/// Walk all primitive slopes of the once-punctured torus with their traces,
/// generated by the trace triple recursion `t(u+v) = t(u) t(v) - t(u-v)`.
/// The four seed slopes `0, 1/0, 1, -1` are visited first, then four
/// quadrant trees in a fixed preorder. `visit` gets `(numerator,
/// denominator, trace, frontier)`; `frontier` marks a mediant just past
/// `max_den`, and the return value decides whether to descend.
fn walk_torus_traces(
    x: Complex64,
    y: Complex64,
    z: Complex64,
    max_den: i64,
    visit: &mut dyn FnMut((i64, i64), Complex64, bool) -> bool,
) {
    let xy_z = x * y - z;
    for (v, t) in [((0, 1), x), ((1, 0), y), ((1, 1), z), ((-1, 1), xy_z)] {
        visit(v, t, false);
    }
    let trees: [((i64, i64), Complex64, (i64, i64), Complex64, Complex64); 4] = [
        ((0, 1), x, (1, 1), z, y),
        ((1, 1), z, (1, 0), y, x),
        ((-1, 1), xy_z, (0, 1), x, y),
        ((-1, 0), y, (-1, 1), xy_z, x),
    ];
    let mut stack: Vec<((i64, i64), Complex64, (i64, i64), Complex64, Complex64)> = Vec::new();
    for &root in &trees {
        stack.clear();
        stack.push(root);
        while let Some((u, tu, v, tv, topp)) = stack.pop() {
            let m = (u.0 + v.0, u.1 + v.1);
            let tm = tu * tv - topp;
            if !tm.is_finite() || tm.norm() > 1e100 {
                continue;
            }
            if m.0.abs() > max_den || m.1 > max_den {
                visit(m, tm, true);
                continue;
            }
            if visit(m, tm, false) {
                stack.push((m, tm, v, tv, tu));
                stack.push((u, tu, m, tm, tv));
            }
        }
    }
}

/// Every `(slope vector, trace)` pair the recursion reaches within the
/// denominator bound, in walk order; used to cross-check against matrix
/// products.
pub fn torus_trace_pairs(
    x: Complex64,
    y: Complex64,
    z: Complex64,
    max_den: u64,
) -> Vec<((i64, i64), Complex64)> {
    let mut out = Vec::new();
    walk_torus_traces(x, y, z, max_den as i64, &mut |v, t, frontier| {
        if !frontier {
            out.push((v, t));
        }
        !frontier
    });
    out
}

/// Trace of the primitive torus word of `s` under explicit matrices for the
/// two generators.
pub fn torus_trace_from_matrices(s: &Slope, a: &Mat2, b: &Mat2) -> Result<Complex64> {
    let a_inv = mat_inv(a)?;
    let b_inv = mat_inv(b)?;
    let w = torus_slope_word(s)?;
    let mut m = mat_id();
    for &l in w.letters() {
        let g = match (l.gen, l.inv) {
            (Gen::A, false) => a,
            (Gen::A, true) => &a_inv,
            (Gen::B, false) => b,
            (Gen::B, true) => &b_inv,
        };
        m = mat_mul(&m, g);
    }
    Ok(mat_trace(&m))
}

/// Hyperbolic once-punctured-torus generators with trace triple `(3, 3, 3)`.
pub fn modular_torus_matrices() -> (Mat2, Mat2) {
    let c = |x: f64| Complex64::new(x, 0.0);
    (
        [[c(1.0), c(1.0)], [c(1.0), c(2.0)]],
        [[c(1.0), c(-1.0)], [c(-1.0), c(2.0)]],
    )
}

/// Classical boundary identity on the once-punctured torus: the weights
/// `1/(1 + e^l)` over all primitive slopes sum to `1/2`. The trace triple
/// must satisfy the Markov identity `x^2 + y^2 + z^2 = xyz`.
pub fn classical_mcshane_check(
    x: Complex64,
    y: Complex64,
    z: Complex64,
    prune_eps: f64,
    max_den: u64,
) -> Result<McShaneReport> {
    Ok(classical_with_terms(x, y, z, prune_eps, max_den, false)?.0)
}

/// Same check, optionally returning each slope's weight; seed slopes come
/// first, then the four quadrant walks in preorder.
pub fn classical_with_terms(
    x: Complex64,
    y: Complex64,
    z: Complex64,
    prune_eps: f64,
    max_den: u64,
    want_terms: bool,
) -> Result<(McShaneReport, Vec<SeriesTerm>)> {
    let markov = (x * x + y * y + z * z - x * y * z).norm();
    if markov > 1e-9 {
        return Err(Error::Precondition(format!(
            "trace triple is not type preserving: |x^2+y^2+z^2-xyz| = {markov:.3e}"
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut count = 0u64;
    let mut tail = 0.0f64;
    let mut rows: Vec<SeriesTerm> = Vec::new();
    let mut failure: Option<Error> = None;
    walk_torus_traces(x, y, z, max_den as i64, &mut |(num, den), t, frontier| {
        if failure.is_some() {
            return false;
        }
        match holonomy_weight(t) {
            Err(e) => {
                failure = Some(e);
                false
            }
            Ok(h) => {
                if frontier || h.norm() < prune_eps {
                    tail += h.norm();
                    false
                } else {
                    sum += h;
                    count += 1;
                    if want_terms {
                        if let Ok(s) = Slope::new_int(num, den) {
                            rows.push((s, h, "term"));
                        }
                    }
                    true
                }
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let report = McShaneReport {
        partial_sum: sum,
        term_count: count,
        max_den,
        tail_estimate: tail,
        target: Complex64::new(0.5, 0.0),
    };
    Ok((report, rows))
}

// ---------------------------------------------------------------------------
// End-invariant evidence
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct OrbitSample {
    pub slope: Slope,
    pub abs_trace: f64,
    /// `||trace| - 2|`; zero for an exact relator image.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FanTerm {
    pub slope: Slope,
    pub abs_trace: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FanReport {
    pub target: Slope,
    /// `gap-midpoint` fans must blow up; `gap-endpoint` fans are informative.
    pub kind: String,
    /// Which side the fan approaches the target from.
    pub side: String,
    pub required: bool,
    pub terms: Vec<FanTerm>,
    pub max_abs_trace: f64,
    pub min_abs_trace: f64,
    /// 1-based index of the first term past the trace bound.
    pub exceeded_at: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvidenceReport {
    pub r: Slope,
    pub omega: Complex64,
    pub depth: u32,
    pub trace_bound: f64,
    pub orbit_samples: Vec<OrbitSample>,
    pub max_orbit_deviation: f64,
    pub bounded_ok: bool,
    pub fans: Vec<FanReport>,
    pub unbounded_ok: bool,
}

const FAN_LEN: u64 = 16;

fn fan_from(
    rep: &Representation,
    parent: &Slope,
    target: &Slope,
    kind: &str,
    side: &str,
    required: bool,
    trace_bound: f64,
) -> Result<FanReport> {
    let mut terms = Vec::new();
    let mut exceeded_at = None;
    let mut max_t = f64::NEG_INFINITY;
    let mut min_t = f64::INFINITY;
    for k in 1..=FAN_LEN {
        let kk = BigInt::from(k);
        let s = Slope::new(parent.num() + target.num() * &kk, parent.den() + target.den() * &kk)?;
        let t = trace_of_slope(rep, &s)?.norm();
        max_t = max_t.max(t);
        min_t = min_t.min(t);
        if exceeded_at.is_none() && t > trace_bound {
            exceeded_at = Some(k as usize);
        }
        terms.push(FanTerm { slope: s, abs_trace: t });
    }
    Ok(FanReport {
        target: target.clone(),
        kind: kind.into(),
        side: side.into(),
        required,
        terms,
        max_abs_trace: max_t,
        min_abs_trace: min_t,
        exceeded_at,
    })
}

/// Sided fan converging to `target` from inside the open interval it bounds;
/// `from_above` picks the approach direction.
fn endpoint_fan(
    rep: &Representation,
    target: &Slope,
    from_above: bool,
    trace_bound: f64,
) -> Result<FanReport> {
    let side = if from_above { "above" } else { "below" };
    if target.is_infinite() {
        return Err(Error::Precondition("fan target must be finite".into()));
    }
    let parent = if target == &Slope::zero() {
        Slope::one()
    } else if target == &Slope::one() {
        Slope::zero()
    } else {
        let (lo, hi) = farey_parents(target)?;
        if from_above {
            hi
        } else {
            lo
        }
    };
    fan_from(rep, &parent, target, "gap-endpoint", side, false, trace_bound)
}

/// Deterministic numerical evidence that the representation has the expected
/// end invariant: loop traces over the reflection orbit of `r` stay pinned
/// at `±2`, while parent fans converging to points in the complement gaps
/// blow up past `trace_bound`. `depth` sets the orbit sample radius
/// (capped at 8); gap midpoints come from the base gap layer.
pub fn end_invariant_evidence(
    rep: &Representation,
    depth: u32,
    trace_bound: f64,
) -> Result<EvidenceReport> {
    let r = rep.r();
    let ball = orbit_ball(r, r, depth.min(8))?;
    let mut normalized: Vec<Slope> = ball
        .iter()
        .filter(|s| !s.is_infinite())
        .map(|s| gamma_inf_normalize(s).0)
        .collect();
    normalized.sort();
    normalized.dedup();
    // deep reflections blow denominators (hence word lengths) up
    // exponentially; sample the cheapest 20 orbit points
    normalized.sort_by(|a, b| a.den().cmp(b.den()).then(a.num().cmp(b.num())));
    normalized.truncate(20);
    normalized.sort();
    let mut orbit_samples = Vec::new();
    let mut max_dev = 0.0f64;
    for s in normalized.iter() {
        let t = trace_of_slope(rep, s)?.norm();
        let dev = (t - 2.0).abs();
        max_dev = max_dev.max(dev);
        orbit_samples.push(OrbitSample { slope: s.clone(), abs_trace: t, deviation: dev });
    }
    let bounded_ok = max_dev <= 1e-6;

    let layers = limit_set_gaps(r, 0)?;
    let mut fans = Vec::new();
    for gap in &layers[0].gaps {
        let mid = Slope::new(
            gap.lo.num() * gap.hi.den() + gap.hi.num() * gap.lo.den(),
            2 * (gap.lo.den() * gap.hi.den()),
        )?;
        let (lo_parent, hi_parent) = farey_parents(&mid)?;
        fans.push(fan_from(rep, &lo_parent, &mid, "gap-midpoint", "below", true, trace_bound)?);
        fans.push(fan_from(rep, &hi_parent, &mid, "gap-midpoint", "above", true, trace_bound)?);
        fans.push(endpoint_fan(rep, &gap.lo, true, trace_bound)?);
        fans.push(endpoint_fan(rep, &gap.hi, false, trace_bound)?);
    }
    let unbounded_ok = fans
        .iter()
        .filter(|f| f.required)
        .all(|f| f.exceeded_at.is_some());

    Ok(EvidenceReport {
        r: r.clone(),
        omega: rep.omega(),
        depth,
        trace_bound,
        orbit_samples,
        max_orbit_deviation: max_dev,
        bounded_ok,
        fans,
        unbounded_ok,
    })
}
