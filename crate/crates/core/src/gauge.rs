//! One-parameter gauge families `s ↦ A(s)` on `[s₁, s₂]`.
//!
//! Three built-in families reproduce the worked examples; arbitrary paths can
//! be loaded from a knot table and are interpolated by a natural cubic spline.
//!
//! # Knot file format
//!
//! ```text
//! # lines starting with '#' are comments
//! s_range 0 1
//! 0.0  -0.5
//! 0.5   0.0
//! 1.0   0.5
//! ```
//!
//! The `s_range` header must precede the knots. Knots are whitespace
//! separated `s A` pairs with strictly increasing `s`; the first and last
//! knot must sit on the declared range endpoints.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::modes::{SpinStructure, MASS_EPS};

const SCAN_POINTS: usize = 4001;

#[derive(Debug, Clone, PartialEq)]
enum Family {
    Linear { offset: f64, slope: f64 },
    Sine { amplitude: f64, frequency: f64 },
    Spline(NaturalSpline),
}

/// A smooth gauge family with its first two derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePath {
    family: Family,
    s1: f64,
    s2: f64,
    label: String,
}

impl GaugePath {
    /// `A(s) = offset + slope·s`.
    pub fn linear(offset: f64, slope: f64, s1: f64, s2: f64) -> Result<Self> {
        Self::build(Family::Linear { offset, slope }, s1, s2, format!("linear({offset}, {slope})"))
    }

    /// `A(s) = amplitude·sin(frequency·s)`.
    pub fn sine(amplitude: f64, frequency: f64, s1: f64, s2: f64) -> Result<Self> {
        Self::build(
            Family::Sine {
                amplitude,
                frequency,
            },
            s1,
            s2,
            format!("sine({amplitude}, {frequency})"),
        )
    }

    /// `A(s) = s − 1/2` on `[0, 1]`; winding 1.
    pub fn example1() -> Self {
        let mut p = Self::linear(-0.5, 1.0, 0.0, 1.0).expect("valid built-in path");
        p.label = "example1".into();
        p
    }

    /// `A(s) = 3s − 1/4` on `[0, 1]`; winding 3.
    pub fn example2() -> Self {
        let mut p = Self::linear(-0.25, 3.0, 0.0, 1.0).expect("valid built-in path");
        p.label = "example2".into();
        p
    }

    /// `A(s) = sin 4πs` on `[1/24, 23/24]`; winding −1.
    pub fn example3() -> Self {
        let mut p = Self::sine(1.0, 4.0 * PI, 1.0 / 24.0, 23.0 / 24.0).expect("valid built-in path");
        p.label = "example3".into();
        p
    }

    /// Built-in path by name (`example1`, `example2`, `example3`).
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "example1" | "ex1" => Some(Self::example1()),
            "example2" | "ex2" => Some(Self::example2()),
            "example3" | "ex3" => Some(Self::example3()),
            _ => None,
        }
    }

    /// Natural cubic spline through `(s, A)` knots spanning exactly `[s1, s2]`.
    pub fn from_knots(knots: &[(f64, f64)], s1: f64, s2: f64) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidParameter("a spline path needs at least two knots".into()));
        }
        if knots.iter().any(|(s, a)| !s.is_finite() || !a.is_finite()) {
            return Err(Error::InvalidParameter("spline knots must be finite".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter("spline knots must be strictly increasing in s".into()));
        }
        if knots[0].0 != s1 || knots[knots.len() - 1].0 != s2 {
            return Err(Error::InvalidParameter(format!(
                "first and last knots must sit at s = {s1} and s = {s2}"
            )));
        }
        let spline = NaturalSpline::new(knots);
        Self::build(Family::Spline(spline), s1, s2, "spline".into())
    }

    /// Parses the knot file format described in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut range: Option<(f64, f64)> = None;
        let mut knots = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |tok: &str| -> Result<f64> {
                tok.parse::<f64>().map_err(|_| Error::PathFormat {
                    line: line_no,
                    msg: format!("cannot parse number '{tok}'"),
                })
            };
            if fields[0] == "s_range" {
                if range.is_some() {
                    return Err(Error::PathFormat {
                        line: line_no,
                        msg: "duplicate s_range header".into(),
                    });
                }
                if fields.len() != 3 {
                    return Err(Error::PathFormat {
                        line: line_no,
                        msg: "expected 's_range <s1> <s2>'".into(),
                    });
                }
                range = Some((num(fields[1])?, num(fields[2])?));
                continue;
            }
            if range.is_none() {
                return Err(Error::PathFormat {
                    line: line_no,
                    msg: "knot before s_range header".into(),
                });
            }
            if fields.len() != 2 {
                return Err(Error::PathFormat {
                    line: line_no,
                    msg: "expected '<s> <A>'".into(),
                });
            }
            knots.push((num(fields[0])?, num(fields[1])?));
        }
        let (s1, s2) = range.ok_or(Error::PathFormat {
            line: 0,
            msg: "missing s_range header".into(),
        })?;
        Self::from_knots(&knots, s1, s2)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read gauge path {}: {e}", path.display()))
        })?;
        let mut p = Self::parse(&text)?;
        p.label = format!("spline:{}", path.display());
        Ok(p)
    }

    fn build(family: Family, s1: f64, s2: f64, label: String) -> Result<Self> {
        if !(s1.is_finite() && s2.is_finite() && s1 < s2) {
            return Err(Error::InvalidParameter(format!("invalid s-range [{s1}, {s2}]")));
        }
        let ok = match &family {
            Family::Linear { offset, slope } => offset.is_finite() && slope.is_finite(),
            Family::Sine {
                amplitude,
                frequency,
            } => amplitude.is_finite() && frequency.is_finite(),
            Family::Spline(_) => true,
        };
        if !ok {
            return Err(Error::InvalidParameter("gauge path parameters must be finite".into()));
        }
        Ok(GaugePath {
            family,
            s1,
            s2,
            label,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn s_range(&self) -> (f64, f64) {
        (self.s1, self.s2)
    }

    pub(crate) fn check(&self, s: f64) -> Result<()> {
        if (self.s1..=self.s2).contains(&s) {
            Ok(())
        } else {
            Err(Error::domain("s", s, self.s1, self.s2))
        }
    }

    pub fn a(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok(self.eval(s).0)
    }

    pub fn a_prime(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok(self.eval(s).1)
    }

    pub fn a_second(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        Ok(self.eval(s).2)
    }

    /// `(A, A', A'')` without a range check.
    pub(crate) fn eval(&self, s: f64) -> (f64, f64, f64) {
        match &self.family {
            Family::Linear { offset, slope } => (offset + slope * s, *slope, 0.0),
            Family::Sine {
                amplitude,
                frequency,
            } => {
                let (sn, cs) = (frequency * s).sin_cos();
                (
                    amplitude * sn,
                    amplitude * frequency * cs,
                    -amplitude * frequency * frequency * sn,
                )
            }
            Family::Spline(sp) => sp.eval(s),
        }
    }

    /// `A(s₂) − A(s₁)` when it is an integer to within 1e−9.
    pub fn winding(&self) -> Option<i64> {
        let d = self.eval(self.s2).0 - self.eval(self.s1).0;
        let r = d.round();
        ((d - r).abs() <= 1e-9).then_some(r as i64)
    }

    /// Errors if some mode of the lattice has `k + A = 0` at an endpoint.
    /// With a window, only modes in `[k_min, k_max]` are checked.
    pub fn check_endpoint_invertibility(
        &self,
        spin: SpinStructure,
        window: Option<(f64, f64)>,
    ) -> Result<()> {
        for s in [self.s1, self.s2] {
            let a = self.eval(s).0;
            let k = (-a - spin.offset()).round() + spin.offset();
            let in_window = window.map_or(true, |(lo, hi)| k >= lo - 1e-12 && k <= hi + 1e-12);
            if in_window && (k + a).abs() < MASS_EPS {
                return Err(Error::NonInvertibleBoundary(format!(
                    "mode k = {k} has k + A(s) = 0 at the path endpoint s = {s}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn scan_grid(&self) -> Vec<f64> {
        let n = SCAN_POINTS - 1;
        let h = (self.s2 - self.s1) / n as f64;
        (0..=n)
            .map(|i| if i == n { self.s2 } else { self.s1 + i as f64 * h })
            .collect()
    }

    /// Interior zeros of `A'`, located by sign-change bisection.
    pub fn critical_points(&self) -> Vec<f64> {
        let grid = self.scan_grid();
        let d = |s: f64| self.eval(s).1;
        let mut out = Vec::new();
        for w in grid.windows(2) {
            let (a, b) = (d(w[0]), d(w[1]));
            if a == 0.0 {
                if w[0] > self.s1 {
                    out.push(w[0]);
                }
            } else if a * b < 0.0 {
                out.push(bisect(d, w[0], w[1]));
            }
        }
        out
    }

    /// `[min A, max A]` over the path.
    pub fn a_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in self.scan_grid().into_iter().chain(self.critical_points()) {
            let a = self.eval(s).0;
            lo = lo.min(a);
            hi = hi.max(a);
        }
        (lo, hi)
    }

    /// Solutions of `A(s) = c`: sign changes refined by bisection, exact
    /// hits at scan nodes, and tangential hits at critical points
    /// (`|A − c| ≤ 1e−10`). Sorted and deduplicated.
    pub(crate) fn level_set(&self, c: f64) -> Vec<f64> {
        let g = |s: f64| self.eval(s).0 - c;
        let grid = self.scan_grid();
        let mut roots = Vec::new();
        for (i, w) in grid.windows(2).enumerate() {
            let (a, b) = (g(w[0]), g(w[1]));
            if a == 0.0 {
                roots.push(w[0]);
            } else if a * b < 0.0 {
                roots.push(bisect(g, w[0], w[1]));
            }
            if i == grid.len() - 2 && b == 0.0 {
                roots.push(w[1]);
            }
        }
        for s in self.critical_points() {
            if g(s).abs() <= 1e-10 {
                // A tangential zero may also have produced a spurious
                // sign-change pair from rounding; the critical point wins.
                roots.retain(|r| (r - s).abs() > 1e-6);
                roots.push(s);
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        roots
    }
}

/// Bisection to floating-point resolution; `g(lo)` and `g(hi)` must have
/// opposite signs.
pub(crate) fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let glo = g(lo);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if g(lo).abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Every lattice value `k` for which `k + A(s) = 0` somewhere on the path.
pub fn allowed_modes(spin: SpinStructure, path: &GaugePath) -> Vec<f64> {
    let (lo, hi) = path.a_range();
    let margin = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    spin.modes_between(-hi - margin, -lo + margin)
}

#[derive(Debug, Clone, PartialEq)]
struct NaturalSpline {
    s: Vec<f64>,
    a: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl NaturalSpline {
    fn new(knots: &[(f64, f64)]) -> Self {
        let n = knots.len();
        let s: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let a: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior equations.
            let h: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                rhs[i] = 6.0 * ((a[i + 2] - a[i + 1]) / h[i + 1] - (a[i + 1] - a[i]) / h[i]);
            }
            for i in 1..k {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * h[i];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
            }
        }
        NaturalSpline { s, a, m }
    }

    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let n = self.s.len();
        let i = match self.s.partition_point(|&v| v <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.s[i + 1] - self.s[i];
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.a[i], self.a[i + 1]);
        let b = (self.s[i + 1] - x) / h;
        let c = (x - self.s[i]) / h;
        let val = m0 * b.powi(3) * h * h / 6.0
            + m1 * c.powi(3) * h * h / 6.0
            + (y0 - m0 * h * h / 6.0) * b
            + (y1 - m1 * h * h / 6.0) * c;
        let d1 = -m0 * b * b * h / 2.0 + m1 * c * c * h / 2.0 + (y1 - y0) / h - (m1 - m0) * h / 6.0;
        let d2 = m0 * b + m1 * c;
        (val, d1, d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_modes() {
        let p = SpinStructure::Periodic;
        assert_eq!(allowed_modes(p, &GaugePath::example1()), vec![0.0]);
        assert_eq!(allowed_modes(p, &GaugePath::example2()), vec![-2.0, -1.0, 0.0]);
        assert_eq!(allowed_modes(p, &GaugePath::example3()), vec![-1.0, 0.0, 1.0]);
        assert_eq!(
            allowed_modes(SpinStructure::AntiPeriodic, &GaugePath::example2()),
            vec![-2.5, -1.5, -0.5]
        );
    }

    #[test]
    fn windings() {
        assert_eq!(GaugePath::example1().winding(), Some(1));
        assert_eq!(GaugePath::example2().winding(), Some(3));
        assert_eq!(GaugePath::example3().winding(), Some(-1));
        assert_eq!(GaugePath::linear(0.1, 0.5, 0.0, 1.0).unwrap().winding(), None);
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-4;
        let spline = GaugePath::from_knots(
            &[(0.0, -0.3), (0.2, 0.1), (0.5, 0.4), (0.7, 0.2), (1.0, 0.9)],
            0.0,
            1.0,
        )
        .unwrap();
        // Centered differences carry a truncation error h²|A'''|/6; the sine
        // path has |A'''| = (4π)³, so its bound is scaled accordingly.
        let sine_bound = h * h * (4.0 * PI).powi(3) / 6.0 + 1e-9;
        for (path, tol) in [
            (GaugePath::example1(), 1e-6),
            (GaugePath::example2(), 1e-6),
            (GaugePath::example3(), sine_bound),
            (spline, 1e-6),
        ] {
            let (s1, s2) = path.s_range();
            for i in 1..20 {
                // Offset keeps the stencil off the spline knots.
                let s = s1 + (s2 - s1) * (i as f64 + 0.37) / 20.0;
                let fd = (path.a(s + h).unwrap() - path.a(s - h).unwrap()) / (2.0 * h);
                assert!((fd - path.a_prime(s).unwrap()).abs() < tol, "{} at {s}", path.label());
                let fd2 = (path.a_prime(s + h).unwrap() - path.a_prime(s - h).unwrap()) / (2.0 * h);
                assert!((fd2 - path.a_second(s).unwrap()).abs() < 4.0 * PI * tol);
            }
        }
    }

    #[test]
    fn spline_interpolates_and_is_natural() {
        let knots = [(0.0, 1.0), (0.3, -1.0), (0.6, 0.5), (1.0, 2.0)];
        let p = GaugePath::from_knots(&knots, 0.0, 1.0).unwrap();
        for (s, a) in knots {
            assert!((p.a(s).unwrap() - a).abs() < 1e-14);
        }
        assert!(p.a_second(0.0).unwrap().abs() < 1e-12);
        assert!(p.a_second(1.0).unwrap().abs() < 1e-12);
        let line = GaugePath::from_knots(&[(0.0, -0.5), (0.5, 0.0), (1.0, 0.5)], 0.0, 1.0).unwrap();
        assert!((line.a(0.25).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn parse_knot_file() {
        let text = "# example 1 as a spline\ns_range 0 1\n0 -0.5\n0.5 0\n1 0.5\n";
        let p = GaugePath::parse(text).unwrap();
        assert_eq!(p.s_range(), (0.0, 1.0));
        assert_eq!(p.winding(), Some(1));
        assert!(matches!(
            GaugePath::parse("0 1\ns_range 0 1\n"),
            Err(Error::PathFormat { line: 1, .. })
        ));
        assert!(matches!(
            GaugePath::parse("s_range 0 1\n0 x\n"),
            Err(Error::PathFormat { line: 2, .. })
        ));
        assert!(GaugePath::parse("s_range 0 1\n0 1\n0.5 2\n").is_err());
        assert!(GaugePath::parse("s_range 0 1\n0 1\n0.6 2\n0.5 1\n1 0\n").is_err());
    }

    #[test]
    fn level_sets() {
        let ex3 = GaugePath::example3();
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
        };
        assert!(close(&ex3.level_set(0.0), &[0.25, 0.5, 0.75]));
        assert!(close(&ex3.level_set(-1.0), &[0.375, 0.875]));
        assert!(close(&ex3.level_set(1.0), &[0.125, 0.625]));
        assert!(close(&GaugePath::example1().level_set(0.0), &[0.5]));
        assert!(close(&GaugePath::example2().level_set(1.0), &[5.0 / 12.0]));
    }

    #[test]
    fn endpoint_invertibility() {
        let ex3 = GaugePath::example3();
        assert!(ex3.check_endpoint_invertibility(SpinStructure::Periodic, None).is_ok());
        assert!(ex3
            .check_endpoint_invertibility(SpinStructure::AntiPeriodic, None)
            .is_err());
        assert!(ex3
            .check_endpoint_invertibility(SpinStructure::AntiPeriodic, Some((1.0, 3.0)))
            .is_ok());
        assert!(GaugePath::example1()
            .check_endpoint_invertibility(SpinStructure::AntiPeriodic, None)
            .is_err());
    }

    #[test]
    fn range_checks() {
        let p = GaugePath::example3();
        assert!(p.a(0.0).is_err());
        assert!(p.a(0.5).is_ok());
        assert!(GaugePath::linear(0.0, 1.0, 1.0, 0.0).is_err());
    }
}
