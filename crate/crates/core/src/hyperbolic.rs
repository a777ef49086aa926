//! Upper half-plane geometry and the modular group.
//!
//! Provides the point/matrix types, the Möbius action, reduction to the
//! canonical fundamental domain, and enumeration of all group elements that
//! move a point into a hyperbolic ball around another point. The enumeration
//! is the work-horse of the kernel group sum; it is certified against a
//! brute-force oracle over bounded matrix entries.

use num_complex::Complex64;

use crate::{Error, Result};

/// A point z = x + iy of the hyperbolic upper half-plane (y > 0).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Self {
        assert!(
            y > 0.0 && x.is_finite() && y.is_finite(),
            "point must lie in the open upper half-plane with finite coordinates"
        );
        Self { x, y }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// An element of SL2(Z), acting on the upper half-plane by Möbius maps.
///
/// The determinant condition a*d - b*c = 1 is checked exactly in integer
/// arithmetic on construction and preserved by products and inverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl GroupElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        assert_eq!(det, 1, "matrix ({a},{b};{c},{d}) has determinant {det} != 1");
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    /// The translation z -> z + n.
    pub fn translation(n: i64) -> Self {
        Self::new(1, n, 0, 1)
    }

    /// The inversion S: z -> -1/z.
    pub fn inversion() -> Self {
        Self::new(0, -1, 1, 0)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    /// Matrix product, failing on i64 overflow.
    pub fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        let a = self.a.checked_mul(rhs.a)?.checked_add(self.b.checked_mul(rhs.c)?)?;
        let b = self.a.checked_mul(rhs.b)?.checked_add(self.b.checked_mul(rhs.d)?)?;
        let c = self.c.checked_mul(rhs.a)?.checked_add(self.d.checked_mul(rhs.c)?)?;
        let d = self.c.checked_mul(rhs.b)?.checked_add(self.d.checked_mul(rhs.d)?)?;
        Some(Self::new(a, b, c, d))
    }

    pub fn det(&self) -> i128 {
        (self.a as i128) * (self.d as i128) - (self.b as i128) * (self.c as i128)
    }
}

/// Applies the Möbius map gamma.z = (az + b)/(cz + d).
pub fn moebius_apply(g: &GroupElement, z: &UpperHalfPoint) -> UpperHalfPoint {
    let zc = z.as_complex();
    let num = Complex64::new(g.a as f64, 0.0) * zc + Complex64::new(g.b as f64, 0.0);
    let den = Complex64::new(g.c as f64, 0.0) * zc + Complex64::new(g.d as f64, 0.0);
    UpperHalfPoint::from_complex(num / den)
}

/// The point-pair invariant u(z,w) = |z-w|^2 / (4 Im z Im w).
///
/// Monotone in hyperbolic distance: cosh d(z,w) = 2u + 1.
pub fn point_pair_invariant(z: &UpperHalfPoint, w: &UpperHalfPoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    (dx * dx + dy * dy) / (4.0 * z.y * w.y)
}

/// Hyperbolic distance, via the arcosh form. Used as an independent oracle
/// for `point_pair_invariant` in tests.
pub fn hyperbolic_distance(z: &UpperHalfPoint, w: &UpperHalfPoint) -> f64 {
    let u = point_pair_invariant(z, w);
    (2.0 * u + 1.0).acosh()
}

const REDUCTION_ITERATION_CAP: usize = 20_000;

/// Reduces z to the canonical fundamental domain |Re z| <= 1/2, |z| >= 1.
///
/// Returns the reduced point together with gamma such that gamma.z is the
/// returned point. Boundary representatives are accepted on either side.
pub fn reduce_to_fundamental(z: &UpperHalfPoint) -> Result<(UpperHalfPoint, GroupElement)> {
    let mut p = *z;
    let mut g = GroupElement::identity();
    for _ in 0..REDUCTION_ITERATION_CAP {
        let n = p.x.round();
        if n != 0.0 {
            if n.abs() > 9.0e17 {
                return Err(Error::ReductionDiverged);
            }
            let t = GroupElement::translation(-(n as i64));
            g = t.checked_mul(&g).ok_or(Error::ReductionDiverged)?;
            p = UpperHalfPoint::new(p.x - n, p.y);
        }
        let norm2 = p.x * p.x + p.y * p.y;
        if norm2 < 1.0 - 1.0e-15 {
            let s = GroupElement::inversion();
            g = s.checked_mul(&g).ok_or(Error::ReductionDiverged)?;
            p = moebius_apply(&s, &p);
        } else {
            return Ok((p, g));
        }
    }
    Err(Error::ReductionDiverged)
}

/// Membership in the closed fundamental domain, with absolute slack on both
/// defining inequalities.
pub fn in_fundamental_domain(p: &UpperHalfPoint, slack: f64) -> bool {
    p.x.abs() <= 0.5 + slack && p.x * p.x + p.y * p.y >= 1.0 - slack
}

/// The elliptic points e1 = e^{i pi/3}, e2 = i, e3 = e^{2 i pi/3} of the
/// modular surface.
pub fn elliptic_points() -> [UpperHalfPoint; 3] {
    let h = 3.0f64.sqrt() / 2.0;
    [
        UpperHalfPoint::new(0.5, h),
        UpperHalfPoint::new(0.0, 1.0),
        UpperHalfPoint::new(-0.5, h),
    ]
}

/// A subdomain of the half-plane used for grids, norms, and experiments.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub enum Region {
    /// Axis-aligned rectangle [x0, x1] x [y0, y1].
    CompactRectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// The fundamental domain truncated at Im z <= y_cap.
    FundamentalTruncated { y_cap: f64 },
    /// The fundamental domain minus the delta-neighborhoods of the three
    /// elliptic points, truncated at Im z <= y_cap. Requires 0 < delta < 1.
    BulkFDelta { delta: f64, y_cap: f64 },
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Region::CompactRectangle { x0, x1, y0, y1 } => x1 > x0 && y1 > y0 && *y0 > 0.0,
            Region::FundamentalTruncated { y_cap } => *y_cap > 3.0f64.sqrt() / 2.0,
            Region::BulkFDelta { delta, y_cap } => {
                *delta > 0.0 && *delta < 1.0 && *y_cap > 3.0f64.sqrt() / 2.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DegenerateInput(format!("region has empty area: {self:?}")))
        }
    }

    pub fn contains(&self, p: &UpperHalfPoint) -> bool {
        match self {
            Region::CompactRectangle { x0, x1, y0, y1 } => {
                p.x >= *x0 && p.x <= *x1 && p.y >= *y0 && p.y <= *y1
            }
            Region::FundamentalTruncated { y_cap } => {
                in_fundamental_domain(p, 1.0e-12) && p.y <= *y_cap
            }
            Region::BulkFDelta { delta, y_cap } => {
                in_fundamental_domain(p, 1.0e-12)
                    && p.y <= *y_cap
                    && elliptic_points().iter().all(|e| {
                        let dx = p.x - e.x;
                        let dy = p.y - e.y;
                        dx * dx + dy * dy > delta * delta
                    })
            }
        }
    }

    /// x-extent used when laying out grid rows.
    pub fn x_span(&self) -> (f64, f64) {
        match self {
            Region::CompactRectangle { x0, x1, .. } => (*x0, *x1),
            _ => (-0.5, 0.5),
        }
    }

    /// y-extent used when laying out grid rows.
    pub fn y_span(&self) -> (f64, f64) {
        match self {
            Region::CompactRectangle { y0, y1, .. } => (*y0, *y1),
            Region::FundamentalTruncated { y_cap } | Region::BulkFDelta { y_cap, .. } => {
                (3.0f64.sqrt() / 2.0, *y_cap)
            }
        }
    }
}

/// Default cap on the number of enumerated candidates.
pub const DEFAULT_ENUMERATION_BUDGET: usize = 20_000_000;

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, p, q) = egcd(b, a.rem_euclid(b));
        (g, q, p - (a.div_euclid(b)) * q)
    }
}

/// Coefficients (p, q) with p*c + q*d = 1, for coprime (c, d).
fn bezout_unit(c: i64, d: i64) -> (i64, i64) {
    let (g, p, q) = egcd(c, d);
    debug_assert!(g == 1 || g == -1);
    if g < 0 {
        (-p, -q)
    } else {
        (p, q)
    }
}

/// Streaming enumeration of {gamma in SL2(Z) : u(w, gamma.z) <= X}.
///
/// Both signs of each matrix are emitted (the kernel sum runs over the full
/// group, not PSL2). Emission order is deterministic: the c = 0 family first
/// with b ascending, then c ascending, d ascending, and the translation
/// parameter ascending. The visitor receives (gamma, u(w, gamma.z)); the
/// negated matrix -gamma is implied and NOT passed separately.
pub fn for_each_near(
    z: &UpperHalfPoint,
    w: &UpperHalfPoint,
    x_radius: f64,
    budget: usize,
    mut visit: impl FnMut(GroupElement, f64),
) -> Result<usize> {
    assert!(x_radius >= 0.0, "X must be nonnegative");
    let (x, y) = (z.x, z.y);
    let (u, v) = (w.x, w.y);
    // Slack so that roundoff never shaves a boundary candidate off the window.
    let xs = x_radius * (1.0 + 1.0e-9) + 1.0e-13;
    let t_half = 1.0 + 2.0 * xs;
    let t_disc = 2.0 * (xs * (xs + 1.0)).sqrt();
    let t_hi = t_half + t_disc;
    let t_lo = 1.0 / t_hi; // t_lo * t_hi = 1 exactly in the algebra
    let q_hi = y / (v * t_lo);
    let q_lo = y / (v * t_hi);
    let mut count = 0usize;
    let mut spent = 0usize;

    let mut consider = |g: GroupElement, visit: &mut dyn FnMut(GroupElement, f64)| {
        let gz = moebius_apply(&g, z);
        let uu = point_pair_invariant(w, &gz);
        if uu <= x_radius {
            visit(g, uu);
            count += 2; // gamma and -gamma
        }
    };

    // c = 0: the translations +-T^b (Q = 1).
    if 1.0 >= q_lo * (1.0 - 1.0e-12) && 1.0 <= q_hi * (1.0 + 1.0e-12) {
        let rho2 = 4.0 * xs * y * v - (y - v) * (y - v);
        if rho2 >= 0.0 {
            let rho = rho2.sqrt();
            let lo = (u - x - rho).floor() as i64 - 1;
            let hi = (u - x + rho).ceil() as i64 + 1;
            spent += (hi - lo + 1).max(0) as usize;
            if spent > budget {
                return Err(Error::EnumerationBudget { cap: budget, x: x_radius });
            }
            for b in lo..=hi {
                consider(GroupElement::new(1, b, 0, 1), &mut visit);
            }
        }
    }

    // c >= 1 families.
    let c_max = (q_hi.max(0.0).sqrt() / y * (1.0 + 1.0e-12)).floor() as i64;
    for c in 1..=c_max {
        let cf = c as f64;
        let s2 = q_hi * (1.0 + 1.0e-12) - cf * cf * y * y;
        if s2 < 0.0 {
            continue;
        }
        let s = s2.sqrt();
        let d_lo = (-cf * x - s).floor() as i64 - 1;
        let d_hi = (-cf * x + s).ceil() as i64 + 1;
        // The (c, d) scan itself counts against the budget: a huge radius
        // must fail fast rather than grind through empty windows.
        spent += (d_hi - d_lo + 1).max(0) as usize;
        if spent > budget {
            return Err(Error::EnumerationBudget { cap: budget, x: x_radius });
        }
        for d in d_lo..=d_hi {
            if num_integer_gcd(c, d) != 1 {
                continue;
            }
            let q = (cf * x + d as f64).powi(2) + cf * cf * y * y;
            if q > q_hi * (1.0 + 1.0e-9) || q < q_lo * (1.0 - 1.0e-9) {
                continue;
            }
            // Particular solution of a*d - b*c = 1.
            let (p, qq) = bezout_unit(c, d);
            let (a0, b0) = (qq, -p);
            let g0 = GroupElement::new(a0, b0, c, d);
            let z0 = moebius_apply(&g0, z);
            let y1 = z0.y;
            let rho2 = 4.0 * xs * y1 * v - (y1 - v) * (y1 - v);
            if rho2 < 0.0 {
                continue;
            }
            let rho = rho2.sqrt();
            let m_lo = (u - rho - z0.x).floor() as i64 - 1;
            let m_hi = (u + rho - z0.x).ceil() as i64 + 1;
            spent += (m_hi - m_lo + 1).max(0) as usize;
            if spent > budget {
                return Err(Error::EnumerationBudget { cap: budget, x: x_radius });
            }
            for m in m_lo..=m_hi {
                let a = a0 + m * c;
                let b = b0 + m * d;
                consider(GroupElement::new(a, b, c, d), &mut visit);
            }
        }
    }
    Ok(count)
}

/// Returns exactly the set {gamma : u(w, gamma.z) <= X}, each element once,
/// with +-gamma both listed, in a canonical deterministic order.
pub fn enumerate_near(
    z: &UpperHalfPoint,
    w: &UpperHalfPoint,
    x_radius: f64,
) -> Result<Vec<GroupElement>> {
    enumerate_near_with_budget(z, w, x_radius, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_near_with_budget(
    z: &UpperHalfPoint,
    w: &UpperHalfPoint,
    x_radius: f64,
    budget: usize,
) -> Result<Vec<GroupElement>> {
    let mut out = Vec::new();
    for_each_near(z, w, x_radius, budget, |g, _| {
        out.push(g);
        out.push(g.neg());
    })?;
    Ok(out)
}

/// Count of orbit points within u-radius X of z, and the ratio count/(yX)
/// whose boundedness across sweeps is the lattice-count check.
pub fn count_bound_check(z: &UpperHalfPoint, x_radius: f64) -> Result<(usize, f64)> {
    assert!(x_radius >= 1.0, "count/(yX) ratio is meaningful for X >= 1");
    let n = enumerate_near(z, z, x_radius)?.len();
    Ok((n, n as f64 / (z.y * x_radius)))
}

/// Brute-force oracle: all gamma with max(|a|,|b|,|c|,|d|) <= entry_bound and
/// u(w, gamma.z) <= X. Candidate generation uses only the entry bound (no
/// analytic windows), so it fails independently of `enumerate_near`.
pub fn brute_force_enumerate(
    z: &UpperHalfPoint,
    w: &UpperHalfPoint,
    x_radius: f64,
    entry_bound: i64,
) -> Vec<GroupElement> {
    let mut out = Vec::new();
    let bnd = entry_bound;
    let push_if_near = |g: GroupElement, out: &mut Vec<GroupElement>| {
        let gz = moebius_apply(&g, z);
        if point_pair_invariant(w, &gz) <= x_radius {
            out.push(g);
            out.push(g.neg());
        }
    };
    // c = 0: +-T^b.
    for b in -bnd..=bnd {
        push_if_near(GroupElement::new(1, b, 0, 1), &mut out);
    }
    for c in 1..=bnd {
        for d in -bnd..=bnd {
            if num_integer_gcd(c, d) != 1 {
                continue;
            }
            let (p, q) = bezout_unit(c, d);
            let (a0, b0) = (q, -p);
            // a = a0 + m c, b = b0 + m d; both entries within the bound.
            let (mut m_lo, mut m_hi) = (i64::MIN, i64::MAX);
            tighten(&mut m_lo, &mut m_hi, a0, c, bnd);
            tighten(&mut m_lo, &mut m_hi, b0, d, bnd);
            if m_lo > m_hi {
                continue;
            }
            for m in m_lo..=m_hi {
                push_if_near(GroupElement::new(a0 + m * c, b0 + m * d, c, d), &mut out);
            }
        }
    }
    out.sort();
    out
}

/// Intersects the m-range with {m : |base + m*step| <= bnd}.
fn tighten(m_lo: &mut i64, m_hi: &mut i64, base: i64, step: i64, bnd: i64) {
    if step == 0 {
        if base.abs() > bnd {
            *m_lo = 1;
            *m_hi = 0;
        }
        return;
    }
    let lo = (-bnd - base) as f64 / step as f64;
    let hi = (bnd - base) as f64 / step as f64;
    let (lo, hi) = if step > 0 { (lo, hi) } else { (hi, lo) };
    *m_lo = (*m_lo).max(lo.ceil() as i64);
    *m_hi = (*m_hi).min(hi.floor() as i64);
}

fn num_integer_gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
