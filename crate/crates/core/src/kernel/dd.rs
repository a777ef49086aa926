//! Double-double (~31 significant digits) real and complex arithmetic.
//!
//! The kernel group sum on the diagonal suffers catastrophic cancellation at
//! small weight: individual terms are O(1) while the sum can be ~1e-18, which
//! f64 cannot resolve. Double-double accumulation restores ~1e-31 headroom.
//! Only +, -, *, /, sqrt and integer powers are needed; no transcendentals.

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    // mul_add is correctly rounded whether or not hardware FMA exists.
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    /// One Newton refinement on the f64 square root.
    #[inline]
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let y = self.hi.sqrt();
        let yd = Dd::from_f64(y);
        yd.add(self.div(yd)).mul(Dd::from_f64(0.5))
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug, Default)]
pub struct DdC {
    pub re: Dd,
    pub im: Dd,
}

impl DdC {
    pub const ZERO: DdC = DdC { re: Dd::ZERO, im: Dd::ZERO };

    #[inline]
    pub fn new(re: Dd, im: Dd) -> Self {
        DdC { re, im }
    }

    #[inline]
    pub fn from_f64(re: f64, im: f64) -> Self {
        DdC { re: Dd::from_f64(re), im: Dd::from_f64(im) }
    }

    #[inline]
    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline]
    pub fn add(self, o: DdC) -> DdC {
        DdC::new(self.re.add(o.re), self.im.add(o.im))
    }

    #[inline]
    pub fn sub(self, o: DdC) -> DdC {
        DdC::new(self.re.sub(o.re), self.im.sub(o.im))
    }

    #[inline]
    pub fn mul(self, o: DdC) -> DdC {
        DdC::new(
            self.re.mul(o.re).sub(self.im.mul(o.im)),
            self.re.mul(o.im).add(self.im.mul(o.re)),
        )
    }

    #[inline]
    pub fn scale(self, s: Dd) -> DdC {
        DdC::new(self.re.mul(s), self.im.mul(s))
    }

    #[inline]
    pub fn norm_sqr(self) -> Dd {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }

    #[inline]
    pub fn div(self, o: DdC) -> DdC {
        let d = o.norm_sqr();
        let num = self.mul(DdC::new(o.re, o.im.neg()));
        DdC::new(num.re.div(d), num.im.div(d))
    }

    /// Integer power by binary exponentiation.
    pub fn powi(self, mut k: u32) -> DdC {
        let mut base = self;
        let mut acc = DdC::from_f64(1.0, 0.0);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(base);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_resolves_cancellation_below_f64() {
        // (1 + 2^-60) - 1 in Dd keeps the tiny residue exactly.
        let one = Dd::from_f64(1.0);
        let tiny = Dd::from_f64(2.0f64.powi(-60));
        let r = one.add(tiny).sub(one);
        assert_eq!(r.to_f64(), 2.0f64.powi(-60));
    }

    #[test]
    fn dd_div_and_sqrt_roundtrip() {
        let a = Dd::from_f64(3.0);
        let b = Dd::from_f64(7.0);
        let q = a.div(b).mul(b).sub(a);
        assert!(q.to_f64().abs() < 1e-30);
        let s = Dd::from_f64(2.0).sqrt();
        let err = s.mul(s).sub(Dd::from_f64(2.0));
        assert!(err.to_f64().abs() < 1e-30);
    }

    proptest::proptest! {
        #[test]
        fn prop_dd_field_ops_refine_f64(
            a in -1.0e3f64..1.0e3,
            b in 0.5f64..1.0e3,
        ) {
            // Dd results agree with f64 to f64 accuracy and reproduce the
            // inputs through inverse operations far below f64 resolution.
            let (da, db) = (Dd::from_f64(a), Dd::from_f64(b));
            let q = da.div(db);
            let r = q.mul(db).sub(da).to_f64();
            proptest::prop_assert!(r.abs() <= 1e-26 * a.abs().max(1.0));
            let s = db.sqrt();
            let r = s.mul(s).sub(db).to_f64();
            proptest::prop_assert!(r.abs() <= 1e-26 * b);
        }

        #[test]
        fn prop_ddc_powi_matches_f64_powering(
            re in -0.9f64..0.9,
            im in -0.9f64..0.9,
            k in 1u32..40,
        ) {
            let z = DdC::from_f64(re, im);
            let dd = z.powi(k).to_complex();
            let f = super::super::cpow_int(num_complex::Complex64::new(re, im), k);
            let scale = f.norm().max(1e-280);
            proptest::prop_assert!((dd - f).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn ddc_power_matches_exact_small_case() {
        // (3+i)^8 = -8432 + 5376i exactly, so (3/4 + i/4)^8 = that / 4^8.
        let z = DdC::from_f64(0.75, 0.25);
        let p = z.powi(8);
        assert!((p.re.to_f64() - (-8432.0 / 65536.0)).abs() < 1e-28);
        assert!((p.im.to_f64() - (5376.0 / 65536.0)).abs() < 1e-28);
    }
}
