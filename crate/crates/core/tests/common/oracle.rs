//! Fixed-point oracle for the pinching constants: every radical is
//! evaluated on big integers scaled by 10^60, then rounded to f64 once.
#![allow(dead_code)]

use num_bigint::BigInt;

pub const DIGITS: u32 = 60;
pub const REL_TOL: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct Fx(pub BigInt);

pub fn unit() -> BigInt {
    BigInt::from(10u32).pow(DIGITS)
}

pub fn iroot(a: &BigInt, k: u32) -> BigInt {
    assert!(a.sign() != num_bigint::Sign::Minus);
    if a.bits() == 0 {
        return BigInt::from(0);
    }
    // Newton from above
    let mut x = BigInt::from(1) << ((a.bits() as u32 / k) + 1);
    loop {
        let y = (&x * (k - 1) + a / x.pow(k - 1)) / k;
        if y >= x {
            return x;
        }
        x = y;
    }
}

impl Fx {
    pub fn ratio(a: i64, b: i64) -> Fx {
        Fx(BigInt::from(a) * unit() / BigInt::from(b))
    }
    pub fn int(a: i64) -> Fx {
        Fx::ratio(a, 1)
    }
    pub fn add(&self, o: &Fx) -> Fx {
        Fx(&self.0 + &o.0)
    }
    pub fn mul(&self, o: &Fx) -> Fx {
        Fx(&self.0 * &o.0 / unit())
    }
    pub fn div(&self, o: &Fx) -> Fx {
        Fx(&self.0 * unit() / &o.0)
    }
    pub fn sqrt(&self) -> Fx {
        Fx(iroot(&(&self.0 * unit()), 2))
    }
    /// `self^(a/b)` for positive integers `a, b`.
    pub fn pow_ratio(&self, a: u32, b: u32) -> Fx {
        let num = self.0.pow(a) * unit().pow(b) / unit().pow(a);
        Fx(iroot(&num, b))
    }
    pub fn to_f64(&self) -> f64 {
        let s = self.0.to_string();
        let (int, frac) = if s.len() > DIGITS as usize {
            s.split_at(s.len() - DIGITS as usize)
        } else {
            ("0", s.as_str())
        };
        format!("{int}.{frac:0>60}").parse().unwrap()
    }
}

pub fn sqrt_ratio(a: i64, b: i64) -> Fx {
    Fx::ratio(a, b).sqrt()
}

pub fn oracle_c(n: i64) -> Fx {
    let n2 = n * n;
    let t1 = Fx::int(4 * (n2 - 2)).div(&Fx::int(n).mul(&Fx::int(n2 - 1).sqrt()));
    let t2 = Fx::int(n2 - n - 4).div(&Fx::int((n - 2) * n * (n2 - 1)).sqrt());
    let t3 = sqrt_ratio((n - 2) * (n - 1), n);
    t1.add(&t2).add(&t3)
}

pub fn oracle_e(n: i64) -> Fx {
    oracle_c(n).add(&sqrt_ratio((n - 2).pow(3), 2 * (n - 1)))
}

pub fn oracle_core(n: i64) -> Fx {
    oracle_c(n).add(&Fx::int(n - 2).mul(&sqrt_ratio(n - 2, 2 * (n - 1))))
}

pub fn oracle_eps_critical(n: i64) -> Fx {
    Fx::int(n - 2).div(&Fx::int(4 * (n - 1)).mul(&oracle_core(n)))
}

pub fn oracle_eps_large(n: i64) -> Fx {
    Fx::int(1).div(&Fx::int(n - 1).mul(&oracle_core(n)))
}

/// Intermediate branch at `p = pn/pd`.
pub fn oracle_eps_intermediate(n: i64, pn: i64, pd: i64) -> Fx {
    // base = (n-2)(2p-n)/(n(6-n)), exponent n/(2p) = n pd / (2 pn)
    let two_p_minus_n = Fx::ratio(2 * pn - n * pd, pd);
    let base = Fx::int(n - 2).mul(&two_p_minus_n).div(&Fx::int(n * (6 - n)));
    let g = gcd(n * pd, 2 * pn);
    let lead = base.pow_ratio((n * pd / g) as u32, (2 * pn / g) as u32);
    let p = Fx::ratio(pn, pd);
    let num = Fx::int(6 - n).mul(&p);
    let den = Fx::int(2 * (n - 1)).mul(&two_p_minus_n).mul(&oracle_core(n));
    lead.mul(&num).div(&den)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn oracle_c1(n: i64) -> Fx {
    if n <= 5 {
        sqrt_ratio(n - 2, 32 * (n - 1))
    } else {
        Fx::int(1).div(&Fx::int(2 * (n - 2) * (n - 1)).sqrt())
    }
}

pub fn oracle_c2(n: i64) -> Fx {
    match n {
        4 => sqrt_ratio(6, 4),
        5 => Fx::int(8).mul(&Fx::int(10).sqrt()).div(&Fx::int(15)),
        _ => {
            let n2 = n * n;
            let t1 = Fx::int(4 * (n2 - 2)).div(&Fx::int(n).mul(&Fx::int(n2 - 1).sqrt()));
            let t2 = Fx::int(n2 - n - 4).div(&Fx::int((n - 2) * (n - 1) * n * (n + 1)).sqrt());
            t1.add(&t2)
        }
    }
}

pub fn assert_close(name: &str, got: f64, want: &Fx) {
    let w = want.to_f64();
    let rel = (got - w).abs() / w.abs();
    assert!(rel <= REL_TOL, "{name}: got {got:e}, oracle {w:e}, rel {rel:e}");
}


pub fn rel_err(got: f64, want: &Fx) -> f64 {
    let w = want.to_f64();
    (got - w).abs() / w.abs()
}
