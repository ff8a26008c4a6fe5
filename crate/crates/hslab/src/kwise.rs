//! 2k-wise independent hash families: degree-(2k-1) polynomials over
//! GF(2^ell) acting on ell-bit strings.
//!
//! A random member is 2k-wise independent in the textbook sense: the images
//! of any 2k distinct points are jointly uniform. Members blind oracle
//! outputs during rerandomization.

use crate::bits::Bits;
use crate::gf2::Gf2e;
use crate::oracle::{BitOracle, OracleError};
use rand::Rng;

#[derive(Clone, Copy, Debug)]
pub struct KWiseFamily {
    two_k: u32,
    field: Gf2e,
}

#[derive(Clone, Debug)]
pub struct KWiseMember {
    field: Gf2e,
    /// Coefficients, constant term first; length = 2k.
    coeffs: Vec<u64>,
}

impl KWiseFamily {
    /// Family of 2k-wise independent functions on ell-bit strings
    /// (ell <= 64).
    pub fn new(two_k: u32, ell: u32) -> Result<Self, OracleError> {
        if ell == 0 || ell > 64 {
            return Err(OracleError::WidthUnsupported(ell));
        }
        assert!(two_k >= 1, "independence parameter must be positive");
        Ok(KWiseFamily {
            two_k,
            field: Gf2e::new(ell).expect("ell <= 64"),
        })
    }

    pub fn width(&self) -> u32 {
        self.field.degree()
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> KWiseMember {
        let mask = if self.width() == 64 {
            u64::MAX
        } else {
            (1u64 << self.width()) - 1
        };
        let coeffs = (0..self.two_k).map(|_| rng.gen::<u64>() & mask).collect();
        KWiseMember {
            field: self.field,
            coeffs,
        }
    }

    /// Every member of the family; feasible only for tiny (two_k, ell).
    pub fn enumerate(&self) -> Vec<KWiseMember> {
        let q = 1u64 << self.width();
        let count = q.pow(self.two_k);
        assert!(count <= 1 << 20, "family too large to enumerate");
        (0..count)
            .map(|mut idx| {
                let coeffs = (0..self.two_k)
                    .map(|_| {
                        let c = idx % q;
                        idx /= q;
                        c
                    })
                    .collect();
                KWiseMember {
                    field: self.field,
                    coeffs,
                }
            })
            .collect()
    }
}

impl KWiseMember {
    /// The identity polynomial h(x) = x at the given width.
    pub fn identity(ell: u32) -> Self {
        KWiseMember {
            field: Gf2e::new(ell).expect("ell <= 64"),
            coeffs: vec![0, 1],
        }
    }

    pub fn width(&self) -> u32 {
        self.field.degree()
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.field.poly_eval(&self.coeffs, x)
    }

    pub fn apply(&self, bits: &Bits) -> Bits {
        debug_assert_eq!(bits.len(), self.width());
        Bits::from_u64(self.width(), self.eval(bits.to_u64()))
    }
}

/// h o f: post-compose a family member with a bit oracle of matching width.
pub fn compose_member(h: &KWiseMember, f: &BitOracle) -> Result<BitOracle, OracleError> {
    if f.out_bits() != h.width() {
        return Err(OracleError::WidthMismatch {
            expected: h.width(),
            got: f.out_bits(),
        });
    }
    let h = h.clone();
    Ok(f.map_output(f.out_bits(), move |bits| h.apply(&bits)))
}
