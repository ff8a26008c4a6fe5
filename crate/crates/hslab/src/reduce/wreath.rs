//! Hidden shift to hidden subgroup: the wreath-product embedding, plus the
//! two reductions special to (Z/2)^n.
//!
//! For a shift pair in the right-shift orientation F_0(x) = F_1(x s) on G,
//! the function
//!
//! ```text
//! phi((x, y), b) = (F_b(x), F_(b xor 1)(y))
//! ```
//!
//! on the wreath product K = (G x G) x| Z/2 (the flip swaps coordinates) is
//! constant and distinct on the left cosets of the order-two subgroup
//! generated by ((s, s^-1), 1).
//!
//! Over xor:n two cheaper embeddings exist: the bit-prefix function
//! g(b || x) = f_b(x) on xor:(n+1) hides {0, 1 || s}, and the pointwise sum
//! g = f_0 xor f_1 on xor:n itself hides {0, s}.

use crate::bits::Bits;
use crate::group::{scalar_element, Group, GroupElement, GroupKind};
use crate::instance::{HsInstance, Secret, Variant};
use crate::oracle::BitOracle;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

/// An element ((a, b), flip) of G wr Z/2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WreathElement {
    pub a: GroupElement,
    pub b: GroupElement,
    pub flip: bool,
}

/// The wreath product group K = (G x G) x| Z/2.
#[derive(Clone, Copy)]
pub struct WreathGroup {
    pub base: Group,
}

impl WreathGroup {
    pub fn identity(&self) -> WreathElement {
        WreathElement {
            a: self.base.identity(),
            b: self.base.identity(),
            flip: false,
        }
    }

    pub fn mul(&self, x: &WreathElement, y: &WreathElement) -> WreathElement {
        // ((a,b), e) ((c,d), f) = ((a,b) * sigma^e(c,d), e xor f)
        let (c, d) = if x.flip { (&y.b, &y.a) } else { (&y.a, &y.b) };
        WreathElement {
            a: self.base.mul(&x.a, c),
            b: self.base.mul(&x.b, d),
            flip: x.flip ^ y.flip,
        }
    }

    pub fn inv(&self, x: &WreathElement) -> WreathElement {
        // inverse of ((a,b), e): ((a,b), e)^-1 = (sigma^e(a^-1, b^-1), e)
        let ai = self.base.inv(&x.a);
        let bi = self.base.inv(&x.b);
        let (na, nb) = if x.flip { (bi, ai) } else { (ai, bi) };
        WreathElement {
            a: na,
            b: nb,
            flip: x.flip,
        }
    }

    /// All 2|G|^2 elements (desk scale).
    pub fn enumerate(&self) -> Vec<WreathElement> {
        let all = self.base.enumerate().expect("desk scale");
        let mut out = Vec::with_capacity(2 * all.len() * all.len());
        for flip in [false, true] {
            for a in &all {
                for b in &all {
                    out.push(WreathElement {
                        a: a.clone(),
                        b: b.clone(),
                        flip,
                    });
                }
            }
        }
        out
    }
}

/// A hidden-subgroup instance on G wr Z/2 with the planted generator
/// concealed behind the same open-flag contract as [`HsInstance`].
pub struct WreathInstance {
    pub wreath: WreathGroup,
    phi: Arc<dyn Fn(&WreathElement) -> (Bits, Bits) + Send + Sync>,
    planted: WreathElement,
    opened: AtomicBool,
}

impl WreathInstance {
    pub fn phi(&self, w: &WreathElement) -> (Bits, Bits) {
        (self.phi)(w)
    }

    pub fn open_planted(&self) -> &WreathElement {
        self.opened.store(true, Ordering::SeqCst);
        &self.planted
    }

    pub fn opened(&self) -> bool {
        self.opened.load(Ordering::SeqCst)
    }
}

/// Lift a shifted instance (g = f o L_s) into the wreath product. The
/// right-shift pair is F_b(x) = (b ? g : f)(x^-1), which satisfies
/// F_0(x) = F_1(x s); the hidden subgroup generator is ((s, s^-1), 1).
pub fn wreath_lift(inst: &HsInstance) -> WreathInstance {
    let g = inst.group;
    let pair = inst.pair();
    let (f, gg) = (pair.f, pair.g);
    let (g0, g1) = (g, g);
    let f0 = move |x: &GroupElement| f.eval(&g0.inv(x));
    let f1 = move |x: &GroupElement| gg.eval(&g1.inv(x));
    let phi = move |w: &WreathElement| -> (Bits, Bits) {
        if w.flip {
            (f1(&w.a), f0(&w.b))
        } else {
            (f0(&w.a), f1(&w.b))
        }
    };
    let s = match inst.simulator_secret() {
        Secret::Shift(s) => s.clone(),
        _ => panic!("wreath_lift needs a shifted instance"),
    };
    WreathInstance {
        wreath: WreathGroup { base: g },
        phi: Arc::new(phi),
        planted: WreathElement {
            a: s.clone(),
            b: g.inv(&s),
            flip: true,
        },
        opened: AtomicBool::new(false),
    }
}

/// Bit-prefix lift over xor:n -> a hidden-subgroup instance on xor:(n+1)
/// hiding {0, (1 << n) | s}: g(b || x) = f_b(x) with f_0 = instance g,
/// f_1 = instance f (so that f_0(x) = f_1(x xor s)).
pub fn bit_prefix_lift(inst: &HsInstance) -> HsInstance {
    let GroupKind::Xor { n } = inst.group.kind() else {
        panic!("bit-prefix lift is special to xor families")
    };
    let big = Group::from_descriptor(&format!("xor:{}", n + 1)).expect("valid");
    let pair = inst.pair();
    let ell = pair.f.out_bits();
    let small = inst.group;
    let (f, gg) = (pair.f, pair.g);
    let lifted = BitOracle::new(&big, ell, move |bx| {
        let v = bx.scalar().unwrap();
        let x = scalar_element(&small, v & ((1 << n) - 1));
        if v >> n == 0 {
            gg.eval(&x)
        } else {
            f.eval(&x)
        }
    });
    let s = match inst.simulator_secret() {
        Secret::Shift(s) => s.scalar().unwrap(),
        _ => panic!("needs a shifted instance"),
    };
    let generator = scalar_element(&big, (1u64 << n) | s);
    HsInstance::from_parts(
        &big,
        Variant::Rhsp,
        ell,
        inst.seed,
        lifted.clone(),
        lifted,
        Secret::Subgroup(generator),
    )
}

/// XOR-sum lift: g = f_0 xor f_1 on xor:n hides {0, s}.
pub fn xor_sum_lift(inst: &HsInstance) -> HsInstance {
    let GroupKind::Xor { .. } = inst.group.kind() else {
        panic!("xor-sum lift is special to xor families")
    };
    let pair = inst.pair();
    let summed = pair.f.xor_with(&pair.g).expect("same width");
    let s = match inst.simulator_secret() {
        Secret::Shift(s) => s.clone(),
        _ => panic!("needs a shifted instance"),
    };
    HsInstance::from_parts(
        &inst.group,
        Variant::Rhsp,
        pair.f.out_bits(),
        inst.seed,
        summed.clone(),
        summed,
        Secret::Subgroup(s),
    )
}

/// Exhaustive check that phi is constant on each left coset of <planted> and
/// distinct across cosets. Desk scale.
pub fn wreath_coset_structure_holds(w: &WreathInstance) -> bool {
    let k = w.wreath;
    let g = k.base;
    let gen = w.open_planted().clone();
    let encode = |x: &WreathElement| -> (Vec<u8>, Vec<u8>, bool) {
        (
            g.encode(&x.a).bytes().to_vec(),
            g.encode(&x.b).bytes().to_vec(),
            x.flip,
        )
    };
    let mut seen = std::collections::HashMap::new();
    for x in k.enumerate() {
        let v = w.phi(&x);
        let partner = k.mul(&x, &gen);
        if w.phi(&partner) != v {
            return false; // not constant on the coset {x, x * gen}
        }
        // canonical coset key: the lexicographically smaller member
        let key = encode(&x).min(encode(&partner));
        if let Some(prev) = seen.insert(key, v.clone()) {
            if prev != v {
                return false;
            }
        }
    }
    // distinctness across cosets
    let values: std::collections::HashSet<_> = seen.values().cloned().collect();
    values.len() == seen.len()
}
