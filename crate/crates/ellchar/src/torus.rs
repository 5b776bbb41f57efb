//! The truncated torus `T_h = (O_L / p_L^h)^x` in the equal-characteristic
//! model `L = F_(q^n)((pi))`, built by brute-force multiplication of units of
//! `F_(q^n)[pi]/(pi^h)` and presented through the SNF core, together with
//! the Frobenius action, the congruence filtration `T^a_h`, and the split
//! exact sequence `1 -> T^1_h -> T_h -> T_1 -> 1`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cyclo::RootOfUnity;
use crate::fgab::{blackbox_structure, AbChar, AbHom, BlackboxStructure, FinAb, ENUM_CAP};
use crate::fields::FiniteField;
use crate::{prime_power, Coeff, Error, Rat, Result};

/// Units of the truncated polynomial ring `F_Q[pi]/(pi^h)`, indexed
/// contiguously. Coefficients are field element keys; multiplication runs on
/// small lookup tables (or discrete logs when `h = 1`).
pub struct UnitRing {
    pub field: Arc<FiniteField>,
    pub q_extension: u64,
    pub h: usize,
    pub count: u64,
    mul_tab: Vec<u32>,
    add_tab: Vec<u32>,
    frob_tab: Vec<u32>,
    dlog_of_key: Vec<u32>,
    key_of_dlog: Vec<u32>,
}

impl UnitRing {
    fn build(field: Arc<FiniteField>, q: u64, h: usize) -> Result<UnitRing> {
        let big_q = field.size();
        let count = (big_q - 1)
            .checked_mul(big_q.pow(h as u32 - 1))
            .filter(|&c| c <= ENUM_CAP)
            .ok_or_else(|| Error::CapExceeded("unit group exceeds enumeration cap".into()))?;

        let mut dlog_of_key = vec![0u32; big_q as usize];
        let mut key_of_dlog = vec![0u32; (big_q - 1) as usize];
        for d in 0..big_q - 1 {
            let x = field.pow(&field.generator(), d as u128);
            let k = x.key(field.p());
            dlog_of_key[k as usize] = d as u32;
            key_of_dlog[d as usize] = k as u32;
        }

        let (mul_tab, add_tab) = if h >= 2 {
            if big_q > 1024 {
                return Err(Error::CapExceeded(format!(
                    "coefficient field of size {big_q} too large for h = {h}"
                )));
            }
            let n = big_q as usize;
            let mut mul_tab = vec![0u32; n * n];
            let mut add_tab = vec![0u32; n * n];
            for a in 0..n {
                let xa = field.from_key(a as u64);
                for b in 0..n {
                    let xb = field.from_key(b as u64);
                    mul_tab[a * n + b] = field.mul(&xa, &xb).key(field.p()) as u32;
                    add_tab[a * n + b] = field.add(&xa, &xb).key(field.p()) as u32;
                }
            }
            (mul_tab, add_tab)
        } else {
            (Vec::new(), Vec::new())
        };

        let mut frob_tab = vec![0u32; big_q as usize];
        for a in 0..big_q {
            let x = field.from_key(a);
            frob_tab[a as usize] = field.pow(&x, q as u128).key(field.p()) as u32;
        }

        Ok(UnitRing {
            field,
            q_extension: big_q,
            h,
            count,
            mul_tab,
            add_tab,
            frob_tab,
            dlog_of_key,
            key_of_dlog,
        })
    }

    /// Coefficient keys `(c_0, ..., c_(h-1))` of a unit index; `c_0 != 0`.
    pub fn coeffs(&self, mut u: u32) -> Vec<u32> {
        let q = self.q_extension as u32;
        let mut out = Vec::with_capacity(self.h);
        out.push(u % (q - 1) + 1);
        u /= q - 1;
        for _ in 1..self.h {
            out.push(u % q);
            u /= q;
        }
        out
    }

    pub fn index_of(&self, coeffs: &[u32]) -> u32 {
        let q = self.q_extension as u32;
        debug_assert!(coeffs[0] != 0);
        let mut idx = 0u32;
        for &c in coeffs[1..].iter().rev() {
            idx = idx * q + c;
        }
        idx * (q - 1) + (coeffs[0] - 1)
    }

    pub fn identity(&self) -> u32 {
        self.index_of(&{
            let mut c = vec![0u32; self.h];
            c[0] = 1;
            c
        })
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.h == 1 {
            let n = (self.q_extension - 1) as u32;
            let da = self.dlog_of_key[(a + 1) as usize];
            let db = self.dlog_of_key[(b + 1) as usize];
            return self.key_of_dlog[((da + db) % n) as usize] - 1;
        }
        let q = self.q_extension as usize;
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let mut out = vec![0u32; self.h];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                if i + j >= self.h || y == 0 {
                    continue;
                }
                let prod = self.mul_tab[x as usize * q + y as usize];
                out[i + j] = self.add_tab[out[i + j] as usize * q + prod as usize];
            }
        }
        self.index_of(&out)
    }

    /// Coefficientwise `x -> x^q`; the Frobenius of `L/K` on the truncation.
    pub fn frobenius(&self, a: u32) -> u32 {
        let c: Vec<u32> = self
            .coeffs(a)
            .iter()
            .map(|&x| self.frob_tab[x as usize])
            .collect();
        self.index_of(&c)
    }

    /// Whether the unit is congruent to 1 modulo `pi^a`.
    pub fn in_level(&self, u: u32, a: usize) -> bool {
        let c = self.coeffs(u);
        c[0] == 1 && c[1..a.min(self.h)].iter().all(|&x| x == 0)
    }
}

/// A congruence level of the filtration: the subgroup `T^a_h` with its
/// abstract structure, the inclusion into `T_h`, and the restricted
/// Frobenius.
pub struct FiltrationLevel {
    pub a: usize,
    pub group: FinAb,
    pub inclusion: AbHom,
    pub frobenius: AbHom,
    /// unit index per subgroup element index
    pub units: Vec<u32>,
    /// subgroup coordinates per unit (indexed by position in `units`)
    pub coords: Vec<Vec<i64>>,
}

impl FiltrationLevel {
    /// Subgroup coordinates of a unit known to lie in this level.
    pub fn coords_of_unit(&self, ring: &UnitRing, u: u32) -> Vec<i64> {
        let pos = self.position(ring, u);
        self.coords[pos].clone()
    }

    fn position(&self, ring: &UnitRing, u: u32) -> usize {
        // units of the level are enumerated by their tail coefficients
        let c = ring.coeffs(u);
        let q = ring.q_extension as usize;
        let mut idx = 0usize;
        for &x in c[self.a..].iter().rev() {
            idx = idx * q + x as usize;
        }
        idx
    }
}

/// The truncated torus `T_h` with all recorded structure.
pub struct TorusLevel {
    pub q: u64,
    pub n: usize,
    pub h: usize,
    pub p: u64,
    pub residue_field: Arc<FiniteField>,
    pub ring: UnitRing,
    pub structure: BlackboxStructure,
    pub frobenius: AbHom,
    filtration: Vec<FiltrationLevel>,
}

impl TorusLevel {
    pub fn unit_group(&self) -> &FinAb {
        &self.structure.group
    }

    pub fn order(&self) -> u64 {
        self.structure.group.order()
    }

    /// Coordinates of a unit in the canonical `FinAb` presentation.
    pub fn coords(&self, unit: u32) -> &[i64] {
        &self.structure.coords[unit as usize]
    }

    pub fn unit_at(&self, coords: &[i64]) -> u32 {
        self.structure.elem_of[self.structure.group.elem_index(coords) as usize]
    }

    /// The subgroup `T^a_h` for `1 <= a <= h`.
    pub fn filtration_subgroup(&self, a: usize) -> Result<&FiltrationLevel> {
        if a < 1 || a > self.h {
            return Err(Error::Invalid(format!(
                "filtration level {a} out of range 1..={}",
                self.h
            )));
        }
        Ok(&self.filtration[a - 1])
    }

    /// The split exact sequence `1 -> T^1_h -> T_h -> T_1 -> 1`: returns the
    /// kernel, the quotient `F_(q^n)^x`, the Teichmueller splitting into
    /// `T_h` (constant representatives), and the quotient map.
    pub fn split_ses(&self) -> (FinAb, FinAb, AbHom, AbHom) {
        let kernel = self.filtration[0].group.clone();
        let big_q = self.ring.q_extension;
        let quotient = FinAb::cyclic(big_q - 1);

        // splitting: the field generator, as a constant unit of the ring
        let split_cols = if big_q > 2 {
            let mut c = vec![0u32; self.h];
            c[0] = self.ring.key_of_dlog[1];
            let gen_unit = self.ring.index_of(&c);
            vec![self.coords(gen_unit).to_vec()]
        } else {
            vec![]
        };
        let splitting = AbHom::new(quotient.clone(), self.unit_group().clone(), split_cols)
            .expect("Teichmueller section is a homomorphism");

        // quotient map: unit -> dlog of its constant term
        let cols = (0..self.unit_group().rank())
            .map(|j| {
                let mut e = self.unit_group().zero_elem();
                e[j] = 1;
                let u = self.unit_at(&e);
                let c0 = self.ring.coeffs(u)[0];
                let d = self.ring.dlog_of_key[c0 as usize] as i64;
                if big_q > 2 {
                    vec![d]
                } else {
                    vec![]
                }
            })
            .collect();
        let quotient_map = AbHom::new(self.unit_group().clone(), quotient.clone(), cols)
            .expect("reduction to the residue field is a homomorphism");

        (kernel, quotient, splitting, quotient_map)
    }

    /// Frobenius on `T_1` under the identification with `F_(q^n)^x`
    /// (multiplication by `q` on discrete logs).
    pub fn t1_frobenius(&self) -> AbHom {
        let big_q = self.ring.q_extension;
        let t1 = FinAb::cyclic(big_q - 1);
        let cols = if big_q > 2 {
            vec![vec![(self.q % (big_q - 1)) as i64]]
        } else {
            vec![]
        };
        AbHom::new(t1.clone(), t1, cols).unwrap()
    }
}

/// JSON descriptor emitted by `torus build`.
#[derive(Serialize, Deserialize)]
pub struct TorusDescriptor {
    pub q: u64,
    pub n: usize,
    pub h: usize,
    pub order: u64,
    pub invariant_factors: Vec<u64>,
    pub frobenius: Vec<Vec<i64>>,
    pub filtration_orders: Vec<u64>,
}

impl TorusLevel {
    pub fn descriptor(&self) -> TorusDescriptor {
        TorusDescriptor {
            q: self.q,
            n: self.n,
            h: self.h,
            order: self.order(),
            invariant_factors: self.unit_group().invariant_factors.clone(),
            frobenius: self.frobenius.cols.clone(),
            filtration_orders: (1..=self.h)
                .map(|a| self.filtration[a - 1].group.order())
                .collect(),
        }
    }
}

/// Builds `T_h` for the degree-`n` unramified extension over the field with
/// `q` elements.
pub fn build_torus(q: u64, n: usize, h: usize) -> Result<TorusLevel> {
    let (p, e) = prime_power(q).ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
    if n == 0 || h == 0 {
        return Err(Error::Invalid("need n >= 1 and h >= 1".into()));
    }
    let residue_field = FiniteField::new(p, (e as usize) * n, None)?;
    let ring = UnitRing::build(residue_field.clone(), q, h)?;

    let structure = blackbox_structure(ring.count as usize, ring.identity(), |a, b| {
        ring.mul(a, b)
    })?;

    // sanity: the structure map is a homomorphism on a random sample
    {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(q ^ (n as u64) << 8 ^ (h as u64) << 16);
        for _ in 0..64.min(ring.count) {
            let a = (rng.gen::<u64>() % ring.count) as u32;
            let b = (rng.gen::<u64>() % ring.count) as u32;
            let lhs = structure.coords[ring.mul(a, b) as usize].clone();
            let rhs = structure
                .group
                .add(&structure.coords[a as usize], &structure.coords[b as usize]);
            assert_eq!(lhs, rhs, "structure map failed on a product");
        }
    }

    let group = structure.group.clone();
    let frob_cols: Vec<Vec<i64>> = (0..group.rank())
        .map(|j| {
            let mut e = group.zero_elem();
            e[j] = 1;
            let u = structure.elem_of[group.elem_index(&e) as usize];
            structure.coords[ring.frobenius(u) as usize].clone()
        })
        .collect();
    let frobenius = AbHom::new(group.clone(), group.clone(), frob_cols)?;
    if !frobenius.pow(n).is_identity() {
        return Err(Error::Invalid("frobenius^n is not the identity".into()));
    }

    // filtration levels T^a_h for a = 1..h
    let big_q = ring.q_extension;
    let mut filtration = Vec::with_capacity(h);
    for a in 1..=h {
        let sub_count = big_q.pow((h - a) as u32);
        // subgroup elements enumerated by their tail coefficients
        let unit_of_sub = |s: u32| -> u32 {
            let q32 = big_q as u32;
            let mut c = vec![0u32; h];
            c[0] = 1;
            let mut rest = s;
            for item in c.iter_mut().skip(a) {
                *item = rest % q32;
                rest /= q32;
            }
            ring.index_of(&c)
        };
        let sub_of_unit = |u: u32| -> u32 {
            let c = ring.coeffs(u);
            let mut idx = 0u32;
            for &x in c[a..].iter().rev() {
                idx = idx * big_q as u32 + x;
            }
            idx
        };
        let sub_structure = blackbox_structure(sub_count as usize, 0, |x, y| {
            sub_of_unit(ring.mul(unit_of_sub(x), unit_of_sub(y)))
        })?;
        let sub_group = sub_structure.group.clone();
        let incl_cols: Vec<Vec<i64>> = (0..sub_group.rank())
            .map(|j| {
                let mut e = sub_group.zero_elem();
                e[j] = 1;
                let s = sub_structure.elem_of[sub_group.elem_index(&e) as usize];
                structure.coords[unit_of_sub(s) as usize].clone()
            })
            .collect();
        let inclusion = AbHom::new(sub_group.clone(), group.clone(), incl_cols)?;
        let sub_frob_cols: Vec<Vec<i64>> = (0..sub_group.rank())
            .map(|j| {
                let mut e = sub_group.zero_elem();
                e[j] = 1;
                let s = sub_structure.elem_of[sub_group.elem_index(&e) as usize];
                let f = ring.frobenius(unit_of_sub(s));
                sub_structure.coords[sub_of_unit(f) as usize].clone()
            })
            .collect();
        let sub_frobenius = AbHom::new(sub_group.clone(), sub_group.clone(), sub_frob_cols)?;

        let units: Vec<u32> = (0..sub_count as u32).map(unit_of_sub).collect();
        let coords: Vec<Vec<i64>> = (0..sub_count as usize)
            .map(|s| sub_structure.coords[s].clone())
            .collect();
        filtration.push(FiltrationLevel {
            a,
            group: sub_group,
            inclusion,
            frobenius: sub_frobenius,
            units,
            coords,
        });
    }

    Ok(TorusLevel {
        q,
        n,
        h,
        p,
        residue_field,
        ring,
        structure,
        frobenius,
        filtration,
    })
}

/// A smooth character of `T = L^x`: its restriction to the integral units
/// factored through a finite level, and the value at a fixed uniformizer
/// recorded as `(valuation, torsion unit part)`.
#[derive(Clone, PartialEq, Eq)]
pub struct TorusChar {
    pub coeff: Coeff,
    pub level_h: usize,
    pub level_part: AbChar,
    pub unif_val: Rat,
    pub unif_unit: RootOfUnity,
}

impl std::fmt::Debug for TorusChar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "TorusChar[{} h={} {:?} pi->({},{})]",
            self.coeff, self.level_h, self.level_part.values, self.unif_val, self.unif_unit
        )
    }
}

impl TorusChar {
    pub fn new(
        coeff: Coeff,
        level_h: usize,
        level_part: AbChar,
        unif_val: Rat,
        unif_unit: RootOfUnity,
    ) -> Result<TorusChar> {
        if let Coeff::ModEll(ell) = coeff {
            use num::Zero;
            if !unif_val.is_zero() {
                return Err(Error::NotIntegral(unif_val.to_string()));
            }
            if unif_unit.order() % ell == 0 {
                return Err(Error::Invalid(format!(
                    "mod-{ell} character with uniformizer unit of order {}",
                    unif_unit.order()
                )));
            }
            for v in &level_part.values {
                if v.order() % ell == 0 {
                    return Err(Error::Invalid(format!(
                        "mod-{ell} character with value of order {}",
                        v.order()
                    )));
                }
            }
        }
        Ok(TorusChar {
            coeff,
            level_h,
            level_part,
            unif_val,
            unif_unit,
        })
    }

    /// Whether the character admits an integral structure, i.e. the
    /// uniformizer lands in the unit ball.
    pub fn is_integral(&self) -> bool {
        use num::Zero;
        self.unif_val.is_zero()
    }

    /// The value at the fixed uniformizer (torsion part).
    pub fn unif_value(&self) -> RootOfUnity {
        self.unif_unit
    }

    /// Precomposition with Frobenius: acts on the level part only (the
    /// Galois action is trivial on the uniformizer direction).
    pub fn precompose_frobenius(&self, torus: &TorusLevel) -> TorusChar {
        TorusChar {
            coeff: self.coeff,
            level_h: self.level_h,
            level_part: self.level_part.pullback(&torus.frobenius),
            unif_val: self.unif_val.clone(),
            unif_unit: self.unif_unit,
        }
    }
}

/// Serialized form of a [`TorusChar`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusCharJson {
    pub coeff: Coeff,
    pub level: usize,
    pub values: Vec<RootOfUnity>,
    pub valuation: String,
    pub unit: RootOfUnity,
}

impl TorusChar {
    pub fn to_json(&self) -> TorusCharJson {
        TorusCharJson {
            coeff: self.coeff,
            level: self.level_h,
            values: self.level_part.values.clone(),
            valuation: self.unif_val.to_string(),
            unit: self.unif_unit,
        }
    }

    pub fn from_json(j: &TorusCharJson, torus: &TorusLevel) -> Result<TorusChar> {
        if j.level != torus.h {
            return Err(Error::Invalid(format!(
                "character level {} does not match torus level {}",
                j.level, torus.h
            )));
        }
        let level_part = AbChar::new(torus.unit_group().clone(), j.values.clone())?;
        TorusChar::new(
            j.coeff,
            j.level,
            level_part,
            crate::cyclo::parse_rat(&j.valuation)?,
            j.unit,
        )
    }
}
