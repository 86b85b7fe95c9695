//! Evaluation formula templates with numbered predicate slots.
//!
//! Slots are written as zero-arity atoms `at0()`, `loc1()`, `rad0()` and are
//! replaced by distinct instances of the matching predicate.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::envs::EnvKind;
use crate::error::{Error, Result};
use crate::ltl::{parse_ltl, LtlFormula, PredicateInstance, Signature};
use crate::runtime::Horizon;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormulaTemplate {
    pub id: &'static str,
    pub text: &'static str,
    pub env: EnvKind,
    pub horizon: Horizon,
}

const fn t(
    id: &'static str,
    env: EnvKind,
    horizon: Horizon,
    text: &'static str,
) -> FormulaTemplate {
    FormulaTemplate {
        id,
        text,
        env,
        horizon,
    }
}

use EnvKind::{Fallout as Fw, RgbZone as Rgb};
use Horizon::{Finite as Fin, Infinite as Inf};

pub const TEMPLATES: &[FormulaTemplate] = &[
    t("phi1", Rgb, Fin, "F (at0() & (!at1() U at2())) & F at3()"),
    t("phi2", Rgb, Fin, "F at0() & (!at0() U (at1() & F at2()))"),
    t("phi3", Rgb, Fin, "F (at0() | at1()) & F at2() & F at3()"),
    t("phi4", Rgb, Fin, "!(at0() | at1()) U (at2() & F at3())"),
    t(
        "phi5",
        Rgb,
        Fin,
        "!at0() U ((at1() | at2()) & (!at0() U at3()))",
    ),
    t(
        "phi6",
        Rgb,
        Fin,
        "((at0() | at1()) -> (!at2() U at3())) U at2()",
    ),
    t(
        "phi7",
        Fw,
        Fin,
        "F (loc0() & (!rad0() U loc1())) & F loc2()",
    ),
    t("phi8", Fw, Fin, "(!rad0() U loc0()) & (!loc0() U loc1())"),
    t("phi9", Fw, Fin, "F (loc0() | loc1()) & (!rad0() U loc2())"),
    t("phi10", Fw, Fin, "!(rad0() | loc0()) U (loc1() & F loc2())"),
    t(
        "phi11",
        Fw,
        Fin,
        "!rad0() U ((loc0() | loc1()) & (!rad0() U loc2()))",
    ),
    t(
        "phi12",
        Fw,
        Fin,
        "(rad0() -> (!loc0() U (loc1() | loc2()))) U loc0()",
    ),
    t("psi1", Rgb, Inf, "F G at0()"),
    t("psi2", Rgb, Inf, "F G at0() & F (at1() & F at2())"),
    t("psi3", Rgb, Inf, "F G at0() & G !at1()"),
    t(
        "psi4",
        Rgb,
        Inf,
        "G ((at0() | at1()) -> F at2()) & F G (at0() | at3())",
    ),
    t("psi5", Rgb, Inf, "G F at0() & G F at1()"),
    t(
        "psi6",
        Rgb,
        Inf,
        "G F at0() & G F at1() & G F at2() & G !at3()",
    ),
    t("psi7", Fw, Inf, "F G !rad0()"),
    t("psi8", Fw, Inf, "F G !rad0() & F (loc0() & F loc1())"),
    t(
        "psi9",
        Fw,
        Inf,
        "G (rad0() -> F loc0()) & F (loc1() & F loc2())",
    ),
    t("psi10", Fw, Inf, "G F loc0() & G F loc1() & G !rad0()"),
    t(
        "psi11",
        Fw,
        Inf,
        "G F loc0() & G F loc1() & F loc2() & G !rad0()",
    ),
    t("psi12", Fw, Inf, "G F loc0() & G F loc1() & G F loc2()"),
    t("ra_rgb1", Rgb, Fin, "F (at0() & F (at1() & F at2()))"),
    t("ra_rgb2", Rgb, Fin, "!at0() U (at1() & (!at2() U at3()))"),
    t("ra_fw1", Fw, Fin, "F (loc0() & F (loc1() & F loc2()))"),
    t("ra_fw2", Fw, Fin, "!rad0() U (loc0() & (!rad0() U loc1()))"),
    t(
        "ra_fw3",
        Fw,
        Fin,
        "!(rad0() | loc0()) U (loc1() & (!(rad0() | loc0()) U loc2()))",
    ),
    t(
        "ra_fw4",
        Fw,
        Fin,
        "!(rad0() | loc0()) U (loc1() & (!(rad0() | loc2()) U loc0()))",
    ),
];

pub fn template(id: &str) -> Option<&'static FormulaTemplate> {
    TEMPLATES.iter().find(|t| t.id == id)
}

fn split_slot(name: &str) -> Option<(&str, usize)> {
    let cut = name.find(|c: char| c.is_ascii_digit())?;
    let (pred, idx) = name.split_at(cut);
    Some((pred, idx.parse().ok()?))
}

impl FormulaTemplate {
    /// The template with its slots as zero-arity atoms.
    pub fn skeleton(&self) -> LtlFormula {
        parse_ltl(self.text, &Signature::permissive()).expect("templates parse")
    }

    /// Slot count per predicate name.
    pub fn slots(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for p in self.skeleton().atoms() {
            let (pred, i) = split_slot(p.name()).expect("slot names end in an index");
            let n = out.entry(pred.to_string()).or_insert(0);
            *n = (*n).max(i + 1);
        }
        out
    }

    /// Substitutes `bindings[pred][i]` for slot `pred{i}`.
    pub fn bind(&self, bindings: &BTreeMap<String, Vec<PredicateInstance>>) -> Result<LtlFormula> {
        let mut missing = None;
        let f = self.skeleton().map_atoms(&mut |p| {
            let (pred, i) = split_slot(p.name()).expect("slot names end in an index");
            match bindings.get(pred).and_then(|v| v.get(i)) {
                Some(x) => x.clone(),
                None => {
                    missing = Some(p.name().to_string());
                    p.clone()
                }
            }
        });
        match missing {
            Some(slot) => Err(Error::InvalidArgument(format!(
                "no binding for slot {slot}"
            ))),
            None => Ok(f),
        }
    }
}

/// Distinct pool instances per slot, drawn per predicate.
pub fn sample_bindings(
    template: &FormulaTemplate,
    pool: &[PredicateInstance],
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<String, Vec<PredicateInstance>>> {
    let mut out = BTreeMap::new();
    for (pred, needed) in template.slots() {
        let mut candidates: Vec<&PredicateInstance> =
            pool.iter().filter(|p| p.name() == pred).collect();
        candidates.sort();
        candidates.dedup();
        if candidates.len() < needed {
            return Err(Error::InsufficientAtoms {
                needed,
                available: candidates.len(),
            });
        }
        let chosen: Vec<PredicateInstance> = candidates
            .choose_multiple(rng, needed)
            .map(|p| (*p).clone())
            .collect();
        out.insert(pred, chosen);
    }
    Ok(out)
}

pub fn instantiate_template(
    template: &FormulaTemplate,
    pool: &[PredicateInstance],
    rng: &mut ChaCha8Rng,
) -> Result<LtlFormula> {
    template.bind(&sample_bindings(template, pool, rng)?)
}
