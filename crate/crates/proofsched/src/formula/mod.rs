//! MLL formulas with action modalities: negation-normal syntax, duality,
//! substitution and dual-unification.

mod parse;

pub use parse::{parse_formula, FormulaParseError};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// A formula in negation normal form: duals occur only on (meta)variables.
///
/// `MetaVar` is a search-time placeholder open for instantiation; a
/// finished proof's conclusions never contain one. `DualMetaVar` is its
/// marked dual, so that negation stays a structural involution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(String),
    DualVar(String),
    Tensor(Box<Formula>, Box<Formula>),
    Par(Box<Formula>, Box<Formula>),
    ModPos(String, Box<Formula>),
    ModNeg(String, Box<Formula>),
    MetaVar(String),
    DualMetaVar(String),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    pub fn dual_var(name: impl Into<String>) -> Formula {
        Formula::DualVar(name.into())
    }

    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(Box::new(a), Box::new(b))
    }

    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(Box::new(a), Box::new(b))
    }

    pub fn mod_pos(channel: impl Into<String>, a: Formula) -> Formula {
        Formula::ModPos(channel.into(), Box::new(a))
    }

    pub fn mod_neg(channel: impl Into<String>, a: Formula) -> Formula {
        Formula::ModNeg(channel.into(), Box::new(a))
    }

    pub fn meta(name: impl Into<String>) -> Formula {
        Formula::MetaVar(name.into())
    }

    /// Number of connectives and atoms.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) | Formula::DualVar(_) | Formula::MetaVar(_)
            | Formula::DualMetaVar(_) => 1,
            Formula::Tensor(a, b) | Formula::Par(a, b) => 1 + a.size() + b.size(),
            Formula::ModPos(_, a) | Formula::ModNeg(_, a) => 1 + a.size(),
        }
    }

    /// True when no metavariable occurs.
    pub fn is_ground(&self) -> bool {
        match self {
            Formula::MetaVar(_) | Formula::DualMetaVar(_) => false,
            Formula::Var(_) | Formula::DualVar(_) => true,
            Formula::Tensor(a, b) | Formula::Par(a, b) => a.is_ground() && b.is_ground(),
            Formula::ModPos(_, a) | Formula::ModNeg(_, a) => a.is_ground(),
        }
    }

    /// True when no modality occurs.
    pub fn is_modality_free(&self) -> bool {
        match self {
            Formula::ModPos(..) | Formula::ModNeg(..) => false,
            Formula::Var(_) | Formula::DualVar(_) | Formula::MetaVar(_)
            | Formula::DualMetaVar(_) => true,
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                a.is_modality_free() && b.is_modality_free()
            }
        }
    }

    /// Occurrences of each plain variable name, split by polarity
    /// (positive occurrences, dual occurrences).
    pub fn var_occurrences(&self) -> BTreeMap<String, (usize, usize)> {
        let mut out = BTreeMap::new();
        self.count_vars(&mut out);
        out
    }

    fn count_vars(&self, out: &mut BTreeMap<String, (usize, usize)>) {
        match self {
            Formula::Var(x) => out.entry(x.clone()).or_insert((0, 0)).0 += 1,
            Formula::DualVar(x) => out.entry(x.clone()).or_insert((0, 0)).1 += 1,
            Formula::MetaVar(_) | Formula::DualMetaVar(_) => {}
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                a.count_vars(out);
                b.count_vars(out);
            }
            Formula::ModPos(_, a) | Formula::ModNeg(_, a) => a.count_vars(out),
        }
    }

    /// Metavariable names occurring (under either polarity).
    pub fn metavars(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_metavars(&mut out);
        out
    }

    fn collect_metavars(&self, out: &mut std::collections::BTreeSet<String>) {
        match self {
            Formula::MetaVar(x) | Formula::DualMetaVar(x) => {
                out.insert(x.clone());
            }
            Formula::Var(_) | Formula::DualVar(_) => {}
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                a.collect_metavars(out);
                b.collect_metavars(out);
            }
            Formula::ModPos(_, a) | Formula::ModNeg(_, a) => a.collect_metavars(out),
        }
    }

    fn contains_meta(&self, name: &str) -> bool {
        match self {
            Formula::MetaVar(x) | Formula::DualMetaVar(x) => x == name,
            Formula::Var(_) | Formula::DualVar(_) => false,
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                a.contains_meta(name) || b.contains_meta(name)
            }
            Formula::ModPos(_, a) | Formula::ModNeg(_, a) => a.contains_meta(name),
        }
    }

    fn contains_name(&self, name: &str) -> bool {
        match self {
            Formula::MetaVar(x)
            | Formula::DualMetaVar(x)
            | Formula::Var(x)
            | Formula::DualVar(x) => x == name,
            Formula::Tensor(a, b) | Formula::Par(a, b) => {
                a.contains_name(name) || b.contains_name(name)
            }
            Formula::ModPos(_, a) | Formula::ModNeg(_, a) => a.contains_name(name),
        }
    }

    /// Replaces each plain variable named in `open` by a metavariable of
    /// the same name (its dual by the marked dual).
    pub fn open_vars(&self, open: &std::collections::BTreeSet<String>) -> Formula {
        match self {
            Formula::Var(x) if open.contains(x) => Formula::MetaVar(x.clone()),
            Formula::DualVar(x) if open.contains(x) => Formula::DualMetaVar(x.clone()),
            Formula::Var(_) | Formula::DualVar(_) | Formula::MetaVar(_)
            | Formula::DualMetaVar(_) => self.clone(),
            Formula::Tensor(a, b) => Formula::tensor(a.open_vars(open), b.open_vars(open)),
            Formula::Par(a, b) => Formula::par(a.open_vars(open), b.open_vars(open)),
            Formula::ModPos(c, a) => Formula::mod_pos(c.clone(), a.open_vars(open)),
            Formula::ModNeg(c, a) => Formula::mod_neg(c.clone(), a.open_vars(open)),
        }
    }
}

/// De Morgan dual in negation normal form; a structural involution.
pub fn negate(a: &Formula) -> Formula {
    match a {
        Formula::Var(x) => Formula::DualVar(x.clone()),
        Formula::DualVar(x) => Formula::Var(x.clone()),
        Formula::MetaVar(x) => Formula::DualMetaVar(x.clone()),
        Formula::DualMetaVar(x) => Formula::MetaVar(x.clone()),
        Formula::Tensor(l, r) => Formula::par(negate(l), negate(r)),
        Formula::Par(l, r) => Formula::tensor(negate(l), negate(r)),
        Formula::ModPos(c, b) => Formula::mod_neg(c.clone(), negate(b)),
        Formula::ModNeg(c, b) => Formula::mod_pos(c.clone(), negate(b)),
    }
}

/// Linear implication: `A -o B` is `A^ @ B`.
pub fn lollipop(a: &Formula, b: &Formula) -> Formula {
    Formula::par(negate(a), b.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("cannot unify `{0}` with `{1}`")]
    Clash(Formula, Formula),
    #[error("occurs check: `{0}` would contain itself")]
    Occurs(String),
}

/// An idempotent finite map from variable names to formulas. The same
/// name space covers plain variables and metavariables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Substitution {
    map: BTreeMap<String, Formula>,
}

impl Substitution {
    pub fn empty() -> Substitution {
        Substitution::default()
    }

    /// A simultaneous substitution from an explicit map, applied in one
    /// pass by `substitute`. Unlike `bind`, no occurs or idempotency
    /// bookkeeping: domain names occurring in values are taken to refer
    /// to the target-side namespace.
    pub fn from_map(map: BTreeMap<String, Formula>) -> Substitution {
        Substitution { map }
    }

    pub fn get(&self, name: &str) -> Option<&Formula> {
        self.map.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Formula)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    /// Binds `name` to `value`, keeping the map idempotent: the new
    /// binding is resolved against the map and folded into existing
    /// entries. Fails the occurs check if the resolved value mentions
    /// `name`.
    pub fn bind(&mut self, name: &str, value: &Formula) -> Result<(), UnifyError> {
        let resolved = substitute(value, self);
        if resolved.contains_name(name) {
            // binding a variable to exactly itself is a no-op, anything
            // else containing it is cyclic
            if resolved == Formula::Var(name.to_string())
                || resolved == Formula::MetaVar(name.to_string())
            {
                return Ok(());
            }
            return Err(UnifyError::Occurs(name.to_string()));
        }
        let mut single = Substitution::empty();
        single.map.insert(name.to_string(), resolved.clone());
        for v in self.map.values_mut() {
            *v = substitute(v, &single);
        }
        self.map.insert(name.to_string(), resolved);
        Ok(())
    }

    /// Composition: apply `self` first, then `after`.
    pub fn then(&self, after: &Substitution) -> Substitution {
        let mut out = Substitution::empty();
        for (k, v) in &self.map {
            out.map.insert(k.clone(), substitute(v, after));
        }
        for (k, v) in &after.map {
            out.map.entry(k.clone()).or_insert_with(|| v.clone());
        }
        out
    }
}

/// Capture-free replacement of bound names by their images; dual
/// occurrences receive the negated image.
pub fn substitute(a: &Formula, sigma: &Substitution) -> Formula {
    match a {
        Formula::Var(x) | Formula::MetaVar(x) => match sigma.get(x) {
            Some(f) => f.clone(),
            None => a.clone(),
        },
        Formula::DualVar(x) | Formula::DualMetaVar(x) => match sigma.get(x) {
            Some(f) => negate(f),
            None => a.clone(),
        },
        Formula::Tensor(l, r) => Formula::tensor(substitute(l, sigma), substitute(r, sigma)),
        Formula::Par(l, r) => Formula::par(substitute(l, sigma), substitute(r, sigma)),
        Formula::ModPos(c, b) => Formula::mod_pos(c.clone(), substitute(b, sigma)),
        Formula::ModNeg(c, b) => Formula::mod_neg(c.clone(), substitute(b, sigma)),
    }
}

/// Most general substitution extending `sigma0` making `A` the dual of
/// `B`. Only metavariables are flexible; plain variables are rigid.
pub fn unify_dual(
    a: &Formula,
    b: &Formula,
    sigma0: &Substitution,
) -> Result<Substitution, UnifyError> {
    let mut sigma = sigma0.clone();
    unify(&substitute(a, &sigma), &negate(&substitute(b, &sigma)), &mut sigma)?;
    Ok(sigma)
}

/// Most general substitution extending `sigma0` making `A` equal to `B`.
pub fn unify_equal(
    a: &Formula,
    b: &Formula,
    sigma0: &Substitution,
) -> Result<Substitution, UnifyError> {
    let mut sigma = sigma0.clone();
    unify(&substitute(a, &sigma), &negate(&negate(&substitute(b, &sigma))), &mut sigma)?;
    Ok(sigma)
}

fn unify(a: &Formula, b: &Formula, sigma: &mut Substitution) -> Result<(), UnifyError> {
    let a = substitute(a, sigma);
    let b = substitute(b, sigma);
    match (&a, &b) {
        (Formula::MetaVar(x), Formula::MetaVar(y)) if x == y => Ok(()),
        (Formula::DualMetaVar(x), Formula::DualMetaVar(y)) if x == y => Ok(()),
        (Formula::MetaVar(x), Formula::DualMetaVar(y))
        | (Formula::DualMetaVar(x), Formula::MetaVar(y))
            if x == y =>
        {
            Err(UnifyError::Occurs(x.clone()))
        }
        (Formula::MetaVar(x), _) => bind_meta(x, &b, sigma),
        (_, Formula::MetaVar(y)) => bind_meta(y, &a, sigma),
        (Formula::DualMetaVar(x), _) => bind_meta(x, &negate(&b), sigma),
        (_, Formula::DualMetaVar(y)) => bind_meta(y, &negate(&a), sigma),
        (Formula::Var(x), Formula::Var(y)) if x == y => Ok(()),
        (Formula::DualVar(x), Formula::DualVar(y)) if x == y => Ok(()),
        (Formula::Tensor(l1, r1), Formula::Tensor(l2, r2))
        | (Formula::Par(l1, r1), Formula::Par(l2, r2)) => {
            unify(l1, l2, sigma)?;
            unify(r1, r2, sigma)
        }
        (Formula::ModPos(c1, b1), Formula::ModPos(c2, b2))
        | (Formula::ModNeg(c1, b1), Formula::ModNeg(c2, b2))
            if c1 == c2 =>
        {
            unify(b1, b2, sigma)
        }
        _ => Err(UnifyError::Clash(a.clone(), b.clone())),
    }
}

fn bind_meta(name: &str, value: &Formula, sigma: &mut Substitution) -> Result<(), UnifyError> {
    if value.contains_meta(name) {
        return Err(UnifyError::Occurs(name.to_string()));
    }
    sigma.bind(name, value)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, 1, f)
    }
}

// precedence: 1 par, 2 tensor, 3 modality, 4 atoms/parens
fn write_prec(a: &Formula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let prec = match a {
        Formula::Par(..) => 1,
        Formula::Tensor(..) => 2,
        Formula::ModPos(..) | Formula::ModNeg(..) => 3,
        _ => 4,
    };
    if prec < min {
        write!(f, "(")?;
    }
    match a {
        Formula::Var(x) | Formula::MetaVar(x) => write!(f, "{x}")?,
        Formula::DualVar(x) | Formula::DualMetaVar(x) => write!(f, "{x}^")?,
        Formula::Par(l, r) => {
            write_prec(l, 1, f)?;
            write!(f, " @ ")?;
            write_prec(r, 2, f)?;
        }
        Formula::Tensor(l, r) => {
            write_prec(l, 2, f)?;
            write!(f, " * ")?;
            write_prec(r, 3, f)?;
        }
        Formula::ModPos(c, b) => {
            write!(f, "<{c}>+ ")?;
            write_prec(b, 3, f)?;
        }
        Formula::ModNeg(c, b) => {
            write!(f, "<{c}>- ")?;
            write_prec(b, 3, f)?;
        }
    }
    if prec < min {
        write!(f, ")")?;
    }
    Ok(())
}
