use std::fmt;

use crate::syntax::alpha::{alpha_eq_blocks, free_vars};
use crate::syntax::ast::*;
use crate::syntax::print::print_formula;

/// `(forall-st univ) (exists-st exist) matrix` with an internal matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub univ: Vec<(String, Type)>,
    pub exist: Vec<(String, Type)>,
    pub matrix: Formula,
}

impl NormalForm {
    pub fn internal(matrix: Formula) -> NormalForm {
        NormalForm {
            univ: vec![],
            exist: vec![],
            matrix,
        }
    }

    /// Reads a formula as a normal form, if it has that shape.
    pub fn from_formula(f: &Formula) -> Option<NormalForm> {
        let mut univ = Vec::new();
        let mut exist = Vec::new();
        let mut cur = f;
        while let Formula::ForallSt(x, t, b) = cur {
            univ.push((x.clone(), t.clone()));
            cur = b;
        }
        while let Formula::ExistsSt(x, t, b) = cur {
            exist.push((x.clone(), t.clone()));
            cur = b;
        }
        if !cur.is_internal() {
            return None;
        }
        Some(NormalForm {
            univ,
            exist,
            matrix: cur.clone(),
        })
    }

    pub fn to_formula(&self) -> Formula {
        let mut prefix: Vec<(Quant, String, Type)> = Vec::new();
        for (x, t) in &self.univ {
            prefix.push((Quant::ForallSt, x.clone(), t.clone()));
        }
        for (x, t) in &self.exist {
            prefix.push((Quant::ExistsSt, x.clone(), t.clone()));
        }
        Formula::with_prefix(&prefix, self.matrix.clone())
    }

    /// Binders distinct, matrix internal, matrix free variables covered.
    pub fn check(&self, sig: &Signature) -> Result<(), String> {
        if !self.matrix.is_internal() {
            return Err("matrix is not internal".into());
        }
        let mut seen = std::collections::HashSet::new();
        for (x, _) in self.univ.iter().chain(&self.exist) {
            if !seen.insert(x) {
                return Err(format!("binder `{x}` repeated in the blocks"));
            }
        }
        for v in free_vars(&self.matrix) {
            if !seen.contains(&v) && sig.var(&v).is_none() {
                return Err(format!("matrix variable `{v}` is not bound"));
            }
        }
        Ok(())
    }

    /// Alpha-equality up to permutation inside each block.
    pub fn equiv(&self, other: &NormalForm) -> bool {
        alpha_eq_blocks(&self.to_formula(), &other.to_formula())
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_formula(&self.to_formula()))
    }
}
