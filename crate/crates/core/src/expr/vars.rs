use std::fmt;
use std::sync::Arc;

use super::ExprError;

/// An ordered list of variable names shared by every expression of one
/// computation. The order fixes the graded-lex monomial order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vars(Arc<[String]>);

impl Vars {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ExprError> {
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if !is_identifier(n) {
                return Err(ExprError::InvalidVariable(n.to_string()));
            }
            if out.iter().any(|m| m == n) {
                return Err(ExprError::DuplicateVariable(n.to_string()));
            }
            out.push(n.to_string());
        }
        Ok(Vars(out.into()))
    }

    /// The standard chart `x, y, z`.
    pub fn xyz() -> Self {
        Vars::new(&["x", "y", "z"]).expect("valid names")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

impl fmt::Debug for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
