use std::collections::BTreeMap;
use std::fmt;

use crate::name::Name;
use crate::syntax::{EnvDecl, Type};

/// A finite map from names to types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeEnv {
    bindings: BTreeMap<Name, Type>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is already bound in the environment")]
pub struct DuplicateBinding(pub String);

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    /// Builds an environment from `(name, type)` pairs. Names are resolved as
    /// free names.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<TypeEnv, DuplicateBinding>
    where
        I: IntoIterator<Item = (&'a str, Type)>,
    {
        let mut env = TypeEnv::new();
        for (n, t) in pairs {
            env.insert(Name::global(n), t)?;
        }
        Ok(env)
    }

    /// All declarations of an environment file, ignoring the functional
    /// marker.
    pub fn from_decls(decls: &[EnvDecl]) -> Result<TypeEnv, DuplicateBinding> {
        TypeEnv::from_pairs(decls.iter().map(|d| (d.name.as_str(), d.ty.clone())))
    }

    pub fn insert(&mut self, name: Name, ty: Type) -> Result<(), DuplicateBinding> {
        if self.bindings.contains_key(&name) {
            return Err(DuplicateBinding(name.display().to_string()));
        }
        self.bindings.insert(name, ty);
        Ok(())
    }

    /// Replaces the binding of `name`, if any.
    pub fn set(&mut self, name: Name, ty: Type) {
        self.bindings.insert(name, ty);
    }

    pub fn remove(&mut self, name: &Name) -> Option<Type> {
        self.bindings.remove(name)
    }

    pub fn get(&self, name: &Name) -> Option<&Type> {
        self.bindings.get(name)
    }

    pub fn lookup(&self, spelling: &str) -> Option<&Type> {
        self.get(&Name::global(spelling))
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.bindings.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.bindings.iter()
    }

    /// Bindings sorted by spelling, for stable output.
    pub fn sorted(&self) -> Vec<(&Name, &Type)> {
        let mut v: Vec<_> = self.bindings.iter().collect();
        v.sort_by(|a, b| a.0.display().cmp(b.0.display()).then(a.0.cmp(b.0)));
        v
    }
}

impl fmt::Display for TypeEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in self.sorted() {
            writeln!(f, "{n} : {t}")?;
        }
        Ok(())
    }
}

/// An environment extended by the binders met while descending into a
/// process.
pub(crate) struct Scope<'a> {
    base: &'a TypeEnv,
    local: Vec<(Name, Type)>,
}

impl<'a> Scope<'a> {
    pub(crate) fn new(base: &'a TypeEnv) -> Scope<'a> {
        Scope {
            base,
            local: Vec::new(),
        }
    }

    pub(crate) fn get(&self, n: &Name) -> Option<&Type> {
        self.local
            .iter()
            .rev()
            .find(|(m, _)| m == n)
            .map(|(_, t)| t)
            .or_else(|| self.base.get(n))
    }

    pub(crate) fn push(&mut self, n: Name, t: Type) {
        self.local.push((n, t));
    }

    pub(crate) fn mark(&self) -> usize {
        self.local.len()
    }

    pub(crate) fn reset(&mut self, mark: usize) {
        self.local.truncate(mark);
    }
}
