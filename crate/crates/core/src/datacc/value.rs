//! Immutable, structurally shared values of `.data` types with cached
//! content hashes.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt::Write;
use std::sync::{Arc, OnceLock};

use sha2::{Digest, Sha256};

use super::schema::*;
use super::DataError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub type_path: Vec<String>,
    pub type_args: Vec<TypeExpr>,
    pub fields: Vec<(String, DataValue)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueKind {
    Int(i64),
    Str(String),
    Bool(bool),
    Seq(Vec<DataValue>),
    Opt(Option<DataValue>),
    Record(Record),
}

#[derive(Debug)]
struct Inner {
    kind: ValueKind,
    digest: OnceLock<[u8; 32]>,
}

/// A cheaply clonable value. Cloning shares the underlying node; equality is
/// structural.
#[derive(Clone, Debug)]
pub struct DataValue(Arc<Inner>);

impl PartialEq for DataValue {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}

impl Eq for DataValue {}

thread_local! {
    static HASH_COMPUTATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Number of node digests computed (not served from cache) on this thread.
pub fn hash_computations() -> u64 {
    HASH_COMPUTATIONS.with(|c| c.get())
}

impl DataValue {
    pub fn new(kind: ValueKind) -> DataValue {
        DataValue(Arc::new(Inner { kind, digest: OnceLock::new() }))
    }

    pub fn int(i: i64) -> DataValue {
        Self::new(ValueKind::Int(i))
    }

    pub fn str(s: impl Into<String>) -> DataValue {
        Self::new(ValueKind::Str(s.into()))
    }

    pub fn bool(b: bool) -> DataValue {
        Self::new(ValueKind::Bool(b))
    }

    pub fn seq(items: Vec<DataValue>) -> DataValue {
        Self::new(ValueKind::Seq(items))
    }

    pub fn opt(v: Option<DataValue>) -> DataValue {
        Self::new(ValueKind::Opt(v))
    }

    /// Builds a record without checking it against a schema.
    pub fn record(path: &[&str], fields: Vec<(&str, DataValue)>) -> DataValue {
        Self::new(ValueKind::Record(Record {
            type_path: path.iter().map(|s| s.to_string()).collect(),
            type_args: vec![],
            fields: fields.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
        }))
    }

    pub fn kind(&self) -> &ValueKind {
        &self.0.kind
    }

    pub fn as_record(&self) -> Option<&Record> {
        match &self.0.kind {
            ValueKind::Record(r) => Some(r),
            _ => None,
        }
    }

    pub fn field(&self, name: &str) -> Option<&DataValue> {
        self.as_record()?.fields.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn ptr_eq(&self, other: &DataValue) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// SHA-256 over the canonical serialization, with child digests standing
    /// in for child contents. Computed at most once per node.
    pub fn hash(&self) -> [u8; 32] {
        *self.0.digest.get_or_init(|| {
            HASH_COMPUTATIONS.with(|c| c.set(c.get() + 1));
            let mut h = Sha256::new();
            match &self.0.kind {
                ValueKind::Int(i) => {
                    h.update([1]);
                    h.update(i.to_be_bytes());
                }
                ValueKind::Str(s) => {
                    h.update([2]);
                    put_str(&mut h, s);
                }
                ValueKind::Bool(b) => h.update([3, *b as u8]),
                ValueKind::Seq(items) => {
                    h.update([4]);
                    h.update((items.len() as u32).to_be_bytes());
                    for it in items {
                        h.update(it.hash());
                    }
                }
                ValueKind::Opt(v) => {
                    h.update([5]);
                    match v {
                        None => h.update([0]),
                        Some(v) => {
                            h.update([1]);
                            h.update(v.hash());
                        }
                    }
                }
                ValueKind::Record(r) => {
                    h.update([6]);
                    h.update((r.type_path.len() as u32).to_be_bytes());
                    for seg in &r.type_path {
                        put_str(&mut h, seg);
                    }
                    h.update((r.type_args.len() as u32).to_be_bytes());
                    for a in &r.type_args {
                        put_str(&mut h, &a.to_string());
                    }
                    h.update((r.fields.len() as u32).to_be_bytes());
                    for (n, v) in &r.fields {
                        put_str(&mut h, n);
                        h.update(v.hash());
                    }
                }
            }
            h.finalize().into()
        })
    }

    pub fn hash_hex(&self) -> String {
        hex::encode(self.hash())
    }

    /// Readable rendering: `Color::Red`, `Pair(fst: 1, snd: 2)`.
    pub fn debug_print(&self) -> String {
        let mut out = String::new();
        self.print_into(&mut out);
        out
    }

    fn print_into(&self, out: &mut String) {
        match &self.0.kind {
            ValueKind::Int(i) => {
                let _ = write!(out, "{i}");
            }
            ValueKind::Str(s) => {
                let _ = write!(out, "{s:?}");
            }
            ValueKind::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            ValueKind::Seq(items) => {
                out.push('[');
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    it.print_into(out);
                }
                out.push(']');
            }
            ValueKind::Opt(None) => out.push_str("None"),
            ValueKind::Opt(Some(v)) => {
                out.push_str("Some(");
                v.print_into(out);
                out.push(')');
            }
            ValueKind::Record(r) => {
                out.push_str(&r.type_path.join("::"));
                if !r.type_args.is_empty() {
                    let args: Vec<String> = r.type_args.iter().map(|a| a.to_string()).collect();
                    let _ = write!(out, "[{}]", args.join(", "));
                }
                if r.fields.is_empty() && r.type_path.len() > 1 {
                    return;
                }
                out.push('(');
                for (i, (n, v)) in r.fields.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    out.push_str(n);
                    out.push_str(": ");
                    v.print_into(out);
                }
                out.push(')');
            }
        }
    }
}

fn put_str(h: &mut Sha256, s: &str) {
    h.update((s.len() as u32).to_be_bytes());
    h.update(s.as_bytes());
}

impl DatatypeSchema {
    /// Checked record constructor.
    pub fn make(
        &self,
        path: &[&str],
        type_args: Vec<TypeExpr>,
        fields: Vec<(&str, DataValue)>,
    ) -> Result<DataValue, DataError> {
        let v = DataValue::new(ValueKind::Record(Record {
            type_path: path.iter().map(|s| s.to_string()).collect(),
            type_args: type_args.clone(),
            fields: fields.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
        }));
        let expected = TypeExpr::Named { name: path.first().copied().unwrap_or("").to_string(), args: type_args };
        self.check(&v, &expected)?;
        Ok(v)
    }

    /// Checks that `v` inhabits `ty`.
    pub fn check(&self, v: &DataValue, ty: &TypeExpr) -> Result<(), DataError> {
        let mismatch = || DataError::TypeMismatch { expected: ty.to_string(), found: v.debug_print() };
        match (ty, v.kind()) {
            (TypeExpr::Integer, ValueKind::Int(_))
            | (TypeExpr::Str, ValueKind::Str(_))
            | (TypeExpr::Boolean, ValueKind::Bool(_)) => Ok(()),
            (TypeExpr::Seq(t), ValueKind::Seq(items)) => items.iter().try_for_each(|it| self.check(it, t)),
            (TypeExpr::Option(t), ValueKind::Opt(o)) => o.iter().try_for_each(|it| self.check(it, t)),
            (TypeExpr::Named { name, args }, ValueKind::Record(r)) => {
                if r.type_path.first() != Some(name) || &r.type_args != args {
                    return Err(mismatch());
                }
                let (dt, def) =
                    self.resolve_path(&r.type_path).ok_or_else(|| DataError::UnknownPath(r.type_path.join(".")))?;
                let TypeDef::Product(decl) = def else {
                    return Err(DataError::Invalid(format!("`{}` is not a leaf case", r.type_path.join("."))));
                };
                if dt.params.len() != args.len() {
                    return Err(mismatch());
                }
                let env: BTreeMap<String, TypeExpr> = dt.params.iter().cloned().zip(args.iter().cloned()).collect();
                if decl.len() != r.fields.len() {
                    return Err(mismatch());
                }
                for (f, (n, fv)) in decl.iter().zip(&r.fields) {
                    if &f.name != n {
                        return Err(DataError::NoSuchField(n.clone()));
                    }
                    self.check(fv, &f.ty.substitute(&env))?;
                }
                Ok(())
            }
            _ => Err(mismatch()),
        }
    }

    /// Returns `Some(v)` when `v` belongs to the case at `case_path` (or one
    /// of its sub-cases), `None` otherwise.
    pub fn downcast(&self, v: &DataValue, case_path: &[&str]) -> Result<Option<DataValue>, DataError> {
        let path: Vec<String> = case_path.iter().map(|s| s.to_string()).collect();
        if self.resolve_path(&path).is_none() {
            return Err(DataError::UnknownPath(path.join(".")));
        }
        let r = v.as_record().ok_or(DataError::NotARecord)?;
        Ok(r.type_path.starts_with(&path).then(|| v.clone()))
    }

    /// Returns a copy of `v` with one field replaced. Other fields are shared,
    /// so their cached digests are reused.
    pub fn substitute_field(&self, v: &DataValue, field: &str, new: DataValue) -> Result<DataValue, DataError> {
        let r = v.as_record().ok_or(DataError::NotARecord)?;
        let idx = r.fields.iter().position(|(n, _)| n == field).ok_or_else(|| DataError::NoSuchField(field.into()))?;
        let (dt, def) = self.resolve_path(&r.type_path).ok_or_else(|| DataError::UnknownPath(r.type_path.join(".")))?;
        if let TypeDef::Product(decl) = def {
            let env: BTreeMap<String, TypeExpr> = dt.params.iter().cloned().zip(r.type_args.iter().cloned()).collect();
            if let Some(f) = decl.iter().find(|f| f.name == field) {
                self.check(&new, &f.ty.substitute(&env))?;
            }
        }
        let mut fields = r.fields.clone();
        fields[idx].1 = new;
        Ok(DataValue::new(ValueKind::Record(Record {
            type_path: r.type_path.clone(),
            type_args: r.type_args.clone(),
            fields,
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_data_spec;
    use super::*;

    #[test]
    fn printing() {
        assert_eq!(DataValue::record(&["Color", "Red"], vec![]).debug_print(), "Color::Red");
        let p = DataValue::record(&["Pair"], vec![("fst", DataValue::int(1)), ("snd", DataValue::int(2))]);
        assert_eq!(p.debug_print(), "Pair(fst: 1, snd: 2)");
    }

    #[test]
    fn checked_construction() {
        let s = parse_data_spec("data Pair[T] { fst: T; snd: T; } data Color { Red; Green; }").unwrap();
        let ok = s.make(&["Pair"], vec![TypeExpr::Integer], vec![("fst", DataValue::int(1)), ("snd", DataValue::int(2))]);
        assert!(ok.is_ok());
        let bad = s.make(&["Pair"], vec![TypeExpr::Integer], vec![("fst", DataValue::int(1)), ("snd", DataValue::str("x"))]);
        assert!(bad.is_err());
        let red = s.make(&["Color", "Red"], vec![], vec![]).unwrap();
        assert!(s.downcast(&red, &["Color", "Red"]).unwrap().is_some());
        assert!(s.downcast(&red, &["Color", "Green"]).unwrap().is_none());
        assert!(s.downcast(&red, &["Color", "Blue"]).is_err());
    }

    #[test]
    fn hashing_is_structural_and_cached() {
        let a = DataValue::seq(vec![DataValue::int(1), DataValue::str("x")]);
        let b = DataValue::seq(vec![DataValue::int(1), DataValue::str("x")]);
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), DataValue::seq(vec![DataValue::str("x"), DataValue::int(1)]).hash());
        let before = hash_computations();
        a.hash();
        assert_eq!(hash_computations(), before);
    }
}
