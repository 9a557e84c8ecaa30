use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TypeExpr {
    Integer,
    Str,
    Boolean,
    Seq(Box<TypeExpr>),
    Option(Box<TypeExpr>),
    Named { name: String, args: Vec<TypeExpr> },
    Param(String),
}

impl TypeExpr {
    pub fn named(name: &str) -> TypeExpr {
        TypeExpr::Named { name: name.to_string(), args: vec![] }
    }

    pub fn seq(t: TypeExpr) -> TypeExpr {
        TypeExpr::Seq(Box::new(t))
    }

    pub fn option(t: TypeExpr) -> TypeExpr {
        TypeExpr::Option(Box::new(t))
    }

    /// Replaces type parameters using `env`.
    pub fn substitute(&self, env: &BTreeMap<String, TypeExpr>) -> TypeExpr {
        match self {
            TypeExpr::Param(p) => env.get(p).cloned().unwrap_or_else(|| self.clone()),
            TypeExpr::Seq(t) => TypeExpr::seq(t.substitute(env)),
            TypeExpr::Option(t) => TypeExpr::option(t.substitute(env)),
            TypeExpr::Named { name, args } => TypeExpr::Named {
                name: name.clone(),
                args: args.iter().map(|a| a.substitute(env)).collect(),
            },
            TypeExpr::Integer | TypeExpr::Str | TypeExpr::Boolean => self.clone(),
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Integer => f.write_str("integer"),
            TypeExpr::Str => f.write_str("string"),
            TypeExpr::Boolean => f.write_str("boolean"),
            TypeExpr::Seq(t) => write!(f, "seq[{t}]"),
            TypeExpr::Option(t) => write!(f, "option[{t}]"),
            TypeExpr::Param(p) => f.write_str(p),
            TypeExpr::Named { name, args } if args.is_empty() => f.write_str(name),
            TypeExpr::Named { name, args } => {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{name}[{}]", args.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    pub name: String,
    pub ty: TypeExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    pub def: TypeDef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeDef {
    Product(Vec<Field>),
    Sum(Vec<Case>),
    /// A sum whose cases are all empty products.
    Enum(Vec<String>),
}

impl TypeDef {
    /// Collapses sums of empty products into enums, recursively.
    pub fn normalize(self) -> TypeDef {
        match self {
            TypeDef::Sum(cases) => {
                let cases: Vec<Case> =
                    cases.into_iter().map(|c| Case { name: c.name, def: c.def.normalize() }).collect();
                if !cases.is_empty() && cases.iter().all(|c| matches!(&c.def, TypeDef::Product(f) if f.is_empty())) {
                    TypeDef::Enum(cases.into_iter().map(|c| c.name).collect())
                } else {
                    TypeDef::Sum(cases)
                }
            }
            other => other,
        }
    }

    pub fn case(&self, name: &str) -> Option<TypeDef> {
        match self {
            TypeDef::Sum(cases) => cases.iter().find(|c| c.name == name).map(|c| c.def.clone()),
            TypeDef::Enum(names) => names.iter().any(|n| n == name).then(|| TypeDef::Product(vec![])),
            TypeDef::Product(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataType {
    pub name: String,
    pub params: Vec<String>,
    pub def: TypeDef,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatatypeSchema {
    pub types: BTreeMap<String, DataType>,
}

impl DatatypeSchema {
    pub fn get(&self, name: &str) -> Option<&DataType> {
        self.types.get(name)
    }

    /// Resolves a dotted type path such as `Expr.Lit.Int_` to its definition.
    pub fn resolve_path(&self, path: &[String]) -> Option<(&DataType, TypeDef)> {
        let (root, rest) = path.split_first()?;
        let ty = self.types.get(root)?;
        let mut def = ty.def.clone();
        for seg in rest {
            def = def.case(seg)?;
        }
        Some((ty, def))
    }

    /// Canonical `.data` text; [`super::parse_data_spec`] inverts it.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, ty) in self.types.values().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str("data ");
            out.push_str(&ty.name);
            if !ty.params.is_empty() {
                out.push('[');
                out.push_str(&ty.params.join(", "));
                out.push(']');
            }
            out.push_str(" {\n");
            render_body(&ty.def, 1, &mut out);
            out.push_str("}\n");
        }
        out
    }
}

fn render_body(def: &TypeDef, depth: usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    match def {
        TypeDef::Product(fields) => {
            for f in fields {
                out.push_str(&format!("{pad}{}: {};\n", f.name, f.ty));
            }
        }
        TypeDef::Enum(names) => {
            for n in names {
                out.push_str(&format!("{pad}{n};\n"));
            }
        }
        TypeDef::Sum(cases) => {
            for c in cases {
                match &c.def {
                    TypeDef::Product(f) if f.is_empty() => out.push_str(&format!("{pad}{} {{}}\n", c.name)),
                    def => {
                        out.push_str(&format!("{pad}{} {{\n", c.name));
                        render_body(def, depth + 1, out);
                        out.push_str(&format!("{pad}}}\n"));
                    }
                }
            }
        }
    }
}
