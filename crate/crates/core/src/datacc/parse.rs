//! Parser for `.data` schema sources.

use std::collections::{BTreeMap, BTreeSet};

use super::schema::*;
use super::DataError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Punct(char),
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize, usize)>, DataError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), line, col));
            col += i - start;
            continue;
        }
        if "{}[]:;,".contains(c) {
            out.push((Tok::Punct(c), line, col));
            i += 1;
            col += 1;
            continue;
        }
        return Err(DataError::Syntax { line, col, message: format!("unexpected character `{c}`") });
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn err(&self, message: impl Into<String>) -> DataError {
        let (_, line, col) = self.toks[self.pos];
        DataError::Syntax { line, col, message: message.into() }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn ident(&mut self) -> Result<String, DataError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.err(format!("expected identifier, found {t:?}"))),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), DataError> {
        if *self.peek() == Tok::Punct(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }
}

struct RawType {
    name: String,
    params: Vec<String>,
    body: RawBody,
    line: usize,
}

enum RawEntry {
    Field(String, RawTypeExpr),
    Case(String, RawBody),
}

type RawBody = Vec<RawEntry>;

struct RawTypeExpr {
    name: String,
    args: Vec<RawTypeExpr>,
}

fn parse_type_expr(lx: &mut Lexer) -> Result<RawTypeExpr, DataError> {
    let name = lx.ident()?;
    let mut args = Vec::new();
    if lx.eat('[') {
        loop {
            args.push(parse_type_expr(lx)?);
            if !lx.eat(',') {
                break;
            }
        }
        lx.expect(']')?;
    }
    Ok(RawTypeExpr { name, args })
}

fn parse_body(lx: &mut Lexer) -> Result<RawBody, DataError> {
    lx.expect('{')?;
    let mut entries = Vec::new();
    while !lx.eat('}') {
        let name = lx.ident()?;
        match lx.peek() {
            Tok::Punct(':') => {
                lx.bump();
                let ty = parse_type_expr(lx)?;
                lx.expect(';')?;
                entries.push(RawEntry::Field(name, ty));
            }
            Tok::Punct(';') => {
                lx.bump();
                entries.push(RawEntry::Case(name, vec![]));
            }
            Tok::Punct('{') => {
                let body = parse_body(lx)?;
                lx.eat(';');
                entries.push(RawEntry::Case(name, body));
            }
            _ => return Err(lx.err("expected `:`, `;` or `{`")),
        }
    }
    Ok(entries)
}

/// Parses and resolves a `.data` source into a schema.
pub fn parse_data_spec(src: &str) -> Result<DatatypeSchema, DataError> {
    let mut lx = Lexer { toks: tokenize(src)?, pos: 0 };
    let mut raw = Vec::new();
    while *lx.peek() != Tok::Eof {
        let line = lx.toks[lx.pos].1;
        match lx.ident()?.as_str() {
            "data" => {}
            other => return Err(lx.err(format!("expected `data`, found `{other}`"))),
        }
        let name = lx.ident()?;
        let mut params = Vec::new();
        if lx.eat('[') {
            loop {
                params.push(lx.ident()?);
                if !lx.eat(',') {
                    break;
                }
            }
            lx.expect(']')?;
        }
        let body = parse_body(&mut lx)?;
        raw.push(RawType { name, params, body, line });
    }

    let mut arity = BTreeMap::new();
    for t in &raw {
        if is_builtin(&t.name) {
            return Err(DataError::Invalid(format!("type name `{}` is reserved", t.name)));
        }
        if arity.insert(t.name.clone(), t.params.len()).is_some() {
            return Err(DataError::Invalid(format!("duplicate type `{}` (line {})", t.name, t.line)));
        }
    }
    let mut schema = DatatypeSchema::default();
    for t in raw {
        let scope: BTreeSet<String> = t.params.iter().cloned().collect();
        if scope.len() != t.params.len() {
            return Err(DataError::Invalid(format!("duplicate type parameter in `{}`", t.name)));
        }
        let def = resolve_body(&t.body, &scope, &arity, &t.name)?.normalize();
        schema.types.insert(t.name.clone(), DataType { name: t.name, params: t.params, def });
    }
    Ok(schema)
}

fn is_builtin(name: &str) -> bool {
    matches!(name, "integer" | "string" | "boolean" | "seq" | "option")
}

fn resolve_body(
    body: &RawBody,
    scope: &BTreeSet<String>,
    arity: &BTreeMap<String, usize>,
    path: &str,
) -> Result<TypeDef, DataError> {
    let nfields = body.iter().filter(|e| matches!(e, RawEntry::Field(..))).count();
    if nfields > 0 && nfields < body.len() {
        return Err(DataError::Invalid(format!("`{path}` mixes fields and cases")));
    }
    let mut seen = BTreeSet::new();
    if nfields > 0 || body.is_empty() {
        let mut fields = Vec::new();
        for e in body {
            if let RawEntry::Field(name, ty) = e {
                if !seen.insert(name.clone()) {
                    return Err(DataError::Invalid(format!("duplicate field `{name}` in `{path}`")));
                }
                fields.push(Field { name: name.clone(), ty: resolve_type(ty, scope, arity)? });
            }
        }
        return Ok(TypeDef::Product(fields));
    }
    let mut cases = Vec::new();
    for e in body {
        if let RawEntry::Case(name, inner) = e {
            if !seen.insert(name.clone()) {
                return Err(DataError::Invalid(format!("duplicate case `{name}` in `{path}`")));
            }
            let def = resolve_body(inner, scope, arity, &format!("{path}.{name}"))?;
            cases.push(Case { name: name.clone(), def });
        }
    }
    Ok(TypeDef::Sum(cases))
}

fn resolve_type(
    t: &RawTypeExpr,
    scope: &BTreeSet<String>,
    arity: &BTreeMap<String, usize>,
) -> Result<TypeExpr, DataError> {
    let args: Vec<TypeExpr> = t.args.iter().map(|a| resolve_type(a, scope, arity)).collect::<Result<_, _>>()?;
    let want = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(DataError::Invalid(format!("`{}` expects {n} type argument(s), got {}", t.name, args.len())))
        }
    };
    Ok(match t.name.as_str() {
        "integer" => {
            want(0)?;
            TypeExpr::Integer
        }
        "string" => {
            want(0)?;
            TypeExpr::Str
        }
        "boolean" => {
            want(0)?;
            TypeExpr::Boolean
        }
        "seq" => {
            want(1)?;
            TypeExpr::seq(args[0].clone())
        }
        "option" => {
            want(1)?;
            TypeExpr::option(args[0].clone())
        }
        name if scope.contains(name) => {
            want(0)?;
            TypeExpr::Param(name.to_string())
        }
        name => match arity.get(name) {
            Some(&n) => {
                want(n)?;
                TypeExpr::Named { name: name.to_string(), args }
            }
            None => return Err(DataError::Invalid(format!("unresolved type `{name}`"))),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enum_normalization() {
        let s = parse_data_spec("data Color { Red; Green; Blue; }").unwrap();
        assert_eq!(s.types["Color"].def, TypeDef::Enum(vec!["Red".into(), "Green".into(), "Blue".into()]));
    }

    #[test]
    fn generic_product() {
        let s = parse_data_spec("data Pair[T] { fst: T; snd: T; }").unwrap();
        let p = &s.types["Pair"];
        assert_eq!(p.params, vec!["T".to_string()]);
        assert_eq!(
            p.def,
            TypeDef::Product(vec![
                Field { name: "fst".into(), ty: TypeExpr::Param("T".into()) },
                Field { name: "snd".into(), ty: TypeExpr::Param("T".into()) },
            ])
        );
    }

    #[test]
    fn nested_sum_and_roundtrip() {
        let src = "data Expr { Lit { Int_ { val: string; } Id { name: string; } } Neg { e: Expr; } Hole; }\n\
                   data Prog { stmts: seq[option[Expr]]; flag: boolean; n: integer; }";
        let s = parse_data_spec(src).unwrap();
        let text = s.render();
        assert_eq!(parse_data_spec(&text).unwrap(), s);
        assert!(s.resolve_path(&["Expr".into(), "Lit".into(), "Int_".into()]).is_some());
    }

    #[test]
    fn errors() {
        assert!(parse_data_spec("data A { x: B; }").is_err());
        assert!(parse_data_spec("data A { x: integer; x: string; }").is_err());
        assert!(parse_data_spec("data A { X; X; }").is_err());
        assert!(parse_data_spec("data A { X; y: integer; }").is_err());
        assert!(parse_data_spec("data A {} data A {}").is_err());
        assert!(parse_data_spec("data P[T] { x: T; } data Q { p: P; }").is_err());
        assert!(parse_data_spec("data A { x: integer }").is_err());
    }
}
