//! Primary-expression parser for single C++ code pieces.
//!
//! A piece is split into coarse grammar symbols (control-flow headers,
//! terminal statements, braces), the scope boundaries those symbols mark,
//! and the variables declared or used within each scope segment. This is
//! deliberately not a C++ parser: it only recovers what the scaffold
//! checker needs.

use std::collections::{BTreeSet, HashSet};
use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseFailure {
    #[error("empty code piece")]
    Empty,
    #[error("unterminated {0} literal")]
    UnterminatedLiteral(&'static str),
    #[error("unterminated block comment")]
    UnterminatedComment,
    #[error("unbalanced {0:?}")]
    Unbalanced(String),
    #[error("expected '(' after {0:?}")]
    ExpectedParens(String),
    #[error("statement is missing ';'")]
    MissingSemicolon,
    #[error("keyword {0:?} inside a terminal statement")]
    KeywordInStatement(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Char,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
}

impl Token {
    fn is(&self, s: &str) -> bool {
        self.text == s
    }

    fn is_ident(&self) -> bool {
        self.kind == TokenKind::Ident
    }
}

const PUNCT3: &[&str] = &[">>=", "<<=", "...", "->*", "<=>"];
const PUNCT2: &[&str] = &[
    "::", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=",
    "|=", "^=", ".*",
];

/// Splits a code piece into tokens. String and character literals become
/// single tokens; comments are dropped.
pub fn tokenize(code: &str) -> Result<Vec<Token>, ParseFailure> {
    let chars: Vec<char> = code.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let n = chars.len();
    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            break;
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            let mut j = i + 2;
            loop {
                if j + 1 >= n {
                    return Err(ParseFailure::UnterminatedComment);
                }
                if chars[j] == '*' && chars[j + 1] == '/' {
                    break;
                }
                j += 1;
            }
            i = j + 2;
        } else if c == '"' || c == '\'' {
            let mut j = i + 1;
            loop {
                match chars.get(j) {
                    None => {
                        return Err(ParseFailure::UnterminatedLiteral(if c == '"' { "string" } else { "char" }));
                    }
                    Some('\\') => j += 2,
                    Some(&d) if d == c => break,
                    Some(_) => j += 1,
                }
            }
            out.push(Token {
                kind: if c == '"' { TokenKind::Str } else { TokenKind::Char },
                text: chars[i..=j].iter().collect(),
            });
            i = j + 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let mut j = i + 1;
            while j < n {
                let d = chars[j];
                if d.is_ascii_alphanumeric() || d == '_' || d == '.' || d == '\'' {
                    j += 1;
                } else if (d == '+' || d == '-') && matches!(chars[j - 1], 'e' | 'E' | 'p' | 'P') {
                    j += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                kind: TokenKind::Number,
                text: chars[i..j].iter().collect(),
            });
            i = j;
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i + 1;
            while j < n && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            out.push(Token {
                kind: TokenKind::Ident,
                text: chars[i..j].iter().collect(),
            });
            i = j;
        } else {
            let rest: String = chars[i..n.min(i + 3)].iter().collect();
            let len = PUNCT3
                .iter()
                .find(|p| rest.starts_with(*p))
                .or_else(|| PUNCT2.iter().find(|p| rest.starts_with(*p)))
                .map_or(1, |p| p.len());
            out.push(Token {
                kind: TokenKind::Punct,
                text: chars[i..i + len].iter().collect(),
            });
            i += len;
        }
    }
    Ok(out)
}

/// Grammar symbols. `*Start` kinds open a variable scope, `*End` kinds
/// close one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SymbolKind {
    ForStart,
    WhileStart,
    DoStart,
    IfStart,
    ElifStart,
    ElseStart,
    TerminalParens,
    TerminalStmt,
    Semi,
    OpenBraceStart,
    CloseBraceEnd,
    FunctionHeaderStart,
    WhileTailEnd,
    ReturnType,
    Prototype,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeSymbol {
    pub kind: SymbolKind,
    pub text: String,
    #[serde(skip)]
    pub span: Range<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ScopeEvent {
    Open,
    Close,
}

/// A scope boundary, taking effect after `symbol` (an index into the
/// line's symbols) has been consumed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ScopeMark {
    pub event: ScopeEvent,
    pub symbol: usize,
}

/// Names declared and used between two scope boundaries of a line.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Segment {
    /// Declared variable names, sorted; repeats are kept so that
    /// `int a, a;` can be rejected downstream.
    pub declared: Vec<String>,
    /// Names used without a preceding declaration in the same segment.
    pub used: BTreeSet<String>,
    /// Function names introduced by headers or prototypes.
    pub functions: BTreeSet<String>,
}

impl Segment {
    pub fn is_empty(&self) -> bool {
        self.declared.is_empty() && self.used.is_empty() && self.functions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineParse {
    pub symbols: Vec<PeSymbol>,
    pub scope_events: Vec<ScopeMark>,
    /// `scope_events.len() + 1` segments.
    pub segments: Vec<Segment>,
    /// Parameters of a function signature whose body brace is on a later
    /// line; they are declared into the scope that brace opens.
    pub carried: Vec<String>,
}

impl LineParse {
    pub fn kinds(&self) -> Vec<SymbolKind> {
        self.symbols.iter().map(|s| s.kind).collect()
    }

    pub fn opens(&self) -> usize {
        self.scope_events.iter().filter(|m| m.event == ScopeEvent::Open).count()
    }

    pub fn closes(&self) -> usize {
        self.scope_events.len() - self.opens()
    }

    pub fn all_declared(&self) -> BTreeSet<String> {
        self.segments.iter().flat_map(|s| s.declared.iter().cloned()).collect()
    }

    pub fn all_used(&self) -> BTreeSet<String> {
        self.segments.iter().flat_map(|s| s.used.iter().cloned()).collect()
    }
}

const KEYWORDS: &[&str] = &[
    "for", "if", "else", "while", "do", "return", "break", "continue", "switch", "case", "default", "goto", "sizeof",
    "new", "delete", "true", "false", "nullptr", "this", "typedef", "using", "namespace", "struct", "class", "public",
    "private", "protected", "template", "typename", "const", "static", "volatile", "constexpr", "register", "inline",
    "extern", "mutable", "unsigned", "signed", "long", "short", "int", "char", "bool", "float", "double", "void",
    "auto", "operator", "friend", "virtual", "throw", "try", "catch", "enum", "union", "and", "or", "not", "xor",
    "bitand", "bitor", "compl", "and_eq", "or_eq", "xor_eq", "not_eq", "static_cast", "const_cast",
    "reinterpret_cast", "dynamic_cast", "decltype", "noexcept", "alignof", "wchar_t", "char16_t", "char32_t",
];

const CONTROL_KEYWORDS: &[&str] = &["for", "if", "else", "while", "do"];

const QUALIFIERS: &[&str] = &[
    "const", "static", "volatile", "constexpr", "register", "inline", "extern", "mutable", "typename",
];
const BASE_MODIFIERS: &[&str] = &["unsigned", "signed", "long", "short"];

const BUILTIN_TYPES: &[&str] = &[
    "int", "char", "bool", "float", "double", "void", "auto", "wchar_t", "size_t", "string", "int8_t", "int16_t",
    "int32_t", "int64_t", "uint8_t", "uint16_t", "uint32_t", "uint64_t", "ptrdiff_t", "char16_t", "char32_t",
];

const TEMPLATE_TYPES: &[&str] = &[
    "vector", "map", "set", "multiset", "multimap", "unordered_map", "unordered_set", "pair", "queue",
    "priority_queue", "stack", "deque", "list", "bitset", "array", "tuple", "greater", "less",
];

/// Library names that are never user variables.
const BUILTIN_NAMES: &[&str] = &[
    "cin", "cout", "cerr", "clog", "endl", "std", "INT_MAX", "INT_MIN", "LLONG_MAX", "LLONG_MIN", "LONG_MAX",
    "LONG_MIN", "UINT_MAX", "ULLONG_MAX", "EOF", "NULL", "M_PI", "stdin", "stdout", "fixed", "setprecision",
    "boolalpha", "ios", "ios_base", "npos", "RAND_MAX", "showpoint", "noskipws",
];

/// Aliases that competitive-programming code commonly defines.
pub const DEFAULT_EXTRA_TYPES: &[&str] = &["ll", "ull", "ld", "pii", "pll", "vi", "vll", "vii", "vvi", "lli"];

/// Type-name configuration for declaration detection.
#[derive(Debug, Clone)]
pub struct ParserOptions {
    extra_types: HashSet<String>,
}

impl Default for ParserOptions {
    fn default() -> Self {
        Self::with_extra_types(DEFAULT_EXTRA_TYPES.iter().copied())
    }
}

impl ParserOptions {
    pub fn with_extra_types<'a>(types: impl IntoIterator<Item = &'a str>) -> Self {
        ParserOptions {
            extra_types: types.into_iter().map(str::to_string).collect(),
        }
    }

    fn is_type_name(&self, s: &str) -> bool {
        BUILTIN_TYPES.contains(&s) || TEMPLATE_TYPES.contains(&s) || self.extra_types.contains(s)
    }
}

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn closing(open: &str) -> &'static str {
    match open {
        "(" => ")",
        "[" => "]",
        _ => "}",
    }
}

/// Index of the token matching the opener at `open`, honouring nesting of
/// all three bracket kinds.
fn matching(toks: &[Token], open: usize) -> Result<usize, ParseFailure> {
    let mut stack: Vec<&str> = Vec::new();
    for (j, t) in toks.iter().enumerate().skip(open) {
        match t.text.as_str() {
            "(" | "[" | "{" => stack.push(closing(&t.text)),
            ")" | "]" | "}" => {
                if stack.pop() != Some(t.text.as_str()) {
                    return Err(ParseFailure::Unbalanced(t.text.clone()));
                }
                if stack.is_empty() {
                    return Ok(j);
                }
            }
            _ => {}
        }
    }
    Err(ParseFailure::Unbalanced(toks[open].text.clone()))
}

fn join(toks: &[Token]) -> String {
    toks.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ")
}

/// Parses a code piece with the default type-name configuration.
pub fn parse_piece(code: &str) -> Result<LineParse, ParseFailure> {
    parse_piece_with(code, &ParserOptions::default())
}

pub fn parse_piece_with(code: &str, opts: &ParserOptions) -> Result<LineParse, ParseFailure> {
    let toks = tokenize(code)?;
    if toks.is_empty() {
        return Err(ParseFailure::Empty);
    }
    let mut sym = Symbolizer {
        toks: &toks,
        opts,
        pos: 0,
        symbols: Vec::new(),
        marks: Vec::new(),
        after_header: false,
    };
    sym.run()?;
    let Symbolizer { symbols, marks, .. } = sym;
    let (segments, carried) = extract_variables(&toks, &symbols, &marks, opts);
    Ok(LineParse {
        symbols,
        scope_events: marks,
        segments,
        carried,
    })
}

struct Symbolizer<'a> {
    toks: &'a [Token],
    opts: &'a ParserOptions,
    pos: usize,
    symbols: Vec<PeSymbol>,
    marks: Vec<ScopeMark>,
    /// The previous symbol completed a control header whose body has not
    /// started yet on this line.
    after_header: bool,
}

impl Symbolizer<'_> {
    fn push(&mut self, kind: SymbolKind, span: Range<usize>, event: Option<ScopeEvent>) {
        let text = join(&self.toks[span.clone()]);
        if let Some(event) = event {
            self.marks.push(ScopeMark {
                event,
                symbol: self.symbols.len(),
            });
        }
        self.symbols.push(PeSymbol { kind, text, span });
    }

    fn at(&self, i: usize) -> Option<&Token> {
        self.toks.get(i)
    }

    fn parens(&mut self, keyword: &str) -> Result<(), ParseFailure> {
        if !self.at(self.pos).is_some_and(|t| t.is("(")) {
            return Err(ParseFailure::ExpectedParens(keyword.to_string()));
        }
        let end = matching(self.toks, self.pos)?;
        self.push(SymbolKind::TerminalParens, self.pos..end + 1, None);
        self.pos = end + 1;
        Ok(())
    }

    /// A `;` ends a statement; directly after a header it is also the end of
    /// a braceless body.
    fn semi(&mut self) {
        let event = self.after_header.then_some(ScopeEvent::Close);
        self.push(SymbolKind::Semi, self.pos..self.pos + 1, event);
        self.pos += 1;
        self.after_header = false;
    }

    fn run(&mut self) -> Result<(), ParseFailure> {
        if self.toks[0].is("#") {
            let all = 0..self.toks.len();
            self.push(SymbolKind::TerminalStmt, all.clone(), None);
            self.push(SymbolKind::Semi, all.end..all.end, None);
            self.pos = all.end;
            return Ok(());
        }
        while self.pos < self.toks.len() {
            let p = self.pos;
            let text = self.toks[p].text.as_str();
            match text {
                "}" => {
                    self.push(SymbolKind::CloseBraceEnd, p..p + 1, Some(ScopeEvent::Close));
                    self.pos += 1;
                    self.after_header = false;
                }
                "{" => {
                    // a brace right after a header is that header's body
                    let event = (!self.after_header).then_some(ScopeEvent::Open);
                    self.push(SymbolKind::OpenBraceStart, p..p + 1, event);
                    self.pos += 1;
                    self.after_header = false;
                }
                ";" => self.semi(),
                "for" | "if" => {
                    let kind = if text == "for" { SymbolKind::ForStart } else { SymbolKind::IfStart };
                    self.push(kind, p..p + 1, Some(ScopeEvent::Open));
                    self.pos += 1;
                    self.parens(text)?;
                    self.after_header = true;
                }
                "else" => {
                    if self.at(p + 1).is_some_and(|t| t.is("if")) {
                        self.push(SymbolKind::ElifStart, p..p + 2, Some(ScopeEvent::Open));
                        self.pos += 2;
                        self.parens("else if")?;
                    } else {
                        self.push(SymbolKind::ElseStart, p..p + 1, Some(ScopeEvent::Open));
                        self.pos += 1;
                    }
                    self.after_header = true;
                }
                "do" => {
                    self.push(SymbolKind::DoStart, p..p + 1, Some(ScopeEvent::Open));
                    self.pos += 1;
                    self.after_header = true;
                }
                "while" => {
                    let open = p + 1;
                    if !self.at(open).is_some_and(|t| t.is("(")) {
                        return Err(ParseFailure::ExpectedParens("while".into()));
                    }
                    let close = matching(self.toks, open)?;
                    if self.at(close + 1).is_some_and(|t| t.is(";")) {
                        // `while (...);` is the tail of a do-while, or a loop
                        // with an empty body; the recognizer tells them apart.
                        let braceless_body = self.after_header;
                        self.push(SymbolKind::WhileTailEnd, p..p + 1, Some(ScopeEvent::Close));
                        self.pos += 1;
                        self.parens("while")?;
                        self.after_header = braceless_body;
                        self.semi();
                    } else {
                        self.push(SymbolKind::WhileStart, p..p + 1, Some(ScopeEvent::Open));
                        self.pos += 1;
                        self.parens("while")?;
                        self.after_header = true;
                    }
                }
                _ => {
                    if self.symbols.is_empty() && self.function_header()? {
                        continue;
                    }
                    self.statement()?;
                }
            }
        }
        Ok(())
    }

    /// Recognizes `type name(params)` followed by `{`, `;` or end of line.
    fn function_header(&mut self) -> Result<bool, ParseFailure> {
        let toks = self.toks;
        let Some(mut k) = parse_type(toks, self.pos, self.opts) else {
            return Ok(false);
        };
        while toks.get(k).is_some_and(|t| t.is("*") || t.is("&")) {
            k += 1;
        }
        let Some(name) = toks.get(k) else { return Ok(false) };
        if !name.is_ident() || is_keyword(&name.text) || self.opts.is_type_name(&name.text) {
            return Ok(false);
        }
        if !toks.get(k + 1).is_some_and(|t| t.is("(")) {
            return Ok(false);
        }
        let close = matching(toks, k + 1)?;
        if !params_like(&toks[k + 2..close], self.opts) {
            return Ok(false);
        }
        let start = self.pos;
        match toks.get(close + 1).map(|t| t.text.as_str()) {
            None => {
                self.push(SymbolKind::ReturnType, start..close + 1, None);
                self.pos = close + 1;
            }
            Some("{") => {
                self.push(SymbolKind::FunctionHeaderStart, start..close + 2, Some(ScopeEvent::Open));
                self.pos = close + 2;
            }
            Some(";") => {
                self.push(SymbolKind::Prototype, start..close + 1, None);
                self.pos = close + 1;
                self.semi();
            }
            Some(_) => return Ok(false),
        }
        self.after_header = false;
        Ok(true)
    }

    /// A maximal span free of `;` and control keywords, terminated by `;`.
    fn statement(&mut self) -> Result<(), ParseFailure> {
        let start = self.pos;
        let mut j = start;
        loop {
            let Some(t) = self.at(j) else {
                return Err(ParseFailure::MissingSemicolon);
            };
            match t.text.as_str() {
                ";" => break,
                "(" | "[" | "{" => j = matching(self.toks, j)? + 1,
                ")" | "]" => return Err(ParseFailure::Unbalanced(t.text.clone())),
                "}" => return Err(ParseFailure::MissingSemicolon),
                kw if t.is_ident() && CONTROL_KEYWORDS.contains(&kw) => {
                    return Err(ParseFailure::KeywordInStatement(kw.to_string()));
                }
                _ => j += 1,
            }
        }
        self.push(SymbolKind::TerminalStmt, start..j, None);
        self.pos = j;
        self.semi();
        Ok(())
    }
}

/// Skips a type starting at `i` and returns the index just past it.
fn parse_type(toks: &[Token], i: usize, opts: &ParserOptions) -> Option<usize> {
    let mut j = i;
    let mut has_base = false;
    while let Some(t) = toks.get(j) {
        if QUALIFIERS.contains(&t.text.as_str()) {
            j += 1;
        } else if BASE_MODIFIERS.contains(&t.text.as_str()) {
            has_base = true;
            j += 1;
        } else {
            break;
        }
    }
    let mut named = false;
    if let Some(t) = toks.get(j) {
        if t.is("std") && toks.get(j + 1).is_some_and(|t| t.is("::")) {
            if toks.get(j + 2).is_some_and(|t| opts.is_type_name(&t.text)) {
                j += 3;
                named = true;
            }
        } else if t.is_ident() && opts.is_type_name(&t.text) {
            j += 1;
            named = true;
        }
    }
    if !named && !has_base {
        return None;
    }
    if named && toks.get(j).is_some_and(|t| t.is("<")) {
        let mut depth = 0i32;
        loop {
            let t = toks.get(j)?;
            match t.text.as_str() {
                "<" => depth += 1,
                ">" => depth -= 1,
                ">>" => depth -= 2,
                ";" | "{" | "}" => return None,
                _ => {}
            }
            j += 1;
            if depth <= 0 {
                if depth < 0 {
                    return None;
                }
                break;
            }
        }
        // nested names such as `vector<int>::iterator`
        while toks.get(j).is_some_and(|t| t.is("::")) && toks.get(j + 1).is_some_and(Token::is_ident) {
            j += 2;
        }
    }
    while toks.get(j).is_some_and(|t| t.is("const")) {
        j += 1;
    }
    Some(j)
}

fn split_top_level<'t>(toks: &'t [Token], sep: &str) -> Vec<&'t [Token]> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (j, t) in toks.iter().enumerate() {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            s if s == sep && depth == 0 => {
                parts.push(&toks[start..j]);
                start = j + 1;
            }
            _ => {}
        }
    }
    parts.push(&toks[start..]);
    parts
}

/// Does a parenthesized list look like function parameters rather than
/// constructor arguments?
fn params_like(inner: &[Token], opts: &ParserOptions) -> bool {
    if inner.is_empty() || (inner.len() == 1 && inner[0].is("void")) {
        return true;
    }
    split_top_level(inner, ",").into_iter().all(|part| {
        let Some(mut j) = parse_type(part, 0, opts) else {
            return false;
        };
        while part.get(j).is_some_and(|t| matches!(t.text.as_str(), "*" | "&" | "&&")) {
            j += 1;
        }
        match part.get(j) {
            None => true,
            Some(t) if t.is_ident() && !is_keyword(&t.text) => {
                matches!(part.get(j + 1).map(|t| t.text.as_str()), None | Some("[") | Some("="))
            }
            Some(_) => false,
        }
    })
}

/// One variable event in token order.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Item {
    Decl(String),
    Use(String),
    Func(String),
}

fn is_variable_like(toks: &[Token], j: usize, opts: &ParserOptions) -> bool {
    let t = &toks[j];
    if !t.is_ident() || is_keyword(&t.text) || opts.is_type_name(&t.text) || BUILTIN_NAMES.contains(&t.text.as_str())
    {
        return false;
    }
    let prev = j.checked_sub(1).map(|p| toks[p].text.as_str());
    if matches!(prev, Some(".") | Some("->") | Some("::")) {
        return false;
    }
    // calls and qualifiers
    !matches!(toks.get(j + 1).map(|t| t.text.as_str()), Some("(") | Some("::"))
}

fn expr_items(toks: &[Token], opts: &ParserOptions, out: &mut Vec<Item>) {
    for j in 0..toks.len() {
        if is_variable_like(toks, j, opts) {
            out.push(Item::Use(toks[j].text.clone()));
        }
    }
}

/// Declarators following a type: `a = 1, *b, c[10], d(5)`.
fn declarator_items(toks: &[Token], opts: &ParserOptions, out: &mut Vec<Item>) {
    let mut j = 0;
    while j < toks.len() {
        while toks.get(j).is_some_and(|t| matches!(t.text.as_str(), "*" | "&" | "&&" | "const")) {
            j += 1;
        }
        let Some(name) = toks.get(j) else { return };
        if !name.is_ident() || is_keyword(&name.text) {
            expr_items(&toks[j..], opts, out);
            return;
        }
        out.push(Item::Decl(name.text.clone()));
        j += 1;
        while toks.get(j).is_some_and(|t| t.is("[")) {
            let Ok(end) = matching(toks, j) else { return };
            expr_items(&toks[j + 1..end], opts, out);
            j = end + 1;
        }
        match toks.get(j).map(|t| t.text.as_str()) {
            Some("=") => {
                let rest = &toks[j + 1..];
                let init = split_top_level(rest, ",")[0];
                expr_items(init, opts, out);
                j += 1 + init.len();
            }
            Some("(") | Some("{") => {
                let Ok(end) = matching(toks, j) else { return };
                expr_items(&toks[j + 1..end], opts, out);
                j = end + 1;
            }
            _ => {}
        }
        match toks.get(j).map(|t| t.text.as_str()) {
            Some(",") => j += 1,
            None => return,
            Some(_) => {
                expr_items(&toks[j..], opts, out);
                return;
            }
        }
    }
}

/// A simple statement or a condition: declaration if it starts with a
/// type followed by a declarator, expression otherwise.
fn statement_items(toks: &[Token], opts: &ParserOptions, out: &mut Vec<Item>) {
    match toks.first().map(|t| t.text.as_str()) {
        None | Some("typedef") | Some("using") => return,
        Some("return") => return expr_items(&toks[1..], opts, out),
        _ => {}
    }
    if let Some(j) = parse_type(toks, 0, opts) {
        let mut k = j;
        while toks.get(k).is_some_and(|t| matches!(t.text.as_str(), "*" | "&" | "&&")) {
            k += 1;
        }
        if toks.get(k).is_some_and(|t| t.is_ident() && !is_keyword(&t.text)) {
            return declarator_items(&toks[j..], opts, out);
        }
    }
    expr_items(toks, opts, out)
}

fn for_items(inner: &[Token], opts: &ParserOptions, out: &mut Vec<Item>) {
    let parts = split_top_level(inner, ";");
    if parts.len() == 3 {
        statement_items(parts[0], opts, out);
        expr_items(parts[1], opts, out);
        expr_items(parts[2], opts, out);
        return;
    }
    let range = split_top_level(inner, ":");
    if range.len() == 2 {
        statement_items(range[0], opts, out);
        expr_items(range[1], opts, out);
        return;
    }
    expr_items(inner, opts, out)
}

/// Function name and parameter names of a header, prototype or signature.
fn function_parts(toks: &[Token], opts: &ParserOptions) -> (String, Vec<String>) {
    let open = toks.iter().position(|t| t.is("(")).expect("function header has parens");
    let name = toks[open - 1].text.clone();
    let close = matching(toks, open).expect("header parens are balanced");
    let inner = &toks[open + 1..close];
    let mut params = Vec::new();
    if !(inner.is_empty() || (inner.len() == 1 && inner[0].is("void"))) {
        for part in split_top_level(inner, ",") {
            let Some(mut j) = parse_type(part, 0, opts) else { continue };
            while part.get(j).is_some_and(|t| matches!(t.text.as_str(), "*" | "&" | "&&")) {
                j += 1;
            }
            if let Some(t) = part.get(j).filter(|t| t.is_ident()) {
                params.push(t.text.clone());
            }
        }
    }
    (name, params)
}

/// Assigns declared and used names to the scope segments of a line.
///
/// Segment `k` covers the symbols after the `k`-th scope boundary. Header
/// parentheses belong to the scope their header opens, and function
/// parameters to the function body's scope.
pub fn extract_variables(
    toks: &[Token],
    symbols: &[PeSymbol],
    marks: &[ScopeMark],
    opts: &ParserOptions,
) -> (Vec<Segment>, Vec<String>) {
    let mut items: Vec<Vec<Item>> = vec![Vec::new(); marks.len() + 1];
    let mut carried = Vec::new();
    let seg_of = |j: usize| marks.iter().filter(|m| m.symbol < j).count();
    let directive = toks.first().is_some_and(|t| t.is("#"));

    for (j, sym) in symbols.iter().enumerate() {
        let seg = seg_of(j);
        let span = &toks[sym.span.clone()];
        match sym.kind {
            SymbolKind::TerminalStmt if directive => {
                if span.get(1).is_some_and(|t| t.is("define")) {
                    if let Some(name) = span.get(2).filter(|t| t.is_ident()) {
                        items[seg].push(Item::Decl(name.text.clone()));
                    }
                }
            }
            SymbolKind::TerminalStmt => statement_items(span, opts, &mut items[seg]),
            SymbolKind::TerminalParens => {
                let inner = &span[1..span.len() - 1];
                if j > 0 && symbols[j - 1].kind == SymbolKind::ForStart {
                    for_items(inner, opts, &mut items[seg]);
                } else {
                    statement_items(inner, opts, &mut items[seg]);
                }
            }
            SymbolKind::FunctionHeaderStart => {
                let (name, params) = function_parts(span, opts);
                items[seg].push(Item::Func(name));
                items[seg + 1].extend(params.into_iter().map(Item::Decl));
            }
            SymbolKind::ReturnType => {
                let (name, params) = function_parts(span, opts);
                items[seg].push(Item::Func(name));
                carried = params;
            }
            SymbolKind::Prototype => {
                let (name, _) = function_parts(span, opts);
                items[seg].push(Item::Func(name));
            }
            _ => {}
        }
    }

    let segments = items
        .into_iter()
        .map(|seg_items| {
            let mut seg = Segment::default();
            let mut local: HashSet<String> = HashSet::new();
            for item in seg_items {
                match item {
                    Item::Decl(n) => {
                        local.insert(n.clone());
                        seg.declared.push(n);
                    }
                    Item::Use(n) => {
                        if !local.contains(&n) {
                            seg.used.insert(n);
                        }
                    }
                    Item::Func(n) => {
                        seg.functions.insert(n);
                    }
                }
            }
            seg.declared.sort();
            seg
        })
        .collect();
    carried.sort();
    (segments, carried)
}

#[cfg(test)]
mod tests {
    use super::SymbolKind::*;
    use super::*;

    fn texts(code: &str) -> Vec<String> {
        tokenize(code).unwrap().into_iter().map(|t| t.text).collect()
    }

    fn set(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenizes() {
        assert_eq!(texts("if (lucky == 'A') {"), ["if", "(", "lucky", "==", "'A'", ")", "{"]);
        assert!(texts("").is_empty());
        assert_eq!(texts("a += 1"), ["a", "+=", "1"]);
        assert_eq!(texts("x = \"a;b\" // hi"), ["x", "=", "\"a;b\""]);
        assert_eq!(texts("a/*c*/>>=1e-9"), ["a", ">>=", "1e-9"]);
        assert_eq!(texts("p->x::y"), ["p", "->", "x", "::", "y"]);
        assert_eq!(texts("c = '\\''"), ["c", "=", "'\\''"]);
    }

    #[test]
    fn unterminated_literals_fail() {
        assert_eq!(tokenize("s = \"abc"), Err(ParseFailure::UnterminatedLiteral("string")));
        assert_eq!(tokenize("c = 'a"), Err(ParseFailure::UnterminatedLiteral("char")));
        assert_eq!(tokenize("a /* b"), Err(ParseFailure::UnterminatedComment));
    }

    #[test]
    fn main_header() {
        let p = parse_piece("int main() {").unwrap();
        assert_eq!(p.kinds(), vec![FunctionHeaderStart]);
        assert_eq!(p.scope_events.len(), 1);
        assert_eq!(p.scope_events[0].event, ScopeEvent::Open);
        assert_eq!(p.segments[0].functions, set(&["main"]));
    }

    #[test]
    fn for_header() {
        let p = parse_piece("for (int i = 0; i < n; ++i) {").unwrap();
        assert_eq!(p.kinds(), vec![ForStart, TerminalParens, OpenBraceStart]);
        assert_eq!(p.opens(), 1);
        assert_eq!(p.closes(), 0);
        assert!(p.segments[0].is_empty());
        assert_eq!(p.segments[1].declared, vec!["i"]);
        assert_eq!(p.segments[1].used, set(&["n"]));
    }

    #[test]
    fn close_brace() {
        let p = parse_piece("}").unwrap();
        assert_eq!(p.kinds(), vec![CloseBraceEnd]);
        assert_eq!(p.closes(), 1);
        assert!(p.segments.iter().all(Segment::is_empty));
    }

    #[test]
    fn declarations_and_uses() {
        let p = parse_piece("int now = -1, cnt = 0;").unwrap();
        assert_eq!(p.all_declared(), set(&["cnt", "now"]));
        assert!(p.all_used().is_empty());

        let p = parse_piece("N = 222222;").unwrap();
        assert!(p.all_declared().is_empty());
        assert_eq!(p.all_used(), set(&["N"]));

        let p = parse_piece("if (lucky == A) {").unwrap();
        assert!(p.all_declared().is_empty());
        assert_eq!(p.all_used(), set(&["A", "lucky"]));

        let p = parse_piece("if (lucky == 'A') {").unwrap();
        assert_eq!(p.all_used(), set(&["lucky"]));
    }

    #[test]
    fn uses_exclude_members_calls_and_library() {
        let p = parse_piece("cout << max(a.size(), b->len) << endl;").unwrap();
        assert_eq!(p.all_used(), set(&["a", "b"]));
        let p = parse_piece("std::sort(v.begin(), v.end());").unwrap();
        assert_eq!(p.all_used(), set(&["v"]));
        let p = parse_piece("if (s.find(t) == string::npos) {").unwrap();
        assert_eq!(p.all_used(), set(&["s", "t"]));
    }

    #[test]
    fn declaration_forms() {
        let p = parse_piece("vector<vector<int>> g(n + 1);").unwrap();
        assert_eq!(p.segments[0].declared, vec!["g"]);
        assert_eq!(p.segments[0].used, set(&["n"]));

        let p = parse_piece("long long a[100005], *p, s = a[0];").unwrap();
        assert_eq!(p.segments[0].declared, vec!["a", "p", "s"]);
        assert!(p.segments[0].used.is_empty());

        let p = parse_piece("int n; cin >> n;").unwrap();
        assert_eq!(p.segments[0].declared, vec!["n"]);
        assert!(p.segments[0].used.is_empty());

        let p = parse_piece("map<string, int> cnt;").unwrap();
        assert_eq!(p.segments[0].declared, vec!["cnt"]);

        let p = parse_piece("int a, a;").unwrap();
        assert_eq!(p.segments[0].declared, vec!["a", "a"]);

        let p = parse_piece("const int N = 1e5 + 5;").unwrap();
        assert_eq!(p.segments[0].declared, vec!["N"]);

        let p = parse_piece("int a[3] = {x, 2, 3};").unwrap();
        assert_eq!(p.segments[0].declared, vec!["a"]);
        assert_eq!(p.segments[0].used, set(&["x"]));

        let p = parse_piece("ll ans = 0;").unwrap();
        assert_eq!(p.segments[0].declared, vec!["ans"]);

        let p = parse_piece("string s = t;").unwrap();
        assert_eq!(p.segments[0].declared, vec!["s"]);
        assert_eq!(p.segments[0].used, set(&["t"]));
    }

    #[test]
    fn extra_types_are_configurable() {
        let plain = ParserOptions::with_extra_types([]);
        let p = parse_piece_with("ll x;", &plain).unwrap();
        assert!(p.all_declared().is_empty());
        let custom = ParserOptions::with_extra_types(["point"]);
        let p = parse_piece_with("point q;", &custom).unwrap();
        assert_eq!(p.all_declared(), set(&["q"]));
    }

    #[test]
    fn assignment_operators_share_structure() {
        let a = parse_piece("a += 1;").unwrap();
        let b = parse_piece("a -= 1;").unwrap();
        assert_eq!(a.kinds(), b.kinds());
        assert_eq!(a.segments, b.segments);
    }

    #[test]
    fn else_if_is_elif() {
        let p = parse_piece("} else if (x > 0) {").unwrap();
        assert_eq!(p.kinds(), vec![CloseBraceEnd, ElifStart, TerminalParens, OpenBraceStart]);
        assert_eq!(p.opens(), 1);
        assert_eq!(p.closes(), 1);
        assert_eq!(p.segments[2].used, set(&["x"]));
    }

    #[test]
    fn braceless_body_opens_and_closes() {
        let p = parse_piece("if (a > b) swap(a, b);").unwrap();
        assert_eq!(p.kinds(), vec![IfStart, TerminalParens, TerminalStmt, Semi]);
        assert_eq!(p.opens(), 1);
        assert_eq!(p.closes(), 1);
        assert_eq!(p.segments[1].used, set(&["a", "b"]));

        let p = parse_piece("for (int i = 0; i < n; i++) cin >> a[i];").unwrap();
        assert_eq!(p.segments[1].declared, vec!["i"]);
        assert_eq!(p.segments[1].used, set(&["a", "n"]));

        let p = parse_piece("else cout << \"NO\\n\";").unwrap();
        assert_eq!(p.kinds(), vec![ElseStart, TerminalStmt, Semi]);
        assert_eq!(p.opens(), 1);
        assert_eq!(p.closes(), 1);
    }

    #[test]
    fn do_while_forms() {
        let p = parse_piece("do {").unwrap();
        assert_eq!(p.kinds(), vec![DoStart, OpenBraceStart]);
        assert_eq!(p.opens(), 1);

        let p = parse_piece("} while (n > 0);").unwrap();
        assert_eq!(p.kinds(), vec![CloseBraceEnd, WhileTailEnd, TerminalParens, Semi]);
        assert_eq!(p.closes(), 2);
        assert_eq!(p.segments[2].used, set(&["n"]));

        let p = parse_piece("do x++; while (x < 5);").unwrap();
        assert_eq!(p.kinds(), vec![DoStart, TerminalStmt, Semi, WhileTailEnd, TerminalParens, Semi]);

        let p = parse_piece("while (n > 0) {").unwrap();
        assert_eq!(p.kinds(), vec![WhileStart, TerminalParens, OpenBraceStart]);
    }

    #[test]
    fn function_forms() {
        let p = parse_piece("int gcd(int a, int b) {").unwrap();
        assert_eq!(p.kinds(), vec![FunctionHeaderStart]);
        assert_eq!(p.segments[0].functions, set(&["gcd"]));
        assert_eq!(p.segments[1].declared, vec!["a", "b"]);

        let p = parse_piece("int gcd(int, int);").unwrap();
        assert_eq!(p.kinds(), vec![Prototype, Semi]);
        assert_eq!(p.segments[0].functions, set(&["gcd"]));

        let p = parse_piece("bool check(long long x)").unwrap();
        assert_eq!(p.kinds(), vec![ReturnType]);
        assert_eq!(p.carried, vec!["x"]);

        let p = parse_piece("void solve() { cout << 1; }").unwrap();
        assert_eq!(p.kinds(), vec![FunctionHeaderStart, TerminalStmt, Semi, CloseBraceEnd]);

        // constructor arguments are not parameters
        let p = parse_piece("vector<int> v(n, 0);").unwrap();
        assert_eq!(p.kinds(), vec![TerminalStmt, Semi]);
        assert_eq!(p.segments[0].declared, vec!["v"]);
    }

    #[test]
    fn directives_and_using() {
        let p = parse_piece("#include <bits/stdc++.h>").unwrap();
        assert_eq!(p.kinds(), vec![TerminalStmt, Semi]);
        assert!(p.segments[0].is_empty());
        let p = parse_piece("#define MAXN 1005").unwrap();
        assert_eq!(p.segments[0].declared, vec!["MAXN"]);
        let p = parse_piece("using namespace std;").unwrap();
        assert!(p.segments[0].is_empty());
        let p = parse_piece("typedef long long ll;").unwrap();
        assert!(p.segments[0].is_empty());
    }

    #[test]
    fn range_for() {
        let p = parse_piece("for (auto &x : v) {").unwrap();
        assert_eq!(p.segments[1].declared, vec!["x"]);
        assert_eq!(p.segments[1].used, set(&["v"]));
    }

    #[test]
    fn failures() {
        assert_eq!(parse_piece(""), Err(ParseFailure::Empty));
        assert_eq!(parse_piece("// only a comment"), Err(ParseFailure::Empty));
        assert!(matches!(parse_piece("if (a == b {"), Err(ParseFailure::Unbalanced(_))));
        assert!(matches!(parse_piece("x = (a + b;"), Err(ParseFailure::Unbalanced(_))));
        assert_eq!(parse_piece("else x"), Err(ParseFailure::MissingSemicolon));
        assert_eq!(parse_piece("return 0"), Err(ParseFailure::MissingSemicolon));
        assert!(matches!(parse_piece("if x > 0 {"), Err(ParseFailure::ExpectedParens(_))));
        assert!(matches!(parse_piece("x = 1 while"), Err(ParseFailure::KeywordInStatement(_))));
    }

    #[test]
    fn segment_count_matches_events() {
        for code in ["} else {", "int main() {", "if (a) b = 1; else b = 2;", "x;", "} while (x);", ";"] {
            let p = parse_piece(code).unwrap();
            assert_eq!(p.segments.len(), p.scope_events.len() + 1, "{code}");
        }
    }
}
