//! Configurations, incremental prefix-scaffold validity, and the full
//! program checker.
//!
//! [`ScaffoldState`] is a deterministic stack machine over symbol kinds
//! (frames tagged for/while/do/if/elif/else/function/block) paired with a
//! persistent stack of symbol tables. Extending a state never mutates it,
//! so beam hypotheses can branch from a shared prefix cheaply.
//!
//! Indentation is compared against the number of open scopes after the
//! line's leading `}` symbols have been consumed, so `} else {` and a
//! closing `}` sit at the indentation of the block they end.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Problem, Program};
use crate::pe_parser::{self, LineParse, ParseFailure, ParserOptions, ScopeMark, Segment, SymbolKind};

/// Which constraints a check enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Grammar and indentation.
    Syntactic,
    /// Grammar, indentation and symbol tables.
    SymTable,
}

/// The part of a code piece that matters for constraint checking.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Configuration {
    pub symbols: Vec<SymbolKind>,
    pub scope_events: Vec<ScopeMark>,
    pub segments: Vec<Segment>,
    pub carried: Vec<String>,
}

impl Configuration {
    /// Drops variable information, keeping only what the syntactic regime
    /// looks at.
    pub fn syntactic(&self) -> Configuration {
        Configuration {
            symbols: self.symbols.clone(),
            scope_events: self.scope_events.clone(),
            segments: vec![Segment::default(); self.segments.len()],
            carried: Vec::new(),
        }
    }

    pub fn project(&self, regime: Regime) -> Configuration {
        match regime {
            Regime::Syntactic => self.syntactic(),
            Regime::SymTable => self.clone(),
        }
    }

    /// Index of the first symbol that segment `k` precedes.
    fn segment_start(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.scope_events[k - 1].symbol + 1
        }
    }
}

pub fn config_of(parse: &LineParse) -> Configuration {
    Configuration {
        symbols: parse.kinds(),
        scope_events: parse.scope_events.clone(),
        segments: parse.segments.clone(),
        carried: parse.carried.clone(),
    }
}

pub fn parse_config(code: &str, opts: &ParserOptions) -> Result<Configuration, ParseFailure> {
    pe_parser::parse_piece_with(code, opts).map(|p| config_of(&p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    GrammarDead,
    IndentMismatch,
    UndeclaredUse,
    Redeclaration,
    IncompleteAtEnd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("{kind:?} at line {line}: {detail}")]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScaffoldError {
    #[error("is_complete called after {done} of {expected} lines")]
    Usage { done: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum FrameKind {
    Function,
    For,
    While,
    If,
    Elif,
    Else,
    Do,
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Frame {
    kind: FrameKind,
    /// False while a control header still waits for its body, or while a
    /// braceless body is being consumed.
    braced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Pending {
    None,
    /// An if/elif statement just finished; `else` may still attach to it.
    IfChain,
    /// A do body just finished; the `while (...);` tail must follow.
    DoTail,
    /// A function signature waits for its body brace.
    Signature(Arc<[String]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Expect {
    Free,
    HeaderParens,
    Semi,
    TailParens,
    TailSemi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Completed {
    Stmt,
    IfLike,
    Do,
}

impl FrameKind {
    fn completes_as(self) -> Completed {
        match self {
            FrameKind::If | FrameKind::Elif => Completed::IfLike,
            FrameKind::Do => Completed::Do,
            _ => Completed::Stmt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NameKind {
    Var,
    Func,
}

#[derive(Debug, Clone, Default)]
struct Scope {
    /// Sorted by name.
    names: Vec<(String, NameKind)>,
    parent: Option<Arc<Scope>>,
}

impl Scope {
    fn get(&self, name: &str) -> Option<NameKind> {
        self.names
            .binary_search_by(|(n, _)| n.as_str().cmp(name))
            .ok()
            .map(|i| self.names[i].1)
    }
}

/// Persistent stack of per-scope name tables; the bottom scope is global.
#[derive(Debug, Clone)]
struct SymbolTables {
    top: Arc<Scope>,
}

impl SymbolTables {
    fn new() -> Self {
        SymbolTables {
            top: Arc::new(Scope::default()),
        }
    }

    fn push(&mut self) {
        let parent = self.top.clone();
        self.top = Arc::new(Scope {
            names: Vec::new(),
            parent: Some(parent),
        });
    }

    fn pop(&mut self) {
        let parent = self.top.parent.clone().expect("global scope is never popped");
        self.top = parent;
    }

    fn resolves(&self, name: &str) -> bool {
        let mut scope = Some(&self.top);
        while let Some(s) = scope {
            if s.get(name).is_some() {
                return true;
            }
            scope = s.parent.as_ref();
        }
        false
    }

    /// Adds a name to the innermost scope; false if that would redeclare.
    fn declare(&mut self, name: &str, kind: NameKind) -> bool {
        match self.top.get(name) {
            Some(NameKind::Func) if kind == NameKind::Func => true,
            Some(_) => false,
            None => {
                let scope = Arc::make_mut(&mut self.top);
                let at = scope
                    .names
                    .binary_search_by(|(n, _)| n.as_str().cmp(name))
                    .unwrap_err();
                scope.names.insert(at, (name.to_string(), kind));
                true
            }
        }
    }

    fn depth(&self) -> usize {
        let mut d = 0;
        let mut scope = self.top.parent.as_ref();
        while let Some(s) = scope {
            d += 1;
            scope = s.parent.as_ref();
        }
        d + 1
    }

    fn innermost_names(&self) -> Vec<String> {
        self.top.names.iter().map(|(n, _)| n.clone()).collect()
    }
}

/// Incremental validity state of a prefix scaffold.
#[derive(Debug, Clone)]
pub struct ScaffoldState {
    frames: Vec<Frame>,
    pending: Pending,
    expect: Expect,
    tables: SymbolTables,
    lines_done: usize,
}

impl Default for ScaffoldState {
    fn default() -> Self {
        Self::new()
    }
}

struct Dead;

impl ScaffoldState {
    pub fn new() -> Self {
        ScaffoldState {
            frames: Vec::new(),
            pending: Pending::None,
            expect: Expect::Free,
            tables: SymbolTables::new(),
            lines_done: 0,
        }
    }

    pub fn open_scopes(&self) -> usize {
        self.frames.len()
    }

    pub fn lines_done(&self) -> usize {
        self.lines_done
    }

    /// Number of symbol tables on the stack, global scope included.
    pub fn symtable_depth(&self) -> usize {
        self.tables.depth()
    }

    /// Names declared in the innermost scope, sorted.
    pub fn innermost_names(&self) -> Vec<String> {
        self.tables.innermost_names()
    }

    pub fn resolves(&self, name: &str) -> bool {
        self.tables.resolves(name)
    }

    fn push_frame(&mut self, kind: FrameKind, braced: bool) {
        self.frames.push(Frame { kind, braced });
        self.tables.push();
    }

    fn pop_frame(&mut self) -> FrameKind {
        self.tables.pop();
        self.frames.pop().expect("pop on empty frame stack").kind
    }

    fn finish(&mut self, mut done: Completed) {
        loop {
            match done {
                Completed::IfLike => {
                    self.pending = Pending::IfChain;
                    return;
                }
                Completed::Do => {
                    self.pending = Pending::DoTail;
                    return;
                }
                Completed::Stmt => {}
            }
            match self.frames.last() {
                Some(f) if !f.braced => {
                    let kind = self.pop_frame();
                    done = kind.completes_as();
                }
                _ => return,
            }
        }
    }

    /// Settles an if-chain once it is clear no `else` follows.
    fn resolve_pending(&mut self, sym: SymbolKind) {
        if matches!(sym, SymbolKind::ElifStart | SymbolKind::ElseStart) {
            return;
        }
        while self.pending == Pending::IfChain {
            self.pending = Pending::None;
            self.finish(Completed::Stmt);
        }
    }

    fn apply(&mut self, sym: SymbolKind) -> Result<(), Dead> {
        use SymbolKind::*;
        match (self.expect, sym) {
            (Expect::Free, _) => {}
            (Expect::HeaderParens, TerminalParens) => {
                self.expect = Expect::Free;
                return Ok(());
            }
            (Expect::TailParens, TerminalParens) => {
                self.expect = Expect::TailSemi;
                return Ok(());
            }
            (Expect::Semi | Expect::TailSemi, Semi) => {
                self.expect = Expect::Free;
                self.finish(Completed::Stmt);
                return Ok(());
            }
            _ => return Err(Dead),
        }
        match std::mem::replace(&mut self.pending, Pending::None) {
            Pending::None => {}
            Pending::DoTail => {
                return if sym == WhileTailEnd {
                    self.expect = Expect::TailParens;
                    Ok(())
                } else {
                    Err(Dead)
                };
            }
            Pending::Signature(params) => {
                if sym != OpenBraceStart {
                    return Err(Dead);
                }
                self.push_frame(FrameKind::Function, true);
                self.pending = Pending::Signature(params);
                return Ok(());
            }
            Pending::IfChain => match sym {
                ElifStart => {
                    self.push_frame(FrameKind::Elif, false);
                    self.expect = Expect::HeaderParens;
                    return Ok(());
                }
                ElseStart => {
                    self.push_frame(FrameKind::Else, false);
                    return Ok(());
                }
                _ => unreachable!("if-chain is resolved before other symbols"),
            },
        }
        match sym {
            ForStart | WhileStart | IfStart => {
                let kind = match sym {
                    ForStart => FrameKind::For,
                    WhileStart => FrameKind::While,
                    _ => FrameKind::If,
                };
                self.push_frame(kind, false);
                self.expect = Expect::HeaderParens;
            }
            DoStart => self.push_frame(FrameKind::Do, false),
            ElifStart | ElseStart | TerminalParens => return Err(Dead),
            TerminalStmt | Prototype => self.expect = Expect::Semi,
            Semi => self.finish(Completed::Stmt),
            OpenBraceStart => match self.frames.last_mut() {
                Some(f) if !f.braced => f.braced = true,
                _ => self.push_frame(FrameKind::Block, true),
            },
            CloseBraceEnd => match self.frames.last() {
                Some(f) if f.braced => {
                    let kind = self.pop_frame();
                    self.finish(kind.completes_as());
                }
                _ => return Err(Dead),
            },
            FunctionHeaderStart => {
                if !self.frames.is_empty() {
                    return Err(Dead);
                }
                self.push_frame(FrameKind::Function, true);
            }
            ReturnType => {
                if !self.frames.is_empty() {
                    return Err(Dead);
                }
                // parameters are filled in from the configuration by extend
                self.pending = Pending::Signature(Arc::from(Vec::new()));
            }
            WhileTailEnd => self.expect = Expect::TailParens,
        }
        Ok(())
    }

    fn check_segment(&mut self, seg: &Segment, line: usize, first: &mut Option<Violation>) {
        let mut note = |kind, detail: &str| {
            if first.is_none() {
                *first = Some(Violation {
                    kind,
                    detail: detail.to_string(),
                    line,
                });
            }
        };
        for name in &seg.used {
            if !self.tables.resolves(name) {
                note(ViolationKind::UndeclaredUse, name);
            }
        }
        for name in &seg.functions {
            if !self.tables.declare(name, NameKind::Func) {
                note(ViolationKind::Redeclaration, name);
            }
        }
        for name in &seg.declared {
            if !self.tables.declare(name, NameKind::Var) {
                note(ViolationKind::Redeclaration, name);
            }
        }
    }

    /// Consumes one line. Checks run in a fixed order: grammar, then
    /// indentation, then symbol tables; the first failure is returned and
    /// `self` is left untouched.
    pub fn extend(&self, config: &Configuration, indent: u32, regime: Regime) -> Result<ScaffoldState, Violation> {
        let line = self.lines_done;
        let dead = |detail: String| Violation {
            kind: ViolationKind::GrammarDead,
            detail,
            line,
        };
        let mut s = self.clone();
        let mut symtable_violation = None;
        let mut open_at_start = None;
        let mut next_seg = 0;
        let check_names = regime == Regime::SymTable;

        for (j, &sym) in config.symbols.iter().enumerate() {
            s.resolve_pending(sym);
            while next_seg < config.segments.len() && config.segment_start(next_seg) == j {
                if check_names {
                    s.check_segment(&config.segments[next_seg], line, &mut symtable_violation);
                }
                next_seg += 1;
            }
            if open_at_start.is_none() && sym != SymbolKind::CloseBraceEnd {
                open_at_start = Some(s.open_scopes());
            }
            let opened_signature = matches!(s.pending, Pending::Signature(_)) && sym == SymbolKind::OpenBraceStart;
            s.apply(sym).map_err(|Dead| dead(format!("{sym:?}")))?;
            if sym == SymbolKind::ReturnType {
                s.pending = Pending::Signature(Arc::from(config.carried.clone()));
            }
            if opened_signature {
                if let Pending::Signature(params) = std::mem::replace(&mut s.pending, Pending::None) {
                    if check_names {
                        let seg = Segment {
                            declared: params.to_vec(),
                            ..Segment::default()
                        };
                        s.check_segment(&seg, line, &mut symtable_violation);
                    }
                }
            }
        }
        if check_names {
            for seg in &config.segments[next_seg.min(config.segments.len())..] {
                s.check_segment(seg, line, &mut symtable_violation);
            }
        }
        let open = open_at_start.unwrap_or(s.open_scopes());
        if open != indent as usize {
            return Err(Violation {
                kind: ViolationKind::IndentMismatch,
                detail: format!("{open} open scopes, indent {indent}"),
                line,
            });
        }
        if let Some(v) = symtable_violation {
            return Err(v);
        }
        s.lines_done += 1;
        Ok(s)
    }

    /// Whether a state that has consumed all `total_lines` lines is a
    /// complete program.
    pub fn is_complete(&self, total_lines: usize) -> Result<bool, ScaffoldError> {
        if self.lines_done != total_lines {
            return Err(ScaffoldError::Usage {
                done: self.lines_done,
                expected: total_lines,
            });
        }
        Ok(self.accepting())
    }

    fn accepting(&self) -> bool {
        self.frames.is_empty()
            && self.expect == Expect::Free
            && matches!(self.pending, Pending::None | Pending::IfChain)
    }

    fn incomplete(&self) -> Violation {
        Violation {
            kind: ViolationKind::IncompleteAtEnd,
            detail: format!("{} open scopes at end", self.open_scopes()),
            line: self.lines_done,
        }
    }
}

/// Counts verifier calls: one per line-level extend.
#[derive(Debug, Default)]
pub struct VerifierCounter(AtomicU64);

impl VerifierCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }
}

/// A regime paired with the call counter of one search.
#[derive(Debug)]
pub struct Verifier {
    pub regime: Regime,
    calls: VerifierCounter,
}

impl Verifier {
    pub fn new(regime: Regime) -> Self {
        Verifier {
            regime,
            calls: VerifierCounter::new(),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.get()
    }

    pub fn extend(&self, state: &ScaffoldState, config: &Configuration, indent: u32) -> Result<ScaffoldState, Violation> {
        self.calls.bump();
        state.extend(config, indent, self.regime)
    }

    /// A line whose piece failed to parse still costs one call.
    pub fn reject_unparseable(&self, line: usize, err: &ParseFailure) -> Violation {
        self.calls.bump();
        Violation {
            kind: ViolationKind::GrammarDead,
            detail: format!("unparseable piece: {err}"),
            line,
        }
    }
}

/// Per-line parsed configurations of every candidate of a problem.
#[derive(Debug, Clone)]
pub struct PreparedProblem {
    /// `configs[l][c]` is the configuration of candidate `c` on line `l`,
    /// or the parse failure that rejected it.
    pub configs: Vec<Vec<Result<Arc<Configuration>, ParseFailure>>>,
    pub indents: Vec<u32>,
}

impl PreparedProblem {
    pub fn new(problem: &Problem, opts: &ParserOptions) -> Self {
        let configs = problem
            .candidates
            .iter()
            .map(|slot| {
                slot.iter()
                    .map(|piece| parse_config(&piece.code, opts).map(Arc::new))
                    .collect()
            })
            .collect();
        PreparedProblem {
            configs,
            indents: problem.indents(),
        }
    }

    pub fn len(&self) -> usize {
        self.indents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indents.is_empty()
    }

    pub fn config(&self, line: usize, cand: usize) -> Result<&Configuration, &ParseFailure> {
        self.configs[line][cand].as_ref().map(|c| c.as_ref())
    }

    /// Folds extend over the chosen candidates and then checks completeness.
    pub fn check_choices(&self, choices: &[usize], verifier: &Verifier) -> Result<(), Violation> {
        let mut state = ScaffoldState::new();
        for (l, &c) in choices.iter().enumerate() {
            state = match self.config(l, c) {
                Ok(cfg) => verifier.extend(&state, cfg, self.indents[l])?,
                Err(e) => return Err(verifier.reject_unparseable(l, e)),
            };
        }
        if state.accepting() {
            Ok(())
        } else {
            Err(state.incomplete())
        }
    }
}

/// Checks a full program against a problem under `regime`.
pub fn check_program(program: &Program, problem: &Problem, regime: Regime) -> Result<(), Violation> {
    let prepared = PreparedProblem::new(problem, &ParserOptions::default());
    prepared.check_choices(&program.choices, &Verifier::new(regime))
}
