//! Character-incremental viable-prefix recognition.
//!
//! A [`ParserState`] tracks a prefix of query text against the language of
//! queries that both parse and validate against one schema. The state is a
//! small lexer (the token being typed), a position in the grammar automaton
//! and the schema context gathered so far: tables named in FROM/JOIN, tables
//! used as column qualifiers and unqualified column names.
//!
//! A prefix is viable iff some completion parses and has no violations. The
//! grammar itself has no dead ends (every automaton state can be closed with
//! `*`, qualified column references and `=`), so viability reduces to two
//! questions: can the pending token be completed into one the automaton
//! accepts, and can the final FROM/JOIN table set be chosen so that every
//! qualifier is in scope and every unqualified column resolves to exactly one
//! table? The second is an exact-cover search over the schema's tables,
//! solved exactly by backtracking.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::grammar::keywords::{is_ident_char, is_ident_start, is_unsupported_word, Keyword};
use crate::grammar::{ColumnNameId, DataModelSchema, SchemaIndex, TableId};

use super::DecodeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Viability {
    /// A proper prefix of at least one valid query.
    Viable,
    /// A valid query in its own right (and possibly a prefix of longer ones).
    Complete,
    /// No continuation yields a valid query.
    Dead,
}

/// Incremental parse state. Cloning is cheap: the schema index is shared.
#[derive(Debug, Clone)]
pub struct ParserState {
    schema: Arc<SchemaIndex>,
    consumed: String,
    viability: Viability,
    core: Core,
}

pub fn init_state(schema: &DataModelSchema) -> ParserState {
    ParserState::new(Arc::new(schema.index()))
}

impl ParserState {
    pub fn new(schema: Arc<SchemaIndex>) -> Self {
        ParserState {
            schema,
            consumed: String::new(),
            viability: Viability::Viable,
            core: Core::default(),
        }
    }

    pub fn consumed_text(&self) -> &str {
        &self.consumed
    }

    pub fn viability(&self) -> Viability {
        self.viability
    }

    pub fn is_dead(&self) -> bool {
        self.viability == Viability::Dead
    }

    pub fn is_complete(&self) -> bool {
        self.viability == Viability::Complete
    }

    pub fn schema(&self) -> &Arc<SchemaIndex> {
        &self.schema
    }

    /// Consumes `chunk` and returns the resulting state.
    pub fn advance(&self, chunk: &str) -> Result<ParserState, DecodeError> {
        if self.is_dead() {
            return Err(DecodeError::DeadState);
        }
        let mut next = self.clone();
        next.push_str(chunk);
        Ok(next)
    }

    /// In-place [`advance`](Self::advance); a dead state stays dead.
    pub fn push_str(&mut self, chunk: &str) {
        for c in chunk.chars() {
            if !self.push_char_unsettled(c) {
                break;
            }
        }
        self.consumed.push_str(chunk);
        self.settle();
    }

    /// Consumes one character, tracking only the dead/alive distinction.
    /// Returns false once the state is dead. Call [`settle`](Self::settle)
    /// before reading [`viability`](Self::viability).
    pub(crate) fn push_char_unsettled(&mut self, c: char) -> bool {
        if self.is_dead() {
            return false;
        }
        let schema = &*self.schema;
        let alive = self.core.push_char(schema, c) && self.core.viable(schema);
        if !alive {
            self.viability = Viability::Dead;
        }
        alive
    }

    pub(crate) fn settle(&mut self) {
        if !self.is_dead() {
            self.viability = if self.core.complete(&self.schema) {
                Viability::Complete
            } else {
                Viability::Viable
            };
        }
    }

    /// A suffix that turns the consumed text into a complete query, or `None`
    /// for a dead state. Serves as a constructive witness of viability.
    pub fn completion(&self) -> Option<String> {
        if self.is_dead() {
            return None;
        }
        if self.is_complete() {
            return Some(String::new());
        }
        let schema = self.schema.clone();
        let mut out = self.core.finish_pending(&schema)?;
        out.push(' ');
        let mut st = self.clone();
        st.push_str(&out);
        if st.is_dead() {
            return None;
        }

        // Decide how an identifier awaiting a possible '.' is read.
        if let Gram::ColFirst {
            as_column, as_table, ..
        } = st.core.gram
        {
            let column_ok = as_column.is_some_and(|c| {
                let mut probe = st.core.clone();
                insert_sorted(&mut probe.unqualified, c);
                probe.satisfiable(&schema)
            });
            if !column_ok {
                let t = as_table?;
                let col = schema.columns_of(t)[0];
                let piece = format!(".{} ", schema.column_name(col));
                st.push_str(&piece);
                out.push_str(&piece);
            }
        }

        let mut planning = st.core.clone();
        if let Gram::ColFirst {
            place,
            as_column: Some(c),
            ..
        } = planning.gram
        {
            insert_sorted(&mut planning.unqualified, c);
            planning.gram = place.follow();
        }
        let mut plan = planning.table_plan(&schema)?;
        plan.reverse();

        for _ in 0..64 {
            let Some(tok) = st.core.canned_token(&schema, &mut plan) else {
                break;
            };
            out.push_str(&tok);
            out.push(' ');
            st.push_str(&tok);
            st.push_str(" ");
            if st.is_dead() {
                return None;
            }
        }
        st.is_complete().then_some(out)
    }
}

/// Where a column reference sits; decides the automaton state after it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Place {
    Select,
    SelectAgg,
    OnLeft,
    OnRight,
    WhereLhs,
    WhereRhs,
    Group,
    Order,
    OrderAgg,
}

impl Place {
    fn follow(self) -> Gram {
        match self {
            Place::Select => Gram::SelectNext,
            Place::SelectAgg => Gram::AggClose(AggAt::Select),
            Place::OnLeft => Gram::OnEq,
            Place::OnRight => Gram::AfterTable,
            Place::WhereLhs => Gram::CondOp,
            Place::WhereRhs => Gram::CondAfter,
            Place::Group => Gram::GroupNext,
            Place::Order => Gram::OrderNext,
            Place::OrderAgg => Gram::AggClose(AggAt::Order),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum AggAt {
    Select,
    Order,
}

impl AggAt {
    fn arg_place(self) -> Place {
        match self {
            AggAt::Select => Place::SelectAgg,
            AggAt::Order => Place::OrderAgg,
        }
    }

    fn after(self) -> Gram {
        match self {
            AggAt::Select => Gram::SelectNext,
            AggAt::Order => Gram::OrderNext,
        }
    }
}

/// Grammar automaton position, between tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
enum Gram {
    #[default]
    Start,
    SelectItem,
    SelectNext,
    AggOpen(AggAt),
    AggArg(AggAt),
    AggClose(AggAt),
    /// Expecting a column reference.
    ColStart(Place),
    /// Saw an identifier that may be a column or, if a '.' follows, a table.
    ColFirst {
        place: Place,
        as_column: Option<ColumnNameId>,
        as_table: Option<TableId>,
    },
    ColDot(Place, TableId),
    FromTable,
    AfterTable,
    InnerJoin,
    JoinTable,
    JoinOn,
    OnEq,
    CondStart,
    CondOp,
    CondRhs,
    CondAfter,
    GroupBy,
    GroupNext,
    OrderBy,
    OrderItem,
    OrderNext,
    OrderNextDir,
    Limit,
    LimitDone,
    Done,
}

/// The token being typed.
#[derive(Debug, Clone, Default, PartialEq)]
enum Pending {
    #[default]
    None,
    Word(String),
    /// Optional '-', digits, optional '.' and digits.
    Number(String),
    /// Inside a string literal.
    Str,
    /// Saw a quote inside a string: either the closing quote or half of `''`.
    StrQuote,
    Lt,
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Word(&'a str),
    Int(i64),
    Real,
    Str,
    Star,
    Comma,
    Dot,
    LParen,
    RParen,
    Eq,
    /// Any comparison operator other than '=' and LIKE.
    Cmp,
    End,
}

#[derive(Debug, Clone, Default)]
struct Core {
    lex: Pending,
    gram: Gram,
    depth: u32,
    /// No more tables can be added (WHERE, GROUP, ORDER, LIMIT or end seen).
    closed: bool,
    scope: Vec<TableId>,
    required: Vec<TableId>,
    unqualified: Vec<ColumnNameId>,
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(i) = v.binary_search(&x) {
        v.insert(i, x);
    }
}

impl Core {
    fn push_char(&mut self, schema: &SchemaIndex, c: char) -> bool {
        match std::mem::take(&mut self.lex) {
            Pending::None => self.start_token(schema, c),
            Pending::Word(mut w) => {
                if is_ident_char(c) {
                    w.push(c);
                    self.lex = Pending::Word(w);
                    true
                } else {
                    self.feed(schema, Tok::Word(&w)) && self.start_token(schema, c)
                }
            }
            Pending::Number(mut n) => {
                if c.is_ascii_digit() {
                    n.push(c);
                    self.lex = Pending::Number(n);
                    true
                } else if c == '.' {
                    if n.contains('.') || n == "-" {
                        return false;
                    }
                    n.push(c);
                    self.lex = Pending::Number(n);
                    true
                } else if is_ident_char(c) {
                    false
                } else {
                    match number_token(&n) {
                        Some(tok) => self.feed(schema, tok) && self.start_token(schema, c),
                        None => false,
                    }
                }
            }
            Pending::Str => {
                self.lex = if c == '\'' { Pending::StrQuote } else { Pending::Str };
                true
            }
            Pending::StrQuote => {
                if c == '\'' {
                    self.lex = Pending::Str;
                    true
                } else {
                    self.feed(schema, Tok::Str) && self.start_token(schema, c)
                }
            }
            Pending::Lt => match c {
                '=' | '>' => self.feed(schema, Tok::Cmp),
                _ => self.feed(schema, Tok::Cmp) && self.start_token(schema, c),
            },
            Pending::Gt => match c {
                '=' => self.feed(schema, Tok::Cmp),
                _ => self.feed(schema, Tok::Cmp) && self.start_token(schema, c),
            },
        }
    }

    fn start_token(&mut self, schema: &SchemaIndex, c: char) -> bool {
        if c.is_whitespace() {
            return true;
        }
        if is_ident_start(c) {
            self.lex = Pending::Word(c.to_string());
            return true;
        }
        if c.is_ascii_digit() || c == '-' {
            self.lex = Pending::Number(c.to_string());
            return true;
        }
        let tok = match c {
            '\'' => {
                self.lex = Pending::Str;
                return true;
            }
            '<' => {
                self.lex = Pending::Lt;
                return true;
            }
            '>' => {
                self.lex = Pending::Gt;
                return true;
            }
            '=' => Tok::Eq,
            '*' => Tok::Star,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => return false,
        };
        self.feed(schema, tok)
    }

    /// Applies one complete token to the automaton. False means rejection.
    fn feed(&mut self, schema: &SchemaIndex, tok: Tok<'_>) -> bool {
        let kw = match tok {
            Tok::Word(w) => {
                if is_unsupported_word(w) {
                    return false;
                }
                Keyword::lookup(w)
            }
            _ => None,
        };
        let ident = match tok {
            Tok::Word(w) if kw.is_none() => Some(w),
            _ => None,
        };

        if let Gram::ColFirst {
            place,
            as_column,
            as_table,
        } = self.gram
        {
            if tok == Tok::Dot {
                let Some(t) = as_table else { return false };
                insert_sorted(&mut self.required, t);
                self.gram = Gram::ColDot(place, t);
                return true;
            }
            let Some(c) = as_column else { return false };
            insert_sorted(&mut self.unqualified, c);
            self.gram = place.follow();
        }

        let next = match (self.gram, tok, kw) {
            (Gram::Start, _, Some(Keyword::Select)) => Gram::SelectItem,

            (Gram::SelectItem, Tok::Star, _) => Gram::SelectNext,
            (Gram::SelectItem, _, Some(k)) if agg_keyword(k) => Gram::AggOpen(AggAt::Select),
            (Gram::SelectItem, _, None) if ident.is_some() => {
                return self.start_column(schema, Place::Select, ident.unwrap())
            }
            (Gram::SelectNext, Tok::Comma, _) => Gram::SelectItem,
            (Gram::SelectNext, _, Some(Keyword::From)) => Gram::FromTable,

            (Gram::AggOpen(at), Tok::LParen, _) => Gram::AggArg(at),
            (Gram::AggArg(at), Tok::Star, _) => Gram::AggClose(at),
            (Gram::AggArg(at), _, None) if ident.is_some() => {
                return self.start_column(schema, at.arg_place(), ident.unwrap())
            }
            (Gram::AggClose(at), Tok::RParen, _) => at.after(),

            (Gram::ColStart(place), _, None) if ident.is_some() => {
                return self.start_column(schema, place, ident.unwrap())
            }
            (Gram::ColDot(place, t), _, None) if ident.is_some() => match schema.column_id(ident.unwrap()) {
                Some(c) if schema.table_has_column(t, c) => place.follow(),
                _ => return false,
            },

            (Gram::FromTable | Gram::JoinTable, _, None) if ident.is_some() => {
                let Some(t) = schema.table_id(ident.unwrap()) else {
                    return false;
                };
                insert_sorted(&mut self.scope, t);
                if self.gram == Gram::FromTable {
                    Gram::AfterTable
                } else {
                    Gram::JoinOn
                }
            }
            (Gram::AfterTable, _, Some(Keyword::Join)) => Gram::JoinTable,
            (Gram::AfterTable, _, Some(Keyword::Inner)) => Gram::InnerJoin,
            (Gram::InnerJoin, _, Some(Keyword::Join)) => Gram::JoinTable,
            (Gram::JoinOn, _, Some(Keyword::On)) => Gram::ColStart(Place::OnLeft),
            (Gram::OnEq, Tok::Eq, _) => Gram::ColStart(Place::OnRight),

            (Gram::AfterTable, _, Some(Keyword::Where)) => {
                self.closed = true;
                Gram::CondStart
            }
            (Gram::CondStart, Tok::LParen, _) => {
                self.depth += 1;
                Gram::CondStart
            }
            (Gram::CondStart, _, None) if ident.is_some() => {
                return self.start_column(schema, Place::WhereLhs, ident.unwrap())
            }
            (Gram::CondOp, Tok::Eq | Tok::Cmp, _) => Gram::CondRhs,
            (Gram::CondOp, _, Some(Keyword::Like)) => Gram::CondRhs,
            (Gram::CondRhs, Tok::Int(_) | Tok::Real | Tok::Str, _) => Gram::CondAfter,
            (Gram::CondRhs, _, Some(Keyword::True | Keyword::False)) => Gram::CondAfter,
            (Gram::CondRhs, _, None) if ident.is_some() => {
                return self.start_column(schema, Place::WhereRhs, ident.unwrap())
            }
            (Gram::CondAfter, _, Some(Keyword::And | Keyword::Or)) => Gram::CondStart,
            (Gram::CondAfter, Tok::RParen, _) if self.depth > 0 => {
                self.depth -= 1;
                Gram::CondAfter
            }

            (Gram::AfterTable | Gram::CondAfter, _, Some(Keyword::Group)) if self.depth == 0 => {
                self.closed = true;
                Gram::GroupBy
            }
            (Gram::GroupBy, _, Some(Keyword::By)) => Gram::ColStart(Place::Group),
            (Gram::GroupNext, Tok::Comma, _) => Gram::ColStart(Place::Group),

            (Gram::AfterTable | Gram::CondAfter | Gram::GroupNext, _, Some(Keyword::Order)) if self.depth == 0 => {
                self.closed = true;
                Gram::OrderBy
            }
            (Gram::OrderBy, _, Some(Keyword::By)) => Gram::OrderItem,
            (Gram::OrderItem, _, Some(k)) if agg_keyword(k) => Gram::AggOpen(AggAt::Order),
            (Gram::OrderItem, _, None) if ident.is_some() => {
                return self.start_column(schema, Place::Order, ident.unwrap())
            }
            (Gram::OrderNext, _, Some(Keyword::Asc | Keyword::Desc)) => Gram::OrderNextDir,
            (Gram::OrderNext | Gram::OrderNextDir, Tok::Comma, _) => Gram::OrderItem,

            (
                Gram::AfterTable | Gram::CondAfter | Gram::GroupNext | Gram::OrderNext | Gram::OrderNextDir,
                _,
                Some(Keyword::Limit),
            ) if self.depth == 0 => {
                self.closed = true;
                Gram::Limit
            }
            (Gram::Limit, Tok::Int(n), _) if n >= 0 => Gram::LimitDone,

            (
                Gram::AfterTable
                | Gram::CondAfter
                | Gram::GroupNext
                | Gram::OrderNext
                | Gram::OrderNextDir
                | Gram::LimitDone,
                Tok::End,
                _,
            ) if self.depth == 0 => {
                self.closed = true;
                Gram::Done
            }
            _ => return false,
        };
        self.gram = next;
        true
    }

    fn start_column(&mut self, schema: &SchemaIndex, place: Place, word: &str) -> bool {
        let as_column = schema.column_id(word);
        let as_table = schema.table_id(word);
        if as_column.is_none() && as_table.is_none() {
            return false;
        }
        self.gram = Gram::ColFirst {
            place,
            as_column,
            as_table,
        };
        true
    }

    /// Whether some completion exists, given the current lexer state.
    fn viable(&self, schema: &SchemaIndex) -> bool {
        match &self.lex {
            Pending::None => self.settled_viable(schema),
            Pending::Word(prefix) => word_candidates(schema, prefix).any(|w| {
                let mut probe = self.without_pending();
                probe.feed(schema, Tok::Word(w)) && probe.settled_viable(schema)
            }),
            Pending::Number(n) => number_candidates(n).into_iter().flatten().any(|tok| {
                let mut probe = self.without_pending();
                probe.feed(schema, tok) && probe.settled_viable(schema)
            }),
            Pending::Str | Pending::StrQuote => {
                let mut probe = self.without_pending();
                probe.feed(schema, Tok::Str) && probe.settled_viable(schema)
            }
            Pending::Lt | Pending::Gt => {
                let mut probe = self.without_pending();
                probe.feed(schema, Tok::Cmp) && probe.settled_viable(schema)
            }
        }
    }

    fn without_pending(&self) -> Core {
        Core {
            lex: Pending::None,
            gram: self.gram,
            depth: self.depth,
            closed: self.closed,
            scope: self.scope.clone(),
            required: self.required.clone(),
            unqualified: self.unqualified.clone(),
        }
    }

    /// Viability between tokens.
    fn settled_viable(&self, schema: &SchemaIndex) -> bool {
        match self.gram {
            Gram::ColFirst {
                as_column, as_table, ..
            } => {
                as_column.is_some_and(|c| {
                    let mut probe = self.clone();
                    insert_sorted(&mut probe.unqualified, c);
                    probe.satisfiable(schema)
                }) || as_table.is_some_and(|t| {
                    let mut probe = self.clone();
                    insert_sorted(&mut probe.required, t);
                    probe.satisfiable(schema)
                })
            }
            _ => self.satisfiable(schema),
        }
    }

    /// Whether the text consumed so far is itself a valid query.
    fn complete(&self, schema: &SchemaIndex) -> bool {
        let mut probe = self.without_pending();
        let accepted = match &self.lex {
            Pending::None => true,
            Pending::Word(w) => probe.feed(schema, Tok::Word(w)),
            Pending::Number(n) => number_token(n).is_some_and(|tok| probe.feed(schema, tok)),
            Pending::Str => false,
            Pending::StrQuote => probe.feed(schema, Tok::Str),
            Pending::Lt | Pending::Gt => probe.feed(schema, Tok::Cmp),
        };
        accepted && probe.feed(schema, Tok::End) && probe.satisfiable(schema)
    }

    /// Whether FROM/JOIN tables can be chosen (or, once closed, have been
    /// chosen) so that all column references are valid.
    fn satisfiable(&self, schema: &SchemaIndex) -> bool {
        if self.closed {
            let in_scope = |t: &TableId| self.scope.binary_search(t).is_ok();
            return self.required.iter().all(in_scope)
                && self
                    .unqualified
                    .iter()
                    .all(|&c| schema.tables_with_column(c).iter().filter(|t| in_scope(t)).count() == 1);
        }
        self.cover_tables(schema).is_some()
    }

    /// Tables to add to the current scope (qualifiers first, then an exact
    /// cover of the unresolved unqualified columns). `None` if impossible.
    fn cover_tables(&self, schema: &SchemaIndex) -> Option<Vec<TableId>> {
        let mut base = self.scope.clone();
        for &t in &self.required {
            insert_sorted(&mut base, t);
        }
        let mut uncovered = Vec::new();
        let mut covered = Vec::new();
        for &c in &self.unqualified {
            let hits = schema
                .tables_with_column(c)
                .iter()
                .filter(|t| base.binary_search(t).is_ok())
                .count();
            match hits {
                0 => uncovered.push(c),
                1 => covered.push(c),
                _ => return None,
            }
        }
        let mut added: Vec<TableId> = self
            .required
            .iter()
            .copied()
            .filter(|t| self.scope.binary_search(t).is_err())
            .collect();
        if uncovered.is_empty() {
            return Some(added);
        }
        // Candidate tables and the uncovered columns each would resolve.
        let candidates: Vec<(TableId, Vec<usize>)> = (0..schema.table_count())
            .filter(|t| base.binary_search(t).is_err())
            .filter(|&t| !covered.iter().any(|&c| schema.table_has_column(t, c)))
            .filter_map(|t| {
                let hits: Vec<usize> = uncovered
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| schema.table_has_column(t, c))
                    .map(|(i, _)| i)
                    .collect();
                (!hits.is_empty()).then_some((t, hits))
            })
            .collect();
        let mut done = vec![false; uncovered.len()];
        let mut chosen = Vec::new();
        if exact_cover(&candidates, &mut done, &mut chosen) {
            added.extend(chosen);
            Some(added)
        } else {
            None
        }
    }

    /// Tables a completion still has to mention, in FROM/JOIN order.
    fn table_plan(&self, schema: &SchemaIndex) -> Option<Vec<TableId>> {
        if self.closed {
            return Some(Vec::new());
        }
        let mut plan = self.cover_tables(schema)?;
        if plan.is_empty() && self.scope.is_empty() {
            plan.push(0);
        }
        Some(plan)
    }

    /// Completes the pending token; returns the characters to append.
    fn finish_pending(&self, schema: &SchemaIndex) -> Option<String> {
        let ok = |tok: Tok<'_>| {
            let mut probe = self.without_pending();
            probe.feed(schema, tok) && probe.settled_viable(schema)
        };
        match &self.lex {
            Pending::None | Pending::StrQuote | Pending::Lt | Pending::Gt => Some(String::new()),
            Pending::Str => Some("'".to_string()),
            Pending::Word(prefix) => word_candidates(schema, prefix)
                .find(|w| ok(Tok::Word(w)))
                .map(|w| w[prefix.len()..].to_string()),
            Pending::Number(n) => {
                let [int, real] = number_candidates(n);
                if int.is_some_and(ok) {
                    Some(if n == "-" { "1".into() } else { String::new() })
                } else if real.is_some_and(ok) {
                    Some(if n == "-" {
                        "1.0".into()
                    } else if n.ends_with('.') {
                        "0".into()
                    } else if n.contains('.') {
                        String::new()
                    } else {
                        ".0".into()
                    })
                } else {
                    None
                }
            }
        }
    }

    /// Next token text on a shortest path to acceptance, or `None` when the
    /// automaton can accept right here. `plan` is a stack of tables still to
    /// be named.
    fn canned_token(&self, schema: &SchemaIndex, plan: &mut Vec<TableId>) -> Option<String> {
        let qualified = |t: TableId| {
            format!(
                "{}.{}",
                schema.table_name(t),
                schema.column_name(schema.columns_of(t)[0])
            )
        };
        let any_in_scope = || self.scope[0];
        let gram = match self.gram {
            Gram::ColFirst { place, .. } => place.follow(),
            g => g,
        };
        let tok = match gram {
            Gram::Start => "SELECT".to_string(),
            Gram::SelectItem => "*".to_string(),
            Gram::SelectNext => "FROM".to_string(),
            Gram::AggOpen(_) => "(".to_string(),
            Gram::AggArg(_) => "*".to_string(),
            Gram::AggClose(_) => ")".to_string(),
            Gram::ColStart(_) | Gram::CondStart | Gram::CondRhs | Gram::OrderItem => qualified(any_in_scope()),
            Gram::ColDot(_, t) => schema.column_name(schema.columns_of(t)[0]).to_string(),
            Gram::FromTable => schema.table_name(plan.pop().unwrap_or(0)).to_string(),
            Gram::AfterTable if !plan.is_empty() => "JOIN".to_string(),
            Gram::InnerJoin => "JOIN".to_string(),
            Gram::JoinTable => schema.table_name(plan.pop().unwrap_or_else(any_in_scope)).to_string(),
            Gram::JoinOn => "ON".to_string(),
            Gram::OnEq | Gram::CondOp => "=".to_string(),
            Gram::CondAfter if self.depth > 0 => ")".to_string(),
            Gram::GroupBy | Gram::OrderBy => "BY".to_string(),
            Gram::Limit => "0".to_string(),
            Gram::AfterTable
            | Gram::CondAfter
            | Gram::GroupNext
            | Gram::OrderNext
            | Gram::OrderNextDir
            | Gram::LimitDone
            | Gram::Done => return None,
            Gram::ColFirst { .. } => unreachable!("replaced by its follow state"),
        };
        Some(tok)
    }
}

fn agg_keyword(k: Keyword) -> bool {
    matches!(
        k,
        Keyword::Count | Keyword::Sum | Keyword::Avg | Keyword::Min | Keyword::Max
    )
}

/// Complete words (keywords and schema names) that extend `prefix`,
/// compared case-insensitively.
fn word_candidates<'a>(schema: &'a SchemaIndex, prefix: &'a str) -> impl Iterator<Item = &'a str> {
    let starts =
        move |w: &str| w.len() >= prefix.len() && w.as_bytes()[..prefix.len()].eq_ignore_ascii_case(prefix.as_bytes());
    Keyword::ALL
        .iter()
        .map(|k| k.as_str())
        .chain(schema.table_names.iter().map(String::as_str))
        .chain(schema.column_names.iter().map(String::as_str))
        .filter(move |w| starts(w))
}

/// The token a finished number lexes to; `None` when malformed or out of range.
fn number_token(n: &str) -> Option<Tok<'static>> {
    if n == "-" || n.ends_with('.') {
        return None;
    }
    if n.contains('.') {
        n.parse::<f64>().ok().filter(|x| x.is_finite()).map(|_| Tok::Real)
    } else {
        n.parse::<i64>().ok().map(Tok::Int)
    }
}

/// Integer and decimal tokens a partial number can still become.
fn number_candidates(n: &str) -> [Option<Tok<'static>>; 2] {
    let int = if n.contains('.') {
        None
    } else if n == "-" {
        Some(Tok::Int(-1))
    } else {
        n.parse::<i64>().ok().map(Tok::Int)
    };
    let shortest_real = if n == "-" {
        "-1.0".to_string()
    } else if n.ends_with('.') {
        format!("{n}0")
    } else if n.contains('.') {
        n.to_string()
    } else {
        format!("{n}.0")
    };
    let real = shortest_real
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .map(|_| Tok::Real);
    [int, real]
}

/// Backtracking exact cover: every position in `done` covered exactly once
/// by disjoint candidate rows.
fn exact_cover(candidates: &[(TableId, Vec<usize>)], done: &mut [bool], chosen: &mut Vec<TableId>) -> bool {
    let Some(first) = done.iter().position(|d| !d) else {
        return true;
    };
    for (t, hits) in candidates {
        if !hits.contains(&first) || hits.iter().any(|&h| done[h]) {
            continue;
        }
        for &h in hits {
            done[h] = true;
        }
        chosen.push(*t);
        if exact_cover(candidates, done, chosen) {
            return true;
        }
        chosen.pop();
        for &h in hits {
            done[h] = false;
        }
    }
    false
}
