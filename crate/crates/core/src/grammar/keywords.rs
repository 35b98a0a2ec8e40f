//! Reserved words of the supported SQL subset.

/// Keywords the grammar understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Keyword {
    Select,
    From,
    Join,
    Inner,
    On,
    Where,
    And,
    Or,
    Group,
    Order,
    By,
    Asc,
    Desc,
    Limit,
    Like,
    True,
    False,
    Count,
    Sum,
    Avg,
    Min,
    Max,
}

impl Keyword {
    pub const ALL: [Keyword; 22] = [
        Keyword::Select,
        Keyword::From,
        Keyword::Join,
        Keyword::Inner,
        Keyword::On,
        Keyword::Where,
        Keyword::And,
        Keyword::Or,
        Keyword::Group,
        Keyword::Order,
        Keyword::By,
        Keyword::Asc,
        Keyword::Desc,
        Keyword::Limit,
        Keyword::Like,
        Keyword::True,
        Keyword::False,
        Keyword::Count,
        Keyword::Sum,
        Keyword::Avg,
        Keyword::Min,
        Keyword::Max,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Select => "SELECT",
            Keyword::From => "FROM",
            Keyword::Join => "JOIN",
            Keyword::Inner => "INNER",
            Keyword::On => "ON",
            Keyword::Where => "WHERE",
            Keyword::And => "AND",
            Keyword::Or => "OR",
            Keyword::Group => "GROUP",
            Keyword::Order => "ORDER",
            Keyword::By => "BY",
            Keyword::Asc => "ASC",
            Keyword::Desc => "DESC",
            Keyword::Limit => "LIMIT",
            Keyword::Like => "LIKE",
            Keyword::True => "TRUE",
            Keyword::False => "FALSE",
            Keyword::Count => "COUNT",
            Keyword::Sum => "SUM",
            Keyword::Avg => "AVG",
            Keyword::Min => "MIN",
            Keyword::Max => "MAX",
        }
    }

    /// Case-insensitive lookup of a complete word.
    pub fn lookup(word: &str) -> Option<Keyword> {
        Keyword::ALL
            .iter()
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(word))
    }
}

/// SQL words outside the subset. They are reserved so that a schema can never
/// shadow them, and the parser reports them as unsupported features.
pub const UNSUPPORTED_WORDS: &[&str] = &[
    "ALL",
    "ANY",
    "AS",
    "BETWEEN",
    "CASE",
    "CROSS",
    "DISTINCT",
    "ELSE",
    "END",
    "EXCEPT",
    "EXISTS",
    "FULL",
    "HAVING",
    "IN",
    "INTERSECT",
    "IS",
    "LEFT",
    "NATURAL",
    "NOT",
    "NULL",
    "OFFSET",
    "OUTER",
    "RIGHT",
    "SOME",
    "THEN",
    "UNION",
    "USING",
    "WHEN",
    "WITH",
];

pub fn is_unsupported_word(word: &str) -> bool {
    UNSUPPORTED_WORDS.iter().any(|w| w.eq_ignore_ascii_case(word))
}

pub fn is_reserved(word: &str) -> bool {
    Keyword::lookup(word).is_some() || is_unsupported_word(word)
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// A syntactically valid, non-reserved bare identifier.
pub fn is_valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) => {}
        _ => return false,
    }
    chars.all(is_ident_char) && !is_reserved(s)
}
