//! Deterministic tokenizer and sentence splitter with exact character offsets.

use super::{Sentence, Span, Token};

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Splits text on whitespace, then peels leading and trailing punctuation
/// characters off each chunk into their own single-character tokens. Interior
/// punctuation (hyphens, decimal points, apostrophes) stays attached.
///
/// Offsets are character offsets into `text`; tokens cover exactly the
/// non-whitespace content.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        push_chunk(&chars, start, i, &mut tokens);
    }
    tokens
}

fn push_chunk(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let mut s = start;
    let mut e = end;
    while s < e && is_punct(chars[s]) {
        out.push(single(chars, s));
        s += 1;
    }
    let mut trailing = Vec::new();
    while e > s && is_punct(chars[e - 1]) {
        trailing.push(e - 1);
        e -= 1;
    }
    if s < e {
        out.push(Token {
            text: chars[s..e].iter().collect(),
            span: Span { start: s, end: e },
        });
    }
    for &p in trailing.iter().rev() {
        out.push(single(chars, p));
    }
}

fn single(chars: &[char], at: usize) -> Token {
    Token {
        text: chars[at].to_string(),
        span: Span {
            start: at,
            end: at + 1,
        },
    }
}

/// Groups tokens into sentences. A boundary falls after a token ending in
/// `.`, `!`, or `?` when the next token starts with an uppercase letter or a
/// digit and at least one whitespace character separates them, and after any
/// inter-token gap containing a blank line.
pub fn split_sentences(text: &str, tokens: &[Token]) -> Vec<Sentence> {
    if tokens.is_empty() {
        return Vec::new();
    }
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut first = 0;
    for i in 0..tokens.len() {
        let boundary = if i + 1 == tokens.len() {
            true
        } else {
            let gap = &chars[tokens[i].span.end..tokens[i + 1].span.start];
            let blank_line = gap.iter().filter(|c| **c == '\n').count() >= 2;
            let terminated = matches!(tokens[i].text.chars().last(), Some('.' | '!' | '?'));
            let next = tokens[i + 1].text.chars().next().unwrap_or(' ');
            blank_line || (terminated && !gap.is_empty() && (next.is_uppercase() || next.is_numeric()))
        };
        if boundary {
            sentences.push(Sentence {
                span: Span {
                    start: tokens[first].span.start,
                    end: tokens[i].span.end,
                },
                token_range: first..i + 1,
            });
            first = i + 1;
        }
    }
    sentences
}
