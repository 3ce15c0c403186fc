//! Mutation fuzzing for the text format.

use causal_control::{parse, serialize, validate};
use rand::seq::IndexedRandom;
use rand::Rng;

const PIECES: &[&str] = &[
    "var ", "noise ", "assign ", "nonintervenable ", " in ", "{", "}", "(", ")", ",", ":", "~", ":=", "+", "-",
    "*", "/", " mod ", "==", "!=", "<", "<=", ">", ">=", "if ", " then ", " else ", "bernoulli", "categorical",
    "point", "uniform", "0", "1", "2", "-1", "3/8", "0.25", "1/0", "99999999999999999999", "X", "Y", "N", "#",
    "\n", " ", "=", "!", "é", "\t", "((((((((", "))))",
];

/// A random mutation of `seed_text`: pieces inserted, characters removed or
/// lines shuffled.
pub fn mutate<R: Rng>(seed_text: &str, rng: &mut R) -> String {
    let mut chars: Vec<char> = seed_text.chars().collect();
    for _ in 0..rng.random_range(1..=6) {
        match rng.random_range(0..4) {
            0 if !chars.is_empty() => {
                let i = rng.random_range(0..chars.len());
                let len = rng.random_range(1..=4).min(chars.len() - i);
                chars.drain(i..i + len);
            }
            1 => {
                let i = rng.random_range(0..=chars.len());
                let piece = PIECES.choose(rng).unwrap();
                chars.splice(i..i, piece.chars());
            }
            2 if !chars.is_empty() => {
                let i = rng.random_range(0..chars.len());
                chars[i] = char::from(rng.random_range(0x20u8..0x7f));
            }
            _ => {
                let text: String = chars.iter().collect();
                let mut lines: Vec<&str> = text.lines().collect();
                if lines.len() > 1 {
                    let a = rng.random_range(0..lines.len());
                    let b = rng.random_range(0..lines.len());
                    lines.swap(a, b);
                }
                chars = lines.join("\n").chars().collect();
            }
        }
    }
    chars.into_iter().collect()
}

/// Random concatenation of grammar pieces.
pub fn soup<R: Rng>(rng: &mut R) -> String {
    (0..rng.random_range(0..40)).map(|_| *PIECES.choose(rng).unwrap()).collect()
}

/// Parses `text` and checks the outcome: a valid model that survives a text
/// round-trip, or diagnostics that all point inside the input.
pub fn check(text: &str) -> Result<bool, String> {
    let lines = text.lines().count().max(1);
    match parse(text) {
        Ok(scm) => {
            if !validate(&scm).is_valid() {
                return Err(format!("accepted an invalid model:\n{text}"));
            }
            if parse(&serialize(&scm)).as_ref() != Ok(&scm) {
                return Err(format!("round trip changed the model:\n{text}"));
            }
            Ok(true)
        }
        Err(diags) => {
            if diags.0.is_empty() {
                return Err(format!("empty diagnostics:\n{text}"));
            }
            for d in &diags.0 {
                let width = text.lines().nth(d.line - 1).map_or(0, |l| l.chars().count());
                if d.line == 0 || d.line > lines || d.column == 0 || d.column > width + 1 {
                    return Err(format!("diagnostic {d} outside the input:\n{text}"));
                }
            }
            Ok(false)
        }
    }
}
