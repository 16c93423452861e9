//! Random buffers, edits and generated programs.

use rand::Rng;

/// Fragments that recombine into plausible and broken MiniML.
pub const SNIPPETS: &[&str] = &[
    "let ", "rec ", "x", "y", "f", "lst", " = ", "1", "42", " + ", " * ", " - ", " < ", "(", ")", "\n", "  ",
    "match ", " with ", "| ", "Some ", "None", "Nil", "Cons ", " -> ", "fun ", " in ", "if ", " then ", " else ",
    "\"s\"", "\"a\\\"b\"", "\"open", "true", "false", "type ", "'a ", " of ", "int", "module ", "M", "struct ",
    " end", ".", ";;", "(* c *)", "(* (* n *) *)", "(*", ":", " _ ", "map ", "é", "#", "\t",
];

pub fn random_buffer(rng: &mut impl Rng, max_pieces: usize) -> String {
    let n = rng.gen_range(0..=max_pieces);
    (0..n).map(|_| SNIPPETS[rng.gen_range(0..SNIPPETS.len())]).collect()
}

fn boundary(s: &str, mut i: usize) -> usize {
    while !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

/// A random insertion, deletion or replacement. Returns the new buffer and
/// `(offset, removed_len, inserted_len)`.
pub fn random_edit(rng: &mut impl Rng, s: &str) -> (String, (usize, usize, usize)) {
    let at = boundary(s, rng.gen_range(0..=s.len()));
    let end = boundary(s, (at + rng.gen_range(0..=6)).min(s.len())).max(at);
    let (removed, inserted) = match rng.gen_range(0..3) {
        0 => (0, SNIPPETS[rng.gen_range(0..SNIPPETS.len())].to_string()),
        1 => (end - at, String::new()),
        _ => (end - at, SNIPPETS[rng.gen_range(0..SNIPPETS.len())].to_string()),
    };
    let mut out = String::with_capacity(s.len() + inserted.len());
    out.push_str(&s[..at]);
    out.push_str(&inserted);
    out.push_str(&s[at + removed..]);
    (out, (at, removed, inserted.len()))
}

/// A valid buffer of `n` phrases; the last one is `let last = v{n-2} + 1`.
pub fn many_phrases(n: usize) -> String {
    let mut s = String::from("let v0 = 0\n");
    for i in 1..n - 1 {
        match i % 4 {
            0 => s.push_str(&format!("let v{i} = v{} + {i}\n", i - 1)),
            1 => s.push_str(&format!("let v{i} = if v{} < {i} then {i} else v{}\n", i - 1, i - 1)),
            2 => s.push_str(&format!("let v{i} = (fun z -> z * 2) v{}\n", i - 1)),
            _ => s.push_str(&format!("let v{i} = match Some v{} with | None -> 0 | Some w -> w\n", i - 1)),
        }
    }
    s.push_str(&format!("let last = v{} + 1", n - 2));
    s
}
