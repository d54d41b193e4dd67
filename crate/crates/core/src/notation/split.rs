use alloc::string::String;
use alloc::vec::Vec;

/// One unit of a script: a statement (with its terminator) or an
/// expected-output annotation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    Statement {
        text: String,
        /// 1-based line where the statement starts.
        line: usize,
        /// Byte offset of the statement in the whole text.
        offset: usize,
    },
    /// A `#> ...` line; the text after the marker, trimmed.
    Expect { text: String, line: usize },
}

/// Incremental statement splitter. A statement ends at `;` or `.` outside
/// all brackets; lines whose first non-blank characters are `#` are
/// comments, and `#>` introduces an expected-output line.
#[derive(Clone, Debug, Default)]
pub struct Splitter {
    pending: String,
    pending_line: usize,
    pending_offset: usize,
    depth: i32,
    line: usize,
    offset: usize,
}

impl Splitter {
    pub fn new() -> Self {
        Splitter { line: 0, ..Default::default() }
    }

    /// True when a statement has been started but not terminated.
    pub fn is_incomplete(&self) -> bool {
        !self.pending.trim().is_empty()
    }

    /// Feeds one line (without its newline) and returns completed pieces.
    pub fn push_line(&mut self, line: &str) -> Vec<Piece> {
        self.line += 1;
        let line_offset = self.offset;
        self.offset += line.len() + 1;
        let mut out = Vec::new();
        let trimmed = line.trim_start();
        if self.pending.trim().is_empty() {
            if let Some(rest) = trimmed.strip_prefix("#>") {
                out.push(Piece::Expect { text: String::from(rest.trim()), line: self.line });
                return out;
            }
            if trimmed.starts_with('#') {
                return out;
            }
        }
        let bytes: Vec<(usize, char)> = line.char_indices().collect();
        let mut k = 0;
        while k < bytes.len() {
            let (pos, c) = bytes[k];
            if self.pending.trim().is_empty() {
                if c.is_whitespace() {
                    k += 1;
                    continue;
                }
                self.pending.clear();
                self.pending_line = self.line;
                self.pending_offset = line_offset + pos;
            }
            let escaped = k > 0 && bytes[k - 1].1 == '\\';
            self.pending.push(c);
            match c {
                _ if escaped => {}
                '{' | '(' | '[' => self.depth += 1,
                '}' | ')' | ']' => self.depth -= 1,
                '.' if self.depth <= 0 => {
                    // `..` inside ranges is always bracketed; a lone `.` ends
                    // a declaration unless it is followed by another dot.
                    let next = bytes.get(k + 1).map(|&(_, c)| c);
                    if next == Some('.') {
                        self.pending.push('.');
                        k += 2;
                        continue;
                    }
                    out.push(self.finish());
                }
                ';' if self.depth <= 0 => out.push(self.finish()),
                _ => {}
            }
            k += 1;
        }
        if !self.pending.trim().is_empty() {
            self.pending.push('\n');
        }
        out
    }

    /// Flushes an unterminated trailing statement, if any.
    pub fn finish_input(&mut self) -> Option<Piece> {
        if self.pending.trim().is_empty() {
            self.pending.clear();
            None
        } else {
            Some(self.finish())
        }
    }

    fn finish(&mut self) -> Piece {
        self.depth = 0;
        let text = core::mem::take(&mut self.pending);
        Piece::Statement { text: String::from(text.trim_end()), line: self.pending_line, offset: self.pending_offset }
    }
}

/// Splits a whole script into pieces.
pub fn split_script(src: &str) -> Vec<Piece> {
    let mut s = Splitter::new();
    let mut out = Vec::new();
    for line in src.lines() {
        out.extend(s.push_line(line));
    }
    out.extend(s.finish_input());
    out
}
