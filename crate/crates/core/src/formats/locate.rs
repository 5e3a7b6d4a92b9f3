//! Maps a field path back to a line of an already-parsed JSON document.

use super::Seg;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
        }
        Some(b)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
    }

    fn string(&mut self) -> Option<String> {
        if self.bump()? != b'"' {
            return None;
        }
        let start = self.pos;
        loop {
            match self.bump()? {
                b'"' => break,
                b'\\' => {
                    self.bump()?;
                }
                _ => {}
            }
        }
        // Keys of our formats are plain ASCII; escapes are kept verbatim.
        Some(String::from_utf8_lossy(&self.bytes[start..self.pos - 1]).into_owned())
    }

    fn skip_value(&mut self) -> Option<()> {
        self.skip_ws();
        match self.peek()? {
            b'"' => {
                self.string()?;
            }
            b'{' | b'[' => {
                let mut depth = 0usize;
                loop {
                    match self.peek()? {
                        b'"' => {
                            self.string()?;
                            continue;
                        }
                        b'{' | b'[' => depth += 1,
                        b'}' | b']' => {
                            depth -= 1;
                            if depth == 0 {
                                self.bump();
                                break;
                            }
                        }
                        _ => {}
                    }
                    self.bump();
                }
            }
            _ => {
                while !matches!(self.peek(), None | Some(b',' | b'}' | b']' | b' ' | b'\t' | b'\r' | b'\n')) {
                    self.bump();
                }
            }
        }
        Some(())
    }

    /// Advances to the element named by `seg` inside the current container.
    fn enter(&mut self, seg: &Seg) -> Option<()> {
        self.skip_ws();
        match (self.bump()?, seg) {
            (b'{', Seg::Key(key)) => loop {
                self.skip_ws();
                let name = self.string()?;
                self.skip_ws();
                if self.bump()? != b':' {
                    return None;
                }
                if name == *key {
                    return Some(());
                }
                self.skip_value()?;
                self.skip_ws();
                if self.bump()? != b',' {
                    return None;
                }
            },
            (b'[', Seg::Index(index)) => {
                for _ in 0..*index {
                    self.skip_value()?;
                    self.skip_ws();
                    if self.bump()? != b',' {
                        return None;
                    }
                }
                Some(())
            }
            _ => None,
        }
    }
}

/// 1-based line where the value at `path` starts, if the path exists.
pub(crate) fn line_of(text: &str, path: &[Seg]) -> Option<usize> {
    let mut cur = Cursor {
        bytes: text.as_bytes(),
        pos: 0,
        line: 1,
    };
    for seg in path {
        cur.enter(seg)?;
    }
    cur.skip_ws();
    Some(cur.line)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_nested_values() {
        let text = "{\n  \"n\": 5,\n  \"list\": [\n    {\"a\": \"x,]\"},\n    {\"a\": 1,\n     \"b\": [2, 3]}\n  ]\n}";
        assert_eq!(line_of(text, &[]), Some(1));
        assert_eq!(line_of(text, &[Seg::Key("n")]), Some(2));
        assert_eq!(line_of(text, &[Seg::Key("list"), Seg::Index(0)]), Some(4));
        assert_eq!(line_of(text, &[Seg::Key("list"), Seg::Index(1), Seg::Key("b")]), Some(6));
        assert_eq!(line_of(text, &[Seg::Key("list"), Seg::Index(2)]), None);
        assert_eq!(line_of(text, &[Seg::Key("missing")]), None);
    }
}
