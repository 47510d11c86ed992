//! Minimal XML escaping shared by the response renderer and the snapshot writer.

use std::fmt::Write;

pub(crate) fn escape_text(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            _ => out.push(c),
        }
    }
}

pub(crate) fn escape_attr(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            // Attribute value normalization would fold these into spaces.
            '\n' | '\r' | '\t' => {
                let _ = write!(out, "&#{};", c as u32);
            }
            _ => out.push(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes() {
        let mut s = String::new();
        escape_attr(&mut s, "a\"<b>&\n");
        assert_eq!(s, "a&quot;&lt;b&gt;&amp;&#10;");
        let mut s = String::new();
        escape_text(&mut s, "<p>x & y</p>\"");
        assert_eq!(s, "&lt;p&gt;x &amp; y&lt;/p&gt;\"");
    }
}
