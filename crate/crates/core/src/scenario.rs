//! Scenario files.
//!
//! ```toml
//! label = "many-to-one"
//! K = 3
//! links = [[1, 1, 1], [2, 2, 1], [3, 3, 1], [1, 2, 1], [3, 2, 1]]
//! genie = false      # optional
//! gain_bound = 2     # optional, used by sweeps
//! ```
//!
//! Users are 1-based. Every direct link must be listed; duplicates and
//! out-of-range indices are rejected with the offending line.

use std::collections::BTreeSet;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::gf2::{MAX_ENUMERATION_LEVELS, MAX_LEVELS};
use crate::network::{GainMatrix, MAX_USERS};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    label: Option<String>,
    #[serde(rename = "K")]
    users: Spanned<usize>,
    links: Spanned<Vec<Spanned<Vec<Spanned<i64>>>>>,
    genie: Option<bool>,
    gain_bound: Option<Spanned<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub label: String,
    pub gains: GainMatrix,
    pub genie: bool,
    pub gain_bound: Option<usize>,
    pub warnings: Vec<String>,
}

fn line_of(src: &str, span: &Range<usize>) -> usize {
    src[..span.start.min(src.len())].matches('\n').count() + 1
}

fn parse_error(src: &str, span: &Range<usize>, field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line: Some(line_of(src, span)),
        field: Some(field.into()),
        message: message.into(),
    }
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Self> {
        Self::parse_with_default_label(src, "scenario")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: None,
            field: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("scenario");
        Self::parse_with_default_label(&src, stem)
    }

    fn parse_with_default_label(src: &str, default_label: &str) -> Result<Self> {
        let raw: RawScenario = toml::from_str(src).map_err(|e| Error::Parse {
            line: e.span().map(|s| line_of(src, &s)),
            field: None,
            message: e.message().trim().to_string(),
        })?;
        let k = *raw.users.get_ref();
        if k == 0 || k > MAX_USERS {
            return Err(parse_error(
                src,
                &raw.users.span(),
                "K",
                format!("K must be in 1..={MAX_USERS}, got {k}"),
            ));
        }
        let mut seen = BTreeSet::new();
        let mut links = Vec::new();
        for triple in raw.links.get_ref() {
            let span = triple.span();
            let values: Vec<i64> = triple.get_ref().iter().map(|v| *v.get_ref()).collect();
            let [t, r, g] = values[..] else {
                return Err(parse_error(
                    src,
                    &span,
                    "links",
                    format!("expected [tx, rx, gain], got {} values", values.len()),
                ));
            };
            for (name, v) in [("tx", t), ("rx", r)] {
                if v < 1 || v > k as i64 {
                    return Err(parse_error(
                        src,
                        &span,
                        "links",
                        format!("{name} index {v} outside 1..={k}"),
                    ));
                }
            }
            if g < 0 || g > MAX_LEVELS as i64 {
                return Err(parse_error(
                    src,
                    &span,
                    "links",
                    format!("gain {g} outside 0..={MAX_LEVELS}"),
                ));
            }
            let (t, r) = (t as usize - 1, r as usize - 1);
            if !seen.insert((t, r)) {
                return Err(parse_error(
                    src,
                    &span,
                    "links",
                    format!("duplicate link ({},{})", t + 1, r + 1),
                ));
            }
            links.push((t, r, g as usize));
        }
        if let Some(u) = (0..k).find(|u| !seen.contains(&(*u, *u))) {
            return Err(parse_error(
                src,
                &raw.links.span(),
                "links",
                format!("missing direct link ({},{})", u + 1, u + 1),
            ));
        }
        let gains = GainMatrix::from_links(k, &links)?;
        let mut warnings = Vec::new();
        if gains.levels() > MAX_ENUMERATION_LEVELS {
            warnings.push(format!(
                "q = {} exceeds {MAX_ENUMERATION_LEVELS}; oracle runs will be refused",
                gains.levels()
            ));
        }
        Ok(Self {
            label: raw.label.unwrap_or_else(|| default_label.to_string()),
            gains,
            genie: raw.genie.unwrap_or(false),
            gain_bound: raw.gain_bound.map(Spanned::into_inner),
            warnings,
        })
    }

    /// Renders the scenario back to the file format.
    pub fn to_toml(&self) -> String {
        let links: Vec<String> = self
            .gains
            .links()
            .map(|(t, r, g)| format!("[{}, {}, {g}]", t + 1, r + 1))
            .collect();
        let mut out = format!(
            "label = {:?}\nK = {}\nlinks = [{}]\n",
            self.label,
            self.gains.users(),
            links.join(", ")
        );
        if self.genie {
            out.push_str("genie = true\n");
        }
        if let Some(g) = self.gain_bound {
            out.push_str(&format!("gain_bound = {g}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_err(src: &str) -> (Option<usize>, String) {
        match Scenario::parse(src) {
            Err(Error::Parse { line, message, .. }) => (line, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_many_to_one() {
        let s = Scenario::parse(
            "label = \"e\"\nK = 3\nlinks = [[1,1,1],[2,2,1],[3,3,1],[1,2,1],[3,2,1]]\ngenie = true\n",
        )
        .unwrap();
        assert_eq!(s.label, "e");
        assert_eq!(s.gains.users(), 3);
        assert_eq!(s.gains.gain(2, 1), 1);
        assert!(s.genie);
        assert!(s.warnings.is_empty());
        assert_eq!(Scenario::parse(&s.to_toml()).unwrap(), s);
    }

    #[test]
    fn rejects_with_line_numbers() {
        let (line, msg) = parse_err("K = 2\nlinks = [\n [1,1,1],\n [2,2,1],\n [1,1,2],\n]\n");
        assert_eq!(line, Some(5));
        assert!(msg.contains("duplicate"), "{msg}");
        let (line, msg) = parse_err("K = 2\nlinks = [\n [1,1,1],\n [3,2,1],\n]\n");
        assert_eq!(line, Some(4));
        assert!(msg.contains("outside"), "{msg}");
        let (_, msg) = parse_err("K = 2\nlinks = [[1,1,1],[1,2,1]]\n");
        assert!(msg.contains("missing direct link (2,2)"), "{msg}");
        let (line, _) = parse_err("K = 2\nlinks = [[1,1,1],[2,2,1]]\ncolour = 1\n");
        assert_eq!(line, Some(3));
        let (_, msg) = parse_err("K = 1\nlinks = [[1,1]]\n");
        assert!(msg.contains("expected [tx, rx, gain]"), "{msg}");
    }

    #[test]
    fn warns_on_wide_channels() {
        let s = Scenario::parse("K = 1\nlinks = [[1,1,7]]\n").unwrap();
        assert_eq!(s.warnings.len(), 1);
    }
}
