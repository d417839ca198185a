use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Concern dimension of a contract. Declaration order is priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Facet {
    Data,
    Safety,
    Functionality,
    Attainability,
    Liveness,
}

impl Facet {
    pub const ALL: [Facet; 5] = [
        Facet::Data,
        Facet::Safety,
        Facet::Functionality,
        Facet::Attainability,
        Facet::Liveness,
    ];

    /// 1 is the most important layer.
    pub fn priority(self) -> u8 {
        match self {
            Facet::Data => 1,
            Facet::Safety => 2,
            Facet::Functionality => 3,
            Facet::Attainability => 4,
            Facet::Liveness => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Facet::Data => "DATA",
            Facet::Safety => "SAFETY",
            Facet::Functionality => "FUNCTIONALITY",
            Facet::Attainability => "ATTAINABILITY",
            Facet::Liveness => "LIVENESS",
        }
    }

    /// Facet named by a section comment such as `Safety facets` or
    /// `facet: SAFETY`.
    pub fn from_marker(comment: &str) -> Option<Facet> {
        let c = comment.trim();
        if let Some(rest) = c.strip_prefix("facet:") {
            return rest.trim().parse().ok();
        }
        let mut words = c.split_whitespace();
        let first = words.next()?;
        match words.next() {
            Some(w) if w.eq_ignore_ascii_case("facets") || w.eq_ignore_ascii_case("facet") => {
                words.next().is_none().then_some(())?;
                first.parse().ok()
            }
            _ => None,
        }
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Facet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Facet::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown facet `{}`", s.trim()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priorities_follow_declaration_order() {
        let p: Vec<u8> = Facet::ALL.iter().map(|f| f.priority()).collect();
        assert_eq!(p, [1, 2, 3, 4, 5]);
        let mut sorted = Facet::ALL;
        sorted.sort();
        assert_eq!(sorted, Facet::ALL);
    }

    #[test]
    fn markers() {
        assert_eq!(Facet::from_marker("Safety facets"), Some(Facet::Safety));
        assert_eq!(Facet::from_marker("facet: liveness"), Some(Facet::Liveness));
        assert_eq!(Facet::from_marker("Failures Properties"), None);
        assert_eq!(Facet::from_marker("The variables that we need"), None);
        assert!("TIMING".parse::<Facet>().is_err());
    }
}
