//! KABCO injury severity and the KA / KAB groupings.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::record::PersonRecord;

/// Five-level KABCO injury severity.
///
/// The derived ordering is the severity ordering: `K > A > B > C > O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SeverityLevel {
    /// No apparent injury.
    O,
    /// Possible injury.
    C,
    /// Suspected minor injury.
    B,
    /// Suspected serious injury.
    A,
    /// Fatal injury.
    K,
}

impl SeverityLevel {
    /// All levels from most to least severe.
    pub const ALL: [SeverityLevel; 5] = [Self::K, Self::A, Self::B, Self::C, Self::O];

    /// Parses a single-letter KABCO code (case-insensitive, surrounding
    /// whitespace ignored).
    pub fn from_code(code: &str) -> Option<Self> {
        match code.trim() {
            "K" | "k" => Some(Self::K),
            "A" | "a" => Some(Self::A),
            "B" | "b" => Some(Self::B),
            "C" | "c" => Some(Self::C),
            "O" | "o" => Some(Self::O),
            _ => None,
        }
    }

    pub const fn code(self) -> &'static str {
        match self {
            Self::K => "K",
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::O => "O",
        }
    }
}

impl fmt::Display for SeverityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Severity grouping used by rates and filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SeverityGroup {
    /// Fatal and suspected serious.
    #[serde(rename = "KA")]
    Ka,
    /// Fatal, suspected serious and suspected minor.
    #[serde(rename = "KAB")]
    Kab,
    #[serde(rename = "ALL")]
    All,
}

impl SeverityGroup {
    pub fn from_code(code: &str) -> Option<Self> {
        let code = code.trim();
        [Self::Ka, Self::Kab, Self::All]
            .into_iter()
            .find(|g| g.code().eq_ignore_ascii_case(code))
    }

    pub const fn code(self) -> &'static str {
        match self {
            Self::Ka => "KA",
            Self::Kab => "KAB",
            Self::All => "ALL",
        }
    }
}

/// Crash-level severity: the most severe person injury, `O` when nobody is
/// listed.
pub fn derive_crash_severity(persons: &[PersonRecord]) -> SeverityLevel {
    persons
        .iter()
        .map(|p| p.injury)
        .max()
        .unwrap_or(SeverityLevel::O)
}

pub fn in_group(severity: SeverityLevel, group: SeverityGroup) -> bool {
    match group {
        SeverityGroup::Ka => severity >= SeverityLevel::A,
        SeverityGroup::Kab => severity >= SeverityLevel::B,
        SeverityGroup::All => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{PersonRole, Sex};
    use proptest::prelude::*;

    fn person(injury: SeverityLevel) -> PersonRecord {
        PersonRecord {
            role: PersonRole::Driver,
            sex: Sex::Unknown,
            age: None,
            injury,
        }
    }

    fn persons(levels: &[SeverityLevel]) -> Vec<PersonRecord> {
        levels.iter().copied().map(person).collect()
    }

    #[test]
    fn ordering_is_kabco() {
        use SeverityLevel::*;
        assert!(K > A && A > B && B > C && C > O);
        let mut all = vec![O, B, K, C, A];
        all.sort();
        assert_eq!(all, vec![O, C, B, A, K]);
    }

    #[test]
    fn parse_codes() {
        for level in SeverityLevel::ALL {
            assert_eq!(SeverityLevel::from_code(level.code()), Some(level));
        }
        assert_eq!(SeverityLevel::from_code(" k "), Some(SeverityLevel::K));
        assert_eq!(SeverityLevel::from_code("X"), None);
        assert_eq!(SeverityLevel::from_code(""), None);
        assert_eq!(SeverityLevel::from_code("KA"), None);
    }

    #[test]
    fn roll_up_examples() {
        use SeverityLevel::*;
        assert_eq!(derive_crash_severity(&persons(&[O, B, C])), B);
        assert_eq!(derive_crash_severity(&persons(&[K, O])), K);
        assert_eq!(derive_crash_severity(&[]), O);
    }

    #[test]
    fn group_examples() {
        use SeverityLevel::*;
        assert!(!in_group(B, SeverityGroup::Ka));
        assert!(in_group(B, SeverityGroup::Kab));
        assert!(in_group(O, SeverityGroup::All));
        assert!(in_group(K, SeverityGroup::Ka));
        assert!(in_group(A, SeverityGroup::Ka));
        assert!(!in_group(C, SeverityGroup::Kab));
    }

    fn any_level() -> impl Strategy<Value = SeverityLevel> {
        prop::sample::select(SeverityLevel::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn roll_up_is_order_independent(mut levels in prop::collection::vec(any_level(), 0..12), seed in any::<u64>()) {
            let before = derive_crash_severity(&persons(&levels));
            // deterministic shuffle
            let n = levels.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (s >> 33) as usize % (i + 1);
                levels.swap(i, j);
            }
            prop_assert_eq!(before, derive_crash_severity(&persons(&levels)));
        }

        #[test]
        fn roll_up_is_monotone(levels in prop::collection::vec(any_level(), 0..12), extra in any_level()) {
            let before = derive_crash_severity(&persons(&levels));
            let mut more = levels.clone();
            more.push(extra);
            prop_assert!(derive_crash_severity(&persons(&more)) >= before);
        }

        #[test]
        fn groups_nest(level in any_level()) {
            if in_group(level, SeverityGroup::Ka) {
                prop_assert!(in_group(level, SeverityGroup::Kab));
            }
            if in_group(level, SeverityGroup::Kab) {
                prop_assert!(in_group(level, SeverityGroup::All));
            }
        }
    }
}
