use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Utterance intent. Declaration order is the fixed enumeration order used
/// wherever candidates need a deterministic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Intent {
    Statement,
    YesNoQuestion,
    WhQuestion,
    RhetoricalQuestion,
    Command,
    Request,
    RhetoricalCommand,
}

impl Intent {
    pub const ALL: [Intent; 7] = [
        Intent::Statement,
        Intent::YesNoQuestion,
        Intent::WhQuestion,
        Intent::RhetoricalQuestion,
        Intent::Command,
        Intent::Request,
        Intent::RhetoricalCommand,
    ];

    /// Statements, yes/no questions and wh-questions.
    pub const MAJOR: [Intent; 3] = [Intent::Statement, Intent::YesNoQuestion, Intent::WhQuestion];

    pub const COUNT: usize = 7;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Intent> {
        Self::ALL.get(i).copied()
    }

    /// Wire label, e.g. `yes_no_question`.
    pub fn label(self) -> &'static str {
        match self {
            Intent::Statement => "statement",
            Intent::YesNoQuestion => "yes_no_question",
            Intent::WhQuestion => "wh_question",
            Intent::RhetoricalQuestion => "rhetorical_question",
            Intent::Command => "command",
            Intent::Request => "request",
            Intent::RhetoricalCommand => "rhetorical_command",
        }
    }

    /// Abbreviation used on plot axes (S, YN, WH, RQ, C, R, RC).
    pub fn short(self) -> &'static str {
        match self {
            Intent::Statement => "S",
            Intent::YesNoQuestion => "YN",
            Intent::WhQuestion => "WH",
            Intent::RhetoricalQuestion => "RQ",
            Intent::Command => "C",
            Intent::Request => "R",
            Intent::RhetoricalCommand => "RC",
        }
    }

    pub fn is_major(self) -> bool {
        Self::MAJOR.contains(&self)
    }

    /// Lenient parse used by the corpus converter: accepts the wire label,
    /// the abbreviation and a few common spellings.
    pub fn parse_alias(s: &str) -> Option<Intent> {
        if let Ok(i) = s.parse() {
            return Some(i);
        }
        let norm: String = s
            .trim()
            .to_lowercase()
            .chars()
            .map(|c| if c.is_alphanumeric() { c } else { '_' })
            .collect();
        let norm = norm.trim_matches('_');
        Some(match norm {
            "s" | "statements" => Intent::Statement,
            "yn" | "yes_no" | "yes_no_q" | "yes_no_questions" | "ynq" => Intent::YesNoQuestion,
            "wh" | "wh_q" | "whq" | "wh_questions" => Intent::WhQuestion,
            "rq" | "rhetorical_q" | "rhetorical_questions" => Intent::RhetoricalQuestion,
            "c" | "commands" => Intent::Command,
            "r" | "requests" => Intent::Request,
            "rc" | "rhetorical_c" | "rhetorical_commands" => Intent::RhetoricalCommand,
            other => return other.parse().ok(),
        })
    }
}

impl fmt::Display for Intent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownLabel {
    pub kind: &'static str,
    pub value: String,
}

impl fmt::Display for UnknownLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown {} label '{}'", self.kind, self.value)
    }
}

impl std::error::Error for UnknownLabel {}

impl FromStr for Intent {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Intent::ALL
            .into_iter()
            .find(|i| i.label() == s)
            .ok_or_else(|| UnknownLabel {
                kind: "intent",
                value: s.to_string(),
            })
    }
}

impl Serialize for Intent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Intent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Korean wh-particle. "Why" is deliberately absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WhParticle {
    Who,
    What,
    Where,
    When,
    How,
    HowMany,
}

impl WhParticle {
    pub const ALL: [WhParticle; 6] = [
        WhParticle::Who,
        WhParticle::What,
        WhParticle::Where,
        WhParticle::When,
        WhParticle::How,
        WhParticle::HowMany,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            WhParticle::Who => "who",
            WhParticle::What => "what",
            WhParticle::Where => "where",
            WhParticle::When => "when",
            WhParticle::How => "how",
            WhParticle::HowMany => "how_many",
        }
    }

    pub fn hangul(self) -> &'static str {
        match self {
            WhParticle::Who => "누구",
            WhParticle::What => "뭐",
            WhParticle::Where => "어디",
            WhParticle::When => "언제",
            WhParticle::How => "어떻게",
            WhParticle::HowMany => "몇",
        }
    }

    pub fn parse_alias(s: &str) -> Option<WhParticle> {
        let t = s.trim();
        if let Ok(p) = t.parse() {
            return Some(p);
        }
        if let Some(p) = Self::ALL.into_iter().find(|p| p.hangul() == t) {
            return Some(p);
        }
        match t.to_lowercase().replace(['-', ' '], "_").as_str() {
            "howmany" | "how_many" => Some(WhParticle::HowMany),
            "누가" => Some(WhParticle::Who),
            "무엇" | "무슨" => Some(WhParticle::What),
            other => other.parse().ok(),
        }
    }
}

impl fmt::Display for WhParticle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for WhParticle {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WhParticle::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| UnknownLabel {
                kind: "wh_particle",
                value: s.to_string(),
            })
    }
}

impl Serialize for WhParticle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for WhParticle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
