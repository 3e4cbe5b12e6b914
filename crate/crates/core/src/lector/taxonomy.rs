//! Assertion types and their illocutionary classification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Closed taxonomy of assertion types. New members require a code change here,
/// together with a row in [`illocutionary_class`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AssertionType {
    Indication,
    Contraindication,
    Dosing,
    Interaction,
    AdverseReaction,
    Warning,
    Precaution,
    SpecialPopulation,
    NormativeSilence,
}

impl AssertionType {
    pub const ALL: [AssertionType; 9] = [
        AssertionType::Indication,
        AssertionType::Contraindication,
        AssertionType::Dosing,
        AssertionType::Interaction,
        AssertionType::AdverseReaction,
        AssertionType::Warning,
        AssertionType::Precaution,
        AssertionType::SpecialPopulation,
        AssertionType::NormativeSilence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AssertionType::Indication => "INDICATION",
            AssertionType::Contraindication => "CONTRAINDICATION",
            AssertionType::Dosing => "DOSING",
            AssertionType::Interaction => "INTERACTION",
            AssertionType::AdverseReaction => "ADVERSE_REACTION",
            AssertionType::Warning => "WARNING",
            AssertionType::Precaution => "PRECAUTION",
            AssertionType::SpecialPopulation => "SPECIAL_POPULATION",
            AssertionType::NormativeSilence => "NORMATIVE_SILENCE",
        }
    }
}

impl fmt::Display for AssertionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssertionType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AssertionType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("{s:?} is not in the assertion taxonomy"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IllocutionaryClass {
    #[serde(rename = "assertive")]
    Assertive,
    #[serde(rename = "directive")]
    Directive,
    #[serde(rename = "assertive+directive")]
    AssertiveDirective,
    #[serde(rename = "directive+assertive")]
    DirectiveAssertive,
    #[serde(rename = "non-commitment")]
    NonCommitment,
}

impl IllocutionaryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            IllocutionaryClass::Assertive => "assertive",
            IllocutionaryClass::Directive => "directive",
            IllocutionaryClass::AssertiveDirective => "assertive+directive",
            IllocutionaryClass::DirectiveAssertive => "directive+assertive",
            IllocutionaryClass::NonCommitment => "non-commitment",
        }
    }
}

impl fmt::Display for IllocutionaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn illocutionary_class(t: AssertionType) -> IllocutionaryClass {
    use AssertionType::*;
    use IllocutionaryClass::*;
    match t {
        Indication => Assertive,
        Contraindication => Directive,
        Dosing => DirectiveAssertive,
        Interaction => AssertiveDirective,
        AdverseReaction => Assertive,
        Warning => Directive,
        Precaution => Directive,
        SpecialPopulation => AssertiveDirective,
        NormativeSilence => NonCommitment,
    }
}

/// Communicative force of each type.
pub fn illocutionary_force(t: AssertionType) -> &'static str {
    use AssertionType::*;
    match t {
        Indication => "Commits to truth of therapeutic applicability",
        Contraindication => "Instructs the professional to avoid",
        Dosing => "Prescribes conduct with factual basis",
        Interaction => "States a fact and warns about consequences",
        AdverseReaction => "Reports observed or documented effects",
        Warning => "Urges caution under specified conditions",
        Precaution => "Recommends monitoring or adjusted use",
        SpecialPopulation => "Qualifies applicability to a subgroup",
        NormativeSilence => "Signals absence of regulatory pronouncement",
    }
}
