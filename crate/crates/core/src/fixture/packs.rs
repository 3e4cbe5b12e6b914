//! The 38 evidence packs of the worked example.

use crate::lector::AssertionType::{self, *};

pub struct PackSpec {
    pub assertion_type: AssertionType,
    /// Index into the single-substance formulations; 0 is the 500 mg tablet.
    pub formulation: usize,
    pub question: &'static str,
    pub assertion: &'static str,
    pub valid: &'static [&'static str],
    pub invalid: &'static [&'static str],
    /// (document key, cited page index nodes)
    pub cites: &'static [(&'static str, &'static [&'static str])],
    pub divergences: &'static [&'static str],
    pub gaps: &'static [&'static str],
    pub dependencies: &'static [&'static str],
    pub silences: &'static [&'static str],
    pub reject: bool,
}

const BASE: PackSpec = PackSpec {
    assertion_type: Indication,
    formulation: 0,
    question: "",
    assertion: "",
    valid: &[],
    invalid: &[],
    cites: &[],
    divergences: &[],
    gaps: &[],
    dependencies: &[],
    silences: &[],
    reject: false,
};

const Q_INDICATION: &str = "What is this medication indicated for?";
const Q_CONTRA: &str = "When should this medication not be used?";
const Q_DOSING: &str = "How should this medication be dosed?";
const Q_ADVERSE: &str = "What adverse effects may this medication cause?";
const Q_WARNING: &str = "What warnings apply to this medication?";
const CONSULT: &str = "Always consult a healthcare professional";

pub const PACKS: [PackSpec; 38] = [
    PackSpec {
        question: Q_INDICATION,
        assertion: "Approved indications: analgesic (adults); antipyretic (adults)",
        valid: &["Mild to moderate pain"],
        invalid: &["Hypersensitivity to dipyrone"],
        cites: &[("prof", &["1.1"])],
        gaps: &["Off-label indications"],
        dependencies: &[CONSULT],
        ..BASE
    },
    PackSpec {
        formulation: 1,
        question: Q_INDICATION,
        assertion: "Analgesic and antipyretic for adults and adolescents over 15 years",
        valid: &["Moderate to severe pain", "population: adults and adolescents over 15 years"],
        invalid: &["Hypersensitivity to dipyrone"],
        cites: &[("prof", &["1.1"]), ("hsl1", &["1.1"])],
        gaps: &["Off-label indications"],
        ..BASE
    },
    PackSpec {
        formulation: 2,
        question: Q_INDICATION,
        assertion: "Antipyretic and analgesic oral solution",
        valid: &["Fever", "population: children over 3 months"],
        invalid: &["Hypersensitivity to pyrazolones"],
        cites: &[("prof", &["1.1"]), ("hae2", &["1.1"])],
        dependencies: &[CONSULT],
        ..BASE
    },
    PackSpec {
        formulation: 4,
        question: Q_INDICATION,
        assertion: "Parenteral analgesic and antipyretic",
        valid: &["Severe pain when the oral route is not possible", "context: hospital setting"],
        invalid: &["Hypotension"],
        cites: &[("hsl4", &["1.1"]), ("db4", &["1.1"])],
        divergences: &["Monographs differ on use in postoperative pain"],
        ..BASE
    },
    PackSpec {
        formulation: 5,
        question: Q_INDICATION,
        assertion: "Rectal antipyretic",
        valid: &["Fever when the oral route is not possible"],
        cites: &[("hae5", &["1.1"])],
        ..BASE
    },
    PackSpec {
        formulation: 3,
        question: Q_INDICATION,
        assertion: "Analgesic and antipyretic oral suspension",
        valid: &["Fever", "Mild to moderate pain"],
        cites: &[("hsl3", &["1.1"]), ("db3", &["1.1"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Contraindication,
        question: Q_CONTRA,
        assertion: "Contraindicated in hypersensitivity to pyrazolones, bone marrow disorders and acute intermittent hepatic porphyria",
        valid: &["Any patient population"],
        cites: &[("prof", &["1.3"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Contraindication,
        formulation: 1,
        question: Q_CONTRA,
        assertion: "Contraindicated in hypersensitivity to pyrazolones",
        cites: &[("prof", &["1.3"]), ("hae1", &["1.3"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Contraindication,
        formulation: 2,
        question: Q_CONTRA,
        assertion: "Contraindicated in bone marrow disorders",
        cites: &[("hsl2", &["1.3"])],
        gaps: &["Neonatal use not addressed"],
        ..BASE
    },
    PackSpec {
        assertion_type: Contraindication,
        formulation: 4,
        question: Q_CONTRA,
        assertion: "Injection contraindicated in infants under 3 months or 5 kg",
        valid: &["population: infants under 3 months or 5 kg"],
        cites: &[("prof", &["1.3"]), ("hae4", &["1.3"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Contraindication,
        formulation: 5,
        question: Q_CONTRA,
        assertion: "Suppository contraindicated in acute intermittent hepatic porphyria",
        cites: &[("hsl5", &["1.3"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Contraindication,
        formulation: 6,
        question: Q_CONTRA,
        assertion: "Effervescent tablet contraindicated in hypersensitivity to dipyrone",
        cites: &[("db6", &["1.3"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Dosing,
        question: Q_DOSING,
        assertion: "One to two tablets up to four times daily",
        valid: &["population: adults and adolescents over 15 years"],
        invalid: &["Children under 15 years"],
        cites: &[("prof", &["1.5"])],
        dependencies: &["Renal or hepatic impairment"],
        ..BASE
    },
    PackSpec {
        assertion_type: Dosing,
        formulation: 1,
        question: Q_DOSING,
        assertion: "One tablet up to four times daily",
        cites: &[("hsl1", &["1.5"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Dosing,
        formulation: 2,
        question: Q_DOSING,
        assertion: "Oral solution dosed by body weight",
        valid: &["population: children"],
        cites: &[("prof", &["1.5"]), ("hae2", &["1.5"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Dosing,
        formulation: 3,
        question: Q_DOSING,
        assertion: "Oral suspension dosed by body weight",
        cites: &[("db3", &["1.5"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Dosing,
        formulation: 4,
        question: Q_DOSING,
        assertion: "Slow intravenous or intramuscular injection",
        valid: &["context: slow intravenous injection"],
        cites: &[("hsl4", &["1.5"]), ("hae4", &["1.5"])],
        divergences: &["Maximum infusion rate differs between monographs"],
        ..BASE
    },
    PackSpec {
        assertion_type: Dosing,
        formulation: 5,
        question: Q_DOSING,
        assertion: "One suppository up to four times daily",
        cites: &[("db5", &["1.5"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Interaction,
        question: "Does dipyrone interact with warfarin?",
        assertion: "Warfarin effect may change; moderate interaction, monitor INR",
        valid: &["Concurrent warfarin therapy"],
        cites: &[("prof", &["1.6"])],
        dependencies: &["INR monitoring available"],
        ..BASE
    },
    PackSpec {
        assertion_type: Interaction,
        question: "Does dipyrone interact with methotrexate?",
        assertion: "Combined use increases hematologic toxicity",
        valid: &["Concurrent methotrexate therapy"],
        cites: &[("prof", &["1.6"]), ("hsl0", &["1.6"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Interaction,
        formulation: 1,
        question: "Does dipyrone interact with ciclosporin?",
        assertion: "Dipyrone may lower ciclosporin levels",
        cites: &[("hae1", &["1.6"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Interaction,
        formulation: 2,
        question: "Does dipyrone interact with chlorpromazine?",
        assertion: "Risk of severe hypothermia with chlorpromazine",
        cites: &[("hsl2", &["1.6"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Interaction,
        formulation: 4,
        question: "Does dipyrone injection interact with other antihypertensives?",
        assertion: "Additive hypotensive effect",
        cites: &[("db4", &["1.6"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Interaction,
        formulation: 6,
        question: "Does dipyrone interact with alcohol?",
        assertion: "Concomitant alcohol may potentiate effects",
        cites: &[("db6", &["1.6"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Interaction,
        question: "Is dipyrone contraindicated with ciclosporin?",
        assertion: "Dipyrone is absolutely contraindicated with ciclosporin",
        cites: &[("prof", &["1.6"])],
        reject: true,
        ..BASE
    },
    PackSpec {
        assertion_type: AdverseReaction,
        question: Q_ADVERSE,
        assertion: "Hypersensitivity reactions, hypotension and agranulocytosis",
        cites: &[("prof", &["1.7"])],
        ..BASE
    },
    PackSpec {
        assertion_type: AdverseReaction,
        formulation: 1,
        question: Q_ADVERSE,
        assertion: "Agranulocytosis reported",
        cites: &[("hae1", &["1.7"])],
        ..BASE
    },
    PackSpec {
        assertion_type: AdverseReaction,
        formulation: 2,
        question: Q_ADVERSE,
        assertion: "Hypersensitivity reactions reported",
        cites: &[("hsl2", &["1.7"]), ("hae2", &["1.7"])],
        ..BASE
    },
    PackSpec {
        assertion_type: AdverseReaction,
        formulation: 3,
        question: Q_ADVERSE,
        assertion: "Severe skin reactions are rare",
        cites: &[("db3", &["1.7"])],
        ..BASE
    },
    PackSpec {
        assertion_type: AdverseReaction,
        formulation: 4,
        question: Q_ADVERSE,
        assertion: "Hypotension after injection",
        valid: &["context: rapid intravenous injection"],
        cites: &[("prof", &["1.7"]), ("hsl4", &["1.7"])],
        ..BASE
    },
    PackSpec {
        assertion_type: AdverseReaction,
        formulation: 5,
        question: Q_ADVERSE,
        assertion: "Local irritation and hypersensitivity reactions",
        cites: &[("hae5", &["1.7"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Warning,
        question: Q_WARNING,
        assertion: "Agranulocytosis risk; monitor blood counts in prolonged therapy",
        cites: &[("prof", &["1.4"])],
        dependencies: &["Prolonged therapy"],
        ..BASE
    },
    PackSpec {
        assertion_type: Warning,
        formulation: 1,
        question: Q_WARNING,
        assertion: "Monitor for signs of agranulocytosis",
        cites: &[("hsl1", &["1.4"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Warning,
        formulation: 2,
        question: Q_WARNING,
        assertion: "Hypotensive reactions may occur",
        cites: &[("db2", &["1.4"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Warning,
        formulation: 4,
        question: Q_WARNING,
        assertion: "Hypotension mainly after parenteral use",
        cites: &[("hae4", &["1.4"]), ("db4", &["1.4"])],
        ..BASE
    },
    PackSpec {
        assertion_type: Warning,
        formulation: 6,
        question: Q_WARNING,
        assertion: "Sodium content relevant for restricted diets",
        cites: &[("db6", &["1.4"])],
        gaps: &["Sodium amount not stated"],
        ..BASE
    },
    PackSpec {
        assertion_type: NormativeSilence,
        question: "Is dipyrone safe for patients with G6PD deficiency?",
        cites: &[("prof", &["1.3", "1.4"])],
        silences: &["Silence does NOT equate to safety or permission"],
        dependencies: &["Clinical judgment required; consult specialized literature"],
        ..BASE
    },
    PackSpec {
        assertion_type: NormativeSilence,
        formulation: 4,
        question: "Is dipyrone injection compatible with parenteral nutrition admixtures?",
        cites: &[("hsl4", &["1.5"]), ("hae4", &["1.5"])],
        silences: &["Compatibility with parenteral nutrition admixtures is not addressed"],
        dependencies: &["Consult institutional compatibility tables"],
        ..BASE
    },
];

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn table_shape() {
        assert_eq!(PACKS.iter().filter(|p| p.reject).count(), 1);
        let types: BTreeSet<_> = PACKS.iter().map(|p| p.assertion_type).collect();
        assert_eq!(types.len(), 7);
        let tablet_accepted = PACKS.iter().filter(|p| p.formulation == 0 && !p.reject).count();
        assert_eq!(tablet_accepted, 8);
        assert!(PACKS.iter().all(|p| !p.cites.is_empty()));
    }
}
