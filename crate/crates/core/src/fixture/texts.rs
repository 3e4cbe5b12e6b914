//! Document bodies for the dipyrone fixture. Every text is laid out with
//! numbered headings so the stub reader can index it.

pub struct Section {
    pub id: &'static str,
    pub insert_title: &'static str,
    pub monograph_title: &'static str,
    pub body: &'static str,
}

pub const SECTIONS: [Section; 8] = [
    Section {
        id: "1.1",
        insert_title: "What is this medication indicated for?",
        monograph_title: "Indications",
        body: "Dipyrone is indicated as an analgesic and antipyretic in adults. It treats mild to moderate pain and fever.",
    },
    Section {
        id: "1.2",
        insert_title: "How does this medication work?",
        monograph_title: "Pharmacology",
        body: "Dipyrone is a pyrazolone derivative with analgesic and antipyretic action. Onset of action occurs within thirty to sixty minutes.",
    },
    Section {
        id: "1.3",
        insert_title: "When should I not use this medication?",
        monograph_title: "Contraindications",
        body: "Do not use in patients with hypersensitivity to dipyrone or other pyrazolones. Do not use in bone marrow disorders or acute intermittent hepatic porphyria.",
    },
    Section {
        id: "1.4",
        insert_title: "What should I know before using this medication?",
        monograph_title: "Warnings and precautions",
        body: "Agranulocytosis may occur and blood counts should be monitored in prolonged therapy. Hypotensive reactions may occur, mainly after parenteral use.",
    },
    Section {
        id: "1.5",
        insert_title: "How should I use this medication?",
        monograph_title: "Dosage and administration",
        body: "Adults and adolescents over fifteen years take one to two tablets up to four times daily. Children receive doses adjusted to body weight.",
    },
    Section {
        id: "1.6",
        insert_title: "What interactions may occur with this medication?",
        monograph_title: "Interactions",
        body: "Dipyrone may lower ciclosporin levels. Combined use with methotrexate increases hematologic toxicity. The effect of warfarin may change and INR should be monitored.",
    },
    Section {
        id: "1.7",
        insert_title: "What adverse effects may this medication cause?",
        monograph_title: "Adverse reactions",
        body: "Hypersensitivity reactions, hypotension and agranulocytosis have been reported. Severe skin reactions are rare.",
    },
    Section {
        id: "1.8",
        insert_title: "What should I do if I use more than the indicated dose?",
        monograph_title: "Overdose",
        body: "Seek medical help immediately. Symptoms include nausea, vomiting and abdominal pain.",
    },
];

fn render(title: &str, intro: &str, insert: bool, trailer: &str) -> String {
    let mut s = format!("1 {title}\n{intro}\n");
    for sec in &SECTIONS {
        let heading = if insert { sec.insert_title } else { sec.monograph_title };
        s.push_str(&format!("{} {heading}\n{}\n", sec.id, sec.body));
    }
    s.push_str(trailer);
    s.push('\n');
    s
}

/// Cleaned text of a package insert version.
pub fn insert_text(medication: &str, audience: &str, version_label: &str) -> String {
    render(
        &format!("{medication} {audience} package insert"),
        "Dipyrone monohydrate. Read this insert carefully.",
        true,
        &format!("Text revised by the regulator on {version_label}."),
    )
}

pub fn monograph_text(institution: &str, formulation: &str) -> String {
    render(
        &format!("{institution} monograph: {formulation}"),
        "Institutional monograph for the hospital formulary.",
        false,
        "Reviewed by the pharmacy and therapeutics committee.",
    )
}

pub fn smpc_text(presentation: &str) -> String {
    render(
        &format!("Summary of product characteristics: {presentation}"),
        "Public drug information database entry.",
        false,
        "Entry compiled from public sources.",
    )
}

/// Simulated capture of the original file: a header line ahead of the text.
pub fn raw_capture(file_name: &str, text: &str) -> Vec<u8> {
    format!("%PDF-1.4\n% capture of {file_name}\n{text}").into_bytes()
}
