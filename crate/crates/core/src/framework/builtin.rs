//! The shipped ERS v1 framework.

use super::{
    AnswerOption, Dimension, FrameworkDefinition, MatrixRow, NormalizationSpec, Principle, PrincipleCode, Provenance,
    Question, ScoringMode, SupportLevel, TheorySupportMatrix,
};
use crate::formula::parse_formula;
use crate::tag::QuestionTag;

pub const ERS_V1_ID: &str = "ers-v1";
pub const ERS_V1_VERSION: &str = "1.0.0";

pub const THEORIES: [&str; 10] = [
    "Utilitarianism",
    "Deontological Ethics",
    "Virtue Ethics",
    "Ethics of Care",
    "Rights-Based Ethics",
    "Social Contract Theory",
    "Rawlsian Justice",
    "Natural Law Theory",
    "Environmental Ethics",
    "Pragmatism",
];

// Statements are kept exactly as catalogued, wording quirks included.
const PRINCIPLES: [(&str, &str); 27] = [
    ("H1", "The system should do no harm to any individual."),
    ("H2", "The system should do no harm to an organization."),
    ("H3", "The system should do no harm to and infrastructure of system."),
    ("H4", "The system should do no harm to animals."),
    ("H5", "The system should do no harm to environment."),
    ("H6", "The system designer should take necessary measures within its control to mitigate the harm."),
    ("H7", "The system should disclose the net harm potential."),
    ("H8", "Intentional harm is more unethical than unintentional harm."),
    ("H9", "Even the unintentional harm is unethical."),
    ("H10", "The severity of harm is ordered as per harm to individual, environment, animal and organization."),
    ("K1", "Data should be acquired from the proper owner of the data. It should not be stolen."),
    ("K2", "Data should be distributed based on the distribution rights granted by the owner (alteration, commercial/noncommercial, attribution, purpose)"),
    ("K3", "The rights of the data subject should be upheld by the data owner."),
    ("S1", "Any subject has the right to know if data being collected about him/her, what data is being collected, by whom, and for what purpose."),
    ("S2", "Any subject has the right to know the process of how his/her data is being collected."),
    ("S3", "Data should not be used for purposes not authorized by the subject."),
    ("S4", "Any subject has the right to be informed promptly if their data is used for purposes beyond their initial consent, allowing them to restrict such use."),
    ("S5", "Any subject has the right to withdraw permission for the use of their data later."),
    ("S6", "Any subject has the right to request copies and download the data about him/her in a readable format."),
    ("S7", "Any subject has the right to request correction of wrong information in the data about him/her."),
    ("S8", "An individual has the right to be forgotten i.e. erasure of his/her data"),
    ("S9", "Any subject has the right to restrict how his/her data is being collected, processed, archived, or distributed and optout."),
    ("S10", "Any subject has the right to not be subject to automatic decision making."),
    ("S11", "Any subject has the right not to be subject to be used for AI system training."),
    ("S12", "Any subject has the right to restrict his/her information not to be sold to third party."),
    ("S13", "Any subject has the right to not be discriminated against for exercising his data rights by denial and restriction of other services. Individuals cannot be denied goods or services, or offered different prices or quality, for exercising their data rights"),
    ("S14", "Any subject has the right to be compensated if any data about him is monetized profit."),
];

/// Support levels per theory (same order as [`THEORIES`]). The first string
/// covers H1..H10, K1..K3, S1; the second S2..S14.
const SUPPORT_BY_THEORY: [(&str, &str); 10] = [
    ("CCCCCDDCCCCCCC", "CCCCCCCCCCCCC"),
    ("DCCCCDDDDDDDDD", "DDDDDDDDDDDDD"),
    ("DCCDDDDDDDDDDD", "DDDDDDDDDDDDD"),
    ("DCCDDDDDDDDDDD", "DDDDDDDDDDDDD"),
    ("DNNCCDDDDDDDDD", "DDDDDDDDDDDDD"),
    ("DCCNCCCCCCCCCC", "CCCCCCCCCCCCC"),
    ("DCCNCCCCCCCCCC", "CCCCCCCCCCCDC"),
    ("DCCCDDDDDDDDDD", "DDDDDDDDDDDDD"),
    ("IIIDDDDINNNNNN", "NNNNNNNNNNNNN"),
    ("CCCCCDCCCCCCCC", "CCCCCCCCCCCCC"),
];

struct QuestionRow {
    tag: (u32, u32),
    text: &'static str,
    yes: &'static str,
    no: &'static str,
    principles: &'static [&'static str],
}

const fn row(
    tag: (u32, u32),
    text: &'static str,
    yes: &'static str,
    no: &'static str,
    principles: &'static [&'static str],
) -> QuestionRow {
    QuestionRow {
        tag,
        text,
        yes,
        no,
        principles,
    }
}

// Option values per answer; the question→principle mapping is curated.
const QUESTIONS: [QuestionRow; 23] = [
    row((1, 1), "Has the data been acquired?", "1", "0", &["K1"]),
    row((1, 2), "Has the data been acquired properly from the owner?", "0", "0.5", &["K1"]),
    row((1, 3), "Has it been verified that the owner has proper authorization to distribute the data?", "0", "0.25", &["K2"]),
    row((1, 4), "Has the owner provided usage permission for the purpose of model training?", "0", "0.25", &["K2", "K3"]),
    row((1, 5), "Has the owner provided usage permission for the application of the trained model?", "0", "0.25", &["K2", "K3"]),
    row((1, 6), "If the owner required attribution, does an attribution mechanism exist and is it being used?", "0", "0.25", &["K2"]),
    row((2, 1), "Are there sufficient process safeguards to ensure no harm to humans?", "0", "2", &["H6", "H7"]),
    row((2, 2), "Are there sufficient process safeguards to ensure no harm to other entities (animals, environment, infrastructure, etc.)?", "0", "1", &["H6"]),
    row((2, 3), "Have the claimed/advertised benefits of the data been sufficiently validated and documented?", "0", "0.1", &["H7"]),
    row((2, 4), "Have bias and other harmful impacts of the data been documented and disclosed?", "0", "0.15", &["H6", "H7"]),
    row((3, 1), "Is there data other than related to human or individual (non-human)?", "0.5", "0", &["H2", "H3", "H4", "H5"]),
    row((3, 2), "Is there data related to human (Human)?", "1", "0", &["H1"]),
    row((3, 3), "Is there human related data that also identifies individuals (PII)?", "0.5", "0", &["H1"]),
    row((3, 4), "Will this data be used to harm the subject? (principle of no harm - intention)?", "0.2", "0", &["H1", "H8"]),
    row((3, 5), "Can this data be used to harm other human beings? (principle of no harm - intention)?", "0.8", "0", &["H1", "H8"]),
    row((3, 6), "Can this data be inadvertently used to harm the subject or HUMAN (unintentional)?", "0.25", "0", &["H1", "H9"]),
    row((3, 7), "Can this data be used to critically harm other entities (animals, environment, infrastructure, etc.) through ML?", "0.5", "0", &["H3", "H4", "H5", "H10"]),
    row((3, 8), "Can this data be used to harm other entities (animals, environment, infrastructure, etc.) through ML?", "0.25", "0", &["H2", "H3", "H4", "H5", "H9"]),
    row((4, 1), "Does the process conform to the privacy asked by the target?", "0", "0.15", &["S3", "S9"]),
    row((4, 2), "Was the target informed, and did they consent to the method of data collection?", "0", "0.2", &["S1", "S2"]),
    row((4, 3), "Was the target informed, and did they consent to the process of data archiving?", "0", "0.1", &["S1", "S9"]),
    row((4, 4), "Was the target informed, and did they consent to the data distribution?", "0", "0.15", &["S3", "S12"]),
    row((4, 5), "Does the target have a means to change mind and opt out?", "0", "0.15", &["S5", "S8", "S9"]),
];

/// Questions used as `gate(..)` multipliers and the answer that opens them.
const GATES: [((u32, u32), &str); 3] = [((1, 1), "yes"), ((4, 1), "yes"), ((4, 2), "yes")];

// (id, index, label, symbol, formula). Multiplier questions are written as
// gates; literal scoring reads them back as their numeric values.
const DIMENSIONS: [(&str, u32, &str, char, &str); 4] = [
    (
        "ethical_sourcing",
        1,
        "Ethical Sourcing",
        'S',
        "gate(Q1.1) * (score(Q1.2) + score(Q1.3) + score(Q1.4) + score(Q1.5) + score(Q1.6))",
    ),
    (
        "harm_potential",
        3,
        "Harm Potential",
        'H',
        "(score(Q3.2) + score(Q3.3)) * gate(Q4.1) * (score(Q3.4) + score(Q3.5) + score(Q3.6)) \
         + score(Q3.1) * gate(Q4.2) * (score(Q3.7) + score(Q3.8))",
    ),
    (
        "transparency",
        2,
        "Transparency",
        'T',
        "score(Q2.1) + score(Q2.2) + score(Q2.3) + score(Q2.4)",
    ),
    (
        "target_rights",
        4,
        "Target Rights",
        'R',
        "(score(Q3.2) + score(Q3.3)) * (score(Q4.1) + score(Q4.2) + score(Q4.3) + score(Q4.4) + score(Q4.5))",
    ),
];

const TOTAL_FORMULA: &str = "S + H + T + R";

fn principle_codes() -> Vec<PrincipleCode> {
    PRINCIPLES
        .iter()
        .map(|(code, _)| code.parse().expect("catalog code"))
        .collect()
}

fn builtin_matrix() -> TheorySupportMatrix {
    let per_theory: Vec<Vec<SupportLevel>> = SUPPORT_BY_THEORY
        .iter()
        .map(|(first, second)| {
            first
                .chars()
                .chain(second.chars())
                .map(|c| c.to_string().parse().expect("support level"))
                .collect()
        })
        .collect();
    let rows = principle_codes()
        .into_iter()
        .enumerate()
        .map(|(i, principle)| MatrixRow {
            principle,
            levels: per_theory.iter().map(|levels| levels[i]).collect(),
        })
        .collect();
    TheorySupportMatrix {
        theories: THEORIES.iter().map(|t| t.to_string()).collect(),
        rows,
    }
}

fn builtin_questions() -> Vec<Question> {
    QUESTIONS
        .iter()
        .map(|q| {
            let tag = QuestionTag::new(q.tag.0, q.tag.1);
            let gate_answer = GATES
                .iter()
                .find(|(t, _)| *t == q.tag)
                .map(|(_, answer)| answer.to_string());
            Question {
                tag,
                text: q.text.to_string(),
                options: vec![
                    AnswerOption {
                        key: "yes".into(),
                        value: q.yes.parse().expect("table weight"),
                    },
                    AnswerOption {
                        key: "no".into(),
                        value: q.no.parse().expect("table weight"),
                    },
                ],
                gate_answer,
                principle_codes: q
                    .principles
                    .iter()
                    .map(|c| c.parse().expect("principle code"))
                    .collect(),
                provenance: Provenance::Curated,
            }
        })
        .collect()
}

/// The built-in ERS v1 framework with `mode` as its default scoring mode.
pub fn builtin_ers_v1(mode: ScoringMode) -> FrameworkDefinition {
    FrameworkDefinition {
        id: ERS_V1_ID.to_string(),
        version: ERS_V1_VERSION.to_string(),
        default_mode: mode,
        questions: builtin_questions(),
        dimensions: DIMENSIONS
            .iter()
            .map(|(id, index, label, symbol, formula)| Dimension {
                id: id.to_string(),
                index: *index,
                label: label.to_string(),
                symbol: crate::tag::DimensionSymbol::new(*symbol).expect("symbol"),
                formula: parse_formula(formula).expect("built-in formula parses"),
            })
            .collect(),
        total_formula: parse_formula(TOTAL_FORMULA).expect("total formula parses"),
        normalization: NormalizationSpec::default(),
        principles: PRINCIPLES
            .iter()
            .map(|(code, statement)| Principle {
                code: code.parse().expect("catalog code"),
                statement: statement.to_string(),
            })
            .collect(),
        theory_matrix: builtin_matrix(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::lint_framework;
    use crate::weight::Weight;

    fn tag(s: &str) -> QuestionTag {
        s.parse().unwrap()
    }

    fn value(fw: &FrameworkDefinition, t: &str, key: &str) -> Weight {
        fw.question(tag(t)).unwrap().option(key).unwrap().value
    }

    #[test]
    fn twenty_three_questions() {
        let fw = builtin_ers_v1(ScoringMode::Literal);
        let tags: Vec<String> = fw.questions.iter().map(|q| q.tag.to_string()).collect();
        let expected: Vec<String> = [(1, 6), (2, 4), (3, 8), (4, 5)]
            .iter()
            .flat_map(|&(d, n)| (1..=n).map(move |o| format!("Q{d}.{o}")))
            .collect();
        assert_eq!(tags, expected);
    }

    #[test]
    fn option_values() {
        let fw = builtin_ers_v1(ScoringMode::Literal);
        assert_eq!(value(&fw, "Q2.1", "yes"), Weight::ZERO);
        assert_eq!(value(&fw, "Q2.1", "no"), "2".parse().unwrap());
        assert_eq!(value(&fw, "Q3.2", "yes"), Weight::ONE);
        assert_eq!(value(&fw, "Q3.2", "no"), Weight::ZERO);
        // exactly one zero option per question
        for q in &fw.questions {
            assert_eq!(q.options.iter().filter(|o| o.value.is_zero()).count(), 1, "{}", q.tag);
        }
    }

    #[test]
    fn formulas_per_mode() {
        let fw = builtin_ers_v1(ScoringMode::Gated);
        let s = fw.dimension("S".parse().unwrap()).unwrap();
        assert_eq!(
            fw.effective_formula(s, ScoringMode::Gated).to_string(),
            "gate(Q1.1) * (score(Q1.2) + score(Q1.3) + score(Q1.4) + score(Q1.5) + score(Q1.6))"
        );
        let lit = builtin_ers_v1(ScoringMode::Literal);
        for d in &lit.dimensions {
            assert!(
                !lit.effective_formula(d, ScoringMode::Literal).has_gates(),
                "{}",
                d.symbol
            );
        }
        let h = lit.dimension("H".parse().unwrap()).unwrap();
        assert_eq!(
            lit.effective_formula(h, ScoringMode::Literal).to_string(),
            "(score(Q3.2) + score(Q3.3)) * score(Q4.1) * (score(Q3.4) + score(Q3.5) + score(Q3.6)) \
             + score(Q3.1) * score(Q4.2) * (score(Q3.7) + score(Q3.8))"
        );
        assert_eq!(lit.total_formula.to_string(), "S + H + T + R");
    }

    #[test]
    fn self_lints_clean() {
        for mode in ScoringMode::ALL {
            assert_eq!(lint_framework(&builtin_ers_v1(mode)), vec![]);
        }
    }

    #[test]
    fn matrix_is_total() {
        let m = builtin_matrix();
        assert_eq!(m.rows.len(), 27);
        assert_eq!(m.cell_count(), 270);
        assert!(m.rows.iter().all(|r| r.levels.len() == 10));
    }

    #[test]
    fn environmental_ethics_is_neutral_on_subject_rights() {
        let m = builtin_matrix();
        for n in 1..=14 {
            let code: PrincipleCode = format!("S{n}").parse().unwrap();
            assert_eq!(m.support_level(code, "Environmental Ethics"), Ok(SupportLevel::N));
        }
    }

    #[test]
    fn every_question_is_scored() {
        let fw = builtin_ers_v1(ScoringMode::Literal);
        for q in &fw.questions {
            assert!(!fw.dimensions_touching(q.tag).is_empty(), "{}", q.tag);
        }
    }

    #[test]
    fn json_round_trip() {
        let fw = builtin_ers_v1(ScoringMode::Literal);
        let text = fw.to_json_pretty();
        assert_eq!(FrameworkDefinition::from_json(&text).unwrap(), fw);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in [
            "id",
            "version",
            "default_mode",
            "questions",
            "dimensions",
            "total_formula",
            "normalization",
            "principles",
            "theory_matrix",
        ] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
        assert_eq!(value["total_formula"], "S + H + T + R");
    }
}
