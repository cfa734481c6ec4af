//! Uncased, diacritic-folded text normalization.
//!
//! Matches the tokenizer's input convention: canonical (NFC) composition,
//! full Unicode lowercasing, then folding of the five Romanian letters
//! ă â î ș ț to a a i s t. An extended map additionally folds every Latin
//! letter with a canonical diacritic decomposition to its base letter
//! (covering cedilla variants like ş/ţ as well as é, ü, ...).

use std::collections::HashMap;

use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::Document;

/// The five Romanian letters and their replacements, lowercase forms.
/// Both ă and â fold to a; uppercase forms are reached by lowercasing first.
pub const ROMANIAN_FOLDS: [(char, char); 5] = [
    ('\u{0103}', 'a'), // ă
    ('\u{00E2}', 'a'), // â
    ('\u{00EE}', 'i'), // î
    ('\u{0219}', 's'), // ș (comma below)
    ('\u{021B}', 't'), // ț (comma below)
];

#[derive(Debug, Error)]
pub enum FoldingMapError {
    #[error("replacement `{0}` also appears as a source character; map would not be idempotent")]
    ReplacementIsSource(char),
    #[error("duplicate source character `{0}`")]
    DuplicateSource(char),
}

/// Ordered per-character replacement table.
///
/// Replacement characters never appear as sources, so applying the map twice
/// equals applying it once.
#[derive(Debug, Clone)]
pub struct FoldingMap {
    pairs: Vec<(char, char)>,
    lookup: HashMap<char, char>,
}

impl FoldingMap {
    pub fn new(pairs: Vec<(char, char)>) -> Result<Self, FoldingMapError> {
        let mut lookup = HashMap::with_capacity(pairs.len());
        for &(src, _) in &pairs {
            if lookup.insert(src, '\0').is_some() {
                return Err(FoldingMapError::DuplicateSource(src));
            }
        }
        for &(_, dst) in &pairs {
            if lookup.contains_key(&dst) {
                return Err(FoldingMapError::ReplacementIsSource(dst));
            }
        }
        for &(src, dst) in &pairs {
            lookup.insert(src, dst);
        }
        Ok(FoldingMap { pairs, lookup })
    }

    /// Default map: exactly the five Romanian letters.
    pub fn romanian() -> Self {
        FoldingMap::new(ROMANIAN_FOLDS.to_vec()).expect("builtin map is valid")
    }

    /// Extended map: the Romanian five plus every lowercase Latin character
    /// in U+00C0..U+024F whose canonical decomposition is an ASCII letter
    /// followed by combining marks.
    pub fn extended() -> Self {
        let mut pairs = ROMANIAN_FOLDS.to_vec();
        let builtin: Vec<char> = ROMANIAN_FOLDS.iter().map(|&(s, _)| s).collect();
        for cp in 0x00C0u32..=0x024F {
            let Some(c) = char::from_u32(cp) else { continue };
            if builtin.contains(&c) || !c.is_lowercase() {
                continue;
            }
            let mut decomp = c.nfd();
            let Some(base) = decomp.next() else { continue };
            if base.is_ascii_lowercase() && decomp.clone().count() > 0 && decomp.all(is_combining_mark)
            {
                pairs.push((c, base));
            }
        }
        FoldingMap::new(pairs).expect("generated map is valid")
    }

    pub fn fold_char(&self, c: char) -> char {
        *self.lookup.get(&c).unwrap_or(&c)
    }

    pub fn pairs(&self) -> &[(char, char)] {
        &self.pairs
    }
}

/// Replaces every source character of the map 1:1; all others pass through.
/// Output character count equals input character count.
pub fn fold_diacritics(text: &str, map: &FoldingMap) -> String {
    text.chars().map(|c| map.fold_char(c)).collect()
}

/// Canonical composition, full Unicode lowercasing, then diacritic folding,
/// iterated to a fixed point.
///
/// A single pass already covers real-world text. The iteration handles
/// adversarial combining sequences where folding exposes a base letter that
/// then recomposes with a leftover mark (e.g. "ă\u{0302}" → "a\u{0302}" → â).
pub fn normalize_text_with(text: &str, map: &FoldingMap) -> String {
    let mut current = text.to_string();
    loop {
        let composed: String = current.nfc().collect();
        let lowered = composed.to_lowercase();
        let folded = fold_diacritics(&lowered, map);
        if folded == current {
            return folded;
        }
        current = folded;
    }
}

/// [`normalize_text_with`] under the default Romanian map.
pub fn normalize_text(text: &str) -> String {
    normalize_text_with(text, &FoldingMap::romanian())
}

/// Normalizes a document's text in place; metadata is untouched.
pub fn normalize_document(doc: &mut Document, map: &FoldingMap) {
    doc.text = normalize_text_with(&doc.text, map);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Lang;

    #[test]
    fn folds_the_papers_example() {
        let map = FoldingMap::romanian();
        assert_eq!(fold_diacritics("țânțar", &map), "tantar");
    }

    #[test]
    fn empty_input_is_empty() {
        assert_eq!(fold_diacritics("", &FoldingMap::romanian()), "");
        assert_eq!(normalize_text(""), "");
    }

    #[test]
    fn fold_preserves_character_count() {
        let map = FoldingMap::romanian();
        for text in ["țânțar", "ăâîșț mixed ascii", "ĂÂÎȘȚ", "日本語 text"] {
            assert_eq!(
                fold_diacritics(text, &map).chars().count(),
                text.chars().count()
            );
        }
    }

    #[test]
    fn per_character_oracle_on_romanian_sentence() {
        // Independent oracle: match each char against the raw table.
        let table = [('ă', 'a'), ('â', 'a'), ('î', 'i'), ('ș', 's'), ('ț', 't')];
        let sentence = "În orașul București, țăranii își vând produsele în piață.";
        let map = FoldingMap::romanian();
        let folded = fold_diacritics(sentence, &map);
        let expected: String = sentence
            .chars()
            .map(|c| table.iter().find(|&&(s, _)| s == c).map_or(c, |&(_, d)| d))
            .collect();
        assert_eq!(folded, expected);
    }

    #[test]
    fn normalize_lowercases_then_folds() {
        assert_eq!(normalize_text("Șoseaua Ștefan"), "soseaua stefan");
        assert_eq!(normalize_text("Încă"), "inca");
    }

    #[test]
    fn exhaustive_ten_diacritic_forms() {
        let cases = [
            ("ă", "a"),
            ("â", "a"),
            ("î", "i"),
            ("ș", "s"),
            ("ț", "t"),
            ("Ă", "a"),
            ("Â", "a"),
            ("Î", "i"),
            ("Ș", "s"),
            ("Ț", "t"),
        ];
        for (input, expected) in cases {
            assert_eq!(normalize_text(input), expected, "input {input}");
        }
    }

    #[test]
    fn already_normalized_is_unchanged() {
        let text = "soseaua stefan cel mare nr 12";
        assert_eq!(normalize_text(text), text);
    }

    #[test]
    fn decomposed_input_matches_precomposed() {
        // s + combining comma below vs precomposed ș
        let decomposed = "s\u{0326}oseaua S\u{0326}tefan";
        let precomposed = "șoseaua Ștefan";
        assert_eq!(normalize_text(decomposed), normalize_text(precomposed));
        assert_eq!(normalize_text(decomposed), "soseaua stefan");
    }

    #[test]
    fn idempotent_on_adversarial_combining_sequences() {
        // Folding ă exposes `a` which recomposes with the leftover circumflex.
        for text in ["ă\u{0302}", "ă\u{0302}\u{0306}", "İstanbul", "ș\u{0306}"] {
            let once = normalize_text(text);
            assert_eq!(normalize_text(&once), once, "input {:?}", text);
        }
    }

    #[test]
    fn non_romanian_diacritics_pass_through_by_default() {
        assert_eq!(normalize_text("café über"), "café über");
    }

    #[test]
    fn extended_map_folds_cedilla_variants_and_general_latin() {
        let map = FoldingMap::extended();
        // Cedilla ş (U+015F) and ţ (U+0163) appear widely in Romanian web text.
        assert_eq!(normalize_text_with("ş\u{0163} café über", &map), "st cafe uber");
        assert_eq!(normalize_text_with("Şoseaua Ţării", &map), "soseaua tarii");
    }

    #[test]
    fn replacement_as_source_is_rejected() {
        let err = FoldingMap::new(vec![('a', 'b'), ('c', 'a')]).unwrap_err();
        assert!(matches!(err, FoldingMapError::ReplacementIsSource('a')));
    }

    #[test]
    fn normalize_document_preserves_metadata() {
        let mut doc = Document::new("d1", "Încă", Lang::Ro, "wiki");
        doc.extra.insert("url".into(), serde_json::Value::from("x"));
        normalize_document(&mut doc, &FoldingMap::romanian());
        assert_eq!(doc.text, "inca");
        assert_eq!(doc.id, "d1");
        assert_eq!(doc.lang, Lang::Ro);
        assert_eq!(doc.source, "wiki");
        assert_eq!(doc.extra["url"], "x");
    }

    #[test]
    fn empty_text_document_stays_empty() {
        let mut doc = Document::new("d1", "", Lang::En, "web");
        let before = doc.clone();
        normalize_document(&mut doc, &FoldingMap::romanian());
        assert_eq!(doc, before);
    }
}
