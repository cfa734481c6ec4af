//! Pattern-based PII masking.
//!
//! Matches are replaced by category placeholders like `<|email|>`. The
//! placeholders contain no characters any rule can match, survive
//! normalization (lowercase, no diacritics), and are registered as tokenizer
//! special tokens, so masking is idempotent and masked text tokenizes the
//! placeholder as a single unit.
//!
//! Rules apply in list order; a later rule never claims bytes already claimed
//! by an earlier one. Within a rule, matches are taken left to right.

use std::collections::BTreeMap;
use std::path::Path;

use regex::Regex;
use serde::Serialize;
use thiserror::Error;

use crate::corpus::Document;

#[derive(Debug, Error)]
pub enum PiiError {
    #[error("invalid pattern for category `{category}`: {source}")]
    Pattern {
        category: String,
        source: regex::Error,
    },
    #[error("duplicate category `{0}`")]
    DuplicateCategory(String),
    #[error("placeholder `{placeholder}` is matchable by rule `{category}`; masking would not be idempotent")]
    MatchablePlaceholder {
        category: String,
        placeholder: String,
    },
    #[error("{path}:{line}: malformed rule line (expected `category<TAB>pattern<TAB>placeholder`)")]
    MalformedRuleLine { path: String, line: usize },
    #[error("cannot read rules file {path}: {source}")]
    RulesIo {
        path: String,
        source: std::io::Error,
    },
}

/// One masking rule.
#[derive(Debug, Clone)]
pub struct PiiRule {
    pub category: String,
    pub pattern: Regex,
    pub placeholder: String,
}

/// Ordered rule list. Earlier rules win on overlap.
#[derive(Debug, Clone)]
pub struct PiiRuleSet {
    rules: Vec<PiiRule>,
}

impl PiiRuleSet {
    pub fn new(rules: Vec<(String, String, String)>) -> Result<Self, PiiError> {
        let mut compiled = Vec::with_capacity(rules.len());
        let mut seen = std::collections::HashSet::new();
        for (category, pattern, placeholder) in rules {
            if !seen.insert(category.clone()) {
                return Err(PiiError::DuplicateCategory(category));
            }
            let pattern = Regex::new(&pattern).map_err(|source| PiiError::Pattern {
                category: category.clone(),
                source,
            })?;
            compiled.push(PiiRule {
                category,
                pattern,
                placeholder,
            });
        }
        // Idempotence: no placeholder may be matchable by any rule.
        for rule in &compiled {
            for other in &compiled {
                if other.pattern.is_match(&rule.placeholder) {
                    return Err(PiiError::MatchablePlaceholder {
                        category: other.category.clone(),
                        placeholder: rule.placeholder.clone(),
                    });
                }
            }
        }
        Ok(PiiRuleSet { rules: compiled })
    }

    /// Default rule set: email, Romanian IBAN, CNP (13-digit personal code),
    /// phone (+40 / 0040 / 07xx with separators), IPv4.
    ///
    /// Longer, more specific numeric patterns come before the phone rule so
    /// a CNP or IBAN is never half-eaten as a phone number. Patterns are
    /// case-insensitive so masking also works on already-normalized text.
    pub fn default_rules() -> Self {
        let rules = vec![
            (
                "email".to_string(),
                r"(?i)\b[a-z0-9._%+-]+@[a-z0-9](?:[a-z0-9-]*[a-z0-9])?(?:\.[a-z0-9](?:[a-z0-9-]*[a-z0-9])?)*\.[a-z]{2,}\b".to_string(),
                "<|email|>".to_string(),
            ),
            (
                "iban".to_string(),
                r"(?i)\bRO\d{2}[ ]?[a-z]{4}(?:[ ]?[a-z0-9]{4}){4}\b".to_string(),
                "<|iban|>".to_string(),
            ),
            (
                "cnp".to_string(),
                r"\b[1-8]\d{12}\b".to_string(),
                "<|cnp|>".to_string(),
            ),
            (
                "phone".to_string(),
                r"(?:\+40|0040|\b0)[ .-]?7\d{2}[ .-]?\d{3}[ .-]?\d{3}\b".to_string(),
                "<|phone|>".to_string(),
            ),
            (
                "ip".to_string(),
                r"\b(?:(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)\.){3}(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)\b".to_string(),
                "<|ip|>".to_string(),
            ),
        ];
        PiiRuleSet::new(rules).expect("builtin rules are valid")
    }

    /// Loads rules from a text file, one per line:
    /// `category<TAB>pattern<TAB>placeholder`. Blank lines and lines starting
    /// with `#` are skipped.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, PiiError> {
        let path_str = path.as_ref().display().to_string();
        let content = std::fs::read_to_string(&path).map_err(|source| PiiError::RulesIo {
            path: path_str.clone(),
            source,
        })?;
        let mut rules = Vec::new();
        for (i, line) in content.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, '\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(cat), Some(pat), Some(ph)) if !cat.is_empty() && !ph.is_empty() => {
                    rules.push((cat.to_string(), pat.to_string(), ph.to_string()));
                }
                _ => {
                    return Err(PiiError::MalformedRuleLine {
                        path: path_str,
                        line: i + 1,
                    })
                }
            }
        }
        PiiRuleSet::new(rules)
    }

    pub fn rules(&self) -> &[PiiRule] {
        &self.rules
    }

    /// The placeholder strings, in rule order (tokenizer special tokens).
    pub fn placeholders(&self) -> Vec<String> {
        self.rules.iter().map(|r| r.placeholder.clone()).collect()
    }
}

/// Aggregated masking counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MaskReport {
    /// Replacements per category, over all documents.
    pub replacements: BTreeMap<String, u64>,
    pub documents_touched: u64,
    pub documents_processed: u64,
}

impl MaskReport {
    pub fn total_replacements(&self) -> u64 {
        self.replacements.values().sum()
    }

    pub fn merge(&mut self, other: &MaskReport) {
        for (cat, n) in &other.replacements {
            *self.replacements.entry(cat.clone()).or_insert(0) += n;
        }
        self.documents_touched += other.documents_touched;
        self.documents_processed += other.documents_processed;
    }
}

/// Masks all rule matches in `text`, returning the masked text and
/// per-category replacement counts.
///
/// Non-matching bytes are copied verbatim; output is deterministic in
/// (text, rules).
pub fn mask_pii(text: &str, rules: &PiiRuleSet) -> (String, BTreeMap<String, u64>) {
    // Claimed spans over the original text, kept sorted and non-overlapping.
    let mut spans: Vec<(usize, usize, usize)> = Vec::new(); // (start, end, rule idx)
    for (rule_idx, rule) in rules.rules.iter().enumerate() {
        for m in rule.pattern.find_iter(text) {
            let (start, end) = (m.start(), m.end());
            let overlaps = spans
                .iter()
                .any(|&(s, e, _)| start < e && s < end);
            if !overlaps {
                spans.push((start, end, rule_idx));
            }
        }
    }
    spans.sort_unstable_by_key(|&(s, _, _)| s);

    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for (start, end, rule_idx) in spans {
        let rule = &rules.rules[rule_idx];
        out.push_str(&text[cursor..start]);
        out.push_str(&rule.placeholder);
        *counts.entry(rule.category.clone()).or_insert(0) += 1;
        cursor = end;
    }
    out.push_str(&text[cursor..]);
    (out, counts)
}

/// Masks each document's text, preserving metadata, and aggregates a report.
pub fn mask_corpus<'a>(
    docs: impl IntoIterator<Item = &'a mut Document>,
    rules: &PiiRuleSet,
) -> MaskReport {
    let mut report = MaskReport::default();
    for doc in docs {
        let (masked, counts) = mask_pii(&doc.text, rules);
        report.documents_processed += 1;
        if !counts.is_empty() {
            report.documents_touched += 1;
            for (cat, n) in counts {
                *report.replacements.entry(cat).or_insert(0) += n;
            }
        }
        doc.text = masked;
    }
    report
}
