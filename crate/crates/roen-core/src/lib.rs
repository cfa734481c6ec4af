//! Core library for a bilingual Romanian-English corpus and tokenizer pipeline.

pub mod corpus;
pub mod normalize;
