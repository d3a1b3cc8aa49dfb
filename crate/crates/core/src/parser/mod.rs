//! Natural-language object descriptions to partial feature queries.
//!
//! The pipeline is: tokenize and tag, chunk with tag patterns, extract
//! measurements and descriptor keywords, then optionally impute missing
//! dimensions from the knowledge base.

mod chunker;
mod extract;
mod impute;
mod lexicon;
mod numbers;
mod score;
mod tagger;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knowledge_base::{Attribute, FeatureQuery, KnowledgeBase};

pub use chunker::{
    chunk, Chunk, ChunkKind, ChunkPattern, QUALITATIVE_PATTERN, QUANTITATIVE_PATTERN,
};
pub use extract::{extract_fields, render};
pub use impute::{impute, median_ratio};
pub use lexicon::{Descriptor, Lexicon, Quantity, Unit};
pub use numbers::parse_number;
pub use score::{
    read_corpus, score_parser, ConfusionMatrix, CorpusEntry, ParserScore, RegressionScore,
};
pub use tagger::{lemmatize, tokenize_and_tag, Span, Tag, TaggedToken};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("description is empty")]
    EmptyInput,
    #[error("invalid chunk pattern: {0}")]
    Pattern(String),
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error("corpus refers to unknown object id {0}")]
    UnknownTruth(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Where in the description a value came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub span: Span,
    pub evidence: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParseResult {
    pub query: FeatureQuery,
    pub provenance: BTreeMap<Attribute, Provenance>,
    /// Attributes filled in by imputation rather than read from the text.
    pub imputed: Vec<Attribute>,
    pub warnings: Vec<String>,
}

/// Description parser with a lexicon and two chunk patterns.
#[derive(Debug, Clone)]
pub struct Parser {
    lexicon: Lexicon,
    quantitative: ChunkPattern,
    qualitative: ChunkPattern,
}

impl Default for Parser {
    fn default() -> Self {
        Parser::new(Lexicon::builtin())
    }
}

impl Parser {
    pub fn new(lexicon: Lexicon) -> Self {
        Parser {
            lexicon,
            quantitative: ChunkPattern::quantitative(),
            qualitative: ChunkPattern::qualitative(),
        }
    }

    /// Replaces the measurement chunk pattern.
    pub fn with_pattern(mut self, pattern: &str) -> Result<Self, ParseError> {
        self.quantitative = ChunkPattern::new(pattern)?;
        Ok(self)
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn chunks(&self, tokens: &[TaggedToken]) -> Vec<Chunk> {
        chunk(tokens, &self.quantitative, &self.qualitative)
    }

    /// Parses without imputation.
    pub fn parse(&self, description: &str) -> Result<ParseResult, ParseError> {
        let tokens = tokenize_and_tag(description)?;
        let chunks = self.chunks(&tokens);
        Ok(extract_fields(&chunks, &tokens, &self.lexicon))
    }

    /// Parses, then imputes missing dimensions from `kb`.
    pub fn parse_with(
        &self,
        description: &str,
        kb: &KnowledgeBase,
    ) -> Result<ParseResult, ParseError> {
        Ok(impute(&self.parse(description)?, kb))
    }
}

/// Parses with the built-in lexicon and patterns.
pub fn parse_description(description: &str) -> Result<ParseResult, ParseError> {
    Parser::default().parse(description)
}
