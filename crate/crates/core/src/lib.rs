// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod hand;
pub mod knowledge_base;
pub mod learner;
pub mod parser;
pub mod pipeline;
