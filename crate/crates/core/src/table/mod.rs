//! Table loading and comprehension.

mod comprehend;
mod kb;
mod load;
mod recognize;
mod value;

pub use comprehend::{
    comprehend, comprehend_with, ColumnId, ColumnOrigin, ColumnRole, ComprehendedColumn, ComprehendedTable,
    ROW_ID,
};
pub use kb::{build_knowledge_base, KbEntry, KbRef, KnowledgeBase};
pub use load::{load_csv, load_csv_with, load_tsv, CsvDialect, RawTable};
pub(crate) use load::unescape_tsv;
pub use recognize::{parse_cell, Recognizers};
pub use value::{format_number, DateValue, TypedValue};
