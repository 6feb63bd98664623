//! Table reproduction: best Construction 2 codes grown from maximum
//! non-overlapping codes.
//!
//! For a row `(q, n)` the oracle first finds `M`, the largest
//! non-overlapping code of length `n - shift` (`shift` is 1 for
//! [`Table::One`] and 2 for [`Table::Two`]). Every family of depth
//! `n - shift - 1` whose Construction 1 code at that length has `M` words is
//! then fed to Construction 2 with `k = n - shift - 1` at length `n`, and
//! the largest result is reported. A row is bold when that value beats
//! `M q^shift`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::constructions::{code_size_1k, non_overlapping, overlap_free_1k, ConstructionError};
use crate::family::{FamilyEnumerator, PartitionFamily};
use crate::search::{max_code, SearchError, SearchOptions};
use crate::word::{verify_overlap_free, Alphabet, WordError};

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("unknown table {0:?}, expected table1 or table2")]
    Unknown(String),
    #[error("row n={n} is too short for {table}")]
    TooShort { table: Table, n: usize },
    #[error("best code for q={q}, n={n} failed verification")]
    Verification { q: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Table {
    #[serde(rename = "table1")]
    One,
    #[serde(rename = "table2")]
    Two,
}

impl Table {
    /// Length difference between the row and the seed code.
    pub fn shift(self) -> usize {
        match self {
            Table::One => 1,
            Table::Two => 2,
        }
    }

    /// Smallest row length with a nonempty window.
    pub fn min_n(self) -> usize {
        self.shift() + 2
    }

    pub fn depth(self, n: usize) -> usize {
        n - self.shift() - 1
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Table::One => "table1",
            Table::Two => "table2",
        })
    }
}

impl FromStr for Table {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, TableError> {
        match s {
            "table1" | "1" => Ok(Table::One),
            "table2" | "2" => Ok(Table::Two),
            _ => Err(TableError::Unknown(s.to_string())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TableOptions {
    pub search: SearchOptions,
    /// Cap on enumerated families per row.
    pub max_families: Option<u64>,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { search: SearchOptions::default(), max_families: Some(1_000_000) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub table: Table,
    pub q: usize,
    pub n: usize,
    pub k: usize,
    /// Largest non-overlapping code of length `n - shift`.
    pub seed_size: u64,
    pub seed_exact: bool,
    pub families: u64,
    pub seed_families: u64,
    #[serde(with = "crate::bignum::option")]
    pub value: Option<BigUint>,
    #[serde(with = "crate::bignum")]
    pub baseline: BigUint,
    pub bold: bool,
    /// Family enumeration or the seed search stopped early.
    pub truncated: bool,
    pub best_family: Option<String>,
}

impl TableRow {
    pub const CSV_HEADER: &'static str =
        "table,q,n,k,seed_size,seed_exact,families,seed_families,value,baseline,bold,truncated";

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.table,
            self.q,
            self.n,
            self.k,
            self.seed_size,
            self.seed_exact,
            self.families,
            self.seed_families,
            self.value.as_ref().map(ToString::to_string).unwrap_or_default(),
            self.baseline,
            self.bold,
            self.truncated
        )
    }
}

/// One row of `table` at `(q, n)`.
pub fn table_row(table: Table, q: usize, n: usize, opts: &TableOptions) -> Result<TableRow, TableError> {
    if n < table.min_n() {
        return Err(TableError::TooShort { table, n });
    }
    let alphabet = Alphabet::new(q)?;
    let m = n - table.shift();
    let k = table.depth(n);
    let seed = max_code(q, m, 1, m - 1, &opts.search)?;
    let seed_size = seed.size as u64;

    let mut families = FamilyEnumerator::new(alphabet, k);
    if let Some(cap) = opts.max_families {
        families = families.with_budget(cap);
    }
    let mut count = 0u64;
    let mut seed_families = 0u64;
    let mut best: Option<(BigUint, PartitionFamily)> = None;
    for f in families.by_ref() {
        count += 1;
        if non_overlapping(&f, m)?.len() as u64 != seed_size {
            continue;
        }
        seed_families += 1;
        let size = code_size_1k(&f, n, k)?;
        if best.as_ref().is_none_or(|(b, _)| size > *b) {
            best = Some((size, f));
        }
    }
    let truncated = families.is_truncated() || !seed.exact;
    let baseline = BigUint::from(seed_size) * BigUint::from(q).pow(table.shift() as u32);
    if let Some((size, f)) = &best {
        if size.to_u64().is_some_and(|s| s <= 1 << 20) {
            let code = overlap_free_1k(f, n, k)?;
            let ok = BigUint::from(code.len()) == *size && verify_overlap_free(&code, 1, k)?.is_ok();
            if !ok {
                return Err(TableError::Verification { q, n });
            }
        }
    }
    Ok(TableRow {
        table,
        q,
        n,
        k,
        seed_size,
        seed_exact: seed.exact,
        families: count,
        seed_families,
        bold: best.as_ref().is_some_and(|(v, _)| *v > baseline),
        value: best.as_ref().map(|(v, _)| v.clone()),
        baseline,
        truncated,
        best_family: best.map(|(_, f)| f.to_string()),
    })
}

/// Rows `min_n..=n_max` of `table` for one alphabet size.
pub fn reproduce_table(table: Table, q: usize, n_max: usize, opts: &TableOptions) -> Result<Vec<TableRow>, TableError> {
    (table.min_n()..=n_max).map(|n| table_row(table, q, n, opts)).collect()
}
