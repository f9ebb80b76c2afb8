//! KR-dimension sign table: J² = ε, JD = ε′DJ and, for even j, Jγ = ε″γJ.

use serde::Deserialize;

use crate::error::{NcgError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Primary,
    Alternative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KRSignRow {
    pub j: u8,
    pub eps: i8,
    pub eps_prime: i8,
    pub eps_double_prime: Option<i8>,
    pub variant: Variant,
}

const fn row(j: u8, eps: i8, eps_prime: i8, epp: Option<i8>, variant: Variant) -> KRSignRow {
    KRSignRow { j, eps, eps_prime, eps_double_prime: epp, variant }
}

use Variant::{Alternative, Primary};

pub const KR_TABLE: [KRSignRow; 12] = [
    row(0, 1, 1, Some(1), Primary),
    row(1, 1, -1, None, Primary),
    row(2, -1, 1, Some(-1), Primary),
    row(3, -1, 1, None, Primary),
    row(4, -1, 1, Some(1), Primary),
    row(5, -1, -1, None, Primary),
    row(6, 1, 1, Some(-1), Primary),
    row(7, 1, 1, None, Primary),
    row(0, 1, -1, Some(1), Alternative),
    row(2, 1, -1, Some(-1), Alternative),
    row(4, -1, -1, Some(1), Alternative),
    row(6, -1, -1, Some(-1), Alternative),
];

pub const KR_TABLE_TEXT: &str = include_str!("../data/kr_table.toml");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    row: Vec<KRSignRow>,
}

/// Parses a table in the text format of `data/kr_table.toml`.
pub fn parse_table(text: &str) -> Result<Vec<KRSignRow>> {
    let t: TableFile = toml::from_str(text).map_err(|e| NcgError::InvalidParameter(format!("KR table: {e}")))?;
    Ok(t.row)
}

/// The primary row for `j mod 8`.
pub fn lookup(j: u8) -> Result<KRSignRow> {
    lookup_variant(j, Primary)
}

pub fn lookup_variant(j: u8, variant: Variant) -> Result<KRSignRow> {
    KR_TABLE
        .iter()
        .copied()
        .find(|r| r.j == j % 8 && r.variant == variant)
        .ok_or_else(|| NcgError::InvalidParameter(format!("no {variant:?} KR row for j = {j}")))
}

pub fn sign_str(s: i8) -> &'static str {
    if s > 0 {
        "+"
    } else {
        "-"
    }
}
