//! The checked-in row manifest and its conversion into catalog entries.

use pwpn_core::catalog::{
    CatalogEntry, Claim, Constructor, Disposition, Domain, EltSet, Formula, Param, Reading, Table,
};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const MANIFEST: &str = include_str!("../catalog/manifest.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    row: Vec<RowRecord>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRecord {
    pub name: String,
    pub range: Option<String>,
    pub elts: Option<String>,
    pub fns: Option<Vec<String>>,
    pub value: Option<String>,
    pub sample: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AltRecord {
    pub label: String,
    pub field: Option<String>,
    pub d: Option<String>,
    pub f: Option<String>,
    pub when: Option<String>,
    pub c: Option<String>,
    pub claim: Option<String>,
    #[serde(default)]
    pub param: Vec<ParamRecord>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowRecord {
    pub id: String,
    pub table: u8,
    pub text: String,
    pub sha256: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub skip: Option<String>,
    pub note: Option<String>,
    pub constructor: String,
    pub field: String,
    pub d: Option<String>,
    pub f: Option<String>,
    pub when: Option<String>,
    pub c: Option<String>,
    pub claim: String,
    #[serde(default)]
    pub param: Vec<ParamRecord>,
    #[serde(default)]
    pub alt: Vec<AltRecord>,
}

impl RowRecord {
    /// Hex SHA-256 of the row text.
    pub fn text_hash(&self) -> String {
        text_hash(&self.text)
    }
}

pub fn text_hash(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

fn formula(src: &str, row: &str) -> Result<Formula, CliError> {
    Formula::parse(src).map_err(|e| CliError::Usage(format!("{row}: {e}")))
}

fn param(p: &ParamRecord, row: &str) -> Result<Param, CliError> {
    let kinds = [p.range.is_some(), p.elts.is_some(), p.fns.is_some(), p.value.is_some()];
    if kinds.iter().filter(|&&k| k).count() != 1 {
        return Err(CliError::Usage(format!("{row}: parameter {} needs exactly one of range/elts/fns/value", p.name)));
    }
    let domain = if let Some(r) = &p.range {
        let (lo, hi) = r
            .split_once("..=")
            .ok_or_else(|| CliError::Usage(format!("{row}: range `{r}` must be lo..=hi")))?;
        Domain::Range { lo: formula(lo, row)?, hi: formula(hi, row)?, sample: p.sample }
    } else if let Some(e) = &p.elts {
        let set = match e.trim() {
            "all" => EltSet::All,
            "nonzero" => EltSet::Nonzero,
            "prime" => EltSet::Prime,
            s => match s.strip_prefix("sub(").and_then(|r| r.strip_suffix(')')) {
                Some(m) => EltSet::Subfield(formula(m, row)?),
                None => return Err(CliError::Usage(format!("{row}: unknown element set `{s}`"))),
            },
        };
        Domain::Elements { set, sample: p.sample }
    } else if let Some(bodies) = &p.fns {
        Domain::Functions(bodies.iter().map(|b| formula(b, row)).collect::<Result<_, _>>()?)
    } else {
        Domain::Value(formula(p.value.as_deref().unwrap_or_default(), row)?)
    };
    Ok(Param { name: p.name.clone(), domain })
}

fn reading(row: &RowRecord, alt: Option<&AltRecord>) -> Result<Reading, CliError> {
    let id = row.id.as_str();
    let pick = |a: Option<&Option<String>>, base: &Option<String>| -> Option<String> {
        a.and_then(|o| o.clone()).or_else(|| base.clone())
    };
    let field = alt.and_then(|a| a.field.clone()).unwrap_or_else(|| row.field.clone());
    let when = pick(alt.map(|a| &a.when), &row.when).unwrap_or_else(|| "true".into());
    let c = pick(alt.map(|a| &a.c), &row.c).unwrap_or_else(|| "true".into());
    let claim = alt.and_then(|a| a.claim.clone()).unwrap_or_else(|| row.claim.clone());
    let constructor = match row.constructor.as_str() {
        "monomial" => {
            let d = pick(alt.map(|a| &a.d), &row.d).ok_or_else(|| CliError::Usage(format!("{id}: missing d")))?;
            Constructor::Monomial(formula(&d, id)?)
        }
        "polynomial" => {
            let f = pick(alt.map(|a| &a.f), &row.f).ok_or_else(|| CliError::Usage(format!("{id}: missing f")))?;
            Constructor::Polynomial(formula(&f, id)?)
        }
        other => return Err(CliError::Usage(format!("{id}: unknown constructor `{other}`"))),
    };
    let params = match alt {
        Some(a) if !a.param.is_empty() => &a.param,
        _ => &row.param,
    };
    Ok(Reading {
        label: alt.map_or_else(|| "as printed".to_string(), |a| a.label.clone()),
        field: formula(&field, id)?,
        params: params.iter().map(|p| param(p, id)).collect::<Result<_, _>>()?,
        when: formula(&when, id)?,
        constructor,
        c: formula(&c, id)?,
        claim: Claim::parse(&claim).map_err(|e| CliError::Usage(format!("{id}: {e}")))?,
    })
}

pub fn to_entry(row: &RowRecord) -> Result<CatalogEntry, CliError> {
    let table = match row.table {
        1 => Table::Monomials,
        2 => Table::Polynomials,
        t => return Err(CliError::Usage(format!("{}: unknown table {t}", row.id))),
    };
    let mut readings = vec![reading(row, None)?];
    for a in &row.alt {
        readings.push(reading(row, Some(a))?);
    }
    let disposition = match &row.skip {
        None => Disposition::Active,
        Some(s) => match s.split_once(':') {
            Some(("ambiguous", why)) => Disposition::SkipAmbiguous(why.trim().to_string()),
            Some(("out of scope", why)) => Disposition::OutOfScope(why.trim().to_string()),
            _ => return Err(CliError::Usage(format!("{}: unknown skip record `{s}`", row.id))),
        },
    };
    Ok(CatalogEntry {
        id: row.id.clone(),
        table,
        row_text: row.text.clone(),
        reference: row.reference.clone(),
        readings,
        disposition,
        note: row.note.clone(),
    })
}

pub fn parse_records(src: &str) -> Result<Vec<RowRecord>, CliError> {
    let file: ManifestFile = toml::from_str(src).map_err(|e| CliError::Usage(format!("manifest: {e}")))?;
    Ok(file.row)
}

/// The built-in manifest as catalog entries, in row order.
pub fn load() -> Result<Vec<CatalogEntry>, CliError> {
    parse_records(MANIFEST)?.iter().map(to_entry).collect()
}

/// Expected row ids: T1-01..T1-47 and T2-01..T2-22.
pub fn expected_ids() -> Vec<String> {
    let mut ids: Vec<String> = (1..=47).map(|i| format!("T1-{i:02}")).collect();
    ids.extend((1..=22).map(|i| format!("T2-{i:02}")));
    ids
}
