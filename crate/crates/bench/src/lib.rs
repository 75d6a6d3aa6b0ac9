//! Synthetic inputs shared by the benchmarks.

use chrono::{Datelike, NaiveDate};
use statmode_core::corpus::IssueRecord;

const FILLER: &str = "La séance de la Chambre des députés s'est ouverte à deux heures. \
    Le ministre a présenté le budget des travaux publics et plusieurs pétitions \
    ont été renvoyées à la commission. ";

/// A daily archive from `first_year` onward with `issues` records in total.
/// Every seventh issue mentions "statistique", every eleventh "Charles Dupin".
pub fn archive(first_year: i32, issues: usize, paragraphs: usize) -> Vec<IssueRecord> {
    let start = NaiveDate::from_ymd_opt(first_year, 1, 1).unwrap();
    (0..issues)
        .map(|i| {
            let date = start + chrono::Days::new(i as u64);
            let mut text = FILLER.repeat(paragraphs);
            if i % 7 == 0 {
                text.push_str("Les tableaux de la Statistique générale sont publiés. ");
            }
            if i % 11 == 0 {
                text.push_str("M. le baron Charles Dupin a pris la parole. ");
            }
            IssueRecord {
                id: format!("{}-{i:06}", date.year()),
                date,
                text,
            }
        })
        .collect()
}
