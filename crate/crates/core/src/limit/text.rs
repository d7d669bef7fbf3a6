//! Natural-language templates for queries and documents, and the inverse
//! parsers used by the phrase-level oracle retriever.

use crate::error::{Error, Result};

pub fn query_text(attribute: &str) -> String {
    format!("Who likes {attribute}?")
}

/// `"{name} likes a, b, and c."`, `"{name} likes a and b."` or `"{name} likes a."`.
pub fn doc_text(name: &str, attributes: &[String]) -> String {
    let list = match attributes {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} and {b}"),
        [init @ .., last] => format!("{}, and {last}", init.join(", ")),
    };
    format!("{name} likes {list}.")
}

/// Recovers the attribute of a query produced by [`query_text`].
pub fn parse_query(text: &str) -> Option<&str> {
    text.trim().strip_prefix("Who likes ")?.strip_suffix('?').filter(|a| !a.is_empty())
}

/// Recovers the attribute phrases of a document produced by [`doc_text`].
pub fn parse_doc(text: &str) -> Result<Vec<String>> {
    let bad = |msg: &str| Error::parse(0, format!("{msg}: '{}'", truncate(text)));
    let (_, list) = text.trim().split_once(" likes ").ok_or_else(|| bad("missing ' likes '"))?;
    let list = list.strip_suffix('.').ok_or_else(|| bad("missing final period"))?;
    let items: Vec<&str> = list.split(", ").collect();
    let phrases: Vec<String> = match items.as_slice() {
        [single] => match single.split_once(" and ") {
            Some((a, b)) => vec![a.to_string(), b.to_string()],
            None => vec![single.to_string()],
        },
        [init @ .., last] => {
            let last = last.strip_prefix("and ").ok_or_else(|| bad("final item lacks 'and'"))?;
            init.iter().map(|s| s.to_string()).chain(std::iter::once(last.to_string())).collect()
        }
        [] => unreachable!("split yields at least one item"),
    };
    if phrases.iter().any(|p| p.is_empty() || p.contains(" and ") || p.contains(',')) {
        return Err(bad("malformed attribute list"));
    }
    Ok(phrases)
}

fn truncate(s: &str) -> String {
    s.chars().take(60).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn templates_round_trip() {
        for list in [attrs(&["tea"]), attrs(&["tea", "sports cars"]), attrs(&["tea", "sports cars", "Brivan kites"])] {
            let text = doc_text("Jon Smith", &list);
            assert_eq!(parse_doc(&text).unwrap(), list);
        }
        assert_eq!(doc_text("Jon Smith", &attrs(&["a", "b", "c"])), "Jon Smith likes a, b, and c.");
        assert_eq!(parse_query(&query_text("Hawaiian pizza")), Some("Hawaiian pizza"));
        assert_eq!(parse_query("What is this?"), None);
    }

    #[test]
    fn corrupted_documents_fail_to_parse() {
        assert!(parse_doc("Jon Smith adores tea.").is_err());
        assert!(parse_doc("Jon Smith likes tea, coffee, and jazz").is_err());
        assert!(parse_doc("Jon Smith likes tea, coffee, jazz.").is_err());
        assert!(parse_doc("Jon Smith likes tea and coffee, and jazz.").is_err());
    }
}
