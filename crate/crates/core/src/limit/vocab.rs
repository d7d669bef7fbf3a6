//! Attribute vocabularies and person-name lists.

use std::collections::HashSet;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tokens that would make an attribute ambiguous inside the document and
/// query templates.
const RESERVED_WORDS: [&str; 3] = ["and", "likes", "who"];

fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Ordered list of distinct attributes a person can like.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeVocabulary {
    attributes: Vec<String>,
}

impl AttributeVocabulary {
    /// Validates uniqueness (after case folding and whitespace collapsing)
    /// and that no attribute collides with the text templates.
    pub fn new(attributes: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(attributes.len());
        let mut cleaned = Vec::with_capacity(attributes.len());
        for raw in attributes {
            let attr = raw.split_whitespace().collect::<Vec<_>>().join(" ");
            if attr.is_empty() {
                return Err(Error::Vocab("empty attribute".into()));
            }
            if attr.contains([',', '.', '?', '\t']) {
                return Err(Error::Vocab(format!("attribute '{attr}' contains template punctuation")));
            }
            if attr.split(' ').any(|w| RESERVED_WORDS.contains(&w.to_lowercase().as_str())) {
                return Err(Error::Vocab(format!("attribute '{attr}' contains a reserved template word")));
            }
            if !seen.insert(normalize(&attr)) {
                return Err(Error::Vocab(format!("duplicate attribute '{attr}'")));
            }
            cleaned.push(attr);
        }
        Ok(Self { attributes: cleaned })
    }

    /// One attribute per line; blank lines are skipped.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut attrs = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if !line.trim().is_empty() {
                attrs.push(line.trim().to_string());
            }
        }
        Self::new(attrs)
    }

    /// Deterministic built-in vocabulary of `size` "{Brand} {category}"
    /// phrases. Every brand word is unique, so attributes share at most their
    /// category word.
    pub fn builtin(size: usize) -> Self {
        let brands = brand_words(size.div_ceil(CATEGORIES.len()) * CATEGORIES.len());
        let mut attrs = Vec::with_capacity(size);
        let mut brands = brands.into_iter();
        'outer: loop {
            for cat in CATEGORIES {
                if attrs.len() == size {
                    break 'outer;
                }
                let brand = brands.next().expect("enough brand words generated");
                attrs.push(format!("{brand} {cat}"));
            }
        }
        Self::new(attrs).expect("built-in vocabulary is valid")
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn get(&self, i: usize) -> &str {
        &self.attributes[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(String::as_str)
    }

    /// The vocabulary minus `used` (compared after normalization).
    pub fn without(&self, used: &HashSet<String>) -> Self {
        let used: HashSet<String> = used.iter().map(|s| normalize(s)).collect();
        let attributes = self.attributes.iter().filter(|a| !used.contains(&normalize(a))).cloned().collect();
        Self { attributes }
    }
}

/// Default size of the built-in vocabulary.
pub const BUILTIN_VOCAB_SIZE: usize = 6000;

const CATEGORIES: [&str; 60] = [
    "pizza", "sneakers", "tea", "coffee", "chocolate", "cheese", "wine", "beer", "jazz", "opera",
    "novels", "comics", "podcasts", "sedans", "bicycles", "kayaks", "guitars", "pianos", "perfume",
    "candles", "watches", "sunglasses", "backpacks", "jackets", "scarves", "boots", "noodles",
    "dumplings", "tacos", "curry", "pastries", "cereal", "yogurt", "sausages", "salsa", "pickles",
    "orchids", "tulips", "succulents", "parrots", "terriers", "kittens", "goldfish", "puzzles",
    "board games", "video games", "cartoons", "sitcoms", "documentaries", "festivals", "museums",
    "hiking trails", "beaches", "islands", "cruises", "yoga", "pottery", "origami", "quilts", "kites",
];

const ONSETS: [&str; 24] = [
    "b", "br", "c", "cl", "d", "dr", "f", "fl", "g", "gr", "h", "j", "k", "l", "m", "n", "p", "pr",
    "r", "s", "st", "t", "tr", "v",
];
const VOWELS: [&str; 7] = ["a", "e", "i", "o", "u", "ai", "ou"];
const CODAS: [&str; 7] = ["", "n", "r", "l", "s", "m", "x"];

/// `count` distinct capitalized two- or three-syllable words, in a fixed
/// pseudo-random order.
fn brand_words(count: usize) -> Vec<String> {
    let syllables: Vec<String> = ONSETS
        .iter()
        .flat_map(|o| VOWELS.iter().flat_map(move |v| CODAS.iter().map(move |c| format!("{o}{v}{c}"))))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4c494d4954);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let parts = if rng.random_bool(0.8) { 2 } else { 3 };
        let word: String = (0..parts).map(|_| syllables[rng.random_range(0..syllables.len())].as_str()).collect();
        if word.len() < 4 || RESERVED_WORDS.contains(&word.as_str()) || !seen.insert(word.clone()) {
            continue;
        }
        let mut chars = word.chars();
        let first = chars.next().expect("non-empty").to_ascii_uppercase();
        out.push(std::iter::once(first).chain(chars).collect());
    }
    out.shuffle(&mut rng);
    out
}

/// First and last name lists that documents draw from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameLists {
    pub first: Vec<String>,
    pub last: Vec<String>,
}

impl NameLists {
    pub fn new(first: Vec<String>, last: Vec<String>) -> Result<Self> {
        let bad = |list: &[String]| {
            list.is_empty()
                || list.iter().any(|n| n.trim().is_empty() || n.split_whitespace().any(|w| w.eq_ignore_ascii_case("likes")))
        };
        if bad(&first) || bad(&last) {
            return Err(Error::InvalidArgument("name lists must be non-empty and avoid the word 'likes'".into()));
        }
        Ok(Self { first, last })
    }

    pub fn from_readers<R1: BufRead, R2: BufRead>(first: R1, last: R2) -> Result<Self> {
        let read = |r: &mut dyn BufRead| -> Result<Vec<String>> {
            let mut out = Vec::new();
            for line in r.lines() {
                let line = line?;
                if !line.trim().is_empty() {
                    out.push(line.trim().to_string());
                }
            }
            Ok(out)
        };
        let (mut first, mut last) = (first, last);
        Self::new(read(&mut first)?, read(&mut last)?)
    }

    pub fn builtin() -> Self {
        Self {
            first: FIRST_NAMES.iter().map(|s| s.to_string()).collect(),
            last: LAST_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

const FIRST_NAMES: [&str; 64] = [
    "Ada", "Alan", "Alice", "Amara", "Ana", "Arjun", "Beatriz", "Ben", "Carlos", "Chen", "Chloe",
    "Dana", "David", "Diego", "Elena", "Emeka", "Emma", "Farah", "Felix", "Grace", "Hana", "Hugo",
    "Ian", "Ines", "Ivan", "Jamal", "Jana", "Jon", "Kai", "Kenji", "Lara", "Leo", "Lina", "Luca",
    "Maya", "Mei", "Mira", "Nadia", "Nia", "Noah", "Olga", "Omar", "Pablo", "Priya", "Quinn",
    "Rafael", "Rosa", "Ruth", "Sam", "Sara", "Sofia", "Tariq", "Theo", "Uma", "Vera", "Victor",
    "Wen", "Xavier", "Yara", "Yusuf", "Zara", "Zoe", "Ilse", "Tomas",
];

const LAST_NAMES: [&str; 64] = [
    "Abara", "Alvarez", "Andersen", "Bauer", "Bianchi", "Brown", "Castro", "Chen", "Costa", "Dubois",
    "Eriksen", "Fischer", "Garcia", "Gupta", "Haddad", "Hansen", "Ibrahim", "Ito", "Jensen", "Kaur",
    "Kim", "Kowalski", "Larsen", "Lee", "Lopez", "Mbeki", "Meyer", "Moreau", "Murphy", "Nakamura",
    "Nguyen", "Novak", "Okafor", "Olsen", "Patel", "Pereira", "Petrov", "Quispe", "Rahman", "Rossi",
    "Sato", "Schmidt", "Silva", "Singh", "Smith", "Sousa", "Tanaka", "Torres", "Ueda", "Varga",
    "Vogel", "Wagner", "Walsh", "Wang", "Weber", "Wilson", "Yamada", "Yilmaz", "Zhang", "Zhou",
    "Ortiz", "Kumar", "Fernandes", "Lindqvist",
];
