//! Number phrases: digits, decimals, word numbers up to the thousands and
//! "and (a) half / quarter" fractions.

const UNITS: &[(&str, u64)] = &[
    ("zero", 0),
    ("one", 1),
    ("two", 2),
    ("three", 3),
    ("four", 4),
    ("five", 5),
    ("six", 6),
    ("seven", 7),
    ("eight", 8),
    ("nine", 9),
    ("ten", 10),
    ("eleven", 11),
    ("twelve", 12),
    ("thirteen", 13),
    ("fourteen", 14),
    ("fifteen", 15),
    ("sixteen", 16),
    ("seventeen", 17),
    ("eighteen", 18),
    ("nineteen", 19),
    ("twenty", 20),
    ("thirty", 30),
    ("forty", 40),
    ("fifty", 50),
    ("sixty", 60),
    ("seventy", 70),
    ("eighty", 80),
    ("ninety", 90),
];

const FRACTIONS: &[(&str, f64)] = &[("half", 0.5), ("quarter", 0.25)];

fn unit_value(word: &str) -> Option<u64> {
    UNITS.iter().find(|(w, _)| *w == word).map(|(_, v)| *v)
}

fn fraction_value(word: &str) -> Option<f64> {
    FRACTIONS.iter().find(|(w, _)| *w == word).map(|(_, v)| *v)
}

pub fn is_fraction_word(word: &str) -> bool {
    fraction_value(word).is_some()
}

/// True for number words, including hyphenated compounds like
/// `twenty-five`.
pub fn is_number_word(word: &str) -> bool {
    word.split('-').all(|part| {
        unit_value(part).is_some()
            || fraction_value(part).is_some()
            || part == "hundred"
            || part == "thousand"
    })
}

pub fn is_digits(word: &str) -> bool {
    !word.is_empty() && word.parse::<f64>().is_ok()
}

/// Value of an integer phrase such as `one hundred twenty five`.
fn integer_phrase(words: &[&str]) -> Option<f64> {
    if words.is_empty() {
        return None;
    }
    let (mut total, mut current) = (0u64, 0u64);
    for w in words {
        if let Some(v) = unit_value(w) {
            current += v;
        } else if *w == "hundred" {
            current = current.max(1) * 100;
        } else if *w == "thousand" {
            total += current.max(1) * 1000;
            current = 0;
        } else {
            return None;
        }
    }
    Some((total + current) as f64)
}

/// Value of a fractional phrase: `half`, `quarter`, `three quarter`.
fn fraction_phrase(words: &[&str]) -> Option<f64> {
    let (last, head) = words.split_last()?;
    let unit = fraction_value(last)?;
    let count = if head.is_empty() {
        1.0
    } else {
        integer_phrase(head)?
    };
    Some(count * unit)
}

fn simple_phrase(words: &[&str]) -> Option<f64> {
    match words {
        [] => None,
        [single] if is_digits(single) => single.parse().ok(),
        _ => fraction_phrase(words).or_else(|| integer_phrase(words)),
    }
}

/// Parses the lemmas of one number phrase, e.g. `["fifteen", "and",
/// "half"]` → 15.5 or `["2", "and", "half"]` → 2.5.
pub fn parse_number(lemmas: &[&str]) -> Option<f64> {
    let words: Vec<&str> = lemmas
        .iter()
        .flat_map(|l| l.split('-'))
        .filter(|w| !w.is_empty())
        .collect();
    let parts: Vec<&[&str]> = words.split(|w| *w == "and").collect();
    match parts.as_slice() {
        [only] => simple_phrase(only),
        [whole, rest] => {
            let head = simple_phrase(whole)?;
            if let Some(frac) = fraction_phrase(rest) {
                Some(head + frac)
            } else {
                // "one hundred and twenty"
                let tail = integer_phrase(rest)?;
                (whole.iter().any(|w| *w == "hundred" || *w == "thousand") && tail < 100.0)
                    .then_some(head + tail)
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Option<f64> {
        let words: Vec<&str> = s.split_whitespace().collect();
        parse_number(&words)
    }

    #[test]
    fn word_numbers() {
        assert_eq!(p("ten"), Some(10.0));
        assert_eq!(p("fifteen and half"), Some(15.5));
        assert_eq!(p("one and half"), Some(1.5));
        assert_eq!(p("twenty-five"), Some(25.0));
        assert_eq!(p("one hundred twenty"), Some(120.0));
        assert_eq!(p("two hundred and forty five"), Some(245.0));
        assert_eq!(p("three quarter"), Some(0.75));
        assert_eq!(p("half"), Some(0.5));
        assert_eq!(p("two and three quarter"), Some(2.75));
        assert_eq!(p("six hundred sixty"), Some(660.0));
    }

    #[test]
    fn digits() {
        assert_eq!(p("15.5"), Some(15.5));
        assert_eq!(p("2 and half"), Some(2.5));
        assert_eq!(p(".5"), Some(0.5));
    }

    #[test]
    fn rejects_non_numbers() {
        assert_eq!(p("plastic"), None);
        assert_eq!(p("two and three"), None);
        assert_eq!(p(""), None);
    }

    #[test]
    fn number_word_detection() {
        assert!(is_number_word("twenty-five"));
        assert!(is_number_word("half"));
        assert!(!is_number_word("twentyish"));
    }
}
