//! Isometric embedding of finite strings with the Baire distance into the
//! unit disc of an unramified p-adic field: the n-th letter becomes the
//! coefficient at exponent n, the blank becomes 0.

use crate::error::{Error, Result};
use crate::padic::{Field, FieldDescriptor, PAdicNumber, RepLabel, RepSystem, DEFAULT_PRECISION};

#[derive(Clone, Debug)]
pub struct AlphabetCode {
    /// Alphabet symbols, blank first.
    symbols: Vec<char>,
    blank: char,
    field: Field,
    /// Parallel to `symbols`; the blank maps to the zero label.
    labels: Vec<RepLabel>,
}

impl AlphabetCode {
    /// Explicit letter map: pairs (symbol, label) with the blank mapped to
    /// zero. Used by the presets whose maps come from the literature.
    pub fn with_map(field: Field, blank: char, map: Vec<(char, RepLabel)>) -> Result<Self> {
        let mut symbols = Vec::with_capacity(map.len());
        let mut labels = Vec::with_capacity(map.len());
        for (sym, label) in map {
            if symbols.contains(&sym) {
                return Err(Error::InvalidInput(format!("duplicate symbol '{sym}'")));
            }
            if !field.label_is_valid(&label) {
                return Err(Error::InvalidInput(format!(
                    "label for '{sym}' is not in the representative system"
                )));
            }
            if labels.contains(&label) {
                return Err(Error::InvalidInput(format!(
                    "letter map is not injective at '{sym}'"
                )));
            }
            symbols.push(sym);
            labels.push(label);
        }
        let blank_idx = symbols
            .iter()
            .position(|&s| s == blank)
            .ok_or_else(|| Error::InvalidInput("blank symbol missing from alphabet".into()))?;
        if labels[blank_idx] != field.zero_label() {
            return Err(Error::InvalidInput("blank must map to the zero label".into()));
        }
        Ok(AlphabetCode {
            symbols,
            blank,
            field,
            labels,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn blank(&self) -> char {
        self.blank
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn label_of(&self, sym: char) -> Option<&RepLabel> {
        self.symbols
            .iter()
            .position(|&s| s == sym)
            .map(|i| &self.labels[i])
    }

    pub fn symbol_of(&self, label: &RepLabel) -> Option<char> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.symbols[i])
    }
}

/// Chooses the minimal unramified degree f with |alphabet| <= p^f and
/// assigns the canonical label enumeration (0, 1, ascending) to the
/// symbols in order, blank first.
pub fn build_code(
    alphabet: &[char],
    blank: char,
    p: u64,
    rep_system: RepSystem,
) -> Result<AlphabetCode> {
    if alphabet.is_empty() {
        return Err(Error::InvalidInput("empty alphabet".into()));
    }
    {
        let mut seen = alphabet.to_vec();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("duplicate symbols in alphabet".into()));
        }
    }
    if !alphabet.contains(&blank) {
        return Err(Error::InvalidInput("blank symbol missing from alphabet".into()));
    }
    let n = alphabet.len() as u64;
    let mut f = 1usize;
    let mut size = p;
    while size < n {
        f += 1;
        size = size
            .checked_mul(p)
            .ok_or_else(|| Error::InvalidInput("alphabet too large".into()))?;
    }
    let field = FieldDescriptor::unramified(p, f, rep_system)?;
    let mut ordered: Vec<char> = vec![blank];
    ordered.extend(alphabet.iter().copied().filter(|&s| s != blank));
    let map = ordered
        .iter()
        .enumerate()
        .map(|(i, &sym)| Ok((sym, field.canonical_label(i as u64)?)))
        .collect::<Result<Vec<_>>>()?;
    AlphabetCode::with_map(field, blank, map)
}

/// phi: the n-th letter becomes the coefficient at exponent n. Trailing
/// blanks vanish. Precision covers at least the string length.
pub fn encode_string(code: &AlphabetCode, s: &str) -> Result<PAdicNumber> {
    let mut terms = Vec::new();
    for (pos, sym) in s.chars().enumerate() {
        let label = code.label_of(sym).ok_or_else(|| {
            Error::InvalidInput(format!("unknown symbol '{sym}' at position {pos}"))
        })?;
        terms.push((pos as i64, label.clone()));
    }
    let precision = DEFAULT_PRECISION.max(s.chars().count() as i64);
    PAdicNumber::from_terms(code.field().clone(), &terms, precision)
}

/// Inverse of `encode_string` on its image; trailing blanks are dropped.
pub fn decode_string(code: &AlphabetCode, x: &PAdicNumber) -> Result<String> {
    let mut out: Vec<char> = Vec::new();
    for (exp, label) in x.terms() {
        if exp < 0 {
            return Err(Error::NotInImage(format!(
                "coefficient at negative exponent {exp}"
            )));
        }
        let sym = code.symbol_of(&label).ok_or_else(|| {
            Error::NotInImage(format!("coefficient at exponent {exp} is not a letter"))
        })?;
        while (out.len() as i64) < exp {
            out.push(code.blank);
        }
        out.push(sym);
    }
    Ok(out.into_iter().collect())
}

/// The Baire distance p^{-n}, n the longest common prefix length after
/// blank padding; `None` means the distinguished value zero (strings equal
/// after padding). With `cutoff` k, n is capped at k.
pub fn baire_distance(code: &AlphabetCode, s: &str, t: &str, cutoff: Option<i64>) -> Option<i64> {
    let a: Vec<char> = s.chars().collect();
    let b: Vec<char> = t.chars().collect();
    let len = a.len().max(b.len());
    let at = |v: &[char], i: usize| v.get(i).copied().unwrap_or(code.blank);
    let mut n = None;
    for i in 0..len {
        if at(&a, i) != at(&b, i) {
            n = Some(i as i64);
            break;
        }
    }
    let n = n?;
    Some(match cutoff {
        Some(k) => n.min(k),
        None => n,
    })
}

/// Registered encodings for DNA data.
pub fn preset(name: &str) -> Result<AlphabetCode> {
    match name {
        // rational 5-adic model: nucleotides are the digits 1..4
        "dna5" => {
            let field = FieldDescriptor::unramified(5, 1, RepSystem::Polynomial)?;
            let map = vec![
                ('-', field.label_from_digit(0)?),
                ('A', field.label_from_digit(1)?),
                ('C', field.label_from_digit(2)?),
                ('G', field.label_from_digit(3)?),
                ('T', field.label_from_digit(4)?),
            ];
            AlphabetCode::with_map(field, '-', map)
        }
        // (A,G,C,T) as the Teichmuller labels {0, 1, zeta, zeta^2}; the
        // blank is not distinguished from A
        "dna2-teich" => {
            let field = FieldDescriptor::unramified(2, 2, RepSystem::Teichmuller)?;
            let map = vec![
                ('A', RepLabel::Teich(None)),
                ('G', RepLabel::Teich(Some(0))),
                ('C', RepLabel::Teich(Some(1))),
                ('T', RepLabel::Teich(Some(2))),
            ];
            AlphabetCode::with_map(field, 'A', map)
        }
        // the kk bijection (A,G,T,C) = (0, zeta, 1, 1+zeta)
        "dna2-kk" => {
            let field = FieldDescriptor::unramified(2, 2, RepSystem::Polynomial)?;
            let lbl = |c0: u64, c1: u64| {
                RepLabel::Poly(crate::padic::ResidueElement::new(vec![c0, c1]))
            };
            let map = vec![
                ('A', lbl(0, 0)),
                ('G', lbl(0, 1)),
                ('T', lbl(1, 0)),
                ('C', lbl(1, 1)),
            ];
            AlphabetCode::with_map(field, 'A', map)
        }
        // five symbols (blank distinct) force f = 3 over Q_2
        "dna2-blank" => build_code(&['-', 'A', 'G', 'C', 'T'], '-', 2, RepSystem::Teichmuller),
        _ => Err(Error::Config(format!("unknown preset '{name}'"))),
    }
}

pub const PRESET_NAMES: &[&str] = &["dna5", "dna2-teich", "dna2-kk", "dna2-blank"];

/// Labeled strings from plain lines (labels s1, s2, ...) or FASTA
/// (detected by a leading '>'; header text becomes the label).
pub fn read_labeled_strings(text: &str) -> Result<Vec<(String, String)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    let mut out = Vec::new();
    if lines.peek().is_some_and(|l| l.trim_start().starts_with('>')) {
        let mut label: Option<String> = None;
        let mut seq = String::new();
        for line in lines {
            let line = line.trim();
            if let Some(header) = line.strip_prefix('>') {
                if let Some(prev) = label.take() {
                    out.push((prev, std::mem::take(&mut seq)));
                }
                label = Some(header.trim().to_string());
            } else {
                if label.is_none() {
                    return Err(Error::InvalidInput("sequence before FASTA header".into()));
                }
                seq.push_str(line);
            }
        }
        if let Some(prev) = label {
            out.push((prev, seq));
        }
    } else {
        for (i, line) in lines.enumerate() {
            out.push((format!("s{}", i + 1), line.trim().to_string()));
        }
    }
    Ok(out)
}
