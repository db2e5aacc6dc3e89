//! Report-text featurization: tokenization, document-frequency
//! filtering, TF-IDF encoding, and a diagnosis-code count surrogate.
//!
//! Conventions are pinned for reproducibility: Unicode-aware
//! lowercasing, splitting on non-alphanumeric characters, pure-number
//! tokens dropped, natural logarithms in both TF and IDF, and
//! lexicographic term order in the vocabulary. Code-count windowing
//! (e.g. "within 90 days") happens upstream; documents arrive with
//! per-code counts already aggregated.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default diagnosis-code set for the vertebral-fracture surrogate, one
/// code per line, `#` comments allowed.
pub const DEFAULT_ICD_CODE_FILE: &str = include_str!("../data/vertebral_fracture_icd9.txt");

/// Built-in English stopword list (fixed and versioned with the crate so
/// vocabularies are reproducible).
pub const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "cannot", "could", "did", "do", "does", "doing", "down", "during", "each",
    "few", "for", "from", "further", "had", "has", "have", "having", "he", "her", "here",
    "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it",
    "its", "itself", "me", "more", "most", "my", "myself", "no", "nor", "not", "of", "off",
    "on", "once", "only", "or", "other", "ought", "our", "ours", "ourselves", "out", "over",
    "own", "same", "she", "should", "so", "some", "such", "than", "that", "the", "their",
    "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those",
    "through", "to", "too", "under", "until", "up", "very", "was", "we", "were", "what",
    "when", "where", "which", "while", "who", "whom", "why", "with", "would", "you", "your",
    "yours", "yourself", "yourselves",
];

/// One ingested report: free text plus pre-windowed diagnosis-code
/// counts and an optional abstracted label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub icd_counts: BTreeMap<String, u32>,
    #[serde(default)]
    pub label: Option<u8>,
}

/// Vocabulary filters: stopwords plus document-frequency bounds as
/// fractions of the corpus size (terms kept iff
/// `min_doc_frac * N <= df <= max_doc_frac * N`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterConfig {
    pub min_doc_frac: f64,
    pub max_doc_frac: f64,
    /// None = built-in list; Some = caller-provided.
    pub stopwords: Option<HashSet<String>>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self { min_doc_frac: 0.05, max_doc_frac: 0.90, stopwords: None }
    }
}

impl FilterConfig {
    /// Keep everything; useful for tiny fixtures.
    pub fn permissive() -> Self {
        Self { min_doc_frac: 0.0, max_doc_frac: 1.0, stopwords: Some(HashSet::new()) }
    }

    fn is_stopword(&self, token: &str) -> bool {
        match &self.stopwords {
            Some(set) => set.contains(token),
            None => STOPWORDS.binary_search(&token).is_ok(),
        }
    }
}

/// Retained terms in fixed lexicographic order with their document
/// frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub terms: Vec<String>,
    pub document_frequencies: Vec<u32>,
    pub n_documents: usize,
    pub min_doc_frac: f64,
    pub max_doc_frac: f64,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Lowercase, split on non-alphanumeric boundaries, drop pure-number
/// tokens and stopwords.
pub fn tokenize(text: &str, filter: &FilterConfig) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| !t.chars().all(|c| c.is_numeric()))
        .filter(|t| !filter.is_stopword(t))
        .map(str::to_string)
        .collect()
}

/// Build the vocabulary over a corpus: document frequencies of the
/// filtered tokens, then the document-frequency band applied. Fails if
/// nothing survives.
pub fn build_vocabulary(corpus: &[Document], filter: &FilterConfig) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("vocabulary needs a nonempty corpus".into()));
    }
    let n = corpus.len() as f64;
    let mut df: BTreeMap<String, u32> = BTreeMap::new();
    for doc in corpus {
        let mut seen = HashSet::new();
        for token in tokenize(&doc.text, filter) {
            if seen.insert(token.clone()) {
                *df.entry(token).or_insert(0) += 1;
            }
        }
    }
    let lo = filter.min_doc_frac * n;
    let hi = filter.max_doc_frac * n;
    let mut terms = Vec::new();
    let mut document_frequencies = Vec::new();
    for (term, count) in df {
        let c = f64::from(count);
        if c >= lo && c <= hi {
            terms.push(term);
            document_frequencies.push(count);
        }
    }
    if terms.is_empty() {
        return Err(Error::EmptyVocabulary(format!(
            "no term has document frequency inside [{lo:.1}, {hi:.1}] over {} documents",
            corpus.len()
        )));
    }
    Ok(Vocabulary {
        terms,
        document_frequencies,
        n_documents: corpus.len(),
        min_doc_frac: filter.min_doc_frac,
        max_doc_frac: filter.max_doc_frac,
    })
}

/// Sparse row-major matrix: per row, sorted `(column, value)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub n_cols: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows.len(), self.n_cols));
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                out[(i, j)] = v;
            }
        }
        out
    }
}

/// TF-IDF encoding against a fixed vocabulary:
///
/// ```text
/// TF(t, d)  = 1 + ln(1 + count(t in d) / |d|)      (|d| = filtered token count)
/// IDF(t)    = ln(N / df(t))                        (N, df from the vocabulary)
/// X[d, t]   = TF * IDF for t present in d, else 0
/// ```
pub fn tfidf_matrix(corpus: &[Document], vocab: &Vocabulary, filter: &FilterConfig) -> SparseMatrix {
    let n = vocab.n_documents as f64;
    let idf: Vec<f64> = vocab
        .document_frequencies
        .iter()
        .map(|&df| (n / f64::from(df)).ln())
        .collect();
    let rows = corpus
        .iter()
        .map(|doc| {
            let tokens = tokenize(&doc.text, filter);
            let len = tokens.len() as f64;
            let mut counts: HashMap<usize, u32> = HashMap::new();
            for t in &tokens {
                if let Some(j) = vocab.index_of(t) {
                    *counts.entry(j).or_insert(0) += 1;
                }
            }
            let mut row: Vec<(usize, f64)> = counts
                .into_iter()
                .map(|(j, c)| {
                    let tf = 1.0 + (1.0 + f64::from(c) / len).ln();
                    (j, tf * idf[j])
                })
                .filter(|&(_, v)| v != 0.0)
                .collect();
            row.sort_by_key(|&(j, _)| j);
            row
        })
        .collect();
    SparseMatrix { n_cols: vocab.len(), rows }
}

/// Parse a code-set file: one code per line, blank lines and `#`
/// comments skipped.
pub fn parse_code_set(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Binary code-count surrogate: `Z_i = 1` iff the summed counts over the
/// code set strictly exceed `threshold` (default 1 elsewhere in the
/// crate, i.e. at least two qualifying codes).
pub fn build_icd_surrogate(corpus: &[Document], code_set: &[String], threshold: u32) -> Result<Vec<u8>> {
    if code_set.is_empty() {
        return Err(Error::InvalidArgument("code set must be nonempty".into()));
    }
    let set: HashSet<&str> = code_set.iter().map(String::as_str).collect();
    Ok(corpus
        .iter()
        .map(|doc| {
            let total: u64 = doc
                .icd_counts
                .iter()
                .filter(|(code, _)| set.contains(code.as_str()))
                .map(|(_, &c)| u64::from(c))
                .sum();
            u8::from(total > u64::from(threshold))
        })
        .collect())
}

/// A named dense design matrix with per-column penalty factors, ready
/// for model fitting.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub matrix: Array2<f64>,
    pub column_names: Vec<String>,
    /// 1.0 for text features, 0.0 for the appended surrogate.
    pub penalty_factors: Vec<f64>,
}

/// Append the surrogate as the final, penalty-exempt column. A vocabulary
/// term colliding with the surrogate's column name gets the name
/// deterministically suffixed.
pub fn assemble_design_matrix(tfidf: &SparseMatrix, vocab: &Vocabulary, surrogate: &[u8]) -> Result<DesignMatrix> {
    if tfidf.n_rows() != surrogate.len() {
        return Err(Error::InvalidArgument(format!(
            "matrix has {} rows but the surrogate has {}",
            tfidf.n_rows(),
            surrogate.len()
        )));
    }
    let mut matrix = Array2::zeros((tfidf.n_rows(), vocab.len() + 1));
    for (i, row) in tfidf.rows.iter().enumerate() {
        for &(j, v) in row {
            matrix[(i, j)] = v;
        }
        matrix[(i, vocab.len())] = f64::from(surrogate[i]);
    }
    let mut column_names: Vec<String> = vocab.terms.clone();
    let mut surrogate_name = String::from("z_surrogate");
    while column_names.contains(&surrogate_name) {
        surrogate_name.push_str("_1");
    }
    column_names.push(surrogate_name);
    let mut penalty_factors = vec![1.0; vocab.len()];
    penalty_factors.push(0.0);
    Ok(DesignMatrix { matrix, column_names, penalty_factors })
}

/// Read a JSONL corpus: one `Document` object per line.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<Document>> {
    let mut corpus = Vec::new();
    let mut ids = HashSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        if !ids.insert(doc.id.clone()) {
            return Err(Error::Parse(format!("duplicate document id {:?}", doc.id)));
        }
        corpus.push(doc);
    }
    Ok(corpus)
}

/// Write a corpus as JSONL.
pub fn write_jsonl<W: Write>(mut w: W, corpus: &[Document]) -> Result<()> {
    for doc in corpus {
        let line = serde_json::to_string(doc).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Write the assembled design matrix as CSV with a leading id column and
/// optional label column.
pub fn write_design_csv<W: Write>(
    mut w: W,
    design: &DesignMatrix,
    ids: &[String],
    labels: Option<&[Option<u8>]>,
) -> Result<()> {
    write!(w, "id")?;
    if labels.is_some() {
        write!(w, ",label")?;
    }
    for name in &design.column_names {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for i in 0..design.matrix.nrows() {
        write!(w, "{}", ids[i])?;
        if let Some(ls) = labels {
            match ls[i] {
                Some(v) => write!(w, ",{v}")?,
                None => write!(w, ",")?,
            }
        }
        for j in 0..design.matrix.ncols() {
            write!(w, ",{:.6}", design.matrix[(i, j)])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn doc(id: &str, text: &str) -> Document {
        Document { id: id.into(), text: text.into(), icd_counts: BTreeMap::new(), label: None }
    }

    #[test]
    fn stopword_list_is_sorted_for_binary_search() {
        let mut sorted = STOPWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, STOPWORDS);
    }

    #[test]
    fn tokenizer_lowercases_splits_and_drops_numbers() {
        let filter = FilterConfig::default();
        let toks = tokenize("L4-L5 Disc Bulge; NO acute fracture, 3mm at 2024!", &filter);
        assert_eq!(toks, vec!["l4", "l5", "disc", "bulge", "acute", "fracture", "3mm"]);
    }

    #[test]
    fn vocabulary_respects_frequency_band_and_order() {
        let corpus = vec![
            doc("a", "pain fracture disc"),
            doc("b", "pain disc"),
            doc("c", "pain bulge"),
            doc("d", "pain"),
        ];
        // df: pain=4, disc=2, fracture=1, bulge=1; band [0.3, 0.9] over
        // N=4 keeps df in [1.2, 3.6] -> disc only... fracture/bulge at 1
        // fall below, pain at 4 above.
        let filter = FilterConfig { min_doc_frac: 0.3, max_doc_frac: 0.9, stopwords: Some(HashSet::new()) };
        let vocab = build_vocabulary(&corpus, &filter).unwrap();
        assert_eq!(vocab.terms, vec!["disc"]);
        assert_eq!(vocab.document_frequencies, vec![2]);
    }

    #[test]
    fn shared_everything_corpus_yields_empty_vocabulary_error() {
        let corpus = vec![doc("a", "pain disc"), doc("b", "pain disc")];
        let filter = FilterConfig { min_doc_frac: 0.0, max_doc_frac: 0.9, stopwords: Some(HashSet::new()) };
        let err = build_vocabulary(&corpus, &filter).unwrap_err();
        assert!(matches!(err, Error::EmptyVocabulary(_)));
    }

    #[test]
    fn synthetic_corpus_band_keeps_a_strict_subset() {
        // Three frequency tiers: "common" in every doc (dropped by the
        // 90% ceiling), five "mid*" terms at 20% (kept), and per-doc
        // "rare*" terms at 1% (dropped by the 5% floor).
        let mut corpus = Vec::new();
        for i in 0..100 {
            let text = format!("common mid{} rare{}", i % 5, i);
            corpus.push(doc(&format!("d{i}"), &text));
        }
        let vocab = build_vocabulary(&corpus, &FilterConfig::default()).unwrap();
        assert_eq!(vocab.terms, vec!["mid0", "mid1", "mid2", "mid3", "mid4"]);
        assert!(vocab.index_of("common").is_none());
        assert!(vocab.index_of("rare0").is_none());
    }

    #[test]
    fn tfidf_hand_fixture() {
        let corpus = vec![doc("d1", "pain pain fracture"), doc("d2", "pain")];
        let filter = FilterConfig::permissive();
        let vocab = build_vocabulary(&corpus, &filter).unwrap();
        let x = tfidf_matrix(&corpus, &vocab, &filter);
        let j_fracture = vocab.index_of("fracture").unwrap();
        let j_pain = vocab.index_of("pain").unwrap();
        // TF = 1 + ln(1 + 1/3), IDF = ln(2/1)
        assert_abs_diff_eq!(
            x.get(0, j_fracture),
            (1.0 + (4.0f64 / 3.0).ln()) * 2.0f64.ln(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(x.get(0, j_fracture), 0.8925531979775392, epsilon = 1e-12);
        // "pain" appears in every document: IDF = 0, column identically 0.
        assert_eq!(x.get(0, j_pain), 0.0);
        assert_eq!(x.get(1, j_pain), 0.0);
        assert_eq!(x.get(1, j_fracture), 0.0);
    }

    #[test]
    fn empty_document_has_empty_row() {
        let corpus = vec![doc("d1", "fracture pain"), doc("d2", "")];
        let filter = FilterConfig::permissive();
        let vocab = build_vocabulary(&corpus, &filter).unwrap();
        let x = tfidf_matrix(&corpus, &vocab, &filter);
        assert!(x.rows[1].is_empty());
    }

    #[test]
    fn tfidf_entries_nonnegative_and_zero_iff_absent_or_idf_zero() {
        let corpus = vec![
            doc("a", "alpha beta gamma"),
            doc("b", "alpha beta"),
            doc("c", "alpha delta delta"),
        ];
        let filter = FilterConfig::permissive();
        let vocab = build_vocabulary(&corpus, &filter).unwrap();
        let x = tfidf_matrix(&corpus, &vocab, &filter);
        for (i, d) in corpus.iter().enumerate() {
            for (j, term) in vocab.terms.iter().enumerate() {
                let v = x.get(i, j);
                assert!(v >= 0.0);
                let present = tokenize(&d.text, &filter).contains(term);
                let idf_zero = vocab.document_frequencies[j] as usize == corpus.len();
                if v == 0.0 {
                    assert!(!present || idf_zero);
                } else {
                    assert!(present && !idf_zero);
                }
            }
        }
    }

    #[test]
    fn vocabulary_json_round_trip_reproduces_matrix() {
        let corpus = vec![
            doc("a", "compression deformity at l1"),
            doc("b", "no acute fracture or deformity"),
            doc("c", "chronic compression noted"),
        ];
        let filter = FilterConfig::permissive();
        let vocab = build_vocabulary(&corpus, &filter).unwrap();
        let x1 = tfidf_matrix(&corpus, &vocab, &filter);
        let vocab2 = Vocabulary::from_json(&vocab.to_json().unwrap()).unwrap();
        let x2 = tfidf_matrix(&corpus, &vocab2, &filter);
        assert_eq!(x1, x2);
    }

    #[test]
    fn code_set_parsing_skips_comments() {
        let codes = parse_code_set(DEFAULT_ICD_CODE_FILE);
        assert_eq!(codes.len(), 26);
        assert!(codes.contains(&"733.13".to_string()));
        assert!(codes.contains(&"V54.27".to_string()));
        assert!(!codes.iter().any(|c| c.starts_with('#')));
    }

    #[test]
    fn icd_surrogate_thresholding() {
        let mut d1 = doc("a", "");
        d1.icd_counts.insert("805.4".into(), 1);
        let mut d2 = doc("b", "");
        d2.icd_counts.insert("805.4".into(), 2);
        let mut d3 = doc("c", "");
        d3.icd_counts.insert("805.4".into(), 1);
        d3.icd_counts.insert("806.25".into(), 1);
        let d4 = doc("d", "");
        let mut d5 = doc("e", "");
        d5.icd_counts.insert("999.9".into(), 5); // not in the code set
        let corpus = vec![d1, d2, d3, d4, d5];
        let codes = parse_code_set(DEFAULT_ICD_CODE_FILE);
        // Count must strictly exceed 1.
        let z = build_icd_surrogate(&corpus, &codes, 1).unwrap();
        assert_eq!(z, vec![0, 1, 1, 0, 0]);
    }

    #[test]
    fn icd_surrogate_invariant_to_code_order_and_unknown_codes() {
        let mut d = doc("a", "");
        d.icd_counts.insert("805.4".into(), 1);
        d.icd_counts.insert("806.25".into(), 1);
        let corpus = vec![d];
        let forward = vec!["805.4".to_string(), "806.25".to_string(), "unused.1".to_string()];
        let mut backward = forward.clone();
        backward.reverse();
        assert_eq!(
            build_icd_surrogate(&corpus, &forward, 1).unwrap(),
            build_icd_surrogate(&corpus, &backward, 1).unwrap()
        );
    }

    #[test]
    fn surrogate_positive_fraction_on_count_distribution() {
        // A cohort where 96% have no codes, 1.83% one code, the rest two
        // or more: positives are exactly the count >= 2 share.
        let mut corpus = Vec::new();
        let n = 10_000;
        for i in 0..n {
            let mut d = doc(&format!("d{i}"), "");
            let count = if i < 9600 {
                0
            } else if i < 9783 {
                1
            } else {
                2 + (i % 3) as u32
            };
            if count > 0 {
                d.icd_counts.insert("805.4".into(), count);
            }
            corpus.push(d);
        }
        let z = build_icd_surrogate(&corpus, &["805.4".to_string()], 1).unwrap();
        let positive = z.iter().filter(|&&v| v == 1).count() as f64 / n as f64;
        assert_abs_diff_eq!(positive, (n - 9783) as f64 / n as f64, epsilon = 1e-12);
    }

    #[test]
    fn design_matrix_appends_penalty_exempt_surrogate() {
        let corpus = vec![doc("a", "alpha beta"), doc("b", "alpha gamma")];
        let filter = FilterConfig::permissive();
        let vocab = build_vocabulary(&corpus, &filter).unwrap();
        let x = tfidf_matrix(&corpus, &vocab, &filter);
        let design = assemble_design_matrix(&x, &vocab, &[1, 0]).unwrap();
        assert_eq!(design.matrix.ncols(), vocab.len() + 1);
        assert_eq!(design.column_names.last().unwrap(), "z_surrogate");
        assert_eq!(design.penalty_factors.last().copied(), Some(0.0));
        assert_eq!(design.matrix[(0, vocab.len())], 1.0);
        assert_eq!(design.matrix[(1, vocab.len())], 0.0);
    }

    #[test]
    fn surrogate_column_name_collision_is_suffixed() {
        // Tokenized terms can never contain '_', but vocabularies may be
        // loaded from files, so the collision rule still applies.
        let vocab = Vocabulary {
            terms: vec!["spam".into(), "z_surrogate".into()],
            document_frequencies: vec![1, 1],
            n_documents: 2,
            min_doc_frac: 0.0,
            max_doc_frac: 1.0,
        };
        let x = SparseMatrix { n_cols: 2, rows: vec![vec![(0, 1.0)], vec![(1, 2.0)]] };
        let design = assemble_design_matrix(&x, &vocab, &[0, 1]).unwrap();
        assert_eq!(design.column_names.last().unwrap(), "z_surrogate_1");
    }

    #[test]
    fn jsonl_round_trip() {
        let mut d = doc("r1", "mild degenerative change");
        d.icd_counts.insert("805.4".into(), 2);
        d.label = Some(1);
        let corpus = vec![d, doc("r2", "unremarkable study")];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &corpus).unwrap();
        let back = read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, corpus);
    }

    #[test]
    fn jsonl_rejects_duplicate_ids() {
        let text = concat!(
            "{\"id\":\"a\",\"text\":\"x\"}\n",
            "{\"id\":\"a\",\"text\":\"y\"}\n"
        );
        assert!(read_jsonl(text.as_bytes()).is_err());
    }
}
