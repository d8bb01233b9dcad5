#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace cer::corpus {

struct DocumentRecord {
    std::string doc_id;  // e.g. a PMID
    std::string title;
    std::string abstract_text;

    bool operator==(const DocumentRecord&) const = default;
};

/// One retrievable sentence. `sentence_id` is "<doc_id>#<ordinal>" with
/// ordinals contiguous from 0 inside each document.
struct SentenceUnit {
    std::string sentence_id;
    std::string doc_id;
    std::string text;
    std::size_t char_length = 0;  // Unicode code points

    bool operator==(const SentenceUnit&) const = default;
};

/// Stemmed, lowercased terms with stopwords removed.
using TokenStream = std::vector<std::string>;

enum class CorpusFormat { jsonl, tsv };

/// `.tsv` selects tsv, anything else jsonl.
CorpusFormat format_from_path(const std::filesystem::path& path);

struct IngestReport {
    std::vector<DocumentRecord> documents;
    std::size_t skipped_empty = 0;
    std::size_t skipped_malformed = 0;
    std::size_t skipped_duplicate = 0;
    std::vector<std::string> warnings;  // one per skipped row, with line number

    [[nodiscard]] std::size_t skipped() const { return skipped_empty + skipped_malformed + skipped_duplicate; }
};

/// Reads a corpus file. JSONL rows are objects with string `id`, `abstract`
/// and optional string `title` (numeric ids are accepted and stringified).
/// TSV rows are `id<TAB>title<TAB>abstract`, with an optional header row.
/// Throws IoError if the file cannot be read; bad rows are skipped and
/// reported, never dropped silently.
IngestReport ingest_corpus(const std::filesystem::path& path, CorpusFormat format);

/// Parsed one-entry-per-line list; `#` starts a comment, blank lines ignored.
/// Entries are stored lowercased.
class WordList {
  public:
    WordList() = default;
    static WordList parse(std::string_view text);
    static WordList load(const std::filesystem::path& path);

    [[nodiscard]] bool contains(std::string_view word) const;
    [[nodiscard]] std::size_t size() const { return ordered_.size(); }
    [[nodiscard]] const std::vector<std::string>& entries() const { return ordered_; }

  private:
    std::vector<std::string> ordered_;
    std::unordered_set<std::string> lookup_;
};

/// The shipped lists (data/stopwords.txt, data/abbreviations.txt).
const WordList& default_stopwords();
const WordList& default_abbreviations();

/// Collapses every run of Unicode whitespace into one ASCII space and trims.
std::string normalize_whitespace(std::string_view text);

/// Number of Unicode code points in a UTF-8 string.
std::size_t count_code_points(std::string_view utf8);

/// Splits after `.`, `?` or `!` when followed by whitespace and an uppercase
/// letter, unless the text before the period ends with an abbreviation
/// entry. Joining the result with single spaces gives
/// normalize_whitespace(text).
std::vector<std::string> segment_sentences(std::string_view text,
                                           const WordList& abbreviations = default_abbreviations());

/// Text analysis chain: NFKC normalization, lowercasing, splitting on runs of
/// non-alphanumeric code points, stopword removal and Porter stemming.
class TextAnalyzer {
  public:
    TextAnalyzer();
    explicit TextAnalyzer(WordList stopwords);

    /// Full chain.
    [[nodiscard]] TokenStream analyze(std::string_view text) const;

    /// Every stage except stemming.
    [[nodiscard]] std::vector<std::string> terms(std::string_view text) const;

    [[nodiscard]] const WordList& stopwords() const { return stopwords_; }

  private:
    WordList stopwords_;
};

/// analyze() with the shipped stopword list.
TokenStream preprocess(std::string_view text);

/// NFKC-normalized, lowercased copy of `text` (UTF-8 in, UTF-8 out).
std::string normalize_and_lowercase(std::string_view text);

/// Segments every document's abstract into ordinal-numbered units. Abstracts
/// that yield no sentence contribute nothing.
std::vector<SentenceUnit> segment_documents(std::span<const DocumentRecord> docs,
                                            const WordList& abbreviations = default_abbreviations());

}  // namespace cer::corpus
