#include "cer/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>
#include <unicode/utf8.h>

#include "cer/error.hpp"
#include "cer/log.hpp"
#include "cer/porter_stemmer.hpp"
#include "json.hpp"

namespace cer::data {
extern const std::string_view kStopwordsText;
extern const std::string_view kAbbreviationsText;
}  // namespace cer::data

namespace cer::corpus {
namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim_ascii(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Decodes the code point starting at byte offset `i`; advances `i`.
// Malformed sequences decode to a negative value.
UChar32 next_code_point(std::string_view s, std::size_t& i) {
    UChar32 c = 0;
    int32_t pos = static_cast<int32_t>(i);
    U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), pos, static_cast<int32_t>(s.size()), c);
    i = static_cast<std::size_t>(pos);
    return c;
}

bool is_space(UChar32 c) { return c >= 0 && u_isUWhiteSpace(c); }

const icu::Normalizer2& nfkc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status) || n == nullptr) throw Error("ICU NFKC normalizer unavailable");
    return *n;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading " + path.string());
    return ss.str();
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

CorpusFormat format_from_path(const std::filesystem::path& path) {
    return ascii_lower(path.extension().string()) == ".tsv" ? CorpusFormat::tsv : CorpusFormat::jsonl;
}

IngestReport ingest_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open corpus file " + path.string());

    IngestReport report;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;

    auto skip = [&](std::size_t& counter, const std::string& why) {
        ++counter;
        report.warnings.push_back(path.filename().string() + ":" + std::to_string(line_no) + ": " + why);
        log::warn(report.warnings.back());
    };

    auto accept = [&](DocumentRecord doc) {
        if (doc.doc_id.empty()) {
            skip(report.skipped_malformed, "empty id");
            return;
        }
        if (normalize_whitespace(doc.abstract_text).empty()) {
            skip(report.skipped_empty, "empty abstract for id " + doc.doc_id);
            return;
        }
        if (!seen.insert(doc.doc_id).second) {
            skip(report.skipped_duplicate, "duplicate id " + doc.doc_id);
            return;
        }
        report.documents.push_back(std::move(doc));
    };

    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (trim_ascii(line).empty()) continue;

        if (format == CorpusFormat::jsonl) {
            nlohmann::json row;
            try {
                row = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error&) {
                skip(report.skipped_malformed, "invalid JSON");
                continue;
            }
            if (!row.is_object()) {
                skip(report.skipped_malformed, "row is not an object");
                continue;
            }
            DocumentRecord doc;
            auto id = row.find("id");
            if (id == row.end() || !(id->is_string() || id->is_number_integer())) {
                skip(report.skipped_malformed, "missing or non-string `id`");
                continue;
            }
            doc.doc_id = id->is_string() ? id->get<std::string>() : std::to_string(id->get<long long>());
            auto abs = row.find("abstract");
            if (abs == row.end() || !abs->is_string()) {
                skip(report.skipped_malformed, "missing or non-string `abstract`");
                continue;
            }
            doc.abstract_text = abs->get<std::string>();
            if (auto title = row.find("title"); title != row.end()) {
                if (title->is_string()) {
                    doc.title = title->get<std::string>();
                } else if (!title->is_null()) {
                    skip(report.skipped_malformed, "non-string `title`");
                    continue;
                }
            }
            accept(std::move(doc));
        } else {
            std::vector<std::string> fields;
            std::size_t start = 0;
            while (true) {
                const auto tab = line.find('\t', start);
                fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
                if (tab == std::string::npos) break;
                start = tab + 1;
            }
            if (line_no == 1 && fields.size() == 3 && ascii_lower(fields[0]) == "id" &&
                ascii_lower(fields[2]) == "abstract") {
                continue;
            }
            if (fields.size() != 3) {
                skip(report.skipped_malformed, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
                continue;
            }
            accept(DocumentRecord{std::string(trim_ascii(fields[0])), fields[1], fields[2]});
        }
    }
    if (in.bad()) throw IoError("error while reading " + path.string());
    return report;
}

WordList WordList::parse(std::string_view text) {
    WordList list;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim_ascii(line);
        if (!line.empty()) {
            std::string entry = normalize_and_lowercase(line);
            if (list.lookup_.insert(entry).second) list.ordered_.push_back(std::move(entry));
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return list;
}

WordList WordList::load(const std::filesystem::path& path) { return parse(read_file(path)); }

bool WordList::contains(std::string_view word) const { return lookup_.count(std::string(word)) > 0; }

const WordList& default_stopwords() {
    static const WordList list = WordList::parse(data::kStopwordsText);
    return list;
}

const WordList& default_abbreviations() {
    static const WordList list = WordList::parse(data::kAbbreviationsText);
    return list;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t start = i;
        const UChar32 c = next_code_point(text, i);
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.append(text.substr(start, i - start));
    }
    return out;
}

std::size_t count_code_points(std::string_view utf8) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < utf8.size()) {
        next_code_point(utf8, i);
        ++n;
    }
    return n;
}

std::vector<std::string> segment_sentences(std::string_view raw, const WordList& abbreviations) {
    const std::string text = normalize_whitespace(raw);
    std::vector<std::string> out;
    if (text.empty()) return out;

    const std::string lower = ascii_lower(text);

    auto ends_with_abbreviation = [&](std::size_t period) {
        for (const std::string& abbr : abbreviations.entries()) {
            if (abbr.size() > period + 1) continue;
            const std::size_t begin = period + 1 - abbr.size();
            if (std::string_view(lower).substr(begin, abbr.size()) != abbr) continue;
            if (begin == 0 || !std::isalnum(static_cast<unsigned char>(lower[begin - 1]))) return true;
        }
        return false;
    };

    std::size_t sentence_start = 0;
    for (std::size_t i = 0; i + 2 < text.size(); ++i) {
        const char c = text[i];
        if ((c != '.' && c != '?' && c != '!') || text[i + 1] != ' ') continue;
        std::size_t probe = i + 2;
        const UChar32 next = next_code_point(text, probe);
        if (next < 0 || !u_isupper(next)) continue;
        if (c == '.' && ends_with_abbreviation(i)) continue;
        out.push_back(text.substr(sentence_start, i + 1 - sentence_start));
        sentence_start = i + 2;
    }
    out.push_back(text.substr(sentence_start));
    return out;
}

std::string normalize_and_lowercase(std::string_view text) {
    icu::UnicodeString src = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString normalized = nfkc().normalize(src, status);
    if (U_FAILURE(status)) throw Error("NFKC normalization failed");
    normalized.toLower(icu::Locale::getRoot());
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

TextAnalyzer::TextAnalyzer() : stopwords_(default_stopwords()) {}

TextAnalyzer::TextAnalyzer(WordList stopwords) : stopwords_(std::move(stopwords)) {}

std::vector<std::string> TextAnalyzer::terms(std::string_view text) const {
    const std::string folded = normalize_and_lowercase(text);
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && !stopwords_.contains(current)) out.push_back(current);
        current.clear();
    };
    std::size_t i = 0;
    while (i < folded.size()) {
        const std::size_t start = i;
        const UChar32 c = next_code_point(folded, i);
        if (c >= 0 && u_isalnum(c)) {
            current.append(folded, start, i - start);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

TokenStream TextAnalyzer::analyze(std::string_view text) const {
    TokenStream tokens = terms(text);
    for (std::string& t : tokens) t = text::porter_stem(t);
    return tokens;
}

TokenStream preprocess(std::string_view text) {
    static const TextAnalyzer analyzer;
    return analyzer.analyze(text);
}

std::vector<SentenceUnit> segment_documents(std::span<const DocumentRecord> docs, const WordList& abbreviations) {
    std::vector<SentenceUnit> units;
    for (const DocumentRecord& doc : docs) {
        std::size_t ordinal = 0;
        for (std::string& sentence : segment_sentences(doc.abstract_text, abbreviations)) {
            SentenceUnit unit;
            unit.sentence_id = doc.doc_id + "#" + std::to_string(ordinal++);
            unit.doc_id = doc.doc_id;
            unit.char_length = count_code_points(sentence);
            unit.text = std::move(sentence);
            units.push_back(std::move(unit));
        }
    }
    return units;
}

}  // namespace cer::corpus
