#include "cer/porter_stemmer.hpp"

#include <algorithm>

namespace cer::text {
namespace {

// Direct transcription of the reference algorithm. `b` holds the word,
// `k` is the index of its last character and `j` a general offset set by
// ends(). All indices are signed so that the j < 0 cases behave as in C.
class Stemmer {
  public:
    explicit Stemmer(std::string word) : b_(std::move(word)), k_(static_cast<int>(b_.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

  private:
    [[nodiscard]] char at(int i) const { return b_[static_cast<std::size_t>(i)]; }

    [[nodiscard]] bool cons(int i) const {
        switch (at(i)) {
            case 'a':
            case 'e':
            case 'i':
            case 'o':
            case 'u': return false;
            case 'y': return i == 0 ? true : !cons(i - 1);
            default: return true;
        }
    }

    // Number of VC sequences in b[0..j].
    [[nodiscard]] int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    [[nodiscard]] bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i) {
            if (!cons(i)) return true;
        }
        return false;
    }

    [[nodiscard]] bool double_consonant(int j) const {
        if (j < 1) return false;
        if (at(j) != at(j - 1)) return false;
        return cons(j);
    }

    // consonant-vowel-consonant ending at i, where the final consonant is
    // not w, x or y.
    [[nodiscard]] bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = at(i);
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        const int len = static_cast<int>(s.size());
        if (len > k_ + 1) return false;
        if (s.back() != at(k_)) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - len + 1), s.size()) != s) return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
        k_ = j_ + static_cast<int>(s.size());
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void replace_if_measured(std::string_view s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (at(k_) == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (at(k_ - 1) != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_consonant(k_)) {
                --k_;
                const char ch = at(k_);
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (m() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[static_cast<std::size_t>(k_)] = 'i';
    }

    // Tries each (suffix, replacement) pair in order; the first matching
    // suffix decides, whether or not its measure condition holds.
    template <std::size_t N>
    bool try_rules(const std::pair<std::string_view, std::string_view> (&rules)[N]) {
        for (const auto& [suffix, repl] : rules) {
            if (ends(suffix)) {
                replace_if_measured(repl);
                return true;
            }
        }
        return false;
    }

    void step2() {
        if (k_ < 1) return;
        switch (at(k_ - 1)) {
            case 'a': {
                static const std::pair<std::string_view, std::string_view> r[] = {{"ational", "ate"}, {"tional", "tion"}};
                try_rules(r);
                break;
            }
            case 'c': {
                static const std::pair<std::string_view, std::string_view> r[] = {{"enci", "ence"}, {"anci", "ance"}};
                try_rules(r);
                break;
            }
            case 'e': {
                static const std::pair<std::string_view, std::string_view> r[] = {{"izer", "ize"}};
                try_rules(r);
                break;
            }
            case 'l': {
                static const std::pair<std::string_view, std::string_view> r[] = {
                    {"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}};
                try_rules(r);
                break;
            }
            case 'o': {
                static const std::pair<std::string_view, std::string_view> r[] = {
                    {"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}};
                try_rules(r);
                break;
            }
            case 's': {
                static const std::pair<std::string_view, std::string_view> r[] = {
                    {"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}};
                try_rules(r);
                break;
            }
            case 't': {
                static const std::pair<std::string_view, std::string_view> r[] = {
                    {"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}};
                try_rules(r);
                break;
            }
            case 'g': {
                static const std::pair<std::string_view, std::string_view> r[] = {{"logi", "log"}};
                try_rules(r);
                break;
            }
            default: break;
        }
    }

    void step3() {
        switch (at(k_)) {
            case 'e': {
                static const std::pair<std::string_view, std::string_view> r[] = {
                    {"icate", "ic"}, {"ative", ""}, {"alize", "al"}};
                try_rules(r);
                break;
            }
            case 'i': {
                static const std::pair<std::string_view, std::string_view> r[] = {{"iciti", "ic"}};
                try_rules(r);
                break;
            }
            case 'l': {
                static const std::pair<std::string_view, std::string_view> r[] = {{"ical", "ic"}, {"ful", ""}};
                try_rules(r);
                break;
            }
            case 's': {
                static const std::pair<std::string_view, std::string_view> r[] = {{"ness", ""}};
                try_rules(r);
                break;
            }
            default: break;
        }
    }

    void step4() {
        if (k_ < 1) return;
        auto any = [this](std::initializer_list<std::string_view> suffixes) {
            return std::any_of(suffixes.begin(), suffixes.end(), [this](std::string_view s) { return ends(s); });
        };
        bool matched = false;
        switch (at(k_ - 1)) {
            case 'a': matched = ends("al"); break;
            case 'c': matched = any({"ance", "ence"}); break;
            case 'e': matched = ends("er"); break;
            case 'i': matched = ends("ic"); break;
            case 'l': matched = any({"able", "ible"}); break;
            case 'n': matched = any({"ant", "ement", "ment", "ent"}); break;
            case 'o':
                if (ends("ion") && j_ >= 0 && (at(j_) == 's' || at(j_) == 't')) {
                    matched = true;
                } else {
                    matched = ends("ou");
                }
                break;
            case 's': matched = ends("ism"); break;
            case 't': matched = any({"ate", "iti"}); break;
            case 'u': matched = ends("ous"); break;
            case 'v': matched = ends("ive"); break;
            case 'z': matched = ends("ize"); break;
            default: break;
        }
        if (matched && m() > 1) k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (at(k_) == 'e') {
            const int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (at(k_) == 'l' && double_consonant(k_) && m() > 1) --k_;
    }

    std::string b_;
    int k_;
    int j_ = 0;
};

}  // namespace

std::string porter_stem(std::string_view word) {
    if (word.size() <= 2) return std::string(word);
    const bool ascii_alpha = std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    if (!ascii_alpha) return std::string(word);
    return Stemmer(std::string(word)).run();
}

}  // namespace cer::text
