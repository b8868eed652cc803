#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prefixseal {

// (record id, value) pair. The value is a serialized ciphertext for the
// encrypted search paths and plaintext for the oracle.
struct CorpusEntry {
    std::string record_id;
    std::string value;
};

// Server-side match: plain string starts-with, no key material involved.
bool match_prefix(std::string_view serialized_ct, std::string_view token) noexcept;

// Linear scan. Ids come back in input order, first occurrence of each id only.
std::vector<std::string> search_corpus(std::span<const CorpusEntry> corpus, std::string_view token);

// Sorted view of a corpus for range-scan lookups; same answers as search_corpus.
class SortedPrefixIndex {
public:
    explicit SortedPrefixIndex(std::span<const CorpusEntry> corpus);

    std::vector<std::string> search(std::string_view token) const;
    // Input positions of matching entries, ascending.
    std::vector<std::size_t> positions(std::string_view token) const;

private:
    std::vector<std::pair<std::string, std::size_t>> sorted_;
    std::vector<std::string> ids_;
};

// Brute-force plaintext reference: ids whose normalized text starts with the
// normalized term cut to pref_len characters.
std::vector<std::string> oracle_search(std::span<const CorpusEntry> plain_corpus, std::string_view term,
                                       unsigned pref_len);

} // namespace prefixseal
